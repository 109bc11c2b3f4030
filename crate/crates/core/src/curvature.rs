//! Closed-form curvature of the warped model families.
//!
//! Every family here has a curvature operator that is diagonal on the wedge
//! products of its orthonormal frame, so `R(v,w,w,v) = sum_{a<b} K_ab
//! (v_a w_b - v_b w_a)^2` and all curvature data at a point is the symmetric
//! table `K_ab` of frame-pair sectional curvatures.

use crate::error::{Error, Result};
use crate::geometry::{MetricModel, ModelPoint, PlaneComplement, TangentVector};
use crate::profiles::WarpingProfile;

/// Relative distance from an axis below which limits replace the quotients.
pub const EPS_AXIS_FACTOR: f64 = 1e-3;

/// Sectional curvatures of the coordinate 2-planes of
/// `dr^2 + omega^2 dt^2 + beta^2 ds_n^2` (t-entries are zero for
/// `dr^2 + beta^2 ds_n^2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionalTable {
    pub k_rt: f64,
    pub k_ri: f64,
    pub k_ti: f64,
    pub k_ij: f64,
}

/// Frame-pair sectional curvatures, row-major `dim x dim`, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCurvature {
    pub dim: usize,
    pub k: Vec<f64>,
}

impl FrameCurvature {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            k: vec![0.0; dim * dim],
        }
    }

    fn set(&mut self, a: usize, b: usize, v: f64) {
        self.k[a * self.dim + b] = v;
        self.k[b * self.dim + a] = v;
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.k[a * self.dim + b]
    }

    /// `R(v,w,w,v)` for frame components `v`, `w`.
    pub fn quadform(&self, v: &[f64], w: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for a in 0..d {
            for b in a + 1..d {
                let x = v[a] * w[b] - v[b] * w[a];
                s += self.k[a * d + b] * x * x;
            }
        }
        s
    }

    /// Ordered-pair sum over an orthonormal basis of the complement with
    /// projector `g`: `2 sum_{a<b} K_ab (g_aa g_bb - g_ab^2)`.
    pub fn s_from_projector(&self, g: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for a in 0..d {
            let gaa = g[a * d + a];
            for b in a + 1..d {
                let gab = g[a * d + b];
                s += self.k[a * d + b] * (gaa * g[b * d + b] - gab * gab);
            }
        }
        2.0 * s
    }

    fn embed(&mut self, offset: usize, block: &FrameCurvature) {
        for a in 0..block.dim {
            for b in a + 1..block.dim {
                self.set(offset + a, offset + b, block.get(a, b));
            }
        }
    }
}

/// An end of the radial domain where `beta` vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub r: f64,
    /// +1 when the interior lies at larger r.
    pub inward: f64,
    pub beta_d1: f64,
    pub beta_d3: f64,
    /// Radius of the band around the axis handled by limits.
    pub eps: f64,
}

impl Axis {
    /// Common limit `-beta'''/beta'` of the fiber-involving curvatures.
    pub fn limit(&self) -> f64 {
        -self.beta_d3 / self.beta_d1
    }
}

fn third_derivative(beta: &WarpingProfile, e: f64, inward: f64, h: f64) -> f64 {
    let d2e = beta.jet(e).d2;
    let quotient = |h: f64| (beta.jet(e + inward * h).d2 - d2e) / (inward * h);
    (4.0 * quotient(0.5 * h) - quotient(h)) / 3.0
}

/// Domain ends where `beta` is zero.
pub fn axes(beta: &WarpingProfile, (lo, hi): (f64, f64)) -> Vec<Axis> {
    let mut out = Vec::new();
    let len = hi - lo;
    for (e, inward) in [(lo, 1.0), (hi, -1.0)] {
        let j = beta.jet(e);
        if j.value.abs() > 1e-12 * len.max(1.0) {
            continue;
        }
        let d3 = third_derivative(beta, e, inward, 1e-3 * len);
        let scale = if d3.abs() > 1e-12 {
            d3.abs().powf(-0.5).min(len)
        } else {
            len
        };
        out.push(Axis {
            r: e,
            inward,
            beta_d1: j.d1,
            beta_d3: d3,
            eps: EPS_AXIS_FACTOR * scale,
        });
    }
    out
}

fn near_axis(axes: &[Axis], r: f64) -> Option<&Axis> {
    axes.iter().find(|a| (r - a.r).abs() < a.eps)
}

fn radial_parts(model: &MetricModel) -> Result<(&WarpingProfile, (f64, f64))> {
    match model {
        MetricModel::WarpedLine { beta, r_domain, .. } => Ok((beta, *r_domain)),
        MetricModel::TwoDWarp { beta, r_domain, .. } => Ok((beta, *r_domain)),
        other => Err(Error::UnsupportedModel(format!(
            "{} has no radial warping function",
            other.family()
        ))),
    }
}

/// The r -> axis limit `-beta'''/beta'` shared by every fiber-involving
/// sectional curvature at a smoothly closing axis.
pub fn limit_at_axis(model: &MetricModel) -> Result<f64> {
    let (beta, dom) = radial_parts(model)?;
    let (lo, hi) = dom;
    let candidates = [(lo, 1.0), (hi, -1.0)];
    let mut last_reason = String::new();
    for (e, inward) in candidates {
        let j = beta.jet(e);
        if j.value.abs() > 1e-12 {
            last_reason = format!("beta({e}) = {:e}", j.value);
            continue;
        }
        if (inward * j.d1 - 1.0).abs() > 1e-9 {
            return Err(Error::NotClosed(format!("beta'({e}) = {}", j.d1)));
        }
        let d3 = third_derivative(beta, e, inward, 1e-3 * (hi - lo));
        return Ok(-d3 / j.d1);
    }
    Err(Error::NotClosed(last_reason))
}

fn off_axis_table(model: &MetricModel, r: f64, t: f64) -> SectionalTable {
    let (beta, omega) = match model {
        MetricModel::WarpedLine { beta, .. } => (beta, None),
        MetricModel::TwoDWarp { beta, omega, .. } => (beta, Some(omega)),
        _ => unreachable!("radial models only"),
    };
    let b = beta.jet(r);
    let k_ri = -b.d2 / b.value;
    let k_ij = beta.slope_deficit(r) / (b.value * b.value);
    match omega {
        None => SectionalTable {
            k_rt: 0.0,
            k_ri,
            k_ti: 0.0,
            k_ij,
        },
        Some(om) => {
            let w = om.jet(r, t);
            SectionalTable {
                k_rt: -w.drr / w.value,
                k_ri,
                k_ti: -w.dr * b.d1 / (w.value * b.value),
                k_ij,
            }
        }
    }
}

/// The coordinate-plane curvatures away from any axis.
pub fn base_sectionals(model: &MetricModel, x: &ModelPoint) -> Result<SectionalTable> {
    let (beta, dom) = radial_parts(model)?;
    let ax = axes(beta, dom);
    if let Some(a) = near_axis(&ax, x.r) {
        return Err(Error::AxisSingularity { r: x.r, eps: a.eps });
    }
    Ok(off_axis_table(model, x.r, x.t_or_zero()))
}

/// Coordinate-plane curvatures anywhere, using the axis limits in the
/// band `|r - axis| < eps`.
pub fn sectionals(model: &MetricModel, x: &ModelPoint) -> Result<SectionalTable> {
    let (beta, dom) = radial_parts(model)?;
    let ax = axes(beta, dom);
    let t = x.t_or_zero();
    match near_axis(&ax, x.r) {
        None => Ok(off_axis_table(model, x.r, t)),
        Some(a) => {
            let limit = a.limit();
            let k_t = match model {
                MetricModel::TwoDWarp { omega, .. } => {
                    let w = omega.jet(x.r, t);
                    -w.drr / w.value
                }
                _ => 0.0,
            };
            Ok(SectionalTable {
                k_rt: k_t,
                k_ri: limit,
                k_ti: k_t,
                k_ij: limit,
            })
        }
    }
}

fn radial_frame(table: &SectionalTable, base_dim: usize, fiber_dim: usize) -> FrameCurvature {
    let mut fc = FrameCurvature::zeros(base_dim + fiber_dim);
    if base_dim == 2 {
        fc.set(0, 1, table.k_rt);
    }
    for i in 0..fiber_dim {
        fc.set(0, base_dim + i, table.k_ri);
        if base_dim == 2 {
            fc.set(1, base_dim + i, table.k_ti);
        }
        for j in i + 1..fiber_dim {
            fc.set(base_dim + i, base_dim + j, table.k_ij);
        }
    }
    fc
}

/// Pair curvatures of `dt^2 + sum rho_i(t)^2 ds_{n_i}^2`; `x.r` is the line
/// coordinate.
pub fn multiply_warped_sectionals(model: &MetricModel, x: &ModelPoint) -> Result<FrameCurvature> {
    let MetricModel::MultiplyWarpedLine { fibers, .. } = model else {
        return Err(Error::UnsupportedModel(model.family().into()));
    };
    let mut fc = FrameCurvature::zeros(model.dim());
    let jets: Vec<_> = fibers
        .iter()
        .map(|(_, rho)| (rho.jet(x.r), rho.slope_deficit(x.r)))
        .collect();
    let mut offsets = Vec::with_capacity(fibers.len());
    let mut off = 1;
    for (n, _) in fibers {
        offsets.push(off);
        off += n;
    }
    for (i, (n, _)) in fibers.iter().enumerate() {
        let (j, def) = jets[i];
        let o = offsets[i];
        for a in 0..*n {
            fc.set(0, o + a, -j.d2 / j.value);
            for b in a + 1..*n {
                fc.set(o + a, o + b, def / (j.value * j.value));
            }
        }
        for (k, (m, _)) in fibers.iter().enumerate().skip(i + 1) {
            let (jk, _) = jets[k];
            let cross = -j.d1 * jk.d1 / (j.value * jk.value);
            for a in 0..*n {
                for b in 0..*m {
                    fc.set(o + a, offsets[k] + b, cross);
                }
            }
        }
    }
    Ok(fc)
}

/// Frame-pair curvature table of any non-assembly model at `x`.
pub fn frame_curvature(model: &MetricModel, x: &ModelPoint) -> Result<FrameCurvature> {
    match model {
        MetricModel::ProductOfSpheres { dims, radii } => {
            let mut fc = FrameCurvature::zeros(model.dim());
            let mut off = 0;
            for (&n, &rad) in dims.iter().zip(radii) {
                for a in 0..n {
                    for b in a + 1..n {
                        fc.set(off + a, off + b, 1.0 / (rad * rad));
                    }
                }
                off += n;
            }
            Ok(fc)
        }
        MetricModel::WarpedLine { fiber_dim, .. } => Ok(radial_frame(&sectionals(model, x)?, 1, *fiber_dim)),
        MetricModel::TwoDWarp { fiber_dim, .. } => Ok(radial_frame(&sectionals(model, x)?, 2, *fiber_dim)),
        MetricModel::MultiplyWarpedLine { .. } => multiply_warped_sectionals(model, x),
        MetricModel::SphereProduct { base, sphere_dim } => {
            let inner = frame_curvature(base, x)?;
            let mut fc = FrameCurvature::zeros(model.dim());
            fc.embed(0, &inner);
            let sphere = frame_curvature(&MetricModel::unit_spheres(vec![*sphere_dim])?, x)?;
            fc.embed(inner.dim, &sphere);
            Ok(fc)
        }
        MetricModel::RegionAssembly(_) => Err(Error::UnsupportedModel(
            "evaluate region assemblies region by region".into(),
        )),
    }
}

/// `R(v,w,w,v)` of the doubly warped metric from its four base/fiber terms.
pub fn riemann_quadform(model: &MetricModel, x: &ModelPoint, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    let MetricModel::TwoDWarp { fiber_dim, .. } = model else {
        return Err(Error::UnsupportedModel(model.family().into()));
    };
    let d = 2 + fiber_dim;
    for u in [v, w] {
        if u.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: u.dim(),
            });
        }
    }
    let k = base_sectionals(model, x)?;
    let (v, w) = (&v.components, &w.components);
    let wedge = |a: usize, b: usize| {
        let x = v[a] * w[b] - v[b] * w[a];
        x * x
    };
    let mut rt = 0.0;
    let mut ri = 0.0;
    let mut ti = 0.0;
    let mut ij = 0.0;
    rt += wedge(0, 1);
    for i in 2..d {
        ri += wedge(0, i);
        ti += wedge(1, i);
        for j in i + 1..d {
            ij += wedge(i, j);
        }
    }
    Ok(k.k_rt * rt + k.k_ri * ri + k.k_ti * ti + k.k_ij * ij)
}

/// `s_{p,n}(x, P) = sum_{i != j} K(e_i, e_j)` over an orthonormal basis of `P^perp`.
pub fn s_pn(model: &MetricModel, x: &ModelPoint, complement: &PlaneComplement) -> Result<f64> {
    let d = model.dim();
    if complement.dim_ambient != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: complement.dim_ambient,
        });
    }
    let fc = frame_curvature(model, x)?;
    Ok(fc.s_from_projector(&complement.projector()))
}

/// Coordinate components `(v_r, v_t, v_k, v_{k+1})` of the two non-fiber
/// complement vectors in the case analysis; `p` is the plane dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    pub case_id: u8,
    pub p: usize,
    pub v: [f64; 4],
    pub w: [f64; 4],
}

struct CaseData {
    n: usize,
    beta: f64,
    beta_r: f64,
    beta_rr: f64,
    deficit: f64,
    omega: f64,
    omega_r: f64,
    omega_rr: f64,
}

fn case_data(model: &MetricModel, x: &ModelPoint) -> Result<CaseData> {
    let MetricModel::TwoDWarp {
        fiber_dim,
        beta,
        omega,
        r_domain,
        ..
    } = model
    else {
        return Err(Error::UnsupportedModel(model.family().into()));
    };
    if let Some(a) = near_axis(&axes(beta, *r_domain), x.r) {
        return Err(Error::AxisSingularity { r: x.r, eps: a.eps });
    }
    let b = beta.jet(x.r);
    let w = omega.jet(x.r, x.t_or_zero());
    Ok(CaseData {
        n: *fiber_dim,
        beta: b.value,
        beta_r: b.d1,
        beta_rr: b.d2,
        deficit: beta.slope_deficit(x.r),
        omega: w.value,
        omega_r: w.dr,
        omega_rr: w.drr,
    })
}

fn mismatch(case: u8, reason: impl Into<String>) -> Error {
    Error::CaseMismatch {
        case,
        reason: reason.into(),
    }
}

fn validate_case(c: &CaseData, params: &CaseParams) -> Result<()> {
    let id = params.case_id;
    let (n, p) = (c.n, params.p);
    let needed = match id {
        1 => 0,
        2 => 1,
        3 => 2,
        _ => return Err(mismatch(id, "case id must be 1, 2 or 3")),
    };
    if p > n || n - p + needed > n {
        return Err(mismatch(
            id,
            format!("p = {p} leaves no room for {needed} extra fiber directions in S^{n}"),
        ));
    }
    if id == 1 {
        return Ok(());
    }
    let (v, w) = (params.v, params.w);
    let g = |a: &[f64; 4], b: &[f64; 4]| {
        a[0] * b[0] + c.omega * c.omega * a[1] * b[1] + c.beta * c.beta * (a[2] * b[2] + a[3] * b[3])
    };
    let (nv, nw) = (g(&v, &v).sqrt(), g(&w, &w).sqrt());
    if !(nv > 0.0 && nw > 0.0) {
        return Err(mismatch(id, "zero vector"));
    }
    if g(&v, &w).abs() > 1e-10 * nv * nw {
        return Err(mismatch(id, "v and w are not orthogonal"));
    }
    let fiber_rank_2 = (v[2] * w[3] - v[3] * w[2]).abs() > 1e-12 * (nv * nw) / (c.beta * c.beta);
    let fiber_nonzero = [v[2], v[3], w[2], w[3]]
        .iter()
        .any(|x| x.abs() * c.beta > 1e-12 * nv.max(nw));
    match id {
        2 if v[3] != 0.0 || w[3] != 0.0 => Err(mismatch(2, "second fiber component must vanish")),
        2 if !fiber_nonzero => Err(mismatch(2, "fiber projection is zero")),
        3 if !fiber_rank_2 => Err(mismatch(3, "fiber projection is not 2-dimensional")),
        _ => Ok(()),
    }
}

/// The case formulas of the doubly warped metric, in coordinate components.
pub fn s_pn_case(model: &MetricModel, x: &ModelPoint, params: &CaseParams) -> Result<f64> {
    let c = case_data(model, x)?;
    validate_case(&c, params)?;
    let f = (c.n - params.p) as f64;
    let lead = f * (f - 1.0) * c.deficit / (c.beta * c.beta);
    if params.case_id == 1 {
        return Ok(lead
            - 2.0 * f * c.beta_rr / c.beta
            - 2.0 * f * c.omega_r * c.beta_r / (c.omega * c.beta)
            - 2.0 * c.omega_rr / c.omega);
    }
    let (v, w) = (params.v, params.w);
    let norm2 =
        |u: &[f64; 4]| u[0] * u[0] + c.omega * c.omega * u[1] * u[1] + c.beta * c.beta * (u[2] * u[2] + u[3] * u[3]);
    let fiber_term = |u: &[f64; 4]| {
        (u[2] * u[2] + u[3] * u[3]) * c.deficit
            - u[0] * u[0] * c.beta_rr / c.beta
            - u[1] * u[1] * c.beta_r * c.omega * c.omega_r / c.beta
    };
    let wedge = |a: usize, b: usize| {
        let x = v[a] * w[b] - v[b] * w[a];
        x * x
    };
    let (nv, nw) = (norm2(&v), norm2(&w));
    let r_vw = -c.omega * c.omega_rr * wedge(1, 0) + wedge(2, 3) * c.beta * c.beta * c.deficit
        - (wedge(2, 0) + wedge(3, 0)) * c.beta * c.beta_rr
        - (wedge(2, 1) + wedge(3, 1)) * c.beta * c.beta_r * c.omega * c.omega_r;
    Ok(lead + 2.0 * f / nv * fiber_term(&v) + 2.0 * f / nw * fiber_term(&w) + 2.0 / (nv * nw) * r_vw)
}

/// The orthonormal-frame complement described by case parameters: the first
/// `n - p` fiber directions plus the two normalized non-fiber vectors.
pub fn case_complement(model: &MetricModel, x: &ModelPoint, params: &CaseParams) -> Result<PlaneComplement> {
    let c = case_data(model, x)?;
    validate_case(&c, params)?;
    let d = c.n + 2;
    let f = c.n - params.p;
    let mut basis: Vec<TangentVector> = (0..f).map(|i| TangentVector::unit(d, 2 + i)).collect();
    if params.case_id == 1 {
        basis.push(TangentVector::unit(d, 0));
        basis.push(TangentVector::unit(d, 1));
    } else {
        for u in [params.v, params.w] {
            let mut comp = vec![0.0; d];
            comp[0] = u[0];
            comp[1] = c.omega * u[1];
            comp[2 + f] = c.beta * u[2];
            if params.case_id == 3 {
                comp[3 + f] = c.beta * u[3];
            }
            let n = comp.iter().map(|a| a * a).sum::<f64>().sqrt();
            basis.push(TangentVector::new(comp.into_iter().map(|a| a / n).collect()));
        }
    }
    let basis = crate::geometry::gram_schmidt(&basis)?;
    PlaneComplement::new(d, params.p, basis)
}

/// `(r, K_rt, K_ri, K_ti, K_ij)` along `r` at fixed `t`.
pub fn sectional_curve(model: &MetricModel, t: f64, n: usize) -> Result<Vec<[f64; 5]>> {
    let (_, (lo, hi)) = radial_parts(model)?;
    (0..n)
        .map(|i| {
            let r = if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            let k = sectionals(model, &ModelPoint::planar(r, t))?;
            Ok([r, k.k_rt, k.k_ri, k.k_ti, k.k_ij])
        })
        .collect()
}
