//! Finite-difference curvature oracle.
//!
//! Models are realized in explicit charts (nested spherical coordinates on
//! the fibers) and the Levi-Civita connection and Riemann tensor are
//! computed from metric components by central differences. Nothing here
//! uses the closed forms of [`crate::curvature`], which this module checks.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::curvature::frame_curvature;
use crate::error::{Error, Result};
use crate::geometry::{MetricModel, ModelPoint, EPS_CHART};

pub const DEFAULT_H: f64 = 1e-4;
/// Step used by [`crosscheck`], which Richardson-extrapolates by default.
/// Plain central differences at `DEFAULT_H` leave truncation errors near
/// 1e-5 where the warping functions are small.
pub const CROSSCHECK_H: f64 = 1e-3;
pub const DEFAULT_MAX_DIM: usize = 7;

/// Metric components of a model in a coordinate chart.
#[derive(Debug, Clone)]
pub struct ChartMetric {
    pub dim: usize,
    pub valid_box: Vec<(f64, f64)>,
    model: MetricModel,
}

/// Round-metric factors of `S^n` in nested spherical coordinates.
fn sphere_factors(angles: &[f64], out: &mut Vec<f64>, scale2: f64) {
    let mut c = 1.0;
    for k in 0..angles.len() {
        if k > 0 {
            let s = angles[k - 1].sin();
            c *= s * s;
        }
        out.push(scale2 * c);
    }
}

fn sphere_box(n: usize, out: &mut Vec<(f64, f64)>) {
    for k in 0..n {
        if k + 1 < n {
            out.push((EPS_CHART, PI - EPS_CHART));
        } else {
            out.push((-4.0 * PI, 4.0 * PI));
        }
    }
}

fn diag_of(model: &MetricModel, x: &[f64], out: &mut Vec<f64>) {
    match model {
        MetricModel::ProductOfSpheres { dims, radii } => {
            let mut off = 0;
            for (&n, &rad) in dims.iter().zip(radii) {
                sphere_factors(&x[off..off + n], out, rad * rad);
                off += n;
            }
        }
        MetricModel::WarpedLine { beta, .. } => {
            let b = beta.jet(x[0]).value;
            out.push(1.0);
            sphere_factors(&x[1..], out, b * b);
        }
        MetricModel::TwoDWarp { beta, omega, .. } => {
            let b = beta.jet(x[0]).value;
            let w = omega.jet(x[0], x[1]).value;
            out.push(1.0);
            out.push(w * w);
            sphere_factors(&x[2..], out, b * b);
        }
        MetricModel::MultiplyWarpedLine { fibers, .. } => {
            out.push(1.0);
            let mut off = 1;
            for (n, rho) in fibers {
                let r = rho.jet(x[0]).value;
                sphere_factors(&x[off..off + n], out, r * r);
                off += n;
            }
        }
        MetricModel::SphereProduct { base, sphere_dim } => {
            let bd = base.dim();
            diag_of(base, &x[..bd], out);
            sphere_factors(&x[bd..bd + sphere_dim], out, 1.0);
        }
        MetricModel::RegionAssembly(_) => unreachable!("rejected by chart_of"),
    }
}

fn box_of(model: &MetricModel, out: &mut Vec<(f64, f64)>) {
    match model {
        MetricModel::ProductOfSpheres { dims, .. } => dims.iter().for_each(|&n| sphere_box(n, out)),
        MetricModel::WarpedLine {
            fiber_dim, r_domain, ..
        } => {
            out.push(*r_domain);
            sphere_box(*fiber_dim, out);
        }
        MetricModel::TwoDWarp {
            fiber_dim,
            r_domain,
            t_domain,
            ..
        } => {
            out.push(*r_domain);
            out.push(*t_domain);
            sphere_box(*fiber_dim, out);
        }
        MetricModel::MultiplyWarpedLine { fibers, t_domain } => {
            out.push(*t_domain);
            fibers.iter().for_each(|(n, _)| sphere_box(*n, out));
        }
        MetricModel::SphereProduct { base, sphere_dim } => {
            box_of(base, out);
            sphere_box(*sphere_dim, out);
        }
        MetricModel::RegionAssembly(_) => {}
    }
}

/// Explicit chart of a single-region model.
pub fn chart_of(model: &MetricModel) -> Result<ChartMetric> {
    if let MetricModel::RegionAssembly(_) = model {
        return Err(Error::UnsupportedModel("run the oracle per region".into()));
    }
    let mut valid_box = Vec::new();
    box_of(model, &mut valid_box);
    Ok(ChartMetric {
        dim: model.dim(),
        valid_box,
        model: model.clone(),
    })
}

impl ChartMetric {
    /// Diagonal of the (diagonal) metric matrix at `x`.
    pub fn diagonal(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        diag_of(&self.model, x, &mut out);
        out
    }

    /// Full symmetric component matrix, row-major.
    pub fn components(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut g = vec![0.0; d * d];
        for (i, v) in self.diagonal(x).into_iter().enumerate() {
            g[i * d + i] = v;
        }
        g
    }

    fn check_stencil(&self, x: &[f64], reach: f64) -> Result<()> {
        for (i, (&xi, &(lo, hi))) in x.iter().zip(&self.valid_box).enumerate() {
            if xi - reach < lo || xi + reach > hi {
                return Err(Error::StencilOutOfDomain { coord: i });
            }
        }
        Ok(())
    }
}

fn invert(a: &[f64], d: usize) -> Vec<f64> {
    // Gauss–Jordan with partial pivoting; inputs are small SPD matrices
    let mut m = a.to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&p, &q| m[p * d + col].abs().total_cmp(&m[q * d + col].abs()))
            .unwrap_or(col);
        if piv != col {
            for k in 0..d {
                m.swap(col * d + k, piv * d + k);
                inv.swap(col * d + k, piv * d + k);
            }
        }
        let p = m[col * d + col];
        for k in 0..d {
            m[col * d + k] /= p;
            inv[col * d + k] /= p;
        }
        for row in 0..d {
            if row != col {
                let f = m[row * d + col];
                if f != 0.0 {
                    for k in 0..d {
                        m[row * d + k] -= f * m[col * d + k];
                        inv[row * d + k] -= f * inv[col * d + k];
                    }
                }
            }
        }
    }
    inv
}

/// `Gamma^k_ij` stored at `[k][i][j]`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }
}

fn christoffel_unchecked(chart: &ChartMetric, x: &[f64], h: f64) -> Christoffel {
    let d = chart.dim;
    let g = chart.components(x);
    let ginv = invert(&g, d);
    // dg[m][i][j] = d_m g_ij
    let mut dg = vec![0.0; d * d * d];
    let mut xp = x.to_vec();
    for m in 0..d {
        xp[m] = x[m] + h;
        let gp = chart.components(&xp);
        xp[m] = x[m] - h;
        let gm = chart.components(&xp);
        xp[m] = x[m];
        for ij in 0..d * d {
            dg[m * d * d + ij] = (gp[ij] - gm[ij]) / (2.0 * h);
        }
    }
    let at = |m: usize, i: usize, j: usize| dg[(m * d + i) * d + j];
    let mut data = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let mut s = 0.0;
                for l in 0..d {
                    let gi = ginv[k * d + l];
                    if gi != 0.0 {
                        s += gi * (at(i, j, l) + at(j, i, l) - at(l, i, j));
                    }
                }
                data[(k * d + i) * d + j] = 0.5 * s;
                data[(k * d + j) * d + i] = 0.5 * s;
            }
        }
    }
    Christoffel { dim: d, data }
}

/// Christoffel symbols by central differences of the metric.
pub fn fd_christoffel(chart: &ChartMetric, x: &[f64], h: f64) -> Result<Christoffel> {
    chart.check_stencil(x, h)?;
    Ok(christoffel_unchecked(chart, x, h))
}

/// Riemann tensor: `up[l][i][j][k] = R^l_{ijk}` with
/// `R(d_i, d_j) d_k = R^l_{ijk} d_l`, and `low[i][j][k][l] = <R(d_i,d_j)d_k, d_l>`.
#[derive(Debug, Clone)]
pub struct Riemann {
    pub dim: usize,
    pub up: Vec<f64>,
    pub low: Vec<f64>,
    pub metric: Vec<f64>,
}

impl Riemann {
    fn idx(&self, a: usize, b: usize, c: usize, e: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + e
    }

    pub fn low(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.low[self.idx(i, j, k, l)]
    }

    /// `<R(v,w)w, v>` for coordinate components.
    pub fn quadform(&self, v: &[f64], w: &[f64]) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = v[i] * w[j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let b = a * w[k];
                    if b == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        s += b * v[l] * self.low(i, j, k, l);
                    }
                }
            }
        }
        s
    }

    /// max of |R_ijkl + R_jikl|, |R_ijkl + R_ijlk|, |R_ijkl - R_klij|.
    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r = self.low(i, j, k, l);
                        worst = worst
                            .max((r + self.low(j, i, k, l)).abs())
                            .max((r + self.low(i, j, l, k)).abs())
                            .max((r - self.low(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// max |R_ijkl + R_jkil + R_kijl|.
    pub fn bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let s = self.low(i, j, k, l) + self.low(j, k, i, l) + self.low(k, i, j, l);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    fn combine(a: &Riemann, b: &Riemann, wa: f64, wb: f64) -> Riemann {
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| wa * p + wb * q).collect();
        Riemann {
            dim: a.dim,
            up: mix(&a.up, &b.up),
            low: mix(&a.low, &b.low),
            metric: a.metric.clone(),
        }
    }
}

fn riemann_unchecked(chart: &ChartMetric, x: &[f64], h: f64) -> Riemann {
    let d = chart.dim;
    let g0 = christoffel_unchecked(chart, x, h);
    let mut dgam = vec![0.0; d * d * d * d]; // [m][l][j][k] = d_m Gamma^l_jk
    let mut xp = x.to_vec();
    for m in 0..d {
        xp[m] = x[m] + h;
        let gp = christoffel_unchecked(chart, &xp, h);
        xp[m] = x[m] - h;
        let gm = christoffel_unchecked(chart, &xp, h);
        xp[m] = x[m];
        for (n, (a, b)) in gp.data.iter().zip(&gm.data).enumerate() {
            dgam[m * d * d * d + n] = (a - b) / (2.0 * h);
        }
    }
    let dg = |m: usize, l: usize, j: usize, k: usize| dgam[((m * d + l) * d + j) * d + k];
    let mut up = vec![0.0; d * d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut s = dg(i, l, j, k) - dg(j, l, i, k);
                    for m in 0..d {
                        s += g0.get(l, i, m) * g0.get(m, j, k) - g0.get(l, j, m) * g0.get(m, i, k);
                    }
                    up[((l * d + i) * d + j) * d + k] = s;
                }
            }
        }
    }
    let metric = chart.components(x);
    let mut low = vec![0.0; d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = 0.0;
                    for m in 0..d {
                        s += metric[l * d + m] * up[((m * d + i) * d + j) * d + k];
                    }
                    low[((i * d + j) * d + k) * d + l] = s;
                }
            }
        }
    }
    Riemann {
        dim: d,
        up,
        low,
        metric,
    }
}

/// Riemann tensor by differencing finite-difference Christoffel symbols.
pub fn fd_riemann(chart: &ChartMetric, x: &[f64], h: f64) -> Result<Riemann> {
    chart.check_stencil(x, 2.0 * h)?;
    Ok(riemann_unchecked(chart, x, h))
}

/// Richardson combination `(4 R(h/2) - R(h)) / 3`.
pub fn fd_riemann_richardson(chart: &ChartMetric, x: &[f64], h: f64) -> Result<Riemann> {
    chart.check_stencil(x, 2.0 * h)?;
    let coarse = riemann_unchecked(chart, x, h);
    let fine = riemann_unchecked(chart, x, 0.5 * h);
    Ok(Riemann::combine(&fine, &coarse, 4.0 / 3.0, -1.0 / 3.0))
}

/// Sectional curvature of the plane spanned by coordinate vectors `v`, `w`.
pub fn fd_sectional(chart: &ChartMetric, x: &[f64], v: &[f64], w: &[f64], h: f64) -> Result<f64> {
    let r = fd_riemann(chart, x, h)?;
    sectional_from(&r, v, w)
}

fn sectional_from(r: &Riemann, v: &[f64], w: &[f64]) -> Result<f64> {
    let d = r.dim;
    let ip = |a: &[f64], b: &[f64]| {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += a[i] * r.metric[i * d + j] * b[j];
            }
        }
        s
    };
    let (vv, ww, vw) = (ip(v, v), ip(w, w), ip(v, w));
    let area = vv * ww - vw * vw;
    if !(area > 1e-14 * vv * ww) {
        return Err(Error::DegeneratePair);
    }
    Ok(r.quadform(v, w) / area)
}

/// Chart coordinates of a model point (missing fiber angles are filled
/// with `pi/2` on polar angles and 0 on azimuths).
pub fn coords_of(model: &MetricModel, x: &ModelPoint) -> Vec<f64> {
    let d = model.dim();
    let mut c = Vec::with_capacity(d);
    let base = match model {
        MetricModel::WarpedLine { .. } | MetricModel::MultiplyWarpedLine { .. } => {
            c.push(x.r);
            1
        }
        MetricModel::TwoDWarp { .. } => {
            c.push(x.r);
            c.push(x.t_or_zero());
            2
        }
        MetricModel::SphereProduct { base, .. } if matches!(**base, MetricModel::TwoDWarp { .. }) => {
            c.push(x.r);
            c.push(x.t_or_zero());
            2
        }
        MetricModel::SphereProduct { .. } => {
            c.push(x.r);
            1
        }
        _ => 0,
    };
    for k in 0..d - base {
        c.push(x.fiber_angles.get(k).copied().unwrap_or(0.5 * PI));
    }
    c
}

#[derive(Debug, Clone)]
pub struct CrosscheckOptions {
    pub samples: usize,
    pub h: f64,
    pub tol: f64,
    pub seed: u64,
    /// Richardson-extrapolate the oracle (default on).
    pub richardson: bool,
    pub max_dim: usize,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        Self {
            samples: 50,
            h: CROSSCHECK_H,
            tol: 1e-5,
            seed: 0,
            richardson: true,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrosscheckRow {
    pub region: String,
    pub coords: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub model_id: String,
    pub rows: Vec<CrosscheckRow>,
    pub max_residual: f64,
    pub tol: f64,
    pub h: f64,
}

impl CrosscheckReport {
    pub fn pass(&self) -> bool {
        self.max_residual < self.tol
    }
}

/// Interior sampling box for the base coordinates of a region, kept away
/// from the domain ends (where axes live) by 10% of each side.
fn base_ranges(model: &MetricModel) -> Vec<(f64, f64)> {
    let shrink = |(lo, hi): (f64, f64)| {
        let m = 0.1 * (hi - lo);
        (lo + m, hi - m)
    };
    match model {
        MetricModel::WarpedLine { r_domain, .. } => vec![shrink(*r_domain)],
        MetricModel::TwoDWarp { r_domain, t_domain, .. } => vec![shrink(*r_domain), shrink(*t_domain)],
        MetricModel::MultiplyWarpedLine { t_domain, .. } => vec![shrink(*t_domain)],
        MetricModel::SphereProduct { base, .. } => base_ranges(base),
        _ => Vec::new(),
    }
}

/// Residual between closed-form and oracle curvature at one chart point:
/// every frame pair plus two random frame 2-planes.
pub fn point_residual(
    model: &MetricModel,
    chart: &ChartMetric,
    coords: &[f64],
    h: f64,
    richardson: bool,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let d = chart.dim;
    let nb = base_ranges(model).len();
    let point = ModelPoint {
        r: coords.first().copied().unwrap_or(0.0),
        t: if nb == 2 { Some(coords[1]) } else { None },
        fiber_angles: coords[nb..].to_vec(),
    };
    let closed = frame_curvature(model, &point)?;
    let riem = if richardson {
        fd_riemann_richardson(chart, coords, h)?
    } else {
        fd_riemann(chart, coords, h)?
    };
    let gdiag: Vec<f64> = (0..d).map(|i| riem.metric[i * d + i]).collect();
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in a + 1..d {
            let k = riem.low(a, b, b, a) / (gdiag[a] * gdiag[b]);
            worst = worst.max((k - closed.get(a, b)).abs());
        }
    }
    for _ in 0..2 {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let to_coord = |u: &[f64]| -> Vec<f64> { u.iter().zip(&gdiag).map(|(c, g)| c / g.sqrt()).collect() };
        let oracle = riem.quadform(&to_coord(&v), &to_coord(&w));
        worst = worst.max((oracle - closed.quadform(&v, &w)).abs());
    }
    Ok(worst)
}

fn sample_coords(model: &MetricModel, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let ranges = base_ranges(model);
    let mut c: Vec<f64> = ranges.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
    let mut bx = Vec::new();
    box_of(model, &mut bx);
    for &(lo, hi) in &bx[ranges.len()..] {
        // polar angles well inside the chart, azimuths anywhere
        if hi - lo < 2.0 * PI {
            c.push(rng.random_range(FRAC_PI_4..3.0 * FRAC_PI_4));
        } else {
            c.push(rng.random_range(0.0..2.0 * PI));
        }
    }
    c
}

fn crosscheck_region(name: &str, model: &MetricModel, opts: &CrosscheckOptions) -> Result<Vec<CrosscheckRow>> {
    if model.dim() > opts.max_dim {
        return Err(Error::UnsupportedModel(format!(
            "oracle capped at dimension {}, model has {}",
            opts.max_dim,
            model.dim()
        )));
    }
    let chart = chart_of(model)?;
    (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let coords = sample_coords(model, &mut rng);
            let residual = point_residual(model, &chart, &coords, opts.h, opts.richardson, &mut rng)?;
            Ok(CrosscheckRow {
                region: name.to_string(),
                coords,
                residual,
            })
        })
        .collect()
}

/// Max residual between closed-form and oracle sectional curvatures over
/// random interior samples (per region for assemblies).
pub fn crosscheck(model: &MetricModel, model_id: &str, opts: &CrosscheckOptions) -> Result<CrosscheckReport> {
    let rows = match model {
        MetricModel::RegionAssembly(asm) => {
            let mut rows = Vec::new();
            for reg in &asm.regions {
                rows.extend(crosscheck_region(&reg.name, &reg.model, opts)?);
            }
            rows
        }
        _ => crosscheck_region(model_id, model, opts)?,
    };
    let max_residual = rows
        .iter()
        .map(|r| r.residual)
        .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    Ok(CrosscheckReport {
        model_id: model_id.to_string(),
        rows,
        max_residual,
        tol: opts.tol,
        h: opts.h,
    })
}
