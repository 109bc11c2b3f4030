//! Points, frames, planes and metric-model descriptors.
//!
//! Tangent data is always expressed in the model's orthonormal frame:
//!
//! * `WarpedLine`: `[d_r, fiber...]`
//! * `TwoDWarp`: `[d_r, d_t/omega, fiber...]`
//! * `MultiplyWarpedLine`: `[d_t, fiber_1..., fiber_2..., ...]`
//! * `ProductOfSpheres`: the factor blocks in order
//! * `SphereProduct`: the base frame followed by the unit-sphere block

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::profiles::{TwoVarProfile, WarpingProfile};

/// Orthonormality tolerance for stored plane bases.
pub const ORTHO_TOL: f64 = 1e-12;

/// Default distance kept from spherical-chart poles.
pub const EPS_CHART: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    /// Radial coordinate, or the line coordinate of a multiply warped line.
    pub r: f64,
    pub t: Option<f64>,
    pub fiber_angles: Vec<f64>,
}

impl ModelPoint {
    pub fn radial(r: f64) -> Self {
        Self {
            r,
            t: None,
            fiber_angles: Vec::new(),
        }
    }

    pub fn planar(r: f64, t: f64) -> Self {
        Self {
            r,
            t: Some(t),
            fiber_angles: Vec::new(),
        }
    }

    pub fn with_angles(mut self, angles: Vec<f64>) -> Self {
        self.fiber_angles = angles;
        self
    }

    pub fn t_or_zero(&self) -> f64 {
        self.t.unwrap_or(0.0)
    }
}

/// Components in the orthonormal frame of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self { components }
    }

    /// Builds `[r, t, fiber...]` (or `[r, fiber...]` without `t`).
    pub fn from_parts(comp_r: f64, comp_t: Option<f64>, comp_fiber: &[f64]) -> Self {
        let mut c = vec![comp_r];
        c.extend(comp_t);
        c.extend_from_slice(comp_fiber);
        Self { components: c }
    }

    /// The `i`-th unit vector of a `dim`-dimensional frame.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Self { components: c }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn comp_r(&self) -> f64 {
        self.components[0]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// A p-plane stored through an orthonormal basis of its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneComplement {
    pub dim_ambient: usize,
    pub p: usize,
    pub basis: Vec<TangentVector>,
}

impl PlaneComplement {
    pub fn new(dim_ambient: usize, p: usize, basis: Vec<TangentVector>) -> Result<Self> {
        if dim_ambient < 2 || p > dim_ambient - 2 {
            return Err(Error::InvalidP { p, dim: dim_ambient });
        }
        if basis.len() != dim_ambient - p {
            return Err(Error::DimensionMismatch {
                expected: dim_ambient - p,
                got: basis.len(),
            });
        }
        if let Some(v) = basis.iter().find(|v| v.dim() != dim_ambient) {
            return Err(Error::DimensionMismatch {
                expected: dim_ambient,
                got: v.dim(),
            });
        }
        let pc = Self { dim_ambient, p, basis };
        let res = pc.gram_residual();
        if res > ORTHO_TOL {
            return Err(Error::InvalidParams(format!(
                "complement basis not orthonormal (residual {res:.3e})"
            )));
        }
        Ok(pc)
    }

    /// The complement of the coordinate p-plane omitting `keep` axes.
    pub fn coordinate(dim_ambient: usize, keep: &[usize]) -> Result<Self> {
        let basis = keep.iter().map(|&i| TangentVector::unit(dim_ambient, i)).collect();
        Self::new(dim_ambient, dim_ambient - keep.len(), basis)
    }

    /// max |<e_i, e_j> - delta_ij|.
    pub fn gram_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }

    /// Orthogonal projector onto the complement, row-major `d x d`.
    pub fn projector(&self) -> Vec<f64> {
        let d = self.dim_ambient;
        let mut g = vec![0.0; d * d];
        for v in &self.basis {
            let c = &v.components;
            for a in 0..d {
                for b in 0..d {
                    g[a * d + b] += c[a] * c[b];
                }
            }
        }
        g
    }

    /// Mixes the basis by an orthogonal matrix (row-major `q x q`).
    pub fn rotated(&self, q: &[f64]) -> Self {
        let k = self.basis.len();
        let d = self.dim_ambient;
        let basis = (0..k)
            .map(|i| {
                let mut c = vec![0.0; d];
                for j in 0..k {
                    for a in 0..d {
                        c[a] += q[i * k + j] * self.basis[j].components[a];
                    }
                }
                TangentVector::new(c)
            })
            .collect();
        Self {
            dim_ambient: d,
            p: self.p,
            basis,
        }
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
pub fn gram_schmidt(vectors: &[TangentVector]) -> Result<Vec<TangentVector>> {
    let mut out: Vec<TangentVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        let mut w = v.components.clone();
        for _ in 0..2 {
            for q in &out {
                let c: f64 = w.iter().zip(&q.components).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(&q.components) {
                    *wi -= c * qi;
                }
            }
        }
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 1e-10 * scale.max(f64::MIN_POSITIVE)) || !(scale > 0.0) {
            return Err(Error::DegenerateInput(n));
        }
        out.push(TangentVector::new(w.into_iter().map(|x| x / n).collect()));
    }
    Ok(out)
}

/// Gaussian vectors orthonormalized; reproducible for a fixed seed.
pub fn random_complement(seed: u64, n_amb: usize, p: usize) -> Result<PlaneComplement> {
    if n_amb < 2 || p > n_amb - 2 {
        return Err(Error::InvalidP { p, dim: n_amb });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let raw: Vec<TangentVector> = (0..n_amb - p)
            .map(|_| TangentVector::new((0..n_amb).map(|_| StandardNormal.sample(&mut rng)).collect()))
            .collect();
        if let Ok(basis) = gram_schmidt(&raw) {
            return PlaneComplement::new(n_amb, p, basis);
        }
    }
}

/// Edge of a rectangular `(r, t)` region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    RMin,
    RMax,
    TMin,
    TMax,
}

#[derive(Debug, Clone)]
pub struct Region {
    pub name: String,
    pub model: MetricModel,
}

/// Two region edges identified with each other; `flip` reverses the
/// orientation of the second edge.
#[derive(Debug, Clone)]
pub struct Interface {
    pub a: usize,
    pub side_a: Side,
    pub b: usize,
    pub side_b: Side,
    pub flip: bool,
}

#[derive(Debug, Clone)]
pub struct RegionAssembly {
    pub regions: Vec<Region>,
    pub interfaces: Vec<Interface>,
}

#[derive(Debug, Clone)]
pub enum MetricModel {
    /// Riemannian product of round spheres of the given radii.
    ProductOfSpheres {
        dims: Vec<usize>,
        radii: Vec<f64>,
    },
    /// `dr^2 + beta(r)^2 ds_n^2` with `n = fiber_dim`.
    WarpedLine {
        fiber_dim: usize,
        beta: WarpingProfile,
        r_domain: (f64, f64),
    },
    /// `dr^2 + omega(r,t)^2 dt^2 + beta(r)^2 ds_n^2`.
    TwoDWarp {
        fiber_dim: usize,
        beta: WarpingProfile,
        omega: TwoVarProfile,
        r_domain: (f64, f64),
        t_domain: (f64, f64),
    },
    /// `dt^2 + sum rho_i(t)^2 ds_{n_i}^2`.
    MultiplyWarpedLine {
        fibers: Vec<(usize, WarpingProfile)>,
        t_domain: (f64, f64),
    },
    /// Riemannian product of `base` with a unit round sphere.
    SphereProduct {
        base: Box<MetricModel>,
        sphere_dim: usize,
    },
    RegionAssembly(RegionAssembly),
}

fn check_positive_on(p: &WarpingProfile, (lo, hi): (f64, f64), what: &str) -> Result<()> {
    let n = 512;
    for i in 1..n {
        let r = lo + (hi - lo) * i as f64 / n as f64;
        let v = p.jet(r).value;
        if !(v > 0.0) {
            return Err(Error::InvalidParams(format!("{what} not positive at {r} (value {v})")));
        }
    }
    Ok(())
}

fn check_interval((lo, hi): (f64, f64), what: &str) -> Result<()> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!("{what} domain [{lo}, {hi}]")));
    }
    Ok(())
}

impl MetricModel {
    pub fn product_of_spheres(dims: Vec<usize>, radii: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.len() != radii.len() {
            return Err(Error::InvalidParams("need one radius per sphere factor".into()));
        }
        if dims.contains(&0) || radii.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidParams("sphere dims >= 1 and radii > 0".into()));
        }
        Ok(Self::ProductOfSpheres { dims, radii })
    }

    pub fn unit_spheres(dims: Vec<usize>) -> Result<Self> {
        let radii = vec![1.0; dims.len()];
        Self::product_of_spheres(dims, radii)
    }

    pub fn warped_line(fiber_dim: usize, beta: WarpingProfile) -> Result<Self> {
        let r_domain = beta.domain();
        check_interval(r_domain, "r")?;
        if fiber_dim == 0 {
            return Err(Error::InvalidParams("fiber dimension must be >= 1".into()));
        }
        check_positive_on(&beta, r_domain, "beta")?;
        Ok(Self::WarpedLine {
            fiber_dim,
            beta,
            r_domain,
        })
    }

    pub fn two_d_warp(
        fiber_dim: usize,
        beta: WarpingProfile,
        omega: TwoVarProfile,
        r_domain: (f64, f64),
        t_domain: (f64, f64),
    ) -> Result<Self> {
        check_interval(r_domain, "r")?;
        check_interval(t_domain, "t")?;
        if fiber_dim == 0 {
            return Err(Error::InvalidParams("fiber dimension must be >= 1".into()));
        }
        check_positive_on(&beta, r_domain, "beta")?;
        if !(omega.floor() > 0.0) {
            return Err(Error::InvalidParams("omega must stay positive".into()));
        }
        Ok(Self::TwoDWarp {
            fiber_dim,
            beta,
            omega,
            r_domain,
            t_domain,
        })
    }

    pub fn multiply_warped_line(fibers: Vec<(usize, WarpingProfile)>, t_domain: (f64, f64)) -> Result<Self> {
        check_interval(t_domain, "t")?;
        if fibers.is_empty() || fibers.iter().any(|(d, _)| *d == 0) {
            return Err(Error::InvalidParams("need fibers of dimension >= 1".into()));
        }
        for (_, rho) in &fibers {
            check_positive_on(rho, t_domain, "rho")?;
            for end in [t_domain.0, t_domain.1] {
                if !(rho.jet(end).value > 0.0) {
                    return Err(Error::InvalidParams("rho must be positive on the closed line".into()));
                }
            }
        }
        Ok(Self::MultiplyWarpedLine { fibers, t_domain })
    }

    pub fn with_sphere(self, sphere_dim: usize) -> Self {
        if sphere_dim == 0 {
            return self;
        }
        Self::SphereProduct {
            base: Box::new(self),
            sphere_dim,
        }
    }

    /// Ambient dimension (the first region's for assemblies).
    pub fn dim(&self) -> usize {
        match self {
            Self::ProductOfSpheres { dims, .. } => dims.iter().sum(),
            Self::WarpedLine { fiber_dim, .. } => 1 + fiber_dim,
            Self::TwoDWarp { fiber_dim, .. } => 2 + fiber_dim,
            Self::MultiplyWarpedLine { fibers, .. } => 1 + fibers.iter().map(|f| f.0).sum::<usize>(),
            Self::SphereProduct { base, sphere_dim } => base.dim() + sphere_dim,
            Self::RegionAssembly(a) => a.regions.first().map_or(0, |r| r.model.dim()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::ProductOfSpheres { .. } => "product-of-spheres",
            Self::WarpedLine { .. } => "warped-line",
            Self::TwoDWarp { .. } => "two-d-warp",
            Self::MultiplyWarpedLine { .. } => "multiply-warped-line",
            Self::SphereProduct { .. } => "sphere-product",
            Self::RegionAssembly(_) => "region-assembly",
        }
    }

    /// Metric coefficients `(g_rr, g_tt, beta^2)` of a planar region.
    fn planar_components(&self, r: f64, t: f64) -> Option<[f64; 3]> {
        match self {
            Self::TwoDWarp { beta, omega, .. } => {
                let w = omega.jet(r, t).value;
                let b = beta.jet(r).value;
                Some([1.0, w * w, b * b])
            }
            Self::SphereProduct { base, .. } => base.planar_components(r, t),
            _ => None,
        }
    }

    fn planar_domains(&self) -> Option<((f64, f64), (f64, f64))> {
        match self {
            Self::TwoDWarp { r_domain, t_domain, .. } => Some((*r_domain, *t_domain)),
            Self::SphereProduct { base, .. } => base.planar_domains(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InterfaceEntry {
    pub a: String,
    pub b: String,
    pub max_mismatch: f64,
    /// Difference of the edge lengths.
    pub extent_mismatch: f64,
}

#[derive(Debug, Clone)]
pub struct InterfaceReport {
    pub entries: Vec<InterfaceEntry>,
    pub tol: f64,
}

impl InterfaceReport {
    pub fn max_mismatch(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_mismatch.max(e.extent_mismatch))
            .fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.max_mismatch < self.tol && e.extent_mismatch < self.tol)
    }
}

fn edge(side: Side, (r0, r1): (f64, f64), (t0, t1): (f64, f64)) -> (f64, f64, bool) {
    // (start, end) of the running coordinate, and whether it runs along r
    match side {
        Side::RMin | Side::RMax => (t0, t1, false),
        Side::TMin | Side::TMax => (r0, r1, true),
    }
}

fn edge_point(side: Side, rd: (f64, f64), td: (f64, f64), s: f64) -> (f64, f64) {
    match side {
        Side::RMin => (rd.0, s),
        Side::RMax => (rd.1, s),
        Side::TMin => (s, td.0),
        Side::TMax => (s, td.1),
    }
}

/// Compares metric components across every shared edge of an assembly.
/// Models that are not assemblies pass vacuously.
pub fn check_region_interfaces(model: &MetricModel, tol: f64) -> InterfaceReport {
    let MetricModel::RegionAssembly(asm) = model else {
        return InterfaceReport {
            entries: Vec::new(),
            tol,
        };
    };
    let samples = 256;
    let mut entries = Vec::new();
    for iface in &asm.interfaces {
        let ra = &asm.regions[iface.a];
        let rb = &asm.regions[iface.b];
        let (Some((rda, tda)), Some((rdb, tdb))) = (ra.model.planar_domains(), rb.model.planar_domains()) else {
            entries.push(InterfaceEntry {
                a: ra.name.clone(),
                b: rb.name.clone(),
                max_mismatch: f64::INFINITY,
                extent_mismatch: f64::INFINITY,
            });
            continue;
        };
        let (sa0, sa1, _) = edge(iface.side_a, rda, tda);
        let (sb0, sb1, _) = edge(iface.side_b, rdb, tdb);
        let mut worst = 0.0_f64;
        for k in 0..=samples {
            let u = k as f64 / samples as f64;
            let ub = if iface.flip { 1.0 - u } else { u };
            let (ra_r, ra_t) = edge_point(iface.side_a, rda, tda, sa0 + u * (sa1 - sa0));
            let (rb_r, rb_t) = edge_point(iface.side_b, rdb, tdb, sb0 + ub * (sb1 - sb0));
            let ga = ra.model.planar_components(ra_r, ra_t).unwrap_or([f64::NAN; 3]);
            let gb = rb.model.planar_components(rb_r, rb_t).unwrap_or([f64::NAN; 3]);
            for (x, y) in ga.iter().zip(&gb) {
                let d = (x - y).abs();
                worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
            }
        }
        entries.push(InterfaceEntry {
            a: ra.name.clone(),
            b: rb.name.clone(),
            max_mismatch: worst,
            extent_mismatch: ((sa1 - sa0) - (sb1 - sb0)).abs(),
        });
    }
    InterfaceReport { entries, tol }
}
