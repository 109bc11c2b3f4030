//! Positivity certificates for `s_{p,n}` over the Grassmann bundle.
//!
//! At each grid point the curvature data is a frame-pair table `K_ab`, and
//! `s_{p,n}` depends on the plane only through the projector `G` onto its
//! complement. Two minimizers run per point: a generic one over the
//! Grassmannian of complements, and a structured one that uses the fiber
//! symmetry of singly warped models to reduce to at most two vectors in a
//! four-dimensional frame slice.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::curvature::{frame_curvature, sectionals, FrameCurvature, SectionalTable};
use crate::error::{Error, Result};
use crate::geometry::{MetricModel, ModelPoint, PlaneComplement, TangentVector};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_RESTARTS: usize = 16;
/// Maximal allowed gap between the two strategies at a point.
pub const AGREEMENT_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Structured,
    RandomRestart,
    Both,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Structured => "structured",
            Strategy::RandomRestart => "random-restart",
            Strategy::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Positive,
    Nonpositive,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Positive => "positive",
            Verdict::Nonpositive => "nonpositive",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Positive => 0,
            Verdict::Nonpositive => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// Sample counts along the first (r, or t for multiply warped lines) and
/// second (t) base coordinates. Endpoints are included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nr: usize,
    pub nt: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nr: 64, nt: 32 }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub grid: GridSpec,
    pub tol: f64,
    pub seed: u64,
    pub strategy: Strategy,
    pub restarts: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            tol: DEFAULT_TOL,
            seed: 0,
            strategy: Strategy::Both,
            restarts: DEFAULT_RESTARTS,
        }
    }
}

/// Minimum found at one grid point.
#[derive(Debug, Clone)]
pub struct PointMin {
    pub region: Option<String>,
    pub point: ModelPoint,
    pub value: f64,
    pub plane: PlaneComplement,
    pub generic: Option<f64>,
    pub structured: Option<f64>,
}

impl PointMin {
    /// Gap between the two strategies, when both ran.
    pub fn disagreement(&self) -> f64 {
        match (self.generic, self.structured) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    pub model_id: String,
    pub p: usize,
    pub grid: GridSpec,
    pub min_value: f64,
    pub argmin: usize,
    pub argmin_point: ModelPoint,
    pub argmin_region: Option<String>,
    pub argmin_plane: PlaneComplement,
    pub strategy: Strategy,
    pub tolerance: f64,
    pub seed: u64,
    pub max_disagreement: f64,
    pub verdict: Verdict,
    pub points: Vec<PointMin>,
}

impl PositivityCertificate {
    /// `s_{p,n}` at the recorded argmin.
    pub fn reevaluate(&self, model: &MetricModel) -> Result<f64> {
        let region_model = match (model, &self.argmin_region) {
            (MetricModel::RegionAssembly(asm), Some(name)) => asm
                .regions
                .iter()
                .find(|r| &r.name == name)
                .map(|r| &r.model)
                .ok_or_else(|| Error::InvalidParams(format!("no region named {name}")))?,
            _ => model,
        };
        crate::curvature::s_pn(region_model, &self.argmin_point, &self.argmin_plane)
    }
}

// ---------------------------------------------------------------------------
// generic Grassmannian descent

/// `k x d` matrix with orthonormal rows; `complement` tells whether the rows
/// span `P^perp` or `P`.
#[derive(Debug, Clone)]
struct Frame {
    k: usize,
    d: usize,
    x: Vec<f64>,
}

fn orthonormalize_rows(x: &mut [f64], k: usize, d: usize) -> bool {
    for i in 0..k {
        for _ in 0..2 {
            for j in 0..i {
                let c: f64 = (0..d).map(|a| x[i * d + a] * x[j * d + a]).sum();
                for a in 0..d {
                    x[i * d + a] -= c * x[j * d + a];
                }
            }
        }
        let n = (0..d).map(|a| x[i * d + a] * x[i * d + a]).sum::<f64>().sqrt();
        if !(n > 1e-12) {
            return false;
        }
        for a in 0..d {
            x[i * d + a] /= n;
        }
    }
    true
}

/// Objective in terms of a row frame: complement projector `G = X^T X`
/// (`complement`) or `G = I - X^T X`.
struct GrassmannObjective<'a> {
    fc: &'a FrameCurvature,
    complement: bool,
}

impl GrassmannObjective<'_> {
    fn projector(&self, f: &Frame) -> Vec<f64> {
        let d = f.d;
        let mut g = vec![0.0; d * d];
        if !self.complement {
            for a in 0..d {
                g[a * d + a] = 1.0;
            }
        }
        let sign = if self.complement { 1.0 } else { -1.0 };
        for i in 0..f.k {
            let row = &f.x[i * d..(i + 1) * d];
            for a in 0..d {
                for b in 0..d {
                    g[a * d + b] += sign * row[a] * row[b];
                }
            }
        }
        g
    }

    fn value(&self, f: &Frame) -> f64 {
        self.fc.s_from_projector(&self.projector(f))
    }

    /// Value and Grassmann gradient `grad (I - X^T X)` with
    /// `grad = +-2 X S`, `S = d s / d G`.
    fn value_grad(&self, f: &Frame) -> (f64, Vec<f64>) {
        let d = f.d;
        let g = self.projector(f);
        let k = &self.fc.k;
        let mut s = vec![0.0; d * d];
        for a in 0..d {
            let mut acc = 0.0;
            for b in 0..d {
                if b != a {
                    acc += k[a * d + b] * g[b * d + b];
                    s[a * d + b] = -2.0 * k[a * d + b] * g[a * d + b];
                }
            }
            s[a * d + a] = 2.0 * acc;
        }
        let sign = if self.complement { 2.0 } else { -2.0 };
        let mut grad = vec![0.0; f.k * d];
        for i in 0..f.k {
            for b in 0..d {
                let mut acc = 0.0;
                for a in 0..d {
                    acc += f.x[i * d + a] * s[a * d + b];
                }
                grad[i * d + b] = sign * acc;
            }
        }
        project_tangent(f, &mut grad);
        (self.fc.s_from_projector(&g), grad)
    }
}

/// `xi <- xi - (xi X^T) X`.
fn project_tangent(f: &Frame, xi: &mut [f64]) {
    let (k, d) = (f.k, f.d);
    let mut c = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            c[i * k + j] = (0..d).map(|a| xi[i * d + a] * f.x[j * d + a]).sum();
        }
    }
    for i in 0..k {
        for a in 0..d {
            let mut acc = 0.0;
            for j in 0..k {
                acc += c[i * k + j] * f.x[j * d + a];
            }
            xi[i * d + a] -= acc;
        }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// Armijo descent with Barzilai–Borwein trial steps and a Gram–Schmidt
/// retraction. `vg` returns value and tangent gradient.
fn descend<F>(start: Frame, vg: F) -> (f64, Frame)
where
    F: Fn(&Frame) -> (f64, Vec<f64>),
{
    let mut f = start;
    let (mut val, mut grad) = vg(&f);
    let mut step = 0.1;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..400 {
        let gn2 = norm2(&grad);
        if gn2.sqrt() < 1e-11 * (1.0 + val.abs()) {
            break;
        }
        if let Some((px, pg)) = &prev {
            let sx: Vec<f64> = f.x.iter().zip(px).map(|(a, b)| a - b).collect();
            let yg: Vec<f64> = grad.iter().zip(pg).map(|(a, b)| a - b).collect();
            let sy: f64 = sx.iter().zip(&yg).map(|(a, b)| a * b).sum();
            if sy > 0.0 {
                step = (norm2(&sx) / sy).clamp(1e-6, 10.0);
            }
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..40 {
            let mut x: Vec<f64> = f.x.iter().zip(&grad).map(|(a, g)| a - t * g).collect();
            if orthonormalize_rows(&mut x, f.k, f.d) {
                let cand = Frame { x, ..f };
                let (cv, cg) = vg(&cand);
                if cv <= val - 1e-4 * t * gn2 {
                    accepted = Some((cand, cv, cg));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, cv, cg)) = accepted else { break };
        let improvement = val - cv;
        prev = Some((std::mem::replace(&mut f.x, cand.x), std::mem::replace(&mut grad, cg)));
        val = cv;
        step = t;
        if improvement < 1e-16 * (1.0 + val.abs()) {
            break;
        }
    }
    (val, f)
}

fn combinations(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > d {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < d - k + i {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn coordinate_frame(subset: &[usize], d: usize) -> Frame {
    let k = subset.len();
    let mut x = vec![0.0; k * d];
    for (i, &a) in subset.iter().enumerate() {
        x[i * d + a] = 1.0;
    }
    Frame { k, d, x }
}

fn random_frame(k: usize, d: usize, rng: &mut ChaCha8Rng) -> Frame {
    loop {
        let mut x: Vec<f64> = (0..k * d).map(|_| StandardNormal.sample(rng)).collect();
        if orthonormalize_rows(&mut x, k, d) {
            return Frame { k, d, x };
        }
    }
}

fn perturbed(f: &Frame, scale: f64, rng: &mut ChaCha8Rng) -> Frame {
    let mut x: Vec<f64> =
        f.x.iter()
            .map(|a| {
                let z: f64 = StandardNormal.sample(rng);
                a + scale * z
            })
            .collect();
    if orthonormalize_rows(&mut x, f.k, f.d) {
        Frame { x, ..f.clone() }
    } else {
        f.clone()
    }
}

/// Orthonormal completion of the row span: the complement basis of `P`.
fn complete_basis(rows: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = rows.to_vec();
    let mut added = Vec::new();
    for e in 0..d {
        if all.len() == d {
            break;
        }
        let mut w = vec![0.0; d];
        w[e] = 1.0;
        for _ in 0..2 {
            for q in &all {
                let c: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n = norm2(&w).sqrt();
        if n > 1e-6 {
            let w: Vec<f64> = w.into_iter().map(|a| a / n).collect();
            all.push(w.clone());
            added.push(w);
        }
    }
    added
}

fn rows_of(f: &Frame) -> Vec<Vec<f64>> {
    (0..f.k).map(|i| f.x[i * f.d..(i + 1) * f.d].to_vec()).collect()
}

fn complement_from_rows(rows: Vec<Vec<f64>>, d: usize, p: usize) -> Result<PlaneComplement> {
    let mut basis: Vec<TangentVector> = rows.into_iter().map(TangentVector::new).collect();
    // one more Gram-Schmidt pass keeps the residual at rounding level
    basis = crate::geometry::gram_schmidt(&basis)?;
    PlaneComplement::new(d, p, basis)
}

/// Minimum of `s_{p,n}` over all `p`-planes for a frame-pair table:
/// exhaustive coordinate planes, then Grassmannian descent from the best
/// coordinate planes and from `restarts` random planes.
pub fn min_over_grassmann_table(
    fc: &FrameCurvature,
    p: usize,
    restarts: usize,
    seed: u64,
) -> Result<(f64, PlaneComplement)> {
    let d = fc.dim;
    if d < 2 || p > d - 2 {
        return Err(Error::InvalidP { p, dim: d });
    }
    let q = d - p;
    if p == 0 {
        let basis = (0..d).map(|i| TangentVector::unit(d, i)).collect();
        let pc = PlaneComplement::new(d, 0, basis)?;
        return Ok((fc.s_from_projector(&pc.projector()), pc));
    }
    let complement = q <= p;
    let k = if complement { q } else { p };
    let obj = GrassmannObjective { fc, complement };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut coords: Vec<(f64, Frame)> = combinations(d, k)
        .into_iter()
        .map(|s| {
            let f = coordinate_frame(&s, d);
            (obj.value(&f), f)
        })
        .collect();
    // stable: ties keep enumeration order
    coords.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut best_val, mut best) = coords[0].clone();

    let mut starts: Vec<Frame> = coords
        .iter()
        .take(3)
        .map(|(_, f)| perturbed(f, 0.05, &mut rng))
        .collect();
    starts.extend((0..restarts).map(|_| random_frame(k, d, &mut rng)));
    for s in starts {
        let (v, f) = descend(s, |f| obj.value_grad(f));
        if v < best_val {
            best_val = v;
            best = f;
        }
    }

    let rows = rows_of(&best);
    let comp_rows = if complement { rows } else { complete_basis(&rows, d) };
    let pc = complement_from_rows(comp_rows, d, p)?;
    // report the value of the plane actually returned
    Ok((fc.s_from_projector(&pc.projector()), pc))
}

// ---------------------------------------------------------------------------
// structured search

/// Layout of a singly warped model for the structured strategy.
struct Structure {
    base_dim: usize,
    fiber_dim: usize,
}

fn structure_of(model: &MetricModel) -> Option<Structure> {
    match model {
        MetricModel::WarpedLine { fiber_dim, .. } => Some(Structure {
            base_dim: 1,
            fiber_dim: *fiber_dim,
        }),
        MetricModel::TwoDWarp { fiber_dim, .. } => Some(Structure {
            base_dim: 2,
            fiber_dim: *fiber_dim,
        }),
        _ => None,
    }
}

/// `s_{p,n}` for a complement made of `n - p` fiber directions plus the
/// orthonormal rows of `x` in the slice `(r, t, f_1, f_2)` (or `(r, f_1)`
/// without t). Written directly from the four coordinate-plane curvatures.
fn structured_value(k: &SectionalTable, st: &Structure, fixed: usize, x: &[f64], rows: usize, m: usize) -> f64 {
    let b = st.base_dim;
    // curvature between slice coordinates i, j
    let kind = |i: usize| if i < b { i } else { 2 };
    let pair = |i: usize, j: usize| -> f64 {
        match (kind(i).min(kind(j)), kind(i).max(kind(j))) {
            (0, 1) => k.k_rt,
            (0, 2) => k.k_ri,
            (1, 2) => k.k_ti,
            _ => k.k_ij,
        }
    };
    let f = fixed as f64;
    let mut s = f * (f - 1.0) * k.k_ij;
    for r in 0..rows {
        let u = &x[r * m..(r + 1) * m];
        let mut acc = 0.0;
        for (i, ui) in u.iter().enumerate() {
            let kf = if i < b {
                if i == 0 {
                    k.k_ri
                } else {
                    k.k_ti
                }
            } else {
                k.k_ij
            };
            acc += ui * ui * kf;
        }
        s += 2.0 * f * acc;
    }
    if rows == 2 {
        let (v, w) = (&x[..m], &x[m..2 * m]);
        let mut r_vw = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                let z = v[i] * w[j] - v[j] * w[i];
                r_vw += pair(i, j) * z * z;
            }
        }
        s += 2.0 * r_vw;
    }
    s
}

fn structured_min(
    model: &MetricModel,
    x: &ModelPoint,
    p: usize,
    restarts: usize,
    seed: u64,
) -> Result<Option<(f64, PlaneComplement)>> {
    let Some(st) = structure_of(model) else {
        return Ok(None);
    };
    let n = st.fiber_dim;
    let b = st.base_dim;
    let d = b + n;
    if p > d - 2 {
        return Err(Error::InvalidP { p, dim: d });
    }
    let k = sectionals(model, x)?;
    // complement: n - p fiber directions fixed, the other b vectors live in
    // the base plus at most b further fiber directions
    let fixed = n.saturating_sub(p);
    let rows = d - p - fixed;
    let extra = p.min(n).min(b);
    let m = b + extra;
    let value = |x: &[f64]| structured_value(&k, &st, fixed, x, rows, m);
    let vg = |f: &Frame| {
        let v = value(&f.x);
        let h = 1e-7;
        let mut g = vec![0.0; f.x.len()];
        let mut y = f.x.clone();
        for i in 0..y.len() {
            let x0 = y[i];
            y[i] = x0 + h;
            let vp = value(&y);
            y[i] = x0 - h;
            let vm = value(&y);
            y[i] = x0;
            g[i] = (vp - vm) / (2.0 * h);
        }
        project_tangent(f, &mut g);
        (v, g)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5bd1_e995);
    let mut best: Option<(f64, Frame)> = None;
    let mut starts: Vec<Frame> = combinations(m, rows).iter().map(|s| coordinate_frame(s, m)).collect();
    starts.extend((0..restarts.min(8)).map(|_| random_frame(rows, m, &mut rng)));
    for s in starts {
        let (v, f) = if rows < m { descend(s, vg) } else { (value(&s.x), s) };
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, f));
        }
    }
    let (_, f) = best.expect("at least one start");
    // slice coordinate -> frame index
    let map = |i: usize| if i < b { i } else { b + fixed + (i - b) };
    let mut comp: Vec<Vec<f64>> = (0..fixed)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[b + i] = 1.0;
            e
        })
        .collect();
    for r in 0..rows {
        let mut e = vec![0.0; d];
        for i in 0..m {
            e[map(i)] = f.x[r * m + i];
        }
        comp.push(e);
    }
    let pc = complement_from_rows(comp, d, p)?;
    let fc = frame_curvature(model, x)?;
    Ok(Some((fc.s_from_projector(&pc.projector()), pc)))
}

// ---------------------------------------------------------------------------
// point and grid drivers

fn bits_key(fc: &FrameCurvature) -> Vec<u64> {
    fc.k.iter().map(|v| v.to_bits()).collect()
}

fn hash_key(key: &[u64], seed: u64) -> u64 {
    // FNV-1a over the bit patterns
    let mut h = 0xcbf2_9ce4_8422_2325_u64 ^ seed;
    for &w in key {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn point_min(
    model: &MetricModel,
    x: &ModelPoint,
    p: usize,
    strategy: Strategy,
    restarts: usize,
    seed: u64,
) -> Result<PointMin> {
    let fc = frame_curvature(model, x)?;
    let point_seed = hash_key(&bits_key(&fc), seed);
    let generic = match strategy {
        Strategy::Structured if structure_of(model).is_some() => None,
        _ => Some(min_over_grassmann_table(&fc, p, restarts, point_seed)?),
    };
    let structured = match strategy {
        Strategy::RandomRestart => None,
        _ => structured_min(model, x, p, restarts, point_seed)?,
    };
    let (value, plane) = match (&generic, &structured) {
        (Some(g), Some(s)) => {
            if s.0 < g.0 {
                s.clone()
            } else {
                g.clone()
            }
        }
        (Some(g), None) => g.clone(),
        (None, Some(s)) => s.clone(),
        (None, None) => unreachable!("one strategy always runs"),
    };
    Ok(PointMin {
        region: None,
        point: x.clone(),
        value,
        plane,
        generic: generic.map(|g| g.0),
        structured: structured.map(|s| s.0),
    })
}

/// Minimum of `s_{p,n}` at one point over all `p`-planes.
pub fn min_over_grassmann(
    model: &MetricModel,
    x: &ModelPoint,
    p: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<(f64, PlaneComplement)> {
    let d = model.dim();
    if d < 2 || p > d - 2 {
        return Err(Error::InvalidP { p, dim: d });
    }
    let pm = point_min(model, x, p, strategy, DEFAULT_RESTARTS, seed)?;
    Ok((pm.value, pm.plane))
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Base-coordinate grid of a single-region model.
pub fn grid_points(model: &MetricModel, grid: GridSpec) -> Vec<ModelPoint> {
    match model {
        MetricModel::ProductOfSpheres { .. } => vec![ModelPoint::radial(0.0)],
        MetricModel::WarpedLine { r_domain, .. } => linspace(*r_domain, grid.nr)
            .into_iter()
            .map(ModelPoint::radial)
            .collect(),
        MetricModel::TwoDWarp { r_domain, t_domain, .. } => {
            let ts = linspace(*t_domain, grid.nt);
            linspace(*r_domain, grid.nr)
                .into_iter()
                .flat_map(|r| ts.iter().map(move |&t| ModelPoint::planar(r, t)))
                .collect()
        }
        MetricModel::MultiplyWarpedLine { t_domain, .. } => linspace(*t_domain, grid.nr)
            .into_iter()
            .map(ModelPoint::radial)
            .collect(),
        MetricModel::SphereProduct { base, .. } => grid_points(base, grid),
        MetricModel::RegionAssembly(_) => Vec::new(),
    }
}

fn region_minima(name: Option<&str>, model: &MetricModel, p: usize, opts: &CertifyOptions) -> Result<Vec<PointMin>> {
    let d = model.dim();
    if d < 2 || p > d - 2 {
        return Err(Error::InvalidP { p, dim: d });
    }
    let points = grid_points(model, opts.grid);
    // identical curvature tables share one minimization
    let tables: Vec<FrameCurvature> = points
        .par_iter()
        .map(|x| frame_curvature(model, x))
        .collect::<Result<_>>()?;
    let mut first_of: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut rep = Vec::with_capacity(points.len());
    for (i, fc) in tables.iter().enumerate() {
        let key = bits_key(fc);
        rep.push(*first_of.entry(key).or_insert(i));
    }
    let mut unique: Vec<usize> = rep.clone();
    unique.sort_unstable();
    unique.dedup();
    let solved: Vec<(usize, PointMin)> = unique
        .par_iter()
        .map(|&i| {
            Ok((
                i,
                point_min(model, &points[i], p, opts.strategy, opts.restarts, opts.seed)?,
            ))
        })
        .collect::<Result<_>>()?;
    let solved: HashMap<usize, PointMin> = solved.into_iter().collect();
    Ok(points
        .into_iter()
        .zip(rep)
        .map(|(x, r)| {
            let mut pm = solved[&r].clone();
            pm.point = x;
            pm.region = name.map(str::to_string);
            pm
        })
        .collect())
}

/// Grid x Grassmannian minimization with a verdict.
pub fn certify(model: &MetricModel, model_id: &str, p: usize, opts: &CertifyOptions) -> Result<PositivityCertificate> {
    let points = match model {
        MetricModel::RegionAssembly(asm) => {
            let mut all = Vec::new();
            for reg in &asm.regions {
                all.extend(region_minima(Some(&reg.name), &reg.model, p, opts)?);
            }
            all
        }
        _ => region_minima(None, model, p, opts)?,
    };
    if points.is_empty() {
        return Err(Error::InvalidParams("empty grid".into()));
    }
    let mut argmin = 0;
    let mut any_nan = false;
    for (i, pm) in points.iter().enumerate() {
        if pm.value.is_nan() {
            any_nan = true;
        } else if pm.value < points[argmin].value || points[argmin].value.is_nan() {
            argmin = i;
        }
    }
    let max_disagreement = points.iter().map(PointMin::disagreement).fold(0.0, f64::max);
    let best = &points[argmin];
    let min_value = best.value;
    let verdict = if any_nan || max_disagreement > AGREEMENT_TOL {
        Verdict::Inconclusive
    } else if min_value > opts.tol {
        Verdict::Positive
    } else {
        Verdict::Nonpositive
    };
    Ok(PositivityCertificate {
        model_id: model_id.to_string(),
        p,
        grid: opts.grid,
        min_value,
        argmin,
        argmin_point: best.point.clone(),
        argmin_region: best.region.clone(),
        argmin_plane: best.plane.clone(),
        strategy: opts.strategy,
        tolerance: opts.tol,
        seed: opts.seed,
        max_disagreement,
        verdict,
        points,
    })
}

// ---------------------------------------------------------------------------
// probes

#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub dims: Vec<usize>,
    pub threshold: usize,
    /// Certificate at `p = n - m - 1`, when that is a valid `p`.
    pub below: Option<PositivityCertificate>,
    /// Certificate at `p = n - m`, when that is a valid `p`.
    pub at: Option<PositivityCertificate>,
}

impl ThresholdReport {
    /// Below-threshold positive and at-threshold not positive, where defined.
    pub fn verified(&self) -> bool {
        self.below.as_ref().is_none_or(|c| c.verdict == Verdict::Positive)
            && self.at.as_ref().is_none_or(|c| c.verdict == Verdict::Nonpositive)
    }
}

/// The positivity threshold `n - m` of a product of `m` unit spheres,
/// checked by certification on either side.
pub fn sphere_product_threshold(dims: &[usize], opts: &CertifyOptions) -> Result<ThresholdReport> {
    let model = MetricModel::unit_spheres(dims.to_vec())?;
    let n = model.dim();
    let m = dims.len();
    let threshold = n.saturating_sub(m);
    let id = format!("spheres{dims:?}");
    let valid = |p: usize| n >= 2 && p <= n - 2;
    let below = match threshold.checked_sub(1) {
        Some(p) if valid(p) => Some(certify(&model, &id, p, opts)?),
        _ => None,
    };
    let at = if valid(threshold) {
        Some(certify(&model, &id, threshold, opts)?)
    } else {
        None
    };
    Ok(ThresholdReport {
        dims: dims.to_vec(),
        threshold,
        below,
        at,
    })
}

#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub delta: f64,
    pub min_value: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    /// Each shrink of `delta` by a factor `q` must raise the minimum by at
    /// least `q^2 / 2` (2x per halving).
    pub fn pass(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let q = w[0].delta / w[1].delta;
            w[1].min_value >= 0.5 * q * q * w[0].min_value && w[0].min_value > 0.0
        })
    }
}

/// Certified minima of a one-parameter family over decreasing `deltas`.
pub fn delta_scaling_probe<F>(build: F, p: usize, deltas: &[f64], opts: &CertifyOptions) -> Result<ScalingTable>
where
    F: Fn(f64) -> Result<MetricModel>,
{
    if deltas.iter().any(|d| !(*d > 0.0)) || deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParams("deltas must be positive and decreasing".into()));
    }
    let rows = deltas
        .iter()
        .map(|&delta| {
            let model = build(delta)?;
            let cert = certify(&model, "scaling", p, opts)?;
            Ok(ScalingRow {
                delta,
                min_value: cert.min_value,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScalingTable { rows })
}

/// Smallest `s_{p,n}` over `count` Haar-random planes; an upper bound
/// probe for certified minima.
pub fn random_plane_probe(fc: &FrameCurvature, p: usize, count: usize, seed: u64) -> Result<f64> {
    let d = fc.dim;
    if d < 2 || p > d - 2 {
        return Err(Error::InvalidP { p, dim: d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let obj = GrassmannObjective { fc, complement: true };
    for _ in 0..count {
        let f = random_frame(d - p, d, &mut rng);
        best = best.min(obj.value(&f));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 4).len(), 1);
        assert_eq!(combinations(6, 3)[0], vec![0, 1, 2]);
    }

    #[test]
    fn round_sphere_any_plane() {
        let m = MetricModel::unit_spheres(vec![5]).unwrap();
        let (v, pc) = min_over_grassmann(&m, &ModelPoint::radial(0.0), 2, Strategy::Both, 3).unwrap();
        assert!((v - 6.0).abs() < 1e-12);
        assert!(pc.gram_residual() < 1e-12);
    }

    #[test]
    fn mixed_plane_zero() {
        let m = MetricModel::unit_spheres(vec![2, 2]).unwrap();
        let (v, pc) = min_over_grassmann(&m, &ModelPoint::radial(0.0), 2, Strategy::Both, 0).unwrap();
        assert!(v.abs() < 1e-12);
        let g = pc.projector();
        // one unit of complement weight in each factor
        assert!((g[0] + g[5] - 1.0).abs() < 1e-9 && (g[10] + g[15] - 1.0).abs() < 1e-9);
    }
}
