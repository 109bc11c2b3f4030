//! Concordances from paths of metrics: the cylinder `g_{f(t)} + dt^2`
//! over a path `r -> g_r` of round or product-of-spheres metrics.

use crate::curvature::multiply_warped_sectionals;
use crate::error::{Error, Result};
use crate::geometry::{MetricModel, ModelPoint};
use crate::positivity::{certify, CertifyOptions, PositivityCertificate, Verdict};
use crate::profiles::{mu_derivative_bounds, WarpingProfile};

/// A path `r in [0, 1] -> g_r` with `g_r = sum rho_i(r)^2 ds_{n_i}^2`.
#[derive(Debug, Clone)]
pub struct MetricPath {
    pub dims: Vec<usize>,
    pub radii: Vec<WarpingProfile>,
}

impl MetricPath {
    pub fn new(dims: Vec<usize>, radii: Vec<WarpingProfile>) -> Result<Self> {
        if dims.is_empty() || dims.len() != radii.len() || dims.contains(&0) {
            return Err(Error::InvalidParams("one radius profile per sphere factor".into()));
        }
        for rho in &radii {
            let (lo, hi) = rho.domain();
            if lo > 0.0 || hi < 1.0 {
                return Err(Error::InvalidParams(format!(
                    "radius profile must cover [0, 1], has [{lo}, {hi}]"
                )));
            }
            for i in 0..=64 {
                if !(rho.jet(i as f64 / 64.0).value > 0.0) {
                    return Err(Error::InvalidParams("radii must stay positive".into()));
                }
            }
        }
        Ok(Self { dims, radii })
    }

    /// `rho(r) S^n` with `rho` affine from `r0` to `r1`.
    pub fn round(n: usize, r0: f64, r1: f64) -> Result<Self> {
        Self::new(vec![n], vec![WarpingProfile::affine(r0, r1 - r0, (0.0, 1.0))])
    }

    /// Products of spheres with each radius affine between the given ends.
    pub fn product(dims: Vec<usize>, start: &[f64], end: &[f64]) -> Result<Self> {
        if start.len() != dims.len() || end.len() != dims.len() {
            return Err(Error::InvalidParams("radius lists must match the factor list".into()));
        }
        let radii = start
            .iter()
            .zip(end)
            .map(|(&a, &b)| WarpingProfile::affine(a, b - a, (0.0, 1.0)))
            .collect();
        Self::new(dims, radii)
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The slice metric `g_r`.
    pub fn slice(&self, r: f64) -> Result<MetricModel> {
        MetricModel::product_of_spheres(self.dims.clone(), self.radii.iter().map(|p| p.jet(r).value).collect())
    }

    /// `g_{f(t)} + dt^2` for a reparametrization `f` with values in `[0, 1]`.
    pub fn cylinder(&self, f: &WarpingProfile) -> Result<MetricModel> {
        let fibers = self
            .dims
            .iter()
            .zip(&self.radii)
            .map(|(&n, rho)| (n, rho.compose(f)))
            .collect();
        MetricModel::multiply_warped_line(fibers, f.domain())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExpansionRow {
    pub eps: f64,
    /// max |K_bar_ij - K_ij| over fiber pairs.
    pub fiber_dev: f64,
    /// max |K_bar_it|.
    pub mixed: f64,
}

#[derive(Debug, Clone)]
pub struct ExpansionReport {
    pub rows: Vec<ExpansionRow>,
    pub slope_fiber: f64,
    pub slope_mixed: f64,
}

impl ExpansionReport {
    pub fn pass(&self) -> bool {
        self.slope_fiber >= 1.8 && self.slope_mixed >= 1.8
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Deviation of the cylinder curvatures from the slice curvatures along
/// slow ramps `f_eps(t) = mu(eps t)`, `t in [0, 1/eps]`.
pub fn expansion_check(path: &MetricPath, amplitudes: &[f64]) -> Result<ExpansionReport> {
    if amplitudes.len() < 2 || amplitudes.iter().any(|e| !(*e > 0.0)) || amplitudes.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParams(
            "need at least two positive, decreasing amplitudes".into(),
        ));
    }
    let samples = 2000;
    let mut rows = Vec::new();
    for &eps in amplitudes {
        let len = 1.0 / eps;
        let f = WarpingProfile::mu((0.0, 1.0)).reparam(eps, 0.0, (0.0, len));
        let cyl = path.cylinder(&f)?;
        let mut fiber_dev = 0.0_f64;
        let mut mixed = 0.0_f64;
        for k in 0..=samples {
            let t = len * k as f64 / samples as f64;
            let bar = multiply_warped_sectionals(&cyl, &ModelPoint::radial(t))?;
            let r = f.jet(t).value;
            let radii: Vec<f64> = path.radii.iter().map(|p| p.jet(r).value).collect();
            // frame index -> factor
            let factor: Vec<usize> = path
                .dims
                .iter()
                .enumerate()
                .flat_map(|(i, &n)| std::iter::repeat_n(i, n))
                .collect();
            let d = factor.len();
            for a in 0..d {
                mixed = mixed.max(bar.get(0, a + 1).abs());
                for b in a + 1..d {
                    let slice = if factor[a] == factor[b] {
                        1.0 / (radii[factor[a]] * radii[factor[a]])
                    } else {
                        0.0
                    };
                    fiber_dev = fiber_dev.max((bar.get(a + 1, b + 1) - slice).abs());
                }
            }
        }
        rows.push(ExpansionRow { eps, fiber_dev, mixed });
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let fd: Vec<f64> = rows.iter().map(|r| r.fiber_dev).collect();
    let mx: Vec<f64> = rows.iter().map(|r| r.mixed).collect();
    Ok(ExpansionReport {
        slope_fiber: loglog_slope(&eps, &fd),
        slope_mixed: loglog_slope(&eps, &mx),
        rows,
    })
}

/// Ramp length making `mu_L` satisfy `|f'|, |f''| <= c`.
pub fn ramp_length_for(c: f64) -> f64 {
    let (m1, m2) = mu_derivative_bounds();
    (m1 / c).max((m2 / c).sqrt())
}

/// The tested reparametrizations with `|f'|, |f''| <= c`: the ramp `mu_L`,
/// the half ramps `mu_L / 2` and `1/2 + mu_L / 2`, and the excursion
/// `mu_L(t) - mu_L(t - L - 2)`.
pub fn test_family(c: f64) -> Result<Vec<(String, WarpingProfile)>> {
    let l = ramp_length_for(c);
    let ramp = WarpingProfile::mu_l(l)?;
    let dom = ramp.domain();
    let shift = l + 2.0;
    let long = (0.0, 2.0 * shift);
    let excursion = WarpingProfile::linear(
        0.0,
        vec![
            (1.0, ramp.reparam(1.0, 0.0, long)),
            (-1.0, ramp.reparam(1.0, -shift, long)),
        ],
        long,
    );
    Ok(vec![
        ("ramp".into(), ramp.clone()),
        (
            "half-ramp-low".into(),
            WarpingProfile::linear(0.0, vec![(0.5, ramp.clone())], dom),
        ),
        (
            "half-ramp-high".into(),
            WarpingProfile::linear(0.5, vec![(0.5, ramp.clone())], dom),
        ),
        ("excursion".into(), excursion),
    ])
}

#[derive(Debug, Clone)]
pub struct CSearch {
    pub c: f64,
    /// `(C, all tested cylinders positive)` in the order tried.
    pub history: Vec<(f64, bool)>,
}

fn family_positive(path: &MetricPath, p: usize, c: f64, opts: &CertifyOptions) -> Result<bool> {
    for (name, f) in test_family(c)? {
        let cyl = path.cylinder(&f)?;
        let cert = certify(&cyl, &name, p, opts)?;
        if cert.verdict != Verdict::Positive {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certifies slices of the path at `p` on nine evenly spaced parameters.
pub fn slices_positive(path: &MetricPath, p: usize, opts: &CertifyOptions) -> Result<bool> {
    for i in 0..=8 {
        let slice = path.slice(i as f64 / 8.0)?;
        if certify(&slice, "slice", p, opts)?.verdict != Verdict::Positive {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A constant `C in (0, 1]` such that every tested cylinder with
/// `|f'|, |f''| <= C` certifies positive: `C = 1`, then halving, then
/// six bisection steps between the last failure and first success.
pub fn find_c(path: &MetricPath, p: usize, opts: &CertifyOptions) -> Result<CSearch> {
    if !slices_positive(path, p, opts)? {
        return Err(Error::InvalidParams(format!("path slices are not positive at p = {p}")));
    }
    let mut history = Vec::new();
    let mut c = 1.0;
    let mut ok = family_positive(path, p, c, opts)?;
    history.push((c, ok));
    if ok {
        return Ok(CSearch { c, history });
    }
    let mut fail = c;
    while !ok {
        fail = c;
        c *= 0.5;
        if c < 1e-6 {
            return Err(Error::SearchExhausted(format!(
                "no C >= 1e-6 certifies the path at p = {p}"
            )));
        }
        ok = family_positive(path, p, c, opts)?;
        history.push((c, ok));
    }
    let mut good = c;
    for _ in 0..6 {
        let mid = 0.5 * (good + fail);
        let ok = family_positive(path, p, mid, opts)?;
        history.push((mid, ok));
        if ok {
            good = mid;
        } else {
            fail = mid;
        }
    }
    Ok(CSearch { c: good, history })
}

#[derive(Debug, Clone)]
pub struct Concordance {
    pub l: f64,
    pub c: f64,
    pub cylinder: MetricModel,
    pub certificate: PositivityCertificate,
    /// max |g(t) - g_0| on `[0, 1]` and max |g(t) - g_1| on `[L+1, L+2]`,
    /// over squared radii and the first two derivatives of `f`.
    pub boundary_residuals: (f64, f64),
    /// sup |f'| and sup |f''| on a 10^4-point grid.
    pub f_bounds: (f64, f64),
}

impl Concordance {
    pub fn boundaries_are_products(&self, tol: f64) -> bool {
        self.boundary_residuals.0 <= tol && self.boundary_residuals.1 <= tol
    }
}

/// Smallest `L` in the doubling schedule `1, 2, 4, ...` with
/// `sup|mu'| / L <= C` and `sup|mu''| / L^2 <= C`.
pub fn schedule_length(c: f64) -> f64 {
    let (m1, m2) = mu_derivative_bounds();
    let mut l = 1.0;
    while m1 / l > c || m2 / (l * l) > c {
        l *= 2.0;
    }
    l
}

fn boundary_residual(path: &MetricPath, f: &WarpingProfile, (a, b): (f64, f64), end: f64) -> f64 {
    let target: Vec<f64> = path.radii.iter().map(|p| p.jet(end).value.powi(2)).collect();
    let mut worst = 0.0_f64;
    for k in 0..=1000 {
        let t = a + (b - a) * k as f64 / 1000.0;
        let j = f.jet(t);
        worst = worst.max(j.d1.abs()).max(j.d2.abs());
        for (rho, g) in path.radii.iter().zip(&target) {
            worst = worst.max((rho.jet(j.value).value.powi(2) - g).abs());
        }
    }
    worst
}

/// `(s_{p,n} > 0)`-concordance between the ends of the path.
pub fn build_concordance(path: &MetricPath, p: usize, opts: &CertifyOptions) -> Result<Concordance> {
    let c = find_c(path, p, opts)?.c;
    let l = schedule_length(c);
    let f = WarpingProfile::mu_l(l)?;
    let cylinder = path.cylinder(&f)?;
    let certificate = certify(&cylinder, "concordance", p, opts)?;
    let boundary_residuals = (
        boundary_residual(path, &f, (0.0, 1.0), 0.0),
        boundary_residual(path, &f, (l + 1.0, l + 2.0), 1.0),
    );
    let mut f_bounds = (0.0_f64, 0.0_f64);
    for k in 0..=10_000 {
        let j = f.jet((l + 2.0) * k as f64 / 10_000.0);
        f_bounds.0 = f_bounds.0.max(j.d1.abs());
        f_bounds.1 = f_bounds.1.max(j.d2.abs());
    }
    Ok(Concordance {
        l,
        c,
        cylinder,
        certificate,
        boundary_residuals,
        f_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x * x).collect();
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn schedule_meets_bounds() {
        let (m1, m2) = mu_derivative_bounds();
        for c in [1.0, 0.3, 0.01] {
            let l = schedule_length(c);
            assert!(m1 / l <= c && m2 / (l * l) <= c);
            assert!(l == 1.0 || m1 / (0.5 * l) > c || m2 / (0.25 * l * l) > c);
        }
    }
}
