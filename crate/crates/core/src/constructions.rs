//! The named metrics: torpedo, torpedo cylinder, toe, bend, boot, and the
//! boot crossed with a round sphere.

use crate::error::{Error, Result};
use crate::geometry::{check_region_interfaces, Interface, MetricModel, Region, RegionAssembly, Side};
use crate::positivity::{certify, CertifyOptions, PositivityCertificate, Verdict};
use crate::profiles::{alpha_from_beta, bend_omega, toe_omega, Torpedo, TwoVarProfile, WarpingProfile};

fn check_delta(delta: f64, lambda: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() || !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParams(format!("delta = {delta}, lambda = {lambda}")));
    }
    Ok(())
}

/// `dr^2 + eta_{delta,lambda}(r)^2 ds_{n+1}^2` on `D^{n+2}`.
pub fn build_torpedo(n: usize, delta: f64, lambda: f64) -> Result<MetricModel> {
    check_delta(delta, lambda)?;
    if n < 1 {
        return Err(Error::InvalidParams("torpedo needs n >= 1".into()));
    }
    MetricModel::warped_line(n + 1, WarpingProfile::torpedo(delta, lambda)?)
}

/// `g_torp^{n+1}(delta)_lambda + dt^2` on `D^{n+1} x [0, length]`.
pub fn build_torpedo_cylinder(n: usize, delta: f64, lambda: f64, length: f64) -> Result<MetricModel> {
    check_delta(delta, lambda)?;
    if n < 1 || !(length > 0.0) {
        return Err(Error::InvalidParams(format!("n = {n}, length = {length}")));
    }
    let beta = WarpingProfile::torpedo(delta, lambda)?;
    let rd = beta.domain();
    let td = (0.0, length);
    MetricModel::two_d_warp(n, beta, TwoVarProfile::constant(1.0, rd, td), rd, td)
}

/// Toe metric `dr^2 + omega(r,t)^2 dt^2 + beta(r)^2 ds_n^2` with a
/// torpedo `beta` whose neck is `lambda1` long; `lambda2` extends the flat
/// `t <= -1` end of the bend.
pub fn build_toe(n: usize, delta: f64, lambda1: f64, lambda2: f64) -> Result<MetricModel> {
    check_delta(delta, lambda1)?;
    if n < 2 || !(lambda2 >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "toe needs n >= 2 and lambda2 >= 0 (n = {n})"
        )));
    }
    let beta = WarpingProfile::torpedo(delta, lambda1)?;
    let rd = beta.domain();
    let alpha = alpha_from_beta(&beta, rd.1)?;
    let omega = toe_omega(&alpha);
    let (t0, t1) = omega.t_domain();
    let td = (t0 - lambda2, t1);
    let omega = omega.with_domains(rd, td);
    MetricModel::two_d_warp(n, beta, omega, rd, td)
}

/// The bend's radial data: reversed torpedo `beta(r) = eta_delta(b - r)`,
/// its `alpha`, and `b`.
pub fn bend_profiles(delta: f64) -> Result<(WarpingProfile, WarpingProfile, f64)> {
    check_delta(delta, 0.0)?;
    let eta = WarpingProfile::torpedo(delta, 0.0)?;
    let b = eta.domain().1;
    let beta = eta.reversed(b);
    let alpha = alpha_from_beta(&beta, b)?;
    Ok((beta, alpha, b))
}

/// `max |alpha|` for the bend at `delta`.
pub fn bend_alpha_max(delta: f64) -> Result<f64> {
    let (_, alpha, _) = bend_profiles(delta)?;
    Ok(alpha.alpha_max_abs().unwrap_or(0.0))
}

/// Bend metric `dr^2 + omega_Lambda^2 dt^2 + eta_delta(b - r)^2 ds_n^2`.
pub fn build_bend(n: usize, delta: f64, lambda: f64) -> Result<MetricModel> {
    if n < 2 {
        return Err(Error::InvalidParams("bend needs n >= 2".into()));
    }
    let (beta, alpha, b) = bend_profiles(delta)?;
    let omega = bend_omega(lambda, &alpha)?;
    let td = omega.t_domain();
    MetricModel::two_d_warp(n, beta, omega, (0.0, b), td)
}

/// Largest negative fifth-term magnitude `|omega_r beta_r| / omega` on a
/// grid, against the bound `max|alpha_r beta_r| / (Lambda - max|alpha|)`.
#[derive(Debug, Clone, Copy)]
pub struct FifthTermBound {
    pub lambda: f64,
    pub measured: f64,
    pub analytic: f64,
}

impl FifthTermBound {
    pub fn ratio(&self) -> f64 {
        self.measured / self.analytic
    }
}

pub fn bend_fifth_term(delta: f64, lambda: f64, nr: usize, nt: usize) -> Result<FifthTermBound> {
    let (beta, alpha, b) = bend_profiles(delta)?;
    let omega = bend_omega(lambda, &alpha)?;
    let amax = alpha.alpha_max_abs().unwrap_or(0.0);
    let (t0, t1) = omega.t_domain();
    let mut measured = 0.0_f64;
    let mut numer = 0.0_f64;
    for i in 0..=nr {
        let r = b * i as f64 / nr as f64;
        let bj = beta.jet(r);
        numer = numer.max((alpha.jet(r).d1 * bj.d1).abs());
        for j in 0..=nt {
            let t = t0 + (t1 - t0) * j as f64 / nt as f64;
            let w = omega.jet(r, t);
            let term = w.dr * bj.d1 / w.value;
            // only same-sign products make the term negative
            if term > 0.0 {
                measured = measured.max(term);
            }
        }
    }
    Ok(FifthTermBound {
        lambda,
        measured,
        analytic: numer / (lambda - amax),
    })
}

#[derive(Debug, Clone)]
pub struct LambdaSearch {
    pub lambda: f64,
    pub certificate: PositivityCertificate,
    /// Every `(Lambda, certified min, verdict)` tried, in order.
    pub history: Vec<(f64, f64, Verdict)>,
}

/// Doubling from `2 max|alpha| + 1` until the bend certifies positive
/// (at most 20 doublings), then bisection towards the smallest positive
/// `Lambda`.
pub fn search_bend_lambda(n: usize, delta: f64, p: usize, opts: &CertifyOptions) -> Result<LambdaSearch> {
    search_bend_lambda_capped(n, delta, p, opts, 20)
}

/// [`search_bend_lambda`] with an explicit doubling cap.
pub fn search_bend_lambda_capped(
    n: usize,
    delta: f64,
    p: usize,
    opts: &CertifyOptions,
    max_doublings: usize,
) -> Result<LambdaSearch> {
    if n < 2 || p > n - 2 {
        return Err(Error::InvalidP { p, dim: n + 2 });
    }
    let amax = bend_alpha_max(delta)?;
    let mut history = Vec::new();
    let mut run = |lambda: f64| -> Result<PositivityCertificate> {
        let model = build_bend(n, delta, lambda)?;
        let cert = certify(&model, "bend", p, opts)?;
        history.push((lambda, cert.min_value, cert.verdict));
        Ok(cert)
    };
    let lambda0 = 2.0 * amax + 1.0;
    let mut hi = lambda0;
    let mut cert = run(hi)?;
    let mut lo = amax;
    let mut doublings = 0;
    while cert.verdict != Verdict::Positive {
        if doublings == max_doublings {
            return Err(Error::SearchExhausted(format!(
                "bend not positive up to Lambda = {hi} (n = {n}, p = {p}, delta = {delta})"
            )));
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        cert = run(hi)?;
    }
    for _ in 0..8 {
        let mid = 0.5 * (lo + hi);
        let c = run(mid)?;
        if c.verdict == Verdict::Positive {
            hi = mid;
            cert = c;
        } else {
            lo = mid;
        }
    }
    Ok(LambdaSearch {
        lambda: hi,
        certificate: cert,
        history,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BootParams {
    pub n: usize,
    pub delta: f64,
    pub lambda: f64,
    pub l1: f64,
    pub l4: f64,
}

impl BootParams {
    /// Width of the flat region.
    pub fn l2(&self) -> f64 {
        self.l1 + self.lambda
    }

    /// Length of the torpedo cylinder and of the flat region.
    pub fn l3(&self) -> f64 {
        self.l4 + self.lambda
    }
}

/// Four regions: R1 toe, R2 bend, R3 torpedo cylinder, R4 flat
/// `D^2 x S^n` of fiber radius `C delta`.
pub fn assemble_boot(params: BootParams) -> Result<MetricModel> {
    let BootParams {
        n,
        delta,
        lambda,
        l1,
        l4,
    } = params;
    if !(l1 >= 0.0) || !(l4 >= 0.0) {
        return Err(Error::InvalidParams(format!("l1 = {l1}, l4 = {l4}")));
    }
    let toe = build_toe(n, delta, 0.0, 0.0)?;
    let bend = build_bend(n, delta, lambda)?;
    let cyl = build_torpedo_cylinder(n, delta, 0.0, params.l3())?;
    let b = Torpedo::new(delta, 0.0)?.length();
    let neck = Torpedo::new(delta, 0.0)?.neck_radius();
    let rd = (b, b + params.l2());
    let td = (0.0, params.l3());
    let flat = MetricModel::two_d_warp(
        n,
        WarpingProfile::constant(neck, rd),
        TwoVarProfile::constant(1.0, rd, td),
        rd,
        td,
    )?;
    let regions = vec![
        Region {
            name: "R1-toe".into(),
            model: toe,
        },
        Region {
            name: "R2-bend".into(),
            model: bend,
        },
        Region {
            name: "R3-torpedo-cylinder".into(),
            model: cyl,
        },
        Region {
            name: "R4-flat".into(),
            model: flat,
        },
    ];
    let interfaces = vec![
        Interface {
            a: 0,
            side_a: Side::TMax,
            b: 2,
            side_b: Side::TMin,
            flip: false,
        },
        Interface {
            a: 2,
            side_a: Side::TMax,
            b: 1,
            side_b: Side::TMin,
            flip: true,
        },
        Interface {
            a: 2,
            side_a: Side::RMax,
            b: 3,
            side_b: Side::RMin,
            flip: false,
        },
    ];
    let model = MetricModel::RegionAssembly(RegionAssembly { regions, interfaces });
    let report = check_region_interfaces(&model, 1e-9);
    if !report.pass() {
        return Err(Error::InterfaceMismatch(report.max_mismatch()));
    }
    Ok(model)
}

/// Every region of the boot crossed with a unit `S^m`.
pub fn boot_cross_sphere(params: BootParams, m: usize) -> Result<MetricModel> {
    let boot = assemble_boot(params)?;
    if m == 0 {
        return Ok(boot);
    }
    let MetricModel::RegionAssembly(asm) = boot else {
        unreachable!("assemble_boot returns an assembly")
    };
    let regions = asm
        .regions
        .into_iter()
        .map(|r| Region {
            name: r.name,
            model: r.model.with_sphere(m),
        })
        .collect();
    Ok(MetricModel::RegionAssembly(RegionAssembly {
        regions,
        interfaces: asm.interfaces,
    }))
}

/// Region-by-region certificates of an assembly.
pub fn certify_regions(model: &MetricModel, p: usize, opts: &CertifyOptions) -> Result<Vec<PositivityCertificate>> {
    match model {
        MetricModel::RegionAssembly(asm) => asm
            .regions
            .iter()
            .map(|r| certify(&r.model, &r.name, p, opts))
            .collect(),
        other => Ok(vec![certify(other, other.family(), p, opts)?]),
    }
}

/// `(n - p)(n - p - 1) / (C delta)^2`: the Case 1 value on the flat region.
pub fn flat_region_case1(n: usize, p: usize, delta: f64) -> Result<f64> {
    let c = Torpedo::new(delta, 0.0)?.neck_radius();
    let f = (n - p) as f64;
    Ok(f * (f - 1.0) / (c * c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boot_interfaces_match() {
        let params = BootParams {
            n: 2,
            delta: 1.0,
            lambda: 3.0,
            l1: 1.0,
            l4: 1.0,
        };
        let m = assemble_boot(params).unwrap();
        let rep = check_region_interfaces(&m, 1e-9);
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.entries.len(), 3);
    }

    #[test]
    fn torpedo_fiber_dimension() {
        assert_eq!(build_torpedo(2, 1.0, 0.0).unwrap().dim(), 4);
        assert_eq!(build_torpedo_cylinder(3, 1.0, 0.0, 1.0).unwrap().dim(), 5);
    }
}
