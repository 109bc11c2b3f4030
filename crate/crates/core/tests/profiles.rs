use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use approx::assert_relative_eq;
use intercurv::constructions::bend_profiles;
use intercurv::profiles::quadrature::integrate;
use intercurv::profiles::torpedo::scaled_torpedo_constant;
use intercurv::profiles::{
    alpha_from_beta, bend_omega, bump_mu, check_derivatives, check_derivatives_2d, mu_l, toe_omega, torpedo_constant,
    torpedo_eta,
};
use intercurv::{Error, WarpingProfile};
use proptest::prelude::*;

fn mu_reference(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

#[test]
fn bump_matches_direct_formula() {
    for i in 0..=1000 {
        let t = -0.1 + 1.2 * i as f64 / 1000.0;
        assert!((bump_mu(t).value - mu_reference(t)).abs() < 1e-15, "t = {t}");
    }
}

#[test]
fn bump_derivatives_match_differences() {
    let h = 1e-5;
    for i in 1..200 {
        let t = i as f64 / 200.0;
        let j = bump_mu(t);
        let fd1 = (mu_reference(t + h) - mu_reference(t - h)) / (2.0 * h);
        let fd2 = (bump_mu(t + h).d1 - bump_mu(t - h).d1) / (2.0 * h);
        assert!((j.d1 - fd1).abs() < 1e-7 * j.d1.abs().max(1.0));
        assert!((j.d2 - fd2).abs() < 1e-6 * j.d2.abs().max(1.0));
    }
}

#[test]
fn mu_l_ramp_and_validation() {
    let j = mu_l(4.0, 3.0).unwrap();
    assert_relative_eq!(j.value, 0.5, epsilon = 1e-15);
    assert_eq!(mu_l(4.0, 1.0).unwrap().value, 0.0);
    assert_eq!(mu_l(4.0, 5.0).unwrap().value, 1.0);
    assert!(matches!(mu_l(0.0, 1.0), Err(Error::InvalidL(_))));
    assert!(matches!(WarpingProfile::mu_l(-1.0), Err(Error::InvalidL(_))));
}

#[test]
fn quadrature_known_integrals() {
    assert_relative_eq!(integrate(f64::sin, 0.0, PI, 1e-13).unwrap(), 2.0, epsilon = 1e-12);
    assert_relative_eq!(
        integrate(f64::exp, 0.0, 1.0, 1e-13).unwrap(),
        1.0_f64.exp() - 1.0,
        epsilon = 1e-12
    );
    assert_relative_eq!(
        integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-13).unwrap(),
        FRAC_PI_4,
        epsilon = 1e-12
    );
    assert!(integrate(f64::sin, 0.0, 1.0, 0.0).is_err());
}

#[test]
fn torpedo_constant_against_simpson() {
    let n = 1_000_000;
    let f = |r: f64| r.cos() * mu_reference(2.0 - 4.0 * r / PI);
    let h = FRAC_PI_2 / n as f64;
    let mut s = f(0.0) + f(FRAC_PI_2);
    for i in 1..n {
        s += f(h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = s * h / 3.0;
    let c = torpedo_constant(1e-13).unwrap();
    assert!((c - simpson).abs() < 1e-10, "{c} vs {simpson}");
    assert!((c - 0.916).abs() < 1e-3);
}

#[test]
fn torpedo_shape() {
    let delta = 0.7;
    let lambda = 1.3;
    let p = WarpingProfile::torpedo(delta, lambda).unwrap();
    assert_relative_eq!(p.domain().1, FRAC_PI_2 * delta + lambda, epsilon = 1e-15);
    let c = torpedo_constant(1e-13).unwrap();
    for i in 0..=2000 {
        let r = p.domain().1 * i as f64 / 2000.0;
        let j = p.jet(r);
        assert!(j.d1 >= 0.0 && j.d1 <= 1.0 + 1e-15, "slope at {r}");
        assert!(j.d2 <= 1e-15, "concavity at {r}");
        if r <= FRAC_PI_4 * delta {
            assert!((j.value - delta * (r / delta).sin()).abs() < 1e-15);
        }
        if r >= FRAC_PI_2 * delta {
            assert!((j.value - c * delta).abs() < 1e-10);
            assert_eq!((j.d1, j.d2), (0.0, 0.0));
        }
    }
    assert!(torpedo_eta(0.0, 1.0, 0.5).is_err());
    assert!(torpedo_eta(1.0, -1.0, 0.5).is_err());
    assert!(torpedo_eta(1.0, 0.0, 5.0).is_err());
}

#[test]
fn derivative_checks_pass() {
    let profiles = [
        WarpingProfile::sine(0.8).unwrap(),
        WarpingProfile::torpedo(1.0, 0.5).unwrap(),
        WarpingProfile::torpedo(0.25, 0.0).unwrap(),
        WarpingProfile::mu_l(3.0).unwrap(),
        WarpingProfile::mu((0.0, 1.0)).reparam(0.5, 0.0, (0.0, 2.0)),
    ];
    for p in &profiles {
        let c = check_derivatives(p, 200, 7);
        assert!(c.pass(), "{}: {c:?}", p.describe());
    }
    let (beta, alpha, _) = bend_profiles(1.0).unwrap();
    assert!(check_derivatives(&beta, 200, 1).pass());
    assert!(check_derivatives(&alpha, 200, 2).pass());
    let toe = toe_omega(&alpha);
    assert!(check_derivatives_2d(&toe, 300, 3).pass());
    let bend = bend_omega(2.0, &alpha).unwrap();
    assert!(check_derivatives_2d(&bend, 300, 4).pass());
}

#[test]
fn flipped_d2_is_caught() {
    let p = WarpingProfile::sine(1.0).unwrap().with_flipped_d2();
    assert!(!check_derivatives(&p, 50, 0).pass());
}

#[test]
fn alpha_is_arc_length_complement() {
    let beta = WarpingProfile::torpedo(1.0, 0.0).unwrap();
    let b = beta.domain().1;
    let alpha = alpha_from_beta(&beta, b).unwrap();
    assert!(alpha.jet(b / 2.0).value.abs() < 1e-12);
    for i in 0..=100 {
        let r = b * i as f64 / 100.0;
        let expected = -(1.0 - beta.jet(r).d1.powi(2)).max(0.0).sqrt();
        assert!((alpha.jet(r).d1 - expected).abs() < 1e-9, "r = {r}");
    }
    let amax = alpha.alpha_max_abs().unwrap();
    let ends = alpha.jet(0.0).value.abs().max(alpha.jet(b).value.abs());
    assert_relative_eq!(amax, ends, epsilon = 1e-9);
}

#[test]
fn alpha_rejects_steep_profiles() {
    let steep = WarpingProfile::affine(0.0, 2.0, (0.0, 1.0));
    assert!(matches!(
        alpha_from_beta(&steep, 1.0),
        Err(Error::SlopeViolation { .. })
    ));
}

#[test]
fn bend_omega_needs_large_lambda() {
    let (_, alpha, _) = bend_profiles(1.0).unwrap();
    let amax = alpha.alpha_max_abs().unwrap();
    assert!(matches!(
        bend_omega(0.5 * amax, &alpha),
        Err(Error::LambdaTooSmall { .. })
    ));
}

#[test]
fn tabulated_reproduces_quintic() {
    // exact for polynomials of degree <= 5
    let f = |x: f64| [x.powi(5) - x, 5.0 * x.powi(4) - 1.0, 20.0 * x.powi(3)];
    let nodes: Vec<[f64; 3]> = (0..=4).map(|i| f(0.25 * i as f64)).collect();
    let p = WarpingProfile::tabulated(0.0, 0.25, nodes).unwrap();
    for i in 0..=40 {
        let x = i as f64 / 40.0;
        let j = p.jet(x);
        let e = f(x);
        assert!((j.value - e[0]).abs() < 1e-13 && (j.d1 - e[1]).abs() < 1e-11 && (j.d2 - e[2]).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn mu_is_symmetric_and_monotone(t in 0.0f64..1.0, dt in 0.0f64..0.1) {
        let a = bump_mu(t).value;
        prop_assert!((a + bump_mu(1.0 - t).value - 1.0).abs() < 1e-14);
        prop_assert!(bump_mu(t + dt).value >= a);
        prop_assert!(bump_mu(t).d1 >= 0.0);
    }

    #[test]
    fn torpedo_scales_with_delta(delta in 0.05f64..5.0, x in 0.0f64..2.0) {
        let unit = WarpingProfile::torpedo(1.0, 0.5).unwrap().jet(x);
        let scaled = WarpingProfile::torpedo(delta, 0.5 * delta).unwrap().jet(delta * x);
        prop_assert!((scaled.value - delta * unit.value).abs() < 1e-12 * delta.max(1.0));
        prop_assert!((scaled.d1 - unit.d1).abs() < 1e-12);
        prop_assert!((scaled.d2 - unit.d2 / delta).abs() < 1e-12 / delta.min(1.0));
    }

    #[test]
    fn scaled_constant_is_delta_free(delta in 0.01f64..10.0) {
        let c = scaled_torpedo_constant(delta, 1e-12).unwrap();
        prop_assert!((c - torpedo_constant(1e-13).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn quadrature_of_polynomials(a in -2.0f64..2.0, len in 0.01f64..3.0, c3 in -1.0f64..1.0) {
        let b = a + len;
        let exact = |x: f64| c3 * x.powi(4) / 4.0 + x.powi(2) / 2.0;
        let got = integrate(|x| c3 * x.powi(3) + x, a, b, 1e-13).unwrap();
        prop_assert!((got - (exact(b) - exact(a))).abs() < 1e-11);
    }
}
