use intercurv::concordance::{
    build_concordance, expansion_check, find_c, ramp_length_for, schedule_length, test_family, MetricPath,
};
use intercurv::curvature::frame_curvature;
use intercurv::positivity::{CertifyOptions, GridSpec, Verdict};
use intercurv::profiles::mu_derivative_bounds;
use intercurv::{Error, ModelPoint, WarpingProfile};
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

fn coarse() -> CertifyOptions {
    CertifyOptions {
        grid: GridSpec { nr: 48, nt: 1 },
        ..Default::default()
    }
}

#[test]
fn cylinder_curvature_matches_warped_formulas() {
    // dt^2 + h(t)^2 ds_3^2 with h = 1 + mu((t - 1) / L)
    let l = 3.0;
    let path = MetricPath::round(3, 1.0, 2.0).unwrap();
    let cyl = path.cylinder(&WarpingProfile::mu_l(l).unwrap()).unwrap();
    let h = |t: f64| 1.0 + mu_reference((t - 1.0) / l);
    let step = 1e-4;
    for i in 1..40 {
        let t = (l + 2.0) * i as f64 / 40.0;
        let v = h(t);
        let d1 = (h(t + step) - h(t - step)) / (2.0 * step);
        let d2 = (h(t + step) - 2.0 * v + h(t - step)) / (step * step);
        let fc = frame_curvature(&cyl, &ModelPoint::radial(t)).unwrap();
        assert!((fc.get(0, 1) + d2 / v).abs() < 1e-6, "K_ti at {t}");
        assert!((fc.get(1, 2) - (1.0 - d1 * d1) / (v * v)).abs() < 1e-7, "K_ij at {t}");
    }
}

#[test]
fn path_validation() {
    assert!(MetricPath::round(3, 1.0, -1.0).is_err());
    assert!(MetricPath::product(vec![2, 2], &[1.0], &[2.0, 1.0]).is_err());
    assert!(MetricPath::new(vec![2], vec![WarpingProfile::constant(1.0, (0.0, 0.5))]).is_err());
    let p = MetricPath::product(vec![2, 3], &[1.0, 1.0], &[2.0, 1.0]).unwrap();
    assert_eq!(p.dim(), 5);
}

#[test]
fn test_family_respects_bounds() {
    for c in [1.0, 0.4, 0.1] {
        for (name, f) in test_family(c).unwrap() {
            let (lo, hi) = f.domain();
            for k in 0..=4000 {
                let j = f.jet(lo + (hi - lo) * k as f64 / 4000.0);
                assert!(j.value >= -1e-15 && j.value <= 1.0 + 1e-15, "{name}");
                assert!(
                    j.d1.abs() <= c * (1.0 + 1e-12) && j.d2.abs() <= c * (1.0 + 1e-12),
                    "{name} c {c}"
                );
            }
        }
        let (m1, m2) = mu_derivative_bounds();
        let l = ramp_length_for(c);
        assert!((m1 / l - c).abs() < 1e-12 || (m2 / (l * l) - c).abs() < 1e-12);
    }
}

#[test]
fn constant_path_needs_no_shrinking() {
    let path = MetricPath::round(3, 1.0, 1.0).unwrap();
    let s = find_c(&path, 1, &coarse()).unwrap();
    assert_eq!(s.c, 1.0);
    assert_eq!(s.history, vec![(1.0, true)]);
}

#[test]
fn nonpositive_slices_are_refused() {
    // S^2 x S^2 has s_{2,4} = 0 on mixed planes
    let path = MetricPath::product(vec![2, 2], &[1.0, 1.0], &[2.0, 1.0]).unwrap();
    assert!(matches!(find_c(&path, 2, &coarse()), Err(Error::InvalidParams(_))));
}

#[test]
fn concordance_of_growing_sphere() {
    let path = MetricPath::round(3, 1.0, 1.5).unwrap();
    let conc = build_concordance(&path, 0, &coarse()).unwrap();
    assert!(conc.c > 0.0 && conc.c <= 1.0);
    assert_eq!(conc.l, schedule_length(conc.c));
    assert!(conc.f_bounds.0 <= conc.c && conc.f_bounds.1 <= conc.c);
    assert_eq!(conc.certificate.verdict, Verdict::Positive);
    assert!(conc.boundaries_are_products(1e-14));
}

#[test]
fn expansion_is_second_order() {
    let path = MetricPath::round(3, 1.0, 2.0).unwrap();
    let rep = expansion_check(&path, &[0.2, 0.1, 0.05]).unwrap();
    assert!(rep.pass());
    assert!(rep
        .rows
        .windows(2)
        .all(|w| w[1].fiber_dev < w[0].fiber_dev && w[1].mixed < w[0].mixed));
    assert!(expansion_check(&path, &[0.1]).is_err());
    assert!(expansion_check(&path, &[0.05, 0.1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn slices_interpolate_radii(r in 0.0f64..1.0, a in 0.2f64..3.0, b in 0.2f64..3.0) {
        let path = MetricPath::product(vec![2, 3], &[a, 1.0], &[b, 2.0]).unwrap();
        let slice = path.slice(r).unwrap();
        let fc = frame_curvature(&slice, &ModelPoint::radial(0.0)).unwrap();
        let rho = a + (b - a) * r;
        prop_assert!((fc.get(0, 1) - 1.0 / (rho * rho)).abs() < 1e-12 / (rho * rho));
        prop_assert!((fc.get(2, 3) - 1.0 / (1.0 + r).powi(2)).abs() < 1e-12);
    }
}
