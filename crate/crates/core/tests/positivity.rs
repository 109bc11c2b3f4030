use intercurv::constructions::{build_bend, build_toe};
use intercurv::curvature::{frame_curvature, s_pn, FrameCurvature};
use intercurv::geometry::PlaneComplement;
use intercurv::positivity::{
    certify, grid_points, min_over_grassmann, min_over_grassmann_table, random_plane_probe, CertifyOptions, GridSpec,
    Strategy, Verdict,
};
use intercurv::{Error, MetricModel, ModelPoint};
use proptest::prelude::*;

fn table(dim: usize, entries: &[f64]) -> FrameCurvature {
    let mut k = vec![0.0; dim * dim];
    let mut it = entries.iter();
    for a in 0..dim {
        for b in a + 1..dim {
            let v = *it.next().unwrap();
            k[a * dim + b] = v;
            k[b * dim + a] = v;
        }
    }
    FrameCurvature { dim, k }
}

fn pair_min(fc: &FrameCurvature) -> f64 {
    let mut m = f64::INFINITY;
    for a in 0..fc.dim {
        for b in a + 1..fc.dim {
            m = m.min(fc.get(a, b));
        }
    }
    m
}

#[test]
fn random_sampling_never_beats_the_minimum() {
    let toe = build_toe(3, 1.0, 0.0, 0.0).unwrap();
    let bend = build_bend(3, 1.0, 2.0).unwrap();
    for (model, x) in [
        (&toe, ModelPoint::planar(1.0, 0.8)),
        (&toe, ModelPoint::planar(0.3, -1.2)),
        (&bend, ModelPoint::planar(0.8, 1.0)),
    ] {
        let fc = frame_curvature(model, &x).unwrap();
        for p in 0..=fc.dim - 2 {
            let (min, plane) = min_over_grassmann(model, &x, p, Strategy::Both, 5).unwrap();
            let probe = random_plane_probe(&fc, p, 100_000, 9).unwrap();
            assert!(min <= probe + 1e-9, "p {p}: min {min} probe {probe}");
            assert!((s_pn(model, &x, &plane).unwrap() - min).abs() < 1e-10);
        }
    }
}

#[test]
fn strategies_agree_on_doubly_warped_points() {
    let bend = build_bend(4, 1.0, 1.5).unwrap();
    for x in [
        ModelPoint::planar(0.4, 0.5),
        ModelPoint::planar(1.2, 2.0),
        ModelPoint::planar(1.5, -2.5),
    ] {
        for p in 0..=2 {
            let (g, _) = min_over_grassmann(&bend, &x, p, Strategy::RandomRestart, 1).unwrap();
            let (s, _) = min_over_grassmann(&bend, &x, p, Strategy::Structured, 1).unwrap();
            assert!((g - s).abs() < 1e-7, "p {p}: {g} vs {s}");
        }
    }
}

#[test]
fn structured_strategy_falls_back_on_other_models() {
    let m = MetricModel::unit_spheres(vec![2, 2]).unwrap();
    let x = ModelPoint::radial(0.0);
    let (s, _) = min_over_grassmann(&m, &x, 2, Strategy::Structured, 0).unwrap();
    let (g, _) = min_over_grassmann(&m, &x, 2, Strategy::RandomRestart, 0).unwrap();
    assert_eq!(s.to_bits(), g.to_bits());
    assert!(s.abs() < 1e-12);
}

#[test]
fn invalid_p_is_rejected() {
    let m = MetricModel::unit_spheres(vec![3]).unwrap();
    assert!(matches!(
        certify(&m, "s3", 2, &CertifyOptions::default()),
        Err(Error::InvalidP { p: 2, dim: 3 })
    ));
}

#[test]
fn grid_includes_endpoints() {
    let toe = build_toe(2, 1.0, 0.0, 0.0).unwrap();
    let pts = grid_points(&toe, GridSpec { nr: 5, nt: 3 });
    assert_eq!(pts.len(), 15);
    let MetricModel::TwoDWarp { r_domain, t_domain, .. } = &toe else {
        unreachable!()
    };
    assert_eq!(pts[0], ModelPoint::planar(r_domain.0, t_domain.0));
    assert_eq!(pts[14], ModelPoint::planar(r_domain.1, t_domain.1));
}

#[test]
fn certificates_are_reproducible() {
    let toe = build_toe(2, 1.0, 0.0, 0.0).unwrap();
    let opts = CertifyOptions {
        grid: GridSpec { nr: 12, nt: 8 },
        seed: 3,
        ..Default::default()
    };
    let a = certify(&toe, "toe", 0, &opts).unwrap();
    let b = certify(&toe, "toe", 0, &opts).unwrap();
    assert_eq!(a.min_value.to_bits(), b.min_value.to_bits());
    assert_eq!(a.argmin, b.argmin);
    assert_eq!(a.argmin_plane, b.argmin_plane);
    assert_eq!(a.verdict, Verdict::Positive);
    assert!((a.reevaluate(&toe).unwrap() - a.min_value).abs() < 1e-12);
}

#[test]
fn negative_curvature_is_reported() {
    // bend just above max|alpha| with the coarse grid still sees negativity
    let bend = build_bend(2, 1.0, 0.75).unwrap();
    let opts = CertifyOptions {
        grid: GridSpec { nr: 32, nt: 16 },
        ..Default::default()
    };
    let c = certify(&bend, "bend", 0, &opts).unwrap();
    assert_eq!(c.verdict, Verdict::Nonpositive);
    assert!(c.min_value < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extreme_p_have_closed_minima(entries in prop::collection::vec(-2.0f64..3.0, 10), seed in 0u64..1000) {
        let fc = table(5, &entries);
        // p = 0: every plane gives the scalar curvature
        let (s0, _) = min_over_grassmann_table(&fc, 0, 4, seed).unwrap();
        prop_assert!((s0 - 2.0 * entries.iter().sum::<f64>()).abs() < 1e-12);
        // p = n - 2: twice the smallest sectional curvature, attained on a frame pair
        let (s3, _) = min_over_grassmann_table(&fc, 3, 4, seed).unwrap();
        prop_assert!((s3 - 2.0 * pair_min(&fc)).abs() < 1e-9, "{} vs {}", s3, 2.0 * pair_min(&fc));
    }

    #[test]
    fn descent_beats_coordinate_planes(entries in prop::collection::vec(-2.0f64..3.0, 15), p in 1usize..4) {
        let fc = table(6, &entries);
        let (min, plane) = min_over_grassmann_table(&fc, p, 8, 1).unwrap();
        prop_assert!(plane.gram_residual() < 1e-12);
        prop_assert!((fc.s_from_projector(&plane.projector()) - min).abs() < 1e-10);
        // every coordinate complement is an upper bound
        let keep_all: Vec<usize> = (0..6).collect();
        for mask in 0u32..64 {
            if mask.count_ones() as usize != 6 - p { continue; }
            let keep: Vec<usize> = keep_all.iter().copied().filter(|i| mask & (1 << i) != 0).collect();
            let c = PlaneComplement::coordinate(6, &keep).unwrap();
            prop_assert!(min <= fc.s_from_projector(&c.projector()) + 1e-12);
        }
        prop_assert!(min <= random_plane_probe(&fc, p, 2000, 2).unwrap() + 1e-9);
    }
}
