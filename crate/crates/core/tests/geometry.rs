use intercurv::geometry::{check_region_interfaces, gram_schmidt, random_complement, PlaneComplement, TangentVector};
use intercurv::{Error, MetricModel};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Projector onto the span of the first `k` columns of `m`, through QR.
fn qr_projector(m: &DMatrix<f64>) -> DMatrix<f64> {
    let q = m.clone().qr().q();
    &q * q.transpose()
}

#[test]
fn gram_schmidt_spans_like_qr() {
    let raw = [
        [1.0, 2.0, 0.0, -1.0, 0.5],
        [0.3, -1.0, 4.0, 0.0, 1.0],
        [2.0, 0.0, 1.0, 1.0, -3.0],
    ];
    let vecs: Vec<TangentVector> = raw.iter().map(|r| TangentVector::new(r.to_vec())).collect();
    let gs = gram_schmidt(&vecs).unwrap();
    let pc = PlaneComplement::new(5, 2, gs).unwrap();
    let m = DMatrix::from_fn(5, 3, |i, j| raw[j][i]);
    let expected = qr_projector(&m);
    let got = pc.projector();
    for i in 0..5 {
        for j in 0..5 {
            assert!((got[i * 5 + j] - expected[(i, j)]).abs() < 1e-13);
        }
    }
}

#[test]
fn gram_schmidt_rejects_dependent_vectors() {
    let v = TangentVector::new(vec![1.0, 2.0, 3.0]);
    let w = TangentVector::new(vec![2.0, 4.0, 6.0]);
    assert!(matches!(gram_schmidt(&[v, w]), Err(Error::DegenerateInput(_))));
}

#[test]
fn plane_complement_validation() {
    let e = |i| TangentVector::unit(4, i);
    assert!(matches!(
        PlaneComplement::new(4, 3, vec![e(0)]),
        Err(Error::InvalidP { .. })
    ));
    assert!(matches!(
        PlaneComplement::new(4, 1, vec![e(0), e(1)]),
        Err(Error::DimensionMismatch { expected: 3, got: 2 })
    ));
    let skew = TangentVector::new(vec![1.0, 1.0, 0.0, 0.0]);
    assert!(matches!(
        PlaneComplement::new(4, 2, vec![e(0), skew]),
        Err(Error::InvalidParams(_))
    ));
    let c = PlaneComplement::coordinate(4, &[1, 3]).unwrap();
    assert_eq!(c.p, 2);
    assert_eq!(c.projector()[5], 1.0);
}

#[test]
fn random_complements_are_reproducible() {
    assert_eq!(
        random_complement(11, 6, 2).unwrap(),
        random_complement(11, 6, 2).unwrap()
    );
    assert_ne!(
        random_complement(11, 6, 2).unwrap(),
        random_complement(12, 6, 2).unwrap()
    );
}

#[test]
fn random_complement_sweep() {
    for d in 2..=9 {
        for p in 0..=d - 2 {
            for seed in 0..20 {
                let pc = random_complement(seed, d, p).unwrap();
                assert_eq!(pc.basis.len(), d - p);
                assert!(pc.gram_residual() < 1e-12);
                let proj = pc.projector();
                let trace: f64 = (0..d).map(|i| proj[i * d + i]).sum();
                assert!((trace - (d - p) as f64).abs() < 1e-12);
            }
        }
    }
    assert!(random_complement(0, 3, 2).is_err());
}

#[test]
fn non_assemblies_pass_interface_check() {
    let m = MetricModel::unit_spheres(vec![2]).unwrap();
    let rep = check_region_interfaces(&m, 1e-9);
    assert!(rep.pass() && rep.entries.is_empty());
}

#[test]
fn model_constructors_validate() {
    assert!(MetricModel::product_of_spheres(vec![2], vec![1.0, 2.0]).is_err());
    assert!(MetricModel::product_of_spheres(vec![0], vec![1.0]).is_err());
    assert!(MetricModel::product_of_spheres(vec![2], vec![-1.0]).is_err());
    assert_eq!(MetricModel::unit_spheres(vec![2, 3]).unwrap().dim(), 5);
}

proptest! {
    #[test]
    fn rotation_keeps_the_plane(seed in 0u64..10_000, angle in -3.0f64..3.0) {
        let pc = random_complement(seed, 5, 2).unwrap();
        let (c, s) = (angle.cos(), angle.sin());
        let q = [c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0];
        let rot = pc.rotated(&q);
        prop_assert!(rot.gram_residual() < 1e-12);
        for (a, b) in pc.projector().iter().zip(rot.projector()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_is_idempotent(seed in 0u64..10_000, d in 3usize..8) {
        let pc = random_complement(seed, d, 1).unwrap();
        let p = DMatrix::from_row_slice(d, d, &pc.projector());
        prop_assert!((&p * &p - &p).norm() < 1e-12);
        prop_assert!((&p - p.transpose()).norm() < 1e-15);
    }
}
