use std::f64::consts::PI;

use intercurv::constructions::{build_bend, build_toe};
use intercurv::geometry::MetricModel;
use intercurv::oracle::{chart_of, crosscheck, fd_christoffel, fd_riemann, fd_sectional, CrosscheckOptions};
use intercurv::profiles::WarpingProfile;
use intercurv::TwoVarProfile;

fn torpedo_toe(n: usize) -> MetricModel {
    build_toe(n, 1.0, 0.0, 0.0).unwrap()
}

#[test]
fn warped_sine_crosscheck() {
    let m = MetricModel::warped_line(3, WarpingProfile::sine(1.0).unwrap()).unwrap();
    let rep = crosscheck(&m, "sine", &CrosscheckOptions::default()).unwrap();
    assert!(rep.max_residual < 1e-6);
}

#[test]
fn toe_crosscheck() {
    let rep = crosscheck(&torpedo_toe(2), "toe", &CrosscheckOptions::default()).unwrap();
    assert!(rep.pass());
}

#[test]
fn bend_crosscheck() {
    let m = build_bend(2, 1.0, 3.0).unwrap();
    let rep = crosscheck(&m, "bend", &CrosscheckOptions::default()).unwrap();
    assert!(rep.pass(), "bend {:e}", rep.max_residual);
}

#[test]
fn multiply_warped_crosscheck() {
    let mu = WarpingProfile::mu((0.0, 1.0));
    let rho1 = WarpingProfile::linear(1.0, vec![(0.1, mu)], (0.0, 1.0));
    let rho2 = WarpingProfile::constant(1.0, (0.0, 1.0));
    let m = MetricModel::multiply_warped_line(vec![(2, rho1), (2, rho2)], (0.0, 1.0)).unwrap();
    let rep = crosscheck(&m, "mwl", &CrosscheckOptions::default()).unwrap();
    assert!(rep.pass());
}

#[test]
fn products_and_flat() {
    let m = MetricModel::product_of_spheres(vec![2, 3], vec![1.0, 2.0]).unwrap();
    let rep = crosscheck(&m, "prod", &CrosscheckOptions::default()).unwrap();
    assert!(rep.pass());
    let flat = MetricModel::two_d_warp(
        2,
        WarpingProfile::constant(1.0, (0.0, 1.0)),
        TwoVarProfile::constant(1.0, (0.0, 1.0), (0.0, 1.0)),
        (0.0, 1.0),
        (0.0, 1.0),
    )
    .unwrap();
    let chart = chart_of(&flat).unwrap();
    let x = [0.5, 0.5, PI / 2.0, 0.3];
    let r = fd_riemann(&chart, &x, 1e-4).unwrap();
    assert!(r.symmetry_residual() < 1e-7 && r.bianchi_residual() < 1e-7);
    let g = fd_christoffel(&chart, &x, 1e-4).unwrap();
    assert!(g.get(0, 2, 2).abs() < 1e-12 && g.get(3, 3, 2).abs() < 1e-9);
    let k = fd_sectional(&chart, &x, &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 1e-4).unwrap();
    assert!(k.abs() < 1e-10);
}

#[test]
fn plain_differences_are_second_order() {
    let m = MetricModel::warped_line(3, WarpingProfile::sine(1.0).unwrap()).unwrap();
    let run = |h: f64| {
        let opts = CrosscheckOptions {
            h,
            richardson: false,
            samples: 10,
            ..Default::default()
        };
        crosscheck(&m, "sine", &opts).unwrap().max_residual
    };
    let ratio = run(1e-3) / run(5e-4);
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn stencil_outside_chart_is_refused() {
    let m = MetricModel::warped_line(2, WarpingProfile::sine(1.0).unwrap()).unwrap();
    let chart = chart_of(&m).unwrap();
    assert!(matches!(
        fd_riemann(&chart, &[1e-5, 1.0, 0.5], 1e-3),
        Err(intercurv::Error::StencilOutOfDomain { .. })
    ));
    let assembly = intercurv::constructions::assemble_boot(intercurv::constructions::BootParams {
        n: 2,
        delta: 1.0,
        lambda: 5.0,
        l1: 1.0,
        l4: 1.0,
    })
    .unwrap();
    assert!(matches!(
        chart_of(&assembly),
        Err(intercurv::Error::UnsupportedModel(_))
    ));
}

#[test]
fn degenerate_pair_is_refused() {
    let m = MetricModel::unit_spheres(vec![3]).unwrap();
    let chart = chart_of(&m).unwrap();
    let v = [1.0, 0.0, 0.0];
    assert!(matches!(
        fd_sectional(&chart, &[1.0, 1.2, 0.3], &v, &v, 1e-4),
        Err(intercurv::Error::DegeneratePair)
    ));
}
