use intercurv::descriptor::{parse_grid, parse_strategy, Built, ModelDescriptor, RunConfig};
use intercurv::oracle::crosscheck;
use intercurv::positivity::{GridSpec, Strategy};
use intercurv::Error;

const FULL: &str = r#"
version = 1

[model]
family = "boot"
n = 3
delta = 0.5
Lambda = 6.0
l1 = 1.0
l4 = 2.0

[certify]
p = 1
grid = "32x16"
tol = 1e-8
seed = 9
restarts = 4
strategy = "structured"

[crosscheck]
h = 2e-3
samples = 10
"#;

#[test]
fn full_config_parses() {
    let cfg = RunConfig::from_toml(FULL).unwrap();
    assert_eq!(cfg.model.big_lambda, Some(6.0));
    let opts = cfg.certify_options().unwrap();
    assert_eq!(opts.grid, GridSpec { nr: 32, nt: 16 });
    assert_eq!(opts.strategy, Strategy::Structured);
    assert_eq!(opts.seed, 9);
    assert_eq!(cfg.crosscheck_options().unwrap().samples, 10);
    assert!(matches!(cfg.build().unwrap(), Built::Model(_)));
    let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn bad_configs_are_config_errors() {
    let cases = [
        FULL.replace("version = 1", "version = 2"),
        FULL.replace("l4 = 2.0", "l4 = 2.0\nwidth = 3"),
        FULL.replace("32x16", "32by16"),
        FULL.replace("structured", "annealing"),
        FULL.replace("tol = 1e-8", "tol = -1.0"),
        "version = 1".to_string(),
    ];
    for text in &cases {
        let err = RunConfig::from_toml(text).and_then(|c| c.certify_options().map(|_| ()));
        assert!(matches!(err, Err(Error::Config(_))), "{text}");
    }
}

#[test]
fn grid_and_strategy_parsing() {
    assert_eq!(parse_grid("8x1").unwrap(), GridSpec { nr: 8, nt: 1 });
    assert!(parse_grid("0x4").is_err());
    assert!(parse_grid("x").is_err());
    assert_eq!(parse_strategy("both").unwrap(), Strategy::Both);
}

#[test]
fn every_family_builds() {
    let d = |family: &str| {
        let mut m = ModelDescriptor::new(family);
        m.n = Some(2);
        m.m = Some(2);
        m.big_lambda = Some(5.0);
        m.dims = Some(vec![2, 2]);
        m.radii = Some(vec![1.0, 2.0]);
        m.start = Some(vec![1.0, 1.0]);
        m.end = Some(vec![2.0, 1.0]);
        m
    };
    for family in [
        "torpedo",
        "torpedo-cylinder",
        "toe",
        "bend",
        "boot",
        "boot-sphere",
        "product-spheres",
        "round-sphere",
        "flat-cylinder",
    ] {
        assert!(matches!(d(family).build(), Ok(Built::Model(_))), "{family}");
    }
    let mut round = d("round-path");
    round.start = Some(vec![1.0]);
    round.end = Some(vec![2.0]);
    assert!(matches!(round.build(), Ok(Built::Path(_))));
    assert!(matches!(d("product-path").build(), Ok(Built::Path(_))));
    assert!(matches!(ModelDescriptor::new("torpedo").build(), Err(Error::Config(_))));
    assert!(matches!(d("klein-bottle").build(), Err(Error::Config(_))));
}

#[test]
fn flipped_second_derivative_fails_crosscheck() {
    let mut cfg = RunConfig::from_toml(FULL).unwrap();
    cfg.model = ModelDescriptor::new("toe");
    cfg.model.n = Some(2);
    let clean = match cfg.build().unwrap() {
        Built::Model(m) => m,
        Built::Path(_) => unreachable!(),
    };
    cfg.fault.flip_d2 = true;
    let faulty = match cfg.build().unwrap() {
        Built::Model(m) => m,
        Built::Path(_) => unreachable!(),
    };
    let opts = cfg.crosscheck_options().unwrap();
    assert!(crosscheck(&clean, "toe", &opts).unwrap().pass());
    assert!(!crosscheck(&faulty, "toe", &opts).unwrap().pass());
}
