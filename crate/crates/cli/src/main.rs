//! `intercurv` command-line front end.
//!
//! Exit codes: `certify` 0 positive / 1 nonpositive / 2 inconclusive;
//! `crosscheck` 0 pass / 1 fail; 3 exhausted search; 64 configuration
//! error; 70 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use intercurv::concordance::{build_concordance, find_c};
use intercurv::constructions::search_bend_lambda_capped;
use intercurv::curvature::sectional_curve;
use intercurv::descriptor::{Built, ModelDescriptor, RunConfig};
use intercurv::oracle::crosscheck;
use intercurv::positivity::certify;
use intercurv::report;
use intercurv::{Error, MetricModel};

const EXIT_EXHAUSTED: u8 = 3;
const EXIT_CONFIG: u8 = 64;
const EXIT_NUMERIC: u8 = 70;

#[derive(Parser, Debug)]
#[command(
    name = "intercurv",
    version,
    about = "Intermediate scalar curvature of warped-product metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify positivity of s_{p,n} over a grid and the Grassmannian.
    Certify(Common),
    /// Compare closed-form curvatures with the finite-difference oracle.
    Crosscheck {
        #[command(flatten)]
        common: Common,
        /// Finite-difference step.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Search for a construction parameter.
    Search {
        kind: SearchKind,
        #[command(flatten)]
        common: Common,
        /// Cap on the doublings of the bend radius search.
        #[arg(long, default_value_t = 20)]
        max_doublings: usize,
    },
    /// Write plot data as CSV.
    Curves {
        what: CurveKind,
        #[command(flatten)]
        common: Common,
        /// Number of samples along the curve.
        #[arg(long, default_value_t = 513)]
        points: usize,
        /// Fixed t for `sectionals` (defaults to the middle of the t range).
        #[arg(long)]
        t: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SearchKind {
    BendLambda,
    ConcordanceC,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CurveKind {
    Profile,
    Sectionals,
    MinS,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fault {
    FlipD2,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run description; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model family (torpedo, torpedo-cylinder, toe, bend, boot, boot-sphere,
    /// product-spheres, round-sphere, flat-cylinder, round-path, product-path).
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "Lambda")]
    big_lambda: Option<f64>,
    /// Sphere factor dimensions, e.g. 2,2.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Path start radii, e.g. 1,1.
    #[arg(long, value_delimiter = ',')]
    start: Option<Vec<f64>>,
    /// Path end radii, e.g. 2,1.
    #[arg(long, value_delimiter = ',')]
    end: Option<Vec<f64>>,
    /// Grid as NRxNT.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    fault: Option<Fault>,
}

enum Failure {
    Config(String),
    Numeric(String),
    Exhausted(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidParams(_)
            | Error::InvalidP { .. }
            | Error::InvalidL(_)
            | Error::LambdaTooSmall { .. }
            | Error::UnsupportedModel(_) => Failure::Config(e.to_string()),
            Error::SearchExhausted(_) => Failure::Exhausted(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("{}: {e}", path.display()))
}

impl Common {
    fn run_config(&self) -> Result<RunConfig, Failure> {
        self.run_config_or(None)
    }

    /// As `run_config`, with a family to fall back on when neither
    /// `--model` nor `--config` is given.
    fn run_config_or(&self, default_family: Option<&str>) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
                RunConfig::from_toml(&text)?
            }
            None => {
                let family = self
                    .model
                    .clone()
                    .or(default_family.map(String::from))
                    .ok_or_else(|| Failure::Config("give --model or --config".into()))?;
                RunConfig::new(ModelDescriptor::new(&family))
            }
        };
        let m = &mut cfg.model;
        if let Some(f) = &self.model {
            m.family = f.clone();
        }
        macro_rules! set {
            ($field:ident, $src:expr) => {
                if let Some(v) = $src.clone() {
                    m.$field = Some(v);
                }
            };
        }
        set!(n, self.n);
        set!(m, self.m);
        set!(delta, self.delta);
        set!(lambda, self.lambda);
        set!(big_lambda, self.big_lambda);
        set!(dims, self.dims);
        set!(start, self.start);
        set!(end, self.end);
        let c = &mut cfg.certify;
        if let Some(p) = self.p {
            c.p = p;
        }
        if let Some(g) = &self.grid {
            c.grid = g.clone();
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.tol {
            c.tol = t;
        }
        if let Some(Fault::FlipD2) = self.fault {
            cfg.fault.flip_d2 = true;
        }
        Ok(cfg)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.out {
            fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| io_failure(&path, e))?;
        }
        Ok(())
    }
}

fn model_of(built: Built) -> Result<MetricModel, Failure> {
    match built {
        Built::Model(m) => Ok(m),
        Built::Path(_) => Err(Failure::Config("this command needs a metric, not a path".into())),
    }
}

fn cmd_certify(common: &Common) -> Result<u8, Failure> {
    let cfg = common.run_config()?;
    let opts = cfg.certify_options()?;
    let id = cfg.model.id();
    common.write("config.toml", &cfg.to_toml())?;
    let cert = match cfg.build()? {
        Built::Model(model) => certify(&model, &id, cfg.certify.p, &opts)?,
        Built::Path(path) => {
            let conc = build_concordance(&path, cfg.certify.p, &opts)?;
            common.write("concordance.txt", &report::concordance_text(&conc))?;
            print!("{}", report::concordance_text(&conc));
            conc.certificate
        }
    };
    let text = report::certificate_text(&cert);
    common.write("certificate.txt", &text)?;
    common.write("certificate.csv", &report::certificate_csv(&cert))?;
    print!("{text}");
    Ok(cert.verdict.exit_code() as u8)
}

fn cmd_crosscheck(common: &Common, h: Option<f64>, samples: Option<usize>) -> Result<u8, Failure> {
    let mut cfg = common.run_config()?;
    if let Some(h) = h {
        cfg.crosscheck.h = h;
    }
    if let Some(s) = samples {
        cfg.crosscheck.samples = s;
    }
    if let Some(t) = common.tol {
        cfg.crosscheck.tol = t;
    }
    let opts = cfg.crosscheck_options()?;
    let model = match cfg.build()? {
        Built::Model(m) => m,
        Built::Path(path) => path.cylinder(&intercurv::WarpingProfile::mu_l(2.0)?)?,
    };
    let rep = crosscheck(&model, &cfg.model.id(), &opts)?;
    let text = report::crosscheck_text(&rep);
    common.write("config.toml", &cfg.to_toml())?;
    common.write("crosscheck.txt", &text)?;
    common.write("crosscheck.csv", &report::crosscheck_csv(&rep))?;
    print!("{text}");
    Ok(if rep.pass() { 0 } else { 1 })
}

fn cmd_search(kind: SearchKind, common: &Common, max_doublings: usize) -> Result<u8, Failure> {
    let cfg = common.run_config_or(match kind {
        SearchKind::BendLambda => Some("bend"),
        SearchKind::ConcordanceC => None,
    })?;
    let opts = cfg.certify_options()?;
    let p = cfg.certify.p;
    let text = match kind {
        SearchKind::BendLambda => {
            let n = cfg
                .model
                .n
                .ok_or_else(|| Failure::Config("bend-lambda needs --n".into()))?;
            let delta = cfg.model.delta.unwrap_or(1.0);
            let s = search_bend_lambda_capped(n, delta, p, &opts, max_doublings)?;
            let mut t = format!("# intercurv search v{}\nkind = bend-lambda\n", report::REPORT_VERSION);
            for (lambda, min, verdict) in &s.history {
                t.push_str(&format!(
                    "tried = {} {} {}\n",
                    report::fmt_f64(*lambda),
                    report::fmt_f64(*min),
                    verdict.name()
                ));
            }
            t.push_str(&format!("Lambda = {}\n", report::fmt_f64(s.lambda)));
            t
        }
        SearchKind::ConcordanceC => {
            let Built::Path(path) = cfg.build()? else {
                return Err(Failure::Config(
                    "concordance-c needs a round-path or product-path model".into(),
                ));
            };
            let s = find_c(&path, p, &opts)?;
            let mut t = format!("# intercurv search v{}\nkind = concordance-c\n", report::REPORT_VERSION);
            for (c, ok) in &s.history {
                t.push_str(&format!("tried = {} {ok}\n", report::fmt_f64(*c)));
            }
            t.push_str(&format!("C = {}\n", report::fmt_f64(s.c)));
            t
        }
    };
    common.write("config.toml", &cfg.to_toml())?;
    common.write("search.txt", &text)?;
    print!("{text}");
    Ok(0)
}

fn radial_beta(model: &MetricModel) -> Option<&intercurv::WarpingProfile> {
    match model {
        MetricModel::WarpedLine { beta, .. } | MetricModel::TwoDWarp { beta, .. } => Some(beta),
        MetricModel::SphereProduct { base, .. } => radial_beta(base),
        _ => None,
    }
}

fn cmd_curves(what: CurveKind, common: &Common, points: usize, t: Option<f64>) -> Result<u8, Failure> {
    let cfg = common.run_config()?;
    if points < 2 {
        return Err(Failure::Config("--points must be at least 2".into()));
    }
    let built = cfg.build()?;
    let (name, csv) = match what {
        CurveKind::Profile => {
            let rows = match &built {
                Built::Model(m) => radial_beta(m)
                    .ok_or_else(|| Failure::Config(format!("{} has no radial profile", m.family())))?
                    .curve(points),
                Built::Path(p) => p.radii[0].curve(points),
            };
            ("profile.csv", report::profile_csv(&rows))
        }
        CurveKind::Sectionals => {
            let model = model_of(built)?;
            let t = t.unwrap_or(match &model {
                MetricModel::TwoDWarp { t_domain, .. } => 0.5 * (t_domain.0 + t_domain.1),
                _ => 0.0,
            });
            (
                "sectionals.csv",
                report::sectionals_csv(&sectional_curve(&model, t, points)?),
            )
        }
        CurveKind::MinS => {
            let opts = cfg.certify_options()?;
            let cert = match built {
                Built::Model(m) => certify(&m, &cfg.model.id(), cfg.certify.p, &opts)?,
                Built::Path(path) => build_concordance(&path, cfg.certify.p, &opts)?.certificate,
            };
            let rows = report::min_profile(&cert);
            ("min-s.csv", report::numeric_csv(["coordinate", "min"], &rows))
        }
    };
    common.write(name, &csv)?;
    if common.out.is_none() {
        print!("{csv}");
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let threads = match &cli.command {
        Command::Certify(c) => c.threads,
        Command::Crosscheck { common, .. } | Command::Search { common, .. } | Command::Curves { common, .. } => {
            common.threads
        }
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Certify(c) => cmd_certify(c),
        Command::Crosscheck { common, h, samples } => cmd_crosscheck(common, *h, *samples),
        Command::Search {
            kind,
            common,
            max_doublings,
        } => cmd_search(*kind, common, *max_doublings),
        Command::Curves {
            what,
            common,
            points,
            t,
        } => cmd_curves(*what, common, *points, *t),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("intercurv: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("intercurv: numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Exhausted(msg)) => {
            eprintln!("intercurv: {msg}");
            ExitCode::from(EXIT_EXHAUSTED)
        }
    }
}
