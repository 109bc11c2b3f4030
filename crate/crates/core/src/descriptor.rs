//! Versioned TOML run descriptions, so every CLI run can be replayed.
//!
//! ```toml
//! version = 1
//!
//! [model]
//! family = "torpedo"
//! n = 2
//! delta = 1.0
//!
//! [certify]
//! p = 1
//! grid = "64x32"
//! ```

use serde::{Deserialize, Serialize};

use crate::concordance::MetricPath;
use crate::constructions::{
    assemble_boot, boot_cross_sphere, build_bend, build_toe, build_torpedo, build_torpedo_cylinder, BootParams,
};
use crate::error::{Error, Result};
use crate::geometry::{MetricModel, Region, RegionAssembly};
use crate::oracle::{CrosscheckOptions, CROSSCHECK_H, DEFAULT_MAX_DIM};
use crate::positivity::{CertifyOptions, GridSpec, Strategy, DEFAULT_RESTARTS, DEFAULT_TOL};
use crate::profiles::{TwoVarProfile, WarpingProfile};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescriptor {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, rename = "Lambda", skip_serializing_if = "Option::is_none")]
    pub big_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l4: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Radii at the start and end of a path (`round-path`, `product-path`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    #[serde(default)]
    pub p: usize,
    #[serde(default = "default_grid")]
    pub grid: String,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_strategy")]
    pub strategy: String,
}

fn default_grid() -> String {
    "64x32".into()
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}
fn default_strategy() -> String {
    "both".into()
}

impl Default for CertifySection {
    fn default() -> Self {
        Self {
            p: 0,
            grid: default_grid(),
            tol: default_tol(),
            seed: 0,
            restarts: default_restarts(),
            strategy: default_strategy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckSection {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_cc_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_true")]
    pub richardson: bool,
}

fn default_h() -> f64 {
    CROSSCHECK_H
}
fn default_cc_tol() -> f64 {
    1e-5
}
fn default_samples() -> usize {
    50
}
fn default_true() -> bool {
    true
}

impl Default for CrosscheckSection {
    fn default() -> Self {
        Self {
            h: default_h(),
            tol: default_cc_tol(),
            samples: default_samples(),
            richardson: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSection {
    /// Flip the sign of `beta''` in every radial warping function.
    #[serde(default)]
    pub flip_d2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub model: ModelDescriptor,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub crosscheck: CrosscheckSection,
    #[serde(default)]
    pub fault: FaultSection,
}

/// What a descriptor builds: a metric, or a path of metrics.
#[derive(Debug, Clone)]
pub enum Built {
    Model(MetricModel),
    Path(MetricPath),
}

pub fn parse_grid(s: &str) -> Result<GridSpec> {
    let bad = || Error::Config(format!("grid must look like 64x32, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nr: usize = a.trim().parse().map_err(|_| bad())?;
    let nt: usize = b.trim().parse().map_err(|_| bad())?;
    if nr == 0 || nt == 0 {
        return Err(bad());
    }
    Ok(GridSpec { nr, nt })
}

pub fn parse_strategy(s: &str) -> Result<Strategy> {
    match s {
        "both" => Ok(Strategy::Both),
        "structured" => Ok(Strategy::Structured),
        "random-restart" | "random" => Ok(Strategy::RandomRestart),
        _ => Err(Error::Config(format!("unknown strategy {s:?}"))),
    }
}

impl ModelDescriptor {
    pub fn new(family: &str) -> Self {
        Self {
            family: family.into(),
            n: None,
            m: None,
            delta: None,
            lambda: None,
            big_lambda: None,
            lambda2: None,
            length: None,
            l1: None,
            l4: None,
            dims: None,
            radii: None,
            start: None,
            end: None,
        }
    }

    fn req<T: Copy>(&self, v: Option<T>, key: &str) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("family {} needs `{key}`", self.family)))
    }

    /// Short id used in reports.
    pub fn id(&self) -> String {
        let mut s = self.family.clone();
        for (k, v) in [
            ("n", self.n.map(|x| x as f64)),
            ("m", self.m.map(|x| x as f64)),
            ("delta", self.delta),
            ("lambda", self.lambda),
            ("Lambda", self.big_lambda),
        ] {
            if let Some(v) = v {
                s.push_str(&format!(" {k}={v}"));
            }
        }
        if let Some(d) = &self.dims {
            s.push_str(&format!(" dims={d:?}"));
        }
        s
    }

    pub fn build(&self) -> Result<Built> {
        let delta = || self.delta.unwrap_or(1.0);
        let lambda = || self.lambda.unwrap_or(0.0);
        let model = match self.family.as_str() {
            "torpedo" => build_torpedo(self.req(self.n, "n")?, delta(), lambda())?,
            "torpedo-cylinder" => {
                build_torpedo_cylinder(self.req(self.n, "n")?, delta(), lambda(), self.length.unwrap_or(1.0))?
            }
            "toe" => build_toe(self.req(self.n, "n")?, delta(), lambda(), self.lambda2.unwrap_or(0.0))?,
            "bend" => build_bend(self.req(self.n, "n")?, delta(), self.req(self.big_lambda, "Lambda")?)?,
            "boot" | "boot-sphere" => {
                let params = BootParams {
                    n: self.req(self.n, "n")?,
                    delta: delta(),
                    lambda: self.req(self.big_lambda, "Lambda")?,
                    l1: self.l1.unwrap_or(1.0),
                    l4: self.l4.unwrap_or(1.0),
                };
                if self.family == "boot" {
                    assemble_boot(params)?
                } else {
                    boot_cross_sphere(params, self.req(self.m, "m")?)?
                }
            }
            "product-spheres" => {
                let dims = self
                    .dims
                    .clone()
                    .ok_or_else(|| Error::Config("product-spheres needs `dims`".into()))?;
                let radii = self.radii.clone().unwrap_or_else(|| vec![1.0; dims.len()]);
                MetricModel::product_of_spheres(dims, radii)?
            }
            "round-sphere" => MetricModel::warped_line(self.req(self.n, "n")?, WarpingProfile::sine(delta())?)?,
            "flat-cylinder" => {
                let n = self.req(self.n, "n")?;
                let rd = (0.0, self.length.unwrap_or(1.0));
                MetricModel::two_d_warp(
                    n,
                    WarpingProfile::constant(delta(), rd),
                    TwoVarProfile::constant(1.0, rd, rd),
                    rd,
                    rd,
                )?
            }
            "round-path" => {
                let (a, b) = self.path_ends()?;
                return Ok(Built::Path(MetricPath::round(self.req(self.n, "n")?, a[0], b[0])?));
            }
            "product-path" => {
                let dims = self
                    .dims
                    .clone()
                    .ok_or_else(|| Error::Config("product-path needs `dims`".into()))?;
                let (a, b) = self.path_ends()?;
                return Ok(Built::Path(MetricPath::product(dims, &a, &b)?));
            }
            other => return Err(Error::Config(format!("unknown model family {other:?}"))),
        };
        Ok(Built::Model(model))
    }

    fn path_ends(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let a = self
            .start
            .clone()
            .ok_or_else(|| Error::Config("path needs `start`".into()))?;
        let b = self
            .end
            .clone()
            .ok_or_else(|| Error::Config("path needs `end`".into()))?;
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Config("`start` and `end` must be equally long".into()));
        }
        Ok((a, b))
    }
}

/// Replaces every radial warping function by one with flipped `beta''`.
pub fn inject_flip_d2(model: MetricModel) -> MetricModel {
    match model {
        MetricModel::WarpedLine {
            fiber_dim,
            beta,
            r_domain,
        } => MetricModel::WarpedLine {
            fiber_dim,
            beta: beta.with_flipped_d2(),
            r_domain,
        },
        MetricModel::TwoDWarp {
            fiber_dim,
            beta,
            omega,
            r_domain,
            t_domain,
        } => MetricModel::TwoDWarp {
            fiber_dim,
            beta: beta.with_flipped_d2(),
            omega,
            r_domain,
            t_domain,
        },
        MetricModel::SphereProduct { base, sphere_dim } => MetricModel::SphereProduct {
            base: Box::new(inject_flip_d2(*base)),
            sphere_dim,
        },
        MetricModel::RegionAssembly(asm) => MetricModel::RegionAssembly(RegionAssembly {
            regions: asm
                .regions
                .into_iter()
                .map(|r| Region {
                    name: r.name,
                    model: inject_flip_d2(r.model),
                })
                .collect(),
            interfaces: asm.interfaces,
        }),
        other => other,
    }
}

impl RunConfig {
    pub fn new(model: ModelDescriptor) -> Self {
        Self {
            version: CONFIG_VERSION,
            model,
            certify: CertifySection::default(),
            crosscheck: CrosscheckSection::default(),
            fault: FaultSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn certify_options(&self) -> Result<CertifyOptions> {
        if !(self.certify.tol >= 0.0) {
            return Err(Error::Config(format!("tol must be >= 0, got {}", self.certify.tol)));
        }
        Ok(CertifyOptions {
            grid: parse_grid(&self.certify.grid)?,
            tol: self.certify.tol,
            seed: self.certify.seed,
            strategy: parse_strategy(&self.certify.strategy)?,
            restarts: self.certify.restarts,
        })
    }

    pub fn crosscheck_options(&self) -> Result<CrosscheckOptions> {
        let c = &self.crosscheck;
        if !(c.h > 0.0) || !(c.tol > 0.0) || c.samples == 0 {
            return Err(Error::Config("crosscheck needs h > 0, tol > 0, samples > 0".into()));
        }
        Ok(CrosscheckOptions {
            samples: c.samples,
            h: c.h,
            tol: c.tol,
            seed: self.certify.seed,
            richardson: c.richardson,
            max_dim: DEFAULT_MAX_DIM,
        })
    }

    /// The model (or path) with any configured fault applied.
    pub fn build(&self) -> Result<Built> {
        match self.model.build()? {
            Built::Model(m) if self.fault.flip_d2 => Ok(Built::Model(inject_flip_d2(m))),
            other => Ok(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut d = ModelDescriptor::new("bend");
        d.n = Some(2);
        d.big_lambda = Some(4.0);
        let cfg = RunConfig::new(d);
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
        assert!(cfg.to_toml().contains("Lambda = 4.0"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::from_toml("version = 2\n[model]\nfamily='torpedo'"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_toml("version = 1\n[model]\nfamly='x'"),
            Err(Error::Config(_))
        ));
        assert!(parse_grid("64by32").is_err());
        assert_eq!(parse_grid("8x4").unwrap(), GridSpec { nr: 8, nt: 4 });
    }
}
