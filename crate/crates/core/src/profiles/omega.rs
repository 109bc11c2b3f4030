//! Two-variable warping functions `omega(r, t)` for the toe and bend.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bump_mu, DerivativeCheck, WarpingProfile};
use crate::error::{Error, Result};

/// `omega` with the partials the curvature formulas consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub dr: f64,
    pub dt: f64,
    pub drr: f64,
}

#[derive(Debug)]
enum Kind {
    Constant(f64),
    Toe { alpha: WarpingProfile, shift: f64 },
    Bend { lambda: f64, alpha: WarpingProfile },
}

#[derive(Clone)]
pub struct TwoVarProfile {
    kind: Arc<Kind>,
    r_domain: (f64, f64),
    t_domain: (f64, f64),
}

impl fmt::Debug for TwoVarProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &*self.kind {
            Kind::Constant(c) => format!("const({c})"),
            Kind::Toe { shift, .. } => format!("toe(shift={shift})"),
            Kind::Bend { lambda, .. } => format!("bend(Lambda={lambda})"),
        };
        write!(f, "TwoVarProfile({name})")
    }
}

/// Blend weight of the toe: 1 off the bend, 0 on `t in [0, pi/2]`.
fn toe_weight(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        let m = bump_mu(-t);
        (m.value, -m.d1)
    } else if t >= FRAC_PI_2 {
        let m = bump_mu(t - FRAC_PI_2);
        (m.value, m.d1)
    } else {
        (0.0, 0.0)
    }
}

/// Plateau height of the bend: 1 near the ends, `Lambda` in the middle.
fn bend_base(lambda: f64, t: f64) -> (f64, f64) {
    let up = bump_mu(2.0 * (t + 2.0));
    let down = bump_mu(2.0 * (t - FRAC_PI_2 - 1.5));
    (
        1.0 + (lambda - 1.0) * (up.value - down.value),
        (lambda - 1.0) * 2.0 * (up.d1 - down.d1),
    )
}

/// Weight of `alpha` in the bend: 1 on `[0, pi/2]`, 0 outside `(-1/2, pi/2 + 1/2)`.
fn bend_weight(t: f64) -> (f64, f64) {
    let a = bump_mu(2.0 * t + 1.0);
    let b = bump_mu(1.0 - 2.0 * (t - FRAC_PI_2));
    (a.value * b.value, 2.0 * a.d1 * b.value - 2.0 * a.value * b.d1)
}

impl TwoVarProfile {
    pub fn constant(c: f64, r_domain: (f64, f64), t_domain: (f64, f64)) -> Self {
        Self {
            kind: Arc::new(Kind::Constant(c)),
            r_domain,
            t_domain,
        }
    }

    pub fn r_domain(&self) -> (f64, f64) {
        self.r_domain
    }

    pub fn t_domain(&self) -> (f64, f64) {
        self.t_domain
    }

    /// Same profile on a different rectangle; the formulas extend past the
    /// nominal ends as constants.
    pub fn with_domains(mut self, r_domain: (f64, f64), t_domain: (f64, f64)) -> Self {
        self.r_domain = r_domain;
        self.t_domain = t_domain;
        self
    }

    pub fn is_constant(&self) -> bool {
        matches!(&*self.kind, Kind::Constant(_))
    }

    /// Lower bound of the value over the domain.
    pub fn floor(&self) -> f64 {
        match &*self.kind {
            Kind::Constant(c) => *c,
            Kind::Toe { .. } => 1.0,
            Kind::Bend { lambda, alpha } => {
                let amax = alpha.alpha_max_abs().unwrap_or(0.0);
                (lambda - amax).min(1.0)
            }
        }
    }

    pub fn jet(&self, r: f64, t: f64) -> Jet2 {
        match &*self.kind {
            Kind::Constant(c) => Jet2 {
                value: *c,
                dr: 0.0,
                dt: 0.0,
                drr: 0.0,
            },
            Kind::Toe { alpha, shift } => {
                let (m, dm) = toe_weight(t);
                let a = alpha.jet(r);
                let av = a.value + shift;
                Jet2 {
                    value: m + (1.0 - m) * av,
                    dr: (1.0 - m) * a.d1,
                    dt: dm * (1.0 - av),
                    drr: (1.0 - m) * a.d2,
                }
            }
            Kind::Bend { lambda, alpha } => {
                let (base, dbase) = bend_base(*lambda, t);
                let (w, dw) = bend_weight(t);
                let a = alpha.jet(r);
                Jet2 {
                    value: base + w * a.value,
                    dr: w * a.d1,
                    dt: dbase + dw * a.value,
                    drr: w * a.d2,
                }
            }
        }
    }
}

/// Toe warping function on `[0, b] x [-2, pi/2 + 2]`:
/// 1 for `t <= -1` and `t >= pi/2 + 1`, `alpha` on `[0, pi/2]`, and
/// `mu(-t) + (1 - mu(-t)) alpha` style blends in between.
///
/// `alpha` is raised by `1 - min(alpha)` so that the profile maps into
/// `[1, inf)`; only its value moves, all r-derivatives are those of `alpha`.
pub fn toe_omega(alpha: &WarpingProfile) -> TwoVarProfile {
    let (lo, hi) = alpha.domain();
    let min = alpha.jet(lo).value.min(alpha.jet(hi).value);
    TwoVarProfile {
        kind: Arc::new(Kind::Toe {
            alpha: alpha.clone(),
            shift: 1.0 - min,
        }),
        r_domain: (lo, hi),
        t_domain: (-2.0, FRAC_PI_2 + 2.0),
    }
}

/// Bend warping function on `[0, b] x [-3, pi/2 + 3]`: 1 at both ends,
/// `Lambda` on the flanking plateaus and `Lambda + alpha(r)` on `[0, pi/2]`,
/// joined by `mu` transitions.
pub fn bend_omega(lambda: f64, alpha: &WarpingProfile) -> Result<TwoVarProfile> {
    let (lo, hi) = alpha.domain();
    let amax = match alpha.alpha_max_abs() {
        Some(m) => m,
        None => (0..=4096)
            .map(|i| alpha.jet(lo + (hi - lo) * i as f64 / 4096.0).value.abs())
            .fold(0.0, f64::max),
    };
    if !(lambda > amax) {
        return Err(Error::LambdaTooSmall {
            lambda,
            alpha_max: amax,
        });
    }
    Ok(TwoVarProfile {
        kind: Arc::new(Kind::Bend {
            lambda,
            alpha: alpha.clone(),
        }),
        r_domain: (lo, hi),
        t_domain: (-3.0, FRAC_PI_2 + 3.0),
    })
}

/// Per-variable derivative consistency of a two-variable profile:
/// `dr`, `dt` against central differences of the value, `drr` against
/// central differences of `dr`.
pub fn check_derivatives_2d(p: &TwoVarProfile, samples: usize, seed: u64) -> DerivativeCheck {
    let h = 1e-5;
    let (r0, r1) = p.r_domain;
    let (t0, t1) = p.t_domain;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let err = |a: f64, fd: f64| (a - fd).abs() / a.abs().max(1.0);
    let mut out = DerivativeCheck {
        max_err_d1: 0.0,
        max_err_d2: 0.0,
        tol: 1e-6,
    };
    for _ in 0..samples {
        let r = rng.random_range(r0 + 2.0 * h..r1 - 2.0 * h);
        let t = rng.random_range(t0 + 2.0 * h..t1 - 2.0 * h);
        let j = p.jet(r, t);
        let (rp, rm) = (p.jet(r + h, t), p.jet(r - h, t));
        let (tp, tm) = (p.jet(r, t + h), p.jet(r, t - h));
        let e1 = err(j.dr, (rp.value - rm.value) / (2.0 * h)).max(err(j.dt, (tp.value - tm.value) / (2.0 * h)));
        out.max_err_d1 = out.max_err_d1.max(e1);
        out.max_err_d2 = out.max_err_d2.max(err(j.drr, (rp.dr - rm.dr) / (2.0 * h)));
    }
    out
}
