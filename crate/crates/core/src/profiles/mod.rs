//! Scalar warping profiles with analytic first and second derivatives.

mod alpha;
pub mod bump;
mod omega;
pub mod quadrature;
pub mod table;
pub mod torpedo;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
pub use alpha::AlphaTable;
pub use bump::{bump_mu, mu_derivative_bounds, mu_l};
pub use omega::{bend_omega, check_derivatives_2d, toe_omega, Jet2, TwoVarProfile};
pub use torpedo::{torpedo_constant, torpedo_eta, Torpedo};

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            d1: 0.0,
            d2: 0.0,
        }
    }
}

#[derive(Debug)]
enum Kind {
    Constant(f64),
    /// delta * sin(r / delta)
    Sine(f64),
    /// a + b r
    Affine(f64, f64),
    Torpedo(Torpedo),
    Mu,
    MuL(f64),
    /// inner(scale * r + shift)
    Arg {
        inner: WarpingProfile,
        scale: f64,
        shift: f64,
    },
    /// offset + sum of c_k * profile_k
    Linear {
        offset: f64,
        terms: Vec<(f64, WarpingProfile)>,
    },
    /// outer(inner(r))
    Compose {
        outer: WarpingProfile,
        inner: WarpingProfile,
    },
    Alpha(AlphaTable),
    Table(table::QuinticTable),
    /// Fault injection: the second derivative reported with the wrong sign.
    FlipD2(WarpingProfile),
}

/// A one-variable profile on a closed domain.
#[derive(Clone)]
pub struct WarpingProfile {
    kind: Arc<Kind>,
    domain: (f64, f64),
    positivity_floor: f64,
}

impl fmt::Debug for WarpingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WarpingProfile({} on [{}, {}])",
            self.describe(),
            self.domain.0,
            self.domain.1
        )
    }
}

impl WarpingProfile {
    fn make(kind: Kind, domain: (f64, f64), positivity_floor: f64) -> Self {
        Self {
            kind: Arc::new(kind),
            domain,
            positivity_floor,
        }
    }

    pub fn constant(c: f64, domain: (f64, f64)) -> Self {
        Self::make(Kind::Constant(c), domain, c.max(0.0))
    }

    /// `delta * sin(r / delta)` on `[0, pi*delta]`.
    pub fn sine(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParams(format!("sine radius {delta}")));
        }
        Ok(Self::make(Kind::Sine(delta), (0.0, PI * delta), 0.0))
    }

    pub fn affine(a: f64, b: f64, domain: (f64, f64)) -> Self {
        let lo = (a + b * domain.0).min(a + b * domain.1).max(0.0);
        Self::make(Kind::Affine(a, b), domain, lo)
    }

    /// The torpedo function `eta_{delta,lambda}` on `[0, pi*delta/2 + lambda]`.
    pub fn torpedo(delta: f64, lambda: f64) -> Result<Self> {
        let t = Torpedo::new(delta, lambda)?;
        Ok(Self::make(Kind::Torpedo(t), (0.0, t.length()), 0.0))
    }

    pub fn mu(domain: (f64, f64)) -> Self {
        Self::make(Kind::Mu, domain, 0.0)
    }

    /// `mu_L` on `[0, L + 2]`.
    pub fn mu_l(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidL(l));
        }
        Ok(Self::make(Kind::MuL(l), (0.0, l + 2.0), 0.0))
    }

    /// `self(scale * r + shift)` on `domain`.
    pub fn reparam(&self, scale: f64, shift: f64, domain: (f64, f64)) -> Self {
        Self::make(
            Kind::Arg {
                inner: self.clone(),
                scale,
                shift,
            },
            domain,
            self.positivity_floor,
        )
    }

    /// `self(b - r)` on `[0, b]`.
    pub fn reversed(&self, b: f64) -> Self {
        self.reparam(-1.0, b, (0.0, b))
    }

    /// `offset + sum c_k * p_k` on `domain`.
    pub fn linear(offset: f64, terms: Vec<(f64, WarpingProfile)>, domain: (f64, f64)) -> Self {
        Self::make(Kind::Linear { offset, terms }, domain, 0.0)
    }

    /// `self(inner(r))`, carrying the domain of `inner`.
    pub fn compose(&self, inner: &WarpingProfile) -> Self {
        Self::make(
            Kind::Compose {
                outer: self.clone(),
                inner: inner.clone(),
            },
            inner.domain,
            self.positivity_floor,
        )
    }

    /// Quintic Hermite interpolation of tabulated `(value, d1, d2)` samples.
    pub fn tabulated(x0: f64, h: f64, nodes: Vec<[f64; 3]>) -> Result<Self> {
        if nodes.len() < 2 || !(h > 0.0) {
            return Err(Error::InvalidParams("table needs two nodes and h > 0".into()));
        }
        let end = x0 + h * (nodes.len() - 1) as f64;
        Ok(Self::make(
            Kind::Table(table::QuinticTable::new(x0, h, nodes)),
            (x0, end),
            0.0,
        ))
    }

    /// Injects a sign error into the second derivative.
    pub fn with_flipped_d2(&self) -> Self {
        Self::make(Kind::FlipD2(self.clone()), self.domain, self.positivity_floor)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn positivity_floor(&self) -> f64 {
        self.positivity_floor
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.positivity_floor = floor;
        self
    }

    /// Maximum of |alpha| when this profile came from [`alpha_from_beta`].
    pub fn alpha_max_abs(&self) -> Option<f64> {
        match &*self.kind {
            Kind::Alpha(a) => Some(a.max_abs),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &*self.kind {
            Kind::Constant(c) => format!("const({c})"),
            Kind::Sine(d) => format!("sine(delta={d})"),
            Kind::Affine(a, b) => format!("affine({a}+{b}r)"),
            Kind::Torpedo(t) => format!("torpedo(delta={},lambda={})", t.delta, t.lambda),
            Kind::Mu => "mu".into(),
            Kind::MuL(l) => format!("mu_L(L={l})"),
            Kind::Arg { inner, scale, shift } => {
                format!("{}({scale}r+{shift})", inner.describe())
            }
            Kind::Linear { offset, terms } => {
                let parts: Vec<String> = terms.iter().map(|(c, p)| format!("{c}*{}", p.describe())).collect();
                format!("{offset}+{}", parts.join("+"))
            }
            Kind::Compose { outer, inner } => {
                format!("{}∘{}", outer.describe(), inner.describe())
            }
            Kind::Alpha(a) => format!("alpha[{}]", a.beta.describe()),
            Kind::Table(_) => "table".into(),
            Kind::FlipD2(p) => format!("flip_d2[{}]", p.describe()),
        }
    }

    /// Jet at `r` without a domain check.
    pub fn jet(&self, r: f64) -> Jet {
        match &*self.kind {
            Kind::Constant(c) => Jet::constant(*c),
            Kind::Sine(d) => {
                let x = r / d;
                Jet {
                    value: d * x.sin(),
                    d1: x.cos(),
                    d2: -x.sin() / d,
                }
            }
            Kind::Affine(a, b) => Jet {
                value: a + b * r,
                d1: *b,
                d2: 0.0,
            },
            Kind::Torpedo(t) => t.jet(r),
            Kind::Mu => bump_mu(r),
            Kind::MuL(l) => bump::mu_l_unchecked(*l, r),
            Kind::Arg { inner, scale, shift } => {
                let j = inner.jet(scale * r + shift);
                Jet {
                    value: j.value,
                    d1: scale * j.d1,
                    d2: scale * scale * j.d2,
                }
            }
            Kind::Linear { offset, terms } => {
                let mut out = Jet::constant(*offset);
                for (c, p) in terms {
                    let j = p.jet(r);
                    out.value += c * j.value;
                    out.d1 += c * j.d1;
                    out.d2 += c * j.d2;
                }
                out
            }
            Kind::Compose { outer, inner } => {
                let i = inner.jet(r);
                let o = outer.jet(i.value);
                Jet {
                    value: o.value,
                    d1: o.d1 * i.d1,
                    d2: o.d2 * i.d1 * i.d1 + o.d1 * i.d2,
                }
            }
            Kind::Alpha(a) => a.jet(r, self.domain.1),
            Kind::Table(t) => table_jet(t, r),
            Kind::FlipD2(p) => {
                let j = p.jet(r);
                Jet { d2: -j.d2, ..j }
            }
        }
    }

    /// Jet at `r`, rejecting points outside the domain.
    pub fn eval(&self, r: f64) -> Result<Jet> {
        let (lo, hi) = self.domain;
        let slack = 1e-12 * (1.0 + (hi - lo).abs());
        if !(r >= lo - slack && r <= hi + slack) {
            return Err(Error::DomainError {
                what: "r",
                value: r,
                lo,
                hi,
            });
        }
        Ok(self.jet(r))
    }

    /// `1 - (d1)^2`, computed without cancellation where the family allows.
    pub fn slope_deficit(&self, r: f64) -> f64 {
        match &*self.kind {
            Kind::Sine(d) => (r / d).sin().powi(2),
            Kind::Torpedo(t) => t.slope_deficit(r),
            Kind::Arg { inner, scale, shift } if scale.abs() == 1.0 => inner.slope_deficit(scale * r + shift),
            Kind::FlipD2(p) => p.slope_deficit(r),
            _ => 1.0 - self.jet(r).d1.powi(2),
        }
    }

    /// Samples `(r, value, d1, d2)` on `n` equispaced points of the domain.
    pub fn curve(&self, n: usize) -> Vec<[f64; 4]> {
        let (lo, hi) = self.domain;
        (0..n)
            .map(|i| {
                let r = if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                let j = self.jet(r);
                [r, j.value, j.d1, j.d2]
            })
            .collect()
    }
}

fn table_jet(t: &table::QuinticTable, r: f64) -> Jet {
    let [value, d1, d2] = t.jet(r);
    Jet { value, d1, d2 }
}

/// `alpha(r) = int_r^{b/2} sqrt(1 - beta'(u)^2) du` on `[0, b]`.
pub fn alpha_from_beta(beta: &WarpingProfile, b: f64) -> Result<WarpingProfile> {
    let table = AlphaTable::build(beta, b)?;
    Ok(WarpingProfile::make(Kind::Alpha(table), (0.0, b), f64::NEG_INFINITY))
}

/// Worst disagreement between analytic and central-difference derivatives.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeCheck {
    pub max_err_d1: f64,
    pub max_err_d2: f64,
    pub tol: f64,
}

impl DerivativeCheck {
    pub fn pass(&self) -> bool {
        self.max_err_d1 <= self.tol && self.max_err_d2 <= self.tol
    }
}

/// Error measure `|analytic - fd| / max(1, |analytic|)`.
fn scaled_err(analytic: f64, fd: f64) -> f64 {
    (analytic - fd).abs() / analytic.abs().max(1.0)
}

/// Compares d1 against central differences of the value and d2 against
/// central differences of d1 (step `1e-5`) at `samples` random interior points.
pub fn check_derivatives(p: &WarpingProfile, samples: usize, seed: u64) -> DerivativeCheck {
    let h = 1e-5;
    let (lo, hi) = p.domain;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DerivativeCheck {
        max_err_d1: 0.0,
        max_err_d2: 0.0,
        tol: 1e-6,
    };
    for _ in 0..samples {
        let r = rng.random_range(lo + 2.0 * h..hi - 2.0 * h);
        let j = p.jet(r);
        let (a, b) = (p.jet(r + h), p.jet(r - h));
        out.max_err_d1 = out.max_err_d1.max(scaled_err(j.d1, (a.value - b.value) / (2.0 * h)));
        out.max_err_d2 = out.max_err_d2.max(scaled_err(j.d2, (a.d1 - b.d1) / (2.0 * h)));
    }
    out
}
