//! Torpedo functions.
//!
//! `eta_{delta,lambda}` is defined through its derivative
//! `cos(r/delta) * mu(2 - 4r/(delta*pi))`. It is `delta*sin(r/delta)` up to
//! `pi*delta/4`, constant `C*delta` from `pi*delta/2` on, and tabulated for
//! `delta = 1` in between; other radii follow by scaling
//! `eta_delta(r) = delta * eta_1(r/delta)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use super::bump::bump_mu;
use super::quadrature::integrate;
use super::table::QuinticTable;
use super::Jet;
use crate::error::{Error, Result};

const TABLE_INTERVALS: usize = 2048;

fn unit_d1(x: f64) -> f64 {
    x.cos() * bump_mu(2.0 - 4.0 * x / PI).value
}

fn unit_d2(x: f64) -> f64 {
    let m = bump_mu(2.0 - 4.0 * x / PI);
    -x.sin() * m.value - (4.0 / PI) * x.cos() * m.d1
}

struct UnitTorpedo {
    table: QuinticTable,
    constant: f64,
}

fn unit() -> &'static UnitTorpedo {
    static UNIT: OnceLock<UnitTorpedo> = OnceLock::new();
    UNIT.get_or_init(|| {
        let h = FRAC_PI_4 / TABLE_INTERVALS as f64;
        let mut value = FRAC_PI_4.sin();
        let mut nodes = Vec::with_capacity(TABLE_INTERVALS + 1);
        for i in 0..=TABLE_INTERVALS {
            let x = FRAC_PI_4 + h * i as f64;
            if i > 0 {
                value +=
                    integrate(unit_d1, x - h, x, 1e-16).expect("torpedo derivative is smooth on each table interval");
            }
            nodes.push([value, unit_d1(x), unit_d2(x)]);
        }
        let constant = value;
        UnitTorpedo {
            table: QuinticTable::new(FRAC_PI_4, h, nodes),
            constant,
        }
    })
}

/// `C` with `eta_{delta,lambda}(pi*delta/2) = C*delta`, by adaptive
/// quadrature of the derivative law.
pub fn torpedo_constant(quad_tol: f64) -> Result<f64> {
    scaled_torpedo_constant(1.0, quad_tol)
}

/// `eta_delta(pi*delta/2) / delta` integrated at radius `delta` directly.
pub fn scaled_torpedo_constant(delta: f64, quad_tol: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!("delta = {delta}")));
    }
    let d1 = |r: f64| (r / delta).cos() * bump_mu(2.0 - 4.0 * r / (delta * PI)).value;
    let tail = integrate(d1, FRAC_PI_4 * delta, FRAC_PI_2 * delta, quad_tol * delta)?;
    Ok((delta * FRAC_PI_4.sin() + tail) / delta)
}

/// Tabulated constant used by the profile itself.
pub(crate) fn table_constant() -> f64 {
    unit().constant
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torpedo {
    pub delta: f64,
    pub lambda: f64,
}

impl Torpedo {
    pub fn new(delta: f64, lambda: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() || !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "torpedo needs delta > 0 and lambda >= 0, got ({delta}, {lambda})"
            )));
        }
        Ok(Self { delta, lambda })
    }

    /// Right end of the radial domain, `pi*delta/2 + lambda`.
    pub fn length(&self) -> f64 {
        FRAC_PI_2 * self.delta + self.lambda
    }

    /// Neck radius `C*delta`.
    pub fn neck_radius(&self) -> f64 {
        table_constant() * self.delta
    }

    pub fn jet(&self, r: f64) -> Jet {
        let d = self.delta;
        let x = r / d;
        if x <= FRAC_PI_4 {
            Jet {
                value: d * x.sin(),
                d1: x.cos(),
                d2: -x.sin() / d,
            }
        } else if x >= FRAC_PI_2 {
            Jet::constant(self.neck_radius())
        } else {
            Jet {
                value: d * unit().table.value(x),
                d1: unit_d1(x),
                d2: unit_d2(x) / d,
            }
        }
    }

    /// `1 - eta'^2` without cancellation on the spherical cap.
    pub fn slope_deficit(&self, r: f64) -> f64 {
        let x = r / self.delta;
        if x <= FRAC_PI_4 {
            x.sin().powi(2)
        } else {
            1.0 - unit_d1(x).powi(2)
        }
    }
}

/// `eta_{delta,lambda}(r)` with first and second derivative.
pub fn torpedo_eta(delta: f64, lambda: f64, r: f64) -> Result<Jet> {
    let t = Torpedo::new(delta, lambda)?;
    let hi = t.length();
    if !(r >= 0.0 && r <= hi) {
        return Err(Error::DomainError {
            what: "r",
            value: r,
            lo: 0.0,
            hi,
        });
    }
    Ok(t.jet(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_is_spherical() {
        let j = torpedo_eta(1.0, 0.0, FRAC_PI_4).unwrap();
        assert!((j.value - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table_is_continuous_at_cap_boundary() {
        let t = Torpedo::new(1.0, 0.0).unwrap();
        let below = t.jet(FRAC_PI_4 * (1.0 - 1e-12));
        let above = t.jet(FRAC_PI_4 * (1.0 + 1e-12));
        assert!((below.value - above.value).abs() < 1e-11);
        assert!((below.d1 - above.d1).abs() < 1e-11);
    }

    #[test]
    fn neck_matches_constant() {
        let c = torpedo_constant(1e-12).unwrap();
        assert!((table_constant() - c).abs() < 1e-12);
        let j = torpedo_eta(2.0, 1.0, PI + 0.5).unwrap();
        assert_eq!(j.value, 2.0 * table_constant());
        assert_eq!((j.d1, j.d2), (0.0, 0.0));
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(torpedo_eta(1.0, 0.0, 2.0), Err(Error::DomainError { .. })));
        assert!(torpedo_eta(0.0, 0.0, 0.1).is_err());
    }
}
