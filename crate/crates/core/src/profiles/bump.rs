//! The cutoff `mu` and its rescaled ramps.

use std::sync::OnceLock;

use super::Jet;
use crate::error::{Error, Result};

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`,
/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})` in between.
pub fn bump_mu(t: f64) -> Jet {
    if t <= 0.0 {
        return Jet::constant(0.0);
    }
    if t >= 1.0 {
        return Jet::constant(1.0);
    }
    // mu = sigmoid(-u) with u = 1/t - 1/(1-t).
    let u = 1.0 / t - 1.0 / (1.0 - t);
    let e = (-u.abs()).exp();
    let (s, one_minus_2s) = if u > 0.0 {
        (e / (1.0 + e), (1.0 - e) / (1.0 + e))
    } else {
        (1.0 / (1.0 + e), (e - 1.0) / (1.0 + e))
    };
    if e == 0.0 {
        return Jet::constant(s.round());
    }
    let ss = e / ((1.0 + e) * (1.0 + e));
    let w = 1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t));
    let dw = -2.0 / (t * t * t) + 2.0 / ((1.0 - t).powi(3));
    Jet {
        value: s,
        d1: ss * w,
        d2: ss * (one_minus_2s * w * w + dw),
    }
}

/// `mu((t - 1) / L)`, a ramp from 0 at `t = 1` to 1 at `t = L + 1`.
pub fn mu_l(l: f64, t: f64) -> Result<Jet> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidL(l));
    }
    Ok(mu_l_unchecked(l, t))
}

pub(crate) fn mu_l_unchecked(l: f64, t: f64) -> Jet {
    let j = bump_mu((t - 1.0) / l);
    Jet {
        value: j.value,
        d1: j.d1 / l,
        d2: j.d2 / (l * l),
    }
}

/// (sup|mu'|, sup|mu''|) over a 10^6-point grid of [0, 1], computed once.
pub fn mu_derivative_bounds() -> (f64, f64) {
    static BOUNDS: OnceLock<(f64, f64)> = OnceLock::new();
    *BOUNDS.get_or_init(|| {
        let n = 1_000_000;
        let mut m1 = 0.0_f64;
        let mut m2 = 0.0_f64;
        for i in 0..=n {
            let j = bump_mu(i as f64 / n as f64);
            m1 = m1.max(j.d1.abs());
            m2 = m2.max(j.d2.abs());
        }
        (m1, m2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert_eq!(bump_mu(0.0).value, 0.0);
        assert_eq!(bump_mu(1.0).value, 1.0);
        assert!((bump_mu(0.5).value - 0.5).abs() < 1e-16);
        // at the midpoint s(1-s) = 1/4 and w = 8
        assert!((bump_mu(0.5).d1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn flat_near_ends() {
        for t in [1e-3, 1e-2, 0.999, 0.9999] {
            let j = bump_mu(t);
            assert!(j.d1.abs() < 1e-30 || (t > 0.01 && t < 0.99));
            assert!(j.d2.is_finite());
        }
        let tiny = bump_mu(1e-300);
        assert_eq!((tiny.value, tiny.d1, tiny.d2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn mu_l_rejects_nonpositive_length() {
        assert_eq!(mu_l(0.0, 1.0), Err(Error::InvalidL(0.0)));
        assert!(mu_l(-2.0, 1.0).is_err());
    }

    #[test]
    fn derivative_bounds_include_midpoint_slope() {
        let (m1, m2) = mu_derivative_bounds();
        assert!((m1 - 2.0).abs() < 1e-9, "sup mu' = {m1}");
        assert!(m2 > 2.0 && m2.is_finite());
    }
}
