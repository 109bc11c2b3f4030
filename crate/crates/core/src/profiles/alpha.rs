//! The companion `alpha(r) = int_r^{b/2} sqrt(1 - beta'(u)^2) du`.

use std::cell::Cell;

use super::quadrature::integrate;
use super::table::QuinticTable;
use super::{Jet, WarpingProfile};
use crate::error::{Error, Result};

const INTERVALS: usize = 4096;
const SLOPE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AlphaTable {
    pub(crate) beta: WarpingProfile,
    pub(crate) table: QuinticTable,
    pub(crate) max_abs: f64,
}

impl AlphaTable {
    pub(crate) fn build(beta: &WarpingProfile, b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!("alpha needs b > 0, got {b}")));
        }
        let h = b / INTERVALS as f64;
        let violation: Cell<Option<(f64, f64)>> = Cell::new(None);
        let integrand = |u: f64| {
            let slope = beta.jet(u).d1.abs();
            if slope > 1.0 + SLOPE_SLACK && violation.get().is_none() {
                violation.set(Some((u, slope)));
            }
            beta.slope_deficit(u).max(0.0).sqrt()
        };
        let mut values = vec![0.0; INTERVALS + 1];
        let mid = INTERVALS / 2;
        for i in mid + 1..=INTERVALS {
            let piece = integrate(integrand, h * (i - 1) as f64, h * i as f64, 1e-15)?;
            values[i] = values[i - 1] - piece;
        }
        for i in (0..mid).rev() {
            let piece = integrate(integrand, h * i as f64, h * (i + 1) as f64, 1e-15)?;
            values[i] = values[i + 1] + piece;
        }
        for i in 0..=INTERVALS {
            let slope = beta.jet(h * i as f64).d1.abs();
            if slope > 1.0 + SLOPE_SLACK && violation.get().is_none() {
                violation.set(Some((h * i as f64, slope)));
            }
        }
        if let Some((r, slope)) = violation.get() {
            return Err(Error::SlopeViolation { r, slope });
        }
        let nodes: Vec<[f64; 3]> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let j = derivatives(beta, h * i as f64, b);
                [v, j.0, j.1]
            })
            .collect();
        let max_abs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(Self {
            beta: beta.clone(),
            table: QuinticTable::new(0.0, h, nodes),
            max_abs,
        })
    }

    pub(crate) fn jet(&self, r: f64, b: f64) -> Jet {
        let (d1, d2) = derivatives(&self.beta, r, b);
        Jet {
            value: self.table.value(r),
            d1,
            d2,
        }
    }
}

/// (alpha', alpha'') from the beta jet; alpha'' = beta' beta'' / sqrt(1 - beta'^2).
fn derivatives(beta: &WarpingProfile, r: f64, b: f64) -> (f64, f64) {
    let def = beta.slope_deficit(r).max(0.0);
    let root = def.sqrt();
    if root > 0.0 {
        let j = beta.jet(r);
        return (-root, j.d1 * j.d2 / root);
    }
    // |beta'| = 1 exactly: take the one-sided limit from a nudged point
    let eps = 1e-9 * b;
    let rn = if r < 0.5 * b { r + eps } else { r - eps };
    let def = beta.slope_deficit(rn).max(0.0);
    let j = beta.jet(rn);
    let d2 = if def > 0.0 { j.d1 * j.d2 / def.sqrt() } else { 0.0 };
    (0.0, d2)
}
