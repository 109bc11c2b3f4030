//! Uniform quintic Hermite tables.
//!
//! Nodes carry value, first and second derivative, so the interpolant is C²
//! and agrees with the tabulated jet at every node.

#[derive(Debug, Clone)]
pub struct QuinticTable {
    x0: f64,
    h: f64,
    nodes: Vec<[f64; 3]>,
}

impl QuinticTable {
    /// `nodes[i]` holds (f, f', f'') at `x0 + i*h`.
    pub fn new(x0: f64, h: f64, nodes: Vec<[f64; 3]>) -> Self {
        assert!(nodes.len() >= 2 && h > 0.0);
        Self { x0, h, nodes }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x_end(&self) -> f64 {
        self.x0 + self.h * (self.nodes.len() - 1) as f64
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    /// Interpolated value; clamps outside the tabulated range.
    pub fn value(&self, x: f64) -> f64 {
        self.jet(x)[0]
    }

    /// Interpolant value and its first two derivatives.
    pub fn jet(&self, x: f64) -> [f64; 3] {
        let last = self.nodes.len() - 1;
        let s = (x - self.x0) / self.h;
        if s <= 0.0 {
            return self.nodes[0];
        }
        if s >= last as f64 {
            return self.nodes[last];
        }
        let i = (s.floor() as usize).min(last - 1);
        let t = s - i as f64;
        let [f0, d0, s0] = self.nodes[i];
        let [f1, d1, s1] = self.nodes[i + 1];
        let h = self.h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let c = [f0, h * d0, h * h * s0, f1, h * d1, h * h * s1];
        let basis = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
        ];
        let dbasis = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4,
        ];
        let ddbasis = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            3.0 * t - 12.0 * t2 + 10.0 * t3,
        ];
        let dot = |b: &[f64; 6]| b.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>();
        [dot(&basis), dot(&dbasis) / h, dot(&ddbasis) / (h * h)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_quintic_polynomials() {
        let p = |x: f64| {
            [
                1.0 + x - 2.0 * x.powi(3) + 0.5 * x.powi(5),
                1.0 - 6.0 * x * x + 2.5 * x.powi(4),
                -12.0 * x + 10.0 * x.powi(3),
            ]
        };
        let h = 0.25;
        let nodes = (0..9).map(|i| p(-1.0 + h * i as f64)).collect();
        let tab = QuinticTable::new(-1.0, h, nodes);
        for k in 0..200 {
            let x = -1.0 + 2.0 * k as f64 / 199.0;
            let j = tab.jet(x);
            let e = p(x);
            assert!((j[0] - e[0]).abs() < 1e-13, "x = {x}");
            assert!((j[1] - e[1]).abs() < 1e-11, "x = {x}");
            assert!((j[2] - e[2]).abs() < 1e-9, "x = {x}");
        }
    }
}
