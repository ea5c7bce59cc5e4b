//! Tanh-sinh quadrature on panels.

use std::f64::consts::FRAC_PI_2;

/// Double-exponential rule on `[-1, 1]`: nodes and weights.
#[derive(Clone, Debug)]
pub struct TanhSinh {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `1 - |x|` for each node, kept separately so that endpoints are not
    /// rounded onto the boundary.
    gaps: Vec<f64>,
}

impl TanhSinh {
    /// `order` half-steps on each side of the origin; `2·order + 1` nodes.
    pub fn new(order: usize) -> Self {
        let order = order.max(2);
        let tmax = 4.0;
        let h = tmax / order as f64;
        let mut nodes = Vec::with_capacity(2 * order + 1);
        let mut weights = Vec::with_capacity(2 * order + 1);
        let mut gaps = Vec::with_capacity(2 * order + 1);
        for k in -(order as i64)..=(order as i64) {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let ch = u.cosh();
            let x = u.tanh();
            // 1 - tanh(u) = 2 / (1 + e^{2u})
            let gap = 2.0 / (1.0 + (2.0 * u.abs()).exp());
            nodes.push(x);
            gaps.push(gap);
            weights.push(h * FRAC_PI_2 * t.cosh() / (ch * ch));
        }
        TanhSinh { nodes, weights, gaps }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        if b <= a {
            return 0.0;
        }
        let half = 0.5 * (b - a);
        let mut sum = 0.0;
        for ((&x, &w), &g) in self.nodes.iter().zip(&self.weights).zip(&self.gaps) {
            let p = if x < 0.0 { a + half * g } else { b - half * g };
            if p <= a || p >= b {
                continue;
            }
            sum += w * f(p);
        }
        sum * half
    }

    /// Nodes and weights of the rule on `[a, b]` split at the interior
    /// breakpoints.
    pub fn panel_nodes(&self, a: f64, b: f64, breaks: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for w in panel_edges(a, b, breaks).windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let half = 0.5 * (hi - lo);
            for ((&x, &wt), &g) in self.nodes.iter().zip(&self.weights).zip(&self.gaps) {
                let p = if x < 0.0 { lo + half * g } else { hi - half * g };
                if p > lo && p < hi {
                    out.push((p, wt * half));
                }
            }
        }
        out
    }

    /// `∫_a^b f` split at the given interior breakpoints.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, breaks: &[f64], mut f: F) -> f64 {
        panel_edges(a, b, breaks).windows(2).map(|w| self.integrate(w[0], w[1], &mut f)).sum()
    }
}

fn panel_edges(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    pts
}

/// Mean of a `2π`-periodic function over `n` equally spaced samples.
pub fn periodic_mean<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> f64 {
    let step = std::f64::consts::TAU / n as f64;
    (0..n).map(|k| f(k as f64 * step)).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_endpoint_singularities() {
        let q = TanhSinh::new(30);
        assert!((q.integrate(0.0, 2.0, |x| x * x) - 8.0 / 3.0).abs() < 1e-13);
        let got = q.integrate(0.0, 1.0, |x| 1.0 / x.sqrt());
        assert!((got - 2.0).abs() < 1e-10, "{got}");
        let got = q.integrate_panels(0.0, 2.0, &[1.0], |x| (x - 1.0).abs());
        assert!((got - 1.0).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let m = periodic_mean(16, |t| (3.0 * t).cos().powi(2));
        assert!((m - 0.5).abs() < 1e-15);
    }
}
