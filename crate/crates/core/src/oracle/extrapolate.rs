//! Richardson extrapolation of `ε`-sequences by least-squares fitting of
//! `L + Σ cₖ εᵏ (+ dₖ εᵏ log ε)`.

use num_complex::Complex64;

/// Result of extrapolating a sequence `(εᵢ, vᵢ)`.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    /// Extrapolants using the first 2, 3, … levels.
    pub extrapolants: Vec<Complex64>,
    pub value: Complex64,
    /// `|T_last − T_prev|`.
    pub error_indicator: f64,
}

fn basis(eps: f64, scale: f64, with_log: bool, count: usize) -> Vec<f64> {
    let x = eps / scale;
    let l = eps.ln();
    let mut out = vec![1.0];
    let mut k = 1;
    while out.len() < count {
        out.push(x.powi(k));
        if with_log && out.len() < count {
            out.push(x.powi(k) * l);
        }
        k += 1;
    }
    out
}

/// Solves `M c = rhs` for square `M` by Gaussian elimination with partial
/// pivoting; returns the first unknown.
fn solve_first(mut m: Vec<Vec<f64>>, mut rhs: Vec<Complex64>) -> Complex64 {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).expect("non-empty");
        m.swap(col, piv);
        rhs.swap(col, piv);
        let d = m[col][col];
        if d == 0.0 {
            continue;
        }
        for row in col + 1..n {
            let f = m[row][col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            let r = rhs[col] * f;
            rhs[row] -= r;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in row + 1..n {
            s -= x[k] * m[row][k];
        }
        x[row] = if m[row][row] == 0.0 { Complex64::new(0.0, 0.0) } else { s / m[row][row] };
    }
    x[0]
}

/// Extrapolates `ε → 0`. `eps` must be strictly decreasing. Each extrapolant
/// interpolates the most recent levels with as many basis functions as
/// there are points.
pub fn richardson(eps: &[f64], values: &[Complex64], with_log: bool) -> Extrapolation {
    assert_eq!(eps.len(), values.len());
    let n = eps.len();
    if n == 0 {
        return Extrapolation { extrapolants: vec![], value: Complex64::new(0.0, 0.0), error_indicator: f64::INFINITY };
    }
    if n == 1 {
        return Extrapolation { extrapolants: vec![values[0]], value: values[0], error_indicator: f64::INFINITY };
    }
    let scale = eps[0];
    let mut extrapolants = Vec::new();
    for used in 2..=n {
        let m: Vec<Vec<f64>> = eps[..used].iter().map(|&e| basis(e, scale, with_log, used)).collect();
        extrapolants.push(solve_first(m, values[..used].to_vec()));
    }
    let value = *extrapolants.last().expect("n ≥ 2");
    let error_indicator = if extrapolants.len() >= 2 {
        (extrapolants[extrapolants.len() - 1] - extrapolants[extrapolants.len() - 2]).norm()
    } else {
        (values[1] - values[0]).norm()
    };
    Extrapolation { extrapolants, value, error_indicator }
}

/// Geometric sequence `ε₀ rᵏ`, `k < levels`.
pub fn geometric(eps0: f64, ratio: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| eps0 * ratio.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_power_and_log_terms() {
        let eps = geometric(0.1, 0.25, 6);
        let f = |e: f64| Complex64::new(2.0 + 3.0 * e - e * e, 1.0 + 0.5 * e);
        let v: Vec<_> = eps.iter().map(|&e| f(e)).collect();
        let r = richardson(&eps, &v, false);
        assert!((r.value - Complex64::new(2.0, 1.0)).norm() < 1e-12);
        let g = |e: f64| Complex64::new(1.0 + e * e.ln() + 2.0 * e, 0.0);
        let v: Vec<_> = eps.iter().map(|&e| g(e)).collect();
        let r = richardson(&eps, &v, true);
        assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-9, "{}", r.value);
        assert!(r.error_indicator < 1e-8);
    }
}
