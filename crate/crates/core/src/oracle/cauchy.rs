//! Holomorphic derivatives at the origin by discrete Cauchy transforms.
//!
//! For a function `g` smooth near `0` the contour mean
//! `(k!/2π) ∫ g(ρe^{iθ}) ρ^{-k} e^{-ikθ} dθ` tends to `∂ᵏg(0)` as `ρ → 0`,
//! with corrections in powers of `ρ²`. The mean is computed with the
//! trapezoidal rule and the radius is swept geometrically, followed by
//! Richardson extrapolation in `ρ²`.

use num_complex::Complex64;

/// Parameters of the contour evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CauchySpec {
    /// Sample points on each circle.
    pub points: usize,
    /// Largest radius.
    pub radius: f64,
    /// Radius ratio between consecutive circles.
    pub ratio: f64,
    /// Number of circles.
    pub levels: usize,
}

impl Default for CauchySpec {
    fn default() -> Self {
        CauchySpec { points: 64, radius: 0.2, ratio: 0.5, levels: 4 }
    }
}

/// Trapezoidal contour coefficient on a single circle of radius `rho`.
pub fn contour_coefficient<F: Fn(Complex64) -> Complex64>(g: &F, k: usize, rho: f64, points: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let th = std::f64::consts::TAU * j as f64 / points as f64;
        let z = Complex64::from_polar(rho, th);
        sum += g(z) * Complex64::from_polar(1.0, -(k as f64) * th);
    }
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    sum * fact / (points as f64 * rho.powi(k as i32))
}

/// `∂ᵏg(0)` by the radius sweep plus Richardson extrapolation in `ρ²`.
pub fn derivative_at_zero<F: Fn(Complex64) -> Complex64>(g: &F, k: usize, spec: &CauchySpec) -> Complex64 {
    let mut table: Vec<Complex64> = Vec::with_capacity(spec.levels);
    let q2 = spec.ratio * spec.ratio;
    for l in 0..spec.levels {
        let rho = spec.radius * spec.ratio.powi(l as i32);
        let mut v = contour_coefficient(g, k, rho, spec.points);
        // Neville-style elimination of ρ², ρ⁴, …
        let mut factor = 1.0;
        for prev in table.iter_mut() {
            factor *= q2;
            let next = (v - *prev * factor) / (1.0 - factor);
            *prev = v;
            v = next;
        }
        table.push(v);
    }
    *table.last().expect("at least one level")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let g = |z: Complex64| z * z * z * 2.0 + z * 3.0 + 1.0;
        let spec = CauchySpec::default();
        let d1 = derivative_at_zero(&g, 1, &spec);
        let d3 = derivative_at_zero(&g, 3, &spec);
        assert!((d1 - 3.0).norm() < 1e-12);
        assert!((d3 - 12.0).norm() < 1e-10);
    }

    #[test]
    fn smooth_non_holomorphic() {
        // ∂(t e^{|t|²}) at 0 is 1.
        let g = |z: Complex64| z * (z.norm_sqr()).exp();
        let d = derivative_at_zero(&g, 1, &CauchySpec::default());
        assert!((d - 1.0).norm() < 1e-9, "{d}");
    }
}
