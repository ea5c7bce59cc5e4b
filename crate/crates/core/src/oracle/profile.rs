//! Smooth cutoff profiles: the radial bump of test forms and the
//! approximands `χ` of the characteristic function of `[1, ∞)`.
//! Derivatives of every order come from truncated Taylor jets.

use serde::Serialize;

/// Truncated Taylor series `Σ c_k x^k`, `k ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(order: usize, c: f64) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// `x0 + slope·x`.
    pub fn variable(order: usize, x0: f64, slope: f64) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = x0;
        if order > 0 {
            v[1] = slope;
        }
        Jet(v)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut v = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(v)
    }

    pub fn recip(&self) -> Jet {
        let n = self.0.len();
        let mut v = vec![0.0; n];
        v[0] = 1.0 / self.0[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.0[j] * v[k - j]).sum();
            v[k] = -s * v[0];
        }
        Jet(v)
    }

    pub fn exp(&self) -> Jet {
        let n = self.0.len();
        let mut v = vec![0.0; n];
        v[0] = self.0[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.0[j] * v[k - j]).sum();
            v[k] = s / k as f64;
        }
        Jet(v)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        self.0.get(k).copied().unwrap_or(0.0) * fact
    }
}

/// `exp(-1/x)` for `x > 0`, zero otherwise.
fn flat(x: &Jet) -> Jet {
    if x.0[0] <= 0.0 {
        return Jet::constant(x.order(), 0.0);
    }
    x.recip().scale(-1.0).exp()
}

/// Smooth step `S(x)`: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn smooth_step(x: &Jet) -> Jet {
    let n = x.order();
    if x.0[0] <= 0.0 {
        return Jet::constant(n, 0.0);
    }
    if x.0[0] >= 1.0 {
        return Jet::constant(n, 1.0);
    }
    let a = flat(x);
    let b = flat(&Jet::constant(n, 1.0).add(&x.scale(-1.0)));
    a.mul(&a.add(&b).recip())
}

/// Radial bump `φ(s)`, `s = |t|²`: equal to 1 for `s ≤ a`, 0 for `s ≥ b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
}

impl Bump {
    /// Plateau radius `r0` and support radius `r1` in `|t|`.
    pub fn from_radii(r0: f64, r1: f64) -> Self {
        assert!(0.0 < r0 && r0 < r1, "bump radii must satisfy 0 < r0 < r1");
        Bump { a: r0 * r0, b: r1 * r1 }
    }

    /// `φ^{(k)}(s)`.
    pub fn eval(&self, s: f64, k: usize) -> f64 {
        if s <= self.a {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if s >= self.b {
            return 0.0;
        }
        let w = self.b - self.a;
        let x = Jet::variable(k, (self.b - s) / w, -1.0 / w);
        smooth_step(&x).derivative(k)
    }
}

impl Default for Bump {
    fn default() -> Self {
        Bump::from_radii(0.5, 1.0)
    }
}

/// Approximand `χ` with transition on `[1, 2]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiProfile {
    /// `6x⁵ − 15x⁴ + 10x³` with `x = u − 1`.
    #[default]
    Poly5,
    /// The exp-type smooth step `S(u − 1)`.
    Exp,
}

impl ChiProfile {
    /// `χ^{(k)}(u)` for `k ≤ 1` with the polynomial profile, any `k` with
    /// the exp profile.
    pub fn eval(&self, u: f64, k: usize) -> f64 {
        if u <= 1.0 {
            return 0.0;
        }
        if u >= 2.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        let x = u - 1.0;
        match self {
            ChiProfile::Poly5 => match k {
                0 => x * x * x * (10.0 + x * (-15.0 + 6.0 * x)),
                1 => 30.0 * x * x * (1.0 - x) * (1.0 - x),
                2 => 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x),
                _ => panic!("polynomial profile supports at most two derivatives"),
            },
            ChiProfile::Exp => smooth_step(&Jet::variable(k, x, 1.0)).derivative(k),
        }
    }
}

impl std::str::FromStr for ChiProfile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "poly5" => Ok(ChiProfile::Poly5),
            "exp" => Ok(ChiProfile::Exp),
            other => Err(format!("unknown profile `{other}`")),
        }
    }
}
