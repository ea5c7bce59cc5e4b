//! Test forms: polynomial coefficients times per-variable radial bumps,
//! closed under ∂ and ∂̄.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::current::Current;
use crate::form::{parity, Basis, SmoothForm};
use crate::monomial::VarContext;
use crate::oracle::profile::Bump;

/// `t^α t̄^β ∏ⱼ φⱼ^{(kⱼ)}(|tⱼ|²)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TfMonomial {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    /// Derivative order of each variable's bump.
    pub k: Vec<u32>,
}

/// A compactly supported smooth form `Σ_{I,J} gᵢⱼ dt_I ∧ dt̄_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestForm {
    ctx: VarContext,
    bumps: Vec<Bump>,
    comps: BTreeMap<Basis, BTreeMap<TfMonomial, Complex64>>,
}

impl TestForm {
    /// The zero form with the given bump per variable.
    pub fn zero(ctx: VarContext, bumps: Vec<Bump>) -> Self {
        assert_eq!(bumps.len(), ctx.dim(), "one bump per variable");
        TestForm { ctx, bumps, comps: BTreeMap::new() }
    }

    /// The zero form with the default bump in every variable.
    pub fn zero_default(ctx: VarContext) -> Self {
        TestForm::zero(ctx, vec![Bump::default(); ctx.dim()])
    }

    /// `β · ∏ⱼ φⱼ(|tⱼ|²)` for a polynomial form `β`.
    pub fn from_form(form: &SmoothForm, bumps: Vec<Bump>) -> Self {
        let mut f = TestForm::zero(form.ctx(), bumps);
        for (basis, poly) in form.components() {
            for (key, c) in poly.terms() {
                f.add_term(*basis, c.to_complex(), key.hol.clone(), key.anti.clone());
            }
        }
        f
    }

    /// `φ(|t|²) dt_I ∧ dt̄_J`.
    pub fn bump_form(ctx: VarContext, bumps: Vec<Bump>, basis: Basis) -> Self {
        let n = ctx.dim();
        let mut f = TestForm::zero(ctx, bumps);
        f.add_term(basis, Complex64::new(1.0, 0.0), vec![0; n], vec![0; n]);
        f
    }

    pub fn ctx(&self) -> VarContext {
        self.ctx
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn components(&self) -> impl Iterator<Item = (&Basis, &BTreeMap<TfMonomial, Complex64>)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Adds `c t^α t̄^β φ(|t|²) · basis`.
    pub fn add_term(&mut self, basis: Basis, c: Complex64, alpha: Vec<u32>, beta: Vec<u32>) {
        let n = self.ctx.dim();
        self.add_mono(basis, TfMonomial { alpha, beta, k: vec![0; n] }, c);
    }

    pub fn add_mono(&mut self, basis: Basis, m: TfMonomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let comp = self.comps.entry(basis).or_default();
        let e = comp.entry(m.clone()).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            comp.remove(&m);
            if comp.is_empty() {
                self.comps.remove(&basis);
            }
        }
    }

    pub fn add(&self, other: &TestForm) -> TestForm {
        assert_eq!(self.bumps, other.bumps, "test forms with different bumps");
        let mut out = self.clone();
        for (b, comp) in other.components() {
            for (m, c) in comp {
                out.add_mono(*b, m.clone(), *c);
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> TestForm {
        let mut out = TestForm::zero(self.ctx, self.bumps.clone());
        for (b, comp) in self.components() {
            for (m, c) in comp {
                out.add_mono(*b, m.clone(), c * s);
            }
        }
        out
    }

    /// Degrees present.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.comps.keys().map(Basis::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `β ∧ ψ` for a polynomial form `β`.
    pub fn wedge_left(&self, beta: &SmoothForm) -> TestForm {
        let mut out = TestForm::zero(self.ctx, self.bumps.clone());
        for (bb, bp) in beta.components() {
            for (b, comp) in self.components() {
                let Some((basis, odd)) = bb.wedge(b) else { continue };
                for (pk, pc) in bp.terms() {
                    let pc = pc.to_complex();
                    for (m, c) in comp {
                        let mono = TfMonomial {
                            alpha: m.alpha.iter().zip(&pk.hol).map(|(a, b)| a + b).collect(),
                            beta: m.beta.iter().zip(&pk.anti).map(|(a, b)| a + b).collect(),
                            k: m.k.clone(),
                        };
                        let v = c * pc;
                        out.add_mono(basis, mono, if odd { -v } else { v });
                    }
                }
            }
        }
        out
    }

    /// ∂̄ψ.
    pub fn dbar(&self) -> TestForm {
        self.differentiate(true)
    }

    /// ∂ψ.
    pub fn del(&self) -> TestForm {
        self.differentiate(false)
    }

    fn differentiate(&self, anti: bool) -> TestForm {
        let n = self.ctx.dim();
        let mut out = TestForm::zero(self.ctx, self.bumps.clone());
        for (b, comp) in self.components() {
            for j in 0..n {
                let d = if anti { Basis::new(0, 1 << j) } else { Basis::new(1 << j, 0) };
                let Some((basis, odd)) = d.wedge(b) else { continue };
                let sign = if odd { -1.0 } else { 1.0 };
                for (m, c) in comp {
                    // ∂/∂t̄ⱼ (t^α t̄^β φ^{(k)}(tⱼt̄ⱼ)) = β t^α t̄^{β−1} φ^{(k)} + t^{α+1} t̄^β φ^{(k+1)}
                    let (own, other) = if anti { (&m.beta, &m.alpha) } else { (&m.alpha, &m.beta) };
                    if own[j] > 0 {
                        let mut o = own.clone();
                        o[j] -= 1;
                        let mono = if anti {
                            TfMonomial { alpha: other.clone(), beta: o, k: m.k.clone() }
                        } else {
                            TfMonomial { alpha: o, beta: other.clone(), k: m.k.clone() }
                        };
                        out.add_mono(basis, mono, c * sign * f64::from(own[j]));
                    }
                    let mut p = other.clone();
                    p[j] += 1;
                    let mut k = m.k.clone();
                    k[j] += 1;
                    let mono = if anti {
                        TfMonomial { alpha: p, beta: own.clone(), k }
                    } else {
                        TfMonomial { alpha: own.clone(), beta: p, k }
                    };
                    out.add_mono(basis, mono, c * sign);
                }
            }
        }
        out
    }

    /// Coefficient of `basis` at the point `t`.
    pub fn eval(&self, basis: &Basis, t: &[Complex64]) -> Complex64 {
        let Some(comp) = self.comps.get(basis) else { return Complex64::new(0.0, 0.0) };
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, c) in comp {
            let mut v = *c;
            for j in 0..t.len() {
                v *= t[j].powu(m.alpha[j]) * t[j].conj().powu(m.beta[j]);
                v *= self.bumps[j].eval(t[j].norm_sqr(), m.k[j] as usize);
            }
            sum += v;
        }
        sum
    }

    /// A random test form of pure degree with small random polynomial
    /// coefficients on every basis element of bidegree `(p, q)`.
    pub fn random<R: Rng>(ctx: VarContext, p: usize, q: usize, rng: &mut R, bumps: Vec<Bump>) -> Self {
        let n = ctx.dim();
        let mut f = TestForm::zero(ctx, bumps);
        for dt in 0u32..(1 << n) {
            if dt.count_ones() as usize != p {
                continue;
            }
            for dtb in 0u32..(1 << n) {
                if dtb.count_ones() as usize != q {
                    continue;
                }
                for _ in 0..3 {
                    let alpha: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                    let beta: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    f.add_term(Basis::new(dt, dtb), c, alpha, beta);
                }
            }
        }
        f
    }
}

impl TestForm {
    /// A test form of complementary degree to `target` whose monomials are
    /// chosen so that every term of `target` survives angular selection:
    /// for each term one monomial per term with a random coefficient.
    pub fn matching<R: Rng>(target: &Current, rng: &mut R, bumps: Vec<Bump>) -> Self {
        let ctx = target.ctx();
        let n = ctx.dim();
        let full = (1u32 << n) - 1;
        let mut f = TestForm::zero(ctx, bumps);
        for (key, poly) in target.terms() {
            let res = key.res_mask();
            let basis = Basis::new(full & !key.basis.dt, full & !key.basis.dtb & !res);
            for (pk, _) in poly.terms() {
                let mut alpha = vec![0; n];
                let mut beta = vec![0; n];
                for j in 0..n {
                    let a = pk.hol[j] as i64 - key.pv_power(j).unwrap_or(0) as i64;
                    let b = pk.anti[j] as i64;
                    if let Some(m) = key.res_power(j) {
                        alpha[j] = (m as i64 - 1 - a).max(0) as u32;
                    } else {
                        // t^{a+α} t̄^{b+β} is radial iff a + α = b + β
                        let lift: i64 = rng.gen_range(0..2);
                        let base = (a - b).max(0) + lift;
                        beta[j] = base as u32;
                        alpha[j] = (base + b - a) as u32;
                    }
                }
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                f.add_term(basis, c, alpha, beta);
            }
        }
        f
    }
}

/// Sign and merged key of the top-degree product of two sequences of odd
/// symbols. Each symbol is `(variable, kind)` with kind `0` for `dt` and
/// `1` for `dt̄` or a residue factor. Returns `None` unless every variable
/// occurs exactly once with each kind.
pub fn top_degree_sign(symbols: &[(usize, u8)], n: usize) -> Option<bool> {
    let mut seen = vec![[false; 2]; n];
    for &(v, k) in symbols {
        if seen[v][k as usize] {
            return None;
        }
        seen[v][k as usize] = true;
    }
    if seen.iter().any(|s| !s[0] || !s[1]) {
        return None;
    }
    let rank: Vec<usize> = symbols.iter().map(|&(v, k)| 2 * v + k as usize).collect();
    let mut inv = 0u32;
    for i in 0..rank.len() {
        for j in i + 1..rank.len() {
            if rank[i] > rank[j] {
                inv += 1;
            }
        }
    }
    Some(parity(inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_squared_vanishes_on_test_forms() {
        let ctx = VarContext::new(2).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let f = TestForm::random(ctx, 0, 1, &mut rng, vec![Bump::default(); 2]);
        let g = f.dbar().dbar();
        let t = [Complex64::new(0.61, 0.1), Complex64::new(-0.2, 0.58)];
        for (b, _) in g.components() {
            assert!(g.eval(b, &t).norm() < 1e-9);
        }
        let h = f.dbar().del().add(&f.del().dbar());
        for (b, _) in h.components() {
            assert!(h.eval(b, &t).norm() < 1e-9);
        }
    }

    #[test]
    fn lifted_form_keeps_its_coefficients() {
        let ctx = VarContext::new(1).unwrap();
        let beta = SmoothForm::var(ctx, 0).unwrap().wedge(&SmoothForm::dt(ctx, 0).unwrap());
        let f = TestForm::from_form(&beta, vec![Bump::default()]);
        let t = Complex64::new(0.3, 0.2);
        let phi = Bump::default().eval(t.norm_sqr(), 0);
        assert!((f.eval(&Basis::new(1, 0), &[t]) - t * phi).norm() < 1e-15);
    }

    #[test]
    fn dbar_matches_finite_difference() {
        let ctx = VarContext::new(1).unwrap();
        let mut f = TestForm::zero_default(ctx);
        f.add_term(Basis::EMPTY, Complex64::new(1.0, 0.5), vec![2], vec![1]);
        let d = f.dbar();
        let t = Complex64::new(0.55, 0.4);
        let h = 1e-6;
        // ∂/∂t̄ = (∂x + i∂y)/2
        let fx = (f.eval(&Basis::EMPTY, &[t + h]) - f.eval(&Basis::EMPTY, &[t - h])) / (2.0 * h);
        let fy = (f.eval(&Basis::EMPTY, &[t + Complex64::new(0.0, h)])
            - f.eval(&Basis::EMPTY, &[t - Complex64::new(0.0, h)]))
            / (2.0 * h);
        let want = (fx + Complex64::i() * fy) * 0.5;
        let got = d.eval(&Basis::new(0, 1), &[t]);
        assert!((got - want).norm() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn top_degree_signs() {
        // res₁ res₂ dt₁ dt₂ → dt₁ res₁ dt₂ res₂ needs three transpositions
        assert_eq!(top_degree_sign(&[(0, 1), (1, 1), (0, 0), (1, 0)], 2), Some(true));
        assert_eq!(top_degree_sign(&[(0, 0), (0, 1)], 1), Some(false));
        assert_eq!(top_degree_sign(&[(0, 0)], 1), None);
    }
}
