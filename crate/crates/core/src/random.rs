//! Seeded generators for random currents, forms and monomial data. Used by
//! property tests, the acceptance suite and the CLI's `rand*` verbs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::current::{Current, PvFactor, RawTerm, ResFactor};
use crate::form::{Basis, SmoothForm};
use crate::monomial::{Monomial, VarContext};
use crate::poly::{PolyCoeff, PolyKey};
use crate::scalar::GaussRat;

/// Size limits for generated objects.
#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    /// Maximal pv / residue power.
    pub max_power: u32,
    /// Maximal total degree of coefficient polynomials.
    pub max_coeff_degree: u32,
    /// Maximal number of raw terms per current.
    pub max_terms: usize,
    /// Maximal number of monomials per coefficient.
    pub max_monomials: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { max_power: 3, max_coeff_degree: 3, max_terms: 3, max_monomials: 3 }
    }
}

/// Deterministic generator around a ChaCha stream.
pub struct Generator {
    rng: ChaCha8Rng,
    pub spec: RandomSpec,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), spec: RandomSpec::default() }
    }

    pub fn with_spec(seed: u64, spec: RandomSpec) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), spec }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Small nonzero Gaussian integer or half-integer.
    pub fn scalar(&mut self) -> GaussRat {
        loop {
            let re = self.rng.gen_range(-3i64..=3);
            let im = if self.rng.gen_bool(0.3) { self.rng.gen_range(-2i64..=2) } else { 0 };
            let den = if self.rng.gen_bool(0.2) { 2 } else { 1 };
            let c = &GaussRat::from_frac(re, den) + &GaussRat::i().scale_int(im);
            if !num_traits::Zero::is_zero(&c) {
                return c;
            }
        }
    }

    fn exps(&mut self, n: usize, max_deg: u32) -> Vec<u32> {
        let mut e = vec![0; n];
        let deg = self.rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            e[self.rng.gen_range(0..n)] += 1;
        }
        e
    }

    /// Random polynomial in `t`, `t̄`; holomorphic when `holo` is set.
    pub fn poly(&mut self, n: usize, holo: bool) -> PolyCoeff {
        let mut p = PolyCoeff::zero(n);
        let count = self.rng.gen_range(1..=self.spec.max_monomials);
        for _ in 0..count {
            let d = self.spec.max_coeff_degree;
            let e = self.exps(2 * n, d);
            let (hol, anti) = if holo {
                (e[..n].iter().zip(&e[n..]).map(|(a, b)| a + b).collect(), vec![0; n])
            } else {
                (e[..n].to_vec(), e[n..].to_vec())
            };
            let c = self.scalar();
            p.add_term(PolyKey { hol, anti }, c);
        }
        p
    }

    /// Random basis element with the given number of `dt` and `dt̄`.
    pub fn basis_of(&mut self, n: usize, p: usize, q: usize) -> Basis {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut self.rng);
        let dt = idx[..p.min(n)].iter().fold(0u32, |m, &j| m | (1 << j));
        idx.shuffle(&mut self.rng);
        let dtb = idx[..q.min(n)].iter().fold(0u32, |m, &j| m | (1 << j));
        Basis::new(dt, dtb)
    }

    /// Random basis element of arbitrary bidegree.
    pub fn basis(&mut self, n: usize) -> Basis {
        let p = self.rng.gen_range(0..=n);
        let q = self.rng.gen_range(0..=n);
        self.basis_of(n, p, q)
    }

    /// A random smooth form with one or two components.
    pub fn form(&mut self, ctx: VarContext) -> SmoothForm {
        let n = ctx.dim();
        let mut f = SmoothForm::zero(ctx);
        for _ in 0..self.rng.gen_range(1..=2) {
            let b = self.basis(n);
            let p = self.poly(n, false);
            f.add_component(b, p);
        }
        f
    }

    /// Random smooth form of pure degree `d`.
    pub fn form_of_degree(&mut self, ctx: VarContext, d: usize) -> SmoothForm {
        let n = ctx.dim();
        let mut f = SmoothForm::zero(ctx);
        for _ in 0..self.rng.gen_range(1..=2) {
            let p = self.rng.gen_range(d.saturating_sub(n)..=d.min(n));
            let b = self.basis_of(n, p, d - p);
            let c = self.poly(n, false);
            f.add_component(b, c);
        }
        f
    }

    /// Random disjoint pv and residue factor lists. The residue list is in
    /// random order.
    pub fn factors(&mut self, n: usize) -> (Vec<PvFactor>, Vec<ResFactor>) {
        let mut pv = Vec::new();
        let mut res = Vec::new();
        for var in 0..n {
            match self.rng.gen_range(0..3) {
                0 => pv.push(PvFactor { var, m: self.rng.gen_range(1..=self.spec.max_power) }),
                1 => res.push(ResFactor { var, m: self.rng.gen_range(1..=self.spec.max_power) }),
                _ => {}
            }
        }
        res.shuffle(&mut self.rng);
        (pv, res)
    }

    /// Raw terms behind [`Generator::current`].
    pub fn raw_terms(&mut self, ctx: VarContext) -> Vec<RawTerm> {
        let n = ctx.dim();
        let count = self.rng.gen_range(1..=self.spec.max_terms);
        (0..count)
            .map(|_| {
                let form = self.form(ctx);
                let (pv, res) = self.factors(n);
                RawTerm { form, pv, res, negate: self.rng.gen_bool(0.5) }
            })
            .collect()
    }

    /// A random normalized current.
    pub fn current(&mut self, ctx: VarContext) -> Current {
        let raw = self.raw_terms(ctx);
        Current::normalize(ctx, &raw).expect("generated factors are disjoint")
    }

    /// A random current without residue factors.
    pub fn residue_free_current(&mut self, ctx: VarContext) -> Current {
        let mut raw = self.raw_terms(ctx);
        for t in &mut raw {
            t.res.clear();
        }
        Current::normalize(ctx, &raw).expect("generated factors are disjoint")
    }

    /// Random non-constant monomial with exponents at most `max_exp`.
    pub fn monomial(&mut self, ctx: VarContext, max_exp: u32) -> Monomial {
        let n = ctx.dim();
        loop {
            let e: Vec<u32> =
                (0..n).map(|_| if self.rng.gen_bool(0.5) { self.rng.gen_range(1..=max_exp) } else { 0 }).collect();
            if e.iter().any(|&x| x > 0) {
                return Monomial::new(e);
            }
        }
    }

    /// Random monomial that may be constant.
    pub fn monomial_or_one(&mut self, ctx: VarContext, max_exp: u32) -> Monomial {
        if self.rng.gen_bool(0.15) {
            Monomial::one(ctx)
        } else {
            self.monomial(ctx, max_exp)
        }
    }

    pub fn gen_bool(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn gen_range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }
}
