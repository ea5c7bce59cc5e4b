//! Polynomial coefficients in `t` and `t̄` with exact Gaussian-rational
//! scalars. These stand in for the smooth coefficients of currents.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::monomial::Monomial;
use crate::scalar::GaussRat;

/// Exponent pair `(a, b)` of a monomial `t^a t̄^b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyKey {
    pub hol: Vec<u32>,
    pub anti: Vec<u32>,
}

impl PolyKey {
    pub fn one(n: usize) -> Self {
        PolyKey { hol: vec![0; n], anti: vec![0; n] }
    }

    pub fn mul(&self, other: &PolyKey) -> PolyKey {
        PolyKey {
            hol: self.hol.iter().zip(&other.hol).map(|(a, b)| a + b).collect(),
            anti: self.anti.iter().zip(&other.anti).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.hol.iter().chain(&self.anti).all(|&e| e == 0)
    }
}

/// A finite sum `Σ c · t^a t̄^b`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyCoeff {
    n: usize,
    terms: BTreeMap<PolyKey, GaussRat>,
}

impl PolyCoeff {
    pub fn zero(n: usize) -> Self {
        PolyCoeff { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: GaussRat) -> Self {
        let mut p = PolyCoeff::zero(n);
        p.add_term(PolyKey::one(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        PolyCoeff::constant(n, GaussRat::one())
    }

    pub fn monomial(key: PolyKey, c: GaussRat) -> Self {
        let mut p = PolyCoeff::zero(key.hol.len());
        p.add_term(key, c);
        p
    }

    /// The holomorphic monomial `t^a` as a coefficient.
    pub fn from_monomial(m: &Monomial) -> Self {
        let n = m.dim();
        PolyCoeff::monomial(PolyKey { hol: m.exps().to_vec(), anti: vec![0; n] }, GaussRat::one())
    }

    /// `t̄_var`.
    pub fn conj_var(n: usize, var: usize) -> Self {
        let mut key = PolyKey::one(n);
        key.anti[var] = 1;
        PolyCoeff::monomial(key, GaussRat::one())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(k, c)| k.is_one() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolyKey, &GaussRat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, key: PolyKey, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &PolyCoeff) -> PolyCoeff {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PolyCoeff {
        PolyCoeff { n: self.n, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &GaussRat) -> PolyCoeff {
        let mut out = PolyCoeff::zero(self.n);
        for (k, c) in self.terms() {
            out.add_term(k.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &PolyCoeff) -> PolyCoeff {
        let mut out = PolyCoeff::zero(self.n);
        for (k1, c1) in self.terms() {
            for (k2, c2) in other.terms() {
                out.add_term(k1.mul(k2), c1 * c2);
            }
        }
        out
    }

    /// True when no `t̄` occurs.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|k| k.anti.iter().all(|&e| e == 0))
    }

    /// Total degree in `t` and `t̄`.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.hol.iter().chain(&k.anti).sum::<u32>()).max().unwrap_or(0)
    }

    /// Substitutes `t_j = t̄_j = 0` for every `j` in `vars`.
    pub fn restrict_zero(&self, vars: &[usize]) -> PolyCoeff {
        let mut out = PolyCoeff::zero(self.n);
        for (k, c) in self.terms() {
            if vars.iter().all(|&j| k.hol[j] == 0 && k.anti[j] == 0) {
                out.add_term(k.clone(), c.clone());
            }
        }
        out
    }

    /// Componentwise minimum of the holomorphic exponents over all terms.
    pub fn min_hol_exps(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        match it.next() {
            None => vec![0; self.n],
            Some(first) => {
                it.fold(first.hol.clone(), |acc, k| acc.iter().zip(&k.hol).map(|(a, b)| *a.min(b)).collect())
            }
        }
    }

    /// Divides every term by `t^e`; caller guarantees divisibility.
    pub fn div_hol(&self, e: &[u32]) -> PolyCoeff {
        let mut out = PolyCoeff::zero(self.n);
        for (k, c) in self.terms() {
            let hol = k.hol.iter().zip(e).map(|(a, b)| a - b).collect();
            out.add_term(PolyKey { hol, anti: k.anti.clone() }, c.clone());
        }
        out
    }
}
