//! Elementary pseudomeromorphic currents on a coordinate chart and their
//! formal sums, kept in a canonical signed normal form.
//!
//! A term is written
//!
//! ```text
//! c · t^a t̄^b · dt_I ∧ dt̄_J ∧ [1/t_k^{m_k}]… ∧ ∂̄[1/t_l^{m_l}] ∧ …
//! ```
//!
//! with principal value factors (even) and residue factors (odd, sorted by
//! variable) on the right. All reordering signs live in the scalar. The
//! normal form applies, eagerly and per monomial:
//!
//! * `t̄ⱼ ∂̄[1/tⱼᵐ] = 0` and `dt̄ⱼ ∧ ∂̄[1/tⱼᵐ] = 0`,
//! * `tⱼ [1/tⱼ^{m+1}] = [1/tⱼᵐ]` (and `tⱼ [1/tⱼ] = 1`),
//! * `tⱼ ∂̄[1/tⱼ^{m+1}] = ∂̄[1/tⱼᵐ]` and `tⱼ ∂̄[1/tⱼ] = 0`.
//!
//! A principal value and a residue factor in the same variable are never
//! stored: such products depend on the order in which they are formed, so
//! callers go through `pv_divide` or `solve_divide` instead.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::error::{CalcError, Result};
use crate::form::{parity, Basis, SmoothForm};
use crate::monomial::VarContext;
use crate::poly::{PolyCoeff, PolyKey};
use crate::scalar::GaussRat;

/// `[1/t_var^m]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PvFactor {
    pub var: usize,
    pub m: u32,
}

/// `∂̄[1/t_var^m]`, a current of bidegree `(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResFactor {
    pub var: usize,
    pub m: u32,
}

/// Signature of a normalized term. Field order gives the canonical term
/// order: residue factors, then principal value factors, then basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    /// Residue factors sorted by variable.
    pub res: Vec<ResFactor>,
    /// Principal value factors sorted by variable.
    pub pv: Vec<PvFactor>,
    pub basis: Basis,
}

impl TermKey {
    pub fn plain(basis: Basis) -> Self {
        TermKey { res: Vec::new(), pv: Vec::new(), basis }
    }

    /// Bidegree `(|I|, |J| + #res)`.
    pub fn bidegree(&self) -> (u32, u32) {
        (self.basis.dt.count_ones(), self.basis.dtb.count_ones() + self.res.len() as u32)
    }

    pub fn degree(&self) -> u32 {
        let (p, q) = self.bidegree();
        p + q
    }

    pub fn res_vars(&self) -> Vec<usize> {
        self.res.iter().map(|r| r.var).collect()
    }

    pub fn res_mask(&self) -> u32 {
        self.res.iter().fold(0, |m, r| m | (1 << r.var))
    }

    pub fn pv_power(&self, var: usize) -> Option<u32> {
        self.pv.iter().find(|p| p.var == var).map(|p| p.m)
    }

    pub fn res_power(&self, var: usize) -> Option<u32> {
        self.res.iter().find(|r| r.var == var).map(|r| r.m)
    }
}

/// One elementary current `form ∧ ∏ pv ∧ ∧ res`, as exposed to callers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryTerm {
    pub form: SmoothForm,
    pub pv: Vec<PvFactor>,
    pub res: Vec<ResFactor>,
}

impl ElementaryTerm {
    /// Variables `j` with `{tⱼ = 0}` cutting out the elementary support.
    pub fn elementary_support(&self) -> BTreeSet<usize> {
        self.res.iter().map(|r| r.var).collect()
    }
}

/// Un-normalized input to [`Current::normalize`]:
/// `±form ∧ ∏ pv ∧ res₁ ∧ res₂ ∧ …` with residue factors in the given order.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub form: SmoothForm,
    pub pv: Vec<PvFactor>,
    pub res: Vec<ResFactor>,
    pub negate: bool,
}

/// Reduces a single monomial term to normal form. Returns `None` if an
/// annihilation rule kills it.
fn reduce(mut mono: PolyKey, basis: Basis, pv: &[PvFactor], res: &[ResFactor]) -> Option<(TermKey, PolyKey)> {
    let mut new_res = Vec::with_capacity(res.len());
    for r in res {
        let j = r.var;
        if basis.dtb & (1 << j) != 0 || mono.anti[j] > 0 {
            return None;
        }
        let a = mono.hol[j];
        if a >= r.m {
            return None;
        }
        mono.hol[j] = 0;
        new_res.push(ResFactor { var: j, m: r.m - a });
    }
    let mut new_pv = Vec::with_capacity(pv.len());
    for p in pv {
        let j = p.var;
        let k = mono.hol[j].min(p.m);
        mono.hol[j] -= k;
        if p.m > k {
            new_pv.push(PvFactor { var: j, m: p.m - k });
        }
    }
    Some((TermKey { res: new_res, pv: new_pv, basis }, mono))
}

/// Builder that reduces and merges terms as they are pushed.
#[derive(Clone, Debug)]
pub(crate) struct Accum {
    ctx: VarContext,
    terms: BTreeMap<TermKey, PolyCoeff>,
}

impl Accum {
    pub(crate) fn new(ctx: VarContext) -> Self {
        Accum { ctx, terms: BTreeMap::new() }
    }

    /// Pushes `c · mono · basis ∧ pv ∧ res`; `pv` and `res` must be sorted by
    /// variable and disjoint.
    pub(crate) fn push(&mut self, c: GaussRat, mono: PolyKey, basis: Basis, pv: &[PvFactor], res: &[ResFactor]) {
        if c.is_zero() {
            return;
        }
        if let Some((key, mono)) = reduce(mono, basis, pv, res) {
            self.push_reduced(key, PolyCoeff::monomial(mono, c));
        }
    }

    /// Pushes every monomial of `poly` against the factors of `key`.
    pub(crate) fn push_poly(&mut self, poly: &PolyCoeff, key: &TermKey, negate: bool) {
        for (mono, c) in poly.terms() {
            let c = if negate { -c } else { c.clone() };
            self.push(c, mono.clone(), key.basis, &key.pv, &key.res);
        }
    }

    fn push_reduced(&mut self, key: TermKey, p: PolyCoeff) {
        let n = self.ctx.dim();
        let entry = self.terms.entry(key.clone()).or_insert_with(|| PolyCoeff::zero(n));
        *entry = entry.add(&p);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub(crate) fn finish(self) -> Current {
        Current { ctx: self.ctx, terms: self.terms }
    }
}

/// A finite sum of normalized elementary terms, one coefficient polynomial
/// per [`TermKey`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Current {
    ctx: VarContext,
    terms: BTreeMap<TermKey, PolyCoeff>,
}

impl Current {
    pub fn zero(ctx: VarContext) -> Self {
        Current { ctx, terms: BTreeMap::new() }
    }

    /// The constant function `1`.
    pub fn one(ctx: VarContext) -> Self {
        Current::from_form(&SmoothForm::one(ctx))
    }

    pub fn from_form(form: &SmoothForm) -> Self {
        let mut acc = Accum::new(form.ctx());
        for (b, p) in form.components() {
            acc.push_poly(p, &TermKey::plain(*b), false);
        }
        acc.finish()
    }

    /// `[1/t_var^m]`.
    pub fn pv(ctx: VarContext, var: usize, m: u32) -> Result<Self> {
        ctx.check_var(var)?;
        if m == 0 {
            return Err(CalcError::ZeroPower { var });
        }
        let key = TermKey { res: vec![], pv: vec![PvFactor { var, m }], basis: Basis::EMPTY };
        Ok(Current::single(ctx, key, PolyCoeff::one(ctx.dim())))
    }

    /// `∂̄[1/t_var^m]`.
    pub fn res(ctx: VarContext, var: usize, m: u32) -> Result<Self> {
        ctx.check_var(var)?;
        if m == 0 {
            return Err(CalcError::ZeroPower { var });
        }
        let key = TermKey { res: vec![ResFactor { var, m }], pv: vec![], basis: Basis::EMPTY };
        Ok(Current::single(ctx, key, PolyCoeff::one(ctx.dim())))
    }

    /// A single term, normalized.
    pub fn single(ctx: VarContext, key: TermKey, coeff: PolyCoeff) -> Self {
        let mut acc = Accum::new(ctx);
        acc.push_poly(&coeff, &key, false);
        acc.finish()
    }

    /// Normalizes a list of raw terms. Residue factors are reordered by
    /// variable with the permutation sign folded into the coefficient.
    pub fn normalize(ctx: VarContext, raw: &[RawTerm]) -> Result<Self> {
        let mut acc = Accum::new(ctx);
        for t in raw {
            ctx.check_same(&t.form.ctx())?;
            let mut pv: BTreeMap<usize, u32> = BTreeMap::new();
            for p in &t.pv {
                ctx.check_var(p.var)?;
                if p.m == 0 {
                    return Err(CalcError::ZeroPower { var: p.var });
                }
                *pv.entry(p.var).or_insert(0) += p.m;
            }
            let mut seen = 0u32;
            let mut odd = t.negate;
            for (i, r) in t.res.iter().enumerate() {
                ctx.check_var(r.var)?;
                if r.m == 0 {
                    return Err(CalcError::ZeroPower { var: r.var });
                }
                if seen & (1 << r.var) != 0 {
                    return Err(CalcError::DuplicateResidue { var: r.var });
                }
                if pv.contains_key(&r.var) {
                    return Err(CalcError::MixedFactor { var: r.var });
                }
                seen |= 1 << r.var;
                // inversions against earlier entries with a larger variable
                let larger_before = t.res[..i].iter().filter(|s| s.var > r.var).count() as u32;
                odd ^= parity(larger_before);
            }
            let mut res = t.res.clone();
            res.sort();
            let pv: Vec<PvFactor> = pv.into_iter().map(|(var, m)| PvFactor { var, m }).collect();
            for (b, p) in t.form.components() {
                let key = TermKey { res: res.clone(), pv: pv.clone(), basis: *b };
                acc.push_poly(p, &key, odd);
            }
        }
        Ok(acc.finish())
    }

    pub fn ctx(&self) -> VarContext {
        self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Normalized terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &PolyCoeff)> {
        self.terms.iter()
    }

    /// Terms grouped by their principal value and residue factors.
    pub fn elementary_terms(&self) -> Vec<ElementaryTerm> {
        let mut groups: BTreeMap<(Vec<ResFactor>, Vec<PvFactor>), SmoothForm> = BTreeMap::new();
        for (k, p) in self.terms() {
            groups
                .entry((k.res.clone(), k.pv.clone()))
                .or_insert_with(|| SmoothForm::zero(self.ctx))
                .add_component(k.basis, p.clone());
        }
        groups.into_iter().map(|((res, pv), form)| ElementaryTerm { form, pv, res }).collect()
    }

    pub fn try_add(&self, other: &Current) -> Result<Current> {
        self.ctx.check_same(&other.ctx)?;
        let mut acc = Accum { ctx: self.ctx, terms: self.terms.clone() };
        for (k, p) in other.terms() {
            acc.push_reduced(k.clone(), p.clone());
        }
        Ok(acc.finish())
    }

    pub fn scale(&self, s: &GaussRat) -> Current {
        let mut acc = Accum::new(self.ctx);
        for (k, p) in self.terms() {
            acc.push_reduced(k.clone(), p.scale(s));
        }
        acc.finish()
    }

    /// `β ∧ τ` for a smooth form `β`.
    pub fn try_wedge_left(&self, beta: &SmoothForm) -> Result<Current> {
        self.ctx.check_same(&beta.ctx())?;
        let mut acc = Accum::new(self.ctx);
        for (bb, bp) in beta.components() {
            for (k, p) in self.terms() {
                let Some((basis, odd)) = bb.wedge(&k.basis) else { continue };
                let key = TermKey { res: k.res.clone(), pv: k.pv.clone(), basis };
                acc.push_poly(&bp.mul(p), &key, odd);
            }
        }
        Ok(acc.finish())
    }

    /// `τ ∧ β` for a smooth form `β`.
    pub fn try_wedge_right(&self, beta: &SmoothForm) -> Result<Current> {
        self.ctx.check_same(&beta.ctx())?;
        let mut acc = Accum::new(self.ctx);
        for (bb, bp) in beta.components() {
            for (k, p) in self.terms() {
                let Some((basis, odd)) = bb.wedge(&k.basis) else { continue };
                let swap = parity(bb.degree() * k.degree());
                let key = TermKey { res: k.res.clone(), pv: k.pv.clone(), basis };
                acc.push_poly(&bp.mul(p), &key, odd ^ swap);
            }
        }
        Ok(acc.finish())
    }

    /// `σ ∧ τ` for general currents. Principal values in one variable
    /// combine as `[1/tᵐ][1/tᵏ] = [1/t^{m+k}]`; a residue factor meeting any
    /// other singular factor in its variable is an error.
    pub fn try_wedge(&self, other: &Current) -> Result<Current> {
        self.ctx.check_same(&other.ctx)?;
        let mut raw = Vec::new();
        for (k1, p1) in self.terms() {
            let mut f1 = SmoothForm::zero(self.ctx);
            f1.add_component(k1.basis, p1.clone());
            for (k2, p2) in other.terms() {
                let mut f2 = SmoothForm::zero(self.ctx);
                f2.add_component(k2.basis, p2.clone());
                let mut pv = k1.pv.clone();
                pv.extend(&k2.pv);
                let mut res = k1.res.clone();
                res.extend(&k2.res);
                // ω₁P₁R₁ ∧ ω₂P₂R₂ = ± ω₁ω₂ P₁P₂ R₁R₂
                let negate = parity(k2.basis.degree() * k1.res.len() as u32);
                raw.push(RawTerm { form: f1.wedge(&f2), pv, res, negate });
            }
        }
        Current::normalize(self.ctx, &raw)
    }

    /// Bidegrees present; empty for the zero current.
    pub fn bidegree(&self) -> BTreeSet<(u32, u32)> {
        self.terms.keys().map(TermKey::bidegree).collect()
    }

    /// Total degree if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d: BTreeSet<u32> = self.terms.keys().map(TermKey::degree).collect();
        match d.len() {
            0 => Some(0),
            1 => d.into_iter().next(),
            _ => None,
        }
    }

    /// Part of total degree `d`.
    pub fn degree_part(&self, d: u32) -> Current {
        Current {
            ctx: self.ctx,
            terms: self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(k, p)| (k.clone(), p.clone())).collect(),
        }
    }

    /// True when no term has residue factors.
    pub fn is_residue_free(&self) -> bool {
        self.terms.keys().all(|k| k.res.is_empty())
    }

    /// True when the current is a smooth form (no pv or residue factors).
    pub fn as_smooth_form(&self) -> Option<SmoothForm> {
        let mut f = SmoothForm::zero(self.ctx);
        for (k, p) in self.terms() {
            if !k.res.is_empty() || !k.pv.is_empty() {
                return None;
            }
            f.add_component(k.basis, p.clone());
        }
        Some(f)
    }

    /// Keeps the terms for which `keep` holds.
    pub(crate) fn filter_terms(&self, keep: impl Fn(&TermKey) -> bool) -> Current {
        Current {
            ctx: self.ctx,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, p)| (k.clone(), p.clone())).collect(),
        }
    }
}

impl Add for &Current {
    type Output = Current;
    fn add(self, rhs: &Current) -> Current {
        self.try_add(rhs).expect("currents from different contexts")
    }
}

impl Add for Current {
    type Output = Current;
    fn add(self, rhs: Current) -> Current {
        &self + &rhs
    }
}

impl Neg for &Current {
    type Output = Current;
    fn neg(self) -> Current {
        Current { ctx: self.ctx, terms: self.terms.iter().map(|(k, p)| (k.clone(), p.neg())).collect() }
    }
}

impl Neg for Current {
    type Output = Current;
    fn neg(self) -> Current {
        -&self
    }
}

impl Sub for &Current {
    type Output = Current;
    fn sub(self, rhs: &Current) -> Current {
        self + &(-rhs)
    }
}

impl Sub for Current {
    type Output = Current;
    fn sub(self, rhs: Current) -> Current {
        &self - &rhs
    }
}

impl Current {
    /// True when every coefficient is exactly `1` and there is one term.
    pub fn is_unit_term(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|p| p.is_one())
    }

    /// Coefficient scalar of the constant monomial in a single-term current.
    pub fn leading_scalar(&self) -> Option<GaussRat> {
        let (_, p) = self.terms.iter().next()?;
        let (_, c) = p.terms().next()?;
        Some(c.clone())
    }
}
