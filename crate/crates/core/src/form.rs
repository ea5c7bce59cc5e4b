//! Differential bases `dt_I ∧ dt̄_J` and smooth (polynomial) forms.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{CalcError, Result};
use crate::monomial::VarContext;
use crate::poly::{PolyCoeff, PolyKey};
use crate::scalar::GaussRat;

/// `dt_I ∧ dt̄_J` with `I`, `J` stored as bitmasks (bit `j` ↔ variable `j`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    pub dt: u32,
    pub dtb: u32,
}

impl Basis {
    pub const EMPTY: Basis = Basis { dt: 0, dtb: 0 };

    pub fn new(dt: u32, dtb: u32) -> Self {
        Basis { dt, dtb }
    }

    pub fn degree(&self) -> u32 {
        self.dt.count_ones() + self.dtb.count_ones()
    }

    pub fn hol_indices(&self) -> Vec<usize> {
        mask_indices(self.dt)
    }

    pub fn anti_indices(&self) -> Vec<usize> {
        mask_indices(self.dtb)
    }

    /// `self ∧ other` rewritten in canonical order; `None` if a differential
    /// repeats.
    pub fn wedge(&self, other: &Basis) -> Option<(Basis, bool)> {
        if self.dt & other.dt != 0 || self.dtb & other.dtb != 0 {
            return None;
        }
        // dI1 dJ1 dI2 dJ2 -> dI1 dI2 dJ1 dJ2 -> d(I1∪I2) d(J1∪J2)
        let mut odd = parity(self.dtb.count_ones() * other.dt.count_ones());
        odd ^= merge_parity(self.dt, other.dt);
        odd ^= merge_parity(self.dtb, other.dtb);
        Some((Basis::new(self.dt | other.dt, self.dtb | other.dtb), odd))
    }
}

pub(crate) fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask & (1 << j) != 0).collect()
}

pub(crate) fn parity(k: u32) -> bool {
    k % 2 == 1
}

/// Parity of the number of pairs `(i ∈ a, j ∈ b)` with `i > j`: the sign of
/// sorting the concatenation `a ++ b`.
pub(crate) fn merge_parity(a: u32, b: u32) -> bool {
    let mut count = 0;
    for j in mask_indices(b) {
        count += (a >> (j + 1)).count_ones();
    }
    parity(count)
}

/// Number of set bits strictly below `j`.
pub(crate) fn count_below(mask: u32, j: usize) -> u32 {
    (mask & ((1u32 << j) - 1)).count_ones()
}

/// A form `Σ_{(I,J)} p_{IJ}(t, t̄) dt_I ∧ dt̄_J` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmoothForm {
    ctx: VarContext,
    comps: BTreeMap<Basis, PolyCoeff>,
}

impl SmoothForm {
    pub fn zero(ctx: VarContext) -> Self {
        SmoothForm { ctx, comps: BTreeMap::new() }
    }

    pub fn one(ctx: VarContext) -> Self {
        SmoothForm::from_poly(ctx, PolyCoeff::one(ctx.dim()))
    }

    pub fn from_poly(ctx: VarContext, p: PolyCoeff) -> Self {
        let mut f = SmoothForm::zero(ctx);
        f.add_component(Basis::EMPTY, p);
        f
    }

    pub fn constant(ctx: VarContext, c: GaussRat) -> Self {
        SmoothForm::from_poly(ctx, PolyCoeff::constant(ctx.dim(), c))
    }

    /// `t_var` as a 0-form.
    pub fn var(ctx: VarContext, var: usize) -> Result<Self> {
        ctx.check_var(var)?;
        let mut key = PolyKey::one(ctx.dim());
        key.hol[var] = 1;
        Ok(SmoothForm::from_poly(ctx, PolyCoeff::monomial(key, GaussRat::one())))
    }

    /// `t̄_var` as a 0-form.
    pub fn conj_var(ctx: VarContext, var: usize) -> Result<Self> {
        ctx.check_var(var)?;
        Ok(SmoothForm::from_poly(ctx, PolyCoeff::conj_var(ctx.dim(), var)))
    }

    /// `dt_var`.
    pub fn dt(ctx: VarContext, var: usize) -> Result<Self> {
        ctx.check_var(var)?;
        let mut f = SmoothForm::zero(ctx);
        f.add_component(Basis::new(1 << var, 0), PolyCoeff::one(ctx.dim()));
        Ok(f)
    }

    /// `dt̄_var`.
    pub fn dtb(ctx: VarContext, var: usize) -> Result<Self> {
        ctx.check_var(var)?;
        let mut f = SmoothForm::zero(ctx);
        f.add_component(Basis::new(0, 1 << var), PolyCoeff::one(ctx.dim()));
        Ok(f)
    }

    pub fn ctx(&self) -> VarContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Basis, &PolyCoeff)> {
        self.comps.iter()
    }

    pub fn component(&self, basis: &Basis) -> Option<&PolyCoeff> {
        self.comps.get(basis)
    }

    pub fn add_component(&mut self, basis: Basis, p: PolyCoeff) {
        if p.is_zero() {
            return;
        }
        let entry = self.comps.entry(basis).or_insert_with(|| PolyCoeff::zero(p.dim()));
        *entry = entry.add(&p);
        if entry.is_zero() {
            self.comps.remove(&basis);
        }
    }

    pub fn add(&self, other: &SmoothForm) -> SmoothForm {
        let mut out = self.clone();
        for (b, p) in other.components() {
            out.add_component(*b, p.clone());
        }
        out
    }

    pub fn neg(&self) -> SmoothForm {
        SmoothForm { ctx: self.ctx, comps: self.comps.iter().map(|(b, p)| (*b, p.neg())).collect() }
    }

    pub fn scale(&self, s: &GaussRat) -> SmoothForm {
        let mut out = SmoothForm::zero(self.ctx);
        for (b, p) in self.components() {
            out.add_component(*b, p.scale(s));
        }
        out
    }

    pub fn wedge(&self, other: &SmoothForm) -> SmoothForm {
        let mut out = SmoothForm::zero(self.ctx);
        for (b1, p1) in self.components() {
            for (b2, p2) in other.components() {
                if let Some((b, odd)) = b1.wedge(b2) {
                    let p = p1.mul(p2);
                    out.add_component(b, if odd { p.neg() } else { p });
                }
            }
        }
        out
    }

    /// Form degrees present.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.comps.keys().map(|b| b.degree()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The single degree if the form is homogeneous (zero counts as degree 0).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.degrees().as_slice() {
            [] => Some(0),
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Component of total degree `d`.
    pub fn degree_part(&self, d: u32) -> SmoothForm {
        SmoothForm {
            ctx: self.ctx,
            comps: self.comps.iter().filter(|(b, _)| b.degree() == d).map(|(b, p)| (*b, p.clone())).collect(),
        }
    }

    /// ∂̄ of the form.
    pub fn dbar(&self) -> SmoothForm {
        self.differentiate(true)
    }

    /// ∂ of the form.
    pub fn del(&self) -> SmoothForm {
        self.differentiate(false)
    }

    fn differentiate(&self, anti: bool) -> SmoothForm {
        let n = self.ctx.dim();
        let mut out = SmoothForm::zero(self.ctx);
        for (b, p) in self.components() {
            for (key, c) in p.terms() {
                for k in 0..n {
                    let e = if anti { key.anti[k] } else { key.hol[k] };
                    if e == 0 {
                        continue;
                    }
                    let d = if anti { Basis::new(0, 1 << k) } else { Basis::new(1 << k, 0) };
                    let Some((nb, odd)) = d.wedge(b) else { continue };
                    let mut nk = key.clone();
                    if anti {
                        nk.anti[k] -= 1;
                    } else {
                        nk.hol[k] -= 1;
                    }
                    let mut coef = c.scale_int(i64::from(e));
                    if odd {
                        coef = -coef;
                    }
                    out.add_component(nb, PolyCoeff::monomial(nk, coef));
                }
            }
        }
        out
    }

    /// Returns the coefficient of a pure 0-form; errors if the form has
    /// differentials.
    pub fn as_function(&self) -> Result<PolyCoeff> {
        if self.comps.keys().any(|b| *b != Basis::EMPTY) {
            return Err(CalcError::NotSmooth);
        }
        Ok(self.comps.get(&Basis::EMPTY).cloned().unwrap_or_else(|| PolyCoeff::zero(self.ctx.dim())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        let ctx = VarContext::new(2).unwrap();
        let d1 = SmoothForm::dt(ctx, 0).unwrap();
        let d2 = SmoothForm::dt(ctx, 1).unwrap();
        let db1 = SmoothForm::dtb(ctx, 0).unwrap();
        assert!(d1.wedge(&d1).is_zero());
        assert_eq!(d2.wedge(&d1), d1.wedge(&d2).neg());
        // dt̄1 ∧ dt2 = -dt2 ∧ dt̄1
        let lhs = db1.wedge(&d2);
        let (b, p) = lhs.components().next().unwrap();
        assert_eq!(*b, Basis::new(2, 1));
        assert_eq!(p, &PolyCoeff::one(2).neg());
    }

    #[test]
    fn d_squared_vanishes() {
        let ctx = VarContext::new(2).unwrap();
        let f = SmoothForm::var(ctx, 0)
            .unwrap()
            .wedge(&SmoothForm::conj_var(ctx, 1).unwrap())
            .wedge(&SmoothForm::conj_var(ctx, 0).unwrap());
        assert!(f.dbar().dbar().is_zero());
        assert!(f.del().del().is_zero());
        assert_eq!(f.del().dbar(), f.dbar().del().neg());
    }
}
