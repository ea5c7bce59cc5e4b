//! Restrictions to coordinate varieties, division by monomials, products
//! with semi-meromorphic forms, Coleff–Herrera products, residues and the
//! support checks built on them.

use std::collections::BTreeSet;

use crate::calculus::dbar;
use crate::current::{Accum, Current, PvFactor};
use crate::error::{CalcError, Result};
use crate::form::{mask_indices, SmoothForm};
use crate::monomial::{Monomial, VarContext};
use crate::poly::PolyCoeff;

/// Common zero set of a list of monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateVariety {
    ctx: VarContext,
    gens: Vec<Monomial>,
}

impl CoordinateVariety {
    pub fn new(ctx: VarContext, gens: Vec<Monomial>) -> Result<Self> {
        if gens.is_empty() {
            return Err(CalcError::EmptyVariety);
        }
        let mut out: Vec<Monomial> = Vec::new();
        for g in gens {
            if g.dim() != ctx.dim() {
                return Err(CalcError::ContextMismatch { left: ctx.dim(), right: g.dim() });
            }
            if g.is_one() {
                return Err(CalcError::ConstantGenerator);
            }
            if !out.contains(&g) {
                out.push(g);
            }
        }
        Ok(CoordinateVariety { ctx, gens: out })
    }

    /// `{t_j = 0 for j ∈ vars}`.
    pub fn coordinate_subspace(ctx: VarContext, vars: &[usize]) -> Result<Self> {
        let gens = vars.iter().map(|&j| Monomial::var_pow(ctx, j, 1)).collect::<Result<Vec<_>>>()?;
        CoordinateVariety::new(ctx, gens)
    }

    /// `Z(h)`.
    pub fn zero_set(h: &Monomial, ctx: VarContext) -> Result<Self> {
        CoordinateVariety::new(ctx, vec![h.clone()])
    }

    pub fn ctx(&self) -> VarContext {
        self.ctx
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.gens
    }

    /// `V ∩ W`, generated by both generator lists.
    pub fn intersect(&self, other: &CoordinateVariety) -> Result<CoordinateVariety> {
        self.ctx.check_same(&other.ctx)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        CoordinateVariety::new(self.ctx, gens)
    }

    fn support_masks(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.support().iter().fold(0u32, |m, &j| m | (1 << j))).collect()
    }

    /// Whether `{t_j = 0 : j ∈ mask}` lies inside the variety: every
    /// generator must involve one of the variables.
    pub fn contains_subspace(&self, mask: u32) -> bool {
        self.support_masks().iter().all(|s| s & mask != 0)
    }

    /// Irreducible components `{t_j = 0 : j ∈ C}`, as the minimal variable
    /// sets `C` meeting every generator.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let masks = self.support_masks();
        let hitting: Vec<u32> = (1u32..(1 << self.ctx.dim())).filter(|c| masks.iter().all(|s| s & c != 0)).collect();
        hitting
            .iter()
            .filter(|&&c| !hitting.iter().any(|&d| d != c && d & c == d))
            .map(|&c| mask_indices(c).into_iter().collect())
            .collect()
    }

    /// Codimension: size of a smallest variable set meeting every generator.
    pub fn codim(&self) -> u32 {
        let masks = self.support_masks();
        let n = self.ctx.dim();
        (0u32..(1 << n)).filter(|c| masks.iter().all(|s| s & c != 0)).map(u32::count_ones).min().unwrap_or(0)
    }
}

/// `ω / t^c`: a smooth form divided by a monomial, with common powers of
/// `t` cancelled.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentForm {
    num: SmoothForm,
    den: Monomial,
}

impl LaurentForm {
    pub fn new(num: SmoothForm, den: Monomial) -> Result<Self> {
        let ctx = num.ctx();
        if den.dim() != ctx.dim() {
            return Err(CalcError::ContextMismatch { left: ctx.dim(), right: den.dim() });
        }
        if num.is_zero() {
            return Ok(LaurentForm { num, den: Monomial::one(ctx) });
        }
        let mut common = den.exps().to_vec();
        for (_, p) in num.components() {
            for (c, m) in common.iter_mut().zip(p.min_hol_exps()) {
                *c = (*c).min(m);
            }
        }
        let mut reduced = SmoothForm::zero(ctx);
        for (b, p) in num.components() {
            reduced.add_component(*b, p.div_hol(&common));
        }
        let den = Monomial::new(den.exps().iter().zip(&common).map(|(a, b)| a - b).collect());
        Ok(LaurentForm { num: reduced, den })
    }

    /// `1 / t^c`.
    pub fn inverse_monomial(ctx: VarContext, den: Monomial) -> Result<Self> {
        LaurentForm::new(SmoothForm::one(ctx), den)
    }

    pub fn from_form(form: SmoothForm) -> Self {
        let ctx = form.ctx();
        LaurentForm { num: form, den: Monomial::one(ctx) }
    }

    pub fn ctx(&self) -> VarContext {
        self.num.ctx()
    }

    pub fn numerator(&self) -> &SmoothForm {
        &self.num
    }

    pub fn denominator(&self) -> &Monomial {
        &self.den
    }

    /// `(ω₁/t^{c₁}) ∧ (ω₂/t^{c₂}) = (ω₁∧ω₂)/t^{c₁+c₂}`, cancelled.
    pub fn mul(&self, other: &LaurentForm) -> Result<LaurentForm> {
        self.ctx().check_same(&other.ctx())?;
        LaurentForm::new(self.num.wedge(&other.num), self.den.mul(&other.den))
    }

    /// The current `ω ∧ [1/t^c]`.
    pub fn to_current(&self) -> Current {
        asm_mul(self, &Current::one(self.ctx())).expect("same context")
    }
}

/// `1_V μ`: keeps the terms whose elementary support lies in `V`.
pub fn restrict_to(v: &CoordinateVariety, mu: &Current) -> Result<Current> {
    v.ctx.check_same(&mu.ctx())?;
    Ok(mu.filter_terms(|k| v.contains_subspace(k.res_mask())))
}

/// `1_{X∖V} μ = μ − 1_V μ`.
pub fn restrict_complement(v: &CoordinateVariety, mu: &Current) -> Result<Current> {
    v.ctx.check_same(&mu.ctx())?;
    Ok(mu.filter_terms(|k| !v.contains_subspace(k.res_mask())))
}

fn check_monomial(h: &Monomial, mu: &Current) -> Result<()> {
    if h.dim() != mu.dim() {
        return Err(CalcError::ContextMismatch { left: mu.dim(), right: h.dim() });
    }
    Ok(())
}

fn add_pv(pv: &[PvFactor], var: usize, m: u32) -> Vec<PvFactor> {
    let mut out = pv.to_vec();
    match out.iter_mut().find(|p| p.var == var) {
        Some(p) => p.m += m,
        None => {
            out.push(PvFactor { var, m });
            out.sort();
        }
    }
    out
}

fn divide(h: &Monomial, mu: &Current, solve: bool) -> Result<Current> {
    check_monomial(h, mu)?;
    let mut acc = Accum::new(mu.ctx());
    'terms: for (key, poly) in mu.terms() {
        let mut k = key.clone();
        for (j, &e) in h.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if let Some(r) = k.res.iter_mut().find(|r| r.var == j) {
                if !solve {
                    continue 'terms;
                }
                r.m += e;
            } else {
                k.pv = add_pv(&k.pv, j, e);
            }
        }
        acc.push_poly(poly, &k, false);
    }
    Ok(acc.finish())
}

/// `[1/h] μ`: the extension across `Z(h)` of `μ/h`. Terms with a residue
/// factor in a variable of `h` vanish.
pub fn pv_divide(h: &Monomial, mu: &Current) -> Result<Current> {
    divide(h, mu, false)
}

/// A solution `μ′` of `h μ′ = μ`, raising residue powers where `h` meets a
/// residue variable.
pub fn solve_divide(h: &Monomial, mu: &Current) -> Result<Current> {
    divide(h, mu, true)
}

/// Zariski-singular support of `a`; `None` when `a` is smooth.
pub fn zss_of(a: &LaurentForm) -> Option<CoordinateVariety> {
    if a.den.is_one() {
        return None;
    }
    Some(CoordinateVariety { ctx: a.ctx(), gens: vec![a.den.radical()] })
}

/// `a ∧ τ = ω ∧ [1/t^c] τ`.
pub fn asm_mul(a: &LaurentForm, tau: &Current) -> Result<Current> {
    a.ctx().check_same(&tau.ctx())?;
    pv_divide(&a.den, tau)?.try_wedge_left(&a.num)
}

/// `∂̄a ∧ τ := ∂̄(a∧τ) − (−1)^{deg a} a∧∂̄τ`, summed over the homogeneous
/// parts of `a`.
pub fn dbar_asm_mul(a: &LaurentForm, tau: &Current) -> Result<Current> {
    let dtau = dbar(tau);
    let mut out = Current::zero(tau.ctx());
    for d in a.num.degrees() {
        let part = LaurentForm { num: a.num.degree_part(d), den: a.den.clone() };
        let first = dbar(&asm_mul(&part, tau)?);
        let second = asm_mul(&part, &dtau)?;
        out = &out + &if d % 2 == 0 { &first - &second } else { &first + &second };
    }
    Ok(out)
}

/// `∂̄[1/f₁] ∧ ⋯ ∧ ∂̄[1/f_p]`, built from the right: the last factor is
/// applied to `1` first.
pub fn ch_product(ctx: VarContext, fs: &[Monomial]) -> Result<Current> {
    if fs.is_empty() {
        return Err(CalcError::EmptyVariety);
    }
    let mut t = Current::one(ctx);
    for f in fs.iter().rev() {
        t = dbar_asm_mul(&LaurentForm::inverse_monomial(ctx, f.clone())?, &t)?;
    }
    Ok(t)
}

/// The residue `r = 1_{ZSS(a)} ∂̄a`.
pub fn residue_of(a: &LaurentForm) -> Current {
    match zss_of(a) {
        None => Current::zero(a.ctx()),
        Some(z) => restrict_to(&z, &dbar(&a.to_current())).expect("same context"),
    }
}

/// The smooth-part `1_{X∖ZSS(a)} ∂̄a`.
pub fn residue_complement(a: &LaurentForm) -> Current {
    let d = dbar(&a.to_current());
    match zss_of(a) {
        None => d,
        Some(z) => restrict_complement(&z, &d).expect("same context"),
    }
}

/// Writes a current without residue factors as a sum `Σ ωₖ ∧ [1/t^{cₖ}]`.
/// Returns `None` if a residue factor is present.
pub fn laurent_decompose(mu: &Current) -> Option<Vec<LaurentForm>> {
    let ctx = mu.ctx();
    let mut out = Vec::new();
    for t in mu.elementary_terms() {
        if !t.res.is_empty() {
            return None;
        }
        let mut e = vec![0; ctx.dim()];
        for p in &t.pv {
            e[p.var] = p.m;
        }
        out.push(LaurentForm { num: t.form, den: Monomial::new(e) });
    }
    Some(out)
}

/// Three-valued answer of [`sep_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SepVerdict {
    Holds,
    Fails,
    Unknown,
}

/// Standard extension property on `Z = ⋃ {t_j = 0 : j ∈ Cₖ}`, given by the
/// variable sets `Cₖ`.
pub fn sep_check(mu: &Current, z: &[BTreeSet<usize>]) -> SepVerdict {
    let comps: Vec<u32> = z.iter().map(|c| c.iter().fold(0u32, |m, &j| m | (1 << j))).collect();
    let mut unknown = false;
    for (key, poly) in mu.terms() {
        let r = key.res_mask();
        if comps.iter().any(|&c| c & r == c && c != r) {
            return SepVerdict::Fails;
        }
        if !comps.contains(&r) {
            return SepVerdict::Fails;
        }
        if vanishes_on(poly, r) {
            unknown = true;
        }
    }
    if unknown {
        SepVerdict::Unknown
    } else {
        SepVerdict::Holds
    }
}

fn vanishes_on(p: &PolyCoeff, mask: u32) -> bool {
    p.restrict_zero(&mask_indices(mask)).is_zero()
}

/// Dimension principle: a `(*, q)` current with support in `V` vanishes
/// when `codim V > q`. Returns whether the principle is respected.
pub fn dimension_check(mu: &Current, v: &CoordinateVariety, q: u32) -> Result<bool> {
    v.ctx.check_same(&mu.ctx())?;
    if mu.terms().any(|(k, _)| !v.contains_subspace(k.res_mask())) {
        return Err(CalcError::SupportNotContained);
    }
    if mu.terms().any(|(k, _)| k.bidegree().1 != q) {
        return Err(CalcError::NotHomogeneous { expected: q as usize });
    }
    Ok(v.codim() <= q || mu.is_zero())
}
