//! ∂, ∂̄, monomial multiplication, contraction with holomorphic vector
//! fields, Lie derivatives and extraction of `dt_I` coefficients.

use crate::current::{Accum, Current, PvFactor, ResFactor, TermKey};
use crate::error::{CalcError, Result};
use crate::form::{count_below, parity, Basis, SmoothForm};
use crate::monomial::{Monomial, VarContext};
use crate::poly::{PolyCoeff, PolyKey};
use crate::scalar::GaussRat;

/// `ξ = Σ pⱼ(t) ∂/∂tⱼ` with holomorphic polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoloVectorField {
    ctx: VarContext,
    comps: Vec<PolyCoeff>,
}

impl HoloVectorField {
    pub fn new(ctx: VarContext, comps: Vec<PolyCoeff>) -> Result<Self> {
        if comps.len() != ctx.dim() {
            return Err(CalcError::ContextMismatch { left: ctx.dim(), right: comps.len() });
        }
        for (index, p) in comps.iter().enumerate() {
            if p.dim() != ctx.dim() {
                return Err(CalcError::ContextMismatch { left: ctx.dim(), right: p.dim() });
            }
            if !p.is_holomorphic() {
                return Err(CalcError::NotHolomorphic { index });
            }
        }
        Ok(HoloVectorField { ctx, comps })
    }

    /// `∂/∂t_var`.
    pub fn coordinate(ctx: VarContext, var: usize) -> Result<Self> {
        ctx.check_var(var)?;
        let n = ctx.dim();
        let comps = (0..n).map(|j| if j == var { PolyCoeff::one(n) } else { PolyCoeff::zero(n) }).collect();
        Ok(HoloVectorField { ctx, comps })
    }

    /// `t_var ∂/∂t_var`.
    pub fn euler(ctx: VarContext, var: usize) -> Result<Self> {
        let mut xi = HoloVectorField::coordinate(ctx, var)?;
        xi.comps[var] = PolyCoeff::from_monomial(&Monomial::var_pow(ctx, var, 1)?);
        Ok(xi)
    }

    pub fn ctx(&self) -> VarContext {
        self.ctx
    }

    pub fn components(&self) -> &[PolyCoeff] {
        &self.comps
    }
}

/// ∂̄τ. Residue factors are ∂̄-closed, so only the coefficient and the pv
/// factors contribute.
pub fn dbar(tau: &Current) -> Current {
    let mut acc = Accum::new(tau.ctx());
    for (key, poly) in tau.terms() {
        coefficient_derivative(&mut acc, key, poly, true);
        let sign0 = parity(key.basis.degree());
        for (i, p) in key.pv.iter().enumerate() {
            let mut pv = key.pv.clone();
            pv.remove(i);
            let before = key.res.iter().filter(|r| r.var < p.var).count() as u32;
            let mut res = key.res.clone();
            res.insert(before as usize, ResFactor { var: p.var, m: p.m });
            let k = TermKey { res, pv, basis: key.basis };
            acc.push_poly(poly, &k, sign0 ^ parity(before));
        }
    }
    acc.finish()
}

/// ∂τ, with `∂[1/tᵐ] = −m dt∧[1/tᵐ⁺¹]` and `∂∂̄[1/tᵐ] = −m dt∧∂̄[1/tᵐ⁺¹]`.
pub fn del(tau: &Current) -> Current {
    let mut acc = Accum::new(tau.ctx());
    for (key, poly) in tau.terms() {
        coefficient_derivative(&mut acc, key, poly, false);
        let Basis { dt, dtb } = key.basis;
        for (i, p) in key.pv.iter().enumerate() {
            if dt & (1 << p.var) != 0 {
                continue;
            }
            let mut pv = key.pv.clone();
            pv[i] = PvFactor { var: p.var, m: p.m + 1 };
            let k = TermKey { res: key.res.clone(), pv, basis: Basis::new(dt | (1 << p.var), dtb) };
            let odd = parity(count_below(dt, p.var));
            acc.push_poly(&poly.scale(&GaussRat::from_int(-i64::from(p.m))), &k, odd);
        }
        for (i, r) in key.res.iter().enumerate() {
            if dt & (1 << r.var) != 0 {
                continue;
            }
            let mut res = key.res.clone();
            res[i] = ResFactor { var: r.var, m: r.m + 1 };
            let k = TermKey { res, pv: key.pv.clone(), basis: Basis::new(dt | (1 << r.var), dtb) };
            let odd = parity(count_below(dt, r.var));
            acc.push_poly(&poly.scale(&GaussRat::from_int(-i64::from(r.m))), &k, odd);
        }
    }
    acc.finish()
}

/// Pushes `Σ_k d_k ∧ ∂f/∂(t or t̄)_k · rest` for one term.
fn coefficient_derivative(acc: &mut Accum, key: &TermKey, poly: &PolyCoeff, anti: bool) {
    let Basis { dt, dtb } = key.basis;
    let n = poly.dim();
    for (mono, c) in poly.terms() {
        for k in 0..n {
            let e = if anti { mono.anti[k] } else { mono.hol[k] };
            if e == 0 {
                continue;
            }
            let (basis, odd) = if anti {
                if dtb & (1 << k) != 0 {
                    continue;
                }
                (Basis::new(dt, dtb | (1 << k)), parity(dt.count_ones() + count_below(dtb, k)))
            } else {
                if dt & (1 << k) != 0 {
                    continue;
                }
                (Basis::new(dt | (1 << k), dtb), parity(count_below(dt, k)))
            };
            let mut m = mono.clone();
            if anti {
                m.anti[k] -= 1;
            } else {
                m.hol[k] -= 1;
            }
            let c = c.scale_int(i64::from(e));
            acc.push(if odd { -c } else { c }, m, basis, &key.pv, &key.res);
        }
    }
}

/// `t^a · τ`, with pv cancellation and residue power lowering.
pub fn mul_monomial(m: &Monomial, tau: &Current) -> Result<Current> {
    if m.dim() != tau.dim() {
        return Err(CalcError::ContextMismatch { left: tau.dim(), right: m.dim() });
    }
    let n = tau.dim();
    let factor = PolyKey { hol: m.exps().to_vec(), anti: vec![0; n] };
    let mut acc = Accum::new(tau.ctx());
    for (key, poly) in tau.terms() {
        for (mono, c) in poly.terms() {
            acc.push(c.clone(), mono.mul(&factor), key.basis, &key.pv, &key.res);
        }
    }
    Ok(acc.finish())
}

/// Multiplies by a polynomial coefficient (re-normalizing).
pub fn mul_poly(p: &PolyCoeff, tau: &Current) -> Current {
    let mut acc = Accum::new(tau.ctx());
    for (key, poly) in tau.terms() {
        acc.push_poly(&p.mul(poly), key, false);
    }
    acc.finish()
}

/// Interior product `ξ⌐τ`: the antiderivation of degree −1 with
/// `dtⱼ ↦ pⱼ`, `dt̄ⱼ ↦ 0` and pv, residue factors ↦ 0.
pub fn contract(xi: &HoloVectorField, tau: &Current) -> Result<Current> {
    xi.ctx.check_same(&tau.ctx())?;
    let mut acc = Accum::new(tau.ctx());
    for (key, poly) in tau.terms() {
        let Basis { dt, dtb } = key.basis;
        for (pos, j) in key.basis.hol_indices().into_iter().enumerate() {
            let pj = &xi.comps[j];
            if pj.is_zero() {
                continue;
            }
            let k = TermKey { res: key.res.clone(), pv: key.pv.clone(), basis: Basis::new(dt & !(1 << j), dtb) };
            acc.push_poly(&pj.mul(poly), &k, parity(pos as u32));
        }
    }
    Ok(acc.finish())
}

/// `L_ξ τ = ξ⌐∂τ + ∂(ξ⌐τ)`.
pub fn lie(xi: &HoloVectorField, tau: &Current) -> Result<Current> {
    Ok(&contract(xi, &del(tau))? + &del(&contract(xi, tau)?))
}

/// Interior product of a smooth form.
pub fn contract_form(xi: &HoloVectorField, beta: &SmoothForm) -> Result<SmoothForm> {
    contract(xi, &Current::from_form(beta))?.as_smooth_form().ok_or(CalcError::NotSmooth)
}

/// `μ_I` in `μ = Σ′_I μ_I ∧ dt_I`, where `I` is a set of 0-based variables.
/// Moving `dt_I` past `dt̄_J` and the residue factors costs
/// `(−1)^{|I|(|J|+#res)}`.
pub fn coeff_extract(mu: &Current, index: &[usize]) -> Result<Current> {
    let mut mask = 0u32;
    for &j in index {
        mu.ctx().check_var(j)?;
        mask |= 1 << j;
    }
    let mut acc = Accum::new(mu.ctx());
    let size = mask.count_ones();
    for (key, poly) in mu.terms() {
        if key.basis.dt != mask {
            continue;
        }
        let odd = parity(size * (key.basis.dtb.count_ones() + key.res.len() as u32));
        let k = TermKey { res: key.res.clone(), pv: key.pv.clone(), basis: Basis::new(0, key.basis.dtb) };
        acc.push_poly(poly, &k, odd);
    }
    Ok(acc.finish())
}

/// All holomorphic multi-indices `I` for which `μ_I ≠ 0`.
pub fn hol_indices_present(mu: &Current) -> Vec<Vec<usize>> {
    let mut masks: Vec<u32> = mu.terms().map(|(k, _)| k.basis.dt).collect();
    masks.sort_unstable();
    masks.dedup();
    masks.into_iter().map(crate::form::mask_indices).collect()
}
