//! `χ`-regularized pairings: `lim_ε ⟨χ(|h|²v/ε) a ∧ τ, ψ⟩` and the
//! Bochner–Martinelli form `∂̄χ(|f|²/ε) ∧ u`.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::current::Current;
use crate::error::OracleError;
use crate::form::{count_below, merge_parity, parity, Basis};
use crate::geometry::LaurentForm;
use crate::monomial::{Monomial, VarContext};
use crate::oracle::engine::{integrate, left_terms, product, right_terms, Factor, Integral, LTerm, Weight};
use crate::oracle::extrapolate::{geometric, richardson};
use crate::oracle::pairing::{check_ctx, residue_constants, OracleOptions};
use crate::oracle::profile::ChiProfile;
use crate::oracle::quad::TanhSinh;
use crate::oracle::report::PairingReport;
use crate::oracle::testform::TestForm;

/// Parameters of `χ(|h|² v / ε)` and of the `ε`-sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizationSpec {
    /// Tuple `h`; `|h|² = Σ |hᵢ|²`.
    pub h: Vec<Monomial>,
    pub weight: Weight,
    pub profile: ChiProfile,
    /// Strictly decreasing.
    pub eps: Vec<f64>,
}

/// Default sweep: `ε₀ = 0.05`, ratio `1/4`, six levels.
pub const DEFAULT_EPS0: f64 = 0.05;
pub const DEFAULT_RATIO: f64 = 0.25;
pub const DEFAULT_LEVELS: usize = 6;

impl RegularizationSpec {
    pub fn new(ctx: VarContext, h: Vec<Monomial>) -> Self {
        RegularizationSpec {
            h,
            weight: Weight::one(ctx.dim()),
            profile: ChiProfile::default(),
            eps: geometric(DEFAULT_EPS0, DEFAULT_RATIO, DEFAULT_LEVELS),
        }
    }

    pub fn with_sweep(mut self, eps0: f64, ratio: f64, levels: usize) -> Self {
        self.eps = geometric(eps0, ratio, levels);
        self
    }

    pub fn with_profile(mut self, profile: ChiProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }

    fn validate(&self, n: usize) -> Result<(), OracleError> {
        let ok = !self.eps.is_empty()
            && self.eps.iter().all(|&e| e > 0.0 && e.is_finite())
            && self.eps.windows(2).all(|w| w[1] < w[0]);
        if !ok {
            return Err(OracleError::BadSequence);
        }
        if self.h.is_empty() || self.h.iter().any(|m| m.dim() != n) || self.weight.radial.len() != n {
            return Err(OracleError::Unsupported("regularization data does not match the dimension".into()));
        }
        if self.weight.constant <= 0.0 || self.weight.radial.iter().any(|&c| c < 0.0) {
            return Err(OracleError::Unsupported("weight must be positive with nonnegative radial part".into()));
        }
        Ok(())
    }

    fn chi(&self, eps: f64, k: u32) -> Factor {
        Factor::Chi {
            h: self.h.iter().map(|m| m.exps().to_vec()).collect(),
            weight: self.weight.clone(),
            eps,
            profile: self.profile,
            k,
        }
    }

    /// Limits in more than one variable pick up `ε log ε` terms.
    fn needs_log(&self) -> bool {
        self.h.len() > 1 || self.h.iter().any(|m| m.support().len() > 1)
    }
}

fn sweep<F>(eps: &[f64], with_log: bool, mismatch: bool, start: Instant, eval: F) -> Result<PairingReport, OracleError>
where
    F: Fn(f64) -> Result<Integral, OracleError> + Sync,
{
    let results: Vec<Integral> = eps.par_iter().map(|&e| eval(e)).collect::<Result<_, _>>()?;
    let values: Vec<Complex64> = results.iter().map(|r| r.value).collect();
    let ex = richardson(eps, &values, with_log);
    let mut flags = Vec::new();
    if mismatch {
        flags.push("degree".to_string());
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if diffs.windows(2).any(|d| d[1] > d[0] + 1e-13 * scale) {
        flags.push("non-monotone".to_string());
    }
    Ok(PairingReport {
        value_re: ex.value.re,
        value_im: ex.value.im,
        eps_values: eps.to_vec(),
        values: values.iter().map(|v| [v.re, v.im]).collect(),
        extrapolated: Some([ex.value.re, ex.value.im]),
        error_indicator: ex.error_indicator,
        quad_points: results.iter().map(|r| r.points).sum(),
        seconds: start.elapsed().as_secs_f64(),
        flags,
    })
}

/// `a ∧ τ` term by term, keeping residue factors of `τ` and moving the
/// denominator of `a` into negative exponents.
fn naive_product(a: &LaurentForm, tau: &Current) -> Vec<LTerm> {
    let den: Vec<i32> = a.denominator().exps().iter().map(|&e| e as i32).collect();
    let right = left_terms(tau);
    let mut out = Vec::new();
    for (ba, pa) in a.numerator().components() {
        for (pk, pc) in pa.terms() {
            for t in &right {
                let Some((basis, odd)) = ba.wedge(&t.basis) else { continue };
                let c = pc.to_complex() * t.c;
                out.push(LTerm {
                    c: if odd { -c } else { c },
                    a: (0..den.len()).map(|j| t.a[j] + pk.hol[j] as i32 - den[j]).collect(),
                    b: (0..den.len()).map(|j| t.b[j] + pk.anti[j] as i32).collect(),
                    basis,
                    res: t.res.clone(),
                    factors: Vec::new(),
                });
            }
        }
    }
    out
}

/// `lim_ε ⟨χ(|h|²v/ε) a ∧ τ, ψ⟩` by an `ε`-sweep and Richardson
/// extrapolation.
pub fn pair_regularized(
    a: &LaurentForm,
    tau: &Current,
    reg: &RegularizationSpec,
    psi: &TestForm,
    opts: &OracleOptions,
) -> Result<PairingReport, OracleError> {
    let start = Instant::now();
    check_ctx(a.ctx(), tau.ctx())?;
    check_ctx(tau.ctx(), psi.ctx())?;
    let n = tau.dim();
    reg.validate(n)?;
    let consts = &residue_constants()?.constants;
    let base = naive_product(a, tau);
    let right = right_terms(psi);
    let (_, mismatch) = product(n, &base, &right);
    let quad = TanhSinh::new(opts.quad_order);
    sweep(&reg.eps, reg.needs_log(), mismatch, start, |eps| {
        let left: Vec<LTerm> = base
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.factors.push(reg.chi(eps, 0));
                t
            })
            .collect();
        let (terms, _) = product(n, &left, &right);
        integrate(n, &terms, consts, &quad)
    })
}

/// `c t^a t̄^b |f|^{-2p} [ε^{-q}χ^{(q)}(|f|²/ε)] dt̄_J`.
#[derive(Clone, Debug)]
struct BmTerm {
    c: f64,
    a: Vec<i32>,
    b: Vec<i32>,
    p: u32,
    chi: Option<u32>,
    mask: u32,
}

fn bm_dbar(t: &BmTerm, f: &[Vec<u32>]) -> Vec<BmTerm> {
    let n = t.a.len();
    let mut out = Vec::new();
    for l in 0..n {
        if t.mask & (1 << l) != 0 {
            continue;
        }
        let sign = if parity(count_below(t.mask, l)) { -1.0 } else { 1.0 };
        let mask = t.mask | 1 << l;
        if t.b[l] > 0 {
            let mut b = t.b.clone();
            b[l] -= 1;
            out.push(BmTerm { c: t.c * sign * t.b[l] as f64, b, mask, ..t.clone() });
        }
        // ∂|f|²/∂t̄ₗ = Σₖ Eₖₗ t^{Eₖ} t̄^{Eₖ−eₗ}
        for e in f {
            if e[l] == 0 {
                continue;
            }
            let a: Vec<i32> = t.a.iter().zip(e).map(|(x, y)| x + *y as i32).collect();
            let mut b: Vec<i32> = t.b.iter().zip(e).map(|(x, y)| x + *y as i32).collect();
            b[l] -= 1;
            let el = e[l] as f64;
            if t.p > 0 {
                out.push(BmTerm {
                    c: -t.c * sign * el * t.p as f64,
                    a: a.clone(),
                    b: b.clone(),
                    p: t.p + 1,
                    chi: t.chi,
                    mask,
                });
            }
            if let Some(q) = t.chi {
                out.push(BmTerm { c: t.c * sign * el, a, b, p: t.p, chi: Some(q + 1), mask });
            }
        }
    }
    out
}

fn bm_wedge(x: &BmTerm, y: &BmTerm) -> Option<BmTerm> {
    if x.mask & y.mask != 0 {
        return None;
    }
    let sign = if merge_parity(x.mask, y.mask) { -1.0 } else { 1.0 };
    let chi = match (x.chi, y.chi) {
        (Some(_), Some(_)) => unreachable!("one cutoff per product"),
        (c, None) | (None, c) => c,
    };
    Some(BmTerm {
        c: x.c * y.c * sign,
        a: x.a.iter().zip(&y.a).map(|(p, q)| p + q).collect(),
        b: x.b.iter().zip(&y.b).map(|(p, q)| p + q).collect(),
        p: x.p + y.p,
        chi,
        mask: x.mask | y.mask,
    })
}

fn bm_wedge_all(xs: &[BmTerm], ys: &[BmTerm]) -> Vec<BmTerm> {
    xs.iter().flat_map(|x| ys.iter().filter_map(move |y| bm_wedge(x, y))).collect()
}

/// Terms of `∂̄χ(|f|²/ε) ∧ Σⱼ (−1)^{j} σⱼ ∧ ⋀_{l≠j} ∂̄σₗ`,
/// `σⱼ = f̄ⱼ/|f|²`.
fn bm_terms(n: usize, f: &[Vec<u32>]) -> Vec<BmTerm> {
    let zero = vec![0i32; n];
    let sigma: Vec<BmTerm> = f
        .iter()
        .map(|e| BmTerm { c: 1.0, a: zero.clone(), b: e.iter().map(|&x| x as i32).collect(), p: 1, chi: None, mask: 0 })
        .collect();
    let dsigma: Vec<Vec<BmTerm>> = sigma.iter().map(|s| bm_dbar(s, f)).collect();
    let mut u = Vec::new();
    for j in 0..f.len() {
        let mut acc = vec![sigma[j].clone()];
        acc[0].c = if j % 2 == 1 { -1.0 } else { 1.0 };
        for (l, ds) in dsigma.iter().enumerate() {
            if l != j {
                acc = bm_wedge_all(&acc, ds);
            }
        }
        u.extend(acc);
    }
    let chi = BmTerm { c: 1.0, a: zero.clone(), b: zero, p: 0, chi: Some(0), mask: 0 };
    bm_wedge_all(&bm_dbar(&chi, f), &u)
}

/// `lim_ε ⟨∂̄χ(|f|²/ε) ∧ u, ψ⟩` for the Bochner–Martinelli form `u` of the
/// tuple `f` with the trivial metric. `reg.h` is ignored; the cutoff uses
/// `|f|²`, `reg.weight`, `reg.profile` and `reg.eps`.
pub fn bm_pair(
    f: &[Monomial],
    psi: &TestForm,
    reg: &RegularizationSpec,
    opts: &OracleOptions,
) -> Result<PairingReport, OracleError> {
    let start = Instant::now();
    let n = psi.ctx().dim();
    if f.is_empty() || f.iter().any(|m| m.dim() != n || m.is_one()) {
        return Err(OracleError::Unsupported(
            "bm_pair needs non-constant monomials in the test form's variables".into(),
        ));
    }
    let reg = RegularizationSpec { h: f.to_vec(), ..reg.clone() };
    reg.validate(n)?;
    let exps: Vec<Vec<u32>> = f.iter().map(|m| m.exps().to_vec()).collect();
    let terms = bm_terms(n, &exps);
    let right = right_terms(psi);
    let shape = |eps: f64| -> Vec<LTerm> {
        terms
            .iter()
            .map(|t| {
                let mut factors = vec![reg.chi(eps, t.chi.unwrap_or(0))];
                if t.p > 0 {
                    factors.push(Factor::NegPower { h: exps.clone(), p: t.p });
                }
                LTerm {
                    c: Complex64::new(t.c, 0.0),
                    a: t.a.clone(),
                    b: t.b.clone(),
                    basis: Basis::new(0, t.mask),
                    res: Vec::new(),
                    factors,
                }
            })
            .collect()
    };
    let (_, mismatch) = product(n, &shape(reg.eps[0]), &right);
    let quad = TanhSinh::new(opts.quad_order);
    sweep(&reg.eps, true, mismatch, start, |eps| {
        let (terms, _) = product(n, &shape(eps), &right);
        integrate(n, &terms, &[], &quad)
    })
}
