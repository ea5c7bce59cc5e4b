//! Direct images under monomial maps: `⟨π_*τ, ψ⟩ = ⟨τ, π^*ψ⟩`.

use std::time::Instant;

use crate::current::Current;
use crate::error::OracleError;
use crate::form::Basis;
use crate::monomial::{Monomial, VarContext};
use crate::oracle::engine::{integrate, left_terms, product, right_terms, Factor, RTerm};
use crate::oracle::pairing::{check_ctx, residue_constants, OracleOptions};
use crate::oracle::profile::Bump;
use crate::oracle::quad::TanhSinh;
use crate::oracle::report::PairingReport;
use crate::oracle::testform::TestForm;

/// `π(u) = (u^{E_1}, …, u^{E_m})` from a source chart to a target chart,
/// with optional chart weights `Π φ(|u^e|²)` on the source.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialMap {
    source: VarContext,
    target: VarContext,
    comps: Vec<Monomial>,
    weights: Vec<(Monomial, Bump)>,
}

impl MonomialMap {
    pub fn new(source: VarContext, target: VarContext, comps: Vec<Monomial>) -> Result<Self, OracleError> {
        if comps.len() != target.dim() || comps.iter().any(|m| m.dim() != source.dim()) {
            return Err(OracleError::Unsupported("map components do not match the charts".into()));
        }
        Ok(MonomialMap { source, target, comps, weights: Vec::new() })
    }

    pub fn identity(ctx: VarContext) -> Self {
        let n = ctx.dim();
        let comps = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                Monomial::new(e)
            })
            .collect();
        MonomialMap { source: ctx, target: ctx, comps, weights: Vec::new() }
    }

    /// The chart `(u, v) ↦ (u, uv)` of the blowup of the origin in `ℂ²`.
    pub fn blowup_chart() -> Self {
        let ctx = VarContext::new(2).expect("dimension 2");
        MonomialMap::new(ctx, ctx, vec![Monomial::new(vec![1, 0]), Monomial::new(vec![1, 1])]).expect("valid chart")
    }

    pub fn with_weight(mut self, mono: Monomial, bump: Bump) -> Result<Self, OracleError> {
        if mono.dim() != self.source.dim() {
            return Err(OracleError::Unsupported("weight monomial is not on the source chart".into()));
        }
        self.weights.push((mono, bump));
        Ok(self)
    }

    pub fn source(&self) -> VarContext {
        self.source
    }

    pub fn target(&self) -> VarContext {
        self.target
    }

    pub fn components(&self) -> &[Monomial] {
        &self.comps
    }

    /// `π^*(dt_I ∧ dt̄_J)` as `(c, hol, anti, basis)` terms.
    fn pull_basis(&self, basis: &Basis) -> Vec<(f64, Vec<i32>, Vec<i32>, Basis)> {
        let n = self.source.dim();
        let mut acc = vec![(1.0, vec![0i32; n], vec![0i32; n], Basis::EMPTY)];
        for (anti, mask) in [(false, basis.dt), (true, basis.dtb)] {
            for j in (0..self.target.dim()).filter(|j| mask & (1 << j) != 0) {
                let e = self.comps[j].exps();
                let mut next = Vec::new();
                for (c, hol, ant, b) in &acc {
                    // d(u^E) = Σᵢ Eᵢ u^{E−eᵢ} duᵢ
                    for i in (0..n).filter(|&i| e[i] > 0) {
                        let d = if anti { Basis::new(0, 1 << i) } else { Basis::new(1 << i, 0) };
                        let Some((nb, odd)) = b.wedge(&d) else { continue };
                        let mut h = hol.clone();
                        let mut a = ant.clone();
                        let slot = if anti { &mut a } else { &mut h };
                        for (k, x) in slot.iter_mut().enumerate() {
                            *x += e[k] as i32 - i32::from(k == i);
                        }
                        let s = if odd { -1.0 } else { 1.0 };
                        next.push((c * s * e[i] as f64, h, a, nb));
                    }
                }
                acc = next;
            }
        }
        acc
    }

    /// `π^*ψ` on the source chart, times the chart weights.
    pub(crate) fn pullback(&self, psi: &TestForm) -> Vec<RTerm> {
        let n = self.source.dim();
        let mut out = Vec::new();
        for t in right_terms(psi) {
            let mut a = vec![0i32; n];
            let mut b = vec![0i32; n];
            for (j, m) in self.comps.iter().enumerate() {
                for (i, &e) in m.exps().iter().enumerate() {
                    a[i] += t.a[j] * e as i32;
                    b[i] += t.b[j] * e as i32;
                }
            }
            let mut factors: Vec<Factor> = t
                .factors
                .iter()
                .zip(&self.comps)
                .map(|(f, m)| match f {
                    Factor::Bump { bump, k, .. } => Factor::Bump { exps: m.exps().to_vec(), bump: *bump, k: *k },
                    other => other.clone(),
                })
                .collect();
            factors.extend(self.weights.iter().map(|(m, bump)| Factor::Bump {
                exps: m.exps().to_vec(),
                bump: *bump,
                k: 0,
            }));
            for (c, hol, ant, basis) in self.pull_basis(&t.basis) {
                out.push(RTerm {
                    c: t.c * c,
                    a: a.iter().zip(&hol).map(|(x, y)| x + y).collect(),
                    b: b.iter().zip(&ant).map(|(x, y)| x + y).collect(),
                    basis,
                    factors: factors.clone(),
                });
            }
        }
        out
    }
}

/// `⟨π_*τ, ψ⟩ = ⟨τ, π^*ψ⟩`.
pub fn pushforward_pair(
    map: &MonomialMap,
    tau: &Current,
    psi: &TestForm,
    opts: &OracleOptions,
) -> Result<PairingReport, OracleError> {
    let start = Instant::now();
    check_ctx(map.source, tau.ctx())?;
    check_ctx(map.target, psi.ctx())?;
    let consts = &residue_constants()?.constants;
    let n = map.source.dim();
    let (terms, mismatch) = product(n, &left_terms(tau), &map.pullback(psi));
    let quad = TanhSinh::new(opts.quad_order);
    let r = integrate(n, &terms, consts, &quad)?;
    let flags = if mismatch { vec!["degree".to_string()] } else { Vec::new() };
    Ok(PairingReport::direct(r.value, r.points, start.elapsed().as_secs_f64(), flags))
}
