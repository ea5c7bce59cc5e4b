//! Radial integration of top-degree products `T ∧ ψ` whose non-polynomial
//! factors all depend on the variables through the radii `|tⱼ|` only.
//!
//! Once the product is written as `Πⱼ (dtⱼ ∧ Xⱼ)` the angular integral in
//! each variable is exact: a monomial `tⱼ^A t̄ⱼ^B` times a radial function
//! integrates to zero unless `A = B`. Each variable then contributes either
//! a radial integral (`Xⱼ = dt̄ⱼ`) or a point evaluation at `tⱼ = 0`
//! (`Xⱼ` a residue factor). Variables coupled by a factor are integrated
//! together with nested tanh-sinh rules in the squared radii `sⱼ = |tⱼ|²`,
//! split where factors change regime. In these variables every factor is
//! a function of monomials in `s` and the radial weights are polynomial.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::current::{Current, ResFactor};
use crate::error::OracleError;
use crate::form::Basis;
use crate::oracle::profile::{Bump, ChiProfile};
use crate::oracle::quad::TanhSinh;
use crate::oracle::testform::{top_degree_sign, TestForm};

/// `v = constant + Σ radialⱼ |tⱼ|²`, positive, with nonnegative radial
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight {
    pub constant: f64,
    pub radial: Vec<f64>,
}

impl Weight {
    pub fn one(n: usize) -> Self {
        Weight { constant: 1.0, radial: vec![0.0; n] }
    }

    fn eval(&self, s: &[f64]) -> f64 {
        self.constant + self.radial.iter().zip(s).map(|(c, x)| c * x).sum::<f64>()
    }
}

/// A radial factor of the integrand.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Factor {
    /// `φ^{(k)}(|t^e|²)`.
    Bump { exps: Vec<u32>, bump: Bump, k: u32 },
    /// `ε^{-k} χ^{(k)}(Σᵢ|hᵢ|² v / ε)`.
    Chi { h: Vec<Vec<u32>>, weight: Weight, eps: f64, profile: ChiProfile, k: u32 },
    /// `(Σᵢ|hᵢ|²)^{-p}`.
    NegPower { h: Vec<Vec<u32>>, p: u32 },
}

/// `|t^e|²` in terms of the squared radii.
fn mono_sq(e: &[u32], s: &[f64]) -> f64 {
    e.iter().zip(s).filter(|(e, _)| **e > 0).map(|(e, x)| x.powi(*e as i32)).product()
}

fn touches(e: &[u32], mask: u32) -> bool {
    e.iter().enumerate().any(|(j, &x)| x > 0 && mask & (1 << j) != 0)
}

enum Reduced {
    Const(f64),
    Keep(Factor),
}

impl Factor {
    fn eval(&self, r: &[f64]) -> f64 {
        match self {
            Factor::Bump { exps, bump, k } => bump.eval(mono_sq(exps, r), *k as usize),
            Factor::Chi { h, weight, eps, profile, k } => {
                let s: f64 = h.iter().map(|e| mono_sq(e, r)).sum();
                profile.eval(s * weight.eval(r) / eps, *k as usize) * eps.powi(-(*k as i32))
            }
            Factor::NegPower { h, p } => {
                let s: f64 = h.iter().map(|e| mono_sq(e, r)).sum();
                s.powi(-(*p as i32))
            }
        }
    }

    /// Bitmask of the variables the factor depends on.
    fn vars(&self) -> u32 {
        let of = |e: &[u32]| e.iter().enumerate().filter(|(_, &x)| x > 0).fold(0u32, |m, (j, _)| m | 1 << j);
        match self {
            Factor::Bump { exps, .. } => of(exps),
            Factor::Chi { h, weight, .. } => {
                let w = weight.radial.iter().enumerate().filter(|(_, &c)| c != 0.0).fold(0, |m, (j, _)| m | 1 << j);
                h.iter().fold(w, |m, e| m | of(e))
            }
            Factor::NegPower { h, .. } => h.iter().fold(0, |m, e| m | of(e)),
        }
    }

    /// Sets the variables in `mask` to zero.
    fn reduce(&self, mask: u32, n: usize) -> Result<Reduced, OracleError> {
        let zeros = vec![0.0; n];
        let out = match self {
            Factor::Bump { exps, bump, k } => {
                if touches(exps, mask) {
                    return Ok(Reduced::Const(bump.eval(0.0, *k as usize)));
                }
                self.clone()
            }
            Factor::Chi { h, weight, eps, profile, k } => {
                let h: Vec<Vec<u32>> = h.iter().filter(|e| !touches(e, mask)).cloned().collect();
                let mut weight = weight.clone();
                for (j, c) in weight.radial.iter_mut().enumerate() {
                    if mask & (1 << j) != 0 {
                        *c = 0.0;
                    }
                }
                Factor::Chi { h, weight, eps: *eps, profile: *profile, k: *k }
            }
            Factor::NegPower { h, p } => {
                let h: Vec<Vec<u32>> = h.iter().filter(|e| !touches(e, mask)).cloned().collect();
                if h.is_empty() {
                    return Err(OracleError::SingularWeight);
                }
                Factor::NegPower { h, p: *p }
            }
        };
        if out.vars() == 0 {
            Ok(Reduced::Const(out.eval(&zeros)))
        } else {
            Ok(Reduced::Keep(out))
        }
    }

    /// Values of `sⱼ` where the factor changes regime, with the other
    /// variables taken from `r`; searched on `(0, upper)`.
    fn breaks(&self, j: usize, r: &mut [f64], upper: f64, out: &mut Vec<f64>) {
        match self {
            Factor::Bump { exps, bump, .. } => {
                let e = exps[j];
                if e == 0 {
                    return;
                }
                let saved = r[j];
                r[j] = 1.0;
                let m = mono_sq(exps, r);
                r[j] = saved;
                if m > 0.0 {
                    let inv = 1.0 / e as f64;
                    out.push((bump.a / m).powf(inv));
                    out.push((bump.b / m).powf(inv));
                }
            }
            Factor::Chi { h, weight, eps, .. } => {
                let saved = r[j];
                let mut g = |x: f64| {
                    r[j] = x;
                    h.iter().map(|e| mono_sq(e, r)).sum::<f64>() * weight.eval(r) / eps
                };
                let (g0, g1) = (g(0.0), g(upper));
                for level in [1.0, 2.0] {
                    if g0 >= level || g1 <= level {
                        continue;
                    }
                    let (mut lo, mut hi) = (0.0, upper);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if g(mid) < level {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    out.push(0.5 * (lo + hi));
                }
                r[j] = saved;
            }
            Factor::NegPower { .. } => {}
        }
    }
}

/// Left operand: `c t^a t̄^b dt_I ∧ dt̄_J ∧ res… · Π factors`. Negative
/// entries of `a` carry principal value and meromorphic denominators.
#[derive(Clone, Debug)]
pub(crate) struct LTerm {
    pub c: Complex64,
    pub a: Vec<i32>,
    pub b: Vec<i32>,
    pub basis: Basis,
    pub res: Vec<ResFactor>,
    pub factors: Vec<Factor>,
}

/// Right operand: `c t^a t̄^b · Π factors · dt_I ∧ dt̄_J`.
#[derive(Clone, Debug)]
pub(crate) struct RTerm {
    pub c: Complex64,
    pub a: Vec<i32>,
    pub b: Vec<i32>,
    pub basis: Basis,
    pub factors: Vec<Factor>,
}

pub(crate) fn left_terms(tau: &Current) -> Vec<LTerm> {
    let n = tau.dim();
    let mut out = Vec::new();
    for (key, poly) in tau.terms() {
        for (pk, c) in poly.terms() {
            let mut a: Vec<i32> = pk.hol.iter().map(|&x| x as i32).collect();
            for f in &key.pv {
                a[f.var] -= f.m as i32;
            }
            out.push(LTerm {
                c: c.to_complex(),
                a,
                b: pk.anti.iter().map(|&x| x as i32).collect(),
                basis: key.basis,
                res: key.res.clone(),
                factors: Vec::new(),
            });
        }
    }
    debug_assert!(out.iter().all(|t| t.a.len() == n));
    out
}

pub(crate) fn right_terms(psi: &TestForm) -> Vec<RTerm> {
    let n = psi.ctx().dim();
    let mut out = Vec::new();
    for (basis, comp) in psi.components() {
        for (m, c) in comp {
            let factors = (0..n)
                .map(|j| {
                    let mut exps = vec![0; n];
                    exps[j] = 1;
                    Factor::Bump { exps, bump: psi.bumps()[j], k: m.k[j] }
                })
                .collect();
            out.push(RTerm {
                c: *c,
                a: m.alpha.iter().map(|&x| x as i32).collect(),
                b: m.beta.iter().map(|&x| x as i32).collect(),
                basis: *basis,
                factors,
            });
        }
    }
    out
}

/// A top-degree term `c t^a t̄^b Πⱼ(dtⱼ ∧ Xⱼ) · Π factors`.
#[derive(Clone, Debug)]
pub(crate) struct NTerm {
    pub c: Complex64,
    pub a: Vec<i32>,
    pub b: Vec<i32>,
    /// Residue power per variable, `0` where `Xⱼ = dt̄ⱼ`.
    pub res: Vec<u32>,
    pub factors: Vec<Factor>,
}

/// Top-degree part of `L ∧ R`. The flag is set when no pair of terms has
/// complementary bidegree.
pub(crate) fn product(n: usize, left: &[LTerm], right: &[RTerm]) -> (Vec<NTerm>, bool) {
    let mut out = Vec::new();
    let mut any = false;
    for l in left {
        for r in right {
            let mut sym: Vec<(usize, u8)> = Vec::new();
            sym.extend(l.basis.hol_indices().into_iter().map(|j| (j, 0)));
            sym.extend(l.basis.anti_indices().into_iter().map(|j| (j, 1)));
            sym.extend(l.res.iter().map(|f| (f.var, 1)));
            sym.extend(r.basis.hol_indices().into_iter().map(|j| (j, 0)));
            sym.extend(r.basis.anti_indices().into_iter().map(|j| (j, 1)));
            let Some(odd) = top_degree_sign(&sym, n) else { continue };
            any = true;
            let mut res = vec![0; n];
            for f in &l.res {
                res[f.var] = f.m;
            }
            let c = l.c * r.c;
            out.push(NTerm {
                c: if odd { -c } else { c },
                a: l.a.iter().zip(&r.a).map(|(x, y)| x + y).collect(),
                b: l.b.iter().zip(&r.b).map(|(x, y)| x + y).collect(),
                res,
                factors: l.factors.iter().chain(&r.factors).cloned().collect(),
            });
        }
    }
    let mismatch = !any && !left.is_empty() && !right.is_empty();
    (out, mismatch)
}

/// Result of [`integrate`].
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Integral {
    pub value: Complex64,
    pub points: u64,
}

struct Group {
    mask: u32,
    factors: Vec<Factor>,
    /// Coefficient and radial exponent per term.
    terms: Vec<(Complex64, Vec<i32>)>,
}

/// `∫ Σ NTerm`. `res_consts[m-1]` is the constant `c_m` of the residue
/// functional `⟨∂̄[1/t^m], g dt⟩ = c_m ∂^{m-1}g(0)`.
pub(crate) fn integrate(
    n: usize,
    terms: &[NTerm],
    res_consts: &[Complex64],
    quad: &TanhSinh,
) -> Result<Integral, OracleError> {
    let mut groups: Vec<Group> = Vec::new();
    // ∫ s^a (−2i) r dr dθ = −2πi ∫ s^a ds
    let plain = Complex64::new(0.0, -TAU);
    'terms: for t in terms {
        let mut coef = t.c;
        let mut p = vec![0i32; n];
        let mut mask = 0u32;
        for j in 0..n {
            let m = t.res[j];
            if m > 0 {
                if t.a[j] != m as i32 - 1 || t.b[j] != 0 {
                    continue 'terms;
                }
                let cm = *res_consts.get(m as usize - 1).ok_or(OracleError::Uncalibrated { m })?;
                let fact: f64 = (1..m).map(f64::from).product();
                // dtⱼ ∧ ∂̄[1/tⱼᵐ] = −∂̄[1/tⱼᵐ] ∧ dtⱼ
                coef *= -cm * fact;
                mask |= 1 << j;
            } else {
                if t.a[j] != t.b[j] {
                    continue 'terms;
                }
                if t.a[j] < 0 {
                    return Err(OracleError::Unsupported(format!("non-integrable radial power in t{}", j + 1)));
                }
                coef *= plain;
                p[j] = t.a[j];
            }
        }
        let mut factors = Vec::new();
        for f in &t.factors {
            match f.reduce(mask, n)? {
                Reduced::Const(v) => coef *= v,
                Reduced::Keep(f) => factors.push(f),
            }
        }
        if coef == Complex64::new(0.0, 0.0) {
            continue;
        }
        match groups.iter_mut().find(|g| g.mask == mask && g.factors == factors) {
            Some(g) => g.terms.push((coef, p)),
            None => groups.push(Group { mask, factors, terms: vec![(coef, p)] }),
        }
    }
    let mut total = Integral::default();
    for g in &groups {
        let r = integrate_group(n, g, quad)?;
        total.value += r.value;
        total.points += r.points;
    }
    Ok(total)
}

fn integrate_group(n: usize, g: &Group, quad: &TanhSinh) -> Result<Integral, OracleError> {
    let free: Vec<usize> = (0..n).filter(|j| g.mask & (1 << j) == 0).collect();
    // Connected components of the coupling graph on the free variables.
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    let vars: Vec<u32> = g.factors.iter().map(Factor::vars).collect();
    for &v in &vars {
        let idx: Vec<usize> = (0..n).filter(|j| v & (1 << j) != 0).collect();
        for w in idx.windows(2) {
            let (a, b) = (root(&mut comp, w[0]), root(&mut comp, w[1]));
            comp[a] = b;
        }
    }
    let mut comps: BTreeMap<usize, u32> = BTreeMap::new();
    for &j in &free {
        let r = root(&mut comp, j);
        *comps.entry(r).or_default() |= 1 << j;
    }
    let mut points = 0;
    // Per component: distinct restricted exponents and their integrals.
    let mut tables: Vec<(u32, BTreeMap<Vec<i32>, f64>)> = Vec::new();
    for &cmask in comps.values() {
        let restrict = |p: &[i32]| -> Vec<i32> {
            p.iter().enumerate().map(|(j, &x)| if cmask & (1 << j) != 0 { x } else { 0 }).collect()
        };
        let mut ps: Vec<Vec<i32>> = g.terms.iter().map(|(_, p)| restrict(p)).collect();
        ps.sort();
        ps.dedup();
        let factors: Vec<&Factor> =
            g.factors.iter().zip(&vars).filter(|(_, &v)| v & cmask != 0).map(|(f, _)| f).collect();
        let (vals, pts) = nested(n, cmask, &factors, &ps, quad)?;
        points += pts;
        tables.push((cmask, ps.into_iter().zip(vals).collect()));
    }
    let mut value = Complex64::new(0.0, 0.0);
    for (c, p) in &g.terms {
        let mut v = *c;
        for (cmask, table) in &tables {
            let key: Vec<i32> = p.iter().enumerate().map(|(j, &x)| if cmask & (1 << j) != 0 { x } else { 0 }).collect();
            v *= table[&key];
        }
        value += v;
    }
    Ok(Integral { value, points })
}

/// Integrates `Π factors · Π s_j^{p_j}` over the variables in `cmask` for
/// each exponent vector in `ps`.
fn nested(
    n: usize,
    cmask: u32,
    factors: &[&Factor],
    ps: &[Vec<i32>],
    quad: &TanhSinh,
) -> Result<(Vec<f64>, u64), OracleError> {
    // A variable can be integrated once some bump confines it given the
    // variables already placed outside it.
    let mut order = Vec::new();
    let mut placed = 0u32;
    let members: Vec<usize> = (0..n).filter(|j| cmask & (1 << j) != 0).collect();
    while order.len() < members.len() {
        let next = members.iter().copied().find(|&j| {
            placed & (1 << j) == 0
                && factors.iter().any(|f| match f {
                    Factor::Bump { exps, .. } => exps[j] > 0 && f.vars() & !placed & !(1 << j) == 0,
                    _ => false,
                })
        });
        match next {
            Some(j) => {
                order.push(j);
                placed |= 1 << j;
            }
            None => {
                let j = members.iter().copied().find(|&j| placed & (1 << j) == 0).unwrap_or(0);
                return Err(OracleError::SupportLeakage { var: j + 1 });
            }
        }
    }
    // Points where single-variable bumps change regime, used to locate
    // kinks of the inner integrals as functions of outer variables.
    let mut cand: Vec<Vec<f64>> = vec![vec![0.0]; n];
    for f in factors {
        if let Factor::Bump { exps, bump, .. } = f {
            let v = f.vars();
            if v.count_ones() == 1 {
                let j = v.trailing_zeros() as usize;
                let inv = 1.0 / exps[j] as f64;
                cand[j].push(bump.a.powf(inv));
                cand[j].push(bump.b.powf(inv));
            }
        }
    }
    let mut nest = Nest { order, factors, ps, cand, quad, points: 0 };
    let mut acc = vec![0.0; ps.len()];
    let mut r = vec![0.0; n];
    nest.run(0, &mut r, 1.0, &mut acc);
    Ok((acc, nest.points))
}

struct Nest<'a> {
    order: Vec<usize>,
    factors: &'a [&'a Factor],
    ps: &'a [Vec<i32>],
    cand: Vec<Vec<f64>>,
    quad: &'a TanhSinh,
    points: u64,
}

impl Nest<'_> {
    fn run(&mut self, level: usize, r: &mut Vec<f64>, w: f64, acc: &mut [f64]) {
        if level == self.order.len() {
            self.points += 1;
            let mut wv = w;
            for f in self.factors {
                wv *= f.eval(r);
                if wv == 0.0 {
                    return;
                }
            }
            for (k, p) in self.ps.iter().enumerate() {
                let mono: f64 = self.order.iter().map(|&j| r[j].powi(p[j])).product();
                acc[k] += wv * mono;
            }
            return;
        }
        let j = self.order[level];
        let inner: Vec<usize> = self.order[level + 1..].to_vec();
        let fixed: u32 = self.order[..level].iter().fold(0, |m, &i| m | 1 << i);
        let mut upper = f64::INFINITY;
        for f in self.factors {
            if let Factor::Bump { exps, bump, .. } = f {
                if exps[j] > 0 && f.vars() & !fixed & !(1 << j) == 0 {
                    let saved = r[j];
                    r[j] = 1.0;
                    let m = mono_sq(exps, r);
                    r[j] = saved;
                    if m > 0.0 {
                        upper = upper.min((bump.b / m).powf(1.0 / exps[j] as f64));
                    }
                }
            }
        }
        if !upper.is_finite() {
            return;
        }
        let mut breaks = Vec::new();
        for f in self.factors {
            let v = f.vars();
            if v & (1 << j) == 0 {
                continue;
            }
            let free: Vec<usize> = inner.iter().copied().filter(|&i| v & (1 << i) != 0).collect();
            let mut idx = vec![0usize; free.len()];
            let mut tmp = r.clone();
            loop {
                for (slot, &i) in free.iter().enumerate() {
                    tmp[i] = self.cand[i][idx[slot]];
                }
                f.breaks(j, &mut tmp, upper, &mut breaks);
                // odometer over candidate values of the inner variables
                let mut s = 0;
                while s < free.len() {
                    idx[s] += 1;
                    if idx[s] < self.cand[free[s]].len() {
                        break;
                    }
                    idx[s] = 0;
                    s += 1;
                }
                if s == free.len() {
                    break;
                }
            }
        }
        for (x, wt) in self.quad.panel_nodes(0.0, upper, &breaks) {
            r[j] = x;
            self.run(level + 1, r, w * wt, acc);
        }
        r[j] = 0.0;
    }
}
