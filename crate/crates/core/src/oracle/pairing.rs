//! Direct pairings `⟨τ, ψ⟩`, residue constants and the λ-continuation.

use std::f64::consts::TAU;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::current::Current;
use crate::error::OracleError;
use crate::form::Basis;
use crate::monomial::VarContext;
use crate::oracle::cauchy::{derivative_at_zero, CauchySpec};
use crate::oracle::engine::{integrate, left_terms, product, right_terms};
use crate::oracle::profile::Bump;
use crate::oracle::quad::{periodic_mean, TanhSinh};
use crate::oracle::report::PairingReport;
use crate::oracle::testform::TestForm;

/// Quadrature settings shared by all pairings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleOptions {
    /// Tanh-sinh half-steps per panel.
    pub quad_order: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { quad_order: 60 }
    }
}

/// Highest residue power calibrated by [`residue_constants`].
pub const CALIBRATED_MAX: u32 = 8;

/// Tolerance on the relative spread of calibrated constants.
pub const CALIBRATION_TOL: f64 = 1e-6;

pub(crate) fn check_ctx(tau: VarContext, psi: VarContext) -> Result<(), OracleError> {
    tau.check_same(&psi).map_err(OracleError::from)
}

/// `⟨τ, ψ⟩ = ∫ τ ∧ ψ` with the calibrated residue constants.
pub fn pair(tau: &Current, psi: &TestForm, opts: &OracleOptions) -> Result<PairingReport, OracleError> {
    let consts = residue_constants()?;
    pair_with(tau, psi, &consts.constants, opts)
}

pub(crate) fn pair_with(
    tau: &Current,
    psi: &TestForm,
    consts: &[Complex64],
    opts: &OracleOptions,
) -> Result<PairingReport, OracleError> {
    check_ctx(tau.ctx(), psi.ctx())?;
    let start = Instant::now();
    let n = tau.dim();
    let (terms, mismatch) = product(n, &left_terms(tau), &right_terms(psi));
    let quad = TanhSinh::new(opts.quad_order);
    let r = integrate(n, &terms, consts, &quad)?;
    let flags = if mismatch { vec!["degree".to_string()] } else { Vec::new() };
    Ok(PairingReport::direct(r.value, r.points, start.elapsed().as_secs_f64(), flags))
}

/// Residue constants `c_m` with `⟨∂̄[1/t^m], g dt⟩ = c_m ∂^{m-1}g(0)`,
/// measured from `⟨∂̄[1/t^m], ψ dt⟩ = −⟨[1/t^m], ∂̄(ψ dt)⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub constants: Vec<Complex64>,
    /// Per power: `max |cᵢ − c̄| / |c̄|` over the test functions.
    pub spreads: Vec<f64>,
    /// Per power: the individual measurements.
    pub samples: Vec<Vec<Complex64>>,
}

/// Test functions `ψ = t^{m-1} g φ` for the calibration of `c_m`, with
/// varied `g` and bump radii.
pub fn calibration_test_functions(m: u32) -> Vec<TestForm> {
    let ctx = VarContext::new(1).expect("dimension 1");
    let dt = Basis::new(1, 0);
    let d = m - 1;
    let c = Complex64::new;
    let specs: Vec<(Bump, Vec<(Complex64, u32, u32)>)> = vec![
        (Bump::from_radii(0.5, 1.0), vec![(c(1.0, 0.0), d, 0)]),
        (Bump::from_radii(0.3, 0.8), vec![(c(1.0, 0.0), d, 0), (c(0.5, 0.0), d + 1, 1)]),
        (Bump::from_radii(0.6, 1.4), vec![(c(1.0, 1.0), d, 0), (c(1.0, 0.0), d + 1, 0)]),
        (Bump::from_radii(0.2, 0.5), vec![(c(1.0, 0.0), d, 0), (c(0.7, 0.0), 0, 1), (c(1.0, 0.0), d, 2)]),
        (Bump::from_radii(0.4, 1.2), vec![(c(2.0, -1.0), d, 0), (c(0.0, 1.0), d + 2, 1)]),
    ];
    specs
        .into_iter()
        .map(|(bump, terms)| {
            let mut f = TestForm::zero(ctx, vec![bump]);
            for (k, a, b) in terms {
                f.add_term(dt, k, vec![a], vec![b]);
            }
            f
        })
        .collect()
}

/// Measures `c_1, …, c_max_m`. Fails if the spread for some power exceeds
/// `tol`.
pub fn calibrate_residue_constants(max_m: u32, tol: f64, opts: &OracleOptions) -> Result<Calibration, OracleError> {
    let ctx = VarContext::new(1)?;
    // Every calibration test function is polynomial on a disc of radius
    // 0.2, where the contour mean is exact.
    let spec = CauchySpec { points: 64, radius: 0.15, ratio: 0.8, levels: 2 };
    let mut out = Calibration { constants: Vec::new(), spreads: Vec::new(), samples: Vec::new() };
    for m in 1..=max_m {
        let pv = Current::pv(ctx, 0, m)?;
        let mut samples = Vec::new();
        for psi in calibration_test_functions(m) {
            let stokes = pair_with(&pv, &psi.dbar(), &[], opts)?.value();
            let g = |z: Complex64| psi.eval(&Basis::new(1, 0), &[z]);
            let deriv = derivative_at_zero(&g, m as usize - 1, &spec);
            samples.push(-stokes / deriv);
        }
        let mean = samples.iter().sum::<Complex64>() / samples.len() as f64;
        let spread = samples.iter().map(|s| (s - mean).norm()).fold(0.0, f64::max) / mean.norm();
        if !(spread <= tol) {
            return Err(OracleError::Calibration { m, spread });
        }
        out.constants.push(mean);
        out.spreads.push(spread);
        out.samples.push(samples);
    }
    Ok(out)
}

/// Constants calibrated once per process up to [`CALIBRATED_MAX`].
pub fn residue_constants() -> Result<&'static Calibration, OracleError> {
    static CACHE: OnceLock<Result<Calibration, OracleError>> = OnceLock::new();
    CACHE
        .get_or_init(|| calibrate_residue_constants(CALIBRATED_MAX, CALIBRATION_TOL, &OracleOptions::default()))
        .as_ref()
        .map_err(Clone::clone)
}

fn dt_dtb_terms(psi: &TestForm) -> Result<Vec<(Complex64, u32, u32, u32)>, OracleError> {
    if psi.ctx().dim() != 1 {
        return Err(OracleError::Unsupported("pair_lambda works in one variable".into()));
    }
    let mut out = Vec::new();
    for (basis, comp) in psi.components() {
        if *basis == Basis::new(1, 1) {
            for (m, c) in comp {
                out.push((*c, m.alpha[0], m.beta[0], m.k[0]));
            }
        }
    }
    Ok(out)
}

/// `⟨|t|^{2λ}/t^m, ψ⟩`, continued meromorphically in `λ` by radial
/// integration by parts.
pub fn pair_lambda(m: u32, lambda: f64, psi: &TestForm, opts: &OracleOptions) -> Result<Complex64, OracleError> {
    let quad = TanhSinh::new(opts.quad_order);
    let bump = psi.bumps()[0];
    let mut total = Complex64::new(0.0, 0.0);
    for (c, alpha, beta, k) in dt_dtb_terms(psi)? {
        // angular selection: t^{α−m} t̄^β is radial iff α − m = β
        if alpha as i64 - m as i64 != beta as i64 {
            continue;
        }
        let mu = lambda + beta as f64;
        // ∫ s^μ φ^{(k)} = (−1)^K / Πⱼ(μ+j) ∫ s^{μ+K} φ^{(k+K)}, K ≥ 1
        let steps = if mu > -1.0 { 1 } else { (-mu).floor() as u32 + 1 };
        let mut denom = 1.0;
        for j in 1..=steps {
            let d = mu + j as f64;
            if d.abs() < 1e-12 {
                return Err(OracleError::Pole { lambda });
            }
            denom *= d;
        }
        let order = (k + steps) as usize;
        let e = mu + steps as f64;
        let inner = quad.integrate(bump.a, bump.b, |s| s.powf(e) * bump.eval(s, order));
        let sign = if steps % 2 == 1 { -1.0 } else { 1.0 };
        // (−2i)·2π·½ ∫ … ds
        total += c * Complex64::new(0.0, -TAU) * (sign * inner / denom);
    }
    Ok(total)
}

/// `⟨|t|^{2λ}/t^m, ψ⟩` by direct polar quadrature, for `λ` in the region
/// of absolute convergence.
pub fn pair_lambda_direct(m: u32, lambda: f64, psi: &TestForm, opts: &OracleOptions) -> Result<Complex64, OracleError> {
    dt_dtb_terms(psi)?;
    let quad = TanhSinh::new(opts.quad_order);
    let bump = psi.bumps()[0];
    let basis = Basis::new(1, 1);
    let mut re = 0.0;
    let mut im = 0.0;
    for (r, w) in quad.panel_nodes(0.0, bump.b.sqrt(), &[bump.a.sqrt()]) {
        let f = |th: f64| {
            let t = Complex64::from_polar(r, th);
            psi.eval(&basis, &[t]) * t.powi(-(m as i32)) * r.powf(2.0 * lambda + 1.0)
        };
        re += w * periodic_mean(128, |th| f(th).re);
        im += w * periodic_mean(128, |th| f(th).im);
    }
    // (−2i) ∫∫ … r dr dθ
    Ok(Complex64::new(re, im) * TAU * Complex64::new(0.0, -2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_constant_is_two_pi_i() {
        let cal = calibrate_residue_constants(3, CALIBRATION_TOL, &OracleOptions::default()).unwrap();
        let want = Complex64::new(0.0, TAU);
        assert!((cal.constants[0] - want).norm() < 1e-9 * TAU, "{:?}", cal.constants);
        assert!((cal.constants[2] * 2.0 - want).norm() < 1e-9 * TAU);
    }

    #[test]
    fn lambda_continuation_direct_agreement() {
        let ctx = VarContext::new(1).unwrap();
        let mut psi = TestForm::zero_default(ctx);
        psi.add_term(Basis::new(1, 1), Complex64::new(1.0, 0.3), vec![2], vec![1]);
        psi.add_term(Basis::new(1, 1), Complex64::new(0.5, 0.0), vec![1], vec![0]);
        let opts = OracleOptions::default();
        let a = pair_lambda(1, 0.5, &psi, &opts).unwrap();
        let b = pair_lambda_direct(1, 0.5, &psi, &opts).unwrap();
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        assert!(matches!(pair_lambda(1, -1.0, &psi, &opts), Err(OracleError::Pole { .. })));
    }
}
