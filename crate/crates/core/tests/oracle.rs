use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use pmcalc::calculus::{dbar, del};
use pmcalc::geometry::{asm_mul, ch_product, pv_divide, restrict_complement};
use pmcalc::oracle::cauchy::{contour_coefficient, derivative_at_zero, CauchySpec};
use pmcalc::oracle::pairing::{calibrate_residue_constants, CALIBRATION_TOL};
use pmcalc::oracle::{
    bm_pair, pair, pair_lambda, pair_lambda_direct, pair_regularized, pushforward_pair, residue_constants, Bump,
    ChiProfile, MonomialMap, OracleOptions, RegularizationSpec, TestForm, Weight,
};
use pmcalc::random::Generator;
use pmcalc::{
    Basis, CoordinateVariety, Current, LaurentForm, Monomial, OracleError, RawTerm, ResFactor, SmoothForm, VarContext,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ctx(n: usize) -> VarContext {
    VarContext::new(n).unwrap()
}

fn opts() -> OracleOptions {
    OracleOptions::default()
}

/// Composite Simpson rule, used as an independent reference.
fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm().max(1e-300)
}

fn psi_for(targets: &[&Current], rng: &mut ChaCha8Rng) -> TestForm {
    let n = targets[0].dim();
    let mut psi = TestForm::zero_default(targets[0].ctx());
    for t in targets {
        psi = psi.add(&TestForm::matching(t, rng, vec![Bump::default(); n]));
    }
    psi
}

#[test]
fn residue_pairing_is_two_pi_i_times_value() {
    let k = ctx(1);
    let mut psi = TestForm::zero_default(k);
    psi.add_term(Basis::new(1, 0), c(0.7, -0.2), vec![0], vec![0]);
    psi.add_term(Basis::new(1, 0), c(1.0, 0.0), vec![1], vec![2]);
    let got = pair(&Current::res(k, 0, 1).unwrap(), &psi, &opts()).unwrap().value();
    let want = c(0.0, TAU) * c(0.7, -0.2);
    assert!(close(got, want, 1e-9), "{got} vs {want}");
}

#[test]
fn principal_value_of_t_over_t_is_the_bump_mass() {
    // ⟨[1/t], t φ (i/2) dt∧dt̄⟩ = ∫ φ dλ = 2π ∫ r φ(r²) dr
    let k = ctx(1);
    let mut psi = TestForm::zero_default(k);
    psi.add_term(Basis::new(1, 1), c(0.0, 0.5), vec![1], vec![0]);
    let got = pair(&Current::pv(k, 0, 1).unwrap(), &psi, &opts()).unwrap().value();
    let b = Bump::default();
    let want = TAU * simpson(0.0, 1.0, 20000, |r| r * b.eval(r * r, 0));
    assert!(got.im.abs() < 1e-12);
    assert!((got.re - want).abs() < 1e-9, "{got} vs {want}");
}

#[test]
fn product_of_residues_is_the_square_of_c1() {
    let k = ctx(2);
    let mut psi = TestForm::zero_default(k);
    psi.add_term(Basis::new(3, 0), c(1.5, 0.5), vec![0, 0], vec![0, 0]);
    psi.add_term(Basis::new(3, 0), c(1.0, 0.0), vec![1, 0], vec![0, 1]);
    let raw = RawTerm {
        form: SmoothForm::one(k),
        pv: vec![],
        res: vec![ResFactor { var: 0, m: 1 }, ResFactor { var: 1, m: 1 }],
        negate: false,
    };
    let tau = Current::normalize(k, &[raw]).unwrap();
    let c1 = residue_constants().unwrap().constants[0];
    let got = pair(&tau, &psi, &opts()).unwrap().value();
    // res₁∧res₂∧dt₁∧dt₂ = −(res₁∧dt₁)∧(res₂∧dt₂): one transposition
    let want = -c1 * c1 * c(1.5, 0.5);
    assert!(close(got, want, 1e-9), "{got} vs {want}");
}

#[test]
fn mismatched_degree_is_exact_zero_with_flag() {
    let k = ctx(2);
    let mut psi = TestForm::zero_default(k);
    psi.add_term(Basis::new(1, 0), c(1.0, 0.0), vec![0, 0], vec![0, 0]);
    let r = pair(&Current::res(k, 0, 1).unwrap(), &psi, &opts()).unwrap();
    assert_eq!(r.value(), c(0.0, 0.0));
    assert!(r.has_flag("degree"));
}

#[test]
fn degree_orthogonality_on_random_data() {
    let mut g = Generator::new(41);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 1..=3 {
        let k = ctx(n);
        for _ in 0..10 {
            let tau = g.current(k);
            let Some(d) = tau.homogeneous_degree() else { continue };
            for p in 0..=n {
                for q in 0..=n {
                    if (p + q) as u32 + d == 2 * n as u32 {
                        continue;
                    }
                    let psi = TestForm::random(k, p, q, &mut rng, vec![Bump::default(); n]);
                    assert_eq!(pair(&tau, &psi, &opts()).unwrap().value(), c(0.0, 0.0));
                }
            }
        }
    }
}

#[test]
fn calibration_examples() {
    let cal = calibrate_residue_constants(4, CALIBRATION_TOL, &opts()).unwrap();
    let two_pi_i = c(0.0, TAU);
    assert!(close(cal.constants[0], two_pi_i, 1e-6));
    assert!(close(cal.constants[1], two_pi_i, 1e-6));
    let mut fact = 1.0;
    for m in 1..=4 {
        if m > 1 {
            fact *= (m - 1) as f64;
        }
        let ratio = cal.constants[m - 1] / cal.constants[0];
        assert!((ratio - 1.0 / fact).norm() < 1e-6, "m={m}: {ratio}");
        assert!(cal.spreads[m - 1] <= 1e-6);
        assert_eq!(cal.samples[m - 1].len(), 5);
    }
}

#[test]
fn calibration_rejects_an_impossible_tolerance() {
    let err = calibrate_residue_constants(2, 0.0, &opts());
    assert!(matches!(err, Err(OracleError::Calibration { .. })) || err.unwrap().spreads.iter().all(|&s| s == 0.0));
}

#[test]
fn contour_derivative_is_exact_on_monomials() {
    for k in 0..8usize {
        let g = move |z: Complex64| z.powu(k as u32) + z.conj() * 0.5;
        for j in 0..8usize {
            let want = if j == k { (1..=k).map(|x| x as f64).product::<f64>() } else { 0.0 };
            let fact: f64 = (1..=j).map(|x| x as f64).product();
            let one = contour_coefficient(&g, j, 1.0, 32);
            assert!((one - want).norm() < 1e-14 * fact * (1.0 + want), "t^{k}, order {j}: {one}");
            if j <= 3 {
                let d = derivative_at_zero(&g, j, &CauchySpec::default());
                assert!((d - want).norm() < 1e-9 * (1.0 + want), "t^{k}, order {j}: {d}");
            }
        }
    }
}

fn stokes_check(tau: &Current, psi: &TestForm, anti: bool, tol: f64) {
    let d = tau.homogeneous_degree().unwrap();
    let sign = if d % 2 == 0 { -1.0 } else { 1.0 };
    let (lhs_cur, rhs_form) = if anti { (dbar(tau), psi.dbar()) } else { (del(tau), psi.del()) };
    let lhs = pair(&lhs_cur, psi, &opts()).unwrap().value();
    let rhs = pair(tau, &rhs_form, &opts()).unwrap().value() * sign;
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    assert!((lhs - rhs).norm() <= tol * scale, "{lhs} vs {rhs} for {}", pmcalc::render(tau, Default::default()));
}

#[test]
fn stokes_duality_on_random_currents() {
    let mut g = Generator::new(7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for n in 1..=3 {
        let k = ctx(n);
        for _ in 0..12 {
            let tau = g.current(k);
            let Some(d) = tau.bidegree().iter().map(|(p, q)| p + q).max() else { continue };
            let tau = tau.degree_part(d);
            if tau.is_zero() || 2 * n as u32 <= d {
                continue;
            }
            let pv = tau.terms().any(|(key, _)| !key.pv.is_empty());
            let tol = if pv { 1e-4 } else { 1e-6 };
            for anti in [true, false] {
                let target = if anti { dbar(&tau) } else { del(&tau) };
                let psi = psi_for(&[&target], &mut rng);
                stokes_check(&tau, &psi, anti, tol);
                checked += 1;
            }
        }
    }
    assert!(checked >= 30);
}

#[test]
fn regularized_examples() {
    let k1 = ctx(1);
    let t = Monomial::new(vec![1]);
    let mut psi = TestForm::zero_default(k1);
    psi.add_term(Basis::new(1, 1), c(1.0, 0.2), vec![1], vec![0]);
    psi.add_term(Basis::new(1, 0), c(0.3, 0.0), vec![0], vec![0]);
    let inv = LaurentForm::inverse_monomial(k1, t.clone()).unwrap();
    let reg = RegularizationSpec::new(k1, vec![t.clone()]);
    let got = pair_regularized(&inv, &Current::one(k1), &reg, &psi, &opts()).unwrap();
    let want = pair(&Current::pv(k1, 0, 1).unwrap(), &psi, &opts()).unwrap().value();
    assert!((got.value() - want).norm() <= got.error_indicator + 1e-9 * want.norm());

    // (1/t)∂̄(1/t) = 0
    let got = pair_regularized(&inv, &Current::res(k1, 0, 1).unwrap(), &reg, &psi, &opts()).unwrap();
    assert!(got.value().norm() < 1e-12);
}

#[test]
fn oracle_agrees_with_geometry_operations() {
    let mut g = Generator::new(19);
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let k = ctx(2);
    let mut checked = 0;
    for round in 0..12 {
        let mu = g.current(k);
        let h = g.monomial(k, 2);
        let v = CoordinateVariety::zero_set(&h, k).unwrap();
        let one = LaurentForm::from_form(SmoothForm::one(k));
        let inv = LaurentForm::inverse_monomial(k, h.clone()).unwrap();
        let reg = RegularizationSpec::new(k, vec![h.radical()]);
        let cases = [
            (restrict_complement(&v, &mu).unwrap(), one),
            (pv_divide(&h, &mu).unwrap(), inv.clone()),
            (asm_mul(&inv, &mu).unwrap(), inv),
        ];
        for (sym, a) in cases {
            let psi = psi_for(&[&sym, &mu], &mut rng);
            let num = pair_regularized(&a, &mu, &reg, &psi, &opts()).unwrap();
            let want = pair(&sym, &psi, &opts()).unwrap().value();
            let floor = 1e-8 * want.norm().max(1.0);
            assert!((num.value() - want).norm() <= num.error_indicator + floor, "round {round}: {:?} vs {want}", num);
            checked += 1;
        }
    }
    assert_eq!(checked, 36);
}

#[test]
fn limits_do_not_depend_on_profile_or_weight() {
    let k = ctx(2);
    let h = Monomial::new(vec![1, 1]);
    let inv = LaurentForm::inverse_monomial(k, h.clone()).unwrap();
    let tau = Current::one(k);
    let sym = asm_mul(&inv, &tau).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = psi_for(&[&sym], &mut rng);
    let want = pair(&sym, &psi, &opts()).unwrap().value();
    let base = RegularizationSpec::new(k, vec![h.clone()]);
    let variants = [
        base.clone(),
        base.clone().with_profile(ChiProfile::Exp),
        base.with_weight(Weight { constant: 0.5, radial: vec![1.0, 0.25] }),
    ];
    for reg in variants {
        let r = pair_regularized(&inv, &tau, &reg, &psi, &opts()).unwrap();
        assert!((r.value() - want).norm() <= 1e-5 * want.norm(), "{:?} vs {want}", r);
    }
}

#[test]
fn regularization_rejects_bad_sequences() {
    let k = ctx(1);
    let t = Monomial::new(vec![1]);
    let mut reg = RegularizationSpec::new(k, vec![t.clone()]);
    reg.eps = vec![0.1, 0.2];
    let inv = LaurentForm::inverse_monomial(k, t).unwrap();
    let psi = TestForm::zero_default(k);
    assert_eq!(pair_regularized(&inv, &Current::one(k), &reg, &psi, &opts()).unwrap_err(), OracleError::BadSequence);
}

fn lambda_test_form() -> TestForm {
    let mut psi = TestForm::zero_default(ctx(1));
    let b = Basis::new(1, 1);
    psi.add_term(b, c(1.0, 0.0), vec![1], vec![0]);
    psi.add_term(b, c(0.5, 0.5), vec![2], vec![0]);
    psi.add_term(b, c(-0.3, 0.1), vec![3], vec![1]);
    psi.add_term(b, c(0.2, 0.0), vec![0], vec![1]);
    psi
}

#[test]
fn lambda_continuation_examples() {
    let psi = lambda_test_form();
    let k = ctx(1);
    for m in 1..=2 {
        let at0 = pair_lambda(m, 0.0, &psi, &opts()).unwrap();
        let pv = pair(&Current::pv(k, 0, m).unwrap(), &psi, &opts()).unwrap().value();
        assert!((at0 - pv).norm() < 1e-4 * pv.norm().max(1.0), "m={m}: {at0} vs {pv}");
        assert!(pv.norm() > 1e-3);
    }
    let a = pair_lambda(1, 0.5, &psi, &opts()).unwrap();
    let b = pair_lambda_direct(1, 0.5, &psi, &opts()).unwrap();
    assert!((a - b).norm() < 1e-6 * b.norm(), "{a} vs {b}");
    assert!(matches!(pair_lambda(2, -1.0, &psi, &opts()), Err(OracleError::Pole { .. })));
}

#[test]
fn pushforward_examples() {
    let k = ctx(2);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tau = Current::pv(k, 0, 1).unwrap();
    let psi = psi_for(&[&tau], &mut rng);
    let direct = pair(&tau, &psi, &opts()).unwrap().value();
    let id = pushforward_pair(&MonomialMap::identity(k), &tau, &psi, &opts()).unwrap().value();
    assert!(close(id, direct, 1e-12));
    let up = pushforward_pair(&MonomialMap::blowup_chart(), &tau, &psi, &opts()).unwrap().value();
    assert!(close(up, direct, 1e-3), "{up} vs {direct}");

    // projection (t₁, t₂) ↦ t₁ with a weight in t₂
    let k1 = ctx(1);
    let w = Bump::from_radii(0.4, 0.9);
    let proj = MonomialMap::new(k, k1, vec![Monomial::new(vec![1, 0])])
        .unwrap()
        .with_weight(Monomial::new(vec![0, 1]), w)
        .unwrap();
    let fiber = SmoothForm::dt(k, 1).unwrap().wedge(&SmoothForm::dtb(k, 1).unwrap());
    let tau = Current::res(k, 0, 1).unwrap().try_wedge_left(&fiber).unwrap();
    let mut psi = TestForm::zero_default(k1);
    psi.add_term(Basis::new(1, 0), c(0.8, 0.3), vec![0], vec![0]);
    psi.add_term(Basis::new(1, 0), c(1.0, 0.0), vec![1], vec![1]);
    let got = pushforward_pair(&proj, &tau, &psi, &opts()).unwrap().value();
    let mass = simpson(w.a, w.b, 20000, |s| w.eval(s, 0)) + w.a;
    let want = c(0.0, -PI * 2.0) * mass * c(0.0, TAU) * c(0.8, 0.3);
    assert!(close(got, want, 1e-3), "{got} vs {want}");
}

#[test]
fn unconfined_pullback_is_reported() {
    let k = ctx(2);
    let k1 = ctx(1);
    let proj = MonomialMap::new(k, k1, vec![Monomial::new(vec![1, 0])]).unwrap();
    let fiber = SmoothForm::dt(k, 1).unwrap().wedge(&SmoothForm::dtb(k, 1).unwrap());
    let tau = Current::res(k, 0, 1).unwrap().try_wedge_left(&fiber).unwrap();
    let mut psi = TestForm::zero_default(k1);
    psi.add_term(Basis::new(1, 0), c(1.0, 0.0), vec![0], vec![0]);
    assert!(matches!(pushforward_pair(&proj, &tau, &psi, &opts()), Err(OracleError::SupportLeakage { .. })));
}

#[test]
fn bochner_martinelli_examples() {
    let k = ctx(2);
    let f = [Monomial::new(vec![1, 0]), Monomial::new(vec![0, 1])];
    let ch = ch_product(k, &f).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let psi = psi_for(&[&ch], &mut rng);
    let reg = RegularizationSpec::new(k, f.to_vec());
    let bm = bm_pair(&f, &psi, &reg, &opts()).unwrap();
    let want = pair(&ch, &psi, &opts()).unwrap().value();
    assert!(close(bm.value(), want, 1e-2), "{:?} vs {want}", bm);

    let k1 = ctx(1);
    for m in 1..=2 {
        let f = [Monomial::new(vec![m])];
        let res = Current::res(k1, 0, m).unwrap();
        let psi = psi_for(&[&res], &mut rng);
        let bm = bm_pair(&f, &psi, &RegularizationSpec::new(k1, f.to_vec()), &opts()).unwrap();
        let want = pair(&res, &psi, &opts()).unwrap().value();
        assert!(close(bm.value(), want, 1e-3), "m={m}: {:?} vs {want}", bm);
    }
}

#[test]
fn reports_are_deterministic() {
    let k = ctx(2);
    let h = Monomial::new(vec![1, 1]);
    let inv = LaurentForm::inverse_monomial(k, h.clone()).unwrap();
    let tau = Current::res(k, 0, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = psi_for(&[&asm_mul(&inv, &tau).unwrap()], &mut rng);
    let reg = RegularizationSpec::new(k, vec![h]);
    let a = pair_regularized(&inv, &tau, &reg, &psi, &opts()).unwrap().without_timing();
    let b = pair_regularized(&inv, &tau, &reg, &psi, &opts()).unwrap().without_timing();
    assert_eq!(a, b);
    let keys: BTreeSet<String> = serde_json::to_value(&a).unwrap().as_object().unwrap().keys().cloned().collect();
    for key in ["value_re", "value_im", "eps_values", "extrapolated", "error_indicator", "quad_points", "seconds"] {
        assert!(keys.contains(key), "{key}");
    }
}
