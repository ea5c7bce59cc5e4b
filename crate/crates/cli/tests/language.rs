use pmcalc::random::Generator;
use pmcalc::{render, Current, Style, VarContext};
use pmcalc_cli::syntax::ExprKind;
use pmcalc_cli::value::Value;
use pmcalc_cli::{parse_command, parse_expr, Checker, Config, Session};
use proptest::prelude::*;

fn session(n: usize) -> Session {
    Session::new(Config { dim: n, ..Config::default() }).unwrap()
}

fn eval(s: &mut Session, text: &str) -> Result<Value, String> {
    let e = parse_expr(text).map_err(|d| d.to_string())?;
    Checker::new(s.ctx().dim()).expr(&e).map_err(|(_, m)| m)?;
    s.eval(&e).map_err(|(_, m)| m)
}

fn current(s: &mut Session, text: &str) -> Current {
    let ctx = s.ctx();
    eval(s, text).unwrap().to_current(ctx).unwrap()
}

fn check_error(n: usize, text: &str) -> String {
    match parse_expr(text) {
        Err(d) => d.message,
        Ok(e) => Checker::new(n).expr(&e).expect_err(text).1,
    }
}

#[test]
fn dbar_of_a_principal_value_parses_to_an_application() {
    let e = parse_expr("dbar(pv(t1,1))").unwrap();
    let ExprKind::Call(f, args) = &e.kind else { panic!("{e:?}") };
    assert_eq!(f, "dbar");
    let ExprKind::Call(g, inner) = &args[0].kind else { panic!("{e:?}") };
    assert_eq!(g, "pv");
    assert!(matches!(inner[0].kind, ExprKind::Var(0)));
    let mut s = session(1);
    assert_eq!(render(&current(&mut s, "dbar(pv(t1,1))"), Style::Ascii), "res(t1,1)");
}

#[test]
fn zero_power_is_rejected() {
    assert_eq!(check_error(1, "pv(t1,0)"), "power must be >= 1");
    assert_eq!(check_error(2, "res(t2,0)"), "power must be >= 1");
}

#[test]
fn same_variable_residues_are_rejected_before_evaluation() {
    assert_eq!(check_error(1, "res(t1,1)^res(t1,2)"), "t1 carries two residue factors");
    assert!(check_error(2, "res(t2,1)^(pv(t1,1) + res(t2,1))").contains("t2 carries two residue factors"));
    assert!(check_error(2, "res(t2,1)**2").contains("two residue factors"));
    assert!(check_error(2, "pv(t2,1)*res(t2,1)").contains("use pvdiv or solvediv"));
}

#[test]
fn static_errors() {
    assert!(check_error(2, "pv(t3,1)").contains("unknown variable t3"));
    assert!(check_error(2, "dbar(t1, t2)").contains("takes 1 argument"));
    assert!(check_error(2, "frobnicate(t1)").contains("unknown operation"));
    assert!(check_error(2, "contract(t1, pv(t1,1))").contains("vector field"));
    assert!(check_error(2, "pair(res(t1,1), t1)").contains("test form"));
    assert!(check_error(2, "undefined + 1").contains("unknown name"));
    assert!(parse_command("let dbar = t1", 1).is_ok());
    let mut c = Checker::new(2);
    let cmd = parse_command("let dbar = t1", 1).unwrap().unwrap();
    assert!(c.command(&cmd).unwrap_err().1.contains("reserved"));
}

#[test]
fn canonical_rendering() {
    let mut s = session(2);
    assert_eq!(render(&current(&mut s, "res(t1,2)"), Style::Ascii), "res(t1,2)");
    assert_eq!(render(&current(&mut s, "pv(t1,1) - pv(t1,1)"), Style::Ascii), "0");
    assert_eq!(render(&current(&mut s, "-pv(t1,1)^res(t2,1)"), Style::Ascii), "-(pv(t1,1)^res(t2,1))");
    assert_eq!(render(&current(&mut s, "res(t2,1)^pv(t1,1)"), Style::Ascii), "pv(t1,1)^res(t2,1)");
    assert_eq!(render(&current(&mut s, "res(t2,1)^res(t1,1)"), Style::Ascii), "-(res(t1,1)^res(t2,1))");
    assert_eq!(current(&mut s, "res(t2,1)^db(t1)"), current(&mut s, "-db(t1)^res(t2,1)"));
}

#[test]
fn division_and_semimeromorphic_products() {
    let mut s = session(2);
    assert_eq!(current(&mut s, "pvdiv(t1, res(t1,1))"), Current::zero(s.ctx()));
    assert_eq!(current(&mut s, "dbarasm(1/t1, pv(t1,1))"), current(&mut s, "res(t1,2)"));
    assert_eq!(current(&mut s, "asmmul((1/t1)*(t1/t2), res(t1,1))"), current(&mut s, "pv(t2,1)^res(t1,1)"));
    assert!(current(&mut s, "asmmul(1/t1, asmmul(t1/t2, res(t1,1)))").is_zero());
    assert!(eval(&mut s, "(1/t1)*pv(t2,1)").unwrap_err().contains("asmmul"));
}

#[test]
fn numbers_and_reports() {
    let mut s = session(1);
    let Value::Num(c) = eval(&mut s, "(1+2*i)*(1-2*i)/10").unwrap() else { panic!() };
    assert_eq!(c.to_string(), "1/2");
    let Value::Real(x) = eval(&mut s, "0.5 * 4").unwrap() else { panic!() };
    assert_eq!(x, 2.0);
    let report = eval(&mut s, "pair(res(t1,1), tf(d(t1)))").unwrap();
    let z = report.to_complex().unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((z.im - two_pi).abs() < 1e-10 && z.re.abs() < 1e-10, "{z}");
}

#[test]
fn changing_dimension_starts_a_fresh_session() {
    let mut s = session(2);
    for line in ["let x = t1", ":dim 3"] {
        s.execute(&parse_command(line, 1).unwrap().unwrap()).unwrap();
    }
    assert_eq!(s.ctx().dim(), 3);
    let err = s.execute(&parse_command("x", 3).unwrap().unwrap()).unwrap_err();
    assert!(err.1.contains("unknown name `x`"));
    assert!(eval(&mut s, "res(t3,1)").is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn render_then_parse_is_the_identity(seed: u64, n in 1usize..=3) {
        let ctx = VarContext::new(n).unwrap();
        let tau = Generator::new(seed).current(ctx);
        let text = render(&tau, Style::Ascii);
        let mut s = session(n);
        let back = eval(&mut s, &text).unwrap_or_else(|e| panic!("{text}: {e}")).to_current(ctx).unwrap();
        prop_assert_eq!(back, tau, "{}", text);
    }
}
