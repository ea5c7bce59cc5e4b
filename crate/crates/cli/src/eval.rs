//! Static checking and evaluation of commands against a session.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pmcalc::calculus::{coeff_extract, contract, dbar, del, lie, mul_poly, HoloVectorField};
use pmcalc::geometry::{
    asm_mul, ch_product, dbar_asm_mul, dimension_check, pv_divide, residue_of, restrict_complement, restrict_to,
    sep_check, solve_divide, zss_of,
};
use pmcalc::oracle::pairing::CALIBRATION_TOL;
use pmcalc::oracle::regularized::DEFAULT_EPS0;
use pmcalc::oracle::{
    bm_pair, calibrate_residue_constants, pair, pair_lambda, pair_regularized, pushforward_pair, Bump, MonomialMap,
    OracleOptions, RegularizationSpec, TestForm,
};
use pmcalc::random::Generator;
use pmcalc::{CalcError, CoordinateVariety, Current, GaussRat, LaurentForm, SepVerdict, SmoothForm, Style, VarContext};

use crate::syntax::{BinOp, Command, Expr, ExprKind, Span};
use crate::value::{complex_text, show, Kind, Value};

/// Session settings, fixed for the lifetime of a session except `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub dim: usize,
    pub seed: u64,
    /// Absolute tolerance of `assert_zero` on numbers.
    pub tol: f64,
    pub eps0: f64,
    pub eps_ratio: f64,
    pub eps_levels: usize,
    pub quad_order: usize,
    /// Support radius of the test-form bumps; the plateau is half of it.
    pub bump_radius: f64,
    pub style: Style,
    /// Keep wall-clock times in reports.
    pub timing: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            dim: 2,
            seed: 0,
            tol: 1e-6,
            eps0: DEFAULT_EPS0,
            eps_ratio: 0.25,
            eps_levels: 6,
            quad_order: OracleOptions::default().quad_order,
            bump_radius: 1.0,
            style: Style::Ascii,
            timing: false,
        }
    }
}

pub type Error = (Span, String);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Param {
    Current,
    Laurent,
    Mono,
    /// One monomial or a tuple of them.
    Monos,
    /// Tuple of `n` holomorphic polynomials.
    Field,
    /// 1-based variable index or a tuple of them.
    Index,
    Variety,
    TestForm,
    Map,
    Int,
    Real,
}

struct Verb {
    params: &'static [Param],
    rest: Option<Param>,
    ret: Kind,
}

fn verb(name: &str) -> Option<Verb> {
    use Param::*;
    let v = |params: &'static [Param], ret: Kind| Verb { params, rest: None, ret };
    let rest = |p: Param, ret: Kind| Verb { params: &[], rest: Some(p), ret };
    Some(match name {
        "dbar" | "del" => v(&[Current], Kind::Current),
        "mul" => v(&[Current, Current], Kind::Current),
        "contract" | "lie" => v(&[Field, Current], Kind::Current),
        "coeff" => v(&[Current, Index], Kind::Current),
        "restrict" | "restrictc" => v(&[Variety, Current], Kind::Current),
        "pvdiv" | "solvediv" => v(&[Mono, Current], Kind::Current),
        "asmmul" | "dbarasm" => v(&[Laurent, Current], Kind::Current),
        "ch" => rest(Mono, Kind::Current),
        "residue" => v(&[Laurent], Kind::Current),
        "zss" => v(&[Laurent], Kind::Variety),
        "sep" => v(&[Current, Variety], Kind::Verdict),
        "dimcheck" => v(&[Current, Variety, Int], Kind::Bool),
        "pair" => v(&[Current, TestForm], Kind::Report),
        "pairreg" => v(&[Laurent, Current, Monos, TestForm], Kind::Report),
        "pairlambda" => v(&[Int, Real, TestForm], Kind::Complex),
        "push" => v(&[Map, Current, TestForm], Kind::Report),
        "bm" => v(&[Monos, TestForm], Kind::Report),
        "calibrate" => v(&[Int], Kind::Calibration),
        "chart" => rest(Mono, Kind::Map),
        "blowup" => v(&[], Kind::Map),
        "rand" => v(&[], Kind::Current),
        "randform" => v(&[Int], Kind::Current),
        "tf" | "matchtf" => v(&[Current], Kind::TestForm),
        "randtf" => v(&[Int, Int], Kind::TestForm),
        _ => return None,
    })
}

/// Names of the factor constructors `pv(tj,m)`, `res(tj,m)`, `d(tj)`,
/// `db(tj)`, `cj(tj)`.
fn leaf_arity(name: &str) -> Option<usize> {
    match name {
        "pv" | "res" => Some(2),
        "d" | "db" | "cj" => Some(1),
        _ => None,
    }
}

/// Verbs without arguments may be written without parentheses.
fn is_nullary(name: &str) -> bool {
    verb(name).is_some_and(|v| v.params.is_empty() && v.rest.is_none())
}

fn constant(name: &str) -> Option<Value> {
    match name {
        "true" => Some(Value::Bool(true)),
        "false" => Some(Value::Bool(false)),
        "holds" => Some(Value::Verdict(SepVerdict::Holds)),
        "fails" => Some(Value::Verdict(SepVerdict::Fails)),
        "unknown" => Some(Value::Verdict(SepVerdict::Unknown)),
        _ => None,
    }
}

fn param_fits(p: Param, k: &Kind, n: usize) -> bool {
    let cur = |k: &Kind| k.fits(&Kind::Current);
    match p {
        Param::Current | Param::Mono => cur(k),
        Param::Laurent => k.fits(&Kind::Laurent),
        Param::Monos => cur(k) || matches!(k, Kind::Tuple(v) if v.iter().all(cur)),
        Param::Field => match k {
            Kind::Tuple(v) => v.len() == n && v.iter().all(cur),
            k => n == 1 && cur(k),
        },
        Param::Index => *k == Kind::Num || matches!(k, Kind::Tuple(v) if v.iter().all(|x| *x == Kind::Num)),
        Param::Variety => *k == Kind::Variety,
        Param::TestForm => *k == Kind::TestForm,
        Param::Map => *k == Kind::Map,
        Param::Int => *k == Kind::Num,
        Param::Real => k.fits(&Kind::Real),
    }
}

fn param_name(p: Param, n: usize) -> String {
    match p {
        Param::Current => "a current".into(),
        Param::Laurent => "a semi-meromorphic form".into(),
        Param::Mono => "a monomial".into(),
        Param::Monos => "a monomial or a tuple of monomials".into(),
        Param::Field => format!("a vector field ({n} holomorphic components)"),
        Param::Index => "a variable index or a tuple of indices".into(),
        Param::Variety => "a variety V[...]".into(),
        Param::TestForm => "a test form".into(),
        Param::Map => "a monomial map".into(),
        Param::Int => "an integer".into(),
        Param::Real => "a real number".into(),
    }
}

/// Residue and principal-value variables of a literal expression, as bit
/// masks, or `None` when they are only known after evaluation.
type Singular = Option<(u32, u32)>;

fn clash(span: Span, a: (u32, u32), b: (u32, u32)) -> Result<(), Error> {
    let dup = a.0 & b.0;
    if dup != 0 {
        return Err((span, CalcError::DuplicateResidue { var: dup.trailing_zeros() as usize }.to_string()));
    }
    let mixed = (a.0 & b.1) | (a.1 & b.0);
    if mixed != 0 {
        return Err((span, CalcError::MixedFactor { var: mixed.trailing_zeros() as usize }.to_string()));
    }
    Ok(())
}

/// Rejects products that put two residue factors, or a residue and a
/// principal value factor, on one variable.
fn singular(e: &Expr) -> Result<Singular, Error> {
    Ok(match &e.kind {
        ExprKind::Int(_) | ExprKind::Real(_) | ExprKind::Imag | ExprKind::Var(_) => Some((0, 0)),
        ExprKind::Name(_) => None,
        ExprKind::Call(name, args) => {
            let inner: Vec<Singular> = args.iter().map(singular).collect::<Result<_, _>>()?;
            match (name.as_str(), args.first().map(|a| &a.kind)) {
                ("pv", Some(ExprKind::Var(j))) => Some((0, 1 << j)),
                ("res", Some(ExprKind::Var(j))) => Some((1 << j, 0)),
                ("d" | "db" | "cj", _) => Some((0, 0)),
                _ => {
                    drop(inner);
                    None
                }
            }
        }
        ExprKind::Neg(x) => singular(x)?,
        ExprKind::Pow(x, k) => {
            let s = singular(x)?;
            if let Some(s) = s {
                if *k >= 2 {
                    clash(e.span, s, s)?;
                }
            }
            s
        }
        ExprKind::Bin(op, a, b) => {
            let (sa, sb) = (singular(a)?, singular(b)?);
            match (op, sa, sb) {
                (BinOp::Mul, Some(x), Some(y)) => {
                    clash(e.span, x, y)?;
                    Some((x.0 | y.0, x.1 | y.1))
                }
                (BinOp::Add | BinOp::Sub, Some(x), Some(y)) => Some((x.0 | y.0, x.1 | y.1)),
                (BinOp::Div, Some(x), Some((0, 0))) => Some(x),
                _ => None,
            }
        }
        ExprKind::Tuple(items) | ExprKind::Variety(items) => {
            for x in items {
                singular(x)?;
            }
            None
        }
    })
}

/// Kind inference with arity and type checks.
#[derive(Clone, Debug)]
pub struct Checker {
    n: usize,
    kinds: HashMap<String, Kind>,
}

impl Checker {
    pub fn new(n: usize) -> Self {
        Checker { n, kinds: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Checks a command and records the kinds of new bindings.
    pub fn command(&mut self, cmd: &Command) -> Result<(), Error> {
        match cmd {
            Command::Dim(n) => {
                VarContext::new(*n).map_err(|e| (Span { start: 0, end: 0 }, e.to_string()))?;
                *self = Checker::new(*n);
            }
            Command::Let(name, e) => {
                if constant(name).is_some() || verb(name).is_some() || leaf_arity(name).is_some() {
                    return Err((e.span, format!("`{name}` is reserved")));
                }
                let k = self.expr(e)?;
                self.kinds.insert(name.clone(), k);
            }
            Command::Eval(e) | Command::AssertZero(e) => {
                let k = self.expr(e)?;
                if matches!(cmd, Command::AssertZero(_)) && !(k.fits(&Kind::Current) || k.fits(&Kind::Complex)) {
                    return Err((e.span, format!("cannot test a {k} for zero")));
                }
            }
            Command::AssertEq(a, b) => {
                let (ka, kb) = (self.expr(a)?, self.expr(b)?);
                let both = |k: Kind| ka.fits(&k) && kb.fits(&k);
                if !(both(Kind::Current) || both(Kind::Complex) || ka == kb) {
                    return Err((b.span, format!("cannot compare a {ka} with a {kb}")));
                }
            }
            Command::AssertClose(tol, a, b) => {
                if tol.is_nan() || *tol <= 0.0 {
                    return Err((a.span, "tolerance must be positive".into()));
                }
                for e in [a, b] {
                    let k = self.expr(e)?;
                    if !k.fits(&Kind::Complex) {
                        return Err((e.span, format!("expected a number, found a {k}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn expr(&self, e: &Expr) -> Result<Kind, Error> {
        singular(e)?;
        self.kind(e)
    }

    fn var(&self, j: usize, span: Span) -> Result<(), Error> {
        if j >= self.n {
            return Err((span, format!("unknown variable t{} in dimension {}", j + 1, self.n)));
        }
        Ok(())
    }

    fn kind(&self, e: &Expr) -> Result<Kind, Error> {
        let span = e.span;
        match &e.kind {
            ExprKind::Int(_) | ExprKind::Imag => Ok(Kind::Num),
            ExprKind::Real(_) => Ok(Kind::Real),
            ExprKind::Var(j) => self.var(*j, span).map(|_| Kind::Current),
            ExprKind::Name(name) => match self.kinds.get(name).cloned().or_else(|| constant(name).map(|v| v.kind())) {
                Some(k) => Ok(k),
                None if is_nullary(name) => self.call(name, &[], span),
                None => Err((span, format!("unknown name `{name}`"))),
            },
            ExprKind::Neg(x) => match self.kind(x)? {
                Kind::Report => Ok(Kind::Complex),
                k @ (Kind::Num | Kind::Real | Kind::Complex | Kind::Current | Kind::Laurent) => Ok(k),
                k => Err((span, format!("cannot negate a {k}"))),
            },
            ExprKind::Pow(x, _) => match self.kind(x)? {
                Kind::Report => Ok(Kind::Complex),
                k @ (Kind::Num | Kind::Real | Kind::Complex | Kind::Current | Kind::Laurent) => Ok(k),
                k => Err((span, format!("cannot raise a {k} to a power"))),
            },
            ExprKind::Bin(op, a, b) => {
                let (ka, kb) = (self.kind(a)?, self.kind(b)?);
                bin_kind(*op, &ka, &kb).ok_or_else(|| (span, format!("cannot combine a {ka} and a {kb} here")))
            }
            ExprKind::Tuple(items) => Ok(Kind::Tuple(items.iter().map(|x| self.kind(x)).collect::<Result<_, _>>()?)),
            ExprKind::Variety(items) => {
                if items.is_empty() {
                    return Err((span, "a variety needs at least one generator".into()));
                }
                for x in items {
                    let k = self.kind(x)?;
                    if !k.fits(&Kind::Current) {
                        return Err((x.span, format!("expected a monomial, found a {k}")));
                    }
                }
                Ok(Kind::Variety)
            }
            ExprKind::Call(name, args) => self.call(name, args, span),
        }
    }

    fn call(&self, name: &str, args: &[Expr], span: Span) -> Result<Kind, Error> {
        if let Some(arity) = leaf_arity(name) {
            if args.len() != arity {
                return Err((span, format!("`{name}` takes {arity} argument(s), got {}", args.len())));
            }
            let ExprKind::Var(j) = args[0].kind else {
                return Err((args[0].span, format!("`{name}` expects a variable such as t1")));
            };
            self.var(j, args[0].span)?;
            if arity == 2 {
                match &args[1].kind {
                    ExprKind::Int(m) if m.is_zero() => {
                        return Err((args[1].span, "power must be >= 1".into()));
                    }
                    ExprKind::Int(_) => {}
                    _ => return Err((args[1].span, "power must be a positive integer literal".into())),
                }
            }
            return Ok(Kind::Current);
        }
        let Some(v) = verb(name) else {
            return Err((span, format!("unknown operation `{name}`")));
        };
        let fixed = v.params.len();
        if args.len() < fixed || (v.rest.is_none() && args.len() > fixed) || (v.rest.is_some() && args.is_empty()) {
            let want = if v.rest.is_some() { "at least 1".to_string() } else { fixed.to_string() };
            return Err((span, format!("`{name}` takes {want} argument(s), got {}", args.len())));
        }
        if name == "chart" && args.len() != self.n {
            return Err((span, format!("`chart` needs {} components in dimension {}", self.n, self.n)));
        }
        for (i, a) in args.iter().enumerate() {
            let p = v.params.get(i).copied().or(v.rest).expect("arity checked");
            let k = self.kind(a)?;
            if !param_fits(p, &k, self.n) {
                return Err((a.span, format!("`{name}` expects {} here, found a {k}", param_name(p, self.n))));
            }
        }
        Ok(v.ret)
    }
}

fn bin_kind(op: BinOp, a: &Kind, b: &Kind) -> Option<Kind> {
    use Kind::*;
    if a.is_numeric() || b.is_numeric() {
        if !(a.fits(&Complex) && b.fits(&Complex)) {
            return None;
        }
        return Some(if a.fits(&Real) && b.fits(&Real) { Real } else { Complex });
    }
    if !(a.fits(&Current) && b.fits(&Current)) {
        return None;
    }
    Some(match op {
        _ if *a == Num && *b == Num => Num,
        BinOp::Add | BinOp::Sub => Current,
        BinOp::Mul if *a == Laurent || *b == Laurent => Laurent,
        BinOp::Mul => Current,
        BinOp::Div if *b == Num => a.clone(),
        BinOp::Div => Laurent,
    })
}

/// Outcome of one command.
#[derive(Clone, Debug)]
pub enum Outcome {
    Value(Value),
    Bound(String, Value),
    Assert { passed: bool, detail: String },
    Dim(usize),
}

/// Evaluation state: context, bindings and the seeded generator.
pub struct Session {
    pub config: Config,
    ctx: VarContext,
    gen: Generator,
    env: HashMap<String, Value>,
    checker: Checker,
}

fn at<T>(span: Span) -> impl Fn(T) -> Error
where
    T: ToString,
{
    move |e| (span, e.to_string())
}

impl Session {
    pub fn new(config: Config) -> Result<Self, String> {
        let ctx = VarContext::new(config.dim).map_err(|e| e.to_string())?;
        if config.bump_radius.is_nan() || config.bump_radius <= 0.0 {
            return Err("bump radius must be positive".into());
        }
        Ok(Session {
            gen: Generator::new(config.seed),
            checker: Checker::new(config.dim),
            config,
            ctx,
            env: HashMap::new(),
        })
    }

    pub fn ctx(&self) -> VarContext {
        self.ctx
    }

    /// Checks and then runs a command.
    pub fn execute(&mut self, cmd: &Command) -> Result<Outcome, Error> {
        self.checker.command(cmd)?;
        self.run(cmd)
    }

    fn run(&mut self, cmd: &Command) -> Result<Outcome, Error> {
        match cmd {
            Command::Dim(n) => {
                let config = Config { dim: *n, ..self.config.clone() };
                *self = Session::new(config).map_err(|e| (Span { start: 0, end: 0 }, e))?;
                Ok(Outcome::Dim(*n))
            }
            Command::Let(name, e) => {
                let v = self.eval(e)?;
                self.env.insert(name.clone(), v.clone());
                Ok(Outcome::Bound(name.clone(), v))
            }
            Command::Eval(e) => Ok(Outcome::Value(self.eval(e)?)),
            Command::AssertZero(e) => {
                let v = self.eval(e)?;
                let passed = match &v {
                    Value::Real(_) | Value::Complex(_) | Value::Report(_) => {
                        v.to_complex().map_err(at(e.span))?.norm() <= self.config.tol
                    }
                    _ => v.to_current(self.ctx).map_err(at(e.span))?.is_zero(),
                };
                Ok(Outcome::Assert { passed, detail: show(&v, self.config.style) })
            }
            Command::AssertEq(a, b) => {
                let (va, vb) = (self.eval(a)?, self.eval(b)?);
                let passed = self.equal(&va, &vb).map_err(at(b.span))?;
                let style = self.config.style;
                Ok(Outcome::Assert { passed, detail: format!("{} vs {}", show(&va, style), show(&vb, style)) })
            }
            Command::AssertClose(tol, a, b) => {
                let za = self.eval(a)?.to_complex().map_err(at(a.span))?;
                let zb = self.eval(b)?.to_complex().map_err(at(b.span))?;
                let scale = za.norm().max(zb.norm());
                let diff = (za - zb).norm();
                // Values that are both zero up to `--tol` count as close.
                let passed = diff <= tol * scale || diff <= self.config.tol;
                let rel = if scale > 0.0 { diff / scale } else { 0.0 };
                let detail = format!("{} vs {}, relative difference {rel:.3e}", complex_text(za), complex_text(zb));
                Ok(Outcome::Assert { passed, detail })
            }
        }
    }

    fn equal(&self, a: &Value, b: &Value) -> Result<bool, String> {
        let (ka, kb) = (a.kind(), b.kind());
        if ka.fits(&Kind::Current) && kb.fits(&Kind::Current) {
            return Ok(a.to_current(self.ctx)? == b.to_current(self.ctx)?);
        }
        if ka.fits(&Kind::Complex) && kb.fits(&Kind::Complex) {
            return Ok(a.to_complex()? == b.to_complex()?);
        }
        Ok(match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => x == y,
            (Value::Verdict(x), Value::Verdict(y)) => x == y,
            (Value::Variety(x), Value::Variety(y)) => x == y,
            _ => return Err(format!("cannot compare a {ka} with a {kb}")),
        })
    }

    fn opts(&self) -> OracleOptions {
        OracleOptions { quad_order: self.config.quad_order }
    }

    fn bumps(&self) -> Vec<Bump> {
        let r = self.config.bump_radius;
        vec![Bump::from_radii(0.5 * r, r); self.ctx.dim()]
    }

    fn regularization(&self, h: Vec<pmcalc::Monomial>) -> RegularizationSpec {
        RegularizationSpec::new(self.ctx, h).with_sweep(self.config.eps0, self.config.eps_ratio, self.config.eps_levels)
    }

    fn report(&self, r: pmcalc::oracle::PairingReport) -> Value {
        Value::Report(if self.config.timing { r } else { r.without_timing() })
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Value, Error> {
        let span = e.span;
        let ctx = self.ctx;
        Ok(match &e.kind {
            ExprKind::Int(n) => Value::Num(GaussRat::new(BigRational::from_integer(n.clone()), BigRational::zero())),
            ExprKind::Real(x) => Value::Real(*x),
            ExprKind::Imag => Value::Num(GaussRat::i()),
            ExprKind::Var(j) => Value::Current(Current::from_form(&SmoothForm::var(ctx, *j).map_err(at(span))?)),
            ExprKind::Name(name) => match self.env.get(name) {
                Some(v) => v.clone(),
                None if is_nullary(name) => self.call(name, &[], span)?,
                None => constant(name).ok_or_else(|| (span, format!("unknown name `{name}`")))?,
            },
            ExprKind::Neg(x) => match self.eval(x)? {
                Value::Num(c) => Value::Num(-c),
                Value::Real(r) => Value::Real(-r),
                Value::Current(c) => Value::Current(-c),
                Value::Laurent(a) => {
                    Value::Laurent(LaurentForm::new(a.numerator().neg(), a.denominator().clone()).map_err(at(span))?)
                }
                v => Value::Complex(-v.to_complex().map_err(at(span))?),
            },
            ExprKind::Pow(x, k) => {
                let base = self.eval(x)?;
                let mut acc = match &base {
                    Value::Num(_) => Value::Num(GaussRat::one()),
                    Value::Real(_) => Value::Real(1.0),
                    Value::Current(_) => Value::Current(Current::one(ctx)),
                    Value::Laurent(_) => Value::Laurent(LaurentForm::from_form(SmoothForm::one(ctx))),
                    _ => Value::Complex(Complex64::new(1.0, 0.0)),
                };
                for _ in 0..*k {
                    acc = self.binary(BinOp::Mul, acc, base.clone()).map_err(at(span))?;
                }
                acc
            }
            ExprKind::Bin(op, a, b) => {
                let (va, vb) = (self.eval(a)?, self.eval(b)?);
                self.binary(*op, va, vb).map_err(at(span))?
            }
            ExprKind::Tuple(items) => Value::Tuple(items.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?),
            ExprKind::Variety(items) => {
                let gens = items
                    .iter()
                    .map(|x| self.eval(x)?.to_monomial(ctx).map_err(at(x.span)))
                    .collect::<Result<Vec<_>, _>>()?;
                Value::Variety(CoordinateVariety::new(ctx, gens).map_err(at(span))?)
            }
            ExprKind::Call(name, args) => self.call(name, args, span)?,
        })
    }

    fn binary(&self, op: BinOp, a: Value, b: Value) -> Result<Value, String> {
        let ctx = self.ctx;
        let (ka, kb) = (a.kind(), b.kind());
        if ka.is_numeric() || kb.is_numeric() {
            let (x, y) = (a.to_complex()?, b.to_complex()?);
            let z = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
            };
            let real = ka.fits(&Kind::Real) && kb.fits(&Kind::Real);
            return Ok(if real { Value::Real(z.re) } else { Value::Complex(z) });
        }
        if let (Value::Num(x), Value::Num(y)) = (&a, &b) {
            return Ok(Value::Num(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x * &y.inv().ok_or("division by zero")?,
            }));
        }
        Ok(match op {
            BinOp::Add => Value::Current(&a.to_current(ctx)? + &b.to_current(ctx)?),
            BinOp::Sub => Value::Current(&a.to_current(ctx)? - &b.to_current(ctx)?),
            BinOp::Mul if ka == Kind::Laurent || kb == Kind::Laurent => {
                let lift = |v: &Value| -> Result<LaurentForm, String> {
                    match v {
                        Value::Laurent(x) => Ok(x.clone()),
                        v => v.to_smooth(ctx).map(LaurentForm::from_form).map_err(|_| {
                            "a semi-meromorphic form multiplies smooth forms only; use asmmul".to_string()
                        }),
                    }
                };
                Value::Laurent(lift(&a)?.mul(&lift(&b)?).map_err(|e| e.to_string())?)
            }
            BinOp::Mul => match (&a, &b) {
                (Value::Num(c), v) | (v, Value::Num(c)) => Value::Current(v.to_current(ctx)?.scale(c)),
                _ => Value::Current(a.to_current(ctx)?.try_wedge(&b.to_current(ctx)?).map_err(|e| e.to_string())?),
            },
            BinOp::Div => match b {
                Value::Num(c) => {
                    let inv = c.inv().ok_or("division by zero")?;
                    match a {
                        Value::Laurent(x) => Value::Laurent(
                            LaurentForm::new(x.numerator().scale(&inv), x.denominator().clone())
                                .map_err(|e| e.to_string())?,
                        ),
                        v => Value::Current(v.to_current(ctx)?.scale(&inv)),
                    }
                }
                den => {
                    let h =
                        den.to_monomial(ctx).map_err(|_| "can only divide by a scalar or a monomial".to_string())?;
                    let inv = LaurentForm::inverse_monomial(ctx, h).map_err(|e| e.to_string())?;
                    let num = a.to_laurent(ctx)?;
                    Value::Laurent(num.mul(&inv).map_err(|e| e.to_string())?)
                }
            },
        })
    }

    fn call(&mut self, name: &str, args: &[Expr], span: Span) -> Result<Value, Error> {
        let ctx = self.ctx;
        if leaf_arity(name).is_some() {
            let ExprKind::Var(j) = args[0].kind else { unreachable!("checked") };
            let form = match name {
                "d" => SmoothForm::dt(ctx, j),
                "db" => SmoothForm::dtb(ctx, j),
                "cj" => SmoothForm::conj_var(ctx, j),
                _ => {
                    let m: u32 = match &args[1].kind {
                        ExprKind::Int(m) => m.try_into().map_err(|_| (args[1].span, "power too large".to_string()))?,
                        _ => unreachable!("checked"),
                    };
                    let c = if name == "pv" { Current::pv(ctx, j, m) } else { Current::res(ctx, j, m) };
                    return c.map(Value::Current).map_err(at(span));
                }
            };
            return Ok(Value::Current(Current::from_form(&form.map_err(at(span))?)));
        }
        let vals: Vec<Value> = args.iter().map(|a| self.eval(a)).collect::<Result<_, _>>()?;
        let arg = |i: usize| (&vals[i], args[i].span);
        let cur = |i: usize| vals[i].to_current(ctx).map_err(at(args[i].span));
        let laurent = |i: usize| vals[i].to_laurent(ctx).map_err(at(args[i].span));
        let mono = |i: usize| vals[i].to_monomial(ctx).map_err(at(args[i].span));
        let monos = |i: usize| vals[i].to_monomials(ctx).map_err(at(args[i].span));
        let int = |i: usize| vals[i].to_int().map_err(at(args[i].span));
        let count = |i: usize| -> Result<usize, Error> {
            let k = int(i)?;
            usize::try_from(k).map_err(|_| (args[i].span, "expected a non-negative integer".to_string()))
        };
        let variety = |i: usize| match arg(i) {
            (Value::Variety(v), _) => Ok(v.clone()),
            (v, s) => Err((s, format!("expected a variety, found a {}", v.kind()))),
        };
        let testform = |i: usize| match arg(i) {
            (Value::TestForm(f), _) => Ok(f.clone()),
            (v, s) => Err((s, format!("expected a test form, found a {}", v.kind()))),
        };
        let field = |i: usize| -> Result<HoloVectorField, Error> {
            let comps = match &vals[i] {
                Value::Tuple(items) => items.clone(),
                v => vec![v.clone()],
            };
            let polys =
                comps.iter().map(|c| c.to_poly(ctx)).collect::<Result<Vec<_>, _>>().map_err(at(args[i].span))?;
            HoloVectorField::new(ctx, polys).map_err(at(args[i].span))
        };
        let cal = |e: CalcError| (span, e.to_string());
        let orc = |e: pmcalc::OracleError| (span, e.to_string());
        Ok(match name {
            "dbar" => Value::Current(dbar(&cur(0)?)),
            "del" => Value::Current(del(&cur(0)?)),
            "mul" => {
                let p = vals[0].to_poly(ctx).map_err(at(args[0].span))?;
                Value::Current(mul_poly(&p, &cur(1)?))
            }
            "contract" => Value::Current(contract(&field(0)?, &cur(1)?).map_err(cal)?),
            "lie" => Value::Current(lie(&field(0)?, &cur(1)?).map_err(cal)?),
            "coeff" => {
                let idx = match &vals[1] {
                    Value::Tuple(items) => items.iter().map(|v| v.to_index(ctx)).collect::<Result<Vec<_>, _>>(),
                    v => v.to_index(ctx).map(|j| vec![j]),
                }
                .map_err(at(args[1].span))?;
                Value::Current(coeff_extract(&cur(0)?, &idx).map_err(cal)?)
            }
            "restrict" => Value::Current(restrict_to(&variety(0)?, &cur(1)?).map_err(cal)?),
            "restrictc" => Value::Current(restrict_complement(&variety(0)?, &cur(1)?).map_err(cal)?),
            "pvdiv" => Value::Current(pv_divide(&mono(0)?, &cur(1)?).map_err(cal)?),
            "solvediv" => Value::Current(solve_divide(&mono(0)?, &cur(1)?).map_err(cal)?),
            "asmmul" => Value::Current(asm_mul(&laurent(0)?, &cur(1)?).map_err(cal)?),
            "dbarasm" => Value::Current(dbar_asm_mul(&laurent(0)?, &cur(1)?).map_err(cal)?),
            "ch" => {
                let fs = (0..vals.len()).map(mono).collect::<Result<Vec<_>, _>>()?;
                Value::Current(ch_product(ctx, &fs).map_err(cal)?)
            }
            "residue" => Value::Current(residue_of(&laurent(0)?)),
            "zss" => match zss_of(&laurent(0)?) {
                Some(v) => Value::Variety(v),
                None => return Err((span, "the form is smooth; its singular support is empty".into())),
            },
            "sep" => Value::Verdict(sep_check(&cur(0)?, &variety(1)?.components())),
            "dimcheck" => {
                let q = u32::try_from(int(2)?).map_err(|_| (args[2].span, "expected q >= 0".to_string()))?;
                Value::Bool(dimension_check(&cur(0)?, &variety(1)?, q).map_err(cal)?)
            }
            "pair" => self.report(pair(&cur(0)?, &testform(1)?, &self.opts()).map_err(orc)?),
            "pairreg" => {
                let reg = self.regularization(monos(2)?);
                let r = pair_regularized(&laurent(0)?, &cur(1)?, &reg, &testform(3)?, &self.opts()).map_err(orc)?;
                self.report(r)
            }
            "pairlambda" => {
                let m = u32::try_from(int(0)?).map_err(|_| (args[0].span, "expected m >= 1".to_string()))?;
                let lambda = vals[1].to_real().map_err(at(args[1].span))?;
                Value::Complex(pair_lambda(m, lambda, &testform(2)?, &self.opts()).map_err(orc)?)
            }
            "push" => {
                let Value::Map(map) = &vals[0] else { unreachable!("checked") };
                self.report(pushforward_pair(map, &cur(1)?, &testform(2)?, &self.opts()).map_err(orc)?)
            }
            "bm" => {
                let f = monos(0)?;
                let reg = self.regularization(f.clone());
                self.report(bm_pair(&f, &testform(1)?, &reg, &self.opts()).map_err(orc)?)
            }
            "calibrate" => {
                let m = u32::try_from(int(0)?)
                    .ok()
                    .filter(|&m| m >= 1)
                    .ok_or((args[0].span, "expected m >= 1".to_string()))?;
                Value::Calibration(calibrate_residue_constants(m, CALIBRATION_TOL, &self.opts()).map_err(orc)?)
            }
            "chart" => {
                let comps = (0..vals.len()).map(mono).collect::<Result<Vec<_>, _>>()?;
                Value::Map(MonomialMap::new(ctx, ctx, comps).map_err(orc)?)
            }
            "blowup" => {
                if ctx.dim() != 2 {
                    return Err((span, "the blowup chart lives in dimension 2".into()));
                }
                Value::Map(MonomialMap::blowup_chart())
            }
            "rand" => Value::Current(self.gen.current(ctx)),
            "randform" => {
                let d = count(0)?;
                if d > 2 * ctx.dim() {
                    return Err((args[0].span, format!("degree exceeds {}", 2 * ctx.dim())));
                }
                Value::Current(Current::from_form(&self.gen.form_of_degree(ctx, d)))
            }
            "tf" => {
                let f = vals[0].to_smooth(ctx).map_err(at(args[0].span))?;
                Value::TestForm(TestForm::from_form(&f, self.bumps()))
            }
            "matchtf" => {
                let bumps = self.bumps();
                Value::TestForm(TestForm::matching(&cur(0)?, self.gen.rng(), bumps))
            }
            "randtf" => {
                let (p, q) = (count(0)?, count(1)?);
                if p > ctx.dim() || q > ctx.dim() {
                    return Err((span, format!("bidegree exceeds ({0}, {0})", ctx.dim())));
                }
                let bumps = self.bumps();
                Value::TestForm(TestForm::random(ctx, p, q, self.gen.rng(), bumps))
            }
            _ => unreachable!("checked: {name}"),
        })
    }
}
