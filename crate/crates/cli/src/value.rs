//! Runtime values, their static kinds and the conversions between them.

use std::fmt;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use pmcalc::geometry::laurent_decompose;
use pmcalc::oracle::{Calibration, MonomialMap, PairingReport, TestForm};
use pmcalc::{
    render, CoordinateVariety, Current, GaussRat, LaurentForm, Monomial, PolyCoeff, SepVerdict, SmoothForm, Style,
    VarContext,
};
use serde_json::{json, Value as Json};

/// Static kind of an expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    /// Exact Gaussian rational.
    Num,
    Real,
    Complex,
    Current,
    Laurent,
    Variety,
    Tuple(Vec<Kind>),
    TestForm,
    Map,
    Report,
    Bool,
    Verdict,
    Calibration,
}

impl Kind {
    /// Whether a value of kind `self` is accepted where `want` is expected.
    pub fn fits(&self, want: &Kind) -> bool {
        use Kind::*;
        match (self, want) {
            (a, b) if a == b => true,
            (Num, Real | Complex | Current | Laurent) => true,
            (Real, Complex) | (Report, Complex) => true,
            (Current, Laurent) | (Laurent, Current) => true,
            _ => false,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Kind::Real | Kind::Complex | Kind::Report)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Num => write!(f, "scalar"),
            Kind::Real => write!(f, "real number"),
            Kind::Complex => write!(f, "complex number"),
            Kind::Current => write!(f, "current"),
            Kind::Laurent => write!(f, "semi-meromorphic form"),
            Kind::Variety => write!(f, "variety"),
            Kind::Tuple(items) => write!(f, "{}-tuple", items.len()),
            Kind::TestForm => write!(f, "test form"),
            Kind::Map => write!(f, "monomial map"),
            Kind::Report => write!(f, "pairing report"),
            Kind::Bool => write!(f, "boolean"),
            Kind::Verdict => write!(f, "verdict"),
            Kind::Calibration => write!(f, "calibration"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Num(GaussRat),
    Real(f64),
    Complex(Complex64),
    Current(Current),
    Laurent(LaurentForm),
    Variety(CoordinateVariety),
    Tuple(Vec<Value>),
    TestForm(TestForm),
    Map(MonomialMap),
    Report(PairingReport),
    Bool(bool),
    Verdict(SepVerdict),
    Calibration(Calibration),
}

pub type Conv<T> = Result<T, String>;

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Num(_) => Kind::Num,
            Value::Real(_) => Kind::Real,
            Value::Complex(_) => Kind::Complex,
            Value::Current(_) => Kind::Current,
            Value::Laurent(_) => Kind::Laurent,
            Value::Variety(_) => Kind::Variety,
            Value::Tuple(v) => Kind::Tuple(v.iter().map(Value::kind).collect()),
            Value::TestForm(_) => Kind::TestForm,
            Value::Map(_) => Kind::Map,
            Value::Report(_) => Kind::Report,
            Value::Bool(_) => Kind::Bool,
            Value::Verdict(_) => Kind::Verdict,
            Value::Calibration(_) => Kind::Calibration,
        }
    }

    pub fn to_current(&self, ctx: VarContext) -> Conv<Current> {
        match self {
            Value::Num(c) => Ok(Current::one(ctx).scale(c)),
            Value::Current(c) => Ok(c.clone()),
            Value::Laurent(a) => Ok(a.to_current()),
            v => Err(format!("expected a current, found a {}", v.kind())),
        }
    }

    pub fn to_smooth(&self, ctx: VarContext) -> Conv<SmoothForm> {
        match self {
            Value::Num(c) => Ok(SmoothForm::constant(ctx, c.clone())),
            Value::Current(c) => c.as_smooth_form().ok_or_else(|| "expected a smooth form".to_string()),
            v => Err(format!("expected a smooth form, found a {}", v.kind())),
        }
    }

    /// A current without residue factors as a single `ω / t^c`, over the
    /// least common denominator of its terms.
    pub fn to_laurent(&self, ctx: VarContext) -> Conv<LaurentForm> {
        let cur = match self {
            Value::Laurent(a) => return Ok(a.clone()),
            v => v.to_current(ctx)?,
        };
        let parts = laurent_decompose(&cur)
            .ok_or_else(|| "expected a semi-meromorphic form; residue factors are present".to_string())?;
        let n = ctx.dim();
        let mut den = vec![0u32; n];
        for p in &parts {
            for (d, e) in den.iter_mut().zip(p.denominator().exps()) {
                *d = (*d).max(*e);
            }
        }
        let mut num = SmoothForm::zero(ctx);
        for p in &parts {
            let lift: Vec<u32> = den.iter().zip(p.denominator().exps()).map(|(d, e)| d - e).collect();
            let f = SmoothForm::from_poly(ctx, PolyCoeff::from_monomial(&Monomial::new(lift)));
            num = num.add(&f.wedge(p.numerator()));
        }
        LaurentForm::new(num, Monomial::new(den)).map_err(|e| e.to_string())
    }

    pub fn to_monomial(&self, ctx: VarContext) -> Conv<Monomial> {
        let bad = || "expected a monomial such as t1*t2**2".to_string();
        let f = self.to_smooth(ctx).map_err(|_| bad())?;
        let mut comps = f.components();
        let (Some((basis, poly)), None) = (comps.next(), comps.next()) else { return Err(bad()) };
        if basis.degree() != 0 || poly.len() != 1 {
            return Err(bad());
        }
        let (key, c) = poly.terms().next().expect("one term");
        if !num_traits::One::is_one(c) || key.anti.iter().any(|&e| e > 0) {
            return Err(bad());
        }
        Ok(Monomial::new(key.hol.clone()))
    }

    pub fn to_monomials(&self, ctx: VarContext) -> Conv<Vec<Monomial>> {
        match self {
            Value::Tuple(items) => items.iter().map(|v| v.to_monomial(ctx)).collect(),
            v => Ok(vec![v.to_monomial(ctx)?]),
        }
    }

    pub fn to_poly(&self, ctx: VarContext) -> Conv<PolyCoeff> {
        self.to_smooth(ctx)?.as_function().map_err(|_| "expected a function, not a form".to_string())
    }

    pub fn to_complex(&self) -> Conv<Complex64> {
        match self {
            Value::Num(c) => Ok(c.to_complex()),
            Value::Real(x) => Ok(Complex64::new(*x, 0.0)),
            Value::Complex(z) => Ok(*z),
            Value::Report(r) => Ok(r.value()),
            v => Err(format!("expected a number, found a {}", v.kind())),
        }
    }

    pub fn to_real(&self) -> Conv<f64> {
        match self {
            Value::Num(c) if c.im().is_zero() => c.re().to_f64().ok_or_else(|| "number out of range".into()),
            Value::Real(x) => Ok(*x),
            v => Err(format!("expected a real number, found a {}", v.kind())),
        }
    }

    pub fn to_int(&self) -> Conv<i64> {
        match self {
            Value::Num(c) if c.im().is_zero() && c.re().is_integer() => {
                c.re().to_integer().to_i64().ok_or_else(|| "integer out of range".into())
            }
            v => Err(format!("expected an integer, found {}", v.kind())),
        }
    }

    pub fn to_index(&self, ctx: VarContext) -> Conv<usize> {
        let j = self.to_int()?;
        if j < 1 || j as usize > ctx.dim() {
            return Err(format!("index {j} out of range 1..{}", ctx.dim()));
        }
        Ok(j as usize - 1)
    }
}

pub fn render_laurent(a: &LaurentForm, style: Style) -> String {
    let num = render(&Current::from_form(a.numerator()), style);
    if a.denominator().is_one() {
        num
    } else {
        format!("({num})/({})", a.denominator())
    }
}

pub fn render_variety(v: &CoordinateVariety) -> String {
    let gens: Vec<String> = v.generators().iter().map(|g| g.to_string()).collect();
    format!("V[{}]", gens.join(", "))
}

fn verdict_name(v: SepVerdict) -> &'static str {
    match v {
        SepVerdict::Holds => "holds",
        SepVerdict::Fails => "fails",
        SepVerdict::Unknown => "unknown",
    }
}

pub fn complex_text(z: Complex64) -> String {
    format!("{:.12e} {} {:.12e}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

/// Human-readable text.
pub fn show(v: &Value, style: Style) -> String {
    match v {
        Value::Num(c) => c.to_string(),
        Value::Real(x) => format!("{x:.12e}"),
        Value::Complex(z) => complex_text(*z),
        Value::Current(c) => render(c, style),
        Value::Laurent(a) => render_laurent(a, style),
        Value::Variety(v) => render_variety(v),
        Value::Tuple(items) => {
            let parts: Vec<String> = items.iter().map(|x| show(x, style)).collect();
            format!("({})", parts.join(", "))
        }
        Value::TestForm(f) => format!("test form of degrees {:?}", f.degrees()),
        Value::Map(m) => {
            let comps: Vec<String> = m.components().iter().map(|c| c.to_string()).collect();
            format!("chart({})", comps.join(", "))
        }
        Value::Report(r) => {
            let mut s = complex_text(r.value());
            if !r.eps_values.is_empty() {
                s += &format!(" (error indicator {:.2e})", r.error_indicator);
            }
            for flag in &r.flags {
                s += &format!(" [{flag}]");
            }
            s
        }
        Value::Bool(b) => b.to_string(),
        Value::Verdict(v) => verdict_name(*v).to_string(),
        Value::Calibration(c) => {
            let parts: Vec<String> = c.constants.iter().map(|z| complex_text(*z)).collect();
            format!("c = [{}]", parts.join(", "))
        }
    }
}

/// JSON record payload.
pub fn to_json(v: &Value) -> Json {
    match v {
        Value::Num(c) => json!({ "type": "scalar", "text": c.to_string() }),
        Value::Real(x) => json!({ "type": "real", "value": x }),
        Value::Complex(z) => json!({ "type": "complex", "re": z.re, "im": z.im }),
        Value::Current(c) => json!({
            "type": "current",
            "text": render(c, Style::Ascii),
            "terms": c.num_terms(),
            "bidegrees": c.bidegree().into_iter().collect::<Vec<_>>(),
        }),
        Value::Laurent(a) => json!({ "type": "laurent", "text": render_laurent(a, Style::Ascii) }),
        Value::Variety(v) => json!({ "type": "variety", "text": render_variety(v) }),
        Value::Tuple(items) => json!({ "type": "tuple", "items": items.iter().map(to_json).collect::<Vec<_>>() }),
        Value::TestForm(f) => json!({ "type": "testform", "degrees": f.degrees() }),
        Value::Map(m) => json!({
            "type": "map",
            "components": m.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        }),
        Value::Report(r) => {
            let mut j = serde_json::to_value(r).expect("report serializes");
            j["type"] = json!("report");
            j
        }
        Value::Bool(b) => json!({ "type": "bool", "value": b }),
        Value::Verdict(v) => json!({ "type": "verdict", "value": verdict_name(*v) }),
        Value::Calibration(c) => {
            let mut j = serde_json::to_value(c).expect("calibration serializes");
            j["type"] = json!("calibration");
            j
        }
    }
}
