//! Text rendering of currents. The ascii style is the canonical form that
//! the CLI parser reads back.

use std::fmt::Write;
use std::str::FromStr;

use num_traits::One;

use crate::current::{Current, TermKey};
use crate::poly::{PolyCoeff, PolyKey};
use crate::scalar::GaussRat;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    #[default]
    Ascii,
    Unicode,
    Latex,
}

impl FromStr for Style {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ascii" => Ok(Style::Ascii),
            "unicode" => Ok(Style::Unicode),
            "latex" => Ok(Style::Latex),
            other => Err(format!("unknown style `{other}`")),
        }
    }
}

fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string().chars().map(|c| DIGITS[c as usize - '0' as usize]).collect()
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c as usize - '0' as usize]).collect()
}

fn var(style: Style, j: usize) -> String {
    match style {
        Style::Ascii => format!("t{}", j + 1),
        Style::Unicode => format!("t{}", subscript(j + 1)),
        Style::Latex => format!("t_{{{}}}", j + 1),
    }
}

fn conj_var(style: Style, j: usize) -> String {
    match style {
        Style::Ascii => format!("cj(t{})", j + 1),
        Style::Unicode => format!("t̄{}", subscript(j + 1)),
        Style::Latex => format!("\\bar t_{{{}}}", j + 1),
    }
}

fn power(style: Style, base: String, e: u32) -> String {
    if e == 1 {
        return base;
    }
    match style {
        Style::Ascii => format!("{base}**{e}"),
        Style::Unicode => format!("{base}{}", superscript(e)),
        Style::Latex => format!("{base}^{{{e}}}"),
    }
}

fn mul_sep(style: Style) -> &'static str {
    match style {
        Style::Ascii => "*",
        Style::Unicode => "·",
        Style::Latex => " ",
    }
}

fn wedge_sep(style: Style) -> &'static str {
    match style {
        Style::Ascii => "^",
        Style::Unicode => "∧",
        Style::Latex => "\\wedge ",
    }
}

fn scalar(style: Style, c: &GaussRat) -> String {
    let s = c.to_string();
    match style {
        Style::Ascii => s,
        Style::Unicode => s.replace('*', ""),
        Style::Latex => s.replace("*i", "i"),
    }
}

fn monomial(style: Style, key: &PolyKey) -> String {
    let mut parts = Vec::new();
    for (j, &e) in key.hol.iter().enumerate() {
        if e > 0 {
            parts.push(power(style, var(style, j), e));
        }
    }
    for (j, &e) in key.anti.iter().enumerate() {
        if e > 0 {
            parts.push(power(style, conj_var(style, j), e));
        }
    }
    parts.join(mul_sep(style))
}

/// `c·m` with the sign pulled to the front.
fn poly_term(style: Style, key: &PolyKey, c: &GaussRat) -> String {
    if key.is_one() {
        return scalar(style, c);
    }
    let m = monomial(style, key);
    if c.is_one() {
        m
    } else if (-c).is_one() {
        format!("-{m}")
    } else {
        format!("{}{}{m}", scalar(style, c), mul_sep(style))
    }
}

fn join_signed(parts: Vec<String>) -> String {
    let mut out = String::new();
    for (i, p) in parts.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            let _ = write!(out, " - {rest}");
        } else {
            let _ = write!(out, " + {p}");
        }
    }
    out
}

/// Renders a polynomial coefficient.
pub fn render_poly(p: &PolyCoeff, style: Style) -> String {
    if p.is_zero() {
        return "0".into();
    }
    join_signed(p.terms().map(|(k, c)| poly_term(style, k, c)).collect())
}

fn factors(style: Style, key: &TermKey) -> Vec<String> {
    let mut out = Vec::new();
    for j in key.basis.hol_indices() {
        out.push(match style {
            Style::Ascii => format!("d(t{})", j + 1),
            Style::Unicode => format!("dt{}", subscript(j + 1)),
            Style::Latex => format!("dt_{{{}}}", j + 1),
        });
    }
    for j in key.basis.anti_indices() {
        out.push(match style {
            Style::Ascii => format!("db(t{})", j + 1),
            Style::Unicode => format!("dt̄{}", subscript(j + 1)),
            Style::Latex => format!("d\\bar t_{{{}}}", j + 1),
        });
    }
    for p in &key.pv {
        out.push(match style {
            Style::Ascii => format!("pv(t{},{})", p.var + 1, p.m),
            Style::Unicode => format!("[1/{}]", power(style, var(style, p.var), p.m)),
            Style::Latex => {
                format!("\\big[\\frac{{1}}{{{}}}\\big]", power(style, var(style, p.var), p.m))
            }
        });
    }
    for r in &key.res {
        out.push(match style {
            Style::Ascii => format!("res(t{},{})", r.var + 1, r.m),
            Style::Unicode => format!("∂̄[1/{}]", power(style, var(style, r.var), r.m)),
            Style::Latex => format!("\\dbar\\big[\\frac{{1}}{{{}}}\\big]", power(style, var(style, r.var), r.m)),
        });
    }
    out
}

fn term(style: Style, key: &TermKey, p: &PolyCoeff) -> String {
    let f = factors(style, key);
    if f.is_empty() {
        return render_poly(p, style);
    }
    let body = f.join(wedge_sep(style));
    let (open, close) = match style {
        Style::Latex => ("\\left(", "\\right)"),
        _ => ("(", ")"),
    };
    if p.is_one() {
        return body;
    }
    if p.len() == 1 {
        let (k, c) = p.terms().next().expect("one term");
        if k.is_one() && (-c).is_one() {
            return format!("-{open}{body}{close}");
        }
        return format!("{}{}{body}", poly_term(style, k, c), mul_sep(style));
    }
    format!("{open}{}{close}{}{body}", render_poly(p, style), mul_sep(style))
}

/// Canonical rendering; the zero current is `0`.
pub fn render(tau: &Current, style: Style) -> String {
    if tau.is_zero() {
        return "0".into();
    }
    join_signed(tau.terms().map(|(k, p)| term(style, k, p)).collect())
}
