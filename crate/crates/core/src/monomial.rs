//! Variable contexts and holomorphic monomials `t^a`.

use std::fmt;

use crate::error::{CalcError, Result};

/// Largest ambient dimension the engine accepts. Differential bases are
/// stored as bitmasks, and the oracle is desk scale anyway.
pub const MAX_DIM: usize = 8;

/// The ambient chart `ℂⁿ` with coordinates `t1..tn`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    n: usize,
}

impl VarContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(CalcError::BadDimension { got: n, max: MAX_DIM });
        }
        Ok(VarContext { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn check_var(&self, var: usize) -> Result<()> {
        if var < self.n {
            Ok(())
        } else {
            Err(CalcError::VarOutOfRange { var, n: self.n })
        }
    }

    pub fn check_same(&self, other: &VarContext) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(CalcError::ContextMismatch { left: self.n, right: other.n })
        }
    }
}

/// `t^a = ∏ tⱼ^{aⱼ}`; the all-zero exponent vector is the constant `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(ctx: VarContext) -> Self {
        Monomial { exps: vec![0; ctx.dim()] }
    }

    /// `t_var^power`, 0-based variable index.
    pub fn var_pow(ctx: VarContext, var: usize, power: u32) -> Result<Self> {
        ctx.check_var(var)?;
        let mut exps = vec![0; ctx.dim()];
        exps[var] = power;
        Ok(Monomial { exps })
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Variables that occur with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, _)| j).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect() }
    }

    /// The product of the variables in the support, i.e. the reduced monomial
    /// with the same zero set.
    pub fn radical(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|&e| u32::from(e > 0)).collect() }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| if e == 1 { format!("t{}", j + 1) } else { format!("t{}**{}", j + 1, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}
