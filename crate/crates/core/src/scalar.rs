//! Exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        GaussRat::new(BigRational::new(BigInt::from(num), BigInt::from(den)), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        GaussRat::new(&self.re * &k, &self.im * &k)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(GaussRat::new(&self.re / &norm, -(&self.im / &norm)))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// True when the value is a negative real number; used by renderers to
    /// pull the sign out of a coefficient.
    pub fn is_negative_real(&self) -> bool {
        self.im.is_zero() && self.re.is_negative()
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat::from_int(1)
    }
}

impl Add<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        &self + &rhs
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        &self - &rhs
    }
}

impl Mul<&GaussRat> for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re * &rhs.re - &self.im * &rhs.im, &self.re * &rhs.im + &self.im * &rhs.re)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        &self * &rhs
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::from_int(n)
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Ascii form used by the canonical renderer: `3/2`, `-i`, `2/3*i`,
/// `(1+2*i)`.
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |r: &BigRational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rat(r))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}", imag(&self.im)),
            (false, false) => {
                let im = imag(&self.im);
                if im.starts_with('-') {
                    write!(f, "({}{})", fmt_rat(&self.re), im)
                } else {
                    write!(f, "({}+{})", fmt_rat(&self.re), im)
                }
            }
        }
    }
}
