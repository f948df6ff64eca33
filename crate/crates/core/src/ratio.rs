//! Exact budget ratios with a distinguished infinity.
//!
//! Thresholds live in `[0, ∞]`: a vertex from which Player 1 can never
//! force its target has threshold `∞`, and the threshold recurrence needs
//! `x / ∞ = 0`. [`Ratio`] carries that value as a first-class variant so
//! every identity can be checked with exact equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// A nonnegative-or-signed exact rational, or `+∞`.
///
/// Finite values are always kept in lowest terms with a positive
/// denominator (guaranteed by [`BigRational`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ratio {
    Finite(BigRational),
    Infinity,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Ratio {
    pub fn zero() -> Self {
        Ratio::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        Ratio::Finite(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Ratio::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; `den = 0` is rejected rather than mapped to infinity.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        Some(Ratio::Finite(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        )))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ratio::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ratio::Finite(r) if r.is_zero())
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Ratio::Finite(r) => Some(r),
            Ratio::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<BigRational> {
        match self {
            Ratio::Finite(r) => Some(r),
            Ratio::Infinity => None,
        }
    }

    /// `1 / self` with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(&self) -> Ratio {
        match self {
            Ratio::Infinity => Ratio::zero(),
            Ratio::Finite(r) if r.is_zero() => Ratio::Infinity,
            Ratio::Finite(r) => Ratio::Finite(r.recip()),
        }
    }

    /// `self - rhs`; undefined only for `∞ - ∞` and `c - ∞`.
    pub fn checked_sub(&self, rhs: &Ratio) -> Option<Ratio> {
        match (self, rhs) {
            (Ratio::Finite(a), Ratio::Finite(b)) => Some(Ratio::Finite(a - b)),
            (Ratio::Infinity, Ratio::Finite(_)) => Some(Ratio::Infinity),
            _ => None,
        }
    }

    /// `self / rhs` with `c/∞ = 0` for finite `c`; `∞/∞` and `x/0` are undefined.
    pub fn checked_div(&self, rhs: &Ratio) -> Option<Ratio> {
        match (self, rhs) {
            (_, Ratio::Finite(b)) if b.is_zero() => None,
            (Ratio::Finite(a), Ratio::Finite(b)) => Some(Ratio::Finite(a / b)),
            (Ratio::Finite(_), Ratio::Infinity) => Some(Ratio::zero()),
            (Ratio::Infinity, Ratio::Finite(b)) if b.is_positive() => Some(Ratio::Infinity),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ratio::Finite(r) => rational_to_f64(r),
            Ratio::Infinity => f64::INFINITY,
        }
    }

    /// Numerator and denominator strings, with `∞` written as `1/0`.
    pub fn num_den(&self) -> (String, String) {
        match self {
            Ratio::Finite(r) => (r.numer().to_string(), r.denom().to_string()),
            Ratio::Infinity => ("1".to_string(), "0".to_string()),
        }
    }
}

impl From<BigRational> for Ratio {
    fn from(r: BigRational) -> Self {
        Ratio::Finite(r)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ratio::Finite(a), Ratio::Finite(b)) => a.cmp(b),
            (Ratio::Finite(_), Ratio::Infinity) => Ordering::Less,
            (Ratio::Infinity, Ratio::Finite(_)) => Ordering::Greater,
            (Ratio::Infinity, Ratio::Infinity) => Ordering::Equal,
        }
    }
}

impl Add for &Ratio {
    type Output = Ratio;

    fn add(self, rhs: &Ratio) -> Ratio {
        match (self, rhs) {
            (Ratio::Finite(a), Ratio::Finite(b)) => Ratio::Finite(a + b),
            _ => Ratio::Infinity,
        }
    }
}

impl Add for Ratio {
    type Output = Ratio;

    fn add(self, rhs: Ratio) -> Ratio {
        &self + &rhs
    }
}

/// Multiplication; `0 · ∞` is taken to be `0`.
impl Mul for &Ratio {
    type Output = Ratio;

    fn mul(self, rhs: &Ratio) -> Ratio {
        match (self, rhs) {
            (Ratio::Finite(a), Ratio::Finite(b)) => Ratio::Finite(a * b),
            (Ratio::Finite(a), Ratio::Infinity) | (Ratio::Infinity, Ratio::Finite(a))
                if a.is_zero() =>
            {
                Ratio::zero()
            }
            _ => Ratio::Infinity,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(r) => write!(f, "{}", format_rational(r)),
            Ratio::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Ratio {
    type Err = RatioParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "∞" => Ok(Ratio::Infinity),
            _ => parse_rational(s).map(Ratio::Finite),
        }
    }
}

/// Parses `n`, `n/d`, or a decimal literal such as `1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, RatioParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatioParseError::Empty);
    }
    let invalid = || RatioParseError::Invalid(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| invalid())?;
        let den: BigInt = den.trim().parse().map_err(|_| invalid())?;
        if den.is_zero() {
            return Err(RatioParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && int_digits.is_empty() {
            return Err(invalid());
        }
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(invalid());
        }
        let digits = format!("{int_digits}{frac}");
        let mut num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| invalid())?
        };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(BigRational::new(num, den));
    }
    let n: BigInt = s.parse().map_err(|_| invalid())?;
    Ok(BigRational::from_integer(n))
}

/// `n` for integers, `n/d` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest-ish `f64`; exact for values representable in 53 bits.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Huge numerators/denominators: shift both down to keep 64 significant bits.
    let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(64);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

/// `⌈r⌉` as a big integer.
pub fn ceil_int(r: &BigRational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `⌊r⌋` as a big integer.
pub fn floor_int(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Small helper for literals in code and tests.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
