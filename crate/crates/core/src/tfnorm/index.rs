use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// A Lebesgue exponent in `[1, ∞]`, stored exactly as its reciprocal so
/// that `∞` is simply `1/p = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    inv: Rational,
}

impl Exponent {
    pub fn infinity() -> Self {
        Self { inv: Rational::zero() }
    }

    pub fn one() -> Self {
        Self { inv: Rational::one() }
    }

    /// From the reciprocal `1/p ∈ [0, 1]`.
    pub fn from_inverse(inv: Rational) -> Result<Self> {
        if inv < Rational::zero() || inv > Rational::one() {
            return Err(Error::Domain(format!("1/p = {inv} is outside [0, 1]")));
        }
        Ok(Self { inv })
    }

    pub fn finite(p: Rational) -> Result<Self> {
        if p < Rational::one() {
            return Err(Error::Domain(format!("exponent {p} is below 1")));
        }
        Ok(Self { inv: p.recip() })
    }

    pub fn int(p: i64) -> Result<Self> {
        Self::finite(Rational::from_integer(p))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::finite(Rational::new(num, den))
    }

    pub fn inv(&self) -> Rational {
        self.inv
    }

    pub fn is_infinite(&self) -> bool {
        self.inv.is_zero()
    }

    /// The exact rational value, `None` for `∞`.
    pub fn value(&self) -> Option<Rational> {
        (!self.is_infinite()).then(|| self.inv.recip())
    }

    /// `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(&self) -> Self {
        Self {
            inv: Rational::one() - self.inv,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.value() {
            Some(v) => *v.numer() as f64 / *v.denom() as f64,
            None => f64::INFINITY,
        }
    }

    pub fn inv_f64(&self) -> f64 {
        *self.inv.numer() as f64 / *self.inv.denom() as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(v) => write!(f, "{v}"),
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("cannot parse `{s}` as an exact rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10_i64.pow(frac.len() as u32);
        let negative = int.trim_start().starts_with('-');
        let i: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = i.abs() * den + f;
        return Ok(Rational::new(if negative { -num } else { num }, den));
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, `infinity`, `∞`, integers, `a/b` and terminating decimals.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::infinity()),
            _ => Self::finite(parse_rational(t)?),
        }
    }
}

/// An exponent pair `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IndexPair {
    pub p: Exponent,
    pub q: Exponent,
}

impl IndexPair {
    pub fn new(p: Exponent, q: Exponent) -> Self {
        Self { p, q }
    }

    /// Shorthand for integer or infinite exponents; `0` stands for `∞`.
    pub fn ints(p: i64, q: i64) -> Result<Self> {
        let e = |v: i64| if v == 0 { Ok(Exponent::infinity()) } else { Exponent::int(v) };
        Ok(Self::new(e(p)?, e(q)?))
    }

    /// From reciprocals `(1/p, 1/q)`.
    pub fn from_inverses(ip: Rational, iq: Rational) -> Result<Self> {
        Ok(Self::new(Exponent::from_inverse(ip)?, Exponent::from_inverse(iq)?))
    }

    /// `(p', q')`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.p.conjugate(), self.q.conjugate())
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}
