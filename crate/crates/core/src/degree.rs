//! Exact degree values used as exponents of formal Dirichlet series.
//!
//! Two kinds exist. A [`DegreeKey::Rational`] is an exact non-negative
//! rational number and adds as a number. A [`DegreeKey::MultInt`] holds an
//! integer `n >= 1` standing for the real exponent `log n`; such keys "add"
//! by multiplying the integers, so no logarithm is ever evaluated.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Which of the two key families a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyKind {
    Rational,
    MultInt,
}

impl KeyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KeyKind::Rational => "rational",
            KeyKind::MultInt => "multint",
        }
    }
}

impl fmt::Display for KeyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An exact, totally ordered, additive degree value.
///
/// Keys of different kinds never meet inside one series or one model. The
/// `Ord` impl still orders them (all rationals before all integer keys) so
/// that keys can live in ordered maps, but arithmetic across kinds panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DegreeKey {
    Rational(BigRational),
    MultInt(u64),
}

impl DegreeKey {
    pub fn zero(kind: KeyKind) -> Self {
        match kind {
            KeyKind::Rational => DegreeKey::Rational(BigRational::zero()),
            KeyKind::MultInt => DegreeKey::MultInt(1),
        }
    }

    pub fn integer(n: i64) -> Self {
        DegreeKey::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        DegreeKey::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn kind(&self) -> KeyKind {
        match self {
            DegreeKey::Rational(_) => KeyKind::Rational,
            DegreeKey::MultInt(_) => KeyKind::MultInt,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DegreeKey::Rational(r) => r.is_zero(),
            DegreeKey::MultInt(n) => *n == 1,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            DegreeKey::Rational(r) => r.is_positive(),
            DegreeKey::MultInt(n) => *n > 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            DegreeKey::Rational(r) => Some(r),
            DegreeKey::MultInt(_) => None,
        }
    }

    /// Additive composition. Integer keys saturate at `u64::MAX`, which lies
    /// above any cutoff a caller can request.
    pub fn add(&self, other: &DegreeKey) -> DegreeKey {
        match (self, other) {
            (DegreeKey::Rational(a), DegreeKey::Rational(b)) => DegreeKey::Rational(a + b),
            (DegreeKey::MultInt(a), DegreeKey::MultInt(b)) => {
                DegreeKey::MultInt(a.checked_mul(*b).unwrap_or(u64::MAX))
            }
            _ => panic!("degree keys of different kinds cannot be combined"),
        }
    }

    /// The key `x` with `other + x = self`, if one exists in the key family.
    pub fn checked_sub(&self, other: &DegreeKey) -> Option<DegreeKey> {
        match (self, other) {
            (DegreeKey::Rational(a), DegreeKey::Rational(b)) => {
                (a >= b).then(|| DegreeKey::Rational(a - b))
            }
            (DegreeKey::MultInt(a), DegreeKey::MultInt(b)) => {
                (*b != 0 && a % b == 0).then(|| DegreeKey::MultInt(a / b))
            }
            _ => None,
        }
    }

    /// Numeric value of the exponent (`ln n` for integer keys).
    pub fn to_f64(&self) -> f64 {
        match self {
            DegreeKey::Rational(r) => r.to_f64().unwrap_or(f64::INFINITY),
            DegreeKey::MultInt(n) => (*n as f64).ln(),
        }
    }

    /// JSON rendering: rational keys as `"p/q"` strings, integer keys as numbers.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            DegreeKey::Rational(_) => serde_json::Value::String(self.to_string()),
            DegreeKey::MultInt(n) => serde_json::Value::from(*n),
        }
    }
}

impl PartialOrd for DegreeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DegreeKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DegreeKey::Rational(a), DegreeKey::Rational(b)) => a.cmp(b),
            (DegreeKey::MultInt(a), DegreeKey::MultInt(b)) => a.cmp(b),
            (DegreeKey::Rational(_), DegreeKey::MultInt(_)) => Ordering::Less,
            (DegreeKey::MultInt(_), DegreeKey::Rational(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for DegreeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeKey::Rational(r) => write!(f, "{}", r),
            DegreeKey::MultInt(n) => write!(f, "{}", n),
        }
    }
}

/// Error returned when a rational literal cannot be read.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal `{0}`")]
pub struct RationalParseError(pub String);

/// Parses `INT` or `INT/INT` (optionally signed) into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let err = || RationalParseError(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let num = parse_int(num).ok_or_else(err)?;
    let den = match den {
        Some(d) => {
            if d.starts_with(['-', '+']) {
                return Err(err());
            }
            parse_int(d).ok_or_else(err)?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Floor of a rational as a big integer.
pub fn floor(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}
