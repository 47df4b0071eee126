use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational number, always reduced with a positive denominator.
///
/// Arithmetic is overflow-checked: every operation returns [`Error::Overflow`]
/// instead of wrapping.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Domain("rational with zero denominator".into()));
        }
        if numer == i128::MIN || denom == i128::MIN {
            return Err(Error::Overflow);
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.numer() > 0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn checked_add(&self, other: &Rational) -> Result<Rational> {
        self.0.checked_add(&other.0).map(Rational).ok_or(Error::Overflow)
    }

    pub fn checked_sub(&self, other: &Rational) -> Result<Rational> {
        self.0.checked_sub(&other.0).map(Rational).ok_or(Error::Overflow)
    }

    pub fn checked_mul(&self, other: &Rational) -> Result<Rational> {
        self.0.checked_mul(&other.0).map(Rational).ok_or(Error::Overflow)
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Rational> {
        if other.0.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        self.0.checked_div(&other.0).map(Rational).ok_or(Error::Overflow)
    }

    pub fn checked_sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Result<Rational> {
        values
            .into_iter()
            .try_fold(Rational::ZERO, |acc, v| acc.checked_add(v))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"num/den"` or a bare integer `"num"`. Whitespace is not accepted.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::RationalParse(s.to_string());
        let parse_int = |t: &str| -> Result<i128> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<i128>().map_err(|_| bad())
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (parse_int(n)?, parse_int(d)?),
            None => (parse_int(s)?, 1),
        };
        if d <= 0 {
            return Err(bad());
        }
        Rational::new(n, d).map_err(|_| bad())
    }
}

/// Common-denominator expansion of a rational probability vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcmExpansion {
    /// `L`, the least common multiple of the reduced denominators.
    pub common_denominator: u64,
    /// `C_i = l_i · (L / L_i)` for `c_i = l_i / L_i`; they sum to `L`.
    pub multiplicities: Vec<u64>,
}

/// Rewrites positive rationals `c_i` summing to one as `C_i / L` over their least
/// common denominator.
pub fn lcm_reduce(coeffs: &[Rational], max_lcm: u64) -> Result<LcmExpansion> {
    if coeffs.is_empty() {
        return Err(Error::Precondition("no coefficients".into()));
    }
    if let Some(c) = coeffs.iter().find(|c| !c.is_positive()) {
        return Err(Error::Precondition(format!("coefficient {c} is not positive")));
    }
    let total = Rational::checked_sum(coeffs)?;
    if total != Rational::ONE {
        return Err(Error::Precondition(format!(
            "coefficients sum to {total}, not 1"
        )));
    }
    let mut lcm: i128 = 1;
    for c in coeffs {
        let d = c.denom();
        let g = lcm.gcd(&d);
        lcm = (lcm / g).checked_mul(d).ok_or(Error::Overflow)?;
        if lcm > max_lcm as i128 {
            return Err(Error::SizeLimit {
                what: "common denominator",
                value: lcm.to_string(),
                max: max_lcm,
            });
        }
    }
    let multiplicities = coeffs
        .iter()
        .map(|c| {
            let m = c.numer().checked_mul(lcm / c.denom()).ok_or(Error::Overflow)?;
            u64::try_from(m).map_err(|_| Error::Overflow)
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(multiplicities.iter().sum::<u64>() as i128, lcm);
    Ok(LcmExpansion {
        common_denominator: lcm as u64,
        multiplicities,
    })
}
