//! Exact dyadic rationals `k / 2^e`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Largest exponent a [`Dyadic`] may carry; keeps sums inside `i128`.
pub const MAX_EXPONENT: u32 = 120;

/// An exact rational `numerator / 2^exponent`, kept normalized: the
/// numerator is odd, or the exponent is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    numerator: i128,
    exponent: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        numerator: 0,
        exponent: 0,
    };
    pub const ONE: Dyadic = Dyadic {
        numerator: 1,
        exponent: 0,
    };

    pub fn new(numerator: i128, exponent: u32) -> Self {
        assert!(
            exponent <= MAX_EXPONENT,
            "dyadic exponent {exponent} exceeds {MAX_EXPONENT}"
        );
        let mut d = Dyadic {
            numerator,
            exponent,
        };
        d.normalize();
        d
    }

    pub fn from_int(k: i128) -> Self {
        Dyadic::new(k, 0)
    }

    /// `2^-n`.
    pub fn pow2_neg(n: u32) -> Self {
        Dyadic::new(1, n)
    }

    fn normalize(&mut self) {
        if self.numerator == 0 {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().min(self.exponent);
        self.numerator >>= tz;
        self.exponent -= tz;
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// Multiply by `2^-k`.
    pub fn scale_pow2(self, k: u32) -> Self {
        Dyadic::new(self.numerator, self.exponent + k)
    }

    pub fn half(self) -> Self {
        self.scale_pow2(1)
    }

    pub fn abs(self) -> Self {
        Dyadic {
            numerator: self.numerator.abs(),
            exponent: self.exponent,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }

    /// Numerators of `self` and `other` over the common denominator.
    fn aligned(self, other: Self) -> (i128, i128, u32) {
        let e = self.exponent.max(other.exponent);
        (
            self.numerator << (e - self.exponent),
            other.numerator << (e - other.exponent),
            e,
        )
    }

    /// Exact decimal expansion; always terminates for dyadics.
    pub fn to_decimal_string(self) -> String {
        if self.exponent == 0 {
            return self.numerator.to_string();
        }
        // k / 2^e = k * 5^e / 10^e
        let scaled = BigInt::from(self.numerator) * BigInt::from(5u8).pow(self.exponent);
        let negative = scaled < BigInt::from(0);
        let digits = scaled.magnitude().to_string();
        let e = self.exponent as usize;
        let padded = if digits.len() <= e {
            format!("{}{}", "0".repeat(e + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - e);
        let frac = frac.trim_end_matches('0');
        let sign = if negative { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// `"k/2^e = decimal"`, or `"0"`.
    pub fn describe(self) -> String {
        if self.is_zero() {
            "0".to_string()
        } else {
            format!("{self} = {}", self.to_decimal_string())
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Self) -> Self {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Self) -> Self {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization() {
        assert_eq!(Dyadic::new(4, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(0, 7), Dyadic::ZERO);
        assert_eq!(Dyadic::new(6, 0).numerator(), 6);
        assert_eq!(Dyadic::new(3, 2).exponent(), 2);
    }

    #[test]
    fn describe_formats() {
        assert_eq!(Dyadic::ONE.describe(), "1/2^0 = 1");
        assert_eq!(Dyadic::ZERO.describe(), "0");
        assert_eq!(Dyadic::pow2_neg(2).describe(), "1/2^2 = 0.25");
        assert_eq!(Dyadic::new(3, 3).describe(), "3/2^3 = 0.375");
        assert_eq!(Dyadic::new(-1, 1).to_decimal_string(), "-0.5");
        assert_eq!(
            Dyadic::pow2_neg(20).to_decimal_string(),
            "0.00000095367431640625"
        );
    }

    #[test]
    fn ordering_across_exponents() {
        assert!(Dyadic::new(1, 1) < Dyadic::new(3, 2));
        assert!(Dyadic::new(3, 2) < Dyadic::ONE);
        assert_eq!(Dyadic::new(1, 1).min(Dyadic::new(1, 3)), Dyadic::new(1, 3));
    }

    proptest! {
        #[test]
        fn arithmetic_matches_f64(a in -1000i128..1000, ea in 0u32..20, b in -1000i128..1000, eb in 0u32..20) {
            let x = Dyadic::new(a, ea);
            let y = Dyadic::new(b, eb);
            prop_assert_eq!((x + y).to_f64(), x.to_f64() + y.to_f64());
            prop_assert_eq!((x - y).to_f64(), x.to_f64() - y.to_f64());
            prop_assert_eq!(x.cmp(&y), x.to_f64().partial_cmp(&y.to_f64()).unwrap());
            prop_assert_eq!(x.half().to_f64(), x.to_f64() / 2.0);
        }
    }
}
