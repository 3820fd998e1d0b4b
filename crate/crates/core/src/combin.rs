//! Exact binomial coefficients and rational helpers.

use num::bigint::BigUint;
use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};

pub type Ratio = BigRational;

/// `C(n, k)` with the convention `C(n, k) = 0` when `k > n`, `k < 0` or `n < 0`.
pub fn binom(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binom_int(n: i64, k: i64) -> BigInt {
    BigInt::from(binom(n, k))
}

pub fn ratio_from_int(v: impl Into<BigInt>) -> Ratio {
    Ratio::from_integer(v.into())
}

/// Lossy conversion used at the very end of exact computations.
pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(5, 0), BigUint::one());
        assert_eq!(binom(0, 0), BigUint::one());
        assert_eq!(binom(3, 4), BigUint::zero());
        assert_eq!(binom(-1, 0), BigUint::zero());
        assert_eq!(binom(4, -1), BigUint::zero());
    }

    #[test]
    fn pascal_rule() {
        for n in 1..60 {
            for k in 1..n {
                assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
            }
        }
    }

    #[test]
    fn beyond_u64() {
        // C(110, 55) does not fit in 64 bits.
        let c = binom(110, 55);
        assert!(c.bits() > 64);
        assert_eq!(binom(110, 8).to_string(), "409705619895");
    }
}
