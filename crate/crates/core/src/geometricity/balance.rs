use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("valuation of zero")]
pub struct ZeroValuation;

fn val_int(q: u64, x: &BigInt) -> i64 {
    let q = BigInt::from(q);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &q).is_zero() {
        x /= &q;
        v += 1;
    }
    v
}

/// `v_q(x)` for a non-zero rational.
pub fn padic_val(q: u64, x: &BigRational) -> Result<i64, ZeroValuation> {
    if x.is_zero() {
        return Err(ZeroValuation);
    }
    Ok(val_int(q, x.numer()) - val_int(q, x.denom()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub q: u64,
    /// `None` when `ℏ² = 0`.
    pub v_h: Option<i64>,
    pub v_d: i64,
    pub balanced: bool,
}

/// `(a, d)` is `q`-balanced if `v_q(a) ≥ v_q(d)` or `v_q(a)` is even.
pub fn q_balanced(hsq: &BigRational, d: i64, q: u64) -> BalanceReport {
    let v_d = val_int(q, &BigInt::from(d));
    let v_h = padic_val(q, hsq).ok();
    let balanced = match v_h {
        None => true,
        Some(v) => v >= v_d || v % 2 == 0,
    };
    BalanceReport { q, v_h, v_d, balanced }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn valuations() {
        assert_eq!(padic_val(3, &r(18, 1)), Ok(2));
        assert_eq!(padic_val(3, &r(1, 2)), Ok(0));
        assert_eq!(padic_val(7, &r(98, 3)), Ok(2));
        assert_eq!(padic_val(3, &r(1, 9)), Ok(-2));
        assert_eq!(padic_val(3, &r(0, 1)), Err(ZeroValuation));
    }

    #[test]
    fn balance() {
        assert!(q_balanced(&r(10, 1), 27, 3).balanced);
        assert!(q_balanced(&r(6, 1), 3, 3).balanced);
        let rep = q_balanced(&r(24, 1), 9, 3);
        assert_eq!((rep.v_h, rep.v_d, rep.balanced), (Some(1), 2, false));
        assert!(q_balanced(&r(0, 1), 9, 3).balanced);
    }
}
