//! Exact binomial coefficients.
//!
//! Counting in this crate must be exact: `C(q+k-1, k-1)` leaves the 64-bit
//! range quickly, so the fast path runs in `u128` with checked arithmetic and
//! falls back to arbitrary precision on overflow.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `C(n, r)` in `u128`, or `None` if an intermediate product overflows.
pub fn binomial_u128(n: u64, r: u64) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // C(n, i+1) = C(n, i) * (n - i) / (i + 1), exact at every step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// `C(n, r)` exactly.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if let Some(v) = binomial_u128(n, r) {
        return BigUint::from(v);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` as `u64`, `None` if it does not fit.
pub fn binomial_u64(n: u64, r: u64) -> Option<u64> {
    binomial_u128(n, r).and_then(|v| u64::try_from(v).ok())
}

/// Number of compositions of `q` into `k` non-negative parts, `C(q+k-1, k-1)`.
///
/// `k == 0` yields 1 for `q == 0` and 0 otherwise.
pub fn composition_count(k: u64, q: u64) -> BigUint {
    if k == 0 {
        return if q == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    binomial(q + k - 1, k - 1)
}

/// [`composition_count`] narrowed to `usize`, for sizing in-memory tables.
pub fn composition_count_usize(k: u64, q: u64) -> Option<usize> {
    composition_count(k, q).to_usize()
}
