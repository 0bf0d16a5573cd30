//! Iteration counts, precision and capacity lower bounds.

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::exact_linalg::rational::ln_bigint;
use crate::exact_linalg::Rational;

fn ln_mmn(n: usize, m: usize, max_entry: &BigInt) -> f64 {
    ln_bigint(max_entry) + (m as f64).ln() + (n as f64).ln()
}

/// Steps needed by the fullness test: `2 + ⌈144 n² ln(Mmn)⌉`.
pub fn iteration_bound(n: usize, m: usize, max_entry: &BigInt) -> u64 {
    let l = ln_mmn(n, m, max_entry).max(0.0);
    let n = n as f64;
    2 + (144.0 * n * n * l).ceil() as u64
}

/// Steps needed by capacity approximation: `⌈(4n³/ε²)(1 + 10n² ln(Mn))⌉`.
pub fn capacity_iteration_bound(n: usize, max_entry: &BigInt, eps: f64) -> u64 {
    let l = (ln_bigint(max_entry) + (n as f64).ln()).max(0.0);
    let n = n as f64;
    ((4.0 * n * n * n / (eps * eps)) * (1.0 + 10.0 * n * n * l)).ceil() as u64
}

/// Fractional bits kept by the truncated iteration.
///
/// `max(64, ⌈10 t² log₂(2α)⌉ + 64)` with `α = (M²n²m)^{n−1}`.
pub fn truncation_bits(n: usize, m: usize, max_entry: &BigInt, t: u64) -> u64 {
    let log2_base = 2.0 * ln_bigint(max_entry) / std::f64::consts::LN_2
        + 2.0 * (n as f64).log2()
        + (m as f64).log2();
    let log2_two_alpha = 1.0 + (n as f64 - 1.0) * log2_base.max(0.0);
    let t = t as f64;
    let p = (10.0 * t * t * log2_two_alpha).ceil() + 64.0;
    (p as u64).max(64)
}

/// `(Mmn)^{−4n}`.
pub fn capacity_lower_bound(n: usize, m: usize, max_entry: &BigInt) -> Rational {
    let base = max_entry * BigInt::from(m) * BigInt::from(n);
    Rational::new(BigInt::one(), Pow::pow(base, 4 * n as u32))
}

/// `n^{−2n}`, valid for rank non-decreasing operators with integer Kraus matrices.
pub fn square_capacity_lower_bound(n: usize) -> Rational {
    Rational::new(BigInt::one(), Pow::pow(BigInt::from(n), 2 * n as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rational::{ratio, to_f64};

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn iteration_bound_examples() {
        assert_eq!(iteration_bound(2, 2, &b(1)), 801);
        assert_eq!(iteration_bound(1, 1, &b(1)), 2);
        assert!(iteration_bound(3, 2, &b(5)) > iteration_bound(2, 2, &b(5)));
    }

    #[test]
    fn truncation_bits_examples() {
        // α = 1 leaves only the 10t² term.
        assert_eq!(truncation_bits(1, 1, &b(1), 2), 10 * 4 + 64);
        assert_eq!(truncation_bits(1, 1, &b(1), 0), 64);
        // α = M²n²m = 8 for n = 2, m = 2, M = 1.
        assert_eq!(truncation_bits(2, 2, &b(1), 801), 10 * 801 * 801 * 4 + 64);
        let base = truncation_bits(2, 2, &b(3), 100);
        assert!(truncation_bits(3, 2, &b(3), 100) > base);
        assert!(truncation_bits(2, 3, &b(3), 100) > base);
        assert!(truncation_bits(2, 2, &b(4), 100) > base);
        assert!(truncation_bits(2, 2, &b(3), 101) > base);
    }

    #[test]
    fn lower_bound_examples() {
        let v = capacity_lower_bound(2, 2, &b(1));
        assert_eq!(v, ratio(1, 65536));
        assert!((to_f64(&v) - 1.526e-5).abs() < 1e-8);
        assert_eq!(capacity_lower_bound(1, 1, &b(1)), ratio(1, 1));
        assert_eq!(square_capacity_lower_bound(3), ratio(1, 729));
    }

    #[test]
    fn capacity_bound_grows_with_precision() {
        assert!(capacity_iteration_bound(2, &b(1), 0.05) > capacity_iteration_bound(2, &b(1), 0.1));
        assert_eq!(capacity_iteration_bound(1, &b(1), 0.5), 16);
    }
}
