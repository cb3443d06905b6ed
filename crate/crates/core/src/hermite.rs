//! Physicists' Hermite polynomials of complex argument.

use num_complex::Complex64 as C64;

/// `H_n(z)` by the recurrence `H_{k+1} = 2z H_k - 2k H_{k-1}`.
pub fn hermite(n: usize, z: C64) -> C64 {
    let mut prev = C64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n'(z) = 2n H_{n-1}(z)`
pub fn hermite_derivative(n: usize, z: C64) -> C64 {
    if n == 0 {
        C64::new(0.0, 0.0)
    } else {
        2.0 * n as f64 * hermite(n - 1, z)
    }
}

/// `H_n''(z) = 4n(n-1) H_{n-2}(z)`
pub fn hermite_second_derivative(n: usize, z: C64) -> C64 {
    if n < 2 {
        C64::new(0.0, 0.0)
    } else {
        4.0 * (n * (n - 1)) as f64 * hermite(n - 2, z)
    }
}

/// `ln|H_n(z)|`, running the recurrence on `H_k / σ^k` with `σ = max(1, |2z|)`
/// so that huge arguments do not overflow.
pub fn hermite_ln_abs(n: usize, z: C64) -> f64 {
    let sigma = (2.0 * z.norm()).max(1.0);
    let mut prev = C64::new(1.0, 0.0);
    if n == 0 {
        return 0.0;
    }
    let mut cur = 2.0 * z / sigma;
    for k in 1..n {
        let next = (2.0 * z * cur - 2.0 * k as f64 * prev / sigma) / sigma;
        prev = cur;
        cur = next;
    }
    cur.norm().ln() + n as f64 * sigma.ln()
}

/// Monomial coefficients `c_0..=c_n` of `H_n`, built with the coefficient form
/// of the recurrence. Exact in `f64` for `n` up to about 25.
pub fn hermite_coeffs(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2.0 * k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn low_orders() {
        let z = c(0.7, -1.3);
        assert_eq!(hermite(0, z), c(1.0, 0.0));
        assert_eq!(hermite(1, z), 2.0 * z);
        assert!((hermite(2, z) - (4.0 * z * z - 2.0)).norm() < 1e-14);
        assert_eq!(hermite(3, c(1.0, 0.0)), c(-4.0, 0.0));
        // 16 i^4 - 48 i^2 + 12
        assert!((hermite(4, c(0.0, 1.0)) - c(76.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn coefficient_tables() {
        assert_eq!(hermite_coeffs(0), vec![1.0]);
        assert_eq!(hermite_coeffs(3), vec![0.0, -12.0, 0.0, 8.0]);
        assert_eq!(hermite_coeffs(4), vec![12.0, 0.0, -48.0, 0.0, 16.0]);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let z = c(0.4, 0.9);
        let h = 1e-5;
        for n in 0..8 {
            let fd = (hermite(n, z + h) - hermite(n, z - h)) / (2.0 * h);
            assert!((fd - hermite_derivative(n, z)).norm() < 1e-6 * (1.0 + fd.norm()));
            let fd2 = (hermite_derivative(n, z + h) - hermite_derivative(n, z - h)) / (2.0 * h);
            assert!((fd2 - hermite_second_derivative(n, z)).norm() < 1e-6 * (1.0 + fd2.norm()));
        }
    }

    #[test]
    fn log_modulus_matches_direct_and_survives_huge_arguments() {
        for n in [0, 1, 5, 10] {
            let z = c(1.7, -0.6);
            let direct = hermite(n, z).norm().ln();
            assert!((hermite_ln_abs(n, z) - direct).abs() < 1e-12);
        }
        // Leading term dominates: ln|H_n(z)| ≈ n ln|2z|.
        let z = c(0.0, 3e8);
        let v = hermite_ln_abs(40, z);
        assert!(v.is_finite());
        assert!((v - 40.0 * (6e8f64).ln()).abs() < 1e-9);
    }
}
