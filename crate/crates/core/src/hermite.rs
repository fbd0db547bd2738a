//! Physicists' Hermite polynomials and the normalised Hermite functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest degree accepted by [`hermite`].
pub const DEFAULT_HERMITE_CAP: usize = 200;

// Rescale threshold for the scaled recurrence.
const RESCALE_ABOVE: f64 = 1e150;

/// `H_n(x)` by the three-term recurrence `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    hermite_with_cap(n, x, DEFAULT_HERMITE_CAP)
}

pub fn hermite_with_cap(n: usize, x: f64, cap: usize) -> Result<f64> {
    if n > cap {
        return Err(Error::HermiteDegreeTooLarge { degree: n, cap });
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `H_n(x)` as `(sign, ln|H_n(x)|)`, carried through the recurrence with
/// periodic rescaling so large degrees and arguments do not overflow.
fn hermite_log_abs(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    let mut log_scale = 0.0;
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            log_scale += cur.abs().ln();
            prev /= cur.abs();
            cur = cur.signum();
        }
    }
    if cur == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (cur.signum(), log_scale + cur.abs().ln())
    }
}

/// Normalised Hermite function
/// `exp(-x^2 / 2) H_n(x) / (pi^(1/4) 2^(n/2) sqrt(n!))`.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    if n > DEFAULT_HERMITE_CAP {
        return Err(Error::HermiteDegreeTooLarge {
            degree: n,
            cap: DEFAULT_HERMITE_CAP,
        });
    }
    let (sign, ln_h) = hermite_log_abs(n, x);
    if sign == 0.0 {
        return Ok(0.0);
    }
    let ln_norm = 0.25 * PI.ln() + 0.5 * n as f64 * 2f64.ln() + 0.5 * ln_factorial(n);
    Ok(sign * (ln_h - 0.5 * x * x - ln_norm).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // explicit coefficients of H_0..H_6
    fn hermite_explicit(n: usize, x: f64) -> f64 {
        let coeffs: &[f64] = match n {
            0 => &[1.0],
            1 => &[0.0, 2.0],
            2 => &[-2.0, 0.0, 4.0],
            3 => &[0.0, -12.0, 0.0, 8.0],
            4 => &[12.0, 0.0, -48.0, 0.0, 16.0],
            5 => &[0.0, 120.0, 0.0, -160.0, 0.0, 32.0],
            6 => &[-120.0, 0.0, 720.0, 0.0, -480.0, 0.0, 64.0],
            _ => unreachable!(),
        };
        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    #[test]
    fn low_degrees() {
        for x in [-3.0, -0.7, 0.0, 0.5, 1.0, 2.25] {
            assert_eq!(hermite(0, x).unwrap(), 1.0);
            for n in 0..=6 {
                assert_relative_eq!(hermite(n, x).unwrap(), hermite_explicit(n, x), max_relative = 1e-13, epsilon = 1e-12);
            }
        }
        assert_eq!(hermite(1, 0.5).unwrap(), 1.0);
        assert_eq!(hermite(4, 1.0).unwrap(), -20.0);
    }

    #[test]
    fn degree_cap() {
        assert!(hermite(200, 0.3).is_ok());
        assert!(matches!(hermite(201, 0.3), Err(Error::HermiteDegreeTooLarge { degree: 201, cap: 200 })));
        assert!(hermite_with_cap(10, 0.3, 5).is_err());
    }

    #[test]
    fn hermite_function_matches_closed_form() {
        assert_relative_eq!(hermite_function(0, 0.0).unwrap(), PI.powf(-0.25), max_relative = 1e-15);
        for n in 0..=6 {
            let mut fact = 1.0;
            for k in 2..=n {
                fact *= k as f64;
            }
            for x in [-2.0f64, -0.3, 0.8, 3.1] {
                let direct = (-x * x / 2.0).exp() * hermite_explicit(n, x)
                    / (PI.powf(0.25) * 2f64.powf(n as f64 / 2.0) * fact.sqrt());
                assert_relative_eq!(hermite_function(n, x).unwrap(), direct, max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn hermite_function_stays_finite_at_large_degree() {
        for n in [100, 150, 200] {
            for x in [-30.0, -12.0, 0.1, 7.5, 25.0] {
                let v = hermite_function(n, x).unwrap();
                assert!(v.is_finite(), "n={n} x={x}");
                assert!(v.abs() < 1.0);
            }
        }
    }
}
