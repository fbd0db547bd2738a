//! Dense real matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, chosen from the 1-norm.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

// Largest 1-norm for which the degree-m approximant meets unit roundoff.
const THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const MAX_SQUARINGS: i32 = 64;

pub fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square real matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Exponential(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Exponential("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }

    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(a, coeffs);
        }
    }

    let theta13 = THETA[4].1;
    let squarings = ((norm / theta13).log2().ceil() as i32).max(0);
    if squarings > MAX_SQUARINGS {
        return Err(Error::Exponential(format!("1-norm {norm:e} is too large to scale")));
    }
    let scaled = a * 2f64.powi(-squarings);
    let mut result = pade13(&scaled)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let identity = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let mut even_power = identity.clone();
    let mut u_inner = &identity * b[1];
    let mut v = &identity * b[0];
    for k in 1..b.len() / 2 {
        even_power = &even_power * &a2;
        u_inner += &even_power * b[2 * k + 1];
        v += &even_power * b[2 * k];
    }
    let u = a * u_inner;
    rational(u, v)
}

fn pade13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let b = &B13;
    let n = a.nrows();
    let identity = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_high = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u_inner = &a6 * &u_high + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &identity * b[1];
    let u = a * u_inner;
    let v_high = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * &v_high + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &identity * b[0];
    rational(u, v)
}

// (V − U)⁻¹ (V + U)
fn rational(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let numerator = &v + &u;
    let denominator = v - u;
    crate::dense::solve(&denominator, &numerator)
        .map_err(|_| Error::Exponential("Padé denominator is singular".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn zero_gives_identity() {
        let e = expm(&DMatrix::zeros(5, 5)).unwrap();
        assert_eq!(e, DMatrix::identity(5, 5));
    }

    #[test]
    fn diagonal_and_nilpotent() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.001, 2.5, 10.0]));
        let e = expm(&d).unwrap();
        for i in 0..4 {
            assert!((e[(i, i)] / d[(i, i)].exp() - 1.0).abs() < 1e-13);
        }
        // strictly upper triangular: series terminates after the square
        let n = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 3.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0]);
        let exact = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 8.0, 0.0, 1.0, 5.0, 0.0, 0.0, 1.0]);
        assert!(max_abs(&(expm(&n).unwrap() - exact)) < 1e-13);
    }

    #[test]
    fn rotation_generator_at_every_degree() {
        for theta in [1e-3, 0.1, 0.5, 1.5, 4.0, 40.0] {
            let a = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
            let e = expm(&a).unwrap();
            let exact = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
            assert!(max_abs(&(e - exact)) < 1e-13 * theta.max(1.0), "theta = {theta}");
        }
    }

    #[test]
    fn inverse_of_negation() {
        let a = DMatrix::from_fn(6, 6, |i, j| ((i * 3 + j * 5) % 7) as f64 / 7.0 - 0.4);
        let product = expm(&a).unwrap() * expm(&(-&a)).unwrap();
        assert!(max_abs(&(product - DMatrix::identity(6, 6))) < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(expm(&DMatrix::zeros(2, 3)).is_err());
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = f64::NAN;
        assert!(expm(&a).is_err());
    }
}
