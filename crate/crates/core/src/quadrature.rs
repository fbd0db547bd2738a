//! One-dimensional quadrature: adaptive Gauss-Kronrod (7/15) on finite
//! intervals and Gauss-Hermite rules for the weight `exp(-x^2)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for KRONROD_NODES[1], [3], [5], [7].
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    /// Absolute tolerance on the integral.
    pub tolerance: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_depth: MAX_DEPTH,
        }
    }
}

fn kronrod_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_centre = f(centre);
    let mut kronrod = KRONROD_WEIGHTS[7] * f_centre;
    let mut gauss = GAUSS_WEIGHTS[3] * f_centre;
    for (i, (&x, &w)) in KRONROD_NODES[..7].iter().zip(&KRONROD_WEIGHTS[..7]).enumerate() {
        let pair = f(centre - half * x) + f(centre + half * x);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Integrates `f` over `[a, b]`, bisecting panels until the Kronrod/Gauss
/// difference of each panel is below its share of the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, config: AdaptiveConfig) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Domain(format!("bad integration interval [{a}, {b}]")));
    }
    let mut result = Quadrature {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
    };
    let mut stack = vec![(a, b, config.tolerance, 0usize)];
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (value, err) = kronrod_panel(&f, lo, hi);
        result.evaluations += 15;
        if err <= tol || depth >= config.max_depth {
            if err > tol {
                return Err(Error::Domain(format!(
                    "quadrature did not converge on [{lo}, {hi}] (error estimate {err:e})"
                )));
            }
            result.value += value;
            result.error_estimate += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * tol, depth + 1));
            stack.push((lo, mid, 0.5 * tol, depth + 1));
        }
    }
    Ok(result)
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for
/// `∫ exp(-x^2) g(x) dx`, via the Golub-Welsch eigenproblem.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Domain("Gauss-Hermite rule needs at least one node".into()));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = off;
        jacobi[(k, k - 1)] = off;
    }
    let eigen = SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Diagonalization {
            message: format!("Golub-Welsch matrix of order {n}"),
            matrix_dump: String::new(),
        }
    })?;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eigen.eigenvectors[(0, i)];
            (eigen.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}
