//! The Planck oscillator in three representations: the continuum position
//! representation (Hermite functions of `q / l`), the continuum `y = (q/l)^2 / 2`
//! representation, and the discrete lattice representation built from the
//! weighted difference operators, where the eigenvectors are Kronecker deltas.

use std::io::Write;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::{hermite_function, DEFAULT_HERMITE_CAP};
use crate::lattice::{
    build_delta, build_delta_circ, build_delta_prime, build_delta_sharp, LatticeOperator,
    LatticeShape, TruncatedBasis, WaveFunction,
};
use crate::quadrature::{integrate, AdaptiveConfig};

/// Half-width of the default quadrature window, in units of `l`.
pub const QUADRATURE_HALF_WIDTH: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitMode {
    Explicit,
    /// `hbar = c = l = 1`.
    Fundamental,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    c: f64,
    l: f64,
    nu: f64,
    mode: UnitMode,
}

impl PhysicalConstants {
    pub fn fundamental() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            l: 1.0,
            nu: 1.0,
            mode: UnitMode::Fundamental,
        }
    }

    pub fn explicit(hbar: f64, c: f64, l: f64, nu: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("c", c), ("l", l), ("nu", nu)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {value}")));
            }
        }
        Ok(Self {
            hbar,
            c,
            l,
            nu,
            mode: UnitMode::Explicit,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mode(&self) -> UnitMode {
        self.mode
    }

    /// Energy quantum `hbar * nu`.
    pub fn hbar_nu(&self) -> f64 {
        self.hbar * self.nu
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::fundamental()
    }
}

/// `E_N = (N + 1/2) hbar nu`.
pub fn level_energy(n: usize, constants: &PhysicalConstants) -> f64 {
    (n as f64 + 0.5) * constants.hbar_nu()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Position,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumEigenstate {
    n: usize,
    energy: f64,
    constants: PhysicalConstants,
    representation: Representation,
}

impl ContinuumEigenstate {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// `psi_N(q / l)`, normalised so that `∫ |psi_N|^2 dq = 1`.
    pub fn eval_q(&self, q: f64) -> f64 {
        let l = self.constants.l;
        hermite_function(self.n, q / l).expect("degree checked at construction") / l.sqrt()
    }

    /// `q`-derivative of [`ContinuumEigenstate::eval_q`], from
    /// `H_N' = 2N H_{N-1}`.
    pub fn eval_q_derivative(&self, q: f64) -> f64 {
        let l = self.constants.l;
        let x = q / l;
        let lower = if self.n == 0 {
            0.0
        } else {
            (2.0 * self.n as f64).sqrt() * hermite_function(self.n - 1, x).expect("degree checked")
        };
        let value = hermite_function(self.n, x).expect("degree checked");
        (lower - x * value) / (l * l.sqrt())
    }

    /// `psi_hat_N(y) = exp(-y) H_N(sqrt(2y)) / (pi^(1/4) 2^(N/2) sqrt(N!))`,
    /// defined for `y > 0`.
    pub fn eval_y(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y <= 0.0 {
            return Err(Error::Domain(format!("y must be positive, got {y}")));
        }
        hermite_function(self.n, (2.0 * y).sqrt())
    }

    /// Residual of `sqrt(2y) d/dy [sqrt(2y) dpsi/dy] + (2E/(hbar nu) - 2y) psi`,
    /// written as `2y psi'' + psi' + (2E/(hbar nu) - 2y) psi` with five-point
    /// central differences of step `h`. Odd levels behave like `sqrt(y)` at
    /// the origin, which a three-point stencil resolves poorly for small `y`.
    pub fn y_ode_residual(&self, y: f64, h: f64) -> Result<f64> {
        if h.is_nan() || h <= 0.0 || y - 2.0 * h <= 0.0 {
            return Err(Error::Domain(format!("need 0 < 2h < y, got y = {y}, h = {h}")));
        }
        let [m2, m1, mid, p1, p2] = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| self.eval_y(y + k * h));
        let (m2, m1, mid, p1, p2) = (m2?, m1?, mid?, p1?, p2?);
        let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
        let d2 = (-p2 + 16.0 * p1 - 30.0 * mid + 16.0 * m1 - m2) / (12.0 * h * h);
        let two_e = 2.0 * self.energy / self.constants.hbar_nu();
        Ok(2.0 * y * d2 + d1 + (two_e - 2.0 * y) * mid)
    }

    /// `E / (hbar nu)` recomputed by adaptive quadrature as a Rayleigh
    /// quotient in this state's own representation.
    ///
    /// Position: `(1/2) ∫ [l^2 psi'^2 + (q/l)^2 psi^2] dq`.
    ///
    /// Y: the wave equation in `y` is the Sturm-Liouville problem
    /// `(p psi')' + (2E - 2y) psi / p = 0` with `p = sqrt(2y)`, so
    /// `2E = ∫ p (psi'^2 + psi^2) dy / ∫ psi^2 / p dy`, integrated in
    /// `s = sqrt(y)` to remove the endpoint singularity.
    pub fn rayleigh_energy(&self, config: AdaptiveConfig) -> Result<f64> {
        match self.representation {
            Representation::Position => {
                let l = self.constants.l;
                let half = QUADRATURE_HALF_WIDTH * l;
                let kinetic = integrate(|q| (l * self.eval_q_derivative(q)).powi(2), -half, half, config)?;
                let potential = integrate(|q| (q / l * self.eval_q(q)).powi(2), -half, half, config)?;
                Ok(0.5 * (kinetic.value + potential.value))
            }
            Representation::Y => {
                let s_max = QUADRATURE_HALF_WIDTH / 2f64.sqrt();
                let n = self.n;
                // with x = sqrt(2) s: p psi_y^2 dy = sqrt(2) h'(x)^2 ds,
                // p psi^2 dy = 2 sqrt(2) s^2 h(x)^2 ds, psi^2 / p dy = sqrt(2) h(x)^2 ds
                let numerator = integrate(
                    |s| {
                        let x = 2f64.sqrt() * s;
                        let h = hermite_function(n, x).expect("degree checked");
                        let dh = hermite_function_derivative(n, x);
                        2f64.sqrt() * dh * dh + 2.0 * 2f64.sqrt() * s * s * h * h
                    },
                    0.0,
                    s_max,
                    config,
                )?;
                let weight = integrate(
                    |s| {
                        let h = hermite_function(n, 2f64.sqrt() * s).expect("degree checked");
                        2f64.sqrt() * h * h
                    },
                    0.0,
                    s_max,
                    config,
                )?;
                Ok(0.5 * numerator.value / weight.value)
            }
        }
    }
}

// d/dx of the normalised Hermite function.
fn hermite_function_derivative(n: usize, x: f64) -> f64 {
    let lower = if n == 0 {
        0.0
    } else {
        (2.0 * n as f64).sqrt() * hermite_function(n - 1, x).expect("degree checked")
    };
    lower - x * hermite_function(n, x).expect("degree checked")
}

fn check_degree(n: usize) -> Result<()> {
    if n > DEFAULT_HERMITE_CAP {
        return Err(Error::HermiteDegreeTooLarge {
            degree: n,
            cap: DEFAULT_HERMITE_CAP,
        });
    }
    Ok(())
}

pub fn continuum_eigenstate_q(n: usize, constants: &PhysicalConstants) -> Result<ContinuumEigenstate> {
    check_degree(n)?;
    Ok(ContinuumEigenstate {
        n,
        energy: level_energy(n, constants),
        constants: *constants,
        representation: Representation::Position,
    })
}

pub fn continuum_eigenstate_y(n: usize, constants: &PhysicalConstants) -> Result<ContinuumEigenstate> {
    check_degree(n)?;
    Ok(ContinuumEigenstate {
        n,
        energy: level_energy(n, constants),
        constants: *constants,
        representation: Representation::Y,
    })
}

/// `∫ psi_a psi_b dq` over `[-12 l, 12 l]`.
pub fn overlap_q(a: &ContinuumEigenstate, b: &ContinuumEigenstate, config: AdaptiveConfig) -> Result<f64> {
    let half = QUADRATURE_HALF_WIDTH * a.constants.l;
    Ok(integrate(|q| a.eval_q(q) * b.eval_q(q), -half, half, config)?.value)
}

/// `Q = l Δ°`.
pub fn build_position_operator_1d(basis: TruncatedBasis, constants: &PhysicalConstants) -> LatticeOperator {
    build_delta_circ(basis).scale_real(constants.l)
}

/// `P = (-i hbar / l) Δ#`.
pub fn build_momentum_operator_1d(basis: TruncatedBasis, constants: &PhysicalConstants) -> LatticeOperator {
    build_delta_sharp(basis).scale(Complex64::new(0.0, -constants.hbar / constants.l))
}

fn diagonal(basis: TruncatedBasis, f: impl Fn(usize) -> f64) -> LatticeOperator {
    LatticeOperator::from_triplets(
        LatticeShape::single(basis),
        Some(0),
        (0..basis.len()).map(|n| (n, n, Complex64::new(f(n), 0.0))),
    )
    .expect("diagonal entries lie inside the basis")
}

/// Position operator assembled from the plain differences on the grid
/// `y_n = n l`:
/// `sqrt(2 y_n l) + [Δ sqrt(y_n l / 2) - sqrt(y_n l / 2) Δ']`.
pub fn build_position_operator_split(basis: TruncatedBasis, constants: &PhysicalConstants) -> LatticeOperator {
    let l = constants.l;
    let y = |n: usize| n as f64 * l;
    let centre = diagonal(basis, |n| (2.0 * y(n) * l).sqrt());
    let weight = diagonal(basis, |n| (y(n) * l / 2.0).sqrt());
    let forward = &build_delta(basis) * &weight;
    let backward = &weight * &build_delta_prime(basis);
    &centre + &(&forward - &backward)
}

/// Momentum operator from the plain differences,
/// `(-i hbar / l^2) [Δ sqrt(y_n l / 2) + sqrt(y_n l / 2) Δ']`.
pub fn build_momentum_operator_split(basis: TruncatedBasis, constants: &PhysicalConstants) -> LatticeOperator {
    let l = constants.l;
    let weight = diagonal(basis, |n| (n as f64 * l * l / 2.0).sqrt());
    let sum = &(&build_delta(basis) * &weight) + &(&weight * &build_delta_prime(basis));
    sum.scale(Complex64::new(0.0, -constants.hbar / (l * l)))
}

/// `H = (1/2) [(l / hbar)^2 P^2 + (1 / l)^2 Q^2]`, measured in units of
/// `hbar nu`. Equal to `(1/2) [-(Δ#)^2 + (Δ°)^2]` for every choice of units.
pub fn discrete_hamiltonian(basis: TruncatedBasis, constants: &PhysicalConstants) -> LatticeOperator {
    let q = build_position_operator_1d(basis, constants);
    let p = build_momentum_operator_1d(basis, constants);
    let kinetic = (&p * &p).scale_real((constants.l / constants.hbar).powi(2));
    let potential = (&q * &q).scale_real(constants.l.powi(-2));
    (&kinetic + &potential).scale_real(0.5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteEigenstate {
    n: usize,
    eigenvalue: f64,
    energy: f64,
    vector: WaveFunction,
    interior: bool,
}

impl DiscreteEigenstate {
    /// The analytic eigenstate `phi_N(n) = δ_{Nn}`.
    pub fn exact(basis: TruncatedBasis, n: usize, constants: &PhysicalConstants) -> Result<Self> {
        let vector = WaveFunction::delta(LatticeShape::single(basis), &[n])?;
        Ok(Self {
            n,
            eigenvalue: n as f64 + 0.5,
            energy: level_energy(n, constants),
            vector,
            interior: basis.is_interior(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `E / (hbar nu)`.
    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn vector(&self) -> &WaveFunction {
        &self.vector
    }

    /// Whether the level lies in the interior block, where it must agree
    /// with the unbounded-lattice spectrum.
    pub fn is_interior(&self) -> bool {
        self.interior
    }
}

/// Diagonalises [`discrete_hamiltonian`]; states are sorted by energy and each
/// eigenvector is signed so its largest component is positive.
pub fn solve_discrete_spectrum(basis: TruncatedBasis, constants: &PhysicalConstants) -> Result<Vec<DiscreteEigenstate>> {
    let hamiltonian = discrete_hamiltonian(basis, constants);
    let dense = hamiltonian.real_dense();
    let eigen = SymmetricEigen::try_new(dense.clone(), f64::EPSILON, 0).ok_or_else(|| {
        Error::Diagonalization {
            message: format!("discrete Hamiltonian, n_max = {}", basis.n_max()),
            matrix_dump: hamiltonian.to_string(),
        }
    })?;
    // Label each eigenvector by its dominant basis index: the top level of
    // the truncation sits at n_max / 2, so ascending order is not level order.
    let shape = LatticeShape::single(basis);
    let mut states = (0..eigen.eigenvalues.len())
        .map(|col| {
            let column = eigen.eigenvectors.column(col);
            let (n, pivot) = column
                .iter()
                .copied()
                .enumerate()
                .fold((0, 0.0f64), |best, (i, v)| if v.abs() > best.1.abs() { (i, v) } else { best });
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            let values: Vec<f64> = column.iter().map(|v| sign * v).collect();
            let eigenvalue = eigen.eigenvalues[col];
            Ok(DiscreteEigenstate {
                n,
                eigenvalue,
                energy: eigenvalue * constants.hbar_nu(),
                vector: WaveFunction::from_real(shape.clone(), &values)?,
                interior: basis.is_interior(n),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    states.sort_by_key(|s| s.n);
    if states.windows(2).any(|w| w[0].n == w[1].n) {
        return Err(Error::Diagonalization {
            message: format!("eigenvectors do not separate the basis levels, n_max = {}", basis.n_max()),
            matrix_dump: hamiltonian.to_string(),
        });
    }
    Ok(states)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumRow {
    pub representation: &'static str,
    pub n: usize,
    pub energy: f64,
}

/// CSV with header `representation,N,E_N`.
pub fn write_spectrum_csv<W: Write>(out: W, rows: &[SpectrumRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["representation", "N", "E_N"]).map_err(csv_error)?;
    for row in rows {
        writer
            .write_record([row.representation.to_string(), row.n.to_string(), row.energy.to_string()])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// CSV with header `N,x,psi`, tabulating `psi_N(x)` on `grid` for each state.
pub fn write_eigenfunction_csv<W: Write>(out: W, states: &[ContinuumEigenstate], grid: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["N", "x", "psi"]).map_err(csv_error)?;
    for state in states {
        for &x in grid {
            let psi = match state.representation {
                Representation::Position => state.eval_q(x),
                Representation::Y => state.eval_y(x)?,
            };
            writer
                .write_record([state.n.to_string(), x.to_string(), psi.to_string()])
                .map_err(csv_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// `count` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

pub(crate) fn csv_error(err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::commutator;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn basis(n_max: usize) -> TruncatedBasis {
        TruncatedBasis::new(n_max).unwrap()
    }

    #[test]
    fn constants_validation() {
        assert!(PhysicalConstants::explicit(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(PhysicalConstants::explicit(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::explicit(1.0, f64::NAN, 1.0, 1.0).is_err());
        let f = PhysicalConstants::fundamental();
        assert_eq!((f.hbar(), f.c(), f.l()), (1.0, 1.0, 1.0));
        assert_eq!(f.mode(), UnitMode::Fundamental);
    }

    #[test]
    fn ground_state_values() {
        let f = PhysicalConstants::fundamental();
        let s = continuum_eigenstate_q(0, &f).unwrap();
        assert_abs_diff_eq!(s.eval_q(0.0), 0.751_125_544_464_942_5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eval_q(0.0), PI.powf(-0.25), epsilon = 1e-15);
        assert_eq!(s.energy(), 0.5);
        let y = continuum_eigenstate_y(0, &f).unwrap();
        for yv in [0.1f64, 1.0, 3.5] {
            assert_abs_diff_eq!(y.eval_y(yv).unwrap(), PI.powf(-0.25) * (-yv).exp(), epsilon = 1e-15);
        }
        assert!(y.eval_y(0.0).is_err());
        assert!(y.eval_y(-1.0).is_err());
        assert!(continuum_eigenstate_q(201, &f).is_err());
    }

    #[test]
    fn y_representation_matches_q_representation() {
        let f = PhysicalConstants::fundamental();
        for n in 0..8 {
            let q = continuum_eigenstate_q(n, &f).unwrap();
            let y = continuum_eigenstate_y(n, &f).unwrap();
            for yv in [0.05, 0.5, 2.0, 6.0] {
                assert_abs_diff_eq!(y.eval_y(yv).unwrap(), q.eval_q((2.0 * yv).sqrt()), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn rayleigh_energies_in_both_representations() {
        let cfg = AdaptiveConfig::default();
        let c = PhysicalConstants::explicit(1.0, 1.0, 1.7, 1.0).unwrap();
        for n in [0, 1, 4, 9] {
            let q = continuum_eigenstate_q(n, &c).unwrap().rayleigh_energy(cfg).unwrap();
            let y = continuum_eigenstate_y(n, &c).unwrap().rayleigh_energy(cfg).unwrap();
            assert_abs_diff_eq!(q, n as f64 + 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(y, n as f64 + 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn y_wave_equation_residual() {
        let f = PhysicalConstants::fundamental();
        for n in 0..=8 {
            let s = continuum_eigenstate_y(n, &f).unwrap();
            for y in linspace(0.1, 8.0, 80) {
                assert!(s.y_ode_residual(y, 1e-3).unwrap().abs() < 1e-5, "N = {n}, y = {y}");
            }
        }
        let ground = continuum_eigenstate_y(0, &f).unwrap();
        assert!(ground.y_ode_residual(0.01, 1e-2).is_err());
    }

    #[test]
    fn orthogonality_of_distinct_levels() {
        let f = PhysicalConstants::fundamental();
        let a = continuum_eigenstate_q(3, &f).unwrap();
        let b = continuum_eigenstate_q(5, &f).unwrap();
        assert!(overlap_q(&a, &b, AdaptiveConfig::default()).unwrap().abs() < 1e-8);
        let l = PhysicalConstants::explicit(1.0, 1.0, 2.5, 1.0).unwrap();
        let c = continuum_eigenstate_q(4, &l).unwrap();
        assert_abs_diff_eq!(overlap_q(&c, &c, AdaptiveConfig::default()).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn position_and_momentum_on_ground_state() {
        let c = PhysicalConstants::explicit(2.0, 3.0, 5.0, 1.0).unwrap();
        let b = basis(6);
        let delta0 = WaveFunction::delta(LatticeShape::single(b), &[0]).unwrap();
        let q = build_position_operator_1d(b, &c).apply(&delta0).unwrap();
        assert_abs_diff_eq!(q.get(&[1]).unwrap().re, 5.0 / 2f64.sqrt(), epsilon = 1e-14);
        let p = build_momentum_operator_1d(b, &c).apply(&delta0).unwrap();
        assert_abs_diff_eq!(p.get(&[1]).unwrap().im, 2.0 / (5.0 * 2f64.sqrt()), epsilon = 1e-15);
        assert_eq!(p.get(&[1]).unwrap().re, 0.0);
        assert!(build_position_operator_1d(b, &c).is_real_symmetric(0.0));
        assert!(build_momentum_operator_1d(b, &c).is_hermitian(0.0));
    }

    #[test]
    fn canonical_commutator_inside() {
        for (hbar, l) in [(1.0, 1.0), (2.0, 5.0)] {
            let c = PhysicalConstants::explicit(hbar, 3.0, l, 1.0).unwrap();
            for n_max in [4, 9, 32] {
                let b = basis(n_max);
                let pq = commutator(&build_momentum_operator_1d(b, &c), &build_position_operator_1d(b, &c)).unwrap();
                for n in 0..=n_max - 2 {
                    let out = pq.apply(&WaveFunction::delta(LatticeShape::single(b), &[n]).unwrap()).unwrap();
                    let expected = Complex64::new(0.0, -hbar);
                    let tol = 8.0 * f64::EPSILON * (n + 1) as f64 * hbar;
                    assert!((out.get(&[n]).unwrap() - expected).norm() <= tol);
                    assert!((out.norm_sqr() - hbar * hbar).abs() <= tol * hbar * 4.0);
                }
            }
        }
    }

    #[test]
    fn split_forms_match() {
        for c in [PhysicalConstants::fundamental(), PhysicalConstants::explicit(2.0, 3.0, 5.0, 1.0).unwrap()] {
            for n_max in [2, 7, 30] {
                let b = basis(n_max);
                let q = build_position_operator_1d(b, &c);
                let p = build_momentum_operator_1d(b, &c);
                let scale_q = c.l() * (n_max as f64).sqrt();
                assert!(q.max_abs_diff(&build_position_operator_split(b, &c)).unwrap() <= 8.0 * f64::EPSILON * scale_q);
                let scale_p = c.hbar() / c.l() * (n_max as f64).sqrt();
                assert!(p.max_abs_diff(&build_momentum_operator_split(b, &c)).unwrap() <= 8.0 * f64::EPSILON * scale_p);
            }
        }
    }

    #[test]
    fn hamiltonian_acts_diagonally_inside() {
        let f = PhysicalConstants::fundamental();
        let b = basis(10);
        let h = discrete_hamiltonian(b, &f);
        assert!(h.is_hermitian(1e-15));
        for n in 0..=8 {
            let out = h.apply(&WaveFunction::delta(LatticeShape::single(b), &[n]).unwrap()).unwrap();
            let expected = WaveFunction::delta(LatticeShape::single(b), &[n]).unwrap().scaled(Complex64::new(n as f64 + 0.5, 0.0));
            assert!((&out - &expected).max_abs() < 1e-13);
        }
    }

    #[test]
    fn discrete_spectrum() {
        let f = PhysicalConstants::fundamental();
        let b = basis(64);
        let states = solve_discrete_spectrum(b, &f).unwrap();
        assert_eq!(states.len(), 65);
        for s in states.iter().filter(|s| s.is_interior()) {
            assert!((s.eigenvalue() - (s.n() as f64 + 0.5)).abs() < 1e-10);
            let overlap = s.vector().get(&[s.n()]).unwrap().norm();
            assert!(overlap > 1.0 - 1e-10);
        }
        assert_eq!(states.iter().filter(|s| s.is_interior()).count(), 63);
        let v3 = states[3].vector();
        for (m, sm) in states.iter().enumerate() {
            let ip = v3.inner(sm.vector()).unwrap().re;
            let expected = if m == 3 { 1.0 } else { 0.0 };
            assert!((ip - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_units_agree_with_fundamental() {
        let b = basis(20);
        let f = solve_discrete_spectrum(b, &PhysicalConstants::fundamental()).unwrap();
        let c = PhysicalConstants::explicit(2.0, 3.0, 5.0, 0.7).unwrap();
        let e = solve_discrete_spectrum(b, &c).unwrap();
        for (a, b) in f.iter().zip(&e) {
            assert!((a.eigenvalue() - b.energy() / c.hbar_nu()).abs() < 1e-13);
            assert!((a.vector() - b.vector()).max_abs() < 1e-12);
        }
        assert_eq!(level_energy(0, &PhysicalConstants::explicit(2.0, 1.0, 1.0, 3.0).unwrap()), 3.0);
    }

    #[test]
    fn exact_eigenstate() {
        let b = basis(8);
        let s = DiscreteEigenstate::exact(b, 3, &PhysicalConstants::fundamental()).unwrap();
        assert_eq!(s.vector().norm_sqr(), 1.0);
        assert_eq!(s.vector().amplitudes().iter().filter(|z| z.norm() != 0.0).count(), 1);
        assert_eq!(s.energy(), 3.5);
        assert!(DiscreteEigenstate::exact(b, 9, &PhysicalConstants::fundamental()).is_err());
    }

    #[test]
    fn csv_exports() {
        let f = PhysicalConstants::fundamental();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &[SpectrumRow { representation: "discrete", n: 0, energy: 0.5 }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "representation,N,E_N\ndiscrete,0,0.5\n");

        let grid = linspace(-5.0, 5.0, 101);
        assert_eq!(grid[50], 0.0);
        let mut buf = Vec::new();
        write_eigenfunction_csv(&mut buf, &[continuum_eigenstate_q(2, &f).unwrap()], &grid).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 102);
        assert!(text.starts_with("N,x,psi\n2,-5,"));
    }
}
