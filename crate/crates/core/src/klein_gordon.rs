//! Klein-Gordon operators on discrete phase space.
//!
//! Two pictures are covered. In the four-axis picture every coordinate,
//! time included, is a lattice index and the equation is the null condition
//! `[Σ_j (Δ#_j)² − (Δ#_4)² − m²] φ = 0`, studied spectrally. In the (3+1)
//! picture time is continuous and `φ̈ = K_m φ` with
//! `K_m = Σ_j (Δ#_j)² − m²` is integrated by velocity Verlet.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{build_delta_sharp, lift_into, LatticeOperator, LatticeShape, TruncatedBasis, WaveFunction};

/// Default ceiling on dense working memory, in bytes.
pub const DEFAULT_MEMORY_BUDGET: u128 = 1 << 30;

/// Dense copies held at once while diagonalising the four-axis operator.
const KG_DENSE_COPIES: u128 = 3;

const POWER_ITERATION_TOL: f64 = 1e-12;
const POWER_ITERATION_MAX: usize = 50_000;

/// Bytes needed for `copies` dense `dim × dim` real matrices.
pub fn dense_bytes(dim: usize, copies: u128) -> u128 {
    let dim = dim as u128;
    dim * dim * 8 * copies
}

pub fn check_memory_budget(dim: usize, copies: u128, budget_bytes: u128) -> Result<()> {
    let required_bytes = dense_bytes(dim, copies);
    if required_bytes > budget_bytes {
        return Err(Error::MemoryBudget {
            required_bytes,
            budget_bytes,
        });
    }
    Ok(())
}

/// Flat metric of signature `(+, +, +, −)`; index 3 is time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric {
    diagonal: [f64; 4],
}

impl Metric {
    pub fn minkowski() -> Self {
        Self {
            diagonal: [1.0, 1.0, 1.0, -1.0],
        }
    }

    /// `η_{μν}`.
    pub fn lower(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            self.diagonal[mu]
        } else {
            0.0
        }
    }

    /// `η^{μν}`; numerically equal to the lower form for this metric.
    pub fn upper(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            1.0 / self.diagonal[mu]
        } else {
            0.0
        }
    }

    pub fn diagonal(&self) -> [f64; 4] {
        self.diagonal
    }
}

impl Default for Metric {
    fn default() -> Self {
        Self::minkowski()
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(Error::Domain(format!("mass must be finite and non-negative, got {mass}")));
    }
    Ok(())
}

/// `Σ_axes s_axis (Δ#_axis)²` on `shape`.
fn signed_sharp_squares(shape: &LatticeShape, signs: &[f64]) -> Result<LatticeOperator> {
    let mut total = LatticeOperator::zero(shape.clone());
    for (axis, &sign) in signs.iter().enumerate() {
        let sharp = lift_into(&build_delta_sharp(shape.axis(axis)?), axis, shape)?;
        let square = sharp.compose(&sharp)?.scale_real(sign);
        total = total.try_add(&square)?;
    }
    Ok(total)
}

/// `η^{μν} Δ#_μ Δ#_ν − m²` on a four-axis lattice.
#[derive(Clone, Debug)]
pub struct KGOperator4D {
    operator: LatticeOperator,
    mass: f64,
}

impl KGOperator4D {
    pub fn operator(&self) -> &LatticeOperator {
        &self.operator
    }

    pub fn shape(&self) -> &LatticeShape {
        self.operator.shape()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        self.operator.real_dense()
    }

    pub fn apply(&self, phi: &WaveFunction) -> Result<WaveFunction> {
        self.operator.apply(phi)
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        crate::dense::symmetric_eigenvalues(&self.dense())
    }
}

pub fn assemble_kg_operator_4d(shape: &LatticeShape, mass: f64) -> Result<KGOperator4D> {
    assemble_kg_operator_4d_with_budget(shape, mass, DEFAULT_MEMORY_BUDGET)
}

pub fn assemble_kg_operator_4d_with_budget(shape: &LatticeShape, mass: f64, budget_bytes: u128) -> Result<KGOperator4D> {
    check_mass(mass)?;
    if shape.num_axes() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: shape.num_axes(),
        });
    }
    if let Some(small) = shape.axes().iter().find(|b| b.n_max() < 3) {
        return Err(Error::InvalidBasis(format!(
            "four-axis operator needs n_max >= 3 on every axis, got {}",
            small.n_max()
        )));
    }
    check_memory_budget(shape.dim(), KG_DENSE_COPIES, budget_bytes)?;
    let metric = Metric::minkowski();
    let signs: Vec<f64> = (0..4).map(|mu| metric.upper(mu, mu)).collect();
    let mass_term = LatticeOperator::identity(shape.clone()).scale_real(mass * mass);
    let operator = signed_sharp_squares(shape, &signs)?.try_sub(&mass_term)?;
    Ok(KGOperator4D { operator, mass })
}

#[derive(Clone, Debug)]
pub struct NullResidual {
    pub min_singular_value: f64,
    pub vector: WaveFunction,
}

/// Smallest singular value of the four-axis operator and its right singular
/// vector. The operator is symmetric, so this is the eigenvalue of least
/// magnitude.
pub fn kg_null_residual(op: &KGOperator4D) -> Result<NullResidual> {
    let (eigenvalues, eigenvectors) = crate::dense::symmetric_eigen(&op.dense())?;
    let (col, value) = eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, v)| (i, v.abs()))
        .ok_or_else(|| Error::Domain("empty operator".into()))?;
    let values: Vec<f64> = eigenvectors.column(col).iter().copied().collect();
    Ok(NullResidual {
        min_singular_value: value,
        vector: WaveFunction::from_real(op.shape().clone(), &values)?,
    })
}

/// `K_m = Σ_j (Δ#_j)² − m²` on a three-axis lattice.
pub fn assemble_spatial_kg_generator(shape: &LatticeShape, mass: f64) -> Result<LatticeOperator> {
    check_mass(mass)?;
    if shape.num_axes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: shape.num_axes(),
        });
    }
    let mass_term = LatticeOperator::identity(shape.clone()).scale_real(mass * mass);
    signed_sharp_squares(shape, &[1.0, 1.0, 1.0])?.try_sub(&mass_term)
}

/// Field and its time derivative at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct KGState {
    phi: WaveFunction,
    phi_dot: WaveFunction,
    t: f64,
    mass: f64,
}

impl KGState {
    pub fn new(phi: WaveFunction, phi_dot: WaveFunction, t: f64, mass: f64) -> Result<Self> {
        check_mass(mass)?;
        if phi.shape() != phi_dot.shape() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: phi_dot.len(),
            });
        }
        if phi.shape().num_axes() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: phi.shape().num_axes(),
            });
        }
        if !t.is_finite() {
            return Err(Error::Domain(format!("non-finite time {t}")));
        }
        Ok(Self { phi, phi_dot, t, mass })
    }

    pub fn at_rest(phi: WaveFunction, mass: f64) -> Result<Self> {
        let phi_dot = WaveFunction::zeros(phi.shape().clone());
        Self::new(phi, phi_dot, 0.0, mass)
    }

    pub fn phi(&self) -> &WaveFunction {
        &self.phi
    }

    pub fn phi_dot(&self) -> &WaveFunction {
        &self.phi_dot
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn shape(&self) -> &LatticeShape {
        self.phi.shape()
    }

    /// `‖φ̇‖² + ⟨φ, (m² − K) φ⟩` where `generator` is `K_m`.
    pub fn energy(&self, generator: &LatticeOperator) -> Result<f64> {
        let k_phi = generator.apply(&self.phi)?;
        Ok(self.phi_dot.norm_sqr() - self.phi.inner(&k_phi)?.re)
    }

    /// Energy conserved exactly by velocity Verlet at step `dt`:
    /// `‖φ̇‖² + ⟨φ, A (I − dt² A / 4) φ⟩` with `A = −K_m`.
    pub fn modified_energy(&self, generator: &LatticeOperator, dt: f64) -> Result<f64> {
        let a_phi = generator.apply(&self.phi)?.scaled(Complex64::new(-1.0, 0.0));
        let quadratic = self.phi.inner(&a_phi)?.re;
        Ok(self.phi_dot.norm_sqr() + quadratic - 0.25 * dt * dt * a_phi.norm_sqr())
    }
}

/// Built-in initial profiles, all starting at rest at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// Normal mode of `K_m` with the given per-axis mode numbers, counted
    /// upward from the smallest one-axis frequency.
    Eigenmode { modes: [usize; 3] },
    /// Gaussian in the lattice index.
    Gaussian { centre: [f64; 3], width: f64 },
    /// Independent uniform amplitudes in `[-1, 1]`.
    Random { seed: u64 },
}

impl InitialCondition {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Eigenmode { .. } => "eigenmode",
            Self::Gaussian { .. } => "gaussian",
            Self::Random { .. } => "random",
        }
    }

    pub fn build(&self, shape: &LatticeShape, mass: f64) -> Result<KGState> {
        let phi = match self {
            Self::Zero => WaveFunction::zeros(shape.clone()),
            Self::Eigenmode { modes } => product_eigenmode(shape, mass, *modes)?.vector,
            Self::Gaussian { centre, width } => {
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::Domain(format!("Gaussian width must be positive, got {width}")));
                }
                WaveFunction::from_fn(shape.clone(), |n| {
                    let r2: f64 = n.iter().zip(centre).map(|(&n, c)| (n as f64 - c).powi(2)).sum();
                    Complex64::new((-0.5 * r2 / (width * width)).exp(), 0.0)
                })
            }
            Self::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                WaveFunction::from_fn(shape.clone(), |_| Complex64::new(rng.random_range(-1.0..=1.0), 0.0))
            }
        };
        KGState::at_rest(phi, mass)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of `−(Δ#)²` on one axis.
pub fn sharp_square_modes(basis: TruncatedBasis) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let sharp = build_delta_sharp(basis);
    let neg_square = sharp.compose(&sharp)?.scale_real(-1.0).real_dense();
    let eigen = SymmetricEigen::try_new(neg_square, f64::EPSILON, 0).ok_or_else(|| Error::Diagonalization {
        message: format!("one-axis (Δ#)², n_max = {}", basis.n_max()),
        matrix_dump: String::new(),
    })?;
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let values = order.iter().map(|&i| eigen.eigenvalues[i].max(0.0)).collect();
    let vectors = DMatrix::from_fn(basis.len(), basis.len(), |r, c| eigen.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Normal mode of `K_m` built as a tensor product of one-axis modes.
#[derive(Clone, Debug)]
pub struct NormalMode {
    pub omega: f64,
    pub axis_eigenvalues: [f64; 3],
    pub vector: WaveFunction,
}

pub fn product_eigenmode(shape: &LatticeShape, mass: f64, modes: [usize; 3]) -> Result<NormalMode> {
    check_mass(mass)?;
    if shape.num_axes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: shape.num_axes(),
        });
    }
    let mut axis_eigenvalues = [0.0; 3];
    let mut factors = Vec::with_capacity(3);
    for axis in 0..3 {
        let basis = shape.axis(axis)?;
        if modes[axis] >= basis.len() {
            return Err(Error::Domain(format!(
                "mode {} out of range on axis {axis} with {} levels",
                modes[axis],
                basis.len()
            )));
        }
        let (values, vectors) = sharp_square_modes(basis)?;
        axis_eigenvalues[axis] = values[modes[axis]];
        factors.push(vectors.column(modes[axis]).clone_owned());
    }
    let vector = WaveFunction::from_fn(shape.clone(), |n| {
        Complex64::new(factors[0][n[0]] * factors[1][n[1]] * factors[2][n[2]], 0.0)
    });
    let omega = (mass * mass + axis_eigenvalues.iter().sum::<f64>()).sqrt();
    Ok(NormalMode {
        omega,
        axis_eigenvalues,
        vector,
    })
}

/// The exact solution `cos(ωt) v` of a normal mode, sampled at
/// `t0 + k dt` for `k = 0..count`.
pub fn eigenmode_history(shape: &LatticeShape, mass: f64, modes: [usize; 3], t0: f64, dt: f64, count: usize) -> Result<StateHistory> {
    let mode = product_eigenmode(shape, mass, modes)?;
    let w = mode.omega;
    StateHistory::sample(t0, dt, count, mass, |t| {
        (
            mode.vector.scaled(Complex64::new((w * t).cos(), 0.0)),
            mode.vector.scaled(Complex64::new(-w * (w * t).sin(), 0.0)),
        )
    })
}

/// Largest eigenvalue of the positive semidefinite `A = −K_m` by power
/// iteration.
pub fn spectral_radius(generator: &LatticeOperator) -> f64 {
    let dim = generator.dim();
    let mut x = DVector::from_fn(dim, |i, _| Complex64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0));
    x /= Complex64::new(x.norm(), 0.0);
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX {
        let y = -generator.mul_vector(&x);
        let next = x.dotc(&y).re;
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        x = y / Complex64::new(norm, 0.0);
        if (next - estimate).abs() <= POWER_ITERATION_TOL * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Velocity-Verlet integrator for `φ̈ = K_m φ`.
#[derive(Clone, Debug)]
pub struct Leapfrog {
    generator: LatticeOperator,
    mass: f64,
    rho: f64,
}

impl Leapfrog {
    pub fn new(shape: &LatticeShape, mass: f64) -> Result<Self> {
        let generator = assemble_spatial_kg_generator(shape, mass)?;
        let rho = spectral_radius(&generator);
        Ok(Self { generator, mass, rho })
    }

    pub fn generator(&self) -> &LatticeOperator {
        &self.generator
    }

    pub fn spectral_radius(&self) -> f64 {
        self.rho
    }

    /// Steps with `|dt|` at or above this bound are rejected.
    pub fn stability_limit(&self) -> f64 {
        2.0 / self.rho.sqrt()
    }

    pub fn check_step(&self, dt: f64) -> Result<()> {
        if !dt.is_finite() || dt == 0.0 {
            return Err(Error::Domain(format!("time step must be finite and non-zero, got {dt}")));
        }
        let limit = self.stability_limit();
        if dt.abs() >= limit {
            return Err(Error::Unstable {
                dt,
                limit,
                suggested: 0.9 * limit,
            });
        }
        Ok(())
    }

    fn check_state(&self, state: &KGState) -> Result<()> {
        if state.shape() != self.generator.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.generator.dim(),
                found: state.phi.len(),
            });
        }
        if state.mass != self.mass {
            return Err(Error::Domain(format!(
                "state mass {} differs from integrator mass {}",
                state.mass, self.mass
            )));
        }
        Ok(())
    }

    fn step_amplitudes(&self, phi: &mut DVector<Complex64>, v: &mut DVector<Complex64>, dt: f64) {
        let half = Complex64::new(0.5 * dt, 0.0);
        *v += self.generator.mul_vector(phi) * half;
        phi.axpy(Complex64::new(dt, 0.0), v, Complex64::new(1.0, 0.0));
        *v += self.generator.mul_vector(phi) * half;
    }

    /// Advances `steps` steps of size `dt`; a negative `dt` runs backwards.
    pub fn evolve(&self, state: &KGState, dt: f64, steps: usize) -> Result<KGState> {
        Ok(self.evolve_with_history(state, dt, steps, usize::MAX)?.last().clone())
    }

    /// As [`Leapfrog::evolve`], recording the initial state and every
    /// `stride`-th state after it (plus the final one).
    pub fn evolve_with_history(&self, state: &KGState, dt: f64, steps: usize, stride: usize) -> Result<StateHistory> {
        self.check_state(state)?;
        self.check_step(dt)?;
        let stride = stride.max(1);
        let shape = state.shape().clone();
        let mut phi = state.phi.amplitudes().clone();
        let mut v = state.phi_dot.amplitudes().clone();
        let mut states = vec![state.clone()];
        for k in 1..=steps {
            self.step_amplitudes(&mut phi, &mut v, dt);
            if k % stride == 0 || k == steps {
                states.push(KGState {
                    phi: WaveFunction::from_amplitudes(shape.clone(), phi.clone())?,
                    phi_dot: WaveFunction::from_amplitudes(shape.clone(), v.clone())?,
                    t: state.t + k as f64 * dt,
                    mass: self.mass,
                });
            }
        }
        Ok(StateHistory { states })
    }
}

/// One-shot velocity-Verlet evolution of `state` by `steps` steps of `dt`.
pub fn evolve_leapfrog(state: &KGState, dt: f64, steps: usize) -> Result<KGState> {
    Leapfrog::new(state.shape(), state.mass)?.evolve(state, dt, steps)
}

/// Time-ordered snapshots of one solution.
#[derive(Clone, Debug, PartialEq)]
pub struct StateHistory {
    states: Vec<KGState>,
}

impl StateHistory {
    pub fn new(states: Vec<KGState>) -> Result<Self> {
        let first = states.first().ok_or(Error::InsufficientHistory { needed: 1, found: 0 })?;
        if let Some(bad) = states
            .iter()
            .find(|s| s.shape() != first.shape() || s.mass != first.mass)
        {
            return Err(Error::DimensionMismatch {
                expected: first.phi.len(),
                found: bad.phi.len(),
            });
        }
        Ok(Self { states })
    }

    /// Samples `f(t)` (returning field and its time derivative) at
    /// `t_0 + k dt` for `k = 0..count`.
    pub fn sample(
        t0: f64,
        dt: f64,
        count: usize,
        mass: f64,
        mut f: impl FnMut(f64) -> (WaveFunction, WaveFunction),
    ) -> Result<Self> {
        let states = (0..count)
            .map(|k| {
                let t = t0 + k as f64 * dt;
                let (phi, phi_dot) = f(t);
                KGState::new(phi, phi_dot, t, mass)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn states(&self) -> &[KGState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> &KGState {
        &self.states[0]
    }

    pub fn last(&self) -> &KGState {
        &self.states[self.states.len() - 1]
    }

    pub fn mass(&self) -> f64 {
        self.states[0].mass
    }

    pub fn shape(&self) -> &LatticeShape {
        self.states[0].shape()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Common spacing of the snapshot times.
    pub fn uniform_step(&self) -> Result<f64> {
        if self.states.len() < 2 {
            return Err(Error::InsufficientHistory {
                needed: 2,
                found: self.states.len(),
            });
        }
        let dt = self.states[1].t - self.states[0].t;
        let tol = 1e-9 * dt.abs().max(f64::MIN_POSITIVE);
        for (index, pair) in self.states.windows(2).enumerate() {
            let step = pair[1].t - pair[0].t;
            if step == 0.0 || (step - dt).abs() > tol {
                return Err(Error::NonUniformStep { index: index + 1 });
            }
        }
        Ok(dt)
    }

    /// Replaces every field with `f(index, state)`; time derivatives are
    /// kept only when `f` leaves the shape unchanged.
    pub fn map_fields(&self, mut f: impl FnMut(usize, &KGState) -> Result<WaveFunction>) -> Result<Self> {
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let phi = f(k, s)?;
                KGState::new(phi, s.phi_dot.clone(), s.t, s.mass)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }
}

/// `K_m φ_k − (φ_{k+1} − 2φ_k + φ_{k−1}) / dt²` for every interior slice.
pub fn kg_residual_slices(history: &StateHistory) -> Result<Vec<WaveFunction>> {
    if history.len() < 3 {
        return Err(Error::InsufficientHistory {
            needed: 3,
            found: history.len(),
        });
    }
    let dt = history.uniform_step()?;
    let generator = assemble_spatial_kg_generator(history.shape(), history.mass())?;
    let inv_dt2 = 1.0 / (dt * dt);
    history
        .states
        .windows(3)
        .map(|w| {
            let (prev, cur, next) = (w[0].phi.amplitudes(), w[1].phi.amplitudes(), w[2].phi.amplitudes());
            let second = (next - cur * Complex64::new(2.0, 0.0) + prev) * Complex64::new(inv_dt2, 0.0);
            let residual = generator.mul_vector(cur) - second;
            WaveFunction::from_amplitudes(history.shape().clone(), residual)
        })
        .collect()
}

/// Max-norm of the (3+1) Klein-Gordon residual over all interior slices.
pub fn kg_residual_3plus1(history: &StateHistory) -> Result<f64> {
    Ok(kg_residual_slices(history)?
        .iter()
        .map(WaveFunction::max_abs)
        .fold(0.0, f64::max))
}

/// Relative drift `max_t |E(t) − E(0)| / |E(0)|` of the plain and the
/// modified energy along a history recorded at step `dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyDrift {
    pub initial: f64,
    pub plain: f64,
    pub modified: f64,
}

pub fn energy_drift(history: &StateHistory, generator: &LatticeOperator, dt: f64) -> Result<EnergyDrift> {
    let e0 = history.first().energy(generator)?;
    let m0 = history.first().modified_energy(generator, dt)?;
    let mut drift = EnergyDrift {
        initial: e0,
        plain: 0.0,
        modified: 0.0,
    };
    if e0 == 0.0 {
        return Ok(drift);
    }
    for state in history.states() {
        drift.plain = drift.plain.max((state.energy(generator)? - e0).abs() / e0.abs());
        drift.modified = drift
            .modified
            .max((state.modified_energy(generator, dt)? - m0).abs() / m0.abs());
    }
    Ok(drift)
}

/// Writes `t,n1,n2,n3,re,im` rows for every `stride`-th snapshot.
pub fn write_trajectory_csv<W: Write>(out: W, history: &StateHistory, stride: usize) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["t", "n1", "n2", "n3", "re", "im"])
        .map_err(crate::oscillator::csv_error)?;
    let shape = history.shape();
    for state in history.states().iter().step_by(stride.max(1)) {
        for (flat, value) in state.phi.amplitudes().iter().enumerate() {
            let n = shape.multi_index(flat);
            writer
                .write_record([
                    format!("{:.12e}", state.t),
                    n[0].to_string(),
                    n[1].to_string(),
                    n[2].to_string(),
                    format!("{:.17e}", value.re),
                    format!("{:.17e}", value.im),
                ])
                .map_err(crate::oscillator::csv_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Writes `t,energy,modified_energy` rows.
pub fn write_energy_csv<W: Write>(out: W, history: &StateHistory, generator: &LatticeOperator, dt: f64) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["t", "energy", "modified_energy"])
        .map_err(crate::oscillator::csv_error)?;
    for state in history.states() {
        writer
            .write_record([
                format!("{:.12e}", state.t),
                format!("{:.17e}", state.energy(generator)?),
                format!("{:.17e}", state.modified_energy(generator, dt)?),
            ])
            .map_err(crate::oscillator::csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parameters needed to rerun an evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub n_max: usize,
    pub mass: f64,
    pub dt: f64,
    pub steps: usize,
    pub initial_condition: InitialCondition,
}

impl RunManifest {
    pub fn seed(&self) -> u64 {
        match self.initial_condition {
            InitialCondition::Random { seed } => seed,
            _ => 0,
        }
    }

    /// `key = value` lines.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n_max = {}", self.n_max)?;
        writeln!(out, "mass = {}", self.mass)?;
        writeln!(out, "dt = {}", self.dt)?;
        writeln!(out, "steps = {}", self.steps)?;
        writeln!(out, "initial_condition = \"{}\"", self.initial_condition.name())?;
        writeln!(out, "seed = {}", self.seed())?;
        Ok(())
    }
}
