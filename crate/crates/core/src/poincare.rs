//! Poincaré generators on the four-axis lattice, their Casimir, finite
//! transforms, and invariance checks for both Klein-Gordon pictures.
//!
//! Axis 3 is time. With `P_μ = −iΔ#_μ` and `Q^μ = η^{μν}Δ°_ν`,
//! `J_{αβ} = ½(Q_αP_β − Q_βP_α + P_βQ_α − P_αQ_β)` is built from the
//! metric-weighted `Q`, and `iJ_{αβ}` is a real antisymmetric matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::klein_gordon::{
    check_memory_budget, kg_residual_slices, KGOperator4D, Metric, StateHistory, DEFAULT_MEMORY_BUDGET,
};
use crate::lattice::{
    build_delta_circ, build_delta_sharp, commutator, lift_into, LatticeOperator, LatticeShape, WaveFunction,
};
use crate::report::InvarianceReport;

/// Margin for checks involving products of up to four primitive operators.
pub const CASIMIR_MARGIN: usize = 4;
pub const CASIMIR_TOLERANCE: f64 = 1e-12;
pub const TRANSLATION_TOLERANCE: f64 = 1e-10;
pub const NULL_TRANSPORT_TOLERANCE: f64 = 1e-8;
pub const MIN_BOOST_SLOPE: f64 = 1.9;

/// Dense copies alive while exponentiating a generator combination.
const TRANSFORM_DENSE_COPIES: u128 = 12;

/// Index pairs `(α, β)`, `α < β`, in the order generators are listed.
pub const ROTATION_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Which position operator enters the rotation generators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PositionConvention {
    /// `Q^μ = η^{μν}Δ°_ν`.
    #[default]
    MetricWeighted,
    /// `Δ°_μ` on every axis, metric ignored.
    Unweighted,
}

/// Translation vector `c^μ` and antisymmetric `ω^{αβ}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PoincareParams {
    c: [f64; 4],
    omega: [[f64; 4]; 4],
}

impl PoincareParams {
    pub fn new(c: [f64; 4], omega: [[f64; 4]; 4]) -> Result<Self> {
        if c.iter().chain(omega.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("Poincaré parameters must be finite".into()));
        }
        for a in 0..4 {
            for b in 0..4 {
                if omega[a][b] != -omega[b][a] {
                    return Err(Error::Domain(format!(
                        "omega is not antisymmetric at ({a}, {b}): {} vs {}",
                        omega[a][b], omega[b][a]
                    )));
                }
            }
        }
        Ok(Self { c, omega })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn translation(c: [f64; 4]) -> Result<Self> {
        Self::new(c, [[0.0; 4]; 4])
    }

    /// Sets `ω^{αβ} = value` and `ω^{βα} = −value`.
    pub fn with_omega(mut self, alpha: usize, beta: usize, value: f64) -> Result<Self> {
        if alpha >= 4 || beta >= 4 {
            return Err(Error::AxisOutOfRange {
                axis: alpha.max(beta),
                axes_total: 4,
            });
        }
        if alpha == beta && value != 0.0 {
            return Err(Error::Domain("diagonal omega entries must vanish".into()));
        }
        self.omega[alpha][beta] = value;
        self.omega[beta][alpha] = -value;
        Self::new(self.c, self.omega)
    }

    pub fn c(&self) -> [f64; 4] {
        self.c
    }

    pub fn omega(&self) -> [[f64; 4]; 4] {
        self.omega
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().chain(self.omega.iter().flatten()).all(|&v| v == 0.0)
    }

    pub fn is_translation(&self) -> bool {
        self.omega.iter().flatten().all(|&v| v == 0.0)
    }

    pub fn negated(&self) -> Self {
        let mut out = *self;
        out.c.iter_mut().chain(out.omega.iter_mut().flatten()).for_each(|v| *v = -*v);
        out
    }
}

/// `½(Q_aΔ#_b − Q_bΔ#_a + Δ#_bQ_a − Δ#_aQ_b)`, which equals `iJ_{ab}`.
fn rotation_kernel(q: &[LatticeOperator], sharp: &[LatticeOperator], a: usize, b: usize) -> Result<LatticeOperator> {
    let sum = q[a]
        .compose(&sharp[b])?
        .try_sub(&q[b].compose(&sharp[a])?)?
        .try_add(&sharp[b].compose(&q[a])?)?
        .try_sub(&sharp[a].compose(&q[b])?)?;
    Ok(sum.scale_real(0.5))
}

fn lifted_primitives(shape: &LatticeShape) -> Result<(Vec<LatticeOperator>, Vec<LatticeOperator>)> {
    let mut sharp = Vec::with_capacity(shape.num_axes());
    let mut circ = Vec::with_capacity(shape.num_axes());
    for axis in 0..shape.num_axes() {
        let basis = shape.axis(axis)?;
        sharp.push(lift_into(&build_delta_sharp(basis), axis, shape)?);
        circ.push(lift_into(&build_delta_circ(basis), axis, shape)?);
    }
    Ok((sharp, circ))
}

/// The ten generators and the Casimir `Σ_j P_j² − P_4²`.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    shape: LatticeShape,
    convention: PositionConvention,
    budget_bytes: u128,
    sharp: Vec<LatticeOperator>,
    circ: Vec<LatticeOperator>,
    p: Vec<LatticeOperator>,
    q: Vec<LatticeOperator>,
    kernels: Vec<LatticeOperator>,
    j: Vec<LatticeOperator>,
    casimir: LatticeOperator,
}

pub fn build_generators(shape: &LatticeShape) -> Result<GeneratorSet> {
    build_generators_with(shape, PositionConvention::MetricWeighted, DEFAULT_MEMORY_BUDGET)
}

/// Generator set for the given convention. The budget covers the dense
/// workspace of later finite transforms and is checked up front.
pub fn build_generators_with(
    shape: &LatticeShape,
    convention: PositionConvention,
    budget_bytes: u128,
) -> Result<GeneratorSet> {
    if shape.num_axes() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: shape.num_axes(),
        });
    }
    check_memory_budget(shape.dim(), TRANSFORM_DENSE_COPIES, budget_bytes)?;
    let metric = Metric::minkowski();
    let (sharp, circ) = lifted_primitives(shape)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let p: Vec<_> = sharp.iter().map(|s| s.scale(minus_i)).collect();
    let q: Vec<_> = circ
        .iter()
        .enumerate()
        .map(|(mu, c)| match convention {
            PositionConvention::MetricWeighted => c.scale_real(metric.upper(mu, mu)),
            PositionConvention::Unweighted => c.clone(),
        })
        .collect();
    let kernels = ROTATION_PAIRS
        .iter()
        .map(|&(a, b)| rotation_kernel(&q, &sharp, a, b))
        .collect::<Result<Vec<_>>>()?;
    let j = kernels.iter().map(|k| k.scale(minus_i)).collect();
    let mut casimir = LatticeOperator::zero(shape.clone());
    for (mu, p_mu) in p.iter().enumerate() {
        casimir = casimir.try_add(&p_mu.compose(p_mu)?.scale_real(metric.upper(mu, mu)))?;
    }
    Ok(GeneratorSet {
        shape: shape.clone(),
        convention,
        budget_bytes,
        sharp,
        circ,
        p,
        q,
        kernels,
        j,
        casimir,
    })
}

fn pair_position(alpha: usize, beta: usize) -> Option<(usize, f64)> {
    let (lo, hi, sign) = if alpha < beta { (alpha, beta, 1.0) } else { (beta, alpha, -1.0) };
    ROTATION_PAIRS.iter().position(|&p| p == (lo, hi)).map(|i| (i, sign))
}

impl GeneratorSet {
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn convention(&self) -> PositionConvention {
        self.convention
    }

    pub fn budget_bytes(&self) -> u128 {
        self.budget_bytes
    }

    /// `P_μ`.
    pub fn p(&self, mu: usize) -> &LatticeOperator {
        &self.p[mu]
    }

    /// `Q^μ`.
    pub fn q(&self, mu: usize) -> &LatticeOperator {
        &self.q[mu]
    }

    /// Lifted `Δ#_μ`.
    pub fn sharp(&self, mu: usize) -> &LatticeOperator {
        &self.sharp[mu]
    }

    /// Lifted `Δ°_μ`.
    pub fn circ(&self, mu: usize) -> &LatticeOperator {
        &self.circ[mu]
    }

    /// `J_{αβ}`, zero on the diagonal and antisymmetric in its indices.
    pub fn j(&self, alpha: usize, beta: usize) -> Result<LatticeOperator> {
        if alpha >= 4 || beta >= 4 {
            return Err(Error::AxisOutOfRange {
                axis: alpha.max(beta),
                axes_total: 4,
            });
        }
        Ok(match pair_position(alpha, beta) {
            None => LatticeOperator::zero(self.shape.clone()),
            Some((i, sign)) => self.j[i].scale_real(sign),
        })
    }

    pub fn casimir(&self) -> &LatticeOperator {
        &self.casimir
    }

    /// Labelled list `P1..P4, J12, J13, J14, J23, J24, J34` (axes counted
    /// from one, time last).
    pub fn generators(&self) -> Vec<(String, &LatticeOperator)> {
        let mut out: Vec<(String, &LatticeOperator)> =
            self.p.iter().enumerate().map(|(mu, p)| (format!("P{}", mu + 1), p)).collect();
        for (&(a, b), j) in ROTATION_PAIRS.iter().zip(&self.j) {
            out.push((format!("J{}{}", a + 1, b + 1), j));
        }
        out
    }

    /// Real exponent `−c^μΔ#_μ + (i/2) ω^{αβ} J_{αβ}`.
    pub fn exponent(&self, params: &PoincareParams) -> Result<LatticeOperator> {
        let mut total = LatticeOperator::zero(self.shape.clone());
        for (mu, &c) in params.c.iter().enumerate() {
            if c != 0.0 {
                total = total.try_sub(&self.sharp[mu].scale_real(c))?;
            }
        }
        for (&(a, b), kernel) in ROTATION_PAIRS.iter().zip(&self.kernels) {
            let w = params.omega[a][b];
            if w != 0.0 {
                total = total.try_add(&kernel.scale_real(w))?;
            }
        }
        Ok(total)
    }
}

/// `[casimir, G]` for all ten generators, asserted on the interior block
/// at margin 4; full norms are informational.
pub fn check_casimir_commutation(gens: &GeneratorSet) -> Result<Vec<InvarianceReport>> {
    let n_max = gens.shape.axis(0)?.n_max();
    gens.generators()
        .into_iter()
        .map(|(name, g)| {
            let comm = commutator(&gens.casimir, g)?;
            Ok(InvarianceReport::below(
                format!("casimir_commutes_{name}"),
                n_max,
                CASIMIR_MARGIN,
                comm.interior_max_abs(CASIMIR_MARGIN),
                comm.max_abs(),
                CASIMIR_TOLERANCE,
            ))
        })
        .collect()
}

/// Dense orthogonal (for real antisymmetric exponents) transform `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteTransform {
    shape: LatticeShape,
    matrix: DMatrix<f64>,
}

impl FiniteTransform {
    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, phi: &WaveFunction) -> Result<WaveFunction> {
        if phi.shape() != &self.shape {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                found: phi.len(),
            });
        }
        let re = DVector::from_iterator(phi.len(), phi.amplitudes().iter().map(|z| z.re));
        let im = DVector::from_iterator(phi.len(), phi.amplitudes().iter().map(|z| z.im));
        let (ure, uim) = (&self.matrix * re, &self.matrix * im);
        let out = DVector::from_fn(phi.len(), |i, _| Complex64::new(ure[i], uim[i]));
        WaveFunction::from_amplitudes(self.shape.clone(), out)
    }

    /// `‖UᵀU − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let gram = self.matrix.transpose() * &self.matrix - DMatrix::identity(n, n);
        gram.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖U − I‖_max`.
    pub fn identity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        (&self.matrix - DMatrix::identity(n, n))
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Upper bound `sqrt(‖U‖₁ ‖U‖_∞)` on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let one = crate::expm::one_norm(&self.matrix);
        let inf = crate::expm::one_norm(&self.matrix.transpose());
        (one * inf).sqrt()
    }

    pub fn compose(&self, other: &FiniteTransform) -> Result<FiniteTransform> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                found: other.shape.dim(),
            });
        }
        Ok(FiniteTransform {
            shape: self.shape.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn to_operator(&self) -> Result<LatticeOperator> {
        LatticeOperator::from_real_dense(self.shape.clone(), &self.matrix)
    }
}

/// `U = exp{−c^μΔ#_μ + (i/2) ω^{αβ} J_{αβ}}`.
pub fn build_finite_transform(gens: &GeneratorSet, params: &PoincareParams) -> Result<FiniteTransform> {
    let dim = gens.shape.dim();
    check_memory_budget(dim, TRANSFORM_DENSE_COPIES, gens.budget_bytes)?;
    if params.is_zero() {
        return Ok(FiniteTransform {
            shape: gens.shape.clone(),
            matrix: DMatrix::identity(dim, dim),
        });
    }
    let exponent = gens.exponent(params)?;
    if exponent.max_imag() != 0.0 {
        return Err(Error::Exponential("exponent has an imaginary part".into()));
    }
    Ok(FiniteTransform {
        shape: gens.shape.clone(),
        matrix: expm(&exponent.real_dense())?,
    })
}

fn interior_norms(v: &WaveFunction, margin: usize) -> (f64, f64) {
    (v.interior_max_abs(margin), v.max_abs())
}

/// Max-norm of `KG(Uφ) − U(KGφ)` on the interior block and in full.
pub fn kg_invariance_defect(
    op: &KGOperator4D,
    transform: &FiniteTransform,
    phi: &WaveFunction,
    margin: usize,
) -> Result<(f64, f64)> {
    let left = op.apply(&transform.apply(phi)?)?;
    let right = transform.apply(&op.apply(phi)?)?;
    Ok(interior_norms(&(&left - &right), margin))
}

/// Builds `U` from `params` and reports the commutation defect of the
/// four-axis operator on `test_vector`.
pub fn check_kg_invariance_4d(
    op: &KGOperator4D,
    gens: &GeneratorSet,
    params: &PoincareParams,
    test_vector: &WaveFunction,
) -> Result<InvarianceReport> {
    let transform = build_finite_transform(gens, params)?;
    invariance_report(op, &transform, params, test_vector)
}

/// As [`check_kg_invariance_4d`] with a prebuilt transform.
pub fn invariance_report(
    op: &KGOperator4D,
    transform: &FiniteTransform,
    params: &PoincareParams,
    test_vector: &WaveFunction,
) -> Result<InvarianceReport> {
    let n_max = op.shape().axis(0)?.n_max();
    let (interior, full) = kg_invariance_defect(op, transform, test_vector, CASIMIR_MARGIN)?;
    let name = if params.is_translation() {
        "kg_invariance_translation"
    } else {
        "kg_invariance_general"
    };
    Ok(InvarianceReport::below(name, n_max, CASIMIR_MARGIN, interior, full, TRANSLATION_TOLERANCE))
}

/// Transport of an approximate null vector: the interior residual of
/// `KG(Uφ)` in excess of `‖U‖ σ_min`, where `σ_min = ‖KGφ‖`.
pub fn check_null_transport(
    op: &KGOperator4D,
    transform: &FiniteTransform,
    null_vector: &WaveFunction,
) -> Result<InvarianceReport> {
    let n_max = op.shape().axis(0)?.n_max();
    let base = op.apply(null_vector)?.norm() / null_vector.norm();
    let moved = op.apply(&transform.apply(null_vector)?)?;
    let interior: f64 = moved
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(flat, _)| op.shape().within_margin(*flat, CASIMIR_MARGIN))
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        / null_vector.norm();
    let bound = transform.norm_bound() * base;
    Ok(InvarianceReport::below(
        "kg_null_transport",
        n_max,
        CASIMIR_MARGIN,
        (interior - bound).max(0.0),
        moved.norm() / null_vector.norm(),
        NULL_TRANSPORT_TOLERANCE,
    ))
}

/// Settings for the first-order boost check in the (3+1) picture.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostCheckConfig {
    pub epsilons: Vec<f64>,
    /// Spatial indices within this margin of the edge are excluded.
    pub spatial_margin: usize,
    /// Fraction of the residual time span, centred on its midpoint, that
    /// enters the norm.
    pub time_window: f64,
    pub convention: PositionConvention,
}

impl Default for BoostCheckConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-2, 5e-3, 2.5e-3],
            spatial_margin: 3,
            time_window: 1.0,
            convention: PositionConvention::MetricWeighted,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoostReport {
    pub epsilons: Vec<f64>,
    /// `‖r(φ + εGφ)‖ − ‖r(φ)‖` for each ε.
    pub growth: Vec<f64>,
    /// Least-squares slope of `ln |growth|` against `ln ε`; `None` when
    /// the transformed field equals the original.
    pub slope: Option<f64>,
    pub base_residual: f64,
    pub pass: bool,
}

impl BoostReport {
    /// Summary record: `norm_interior` carries the slope, which must reach
    /// `tolerance` from above.
    pub fn to_report(&self, n_max: usize, margin: usize) -> InvarianceReport {
        InvarianceReport {
            test: "boost_3plus1_slope".into(),
            n_max,
            margin,
            norm_interior: self.slope.unwrap_or(f64::INFINITY),
            norm_full: self.base_residual,
            tolerance: MIN_BOOST_SLOPE,
            pass: self.pass,
        }
    }
}

pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `Σ_j ω^{j4}(t Δ#_j φ ± Δ°_j ∂_t φ)` with `∂_t` by central differences;
/// the sign is `+` for metric-weighted position operators. Defined on
/// slices `1..len-1` of the history.
pub fn boost_generator_history(
    history: &StateHistory,
    omega_j4: [f64; 3],
    convention: PositionConvention,
) -> Result<(StateHistory, StateHistory)> {
    if history.len() < 5 {
        return Err(Error::InsufficientHistory {
            needed: 5,
            found: history.len(),
        });
    }
    let dt = history.uniform_step()?;
    let shape = history.shape().clone();
    if shape.num_axes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: shape.num_axes(),
        });
    }
    let (sharp, circ) = lifted_primitives(&shape)?;
    let time_sign = match convention {
        PositionConvention::MetricWeighted => 1.0,
        PositionConvention::Unweighted => -1.0,
    };
    let states = history.states();
    let inner = StateHistory::new(states[1..states.len() - 1].to_vec())?;
    let transformed = inner.map_fields(|k, state| {
        let (prev, next) = (&states[k], &states[k + 2]);
        let d_t = (next.phi() - prev.phi()).scaled(Complex64::new(0.5 / dt, 0.0));
        let mut out = WaveFunction::zeros(shape.clone());
        for (j, &w) in omega_j4.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let term = sharp[j]
                .apply(state.phi())?
                .combine(Complex64::new(state.t(), 0.0), &circ[j].apply(&d_t)?, Complex64::new(time_sign, 0.0))?;
            out = out.combine(Complex64::new(1.0, 0.0), &term, Complex64::new(w, 0.0))?;
        }
        Ok(out)
    })?;
    Ok((inner, transformed))
}

/// First-order boost invariance of the (3+1) residual: the residual of
/// `φ + εGφ` may exceed that of `φ` only at second order in ε.
pub fn check_boost_invariance_3plus1(
    history: &StateHistory,
    params: &PoincareParams,
    config: &BoostCheckConfig,
) -> Result<BoostReport> {
    let omega_j4 = [params.omega[0][3], params.omega[1][3], params.omega[2][3]];
    let (inner, transformed) = boost_generator_history(history, omega_j4, config.convention)?;
    let r = kg_residual_slices(&inner)?;
    let s = kg_residual_slices(&transformed)?;

    let times: Vec<f64> = inner.times()[1..inner.len() - 1].to_vec();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let (mid, half) = (0.5 * (t0 + t1), 0.5 * (t1 - t0) * config.time_window.clamp(0.0, 1.0));
    let shape = inner.shape();
    let (mut rr, mut rs, mut ss) = (0.0, 0.0, 0.0);
    for (k, t) in times.iter().enumerate() {
        if (t - mid).abs() > half * (1.0 + 1e-12) {
            continue;
        }
        for (flat, (a, b)) in r[k].amplitudes().iter().zip(s[k].amplitudes().iter()).enumerate() {
            if shape.within_margin(flat, config.spatial_margin) {
                rr += a.norm_sqr();
                rs += (a.conj() * b).re;
                ss += b.norm_sqr();
            }
        }
    }
    let base = rr.sqrt();
    let growth: Vec<f64> = config
        .epsilons
        .iter()
        .map(|&e| {
            let moved = (rr + 2.0 * e * rs + e * e * ss).max(0.0).sqrt();
            let denom = moved + base;
            if denom == 0.0 {
                0.0
            } else {
                (2.0 * e * rs + e * e * ss) / denom
            }
        })
        .collect();
    let slope = if growth.iter().all(|&g| g == 0.0) {
        None
    } else {
        Some(fit_log_slope(&config.epsilons, &growth))
    };
    let pass = slope.is_none_or(|s| s >= MIN_BOOST_SLOPE);
    Ok(BoostReport {
        epsilons: config.epsilons.clone(),
        growth,
        slope,
        base_residual: base,
        pass,
    })
}

/// `Σ_{j<k} ω^{jk} iJ_{jk}` built from three-axis operators; the real
/// generator of spatial rotations.
pub fn spatial_rotation_generator(shape: &LatticeShape, params: &PoincareParams) -> Result<LatticeOperator> {
    if shape.num_axes() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: shape.num_axes(),
        });
    }
    let (sharp, circ) = lifted_primitives(shape)?;
    let mut generator = LatticeOperator::zero(shape.clone());
    for &(a, b) in &[(0, 1), (0, 2), (1, 2)] {
        let w = params.omega[a][b];
        if w != 0.0 {
            generator = generator.try_add(&rotation_kernel(&circ, &sharp, a, b)?.scale_real(w))?;
        }
    }
    Ok(generator)
}

/// First-order spatial rotation `φ + Rφ` of every slice, with `R` from
/// [`spatial_rotation_generator`]. Passes when the interior max-norm
/// residual of the rotated history stays within twice that of the original.
pub fn check_rotation_invariance_3plus1(
    history: &StateHistory,
    params: &PoincareParams,
    margin: usize,
) -> Result<InvarianceReport> {
    let generator = spatial_rotation_generator(history.shape(), params)?;
    let rotated = history.map_fields(|_, s| Ok(s.phi() + &generator.apply(s.phi())?))?;
    let interior = |slices: &[WaveFunction]| slices.iter().map(|v| v.interior_max_abs(margin)).fold(0.0, f64::max);
    let base = kg_residual_slices(history)?;
    let moved = kg_residual_slices(&rotated)?;
    let n_max = history.shape().axis(0)?.n_max();
    let full = moved.iter().map(WaveFunction::max_abs).fold(0.0, f64::max);
    let moved_interior = interior(&moved);
    let bound = 2.0 * interior(&base);
    Ok(InvarianceReport {
        test: "rotation_3plus1".into(),
        n_max,
        margin,
        norm_interior: moved_interior,
        norm_full: full,
        tolerance: bound,
        pass: moved_interior <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klein_gordon::assemble_kg_operator_4d;
    use crate::lattice::TruncatedBasis;

    fn shape(n_max: usize) -> LatticeShape {
        LatticeShape::uniform(TruncatedBasis::new(n_max).unwrap(), 4).unwrap()
    }

    #[test]
    fn params_validation() {
        let mut omega = [[0.0; 4]; 4];
        omega[0][1] = 0.1;
        assert!(PoincareParams::new([0.0; 4], omega).is_err());
        let p = PoincareParams::zero().with_omega(0, 3, 0.2).unwrap();
        assert_eq!(p.omega()[3][0], -0.2);
        assert!(!p.is_translation());
        assert!(PoincareParams::zero().with_omega(1, 1, 0.5).is_err());
        assert!(PoincareParams::translation([f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn generators_hermitian_and_antisymmetric() {
        let gens = build_generators(&shape(3)).unwrap();
        for (name, g) in gens.generators() {
            assert!(g.is_hermitian(1e-14), "{name}");
        }
        for a in 0..4 {
            assert_eq!(gens.j(a, a).unwrap().max_abs(), 0.0);
            for b in 0..4 {
                let sum = gens.j(a, b).unwrap().try_add(&gens.j(b, a).unwrap()).unwrap();
                assert_eq!(sum.max_abs(), 0.0);
            }
        }
        assert!(gens.casimir().is_hermitian(0.0));
    }

    #[test]
    fn casimir_commutes_on_interior() {
        let gens = build_generators(&shape(5)).unwrap();
        let reports = check_casimir_commutation(&gens).unwrap();
        assert_eq!(reports.len(), 10);
        for r in &reports {
            assert!(r.pass, "{r}");
        }
        assert!(reports.iter().any(|r| r.norm_full > 1e-6));
    }

    #[test]
    fn unweighted_boosts_break_casimir() {
        let gens = build_generators_with(&shape(5), PositionConvention::Unweighted, DEFAULT_MEMORY_BUDGET).unwrap();
        let reports = check_casimir_commutation(&gens).unwrap();
        let failing: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.test.as_str()).collect();
        assert_eq!(failing, ["casimir_commutes_J14", "casimir_commutes_J24", "casimir_commutes_J34"]);
    }

    #[test]
    fn zero_params_give_identity() {
        let gens = build_generators(&shape(3)).unwrap();
        let u = build_finite_transform(&gens, &PoincareParams::zero()).unwrap();
        assert_eq!(u.identity_defect(), 0.0);
    }

    #[test]
    fn translation_is_orthogonal_and_invertible() {
        let gens = build_generators(&shape(3)).unwrap();
        let params = PoincareParams::translation([0.1, 0.2, 0.0, 0.05]).unwrap();
        let u = build_finite_transform(&gens, &params).unwrap();
        assert!(u.orthogonality_defect() < 1e-12);
        let back = build_finite_transform(&gens, &params.negated()).unwrap();
        assert!(u.compose(&back).unwrap().identity_defect() < 1e-12);
    }

    #[test]
    fn translation_commutes_with_kg() {
        let s = shape(4);
        let gens = build_generators(&s).unwrap();
        let op = assemble_kg_operator_4d(&s, 1.0).unwrap();
        let phi = WaveFunction::delta(s.clone(), &[1, 2, 0, 1]).unwrap();
        let params = PoincareParams::translation([0.05, -0.03, 0.02, 0.04]).unwrap();
        let report = check_kg_invariance_4d(&op, &gens, &params, &phi).unwrap();
        assert!(report.pass, "{report}");
        assert!(report.norm_full < 1e-10);
    }

    #[test]
    fn log_slope() {
        let xs = [1e-2, 5e-3, 2.5e-3];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        assert!((fit_log_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boost_slope_depends_on_sign_convention() {
        let spatial = LatticeShape::uniform(TruncatedBasis::new(6).unwrap(), 3).unwrap();
        let history = crate::klein_gordon::eigenmode_history(&spatial, 1.0, [3, 1, 0], -1.0, 0.01, 201).unwrap();
        let params = PoincareParams::zero().with_omega(0, 3, 1.0).unwrap();
        let weighted = check_boost_invariance_3plus1(&history, &params, &BoostCheckConfig::default()).unwrap();
        assert!(weighted.pass && (weighted.slope.unwrap() - 2.0).abs() < 0.05, "{weighted:?}");
        let config = BoostCheckConfig {
            convention: PositionConvention::Unweighted,
            ..BoostCheckConfig::default()
        };
        let bare = check_boost_invariance_3plus1(&history, &params, &config).unwrap();
        assert!(!bare.pass && (bare.slope.unwrap() - 1.0).abs() < 0.1, "{bare:?}");
    }

    #[test]
    fn first_order_rotation_keeps_residual() {
        let spatial = LatticeShape::uniform(TruncatedBasis::new(6).unwrap(), 3).unwrap();
        let history = crate::klein_gordon::eigenmode_history(&spatial, 1.0, [2, 1, 0], 0.0, 0.01, 21).unwrap();
        let params = PoincareParams::zero().with_omega(0, 1, 0.05).unwrap();
        let report = check_rotation_invariance_3plus1(&history, &params, CASIMIR_MARGIN).unwrap();
        assert!(report.pass, "{report}");
    }

    #[test]
    fn memory_budget_checked() {
        assert!(matches!(build_generators(&shape(20)), Err(Error::MemoryBudget { .. })));
    }
}
