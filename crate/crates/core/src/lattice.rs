//! Truncated one-sided lattices, wave functions over them, and the four
//! nearest-neighbour difference operators.
//!
//! A lattice axis carries the indices `0..=n_max`. Values outside that range
//! are taken to be zero, so `phi(-1) = 0` and `phi(n_max + 1) = 0`. Identities
//! that hold on the unbounded lattice therefore hold here only on the interior
//! block `0..=n_max - interior_margin`.
//!
//! Multi-axis lattices are stored row-major: axis 0 is the most significant
//! index of the flattened amplitude vector.

use std::fmt;
use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_INTERIOR_MARGIN: usize = 2;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Index set `{0, ..., n_max}` of one lattice axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedBasis {
    n_max: usize,
    interior_margin: usize,
}

impl TruncatedBasis {
    pub fn new(n_max: usize) -> Result<Self> {
        Self::with_margin(n_max, DEFAULT_INTERIOR_MARGIN)
    }

    pub fn with_margin(n_max: usize, interior_margin: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidBasis(format!(
                "n_max must be at least 2, got {n_max}"
            )));
        }
        if interior_margin > n_max {
            return Err(Error::InvalidBasis(format!(
                "interior margin {interior_margin} leaves no interior indices for n_max = {n_max}"
            )));
        }
        Ok(Self {
            n_max,
            interior_margin,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of lattice sites, `n_max + 1`.
    pub fn len(&self) -> usize {
        self.n_max + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interior_margin(&self) -> usize {
        self.interior_margin
    }

    /// Largest index of the interior block.
    pub fn interior_max(&self) -> usize {
        self.n_max - self.interior_margin
    }

    pub fn is_interior(&self, n: usize) -> bool {
        n <= self.interior_max()
    }
}

/// Product of per-axis bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeShape {
    axes: Vec<TruncatedBasis>,
}

impl LatticeShape {
    pub fn new(axes: Vec<TruncatedBasis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidBasis("a lattice needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    pub fn single(basis: TruncatedBasis) -> Self {
        Self { axes: vec![basis] }
    }

    pub fn uniform(basis: TruncatedBasis, axes_total: usize) -> Result<Self> {
        Self::new(vec![basis; axes_total])
    }

    pub fn axes(&self) -> &[TruncatedBasis] {
        &self.axes
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, axis: usize) -> Result<TruncatedBasis> {
        self.axes.get(axis).copied().ok_or(Error::AxisOutOfRange {
            axis,
            axes_total: self.axes.len(),
        })
    }

    /// Total number of amplitudes.
    pub fn dim(&self) -> usize {
        self.axes.iter().map(TruncatedBasis::len).product()
    }

    /// Flat-index stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for k in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.axes[k + 1].len();
        }
        strides
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                found: index.len(),
            });
        }
        let mut flat = 0;
        for (&n, basis) in index.iter().zip(&self.axes) {
            if n > basis.n_max() {
                return Err(Error::Domain(format!(
                    "lattice index {n} exceeds n_max = {}",
                    basis.n_max()
                )));
            }
            flat = flat * basis.len() + n;
        }
        Ok(flat)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.axes.len()];
        for (k, basis) in self.axes.iter().enumerate().rev() {
            index[k] = flat % basis.len();
            flat /= basis.len();
        }
        index
    }

    /// True when every component of the flat index lies at or below
    /// `n_max - margin` on its axis.
    pub fn within_margin(&self, flat: usize, margin: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .all(|(&n, basis)| n + margin <= basis.n_max())
    }

    /// Flat indices of the interior block for the given margin.
    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&flat| self.within_margin(flat, margin))
            .collect()
    }
}

/// Complex amplitudes over a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    shape: LatticeShape,
    amplitudes: DVector<Complex64>,
}

impl WaveFunction {
    pub fn zeros(shape: LatticeShape) -> Self {
        let dim = shape.dim();
        Self {
            shape,
            amplitudes: DVector::zeros(dim),
        }
    }

    pub fn from_amplitudes(shape: LatticeShape, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { shape, amplitudes })
    }

    pub fn from_real(shape: LatticeShape, values: &[f64]) -> Result<Self> {
        let amplitudes = DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        );
        Self::from_amplitudes(shape, amplitudes)
    }

    pub fn from_fn(shape: LatticeShape, mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let amplitudes = DVector::from_iterator(
            shape.dim(),
            (0..shape.dim()).map(|flat| f(&shape.multi_index(flat))),
        );
        Self { shape, amplitudes }
    }

    /// Kronecker delta at the given lattice point.
    pub fn delta(shape: LatticeShape, index: &[usize]) -> Result<Self> {
        let flat = shape.flat_index(index)?;
        let mut psi = Self::zeros(shape);
        psi.amplitudes[flat] = ONE;
        Ok(psi)
    }

    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<Complex64> {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn get(&self, index: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[self.shape.flat_index(index)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude over indices within `margin` of no axis edge.
    pub fn interior_max_abs(&self, margin: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(flat, _)| self.shape.within_margin(*flat, margin))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: Complex64) -> WaveFunction {
        WaveFunction {
            shape: self.shape.clone(),
            amplitudes: &self.amplitudes * factor,
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &WaveFunction, b: Complex64) -> Result<WaveFunction> {
        self.check_same_shape(other)?;
        Ok(WaveFunction {
            shape: self.shape.clone(),
            amplitudes: &self.amplitudes * a + &other.amplitudes * b,
        })
    }

    fn check_same_shape(&self, other: &WaveFunction) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                found: other.shape.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &WaveFunction {
    type Output = WaveFunction;

    fn add(self, rhs: &WaveFunction) -> WaveFunction {
        self.combine(ONE, rhs, ONE)
            .expect("wave functions on different lattices")
    }
}

impl Sub for &WaveFunction {
    type Output = WaveFunction;

    fn sub(self, rhs: &WaveFunction) -> WaveFunction {
        self.combine(ONE, rhs, -ONE)
            .expect("wave functions on different lattices")
    }
}

/// Sparse complex matrix acting on wave functions over a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOperator {
    shape: LatticeShape,
    axis: Option<usize>,
    matrix: CsrMatrix<Complex64>,
}

impl LatticeOperator {
    pub fn from_csr(shape: LatticeShape, axis: Option<usize>, matrix: CsrMatrix<Complex64>) -> Result<Self> {
        let dim = shape.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self {
            shape,
            axis,
            matrix,
        })
    }

    /// Builds an operator from `(row, col, value)` triplets; duplicates add.
    pub fn from_triplets(
        shape: LatticeShape,
        axis: Option<usize>,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let dim = shape.dim();
        let mut coo = CooMatrix::new(dim, dim);
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.max(c) + 1,
                });
            }
            coo.push(r, c, v);
        }
        Self::from_csr(shape, axis, CsrMatrix::from(&coo))
    }

    pub fn from_dense(shape: LatticeShape, dense: &DMatrix<Complex64>) -> Result<Self> {
        let triplets: Vec<_> = (0..dense.nrows())
            .flat_map(|r| (0..dense.ncols()).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = dense[(r, c)];
                (v != ZERO).then_some((r, c, v))
            })
            .collect();
        if dense.nrows() != shape.dim() || dense.ncols() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                found: dense.nrows().max(dense.ncols()),
            });
        }
        Self::from_triplets(shape, None, triplets)
    }

    pub fn from_real_dense(shape: LatticeShape, dense: &DMatrix<f64>) -> Result<Self> {
        Self::from_dense(shape, &dense.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn identity(shape: LatticeShape) -> Self {
        let dim = shape.dim();
        Self {
            shape,
            axis: None,
            matrix: CsrMatrix::identity(dim),
        }
    }

    pub fn zero(shape: LatticeShape) -> Self {
        let dim = shape.dim();
        Self {
            shape,
            axis: None,
            matrix: CsrMatrix::zeros(dim, dim),
        }
    }

    pub fn shape(&self) -> &LatticeShape {
        &self.shape
    }

    /// The lattice axis a primitive or lifted operator acts on.
    pub fn axis(&self) -> Option<usize> {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn matrix(&self) -> &CsrMatrix<Complex64> {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix
            .get_entry(row, col)
            .map(|e| e.into_value())
            .unwrap_or(ZERO)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.matrix.triplet_iter().map(|(r, c, v)| (r, c, *v))
    }

    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        if psi.shape != self.shape {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        Ok(WaveFunction {
            shape: self.shape.clone(),
            amplitudes: self.mul_vector(&psi.amplitudes),
        })
    }

    /// Raw matrix-vector product on flattened amplitudes.
    pub fn mul_vector(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut y = DVector::zeros(self.matrix.nrows());
        for (r, row) in self.matrix.row_iter().enumerate() {
            let mut acc = ZERO;
            for (&c, v) in row.col_indices().iter().zip(row.values()) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        self.check_same_shape(other)?;
        Ok(self.derived(&self.matrix * &other.matrix, other))
    }

    pub fn try_add(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        self.check_same_shape(other)?;
        Ok(self.derived(&self.matrix + &other.matrix, other))
    }

    pub fn try_sub(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        self.check_same_shape(other)?;
        Ok(self.derived(&self.matrix - &other.matrix, other))
    }

    pub fn scale(&self, factor: Complex64) -> LatticeOperator {
        LatticeOperator {
            shape: self.shape.clone(),
            axis: self.axis,
            matrix: map_values(self.matrix.clone(), |v| v * factor),
        }
    }

    pub fn scale_real(&self, factor: f64) -> LatticeOperator {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn transpose(&self) -> LatticeOperator {
        LatticeOperator {
            shape: self.shape.clone(),
            axis: self.axis,
            matrix: self.matrix.transpose(),
        }
    }

    pub fn adjoint(&self) -> LatticeOperator {
        LatticeOperator {
            shape: self.shape.clone(),
            axis: self.axis,
            matrix: map_values(self.matrix.transpose(), |v| v.conj()),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut dense = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.matrix.triplet_iter() {
            dense[(r, c)] += *v;
        }
        dense
    }

    /// Real parts as a dense matrix.
    pub fn real_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.matrix.triplet_iter() {
            dense[(r, c)] += v.re;
        }
        dense
    }

    /// Largest imaginary part over stored entries.
    pub fn max_imag(&self) -> f64 {
        self.matrix.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude over the whole matrix.
    pub fn max_abs(&self) -> f64 {
        self.matrix.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude over rows and columns whose lattice indices
    /// all lie at or below `n_max - margin`.
    pub fn interior_max_abs(&self, margin: usize) -> f64 {
        let inside: Vec<bool> = (0..self.dim())
            .map(|flat| self.shape.within_margin(flat, margin))
            .collect();
        self.matrix
            .triplet_iter()
            .filter(|(r, c, _)| inside[*r] && inside[*c])
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &LatticeOperator) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()).is_ok_and(|d| d <= tol)
    }

    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        self.max_imag() <= tol && self.max_abs_diff(&self.transpose()).is_ok_and(|d| d <= tol)
    }

    pub fn is_real_antisymmetric(&self, tol: f64) -> bool {
        self.max_imag() <= tol
            && self
                .try_add(&self.transpose())
                .is_ok_and(|s| s.max_abs() <= tol)
    }

    /// Largest `|row - col|` over nonzero entries, measured along `axis`.
    pub fn bandwidth(&self, axis: usize) -> Result<usize> {
        self.shape.axis(axis)?;
        let mut width = 0;
        for (r, c, v) in self.matrix.triplet_iter() {
            if *v == ZERO {
                continue;
            }
            let (ri, ci) = (self.shape.multi_index(r), self.shape.multi_index(c));
            width = width.max(ri[axis].abs_diff(ci[axis]));
        }
        Ok(width)
    }

    /// Writes `row col real imag` lines, sorted by row then column.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# dim {}", self.dim())?;
        writeln!(out, "# row col real imag")?;
        for (r, c, v) in self.matrix.triplet_iter() {
            writeln!(out, "{r} {c} {:.17e} {:.17e}", v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`LatticeOperator::write_text`].
    pub fn read_text<R: BufRead>(shape: LatticeShape, input: R) -> Result<Self> {
        let mut triplets = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!(
                    "line {}: expected 4 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 1));
            let r: usize = fields[0].parse().map_err(|_| bad("row"))?;
            let c: usize = fields[1].parse().map_err(|_| bad("column"))?;
            let re: f64 = fields[2].parse().map_err(|_| bad("real part"))?;
            let im: f64 = fields[3].parse().map_err(|_| bad("imaginary part"))?;
            triplets.push((r, c, Complex64::new(re, im)));
        }
        Self::from_triplets(shape, None, triplets)
    }

    fn derived(&self, matrix: CsrMatrix<Complex64>, other: &LatticeOperator) -> LatticeOperator {
        LatticeOperator {
            shape: self.shape.clone(),
            axis: if self.axis == other.axis { self.axis } else { None },
            matrix,
        }
    }

    fn check_same_shape(&self, other: &LatticeOperator) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for LatticeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = Vec::new();
        self.write_text(&mut buf).map_err(|_| fmt::Error)?;
        f.write_str(&String::from_utf8_lossy(&buf))
    }
}

impl Mul for &LatticeOperator {
    type Output = LatticeOperator;

    fn mul(self, rhs: &LatticeOperator) -> LatticeOperator {
        self.compose(rhs).expect("operators on different lattices")
    }
}

impl Add for &LatticeOperator {
    type Output = LatticeOperator;

    fn add(self, rhs: &LatticeOperator) -> LatticeOperator {
        self.try_add(rhs).expect("operators on different lattices")
    }
}

impl Sub for &LatticeOperator {
    type Output = LatticeOperator;

    fn sub(self, rhs: &LatticeOperator) -> LatticeOperator {
        self.try_sub(rhs).expect("operators on different lattices")
    }
}

fn map_values(
    mut matrix: CsrMatrix<Complex64>,
    f: impl Fn(Complex64) -> Complex64,
) -> CsrMatrix<Complex64> {
    for v in matrix.values_mut() {
        *v = f(*v);
    }
    matrix
}

fn one_axis(
    basis: TruncatedBasis,
    mut entry: impl FnMut(usize) -> [(isize, f64); 2],
) -> LatticeOperator {
    let n_max = basis.n_max() as isize;
    let mut triplets = Vec::with_capacity(2 * basis.len());
    for n in 0..basis.len() {
        for (offset, value) in entry(n) {
            let col = n as isize + offset;
            if (0..=n_max).contains(&col) && value != 0.0 {
                triplets.push((n, col as usize, Complex64::new(value, 0.0)));
            }
        }
    }
    LatticeOperator::from_triplets(LatticeShape::single(basis), Some(0), triplets)
        .expect("band entries lie inside the basis")
}

/// Forward difference, `phi(n + 1) - phi(n)`.
pub fn build_delta(basis: TruncatedBasis) -> LatticeOperator {
    one_axis(basis, |_| [(1, 1.0), (0, -1.0)])
}

/// Backward difference, `phi(n) - phi(n - 1)`.
pub fn build_delta_prime(basis: TruncatedBasis) -> LatticeOperator {
    one_axis(basis, |_| [(0, 1.0), (-1, -1.0)])
}

/// Symmetric weighted difference,
/// `(sqrt(n + 1) phi(n + 1) + sqrt(n) phi(n - 1)) / sqrt(2)`.
pub fn build_delta_circ(basis: TruncatedBasis) -> LatticeOperator {
    one_axis(basis, |n| {
        let n = n as f64;
        [
            (1, ((n + 1.0) / 2.0).sqrt()),
            (-1, (n / 2.0).sqrt()),
        ]
    })
}

/// Antisymmetric weighted difference,
/// `(sqrt(n + 1) phi(n + 1) - sqrt(n) phi(n - 1)) / sqrt(2)`.
pub fn build_delta_sharp(basis: TruncatedBasis) -> LatticeOperator {
    one_axis(basis, |n| {
        let n = n as f64;
        [
            (1, ((n + 1.0) / 2.0).sqrt()),
            (-1, -(n / 2.0).sqrt()),
        ]
    })
}

/// `a * b - b * a`.
pub fn commutator(a: &LatticeOperator, b: &LatticeOperator) -> Result<LatticeOperator> {
    a.compose(b)?.try_sub(&b.compose(a)?)
}

/// Tensor-product lift of a one-axis operator onto axis `axis` of a uniform
/// `axes_total`-axis lattice.
pub fn lift_to_axis(op_1d: &LatticeOperator, axis: usize, axes_total: usize) -> Result<LatticeOperator> {
    let basis = one_axis_basis(op_1d)?;
    if axis >= axes_total {
        return Err(Error::AxisOutOfRange { axis, axes_total });
    }
    lift_into(op_1d, axis, &LatticeShape::uniform(basis, axes_total)?)
}

/// Tensor-product lift onto `axis` of an arbitrary product lattice whose
/// basis on that axis matches the operator's.
pub fn lift_into(op_1d: &LatticeOperator, axis: usize, shape: &LatticeShape) -> Result<LatticeOperator> {
    let basis = one_axis_basis(op_1d)?;
    let target = shape.axis(axis)?;
    if target.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            found: basis.len(),
        });
    }
    let before: usize = shape.axes()[..axis].iter().map(TruncatedBasis::len).product();
    let after: usize = shape.axes()[axis + 1..].iter().map(TruncatedBasis::len).product();
    let len = basis.len();
    let mut triplets = Vec::with_capacity(op_1d.nnz() * before * after);
    for (r, c, v) in op_1d.triplets() {
        for b in 0..before {
            for a in 0..after {
                let row = (b * len + r) * after + a;
                let col = (b * len + c) * after + a;
                triplets.push((row, col, v));
            }
        }
    }
    LatticeOperator::from_triplets(shape.clone(), Some(axis), triplets)
}

fn one_axis_basis(op: &LatticeOperator) -> Result<TruncatedBasis> {
    if op.shape().num_axes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: op.shape().num_axes(),
        });
    }
    op.shape().axis(0)
}

/// Applies `op` to `psi`.
pub fn apply(op: &LatticeOperator, psi: &WaveFunction) -> Result<WaveFunction> {
    op.apply(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn basis(n_max: usize) -> TruncatedBasis {
        TruncatedBasis::new(n_max).unwrap()
    }

    fn real_parts(psi: &WaveFunction) -> Vec<f64> {
        psi.amplitudes().iter().map(|z| z.re).collect()
    }

    fn delta(n_max: usize, n: usize) -> WaveFunction {
        WaveFunction::delta(LatticeShape::single(basis(n_max)), &[n]).unwrap()
    }

    #[test]
    fn basis_invariants() {
        assert!(TruncatedBasis::new(1).is_err());
        assert!(TruncatedBasis::with_margin(4, 5).is_err());
        let b = basis(4);
        assert_eq!(b.len(), 5);
        assert_eq!(b.interior_max(), 2);
        assert!(b.is_interior(2) && !b.is_interior(3));
    }

    #[test]
    fn forward_difference() {
        let b = basis(4);
        let d = build_delta(b);
        let ones = WaveFunction::from_real(LatticeShape::single(b), &[1.0; 5]).unwrap();
        assert_eq!(real_parts(&d.apply(&ones).unwrap()), vec![0.0, 0.0, 0.0, 0.0, -1.0]);

        let ramp = WaveFunction::from_real(LatticeShape::single(b), &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = real_parts(&d.apply(&ramp).unwrap());
        assert!(out[..4].iter().all(|&v| v == 1.0));

        assert_eq!(real_parts(&d.apply(&delta(4, 2)).unwrap()), vec![0.0, 1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn backward_difference() {
        let b = basis(4);
        let d = build_delta_prime(b);
        let ones = WaveFunction::from_real(LatticeShape::single(b), &[1.0; 5]).unwrap();
        assert_eq!(real_parts(&d.apply(&ones).unwrap()), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let ramp = WaveFunction::from_real(LatticeShape::single(b), &[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(real_parts(&d.apply(&ramp).unwrap()), vec![0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(real_parts(&d.apply(&delta(4, 2)).unwrap()), vec![0.0, 0.0, 1.0, -1.0, 0.0]);
    }

    #[test]
    fn symmetric_weighted_difference() {
        let d = build_delta_circ(basis(4));
        let out = real_parts(&d.apply(&delta(4, 0)).unwrap());
        assert_abs_diff_eq!(out[1], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(out.iter().filter(|v| **v != 0.0).count(), 1);

        let out = real_parts(&d.apply(&delta(4, 1)).unwrap());
        assert_abs_diff_eq!(out[0], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(out[2], 1.0, epsilon = 1e-15);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[3], 0.0);

        for n_max in 2..12 {
            assert!(build_delta_circ(basis(n_max)).is_real_symmetric(0.0));
        }
    }

    #[test]
    fn antisymmetric_weighted_difference() {
        let d = build_delta_sharp(basis(4));
        let out = real_parts(&d.apply(&delta(4, 0)).unwrap());
        assert_abs_diff_eq!(out[1], -1.0 / 2f64.sqrt(), epsilon = 1e-15);

        let d5 = build_delta_sharp(basis(5));
        let out = real_parts(&d5.apply(&delta(5, 2)).unwrap());
        assert_abs_diff_eq!(out[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[3], -(3f64.sqrt()) / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2], 0.0);

        for n_max in 2..12 {
            let m = build_delta_sharp(basis(n_max));
            assert!(m.is_real_antisymmetric(0.0));
            assert!(m.scale(Complex64::new(0.0, -1.0)).is_hermitian(0.0));
            assert!(m.bandwidth(0).unwrap() <= 1);
        }
    }

    #[test]
    fn commutator_of_weighted_differences_is_identity_inside() {
        for n_max in [3, 4, 16, 64] {
            let b = basis(n_max);
            let c = commutator(&build_delta_sharp(b), &build_delta_circ(b)).unwrap();
            for n in 0..=n_max - 2 {
                let out = c.apply(&delta(n_max, n)).unwrap();
                let expected = delta(n_max, n);
                // entries of size ~n cancel down to 1: a few ulps of n
                let tol = 4.0 * f64::EPSILON * (n + 1) as f64;
                assert!((&out - &expected).max_abs() <= tol, "n_max={n_max} n={n}");
            }
            // the top row reflects the truncation
            assert!((c.entry(n_max, n_max).re - 1.0).abs() > 0.5);
        }
    }

    #[test]
    fn commutator_edge_cases() {
        let b = basis(6);
        let a = build_delta_circ(b);
        assert_eq!(commutator(&a, &a).unwrap().max_abs(), 0.0);

        let c = commutator(&build_delta(b), &build_delta_prime(b)).unwrap();
        for n in 1..=4 {
            assert!(c.apply(&delta(6, n)).unwrap().max_abs() < 1e-15);
        }

        let other = build_delta(basis(5));
        assert!(matches!(commutator(&a, &other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn telescoping_sum() {
        let b = basis(8);
        let sum = &build_delta(b) + &build_delta_prime(b);
        let values: Vec<f64> = (0..9).map(|n| ((n * n) as f64).sin()).collect();
        let psi = WaveFunction::from_real(LatticeShape::single(b), &values).unwrap();
        let out = real_parts(&sum.apply(&psi).unwrap());
        for n in 1..8 {
            assert_abs_diff_eq!(out[n], values[n + 1] - values[n - 1], epsilon = 1e-15);
        }
    }

    #[test]
    fn lift_matches_slice_application() {
        let b = basis(4);
        let lifted = lift_to_axis(&build_delta_sharp(b), 0, 4).unwrap();
        let shape = lifted.shape().clone();
        let psi = WaveFunction::delta(shape.clone(), &[2, 0, 0, 0]).unwrap();
        let out = lifted.apply(&psi).unwrap();
        let expected_1d = build_delta_sharp(b).apply(&delta(4, 2)).unwrap();
        for n in 0..5 {
            assert_eq!(out.get(&[n, 0, 0, 0]).unwrap(), expected_1d.get(&[n]).unwrap());
        }
        assert_abs_diff_eq!(out.norm_sqr(), expected_1d.norm_sqr(), epsilon = 1e-15);

        let id = lift_to_axis(&LatticeOperator::identity(LatticeShape::single(b)), 2, 3).unwrap();
        assert_eq!(id.max_abs_diff(&LatticeOperator::identity(id.shape().clone())).unwrap(), 0.0);

        let s1 = lift_to_axis(&build_delta_sharp(b), 0, 4).unwrap();
        let c2 = lift_to_axis(&build_delta_circ(b), 1, 4).unwrap();
        assert_eq!(commutator(&s1, &c2).unwrap().max_abs(), 0.0);

        assert!(matches!(
            lift_to_axis(&build_delta_sharp(b), 4, 4),
            Err(Error::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn apply_identity_zero_and_mismatch() {
        let b = basis(4);
        let shape = LatticeShape::single(b);
        let psi = WaveFunction::from_fn(shape.clone(), |i| Complex64::new(i[0] as f64, 1.0));
        assert_eq!(LatticeOperator::identity(shape.clone()).apply(&psi).unwrap(), psi);
        assert_eq!(LatticeOperator::zero(shape.clone()).apply(&psi).unwrap().max_abs(), 0.0);
        let out = apply(&build_delta_circ(b), &delta(4, 0)).unwrap();
        assert_abs_diff_eq!(out.get(&[1]).unwrap().re, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert!(build_delta(basis(5)).apply(&psi).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let op = build_delta_sharp(basis(3)).scale(Complex64::new(0.25, -1.5));
        let mut buf = Vec::new();
        op.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("0 1 "));
        let back = LatticeOperator::read_text(op.shape().clone(), buf.as_slice()).unwrap();
        assert_eq!(back.max_abs_diff(&op).unwrap(), 0.0);
        assert!(LatticeOperator::read_text(op.shape().clone(), "0 1 2".as_bytes()).is_err());
    }

    #[test]
    fn shape_indexing() {
        let shape = LatticeShape::new(vec![basis(2), basis(3), basis(4)]).unwrap();
        assert_eq!(shape.dim(), 60);
        assert_eq!(shape.strides(), vec![20, 5, 1]);
        for flat in 0..60 {
            assert_eq!(shape.flat_index(&shape.multi_index(flat)).unwrap(), flat);
        }
        assert!(shape.flat_index(&[3, 0, 0]).is_err());
        assert_eq!(shape.interior_indices(2).len(), 2 * 3);
    }
}
