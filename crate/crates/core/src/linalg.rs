//! Dense complex linear algebra over composite Hilbert spaces.
//!
//! Every quantity carries the ordered list of subsystem dimensions it lives
//! on. Composite indices follow the Kronecker convention: the first
//! subsystem is the most significant digit.
//!
//! Superoperators act on column-stacked density matrices, so
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`. nalgebra stores matrices column-major,
//! which makes `DMatrix::as_slice` exactly `vec(ρ)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance applied when validating operators and states.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace tolerance applied when validating density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const POSITIVITY_TOL: f64 = -1e-9;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Ordered subsystem dimensions of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    dims: Vec<usize>,
}

impl HilbertSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("hilbert space needs at least one subsystem".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!("zero subsystem dimension in {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// A single subsystem of dimension `d`.
    ///
    /// Panics if `d == 0`.
    pub fn qudit(d: usize) -> Self {
        assert!(d > 0, "subsystem dimension must be positive");
        Self { dims: vec![d] }
    }

    pub fn qubit() -> Self {
        Self::qudit(2)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn tensor(&self, other: &HilbertSpace) -> HilbertSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HilbertSpace { dims }
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join("⊗"))
    }
}

fn check_space(a: &HilbertSpace, b: &HilbertSpace, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::SpaceMismatch(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

fn all_finite(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entry of |A − A†|.
pub fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Kronecker product of two dense complex matrices.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Matrix exponential by scaling-and-squaring with Padé approximants.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.exp()
}

/// `exp(factor · H)` for Hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<C64>, factor: C64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| (factor * e).exp()));
    v * phases * v.adjoint()
}

/// Real eigenvalues of a Hermitian matrix in ascending order, with matching
/// eigenvector columns.
pub fn eigh(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn eigenvalues_general(m: &DMatrix<C64>) -> Vec<C64> {
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

/// Dense operator on a composite Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    space: HilbertSpace,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>, space: HilbertSpace) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != space.total() {
            return Err(Error::SpaceMismatch(format!(
                "matrix {}x{} does not match space {space} (total {})",
                matrix.nrows(),
                matrix.ncols(),
                space.total()
            )));
        }
        if !all_finite(&matrix) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { matrix, space })
    }

    /// Operator on a single subsystem whose dimension is the matrix side.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        Self::new(matrix, HilbertSpace::qudit(n))
    }

    /// Build from real row-major entries on a single subsystem.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("rows must form a square matrix".into()));
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| c(rows[i][j], 0.0)))
    }

    pub(crate) fn from_parts_unchecked(matrix: DMatrix<C64>, space: HilbertSpace) -> Self {
        debug_assert_eq!(matrix.nrows(), space.total());
        Self { matrix, space }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let n = space.total();
        Self { matrix: DMatrix::identity(n, n), space: space.clone() }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let n = space.total();
        Self { matrix: DMatrix::zeros(n, n), space: space.clone() }
    }

    pub fn diagonal(space: &HilbertSpace, values: &[f64]) -> Result<Self> {
        if values.len() != space.total() {
            return Err(Error::SpaceMismatch(format!(
                "{} diagonal entries for space {space}",
                values.len()
            )));
        }
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0)));
        Self::new(DMatrix::from_diagonal(&d), space.clone())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Operator {
        Self { matrix: self.matrix.adjoint(), space: self.space.clone() }
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Kronecker product; the result lives on the concatenated space.
    pub fn tensor(&self, other: &Operator) -> Operator {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
            space: self.space.tensor(&other.space),
        }
    }

    pub fn scaled(&self, factor: C64) -> Operator {
        Self { matrix: &self.matrix * factor, space: self.space.clone() }
    }

    pub fn try_add(&self, other: &Operator) -> Result<Operator> {
        check_space(&self.space, &other.space, "operator sum")?;
        Ok(Self { matrix: &self.matrix + &other.matrix, space: self.space.clone() })
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Operator> {
        check_space(&self.space, &other.space, "operator product")?;
        Ok(Self { matrix: &self.matrix * &other.matrix, space: self.space.clone() })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        check_space(&self.space, &other.space, "commutator")?;
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(Self { matrix: m, space: self.space.clone() })
    }

    /// Lift this single-subsystem operator to position `index` of `space`,
    /// acting as the identity on every other subsystem.
    pub fn embed(&self, space: &HilbertSpace, index: usize) -> Result<Operator> {
        let dims = space.dims();
        if index >= dims.len() {
            return Err(Error::InvalidArgument(format!("subsystem {index} out of range for {space}")));
        }
        if dims[index] != self.dim() {
            return Err(Error::SpaceMismatch(format!(
                "operator of dimension {} placed on subsystem of dimension {}",
                self.dim(),
                dims[index]
            )));
        }
        let mut m = DMatrix::<C64>::identity(1, 1);
        for (k, &d) in dims.iter().enumerate() {
            let factor = if k == index { self.matrix.clone() } else { DMatrix::identity(d, d) };
            m = kron(&m, &factor);
        }
        Ok(Self { matrix: m, space: space.clone() })
    }

    /// Operator norm bound used for step-size heuristics (Frobenius norm).
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    /// Panics on space mismatch; use [`Operator::try_add`] for a checked sum.
    fn add(self, rhs: &'a Operator) -> Operator {
        self.try_add(rhs).expect("operator spaces must match")
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator spaces must match");
        Operator { matrix: &self.matrix - &rhs.matrix, space: self.space.clone() }
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        self.try_mul(rhs).expect("operator spaces must match")
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(c(rhs, 0.0))
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scaled(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scaled(c(-1.0, 0.0))
    }
}

/// Kronecker product of two operators.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    a.tensor(b)
}

/// Tensor product of a list of operators, left to right.
pub fn tensor_all(ops: &[&Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty tensor product".into()))?;
    Ok(rest.iter().fold((*first).clone(), |acc, op| acc.tensor(op)))
}

/// Standard single-qubit and oscillator operators.
///
/// Qubit basis ordering is `|0⟩ ≡ |g⟩`, `|1⟩ ≡ |e⟩` and
/// `σz = |e⟩⟨e| − |g⟩⟨g|`, so `⟨g|σz|g⟩ = −1`.
pub mod ops {
    use super::*;

    fn qubit(m: [[C64; 2]; 2]) -> Operator {
        let matrix = DMatrix::from_fn(2, 2, |i, j| m[i][j]);
        Operator::from_parts_unchecked(matrix, HilbertSpace::qubit())
    }

    pub fn sigma_x() -> Operator {
        qubit([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Operator {
        qubit([[ZERO, I], [-I, ZERO]])
    }

    pub fn sigma_z() -> Operator {
        qubit([[-ONE, ZERO], [ZERO, ONE]])
    }

    /// Lowering operator `|g⟩⟨e|`.
    pub fn sigma_minus() -> Operator {
        qubit([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// Raising operator `|e⟩⟨g|`.
    pub fn sigma_plus() -> Operator {
        qubit([[ZERO, ZERO], [ONE, ZERO]])
    }

    pub fn identity(d: usize) -> Operator {
        Operator::identity(&HilbertSpace::qudit(d))
    }

    /// Annihilation operator truncated to `d` Fock states.
    pub fn destroy(d: usize) -> Operator {
        let m = DMatrix::from_fn(d, d, |i, j| if j == i + 1 { c((j as f64).sqrt(), 0.0) } else { ZERO });
        Operator::from_parts_unchecked(m, HilbertSpace::qudit(d))
    }

    pub fn create(d: usize) -> Operator {
        destroy(d).dagger()
    }

    pub fn number(d: usize) -> Operator {
        let m = DMatrix::from_fn(d, d, |i, j| if i == j { c(i as f64, 0.0) } else { ZERO });
        Operator::from_parts_unchecked(m, HilbertSpace::qudit(d))
    }

    /// `|i⟩⟨j|` on a `d`-level system.
    pub fn transition(d: usize, i: usize, j: usize) -> Operator {
        assert!(i < d && j < d, "level index out of range");
        let mut m = DMatrix::zeros(d, d);
        m[(i, j)] = ONE;
        Operator::from_parts_unchecked(m, HilbertSpace::qudit(d))
    }

    pub fn projector(d: usize, k: usize) -> Operator {
        transition(d, k, k)
    }
}

/// State vector. The norm is reported, not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: DVector<C64>,
    space: HilbertSpace,
}

impl Ket {
    pub fn new(amplitudes: DVector<C64>, space: HilbertSpace) -> Result<Self> {
        if amplitudes.len() != space.total() {
            return Err(Error::SpaceMismatch(format!(
                "ket of length {} for space {space}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("ket has non-finite entries".into()));
        }
        Ok(Self { amplitudes, space })
    }

    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("empty ket".into()));
        }
        Self::new(DVector::from_column_slice(amps), HilbertSpace::qudit(amps.len()))
    }

    pub(crate) fn from_parts_unchecked(amplitudes: DVector<C64>, space: HilbertSpace) -> Self {
        Self { amplitudes, space }
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(space: &HilbertSpace, k: usize) -> Self {
        let n = space.total();
        assert!(k < n, "basis index {k} out of range for dimension {n}");
        let mut v = DVector::zeros(n);
        v[k] = ONE;
        Self { amplitudes: v, space: space.clone() }
    }

    /// `(|g⟩ + |e⟩)/√2`.
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amplitudes: DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]), space: HilbertSpace::qubit() }
    }

    /// `(|g⟩ − |e⟩)/√2`.
    pub fn minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { amplitudes: DVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)]), space: HilbertSpace::qubit() }
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Ket> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        Ok(Self { amplitudes: &self.amplitudes / c(n, 0.0), space: self.space.clone() })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        check_space(&self.space, &other.space, "inner product")?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            space: self.space.tensor(&other.space),
        }
    }

    pub fn apply(&self, op: &Operator) -> Result<Ket> {
        check_space(&self.space, op.space(), "operator on ket")?;
        Ok(Self { amplitudes: op.matrix() * &self.amplitudes, space: self.space.clone() })
    }

    /// `|ψ⟩⟨ψ|` normalized to unit trace.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let psi = self.normalized()?;
        let m = &psi.amplitudes * psi.amplitudes.adjoint();
        Ok(DensityMatrix::from_parts_unchecked(m, self.space.clone()))
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// within the module tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    space: HilbertSpace,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>, space: HilbertSpace) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != space.total() {
            return Err(Error::SpaceMismatch(format!(
                "density matrix {}x{} for space {space}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !all_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let rho = Self { matrix, space };
        let min_eig = rho.min_eigenvalue();
        if min_eig < POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(rho)
    }

    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        Self::new(matrix, HilbertSpace::qudit(n))
    }

    /// Wrap solver output without validation; callers monitor invariants
    /// through diagnostics instead.
    pub fn from_parts_unchecked(matrix: DMatrix<C64>, space: HilbertSpace) -> Self {
        Self { matrix, space }
    }

    pub fn from_ket(psi: &Ket) -> Result<Self> {
        psi.to_density()
    }

    pub fn basis(space: &HilbertSpace, k: usize) -> Self {
        let n = space.total();
        assert!(k < n, "basis index out of range");
        let mut m = DMatrix::zeros(n, n);
        m[(k, k)] = ONE;
        Self { matrix: m, space: space.clone() }
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let n = space.total();
        Self { matrix: DMatrix::identity(n, n) / c(n as f64, 0.0), space: space.clone() }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * c(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Population `⟨k|ρ|k⟩`.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
            space: self.space.tensor(&other.space),
        }
    }

    /// Reduced state on the subsystems listed in `keep` (sorted, deduplicated).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Trace out every subsystem not listed in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace needs a non-empty keep set".into()));
    }
    let dims = rho.space.dims();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!("subsystem {bad} out of range for {}", rho.space)));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();

    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let n_keep: usize = keep_dims.iter().product();
    let n_traced: usize = traced_dims.iter().product();

    // Offset of a multi-index (given in the order of `subsystems`) in the full space.
    let offset = |mut flat: usize, subsystems: &[usize], sub_dims: &[usize]| -> usize {
        let mut off = 0;
        for (pos, &k) in subsystems.iter().enumerate().rev() {
            let d = sub_dims[pos];
            off += (flat % d) * strides[k];
            flat /= d;
        }
        off
    };

    let keep_off: Vec<usize> = (0..n_keep).map(|r| offset(r, &keep, &keep_dims)).collect();
    let traced_off: Vec<usize> = (0..n_traced).map(|t| offset(t, &traced, &traced_dims)).collect();

    let mut out = DMatrix::<C64>::zeros(n_keep, n_keep);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (cc, &co) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &to in &traced_off {
                acc += rho.matrix[(ro + to, co + to)];
            }
            out[(r, cc)] = acc;
        }
    }
    Ok(DensityMatrix {
        matrix: out,
        space: HilbertSpace { dims: keep_dims },
    })
}

/// A dissipation channel: operator `L` with rate `Γ ≥ 0`, entering the
/// master equation as `Γ D[L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub op: Operator,
    pub rate: f64,
}

impl Channel {
    pub fn new(op: Operator, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::NegativeRate { what: "channel".into(), rate });
        }
        Ok(Self { op, rate })
    }

    /// Collapse operator with the rate folded in: `√Γ L`.
    pub fn collapse(&self) -> Operator {
        self.op.scaled(c(self.rate.sqrt(), 0.0))
    }
}

/// `D[L]ρ = LρL† − ½(L†Lρ + ρL†L)`.
pub fn dissipator(l: &DMatrix<C64>, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let ld = l.adjoint();
    let ldl = &ld * l;
    l * rho * &ld - (&ldl * rho + rho * &ldl) * c(0.5, 0.0)
}

/// Linear map on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    matrix: DMatrix<C64>,
    space: HilbertSpace,
}

impl Superoperator {
    pub fn new(matrix: DMatrix<C64>, space: HilbertSpace) -> Result<Self> {
        let n2 = space.total() * space.total();
        if !matrix.is_square() || matrix.nrows() != n2 {
            return Err(Error::SpaceMismatch(format!(
                "superoperator {}x{} for space {space} (needs side {n2})",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, space })
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let n2 = space.total() * space.total();
        Self { matrix: DMatrix::zeros(n2, n2), space: space.clone() }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let n2 = space.total() * space.total();
        Self { matrix: DMatrix::identity(n2, n2), space: space.clone() }
    }

    /// `ρ ↦ A ρ`.
    pub fn left(a: &Operator) -> Self {
        let n = a.dim();
        Self { matrix: kron(&DMatrix::identity(n, n), a.matrix()), space: a.space().clone() }
    }

    /// `ρ ↦ ρ B`.
    pub fn right(b: &Operator) -> Self {
        let n = b.dim();
        Self { matrix: kron(&b.matrix().transpose(), &DMatrix::identity(n, n)), space: b.space().clone() }
    }

    /// `ρ ↦ A ρ B`.
    pub fn sandwich(a: &Operator, b: &Operator) -> Result<Self> {
        check_space(a.space(), b.space(), "sandwich")?;
        Ok(Self { matrix: kron(&b.matrix().transpose(), a.matrix()), space: a.space().clone() })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn scaled(&self, factor: f64) -> Superoperator {
        Self { matrix: &self.matrix * c(factor, 0.0), space: self.space.clone() }
    }

    pub fn try_add(&self, other: &Superoperator) -> Result<Superoperator> {
        check_space(&self.space, &other.space, "superoperator sum")?;
        Ok(Self { matrix: &self.matrix + &other.matrix, space: self.space.clone() })
    }

    /// Apply to a matrix, returning the image as a matrix.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let n = self.space.total();
        assert_eq!(rho.nrows(), n, "state dimension mismatch");
        let v = DVector::from_column_slice(rho.as_slice());
        let out = &self.matrix * v;
        DMatrix::from_column_slice(n, n, out.as_slice())
    }

    /// Largest magnitude of `Tr[𝓛(|i⟩⟨j|)]` over basis inputs; zero for
    /// trace-annihilating generators.
    pub fn trace_annihilation_error(&self) -> f64 {
        let n = self.space.total();
        let mut worst = 0.0f64;
        for col in 0..n * n {
            let mut tr = ZERO;
            for k in 0..n {
                tr += self.matrix[(k + n * k, col)];
            }
            worst = worst.max(tr.norm());
        }
        worst
    }

    /// `exp(t 𝓛)` as a dense matrix.
    pub fn exp(&self, t: f64) -> DMatrix<C64> {
        expm(&(&self.matrix * c(t, 0.0)))
    }
}

/// Column-stacked vectorization of a square matrix.
pub fn vec_of(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`].
pub fn unvec(v: &DVector<C64>, n: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(n, n, v.as_slice())
}

/// Generator `𝓛ρ = −i[H,ρ] + Σ Γ_k D[L_k]ρ` in column-stacking form.
pub fn liouvillian(h: &Operator, channels: &[Channel]) -> Result<Superoperator> {
    h.ensure_hermitian()?;
    let n = h.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let mut m = (kron(&id, h.matrix()) - kron(&h.matrix().transpose(), &id)) * (-I);
    for ch in channels {
        check_space(h.space(), ch.op.space(), "liouvillian channel")?;
        if !(ch.rate >= 0.0) {
            return Err(Error::NegativeRate { what: "liouvillian channel".into(), rate: ch.rate });
        }
        if ch.rate == 0.0 {
            continue;
        }
        let l = ch.op.matrix();
        let ldl = l.adjoint() * l;
        let d = kron(&l.conjugate(), l)
            - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * c(0.5, 0.0);
        m += d * c(ch.rate, 0.0);
    }
    Superoperator::new(m, h.space().clone())
}

/// `|ψ(t)⟩ = exp(−iHt)|ψ⟩` through the eigendecomposition of `H`.
pub fn propagate_unitary(h: &Operator, t: f64, psi: &Ket) -> Result<Ket> {
    h.ensure_hermitian()?;
    check_space(h.space(), psi.space(), "propagate_unitary")?;
    let u = expm_hermitian(h.matrix(), c(0.0, -t));
    Ok(Ket::from_parts_unchecked(u * psi.amplitudes(), psi.space().clone()))
}

/// States that support expectation values.
pub trait QuantumState {
    fn space(&self) -> &HilbertSpace;
    /// `⟨ψ|A|ψ⟩` or `Tr(Aρ)`, without space checks.
    fn expect_unchecked(&self, op: &DMatrix<C64>) -> C64;
}

impl QuantumState for Ket {
    fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn expect_unchecked(&self, op: &DMatrix<C64>) -> C64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }
}

impl QuantumState for DensityMatrix {
    fn space(&self) -> &HilbertSpace {
        &self.space
    }

    fn expect_unchecked(&self, op: &DMatrix<C64>) -> C64 {
        trace_of_product(op, &self.matrix)
    }
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn expectation<S: QuantumState>(op: &Operator, state: &S) -> Result<C64> {
    check_space(op.space(), state.space(), "expectation")?;
    Ok(state.expect_unchecked(op.matrix()))
}
