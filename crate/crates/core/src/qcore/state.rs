use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{
    hermitian_deviation, kron, max_abs_diff, qubits_for_dim, CMatrix, CVector, C0, C1,
    VALIDATION_TOL,
};
use crate::error::{Error, Result};

/// Smallest eigenvalue accepted for a density operator.
const MIN_EIGENVALUE: f64 = -1e-9;

/// Kronecker product of two objects of the same kind.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

impl Tensor for CMatrix {
    fn tensor(&self, other: &Self) -> Self {
        kron(self, other)
    }
}

/// Normalized state vector on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: CVector) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::Unnormalized(norm_sqr));
        }
        Ok(PureState {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales the vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::Unnormalized(norm * norm));
        }
        Self::from_vector(v.unscale(norm))
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        PureState {
            n_qubits,
            amplitudes,
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(
            index < dim,
            "basis index {index} out of range for {n_qubits} qubits"
        );
        let mut v = CVector::zeros(dim);
        v[index] = C1;
        PureState {
            n_qubits,
            amplitudes: v,
        }
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        PureState {
            n_qubits,
            amplitudes: CVector::from_element(dim, a),
        }
    }

    /// Haar-random state from normalized complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let v = CVector::from_fn(dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = v.norm();
        PureState {
            n_qubits,
            amplitudes: v.unscale(norm),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Applies a matrix and returns the (unnormalized if `m` is not unitary) result.
    pub(crate) fn evolve(&self, m: &CMatrix) -> PureState {
        PureState::from_vector_unchecked(m * &self.amplitudes)
    }

    pub fn apply(&self, u: &Unitary) -> Result<PureState> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        Ok(self.evolve(u.matrix()))
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_matrix_unchecked(self.projector())
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        PureState {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity(format!(
                "matrix is {:?}, not square",
                matrix.shape()
            )));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let herm = hermitian_deviation(&matrix);
        if herm > VALIDATION_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > VALIDATION_TOL || trace.im.abs() > VALIDATION_TOL {
            return Err(Error::InvalidDensity(format!("trace is {trace}")));
        }
        let min_eig = SymmetricEigen::new(matrix.clone()).eigenvalues.min();
        if min_eig < MIN_EIGENVALUE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(DensityOperator { n_qubits, matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        DensityOperator { n_qubits, matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        psi.to_density()
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    /// Random full-rank state `G G† / tr(G G†)` with a complex Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        Self::from_matrix_unchecked(m.unscale(tr))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        DensityOperator {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }
}

/// Unitary matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    n_qubits: usize,
    matrix: CMatrix,
}

impl Unitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotUnitary(f64::INFINITY));
        }
        let n_qubits = qubits_for_dim(matrix.nrows())?;
        let dim = matrix.nrows();
        let dev = max_abs_diff(&(&matrix * matrix.adjoint()), &CMatrix::identity(dim, dim));
        if dev > VALIDATION_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Unitary { n_qubits, matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let n_qubits = matrix.nrows().trailing_zeros() as usize;
        Unitary { n_qubits, matrix }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Unitary {
            n_qubits,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    /// Haar-distributed unitary: QR of a complex Gaussian matrix with the
    /// phases of R's diagonal folded into Q.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_qubits;
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        for c in 0..dim {
            let d = r[(c, c)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C1 };
            for x in q.column_mut(c).iter_mut() {
                *x *= phase;
            }
        }
        Unitary {
            n_qubits,
            matrix: q,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn column(&self, l: usize) -> PureState {
        PureState::from_vector_unchecked(self.matrix.column(l).into_owned())
    }

    /// `U X U†`.
    pub fn conjugate(&self, x: &CMatrix) -> CMatrix {
        &self.matrix * x * self.matrix.adjoint()
    }
}

impl Tensor for Unitary {
    fn tensor(&self, other: &Self) -> Self {
        Unitary {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }
}

/// Bits of `index` (MSB = qubit 0) at the given qubit positions, packed in order.
fn gather_bits(index: usize, qubits: &[usize], n_qubits: usize) -> usize {
    qubits.iter().fold(0, |acc, &q| {
        (acc << 1) | ((index >> (n_qubits - 1 - q)) & 1)
    })
}

/// Traces out every qubit not in `keep`. Kept qubits appear in ascending order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n = rho.n_qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    if kept.is_empty() {
        return Err(Error::InvalidIndices(
            "at least one qubit must be kept".into(),
        ));
    }
    if kept.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidIndices(format!(
            "duplicate qubit in {keep:?}"
        )));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidIndices(format!(
            "qubit {q} out of range for {n} qubits"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let dim = rho.dim();
    let out_dim = 1usize << kept.len();
    let mut out = CMatrix::from_element(out_dim, out_dim, C0);
    let keys: Vec<(usize, usize)> = (0..dim)
        .map(|i| (gather_bits(i, &kept, n), gather_bits(i, &traced, n)))
        .collect();
    let m = rho.matrix();
    for i in 0..dim {
        let (ki, ti) = keys[i];
        for j in 0..dim {
            let (kj, tj) = keys[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(DensityOperator::from_matrix_unchecked(out))
}

/// `(1/√2^n) Σ_i |i⟩_A |i⟩_B` with the A register on the most significant qubits.
pub fn max_entangled(n: usize) -> Result<PureState> {
    if !(1..=6).contains(&n) {
        return Err(Error::Config(format!(
            "maximally entangled state needs 1 ≤ n ≤ 6, got {n}"
        )));
    }
    let d = 1usize << n;
    let mut v = CVector::zeros(d * d);
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[(i << n) | i] = a;
    }
    Ok(PureState::from_vector_unchecked(v))
}
