use nalgebra::SymmetricEigen;

use super::{max_abs_diff, CMatrix, CVector, DensityOperator, PureState, Unitary, C0, C1};
use crate::error::{Error, Result};

/// Trace deviation tolerated by [`apply_channel`].
const TRACE_TOL: f64 = 1e-9;

/// A linear map on `n`-qubit operators.
///
/// `apply_operator` must accept any square matrix of the right size, not only
/// density operators, so that the superoperator can be read off basis matrices.
pub trait QuantumChannel: Send + Sync {
    fn n_qubits(&self) -> usize;

    fn apply_operator(&self, op: &CMatrix) -> CMatrix;

    fn superoperator(&self) -> Superoperator {
        Superoperator::from_channel(self)
    }
}

/// One outcome of a trajectory: the branch probability and the normalized
/// post-branch state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub state: PureState,
}

/// A channel that maps pure states to ensembles of pure states. Summing
/// `p_b |ψ_b⟩⟨ψ_b|` over the branches must reproduce `apply_operator(|ψ⟩⟨ψ|)`.
pub trait TrajectoryRule: QuantumChannel {
    fn branches(&self, psi: &PureState) -> Vec<Branch>;
}

fn vec_op(m: &CMatrix) -> CVector {
    // nalgebra storage is column-major, which is exactly column stacking
    CVector::from_column_slice(m.as_slice())
}

fn unvec(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Superoperator matrix of size `4^n × 4^n` in the column-stacking convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    n_qubits: usize,
    matrix: CMatrix,
}

/// Trace-preservation and complete-positivity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    /// max |tr E(|a⟩⟨b|) − δ_ab|
    pub trace_deviation: f64,
    pub min_choi_eigenvalue: f64,
    pub choi_hermitian_deviation: f64,
}

impl CptpReport {
    pub fn is_cptp(&self, trace_tol: f64, eig_tol: f64) -> bool {
        self.trace_deviation <= trace_tol
            && self.min_choi_eigenvalue >= -eig_tol
            && self.choi_hermitian_deviation <= eig_tol
    }
}

impl Superoperator {
    pub fn new(n_qubits: usize, matrix: CMatrix) -> Result<Self> {
        let d2 = 1usize << (2 * n_qubits);
        if matrix.shape() != (d2, d2) {
            return Err(Error::DimensionMismatch {
                expected: d2,
                found: matrix.nrows(),
            });
        }
        Ok(Superoperator { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d2 = 1usize << (2 * n_qubits);
        Superoperator {
            n_qubits,
            matrix: CMatrix::identity(d2, d2),
        }
    }

    /// `X ↦ U X U†`, i.e. `conj(U) ⊗ U`.
    pub fn from_unitary(u: &Unitary) -> Self {
        let m = u.matrix();
        Superoperator {
            n_qubits: u.n_qubits(),
            matrix: m.conjugate().kronecker(m),
        }
    }

    /// Column `c·d + r` is `vec(E(|r⟩⟨c|))`.
    pub fn from_channel<C: QuantumChannel + ?Sized>(ch: &C) -> Self {
        let n = ch.n_qubits();
        let dim = 1usize << n;
        let d2 = dim * dim;
        let mut matrix = CMatrix::from_element(d2, d2, C0);
        let mut basis = CMatrix::from_element(dim, dim, C0);
        for c in 0..dim {
            for r in 0..dim {
                basis[(r, c)] = C1;
                let image = ch.apply_operator(&basis);
                matrix.set_column(c * dim + r, &vec_op(&image));
                basis[(r, c)] = C0;
            }
        }
        Superoperator {
            n_qubits: n,
            matrix,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Superoperator) -> Result<Superoperator> {
        if self.n_qubits != first.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: first.dim(),
            });
        }
        Ok(Superoperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &first.matrix,
        })
    }

    pub fn scale(&self, c: f64) -> Superoperator {
        Superoperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.scale(c),
        }
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Choi matrix `Σ_{a,b} |a⟩⟨b| ⊗ E(|a⟩⟨b|)`.
    pub fn choi(&self) -> CMatrix {
        let dim = self.dim();
        let mut j = CMatrix::from_element(dim * dim, dim * dim, C0);
        for a in 0..dim {
            for b in 0..dim {
                let image = unvec(&self.matrix.column(b * dim + a).into_owned(), dim);
                for r in 0..dim {
                    for c in 0..dim {
                        j[(a * dim + r, b * dim + c)] = image[(r, c)];
                    }
                }
            }
        }
        j
    }

    pub fn cptp_report(&self) -> CptpReport {
        let dim = self.dim();
        let mut trace_deviation: f64 = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                let col = self.matrix.column(b * dim + a);
                let tr: num_complex::Complex64 = (0..dim).map(|r| col[r * dim + r]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                trace_deviation = trace_deviation.max((tr - expected).norm());
            }
        }
        let choi = self.choi();
        let choi_hermitian_deviation = max_abs_diff(&choi, &choi.adjoint());
        let min_choi_eigenvalue = SymmetricEigen::new(choi).eigenvalues.min();
        CptpReport {
            trace_deviation,
            min_choi_eigenvalue,
            choi_hermitian_deviation,
        }
    }
}

impl QuantumChannel for Superoperator {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        unvec(&(&self.matrix * vec_op(op)), self.dim())
    }

    fn superoperator(&self) -> Superoperator {
        self.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityChannel {
    pub n_qubits: usize,
}

impl QuantumChannel for IdentityChannel {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        op.clone()
    }
}

impl TrajectoryRule for IdentityChannel {
    fn branches(&self, psi: &PureState) -> Vec<Branch> {
        vec![Branch {
            probability: 1.0,
            state: psi.clone(),
        }]
    }
}

/// `X ↦ U X U†`.
#[derive(Debug, Clone)]
pub struct UnitaryChannel {
    unitary: Unitary,
}

impl UnitaryChannel {
    pub fn new(unitary: Unitary) -> Self {
        UnitaryChannel { unitary }
    }
}

impl QuantumChannel for UnitaryChannel {
    fn n_qubits(&self) -> usize {
        self.unitary.n_qubits()
    }

    fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        self.unitary.conjugate(op)
    }

    fn superoperator(&self) -> Superoperator {
        Superoperator::from_unitary(&self.unitary)
    }
}

impl TrajectoryRule for UnitaryChannel {
    fn branches(&self, psi: &PureState) -> Vec<Branch> {
        vec![Branch {
            probability: 1.0,
            state: psi.evolve(self.unitary.matrix()),
        }]
    }
}

/// Applies a channel to a density operator, checking dimensions and trace.
pub fn apply_channel<C: QuantumChannel + ?Sized>(
    ch: &C,
    rho: &DensityOperator,
) -> Result<DensityOperator> {
    if ch.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << ch.n_qubits(),
            found: rho.dim(),
        });
    }
    let out = ch.apply_operator(rho.matrix());
    let tr = out.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidDensity(format!(
            "channel output has trace {tr}"
        )));
    }
    Ok(DensityOperator::from_matrix_unchecked(out))
}
