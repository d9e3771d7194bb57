//! Dense complex linear algebra for states, operators, observables and channels.
//!
//! Conventions used everywhere in the crate:
//!
//! * Qubit 0 is the most significant bit of a basis-state label, so the
//!   basis state `|q₀ q₁ … q_{m-1}⟩` has index `Σ q_i 2^{m-1-i}`.
//! * Superoperators act on column-stacked operators: `vec(X)[c·d + r] = X[r, c]`,
//!   which gives `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//! * At most [`MAX_QUBITS`] qubits in total, so every object stays a dense matrix.

mod channel;
mod observable;
mod state;

pub use channel::{
    apply_channel, Branch, CptpReport, IdentityChannel, QuantumChannel, Superoperator,
    TrajectoryRule, UnitaryChannel,
};
pub use observable::{born_sample, expectation, Observable, Pauli, PauliString, Spectrum};
pub use state::{
    max_entangled, partial_trace, tensor, DensityOperator, PureState, Tensor, Unitary,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const MAX_QUBITS: usize = 12;

/// Tolerance for normalization, Hermiticity, unitarity and trace checks.
pub const VALIDATION_TOL: f64 = 1e-10;

pub(crate) const C0: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C1: Complex64 = Complex64::new(1.0, 0.0);

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Number of qubits of a `dim`-dimensional register, if `dim` is a power of two
/// within the qubit cap.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::Config(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::Config(format!(
            "{n} qubits exceeds the dense simulation cap of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Draws an index from a probability vector. Tail mass lost to rounding falls
/// on the last entry with non-zero probability.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}
