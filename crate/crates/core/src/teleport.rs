//! Teleportation of `n` qubits through an arbitrary `2n`-qubit resource,
//! represented as a Pauli error mixture.

use crate::entangle::SchmidtVector;
use crate::error::{Error, Result};
use crate::gf::{FieldContext, GfElement};
use crate::qcore::{
    max_entangled, Branch, CMatrix, DensityOperator, PureState, QuantumChannel, TrajectoryRule,
    Unitary, VALIDATION_TOL,
};

pub use crate::qcore::{Pauli, PauliString};

/// Error probabilities below this are set to zero.
pub const OVERLAP_CLAMP: f64 = 1e-14;

/// Most negative error probability accepted from a resource.
const NEGATIVE_TOL: f64 = -1e-12;

/// Largest number of teleported qubits (the resource has twice as many).
pub const MAX_TELEPORT_QUBITS: usize = 6;

/// `(σ ⊗ I)|Φ_n⟩`.
pub fn generalized_bell(sigma: &PauliString) -> Result<PureState> {
    let n = sigma.n_qubits();
    let phi = max_entangled(n)?;
    let local = sigma.matrix().kronecker(&CMatrix::identity(1 << n, 1 << n));
    Ok(PureState::from_vector_unchecked(local * phi.amplitudes()))
}

/// `φ ↦ Σ_σ p_σ σ φ σ` over Pauli strings with nonzero probability.
#[derive(Debug, Clone)]
pub struct TeleportChannel {
    n: usize,
    error_probs: Vec<(PauliString, f64)>,
    matrices: Vec<CMatrix>,
}

impl TeleportChannel {
    /// Builds the channel from explicit error probabilities. Missing strings
    /// have probability zero.
    pub fn from_error_probs(n: usize, probs: Vec<(PauliString, f64)>) -> Result<Self> {
        if let Some((s, _)) = probs.iter().find(|(s, _)| s.n_qubits() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.n_qubits(),
            });
        }
        if let Some((s, p)) = probs
            .iter()
            .find(|(_, p)| !p.is_finite() || *p < NEGATIVE_TOL)
        {
            return Err(Error::InvalidDensity(format!(
                "error probability {p} for {s}"
            )));
        }
        let total: f64 = probs.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidDensity(format!(
                "error probabilities sum to {total}"
            )));
        }
        let error_probs: Vec<(PauliString, f64)> = probs
            .into_iter()
            .map(|(s, p)| (s, if p < OVERLAP_CLAMP { 0.0 } else { p }))
            .collect();
        let matrices = error_probs.iter().map(|(s, _)| s.matrix()).collect();
        Ok(TeleportChannel {
            n,
            error_probs,
            matrices,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All `4^n` strings in lexicographic order with their probabilities.
    pub fn error_probs(&self) -> &[(PauliString, f64)] {
        &self.error_probs
    }

    pub fn error_prob(&self, sigma: &PauliString) -> f64 {
        self.error_probs
            .iter()
            .find(|(s, _)| s == sigma)
            .map_or(0.0, |(_, p)| *p)
    }
}

/// Channel obtained by teleporting `n` qubits with `resource` on `2n` qubits
/// (sender half on the most significant qubits).
pub fn teleport_channel(resource: &DensityOperator, n: usize) -> Result<TeleportChannel> {
    if !(1..=MAX_TELEPORT_QUBITS).contains(&n) {
        return Err(Error::Config(format!(
            "teleportation needs 1 ≤ n ≤ {MAX_TELEPORT_QUBITS}, got {n}"
        )));
    }
    if resource.n_qubits() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 1 << (2 * n),
            found: resource.dim(),
        });
    }
    let rho = resource.matrix();
    let mut probs = Vec::with_capacity(1 << (2 * n));
    for sigma in PauliString::all(n) {
        let bell = generalized_bell(&sigma)?;
        let v = bell.amplitudes();
        let p = v.dotc(&(rho * v)).re;
        probs.push((sigma, p));
    }
    TeleportChannel::from_error_probs(n, probs)
}

impl QuantumChannel for TeleportChannel {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(op.nrows(), op.ncols());
        for ((_, p), m) in self.error_probs.iter().zip(&self.matrices) {
            if *p > 0.0 {
                out += (m * op * m).scale(*p);
            }
        }
        out
    }
}

impl TrajectoryRule for TeleportChannel {
    fn branches(&self, psi: &PureState) -> Vec<Branch> {
        self.error_probs
            .iter()
            .zip(&self.matrices)
            .filter(|((_, p), _)| *p > 0.0)
            .map(|((_, p), m)| Branch {
                probability: *p,
                state: psi.evolve(m),
            })
            .collect()
    }
}

/// Overlaps `2^{-n} (Σ_i (−1)^{k⊙i} α_i)²` of `|Ψ^α⟩` with the generalized Bell
/// states of the phase operators `Ẑ_k`, indexed by `k`.
pub fn nme_overlaps(alpha: &SchmidtVector) -> Result<Vec<f64>> {
    if alpha.n() == 0 {
        return Ok(vec![1.0]);
    }
    let ctx = FieldContext::new(alpha.n() as u32)?;
    Ok(nme_overlaps_in(&ctx, alpha))
}

pub(crate) fn nme_overlaps_in(ctx: &FieldContext, alpha: &SchmidtVector) -> Vec<f64> {
    let d = ctx.size();
    let scale = 1.0 / d as f64;
    (0..d as u32)
        .map(|k| {
            let s: f64 = alpha
                .values()
                .iter()
                .enumerate()
                .map(|(i, a)| ctx.sign_of_product(k, i as u32) * a)
                .sum();
            let p = scale * s * s;
            if p < OVERLAP_CLAMP {
                0.0
            } else {
                p
            }
        })
        .collect()
}

/// `φ ↦ Σ_k p_k Ẑ_k φ Ẑ_k`, the teleportation channel of a resource `|Ψ^α⟩`.
#[derive(Debug, Clone)]
pub struct PhaseMixtureChannel {
    n: usize,
    probs: Vec<f64>,
    /// `signs[k][l] = (−1)^{l⊙k}`
    signs: Vec<Vec<f64>>,
    /// Elementwise mask `Σ_k p_k (−1)^{a⊙k} (−1)^{b⊙k}`.
    mask: CMatrix,
}

impl PhaseMixtureChannel {
    pub fn new(ctx: &FieldContext, probs: Vec<f64>) -> Result<Self> {
        let d = ctx.size();
        if probs.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: probs.len(),
            });
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > VALIDATION_TOL
        {
            return Err(Error::Config(format!(
                "phase error probabilities must be a distribution, sum {total}"
            )));
        }
        let signs: Vec<Vec<f64>> = (0..d as u32)
            .map(|k| (0..d as u32).map(|l| ctx.sign_of_product(l, k)).collect())
            .collect();
        let mask = CMatrix::from_fn(d, d, |a, b| {
            let m: f64 = (0..d).map(|k| probs[k] * signs[k][a] * signs[k][b]).sum();
            m.into()
        });
        Ok(PhaseMixtureChannel {
            n: ctx.n() as usize,
            probs,
            signs,
            mask,
        })
    }

    /// The teleportation channel of `|Ψ^α⟩` in closed form.
    pub fn from_schmidt(alpha: &SchmidtVector) -> Result<Self> {
        if alpha.n() == 0 {
            return Err(Error::Config(
                "resource must have at least one qubit per side".into(),
            ));
        }
        let ctx = FieldContext::new(alpha.n() as u32)?;
        Self::new(&ctx, nme_overlaps_in(&ctx, alpha))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The Pauli string equal to `Ẑ_k`.
    pub fn pauli_of(ctx: &FieldContext, k: GfElement) -> PauliString {
        let n = ctx.n();
        let bits = ctx.phase_pauli_exponents(k);
        let letters = (0..n)
            .map(|q| {
                if (bits >> (n - 1 - q)) & 1 == 1 {
                    Pauli::Z
                } else {
                    Pauli::I
                }
            })
            .collect();
        PauliString::new(letters)
    }

    pub(crate) fn apply_phase(&self, k: usize, psi: &PureState) -> PureState {
        let signs = &self.signs[k];
        let v = psi.amplitudes().map_with_location(|l, _, z| z * signs[l]);
        PureState::from_vector_unchecked(v)
    }
}

impl QuantumChannel for PhaseMixtureChannel {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        op.component_mul(&self.mask)
    }
}

impl TrajectoryRule for PhaseMixtureChannel {
    fn branches(&self, psi: &PureState) -> Vec<Branch> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| Branch {
                probability: *p,
                state: self.apply_phase(k, psi),
            })
            .collect()
    }
}

/// Single-qubit circuit: CNOT from the input onto the sender half, Hadamard on
/// the input, measure both, correct the receiver with `Z^{m1} X^{m2}`.
pub fn teleport_circuit_single(resource: &DensityOperator, phi: &CMatrix) -> Result<CMatrix> {
    if resource.n_qubits() != 2 || phi.shape() != (2, 2) {
        return Err(Error::Config(
            "circuit form is for one qubit and a two-qubit resource".into(),
        ));
    }
    let joint = phi.kronecker(resource.matrix());
    let id2 = CMatrix::identity(2, 2);
    let x = Pauli::X.matrix();
    let z = Pauli::Z.matrix();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(2, 2, &[s.into(), s.into(), s.into(), (-s).into()]);
    let p0 = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0.into(), 0.0.into()]));
    let p1 = &id2 - &p0;
    let cnot = p0.kronecker(&id2) + p1.kronecker(&x);
    let cnot = cnot.kronecker(&id2);
    let hh = h.kronecker(&id2).kronecker(&id2);
    let u = Unitary::new(&hh * &cnot)?;
    let evolved = u.conjugate(&joint);
    let mut out = CMatrix::zeros(2, 2);
    for m1 in 0..2usize {
        for m2 in 0..2usize {
            // ⟨m1 m2| ⊗ I on the first two qubits
            let mut block = CMatrix::zeros(2, 2);
            let base = (m1 << 2) | (m2 << 1);
            for r in 0..2 {
                for c in 0..2 {
                    block[(r, c)] = evolved[(base | r, base | c)];
                }
            }
            let mut corr = id2.clone();
            if m2 == 1 {
                corr = &x * corr;
            }
            if m1 == 1 {
                corr = &z * corr;
            }
            out += &corr * block * corr.adjoint();
        }
    }
    Ok(out)
}
