//! Schmidt vectors, pure-state robustness of entanglement and the closed-form
//! sampling overheads of parallel wire cuts.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{CMatrix, CVector, PureState, Unitary, C0, VALIDATION_TOL};

/// Singular values below this are treated as exact zeros.
pub const SCHMIDT_CLAMP: f64 = 1e-12;

/// Slack allowed when checking that a robustness lies in `[0, 2^n − 1]`.
pub const ROBUSTNESS_SLACK: f64 = 1e-9;

/// Largest register (qubits per side) a Schmidt vector may describe.
pub const MAX_SCHMIDT_QUBITS: usize = 16;

/// Nonnegative Schmidt coefficients of a bipartite pure state with `n` qubits
/// per side, sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtVector {
    n: usize,
    alpha: Vec<f64>,
}

/// Indices sorting `values` descending; ties keep their original order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidSchmidt(format!(
            "length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_SCHMIDT_QUBITS {
        return Err(Error::InvalidSchmidt(format!(
            "{n} qubits per side exceeds the limit of {MAX_SCHMIDT_QUBITS}"
        )));
    }
    Ok(n)
}

impl SchmidtVector {
    /// Validates and sorts a normalized coefficient list. Its length must be a
    /// power of two; a single entry `(1)` describes the empty register.
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        let n = log2_exact(alpha.len())?;
        if let Some(a) = alpha.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::InvalidSchmidt(format!(
                "entry {a} is negative or not finite"
            )));
        }
        let norm_sqr: f64 = alpha.iter().map(|a| a * a).sum();
        if (norm_sqr - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::InvalidSchmidt(format!(
                "squared norm is {norm_sqr}, expected 1"
            )));
        }
        let order = descending_order(&alpha);
        let alpha = order.into_iter().map(|i| alpha[i]).collect();
        Ok(SchmidtVector { n, alpha })
    }

    /// Rescales a nonnegative list to unit norm, then validates it.
    pub fn from_unnormalized(values: Vec<f64>) -> Result<Self> {
        if let Some(a) = values.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::InvalidSchmidt(format!(
                "entry {a} is negative or not finite"
            )));
        }
        let norm = values.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidSchmidt("all entries are zero".into()));
        }
        let scaled: Vec<f64> = values.iter().map(|a| a / norm).collect();
        let n = log2_exact(scaled.len())?;
        let order = descending_order(&scaled);
        Ok(SchmidtVector {
            n,
            alpha: order.into_iter().map(|i| scaled[i]).collect(),
        })
    }

    /// Uniform coefficients `2^{-n/2}`.
    pub fn maximal(n: usize) -> Result<Self> {
        let d = 1usize << n.min(MAX_SCHMIDT_QUBITS + 1);
        Self::new(vec![1.0 / (d as f64).sqrt(); d])
    }

    /// `(1, 0, …, 0)`.
    pub fn separable(n: usize) -> Result<Self> {
        let d = 1usize << n.min(MAX_SCHMIDT_QUBITS + 1);
        let mut alpha = vec![0.0; d];
        alpha[0] = 1.0;
        Self::new(alpha)
    }

    /// A vector with the requested robustness, from the one-parameter family
    /// `α₀ = x`, `α_i = √((1 − x²)/(2^n − 1))` for `i > 0`.
    pub fn with_robustness(n: usize, r: f64) -> Result<Self> {
        check_robustness(n, r)?;
        if n == 0 {
            return Self::separable(0);
        }
        let d = (1usize << n) as f64;
        let r = r.clamp(0.0, d - 1.0);
        let rob = |x: f64| {
            let y = ((1.0 - x * x) / (d - 1.0)).max(0.0).sqrt();
            let s = x + (d - 1.0) * y;
            s * s - 1.0
        };
        // rob is decreasing in x on [1/√d, 1]
        let (mut lo, mut hi) = (1.0 / d.sqrt(), 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rob(mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let y = ((1.0 - x * x) / (d - 1.0)).max(0.0).sqrt();
        let mut alpha = vec![y; 1 << n];
        alpha[0] = x;
        Self::from_unnormalized(alpha)
    }

    /// Random vector from the moduli of normalized complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let d = 1usize << n;
        let values: Vec<f64> = (0..d)
            .map(|_| {
                let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                z.norm()
            })
            .collect();
        Self::from_unnormalized(values).expect("Gaussian sample is nonzero")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn robustness(&self) -> f64 {
        robustness_pure(self)
    }

    /// Pads with zeros to `n` qubits per side.
    pub fn embed(&self, n: usize) -> Result<Self> {
        if n < self.n {
            return Err(Error::InvalidSchmidt(format!(
                "cannot embed {} qubits into {n}",
                self.n
            )));
        }
        let mut alpha = self.alpha.clone();
        alpha.resize(1usize << n, 0.0);
        Self::new(alpha)
    }

    /// Schmidt vector of the tensor product of two pure states.
    pub fn tensor(&self, other: &SchmidtVector) -> Result<Self> {
        let alpha: Vec<f64> = self
            .alpha
            .iter()
            .flat_map(|a| other.alpha.iter().map(move |b| a * b))
            .collect();
        Self::new(alpha)
    }

    pub fn is_maximal(&self) -> bool {
        self.dim() as f64 - 1.0 - self.robustness() <= ROBUSTNESS_SLACK
    }
}

impl fmt::Display for SchmidtVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alpha.iter().map(|a| format!("{a}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `|Ψ^α⟩ = Σ_i α_i |i⟩_A |i⟩_B` with the A register on the most significant qubits.
pub fn nme_state(alpha: &SchmidtVector) -> PureState {
    schmidt_state(alpha.values(), alpha.n(), alpha.n())
}

fn schmidt_state(alpha: &[f64], n_a: usize, n_b: usize) -> PureState {
    let mut v = CVector::from_element(1usize << (n_a + n_b), C0);
    for (i, &a) in alpha.iter().enumerate() {
        v[(i << n_b) | i] = Complex64::new(a, 0.0);
    }
    PureState::from_vector_unchecked(v)
}

/// `|ψ⟩ = (u_a ⊗ u_b) Σ_i α_i |i⟩|i⟩`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub alpha: SchmidtVector,
    pub u_a: Unitary,
    pub u_b: Unitary,
}

impl SchmidtDecomposition {
    pub fn n_a(&self) -> usize {
        self.u_a.n_qubits()
    }

    pub fn n_b(&self) -> usize {
        self.u_b.n_qubits()
    }

    pub fn reconstruct(&self) -> PureState {
        let local = self.u_a.matrix().kronecker(self.u_b.matrix());
        let core = schmidt_state(self.alpha.values(), self.n_a(), self.n_b());
        PureState::from_vector_unchecked(local * core.amplitudes())
    }
}

/// Extends orthonormal columns to a full unitary by Gram-Schmidt against the
/// computational basis.
fn complete_basis(cols: Vec<CVector>, dim: usize) -> CMatrix {
    let mut basis = cols;
    let mut e = 0;
    while basis.len() < dim {
        let mut v = CVector::from_element(dim, C0);
        v[e] = Complex64::new(1.0, 0.0);
        e += 1;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v.unscale(norm));
        }
    }
    CMatrix::from_columns(&basis)
}

/// Schmidt decomposition across the split after the first `n_a` qubits.
///
/// The vector has `2^{min(n_a, n_b)}` entries; both local unitaries are full
/// square matrices on their side.
pub fn schmidt_decompose(psi: &PureState, n_a: usize) -> Result<SchmidtDecomposition> {
    let total = psi.n_qubits();
    if n_a == 0 || n_a >= total {
        return Err(Error::Config(format!(
            "bipartition needs 1 ≤ n_a < {total}, got n_a = {n_a}"
        )));
    }
    let norm_sqr = psi.amplitudes().norm_squared();
    if (norm_sqr - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::Unnormalized(norm_sqr));
    }
    let n_b = total - n_a;
    let (da, db) = (1usize << n_a, 1usize << n_b);
    let amps = psi.amplitudes();
    let m = CMatrix::from_fn(da, db, |a, b| amps[(a << n_b) | b]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");
    let sigma: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| if s < SCHMIDT_CLAMP { 0.0 } else { s })
        .collect();
    let order = descending_order(&sigma);

    let k = sigma.len();
    let xi: Vec<CVector> = order.iter().map(|&i| u.column(i).into_owned()).collect();
    let zeta: Vec<CVector> = order.iter().map(|&i| v_t.row(i).transpose()).collect();
    debug_assert_eq!(k, da.min(db));

    let alpha = SchmidtVector::from_unnormalized(order.iter().map(|&i| sigma[i]).collect())?;
    let u_a = Unitary::from_matrix_unchecked(complete_basis(xi, da));
    let u_b = Unitary::from_matrix_unchecked(complete_basis(zeta, db));
    Ok(SchmidtDecomposition { alpha, u_a, u_b })
}

/// `R = (Σ α_i)² − 1`.
pub fn robustness_pure(alpha: &SchmidtVector) -> f64 {
    let s: f64 = alpha.values().iter().sum();
    (s * s - 1.0).max(0.0)
}

fn check_robustness(n: usize, r: f64) -> Result<()> {
    let max = (1u64 << n) as f64 - 1.0;
    if !r.is_finite() || r < -ROBUSTNESS_SLACK || r > max + ROBUSTNESS_SLACK {
        return Err(Error::Config(format!(
            "robustness {r} outside [0, {max}] for n = {n}"
        )));
    }
    Ok(())
}

/// Optimal overhead `2^{n+1}/(R+1) − 1` of cutting `n` wires with a resource of
/// robustness `R`.
pub fn overhead_nme(n: usize, r: f64) -> Result<f64> {
    if n == 0 || n > 30 {
        return Err(Error::Config(format!(
            "number of wires must be in 1..=30, got {n}"
        )));
    }
    check_robustness(n, r)?;
    let r = r.max(0.0);
    Ok((1u64 << (n + 1)) as f64 / (r + 1.0) - 1.0)
}

/// Overhead `2^{n+1} − 1` without entanglement.
pub fn overhead_baseline(n: usize) -> Result<f64> {
    overhead_nme(n, 0.0)
}

/// Robustness of a product of pure states, from the tensor-product Schmidt vector.
pub fn composite_robustness_pure(alphas: &[SchmidtVector]) -> Result<f64> {
    let mut acc = SchmidtVector::separable(0)?;
    for a in alphas {
        acc = acc.tensor(a)?;
    }
    Ok(robustness_pure(&acc))
}

/// Overhead saved by cutting `n_e` wires with an entangled resource and `n_s`
/// wires without, jointly rather than separately.
pub fn advantage_separable_augment(n_e: usize, n_s: usize, r_e: f64) -> Result<f64> {
    if n_e == 0 || n_s == 0 {
        return Err(Error::Config(
            "both register sizes must be at least 1".into(),
        ));
    }
    let g = overhead_nme(n_e, r_e)?;
    Ok((g - 1.0) * ((1u64 << n_s) as f64 - 1.0))
}
