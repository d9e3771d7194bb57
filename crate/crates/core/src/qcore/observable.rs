use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    hermitian_deviation, kron, sample_index, CMatrix, DensityOperator, PureState, C0, C1,
    VALIDATION_TOL,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let i = Complex64::i();
        let m = match self {
            Pauli::I => [C1, C0, C0, C1],
            Pauli::X => [C0, C1, C1, C0],
            Pauli::Y => [C0, -i, i, C0],
            Pauli::Z => [C1, C0, C0, -C1],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }

    /// Columns are the eigenvectors for eigenvalues (+1, −1); identity for I.
    fn eigenbasis(self) -> CMatrix {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let is = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        match self {
            Pauli::I | Pauli::Z => CMatrix::identity(2, 2),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[s, s, s, -s]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[s, s, is, -is]),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis; letter 0 acts on qubit 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { letters }
    }

    pub fn identity(n: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; n],
        }
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    /// All `4^n` strings in lexicographic I < X < Y < Z order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |mut code| {
            let mut letters = vec![Pauli::I; n];
            for slot in letters.iter_mut().rev() {
                *slot = Pauli::ALL[code & 3];
                code >>= 2;
            }
            PauliString { letters }
        })
    }

    /// True when every letter is I or Z.
    pub fn is_diagonal(&self) -> bool {
        self.letters
            .iter()
            .all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn matrix(&self) -> CMatrix {
        self.letters
            .iter()
            .fold(CMatrix::identity(1, 1), |acc, p| kron(&acc, &p.matrix()))
    }

    fn eigenbasis(&self) -> CMatrix {
        self.letters.iter().fold(CMatrix::identity(1, 1), |acc, p| {
            kron(&acc, &p.eigenbasis())
        })
    }

    /// Eigenvalue attached to column `b` of the product eigenbasis.
    fn eigenvalue(&self, b: usize) -> f64 {
        let n = self.letters.len();
        let parity = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .fold(0, |acc, (q, _)| acc ^ ((b >> (n - 1 - q)) & 1));
        if parity == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().map(|p| p.as_char()).collect();
        f.write_str(&s)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("'{other}' is not a Pauli letter"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        Ok(PauliString { letters })
    }
}

/// Eigen-decomposition of an observable: `O = Σ_b values[b] |v_b⟩⟨v_b|`
/// with `v_b` the columns of `basis`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub basis: CMatrix,
}

impl Spectrum {
    /// Outcome distribution `(λ, Pr(λ))` for a pure state, with equal
    /// eigenvalues merged.
    pub fn distribution_pure(&self, psi: &PureState) -> Vec<(f64, f64)> {
        let overlaps = self.basis.ad_mul(psi.amplitudes());
        merge_outcomes(
            self.values
                .iter()
                .zip(overlaps.iter())
                .map(|(&v, a)| (v, a.norm_sqr())),
        )
    }

    pub fn distribution(&self, rho: &DensityOperator) -> Vec<(f64, f64)> {
        let rotated = self.basis.adjoint() * rho.matrix() * &self.basis;
        merge_outcomes(
            self.values
                .iter()
                .enumerate()
                .map(|(b, &v)| (v, rotated[(b, b)].re.max(0.0))),
        )
    }
}

fn merge_outcomes(pairs: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (v, p) in pairs {
        match out.iter_mut().find(|(u, _)| (u - v).abs() < 1e-9) {
            Some(slot) => slot.1 += p,
            None => out.push((v, p)),
        }
    }
    out
}

/// A measured quantity: a Pauli string or an explicit Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Pauli(PauliString),
    Hermitian(CMatrix),
}

impl Observable {
    pub fn pauli(s: &str) -> Result<Self> {
        Ok(Observable::Pauli(s.parse()?))
    }

    pub fn hermitian(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotHermitian(f64::INFINITY));
        }
        super::qubits_for_dim(m.nrows())?;
        let dev = hermitian_deviation(&m);
        if dev > VALIDATION_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Observable::Hermitian(m))
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Observable::Pauli(p) => p.n_qubits(),
            Observable::Hermitian(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            Observable::Pauli(p) => p.matrix(),
            Observable::Hermitian(m) => m.clone(),
        }
    }

    /// Pauli strings are diagonalized by per-qubit basis rotations; explicit
    /// matrices by a Hermitian eigensolver.
    pub fn spectrum(&self) -> Spectrum {
        match self {
            Observable::Pauli(p) => Spectrum {
                values: (0..1usize << p.n_qubits())
                    .map(|b| p.eigenvalue(b))
                    .collect(),
                basis: p.eigenbasis(),
            },
            Observable::Hermitian(m) => {
                let eig = SymmetricEigen::new(m.clone());
                Spectrum {
                    values: eig.eigenvalues.iter().copied().collect(),
                    basis: eig.eigenvectors,
                }
            }
        }
    }

    fn check_dim(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits() != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n_qubits(),
                found: 1 << n_qubits,
            });
        }
        Ok(())
    }
}

/// `tr[O ρ]`.
pub fn expectation(o: &Observable, rho: &DensityOperator) -> Result<f64> {
    o.check_dim(rho.n_qubits())?;
    if let Observable::Hermitian(m) = o {
        let dev = hermitian_deviation(m);
        if dev > VALIDATION_TOL {
            return Err(Error::NotHermitian(dev));
        }
    }
    Ok((o.matrix() * rho.matrix()).trace().re)
}

/// Samples an eigenvalue of `O` with Born-rule probability `tr[Π_λ ρ]`.
pub fn born_sample<R: Rng + ?Sized>(
    o: &Observable,
    rho: &DensityOperator,
    rng: &mut R,
) -> Result<f64> {
    o.check_dim(rho.n_qubits())?;
    let dist = o.spectrum().distribution(rho);
    let probs: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
    Ok(dist[sample_index(&probs, rng)].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{max_abs_diff, max_entangled};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "ixYz".parse().unwrap();
        assert_eq!(p.to_string(), "IXYZ");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
        assert_eq!(PauliString::all(2).count(), 16);
        assert_eq!(
            PauliString::all(1)
                .map(|p| p.to_string())
                .collect::<Vec<_>>(),
            ["I", "X", "Y", "Z"]
        );
    }

    #[test]
    fn expectation_examples() {
        let z = Observable::pauli("Z").unwrap();
        let x = Observable::pauli("X").unwrap();
        assert!((expectation(&z, &PureState::zero(1).to_density()).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation(&x, &PureState::plus(1).to_density()).unwrap() - 1.0).abs() < 1e-15);
        let zz = Observable::pauli("ZZ").unwrap();
        let phi = max_entangled(1).unwrap().to_density();
        assert!((expectation(&zz, &phi).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&zz, &PureState::zero(1).to_density()).is_err());
    }

    #[test]
    fn non_hermitian_observable_is_rejected() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C1;
        assert!(matches!(
            Observable::hermitian(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn pauli_spectrum_reconstructs_matrix() {
        for p in PauliString::all(2) {
            let o = Observable::Pauli(p.clone());
            let s = o.spectrum();
            let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                s.values.len(),
                s.values.iter().map(|&v| Complex64::new(v, 0.0)),
            ));
            let rebuilt = &s.basis * diag * s.basis.adjoint();
            assert!(max_abs_diff(&rebuilt, &p.matrix()) < 1e-14, "{p}");
        }
    }

    #[test]
    fn born_sample_deterministic_and_fair_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = Observable::pauli("Z").unwrap();
        let zero = PureState::zero(1).to_density();
        for _ in 0..100 {
            assert_eq!(born_sample(&z, &zero, &mut rng).unwrap(), 1.0);
        }
        let plus = PureState::plus(1).to_density();
        let shots = 20_000;
        let ups = (0..shots)
            .filter(|_| born_sample(&z, &plus, &mut rng).unwrap() > 0.0)
            .count();
        let frac = ups as f64 / shots as f64;
        assert!((frac - 0.5).abs() < 5.0 * (0.25 / shots as f64).sqrt());
    }

    #[test]
    fn born_sample_mean_converges_to_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for obs in [Observable::pauli("XY").unwrap(), {
            let r = DensityOperator::random(2, &mut rng);
            Observable::hermitian(r.matrix().clone() * Complex64::new(3.0, 0.0)).unwrap()
        }] {
            let rho = DensityOperator::random(2, &mut rng);
            let exact = expectation(&obs, &rho).unwrap();
            let shots = 100_000;
            let samples: Vec<f64> = (0..shots)
                .map(|_| born_sample(&obs, &rho, &mut rng).unwrap())
                .collect();
            let mean = samples.iter().sum::<f64>() / shots as f64;
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (shots - 1) as f64;
            assert!((mean - exact).abs() <= 5.0 * (var / shots as f64).sqrt() + 1e-12);
        }
    }
}
