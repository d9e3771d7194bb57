//! The complete set of 2^n + 1 mutually unbiased bases on n qubits, built
//! from the GF(2^n) phase and shift operators.
//!
//! Basis `j < 2^n` is the joint eigenbasis of the commuting family
//! `{S_{j,k}}_k` and is the column set of [`mub_unitary`]; the computational
//! basis plays the role of basis `2^n`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{FieldContext, GfElement};
use crate::qcore::{max_abs_diff, CMatrix, DensityOperator, Unitary, C0, C1};

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `Ẑ_k = Σ_l (−1)^{l⊙k} |l⟩⟨l|`.
pub fn phase_op(ctx: &FieldContext, k: GfElement) -> Unitary {
    let d = ctx.size();
    let mut m = CMatrix::from_element(d, d, C0);
    for l in 0..d {
        m[(l, l)] = Complex64::new(ctx.sign_of_product(l as u32, k.value()), 0.0);
    }
    Unitary::from_matrix_unchecked(m)
}

/// `X̂_k = Σ_l |l⟩⟨l ⊕ k|`.
pub fn shift_op(ctx: &FieldContext, k: GfElement) -> Unitary {
    let d = ctx.size();
    let mut m = CMatrix::from_element(d, d, C0);
    for l in 0..d {
        m[(l, l ^ k.value() as usize)] = C1;
    }
    Unitary::from_matrix_unchecked(m)
}

/// Exponent `e` (mod 4) with `s_{j,k} = i^e`. Each field element
/// `j ⊙ (k_r 2^r) ⊙ (k_t 2^t)` contributes its integer representation.
pub fn phase_exponent(ctx: &FieldContext, j: GfElement, k: GfElement) -> u32 {
    let n = ctx.n();
    let mut e = 0u32;
    for r in (0..n).filter(|&r| k.bit(r) == 1) {
        let jr = ctx.mul_raw(j.value(), 1 << r);
        for t in (0..n).filter(|&t| k.bit(t) == 1) {
            e = (e + ctx.mul_raw(jr, 1 << t)) & 3;
        }
    }
    e
}

/// `s_{j,k} = Π_{r,t} i^{j⊙(k_r 2^r)⊙(k_t 2^t)}`.
pub fn phase_factor(ctx: &FieldContext, j: GfElement, k: GfElement) -> Complex64 {
    I_POWERS[phase_exponent(ctx, j, k) as usize]
}

/// `S_{j,k} = s_{j,k} Ẑ_{j⊙k} X̂_k`.
pub fn s_operator(ctx: &FieldContext, j: GfElement, k: GfElement) -> Unitary {
    let z = phase_op(ctx, ctx.mul(j, k));
    let x = shift_op(ctx, k);
    let m = (z.matrix() * x.matrix()) * phase_factor(ctx, j, k);
    Unitary::from_matrix_unchecked(m)
}

/// `U_j` with columns `|e_l^j⟩ = 2^{−n/2} Σ_k (−1)^{l⊙k} conj(s_{j,k}) |k⟩`.
pub fn mub_unitary(ctx: &FieldContext, j: GfElement) -> Unitary {
    let d = ctx.size();
    let norm = 1.0 / (d as f64).sqrt();
    let conj_s: Vec<Complex64> = ctx
        .elements()
        .map(|k| phase_factor(ctx, j, k).conj() * norm)
        .collect();
    let m = CMatrix::from_fn(d, d, |k, l| {
        conj_s[k] * ctx.sign_of_product(l as u32, k as u32)
    });
    Unitary::from_matrix_unchecked(m)
}

/// The field plus the `2^n` basis-change unitaries `U_0 … U_{2^n−1}`.
#[derive(Debug, Clone)]
pub struct MubFamily {
    ctx: FieldContext,
    unitaries: Vec<Unitary>,
}

impl MubFamily {
    pub fn new(n: u32) -> Result<Self> {
        Ok(Self::from_field(FieldContext::new(n)?))
    }

    pub fn from_field(ctx: FieldContext) -> Self {
        let unitaries = ctx.elements().map(|j| mub_unitary(&ctx, j)).collect();
        MubFamily { ctx, unitaries }
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn n_qubits(&self) -> usize {
        self.ctx.n() as usize
    }

    pub fn unitaries(&self) -> &[Unitary] {
        &self.unitaries
    }

    pub fn unitary(&self, j: usize) -> &Unitary {
        &self.unitaries[j]
    }

    /// All `2^n + 1` basis matrices; the last one is the computational basis.
    pub fn bases(&self) -> Vec<CMatrix> {
        let d = self.ctx.size();
        self.unitaries
            .iter()
            .map(|u| u.matrix().clone())
            .chain(std::iter::once(CMatrix::identity(d, d)))
            .collect()
    }

    /// max over basis pairs and elements of `| |⟨e|f⟩|² − 2^{−n} |`.
    pub fn unbiasedness_error(&self) -> f64 {
        let bases = self.bases();
        let target = 1.0 / self.ctx.size() as f64;
        let mut worst: f64 = 0.0;
        for a in 0..bases.len() {
            for b in a + 1..bases.len() {
                let overlaps = bases[a].adjoint() * &bases[b];
                for z in overlaps.iter() {
                    worst = worst.max((z.norm_sqr() - target).abs());
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditCheck {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Result of [`audit`].
#[derive(Debug, Clone, Serialize)]
pub struct MubAudit {
    pub n: u32,
    pub checks: Vec<AuditCheck>,
}

impl MubAudit {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const MAX_AUDIT_QUBITS: u32 = 5;

/// Checks every structural property of the family for `n` qubits.
///
/// The dephasing check uses a fixed-seed random density operator.
pub fn audit(n: u32, tol: f64) -> Result<MubAudit> {
    if !(1..=MAX_AUDIT_QUBITS).contains(&n) {
        return Err(Error::Config(format!(
            "mub audit supports 1 ≤ n ≤ {MAX_AUDIT_QUBITS}, got {n}"
        )));
    }
    let fam = MubFamily::new(n)?;
    let ctx = fam.field();
    let d = ctx.size();
    let identity = CMatrix::identity(d, d);
    let mut checks = Vec::new();
    let mut push = |name: &str, max_error: f64| {
        checks.push(AuditCheck {
            name: name.to_string(),
            max_error,
            tolerance: tol,
            passed: max_error <= tol,
        });
    };

    let unitarity = fam
        .unitaries()
        .iter()
        .map(|u| max_abs_diff(&(u.matrix() * u.matrix().adjoint()), &identity))
        .fold(0.0, f64::max);
    push("unitarity", unitarity);
    push("mutual_unbiasedness", fam.unbiasedness_error());

    let zs: Vec<CMatrix> = ctx
        .elements()
        .map(|k| phase_op(ctx, k).into_matrix())
        .collect();
    let xs: Vec<CMatrix> = ctx
        .elements()
        .map(|k| shift_op(ctx, k).into_matrix())
        .collect();
    let mut commutation: f64 = 0.0;
    for a in ctx.elements() {
        for b in ctx.elements() {
            let lhs = &zs[a.value() as usize] * &xs[b.value() as usize];
            let rhs = (&xs[b.value() as usize] * &zs[a.value() as usize])
                .scale(ctx.sign_of_product(a.value(), b.value()));
            commutation = commutation.max(max_abs_diff(&lhs, &rhs));
        }
    }
    push("phase_shift_commutation", commutation);

    let mut conjugation: f64 = 0.0;
    let mut spectral: f64 = 0.0;
    let mut family_commutes: f64 = 0.0;
    let mut phase_square: f64 = 0.0;
    for j in ctx.elements() {
        let u = fam.unitary(j.value() as usize);
        let s_ops: Vec<CMatrix> = ctx
            .elements()
            .map(|k| s_operator(ctx, j, k).into_matrix())
            .collect();
        for k in ctx.elements() {
            let s = &s_ops[k.value() as usize];
            conjugation = conjugation.max(max_abs_diff(&u.conjugate(&zs[k.value() as usize]), s));
            let mut from_basis = CMatrix::from_element(d, d, C0);
            for l in 0..d {
                let e = u.matrix().column(l);
                from_basis += (&e * e.adjoint()).scale(ctx.sign_of_product(l as u32, k.value()));
            }
            spectral = spectral.max(max_abs_diff(&from_basis, s));
            for s2 in &s_ops {
                family_commutes = family_commutes.max(max_abs_diff(&(s * s2), &(s2 * s)));
            }
            let sq = phase_factor(ctx, j, k).powi(2);
            let expected = ctx.mul(ctx.mul(j, k), k).sign() as f64;
            phase_square = phase_square.max((sq - expected).norm());
        }
    }
    push("conjugated_phase_equals_s_operator", conjugation);
    push("s_operator_spectral_form", spectral);
    push("s_family_commutes", family_commutes);
    push("phase_factor_square", phase_square);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + u64::from(n));
    let rho = DensityOperator::random(n as usize, &mut rng);
    push("dephasing", dephasing_error(ctx, rho.matrix()));

    Ok(MubAudit { n, checks })
}

/// max over k ≠ 0 of the deviation between `2^{−n} Σ_j S_{j,k} ρ S_{j,k}`
/// (no adjoint on the right) and `Σ_l ⟨l|ρ|l⟩ |l⊕k⟩⟨l⊕k|`.
pub fn dephasing_error(ctx: &FieldContext, rho: &CMatrix) -> f64 {
    let d = ctx.size();
    let mut worst: f64 = 0.0;
    for k in ctx.elements().skip(1) {
        let mut lhs = CMatrix::from_element(d, d, C0);
        for j in ctx.elements() {
            let s = s_operator(ctx, j, k);
            lhs += s.matrix() * rho * s.matrix();
        }
        lhs.unscale_mut(d as f64);
        let mut rhs = CMatrix::from_element(d, d, C0);
        for l in 0..d {
            let t = l ^ k.value() as usize;
            rhs[(t, t)] = rho[(l, l)];
        }
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{kron, Pauli, PauliString};

    const TOL: f64 = 1e-10;

    fn field(n: u32) -> FieldContext {
        FieldContext::new(n).unwrap()
    }

    fn el(ctx: &FieldContext, v: u32) -> GfElement {
        ctx.element(v).unwrap()
    }

    #[test]
    fn single_qubit_operators_are_paulis() {
        let ctx = field(1);
        assert_eq!(phase_op(&ctx, el(&ctx, 1)).matrix(), &Pauli::Z.matrix());
        assert_eq!(shift_op(&ctx, el(&ctx, 1)).matrix(), &Pauli::X.matrix());
        for n in 1..=3 {
            let ctx = field(n);
            let id = CMatrix::identity(ctx.size(), ctx.size());
            assert_eq!(phase_op(&ctx, GfElement::ZERO).matrix(), &id);
            assert_eq!(shift_op(&ctx, GfElement::ZERO).matrix(), &id);
        }
    }

    #[test]
    fn shift_is_bitwise_xor_permutation() {
        let ctx = field(2);
        let xx = kron(&Pauli::X.matrix(), &Pauli::X.matrix());
        assert_eq!(shift_op(&ctx, el(&ctx, 3)).matrix(), &xx);
        for k in ctx.elements() {
            let m = shift_op(&ctx, k);
            for l in 0..4 {
                let col = l ^ k.value() as usize;
                assert_eq!(m.matrix()[(l, col)], C1);
            }
        }
    }

    #[test]
    fn phase_op_is_a_z_string() {
        for n in 1..=4 {
            let ctx = field(n);
            for a in ctx.elements() {
                let ap = ctx.phase_pauli_exponents(a);
                // bit i of the label sits on qubit n-1-i
                let letters = (0..n as usize)
                    .map(|q| {
                        if (ap >> (n as usize - 1 - q)) & 1 == 1 {
                            Pauli::Z
                        } else {
                            Pauli::I
                        }
                    })
                    .collect();
                let oracle = PauliString::new(letters).matrix();
                assert!(
                    max_abs_diff(phase_op(&ctx, a).matrix(), &oracle) < 1e-15,
                    "n={n} a={a}"
                );
            }
        }
    }

    #[test]
    fn phase_factor_examples() {
        let ctx = field(1);
        assert_eq!(
            phase_factor(&ctx, el(&ctx, 1), el(&ctx, 1)),
            Complex64::new(0.0, 1.0)
        );
        for n in 1..=3 {
            let ctx = field(n);
            for j in ctx.elements() {
                assert_eq!(phase_factor(&ctx, j, GfElement::ZERO), C1);
                for k in ctx.elements() {
                    assert!((phase_factor(&ctx, j, k).norm() - 1.0).abs() < 1e-15);
                    let expected = ctx.mul(ctx.mul(j, k), k).sign() as f64;
                    assert!((phase_factor(&ctx, j, k).powi(2) - expected).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn s_operator_examples() {
        let ctx = field(1);
        let i = Complex64::i();
        assert_eq!(
            s_operator(&ctx, el(&ctx, 0), el(&ctx, 1)).matrix(),
            &Pauli::X.matrix()
        );
        let izx = (Pauli::Z.matrix() * Pauli::X.matrix()) * i;
        assert!(max_abs_diff(s_operator(&ctx, el(&ctx, 1), el(&ctx, 1)).matrix(), &izx) < 1e-15);
        assert!(max_abs_diff(&izx, &-Pauli::Y.matrix()) < 1e-15);
        for n in 1..=3 {
            let ctx = field(n);
            let id = CMatrix::identity(ctx.size(), ctx.size());
            for j in ctx.elements() {
                assert_eq!(s_operator(&ctx, j, GfElement::ZERO).matrix(), &id);
            }
        }
    }

    #[test]
    fn first_basis_for_one_qubit_is_hadamard() {
        let ctx = field(1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(2, 2, &[s, s, s, -s].map(|v| Complex64::new(v, 0.0)));
        assert!(max_abs_diff(mub_unitary(&ctx, GfElement::ZERO).matrix(), &h) < 1e-15);
    }

    #[test]
    fn unitaries_are_unitary_and_unbiased() {
        for n in 1..=4 {
            let fam = MubFamily::new(n).unwrap();
            for u in fam.unitaries() {
                assert!(Unitary::new(u.matrix().clone()).is_ok());
            }
            assert!(fam.unbiasedness_error() < TOL, "n={n}");
            assert_eq!(fam.bases().len(), (1 << n) + 1);
        }
    }

    #[test]
    fn audit_passes_for_small_n() {
        for n in 1..=3 {
            let report = audit(n, TOL).unwrap();
            for c in &report.checks {
                assert!(c.passed, "n={n} {} error {:e}", c.name, c.max_error);
            }
        }
        assert!(audit(0, TOL).is_err());
    }

    #[test]
    fn dephasing_lemma_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 1..=3 {
            let ctx = field(n);
            for _ in 0..3 {
                let rho = DensityOperator::random(n as usize, &mut rng);
                assert!(dephasing_error(&ctx, rho.matrix()) < TOL);
            }
        }
    }

    #[test]
    fn s_operators_are_hermitian_involutions() {
        for n in 1..=3 {
            let ctx = field(n);
            let id = CMatrix::identity(ctx.size(), ctx.size());
            for j in ctx.elements() {
                for k in ctx.elements() {
                    let s = s_operator(&ctx, j, k);
                    assert!(max_abs_diff(s.matrix(), &s.matrix().adjoint()) < 1e-15);
                    assert!(max_abs_diff(&(s.matrix() * s.matrix()), &id) < 1e-15);
                }
            }
        }
    }
}
