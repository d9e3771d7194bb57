//! Quasiprobability decompositions of the `n`-wire identity channel.
//!
//! Terms are stored symbolically and expanded into channels on demand with
//! [`Qpd::term_channel`].

use std::sync::Arc;

use serde::Serialize;

use crate::entangle::{robustness_pure, SchmidtVector, ROBUSTNESS_SLACK};
use crate::error::{Error, Result};
use crate::gf::FieldContext;
use crate::mub::MubFamily;
use crate::qcore::{
    Branch, CMatrix, CVector, PureState, QuantumChannel, Superoperator, TrajectoryRule, C0,
};
use crate::teleport::nme_overlaps_in;

/// Largest number of cut wires supported by the builders.
pub const MAX_CUT_WIRES: usize = 4;

/// Largest `n` for which [`verify_identity`] builds superoperators.
pub const MAX_VERIFY_WIRES: usize = 4;

/// Distribution `Pr(k)` over the nonzero shifts `k`, stored with `prob[0] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionTable {
    n: usize,
    prob: Vec<f64>,
}

impl CorrectionTable {
    pub fn uniform(n: usize) -> Self {
        let d = 1usize << n;
        let mut prob = vec![1.0 / (d - 1) as f64; d];
        prob[0] = 0.0;
        CorrectionTable { n, prob }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Indexed by `k`; entry 0 is always zero.
    pub fn probs(&self) -> &[f64] {
        &self.prob
    }
}

/// `Pr(k|α) = (Σ_j (−1)^{k⊙j} α_j)² / (2^n − 1 − R)` for `k ≠ 0`.
pub fn prob_correction(alpha: &SchmidtVector) -> Result<CorrectionTable> {
    let n = alpha.n();
    if n == 0 {
        return Err(Error::InvalidSchmidt(
            "correction needs at least one qubit per side".into(),
        ));
    }
    let d = 1usize << n;
    let denom = (d - 1) as f64 - robustness_pure(alpha);
    if denom <= ROBUSTNESS_SLACK {
        return Err(Error::MaximallyEntangled);
    }
    let ctx = FieldContext::new(n as u32)?;
    let mut prob: Vec<f64> = nme_overlaps_in(&ctx, alpha)
        .iter()
        .map(|ov| ov * d as f64)
        .collect();
    prob[0] = 0.0;
    // the numerators sum to the denominator exactly; dividing by their sum is
    // better conditioned close to maximal entanglement
    let total: f64 = prob.iter().sum();
    debug_assert!((total - denom).abs() < 1e-8);
    prob.iter_mut().for_each(|p| *p /= total);
    Ok(CorrectionTable { n, prob })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum TermKind {
    /// Measure in basis `j`, re-prepare the outcome in basis `j`.
    MubMeasurePrepare { j: usize },
    /// `U_j (D ⊗ T_α)(U_j† φ U_j) U_j†` where `D` dephases the leading
    /// `separable_qubits` qubits and `T_α` teleports the rest through `|Ψ^α⟩`.
    TeleportConjugated {
        j: usize,
        alpha_e: SchmidtVector,
        separable_qubits: usize,
    },
    /// Measure `l`, prepare `|l ⊕ k⟩` with `k` drawn from the table.
    CorrectionMeasurePrepare { table: CorrectionTable },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QpdTerm {
    pub coefficient: f64,
    pub kind: TermKind,
}

/// `I^{⊗n} = Σ_i c_i F_i` with sampling table `p_i = |c_i|/κ`.
#[derive(Debug, Clone)]
pub struct Qpd {
    n: usize,
    terms: Vec<QpdTerm>,
    kappa: f64,
    probabilities: Vec<f64>,
    mub: Arc<MubFamily>,
}

impl Qpd {
    /// Assembles a decomposition from explicit terms. The coefficients are not
    /// required to sum to one, so that broken decompositions can be checked.
    pub fn from_terms(n: usize, terms: Vec<QpdTerm>, mub: Arc<MubFamily>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("decomposition has no terms".into()));
        }
        if mub.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mub.n_qubits(),
            });
        }
        let kappa: f64 = terms.iter().map(|t| t.coefficient.abs()).sum();
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::Config(format!("invalid overhead {kappa}")));
        }
        let probabilities = terms.iter().map(|t| t.coefficient.abs() / kappa).collect();
        Ok(Qpd {
            n,
            terms,
            kappa,
            probabilities,
            mub,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[QpdTerm] {
        &self.terms
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn sign(&self, i: usize) -> f64 {
        if self.terms[i].coefficient < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient).sum()
    }

    pub fn mub(&self) -> &MubFamily {
        &self.mub
    }

    /// Returns a copy with one coefficient replaced.
    pub fn with_coefficient(&self, i: usize, c: f64) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms
            .get_mut(i)
            .ok_or_else(|| Error::Config(format!("no term {i}")))?
            .coefficient = c;
        Qpd::from_terms(self.n, terms, self.mub.clone())
    }

    /// The channel `F_i` of term `i`.
    pub fn term_channel(&self, i: usize) -> Result<TermChannel> {
        let n = self.n;
        let d = 1usize << n;
        let conj = |j: usize| -> Result<CMatrix> {
            if j >= d {
                return Err(Error::Config(format!("basis index {j} out of range")));
            }
            Ok(self.mub.unitary(j).matrix().clone())
        };
        match &self.terms[i].kind {
            TermKind::MubMeasurePrepare { j } => Ok(TermChannel {
                n,
                conj: Some(conj(*j)?),
                inner: Inner::dephase_and_phase(n, n, vec![1.0], vec![vec![1.0]]),
            }),
            TermKind::TeleportConjugated {
                j,
                alpha_e,
                separable_qubits,
            } => {
                let n_s = *separable_qubits;
                let n_e = alpha_e.n();
                if n_s + n_e != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: n_s + n_e,
                    });
                }
                let (ov, signs) = if n_e == 0 {
                    (vec![1.0], vec![vec![1.0]])
                } else {
                    let ctx = FieldContext::new(n_e as u32)?;
                    let de = ctx.size() as u32;
                    let signs = (0..de)
                        .map(|k| (0..de).map(|l| ctx.sign_of_product(l, k)).collect())
                        .collect();
                    (nme_overlaps_in(&ctx, alpha_e), signs)
                };
                Ok(TermChannel {
                    n,
                    conj: Some(conj(*j)?),
                    inner: Inner::dephase_and_phase(n, n_s, ov, signs),
                })
            }
            TermKind::CorrectionMeasurePrepare { table } => {
                if table.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: table.n(),
                    });
                }
                Ok(TermChannel {
                    n,
                    conj: None,
                    inner: Inner::Shift {
                        prob: table.probs().to_vec(),
                    },
                })
            }
        }
    }

    /// `Σ_i c_i S(F_i)`.
    pub fn superoperator(&self) -> Result<Superoperator> {
        let mut total: Option<CMatrix> = None;
        for (i, term) in self.terms.iter().enumerate() {
            let s = self
                .term_channel(i)?
                .superoperator()
                .scale(term.coefficient);
            total = Some(match total {
                None => s.matrix().clone(),
                Some(acc) => acc + s.matrix(),
            });
        }
        Superoperator::new(self.n, total.expect("at least one term"))
    }
}

fn check_wires(n: usize) -> Result<()> {
    if !(1..=MAX_CUT_WIRES).contains(&n) {
        return Err(Error::Config(format!(
            "number of cut wires must be in 1..={MAX_CUT_WIRES}, got {n}"
        )));
    }
    Ok(())
}

/// Decomposition without entanglement: `2^n` MUB measure-and-prepare terms and
/// a uniform correction, `κ = 2^{n+1} − 1`.
pub fn qpd_baseline(n: usize) -> Result<Qpd> {
    check_wires(n)?;
    let d = 1usize << n;
    let mut terms: Vec<QpdTerm> = (0..d)
        .map(|j| QpdTerm {
            coefficient: 1.0,
            kind: TermKind::MubMeasurePrepare { j },
        })
        .collect();
    terms.push(QpdTerm {
        coefficient: -((d - 1) as f64),
        kind: TermKind::CorrectionMeasurePrepare {
            table: CorrectionTable::uniform(n),
        },
    });
    Qpd::from_terms(n, terms, Arc::new(MubFamily::new(n as u32)?))
}

fn teleport_terms(d: usize, alpha_e: &SchmidtVector, n_s: usize, c: f64) -> Vec<QpdTerm> {
    (0..d)
        .map(|j| QpdTerm {
            coefficient: c,
            kind: TermKind::TeleportConjugated {
                j,
                alpha_e: alpha_e.clone(),
                separable_qubits: n_s,
            },
        })
        .collect()
}

/// Decomposition using `|Ψ^α⟩` resources, `κ = 2^{n+1}/(R+1) − 1`. A maximally
/// entangled `α` gives plain teleportation without a correction term.
pub fn qpd_nme(n: usize, alpha: &SchmidtVector) -> Result<Qpd> {
    check_wires(n)?;
    if alpha.n() != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: alpha.dim(),
        });
    }
    let d = 1usize << n;
    let mub = Arc::new(MubFamily::new(n as u32)?);
    let r = robustness_pure(alpha);
    let terms = match prob_correction(alpha) {
        Ok(table) => {
            let mut terms = teleport_terms(d, alpha, 0, 1.0 / (r + 1.0));
            terms.push(QpdTerm {
                coefficient: -(d as f64 / (r + 1.0) - 1.0),
                kind: TermKind::CorrectionMeasurePrepare { table },
            });
            terms
        }
        Err(Error::MaximallyEntangled) => teleport_terms(d, alpha, 0, 1.0 / d as f64),
        Err(e) => return Err(e),
    };
    Qpd::from_terms(n, terms, mub)
}

/// Decomposition with an entangled resource on only `n_e` of the `n` wires.
/// The remaining `n − n_e` wires occupy the leading register positions and are
/// measured and re-prepared instead of teleported. `n_e = 0` (with `α_e = (1)`)
/// reproduces [`qpd_baseline`].
pub fn qpd_streamlined(n: usize, n_e: usize, alpha_e: &SchmidtVector) -> Result<Qpd> {
    check_wires(n)?;
    if n_e >= n {
        return Err(Error::Config(format!(
            "entangled wires must be fewer than {n}, got {n_e}"
        )));
    }
    if alpha_e.n() != n_e {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_e,
            found: alpha_e.dim(),
        });
    }
    let d = 1usize << n;
    let n_s = n - n_e;
    let r = robustness_pure(alpha_e);
    let mut terms = teleport_terms(d, alpha_e, n_s, 1.0 / (r + 1.0));
    terms.push(QpdTerm {
        coefficient: -(d as f64 / (r + 1.0) - 1.0),
        kind: TermKind::CorrectionMeasurePrepare {
            table: prob_correction(&alpha_e.embed(n)?)?,
        },
    });
    Qpd::from_terms(n, terms, Arc::new(MubFamily::new(n as u32)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub kappa: f64,
    pub terms: usize,
    pub coefficient_sum: f64,
    pub max_abs_error: f64,
}

/// Largest entry of `Σ_i c_i S(F_i) − 1`.
pub fn verify_identity(qpd: &Qpd) -> Result<IdentityReport> {
    if qpd.n() > MAX_VERIFY_WIRES {
        return Err(Error::Config(format!(
            "verification supports n ≤ {MAX_VERIFY_WIRES}"
        )));
    }
    let s = qpd.superoperator()?;
    Ok(IdentityReport {
        n: qpd.n(),
        kappa: qpd.kappa(),
        terms: qpd.terms().len(),
        coefficient_sum: qpd.coefficient_sum(),
        max_abs_error: s.max_abs_diff(&Superoperator::identity(qpd.n())),
    })
}

#[derive(Debug, Clone)]
enum Inner {
    /// Dephase the leading `n_s` qubits, apply `Ẑ_k` with probability `ov[k]`
    /// on the trailing `n_e` qubits.
    DephaseAndPhase {
        n_e: usize,
        ov: Vec<f64>,
        signs: Vec<Vec<f64>>,
        mask: CMatrix,
    },
    /// Measure `l`, prepare `|l ⊕ k⟩` with probability `prob[k]`.
    Shift { prob: Vec<f64> },
}

impl Inner {
    fn dephase_and_phase(n: usize, n_s: usize, ov: Vec<f64>, signs: Vec<Vec<f64>>) -> Inner {
        let n_e = n - n_s;
        let de = 1usize << n_e;
        let d = 1usize << n;
        let mask = CMatrix::from_fn(d, d, |a, b| {
            if a >> n_e != b >> n_e {
                return C0;
            }
            let (ae, be) = (a & (de - 1), b & (de - 1));
            let m: f64 = ov.iter().zip(&signs).map(|(p, s)| p * s[ae] * s[be]).sum();
            m.into()
        });
        Inner::DephaseAndPhase {
            n_e,
            ov,
            signs,
            mask,
        }
    }
}

/// A QPD term expanded into a channel `X ↦ U · inner(U† X U) · U†`.
#[derive(Debug, Clone)]
pub struct TermChannel {
    n: usize,
    conj: Option<CMatrix>,
    inner: Inner,
}

impl QuantumChannel for TermChannel {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn apply_operator(&self, op: &CMatrix) -> CMatrix {
        let y = match &self.conj {
            Some(u) => u.adjoint() * op * u,
            None => op.clone(),
        };
        let z = match &self.inner {
            Inner::DephaseAndPhase { mask, .. } => y.component_mul(mask),
            Inner::Shift { prob } => {
                let d = y.nrows();
                let mut out = CMatrix::zeros(d, d);
                for l in 0..d {
                    for (k, p) in prob.iter().enumerate() {
                        out[(l ^ k, l ^ k)] += y[(l, l)] * *p;
                    }
                }
                out
            }
        };
        match &self.conj {
            Some(u) => u * z * u.adjoint(),
            None => z,
        }
    }
}

impl TrajectoryRule for TermChannel {
    fn branches(&self, psi: &PureState) -> Vec<Branch> {
        let v = match &self.conj {
            Some(u) => u.adjoint() * psi.amplitudes(),
            None => psi.amplitudes().clone(),
        };
        let d = v.len();
        let mut out = Vec::new();
        match &self.inner {
            Inner::DephaseAndPhase { n_e, ov, signs, .. } => {
                let de = 1usize << n_e;
                for s in 0..d / de {
                    let block = v.rows(s * de, de);
                    let p_s = block.norm_squared();
                    if p_s <= 0.0 {
                        continue;
                    }
                    let norm = p_s.sqrt();
                    for (k, &p_k) in ov.iter().enumerate() {
                        if p_k <= 0.0 {
                            continue;
                        }
                        let mut w = CVector::from_element(d, C0);
                        for e in 0..de {
                            w[s * de + e] = block[e] * (signs[k][e] / norm);
                        }
                        let w = match &self.conj {
                            Some(u) => u * w,
                            None => w,
                        };
                        out.push(Branch {
                            probability: p_s * p_k,
                            state: PureState::from_vector_unchecked(w),
                        });
                    }
                }
            }
            Inner::Shift { prob } => {
                // outcome m = l ⊕ k collects Σ_l |ψ_l|² Pr(l ⊕ m)
                let pl: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
                for m in 0..d {
                    let q: f64 = pl.iter().enumerate().map(|(l, p)| p * prob[l ^ m]).sum();
                    if q > 0.0 {
                        out.push(Branch {
                            probability: q,
                            state: PureState::basis(self.n, m),
                        });
                    }
                }
            }
        }
        out
    }
}
