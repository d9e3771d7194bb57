//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nmecut::cli::main_with_args;
use nmecut::entangle::{
    advantage_separable_augment, composite_robustness_pure, nme_state, overhead_nme, SchmidtVector,
};
use nmecut::estimator::{estimate, EstimatorConfig};
use nmecut::gf::FieldContext;
use nmecut::mub::{audit, mub_unitary, phase_op, s_operator, MubFamily};
use nmecut::qcore::{
    expectation, max_abs_diff, max_entangled, CMatrix, Observable, Pauli, PauliString, PureState,
    QuantumChannel, Superoperator, Unitary,
};
use nmecut::qpd::{qpd_baseline, qpd_nme, qpd_streamlined, verify_identity, Qpd};
use nmecut::teleport::teleport_channel;

struct Outcome {
    passed: bool,
    detail: String,
}

fn gamma(n: usize, r: f64) -> f64 {
    2f64.powi(n as i32 + 1) / (r + 1.0) - 1.0
}

fn robustness_of(alpha: &[f64]) -> f64 {
    alpha.iter().sum::<f64>().powi(2) - 1.0
}

fn random_nme(n: usize, rng: &mut ChaCha8Rng) -> SchmidtVector {
    let cap = 2f64.powi(n as i32) - 1.0 - 0.05;
    loop {
        let a = SchmidtVector::random(n, rng);
        if robustness_of(a.values()) <= cap {
            return a;
        }
    }
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let letters: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
        if letters.iter().any(|p| *p != Pauli::I) {
            return PauliString::new(letters);
        }
    }
}

fn overhead_table() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(["nmecut", "overhead", "--table"], &mut out, &mut err);
    let elapsed = start.elapsed();
    if code != 0 {
        return Outcome {
            passed: false,
            detail: format!("exit code {code}"),
        };
    }
    let mut reader = csv::Reader::from_reader(out.as_slice());
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    let mut cells_seen = [false; 4];
    for rec in reader.records() {
        let rec = rec.expect("valid csv");
        let n: usize = rec[0].parse().unwrap();
        let r: f64 = rec[1].parse().unwrap();
        let without: f64 = rec[2].parse().unwrap();
        let with: f64 = rec[3].parse().unwrap();
        let expected_without = 2f64.powi(n as i32 + 1) - 1.0;
        worst = worst.max((without - expected_without).abs());
        worst = worst.max((with - gamma(n, r)).abs());
        if n == 1 {
            worst = worst
                .max((without - 3.0).abs())
                .max((with - (4.0 / (r + 1.0) - 1.0)).abs());
            cells_seen[0] = true;
            cells_seen[2] |= r > 0.0;
        } else {
            cells_seen[1] = true;
            cells_seen[3] |= r > 0.0;
        }
        rows += 1;
    }
    let passed =
        worst <= 1e-12 && cells_seen.iter().all(|&c| c) && elapsed < Duration::from_secs(1);
    Outcome {
        passed,
        detail: format!("{rows} rows, max error {worst:.1e}, {elapsed:.2?}"),
    }
}

fn nme_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc2);
    let mut worst_identity: f64 = 0.0;
    let mut worst_kappa: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..25 {
            let alpha = random_nme(n, &mut rng);
            let q = qpd_nme(n, &alpha).expect("valid decomposition");
            let report = verify_identity(&q).expect("verification runs");
            worst_identity = worst_identity.max(report.max_abs_error);
            worst_kappa =
                worst_kappa.max((q.kappa() - gamma(n, robustness_of(alpha.values()))).abs());
        }
    }
    let elapsed = start.elapsed();
    let passed =
        worst_identity <= 1e-10 && worst_kappa <= 1e-12 && elapsed < Duration::from_secs(60);
    Outcome {
        passed,
        detail: format!("75 decompositions, identity error {worst_identity:.1e}, kappa error {worst_kappa:.1e}, {elapsed:.2?}"),
    }
}

fn baseline_recovery() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut kappa_exact = true;
    for n in 1..=3 {
        let base = qpd_baseline(n).unwrap();
        let base_s = base.superoperator().unwrap();
        let expected = 2f64.powi(n as i32 + 1) - 1.0;
        let candidates: [Qpd; 2] = [
            qpd_nme(n, &SchmidtVector::separable(n).unwrap()).unwrap(),
            qpd_streamlined(n, 0, &SchmidtVector::separable(0).unwrap()).unwrap(),
        ];
        kappa_exact &= base.kappa() == expected;
        for q in &candidates {
            worst = worst.max(q.superoperator().unwrap().max_abs_diff(&base_s));
            kappa_exact &= q.kappa() == expected;
        }
    }
    Outcome {
        passed: worst <= 1e-10 && kappa_exact,
        detail: format!(
            "n = 1..3, superoperator difference {worst:.1e}, kappa exact: {kappa_exact}"
        ),
    }
}

fn mub_completeness() -> Outcome {
    let start = Instant::now();
    let mut worst_bias: f64 = 0.0;
    for n in 1..=4u32 {
        let fam = MubFamily::new(n).unwrap();
        let d = 1usize << n;
        let mut bases: Vec<CMatrix> = fam.unitaries().iter().map(|u| u.matrix().clone()).collect();
        bases.push(CMatrix::identity(d, d));
        assert_eq!(bases.len(), d + 1);
        for a in 0..bases.len() {
            for b in a + 1..bases.len() {
                let g = bases[a].adjoint() * &bases[b];
                for z in g.iter() {
                    worst_bias = worst_bias.max((z.norm_sqr() - 1.0 / d as f64).abs());
                }
            }
        }
    }
    let mut worst_lemma: f64 = 0.0;
    let mut worst_dephasing: f64 = 0.0;
    for n in 1..=3u32 {
        let ctx = FieldContext::new(n).unwrap();
        for j in ctx.elements() {
            let u = mub_unitary(&ctx, j);
            for k in ctx.elements() {
                let lhs = u.conjugate(phase_op(&ctx, k).matrix());
                worst_lemma = worst_lemma.max(max_abs_diff(&lhs, s_operator(&ctx, j, k).matrix()));
            }
        }
        let report = audit(n, 1e-10).unwrap();
        let dephasing = report
            .checks
            .iter()
            .find(|c| c.name == "dephasing")
            .expect("dephasing check");
        worst_dephasing = worst_dephasing.max(dephasing.max_error);
    }
    let elapsed = start.elapsed();
    let passed = worst_bias <= 1e-10
        && worst_lemma <= 1e-10
        && worst_dephasing <= 1e-10
        && elapsed < Duration::from_secs(120);
    Outcome {
        passed,
        detail: format!(
            "unbiasedness {worst_bias:.1e} (n ≤ 4), conjugation {worst_lemma:.1e}, dephasing {worst_dephasing:.1e} (n ≤ 3), {elapsed:.2?}"
        ),
    }
}

fn teleportation_channel() -> Outcome {
    let mut identity_err: f64 = 0.0;
    for n in 1..=2 {
        let ch = teleport_channel(&max_entangled(n).unwrap().to_density(), n).unwrap();
        identity_err =
            identity_err.max(ch.superoperator().max_abs_diff(&Superoperator::identity(n)));
    }

    // measure in the computational basis and re-prepare the outcome
    let ch = teleport_channel(&PureState::zero(2).to_density(), 1).unwrap();
    let mut dephase = CMatrix::zeros(4, 4);
    for j in 0..2 {
        let idx = j * 2 + j;
        dephase[(idx, idx)] = Complex64::new(1.0, 0.0);
    }
    let dephase_err = max_abs_diff(ch.superoperator().matrix(), &dephase);

    let mut rng = ChaCha8Rng::seed_from_u64(0xacc5);
    let mut flip_err: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..10 {
            let alpha = SchmidtVector::random(n, &mut rng);
            let ch = teleport_channel(&nme_state(&alpha).to_density(), n).unwrap();
            for (s, p) in ch.error_probs() {
                if s.letters().iter().any(|l| matches!(l, Pauli::X | Pauli::Y)) {
                    flip_err = flip_err.max(p.abs());
                }
            }
        }
    }
    let passed = identity_err <= 1e-12 && dephase_err <= 1e-12 && flip_err <= 1e-12;
    Outcome {
        passed,
        detail: format!(
            "identity {identity_err:.1e}, dephasing {dephase_err:.1e}, X/Y weight {flip_err:.1e}"
        ),
    }
}

fn monte_carlo_suite() -> Outcome {
    const SHOTS: u64 = 100_000;
    const REPS: u64 = 50;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc6);
    let mut configs = 0;
    let mut worst_fraction: f64 = 1.0;
    let mut worst_moment: f64 = 0.0;
    let mut seed = 1u64;
    for n in 1..=2usize {
        let builders: Vec<(&str, Qpd)> = vec![
            ("baseline", qpd_baseline(n).unwrap()),
            ("nme", qpd_nme(n, &random_nme(n, &mut rng)).unwrap()),
            (
                "streamlined",
                qpd_streamlined(n, n - 1, &SchmidtVector::random(n - 1, &mut rng)).unwrap(),
            ),
        ];
        for (_, q) in &builders {
            for _ in 0..5 {
                let input = PureState::random(n, &mut rng);
                let o = Observable::Pauli(random_pauli(n, &mut rng));
                let exact = expectation(&o, &input.to_density()).unwrap();
                let bound = 5.0 * q.kappa() / (SHOTS as f64).sqrt();
                let mut within = 0;
                for _ in 0..REPS {
                    let res = estimate(q, &input, &o, &EstimatorConfig::new(SHOTS, seed)).unwrap();
                    seed += 1;
                    if (res.estimate - exact).abs() <= bound {
                        within += 1;
                    }
                    let k2 = q.kappa() * q.kappa();
                    worst_moment = worst_moment.max((res.second_moment - k2).abs() / k2);
                }
                worst_fraction = worst_fraction.min(within as f64 / REPS as f64);
                configs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let passed =
        worst_fraction >= 0.95 && worst_moment <= 0.05 && elapsed < Duration::from_secs(300);
    Outcome {
        passed,
        detail: format!(
            "{configs} configurations x {REPS} seeds x {SHOTS} shots, worst coverage {:.0}%, second moment deviation {worst_moment:.1e}, {elapsed:.2?}",
            100.0 * worst_fraction
        ),
    }
}

/// `(U_A ⊗ U_B)|Ψ^α⟩` as a `2^k × 2^k` amplitude matrix.
fn factor_matrix(alpha: &SchmidtVector, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let k = alpha.n();
    let ua = Unitary::random(k, rng);
    let ub = Unitary::random(k, rng);
    let diag = DMatrix::from_fn(1 << k, 1 << k, |r, c| {
        if r == c {
            Complex64::new(alpha.values()[r], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ua.matrix() * diag * ub.matrix().transpose()
}

/// Robustness of a product of factors across the A|B cut, from singular values.
fn robustness_of_product(factors: &[DMatrix<Complex64>]) -> f64 {
    let m = factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f));
    let s: f64 = m.singular_values().iter().sum();
    s * s - 1.0
}

fn composite_overheads() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc7);
    let mut min_gap = f64::INFINITY;
    let mut worst_eq: f64 = 0.0;
    let mut worst_adv: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    for _ in 0..100 {
        let k1 = rng.random_range(1..=2usize);
        let k2 = rng.random_range(1..=2usize);
        let a = random_nme(k1, &mut rng);
        let b = random_nme(k2, &mut rng);
        let (ra, rb) = (robustness_of(a.values()), robustness_of(b.values()));

        // strict advantage of the joint cut
        let rc = composite_robustness_pure(&[a.clone(), b.clone()]).unwrap();
        let r_explicit =
            robustness_of_product(&[factor_matrix(&a, &mut rng), factor_matrix(&b, &mut rng)]);
        worst_r = worst_r.max((rc - r_explicit).abs());
        let separate = overhead_nme(k1, ra).unwrap() * overhead_nme(k2, rb).unwrap();
        let joint = overhead_nme(k1 + k2, rc).unwrap();
        min_gap = min_gap.min(separate - joint);
        worst_r = worst_r.max((separate - gamma(k1, ra) * gamma(k2, rb)).abs());

        // a maximally entangled factor changes nothing
        let m = rng.random_range(1..=2usize);
        let max = SchmidtVector::maximal(m).unwrap();
        let rm = composite_robustness_pure(&[a.clone(), max.clone()]).unwrap();
        let rm_explicit =
            robustness_of_product(&[factor_matrix(&a, &mut rng), factor_matrix(&max, &mut rng)]);
        worst_r = worst_r.max((rm - rm_explicit).abs());
        worst_eq = worst_eq.max((overhead_nme(k1 + m, rm).unwrap() - gamma(k1, ra)).abs());

        // separable augmentation
        let n_s = rng.random_range(1..=2usize);
        let sep = SchmidtVector::separable(n_s).unwrap();
        let rs = composite_robustness_pure(&[a.clone(), sep.clone()]).unwrap();
        let rs_explicit =
            robustness_of_product(&[factor_matrix(&a, &mut rng), factor_matrix(&sep, &mut rng)]);
        worst_r = worst_r.max((rs - rs_explicit).abs());
        let lhs = gamma(k1, ra) * gamma(n_s, 0.0) - gamma(k1 + n_s, rs_explicit);
        worst_adv = worst_adv.max((lhs - advantage_separable_augment(k1, n_s, ra).unwrap()).abs());
    }
    let passed = min_gap > 0.0 && worst_eq <= 1e-9 && worst_adv <= 1e-9 && worst_r <= 1e-9;
    Outcome {
        passed,
        detail: format!(
            "100 combinations, min joint advantage {min_gap:.3}, maximal-factor error {worst_eq:.1e}, augmentation error {worst_adv:.1e}, robustness cross-check {worst_r:.1e}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("overhead table", overhead_table),
        ("NME decomposition exactness", nme_exactness),
        ("baseline recovery", baseline_recovery),
        ("MUB completeness", mub_completeness),
        ("teleportation channel", teleportation_channel),
        ("Monte Carlo statistics", monte_carlo_suite),
        ("composite-state overheads", composite_overheads),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, o.detail);
        if !o.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("acceptance: all 7 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 7 criteria failed");
        ExitCode::FAILURE
    }
}
