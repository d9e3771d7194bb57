//! Monte Carlo estimation of `tr[O φ]` through a quasiprobability decomposition
//! of the identity.
//!
//! Shots are grouped in fixed chunks of [`CHUNK_SHOTS`]. Chunk `c` draws from
//! ChaCha8 stream `c` of the configured seed, so results do not depend on the
//! number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{
    apply_channel, born_sample, sample_index, Observable, PureState, TrajectoryRule,
};
use crate::qpd::Qpd;

pub const CHUNK_SHOTS: u64 = 1024;

/// Stream reserved for the uncut reference measurement.
const REFERENCE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Follow pure-state branches of each term.
    #[default]
    Trajectory,
    /// Apply each term's channel to the density operator.
    Density,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Trajectory => "trajectory",
            Mode::Density => "density",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trajectory" => Ok(Mode::Trajectory),
            "density" => Ok(Mode::Density),
            _ => Err(Error::Parse(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub shots: u64,
    pub seed: u64,
    pub mode: Mode,
    pub workers: usize,
}

impl EstimatorConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        EstimatorConfig {
            shots,
            seed,
            mode: Mode::Trajectory,
            workers: 1,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub estimate: f64,
    pub std_error: f64,
    pub kappa: f64,
    pub shots_used: u64,
    /// Shots spent on each term, in term order.
    pub term_counts: Vec<u64>,
    /// Mean of the squared per-shot outputs.
    pub second_moment: f64,
}

/// Draws a term index with probability `|c_i|/κ` and returns it with `sign(c_i)`.
pub fn sample_term<R: Rng + ?Sized>(qpd: &Qpd, rng: &mut R) -> (usize, f64) {
    let i = sample_index(qpd.probabilities(), rng);
    (i, qpd.sign(i))
}

fn check_inputs(qpd: &Qpd, input: &PureState, observable: &Observable) -> Result<()> {
    if input.n_qubits() != qpd.n() {
        return Err(Error::DimensionMismatch {
            expected: 1 << qpd.n(),
            found: input.dim(),
        });
    }
    if observable.n_qubits() != qpd.n() {
        return Err(Error::DimensionMismatch {
            expected: 1 << qpd.n(),
            found: 1 << observable.n_qubits(),
        });
    }
    Ok(())
}

/// One shot of term `term`: run its channel on `input`, measure `observable`,
/// return `sign · κ · λ`.
pub fn run_shot<R: Rng + ?Sized>(
    qpd: &Qpd,
    term: usize,
    input: &PureState,
    observable: &Observable,
    mode: Mode,
    rng: &mut R,
) -> Result<f64> {
    check_inputs(qpd, input, observable)?;
    if term >= qpd.terms().len() {
        return Err(Error::Config(format!("no term {term}")));
    }
    let ch = qpd.term_channel(term)?;
    let eigenvalue = match mode {
        Mode::Trajectory => {
            let branches = ch.branches(input);
            let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
            let state = &branches[sample_index(&probs, rng)].state;
            let dist = observable.spectrum().distribution_pure(state);
            let probs: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
            dist[sample_index(&probs, rng)].0
        }
        Mode::Density => {
            let rho = apply_channel(&ch, &input.to_density())?;
            born_sample(observable, &rho, rng)?
        }
    };
    Ok(qpd.sign(term) * qpd.kappa() * eigenvalue)
}

/// Outcome table for one branch: eigenvalues and their probabilities.
#[derive(Debug, Clone)]
struct Outcomes {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl Outcomes {
    fn from_pairs(pairs: Vec<(f64, f64)>) -> Self {
        let (values, probs) = pairs.into_iter().unzip();
        Outcomes { values, probs }
    }
}

/// Per-term branch and outcome tables, computed once per estimate.
#[derive(Debug, Clone)]
struct ShotPlan {
    term_probs: Vec<f64>,
    weights: Vec<f64>,
    branch_probs: Vec<Vec<f64>>,
    outcomes: Vec<Vec<Outcomes>>,
}

impl ShotPlan {
    fn new(qpd: &Qpd, input: &PureState, observable: &Observable, mode: Mode) -> Result<Self> {
        let spectrum = observable.spectrum();
        let mut branch_probs = Vec::new();
        let mut outcomes = Vec::new();
        for i in 0..qpd.terms().len() {
            let ch = qpd.term_channel(i)?;
            match mode {
                Mode::Trajectory => {
                    let branches = ch.branches(input);
                    branch_probs.push(branches.iter().map(|b| b.probability).collect());
                    outcomes.push(
                        branches
                            .iter()
                            .map(|b| Outcomes::from_pairs(spectrum.distribution_pure(&b.state)))
                            .collect(),
                    );
                }
                Mode::Density => {
                    let rho = apply_channel(&ch, &input.to_density())?;
                    branch_probs.push(vec![1.0]);
                    outcomes.push(vec![Outcomes::from_pairs(spectrum.distribution(&rho))]);
                }
            }
        }
        let weights = (0..qpd.terms().len())
            .map(|i| qpd.sign(i) * qpd.kappa())
            .collect();
        Ok(ShotPlan {
            term_probs: qpd.probabilities().to_vec(),
            weights,
            branch_probs,
            outcomes,
        })
    }

    fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let t = sample_index(&self.term_probs, rng);
        let b = sample_index(&self.branch_probs[t], rng);
        let o = &self.outcomes[t][b];
        (t, self.weights[t] * o.values[sample_index(&o.probs, rng)])
    }
}

#[derive(Debug, Clone)]
struct ChunkSum {
    sum: f64,
    sum_sq: f64,
    counts: Vec<u64>,
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_chunk(plan: &ShotPlan, seed: u64, chunk: u64, shots: u64) -> ChunkSum {
    let mut rng = chunk_rng(seed, chunk);
    let mut acc = ChunkSum {
        sum: 0.0,
        sum_sq: 0.0,
        counts: vec![0; plan.term_probs.len()],
    };
    for _ in 0..shots {
        let (t, v) = plan.shot(&mut rng);
        acc.sum += v;
        acc.sum_sq += v * v;
        acc.counts[t] += 1;
    }
    acc
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Unbiased estimate of `tr[O φ]` (the decomposed channel is the identity).
pub fn estimate(
    qpd: &Qpd,
    input: &PureState,
    observable: &Observable,
    cfg: &EstimatorConfig,
) -> Result<EstimateResult> {
    cfg.validate()?;
    check_inputs(qpd, input, observable)?;
    let plan = ShotPlan::new(qpd, input, observable, cfg.mode)?;
    let n_chunks = cfg.shots.div_ceil(CHUNK_SHOTS);
    let chunk_len = |c: u64| CHUNK_SHOTS.min(cfg.shots - c * CHUNK_SHOTS);
    let chunks: Vec<ChunkSum> = in_pool(cfg.workers, || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| run_chunk(&plan, cfg.seed, c, chunk_len(c)))
            .collect()
    })?;

    let mut total = ChunkSum {
        sum: 0.0,
        sum_sq: 0.0,
        counts: vec![0; qpd.terms().len()],
    };
    for c in &chunks {
        total.sum += c.sum;
        total.sum_sq += c.sum_sq;
        for (a, b) in total.counts.iter_mut().zip(&c.counts) {
            *a += b;
        }
    }
    let n = cfg.shots as f64;
    let mean = total.sum / n;
    let second_moment = total.sum_sq / n;
    let std_error = if cfg.shots > 1 {
        let var = ((second_moment - mean * mean) * n / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(EstimateResult {
        estimate: mean,
        std_error,
        kappa: qpd.kappa(),
        shots_used: cfg.shots,
        term_counts: total.counts,
        second_moment,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverheadReport {
    /// Per-shot second moment of the cut estimator over that of the uncut measurement.
    pub ratio: f64,
    pub kappa_squared: f64,
    pub cut_second_moment: f64,
    pub uncut_second_moment: f64,
}

/// Measures the variance inflation of the cut estimator as a ratio of
/// per-shot second moments.
pub fn empirical_overhead(
    qpd: &Qpd,
    input: &PureState,
    observable: &Observable,
    cfg: &EstimatorConfig,
    baseline_shots: u64,
) -> Result<OverheadReport> {
    if baseline_shots == 0 {
        return Err(Error::Config("baseline shots must be at least 1".into()));
    }
    let cut = estimate(qpd, input, observable, cfg)?;
    let dist = observable.spectrum().distribution_pure(input);
    let probs: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
    let mut rng = chunk_rng(cfg.seed, REFERENCE_STREAM);
    let mut sum_sq = 0.0;
    for _ in 0..baseline_shots {
        let v = dist[sample_index(&probs, &mut rng)].0;
        sum_sq += v * v;
    }
    let uncut = sum_sq / baseline_shots as f64;
    if uncut <= 0.0 {
        return Err(Error::Config(
            "observable has zero second moment on this input".into(),
        ));
    }
    Ok(OverheadReport {
        ratio: cut.second_moment / uncut,
        kappa_squared: qpd.kappa() * qpd.kappa(),
        cut_second_moment: cut.second_moment,
        uncut_second_moment: uncut,
    })
}
