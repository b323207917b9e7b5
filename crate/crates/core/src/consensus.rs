//! Linear averaging consensus on connected threshold graphs.
//!
//! Every node replaces its opinion by the plain average of its own opinion and
//! its neighbours'. On a realisation with `z_n = 1` the averaging matrix `W`
//! is stochastic, irreducible and aperiodic, with stationary vector
//! `π*_i = N_i / Σ_k N_k` where `N_i` is the neighbour count plus one. The
//! consensus value is `π*·x(0)`; averaging `π*` over the urn law gives the
//! expected consensus weights `π^(E)`.

use crate::error::{Error, Result};
use crate::exec::{map_chunks, Execution};
use crate::graph::ThresholdGraph;
use crate::oracle::DEFAULT_ENUMERATION_LIMIT;
use crate::rng;
use crate::special::CompensatedSum;
use crate::urn::{DrawLaw, FiniteMemoryParams, LawKind, UrnParams};

const RUN_CHUNK: u64 = 256;
const ENUM_CHUNK: u64 = 1 << 12;

/// `N_i = 1 + Σ_{j≠i} z_max(i,j)` for every node.
pub fn neighbor_counts(z: &[u8]) -> Vec<usize> {
    let n = z.len();
    let mut later = 0;
    let mut counts = vec![0; n];
    for i in (0..n).rev() {
        counts[i] = 1 + i * usize::from(z[i]) + later;
        later += usize::from(z[i]);
    }
    counts
}

/// `π*` computed from the neighbour counts.
pub fn stationary_from_draws(z: &[u8]) -> Vec<f64> {
    let counts = neighbor_counts(z);
    let total: usize = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// The averaging system of one connected realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSystem {
    graph: ThresholdGraph,
    weights: Vec<f64>,
    neighbor_counts: Vec<usize>,
    pi_star: Vec<f64>,
}

impl ConsensusSystem {
    /// Fails with [`Error::Disconnected`] unless the last node is universal.
    pub fn new(graph: &ThresholdGraph) -> Result<Self> {
        if !graph.last_is_universal() {
            return Err(Error::Disconnected);
        }
        let z = graph.sequence().as_slice();
        let n = z.len();
        let counts = neighbor_counts(z);
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            let inv = 1.0 / counts[i] as f64;
            for j in 0..n {
                if i == j || z[i.max(j)] == 1 {
                    weights[i * n + j] = inv;
                }
            }
        }
        let pi_star = stationary_from_draws(z);
        Ok(Self { graph: graph.clone(), weights, neighbor_counts: counts, pi_star })
    }

    pub fn n(&self) -> usize {
        self.neighbor_counts.len()
    }

    pub fn graph(&self) -> &ThresholdGraph {
        &self.graph
    }

    /// `W_ij`, 1-based.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i - 1) * self.n() + (j - 1)]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks(self.n())
    }

    pub fn neighbor_counts(&self) -> &[usize] {
        &self.neighbor_counts
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi_star
    }

    /// `π*·x0`, the value every node converges to.
    pub fn consensus_limit(&self, x0: &[f64]) -> f64 {
        self.pi_star.iter().zip(x0).map(|(p, x)| p * x).sum()
    }

    /// One averaging step `W·x`.
    pub fn step(&self, x: &[f64]) -> Vec<f64> {
        self.rows().map(|row| row.iter().zip(x).map(|(w, v)| w * v).sum()).collect()
    }

    /// `π*·W`, which equals `π*` for a valid system.
    pub fn left_multiply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|j| (0..n).map(|i| v[i] * self.weights[i * n + j]).sum()).collect()
    }

    /// State after exactly `t` steps.
    pub fn state_at(&self, x0: &[f64], t: usize) -> Result<Vec<f64>> {
        self.check_len(x0)?;
        let mut x = x0.to_vec();
        for _ in 0..t {
            x = self.step(&x);
        }
        Ok(x)
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: x.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateOptions {
    pub t_max: usize,
    pub tol: f64,
    /// Keep every intermediate state.
    pub record: bool,
    /// Stop at the first step within `tol` of the limit instead of running
    /// all `t_max` steps.
    pub stop_at_convergence: bool,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self { t_max: 10_000, tol: 1e-10, record: true, stop_at_convergence: true }
    }
}

/// A run of the averaging dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// `x(0), x(1), …` when recorded; otherwise only `x(0)` and the final state.
    pub states: Vec<Vec<f64>>,
    pub steps: usize,
    /// First step with `max_i |x_i(t) − π*·x0| < tol`, if any.
    pub converged_at: Option<usize>,
    pub limit: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory always holds x(0)")
    }

    pub fn is_converged(&self) -> bool {
        self.converged_at.is_some()
    }
}

fn max_deviation(x: &[f64], limit: f64) -> f64 {
    x.iter().map(|v| (v - limit).abs()).fold(0.0, f64::max)
}

/// Runs `x(t) = W·x(t−1)` and tracks convergence towards the known limit.
pub fn iterate(sys: &ConsensusSystem, x0: &[f64], opts: &IterateOptions) -> Result<Trajectory> {
    sys.check_len(x0)?;
    if opts.t_max == 0 {
        return Err(Error::InvalidArgument("t_max must be at least 1".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let limit = sys.consensus_limit(x0);
    let mut states = vec![x0.to_vec()];
    let mut current = x0.to_vec();
    let mut converged_at = (max_deviation(&current, limit) < opts.tol).then_some(0);
    let mut steps = 0;
    while steps < opts.t_max && !(opts.stop_at_convergence && converged_at.is_some()) {
        current = sys.step(&current);
        steps += 1;
        if converged_at.is_none() && max_deviation(&current, limit) < opts.tol {
            converged_at = Some(steps);
        }
        if opts.record {
            states.push(current.clone());
        }
    }
    if !opts.record && steps > 0 {
        states.push(current);
    }
    Ok(Trajectory { states, steps, converged_at, limit })
}

/// How `π^(E)` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    MonteCarlo { runs: u64 },
}

/// Expected consensus weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedStationary {
    pub pi_e: Vec<f64>,
    pub mode: EstimateMode,
    /// Per-entry standard errors (Monte Carlo only).
    pub std_error: Option<Vec<f64>>,
    pub law: LawKind,
}

impl ExpectedStationary {
    pub fn dot(&self, x0: &[f64]) -> Result<f64> {
        if x0.len() != self.pi_e.len() {
            return Err(Error::LengthMismatch { expected: self.pi_e.len(), got: x0.len() });
        }
        Ok(self.pi_e.iter().zip(x0).map(|(p, x)| p * x).sum())
    }
}

/// `π^(E) = Σ_{z^{n−1}} P(z^{n−1})·π*(z^{n−1}, 1)` by enumeration.
///
/// Refuses with [`Error::GuardExceeded`] when `n > limit`.
pub fn expected_stationary_exact<L>(law: &L, n: usize, limit: usize, exec: Execution) -> Result<ExpectedStationary>
where
    L: DrawLaw + ?Sized,
{
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if n > limit || n > 62 {
        return Err(Error::GuardExceeded { n, limit: limit.min(62) });
    }
    let total = 1u64 << (n - 1);
    let partials = map_chunks(exec, total, ENUM_CHUNK, |range| {
        let mut z = vec![0u8; n];
        z[n - 1] = 1;
        let mut sums = vec![CompensatedSum::default(); n];
        for bits in range {
            for (b, zb) in z[..n - 1].iter_mut().enumerate() {
                *zb = ((bits >> b) & 1) as u8;
            }
            let w = law.joint_pmf(&z[..n - 1]);
            for (acc, p) in sums.iter_mut().zip(stationary_from_draws(&z)) {
                acc.add(w * p);
            }
        }
        sums
    });
    let mut sums = vec![CompensatedSum::default(); n];
    for part in partials {
        for (acc, p) in sums.iter_mut().zip(part) {
            acc.merge(p);
        }
    }
    Ok(ExpectedStationary {
        pi_e: sums.iter().map(CompensatedSum::value).collect(),
        mode: EstimateMode::Exact,
        std_error: None,
        law: law.kind(),
    })
}

/// Samples a connected realisation: `n − 1` draws from `law`, then `z_n = 1`.
pub fn sample_connected<L: DrawLaw + ?Sized>(law: &L, n: usize, rng: &mut rng::StreamRng) -> Vec<u8> {
    let mut z = law.sample_draws(n - 1, rng);
    z.push(1);
    z
}

// Sample mean and standard error of `f(π*)` over `runs` connected realisations.
fn monte_carlo<L, F>(law: &L, n: usize, runs: u64, seed: u64, exec: Execution, f: F) -> (Vec<f64>, Vec<f64>)
where
    L: DrawLaw + ?Sized,
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let partials = map_chunks(exec, runs, RUN_CHUNK, |range| {
        let mut sum: Vec<CompensatedSum> = Vec::new();
        let mut sum_sq: Vec<CompensatedSum> = Vec::new();
        for run in range {
            let mut rng = rng::stream(seed, run);
            let z = sample_connected(law, n, &mut rng);
            let values = f(&stationary_from_draws(&z));
            if sum.is_empty() {
                sum = vec![CompensatedSum::default(); values.len()];
                sum_sq = sum.clone();
            }
            for ((s, q), v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(values) {
                s.add(v);
                q.add(v * v);
            }
        }
        (sum, sum_sq)
    });
    let mut sum: Vec<CompensatedSum> = Vec::new();
    let mut sum_sq: Vec<CompensatedSum> = Vec::new();
    for (s, q) in partials {
        if sum.is_empty() {
            sum = vec![CompensatedSum::default(); s.len()];
            sum_sq = sum.clone();
        }
        for (acc, p) in sum.iter_mut().zip(s) {
            acc.merge(p);
        }
        for (acc, p) in sum_sq.iter_mut().zip(q) {
            acc.merge(p);
        }
    }
    let r = runs as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s.value() / r).collect();
    let se = sum_sq
        .iter()
        .zip(&mean)
        .map(|(q, m)| {
            let var = ((q.value() - r * m * m) / (r - 1.0)).max(0.0);
            (var / r).sqrt()
        })
        .collect();
    (mean, se)
}

/// Monte Carlo estimate of `π^(E)` with per-entry standard errors. Run `r`
/// uses stream `r` of `seed`.
pub fn expected_stationary_mc<L>(law: &L, n: usize, runs: u64, seed: u64, exec: Execution) -> Result<ExpectedStationary>
where
    L: DrawLaw + ?Sized,
{
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if runs < 2 {
        return Err(Error::InvalidArgument(format!("Monte Carlo needs at least 2 runs, got {runs}")));
    }
    let (pi_e, se) = monte_carlo(law, n, runs, seed, exec, |pi| pi.to_vec());
    Ok(ExpectedStationary { pi_e, mode: EstimateMode::MonteCarlo { runs }, std_error: Some(se), law: law.kind() })
}

/// How to obtain `π^(E)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiEMode {
    Exact { limit: usize },
    MonteCarlo { runs: u64, seed: u64 },
}

impl Default for PiEMode {
    fn default() -> Self {
        PiEMode::Exact { limit: DEFAULT_ENUMERATION_LIMIT }
    }
}

pub fn expected_stationary<L>(law: &L, n: usize, mode: PiEMode, exec: Execution) -> Result<ExpectedStationary>
where
    L: DrawLaw + ?Sized,
{
    match mode {
        PiEMode::Exact { limit } => expected_stationary_exact(law, n, limit, exec),
        PiEMode::MonteCarlo { runs, seed } => expected_stationary_mc(law, n, runs, seed, exec),
    }
}

/// `π^(E)·x0`, the limit of the expected opinion vector (every entry).
pub fn expected_consensus_value<L>(law: &L, x0: &[f64], mode: PiEMode, exec: Execution) -> Result<f64>
where
    L: DrawLaw + ?Sized,
{
    expected_stationary(law, x0.len(), mode, exec)?.dot(x0)
}

/// Per-run consensus values for the histogram experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusSample {
    /// Node-average of `x(t)` for each run.
    pub values: Vec<f64>,
    /// `π*·x0` for each run.
    pub limits: Vec<f64>,
    pub sample_mean: f64,
    pub std_error: f64,
}

/// Simulates `runs` connected realisations, runs `t` averaging steps on each
/// and records the node-averaged opinion.
pub fn simulate_consensus<L>(law: &L, x0: &[f64], runs: u64, t: usize, seed: u64, exec: Execution) -> Result<ConsensusSample>
where
    L: DrawLaw + ?Sized,
{
    let n = x0.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if runs < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 runs, got {runs}")));
    }
    let chunks = map_chunks(exec, runs, RUN_CHUNK, |range| {
        range
            .map(|run| {
                let mut rng = rng::stream(seed, run);
                let z = sample_connected(law, n, &mut rng);
                let g = ThresholdGraph::new(crate::urn::CreationSequence::new(z)?);
                let sys = ConsensusSystem::new(&g)?;
                let x = sys.state_at(x0, t)?;
                Ok((x.iter().sum::<f64>() / n as f64, sys.consensus_limit(x0)))
            })
            .collect::<Result<Vec<_>>>()
    });
    let mut values = Vec::with_capacity(runs as usize);
    let mut limits = Vec::with_capacity(runs as usize);
    for chunk in chunks {
        for (v, l) in chunk? {
            values.push(v);
            limits.push(l);
        }
    }
    let (sample_mean, std_error) = mean_and_se(&values);
    Ok(ConsensusSample { values, limits, sample_mean, std_error })
}

pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// One cell of a memory sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub memory: usize,
    pub value: f64,
    pub std_error: f64,
    pub baseline: f64,
    pub baseline_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Reinforcement ratios to sweep; empty means the base urn's own `δ`.
    pub deltas: Vec<f64>,
    pub memories: Vec<usize>,
    pub runs: u64,
    pub seed: u64,
}

/// Monte Carlo `π^(E)·x0` under finite memory for every `(δ, M)`, next to the
/// infinite-memory baseline for the same `δ`. The initial red proportion comes
/// from `base`. Each cell and each baseline uses its own derived seed.
pub fn memory_sweep(base: &UrnParams, x0: &[f64], cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    let n = x0.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if cfg.memories.is_empty() {
        return Err(Error::InvalidArgument("memory sweep needs at least one memory length".into()));
    }
    if cfg.runs < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 runs, got {}", cfg.runs)));
    }
    let deltas = if cfg.deltas.is_empty() { vec![base.delta()] } else { cfg.deltas.clone() };
    let dot = |pi: &[f64]| vec![pi.iter().zip(x0).map(|(p, x)| p * x).sum()];
    let mut rows = Vec::with_capacity(deltas.len() * cfg.memories.len());
    for (di, &delta) in deltas.iter().enumerate() {
        let urn = UrnParams::from_ratios(base.rho(), delta)?;
        let baseline_seed = rng::derive_seed(cfg.seed, &[di as u64, u64::MAX]);
        let (b_mean, b_se) = monte_carlo(&urn, n, cfg.runs, baseline_seed, exec, dot);
        for (mi, &memory) in cfg.memories.iter().enumerate() {
            let fm = FiniteMemoryParams::new(urn, memory)?;
            let cell_seed = rng::derive_seed(cfg.seed, &[di as u64, mi as u64]);
            let (mean, se) = monte_carlo(&fm, n, cfg.runs, cell_seed, exec, dot);
            rows.push(SweepRow {
                delta,
                memory,
                value: mean[0],
                std_error: se[0],
                baseline: b_mean[0],
                baseline_se: b_se[0],
            });
        }
    }
    Ok(rows)
}

/// Initial opinions used by the `n = 10` experiment.
pub const OPINIONS_N10: [f64; 10] = [0.1, 0.6, 0.3, 1.0, 0.5, 3.0, 10.0, 2.0, 9.0, 0.2];

/// [`OPINIONS_N10`] repeated ten times: `x_{i+10k}(0) = x_i(0)`.
pub fn opinions_n100() -> Vec<f64> {
    OPINIONS_N10.iter().copied().cycle().take(100).collect()
}

/// First half 0, second half 100 (the middle entry of an odd `n` goes to the
/// second half).
pub fn polarized(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i < n / 2 { 0.0 } else { 100.0 }).collect()
}
