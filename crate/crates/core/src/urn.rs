//! The two-colour Pólya urn as a draw process.
//!
//! A red draw is recorded as `1`, a black draw as `0`. Ball counts may be any
//! positive reals; every probability is formed from the proportions
//! `ρ = R / (R + B)` and `δ = Δ / (R + B)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::special::{ln_beta, ln_binomial, ln_gamma};

/// Initial composition and reinforcement of a two-colour Pólya urn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrnParams {
    red: f64,
    black: f64,
    reinforcement: f64,
}

impl UrnParams {
    /// An urn with `red` red balls, `black` black balls and `reinforcement`
    /// extra balls of the drawn colour returned after each draw.
    pub fn new(red: f64, black: f64, reinforcement: f64) -> Result<Self> {
        for (name, v) in [("R", red), ("B", black), ("Δ", reinforcement)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be a positive finite number, got {v}")));
            }
        }
        Ok(Self { red, black, reinforcement })
    }

    /// The urn normalised to one initial ball: `R = ρ`, `B = 1 - ρ`, `Δ = δ`.
    pub fn from_ratios(rho: f64, delta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParams(format!("ρ must lie in (0, 1), got {rho}")));
        }
        Self::new(rho, 1.0 - rho, delta)
    }

    pub fn red_initial(&self) -> f64 {
        self.red
    }

    pub fn black_initial(&self) -> f64 {
        self.black
    }

    pub fn reinforcement(&self) -> f64 {
        self.reinforcement
    }

    /// Initial red proportion `ρ`.
    pub fn rho(&self) -> f64 {
        self.red / (self.red + self.black)
    }

    /// Normalised reinforcement `δ`.
    pub fn delta(&self) -> f64 {
        self.reinforcement / (self.red + self.black)
    }

    /// Shape parameters `(ρ/δ, (1-ρ)/δ)` of the limiting Beta law.
    pub fn beta_shape(&self) -> (f64, f64) {
        (self.red / self.reinforcement, self.black / self.reinforcement)
    }

    /// Log-probability of one particular length-`n` sequence with `k` red
    /// draws, from the product of linear factors.
    pub(crate) fn ln_sequence_probability(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        let (rho, delta) = (self.rho(), self.delta());
        let red: f64 = (0..k).map(|i| (rho + i as f64 * delta).ln()).sum();
        let black: f64 = (0..n - k).map(|j| (1.0 - rho + j as f64 * delta).ln()).sum();
        let total: f64 = (0..n).map(|m| (1.0 + m as f64 * delta).ln()).sum();
        red + black - total
    }

    /// The same probability written with Gamma functions.
    pub(crate) fn ln_sequence_probability_gamma(&self, n: usize, k: usize) -> f64 {
        let (a, b) = self.beta_shape();
        let inv_delta = a + b;
        let (n, k) = (n as f64, k as f64);
        ln_gamma(inv_delta) + ln_gamma(a + k) + ln_gamma(b + n - k)
            - ln_gamma(a)
            - ln_gamma(b)
            - ln_gamma(inv_delta + n)
    }

    /// Joint probability of `z` using the Gamma-function form of the law.
    /// Agrees with [`polya_joint_pmf`] up to rounding.
    pub fn joint_pmf_gamma_form(&self, z: &CreationSequence) -> f64 {
        self.ln_sequence_probability_gamma(z.len(), z.ones()).exp()
    }
}

/// Pólya urn whose reinforcement balls are removed `memory` steps after they
/// were added. The draw process is then Markov of order `memory`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteMemoryParams {
    base: UrnParams,
    memory: usize,
}

impl FiniteMemoryParams {
    pub fn new(base: UrnParams, memory: usize) -> Result<Self> {
        if memory == 0 {
            return Err(Error::InvalidParams("memory length M must be at least 1".into()));
        }
        Ok(Self { base, memory })
    }

    pub fn base(&self) -> &UrnParams {
        &self.base
    }

    pub fn memory(&self) -> usize {
        self.memory
    }
}

/// A realised draw vector `z^n`, the canonical form of a threshold graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct CreationSequence(Vec<u8>);

impl CreationSequence {
    pub fn new(draws: Vec<u8>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((position, &value)) = draws.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::InvalidDraw { position: position + 1, value });
        }
        Ok(Self(draws))
    }

    pub fn from_bools(draws: &[bool]) -> Result<Self> {
        Self::new(draws.iter().map(|&b| u8::from(b)).collect())
    }

    /// Parses a string of `0`/`1` characters, ignoring commas and whitespace.
    pub fn parse(s: &str) -> Result<Self> {
        let draws = s
            .chars()
            .filter(|c| !(c.is_whitespace() || *c == ','))
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!("unexpected character {other:?} in draw string"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(draws)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Draw at 1-based step `t`.
    pub fn get(&self, t: usize) -> Option<u8> {
        t.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    /// Number of red draws.
    pub fn ones(&self) -> usize {
        self.0.iter().map(|&z| usize::from(z)).sum()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl TryFrom<Vec<u8>> for CreationSequence {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CreationSequence> for Vec<u8> {
    fn from(s: CreationSequence) -> Self {
        s.0
    }
}

impl fmt::Display for CreationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &z in &self.0 {
            write!(f, "{z}")?;
        }
        Ok(())
    }
}

/// Which law produced a draw vector; carried through estimates for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Infinite,
    FiniteMemory(usize),
    Other,
}

/// A law on binary draw sequences.
///
/// The consensus and enumeration machinery only touches a law through this
/// trait, so any binary process can be substituted for the urn.
pub trait DrawLaw: Send + Sync {
    /// `P(Z_{t+1} = 1 | Z_1..Z_t = history)`.
    fn red_probability(&self, history: &[u8]) -> f64;

    /// `ln P(Z_1..Z_n = z)`.
    fn ln_joint_pmf(&self, z: &[u8]) -> f64;

    fn joint_pmf(&self, z: &[u8]) -> f64 {
        self.ln_joint_pmf(z).exp()
    }

    /// Samples `n` draws. Implementations consume exactly one uniform
    /// variate per draw.
    fn sample_draws(&self, n: usize, rng: &mut StreamRng) -> Vec<u8> {
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            let p = self.red_probability(&z);
            z.push(u8::from(rng.random::<f64>() < p));
        }
        z
    }

    fn kind(&self) -> LawKind {
        LawKind::Other
    }
}

impl DrawLaw for UrnParams {
    fn red_probability(&self, history: &[u8]) -> f64 {
        let reds = history.iter().filter(|&&z| z == 1).count();
        polya_red_probability(self.rho(), self.delta(), history.len(), reds)
    }

    fn ln_joint_pmf(&self, z: &[u8]) -> f64 {
        let k = z.iter().filter(|&&v| v == 1).count();
        self.ln_sequence_probability(z.len(), k)
    }

    fn sample_draws(&self, n: usize, rng: &mut StreamRng) -> Vec<u8> {
        let (rho, delta) = (self.rho(), self.delta());
        let mut reds = 0;
        (0..n)
            .map(|t| {
                let red = rng.random::<f64>() < polya_red_probability(rho, delta, t, reds);
                reds += usize::from(red);
                u8::from(red)
            })
            .collect()
    }

    fn kind(&self) -> LawKind {
        LawKind::Infinite
    }
}

impl DrawLaw for FiniteMemoryParams {
    fn red_probability(&self, history: &[u8]) -> f64 {
        let t = history.len();
        let (rho, delta) = (self.base.rho(), self.base.delta());
        if t < self.memory {
            let reds = history.iter().filter(|&&z| z == 1).count();
            polya_red_probability(rho, delta, t, reds)
        } else {
            let window = history[t - self.memory..].iter().filter(|&&z| z == 1).count();
            window_red_probability(rho, delta, self.memory, window)
        }
    }

    fn ln_joint_pmf(&self, z: &[u8]) -> f64 {
        let n = z.len();
        let m = self.memory;
        if n <= m {
            return self.base.ln_joint_pmf(z);
        }
        let (rho, delta) = (self.base.rho(), self.base.delta());
        let mut ln_p = self.base.ln_joint_pmf(&z[..m]);
        let mut window = z[..m].iter().filter(|&&v| v == 1).count();
        for i in m..n {
            let denom = (1.0 + delta * m as f64).ln();
            ln_p += if z[i] == 1 {
                (rho + delta * window as f64).ln() - denom
            } else {
                (1.0 - rho + delta * (m - window) as f64).ln() - denom
            };
            window = window + usize::from(z[i]) - usize::from(z[i - m]);
        }
        ln_p
    }

    fn sample_draws(&self, n: usize, rng: &mut StreamRng) -> Vec<u8> {
        let (rho, delta) = (self.base.rho(), self.base.delta());
        let m = self.memory;
        let mut z: Vec<u8> = Vec::with_capacity(n);
        let (mut reds, mut window) = (0, 0);
        for t in 0..n {
            let p = if t < m {
                polya_red_probability(rho, delta, t, reds)
            } else {
                window_red_probability(rho, delta, m, window)
            };
            let red = u8::from(rng.random::<f64>() < p);
            reds += usize::from(red);
            window += usize::from(red);
            if t >= m {
                window -= usize::from(z[t - m]);
            }
            z.push(red);
        }
        z
    }

    fn kind(&self) -> LawKind {
        LawKind::FiniteMemory(self.memory)
    }
}

/// Independent draws with a fixed red probability. Not an urn; used to check
/// that graph-level results do not depend on the urn law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidBernoulli {
    p: f64,
}

impl IidBernoulli {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParams(format!("Bernoulli p must lie in (0, 1), got {p}")));
        }
        Ok(Self { p })
    }
}

impl DrawLaw for IidBernoulli {
    fn red_probability(&self, _history: &[u8]) -> f64 {
        self.p
    }

    fn ln_joint_pmf(&self, z: &[u8]) -> f64 {
        z.iter().map(|&v| if v == 1 { self.p.ln() } else { (1.0 - self.p).ln() }).sum()
    }
}

// Red probability for draw t+1 after t draws of which `reds` were red.
fn polya_red_probability(rho: f64, delta: f64, t: usize, reds: usize) -> f64 {
    (rho + delta * reds as f64) / (1.0 + delta * t as f64)
}

// Red probability once the urn holds exactly `memory` reinforcement batches.
fn window_red_probability(rho: f64, delta: f64, memory: usize, window_reds: usize) -> f64 {
    (rho + delta * window_reds as f64) / (1.0 + delta * memory as f64)
}

/// Samples `n` draws from the infinite-memory urn using stream 0 of `seed`.
pub fn sample_polya(params: &UrnParams, n: usize, seed: u64) -> Result<CreationSequence> {
    sample_law(params, n, seed)
}

/// Samples `n` draws from the finite-memory urn using stream 0 of `seed`.
/// When `M ≥ n` the output is identical to [`sample_polya`] for the same seed.
pub fn sample_finite_memory(fm: &FiniteMemoryParams, n: usize, seed: u64) -> Result<CreationSequence> {
    sample_law(fm, n, seed)
}

fn sample_law<L: DrawLaw + ?Sized>(law: &L, n: usize, seed: u64) -> Result<CreationSequence> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    let mut rng = rng::stream(seed, 0);
    CreationSequence::new(law.sample_draws(n, &mut rng))
}

/// `P(Z_1 = z_1, …, Z_n = z_n)` under the infinite-memory urn.
pub fn polya_joint_pmf(params: &UrnParams, z: &CreationSequence) -> f64 {
    params.joint_pmf(z.as_slice())
}

/// `P(Z_1 = z_1, …, Z_n = z_n)` under the finite-memory urn. For `n ≤ M` this
/// is the infinite-memory law.
pub fn finite_memory_joint_pmf(fm: &FiniteMemoryParams, z: &CreationSequence) -> f64 {
    fm.joint_pmf(z.as_slice())
}

/// Beta-Binomial probability that `n` draws contain exactly `k` reds.
pub fn beta_binomial_pmf(params: &UrnParams, n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::CountOutOfRange { k, n });
    }
    let (a, b) = params.beta_shape();
    let ln_p = ln_binomial(n, k) + ln_beta(a + k as f64, b + (n - k) as f64) - ln_beta(a, b);
    Ok(ln_p.exp())
}
