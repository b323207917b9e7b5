//! Threshold graphs built from creation sequences.
//!
//! Node `t` (1-based) is added at step `t`. If `z_t = 1` it is joined to all
//! of `1..=t` including itself; otherwise it gets no edges at all. Hence the
//! adjacency entry is `a_ij = z_max(i,j)`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::urn::CreationSequence;

/// Shortest-path distance in a threshold graph.
///
/// A node without a self-loop is treated as disconnected from itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distance {
    Zero,
    One,
    Two,
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Zero => Some(0),
            Distance::One => Some(1),
            Distance::Two => Some(2),
            Distance::Unreachable => None,
        }
    }

    /// `alpha^d`, with `alpha^∞ = 0`.
    pub fn decay(self, alpha: f64) -> f64 {
        self.finite().map_or(0.0, |d| alpha.powi(d as i32))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("inf"),
        }
    }
}

/// A threshold graph stored as its creation sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdGraph {
    sequence: CreationSequence,
    // later_ones[i] = number of universal nodes strictly after 0-based node i
    later_ones: Vec<usize>,
}

impl ThresholdGraph {
    pub fn new(sequence: CreationSequence) -> Self {
        let z = sequence.as_slice();
        let mut later_ones = vec![0; z.len()];
        for i in (0..z.len().saturating_sub(1)).rev() {
            later_ones[i] = later_ones[i + 1] + usize::from(z[i + 1]);
        }
        Self { sequence, later_ones }
    }

    pub fn n(&self) -> usize {
        self.sequence.len()
    }

    pub fn sequence(&self) -> &CreationSequence {
        &self.sequence
    }

    fn z(&self, t: usize) -> u8 {
        self.sequence.as_slice()[t - 1]
    }

    fn check(&self, i: usize) -> Result<()> {
        Error::check_index(i, self.n())
    }

    /// `a_ij = z_max(i,j)`, including the diagonal self-loop indicator.
    pub fn adjacency_entry(&self, i: usize, j: usize) -> Result<u8> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.z(i.max(j)))
    }

    /// Dense `n × n` adjacency matrix, row-major.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (1..=n).map(|i| (1..=n).map(|j| self.z(i.max(j))).collect()).collect()
    }

    /// Edges `(t, s)` with `s ≤ t` in the order the construction adds them.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for t in 1..=self.n() {
            if self.z(t) == 1 {
                edges.extend((1..=t).map(|s| (t, s)));
            }
        }
        edges
    }

    /// Edge set as unordered pairs normalised to `(max, min)`.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().collect()
    }

    /// `deg(V_i) = i·z_i + Σ_{j>i} z_j`; a self-loop counts once.
    pub fn degree(&self, i: usize) -> Result<usize> {
        self.check(i)?;
        Ok(i * usize::from(self.z(i)) + self.later_ones[i - 1])
    }

    pub fn degrees(&self) -> Vec<usize> {
        (1..=self.n()).map(|i| i * usize::from(self.z(i)) + self.later_ones[i - 1]).collect()
    }

    /// Trace of the adjacency matrix: the number of self-loops.
    pub fn trace(&self) -> usize {
        self.sequence.ones()
    }

    pub fn last_is_universal(&self) -> bool {
        self.z(self.n()) == 1
    }

    /// Distance between nodes `i` and `j`, read directly off the sequence.
    pub fn distance(&self, i: usize, j: usize) -> Result<Distance> {
        self.check(i)?;
        self.check(j)?;
        let hi = i.max(j);
        Ok(if i == j {
            if self.z(i) == 1 { Distance::Zero } else { Distance::Unreachable }
        } else if self.z(hi) == 1 {
            Distance::One
        } else if self.later_ones[hi - 1] > 0 {
            Distance::Two
        } else {
            Distance::Unreachable
        })
    }
}

/// Build the threshold graph of a creation sequence.
pub fn build_graph(z: &CreationSequence) -> ThresholdGraph {
    ThresholdGraph::new(z.clone())
}

/// Node weights and a threshold; `(v_i, v_j)` is an edge iff
/// `w_i + w_j > threshold` (strictly), including `i = j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAssignment {
    pub weights: Vec<f64>,
    pub threshold: f64,
    /// Offsets from `threshold / 2` when produced by [`weights_from_sequence`].
    pub epsilons: Option<Vec<f64>>,
}

impl WeightAssignment {
    pub fn new(weights: Vec<f64>, threshold: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySequence);
        }
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::InvalidArgument(format!("threshold must be positive, got {threshold}")));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite".into()));
        }
        Ok(Self { weights, threshold, epsilons: None })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// Whether 1-based nodes `i` and `j` are adjacent.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weights[i - 1] + self.weights[j - 1] > self.threshold
    }

    /// The induced edge set as `(max, min)` pairs.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        let n = self.n();
        let mut edges = BTreeSet::new();
        for i in 1..=n {
            for j in 1..=i {
                if self.has_edge(i, j) {
                    edges.insert((i, j));
                }
            }
        }
        edges
    }
}

/// A creation sequence recovered from weights, together with the relabeling:
/// `order[t - 1]` is the original node placed at step `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeled {
    pub sequence: CreationSequence,
    pub order: Vec<usize>,
}

impl Relabeled {
    /// The edge set of the sequence's graph, mapped back to original labels.
    pub fn edge_set_in_original_labels(&self) -> BTreeSet<(usize, usize)> {
        build_graph(&self.sequence)
            .edges()
            .into_iter()
            .map(|(t, s)| {
                let (a, b) = (self.order[t - 1], self.order[s - 1]);
                (a.max(b), a.min(b))
            })
            .collect()
    }
}

/// Recovers a creation sequence from a weight assignment.
///
/// Nodes are sorted by weight (ties by original index). Repeatedly compare the
/// lightest and heaviest remaining nodes: if their weights sum to at most the
/// threshold the lightest is isolated, otherwise the heaviest is universal.
/// The removed node takes the last unfilled step, so the sequence is filled
/// from `z_n` backwards.
pub fn creation_sequence_from_weights(w: &WeightAssignment) -> Result<Relabeled> {
    let n = w.n();
    let mut sorted: Vec<usize> = (1..=n).collect();
    sorted.sort_by(|&a, &b| w.weights[a - 1].total_cmp(&w.weights[b - 1]).then(a.cmp(&b)));

    let (mut lo, mut hi) = (0usize, n - 1);
    let mut draws = vec![0u8; n];
    let mut order = vec![0usize; n];
    for step in (0..n).rev() {
        let (light, heavy) = (sorted[lo], sorted[hi]);
        if w.weights[light - 1] + w.weights[heavy - 1] > w.threshold {
            draws[step] = 1;
            order[step] = heavy;
            hi = hi.wrapping_sub(1);
        } else {
            order[step] = light;
            lo += 1;
        }
    }
    Ok(Relabeled { sequence: CreationSequence::new(draws)?, order })
}

/// Weights realising `z` with threshold `tau`, using
/// `ε_i = i·τ / (2(n+1))` and `Φ(v_i) = τ/2 ± ε_i`.
pub fn weights_from_sequence(z: &CreationSequence, tau: f64) -> Result<WeightAssignment> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {tau}")));
    }
    let n = z.len();
    let epsilons: Vec<f64> = (1..=n).map(|i| i as f64 * tau / (2.0 * (n as f64 + 1.0))).collect();
    let weights = z
        .as_slice()
        .iter()
        .zip(&epsilons)
        .map(|(&zi, &eps)| if zi == 1 { tau / 2.0 + eps } else { tau / 2.0 - eps })
        .collect();
    Ok(WeightAssignment { weights, threshold: tau, epsilons: Some(epsilons) })
}
