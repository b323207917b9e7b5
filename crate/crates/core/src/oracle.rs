//! Brute-force ground truth.
//!
//! Expectations of arbitrary functionals of the draw vector are computed by
//! summing over all of `{0,1}^n`, weighted by a [`DrawLaw`]. The helpers here
//! deliberately avoid the closed-form shortcuts used elsewhere in the crate:
//! degrees are adjacency row sums and distances come from breadth-first
//! search, so agreement with the closed forms is evidence rather than
//! tautology.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::exec::{map_chunks, Execution};
use crate::graph::Distance;
use crate::special::CompensatedSum;
use crate::urn::{DrawLaw, UrnParams};

/// Largest horizon enumerated unless the caller raises it.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

const CHUNK: u64 = 1 << 12;

/// How the draw vector is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditioning {
    /// All `2^n` vectors weighted by `P(z^n)`.
    #[default]
    Unconditioned,
    /// The last draw is fixed to 1 and `(z^{n−1}, 1)` carries the marginal
    /// weight `P(z^{n−1})`. This is the connected regime of the consensus
    /// experiments.
    ForcedLastUniversal,
}

/// A functional of the draw vector to be averaged.
pub struct FunctionalSpec<F> {
    pub horizon: usize,
    pub conditioning: Conditioning,
    pub evaluator: F,
    pub limit: usize,
}

impl<F> FunctionalSpec<F>
where
    F: Fn(&[u8]) -> Vec<f64> + Sync,
{
    pub fn new(horizon: usize, evaluator: F) -> Self {
        Self { horizon, conditioning: Conditioning::Unconditioned, evaluator, limit: DEFAULT_ENUMERATION_LIMIT }
    }

    pub fn conditioning(mut self, conditioning: Conditioning) -> Self {
        self.conditioning = conditioning;
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }
}

/// Result of an enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct Expectation {
    pub value: Vec<f64>,
    /// Sum of the weights used; 1 up to rounding for a proper law.
    pub total_weight: f64,
}

struct Partial {
    weight: CompensatedSum,
    sums: Vec<CompensatedSum>,
}

/// `Σ_z P(z)·f(z)` over all binary vectors of length `spec.horizon`.
///
/// Vectors are visited in Gray-code order inside fixed-size chunks; chunk
/// partial sums are merged in chunk order, so the result is identical for
/// sequential and parallel execution.
pub fn enumerate_expectation<L, F>(law: &L, spec: &FunctionalSpec<F>, exec: Execution) -> Result<Expectation>
where
    L: DrawLaw + ?Sized,
    F: Fn(&[u8]) -> Vec<f64> + Sync,
{
    let n = spec.horizon;
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if n > spec.limit || n > 62 {
        return Err(Error::GuardExceeded { n, limit: spec.limit.min(62) });
    }
    let free = match spec.conditioning {
        Conditioning::Unconditioned => n,
        Conditioning::ForcedLastUniversal => n - 1,
    };
    let total = 1u64 << free;

    let partials = map_chunks(exec, total, CHUNK, |range| {
        let mut z = vec![0u8; n];
        if spec.conditioning == Conditioning::ForcedLastUniversal {
            z[n - 1] = 1;
        }
        let mut part = Partial { weight: CompensatedSum::default(), sums: Vec::new() };
        for idx in range.clone() {
            let code = idx ^ (idx >> 1);
            if idx == range.start {
                for (b, zb) in z[..free].iter_mut().enumerate() {
                    *zb = ((code >> b) & 1) as u8;
                }
            } else {
                let b = idx.trailing_zeros() as usize;
                z[b] ^= 1;
            }
            let w = law.joint_pmf(&z[..free]);
            let value = (spec.evaluator)(&z);
            if part.sums.is_empty() {
                part.sums = vec![CompensatedSum::default(); value.len()];
            }
            part.weight.add(w);
            for (acc, v) in part.sums.iter_mut().zip(value) {
                acc.add(w * v);
            }
        }
        part
    });

    let mut weight = CompensatedSum::default();
    let mut sums: Vec<CompensatedSum> = Vec::new();
    for part in partials {
        weight.merge(part.weight);
        if sums.is_empty() {
            sums = vec![CompensatedSum::default(); part.sums.len()];
        }
        for (acc, p) in sums.iter_mut().zip(part.sums) {
            acc.merge(p);
        }
    }
    Ok(Expectation { value: sums.iter().map(CompensatedSum::value).collect(), total_weight: weight.value() })
}

/// Scalar convenience wrapper around [`enumerate_expectation`].
pub fn enumerate_scalar<L, F>(law: &L, n: usize, conditioning: Conditioning, f: F) -> Result<f64>
where
    L: DrawLaw + ?Sized,
    F: Fn(&[u8]) -> f64 + Sync,
{
    let spec = FunctionalSpec::new(n, |z: &[u8]| vec![f(z)]).conditioning(conditioning);
    Ok(enumerate_expectation(law, &spec, Execution::Sequential)?.value[0])
}

/// Row sum of the adjacency matrix `a_ij = z_max(i,j)` for 1-based node `i`.
pub fn adjacency_degree(z: &[u8], i: usize) -> usize {
    (1..=z.len()).map(|j| usize::from(z[i.max(j) - 1])).sum()
}

/// Breadth-first-search distances from node `source` (1-based) in the graph
/// with adjacency `a_ij = z_max(i,j)`. The entry for `source` itself is 0 only
/// when it carries a self-loop.
pub fn bfs_distances(z: &[u8], source: usize) -> Vec<Distance> {
    let n = z.len();
    let adjacent = |i: usize, j: usize| z[i.max(j) - 1] == 1;
    let mut hops: Vec<Option<u32>> = vec![None; n + 1];
    hops[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = hops[u].unwrap_or(0);
        for (v, hop) in hops.iter_mut().enumerate().skip(1) {
            if v != u && hop.is_none() && adjacent(u, v) {
                *hop = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    (1..=n)
        .map(|v| {
            if v == source {
                if adjacent(v, v) { Distance::Zero } else { Distance::Unreachable }
            } else {
                match hops[v] {
                    Some(1) => Distance::One,
                    Some(2) => Distance::Two,
                    Some(d) => panic!("threshold graph distance {d} > 2"),
                    None => Distance::Unreachable,
                }
            }
        })
        .collect()
}

/// Degree law of node `i` by enumeration (`n ≤ 16`).
pub fn oracle_degree_pmf(params: &UrnParams, n: usize, i: usize) -> Result<BTreeMap<usize, f64>> {
    Error::check_index(i, n)?;
    let spec = FunctionalSpec::new(n, |z: &[u8]| {
        let mut hist = vec![0.0; n + 1];
        hist[adjacency_degree(z, i)] = 1.0;
        hist
    })
    .limit(16);
    let e = enumerate_expectation(params, &spec, Execution::Sequential)?;
    Ok(e.value.into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect())
}

/// `E[C_{V_i}]` by enumeration with BFS distances (`n ≤ 12`).
pub fn oracle_centrality(params: &UrnParams, n: usize, i: usize, alpha: f64) -> Result<f64> {
    Error::check_index(i, n)?;
    let spec = FunctionalSpec::new(n, |z: &[u8]| vec![bfs_distances(z, i).iter().map(|d| d.decay(alpha)).sum()]).limit(12);
    Ok(enumerate_expectation(params, &spec, Execution::Sequential)?.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::urn::{CreationSequence, FiniteMemoryParams};
    use approx::assert_abs_diff_eq;

    fn urn552() -> UrnParams {
        UrnParams::new(5.0, 5.0, 2.0).unwrap()
    }

    #[test]
    fn simple_expectations() {
        let p = urn552();
        let sum = enumerate_scalar(&p, 2, Conditioning::Unconditioned, |z| z.iter().map(|&v| f64::from(v)).sum()).unwrap();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-14);
        let deg1 = enumerate_scalar(&p, 8, Conditioning::Unconditioned, |z| adjacency_degree(z, 1) as f64).unwrap();
        assert_abs_diff_eq!(deg1, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn weights_sum_to_one_under_each_law() {
        let p = urn552();
        let fm = FiniteMemoryParams::new(p, 2).unwrap();
        for conditioning in [Conditioning::Unconditioned, Conditioning::ForcedLastUniversal] {
            for n in 1..=10 {
                let spec = FunctionalSpec::new(n, |_: &[u8]| vec![1.0]).conditioning(conditioning);
                let a = enumerate_expectation(&p, &spec, Execution::Sequential).unwrap();
                let b = enumerate_expectation(&fm, &spec, Execution::Sequential).unwrap();
                assert_abs_diff_eq!(a.total_weight, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(b.total_weight, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn forced_last_sees_one() {
        let p = urn552();
        let last = enumerate_scalar(&p, 5, Conditioning::ForcedLastUniversal, |z| f64::from(z[4])).unwrap();
        assert_abs_diff_eq!(last, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn guard_refuses_large_horizon() {
        let spec = FunctionalSpec::new(25, |_: &[u8]| vec![0.0]);
        assert!(matches!(
            enumerate_expectation(&urn552(), &spec, Execution::Sequential),
            Err(Error::GuardExceeded { n: 25, limit: 24 })
        ));
        assert!(oracle_degree_pmf(&urn552(), 17, 1).is_err());
        assert!(oracle_centrality(&urn552(), 13, 1, 0.5).is_err());
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let p = urn552();
        let spec = FunctionalSpec::new(15, |z: &[u8]| vec![adjacency_degree(z, 3) as f64, z[0] as f64]);
        let a = enumerate_expectation(&p, &spec, Execution::Sequential).unwrap();
        let b = enumerate_expectation(&p, &spec, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_degree_small_case() {
        let pmf = oracle_degree_pmf(&urn552(), 2, 1).unwrap();
        assert_eq!(pmf.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_abs_diff_eq!(pmf[&0], 0.291_666_666_666_666_7, epsilon = 1e-12);
        assert_abs_diff_eq!(pmf[&1], 0.416_666_666_666_666_7, epsilon = 1e-12);
        assert_abs_diff_eq!(pmf[&2], 0.291_666_666_666_666_7, epsilon = 1e-12);
        let last = oracle_degree_pmf(&urn552(), 6, 6).unwrap();
        assert_eq!(last.keys().copied().collect::<Vec<_>>(), vec![0, 6]);
    }

    #[test]
    fn oracle_centrality_small_cases() {
        assert_abs_diff_eq!(oracle_centrality(&urn552(), 2, 1, 0.5).unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle_centrality(&urn552(), 1, 1, 0.5).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn bfs_agrees_with_distance_rule() {
        for n in 1..=8usize {
            for bits in 0..(1u32 << n) {
                let z: Vec<u8> = (0..n).map(|b| ((bits >> b) & 1) as u8).collect();
                let g = build_graph(&CreationSequence::new(z.clone()).unwrap());
                for i in 1..=n {
                    let bfs = bfs_distances(&z, i);
                    for j in 1..=n {
                        assert_eq!(bfs[j - 1], g.distance(i, j).unwrap(), "z={z:?} i={i} j={j}");
                    }
                }
            }
        }
    }
}
