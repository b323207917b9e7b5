//! Closed-form stochastic properties of the Pólya threshold graph.

use crate::error::{Error, Result};
use crate::graph::ThresholdGraph;
use crate::special::{ln_binomial, ln_gamma};
use crate::urn::UrnParams;

/// Law of `deg(V_i)` on a graph of `horizon` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pub node: usize,
    pub horizon: usize,
    /// The attainable degrees, ascending.
    pub support: Vec<usize>,
    /// `pmf[k]` for `k = 0..=horizon`; zero outside the support.
    pub pmf: Vec<f64>,
    /// Closed-form mean `nρ`.
    pub mean: f64,
    /// Closed-form variance.
    pub variance: f64,
}

impl DegreeDistribution {
    pub fn probability(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    /// `(Σ k p_k, Σ k² p_k − (Σ k p_k)²)` computed from the pmf itself.
    pub fn moments_from_pmf(&self) -> (f64, f64) {
        let mean: f64 = self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let second: f64 = self.pmf.iter().enumerate().map(|(k, p)| (k * k) as f64 * p).sum();
        (mean, second - mean * mean)
    }
}

/// Law of `d(V_i, V_j)`; masses on values that cannot occur are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceDistribution {
    pub i: usize,
    pub j: usize,
    pub zero: f64,
    pub one: f64,
    pub two: f64,
    pub unreachable: f64,
}

impl DistanceDistribution {
    pub fn total(&self) -> f64 {
        self.zero + self.one + self.two + self.unreachable
    }
}

/// Decay parameter of the centrality score `C_i = Σ_j α^{d(i,j)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityConfig {
    alpha: f64,
}

impl CentralityConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("decay parameter must lie in (0, 1), got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for CentralityConfig {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

/// The attainable degrees `D_{i,n}` of node `i`.
pub fn degree_support(n: usize, i: usize) -> Result<Vec<usize>> {
    Error::check_index(i, n)?;
    Ok(if 2 * i <= n {
        (0..=n).collect()
    } else {
        (0..=n - i).chain(i..=n).collect()
    })
}

/// `E[deg(V_i)] = nρ`, the same for every node.
pub fn expected_degree(params: &UrnParams, n: usize, i: usize) -> Result<f64> {
    Error::check_index(i, n)?;
    Ok(n as f64 * params.rho())
}

// ln g^{(m)}(k): probability of one given length-m draw vector with k reds.
fn ln_kernel(params: &UrnParams, m: usize, k: usize) -> f64 {
    let (a, b) = params.beta_shape();
    let inv_delta = a + b;
    ln_gamma(inv_delta) + ln_gamma(a + k as f64) + ln_gamma(b + (m - k) as f64)
        - ln_gamma(a)
        - ln_gamma(b)
        - ln_gamma(inv_delta + m as f64)
}

/// Exact law of `deg(V_i)`.
///
/// `P(deg = k) = C(n−i, k)·g(k)·[k ≤ n−i] + C(n−i, k−i)·g(k−i+1)·[k ≥ i]` with
/// `g` the probability of a fixed length-`(n−i+1)` draw vector. Both terms are
/// added where they overlap.
pub fn degree_pmf(params: &UrnParams, n: usize, i: usize) -> Result<DegreeDistribution> {
    let support = degree_support(n, i)?;
    let rest = n - i;
    let m = rest + 1;
    let mut pmf = vec![0.0; n + 1];
    for &k in &support {
        let mut p = 0.0;
        if k <= rest {
            p += (ln_binomial(rest, k) + ln_kernel(params, m, k)).exp();
        }
        if k >= i {
            p += (ln_binomial(rest, k - i) + ln_kernel(params, m, k - i + 1)).exp();
        }
        pmf[k] = p;
    }
    Ok(DegreeDistribution {
        node: i,
        horizon: n,
        support,
        pmf,
        mean: n as f64 * params.rho(),
        variance: degree_variance(params, n, i)?,
    })
}

/// Closed-form `Var(deg(V_i))`.
pub fn degree_variance(params: &UrnParams, n: usize, i: usize) -> Result<f64> {
    Error::check_index(i, n)?;
    let (rho, delta) = (params.rho(), params.delta());
    let (nf, fi) = (n as f64, i as f64);
    let rest = nf - fi;
    let tail_second_moment = rest * rho * (rest * (delta + rho) + 1.0 - rho) / (1.0 + delta);
    let var = (1.0 + 2.0 * fi / (1.0 / delta + rest)) * tail_second_moment
        + fi * fi * rho
        + 2.0 * fi * rho * rho * rest / (1.0 + nf * delta - fi * delta)
        - (nf * rho).powi(2);
    Ok(var)
}

/// `P(no universal node among steps t..=n) = Π_{s=0}^{n−t} (1−ρ+sδ)/(1+sδ)`.
fn prob_no_universal_from(params: &UrnParams, n: usize, t: usize) -> f64 {
    let (rho, delta) = (params.rho(), params.delta());
    (0..=n - t)
        .map(|s| {
            let s = s as f64;
            (1.0 - rho + s * delta).ln() - (1.0 + s * delta).ln()
        })
        .sum::<f64>()
        .exp()
}

/// Exact law of the distance between nodes `i` and `j`.
pub fn distance_pmf(params: &UrnParams, n: usize, i: usize, j: usize) -> Result<DistanceDistribution> {
    Error::check_index(i, n)?;
    Error::check_index(j, n)?;
    let rho = params.rho();
    let mut d = DistanceDistribution { i, j, zero: 0.0, one: 0.0, two: 0.0, unreachable: 0.0 };
    if i == j {
        d.zero = rho;
        d.unreachable = 1.0 - rho;
    } else {
        d.one = rho;
        d.unreachable = prob_no_universal_from(params, n, i.max(j));
        d.two = 1.0 - rho - d.unreachable;
    }
    Ok(d)
}

/// `E[C_{V_i}]` for decay parameter `α`.
///
/// At `α = 1/2` this evaluates `Σ_{j≠i} [ρ/4 + (1 − Π_j)/4] + ρ` term by term;
/// for other `α` it is `Σ_{j≠i} [αρ + α²·P(d = 2)] + ρ`.
pub fn expected_decay_centrality(params: &UrnParams, n: usize, i: usize, cfg: &CentralityConfig) -> Result<f64> {
    Error::check_index(i, n)?;
    let rho = params.rho();
    let alpha = cfg.alpha();
    let mut total = 0.0;
    for j in (1..=n).filter(|&j| j != i) {
        let unreachable = prob_no_universal_from(params, n, i.max(j));
        total += if alpha == 0.5 {
            rho / 4.0 + (1.0 - unreachable) / 4.0
        } else {
            alpha * rho + alpha * alpha * (1.0 - rho - unreachable)
        };
    }
    Ok(total + rho)
}

/// Decay centrality of node `i` in a realised graph.
pub fn empirical_decay_centrality(g: &ThresholdGraph, i: usize, cfg: &CentralityConfig) -> Result<f64> {
    let alpha = cfg.alpha();
    (1..=g.n()).map(|j| g.distance(i, j).map(|d| d.decay(alpha))).sum()
}

/// `x (x+1) ⋯ (x+m−1)`; the empty product is 1.
pub fn rising_factorial(x: f64, m: u32) -> f64 {
    (0..m).map(|k| x + f64::from(k)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::urn::CreationSequence;
    use approx::assert_abs_diff_eq;

    fn urn552() -> UrnParams {
        UrnParams::new(5.0, 5.0, 2.0).unwrap()
    }

    #[test]
    fn support_sets() {
        assert_eq!(degree_support(4, 2).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(degree_support(5, 4).unwrap(), vec![0, 1, 4, 5]);
        assert_eq!(degree_support(3, 3).unwrap(), vec![0, 3]);
        assert!(degree_support(3, 4).is_err());
    }

    #[test]
    fn expected_degree_examples() {
        let p = urn552();
        for i in 1..=10 {
            assert_abs_diff_eq!(expected_degree(&p, 10, i).unwrap(), 5.0);
        }
        let q = UrnParams::from_ratios(0.3, 0.7).unwrap();
        assert_abs_diff_eq!(expected_degree(&q, 1, 1).unwrap(), 0.3);
        assert!(expected_degree(&p, 3, 0).is_err());
    }

    #[test]
    fn degree_pmf_small_case() {
        let d = degree_pmf(&urn552(), 2, 1).unwrap();
        assert_abs_diff_eq!(d.probability(0), 0.291_666_666_666_666_7, epsilon = 1e-10);
        assert_abs_diff_eq!(d.probability(1), 0.416_666_666_666_666_7, epsilon = 1e-10);
        assert_abs_diff_eq!(d.probability(2), 0.291_666_666_666_666_7, epsilon = 1e-10);
        let (mean, var) = d.moments_from_pmf();
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var, d.variance, epsilon = 1e-10);
    }

    #[test]
    fn last_node_degree_is_scaled_bernoulli() {
        for p in [urn552(), UrnParams::new(1.0, 9.0, 5.0).unwrap()] {
            for n in 1..8 {
                let d = degree_pmf(&p, n, n).unwrap();
                assert_abs_diff_eq!(d.probability(n), p.rho(), epsilon = 1e-12);
                let rho = p.rho();
                assert_abs_diff_eq!(d.variance, (n * n) as f64 * rho * (1.0 - rho), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn variance_spot_values() {
        // Frozen from exact rational enumeration over 2^8 draw vectors.
        let frozen = [4.333_333_333_333_333, 4.75, 5.583_333_333_333_333, 6.833_333_333_333_333, 8.5, 10.583_333_333_333_334, 13.083_333_333_333_334, 16.0];
        for (i, want) in frozen.iter().enumerate() {
            assert_abs_diff_eq!(degree_variance(&urn552(), 8, i + 1).unwrap(), want, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(degree_variance(&urn552(), 2, 1).unwrap(), 0.583_333_333_333_333_3, epsilon = 1e-12);
    }

    #[test]
    fn distance_pmf_examples() {
        let p = urn552();
        let d = distance_pmf(&p, 3, 1, 2).unwrap();
        assert_abs_diff_eq!(d.one, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(d.two, 0.208_333_333_333_333_3, epsilon = 1e-12);
        assert_abs_diff_eq!(d.unreachable, 0.291_666_666_666_666_7, epsilon = 1e-12);
        let same = distance_pmf(&p, 3, 2, 2).unwrap();
        assert_eq!((same.zero, same.one, same.two), (0.5, 0.0, 0.0));
        assert_abs_diff_eq!(same.unreachable, 0.5);
        let last = distance_pmf(&p, 6, 2, 6).unwrap();
        assert_abs_diff_eq!(last.unreachable, 1.0 - p.rho(), epsilon = 1e-14);
    }

    #[test]
    fn unreachable_mass_monotone_in_max_index() {
        let p = UrnParams::new(1.0, 9.0, 5.0).unwrap();
        let n = 12;
        let mass = |i, j| distance_pmf(&p, n, i, j).unwrap().unreachable;
        assert_abs_diff_eq!(mass(1, 7), mass(5, 7), epsilon = 0.0);
        for hi in 3..=n {
            assert!(mass(1, hi - 1) <= mass(1, hi));
        }
    }

    #[test]
    fn centrality_examples() {
        let p = urn552();
        let half = CentralityConfig::default();
        assert_abs_diff_eq!(expected_decay_centrality(&p, 1, 1, &half).unwrap(), 0.5);
        assert_abs_diff_eq!(expected_decay_centrality(&p, 2, 1, &half).unwrap(), 0.75, epsilon = 1e-12);
        let general = |alpha: f64| {
            let rho = p.rho();
            (1..=7)
                .filter(|&j| j != 3)
                .map(|j| {
                    let d = distance_pmf(&p, 7, 3, j).unwrap();
                    alpha * d.one + alpha * alpha * d.two
                })
                .sum::<f64>()
                + rho
        };
        assert_abs_diff_eq!(expected_decay_centrality(&p, 7, 3, &half).unwrap(), general(0.5), epsilon = 1e-12);
        let cfg = CentralityConfig::new(0.3).unwrap();
        assert_abs_diff_eq!(expected_decay_centrality(&p, 7, 3, &cfg).unwrap(), general(0.3), epsilon = 1e-12);
        assert!(CentralityConfig::new(1.0).is_err());
    }

    #[test]
    fn empirical_centrality_examples() {
        let half = CentralityConfig::default();
        let g = build_graph(&CreationSequence::parse("10010").unwrap());
        // Self-loop, nodes 1..3 at distance 1, node 5 isolated.
        assert_abs_diff_eq!(empirical_decay_centrality(&g, 4, &half).unwrap(), 2.5);
        let empty = build_graph(&CreationSequence::parse("0000").unwrap());
        assert_eq!(empirical_decay_centrality(&empty, 2, &half).unwrap(), 0.0);
        let single = build_graph(&CreationSequence::parse("1").unwrap());
        assert_eq!(empirical_decay_centrality(&single, 1, &half).unwrap(), 1.0);
        assert!(empirical_decay_centrality(&single, 2, &half).is_err());
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(rising_factorial(3.7, 0), 1.0);
        assert_eq!(rising_factorial(2.0, 3), 24.0);
        assert_eq!(rising_factorial(1.0, 5), 120.0);
    }
}
