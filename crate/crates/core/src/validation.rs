//! The oracle-equivalence suite behind the `validate` command.
//!
//! Each check compares a closed form against its brute-force counterpart and
//! reports the largest discrepancy it saw.

use crate::analytics::{self, CentralityConfig};
use crate::consensus::{self, ConsensusSystem};
use crate::error::Result;
use crate::exec::Execution;
use crate::graph::{build_graph, ThresholdGraph};
use crate::oracle::{self, Conditioning, FunctionalSpec};
use crate::rng;
use crate::spectral;
use crate::urn::{self, CreationSequence, DrawLaw, FiniteMemoryParams, IidBernoulli, UrnParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn tolerance(name: &'static str, max_err: f64, tol: f64) -> Self {
        Self { name, passed: max_err < tol, detail: format!("max error {max_err:.3e} (tol {tol:.0e})") }
    }

    fn failures(name: &'static str, failures: usize, total: usize) -> Self {
        Self { name, passed: failures == 0, detail: format!("{failures} failures in {total} cases") }
    }
}

fn grid() -> Vec<UrnParams> {
    [(5.0, 5.0, 2.0), (1.0, 1.0, 1.0), (1.0, 9.0, 5.0)]
        .into_iter()
        .map(|(r, b, d)| UrnParams::new(r, b, d).expect("grid parameters are valid"))
        .collect()
}

fn bits(n: usize, code: u64) -> Vec<u8> {
    (0..n).map(|b| ((code >> b) & 1) as u8).collect()
}

fn degree_pmf_check() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for p in grid() {
        for n in [4, 8, 12] {
            for i in 1..=n {
                let closed = analytics::degree_pmf(&p, n, i)?;
                let oracle = oracle::oracle_degree_pmf(&p, n, i)?;
                for (k, &q) in closed.pmf.iter().enumerate() {
                    let o = oracle.get(&k).copied().unwrap_or(0.0);
                    worst = worst.max((q - o).abs());
                }
            }
        }
    }
    Ok(CheckResult::tolerance("degree pmf vs enumeration", worst, 1e-10))
}

fn moments_check() -> Result<Vec<CheckResult>> {
    let mut worst_mean: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for p in grid() {
        for n in [4, 8, 12] {
            for i in 1..=n {
                let d = analytics::degree_pmf(&p, n, i)?;
                let (mean, _) = d.moments_from_pmf();
                worst_mean = worst_mean.max((mean - n as f64 * p.rho()).abs());
                let spec = FunctionalSpec::new(n, |z: &[u8]| {
                    let k = oracle::adjacency_degree(z, i) as f64;
                    vec![k, k * k]
                });
                let m = oracle::enumerate_expectation(&p, &spec, Execution::Sequential)?.value;
                let var = m[1] - m[0] * m[0];
                worst = worst.max((analytics::degree_variance(&p, n, i)? - var).abs());
            }
        }
    }
    Ok(vec![
        CheckResult::tolerance("degree mean equals n*rho", worst_mean, 1e-10),
        CheckResult::tolerance("degree variance vs enumeration", worst, 1e-8),
    ])
}

fn distance_check() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let n = 7;
    for p in grid() {
        for i in 1..=n {
            let spec = FunctionalSpec::new(n, |z: &[u8]| {
                let d = oracle::bfs_distances(z, i);
                let mut out = vec![0.0; 4 * n];
                for (j, dist) in d.iter().enumerate() {
                    let slot = match dist.finite() {
                        Some(k) => k as usize,
                        None => 3,
                    };
                    out[4 * j + slot] = 1.0;
                }
                out
            });
            let e = oracle::enumerate_expectation(&p, &spec, Execution::Sequential)?.value;
            for j in 1..=n {
                let d = analytics::distance_pmf(&p, n, i, j)?;
                let closed = [d.zero, d.one, d.two, d.unreachable];
                for (c, o) in closed.iter().zip(&e[4 * (j - 1)..4 * j]) {
                    worst = worst.max((c - o).abs());
                }
            }
        }
    }
    Ok(CheckResult::tolerance("distance law vs BFS enumeration", worst, 1e-10))
}

fn centrality_check() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let cfg = CentralityConfig::default();
    for p in grid() {
        for n in 1..=10 {
            for i in 1..=n {
                let closed = analytics::expected_decay_centrality(&p, n, i, &cfg)?;
                let oracle = oracle::oracle_centrality(&p, n, i, cfg.alpha())?;
                worst = worst.max((closed - oracle).abs());
            }
        }
    }
    Ok(CheckResult::tolerance("expected decay centrality vs BFS enumeration", worst, 1e-10))
}

fn spectrum_check() -> Result<CheckResult> {
    let law = IidBernoulli::new(0.5)?;
    let runs = 200;
    let mut failures = 0;
    for run in 0..runs {
        let z = law.sample_draws(50, &mut rng::stream(0x5eed, run));
        let report = spectral::verify_eigenpairs(&build_graph(&CreationSequence::new(z)?));
        failures += usize::from(!report.all_passed());
    }
    Ok(CheckResult::failures("Laplacian eigenpairs on random realisations", failures, runs as usize))
}

fn law_checks() -> Result<Vec<CheckResult>> {
    let mut norm: f64 = 0.0;
    let mut exch: f64 = 0.0;
    let mut gamma: f64 = 0.0;
    let mut reduction: f64 = 0.0;
    for p in grid() {
        for n in 1..=10 {
            let fm = FiniteMemoryParams::new(p, n)?;
            let fm_short = FiniteMemoryParams::new(p, (n / 2).max(1))?;
            let mut total = 0.0;
            let mut total_fm = 0.0;
            for code in 0..(1u64 << n) {
                let z = bits(n, code);
                let pz = p.joint_pmf(&z);
                total += pz;
                total_fm += fm_short.joint_pmf(&z);
                let mut sorted = z.clone();
                sorted.sort_unstable();
                exch = exch.max((pz - p.joint_pmf(&sorted)).abs());
                gamma = gamma.max((pz - p.joint_pmf_gamma_form(&CreationSequence::new(z.clone())?)).abs());
                reduction = reduction.max((fm.joint_pmf(&z) - pz).abs());
            }
            norm = norm.max((total - 1.0).abs()).max((total_fm - 1.0).abs());
        }
    }
    Ok(vec![
        CheckResult::tolerance("joint pmf normalisation", norm, 1e-12),
        CheckResult::tolerance("exchangeability", exch, 1e-12),
        CheckResult::tolerance("product form vs Gamma form", gamma, 1e-12),
        CheckResult::tolerance("finite memory with M >= n equals infinite memory", reduction, 1e-12),
    ])
}

fn beta_binomial_check() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for p in grid() {
        let n = 10;
        let spec = FunctionalSpec::new(n, |z: &[u8]| {
            let mut h = vec![0.0; n + 1];
            h[z.iter().filter(|&&b| b == 1).count()] = 1.0;
            h
        });
        let e = oracle::enumerate_expectation(&p, &spec, Execution::Sequential)?.value;
        for (k, o) in e.iter().enumerate() {
            worst = worst.max((urn::beta_binomial_pmf(&p, n, k)? - o).abs());
        }
    }
    Ok(CheckResult::tolerance("Beta-Binomial count law vs enumeration", worst, 1e-12))
}

fn pi_e_check(exec: Execution) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for p in grid() {
        for memory in [None, Some(3)] {
            let law: Box<dyn DrawLaw> = match memory {
                None => Box::new(p),
                Some(m) => Box::new(FiniteMemoryParams::new(p, m)?),
            };
            for n in 2..=10 {
                let exact = consensus::expected_stationary_exact(law.as_ref(), n, 24, exec)?;
                let spec = FunctionalSpec::new(n, |z: &[u8]| {
                    let g = ThresholdGraph::new(CreationSequence::new(z.to_vec()).expect("binary draws"));
                    ConsensusSystem::new(&g).expect("last node is universal").stationary().to_vec()
                })
                .conditioning(Conditioning::ForcedLastUniversal);
                let o = oracle::enumerate_expectation(law.as_ref(), &spec, exec)?;
                for (a, b) in exact.pi_e.iter().zip(&o.value) {
                    worst = worst.max((a - b).abs());
                }
                worst = worst.max((exact.pi_e.iter().sum::<f64>() - 1.0).abs());
            }
        }
    }
    Ok(CheckResult::tolerance("expected consensus weights vs enumeration", worst, 1e-12))
}

fn consensus_invariants_check() -> Result<CheckResult> {
    let laws: Vec<Box<dyn DrawLaw>> = vec![Box::new(grid()[0]), Box::new(IidBernoulli::new(0.3)?)];
    let mut failures = 0;
    let mut total = 0;
    for (li, law) in laws.iter().enumerate() {
        for run in 0..50 {
            let mut r = rng::stream(rng::derive_seed(0xc0, &[li as u64]), run);
            let z = consensus::sample_connected(law.as_ref(), 30, &mut r);
            let sys = ConsensusSystem::new(&build_graph(&CreationSequence::new(z)?))?;
            total += 1;
            if !system_invariants_hold(&sys) {
                failures += 1;
            }
        }
    }
    Ok(CheckResult::failures("averaging matrix invariants", failures, total))
}

/// Row sums, positive diagonal, detailed balance and stationarity of `π*`.
pub fn system_invariants_hold(sys: &ConsensusSystem) -> bool {
    let n = sys.n();
    let counts = sys.neighbor_counts();
    let rows_ok = sys.rows().all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    let diag_ok = (1..=n).all(|i| sys.weight(i, i) > 0.0 && sys.weight(i, i) == 1.0 / counts[i - 1] as f64);
    // Every entry is 0 or exactly 1/N_i, so N_i·W_ij = N_j·W_ji reduces to a
    // symmetric support; multiplying back in floating point would round.
    let balance_ok = (1..=n).all(|i| {
        (1..=n).all(|j| {
            let (w, back) = (sys.weight(i, j), sys.weight(j, i));
            (w == 0.0 || w == 1.0 / counts[i - 1] as f64) && ((w > 0.0) == (back > 0.0))
        })
    });
    let pi = sys.stationary();
    let stationary_ok = sys.left_multiply(pi).iter().zip(pi).all(|(a, b)| (a - b).abs() < 1e-12);
    rows_ok && diag_ok && balance_ok && stationary_ok
}

/// Runs every check; the result is `Err` only on an internal error.
pub fn run_suite(exec: Execution) -> Result<Vec<CheckResult>> {
    let mut out = vec![degree_pmf_check()?];
    out.extend(moments_check()?);
    out.extend([distance_check()?, centrality_check()?, spectrum_check()?]);
    out.extend(law_checks()?);
    out.push(beta_binomial_check()?);
    out.push(pi_e_check(exec)?);
    out.push(consensus_invariants_check()?);
    Ok(out)
}
