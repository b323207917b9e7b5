use std::fs;
use std::path::{Path, PathBuf};

use polya_threshold::analytics::{self, CentralityConfig, DegreeDistribution};
use polya_threshold::consensus::{self, ConsensusSystem, EstimateMode, IterateOptions, SweepConfig};
use polya_threshold::io::{self, Cell, GraphRecord, Table};
use polya_threshold::oracle::{self, Conditioning, FunctionalSpec, DEFAULT_ENUMERATION_LIMIT};
use polya_threshold::{
    rng, spectral, validation, CreationSequence, DrawLaw, Execution, FiniteMemoryParams, ThresholdGraph, UrnParams,
};

use crate::args::{self, Command, Format, Output, PiEMethod, UrnArgs};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::DegreeDist(a) => degree_dist(a),
        Command::Centrality(a) => centrality(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Consensus(a) => consensus_cmd(a),
        Command::PiE(a) => pi_e(a),
        Command::Histogram(a) => histogram(a),
        Command::MemorySweep(a) => memory_sweep(a),
        Command::Validate(a) => validate(a),
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn execution(e: &args::Execution) -> Execution {
    if e.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn resolve_urn(a: &UrnArgs) -> Result<UrnParams> {
    let counts = [a.red, a.black, a.delta_balls];
    let ratios = [a.rho, a.delta];
    let any_counts = counts.iter().any(Option::is_some);
    let any_ratios = ratios.iter().any(Option::is_some);
    match (any_counts, any_ratios) {
        (true, true) => Err(config("give either --R/--B/--delta-balls or --rho/--delta, not both")),
        (true, false) => match counts {
            [Some(r), Some(b), Some(d)] => Ok(UrnParams::new(r, b, d)?),
            _ => Err(config("--R, --B and --delta-balls must be given together")),
        },
        (false, true) => match ratios {
            [Some(rho), Some(delta)] => Ok(UrnParams::from_ratios(rho, delta)?),
            _ => Err(config("--rho and --delta must be given together")),
        },
        (false, false) => Err(config("urn parameters required: --R/--B/--delta-balls or --rho/--delta")),
    }
}

fn resolve_law(a: &UrnArgs) -> Result<Box<dyn DrawLaw>> {
    let urn = resolve_urn(a)?;
    Ok(match a.memory {
        Some(m) => Box::new(FiniteMemoryParams::new(urn, m)?),
        None => Box::new(urn),
    })
}

fn require_connected(last: &args::LastNode, command: &str) -> Result<()> {
    if last.resolve(true) {
        Ok(())
    } else {
        Err(config(format!("{command} needs connected realisations; --no-force-last-universal is not supported")))
    }
}

fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| config(format!("not a number: {s:?}"))))
        .collect()
}

fn parse_x0(spec: &str, n: Option<usize>) -> Result<Vec<f64>> {
    let x0 = match spec {
        "paper-n10" => consensus::OPINIONS_N10.to_vec(),
        "paper-n100" => consensus::opinions_n100(),
        "polarized" => consensus::polarized(n.ok_or_else(|| config("the polarized preset needs --n"))?),
        _ => match spec.strip_prefix('@') {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
                parse_numbers(&text)?
            }
            None => parse_numbers(spec)?,
        },
    };
    if x0.is_empty() {
        return Err(config("x0 is empty"));
    }
    match n {
        Some(n) if n != x0.len() => Err(config(format!("x0 has {} entries but n = {n}", x0.len()))),
        _ => Ok(x0),
    }
}

fn sample(law: &dyn DrawLaw, n: usize, seed: u64, force_last: bool) -> Result<CreationSequence> {
    if n == 0 {
        return Err(config("n must be at least 1"));
    }
    let mut r = rng::stream(seed, 0);
    let z = if force_last { consensus::sample_connected(law, n, &mut r) } else { law.sample_draws(n, &mut r) };
    Ok(CreationSequence::new(z)?)
}

/// Explicit `--draws`, or a sample from the urn.
fn realisation(
    urn: &UrnArgs,
    draws: &Option<String>,
    n: Option<usize>,
    seed: u64,
    force_last: bool,
) -> Result<CreationSequence> {
    if let Some(d) = draws {
        let z = CreationSequence::parse(d)?;
        if n.is_some_and(|n| n != z.len()) {
            return Err(config("--n does not match the length of --draws"));
        }
        return Ok(z);
    }
    let n = n.ok_or_else(|| config("give --draws or --n with urn parameters"))?;
    sample(resolve_law(urn)?.as_ref(), n, seed, force_last)
}

fn with_path(path: &Path, r: polya_threshold::Result<()>) -> Result<()> {
    r.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(output: &Output, stem: &str, table: &Table) -> Result<PathBuf> {
    let path = match output.format {
        Format::Csv => {
            let path = output.out_dir.join(format!("{stem}.csv"));
            with_path(&path, table.write_csv(&path))?;
            path
        }
        Format::Json => {
            let path = output.out_dir.join(format!("{stem}.json"));
            with_path(&path, io::write_json(&path, &table.to_json_value()))?;
            path
        }
    };
    println!("wrote {}", path.display());
    Ok(path)
}

fn fixed6(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn generate(a: args::GenerateArgs) -> Result<()> {
    let urn = resolve_urn(&a.urn)?;
    let law = resolve_law(&a.urn)?;
    let z = sample(law.as_ref(), a.n, a.seed, a.last.resolve(false))?;
    println!("draws {z}");
    let path = a.output.out_dir.join("graph.json");
    with_path(&path, io::write_json(&path, &GraphRecord::new(z.clone(), &urn, a.seed, a.urn.memory)))?;
    println!("wrote {}", path.display());
    emit(&a.output, "edges", &io::edges_table(&ThresholdGraph::new(z)))?;
    Ok(())
}

fn degree_dist(a: args::DegreeArgs) -> Result<()> {
    let forced = a.last.resolve(false);
    let dist = if a.urn.memory.is_none() && !forced {
        analytics::degree_pmf(&resolve_urn(&a.urn)?, a.n, a.i)?
    } else {
        // No closed form here: enumerate.
        let law = resolve_law(&a.urn)?;
        if a.i == 0 || a.i > a.n {
            return Err(polya_threshold::Error::IndexOutOfRange { index: a.i, n: a.n }.into());
        }
        let n = a.n;
        let i = a.i;
        let conditioning = if forced { Conditioning::ForcedLastUniversal } else { Conditioning::Unconditioned };
        let spec = FunctionalSpec::new(n, |z: &[u8]| {
            let mut h = vec![0.0; n + 1];
            h[oracle::adjacency_degree(z, i)] = 1.0;
            h
        })
        .conditioning(conditioning)
        .limit(DEFAULT_ENUMERATION_LIMIT);
        let pmf = oracle::enumerate_expectation(law.as_ref(), &spec, Execution::Parallel)?.value;
        let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let second: f64 = pmf.iter().enumerate().map(|(k, p)| (k * k) as f64 * p).sum();
        DegreeDistribution {
            node: i,
            horizon: n,
            support: (0..=n).filter(|&k| pmf[k] > 0.0).collect(),
            pmf,
            mean,
            variance: second - mean * mean,
        }
    };
    println!("mean {}", io::format_number(dist.mean));
    println!("variance {}", io::format_number(dist.variance));
    emit(&a.output, "degree", &io::degree_table(&dist))?;
    Ok(())
}

fn centrality(a: args::CentralityArgs) -> Result<()> {
    let cfg = CentralityConfig::new(a.alpha)?;
    let graph = match &a.draws {
        Some(d) => Some(ThresholdGraph::new(CreationSequence::parse(d)?)),
        None => None,
    };
    let urn_given = [a.urn.red, a.urn.black, a.urn.delta_balls, a.urn.rho, a.urn.delta].iter().any(Option::is_some);
    if a.urn.memory.is_some() {
        return Err(config("expected centrality is available for the infinite-memory urn only"));
    }
    let n = match (a.n, &graph) {
        (Some(n), Some(g)) if n != g.n() => return Err(config("--n does not match the length of --draws")),
        (Some(n), _) => n,
        (None, Some(g)) => g.n(),
        (None, None) => return Err(config("give --n or --draws")),
    };
    if graph.is_none() && !urn_given {
        return Err(config("give urn parameters for expected centrality or --draws for empirical centrality"));
    }
    let urn = if urn_given { Some(resolve_urn(&a.urn)?) } else { None };
    let nodes: Vec<usize> = match a.i {
        Some(i) => vec![i],
        None => (1..=n).collect(),
    };
    let mut header = vec!["i"];
    if urn.is_some() {
        header.push("expected");
    }
    if graph.is_some() {
        header.push("empirical");
    }
    let mut table = Table::new(header).with_meta("alpha", io::format_number(a.alpha));
    for &i in &nodes {
        let mut row = vec![Cell::from(i)];
        let mut line = format!("node {i}");
        if let Some(p) = &urn {
            let v = analytics::expected_decay_centrality(p, n, i, &cfg)?;
            line.push_str(&format!(" expected {}", io::format_number(v)));
            row.push(v.into());
        }
        if let Some(g) = &graph {
            let v = analytics::empirical_decay_centrality(g, i, &cfg)?;
            line.push_str(&format!(" empirical {}", io::format_number(v)));
            row.push(v.into());
        }
        println!("{line}");
        table.push_row(row);
    }
    emit(&a.output, "centrality", &table)?;
    Ok(())
}

fn spectrum(a: args::SpectrumArgs) -> Result<()> {
    let z = realisation(&a.urn, &a.draws, a.n, a.seed, a.last.resolve(false))?;
    let g = ThresholdGraph::new(z);
    println!("draws {}", g.sequence());
    for (e, m) in spectral::multiplicities(&g) {
        println!("eigenvalue {e} multiplicity {m}");
    }
    emit(&a.output, "spectrum", &io::spectrum_table(&g))?;
    let report = spectral::verify_eigenpairs(&g);
    let failed: Vec<usize> = report.failures().map(|c| c.m).collect();
    println!("eigenpairs verified {}/{}", report.checks.len() - failed.len(), report.checks.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("eigenpair identity failed for m = {failed:?}")))
    }
}

fn consensus_cmd(a: args::ConsensusArgs) -> Result<()> {
    let n = a.n.or_else(|| a.draws.as_ref().map(|d| d.chars().filter(|c| matches!(c, '0' | '1')).count()));
    let x0 = parse_x0(&a.x0, n)?;
    let z = realisation(&a.urn, &a.draws, Some(x0.len()), a.seed, a.last.resolve(true))?;
    let sys = ConsensusSystem::new(&ThresholdGraph::new(z))?;
    let opts = IterateOptions { t_max: a.t_max, tol: a.tol, record: true, stop_at_convergence: !a.full };
    let tr = consensus::iterate(&sys, &x0, &opts)?;
    println!("draws {}", sys.graph().sequence());
    println!("limit {}", io::format_number(tr.limit));
    match tr.converged_at {
        Some(t) => println!("converged at t = {t}"),
        None => eprintln!("warning: not converged within {} steps (tol {})", a.t_max, a.tol),
    }
    emit(&a.output, "trajectory", &io::trajectory_table(&tr))?;
    Ok(())
}

fn pi_e(a: args::PiEArgs) -> Result<()> {
    require_connected(&a.last, "pi-e")?;
    let law = resolve_law(&a.urn)?;
    let exec = execution(&a.exec);
    let mode = match a.mode {
        PiEMethod::Exact => consensus::PiEMode::Exact { limit: a.limit },
        PiEMethod::Mc => consensus::PiEMode::MonteCarlo { runs: a.runs, seed: a.seed },
    };
    let est = consensus::expected_stationary(law.as_ref(), a.n, mode, exec)?;
    println!("{}", fixed6(&est.pi_e));
    let mut table = match est.mode {
        EstimateMode::Exact => Table::new(["i", "pi_e"]).with_meta("mode", "exact"),
        EstimateMode::MonteCarlo { runs } => Table::new(["i", "pi_e", "std_error"])
            .with_meta("mode", "monte-carlo")
            .with_meta("runs", runs.to_string())
            .with_meta("seed", a.seed.to_string()),
    };
    if let Some(spec) = &a.x0 {
        let x0 = parse_x0(spec, Some(a.n))?;
        let value = est.dot(&x0)?;
        println!("consensus value {}", io::format_number(value));
        table = table.with_meta("consensus_value", io::format_number(value));
    }
    for (idx, p) in est.pi_e.iter().enumerate() {
        let mut row = vec![Cell::from(idx + 1), (*p).into()];
        if let Some(se) = &est.std_error {
            row.push(se[idx].into());
        }
        table.push_row(row);
    }
    emit(&a.output, "pi_e", &table)?;
    Ok(())
}

fn histogram(a: args::HistogramArgs) -> Result<()> {
    require_connected(&a.last, "histogram")?;
    let law = resolve_law(&a.urn)?;
    let exec = execution(&a.exec);
    let x0 = parse_x0(&a.x0, Some(a.n))?;
    let sample = consensus::simulate_consensus(law.as_ref(), &x0, a.runs, a.t, a.seed, exec)?;
    let (mode, theoretical) = if a.n <= a.limit {
        ("exact", consensus::expected_stationary_exact(law.as_ref(), a.n, a.limit, exec)?.dot(&x0)?)
    } else {
        let seed = rng::derive_seed(a.seed, &[1]);
        ("monte-carlo", consensus::expected_stationary_mc(law.as_ref(), a.n, a.theory_runs, seed, exec)?.dot(&x0)?)
    };
    println!("sample mean {} (SE {})", io::format_number(sample.sample_mean), io::format_number(sample.std_error));
    println!("theoretical {} ({mode})", io::format_number(theoretical));
    let table = io::histogram_table(&sample, theoretical, a.t)
        .with_meta("theoretical_mode", mode)
        .with_meta("seed", a.seed.to_string());
    emit(&a.output, "histogram", &table)?;
    Ok(())
}

fn default_memories(n: usize) -> Vec<usize> {
    let mut m: Vec<usize> = [1, 2, 5, 10, 20, 50, 100].into_iter().filter(|&m| m < n).collect();
    m.push(n);
    m
}

fn memory_sweep(a: args::SweepArgs) -> Result<()> {
    require_connected(&a.last, "memory-sweep")?;
    if a.urn.memory.is_some() {
        return Err(config("memory-sweep takes --memories, not --memory"));
    }
    let base = match (a.urn.rho, a.urn.delta, a.urn.red, a.urn.black) {
        (Some(rho), None, None, None) => UrnParams::from_ratios(rho, 1.0)?,
        _ => resolve_urn(&a.urn)?,
    };
    let x0 = parse_x0(&a.x0, Some(a.n))?;
    let memories = if a.memories.is_empty() { default_memories(a.n) } else { a.memories.clone() };
    let cfg = SweepConfig { deltas: a.deltas.clone(), memories, runs: a.runs, seed: a.seed };
    let rows = consensus::memory_sweep(&base, &x0, &cfg, execution(&a.exec))?;
    for r in &rows {
        println!(
            "delta {} M {} value {} (SE {}) baseline {} (SE {})",
            io::format_number(r.delta),
            r.memory,
            io::format_number(r.value),
            io::format_number(r.std_error),
            io::format_number(r.baseline),
            io::format_number(r.baseline_se),
        );
    }
    let table = io::sweep_table(&rows)
        .with_meta("n", a.n.to_string())
        .with_meta("rho", io::format_number(base.rho()))
        .with_meta("runs", a.runs.to_string())
        .with_meta("seed", a.seed.to_string());
    emit(&a.output, "sweep", &table)?;
    Ok(())
}

fn validate(a: args::ValidateArgs) -> Result<()> {
    let results = validation::run_suite(execution(&a.exec))?;
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &results {
        println!("{}  {:width$}  {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{failed} validation checks failed")))
    }
}
