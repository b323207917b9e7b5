//! Deterministic CSV and JSON emission.
//!
//! Numbers are rounded to 15 significant digits and printed in the shortest
//! form that reads back to the rounded value, with `.` as decimal separator.
//! CSV files use LF line endings; metadata lines start with `#` and precede
//! the header.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analytics::DegreeDistribution;
use crate::consensus::{ConsensusSample, SweepRow, Trajectory};
use crate::error::Result;
use crate::graph::ThresholdGraph;
use crate::spectral;
use crate::urn::{CreationSequence, UrnParams};

/// Formats a float with 15 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("scientific notation parses");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// A CSV table with optional `# key: value` metadata lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    metadata: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), ..Self::default() }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.push((key.to_owned(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv())
    }

    /// `{"metadata": {...}, "columns": [...], "rows": [[...]]}` with floats
    /// rounded as in the CSV form.
    pub fn to_json_value(&self) -> serde_json::Value {
        use serde_json::{json, Map, Value};
        let metadata: Map<String, Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Cell::Int(v) => json!(v),
                            Cell::Float(v) => {
                                format_number(*v).parse::<f64>().ok().map_or(Value::Null, |x| json!(x))
                            }
                            Cell::Text(s) => json!(s),
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "metadata": metadata, "columns": self.header, "rows": rows })
    }
}

/// Writes `contents`, creating parent directories as needed.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Pretty JSON with a trailing newline; key order follows field order.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

/// Vector of numbers joined with `sep`, each formatted by [`format_number`].
pub fn format_vector(v: &[f64], sep: &str) -> String {
    v.iter().map(|x| format_number(*x)).collect::<Vec<_>>().join(sep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsRecord {
    #[serde(rename = "R")]
    pub red: f64,
    #[serde(rename = "B")]
    pub black: f64,
    /// Reinforcement ball count Δ.
    pub delta: f64,
}

impl From<&UrnParams> for ParamsRecord {
    fn from(p: &UrnParams) -> Self {
        Self { red: p.red_initial(), black: p.black_initial(), delta: p.reinforcement() }
    }
}

/// JSON record of one sampled realisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphRecord {
    pub n: usize,
    pub draws: CreationSequence,
    pub params: ParamsRecord,
    /// Kept as a string so 64-bit seeds survive JSON readers that use doubles.
    pub seed: String,
    pub memory: Option<usize>,
}

impl GraphRecord {
    pub fn new(draws: CreationSequence, params: &UrnParams, seed: u64, memory: Option<usize>) -> Self {
        Self { n: draws.len(), draws, params: params.into(), seed: seed.to_string(), memory }
    }
}

/// `u,v` edge list with `v ≤ u`, self-loops included.
pub fn edges_table(g: &ThresholdGraph) -> Table {
    let mut t = Table::new(["u", "v"]);
    for (u, v) in g.edges() {
        t.push_row(vec![u.into(), v.into()]);
    }
    t
}

/// `k,p` rows over `0..=n`, with moments in the metadata.
pub fn degree_table(d: &DegreeDistribution) -> Table {
    let mut t = Table::new(["k", "p"])
        .with_meta("node", d.node.to_string())
        .with_meta("n", d.horizon.to_string())
        .with_meta("mean", format_number(d.mean))
        .with_meta("variance", format_number(d.variance));
    for (k, p) in d.pmf.iter().enumerate() {
        t.push_row(vec![k.into(), (*p).into()]);
    }
    t
}

/// `eigenvalue,multiplicity` rows in ascending order.
pub fn spectrum_table(g: &ThresholdGraph) -> Table {
    let mut t = Table::new(["eigenvalue", "multiplicity"]).with_meta("draws", g.sequence().to_string());
    for (e, m) in spectral::multiplicities(g) {
        t.push_row(vec![e.into(), m.into()]);
    }
    t
}

/// `t,x_1,…,x_n`, one row per recorded state.
pub fn trajectory_table(tr: &Trajectory) -> Table {
    let n = tr.states.first().map_or(0, Vec::len);
    let header = std::iter::once("t".to_owned()).chain((1..=n).map(|i| format!("x_{i}")));
    let mut t = Table::new(header).with_meta("limit", format_number(tr.limit)).with_meta(
        "converged_at",
        tr.converged_at.map_or_else(|| "none".to_owned(), |s| s.to_string()),
    );
    let last = tr.states.len().saturating_sub(1);
    for (idx, state) in tr.states.iter().enumerate() {
        // An unrecorded run keeps x(0) and the final state only.
        let step = if idx == last { tr.steps } else { idx };
        let mut row = vec![Cell::from(step)];
        row.extend(state.iter().map(|&x| Cell::from(x)));
        t.push_row(row);
    }
    t
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(["delta", "M", "value", "std_error", "baseline", "baseline_se"]);
    for r in rows {
        t.push_row(vec![
            r.delta.into(),
            r.memory.into(),
            r.value.into(),
            r.std_error.into(),
            r.baseline.into(),
            r.baseline_se.into(),
        ]);
    }
    t
}

/// `run,consensus_value` with the sample mean and the theoretical value.
pub fn histogram_table(sample: &ConsensusSample, theoretical: f64, t_steps: usize) -> Table {
    let mut t = Table::new(["run", "consensus_value"])
        .with_meta("t", t_steps.to_string())
        .with_meta("runs", sample.values.len().to_string())
        .with_meta("sample_mean", format_number(sample.sample_mean))
        .with_meta("std_error", format_number(sample.std_error))
        .with_meta("theoretical", format_number(theoretical));
    for (run, v) in sample.values.iter().enumerate() {
        t.push_row(vec![run.into(), (*v).into()]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_number(13.0 / 42.0), "0.30952380952381");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1e-20), "0.00000000000000000001");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["u", "v"]);
        assert_eq!(t.to_csv(), "u,v\n");
    }

    #[test]
    fn metadata_precedes_header() {
        let mut t = Table::new(["a", "b"]).with_meta("seed", "7");
        t.push_row(vec![1usize.into(), 0.25.into()]);
        assert_eq!(t.to_csv(), "# seed: 7\na,b\n1,0.25\n");
    }

    #[test]
    fn table_as_json() {
        let mut t = Table::new(["k", "p"]).with_meta("n", "2");
        t.push_row(vec![0usize.into(), (1.0 / 3.0).into()]);
        assert_eq!(
            serde_json::to_string(&t.to_json_value()).unwrap(),
            r#"{"columns":["k","p"],"metadata":{"n":"2"},"rows":[[0,0.333333333333333]]}"#
        );
    }

    #[test]
    fn edge_and_spectrum_tables() {
        let g = build_graph(&CreationSequence::parse("10010").unwrap());
        assert_eq!(edges_table(&g).to_csv(), "u,v\n1,1\n4,1\n4,2\n4,3\n4,4\n");
        assert_eq!(spectrum_table(&g).to_csv(), "# draws: 10010\neigenvalue,multiplicity\n0,2\n1,2\n4,1\n");
    }

    #[test]
    fn graph_json_layout() {
        let p = UrnParams::new(5.0, 5.0, 2.0).unwrap();
        let rec = GraphRecord::new(CreationSequence::parse("101").unwrap(), &p, 42, None);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"draws":[1,0,1],"params":{"R":5.0,"B":5.0,"delta":2.0},"seed":"42","memory":null}"#
        );
    }

    #[test]
    fn files_are_byte_identical() {
        let dir = std::env::temp_dir().join(format!("polya-io-{}", std::process::id()));
        let g = build_graph(&CreationSequence::parse("0110101").unwrap());
        let a = dir.join("a/edges.csv");
        let b = dir.join("b/edges.csv");
        edges_table(&g).write_csv(&a).unwrap();
        edges_table(&g).write_csv(&b).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        fs::remove_dir_all(dir).unwrap();
    }
}
