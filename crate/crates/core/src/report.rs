//! Campaign artifacts: per-user CSV, aggregate report, CDF data and the
//! consumption assessment CSV. Every writer has a matching reader.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::consumption::{AssessmentRow, Verdict};
use crate::error::{Error, Result};
use crate::simulation::{CampaignResult, SeReport, TerminalResult};

/// One row of the per-user CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRow {
    pub terminal_id: usize,
    pub x: f64,
    pub y: f64,
    pub kind: String,
    pub los: String,
    /// Empty when the terminal never attached.
    pub serving_cell: Option<usize>,
    pub dl_se: f64,
    pub ul_se: f64,
    /// `none`, `dl`, `ul` or `both`.
    pub outage: String,
}

impl From<&TerminalResult> for UserRow {
    fn from(t: &TerminalResult) -> Self {
        let outage = match (t.dl_outage, t.ul_outage) {
            (false, false) => "none",
            (true, false) => "dl",
            (false, true) => "ul",
            (true, true) => "both",
        };
        Self {
            terminal_id: t.id,
            x: t.position.x,
            y: t.position.y,
            kind: t.kind.name().into(),
            los: t.los.to_string(),
            serving_cell: t.serving_cell,
            dl_se: t.dl_se,
            ul_se: t.ul_se,
            outage: outage.into(),
        }
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

pub fn write_users_csv(path: impl AsRef<Path>, terminals: &[TerminalResult]) -> Result<()> {
    write_rows(path.as_ref(), terminals.iter().map(UserRow::from))
}

pub fn read_users_csv(path: impl AsRef<Path>) -> Result<Vec<UserRow>> {
    read_rows(path.as_ref())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSummary {
    pub mean_se: f64,
    pub cell_edge_se: f64,
    pub outage_count: usize,
}

impl From<&SeReport> for DirectionSummary {
    fn from(r: &SeReport) -> Self {
        Self {
            mean_se: r.mean_se,
            cell_edge_se: r.cell_edge_se,
            outage_count: r.outage_count,
        }
    }
}

/// Aggregate report of one campaign, written as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub scenario: String,
    pub architecture: String,
    pub layout: String,
    pub terminal_kind: String,
    pub attachment: String,
    pub seed: u64,
    pub terminals: usize,
    pub los_terminals: usize,
    pub positions: usize,
    pub dl: DirectionSummary,
    pub ul: DirectionSummary,
}

impl AggregateReport {
    pub fn new(config: &ScenarioConfig, result: &CampaignResult) -> Self {
        Self {
            scenario: config.name.clone(),
            architecture: config.architecture.short_name().into(),
            layout: config.layout.name().into(),
            terminal_kind: config.terminal_kind.name().into(),
            attachment: config.attachment.name().into(),
            seed: config.seed,
            terminals: result.terminals.len(),
            los_terminals: result
                .terminals
                .iter()
                .filter(|t| t.los == crate::channel::LosState::Los)
                .count(),
            positions: result.positions.len(),
            dl: (&result.dl).into(),
            ul: (&result.ul).into(),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("report serializes to TOML")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: format!("{}: {}", path.display(), e.message()),
        })
    }
}

/// Empirical CDF points `(value, i / n)` of the sorted values.
pub fn cdf_points(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as f64 / n))
        .collect()
}

/// Two whitespace-separated columns, one point per line, `#` header.
pub fn write_cdf(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "# se_bps_per_hz cumulative_fraction").map_err(io)?;
    for (v, p) in cdf_points(values) {
        writeln!(w, "{v} {p}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_cdf(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |column| Error::Parse {
            line: i + 1,
            column,
            message: format!("{}: expected two numbers", path.display()),
        };
        let mut cols = line.split_whitespace();
        let v = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(1))?;
        let p = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(2))?;
        out.push((v, p));
    }
    Ok(out)
}

/// One row of the consumption assessment CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionRow {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    #[serde(rename = "RHS")]
    pub rhs: f64,
    pub verdict: Verdict,
}

impl From<&AssessmentRow<f64>> for ConsumptionRow {
    fn from(r: &AssessmentRow<f64>) -> Self {
        Self {
            d1: r.d1,
            d2: r.d2,
            d3: r.d3,
            rhs: r.advantage.rhs,
            verdict: r.advantage.verdict,
        }
    }
}

pub fn write_consumption_csv(path: impl AsRef<Path>, rows: &[AssessmentRow<f64>]) -> Result<()> {
    write_rows(path.as_ref(), rows.iter().map(ConsumptionRow::from))
}

pub fn read_consumption_csv(path: impl AsRef<Path>) -> Result<Vec<ConsumptionRow>> {
    read_rows(path.as_ref())
}
