//! Serialization of reports and plot series.
//!
//! Floats are written in Rust's shortest round-trip decimal form, and every
//! collection is ordered, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::well_potential;
use crate::models::{front_mix, perturbed_state, FrontDirection, QuenchScenario};
use crate::well::Phase;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            _ => Err(Error::param(
                "format",
                format!("`{s}` is not one of csv, json, both"),
            )),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// Figure-like artifacts that can be redrawn from emitted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// Pre-quench potential and `|ψ₀|`.
    Fig1a,
    /// Post-quench potential and `|ψ₁|`.
    Fig1b,
    /// Front profile: the ψ₀ and ψ₁ parts of the mixture and the potential.
    Fig1c,
    /// ψ₀ against the locally perturbed state.
    Fig2,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [
        PlotKind::Fig1a,
        PlotKind::Fig1b,
        PlotKind::Fig1c,
        PlotKind::Fig2,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::Fig1a => "fig1a",
            PlotKind::Fig1b => "fig1b",
            PlotKind::Fig1c => "fig1c",
            PlotKind::Fig2 => "fig2",
        }
    }
}

/// Parameters for the front and perturbation figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotParams {
    pub front_v: f64,
    pub front_dt_since: f64,
    pub direction: FrontDirection,
    pub epsilon: f64,
    pub d: f64,
}

/// One emitted CSV file as listed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub kind: PlotKind,
    pub file: String,
    pub x_column: String,
    pub series: Vec<String>,
    pub annotations: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlotManifest {
    pub entries: Vec<ManifestEntry>,
}

/// Column-oriented series sharing one x axis; `None` cells are written empty.
struct Series {
    columns: Vec<(String, Vec<Option<f64>>)>,
}

impl Series {
    fn to_csv(&self, xs: &[f64]) -> String {
        let mut out = String::from("x");
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, x) in xs.iter().enumerate() {
            let _ = write!(out, "{x}");
            for (_, col) in &self.columns {
                out.push(',');
                if let Some(v) = col[i] {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }
}

fn all(values: impl Iterator<Item = f64>) -> Vec<Option<f64>> {
    values.map(Some).collect()
}

/// Writes the CSV for `kind` into `dir` and returns its manifest entry.
pub fn emit_plot_data(
    scenario: &QuenchScenario,
    kind: PlotKind,
    params: &PlotParams,
    dir: &Path,
) -> Result<ManifestEntry> {
    let grid = *scenario.grid();
    let well = scenario.well();
    let xs: Vec<f64> = grid.positions().collect();
    let mut annotations = BTreeMap::new();
    let series = match kind {
        PlotKind::Fig1a | PlotKind::Fig1b => {
            let (phase, psi, name) = if kind == PlotKind::Fig1a {
                (Phase::Pre, scenario.psi0(), "abs_psi0")
            } else {
                (Phase::Post, scenario.psi1(), "abs_psi1")
            };
            Series {
                columns: vec![
                    (
                        "potential".into(),
                        all(well_potential(&grid, well, phase).into_iter()),
                    ),
                    (name.into(), all(psi.amplitudes().iter().map(|a| a.norm()))),
                ],
            }
        }
        PlotKind::Fig1c => {
            let mixed = front_mix(
                scenario.psi0(),
                scenario.psi1(),
                well.x_a,
                params.front_v,
                params.front_dt_since,
                params.direction,
            )?;
            let mut from0 = Vec::with_capacity(xs.len());
            let mut from1 = Vec::with_capacity(xs.len());
            for (i, a) in mixed.amplitudes().iter().enumerate() {
                let reached = params.front_dt_since > 0.0 && in_front(xs[i], well.x_a, params);
                from0.push((!reached).then(|| a.norm()));
                from1.push(reached.then(|| a.norm()));
            }
            annotations.insert(
                "front_position".to_string(),
                well.x_a + params.front_v * params.front_dt_since,
            );
            annotations.insert("dt_since".to_string(), params.front_dt_since);
            annotations.insert("norm_sqr".to_string(), mixed.norm_sqr());
            Series {
                columns: vec![
                    ("psi0_region".into(), from0),
                    ("psi1_region".into(), from1),
                    (
                        "potential".into(),
                        all(well_potential(&grid, well, Phase::Post).into_iter()),
                    ),
                ],
            }
        }
        PlotKind::Fig2 => {
            let pert = perturbed_state(scenario.psi0(), well.x_a, params.epsilon, params.d)?;
            annotations.insert("epsilon".to_string(), params.epsilon);
            annotations.insert("d".to_string(), params.d);
            annotations.insert("x_a".to_string(), well.x_a);
            Series {
                columns: vec![
                    (
                        "psi0".into(),
                        all(scenario.psi0().amplitudes().iter().map(|a| a.re)),
                    ),
                    (
                        "psi_delta".into(),
                        all(pert.amplitudes().iter().map(|a| a.re)),
                    ),
                ],
            }
        }
    };
    let file = format!("{}.csv", kind.file_stem());
    write_file(dir, &file, &series.to_csv(&xs))?;
    Ok(ManifestEntry {
        kind,
        file,
        x_column: "x".into(),
        series: series.columns.iter().map(|(n, _)| n.clone()).collect(),
        annotations,
    })
}

fn in_front(x: f64, x_a: f64, p: &PlotParams) -> bool {
    let reach = p.front_v * p.front_dt_since;
    match p.direction {
        FrontDirection::Bidirectional => (x - x_a).abs() <= reach,
        FrontDirection::Rightward => x >= x_a && x - x_a <= reach,
    }
}

/// Emits every figure and a `manifest.json` listing them.
pub fn emit_all_plots(
    scenario: &QuenchScenario,
    params: &PlotParams,
    dir: &Path,
) -> Result<PlotManifest> {
    let entries = PlotKind::ALL
        .iter()
        .map(|&k| emit_plot_data(scenario, k, params, dir))
        .collect::<Result<Vec<_>>>()?;
    let manifest = PlotManifest { entries };
    write_file(dir, "manifest.json", &to_json(&manifest)?)?;
    Ok(manifest)
}
