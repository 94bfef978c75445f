//! Run configuration: one TOML document per reproducible run.
//!
//! Every section is optional and falls back to the reference scenario. Any
//! key can be overridden from the environment as `CHRONON_<SECTION>_<KEY>`;
//! the first underscore after the prefix separates section from key, so
//! `CHRONON_GRID_N_POINTS=4096` sets `grid.n_points`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{locate_front_points, FrontPoints, TrilemmaSettings};
use crate::error::{Error, Result};
use crate::experiments::{Detector, ProtocolConfig, SignalingConfig};
use crate::grid::Grid;
use crate::hamiltonian::{MIN_CELLS_PER_WIDTH, WELL_MARGIN};
use crate::models::{check_perturbation_width, FrontDirection, QuenchScenario, ResponseModel};
use crate::output::{OutputFormat, PlotParams};
use crate::propagate::DEFAULT_DT;
use crate::well::WellConfig;

pub const ENV_PREFIX: &str = "CHRONON_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// TOML integers stop at `i64::MAX`; larger seeds are written as strings.
    #[serde(with = "wide_seed")]
    pub seed: u64,
    pub out: String,
    pub format: OutputFormat,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 0,
            out: "out".into(),
            format: OutputFormat::Both,
        }
    }
}

mod wide_seed {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(u64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(v),
            Raw::Text(t) => t
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("seed `{t}` is not a u64"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n_points: usize,
    /// Room on each side of the well, in well widths.
    pub margin: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n_points: 2048,
            margin: WELL_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WellSection {
    pub x_a: f64,
    pub x_b: f64,
    pub v0: f64,
    pub v1: f64,
    pub t1: f64,
    /// Which bound level (1-based) plays ψ₀ and ψ₁.
    pub level: usize,
}

impl Default for WellSection {
    fn default() -> Self {
        let w = WellConfig::reference();
        WellSection {
            x_a: w.x_a,
            x_b: w.x_b,
            v0: w.v0,
            v1: w.v1,
            t1: w.t1,
            level: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSection {
    pub c_sim: f64,
    /// Evolution step. `0.1·dx²` resolves the whole discrete spectrum; the
    /// default is coarser and accurate for the low bound states.
    pub dt: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        PhysicsSection {
            c_sim: 1.0,
            dt: DEFAULT_DT,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Instantaneous,
    Front,
    LocalPerturbation,
    DiscreteDelay,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "instantaneous" => Ok(ModelKind::Instantaneous),
            "front" => Ok(ModelKind::Front),
            "local_perturbation" => Ok(ModelKind::LocalPerturbation),
            "discrete_delay" => Ok(ModelKind::DiscreteDelay),
            _ => Err(Error::param(
                "model.kind",
                format!(
                    "`{s}` is not one of instantaneous, front, local_perturbation, discrete_delay"
                ),
            )),
        }
    }
}

/// Flat model parameters; only those relevant to `kind` are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    /// Front or delay speed; defaults to `c_sim`.
    pub v: Option<f64>,
    pub direction: FrontDirection,
    pub epsilon: f64,
    /// Perturbation growth speed; defaults to `c_sim`.
    pub growth_speed: Option<f64>,
    pub d_max: Option<f64>,
    /// Delay length; defaults to `L′` from `[front]`.
    pub l_prime: Option<f64>,
    pub jump_offset: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            kind: ModelKind::Instantaneous,
            v: None,
            direction: FrontDirection::Bidirectional,
            epsilon: 0.05,
            growth_speed: None,
            d_max: None,
            l_prime: None,
            jump_offset: 0.0,
        }
    }
}

/// Detectability threshold used to locate A′ and B′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontSection {
    pub n_ensemble: f64,
    pub k_sigma: f64,
    /// Window width; defaults to `L/50`.
    pub width: Option<f64>,
}

impl Default for FrontSection {
    fn default() -> Self {
        FrontSection {
            n_ensemble: 1e6,
            k_sigma: 3.0,
            width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    /// Distance of the detector center C to the right of `x_a`.
    pub l: f64,
    /// Window width; defaults to `L/50`.
    pub width: Option<f64>,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection {
            l: 0.7,
            width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    pub n_total: u64,
    pub delta_t: f64,
    pub bit: u8,
    pub alpha: f64,
}

impl Default for SignalSection {
    fn default() -> Self {
        SignalSection {
            n_total: 100_000,
            delta_t: 0.3,
            bit: 1,
            alpha: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub t_x: f64,
    pub t_y: f64,
    pub t_s: Option<f64>,
    pub n_per_phase: u64,
    pub alpha: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            t_x: 0.4,
            t_y: 0.9,
            t_s: None,
            n_per_phase: 100_000,
            alpha: 0.001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Detector centers; defaults to `x_a + L·{0.1, 0.3, 0.5, 0.7, 0.9}`.
    pub positions: Option<Vec<f64>>,
    /// Absolute sample times; defaults to `t1 + (L/c)·{0.25, 0.5, …, 3}`.
    pub times: Option<Vec<f64>>,
    pub n: u64,
    pub alpha: f64,
    /// Window width; defaults to `L/50`.
    pub width: Option<f64>,
}

impl Default for ScanSection {
    fn default() -> Self {
        ScanSection {
            positions: None,
            times: None,
            n: 100_000,
            alpha: 0.001,
            width: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VboundSection {
    /// Absolute sample times; defaults to `t1 + 0.1·(L/c)·1.5ᵏ`, `k = 0..12`.
    pub schedule: Option<Vec<f64>>,
    pub n: u64,
    pub alpha: f64,
    /// Defaults to `L′` from `[front]`.
    pub l_prime: Option<f64>,
}

impl Default for VboundSection {
    fn default() -> Self {
        VboundSection {
            schedule: None,
            n: 100_000,
            alpha: 0.001,
            l_prime: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParadoxSection {
    /// Sample offsets after the quench; defaults to the trilemma schedule.
    pub offsets: Option<Vec<f64>>,
    /// Front figure time after the quench.
    pub front_dt: f64,
    /// Perturbation figure amplitude and half-width.
    pub epsilon: f64,
    pub d: f64,
    /// Time after the quench at which a perturbation's residual is probed.
    pub perturbation_offset: f64,
}

impl Default for ParadoxSection {
    fn default() -> Self {
        ParadoxSection {
            offsets: None,
            front_dt: 0.5,
            epsilon: 0.05,
            d: 0.1,
            perturbation_offset: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    /// Absolute snapshot times; defaults to `t1 + {0, 0.1, 0.5, 1}`.
    pub times: Option<Vec<f64>>,
}

/// The whole run configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub grid: GridSection,
    pub well: WellSection,
    pub physics: PhysicsSection,
    pub model: ModelSection,
    pub front: FrontSection,
    pub detector: DetectorSection,
    pub signal: SignalSection,
    pub experiment: ExperimentSection,
    pub scan: ScanSection,
    pub vbound: VboundSection,
    pub paradox: ParadoxSection,
    pub evolve: EvolveSection,
}

/// Parses an override value as a TOML scalar or array, falling back to a bare string.
fn parse_override(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

impl RunConfig {
    /// Parses TOML text without environment overrides.
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with_env(text, std::iter::empty::<(String, String)>())
    }

    /// Parses TOML text, then applies `CHRONON_<SECTION>_<KEY>` overrides from `env`.
    pub fn from_toml_with_env<I, K, V>(text: &str, env: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut overrides: Vec<(String, String, String)> = env
            .into_iter()
            .filter_map(|(k, v)| {
                let rest = k.as_ref().strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
                let (section, key) = rest.split_once('_')?;
                Some((section.to_string(), key.to_string(), v.as_ref().to_string()))
            })
            .collect();
        overrides.sort();
        for (section, key, raw) in overrides {
            let entry = table
                .entry(section.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(t) => {
                    t.insert(key, parse_override(&raw));
                }
                _ => {
                    return Err(Error::Config(format!("`{section}` is not a section")));
                }
            }
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_with_env(&text, std::env::vars())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn well_config(&self) -> WellConfig {
        WellConfig {
            x_a: self.well.x_a,
            x_b: self.well.x_b,
            v0: self.well.v0,
            v1: self.well.v1,
            t1: self.well.t1,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::around_well(&self.well_config(), self.grid.n_points, self.grid.margin)
    }

    fn default_width(&self, w: Option<f64>) -> f64 {
        w.unwrap_or(self.well_config().width() / 50.0)
    }

    pub fn front_width(&self) -> f64 {
        self.default_width(self.front.width)
    }

    pub fn detector(&self) -> Detector {
        Detector::at_distance(
            self.well.x_a,
            self.detector.l,
            self.default_width(self.detector.width),
        )
    }

    pub fn signaling_config(&self) -> SignalingConfig {
        SignalingConfig {
            l: self.detector.l,
            detector_width: self.default_width(self.detector.width),
            n_total: self.signal.n_total,
            delta_t: self.signal.delta_t,
            bit: self.signal.bit,
            alpha: self.signal.alpha,
        }
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            l: self.detector.l,
            detector_width: self.default_width(self.detector.width),
            t_x: self.experiment.t_x,
            t_y: self.experiment.t_y,
            t_s: self.experiment.t_s,
            n_per_phase: self.experiment.n_per_phase,
            alpha: self.experiment.alpha,
        }
    }

    pub fn scan_positions(&self) -> Vec<f64> {
        let w = self.well_config();
        self.scan.positions.clone().unwrap_or_else(|| {
            [0.1, 0.3, 0.5, 0.7, 0.9]
                .iter()
                .map(|f| w.x_a + f * w.width())
                .collect()
        })
    }

    pub fn scan_times(&self) -> Vec<f64> {
        let w = self.well_config();
        let unit = w.width() / self.physics.c_sim;
        self.scan
            .times
            .clone()
            .unwrap_or_else(|| (1..=12).map(|k| w.t1 + 0.25 * k as f64 * unit).collect())
    }

    pub fn scan_width(&self) -> f64 {
        self.default_width(self.scan.width)
    }

    pub fn vbound_schedule(&self) -> Vec<f64> {
        let w = self.well_config();
        let unit = w.width() / self.physics.c_sim;
        self.vbound.schedule.clone().unwrap_or_else(|| {
            (0..12)
                .map(|k| w.t1 + 0.1 * unit * 1.5f64.powi(k))
                .collect()
        })
    }

    pub fn evolve_times(&self) -> Vec<f64> {
        let t1 = self.well.t1;
        self.evolve
            .times
            .clone()
            .unwrap_or_else(|| vec![t1, t1 + 0.1, t1 + 0.5, t1 + 1.0])
    }

    pub fn trilemma_settings(&self) -> TrilemmaSettings {
        let mut s = TrilemmaSettings::for_well(&self.well_config());
        if let Some(o) = &self.paradox.offsets {
            s.offsets = o.clone();
        }
        s.n_ensemble = self.front.n_ensemble;
        s.k_sigma = self.front.k_sigma;
        s.detector_width = self.front_width();
        s.perturbation_offset = self.paradox.perturbation_offset;
        s
    }

    pub fn plot_params(&self) -> PlotParams {
        PlotParams {
            front_v: self.model.v.unwrap_or(self.physics.c_sim),
            front_dt_since: self.paradox.front_dt,
            direction: self.model.direction,
            epsilon: self.paradox.epsilon,
            d: self.paradox.d,
        }
    }

    /// Checks every cross-field constraint that can be decided without solving anything.
    pub fn validate(&self) -> Result<()> {
        let well = self.well_config();
        well.validate()?;
        if self.well.level == 0 {
            return Err(Error::param("well.level", "levels are numbered from 1"));
        }
        if self.grid.margin < WELL_MARGIN {
            return Err(Error::Constraint(format!(
                "grid.margin >= {WELL_MARGIN}: got {}",
                self.grid.margin
            )));
        }
        let grid = self.grid()?;
        let limit = well.width() / MIN_CELLS_PER_WIDTH;
        if grid.dx() > limit {
            return Err(Error::UnderResolved {
                dx: grid.dx(),
                limit,
            });
        }
        let c = self.physics.c_sim;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param(
                "physics.c_sim",
                format!("{c} must be positive"),
            ));
        }
        if !(self.physics.dt.is_finite() && self.physics.dt > 0.0) {
            return Err(Error::param(
                "physics.dt",
                format!("{} must be positive", self.physics.dt),
            ));
        }
        let model = self.model_with_l_prime(self.model.l_prime.unwrap_or(well.width()));
        model.validate(c)?;
        if let ResponseModel::LocalPerturbation { growth_speed, .. } = model {
            check_perturbation_width(
                growth_speed * self.paradox.perturbation_offset,
                self.paradox.perturbation_offset,
                c,
            )?;
        }
        if !(self.front.n_ensemble >= 2.0) {
            return Err(Error::param("front.n_ensemble", "must be at least 2"));
        }
        if !(self.front.k_sigma > 0.0) {
            return Err(Error::param("front.k_sigma", "must be positive"));
        }
        if self.front_width() < grid.dx() {
            return Err(Error::Constraint(format!(
                "front.width >= dx: {} < {}",
                self.front_width(),
                grid.dx()
            )));
        }
        self.detector().validate(&grid)?;
        self.signaling_config().validate()?;
        self.protocol_config().validate(c, well.width())?;
        for &p in &self.scan_positions() {
            Detector {
                center: p,
                width: self.scan_width(),
            }
            .validate(&grid)?;
        }
        let times = self.scan_times();
        if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] < well.t1 {
            return Err(Error::Constraint(
                "scan.times: non-empty, strictly increasing and >= t1".into(),
            ));
        }
        let sched = self.vbound_schedule();
        if sched.is_empty() || sched.windows(2).any(|w| w[1] <= w[0]) || sched[0] <= well.t1 {
            return Err(Error::Constraint(
                "vbound.schedule: non-empty, strictly increasing and > t1".into(),
            ));
        }
        if self.scan.n == 0 {
            return Err(Error::param("scan.n", "must be at least 1"));
        }
        if self.vbound.n == 0 {
            return Err(Error::param("vbound.n", "must be at least 1"));
        }
        for (name, a) in [
            ("scan.alpha", self.scan.alpha),
            ("vbound.alpha", self.vbound.alpha),
        ] {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Constraint(format!("0 < {name} < 1: got {a}")));
            }
        }
        if !(self.paradox.d > 0.0 && self.paradox.front_dt >= 0.0) {
            return Err(Error::Constraint(
                "paradox.d > 0 and paradox.front_dt >= 0".into(),
            ));
        }
        Ok(())
    }

    /// The configured model with a concrete delay length.
    pub fn model_with_l_prime(&self, l_prime: f64) -> ResponseModel {
        let c = self.physics.c_sim;
        let m = &self.model;
        match m.kind {
            ModelKind::Instantaneous => ResponseModel::Instantaneous,
            ModelKind::Front => ResponseModel::Front {
                v: m.v.unwrap_or(c),
                direction: m.direction,
            },
            ModelKind::LocalPerturbation => ResponseModel::LocalPerturbation {
                epsilon: m.epsilon,
                growth_speed: m.growth_speed.unwrap_or(c),
                d_max: m.d_max,
            },
            ModelKind::DiscreteDelay => ResponseModel::DiscreteDelay {
                v: m.v.unwrap_or(c),
                l_prime: m.l_prime.unwrap_or(l_prime),
                jump_offset: m.jump_offset,
            },
        }
    }

    /// The scenario under each of the four models, sharing one solve.
    pub fn trilemma_scenarios(&self) -> Result<Vec<QuenchScenario>> {
        let (scenario, fp) = self.build()?;
        let mut cfg = self.clone();
        [
            ModelKind::Instantaneous,
            ModelKind::Front,
            ModelKind::LocalPerturbation,
            ModelKind::DiscreteDelay,
        ]
        .iter()
        .map(|&k| {
            cfg.model.kind = k;
            scenario.with_model(cfg.model_with_l_prime(fp.l_prime))
        })
        .collect()
    }

    /// Builds the scenario: solves both wells, locates A′/B′ and resolves the model.
    pub fn build(&self) -> Result<(QuenchScenario, FrontPoints)> {
        self.validate()?;
        let well = self.well_config();
        let grid = self.grid()?;
        let base = QuenchScenario::new(
            &grid,
            well,
            self.well.level,
            ResponseModel::Instantaneous,
            self.physics.c_sim,
        )?
        .with_dt(self.physics.dt)?;
        let fp = locate_front_points(
            base.psi0(),
            base.psi1(),
            &well,
            self.front_width(),
            self.front.n_ensemble,
            self.front.k_sigma,
        )?;
        let l_prime = self.model.l_prime.unwrap_or(fp.l_prime);
        if self.model.kind == ModelKind::DiscreteDelay && !(l_prime > 0.0) {
            return Err(Error::Constraint(
                "L' > 0: psi1 and psi0 are indistinguishable at the configured ensemble size; set model.l_prime".into(),
            ));
        }
        let scenario = base.with_model(self.model_with_l_prime(l_prime))?;
        Ok((scenario, fp))
    }
}
