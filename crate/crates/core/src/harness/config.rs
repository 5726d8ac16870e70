//! Experiment configuration (TOML) and built-in scenarios.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::drops::ServiceArea;
use super::units::{db_to_linear, dbm_to_watts};
use crate::baseline::UlaScenario;
use crate::channel::{Activation, FeasibleSet, Position, Scenario, SPEED_OF_LIGHT};
use crate::coupling::PowerModel;
use crate::error::{PassError, Result};
use crate::penalty::PenaltyParams;
use crate::zf::ZfOptions;

/// Deployment geometry. Waveguides run along x at height `height`, spaced
/// `waveguide_spacing` apart and centred on y = 0; users stand at z = 0 in
/// `x ∈ [d0, d0 + dx]`, `|y| ≤ service_half_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_waveguides: usize,
    pub waveguide_spacing: f64,
    pub height: f64,
    pub d0: f64,
    pub dx: f64,
    /// Defaults to half the waveguide span.
    pub service_half_width: Option<f64>,
    pub x_max: f64,
    pub min_spacing: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            n_waveguides: 5,
            waveguide_spacing: 6.0,
            height: 3.0,
            d0: 15.0,
            dx: 30.0,
            service_half_width: None,
            x_max: 50.0,
            min_spacing: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub frequency_hz: f64,
    pub n_g: f64,
    pub noise_dbm: f64,
    pub sinr_db: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 15e9,
            n_g: 1.4,
            noise_dbm: -80.0,
            sinr_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaConfig {
    /// Pinching antennas per waveguide.
    pub n_antennas: usize,
    pub n_users: usize,
    pub power_model: PowerModel,
    /// `Σ α_m²` per waveguide.
    pub total_radiated: f64,
    pub activation: Activation,
    /// Discrete activation density.
    pub positions_per_meter: f64,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        Self {
            n_antennas: 6,
            n_users: 4,
            power_model: PowerModel::Equal,
            total_radiated: 0.9,
            activation: Activation::Continuous,
            positions_per_meter: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub grid_points: usize,
    pub refine: bool,
    pub threshold: f64,
    pub max_sweeps: usize,
    pub rho0: f64,
    pub epsilon: f64,
    pub violation_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = PenaltyParams::default();
        let z = ZfOptions::default();
        Self {
            grid_points: z.grid_points,
            refine: z.refine,
            threshold: z.threshold,
            max_sweeps: z.max_sweeps,
            rho0: p.rho0,
            epsilon: p.epsilon,
            violation_tol: p.violation_tol,
            max_inner: p.max_inner,
            max_outer: p.max_outer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub ula_antennas: usize,
    pub origin: [f64; 3],
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            ula_antennas: 5,
            origin: [0.0, 0.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Values: SINR target, dB.
    PowerVsSinr,
    /// Values: `d0`, m. The range `x_max` moves with the service area.
    PowerVsDistance,
    /// Values: total pinching antennas `N·M`; the fixed array gets as many elements.
    PowerVsAntennas,
    /// Values: discrete positions per metre.
    PowerVsDiscrete,
    /// Values: penalty reduction factor.
    ConvergenceTrace,
    /// Values: channel error bound, in channel-entry units.
    SinrVsChannelError,
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::PowerVsSinr => "power_vs_sinr",
            SweepKind::PowerVsDistance => "power_vs_distance",
            SweepKind::PowerVsAntennas => "power_vs_antennas",
            SweepKind::PowerVsDiscrete => "power_vs_discrete",
            SweepKind::ConvergenceTrace => "convergence_trace",
            SweepKind::SinrVsChannelError => "sinr_vs_channel_error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Penalty,
    Zf,
    Conventional,
    /// Hybrid massive-array reference; not implemented, reported as unsupported.
    Massive,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Penalty => "penalty",
            Algorithm::Zf => "zf",
            Algorithm::Conventional => "conventional",
            Algorithm::Massive => "massive",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = PassError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "penalty" => Ok(Algorithm::Penalty),
            "zf" => Ok(Algorithm::Zf),
            "conventional" => Ok(Algorithm::Conventional),
            "massive" => Ok(Algorithm::Massive),
            other => Err(PassError::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sweep: SweepKind,
    pub values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub n_drops: usize,
    pub seed: u64,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sweep: SweepKind::PowerVsSinr,
            values: vec![10.0, 15.0, 20.0, 25.0, 30.0],
            algorithms: vec![Algorithm::Penalty, Algorithm::Zf, Algorithm::Conventional],
            n_drops: 20,
            seed: 1,
            output: PathBuf::from("results.csv"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub radio: RadioConfig,
    pub antennas: AntennaConfig,
    pub solver: SolverConfig,
    pub baseline: BaselineConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// 20 drops, 1e5 search points.
    Desk,
    /// 100 drops, 1e6 search points.
    Paper,
}

impl std::str::FromStr for Profile {
    type Err = PassError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(PassError::Config(format!("unknown profile '{other}'"))),
        }
    }
}

/// Built-in scenario names accepted wherever a config path is.
pub const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    ("paper_defaults", "power versus SINR target, 10-30 dB, all algorithms"),
    ("headline", "SINR target 20 dB, ZF design against the fixed array"),
    ("power_vs_distance", "service-area offset d0 from 15 to 45 m"),
    ("power_vs_antennas", "total pinching antennas from 10 to 50"),
    ("power_vs_discrete", "discrete positions per metre from 10 to 300"),
    ("convergence_trace", "penalty traces for reduction factors 0.1 and 0.5"),
    ("sinr_vs_channel_error", "achieved SINR under bounded channel error"),
];

impl ExperimentConfig {
    pub fn builtin(name: &str) -> Option<Self> {
        let mut cfg = Self::default();
        let run = &mut cfg.run;
        match name {
            "paper_defaults" | "power_vs_sinr" => {}
            "headline" => {
                run.values = vec![20.0];
                run.algorithms = vec![Algorithm::Zf, Algorithm::Conventional];
            }
            "power_vs_distance" => {
                run.sweep = SweepKind::PowerVsDistance;
                run.values = vec![15.0, 25.0, 35.0, 45.0];
            }
            "power_vs_antennas" => {
                run.sweep = SweepKind::PowerVsAntennas;
                run.values = vec![10.0, 20.0, 30.0, 40.0, 50.0];
            }
            "power_vs_discrete" => {
                run.sweep = SweepKind::PowerVsDiscrete;
                run.values = vec![10.0, 50.0, 100.0, 300.0];
                run.algorithms = vec![Algorithm::Zf];
                cfg.antennas.activation = Activation::Discrete;
            }
            "convergence_trace" => {
                run.sweep = SweepKind::ConvergenceTrace;
                run.values = vec![0.1, 0.5];
                run.algorithms = vec![Algorithm::Penalty, Algorithm::Zf];
                run.n_drops = 1;
            }
            "sinr_vs_channel_error" => {
                run.sweep = SweepKind::SinrVsChannelError;
                run.values = vec![0.0, 1e-5, 2e-5, 5e-5, 1e-4];
            }
            _ => return None,
        }
        Some(cfg)
    }

    /// Reads a TOML file, or a built-in scenario when `source` names one and
    /// no such file exists.
    pub fn load(source: &str) -> Result<Self> {
        let path = Path::new(source);
        if !path.exists() {
            if let Some(cfg) = Self::builtin(source) {
                return Ok(cfg);
            }
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| PassError::Config(format!("cannot read '{source}': {e}")))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| PassError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn apply_profile(&mut self, profile: Profile) {
        match profile {
            Profile::Desk => {
                self.run.n_drops = 20;
                self.solver.grid_points = 100_000;
            }
            Profile::Paper => {
                self.run.n_drops = 100;
                self.solver.grid_points = 1_000_000;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(PassError::Config(m.to_string()));
        let g = &self.geometry;
        if g.n_waveguides == 0 || self.antennas.n_users == 0 || self.antennas.n_antennas == 0 {
            return err("waveguide, user and antenna counts must be >= 1");
        }
        if self.antennas.n_users > g.n_waveguides {
            return err("need at least as many waveguides as users");
        }
        if !(g.dx > 0.0 && g.x_max > 0.0 && g.min_spacing >= 0.0 && g.height.is_finite()) {
            return err("geometry lengths must be positive");
        }
        if g.service_half_width.is_some_and(|w| !(w >= 0.0)) {
            return err("service_half_width must be >= 0");
        }
        if !(self.radio.frequency_hz > 0.0 && self.radio.n_g > 0.0) {
            return err("frequency and n_g must be > 0");
        }
        if !(self.antennas.total_radiated > 0.0 && self.antennas.total_radiated <= 1.0) {
            return err("total_radiated must lie in (0, 1]");
        }
        if !(self.antennas.positions_per_meter > 0.0) {
            return err("positions_per_meter must be > 0");
        }
        if self.solver.grid_points < 2 {
            return err("grid_points must be >= 2");
        }
        if !(self.solver.epsilon > 0.0 && self.solver.epsilon < 1.0 && self.solver.rho0 > 0.0) {
            return err("need rho0 > 0 and 0 < epsilon < 1");
        }
        if self.baseline.ula_antennas == 0 {
            return err("ula_antennas must be >= 1");
        }
        let run = &self.run;
        if run.n_drops == 0 {
            return err("n_drops must be >= 1");
        }
        if run.values.is_empty() || run.values.iter().any(|v| !v.is_finite()) {
            return err("sweep values must be a nonempty list of finite numbers");
        }
        if run.values.windows(2).any(|w| w[0] > w[1]) {
            return err("sweep values must be sorted ascending");
        }
        if run.algorithms.is_empty() {
            return err("at least one algorithm is required");
        }
        if run.sweep == SweepKind::PowerVsAntennas {
            for v in &run.values {
                let per = v / g.n_waveguides as f64;
                if !(per >= 1.0 && per.fract() == 0.0) {
                    return Err(PassError::Config(format!(
                        "antenna count {v} is not a positive multiple of {} waveguides",
                        g.n_waveguides
                    )));
                }
            }
        }
        Ok(())
    }

    /// Copy of this config with the sweep variable set to `value`.
    pub fn at(&self, value: f64) -> Self {
        let mut cfg = self.clone();
        match self.run.sweep {
            SweepKind::PowerVsSinr | SweepKind::SinrVsChannelError => {}
            SweepKind::PowerVsDistance => {
                let margin = self.geometry.x_max - self.geometry.d0 - self.geometry.dx;
                cfg.geometry.d0 = value;
                cfg.geometry.x_max = value + self.geometry.dx + margin;
            }
            SweepKind::PowerVsAntennas => {
                cfg.antennas.n_antennas = (value / self.geometry.n_waveguides as f64).round() as usize;
                cfg.baseline.ula_antennas = value.round() as usize;
            }
            SweepKind::PowerVsDiscrete => {
                cfg.antennas.activation = Activation::Discrete;
                cfg.antennas.positions_per_meter = value;
            }
            SweepKind::ConvergenceTrace => cfg.solver.epsilon = value,
        }
        if self.run.sweep == SweepKind::PowerVsSinr {
            cfg.radio.sinr_db = value;
        }
        cfg
    }

    pub fn lambda(&self) -> f64 {
        SPEED_OF_LIGHT / self.radio.frequency_hz
    }

    pub fn service_area(&self) -> ServiceArea {
        let g = &self.geometry;
        let half = g
            .service_half_width
            .unwrap_or(0.5 * g.waveguide_spacing * (g.n_waveguides - 1) as f64);
        ServiceArea {
            x_min: g.d0,
            x_max: g.d0 + g.dx,
            y_min: -half,
            y_max: half,
            z: 0.0,
        }
    }

    pub fn waveguide_y(&self) -> Vec<f64> {
        let g = &self.geometry;
        let mid = 0.5 * (g.n_waveguides - 1) as f64;
        (0..g.n_waveguides).map(|n| (n as f64 - mid) * g.waveguide_spacing).collect()
    }

    pub fn feasible_set(&self) -> Result<FeasibleSet> {
        match self.antennas.activation {
            Activation::Continuous => FeasibleSet::continuous(self.geometry.x_max),
            Activation::Discrete => FeasibleSet::discrete_per_meter(self.geometry.x_max, self.antennas.positions_per_meter),
        }
    }

    pub fn scenario(&self, users: Vec<Position>) -> Result<Scenario> {
        let lambda = self.lambda();
        let k = users.len();
        let scenario = Scenario {
            waveguide_y: self.waveguide_y(),
            waveguide_z: vec![self.geometry.height; self.geometry.n_waveguides],
            users,
            lambda,
            n_g: self.radio.n_g,
            eta: lambda / (4.0 * std::f64::consts::PI),
            noise_powers: vec![dbm_to_watts(self.radio.noise_dbm); k],
            sinr_targets: vec![db_to_linear(self.radio.sinr_db); k],
            ladder: self.antennas.power_model.ladder(self.antennas.n_antennas, self.antennas.total_radiated)?,
            feasible: self.feasible_set()?,
            min_spacing: self.geometry.min_spacing,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn ula(&self, scenario: &Scenario) -> UlaScenario {
        let [x, y, z] = self.baseline.origin;
        UlaScenario::from_scenario(scenario, self.baseline.ula_antennas, Position::new(x, y, z))
    }

    pub fn zf_options(&self) -> ZfOptions {
        ZfOptions {
            grid_points: self.solver.grid_points,
            refine: self.solver.refine,
            threshold: self.solver.threshold,
            max_sweeps: self.solver.max_sweeps,
            ..ZfOptions::default()
        }
    }

    pub fn penalty_params(&self) -> PenaltyParams {
        PenaltyParams {
            rho0: self.solver.rho0,
            epsilon: self.solver.epsilon,
            inner_tol: self.solver.threshold,
            violation_tol: self.solver.violation_tol,
            max_inner: self.solver.max_inner,
            max_outer: self.solver.max_outer,
            grid_points: self.solver.grid_points,
            refine: self.solver.refine,
            position_tol: self.solver.threshold,
            ..PenaltyParams::default()
        }
    }
}
