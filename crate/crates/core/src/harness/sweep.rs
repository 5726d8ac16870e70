//! Sweep runner and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use nalgebra::DMatrix;

use super::config::{Algorithm, ExperimentConfig, SweepKind};
use super::drops::{drop_users, rng_for, ChannelErrorModel, Purpose};
use super::units::{linear_to_db, watts_to_dbm};
use crate::baseline::{solve_conventional, ula_channel};
use crate::channel::{received_sinr, Scenario};
use crate::error::{PassError, Result};
use crate::penalty::run_penalty_with_table;
use crate::search::{ResponseTable, SearchGrid};
use crate::txbf::PowerMinOptions;
use crate::zf::{sweep_positions_with_table, ZfSolution};
use crate::C64;

pub const CSV_HEADER: [&str; 9] = [
    "sweep_value",
    "drop",
    "algorithm",
    "power_model",
    "activation",
    "total_power_dbm",
    "mean_sinr_db",
    "converged",
    "runtime_ms",
];

pub const TRACE_HEADER: [&str; 7] = ["sweep_value", "drop", "algorithm", "outer", "inner", "power_w", "violation"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    NotConverged,
    Failed,
    Unsupported,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "true",
            Status::NotConverged => "false",
            Status::Failed => "failed",
            Status::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropLabel {
    Index(usize),
    Mean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub drop: DropLabel,
    pub algorithm: Algorithm,
    pub power_model: String,
    pub activation: String,
    /// Linear transmit power, W; NaN when the solver failed.
    pub power_w: f64,
    /// Mean per-user SINR, linear.
    pub mean_sinr: f64,
    pub status: Status,
    /// Summary rows: drops that converged out of drops attempted.
    pub converged_count: Option<(usize, usize)>,
    pub runtime_ms: f64,
}

impl Row {
    pub fn power_dbm(&self) -> f64 {
        watts_to_dbm(self.power_w)
    }

    fn record(&self) -> Vec<String> {
        vec![
            format_value(self.sweep_value),
            match self.drop {
                DropLabel::Index(i) => i.to_string(),
                DropLabel::Mean => "mean".into(),
            },
            self.algorithm.as_str().into(),
            self.power_model.clone(),
            self.activation.clone(),
            format_float(self.power_dbm()),
            format_float(linear_to_db(self.mean_sinr)),
            match self.converged_count {
                Some((ok, total)) => format!("{ok}/{total}"),
                None => self.status.as_str().into(),
            },
            format!("{:.3}", self.runtime_ms),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub sweep_value: f64,
    pub drop: usize,
    pub algorithm: Algorithm,
    pub outer: usize,
    pub inner: usize,
    pub power_w: f64,
    pub violation: f64,
}

fn format_value(v: f64) -> String {
    format!("{v}")
}

fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "NaN".into()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock runtimes; otherwise the column is 0 so that repeated
    /// runs produce identical files.
    pub timing: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutput {
    pub rows: Vec<Row>,
    pub traces: Vec<TraceRow>,
    /// Per-drop solver failures.
    pub failures: usize,
}

impl SweepOutput {
    /// Summary row for (`value`, `algorithm`).
    pub fn mean(&self, value: f64, algorithm: Algorithm) -> Option<&Row> {
        self.rows
            .iter()
            .find(|r| r.drop == DropLabel::Mean && r.sweep_value == value && r.algorithm == algorithm)
    }

    /// Per-drop rows for (`value`, `algorithm`).
    pub fn drops(&self, value: f64, algorithm: Algorithm) -> impl Iterator<Item = &Row> {
        self.rows
            .iter()
            .filter(move |r| matches!(r.drop, DropLabel::Index(_)) && r.sweep_value == value && r.algorithm == algorithm)
    }
}

struct Outcome {
    power_w: f64,
    mean_sinr: f64,
    status: Status,
}

impl Outcome {
    fn failed() -> Self {
        Self {
            power_w: f64::NAN,
            mean_sinr: f64::NAN,
            status: Status::Failed,
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// SINRs of `w` over `psi`, after a channel perturbation when the sweep
/// models estimation error.
fn evaluate(
    cfg: &ExperimentConfig,
    value: f64,
    drop: usize,
    scenario: &Scenario,
    truth: impl FnOnce(&mut rand_chacha::ChaCha8Rng, &ChannelErrorModel) -> Result<DMatrix<C64>>,
    w: &DMatrix<C64>,
    reported: &[f64],
) -> Result<f64> {
    if cfg.run.sweep != SweepKind::SinrVsChannelError {
        return Ok(mean(reported));
    }
    let model = ChannelErrorModel::new(value)?;
    let mut rng = rng_for(cfg.run.seed, drop as u64, Purpose::ChannelError);
    let psi = truth(&mut rng, &model)?;
    Ok(mean(&received_sinr(&psi, w, &scenario.noise_powers)))
}

/// Runs every sweep value × drop × algorithm and aggregates mean rows.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut out = SweepOutput::default();
    for &value in &cfg.run.values {
        let point = cfg.at(value);
        let power_model = point.antennas.power_model.as_str().to_string();
        let activation = point.antennas.activation.as_str().to_string();
        let area = point.service_area();
        let mut per_algo: Vec<Vec<Row>> = vec![Vec::new(); cfg.run.algorithms.len()];

        for drop in 0..cfg.run.n_drops {
            let users = drop_users(&area, point.antennas.n_users, cfg.run.seed, drop as u64);
            let scenario = point.scenario(users)?;
            let needs_pinching = cfg
                .run
                .algorithms
                .iter()
                .any(|a| matches!(a, Algorithm::Zf | Algorithm::Penalty));
            let table = if needs_pinching {
                Some(ResponseTable::new(
                    &scenario,
                    SearchGrid::new(&scenario.feasible, point.solver.grid_points)?,
                )?)
            } else {
                None
            };
            let mut zf_time = 0.0;
            let zf_result: Option<std::result::Result<ZfSolution, String>> = table.as_ref().map(|table| {
                let t = Instant::now();
                let sol = scenario
                    .uniform_layout()
                    .and_then(|init| sweep_positions_with_table(&scenario, &init, &point.zf_options(), table))
                    .map_err(|e| e.to_string());
                zf_time = t.elapsed().as_secs_f64() * 1e3;
                sol
            });
            let run_zf = || zf_result.clone().expect("table built whenever a pinching design is requested");

            for (slot, &algorithm) in cfg.run.algorithms.iter().enumerate() {
                let start = Instant::now();
                let result: Result<Outcome> = match algorithm {
                    Algorithm::Massive => Ok(Outcome {
                        power_w: f64::NAN,
                        mean_sinr: f64::NAN,
                        status: Status::Unsupported,
                    }),
                    Algorithm::Zf => run_zf().map_err(PassError::InfeasibleInstance).and_then(|sol| {
                        out.traces.extend(sol.trace.iter().enumerate().map(|(i, &p)| TraceRow {
                            sweep_value: value,
                            drop,
                            algorithm,
                            outer: i,
                            inner: 0,
                            power_w: p,
                            violation: 0.0,
                        }));
                        let sinr = evaluate(
                            &point,
                            value,
                            drop,
                            &scenario,
                            |rng, m| m.perturb_pinching(&scenario, &sol.layout, rng),
                            &sol.w,
                            &sol.achieved_sinrs,
                        )?;
                        Ok(Outcome {
                            power_w: sol.total_power,
                            mean_sinr: sinr,
                            status: if sol.converged { Status::Converged } else { Status::NotConverged },
                        })
                    }),
                    Algorithm::Penalty => run_zf().map_err(PassError::InfeasibleInstance).and_then(|sol| {
                        let rep = run_penalty_with_table(
                            &scenario,
                            &sol.layout,
                            &point.penalty_params(),
                            table.as_ref().unwrap(),
                        )?;
                        if rep.monotonicity_breaks > 0 {
                            warn!("drop {drop}: {} non-descent block updates", rep.monotonicity_breaks);
                        }
                        out.traces.extend(rep.trace.iter().map(|t| TraceRow {
                            sweep_value: value,
                            drop,
                            algorithm,
                            outer: t.outer,
                            inner: t.inner,
                            power_w: t.power_w,
                            violation: t.violation,
                        }));
                        let sinr = evaluate(
                            &point,
                            value,
                            drop,
                            &scenario,
                            |rng, m| m.perturb_pinching(&scenario, &rep.layout, rng),
                            &rep.w,
                            &rep.achieved_sinrs,
                        )?;
                        Ok(Outcome {
                            power_w: rep.total_power,
                            mean_sinr: sinr,
                            status: if rep.converged { Status::Converged } else { Status::NotConverged },
                        })
                    }),
                    Algorithm::Conventional => {
                        let ula = point.ula(&scenario);
                        let opts = PowerMinOptions {
                            max_iters: 5000,
                            ..PowerMinOptions::default()
                        };
                        solve_conventional(&ula, &opts).and_then(|res| {
                            let nominal = ula_channel(&ula)?;
                            let sinr = evaluate(
                                &point,
                                value,
                                drop,
                                &scenario,
                                |rng, m| Ok(m.perturb_columns(&nominal, rng)),
                                &res.w,
                                &res.achieved_sinrs,
                            )?;
                            Ok(Outcome {
                                power_w: res.total_power,
                                mean_sinr: sinr,
                                status: if res.converged { Status::Converged } else { Status::NotConverged },
                            })
                        })
                    }
                };
                // Penalty runs start from the ZF layout, so they are charged for it.
                let elapsed = match algorithm {
                    Algorithm::Zf => zf_time,
                    Algorithm::Penalty => start.elapsed().as_secs_f64() * 1e3 + zf_time,
                    _ => start.elapsed().as_secs_f64() * 1e3,
                };
                let outcome = result.unwrap_or_else(|e| {
                    warn!("value {value}, drop {drop}, {}: {e}", algorithm.as_str());
                    out.failures += 1;
                    Outcome::failed()
                });
                per_algo[slot].push(Row {
                    sweep_value: value,
                    drop: DropLabel::Index(drop),
                    algorithm,
                    power_model: power_model.clone(),
                    activation: activation.clone(),
                    power_w: outcome.power_w,
                    mean_sinr: outcome.mean_sinr,
                    status: outcome.status,
                    converged_count: None,
                    runtime_ms: if opts.timing { elapsed } else { 0.0 },
                });
            }
        }

        for (slot, rows) in per_algo.into_iter().enumerate() {
            let algorithm = cfg.run.algorithms[slot];
            let ok: Vec<&Row> = rows
                .iter()
                .filter(|r| matches!(r.status, Status::Converged | Status::NotConverged))
                .collect();
            let converged = rows.iter().filter(|r| r.status == Status::Converged).count();
            let summary = Row {
                sweep_value: value,
                drop: DropLabel::Mean,
                algorithm,
                power_model: power_model.clone(),
                activation: activation.clone(),
                power_w: if ok.is_empty() { f64::NAN } else { mean(&ok.iter().map(|r| r.power_w).collect::<Vec<_>>()) },
                mean_sinr: if ok.is_empty() { f64::NAN } else { mean(&ok.iter().map(|r| r.mean_sinr).collect::<Vec<_>>()) },
                status: if algorithm == Algorithm::Massive { Status::Unsupported } else { Status::Converged },
                converged_count: (algorithm != Algorithm::Massive).then_some((converged, rows.len())),
                runtime_ms: mean(&rows.iter().map(|r| r.runtime_ms).collect::<Vec<_>>()),
            };
            info!(
                "{} = {value}: {} mean {:.2} dBm over {}/{} drops",
                cfg.run.sweep.as_str(),
                algorithm.as_str(),
                summary.power_dbm(),
                ok.len(),
                rows.len()
            );
            out.rows.extend(rows);
            out.rows.push(summary);
        }
    }
    Ok(out)
}

pub fn write_rows<W: Write>(writer: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| PassError::Config(format!("csv write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    w.flush().map_err(|e| PassError::Config(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn write_traces<W: Write>(writer: W, traces: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| PassError::Config(format!("csv write failed: {e}"));
    w.write_record(TRACE_HEADER).map_err(io)?;
    for t in traces {
        w.write_record([
            format_value(t.sweep_value),
            t.drop.to_string(),
            t.algorithm.as_str().to_string(),
            t.outer.to_string(),
            t.inner.to_string(),
            format!("{:.9e}", t.power_w),
            format!("{:.9e}", t.violation),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| PassError::Config(format!("csv write failed: {e}")))?;
    Ok(())
}

/// `results.csv` → `results.trace.csv`.
pub fn trace_path(out: &Path) -> PathBuf {
    out.with_extension("trace.csv")
}

/// Writes the result CSV and its trace file next to it.
pub fn write_outputs(out: &Path, output: &SweepOutput) -> Result<()> {
    let open = |p: &Path| {
        std::fs::File::create(p).map_err(|e| PassError::Config(format!("cannot create '{}': {e}", p.display())))
    };
    write_rows(std::io::BufWriter::new(open(out)?), &output.rows)?;
    write_traces(std::io::BufWriter::new(open(&trace_path(out))?), &output.traces)
}
