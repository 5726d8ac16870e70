//! Low-complexity joint design built on zero-forcing transmit beamforming.
//!
//! With `W = Ψ(ΨᴴΨ)⁻¹P^{1/2}` every user sees `SINR_k = P_k/σ_k²`, so the
//! optimal powers are `P_k = γ_k σ_k²` whatever the layout, and the layout
//! only has to minimise `tr((ΨᴴΨ)⁻¹P)`. Positions are updated one antenna at
//! a time. While antennas of waveguide `n` move, only row `n` of `Ψ` changes:
//! writing `ΨᴴΨ = a_n a_nᴴ + B_nB_nᴴ` and `C = (B_nB_nᴴ)⁻¹`,
//!
//! ```text
//! tr((ΨᴴΨ)⁻¹P) = tr(CP) - (a_nᴴ C P C a_n) / (1 + a_nᴴ C a_n)
//! ```
//!
//! so one K×K inverse per waveguide serves every candidate position.

use log::warn;
use nalgebra::DMatrix;

use crate::channel::{effective_channel, received_sinr, PinchingLayout, Scenario};
use crate::error::{invalid, PassError, Result};
use crate::linalg::{condition_number, hermitian_form, hpd_inverse};
use crate::search::{search_interval, CoordinateSearch, ResponseTable, SearchGrid, DEFAULT_GRID_POINTS};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct ZfOptions {
    /// Search points over `[0, x_max]` for continuous activation.
    pub grid_points: usize,
    /// Polish each continuous grid winner inside its cell.
    pub refine: bool,
    /// Stop when a full sweep lowers the objective by less than this fraction.
    pub threshold: f64,
    pub max_sweeps: usize,
    pub max_condition: f64,
}

impl Default for ZfOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            refine: true,
            threshold: 1e-3,
            max_sweeps: 30,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZfSolution {
    pub w: DMatrix<C64>,
    pub layout: PinchingLayout,
    pub powers: Vec<f64>,
    /// `tr((ΨᴴΨ)⁻¹P)`, W.
    pub total_power: f64,
    pub achieved_sinrs: Vec<f64>,
    /// Completed sweeps.
    pub iterations: usize,
    /// Objective before the first sweep and after each sweep.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Some waveguide had `B_nB_nᴴ` singular (e.g. N = K) and candidates were
    /// scored by direct inversion.
    pub used_fallback: bool,
}

/// `P_k = γ_k σ_k²`.
pub fn optimal_powers(gammas: &[f64], noise_powers: &[f64]) -> Vec<f64> {
    gammas.iter().zip(noise_powers).map(|(g, s)| g * s).collect()
}

fn gram_inverse(psi: &DMatrix<C64>, max_condition: f64) -> Result<DMatrix<C64>> {
    let condition = condition_number(psi).powi(2);
    if !(condition <= max_condition) {
        return Err(PassError::SingularChannel { condition });
    }
    hpd_inverse(&psi.ad_mul(psi)).ok_or(PassError::SingularChannel { condition })
}

fn weighted_trace(inv: &DMatrix<C64>, powers: &[f64]) -> f64 {
    powers.iter().enumerate().map(|(k, p)| p * inv[(k, k)].re).sum()
}

/// `tr((ΨᴴΨ)⁻¹P)`.
pub fn zf_objective(psi: &DMatrix<C64>, powers: &[f64]) -> Result<f64> {
    if powers.len() != psi.ncols() {
        return Err(invalid("need one power per user"));
    }
    let inv = gram_inverse(psi, ZfOptions::default().max_condition)?;
    Ok(weighted_trace(&inv, powers))
}

/// `W = Ψ(ΨᴴΨ)⁻¹P^{1/2}`.
pub fn zf_matrix(psi: &DMatrix<C64>, powers: &[f64]) -> Result<DMatrix<C64>> {
    if powers.len() != psi.ncols() {
        return Err(invalid("need one power per user"));
    }
    let inv = gram_inverse(psi, ZfOptions::default().max_condition)?;
    let mut w = psi * inv;
    for (k, p) in powers.iter().enumerate() {
        w.column_mut(k).scale_mut(p.sqrt());
    }
    Ok(w)
}

/// Rank-one split of the ZF objective for a fixed remainder.
///
/// `rest_inv = (B_nB_nᴴ)⁻¹`, `weighted = rest_inv·P·rest_inv` and
/// `base = tr(rest_inv·P)`; returns `tr((a aᴴ + B_nB_nᴴ)⁻¹P)`.
pub fn sherman_morrison_objective(
    a: &[C64],
    rest_inv: &DMatrix<C64>,
    weighted: &DMatrix<C64>,
    base: f64,
) -> f64 {
    base - hermitian_form(a, weighted) / (1.0 + hermitian_form(a, rest_inv))
}

/// Precomputed pieces of [`sherman_morrison_objective`] for one waveguide.
pub struct RankOneSplit {
    pub rest_inv: DMatrix<C64>,
    pub weighted: DMatrix<C64>,
    pub base: f64,
}

impl RankOneSplit {
    /// Splits off row `n` of `psi`; `None` when the remaining rows cannot
    /// span all users (`N - 1 < K`) or are too badly conditioned.
    pub fn new(psi: &DMatrix<C64>, n: usize, powers: &[f64], max_condition: f64) -> Option<Self> {
        if psi.nrows() <= psi.ncols() {
            return None;
        }
        let rest = psi.clone().remove_row(n);
        if !(condition_number(&rest).powi(2) <= max_condition) {
            return None;
        }
        let rest_inv = hpd_inverse(&rest.ad_mul(&rest))?;
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            powers.len(),
            powers.iter().map(|&v| C64::new(v, 0.0)),
        ));
        let weighted = &rest_inv * p * &rest_inv;
        let base = weighted_trace(&rest_inv, powers);
        Some(Self {
            rest_inv,
            weighted,
            base,
        })
    }

    pub fn objective(&self, a: &[C64]) -> f64 {
        sherman_morrison_objective(a, &self.rest_inv, &self.weighted, self.base)
    }
}

/// Runs the element-wise ZF position search from `init` and returns the
/// final ZF design.
pub fn sweep_positions(scenario: &Scenario, init: &PinchingLayout, opts: &ZfOptions) -> Result<ZfSolution> {
    let grid = SearchGrid::new(&scenario.feasible, opts.grid_points)?;
    let table = ResponseTable::new(scenario, grid)?;
    sweep_positions_with_table(scenario, init, opts, &table)
}

/// [`sweep_positions`] with a caller-provided response table.
pub fn sweep_positions_with_table(
    scenario: &Scenario,
    init: &PinchingLayout,
    opts: &ZfOptions,
    table: &ResponseTable,
) -> Result<ZfSolution> {
    scenario.validate()?;
    init.validate(&scenario.feasible, scenario.min_spacing)?;
    let (n_wg, m_ant, k_users) = (scenario.n_waveguides(), scenario.n_antennas(), scenario.n_users());
    let powers = optimal_powers(&scenario.sinr_targets, &scenario.noise_powers);

    let mut layout = init.clone();
    let channel = effective_channel(scenario, &layout)?;
    let mut psi = channel.psi;
    let mut phis = channel.phis;
    let mut objective = {
        let inv = gram_inverse(&psi, opts.max_condition)?;
        weighted_trace(&inv, &powers)
    };
    let mut trace = vec![objective];
    let mut used_fallback = false;
    let mut converged = false;
    let mut iterations = 0;

    let search = CoordinateSearch {
        scenario,
        table,
        refine: opts.refine,
    };
    let mut a = vec![C64::new(0.0, 0.0); k_users];

    while iterations < opts.max_sweeps {
        iterations += 1;
        for n in 0..n_wg {
            let split = RankOneSplit::new(&psi, n, &powers, opts.max_condition);
            if split.is_none() {
                used_fallback = true;
            }
            let rest_gram = if split.is_none() {
                let rest = psi.clone().remove_row(n);
                Some(rest.ad_mul(&rest))
            } else {
                None
            };
            for m in 0..m_ant {
                let Some(interval) = search_interval(&layout, n, m, &scenario.feasible, scenario.min_spacing)
                else {
                    warn!("no room to move antenna {m} on waveguide {n}; keeping it in place");
                    continue;
                };
                let alpha = scenario.ladder.alphas[m];
                let others: Vec<C64> = (0..k_users).map(|k| psi[(n, k)] - phis[m][(n, k)]).collect();
                let score = |resp: &[C64]| -> f64 {
                    for k in 0..k_users {
                        a[k] = (others[k] + resp[k] * alpha).conj();
                    }
                    match (&split, &rest_gram) {
                        (Some(s), _) => s.objective(&a),
                        (None, Some(g)) => direct_objective(g, &a, &powers),
                        (None, None) => unreachable!(),
                    }
                };
                let (x_new, _) = search.minimize(n, interval, layout.x[(m, n)], score)?;
                layout.x[(m, n)] = x_new;
                for k in 0..k_users {
                    phis[m][(n, k)] = scenario.unit_response(k, n, x_new)? * alpha;
                }
                for k in 0..k_users {
                    psi[(n, k)] = (0..m_ant).map(|i| phis[i][(n, k)]).sum();
                }
            }
        }
        let next = weighted_trace(&gram_inverse(&psi, opts.max_condition)?, &powers);
        trace.push(next);
        let decrease = (objective - next) / objective;
        objective = next;
        if decrease < opts.threshold {
            converged = true;
            break;
        }
    }

    let w = zf_matrix(&psi, &powers)?;
    let achieved_sinrs = received_sinr(&psi, &w, &scenario.noise_powers);
    Ok(ZfSolution {
        w,
        layout,
        powers,
        total_power: objective,
        achieved_sinrs,
        iterations,
        trace,
        converged,
        used_fallback,
    })
}

/// `tr((a aᴴ + R)⁻¹P)` by explicit inversion; `inf` when singular.
fn direct_objective(rest_gram: &DMatrix<C64>, a: &[C64], powers: &[f64]) -> f64 {
    let k = a.len();
    let gram = DMatrix::from_fn(k, k, |i, j| rest_gram[(i, j)] + a[i] * a[j].conj());
    match hpd_inverse(&gram) {
        Some(inv) => weighted_trace(&inv, powers),
        None => f64::INFINITY,
    }
}
