//! Penalty-based alternating optimisation of beams, auxiliary channels and
//! antenna positions.
//!
//! The coupling `U = Σ_m U_m`, `U_m = Φ_m(X)` between the auxiliary channel
//! `U` and the pinching layout is moved into the objective
//!
//! ```text
//! P + (1/ρ)‖U − Σ_m U_m‖² + (1/ρ) Σ_m ‖U_m − Φ_m(X)‖²
//! ```
//!
//! and minimised block by block (`V`, then `(U, P)`, then `U_m`, then `X`)
//! while the outer loop shrinks `ρ` until the equalities hold.
//!
//! All iterates live in a normalised domain: channels are divided by the RMS
//! entry magnitude of the initial `Ψ` and noise powers by the smallest noise
//! power. Physical channel entries are around 1e-4, so without this the
//! violation tolerance and `ρ₀` would be meaningless. Powers reported in the
//! trace and the final design are converted back to watts.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::channel::{effective_channel, PinchingLayout, Scenario};
use crate::error::{invalid, PassError, Result};
use crate::search::{search_interval, CoordinateSearch, ResponseTable, SearchGrid, DEFAULT_GRID_POINTS};
use crate::txbf::{solve_powermin, PowerMinOptions};
use crate::C64;

/// Relative slack for the per-block descent check.
pub const MONOTONE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct PenaltyParams {
    pub rho0: f64,
    /// Outer-loop reduction factor, `ρ ← ε ρ`.
    pub epsilon: f64,
    /// Inner loop stops once one cycle lowers the penalised objective by less
    /// than this fraction.
    pub inner_tol: f64,
    /// Outer loop stops once the constraint violation falls below this.
    pub violation_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub grid_points: usize,
    pub refine: bool,
    /// Position sweeps stop once a sweep lowers `Σ‖U_m − Φ_m‖²` by less
    /// than this fraction.
    pub position_tol: f64,
    pub max_position_sweeps: usize,
    pub powermin: PowerMinOptions,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self {
            rho0: 10.0,
            epsilon: 0.1,
            inner_tol: 1e-3,
            violation_tol: 1e-3,
            max_inner: 50,
            max_outer: 8,
            grid_points: DEFAULT_GRID_POINTS,
            refine: true,
            position_tol: 1e-3,
            max_position_sweeps: 20,
            powermin: PowerMinOptions::default(),
        }
    }
}

impl PenaltyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0) {
            return Err(invalid("rho0 must be > 0"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid("epsilon must lie in (0, 1)"));
        }
        if !(self.inner_tol > 0.0 && self.violation_tol > 0.0) {
            return Err(invalid("tolerances must be > 0"));
        }
        if self.max_inner == 0 || self.max_outer == 0 {
            return Err(invalid("iteration limits must be >= 1"));
        }
        Ok(())
    }
}

/// Fixed data of one penalty run in the normalised domain.
pub struct PenaltyProblem<'a> {
    pub scenario: &'a Scenario,
    table: &'a ResponseTable,
    /// Physical channel = normalised channel × `channel_scale`.
    pub channel_scale: f64,
    /// Physical noise = normalised noise × `noise_ref`.
    pub noise_ref: f64,
    /// Normalised noise powers.
    pub noise: Vec<f64>,
    params: PenaltyParams,
}

impl<'a> PenaltyProblem<'a> {
    /// Channel scale is the RMS entry magnitude of `Ψ(init)`.
    pub fn new(
        scenario: &'a Scenario,
        table: &'a ResponseTable,
        init: &PinchingLayout,
        params: &PenaltyParams,
    ) -> Result<Self> {
        scenario.validate()?;
        params.validate()?;
        let psi = effective_channel(scenario, init)?.psi;
        let channel_scale = (psi.norm_squared() / psi.len() as f64).sqrt();
        if !(channel_scale > 0.0) {
            return Err(invalid("initial channel is identically zero"));
        }
        let noise_ref = scenario.noise_powers.iter().cloned().fold(f64::INFINITY, f64::min);
        let noise = scenario.noise_powers.iter().map(|s| s / noise_ref).collect();
        Ok(Self {
            scenario,
            table,
            channel_scale,
            noise_ref,
            noise,
            params: *params,
        })
    }

    /// Normalised power → W.
    pub fn watts(&self, p: f64) -> f64 {
        p * self.noise_ref / (self.channel_scale * self.channel_scale)
    }

    /// Normalised `Φ_m(X)`.
    pub fn parts(&self, layout: &PinchingLayout) -> Result<Vec<DMatrix<C64>>> {
        let inv = 1.0 / self.channel_scale;
        Ok(effective_channel(self.scenario, layout)?
            .phis
            .into_iter()
            .map(|m| m * C64::new(inv, 0.0))
            .collect())
    }
}

/// Iterate of the alternating optimisation, in normalised units.
#[derive(Debug, Clone)]
pub struct PenaltyState {
    /// Unit-Frobenius-norm beam directions, N×K.
    pub v: DMatrix<C64>,
    /// Auxiliary channel, N×K.
    pub u: DMatrix<C64>,
    /// Auxiliary per-antenna parts `U_m`.
    pub u_parts: Vec<DMatrix<C64>>,
    /// `Φ_m(X)` for the current layout.
    pub phis: Vec<DMatrix<C64>>,
    pub x: PinchingLayout,
    pub p: f64,
    pub rho: f64,
}

impl PenaltyState {
    /// `U = Ψ(X)`, `U_m = Φ_m(X)`, and `(V, P)` from [`update_v`].
    pub fn init(problem: &PenaltyProblem, x: &PinchingLayout, rho: f64) -> Result<Self> {
        let phis = problem.parts(x)?;
        let u = sum_parts(&phis);
        let (n, k) = u.shape();
        let mut state = Self {
            v: DMatrix::zeros(n, k),
            u,
            u_parts: phis.clone(),
            phis,
            x: x.clone(),
            p: 0.0,
            rho,
        };
        update_v(&mut state, problem)?;
        Ok(state)
    }
}

fn sum_parts(parts: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc += p;
    }
    acc
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖U − Σ U_m‖² + Σ‖U_m − Φ_m‖²`.
pub fn penalty_terms(state: &PenaltyState) -> f64 {
    let coupling = (&state.u - sum_parts(&state.u_parts)).norm_squared();
    let parts: f64 = state
        .u_parts
        .iter()
        .zip(&state.phis)
        .map(|(um, phi)| (um - phi).norm_squared())
        .sum();
    coupling + parts
}

/// `P + (1/ρ)(‖U − Σ U_m‖² + Σ‖U_m − Φ_m‖²)`.
pub fn penalized_objective(state: &PenaltyState) -> f64 {
    state.p + penalty_terms(state) / state.rho
}

/// `max(‖U − ΣU_m‖_∞, max_m ‖U_m − Φ_m‖_∞)`, entrywise maximum modulus.
pub fn constraint_violation(state: &PenaltyState) -> f64 {
    let mut worst = max_abs(&(&state.u - sum_parts(&state.u_parts)));
    for (um, phi) in state.u_parts.iter().zip(&state.phis) {
        worst = worst.max(max_abs(&(um - phi)));
    }
    worst
}

/// Minimum-power beams for the auxiliary channel `U`; sets `V = W/‖W‖` and `P = ‖W‖²`.
pub fn update_v(state: &mut PenaltyState, problem: &PenaltyProblem) -> Result<()> {
    let sol = solve_powermin(
        &state.u,
        &problem.scenario.sinr_targets,
        &problem.noise,
        &problem.params.powermin,
    )?;
    let norm = sol.w.norm();
    state.v = sol.w / C64::new(norm, 0.0);
    state.p = norm * norm;
    Ok(())
}

/// Linearised SINR constraint of one user,
/// `uᴴQu − 2Re(bᴴu) + c₀ + s ≤ 0` with `Q = Σ_{i≠k} v_i v_iᴴ`,
/// `b = v_k v_kᴴ uᵗ/γ`, `c₀ = |v_kᴴuᵗ|²/γ` and `s = σ²/P`.
///
/// Stored in the eigenbasis of `Q`, where projecting onto the constraint
/// costs O(N) per multiplier trial.
#[derive(Debug, Clone)]
pub struct ScaConstraint {
    basis: DMatrix<C64>,
    eigenvalues: DVector<f64>,
    /// `b` in the eigenbasis.
    b: DVector<C64>,
    offset: f64,
}

impl ScaConstraint {
    /// `None` when `v_kᴴuᵗ` vanishes and the linearisation carries no signal.
    pub fn new(v: &DMatrix<C64>, user: usize, anchor: &DVector<C64>, gamma: f64) -> Option<Self> {
        let n = v.nrows();
        let vk = v.column(user);
        let gain = vk.dotc(anchor);
        if gain.norm_sqr() <= 1e-24 * vk.norm_squared() * anchor.norm_squared() {
            return None;
        }
        let mut q = DMatrix::<C64>::zeros(n, n);
        for i in 0..v.ncols() {
            if i != user {
                let vi = v.column(i);
                q += &vi * vi.adjoint();
            }
        }
        let eig = SymmetricEigen::new(q);
        let b_full = vk.into_owned() * (gain / gamma);
        let b = eig.eigenvectors.ad_mul(&b_full);
        Some(Self {
            eigenvalues: eig.eigenvalues.map(|l| l.max(0.0)),
            basis: eig.eigenvectors,
            b,
            offset: gain.norm_sqr() / gamma,
        })
    }

    fn value_rotated(&self, u: &DVector<C64>, slack: f64) -> f64 {
        let mut acc = self.offset + slack;
        for i in 0..u.len() {
            acc += self.eigenvalues[i] * u[i].norm_sqr() - 2.0 * (self.b[i].conj() * u[i]).re;
        }
        acc
    }

    /// Constraint function at `u`; feasible when `≤ 0`.
    pub fn value(&self, u: &DVector<C64>, slack: f64) -> f64 {
        self.value_rotated(&self.basis.ad_mul(u), slack)
    }

    fn solve_rotated(&self, c: &DVector<C64>, mu: f64) -> DVector<C64> {
        DVector::from_fn(c.len(), |i, _| (c[i] + self.b[i] * mu) / (1.0 + mu * self.eigenvalues[i]))
    }

    /// Closest point to `c` satisfying the constraint, with its multiplier.
    /// `None` if no multiplier up to 1e60 reaches feasibility.
    pub fn project(&self, c: &DVector<C64>, slack: f64) -> Option<(DVector<C64>, f64)> {
        let c_rot = self.basis.ad_mul(c);
        if self.value_rotated(&c_rot, slack) <= 0.0 {
            return Some((c.clone(), 0.0));
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut doublings = 0;
        while self.value_rotated(&self.solve_rotated(&c_rot, hi), slack) > 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return None;
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.value_rotated(&self.solve_rotated(&c_rot, mid), slack) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((&self.basis * self.solve_rotated(&c_rot, hi), hi))
    }
}

/// SCA step for `(U, P)`: golden-section search over `log P`, with every
/// user's column projected exactly for each trial `P`. Keeps the incumbent
/// when nothing better is found.
pub fn update_u(state: &mut PenaltyState, problem: &PenaltyProblem) -> Result<()> {
    let k_users = state.u.ncols();
    let gammas = &problem.scenario.sinr_targets;
    let target = sum_parts(&state.u_parts);
    let mut constraints = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let anchor = state.u.column(k).into_owned();
        let sca = match ScaConstraint::new(&state.v, k, &anchor, gammas[k]) {
            Some(c) => c,
            None => {
                warn!("linearisation for user {k} vanished; restarting from the structured channel");
                let fresh = sum_parts(&state.phis).column(k).into_owned();
                state.u.set_column(k, &fresh);
                ScaConstraint::new(&state.v, k, &fresh, gammas[k]).ok_or(PassError::ScaStall { user: k })?
            }
        };
        constraints.push(sca);
    }
    let columns: Vec<DVector<C64>> = (0..k_users).map(|k| target.column(k).into_owned()).collect();
    let inv_rho = 1.0 / state.rho;

    let solve_at = |p: f64| -> Option<(f64, Vec<DVector<C64>>)> {
        let mut objective = p;
        let mut cols = Vec::with_capacity(k_users);
        for k in 0..k_users {
            let (u, _) = constraints[k].project(&columns[k], problem.noise[k] / p)?;
            objective += inv_rho * (&u - &columns[k]).norm_squared();
            cols.push(u);
        }
        Some((objective, cols))
    };
    let eval = |t: f64| solve_at(t.exp()).map_or(f64::INFINITY, |(v, _)| v);

    let incumbent_p = state.p;
    let mut a = 1e-12f64.ln();
    let mut b = (1e4 * incumbent_p).ln();
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while b - a > 1e-6 {
        if fc.is_infinite() && fd.is_infinite() {
            a = d;
            c = b - INV_PHI * (b - a);
            d = a + INV_PHI * (b - a);
            fc = eval(c);
            fd = eval(d);
        } else if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    let best_t = if fc <= fd { c } else { d };

    let incumbent_value = {
        let feasible = (0..k_users).all(|k| {
            let u = state.u.column(k).into_owned();
            constraints[k].value(&u, problem.noise[k] / incumbent_p) <= 1e-9 * constraints[k].offset.max(1.0)
        });
        if feasible {
            incumbent_p + inv_rho * (&state.u - &target).norm_squared()
        } else {
            f64::INFINITY
        }
    };
    match solve_at(best_t.exp()) {
        Some((value, cols)) if value < incumbent_value => {
            for (k, col) in cols.iter().enumerate() {
                state.u.set_column(k, col);
            }
            state.p = best_t.exp();
        }
        Some(_) => {}
        None if incumbent_value.is_finite() => {}
        None => return Err(PassError::ScaStall { user: 0 }),
    }
    Ok(())
}

/// Closed-form `U_m = Φ_m + (U − Σ_i Φ_i)/(M + 1)`.
pub fn update_u_parts(state: &mut PenaltyState) {
    let m = state.phis.len() as f64;
    let residual = (&state.u - sum_parts(&state.phis)) / C64::new(m + 1.0, 0.0);
    state.u_parts = state.phis.iter().map(|phi| phi + &residual).collect();
}

/// `Σ_m ‖U_m − Φ_m(X)‖²`.
pub fn position_objective(state: &PenaltyState) -> f64 {
    state
        .u_parts
        .iter()
        .zip(&state.phis)
        .map(|(um, phi)| (um - phi).norm_squared())
        .sum()
}

/// Element-wise position search on `Σ_m ‖U_m − Φ_m(X)‖²`, sweeping
/// waveguide-major until a sweep's fractional decrease falls below the
/// position tolerance.
pub fn update_x(state: &mut PenaltyState, problem: &PenaltyProblem) -> Result<()> {
    let scenario = problem.scenario;
    let (n_wg, m_ant, k_users) = (scenario.n_waveguides(), scenario.n_antennas(), scenario.n_users());
    let search = CoordinateSearch {
        scenario,
        table: problem.table,
        refine: problem.params.refine,
    };
    let inv_scale = 1.0 / problem.channel_scale;
    let mut objective = position_objective(state);
    for _ in 0..problem.params.max_position_sweeps {
        if objective <= f64::MIN_POSITIVE {
            break;
        }
        for n in 0..n_wg {
            for m in 0..m_ant {
                let Some(interval) = search_interval(&state.x, n, m, &scenario.feasible, scenario.min_spacing) else {
                    warn!("no room to move antenna {m} on waveguide {n}; keeping it in place");
                    continue;
                };
                let weight = scenario.ladder.alphas[m] * inv_scale;
                let target: Vec<C64> = (0..k_users).map(|k| state.u_parts[m][(n, k)]).collect();
                let score = |resp: &[C64]| -> f64 {
                    target
                        .iter()
                        .zip(resp)
                        .map(|(t, r)| (t - r * weight).norm_sqr())
                        .sum()
                };
                let (x_new, _) = search.minimize(n, interval, state.x.x[(m, n)], score)?;
                state.x.x[(m, n)] = x_new;
                for k in 0..k_users {
                    state.phis[m][(n, k)] = scenario.unit_response(k, n, x_new)? * weight;
                }
            }
        }
        let next = position_objective(state);
        let decrease = (objective - next) / objective;
        objective = next;
        if decrease < problem.params.position_tol {
            break;
        }
    }
    Ok(())
}

/// One per-iteration trace record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyTraceRecord {
    pub outer: usize,
    pub inner: usize,
    /// Transmit power of the iterate, W.
    pub power_w: f64,
    pub violation: f64,
    /// Penalised objective, normalised units.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct PenaltyReport {
    /// Beams re-solved on the true channel `Ψ(X)`, physical units.
    pub w: DMatrix<C64>,
    pub layout: PinchingLayout,
    /// `‖W‖²`, W.
    pub total_power: f64,
    pub achieved_sinrs: Vec<f64>,
    pub violation: f64,
    pub converged: bool,
    pub inner_iterations: usize,
    pub outer_iterations: usize,
    pub trace: Vec<PenaltyTraceRecord>,
    /// `(power_w, violation)` at the end of each outer loop.
    pub outer_trace: Vec<(f64, f64)>,
    /// Block updates that raised the penalised objective beyond
    /// [`MONOTONE_RTOL`].
    pub monotonicity_breaks: usize,
}

/// Full run from `init_x`, building its own response table.
pub fn run_penalty(scenario: &Scenario, init_x: &PinchingLayout, params: &PenaltyParams) -> Result<PenaltyReport> {
    let grid = SearchGrid::new(&scenario.feasible, params.grid_points)?;
    let table = ResponseTable::new(scenario, grid)?;
    run_penalty_with_table(scenario, init_x, params, &table)
}

/// [`run_penalty`] with a caller-provided response table.
pub fn run_penalty_with_table(
    scenario: &Scenario,
    init_x: &PinchingLayout,
    params: &PenaltyParams,
    table: &ResponseTable,
) -> Result<PenaltyReport> {
    init_x.validate(&scenario.feasible, scenario.min_spacing)?;
    let problem = PenaltyProblem::new(scenario, table, init_x, params)?;
    let mut state = PenaltyState::init(&problem, init_x, params.rho0)?;

    let mut trace = Vec::new();
    let mut outer_trace = Vec::new();
    let mut monotonicity_breaks = 0;
    let mut inner_iterations = 0;
    let mut outer_iterations = 0;
    let mut violation = constraint_violation(&state);

    let mut check = |before: f64, after: f64, block: &str| {
        if after > before + MONOTONE_RTOL * before.abs().max(1.0) {
            monotonicity_breaks += 1;
            warn!("{block} raised the penalised objective from {before:.9e} to {after:.9e}");
        }
        after
    };

    for outer in 0..params.max_outer {
        outer_iterations += 1;
        for inner in 0..params.max_inner {
            inner_iterations += 1;
            let start = penalized_objective(&state);
            update_v(&mut state, &problem)?;
            let mut current = check(start, penalized_objective(&state), "beam update");
            update_u(&mut state, &problem)?;
            current = check(current, penalized_objective(&state), "channel update");
            update_u_parts(&mut state);
            current = check(current, penalized_objective(&state), "part update");
            update_x(&mut state, &problem)?;
            current = check(current, penalized_objective(&state), "position update");

            violation = constraint_violation(&state);
            trace.push(PenaltyTraceRecord {
                outer,
                inner,
                power_w: problem.watts(state.p),
                violation,
                objective: current,
            });
            if (start - current) / start < params.inner_tol {
                break;
            }
        }
        outer_trace.push((problem.watts(state.p), violation));
        debug!(
            "outer {outer}: rho {:.1e}, power {:.4e} W, violation {violation:.3e}",
            state.rho,
            problem.watts(state.p)
        );
        if violation < params.violation_tol {
            break;
        }
        state.rho *= params.epsilon;
    }

    let psi = effective_channel(scenario, &state.x)?.psi;
    let polished = solve_powermin(&psi, &scenario.sinr_targets, &scenario.noise_powers, &params.powermin)?;
    Ok(PenaltyReport {
        w: polished.w,
        layout: state.x,
        total_power: polished.total_power,
        achieved_sinrs: polished.achieved_sinrs,
        violation,
        converged: violation < params.violation_tol,
        inner_iterations,
        outer_iterations,
        trace,
        outer_trace,
        monotonicity_breaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, n: usize, k: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, k, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn state_with(u: DMatrix<C64>, phis: Vec<DMatrix<C64>>) -> PenaltyState {
        let (n, k) = u.shape();
        PenaltyState {
            v: DMatrix::zeros(n, k),
            u_parts: phis.clone(),
            u,
            phis,
            x: PinchingLayout::new(DMatrix::zeros(1, 1)),
            p: 1.0,
            rho: 1.0,
        }
    }

    #[test]
    fn part_update_single_antenna() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_matrix(&mut rng, 3, 2);
        let phi = random_matrix(&mut rng, 3, 2);
        let mut s = state_with(u.clone(), vec![phi.clone()]);
        update_u_parts(&mut s);
        let expected = (u + phi) * C64::new(0.5, 0.0);
        assert!((&s.u_parts[0] - expected).norm() < 1e-14);
    }

    #[test]
    fn part_update_fixed_point_and_stationarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phis: Vec<_> = (0..3).map(|_| random_matrix(&mut rng, 4, 3)).collect();
        let mut s = state_with(sum_parts(&phis), phis.clone());
        update_u_parts(&mut s);
        for (a, b) in s.u_parts.iter().zip(&phis) {
            assert!((a - b).norm() < 1e-14);
        }
        let mut s = state_with(random_matrix(&mut rng, 4, 3), phis.clone());
        update_u_parts(&mut s);
        let total = sum_parts(&s.u_parts);
        for m in 0..3 {
            let lhs = &total + &s.u_parts[m];
            let rhs = &s.u + &phis[m];
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn violation_is_max_modulus() {
        let phi = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        let mut s = state_with(phi.clone(), vec![phi.clone()]);
        assert_eq!(constraint_violation(&s), 0.0);
        s.u[(1, 0)] += C64::new(0.0, 0.25);
        s.u_parts[0][(0, 1)] += C64::new(0.3, 0.4);
        // coupling residual: 0.25i at (1,0) and -(0.3+0.4i) at (0,1); part residual 0.5
        assert_relative_eq!(constraint_violation(&s), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn eigenbasis_reconstructs_interference() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = random_matrix(&mut rng, 5, 3);
        let anchor = random_matrix(&mut rng, 5, 1).column(0).into_owned();
        let sca = ScaConstraint::new(&v, 1, &anchor, 10.0).unwrap();
        let u = random_matrix(&mut rng, 5, 1).column(0).into_owned();
        let mut direct = -2.0 * (v.column(1) * (v.column(1).dotc(&anchor) / 10.0)).dotc(&u).re
            + v.column(1).dotc(&anchor).norm_sqr() / 10.0
            + 0.3;
        for i in [0, 2] {
            direct += v.column(i).dotc(&u).norm_sqr();
        }
        assert_relative_eq!(sca.value(&u, 0.3), direct, max_relative = 1e-10);
    }

    #[test]
    fn projection_inactive_and_active() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = random_matrix(&mut rng, 4, 2);
        let anchor = v.column(0) * C64::new(3.0, 0.0);
        let sca = ScaConstraint::new(&v, 0, &anchor, 2.0).unwrap();
        let c = anchor.clone();
        let (u, mu) = sca.project(&c, 1e-6).unwrap();
        assert_eq!(mu, 0.0);
        assert_eq!(u, c);
        let (u, mu) = sca.project(&c, 1e3).unwrap();
        assert!(mu > 0.0);
        let g = sca.value(&u, 1e3);
        assert!(g <= 0.0 && g > -1e-8 * 1e3, "constraint {g}");
    }

    #[test]
    fn vanished_linearisation_is_detected() {
        let v = DMatrix::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let anchor = DVector::from_column_slice(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(ScaConstraint::new(&v, 0, &anchor, 1.0).is_none());
    }

    #[test]
    fn params_validation() {
        assert!(PenaltyParams::default().validate().is_ok());
        let bad = PenaltyParams {
            epsilon: 1.0,
            ..PenaltyParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
