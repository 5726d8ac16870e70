//! Transmit power minimisation under per-user SINR constraints for a fixed
//! channel, solved through uplink-downlink duality.
//!
//! With noise-normalised channels `ũ_k = u_k/σ_k` the virtual uplink powers
//! are the fixed point of
//!
//! ```text
//! q_k = γ_k / ũ_kᴴ (I + Σ_{i≠k} q_i ũ_i ũ_iᴴ)⁻¹ ũ_k
//! ```
//!
//! (equivalently `q_k = 1 / ((1 + 1/γ_k) · ũ_kᴴ (I + Σ_i q_i ũ_i ũ_iᴴ)⁻¹ ũ_k)`,
//! which contracts only at rate `γ/(1+γ)` and is not iterated directly). The
//! optimal beam directions are the MMSE receivers of that uplink, and the
//! downlink powers follow from making every SINR constraint hold with
//! equality.

use nalgebra::{DMatrix, DVector};

use crate::channel::received_sinr;
use crate::error::{invalid, PassError, Result};
use crate::linalg::condition_number;
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct PowerMinOptions {
    /// Stop once the largest relative change of the dual powers is below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Gram matrices worse conditioned than this are reported as infeasible.
    pub max_condition: f64,
}

impl Default for PowerMinOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 500,
            max_condition: 1e12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerMinResult {
    /// N×K beamforming matrix.
    pub w: DMatrix<C64>,
    /// `Σ_k ‖w_k‖²`, W.
    pub total_power: f64,
    pub achieved_sinrs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Virtual uplink powers for unit noise; they sum to `total_power`.
    pub dual_powers: Vec<f64>,
}

/// Minimises `Σ‖w_k‖²` subject to `SINR_k ≥ γ_k`, where user `k` sees the
/// channel `channels.column(k)` (so its received coefficient for beam `w` is
/// `u_kᴴ w`).
pub fn solve_powermin(
    channels: &DMatrix<C64>,
    gammas: &[f64],
    noise_powers: &[f64],
    opts: &PowerMinOptions,
) -> Result<PowerMinResult> {
    let (n, k_users) = channels.shape();
    if k_users == 0 || k_users > n {
        return Err(invalid(format!("need 1 <= K <= N, got N = {n}, K = {k_users}")));
    }
    if gammas.len() != k_users || noise_powers.len() != k_users {
        return Err(invalid("need one SINR target and one noise power per user"));
    }
    if gammas.iter().any(|&g| !(g > 0.0)) || noise_powers.iter().any(|&s| !(s > 0.0)) {
        return Err(invalid("SINR targets and noise powers must be > 0"));
    }

    let mut normalized = channels.clone();
    for k in 0..k_users {
        let col_norm = channels.column(k).norm();
        if !(col_norm > 0.0) {
            return Err(invalid(format!("channel of user {k} is zero")));
        }
        let scale = 1.0 / noise_powers[k].sqrt();
        normalized.column_mut(k).scale_mut(scale);
    }
    // cond(ŨᴴŨ) = cond(Ũ)²
    let cond = condition_number(&normalized).powi(2);
    if !(cond <= opts.max_condition) {
        return Err(PassError::InfeasibleInstance(format!(
            "channel Gram matrix condition number {cond:.3e} exceeds {:.1e}",
            opts.max_condition
        )));
    }

    let mut q = vec![0.0; k_users];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let inv_t_u = solve_uplink(&normalized, &q)?;
        let mut max_change: f64 = 0.0;
        for k in 0..k_users {
            // Own term removed by Sherman-Morrison: s/(1 - q s).
            let s = normalized.column(k).dotc(&inv_t_u.column(k)).re;
            let next = gammas[k] * (1.0 - q[k] * s) / s;
            if !next.is_finite() || next > 1e300 {
                return Err(PassError::InfeasibleInstance(
                    "dual power fixed point diverged".into(),
                ));
            }
            max_change = max_change.max((next - q[k]).abs() / next);
            q[k] = next;
        }
        if max_change < opts.tol {
            converged = true;
            break;
        }
    }

    let mut directions = solve_uplink(&normalized, &q)?;
    for k in 0..k_users {
        let norm = directions.column(k).norm();
        directions.column_mut(k).unscale_mut(norm);
    }

    // Downlink powers making every constraint tight (unit noise after normalisation).
    let gains = normalized.ad_mul(&directions).map(|z| z.norm_sqr());
    let f = DMatrix::from_fn(k_users, k_users, |k, i| {
        if i == k {
            gains[(k, k)] / gammas[k]
        } else {
            -gains[(k, i)]
        }
    });
    let p = f
        .lu()
        .solve(&DVector::from_element(k_users, 1.0))
        .ok_or_else(|| PassError::InfeasibleInstance("downlink power system is singular".into()))?;
    if p.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(PassError::InfeasibleInstance(
            "downlink power system has no positive solution".into(),
        ));
    }

    let mut w = directions;
    for k in 0..k_users {
        w.column_mut(k).scale_mut(p[k].sqrt());
    }
    let total_power = p.iter().sum();
    let achieved_sinrs = received_sinr(channels, &w, noise_powers);
    Ok(PowerMinResult {
        w,
        total_power,
        achieved_sinrs,
        iterations,
        converged,
        dual_powers: q,
    })
}

/// `(I + Σ_i q_i ũ_i ũ_iᴴ)⁻¹ Ũ`.
fn solve_uplink(normalized: &DMatrix<C64>, q: &[f64]) -> Result<DMatrix<C64>> {
    let n = normalized.nrows();
    let mut weighted = normalized.clone();
    for (k, &qk) in q.iter().enumerate() {
        weighted.column_mut(k).scale_mut(qk);
    }
    let t = DMatrix::<C64>::identity(n, n) + &weighted * normalized.adjoint();
    let chol = t
        .cholesky()
        .ok_or_else(|| PassError::InfeasibleInstance("uplink covariance lost definiteness".into()))?;
    Ok(chol.solve(normalized))
}
