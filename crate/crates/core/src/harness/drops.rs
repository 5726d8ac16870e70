//! Seeded user drops and channel perturbations.
//!
//! Every random draw comes from a ChaCha8 generator keyed by
//! `(seed, drop, purpose)`, so any drop can be regenerated in isolation and
//! the streams for different purposes never overlap.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{free_space_vector, PinchingLayout, Position, Scenario};
use crate::error::{invalid, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Users = 1,
    ChannelError = 2,
}

/// Generator for one `(seed, drop, purpose)` key.
pub fn rng_for(seed: u64, drop: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&drop.to_le_bytes());
    key[16..24].copy_from_slice(&(purpose as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Axis-aligned rectangle at ground level where users are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceArea {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z: f64,
}

impl ServiceArea {
    pub fn center(&self) -> Position {
        Position::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max), self.z)
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max && p.z == self.z
    }
}

/// `n_users` i.i.d. uniform positions in `area`.
pub fn drop_users(area: &ServiceArea, n_users: usize, seed: u64, drop: u64) -> Vec<Position> {
    let mut rng = rng_for(seed, drop, Purpose::Users);
    (0..n_users)
        .map(|_| {
            let x = area.x_min + rng.gen::<f64>() * (area.x_max - area.x_min);
            let y = area.y_min + rng.gen::<f64>() * (area.y_max - area.y_min);
            Position::new(x, y, area.z)
        })
        .collect()
}

/// Bounded channel estimation error: the true channel is the estimate plus a
/// perturbation of norm exactly `epsilon_est` in a uniformly random complex
/// direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelErrorModel {
    pub epsilon_est: f64,
}

impl ChannelErrorModel {
    pub fn new(epsilon_est: f64) -> Result<Self> {
        if !(epsilon_est >= 0.0 && epsilon_est.is_finite()) {
            return Err(invalid(format!("channel error bound must be >= 0, got {epsilon_est}")));
        }
        Ok(Self { epsilon_est })
    }

    pub fn sample(&self, dim: usize, rng: &mut impl Rng) -> DVector<C64> {
        let mut d = DVector::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let norm = d.norm();
        if norm > 0.0 {
            d *= C64::new(self.epsilon_est / norm, 0.0);
        }
        d
    }

    /// Perturbs each column (one user's channel) independently.
    pub fn perturb_columns(&self, h: &DMatrix<C64>, rng: &mut impl Rng) -> DMatrix<C64> {
        let mut out = h.clone();
        for k in 0..h.ncols() {
            let d = self.sample(h.nrows(), rng);
            let col = out.column(k) + d;
            out.set_column(k, &col);
        }
        out
    }

    /// True effective channel of a pinching layout: each user's stacked
    /// free-space vector over all N·M antennas is perturbed, while the
    /// in-waveguide part is known exactly.
    pub fn perturb_pinching(
        &self,
        scenario: &Scenario,
        layout: &PinchingLayout,
        rng: &mut impl Rng,
    ) -> Result<DMatrix<C64>> {
        let (n_wg, m_ant, k_users) = (scenario.n_waveguides(), scenario.n_antennas(), scenario.n_users());
        let beta_g = scenario.beta_g();
        let mut psi = DMatrix::zeros(n_wg, k_users);
        for k in 0..k_users {
            let delta = self.sample(n_wg * m_ant, rng);
            for n in 0..n_wg {
                let h = free_space_vector(scenario, layout, k, n)?;
                for m in 0..m_ant {
                    let x = layout.x[(m, n)];
                    let g = C64::from_polar(scenario.ladder.alphas[m], beta_g * x);
                    psi[(n, k)] += g * (h[m] + delta[n * m_ant + m]);
                }
            }
        }
        Ok(psi)
    }
}
