//! Conventional fixed-array reference: a half-wavelength uniform linear array
//! along x with one antenna per RF chain.

use nalgebra::DMatrix;

use crate::channel::{Position, Scenario, MIN_DISTANCE};
use crate::error::{invalid, PassError, Result};
use crate::txbf::{solve_powermin, PowerMinOptions, PowerMinResult};
use crate::C64;

/// Array position used by the reference deployment.
pub const DEFAULT_ULA_ORIGIN: Position = Position::new(0.0, 0.0, 3.0);

#[derive(Debug, Clone)]
pub struct UlaScenario {
    /// Position of the first element; element `n` sits `n·λ/2` further along x.
    pub origin: Position,
    pub n_antennas: usize,
    pub users: Vec<Position>,
    pub lambda: f64,
    pub eta: f64,
    pub noise_powers: Vec<f64>,
    pub sinr_targets: Vec<f64>,
}

impl UlaScenario {
    /// Array serving the users, RF constants and targets of `scenario`.
    pub fn from_scenario(scenario: &Scenario, n_antennas: usize, origin: Position) -> Self {
        Self {
            origin,
            n_antennas,
            users: scenario.users.clone(),
            lambda: scenario.lambda,
            eta: scenario.eta,
            noise_powers: scenario.noise_powers.clone(),
            sinr_targets: scenario.sinr_targets.clone(),
        }
    }

    pub fn spacing(&self) -> f64 {
        self.lambda / 2.0
    }

    pub fn beta0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda
    }

    pub fn antenna(&self, n: usize) -> Position {
        Position::new(self.origin.x + n as f64 * self.spacing(), self.origin.y, self.origin.z)
    }
}

/// N×K channel, entries `(η/r̄) e^{jβ₀ r̄}`; user `k` receives `h̄_kᴴ w`.
pub fn ula_channel(ula: &UlaScenario) -> Result<DMatrix<C64>> {
    if ula.n_antennas == 0 || ula.users.is_empty() {
        return Err(invalid("need at least one antenna and one user"));
    }
    let beta0 = ula.beta0();
    let mut h = DMatrix::zeros(ula.n_antennas, ula.users.len());
    for (k, user) in ula.users.iter().enumerate() {
        for n in 0..ula.n_antennas {
            let r = ula.antenna(n).distance_to(user);
            if r < MIN_DISTANCE {
                return Err(PassError::DegenerateGeometry {
                    user: k,
                    waveguide: n,
                    distance: r,
                });
            }
            h[(n, k)] = C64::from_polar(ula.eta / r, beta0 * r);
        }
    }
    Ok(h)
}

/// Minimum-power beams for the array.
pub fn solve_conventional(ula: &UlaScenario, opts: &PowerMinOptions) -> Result<PowerMinResult> {
    let h = ula_channel(ula)?;
    solve_powermin(&h, &ula.sinr_targets, &ula.noise_powers, opts)
}
