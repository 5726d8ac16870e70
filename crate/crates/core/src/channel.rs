//! Geometry and channel synthesis.
//!
//! Antenna `m` on waveguide `n` sits at `(x_{n,m}, y_n, z_n)`. The effective
//! channel is stored as `Ψ = Gᴴ H` (N×K), so user `k` receives
//! `Σ_n conj(Ψ_{n,k}) s_n`. Its entries split over antennas as
//! `Ψ = Σ_m Φ_m` with
//!
//! ```text
//! [Φ_m]_{n,k} = (η α_m / r_{k,n,m}) · exp(j(β₀ r_{k,n,m} + β_g x_{n,m}))
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::coupling::AmplitudeLadder;
use crate::error::{invalid, PassError, Result};
use crate::C64;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Distances below this are treated as a user sitting on an antenna.
pub const MIN_DISTANCE: f64 = 1e-6;

/// Spacing constraints are checked with this slack so that grid points
/// computed as `i·x_max/(Q-1)` are not rejected over rounding.
pub const SPACING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Continuous,
    Discrete,
}

impl Activation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Activation::Continuous => "continuous",
            Activation::Discrete => "discrete",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = PassError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Activation::Continuous),
            "discrete" => Ok(Activation::Discrete),
            other => Err(invalid(format!("unknown activation '{other}'"))),
        }
    }
}

/// Where antennas may be activated along a waveguide: the interval
/// `[0, x_max]`, or the uniform grid `{0, x_max/(Q-1), …, x_max}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleSet {
    pub kind: Activation,
    pub x_max: f64,
    /// Number of grid points including both ends; only meaningful for
    /// discrete activation.
    pub q_points: usize,
}

impl FeasibleSet {
    pub fn continuous(x_max: f64) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(invalid(format!("x_max must be > 0, got {x_max}")));
        }
        Ok(Self {
            kind: Activation::Continuous,
            x_max,
            q_points: 0,
        })
    }

    pub fn discrete(x_max: f64, q_points: usize) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(invalid(format!("x_max must be > 0, got {x_max}")));
        }
        if q_points < 2 {
            return Err(invalid(format!("discrete set needs >= 2 points, got {q_points}")));
        }
        Ok(Self {
            kind: Activation::Discrete,
            x_max,
            q_points,
        })
    }

    /// Discrete set with `per_meter` positions per metre: `Q = round(per_meter·x_max) + 1`.
    pub fn discrete_per_meter(x_max: f64, per_meter: f64) -> Result<Self> {
        if !(per_meter > 0.0) {
            return Err(invalid(format!("positions per metre must be > 0, got {per_meter}")));
        }
        Self::discrete(x_max, (per_meter * x_max).round() as usize + 1)
    }

    pub fn grid_step(&self) -> f64 {
        self.x_max / (self.q_points - 1) as f64
    }

    /// The `i`-th discrete position. Every discrete coordinate in the crate is
    /// produced by this function so membership can be tested exactly.
    pub fn grid_point(&self, i: usize) -> f64 {
        if i + 1 == self.q_points {
            self.x_max
        } else {
            i as f64 * self.x_max / (self.q_points - 1) as f64
        }
    }

    /// Index of the grid point nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = (x / self.grid_step()).round().max(0.0) as usize;
        i.min(self.q_points - 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        if !(x >= 0.0 && x <= self.x_max) {
            return false;
        }
        match self.kind {
            Activation::Continuous => true,
            Activation::Discrete => self.grid_point(self.nearest_index(x)) == x,
        }
    }
}

/// Antenna positions, an M×N matrix whose column `n` lists the antennas of
/// waveguide `n` in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchingLayout {
    pub x: DMatrix<f64>,
}

impl PinchingLayout {
    pub fn new(x: DMatrix<f64>) -> Self {
        Self { x }
    }

    pub fn n_antennas(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_waveguides(&self) -> usize {
        self.x.ncols()
    }

    /// Antennas spread evenly, `x_{n,m} = (m - 1/2)·x_max/M`, snapped to the
    /// grid for discrete activation.
    pub fn uniform(
        n_antennas: usize,
        n_waveguides: usize,
        feasible: &FeasibleSet,
        min_spacing: f64,
    ) -> Result<Self> {
        let m_f = n_antennas as f64;
        let column: Vec<f64> = (0..n_antennas)
            .map(|m| {
                let x = (m as f64 + 0.5) * feasible.x_max / m_f;
                match feasible.kind {
                    Activation::Continuous => x,
                    Activation::Discrete => feasible.grid_point(feasible.nearest_index(x)),
                }
            })
            .collect();
        let x = DMatrix::from_fn(n_antennas, n_waveguides, |m, _| column[m]);
        let layout = Self { x };
        layout.validate(feasible, min_spacing)?;
        Ok(layout)
    }

    /// Checks set membership and the minimum spacing `x_{n,m} - x_{n,m-1} ≥ Δx`.
    pub fn validate(&self, feasible: &FeasibleSet, min_spacing: f64) -> Result<()> {
        for n in 0..self.n_waveguides() {
            for m in 0..self.n_antennas() {
                let x = self.x[(m, n)];
                if !feasible.contains(x) {
                    return Err(PassError::InvalidLayout(format!(
                        "antenna {m} on waveguide {n} at {x} is outside the feasible set"
                    )));
                }
                if m > 0 && x - self.x[(m - 1, n)] < min_spacing - SPACING_SLACK {
                    return Err(PassError::InvalidLayout(format!(
                        "antennas {} and {m} on waveguide {n} are closer than {min_spacing} m",
                        m - 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One deployment: waveguides, users, RF constants and SINR targets.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub waveguide_y: Vec<f64>,
    pub waveguide_z: Vec<f64>,
    pub users: Vec<Position>,
    /// Free-space wavelength λ, m.
    pub lambda: f64,
    /// Effective refractive index of the waveguides.
    pub n_g: f64,
    /// Channel-gain amplitude η (λ/4π for isotropic antennas).
    pub eta: f64,
    /// Noise power per user, W.
    pub noise_powers: Vec<f64>,
    /// Linear SINR targets γ_k.
    pub sinr_targets: Vec<f64>,
    pub ladder: AmplitudeLadder,
    pub feasible: FeasibleSet,
    /// Minimum spacing Δx between neighbouring antennas, m.
    pub min_spacing: f64,
}

impl Scenario {
    pub fn n_waveguides(&self) -> usize {
        self.waveguide_y.len()
    }

    pub fn n_antennas(&self) -> usize {
        self.ladder.len()
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    /// β₀ = 2π/λ.
    pub fn beta0(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    /// β_g = 2π n_g/λ.
    pub fn beta_g(&self) -> f64 {
        self.n_g * self.beta0()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, k) = (self.n_waveguides(), self.n_users());
        if k == 0 || n < k {
            return Err(invalid(format!("need N >= K >= 1, got N = {n}, K = {k}")));
        }
        if self.waveguide_z.len() != n {
            return Err(invalid("waveguide_y and waveguide_z lengths differ"));
        }
        if self.ladder.is_empty() {
            return Err(invalid("need at least one antenna per waveguide"));
        }
        if !(self.lambda > 0.0 && self.n_g > 0.0 && self.eta > 0.0) {
            return Err(invalid("lambda, n_g and eta must be > 0"));
        }
        if self.noise_powers.len() != k || self.sinr_targets.len() != k {
            return Err(invalid("need one noise power and one SINR target per user"));
        }
        if self.noise_powers.iter().any(|&s| !(s > 0.0)) {
            return Err(invalid("noise powers must be > 0"));
        }
        if self.sinr_targets.iter().any(|&g| !(g > 0.0)) {
            return Err(invalid("SINR targets must be > 0"));
        }
        if !(self.min_spacing >= 0.0) {
            return Err(invalid("minimum spacing must be >= 0"));
        }
        Ok(())
    }

    /// `ω_{k,n} = (y_n - y_k)² + (z_n - z_k)²`.
    pub fn omega(&self, user: usize, waveguide: usize) -> f64 {
        let u = &self.users[user];
        let dy = self.waveguide_y[waveguide] - u.y;
        let dz = self.waveguide_z[waveguide] - u.z;
        dy * dy + dz * dz
    }

    /// Distance from `user` to an antenna at `x_pos` on `waveguide`.
    pub fn distance(&self, user: usize, waveguide: usize, x_pos: f64) -> f64 {
        let dx = x_pos - self.users[user].x;
        (dx * dx + self.omega(user, waveguide)).sqrt()
    }

    /// `(η/r) e^{j(β₀ r + β_g x)}`: the Φ entry of an antenna at `x_pos`
    /// before scaling by its amplitude `α_m`.
    pub fn unit_response(&self, user: usize, waveguide: usize, x_pos: f64) -> Result<C64> {
        let r = self.distance(user, waveguide, x_pos);
        if r < MIN_DISTANCE {
            return Err(PassError::DegenerateGeometry {
                user,
                waveguide,
                distance: r,
            });
        }
        Ok(C64::from_polar(
            self.eta / r,
            self.beta0() * r + self.beta_g() * x_pos,
        ))
    }

    /// Evenly spread starting layout for this scenario.
    pub fn uniform_layout(&self) -> Result<PinchingLayout> {
        PinchingLayout::uniform(
            self.n_antennas(),
            self.n_waveguides(),
            &self.feasible,
            self.min_spacing,
        )
    }
}

/// `|p - q|` for an antenna on `waveguide` at `x_pos`: free helper mirroring
/// [`Scenario::distance`].
pub fn distance(user: &Position, waveguide_y: f64, waveguide_z: f64, x_pos: f64) -> f64 {
    user.distance_to(&Position::new(x_pos, waveguide_y, waveguide_z))
}

/// In-waveguide vector `g(x_n)`, entries `α_m e^{-j β_g x_{n,m}}`.
pub fn inwaveguide_vector(positions: &[f64], ladder: &AmplitudeLadder, beta_g: f64) -> DVector<C64> {
    DVector::from_iterator(
        positions.len(),
        positions
            .iter()
            .zip(&ladder.alphas)
            .map(|(&x, &a)| C64::from_polar(a, -beta_g * x)),
    )
}

/// Free-space vector `h_k(x_n)` as stored (i.e. already conjugated):
/// entries `(η/r) e^{+j β₀ r}`.
pub fn free_space_vector(
    scenario: &Scenario,
    layout: &PinchingLayout,
    user: usize,
    waveguide: usize,
) -> Result<DVector<C64>> {
    let m = layout.n_antennas();
    let mut h = DVector::zeros(m);
    for i in 0..m {
        let r = scenario.distance(user, waveguide, layout.x[(i, waveguide)]);
        if r < MIN_DISTANCE {
            return Err(PassError::DegenerateGeometry {
                user,
                waveguide,
                distance: r,
            });
        }
        h[i] = C64::from_polar(scenario.eta / r, scenario.beta0() * r);
    }
    Ok(h)
}

/// Effective channel `Ψ(X)` and its per-antenna parts `Φ_m(X)`.
#[derive(Debug, Clone)]
pub struct EffectiveChannel {
    pub psi: DMatrix<C64>,
    pub phis: Vec<DMatrix<C64>>,
}

pub fn effective_channel(scenario: &Scenario, layout: &PinchingLayout) -> Result<EffectiveChannel> {
    let (n_wg, m_ant, k_users) = (scenario.n_waveguides(), scenario.n_antennas(), scenario.n_users());
    if layout.n_waveguides() != n_wg || layout.n_antennas() != m_ant {
        return Err(invalid(format!(
            "layout is {}x{}, scenario expects {m_ant}x{n_wg}",
            layout.n_antennas(),
            layout.n_waveguides()
        )));
    }
    let mut phis = vec![DMatrix::zeros(n_wg, k_users); m_ant];
    let mut psi = DMatrix::zeros(n_wg, k_users);
    for (m, phi) in phis.iter_mut().enumerate() {
        let alpha = scenario.ladder.alphas[m];
        for n in 0..n_wg {
            let x = layout.x[(m, n)];
            for k in 0..k_users {
                let e = scenario.unit_response(k, n, x)? * alpha;
                phi[(n, k)] = e;
                psi[(n, k)] += e;
            }
        }
    }
    Ok(EffectiveChannel { psi, phis })
}

/// `Ψ` rebuilt entry by entry as `g(x_n)ᴴ h_k(x_n)`.
pub fn psi_from_vectors(scenario: &Scenario, layout: &PinchingLayout) -> Result<DMatrix<C64>> {
    let (n_wg, k_users) = (scenario.n_waveguides(), scenario.n_users());
    let beta_g = scenario.beta_g();
    let mut psi = DMatrix::zeros(n_wg, k_users);
    for n in 0..n_wg {
        let column: Vec<f64> = layout.x.column(n).iter().copied().collect();
        let g = inwaveguide_vector(&column, &scenario.ladder, beta_g);
        for k in 0..k_users {
            let h = free_space_vector(scenario, layout, k, n)?;
            psi[(n, k)] = g.dotc(&h);
        }
    }
    Ok(psi)
}

/// Per-user SINR for beamformer `w` (N×K) over effective channel `psi`.
pub fn received_sinr(psi: &DMatrix<C64>, w: &DMatrix<C64>, noise_powers: &[f64]) -> Vec<f64> {
    let k_users = psi.ncols();
    // gains[(k, i)] = |u_kᴴ w_i|²
    let gains = psi.ad_mul(w).map(|z| z.norm_sqr());
    (0..k_users)
        .map(|k| {
            let interference: f64 = (0..w.ncols()).filter(|&i| i != k).map(|i| gains[(k, i)]).sum();
            gains[(k, k)] / (interference + noise_powers[k])
        })
        .collect()
}
