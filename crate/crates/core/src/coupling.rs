//! Coupled-mode model of a pinching antenna acting as an open-ended
//! directional coupler, and the per-antenna radiation amplitudes that follow
//! from it when several antennas share one waveguide.
//!
//! Along the coupling section the guided-mode amplitude `A(x)` and the
//! pinching-antenna amplitude `B(x)` obey
//!
//! ```text
//! dA/dx = -j κ B e^{-j Δβ x},   dB/dx = -j κ A e^{+j Δβ x},   A(0) = 1, B(0) = 0
//! ```
//!
//! with `Δβ = β_p - β_g`. [`mode_amplitudes`] evaluates the closed-form
//! solution and [`integrate_modes`] integrates the system numerically (RK4)
//! so the two can be checked against each other.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, PassError, Result};
use crate::C64;

/// Default coupling coefficient, rad/m. Coupling lengths come out at a few
/// centimetres.
pub const DEFAULT_KAPPA: f64 = 100.0;

/// Physical parameters of one waveguide/pinching-antenna coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    /// Mode coupling coefficient κ, rad/m.
    pub kappa: f64,
    /// Coupling length L, m.
    pub length: f64,
    /// Waveguide propagation constant β_g, rad/m.
    pub beta_g: f64,
    /// Pinching-antenna propagation constant β_p, rad/m.
    pub beta_p: f64,
}

impl CouplingConfig {
    pub fn new(kappa: f64, length: f64, beta_g: f64, beta_p: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(invalid(format!("kappa must be > 0, got {kappa}")));
        }
        if !(length >= 0.0 && length.is_finite()) {
            return Err(invalid(format!("coupling length must be >= 0, got {length}")));
        }
        if !(beta_g > 0.0 && beta_p > 0.0) {
            return Err(invalid("propagation constants must be > 0"));
        }
        Ok(Self {
            kappa,
            length,
            beta_g,
            beta_p,
        })
    }

    /// Coupler whose antenna has the same effective index as the waveguide.
    pub fn matched(kappa: f64, length: f64, beta: f64) -> Result<Self> {
        Self::new(kappa, length, beta, beta)
    }

    pub fn delta_beta(&self) -> f64 {
        self.beta_p - self.beta_g
    }

    /// `φ = sqrt(κ² + Δβ²/4)`.
    pub fn phi(&self) -> f64 {
        let db = self.delta_beta();
        (self.kappa * self.kappa + 0.25 * db * db).sqrt()
    }

    /// Largest fraction of the input power that can ever reach the antenna.
    pub fn max_transfer(&self) -> f64 {
        let r = self.kappa / self.phi();
        r * r
    }

    /// Default RK4 step, `10⁻³/φ`: a thousand steps per radian of `φx`.
    pub fn default_step(&self) -> f64 {
        1e-3 / self.phi()
    }
}

/// Closed-form `(A(x), B(x))`.
pub fn mode_amplitudes(cfg: &CouplingConfig, x: f64) -> (C64, C64) {
    let db = cfg.delta_beta();
    let phi = cfg.phi();
    let (s, c) = (phi * x).sin_cos();
    let a = C64::new(c, 0.5 * db / phi * s) * C64::from_polar(1.0, -0.5 * db * x);
    let b = C64::new(0.0, -cfg.kappa / phi * s) * C64::from_polar(1.0, 0.5 * db * x);
    (a, b)
}

/// Integrates the coupled-mode equations from 0 to `x` with classic RK4.
///
/// The step is shrunk slightly so that an integer number of steps lands
/// exactly on `x`.
pub fn integrate_modes(cfg: &CouplingConfig, x: f64, step: f64) -> Result<(C64, C64)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("integration step must be > 0, got {step}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid(format!("propagation distance must be >= 0, got {x}")));
    }
    let mut state = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    if x == 0.0 {
        return Ok((state[0], state[1]));
    }

    let kappa = cfg.kappa;
    let db = cfg.delta_beta();
    let minus_j_kappa = C64::new(0.0, -kappa);
    let deriv = |t: f64, s: &[C64; 2]| -> [C64; 2] {
        let rot = C64::from_polar(1.0, db * t);
        [minus_j_kappa * s[1] * rot.conj(), minus_j_kappa * s[0] * rot]
    };

    let n = (x / step).ceil().max(1.0) as usize;
    let h = x / n as f64;
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = deriv(t, &state);
        let s2 = [state[0] + k1[0] * (0.5 * h), state[1] + k1[1] * (0.5 * h)];
        let k2 = deriv(t + 0.5 * h, &s2);
        let s3 = [state[0] + k2[0] * (0.5 * h), state[1] + k2[1] * (0.5 * h)];
        let k3 = deriv(t + 0.5 * h, &s3);
        let s4 = [state[0] + k3[0] * h, state[1] + k3[1] * h];
        let k4 = deriv(t + h, &s4);
        for j in 0..2 {
            state[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    Ok((state[0], state[1]))
}

/// `(P_guide(x), P_pinch(x))`, the power fractions left in the waveguide and
/// transferred to the antenna after a coupling length `x`.
pub fn power_split(cfg: &CouplingConfig, x: f64) -> (f64, f64) {
    let s = (cfg.phi() * x).sin();
    let p_pinch = cfg.max_transfer() * s * s;
    (1.0 - p_pinch, p_pinch)
}

/// Coupling length at which a matched coupler hands all power to the antenna.
pub fn full_radiation_length(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid(format!("kappa must be > 0, got {kappa}")));
    }
    Ok(FRAC_PI_2 / kappa)
}

/// How the coupling lengths of the antennas on one waveguide are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerModel {
    /// Every antenna radiates the same share of the input power.
    Equal,
    /// Every antenna has the same length and radiates the same share of
    /// whatever power is still in the waveguide.
    Proportional,
}

impl PowerModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PowerModel::Equal => "equal",
            PowerModel::Proportional => "proportional",
        }
    }

    /// Ladder of `m` antennas that together radiate `total_radiated` of the
    /// input power.
    pub fn ladder(&self, m: usize, total_radiated: f64) -> Result<AmplitudeLadder> {
        match self {
            PowerModel::Equal => {
                if m == 0 {
                    return Err(invalid("ladder needs at least one antenna"));
                }
                make_equal_ladder(m, total_radiated / m as f64)
            }
            PowerModel::Proportional => make_proportional_ladder(m, total_radiated),
        }
    }
}

impl std::str::FromStr for PowerModel {
    type Err = PassError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(PowerModel::Equal),
            "proportional" => Ok(PowerModel::Proportional),
            other => Err(invalid(format!("unknown power model '{other}'"))),
        }
    }
}

/// Radiation amplitudes `α_m` of the antennas on one waveguide, in feed order,
/// together with the per-antenna coupling ratios `δ_m = sin(κ L_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeLadder {
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub model: PowerModel,
}

impl AmplitudeLadder {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `Σ α_m²`, the fraction of the input power that leaves the waveguide.
    pub fn total_radiated(&self) -> f64 {
        self.alphas.iter().map(|a| a * a).sum()
    }

    /// Coupling lengths `L_m = arcsin(δ_m)/κ` realising this ladder.
    pub fn lengths(&self, kappa: f64) -> Result<Vec<f64>> {
        if !(kappa > 0.0) {
            return Err(invalid(format!("kappa must be > 0, got {kappa}")));
        }
        Ok(self.deltas.iter().map(|d| d.asin() / kappa).collect())
    }
}

/// `α_m = δ_m Π_{i<m} sqrt(1 - δ_i²)`.
pub fn alphas_from_deltas(deltas: &[f64]) -> Vec<f64> {
    let mut remaining = 1.0;
    deltas
        .iter()
        .map(|&d| {
            let a = d * remaining;
            remaining *= (1.0 - d * d).max(0.0).sqrt();
            a
        })
        .collect()
}

/// Equal-power ladder: every antenna radiates `delta_eq` of the input power.
pub fn make_equal_ladder(m: usize, delta_eq: f64) -> Result<AmplitudeLadder> {
    if m == 0 {
        return Err(invalid("ladder needs at least one antenna"));
    }
    if !(delta_eq > 0.0) {
        return Err(invalid(format!("equal-power ratio must be > 0, got {delta_eq}")));
    }
    if delta_eq * m as f64 > 1.0 + 1e-12 {
        return Err(PassError::InfeasibleLadder(format!(
            "equal-power ratio {delta_eq} exceeds 1/M = {}",
            1.0 / m as f64
        )));
    }
    let deltas = (0..m)
        .map(|i| {
            let rest = (1.0 - i as f64 * delta_eq).max(delta_eq);
            (delta_eq / rest).sqrt().min(1.0)
        })
        .collect();
    Ok(AmplitudeLadder {
        alphas: vec![delta_eq.sqrt(); m],
        deltas,
        model: PowerModel::Equal,
    })
}

/// Proportional ladder: identical antennas, each radiating `δ²` of the power
/// that reaches it, with `δ` chosen so the whole ladder radiates
/// `total_radiated`.
pub fn make_proportional_ladder(m: usize, total_radiated: f64) -> Result<AmplitudeLadder> {
    if m == 0 {
        return Err(invalid("ladder needs at least one antenna"));
    }
    if !(total_radiated > 0.0 && total_radiated < 1.0) {
        return Err(invalid(format!(
            "total radiated fraction must lie in (0, 1), got {total_radiated}"
        )));
    }
    // 1 - (1 - δ²)^M = t  =>  δ² = 1 - (1 - t)^(1/M)
    let keep = (1.0 - total_radiated).powf(1.0 / m as f64);
    let delta = (1.0 - keep).sqrt();
    let alphas = (0..m).map(|i| delta * keep.powf(0.5 * i as f64)).collect();
    Ok(AmplitudeLadder {
        alphas,
        deltas: vec![delta; m],
        model: PowerModel::Proportional,
    })
}
