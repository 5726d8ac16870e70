//! Element-wise one-dimensional position search shared by the ZF and penalty
//! designs.
//!
//! Each antenna coordinate is optimised over
//! `S_{n,m} = [x_{n,m-1} + Δx, x_{n,m+1} - Δx] ∩ S` (first antenna bounded
//! below by 0, last one above by `x_max`) by exhaustive evaluation on a grid.
//! For continuous activation the winner is polished with a golden-section
//! search inside its grid cell.
//!
//! The per-antenna channel contribution only depends on the position and on
//! the amplitude `α_m`, so the unit responses `(η/r)e^{j(β₀r + β_g x)}` of
//! every waveguide/user pair are tabulated once per scenario.

use crate::channel::{Activation, FeasibleSet, PinchingLayout, Scenario, SPACING_SLACK};
use crate::error::{invalid, Result};
use crate::C64;

/// Default number of search points over `[0, x_max]` for continuous activation.
pub const DEFAULT_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    feasible: FeasibleSet,
    points: usize,
}

impl SearchGrid {
    /// `grid_points` is used for continuous activation; discrete activation
    /// always searches the feasible set itself.
    pub fn new(feasible: &FeasibleSet, grid_points: usize) -> Result<Self> {
        let points = match feasible.kind {
            Activation::Continuous => {
                if grid_points < 2 {
                    return Err(invalid(format!("search grid needs >= 2 points, got {grid_points}")));
                }
                grid_points
            }
            Activation::Discrete => feasible.q_points,
        };
        Ok(Self {
            feasible: *feasible,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn step(&self) -> f64 {
        self.feasible.x_max / (self.points - 1) as f64
    }

    pub fn refinable(&self) -> bool {
        self.feasible.kind == Activation::Continuous
    }

    pub fn point(&self, i: usize) -> f64 {
        match self.feasible.kind {
            Activation::Discrete => self.feasible.grid_point(i),
            Activation::Continuous => {
                if i + 1 == self.points {
                    self.feasible.x_max
                } else {
                    i as f64 * self.step()
                }
            }
        }
    }

    /// Grid indices whose points fall inside `[lo, hi]`.
    pub fn indices_in(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let tol = 0.5 * SPACING_SLACK;
        if hi < lo - tol {
            return 0..0;
        }
        let h = self.step();
        let mut first = ((lo / h).ceil().max(0.0) as usize).saturating_sub(1);
        while first < self.points && self.point(first) < lo - tol {
            first += 1;
        }
        let mut end = (((hi / h).floor().max(0.0) as usize) + 2).min(self.points);
        while end > first && self.point(end - 1) > hi + tol {
            end -= 1;
        }
        first..end.max(first)
    }
}

/// Search interval for antenna `m` of waveguide `n`, or `None` when the
/// neighbours leave no room.
pub fn search_interval(
    layout: &PinchingLayout,
    n: usize,
    m: usize,
    feasible: &FeasibleSet,
    min_spacing: f64,
) -> Option<(f64, f64)> {
    let lo = if m == 0 {
        0.0
    } else {
        layout.x[(m - 1, n)] + min_spacing
    };
    let hi = if m + 1 == layout.n_antennas() {
        feasible.x_max
    } else {
        layout.x[(m + 1, n)] - min_spacing
    };
    let (lo, hi) = (lo.max(0.0), hi.min(feasible.x_max));
    (hi >= lo - 0.5 * SPACING_SLACK).then_some((lo, hi))
}

/// Unit responses of every waveguide/user pair at every grid point, laid out
/// so that the K responses of one (waveguide, point) pair are contiguous.
#[derive(Debug, Clone)]
pub struct ResponseTable {
    grid: SearchGrid,
    n_users: usize,
    data: Vec<C64>,
}

impl ResponseTable {
    pub fn new(scenario: &Scenario, grid: SearchGrid) -> Result<Self> {
        let (n_wg, k_users) = (scenario.n_waveguides(), scenario.n_users());
        let mut data = Vec::with_capacity(n_wg * grid.len() * k_users);
        for n in 0..n_wg {
            for i in 0..grid.len() {
                let x = grid.point(i);
                for k in 0..k_users {
                    data.push(scenario.unit_response(k, n, x)?);
                }
            }
        }
        Ok(Self {
            grid,
            n_users: k_users,
            data,
        })
    }

    pub fn grid(&self) -> &SearchGrid {
        &self.grid
    }

    /// Responses of all users to an antenna at grid point `i` of waveguide `n`.
    pub fn responses(&self, n: usize, i: usize) -> &[C64] {
        let start = (n * self.grid.len() + i) * self.n_users;
        &self.data[start..start + self.n_users]
    }
}

/// Grid search plus optional in-cell refinement for one coordinate.
pub(crate) struct CoordinateSearch<'a> {
    pub scenario: &'a Scenario,
    pub table: &'a ResponseTable,
    pub refine: bool,
}

impl CoordinateSearch<'_> {
    fn direct(&self, n: usize, x: f64, buf: &mut Vec<C64>) -> Result<()> {
        buf.clear();
        for k in 0..self.scenario.n_users() {
            buf.push(self.scenario.unit_response(k, n, x)?);
        }
        Ok(())
    }

    /// Minimises `score(responses)` over `[lo, hi]`, never returning anything
    /// worse than the incumbent. Ties go to the smaller coordinate.
    pub fn minimize(
        &self,
        n: usize,
        (lo, hi): (f64, f64),
        incumbent: f64,
        mut score: impl FnMut(&[C64]) -> f64,
    ) -> Result<(f64, f64)> {
        let grid = self.table.grid();
        let mut buf = Vec::with_capacity(self.scenario.n_users());

        let mut best: Option<(f64, f64)> = None;
        for i in grid.indices_in(lo, hi) {
            let v = score(self.table.responses(n, i));
            if best.map_or(true, |(_, bv)| v < bv) {
                best = Some((grid.point(i), v));
            }
        }

        if self.refine && grid.refinable() {
            if let Some((bx, bv)) = best {
                let h = grid.step();
                let (a, b) = ((bx - h).max(lo), (bx + h).min(hi));
                let mut eval = |x: f64| -> Result<f64> {
                    self.direct(n, x, &mut buf)?;
                    Ok(score(&buf))
                };
                let (rx, rv) = golden_section(a, b, 30, &mut eval)?;
                if rv < bv {
                    best = Some((rx, rv));
                }
            }
        }

        self.direct(n, incumbent, &mut buf)?;
        let iv = score(&buf);
        Ok(match best {
            Some((bx, bv)) if bv < iv || (bv == iv && bx < incumbent) => (bx, bv),
            _ => (incumbent, iv),
        })
    }
}

/// Golden-section minimisation of `f` on `[a, b]`.
pub(crate) fn golden_section(
    mut a: f64,
    mut b: f64,
    iters: usize,
    f: &mut impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}
