#![allow(dead_code)]

use nalgebra::DMatrix;
use pinchbeam::channel::{FeasibleSet, Position, Scenario};
use pinchbeam::coupling::make_equal_ladder;
use pinchbeam::C64;

pub const LAMBDA: f64 = 0.02;

/// Small deployment with `n` waveguides at z = 3 spaced 6 m apart and users
/// at the given positions.
pub fn scenario(n: usize, m: usize, users: Vec<Position>, feasible: FeasibleSet) -> Scenario {
    let k = users.len();
    Scenario {
        waveguide_y: (0..n).map(|i| (i as f64 - 0.5 * (n - 1) as f64) * 6.0).collect(),
        waveguide_z: vec![3.0; n],
        users,
        lambda: LAMBDA,
        n_g: 1.4,
        eta: LAMBDA / (4.0 * std::f64::consts::PI),
        noise_powers: vec![1e-11; k],
        sinr_targets: vec![100.0; k],
        ladder: make_equal_ladder(m, 0.9 / m as f64).unwrap(),
        feasible,
        min_spacing: 0.1,
    }
}

/// Minimum total power for fixed unit beam directions: make both SINR
/// constraints tight, `F p = σ²`. `None` if no positive solution exists.
fn power_for_directions(u: &DMatrix<C64>, d: [[C64; 2]; 2], gammas: [f64; 2], noise: [f64; 2]) -> Option<f64> {
    let gain = |k: usize, i: usize| {
        let g = u[(0, k)].conj() * d[i][0] + u[(1, k)].conj() * d[i][1];
        g.norm_sqr()
    };
    let (a, b, c, e) = (gain(0, 0) / gammas[0], -gain(0, 1), -gain(1, 0), gain(1, 1) / gammas[1]);
    let det = a * e - b * c;
    if det <= 0.0 {
        return None;
    }
    let p0 = (e * noise[0] - b * noise[1]) / det;
    let p1 = (a * noise[1] - c * noise[0]) / det;
    (p0 > 0.0 && p1 > 0.0).then_some(p0 + p1)
}

fn direction(theta: f64, phase: f64) -> [C64; 2] {
    [C64::new(theta.cos(), 0.0), C64::from_polar(theta.sin(), phase)]
}

/// Exhaustive search over pairs of beam directions on a grid of the unit
/// sphere in C² (global phase removed), then a finer grid around the winner.
pub fn sphere_grid_oracle(u: &DMatrix<C64>, gammas: [f64; 2], noise: [f64; 2]) -> f64 {
    let (nt, np) = (48, 96);
    let coarse: Vec<(f64, f64)> = (0..=nt)
        .flat_map(|i| (0..np).map(move |j| (i as f64 * std::f64::consts::FRAC_PI_2 / nt as f64, j as f64 * std::f64::consts::TAU / np as f64)))
        .collect();
    let dirs: Vec<[C64; 2]> = coarse.iter().map(|&(t, p)| direction(t, p)).collect();
    let mut best = (f64::INFINITY, 0, 0);
    for (i, d0) in dirs.iter().enumerate() {
        for (j, d1) in dirs.iter().enumerate() {
            if let Some(p) = power_for_directions(u, [*d0, *d1], gammas, noise) {
                if p < best.0 {
                    best = (p, i, j);
                }
            }
        }
    }
    let (mut best_p, mut c0, mut c1) = (best.0, coarse[best.1], coarse[best.2]);
    let (mut dt, mut dp) = (std::f64::consts::FRAC_PI_2 / nt as f64, std::f64::consts::TAU / np as f64);
    for _ in 0..6 {
        let steps = 6;
        let local = |c: (f64, f64)| -> Vec<(f64, f64)> {
            (-steps..=steps)
                .flat_map(|a| (-steps..=steps).map(move |b| (c.0 + a as f64 * dt / steps as f64, c.1 + b as f64 * dp / steps as f64)))
                .collect()
        };
        let (l0, l1) = (local(c0), local(c1));
        let (mut n0, mut n1) = (c0, c1);
        for &a in &l0 {
            for &b in &l1 {
                if let Some(p) = power_for_directions(u, [direction(a.0, a.1), direction(b.0, b.1)], gammas, noise) {
                    if p < best_p {
                        best_p = p;
                        n0 = a;
                        n1 = b;
                    }
                }
            }
        }
        c0 = n0;
        c1 = n1;
        dt /= 3.0;
        dp /= 3.0;
    }
    best_p
}
