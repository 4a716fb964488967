//! Boundaries, long-edge counts, the `R(n), ε(n), δ(n)` schedule, the
//! long-edge concentration check and the low-energy probe.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::IdsEstimate;
use crate::kernels::{Kernel, ModelParams};
use crate::lattice::{BoxRegion, Site};
use crate::sampler::{sample_window, SamplingOptions, WindowGraph};
use crate::spectra::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: usize,
    pub r_n: usize,
    pub eps_n: f64,
    pub delta_n: f64,
}

/// Smallest `r` with `r² ≥ n`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// `R(n) = ⌈√n⌉`, `ε(n) = ε_{R(n)}`, `δ(n) = (2n+1)^{−d/4}`.
pub fn default_schedule(n: usize, kernel: &Kernel) -> Result<Schedule> {
    if n == 0 {
        return Err(Error::invalid("n", "the schedule needs n ≥ 1"));
    }
    let r_n = ceil_sqrt(n);
    let d = kernel.dimension() as f64;
    Ok(Schedule {
        n,
        r_n,
        eps_n: kernel.tail(r_n as u64),
        delta_n: ((2 * n + 1) as f64).powf(-d / 4.0),
    })
}

/// `|∂^R Λ_n|`: sites of `Λ_n` within ℓ¹ distance `R` of the complement,
/// i.e. with `max_i |x_i| > n − R`.
pub fn boundary_size(n: usize, r: i64, d: usize) -> Result<u64> {
    if r < 0 {
        return Err(Error::invalid("R", format!("{r} is negative")));
    }
    let side = (2 * n + 1) as u64;
    let total = side.pow(d as u32);
    if r as u64 > n as u64 {
        return Ok(total);
    }
    let inner = (2 * (n as u64 - r as u64) + 1).pow(d as u32);
    Ok(total - inner)
}

/// Enumerates `∂^R Λ_n` directly: ℓ¹ distance from `x` to the complement is
/// `min_i (n + 1 − |x_i|)`.
pub fn boundary_size_brute(n: usize, r: i64, d: usize) -> u64 {
    let region = BoxRegion::new(n, d);
    region
        .sites()
        .filter(|x| {
            let dist = x.iter().map(|c| n as i64 + 1 - c.abs()).min().unwrap_or(i64::MAX);
            dist <= r
        })
        .count() as u64
}

fn check_r(r: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("R", "long edges need R ≥ 1"));
    }
    Ok(())
}

/// `L(R, Q)`: present edges of length `≥ R` with an endpoint in `Q`.
pub fn long_edge_count(graph: &WindowGraph, r: u64, q: &[Site]) -> Result<usize> {
    check_r(r)?;
    let region = graph.region();
    if q.iter().any(|x| x.len() != graph.d || !region.contains(x)) {
        return Err(Error::OutsideWindow { n: graph.n });
    }
    let set: HashSet<&Site> = q.iter().collect();
    Ok(graph
        .edges()
        .filter(|(e, _)| e.length() >= r)
        .filter(|(e, _)| {
            let (x, y) = e.endpoints();
            set.contains(x) || y.is_some_and(|y| set.contains(y))
        })
        .count())
}

/// `L(R, Λ_m)` for a centred sub-box, without materializing `Q`.
pub fn long_edge_count_box(graph: &WindowGraph, r: u64, m: usize) -> Result<usize> {
    check_r(r)?;
    if m > graph.n {
        return Err(Error::OutsideWindow { n: graph.n });
    }
    let q = BoxRegion::new(m, graph.d);
    Ok(graph
        .edges()
        .filter(|(e, _)| e.length() >= r)
        .filter(|(e, _)| {
            let (x, y) = e.endpoints();
            q.contains(x) || y.is_some_and(|y| q.contains(y))
        })
        .count())
}

/// `(3|∂^{R(n)}Λ_n| + 3 L_n) / |Λ_n|` with `L_n = L(R(n), Λ_n)`.
pub fn error_bound(n: usize, d: usize, r_n: usize, long_edges: f64) -> Result<f64> {
    let boundary = boundary_size(n, r_n as i64, d)? as f64;
    let volume = BoxRegion::new(n, d).volume() as f64;
    Ok((3.0 * boundary + 3.0 * long_edges) / volume)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub delta: f64,
    pub r: u64,
    pub q_radius: usize,
    pub q_size: usize,
    pub eps_r: f64,
    /// `|Q|(ε_R + δ)`.
    pub threshold: f64,
    pub trials: usize,
    pub exceedances: usize,
    pub empirical: f64,
    /// `exp(−δ²|Q|/4)`.
    pub bound: f64,
    /// `3·sqrt(bound(1 − bound)/trials) + trunc_tol·|Q|`.
    pub slack: f64,
    pub passed: bool,
    pub seeds: Vec<u64>,
}

pub fn concentration_bound(delta: f64, q_size: usize) -> f64 {
    (-delta * delta * q_size as f64 / 4.0).exp()
}

/// Long-edge counts `L(R, Λ_{q_radius})` of one independent realization per seed.
pub fn long_edge_samples(
    params: &ModelParams,
    r: u64,
    q_radius: usize,
    seeds: &[u64],
    opts: &SamplingOptions,
) -> Result<Vec<usize>> {
    check_r(r)?;
    seeds
        .par_iter()
        .map(|&s| {
            let g = sample_window(&params.with_seed(s), q_radius, opts)?;
            long_edge_count_box(&g, r, q_radius)
        })
        .collect()
}

/// Checks `P(L(R,Q) ≥ |Q|(ε_R + δ)) ≤ exp(−δ²|Q|/4)` for each `δ`, sharing
/// the sampled counts across all `δ`.
pub fn concentration_scan(
    params: &ModelParams,
    r: u64,
    q_radius: usize,
    deltas: &[f64],
    seeds: &[u64],
    opts: &SamplingOptions,
) -> Result<Vec<ConcentrationReport>> {
    if seeds.is_empty() {
        return Err(Error::Empty("concentration check needs at least one trial"));
    }
    if let Some(&bad) = deltas.iter().find(|&&d| !(d > 0.0)) {
        return Err(Error::invalid("delta", format!("{bad} must be positive")));
    }
    let counts = long_edge_samples(params, r, q_radius, seeds, opts)?;
    let q_size = BoxRegion::new(q_radius, params.dimension()).volume();
    let eps_r = params.kernel().tail(r);
    let trials = seeds.len();
    Ok(deltas
        .iter()
        .map(|&delta| {
            let threshold = q_size as f64 * (eps_r + delta);
            let exceedances = counts.iter().filter(|&&l| l as f64 >= threshold).count();
            let empirical = exceedances as f64 / trials as f64;
            let bound = concentration_bound(delta, q_size);
            let slack = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt() + opts.trunc_tol * q_size as f64;
            let passed = empirical <= bound + slack;
            if !passed {
                log::warn!("long-edge concentration violated at R={r}, δ={delta}: {empirical} > {bound} + {slack}");
            }
            ConcentrationReport {
                delta,
                r,
                q_radius,
                q_size,
                eps_r,
                threshold,
                trials,
                exceedances,
                empirical,
                bound,
                slack,
                passed,
                seeds: seeds.to_vec(),
            }
        })
        .collect())
}

pub fn concentration_check(
    params: &ModelParams,
    r: u64,
    q_radius: usize,
    delta: f64,
    seeds: &[u64],
    opts: &SamplingOptions,
) -> Result<ConcentrationReport> {
    Ok(concentration_scan(params, r, q_radius, &[delta], seeds, opts)?.remove(0))
}

/// Eigenvalues within this distance of 0 belong to the atom at 0.
pub const ZERO_ATOM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifshitzPoint {
    pub e: f64,
    pub g: f64,
    pub log_e: f64,
    /// `log(−log G)`; absent when `G ∉ (0, 1)`.
    pub loglog_g: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifshitzFit {
    pub points: Vec<LifshitzPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub usable: usize,
}

/// Least-squares fit of `log(−log G)` against `log E` over points with `0 < G < 1`.
pub fn fit_lifshitz(e_grid: &[f64], g: &[f64]) -> Result<LifshitzFit> {
    if e_grid.len() != g.len() {
        return Err(Error::VectorLength {
            expected: e_grid.len(),
            actual: g.len(),
        });
    }
    if let Some(&bad) = e_grid.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::invalid("E_grid", format!("{bad} is not positive")));
    }
    if e_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("E_grid", "must be strictly ascending"));
    }
    let points: Vec<LifshitzPoint> = e_grid
        .iter()
        .zip(g)
        .map(|(&e, &g)| LifshitzPoint {
            e,
            g,
            log_e: e.ln(),
            loglog_g: (g > 0.0 && g < 1.0).then(|| (-g.ln()).ln()),
        })
        .collect();
    let xy: Vec<(f64, f64)> = points.iter().filter_map(|p| p.loglog_g.map(|y| (p.log_e, y))).collect();
    if xy.len() < 3 {
        return Err(Error::InsufficientPoints {
            usable: xy.len(),
            required: 3,
        });
    }
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(LifshitzFit {
        usable: xy.len(),
        intercept: my - slope * mx,
        slope,
        points,
    })
}

/// `G(E)`: mass of the IDS on `[−E, 0)`, i.e. the Laplacian IDS on `(0, E]` under `E = |λ|`.
pub fn low_energy_mass(curve: &StepFunction, e: f64) -> f64 {
    (curve.left_limit(-ZERO_ATOM_TOL) - curve.left_limit(-e)).max(0.0)
}

pub fn lifshitz_probe(ids: &IdsEstimate, e_grid: &[f64]) -> Result<LifshitzFit> {
    let g: Vec<f64> = e_grid.iter().map(|&e| low_energy_mass(&ids.curve, e)).collect();
    for (e, g) in e_grid.iter().zip(&g) {
        if *g <= 0.0 {
            log::info!("G({e}) = {g}: excluded from the fit");
        }
    }
    fit_lifshitz(e_grid, &g)
}
