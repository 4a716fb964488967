//! IDS estimators: normalized eigenvalue counting, the projector-diagonal
//! route at the origin or averaged over an inner window, jump masses and
//! single-realization convergence scans.
//!
//! Per-seed pipelines run in parallel; every reduction over seeds happens
//! afterwards in seed order so results do not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::diagnostics::{self, default_schedule};
use crate::error::{Error, Result};
use crate::kernels::ModelParams;
use crate::lattice::BoxRegion;
use crate::operator::assemble;
use crate::sampler::{sample_window, SamplingOptions, WindowGraph};
use crate::spectra::{self, clusters, counting_function, eigen, eigen_window_weights, Spectrum, StepFunction};

/// Sampling options plus an optional cache consulted before recomputation.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    pub sampling: SamplingOptions,
    pub cache: Option<Cache>,
}

impl Engine {
    pub fn new(sampling: SamplingOptions) -> Self {
        Self { sampling, cache: None }
    }

    pub fn with_cache(mut self, cache: Cache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn window(&self, params: &ModelParams, n: usize) -> Result<WindowGraph> {
        let key = Cache::window_key(params, n, self.sampling.trunc_tol);
        if let Some(g) = self.cache.as_ref().and_then(|c| c.load::<WindowGraph>(&key)) {
            return Ok(g);
        }
        let g = sample_window(params, n, &self.sampling)?;
        if let Some(c) = &self.cache {
            c.store(&key, &g)?;
        }
        Ok(g)
    }

    /// Spectrum of `H_n`; with `center`, overlaps at the origin are included.
    pub fn spectrum(&self, params: &ModelParams, n: usize, center: bool) -> Result<Spectrum> {
        let key = Cache::spectrum_key(params, n, self.sampling.trunc_tol, center);
        if let Some(s) = self.cache.as_ref().and_then(|c| c.load::<Spectrum>(&key)) {
            return Ok(s);
        }
        let g = self.window(params, n)?;
        let m = assemble(&g, params)?;
        let s = eigen(&m, center.then(|| g.region().origin_index()))?;
        if let Some(c) = &self.cache {
            c.store(&key, &s)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Counting,
    PasturShubinCenter,
    PasturShubinTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsMode {
    /// Diagonal element at the origin.
    Center,
    /// Average over `Λ_{n−buffer}`; `None` uses the schedule radius `R(n)`.
    Trace { buffer: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdsEstimate {
    pub curve: StepFunction,
    pub method: Method,
    pub n: usize,
    pub realizations: usize,
    pub seeds: Vec<u64>,
    pub params_digest: String,
    pub trunc_tol: f64,
    /// `|Λ_m|/|Λ_n|` divided out in trace mode.
    pub normalization_factor: Option<f64>,
    /// Inner radius `m` in trace mode.
    pub inner_radius: Option<usize>,
}

fn check_seeds(seeds: &[u64]) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::Empty("at least one seed is required"));
    }
    Ok(())
}

fn divide_by(f: &StepFunction, total: f64) -> Result<StepFunction> {
    StepFunction::new(f.breakpoints().to_vec(), f.cumulative().iter().map(|c| c / total).collect())
}

/// `F_n^ω / |Λ_n|` for one seed.
pub fn counting_curve(engine: &Engine, params: &ModelParams, n: usize, seed: u64) -> Result<StepFunction> {
    let p = params.with_seed(seed);
    let s = engine.spectrum(&p, n, false)?;
    spectra::normalize(&counting_function(&s), s.size())
}

pub fn ids_counting(engine: &Engine, params: &ModelParams, n: usize, seeds: &[u64]) -> Result<IdsEstimate> {
    check_seeds(seeds)?;
    let curves: Vec<StepFunction> = seeds
        .par_iter()
        .map(|&s| counting_curve(engine, params, n, s))
        .collect::<Result<_>>()?;
    Ok(IdsEstimate {
        curve: StepFunction::average(&curves)?,
        method: Method::Counting,
        n,
        realizations: seeds.len(),
        seeds: seeds.to_vec(),
        params_digest: params.digest(),
        trunc_tol: engine.sampling.trunc_tol,
        normalization_factor: None,
        inner_radius: None,
    })
}

/// Inner radius `m = n − buffer` of the trace-mode window.
pub fn inner_radius(params: &ModelParams, n: usize, buffer: Option<usize>) -> Result<usize> {
    let b = match buffer {
        Some(b) => b,
        None if n == 0 => 0,
        None => default_schedule(n, params.kernel())?.r_n,
    };
    n.checked_sub(b)
        .ok_or_else(|| Error::invalid("buffer", format!("{b} exceeds the box radius {n}")))
}

/// `Σ_{k: λ_k ≤ λ} |ψ_k(0)|²` for one seed.
pub fn center_curve(engine: &Engine, params: &ModelParams, n: usize, seed: u64) -> Result<StepFunction> {
    let p = params.with_seed(seed);
    let s = engine.spectrum(&p, n, true)?;
    let w = s.center_overlaps.clone().expect("center requested");
    let f = spectra::weighted_counting(&s, &w)?;
    let total = f.final_value();
    divide_by(&f, total)
}

/// `|Λ_m|^{-1} Σ_{x∈Λ_m} Σ_{k: λ_k ≤ λ} |ψ_k(x)|²` for one seed, renormalized
/// to final value 1.
pub fn trace_curve(engine: &Engine, params: &ModelParams, n: usize, m: usize, seed: u64) -> Result<StepFunction> {
    let p = params.with_seed(seed);
    let g = engine.window(&p, n)?;
    let mat = assemble(&g, &p)?;
    let region = g.region();
    let inner = BoxRegion::new(m, region.d);
    let mask: Vec<bool> = region.sites().map(|x| inner.contains(&x)).collect();
    let (s, w) = eigen_window_weights(&mat, &mask)?;
    let f = spectra::weighted_counting(&s, &w)?;
    let total = f.final_value();
    divide_by(&f, total)
}

pub fn ids_pastur_shubin(
    engine: &Engine,
    params: &ModelParams,
    n: usize,
    seeds: &[u64],
    mode: PsMode,
) -> Result<IdsEstimate> {
    check_seeds(seeds)?;
    let (method, m) = match mode {
        PsMode::Center => (Method::PasturShubinCenter, None),
        PsMode::Trace { buffer } => (Method::PasturShubinTrace, Some(inner_radius(params, n, buffer)?)),
    };
    let curves: Vec<StepFunction> = seeds
        .par_iter()
        .map(|&s| match m {
            None => center_curve(engine, params, n, s),
            Some(m) => trace_curve(engine, params, n, m, s),
        })
        .collect::<Result<_>>()?;
    let d = params.dimension();
    Ok(IdsEstimate {
        curve: StepFunction::average(&curves)?,
        method,
        n,
        realizations: seeds.len(),
        seeds: seeds.to_vec(),
        params_digest: params.digest(),
        trunc_tol: engine.sampling.trunc_tol,
        normalization_factor: m.map(|m| BoxRegion::new(m, d).volume() as f64 / BoxRegion::new(n, d).volume() as f64),
        inner_radius: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub lambda: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    /// Every eigenvalue cluster of the pooled seeds, ascending.
    pub atoms: Vec<Atom>,
    pub tolerance: f64,
    pub error_bound: f64,
    pub n: usize,
    pub r_n: usize,
    pub mean_long_edges: f64,
    pub seeds: Vec<u64>,
}

impl AtomReport {
    /// Total mass of atoms within `tol` of `lambda`.
    pub fn mass_near(&self, lambda: f64, tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.lambda - lambda).abs() <= tol)
            .map(|a| a.mass)
            .sum()
    }

    pub fn largest(&self) -> Option<Atom> {
        self.atoms.iter().copied().max_by(|a, b| a.mass.total_cmp(&b.mass))
    }
}

struct SeedAtoms {
    atoms: Vec<(f64, f64)>,
    tolerance: f64,
    long_edges: usize,
}

fn seed_atoms(engine: &Engine, params: &ModelParams, n: usize, r_n: usize, seed: u64) -> Result<SeedAtoms> {
    let p = params.with_seed(seed);
    let g = engine.window(&p, n)?;
    let s = engine.spectrum(&p, n, false)?;
    let size = s.size() as f64;
    let atoms = s
        .clusters()
        .into_iter()
        .map(|c| (s.eigenvalues[c.start + (c.len() - 1) / 2], c.len() as f64 / size))
        .collect();
    Ok(SeedAtoms {
        atoms,
        tolerance: s.cluster_tolerance(),
        long_edges: diagnostics::long_edge_count_box(&g, r_n as u64, n)?,
    })
}

/// Jump masses `ρ_n({λ})/|Λ_n|` averaged over seeds, with the finite-scale
/// error term `(3|∂^{R(n)}Λ_n| + 3·mean L_n)/|Λ_n|`.
pub fn atom_report(engine: &Engine, params: &ModelParams, n: usize, seeds: &[u64]) -> Result<AtomReport> {
    check_seeds(seeds)?;
    let r_n = default_schedule(n.max(1), params.kernel())?.r_n;
    let per: Vec<SeedAtoms> = seeds
        .par_iter()
        .map(|&s| seed_atoms(engine, params, n, r_n, s))
        .collect::<Result<_>>()?;
    let tolerance = per.iter().map(|p| p.tolerance).fold(0.0, f64::max);
    let k = seeds.len() as f64;
    let mut pooled: Vec<(f64, f64)> = per.iter().flat_map(|p| p.atoms.iter().copied()).collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let locs: Vec<f64> = pooled.iter().map(|a| a.0).collect();
    let atoms = clusters(&locs, tolerance)
        .into_iter()
        .map(|c| Atom {
            lambda: locs[c.start + (c.len() - 1) / 2],
            mass: pooled[c].iter().map(|a| a.1).sum::<f64>() / k,
        })
        .collect();
    let mean_long_edges = per.iter().map(|p| p.long_edges as f64).sum::<f64>() / k;
    Ok(AtomReport {
        atoms,
        tolerance,
        error_bound: diagnostics::error_bound(n, params.dimension(), r_n, mean_long_edges)?,
        n,
        r_n,
        mean_long_edges,
        seeds: seeds.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Distance to the previous scale; absent on the first row.
    pub sup_distance: Option<f64>,
    pub error_bound: f64,
}

/// Sup distances between consecutive scales along the same coupled seeds.
pub fn convergence_scan(
    engine: &Engine,
    params: &ModelParams,
    n_list: &[usize],
    seeds: &[u64],
) -> Result<Vec<ConvergenceRow>> {
    check_seeds(seeds)?;
    if n_list.is_empty() {
        return Err(Error::Empty("n_list"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n_list", "must be strictly ascending"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    let mut prev: Option<StepFunction> = None;
    for &n in n_list {
        let est = ids_counting(engine, params, n, seeds)?;
        let r_n = default_schedule(n.max(1), params.kernel())?.r_n;
        let long: Vec<usize> = seeds
            .par_iter()
            .map(|&s| diagnostics::long_edge_count_box(&engine.window(&params.with_seed(s), n)?, r_n as u64, n))
            .collect::<Result<_>>()?;
        let mean_long = long.iter().map(|&l| l as f64).sum::<f64>() / seeds.len() as f64;
        rows.push(ConvergenceRow {
            n,
            sup_distance: prev.as_ref().map(|p| p.sup_distance(&est.curve)),
            error_bound: diagnostics::error_bound(n, params.dimension(), r_n, mean_long)?,
        });
        prev = Some(est.curve);
    }
    Ok(rows)
}
