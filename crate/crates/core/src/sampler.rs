//! Sampling one long-range percolation realization and restricting it to boxes.
//!
//! Edge indicators `b_e` and weights `a_e` are pure functions of the master
//! seed and the canonical edge key, so the window at radius `n` is exactly the
//! restriction of the window at any radius `m ≥ n`.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::ModelParams;
use crate::lattice::{self, BoxRegion, Site};
use crate::rng::{Stream, StreamLabel};

/// An element of `E`: a loop `{x}` or an unordered pair `{x, y}`, `x < y`
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Site>", try_from = "Vec<Site>")]
pub enum EdgeKey {
    Loop(Site),
    Pair(Site, Site),
}

impl EdgeKey {
    pub fn pair(x: Site, y: Site) -> Self {
        match x.cmp(&y) {
            Ordering::Equal => EdgeKey::Loop(x),
            Ordering::Less => EdgeKey::Pair(x, y),
            Ordering::Greater => EdgeKey::Pair(y, x),
        }
    }

    pub fn loop_at(x: Site) -> Self {
        EdgeKey::Loop(x)
    }

    pub fn endpoints(&self) -> (&Site, Option<&Site>) {
        match self {
            EdgeKey::Loop(x) => (x, None),
            EdgeKey::Pair(x, y) => (x, Some(y)),
        }
    }

    pub fn dimension(&self) -> usize {
        self.endpoints().0.len()
    }

    /// ℓ¹ length; loops have length 0.
    pub fn length(&self) -> u64 {
        match self {
            EdgeKey::Loop(_) => 0,
            EdgeKey::Pair(x, y) => lattice::distance(x, y),
        }
    }

    pub fn translate(&self, gamma: &[i64]) -> Self {
        match self {
            EdgeKey::Loop(x) => EdgeKey::Loop(lattice::add(x, gamma)),
            EdgeKey::Pair(x, y) => EdgeKey::Pair(lattice::add(x, gamma), lattice::add(y, gamma)),
        }
    }

    fn words(&self, offset: &[i64]) -> Vec<u64> {
        // translation preserves lexicographic order, so shifting keeps the
        // encoding canonical
        let shifted = |x: &Site| x.iter().zip(offset).map(|(a, g)| (a + g) as u64).collect::<Vec<_>>();
        let d = self.dimension() as u64;
        match self {
            EdgeKey::Loop(x) => [1, d].into_iter().chain(shifted(x)).collect(),
            EdgeKey::Pair(x, y) => [2, d].into_iter().chain(shifted(x)).chain(shifted(y)).collect(),
        }
    }
}

impl From<EdgeKey> for Vec<Site> {
    fn from(e: EdgeKey) -> Self {
        match e {
            EdgeKey::Loop(x) => vec![x],
            EdgeKey::Pair(x, y) => vec![x, y],
        }
    }
}

impl TryFrom<Vec<Site>> for EdgeKey {
    type Error = String;

    fn try_from(mut v: Vec<Site>) -> std::result::Result<Self, String> {
        match v.len() {
            1 => Ok(EdgeKey::Loop(v.pop().unwrap())),
            2 => {
                let y = v.pop().unwrap();
                let x = v.pop().unwrap();
                if x.len() != y.len() {
                    return Err("edge endpoints have different dimensions".into());
                }
                Ok(EdgeKey::pair(x, y))
            }
            n => Err(format!("an edge has one or two endpoints, got {n}")),
        }
    }
}

fn check_dim(params: &ModelParams, e: &EdgeKey) -> Result<()> {
    if e.dimension() != params.dimension() {
        return Err(Error::DimensionMismatch {
            expected: params.dimension(),
            actual: e.dimension(),
        });
    }
    Ok(())
}

fn presence_probability(params: &ModelParams, e: &EdgeKey) -> f64 {
    match e {
        EdgeKey::Loop(_) => params.loop_probability(),
        EdgeKey::Pair(x, y) => params.kernel().radial(lattice::distance(x, y)),
    }
}

fn indicator_with(params: &ModelParams, e: &EdgeKey, p: f64) -> bool {
    if p <= 0.0 {
        return false;
    }
    Stream::new(params.seed(), StreamLabel::Indicator, e.words(params.offset())).uniform(0) < p
}

/// `b_e(ω)`.
pub fn edge_bernoulli(params: &ModelParams, e: &EdgeKey) -> Result<bool> {
    check_dim(params, e)?;
    Ok(indicator_with(params, e, presence_probability(params, e)))
}

/// `a_e(ω)`, drawn from a stream independent of the indicator.
pub fn edge_weight(params: &ModelParams, e: &EdgeKey) -> Result<f64> {
    check_dim(params, e)?;
    Ok(weight_of(params, e))
}

fn weight_of(params: &ModelParams, e: &EdgeKey) -> f64 {
    let s = Stream::new(params.seed(), StreamLabel::Weight, e.words(params.offset()));
    params.weights().sample(s.uniform(0), s.uniform(1))
}

/// Parameters whose sampler answers at `e` equal the original answers at `e + γ`.
pub fn shift_realization(params: &ModelParams, gamma: &[i64]) -> Result<ModelParams> {
    if gamma.len() != params.dimension() {
        return Err(Error::DimensionMismatch {
            expected: params.dimension(),
            actual: gamma.len(),
        });
    }
    let offset = lattice::add(params.offset(), gamma);
    Ok(params.clone().with_offset(offset))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingOptions {
    /// Edges beyond the radius where the kernel tail drops below this are omitted.
    pub trunc_tol: f64,
    /// Hard cap on the truncation radius.
    pub max_range: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            trunc_tol: 1e-9,
            max_range: 4096,
        }
    }
}

pub const WINDOW_SCHEMA: &str = "lrp-ids/window-graph/v1";

/// A realization restricted to `Λ_n`, plus the edges leaving it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowGraph {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub trunc_tol: f64,
    pub truncation_radius: usize,
    pub params_digest: String,
    /// Edges (and loops) with every endpoint in `Λ_n`, sorted by key.
    pub interior_edges: Vec<(EdgeKey, f64)>,
    /// Edges with exactly one endpoint in `Λ_n`, sorted by key.
    pub cross_edges: Vec<(EdgeKey, f64)>,
}

impl WindowGraph {
    pub fn region(&self) -> BoxRegion {
        BoxRegion::new(self.n, self.d)
    }

    pub fn volume(&self) -> usize {
        self.region().volume()
    }

    /// Builds a window from explicit edge lists, sorting and classifying them.
    pub fn from_edges(params: &ModelParams, n: usize, edges: Vec<(EdgeKey, f64)>) -> Result<Self> {
        let region = BoxRegion::new(n, params.dimension());
        let mut interior = Vec::new();
        let mut cross = Vec::new();
        let mut seen = HashSet::new();
        for (e, w) in edges {
            check_dim(params, &e)?;
            if !seen.insert(e.clone()) {
                return Err(Error::invalid("edges", format!("duplicate edge {e:?}")));
            }
            let (x, y) = e.endpoints();
            match (region.contains(x), y.map(|y| region.contains(y))) {
                (true, None) | (true, Some(true)) => interior.push((e, w)),
                (true, Some(false)) | (false, Some(true)) => cross.push((e, w)),
                _ => return Err(Error::OutsideWindow { n }),
            }
        }
        interior.sort_by(|a, b| a.0.cmp_key(&b.0));
        cross.sort_by(|a, b| a.0.cmp_key(&b.0));
        Ok(Self {
            schema: WINDOW_SCHEMA.into(),
            n,
            d: params.dimension(),
            trunc_tol: 0.0,
            truncation_radius: 0,
            params_digest: params.digest(),
            interior_edges: interior,
            cross_edges: cross,
        })
    }

    /// Interior and cross edges incident to a vertex, loops excluded.
    pub fn edges(&self) -> impl Iterator<Item = &(EdgeKey, f64)> {
        self.interior_edges.iter().chain(self.cross_edges.iter())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(s)?;
        if g.schema != WINDOW_SCHEMA {
            return Err(Error::Config(format!("unknown window schema {}", g.schema)));
        }
        Ok(g)
    }
}

impl EdgeKey {
    fn cmp_key(&self, other: &Self) -> Ordering {
        let rank = |e: &EdgeKey| match e {
            EdgeKey::Loop(x) => (x.clone(), None),
            EdgeKey::Pair(x, y) => (x.clone(), Some(y.clone())),
        };
        rank(self).cmp(&rank(other))
    }
}

/// Samples every present edge with at least one endpoint in `Λ_n`.
pub fn sample_window(params: &ModelParams, n: usize, opts: &SamplingOptions) -> Result<WindowGraph> {
    let d = params.dimension();
    let kernel = params.kernel();
    let radius = kernel.truncation_radius(opts.trunc_tol, opts.max_range)?;
    let region = BoxRegion::new(n, d);

    let offsets: Vec<(Site, f64)> = lattice::ball_offsets(d, radius)
        .into_iter()
        .map(|z| {
            let p = kernel.radial(lattice::norm1(&z));
            (z, p)
        })
        .filter(|(_, p)| *p > 0.0)
        .collect();

    let mut interior = Vec::new();
    let mut cross = Vec::new();
    for x in region.sites() {
        if params.samples_loops() {
            let e = EdgeKey::Loop(x.clone());
            if indicator_with(params, &e, params.loop_probability()) {
                let w = weight_of(params, &e);
                interior.push((e, w));
            }
        }
        for (z, p) in &offsets {
            let y = lattice::add(&x, z);
            let inside = region.contains(&y);
            // interior pairs are visited from both ends; keep the lower one
            if inside && !lattice::lex_positive(z) {
                continue;
            }
            let e = EdgeKey::pair(x.clone(), y);
            if indicator_with(params, &e, *p) {
                let w = weight_of(params, &e);
                if inside {
                    interior.push((e, w));
                } else {
                    cross.push((e, w));
                }
            }
        }
    }
    interior.sort_by(|a, b| a.0.cmp_key(&b.0));
    cross.sort_by(|a, b| a.0.cmp_key(&b.0));
    Ok(WindowGraph {
        schema: WINDOW_SCHEMA.into(),
        n,
        d,
        trunc_tol: opts.trunc_tol,
        truncation_radius: radius,
        params_digest: params.digest(),
        interior_edges: interior,
        cross_edges: cross,
    })
}
