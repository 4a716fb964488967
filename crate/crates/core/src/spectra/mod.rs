//! Eigenvalues, eigenvector overlaps and counting functions.

mod eigen;
mod step;

pub use eigen::{
    cluster_tolerance, clusters, eigen, eigen_window_weights, eigenpairs, Spectrum, DENSE_THRESHOLD,
};
pub use step::StepFunction;

use crate::error::{Error, Result};

/// Step function with one breakpoint per cluster, at the cluster median,
/// carrying the summed `weights` of its members.
pub fn weighted_counting(spec: &Spectrum, weights: &[f64]) -> Result<StepFunction> {
    if weights.len() != spec.size() {
        return Err(Error::VectorLength {
            expected: spec.size(),
            actual: weights.len(),
        });
    }
    let mut bps = Vec::new();
    let mut vals = Vec::new();
    let mut acc = 0.0;
    for g in spec.clusters() {
        let mid = g.start + (g.len() - 1) / 2;
        acc += weights[g].iter().sum::<f64>();
        bps.push(spec.eigenvalues[mid]);
        vals.push(acc);
    }
    StepFunction::new(bps, vals)
}

/// `F(λ) = #{k : λ_k ≤ λ}` with clustered eigenvalues merged.
pub fn counting_function(spec: &Spectrum) -> StepFunction {
    let mut bps = Vec::new();
    let mut vals = Vec::new();
    for g in spec.clusters() {
        let mid = g.start + (g.len() - 1) / 2;
        bps.push(spec.eigenvalues[mid]);
        vals.push(g.end as f64);
    }
    StepFunction::new(bps, vals).expect("sorted finite eigenvalues")
}

/// Divides every value by `volume`.
pub fn normalize(f: &StepFunction, volume: usize) -> Result<StepFunction> {
    if volume == 0 {
        return Err(Error::invalid("volume", "must be at least 1"));
    }
    let v = volume as f64;
    StepFunction::new(f.breakpoints().to_vec(), f.cumulative().iter().map(|c| c / v).collect())
}
