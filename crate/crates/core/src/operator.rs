//! The finite-volume Hamiltonian `H_n(ω) = p_{Λ_n} H(ω) i_{Λ_n}`.
//!
//! Entries: `H_{x,y} = a_{xy} b_{xy}` for `x ≠ y` and
//! `H_{x,x} = α a_x b_x − β Σ_{z≠x} a_{xz} b_{xz}`,
//! where the sum runs over interior edges under
//! [`DiagonalConvention::Restricted`] and over every edge at `x` under
//! [`DiagonalConvention::Full`].
//!
//! With `α = 0, β = 1, a ≡ 1` this is `Σ_y (φ(y) − φ(x))`, the negative of
//! the graph Laplacian `Σ_y (φ(x) − φ(y))`, so spectra lie in `(−∞, 0]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{DiagonalConvention, ModelParams};
use crate::lattice::BoxRegion;
use crate::sampler::{EdgeKey, WindowGraph};

/// Sparse symmetric matrix indexed lexicographically by `Λ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    pub size: usize,
    pub n: usize,
    pub d: usize,
    pub diag: Vec<f64>,
    /// Strict upper triangle `(i, j, value)` with `i < j`, sorted.
    pub upper: Vec<(usize, usize, f64)>,
}

impl SymmetricMatrix {
    /// Matrix of size `size` from a diagonal and strict upper entries.
    pub fn from_parts(n: usize, d: usize, diag: Vec<f64>, mut upper: Vec<(usize, usize, f64)>) -> Self {
        let size = diag.len();
        for e in upper.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0, e.2);
            }
        }
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Self { size, n, d, diag, upper }
    }

    pub fn region(&self) -> BoxRegion {
        BoxRegion::new(self.n, self.d)
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// `max_i Σ_j |M_ij|`, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let mut rows: Vec<f64> = self.diag.iter().map(|v| v.abs()).collect();
        for &(i, j, v) in &self.upper {
            rows[i] += v.abs();
            rows[j] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, phi: &[f64]) -> Result<Vec<f64>> {
        if phi.len() != self.size {
            return Err(Error::VectorLength {
                expected: self.size,
                actual: phi.len(),
            });
        }
        let mut out: Vec<f64> = self.diag.iter().zip(phi).map(|(a, b)| a * b).collect();
        for &(i, j, v) in &self.upper {
            out[i] += v * phi[j];
            out[j] += v * phi[i];
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for &(i, j, v) in &self.upper {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// Vertex sets of the connected components of the off-diagonal pattern,
    /// each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.size).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j, _) in &self.upper {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut slot = vec![usize::MAX; self.size];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.size {
            let r = find(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(v);
        }
        out
    }
}

fn check_digest(graph: &WindowGraph, params: &ModelParams) -> Result<()> {
    let digest = params.digest();
    if graph.params_digest != digest || graph.d != params.dimension() {
        return Err(Error::DigestMismatch {
            graph: graph.params_digest.clone(),
            params: digest,
        });
    }
    Ok(())
}

/// Builds `H_n` from a sampled window.
pub fn assemble(graph: &WindowGraph, params: &ModelParams) -> Result<SymmetricMatrix> {
    check_digest(graph, params)?;
    let region = graph.region();
    let size = region.volume();
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut diag = vec![0.0; size];
    let mut upper = Vec::new();
    for (e, a) in &graph.interior_edges {
        match e {
            EdgeKey::Loop(x) => {
                let i = region.index(x).ok_or(Error::OutsideWindow { n: graph.n })?;
                diag[i] += alpha * a;
            }
            EdgeKey::Pair(x, y) => {
                let i = region.index(x).ok_or(Error::OutsideWindow { n: graph.n })?;
                let j = region.index(y).ok_or(Error::OutsideWindow { n: graph.n })?;
                diag[i] -= beta * a;
                diag[j] -= beta * a;
                upper.push((i.min(j), i.max(j), *a));
            }
        }
    }
    if params.diagonal() == DiagonalConvention::Full {
        for (e, a) in &graph.cross_edges {
            if let EdgeKey::Pair(x, y) = e {
                let inside = region.index(x).or_else(|| region.index(y));
                if let Some(i) = inside {
                    diag[i] -= beta * a;
                }
            }
        }
    }
    Ok(SymmetricMatrix::from_parts(graph.n, graph.d, diag, upper))
}

/// Matrix-free action `(Hφ)(x) = Σ_y (φ(y) − βφ(x)) a_{xy} + α φ(x) a_x b_x`.
pub fn apply(graph: &WindowGraph, params: &ModelParams, phi: &[f64]) -> Result<Vec<f64>> {
    check_digest(graph, params)?;
    let region = graph.region();
    let size = region.volume();
    if phi.len() != size {
        return Err(Error::VectorLength {
            expected: size,
            actual: phi.len(),
        });
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut out = vec![0.0; size];
    for (e, a) in &graph.interior_edges {
        match e {
            EdgeKey::Loop(x) => {
                let i = region.index(x).ok_or(Error::OutsideWindow { n: graph.n })?;
                out[i] += alpha * phi[i] * a;
            }
            EdgeKey::Pair(x, y) => {
                let i = region.index(x).ok_or(Error::OutsideWindow { n: graph.n })?;
                let j = region.index(y).ok_or(Error::OutsideWindow { n: graph.n })?;
                out[i] += (phi[j] - beta * phi[i]) * a;
                out[j] += (phi[i] - beta * phi[j]) * a;
            }
        }
    }
    if params.diagonal() == DiagonalConvention::Full {
        // φ vanishes outside Λ_n after i_{Λ_n}
        for (e, a) in &graph.cross_edges {
            if let EdgeKey::Pair(x, y) = e {
                if let Some(i) = region.index(x).or_else(|| region.index(y)) {
                    out[i] -= beta * phi[i] * a;
                }
            }
        }
    }
    Ok(out)
}
