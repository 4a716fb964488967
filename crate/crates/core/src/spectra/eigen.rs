//! Full spectra of [`SymmetricMatrix`] by dense solves on connected blocks.
//!
//! The matrix is a direct sum over components of its off-diagonal pattern,
//! so each component is diagonalized separately and the eigenvalues merged.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SymmetricMatrix;

/// Largest block handed to the dense solver.
pub const DENSE_THRESHOLD: usize = 6000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    /// `|ψ_k(x₀)|²` in eigenvalue order, averaged over each degenerate cluster.
    pub center_overlaps: Option<Vec<f64>>,
    /// Max absolute row sum of the source matrix.
    pub matrix_norm: f64,
}

impl Spectrum {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Gap below which neighbouring eigenvalues form one atom.
    pub fn cluster_tolerance(&self) -> f64 {
        cluster_tolerance(self.matrix_norm, self.size())
    }

    /// Index ranges of eigenvalue clusters in ascending order.
    pub fn clusters(&self) -> Vec<std::ops::Range<usize>> {
        clusters(&self.eigenvalues, self.cluster_tolerance())
    }
}

pub fn cluster_tolerance(norm: f64, size: usize) -> f64 {
    1e-9f64.max(1e-12 * norm) * size as f64
}

/// Single-linkage clusters of a sorted list: consecutive gaps `≤ tol` chain.
pub fn clusters(sorted: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

struct Block {
    vertices: Vec<usize>,
    values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]` on `vertices`.
    vectors: Option<DMatrix<f64>>,
}

fn solve_block(m: &SymmetricMatrix, vertices: Vec<usize>, local: &[usize], vectors: bool) -> Result<Block> {
    let k = vertices.len();
    if k > DENSE_THRESHOLD {
        return Err(Error::TooLarge {
            size: k,
            threshold: DENSE_THRESHOLD,
        });
    }
    if k == 1 {
        let v = m.diag[vertices[0]];
        return Ok(Block {
            vertices,
            values: vec![v],
            vectors: vectors.then(|| DMatrix::from_element(1, 1, 1.0)),
        });
    }
    let mut dense = DMatrix::zeros(k, k);
    for (a, &v) in vertices.iter().enumerate() {
        dense[(a, a)] = m.diag[v];
    }
    fill_offdiag(m, &vertices, local, &mut dense);
    let (values, vecs) = if vectors {
        let e = SymmetricEigen::new(dense);
        (e.eigenvalues.as_slice().to_vec(), Some(e.eigenvectors))
    } else {
        (dense.symmetric_eigenvalues().as_slice().to_vec(), None)
    };
    Ok(Block {
        vertices,
        values,
        vectors: vecs,
    })
}

fn fill_offdiag(m: &SymmetricMatrix, vertices: &[usize], local: &[usize], dense: &mut DMatrix<f64>) {
    // `upper` is sorted by row, so the block's entries are the rows it owns
    for &v in vertices {
        let lo = m.upper.partition_point(|e| e.0 < v);
        for &(i, j, w) in m.upper[lo..].iter().take_while(|e| e.0 == v) {
            let (a, b) = (local[i], local[j]);
            dense[(a, b)] = w;
            dense[(b, a)] = w;
        }
    }
}

/// Global ascending order of `(block, local index)` pairs; ties broken by position.
fn merge_order(blocks: &[Block]) -> Vec<(usize, usize)> {
    let mut idx: Vec<(usize, usize)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, blk)| (0..blk.values.len()).map(move |k| (b, k)))
        .collect();
    idx.sort_by(|&(b1, k1), &(b2, k2)| {
        blocks[b1].values[k1]
            .total_cmp(&blocks[b2].values[k2])
            .then((b1, k1).cmp(&(b2, k2)))
    });
    idx
}

fn decompose(m: &SymmetricMatrix, wants_vectors: impl Fn(&[usize]) -> bool) -> Result<Vec<Block>> {
    if m.size == 0 {
        return Err(Error::Empty("matrix of size 0"));
    }
    let comps = m.components();
    let mut local = vec![0usize; m.size];
    for c in &comps {
        for (a, &v) in c.iter().enumerate() {
            local[v] = a;
        }
    }
    comps
        .into_iter()
        .map(|c| {
            let vec = wants_vectors(&c);
            solve_block(m, c, &local, vec)
        })
        .collect()
}

/// All eigenvalues of `m`; with `center`, also the overlaps `|ψ_k(center)|²`.
pub fn eigen(m: &SymmetricMatrix, center: Option<usize>) -> Result<Spectrum> {
    if let Some(c) = center {
        if c >= m.size {
            return Err(Error::VectorLength {
                expected: m.size,
                actual: c,
            });
        }
    }
    let blocks = decompose(m, |c| center.is_some_and(|x| c.binary_search(&x).is_ok()))?;
    let order = merge_order(&blocks);
    let eigenvalues: Vec<f64> = order.iter().map(|&(b, k)| blocks[b].values[k]).collect();
    let matrix_norm = m.norm_bound();
    let center_overlaps = center.map(|x| {
        let raw: Vec<f64> = order
            .iter()
            .map(|&(b, k)| {
                let blk = &blocks[b];
                match (&blk.vectors, blk.vertices.binary_search(&x)) {
                    (Some(vecs), Ok(a)) => vecs[(a, k)].powi(2),
                    _ => 0.0,
                }
            })
            .collect();
        average_within(&raw, &clusters(&eigenvalues, cluster_tolerance(matrix_norm, m.size)))
    });
    Ok(Spectrum {
        eigenvalues,
        center_overlaps,
        matrix_norm,
    })
}

fn average_within(raw: &[f64], groups: &[std::ops::Range<usize>]) -> Vec<f64> {
    let mut out = raw.to_vec();
    for g in groups {
        if g.len() > 1 {
            let mean = raw[g.clone()].iter().sum::<f64>() / g.len() as f64;
            out[g.clone()].fill(mean);
        }
    }
    out
}

/// Spectrum together with `w_k = Σ_{x∈mask} |ψ_k(x)|² / Σ_x |ψ_k(x)|²`.
pub fn eigen_window_weights(m: &SymmetricMatrix, mask: &[bool]) -> Result<(Spectrum, Vec<f64>)> {
    if mask.len() != m.size {
        return Err(Error::VectorLength {
            expected: m.size,
            actual: mask.len(),
        });
    }
    let split = |c: &[usize]| {
        let inside = c.iter().filter(|&&v| mask[v]).count();
        inside != 0 && inside != c.len()
    };
    let blocks = decompose(m, split)?;
    let order = merge_order(&blocks);
    let eigenvalues: Vec<f64> = order.iter().map(|&(b, k)| blocks[b].values[k]).collect();
    let weights = order
        .iter()
        .map(|&(b, k)| {
            let blk = &blocks[b];
            match &blk.vectors {
                Some(vecs) => {
                    let col = vecs.column(k);
                    let (mut inner, mut total) = (0.0, 0.0);
                    for (a, &v) in blk.vertices.iter().enumerate() {
                        let s = col[a] * col[a];
                        total += s;
                        if mask[v] {
                            inner += s;
                        }
                    }
                    inner / total
                }
                // blocks entirely inside or outside the mask
                None if mask[blk.vertices[0]] => 1.0,
                None => 0.0,
            }
        })
        .collect();
    Ok((
        Spectrum {
            eigenvalues,
            center_overlaps: None,
            matrix_norm: m.norm_bound(),
        },
        weights,
    ))
}

/// Eigenpairs for residual checks: `(λ_k, ψ_k)` over the full index set.
pub fn eigenpairs(m: &SymmetricMatrix) -> Result<Vec<(f64, Vec<f64>)>> {
    let blocks = decompose(m, |_| true)?;
    let order = merge_order(&blocks);
    Ok(order
        .into_iter()
        .map(|(b, k)| {
            let blk = &blocks[b];
            let mut psi = vec![0.0; m.size];
            let vecs = blk.vectors.as_ref().expect("vectors requested");
            for (a, &v) in blk.vertices.iter().enumerate() {
                psi[v] = vecs[(a, k)];
            }
            (blk.values[k], psi)
        })
        .collect())
}
