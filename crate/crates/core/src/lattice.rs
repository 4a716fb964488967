//! Points of `Z^d`, boxes `Λ_n` and their lexicographic vertex indexing.

/// A lattice point. Coordinates are stored in a `Vec` because the dimension
/// is a runtime parameter.
pub type Site = Vec<i64>;

pub fn norm1(x: &[i64]) -> u64 {
    x.iter().map(|c| c.unsigned_abs()).sum()
}

pub fn diff(x: &[i64], y: &[i64]) -> Site {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add(x: &[i64], y: &[i64]) -> Site {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub fn distance(x: &[i64], y: &[i64]) -> u64 {
    x.iter().zip(y).map(|(a, b)| a.abs_diff(*b)).sum()
}

pub fn sup_norm(x: &[i64]) -> u64 {
    x.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

/// The centred cube `Λ_n = ([-n, n] ∩ Z)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxRegion {
    pub n: usize,
    pub d: usize,
}

impl BoxRegion {
    pub fn new(n: usize, d: usize) -> Self {
        Self { n, d }
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    pub fn volume(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let n = self.n as i64;
        x.iter().all(|&c| (-n..=n).contains(&c))
    }

    /// Lexicographic index of `x`; the first coordinate is most significant.
    pub fn index(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.d || !self.contains(x) {
            return None;
        }
        let side = self.side();
        let mut idx = 0usize;
        for &c in x {
            idx = idx * side + (c + self.n as i64) as usize;
        }
        Some(idx)
    }

    pub fn site(&self, mut idx: usize) -> Site {
        let side = self.side();
        let mut x = vec![0i64; self.d];
        for slot in x.iter_mut().rev() {
            *slot = (idx % side) as i64 - self.n as i64;
            idx /= side;
        }
        x
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.volume()).map(move |i| self.site(i))
    }

    pub fn origin_index(&self) -> usize {
        self.index(&vec![0; self.d]).expect("origin lies in every box")
    }
}

/// Number of points of `Z^d` at ℓ¹ distance exactly `r` from the origin.
pub fn shell_count(d: usize, r: u64) -> f64 {
    if r == 0 {
        return 1.0;
    }
    // Σ_k 2^k C(d,k) C(r-1,k-1): choose k nonzero coordinates, their signs,
    // and a composition of r into k positive parts.
    let kmax = d.min(r as usize);
    (1..=kmax)
        .map(|k| 2f64.powi(k as i32) * binomial(d as u64, k as u64) * binomial(r - 1, k as u64 - 1))
        .sum()
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Offsets `z ≠ 0` with `‖z‖₁ ≤ radius`, in lexicographic order.
pub fn ball_offsets(d: usize, radius: usize) -> Vec<Site> {
    let r = radius as i64;
    let mut out = Vec::new();
    let mut cur = vec![0i64; d];
    fn rec(i: usize, left: i64, r: i64, cur: &mut Site, out: &mut Vec<Site>) {
        if i == cur.len() {
            if cur.iter().any(|&c| c != 0) {
                out.push(cur.clone());
            }
            return;
        }
        for c in -left.min(r)..=left.min(r) {
            cur[i] = c;
            rec(i + 1, left - c.abs(), r, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, r, r, &mut cur, &mut out);
    out
}

/// True if `z` is lexicographically positive (first nonzero coordinate > 0).
pub fn lex_positive(z: &[i64]) -> bool {
    z.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}
