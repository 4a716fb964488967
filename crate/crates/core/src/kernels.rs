//! Connection-probability kernels `p`, edge-weight laws and model parameters.
//!
//! Every kernel family is radial in the ℓ¹ norm and has `p(0) = 0`; loops
//! are governed separately by [`ModelParams::loop_probability`].

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{norm1, shell_count};

/// Relative accuracy of every tail sum returned by [`Kernel::tail`].
pub const TAIL_RTOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelFamily {
    Zero,
    /// `p(x) = q` for `‖x‖₁ = 1`.
    NearestNeighbor { q: f64 },
    /// `p(x) = q^‖x‖₁`.
    Geometric { q: f64 },
    /// `p(x) = min(1, c ‖x‖₁^-s)`, summable iff `s > d`.
    Polynomial { c: f64, s: f64 },
    /// `p(x) = 1 - exp(-beta J(x))` with `J(x) = amplitude ‖x‖₁^-exponent`.
    JBeta {
        amplitude: f64,
        exponent: f64,
        beta: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Kernel {
    family: KernelFamily,
    dimension: usize,
}

impl Kernel {
    pub fn new(family: KernelFamily, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("dimension", "must be a positive integer"));
        }
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} is outside the valid range [0, 1]")))
            }
        };
        match family {
            KernelFamily::Zero => {}
            KernelFamily::NearestNeighbor { q } => unit("kernel.q", q)?,
            KernelFamily::Geometric { q } => {
                unit("kernel.q", q)?;
                if q >= 1.0 {
                    return Err(Error::NonSummable("geometric kernel needs q < 1".into()));
                }
            }
            KernelFamily::Polynomial { c, s } => {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::invalid("kernel.c", format!("{c} must be finite and nonnegative")));
                }
                if !(s > dimension as f64) || !s.is_finite() {
                    return Err(Error::NonSummable(format!(
                        "polynomial kernel needs s > d, got s = {s}, d = {dimension}"
                    )));
                }
            }
            KernelFamily::JBeta {
                amplitude,
                exponent,
                beta,
            } => {
                if !(amplitude >= 0.0 && amplitude.is_finite()) {
                    return Err(Error::invalid("kernel.amplitude", "must be finite and nonnegative"));
                }
                if !(beta >= 0.0 && beta.is_finite()) {
                    return Err(Error::invalid("kernel.beta", "must be finite and nonnegative"));
                }
                if !(exponent > dimension as f64) || !exponent.is_finite() {
                    return Err(Error::NonSummable(format!(
                        "J must be summable: exponent {exponent} must exceed d = {dimension}"
                    )));
                }
            }
        }
        Ok(Self { family, dimension })
    }

    pub fn zero(dimension: usize) -> Self {
        Self::new(KernelFamily::Zero, dimension).expect("zero kernel is always valid")
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_zero(&self) -> bool {
        match self.family {
            KernelFamily::Zero => true,
            KernelFamily::NearestNeighbor { q } | KernelFamily::Geometric { q } => q == 0.0,
            KernelFamily::Polynomial { c, .. } => c == 0.0,
            KernelFamily::JBeta { amplitude, beta, .. } => amplitude * beta == 0.0,
        }
    }

    /// `p` as a function of `r = ‖x‖₁`.
    pub fn radial(&self, r: u64) -> f64 {
        if r == 0 {
            return 0.0;
        }
        match self.family {
            KernelFamily::Zero => 0.0,
            KernelFamily::NearestNeighbor { q } => {
                if r == 1 {
                    q
                } else {
                    0.0
                }
            }
            KernelFamily::Geometric { q } => q.powi(r as i32),
            KernelFamily::Polynomial { c, s } => (c * (r as f64).powf(-s)).min(1.0),
            KernelFamily::JBeta {
                amplitude,
                exponent,
                beta,
            } => -(-beta * amplitude * (r as f64).powf(-exponent)).exp_m1(),
        }
    }

    pub fn value(&self, x: &[i64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: x.len(),
            });
        }
        Ok(self.radial(norm1(x)))
    }

    /// `ε_R = Σ_{‖x‖₁ ≥ R} p(x)`.
    pub fn tail(&self, radius: u64) -> f64 {
        let d = self.dimension;
        let start = radius.max(1);
        match self.family {
            KernelFamily::Zero => 0.0,
            KernelFamily::NearestNeighbor { q } => {
                if radius <= 1 {
                    2.0 * d as f64 * q
                } else {
                    0.0
                }
            }
            KernelFamily::Geometric { q } => {
                if q == 0.0 {
                    0.0
                } else if d == 1 {
                    2.0 * q.powi(start as i32) / (1.0 - q)
                } else {
                    geometric_tail(d, q, start)
                }
            }
            KernelFamily::Polynomial { c, s } => polynomial_tail(d, c, s, start),
            KernelFamily::JBeta {
                amplitude,
                exponent,
                beta,
            } => jbeta_tail(d, beta * amplitude, exponent, start),
        }
    }

    /// `‖p‖₁`, which is also the expected vertex degree.
    pub fn l1(&self) -> f64 {
        self.tail(0)
    }

    /// Smallest `R` with `tail(R) < tol`; fails if it exceeds `cap`.
    pub fn truncation_radius(&self, tol: f64, cap: usize) -> Result<usize> {
        if !(tol > 0.0 && tol <= 1.0) {
            return Err(Error::invalid("trunc_tol", format!("{tol} must lie in (0, 1]")));
        }
        if self.tail(0) < tol {
            return Ok(0);
        }
        let mut hi = 1usize;
        while self.tail(hi as u64) >= tol {
            if hi >= cap {
                return Err(Error::RangeCap {
                    cap,
                    tail: self.tail(cap as u64),
                    tol,
                });
            }
            hi = (hi * 2).min(cap);
        }
        let mut lo = hi / 2; // tail(lo) >= tol, or lo == 0
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.tail(mid as u64) < tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

fn geometric_tail(d: usize, q: f64, start: u64) -> f64 {
    let mut sum = 0.0;
    let mut r = start;
    loop {
        let term = shell_count(d, r) * q.powi(r as i32);
        sum += term;
        if term == 0.0 {
            return sum;
        }
        // term ratio is bounded by q r/(r-d+1), decreasing in r
        if r as usize >= d {
            let rho = q * r as f64 / (r as f64 - d as f64 + 1.0);
            if rho < 1.0 && term * rho / (1.0 - rho) <= 1e-3 * TAIL_RTOL * sum {
                return sum;
            }
        }
        r += 1;
    }
}

/// Coefficients of `N_d(r)` (points on the ℓ¹ sphere of radius `r ≥ 1`) in the
/// monomial basis, lowest degree first.
fn shell_polynomial(d: usize) -> Vec<f64> {
    let mut total = vec![0.0; d];
    for k in 1..=d {
        // C(r-1, k-1) = Π_{j=1}^{k-1} (r - j) / (k-1)!
        let mut poly = vec![1.0];
        for j in 1..k {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * j as f64;
            }
            poly = next;
        }
        let fact: f64 = (1..k).map(|i| i as f64).product();
        let scale = 2f64.powi(k as i32) * crate::lattice::binomial(d as u64, k as u64) / fact;
        for (i, c) in poly.iter().enumerate() {
            total[i] += scale * c;
        }
    }
    total
}

/// `Σ_{r ≥ a} N_d(r) r^{-s}` for `s > d`.
fn shell_zeta(d: usize, s: f64, a: u64) -> f64 {
    shell_polynomial(d)
        .iter()
        .enumerate()
        .map(|(j, &c)| if c == 0.0 { 0.0 } else { c * hurwitz_zeta(s - j as f64, a as f64) })
        .sum()
}

fn polynomial_tail(d: usize, c: f64, s: f64, start: u64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    // radii where the kernel is clipped at 1
    let mut clip = c.powf(1.0 / s).floor() as u64;
    while c * ((clip + 1) as f64).powf(-s) >= 1.0 {
        clip += 1;
    }
    while clip > 0 && c * (clip as f64).powf(-s) < 1.0 {
        clip -= 1;
    }
    let direct: f64 = (start..=clip).map(|r| shell_count(d, r)).sum();
    direct + c * shell_zeta(d, s, start.max(clip + 1))
}

fn jbeta_tail(d: usize, u: f64, s: f64, start: u64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    const SERIES_MAX_ARG: f64 = 0.05;
    let mut r1 = start;
    let mut direct = 0.0;
    while u * (r1 as f64).powf(-s) > SERIES_MAX_ARG {
        direct += shell_count(d, r1) * -(-u * (r1 as f64).powf(-s)).exp_m1();
        r1 += 1;
    }
    // 1 - e^{-x} = Σ_k (-1)^{k+1} x^k / k!, each power summed in closed form
    let x1 = u * (r1 as f64).powf(-s);
    let mut series = 0.0;
    let mut coeff = 1.0;
    for k in 1..=40 {
        coeff *= u / k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        series += sign * coeff * shell_zeta(d, k as f64 * s, r1);
        if x1.powi(k as i32) / factorial(k) < 1e-18 {
            break;
        }
    }
    direct + series
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k ≥ 0} (a + k)^{-s}` for `s > 1`, `a > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const B2J: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1, a > 0");
    let shift = (20.0 - a).max(0.0).ceil() as usize;
    let mut sum: f64 = (0..shift).map(|k| (a + k as f64).powf(-s)).sum();
    let x = a + shift as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B_{2j}/(2j)! s(s+1)...(s+2j-2) x^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in B2J.iter().enumerate() {
        let term = b / fact * rising * xpow;
        sum += term;
        let m = 2 * j as u32 + 2;
        rising *= (s + m as f64 - 1.0) * (s + m as f64);
        fact *= (m + 1) as f64 * (m + 2) as f64;
        xpow /= x * x;
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightFamily {
    Constant { c: f64 },
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
    Rademacher,
}

impl WeightFamily {
    pub fn second_moment(&self) -> f64 {
        match *self {
            WeightFamily::Constant { c } => c * c,
            WeightFamily::Uniform { lo, hi } => (lo * lo + lo * hi + hi * hi) / 3.0,
            WeightFamily::Gaussian { mean, sd } => mean * mean + sd * sd,
            WeightFamily::Rademacher => 1.0,
        }
    }
}

/// Law of the edge weights `a_e`, shared by every edge and loop.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightLaw {
    family: WeightFamily,
    second_moment_bound: f64,
}

impl WeightLaw {
    /// Uses the exact second moment as the bound.
    pub fn new(family: WeightFamily) -> Result<Self> {
        let exact = family.second_moment();
        Self::with_bound(family, exact)
    }

    pub fn with_bound(family: WeightFamily, bound: f64) -> Result<Self> {
        match family {
            WeightFamily::Constant { c } if !c.is_finite() => {
                return Err(Error::invalid("weights.c", "must be finite"));
            }
            WeightFamily::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo <= hi) => {
                return Err(Error::invalid("weights", format!("uniform needs finite lo <= hi, got [{lo}, {hi}]")));
            }
            WeightFamily::Gaussian { mean, sd } if !(mean.is_finite() && sd.is_finite() && sd >= 0.0) => {
                return Err(Error::invalid("weights.sd", "gaussian needs finite mean and sd >= 0"));
            }
            _ => {}
        }
        let exact = family.second_moment();
        if !(bound.is_finite() && bound >= exact * (1.0 - 1e-12)) {
            return Err(Error::invalid(
                "weights.second_moment_bound",
                format!("{bound} is below E[a^2] = {exact}"),
            ));
        }
        Ok(Self {
            family,
            second_moment_bound: bound,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(WeightFamily::Constant { c }).expect("finite constant")
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// `v²` with `E[a²] ≤ v²`.
    pub fn second_moment_bound(&self) -> f64 {
        self.second_moment_bound
    }

    /// Maps two independent uniforms on `[0, 1)` to a draw from the law.
    pub fn sample(&self, u1: f64, u2: f64) -> f64 {
        match self.family {
            WeightFamily::Constant { c } => c,
            WeightFamily::Uniform { lo, hi } => lo + (hi - lo) * u1,
            WeightFamily::Gaussian { mean, sd } => {
                // Box–Muller; 1 - u1 lies in (0, 1]
                let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
                mean + sd * radius * (std::f64::consts::TAU * u2).cos()
            }
            WeightFamily::Rademacher => {
                if u1 < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// How the diagonal of the finite-volume operator treats edges leaving the box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagonalConvention {
    /// `β`-sum over edges with both endpoints in the box.
    #[default]
    Restricted,
    /// `β`-sum over every edge at the vertex, including cross-boundary ones.
    Full,
}

/// The law of one realization ω together with the seed selecting it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    kernel: Kernel,
    weights: WeightLaw,
    seed: u64,
    loop_probability: f64,
    diagonal: DiagonalConvention,
    /// Translation γ composed into every edge lookup.
    offset: Vec<i64>,
}

impl ModelParams {
    pub fn new(kernel: Kernel, weights: WeightLaw, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} is outside the valid range [0, 1]")));
            }
        }
        let d = kernel.dimension();
        Ok(Self {
            alpha,
            beta,
            kernel,
            weights,
            seed,
            loop_probability: 1.0,
            diagonal: DiagonalConvention::Restricted,
            offset: vec![0; d],
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_loop_probability(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("loop_probability", format!("{p} is outside the valid range [0, 1]")));
        }
        self.loop_probability = p;
        Ok(self)
    }

    pub fn with_diagonal(mut self, diagonal: DiagonalConvention) -> Self {
        self.diagonal = diagonal;
        self
    }

    pub(crate) fn with_offset(mut self, offset: Vec<i64>) -> Self {
        self.offset = offset;
        self
    }

    pub fn dimension(&self) -> usize {
        self.kernel.dimension()
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }
    pub fn weights(&self) -> &WeightLaw {
        &self.weights
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn loop_probability(&self) -> f64 {
        self.loop_probability
    }
    pub fn diagonal(&self) -> DiagonalConvention {
        self.diagonal
    }
    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    /// Loops only matter when the potential term is switched on.
    pub fn samples_loops(&self) -> bool {
        self.alpha > 0.0 && self.loop_probability > 0.0
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("params serialize"))
    }

    /// `v²(‖p‖₁² + ‖p‖₁)`, the bound on `E[(Σ_x |a_{0,x}| b_{0,x})²]`.
    pub fn moment_budget(&self) -> f64 {
        let l1 = self.kernel.l1();
        self.weights.second_moment_bound() * (l1 * l1 + l1)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ball_offsets;

    fn brute_tail(k: &Kernel, radius: u64, max_r: usize) -> f64 {
        ball_offsets(k.dimension(), max_r)
            .iter()
            .filter(|z| norm1(z) >= radius)
            .map(|z| k.value(z).unwrap())
            .sum()
    }

    #[test]
    fn geometric_value_and_tail() {
        let k = Kernel::new(KernelFamily::Geometric { q: 0.5 }, 1).unwrap();
        assert_eq!(k.value(&[3]).unwrap(), 0.125);
        assert_eq!(k.value(&[-3]).unwrap(), 0.125);
        assert!((k.tail(3) - 0.5).abs() < 1e-15);
        assert!((k.l1() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nearest_neighbor_l1() {
        let k = Kernel::new(KernelFamily::NearestNeighbor { q: 0.7 }, 2).unwrap();
        assert!((k.l1() - 2.8).abs() < 1e-15);
        assert_eq!(k.tail(2), 0.0);
        assert_eq!(k.truncation_radius(1e-9, 100).unwrap(), 2);
    }

    #[test]
    fn zero_kernel() {
        let k = Kernel::zero(3);
        assert_eq!(k.l1(), 0.0);
        assert_eq!(k.tail(5), 0.0);
        assert_eq!(k.truncation_radius(1e-9, 10).unwrap(), 0);
    }

    #[test]
    fn jbeta_value() {
        let k = Kernel::new(
            KernelFamily::JBeta {
                amplitude: 1.0,
                exponent: 2.0,
                beta: 1.0,
            },
            1,
        )
        .unwrap();
        let expected = 1.0 - (-1.0f64).exp();
        assert!((k.value(&[1]).unwrap() - expected).abs() < 1e-15);
        assert!((k.value(&[1]).unwrap() - 0.63212).abs() < 1e-5);
    }

    #[test]
    fn dimension_mismatch() {
        let k = Kernel::zero(2);
        assert!(matches!(k.value(&[1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_non_summable() {
        assert!(Kernel::new(KernelFamily::Polynomial { c: 1.0, s: 2.0 }, 2).is_err());
        assert!(Kernel::new(KernelFamily::Polynomial { c: 1.0, s: 2.5 }, 2).is_ok());
        assert!(Kernel::new(KernelFamily::Geometric { q: 1.0 }, 1).is_err());
    }

    #[test]
    fn hurwitz_known_values() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - z2).abs() < 1e-15);
        assert!((hurwitz_zeta(2.0, 3.0) - (z2 - 1.0 - 0.25)).abs() < 1e-15);
        let z4 = std::f64::consts::PI.powi(4) / 90.0;
        assert!((hurwitz_zeta(4.0, 1.0) - z4).abs() < 1e-15);
    }

    #[test]
    fn shell_polynomial_matches_counts() {
        for d in 1..=4 {
            let poly = shell_polynomial(d);
            for r in 1..20u64 {
                let v: f64 = poly.iter().enumerate().map(|(j, c)| c * (r as f64).powi(j as i32)).sum();
                assert!((v - shell_count(d, r)).abs() < 1e-9, "d={d} r={r}");
            }
        }
    }

    fn families() -> Vec<Kernel> {
        let mut out = Vec::new();
        for d in 1..=3 {
            for f in [
                KernelFamily::NearestNeighbor { q: 0.3 },
                KernelFamily::Geometric { q: 0.4 },
                KernelFamily::Polynomial {
                    c: 2.0,
                    s: d as f64 + 1.5,
                },
                KernelFamily::JBeta {
                    amplitude: 1.0,
                    exponent: d as f64 + 1.0,
                    beta: 1.0,
                },
            ] {
                out.push(Kernel::new(f, d).unwrap());
            }
        }
        out
    }

    #[test]
    fn tail_shell_identity() {
        // tail(R) - tail(R+1) is the single shell at radius R
        for k in families() {
            for radius in 1..30u64 {
                let shell = shell_count(k.dimension(), radius) * k.radial(radius);
                let diff = k.tail(radius) - k.tail(radius + 1);
                assert!(
                    (diff - shell).abs() <= 1e-11 * k.tail(radius).max(1e-300),
                    "{k:?} R={radius}: {diff} vs {shell}"
                );
            }
        }
    }

    #[test]
    fn tail_monotone_and_l1() {
        for k in families() {
            assert!((k.tail(0) - k.l1()).abs() <= TAIL_RTOL * k.l1());
            let mut prev = k.tail(0);
            for radius in 1..200 {
                let t = k.tail(radius);
                assert!(t <= prev * (1.0 + 1e-13), "{k:?} not monotone at {radius}");
                prev = t;
            }
        }
    }

    #[test]
    fn tail_matches_brute_force_light_tails() {
        // geometric tails are negligible beyond the enumerated radius
        for d in 1..=2 {
            let k = Kernel::new(KernelFamily::Geometric { q: 0.4 }, d).unwrap();
            for radius in [0, 1, 3, 7] {
                let brute = brute_tail(&k, radius, 60);
                assert!((k.tail(radius) - brute).abs() <= 1e-12 * brute, "d={d} R={radius}");
            }
        }
    }

    #[test]
    fn polynomial_tail_matches_truncated_sum_plus_bound() {
        let k = Kernel::new(KernelFamily::Polynomial { c: 1.5, s: 3.0 }, 1).unwrap();
        let cut = 4000u64;
        let head: f64 = (2..cut).map(|r| 2.0 * k.radial(r)).sum();
        // remainder Σ_{r≥cut} 2 c r^-3 lies between the two integral bounds
        let lo = 1.5 * (cut as f64).powi(-2);
        let hi = 1.5 * ((cut - 1) as f64).powi(-2);
        let t = k.tail(2);
        assert!(t >= head + lo - 1e-15 && t <= head + hi + 1e-15);
        // clipping at 1: c r^-s ≥ 1 for r = 1
        assert_eq!(k.radial(1), 1.0);
    }

    #[test]
    fn moment_budget_values() {
        let k = Kernel::new(KernelFamily::Geometric { q: 0.5 }, 1).unwrap();
        let w = WeightLaw::with_bound(WeightFamily::Rademacher, 1.0).unwrap();
        let p = ModelParams::new(k, w, 0.0, 1.0, 0).unwrap();
        assert!((p.moment_budget() - 6.0).abs() < 1e-14);

        let p = ModelParams::new(Kernel::zero(1), WeightLaw::constant(1.0), 0.0, 1.0, 0).unwrap();
        assert_eq!(p.moment_budget(), 0.0);

        let k = Kernel::new(KernelFamily::NearestNeighbor { q: 0.5 }, 1).unwrap();
        let w = WeightLaw::new(WeightFamily::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
        assert!((w.second_moment_bound() - 1.0 / 3.0).abs() < 1e-16);
        let p = ModelParams::new(k, w, 0.0, 1.0, 0).unwrap();
        assert!((p.moment_budget() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn weight_bound_must_dominate() {
        let fam = WeightFamily::Uniform { lo: 0.0, hi: 1.0 };
        assert!(WeightLaw::with_bound(fam.clone(), 0.25).is_err());
        assert!(WeightLaw::with_bound(fam, 0.5).is_ok());
    }

    #[test]
    fn alpha_range_checked() {
        let err = ModelParams::new(Kernel::zero(1), WeightLaw::constant(1.0), 1.5, 0.0, 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha") && msg.contains("[0, 1]"), "{msg}");
    }

    #[test]
    fn digest_changes_with_seed() {
        let p = ModelParams::new(Kernel::zero(1), WeightLaw::constant(1.0), 0.0, 0.0, 1).unwrap();
        assert_ne!(p.digest(), p.with_seed(2).digest());
        assert_eq!(p.digest(), p.clone().digest());
    }
}
