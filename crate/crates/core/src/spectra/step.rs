//! Right-continuous nondecreasing step functions with exact atom lists.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `F(λ) = c_i` for `λ_i ≤ λ < λ_{i+1}`, and `F(λ) = 0` for `λ < λ_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, cumulative: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != cumulative.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                cumulative.len()
            )));
        }
        if breakpoints.iter().chain(&cumulative).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction("non-finite entry".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStepFunction("breakpoints must be strictly increasing".into()));
        }
        let mut prev = 0.0;
        for &c in &cumulative {
            if c < prev {
                return Err(Error::InvalidStepFunction("values must be nonnegative and nondecreasing".into()));
            }
            prev = c;
        }
        Ok(Self {
            breakpoints,
            cumulative,
        })
    }

    /// Unit-mass step at `at`.
    pub fn unit_step(at: f64) -> Self {
        Self::new(vec![at], vec![1.0]).expect("finite step")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn final_value(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= lambda);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `F(λ−)`.
    pub fn left_limit(&self, lambda: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < lambda);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `(λ_i, c_i − c_{i−1})` for every breakpoint.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let mut prev = 0.0;
        self.breakpoints
            .iter()
            .zip(&self.cumulative)
            .map(|(&b, &c)| {
                let m = c - prev;
                prev = c;
                (b, m)
            })
            .collect()
    }

    /// Mass `F(λ) − F(λ−)` at one point.
    pub fn mass_at(&self, lambda: f64) -> f64 {
        self.eval(lambda) - self.left_limit(lambda)
    }

    /// Pointwise multiplication by `factor > 0`.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            cumulative: self.cumulative.iter().map(|c| c * factor).collect(),
        }
    }

    /// `sup_λ |F(λ) − G(λ)|`, exact.
    pub fn sup_distance(&self, other: &StepFunction) -> f64 {
        // both functions are constant between merged breakpoints, so the sup
        // is attained at a breakpoint or as a left limit there
        let mut best = 0.0f64;
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.breakpoints, &other.breakpoints);
        let (mut fa, mut fb) = (0.0f64, 0.0f64);
        while i < a.len() || j < b.len() {
            let t = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => x.min(y),
                (Some(&x), None) => x,
                (None, Some(&y)) => y,
                (None, None) => unreachable!(),
            };
            best = best.max((fa - fb).abs());
            if i < a.len() && a[i] == t {
                fa = self.cumulative[i];
                i += 1;
            }
            if j < b.len() && b[j] == t {
                fb = other.cumulative[j];
                j += 1;
            }
            best = best.max((fa - fb).abs());
        }
        best
    }

    /// `sup_λ |F(λ) − G(λ)|` against a continuous nondecreasing `G`;
    /// `G(±∞)` is read from `cdf(±INFINITY)`.
    pub fn sup_distance_continuous(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let mut best = cdf(f64::NEG_INFINITY).abs();
        let mut prev = 0.0;
        for (&t, &c) in self.breakpoints.iter().zip(&self.cumulative) {
            let g = cdf(t);
            best = best.max((prev - g).abs()).max((c - g).abs());
            prev = c;
        }
        best.max((prev - cdf(f64::INFINITY)).abs())
    }

    /// Pointwise mean, exact on the union of breakpoints; summed in input order.
    pub fn average(curves: &[StepFunction]) -> Result<StepFunction> {
        let first = curves.first().ok_or(Error::Empty("average of no curves"))?;
        let target = first.final_value();
        if let Some(bad) = curves.iter().find(|c| (c.final_value() - target).abs() > 1e-12) {
            return Err(Error::InvalidStepFunction(format!(
                "final values differ: {} vs {}",
                bad.final_value(),
                target
            )));
        }
        let mut grid: Vec<f64> = curves.iter().flat_map(|c| c.breakpoints.iter().copied()).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let k = curves.len() as f64;
        let mut ptr = vec![0usize; curves.len()];
        let mut bps = Vec::with_capacity(grid.len());
        let mut vals = Vec::with_capacity(grid.len());
        let mut last = 0.0;
        for t in grid {
            let mut sum = 0.0;
            for (c, p) in curves.iter().zip(ptr.iter_mut()) {
                while *p < c.breakpoints.len() && c.breakpoints[*p] <= t {
                    *p += 1;
                }
                if *p > 0 {
                    sum += c.cumulative[*p - 1];
                }
            }
            let v = sum / k;
            if v > last {
                bps.push(t);
                vals.push(v);
                last = v;
            }
        }
        StepFunction::new(bps, vals)
    }

    /// `lambda,cumulative` rows with 17 significant digits.
    pub fn to_csv(&self, header: &str) -> String {
        let mut s = String::new();
        s.push_str(header);
        s.push_str("lambda,cumulative\n");
        for (b, c) in self.breakpoints.iter().zip(&self.cumulative) {
            let _ = writeln!(s, "{b:.16e},{c:.16e}");
        }
        s
    }

    /// Inverse of [`StepFunction::to_csv`]; `#` comment lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        match lines.next() {
            Some("lambda,cumulative") => {}
            other => return Err(Error::Config(format!("unexpected CSV header {other:?}"))),
        }
        let (mut b, mut c) = (Vec::new(), Vec::new());
        for line in lines {
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("malformed CSV row {line:?}")))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("{s:?}: {e}")));
            b.push(parse(x)?);
            c.push(parse(y)?);
        }
        Self::new(b, c)
    }
}
