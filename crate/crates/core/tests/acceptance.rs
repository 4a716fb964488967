//! Acceptance gate: every criterion is run at its stated tolerance and
//! reported on one line. The process exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use lrp_ids::diagnostics::{
    boundary_size, boundary_size_brute, concentration_scan, default_schedule, error_bound, fit_lifshitz,
    lifshitz_probe, long_edge_count_box,
};
use lrp_ids::ids::{atom_report, center_curve, counting_curve, ids_counting, ids_pastur_shubin, trace_curve, Engine, PsMode};
use lrp_ids::lattice::BoxRegion;
use lrp_ids::operator::{apply, assemble};
use lrp_ids::sampler::{sample_window, SamplingOptions};
use lrp_ids::spectra::{counting_function, Spectrum};
use lrp_ids::{DiagonalConvention, EdgeKey, Kernel, KernelFamily, ModelParams, StepFunction, WeightFamily, WeightLaw};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn model(family: KernelFamily, weights: WeightFamily, alpha: f64, beta: f64) -> ModelParams {
    ModelParams::new(
        Kernel::new(family, 1).unwrap(),
        WeightLaw::new(weights).unwrap(),
        alpha,
        beta,
        0,
    )
    .unwrap()
}

fn seeds(k: u64) -> Vec<u64> {
    (0..k).collect()
}

/// Spectra gathered for the step-function checks.
#[derive(Default)]
struct Collected {
    spectra: Vec<Spectrum>,
}

impl Collected {
    fn spectra_of(&mut self, engine: &Engine, p: &ModelParams, n: usize, seeds: &[u64]) {
        for &s in seeds {
            self.spectra.push(engine.spectrum(&p.with_seed(s), n, false).unwrap());
        }
    }
}

fn c1(col: &mut Collected) -> Outcome {
    let t = Instant::now();
    let p = model(KernelFamily::Zero, WeightFamily::Uniform { lo: 0.0, hi: 1.0 }, 1.0, 1.0);
    let e = Engine::default();
    let est = ids_counting(&e, &p, 500, &seeds(20)).unwrap();
    let dist = est.curve.sup_distance_continuous(|l| l.clamp(0.0, 1.0));
    let elapsed = t.elapsed();
    col.spectra_of(&e, &p, 500, &seeds(20));
    outcome(
        dist <= 0.02 && elapsed < Duration::from_secs(60),
        format!("sup distance {dist:.5} (≤ 0.02), {:.2}s (< 60s)", elapsed.as_secs_f64()),
    )
}

fn arcsine(l: f64) -> f64 {
    if l <= -2.0 {
        0.0
    } else if l >= 2.0 {
        1.0
    } else {
        1.0 - (l / 2.0).acos() / PI
    }
}

fn c2(col: &mut Collected) -> Outcome {
    let t = Instant::now();
    let p = model(KernelFamily::NearestNeighbor { q: 1.0 }, WeightFamily::Constant { c: 1.0 }, 0.0, 0.0);
    let e = Engine::default();
    let s = e.spectrum(&p, 1000, false).unwrap();
    let est = ids_counting(&e, &p, 1000, &[0]).unwrap();
    let dist = est.curve.sup_distance_continuous(arcsine);
    let m = s.size();
    let worst = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, v)| (v - 2.0 * ((m - i) as f64 * PI / (m + 1) as f64).cos()).abs())
        .fold(0.0, f64::max);
    let elapsed = t.elapsed();
    col.spectra.push(s);
    outcome(
        dist <= 0.02 && worst <= 1e-8 && elapsed < Duration::from_secs(120),
        format!(
            "sup distance {dist:.5} (≤ 0.02), max eigenvalue error {worst:.2e} (≤ 1e-8), {:.2}s (< 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn c3(col: &mut Collected) -> Outcome {
    let p = model(KernelFamily::NearestNeighbor { q: 0.5 }, WeightFamily::Constant { c: 1.0 }, 0.0, 1.0);
    let e = Engine::default();
    let big = atom_report(&e, &p, 1000, &seeds(20)).unwrap();
    let small = atom_report(&e, &p, 500, &seeds(20)).unwrap();
    let tol = lrp_ids::diagnostics::ZERO_ATOM_TOL;
    let (m1, m0) = (big.mass_near(0.0, tol), small.mass_near(0.0, tol));
    col.spectra_of(&e, &p, 1000, &seeds(20));
    outcome(
        (m1 - 0.5).abs() <= 0.02 && (m1 - m0).abs() <= 0.02,
        format!(
            "mass at 0: {m1:.5} at n=1000 (|· − 0.5| ≤ 0.02), {m0:.5} at n=500, difference {:.5} (≤ 0.02)",
            (m1 - m0).abs()
        ),
    )
}

fn c4(col: &mut Collected) -> Outcome {
    let p = model(KernelFamily::Geometric { q: 0.4 }, WeightFamily::Uniform { lo: 0.0, hi: 1.0 }, 1.0, 1.0);
    let e = Engine::default();
    let s = seeds(50);
    let counting = ids_counting(&e, &p, 400, &s).unwrap();
    let center = ids_pastur_shubin(&e, &p, 400, &s, PsMode::Center).unwrap();
    let dist = counting.curve.sup_distance(&center.curve);
    // standard error of the 50-seed center average where the gap is largest
    let at = worst_point(&counting.curve, &center.curve);
    let per_seed: Vec<f64> = s.iter().map(|&seed| center_curve(&e, &p, 400, seed).unwrap().eval(at)).collect();
    let mean = per_seed.iter().sum::<f64>() / per_seed.len() as f64;
    let var = per_seed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (per_seed.len() - 1) as f64;
    let se = (var / per_seed.len() as f64).sqrt();
    let exact = s
        .iter()
        .all(|&seed| counting_curve(&e, &p, 400, seed).unwrap() == trace_curve(&e, &p, 400, 400, seed).unwrap());
    let zero_buffer = ids_pastur_shubin(&e, &p, 400, &s, PsMode::Trace { buffer: Some(0) }).unwrap();
    let averaged_exact = zero_buffer.curve == counting.curve;
    col.spectra_of(&e, &p, 400, &s);
    outcome(
        dist <= 0.03 && exact && averaged_exact,
        format!(
            "sup distance counting vs center {dist:.5} (≤ 0.03; center-average standard error {se:.4} at λ={at:.4}); zero-buffer trace identical per seed: {exact}, averaged: {averaged_exact}"
        ),
    )
}

/// Breakpoint of either curve where `|F − G|` is largest.
fn worst_point(f: &StepFunction, g: &StepFunction) -> f64 {
    f.breakpoints()
        .iter()
        .chain(g.breakpoints())
        .copied()
        .max_by(|a, b| (f.eval(*a) - g.eval(*a)).abs().total_cmp(&(f.eval(*b) - g.eval(*b)).abs()))
        .unwrap()
}

fn c5() -> Outcome {
    let t = Instant::now();
    let p = model(KernelFamily::Geometric { q: 0.5 }, WeightFamily::Constant { c: 1.0 }, 0.0, 1.0);
    let reps = concentration_scan(&p, 8, 200, &[0.05, 0.1, 0.2], &seeds(2000), &SamplingOptions::default()).unwrap();
    let elapsed = t.elapsed();
    let lines: Vec<String> = reps
        .iter()
        .map(|r| format!("δ={}: {:.4} vs {:.4}+{:.4}", r.delta, r.empirical, r.bound, r.slack))
        .collect();
    outcome(
        reps.iter().all(|r| r.passed) && elapsed < Duration::from_secs(60),
        format!("{}; {:.2}s (< 60s)", lines.join(", "), elapsed.as_secs_f64()),
    )
}

fn random_params(rng: &mut StdRng, i: u64) -> ModelParams {
    let d = 1 + (i % 2) as usize;
    let family = match (d, rng.random_range(0..4)) {
        (1, 0) => KernelFamily::Polynomial {
            c: rng.random_range(0.2..1.0),
            s: rng.random_range(4.0..6.0),
        },
        (1, 1) => KernelFamily::JBeta {
            amplitude: 1.0,
            exponent: rng.random_range(4.0..6.0),
            beta: rng.random_range(0.2..1.0),
        },
        (_, 2) => KernelFamily::NearestNeighbor {
            q: rng.random_range(0.0..1.0),
        },
        _ => KernelFamily::Geometric {
            q: rng.random_range(0.05..0.35),
        },
    };
    let weights = match rng.random_range(0..4) {
        0 => WeightFamily::Constant { c: rng.random_range(-2.0..2.0) },
        1 => WeightFamily::Uniform { lo: -1.0, hi: 1.5 },
        2 => WeightFamily::Gaussian { mean: 0.3, sd: 1.2 },
        _ => WeightFamily::Rademacher,
    };
    let conv = if rng.random_bool(0.5) {
        DiagonalConvention::Restricted
    } else {
        DiagonalConvention::Full
    };
    ModelParams::new(
        Kernel::new(family, d).unwrap(),
        WeightLaw::new(weights).unwrap(),
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=1.0),
        rng.random(),
    )
    .unwrap()
    .with_diagonal(conv)
}

fn c6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let (mut checks, mut ok) = (0, 0);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let p = random_params(&mut rng, i);
        let n = if p.dimension() == 1 { 50 } else { 12 };
        let g = sample_window(&p, n, &SamplingOptions::default()).unwrap();
        let m = assemble(&g, &p).unwrap();
        for _ in 0..100 {
            let phi: Vec<f64> = (0..m.size).map(|_| rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-3..4))).collect();
            let a = apply(&g, &p, &phi).unwrap();
            let b = m.mul_vec(&phi).unwrap();
            let scale = phi.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
            checks += 1;
            if err <= 1e-12 * scale {
                ok += 1;
            }
        }
    }
    outcome(
        ok == checks,
        format!("{ok}/{checks} vectors within 1e-12·‖φ‖∞ (worst ratio {worst:.2e})"),
    )
}

fn interior_set(g: &lrp_ids::WindowGraph) -> BTreeSet<String> {
    g.interior_edges.iter().map(|(e, w)| format!("{e:?}|{:016x}", w.to_bits())).collect()
}

fn c7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let opts = SamplingOptions::default();
    let mut nested = 0;
    for i in 0..10 {
        let p = random_params(&mut rng, i);
        let small = sample_window(&p, 50, &opts).unwrap();
        let big = sample_window(&p, 80, &opts).unwrap();
        let inner = BoxRegion::new(50, p.dimension());
        let mut restricted = big.clone();
        restricted.interior_edges.retain(|(e, _)| match e {
            EdgeKey::Loop(x) => inner.contains(x),
            EdgeKey::Pair(x, y) => inner.contains(x) && inner.contains(y),
        });
        if interior_set(&small) == interior_set(&restricted) && small.interior_edges == restricted.interior_edges {
            nested += 1;
        }
    }
    let (same, detail) = cli_byte_identity();
    outcome(
        nested == 10 && same,
        format!("{nested}/10 configs nested exactly; {detail}"),
    )
}

fn cli_byte_identity() -> (bool, String) {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("exp.toml");
    std::fs::write(
        &cfg,
        r#"
[model]
dimension = 1
alpha = 1.0
beta = 1.0
kernel = { family = "geometric", q = 0.4 }
weights = { family = "uniform", lo = 0.0, hi = 1.0 }

[run]
n = 60
seed_count = 4
master_seed = 11

[output]
formats = ["csv", "json"]
"#,
    )
    .unwrap();
    let run = |dir: &str| {
        let out = root.path().join(dir);
        let status = Command::new(env!("CARGO_BIN_EXE_lrp-ids"))
            .args(["ids", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(&out)
            .stdout(Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        let csv = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .find(|p| p.extension().is_some_and(|x| x == "csv"))
            .unwrap();
        std::fs::read(csv).unwrap()
    };
    let (a, b) = (run("first"), run("second"));
    (a == b && !a.is_empty(), format!("CLI CSV byte-identical across two processes: {}", a == b))
}

fn c8() -> Outcome {
    let p = model(KernelFamily::Geometric { q: 0.4 }, WeightFamily::Constant { c: 1.0 }, 0.0, 1.0).with_seed(8);
    let opts = SamplingOptions::default();
    let bounds: Vec<f64> = [100usize, 200, 400, 800]
        .iter()
        .map(|&n| {
            let r = default_schedule(n, p.kernel()).unwrap().r_n;
            let g = sample_window(&p, n, &opts).unwrap();
            let l = long_edge_count_box(&g, r as u64, n).unwrap();
            error_bound(n, 1, r, l as f64).unwrap()
        })
        .collect();
    let monotone = bounds.windows(2).all(|w| w[1] <= w[0]);
    let mut exhaustive = true;
    for d in 1..=3 {
        for n in 0..=8usize {
            for r in 0..=n as i64 {
                exhaustive &= boundary_size(n, r, d).unwrap() == boundary_size_brute(n, r, d);
            }
        }
    }
    outcome(
        monotone && exhaustive,
        format!(
            "error bounds {} nonincreasing: {monotone}; boundary closed form exhaustive match: {exhaustive}",
            bounds.iter().map(|b| format!("{b:.5}")).collect::<Vec<_>>().join(" → ")
        ),
    )
}

fn c9() -> Outcome {
    let grid: Vec<f64> = (0..25).map(|i| 0.001 * 1.25f64.powi(i)).collect();
    let slopes: Vec<f64> = [0.5, 1.0]
        .iter()
        .map(|&s| {
            let g: Vec<f64> = grid.iter().map(|e| (-e.powf(-s)).exp()).collect();
            fit_lifshitz(&grid, &g).unwrap().slope
        })
        .collect();
    let synthetic = (slopes[0] + 0.5).abs() <= 1e-6 && (slopes[1] + 1.0).abs() <= 1e-6;

    let p = model(KernelFamily::NearestNeighbor { q: 0.3 }, WeightFamily::Constant { c: 1.0 }, 0.0, 1.0);
    let est = ids_counting(&Engine::default(), &p, 2000, &seeds(200)).unwrap();
    // 20 log-spaced energies spanning [0.001, 0.05]
    let real_grid: Vec<f64> = (0..20).map(|i| 0.001 * 50f64.powf(i as f64 / 19.0)).collect();
    let (real_ok, real_detail) = match lifshitz_probe(&est, &real_grid) {
        Ok(fit) => (
            fit.slope < 0.0 && (-1.2..=-0.2).contains(&fit.slope),
            format!("real slope {:.4} from {} points (in [−1.2, −0.2])", fit.slope, fit.usable),
        ),
        Err(e) => {
            // smallest nonzero energy present in the pooled spectrum
            let lowest = est
                .curve
                .breakpoints()
                .iter()
                .filter(|&&b| b < -lrp_ids::diagnostics::ZERO_ATOM_TOL)
                .map(|b| b.abs())
                .fold(f64::INFINITY, f64::min);
            (false, format!("real run: {e}; smallest nonzero |λ| in 200 seeds is {lowest:.4}"))
        }
    };
    outcome(
        synthetic && real_ok,
        format!("planted slopes {:.8}, {:.8}; {real_detail}", slopes[0], slopes[1]),
    )
}

fn random_step(rng: &mut StdRng) -> StepFunction {
    let k = rng.random_range(1..12);
    let mut b: Vec<f64> = (0..k).map(|_| (rng.random_range(-20..20) as f64) / 4.0).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    let mut acc = 0.0;
    let c: Vec<f64> = b
        .iter()
        .map(|_| {
            acc += rng.random_range(0.0..1.0);
            acc
        })
        .collect();
    let total = acc;
    StepFunction::new(b, c.into_iter().map(|v| v / total).collect()).unwrap()
}

fn c10(col: &Collected) -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let mut axioms = true;
    for _ in 0..1000 {
        let (f, g, h) = (random_step(&mut rng), random_step(&mut rng), random_step(&mut rng));
        let (fg, gf) = (f.sup_distance(&g), g.sup_distance(&f));
        axioms &= fg == gf && fg >= 0.0 && f.sup_distance(&f) == 0.0;
        axioms &= f.sup_distance(&h) <= fg + g.sup_distance(&h) + 1e-15;
        axioms &= (fg == 0.0) == (f == g);
    }
    let mut spectra_ok = true;
    for s in &col.spectra {
        let f = counting_function(s);
        spectra_ok &= f.final_value() == s.size() as f64;
        let mut prev = 0.0;
        for (&b, &c) in f.breakpoints().iter().zip(f.cumulative()) {
            spectra_ok &= f.eval(b) == c && f.left_limit(b) == prev && c >= prev;
            prev = c;
        }
    }
    outcome(
        axioms && spectra_ok,
        format!(
            "metric axioms on 1000 triples: {axioms}; right-continuity and total mass on {} spectra: {spectra_ok}",
            col.spectra.len()
        ),
    )
}

fn main() {
    let mut col = Collected::default();
    let mut failed = 0;
    let mut report = |name: &str, o: Outcome| {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", o.detail);
        if !o.passed {
            failed += 1;
        }
    };
    report("C1 diagonal potential vs uniform CDF", c1(&mut col));
    report("C2 free adjacency vs arcsine law", c2(&mut col));
    report("C3 atom at zero and two-scale consistency", c3(&mut col));
    report("C4 counting vs projector-diagonal estimates", c4(&mut col));
    report("C5 long-edge concentration", c5());
    report("C6 matrix entries vs action form", c6());
    report("C7 nested realizations and reproducible output", c7());
    report("C8 error-bound decay and boundary sizes", c8());
    report("C9 low-energy fit", c9());
    report("C10 step-function algebra", c10(&col));
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
