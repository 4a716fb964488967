//! Command dispatch and artifact emission.
//!
//! Every artifact is named `<command>-<first 12 hex of config digest>.<ext>`
//! and embeds the full digest: CSV files in a leading `# config_digest=`
//! comment, JSON files in a `config_digest` field. Outputs carry no
//! timestamps or host data, so one config always yields the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Format};
use super::plot;
use super::Command;
use crate::cache::Cache;
use crate::diagnostics::{concentration_scan, fit_lifshitz, low_energy_mass};
use crate::error::{Error, Result};
use crate::ids::{self, Engine, IdsEstimate};
use crate::lattice::Site;
use crate::spectra::{counting_function, normalize};

struct Emitter<'a> {
    config: &'a ExperimentConfig,
    dir: PathBuf,
    stem: String,
    digest: String,
    written: Vec<PathBuf>,
}

impl<'a> Emitter<'a> {
    fn new(config: &'a ExperimentConfig, dir: PathBuf, command: Command) -> Result<Self> {
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let digest = config.digest();
        Ok(Self {
            config,
            stem: format!("{}-{}", command.name(), &digest[..12]),
            dir,
            digest,
            written: Vec::new(),
        })
    }

    fn write(&mut self, ext: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(format!("{}.{ext}", self.stem));
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn csv(&mut self, header: &str, rows: &str) -> Result<()> {
        if self.config.wants(Format::Csv) {
            let text = format!("# config_digest={}\n{header}\n{rows}", self.digest);
            self.write("csv", &text)?;
        }
        Ok(())
    }

    fn json(&mut self, command: Command, payload: impl Serialize) -> Result<()> {
        if self.config.wants(Format::Json) {
            let doc = json!({
                "schema": format!("lrp-ids/{}/v1", command.name()),
                "config_digest": self.digest,
                "config": self.config,
                "result": payload,
            });
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            self.write("json", &text)?;
        }
        Ok(())
    }

    fn svg(&mut self, make: impl FnOnce() -> Result<String>) -> Result<()> {
        if self.config.wants(Format::Svg) {
            let text = make()?;
            self.write("svg", &text)?;
        }
        Ok(())
    }
}

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn coords(x: &Site) -> String {
    x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

fn curve_rows(est: &IdsEstimate) -> String {
    let mut rows = String::new();
    for (b, c) in est.curve.breakpoints().iter().zip(est.curve.cumulative()) {
        let _ = writeln!(rows, "{},{}", f(*b), f(*c));
    }
    rows
}

fn emit_estimate(out: &mut Emitter, command: Command, est: &IdsEstimate) -> Result<()> {
    out.csv("lambda,cumulative", &curve_rows(est))?;
    out.json(command, est)?;
    out.svg(|| plot::ids_curve(&est.curve, command.name()))
}

/// Executes `command` and returns the paths written. `output` overrides
/// `output.directory`.
pub fn run(config: &ExperimentConfig, command: Command, output: Option<&Path>) -> Result<Vec<PathBuf>> {
    let params = config.params()?;
    let seeds = config.seeds()?;
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| config.output.directory.clone());
    let cache_dir = match (&config.output.cache_dir, output) {
        (None, Some(o)) => o.join("cache"),
        _ => config.cache_dir(),
    };
    let engine: Engine = config.engine()?.with_cache(Cache::new(cache_dir)?);
    let mut out = Emitter::new(config, dir, command)?;

    match command {
        Command::Sample => {
            let n = config.require_n()?;
            let g = engine.window(&params.with_seed(seeds[0]), n)?;
            let mut rows = String::new();
            for (class, list) in [("interior", &g.interior_edges), ("cross", &g.cross_edges)] {
                for (e, w) in list {
                    let (x, y) = e.endpoints();
                    let _ = writeln!(rows, "{class},{},{},{}", coords(x), y.map(coords).unwrap_or_default(), f(*w));
                }
            }
            out.csv("class,x,y,weight", &rows)?;
            out.json(command, &g)?;
        }
        Command::Spectrum => {
            let n = config.require_n()?;
            let s = engine.spectrum(&params.with_seed(seeds[0]), n, true)?;
            let overlaps = s.center_overlaps.clone().unwrap_or_default();
            let mut rows = String::new();
            for (k, (l, o)) in s.eigenvalues.iter().zip(&overlaps).enumerate() {
                let _ = writeln!(rows, "{k},{},{}", f(*l), f(*o));
            }
            out.csv("index,eigenvalue,center_overlap", &rows)?;
            out.json(command, &s)?;
            let curve = normalize(&counting_function(&s), s.size())?;
            out.svg(|| plot::ids_curve(&curve, "counting function"))?;
        }
        Command::Ids => {
            let est = ids::ids_counting(&engine, &params, config.require_n()?, &seeds)?;
            emit_estimate(&mut out, command, &est)?;
        }
        Command::PasturShubin => {
            let est = ids::ids_pastur_shubin(&engine, &params, config.require_n()?, &seeds, config.mode())?;
            emit_estimate(&mut out, command, &est)?;
        }
        Command::Atoms => {
            let rep = ids::atom_report(&engine, &params, config.require_n()?, &seeds)?;
            let mut rows = String::new();
            for a in &rep.atoms {
                let _ = writeln!(rows, "{},{},{}", f(a.lambda), f(a.mass), f(rep.error_bound));
            }
            out.csv("lambda,mass,error_bound", &rows)?;
            out.json(command, &rep)?;
        }
        Command::Converge => {
            let n_list = config
                .run
                .n_list
                .clone()
                .ok_or_else(|| Error::invalid("run.n_list", "required by this command"))?;
            let table = ids::convergence_scan(&engine, &params, &n_list, &seeds)?;
            let mut rows = String::new();
            for r in &table {
                let d = r.sup_distance.map(f).unwrap_or_default();
                let _ = writeln!(rows, "{},{d},{}", r.n, f(r.error_bound));
            }
            out.csv("n,sup_distance,error_bound", &rows)?;
            out.json(command, &table)?;
            let pts: Vec<(f64, f64)> = table
                .iter()
                .filter_map(|r| r.sup_distance.map(|d| (r.n as f64, d)))
                .collect();
            if !pts.is_empty() {
                out.svg(|| plot::line_plot(&pts, "consecutive-scale distance", "n", "sup distance"))?;
            }
        }
        Command::Concentration => {
            let r = config.run.r.ok_or_else(|| Error::invalid("run.r", "required by this command"))?;
            let q = config
                .run
                .q_radius
                .ok_or_else(|| Error::invalid("run.q_radius", "required by this command"))?;
            let deltas = config
                .run
                .delta
                .clone()
                .ok_or_else(|| Error::invalid("run.delta", "required by this command"))?;
            let reports = concentration_scan(&params, r, q, &deltas, &seeds, &engine.sampling)?;
            let mut rows = String::new();
            for rep in &reports {
                let verdict = if rep.passed { "pass" } else { "fail" };
                let _ = writeln!(rows, "{},{},{},{verdict}", f(rep.delta), f(rep.empirical), f(rep.bound));
            }
            out.csv("delta,empirical,bound,verdict", &rows)?;
            out.json(command, &reports)?;
        }
        Command::Lifshitz => {
            let grid = config
                .run
                .e_grid
                .clone()
                .ok_or_else(|| Error::invalid("run.e_grid", "required by this command"))?;
            let est = ids::ids_counting(&engine, &params, config.require_n()?, &seeds)?;
            let g: Vec<f64> = grid.iter().map(|&e| low_energy_mass(&est.curve, e)).collect();
            let mut rows = String::new();
            for (e, g) in grid.iter().zip(&g) {
                let ll = (*g > 0.0 && *g < 1.0).then(|| f((-g.ln()).ln())).unwrap_or_default();
                let _ = writeln!(rows, "{},{},{},{ll}", f(*e), f(*g), f(e.ln()));
            }
            out.csv("E,G,logE,loglogG", &rows)?;
            match fit_lifshitz(&grid, &g) {
                Ok(fit) => {
                    out.json(command, &fit)?;
                    out.svg(|| plot::loglog_lifshitz(&fit))?;
                }
                Err(e) => {
                    let points: Value = json!(grid.iter().zip(&g).map(|(e, g)| json!({"e": e, "g": g})).collect::<Vec<_>>());
                    out.json(command, json!({ "points": points, "error": e.to_string() }))?;
                    return Err(e);
                }
            }
        }
    }
    Ok(out.written)
}
