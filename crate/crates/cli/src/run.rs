use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ptchain::eig;
use ptchain::model::{build_scaled, classify_sites};
use ptchain::pt::{
    find_threshold, fit_field_response, flow_sweep, max_imag, phase_grid_gamma_hz,
    phase_grid_single_site, PhaseGrid, Threshold,
};
use ptchain::{Perturbation64, SpinChain64};
use serde_json::{json, Value};

use crate::config::{Analysis, PhaseAxes, RunConfig, Suite};
use crate::validate::{chain_cases, full_cases, run_cases, OracleRow};

/// What a run produced.
#[derive(Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    pub manifest: Value,
    /// Oracle rows of a `validate` run.
    pub validation: Vec<OracleRow>,
    /// Number of failed checks (nonzero only for `validate`).
    pub failures: usize,
}

struct Units {
    scale: f64,
    suffix: &'static str,
}

impl Units {
    fn of(cfg: &RunConfig) -> Self {
        if cfg.coupling_j > 0.0 {
            Units {
                scale: cfg.coupling_j,
                suffix: "_over_J",
            }
        } else {
            Units {
                scale: 1.0,
                suffix: "",
            }
        }
    }

    fn col(&self, name: &str) -> String {
        format!("{name}{}", self.suffix)
    }

    fn val(&self, x: f64) -> String {
        num(x / self.scale)
    }
}

/// Shortest round-trip form; exponent notation for very small or large
/// magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn threshold_cell(t: Threshold<f64>, u: &Units) -> String {
    match t {
        Threshold::Found(g) => u.val(g),
        Threshold::NoThreshold => "none".into(),
    }
}

fn sites_of(p: &Perturbation64) -> (String, String) {
    match p.sites() {
        Some((p, q)) => (p.to_string(), q.to_string()),
        None => (String::new(), String::new()),
    }
}

struct Out {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Out {
    fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.files.push(path);
        Ok(())
    }
}

/// Runs the configured analysis, writing CSV files and `manifest.json`
/// into `output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    match cfg.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .context("cannot start worker pool")?;
            pool.install(|| run_inner(cfg))
        }
        None => run_inner(cfg),
    }
}

fn run_inner(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let dir = Path::new(&cfg.output_dir);
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut out = Out {
        dir: dir.to_path_buf(),
        files: Vec::new(),
    };
    let chain = cfg.chain()?;
    let u = Units::of(cfg);
    let mut summary = Vec::new();
    let mut validation = Vec::new();
    let mut failures = 0;

    let (iterations, results) = match cfg.analysis {
        Analysis::Spectrum => spectrum(cfg, &chain, &u, &mut out, &mut summary)?,
        Analysis::Threshold => threshold(cfg, &chain, &u, &mut out, &mut summary)?,
        Analysis::Flow => flow(cfg, &chain, &u, &mut out, &mut summary)?,
        Analysis::PhaseGrid => phase(cfg, &chain, &u, &mut out, &mut summary)?,
        Analysis::FieldResponse => field(cfg, &chain, &u, &mut out, &mut summary)?,
        Analysis::Validate => {
            let (it, res, rows) = validate(cfg, &chain, &u, &mut out, &mut summary)?;
            failures = rows.iter().filter(|r| !r.pass).count();
            validation = rows;
            (it, res)
        }
    };

    let search = cfg.search(&chain);
    let manifest_path = dir.join("manifest.json");
    let mut files: Vec<String> = out
        .files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    files.push("manifest.json".into());
    let manifest = json!({
        "tool": "ptchain",
        "version": env!("CARGO_PKG_VERSION"),
        "analysis": cfg.analysis.name(),
        "config": serde_json::to_value(cfg)?,
        "tolerances": {
            "gamma_max": search.gamma_max,
            "tol": search.tol,
            "snap_tol": search.snap_tol,
            "scan_points": search.scan_points,
            "detect_reentrance": search.detect_reentrance,
        },
        "energy_unit": u.scale,
        "wall_time_s": start.elapsed().as_secs_f64(),
        "solver_iterations": iterations,
        "threads": rayon::current_num_threads(),
        "outputs": files,
        "results": results,
    });
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )
    .with_context(|| format!("cannot write {}", manifest_path.display()))?;
    out.files.push(manifest_path);

    Ok(RunReport {
        files: out.files,
        summary,
        manifest,
        validation,
        failures,
    })
}

type Section = (usize, Value);

fn spectrum(
    cfg: &RunConfig,
    chain: &SpinChain64,
    u: &Units,
    out: &mut Out,
    summary: &mut Vec<String>,
) -> Result<Section> {
    let pert = cfg.single()?;
    let gamma = if matches!(pert, Perturbation64::SingleSite { .. }) && cfg.gamma == 0.0 {
        1.0
    } else {
        cfg.gamma
    };
    let h = build_scaled(chain, &pert, gamma)?;
    let s = eig::eigenvalues(&h).with_context(|| format!("spectrum at gamma = {gamma}"))?;
    let sorted = s.sorted();
    let rows: Vec<Vec<String>> = sorted
        .iter()
        .enumerate()
        .map(|(i, z)| vec![i.to_string(), u.val(z.re), u.val(z.im)])
        .collect();
    out.csv(
        "spectrum.csv",
        &["index".into(), u.col("re"), u.col("im")],
        &rows,
    )?;
    let mi = max_imag(&s, cfg.snap());
    summary.push(format!(
        "{} eigenvalues, max Im = {} (residual {:.1e}, {} QR sweeps)",
        s.len(),
        mi,
        s.max_residual,
        s.iterations
    ));
    Ok((
        s.iterations,
        json!({
            "gamma": gamma,
            "eigenvalues": s.len(),
            "max_imag": mi,
            "max_residual": s.max_residual,
        }),
    ))
}

fn threshold(
    cfg: &RunConfig,
    chain: &SpinChain64,
    u: &Units,
    out: &mut Out,
    summary: &mut Vec<String>,
) -> Result<Section> {
    let search = cfg.search(chain);
    let batch = cfg.batch()?;
    let mut rows = Vec::new();
    let mut iterations = 0;
    let mut reentrant = 0;
    for pert in &batch {
        let r = find_threshold(chain, pert, &search)
            .with_context(|| format!("threshold search for {pert:?}"))?;
        iterations += r.solver_iterations;
        reentrant += r.reentrant as usize;
        let (p, q) = sites_of(pert);
        let class = r.classification.map_or("none", |c| c.name());
        summary.push(format!(
            "({p},{q}) {class}: gamma_PT = {}",
            match r.gamma_pt {
                Threshold::Found(g) => format!("{g:.4}"),
                Threshold::NoThreshold => "none".into(),
            }
        ));
        rows.push(vec![
            p,
            q,
            class.to_string(),
            threshold_cell(r.gamma_pt, u),
            u.val(r.bracket.0),
            u.val(r.bracket.1),
            r.evaluations.to_string(),
            r.reentrant.to_string(),
        ]);
    }
    out.csv(
        "threshold.csv",
        &[
            "p".into(),
            "q".into(),
            "class".into(),
            u.col("gamma_pt"),
            u.col("bracket_lo"),
            u.col("bracket_hi"),
            "evaluations".into(),
            "reentrant".into(),
        ],
        &rows,
    )?;
    Ok((
        iterations,
        json!({ "cases": batch.len(), "reentrant_cases": reentrant }),
    ))
}

fn flow(
    cfg: &RunConfig,
    chain: &SpinChain64,
    u: &Units,
    out: &mut Out,
    summary: &mut Vec<String>,
) -> Result<Section> {
    let pert = cfg.single()?;
    let grid = cfg.gamma_grid();
    let table = flow_sweep(chain, &pert, &grid)?;
    let dim = chain.dim();
    let mut header = vec![u.col("gamma")];
    for k in 0..dim {
        header.push(u.col(&format!("re_{k}")));
        header.push(u.col(&format!("im_{k}")));
    }
    let rows: Vec<Vec<String>> = table
        .gamma_grid
        .iter()
        .zip(&table.rows)
        .map(|(&g, row)| {
            let mut r = Vec::with_capacity(1 + 2 * dim);
            r.push(u.val(g));
            for z in row {
                r.push(u.val(z.re));
                r.push(u.val(z.im));
            }
            r
        })
        .collect();
    out.csv("flow.csv", &header, &rows)?;
    let snap = cfg.snap();
    let first = table.first_broken(snap).map(|k| table.gamma_grid[k]);
    summary.push(format!(
        "{} grid points x {} eigenvalues; first broken gamma on grid: {}",
        grid.len(),
        dim,
        first.map_or("none".into(), |g| g.to_string())
    ));
    Ok((
        table.solver_iterations,
        json!({
            "grid_points": grid.len(),
            "eigenvalues_per_row": dim,
            "first_broken_gamma": first,
            "min_real_stays_real": table.min_real_stays_real(snap),
        }),
    ))
}

fn phase(
    cfg: &RunConfig,
    chain: &SpinChain64,
    u: &Units,
    out: &mut Out,
    summary: &mut Vec<String>,
) -> Result<Section> {
    let snap = cfg.snap();
    let (grid, axes): (PhaseGrid<f64>, [&str; 2]) = match cfg.phase_axes() {
        PhaseAxes::GammaPlusMinus => {
            let Perturbation64::SingleSite { p, .. } = cfg.single()? else {
                bail!("phase_axes gamma_plus_minus needs a single_site perturbation");
            };
            let g = phase_grid_single_site(
                chain,
                p,
                &cfg.gamma_plus_grid(),
                &cfg.gamma_minus_grid(),
                snap,
            )?;
            (g, ["gamma_plus", "gamma_minus"])
        }
        PhaseAxes::GammaHz => {
            let pert = cfg.single()?;
            let g = phase_grid_gamma_hz(chain, &pert, &cfg.gamma_grid(), &cfg.hz_grid(), snap)?;
            (g, ["gamma", "hz"])
        }
    };
    let mut rows = Vec::new();
    for (i, &y) in grid.y_axis.iter().enumerate() {
        for (j, &x) in grid.x_axis.iter().enumerate() {
            rows.push(vec![u.val(x), u.val(y), u.val(grid.get(i, j))]);
        }
    }
    out.csv(
        "phase.csv",
        &[u.col("x"), u.col("y"), u.col("max_im")],
        &rows,
    )?;
    let broken = grid.max_im.iter().flatten().filter(|&&v| v > 0.0).count();
    summary.push(format!(
        "{} x {} grid ({} vs {}), {} broken cells",
        grid.x_axis.len(),
        grid.y_axis.len(),
        axes[0],
        axes[1],
        broken
    ));
    Ok((
        grid.solver_iterations,
        json!({
            "x_axis": axes[0],
            "y_axis": axes[1],
            "columns": grid.x_axis.len(),
            "rows": grid.y_axis.len(),
            "broken_cells": broken,
        }),
    ))
}

fn field(
    cfg: &RunConfig,
    chain: &SpinChain64,
    u: &Units,
    out: &mut Out,
    summary: &mut Vec<String>,
) -> Result<Section> {
    let pert = cfg.single()?;
    classify_sites(chain, &pert)?;
    let samples = cfg.hz_samples();
    let fit = fit_field_response(chain, &pert, &samples, |hz| {
        cfg.search(&chain.with_field(hz))
    })?;
    let mut rows = Vec::new();
    let mut iterations = fit.zero_field.solver_iterations;
    let mut push = |hz: f64, r: &ptchain::ThresholdResult64, in_fit: bool| {
        rows.push(vec![
            u.val(hz),
            threshold_cell(r.gamma_pt, u),
            u.val(r.bracket.0),
            u.val(r.bracket.1),
            r.evaluations.to_string(),
            r.reentrant.to_string(),
            in_fit.to_string(),
        ]);
    };
    push(0.0, &fit.zero_field, fit.zero_field_in_fit);
    for (&hz, r) in samples.iter().zip(&fit.thresholds) {
        iterations += r.solver_iterations;
        push(hz, r, true);
    }
    out.csv(
        "field_response.csv",
        &[
            u.col("hz"),
            u.col("gamma_pt"),
            u.col("bracket_lo"),
            u.col("bracket_hi"),
            "evaluations".into(),
            "reentrant".into(),
            "in_fit".into(),
        ],
        &rows,
    )?;
    summary.push(format!(
        "{}: gamma_PT(hz) ~ {:.4} hz {} {:.4} (rms residual {:.1e}, h_z = 0 point {})",
        fit.category,
        fit.slope,
        if fit.intercept < 0.0 { '-' } else { '+' },
        fit.intercept.abs(),
        fit.residual,
        if fit.zero_field_in_fit {
            "included"
        } else {
            "excluded"
        }
    ));
    Ok((
        iterations,
        json!({
            "category": fit.category.name(),
            "class": fit.classification.name(),
            "slope": fit.slope,
            "intercept": fit.intercept,
            "residual": fit.residual,
            "zero_field_in_fit": fit.zero_field_in_fit,
        }),
    ))
}

fn validate(
    cfg: &RunConfig,
    chain: &SpinChain64,
    u: &Units,
    out: &mut Out,
    summary: &mut Vec<String>,
) -> Result<(usize, Value, Vec<OracleRow>)> {
    let cases = match cfg.suite.unwrap_or(Suite::Chain) {
        Suite::Chain => {
            if chain.field_hz != 0.0 {
                bail!("key \"hz\": the oracle suite runs at h_z = 0");
            }
            chain_cases(chain)
        }
        Suite::Full => full_cases(),
    };
    let rows = run_cases(&cases, |c| {
        let mut s = cfg.search(c);
        // Tolerances in the config are in units of this chain's J.
        if cfg.coupling_j > 0.0 {
            let r = c.coupling_j / cfg.coupling_j;
            s.gamma_max *= r;
            s.tol *= r;
        }
        s
    })?;
    let iterations = rows.iter().map(|r| r.numeric.solver_iterations).sum();
    let mut table = Vec::new();
    for r in &rows {
        let (p, q) = sites_of(&r.case.pert);
        table.push(vec![
            r.case.group.to_string(),
            r.case.chain.n_sites.to_string(),
            r.case.chain.boundary.to_string(),
            r.case.pert.kind_name().to_string(),
            p,
            q,
            r.class.map_or("none", |c| c.name()).to_string(),
            threshold_cell(r.analytic, u),
            threshold_cell(r.numeric.gamma_pt, u),
            r.difference().map_or(String::new(), |d| u.val(d)),
            u.val(r.tol),
            if r.pass { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    out.csv(
        "validate.csv",
        &[
            "group".into(),
            "N".into(),
            "boundary".into(),
            "kind".into(),
            "p".into(),
            "q".into(),
            "class".into(),
            u.col("analytic"),
            u.col("numeric"),
            u.col("difference"),
            u.col("tol"),
            "result".into(),
        ],
        &table,
    )?;
    summary.push(format!(
        "{:<15} {:>3} {:<9} {:<21} {:>3} {:>3} {:<12} {:>9} {:>9} {}",
        "group", "N", "boundary", "kind", "p", "q", "class", "analytic", "numeric", "result"
    ));
    for t in &table {
        summary.push(format!(
            "{:<15} {:>3} {:<9} {:<21} {:>3} {:>3} {:<12} {:>9} {:>9} {}",
            t[0],
            t[1],
            t[2],
            t[3],
            t[4],
            t[5],
            t[6],
            short(&t[7]),
            short(&t[8]),
            t[11]
        ));
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    summary.push(format!(
        "{} of {} checks passed",
        rows.len() - failed,
        rows.len()
    ));
    Ok((
        iterations,
        json!({ "checks": rows.len(), "failed": failed }),
        rows,
    ))
}

fn short(s: &str) -> String {
    s.parse::<f64>()
        .map_or(s.to_string(), |x| format!("{x:.5}"))
}
