//! Command-line flags layered over a JSON config document.

use anyhow::{bail, Result};
use serde_json::{Map, Value};

use crate::config::{parse_list, Grid};

/// Flag values, one per config key. `None` leaves the key alone.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Number of sites [key: N]
    #[arg(short = 'N', long = "sites")]
    pub n_sites: Option<usize>,
    /// Ising coupling [key: J]
    #[arg(short = 'J', long = "coupling")]
    pub coupling: Option<f64>,
    /// Transverse field [key: hz]
    #[arg(long, allow_negative_numbers = true)]
    pub hz: Option<f64>,
    /// open | periodic [key: boundary]
    #[arg(long)]
    pub boundary: Option<String>,
    /// none | two_site_plus | two_site_minus | two_site_double_plus | single_site [key: pert.kind]
    #[arg(long)]
    pub pert: Option<String>,
    /// First perturbed site [key: pert.p]
    #[arg(short = 'p', long)]
    pub p: Option<usize>,
    /// Second perturbed site [key: pert.q]
    #[arg(short = 'q', long)]
    pub q: Option<usize>,
    /// Single-site raising strength [key: pert.gamma_plus]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_plus: Option<f64>,
    /// Single-site lowering strength [key: pert.gamma_minus]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_minus: Option<f64>,
    /// "all" or a list like 1:2,3:5 [key: pairs]
    #[arg(long)]
    pub pairs: Option<String>,
    /// Strength for spectrum [key: gamma]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// start:stop:points or a comma list [key: gamma_grid]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_grid: Option<String>,
    /// [key: hz_grid]
    #[arg(long, allow_hyphen_values = true)]
    pub hz_grid: Option<String>,
    /// [key: gamma_plus_grid]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_plus_grid: Option<String>,
    /// [key: gamma_minus_grid]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_minus_grid: Option<String>,
    /// gamma_plus_minus | gamma_hz [key: phase_axes]
    #[arg(long)]
    pub phase_axes: Option<String>,
    /// Comma list of fields [key: hz_samples]
    #[arg(long)]
    pub hz_samples: Option<String>,
    /// [key: gamma_max]
    #[arg(long)]
    pub gamma_max: Option<f64>,
    /// Bisection width [key: tol]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative imaginary-part snap [key: snap_tol]
    #[arg(long)]
    pub snap_tol: Option<f64>,
    /// [key: scan_points]
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Flag thresholds whose spectrum becomes real again [key: detect_reentrance]
    #[arg(long)]
    pub detect_reentrance: bool,
    /// chain | full [key: suite]
    #[arg(long)]
    pub suite: Option<String>,
    /// [key: output_dir]
    #[arg(short = 'o', long)]
    pub output_dir: Option<String>,
    /// Worker threads [key: jobs]
    #[arg(long, env = "PTCHAIN_JOBS")]
    pub jobs: Option<usize>,
}

fn grid_value(s: &str) -> Result<Value> {
    Ok(serde_json::to_value(Grid::parse_flag(s)?)?)
}

fn pairs_value(s: &str) -> Result<Value> {
    if s == "all" {
        return Ok("all".into());
    }
    let mut v = Vec::new();
    for item in s.split(',') {
        let Some((p, q)) = item.split_once(':') else {
            bail!("--pairs: expected p:q, got \"{item}\"");
        };
        v.push(Value::from(vec![
            p.trim().parse::<usize>()?,
            q.trim().parse::<usize>()?,
        ]));
    }
    Ok(Value::Array(v))
}

impl Overrides {
    /// Writes every set flag into `doc`.
    pub fn apply(&self, doc: &mut Map<String, Value>) -> Result<()> {
        let mut set = |k: &str, v: Value| {
            doc.insert(k.into(), v);
        };
        if let Some(x) = self.n_sites {
            set("N", x.into());
        }
        if let Some(x) = self.coupling {
            set("J", x.into());
        }
        if let Some(x) = self.hz {
            set("hz", x.into());
        }
        if let Some(x) = &self.boundary {
            set("boundary", x.as_str().into());
        }
        if let Some(x) = &self.pairs {
            set("pairs", pairs_value(x)?);
        }
        if let Some(x) = self.gamma {
            set("gamma", x.into());
        }
        for (k, g) in [
            ("gamma_grid", &self.gamma_grid),
            ("hz_grid", &self.hz_grid),
            ("gamma_plus_grid", &self.gamma_plus_grid),
            ("gamma_minus_grid", &self.gamma_minus_grid),
        ] {
            if let Some(g) = g {
                set(k, grid_value(g)?);
            }
        }
        if let Some(x) = &self.phase_axes {
            set("phase_axes", x.as_str().into());
        }
        if let Some(x) = &self.hz_samples {
            set("hz_samples", parse_list(x)?.into());
        }
        if let Some(x) = self.gamma_max {
            set("gamma_max", x.into());
        }
        if let Some(x) = self.tol {
            set("tol", x.into());
        }
        if let Some(x) = self.snap_tol {
            set("snap_tol", x.into());
        }
        if let Some(x) = self.scan_points {
            set("scan_points", x.into());
        }
        if self.detect_reentrance {
            set("detect_reentrance", true.into());
        }
        if let Some(x) = &self.suite {
            set("suite", x.as_str().into());
        }
        if let Some(x) = &self.output_dir {
            set("output_dir", x.as_str().into());
        }
        if let Some(x) = self.jobs {
            set("jobs", x.into());
        }
        self.apply_pert(doc)
    }

    fn apply_pert(&self, doc: &mut Map<String, Value>) -> Result<()> {
        let touched = self.pert.is_some()
            || self.p.is_some()
            || self.q.is_some()
            || self.gamma_plus.is_some()
            || self.gamma_minus.is_some();
        if !touched {
            return Ok(());
        }
        let mut obj = match doc.get("pert") {
            Some(Value::Object(m)) => m.clone(),
            _ => Map::new(),
        };
        if let Some(kind) = &self.pert {
            if kind == "none" {
                doc.insert("pert".into(), "none".into());
                if self.p.is_some() || self.q.is_some() {
                    bail!("--p/--q need a perturbation kind other than none");
                }
                return Ok(());
            }
            if obj.get("kind").and_then(Value::as_str) != Some(kind) {
                let keep: &[&str] = if kind == "single_site" {
                    &["p"]
                } else {
                    &["p", "q"]
                };
                obj.retain(|k, _| keep.contains(&k.as_str()));
                obj.insert("kind".into(), kind.as_str().into());
            }
        }
        if !obj.contains_key("kind") {
            bail!(
                "--p/--q/--gamma-plus/--gamma-minus need --pert or a \"pert\" object in the config"
            );
        }
        if let Some(x) = self.p {
            obj.insert("p".into(), x.into());
        }
        if let Some(x) = self.q {
            obj.insert("q".into(), x.into());
        }
        if let Some(x) = self.gamma_plus {
            obj.insert("gamma_plus".into(), x.into());
        }
        if let Some(x) = self.gamma_minus {
            obj.insert("gamma_minus".into(), x.into());
        }
        doc.insert("pert".into(), Value::Object(obj));
        Ok(())
    }
}
