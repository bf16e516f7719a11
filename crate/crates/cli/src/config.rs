//! Run configuration: a strict JSON document, with every key optional
//! except `N`.
//!
//! ```json
//! {
//!   "N": 7, "J": 1.0, "hz": 0.0, "boundary": "open",
//!   "pert": {"kind": "two_site_plus", "p": 1, "q": 7},
//!   "analysis": "threshold"
//! }
//! ```
//!
//! Unknown keys are rejected. Errors name the offending key.

use std::fmt;

use anyhow::{anyhow, bail, Context, Result};
use ptchain::pt::{ThresholdSearch, DEFAULT_SCAN_POINTS, DEFAULT_SNAP_TOL};
use ptchain::{Boundary, Perturbation64, SpinChain64};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Spectrum,
    Threshold,
    Flow,
    PhaseGrid,
    FieldResponse,
    Validate,
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Spectrum => "spectrum",
            Analysis::Threshold => "threshold",
            Analysis::Flow => "flow",
            Analysis::PhaseGrid => "phase_grid",
            Analysis::FieldResponse => "field_response",
            Analysis::Validate => "validate",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKey {
    Open,
    Periodic,
}

impl From<BoundaryKey> for Boundary {
    fn from(b: BoundaryKey) -> Self {
        match b {
            BoundaryKey::Open => Boundary::Open,
            BoundaryKey::Periodic => Boundary::Periodic,
        }
    }
}

/// Axes of a `phase_grid` run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseAxes {
    /// `γ₊` (x) against `γ₋` (y) for a single-site perturbation.
    GammaPlusMinus,
    /// Strength (x) against transverse field (y).
    GammaHz,
}

/// Which oracle cases `validate` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Every supported perturbation on the configured chain.
    Chain,
    /// The fixed acceptance table (open chains N = 4..10, N = 8 ring).
    Full,
}

/// Perturbation as written in the config. Sites may be omitted when
/// `pairs` expands them.
#[derive(Clone, Debug, PartialEq)]
pub enum PertConfig {
    None,
    TwoSitePlus {
        p: Option<usize>,
        q: Option<usize>,
    },
    TwoSiteMinus {
        p: Option<usize>,
        q: Option<usize>,
    },
    TwoSiteDoublePlus {
        p: Option<usize>,
        q: Option<usize>,
    },
    SingleSite {
        p: Option<usize>,
        gamma_plus: f64,
        gamma_minus: f64,
    },
}

impl PertConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            PertConfig::None => "none",
            PertConfig::TwoSitePlus { .. } => "two_site_plus",
            PertConfig::TwoSiteMinus { .. } => "two_site_minus",
            PertConfig::TwoSiteDoublePlus { .. } => "two_site_double_plus",
            PertConfig::SingleSite { .. } => "single_site",
        }
    }

    fn resolve(&self, p: usize, q: usize) -> Perturbation64 {
        match *self {
            PertConfig::None => Perturbation64::None,
            PertConfig::TwoSitePlus { .. } => Perturbation64::TwoSitePlus { p, q },
            PertConfig::TwoSiteMinus { .. } => Perturbation64::TwoSiteMinus { p, q },
            PertConfig::TwoSiteDoublePlus { .. } => Perturbation64::TwoSiteDoublePlus { p, q },
            PertConfig::SingleSite {
                gamma_plus,
                gamma_minus,
                ..
            } => Perturbation64::SingleSite {
                p,
                gamma_plus,
                gamma_minus,
            },
        }
    }

    fn sites(&self) -> (Option<usize>, Option<usize>) {
        match *self {
            PertConfig::None => (None, None),
            PertConfig::TwoSitePlus { p, q }
            | PertConfig::TwoSiteMinus { p, q }
            | PertConfig::TwoSiteDoublePlus { p, q } => (p, q),
            PertConfig::SingleSite { p, .. } => (p, p),
        }
    }
}

impl Serialize for PertConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = Map::new();
        if matches!(self, PertConfig::None) {
            return s.serialize_str("none");
        }
        m.insert("kind".into(), self.kind().into());
        let (p, q) = self.sites();
        if let Some(p) = p {
            m.insert("p".into(), p.into());
        }
        match *self {
            PertConfig::SingleSite {
                gamma_plus,
                gamma_minus,
                ..
            } => {
                m.insert("gamma_plus".into(), gamma_plus.into());
                m.insert("gamma_minus".into(), gamma_minus.into());
            }
            _ => {
                if let Some(q) = q {
                    m.insert("q".into(), q.into());
                }
            }
        }
        Value::Object(m).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PertConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        pert_from_value(&v).map_err(D::Error::custom)
    }
}

fn pert_from_value(v: &Value) -> std::result::Result<PertConfig, String> {
    if let Some(s) = v.as_str() {
        return if s == "none" {
            Ok(PertConfig::None)
        } else {
            Err(format!(
                "expected \"none\" or an object with \"kind\", got \"{s}\""
            ))
        };
    }
    let obj = v
        .as_object()
        .ok_or("expected \"none\" or an object with \"kind\"")?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or("missing string key \"kind\"")?;
    let allowed: &[&str] = match kind {
        "single_site" => &["kind", "p", "gamma_plus", "gamma_minus"],
        "two_site_plus" | "two_site_minus" | "two_site_double_plus" => &["kind", "p", "q"],
        other => {
            return Err(format!(
                "unknown kind \"{other}\", expected one of two_site_plus, two_site_minus, \
                 two_site_double_plus, single_site"
            ))
        }
    };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unknown key \"{k}\" for kind \"{kind}\""));
    }
    let site = |key: &str| -> std::result::Result<Option<usize>, String> {
        match obj.get(key) {
            None => Ok(None),
            Some(x) => x.as_u64().map(|n| Some(n as usize)).ok_or(format!(
                "key \"{key}\": expected a positive integer site index"
            )),
        }
    };
    let real = |key: &str, default: f64| -> std::result::Result<f64, String> {
        match obj.get(key) {
            None => Ok(default),
            Some(x) => x
                .as_f64()
                .ok_or(format!("key \"{key}\": expected a number")),
        }
    };
    let (p, q) = (site("p")?, site("q")?);
    Ok(match kind {
        "two_site_plus" => PertConfig::TwoSitePlus { p, q },
        "two_site_minus" => PertConfig::TwoSiteMinus { p, q },
        "two_site_double_plus" => PertConfig::TwoSiteDoublePlus { p, q },
        _ => PertConfig::SingleSite {
            p,
            gamma_plus: real("gamma_plus", 1.0)?,
            gamma_minus: real("gamma_minus", 0.0)?,
        },
    })
}

/// Site batch: `"all"` expands every site (pair) of the chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pairs {
    All(AllTag),
    List(Vec<(usize, usize)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllTag {
    All,
}

/// A 1-D grid, either explicit values or `{start, stop, points}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Linspace(Linspace),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, points: usize) -> Self {
        Grid::Linspace(Linspace {
            start,
            stop,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Linspace(l) => match l.points {
                0 => Vec::new(),
                1 => vec![l.start],
                n => (0..n)
                    .map(|k| l.start + (l.stop - l.start) * k as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }

    fn check(&self, key: &str) -> Result<()> {
        let v = self.values();
        if v.is_empty() {
            bail!("key \"{key}\": grid is empty");
        }
        if v.iter().any(|x| !x.is_finite()) {
            bail!("key \"{key}\": grid values must be finite");
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            bail!("key \"{key}\": grid must be strictly ascending");
        }
        Ok(())
    }

    /// Parses `start:stop:points` or a comma-separated list.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            return Ok(Grid::linspace(
                parts[0].trim().parse().context("grid start")?,
                parts[1].trim().parse().context("grid stop")?,
                parts[2].trim().parse().context("grid points")?,
            ));
        }
        Ok(Grid::Values(parse_list(s)?))
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number \"{x}\""))
        })
        .collect()
}

fn default_j() -> f64 {
    1.0
}

fn default_boundary() -> BoundaryKey {
    BoundaryKey::Open
}

fn default_pert() -> PertConfig {
    PertConfig::None
}

fn default_analysis() -> Analysis {
    Analysis::Spectrum
}

fn default_output_dir() -> String {
    "ptchain-out".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n_sites: usize,
    #[serde(rename = "J", default = "default_j")]
    pub coupling_j: f64,
    #[serde(default)]
    pub hz: f64,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryKey,
    #[serde(default = "default_pert")]
    pub pert: PertConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Pairs>,
    #[serde(default = "default_analysis")]
    pub analysis: Analysis,
    /// Strength for `spectrum`.
    #[serde(default)]
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hz_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_plus_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_minus_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_axes: Option<PhaseAxes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hz_samples: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snap_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_points: Option<usize>,
    #[serde(default)]
    pub detect_reentrance: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

/// Parses and validates a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).context("config is not valid JSON")?;
    from_value(value)
}

/// Like [`parse_config`] on an already-parsed document.
pub fn from_value(value: Value) -> Result<RunConfig> {
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            anyhow!("{}", e.inner())
        } else {
            anyhow!("key \"{path}\": {}", e.inner())
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn chain(&self) -> Result<SpinChain64> {
        SpinChain64::new(self.n_sites, self.coupling_j, self.hz, self.boundary.into())
            .map_err(|e| anyhow!("keys \"N\"/\"J\"/\"hz\"/\"boundary\": {e}"))
    }

    /// Energy unit for outputs: `J` when positive, otherwise 1.
    pub fn energy_unit(&self) -> f64 {
        if self.coupling_j > 0.0 {
            self.coupling_j
        } else {
            1.0
        }
    }

    /// Perturbations covered by this run, in output order.
    pub fn batch(&self) -> Result<Vec<Perturbation64>> {
        let n = self.n_sites;
        let single = matches!(self.pert, PertConfig::SingleSite { .. });
        let list = match (&self.pert, &self.pairs) {
            (PertConfig::None, None) => vec![Perturbation64::None],
            (PertConfig::None, Some(_)) => bail!("key \"pairs\": needs a perturbation in \"pert\""),
            (pert, None) => {
                let (p, q) = pert.sites();
                let p =
                    p.ok_or_else(|| anyhow!("key \"pert.p\": required unless \"pairs\" is set"))?;
                let q =
                    q.ok_or_else(|| anyhow!("key \"pert.q\": required unless \"pairs\" is set"))?;
                vec![pert.resolve(p, q)]
            }
            (pert, Some(Pairs::All(_))) if single => (1..=n).map(|p| pert.resolve(p, p)).collect(),
            (pert, Some(Pairs::All(_))) => (1..=n)
                .flat_map(|p| (1..=n).map(move |q| (p, q)))
                .map(|(p, q)| pert.resolve(p, q))
                .collect(),
            (pert, Some(Pairs::List(v))) => {
                if single && v.iter().any(|(p, q)| p != q) {
                    bail!("key \"pairs\": single-site entries must have p = q");
                }
                v.iter().map(|&(p, q)| pert.resolve(p, q)).collect()
            }
        };
        Ok(list)
    }

    pub fn single(&self) -> Result<Perturbation64> {
        let b = self.batch()?;
        match b.as_slice() {
            [p] => Ok(*p),
            _ => bail!(
                "analysis \"{}\" takes a single perturbation; remove \"pairs\"",
                self.analysis
            ),
        }
    }

    pub fn search(&self, chain: &SpinChain64) -> ThresholdSearch<f64> {
        let d = ThresholdSearch::for_chain(chain);
        ThresholdSearch {
            gamma_max: self.gamma_max.unwrap_or(d.gamma_max),
            tol: self.tol.unwrap_or(d.tol),
            snap_tol: self.snap_tol.unwrap_or(DEFAULT_SNAP_TOL),
            scan_points: self.scan_points.unwrap_or(DEFAULT_SCAN_POINTS),
            detect_reentrance: self.detect_reentrance,
        }
    }

    pub fn snap(&self) -> f64 {
        self.snap_tol.unwrap_or(DEFAULT_SNAP_TOL)
    }

    pub fn gamma_grid(&self) -> Vec<f64> {
        let unit = self.energy_unit();
        let max = self.gamma_max.unwrap_or(2.0 * unit);
        self.gamma_grid
            .clone()
            .unwrap_or(Grid::linspace(0.0, max, 41))
            .values()
    }

    pub fn hz_grid(&self) -> Vec<f64> {
        let unit = self.energy_unit();
        self.hz_grid
            .clone()
            .unwrap_or(Grid::linspace(0.0, unit, 21))
            .values()
    }

    pub fn gamma_plus_grid(&self) -> Vec<f64> {
        let unit = self.energy_unit();
        self.gamma_plus_grid
            .clone()
            .unwrap_or(Grid::linspace(-unit, unit, 41))
            .values()
    }

    pub fn gamma_minus_grid(&self) -> Vec<f64> {
        let unit = self.energy_unit();
        self.gamma_minus_grid
            .clone()
            .unwrap_or(Grid::linspace(-unit, unit, 41))
            .values()
    }

    pub fn hz_samples(&self) -> Vec<f64> {
        let unit = self.energy_unit();
        self.hz_samples.clone().unwrap_or_else(|| {
            [0.02, 0.04, 0.06, 0.08, 0.1]
                .iter()
                .map(|h| h * unit)
                .collect()
        })
    }

    pub fn phase_axes(&self) -> PhaseAxes {
        self.phase_axes.unwrap_or(match self.pert {
            PertConfig::SingleSite { .. } => PhaseAxes::GammaPlusMinus,
            _ => PhaseAxes::GammaHz,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let chain = self.chain()?;
        for (key, v) in [("gamma_max", self.gamma_max), ("tol", self.tol)] {
            if let Some(x) = v {
                if x <= 0.0 || !x.is_finite() {
                    bail!("key \"{key}\": must be finite and > 0, got {x}");
                }
            }
        }
        if let Some(x) = self.snap_tol {
            if x < 0.0 || !x.is_finite() {
                bail!("key \"snap_tol\": must be finite and >= 0, got {x}");
            }
        }
        if self.scan_points == Some(0) {
            bail!("key \"scan_points\": must be >= 1");
        }
        if self.jobs == Some(0) {
            bail!("key \"jobs\": must be >= 1");
        }
        if !self.gamma.is_finite() {
            bail!("key \"gamma\": must be finite");
        }
        for (key, g) in [
            ("gamma_grid", &self.gamma_grid),
            ("hz_grid", &self.hz_grid),
            ("gamma_plus_grid", &self.gamma_plus_grid),
            ("gamma_minus_grid", &self.gamma_minus_grid),
        ] {
            if let Some(g) = g {
                g.check(key)?;
            }
        }
        if let Some(g) = &self.gamma_grid {
            if g.values()[0] < 0.0 {
                bail!("key \"gamma_grid\": strengths must be >= 0");
            }
        }
        if let Some(h) = &self.hz_samples {
            if h.is_empty() || h.iter().any(|x| *x <= 0.0 || !x.is_finite()) {
                bail!("key \"hz_samples\": needs finite values > 0");
            }
        }
        for pert in self.batch()? {
            pert.validate(&chain)
                .map_err(|e| anyhow!("key \"pert\": {e}"))?;
        }
        if self.analysis == Analysis::PhaseGrid
            && self.phase_axes() == PhaseAxes::GammaPlusMinus
            && !matches!(self.pert, PertConfig::SingleSite { .. })
        {
            bail!("key \"phase_axes\": gamma_plus_minus needs a single_site perturbation");
        }
        Ok(())
    }
}
