//! Experiment configuration: a TOML document with a fixed schema.
//!
//! Unknown keys are rejected. Any key can be overridden from the command line
//! with `--set dotted.key=<toml value>` before the document is validated.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use ccmc_core::{LinkSign, MhOptions, QaoaOptimizeOptions, SdpOptions, WeightSet};
use serde::{Deserialize, Serialize};

/// Lambda-scale grid used when a correlation-guided run does not fix one.
pub const DEFAULT_LAMBDA_GRID: [f64; 11] = [0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 7.5, 10.0];
/// Integer grid for QAOA-guided runs.
pub const DEFAULT_QAOA_LAMBDA_GRID: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub instances: InstanceSpec,
    pub runs: Vec<RunSpec>,
    /// Iteration budgets as multiples of `n`.
    #[serde(default = "default_budgets")]
    pub budgets: Vec<u64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_beta_f")]
    pub beta_f: f64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub reference: ReferenceMethod,
    #[serde(default)]
    pub link_sign: SignSpec,
    #[serde(default)]
    pub tuning: TuningSpec,
    #[serde(default)]
    pub acceptance: AcceptanceSpec,
    #[serde(default)]
    pub mh: MhSpec,
    #[serde(default)]
    pub sdp: SdpSpec,
    #[serde(default)]
    pub qaoa: QaoaSpec,
}

fn default_name() -> String {
    "bench".into()
}

fn default_budgets() -> Vec<u64> {
    vec![100]
}

fn default_reps() -> usize {
    100
}

fn default_beta_f() -> f64 {
    8.0
}

/// Either a generated suite of random regular graphs or explicit instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub n: Option<usize>,
    pub degree: Option<usize>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub weights: WeightSpec,
    /// Generator seed; defaults to the experiment seed.
    pub seed: Option<u64>,
    #[serde(default)]
    pub files: Vec<PathBuf>,
}

fn default_count() -> usize {
    1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSpec {
    #[default]
    Pm1,
    Unit,
}

impl From<WeightSpec> for WeightSet {
    fn from(w: WeightSpec) -> Self {
        match w {
            WeightSpec::Pm1 => WeightSet::PlusMinusOne,
            WeightSpec::Unit => WeightSet::Unit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sa,
    Ca,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sa => "SA",
            Self::Ca => "CA",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Cc,
    Random,
    Mc,
    Sdp,
    /// Statevector QAOA.
    Qaoa,
    /// Closed-form depth-one QAOA.
    QaoaP1,
}

impl SourceKind {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Cc => "CC",
            Self::Random => "RANDOM",
            Self::Mc => "MC",
            Self::Sdp => "SDP",
            Self::Qaoa => "QAOA",
            Self::QaoaP1 => "QAOA-P1",
        }
    }

    pub fn is_qaoa(self) -> bool {
        matches!(self, Self::Qaoa | Self::QaoaP1)
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One line of the experiment: a method, its guidance and parameter lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub method: Method,
    pub source: Option<SourceKind>,
    /// Sampling inverse temperatures for `mc`.
    #[serde(default)]
    pub beta_s: Vec<f64>,
    /// Circuit depths for `qaoa` (and `qaoa-p1`, where only 1 is valid).
    #[serde(default)]
    pub depth: Vec<usize>,
    /// Constant link probability for `random`.
    pub p_const: Option<f64>,
    /// Fixed scales; empty means tune over the grid.
    #[serde(default)]
    pub lambda_scale: Vec<f64>,
    pub link_sign: Option<SignSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignSpec {
    #[default]
    Literal,
    Aligned,
}

impl From<SignSpec> for LinkSign {
    fn from(s: SignSpec) -> Self {
        match s {
            SignSpec::Literal => LinkSign::Literal,
            SignSpec::Aligned => LinkSign::Aligned,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMethod {
    /// Exhaustive search up to its size limit, long annealing beyond.
    #[default]
    Auto,
    BruteForce,
    LongSa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningSpec {
    /// Budget multiple of `n` used while tuning.
    #[serde(default = "default_tune_budget")]
    pub budget: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_qaoa_grid")]
    pub qaoa_grid: Vec<f64>,
}

fn default_tune_budget() -> u64 {
    100
}

fn default_grid() -> Vec<f64> {
    DEFAULT_LAMBDA_GRID.to_vec()
}

fn default_qaoa_grid() -> Vec<f64> {
    DEFAULT_QAOA_LAMBDA_GRID.to_vec()
}

impl Default for TuningSpec {
    fn default() -> Self {
        Self {
            budget: default_tune_budget(),
            reps: default_reps(),
            grid: default_grid(),
            qaoa_grid: default_qaoa_grid(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceSpec {
    #[serde(default)]
    pub record: bool,
    /// Budget multiple whose runs are logged; defaults to the largest budget.
    pub budget: Option<u64>,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

fn default_window() -> [f64; 2] {
    [1.0, 8.0]
}

impl Default for AcceptanceSpec {
    fn default() -> Self {
        Self {
            record: false,
            budget: None,
            window: default_window(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhSpec {
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_burn_in() -> usize {
    MhOptions::default().burn_in
}

fn default_thin() -> usize {
    MhOptions::default().thin
}

fn default_samples() -> usize {
    MhOptions::default().n_samples
}

impl Default for MhSpec {
    fn default() -> Self {
        Self {
            burn_in: default_burn_in(),
            thin: default_thin(),
            samples: default_samples(),
        }
    }
}

impl From<&MhSpec> for MhOptions {
    fn from(m: &MhSpec) -> Self {
        Self {
            burn_in: m.burn_in,
            thin: m.thin,
            n_samples: m.samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdpSpec {
    pub rank: Option<usize>,
    #[serde(default = "default_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_sweeps() -> usize {
    SdpOptions::default().max_sweeps
}

fn default_tol() -> f64 {
    SdpOptions::default().tol
}

impl Default for SdpSpec {
    fn default() -> Self {
        Self {
            rank: None,
            max_sweeps: default_sweeps(),
            tol: default_tol(),
        }
    }
}

impl From<&SdpSpec> for SdpOptions {
    fn from(s: &SdpSpec) -> Self {
        Self {
            rank: s.rank,
            max_sweeps: s.max_sweeps,
            tol: s.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaSpec {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    pub max_iter: Option<usize>,
}

fn default_restarts() -> usize {
    QaoaOptimizeOptions::default().restarts
}

impl Default for QaoaSpec {
    fn default() -> Self {
        Self {
            restarts: default_restarts(),
            max_iter: None,
        }
    }
}

impl From<&QaoaSpec> for QaoaOptimizeOptions {
    fn from(q: &QaoaSpec) -> Self {
        Self {
            restarts: q.restarts,
            max_iter: q.max_iter,
            ..Default::default()
        }
    }
}

/// Scale choice for one arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaChoice {
    NotApplicable,
    Fixed(f64),
    Tuned,
}

/// Source parameter: `beta_s`, depth or constant probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceParam {
    None,
    BetaS(f64),
    Depth(usize),
    PConst(f64),
}

impl fmt::Display for SourceParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => Ok(()),
            Self::BetaS(b) => write!(f, "{b}"),
            Self::Depth(p) => write!(f, "{p}"),
            Self::PConst(p) => write!(f, "{p}"),
        }
    }
}

/// A fully expanded method/source/parameter/scale combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    /// Index of the originating [`RunSpec`].
    pub spec: usize,
    pub method: Method,
    pub source: Option<SourceKind>,
    pub param: SourceParam,
    pub lambda: LambdaChoice,
    pub sign: LinkSign,
}

impl Arm {
    pub fn source_tag(&self) -> &'static str {
        self.source.map_or("NONE", SourceKind::tag)
    }

    /// Key identifying the correlation matrix this arm needs.
    pub fn correlation_key(&self) -> Option<(usize, SourceKind, String)> {
        self.source.map(|s| (self.spec, s, self.param.to_string()))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text`, applies `key=value` overrides, then validates.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = toml::from_str(text).context("config is not valid TOML")?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = doc.try_into().context("config does not match the schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml_with(&text, overrides)?;
        // relative instance paths are relative to the config file
        if let Some(dir) = path.parent() {
            for f in &mut cfg.instances.files {
                if f.is_relative() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let inst = &self.instances;
        let generated = inst.n.is_some() || inst.degree.is_some();
        ensure!(
            generated != !inst.files.is_empty(),
            "instances: give either n and degree, or files, not both"
        );
        if generated {
            ensure!(inst.n.is_some() && inst.degree.is_some(), "instances: n and degree are both required");
            ensure!(inst.count >= 1, "instances.count must be at least 1");
        }
        ensure!(!self.budgets.is_empty(), "budgets must not be empty");
        ensure!(self.budgets.iter().all(|&b| b >= 1), "budgets are multiples of n and must be at least 1");
        ensure!(self.beta_f > 0.0 && self.beta_f.is_finite(), "beta_f must be positive");
        ensure!(!self.runs.is_empty(), "at least one [[runs]] entry is required");
        let [lo, hi] = self.acceptance.window;
        ensure!(lo <= hi, "acceptance.window must be [low, high]");
        if let Some(b) = self.acceptance.budget {
            ensure!(self.budgets.contains(&b), "acceptance.budget {b} is not among budgets");
        }
        ensure!(self.tuning.budget >= 1, "tuning.budget must be at least 1");
        ensure!(!self.tuning.grid.is_empty() && !self.tuning.qaoa_grid.is_empty(), "tuning grids must not be empty");
        for (k, r) in self.runs.iter().enumerate() {
            r.validate().with_context(|| format!("runs[{k}]"))?;
        }
        Ok(())
    }

    /// Expands every run spec into its arms, in config order.
    pub fn arms(&self) -> Vec<Arm> {
        let mut out = Vec::new();
        for (spec, r) in self.runs.iter().enumerate() {
            let sign: LinkSign = r.link_sign.unwrap_or(self.link_sign).into();
            let params: Vec<SourceParam> = match r.source {
                None => vec![SourceParam::None],
                Some(SourceKind::Mc) => r.beta_s.iter().map(|&b| SourceParam::BetaS(b)).collect(),
                Some(SourceKind::QaoaP1) if r.depth.is_empty() => vec![SourceParam::Depth(1)],
                Some(SourceKind::Qaoa | SourceKind::QaoaP1) => r.depth.iter().map(|&p| SourceParam::Depth(p)).collect(),
                Some(SourceKind::Random) => vec![SourceParam::PConst(r.p_const.unwrap_or(0.2))],
                Some(SourceKind::Cc | SourceKind::Sdp) => vec![SourceParam::None],
            };
            let lambdas: Vec<LambdaChoice> = match (r.method, r.source) {
                (Method::Sa, _) | (_, Some(SourceKind::Random)) => vec![LambdaChoice::NotApplicable],
                _ if r.lambda_scale.is_empty() => vec![LambdaChoice::Tuned],
                _ => r.lambda_scale.iter().map(|&l| LambdaChoice::Fixed(l)).collect(),
            };
            for &param in &params {
                for &lambda in &lambdas {
                    out.push(Arm {
                        spec,
                        method: r.method,
                        source: r.source,
                        param,
                        lambda,
                        sign,
                    });
                }
            }
        }
        out
    }

    /// Budget multiple whose runs feed the acceptance log.
    pub fn acceptance_budget(&self) -> u64 {
        self.acceptance
            .budget
            .unwrap_or_else(|| *self.budgets.iter().max().expect("validated"))
    }
}

impl RunSpec {
    fn validate(&self) -> Result<()> {
        match (self.method, self.source) {
            (Method::Sa, Some(_)) => bail!("sa takes no correlation source"),
            (Method::Ca, None) => bail!("ca needs a source"),
            _ => {}
        }
        let src = self.source;
        ensure!(
            self.beta_s.is_empty() || src == Some(SourceKind::Mc),
            "beta_s only applies to the mc source"
        );
        ensure!(self.depth.is_empty() || src.is_some_and(SourceKind::is_qaoa), "depth only applies to qaoa sources");
        ensure!(
            self.p_const.is_none() || src == Some(SourceKind::Random),
            "p_const only applies to the random source"
        );
        match src {
            Some(SourceKind::Mc) => {
                ensure!(!self.beta_s.is_empty(), "mc needs at least one beta_s");
                ensure!(self.beta_s.iter().all(|b| *b >= 0.0 && b.is_finite()), "beta_s must be non-negative");
            }
            Some(SourceKind::Qaoa) => {
                ensure!(!self.depth.is_empty(), "qaoa needs at least one depth");
                ensure!(
                    self.depth.iter().all(|&p| (1..=ccmc_core::quantum::QAOA_MAX_DEPTH).contains(&p)),
                    "qaoa depth out of range"
                );
            }
            Some(SourceKind::QaoaP1) => {
                ensure!(self.depth.iter().all(|&p| p == 1), "qaoa-p1 is depth one only");
            }
            Some(SourceKind::Random) => {
                let p = self.p_const.unwrap_or(0.2);
                ensure!((0.0..=1.0).contains(&p), "p_const must lie in [0, 1]");
            }
            _ => {}
        }
        ensure!(
            self.lambda_scale.iter().all(|l| *l >= 0.0 && l.is_finite()),
            "lambda_scale must be non-negative"
        );
        Ok(())
    }
}

/// Sets `a.b.c = value` in `doc`, creating tables along the way.
///
/// `value` is parsed as a TOML value; bare words fall back to strings.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .with_context(|| format!("override {assignment:?} is not key=value"))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    ensure!(parts.iter().all(|p| !p.is_empty()), "bad override key {key:?}");
    let (last, path) = parts.split_last().expect("non-empty");
    let mut table = doc;
    for p in path {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => bail!("override {key:?}: {p:?} is not a table"),
        };
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
