//! Configuration-driven verification runs and their reports.
//!
//! A run takes one JSON config document, executes the named experiment, and
//! produces a JSON report plus CSV tables. Every asserted quantity is
//! recorded with its tolerance; the run passes iff all assertions pass.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{box_partition, Axis, Partition, ProductGrid, SampledFunction, WeightFunction};
use crate::hermite::{self, SpectralFunction};
use crate::io::{self, DataFormat, GridDescriptor};
use crate::mixed_norm::{self, ExponentTuple, WeightConvention};
use crate::nuclear::{NormDescriptor, NuclearRepresentation, DEFAULT_DIMENSION_CAP};
use crate::report::{eigenvalue_csv, SpectralReport};
use crate::timefreq::{self, TfGrid, Window};
use crate::torus::{self, FrequencyCutoff, Multiplier};
use crate::variable_exponent::{self, VariableExponent};

pub const SCHEMA_VERSION: &str = "1";

/// Exit status of the command-line runner.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

// ---------------------------------------------------------------------------
// Config

/// A sampled function declared in a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FunctionSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// `amplitude · e^{-|x - center|²/(2 width²)}`.
    Gaussian {
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `offset + amplitude · cos(2π k·x)`.
    Cosine {
        #[serde(default)]
        offset: f64,
        #[serde(default = "one")]
        amplitude: f64,
        frequencies: Vec<f64>,
    },
    /// `amplitude · sin(2π k·x) / (2π |k|)`, Lipschitz constant `amplitude`.
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
        frequencies: Vec<f64>,
    },
    /// `e^{2πi k·x}`.
    Character { frequencies: Vec<f64> },
    /// `e^{-Σ a_j x_j}`.
    Exponential { rates: Vec<f64> },
    /// Independent uniform samples in `[-1, 1] + i[-1, 1]` (or real) from the run seed.
    Random {
        #[serde(default)]
        real: bool,
    },
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn sample(&self, grid: &Arc<ProductGrid>, rng: &mut ChaCha8Rng, base: &Path) -> Result<SampledFunction> {
        let dot = |k: &[f64], x: &[f64]| -> Result<f64> {
            if k.len() != x.len() {
                return Err(Error::DimensionMismatch { expected: x.len(), got: k.len() });
            }
            Ok(k.iter().zip(x).map(|(a, b)| a * b).sum())
        };
        let d = grid.dims();
        let check_len = |v: &[f64]| {
            if v.len() == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: d, got: v.len() })
            }
        };
        match self {
            FunctionSpec::Constant { re, im } => Ok(SampledFunction::constant(grid.clone(), Complex64::new(*re, *im))),
            FunctionSpec::Gaussian { width, center, amplitude } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidParameter(format!("Gaussian width {width} must be positive")));
                }
                let c = center.clone().unwrap_or_else(|| vec![0.0; d]);
                check_len(&c)?;
                SampledFunction::from_real_fn(grid.clone(), |x| {
                    let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                    amplitude * (-r2 / (2.0 * width * width)).exp()
                })
            }
            FunctionSpec::Cosine { offset, amplitude, frequencies } => {
                check_len(frequencies)?;
                SampledFunction::from_real_fn(grid.clone(), |x| offset + amplitude * (2.0 * PI * dot(frequencies, x).unwrap()).cos())
            }
            FunctionSpec::Sine { amplitude, frequencies } => {
                check_len(frequencies)?;
                let norm = 2.0 * PI * frequencies.iter().map(|k| k * k).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::InvalidParameter("sine frequencies must not all vanish".into()));
                }
                SampledFunction::from_real_fn(grid.clone(), |x| amplitude * (2.0 * PI * dot(frequencies, x).unwrap()).sin() / norm)
            }
            FunctionSpec::Character { frequencies } => {
                check_len(frequencies)?;
                SampledFunction::from_fn(grid.clone(), |x| Complex64::from_polar(1.0, 2.0 * PI * dot(frequencies, x).unwrap()))
            }
            FunctionSpec::Exponential { rates } => {
                check_len(rates)?;
                SampledFunction::from_real_fn(grid.clone(), |x| (-dot(rates, x).unwrap()).exp())
            }
            FunctionSpec::Random { real } => {
                let values = (0..grid.node_count())
                    .map(|_| {
                        let re = rng.gen_range(-1.0..=1.0);
                        let im = if *real { 0.0 } else { rng.gen_range(-1.0..=1.0) };
                        Complex64::new(re, im)
                    })
                    .collect();
                SampledFunction::new(grid.clone(), values)
            }
            FunctionSpec::File { path } => {
                let f = io::read_function(&base.join(path))?;
                if **f.grid() != **grid {
                    return Err(Error::GridMismatch);
                }
                SampledFunction::new(grid.clone(), f.into_values())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WeightSpec {
    Unit,
    /// `(1 + |x|²)^{s/2}`.
    Polynomial { s: f64 },
    /// `∏ (1 + |x_j|)^{β_j}`.
    Moderate { betas: Vec<f64> },
    /// `e^{-Σ a_j x_j}`.
    Exponential { rates: Vec<f64> },
    File { path: PathBuf },
}

impl WeightSpec {
    fn build(&self, grid: &Arc<ProductGrid>, base: &Path) -> Result<WeightFunction> {
        match self {
            WeightSpec::Unit => Ok(WeightFunction::unit(grid.clone())),
            WeightSpec::Polynomial { s } => WeightFunction::polynomial(grid.clone(), *s),
            WeightSpec::Moderate { betas } => WeightFunction::moderate(grid.clone(), betas),
            WeightSpec::Exponential { rates } => {
                if rates.len() != grid.dims() {
                    return Err(Error::DimensionMismatch { expected: grid.dims(), got: rates.len() });
                }
                WeightFunction::from_fn(grid.clone(), |x| (-rates.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).exp())
            }
            WeightSpec::File { path } => {
                let (g, values) = io::read_real(&base.join(path))?;
                if g != **grid {
                    return Err(Error::GridMismatch);
                }
                WeightFunction::new(grid.clone(), values)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ExponentSpec {
    Constant { p: f64 },
    /// `base + slope·x`.
    Linear { base: f64, slope: Vec<f64> },
    /// `mean + amplitude · sin(2π frequency x_0)`.
    Sinusoid { mean: f64, amplitude: f64, frequency: f64 },
    File { path: PathBuf },
}

impl ExponentSpec {
    fn build(&self, grid: &Arc<ProductGrid>, base: &Path) -> Result<VariableExponent> {
        match self {
            ExponentSpec::Constant { p } => VariableExponent::constant(grid.clone(), *p),
            ExponentSpec::Linear { base: b, slope } => {
                if slope.len() != grid.dims() {
                    return Err(Error::DimensionMismatch { expected: grid.dims(), got: slope.len() });
                }
                VariableExponent::from_fn(grid.clone(), |x| b + slope.iter().zip(x).map(|(a, c)| a * c).sum::<f64>())
            }
            ExponentSpec::Sinusoid { mean, amplitude, frequency } => {
                VariableExponent::from_fn(grid.clone(), |x| mean + amplitude * (2.0 * PI * frequency * x[0]).sin())
            }
            ExponentSpec::File { path } => {
                let p = io::read_exponent(&base.join(path))?;
                if **p.grid() != **grid {
                    return Err(Error::GridMismatch);
                }
                VariableExponent::new(grid.clone(), p.values().to_vec())
            }
        }
    }
}

/// Norm of a function space in a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SpaceSpec {
    Mixed {
        exponents: Vec<f64>,
        #[serde(default = "unit_weight")]
        weight: WeightSpec,
        #[serde(default)]
        convention: WeightConvention,
    },
    Variable { exponent: ExponentSpec },
}

fn unit_weight() -> WeightSpec {
    WeightSpec::Unit
}

impl SpaceSpec {
    fn build(&self, grid: &Arc<ProductGrid>, base: &Path) -> Result<NormDescriptor> {
        Ok(match self {
            SpaceSpec::Mixed { exponents, weight, convention } => NormDescriptor::Mixed {
                exponents: ExponentTuple::new(exponents.clone())?,
                weight: weight.build(grid, base)?,
                convention: *convention,
            },
            SpaceSpec::Variable { exponent } => NormDescriptor::Variable(exponent.build(grid, base)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConfig {
    pub grid: GridDescriptor,
    pub function: FunctionSpec,
    pub exponents: Vec<f64>,
    #[serde(default = "unit_weight")]
    pub weight: WeightSpec,
    #[serde(default)]
    pub convention: WeightConvention,
    /// Optional test function for the duality pairing `|∫fh| ≤ ‖f‖ ‖h‖'`.
    #[serde(default)]
    pub dual_function: Option<FunctionSpec>,
    #[serde(default)]
    pub expected: Option<f64>,
    /// Box counts per axis for the σ-finiteness ledger.
    #[serde(default)]
    pub partition: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LuxemburgConfig {
    pub grid: GridDescriptor,
    pub function: FunctionSpec,
    pub exponent: ExponentSpec,
    #[serde(default)]
    pub expected: Option<f64>,
    /// Optional second function for the Hölder inequality.
    #[serde(default)]
    pub dual_function: Option<FunctionSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StftConfig {
    #[serde(default = "one_usize")]
    pub dims: usize,
    pub half_width: f64,
    pub nodes: usize,
    #[serde(default = "default_gaussian")]
    pub function: FunctionSpec,
    #[serde(default = "one")]
    pub window_width: f64,
    /// Also run with twice the nodes on the same box and report the ratio.
    #[serde(default)]
    pub refine: bool,
    /// `(p, q, s)` for the Wiener amalgam against modulation norm comparison.
    #[serde(default)]
    pub amalgam: Option<[f64; 3]>,
    #[serde(default)]
    pub dump_plane: bool,
}

fn one_usize() -> usize {
    1
}

fn default_gaussian() -> FunctionSpec {
    FunctionSpec::Gaussian { width: 1.0, center: None, amplitude: 1.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MapSetting {
    /// Mixed norm with a weight drawn box-constant on each partition.
    Mixed {
        exponents: Vec<f64>,
        #[serde(default)]
        convention: WeightConvention,
        /// Box values drawn log-uniformly from this range.
        #[serde(default = "weight_range")]
        weight_range: [f64; 2],
    },
    /// Variable exponent drawn box-constant on each partition.
    Variable {
        #[serde(default = "exponent_range")]
        exponent_range: [f64; 2],
    },
}

fn weight_range() -> [f64; 2] {
    [0.1, 10.0]
}

fn exponent_range() -> [f64; 2] {
    [1.0, 4.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDemoConfig {
    pub grid: GridDescriptor,
    /// Boxes per axis at each level, e.g. `[1, 2, 4, …]`.
    pub levels: Vec<usize>,
    pub setting: MapSetting,
    /// Function whose approximation error is tracked across levels.
    pub function: FunctionSpec,
    /// Random functions checked for contraction at every level.
    #[serde(default)]
    pub random_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearTraceConfig {
    /// Number of random representations (ignored when `manifest` is set).
    #[serde(default)]
    pub cases: usize,
    #[serde(default = "default_max_rank")]
    pub max_rank: usize,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

fn default_max_rank() -> usize {
    10
}

fn default_max_nodes() -> usize {
    128
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

/// Multiplier declared by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SymbolSpec {
    Bessel { tau: f64 },
    CustomTable { entries: Vec<TableEntry> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub xi: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl SymbolSpec {
    fn build(&self, dims: usize) -> Result<Multiplier> {
        match self {
            SymbolSpec::Bessel { tau } => Ok(Multiplier::Bessel(torus::bessel_symbol(*tau, dims)?)),
            SymbolSpec::CustomTable { entries } => {
                let mut t = BTreeMap::new();
                for e in entries {
                    if e.xi.len() != dims {
                        return Err(Error::DimensionMismatch { expected: dims, got: e.xi.len() });
                    }
                    if !(e.re.is_finite() && e.im.is_finite()) {
                        return Err(Error::InvalidParameter("symbol table entries must be finite".into()));
                    }
                    t.insert(e.xi.clone(), Complex64::new(e.re, e.im));
                }
                Ok(Multiplier::Table(t))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusConfig {
    #[serde(default = "one_usize")]
    pub dims: usize,
    pub cutoff: usize,
    /// Nodes per axis of the torus grid; defaults to `4N + 4`.
    #[serde(default)]
    pub nodes: Option<usize>,
    pub alpha: FunctionSpec,
    pub symbol: SymbolSpec,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
    /// Require `‖MM* - M*M‖_max` above this value.
    #[serde(default)]
    pub min_non_normality: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SpectralSpec {
    Exponential { rate: f64 },
    Power { beta: f64 },
    Indicator { lambda: f64 },
}

impl SpectralSpec {
    fn build(&self) -> Result<SpectralFunction> {
        match self {
            SpectralSpec::Exponential { rate } => SpectralFunction::exponential(*rate),
            SpectralSpec::Power { beta } => SpectralFunction::power(*beta),
            SpectralSpec::Indicator { lambda } => Ok(SpectralFunction::indicator(*lambda)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub r: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteConfig {
    #[serde(default = "one_usize")]
    pub dims: usize,
    pub max_degree: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_hermite_nodes")]
    pub nodes: usize,
    pub function: SpectralSpec,
    #[serde(default)]
    pub criterion: Option<CriterionSpec>,
}

fn default_half_width() -> f64 {
    12.0
}

fn default_hermite_nodes() -> usize {
    512
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerConfig {
    #[serde(default = "one_usize")]
    pub dims: usize,
    /// Cutoffs, typically successive octaves.
    pub cutoffs: Vec<usize>,
    pub tau: f64,
    pub r: f64,
    #[serde(default = "default_alpha")]
    pub alpha: FunctionSpec,
    #[serde(default = "l2_space")]
    pub source: SpaceSpec,
    #[serde(default = "l2_space")]
    pub target: SpaceSpec,
    /// Require increments to shrink by at least this factor per octave when `rτ > n`.
    #[serde(default)]
    pub min_shrink_convergent: Option<f64>,
    /// Require increments to shrink by less than this factor per octave when `rτ ≤ n`.
    #[serde(default)]
    pub max_shrink_divergent: Option<f64>,
}

fn default_alpha() -> FunctionSpec {
    FunctionSpec::Constant { re: 1.0, im: 0.0 }
}

fn l2_space() -> SpaceSpec {
    SpaceSpec::Mixed { exponents: vec![2.0], weight: WeightSpec::Unit, convention: WeightConvention::Pointwise }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Experiment {
    Norm(NormConfig),
    Luxemburg(LuxemburgConfig),
    StftCheck(StftConfig),
    MapDemo(MapDemoConfig),
    NuclearTrace(NuclearTraceConfig),
    TorusVerify(TorusConfig),
    HermiteVerify(HermiteConfig),
    NuclearityLedger(LedgerConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Norm(_) => "norm",
            Experiment::Luxemburg(_) => "luxemburg",
            Experiment::StftCheck(_) => "stft-check",
            Experiment::MapDemo(_) => "map-demo",
            Experiment::NuclearTrace(_) => "nuclear-trace",
            Experiment::TorusVerify(_) => "torus-verify",
            Experiment::HermiteVerify(_) => "hermite-verify",
            Experiment::NuclearityLedger(_) => "nuclearity-ledger",
        }
    }
}

/// One experiment: the JSON document accepted by the runner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    /// Overrides for named default tolerances.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub experiment: Experiment,
}

impl ExperimentConfig {
    /// Parse and validate a config document. `kind` (the subcommand) is
    /// inserted when the document omits it and must match when present.
    pub fn parse(text: &str, kind: Option<&str>) -> Result<Self> {
        let mut v: Value = serde_json::from_str(text)?;
        let obj = v.as_object_mut().ok_or_else(|| Error::Format("config must be a JSON object".into()))?;
        if let Some(k) = kind {
            match obj.get("kind").and_then(Value::as_str) {
                None => {
                    obj.insert("kind".into(), Value::String(k.into()));
                }
                Some(existing) if existing != k => {
                    return Err(Error::Format(format!("config declares kind '{existing}' but '{k}' was requested")));
                }
                _ => {}
            }
        }
        let cfg: ExperimentConfig = serde_json::from_value(v)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema '{}', expected '{SCHEMA_VERSION}'", self.schema)));
        }
        for (name, t) in &self.tolerances {
            if !(t.is_finite() && *t > 0.0) {
                return Err(Error::InvalidParameter(format!("tolerance '{name}' = {t} must be positive")));
            }
        }
        match &self.experiment {
            Experiment::TorusVerify(c) => {
                if let SymbolSpec::Bessel { tau } = c.symbol {
                    torus::bessel_symbol(tau, c.dims)?;
                }
            }
            Experiment::NuclearityLedger(c) => {
                torus::bessel_symbol(c.tau, c.dims)?;
                if !(c.r > 0.0 && c.r <= 1.0) {
                    return Err(Error::InvalidParameter(format!("order r = {} must lie in (0, 1]", c.r)));
                }
                if c.cutoffs.is_empty() {
                    return Err(Error::InvalidParameter("at least one cutoff is required".into()));
                }
            }
            Experiment::MapDemo(c) => {
                if c.levels.is_empty() {
                    return Err(Error::InvalidParameter("at least one level is required".into()));
                }
            }
            Experiment::HermiteVerify(c) => {
                c.function.build()?;
            }
            Experiment::NuclearTrace(c) => {
                if c.manifest.is_none() && c.cases == 0 {
                    return Err(Error::InvalidParameter("either cases > 0 or a manifest is required".into()));
                }
                if c.max_rank == 0 || c.max_nodes == 0 {
                    return Err(Error::InvalidParameter("max_rank and max_nodes must be positive".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Effective threshold after tolerance scaling.
    pub threshold: f64,
    /// `"<="` or `">="`.
    pub relation: String,
}

/// Tabular output written as `<name>.csv` next to the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub csv: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub kind: String,
    pub version: String,
    pub timestamp: String,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub config: Value,
    pub quantities: Value,
    pub assertions: Vec<Assertion>,
    pub failed_assertions: Vec<String>,
    pub passed: bool,
    pub tables: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_TOLERANCE_FAILURE
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
}

struct Checks {
    scale: f64,
    overrides: BTreeMap<String, f64>,
    list: Vec<Assertion>,
}

impl Checks {
    fn tol(&self, name: &str, default: f64) -> f64 {
        self.overrides.get(name).copied().unwrap_or(default)
    }

    /// `value ≤ tolerance · scale`.
    fn at_most(&mut self, name: &str, value: f64, default: f64) {
        let threshold = self.tol(name, default) * self.scale;
        self.list.push(Assertion {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            relation: "<=".into(),
        });
    }

    /// `value ≥ bound / scale`.
    fn at_least(&mut self, name: &str, value: f64, default: f64) {
        let threshold = self.tol(name, default) / self.scale;
        self.list.push(Assertion {
            name: name.into(),
            passed: value >= threshold,
            value,
            threshold,
            relation: ">=".into(),
        });
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        d / s
    }
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{secs}")
}

/// Run an experiment. `base` resolves relative file paths in the config.
/// `seed` and `tolerance_scale` override the config when given.
pub fn run(config: &ExperimentConfig, seed: Option<u64>, tolerance_scale: f64, base: &Path) -> Result<Outcome> {
    if !(tolerance_scale.is_finite() && tolerance_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance scale {tolerance_scale} must be positive")));
    }
    let seed = seed.unwrap_or(config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Checks { scale: tolerance_scale, overrides: config.tolerances.clone(), list: Vec::new() };
    let mut tables = Vec::new();
    let quantities = match &config.experiment {
        Experiment::Norm(c) => run_norm(c, &mut rng, base, &mut checks)?,
        Experiment::Luxemburg(c) => run_luxemburg(c, &mut rng, base, &mut checks)?,
        Experiment::StftCheck(c) => run_stft(c, &mut rng, base, &mut checks, &mut tables)?,
        Experiment::MapDemo(c) => run_map(c, &mut rng, base, &mut checks, &mut tables)?,
        Experiment::NuclearTrace(c) => run_nuclear(c, &mut rng, base, &mut checks, &mut tables)?,
        Experiment::TorusVerify(c) => run_torus(c, &mut rng, base, &mut checks, &mut tables)?,
        Experiment::HermiteVerify(c) => run_hermite(c, &mut checks, &mut tables)?,
        Experiment::NuclearityLedger(c) => run_ledger(c, &mut rng, base, &mut checks, &mut tables)?,
    };
    let failed_assertions: Vec<String> = checks.list.iter().filter(|a| !a.passed).map(|a| a.name.clone()).collect();
    let mut echo = serde_json::to_value(config)?;
    echo["seed"] = json!(seed);
    let report = Report {
        schema: SCHEMA_VERSION.into(),
        kind: config.experiment.kind().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: timestamp(),
        seed,
        tolerance_scale,
        config: echo,
        quantities,
        passed: failed_assertions.is_empty(),
        failed_assertions,
        assertions: checks.list,
        tables: tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
    };
    Ok(Outcome { report, tables })
}

/// Write `report.json` and the CSV tables into `dir`.
pub fn emit_report(outcome: &Outcome, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    for t in &outcome.tables {
        std::fs::write(dir.join(format!("{}.csv", t.name)), &t.csv)?;
    }
    let path = dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&outcome.report)?)?;
    Ok(path)
}

pub fn read_report(path: &Path) -> Result<Report> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

// ---------------------------------------------------------------------------
// Experiments

fn run_norm(c: &NormConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks) -> Result<Value> {
    let grid = Arc::new(c.grid.build()?);
    let f = c.function.sample(&grid, rng, base)?;
    let p = ExponentTuple::new(c.exponents.clone())?;
    if p.len() != grid.dims() {
        return Err(Error::DimensionMismatch { expected: grid.dims(), got: p.len() });
    }
    let w = c.weight.build(&grid, base)?;
    let norm = mixed_norm::mixed_norm(&f, &p, &w, c.convention)?;
    let dual = mixed_norm::dual_exponents(&p);
    let mut q = json!({
        "norm": norm,
        "exponents": p.entries(),
        "dual_exponents": dual.entries().iter().map(|v| if v.is_finite() { json!(v) } else { json!("inf") }).collect::<Vec<_>>(),
        "convention": c.convention,
        "weight_kind": w.kind(),
    });
    if let Some(e) = c.expected {
        checks.at_most("norm_vs_expected_relative", (norm - e).abs() / e.abs().max(f64::MIN_POSITIVE), 1e-10);
    }
    if let Some(h) = &c.dual_function {
        let h = h.sample(&grid, rng, base)?;
        let descriptor = NormDescriptor::Mixed { exponents: p.clone(), weight: w.clone(), convention: c.convention };
        let hn = descriptor.dual_norm(&h)?;
        let pairing = mixed_norm::dual_pairing(&f, &h)?.norm();
        q["pairing"] = json!(pairing);
        q["dual_norm"] = json!(hn);
        let ratio = if norm * hn > 0.0 { pairing / (norm * hn) } else { 0.0 };
        checks.at_most("holder_ratio", ratio, 1.0 + 1e-12);
    }
    if let Some(counts) = &c.partition {
        let part = box_partition(&grid, counts)?;
        let ledger = crate::grid::triple_is_sigma_finite(&grid, &w, &p, &part, c.convention)?;
        q["sigma_finite"] = serde_json::to_value(&ledger)?;
    }
    Ok(q)
}

fn run_luxemburg(c: &LuxemburgConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks) -> Result<Value> {
    let grid = Arc::new(c.grid.build()?);
    let f = c.function.sample(&grid, rng, base)?;
    let p = c.exponent.build(&grid, base)?;
    let sol = variable_exponent::luxemburg_solve(&f, &p)?;
    let mut q = json!({
        "norm": sol.norm,
        "solver": sol,
        "p_minus": p.p_minus(),
        "p_plus": p.p_plus(),
        "rtol": variable_exponent::LUXEMBURG_RTOL,
    });
    if sol.norm > 0.0 {
        let unit = variable_exponent::modular(&f.scale(Complex64::new(1.0 / sol.norm, 0.0)), &p)?;
        q["modular_at_norm"] = json!(unit);
        checks.at_most("unit_modular", (unit - 1.0).abs(), 1e-8);
    }
    if p.p_minus() == p.p_plus() {
        let lp = variable_exponent::lp_norm(&f, p.p_minus());
        q["classical_lp_norm"] = json!(lp);
        checks.at_most("constant_exponent_vs_lp_relative", (sol.norm - lp).abs() / lp.max(f64::MIN_POSITIVE), 1e-10);
    }
    if let Some(e) = c.expected {
        checks.at_most("norm_vs_expected_relative", (sol.norm - e).abs() / e.abs().max(f64::MIN_POSITIVE), 1e-8);
    }
    if let Some(g) = &c.dual_function {
        let g = g.sample(&grid, rng, base)?;
        let h = variable_exponent::holder_check(&f, &g, &p)?;
        q["holder"] = serde_json::to_value(h)?;
        checks.at_most("holder_ratio", h.ratio, variable_exponent::HOLDER_CONSTANT);
    }
    Ok(q)
}

fn run_stft(c: &StftConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks, tables: &mut Vec<Table>) -> Result<Value> {
    let tf = TfGrid::centered(c.dims, c.half_width, c.nodes)?;
    let f = c.function.sample(tf.space(), rng, base)?;
    let g = Window::gaussian(tf.space().clone(), c.window_width)?;
    let swap = timefreq::fourier_swap_check(&f, &g, &tf)?;
    checks.at_most("fourier_swap_relative_deviation", swap.max_relative_deviation, 1e-6);

    let l2 = timefreq::stft_l2_norm(&f, &g, &tf)?;
    let moyal = (2.0 * PI).powf(c.dims as f64 / 2.0) * variable_exponent::lp_norm(&f, 2.0) * variable_exponent::lp_norm(g.samples(), 2.0);
    checks.at_most("moyal_relative_deviation", (l2 / moyal - 1.0).abs(), 1e-6);

    let mut q = json!({
        "fourier_swap": swap,
        "stft_l2_norm": l2,
        "moyal_value": moyal,
        "window": g.kind(),
        "header": tf.header(),
    });
    if c.refine {
        let tf2 = TfGrid::centered(c.dims, c.half_width, 2 * c.nodes)?;
        let f2 = c.function.sample(tf2.space(), rng, base)?;
        let g2 = Window::gaussian(tf2.space().clone(), c.window_width)?;
        let fine = timefreq::fourier_swap_check(&f2, &g2, &tf2)?;
        let ratio = swap.max_relative_deviation / fine.max_relative_deviation.max(f64::MIN_POSITIVE);
        q["refined"] = serde_json::to_value(&fine)?;
        q["refinement_ratio"] = json!(ratio);
        checks.at_least("refinement_ratio", ratio, 4.0);
    }
    if let Some([p, qq, s]) = c.amalgam {
        let a = timefreq::amalgam_fourier_ratio(&f, &g, &tf, p, qq, s)?;
        checks.at_least("amalgam_ratio_lower", a.ratio, a.band.0);
        checks.at_most("amalgam_ratio_upper", a.ratio, a.band.1);
        q["amalgam"] = serde_json::to_value(a)?;
    }
    if c.dump_plane {
        let v = timefreq::stft(&f, &g, &tf)?;
        let mut csv = String::from("x,xi,abs\n");
        let nx = tf.space().node_count();
        for (i, z) in v.values().iter().enumerate() {
            let (m, k) = (i / nx, i % nx);
            csv.push_str(&format!("{:?},{:?},{:e}\n", tf.space().point(m)[0], tf.freq().point(k)[0], z.norm()));
        }
        tables.push(Table { name: "stft_modulus".into(), csv });
    }
    Ok(q)
}

fn draw_box_values(rng: &mut ChaCha8Rng, n: usize, range: [f64; 2], log: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if log {
                (rng.gen_range(range[0].ln()..=range[1].ln())).exp()
            } else {
                rng.gen_range(range[0]..=range[1])
            }
        })
        .collect()
}

enum MapSpace {
    Mixed(ExponentTuple, WeightFunction, WeightConvention),
    Variable(VariableExponent),
}

impl MapSpace {
    fn norm(&self, f: &SampledFunction) -> Result<f64> {
        match self {
            MapSpace::Mixed(p, w, c) => mixed_norm::mixed_norm(f, p, w, *c),
            MapSpace::Variable(p) => variable_exponent::luxemburg_norm(f, p),
        }
    }

    fn project(&self, f: &SampledFunction, part: &Partition) -> Result<SampledFunction> {
        match self {
            MapSpace::Mixed(_, w, _) => mixed_norm::map_projection(f, part, w),
            MapSpace::Variable(p) => variable_exponent::map_projection_ve(f, p, part),
        }
    }
}

fn run_map(c: &MapDemoConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks, tables: &mut Vec<Table>) -> Result<Value> {
    let grid = Arc::new(c.grid.build()?);
    let f = c.function.sample(&grid, rng, base)?;
    let mut rows = Vec::new();
    let mut csv = String::from("boxes_per_axis,norm_f,norm_pf,norm_error,worst_random_ratio\n");
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    let mut last_error = f64::NAN;
    for &level in &c.levels {
        let part = box_partition(&grid, &vec![level; grid.dims()])?;
        let space = match &c.setting {
            MapSetting::Mixed { exponents, convention, weight_range } => {
                let p = ExponentTuple::new(exponents.clone())?;
                let vals = draw_box_values(rng, part.len(), *weight_range, true);
                MapSpace::Mixed(p, WeightFunction::box_constant(grid.clone(), &part, &vals)?, *convention)
            }
            MapSetting::Variable { exponent_range } => {
                let vals = draw_box_values(rng, part.len(), *exponent_range, false);
                MapSpace::Variable(VariableExponent::box_constant(grid.clone(), &part, &vals)?)
            }
        };
        let nf = space.norm(&f)?;
        let pf = space.project(&f, &part)?;
        let npf = space.norm(&pf)?;
        let err = space.norm(&f.sub(&pf)?)?;
        worst_excess = worst_excess.max(npf - nf * (1.0 + 1e-12));
        let mut worst_ratio: f64 = 0.0;
        for _ in 0..c.random_samples {
            let r = FunctionSpec::Random { real: false }.sample(&grid, rng, base)?;
            let nr = space.norm(&r)?;
            let npr = space.norm(&space.project(&r, &part)?)?;
            worst_excess = worst_excess.max(npr - nr * (1.0 + 1e-12));
            worst_ratio = worst_ratio.max(npr / nr);
        }
        last_error = err;
        csv.push_str(&format!("{level},{nf:e},{npf:e},{err:e},{worst_ratio:e}\n"));
        rows.push(json!({"boxes_per_axis": level, "norm_f": nf, "norm_pf": npf, "norm_error": err, "worst_random_ratio": worst_ratio}));
    }
    checks.at_most("contraction_excess", worst_excess.max(0.0), 1e-12);
    checks.at_most("final_level_approximation_error", last_error, 1e-3);
    tables.push(Table { name: "levels".into(), csv });
    Ok(json!({"levels": rows}))
}

/// Random finite-rank representation on a random grid, for trace checks.
pub fn random_representation(rng: &mut ChaCha8Rng, max_rank: usize, max_nodes: usize) -> Result<NuclearRepresentation> {
    let dims = if max_nodes >= 16 && rng.gen_bool(0.3) { 2 } else { 1 };
    let grid = if dims == 1 {
        let n = rng.gen_range(2..=max_nodes.max(2));
        let start = rng.gen_range(-2.0..1.0);
        let len = rng.gen_range(0.5..3.0);
        if rng.gen_bool(0.5) {
            ProductGrid::single(Axis::uniform(start, start + len, n)?)
        } else {
            // non-uniform nodes with positive random weights
            let mut nodes: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..len)).collect();
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            let weights: Vec<f64> = nodes.iter().map(|_| rng.gen_range(0.1..1.0) * len / n as f64).collect();
            let nodes: Vec<f64> = nodes.iter().map(|x| start + x).collect();
            ProductGrid::single(Axis::new(nodes, weights, false, len)?)
        }
    } else {
        let side = (max_nodes as f64).sqrt() as usize;
        let a = rng.gen_range(2..=side.max(2));
        let b = rng.gen_range(2..=(max_nodes / a).max(2));
        ProductGrid::new(vec![Axis::unit_torus(a)?, Axis::uniform(0.0, rng.gen_range(0.5..2.0), b)?])?
    };
    let grid = Arc::new(grid);
    let rank = rng.gen_range(1..=max_rank);
    let mut rep = NuclearRepresentation::square(grid.clone(), 1.0)?;
    for _ in 0..rank {
        let g = FunctionSpec::Random { real: false }.sample(&grid, rng, Path::new("."))?;
        let h = FunctionSpec::Random { real: false }.sample(&grid, rng, Path::new("."))?;
        rep.push(g, h)?;
    }
    Ok(rep)
}

fn run_nuclear(c: &NuclearTraceConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks, tables: &mut Vec<Table>) -> Result<Value> {
    let reps: Vec<NuclearRepresentation> = match &c.manifest {
        Some(p) => vec![io::read_representation(&base.join(p))?],
        None => (0..c.cases).map(|_| random_representation(rng, c.max_rank, c.max_nodes)).collect::<Result<_>>()?,
    };
    let mut csv = String::from("case,rank,nodes,pairing_re,pairing_im,eigen_sum_re,eigen_sum_im,relative_deviation\n");
    let mut worst: f64 = 0.0;
    let mut worst_kernel: f64 = 0.0;
    let mut ledger = Vec::new();
    for (i, rep) in reps.iter().enumerate() {
        let pairing = rep.trace_by_pairing()?;
        let eig = rep.trace_by_eigenvalues(c.dimension_cap)?;
        let kernel = rep.trace_by_kernel_diagonal()?;
        let d = rel(pairing, eig.eigenvalue_sum);
        worst = worst.max(d);
        worst_kernel = worst_kernel.max(rel(pairing, kernel));
        csv.push_str(&format!(
            "{i},{},{},{:e},{:e},{:e},{:e},{d:e}\n",
            rep.rank(),
            rep.source_grid().node_count(),
            pairing.re,
            pairing.im,
            eig.eigenvalue_sum.re,
            eig.eigenvalue_sum.im
        ));
        if rep.source_descriptor().is_some() && rep.target_descriptor().is_some() {
            ledger.push(serde_json::to_value(rep.quasinorm()?.total)?);
        }
    }
    checks.at_most("pairing_vs_eigenvalue_sum_relative", worst, 1e-8);
    checks.at_most("pairing_vs_kernel_diagonal_relative", worst_kernel, 1e-12);
    tables.push(Table { name: "cases".into(), csv });
    Ok(json!({"cases": reps.len(), "worst_relative_deviation": worst, "quasinorms": ledger}))
}

fn torus_grid(dims: usize, nodes: usize) -> Result<Arc<ProductGrid>> {
    Ok(Arc::new(ProductGrid::unit_torus(dims, nodes)?))
}

fn spectral_tables(r: &SpectralReport, tables: &mut Vec<Table>) {
    tables.push(Table { name: "eigenvalues".into(), csv: eigenvalue_csv(&r.eigenvalues) });
}

fn run_torus(c: &TorusConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks, tables: &mut Vec<Table>) -> Result<Value> {
    let cutoff = FrequencyCutoff::new(c.dims, c.cutoff)?;
    let nodes = c.nodes.unwrap_or(4 * c.cutoff + 4);
    let grid = torus_grid(c.dims, nodes)?;
    let alpha = c.alpha.sample(&grid, rng, base)?;
    let multiplier = c.symbol.build(c.dims)?;
    let r = torus::verify_corollary_trace(&alpha, &multiplier, &cutoff, c.dimension_cap)?;
    let mt = r.matrix_trace.unwrap();
    checks.at_most("eigenvalue_sum_vs_matrix_trace_relative", rel(r.eigenvalue_sum, mt), 1e-8);
    let predicted = crate::grid::integrate(&alpha) * multiplier.partial_sum(&cutoff);
    checks.at_most("matrix_trace_identity", (mt - predicted).norm(), 1e-12);
    checks.at_most("pairing_vs_matrix_trace_relative", rel(r.pairing_trace.unwrap(), mt), 1e-10);
    if let (Some(t), Some(tail)) = (&r.target, r.truncation.tail_bound) {
        let budget = tail + t.tail_bound;
        checks.at_most("eigenvalue_sum_vs_target_minus_budget", ((r.eigenvalue_sum - t.value).norm() - budget).max(0.0), 1e-12);
    }
    if let Some(min) = c.min_non_normality {
        checks.at_least("non_normality", r.non_normality.unwrap_or(0.0), min);
    }
    spectral_tables(&r, tables);
    Ok(json!({"spectral_report": r, "grid_nodes_per_axis": nodes}))
}

fn run_hermite(c: &HermiteConfig, checks: &mut Checks, tables: &mut Vec<Table>) -> Result<Value> {
    if !c.nodes.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("node count {} must be even", c.nodes)));
    }
    let axis = Axis::centered(c.half_width, c.nodes)?;
    let grid = Arc::new(ProductGrid::new(vec![axis; c.dims])?);
    let basis = hermite::build_basis(c.dims, c.max_degree, grid)?;
    let func = c.function.build()?;
    let r = hermite::trace_formula_check(&func, &basis)?;
    let cert = basis.certificate();
    checks.at_most("gram_deviation", cert.gram_deviation, hermite::GRAM_TOLERANCE);
    checks.at_most("eigen_residual", cert.max_eigen_residual, hermite::EIGEN_RESIDUAL_TOLERANCE);
    let spectral_sum = r.matrix_trace.unwrap();
    checks.at_most("kernel_trace_vs_spectral_sum", (r.kernel_trace.unwrap() - spectral_sum).norm(), 1e-8);
    checks.at_most("eigenvalue_sum_vs_spectral_sum", (r.eigenvalue_sum - spectral_sum).norm(), 1e-8);
    let target = r.target.as_ref().unwrap();
    let budget = r.truncation.tail_bound.unwrap_or(0.0) + target.tail_bound;
    checks.at_most("spectral_sum_vs_target_minus_budget", ((spectral_sum - target.value).norm() - budget).max(0.0), 1e-12);
    spectral_tables(&r, tables);
    let mut q = json!({"spectral_report": r, "certificate": cert, "indices": basis.indices()});
    if let Some(cs) = &c.criterion {
        let crit = hermite::nuclearity_criterion(&func, &basis, cs.r, cs.p, cs.q, cs.s)?;
        if cs.p == 2.0 && cs.q == 2.0 && cs.s == 0.0 {
            let worst = crit.terms.iter().map(|t| t.moyal_deviation).fold(0.0, f64::max);
            checks.at_most("moyal_cross_check", worst, 1e-6);
        }
        if let Some(last) = crit.increments.last() {
            checks.at_most("criterion_last_increment", last.abs(), 1e-8);
        }
        let mut csv = String::from("index,lambda,f_abs,modulation_norm,dual_modulation_norm,term\n");
        for t in &crit.terms {
            let idx: Vec<String> = t.index.iter().map(|k| k.to_string()).collect();
            csv.push_str(&format!(
                "{},{},{:e},{:e},{:e},{:e}\n",
                idx.join(" "),
                t.lambda,
                t.f_abs,
                t.modulation_norm,
                t.dual_modulation_norm,
                t.term
            ));
        }
        tables.push(Table { name: "criterion_terms".into(), csv });
        q["criterion"] = serde_json::to_value(&crit)?;
    }
    Ok(q)
}

fn run_ledger(c: &LedgerConfig, rng: &mut ChaCha8Rng, base: &Path, checks: &mut Checks, tables: &mut Vec<Table>) -> Result<Value> {
    let bessel = torus::bessel_symbol(c.tau, c.dims)?;
    let multiplier = Multiplier::Bessel(bessel);
    let mut rows = Vec::new();
    let mut csv = String::from("cutoff,ledger_total,symbol_power_sum,tail_bound\n");
    let mut totals = Vec::new();
    let mut tails = Vec::new();
    let hypothesis = bessel.summable_power(c.r);
    for &n in &c.cutoffs {
        let cutoff = FrequencyCutoff::new(c.dims, n)?;
        let grid = torus_grid(c.dims, 2 * n + 2)?;
        let alpha = c.alpha.sample(&grid, rng, base)?;
        let source = c.source.build(&grid, base)?;
        let target = c.target.build(&grid, base)?;
        let ledger = torus::nuclearity_ledger(&alpha, &multiplier, c.r, source, target, &cutoff)?;
        let direct = torus::symbol_power_sum(&multiplier, c.r, &cutoff);
        csv.push_str(&format!("{n},{:e},{direct:e},{}\n", ledger.total, ledger.tail_bound.map_or("inf".into(), |t| format!("{t:e}"))));
        rows.push(json!({"cutoff": n, "total": ledger.total, "symbol_power_sum": direct, "tail_bound": ledger.tail_bound}));
        totals.push(ledger.total);
        tails.push(ledger.tail_bound);
    }
    let increments: Vec<f64> = totals.windows(2).map(|w| w[1] - w[0]).collect();
    let shrink: Vec<f64> = increments.windows(2).map(|w| w[0] / w[1]).collect();
    if hypothesis {
        let mut excess: f64 = 0.0;
        for (inc, tail) in increments.iter().zip(&tails) {
            if let Some(t) = tail {
                excess = excess.max(inc - t);
            }
        }
        checks.at_most("increment_exceeds_tail_bound", excess.max(0.0), 1e-12);
        if let (Some(min), Some(worst)) = (c.min_shrink_convergent, shrink.iter().copied().reduce(f64::min)) {
            checks.at_least("min_shrink_per_octave", worst, min);
        }
    } else if let (Some(max), Some(worst)) = (c.max_shrink_divergent, shrink.iter().copied().reduce(f64::max)) {
        checks.at_most("max_shrink_per_octave", worst, max);
    }
    tables.push(Table { name: "ledger".into(), csv });
    Ok(json!({
        "hypothesis_r_tau_gt_n": hypothesis,
        "r_tau": c.r * c.tau,
        "n": c.dims,
        "rows": rows,
        "increments": increments,
        "shrink_per_octave": shrink,
    }))
}

/// Load a config file, run it, and write the report. Returns the exit code.
pub fn run_file(kind: &str, config_path: &Path, out: &Path, seed: Option<u64>, tolerance_scale: f64) -> std::result::Result<i32, Error> {
    let text = std::fs::read_to_string(config_path)?;
    let cfg = ExperimentConfig::parse(&text, Some(kind))?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let outcome = run(&cfg, seed, tolerance_scale, base)?;
    emit_report(&outcome, out)?;
    Ok(outcome.report.exit_code())
}

/// Write a function declared in a config to the SampledFunction format.
pub fn export_function(spec: &FunctionSpec, grid: &GridDescriptor, seed: u64, dir: &Path, stem: &str, format: DataFormat) -> Result<PathBuf> {
    let g = Arc::new(grid.build()?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = spec.sample(&g, &mut rng, dir)?;
    io::write_function(&f, dir, stem, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> ExperimentConfig {
        ExperimentConfig::parse(s, None).unwrap()
    }

    fn strip_timestamp(mut v: Value) -> Value {
        v["timestamp"] = Value::Null;
        v
    }

    #[test]
    fn luxemburg_constant_exponent_matches_l2() {
        let cfg = parse(
            r#"{"schema":"1","kind":"luxemburg",
                "grid":{"axes":[{"kind":"uniform","start":0,"end":1,"count":256}]},
                "function":{"kind":"gaussian","width":0.3,"center":[0.5]},
                "exponent":{"kind":"constant","p":2}}"#,
        );
        let out = run(&cfg, None, 1.0, Path::new(".")).unwrap();
        assert!(out.report.passed, "{:?}", out.report.assertions);
        let n = out.report.quantities["norm"].as_f64().unwrap();
        let l2 = out.report.quantities["classical_lp_norm"].as_f64().unwrap();
        assert!((n - l2).abs() < 1e-10 * l2);
    }

    #[test]
    fn torus_verify_reports_closed_form() {
        let cfg = parse(
            r#"{"schema":"1","kind":"torus-verify","cutoff":16,
                "alpha":{"kind":"constant","re":1},"symbol":{"kind":"bessel","tau":2}}"#,
        );
        let out = run(&cfg, None, 1.0, Path::new(".")).unwrap();
        assert!(out.report.passed, "{:?}", out.report.assertions);
        let target = &out.report.quantities["spectral_report"]["target"];
        assert_eq!(target["provenance"]["kind"], "closed-form");
        assert!((target["value"][0].as_f64().unwrap() - 1.081_976_706_869_326_5).abs() < 1e-12);
        assert_eq!(out.tables[0].name, "eigenvalues");
    }

    #[test]
    fn negative_tau_is_a_usage_error() {
        let r = ExperimentConfig::parse(
            r#"{"schema":"1","cutoff":4,"alpha":{"kind":"constant","re":1},"symbol":{"kind":"bessel","tau":-1}}"#,
            Some("torus-verify"),
        );
        assert!(r.is_err());
    }

    #[test]
    fn kind_mismatch_and_schema_are_checked() {
        let doc = r#"{"schema":"1","kind":"luxemburg","grid":{"axes":[]},"function":{"kind":"constant","re":1},"exponent":{"kind":"constant","p":2}}"#;
        assert!(ExperimentConfig::parse(doc, Some("norm")).is_err());
        let doc2 = doc.replace("\"schema\":\"1\"", "\"schema\":\"2\"");
        assert!(ExperimentConfig::parse(&doc2, None).is_err());
    }

    #[test]
    fn tolerance_failure_is_named() {
        let cfg = parse(
            r#"{"schema":"1","kind":"norm",
                "grid":{"axes":[{"kind":"uniform","start":0,"end":1,"count":16}]},
                "function":{"kind":"constant","re":2},"exponents":[2],"expected":3}"#,
        );
        let out = run(&cfg, None, 1.0, Path::new(".")).unwrap();
        assert!(!out.report.passed);
        assert_eq!(out.report.failed_assertions, vec!["norm_vs_expected_relative".to_string()]);
        assert_eq!(out.report.exit_code(), EXIT_TOLERANCE_FAILURE);
    }

    #[test]
    fn reports_round_trip_and_are_deterministic() {
        let docs = [
            r#"{"schema":"1","kind":"nuclear-trace","cases":5,"max_rank":4,"max_nodes":32,"seed":7}"#,
            r#"{"schema":"1","kind":"hermite-verify","max_degree":6,"half_width":10,"nodes":256,"function":{"kind":"exponential","rate":1}}"#,
            r#"{"schema":"1","kind":"map-demo","grid":{"axes":[{"kind":"uniform","start":0,"end":1,"count":64}]},
                "levels":[1,2,4],"setting":{"kind":"variable"},"function":{"kind":"sine","frequencies":[1]},
                "random_samples":3,"tolerances":{"final_level_approximation_error":0.1}}"#,
        ];
        let dir = tempfile::tempdir().unwrap();
        for (i, doc) in docs.iter().enumerate() {
            let cfg = parse(doc);
            let a = run(&cfg, None, 1.0, Path::new(".")).unwrap();
            let b = run(&cfg, None, 1.0, Path::new(".")).unwrap();
            assert!(a.report.passed, "{doc}: {:?}", a.report.assertions);
            let va = strip_timestamp(serde_json::to_value(&a.report).unwrap());
            let vb = strip_timestamp(serde_json::to_value(&b.report).unwrap());
            assert_eq!(serde_json::to_string(&va).unwrap(), serde_json::to_string(&vb).unwrap());
            let sub = dir.path().join(format!("r{i}"));
            let path = emit_report(&a, &sub).unwrap();
            assert_eq!(read_report(&path).unwrap(), a.report);
            for t in &a.report.tables {
                assert!(sub.join(t).exists());
            }
        }
    }

    #[test]
    fn tolerance_scale_loosens_thresholds() {
        let cfg = parse(
            r#"{"schema":"1","kind":"norm",
                "grid":{"axes":[{"kind":"uniform","start":0,"end":1,"count":16}]},
                "function":{"kind":"constant","re":2},"exponents":[2],"expected":2.0000001}"#,
        );
        assert!(!run(&cfg, None, 1.0, Path::new(".")).unwrap().report.passed);
        assert!(run(&cfg, None, 1e4, Path::new(".")).unwrap().report.passed);
    }
}
