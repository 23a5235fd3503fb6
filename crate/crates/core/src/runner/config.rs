//! Run configuration: a flat `key = value` file split into `[scheme]`,
//! `[target]`, `[optimizer]` and `[output]` sections.
//!
//! ```text
//! [scheme]
//! kind = continuous
//! metric = sae
//!
//! [target]
//! path = face.png
//!
//! [optimizer]
//! kind = pso
//! population = 100
//! seed = 42
//!
//! [output]
//! dir = runs/face
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::Benchmark;
use crate::error::{ConfigIssue, Error, Result};
use crate::metrics::MetricId;
use crate::optimizers::{ComparisonRule, DeParams, PsoParams};
use crate::raster::TargetMode;
use crate::schemes::{PermutationEncoding, Scheme};

/// Environment variable that, when set, replaces the base directory of
/// relative output paths.
pub const OUTPUT_ROOT_VAR: &str = "IMGVIZ_OUTPUT_ROOT";

pub const DEFAULT_POPULATION: usize = 100;
pub const DEFAULT_GIF_DELAY: u16 = 10;
/// Default budget is this many evaluations per decision variable.
pub const BUDGET_PER_DIMENSION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    /// PSO comparing plain fitness.
    Pso,
    /// PSO without constraint handling; identical to `Pso`, named for
    /// constrained experiments.
    PsoNch,
    /// PSO with the feasibility-first comparison.
    PsoSchnp,
    De,
    Gde3,
}

impl OptimizerKind {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Pso => "pso",
            OptimizerKind::PsoNch => "pso-nch",
            OptimizerKind::PsoSchnp => "pso-schnp",
            OptimizerKind::De => "de",
            OptimizerKind::Gde3 => "gde3",
        }
    }

    pub fn is_pso(&self) -> bool {
        matches!(self, OptimizerKind::Pso | OptimizerKind::PsoNch | OptimizerKind::PsoSchnp)
    }

    pub fn default_rule(&self) -> ComparisonRule {
        match self {
            OptimizerKind::PsoSchnp => ComparisonRule::DebFeasibilityFirst,
            _ => ComparisonRule::PlainFitness,
        }
    }
}

impl FromStr for OptimizerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pso" => Ok(OptimizerKind::Pso),
            "pso-nch" => Ok(OptimizerKind::PsoNch),
            "pso-schnp" => Ok(OptimizerKind::PsoSchnp),
            "de" => Ok(OptimizerKind::De),
            "gde3" => Ok(OptimizerKind::Gde3),
            other => Err(format!("unknown optimizer `{other}` (expected pso, pso-nch, pso-schnp, de or gde3)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub metric: MetricId,
    pub psnr_range: Option<f64>,
    pub encoding: Option<PermutationEncoding>,
    pub target: PathBuf,
    pub target_mode: Option<TargetMode>,
    pub optimizer: OptimizerKind,
    pub population: usize,
    /// Evaluation budget; `None` means ten thousand per dimension.
    pub budget: Option<usize>,
    /// Iteration count; takes precedence over `budget` when set.
    pub iterations: Option<usize>,
    pub seed: u64,
    pub pso: PsoParams,
    pub de: DeParams,
    pub rule: Option<ComparisonRule>,
    pub output: PathBuf,
    /// Iterations at which images are written; `None` selects the default
    /// schedule. The final iteration is always included.
    pub frames: Option<Vec<usize>>,
    pub gif_delay: u16,
}

impl RunConfig {
    /// A configuration with every default filled in.
    pub fn new(scheme: Scheme, target: impl Into<PathBuf>, optimizer: OptimizerKind, output: impl Into<PathBuf>) -> Self {
        Self {
            scheme,
            metric: MetricId::Sae,
            psnr_range: None,
            encoding: None,
            target: target.into(),
            target_mode: None,
            optimizer,
            population: DEFAULT_POPULATION,
            budget: None,
            iterations: None,
            seed: 0,
            pso: PsoParams::default(),
            de: DeParams::default(),
            rule: None,
            output: output.into(),
            frames: None,
            gif_delay: DEFAULT_GIF_DELAY,
        }
    }

    /// Reads and validates a configuration file. Relative target paths are
    /// resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::parse(&text, Some(base))
    }

    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut issues = Vec::new();
        let mut raw = RawConfig::default();
        let mut section = String::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                if !SECTIONS.contains(&section.as_str()) {
                    issues.push(ConfigIssue::new(format!("[{section}]"), "unknown section"));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                issues.push(ConfigIssue::new(format!("line {}", lineno + 1), "expected `key = value`"));
                continue;
            };
            let key = key.trim().to_ascii_lowercase();
            let field = if section.is_empty() { key.clone() } else { format!("{section}.{key}") };
            if raw.set(&field, value.trim().to_string()).is_some() {
                issues.push(ConfigIssue::new(field, "given more than once"));
            }
        }

        let cfg = raw.build(base, &mut issues);
        match cfg {
            Some(cfg) if issues.is_empty() => {
                cfg.validate()?;
                Ok(cfg)
            }
            _ => Err(Error::Config(issues)),
        }
    }

    /// Checks cross-field consistency.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        let multi = self.scheme == Scheme::MultiObjective;
        if multi != (self.optimizer == OptimizerKind::Gde3) {
            issues.push(ConfigIssue::new(
                "optimizer.kind",
                "gde3 is required for, and only valid with, the multi-objective scheme",
            ));
        }
        let needed = if self.optimizer.is_pso() { 1 } else { 4 };
        if self.population < needed {
            issues.push(ConfigIssue::new(
                "optimizer.population",
                format!("{} needs at least {needed} members", self.optimizer.name()),
            ));
        }
        if let Some(b) = self.budget {
            if b < self.population {
                issues.push(ConfigIssue::new("optimizer.budget", "smaller than one population evaluation"));
            }
        }
        if self.iterations == Some(0) {
            issues.push(ConfigIssue::new("optimizer.iterations", "must be positive"));
        }
        if self.encoding == Some(PermutationEncoding::Matrix) && self.optimizer.is_pso() {
            issues.push(ConfigIssue::new("scheme.encoding", "matrix encoding requires de"));
        }
        if let Scheme::PartiallySeparable { p } = self.scheme {
            if !(0.0..=1.0).contains(&p) {
                issues.push(ConfigIssue::new("scheme.p", format!("{p} is outside [0, 1]")));
            }
        }
        if let Some(r) = self.psnr_range {
            if !(r > 0.0) {
                issues.push(ConfigIssue::new("scheme.psnr_range", "must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.de.cr) {
            issues.push(ConfigIssue::new("optimizer.cr", "must lie in [0, 1]"));
        }
        if !(self.de.f >= 0.0) {
            issues.push(ConfigIssue::new("optimizer.f", "must be non-negative"));
        }
        if self.gif_delay == 0 {
            issues.push(ConfigIssue::new("output.gif_delay", "must be positive"));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn rule(&self) -> ComparisonRule {
        self.rule.unwrap_or_else(|| self.optimizer.default_rule())
    }

    pub fn target_mode(&self) -> TargetMode {
        self.target_mode.unwrap_or_else(|| self.scheme.default_target_mode())
    }

    pub fn encoding(&self) -> PermutationEncoding {
        self.encoding.unwrap_or(if self.optimizer.is_pso() {
            PermutationEncoding::RelativePosition
        } else {
            PermutationEncoding::Matrix
        })
    }

    /// Number of logged iterations for a problem of dimension `d`.
    pub fn iteration_count(&self, d: usize) -> usize {
        match self.iterations {
            Some(n) => n,
            None => self.budget.unwrap_or(BUDGET_PER_DIMENSION * d) / self.population,
        }
    }

    /// Output directory after applying the output-root override.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_VAR) {
            Some(root) if self.output.is_relative() => PathBuf::from(root).join(&self.output),
            _ => self.output.clone(),
        }
    }

    /// Same experiment, different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Renders the configuration in the file format accepted by [`RunConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::from("[scheme]\n");
        let _ = writeln!(s, "kind = {}", self.scheme.name());
        match self.scheme {
            Scheme::PartiallySeparable { p } => {
                let _ = writeln!(s, "p = {p}");
            }
            Scheme::KnownOptimum { benchmark } => {
                let _ = writeln!(s, "benchmark = {}", benchmark.name());
            }
            _ => {}
        }
        if !matches!(self.metric, MetricId::Partial(_)) {
            let _ = writeln!(s, "metric = {}", self.metric.name());
        }
        if let Some(r) = self.psnr_range {
            let _ = writeln!(s, "psnr_range = {r}");
        }
        if let Some(e) = self.encoding {
            let _ = writeln!(s, "encoding = {}", encoding_name(e));
        }
        let _ = writeln!(s, "\n[target]\npath = {}", self.target.display());
        if let Some(m) = self.target_mode {
            let _ = writeln!(s, "mode = {}", mode_name(m));
        }
        let _ = writeln!(s, "\n[optimizer]\nkind = {}", self.optimizer.name());
        let _ = writeln!(s, "population = {}", self.population);
        if let Some(b) = self.budget {
            let _ = writeln!(s, "budget = {b}");
        }
        if let Some(n) = self.iterations {
            let _ = writeln!(s, "iterations = {n}");
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        if self.optimizer.is_pso() {
            let _ = writeln!(s, "inertia = {}", self.pso.inertia);
            let _ = writeln!(s, "cognitive = {}", self.pso.cognitive);
            let _ = writeln!(s, "social = {}", self.pso.social);
        } else {
            let _ = writeln!(s, "f = {}", self.de.f);
            let _ = writeln!(s, "cr = {}", self.de.cr);
        }
        if let Some(r) = self.rule {
            let _ = writeln!(s, "rule = {}", rule_name(r));
        }
        let _ = writeln!(s, "\n[output]\ndir = {}", self.output.display());
        if let Some(f) = &self.frames {
            let list: Vec<String> = f.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "frames = {}", list.join(", "));
        }
        let _ = writeln!(s, "gif_delay = {}", self.gif_delay);
        s
    }
}

const SECTIONS: [&str; 4] = ["scheme", "target", "optimizer", "output"];

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn encoding_name(e: PermutationEncoding) -> &'static str {
    match e {
        PermutationEncoding::RelativePosition => "relative-position",
        PermutationEncoding::Matrix => "matrix",
    }
}

fn mode_name(m: TargetMode) -> &'static str {
    match m {
        TargetMode::Continuous => "continuous",
        TargetMode::Discrete8 => "discrete8",
        TargetMode::Binary => "binary",
    }
}

fn rule_name(r: ComparisonRule) -> &'static str {
    match r {
        ComparisonRule::PlainFitness => "plain",
        ComparisonRule::DebFeasibilityFirst => "deb",
    }
}

#[derive(Default)]
struct RawConfig {
    entries: Vec<(String, String)>,
}

impl RawConfig {
    fn set(&mut self, key: &str, value: String) -> Option<()> {
        if self.entries.iter().any(|(k, _)| k == key) {
            return Some(());
        }
        self.entries.push((key.to_string(), value));
        None
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let i = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(i).1)
    }

    fn parse<T: FromStr>(&mut self, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.take(key)?;
        match v.parse::<T>() {
            Ok(t) => Some(t),
            Err(e) => {
                issues.push(ConfigIssue::new(key, format!("`{v}`: {e}")));
                None
            }
        }
    }

    fn build(mut self, base: Option<&Path>, issues: &mut Vec<ConfigIssue>) -> Option<RunConfig> {
        let kind = self.take("scheme.kind");
        let p: Option<f64> = self.parse("scheme.p", issues);
        let benchmark: Option<Benchmark> = self.parse("scheme.benchmark", issues);
        let scheme = match kind.as_deref().map(|k| k.to_ascii_lowercase()) {
            None => {
                issues.push(ConfigIssue::new("scheme.kind", "missing"));
                None
            }
            Some(k) => match k.as_str() {
                "continuous" => Some(Scheme::Continuous),
                "discrete" => Some(Scheme::Discrete),
                "binary" => Some(Scheme::Binary),
                "combinatorial" => Some(Scheme::Combinatorial),
                "partial" | "partially-separable" => match p {
                    Some(p) => Some(Scheme::PartiallySeparable { p }),
                    None => {
                        issues.push(ConfigIssue::new("scheme.p", "required by the partial scheme"));
                        None
                    }
                },
                "constrained" => Some(Scheme::Constrained),
                "dynamic" => Some(Scheme::Dynamic),
                "multi-objective" | "multiobjective" => Some(Scheme::MultiObjective),
                "benchmark" | "known-optimum" => match benchmark {
                    Some(benchmark) => Some(Scheme::KnownOptimum { benchmark }),
                    None => {
                        issues.push(ConfigIssue::new("scheme.benchmark", "required by the benchmark scheme"));
                        None
                    }
                },
                other => {
                    issues.push(ConfigIssue::new("scheme.kind", format!("unknown scheme `{other}`")));
                    None
                }
            },
        };
        let metric: Option<MetricId> = self.parse("scheme.metric", issues);
        let psnr_range = self.parse("scheme.psnr_range", issues);
        let encoding = self.take("scheme.encoding").and_then(|v| match v.to_ascii_lowercase().as_str() {
            "relative-position" | "rpi" => Some(PermutationEncoding::RelativePosition),
            "matrix" => Some(PermutationEncoding::Matrix),
            _ => {
                issues.push(ConfigIssue::new("scheme.encoding", format!("unknown encoding `{v}`")));
                None
            }
        });

        let target = self.take("target.path").map(|t| match base {
            Some(b) if Path::new(&t).is_relative() => b.join(t),
            _ => PathBuf::from(t),
        });
        if target.is_none() {
            issues.push(ConfigIssue::new("target.path", "missing"));
        }
        let target_mode: Option<TargetMode> = self.parse("target.mode", issues);

        let optimizer: Option<OptimizerKind> = self.parse("optimizer.kind", issues);
        if optimizer.is_none() && !issues.iter().any(|i| i.field == "optimizer.kind") {
            issues.push(ConfigIssue::new("optimizer.kind", "missing"));
        }
        let population = self.parse("optimizer.population", issues);
        let budget = self.parse("optimizer.budget", issues);
        let iterations = self.parse("optimizer.iterations", issues);
        let seed = self.parse("optimizer.seed", issues);
        let mut pso = PsoParams::default();
        if let Some(v) = self.parse("optimizer.inertia", issues) {
            pso.inertia = v;
        }
        if let Some(v) = self.parse("optimizer.cognitive", issues) {
            pso.cognitive = v;
        }
        if let Some(v) = self.parse("optimizer.social", issues) {
            pso.social = v;
        }
        let mut de = DeParams::default();
        if let Some(v) = self.parse("optimizer.f", issues) {
            de.f = v;
        }
        if let Some(v) = self.parse("optimizer.cr", issues) {
            de.cr = v;
        }
        let rule = self.take("optimizer.rule").and_then(|v| match v.to_ascii_lowercase().as_str() {
            "plain" => Some(ComparisonRule::PlainFitness),
            "deb" => Some(ComparisonRule::DebFeasibilityFirst),
            _ => {
                issues.push(ConfigIssue::new("optimizer.rule", format!("unknown rule `{v}` (plain or deb)")));
                None
            }
        });

        let output = self.take("output.dir");
        if output.is_none() {
            issues.push(ConfigIssue::new("output.dir", "missing"));
        }
        let frames = self.take("output.frames").and_then(|v| {
            let parsed: std::result::Result<Vec<usize>, _> =
                v.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect();
            match parsed {
                Ok(list) => Some(list),
                Err(e) => {
                    issues.push(ConfigIssue::new("output.frames", format!("`{v}`: {e}")));
                    None
                }
            }
        });
        let gif_delay = self.parse("output.gif_delay", issues);

        for (key, _) in &self.entries {
            issues.push(ConfigIssue::new(key.clone(), "unknown key"));
        }

        let mut cfg = RunConfig::new(scheme?, target?, optimizer?, output?);
        if let Some(m) = metric {
            cfg.metric = m;
        }
        cfg.psnr_range = psnr_range;
        cfg.encoding = encoding;
        cfg.target_mode = target_mode;
        if let Some(n) = population {
            cfg.population = n;
        }
        cfg.budget = budget;
        cfg.iterations = iterations;
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.pso = pso;
        cfg.de = de;
        cfg.rule = rule;
        cfg.frames = frames;
        if let Some(d) = gif_delay {
            cfg.gif_delay = d;
        }
        Some(cfg)
    }
}
