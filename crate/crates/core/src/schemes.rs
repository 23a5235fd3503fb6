//! Problem construction for each mapping scheme, the dynamic environment
//! schedule, bi-objective targets and multi-run averaging.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Benchmark;
use crate::error::{check_len, Error, Result};
use crate::mapping::{error_heatmap, linear_error_map, HeatmapPalette, KnownOptimumMap};
use crate::metrics::{MetricContext, MetricId};
use crate::optimizers::adapters::{binarize_threshold, discretize_round, random_permutation, rpi_decode, rpi_encode};
use crate::optimizers::multi::MoEvaluation;
use crate::optimizers::{Bounds, Evaluation};
use crate::raster::{matrix_to_vector, vector_to_matrix, PixelMatrix, RgbRaster, TargetImage, TargetMode};

/// The mapping schemes supported by the runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Scheme {
    Continuous,
    Discrete,
    Binary,
    Combinatorial,
    PartiallySeparable { p: f64 },
    Constrained,
    Dynamic,
    MultiObjective,
    KnownOptimum { benchmark: Benchmark },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Continuous => "continuous",
            Scheme::Discrete => "discrete",
            Scheme::Binary => "binary",
            Scheme::Combinatorial => "combinatorial",
            Scheme::PartiallySeparable { .. } => "partial",
            Scheme::Constrained => "constrained",
            Scheme::Dynamic => "dynamic",
            Scheme::MultiObjective => "multi-objective",
            Scheme::KnownOptimum { .. } => "benchmark",
        }
    }

    /// Target mode a scheme expects when none is configured.
    pub fn default_target_mode(&self) -> TargetMode {
        match self {
            Scheme::Discrete | Scheme::Combinatorial => TargetMode::Discrete8,
            Scheme::Binary | Scheme::MultiObjective => TargetMode::Binary,
            _ => TargetMode::Continuous,
        }
    }
}

/// What the decision variables range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Continuous,
    Discrete8,
    Binary,
    Permutation,
}

/// How a permutation is represented inside an optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationEncoding {
    /// Continuous keys in `[0, 1]`, decoded by rank matching (for PSO).
    #[default]
    RelativePosition,
    /// The pixel values themselves, rearranged by transpositions (for DE).
    Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mapper {
    Direct,
    LinearError(KnownOptimumMap),
}

/// Optional overrides for [`build_problem`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProblemOptions {
    pub psnr_range: Option<f64>,
    pub encoding: PermutationEncoding,
}

/// A fully specified optimization problem over one target image.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub scheme: Scheme,
    pub domain: DomainKind,
    pub search: Bounds,
    pub feasible: Bounds,
    pub metric: MetricId,
    pub ctx: MetricContext,
    pub encoding: PermutationEncoding,
    pub mapper: Mapper,
    height: usize,
    width: usize,
    /// Value range of evaluated pixels (1 or 255).
    scale: f64,
    /// Target frames, column-major, on the evaluation scale.
    targets: Vec<Vec<f64>>,
    inverse: Option<Vec<f64>>,
    multiset: Vec<u32>,
    target: TargetImage,
}

/// Builds the problem for `scheme` over `target`. The metric is ignored by
/// the partially-separable, multi-objective and known-optimum schemes, which
/// fix their own objectives.
pub fn build_problem(scheme: Scheme, target: &TargetImage, metric: MetricId, options: ProblemOptions) -> Result<ProblemSpec> {
    let d = target.dimension();
    let (h, w) = (target.height(), target.width());
    let require = |mode: TargetMode| -> Result<()> {
        if target.mode() == mode {
            Ok(())
        } else {
            Err(Error::IncompatibleTarget(format!(
                "{} scheme needs a {mode:?} target, got {:?}",
                scheme.name(),
                target.mode()
            )))
        }
    };

    let unit = Bounds::uniform(d, 0.0, 1.0)?;
    let (domain, search, feasible, scale, metric) = match scheme {
        Scheme::Continuous | Scheme::Dynamic => (DomainKind::Continuous, unit.clone(), unit, 1.0, metric),
        Scheme::Discrete => {
            require(TargetMode::Discrete8)?;
            let b = Bounds::uniform(d, 0.0, 255.0)?;
            (DomainKind::Discrete8, b.clone(), b, 255.0, metric)
        }
        Scheme::Binary => {
            require(TargetMode::Binary)?;
            (DomainKind::Binary, unit.clone(), unit, 1.0, metric)
        }
        Scheme::Combinatorial => {
            require(TargetMode::Discrete8)?;
            let b = match options.encoding {
                PermutationEncoding::RelativePosition => unit,
                PermutationEncoding::Matrix => Bounds::uniform(d, 0.0, 255.0)?,
            };
            (DomainKind::Permutation, b.clone(), b, 255.0, metric)
        }
        Scheme::PartiallySeparable { p } => {
            let m = MetricId::new_partial(p)?;
            (DomainKind::Continuous, unit.clone(), unit, 1.0, m)
        }
        Scheme::Constrained => {
            let search = Bounds::uniform(d, -1.0, 2.0)?;
            (DomainKind::Continuous, search, unit, 1.0, metric)
        }
        Scheme::MultiObjective => {
            require(TargetMode::Binary)?;
            (DomainKind::Binary, unit.clone(), unit, 1.0, MetricId::Psnr)
        }
        Scheme::KnownOptimum { benchmark } => {
            let (lo, hi) = benchmark.domain();
            let b = Bounds::uniform(d, lo, hi)?;
            (DomainKind::Continuous, b.clone(), b, 1.0, metric)
        }
    };

    if scheme == Scheme::Dynamic && target.frames().len() < 2 {
        return Err(Error::IncompatibleTarget(
            "dynamic scheme needs a multi-frame target".into(),
        ));
    }

    let frames: &[PixelMatrix] = if scheme == Scheme::Dynamic {
        target.frames()
    } else {
        &target.frames()[..1]
    };
    let targets: Vec<Vec<f64>> = frames
        .iter()
        .map(|f| matrix_to_vector(f).into_iter().map(|v| v * scale).collect())
        .collect();
    let multiset: Vec<u32> = matrix_to_vector(target.matrix())
        .iter()
        .map(|v| (v * 255.0).round() as u32)
        .collect();
    let inverse = (scheme == Scheme::MultiObjective).then(|| targets[0].iter().map(|v| 1.0 - v).collect());

    let mapper = match scheme {
        Scheme::KnownOptimum { benchmark } => Mapper::LinearError(KnownOptimumMap::new(
            target.matrix().clone(),
            benchmark.reference_optimum(d),
            search.lower.clone(),
            search.upper.clone(),
        )?),
        _ => Mapper::Direct,
    };

    let mut ctx = MetricContext::for_range(scale);
    if let Some(r) = options.psnr_range {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "psnr_range",
                reason: format!("{r} must be positive"),
            });
        }
        ctx.psnr_range = r;
    }

    Ok(ProblemSpec {
        scheme,
        domain,
        search,
        feasible,
        metric,
        ctx,
        encoding: options.encoding,
        mapper,
        height: h,
        width: w,
        scale,
        targets,
        inverse,
        multiset,
        target: target.clone(),
    })
}

impl ProblemSpec {
    pub fn dimension(&self) -> usize {
        self.height * self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn target(&self) -> &TargetImage {
        &self.target
    }

    pub fn frame_count(&self) -> usize {
        self.targets.len()
    }

    /// Target of environment `env` on the evaluation scale (column-major).
    pub fn target_vector(&self, env: usize) -> &[f64] {
        &self.targets[env.min(self.targets.len() - 1)]
    }

    pub fn inverse_target(&self) -> Option<&[f64]> {
        self.inverse.as_deref()
    }

    pub fn is_multi_objective(&self) -> bool {
        self.scheme == Scheme::MultiObjective
    }

    pub fn is_constrained(&self) -> bool {
        self.scheme == Scheme::Constrained
    }

    pub fn benchmark(&self) -> Option<Benchmark> {
        match self.scheme {
            Scheme::KnownOptimum { benchmark } => Some(benchmark),
            _ => None,
        }
    }

    /// Sum of the widths by which the search box exceeds the feasible box;
    /// the violation at which the border saturates to red.
    pub fn violation_saturation(&self) -> f64 {
        (0..self.dimension())
            .map(|k| self.search.width(k) - self.feasible.width(k))
            .sum()
    }

    /// Evaluation-ready values: domain hooks applied, on the evaluation scale.
    pub fn decode(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dimension(), x.len())?;
        Ok(match (self.domain, self.encoding) {
            (DomainKind::Discrete8, _) => discretize_round(x).into_iter().map(f64::from).collect(),
            (DomainKind::Binary, _) => binarize_threshold(x).into_iter().map(f64::from).collect(),
            (DomainKind::Permutation, PermutationEncoding::RelativePosition) => rpi_decode(x, &self.multiset)?
                .into_iter()
                .map(f64::from)
                .collect(),
            _ => x.to_vec(),
        })
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        if self.is_constrained() {
            self.feasible.violation(x)
        } else {
            0.0
        }
    }

    /// Single-objective evaluation under environment `env`.
    pub fn evaluate(&self, x: &[f64], env: usize) -> Result<Evaluation> {
        let fitness = match self.benchmark() {
            Some(b) => {
                check_len(self.dimension(), x.len())?;
                b.value(x)
            }
            None => {
                let values = self.decode(x)?;
                match self.metric.fitness(&values, self.target_vector(env), &self.ctx) {
                    Ok(v) => v,
                    // constant candidates carry no correlation
                    Err(Error::ConstantImage) => 0.0,
                    Err(Error::ZeroSsim) => f64::INFINITY,
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(Evaluation::new(fitness, self.violation(x)))
    }

    /// Bi-objective evaluation `(-PSNR(x, T), -PSNR(x, T'))`.
    pub fn evaluate_pair(&self, x: &[f64]) -> Result<MoEvaluation> {
        let inverse = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::IncompatibleTarget("problem has a single objective".into()))?;
        let values = self.decode(x)?;
        let f1 = MetricId::Psnr.fitness(&values, &self.targets[0], &self.ctx)?;
        let f2 = MetricId::Psnr.fitness(&values, inverse, &self.ctx)?;
        Ok((vec![f1, f2], self.violation(x)))
    }

    /// Random starting position drawn from the init stream.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match (self.domain, self.encoding) {
            (DomainKind::Permutation, PermutationEncoding::Matrix) => random_permutation(&self.multiset, rng)
                .into_iter()
                .map(f64::from)
                .collect(),
            (DomainKind::Permutation, PermutationEncoding::RelativePosition) => {
                let perm = random_permutation(&self.multiset, rng);
                rpi_encode(&perm).unwrap_or_else(|_| (0..perm.len()).map(|_| rng.gen::<f64>()).collect())
            }
            _ => (0..self.dimension())
                .map(|k| rng.gen_range(self.search.lower[k]..=self.search.upper[k]))
                .collect(),
        }
    }

    /// Visualization intensities in `[0, 1]` (column-major).
    pub fn pixels(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.mapper {
            Mapper::LinearError(map) => {
                let mut clamped = x.to_vec();
                self.search.clamp(&mut clamped);
                Ok(matrix_to_vector(&linear_error_map(&clamped, map)?))
            }
            Mapper::Direct => Ok(self
                .decode(x)?
                .into_iter()
                .map(|v| (v / self.scale).clamp(0.0, 1.0))
                .collect()),
        }
    }

    /// The mapped image of a solution.
    pub fn render(&self, x: &[f64]) -> Result<PixelMatrix> {
        vector_to_matrix(&self.pixels(x)?, self.height, self.width)
    }

    /// Error heatmap of a solution against the target of environment `env`
    /// (or against the known optimum).
    pub fn heatmap(&self, x: &[f64], env: usize) -> Result<RgbRaster> {
        match &self.mapper {
            Mapper::LinearError(map) => {
                let palette = HeatmapPalette::per_dimension(map.max_error());
                error_heatmap(x, map.optimum(), &palette, self.height, self.width)
            }
            Mapper::Direct => {
                let values = self.decode(x)?;
                let target = self.target_vector(env);
                let (lo, hi) = match self.domain {
                    DomainKind::Continuous => (self.search.lower.clone(), self.search.upper.clone()),
                    _ => (vec![0.0; values.len()], vec![self.scale; values.len()]),
                };
                let max: Vec<f64> = (0..values.len())
                    .map(|k| (target[k] - lo[k]).max(hi[k] - target[k]))
                    .collect();
                error_heatmap(&values, target, &HeatmapPalette::per_dimension(max), self.height, self.width)
            }
        }
    }
}

/// One block of the dynamic schedule: iterations `start..end` use frame `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub index: usize,
    pub start: usize,
    pub end: usize,
}

/// Equal contiguous blocks of iterations, one per frame; the final block
/// absorbs any remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvironmentSchedule {
    starts: Vec<usize>,
    iterations: usize,
}

impl EnvironmentSchedule {
    pub fn new(frames: usize, iterations: usize) -> Result<Self> {
        if frames == 0 {
            return Err(Error::Empty("environment frames"));
        }
        if iterations < frames {
            return Err(Error::InvalidParameter {
                name: "iterations",
                reason: format!("{iterations} iterations cannot cover {frames} environments"),
            });
        }
        let block = iterations / frames;
        Ok(Self {
            starts: (0..frames).map(|k| k * block).collect(),
            iterations,
        })
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Iterations at which a new environment begins (excluding iteration 0).
    pub fn switch_points(&self) -> &[usize] {
        &self.starts[1..]
    }

    pub fn environments(&self) -> Vec<Environment> {
        (0..self.starts.len())
            .map(|index| Environment {
                index,
                start: self.starts[index],
                end: self.starts.get(index + 1).copied().unwrap_or(self.iterations),
            })
            .collect()
    }

    pub fn index(&self, iteration: usize) -> usize {
        environment_index(iteration, self)
    }

    /// True when `iteration` is the first iteration of a new environment.
    pub fn is_switch(&self, iteration: usize) -> bool {
        iteration > 0 && self.starts.binary_search(&iteration).is_ok()
    }
}

/// Index of the environment active at `iteration`.
pub fn environment_index(iteration: usize, schedule: &EnvironmentSchedule) -> usize {
    schedule.starts.partition_point(|&s| s <= iteration) - 1
}

/// Complements every pixel of a binary target.
pub fn invert_target(target: &TargetImage) -> Result<TargetImage> {
    if target.mode() != TargetMode::Binary {
        return Err(Error::IncompatibleTarget("only binary targets can be inverted".into()));
    }
    let frames = target
        .frames()
        .iter()
        .map(|f| PixelMatrix::from_row_major(f.height(), f.width(), f.values().iter().map(|v| 1.0 - v).collect()))
        .collect::<Result<Vec<_>>>()?;
    TargetImage::new(TargetMode::Binary, frames)
}

/// Per-pixel mean of several solutions, laid out as an image.
pub fn average_image(solutions: &[Vec<f64>], height: usize, width: usize) -> Result<PixelMatrix> {
    let first = solutions.first().ok_or(Error::Empty("solutions"))?;
    let d = first.len();
    let mut sum = vec![0.0; d];
    for s in solutions {
        check_len(d, s.len())?;
        for (acc, v) in sum.iter_mut().zip(s) {
            *acc += v;
        }
    }
    let n = solutions.len() as f64;
    let mean: Vec<f64> = sum.into_iter().map(|v| v / n).collect();
    vector_to_matrix(&mean, height, width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray_target(mode: TargetMode, rows: &[Vec<f64>]) -> TargetImage {
        TargetImage::single(mode, PixelMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn continuous_domain() {
        let t = TargetImage::single(TargetMode::Continuous, PixelMatrix::filled(30, 30, 0.5).unwrap()).unwrap();
        let p = build_problem(Scheme::Continuous, &t, MetricId::Sae, ProblemOptions::default()).unwrap();
        assert_eq!(p.dimension(), 900);
        assert_eq!(p.search, Bounds::uniform(900, 0.0, 1.0).unwrap());
    }

    #[test]
    fn constrained_domain() {
        let t = TargetImage::single(TargetMode::Continuous, PixelMatrix::filled(3, 3, 0.5).unwrap()).unwrap();
        let p = build_problem(Scheme::Constrained, &t, MetricId::Sae, ProblemOptions::default()).unwrap();
        assert_eq!(p.search, Bounds::uniform(9, -1.0, 2.0).unwrap());
        assert_eq!(p.feasible, Bounds::uniform(9, 0.0, 1.0).unwrap());
        assert_eq!(p.violation_saturation(), 18.0);
        let mut x = vec![0.5; 9];
        x[0] = 1.5;
        let e = p.evaluate(&x, 0).unwrap();
        assert_eq!(e.violation, 0.5);
        assert_eq!(e.fitness, 1.0);
    }

    #[test]
    fn incompatible_targets() {
        let t = gray_target(TargetMode::Continuous, &[vec![0.5, 0.2]]);
        assert!(build_problem(Scheme::Binary, &t, MetricId::Sae, ProblemOptions::default()).is_err());
        assert!(build_problem(Scheme::Combinatorial, &t, MetricId::Sae, ProblemOptions::default()).is_err());
        assert!(build_problem(Scheme::Dynamic, &t, MetricId::Sae, ProblemOptions::default()).is_err());
        assert!(
            build_problem(Scheme::PartiallySeparable { p: 1.5 }, &t, MetricId::Sae, ProblemOptions::default()).is_err()
        );
    }

    #[test]
    fn discrete_evaluates_on_byte_scale() {
        let t = gray_target(TargetMode::Discrete8, &[vec![0.0, 1.0]]);
        let p = build_problem(Scheme::Discrete, &t, MetricId::Sae, ProblemOptions::default()).unwrap();
        let e = p.evaluate(&[0.4, 254.5], 0).unwrap();
        assert_eq!(e.fitness, 0.0);
        let e = p.evaluate(&[10.2, 250.0], 0).unwrap();
        assert_eq!(e.fitness, 15.0);
        assert_eq!(p.ctx.psnr_range, 255.0);
    }

    #[test]
    fn schedule_blocks() {
        let s = EnvironmentSchedule::new(21, 2100).unwrap();
        assert_eq!(s.index(0), 0);
        assert_eq!(s.index(99), 0);
        assert_eq!(s.index(100), 1);
        assert_eq!(s.index(2099), 20);
        assert!(s.is_switch(100) && !s.is_switch(0) && !s.is_switch(101));
        let r = EnvironmentSchedule::new(21, 2110).unwrap();
        let envs = r.environments();
        assert_eq!(envs[20], Environment { index: 20, start: 2000, end: 2110 });
        assert_eq!(envs.iter().map(|e| e.end - e.start).sum::<usize>(), 2110);
        assert!(EnvironmentSchedule::new(21, 20).is_err());
    }

    #[test]
    fn inversion() {
        let t = gray_target(TargetMode::Binary, &[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let inv = invert_target(&t).unwrap();
        assert_eq!(inv.matrix().rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(invert_target(&inv).unwrap(), t);
        let c = gray_target(TargetMode::Continuous, &[vec![0.5]]);
        assert!(invert_target(&c).is_err());
    }

    #[test]
    fn averaging() {
        let avg = average_image(&[vec![0.0, 1.0], vec![1.0, 1.0]], 1, 2).unwrap();
        assert_eq!(avg.rows(), vec![vec![0.5, 1.0]]);
        assert!(average_image(&[], 1, 1).is_err());
    }
}
