//! Population-based optimizers and the pieces they share: bounds,
//! constraint comparison, seeded random streams and domain adapters.

pub mod adapters;
pub mod de;
pub mod multi;
pub mod pso;
pub mod rng;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

pub use adapters::{binarize_threshold, discretize_round, permutation_de_trial, rpi_decode, rpi_encode};
pub use de::{de_step, de_trial, DeParams, DePopulation};
pub use multi::{crowding_distance, dominates, gde3_step, nondominated_sort, Gde3Population};
pub use pso::{pso_step, pso_velocity_update, PsoParams, Swarm};
pub use rng::RngStreams;

/// Fitness (minimized) together with the total constraint violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub fitness: f64,
    pub violation: f64,
}

impl Evaluation {
    pub fn new(fitness: f64, violation: f64) -> Self {
        Self { fitness, violation }
    }

    pub fn unconstrained(fitness: f64) -> Self {
        Self::new(fitness, 0.0)
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// How two evaluations are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonRule {
    /// Fitness only; violations are ignored.
    #[default]
    PlainFitness,
    /// Feasible beats infeasible, infeasible pairs compare by violation.
    DebFeasibilityFirst,
}

impl ComparisonRule {
    pub fn compare(&self, a: &Evaluation, b: &Evaluation) -> Ordering {
        match self {
            ComparisonRule::PlainFitness => a.fitness.total_cmp(&b.fitness),
            ComparisonRule::DebFeasibilityFirst => deb_compare(a, b),
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(&self, a: &Evaluation, b: &Evaluation) -> bool {
        self.compare(a, b) == Ordering::Less
    }
}

/// Feasibility-first ordering: `Less` means `a` ranks ahead of `b`.
pub fn deb_compare(a: &Evaluation, b: &Evaluation) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, true) => a.fitness.total_cmp(&b.fitness),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.violation.total_cmp(&b.violation),
    }
}

/// Total amount by which `x` leaves the box `[lower, upper]`.
pub fn violation_sum(x: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    x.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&v, (&l, &u))| (l - v).max(0.0) + (v - u).max(0.0))
        .sum()
}

/// Per-dimension box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if let Some(k) = (0..lower.len()).find(|&k| !(lower[k] < upper[k])) {
            return Err(Error::InvalidParameter {
                name: "bounds",
                reason: format!("component {k}: lower {} is not below upper {}", lower[k], upper[k]),
            });
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(d: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; d], vec![upper; d])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| (l..=u).contains(&v))
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[k], self.upper[k]);
        }
    }

    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        violation_sum(x, &self.lower, &self.upper)
    }

    /// True when `self` lies inside `outer`.
    pub fn within(&self, outer: &Bounds) -> bool {
        self.dimension() == outer.dimension()
            && (0..self.dimension()).all(|k| self.lower[k] >= outer.lower[k] && self.upper[k] <= outer.upper[k])
    }
}
