//! DE/rand/1/bin with greedy in-place replacement.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Bounds, ComparisonRule, Evaluation, RngStreams};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    /// Differential weight.
    pub f: f64,
    /// Crossover probability.
    pub cr: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self { f: 0.5, cr: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub position: Vec<f64>,
    pub eval: Evaluation,
}

/// Three mutually distinct indices in `0..n`, all different from `exclude`.
pub fn pick_donors(n: usize, exclude: usize, rng: &mut impl Rng) -> Result<[usize; 3]> {
    if n < 4 {
        return Err(Error::PopulationTooSmall { size: n, needed: 4 });
    }
    let mut picked = [usize::MAX; 3];
    for slot in 0..3 {
        loop {
            let idx = rng.gen_range(0..n);
            if idx != exclude && !picked[..slot].contains(&idx) {
                picked[slot] = idx;
                break;
            }
        }
    }
    Ok(picked)
}

/// Binomial crossover of `x` with the mutant `a + F(b - c)`, with one forced
/// dimension, clamped into `bounds`. The forced dimension comes from the
/// selection stream and the per-dimension coins from the motion stream.
pub fn de_trial_from_donors(
    x: &[f64],
    a: &[f64],
    b: &[f64],
    c: &[f64],
    params: &DeParams,
    bounds: &Bounds,
    rng: &mut RngStreams,
) -> Vec<f64> {
    let d = x.len();
    let forced = rng.selection.gen_range(0..d);
    let mut trial: Vec<f64> = (0..d)
        .map(|k| {
            let coin: f64 = rng.motion.gen();
            if coin < params.cr || k == forced {
                a[k] + params.f * (b[k] - c[k])
            } else {
                x[k]
            }
        })
        .collect();
    bounds.clamp(&mut trial);
    trial
}

/// Trial vector for member `index` of `population`.
pub fn de_trial(
    index: usize,
    population: &[Individual],
    params: &DeParams,
    bounds: &Bounds,
    rng: &mut RngStreams,
) -> Result<Vec<f64>> {
    let [a, b, c] = pick_donors(population.len(), index, &mut rng.selection)?;
    Ok(de_trial_from_donors(
        &population[index].position,
        &population[a].position,
        &population[b].position,
        &population[c].position,
        params,
        bounds,
        rng,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DePopulation {
    pub individuals: Vec<Individual>,
    pub params: DeParams,
    pub search: Bounds,
    pub rule: ComparisonRule,
}

impl DePopulation {
    pub fn initialize<S, F>(
        size: usize,
        search: Bounds,
        params: DeParams,
        rule: ComparisonRule,
        mut sample: S,
        mut objective: F,
        rng: &mut RngStreams,
    ) -> Result<Self>
    where
        S: FnMut(&mut ChaCha8Rng) -> Vec<f64>,
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        if size < 4 {
            return Err(Error::PopulationTooSmall { size, needed: 4 });
        }
        let mut individuals = Vec::with_capacity(size);
        for _ in 0..size {
            let position = sample(&mut rng.init);
            check_len(search.dimension(), position.len())?;
            let eval = objective(&position)?;
            individuals.push(Individual { position, eval });
        }
        Ok(Self {
            individuals,
            params,
            search,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// One generation of DE/rand/1/bin.
    pub fn step<F>(&mut self, objective: F, rng: &mut RngStreams) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        let params = self.params;
        let search = self.search.clone();
        self.step_with(
            |i, pop, rng| de_trial(i, pop, &params, &search, rng),
            objective,
            rng,
        )
    }

    /// One generation with a custom trial generator. Members are processed in
    /// index order and a trial replaces its parent as soon as it is strictly
    /// better, so later trials already see the replacement.
    pub fn step_with<T, F>(&mut self, mut trial: T, mut objective: F, rng: &mut RngStreams) -> Result<usize>
    where
        T: FnMut(usize, &[Individual], &mut RngStreams) -> Result<Vec<f64>>,
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        for i in 0..self.individuals.len() {
            let candidate = trial(i, &self.individuals, rng)?;
            let eval = objective(&candidate)?;
            if self.rule.better(&eval, &self.individuals[i].eval) {
                self.individuals[i] = Individual {
                    position: candidate,
                    eval,
                };
            }
        }
        Ok(self.individuals.len())
    }

    pub fn reevaluate<F>(&mut self, mut objective: F) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        for ind in &mut self.individuals {
            ind.eval = objective(&ind.position)?;
        }
        Ok(self.individuals.len())
    }

    /// Index of the best member under the comparison rule (lowest index on ties).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.individuals.len() {
            if self.rule.better(&self.individuals[i].eval, &self.individuals[best].eval) {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> &Individual {
        &self.individuals[self.best_index()]
    }
}

pub fn de_step<F>(population: &mut DePopulation, objective: F, rng: &mut RngStreams) -> Result<usize>
where
    F: FnMut(&[f64]) -> Result<Evaluation>,
{
    population.step(objective, rng)
}
