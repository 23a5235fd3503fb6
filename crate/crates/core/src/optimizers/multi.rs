//! Pareto dominance, non-dominated sorting, crowding distance and GDE3.

use rand_chacha::ChaCha8Rng;

use super::de::{de_trial_from_donors, pick_donors, DeParams};
use super::{Bounds, RngStreams};
use crate::error::{check_len, Error, Result};

/// True when `a` is no worse than `b` in every objective and strictly better
/// in at least one (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    check_len(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Splits `points` into successive non-dominated fronts (indices into
/// `points`, ascending within each front).
pub fn nondominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates_unchecked(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_unchecked(&points[j], &points[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::take(&mut current));
        current = next;
    }
    fronts
}

/// Crowding distance of each member of a front: the sum over objectives of
/// the gap between its two sorted neighbors, infinite for boundary members.
pub fn crowding_distance(front: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = front.len();
    if n == 0 {
        return Err(Error::Empty("front"));
    }
    let m = front[0].len();
    for f in front {
        check_len(m, f.len())?;
    }
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return Ok(vec![f64::INFINITY; n]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    for j in 0..m {
        order.sort_by(|&a, &b| front[a][j].total_cmp(&front[b][j]));
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        for w in order.windows(3) {
            distance[w[1]] += (front[w[2]][j] - front[w[0]][j]).abs();
        }
    }
    Ok(distance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoIndividual {
    pub position: Vec<f64>,
    pub objectives: Vec<f64>,
    pub violation: f64,
}

impl MoIndividual {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// Outcome of comparing a parent with its trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survivor {
    Parent,
    Trial,
    Both,
}

/// GDE3 selection between a parent and its trial.
pub fn gde3_select(parent: &MoIndividual, trial: &MoIndividual) -> Survivor {
    match (parent.is_feasible(), trial.is_feasible()) {
        (false, false) => {
            if trial.violation < parent.violation {
                Survivor::Trial
            } else {
                Survivor::Parent
            }
        }
        (true, false) => Survivor::Parent,
        (false, true) => Survivor::Trial,
        (true, true) => {
            if dominates_unchecked(&trial.objectives, &parent.objectives) {
                Survivor::Trial
            } else if dominates_unchecked(&parent.objectives, &trial.objectives) {
                Survivor::Parent
            } else {
                Survivor::Both
            }
        }
    }
}

/// Keeps `size` members: whole fronts in rank order, then the members of the
/// first front that does not fit by descending crowding distance. Infeasible
/// members rank after every feasible one, ordered by violation.
pub fn prune(members: Vec<MoIndividual>, size: usize) -> Vec<MoIndividual> {
    if members.len() <= size {
        return members;
    }
    let feasible: Vec<usize> = (0..members.len()).filter(|&i| members[i].is_feasible()).collect();
    let mut infeasible: Vec<usize> = (0..members.len()).filter(|&i| !members[i].is_feasible()).collect();
    infeasible.sort_by(|&a, &b| members[a].violation.total_cmp(&members[b].violation));

    let points: Vec<Vec<f64>> = feasible.iter().map(|&i| members[i].objectives.clone()).collect();
    let mut ranked: Vec<Vec<usize>> = nondominated_sort(&points)
        .into_iter()
        .map(|front| front.into_iter().map(|k| feasible[k]).collect())
        .collect();
    ranked.extend(infeasible.into_iter().map(|i| vec![i]));

    let mut keep = Vec::with_capacity(size);
    for front in ranked {
        let room = size - keep.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            keep.extend(front);
        } else {
            let objs: Vec<Vec<f64>> = front.iter().map(|&i| members[i].objectives.clone()).collect();
            let cd = crowding_distance(&objs).expect("front is non-empty");
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]));
            keep.extend(order.into_iter().take(room).map(|k| front[k]));
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<MoIndividual>> = members.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("kept once")).collect()
}

/// Objective vector and total violation of a position.
pub type MoEvaluation = (Vec<f64>, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct Gde3Population {
    pub members: Vec<MoIndividual>,
    pub params: DeParams,
    pub search: Bounds,
    pub size: usize,
}

impl Gde3Population {
    pub fn initialize<S, F>(
        size: usize,
        search: Bounds,
        params: DeParams,
        mut sample: S,
        mut objective: F,
        rng: &mut RngStreams,
    ) -> Result<Self>
    where
        S: FnMut(&mut ChaCha8Rng) -> Vec<f64>,
        F: FnMut(&[f64]) -> Result<MoEvaluation>,
    {
        if size < 4 {
            return Err(Error::PopulationTooSmall { size, needed: 4 });
        }
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let position = sample(&mut rng.init);
            check_len(search.dimension(), position.len())?;
            let (objectives, violation) = objective(&position)?;
            members.push(MoIndividual {
                position,
                objectives,
                violation,
            });
        }
        Ok(Self {
            members,
            params,
            search,
            size,
        })
    }

    /// One generation: every parent produces a trial from the current
    /// population, survivors are selected pairwise and the result is pruned
    /// back to the target size.
    pub fn step<F>(&mut self, mut objective: F, rng: &mut RngStreams) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<MoEvaluation>,
    {
        let n = self.members.len();
        let mut next = Vec::with_capacity(2 * n);
        for i in 0..n {
            let [a, b, c] = pick_donors(n, i, &mut rng.selection)?;
            let position = de_trial_from_donors(
                &self.members[i].position,
                &self.members[a].position,
                &self.members[b].position,
                &self.members[c].position,
                &self.params,
                &self.search,
                rng,
            );
            let (objectives, violation) = objective(&position)?;
            let trial = MoIndividual {
                position,
                objectives,
                violation,
            };
            match gde3_select(&self.members[i], &trial) {
                Survivor::Parent => next.push(self.members[i].clone()),
                Survivor::Trial => next.push(trial),
                Survivor::Both => {
                    next.push(self.members[i].clone());
                    next.push(trial);
                }
            }
        }
        self.members = prune(next, self.size);
        Ok(n)
    }

    pub fn reevaluate<F>(&mut self, mut objective: F) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<MoEvaluation>,
    {
        for m in &mut self.members {
            let (objectives, violation) = objective(&m.position)?;
            m.objectives = objectives;
            m.violation = violation;
        }
        Ok(self.members.len())
    }

    /// Index of the member with the lowest value of objective `j`.
    pub fn extreme(&self, j: usize) -> usize {
        let mut best = 0;
        for i in 1..self.members.len() {
            if self.members[i].objectives[j] < self.members[best].objectives[j] {
                best = i;
            }
        }
        best
    }

    /// Size of the first non-dominated front.
    pub fn front_size(&self) -> usize {
        let points: Vec<Vec<f64>> = self.members.iter().map(|m| m.objectives.clone()).collect();
        nondominated_sort(&points).first().map_or(0, Vec::len)
    }
}

pub fn gde3_step<F>(population: &mut Gde3Population, objective: F, rng: &mut RngStreams) -> Result<usize>
where
    F: FnMut(&[f64]) -> Result<MoEvaluation>,
{
    population.step(objective, rng)
}
