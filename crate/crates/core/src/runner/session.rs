//! Iteration-level driver shared by the file-emitting runner and tests.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimizers::adapters::permutation_de_trial;
use crate::optimizers::de::Individual;
use crate::optimizers::{ComparisonRule, DeParams, DePopulation, Gde3Population, PsoParams, RngStreams, Swarm};
use crate::schemes::{DomainKind, EnvironmentSchedule, PermutationEncoding, ProblemSpec};

use super::config::{OptimizerKind, RunConfig};

/// Optimizer choice and control parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineSettings {
    pub optimizer: OptimizerKind,
    pub population: usize,
    pub pso: PsoParams,
    pub de: DeParams,
    pub rule: ComparisonRule,
}

impl EngineSettings {
    pub fn new(optimizer: OptimizerKind, population: usize) -> Self {
        Self {
            optimizer,
            population,
            pso: PsoParams::default(),
            de: DeParams::default(),
            rule: optimizer.default_rule(),
        }
    }
}

impl From<&RunConfig> for EngineSettings {
    fn from(cfg: &RunConfig) -> Self {
        Self {
            optimizer: cfg.optimizer,
            population: cfg.population,
            pso: cfg.pso,
            de: cfg.de,
            rule: cfg.rule(),
        }
    }
}

/// Optimizer state.
#[derive(Debug, Clone)]
pub enum Engine {
    Pso(Swarm),
    De(DePopulation),
    Gde3(Gde3Population),
}

/// Best solution(s) currently held by an engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSnapshot {
    pub solution: Vec<f64>,
    /// One value for single-objective runs, the per-objective minima otherwise.
    pub fitness: Vec<f64>,
    pub violation: f64,
    /// Extreme for the second objective (multi-objective runs).
    pub solution_2: Option<Vec<f64>>,
}

impl Engine {
    pub fn initialize(problem: &ProblemSpec, settings: &EngineSettings, env: usize, rng: &mut RngStreams) -> Result<Self> {
        let sample = |r: &mut rand_chacha::ChaCha8Rng| problem.sample(r);
        let search = problem.search.clone();
        Ok(match settings.optimizer {
            OptimizerKind::Gde3 => Engine::Gde3(Gde3Population::initialize(
                settings.population,
                search,
                settings.de,
                sample,
                |x: &[f64]| problem.evaluate_pair(x),
                rng,
            )?),
            OptimizerKind::De => Engine::De(DePopulation::initialize(
                settings.population,
                search,
                settings.de,
                settings.rule,
                sample,
                |x: &[f64]| problem.evaluate(x, env),
                rng,
            )?),
            _ => Engine::Pso(Swarm::initialize(
                settings.population,
                search,
                settings.pso,
                settings.rule,
                sample,
                |x: &[f64]| problem.evaluate(x, env),
                rng,
            )?),
        })
    }

    /// One iteration; returns evaluations spent.
    pub fn step(&mut self, problem: &ProblemSpec, env: usize, rng: &mut RngStreams) -> Result<usize> {
        let objective = |x: &[f64]| problem.evaluate(x, env);
        match self {
            Engine::Pso(swarm) => swarm.step(objective, rng),
            Engine::De(pop) => {
                if problem.domain == DomainKind::Permutation && problem.encoding == PermutationEncoding::Matrix {
                    let f = pop.params.f;
                    pop.step_with(
                        |i, members: &[Individual], rng| {
                            let views: Vec<&[f64]> = members.iter().map(|m| m.position.as_slice()).collect();
                            permutation_de_trial(i, &views, f, &mut rng.selection)
                        },
                        objective,
                        rng,
                    )
                } else {
                    pop.step(objective, rng)
                }
            }
            Engine::Gde3(pop) => pop.step(|x: &[f64]| problem.evaluate_pair(x), rng),
        }
    }

    /// Refreshes stored evaluations for environment `env`.
    pub fn reevaluate(&mut self, problem: &ProblemSpec, env: usize) -> Result<usize> {
        let objective = |x: &[f64]| problem.evaluate(x, env);
        match self {
            Engine::Pso(swarm) => swarm.reevaluate(objective),
            Engine::De(pop) => pop.reevaluate(objective),
            Engine::Gde3(pop) => pop.reevaluate(|x: &[f64]| problem.evaluate_pair(x)),
        }
    }

    pub fn best(&self) -> BestSnapshot {
        match self {
            Engine::Pso(swarm) => BestSnapshot {
                solution: swarm.global_best_position.clone(),
                fitness: vec![swarm.global_best.fitness],
                violation: swarm.global_best.violation,
                solution_2: None,
            },
            Engine::De(pop) => {
                let best = pop.best();
                BestSnapshot {
                    solution: best.position.clone(),
                    fitness: vec![best.eval.fitness],
                    violation: best.eval.violation,
                    solution_2: None,
                }
            }
            Engine::Gde3(pop) => {
                let (a, b) = (&pop.members[pop.extreme(0)], &pop.members[pop.extreme(1)]);
                BestSnapshot {
                    solution: a.position.clone(),
                    fitness: vec![a.objectives[0], b.objectives[1]],
                    violation: pop.members.iter().map(|m| m.violation).fold(f64::INFINITY, f64::min),
                    solution_2: Some(b.position.clone()),
                }
            }
        }
    }
}

/// One logged iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub iteration: usize,
    /// Cumulative evaluations spent by initialization and iterations;
    /// re-evaluations after environment changes are counted separately.
    pub evaluations: usize,
    pub best_fitness: f64,
    pub best_fitness_2: Option<f64>,
    pub violation_sum: f64,
    pub env_index: usize,
}

impl RunRecord {
    pub fn csv_header(multi_objective: bool) -> &'static str {
        if multi_objective {
            "iteration,evaluations,best_fitness,best_fitness_2,violation_sum,env_index"
        } else {
            "iteration,evaluations,best_fitness,violation_sum,env_index"
        }
    }

    pub fn csv_row(&self) -> String {
        match self.best_fitness_2 {
            Some(f2) => format!(
                "{},{},{},{},{},{}",
                self.iteration, self.evaluations, self.best_fitness, f2, self.violation_sum, self.env_index
            ),
            None => format!(
                "{},{},{},{},{}",
                self.iteration, self.evaluations, self.best_fitness, self.violation_sum, self.env_index
            ),
        }
    }
}

/// A run in progress. Iteration 0 is the initial population; every later
/// iteration first switches environment if one begins there, then steps.
pub struct Session<'p> {
    problem: &'p ProblemSpec,
    engine: Engine,
    rng: RngStreams,
    schedule: EnvironmentSchedule,
    iterations: usize,
    env: usize,
    evaluations: usize,
    reevaluations: usize,
    records: Vec<RunRecord>,
}

impl<'p> Session<'p> {
    pub fn start(problem: &'p ProblemSpec, settings: &EngineSettings, iterations: usize, seed: u64) -> Result<Self> {
        let schedule = EnvironmentSchedule::new(problem.frame_count(), iterations)?;
        let mut rng = RngStreams::new(seed);
        let engine = Engine::initialize(problem, settings, 0, &mut rng)?;
        let mut session = Self {
            problem,
            engine,
            rng,
            schedule,
            iterations,
            env: 0,
            evaluations: settings.population,
            reevaluations: 0,
            records: Vec::with_capacity(iterations),
        };
        session.record(0);
        Ok(session)
    }

    fn record(&mut self, iteration: usize) {
        let best = self.engine.best();
        self.records.push(RunRecord {
            iteration,
            evaluations: self.evaluations,
            best_fitness: best.fitness[0],
            best_fitness_2: best.fitness.get(1).copied(),
            violation_sum: best.violation,
            env_index: self.env,
        });
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.problem
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn schedule(&self) -> &EnvironmentSchedule {
        &self.schedule
    }

    pub fn environment(&self) -> usize {
        self.env
    }

    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    pub fn last_record(&self) -> &RunRecord {
        self.records.last().expect("initial record exists")
    }

    /// Index of the next iteration to run.
    pub fn next_iteration(&self) -> usize {
        self.records.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn reevaluations(&self) -> usize {
        self.reevaluations
    }

    pub fn is_finished(&self) -> bool {
        self.records.len() >= self.iterations
    }

    /// Switches to the environment of the next iteration if it changes,
    /// re-evaluating the stored state once. Returns whether a switch happened.
    pub fn switch_if_due(&mut self) -> Result<bool> {
        let env = self.schedule.index(self.next_iteration().min(self.iterations - 1));
        if env == self.env {
            return Ok(false);
        }
        self.env = env;
        self.reevaluations += self.engine.reevaluate(self.problem, env)?;
        Ok(true)
    }

    /// Runs the next iteration and returns its record.
    pub fn advance(&mut self) -> Result<&RunRecord> {
        let iteration = self.next_iteration();
        self.switch_if_due()?;
        self.evaluations += self.engine.step(self.problem, self.env, &mut self.rng)?;
        self.record(iteration);
        Ok(self.last_record())
    }

    pub fn run_to_end(mut self) -> Result<Vec<RunRecord>> {
        while !self.is_finished() {
            self.advance()?;
        }
        Ok(self.records)
    }

    pub fn into_parts(self) -> (Engine, Vec<RunRecord>) {
        (self.engine, self.records)
    }
}
