//! Inertia-weight PSO with a star topology and asynchronous updates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Bounds, ComparisonRule, Evaluation, RngStreams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            inertia: 0.729844,
            cognitive: 1.49618,
            social: 1.49618,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best: Evaluation,
    pub current: Evaluation,
}

/// Velocity clamp of a tenth of the search width in every dimension.
pub fn velocity_limits(search: &Bounds) -> Vec<f64> {
    (0..search.dimension()).map(|k| 0.1 * search.width(k)).collect()
}

/// New velocity for one particle using `draw` as the source of `U(0,1)`
/// values; per dimension `r1` is drawn before `r2`.
pub fn velocity_with(
    particle: &Particle,
    global_best: &[f64],
    params: &PsoParams,
    v_max: &[f64],
    mut draw: impl FnMut() -> f64,
) -> Vec<f64> {
    (0..particle.position.len())
        .map(|k| {
            let x = particle.position[k];
            let r1 = draw();
            let r2 = draw();
            let v = params.inertia * particle.velocity[k]
                + params.cognitive * r1 * (particle.best_position[k] - x)
                + params.social * r2 * (global_best[k] - x);
            v.clamp(-v_max[k], v_max[k])
        })
        .collect()
}

pub fn pso_velocity_update(
    particle: &Particle,
    global_best: &[f64],
    params: &PsoParams,
    v_max: &[f64],
    rng: &mut impl Rng,
) -> Vec<f64> {
    velocity_with(particle, global_best, params, v_max, || rng.gen::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub global_best_position: Vec<f64>,
    pub global_best: Evaluation,
    pub params: PsoParams,
    pub v_max: Vec<f64>,
    pub search: Bounds,
    pub rule: ComparisonRule,
}

impl Swarm {
    /// Samples `size` positions with `sample` (fed from the init stream),
    /// evaluates them, and starts every particle at rest.
    pub fn initialize<S, F>(
        size: usize,
        search: Bounds,
        params: PsoParams,
        rule: ComparisonRule,
        mut sample: S,
        mut objective: F,
        rng: &mut RngStreams,
    ) -> Result<Self>
    where
        S: FnMut(&mut ChaCha8Rng) -> Vec<f64>,
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        if size == 0 {
            return Err(Error::PopulationTooSmall { size, needed: 1 });
        }
        let d = search.dimension();
        let mut particles = Vec::with_capacity(size);
        for _ in 0..size {
            let position = sample(&mut rng.init);
            crate::error::check_len(d, position.len())?;
            let eval = objective(&position)?;
            particles.push(Particle {
                velocity: vec![0.0; d],
                best_position: position.clone(),
                position,
                best: eval,
                current: eval,
            });
        }
        let mut leader = 0;
        for i in 1..size {
            if rule.better(&particles[i].best, &particles[leader].best) {
                leader = i;
            }
        }
        Ok(Self {
            global_best_position: particles[leader].best_position.clone(),
            global_best: particles[leader].best,
            v_max: velocity_limits(&search),
            particles,
            params,
            search,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// One asynchronous iteration; returns the number of evaluations spent.
    pub fn step<F>(&mut self, mut objective: F, rng: &mut RngStreams) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        for i in 0..self.particles.len() {
            let velocity = pso_velocity_update(
                &self.particles[i],
                &self.global_best_position,
                &self.params,
                &self.v_max,
                &mut rng.motion,
            );
            let p = &mut self.particles[i];
            for (x, v) in p.position.iter_mut().zip(&velocity) {
                *x += v;
            }
            p.velocity = velocity;
            p.current = objective(&p.position)?;
            if self.rule.better(&p.current, &p.best) && self.search.contains(&p.position) {
                p.best = p.current;
                p.best_position.clone_from(&p.position);
            }
            if self.rule.better(&p.best, &self.global_best) {
                self.global_best = p.best;
                self.global_best_position.clone_from(&p.best_position);
            }
        }
        Ok(self.particles.len())
    }

    /// Recomputes every stored evaluation after an environment change;
    /// positions and velocities are untouched. Returns evaluations spent.
    pub fn reevaluate<F>(&mut self, mut objective: F) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<Evaluation>,
    {
        let mut spent = 0;
        for p in &mut self.particles {
            p.current = objective(&p.position)?;
            p.best = objective(&p.best_position)?;
            spent += 2;
        }
        self.global_best = objective(&self.global_best_position)?;
        spent += 1;
        for p in &self.particles {
            if self.rule.better(&p.best, &self.global_best) {
                self.global_best = p.best;
                self.global_best_position.clone_from(&p.best_position);
            }
        }
        Ok(spent)
    }

    pub fn best(&self) -> (&[f64], Evaluation) {
        (&self.global_best_position, self.global_best)
    }
}

pub fn pso_step<F>(state: &mut Swarm, objective: F, rng: &mut RngStreams) -> Result<usize>
where
    F: FnMut(&[f64]) -> Result<Evaluation>,
{
    state.step(objective, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn particle(x: f64, v: f64, y: f64) -> Particle {
        Particle {
            position: vec![x],
            velocity: vec![v],
            best_position: vec![y],
            best: Evaluation::unconstrained(0.0),
            current: Evaluation::unconstrained(0.0),
        }
    }

    #[test]
    fn fixed_point_at_rest() {
        let p = particle(0.3, 0.0, 0.3);
        let v = velocity_with(&p, &[0.3], &PsoParams::default(), &[1.0], || 0.77);
        assert_eq!(v, vec![0.0]);
    }

    #[test]
    fn pure_momentum() {
        let params = PsoParams {
            inertia: 1.0,
            cognitive: 0.0,
            social: 0.0,
        };
        let p = Particle {
            position: vec![0.0, 1.0],
            velocity: vec![0.3, -0.2],
            best_position: vec![5.0, 5.0],
            best: Evaluation::unconstrained(0.0),
            current: Evaluation::unconstrained(0.0),
        };
        let v = velocity_with(&p, &[9.0, 9.0], &params, &[1.0, 1.0], || 0.5);
        assert_eq!(v, vec![0.3, -0.2]);
    }

    #[test]
    fn hand_substitution_then_clamp() {
        let params = PsoParams {
            inertia: 0.5,
            ..PsoParams::default()
        };
        let p = particle(0.0, 0.0, 1.0);
        let raw = velocity_with(&p, &[2.0], &params, &[100.0], || 1.0);
        assert!((raw[0] - 4.48854).abs() < 1e-12);
        let clamped = velocity_with(&p, &[2.0], &params, &[0.5], || 1.0);
        assert_eq!(clamped, vec![0.5]);
    }

    fn sphere(x: &[f64]) -> Result<Evaluation> {
        Ok(Evaluation::unconstrained(x.iter().map(|v| v * v).sum()))
    }

    #[test]
    fn collapsed_swarm_stays_put() {
        let search = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let mut rng = RngStreams::new(3);
        let mut swarm = Swarm::initialize(
            4,
            search,
            PsoParams::default(),
            ComparisonRule::PlainFitness,
            |_| vec![0.0, 0.0],
            sphere,
            &mut rng,
        )
        .unwrap();
        let before = swarm.clone();
        swarm.step(sphere, &mut rng).unwrap();
        assert_eq!(swarm, before);
    }

    #[test]
    fn single_particle_gbest_tracks_pbest() {
        let search = Bounds::uniform(3, -5.0, 5.0).unwrap();
        let mut rng = RngStreams::new(11);
        let mut swarm = Swarm::initialize(
            1,
            search,
            PsoParams::default(),
            ComparisonRule::PlainFitness,
            |r| (0..3).map(|_| r.gen_range(-5.0..5.0)).collect(),
            sphere,
            &mut rng,
        )
        .unwrap();
        for _ in 0..20 {
            swarm.step(sphere, &mut rng).unwrap();
            assert_eq!(swarm.global_best_position, swarm.particles[0].best_position);
            assert_eq!(swarm.global_best, swarm.particles[0].best);
        }
    }

    #[test]
    fn pbest_ignores_out_of_bounds_improvements() {
        // objective rewards leaving the box; pbest must stay inside
        let search = Bounds::uniform(1, 0.0, 1.0).unwrap();
        let mut rng = RngStreams::new(5);
        let mut swarm = Swarm::initialize(
            5,
            search.clone(),
            PsoParams::default(),
            ComparisonRule::PlainFitness,
            |r| vec![r.gen_range(0.0..1.0)],
            |x: &[f64]| Ok(Evaluation::unconstrained(-x[0])),
            &mut rng,
        )
        .unwrap();
        for _ in 0..50 {
            swarm.step(|x: &[f64]| Ok(Evaluation::unconstrained(-x[0])), &mut rng).unwrap();
            for p in &swarm.particles {
                assert!(search.contains(&p.best_position));
                for (k, v) in p.velocity.iter().enumerate() {
                    assert!(v.abs() <= swarm.v_max[k]);
                }
            }
        }
    }
}
