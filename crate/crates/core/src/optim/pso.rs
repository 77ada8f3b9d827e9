//! Global-best particle swarm with inertia, used as the comparison kernel.
//!
//! Draw order per run: one uniform coordinate per dimension for every particle position,
//! then one uniform velocity coordinate per dimension for every particle; then, per iteration and per
//! particle, `r1` and `r2` for each dimension in turn.

use alloc::vec::Vec;

use super::{
    initial_positions, Draws, Evaluator, OptimizationResult, OptimizerConfig, OptimizerError, PsoParams, SearchSpace,
    SeededDraws,
};

struct Particle {
    position: Vec<f64>,
    velocity: Vec<f64>,
    best_position: Vec<f64>,
    best_fitness: f64,
}

pub fn optimize<F>(
    objective: F,
    space: &SearchSpace,
    config: &OptimizerConfig,
) -> Result<OptimizationResult, OptimizerError>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate(space)?;
    let params: PsoParams = config.pso_params.ok_or(OptimizerError::MissingPsoParams)?;
    let mut draws = SeededDraws::new(config.seed);
    let mut evaluator = Evaluator::new(objective);

    let vmax: Vec<f64> = space
        .lower()
        .iter()
        .zip(space.upper())
        .map(|(lo, hi)| params.velocity_clamp * (hi - lo))
        .collect();

    let positions = initial_positions(space, config.population_size, &config.initial_guesses, &mut draws);
    let mut swarm = Vec::with_capacity(config.population_size);
    for position in positions {
        let velocity: Vec<f64> = vmax.iter().map(|&v| draws.uniform(-v, v)).collect();
        swarm.push(Particle {
            best_position: position.clone(),
            position,
            velocity,
            best_fitness: f64::INFINITY,
        });
    }
    for p in swarm.iter_mut() {
        p.best_fitness = evaluator.eval(&p.position)?;
    }
    let mut global_best = 0;
    for k in 1..swarm.len() {
        if swarm[k].best_fitness < swarm[global_best].best_fitness {
            global_best = k;
        }
    }
    let mut gbest_position = swarm[global_best].best_position.clone();
    let mut gbest_fitness = swarm[global_best].best_fitness;

    let mut history = Vec::with_capacity(config.max_iterations);
    for _ in 0..config.max_iterations {
        for p in swarm.iter_mut() {
            for d in 0..p.position.len() {
                let r1 = draws.unit();
                let r2 = draws.unit();
                let v = params.inertia * p.velocity[d]
                    + params.cognitive * r1 * (p.best_position[d] - p.position[d])
                    + params.social * r2 * (gbest_position[d] - p.position[d]);
                p.velocity[d] = v.clamp(-vmax[d], vmax[d]);
                p.position[d] += p.velocity[d];
            }
            space.clamp_in_place(&mut p.position);
            let fitness = evaluator.eval(&p.position)?;
            if fitness < p.best_fitness {
                p.best_fitness = fitness;
                p.best_position.clone_from(&p.position);
                if fitness < gbest_fitness {
                    gbest_fitness = fitness;
                    gbest_position.clone_from(&p.position);
                }
            }
        }
        history.push(gbest_fitness);
    }

    Ok(OptimizationResult {
        best_position: gbest_position,
        best_fitness: gbest_fitness,
        fitness_history: history,
        evaluations: evaluator.calls,
    })
}
