//! Symbiotic Organism Search.
//!
//! Every iteration sweeps the organisms in index order and applies mutualism,
//! commensalism and parasitism to each one. Replacement needs a strictly lower fitness, and
//! positions are clipped into the box after every move.
//!
//! Random draws are consumed in this order, from one stream per run:
//!
//! - initialization: for each organism, one uniform per dimension;
//! - mutualism: partner `j`, `BF1`, `BF2`, `r_i`, `r_j`;
//! - commensalism: partner `j`, `r` in `[-1, 1)`;
//! - parasitism: partner `j`, then either coin flips per dimension (repeated until at
//!   least one dimension is chosen) followed by one uniform per chosen dimension, or a
//!   single `r` for [`ParasiteMode::ScalarMultiply`].

use alloc::vec::Vec;
use core::fmt;

use super::{
    initial_positions, Draws, Evaluator, OptimizationResult, OptimizerConfig, OptimizerError, Organism,
    ParasiteMode, SearchSpace, SeededDraws,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Mutualism,
    Commensalism,
    Parasitism,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Mutualism => "mutualism",
            Phase::Commensalism => "commensalism",
            Phase::Parasitism => "parasitism",
        })
    }
}

/// One phase application. `Display` renders a single comma-separated trace record:
/// `iteration,organism,partner,phase,accepted|rejected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseEvent {
    pub iteration: usize,
    pub organism: usize,
    pub partner: usize,
    pub phase: Phase,
    /// Whether any organism was replaced.
    pub accepted: bool,
}

impl fmt::Display for PhaseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{}",
            self.iteration,
            self.organism,
            self.partner,
            self.phase,
            if self.accepted { "accepted" } else { "rejected" }
        )
    }
}

/// The SOS population together with its best-so-far organism and random stream.
pub struct Ecosystem<'a, D> {
    space: &'a SearchSpace,
    organisms: Vec<Organism>,
    best: Organism,
    iteration: usize,
    evaluations: usize,
    draws: D,
    parasite_mode: ParasiteMode,
}

impl<'a, D: Draws> Ecosystem<'a, D> {
    /// Random initial ecosystem: uniform positions inside the box (the first ones replaced
    /// by `guesses`), evaluated in order.
    pub fn initialize<F>(
        space: &'a SearchSpace,
        population_size: usize,
        guesses: &[Vec<f64>],
        mut draws: D,
        parasite_mode: ParasiteMode,
        objective: &mut F,
    ) -> Result<Self, OptimizerError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        if population_size < 2 {
            return Err(OptimizerError::PopulationTooSmall(population_size));
        }
        let positions = initial_positions(space, population_size, guesses, &mut draws);
        let mut evaluator = Evaluator::new(&mut *objective);
        let mut organisms = Vec::with_capacity(population_size);
        for position in positions {
            let fitness = evaluator.eval(&position)?;
            organisms.push(Organism { position, fitness });
        }
        let evaluations = evaluator.calls;
        let mut eco = Self::from_organisms(space, organisms, draws, parasite_mode)?;
        eco.evaluations = evaluations;
        Ok(eco)
    }

    /// Ecosystem from already evaluated organisms. The caller guarantees that each
    /// `fitness` is the objective value at its `position`.
    pub fn from_organisms(
        space: &'a SearchSpace,
        organisms: Vec<Organism>,
        draws: D,
        parasite_mode: ParasiteMode,
    ) -> Result<Self, OptimizerError> {
        if organisms.len() < 2 {
            return Err(OptimizerError::PopulationTooSmall(organisms.len()));
        }
        for o in &organisms {
            if o.position.len() != space.dimension() {
                return Err(OptimizerError::LengthMismatch {
                    expected: space.dimension(),
                    got: o.position.len(),
                });
            }
        }
        let mut best = 0;
        for (k, o) in organisms.iter().enumerate() {
            if o.fitness < organisms[best].fitness {
                best = k;
            }
        }
        Ok(Self {
            space,
            best: organisms[best].clone(),
            organisms,
            iteration: 0,
            evaluations: 0,
            draws,
            parasite_mode,
        })
    }

    pub fn organisms(&self) -> &[Organism] {
        &self.organisms
    }

    pub fn best(&self) -> &Organism {
        &self.best
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Objective calls made through this ecosystem so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn evaluate<F>(&mut self, objective: &mut F, position: &[f64]) -> Result<f64, OptimizerError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut evaluator = Evaluator::new(&mut *objective);
        let value = evaluator.eval(position);
        self.evaluations += 1;
        value
    }

    fn replace(&mut self, k: usize, position: Vec<f64>, fitness: f64) {
        if fitness < self.best.fitness {
            self.best = Organism {
                position: position.clone(),
                fitness,
            };
        }
        self.organisms[k] = Organism { position, fitness };
    }

    fn check_index(&self, i: usize) {
        assert!(
            i < self.organisms.len(),
            "organism index {i} out of range for population {}",
            self.organisms.len()
        );
    }

    /// Both `x_i` and a random partner `x_j` move toward the best organism relative to
    /// their mean, each scaled by its own benefit factor.
    pub fn mutualism_step<F>(&mut self, i: usize, objective: &mut F) -> Result<PhaseEvent, OptimizerError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        self.check_index(i);
        let n = self.organisms.len();
        let j = self.draws.partner(i, n);
        let bf1 = self.draws.benefit_factor();
        let bf2 = self.draws.benefit_factor();
        let r_i = self.draws.unit();
        let r_j = self.draws.unit();

        let xi = &self.organisms[i].position;
        let xj = &self.organisms[j].position;
        let xbest = &self.best.position;
        let mut cand_i = Vec::with_capacity(xi.len());
        let mut cand_j = Vec::with_capacity(xi.len());
        for d in 0..xi.len() {
            let mutual = 0.5 * (xi[d] + xj[d]);
            cand_i.push(xi[d] + r_i * (xbest[d] - mutual * bf1));
            cand_j.push(xj[d] + r_j * (xbest[d] - mutual * bf2));
        }
        self.space.clamp_in_place(&mut cand_i);
        self.space.clamp_in_place(&mut cand_j);

        let fit_i = self.evaluate(objective, &cand_i)?;
        let fit_j = self.evaluate(objective, &cand_j)?;
        let mut accepted = false;
        if fit_i < self.organisms[i].fitness {
            self.replace(i, cand_i, fit_i);
            accepted = true;
        }
        if fit_j < self.organisms[j].fitness {
            self.replace(j, cand_j, fit_j);
            accepted = true;
        }
        Ok(self.event(i, j, Phase::Mutualism, accepted))
    }

    /// `x_i` moves along `x_best - x_j`; the partner is never modified.
    pub fn commensalism_step<F>(
        &mut self,
        i: usize,
        objective: &mut F,
    ) -> Result<PhaseEvent, OptimizerError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        self.check_index(i);
        let j = self.draws.partner(i, self.organisms.len());
        let r = self.draws.signed_unit();

        let xi = &self.organisms[i].position;
        let xj = &self.organisms[j].position;
        let mut cand: Vec<f64> = xi
            .iter()
            .zip(xj)
            .zip(&self.best.position)
            .map(|((&a, &b), &best)| a + r * (best - b))
            .collect();
        self.space.clamp_in_place(&mut cand);

        let fit = self.evaluate(objective, &cand)?;
        let accepted = fit < self.organisms[i].fitness;
        if accepted {
            self.replace(i, cand, fit);
        }
        Ok(self.event(i, j, Phase::Commensalism, accepted))
    }

    /// A parasite built from `x_i` challenges a random partner `x_j`, replacing it only
    /// when strictly fitter.
    pub fn parasitism_step<F>(&mut self, i: usize, objective: &mut F) -> Result<PhaseEvent, OptimizerError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        self.check_index(i);
        let j = self.draws.partner(i, self.organisms.len());
        let parasite = self.parasite_from(i);

        let fit = self.evaluate(objective, &parasite)?;
        let accepted = fit < self.organisms[j].fitness;
        if accepted {
            self.replace(j, parasite, fit);
        }
        Ok(self.event(i, j, Phase::Parasitism, accepted))
    }

    fn parasite_from(&mut self, i: usize) -> Vec<f64> {
        let mut parasite = self.organisms[i].position.clone();
        match self.parasite_mode {
            ParasiteMode::SubsetResample => {
                let dim = parasite.len();
                let mut chosen = alloc::vec![false; dim];
                loop {
                    for c in chosen.iter_mut() {
                        *c = self.draws.coin();
                    }
                    if chosen.iter().any(|&c| c) {
                        break;
                    }
                }
                for d in 0..dim {
                    if chosen[d] {
                        parasite[d] = self.draws.uniform(self.space.lower()[d], self.space.upper()[d]);
                    }
                }
            }
            ParasiteMode::ScalarMultiply => {
                let r = self.draws.unit();
                for x in parasite.iter_mut() {
                    *x *= r;
                }
                self.space.clamp_in_place(&mut parasite);
            }
        }
        parasite
    }

    fn event(&self, organism: usize, partner: usize, phase: Phase, accepted: bool) -> PhaseEvent {
        PhaseEvent {
            iteration: self.iteration,
            organism,
            partner,
            phase,
            accepted,
        }
    }

    /// One full iteration: all three phases for every organism in index order.
    pub fn sweep<F, O>(&mut self, objective: &mut F, observer: &mut O) -> Result<(), OptimizerError>
    where
        F: FnMut(&[f64]) -> f64,
        O: FnMut(&PhaseEvent),
    {
        for i in 0..self.organisms.len() {
            observer(&self.mutualism_step(i, objective)?);
            observer(&self.commensalism_step(i, objective)?);
            observer(&self.parasitism_step(i, objective)?);
        }
        self.iteration += 1;
        Ok(())
    }
}

/// SOS minimization of `objective` over `space`.
pub fn optimize<F>(
    objective: F,
    space: &SearchSpace,
    config: &OptimizerConfig,
) -> Result<OptimizationResult, OptimizerError>
where
    F: FnMut(&[f64]) -> f64,
{
    optimize_traced(objective, space, config, |_| {})
}

/// [`optimize`] that reports every phase application to `observer`.
pub fn optimize_traced<F, O>(
    mut objective: F,
    space: &SearchSpace,
    config: &OptimizerConfig,
    mut observer: O,
) -> Result<OptimizationResult, OptimizerError>
where
    F: FnMut(&[f64]) -> f64,
    O: FnMut(&PhaseEvent),
{
    config.validate(space)?;
    let mut eco = Ecosystem::initialize(
        space,
        config.population_size,
        &config.initial_guesses,
        SeededDraws::new(config.seed),
        config.parasite_mode,
        &mut objective,
    )?;
    let mut history = Vec::with_capacity(config.max_iterations);
    for _ in 0..config.max_iterations {
        eco.sweep(&mut objective, &mut observer)?;
        history.push(eco.best.fitness);
    }
    Ok(OptimizationResult {
        best_position: eco.best.position.clone(),
        best_fitness: eco.best.fitness,
        fitness_history: history,
        evaluations: eco.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::VecDeque;
    use alloc::vec;

    /// Replays scripted values; panics when the script runs dry.
    #[derive(Default)]
    struct Scripted {
        partners: VecDeque<usize>,
        factors: VecDeque<f64>,
        units: VecDeque<f64>,
        signed: VecDeque<f64>,
        uniforms: VecDeque<f64>,
        coins: VecDeque<bool>,
    }

    impl Draws for Scripted {
        fn partner(&mut self, _exclude: usize, _n: usize) -> usize {
            self.partners.pop_front().unwrap()
        }
        fn benefit_factor(&mut self) -> f64 {
            self.factors.pop_front().unwrap()
        }
        fn unit(&mut self) -> f64 {
            self.units.pop_front().unwrap()
        }
        fn signed_unit(&mut self) -> f64 {
            self.signed.pop_front().unwrap()
        }
        fn uniform(&mut self, _lower: f64, _upper: f64) -> f64 {
            self.uniforms.pop_front().unwrap()
        }
        fn coin(&mut self) -> bool {
            self.coins.pop_front().unwrap()
        }
    }

    fn org(position: Vec<f64>, f: impl Fn(&[f64]) -> f64) -> Organism {
        let fitness = f(&position);
        Organism { position, fitness }
    }

    fn square_dist_to(target: f64) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| x.iter().map(|v| (v - target) * (v - target)).sum()
    }

    #[test]
    fn mutualism_hand_evaluated_candidate() {
        // best at 1: x_i = 2, x_j = 4, BF1 = 1, r_i = 0.5 -> mutual 3, candidate 1.0
        let space = SearchSpace::cube(1, -10.0, 10.0).unwrap();
        let f = square_dist_to(1.0);
        let orgs = vec![org(vec![2.0], &f), org(vec![4.0], &f), org(vec![1.0], &f)];
        let draws = Scripted {
            partners: [1].into(),
            factors: [1.0, 1.0].into(),
            units: [0.5, 0.0].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs, draws, ParasiteMode::SubsetResample).unwrap();
        let mut seen = Vec::new();
        let mut obj = |x: &[f64]| {
            seen.push(x[0]);
            f(x)
        };
        let ev = eco.mutualism_step(0, &mut obj).unwrap();
        assert_eq!(seen[0], 1.0);
        assert!(ev.accepted);
        assert_eq!(eco.organisms()[0].position, vec![1.0]);
        // r_j = 0 leaves j where it was and a tie is not an improvement
        assert_eq!(eco.organisms()[1].position, vec![4.0]);
    }

    #[test]
    fn mutualism_fixed_point_at_origin() {
        let space = SearchSpace::cube(2, -5.0, 5.0).unwrap();
        let f = square_dist_to(0.0);
        let orgs = vec![org(vec![0.0, 0.0], &f), org(vec![0.0, 0.0], &f)];
        let draws = Scripted {
            partners: [1].into(),
            factors: [2.0, 2.0].into(),
            units: [0.7, 0.3].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs, draws, ParasiteMode::SubsetResample).unwrap();
        let mut queries = Vec::new();
        let mut obj = |x: &[f64]| {
            queries.push(x.to_vec());
            f(x)
        };
        let ev = eco.mutualism_step(0, &mut obj).unwrap();
        assert_eq!(queries, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(!ev.accepted);
    }

    #[test]
    fn mutualism_rejects_worse_candidates() {
        let space = SearchSpace::cube(1, -10.0, 10.0).unwrap();
        let f = square_dist_to(1.0);
        // x_i is the best; moving it away can only hurt
        let orgs = vec![org(vec![1.0], &f), org(vec![1.5], &f)];
        let draws = Scripted {
            partners: [1].into(),
            factors: [2.0, 2.0].into(),
            units: [0.9, 0.9].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs.clone(), draws, ParasiteMode::SubsetResample).unwrap();
        let best_before = eco.best().clone();
        let ev = eco.mutualism_step(0, &mut |x: &[f64]| f(x)).unwrap();
        assert!(!ev.accepted);
        assert_eq!(eco.organisms(), &orgs[..]);
        assert_eq!(eco.best(), &best_before);
    }

    #[test]
    fn commensalism_hand_evaluated_candidate() {
        // best at 1 (organism 2): x_i = 5, x_j = 2, r = -0.5 -> 5.5
        let space = SearchSpace::cube(1, -10.0, 10.0).unwrap();
        let f = square_dist_to(1.0);
        let orgs = vec![org(vec![5.0], &f), org(vec![2.0], &f), org(vec![1.0], &f)];
        let draws = Scripted {
            partners: [1].into(),
            signed: [-0.5].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs.clone(), draws, ParasiteMode::SubsetResample).unwrap();
        let mut seen = Vec::new();
        let ev = eco
            .commensalism_step(0, &mut |x: &[f64]| {
                seen.push(x[0]);
                f(x)
            })
            .unwrap();
        assert_eq!(seen, vec![5.5]);
        assert!(!ev.accepted);
        assert_eq!(eco.organisms(), &orgs[..]);
    }

    #[test]
    fn commensalism_partner_equal_to_best_does_not_move() {
        let space = SearchSpace::cube(2, -10.0, 10.0).unwrap();
        let f = square_dist_to(0.0);
        let orgs = vec![org(vec![3.0, -2.0], &f), org(vec![0.5, 0.5], &f)];
        let draws = Scripted {
            partners: [1].into(),
            signed: [0.93].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs, draws, ParasiteMode::SubsetResample).unwrap();
        let mut seen = Vec::new();
        eco.commensalism_step(0, &mut |x: &[f64]| {
            seen.push(x.to_vec());
            f(x)
        })
        .unwrap();
        assert_eq!(seen, vec![vec![3.0, -2.0]]);
    }

    #[test]
    fn commensalism_leaves_partner_untouched() {
        let space = SearchSpace::cube(1, -10.0, 10.0).unwrap();
        let f = square_dist_to(0.0);
        let orgs = vec![org(vec![5.0], &f), org(vec![2.0], &f), org(vec![0.1], &f)];
        let draws = Scripted {
            partners: [1].into(),
            signed: [0.8].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs.clone(), draws, ParasiteMode::SubsetResample).unwrap();
        let ev = eco.commensalism_step(0, &mut |x: &[f64]| f(x)).unwrap();
        assert!(ev.accepted);
        assert_eq!(eco.organisms()[1], orgs[1]);
        assert_eq!(eco.organisms()[2], orgs[2]);
    }

    #[test]
    fn parasite_replaces_partner_only_when_strictly_fitter() {
        let space = SearchSpace::cube(2, -5.0, 5.0).unwrap();
        let f = square_dist_to(0.0);
        let orgs = vec![org(vec![1.0, 1.0], &f), org(vec![4.0, 4.0], &f)];
        // resample dim 1 only: parasite = [1.0, 0.5]
        let draws = Scripted {
            partners: [1, 1].into(),
            coins: [false, true, true, false].into(),
            uniforms: [0.5, 4.5].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs, draws, ParasiteMode::SubsetResample).unwrap();
        let ev = eco.parasitism_step(0, &mut |x: &[f64]| f(x)).unwrap();
        assert!(ev.accepted);
        assert_eq!(eco.organisms()[1].position, vec![1.0, 0.5]);
        assert_eq!(eco.organisms()[1].fitness, 1.25);

        // second round: parasite = [4.5, 1.0], fitness 21.25 > 1.25
        let ev = eco.parasitism_step(0, &mut |x: &[f64]| f(x)).unwrap();
        assert!(!ev.accepted);
        assert_eq!(eco.organisms()[1].position, vec![1.0, 0.5]);
    }

    #[test]
    fn parasite_retries_empty_subsets() {
        let space = SearchSpace::cube(2, -5.0, 5.0).unwrap();
        let f = square_dist_to(0.0);
        let orgs = vec![org(vec![1.0, 1.0], &f), org(vec![4.0, 4.0], &f)];
        let draws = Scripted {
            partners: [1].into(),
            coins: [false, false, true, true].into(),
            uniforms: [0.25, -0.25].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs, draws, ParasiteMode::SubsetResample).unwrap();
        eco.parasitism_step(0, &mut |x: &[f64]| f(x)).unwrap();
        assert_eq!(eco.organisms()[1].position, vec![0.25, -0.25]);
    }

    #[test]
    fn scalar_multiply_parasite() {
        let space = SearchSpace::cube(2, -5.0, 5.0).unwrap();
        let f = square_dist_to(0.0);
        let orgs = vec![org(vec![2.0, -4.0], &f), org(vec![4.0, 4.0], &f)];
        let draws = Scripted {
            partners: [1].into(),
            units: [0.25].into(),
            ..Default::default()
        };
        let mut eco = Ecosystem::from_organisms(&space, orgs, draws, ParasiteMode::ScalarMultiply).unwrap();
        eco.parasitism_step(0, &mut |x: &[f64]| f(x)).unwrap();
        assert_eq!(eco.organisms()[1].position, vec![0.5, -1.0]);
    }

    #[test]
    fn event_record_format() {
        let ev = PhaseEvent {
            iteration: 3,
            organism: 7,
            partner: 1,
            phase: Phase::Commensalism,
            accepted: false,
        };
        assert_eq!(alloc::format!("{ev}"), "3,7,1,commensalism,rejected");
    }
}
