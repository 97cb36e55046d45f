//! Adaptive Intelligence Optimizer.
//!
//! Two isolated PSO populations share one global best. Every iteration:
//!
//! 1. each dimension's automaton picks the swarm the dimension joins,
//! 2. each swarm's automaton picks which population (A or B) works on it,
//! 3. the guard picks the slow or quick inertia schedule from last
//!    iteration's progress,
//! 4. every non-empty swarm evaluates its chosen population through the
//!    context vector (global best with the swarm's dimensions replaced),
//! 5. both automaton layers are rewarded when their swarm improved the global
//!    best and penalized otherwise,
//! 6. every swarm ranks its particles, moves all of them on its dimensions and
//!    mutates the non-elite ones.
//!
//! With one swarm the membership layer holds no automata, since a
//! single-action automaton has nothing to learn.

use rand::Rng;

use crate::benchfn::BenchmarkSpec;
use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, RunTrace};
use crate::la::{Automaton, Signal};
use crate::pso::{inertia_weight, init_population, move_dims, InertiaMode, Particle, PsoParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Population {
    A,
    B,
}

impl Population {
    fn from_action(action: usize) -> Population {
        match action {
            0 => Population::A,
            _ => Population::B,
        }
    }

    pub fn action(self) -> usize {
        match self {
            Population::A => 0,
            Population::B => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AioParams {
    /// Number of swarms the dimensions are split into.
    pub swarm_count: usize,
    /// Share of each chosen population that counts as elite.
    pub elite_factor: f64,
    /// Per-dimension resampling probability for non-elite particles.
    pub mutation_rate: f64,
    pub la_reward: f64,
    pub la_penalty: f64,
}

impl Default for AioParams {
    fn default() -> Self {
        AioParams {
            swarm_count: 5,
            elite_factor: 2.0 / 3.0,
            mutation_rate: 0.1,
            la_reward: 0.1,
            la_penalty: 0.1,
        }
    }
}

impl AioParams {
    pub fn validate(&self, dims: usize) -> Result<()> {
        if self.swarm_count < 1 || self.swarm_count > dims {
            return Err(Error::config(format!(
                "tdr-factor must be in [1, {dims}], got {}",
                self.swarm_count
            )));
        }
        if !(self.elite_factor > 0.0 && self.elite_factor <= 1.0) {
            return Err(Error::config(format!(
                "elite-factor must be in (0, 1], got {}",
                self.elite_factor
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config(format!(
                "mutation-rate must be in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        for (tag, rate) in [("la-reward", self.la_reward), ("la-penalty", self.la_penalty)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::config(format!("{tag} must be in [0, 1], got {rate}")));
            }
        }
        Ok(())
    }

    /// `ceil(elite_factor * m)`, kept within `[1, m]`.
    pub fn elite_count(&self, m: usize) -> usize {
        // absorb representation error such as 0.1 * 30 = 3.0000000000000004
        let raw = (self.elite_factor * m as f64 - 1e-9).ceil();
        (raw.max(1.0) as usize).min(m)
    }
}

/// One automaton per dimension choosing that dimension's swarm.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipLayer {
    swarm_count: usize,
    dims: usize,
    pub automata: Vec<Automaton>,
}

impl MembershipLayer {
    pub fn new(dims: usize, swarm_count: usize, reward: f64, penalty: f64) -> Result<Self> {
        if swarm_count < 1 || swarm_count > dims {
            return Err(Error::config(format!(
                "swarm count must be in [1, {dims}], got {swarm_count}"
            )));
        }
        let automata = if swarm_count == 1 {
            Vec::new()
        } else {
            (0..dims)
                .map(|_| Automaton::new(swarm_count, reward, penalty))
                .collect::<Result<_>>()?
        };
        Ok(MembershipLayer { swarm_count, dims, automata })
    }

    pub fn swarm_count(&self) -> usize {
        self.swarm_count
    }

    pub fn dims(&self) -> usize {
        self.dims
    }
}

/// One two-action automaton per swarm choosing population A or B.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationSelector {
    pub automata: Vec<Automaton>,
}

impl PopulationSelector {
    pub fn new(swarm_count: usize, reward: f64, penalty: f64) -> Result<Self> {
        let automata = (0..swarm_count)
            .map(|_| Automaton::new(2, reward, penalty))
            .collect::<Result<_>>()?;
        Ok(PopulationSelector { automata })
    }
}

/// The two isolated populations. Only the global best crosses between them.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPopulation {
    pub pop_a: Vec<Particle>,
    pub pop_b: Vec<Particle>,
}

impl BiPopulation {
    pub fn get(&self, which: Population) -> &[Particle] {
        match which {
            Population::A => &self.pop_a,
            Population::B => &self.pop_b,
        }
    }

    pub fn get_mut(&mut self, which: Population) -> &mut [Particle] {
        match which {
            Population::A => &mut self.pop_a,
            Population::B => &mut self.pop_b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextState {
    pub gbest_position: Vec<f64>,
    pub gbest_fitness: f64,
    /// Guard: did any swarm improve the global best last iteration?
    pub improved_last_iteration: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwarmPartition {
    /// Swarm index chosen by each dimension.
    pub assignment: Vec<usize>,
    /// Dimensions of each swarm, ascending.
    pub members: Vec<Vec<usize>>,
    /// Population working on each swarm. Empty until populations are drawn.
    pub population_choice: Vec<Population>,
}

impl SwarmPartition {
    pub fn from_assignment(assignment: Vec<usize>, swarm_count: usize) -> Result<Self> {
        let mut members = vec![Vec::new(); swarm_count];
        for (d, &s) in assignment.iter().enumerate() {
            members
                .get_mut(s)
                .ok_or_else(|| {
                    Error::invalid(format!(
                        "dimension {d} assigned to swarm {s}, but only {swarm_count} swarms exist"
                    ))
                })?
                .push(d);
        }
        Ok(SwarmPartition { assignment, members, population_choice: Vec::new() })
    }

    pub fn swarm_count(&self) -> usize {
        self.members.len()
    }
}

/// Draws every dimension's swarm and groups the dimensions.
pub fn select_memberships<R: Rng + ?Sized>(layer: &MembershipLayer, rng: &mut R) -> SwarmPartition {
    let assignment = if layer.automata.is_empty() {
        vec![0; layer.dims]
    } else {
        layer.automata.iter().map(|la| la.select_action(rng)).collect()
    };
    SwarmPartition::from_assignment(assignment, layer.swarm_count)
        .expect("automata act within the swarm range")
}

pub fn select_populations<R: Rng + ?Sized>(
    selector: &PopulationSelector,
    rng: &mut R,
) -> Vec<Population> {
    selector
        .automata
        .iter()
        .map(|la| Population::from_action(la.select_action(rng)))
        .collect()
}

/// Global best with `values` written over `swarm_dims`.
pub fn context_vector(swarm_dims: &[usize], values: &[f64], gbest: &[f64]) -> Result<Vec<f64>> {
    if swarm_dims.len() != values.len() {
        return Err(Error::invalid(format!(
            "{} swarm dimensions but {} values",
            swarm_dims.len(),
            values.len()
        )));
    }
    let mut context = gbest.to_vec();
    for (&d, &v) in swarm_dims.iter().zip(values) {
        *context.get_mut(d).ok_or_else(|| {
            Error::invalid(format!(
                "dimension {d} out of range for {} dimensions",
                gbest.len()
            ))
        })? = v;
    }
    Ok(context)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwarmEvaluation {
    /// Context fitness of each particle of the chosen population.
    pub fitnesses: Vec<f64>,
    /// Whether this swarm strictly lowered the global best.
    pub improved: bool,
}

/// Scores every particle of `population` on `swarm_dims` against the shared
/// context, refreshes their memories on those dimensions and merges the
/// winner into the global best.
///
/// A particle's memory is compared in the same context as its current
/// position, so `pbest_fitness` afterwards holds the context fitness of the
/// kept memory.
pub fn evaluate_swarm(
    swarm_dims: &[usize],
    population: &mut [Particle],
    context: &mut ContextState,
    spec: &BenchmarkSpec,
) -> SwarmEvaluation {
    let mut buffer = context.gbest_position.clone();
    let fitnesses: Vec<f64> = population
        .iter()
        .map(|p| {
            for &d in swarm_dims {
                buffer[d] = p.position[d];
            }
            spec.evaluate(&buffer)
        })
        .collect();

    for (p, &f) in population.iter_mut().zip(&fitnesses) {
        // the stored fitness was measured against an older context, possibly
        // on other dimensions; rescore the memory against the current one
        for &d in swarm_dims {
            buffer[d] = p.pbest_position[d];
        }
        p.pbest_fitness = spec.evaluate(&buffer);
        if f < p.pbest_fitness {
            p.pbest_fitness = f;
            for &d in swarm_dims {
                p.pbest_position[d] = p.position[d];
            }
        }
    }

    let winner = fitnesses
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, &f)| match best {
            Some((_, bf)) if bf <= f => best,
            _ => Some((i, f)),
        });
    let mut improved = false;
    if let Some((i, f)) = winner {
        if f < context.gbest_fitness {
            for &d in swarm_dims {
                context.gbest_position[d] = population[i].position[d];
            }
            context.gbest_fitness = f;
            improved = true;
        }
    }
    SwarmEvaluation { fitnesses, improved }
}

/// Rewards or penalizes, per non-empty swarm, the swarm's population automaton
/// and every dimension automaton that chose the swarm.
pub fn reinforce_layers(
    partition: &SwarmPartition,
    improvements: &[bool],
    layer: &mut MembershipLayer,
    selector: &mut PopulationSelector,
) -> Result<()> {
    let k = partition.swarm_count();
    if improvements.len() != k || partition.population_choice.len() != k || selector.automata.len() != k {
        return Err(Error::invalid(format!(
            "expected {k} swarms everywhere, got {} improvement flags, {} population choices, {} selector automata",
            improvements.len(),
            partition.population_choice.len(),
            selector.automata.len()
        )));
    }
    for (j, dims) in partition.members.iter().enumerate() {
        if dims.is_empty() {
            continue;
        }
        let signal = if improvements[j] { Signal::Reward } else { Signal::Penalty };
        selector.automata[j].reinforce(partition.population_choice[j].action(), signal)?;
        if !layer.automata.is_empty() {
            for &d in dims {
                layer.automata[d].reinforce(j, signal)?;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Concentration {
    /// Particle indices ranked best first; the first `elite_count` are elite.
    pub ranking: Vec<usize>,
    pub elite_count: usize,
    /// Number of (particle, dimension) pairs resampled.
    pub mutations: usize,
}

/// Ranks the chosen population by context fitness, moves every particle on
/// the swarm's dimensions and resamples non-elite coordinates at
/// `mutation_rate`.
#[allow(clippy::too_many_arguments)]
pub fn rank_and_concentrate<R: Rng + ?Sized>(
    swarm_dims: &[usize],
    population: &mut [Particle],
    fitnesses: &[f64],
    gbest: &[f64],
    w: f64,
    pso: &PsoParams,
    params: &AioParams,
    spec: &BenchmarkSpec,
    rng: &mut R,
) -> Concentration {
    let mut ranking: Vec<usize> = (0..population.len()).collect();
    ranking.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]));
    let elite_count = params.elite_count(population.len());
    let mut elite = vec![false; population.len()];
    for &i in &ranking[..elite_count] {
        elite[i] = true;
    }

    let mut mutations = 0;
    for (i, p) in population.iter_mut().enumerate() {
        move_dims(p, swarm_dims, gbest, w, pso, spec, rng);
        if elite[i] || params.mutation_rate == 0.0 {
            continue;
        }
        for &d in swarm_dims {
            if rng.random_bool(params.mutation_rate) {
                p.position[d] = rng.random_range(spec.lower..=spec.upper);
                p.velocity[d] = 0.0;
                mutations += 1;
            }
        }
    }
    Concentration { ranking, elite_count, mutations }
}

/// Decision cycle picked by the guard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cycle {
    /// No progress last iteration: keep more inertia.
    Slow,
    /// Progress last iteration: decay inertia at full rate.
    Quick,
}

impl Cycle {
    pub fn inertia_mode(self) -> InertiaMode {
        match self {
            Cycle::Slow => InertiaMode::Slow,
            Cycle::Quick => InertiaMode::Quick,
        }
    }
}

pub fn choose_cycle(context: &ContextState) -> Cycle {
    if context.improved_last_iteration {
        Cycle::Quick
    } else {
        Cycle::Slow
    }
}

/// Everything an optimizer run carries between iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct AioState {
    pub populations: BiPopulation,
    pub membership: MembershipLayer,
    pub selector: PopulationSelector,
    pub context: ContextState,
    /// Partition used by the most recent step.
    pub last_partition: Option<SwarmPartition>,
}

impl AioState {
    /// Two fresh populations and uniform automata on both layers.
    pub fn init<R: Rng + ?Sized>(
        spec: &BenchmarkSpec,
        pso: &PsoParams,
        params: &AioParams,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate(spec.dims)?;
        let (pop_a, best_a) = init_population(spec, pso.population_size, rng)?;
        let (pop_b, best_b) = init_population(spec, pso.population_size, rng)?;
        let best = if best_b.fitness < best_a.fitness { best_b } else { best_a };
        Ok(AioState {
            populations: BiPopulation { pop_a, pop_b },
            membership: MembershipLayer::new(
                spec.dims,
                params.swarm_count,
                params.la_reward,
                params.la_penalty,
            )?,
            selector: PopulationSelector::new(params.swarm_count, params.la_reward, params.la_penalty)?,
            context: ContextState {
                gbest_position: best.position,
                gbest_fitness: best.fitness,
                improved_last_iteration: false,
            },
            last_partition: None,
        })
    }
}

/// One optimizer iteration. Returns the global best fitness afterwards.
pub fn aio_step<R: Rng + ?Sized>(
    state: &mut AioState,
    spec: &BenchmarkSpec,
    pso: &PsoParams,
    params: &AioParams,
    i: usize,
    rng: &mut R,
) -> f64 {
    let mut partition = select_memberships(&state.membership, rng);
    partition.population_choice = select_populations(&state.selector, rng);
    let w = inertia_weight(choose_cycle(&state.context).inertia_mode(), i, pso);

    let k = partition.swarm_count();
    let mut improvements = vec![false; k];
    let mut fitnesses: Vec<Vec<f64>> = vec![Vec::new(); k];
    for j in 0..k {
        let dims = &partition.members[j];
        if dims.is_empty() {
            continue;
        }
        let population = state.populations.get_mut(partition.population_choice[j]);
        let eval = evaluate_swarm(dims, population, &mut state.context, spec);
        improvements[j] = eval.improved;
        fitnesses[j] = eval.fitnesses;
    }

    reinforce_layers(&partition, &improvements, &mut state.membership, &mut state.selector)
        .expect("partition was drawn from these layers");

    for j in 0..k {
        let dims = &partition.members[j];
        if dims.is_empty() {
            continue;
        }
        let population = state.populations.get_mut(partition.population_choice[j]);
        rank_and_concentrate(
            dims,
            population,
            &fitnesses[j],
            &state.context.gbest_position,
            w,
            pso,
            params,
            spec,
            rng,
        );
    }

    state.context.improved_last_iteration = improvements.iter().any(|&b| b);
    state.last_partition = Some(partition);
    state.context.gbest_fitness
}

/// Runs the optimizer for `config.pso_params.max_iterations` steps.
pub fn run_aio(config: &ExperimentConfig, seed: u64) -> Result<RunTrace> {
    let spec = config.benchmark_spec()?;
    let pso = &config.pso_params;
    let params = &config.aio_params;
    pso.validate()?;
    let mut rng = crate::rng_for_seed(seed);
    let mut state = AioState::init(&spec, pso, params, &mut rng)?;
    let initial = state.context.gbest_fitness;
    let best_per_iteration = (0..pso.max_iterations)
        .map(|i| aio_step(&mut state, &spec, pso, params, i, &mut rng))
        .collect();
    Ok(RunTrace::new(seed, initial, best_per_iteration))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchfn::{lookup, BenchmarkId};
    use crate::harness::Algorithm;
    use crate::pso::{pso_step, SwarmBest};
    use crate::rng_for_seed;
    use proptest::prelude::*;

    fn degenerate(actions: usize, chosen: usize) -> Automaton {
        let mut p = vec![0.0; actions];
        p[chosen] = 1.0;
        Automaton::new(actions, 0.1, 0.1).unwrap().with_probabilities(p).unwrap()
    }

    #[test]
    fn elite_counts() {
        let params = AioParams::default();
        assert_eq!(params.elite_count(50), 34);
        let one = AioParams { elite_factor: 1.0, ..AioParams::default() };
        assert_eq!(one.elite_count(50), 50);
        let tenth = AioParams { elite_factor: 0.1, ..AioParams::default() };
        assert_eq!(tenth.elite_count(30), 3);
        let tiny = AioParams { elite_factor: 1e-6, ..AioParams::default() };
        assert_eq!(tiny.elite_count(20), 1);
    }

    #[test]
    fn params_validation() {
        assert!(AioParams::default().validate(30).is_ok());
        assert!(AioParams { swarm_count: 0, ..AioParams::default() }.validate(30).is_err());
        assert!(AioParams { swarm_count: 31, ..AioParams::default() }.validate(30).is_err());
        assert!(AioParams { elite_factor: 0.0, ..AioParams::default() }.validate(30).is_err());
        assert!(AioParams { elite_factor: 1.5, ..AioParams::default() }.validate(30).is_err());
        assert!(AioParams { mutation_rate: -0.5, ..AioParams::default() }.validate(30).is_err());
    }

    #[test]
    fn grouping_from_forced_actions() {
        let part = SwarmPartition::from_assignment(vec![0, 1, 0, 1, 0, 1], 2).unwrap();
        assert_eq!(part.members, vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(SwarmPartition::from_assignment(vec![0, 2], 2).is_err());
    }

    #[test]
    fn degenerate_membership() {
        let mut layer = MembershipLayer::new(4, 3, 0.1, 0.1).unwrap();
        layer.automata = (0..4).map(|_| degenerate(3, 0)).collect();
        let part = select_memberships(&layer, &mut rng_for_seed(1));
        assert_eq!(part.members, vec![vec![0, 1, 2, 3], vec![], vec![]]);
    }

    #[test]
    fn one_swarm_per_dimension() {
        let n = 6;
        let mut layer = MembershipLayer::new(n, n, 0.1, 0.1).unwrap();
        layer.automata = (0..n).map(|d| degenerate(n, d)).collect();
        let part = select_memberships(&layer, &mut rng_for_seed(4));
        let expected: Vec<Vec<usize>> = (0..n).map(|d| vec![d]).collect();
        assert_eq!(part.members, expected);
    }

    #[test]
    fn population_choices() {
        let mut selector = PopulationSelector::new(5, 0.1, 0.1).unwrap();
        let mut rng = rng_for_seed(2);
        assert_eq!(select_populations(&selector, &mut rng).len(), 5);
        selector.automata[0] = degenerate(2, 0);
        selector.automata[1] = degenerate(2, 1);
        for _ in 0..100 {
            let picks = select_populations(&selector, &mut rng);
            assert_eq!(picks[0], Population::A);
            assert_eq!(picks[1], Population::B);
        }
    }

    #[test]
    fn context_vector_cases() {
        assert_eq!(context_vector(&[1], &[4.0], &[9.0, 9.0, 9.0]).unwrap(), vec![9.0, 4.0, 9.0]);
        assert_eq!(
            context_vector(&[0, 1, 2], &[1.0, 2.0, 3.0], &[9.0, 9.0, 9.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(context_vector(&[0, 2], &[7.0, 8.0], &[7.0, 1.0, 8.0]).unwrap(), vec![7.0, 1.0, 8.0]);
        assert!(matches!(
            context_vector(&[3], &[1.0], &[0.0; 3]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evaluate_full_cover_at_origin() {
        let spec = lookup(BenchmarkId::Sphere, 3).unwrap();
        let mut pop = vec![Particle::at(vec![0.0; 3], f64::INFINITY)];
        let mut ctx = ContextState {
            gbest_position: vec![5.0; 3],
            gbest_fitness: 75.0,
            improved_last_iteration: false,
        };
        let eval = evaluate_swarm(&[0, 1, 2], &mut pop, &mut ctx, &spec);
        assert_eq!(eval.fitnesses, vec![0.0]);
        assert!(eval.improved);
        assert_eq!(ctx.gbest_fitness, 0.0);
        assert_eq!(ctx.gbest_position, vec![0.0; 3]);
        assert_eq!(pop[0].pbest_fitness, 0.0);
    }

    #[test]
    fn evaluate_fixed_point() {
        let spec = lookup(BenchmarkId::Rastrigin, 4).unwrap();
        let gbest = vec![0.5, -1.0, 2.0, 0.25];
        let f = spec.evaluate(&gbest);
        let mut pop: Vec<Particle> = (0..3)
            .map(|i| {
                let mut x = vec![i as f64; 4];
                x[1] = gbest[1];
                x[3] = gbest[3];
                Particle::at(x, 1e9)
            })
            .collect();
        let mut ctx = ContextState {
            gbest_position: gbest.clone(),
            gbest_fitness: f,
            improved_last_iteration: true,
        };
        let eval = evaluate_swarm(&[1, 3], &mut pop, &mut ctx, &spec);
        assert!(!eval.improved);
        assert_eq!(ctx.gbest_position, gbest);
        assert_eq!(ctx.gbest_fitness, f);
        // memories only change on the swarm's dimensions
        assert_eq!(pop[2].pbest_position, vec![2.0, -1.0, 2.0, 0.25]);
        assert_eq!(pop[2].pbest_fitness, f);
    }

    #[test]
    fn memory_rescored_in_current_context() {
        let spec = lookup(BenchmarkId::Sphere, 3).unwrap();
        // stored fitness is stale and far lower than anything reachable now
        let mut p = Particle::at(vec![1.0, 2.0, 3.0], 1e-9);
        p.pbest_position = vec![1.0, 5.0, 3.0];
        let mut pop = vec![p];
        let mut ctx = ContextState {
            gbest_position: vec![0.0, 0.0, 0.0],
            gbest_fitness: 0.0,
            improved_last_iteration: false,
        };
        let eval = evaluate_swarm(&[1], &mut pop, &mut ctx, &spec);
        assert_eq!(eval.fitnesses, vec![4.0]);
        assert!(!eval.improved);
        assert_eq!(pop[0].pbest_position, vec![1.0, 2.0, 3.0]);
        assert_eq!(pop[0].pbest_fitness, 4.0);
    }

    #[test]
    fn reinforcement_examples() {
        let part = SwarmPartition {
            population_choice: vec![Population::A, Population::B, Population::A],
            ..SwarmPartition::from_assignment(vec![0, 0, 1, 0], 3).unwrap()
        };
        let mut layer = MembershipLayer::new(4, 3, 0.1, 0.1).unwrap();
        let mut selector = PopulationSelector::new(3, 0.1, 0.1).unwrap();
        reinforce_layers(&part, &[true, false, true], &mut layer, &mut selector).unwrap();
        let p = selector.automata[0].probabilities();
        assert!((p[0] - 0.55).abs() < 1e-12 && (p[1] - 0.45).abs() < 1e-12);
        let p = selector.automata[1].probabilities();
        assert!((p[0] - 0.55).abs() < 1e-12 && (p[1] - 0.45).abs() < 1e-12);
        // swarm 2 is empty
        assert_eq!(selector.automata[2].probabilities(), &[0.5, 0.5]);
        let third = 1.0 / 3.0;
        let rewarded = [third * 0.9 + 0.1, third * 0.9, third * 0.9];
        for d in [0, 1, 3] {
            let p = layer.automata[d].probabilities();
            assert!(p.iter().zip(&rewarded).all(|(a, b)| (a - b).abs() < 1e-12), "{p:?}");
        }
        let p = layer.automata[2].probabilities();
        let penalized = [0.05 + 0.9 * third, 0.9 * third, 0.05 + 0.9 * third];
        assert!(p.iter().zip(&penalized).all(|(a, b)| (a - b).abs() < 1e-12), "{p:?}");
    }

    #[test]
    fn inaction_leaves_layers_alone() {
        let part = SwarmPartition {
            population_choice: vec![Population::B, Population::A],
            ..SwarmPartition::from_assignment(vec![1, 1, 1], 2).unwrap()
        };
        let mut layer = MembershipLayer::new(3, 2, 0.1, 0.0).unwrap();
        let mut selector = PopulationSelector::new(2, 0.1, 0.0).unwrap();
        let (l0, s0) = (layer.clone(), selector.clone());
        reinforce_layers(&part, &[false, false], &mut layer, &mut selector).unwrap();
        assert_eq!(layer, l0);
        assert_eq!(selector, s0);
    }

    fn ranked_population(spec: &BenchmarkSpec, m: usize, seed: u64) -> (Vec<Particle>, Vec<f64>) {
        let (pop, _) = init_population(spec, m, &mut rng_for_seed(seed)).unwrap();
        let fit = pop.iter().map(|p| p.pbest_fitness).collect();
        (pop, fit)
    }

    #[test]
    fn concentrate_counts() {
        let spec = lookup(BenchmarkId::Sphere, 6).unwrap();
        let (mut pop, fit) = ranked_population(&spec, 50, 3);
        let gbest = vec![0.0; 6];
        let pso = PsoParams::default();
        let out = rank_and_concentrate(
            &[0, 2, 4], &mut pop, &fit, &gbest, 0.7, &pso, &AioParams::default(), &spec, &mut rng_for_seed(1),
        );
        assert_eq!(out.elite_count, 34);
        for w in out.ranking.windows(2) {
            assert!(fit[w[0]] <= fit[w[1]]);
        }
    }

    #[test]
    fn zero_mutation_matches_all_elite() {
        let spec = lookup(BenchmarkId::Griewank, 5).unwrap();
        let (pop, fit) = ranked_population(&spec, 12, 8);
        let gbest = pop[0].position.clone();
        let pso = PsoParams::default();
        let run = |params: AioParams| {
            let mut pop = pop.clone();
            let out = rank_and_concentrate(&[1, 3, 4], &mut pop, &fit, &gbest, 0.6, &pso, &params, &spec, &mut rng_for_seed(5));
            (pop, out.mutations)
        };
        let (no_mutation, m0) = run(AioParams { mutation_rate: 0.0, ..AioParams::default() });
        let (all_elite, m1) = run(AioParams { elite_factor: 1.0, mutation_rate: 1.0, ..AioParams::default() });
        assert_eq!(no_mutation, all_elite);
        assert_eq!((m0, m1), (0, 0));

        let (mutated, m2) = run(AioParams { mutation_rate: 1.0, ..AioParams::default() });
        assert!(m2 > 0);
        for (after, before) in mutated.iter().zip(&pop) {
            assert!(after.position.iter().all(|x| (spec.lower..=spec.upper).contains(x)));
            // dimensions outside the swarm never move
            assert_eq!(after.position[0], before.position[0]);
            assert_eq!(after.position[2], before.position[2]);
        }
    }

    #[test]
    fn guard() {
        let mut ctx = ContextState {
            gbest_position: vec![0.0],
            gbest_fitness: 0.0,
            improved_last_iteration: false,
        };
        assert_eq!(choose_cycle(&ctx), Cycle::Slow);
        ctx.improved_last_iteration = true;
        assert_eq!(choose_cycle(&ctx), Cycle::Quick);
        assert_eq!(Cycle::Quick.inertia_mode(), InertiaMode::Quick);
    }

    #[test]
    fn first_iteration_is_slow() {
        let spec = lookup(BenchmarkId::Sphere, 4).unwrap();
        let pso = PsoParams { population_size: 5, ..PsoParams::default() };
        let state = AioState::init(&spec, &pso, &AioParams { swarm_count: 2, ..AioParams::default() }, &mut rng_for_seed(0)).unwrap();
        assert_eq!(choose_cycle(&state.context), Cycle::Slow);
    }

    #[test]
    fn single_swarm_reduces_to_pso_step() {
        let spec = lookup(BenchmarkId::Ackley, 8).unwrap();
        let pso = PsoParams { population_size: 10, max_iterations: 100, ..PsoParams::default() };
        let params = AioParams { swarm_count: 1, elite_factor: 1.0, mutation_rate: 0.0, ..AioParams::default() };
        let mut state = AioState::init(&spec, &pso, &params, &mut rng_for_seed(21)).unwrap();

        for i in 0..20 {
            // a penalty would move the selector off the degenerate point
            state.selector.automata[0] = degenerate(2, 0);
            let mut pop = state.populations.pop_a.clone();
            let mut gbest = SwarmBest {
                position: state.context.gbest_position.clone(),
                fitness: state.context.gbest_fitness,
            };
            let baseline = PsoParams {
                inertia_mode: choose_cycle(&state.context).inertia_mode(),
                ..pso.clone()
            };
            let pop_b = state.populations.pop_b.clone();

            let mut rng = rng_for_seed(100 + i as u64);
            aio_step(&mut state, &spec, &pso, &params, i, &mut rng);

            let mut rng = rng_for_seed(100 + i as u64);
            // the selector draws once even when degenerate
            let _: f64 = rng.random();
            pso_step(&mut pop, &mut gbest, &spec, &baseline, i, &mut rng);

            assert_eq!(state.populations.pop_a, pop, "iteration {i}");
            assert_eq!(state.context.gbest_fitness, gbest.fitness);
            assert_eq!(state.context.gbest_position, gbest.position);
            assert_eq!(state.populations.pop_b, pop_b);
        }
    }

    #[test]
    fn step_monotone_and_deterministic() {
        let spec = lookup(BenchmarkId::Rosenbrock, 10).unwrap();
        let pso = PsoParams { population_size: 12, max_iterations: 100, ..PsoParams::default() };
        let params = AioParams { swarm_count: 3, ..AioParams::default() };
        let init = AioState::init(&spec, &pso, &params, &mut rng_for_seed(6)).unwrap();
        let run = || {
            let mut state = init.clone();
            let mut rng = rng_for_seed(60);
            let mut prev = state.context.gbest_fitness;
            for i in 0..100 {
                let f = aio_step(&mut state, &spec, &pso, &params, i, &mut rng);
                assert!(f <= prev);
                prev = f;
            }
            state
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn run_improves_on_sphere() {
        let mut config = ExperimentConfig::for_benchmark(Algorithm::Aio, BenchmarkId::Sphere, 10);
        config.pso_params.population_size = 20;
        config.pso_params.max_iterations = 1000;
        config.aio_params.swarm_count = 3;
        let mut ratios: Vec<f64> = (0..5)
            .map(|s| {
                let t = run_aio(&config, s).unwrap();
                assert_eq!(t.best_per_iteration.len(), 1000);
                assert!(t.best_per_iteration.windows(2).all(|w| w[1] <= w[0]));
                t.final_fitness / t.initial_fitness
            })
            .collect();
        ratios.sort_by(f64::total_cmp);
        assert!(ratios[2] < 1.0, "{ratios:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn invariants_hold_over_iterations(seed in any::<u64>(), k in 1usize..=6, bench in 0usize..5) {
            let id = BenchmarkId::ALL[bench];
            let spec = lookup(id, 6).unwrap();
            let pso = PsoParams { population_size: 6, max_iterations: 30, ..PsoParams::default() };
            let params = AioParams { swarm_count: k, mutation_rate: 0.3, ..AioParams::default() };
            let mut rng = rng_for_seed(seed);
            let mut state = AioState::init(&spec, &pso, &params, &mut rng).unwrap();
            let mut prev = state.context.gbest_fitness;
            for i in 0..30 {
                let selector_before = state.selector.clone();
                let f = aio_step(&mut state, &spec, &pso, &params, i, &mut rng);
                prop_assert!(f <= prev);
                prev = f;

                let part = state.last_partition.as_ref().unwrap();
                let mut seen = vec![0usize; 6];
                for dims in &part.members {
                    for &d in dims {
                        seen[d] += 1;
                    }
                }
                prop_assert!(seen.iter().all(|&c| c == 1));

                for (j, dims) in part.members.iter().enumerate() {
                    let touched = state.selector.automata[j] != selector_before.automata[j];
                    if dims.is_empty() {
                        prop_assert!(!touched);
                    }
                }

                for la in state.membership.automata.iter().chain(&state.selector.automata) {
                    let sum: f64 = la.probabilities().iter().sum();
                    prop_assert!((sum - 1.0).abs() < 1e-9);
                }
                for p in state.populations.pop_a.iter().chain(&state.populations.pop_b) {
                    prop_assert!(p.position.iter().all(|x| (spec.lower..=spec.upper).contains(x)));
                }
            }
        }
    }
}
