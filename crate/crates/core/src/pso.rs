//! Global-best particle swarm optimization.
//!
//! Also hosts the inertia-weight schedules and the per-dimension particle
//! move that the bi-population optimizer in [`crate::aio`] reuses.

use rand::Rng;

use crate::benchfn::BenchmarkSpec;
use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, RunTrace};

/// How the inertia weight evolves over a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InertiaMode {
    /// Constant `w_fixed`.
    Fixed,
    /// `w_max - 0.75 * i * (w_max - w_min) / i_max`
    Slow,
    /// `w_max - i * (w_max - w_min) / i_max`
    Quick,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsoParams {
    pub c1: f64,
    pub c2: f64,
    pub inertia_mode: InertiaMode,
    pub w_fixed: f64,
    pub w_max: f64,
    pub w_min: f64,
    pub population_size: usize,
    pub max_iterations: usize,
    /// Per-dimension velocity clamp. `None` uses the width of the search box.
    pub v_max: Option<f64>,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            c1: 1.49445,
            c2: 1.49445,
            inertia_mode: InertiaMode::Fixed,
            w_fixed: 0.74,
            w_max: 0.9,
            w_min: 0.4,
            population_size: 50,
            max_iterations: 10_000,
            v_max: None,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        for (tag, c) in [("c1", self.c1), ("c2", self.c2)] {
            if !(c > 0.0) {
                return Err(Error::config(format!("{tag} must be > 0, got {c}")));
            }
        }
        if !(self.w_min < self.w_max) {
            return Err(Error::config(format!(
                "w-min must be below w-max, got w-min={} w-max={}",
                self.w_min, self.w_max
            )));
        }
        if self.population_size < 2 {
            return Err(Error::config(format!(
                "population-size must be >= 2, got {}",
                self.population_size
            )));
        }
        if let Some(v) = self.v_max {
            if !(v > 0.0) {
                return Err(Error::config(format!("v-max must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn velocity_limit(&self, spec: &BenchmarkSpec) -> f64 {
        self.v_max.unwrap_or_else(|| spec.width())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

impl Particle {
    /// A resting particle whose memory is its current position.
    pub fn at(position: Vec<f64>, fitness: f64) -> Self {
        Particle {
            velocity: vec![0.0; position.len()],
            pbest_position: position.clone(),
            position,
            pbest_fitness: fitness,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwarmBest {
    pub position: Vec<f64>,
    pub fitness: f64,
}

impl SwarmBest {
    /// Best personal memory in `population`; ties keep the lowest index.
    pub fn of(population: &[Particle]) -> Option<Self> {
        let best = population.iter().reduce(|best, p| {
            if p.pbest_fitness < best.pbest_fitness {
                p
            } else {
                best
            }
        })?;
        Some(SwarmBest {
            position: best.pbest_position.clone(),
            fitness: best.pbest_fitness,
        })
    }
}

/// Scatters `m` resting particles uniformly over the search box.
pub fn init_population<R: Rng + ?Sized>(
    spec: &BenchmarkSpec,
    m: usize,
    rng: &mut R,
) -> Result<(Vec<Particle>, SwarmBest)> {
    if m < 2 {
        return Err(Error::config(format!(
            "population size must be >= 2, got {m}"
        )));
    }
    let population: Vec<Particle> = (0..m)
        .map(|_| {
            let position: Vec<f64> = (0..spec.dims)
                .map(|_| rng.random_range(spec.lower..=spec.upper))
                .collect();
            let fitness = spec.evaluate(&position);
            Particle::at(position, fitness)
        })
        .collect();
    let best = SwarmBest::of(&population).expect("population is non-empty");
    Ok((population, best))
}

/// Inertia weight at iteration `i` under `mode`.
pub fn inertia_weight(mode: InertiaMode, i: usize, params: &PsoParams) -> f64 {
    let span = params.w_max - params.w_min;
    let progress = if params.max_iterations == 0 {
        0.0
    } else {
        i as f64 / params.max_iterations as f64
    };
    match mode {
        InertiaMode::Fixed => params.w_fixed,
        InertiaMode::Slow => params.w_max - 0.75 * progress * span,
        InertiaMode::Quick => params.w_max - progress * span,
    }
}

/// One velocity coordinate with explicit random draws, clamped to `±v_max`.
#[allow(clippy::too_many_arguments)]
#[inline]
pub fn velocity_component(
    v: f64,
    x: f64,
    pbest: f64,
    gbest: f64,
    w: f64,
    c1: f64,
    c2: f64,
    r1: f64,
    r2: f64,
    v_max: f64,
) -> f64 {
    let next = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x);
    next.clamp(-v_max, v_max)
}

/// New velocity for every dimension, drawing `r1` then `r2` per dimension.
pub fn velocity_update<R: Rng + ?Sized>(
    p: &Particle,
    gbest: &SwarmBest,
    w: f64,
    params: &PsoParams,
    v_max: f64,
    rng: &mut R,
) -> Vec<f64> {
    (0..p.position.len())
        .map(|d| {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            velocity_component(
                p.velocity[d],
                p.position[d],
                p.pbest_position[d],
                gbest.position[d],
                w,
                params.c1,
                params.c2,
                r1,
                r2,
                v_max,
            )
        })
        .collect()
}

#[inline]
fn advance(p: &mut Particle, d: usize, spec: &BenchmarkSpec) {
    let x = p.position[d] + p.velocity[d];
    if x > spec.upper || x < spec.lower {
        p.position[d] = spec.clamp(x);
        p.velocity[d] = 0.0;
    } else {
        p.position[d] = x;
    }
}

/// Moves every coordinate by its (already updated) velocity. Coordinates that
/// leave the box stick to the bound and lose their velocity.
pub fn position_update(p: &mut Particle, spec: &BenchmarkSpec) {
    for d in 0..p.position.len() {
        advance(p, d, spec);
    }
}

/// Velocity and position update restricted to `dims`, in order.
pub fn move_dims<R: Rng + ?Sized>(
    p: &mut Particle,
    dims: &[usize],
    gbest: &[f64],
    w: f64,
    params: &PsoParams,
    spec: &BenchmarkSpec,
    rng: &mut R,
) {
    let v_max = params.velocity_limit(spec);
    for &d in dims {
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        p.velocity[d] = velocity_component(
            p.velocity[d],
            p.position[d],
            p.pbest_position[d],
            gbest[d],
            w,
            params.c1,
            params.c2,
            r1,
            r2,
            v_max,
        );
        advance(p, d, spec);
    }
}

/// One synchronous PSO iteration: evaluate, refresh memories, then move.
/// Returns the best fitness found so far.
pub fn pso_step<R: Rng + ?Sized>(
    population: &mut [Particle],
    gbest: &mut SwarmBest,
    spec: &BenchmarkSpec,
    params: &PsoParams,
    i: usize,
    rng: &mut R,
) -> f64 {
    for p in population.iter_mut() {
        let fitness = spec.evaluate(&p.position);
        if fitness < p.pbest_fitness {
            p.pbest_fitness = fitness;
            p.pbest_position.copy_from_slice(&p.position);
        }
    }
    if let Some(best) = SwarmBest::of(population) {
        if best.fitness < gbest.fitness {
            *gbest = best;
        }
    }

    let w = inertia_weight(params.inertia_mode, i, params);
    let v_max = params.velocity_limit(spec);
    for p in population.iter_mut() {
        p.velocity = velocity_update(p, gbest, w, params, v_max, rng);
        position_update(p, spec);
    }
    gbest.fitness
}

/// Runs the baseline optimizer for `config.pso_params.max_iterations` steps.
pub fn run_pso(config: &ExperimentConfig, seed: u64) -> Result<RunTrace> {
    let spec = config.benchmark_spec()?;
    let params = &config.pso_params;
    params.validate()?;
    let mut rng = crate::rng_for_seed(seed);
    let (mut population, mut gbest) = init_population(&spec, params.population_size, &mut rng)?;
    let initial = gbest.fitness;
    let best_per_iteration = (0..params.max_iterations)
        .map(|i| pso_step(&mut population, &mut gbest, &spec, params, i, &mut rng))
        .collect();
    Ok(RunTrace::new(seed, initial, best_per_iteration))
}
