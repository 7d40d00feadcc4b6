//! Genetic algorithm for one cluster's tour.
//!
//! Fitness is 1/length. Each generation sorts the population by fitness,
//! takes the top of the list as the mating pool, crosses each pool member
//! with the next best via PMX (gated by the crossover probability),
//! replaces a parent only by a strictly fitter offspring, mutates with the
//! mutation probability (keeping a mutant only if not worse), and refills
//! the population with fresh random permutations. The best chromosome
//! always survives, so the best length never increases.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{tour_length, DistanceMatrix, Tour};
use crate::trace::Trace;

/// Zero-length guard for the fitness inversion.
pub const FITNESS_EPS: f64 = 1e-12;

/// Fitness of a tour of the given length: 1/length, clamped at 1/eps for
/// degenerate zero-length tours.
pub fn fitness(length: f64) -> f64 {
    if length > FITNESS_EPS {
        1.0 / length
    } else {
        1.0 / FITNESS_EPS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    Swap,
    Inversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population_size: usize,
    pub mating_pool_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub mutation: MutationKind,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 10,
            mating_pool_size: 7,
            crossover_prob: 0.8,
            mutation_prob: 0.1,
            max_generations: 300,
            stall_generations: 50,
            mutation: MutationKind::Swap,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParameter("population_size must be at least 2".into()));
        }
        if self.mating_pool_size == 0 || self.mating_pool_size > self.population_size {
            return Err(Error::InvalidParameter(
                "mating_pool_size must be in 1..=population_size".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::InvalidParameter("crossover_prob must be in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(Error::InvalidParameter("mutation_prob must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// A candidate tour with its cached length and fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub genes: Vec<u32>,
    pub length: f64,
    pub fitness: f64,
}

impl Chromosome {
    pub fn evaluate(genes: Vec<u32>, dm: &DistanceMatrix, depot_id: u32) -> Result<Self> {
        let length = tour_length(&Tour(genes.clone()), depot_id, dm)?;
        Ok(Self { genes, length, fitness: fitness(length) })
    }
}

fn random_permutation(ids: &[u32], rng: &mut impl Rng) -> Vec<u32> {
    let mut genes = ids.to_vec();
    genes.shuffle(rng);
    genes
}

fn init_population_with(
    cluster: &[u32],
    params: &GaParams,
    dm: &DistanceMatrix,
    depot_id: u32,
    rng: &mut impl Rng,
) -> Result<Vec<Chromosome>> {
    if cluster.is_empty() {
        return Err(Error::InvalidParameter("cluster must not be empty".into()));
    }
    (0..params.population_size)
        .map(|_| Chromosome::evaluate(random_permutation(cluster, rng), dm, depot_id))
        .collect()
}

/// Seed-deterministic initial population of uniformly random permutations.
pub fn init_population(
    cluster: &[u32],
    params: &GaParams,
    dm: &DistanceMatrix,
    depot_id: u32,
) -> Result<Vec<Chromosome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    init_population_with(cluster, params, dm, depot_id, &mut rng)
}

/// The `mating_pool_size` fittest chromosomes in fitness-descending order;
/// equal fitness keeps the earlier-indexed chromosome first.
pub fn select_mating_pool(population: &[Chromosome], params: &GaParams) -> Vec<Chromosome> {
    let mut indices: Vec<usize> = (0..population.len()).collect();
    indices.sort_by(|&a, &b| {
        population[b]
            .fitness
            .partial_cmp(&population[a].fitness)
            .expect("finite fitness")
            .then(a.cmp(&b))
    });
    indices
        .into_iter()
        .take(params.mating_pool_size.min(population.len()))
        .map(|i| population[i].clone())
        .collect()
}

fn pmx_child(recipient: &[u32], donor: &[u32], cut1: usize, cut2: usize) -> Vec<u32> {
    let mapping: HashMap<u32, u32> = (cut1..cut2).map(|p| (donor[p], recipient[p])).collect();
    let mut child = recipient.to_vec();
    child[cut1..cut2].copy_from_slice(&donor[cut1..cut2]);
    for p in (0..cut1).chain(cut2..recipient.len()) {
        let mut g = recipient[p];
        while let Some(&next) = mapping.get(&g) {
            if next == g {
                break;
            }
            g = next;
        }
        child[p] = g;
    }
    child
}

/// Partially matched crossover with explicit cut sites `[cut1, cut2)`.
/// `child_a` carries `parent_b`'s segment with conflicts outside resolved
/// through the segment's position-wise mapping; `child_b` symmetrically.
pub fn pmx_crossover(
    parent_a: &[u32],
    parent_b: &[u32],
    cut1: usize,
    cut2: usize,
) -> Result<(Vec<u32>, Vec<u32>)> {
    if parent_a.len() != parent_b.len() {
        return Err(Error::InvalidParameter("parents differ in length".into()));
    }
    let mut sa = parent_a.to_vec();
    let mut sb = parent_b.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(Error::InvalidParameter("parents are not permutations of the same ids".into()));
    }
    if cut1 >= cut2 || cut2 > parent_a.len() {
        return Err(Error::InvalidParameter(format!(
            "cut sites ({cut1}, {cut2}) invalid for length {}",
            parent_a.len()
        )));
    }
    Ok((
        pmx_child(parent_a, parent_b, cut1, cut2),
        pmx_child(parent_b, parent_a, cut1, cut2),
    ))
}

/// Exchange the genes at two uniformly chosen distinct positions.
pub fn mutate_swap(genes: &mut [u32], rng: &mut impl Rng) {
    if genes.len() < 2 {
        return;
    }
    let i = rng.gen_range(0..genes.len());
    let mut j = rng.gen_range(0..genes.len() - 1);
    if j >= i {
        j += 1;
    }
    genes.swap(i, j);
}

/// Reverse a uniformly chosen segment.
pub fn mutate_inversion(genes: &mut [u32], rng: &mut impl Rng) {
    if genes.len() < 2 {
        return;
    }
    let i = rng.gen_range(0..genes.len() - 1);
    let j = rng.gen_range(i + 1..genes.len());
    genes[i..=j].reverse();
}

fn draw_cuts(len: usize, rng: &mut impl Rng) -> (usize, usize) {
    let cut1 = rng.gen_range(0..len);
    let cut2 = rng.gen_range(cut1 + 1..=len);
    (cut1, cut2)
}

/// One generation: pool selection, pairwise PMX with replace-if-strictly-
/// fitter, guarded mutation, refill with fresh random permutations.
pub fn evolve_generation(
    population: &[Chromosome],
    params: &GaParams,
    dm: &DistanceMatrix,
    depot_id: u32,
    rng: &mut impl Rng,
) -> Result<Vec<Chromosome>> {
    let mut pool = select_mating_pool(population, params);
    let genes_len = pool[0].genes.len();

    // crossover: each pool member with the next best, no wrap
    for i in 0..pool.len().saturating_sub(1) {
        if rng.gen::<f64>() < params.crossover_prob {
            let (cut1, cut2) = draw_cuts(genes_len, rng);
            let (ca, cb) = pmx_crossover(&pool[i].genes, &pool[i + 1].genes, cut1, cut2)?;
            let ca = Chromosome::evaluate(ca, dm, depot_id)?;
            if ca.length < pool[i].length {
                pool[i] = ca;
            }
            let cb = Chromosome::evaluate(cb, dm, depot_id)?;
            if cb.length < pool[i + 1].length {
                pool[i + 1] = cb;
            }
        }
    }

    // mutation with an elitist guard: a mutant is kept only if not worse
    for member in pool.iter_mut() {
        if rng.gen::<f64>() < params.mutation_prob {
            let mut genes = member.genes.clone();
            match params.mutation {
                MutationKind::Swap => mutate_swap(&mut genes, rng),
                MutationKind::Inversion => mutate_inversion(&mut genes, rng),
            }
            let mutant = Chromosome::evaluate(genes, dm, depot_id)?;
            if mutant.length <= member.length {
                *member = mutant;
            }
        }
    }

    // survivors carry over; the rest of the population is fresh
    let cluster: Vec<u32> = pool[0].genes.clone();
    let mut next = pool;
    while next.len() < params.population_size {
        next.push(Chromosome::evaluate(random_permutation(&cluster, rng), dm, depot_id)?);
    }
    Ok(next)
}

fn best_index(population: &[Chromosome]) -> usize {
    let mut best = 0;
    for (i, c) in population.iter().enumerate().skip(1) {
        if c.length < population[best].length {
            best = i;
        }
    }
    best
}

/// Run the GA on one cluster: iterate generations until `max_generations`
/// or no best-length improvement for `stall_generations`. Returns the
/// best-ever tour and the full convergence trace.
pub fn run_ga(
    cluster: &[u32],
    params: &GaParams,
    dm: &DistanceMatrix,
    depot_id: u32,
) -> Result<(Tour, Trace)> {
    params.validate()?;
    if cluster.is_empty() {
        return Err(Error::InvalidParameter("cluster must not be empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut population = init_population_with(cluster, params, dm, depot_id, &mut rng)?;

    let mut trace = Trace::default();
    let mean = |pop: &[Chromosome]| pop.iter().map(|c| c.length).sum::<f64>() / pop.len() as f64;
    let mut best = population[best_index(&population)].clone();
    trace.push(0, best.length, mean(&population));

    if cluster.len() == 1 {
        // a single city has a single tour; nothing to evolve
        return Ok((Tour(best.genes), trace));
    }

    let mut stall = 0;
    for generation in 1..=params.max_generations {
        population = evolve_generation(&population, params, dm, depot_id, &mut rng)?;
        let gen_best = &population[best_index(&population)];
        if gen_best.length < best.length {
            best = gen_best.clone();
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(generation, best.length, mean(&population));
        if stall >= params.stall_generations {
            break;
        }
    }
    Ok((Tour(best.genes), trace))
}
