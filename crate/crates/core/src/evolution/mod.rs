//! The self-adaptive steady-state GA.
//!
//! Every generation picks two parents by tournament, recombines them with the
//! fitter parent's crossover meme, mutates each child's tour and node types
//! with that parent's mutation memes, mutates the inherited memeplexes and
//! finally lets the best two of parents and children take the parent slots.

pub mod config;
pub mod crossover;
pub mod memeplex;
pub mod mutation;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use config::GAConfig;
pub use crossover::{apply_crossover, crossover};
pub use memeplex::{
    mutate_memeplex, CombinedMutation, CrossoverOp, DroneMutation, Memeplex, TourMutation,
    TruckMutation,
};
pub use mutation::{mutate_tour, mutate_types};

use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::instances::{Instance, SpeedModel};
use crate::seeding::{build_initial_population, seed_tour, validate_tour};
use crate::solution::{evaluate_makespan, Chromosome};

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub memeplex: Memeplex,
    /// Makespan of `chromosome`; lower is better.
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    individuals: Vec<Individual>,
}

impl Population {
    pub fn new(individuals: Vec<Individual>) -> Self {
        Self { individuals }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Individual> {
        self.individuals.get(index)
    }

    pub fn as_slice(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn best_index(&self) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| {
            self.individuals[a]
                .fitness
                .total_cmp(&self.individuals[b].fitness)
        })
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best_index().map(|i| &self.individuals[i])
    }
}

impl std::ops::Index<usize> for Population {
    type Output = Individual;

    fn index(&self, index: usize) -> &Individual {
        &self.individuals[index]
    }
}

/// Draws `t` individuals uniformly with replacement and returns the index of
/// the fittest; ties go to the earliest draw.
pub fn tournament_select<R: Rng + ?Sized>(
    pop: &Population,
    t: usize,
    rng: &mut R,
) -> Result<usize> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..t {
        let challenger = rng.gen_range(0..pop.len());
        if pop[challenger].fitness < pop[best].fitness {
            best = challenger;
        }
    }
    Ok(best)
}

/// Relative tolerance under which two fitness values count as the same
/// solution during replacement.
const SAME_FITNESS: f64 = 1e-9;

fn same_fitness(a: f64, b: f64) -> bool {
    (a - b).abs() <= SAME_FITNESS * a.abs().max(b.abs()).max(1.0)
}

/// Which of the four replacement candidates survive, as indices into
/// `[parent1, parent2, offspring1, offspring2]`.
///
/// Candidates are ranked by fitness with offspring ahead of parents on ties.
/// A candidate whose fitness equals one already chosen is passed over while
/// distinct candidates remain, so duplicates do not crowd the population.
pub fn replacement_survivors(fitness: [f64; 4], slots: usize) -> Vec<usize> {
    let mut order = [2, 3, 0, 1];
    order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
    let mut chosen: Vec<usize> = Vec::with_capacity(slots);
    for &c in &order {
        if chosen.len() == slots {
            break;
        }
        if !chosen.iter().any(|&s| same_fitness(fitness[s], fitness[c])) {
            chosen.push(c);
        }
    }
    for &c in &order {
        if chosen.len() == slots {
            break;
        }
        if !chosen.contains(&c) {
            chosen.push(c);
        }
    }
    chosen
}

/// Elitist steady-state replacement into the parent slots. A surviving parent
/// keeps its own slot. When both parents are the same slot, only the single
/// best candidate is kept.
pub fn replace_population(
    pop: &mut Population,
    slot1: usize,
    slot2: usize,
    o1: Individual,
    o2: Individual,
) {
    let slots = if slot1 == slot2 { 1 } else { 2 };
    let fitness = [
        pop[slot1].fitness,
        pop[slot2].fitness,
        o1.fitness,
        o2.fitness,
    ];
    let survivors = replacement_survivors(fitness, slots);
    let mut offspring = [Some(o1), Some(o2)];
    let mut incoming = survivors
        .iter()
        .filter(|&&c| c >= 2)
        .map(|&c| offspring[c - 2].take());

    if slots == 1 {
        if let Some(Some(child)) = incoming.next() {
            pop.individuals[slot1] = child;
        }
        return;
    }
    for (slot, parent) in [(slot1, 0), (slot2, 1)] {
        if !survivors.contains(&parent) {
            if let Some(Some(child)) = incoming.next() {
                pop.individuals[slot] = child;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub generation: u64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub best_fitness: f64,
    pub best_chromosome: Chromosome,
    pub generations_run: u64,
    /// Seconds.
    pub wall_time: f64,
    /// Best fitness after each improvement, starting at generation 0.
    pub fitness_trace: Vec<TracePoint>,
    /// Set when the run was stopped before `num_generations`.
    pub truncated: bool,
    pub seed_tour: Vec<usize>,
    pub seed_tour_length: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the computed TSP seed tour.
    pub seed_tour: Option<Vec<usize>>,
    /// Checked periodically; when set the run stops and reports what it has.
    pub stop: Option<Arc<AtomicBool>>,
}

pub fn evolve(inst: &Instance, cfg: &GAConfig) -> Result<RunStats> {
    evolve_with(inst, cfg, &RunOptions::default())
}

pub fn evolve_with(inst: &Instance, cfg: &GAConfig, opts: &RunOptions) -> Result<RunStats> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let dm = inst.distance_matrix();
    let sm = cfg
        .alpha
        .map(SpeedModel::new)
        .unwrap_or_else(|| inst.speed_model());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let tour = match &opts.seed_tour {
        Some(tour) => {
            validate_tour(tour, inst.len())?;
            tour.clone()
        }
        None => seed_tour(&dm, cfg.seed),
    };
    let seed_tour_length = dm.tour_length(&tour);
    let mut pop = build_initial_population(&tour, &dm, &sm, cfg, &mut rng)?;

    let mut best = pop.best().expect("population is non-empty").clone();
    let mut trace = vec![TracePoint {
        generation: 0,
        best: best.fitness,
    }];
    let mut generation = 0;
    let mut truncated = false;

    while generation < cfg.num_generations {
        if generation % 1024 == 0 {
            if let Some(stop) = &opts.stop {
                if stop.load(Ordering::Relaxed) {
                    truncated = true;
                    break;
                }
            }
        }
        let i1 = tournament_select(&pop, cfg.tournament_size, &mut rng)?;
        let i2 = tournament_select(&pop, cfg.tournament_size, &mut rng)?;
        let (p1, p2) = (&pop[i1], &pop[i2]);
        let memes = if p2.fitness < p1.fitness {
            p2.memeplex
        } else {
            p1.memeplex
        };

        let (c1, c2) = apply_crossover(p1, p2, &mut rng);
        let mut breed = |chrom: Chromosome| -> Result<Individual> {
            let chrom = mutate_tour(
                &chrom,
                memes.tour_mutation,
                memes.tour_mutation_prob,
                &mut rng,
            );
            let chromosome = mutate_types(&chrom, &memes, &mut rng);
            debug_assert!(chromosome.check_structure().is_ok());
            let memeplex = mutate_memeplex(&memes, cfg.innovation_rate, &mut rng);
            let fitness = evaluate_makespan(&chromosome, &dm, &sm)?.value();
            Ok(Individual {
                chromosome,
                memeplex,
                fitness,
            })
        };
        let o1 = breed(c1)?;
        let o2 = breed(c2)?;

        generation += 1;
        for child in [&o1, &o2] {
            if child.fitness < best.fitness {
                best = child.clone();
                trace.push(TracePoint {
                    generation,
                    best: best.fitness,
                });
            }
        }
        replace_population(&mut pop, i1, i2, o1, o2);
    }

    debug!(
        "{}: best {:.4} after {generation} generations",
        inst.name(),
        best.fitness
    );
    Ok(RunStats {
        best_fitness: best.fitness,
        best_chromosome: best.chromosome,
        generations_run: generation,
        wall_time: clock.seconds(),
        fitness_trace: trace,
        truncated,
        seed_tour: tour,
        seed_tour_length,
    })
}
