//! Seed tour construction, drone-saving node scores, and the roulette-wheel
//! initial population.

use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolution::{GAConfig, Individual, Memeplex, Population};
use crate::instances::{DistanceMatrix, SpeedModel};
use crate::solution::{evaluate_makespan, Chromosome, NodeType};

/// Largest node count handed to the exact dynamic program.
pub const EXACT_TSP_LIMIT: usize = 13;

/// Optimal closed tour starting at the depot (Held-Karp).
pub fn exact_tsp_tour(dm: &DistanceMatrix) -> Result<Vec<usize>> {
    let n = dm.len();
    if n > EXACT_TSP_LIMIT {
        return Err(Error::TooLarge {
            what: "the exact TSP solver (use heuristic_tsp_tour)",
            n,
            limit: EXACT_TSP_LIMIT,
        });
    }
    if n <= 3 {
        return Ok((0..n).collect());
    }
    // Customers 1..n map to bits 0..m.
    let m = n - 1;
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = dm.get(0, j + 1);
    }
    for mask in 1..full {
        for last in 0..m {
            let here = cost[mask * m + last];
            if mask & (1 << last) == 0 || !here.is_finite() {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let to = mask | (1 << next);
                let candidate = here + dm.get(last + 1, next + 1);
                if candidate < cost[to * m + next] {
                    cost[to * m + next] = candidate;
                    parent[to * m + next] = last;
                }
            }
        }
    }
    let mask = full - 1;
    let mut last = (0..m)
        .min_by(|&a, &b| {
            let ca = cost[mask * m + a] + dm.get(a + 1, 0);
            let cb = cost[mask * m + b] + dm.get(b + 1, 0);
            ca.total_cmp(&cb)
        })
        .expect("at least one customer");
    let mut tour = Vec::with_capacity(n);
    let mut mask = mask;
    loop {
        tour.push(last + 1);
        let prev = parent[mask * m + last];
        mask &= !(1 << last);
        if prev == usize::MAX {
            break;
        }
        last = prev;
    }
    tour.push(0);
    tour.reverse();
    Ok(tour)
}

/// Nearest-neighbour construction from the depot, then 2-opt descent until
/// no improving exchange remains. The seed only rotates the scan order, so
/// different seeds may settle in different local optima.
pub fn heuristic_tsp_tour(dm: &DistanceMatrix, seed: u64) -> Vec<usize> {
    let n = dm.len();
    let mut tour = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut current = 0;
    if n > 0 {
        tour.push(0);
        visited[0] = true;
    }
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| dm.get(current, a).total_cmp(&dm.get(current, b)))
            .expect("unvisited node remains");
        visited[next] = true;
        tour.push(next);
        current = next;
    }
    if n < 4 {
        return tour;
    }

    let offset = ChaCha8Rng::seed_from_u64(seed).gen_range(0..n);
    loop {
        let mut improved = false;
        for k in 0..n {
            let i = (k + offset) % n;
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (tour[i], tour[i + 1]);
                let (c, e) = (tour[j], tour[(j + 1) % n]);
                let delta = dm.get(a, c) + dm.get(b, e) - dm.get(a, b) - dm.get(c, e);
                if delta < -1e-10 {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            return tour;
        }
    }
}

/// Exact tour when small enough, heuristic otherwise.
pub fn seed_tour(dm: &DistanceMatrix, seed: u64) -> Vec<usize> {
    if dm.len() <= EXACT_TSP_LIMIT {
        exact_tsp_tour(dm).expect("size checked")
    } else {
        heuristic_tsp_tour(dm, seed)
    }
}

/// Checks that `tour` is a depot-first permutation of `0..n`.
pub fn validate_tour(tour: &[usize], n: usize) -> Result<()> {
    Chromosome::from_tour(tour).map(|_| ()).and_then(|_| {
        if tour.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidChromosome(format!(
                "tour has {} nodes, instance has {n}",
                tour.len()
            )))
        }
    })
}

/// Per-position drone savings of a tour. Index 0 (the depot) is always 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

impl ScoreVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Selection probability of each position under the roulette wheel.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.0.iter().sum();
        self.0
            .iter()
            .map(|s| if total > 0.0 { s / total } else { 0.0 })
            .collect()
    }
}

/// Savings from turning the node at each tour position into a drone node:
/// `max(tT(i,j) + tT(j,k) - max(tD(i,j) + tD(j,k), tT(i,k)), 1)` with `i`
/// and `k` its tour neighbours (the last position wraps to the depot).
pub fn compute_node_scores(tour: &[usize], dm: &DistanceMatrix, sm: &SpeedModel) -> ScoreVector {
    let n = tour.len();
    let mut scores = vec![0.0; n];
    for j in 1..n {
        let (i, here) = (tour[j - 1], tour[j]);
        let k = if j == n - 1 { tour[0] } else { tour[j + 1] };
        let truck = |a, b| dm.get(a, b) / sm.truck_speed;
        let drone = |a, b| dm.get(a, b) / sm.alpha;
        let saving =
            truck(i, here) + truck(here, k) - (drone(i, here) + drone(here, k)).max(truck(i, k));
        scores[j] = saving.max(1.0);
    }
    ScoreVector(scores)
}

/// Fitness-proportionate pick: index `i` with probability `s_i / sum(s)`.
pub fn roulette_select<R: Rng + ?Sized>(scores: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = scores.iter().filter(|s| **s > 0.0).sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::EmptyWheel);
    }
    let spin = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > 0.0 {
            acc += s;
            last_positive = i;
            if spin < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_positive)
}

/// Number of drone conversions per seeded individual.
pub fn initial_drone_count(initial_drone_pct: f64, n: usize) -> usize {
    ((initial_drone_pct / 100.0 * n as f64).floor() as usize).max(1)
}

/// Builds `cfg.population_size` individuals from the seed tour. Each starts
/// all-combined; `initial_drone_count` nodes are spun off the roulette wheel
/// (each pick zeroes its score) and converted to drone nodes, then repaired.
/// Every individual gets its own RNG stream drawn from `rng` and a uniformly
/// random memeplex.
pub fn build_initial_population<R: Rng + ?Sized>(
    tour: &[usize],
    dm: &DistanceMatrix,
    sm: &SpeedModel,
    cfg: &GAConfig,
    rng: &mut R,
) -> Result<Population> {
    if cfg.population_size < 2 {
        return Err(Error::Config("population_size must be at least 2".into()));
    }
    if !(0.0..=100.0).contains(&cfg.initial_drone_pct) {
        return Err(Error::Config(
            "initial_drone_pct must lie in [0, 100]".into(),
        ));
    }
    validate_tour(tour, dm.len())?;
    let base = Chromosome::from_tour(tour)?;
    let scores = compute_node_scores(tour, dm, sm);
    let conversions = initial_drone_count(cfg.initial_drone_pct, tour.len());
    debug!(
        "seeding {} individuals with {conversions} drone node(s) each",
        cfg.population_size
    );

    let mut individuals = Vec::with_capacity(cfg.population_size);
    for _ in 0..cfg.population_size {
        let mut stream = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut chromosome = base.clone();
        let mut current = scores.0.clone();
        for done in 0..conversions {
            match roulette_select(&current, &mut stream) {
                Ok(pos) => {
                    current[pos] = 0.0;
                    chromosome.set_type(pos, NodeType::Drone);
                }
                Err(Error::EmptyWheel) => {
                    warn!("roulette wheel exhausted after {done} of {conversions} conversions");
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        chromosome.repair_in_place();
        let fitness = evaluate_makespan(&chromosome, dm, sm)?.value();
        individuals.push(Individual {
            chromosome,
            memeplex: Memeplex::random(&mut stream),
            fitness,
        });
    }
    Ok(Population::new(individuals))
}
