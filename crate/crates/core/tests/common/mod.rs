//! Test-only oracles that share no code with the crate's evaluator or
//! enumerators.

#![allow(dead_code)]

use std::path::PathBuf;

use fstsp::{Chromosome, Gene, NodeType};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// `(name, optimum)` pairs from `data/references.csv`.
pub fn references() -> Vec<(String, f64)> {
    let text = std::fs::read_to_string(data_dir().join("references.csv")).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (name, value) = l.split_once(',').unwrap();
            (name.to_string(), value.parse().unwrap())
        })
        .collect()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

pub fn closed_tour_length(coords: &[(f64, f64)], order: &[usize]) -> f64 {
    (0..order.len())
        .map(|i| dist(coords[order[i]], coords[order[(i + 1) % order.len()]]))
        .sum()
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Exact optimum by a per-permutation segmentation DP: the route is cut at
/// its combined stops and each piece is either a direct truck leg or a piece
/// in which exactly one node flies while the truck drives through the rest.
/// A piece may not both start and end at the depot with a drone in it.
pub fn dp_optimum(coords: &[(f64, f64)], alpha: f64) -> f64 {
    let n = coords.len();
    if n < 2 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut customers: Vec<usize> = (1..n).collect();
    permutations(&mut customers, 0, &mut |perm| {
        let mut seq = vec![0];
        seq.extend_from_slice(perm);
        seq.push(0);
        let last = seq.len() - 1;
        let mut f = vec![f64::INFINITY; seq.len()];
        f[0] = 0.0;
        for j in 1..=last {
            for i in 0..j {
                if !f[i].is_finite() {
                    continue;
                }
                let piece = if j == i + 1 {
                    dist(coords[seq[i]], coords[seq[j]])
                } else if i == 0 && j == last {
                    continue;
                } else {
                    let mut cheapest = f64::INFINITY;
                    for k in i + 1..j {
                        let mut truck = 0.0;
                        let mut prev = seq[i];
                        for (p, &node) in seq.iter().enumerate().take(j + 1).skip(i + 1) {
                            if p != k {
                                truck += dist(coords[prev], coords[node]);
                                prev = node;
                            }
                        }
                        let flight = (dist(coords[seq[i]], coords[seq[k]])
                            + dist(coords[seq[k]], coords[seq[j]]))
                            / alpha;
                        cheapest = cheapest.min(f64::max(truck, flight));
                    }
                    cheapest
                };
                f[j] = f[j].min(f[i] + piece);
            }
        }
        best = best.min(f[last]);
    });
    best
}

pub fn random_coords<R: Rng>(n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect()
}

/// Depot-first random permutation with uniformly random customer types.
pub fn random_chromosome<R: Rng>(n: usize, rng: &mut R) -> Chromosome {
    let mut tour: Vec<usize> = (1..n).collect();
    tour.shuffle(rng);
    let genes = std::iter::once(Gene::new(0, NodeType::Combined))
        .chain(
            tour.into_iter()
                .map(|node| Gene::new(node, NodeType::ALL[rng.gen_range(0..3)])),
        )
        .collect();
    Chromosome::new(genes).unwrap()
}

/// True when the tour starts at the depot and visits `0..n` once each.
pub fn is_depot_permutation(chrom: &Chromosome) -> bool {
    let tour = chrom.tour();
    let mut sorted = tour.clone();
    sorted.sort_unstable();
    tour.first() == Some(&0)
        && chrom.genes()[0].ntype == NodeType::Combined
        && sorted.iter().enumerate().all(|(i, &v)| i == v)
}
