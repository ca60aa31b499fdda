//! Exact FSTSP optimum by exhaustive enumeration, for small instances.
//!
//! Two enumerators are provided. [`brute_force_unpruned`] visits every
//! depot-anchored permutation and every one of the `3^(n-1)` type
//! assignments, keeping those accepted by [`validate_feasibility`].
//! [`brute_force_solve`] reaches the same optimum faster with three valid
//! prunings:
//!
//! * Reversal: reading a tour backwards (types reversed with it) gives the
//!   same subtours with launch and rendezvous swapped, so the same makespan.
//!   Only permutations whose first customer is smaller than the last are
//!   visited.
//! * Permutation bound: for any typing of a permutation, each subtour's
//!   node-by-node path length is at most `(3 + 2 alpha)` times its time (both
//!   detour legs around the drone node are bounded through the launch or
//!   rendezvous point by `truck + alpha * drone`). Summing, the closed
//!   permutation length divided by `3 + 2 alpha` is a lower bound on every
//!   makespan of that permutation.
//! * Prefix bound: types are assigned left to right and each subtour's time
//!   is added as soon as its closing combined node is placed. Subtour times
//!   are non-negative, so a prefix already at or above the incumbent cannot
//!   improve on it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::{DistanceMatrix, Instance, SpeedModel};
use crate::solution::{evaluate_makespan, validate_feasibility, Chromosome, Gene, NodeType};

pub const DEFAULT_LIMIT_N: usize = 8;
/// Hard ceiling on the node count the enumerators accept.
pub const MAX_LIMIT_N: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub optimal_makespan: f64,
    pub optimal_chromosome: Chromosome,
    /// Feasible complete solutions evaluated.
    pub evaluated_count: u64,
}

fn check_size(n: usize, limit_n: usize) -> Result<()> {
    let limit = limit_n.min(MAX_LIMIT_N);
    if n > limit {
        return Err(Error::TooLarge {
            what: "the brute-force oracle",
            n,
            limit,
        });
    }
    Ok(())
}

/// Rearranges `xs` into the next lexicographic permutation; false once the
/// last one has been passed.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len())
        .rev()
        .find(|&j| xs[j] > xs[i])
        .expect("pivot has a successor");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

fn build(perm: &[usize], types: &[NodeType]) -> Chromosome {
    let genes = std::iter::once(Gene::new(0, NodeType::Combined))
        .chain(perm.iter().zip(types).map(|(&n, &t)| Gene::new(n, t)))
        .collect();
    Chromosome::from_genes_unchecked(genes)
}

fn single_node(n: usize) -> Result<OracleResult> {
    debug_assert_eq!(n, 1);
    Ok(OracleResult {
        optimal_makespan: 0.0,
        optimal_chromosome: Chromosome::from_tour(&[0])?,
        evaluated_count: 1,
    })
}

/// Plain enumeration; the reference the pruned search is checked against.
pub fn brute_force_unpruned(
    dm: &DistanceMatrix,
    sm: &SpeedModel,
    limit_n: usize,
) -> Result<OracleResult> {
    let n = dm.len();
    check_size(n, limit_n)?;
    if n <= 1 {
        return single_node(n);
    }
    let m = n - 1;
    let mut perm: Vec<usize> = (1..n).collect();
    let assignments = 3usize.pow(m as u32);
    let mut best: Option<(f64, Chromosome)> = None;
    let mut evaluated = 0;
    let mut types = vec![NodeType::Combined; m];
    loop {
        for code in 0..assignments {
            let mut c = code;
            for t in types.iter_mut() {
                *t = NodeType::ALL[c % 3];
                c /= 3;
            }
            let chrom = build(&perm, &types);
            if validate_feasibility(&chrom).is_err() {
                continue;
            }
            let value = evaluate_makespan(&chrom, dm, sm)?.value();
            evaluated += 1;
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, chrom));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (optimal_makespan, optimal_chromosome) = best.expect("all-combined tours are feasible");
    Ok(OracleResult {
        optimal_makespan,
        optimal_chromosome,
        evaluated_count: evaluated,
    })
}

struct Search<'a> {
    dm: &'a DistanceMatrix,
    sm: &'a SpeedModel,
    perm: Vec<usize>,
    types: Vec<NodeType>,
    best: f64,
    best_chrom: Option<Chromosome>,
    evaluated: u64,
}

impl Search<'_> {
    /// Node at customer slot `k` (1-based gene position), `0` at either end.
    fn node(&self, pos: usize) -> usize {
        if pos == 0 || pos > self.perm.len() {
            0
        } else {
            self.perm[pos - 1]
        }
    }

    /// Time of the subtour between gene positions `start` and `end`, or
    /// `None` if it cannot be part of a feasible tour.
    fn subtour(&self, start: usize, end: usize) -> Option<f64> {
        let mut truck = 0.0;
        let mut prev = self.node(start);
        let mut drone = None;
        let mut truck_only = false;
        for pos in start + 1..end {
            match self.types[pos - 1] {
                NodeType::TruckOnly => {
                    let here = self.node(pos);
                    truck += self.dm.get(prev, here);
                    prev = here;
                    truck_only = true;
                }
                NodeType::Drone => {
                    if drone.is_some() {
                        return None;
                    }
                    drone = Some(self.node(pos));
                }
                NodeType::Combined => unreachable!(),
            }
        }
        let closing = self.node(end);
        truck += self.dm.get(prev, closing);
        match drone {
            Some(_) if start == 0 && end == self.perm.len() + 1 => None,
            Some(d) => {
                let flight =
                    (self.dm.get(self.node(start), d) + self.dm.get(d, closing)) / self.sm.alpha;
                Some(truck.max(flight))
            }
            None if truck_only => None,
            None => Some(truck),
        }
    }

    fn descend(&mut self, pos: usize, start: usize, acc: f64) {
        let m = self.perm.len();
        if pos > m {
            let Some(last) = self.subtour(start, m + 1) else {
                return;
            };
            let total = acc + last;
            let chrom = build(&self.perm, &self.types);
            debug_assert!(validate_feasibility(&chrom).is_ok());
            self.evaluated += 1;
            if total < self.best {
                self.best = total;
                self.best_chrom = Some(chrom);
            }
            return;
        }
        for ntype in NodeType::ALL {
            self.types[pos - 1] = ntype;
            match ntype {
                NodeType::Combined => {
                    if let Some(t) = self.subtour(start, pos) {
                        if acc + t < self.best {
                            self.descend(pos + 1, pos, acc + t);
                        }
                    }
                }
                _ => self.descend(pos + 1, start, acc),
            }
        }
        self.types[pos - 1] = NodeType::Combined;
    }
}

pub fn brute_force_solve_matrix(
    dm: &DistanceMatrix,
    sm: &SpeedModel,
    limit_n: usize,
) -> Result<OracleResult> {
    let n = dm.len();
    check_size(n, limit_n)?;
    if n <= 1 {
        return single_node(n);
    }
    let m = n - 1;
    let mut perm: Vec<usize> = (1..n).collect();
    // The all-combined seed tour gives a finite incumbent to start from.
    let start_tour: Vec<usize> = (0..n).collect();
    let mut search = Search {
        dm,
        sm,
        perm: perm.clone(),
        types: vec![NodeType::Combined; m],
        best: dm.tour_length(&start_tour) * (1.0 + 1e-12) + 1e-12,
        best_chrom: None,
        evaluated: 0,
    };
    let slack = 3.0 + 2.0 * sm.alpha;
    loop {
        if perm[0] <= perm[m - 1] {
            let closed = dm.get(0, perm[0])
                + perm.windows(2).map(|w| dm.get(w[0], w[1])).sum::<f64>()
                + dm.get(perm[m - 1], 0);
            if closed / slack < search.best {
                search.perm.copy_from_slice(&perm);
                search.descend(1, 0, 0.0);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let optimal_chromosome = search
        .best_chrom
        .expect("seed incumbent is beaten by its own all-combined tour");
    let optimal_makespan = evaluate_makespan(&optimal_chromosome, dm, sm)?.value();
    Ok(OracleResult {
        optimal_makespan,
        optimal_chromosome,
        evaluated_count: search.evaluated,
    })
}

pub fn brute_force_solve(inst: &Instance, limit_n: usize) -> Result<OracleResult> {
    brute_force_solve_matrix(&inst.distance_matrix(), &inst.speed_model(), limit_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub optimal: f64,
    pub found: f64,
    pub gap_pct: f64,
    pub within_tolerance: bool,
}

/// `100 * (found - optimal) / optimal`.
pub fn gap_pct(found: f64, optimal: f64) -> Result<f64> {
    if optimal.abs() < f64::EPSILON {
        return Err(Error::ZeroOptimum);
    }
    Ok(100.0 * (found - optimal) / optimal)
}

pub fn gap_report(optimal: f64, found: f64, tolerance_pct: f64) -> Result<GapReport> {
    let gap = gap_pct(found, optimal)?;
    Ok(GapReport {
        optimal,
        found,
        gap_pct: gap,
        within_tolerance: gap.abs() <= tolerance_pct,
    })
}

/// Solves `inst` exactly and compares `ga_best` against the optimum.
pub fn verify_run(inst: &Instance, ga_best: f64, tolerance_pct: f64) -> Result<GapReport> {
    let optimum = brute_force_solve(inst, MAX_LIMIT_N)?;
    gap_report(optimum.optimal_makespan, ga_best, tolerance_pct)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_enumerated_once() {
        let mut xs = vec![1, 2, 3, 4];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(xs, vec![4, 3, 2, 1]);
    }

    #[test]
    fn square_instance_optimum() {
        let inst =
            Instance::from_coords("sq", &[(0.0, 0.0), (0.0, 3.0), (4.0, 3.0), (4.0, 0.0)], 2.0)
                .unwrap();
        let pruned = brute_force_solve(&inst, DEFAULT_LIMIT_N).unwrap();
        let full = brute_force_unpruned(
            &inst.distance_matrix(),
            &inst.speed_model(),
            DEFAULT_LIMIT_N,
        )
        .unwrap();
        assert!((pruned.optimal_makespan - full.optimal_makespan).abs() < 1e-9);
        assert!(pruned.optimal_makespan <= 12.0 + 1e-9);
        assert!(validate_feasibility(&pruned.optimal_chromosome).is_ok());
    }

    #[test]
    fn single_customer_is_out_and_back() {
        let inst = Instance::from_coords("two", &[(0.0, 0.0), (3.0, 4.0)], 2.0).unwrap();
        let r = brute_force_solve(&inst, DEFAULT_LIMIT_N).unwrap();
        assert_eq!(r.optimal_makespan, 10.0);
        assert_eq!(r.optimal_chromosome.to_string(), "0:C 1:C");
    }

    #[test]
    fn size_limit() {
        let inst = Instance::random_uniform("big", 9, 100.0, 0);
        assert!(matches!(
            brute_force_solve(&inst, 8),
            Err(Error::TooLarge { n: 9, limit: 8, .. })
        ));
        let inst = Instance::random_uniform("bigger", 10, 100.0, 0);
        assert!(brute_force_solve(&inst, 12).is_err());
    }

    #[test]
    fn gap_values() {
        assert_eq!(gap_pct(140.54, 140.54).unwrap(), 0.0);
        assert_eq!(format!("{:.2}", gap_pct(243.01, 226.28).unwrap()), "7.39");
        assert_eq!(format!("{:.2}", gap_pct(156.76, 154.26).unwrap()), "1.62");
        assert!(matches!(gap_pct(1.0, 0.0), Err(Error::ZeroOptimum)));
        let r = gap_report(100.0, 100.5, 1.0).unwrap();
        assert!(r.within_tolerance);
    }

    #[test]
    fn coincident_points_guarded() {
        let inst =
            Instance::from_coords("flat", &[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)], 2.0).unwrap();
        assert!(matches!(
            verify_run(&inst, 0.0, 1.0),
            Err(Error::ZeroOptimum)
        ));
    }
}
