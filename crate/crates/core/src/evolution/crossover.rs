//! The nine recombination operators.
//!
//! All operators work on gene positions `1..n`; the depot gene at position 0
//! is copied through untouched. The deterministic `*_at` functions take
//! explicit cut points (inclusive gene positions) and return raw, unrepaired
//! children; [`crossover`] draws the cut points and repairs.

use rand::Rng;

use super::memeplex::{chance, CrossoverOp};
use super::Individual;
use crate::solution::{Chromosome, Gene, NodeType};

fn position_of(genes: &[Gene]) -> Vec<usize> {
    let mut pos = vec![0; genes.len()];
    for (i, g) in genes.iter().enumerate() {
        pos[g.node] = i;
    }
    pos
}

fn type_of_node(genes: &[Gene]) -> Vec<NodeType> {
    let mut types = vec![NodeType::Combined; genes.len()];
    for g in genes {
        types[g.node] = g.ntype;
    }
    types
}

/// Assembles a child from chosen node ids. With `carried` each position takes
/// the type that travelled with its node; otherwise the child takes its type
/// vector position-by-position from `own`.
fn assemble(nodes: Vec<usize>, own: &[Gene], carried: Option<&[NodeType]>) -> Chromosome {
    let genes = nodes
        .into_iter()
        .enumerate()
        .map(|(i, node)| {
            let ntype = match carried {
                Some(types) => types[i],
                None => own[i].ntype,
            };
            Gene::new(node, if i == 0 { NodeType::Combined } else { ntype })
        })
        .collect();
    Chromosome::from_genes_unchecked(genes)
}

/// Partially mapped crossover, one child: positions `lo..=hi` come from
/// `donor`, the rest from `own` with conflicts resolved through the segment
/// mapping.
fn pmx_child(own: &[Gene], donor: &[Gene], lo: usize, hi: usize, carry_types: bool) -> Chromosome {
    let n = own.len();
    let donor_pos = position_of(donor);
    let own_types = type_of_node(own);
    let mut in_segment = vec![false; n];
    let mut nodes = vec![0; n];
    let mut types = vec![NodeType::Combined; n];
    for i in lo..=hi {
        nodes[i] = donor[i].node;
        types[i] = donor[i].ntype;
        in_segment[donor[i].node] = true;
    }
    for i in (1..n).filter(|i| !(lo..=hi).contains(i)) {
        let mut v = own[i].node;
        while in_segment[v] {
            v = own[donor_pos[v]].node;
        }
        nodes[i] = v;
        types[i] = own_types[v];
    }
    assemble(nodes, own, carry_types.then_some(&types[..]))
}

pub fn pmx_at(
    a: &Chromosome,
    b: &Chromosome,
    lo: usize,
    hi: usize,
    carry_types: bool,
) -> (Chromosome, Chromosome) {
    (
        pmx_child(a.genes(), b.genes(), lo, hi, carry_types),
        pmx_child(b.genes(), a.genes(), lo, hi, carry_types),
    )
}

/// Cycle crossover starting at position `start`: the cycle's positions keep
/// their own parent's genes, every other position takes the opposite parent's.
pub fn cx_at(
    a: &Chromosome,
    b: &Chromosome,
    start: usize,
    carry_types: bool,
) -> (Chromosome, Chromosome) {
    let (ga, gb) = (a.genes(), b.genes());
    let n = ga.len();
    let pos_a = position_of(ga);
    let mut in_cycle = vec![false; n];
    let mut i = start;
    while !in_cycle[i] {
        in_cycle[i] = true;
        i = pos_a[gb[i].node];
    }
    let child = |own: &[Gene], other: &[Gene]| {
        let genes: Vec<Gene> = (0..n)
            .map(|i| if in_cycle[i] { own[i] } else { other[i] })
            .collect();
        let types: Vec<NodeType> = genes.iter().map(|g| g.ntype).collect();
        assemble(
            genes.iter().map(|g| g.node).collect(),
            own,
            carry_types.then_some(&types[..]),
        )
    };
    (child(ga, gb), child(gb, ga))
}

/// Order crossover, one child: `lo..=hi` from `own`, then the remaining
/// positions filled with `other`'s genes in the order they appear after `hi`,
/// wrapping over the customer positions.
fn ox_child(own: &[Gene], other: &[Gene], lo: usize, hi: usize, carry_types: bool) -> Chromosome {
    let n = own.len();
    let m = n - 1;
    let mut present = vec![false; n];
    let mut nodes = vec![0; n];
    let mut types = vec![NodeType::Combined; n];
    for i in lo..=hi {
        nodes[i] = own[i].node;
        types[i] = own[i].ntype;
        present[own[i].node] = true;
    }
    // Customer positions are 1..=m; step cyclically within that ring.
    let next = |p: usize| if p == m { 1 } else { p + 1 };
    let mut slot = next(hi);
    let mut src = next(hi);
    for _ in 0..m {
        let gene = other[src];
        if !present[gene.node] {
            nodes[slot] = gene.node;
            types[slot] = gene.ntype;
            present[gene.node] = true;
            slot = next(slot);
        }
        src = next(src);
    }
    assemble(nodes, own, carry_types.then_some(&types[..]))
}

pub fn ox_at(
    a: &Chromosome,
    b: &Chromosome,
    lo: usize,
    hi: usize,
    carry_types: bool,
) -> (Chromosome, Chromosome) {
    (
        ox_child(a.genes(), b.genes(), lo, hi, carry_types),
        ox_child(b.genes(), a.genes(), lo, hi, carry_types),
    )
}

/// Type-vector recombination: child 1 keeps `a`'s tour and takes the type at
/// position `i` from `a` when `own_mask[i]` holds, otherwise from `b`; child 2
/// mirrors it.
pub fn types_by_mask(
    a: &Chromosome,
    b: &Chromosome,
    own_mask: &[bool],
) -> (Chromosome, Chromosome) {
    let child = |own: &[Gene], other: &[Gene]| {
        let genes = own
            .iter()
            .zip(other)
            .zip(own_mask)
            .enumerate()
            .map(|(i, ((o, t), &keep))| {
                let ntype = if i == 0 || keep { o.ntype } else { t.ntype };
                Gene::new(o.node, ntype)
            })
            .collect();
        Chromosome::from_genes_unchecked(genes)
    };
    (child(a.genes(), b.genes()), child(b.genes(), a.genes()))
}

/// Positions before `cut` from the corresponding parent, `cut..` from the
/// opposite one.
pub fn one_point_at(a: &Chromosome, b: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    let mask: Vec<bool> = (0..a.len()).map(|i| i < cut).collect();
    types_by_mask(a, b, &mask)
}

/// Positions `lo..=hi` from the corresponding parent, the rest from the
/// opposite one.
pub fn two_point_at(
    a: &Chromosome,
    b: &Chromosome,
    lo: usize,
    hi: usize,
) -> (Chromosome, Chromosome) {
    let mask: Vec<bool> = (0..a.len()).map(|i| (lo..=hi).contains(&i)).collect();
    types_by_mask(a, b, &mask)
}

fn cut_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let x = rng.gen_range(1..n);
    let y = rng.gen_range(1..n);
    (x.min(y), x.max(y))
}

/// Applies `op` with random cut points and repairs both children.
pub fn crossover<R: Rng + ?Sized>(
    op: CrossoverOp,
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n < 3 {
        return (a.clone(), b.clone());
    }
    let (mut c1, mut c2) = match op {
        CrossoverOp::PmxFull | CrossoverOp::PmxSeq => {
            let (lo, hi) = cut_pair(n, rng);
            pmx_at(a, b, lo, hi, op == CrossoverOp::PmxFull)
        }
        CrossoverOp::CxFull | CrossoverOp::CxSeq => {
            cx_at(a, b, rng.gen_range(1..n), op == CrossoverOp::CxFull)
        }
        CrossoverOp::OxFull | CrossoverOp::OxSeq => {
            let (lo, hi) = cut_pair(n, rng);
            ox_at(a, b, lo, hi, op == CrossoverOp::OxFull)
        }
        CrossoverOp::Uniform => {
            let mask: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            types_by_mask(a, b, &mask)
        }
        CrossoverOp::OnePoint => one_point_at(a, b, rng.gen_range(2..n)),
        CrossoverOp::TwoPoint => {
            let (lo, hi) = cut_pair(n, rng);
            two_point_at(a, b, lo, hi)
        }
    };
    c1.repair_in_place();
    c2.repair_in_place();
    (c1, c2)
}

/// The fitter parent's memeplex chooses the operator and its probability
/// (ties go to `p1`). Without crossover each child copies its own parent.
pub fn apply_crossover<R: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let memes = if p2.fitness < p1.fitness {
        &p2.memeplex
    } else {
        &p1.memeplex
    };
    if chance(memes.crossover_prob, rng) {
        crossover(memes.crossover, &p1.chromosome, &p2.chromosome, rng)
    } else {
        (p1.chromosome.clone(), p2.chromosome.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Memeplex;
    use crate::solution::is_feasible;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use NodeType::{Combined as C, Drone as D, TruckOnly as T};

    fn typed(tour: &[usize], types: &[NodeType]) -> Chromosome {
        Chromosome::new(
            tour.iter()
                .zip(types)
                .map(|(&n, &t)| Gene::new(n, t))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pmx_textbook_example() {
        let a = Chromosome::from_tour(&[0, 1, 2, 3, 4, 5]).unwrap();
        let b = Chromosome::from_tour(&[0, 3, 4, 1, 5, 2]).unwrap();
        let (c1, c2) = pmx_at(&a, &b, 3, 4, true);
        assert_eq!(c1.tour(), vec![0, 3, 2, 1, 5, 4]);
        assert!(c2.check_structure().is_ok());
    }

    #[test]
    fn pmx_carries_or_keeps_types() {
        let a = typed(&[0, 1, 2, 3, 4, 5], &[C, D, C, C, C, C]);
        let b = typed(&[0, 3, 4, 1, 5, 2], &[C, C, C, C, D, C]);
        let (full, _) = pmx_at(&a, &b, 3, 4, true);
        // Node 5 arrives from b's segment as a drone; node 3 replaces 1 and
        // takes a's type for node 3.
        assert_eq!(full.to_string(), "0:C 3:C 2:C 1:C 5:D 4:C");
        let (seq, _) = pmx_at(&a, &b, 3, 4, false);
        assert_eq!(seq.types(), a.types());
    }

    #[test]
    fn cx_cycle() {
        let a = Chromosome::from_tour(&[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let b = Chromosome::from_tour(&[0, 3, 1, 2, 6, 4, 5]).unwrap();
        // Cycle from position 1: 1 -> b[1]=3 at a-pos 3 -> b[3]=2 at 2 -> b[2]=1.
        let (c1, c2) = cx_at(&a, &b, 1, true);
        assert_eq!(c1.tour(), vec![0, 1, 2, 3, 6, 4, 5]);
        assert_eq!(c2.tour(), vec![0, 3, 1, 2, 4, 5, 6]);
    }

    #[test]
    fn ox_wraps() {
        let a = Chromosome::from_tour(&[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let b = Chromosome::from_tour(&[0, 6, 4, 2, 5, 3, 1]).unwrap();
        let (c1, _) = ox_at(&a, &b, 3, 4, true);
        // Segment [3, 4] kept; b read from position 5 onward is 3 1 6 4 2 5,
        // so 1 6 2 5 fill positions 5, 6, 1, 2.
        assert_eq!(c1.tour(), vec![0, 2, 5, 3, 4, 1, 6]);
    }

    #[test]
    fn point_crossovers_touch_types_only() {
        let a = typed(&[0, 1, 2, 3, 4], &[C, D, C, C, C]);
        let b = typed(&[0, 4, 3, 2, 1], &[C, C, C, D, T]);
        let (c1, c2) = one_point_at(&a, &b, 3);
        assert_eq!(c1.tour(), a.tour());
        assert_eq!(c2.tour(), b.tour());
        assert_eq!(c1.types(), vec![C, D, C, D, T]);
        assert_eq!(c2.types(), vec![C, C, C, C, C]);
        let (c1, _) = two_point_at(&a, &b, 2, 3);
        assert_eq!(c1.types(), vec![C, C, C, C, T]);
    }

    #[test]
    fn identical_parents_reproduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = typed(&[0, 3, 1, 4, 2, 5], &[C, T, D, C, D, C]);
        assert!(is_feasible(&p));
        for &op in CrossoverOp::ALL {
            for _ in 0..50 {
                let (c1, c2) = crossover(op, &p, &p, &mut rng);
                assert_eq!(c1, p, "{op:?}");
                assert_eq!(c2, p, "{op:?}");
            }
        }
    }

    #[test]
    fn zero_probability_inherits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut memeplex = Memeplex::random(&mut rng);
        memeplex.crossover_prob = 0;
        let p1 = Individual {
            chromosome: typed(&[0, 1, 2, 3], &[C, D, C, C]),
            memeplex,
            fitness: 1.0,
        };
        let p2 = Individual {
            chromosome: typed(&[0, 3, 2, 1], &[C, C, C, C]),
            memeplex,
            fitness: 2.0,
        };
        for _ in 0..100 {
            let (c1, c2) = apply_crossover(&p1, &p2, &mut rng);
            assert_eq!(c1, p1.chromosome);
            assert_eq!(c2, p2.chromosome);
        }
    }
}
