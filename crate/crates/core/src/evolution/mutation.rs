//! Two-stage mutation: a tour-sequence move followed by a node-type operator
//! chosen by the type of a randomly picked gene.
//!
//! The `apply_*` functions act at a given position and do not repair; the
//! random `mutate_*` entry points draw positions and repair the result.

use rand::Rng;

use super::memeplex::{
    chance, CombinedMutation, DroneMutation, Memeplex, TourMutation, TruckMutation,
};
use crate::solution::{Chromosome, NodeType};

use NodeType::{Combined as C, Drone as D, TruckOnly as T};

/// Moves the genes at positions `a < b` (both non-depot). Genes keep their
/// types.
pub fn apply_tour_move(chrom: &mut Chromosome, op: TourMutation, a: usize, b: usize) {
    debug_assert!(0 < a && a < b && b < chrom.len());
    let genes = chrom.genes_mut();
    match op {
        TourMutation::Swap => genes.swap(a, b),
        TourMutation::Slide => genes[a..=b].rotate_left(1),
        TourMutation::Reverse => genes[a..=b].reverse(),
    }
}

pub fn mutate_tour<R: Rng + ?Sized>(
    chrom: &Chromosome,
    op: TourMutation,
    prob_tenths: u8,
    rng: &mut R,
) -> Chromosome {
    let mut out = chrom.clone();
    let n = out.len();
    if n < 3 || !chance(prob_tenths, rng) {
        return out;
    }
    let a = rng.gen_range(1..n);
    let mut b = rng.gen_range(1..n - 1);
    if b >= a {
        b += 1;
    }
    apply_tour_move(&mut out, op, a.min(b), a.max(b));
    out.repair_in_place();
    out
}

fn ty(chrom: &Chromosome, pos: usize) -> NodeType {
    chrom.genes()[pos].ntype
}

fn push_left(chrom: &mut Chromosome, pos: usize) {
    if pos > 1 {
        chrom.set_type(pos - 1, T);
    }
}

fn push_right(chrom: &mut Chromosome, pos: usize) {
    if pos + 1 < chrom.len() {
        chrom.set_type(pos + 1, T);
    }
}

/// The left neighbour flies instead; the old drone gene stays on the truck
/// path if the sortie continues to its right, else it becomes the rendezvous.
fn shift_left(chrom: &mut Chromosome, pos: usize) {
    if pos > 1 {
        let continues = pos + 1 < chrom.len() && ty(chrom, pos + 1) == T;
        chrom.set_type(pos - 1, D);
        chrom.set_type(pos, if continues { T } else { C });
    }
}

/// Mirror of [`shift_left`]: the old gene stays on the truck path if the
/// sortie started further left, else it becomes the launch point.
fn shift_right(chrom: &mut Chromosome, pos: usize) {
    if pos + 1 < chrom.len() {
        let started_before = ty(chrom, pos - 1) == T;
        chrom.set_type(pos + 1, D);
        chrom.set_type(pos, if started_before { T } else { C });
    }
}

pub fn apply_drone_mutation(chrom: &mut Chromosome, pos: usize, op: DroneMutation) {
    match op {
        DroneMutation::PushLeft => push_left(chrom, pos),
        DroneMutation::PushRight => push_right(chrom, pos),
        DroneMutation::PushBoth => {
            push_left(chrom, pos);
            push_right(chrom, pos);
        }
        DroneMutation::ShiftLeft => shift_left(chrom, pos),
        DroneMutation::ShiftRight => shift_right(chrom, pos),
        // Left then right, both anchored at the original position.
        DroneMutation::ShiftBoth => {
            shift_left(chrom, pos);
            shift_right(chrom, pos);
        }
    }
}

pub fn apply_combined_mutation(chrom: &mut Chromosome, pos: usize, op: CombinedMutation) {
    chrom.set_type(pos, D);
    match op {
        CombinedMutation::MakeFly => {}
        CombinedMutation::MakeFlyPushLeft => push_left(chrom, pos),
        CombinedMutation::MakeFlyPushRight => push_right(chrom, pos),
        CombinedMutation::MakeFlyPushBoth => {
            push_left(chrom, pos);
            push_right(chrom, pos);
        }
    }
}

/// Subtour bounds around `pos`: the nearest combined position to the left and
/// to the right (`n` standing for the return to the depot).
fn enclosing(chrom: &Chromosome, pos: usize) -> (usize, usize) {
    let genes = chrom.genes();
    let start = (0..pos).rev().find(|&i| genes[i].ntype == C).unwrap_or(0);
    let end = (pos + 1..genes.len())
        .find(|&i| genes[i].ntype == C)
        .unwrap_or(genes.len());
    (start, end)
}

fn drone_between(chrom: &Chromosome, start: usize, end: usize) -> Option<usize> {
    (start + 1..end).find(|&i| ty(chrom, i) == D)
}

pub fn apply_truck_mutation(chrom: &mut Chromosome, pos: usize, op: TruckMutation) {
    let n = chrom.len();
    let (start, end) = enclosing(chrom, pos);
    match op {
        // Demote the sortie endpoint on this gene's side of the drone, unless
        // that endpoint is the depot or the neighbouring subtour has its own
        // drone.
        TruckMutation::PushOut => {
            let Some(drone) = drone_between(chrom, start, end) else {
                return;
            };
            if pos < drone {
                if start == 0 {
                    return;
                }
                let (prev_start, _) = enclosing(chrom, start);
                if drone_between(chrom, prev_start, start).is_none()
                    && !(prev_start == 0 && end == n)
                {
                    chrom.set_type(start, T);
                }
            } else {
                if end == n {
                    return;
                }
                let (_, next_end) = enclosing(chrom, end);
                if drone_between(chrom, end, next_end).is_none() && !(start == 0 && next_end == n) {
                    chrom.set_type(end, T);
                }
            }
        }
        // Dissolve the whole sortie this gene belongs to.
        TruckMutation::EndDroneTour => {
            for i in start + 1..end {
                chrom.set_type(i, C);
            }
        }
    }
}

/// Applies the memeplex's operator for the type of the gene at `pos`.
pub fn apply_type_operator(chrom: &mut Chromosome, pos: usize, memes: &Memeplex) {
    match ty(chrom, pos) {
        C => apply_combined_mutation(chrom, pos, memes.combined_mutation),
        D => apply_drone_mutation(chrom, pos, memes.drone_mutation),
        T => apply_truck_mutation(chrom, pos, memes.truck_mutation),
    }
}

pub fn mutate_types<R: Rng + ?Sized>(
    chrom: &Chromosome,
    memes: &Memeplex,
    rng: &mut R,
) -> Chromosome {
    let mut out = chrom.clone();
    if out.len() < 2 || !chance(memes.type_mutation_prob, rng) {
        return out;
    }
    let pos = rng.gen_range(1..out.len());
    apply_type_operator(&mut out, pos, memes);
    out.repair_in_place();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::repair;

    fn types(t: &[NodeType]) -> Chromosome {
        Chromosome::from_types(t)
    }

    #[test]
    fn tour_moves() {
        let base = Chromosome::from_tour(&[0, 1, 2, 3]).unwrap();
        for (op, expected) in [
            (TourMutation::Swap, [0, 3, 2, 1]),
            (TourMutation::Reverse, [0, 3, 2, 1]),
            (TourMutation::Slide, [0, 2, 3, 1]),
        ] {
            let mut c = base.clone();
            apply_tour_move(&mut c, op, 1, 3);
            assert_eq!(c.tour(), expected, "{op:?}");
        }
    }

    #[test]
    fn tour_moves_carry_types() {
        let mut c = types(&[C, D, C, C]);
        apply_tour_move(&mut c, TourMutation::Swap, 1, 3);
        assert_eq!(c.to_string(), "0:C 3:C 2:C 1:D");
    }

    #[test]
    fn tour_mutation_needs_two_customers() {
        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        let c = Chromosome::from_tour(&[0, 1]).unwrap();
        assert_eq!(mutate_tour(&c, TourMutation::Swap, 10, &mut rng), c);
    }

    #[test]
    fn make_fly() {
        let mut c = types(&[C, C, C]);
        apply_combined_mutation(&mut c, 1, CombinedMutation::MakeFly);
        assert_eq!(c, types(&[C, D, C]));

        let mut c = types(&[C, C, C, C, C]);
        apply_combined_mutation(&mut c, 2, CombinedMutation::MakeFlyPushBoth);
        assert_eq!(c, types(&[C, T, D, T, C]));
    }

    #[test]
    fn drone_pushes() {
        let mut c = types(&[C, C, D, C]);
        apply_drone_mutation(&mut c, 2, DroneMutation::PushLeft);
        assert_eq!(c, types(&[C, T, D, C]));

        // Left neighbour is the depot: no-op.
        let mut c = types(&[C, D, C]);
        apply_drone_mutation(&mut c, 1, DroneMutation::PushLeft);
        assert_eq!(c, types(&[C, D, C]));

        // No right neighbour: no-op.
        let mut c = types(&[C, C, D]);
        apply_drone_mutation(&mut c, 2, DroneMutation::PushRight);
        assert_eq!(c, types(&[C, C, D]));
    }

    #[test]
    fn drone_shifts() {
        let mut c = types(&[C, C, D, C]);
        apply_drone_mutation(&mut c, 2, DroneMutation::ShiftLeft);
        assert_eq!(c, types(&[C, D, C, C]));

        let mut c = types(&[C, C, D, T, C]);
        apply_drone_mutation(&mut c, 2, DroneMutation::ShiftLeft);
        assert_eq!(c, types(&[C, D, T, T, C]));

        let mut c = types(&[C, T, D, C, C]);
        apply_drone_mutation(&mut c, 2, DroneMutation::ShiftRight);
        assert_eq!(c, types(&[C, T, T, D, C]));

        let mut c = types(&[C, C, D, C, C]);
        apply_drone_mutation(&mut c, 2, DroneMutation::ShiftBoth);
        assert_eq!(c, types(&[C, D, C, D, C]));
    }

    #[test]
    fn push_out_extends_sortie() {
        // Truck-only gene left of the drone: the launch point is demoted.
        let mut c = types(&[C, C, T, D, C, C]);
        apply_truck_mutation(&mut c, 2, TruckMutation::PushOut);
        assert_eq!(c, types(&[C, T, T, D, C, C]));

        // Right of the drone: the rendezvous is demoted.
        let mut c = types(&[C, C, D, T, C, C]);
        apply_truck_mutation(&mut c, 3, TruckMutation::PushOut);
        assert_eq!(c, types(&[C, C, D, T, T, C]));

        // Launch point is the depot: no-op.
        let mut c = types(&[C, T, D, C]);
        apply_truck_mutation(&mut c, 1, TruckMutation::PushOut);
        assert_eq!(c, types(&[C, T, D, C]));

        // Neighbouring subtour has its own drone: no-op.
        let mut c = types(&[C, D, C, T, D, C]);
        apply_truck_mutation(&mut c, 3, TruckMutation::PushOut);
        assert_eq!(c, types(&[C, D, C, T, D, C]));
    }

    #[test]
    fn end_drone_tour() {
        let mut c = types(&[C, T, D, C]);
        apply_truck_mutation(&mut c, 1, TruckMutation::EndDroneTour);
        assert_eq!(repair(&c), types(&[C, C, C, C]));

        let mut c = types(&[C, T, D, T, C, D, C]);
        apply_truck_mutation(&mut c, 3, TruckMutation::EndDroneTour);
        assert_eq!(c, types(&[C, C, C, C, C, D, C]));
    }
}
