use rand::Rng;
use serde::{Deserialize, Serialize};

macro_rules! meme_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Self::ALL[rng.gen_range(0..Self::ALL.len())]
            }
        }
    };
}

meme_enum! {
    /// Recombination operators. The `*Full` variants move node types along
    /// with node ids; the `*Seq` variants recombine the tour only and keep
    /// each child's type-by-position vector from its own parent. `Uniform`,
    /// `OnePoint` and `TwoPoint` recombine the type vector only.
    CrossoverOp {
        PmxFull, PmxSeq, CxFull, CxSeq, OxFull, OxSeq, Uniform, OnePoint, TwoPoint,
    }
}

meme_enum! {
    CombinedMutation { MakeFly, MakeFlyPushLeft, MakeFlyPushRight, MakeFlyPushBoth }
}

meme_enum! {
    DroneMutation { PushLeft, PushRight, PushBoth, ShiftLeft, ShiftRight, ShiftBoth }
}

meme_enum! {
    TruckMutation { PushOut, EndDroneTour }
}

meme_enum! {
    TourMutation { Swap, Slide, Reverse }
}

/// Largest probability meme value; probabilities are in tenths.
pub const MAX_TENTHS: u8 = 10;

/// The eight memes an individual carries alongside its chromosome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Memeplex {
    pub crossover: CrossoverOp,
    pub crossover_prob: u8,
    pub combined_mutation: CombinedMutation,
    pub drone_mutation: DroneMutation,
    pub truck_mutation: TruckMutation,
    pub type_mutation_prob: u8,
    pub tour_mutation: TourMutation,
    pub tour_mutation_prob: u8,
}

pub const MEME_SLOTS: usize = 8;

fn random_tenths<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.gen_range(0..=MAX_TENTHS)
}

/// True with probability `tenths / 10`.
pub fn chance<R: Rng + ?Sized>(tenths: u8, rng: &mut R) -> bool {
    rng.gen_range(0..MAX_TENTHS) < tenths
}

impl Memeplex {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            crossover: CrossoverOp::random(rng),
            crossover_prob: random_tenths(rng),
            combined_mutation: CombinedMutation::random(rng),
            drone_mutation: DroneMutation::random(rng),
            truck_mutation: TruckMutation::random(rng),
            type_mutation_prob: random_tenths(rng),
            tour_mutation: TourMutation::random(rng),
            tour_mutation_prob: random_tenths(rng),
        }
    }

    pub fn is_in_domain(&self) -> bool {
        [
            self.crossover_prob,
            self.type_mutation_prob,
            self.tour_mutation_prob,
        ]
        .iter()
        .all(|&p| p <= MAX_TENTHS)
    }

    /// Resamples each slot independently when a uniform draw from `[0, 10)`
    /// falls below `innovation_rate`. Returns which slots were resampled, in
    /// field order.
    pub fn mutate_tracked<R: Rng + ?Sized>(
        &mut self,
        innovation_rate: u8,
        rng: &mut R,
    ) -> [bool; MEME_SLOTS] {
        let mut hit = [false; MEME_SLOTS];
        for slot in hit.iter_mut() {
            *slot = rng.gen::<f64>() * 10.0 < f64::from(innovation_rate);
        }
        if hit[0] {
            self.crossover = CrossoverOp::random(rng);
        }
        if hit[1] {
            self.crossover_prob = random_tenths(rng);
        }
        if hit[2] {
            self.combined_mutation = CombinedMutation::random(rng);
        }
        if hit[3] {
            self.drone_mutation = DroneMutation::random(rng);
        }
        if hit[4] {
            self.truck_mutation = TruckMutation::random(rng);
        }
        if hit[5] {
            self.type_mutation_prob = random_tenths(rng);
        }
        if hit[6] {
            self.tour_mutation = TourMutation::random(rng);
        }
        if hit[7] {
            self.tour_mutation_prob = random_tenths(rng);
        }
        hit
    }
}

pub fn mutate_memeplex<R: Rng + ?Sized>(
    mplex: &Memeplex,
    innovation_rate: u8,
    rng: &mut R,
) -> Memeplex {
    let mut out = *mplex;
    out.mutate_tracked(innovation_rate, rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn operator_counts() {
        assert_eq!(CrossoverOp::ALL.len(), 9);
        let mutations = CombinedMutation::ALL.len()
            + DroneMutation::ALL.len()
            + TruckMutation::ALL.len()
            + TourMutation::ALL.len();
        assert_eq!(mutations, 15);
    }

    #[test]
    fn innovation_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = Memeplex::random(&mut rng);
        for _ in 0..1000 {
            assert_eq!(mutate_memeplex(&base, 0, &mut rng), base);
            let mut m = base;
            assert_eq!(m.mutate_tracked(10, &mut rng), [true; MEME_SLOTS]);
            assert!(m.is_in_domain());
        }
    }

    #[test]
    fn chance_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| !chance(0, &mut rng)));
        assert!((0..1000).all(|_| chance(10, &mut rng)));
    }
}
