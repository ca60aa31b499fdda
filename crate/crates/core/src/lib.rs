//! Self-adaptive genetic algorithm for the Flying Sidekick Travelling
//! Salesman Problem: one truck and one drone serve all customers, the drone
//! carrying a single parcel per sortie between two truck stops.
//!
//! ```
//! use fstsp::{evolve, GAConfig, Instance};
//!
//! let inst = Instance::random_uniform("demo", 8, 100.0, 1);
//! let cfg = GAConfig { num_generations: 2_000, seed: 7, ..GAConfig::default() };
//! let run = evolve(&inst, &cfg).unwrap();
//! assert!(run.best_fitness > 0.0 && run.best_chromosome.len() == 8);
//! ```

pub mod bench;
pub(crate) mod clock;
pub mod error;
pub mod evolution;
pub mod instances;
pub mod oracle;
pub mod seeding;
pub mod solution;

pub use error::{Error, Result};
pub use evolution::{
    evolve, evolve_with, GAConfig, Individual, Memeplex, Population, RunOptions, RunStats,
};
pub use instances::{
    load_instance, parse_instance, DistanceMatrix, Instance, InstanceFormat, Node, SpeedModel,
};
pub use oracle::{brute_force_solve, verify_run, GapReport, OracleResult};
pub use solution::{
    evaluate_makespan, repair, validate_feasibility, Chromosome, Gene, NodeType, Violation,
};
