//! Regenerates the bundled instances under `data/` and their exact optima.
//!
//! cargo run --release -p fstsp-core --example gen_data -- crates/core/data

use std::fmt::Write as _;
use std::path::PathBuf;

use fstsp::oracle::{brute_force_unpruned, MAX_LIMIT_N};
use fstsp::Instance;

fn instance(name: &str, nodes: usize, seed: u64) -> Instance {
    let raw = Instance::random_uniform(name, nodes, 100.0, seed);
    let coords: Vec<(f64, f64)> = raw
        .nodes()
        .iter()
        .map(|n| ((n.x * 100.0).round() / 100.0, (n.y * 100.0).round() / 100.0))
        .collect();
    Instance::from_coords(name, &coords, raw.alpha()).unwrap()
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut refs = String::from("instance,optimum\n");
    for customers in [5usize, 6, 7] {
        for k in 1..=10u64 {
            let name = format!("s{customers}_{k:02}");
            let inst = instance(&name, customers + 1, 1000 * customers as u64 + k);
            let opt =
                brute_force_unpruned(&inst.distance_matrix(), &inst.speed_model(), MAX_LIMIT_N)
                    .unwrap();
            eprintln!(
                "{name}: {:.4} {}",
                opt.optimal_makespan, opt.optimal_chromosome
            );
            writeln!(refs, "{name},{}", opt.optimal_makespan).unwrap();
            std::fs::write(dir.join(format!("{name}.txt")), inst.to_canonical()).unwrap();
        }
    }
    for nodes in [20usize, 50] {
        let name = format!("r{nodes}");
        let inst = instance(&name, nodes, 7000 + nodes as u64);
        std::fs::write(dir.join(format!("{name}.txt")), inst.to_canonical()).unwrap();
    }
    std::fs::write(dir.join("references.csv"), refs).unwrap();
}
