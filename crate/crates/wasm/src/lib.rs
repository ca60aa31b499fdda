//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes and returns JSON strings. The logic lives in plain
//! functions so it can be tested natively.

use fstsp::oracle::{brute_force_solve, DEFAULT_LIMIT_N};
use fstsp::seeding::{compute_node_scores, seed_tour};
use fstsp::{evolve, Chromosome, GAConfig, Instance, NodeType};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Largest node count the page will run the exact solver on.
pub const BRUTE_FORCE_LIMIT: usize = DEFAULT_LIMIT_N;

#[derive(Debug, Serialize, Deserialize)]
pub struct Points {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    fstsp::instances::DEFAULT_ALPHA
}

#[derive(Debug, Serialize)]
pub struct Stop {
    pub node: usize,
    /// `C`, `D` or `T`.
    pub kind: char,
}

#[derive(Debug, Serialize)]
pub struct Route {
    pub makespan: f64,
    pub tsp_length: f64,
    pub stops: Vec<Stop>,
}

fn instance(points: &str) -> Result<Instance, String> {
    let p: Points = serde_json::from_str(points).map_err(|e| e.to_string())?;
    if p.x.len() != p.y.len() {
        return Err("x and y differ in length".into());
    }
    let coords: Vec<(f64, f64)> = p.x.iter().copied().zip(p.y.iter().copied()).collect();
    Instance::from_coords("demo", &coords, p.alpha).map_err(|e| e.to_string())
}

fn stops(chrom: &Chromosome) -> Vec<Stop> {
    chrom
        .genes()
        .iter()
        .map(|g| Stop {
            node: g.node,
            kind: g.ntype.letter(),
        })
        .collect()
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// `n` uniform points in a `side` square; node 0 is the depot.
pub fn random_points(n: usize, side: f64, seed: u64) -> Result<String, String> {
    if n < 2 {
        return Err("need at least two points".into());
    }
    let inst = Instance::random_uniform("demo", n, side, seed);
    json(&Points {
        x: inst.nodes().iter().map(|p| p.x).collect(),
        y: inst.nodes().iter().map(|p| p.y).collect(),
        alpha: inst.alpha(),
    })
}

pub fn run_ga(points: &str, generations: u64, seed: u64) -> Result<String, String> {
    let inst = instance(points)?;
    let cfg = GAConfig {
        num_generations: generations,
        seed,
        ..GAConfig::default()
    };
    let run = evolve(&inst, &cfg).map_err(|e| e.to_string())?;
    json(&Route {
        makespan: run.best_fitness,
        tsp_length: run.seed_tour_length,
        stops: stops(&run.best_chromosome),
    })
}

pub fn run_brute_force(points: &str) -> Result<String, String> {
    let inst = instance(points)?;
    let r = brute_force_solve(&inst, BRUTE_FORCE_LIMIT).map_err(|e| e.to_string())?;
    let tour = r.optimal_chromosome.tour();
    json(&Route {
        makespan: r.optimal_makespan,
        tsp_length: inst.distance_matrix().tour_length(&tour),
        stops: stops(&r.optimal_chromosome),
    })
}

/// Drone-saving score per node along the seed tour, in tour order.
pub fn scores(points: &str) -> Result<String, String> {
    let inst = instance(points)?;
    let dm = inst.distance_matrix();
    let tour = seed_tour(&dm, 0);
    let s = compute_node_scores(&tour, &dm, &inst.speed_model());
    let stops: Vec<Stop> = tour
        .iter()
        .map(|&node| Stop {
            node,
            kind: NodeType::Combined.letter(),
        })
        .collect();
    json(&serde_json::json!({ "tour": stops, "scores": s.0 }))
}

#[wasm_bindgen(js_name = randomPoints)]
pub fn random_points_js(n: usize, side: f64, seed: u32) -> Result<String, JsError> {
    random_points(n, side, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve(points: &str, generations: u32, seed: u32) -> Result<String, JsError> {
    run_ga(points, u64::from(generations), u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bruteForce)]
pub fn brute_force(points: &str) -> Result<String, JsError> {
    run_brute_force(points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = nodeScores)]
pub fn node_scores(points: &str) -> Result<String, JsError> {
    scores(points).map_err(|e| JsError::new(&e))
}
