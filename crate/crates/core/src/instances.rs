//! Problem instances, the Euclidean distance matrix and the truck/drone
//! travel-time model.
//!
//! Two text formats are understood:
//!
//! * **canonical**: line 1 is the instance name, line 2 the drone/truck speed
//!   ratio, line 3 the node count `n`, followed by `n` lines of `id x y`. The
//!   first node is the depot.
//! * **bouman**: the single-centre benchmark layout. Lines starting with `/*`
//!   are comments. The remaining lines hold the truck speed, the drone speed,
//!   the declared node count and then one `x y [label]` line per location,
//!   depot first.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default drone speed relative to the truck.
pub const DEFAULT_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: i64,
    pub x: f64,
    pub y: f64,
}

/// An FSTSP instance. `nodes[0]` is always the depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    name: String,
    nodes: Vec<Node>,
    alpha: f64,
}

impl Instance {
    pub fn new(name: impl Into<String>, nodes: Vec<Node>, alpha: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInstance("no nodes".into()));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        let mut seen = HashSet::with_capacity(nodes.len());
        for node in &nodes {
            if !(node.x.is_finite() && node.y.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "node {} has non-finite coordinates",
                    node.id
                )));
            }
            if !seen.insert(node.id) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate node id {}",
                    node.id
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            nodes,
            alpha,
        })
    }

    /// Builds an instance from bare coordinates, depot first, ids `0..n`.
    pub fn from_coords(name: impl Into<String>, coords: &[(f64, f64)], alpha: f64) -> Result<Self> {
        let nodes = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node { id: i as i64, x, y })
            .collect();
        Self::new(name, nodes, alpha)
    }

    /// Uniformly random coordinates in `[0, side]²`.
    pub fn random_uniform(name: impl Into<String>, n: usize, side: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<(f64, f64)> = (0..n.max(1))
            .map(|_| (rng.gen::<f64>() * side, rng.gen::<f64>() * side))
            .collect();
        Self::from_coords(name, &coords, DEFAULT_ALPHA).expect("generated coordinates are finite")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_customers(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn depot(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn speed_model(&self) -> SpeedModel {
        SpeedModel::new(self.alpha)
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        DistanceMatrix::new(self)
    }

    /// Serialises to the canonical text format. Floats use the shortest
    /// representation that round-trips exactly.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.name);
        let _ = writeln!(out, "{}", self.alpha);
        let _ = writeln!(out, "{}", self.nodes.len());
        for node in &self.nodes {
            let _ = writeln!(out, "{} {} {}", node.id, node.x, node.y);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceFormat {
    Bouman,
    Canonical,
}

impl InstanceFormat {
    /// Bouman files open with a `/*` comment; anything else is canonical.
    pub fn detect(text: &str) -> Self {
        match text.lines().map(str::trim).find(|l| !l.is_empty()) {
            Some(l) if l.starts_with("/*") => InstanceFormat::Bouman,
            _ => InstanceFormat::Canonical,
        }
    }
}

impl FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bouman" => Ok(InstanceFormat::Bouman),
            "canonical" => Ok(InstanceFormat::Canonical),
            other => Err(Error::Config(format!("unknown instance format `{other}`"))),
        }
    }
}

/// Parses instance text. For bouman files the instance name is left empty;
/// [`load_instance`] fills it from the file stem.
pub fn parse_instance(source: &str, format: InstanceFormat) -> Result<Instance> {
    match format {
        InstanceFormat::Canonical => parse_canonical(source),
        InstanceFormat::Bouman => parse_bouman(source, ""),
    }
}

/// Reads an instance file, auto-detecting the format unless one is given.
pub fn load_instance(path: &Path, format: Option<InstanceFormat>) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let format = format.unwrap_or_else(|| InstanceFormat::detect(&text));
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match format {
        InstanceFormat::Canonical => parse_canonical(&text),
        InstanceFormat::Bouman => parse_bouman(&text, &stem),
    }
}

fn number<T: FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what} `{token}`")))
}

fn parse_canonical(source: &str) -> Result<Instance> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (_, name) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input, expected instance name"))?;
    let (line, alpha_text) = lines
        .next()
        .ok_or_else(|| Error::parse(2, "missing alpha"))?;
    let alpha: f64 = number(Some(alpha_text), line, "alpha")?;
    let (line, n_text) = lines
        .next()
        .ok_or_else(|| Error::parse(3, "missing node count"))?;
    let declared: usize = number(Some(n_text), line, "node count")?;
    if declared < 2 {
        return Err(Error::InstanceTooSmall(declared));
    }

    let mut nodes = Vec::with_capacity(declared);
    for (line, text) in lines.by_ref().take(declared) {
        let mut fields = text.split_whitespace();
        let id = number(fields.next(), line, "node id")?;
        let x = number(fields.next(), line, "x coordinate")?;
        let y = number(fields.next(), line, "y coordinate")?;
        if fields.next().is_some() {
            return Err(Error::parse(line, "expected `id x y`"));
        }
        nodes.push(Node { id, x, y });
    }
    if nodes.len() < declared {
        return Err(Error::Truncated {
            declared,
            found: nodes.len(),
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::parse(line, "trailing data after the declared nodes"));
    }
    Instance::new(name, nodes, alpha)
}

fn parse_bouman(source: &str, name: &str) -> Result<Instance> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with("/*"));

    let (line, text) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input, expected truck speed"))?;
    let truck_speed: f64 = number(Some(text), line, "truck speed")?;
    let (line, text) = lines
        .next()
        .ok_or_else(|| Error::parse(line + 1, "missing drone speed"))?;
    let drone_speed: f64 = number(Some(text), line, "drone speed")?;
    let (line, text) = lines
        .next()
        .ok_or_else(|| Error::parse(line + 1, "missing node count"))?;
    let declared: usize = number(Some(text), line, "node count")?;
    if !(truck_speed > 0.0 && drone_speed > 0.0) {
        return Err(Error::parse(line, "speeds must be positive"));
    }

    let mut nodes = Vec::new();
    for (line, text) in lines {
        let mut fields = text.split_whitespace();
        let x = number(fields.next(), line, "x coordinate")?;
        let y = number(fields.next(), line, "y coordinate")?;
        let id = nodes.len() as i64;
        nodes.push(Node { id, x, y });
    }
    // Some files count the depot in the declared total, others list it in
    // addition to the declared locations; both layouts are accepted.
    if nodes.len() < declared {
        return Err(Error::Truncated {
            declared,
            found: nodes.len(),
        });
    }
    if nodes.len() > declared + 1 {
        return Err(Error::parse(
            line,
            format!(
                "declared {declared} nodes but found {} coordinate lines",
                nodes.len()
            ),
        ));
    }
    if nodes.len() < 2 {
        return Err(Error::InstanceTooSmall(nodes.len()));
    }
    Instance::new(name, nodes, drone_speed / truck_speed)
}

/// Truck speed is fixed at 1, so truck time equals distance and drone time
/// is distance divided by `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedModel {
    pub truck_speed: f64,
    pub alpha: f64,
}

impl SpeedModel {
    pub fn new(alpha: f64) -> Self {
        Self {
            truck_speed: 1.0,
            alpha,
        }
    }
}

impl Default for SpeedModel {
    fn default() -> Self {
        Self::new(DEFAULT_ALPHA)
    }
}

/// Dense symmetric matrix of Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(inst: &Instance) -> Self {
        Self::from_points(inst.nodes().iter().map(|n| (n.x, n.y)))
    }

    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let points: Vec<(f64, f64)> = points.into_iter().collect();
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
                let dist = (dx * dx + dy * dy).sqrt();
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        Self { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unchecked lookup for hot loops; panics on out-of-range indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    fn check(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::OutOfBounds { index, len: self.n })
        }
    }

    pub fn truck_time(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.get(i, j))
    }

    pub fn drone_time(&self, sm: &SpeedModel, i: usize, j: usize) -> Result<f64> {
        Ok(self.truck_time(i, j)? / sm.alpha)
    }

    /// Length of the closed tour visiting `tour` in order and returning to
    /// its first element.
    pub fn tour_length(&self, tour: &[usize]) -> f64 {
        match tour.len() {
            0 | 1 => 0.0,
            len => (0..len)
                .map(|i| self.get(tour[i], tour[(i + 1) % len]))
                .sum(),
        }
    }
}

/// Reads a seed tour: one node index per line, `#` comments allowed.
pub fn read_tour_file(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tour(&text)
}

pub fn parse_tour(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| number(Some(l), line, "node id"))
        .collect()
}
