//! Candidate solutions: typed tours, their decomposition into subtour pairs,
//! makespan evaluation and the repair operator.
//!
//! A chromosome lists every node once, depot first. Each gene carries a
//! [`NodeType`]. Reading the tour cyclically (back to the depot after the last
//! gene), every maximal run between two consecutive combined genes is one
//! subtour: the truck drives from the opening combined node through the
//! truck-only nodes to the closing combined node, while the drone (if the run
//! holds a drone gene) flies launch -> drone node -> rendezvous.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instances::{DistanceMatrix, SpeedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum NodeType {
    Combined = 1,
    Drone = 2,
    TruckOnly = 3,
}

impl NodeType {
    pub const ALL: [NodeType; 3] = [NodeType::Combined, NodeType::Drone, NodeType::TruckOnly];

    pub fn letter(self) -> char {
        match self {
            NodeType::Combined => 'C',
            NodeType::Drone => 'D',
            NodeType::TruckOnly => 'T',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'C' | 'c' => Some(NodeType::Combined),
            'D' | 'd' => Some(NodeType::Drone),
            'T' | 't' => Some(NodeType::TruckOnly),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gene {
    pub node: usize,
    pub ntype: NodeType,
}

impl Gene {
    pub const fn new(node: usize, ntype: NodeType) -> Self {
        Self { node, ntype }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    genes: Vec<Gene>,
}

impl Chromosome {
    /// Checks the structural invariants: the nodes form a permutation of
    /// `0..n` and the first gene is the depot, typed combined.
    pub fn new(genes: Vec<Gene>) -> Result<Self> {
        let chrom = Self { genes };
        chrom.check_structure()?;
        Ok(chrom)
    }

    /// All-combined chromosome following `tour`, which must start at the depot.
    pub fn from_tour(tour: &[usize]) -> Result<Self> {
        Self::new(
            tour.iter()
                .map(|&node| Gene::new(node, NodeType::Combined))
                .collect(),
        )
    }

    /// Tour `0, 1, .., n-1` with the given types (`types[0]` is ignored and
    /// forced to combined).
    pub fn from_types(types: &[NodeType]) -> Self {
        let genes = types
            .iter()
            .enumerate()
            .map(|(i, &t)| Gene::new(i, if i == 0 { NodeType::Combined } else { t }))
            .collect();
        Self { genes }
    }

    pub fn check_structure(&self) -> Result<()> {
        let n = self.genes.len();
        if n == 0 {
            return Err(Error::InvalidChromosome("empty chromosome".into()));
        }
        if self.genes[0] != Gene::new(0, NodeType::Combined) {
            return Err(Error::InvalidChromosome(
                "first gene must be the depot, typed combined".into(),
            ));
        }
        let mut seen = vec![false; n];
        for (pos, gene) in self.genes.iter().enumerate() {
            if gene.node >= n || std::mem::replace(&mut seen[gene.node], true) {
                return Err(Error::InvalidChromosome(format!(
                    "gene {pos} (node {}) breaks the permutation",
                    gene.node
                )));
            }
        }
        Ok(())
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [Gene] {
        &mut self.genes
    }

    pub(crate) fn from_genes_unchecked(genes: Vec<Gene>) -> Self {
        debug_assert!(Self {
            genes: genes.clone()
        }
        .check_structure()
        .is_ok());
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn tour(&self) -> Vec<usize> {
        self.genes.iter().map(|g| g.node).collect()
    }

    pub fn types(&self) -> Vec<NodeType> {
        self.genes.iter().map(|g| g.ntype).collect()
    }

    pub fn count(&self, ntype: NodeType) -> usize {
        self.genes.iter().filter(|g| g.ntype == ntype).count()
    }

    pub(crate) fn set_type(&mut self, pos: usize, ntype: NodeType) {
        if pos != 0 {
            self.genes[pos].ntype = ntype;
        }
    }

    /// Applies the repair operator in place; returns whether anything changed.
    pub fn repair_in_place(&mut self) -> bool {
        let mut changed_any = false;
        while repair_pass(&mut self.genes) {
            changed_any = true;
        }
        changed_any
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, gene) in self.genes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", gene.node, gene.ntype.letter())?;
        }
        Ok(())
    }
}

impl FromStr for Chromosome {
    type Err = Error;

    /// Parses `nodeIndex:typeLetter` tokens, e.g. `0:C 3:D 1:T 2:C`.
    fn from_str(s: &str) -> Result<Self> {
        let genes = s
            .split_whitespace()
            .map(|token| {
                let (node, letter) = token.split_once(':').ok_or_else(|| {
                    Error::InvalidChromosome(format!("token `{token}` is not node:type"))
                })?;
                let node = node
                    .parse()
                    .map_err(|_| Error::InvalidChromosome(format!("bad node in `{token}`")))?;
                let mut chars = letter.chars();
                let ntype = match (chars.next(), chars.next()) {
                    (Some(c), None) => NodeType::from_letter(c),
                    _ => None,
                }
                .ok_or_else(|| Error::InvalidChromosome(format!("bad type in `{token}`")))?;
                Ok(Gene::new(node, ntype))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(genes)
    }
}

impl Serialize for Chromosome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Chromosome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A feasibility violation. Positions are gene indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Two drone genes with no combined gene between them.
    ConnectedDrones { first: usize, second: usize },
    /// A truck-only gene whose subtour holds no drone gene.
    DisconnectedTruckOnly { position: usize },
    /// The depot is the only combined node, so the sortie would launch and
    /// land at the same place.
    ClosedSortie { position: usize },
}

impl Violation {
    pub fn position(&self) -> usize {
        match *self {
            Violation::ConnectedDrones { second, .. } => second,
            Violation::DisconnectedTruckOnly { position } => position,
            Violation::ClosedSortie { position } => position,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConnectedDrones { first, second } => {
                write!(f, "connected drone genes at positions {first} and {second}")
            }
            Violation::DisconnectedTruckOnly { position } => {
                write!(f, "disconnected truck-only gene at position {position}")
            }
            Violation::ClosedSortie { position } => write!(
                f,
                "drone gene at position {position} would launch and land at the depot"
            ),
        }
    }
}

/// Positions of the combined genes followed by `n`, the closing return to
/// the depot. Consecutive entries bound one subtour.
fn combined_positions(genes: &[Gene]) -> Vec<usize> {
    genes
        .iter()
        .enumerate()
        .filter(|(_, g)| g.ntype == NodeType::Combined)
        .map(|(i, _)| i)
        .chain(std::iter::once(genes.len()))
        .collect()
}

pub fn validate_feasibility(chrom: &Chromosome) -> std::result::Result<(), Vec<Violation>> {
    let genes = chrom.genes();
    let n = genes.len();
    let mut violations = Vec::new();
    for bounds in combined_positions(genes).windows(2) {
        let (start, end) = (bounds[0], bounds[1]);
        let interior = (start + 1)..end;
        let drones: Vec<usize> = interior
            .clone()
            .filter(|&p| genes[p].ntype == NodeType::Drone)
            .collect();
        match drones.len() {
            0 => violations.extend(
                interior
                    .filter(|&p| genes[p].ntype == NodeType::TruckOnly)
                    .map(|position| Violation::DisconnectedTruckOnly { position }),
            ),
            1 if start == 0 && end == n => violations.push(Violation::ClosedSortie {
                position: drones[0],
            }),
            _ => violations.extend(drones.windows(2).map(|w| Violation::ConnectedDrones {
                first: w[0],
                second: w[1],
            })),
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        violations.sort_by_key(Violation::position);
        Err(violations)
    }
}

pub fn is_feasible(chrom: &Chromosome) -> bool {
    validate_feasibility(chrom).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sortie {
    pub launch: usize,
    pub drone_node: usize,
    pub rendezvous: usize,
}

/// Truck path between consecutive combined nodes plus the optional sortie
/// flown alongside it. Entries are node indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubtourPair {
    pub truck_path: Vec<usize>,
    pub sortie: Option<Sortie>,
}

pub fn decompose_subtours(chrom: &Chromosome) -> Result<Vec<SubtourPair>> {
    if let Err(violations) = validate_feasibility(chrom) {
        return Err(Error::Infeasible(violations[0]));
    }
    let genes = chrom.genes();
    let depot = genes[0].node;
    let node_at = |p: usize| {
        if p == genes.len() {
            depot
        } else {
            genes[p].node
        }
    };
    Ok(combined_positions(genes)
        .windows(2)
        .map(|w| {
            let (start, end) = (w[0], w[1]);
            let mut truck_path = vec![node_at(start)];
            let mut sortie = None;
            for gene in &genes[start + 1..end] {
                match gene.ntype {
                    NodeType::TruckOnly => truck_path.push(gene.node),
                    NodeType::Drone => {
                        sortie = Some(Sortie {
                            launch: node_at(start),
                            drone_node: gene.node,
                            rendezvous: node_at(end),
                        })
                    }
                    NodeType::Combined => unreachable!("combined genes bound subtours"),
                }
            }
            truck_path.push(node_at(end));
            SubtourPair { truck_path, sortie }
        })
        .collect())
}

pub fn subtour_time(pair: &SubtourPair, dm: &DistanceMatrix, sm: &SpeedModel) -> f64 {
    let truck: f64 = pair
        .truck_path
        .windows(2)
        .map(|leg| dm.get(leg[0], leg[1]) / sm.truck_speed)
        .sum();
    match pair.sortie {
        Some(s) => {
            let drone =
                (dm.get(s.launch, s.drone_node) + dm.get(s.drone_node, s.rendezvous)) / sm.alpha;
            truck.max(drone)
        }
        None => truck,
    }
}

/// Completion time of a tour, in the same units as distance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Makespan(pub f64);

impl Makespan {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Makespan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

/// Sum of subtour times over the cyclic tour. Works in a single pass without
/// materialising the subtour pairs; rejects infeasible chromosomes.
pub fn evaluate_makespan(
    chrom: &Chromosome,
    dm: &DistanceMatrix,
    sm: &SpeedModel,
) -> Result<Makespan> {
    let genes = chrom.genes();
    let n = genes.len();
    let depot = genes[0].node;
    let truck_speed = sm.truck_speed;

    let mut total = 0.0;
    let (mut launch, mut launch_pos, mut prev) = (depot, 0, depot);
    let mut truck = 0.0;
    let mut drone: Option<(usize, usize)> = None;
    let mut first_truck_only: Option<usize> = None;

    for p in 1..=n {
        let (node, ntype) = genes
            .get(p)
            .map_or((depot, NodeType::Combined), |g| (g.node, g.ntype));
        match ntype {
            NodeType::TruckOnly => {
                truck += dm.get(prev, node) / truck_speed;
                prev = node;
                first_truck_only.get_or_insert(p);
            }
            NodeType::Drone => {
                if let Some((first, _)) = drone {
                    return Err(Error::Infeasible(Violation::ConnectedDrones {
                        first,
                        second: p,
                    }));
                }
                drone = Some((p, node));
            }
            NodeType::Combined => {
                truck += dm.get(prev, node) / truck_speed;
                total += match drone {
                    Some((position, _)) if launch_pos == 0 && p == n => {
                        return Err(Error::Infeasible(Violation::ClosedSortie { position }));
                    }
                    Some((_, drone_node)) => {
                        let flight =
                            (dm.get(launch, drone_node) + dm.get(drone_node, node)) / sm.alpha;
                        truck.max(flight)
                    }
                    None => {
                        if let Some(position) = first_truck_only {
                            return Err(Error::Infeasible(Violation::DisconnectedTruckOnly {
                                position,
                            }));
                        }
                        truck
                    }
                };
                launch = node;
                launch_pos = p;
                prev = node;
                truck = 0.0;
                drone = None;
                first_truck_only = None;
            }
        }
    }
    Ok(Makespan(total))
}

/// Returns a feasible copy of `chrom`.
///
/// Scans genes left to right. A drone gene whose next drone gene is connected
/// gets the midpoint between them (floor of the mean position) promoted to
/// combined; if the two are adjacent the later one is promoted instead. A
/// truck-only gene whose subtour has no drone is promoted. The scan repeats
/// until nothing changes. Finally, if the depot is the only combined node and
/// a drone remains, the first truck-only gene (or, failing that, the drone
/// gene) is promoted so the sortie has two distinct endpoints. Types only ever
/// move to combined, so this terminates within `n` scans.
pub fn repair(chrom: &Chromosome) -> Chromosome {
    let mut out = chrom.clone();
    out.repair_in_place();
    out
}

fn repair_pass(genes: &mut [Gene]) -> bool {
    use NodeType::*;
    let n = genes.len();
    let mut changed = false;
    for i in 1..n {
        match genes[i].ntype {
            Drone => {
                let mut j = i + 1;
                while j < n && genes[j].ntype == TruckOnly {
                    j += 1;
                }
                if j < n && genes[j].ntype == Drone {
                    let promote = if j == i + 1 { j } else { (i + j) / 2 };
                    genes[promote].ntype = Combined;
                    changed = true;
                }
            }
            TruckOnly if is_disconnected(genes, i) => {
                genes[i].ntype = Combined;
                changed = true;
            }
            _ => {}
        }
    }
    if !genes[1..].iter().any(|g| g.ntype == Combined) {
        if let Some(p) = (1..n).find(|&p| genes[p].ntype == TruckOnly) {
            genes[p].ntype = Combined;
            changed = true;
        } else if let Some(p) = (1..n).find(|&p| genes[p].ntype == Drone) {
            genes[p].ntype = Combined;
            changed = true;
        }
    }
    changed
}

fn is_disconnected(genes: &[Gene], pos: usize) -> bool {
    let left = genes[..pos]
        .iter()
        .rev()
        .take_while(|g| g.ntype != NodeType::Combined);
    let right = genes[pos + 1..]
        .iter()
        .take_while(|g| g.ntype != NodeType::Combined);
    !left.chain(right).any(|g| g.ntype == NodeType::Drone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use NodeType::{Combined as C, Drone as D, TruckOnly as T};

    fn chrom(types: &[NodeType]) -> Chromosome {
        Chromosome::from_types(types)
    }

    fn square() -> DistanceMatrix {
        // depot(0,0), A(0,3), B(4,3), C(4,0)
        DistanceMatrix::from_points([(0.0, 0.0), (0.0, 3.0), (4.0, 3.0), (4.0, 0.0)])
    }

    #[test]
    fn decompose_all_combined() {
        let pairs = decompose_subtours(&chrom(&[C, C, C])).unwrap();
        assert_eq!(pairs.len(), 3);
        assert!(pairs
            .iter()
            .all(|p| p.truck_path.len() == 2 && p.sortie.is_none()));
        assert_eq!(pairs[2].truck_path, vec![2, 0]);
    }

    #[test]
    fn decompose_with_sorties() {
        let pairs = decompose_subtours(&chrom(&[C, D, C])).unwrap();
        assert_eq!(
            pairs,
            vec![
                SubtourPair {
                    truck_path: vec![0, 2],
                    sortie: Some(Sortie {
                        launch: 0,
                        drone_node: 1,
                        rendezvous: 2
                    }),
                },
                SubtourPair {
                    truck_path: vec![2, 0],
                    sortie: None
                },
            ]
        );
        let pairs = decompose_subtours(&chrom(&[C, T, D, C])).unwrap();
        assert_eq!(pairs[0].truck_path, vec![0, 1, 3]);
        assert_eq!(
            pairs[0].sortie,
            Some(Sortie {
                launch: 0,
                drone_node: 2,
                rendezvous: 3
            })
        );
        assert_eq!(pairs[1].truck_path, vec![3, 0]);
    }

    #[test]
    fn decompose_rejects_infeasible() {
        let err = decompose_subtours(&chrom(&[C, T, C])).unwrap_err();
        assert!(matches!(
            err,
            Error::Infeasible(Violation::DisconnectedTruckOnly { position: 1 })
        ));
    }

    #[test]
    fn subtour_time_cases() {
        let sm = SpeedModel::default();
        // truck 0->2 of length 5; drone 0->1->2 = (3 + 4) / 2.
        let pair = SubtourPair {
            truck_path: vec![0, 2],
            sortie: Some(Sortie {
                launch: 0,
                drone_node: 1,
                rendezvous: 2,
            }),
        };
        assert_eq!(subtour_time(&pair, &square(), &sm), 5.0);

        let pair = SubtourPair {
            truck_path: vec![0, 1, 2],
            sortie: None,
        };
        assert_eq!(subtour_time(&pair, &square(), &sm), 7.0);

        // truck leg 2, drone legs of 8 each at alpha 2.
        let dm = DistanceMatrix::from_points([(0.0, 0.0), (1.0, 63f64.sqrt()), (2.0, 0.0)]);
        let pair = SubtourPair {
            truck_path: vec![0, 2],
            sortie: Some(Sortie {
                launch: 0,
                drone_node: 1,
                rendezvous: 2,
            }),
        };
        assert!((subtour_time(&pair, &dm, &sm) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn makespan_examples() {
        let sm = SpeedModel::default();
        let dm = square();
        let m = evaluate_makespan(&chrom(&[C, D, C, C]), &dm, &sm).unwrap();
        assert_eq!(m.value(), 12.0);
        let m = evaluate_makespan(&chrom(&[C, C, C, C]), &dm, &sm).unwrap();
        assert_eq!(m.value(), 14.0);

        let dm = DistanceMatrix::from_points([(0.0, 0.0), (7.0, 0.0)]);
        let m = evaluate_makespan(&chrom(&[C, C]), &dm, &sm).unwrap();
        assert_eq!(m.value(), 14.0);
    }

    #[test]
    fn makespan_matches_decomposition() {
        let sm = SpeedModel::new(1.5);
        let dm = DistanceMatrix::from_points([
            (0.0, 0.0),
            (5.0, 1.0),
            (9.0, 4.0),
            (3.0, 8.0),
            (-2.0, 6.0),
            (-4.0, 1.0),
        ]);
        let c = chrom(&[C, T, D, C, D, C]);
        let direct = evaluate_makespan(&c, &dm, &sm).unwrap().value();
        let summed: f64 = decompose_subtours(&c)
            .unwrap()
            .iter()
            .map(|p| subtour_time(p, &dm, &sm))
            .sum();
        assert!((direct - summed).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_each_violation() {
        let sm = SpeedModel::default();
        let dm = square();
        for types in [[C, D, D, C], [C, T, C, C], [C, T, D, T]] {
            assert!(matches!(
                evaluate_makespan(&chrom(&types), &dm, &sm),
                Err(Error::Infeasible(_))
            ));
        }
        let dm = DistanceMatrix::from_points([(0.0, 0.0), (7.0, 0.0)]);
        assert!(evaluate_makespan(&chrom(&[C, D]), &dm, &sm).is_err());
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(
            validate_feasibility(&chrom(&[C, D, T, D, C])),
            Err(vec![Violation::ConnectedDrones {
                first: 1,
                second: 3
            }])
        );
        assert_eq!(
            validate_feasibility(&chrom(&[C, T, C])),
            Err(vec![Violation::DisconnectedTruckOnly { position: 1 }])
        );
        assert_eq!(validate_feasibility(&chrom(&[C, T, D, C])), Ok(()));
        assert_eq!(
            validate_feasibility(&chrom(&[C, T, D])),
            Err(vec![Violation::ClosedSortie { position: 2 }])
        );
        // Drone genes either side of the depot are separated by it.
        assert_eq!(validate_feasibility(&chrom(&[C, D, C, D])), Ok(()));
    }

    #[test]
    fn repair_examples() {
        assert_eq!(repair(&chrom(&[C, T, C])), chrom(&[C, C, C]));
        assert_eq!(repair(&chrom(&[C, D, T, D, C])), chrom(&[C, D, C, D, C]));
        assert_eq!(repair(&chrom(&[C, D, D, C])), chrom(&[C, D, C, C]));
        assert_eq!(
            repair(&chrom(&[C, D, T, T, T, T, D])),
            chrom(&[C, D, T, C, T, T, D])
        );
        assert_eq!(repair(&chrom(&[C, D])), chrom(&[C, C]));
        assert_eq!(repair(&chrom(&[C, D, T, T])), chrom(&[C, D, C, C]));
    }

    #[test]
    fn repair_leaves_feasible_untouched() {
        let c = chrom(&[C, T, D, C, D, C, C]);
        assert!(is_feasible(&c));
        assert_eq!(repair(&c), c);
    }

    #[test]
    fn token_roundtrip() {
        let c: Chromosome = "0:C 3:D 1:T 2:C".parse().unwrap();
        assert_eq!(c.to_string(), "0:C 3:D 1:T 2:C");
        assert_eq!(c.tour(), vec![0, 3, 1, 2]);
        assert!("0:C 1:X".parse::<Chromosome>().is_err());
        assert!("1:C 0:C".parse::<Chromosome>().is_err());
        assert!("0:C 1:C 1:C".parse::<Chromosome>().is_err());
        assert!("0:D 1:C".parse::<Chromosome>().is_err());
    }
}
