//! Deterministic generators for the two case-study graphs: a Roman imperial
//! command hierarchy and a synthetic family tree with optional pedigree
//! collapse.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Aggregation, DecayFunction, RelationshipConfig};
use crate::error::{Error, Result};
use crate::graph::{build_graph, Edge, KnowledgeGraph, Node, PropertyValue, RelationshipType};

pub const COMMANDS: &str = "COMMANDS";
pub const RELATIVE_OF: &str = "RELATIVE-OF";
pub const EMPEROR: &str = "Emperor";

const PREFECTURES: [&str; 4] = [
    "Prefecture of the East",
    "Prefecture of Illyricum",
    "Prefecture of Italy",
    "Prefecture of the Gauls",
];

// Placed so round-robin assignment puts both under Illyricum.
const NAMED_DIOCESES: [(usize, &str); 2] = [(1, "Diocese of Macedonia"), (5, "Diocese of Dacia")];

const NAMED_PROVINCES: [&str; 5] = ["Mauretania", "Numidia", "Africa", "Palestine", "Caria"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RomanEmpireParams {
    pub prefecture_count: usize,
    pub diocese_count: usize,
    pub province_count: usize,
}

impl Default for RomanEmpireParams {
    fn default() -> Self {
        RomanEmpireParams {
            prefecture_count: 4,
            diocese_count: 12,
            province_count: 31,
        }
    }
}

/// Emperor -> prefectures -> dioceses -> provinces, with diocese `i` under
/// prefecture `i mod P` and province `j` under diocese `j mod D`.
pub fn gen_roman_empire(p: &RomanEmpireParams) -> Result<KnowledgeGraph> {
    if p.prefecture_count == 0 || p.diocese_count == 0 || p.province_count == 0 {
        return Err(Error::InvalidParams("roman empire counts must be >= 1".into()));
    }
    let prefectures: Vec<String> = (0..p.prefecture_count)
        .map(|i| PREFECTURES.get(i).map_or_else(|| format!("Prefecture {}", i + 1), |s| s.to_string()))
        .collect();
    let dioceses: Vec<String> = (0..p.diocese_count)
        .map(|i| {
            NAMED_DIOCESES
                .iter()
                .find(|(slot, _)| *slot == i)
                .map_or_else(|| format!("Diocese {}", i + 1), |(_, name)| name.to_string())
        })
        .collect();
    let provinces: Vec<String> = (0..p.province_count)
        .map(|i| NAMED_PROVINCES.get(i).map_or_else(|| format!("Province {}", i + 1), |s| s.to_string()))
        .collect();

    let level = |label: &str, id: &str, depth: i64| Node::new(id, label).with_property("level", PropertyValue::Int(depth));
    let mut nodes = vec![level("Emperor", EMPEROR, 0)];
    nodes.extend(prefectures.iter().map(|id| level("Prefecture", id, 1)));
    nodes.extend(dioceses.iter().map(|id| level("Diocese", id, 2)));
    nodes.extend(provinces.iter().map(|id| level("Province", id, 3)));

    let mut edges: Vec<Edge> = prefectures.iter().map(|pf| Edge::direct(EMPEROR, pf.as_str(), COMMANDS)).collect();
    edges.extend(
        dioceses
            .iter()
            .enumerate()
            .map(|(i, d)| Edge::direct(prefectures[i % prefectures.len()].as_str(), d.as_str(), COMMANDS)),
    );
    edges.extend(
        provinces
            .iter()
            .enumerate()
            .map(|(j, pv)| Edge::direct(dioceses[j % dioceses.len()].as_str(), pv.as_str(), COMMANDS)),
    );
    build_graph(nodes, edges, vec![RelationshipType::new(COMMANDS, true)])
}

/// Completion settings shipped with the generated hierarchy.
pub fn roman_empire_config() -> RelationshipConfig {
    RelationshipConfig::new(COMMANDS, DecayFunction::halving(), Aggregation::Sum, 0.0, 7)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyTreeParams {
    pub generations: usize,
    pub couples_per_generation: usize,
    pub children_per_couple: usize,
    /// Probability that a couple is formed by two relatives of the same
    /// generation instead of one relative and an outside spouse.
    pub intermarriage_rate: f64,
    pub seed: u64,
}

impl Default for FamilyTreeParams {
    fn default() -> Self {
        FamilyTreeParams {
            generations: 8,
            couples_per_generation: 4,
            children_per_couple: 2,
            intermarriage_rate: 0.0,
            seed: 0,
        }
    }
}

impl FamilyTreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.generations < 2 {
            return Err(Error::InvalidParams(format!("generations must be >= 2, got {}", self.generations)));
        }
        if self.couples_per_generation == 0 || self.children_per_couple == 0 {
            return Err(Error::InvalidParams("couples and children per couple must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.intermarriage_rate) {
            return Err(Error::InvalidParams(format!(
                "intermarriage rate {} not in [0, 1)",
                self.intermarriage_rate
            )));
        }
        Ok(())
    }
}

/// Parent -> child RELATIVE-OF arcs over `generations` generations.
///
/// Spouses marrying in from outside the family are not modelled, so a
/// couple contributes one parent arc per child unless both partners are
/// relatives, which is what creates multi-path descent.
pub fn gen_family_tree(p: &FamilyTreeParams) -> Result<KnowledgeGraph> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let person = |generation: usize, index: usize| {
        Node::new(format!("P{generation}.{index}"), "Person").with_property("generation", PropertyValue::Int(generation as i64))
    };

    let mut nodes: Vec<Node> = (0..p.couples_per_generation).map(|i| person(0, i)).collect();
    let mut edges = Vec::new();
    let mut current: Vec<usize> = (0..nodes.len()).collect();

    for generation in 1..p.generations {
        let couples: Vec<Vec<usize>> = if generation == 1 {
            current.iter().map(|&f| vec![f]).collect()
        } else {
            shuffle(&mut current, &mut rng);
            let mut couples = Vec::new();
            let mut pool = current.iter().copied().peekable();
            while couples.len() < p.couples_per_generation {
                let Some(a) = pool.next() else { break };
                let mut couple = vec![a];
                if p.intermarriage_rate > 0.0 && pool.peek().is_some() && rng.gen_bool(p.intermarriage_rate) {
                    couple.extend(pool.next());
                }
                couples.push(couple);
            }
            couples
        };

        let mut next = Vec::with_capacity(couples.len() * p.children_per_couple);
        for couple in &couples {
            for _ in 0..p.children_per_couple {
                let child = nodes.len();
                nodes.push(person(generation, next.len()));
                for &parent in couple {
                    edges.push(Edge::direct(nodes[parent].id.clone(), nodes[child].id.clone(), RELATIVE_OF));
                }
                next.push(child);
            }
        }
        current = next;
    }
    build_graph(nodes, edges, vec![RelationshipType::new(RELATIVE_OF, true)])
}

// Fisher-Yates over u32 draws, independent of the platform's usize width.
fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i as u32) as usize;
        items.swap(i, j);
    }
}

/// Kinship completion settings: halving decay, summed, `(1/2)^7` cut-off.
pub fn family_tree_config() -> RelationshipConfig {
    RelationshipConfig::kinship(RELATIVE_OF)
}
