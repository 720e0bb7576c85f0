use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::facts::FactSet;
use crate::kb::Term;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteNode {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

/// Abstract site graph. Edges are undirected; each keeps the orientation
/// of the `link/2` fact it came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SiteGraph {
    pub nodes: Vec<SiteNode>,
    pub edges: Vec<(String, String)>,
}

/// Plain name of a constant term, as used for node names.
pub fn term_name(t: &Term) -> String {
    match t {
        Term::Const(s) => s.to_string(),
        other => other.to_string(),
    }
}

impl SiteGraph {
    /// Rebuilds the graph from `node/1` and `link/2` facts. Coordinates come
    /// from `coords` when known; other nodes are placed on a unit circle in
    /// name order.
    pub fn from_facts(facts: &FactSet, coords: &BTreeMap<String, (f64, f64)>) -> Self {
        let names: BTreeSet<String> = facts
            .iter()
            .filter(|a| &*a.predicate == "node" && a.args.len() == 1)
            .map(|a| term_name(&a.args[0]))
            .collect();
        let n = names.len().max(1) as f64;
        let nodes = names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let (x, y) = coords.get(name).copied().unwrap_or_else(|| {
                    let angle = std::f64::consts::TAU * i as f64 / n;
                    (angle.cos(), angle.sin())
                });
                SiteNode {
                    name: name.clone(),
                    x,
                    y,
                }
            })
            .collect();

        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        let mut links: Vec<(String, String)> = facts
            .iter()
            .filter(|a| &*a.predicate == "link" && a.args.len() == 2)
            .map(|a| (term_name(&a.args[0]), term_name(&a.args[1])))
            .filter(|(a, b)| a != b)
            .collect();
        links.sort();
        for (a, b) in links {
            let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if seen.insert(key) {
                edges.push((a, b));
            }
        }
        SiteGraph { nodes, edges }
    }

    /// Names of binary base facts (other than `link`) lying on the edge
    /// between `a` and `b` in either orientation, sorted and deduplicated.
    pub fn overlays(facts: &FactSet, a: &str, b: &str) -> Vec<String> {
        let found: BTreeSet<String> = facts
            .iter()
            .filter(|f| f.args.len() == 2 && &*f.predicate != "link")
            .filter(|f| {
                let (x, y) = (term_name(&f.args[0]), term_name(&f.args[1]));
                (x == a && y == b) || (x == b && y == a)
            })
            .map(|f| f.predicate.to_string())
            .collect();
        found.into_iter().collect()
    }
}
