use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use petgraph::Direction;

use super::InferenceError;
use crate::kb::{PredKey, Rule};

/// Stratum per predicate. Every predicate mentioned by a rule has an entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stratification {
    levels: BTreeMap<PredKey, usize>,
}

impl Stratification {
    pub fn level(&self, pred: &PredKey) -> Option<usize> {
        self.levels.get(pred).copied()
    }

    pub fn levels(&self) -> &BTreeMap<PredKey, usize> {
        &self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Number of strata (highest level plus one).
    pub fn height(&self) -> usize {
        self.levels.values().max().map_or(0, |m| m + 1)
    }

    /// Checks the stratification condition against `rules`.
    pub fn is_valid_for(&self, rules: &[Rule]) -> bool {
        rules.iter().all(|r| {
            let Some(h) = self.level(&r.head.key()) else {
                return false;
            };
            r.body.iter().all(|l| match self.level(&l.atom.key()) {
                Some(b) if l.positive => h >= b,
                Some(b) => h > b,
                None => false,
            })
        })
    }
}

/// A dependency cycle through at least one negative edge, written as
/// `p/1 -> not q/1 -> p/1` (each arrow points from a body predicate to the
/// head it feeds).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCycle {
    /// `(predicate, edge to the next predicate is negative)`; the last entry
    /// repeats the first predicate.
    pub steps: Vec<(PredKey, bool)>,
}

impl fmt::Display for NegativeCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut negate_next = false;
        for (i, (p, neg)) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            if negate_next {
                f.write_str("not ")?;
            }
            write!(f, "{p}")?;
            negate_next = *neg;
        }
        Ok(())
    }
}

/// Assigns each predicate the lowest stratum permitted by the rules.
pub fn stratify(rules: &[Rule]) -> Result<Stratification, InferenceError> {
    let mut graph: DiGraph<PredKey, bool> = DiGraph::new();
    let mut index: HashMap<PredKey, NodeIndex> = HashMap::new();
    let mut node = |g: &mut DiGraph<PredKey, bool>, k: PredKey| {
        *index.entry(k.clone()).or_insert_with(|| g.add_node(k))
    };
    // Deduplicate edges; a negative edge dominates a positive one.
    let mut edges: BTreeMap<(PredKey, PredKey), bool> = BTreeMap::new();
    for rule in rules {
        let head = rule.head.key();
        node(&mut graph, head.clone());
        for lit in &rule.body {
            let neg = edges.entry((lit.atom.key(), head.clone())).or_insert(false);
            *neg |= !lit.positive;
        }
    }
    for ((from, to), neg) in &edges {
        let a = node(&mut graph, from.clone());
        let b = node(&mut graph, to.clone());
        graph.add_edge(a, b, *neg);
    }

    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (ci, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[n.index()] = ci;
        }
    }

    for scc in &sccs {
        for &n in scc {
            for e in graph.edges_directed(n, Direction::Outgoing) {
                if *e.weight() && component[e.target().index()] == component[n.index()] {
                    let cycle = close_cycle(&graph, &component, n, e.target());
                    return Err(InferenceError::NotStratifiable { cycle });
                }
            }
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let mut level = vec![0usize; graph.node_count()];
    for scc in sccs.iter().rev() {
        let mut lvl = 0;
        for &n in scc {
            for e in graph.edges_directed(n, Direction::Incoming) {
                let src = e.source();
                if component[src.index()] != component[n.index()] {
                    lvl = lvl.max(level[src.index()] + usize::from(*e.weight()));
                }
            }
        }
        for &n in scc {
            level[n.index()] = lvl;
        }
    }

    let levels = graph
        .node_indices()
        .map(|n| (graph[n].clone(), level[n.index()]))
        .collect();
    Ok(Stratification { levels })
}

/// Builds the cycle `from -not-> to ~> from` inside one strongly connected
/// component.
fn close_cycle(
    graph: &DiGraph<PredKey, bool>,
    component: &[usize],
    from: NodeIndex,
    to: NodeIndex,
) -> NegativeCycle {
    let scc = component[from.index()];
    let mut prev: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut seen = BTreeSet::from([to]);
    let mut queue = VecDeque::from([to]);
    while let Some(n) = queue.pop_front() {
        if n == from {
            break;
        }
        for t in graph.neighbors_directed(n, Direction::Outgoing) {
            if component[t.index()] == scc && seen.insert(t) {
                prev.insert(t, n);
                queue.push_back(t);
            }
        }
    }
    let mut back = vec![from];
    let mut cur = from;
    while cur != to {
        cur = prev[&cur];
        back.push(cur);
    }
    // from, to, ..., from
    let mut nodes = vec![from];
    nodes.extend(back.into_iter().rev());
    let steps = nodes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let neg = nodes
                .get(i + 1)
                .is_some_and(|&next| graph.edges_connecting(n, next).any(|e| *e.weight()));
            (graph[n].clone(), neg)
        })
        .collect();
    NegativeCycle { steps }
}
