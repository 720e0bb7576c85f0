//! Map tables to site facts.
//!
//! Every road endpoint and object position is snapped to the nearest region
//! centroid (Euclidean distance, ties to the lexicographically smaller
//! region name).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::Deserialize;
use thiserror::Error;

use super::graph::{SiteGraph, SiteNode};
use crate::kb::{Atom, Program, Term};

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RegionRow {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RoadRow {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ObjectRow {
    pub id: String,
    pub kind: String,
    pub subtype: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("regions table is empty")]
    EmptyRegionsTable,
    #[error("{table} row {row}: non-finite coordinate")]
    NonFiniteCoordinate { table: &'static str, row: usize },
    #[error("objects row {row}: unknown object kind `{kind}` (expected crane or truck)")]
    UnknownObjectKind { row: usize, kind: String },
    #[error("regions row {row}: duplicate region name `{name}`")]
    DuplicateRegion { row: usize, name: String },
    #[error("objects row {row}: duplicate object id `{id}`")]
    DuplicateObject { row: usize, id: String },
    #[error("{table}: {source}")]
    Csv {
        table: &'static str,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    /// Both endpoints of a road snapped to the same region.
    SelfLoopDropped { row: usize, region: String },
    /// A road duplicated an earlier one after snapping.
    DuplicateRoad { row: usize, a: String, b: String },
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestWarning::SelfLoopDropped { row, region } => write!(
                f,
                "roads row {row}: both endpoints snap to `{region}`; road dropped"
            ),
            IngestWarning::DuplicateRoad { row, a, b } => write!(
                f,
                "roads row {row}: duplicate road between `{a}` and `{b}` collapsed"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingestion {
    pub program: Program,
    pub graph: SiteGraph,
    pub warnings: Vec<IngestWarning>,
}

fn read_table<T: for<'de> Deserialize<'de>>(
    table: &'static str,
    input: impl Read,
) -> Result<Vec<T>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|source| IngestError::Csv { table, source })
}

/// Reads `name,x,y` rows; the header row is required.
pub fn read_regions(input: impl Read) -> Result<Vec<RegionRow>, IngestError> {
    read_table("regions", input)
}

/// Reads `x1,y1,x2,y2` rows.
pub fn read_roads(input: impl Read) -> Result<Vec<RoadRow>, IngestError> {
    read_table("roads", input)
}

/// Reads `id,kind,subtype,x,y` rows.
pub fn read_objects(input: impl Read) -> Result<Vec<ObjectRow>, IngestError> {
    read_table("objects", input)
}

struct Snapper<'a> {
    regions: &'a [RegionRow],
}

impl Snapper<'_> {
    fn nearest(&self, x: f64, y: f64) -> &str {
        let mut best: Option<(f64, &str)> = None;
        for r in self.regions {
            let d = (r.x - x).powi(2) + (r.y - y).powi(2);
            best = match best {
                Some((bd, bn)) if bd < d || (bd == d && bn <= r.name.as_str()) => Some((bd, bn)),
                _ => Some((d, &r.name)),
            };
        }
        best.expect("regions table is non-empty").1
    }
}

fn finite(table: &'static str, row: usize, values: &[f64]) -> Result<(), IngestError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(IngestError::NonFiniteCoordinate { table, row })
    }
}

fn constant(s: &str) -> Term {
    Term::constant(s)
}

/// Builds the site program: `node/1` per region, `link/2` per road,
/// `crane/2` or `truck/2` plus `at/2` per object. Facts are grouped by
/// predicate and sorted, so any row order yields the same program.
///
/// Rows are numbered from 1, header excluded.
pub fn ingest_site(
    regions: &[RegionRow],
    roads: &[RoadRow],
    objects: &[ObjectRow],
) -> Result<Ingestion, IngestError> {
    if regions.is_empty() {
        return Err(IngestError::EmptyRegionsTable);
    }
    let mut names = BTreeSet::new();
    for (i, r) in regions.iter().enumerate() {
        finite("regions", i + 1, &[r.x, r.y])?;
        if !names.insert(r.name.as_str()) {
            return Err(IngestError::DuplicateRegion {
                row: i + 1,
                name: r.name.clone(),
            });
        }
    }
    let snap = Snapper { regions };

    // Unordered pair -> kept orientation. Among duplicates the
    // lexicographically smallest orientation wins.
    let mut links: BTreeMap<(String, String), (String, String)> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (i, road) in roads.iter().enumerate() {
        let row = i + 1;
        finite("roads", row, &[road.x1, road.y1, road.x2, road.y2])?;
        let a = snap.nearest(road.x1, road.y1).to_string();
        let b = snap.nearest(road.x2, road.y2).to_string();
        if a == b {
            warnings.push(IngestWarning::SelfLoopDropped { row, region: a });
            continue;
        }
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        match links.get_mut(&key) {
            Some(kept) => {
                warnings.push(IngestWarning::DuplicateRoad { row, a: key.0.clone(), b: key.1.clone() });
                if (a.as_str(), b.as_str()) < (kept.0.as_str(), kept.1.as_str()) {
                    *kept = (a, b);
                }
            }
            None => {
                links.insert(key, (a, b));
            }
        }
    }

    let mut resources: BTreeMap<&str, (&str, &str, &str)> = BTreeMap::new();
    for (i, o) in objects.iter().enumerate() {
        let row = i + 1;
        finite("objects", row, &[o.x, o.y])?;
        if o.kind != "crane" && o.kind != "truck" {
            return Err(IngestError::UnknownObjectKind {
                row,
                kind: o.kind.clone(),
            });
        }
        let at = snap.nearest(o.x, o.y);
        if resources.insert(&o.id, (&o.kind, &o.subtype, at)).is_some() {
            return Err(IngestError::DuplicateObject {
                row,
                id: o.id.clone(),
            });
        }
    }

    let mut facts = Vec::new();
    for name in &names {
        facts.push(Atom::new("node", vec![constant(name)]));
    }
    let mut oriented: Vec<&(String, String)> = links.values().collect();
    oriented.sort();
    for (a, b) in &oriented {
        facts.push(Atom::new("link", vec![constant(a), constant(b)]));
    }
    for kind in ["crane", "truck"] {
        for (id, (k, subtype, _)) in &resources {
            if *k == kind {
                facts.push(Atom::new(kind, vec![constant(id), constant(subtype)]));
            }
        }
    }
    for (id, (_, _, at)) in &resources {
        facts.push(Atom::new("at", vec![constant(id), constant(at)]));
    }

    let mut nodes: Vec<SiteNode> = regions
        .iter()
        .map(|r| SiteNode {
            name: r.name.clone(),
            x: r.x,
            y: r.y,
        })
        .collect();
    nodes.sort_by(|p, q| p.name.cmp(&q.name));
    let graph = SiteGraph {
        nodes,
        edges: oriented.into_iter().cloned().collect(),
    };
    Ok(Ingestion {
        program: Program {
            rules: Vec::new(),
            facts,
        },
        graph,
        warnings,
    })
}
