mod support;

use std::collections::BTreeSet;
use std::fs::File;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rescue_core::kb::{parse_program, Atom};
use rescue_core::world::{ingest_site, read_objects, read_regions, read_roads, ObjectRow, RegionRow, RoadRow};
use support::{atom, repo_root, tehran_dir};

fn tables() -> (Vec<RegionRow>, Vec<RoadRow>, Vec<ObjectRow>) {
    let map = tehran_dir().join("map");
    (
        read_regions(File::open(map.join("regions.csv")).unwrap()).unwrap(),
        read_roads(File::open(map.join("roads.csv")).unwrap()).unwrap(),
        read_objects(File::open(map.join("objects.csv")).unwrap()).unwrap(),
    )
}

fn site_graph_listing() -> BTreeSet<Atom> {
    let text = std::fs::read_to_string(repo_root().join("scenarios/figures/fig5.facts")).unwrap();
    parse_program(&text).unwrap().facts.into_iter().collect()
}

#[test]
fn tehran_tables_give_the_site_graph() {
    let (regions, roads, objects) = tables();
    let out = ingest_site(&regions, &roads, &objects).unwrap();
    assert!(out.warnings.is_empty());
    let (positions, rest): (Vec<Atom>, Vec<Atom>) = out.program.facts.iter().cloned().partition(|a| &*a.predicate == "at");
    assert_eq!(rest.into_iter().collect::<BTreeSet<_>>(), site_graph_listing());
    assert_eq!(
        positions,
        [
            atom("at", &["crane_1", "Horr Sq."]),
            atom("at", &["crane_2", "Imam Khomeini RIP Sq."]),
            atom("at", &["truck_1", "Horr Sq."]),
        ]
    );
    assert_eq!(out.graph.nodes.len(), 4);
    assert_eq!(out.graph.edges.len(), 4);
}

#[test]
fn row_order_does_not_matter() {
    let (regions, roads, objects) = tables();
    let reference = ingest_site(&regions, &roads, &objects).unwrap();
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut r, mut d, mut o) = (regions.clone(), roads.clone(), objects.clone());
        r.shuffle(&mut rng);
        d.shuffle(&mut rng);
        o.shuffle(&mut rng);
        let out = ingest_site(&r, &d, &o).unwrap();
        assert_eq!(out.program, reference.program, "seed {seed}");
        assert_eq!(out.graph, reference.graph, "seed {seed}");
    }
}

#[test]
fn ingested_site_matches_shipped_scenario() {
    let (regions, roads, objects) = tables();
    let out = ingest_site(&regions, &roads, &objects).unwrap();
    let shipped: BTreeSet<Atom> = parse_program(&std::fs::read_to_string(tehran_dir().join("site.facts")).unwrap())
        .unwrap()
        .facts
        .into_iter()
        .collect();
    let ingested: BTreeSet<Atom> = out.program.facts.into_iter().collect();
    assert!(ingested.is_subset(&shipped));
    // The rest are the reported events.
    let events: BTreeSet<&str> = shipped.difference(&ingested).map(|a| &*a.predicate).collect();
    assert_eq!(events, BTreeSet::from(["fire", "fireman_operation", "police_block"]));
}
