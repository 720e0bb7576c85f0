//! Site graph ingestion and the live fact state.

mod events;
mod graph;
mod ingest;

pub use events::{apply_event, apply_event_in_place, parse_events, replay, EventOp, EventRecord};
pub use graph::{term_name, SiteGraph, SiteNode};
pub use ingest::{
    ingest_site, read_objects, read_regions, read_roads, IngestError, IngestWarning, Ingestion,
    ObjectRow, RegionRow, RoadRow,
};
