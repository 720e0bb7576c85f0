//! Rule-based planning engine for post-earthquake rescue operations.
//!
//! The crate is layered bottom-up:
//!
//! * [`kb`] parses and prints the logic-program language used by every
//!   fact, rule, action, event and goal file.
//! * [`inference`] computes derived predicates under stratified negation.
//! * [`world`] turns coordinate tables into a site graph and applies
//!   observatory event reports to the live fact set.
//! * [`action`] holds STRIPS action schemas, grounding and plan validation.
//! * [`planner`] runs breadth-first forward search and replanning.
//! * [`runtime`] ties these together into an operator session.

pub mod action;
pub mod facts;
pub mod inference;
pub mod kb;
pub mod planner;
pub mod runtime;
pub mod world;
