//! Observatory event reports.

use std::fmt;

use crate::facts::FactSet;
use crate::kb::{parse_clauses, Atom, Location, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventOp {
    Assert,
    Retract,
}

impl EventOp {
    pub fn as_str(self) -> &'static str {
        match self {
            EventOp::Assert => "assert",
            EventOp::Retract => "retract",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "assert" => Some(EventOp::Assert),
            "retract" => Some(EventOp::Retract),
            _ => None,
        }
    }
}

impl fmt::Display for EventOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A timestamped assert or retract of one ground fact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventRecord {
    /// Minutes since scenario start.
    pub timestamp: i64,
    pub op: EventOp,
    pub fact: Atom,
}

impl EventRecord {
    pub fn assert(timestamp: i64, fact: Atom) -> Self {
        Self {
            timestamp,
            op: EventOp::Assert,
            fact,
        }
    }

    pub fn retract(timestamp: i64, fact: Atom) -> Self {
        Self {
            timestamp,
            op: EventOp::Retract,
            fact,
        }
    }
}

/// Prints as an `event(T, op, Fact).` clause.
impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event({}, {}, {}).", self.timestamp, self.op, self.fact)
    }
}

/// Parses `event(T, assert|retract, Fact).` clauses in file order.
pub fn parse_events(text: &str) -> Result<Vec<EventRecord>, ParseError> {
    let mut out = Vec::new();
    for clause in parse_clauses(text)? {
        let bad = |at: Location, msg: &str| ParseError::syntax(at, msg.to_string());
        if clause.body.is_some() {
            return Err(bad(clause.at, "event clauses cannot have a body"));
        }
        let Some(("event", args)) = clause.head.as_compound() else {
            return Err(bad(clause.at, "expected event(T, assert|retract, Fact)"));
        };
        let [t, op, fact] = args else {
            return Err(bad(clause.at, "event/3 expects a timestamp, an operation and a fact"));
        };
        let timestamp = match t.to_term() {
            Ok(crate::kb::Term::Int(n)) if n >= 0 => n,
            _ => return Err(bad(t.at, "event timestamp must be a non-negative integer")),
        };
        let op = match op.as_compound() {
            Some((name, [])) => EventOp::parse(name),
            _ => None,
        }
        .ok_or_else(|| bad(op.at, "event operation must be `assert` or `retract`"))?;
        let fact_atom = fact.to_atom()?;
        if !fact_atom.is_ground() {
            return Err(bad(fact.at, "event fact must be ground"));
        }
        out.push(EventRecord {
            timestamp,
            op,
            fact: fact_atom,
        });
    }
    Ok(out)
}

/// Returns the updated state and whether it changed. Asserting a present
/// fact or retracting an absent one leaves the state as is.
pub fn apply_event(state: &FactSet, e: &EventRecord) -> (FactSet, bool) {
    let mut next = state.clone();
    let changed = apply_event_in_place(&mut next, e);
    (next, changed)
}

pub fn apply_event_in_place(state: &mut FactSet, e: &EventRecord) -> bool {
    match e.op {
        EventOp::Assert => state.insert(e.fact.clone()),
        EventOp::Retract => state.remove(&e.fact),
    }
}

/// Folds a log of events over `initial`, in log order.
pub fn replay<'a>(initial: &FactSet, log: impl IntoIterator<Item = &'a EventRecord>) -> FactSet {
    let mut state = initial.clone();
    for e in log {
        apply_event_in_place(&mut state, e);
    }
    state
}
