//! STRIPS action schemas: parsing, grounding, effects and plan validation.
//!
//! Action files use the clause syntax of [`crate::kb`] with nested terms:
//!
//! ```text
//! fluent(at/2).
//! action(move_crane(A,F,T), [crane(A,_)],
//!        [at(A,F), passable_fire(F,T)],
//!        [del(at(A,F)), add(at(A,T))]).
//! ```
//!
//! Rules may appear alongside the schemas; they are helper rules of the
//! domain and are evaluated together with the scenario rules.

mod ground;
mod parse;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use ground::{apply_action, ground_applicable, ground_in};
pub use parse::{parse_actions, parse_actions_with_rules};
pub use validate::{validate_plan, validate_with, InvalidReason, Validation};

use crate::kb::{Atom, Literal, Location, ParseError, PredKey, Rule, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Effect {
    Del(Atom),
    Add(Atom),
}

impl Effect {
    pub fn atom(&self) -> &Atom {
        match self {
            Effect::Del(a) | Effect::Add(a) => a,
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Del(a) => write!(f, "del({a})"),
            Effect::Add(a) => write!(f, "add({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    /// Action name applied to its parameter variables.
    pub head: Atom,
    pub agent_guard: Vec<Literal>,
    pub preconditions: Vec<Literal>,
    pub effects: Vec<Effect>,
    pub at: Location,
}

impl ActionSchema {
    pub fn name(&self) -> &Symbol {
        &self.head.predicate
    }

    pub fn params(&self) -> impl Iterator<Item = &Symbol> {
        self.head.variables()
    }

    /// Guard followed by preconditions, the order they are checked in.
    pub fn conditions(&self) -> Vec<Literal> {
        self.agent_guard
            .iter()
            .chain(&self.preconditions)
            .cloned()
            .collect()
    }

    /// True when grounding has to enumerate constants: some parameter is not
    /// bound by a positive condition, or a negative condition mentions a
    /// parameter before any positive condition binds it.
    pub fn needs_active_domain(&self) -> bool {
        let mut bound: BTreeSet<&Symbol> = BTreeSet::new();
        for lit in self.agent_guard.iter().chain(&self.preconditions) {
            if lit.positive {
                bound.extend(lit.atom.variables());
            } else if lit.atom.variables().any(|v| !bound.contains(v)) {
                return true;
            }
        }
        self.params().any(|p| !bound.contains(p))
    }
}

impl fmt::Display for ActionSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        write!(
            f,
            "action({}, {}, {}, {}).",
            self.head,
            list(self.agent_guard.iter().map(ToString::to_string).collect()),
            list(self.preconditions.iter().map(ToString::to_string).collect()),
            list(self.effects.iter().map(ToString::to_string).collect()),
        )
    }
}

/// Everything an `.actions` file declares.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionDomain {
    pub fluents: BTreeSet<PredKey>,
    pub schemas: Vec<ActionSchema>,
    /// Helper rules defined next to the schemas.
    pub rules: Vec<Rule>,
}

impl ActionDomain {
    pub fn schema(&self, name: &str) -> Option<&ActionSchema> {
        self.schemas.iter().find(|s| &*s.head.predicate == name)
    }

    /// Checks the fluent and effect invariants against the full rule set the
    /// domain will be evaluated with.
    pub fn check(&self, rules: &[Rule]) -> Result<(), ActionError> {
        parse::check_domain(self, rules)
    }
}

/// A fully instantiated action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAction {
    pub schema: Symbol,
    pub args: Vec<Term>,
    pub del: Vec<Atom>,
    pub add: Vec<Atom>,
}

impl GroundAction {
    pub fn as_atom(&self) -> Atom {
        Atom {
            predicate: self.schema.clone(),
            args: self.args.clone(),
        }
    }
}

/// Prints the instantiated head, e.g. `move_crane(crane_1,'Horr Sq.','Hassanabad Sq.')`.
impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_atom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{at}: action {schema}: head arguments must be distinct variables")]
    BadHead { schema: String, at: Location },
    #[error("{at}: action {schema} is defined twice")]
    DuplicateSchema { schema: String, at: Location },
    #[error("{at}: action {schema}: variable {variable} in `{literal}` is not bound by a parameter or an earlier positive condition")]
    UnboundConditionVariable {
        schema: String,
        variable: String,
        literal: String,
        at: Location,
    },
    #[error("{at}: action {schema}: effect variable {variable} is not bound by a parameter or a positive condition")]
    UnboundEffectVariable {
        schema: String,
        variable: String,
        at: Location,
    },
    #[error("{at}: action {schema}: effect on derived predicate {predicate}")]
    EffectOnDerivedPredicate {
        schema: String,
        predicate: PredKey,
        at: Location,
    },
    #[error("{at}: action {schema}: effect on {predicate}, which is not declared with fluent({predicate})")]
    EffectOnNonFluent {
        schema: String,
        predicate: PredKey,
        at: Location,
    },
    #[error("{predicate} is declared fluent but is defined by rules")]
    DerivedFluent { predicate: PredKey },
}
