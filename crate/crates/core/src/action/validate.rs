use std::fmt;

use super::ground::{apply_action, instantiate};
use super::{ActionSchema, GroundAction};
use crate::facts::FactSet;
use crate::inference::{InferenceError, Interpretation, NegationMode, StratifiedProgram};
use crate::kb::{Literal, Rule, Substitution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Valid,
    /// Step `index` (0-based) cannot be executed. `index == plan.len()`
    /// means every step ran but the goal does not hold at the end.
    InvalidAt { index: usize, reason: InvalidReason },
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    UnknownAction(String),
    ArityMismatch { expected: usize, found: usize },
    /// The first condition, instantiated with the step's parameters, that no
    /// longer holds.
    PreconditionFailed(Literal),
    /// The step's recorded effects differ from what the schema produces now.
    EffectsChanged,
    GoalNotReached(Literal),
}

impl InvalidReason {
    /// Predicate name of the failing condition, if any.
    pub fn predicate(&self) -> Option<&str> {
        match self {
            InvalidReason::PreconditionFailed(l) | InvalidReason::GoalNotReached(l) => Some(&l.atom.predicate),
            _ => None,
        }
    }
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::UnknownAction(n) => write!(f, "unknown action {n}"),
            InvalidReason::ArityMismatch { expected, found } => {
                write!(f, "expected {expected} arguments, found {found}")
            }
            InvalidReason::PreconditionFailed(l) => write!(f, "precondition {l} fails"),
            InvalidReason::EffectsChanged => f.write_str("effects differ from the schema"),
            InvalidReason::GoalNotReached(l) => write!(f, "goal {l} does not hold"),
        }
    }
}

/// Checks that `plan` is executable from `initial` and reaches `goal`.
pub fn validate_plan(
    initial: &FactSet,
    rules: &[Rule],
    schemas: &[ActionSchema],
    plan: &[GroundAction],
    goal: &[Literal],
) -> Result<Validation, InferenceError> {
    validate_with(&StratifiedProgram::new(rules)?, schemas, initial, plan, goal)
}

pub fn validate_with(
    program: &StratifiedProgram,
    schemas: &[ActionSchema],
    initial: &FactSet,
    plan: &[GroundAction],
    goal: &[Literal],
) -> Result<Validation, InferenceError> {
    let mut state = initial.clone();
    for (index, step) in plan.iter().enumerate() {
        let invalid = |reason| Ok(Validation::InvalidAt { index, reason });
        let Some(schema) = schemas.iter().find(|s| s.name() == &step.schema) else {
            return invalid(InvalidReason::UnknownAction(step.schema.to_string()));
        };
        if schema.head.args.len() != step.args.len() {
            return invalid(InvalidReason::ArityMismatch {
                expected: schema.head.args.len(),
                found: step.args.len(),
            });
        }
        let seed: Substitution = schema.params().cloned().zip(step.args.iter().cloned()).collect();
        let interp = program.interpret(&state);
        let domain = if schema.needs_active_domain() {
            interp.active_domain()
        } else {
            Vec::new()
        };
        let mode = NegationMode::ActiveDomain(&domain);
        let conditions = schema.conditions();
        let answers = interp.solve(&conditions, &seed, mode)?;
        if answers.is_empty() {
            let failed = first_failure(&interp, &conditions, &seed, mode)?;
            return invalid(InvalidReason::PreconditionFailed(seed.apply_literal(failed)));
        }
        // Effects may depend on variables bound by the conditions; the step
        // is valid if some solution reproduces it.
        if !answers.iter().any(|a| &instantiate(schema, a) == step) {
            return invalid(InvalidReason::EffectsChanged);
        }
        state = apply_action(&state, step);
    }
    let interp = program.interpret(&state);
    let top = Substitution::new();
    if interp.solve(goal, &top, NegationMode::LeftToRight)?.is_empty() {
        let failed = first_failure(&interp, goal, &top, NegationMode::LeftToRight)?;
        return Ok(Validation::InvalidAt {
            index: plan.len(),
            reason: InvalidReason::GoalNotReached(failed.clone()),
        });
    }
    Ok(Validation::Valid)
}

/// The literal that closes the shortest unsatisfiable prefix of `conditions`.
fn first_failure<'a>(
    interp: &Interpretation,
    conditions: &'a [Literal],
    seed: &Substitution,
    mode: NegationMode<'_>,
) -> Result<&'a Literal, InferenceError> {
    for k in 1..=conditions.len() {
        if interp.solve(&conditions[..k], seed, mode)?.is_empty() {
            return Ok(&conditions[k - 1]);
        }
    }
    unreachable!("an unsatisfiable conjunction has an unsatisfiable prefix")
}
