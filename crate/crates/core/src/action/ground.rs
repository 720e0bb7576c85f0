use std::collections::BTreeSet;

use super::{ActionSchema, Effect, GroundAction};
use crate::facts::FactSet;
use crate::inference::{DerivedModel, InferenceError, Interpretation, NegationMode};
use crate::kb::{Atom, Substitution, Term};

/// All ground actions applicable in `state`, whose derived model is `model`.
/// Actions come in schema order; within a schema they are sorted by their
/// printed arguments.
pub fn ground_applicable(
    state: &FactSet,
    model: &DerivedModel,
    schemas: &[ActionSchema],
) -> Result<Vec<GroundAction>, InferenceError> {
    ground_in(&Interpretation::from_parts(state, model), schemas)
}

/// Like [`ground_applicable`], over an already built interpretation.
pub fn ground_in(
    interp: &Interpretation,
    schemas: &[ActionSchema],
) -> Result<Vec<GroundAction>, InferenceError> {
    let mut domain: Option<Vec<Term>> = None;
    let mut out = Vec::new();
    for schema in schemas {
        let needs_domain = schema.needs_active_domain();
        if needs_domain && domain.is_none() {
            domain = Some(interp.active_domain());
        }
        let mode = match (&domain, needs_domain) {
            (Some(d), true) => NegationMode::ActiveDomain(d),
            _ => NegationMode::LeftToRight,
        };
        let answers = interp.solve(&schema.conditions(), &Substitution::new(), mode)?;

        let mut found: Vec<(Vec<String>, GroundAction)> = Vec::new();
        let mut seen = BTreeSet::new();
        for answer in answers {
            for full in complete_params(schema, answer, domain.as_deref().unwrap_or(&[])) {
                let action = instantiate(schema, &full);
                if seen.insert(action.clone()) {
                    let key = action.args.iter().map(ToString::to_string).collect();
                    found.push((key, action));
                }
            }
        }
        found.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        out.extend(found.into_iter().map(|(_, a)| a));
    }
    Ok(out)
}

/// Extends `answer` with every combination of domain constants for the
/// parameters no condition bound.
fn complete_params(schema: &ActionSchema, answer: Substitution, domain: &[Term]) -> Vec<Substitution> {
    let mut partial = vec![answer];
    for p in schema.params() {
        if partial.first().is_some_and(|s| s.get(p).is_some()) {
            continue;
        }
        partial = partial
            .into_iter()
            .flat_map(|s| {
                domain.iter().map(move |c| {
                    let mut s = s.clone();
                    s.bind(p.clone(), c.clone());
                    s
                })
            })
            .collect();
    }
    partial
}

/// Instantiates the schema head and effects under a substitution binding
/// every parameter. An atom both deleted and added stays: it is dropped from
/// the delete list.
pub(super) fn instantiate(schema: &ActionSchema, s: &Substitution) -> GroundAction {
    let head = s.apply(&schema.head);
    let mut add: Vec<Atom> = Vec::new();
    let mut del: Vec<Atom> = Vec::new();
    for e in &schema.effects {
        match e {
            Effect::Add(a) => add.push(s.apply(a)),
            Effect::Del(a) => del.push(s.apply(a)),
        }
    }
    add.sort();
    add.dedup();
    del.sort();
    del.dedup();
    del.retain(|a| add.binary_search(a).is_err());
    GroundAction {
        schema: head.predicate,
        args: head.args,
        del,
        add,
    }
}

/// Successor state: deletes first, then adds.
pub fn apply_action(state: &FactSet, action: &GroundAction) -> FactSet {
    let mut next = state.clone();
    for a in &action.del {
        next.remove(a);
    }
    for a in &action.add {
        next.insert(a.clone());
    }
    next
}
