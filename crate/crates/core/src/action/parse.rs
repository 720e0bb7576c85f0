use std::collections::{BTreeSet, HashSet};

use super::{ActionDomain, ActionError, ActionSchema, Effect};
use crate::kb::parser::{clause_to_rule, Clause, Expr, Node};
use crate::kb::{parse_clauses, Literal, ParseError, PredKey, Rule, Symbol, Term};

/// Parses an `.actions` file and checks it against its own helper rules.
pub fn parse_actions(text: &str) -> Result<ActionDomain, ActionError> {
    parse_actions_with_rules(text, &[])
}

/// Parses an `.actions` file and checks it against its helper rules plus
/// `rules` (typically the scenario's rule file).
pub fn parse_actions_with_rules(text: &str, rules: &[Rule]) -> Result<ActionDomain, ActionError> {
    let mut domain = ActionDomain::default();
    for clause in parse_clauses(text)? {
        match (clause.head.as_compound(), &clause.body) {
            (Some(("fluent", args)), None) => {
                for a in args {
                    match &a.expr {
                        Expr::Indicator(name, arity) => {
                            domain.fluents.insert(PredKey::new(name, *arity));
                        }
                        _ => {
                            return Err(ParseError::syntax(a.at, "expected a predicate indicator name/arity").into())
                        }
                    }
                }
            }
            (Some(("action", args)), None) => {
                let schema = parse_schema(&clause, args)?;
                if domain.schema(schema.name()).is_some() {
                    return Err(ActionError::DuplicateSchema {
                        schema: schema.name().to_string(),
                        at: schema.at,
                    });
                }
                domain.schemas.push(schema);
            }
            (_, Some(_)) => domain.rules.push(clause_to_rule(&clause)?),
            (_, None) => {
                return Err(ParseError::syntax(
                    clause.at,
                    "only fluent/1 declarations, action/4 schemas and rules may appear in an actions file",
                )
                .into())
            }
        }
    }
    let mut all_rules = domain.rules.clone();
    all_rules.extend_from_slice(rules);
    check_domain(&domain, &all_rules)?;
    Ok(domain)
}

fn parse_schema(clause: &Clause, args: &[Node]) -> Result<ActionSchema, ActionError> {
    let [head, guard, pre, effects] = args else {
        return Err(ParseError::syntax(
            clause.at,
            "action/4 expects a head, an agent guard list, a precondition list and an effect list",
        )
        .into());
    };
    let head_atom = head.to_atom()?;
    let mut seen = HashSet::new();
    let distinct_vars = head_atom
        .args
        .iter()
        .all(|t| matches!(t, Term::Var(v) if seen.insert(v.clone())));
    if !distinct_vars {
        return Err(ActionError::BadHead {
            schema: head_atom.predicate.to_string(),
            at: head.at,
        });
    }
    let effects_list = match &effects.expr {
        Expr::List(items) => items
            .iter()
            .map(|item| match item.as_compound() {
                Some(("del", [a])) => Ok(Effect::Del(a.to_atom()?)),
                Some(("add", [a])) => Ok(Effect::Add(a.to_atom()?)),
                _ => Err(ParseError::syntax(item.at, "expected del(Atom) or add(Atom)")),
            })
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(ParseError::syntax(effects.at, "expected a list of effects").into()),
    };
    let schema = ActionSchema {
        head: head_atom,
        agent_guard: guard.to_literals()?,
        preconditions: pre.to_literals()?,
        effects: effects_list,
        at: clause.at,
    };
    check_scoping(&schema)?;
    Ok(schema)
}

/// Conditions are read left to right: a negative condition may only use
/// parameters and variables bound by earlier positive conditions; effects
/// may use parameters and any positively bound variable.
fn check_scoping(schema: &ActionSchema) -> Result<(), ActionError> {
    let params: BTreeSet<&Symbol> = schema.params().collect();
    let mut bound: BTreeSet<&Symbol> = params.clone();
    let conditions: Vec<&Literal> = schema.agent_guard.iter().chain(&schema.preconditions).collect();
    for lit in conditions {
        if lit.positive {
            bound.extend(lit.atom.variables());
        } else if let Some(v) = lit.atom.variables().find(|v| !bound.contains(v)) {
            return Err(ActionError::UnboundConditionVariable {
                schema: schema.name().to_string(),
                variable: v.to_string(),
                literal: lit.to_string(),
                at: schema.at,
            });
        }
    }
    for e in &schema.effects {
        let atom = e.atom();
        if atom.has_anonymous() {
            return Err(ActionError::UnboundEffectVariable {
                schema: schema.name().to_string(),
                variable: "_".into(),
                at: schema.at,
            });
        }
        if let Some(v) = atom.variables().find(|v| !bound.contains(v)) {
            return Err(ActionError::UnboundEffectVariable {
                schema: schema.name().to_string(),
                variable: v.to_string(),
                at: schema.at,
            });
        }
    }
    Ok(())
}

pub(super) fn check_domain(domain: &ActionDomain, rules: &[Rule]) -> Result<(), ActionError> {
    let derived: BTreeSet<PredKey> = rules.iter().map(|r| r.head.key()).collect();
    if let Some(p) = domain.fluents.iter().find(|p| derived.contains(p)) {
        return Err(ActionError::DerivedFluent { predicate: p.clone() });
    }
    for schema in &domain.schemas {
        for e in &schema.effects {
            let key = e.atom().key();
            if derived.contains(&key) {
                return Err(ActionError::EffectOnDerivedPredicate {
                    schema: schema.name().to_string(),
                    predicate: key,
                    at: schema.at,
                });
            }
            if !domain.fluents.contains(&key) {
                return Err(ActionError::EffectOnNonFluent {
                    schema: schema.name().to_string(),
                    predicate: key,
                    at: schema.at,
                });
            }
        }
    }
    Ok(())
}
