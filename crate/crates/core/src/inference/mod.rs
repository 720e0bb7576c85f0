//! Bottom-up evaluation of stratified rule programs and conjunctive queries.
//!
//! Rules are evaluated stratum by stratum with semi-naive iteration: after
//! the first round only rule instances that use at least one fact derived in
//! the previous round are re-fired. Negative literals only ever consult
//! strictly lower strata, which are complete by the time they are read, so
//! the result is the perfect model of the program.

mod engine;
mod stratify;

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

pub use stratify::{stratify, NegativeCycle, Stratification};

use crate::facts::FactSet;
use crate::kb::{Atom, Literal, PredKey, Rule, Substitution, Symbol, Term};
use engine::{CompiledAtom, CompiledLiteral, Database, Solver, UnboundNegation, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("rules are not stratifiable: negative cycle {cycle}")]
    NotStratifiable { cycle: NegativeCycle },
    #[error("unsafe query: variable {variable} in `{literal}` is not bound by a positive literal to its left")]
    UnsafeQuery { literal: String, variable: String },
}

/// Atoms of rule-head predicates in the perfect model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DerivedModel {
    pub derived: FactSet,
    /// Head predicates per stratum, lowest first.
    pub strata_order: Vec<Vec<PredKey>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryResult {
    pub answers: BTreeSet<Substitution>,
    /// The query had no named variables.
    pub grounded: bool,
}

impl QueryResult {
    pub fn holds(&self) -> bool {
        !self.answers.is_empty()
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    head: CompiledAtom,
    /// Positive literals first (source order), then negative ones.
    body: Vec<CompiledLiteral>,
    vars: usize,
}

impl CompiledRule {
    fn new(rule: &Rule) -> Self {
        let mut table = VarTable::default();
        let mut body: Vec<CompiledLiteral> = rule
            .body
            .iter()
            .filter(|l| l.positive)
            .map(|l| table.compile_literal(l))
            .collect();
        body.extend(
            rule.body
                .iter()
                .filter(|l| !l.positive)
                .map(|l| table.compile_literal(l)),
        );
        let head = table.compile_atom(&rule.head);
        Self {
            head,
            body,
            vars: table.len(),
        }
    }
}

/// A rule set that has been checked, stratified and compiled once, ready to
/// be evaluated against many fact sets.
#[derive(Debug, Clone)]
pub struct StratifiedProgram {
    rules: Vec<Rule>,
    compiled: Vec<CompiledRule>,
    stratification: Stratification,
    /// Rule indices per stratum.
    strata: Vec<Vec<usize>>,
    heads: BTreeSet<PredKey>,
}

impl StratifiedProgram {
    pub fn new(rules: &[Rule]) -> Result<Self, InferenceError> {
        let stratification = stratify(rules)?;
        let mut strata = vec![Vec::new(); stratification.height()];
        for (i, r) in rules.iter().enumerate() {
            let lvl = stratification
                .level(&r.head.key())
                .expect("every head is stratified");
            strata[lvl].push(i);
        }
        strata.retain(|s| !s.is_empty());
        Ok(Self {
            rules: rules.to_vec(),
            compiled: rules.iter().map(CompiledRule::new).collect(),
            stratification,
            strata,
            heads: rules.iter().map(|r| r.head.key()).collect(),
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn stratification(&self) -> &Stratification {
        &self.stratification
    }

    /// Predicates defined by at least one rule.
    pub fn derived_predicates(&self) -> &BTreeSet<PredKey> {
        &self.heads
    }

    fn strata_order(&self) -> Vec<Vec<PredKey>> {
        self.strata
            .iter()
            .map(|s| {
                let keys: BTreeSet<PredKey> =
                    s.iter().map(|&i| self.rules[i].head.key()).collect();
                keys.into_iter().collect()
            })
            .collect()
    }

    /// Computes the perfect model over `base` and returns it together with
    /// the base facts, ready for querying.
    pub fn interpret(&self, base: &FactSet) -> Interpretation {
        let mut db = Database::from_atoms(base.iter());
        for stratum in &self.strata {
            self.saturate(stratum, &mut db);
        }
        Interpretation {
            db,
            heads: self.heads.clone(),
            strata_order: self.strata_order(),
        }
    }

    pub fn evaluate(&self, base: &FactSet) -> DerivedModel {
        self.interpret(base).model()
    }

    fn saturate(&self, stratum: &[usize], db: &mut Database) {
        let local: HashSet<&PredKey> = stratum.iter().map(|&i| &self.compiled[i].head.key).collect();

        let mut delta = Database::default();
        for &ri in stratum {
            let rule = &self.compiled[ri];
            fire(rule, db, None, &mut delta);
        }
        merge(db, &delta);

        while !delta.is_empty() {
            let mut next = Database::default();
            for &ri in stratum {
                let rule = &self.compiled[ri];
                for (pos, lit) in rule.body.iter().enumerate() {
                    if !lit.positive || !local.contains(&lit.atom.key) {
                        continue;
                    }
                    if delta.rows(&lit.atom.key).is_none() {
                        continue;
                    }
                    fire(rule, db, Some((pos, &delta)), &mut next);
                }
            }
            merge(db, &next);
            delta = next;
        }
    }
}

/// Evaluates one rule, adding head tuples absent from `db` to `out`. With
/// `delta = Some((i, d))` the positive literal `i` reads only from `d`.
fn fire(rule: &CompiledRule, db: &Database, delta: Option<(usize, &Database)>, out: &mut Database) {
    let solver = Solver {
        literals: &rule.body,
        positive_rows: |i: usize| match delta {
            Some((pos, d)) if pos == i => d.rows(&rule.body[i].atom.key),
            _ => db.rows(&rule.body[i].atom.key),
        },
        negative_rows: |k: &PredKey| db.rows(k),
        unbound: UnboundNegation::Reject,
    };
    let mut bindings = vec![None; rule.vars];
    let result = solver.run(&mut bindings, &mut |b| {
        let tuple = rule
            .head
            .instantiate(b)
            .expect("safe rules bind every head variable");
        if !db.contains(&rule.head.key, &tuple) {
            out.insert(rule.head.key.clone(), tuple);
        }
    });
    // Safety guarantees negative literals are ground once positives are bound.
    debug_assert!(result.is_ok());
}

fn merge(db: &mut Database, delta: &Database) {
    for (k, rows) in delta.relations() {
        for t in rows {
            db.insert(k.clone(), t.clone());
        }
    }
}

/// Stratifies and evaluates `rules` over `base`.
pub fn evaluate(base: &FactSet, rules: &[Rule]) -> Result<DerivedModel, InferenceError> {
    Ok(StratifiedProgram::new(rules)?.evaluate(base))
}

/// Base facts plus their derived model, indexed for querying.
#[derive(Debug, Clone)]
pub struct Interpretation {
    db: Database,
    heads: BTreeSet<PredKey>,
    strata_order: Vec<Vec<PredKey>>,
}

/// Treatment of negative literals whose variables are not yet bound.
#[derive(Debug, Clone, Copy)]
pub enum NegationMode<'a> {
    /// Fail with [`InferenceError::UnsafeQuery`].
    LeftToRight,
    /// Enumerate the free variables over the given constants.
    ActiveDomain(&'a [Term]),
}

impl Interpretation {
    pub fn from_parts(base: &FactSet, model: &DerivedModel) -> Self {
        let db = Database::from_atoms(base.iter().chain(model.derived.iter()));
        Self {
            db,
            heads: model
                .derived
                .iter()
                .map(Atom::key)
                .chain(model.strata_order.iter().flatten().cloned())
                .collect(),
            strata_order: model.strata_order.clone(),
        }
    }

    pub fn model(&self) -> DerivedModel {
        let derived = self
            .heads
            .iter()
            .filter_map(|k| self.db.rows(k).map(|rows| (k, rows)))
            .flat_map(|(k, rows)| {
                rows.iter().map(|t| Atom {
                    predicate: k.name.clone(),
                    args: t.clone(),
                })
            })
            .collect();
        DerivedModel {
            derived,
            strata_order: self.strata_order.clone(),
        }
    }

    pub fn holds(&self, atom: &Atom) -> bool {
        self.db.contains(&atom.key(), &atom.args)
    }

    /// Every constant occurring in base or derived facts, sorted.
    pub fn active_domain(&self) -> Vec<Term> {
        let set: BTreeSet<Term> = self
            .db
            .relations()
            .flat_map(|(_, rows)| rows.iter().flatten().cloned())
            .collect();
        set.into_iter().collect()
    }

    /// All atoms, base and derived.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.db.atoms()
    }

    /// Solves `goal` left to right starting from `seed`. Each answer binds
    /// every named variable of `seed` and `goal`.
    pub fn solve(
        &self,
        goal: &[Literal],
        seed: &Substitution,
        mode: NegationMode<'_>,
    ) -> Result<BTreeSet<Substitution>, InferenceError> {
        let mut table = VarTable::default();
        for (v, _) in seed.iter() {
            table.slot(v);
        }
        let literals: Vec<CompiledLiteral> = goal.iter().map(|l| table.compile_literal(l)).collect();
        let mut bindings = vec![None; table.len()];
        for (v, t) in seed.iter() {
            let slot = table.get(v).expect("seed variables registered");
            bindings[slot] = match t {
                Term::Var(_) | Term::Anon => None,
                ground => Some(ground.clone()),
            };
        }
        let unbound = match mode {
            NegationMode::LeftToRight => UnboundNegation::Reject,
            NegationMode::ActiveDomain(d) => UnboundNegation::Enumerate(d),
        };
        let solver = Solver {
            literals: &literals,
            positive_rows: |i: usize| self.db.rows(&literals[i].atom.key),
            negative_rows: |k: &PredKey| self.db.rows(k),
            unbound,
        };
        let mut answers = BTreeSet::new();
        solver
            .run(&mut bindings, &mut |b| {
                let s: Substitution = b
                    .iter()
                    .enumerate()
                    .filter_map(|(i, t)| t.clone().map(|t| (table.name(i).clone(), t)))
                    .collect();
                answers.insert(s);
            })
            .map_err(|at| InferenceError::UnsafeQuery {
                literal: goal[at.literal].to_string(),
                variable: table.name(at.slot).to_string(),
            })?;
        Ok(answers)
    }

    pub fn query(&self, goal: &[Literal]) -> Result<QueryResult, InferenceError> {
        let answers = self.solve(goal, &Substitution::new(), NegationMode::LeftToRight)?;
        Ok(QueryResult {
            answers,
            grounded: goal_variables(goal).is_empty(),
        })
    }
}

fn goal_variables(goal: &[Literal]) -> BTreeSet<&Symbol> {
    goal.iter().flat_map(|l| l.atom.variables()).collect()
}

/// Answers a conjunctive query against base facts and a derived model.
pub fn query(
    base: &FactSet,
    model: &DerivedModel,
    goal: &[Literal],
) -> Result<QueryResult, InferenceError> {
    Interpretation::from_parts(base, model).query(goal)
}
