//! Relation storage and conjunction solving shared by rule evaluation and
//! queries.

use std::collections::HashMap;

use indexmap::{IndexMap, IndexSet};

use crate::kb::{Atom, Literal, PredKey, Symbol, Term};

pub(crate) type Tuple = Vec<Term>;
pub(crate) type Rows = IndexSet<Tuple>;

/// Ground atoms grouped by predicate, in insertion order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Database {
    relations: HashMap<PredKey, Rows>,
}

impl Database {
    pub fn from_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut db = Database::default();
        for a in atoms {
            db.insert(a.key(), a.args.clone());
        }
        db
    }

    pub fn insert(&mut self, key: PredKey, tuple: Tuple) -> bool {
        self.relations.entry(key).or_default().insert(tuple)
    }

    pub fn rows(&self, key: &PredKey) -> Option<&Rows> {
        self.relations.get(key)
    }

    pub fn contains(&self, key: &PredKey, tuple: &[Term]) -> bool {
        self.relations.get(key).is_some_and(|r| r.contains(tuple))
    }

    pub fn is_empty(&self) -> bool {
        self.relations.values().all(IndexSet::is_empty)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&PredKey, &Rows)> {
        self.relations.iter()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.relations.iter().flat_map(|(k, rows)| {
            rows.iter().map(move |t| Atom {
                predicate: k.name.clone(),
                args: t.clone(),
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Slot {
    Ground(Term),
    Var(usize),
    Any,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledAtom {
    pub key: PredKey,
    pub args: Vec<Slot>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledLiteral {
    pub atom: CompiledAtom,
    pub positive: bool,
}

/// Variable numbering for one rule or query.
#[derive(Debug, Clone, Default)]
pub(crate) struct VarTable {
    names: IndexMap<Symbol, ()>,
}

impl VarTable {
    pub fn slot(&mut self, name: &Symbol) -> usize {
        self.names.insert_full(name.clone(), ()).0
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.names.get_index_of(name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, slot: usize) -> &Symbol {
        self.names.get_index(slot).expect("slot in range").0
    }

    pub fn compile_atom(&mut self, atom: &Atom) -> CompiledAtom {
        CompiledAtom {
            key: atom.key(),
            args: atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Slot::Var(self.slot(v)),
                    Term::Anon => Slot::Any,
                    ground => Slot::Ground(ground.clone()),
                })
                .collect(),
        }
    }

    pub fn compile_literal(&mut self, lit: &Literal) -> CompiledLiteral {
        CompiledLiteral {
            atom: self.compile_atom(&lit.atom),
            positive: lit.positive,
        }
    }
}

pub(crate) type Bindings = Vec<Option<Term>>;

impl CompiledAtom {
    /// Matches a stored tuple, extending `b`. Returns the slots it bound so
    /// the caller can undo them.
    fn match_tuple(&self, tuple: &[Term], b: &mut Bindings, newly: &mut Vec<usize>) -> bool {
        for (slot, value) in self.args.iter().zip(tuple) {
            match slot {
                Slot::Any => {}
                Slot::Ground(t) => {
                    if t != value {
                        return false;
                    }
                }
                Slot::Var(i) => match &b[*i] {
                    Some(bound) => {
                        if bound != value {
                            return false;
                        }
                    }
                    None => {
                        b[*i] = Some(value.clone());
                        newly.push(*i);
                    }
                },
            }
        }
        true
    }

    /// The instantiated tuple, or `None` when a variable is unbound.
    /// `Any` slots become `None` entries in the pattern form.
    pub fn pattern(&self, b: &Bindings) -> Result<Vec<Option<Term>>, usize> {
        self.args
            .iter()
            .map(|s| match s {
                Slot::Ground(t) => Ok(Some(t.clone())),
                Slot::Any => Ok(None),
                Slot::Var(i) => b[*i].clone().map(Some).ok_or(*i),
            })
            .collect()
    }

    pub fn instantiate(&self, b: &Bindings) -> Option<Tuple> {
        self.args
            .iter()
            .map(|s| match s {
                Slot::Ground(t) => Some(t.clone()),
                Slot::Var(i) => b[*i].clone(),
                Slot::Any => None,
            })
            .collect()
    }

    pub fn unbound_vars(&self, b: &Bindings) -> Vec<usize> {
        let mut out = Vec::new();
        for s in &self.args {
            if let Slot::Var(i) = s {
                if b[*i].is_none() && !out.contains(i) {
                    out.push(*i);
                }
            }
        }
        out
    }
}

/// True if some row matches `pattern` (`None` entries are wildcards).
pub(crate) fn any_match(rows: Option<&Rows>, pattern: &[Option<Term>]) -> bool {
    let Some(rows) = rows else {
        return false;
    };
    if pattern.iter().all(Option::is_some) {
        let tuple: Tuple = pattern.iter().map(|t| t.clone().expect("checked")).collect();
        return rows.contains(&tuple);
    }
    rows.iter().any(|row| {
        row.iter()
            .zip(pattern)
            .all(|(v, p)| p.as_ref().is_none_or(|p| p == v))
    })
}

/// How a negative literal with unbound variables is treated.
pub(crate) enum UnboundNegation<'a> {
    /// Report the first unbound variable.
    Reject,
    /// Enumerate the unbound variables over a finite constant domain.
    Enumerate(&'a [Term]),
}

/// Left-to-right backtracking solver over a conjunction.
pub(crate) struct Solver<'a, P, N>
where
    P: Fn(usize) -> Option<&'a Rows>,
    N: Fn(&PredKey) -> Option<&'a Rows>,
{
    pub literals: &'a [CompiledLiteral],
    /// Rows for the positive literal at the given index.
    pub positive_rows: P,
    /// Rows consulted by negative literals.
    pub negative_rows: N,
    pub unbound: UnboundNegation<'a>,
}

/// A negative literal reached with a variable still unbound.
#[derive(Debug, Clone, Copy)]
pub(crate) struct UnboundAt {
    pub literal: usize,
    pub slot: usize,
}

impl<'a, P, N> Solver<'a, P, N>
where
    P: Fn(usize) -> Option<&'a Rows>,
    N: Fn(&PredKey) -> Option<&'a Rows>,
{
    pub fn run(
        &self,
        bindings: &mut Bindings,
        emit: &mut dyn FnMut(&Bindings),
    ) -> Result<(), UnboundAt> {
        self.step(0, bindings, emit)
    }

    fn step(
        &self,
        idx: usize,
        b: &mut Bindings,
        emit: &mut dyn FnMut(&Bindings),
    ) -> Result<(), UnboundAt> {
        let Some(lit) = self.literals.get(idx) else {
            emit(b);
            return Ok(());
        };
        if lit.positive {
            let Some(rows) = (self.positive_rows)(idx) else {
                return Ok(());
            };
            let mut newly = Vec::new();
            for row in rows {
                if lit.atom.match_tuple(row, b, &mut newly) {
                    self.step(idx + 1, b, emit)?;
                }
                for i in newly.drain(..) {
                    b[i] = None;
                }
            }
            return Ok(());
        }
        match lit.atom.pattern(b) {
            Ok(pattern) => {
                if !any_match((self.negative_rows)(&lit.atom.key), &pattern) {
                    self.step(idx + 1, b, emit)?;
                }
                Ok(())
            }
            Err(slot) => match self.unbound {
                UnboundNegation::Reject => Err(UnboundAt { literal: idx, slot }),
                UnboundNegation::Enumerate(domain) => {
                    let free = lit.atom.unbound_vars(b);
                    self.enumerate(idx, &free, domain, b, emit)
                }
            },
        }
    }

    fn enumerate(
        &self,
        idx: usize,
        free: &[usize],
        domain: &[Term],
        b: &mut Bindings,
        emit: &mut dyn FnMut(&Bindings),
    ) -> Result<(), UnboundAt> {
        let Some((&first, rest)) = free.split_first() else {
            return self.step(idx, b, emit);
        };
        for value in domain {
            b[first] = Some(value.clone());
            self.enumerate(idx, rest, domain, b, emit)?;
        }
        b[first] = None;
        Ok(())
    }
}
