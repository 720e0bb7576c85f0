//! Syntax tree of the logic-program language.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-by-sharing name used for predicates, constants and variables.
pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Symbolic constant. Printed bare when it is a lowercase identifier,
    /// single-quoted otherwise.
    Const(Symbol),
    Int(i64),
    Var(Symbol),
    /// The anonymous variable `_`. Every occurrence is distinct.
    Anon,
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::Const(sym(name))
    }

    pub fn var(name: &str) -> Self {
        Term::Var(sym(name))
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Int(_))
    }

    pub fn as_var(&self) -> Option<&Symbol> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

/// Predicate identity: name plus arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Symbol,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        Self {
            name: sym(name),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Self {
            predicate: sym(predicate),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> PredKey {
        PredKey {
            name: self.predicate.clone(),
            arity: self.args.len(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn has_anonymous(&self) -> bool {
        self.args.iter().any(|t| matches!(t, Term::Anon))
    }

    /// Named variables in order of first occurrence.
    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        self.args.iter().filter_map(Term::as_var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Self {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Self {
            atom,
            positive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    /// Checks the range-restriction condition: variables of the head and of
    /// negative literals must occur in a positive body literal. Returns the
    /// first offending variable.
    pub fn unsafe_variable(&self) -> Option<Symbol> {
        let bound: BTreeSet<&Symbol> = self
            .body
            .iter()
            .filter(|l| l.positive)
            .flat_map(|l| l.atom.variables())
            .collect();
        let head = self.head.variables();
        let negs = self
            .body
            .iter()
            .filter(|l| !l.positive)
            .flat_map(|l| l.atom.variables());
        head.chain(negs).find(|v| !bound.contains(v)).cloned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub facts: Vec<Atom>,
}

impl Program {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.facts.is_empty()
    }
}

/// Variable bindings. Kept idempotent by [`crate::kb::unify`]: no bound
/// term mentions a bound variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.bindings.iter()
    }

    /// Binds `var` to `term`, rewriting existing bindings so the result stays
    /// idempotent. `term` must already be resolved against `self`.
    pub fn bind(&mut self, var: Symbol, term: Term) {
        for t in self.bindings.values_mut() {
            if t.as_var() == Some(&var) {
                *t = term.clone();
            }
        }
        self.bindings.insert(var, term);
    }

    pub fn resolve(&self, term: &Term) -> Term {
        match term {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| term.clone()),
            _ => term.clone(),
        }
    }

    pub fn apply(&self, atom: &Atom) -> Atom {
        Atom {
            predicate: atom.predicate.clone(),
            args: atom.args.iter().map(|t| self.resolve(t)).collect(),
        }
    }

    pub fn apply_literal(&self, lit: &Literal) -> Literal {
        Literal {
            atom: self.apply(&lit.atom),
            positive: lit.positive,
        }
    }

    /// Keeps only the bindings for the listed variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Symbol>) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(t) = self.bindings.get(v) {
                out.bindings.insert(v.clone(), t.clone());
            }
        }
        out
    }
}

impl FromIterator<(Symbol, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, Term)>>(iter: I) -> Self {
        Self {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Applies a substitution to an atom.
pub fn apply_substitution(atom: &Atom, s: &Substitution) -> Atom {
    s.apply(atom)
}
