//! Most general unifiers over flat atoms.

use super::term::{Atom, Substitution, Term};

/// Extends `s` so that `a` and `b` become equal, or returns `None` on clash.
/// The anonymous variable matches anything without binding.
pub fn unify_terms(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let a = s.resolve(a);
    let b = s.resolve(b);
    match (&a, &b) {
        (Term::Anon, _) | (_, Term::Anon) => true,
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), _) => {
            s.bind(x.clone(), b);
            true
        }
        (_, Term::Var(y)) => {
            s.bind(y.clone(), a);
            true
        }
        _ => a == b,
    }
}

/// Most general unifier of two atoms. Fails (returns `None`) when the
/// predicates or arities differ or constants clash.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    for (x, y) in a.args.iter().zip(&b.args) {
        if !unify_terms(x, y, &mut s) {
            return None;
        }
    }
    Some(s)
}
