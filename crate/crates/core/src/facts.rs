//! Fact sets and their canonical snapshots.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::kb::{Atom, PredKey};

/// A set of ground atoms with value semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FactSet(BTreeSet<Atom>);

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a ground atom; returns whether the set changed.
    pub fn insert(&mut self, atom: Atom) -> bool {
        debug_assert!(atom.is_ground(), "fact sets hold ground atoms only: {atom}");
        self.0.insert(atom)
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        self.0.remove(atom)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn with_predicate<'a>(&'a self, key: &'a PredKey) -> impl Iterator<Item = &'a Atom> + 'a {
        self.0.iter().filter(move |a| a.predicate == key.name && a.args.len() == key.arity)
    }

    /// 64-bit digest of the canonical form of the facts accepted by `keep`.
    pub fn hash_where(&self, keep: impl Fn(&Atom) -> bool) -> u64 {
        digest(canonical_order(self.0.iter().filter(|a| keep(a))).iter().map(|(_, a)| *a))
    }

    pub fn hash(&self) -> u64 {
        self.hash_where(|_| true)
    }
}

impl FromIterator<Atom> for FactSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Extend<Atom> for FactSet {
    fn extend<I: IntoIterator<Item = Atom>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for FactSet {
    type Item = Atom;
    type IntoIter = std::collections::btree_set::IntoIter<Atom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a FactSet {
    type Item = &'a Atom;
    type IntoIter = std::collections::btree_set::Iter<'a, Atom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Canonically ordered facts plus their digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub facts: Vec<Atom>,
    pub hash: u64,
}

impl Snapshot {
    /// The facts in source syntax, one clause per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            let _ = writeln!(out, "{f}.");
        }
        out
    }
}

type CanonicalKey = (String, usize, Vec<String>);

fn canonical_order<'a>(atoms: impl Iterator<Item = &'a Atom>) -> Vec<(CanonicalKey, &'a Atom)> {
    let mut keyed: Vec<_> = atoms
        .map(|a| {
            let key = (
                a.predicate.to_string(),
                a.args.len(),
                a.args.iter().map(ToString::to_string).collect(),
            );
            (key, a)
        })
        .collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0));
    keyed
}

fn digest<'a>(atoms: impl Iterator<Item = &'a Atom>) -> u64 {
    let mut hasher = Sha256::new();
    for a in atoms {
        hasher.update(a.to_string().as_bytes());
        hasher.update(b"\n");
    }
    let out = hasher.finalize();
    u64::from_be_bytes(out[..8].try_into().expect("sha256 output is 32 bytes"))
}

/// Canonical ordering is lexicographic on (predicate, arity, printed args).
pub fn snapshot(state: &FactSet) -> Snapshot {
    let facts: Vec<Atom> = canonical_order(state.iter())
        .into_iter()
        .map(|(_, a)| a.clone())
        .collect();
    let hash = digest(facts.iter());
    Snapshot { facts, hash }
}
