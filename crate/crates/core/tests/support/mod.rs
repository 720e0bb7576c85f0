//! Test oracles and generators.
//!
//! The oracles here deliberately share nothing with the engine beyond the
//! syntax types: models are computed by brute-force substitution over the
//! constant universe, and planning by exhaustive layer-by-layer expansion
//! over exact fact sets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rescue_core::action::{ActionSchema, Effect};
use rescue_core::kb::{Atom, Literal, Rule, Symbol, Term};

pub type Facts = BTreeSet<Atom>;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn tehran_dir() -> PathBuf {
    repo_root().join("scenarios/tehran")
}

pub fn read_scenario_file(name: &str) -> String {
    let path = tehran_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn c(name: &str) -> Term {
    Term::constant(name)
}

pub fn atom(p: &str, args: &[&str]) -> Atom {
    Atom::new(p, args.iter().map(|a| c(a)).collect())
}

// ---------------------------------------------------------------------------
// Brute-force semantics

type Assignment = BTreeMap<Symbol, Term>;

fn ground(a: &Atom, s: &Assignment) -> Atom {
    Atom {
        predicate: a.predicate.clone(),
        args: a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
                other => other.clone(),
            })
            .collect(),
    }
}

/// Whether a ground-but-for-`_` atom matches some fact.
fn exists(facts: &Facts, pattern: &Atom) -> bool {
    if !pattern.has_anonymous() {
        return facts.contains(pattern);
    }
    facts.iter().any(|f| {
        f.predicate == pattern.predicate
            && f.args.len() == pattern.args.len()
            && f.args
                .iter()
                .zip(&pattern.args)
                .all(|(x, p)| matches!(p, Term::Anon) || x == p)
    })
}

fn literal_holds(facts: &Facts, lit: &Literal, s: &Assignment) -> bool {
    exists(facts, &ground(&lit.atom, s)) == lit.positive
}

fn constants_of(atoms: impl IntoIterator<Item = Atom>) -> BTreeSet<Term> {
    atoms
        .into_iter()
        .flat_map(|a| a.args)
        .filter(|t| matches!(t, Term::Const(_) | Term::Int(_)))
        .collect()
}

/// Every assignment of `vars` over `universe`.
fn assignments(vars: &[Symbol], universe: &[Term]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                universe.iter().map(move |t| {
                    let mut s = s.clone();
                    s.insert(v.clone(), t.clone());
                    s
                })
            })
            .collect();
    }
    out
}

fn named_vars<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<Symbol> {
    let set: BTreeSet<Symbol> = atoms.into_iter().flat_map(|a| a.variables().cloned()).collect();
    set.into_iter().collect()
}

/// Levels by relaxation; `None` when some predicate depends negatively on
/// itself.
pub fn oracle_levels(rules: &[Rule]) -> Option<BTreeMap<(Symbol, usize), usize>> {
    let key = |a: &Atom| (a.predicate.clone(), a.args.len());
    let mut level: BTreeMap<(Symbol, usize), usize> = BTreeMap::new();
    for r in rules {
        level.insert(key(&r.head), 0);
        for l in &r.body {
            level.entry(key(&l.atom)).or_insert(0);
        }
    }
    let bound = level.len();
    loop {
        let mut changed = false;
        for r in rules {
            let mut need = 0;
            for l in &r.body {
                let lv = level[&key(&l.atom)];
                need = need.max(if l.positive { lv } else { lv + 1 });
            }
            let h = level.get_mut(&key(&r.head)).unwrap();
            if need > *h {
                *h = need;
                changed = true;
            }
            if *h > bound {
                return None;
            }
        }
        if !changed {
            return Some(level);
        }
    }
}

/// Base facts plus everything the rules derive, by naive iteration to a
/// fixpoint within each level. `None` for unstratifiable rules.
pub fn naive_model(base: &Facts, rules: &[Rule]) -> Option<Facts> {
    let levels = oracle_levels(rules)?;
    let universe: Vec<Term> = constants_of(
        base.iter()
            .cloned()
            .chain(rules.iter().flat_map(|r| std::iter::once(r.head.clone()).chain(r.body.iter().map(|l| l.atom.clone())))),
    )
    .into_iter()
    .collect();
    let top = levels.values().copied().max().unwrap_or(0);
    let mut facts = base.clone();
    for lvl in 0..=top {
        let layer: Vec<&Rule> = rules
            .iter()
            .filter(|r| levels[&(r.head.predicate.clone(), r.head.args.len())] == lvl)
            .collect();
        loop {
            let mut new = Vec::new();
            for r in &layer {
                let vars = named_vars(std::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)));
                for s in assignments(&vars, &universe) {
                    if r.body.iter().all(|l| literal_holds(&facts, l, &s)) {
                        let h = ground(&r.head, &s);
                        if !facts.contains(&h) {
                            new.push(h);
                        }
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            facts.extend(new);
        }
    }
    Some(facts)
}

/// Facts of predicates defined by rules.
pub fn naive_derived(base: &Facts, rules: &[Rule]) -> Option<Facts> {
    let heads: BTreeSet<(Symbol, usize)> = rules.iter().map(|r| (r.head.predicate.clone(), r.head.args.len())).collect();
    Some(
        naive_model(base, rules)?
            .into_iter()
            .filter(|a| heads.contains(&(a.predicate.clone(), a.args.len())))
            .collect(),
    )
}

/// Substitutions (over the goal's named variables) satisfying the goal.
pub fn naive_answers(model: &Facts, goal: &[Literal]) -> BTreeSet<Assignment> {
    let universe: Vec<Term> = constants_of(model.iter().cloned().chain(goal.iter().map(|l| l.atom.clone())))
        .into_iter()
        .collect();
    let vars = named_vars(goal.iter().map(|l| &l.atom));
    assignments(&vars, &universe)
        .into_iter()
        .filter(|s| goal.iter().all(|l| literal_holds(model, l, s)))
        .collect()
}

/// An action as the oracle sees it: name, arguments, delete and add sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleAction {
    pub name: String,
    pub args: Vec<Term>,
    pub del: Facts,
    pub add: Facts,
}

/// Every applicable ground action, by trying all substitutions of the
/// schema's variables over the constants of the state's model.
pub fn brute_ground(state: &Facts, rules: &[Rule], schemas: &[ActionSchema]) -> BTreeSet<OracleAction> {
    let model = naive_model(state, rules).expect("stratifiable");
    let universe: Vec<Term> = constants_of(model.iter().cloned()).into_iter().collect();
    let mut out = BTreeSet::new();
    for schema in schemas {
        let conds: Vec<&Literal> = schema.agent_guard.iter().chain(&schema.preconditions).collect();
        let vars = named_vars(
            std::iter::once(&schema.head)
                .chain(conds.iter().map(|l| &l.atom))
                .chain(schema.effects.iter().map(Effect::atom)),
        );
        for s in assignments(&vars, &universe) {
            if conds.iter().all(|l| literal_holds(&model, l, &s)) {
                let mut del = Facts::new();
                let mut add = Facts::new();
                for e in &schema.effects {
                    match e {
                        Effect::Del(a) => del.insert(ground(a, &s)),
                        Effect::Add(a) => add.insert(ground(a, &s)),
                    };
                }
                let del = del.difference(&add).cloned().collect();
                out.insert(OracleAction {
                    name: schema.name().to_string(),
                    args: ground(&schema.head, &s).args,
                    del,
                    add,
                });
            }
        }
    }
    out
}

pub fn oracle_apply(state: &Facts, a: &OracleAction) -> Facts {
    let mut next: Facts = state.difference(&a.del).cloned().collect();
    next.extend(a.add.iter().cloned());
    next
}

pub fn oracle_goal_holds(state: &Facts, rules: &[Rule], goal: &[Literal]) -> bool {
    let model = naive_model(state, rules).expect("stratifiable");
    !naive_answers(&model, goal).is_empty()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSearch {
    /// Length of a shortest plan, if one exists within the depth limit.
    pub length: Option<usize>,
    /// Distinct states seen.
    pub reachable: usize,
    /// Whether the whole reachable space was explored.
    pub complete: bool,
}

/// Layer-by-layer breadth-first expansion over exact states. Stops once
/// `limit` states have been seen.
pub fn oracle_bfs(initial: &Facts, rules: &[Rule], schemas: &[ActionSchema], goal: &[Literal], max_depth: usize, limit: usize) -> OracleSearch {
    let mut seen: BTreeSet<Facts> = BTreeSet::from([initial.clone()]);
    let mut layer = vec![initial.clone()];
    for depth in 0..=max_depth {
        if layer.iter().any(|s| oracle_goal_holds(s, rules, goal)) {
            return OracleSearch {
                length: Some(depth),
                reachable: seen.len(),
                complete: false,
            };
        }
        if depth == max_depth {
            break;
        }
        let mut next = Vec::new();
        for s in &layer {
            for a in brute_ground(s, rules, schemas) {
                let t = oracle_apply(s, &a);
                if seen.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        if seen.len() > limit {
            return OracleSearch {
                length: None,
                reachable: seen.len(),
                complete: false,
            };
        }
        if next.is_empty() {
            return OracleSearch {
                length: None,
                reachable: seen.len(),
                complete: true,
            };
        }
        layer = next;
    }
    OracleSearch {
        length: None,
        reachable: seen.len(),
        complete: false,
    }
}

// ---------------------------------------------------------------------------
// Generators

fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty")
}

const VARS: [&str; 3] = ["X", "Y", "Z"];

/// A random stratified program: `base` facts over e0..e2 and rules
/// defining d0..d3, where rules for `d_i` negate only e-predicates and
/// `d_j` with j < i. Every rule is safe.
pub fn random_program<R: Rng>(rng: &mut R) -> (Facts, Vec<Rule>) {
    let consts: Vec<String> = (0..rng.random_range(2..=5)).map(|i| format!("c{i}")).collect();
    let base_preds: Vec<(String, usize)> = (0..3).map(|i| (format!("e{i}"), rng.random_range(1..=2))).collect();
    let derived_preds: Vec<(String, usize)> = (0..4).map(|i| (format!("d{i}"), rng.random_range(1..=2))).collect();

    let mut base = Facts::new();
    for _ in 0..rng.random_range(0..=30) {
        let (p, n) = pick(rng, &base_preds);
        let args: Vec<Term> = (0..*n).map(|_| c(pick(rng, &consts))).collect();
        base.insert(Atom::new(p, args));
    }

    let n_rules = rng.random_range(1..=10);
    let mut rules = Vec::new();
    for _ in 0..n_rules {
        let hi = rng.random_range(0..derived_preds.len());
        let (hp, ha) = &derived_preds[hi];
        // Positive literals may use any base predicate and derived d_j, j <= hi
        // (recursion allowed); negatives only strictly lower derived ones.
        let pos_pool: Vec<&(String, usize)> = base_preds.iter().chain(&derived_preds[..=hi]).collect();
        let neg_pool: Vec<&(String, usize)> = base_preds.iter().chain(&derived_preds[..hi]).collect();
        let term = |rng: &mut R| -> Term {
            match rng.random_range(0..10) {
                0 => c(pick(rng, &consts)),
                1 => Term::Anon,
                _ => Term::var(pick(rng, &VARS)),
            }
        };
        let mut body = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let (p, n) = (*pick(rng, &pos_pool)).clone();
            let args = (0..n).map(|_| term(rng)).collect();
            body.push(Literal::pos(Atom::new(&p, args)));
        }
        let bound: Vec<Symbol> = body
            .iter()
            .flat_map(|l: &Literal| l.atom.variables().cloned().collect::<Vec<_>>())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let bound_or_const = |rng: &mut R| -> Term {
            if bound.is_empty() || rng.random_range(0..5) == 0 {
                c(pick(rng, &consts))
            } else {
                Term::Var(pick(rng, &bound).clone())
            }
        };
        for _ in 0..rng.random_range(0..=2) {
            let (p, n) = (*pick(rng, &neg_pool)).clone();
            let args = (0..n)
                .map(|_| if rng.random_range(0..6) == 0 { Term::Anon } else { bound_or_const(rng) })
                .collect();
            body.push(Literal::neg(Atom::new(&p, args)));
        }
        let head_args = (0..*ha).map(|_| bound_or_const(rng)).collect();
        // Safety does not depend on literal order, so mix them up.
        body.shuffle(rng);
        rules.push(Rule {
            head: Atom::new(hp, head_args),
            body,
        });
    }
    (base, rules)
}

/// A random movement scenario on the rescue domain: a small road graph
/// with hazards and up to three resources.
pub struct PlanningCase {
    pub facts: Facts,
    pub goal: Vec<Literal>,
}

pub fn random_planning_case<R: Rng>(rng: &mut R) -> PlanningCase {
    let n_nodes = rng.random_range(2..=6);
    let nodes: Vec<String> = (0..n_nodes).map(|i| format!("n{i}")).collect();
    let mut facts = Facts::new();
    for n in &nodes {
        facts.insert(atom("node", &[n]));
    }
    let mut edges = Vec::new();
    for i in 0..n_nodes {
        for j in 0..n_nodes {
            if i < j && rng.random_bool(0.5) {
                let (a, b) = if rng.random_bool(0.5) { (i, j) } else { (j, i) };
                edges.push((nodes[a].clone(), nodes[b].clone()));
                facts.insert(atom("link", &[&nodes[a], &nodes[b]]));
            }
        }
    }
    for (a, b) in &edges {
        let (x, y) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        if rng.random_bool(0.2) {
            facts.insert(atom("fire", &[x, y]));
        }
        if rng.random_bool(0.2) {
            facts.insert(atom("police_block", &[x, y]));
        }
    }
    let n_agents = rng.random_range(1..=3);
    let mut agents = Vec::new();
    for i in 0..n_agents {
        let (kind, name, ty) = if rng.random_bool(0.5) {
            ("crane", format!("crane_{i}"), "big_crane")
        } else {
            ("truck", format!("truck_{i}"), "mid_truck")
        };
        facts.insert(atom(kind, &[&name, ty]));
        facts.insert(atom("at", &[&name, pick(rng, &nodes)]));
        agents.push(name);
    }
    let mut goal = Vec::new();
    for _ in 0..rng.random_range(1..=2) {
        let who = pick(rng, &agents).clone();
        let whr = pick(rng, &nodes).clone();
        goal.push(Literal::pos(atom("at", &[&who, &whr])));
    }
    if rng.random_bool(0.2) {
        // Existential goal: some resource reaches the node.
        goal = vec![Literal::pos(Atom::new("at", vec![Term::var("R"), c(pick(rng, &nodes))]))];
    }
    PlanningCase { facts, goal }
}
