//! Interpretations, satisfaction and the consistency orderings.
//!
//! An [`Interpretation`] is a total map from ground predicate terms to
//! `FOUR` that reads `bottom` for every atom it does not mention. Its
//! closed-set view, the set of all `p : s` with `s <= I(p)`, is available
//! through [`Interpretation::atom_set`] and [`Interpretation::from_closed_set`].
//!
//! ```
//! use apclp::ast::PredicateTerm;
//! use apclp::lattice::TruthValue;
//! use apclp::semantics::{Interpretation, QueryFormula};
//!
//! let p = PredicateTerm::ground("p", &[]);
//! let i = Interpretation::from_pairs([(p.clone(), TruthValue::Top)]);
//! let q = QueryFormula::atom(p, TruthValue::True);
//! assert!(i.satisfies(&q));
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::{AnnotatedAtom, PredicateTerm, Signature};
use crate::grounder::{AtomId, GroundLit, GroundProgram, GroundRule};
use crate::lattice::TruthValue;

/// Values indexed by the atom ids of a [`GroundProgram`].
pub type Assignment = Vec<TruthValue>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Interpretation {
    map: BTreeMap<PredicateTerm, TruthValue>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (PredicateTerm, TruthValue)>) -> Self {
        let mut i = Interpretation::new();
        for (p, v) in pairs {
            i.join(p, v);
        }
        i
    }

    /// Reads a solver assignment, keeping every atom including auxiliaries.
    pub fn from_assignment(g: &GroundProgram, a: &[TruthValue]) -> Self {
        Interpretation::from_pairs(
            a.iter()
                .enumerate()
                .filter(|(_, v)| **v != TruthValue::Bottom)
                .map(|(id, v)| (g.atom(id).clone(), *v)),
        )
    }

    /// The assignment over `g`'s atoms; atoms unknown to `g` are ignored.
    pub fn to_assignment(&self, g: &GroundProgram) -> Assignment {
        let mut a = vec![TruthValue::Bottom; g.num_atoms()];
        for (p, v) in &self.map {
            if let Some(id) = g.atom_id(p) {
                a[id] = *v;
            }
        }
        a
    }

    pub fn get(&self, p: &PredicateTerm) -> TruthValue {
        self.map.get(p).copied().unwrap_or_default()
    }

    pub fn set(&mut self, p: PredicateTerm, v: TruthValue) {
        if v == TruthValue::Bottom {
            self.map.remove(&p);
        } else {
            self.map.insert(p, v);
        }
    }

    /// Raises `p` to `lub(I(p), v)`.
    pub fn join(&mut self, p: PredicateTerm, v: TruthValue) {
        let cur = self.get(&p);
        self.set(p, cur.lub(v));
    }

    /// Non-bottom entries in term order.
    pub fn iter(&self) -> impl Iterator<Item = (&PredicateTerm, TruthValue)> {
        self.map.iter().map(|(p, v)| (p, *v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Atoms assigned `top`.
    pub fn top_set(&self) -> BTreeSet<&PredicateTerm> {
        self.iter()
            .filter(|(_, v)| *v == TruthValue::Top)
            .map(|(p, _)| p)
            .collect()
    }

    /// Drops grounder auxiliaries (symbols starting with `_`).
    pub fn without_aux(&self) -> Interpretation {
        Interpretation {
            map: self
                .map
                .iter()
                .filter(|(p, _)| !p.symbol.starts_with('_'))
                .map(|(p, v)| (p.clone(), *v))
                .collect(),
        }
    }

    /// Pointwise lattice order.
    pub fn leq(&self, other: &Interpretation) -> bool {
        self.iter().all(|(p, v)| v.leq(other.get(p)))
    }

    /// The closed-set view over `atoms`: every `p : s` with `s <= I(p)`.
    pub fn atom_set(&self, atoms: &[PredicateTerm]) -> BTreeSet<AnnotatedAtom> {
        atoms
            .iter()
            .flat_map(|p| {
                self.get(p)
                    .downset()
                    .map(move |s| AnnotatedAtom::new(p.clone(), s))
            })
            .collect()
    }

    /// Inverse of [`Interpretation::atom_set`]. Fails unless the set is
    /// downward closed and closed under `lub` for every atom it mentions.
    pub fn from_closed_set(set: &BTreeSet<AnnotatedAtom>) -> Result<Interpretation, String> {
        let mut i = Interpretation::new();
        for a in set {
            i.join(a.pred.clone(), a.ann);
        }
        for a in set {
            for s in i.get(&a.pred).downset() {
                if !set.contains(&AnnotatedAtom::new(a.pred.clone(), s)) {
                    return Err(format!("set is not closed: {} missing", AnnotatedAtom::new(a.pred.clone(), s)));
                }
            }
        }
        Ok(i)
    }

    /// Keeps the `t`/`top` atoms of the given predicates and every `top` atom.
    pub fn project(&self, projection: &Projection) -> Interpretation {
        Interpretation {
            map: self
                .map
                .iter()
                .filter(|(p, v)| {
                    !p.symbol.starts_with('_')
                        && (**v == TruthValue::Top
                            || (**v == TruthValue::True && projection.matches(p)))
                })
                .map(|(p, v)| (p.clone(), *v))
                .collect(),
        }
    }

    pub fn satisfies(&self, f: &QueryFormula) -> bool {
        f.disjuncts
            .iter()
            .any(|conj| conj.iter().all(|a| a.ann.leq(self.get(&a.pred))))
    }

    /// Rendered atom text to value, skipping auxiliaries.
    pub fn to_json_map(&self) -> BTreeMap<String, String> {
        self.visible_sorted()
            .into_iter()
            .map(|(p, v)| (p, v.name().to_string()))
            .collect()
    }

    fn visible_sorted(&self) -> Vec<(String, TruthValue)> {
        let mut v: Vec<(String, TruthValue)> = self
            .iter()
            .filter(|(p, _)| !p.symbol.starts_with('_'))
            .map(|(p, v)| (p.to_string(), v))
            .collect();
        v.sort();
        v
    }

    /// One `p : v` line per atom of `atoms`, bottoms included.
    pub fn render_with_bottom(&self, atoms: &[PredicateTerm]) -> String {
        let mut lines: Vec<String> = atoms
            .iter()
            .filter(|p| !p.symbol.starts_with('_'))
            .map(|p| format!("{p} : {}", self.get(p)))
            .collect();
        lines.sort();
        lines.dedup();
        lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// One `p : v` per line, sorted by rendered term, bottoms and auxiliaries
/// omitted.
impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, v) in self.visible_sorted() {
            writeln!(f, "{p} : {v}")?;
        }
        Ok(())
    }
}

/// Sorts models by canonical text and removes duplicates.
pub fn canonical_order(models: &mut Vec<Interpretation>) {
    let mut keyed: Vec<(String, Interpretation)> =
        models.drain(..).map(|m| (m.to_string(), m)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    models.extend(keyed.into_iter().map(|(_, m)| m));
}

/// Predicates shown by a projection, as `name` or `name/arity`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Projection {
    pub predicates: Vec<(String, Option<usize>)>,
}

impl Projection {
    pub fn parse(spec: &str) -> Result<Projection, String> {
        let mut predicates = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.split_once('/') {
                Some((n, a)) => {
                    let arity = a.parse().map_err(|_| format!("bad arity in `{part}`"))?;
                    predicates.push((n.to_string(), Some(arity)));
                }
                None => predicates.push((part.to_string(), None)),
            }
        }
        Ok(Projection { predicates })
    }

    pub fn of(sigs: &[Signature]) -> Projection {
        Projection {
            predicates: sigs.iter().map(|s| (s.name.clone(), Some(s.arity))).collect(),
        }
    }

    pub fn matches(&self, p: &PredicateTerm) -> bool {
        self.predicates
            .iter()
            .any(|(n, a)| *n == p.symbol && a.map_or(true, |a| a == p.arity()))
    }
}

/// A ground formula: a disjunction of conjunctions of annotated atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryFormula {
    pub disjuncts: Vec<Vec<AnnotatedAtom>>,
}

impl QueryFormula {
    pub fn atom(p: PredicateTerm, v: TruthValue) -> Self {
        QueryFormula {
            disjuncts: vec![vec![AnnotatedAtom::new(p, v)]],
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &AnnotatedAtom> {
        self.disjuncts.iter().flatten()
    }

    /// Fails on atoms that are not ground or not registered in `g`.
    pub fn check(&self, g: &GroundProgram) -> Result<(), String> {
        for a in self.atoms() {
            if !a.pred.is_ground() {
                return Err(format!("query atom {} is not ground", a.pred));
            }
            if g.atom_id(&a.pred).is_none() {
                return Err(format!("query atom {} is not an atom of the program", a.pred));
            }
        }
        Ok(())
    }
}

impl fmt::Display for QueryFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .disjuncts
            .iter()
            .map(|c| c.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        f.write_str(&parts.join(" ; "))
    }
}

/// Whether a ground literal holds under `a`.
#[inline]
pub fn lit_holds(l: &GroundLit, a: &[TruthValue]) -> bool {
    l.ann.leq(a[l.atom]) != l.neg
}

pub fn body_holds(r: &GroundRule, a: &[TruthValue]) -> bool {
    r.body.iter().all(|l| lit_holds(l, a))
}

pub fn head_holds(r: &GroundRule, a: &[TruthValue]) -> bool {
    r.head.iter().any(|(p, s)| s.leq(a[*p]))
}

pub fn rule_holds(r: &GroundRule, a: &[TruthValue]) -> bool {
    !body_holds(r, a) || head_holds(r, a)
}

/// Whether `a` satisfies every rule and constraint of `rules`.
pub fn is_model_assignment(rules: &[GroundRule], a: &[TruthValue]) -> bool {
    rules.iter().all(|r| rule_holds(r, a))
}

pub fn is_model(i: &Interpretation, g: &GroundProgram) -> bool {
    is_model_assignment(&g.rules, &i.to_assignment(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EConsistency {
    MoreOrEqual,
    NotMoreOrEqual,
}

/// `MoreOrEqual` iff the top atoms of `i1` are among those of `i2`.
pub fn compare_e_consistency(i1: &Interpretation, i2: &Interpretation) -> EConsistency {
    if i1.top_set().is_subset(&i2.top_set()) {
        EConsistency::MoreOrEqual
    } else {
        EConsistency::NotMoreOrEqual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Ground preference levels as atom sets, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PreferenceLevels {
    pub levels: Vec<BTreeSet<PredicateTerm>>,
}

impl PreferenceLevels {
    pub fn from_ground(g: &GroundProgram) -> Self {
        PreferenceLevels {
            levels: g
                .levels
                .iter()
                .map(|l| l.atoms.iter().map(|a| g.atom(*a).clone()).collect())
                .collect(),
        }
    }
}

/// Lexicographic comparison of top atoms per level. `Less` means `i1` is
/// strictly preferred.
pub fn compare_preference(
    i1: &Interpretation,
    i2: &Interpretation,
    s: &PreferenceLevels,
) -> PrefOrder {
    let t1 = i1.top_set();
    let t2 = i2.top_set();
    for level in &s.levels {
        let a: BTreeSet<&PredicateTerm> = t1.iter().copied().filter(|p| level.contains(*p)).collect();
        let b: BTreeSet<&PredicateTerm> = t2.iter().copied().filter(|p| level.contains(*p)).collect();
        if a == b {
            continue;
        }
        return if a.is_subset(&b) {
            PrefOrder::Less
        } else if b.is_subset(&a) {
            PrefOrder::Greater
        } else {
            PrefOrder::Incomparable
        };
    }
    PrefOrder::Equal
}

/// Id-level form of [`compare_preference`] over solver assignments.
pub fn compare_preference_ids(a1: &[TruthValue], a2: &[TruthValue], levels: &[Vec<AtomId>]) -> PrefOrder {
    for level in levels {
        let (mut sub, mut sup) = (true, true);
        for &p in level {
            let x = a1[p] == TruthValue::Top;
            let y = a2[p] == TruthValue::Top;
            if x && !y {
                sub = false;
            }
            if y && !x {
                sup = false;
            }
        }
        match (sub, sup) {
            (true, true) => continue,
            (true, false) => return PrefOrder::Less,
            (false, true) => return PrefOrder::Greater,
            (false, false) => return PrefOrder::Incomparable,
        }
    }
    PrefOrder::Equal
}

/// Keeps the models not strictly dominated by another model in the list.
pub fn filter_preferred(models: &[Interpretation], s: &PreferenceLevels) -> Vec<Interpretation> {
    models
        .iter()
        .filter(|m| {
            !models
                .iter()
                .any(|o| compare_preference(o, m, s) == PrefOrder::Less)
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TruthValue::*;

    fn p(name: &str) -> PredicateTerm {
        PredicateTerm::ground(name, &[])
    }

    fn interp(pairs: &[(&str, TruthValue)]) -> Interpretation {
        Interpretation::from_pairs(pairs.iter().map(|(n, v)| (p(n), *v)))
    }

    #[test]
    fn satisfaction() {
        assert!(interp(&[("p", Top)]).satisfies(&QueryFormula::atom(p("p"), True)));
        assert!(interp(&[]).satisfies(&QueryFormula::atom(p("p"), Bottom)));
        assert!(!interp(&[("p", False)]).satisfies(&QueryFormula::atom(p("p"), True)));
    }

    #[test]
    fn e_consistency() {
        let a = interp(&[("p", True), ("q", True)]);
        let b = interp(&[("p", Top)]);
        assert_eq!(compare_e_consistency(&a, &b), EConsistency::MoreOrEqual);
        assert_eq!(compare_e_consistency(&a, &a), EConsistency::MoreOrEqual);
        assert_eq!(
            compare_e_consistency(&interp(&[("p", Top)]), &interp(&[("p", True)])),
            EConsistency::NotMoreOrEqual
        );
    }

    #[test]
    fn preference() {
        let m1 = interp(&[("person", Top), ("businessman", True)]);
        let m2 = interp(&[("person", True), ("businessman", Top)]);
        let all: BTreeSet<PredicateTerm> = [p("person"), p("businessman")].into_iter().collect();
        let s = PreferenceLevels {
            levels: vec![[p("person")].into_iter().collect(), all.clone()],
        };
        assert_eq!(compare_preference(&m2, &m1, &s), PrefOrder::Less);
        assert_eq!(compare_preference(&m1, &m2, &s), PrefOrder::Greater);
        assert_eq!(compare_preference(&m1, &m1, &s), PrefOrder::Equal);
        let only = PreferenceLevels { levels: vec![all] };
        assert_eq!(compare_preference(&m1, &m2, &only), PrefOrder::Incomparable);
    }

    #[test]
    fn closed_set_view() {
        let atoms = [p("p"), p("q")];
        let i = interp(&[("p", Top)]);
        let set = i.atom_set(&atoms);
        assert_eq!(set.len(), 5);
        assert_eq!(Interpretation::from_closed_set(&set).unwrap(), i);
        let mut broken = set.clone();
        broken.remove(&AnnotatedAtom::new(p("p"), True));
        assert!(Interpretation::from_closed_set(&broken).is_err());
    }

    #[test]
    fn display_sorted_by_text() {
        let i = Interpretation::from_pairs([
            (PredicateTerm::ground("pos", &["10"]), True),
            (PredicateTerm::ground("pos", &["9"]), Top),
            (PredicateTerm::ground("_choice", &["x"]), True),
        ]);
        assert_eq!(i.to_string(), "pos(10) : t\npos(9) : top\n");
    }

    #[test]
    fn projection() {
        let i = interp(&[("hold", True), ("other", True), ("x", Top), ("neg", False)]);
        let pr = Projection::parse("hold,neg").unwrap();
        assert_eq!(i.project(&pr).to_string(), "hold : t\nx : top\n");
    }
}
