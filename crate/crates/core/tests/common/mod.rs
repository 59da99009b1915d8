#![allow(dead_code)]

use std::collections::BTreeSet;

use apclp::ast::{AnnotatedAtom, BodyLiteral, PredicateTerm, Rule, Term};
use apclp::grounder::{ground, GroundProgram};
use apclp::lattice::TruthValue;
use apclp::parser::parse;
use apclp::semantics::Interpretation;
use proptest::prelude::*;

pub const ANNS: [&str; 4] = ["bottom", "t", "f", "top"];

/// A random propositional program over atoms `p0..p{n-1}`.
#[derive(Debug, Clone)]
pub struct RandProgram {
    pub atoms: usize,
    /// (head disjuncts, body literals); annotations index [`ANNS`].
    pub rules: Vec<(Vec<(usize, usize)>, Vec<(bool, usize, usize)>)>,
    /// Preference levels over atoms, most significant first.
    pub levels: Vec<Vec<usize>>,
}

impl RandProgram {
    pub fn source(&self) -> String {
        let mut s = String::new();
        for (head, body) in &self.rules {
            let h: Vec<String> = head.iter().map(|(a, v)| format!("p{a} : {}", ANNS[*v])).collect();
            let b: Vec<String> = body
                .iter()
                .map(|(neg, a, v)| format!("{}p{a} : {}", if *neg { "not " } else { "" }, ANNS[*v]))
                .collect();
            s.push_str(&h.join(" ; "));
            if !b.is_empty() {
                if !h.is_empty() {
                    s.push(' ');
                }
                s.push_str(":- ");
                s.push_str(&b.join(", "));
            }
            s.push_str(".\n");
        }
        let used = self.used_atoms();
        let mut names = Vec::new();
        for (i, level) in self.levels.iter().enumerate() {
            let members: Vec<String> = level
                .iter()
                .filter(|a| used.contains(a))
                .map(|a| format!("p{a} : top"))
                .collect();
            if members.is_empty() {
                continue;
            }
            s.push_str(&format!("#pref s{i} subset {{ {} }}.\n", members.join(", ")));
            names.push(format!("s{i}"));
        }
        if !names.is_empty() {
            s.push_str(&format!("#lexico ({}).\n", names.join(", ")));
        }
        s
    }

    pub fn used_atoms(&self) -> BTreeSet<usize> {
        let mut used = BTreeSet::new();
        for (h, b) in &self.rules {
            used.extend(h.iter().map(|(a, _)| *a));
            used.extend(b.iter().map(|(_, a, _)| *a));
        }
        used
    }

    pub fn ground(&self) -> GroundProgram {
        let p = parse(&self.source()).unwrap_or_else(|e| panic!("{e:?}\n{}", self.source()));
        ground(&p).unwrap_or_else(|e| panic!("{e}\n{}", self.source()))
    }
}

fn head_ann() -> impl Strategy<Value = usize> {
    prop_oneof![1 => Just(0usize), 4 => Just(1usize), 4 => Just(2usize), 2 => Just(3usize)]
}

fn rule(atoms: usize) -> impl Strategy<Value = (Vec<(usize, usize)>, Vec<(bool, usize, usize)>)> {
    (
        prop::collection::vec((0..atoms, head_ann()), 0..=2),
        prop::collection::vec((prop::bool::weighted(0.35), 0..atoms, 0..4usize), 0..=3),
    )
        .prop_filter("constraint needs a body", |(h, b)| !h.is_empty() || !b.is_empty())
}

/// Programs with up to `max_atoms` atoms and up to `max_rules` rules, with
/// `levels` preference levels (0..=levels).
pub fn rand_program(max_atoms: usize, max_rules: usize, levels: usize) -> impl Strategy<Value = RandProgram> {
    (1..=max_atoms).prop_flat_map(move |n| {
        (
            prop::collection::vec(rule(n), 1..=max_rules),
            prop::collection::vec(prop::collection::vec(0..n, 1..=n), 0..=levels),
        )
            .prop_map(move |(rules, levels)| RandProgram { atoms: n, rules, levels })
    })
}

pub fn value() -> impl Strategy<Value = TruthValue> {
    prop::sample::select(TruthValue::ALL.to_vec())
}

fn small_term(depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c", "7", "null"]).prop_map(Term::constant),
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
    ];
    if depth == 0 {
        return leaf.boxed();
    }
    prop_oneof![
        3 => leaf,
        1 => (prop::sample::select(vec!["f", "g"]), prop::collection::vec(small_term(depth - 1), 1..=2))
            .prop_map(|(f, args)| Term::compound(f, args)),
    ]
    .boxed()
}

pub fn pred_term() -> impl Strategy<Value = PredicateTerm> {
    (
        prop::sample::select(vec!["p", "q", "hold", "r"]),
        prop::collection::vec(small_term(1), 0..=2),
    )
        .prop_map(|(s, args)| PredicateTerm::new(s, args))
}

pub fn annotated_atom() -> impl Strategy<Value = AnnotatedAtom> {
    (pred_term(), value()).prop_map(|(p, v)| AnnotatedAtom::new(p, v))
}

/// Non-ground rules with arbitrary (possibly unsafe) variables.
pub fn ast_rule() -> impl Strategy<Value = Rule> {
    (
        prop::collection::vec(annotated_atom(), 0..=2),
        prop::collection::vec((any::<bool>(), annotated_atom()), 0..=3),
    )
        .prop_map(|(head, body)| {
            let body = body
                .into_iter()
                .map(|(neg, a)| if neg { BodyLiteral::neg(a) } else { BodyLiteral::pos(a) })
                .collect();
            Rule::new(head, body)
        })
}

/// Ground atoms `q0..q{n-1}` plus some compound ones.
pub fn atom_universe() -> Vec<PredicateTerm> {
    let mut v: Vec<PredicateTerm> = (0..4).map(|i| PredicateTerm::ground(&format!("q{i}"), &[])).collect();
    v.push(PredicateTerm::ground("hold", &["pete", "chef"]));
    v.push(PredicateTerm::new("r", vec![Term::compound("f", vec![Term::constant("a")])]));
    v
}

/// Interpretations over [`atom_universe`].
pub fn interpretation() -> impl Strategy<Value = Interpretation> {
    let atoms = atom_universe();
    prop::collection::vec(value(), atoms.len())
        .prop_map(move |vals| Interpretation::from_pairs(atoms.iter().cloned().zip(vals)))
}

/// Canonical text of each model.
pub fn texts(models: &[Interpretation]) -> Vec<String> {
    let mut v: Vec<String> = models.iter().map(|m| m.to_string()).collect();
    v.sort();
    v
}
