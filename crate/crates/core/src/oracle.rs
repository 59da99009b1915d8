//! Exhaustive reference semantics for small ground programs.
//!
//! Every interpretation is a pair of bitmasks (atoms with `t` evidence,
//! atoms with `f` evidence), so a program over `n` atoms has `4^n`
//! interpretations. Useful as a test oracle only.

use crate::grounder::{GroundLit, GroundProgram, GroundRule};
use crate::lattice::TruthValue;
use crate::semantics::{canonical_order, Interpretation};

/// Largest atom count the oracle accepts.
pub const MAX_ATOMS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Every model.
    All,
    /// Stable models.
    Stable,
    /// Stable models not dominated under the preference levels.
    Preferred,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("oracle limited to {MAX_ATOMS} atoms, program has {0}")]
pub struct TooManyAtoms(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Masks {
    t: u32,
    f: u32,
}

impl Masks {
    fn top(self) -> u32 {
        self.t & self.f
    }

    fn has(self, atom: usize, v: TruthValue) -> bool {
        let bit = 1u32 << atom;
        let t = v.bits() & crate::lattice::T_BIT == 0 || self.t & bit != 0;
        let f = v.bits() & crate::lattice::F_BIT == 0 || self.f & bit != 0;
        t && f
    }

    fn lit(self, l: &GroundLit) -> bool {
        self.has(l.atom, l.ann) != l.neg
    }

    fn satisfies(self, r: &GroundRule) -> bool {
        !r.body.iter().all(|l| self.lit(l)) || r.head.iter().any(|(p, v)| self.has(*p, *v))
    }

    fn value(self, atom: usize) -> TruthValue {
        let bit = 1u32 << atom;
        match (self.t & bit != 0, self.f & bit != 0) {
            (false, false) => TruthValue::Bottom,
            (true, false) => TruthValue::True,
            (false, true) => TruthValue::False,
            (true, true) => TruthValue::Top,
        }
    }
}

fn is_stable(rules: &[GroundRule], m: Masks, n: usize) -> bool {
    let reduct: Vec<GroundRule> = rules
        .iter()
        .filter(|r| r.body.iter().all(|l| !l.neg || m.lit(l)))
        .map(|r| GroundRule::new(r.head.clone(), r.body.iter().filter(|l| !l.neg).copied().collect()))
        .collect();
    let joint = (m.t as u64) | ((m.f as u64) << n);
    let mut sub = joint;
    while sub != 0 {
        sub = (sub - 1) & joint;
        let cand = Masks {
            t: (sub & ((1u64 << n) - 1)) as u32,
            f: (sub >> n) as u32,
        };
        if reduct.iter().all(|r| cand.satisfies(r)) {
            return false;
        }
    }
    true
}

/// `a` strictly preferred to `b`.
fn dominates(a: Masks, b: Masks, levels: &[u32]) -> bool {
    for &l in levels {
        let (x, y) = (a.top() & l, b.top() & l);
        if x != y {
            return x & !y == 0;
        }
    }
    false
}

/// All models of `g` in the requested mode, canonically ordered.
pub fn enumerate(g: &GroundProgram, mode: OracleMode) -> Result<Vec<Interpretation>, TooManyAtoms> {
    let n = g.num_atoms();
    if n > MAX_ATOMS {
        return Err(TooManyAtoms(n));
    }
    let mut found = Vec::new();
    for t in 0u32..(1 << n) {
        for f in 0u32..(1 << n) {
            let m = Masks { t, f };
            if g.rules.iter().all(|r| m.satisfies(r)) {
                found.push(m);
            }
        }
    }
    if mode != OracleMode::All {
        found.retain(|m| is_stable(&g.rules, *m, n));
    }
    if mode == OracleMode::Preferred {
        let levels: Vec<u32> = if g.levels.is_empty() {
            vec![g.visible_atoms().fold(0, |acc, p| acc | 1 << p)]
        } else {
            g.levels
                .iter()
                .map(|l| l.atoms.iter().fold(0, |acc, p| acc | 1 << p))
                .collect()
        };
        let all = found.clone();
        found.retain(|m| !all.iter().any(|o| dominates(*o, *m, &levels)));
    }
    let mut out: Vec<Interpretation> = found
        .into_iter()
        .map(|m| Interpretation::from_pairs((0..n).map(|p| (g.atom(p).clone(), m.value(p)))))
        .collect();
    canonical_order(&mut out);
    Ok(out)
}

/// The models whose set of top atoms is minimal among `models`.
pub fn most_e_consistent(models: &[Interpretation]) -> Vec<Interpretation> {
    models
        .iter()
        .filter(|m| {
            let mine = m.top_set();
            !models.iter().any(|o| {
                let theirs = o.top_set();
                theirs.is_subset(&mine) && theirs != mine
            })
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground;
    use crate::parser::parse;

    fn run(src: &str, mode: OracleMode) -> Vec<String> {
        let g = ground(&parse(src).unwrap()).unwrap();
        enumerate(&g, mode).unwrap().iter().map(|m| m.to_string()).collect()
    }

    #[test]
    fn single_fact() {
        assert_eq!(run("p : t.", OracleMode::All), vec!["p : t\n", "p : top\n"]);
        assert_eq!(run("p : t.", OracleMode::Stable), vec!["p : t\n"]);
    }

    #[test]
    fn negation() {
        assert_eq!(run("q : t :- not p : t.", OracleMode::Stable), vec!["q : t\n"]);
        assert!(run("p : t :- not p : t.", OracleMode::Stable).is_empty());
    }

    #[test]
    fn preferred_and_e_consistent() {
        let src = "p : t ; q : t.\np : f.\nq : f.";
        assert_eq!(run(src, OracleMode::Preferred).len(), 2);
        let g = ground(&parse("p : t.\np : f :- not q : t.\nq : t :- not p : f.").unwrap()).unwrap();
        let st = enumerate(&g, OracleMode::Stable).unwrap();
        assert_eq!(st.len(), 2);
        let best = most_e_consistent(&st);
        assert_eq!(best.len(), 1);
        assert_eq!(best[0].to_string(), "p : t\nq : t\n");
    }

    #[test]
    fn rejects_large_programs() {
        let src: String = (0..13).map(|i| format!("p{i} : t.\n")).collect();
        let g = ground(&parse(&src).unwrap()).unwrap();
        assert_eq!(enumerate(&g, OracleMode::All), Err(TooManyAtoms(13)));
    }
}
