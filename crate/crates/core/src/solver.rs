//! Stable and consistency-preferred stable models.
//!
//! Candidates come from a SAT encoding of the ground program: two evidence
//! variables per atom (`t` and `f`), rule clauses, and a support clause for
//! every evidence bit. Each candidate is checked for minimality against its
//! reduct with a second, small SAT call. A failed check yields an unfounded
//! set of bits whose loop formula is added to the main encoding, so the
//! candidate never comes back.
//!
//! Preferred models are found by iterated improvement: starting from any
//! stable model, ask for a strictly preferred one until none exists, record
//! the optimum, and exclude everything it dominates.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use crate::grounder::{AtomId, GroundLit, GroundProgram, GroundRule};
use crate::lattice::{TruthValue, F_BIT, T_BIT};
use crate::sat::{Lit, Solver, Var};
use crate::semantics::{
    canonical_order, filter_preferred, is_model, Interpretation, PreferenceLevels, QueryFormula,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub ground_rules: usize,
    pub candidates_explored: u64,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// Models in canonical order; auxiliary atoms included.
    pub models: Vec<Interpretation>,
    pub stats: SolveStats,
    pub truncated: bool,
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub limit: Option<usize>,
    pub timeout: Option<Duration>,
}

impl SolveOptions {
    pub fn limit(n: usize) -> Self {
        SolveOptions {
            limit: Some(n),
            timeout: None,
        }
    }
}

/// Which models an entailment query ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    PreferredStable,
    AllStable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entailment {
    pub holds: bool,
    /// Set when there are no models, making the entailment vacuous.
    pub vacuous: bool,
    pub counterexample: Option<Interpretation>,
}

/// The reduct of `g` by `m`: rules with a satisfied `not` literal are
/// dropped and the remaining `not` literals deleted.
pub fn reduct(g: &GroundProgram, m: &Interpretation) -> GroundProgram {
    let a = m.to_assignment(g);
    let mut out = g.clone();
    out.rules = reduct_rules(&g.rules, &a);
    out
}

fn reduct_rules(rules: &[GroundRule], a: &[TruthValue]) -> Vec<GroundRule> {
    rules
        .iter()
        .filter(|r| r.body.iter().all(|l| !l.neg || !l.ann.leq(a[l.atom])))
        .map(|r| GroundRule::new(r.head.clone(), r.body.iter().filter(|l| !l.neg).copied().collect()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("interpretation is not a model of the program")]
    NotAModel,
    #[error("program contains ontological negation")]
    NotNegationFree,
}

/// Whether a model `m` of the negation-free program `g` is minimal.
pub fn is_minimal_model(m: &Interpretation, g: &GroundProgram) -> Result<bool, SolverError> {
    if g.rules.iter().any(|r| r.body.iter().any(|l| l.neg)) {
        return Err(SolverError::NotNegationFree);
    }
    if !is_model(m, g) {
        return Err(SolverError::NotAModel);
    }
    let bits: Vec<u8> = m.to_assignment(g).iter().map(|v| v.bits()).collect();
    Ok(smaller_model(&simplify(&g.rules, g.num_atoms()).0, &bits).is_none())
}

// ---------------------------------------------------------------------------
// Simplification

/// Drops trivially satisfied rules and literals, then removes evidence bits
/// that no rule can derive. Returns the rules and the possible bits per atom.
fn simplify(rules: &[GroundRule], n: usize) -> (Vec<GroundRule>, Vec<u8>) {
    let mut rs: Vec<GroundRule> = rules
        .iter()
        .filter(|r| {
            !r.head.iter().any(|(_, s)| *s == TruthValue::Bottom)
                && !r.body.iter().any(|l| l.neg && l.ann == TruthValue::Bottom)
        })
        .map(|r| {
            GroundRule::new(
                r.head.clone(),
                r.body
                    .iter()
                    .filter(|l| l.neg || l.ann != TruthValue::Bottom)
                    .copied()
                    .collect(),
            )
        })
        .collect();

    let mut possible = vec![0u8; n];
    loop {
        let mut changed = false;
        for r in &rs {
            if r.body
                .iter()
                .all(|l| l.neg || possible[l.atom] & l.ann.bits() == l.ann.bits())
            {
                for (p, s) in &r.head {
                    if possible[*p] & s.bits() != s.bits() {
                        possible[*p] |= s.bits();
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    rs.retain(|r| {
        r.body
            .iter()
            .all(|l| l.neg || possible[l.atom] & l.ann.bits() == l.ann.bits())
    });
    for r in &mut rs {
        r.body
            .retain(|l| !l.neg || possible[l.atom] & l.ann.bits() == l.ann.bits());
        r.head
            .retain(|(p, s)| possible[*p] & s.bits() == s.bits());
    }
    (rs, possible)
}

// ---------------------------------------------------------------------------
// Minimality

/// A model of the reduct of `rules` by `m` strictly below `m`, as bits.
fn smaller_model(rules: &[GroundRule], m: &[u8]) -> Option<Vec<u8>> {
    let mut s = Solver::new();
    let mut var: HashMap<(AtomId, u8), Var> = HashMap::new();
    let mut all = Vec::new();
    for (p, &bits) in m.iter().enumerate() {
        for b in [T_BIT, F_BIT] {
            if bits & b != 0 {
                let v = s.new_var();
                var.insert((p, b), v);
                all.push(Lit::neg(v));
            }
        }
    }
    if all.is_empty() {
        return None;
    }
    let mut top_aux: HashMap<AtomId, Var> = HashMap::new();
    for r in rules {
        if r.head.is_empty() {
            continue;
        }
        let mut clause = Vec::new();
        let mut skip = false;
        for l in &r.body {
            let need = l.ann.bits();
            if l.neg {
                if m[l.atom] & need == need {
                    skip = true;
                    break;
                }
                continue;
            }
            if m[l.atom] & need != need {
                skip = true;
                break;
            }
            for b in [T_BIT, F_BIT] {
                if need & b != 0 {
                    clause.push(Lit::neg(var[&(l.atom, b)]));
                }
            }
        }
        if skip {
            continue;
        }
        for (p, sv) in &r.head {
            let need = sv.bits();
            if m[*p] & need != need {
                continue;
            }
            match *sv {
                TruthValue::True => clause.push(Lit::pos(var[&(*p, T_BIT)])),
                TruthValue::False => clause.push(Lit::pos(var[&(*p, F_BIT)])),
                TruthValue::Top => {
                    let y = *top_aux.entry(*p).or_insert_with(|| {
                        let y = s.new_var();
                        s.add_clause(&[Lit::neg(y), Lit::pos(var[&(*p, T_BIT)])]);
                        s.add_clause(&[Lit::neg(y), Lit::pos(var[&(*p, F_BIT)])]);
                        y
                    });
                    clause.push(Lit::pos(y));
                }
                TruthValue::Bottom => unreachable!("removed by simplify"),
            }
        }
        s.add_clause(&clause);
    }
    s.add_clause(&all);
    if !s.solve() {
        return None;
    }
    let mut n = vec![0u8; m.len()];
    for (&(p, b), &v) in &var {
        if s.value(v) {
            n[p] |= b;
        }
    }
    Some(n)
}

// ---------------------------------------------------------------------------
// Main encoding

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cst {
    True,
    False,
    Lit(Lit),
}

impl std::ops::Not for Cst {
    type Output = Cst;
    fn not(self) -> Cst {
        match self {
            Cst::True => Cst::False,
            Cst::False => Cst::True,
            Cst::Lit(l) => Cst::Lit(!l),
        }
    }
}

struct Encoder<'g> {
    g: &'g GroundProgram,
    rules: Vec<GroundRule>,
    sat: Solver,
    tvar: Vec<Option<Var>>,
    fvar: Vec<Option<Var>>,
    xvar: Vec<Option<Var>>,
    beta: Vec<Cst>,
    /// Rules with a head disjunct on each atom.
    head_rules: Vec<Vec<usize>>,
    levels: Vec<Vec<AtomId>>,
    explored: u64,
}

fn bit_set(v: &[u8], p: AtomId, b: u8) -> bool {
    v[p] & b != 0
}

impl<'g> Encoder<'g> {
    fn new(g: &'g GroundProgram) -> Self {
        let n = g.num_atoms();
        let (rules, possible) = simplify(&g.rules, n);
        let mut sat = Solver::new();
        let mut tvar = vec![None; n];
        let mut fvar = vec![None; n];
        let mut xvar = vec![None; n];
        for p in 0..n {
            if possible[p] & T_BIT != 0 {
                tvar[p] = Some(sat.new_var());
            }
            if possible[p] & F_BIT != 0 {
                fvar[p] = Some(sat.new_var());
            }
            if let (Some(t), Some(f)) = (tvar[p], fvar[p]) {
                let x = sat.new_var();
                sat.add_clause(&[Lit::neg(x), Lit::pos(t)]);
                sat.add_clause(&[Lit::neg(x), Lit::pos(f)]);
                sat.add_clause(&[Lit::pos(x), Lit::neg(t), Lit::neg(f)]);
                xvar[p] = Some(x);
            }
        }
        let mut head_rules = vec![Vec::new(); n];
        for (i, r) in rules.iter().enumerate() {
            for (p, _) in &r.head {
                if head_rules[*p].last() != Some(&i) {
                    head_rules[*p].push(i);
                }
            }
        }
        let levels = if g.levels.is_empty() {
            vec![g.visible_atoms().collect()]
        } else {
            g.levels.iter().map(|l| l.atoms.clone()).collect()
        };
        let mut e = Encoder {
            g,
            rules,
            sat,
            tvar,
            fvar,
            xvar,
            beta: Vec::new(),
            head_rules,
            levels,
            explored: 0,
        };
        e.encode();
        e
    }

    fn holds(&self, p: AtomId, s: TruthValue) -> Cst {
        let v = match s {
            TruthValue::Bottom => return Cst::True,
            TruthValue::True => self.tvar[p],
            TruthValue::False => self.fvar[p],
            TruthValue::Top => self.xvar[p],
        };
        v.map_or(Cst::False, |v| Cst::Lit(Lit::pos(v)))
    }

    fn bit_var(&self, p: AtomId, b: u8) -> Option<Var> {
        if b == T_BIT {
            self.tvar[p]
        } else {
            self.fvar[p]
        }
    }

    fn lit_cst(&self, l: &GroundLit) -> Cst {
        let h = self.holds(l.atom, l.ann);
        if l.neg {
            !h
        } else {
            h
        }
    }

    /// Adds a clause over constants and literals.
    fn clause(&mut self, items: &[Cst]) {
        let mut lits = Vec::with_capacity(items.len());
        for c in items {
            match c {
                Cst::True => return,
                Cst::False => {}
                Cst::Lit(l) => lits.push(*l),
            }
        }
        self.sat.add_clause(&lits);
    }

    /// A literal equivalent to the conjunction of `items`.
    fn and(&mut self, items: &[Cst]) -> Cst {
        let mut lits = Vec::new();
        for c in items {
            match c {
                Cst::False => return Cst::False,
                Cst::True => {}
                Cst::Lit(l) => lits.push(*l),
            }
        }
        match lits.len() {
            0 => Cst::True,
            1 => Cst::Lit(lits[0]),
            _ => {
                let b = self.sat.new_var();
                let mut long = vec![Lit::pos(b)];
                for &l in &lits {
                    self.sat.add_clause(&[Lit::neg(b), l]);
                    long.push(!l);
                }
                self.sat.add_clause(&long);
                Cst::Lit(Lit::pos(b))
            }
        }
    }

    /// A literal implying `guard` and the falsity of every item in `off`.
    fn witness(&mut self, guard: Cst, off: &[Cst]) -> Cst {
        if guard == Cst::False || off.contains(&Cst::True) {
            return Cst::False;
        }
        let off: Vec<Lit> = off
            .iter()
            .filter_map(|c| match c {
                Cst::Lit(l) => Some(*l),
                _ => None,
            })
            .collect();
        if off.is_empty() {
            return guard;
        }
        let w = self.sat.new_var();
        if let Cst::Lit(g) = guard {
            self.sat.add_clause(&[Lit::neg(w), g]);
        }
        for l in off {
            self.sat.add_clause(&[Lit::neg(w), !l]);
        }
        Cst::Lit(Lit::pos(w))
    }

    fn body_bits(r: &GroundRule, p: AtomId) -> u8 {
        r.body
            .iter()
            .filter(|l| !l.neg && l.atom == p)
            .fold(0, |acc, l| acc | l.ann.bits())
    }

    fn encode(&mut self) {
        let rules = std::mem::take(&mut self.rules);
        let mut beta = Vec::with_capacity(rules.len());
        for r in &rules {
            let lits: Vec<Cst> = r.body.iter().map(|l| self.lit_cst(l)).collect();
            let b = self.and(&lits);
            let mut clause = vec![!b];
            clause.extend(r.head.iter().map(|(p, s)| self.holds(*p, *s)));
            self.clause(&clause);
            beta.push(b);
        }
        self.beta = beta;

        // Support: a true bit needs a rule deriving it with everything else false.
        for p in 0..self.g.num_atoms() {
            for b in [T_BIT, F_BIT] {
                let Some(v) = self.bit_var(p, b) else { continue };
                let mut clause = vec![Cst::Lit(Lit::neg(v))];
                for &ri in &self.head_rules[p].clone() {
                    let r = &rules[ri];
                    if !r.head.iter().any(|(q, s)| *q == p && s.bits() & b != 0) {
                        continue;
                    }
                    if Self::body_bits(r, p) & b != 0 {
                        continue;
                    }
                    let off: Vec<Cst> = r
                        .head
                        .iter()
                        .filter(|(q, s)| !(*q == p && s.bits() & b != 0))
                        .map(|(q, s)| self.holds(*q, *s))
                        .collect();
                    let w = self.witness(self.beta[ri], &off);
                    clause.push(w);
                }
                self.clause(&clause);
            }
        }
        self.rules = rules;
    }

    fn current_bits(&self) -> Vec<u8> {
        (0..self.g.num_atoms())
            .map(|p| {
                let mut bits = 0;
                if self.tvar[p].is_some_and(|v| self.sat.value(v)) {
                    bits |= T_BIT;
                }
                if self.fvar[p].is_some_and(|v| self.sat.value(v)) {
                    bits |= F_BIT;
                }
                bits
            })
            .collect()
    }

    /// Adds the loop formula of the unfounded bits `u`.
    fn add_loop_formula(&mut self, u: &[(AtomId, u8)]) {
        let in_u = |p: AtomId, bits: u8| u.iter().any(|&(q, b)| q == p && bits & b != 0);
        let mut cand: BTreeSet<usize> = BTreeSet::new();
        for &(p, _) in u {
            cand.extend(self.head_rules[p].iter().copied());
        }
        let mut ext = Vec::new();
        for ri in cand {
            let r = &self.rules[ri];
            if !r.head.iter().any(|(p, s)| in_u(*p, s.bits())) {
                continue;
            }
            if r.body.iter().any(|l| !l.neg && in_u(l.atom, l.ann.bits())) {
                continue;
            }
            let off: Vec<Cst> = r
                .head
                .iter()
                .filter(|(p, s)| !in_u(*p, s.bits()))
                .map(|(p, s)| self.holds(*p, *s))
                .collect();
            let beta = self.beta[ri];
            ext.push(self.witness(beta, &off));
        }
        let us: Vec<Lit> = u
            .iter()
            .map(|&(p, b)| Lit::pos(self.bit_var(p, b).expect("true bit has a variable")))
            .collect();
        if us.len() == 1 {
            let mut c = vec![Cst::Lit(!us[0])];
            c.extend(ext);
            self.clause(&c);
        } else {
            let a = self.sat.new_var();
            for l in us {
                self.sat.add_clause(&[!l, Lit::pos(a)]);
            }
            let mut c = vec![Cst::Lit(Lit::neg(a))];
            c.extend(ext);
            self.clause(&c);
        }
    }

    /// Next stable model under `assumptions`, as bits.
    fn next_stable(&mut self, assumptions: &[Lit], deadline: Option<Instant>) -> Result<Option<Vec<u8>>, ()> {
        loop {
            if deadline.is_some_and(|d| Instant::now() > d) {
                return Err(());
            }
            if !self.sat.solve_with(assumptions) {
                return Ok(None);
            }
            self.explored += 1;
            let m = self.current_bits();
            match smaller_model(&self.rules, &m) {
                None => return Ok(Some(m)),
                Some(n) => {
                    let mut u = Vec::new();
                    for p in 0..m.len() {
                        for b in [T_BIT, F_BIT] {
                            if bit_set(&m, p, b) && !bit_set(&n, p, b) {
                                u.push((p, b));
                            }
                        }
                    }
                    self.add_loop_formula(&u);
                }
            }
        }
    }

    /// Clause literals that are true iff the atom bits differ from `m`.
    fn differs(&self, m: &[u8]) -> Vec<Lit> {
        let mut out = Vec::new();
        for p in 0..m.len() {
            for b in [T_BIT, F_BIT] {
                if let Some(v) = self.bit_var(p, b) {
                    out.push(Lit::new(v, bit_set(m, p, b)));
                }
            }
        }
        out
    }

    fn block(&mut self, m: &[u8]) {
        let c = self.differs(m);
        self.sat.add_clause(&c);
    }

    fn is_top(m: &[u8], p: AtomId) -> bool {
        m[p] == T_BIT | F_BIT
    }

    /// `sel -> (top(p) == top_in_m(p))` for every atom of the levels before `upto`.
    fn imply_equal_levels(&mut self, sel: Lit, m: &[u8], upto: usize) {
        let levels = self.levels[..upto].to_vec();
        for level in levels {
            for p in level {
                if let Some(x) = self.xvar[p] {
                    self.sat.add_clause(&[!sel, Lit::new(x, !Self::is_top(m, p))]);
                }
            }
        }
    }

    /// Adds an activation literal whose truth forces a model strictly
    /// preferred to `m`.
    fn improvement(&mut self, m: &[u8]) -> Lit {
        let act = Lit::pos(self.sat.new_var());
        let mut choices = vec![!act];
        for i in 0..self.levels.len() {
            let tops: Vec<AtomId> = self.levels[i].iter().copied().filter(|&p| Self::is_top(m, p)).collect();
            if tops.is_empty() {
                continue;
            }
            let c = Lit::pos(self.sat.new_var());
            choices.push(c);
            self.imply_equal_levels(c, m, i);
            let level = self.levels[i].clone();
            for p in level {
                if let (Some(x), false) = (self.xvar[p], Self::is_top(m, p)) {
                    self.sat.add_clause(&[!c, Lit::neg(x)]);
                }
            }
            let mut strict = vec![!c];
            strict.extend(tops.iter().filter_map(|&p| self.xvar[p]).map(Lit::neg));
            self.sat.add_clause(&strict);
        }
        self.sat.add_clause(&choices);
        act
    }

    /// Permanently excludes `o` and every model it dominates.
    fn exclude_dominated(&mut self, o: &[u8]) {
        let mut branches = Vec::new();
        for i in 0..self.levels.len() {
            let tops: Vec<Var> = self.levels[i]
                .iter()
                .filter(|&&p| Self::is_top(o, p))
                .filter_map(|&p| self.xvar[p])
                .collect();
            if tops.is_empty() {
                continue;
            }
            let b = Lit::pos(self.sat.new_var());
            branches.push(b);
            self.imply_equal_levels(b, o, i);
            let mut c = vec![!b];
            c.extend(tops.into_iter().map(Lit::neg));
            self.sat.add_clause(&c);
        }
        let b = Lit::pos(self.sat.new_var());
        branches.push(b);
        let n = self.levels.len();
        self.imply_equal_levels(b, o, n);
        let mut c = vec![!b];
        c.extend(self.differs(o));
        self.sat.add_clause(&c);
        self.sat.add_clause(&branches);
    }

    fn to_interp(&self, m: &[u8]) -> Interpretation {
        let a: Vec<TruthValue> = m.iter().map(|b| TruthValue::from_bits(*b)).collect();
        Interpretation::from_assignment(self.g, &a)
    }
}

fn finish(
    g: &GroundProgram,
    enc: &Encoder,
    mut models: Vec<Interpretation>,
    truncated: bool,
    start: Instant,
) -> SolveResult {
    canonical_order(&mut models);
    SolveResult {
        models,
        stats: SolveStats {
            ground_rules: g.rules.len(),
            candidates_explored: enc.explored,
            elapsed_ms: start.elapsed().as_millis(),
        },
        truncated,
    }
}

/// All stable models of `g`, up to `limit`.
pub fn stable_models(g: &GroundProgram, limit: Option<usize>) -> SolveResult {
    stable_models_with(g, SolveOptions { limit, timeout: None })
}

pub fn stable_models_with(g: &GroundProgram, opts: SolveOptions) -> SolveResult {
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let mut enc = Encoder::new(g);
    let mut models = Vec::new();
    let mut truncated = false;
    loop {
        match enc.next_stable(&[], deadline) {
            Err(()) => {
                truncated = true;
                break;
            }
            Ok(None) => break,
            Ok(Some(m)) => {
                if opts.limit.is_some_and(|l| models.len() >= l) {
                    truncated = true;
                    break;
                }
                models.push(enc.to_interp(&m));
                enc.block(&m);
            }
        }
    }
    finish(g, &enc, models, truncated, start)
}

/// Stable models not strictly dominated under the program's preference
/// levels.
pub fn preferred_stable_models(g: &GroundProgram) -> SolveResult {
    preferred_stable_models_with(g, SolveOptions::default())
}

pub fn preferred_stable_models_with(g: &GroundProgram, opts: SolveOptions) -> SolveResult {
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let mut enc = Encoder::new(g);
    let mut models = Vec::new();
    let mut truncated = false;
    'outer: loop {
        let mut m = match enc.next_stable(&[], deadline) {
            Err(()) => {
                truncated = true;
                break;
            }
            Ok(None) => break,
            Ok(Some(m)) => m,
        };
        loop {
            let act = enc.improvement(&m);
            let better = enc.next_stable(&[act], deadline);
            enc.sat.add_clause(&[!act]);
            match better {
                Err(()) => {
                    truncated = true;
                    break 'outer;
                }
                Ok(Some(n)) => m = n,
                Ok(None) => break,
            }
        }
        if opts.limit.is_some_and(|l| models.len() >= l) {
            truncated = true;
            break;
        }
        models.push(enc.to_interp(&m));
        enc.exclude_dominated(&m);
    }
    finish(g, &enc, models, truncated, start)
}

/// Preferred models by enumerating every stable model and filtering.
pub fn preferred_by_filter(g: &GroundProgram) -> Vec<Interpretation> {
    let all = stable_models(g, None).models;
    let mut out = filter_preferred(&all, &PreferenceLevels::from_ground(g));
    canonical_order(&mut out);
    out
}

/// Whether every selected model satisfies `f`.
pub fn entails(g: &GroundProgram, f: &QueryFormula, mode: Mode) -> Result<Entailment, String> {
    f.check(g)?;
    let models = match mode {
        Mode::PreferredStable => preferred_stable_models(g).models,
        Mode::AllStable => stable_models(g, None).models,
    };
    let counterexample = models.iter().find(|m| !m.satisfies(f)).cloned();
    Ok(Entailment {
        holds: counterexample.is_none(),
        vacuous: models.is_empty(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground;
    use crate::parser::parse;

    fn g(src: &str) -> GroundProgram {
        ground(&parse(src).unwrap()).unwrap()
    }

    fn texts(r: &SolveResult) -> Vec<String> {
        r.models.iter().map(|m| m.to_string()).collect()
    }

    #[test]
    fn negation_as_failure() {
        let gp = g("q : t :- not p : t.");
        assert_eq!(texts(&stable_models(&gp, None)), vec!["q : t\n"]);
    }

    #[test]
    fn reduct_examples() {
        let gp = g("q : t :- not p : t.");
        let q = gp.atom_id(&crate::ast::PredicateTerm::ground("q", &[])).unwrap();
        let m = Interpretation::from_assignment(&gp, &{
            let mut a = vec![TruthValue::Bottom; gp.num_atoms()];
            a[q] = TruthValue::True;
            a
        });
        let r = reduct(&gp, &m);
        assert_eq!(r.rules.len(), 1);
        assert!(r.rules[0].body.is_empty());
        let p = crate::ast::PredicateTerm::ground("p", &[]);
        let m2 = Interpretation::from_pairs([(p, TruthValue::True)]);
        assert!(reduct(&gp, &m2).rules.is_empty());
    }

    #[test]
    fn minimality() {
        let gp = g("p : t. p : f.");
        let p = crate::ast::PredicateTerm::ground("p", &[]);
        let top = Interpretation::from_pairs([(p.clone(), TruthValue::Top)]);
        assert_eq!(is_minimal_model(&top, &gp), Ok(true));
        let gp = g("p : t ; q : t.");
        let q = crate::ast::PredicateTerm::ground("q", &[]);
        let both = Interpretation::from_pairs([(p.clone(), TruthValue::True), (q, TruthValue::True)]);
        assert_eq!(is_minimal_model(&both, &gp), Ok(false));
        let none = Interpretation::new();
        assert_eq!(is_minimal_model(&none, &gp), Err(SolverError::NotAModel));
    }

    #[test]
    fn disjunction_gives_two_models() {
        let gp = g("p : t ; q : t.");
        assert_eq!(texts(&stable_models(&gp, None)), vec!["p : t\n", "q : t\n"]);
    }

    #[test]
    fn positive_loop_is_unfounded() {
        let gp = g("p : t :- q : t.\nq : t :- p : t.\nr : t :- not p : t.");
        assert_eq!(texts(&stable_models(&gp, None)), vec!["r : t\n"]);
    }

    #[test]
    fn even_loop() {
        let gp = g("p : t :- not q : t.\nq : t :- not p : t.");
        assert_eq!(stable_models(&gp, None).models.len(), 2);
    }

    #[test]
    fn odd_loop_has_no_model() {
        let gp = g("p : t :- not p : t.");
        assert!(stable_models(&gp, None).models.is_empty());
    }

    #[test]
    fn limit_truncates() {
        let gp = g("p : t ; q : t.\nr : t ; s : t.");
        let r = stable_models(&gp, Some(2));
        assert_eq!(r.models.len(), 2);
        assert!(r.truncated);
        assert!(!stable_models(&gp, Some(4)).truncated);
    }

    #[test]
    fn top_needs_both_derivations() {
        let gp = g("p : top :- q : t.\nq : t.\nr : t :- p : f.");
        assert_eq!(texts(&stable_models(&gp, None)), vec!["p : top\nq : t\nr : t\n"]);
    }

    #[test]
    fn preferred_polarity() {
        let src = "person(robin) : t.\n\
                   male(X) : t ; female(X) : t :- person(X) : t.\n\
                   male(X) : f ; female(X) : f :- person(X) : t.\n\
                   male(X) : t ; female(X) : f :- person(X) : t, not male(X) : top, not female(X) : top.\n\
                   male(X) : f ; female(X) : t :- person(X) : t, not male(X) : top, not female(X) : top.";
        let gp = g(src);
        let pr = preferred_stable_models(&gp);
        assert_eq!(pr.models.len(), 2);
        assert_eq!(pr.models, preferred_by_filter(&gp));
    }

    #[test]
    fn preferred_single_top() {
        let gp = g("p : t ; q : t.\np : f.\nq : f.");
        let r = preferred_stable_models(&gp);
        assert_eq!(texts(&r), vec!["p : f\nq : top\n", "p : top\nq : f\n"]);
    }

    #[test]
    fn entailment_modes() {
        let gp = g("p : t ; q : t.");
        let q = QueryFormula::atom(crate::ast::PredicateTerm::ground("p", &[]), TruthValue::True);
        assert!(!entails(&gp, &q, Mode::AllStable).unwrap().holds);
        let gp = g("p : t.\n:- p : t.");
        let e = entails(&gp, &q, Mode::AllStable).unwrap();
        assert!(e.holds && e.vacuous);
        let unknown = QueryFormula::atom(crate::ast::PredicateTerm::ground("zz", &[]), TruthValue::True);
        assert!(entails(&gp, &unknown, Mode::AllStable).is_err());
    }
}
