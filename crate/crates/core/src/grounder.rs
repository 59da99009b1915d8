//! Instantiation of programs over their Herbrand universe.
//!
//! Grounding runs in two phases. A fixpoint over *possible* evidence bits
//! (negation ignored) decides which ground atoms can ever carry `t` or `f`
//! evidence; positive body atoms are joined only against those. A second,
//! deterministic pass then emits ground rules in statement order, with
//! substitutions sorted, duplicate instances removed and atoms numbered in
//! order of first appearance.
//!
//! Variables that occur only in a rule head range over the Herbrand
//! universe: every ground term written in the program or in a domain
//! declaration.
//!
//! Exactly-N statements are expanded by [`expand_cardinality`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::ast::*;
use crate::lattice::{TruthValue, F_BIT, T_BIT};

pub type AtomId = usize;

/// Name of the implicit final preference level.
pub const BTOP_LEVEL: &str = "btop";

/// Predicate symbol of the auxiliary atoms used by choice expansion.
pub const CHOICE_SYMBOL: &str = "_choice";

/// A ground body literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLit {
    /// Ontological negation.
    pub neg: bool,
    pub atom: AtomId,
    pub ann: TruthValue,
}

impl GroundLit {
    pub fn pos(atom: AtomId, ann: TruthValue) -> Self {
        GroundLit { neg: false, atom, ann }
    }

    pub fn neg(atom: AtomId, ann: TruthValue) -> Self {
        GroundLit { neg: true, atom, ann }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Vec<(AtomId, TruthValue)>,
    pub body: Vec<GroundLit>,
}

impl GroundRule {
    pub fn new(head: Vec<(AtomId, TruthValue)>, body: Vec<GroundLit>) -> Self {
        GroundRule { head, body }
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }
}

/// A ground preference level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundLevel {
    pub name: String,
    pub atoms: Vec<AtomId>,
}

/// A ground program with its registered atoms and preference levels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    atoms: Vec<PredicateTerm>,
    aux: Vec<bool>,
    index: HashMap<PredicateTerm, AtomId>,
    pub rules: Vec<GroundRule>,
    /// Levels most significant first, ending with [`BTOP_LEVEL`].
    pub levels: Vec<GroundLevel>,
    pub warnings: Vec<String>,
}

impl GroundProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `p`, returning its id.
    pub fn add_atom(&mut self, p: PredicateTerm) -> AtomId {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.atoms.len();
        self.aux.push(p.symbol.starts_with('_'));
        self.index.insert(p.clone(), id);
        self.atoms.push(p);
        id
    }

    pub fn atom(&self, id: AtomId) -> &PredicateTerm {
        &self.atoms[id]
    }

    pub fn atoms(&self) -> &[PredicateTerm] {
        &self.atoms
    }

    pub fn atom_id(&self, p: &PredicateTerm) -> Option<AtomId> {
        self.index.get(p).copied()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Auxiliary atoms are introduced by the grounder and hidden from output.
    pub fn is_aux(&self, id: AtomId) -> bool {
        self.aux[id]
    }

    pub fn visible_atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.atoms.len()).filter(|&i| !self.aux[i])
    }

    /// Replaces the levels with `levels` followed by the implicit final level.
    pub fn set_levels(&mut self, levels: Vec<GroundLevel>) {
        self.levels = levels;
        self.levels.push(GroundLevel {
            name: BTOP_LEVEL.to_string(),
            atoms: self.visible_atoms().collect(),
        });
    }

    /// The rules as ground source rules.
    pub fn to_rules(&self) -> Vec<Rule> {
        let atom = |id: AtomId, v: TruthValue| AnnotatedAtom::new(self.atoms[id].clone(), v);
        self.rules
            .iter()
            .map(|r| {
                Rule::new(
                    r.head.iter().map(|(p, v)| atom(*p, *v)).collect(),
                    r.body
                        .iter()
                        .map(|l| {
                            if l.neg {
                                BodyLiteral::neg(atom(l.atom, l.ann))
                            } else {
                                BodyLiteral::pos(atom(l.atom, l.ann))
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn render_rule(&self, r: &GroundRule) -> String {
        let head: Vec<String> = r
            .head
            .iter()
            .map(|(a, v)| format!("{} : {}", self.atoms[*a], v))
            .collect();
        let body: Vec<String> = r
            .body
            .iter()
            .map(|l| {
                format!(
                    "{}{} : {}",
                    if l.neg { "not " } else { "" },
                    self.atoms[l.atom],
                    l.ann
                )
            })
            .collect();
        let mut s = head.join(" ; ");
        if !body.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(":- ");
            s.push_str(&body.join(", "));
        }
        s.push('.');
        s
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", self.render_rule(r))?;
        }
        for l in &self.levels {
            let names: Vec<String> = l.atoms.iter().map(|a| self.atoms[*a].to_string()).collect();
            writeln!(f, "% level {}: {}", l.name, names.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("program is not valid:\n{}", render_diags(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("{error} in `{context}`")]
    Eval { error: EvalError, context: String },
    #[error("domain {0} not declared")]
    UndeclaredDomain(String),
    #[error("grounding exceeds the cap of {0} rules")]
    TooLarge(usize),
}

fn render_diags(d: &[Diagnostic]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Grounding limits.
#[derive(Debug, Clone)]
pub struct GroundConfig {
    pub max_rules: usize,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig { max_rules: 1_000_000 }
    }
}

/// Possible atoms, indexed by signature in insertion order.
#[derive(Default)]
struct Possible {
    bits: HashMap<PredicateTerm, u8>,
    by_sig: HashMap<Signature, Vec<PredicateTerm>>,
}

impl Possible {
    fn add(&mut self, p: &PredicateTerm, bits: u8) -> bool {
        match self.bits.get_mut(p) {
            Some(b) => {
                let old = *b;
                *b |= bits;
                *b != old
            }
            None => {
                self.bits.insert(p.clone(), bits);
                self.by_sig.entry(p.signature()).or_default().push(p.clone());
                true
            }
        }
    }

    fn get(&self, p: &PredicateTerm) -> u8 {
        self.bits.get(p).copied().unwrap_or(0)
    }
}

struct Grounder<'a> {
    program: &'a Program,
    universe: Vec<Term>,
    facts: Possible,
    possible: Possible,
    config: GroundConfig,
}

/// Joins `atoms` left to right against `source`, extending each substitution.
fn join(
    atoms: &[&AnnotatedAtom],
    source: &Possible,
    subst: Subst,
    out: &mut Vec<Subst>,
) {
    let Some((first, rest)) = atoms.split_first() else {
        out.push(subst);
        return;
    };
    let need = first.ann.bits();
    let ground = first.pred.substitute(&subst);
    if ground.is_ground() {
        if source.get(&ground) & need == need && source.bits.contains_key(&ground) {
            join(rest, source, subst, out);
        }
        return;
    }
    let Some(cands) = source.by_sig.get(&first.pred.signature()) else {
        return;
    };
    for cand in cands {
        if source.get(cand) & need != need {
            continue;
        }
        let mut s = subst.clone();
        if ground.match_ground(cand, &mut s) {
            join(rest, source, s, out);
        }
    }
}

/// Applies builtins in dependency order. Returns `Ok(None)` if one fails.
fn apply_builtins(
    builtins: &[&Builtin],
    mut subst: Subst,
) -> Result<Option<Subst>, EvalError> {
    let mut done = vec![false; builtins.len()];
    loop {
        let mut progress = false;
        for (i, b) in builtins.iter().enumerate() {
            if done[i] {
                continue;
            }
            let bound: BTreeSet<String> = subst.keys().cloned().collect();
            let mut vars = BTreeSet::new();
            b.collect_vars(&mut vars);
            if vars.is_subset(&bound) {
                done[i] = true;
                progress = true;
                if !b.holds(&subst)? {
                    return Ok(None);
                }
            } else if let Some((v, e)) = b.assignment(&bound) {
                let value = e.eval(&subst)?;
                subst.insert(v.to_string(), value);
                done[i] = true;
                progress = true;
            }
        }
        if done.iter().all(|d| *d) {
            return Ok(Some(subst));
        }
        if !progress {
            let bound: BTreeSet<String> = subst.keys().cloned().collect();
            let mut vars = BTreeSet::new();
            builtins.iter().for_each(|b| b.collect_vars(&mut vars));
            let v = vars.difference(&bound).next().cloned().unwrap_or_default();
            return Err(EvalError::Unbound(v));
        }
    }
}

/// Extends `subst` over all assignments of `vars` to universe terms.
fn expand_free(vars: &[String], universe: &[Term], subst: Subst, out: &mut Vec<Subst>) {
    let Some((v, rest)) = vars.split_first() else {
        out.push(subst);
        return;
    };
    for t in universe {
        let mut s = subst.clone();
        s.insert(v.clone(), t.clone());
        expand_free(rest, universe, s, out);
    }
}

fn positive_atoms(body: &[BodyLiteral]) -> Vec<&AnnotatedAtom> {
    body.iter()
        .filter_map(|b| match b {
            BodyLiteral::Lit {
                polarity: Polarity::Positive,
                atom,
            } if atom.ann != TruthValue::Bottom => Some(atom),
            _ => None,
        })
        .collect()
}

fn builtins_of(body: &[BodyLiteral]) -> Vec<&Builtin> {
    body.iter()
        .filter_map(|b| match b {
            BodyLiteral::Builtin(b) => Some(b),
            _ => None,
        })
        .collect()
}

/// A condition alternative's atoms and builtins.
fn split_condition(alt: &[CondLiteral]) -> (Vec<&AnnotatedAtom>, Vec<&Builtin>) {
    let mut atoms = Vec::new();
    let mut builtins = Vec::new();
    for l in alt {
        match l {
            CondLiteral::Atom(a) => atoms.push(a),
            CondLiteral::Builtin(b) => builtins.push(b),
        }
    }
    (atoms, builtins)
}

/// A guard instance with its candidate element atoms and the ground
/// condition atoms that selected each candidate.
struct CardinalityInstance {
    guard: Subst,
    candidates: Vec<(PredicateTerm, Vec<PredicateTerm>)>,
}

impl<'a> Grounder<'a> {
    fn new(program: &'a Program, config: GroundConfig) -> Self {
        let mut seen = BTreeSet::new();
        let universe: Vec<Term> = herbrand_order(program)
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect();

        let mut facts = Possible::default();
        for r in &program.rules {
            if r.body.is_empty()
                && r.head.len() == 1
                && r.head[0].ann == TruthValue::True
                && r.head[0].pred.is_ground()
            {
                facts.add(&r.head[0].pred, T_BIT);
            }
        }
        Grounder {
            program,
            universe,
            facts,
            possible: Possible::default(),
            config,
        }
    }

    /// All substitutions for a rule body against the current possible set.
    fn body_substs(
        &self,
        body: &[BodyLiteral],
        head_vars: &BTreeSet<String>,
        context: &dyn Fn() -> String,
    ) -> Result<Vec<Subst>, GroundError> {
        let mut joined = Vec::new();
        join(&positive_atoms(body), &self.possible, Subst::new(), &mut joined);
        let builtins = builtins_of(body);
        let mut out = Vec::new();
        for s in joined {
            let s = match apply_builtins(&builtins, s) {
                Ok(Some(s)) => s,
                Ok(None) => continue,
                Err(error) => {
                    return Err(GroundError::Eval {
                        error,
                        context: context(),
                    })
                }
            };
            let free: Vec<String> = head_vars.iter().filter(|v| !s.contains_key(*v)).cloned().collect();
            expand_free(&free, &self.universe, s, &mut out);
        }
        Ok(out)
    }

    fn cardinality_instances(
        &self,
        c: &CardinalityRule,
    ) -> Result<Vec<CardinalityInstance>, GroundError> {
        let context = || c.to_string();
        let guards = self.body_substs(&c.guard, &BTreeSet::new(), &context)?;
        let alternatives: Vec<&[CondLiteral]> = if c.condition.is_empty() {
            vec![&[]]
        } else {
            c.condition.iter().map(Vec::as_slice).collect()
        };
        let mut out = Vec::new();
        for g in sorted_unique(guards) {
            let mut cands: Vec<(PredicateTerm, Vec<PredicateTerm>)> = Vec::new();
            for alt in &alternatives {
                let (atoms, builtins) = split_condition(alt);
                let mut joined = Vec::new();
                join(&atoms, &self.facts, g.clone(), &mut joined);
                let mut found = Vec::new();
                for s in joined {
                    match apply_builtins(&builtins, s) {
                        Ok(Some(s)) => found.push(s),
                        Ok(None) => {}
                        Err(error) => {
                            return Err(GroundError::Eval {
                                error,
                                context: context(),
                            })
                        }
                    }
                }
                for s in sorted_unique(found) {
                    let elem = c.element.pred.substitute(&s);
                    if !elem.is_ground() {
                        return Err(GroundError::Eval {
                            error: EvalError::Unbound(format!("in {elem}")),
                            context: context(),
                        });
                    }
                    if cands.iter().all(|(e, _)| *e != elem) {
                        let conds = atoms.iter().map(|a| a.pred.substitute(&s)).collect();
                        cands.push((elem, conds));
                    }
                }
            }
            cands.sort_by(|a, b| a.0.cmp(&b.0));
            out.push(CardinalityInstance {
                guard: g,
                candidates: cands,
            });
        }
        Ok(out)
    }

    fn fixpoint(&mut self) -> Result<(), GroundError> {
        loop {
            let mut changed = false;
            for r in &self.program.rules {
                if r.head.is_empty() {
                    continue;
                }
                let mut head_vars = BTreeSet::new();
                r.head.iter().for_each(|a| a.pred.collect_vars(&mut head_vars));
                let ctx = || r.to_string();
                for s in self.body_substs(&r.body, &head_vars, &ctx)? {
                    for h in &r.head {
                        changed |= self.possible.add(&h.pred.substitute(&s), h.ann.bits());
                    }
                }
            }
            for c in &self.program.cardinalities {
                for inst in self.cardinality_instances(c)? {
                    for (elem, _) in &inst.candidates {
                        let bits = if c.with_closure { T_BIT | F_BIT } else { T_BIT };
                        changed |= self.possible.add(elem, bits);
                        changed |= self.possible.add(&choice_atom(elem), T_BIT);
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Grounds a body under `s`. `None` if the instance can never fire.
    fn ground_body(
        &self,
        body: &[BodyLiteral],
        s: &Subst,
        g: &mut GroundProgram,
    ) -> Option<Vec<GroundLit>> {
        let mut out = Vec::new();
        for b in body {
            let BodyLiteral::Lit { polarity, atom } = b else {
                continue;
            };
            let pred = atom.pred.substitute(s);
            let need = atom.ann.bits();
            match polarity {
                Polarity::Positive => {
                    if atom.ann == TruthValue::Bottom {
                        continue;
                    }
                    if self.possible.get(&pred) & need != need {
                        return None;
                    }
                    out.push(GroundLit::pos(g.add_atom(pred), atom.ann));
                }
                Polarity::OntoNegated => {
                    if atom.ann == TruthValue::Bottom {
                        return None;
                    }
                    if self.possible.get(&pred) & need != need {
                        continue;
                    }
                    out.push(GroundLit::neg(g.add_atom(pred), atom.ann));
                }
            }
        }
        Some(out)
    }

    fn emit(&mut self) -> Result<GroundProgram, GroundError> {
        let mut g = GroundProgram::new();
        let mut seen = BTreeSet::new();
        let cap = self.config.max_rules;
        let mut push = |g: &mut GroundProgram, r: GroundRule| -> Result<(), GroundError> {
            if seen.insert(r.clone()) {
                if g.rules.len() >= cap {
                    return Err(GroundError::TooLarge(cap));
                }
                g.rules.push(r);
            }
            Ok(())
        };
        for r in &self.program.rules {
            let mut head_vars = BTreeSet::new();
            r.head.iter().for_each(|a| a.pred.collect_vars(&mut head_vars));
            let ctx = || r.to_string();
            if r.vars().is_empty() {
                // Ground input is kept as written.
                let s = Subst::new();
                let builtins = builtins_of(&r.body);
                match apply_builtins(&builtins, s.clone()) {
                    Ok(Some(_)) => {}
                    Ok(None) => continue,
                    Err(error) => return Err(GroundError::Eval { error, context: ctx() }),
                }
                let head = r.head.iter().map(|h| (g.add_atom(h.pred.clone()), h.ann)).collect();
                let body = r
                    .body
                    .iter()
                    .filter_map(|b| match b {
                        BodyLiteral::Lit { polarity, atom } => Some(GroundLit {
                            neg: *polarity == Polarity::OntoNegated,
                            atom: g.add_atom(atom.pred.clone()),
                            ann: atom.ann,
                        }),
                        BodyLiteral::Builtin(_) => None,
                    })
                    .collect();
                push(&mut g, GroundRule::new(head, body))?;
                continue;
            }
            let substs = sorted_unique(self.body_substs(&r.body, &head_vars, &ctx)?);
            for s in substs {
                let Some(body) = self.ground_body(&r.body, &s, &mut g) else {
                    continue;
                };
                let head = r
                    .head
                    .iter()
                    .map(|h| (g.add_atom(h.pred.substitute(&s)), h.ann))
                    .collect();
                push(&mut g, GroundRule::new(head, body))?;
            }
        }
        for c in &self.program.cardinalities {
            for inst in self.cardinality_instances(c)? {
                let Some(guard) = self.ground_body(&c.guard, &inst.guard, &mut g) else {
                    continue;
                };
                let cands: Vec<(AtomId, Vec<GroundLit>)> = inst
                    .candidates
                    .iter()
                    .map(|(e, conds)| {
                        let id = g.add_atom(e.clone());
                        let lits = conds
                            .iter()
                            .map(|p| GroundLit::pos(g.add_atom(p.clone()), TruthValue::True))
                            .collect();
                        (id, lits)
                    })
                    .collect();
                let aux: Vec<AtomId> = inst
                    .candidates
                    .iter()
                    .map(|(e, _)| g.add_atom(choice_atom(e)))
                    .collect();
                let exp = expand_cardinality(c.count, c.with_closure, &guard, &cands, &aux);
                if exp.unsatisfiable {
                    let msg = format!(
                        "cardinality {} needs {} candidates but only {} exist under guard instance; the guard is made a constraint",
                        c,
                        c.count,
                        cands.len()
                    );
                    if !g.warnings.contains(&msg) {
                        g.warnings.push(msg);
                    }
                }
                for r in exp.rules {
                    push(&mut g, r)?;
                }
            }
        }
        let mut levels = Vec::new();
        if let Some(pref) = &self.program.preference {
            for level in &pref.levels {
                let mut atoms = Vec::new();
                for pat in &level.patterns {
                    let mut substs = vec![Subst::new()];
                    for (v, d) in &pat.binders {
                        let dom = self
                            .program
                            .domain(d)
                            .ok_or_else(|| GroundError::UndeclaredDomain(d.clone()))?;
                        substs = substs
                            .into_iter()
                            .flat_map(|s| {
                                dom.constants.iter().map(move |c| {
                                    let mut s = s.clone();
                                    s.insert(v.clone(), c.clone());
                                    s
                                })
                            })
                            .collect();
                    }
                    for s in substs {
                        let id = g.add_atom(pat.atom.substitute(&s));
                        if !atoms.contains(&id) {
                            atoms.push(id);
                        }
                    }
                }
                levels.push(GroundLevel {
                    name: level.name.clone(),
                    atoms,
                });
            }
        }
        g.set_levels(levels);
        Ok(g)
    }
}

/// Ground terms in order of first textual appearance.
fn herbrand_order(p: &Program) -> Vec<Term> {
    let mut out = Vec::new();
    fn walk(t: &Term, out: &mut Vec<Term>) {
        if let Term::Compound { args, .. } = t {
            args.iter().for_each(|a| walk(a, out));
            if t.is_ground() {
                out.push(t.clone());
            }
        }
    }
    fn walk_expr(e: &ArithExpr, out: &mut Vec<Term>) {
        match e {
            ArithExpr::Term(t) => walk(t, out),
            ArithExpr::Add(a, b) | ArithExpr::Sub(a, b) => {
                walk_expr(a, out);
                walk_expr(b, out);
            }
            ArithExpr::Neg(a) | ArithExpr::Abs(a) => walk_expr(a, out),
        }
    }
    let pred = |p: &PredicateTerm, out: &mut Vec<Term>| p.args.iter().for_each(|a| walk(a, out));
    let body = |b: &[BodyLiteral], out: &mut Vec<Term>| {
        for l in b {
            match l {
                BodyLiteral::Lit { atom, .. } => pred(&atom.pred, out),
                BodyLiteral::Builtin(bi) => {
                    walk_expr(&bi.lhs, out);
                    walk_expr(&bi.rhs, out);
                }
            }
        }
    };
    for d in &p.domains {
        d.constants.iter().for_each(|c| walk(c, &mut out));
    }
    for r in &p.rules {
        r.head.iter().for_each(|a| pred(&a.pred, &mut out));
        body(&r.body, &mut out);
    }
    for c in &p.cardinalities {
        pred(&c.element.pred, &mut out);
        for l in c.condition.iter().flatten() {
            match l {
                CondLiteral::Atom(a) => pred(&a.pred, &mut out),
                CondLiteral::Builtin(bi) => {
                    walk_expr(&bi.lhs, &mut out);
                    walk_expr(&bi.rhs, &mut out);
                }
            }
        }
        body(&c.guard, &mut out);
    }
    out
}

/// The Herbrand universe used for head-only variables, in first-appearance
/// order.
pub fn herbrand_universe(p: &Program) -> Vec<Term> {
    Grounder::new(p, GroundConfig::default()).universe
}

fn sorted_unique(mut v: Vec<Subst>) -> Vec<Subst> {
    v.sort();
    v.dedup();
    v
}

/// The auxiliary atom paired with `elem` in a choice.
pub fn choice_atom(elem: &PredicateTerm) -> PredicateTerm {
    PredicateTerm::new(CHOICE_SYMBOL, vec![elem.to_term()])
}

/// Ground rules for one guard instance of an exactly-N statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityExpansion {
    pub rules: Vec<GroundRule>,
    /// True if fewer than N candidates exist; the guard becomes a constraint.
    pub unsatisfiable: bool,
}

/// Expands one guard instance of `N { L : cond } N :- guard`.
///
/// `candidates` pairs each element atom with the ground condition literals
/// that selected it; `aux` holds the matching choice atoms. Emitted, in order:
///
/// * an even loop `Li:t :- B, not _choice(Li):t` / `_choice(Li):t :- B, not Li:t`;
/// * `:- B, Li1:t, ..., Li(N+1):t` for each (N+1)-subset;
/// * `:- B, not Lj1:t, ..., not Lj(k-N+1):t` for each (k-N+1)-subset;
/// * with closure, `Li:f :- B, not Li:t`.
///
/// Counting uses `Li:t`, so `top` candidates count as true.
pub fn expand_cardinality(
    count: u32,
    with_closure: bool,
    guard: &[GroundLit],
    candidates: &[(AtomId, Vec<GroundLit>)],
    aux: &[AtomId],
) -> CardinalityExpansion {
    let n = count as usize;
    let k = candidates.len();
    let mut rules = Vec::new();
    let with = |extra: &[GroundLit]| {
        let mut b = guard.to_vec();
        b.extend_from_slice(extra);
        b
    };
    if n > k {
        return CardinalityExpansion {
            rules: vec![GroundRule::new(vec![], guard.to_vec())],
            unsatisfiable: true,
        };
    }
    for ((l, cond), &x) in candidates.iter().zip(aux) {
        let mut body = with(cond);
        body.push(GroundLit::neg(x, TruthValue::True));
        rules.push(GroundRule::new(vec![(*l, TruthValue::True)], body));
        let mut body = with(cond);
        body.push(GroundLit::neg(*l, TruthValue::True));
        rules.push(GroundRule::new(vec![(x, TruthValue::True)], body));
    }
    if n < k {
        for subset in subsets(k, n + 1) {
            let lits: Vec<GroundLit> = subset
                .iter()
                .map(|&i| GroundLit::pos(candidates[i].0, TruthValue::True))
                .collect();
            rules.push(GroundRule::new(vec![], with(&lits)));
        }
    }
    if n > 0 {
        for subset in subsets(k, k - n + 1) {
            let lits: Vec<GroundLit> = subset
                .iter()
                .map(|&i| GroundLit::neg(candidates[i].0, TruthValue::True))
                .collect();
            rules.push(GroundRule::new(vec![], with(&lits)));
        }
    }
    if with_closure {
        for (l, cond) in candidates {
            let mut body = with(cond);
            body.push(GroundLit::neg(*l, TruthValue::True));
            rules.push(GroundRule::new(vec![(*l, TruthValue::False)], body));
        }
    }
    CardinalityExpansion {
        rules,
        unsatisfiable: false,
    }
}

/// All `r`-element subsets of `0..k` in lexicographic order.
pub fn subsets(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > k {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        while i > 0 && idx[i - 1] == k - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Grounds a validated program with default limits.
pub fn ground(p: &Program) -> Result<GroundProgram, GroundError> {
    ground_with(p, GroundConfig::default())
}

pub fn ground_with(p: &Program, config: GroundConfig) -> Result<GroundProgram, GroundError> {
    let errors: Vec<Diagnostic> = validate(p)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    if !errors.is_empty() {
        return Err(GroundError::Invalid(errors));
    }
    let mut g = Grounder::new(p, config);
    g.fixpoint()?;
    g.emit()
}

/// Ground atoms by rendered text, for lookups in tests and tools.
pub fn atom_table(g: &GroundProgram) -> BTreeMap<String, AtomId> {
    g.atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.to_string(), i))
        .collect()
}
