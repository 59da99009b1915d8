//! Abstract syntax of annotated logic programs.
//!
//! Two layers live here. The surface layer ([`RawProgram`]) still carries
//! epistemic negation `~` and epistemic implication `<~`. The core layer
//! ([`Program`]) is what [`desugar`] produces: heads are plain disjunctions of
//! annotated atoms and bodies are annotated atoms, ontologically negated
//! atoms or arithmetic builtins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lattice::TruthValue;
use crate::parser::SourceSpan;

/// A first-order term. Integers are 0-ary compounds with numeric names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Compound { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Compound {
            functor: name.into(),
            args: Vec::new(),
        }
    }

    pub fn int(value: i64) -> Term {
        Term::constant(value.to_string())
    }

    pub fn compound(functor: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Compound {
            functor: functor.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// The integer value of a numeric constant.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Compound { functor, args } if args.is_empty() => functor.parse().ok(),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Compound { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn substitute(&self, subst: &Subst) -> Term {
        match self {
            Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| a.substitute(subst)).collect(),
            },
        }
    }

    /// Every ground subterm, including `self`.
    pub fn ground_subterms(&self, out: &mut BTreeSet<Term>) {
        if let Term::Compound { args, .. } = self {
            args.iter().for_each(|a| a.ground_subterms(out));
            if self.is_ground() {
                out.insert(self.clone());
            }
        }
    }
}

/// Variable bindings.
pub type Subst = BTreeMap<String, Term>;

/// `p(t1, ..., tn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateTerm {
    pub symbol: String,
    pub args: Vec<Term>,
}

impl PredicateTerm {
    pub fn new(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        PredicateTerm {
            symbol: symbol.into(),
            args,
        }
    }

    /// A ground atom with constant arguments.
    pub fn ground(symbol: &str, args: &[&str]) -> Self {
        PredicateTerm::new(symbol, args.iter().map(|a| Term::constant(*a)).collect())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn signature(&self) -> Signature {
        Signature {
            name: self.symbol.clone(),
            arity: self.args.len(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn substitute(&self, subst: &Subst) -> PredicateTerm {
        PredicateTerm {
            symbol: self.symbol.clone(),
            args: self.args.iter().map(|a| a.substitute(subst)).collect(),
        }
    }

    /// The predicate term read as a function term.
    pub fn to_term(&self) -> Term {
        Term::compound(self.symbol.clone(), self.args.clone())
    }

    /// Extends `subst` so that `self` instantiates to `ground`.
    pub fn match_ground(&self, ground: &PredicateTerm, subst: &mut Subst) -> bool {
        self.symbol == ground.symbol
            && self.args.len() == ground.args.len()
            && self
                .args
                .iter()
                .zip(&ground.args)
                .all(|(p, g)| match_term(p, g, subst))
    }
}

fn match_term(pattern: &Term, ground: &Term, subst: &mut Subst) -> bool {
    match pattern {
        Term::Var(v) => match subst.get(v) {
            Some(bound) => bound == ground,
            None => {
                subst.insert(v.clone(), ground.clone());
                true
            }
        },
        Term::Compound { functor, args } => match ground {
            Term::Compound {
                functor: gf,
                args: gargs,
            } => {
                functor == gf
                    && args.len() == gargs.len()
                    && args.iter().zip(gargs).all(|(p, g)| match_term(p, g, subst))
            }
            Term::Var(_) => false,
        },
    }
}

/// Predicate name and arity, written `name/arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub name: String,
    pub arity: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// `p : s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedAtom {
    pub pred: PredicateTerm,
    pub ann: TruthValue,
}

impl AnnotatedAtom {
    pub fn new(pred: PredicateTerm, ann: TruthValue) -> Self {
        AnnotatedAtom { pred, ann }
    }

    pub fn eneg(&self) -> AnnotatedAtom {
        AnnotatedAtom::new(self.pred.clone(), self.ann.eneg())
    }

    pub fn substitute(&self, subst: &Subst) -> AnnotatedAtom {
        AnnotatedAtom::new(self.pred.substitute(subst), self.ann)
    }
}

/// Integer arithmetic over terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ArithExpr {
    Term(Term),
    Add(Box<ArithExpr>, Box<ArithExpr>),
    Sub(Box<ArithExpr>, Box<ArithExpr>),
    Neg(Box<ArithExpr>),
    Abs(Box<ArithExpr>),
}

/// Error raised when a builtin cannot be evaluated.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("arithmetic on non-integer term `{0}`")]
    NotInteger(String),
    #[error("unbound variable {0} in arithmetic")]
    Unbound(String),
    #[error("integer overflow")]
    Overflow,
}

impl ArithExpr {
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ArithExpr::Term(t) => t.collect_vars(out),
            ArithExpr::Add(a, b) | ArithExpr::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ArithExpr::Neg(a) | ArithExpr::Abs(a) => a.collect_vars(out),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            ArithExpr::Term(Term::Var(v)) => Some(v),
            _ => None,
        }
    }

    /// Evaluates to a ground term. Plain terms evaluate to themselves; the
    /// arithmetic operators require integers.
    pub fn eval(&self, subst: &Subst) -> Result<Term, EvalError> {
        match self {
            ArithExpr::Term(t) => {
                let t = t.substitute(subst);
                if t.is_ground() {
                    Ok(t)
                } else {
                    let mut vars = BTreeSet::new();
                    t.collect_vars(&mut vars);
                    Err(EvalError::Unbound(vars.into_iter().next().unwrap_or_default()))
                }
            }
            _ => self.eval_int(subst).map(Term::int),
        }
    }

    fn eval_int(&self, subst: &Subst) -> Result<i64, EvalError> {
        match self {
            ArithExpr::Term(_) => {
                let t = self.eval(subst)?;
                t.as_int().ok_or_else(|| EvalError::NotInteger(t.to_string()))
            }
            ArithExpr::Add(a, b) => a
                .eval_int(subst)?
                .checked_add(b.eval_int(subst)?)
                .ok_or(EvalError::Overflow),
            ArithExpr::Sub(a, b) => a
                .eval_int(subst)?
                .checked_sub(b.eval_int(subst)?)
                .ok_or(EvalError::Overflow),
            ArithExpr::Neg(a) => a.eval_int(subst)?.checked_neg().ok_or(EvalError::Overflow),
            ArithExpr::Abs(a) => a.eval_int(subst)?.checked_abs().ok_or(EvalError::Overflow),
        }
    }
}

/// Comparison operator of a builtin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// `lhs OP rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Builtin {
    pub op: CmpOp,
    pub lhs: ArithExpr,
    pub rhs: ArithExpr,
}

impl Builtin {
    pub fn new(op: CmpOp, lhs: ArithExpr, rhs: ArithExpr) -> Self {
        Builtin { op, lhs, rhs }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.lhs.collect_vars(out);
        self.rhs.collect_vars(out);
    }

    /// If this is `V = expr` (either side) with `V` unbound and `expr` fully
    /// bound, returns the variable and expression.
    pub fn assignment(&self, bound: &BTreeSet<String>) -> Option<(&str, &ArithExpr)> {
        if self.op != CmpOp::Eq {
            return None;
        }
        let ready = |e: &ArithExpr| {
            let mut vs = BTreeSet::new();
            e.collect_vars(&mut vs);
            vs.is_subset(bound)
        };
        match (self.lhs.as_var(), self.rhs.as_var()) {
            (Some(v), _) if !bound.contains(v) && ready(&self.rhs) => Some((v, &self.rhs)),
            (_, Some(v)) if !bound.contains(v) && ready(&self.lhs) => Some((v, &self.lhs)),
            _ => None,
        }
    }

    /// Evaluates a fully bound builtin.
    pub fn holds(&self, subst: &Subst) -> Result<bool, EvalError> {
        let l = self.lhs.eval(subst)?;
        let r = self.rhs.eval(subst)?;
        match self.op {
            CmpOp::Eq => Ok(l == r),
            CmpOp::Neq => Ok(l != r),
            _ => {
                let li = l.as_int().ok_or_else(|| EvalError::NotInteger(l.to_string()))?;
                let ri = r.as_int().ok_or_else(|| EvalError::NotInteger(r.to_string()))?;
                Ok(match self.op {
                    CmpOp::Lt => li < ri,
                    CmpOp::Le => li <= ri,
                    CmpOp::Gt => li > ri,
                    CmpOp::Ge => li >= ri,
                    CmpOp::Eq | CmpOp::Neq => unreachable!(),
                })
            }
        }
    }
}

/// Positive or ontologically negated (`not`) body literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    OntoNegated,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BodyLiteral {
    Lit {
        polarity: Polarity,
        atom: AnnotatedAtom,
    },
    Builtin(Builtin),
}

impl BodyLiteral {
    pub fn pos(atom: AnnotatedAtom) -> Self {
        BodyLiteral::Lit {
            polarity: Polarity::Positive,
            atom,
        }
    }

    pub fn neg(atom: AnnotatedAtom) -> Self {
        BodyLiteral::Lit {
            polarity: Polarity::OntoNegated,
            atom,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            BodyLiteral::Lit { atom, .. } => atom.pred.collect_vars(out),
            BodyLiteral::Builtin(b) => b.collect_vars(out),
        }
    }
}

/// `H1 ; ... ; Hm :- B1, ..., Bk.` An empty head is an integrity constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Vec<AnnotatedAtom>,
    pub body: Vec<BodyLiteral>,
}

impl Rule {
    pub fn new(head: Vec<AnnotatedAtom>, body: Vec<BodyLiteral>) -> Self {
        Rule { head, body }
    }

    pub fn fact(atom: AnnotatedAtom) -> Self {
        Rule::new(vec![atom], Vec::new())
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.head.iter().for_each(|a| a.pred.collect_vars(&mut out));
        self.body.iter().for_each(|b| b.collect_vars(&mut out));
        out
    }
}

/// A literal of a cardinality condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CondLiteral {
    Atom(AnnotatedAtom),
    Builtin(Builtin),
}

impl CondLiteral {
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            CondLiteral::Atom(a) => a.pred.collect_vars(out),
            CondLiteral::Builtin(b) => b.collect_vars(out),
        }
    }
}

/// `N { element : COND } N :- guard.`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CardinalityRule {
    pub count: u32,
    pub element: AnnotatedAtom,
    /// Disjunction of conjunctions; empty means unconditional.
    pub condition: Vec<Vec<CondLiteral>>,
    pub guard: Vec<BodyLiteral>,
    pub with_closure: bool,
}

/// `#domain name = {c1, ..., ck}.`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DomainDecl {
    pub name: String,
    pub constants: Vec<Term>,
}

/// `atom : top for V in dom ...` inside a preference level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefPattern {
    pub atom: PredicateTerm,
    /// `(variable, domain name)` pairs.
    pub binders: Vec<(String, String)>,
}

/// A named subset preference.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefLevel {
    pub name: String,
    pub patterns: Vec<PrefPattern>,
}

/// Preference levels in lexicographic order, most significant first. The
/// final level of all top atoms is implicit and added by the grounder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PreferenceSpec {
    pub levels: Vec<PrefLevel>,
}

/// A desugared program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub domains: Vec<DomainDecl>,
    pub rules: Vec<Rule>,
    pub cardinalities: Vec<CardinalityRule>,
    pub preference: Option<PreferenceSpec>,
}

impl Program {
    pub fn domain(&self, name: &str) -> Option<&DomainDecl> {
        self.domains.iter().find(|d| d.name == name)
    }

    /// Appends the statements of `other`.
    pub fn extend(&mut self, other: Program) {
        self.domains.extend(other.domains);
        self.rules.extend(other.rules);
        self.cardinalities.extend(other.cardinalities);
        match (&mut self.preference, other.preference) {
            (Some(mine), Some(theirs)) => mine.levels.extend(theirs.levels),
            (slot @ None, theirs) => *slot = theirs,
            (Some(_), None) => {}
        }
    }
}

// ---------------------------------------------------------------------------
// Surface layer

/// A formula built from annotated atoms with epistemic negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(AnnotatedAtom),
    ENeg(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawHead {
    /// `F1 ; ... ; Fm`
    Disjunction(Vec<Formula>),
    /// `(F1 ; ... <~ G1, ..., Gk)`
    Implication {
        conclusion: Vec<Formula>,
        premise: Vec<Formula>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawBodyLiteral {
    Lit { polarity: Polarity, formula: Formula },
    Builtin(Builtin),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawRule {
    pub head: RawHead,
    pub body: Vec<RawBodyLiteral>,
    pub span: Option<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawCardinality {
    pub count: u32,
    pub element: AnnotatedAtom,
    pub condition: Vec<Vec<CondLiteral>>,
    pub guard: Vec<RawBodyLiteral>,
    pub with_closure: bool,
    pub span: Option<SourceSpan>,
}

/// A program as written, before [`desugar`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RawProgram {
    pub domains: Vec<DomainDecl>,
    pub rules: Vec<RawRule>,
    pub cardinalities: Vec<RawCardinality>,
    pub preference: Option<PreferenceSpec>,
}

impl From<&Program> for RawProgram {
    fn from(p: &Program) -> Self {
        let lift_body = |b: &BodyLiteral| match b {
            BodyLiteral::Lit { polarity, atom } => RawBodyLiteral::Lit {
                polarity: *polarity,
                formula: Formula::Atom(atom.clone()),
            },
            BodyLiteral::Builtin(b) => RawBodyLiteral::Builtin(b.clone()),
        };
        RawProgram {
            domains: p.domains.clone(),
            rules: p
                .rules
                .iter()
                .map(|r| RawRule {
                    head: RawHead::Disjunction(r.head.iter().cloned().map(Formula::Atom).collect()),
                    body: r.body.iter().map(lift_body).collect(),
                    span: None,
                })
                .collect(),
            cardinalities: p
                .cardinalities
                .iter()
                .map(|c| RawCardinality {
                    count: c.count,
                    element: c.element.clone(),
                    condition: c.condition.clone(),
                    guard: c.guard.iter().map(lift_body).collect(),
                    with_closure: c.with_closure,
                    span: None,
                })
                .collect(),
            preference: p.preference.clone(),
        }
    }
}

/// Failure to eliminate an epistemic construct.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct DesugarError {
    pub message: String,
    pub span: Option<SourceSpan>,
}

/// Pushes epistemic negation down to the atoms.
fn push_eneg(f: &Formula, negated: bool) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(if negated { a.eneg() } else { a.clone() }),
        Formula::ENeg(inner) => push_eneg(inner, !negated),
        Formula::And(fs) => {
            let items = fs.iter().map(|g| push_eneg(g, negated)).collect();
            if negated {
                Formula::Or(items)
            } else {
                Formula::And(items)
            }
        }
        Formula::Or(fs) => {
            let items = fs.iter().map(|g| push_eneg(g, negated)).collect();
            if negated {
                Formula::And(items)
            } else {
                Formula::Or(items)
            }
        }
    }
}

/// Disjunctive normal form with epistemic negation pushed to the atoms.
pub fn to_dnf(f: &Formula) -> Vec<Vec<AnnotatedAtom>> {
    fn go(f: &Formula) -> Vec<Vec<AnnotatedAtom>> {
        match f {
            Formula::Atom(a) => vec![vec![a.clone()]],
            Formula::Or(fs) => fs.iter().flat_map(go).collect(),
            Formula::And(fs) => fs.iter().fold(vec![Vec::new()], |acc, g| {
                let rhs = go(g);
                acc.iter()
                    .flat_map(|l| {
                        rhs.iter().map(move |r| {
                            let mut c = l.clone();
                            c.extend(r.iter().cloned());
                            c
                        })
                    })
                    .collect()
            }),
            Formula::ENeg(_) => unreachable!("negation pushed to atoms first"),
        }
    }
    go(&push_eneg(f, false))
}

/// Flattens a negation-free formula into atoms joined by one connective.
fn flatten(f: &Formula, want_or: bool, out: &mut Vec<AnnotatedAtom>) -> Result<(), String> {
    match f {
        Formula::Atom(a) => {
            out.push(a.clone());
            Ok(())
        }
        Formula::Or(fs) if want_or || fs.len() == 1 => {
            fs.iter().try_for_each(|g| flatten(g, want_or, out))
        }
        Formula::And(fs) if !want_or || fs.len() == 1 => {
            fs.iter().try_for_each(|g| flatten(g, want_or, out))
        }
        Formula::Or(_) => Err("a disjunction cannot appear in a rule body".into()),
        Formula::And(_) => Err("a conjunction cannot appear in a rule head".into()),
        Formula::ENeg(_) => unreachable!("negation pushed to atoms first"),
    }
}

fn desugar_body(items: &[RawBodyLiteral]) -> Result<Vec<BodyLiteral>, String> {
    let mut body = Vec::new();
    for item in items {
        match item {
            RawBodyLiteral::Builtin(b) => body.push(BodyLiteral::Builtin(b.clone())),
            RawBodyLiteral::Lit { polarity, formula } => {
                let mut atoms = Vec::new();
                flatten(&push_eneg(formula, false), false, &mut atoms)?;
                if *polarity == Polarity::OntoNegated && atoms.len() != 1 {
                    return Err("`not` must apply to a single annotated atom".into());
                }
                body.extend(atoms.into_iter().map(|atom| BodyLiteral::Lit {
                    polarity: *polarity,
                    atom,
                }));
            }
        }
    }
    Ok(body)
}

fn desugar_head(head: &RawHead) -> Result<Vec<AnnotatedAtom>, String> {
    let mut out = Vec::new();
    match head {
        RawHead::Disjunction(fs) => {
            for f in fs {
                flatten(&push_eneg(f, false), true, &mut out)?;
            }
        }
        RawHead::Implication {
            conclusion,
            premise,
        } => {
            for f in conclusion {
                flatten(&push_eneg(f, false), true, &mut out)?;
            }
            // psi <~ phi  ==  psi ; ~phi
            let phi = Formula::And(premise.clone());
            flatten(&push_eneg(&phi, true), true, &mut out)?;
        }
    }
    Ok(out)
}

/// Eliminates epistemic negation and epistemic implication.
pub fn desugar(raw: &RawProgram) -> Result<Program, DesugarError> {
    let mut rules = Vec::with_capacity(raw.rules.len());
    for r in &raw.rules {
        let wrap = |message: String| DesugarError {
            message,
            span: r.span.clone(),
        };
        let head = desugar_head(&r.head).map_err(wrap)?;
        let body = desugar_body(&r.body).map_err(|m| DesugarError {
            message: m,
            span: r.span.clone(),
        })?;
        rules.push(Rule { head, body });
    }
    let mut cardinalities = Vec::with_capacity(raw.cardinalities.len());
    for c in &raw.cardinalities {
        let guard = desugar_body(&c.guard).map_err(|message| DesugarError {
            message,
            span: c.span.clone(),
        })?;
        cardinalities.push(CardinalityRule {
            count: c.count,
            element: c.element.clone(),
            condition: c.condition.clone(),
            guard,
            with_closure: c.with_closure,
        });
    }
    Ok(Program {
        domains: raw.domains.clone(),
        rules,
        cardinalities,
        preference: raw.preference.clone(),
    })
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// A validation finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    /// Canonical text of the offending statement.
    pub context: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: {}", self.message)?;
        if !self.context.is_empty() {
            write!(f, "\n  in: {}", self.context)?;
        }
        Ok(())
    }
}

/// Variables bound by positive non-bottom atoms and by `V = expr`
/// assignments, in the order the grounder would bind them.
pub fn bound_variables<'a>(
    atoms: impl IntoIterator<Item = &'a AnnotatedAtom>,
    builtins: &[&Builtin],
    seed: &BTreeSet<String>,
) -> BTreeSet<String> {
    let mut bound = seed.clone();
    for a in atoms {
        a.pred.collect_vars(&mut bound);
    }
    loop {
        let mut changed = false;
        for b in builtins {
            if let Some((v, _)) = b.assignment(&bound) {
                bound.insert(v.to_string());
                changed = true;
            }
        }
        if !changed {
            return bound;
        }
    }
}

fn binding_atoms(body: &[BodyLiteral]) -> impl Iterator<Item = &AnnotatedAtom> {
    body.iter().filter_map(|b| match b {
        BodyLiteral::Lit {
            polarity: Polarity::Positive,
            atom,
        } if atom.ann != TruthValue::Bottom => Some(atom),
        _ => None,
    })
}

fn body_builtins(body: &[BodyLiteral]) -> Vec<&Builtin> {
    body.iter()
        .filter_map(|b| match b {
            BodyLiteral::Builtin(b) => Some(b),
            _ => None,
        })
        .collect()
}

/// Variables of `body` that must be bound but are not.
fn unsafe_body_vars(body: &[BodyLiteral], bound: &BTreeSet<String>) -> BTreeSet<String> {
    let mut need = BTreeSet::new();
    for b in body {
        match b {
            BodyLiteral::Lit {
                polarity: Polarity::OntoNegated,
                atom,
            } => atom.pred.collect_vars(&mut need),
            BodyLiteral::Lit { atom, .. } if atom.ann == TruthValue::Bottom => {
                atom.pred.collect_vars(&mut need)
            }
            BodyLiteral::Builtin(b) => b.collect_vars(&mut need),
            BodyLiteral::Lit { .. } => {}
        }
    }
    need.difference(bound).cloned().collect()
}

/// Signatures whose only defining statements are ground `t` facts.
pub fn fact_closed_signatures(p: &Program) -> BTreeSet<Signature> {
    let mut defined = BTreeSet::new();
    let mut open = BTreeSet::new();
    for r in &p.rules {
        let is_fact = r.body.is_empty()
            && r.head.len() == 1
            && r.head[0].ann == TruthValue::True
            && r.head[0].pred.is_ground();
        for h in &r.head {
            let sig = h.pred.signature();
            if is_fact {
                defined.insert(sig);
            } else {
                open.insert(sig);
            }
        }
    }
    for c in &p.cardinalities {
        open.insert(c.element.pred.signature());
    }
    let mut all = BTreeSet::new();
    let mut note = |a: &AnnotatedAtom| {
        all.insert(a.pred.signature());
    };
    for r in &p.rules {
        r.head.iter().for_each(&mut note);
        for b in &r.body {
            if let BodyLiteral::Lit { atom, .. } = b {
                note(atom);
            }
        }
    }
    for c in &p.cardinalities {
        for alt in &c.condition {
            for l in alt {
                if let CondLiteral::Atom(a) = l {
                    note(a);
                }
            }
        }
    }
    all.extend(defined);
    all.into_iter().filter(|s| !open.contains(s)).collect()
}

/// Checks safety, arities, cardinality conditions and preference patterns.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut error = |message: String, context: String| {
        diags.push(Diagnostic {
            severity: Severity::Error,
            message,
            context,
        })
    };

    // Arity consistency.
    let mut arities: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut record = |pt: &PredicateTerm| {
        arities.entry(pt.symbol.clone()).or_default().insert(pt.arity());
    };
    for r in &p.rules {
        r.head.iter().for_each(|a| record(&a.pred));
        for b in &r.body {
            if let BodyLiteral::Lit { atom, .. } = b {
                record(&atom.pred);
            }
        }
    }
    for c in &p.cardinalities {
        record(&c.element.pred);
        c.condition.iter().flatten().for_each(|l| {
            if let CondLiteral::Atom(a) = l {
                record(&a.pred)
            }
        });
        for b in &c.guard {
            if let BodyLiteral::Lit { atom, .. } = b {
                record(&atom.pred);
            }
        }
    }
    if let Some(pref) = &p.preference {
        pref.levels
            .iter()
            .flat_map(|l| &l.patterns)
            .for_each(|pat| record(&pat.atom));
    }
    for (sym, ar) in &arities {
        if ar.len() > 1 {
            let list: Vec<String> = ar.iter().map(usize::to_string).collect();
            error(
                format!("predicate {sym} used with arities {}", list.join(" and ")),
                String::new(),
            );
        }
        if sym.starts_with('_') {
            error(format!("predicate name {sym} is reserved"), String::new());
        }
    }

    // Rule safety.
    for r in &p.rules {
        let builtins = body_builtins(&r.body);
        let bound = bound_variables(binding_atoms(&r.body), &builtins, &BTreeSet::new());
        for v in unsafe_body_vars(&r.body, &bound) {
            error(format!("unsafe variable {v}"), r.to_string());
        }
    }

    // Cardinality statements.
    let closed = fact_closed_signatures(p);
    for c in &p.cardinalities {
        let ctx = c.to_string();
        if c.element.ann != TruthValue::True {
            error("cardinality element must be annotated t".into(), ctx.clone());
        }
        let gbuiltins = body_builtins(&c.guard);
        let gbound = bound_variables(binding_atoms(&c.guard), &gbuiltins, &BTreeSet::new());
        for v in unsafe_body_vars(&c.guard, &gbound) {
            error(format!("unsafe variable {v}"), ctx.clone());
        }
        let alternatives: Vec<&[CondLiteral]> = if c.condition.is_empty() {
            vec![&[]]
        } else {
            c.condition.iter().map(Vec::as_slice).collect()
        };
        for alt in alternatives {
            let atoms: Vec<&AnnotatedAtom> = alt
                .iter()
                .filter_map(|l| match l {
                    CondLiteral::Atom(a) => Some(a),
                    _ => None,
                })
                .collect();
            for a in &atoms {
                if a.ann != TruthValue::True {
                    error("condition atoms must be annotated t".into(), ctx.clone());
                }
                if !closed.contains(&a.pred.signature()) {
                    error(
                        format!("condition not fact-closed: {}", a.pred.signature()),
                        ctx.clone(),
                    );
                }
            }
            let builtins: Vec<&Builtin> = alt
                .iter()
                .filter_map(|l| match l {
                    CondLiteral::Builtin(b) => Some(b),
                    _ => None,
                })
                .collect();
            let bound = bound_variables(atoms.iter().copied(), &builtins, &gbound);
            let mut need = BTreeSet::new();
            c.element.pred.collect_vars(&mut need);
            builtins.iter().for_each(|b| b.collect_vars(&mut need));
            for v in need.difference(&bound) {
                error(format!("unsafe variable {v}"), ctx.clone());
            }
        }
    }

    // Preferences.
    if let Some(pref) = &p.preference {
        let mut names = BTreeSet::new();
        for level in &pref.levels {
            if !names.insert(level.name.as_str()) {
                error(format!("duplicate preference {}", level.name), String::new());
            }
            for pat in &level.patterns {
                let mut vars = BTreeSet::new();
                pat.atom.collect_vars(&mut vars);
                let mut bound = BTreeSet::new();
                for (v, d) in &pat.binders {
                    if p.domain(d).is_none() {
                        error(format!("domain {d} not declared"), level.name.clone());
                    }
                    bound.insert(v.clone());
                }
                for v in vars.difference(&bound) {
                    error(
                        format!("preference pattern variable {v} is not bound by a domain"),
                        level.name.clone(),
                    );
                }
            }
        }
    }

    let mut seen = BTreeSet::new();
    for d in &p.domains {
        if !seen.insert(d.name.as_str()) {
            error(format!("duplicate domain {}", d.name), String::new());
        }
        for c in &d.constants {
            if !c.is_ground() {
                error(format!("domain {} contains a variable", d.name), String::new());
            }
        }
    }
    diags
}

// ---------------------------------------------------------------------------
// Canonical text

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Compound { functor, args } => {
                f.write_str(functor)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for PredicateTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for AnnotatedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.pred, self.ann)
    }
}

impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithExpr::Term(t) => write!(f, "{t}"),
            ArithExpr::Add(a, b) | ArithExpr::Sub(a, b) => {
                let op = if matches!(self, ArithExpr::Add(..)) { "+" } else { "-" };
                write!(f, "{a} {op} ")?;
                if matches!(**b, ArithExpr::Add(..) | ArithExpr::Sub(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            ArithExpr::Neg(a) => write!(f, "-({a})"),
            ArithExpr::Abs(a) => write!(f, "|{a}|"),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

impl fmt::Display for BodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyLiteral::Lit {
                polarity: Polarity::Positive,
                atom,
            } => write!(f, "{atom}"),
            BodyLiteral::Lit {
                polarity: Polarity::OntoNegated,
                atom,
            } => write!(f, "not {atom}"),
            BodyLiteral::Builtin(b) => write!(f, "{b}"),
        }
    }
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.head, " ; ")?;
        if !self.body.is_empty() {
            if self.head.is_empty() {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            write_joined(f, &self.body, ", ")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for CondLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CondLiteral::Atom(a) => write!(f, "{a}"),
            CondLiteral::Builtin(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for CardinalityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{ {}", self.count, self.element)?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            for (i, alt) in self.condition.iter().enumerate() {
                if i > 0 {
                    f.write_str(" or ")?;
                }
                write_joined(f, alt, ", ")?;
            }
        }
        write!(f, " }} {}", self.count)?;
        if !self.guard.is_empty() {
            f.write_str(" :- ")?;
            write_joined(f, &self.guard, ", ")?;
        }
        if !self.with_closure {
            f.write_str(" #noclosure")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for DomainDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#domain {} = {{", self.name)?;
        write_joined(f, &self.constants, ", ")?;
        f.write_str("}.")
    }
}

impl fmt::Display for PrefPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : top", self.atom)?;
        for (v, d) in &self.binders {
            write!(f, " for {v} in {d}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PrefLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#pref {} subset {{ ", self.name)?;
        write_joined(f, &self.patterns, ", ")?;
        f.write_str(" }.")
    }
}
