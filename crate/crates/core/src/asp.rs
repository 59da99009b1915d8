//! Translation into a reified answer-set program over `truth/2`, and the
//! bridge to an external ASP solver.
//!
//! Every annotated atom `p : s` becomes `truth(p,s)`, ontological negation
//! becomes default negation, and four background axioms restore the
//! lattice closure:
//!
//! ```text
//! truth(X,top) :- truth(X,t),truth(X,f).
//! truth(X,t) :- truth(X,top).
//! truth(X,f) :- truth(X,top).
//! truth(X,bottom).
//! ```
//!
//! Preference levels become one `lexico` preference over named `subset`
//! preferences, the most significant level carrying the highest weight.
//!
//! ```
//! use apclp::{asp, parser};
//!
//! let p = parser::parse("person(roberta) : t.\nmale(X) : t ; female(X) : t :- person(X) : t.").unwrap();
//! let doc = asp::translate(&p);
//! assert!(doc.program_text.contains("truth(person(roberta),t)."));
//! assert!(doc.program_text.contains("truth(male(X),t);truth(female(X),t):-truth(person(X),t)."));
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::ast::{
    bound_variables, AnnotatedAtom, ArithExpr, BodyLiteral, Builtin, CardinalityRule, CondLiteral,
    Polarity, PredicateTerm, Program, Rule, Term,
};
use crate::grounder::{herbrand_universe, GroundProgram, BTOP_LEVEL};
use crate::lattice::TruthValue;
use crate::parser::parse_term;
use crate::semantics::{canonical_order, Interpretation};
use crate::solver::{SolveResult, SolveStats};

/// The four background axioms, one per line.
pub const BACKGROUND_AXIOMS: [&str; 4] = [
    "truth(X,top) :- truth(X,t),truth(X,f).",
    "truth(X,t) :- truth(X,top).",
    "truth(X,f) :- truth(X,top).",
    "truth(X,bottom).",
];

/// Safe variant of the last axiom used when running a solver.
const BOTTOM_AXIOM_SAFE: &str = "truth(X,bottom):-hu(X).";

/// Environment variable naming the external solver binary.
pub const SOLVER_ENV: &str = "APCLP_ASP_SOLVER";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspDocument {
    pub program_text: String,
    /// Preference statements and the optimize directive; empty when there
    /// is nothing to prefer.
    pub preference_text: String,
}

impl AspDocument {
    /// Both parts in one text.
    pub fn combined(&self) -> String {
        format!("{}{}", self.program_text, self.preference_text)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AspError {
    #[error("malformed answer set token `{0}`")]
    Malformed(String),
    #[error("unknown annotation `{0}`")]
    UnknownAnnotation(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("not an ASP_truth program: {0}")]
    NotTruthProgram(String),
    #[error("external solver not found: {0}")]
    SolverNotFound(String),
    #[error("external solver failed with status {status}: {stderr}")]
    SolverFailed { status: String, stderr: String },
    #[error("external solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Structured embedding

/// An atom `truth(term,value)` of the target program.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthAtom {
    pub term: Term,
    pub value: TruthValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AspLiteral {
    Pos(TruthAtom),
    Not(TruthAtom),
    Builtin(Builtin),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspRule {
    pub head: Vec<TruthAtom>,
    pub body: Vec<AspLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AspProgram {
    pub rules: Vec<AspRule>,
}

pub fn xi_atom(a: &AnnotatedAtom) -> TruthAtom {
    TruthAtom {
        term: a.pred.to_term(),
        value: a.ann,
    }
}

pub fn xi_atom_inverse(a: &TruthAtom) -> Result<AnnotatedAtom, AspError> {
    match &a.term {
        Term::Compound { functor, args } => Ok(AnnotatedAtom::new(
            PredicateTerm::new(functor.clone(), args.clone()),
            a.value,
        )),
        Term::Var(v) => Err(AspError::NotTruthProgram(format!("variable `{v}` in atom position"))),
    }
}

pub fn xi_rule(r: &Rule) -> AspRule {
    AspRule {
        head: r.head.iter().map(xi_atom).collect(),
        body: r
            .body
            .iter()
            .map(|b| match b {
                BodyLiteral::Lit {
                    polarity: Polarity::Positive,
                    atom,
                } => AspLiteral::Pos(xi_atom(atom)),
                BodyLiteral::Lit {
                    polarity: Polarity::OntoNegated,
                    atom,
                } => AspLiteral::Not(xi_atom(atom)),
                BodyLiteral::Builtin(b) => AspLiteral::Builtin(b.clone()),
            })
            .collect(),
    }
}

pub fn xi_rule_inverse(r: &AspRule) -> Result<Rule, AspError> {
    let head = r.head.iter().map(xi_atom_inverse).collect::<Result<_, _>>()?;
    let body = r
        .body
        .iter()
        .map(|l| {
            Ok(match l {
                AspLiteral::Pos(a) => BodyLiteral::pos(xi_atom_inverse(a)?),
                AspLiteral::Not(a) => BodyLiteral::neg(xi_atom_inverse(a)?),
                AspLiteral::Builtin(b) => BodyLiteral::Builtin(b.clone()),
            })
        })
        .collect::<Result<_, AspError>>()?;
    Ok(Rule::new(head, body))
}

pub fn xi_program(rules: &[Rule]) -> AspProgram {
    AspProgram {
        rules: rules.iter().map(xi_rule).collect(),
    }
}

pub fn xi_program_inverse(p: &AspProgram) -> Result<Vec<Rule>, AspError> {
    p.rules.iter().map(xi_rule_inverse).collect()
}

/// The image of `i` as a set of `truth/2` atoms over `atoms`, including
/// the `bottom` atom of each.
pub fn xi_interpretation(i: &Interpretation, atoms: &[PredicateTerm]) -> BTreeSet<TruthAtom> {
    i.atom_set(atoms).iter().map(xi_atom).collect()
}

pub fn xi_interpretation_inverse(set: &BTreeSet<TruthAtom>) -> Result<Interpretation, AspError> {
    let atoms = set
        .iter()
        .map(xi_atom_inverse)
        .collect::<Result<BTreeSet<_>, _>>()?;
    Interpretation::from_closed_set(&atoms).map_err(AspError::NotTruthProgram)
}

/// Gelfond-Lifschitz reduct of a ground target program by a set of atoms.
pub fn asp_reduct(p: &AspProgram, i: &BTreeSet<TruthAtom>) -> AspProgram {
    AspProgram {
        rules: p
            .rules
            .iter()
            .filter(|r| {
                r.body
                    .iter()
                    .all(|l| !matches!(l, AspLiteral::Not(a) if i.contains(a)))
            })
            .map(|r| AspRule {
                head: r.head.clone(),
                body: r
                    .body
                    .iter()
                    .filter(|l| !matches!(l, AspLiteral::Not(_)))
                    .cloned()
                    .collect(),
            })
            .collect(),
    }
}

/// Whether a set of ground atoms satisfies every rule of a ground target
/// program and the background axioms.
pub fn asp_is_model(p: &AspProgram, i: &BTreeSet<TruthAtom>) -> bool {
    let closed = i.iter().all(|a| {
        let has = |v| {
            i.contains(&TruthAtom {
                term: a.term.clone(),
                value: v,
            })
        };
        has(TruthValue::Bottom)
            && (has(TruthValue::Top) == (has(TruthValue::True) && has(TruthValue::False)))
    });
    closed
        && p.rules.iter().all(|r| {
            let body = r.body.iter().all(|l| match l {
                AspLiteral::Pos(a) => i.contains(a),
                AspLiteral::Not(a) => !i.contains(a),
                AspLiteral::Builtin(b) => b.holds(&Default::default()).unwrap_or(false),
            });
            !body || r.head.iter().any(|a| i.contains(a))
        })
}

// ---------------------------------------------------------------------------
// Text emission

impl fmt::Display for TruthAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "truth({},{})", self.term, self.value.name())
    }
}

fn expr_text(e: &ArithExpr) -> String {
    let operand = |e: &ArithExpr| match e {
        ArithExpr::Add(..) | ArithExpr::Sub(..) => format!("({})", expr_text(e)),
        _ => expr_text(e),
    };
    match e {
        ArithExpr::Term(t) => t.to_string(),
        ArithExpr::Add(a, b) => format!("{}+{}", operand(a), operand(b)),
        ArithExpr::Sub(a, b) => format!("{}-{}", operand(a), operand(b)),
        ArithExpr::Neg(a) => match &**a {
            ArithExpr::Term(t) => format!("-{t}"),
            other => format!("-({})", expr_text(other)),
        },
        ArithExpr::Abs(a) => format!("|{}|", expr_text(a)),
    }
}

fn builtin_text(b: &Builtin) -> String {
    format!("{}{}{}", expr_text(&b.lhs), b.op.symbol(), expr_text(&b.rhs))
}

impl fmt::Display for AspLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AspLiteral::Pos(a) => write!(f, "{a}"),
            AspLiteral::Not(a) => write!(f, "not {a}"),
            AspLiteral::Builtin(b) => f.write_str(&builtin_text(b)),
        }
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn rule_text(head: &str, body: &[String]) -> String {
    match (head.is_empty(), body.is_empty()) {
        (_, true) => format!("{head}."),
        (true, false) => format!(":-{}.", body.join(",")),
        (false, false) => format!("{head}:-{}.", body.join(",")),
    }
}

impl fmt::Display for AspRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(|l| l.to_string()).collect();
        f.write_str(&rule_text(&join(&self.head, ";"), &body))
    }
}

impl fmt::Display for AspProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn dom_literals(vars: impl IntoIterator<Item = String>) -> Vec<String> {
    vars.into_iter().map(|v| format!("dom({v})")).collect()
}

fn builtins_of(body: &[BodyLiteral]) -> Vec<&Builtin> {
    body.iter()
        .filter_map(|b| match b {
            BodyLiteral::Builtin(b) => Some(b),
            _ => None,
        })
        .collect()
}

fn positive_atoms(body: &[BodyLiteral]) -> impl Iterator<Item = &AnnotatedAtom> {
    body.iter().filter_map(|b| match b {
        BodyLiteral::Lit {
            polarity: Polarity::Positive,
            atom,
        } if atom.ann != TruthValue::Bottom => Some(atom),
        _ => None,
    })
}

fn rule_line(r: &Rule) -> String {
    let asp = xi_rule(r);
    let bound = bound_variables(positive_atoms(&r.body), &builtins_of(&r.body), &BTreeSet::new());
    let mut free = BTreeSet::new();
    for a in &r.head {
        a.pred.collect_vars(&mut free);
    }
    let mut body: Vec<String> = asp.body.iter().map(|l| l.to_string()).collect();
    body.extend(dom_literals(free.difference(&bound).cloned()));
    rule_text(&join(&asp.head, ";"), &body)
}

fn cond_text(c: &CondLiteral) -> String {
    match c {
        CondLiteral::Atom(a) => xi_atom(a).to_string(),
        CondLiteral::Builtin(b) => builtin_text(b),
    }
}

fn cardinality_lines(c: &CardinalityRule) -> Vec<String> {
    let elem = xi_atom(&c.element).to_string();
    let guard: Vec<String> = xi_rule(&Rule::new(Vec::new(), c.guard.clone()))
        .body
        .iter()
        .map(|l| l.to_string())
        .collect();
    let guard_bound = bound_variables(positive_atoms(&c.guard), &builtins_of(&c.guard), &BTreeSet::new());
    let mut elem_vars = BTreeSet::new();
    c.element.pred.collect_vars(&mut elem_vars);

    let alternatives: Vec<Vec<String>> = if c.condition.is_empty() {
        vec![Vec::new()]
    } else {
        c.condition
            .iter()
            .map(|alt| {
                let atoms: Vec<&AnnotatedAtom> = alt
                    .iter()
                    .filter_map(|l| match l {
                        CondLiteral::Atom(a) => Some(a),
                        _ => None,
                    })
                    .collect();
                let builtins: Vec<&Builtin> = alt
                    .iter()
                    .filter_map(|l| match l {
                        CondLiteral::Builtin(b) => Some(b),
                        _ => None,
                    })
                    .collect();
                let bound = bound_variables(atoms, &builtins, &guard_bound);
                let mut lits: Vec<String> = alt.iter().map(cond_text).collect();
                lits.extend(dom_literals(elem_vars.difference(&bound).cloned()));
                lits
            })
            .collect()
    };

    let elements: Vec<String> = alternatives
        .iter()
        .map(|alt| {
            if alt.is_empty() {
                elem.clone()
            } else {
                format!("{elem}:{}", alt.join(","))
            }
        })
        .collect();
    let n = c.count;
    let head = format!("{n} {{{}}} {n}", elements.join(";"));
    let mut out = vec![rule_text(&head, &guard)];
    if c.with_closure {
        let off = TruthAtom {
            term: c.element.pred.to_term(),
            value: TruthValue::False,
        };
        for alt in &alternatives {
            let mut body = alt.clone();
            body.extend(guard.iter().cloned());
            body.push(format!("not {elem}"));
            out.push(rule_text(&off.to_string(), &body));
        }
    }
    out
}

/// Predicate symbols with arities, in order of first appearance.
fn signatures(p: &Program) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = Vec::new();
    let mut note = |pt: &PredicateTerm| {
        let s = (pt.symbol.clone(), pt.arity());
        if !out.contains(&s) {
            out.push(s);
        }
    };
    let body_atoms = |body: &[BodyLiteral]| -> Vec<PredicateTerm> {
        body.iter()
            .filter_map(|b| match b {
                BodyLiteral::Lit { atom, .. } => Some(atom.pred.clone()),
                _ => None,
            })
            .collect()
    };
    for r in &p.rules {
        r.head.iter().for_each(|a| note(&a.pred));
        body_atoms(&r.body).iter().for_each(&mut note);
    }
    for c in &p.cardinalities {
        note(&c.element.pred);
        for alt in &c.condition {
            for l in alt {
                if let CondLiteral::Atom(a) = l {
                    note(&a.pred);
                }
            }
        }
        body_atoms(&c.guard).iter().for_each(&mut note);
    }
    if let Some(spec) = &p.preference {
        for l in &spec.levels {
            l.patterns.iter().for_each(|pat| note(&pat.atom));
        }
    }
    out
}

fn hu_line(name: &str, arity: usize) -> String {
    if arity == 0 {
        return format!("hu({name}).");
    }
    let vars: Vec<String> = (1..=arity).map(|i| format!("X{i}")).collect();
    let doms: Vec<String> = vars.iter().map(|v| format!("dom({v})")).collect();
    format!("hu({name}({})):-{}.", vars.join(","), doms.join(","))
}

fn lexico_line(names: &[String]) -> String {
    let n = names.len();
    let items: Vec<String> = names
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{}::name({s})", n - i))
        .collect();
    format!("#preference(all,lexico){{{}}}.", items.join(";"))
}

fn push_axioms(out: &mut String) {
    for a in BACKGROUND_AXIOMS {
        out.push_str(a);
        out.push('\n');
    }
    out.push_str("#show truth/2.\n");
}

/// Translates a non-ground program, keeping cardinality statements as
/// count aggregates.
pub fn translate(p: &Program) -> AspDocument {
    let mut prog = String::new();
    for r in &p.rules {
        prog.push_str(&rule_line(r));
        prog.push('\n');
    }
    for c in &p.cardinalities {
        for l in cardinality_lines(c) {
            prog.push_str(&l);
            prog.push('\n');
        }
    }
    let universe = herbrand_universe(p);
    if !universe.is_empty() {
        prog.push_str(&format!("dom({}).\n", join(&universe, ";")));
    }
    for (name, arity) in signatures(p) {
        prog.push_str(&hu_line(&name, arity));
        prog.push('\n');
    }
    for d in &p.domains {
        for c in &d.constants {
            prog.push_str(&format!("domain({},{c}).\n", d.name));
        }
    }
    push_axioms(&mut prog);

    let mut pref = String::new();
    let mut names: Vec<String> = Vec::new();
    let mut levels = Vec::new();
    if let Some(spec) = &p.preference {
        for l in &spec.levels {
            names.push(l.name.clone());
            let elems: Vec<String> = l
                .patterns
                .iter()
                .map(|pat| {
                    let atom = TruthAtom {
                        term: pat.atom.to_term(),
                        value: TruthValue::Top,
                    };
                    if pat.binders.is_empty() {
                        atom.to_string()
                    } else {
                        let conds: Vec<String> = pat
                            .binders
                            .iter()
                            .map(|(v, d)| format!("domain({d},{v})"))
                            .collect();
                        format!("{atom} : {}", conds.join(","))
                    }
                })
                .collect();
            levels.push(format!("#preference({},subset){{{}}}.", l.name, elems.join(";")));
        }
    }
    names.push(BTOP_LEVEL.to_string());
    levels.push(format!("#preference({BTOP_LEVEL},subset){{truth(X,top) : hu(X)}}."));
    pref.push_str(&lexico_line(&names));
    pref.push('\n');
    for l in levels {
        pref.push_str(&l);
        pref.push('\n');
    }
    pref.push_str("#optimize(all).\n");
    AspDocument {
        program_text: prog,
        preference_text: pref,
    }
}

/// Translates a ground program rule by rule, including auxiliary atoms,
/// with explicit atom lists for the preference levels.
pub fn translate_ground(g: &GroundProgram) -> AspDocument {
    let atom = |id: usize, v: TruthValue| TruthAtom {
        term: g.atom(id).to_term(),
        value: v,
    };
    let mut prog = String::new();
    for r in &g.rules {
        let head: Vec<TruthAtom> = r.head.iter().map(|(p, v)| atom(*p, *v)).collect();
        let body: Vec<String> = r
            .body
            .iter()
            .map(|l| {
                let a = atom(l.atom, l.ann);
                if l.neg {
                    format!("not {a}")
                } else {
                    a.to_string()
                }
            })
            .collect();
        prog.push_str(&rule_text(&join(&head, ";"), &body));
        prog.push('\n');
    }
    for p in g.atoms() {
        prog.push_str(&format!("hu({p}).\n"));
    }
    push_axioms(&mut prog);

    let levels: Vec<(&str, Vec<String>)> = g
        .levels
        .iter()
        .filter(|l| !l.atoms.is_empty())
        .map(|l| {
            (
                l.name.as_str(),
                l.atoms.iter().map(|p| atom(*p, TruthValue::Top).to_string()).collect(),
            )
        })
        .collect();
    let mut pref = String::new();
    if !levels.is_empty() {
        let names: Vec<String> = levels.iter().map(|(n, _)| n.to_string()).collect();
        pref.push_str(&lexico_line(&names));
        pref.push('\n');
        for (name, atoms) in &levels {
            pref.push_str(&format!("#preference({name},subset){{{}}}.\n", atoms.join(";")));
        }
        pref.push_str("#optimize(all).\n");
    }
    AspDocument {
        program_text: prog,
        preference_text: pref,
    }
}

// ---------------------------------------------------------------------------
// Answer sets

/// Splits `truth(term,value)` into its two arguments.
fn split_truth(tok: &str) -> Option<(&str, &str)> {
    let inner = tok.strip_prefix("truth(")?.strip_suffix(')')?;
    let mut depth = 0i32;
    let mut last = None;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => last = Some(i),
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    let i = last?;
    Some((&inner[..i], &inner[i + 1..]))
}

/// Parses one answer set of whitespace-separated `truth/2` atoms. Each
/// atom's value is the `lub` of everything reported for it. In strict mode
/// every atom must be among `atoms`; `bottom` atoms carry no information
/// and are accepted for any term. Grounder auxiliaries (`_`-prefixed) are
/// skipped.
pub fn parse_answer_set(
    text: &str,
    atoms: &[PredicateTerm],
    permissive: bool,
) -> Result<Interpretation, AspError> {
    let known: BTreeSet<&PredicateTerm> = atoms.iter().collect();
    let mut out = Interpretation::new();
    for tok in text.split_whitespace() {
        let (term, value) = split_truth(tok).ok_or_else(|| AspError::Malformed(tok.to_string()))?;
        if term.starts_with('_') {
            continue;
        }
        let value: TruthValue = value
            .parse()
            .map_err(|_| AspError::UnknownAnnotation(value.to_string()))?;
        let term = parse_term(term).map_err(|_| AspError::Malformed(tok.to_string()))?;
        if !term.is_ground() {
            return Err(AspError::Malformed(tok.to_string()));
        }
        let a = xi_atom_inverse(&TruthAtom { term, value })?;
        if value == TruthValue::Bottom {
            continue;
        }
        if !permissive && !known.contains(&a.pred) {
            return Err(AspError::UnknownAtom(a.pred.to_string()));
        }
        out.join(a.pred, value);
    }
    Ok(out)
}

/// Answer sets printed by the solver. When any answer is marked optimal,
/// only the optimal ones are returned.
pub fn parse_solver_output(out: &str) -> Vec<String> {
    let lines: Vec<&str> = out.lines().collect();
    let mut answers = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].starts_with("Answer:") {
            let text = lines.get(i + 1).copied().unwrap_or("").to_string();
            let optimal = lines.get(i + 2).is_some_and(|l| l.trim_start().starts_with("OPTIMUM FOUND"));
            answers.push((text, optimal));
            i += 2;
        } else {
            i += 1;
        }
    }
    if answers.iter().any(|(_, o)| *o) {
        answers.retain(|(_, o)| *o);
    }
    answers.into_iter().map(|(t, _)| t).collect()
}

/// Turns the document into text a solver accepts: the unsafe bottom axiom
/// is scoped by `hu/1`, and lexico references use the `**name` form.
pub fn runnable(doc: &AspDocument) -> AspDocument {
    let program_text = doc
        .program_text
        .lines()
        .map(|l| if l == BACKGROUND_AXIOMS[3] { BOTTOM_AXIOM_SAFE } else { l })
        .map(|l| format!("{l}\n"))
        .collect();
    let mut preference_text = String::new();
    for line in doc.preference_text.lines() {
        if line.starts_with("#preference(all,lexico)") {
            let mut rest = line;
            let mut fixed = String::new();
            while let Some(i) = rest.find("::name(") {
                fixed.push_str(&rest[..i]);
                fixed.push_str("::**");
                let after = &rest[i + "::name(".len()..];
                let close = after.find(')').unwrap_or(after.len());
                fixed.push_str(&after[..close]);
                rest = after.get(close + 1..).unwrap_or("");
            }
            fixed.push_str(rest);
            preference_text.push_str(&fixed);
        } else {
            preference_text.push_str(line);
        }
        preference_text.push('\n');
    }
    AspDocument {
        program_text,
        preference_text,
    }
}

// ---------------------------------------------------------------------------
// External runs

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalRunConfig {
    pub solver_path: PathBuf,
    pub extra_args: Vec<String>,
    pub timeout: Duration,
    /// Number of answers requested; 0 asks for all.
    pub enumeration_cap: usize,
}

impl ExternalRunConfig {
    pub fn new(solver_path: impl Into<PathBuf>) -> Self {
        ExternalRunConfig {
            solver_path: solver_path.into(),
            extra_args: Vec::new(),
            timeout: Duration::from_secs(60),
            enumeration_cap: 0,
        }
    }

    /// The configuration named by `APCLP_ASP_SOLVER`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(SOLVER_ENV)
            .filter(|v| !v.is_empty())
            .map(ExternalRunConfig::new)
    }
}

/// Runs the solver on `doc`. With `preferred` the preference statements
/// are passed too and only optimal answers are kept.
pub fn solve_external(
    doc: &AspDocument,
    cfg: &ExternalRunConfig,
    preferred: bool,
) -> Result<SolveResult, AspError> {
    let start = Instant::now();
    let doc = runnable(doc);
    let dir = tempfile::tempdir()?;
    let prog_path = dir.path().join("program.lp");
    std::fs::write(&prog_path, &doc.program_text)?;
    let mut cmd = Command::new(&cfg.solver_path);
    cmd.args(&cfg.extra_args).arg(&prog_path);
    if preferred && !doc.preference_text.is_empty() {
        let pref_path = dir.path().join("preferences.lp");
        std::fs::write(&pref_path, &doc.preference_text)?;
        cmd.arg(pref_path);
    }
    cmd.arg(cfg.enumeration_cap.to_string())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
            AspError::SolverNotFound(cfg.solver_path.display().to_string())
        }
        _ => AspError::Io(e),
    })?;
    let mut stdout = child.stdout.take().expect("piped");
    let mut stderr = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        stderr.read_to_string(&mut s).map(|_| s)
    });
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() > cfg.timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(AspError::Timeout(cfg.timeout));
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let out = out_reader.join().expect("reader thread")?;
    let err = err_reader.join().expect("reader thread")?;
    // clingo reports satisfiability through exit codes 10, 20 and 30.
    if !matches!(status.code(), Some(0 | 10 | 20 | 30)) {
        return Err(AspError::SolverFailed {
            status: status.to_string(),
            stderr: err.trim().to_string(),
        });
    }
    let answers = parse_solver_output(&out);
    let mut models = Vec::new();
    for a in &answers {
        let m = parse_answer_set(a, &[], true)?;
        if !models.contains(&m) {
            models.push(m);
        }
    }
    canonical_order(&mut models);
    Ok(SolveResult {
        models,
        stats: SolveStats {
            ground_rules: 0,
            candidates_explored: answers.len() as u64,
            elapsed_ms: start.elapsed().as_millis(),
        },
        truncated: cfg.enumeration_cap != 0 && answers.len() >= cfg.enumeration_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn fact_and_disjunction() {
        let p = parse("person(roberta) : t.\nmale(X) : t ; female(X) : t :- person(X) : t.").unwrap();
        let doc = translate(&p);
        let lines: Vec<&str> = doc.program_text.lines().collect();
        assert_eq!(lines[0], "truth(person(roberta),t).");
        assert_eq!(lines[1], "truth(male(X),t);truth(female(X),t):-truth(person(X),t).");
        assert_eq!(lines[2], "dom(roberta).");
        for a in BACKGROUND_AXIOMS {
            assert_eq!(doc.program_text.matches(a).count(), 1);
        }
    }

    #[test]
    fn cardinality_as_aggregate() {
        let p = parse(
            "person(pete) : t.\njob(chef) : t.\n1 { hold(X,Y) : t : person(X) : t } 1 :- job(Y) : t.",
        )
        .unwrap();
        let doc = translate(&p);
        assert!(doc
            .program_text
            .contains("1 {truth(hold(X,Y),t):truth(person(X),t)} 1:-truth(job(Y),t).\n"));
        assert!(doc.program_text.contains(
            "truth(hold(X,Y),f):-truth(person(X),t),truth(job(Y),t),not truth(hold(X,Y),t).\n"
        ));
    }

    #[test]
    fn head_only_variables_get_dom() {
        let p = parse("a : t.\np(X) : t.").unwrap();
        assert!(translate(&p).program_text.contains("truth(p(X),t):-dom(X).\n"));
    }

    #[test]
    fn preference_weights() {
        let p = parse(
            "#domain ps = {a}.\np(a) : t.\n#pref s1 subset { p(X) : top for X in ps }.\n#pref s2 subset { q : top }.\n#lexico (s1, s2).",
        )
        .unwrap();
        let doc = translate(&p);
        let lines: Vec<&str> = doc.preference_text.lines().collect();
        assert_eq!(lines[0], "#preference(all,lexico){3::name(s1);2::name(s2);1::name(btop)}.");
        assert_eq!(lines[1], "#preference(s1,subset){truth(p(X),top) : domain(ps,X)}.");
        assert_eq!(lines[2], "#preference(s2,subset){truth(q,top)}.");
        let run = runnable(&doc);
        assert!(run.preference_text.starts_with("#preference(all,lexico){3::**s1;2::**s2;1::**btop}."));
        assert!(run.program_text.contains("truth(X,bottom):-hu(X).\n"));
    }

    #[test]
    fn answer_sets() {
        let p = PredicateTerm::ground("p", &[]);
        let i = parse_answer_set("truth(p,t) truth(p,f)", &[p.clone()], false).unwrap();
        assert_eq!(i.get(&p), TruthValue::Top);
        let i = parse_answer_set("truth(p,bottom)", &[], false).unwrap();
        assert!(i.is_empty());
        assert!(matches!(parse_answer_set("truth(q,t)", &[p.clone()], false), Err(AspError::UnknownAtom(_))));
        assert!(matches!(parse_answer_set("truth(p,maybe)", &[p.clone()], false), Err(AspError::UnknownAnnotation(_))));
        assert!(matches!(parse_answer_set("hu(p)", &[p], false), Err(AspError::Malformed(_))));
        let i = parse_answer_set("truth(f(a,g(b)),f)", &[], true).unwrap();
        assert_eq!(i.len(), 1);
    }

    #[test]
    fn solver_output() {
        let out = "Answer: 1\ntruth(p,t)\nAnswer: 2\ntruth(q,t)\nOPTIMUM FOUND\nAnswer: 3\n\nOPTIMUM FOUND *\n";
        assert_eq!(parse_solver_output(out), vec!["truth(q,t)".to_string(), String::new()]);
        let out = "Answer: 1 (Time: 0.0s)\ntruth(p,t)\nAnswer: 2\ntruth(q,t)\nSATISFIABLE\n";
        assert_eq!(parse_solver_output(out).len(), 2);
    }

    #[test]
    fn missing_binary() {
        let doc = translate(&parse("p : t.").unwrap());
        let cfg = ExternalRunConfig::new("/nonexistent/solver-binary");
        let e = solve_external(&doc, &cfg, false).unwrap_err();
        assert!(e.to_string().starts_with("external solver not found"));
    }
}
