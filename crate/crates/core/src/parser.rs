//! Concrete syntax: text to [`Program`] and back.
//!
//! ```
//! let p = apclp::parser::parse("p : t.\nq : t :- p : t, not r : top.").unwrap();
//! assert_eq!(apclp::parser::render(&p), "p : t.\nq : t :- p : t, not r : top.\n");
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use crate::ast::*;
use crate::lattice::TruthValue;
use crate::semantics::QueryFormula;

/// A 1-based region of an input file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SourceSpan {
    pub file: Option<PathBuf>,
    pub start_line: usize,
    pub start_col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{}:", file.display())?;
        }
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(String),
    Directive(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    If,
    Dot,
    Tilde,
    EImpl,
    Pipe,
    Plus,
    Minus,
    Cmp(CmpOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Directive(s) => write!(f, "`#{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::If => f.write_str("`:-`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::EImpl => f.write_str("`<~`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Cmp(op) => write!(f, "`{}`", op.symbol()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    end_line: usize,
    end_col: usize,
}

fn lex(text: &str, file: Option<&Path>) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span = |l, c, el, ec| SourceSpan {
        file: file.map(Path::to_path_buf),
        start_line: l,
        start_col: c,
        end_line: el,
        end_col: ec,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let peek = chars.get(i + 1).copied();
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                Tok::Ident(word)
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(chars[start..i].iter().collect())
        } else if c == '#' {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            Tok::Directive(chars[start + 1..i].iter().collect())
        } else {
            let (tok, len) = match (c, peek) {
                (':', Some('-')) => (Tok::If, 2),
                ('<', Some('~')) => (Tok::EImpl, 2),
                ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
                ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
                ('!', Some('=')) => (Tok::Cmp(CmpOp::Neq), 2),
                ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                ('=', _) => (Tok::Cmp(CmpOp::Eq), 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                (':', _) => (Tok::Colon, 1),
                ('.', _) => (Tok::Dot, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('|', _) => (Tok::Pipe, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                _ => {
                    return Err(ParseError {
                        span: span(line, col, line, col),
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            i += len;
            tok
        };
        let len = i - start;
        out.push(Token {
            tok,
            line,
            col,
            end_line: line,
            end_col: col + len - 1,
        });
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
        end_line: line,
        end_col: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: Option<&'a Path>,
}

type PResult<T> = Result<T, ParseError>;

/// A parsed head item: a formula, or a formula with an implication premise.
struct Group {
    formula: Formula,
    premise: Option<Vec<Formula>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn span_of(&self, from: usize, to: usize) -> SourceSpan {
        let a = &self.toks[from];
        let b = &self.toks[to.max(from)];
        SourceSpan {
            file: self.file.map(Path::to_path_buf),
            start_line: a.line,
            start_col: a.col,
            end_line: b.end_line,
            end_col: b.end_col,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            span: self.span_of(self.pos, self.pos),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn ident(&mut self, wanted: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn var(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Var(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a variable"),
        }
    }

    /// Skips past the next top-level `.` after an error.
    fn recover(&mut self) {
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LParen | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBrace => depth -= 1,
                Tok::Dot if depth <= 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    // Terms ----------------------------------------------------------------

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Term::constant(n))
            }
            Tok::Minus => {
                self.bump();
                match self.bump() {
                    Tok::Int(n) => Ok(Term::constant(format!("-{n}"))),
                    _ => self.error("expected an integer after `-`"),
                }
            }
            Tok::Ident(name) => {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.term_args()?
                } else {
                    Vec::new()
                };
                Ok(Term::compound(name, args))
            }
            _ => self.unexpected("a term"),
        }
    }

    fn term_args(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn pred(&mut self) -> PResult<PredicateTerm> {
        let name = self.ident("a predicate name")?;
        if name == "not" || name == "or" {
            return self.error(format!("`{name}` is a keyword"));
        }
        let args = if *self.peek() == Tok::LParen {
            self.term_args()?
        } else {
            Vec::new()
        };
        Ok(PredicateTerm::new(name, args))
    }

    fn annotation(&mut self) -> PResult<TruthValue> {
        match self.peek().clone() {
            Tok::Ident(s) => match s.parse::<TruthValue>() {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(e) => self.error(e.to_string()),
            },
            Tok::Var(s) => self.error(format!(
                "unknown annotation `{s}` (expected t, f, top or bottom)"
            )),
            _ => self.unexpected("an annotation"),
        }
    }

    fn annotated(&mut self) -> PResult<AnnotatedAtom> {
        let pred = self.pred()?;
        self.expect(Tok::Colon, "`:` and an annotation")?;
        Ok(AnnotatedAtom::new(pred, self.annotation()?))
    }

    // Arithmetic ----------------------------------------------------------

    fn arith(&mut self) -> PResult<ArithExpr> {
        let mut lhs = self.arith_unary()?;
        loop {
            let add = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = Box::new(self.arith_unary()?);
            lhs = if add {
                ArithExpr::Add(Box::new(lhs), rhs)
            } else {
                ArithExpr::Sub(Box::new(lhs), rhs)
            };
        }
    }

    fn arith_unary(&mut self) -> PResult<ArithExpr> {
        if *self.peek() == Tok::Minus {
            if let Tok::Int(n) = self.peek_at(1).clone() {
                self.bump();
                self.bump();
                return Ok(ArithExpr::Term(Term::constant(format!("-{n}"))));
            }
            self.bump();
            return Ok(ArithExpr::Neg(Box::new(self.arith_unary()?)));
        }
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.arith()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Pipe => {
                self.bump();
                let e = self.arith()?;
                self.expect(Tok::Pipe, "closing `|`")?;
                Ok(ArithExpr::Abs(Box::new(e)))
            }
            Tok::Ident(s) if s == "abs" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let e = self.arith()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(ArithExpr::Abs(Box::new(e)))
            }
            _ => Ok(ArithExpr::Term(self.term()?)),
        }
    }

    fn comparison(&mut self, lhs: ArithExpr) -> PResult<Builtin> {
        match self.peek().clone() {
            Tok::Cmp(op) => {
                self.bump();
                let rhs = self.arith()?;
                Ok(Builtin::new(op, lhs, rhs))
            }
            _ => self.unexpected("`:` or a comparison operator"),
        }
    }

    /// An annotated atom or a builtin, told apart after the leading term.
    fn atom_or_builtin(&mut self) -> PResult<Result<AnnotatedAtom, Builtin>> {
        let start = self.pos;
        let e = self.arith()?;
        if let (ArithExpr::Term(Term::Compound { functor, args }), Tok::Colon) = (&e, self.peek()) {
            if functor.starts_with(|c: char| c.is_ascii_lowercase()) {
                if functor == "not" || functor == "or" {
                    self.pos = start;
                    return self.error(format!("`{functor}` is a keyword"));
                }
                let pred = PredicateTerm::new(functor.clone(), args.clone());
                self.bump();
                return Ok(Ok(AnnotatedAtom::new(pred, self.annotation()?)));
            }
        }
        Ok(Err(self.comparison(e)?))
    }

    // Formulas ------------------------------------------------------------

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::ENeg(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let g = self.group()?;
                if g.premise.is_some() {
                    return self.error("epistemic implication is only allowed as a whole rule head");
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(g.formula)
            }
            Tok::Ident(w) if w == "not" => self.error("`not` cannot appear inside a formula"),
            _ => Ok(Formula::Atom(self.annotated()?)),
        }
    }

    fn conj(&mut self) -> PResult<Vec<Formula>> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(items)
    }

    fn group(&mut self) -> PResult<Group> {
        let mut alts = Vec::new();
        loop {
            let mut c = self.conj()?;
            alts.push(if c.len() == 1 { c.pop().unwrap() } else { Formula::And(c) });
            if *self.peek() != Tok::Semi {
                break;
            }
            self.bump();
        }
        let formula = if alts.len() == 1 { alts.pop().unwrap() } else { Formula::Or(alts) };
        let premise = if *self.peek() == Tok::EImpl {
            self.bump();
            Some(self.conj()?)
        } else {
            None
        };
        Ok(Group { formula, premise })
    }

    fn head(&mut self) -> PResult<RawHead> {
        // `(H <~ B)` in parentheses.
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(g) = self.group() {
                if let (Some(premise), Tok::RParen) = (&g.premise, self.peek()) {
                    let premise = premise.clone();
                    self.bump();
                    return Ok(RawHead::Implication {
                        conclusion: split_or(g.formula),
                        premise,
                    });
                }
            }
            self.pos = save;
        }
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            items.push(self.unary()?);
        }
        if *self.peek() == Tok::EImpl {
            self.bump();
            let premise = self.conj()?;
            return Ok(RawHead::Implication {
                conclusion: items,
                premise,
            });
        }
        if *self.peek() == Tok::Comma {
            return self.error("a conjunction cannot appear in a rule head (use `;` for disjunction)");
        }
        Ok(RawHead::Disjunction(items))
    }

    fn body(&mut self) -> PResult<Vec<RawBodyLiteral>> {
        let mut out = vec![self.body_item()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.body_item()?);
        }
        Ok(out)
    }

    fn body_item(&mut self) -> PResult<RawBodyLiteral> {
        if self.is_word("not") {
            self.bump();
            if self.is_word("not") {
                return self.error("double `not` is not supported");
            }
            return Ok(RawBodyLiteral::Lit {
                polarity: Polarity::OntoNegated,
                formula: self.unary()?,
            });
        }
        match self.peek() {
            Tok::Tilde => Ok(RawBodyLiteral::Lit {
                polarity: Polarity::Positive,
                formula: self.unary()?,
            }),
            Tok::LParen => {
                let save = self.pos;
                match self.unary() {
                    Ok(f) => Ok(RawBodyLiteral::Lit {
                        polarity: Polarity::Positive,
                        formula: f,
                    }),
                    Err(first) => {
                        self.pos = save;
                        let e = self.arith().map_err(|_| first.clone())?;
                        self.comparison(e).map(RawBodyLiteral::Builtin).map_err(|_| first)
                    }
                }
            }
            _ => Ok(match self.atom_or_builtin()? {
                Ok(atom) => RawBodyLiteral::Lit {
                    polarity: Polarity::Positive,
                    formula: Formula::Atom(atom),
                },
                Err(b) => RawBodyLiteral::Builtin(b),
            }),
        }
    }

    // Cardinality ---------------------------------------------------------

    fn count(&mut self) -> PResult<u32> {
        match self.peek().clone() {
            Tok::Int(n) => match n.parse() {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => self.error("count too large"),
            },
            _ => self.unexpected("a count"),
        }
    }

    fn cardinality(&mut self, start: usize) -> PResult<RawCardinality> {
        let lo = self.count()?;
        self.expect(Tok::LBrace, "`{`")?;
        let element = self.annotated()?;
        let condition = if *self.peek() == Tok::Colon {
            self.bump();
            self.cond_disj()?
        } else {
            Vec::new()
        };
        self.expect(Tok::RBrace, "`}`")?;
        let hi_pos = self.pos;
        let hi = self.count()?;
        if hi != lo {
            self.pos = hi_pos;
            return self.error("only exact counts `N { ... } N` are supported");
        }
        let guard = if *self.peek() == Tok::If {
            self.bump();
            self.body()?
        } else {
            Vec::new()
        };
        let mut with_closure = true;
        if matches!(self.peek(), Tok::Directive(d) if d == "noclosure") {
            self.bump();
            with_closure = false;
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(RawCardinality {
            count: lo,
            element,
            condition,
            guard,
            with_closure,
            span: Some(self.span_of(start, self.pos - 1)),
        })
    }

    fn cond_disj(&mut self) -> PResult<Vec<Vec<CondLiteral>>> {
        let mut alts = self.cond_conj()?;
        while self.is_word("or") {
            self.bump();
            alts.extend(self.cond_conj()?);
        }
        Ok(alts)
    }

    /// A conjunction, returned in disjunctive normal form.
    fn cond_conj(&mut self) -> PResult<Vec<Vec<CondLiteral>>> {
        let mut dnf: Vec<Vec<CondLiteral>> = vec![Vec::new()];
        loop {
            let item = self.cond_item()?;
            dnf = dnf
                .iter()
                .flat_map(|left| {
                    item.iter().map(move |right| {
                        let mut c = left.clone();
                        c.extend(right.iter().cloned());
                        c
                    })
                })
                .collect();
            if *self.peek() != Tok::Comma {
                return Ok(dnf);
            }
            self.bump();
        }
    }

    fn cond_item(&mut self) -> PResult<Vec<Vec<CondLiteral>>> {
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(d) = self.cond_disj() {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(d);
                }
            }
            self.pos = save;
        }
        Ok(vec![vec![match self.atom_or_builtin()? {
            Ok(a) => CondLiteral::Atom(a),
            Err(b) => CondLiteral::Builtin(b),
        }]])
    }

    // Directives ----------------------------------------------------------

    fn domain(&mut self) -> PResult<DomainDecl> {
        let name = self.ident("a domain name")?;
        self.expect(Tok::Cmp(CmpOp::Eq), "`=`")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut constants = Vec::new();
        if *self.peek() != Tok::RBrace {
            constants.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                constants.push(self.term()?);
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(DomainDecl { name, constants })
    }

    fn pref(&mut self) -> PResult<PrefLevel> {
        let name = self.ident("a preference name")?;
        if !self.is_word("subset") {
            return self.unexpected("`subset`");
        }
        self.bump();
        self.expect(Tok::LBrace, "`{`")?;
        let mut patterns = Vec::new();
        if *self.peek() != Tok::RBrace {
            patterns.push(self.pattern()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                patterns.push(self.pattern()?);
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(PrefLevel { name, patterns })
    }

    fn pattern(&mut self) -> PResult<PrefPattern> {
        let atom = self.pred()?;
        self.expect(Tok::Colon, "`:`")?;
        if self.annotation()? != TruthValue::Top {
            self.pos -= 1;
            return self.error("preference patterns must be annotated top");
        }
        let mut binders = Vec::new();
        while self.is_word("for") {
            self.bump();
            let v = self.var()?;
            if !self.is_word("in") {
                return self.unexpected("`in`");
            }
            self.bump();
            binders.push((v, self.ident("a domain name")?));
        }
        Ok(PrefPattern { atom, binders })
    }

    fn lexico(&mut self) -> PResult<Vec<(String, usize)>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut names = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let at = self.pos;
                names.push((self.ident("a preference name")?, at));
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(names)
    }

    fn program(&mut self) -> Result<RawProgram, Vec<ParseError>> {
        let mut prog = RawProgram::default();
        let mut errors = Vec::new();
        let mut levels = Vec::new();
        let mut lexico: Option<Vec<(String, usize)>> = None;
        let mut lexico_pos = 0;
        while *self.peek() != Tok::Eof {
            let start = self.pos;
            let result: PResult<()> = match self.peek().clone() {
                Tok::Directive(d) => {
                    self.bump();
                    match d.as_str() {
                        "domain" => self.domain().map(|d| prog.domains.push(d)),
                        "pref" => self.pref().map(|l| levels.push(l)),
                        "lexico" => {
                            lexico_pos = start;
                            if lexico.is_some() {
                                self.pos = start;
                                self.error("duplicate `#lexico`")
                            } else {
                                self.lexico().map(|l| lexico = Some(l))
                            }
                        }
                        other => {
                            self.pos = start;
                            self.error(format!("unknown directive `#{other}`"))
                        }
                    }
                }
                Tok::Int(_) => self.cardinality(start).map(|c| prog.cardinalities.push(c)),
                Tok::If => {
                    self.bump();
                    self.body().and_then(|body| {
                        self.expect(Tok::Dot, "`.`")?;
                        prog.rules.push(RawRule {
                            head: RawHead::Disjunction(Vec::new()),
                            body,
                            span: Some(self.span_of(start, self.pos - 1)),
                        });
                        Ok(())
                    })
                }
                _ => self.head().and_then(|head| {
                    let body = if *self.peek() == Tok::If {
                        self.bump();
                        self.body()?
                    } else {
                        Vec::new()
                    };
                    self.expect(Tok::Dot, "`.`")?;
                    prog.rules.push(RawRule {
                        head,
                        body,
                        span: Some(self.span_of(start, self.pos - 1)),
                    });
                    Ok(())
                }),
            };
            if let Err(e) = result {
                errors.push(e);
                self.recover();
            }
        }
        if !levels.is_empty() || lexico.is_some() {
            let spec = match lexico {
                None => Ok(PreferenceSpec { levels }),
                Some(order) => self.order_levels(levels, order, lexico_pos),
            };
            match spec {
                Ok(s) => prog.preference = Some(s),
                Err(e) => errors.push(e),
            }
        }
        if errors.is_empty() {
            Ok(prog)
        } else {
            Err(errors)
        }
    }

    fn order_levels(
        &self,
        mut levels: Vec<PrefLevel>,
        order: Vec<(String, usize)>,
        at: usize,
    ) -> PResult<PreferenceSpec> {
        let mut out = Vec::new();
        for (name, pos) in order {
            match levels.iter().position(|l| l.name == name) {
                Some(i) => out.push(levels.remove(i)),
                None => {
                    return Err(ParseError {
                        span: self.span_of(pos, pos),
                        message: format!("unknown preference `{name}` in #lexico"),
                    })
                }
            }
        }
        if let Some(l) = levels.first() {
            return Err(ParseError {
                span: self.span_of(at, at),
                message: format!("preference `{}` missing from #lexico", l.name),
            });
        }
        Ok(PreferenceSpec { levels: out })
    }
}

fn split_or(f: Formula) -> Vec<Formula> {
    match f {
        Formula::Or(items) => items,
        other => vec![other],
    }
}

/// Parses surface syntax without desugaring.
pub fn parse_raw(text: &str, file: Option<&Path>) -> Result<RawProgram, Vec<ParseError>> {
    let toks = lex(text, file).map_err(|e| vec![e])?;
    Parser { toks, pos: 0, file }.program()
}

/// Parses a single ground or non-ground term such as `hold(pete,actor)`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let toks = lex(text, None)?;
    let mut p = Parser { toks, pos: 0, file: None };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(t)
}

/// Parses a query formula: annotated atoms combined with `,`, `;`, `~` and
/// parentheses, with an optional final `.`.
pub fn parse_query(text: &str) -> Result<QueryFormula, ParseError> {
    let toks = lex(text, None)?;
    let mut p = Parser { toks, pos: 0, file: None };
    let g = p.group()?;
    if g.premise.is_some() {
        return p.error("epistemic implication is not allowed in a query");
    }
    if *p.peek() == Tok::Dot {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of query");
    }
    Ok(QueryFormula {
        disjuncts: to_dnf(&g.formula),
    })
}

/// Parses and desugars a program.
pub fn parse(text: &str) -> Result<Program, Vec<ParseError>> {
    parse_with_file(text, None)
}

/// Like [`parse`], recording `file` in error spans.
pub fn parse_with_file(text: &str, file: Option<&Path>) -> Result<Program, Vec<ParseError>> {
    let raw = parse_raw(text, file)?;
    desugar(&raw).map_err(|e| {
        vec![ParseError {
            span: e.span.unwrap_or_else(|| SourceSpan {
                file: file.map(Path::to_path_buf),
                start_line: 1,
                start_col: 1,
                end_line: 1,
                end_col: 1,
            }),
            message: e.message,
        }]
    })
}

/// Canonical text of a program, one statement per line.
pub fn render(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.domains {
        out.push_str(&format!("{d}\n"));
    }
    for r in &p.rules {
        out.push_str(&format!("{r}\n"));
    }
    for c in &p.cardinalities {
        out.push_str(&format!("{c}\n"));
    }
    if let Some(pref) = &p.preference {
        for l in &pref.levels {
            out.push_str(&format!("{l}\n"));
        }
        let names: Vec<&str> = pref.levels.iter().map(|l| l.name.as_str()).collect();
        out.push_str(&format!("#lexico ({}).\n", names.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TruthValue::*;

    #[test]
    fn fact() {
        let p = parse("person(roberta) : t.").unwrap();
        assert_eq!(
            p.rules,
            vec![Rule::fact(AnnotatedAtom::new(
                PredicateTerm::ground("person", &["roberta"]),
                True
            ))]
        );
        assert_eq!(render(&parse("p:t.").unwrap()), "p : t.\n");
    }

    #[test]
    fn cardinality() {
        let p = parse("2 { hold(X,Y) : t : job(Y) : t } 2 :- person(X) : t.").unwrap();
        let c = &p.cardinalities[0];
        assert_eq!(c.count, 2);
        assert_eq!(c.condition.len(), 1);
        assert_eq!(c.guard.len(), 1);
        assert!(c.with_closure);
    }

    #[test]
    fn two_literal_body() {
        let p = parse("male(X) : top :- person(X) : t, female(X) : top.").unwrap();
        assert_eq!(p.rules[0].body.len(), 2);
    }

    #[test]
    fn implication_forms() {
        let a = parse("(male(X) : t <~ hold(X,nurse) : t) :- person(X) : t, not person(X) : top.")
            .unwrap();
        let b = parse("male(X) : t <~ hold(X,nurse) : t :- person(X) : t, not person(X) : top.")
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(
            render(&a),
            "male(X) : t ; hold(X,nurse) : f :- person(X) : t, not person(X) : top.\n"
        );
        let c = parse("rich(X) : t <~ person(X) : t, businessman(X) : t.").unwrap();
        assert_eq!(
            render(&c),
            "rich(X) : t ; person(X) : f ; businessman(X) : f.\n"
        );
    }

    #[test]
    fn epistemic_negation() {
        let p = parse("~educated(pete) : t.\np :- not ~q : t.").err();
        assert!(p.is_some(), "missing annotation on p");
        let p = parse("~educated(pete) : t.\np : t :- not ~q : t, ~(r : t ; s : f).").unwrap();
        assert_eq!(
            render(&p),
            "educated(pete) : f.\np : t :- not q : f, r : f, s : t.\n"
        );
        assert!(parse("p : t :- ~ not q : t.").is_err());
        assert!(parse("p : t :- (q : t ; r : t).").is_err());
        assert!(parse("p : t :- ~(q : t, r : t).").is_err());
    }

    #[test]
    fn builtins_and_arith() {
        let p = parse("right(X,Y) : t :- pos(X) : t, pos(Y) : t, X - 1 = Y.").unwrap();
        assert_eq!(
            render(&p),
            "right(X,Y) : t :- pos(X) : t, pos(Y) : t, X - 1 = Y.\n"
        );
        let p = parse("n(X,Y) : t :- pos(X) : t, pos(Y) : t, |X - Y| = 1, abs(X) >= -2.").unwrap();
        assert_eq!(
            render(&p),
            "n(X,Y) : t :- pos(X) : t, pos(Y) : t, |X - Y| = 1, |X| >= -2.\n"
        );
        let p = parse("q(X) : t :- r(X) : t, (X + 1) - 2 < 4.").unwrap();
        assert_eq!(render(&p), "q(X) : t :- r(X) : t, X + 1 - 2 < 4.\n");
    }

    #[test]
    fn condition_disjunction() {
        let src = "1 { husband(X,Y) : t : (person(Y) : t or Y = null) } 1 :- male(X) : t #noclosure.";
        let p = parse(src).unwrap();
        let c = &p.cardinalities[0];
        assert_eq!(c.condition.len(), 2);
        assert!(!c.with_closure);
        assert_eq!(
            render(&p),
            "1 { husband(X,Y) : t : person(Y) : t or Y = null } 1 :- male(X) : t #noclosure.\n"
        );
        assert_eq!(parse(&render(&p)).unwrap(), p);
    }

    #[test]
    fn directives() {
        let src = "#domain persons = {roberta, thelma}.\n\
                   #pref s1 subset { person(X) : top for X in persons }.\n\
                   #pref s0 subset { p : top }.\n\
                   #lexico (s1, s0).\n";
        let p = parse(src).unwrap();
        assert_eq!(p.preference.as_ref().unwrap().levels[0].name, "s1");
        assert_eq!(render(&p), src.replace("                   ", ""));
        assert!(parse("#pref a subset { p : top }.\n#lexico (b).").is_err());
    }

    #[test]
    fn errors_have_spans() {
        let errs = parse("p : t.\nq : maybe.\nr : t :- .\n").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].span.start_line, 2);
        assert!(errs[0].message.contains("unknown annotation `maybe`"));
        assert_eq!(errs[1].span.start_line, 3);
        let errs = parse("1 { p(X) : t : q(X) : t 1.").unwrap_err();
        assert!(errs[0].message.contains("`}`"));
    }

    #[test]
    fn comments_and_constraints() {
        let p = parse("% comment\n:- husband(X,Y) : t, husband(Z,X) : t. % trailing\n").unwrap();
        assert_eq!(render(&p), ":- husband(X,Y) : t, husband(Z,X) : t.\n");
        assert_eq!(p.rules[0].head.len(), 0);
    }

    #[test]
    fn mismatched_counts_rejected() {
        assert!(parse("1 { p(X) : t : q(X) : t } 2.").is_err());
    }

    #[test]
    fn negative_constants() {
        let p = parse("p(-3) : t.\nq(X) : t :- p(X) : t, X = -(3).").unwrap();
        assert_eq!(render(&p), "p(-3) : t.\nq(X) : t :- p(X) : t, X = -(3).\n");
        assert_eq!(parse(&render(&p)).unwrap(), p);
        let _ = Top;
    }

    #[test]
    fn queries() {
        let q = parse_query("~(p : t, q : f)").unwrap();
        assert_eq!(q.to_string(), "p : f ; q : t");
        let q = parse_query("(a : t ; b : t), c : top.").unwrap();
        assert_eq!(q.disjuncts.len(), 2);
        assert!(parse_query("p : t <~ q : t").is_err());
        assert_eq!(parse_term("f(a,-2)").unwrap().to_string(), "f(a,-2)");
        assert!(parse_term("f(a) g").is_err());
    }
}
