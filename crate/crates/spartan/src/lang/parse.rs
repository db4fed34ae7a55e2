//! Concrete syntax. UTF-8 text with `#` line comments.
//!
//! ```text
//! term  := "bind" ID "=" term "in" term
//!        | "new" ID "<=" term "in" term
//!        | ID "(" args ")"                 -- explicit operation application
//!        | sugar | ID | "(" term ")"
//! args  := term,* ";" thunk,*
//! thunk := "[" ID* "]" term
//! ```
//!
//! Sugar: `lambda x. t`, juxtaposition application (left associative),
//! `ref t`, `!t`, `t := u`, `t + u`, `t - u`, `neg t`, `t = u`,
//! `let x = u in t`, `u; t`, `nu x. t`, integer literals, `tt`, `ff`, `()`.
//! Precedence, loosest to tightest: `;` < `:=` < `=` < `+`/`-` <
//! application < `!`/`neg`/`ref`.

use super::{Registry, Term};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Kw(&'static str),
    LParen,
    RParen,
    LBracket,
    RBracket,
    HoleMark,
    Comma,
    Semi,
    Dot,
    Equals,
    ColonEq,
    Plus,
    Minus,
    Bang,
    BindArrow, // <=
}

const KEYWORDS: &[&str] = &[
    "bind", "new", "in", "let", "lambda", "nu", "ref", "neg", "tt", "ff",
];

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: String) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            msg,
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == b'#' {
                    while self.peek().map_or(false, |c| c != b'\n') {
                        self.bump();
                    }
                } else if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let c = match self.peek() {
                Some(c) => c,
                None => return Ok(out),
            };
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'[' => {
                    if self.peek2() == Some(b'.') && self.src.get(self.pos + 2) == Some(&b']') {
                        self.bump();
                        self.bump();
                        self.bump();
                        Tok::HoleMark
                    } else {
                        self.bump();
                        Tok::LBracket
                    }
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b';' => {
                    self.bump();
                    Tok::Semi
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b'=' => {
                    self.bump();
                    Tok::Equals
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'!' => {
                    self.bump();
                    Tok::Bang
                }
                b':' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::ColonEq
                    } else {
                        return Err(self.error("expected ':='".to_string()));
                    }
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::BindArrow
                    } else {
                        return Err(self.error("expected '<='".to_string()));
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut n = String::new();
                    while self.peek().map_or(false, |c| c.is_ascii_digit()) {
                        n.push(self.bump() as char);
                    }
                    Tok::Int(n.parse().map_err(|_| self.error("integer literal overflows".to_string()))?)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while self
                        .peek()
                        .map_or(false, |c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'')
                    {
                        s.push(self.bump() as char);
                    }
                    match KEYWORDS.iter().find(|k| **k == s) {
                        Some(k) => Tok::Kw(k),
                        None => Tok::Ident(s),
                    }
                }
                other => {
                    return Err(self.error(format!("unexpected character {:?}", other as char)))
                }
            };
            out.push((tok, line, col));
        }
    }
}

struct Parser<'r> {
    toks: Vec<Spanned>,
    pos: usize,
    reg: &'r Registry,
    fresh: usize,
    used_idents: Vec<String>,
    hole_env: Option<(Vec<String>, Vec<String>)>,
}

impl<'r> Parser<'r> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((1, 1))
    }

    fn error(&self, msg: String) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn fresh_var(&mut self) -> String {
        loop {
            let cand = format!("_s{}", self.fresh);
            self.fresh += 1;
            if !self.used_idents.contains(&cand) {
                return cand;
            }
        }
    }

    // Precedence ladder.

    fn term(&mut self) -> Result<Term, ParseError> {
        self.seq()
    }

    fn seq(&mut self) -> Result<Term, ParseError> {
        let first = self.assign()?;
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let rest = self.seq()?;
            let fresh = self.fresh_var();
            // u; t  is  (lambda _. t) u  with a fresh unused variable.
            Ok(Term::apply(Term::lambda(&fresh, rest), first))
        } else {
            Ok(first)
        }
    }

    fn assign(&mut self) -> Result<Term, ParseError> {
        let lhs = self.equality()?;
        if self.peek() == Some(&Tok::ColonEq) {
            self.pos += 1;
            let rhs = self.assign()?;
            Ok(Term::op("assign", vec![lhs, rhs], vec![]))
        } else {
            Ok(lhs)
        }
    }

    fn equality(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.additive()?;
        while self.peek() == Some(&Tok::Equals) {
            self.pos += 1;
            let rhs = self.additive()?;
            lhs = Term::op("eq", vec![lhs, rhs], vec![]);
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.application()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.application()?;
                    lhs = Term::op("add", vec![lhs, rhs], vec![]);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.application()?;
                    lhs = Term::op("sub", vec![lhs, rhs], vec![]);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn application(&mut self) -> Result<Term, ParseError> {
        let mut head = self.prefix()?;
        while self.starts_prefix() {
            let arg = self.prefix()?;
            head = Term::apply(head, arg);
        }
        Ok(head)
    }

    fn starts_prefix(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_) | Tok::Int(_) | Tok::LParen | Tok::Bang | Tok::HoleMark) => true,
            Some(Tok::Kw(k)) => matches!(
                *k,
                "bind" | "new" | "let" | "lambda" | "nu" | "ref" | "neg" | "tt" | "ff"
            ),
            Some(Tok::Minus) => matches!(self.peek2(), Some(Tok::Int(_))),
            _ => false,
        }
    }

    fn prefix(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                let arg = self.prefix()?;
                Ok(Term::op("deref", vec![arg], vec![]))
            }
            Some(Tok::Kw("neg")) => {
                self.pos += 1;
                let arg = self.prefix()?;
                Ok(Term::op("neg", vec![arg], vec![]))
            }
            Some(Tok::Kw("ref")) => {
                self.pos += 1;
                let arg = self.prefix()?;
                Ok(Term::op("ref", vec![arg], vec![]))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Term::num(n))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                match self.bump() {
                    Some(Tok::Int(n)) => Ok(Term::num(-n)),
                    _ => Err(self.error("expected an integer after '-'".to_string())),
                }
            }
            Some(Tok::Kw("tt")) => {
                self.pos += 1;
                Ok(Term::op0("tt"))
            }
            Some(Tok::Kw("ff")) => {
                self.pos += 1;
                Ok(Term::op0("ff"))
            }
            Some(Tok::HoleMark) => {
                self.pos += 1;
                match &self.hole_env {
                    Some((vars, atoms)) => Ok(Term::Hole {
                        vars: vars.clone(),
                        atoms: atoms.clone(),
                    }),
                    None => Err(self.error("holes are not allowed in programs".to_string())),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    return Ok(Term::op0("unit"));
                }
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::Kw("bind")) => {
                self.pos += 1;
                let x = self.ident("a variable after 'bind'")?;
                self.expect(Tok::Equals, "'='")?;
                let bound = self.term()?;
                self.expect(Tok::Kw("in"), "'in'")?;
                let body = self.term()?;
                Ok(Term::bind(&x, bound, body))
            }
            Some(Tok::Kw("new")) => {
                self.pos += 1;
                let a = self.ident("an atom after 'new'")?;
                self.expect(Tok::BindArrow, "'<='")?;
                let bound = self.term()?;
                self.expect(Tok::Kw("in"), "'in'")?;
                let body = self.term()?;
                Ok(Term::new_atom(&a, bound, body))
            }
            Some(Tok::Kw("let")) => {
                self.pos += 1;
                let x = self.ident("a variable after 'let'")?;
                self.expect(Tok::Equals, "'='")?;
                let bound = self.term()?;
                self.expect(Tok::Kw("in"), "'in'")?;
                let body = self.term()?;
                Ok(Term::let_(&x, bound, body))
            }
            Some(Tok::Kw("lambda")) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    return self.explicit_call("lambda");
                }
                let x = self.ident("a variable after 'lambda'")?;
                self.expect(Tok::Dot, "'.'")?;
                let body = self.term()?;
                Ok(Term::lambda(&x, body))
            }
            Some(Tok::Kw("nu")) => {
                self.pos += 1;
                let x = self.ident("a variable after 'nu'")?;
                self.expect(Tok::Dot, "'.'")?;
                let body = self.term()?;
                // nu x. t  is  (lambda x. t) (ref ())
                Ok(Term::apply(
                    Term::lambda(&x, body),
                    Term::op("ref", vec![Term::op0("unit")], vec![]),
                ))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) && self.reg.lookup(&name).is_some() {
                    self.explicit_call(&name)
                } else {
                    // Variable or atom; binder kind resolves it later, so the
                    // parser represents both as Var and the resolver rewrites.
                    Ok(Term::Var(name))
                }
            }
            _ => Err(self.error("expected a term".to_string())),
        }
    }

    fn explicit_call(&mut self, name: &str) -> Result<Term, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let mut eager = Vec::new();
        let mut deferred = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            // Eager section: assign-level terms separated by commas.
            while !matches!(self.peek(), Some(Tok::Semi) | Some(Tok::RParen) | None) {
                eager.push(self.assign()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Semi) {
                self.pos += 1;
                while self.peek() != Some(&Tok::RParen) {
                    deferred.push(self.thunk()?);
                    if self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        self.expect(Tok::RParen, "')'")?;
        let sig = self
            .reg
            .lookup(name)
            .ok_or_else(|| self.error(format!("unknown operation {name}")))?;
        if eager.len() != sig.eager || deferred.len() != sig.deferred.len() {
            return Err(self.error(format!(
                "operation {name} takes {} eager and {} deferred arguments",
                sig.eager,
                sig.deferred.len()
            )));
        }
        Ok(Term::op(name, eager, deferred))
    }

    fn thunk(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::LBracket, "'['")?;
        let mut binders = Vec::new();
        while let Some(Tok::Ident(_)) = self.peek() {
            binders.push(self.ident("binder")?);
        }
        self.expect(Tok::RBracket, "']'")?;
        let body = self.assign()?;
        Ok(Term::Thunk {
            binders,
            body: Box::new(body),
        })
    }
}

/// Rewrites `Var` leaves whose name is bound by an enclosing `new` into
/// `Atom` leaves. Identifiers are one lexical class; the binder decides.
fn resolve_atoms(term: Term, atoms: &mut Vec<String>) -> Term {
    match term {
        Term::Var(x) => {
            if atoms.contains(&x) {
                Term::Atom(x)
            } else {
                Term::Var(x)
            }
        }
        Term::Atom(a) => Term::Atom(a),
        Term::New { atom, bound, body } => {
            let bound = resolve_atoms(*bound, atoms);
            atoms.push(atom.clone());
            let body = resolve_atoms(*body, atoms);
            atoms.pop();
            Term::New {
                atom,
                bound: Box::new(bound),
                body: Box::new(body),
            }
        }
        Term::Bind { var, bound, body } => Term::Bind {
            var,
            bound: Box::new(resolve_atoms(*bound, atoms)),
            body: Box::new(resolve_atoms(*body, atoms)),
        },
        Term::Thunk { binders, body } => Term::Thunk {
            binders,
            body: Box::new(resolve_atoms(*body, atoms)),
        },
        Term::OpApp { name, eager, deferred } => Term::OpApp {
            name,
            eager: eager.into_iter().map(|t| resolve_atoms(t, atoms)).collect(),
            deferred: deferred.into_iter().map(|t| resolve_atoms(t, atoms)).collect(),
        },
        Term::Hole { vars, atoms: ha } => Term::Hole { vars, atoms: ha },
    }
}

fn run_parser(
    reg: &Registry,
    text: &str,
    hole_env: Option<(Vec<String>, Vec<String>)>,
) -> Result<Term, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let used_idents: Vec<String> = toks
        .iter()
        .filter_map(|(t, _, _)| match t {
            Tok::Ident(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    let mut p = Parser {
        toks,
        pos: 0,
        reg,
        fresh: 0,
        used_idents,
        hole_env,
    };
    let term = p.term()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input after term".to_string()));
    }
    Ok(resolve_atoms(term, &mut Vec::new()))
}

/// Parses a program (no holes).
pub fn parse(reg: &Registry, text: &str) -> Result<Term, ParseError> {
    run_parser(reg, text, None)
}

/// Parses a term-context; `[.]` marks the hole, annotated with `hole_env`.
pub fn parse_context(
    reg: &Registry,
    text: &str,
    hole_vars: &[String],
    hole_atoms: &[String],
) -> Result<Term, ParseError> {
    run_parser(
        reg,
        text,
        Some((hole_vars.to_vec(), hole_atoms.to_vec())),
    )
}
