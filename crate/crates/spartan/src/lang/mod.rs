//! Spartan abstract syntax, the operation registry, the type system and
//! capture-avoiding substitution. Concrete syntax lives in [`parse`] and
//! [`print`].
//!
//! Terms are variables, atoms, name binding (`new a <= u in t`), variable
//! binding (`bind x = u in t`), thunks (`[y...] t`) and operation application
//! `φ(eager...; thunks...)`. Everything else — including abstraction and
//! application — is an operation from the registry.

mod parse;
mod print;
mod types;

pub use parse::{parse, parse_context, ParseError};
pub use types::{typecheck, typecheck_context, Type, TypeError};

use crate::hypernet::{OpSignature, Polarity};
use std::collections::BTreeMap;
use std::fmt;

/// A Spartan term. `Hole` only appears in term-contexts manipulated by the
/// equivalence harness; ordinary programs never contain one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Atom(String),
    /// `new a <= bound in body`
    New {
        atom: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    /// `bind x = bound in body`
    Bind {
        var: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    /// `[y...] body`, a thunk binding the listed variables.
    Thunk { binders: Vec<String>, body: Box<Term> },
    /// `name(eager...; deferred...)`; deferred arguments must be thunks.
    OpApp {
        name: String,
        eager: Vec<Term>,
        deferred: Vec<Term>,
    },
    /// A typed hole `[·]_{vars|atoms}`.
    Hole { vars: Vec<String>, atoms: Vec<String> },
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn num(n: i64) -> Term {
        Term::op0(&n.to_string())
    }

    pub fn op0(name: &str) -> Term {
        Term::OpApp {
            name: name.to_string(),
            eager: vec![],
            deferred: vec![],
        }
    }

    pub fn op(name: &str, eager: Vec<Term>, deferred: Vec<Term>) -> Term {
        Term::OpApp {
            name: name.to_string(),
            eager,
            deferred,
        }
    }

    pub fn bind(x: &str, bound: Term, body: Term) -> Term {
        Term::Bind {
            var: x.to_string(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    pub fn new_atom(a: &str, bound: Term, body: Term) -> Term {
        Term::New {
            atom: a.to_string(),
            bound: Box::new(bound),
            body: Box::new(body),
        }
    }

    /// A hole with an empty environment annotation.
    pub fn hole_closed() -> Term {
        Term::Hole {
            vars: vec![],
            atoms: vec![],
        }
    }

    pub fn thunk(binders: &[&str], body: Term) -> Term {
        Term::Thunk {
            binders: binders.iter().map(|s| s.to_string()).collect(),
            body: Box::new(body),
        }
    }

    pub fn lambda(x: &str, body: Term) -> Term {
        Term::op("lambda", vec![], vec![Term::thunk(&[x], body)])
    }

    pub fn apply(f: Term, arg: Term) -> Term {
        Term::op("app", vec![f, arg], vec![])
    }

    /// `let x = u in t`, i.e. `(lambda x. t) u`: the call-by-value binding.
    pub fn let_(x: &str, bound: Term, body: Term) -> Term {
        Term::apply(Term::lambda(x, body), bound)
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut out, true);
        out
    }

    pub fn free_atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut out, false);
        out
    }

    fn collect_free(
        &self,
        bound_vars: &mut Vec<String>,
        bound_atoms: &mut Vec<String>,
        out: &mut Vec<String>,
        vars: bool,
    ) {
        match self {
            Term::Var(x) => {
                if vars && !bound_vars.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Atom(a) => {
                if !vars && !bound_atoms.contains(a) && !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Term::New { atom, bound, body } => {
                bound.collect_free(bound_vars, bound_atoms, out, vars);
                bound_atoms.push(atom.clone());
                body.collect_free(bound_vars, bound_atoms, out, vars);
                bound_atoms.pop();
            }
            Term::Bind { var, bound, body } => {
                bound.collect_free(bound_vars, bound_atoms, out, vars);
                bound_vars.push(var.clone());
                body.collect_free(bound_vars, bound_atoms, out, vars);
                bound_vars.pop();
            }
            Term::Thunk { binders, body } => {
                let n = bound_vars.len();
                bound_vars.extend(binders.iter().cloned());
                body.collect_free(bound_vars, bound_atoms, out, vars);
                bound_vars.truncate(n);
            }
            Term::OpApp { eager, deferred, .. } => {
                for t in eager.iter().chain(deferred.iter()) {
                    t.collect_free(bound_vars, bound_atoms, out, vars);
                }
            }
            Term::Hole { vars: hv, atoms: ha } => {
                let names = if vars { hv } else { ha };
                let bound = if vars { &*bound_vars } else { &*bound_atoms };
                for x in names {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
            }
        }
    }

    /// A term is generative if it contains a name binder outside any thunk.
    pub fn is_generative(&self) -> bool {
        match self {
            Term::New { .. } => true,
            Term::Var(_) | Term::Atom(_) | Term::Hole { .. } => false,
            Term::Bind { bound, body, .. } => bound.is_generative() || body.is_generative(),
            Term::Thunk { .. } => false,
            Term::OpApp { eager, deferred, .. } => {
                // Deferred arguments are thunks, so only eager ones count.
                let _ = deferred;
                eager.iter().any(|t| t.is_generative())
            }
        }
    }

    /// Replaces the unique hole by `filler`, capturing its free names by the
    /// binders in scope: exactly what plugging a term-context means.
    pub fn plug_hole(&self, filler: &Term) -> Term {
        match self {
            Term::Hole { .. } => filler.clone(),
            Term::Var(_) | Term::Atom(_) => self.clone(),
            Term::New { atom, bound, body } => Term::New {
                atom: atom.clone(),
                bound: Box::new(bound.plug_hole(filler)),
                body: Box::new(body.plug_hole(filler)),
            },
            Term::Bind { var, bound, body } => Term::Bind {
                var: var.clone(),
                bound: Box::new(bound.plug_hole(filler)),
                body: Box::new(body.plug_hole(filler)),
            },
            Term::Thunk { binders, body } => Term::Thunk {
                binders: binders.clone(),
                body: Box::new(body.plug_hole(filler)),
            },
            Term::OpApp { name, eager, deferred } => Term::OpApp {
                name: name.clone(),
                eager: eager.iter().map(|t| t.plug_hole(filler)).collect(),
                deferred: deferred.iter().map(|t| t.plug_hole(filler)).collect(),
            },
        }
    }

    pub fn has_hole(&self) -> bool {
        match self {
            Term::Hole { .. } => true,
            Term::Var(_) | Term::Atom(_) => false,
            Term::New { bound, body, .. } | Term::Bind { bound, body, .. } => {
                bound.has_hole() || body.has_hole()
            }
            Term::Thunk { body, .. } => body.has_hole(),
            Term::OpApp { eager, deferred, .. } => {
                eager.iter().chain(deferred.iter()).any(|t| t.has_hole())
            }
        }
    }

    /// Capture-avoiding substitution of `repl` for free variable `x`. Bound
    /// variables that would capture a free variable of `repl` are renamed.
    pub fn subst(&self, x: &str, repl: &Term) -> Term {
        let avoid = repl.free_vars();
        self.subst_in(x, repl, &avoid)
    }

    fn subst_in(&self, x: &str, repl: &Term, avoid: &[String]) -> Term {
        match self {
            Term::Var(y) if y == x => repl.clone(),
            Term::Var(_) | Term::Atom(_) | Term::Hole { .. } => self.clone(),
            Term::New { atom, bound, body } => Term::New {
                atom: atom.clone(),
                bound: Box::new(bound.subst_in(x, repl, avoid)),
                body: Box::new(body.subst_in(x, repl, avoid)),
            },
            Term::Bind { var, bound, body } => {
                let bound = Box::new(bound.subst_in(x, repl, avoid));
                if var == x {
                    Term::Bind {
                        var: var.clone(),
                        bound,
                        body: body.clone(),
                    }
                } else if avoid.contains(var) && body.free_vars().contains(&x.to_string()) {
                    let fresh = fresh_name(var, avoid, body);
                    let renamed = body.subst_in(var, &Term::var(&fresh), avoid);
                    Term::Bind {
                        var: fresh,
                        bound,
                        body: Box::new(renamed.subst_in(x, repl, avoid)),
                    }
                } else {
                    Term::Bind {
                        var: var.clone(),
                        bound,
                        body: Box::new(body.subst_in(x, repl, avoid)),
                    }
                }
            }
            Term::Thunk { binders, body } => {
                if binders.iter().any(|b| b == x) {
                    self.clone()
                } else if binders.iter().any(|b| avoid.contains(b))
                    && body.free_vars().contains(&x.to_string())
                {
                    let mut new_binders = Vec::new();
                    let mut new_body = (**body).clone();
                    for b in binders {
                        if avoid.contains(b) {
                            let fresh = fresh_name(b, avoid, &new_body);
                            new_body = new_body.subst_in(b, &Term::var(&fresh), avoid);
                            new_binders.push(fresh);
                        } else {
                            new_binders.push(b.clone());
                        }
                    }
                    Term::Thunk {
                        binders: new_binders,
                        body: Box::new(new_body.subst_in(x, repl, avoid)),
                    }
                } else {
                    Term::Thunk {
                        binders: binders.clone(),
                        body: Box::new(body.subst_in(x, repl, avoid)),
                    }
                }
            }
            Term::OpApp { name, eager, deferred } => Term::OpApp {
                name: name.clone(),
                eager: eager.iter().map(|t| t.subst_in(x, repl, avoid)).collect(),
                deferred: deferred.iter().map(|t| t.subst_in(x, repl, avoid)).collect(),
            },
        }
    }

    /// Number of AST nodes; thunks count with their body.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Atom(_) | Term::Hole { .. } => 1,
            Term::New { bound, body, .. } | Term::Bind { bound, body, .. } => {
                1 + bound.size() + body.size()
            }
            Term::Thunk { body, .. } => body.size(),
            Term::OpApp { eager, deferred, .. } => {
                1 + eager.iter().chain(deferred.iter()).map(|t| t.size()).sum::<usize>()
            }
        }
    }
}

fn fresh_name(base: &str, avoid: &[String], body: &Term) -> String {
    let fv = body.free_vars();
    let mut i = 0;
    loop {
        let cand = format!("{base}_{i}");
        if !avoid.contains(&cand) && !fv.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// Typing environment: ordered, distinct variables and atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    pub vars: Vec<String>,
    pub atoms: Vec<String>,
}

impl Environment {
    pub fn empty() -> Self {
        Environment::default()
    }

    pub fn of(vars: &[&str], atoms: &[&str]) -> Self {
        Environment {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.atoms.is_empty()
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs = if self.vars.is_empty() {
            "-".to_string()
        } else {
            self.vars.join(",")
        };
        let atoms = if self.atoms.is_empty() {
            "-".to_string()
        } else {
            self.atoms.join(",")
        };
        write!(f, "{vs}|{atoms}")
    }
}

/// The operation registry: name to signature. Lookup of an integer numeral
/// succeeds for every integer.
#[derive(Debug, Clone)]
pub struct Registry {
    ops: BTreeMap<String, OpSignature>,
}

impl Registry {
    pub fn lookup(&self, name: &str) -> Option<OpSignature> {
        if let Some(sig) = self.ops.get(name) {
            return Some(sig.clone());
        }
        if name.parse::<i64>().is_ok() {
            return Some(OpSignature::new(0, vec![], Polarity::Passive));
        }
        None
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(|s| s.as_str())
    }
}

/// The default operation set: numerals, truth values, unit and abstraction as
/// passive operations; application, reference cells, name equality,
/// assignment, dereference and integer arithmetic as active ones.
pub fn builtin_ops() -> Registry {
    let mut ops = BTreeMap::new();
    let mut add = |name: &str, eager: usize, deferred: Vec<usize>, polarity: Polarity| {
        ops.insert(name.to_string(), OpSignature::new(eager, deferred, polarity));
    };
    add("lambda", 0, vec![1], Polarity::Passive);
    add("tt", 0, vec![], Polarity::Passive);
    add("ff", 0, vec![], Polarity::Passive);
    add("unit", 0, vec![], Polarity::Passive);
    add("app", 2, vec![], Polarity::Active);
    add("ref", 1, vec![], Polarity::Active);
    add("eq", 2, vec![], Polarity::Active);
    add("assign", 2, vec![], Polarity::Active);
    add("deref", 1, vec![], Polarity::Active);
    add("add", 2, vec![], Polarity::Active);
    add("sub", 2, vec![], Polarity::Active);
    add("neg", 1, vec![], Polarity::Active);
    Registry { ops }
}

#[cfg(test)]
mod tests;
