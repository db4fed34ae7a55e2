//! The Spartan type system: eager terms have type `*`, thunks binding n
//! variables have type `T^n(*)`. The system only distinguishes thunks from
//! eager terms and checks well-formedness; runtime safety is not its job.

use super::{Environment, Registry, Term};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Star,
    Thunk(usize),
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Type::Star => write!(f, "*"),
            Type::Thunk(n) => write!(f, "T{n}(*)"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable {0}")]
    UnboundVar(String),
    #[error("unbound atom {0}")]
    UnboundAtom(String),
    #[error("variable {0} shadows an enclosing binding")]
    ShadowedVar(String),
    #[error("atom {0} shadows an enclosing binding")]
    ShadowedAtom(String),
    #[error("thunk binders {0:?} clash with enclosing variables")]
    BinderClash(Vec<String>),
    #[error("thunk binders {0:?} are not distinct")]
    DuplicateBinder(Vec<String>),
    #[error("unknown operation {0}")]
    UnknownOp(String),
    #[error("operation {name} takes {expected} eager arguments, given {given}")]
    EagerArity {
        name: String,
        expected: usize,
        given: usize,
    },
    #[error("operation {name} takes {expected} deferred arguments, given {given}")]
    DeferredArity {
        name: String,
        expected: usize,
        given: usize,
    },
    #[error("operation {name} expects a thunk of {expected} binders, found {found}")]
    ThunkArity {
        name: String,
        expected: usize,
        found: String,
    },
    #[error("expected an eager term, found a thunk")]
    UnexpectedThunk,
    #[error("hole needs {0} in its environment")]
    HoleEnvironment(String),
}

/// Checks `env ⊢ term : τ` against the six typing rules, plus the hole rule
/// used by the context harness. A hole typechecks whenever its annotated
/// names are all in scope: checking a law in its minimum environment is
/// enough for larger ones, so contexts may bind extra names around a hole.
pub fn typecheck(reg: &Registry, env: &Environment, term: &Term) -> Result<Type, TypeError> {
    match term {
        Term::Var(x) => {
            if env.vars.iter().any(|v| v == x) {
                Ok(Type::Star)
            } else {
                Err(TypeError::UnboundVar(x.clone()))
            }
        }
        Term::Atom(a) => {
            if env.atoms.iter().any(|b| b == a) {
                Ok(Type::Star)
            } else {
                Err(TypeError::UnboundAtom(a.clone()))
            }
        }
        Term::Bind { var, bound, body } => {
            if env.vars.iter().any(|v| v == var) {
                return Err(TypeError::ShadowedVar(var.clone()));
            }
            expect_star(reg, env, bound)?;
            let mut inner = env.clone();
            inner.vars.push(var.clone());
            expect_star(reg, &inner, body)?;
            Ok(Type::Star)
        }
        Term::New { atom, bound, body } => {
            if env.atoms.iter().any(|b| b == atom) {
                return Err(TypeError::ShadowedAtom(atom.clone()));
            }
            expect_star(reg, env, bound)?;
            let mut inner = env.clone();
            inner.atoms.insert(0, atom.clone());
            expect_star(reg, &inner, body)?;
            Ok(Type::Star)
        }
        Term::Thunk { binders, body } => {
            let mut distinct = binders.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() != binders.len() {
                return Err(TypeError::DuplicateBinder(binders.clone()));
            }
            let clash: Vec<String> = binders
                .iter()
                .filter(|b| env.vars.contains(b))
                .cloned()
                .collect();
            if !clash.is_empty() {
                return Err(TypeError::BinderClash(clash));
            }
            let mut inner = env.clone();
            let mut vars = binders.clone();
            vars.extend(inner.vars);
            inner.vars = vars;
            expect_star(reg, &inner, body)?;
            Ok(Type::Thunk(binders.len()))
        }
        Term::OpApp { name, eager, deferred } => {
            let sig = reg
                .lookup(name)
                .ok_or_else(|| TypeError::UnknownOp(name.clone()))?;
            if eager.len() != sig.eager {
                return Err(TypeError::EagerArity {
                    name: name.clone(),
                    expected: sig.eager,
                    given: eager.len(),
                });
            }
            if deferred.len() != sig.deferred.len() {
                return Err(TypeError::DeferredArity {
                    name: name.clone(),
                    expected: sig.deferred.len(),
                    given: deferred.len(),
                });
            }
            for t in eager {
                expect_star(reg, env, t)?;
            }
            for (t, &n) in deferred.iter().zip(sig.deferred.iter()) {
                match typecheck(reg, env, t)? {
                    Type::Thunk(m) if m == n => {}
                    other => {
                        return Err(TypeError::ThunkArity {
                            name: name.clone(),
                            expected: n,
                            found: other.to_string(),
                        })
                    }
                }
            }
            Ok(Type::Star)
        }
        Term::Hole { vars, atoms } => {
            for x in vars {
                if !env.vars.contains(x) {
                    return Err(TypeError::HoleEnvironment(x.clone()));
                }
            }
            for a in atoms {
                if !env.atoms.contains(a) {
                    return Err(TypeError::HoleEnvironment(a.clone()));
                }
            }
            Ok(Type::Star)
        }
    }
}

fn expect_star(reg: &Registry, env: &Environment, term: &Term) -> Result<(), TypeError> {
    match typecheck(reg, env, term)? {
        Type::Star => Ok(()),
        Type::Thunk(_) => Err(TypeError::UnexpectedThunk),
    }
}

/// Typechecks a term-context as a closed program shape.
pub fn typecheck_context(reg: &Registry, ctx: &Term) -> Result<Type, TypeError> {
    typecheck(reg, &Environment::empty(), ctx)
}
