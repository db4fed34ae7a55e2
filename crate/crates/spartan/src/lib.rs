//! Spartan: a core calculus of variable binding, name binding and thunking,
//! run on a token-guided hypernet-rewriting abstract machine, with a bounded
//! observational-equivalence harness on top.
//!
//! The crate is organised around the pipeline
//!
//! ```text
//!   text --parse--> Term --typecheck--> Term --translate--> Hypernet
//!        --init--> State --step*--> Final | Stuck
//! ```
//!
//! and the `equiv` module, which enumerates term-contexts, runs both sides of
//! a candidate law and compares termination behaviour and step counts up to a
//! preorder.

pub mod hypernet;
pub mod lang;
pub mod translate;
pub mod machine;
pub mod equiv;

pub use hypernet::Hypernet;
pub use lang::{Environment, Registry, Term};
pub use machine::{Machine, Outcome};
