//! Higher-order recursion schemes and the pushdown automata that generate
//! the same trees.
//!
//! A scheme is compiled into its computation graph, which is the stack
//! alphabet of a collapsible pushdown automaton. When the scheme is
//! incrementally bound, every collapse of that automaton can be replaced by
//! an ordinary pop, and the resulting pushdown automaton translates back into
//! a safe scheme.

pub mod comptree;
pub mod cpda;
pub mod error;
pub mod hostack;
pub mod par;
pub mod pda;
pub mod scheme;
pub mod testkit;
pub mod tree;
pub mod types;

pub use error::{Error, Result};
pub use par::Exec;
pub use tree::ValueTree;
