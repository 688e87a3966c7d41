//! Probabilistic deductive database.
//!
//! Facts and rules carry confidence levels, pairs of probability intervals
//! for belief and doubt. Programs are evaluated bottom-up to the least
//! fixpoint of their immediate-consequence operator, and every derived value
//! can be justified by a disjunctive proof tree.
//!
//! ```
//! use pddb_core::{engine::{Database, FixpointOptions}, parser::parse_program, lang::GroundAtom};
//!
//! let program = parse_program("
//!     p(X,Y) <[1,1],[0,0]> <- e(X,Y) ; conj=ind.
//!     e(1,2) <[0.9,0.9],[0,0]>.
//! ").unwrap();
//! let db = Database::load(&program).unwrap();
//! let result = db.evaluate(&FixpointOptions::default()).unwrap();
//! let c = result.valuation.get(&GroundAtom::ints("p", &[1, 2]));
//! assert_eq!(c.to_string(), "<[0.9,0.9],[0,0]>");
//! ```

pub mod calculus;
pub mod engine;
pub mod lang;
pub mod oracle;
pub mod parser;
pub mod proof;
pub mod synth;
pub mod trilattice;

pub use calculus::Mode;
pub use trilattice::{ConfidenceLevel, LatticeOrder};
