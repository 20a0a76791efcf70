//! Knowledge and belief on relational models and on colored simplicial
//! complexes: formulas, evaluators, translations between the two model
//! families, and a randomized test harness.

pub mod altsem;
pub mod eval;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod logic;
pub mod relational;
pub mod report;
pub mod simplicial;
pub mod transform;

pub use eval::{EvalError, Evaluator, PointSet, Semantics};
pub use logic::{parse_formula, render_formula, Agent, Atom, Formula, ParseError};
pub use relational::{validate_relational, RelationalModel};
pub use report::ValidationReport;
pub use simplicial::{validate_simplicial, SimplicialModel};
