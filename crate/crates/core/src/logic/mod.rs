//! The formula language: atoms, falsum, implication, `K[a]` and `B[a]`.

mod formula;
mod parse;
mod render;

pub use formula::{is_identifier, Agent, Atom, Formula};
pub use parse::{parse_formula, ParseError};
pub use render::render_formula;

/// Maximum nesting of knowledge and belief modalities in `f`.
pub fn modal_depth(f: &Formula) -> usize {
    f.modal_depth()
}
