//! Golden models used throughout the tests and shipped as JSON under
//! `fixtures/`.

use crate::altsem::{GeneralColoredModel, PerspectiveMap};
use crate::relational::{RelationalBuilder, RelationalModel};
use crate::simplicial::{SimplicialBuilder, SimplicialModel};

/// Three agents over `w0, w1, w2`, every knowledge relation total; `a`
/// believes `{w1, w2}`, `b` believes `{w1}`, `c` believes `{w2}` everywhere.
/// The atom `p` holds exactly at `w1`.
pub fn fig1() -> RelationalModel {
    let worlds = ["w0", "w1", "w2"];
    let mut b = RelationalBuilder::new()
        .worlds(worlds)
        .agents(["a", "b", "c"])
        .knows_all("a")
        .knows_all("b")
        .knows_all("c")
        .atom("p", ["w1"]);
    for w in worlds {
        b = b
            .believes("a", w, "w1")
            .believes("a", w, "w2")
            .believes("b", w, "w1")
            .believes("c", w, "w2");
    }
    b.build().expect("fixture is well formed")
}

/// False-belief model: `S` has facets `X0 = {a0,b0}` and `X1 = {a0,b1}`,
/// both belief complexes are just `X0`, and `p` holds at `X0` only.
pub fn fb() -> SimplicialModel {
    SimplicialBuilder::new()
        .agents(["a", "b"])
        .node("a0", "a")
        .node("b0", "b")
        .node("b1", "b")
        .facet(&["a0", "b0"])
        .facet(&["a0", "b1"])
        .believe_facet("a", 0)
        .believe_facet("b", 0)
        .atom("p", &[0])
        .build()
        .expect("fixture is well formed")
}

/// Two `a` perspectives with `f_a(a0) = f_a(a1) = a1`; `p` holds exactly
/// on the facets through `a0`.
pub fn perspective_shift() -> (SimplicialModel, PerspectiveMap) {
    let m = SimplicialBuilder::new()
        .agents(["a", "b"])
        .node("a0", "a")
        .node("a1", "a")
        .node("b0", "b")
        .node("b1", "b")
        .facet(&["a0", "b0"])
        .facet(&["a1", "b0"])
        .facet(&["a1", "b1"])
        .believe_facet("a", 0)
        .believe_facet("a", 1)
        .believe_facet("a", 2)
        .believe_facet("b", 0)
        .believe_facet("b", 1)
        .believe_facet("b", 2)
        .atom("p", &[0])
        .build()
        .expect("fixture is well formed");
    let pm = PerspectiveMap::from_pairs([("a", "a0", "a1"), ("a", "a1", "a1")]);
    (m, pm)
}

/// Non-UCF model with facets `X = {a0,a1,b0}`, `Y = {a0,b2}`,
/// `Z = {a1,a2,a3,b1}`; `p` holds at `X` and `Y`.
pub fn multiplicity() -> GeneralColoredModel {
    GeneralColoredModel::builder()
        .agents(["a", "b"])
        .nodes(&[("a0", "a"), ("a1", "a"), ("a2", "a"), ("a3", "a"), ("b0", "b"), ("b1", "b"), ("b2", "b")])
        .facet(&["a0", "a1", "b0"])
        .facet(&["a0", "b2"])
        .facet(&["a1", "a2", "a3", "b1"])
        .atom("p", &[0, 1])
        .build()
        .expect("fixture is well formed")
}
