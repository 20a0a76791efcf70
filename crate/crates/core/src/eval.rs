//! Extension-based evaluation shared by every model family.
//!
//! A model family only has to say how its two modal boxes act on a set of
//! points; the boolean recursion lives here. Each family also has a
//! direct pointwise evaluator of its own, and the two are tested against
//! each other.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::logic::{Agent, Atom, Formula};

/// A set of points (worlds or facets) by index.
pub type PointSet = FixedBitSet;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(Agent),
    #[error("unknown atom `{0}`")]
    UnknownAtom(Atom),
    #[error("unknown {kind} `{name}`")]
    UnknownPoint { kind: &'static str, name: String },
    #[error("model is not evaluable: {0}")]
    IllFormed(String),
}

/// The modal structure of a model, seen as operators on point sets.
pub trait Semantics: Sync {
    fn point_count(&self) -> usize;

    fn point_label(&self, index: usize) -> String;

    /// Agents in sorted order; modal operators take an index into this slice.
    fn agents(&self) -> &[Agent];

    fn valuation(&self, atom: &Atom) -> Option<&PointSet>;

    /// Points where every knowledge-accessible point lies in `body`.
    fn knowledge_box(&self, agent: usize, body: &PointSet) -> PointSet;

    /// Points where every belief-accessible point lies in `body`.
    fn belief_box(&self, agent: usize, body: &PointSet) -> PointSet;

    /// Content digest identifying the model in reports.
    fn digest(&self) -> String;

    /// Fails when the model lacks the structure the boxes rely on.
    fn ready(&self) -> Result<(), EvalError> {
        Ok(())
    }

    fn agent_index(&self, agent: &Agent) -> Result<usize, EvalError> {
        self.agents()
            .binary_search(agent)
            .map_err(|_| EvalError::UnknownAgent(agent.clone()))
    }
}

/// Truth set of `f`, with `bindings` overriding the model's valuation.
/// No memoisation; use [`Evaluator`] for repeated queries.
pub fn truth_set_with<S: Semantics + ?Sized>(
    model: &S,
    f: &Formula,
    bindings: &HashMap<Atom, PointSet>,
) -> Result<PointSet, EvalError> {
    model.ready()?;
    extension(model, f, bindings)
}

fn extension<S: Semantics + ?Sized>(
    model: &S,
    f: &Formula,
    bindings: &HashMap<Atom, PointSet>,
) -> Result<PointSet, EvalError> {
    Ok(match f {
        Formula::Atom(p) => match bindings.get(p) {
            Some(set) => set.clone(),
            None => atom_set(model, p)?,
        },
        Formula::Falsum => PointSet::with_capacity(model.point_count()),
        Formula::Implies(l, r) => implication(extension(model, l, bindings)?, &extension(model, r, bindings)?),
        Formula::Knows(a, b) => model.knowledge_box(model.agent_index(a)?, &extension(model, b, bindings)?),
        Formula::Believes(a, b) => model.belief_box(model.agent_index(a)?, &extension(model, b, bindings)?),
    })
}

fn atom_set<S: Semantics + ?Sized>(model: &S, p: &Atom) -> Result<PointSet, EvalError> {
    model.valuation(p).cloned().ok_or_else(|| EvalError::UnknownAtom(p.clone()))
}

fn implication(mut lhs: PointSet, rhs: &PointSet) -> PointSet {
    lhs.toggle_range(..);
    lhs.union_with(rhs);
    lhs
}

/// Memoising evaluator over one model. Every non-atomic subformula's
/// truth set is cached.
pub struct Evaluator<'m, S: Semantics + ?Sized> {
    model: &'m S,
    cache: HashMap<Formula, PointSet>,
}

impl<'m, S: Semantics + ?Sized> Evaluator<'m, S> {
    pub fn new(model: &'m S) -> Self {
        Evaluator { model, cache: HashMap::new() }
    }

    pub fn model(&self) -> &'m S {
        self.model
    }

    pub fn truth_set(&mut self, f: &Formula) -> Result<PointSet, EvalError> {
        self.model.ready()?;
        self.cached(f)
    }

    fn cached(&mut self, f: &Formula) -> Result<PointSet, EvalError> {
        let model = self.model;
        let set = match f {
            Formula::Atom(p) => return atom_set(model, p),
            Formula::Falsum => return Ok(PointSet::with_capacity(model.point_count())),
            _ => {
                if let Some(s) = self.cache.get(f) {
                    return Ok(s.clone());
                }
                match f {
                    Formula::Implies(l, r) => {
                        let l = self.cached(l)?;
                        implication(l, &self.cached(r)?)
                    }
                    Formula::Knows(a, b) => {
                        let idx = model.agent_index(a)?;
                        model.knowledge_box(idx, &self.cached(b)?)
                    }
                    Formula::Believes(a, b) => {
                        let idx = model.agent_index(a)?;
                        model.belief_box(idx, &self.cached(b)?)
                    }
                    Formula::Atom(_) | Formula::Falsum => unreachable!(),
                }
            }
        };
        self.cache.insert(f.clone(), set.clone());
        Ok(set)
    }

    pub fn holds_at(&mut self, point: usize, f: &Formula) -> Result<bool, EvalError> {
        if point >= self.model.point_count() {
            return Err(EvalError::UnknownPoint { kind: "point", name: point.to_string() });
        }
        Ok(self.truth_set(f)?.contains(point))
    }

    /// First point (by index) where `f` fails, if any.
    pub fn counterexample(&mut self, f: &Formula) -> Result<Option<usize>, EvalError> {
        let set = self.truth_set(f)?;
        Ok((0..self.model.point_count()).find(|&i| !set.contains(i)))
    }
}

/// Full point set of size `n`.
pub fn full_set(n: usize) -> PointSet {
    let mut s = PointSet::with_capacity(n);
    s.insert_range(..);
    s
}
