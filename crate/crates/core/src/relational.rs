//! Relational models for introspective knowledge and belief.
//!
//! Worlds are indexed in declaration order; every relation is an explicit
//! successor table over that order.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::eval::{EvalError, PointSet, Semantics};
use crate::logic::{is_identifier, Agent, Atom, Formula};
use crate::report::ValidationReport;

/// A binary relation on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    succ: Vec<PointSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { succ: vec![PointSet::with_capacity(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn total(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for s in &mut r.succ {
            s.insert_range(..);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    /// The equivalence relation whose classes are `blocks`.
    pub fn from_partition(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut r = Relation::empty(n);
        for block in blocks {
            for &i in block {
                for &j in block {
                    r.insert(i, j);
                }
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.succ[i].insert(j);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.succ[i].contains(j)
    }

    pub fn successors(&self, i: usize) -> &PointSet {
        &self.succ[i]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(i, s)| s.ones().map(move |j| (i, j)))
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.succ.iter().zip(&other.succ).all(|(a, b)| a.is_subset(b))
    }

    pub fn non_reflexive(&self) -> Option<usize> {
        (0..self.size()).find(|&i| !self.contains(i, i))
    }

    pub fn non_symmetric(&self) -> Option<(usize, usize)> {
        self.pairs().find(|&(i, j)| !self.contains(j, i))
    }

    /// `(i, j, k)` with `i R j`, `j R k` but not `i R k`.
    pub fn non_transitive(&self) -> Option<(usize, usize, usize)> {
        self.pairs().find_map(|(i, j)| {
            self.succ[j].difference(&self.succ[i]).next().map(|k| (i, j, k))
        })
    }

    /// `(i, j, k)` with `i R j`, `i R k` but not `j R k`.
    pub fn non_euclidean(&self) -> Option<(usize, usize, usize)> {
        self.pairs().find_map(|(i, j)| {
            self.succ[i].difference(&self.succ[j]).next().map(|k| (i, j, k))
        })
    }

    pub fn non_serial(&self) -> Option<usize> {
        (0..self.size()).find(|&i| self.succ[i].is_clear())
    }

    pub fn is_equivalence(&self) -> bool {
        self.non_reflexive().is_none() && self.non_symmetric().is_none() && self.non_transitive().is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no {0}")]
    Empty(&'static str),
    #[error("duplicate {kind} `{id}`")]
    Duplicate { kind: &'static str, id: String },
    #[error("invalid {kind} identifier `{id}`")]
    BadIdentifier { kind: &'static str, id: String },
    #[error("unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },
    #[error("{0}")]
    Shape(String),
}

/// Raised when an operation needs an agent's knowledge relation to be an
/// equivalence and it is not.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("knowledge relation of `{agent}` is not an equivalence ({detail}: {})", .witness.join(", "))]
pub struct NotEquivalence {
    pub agent: Agent,
    pub detail: &'static str,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RelationalModel {
    worlds: Vec<String>,
    world_index: HashMap<String, usize>,
    agents: Vec<Agent>,
    knowledge: Vec<Relation>,
    belief: Vec<Relation>,
    valuation: BTreeMap<Atom, PointSet>,
}

impl RelationalModel {
    /// Assembles a model. Structural problems (empty sets, unknown or
    /// duplicate ids, size mismatches) are errors; semantic conditions are
    /// left to [`validate_relational`].
    pub fn new(
        worlds: Vec<String>,
        relations: BTreeMap<Agent, (Relation, Relation)>,
        valuation: BTreeMap<Atom, PointSet>,
    ) -> Result<Self, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::Empty("worlds"));
        }
        if relations.is_empty() {
            return Err(ModelError::Empty("agents"));
        }
        let mut world_index = HashMap::new();
        for (i, w) in worlds.iter().enumerate() {
            if w.is_empty() {
                return Err(ModelError::BadIdentifier { kind: "world", id: w.clone() });
            }
            if world_index.insert(w.clone(), i).is_some() {
                return Err(ModelError::Duplicate { kind: "world", id: w.clone() });
            }
        }
        let n = worlds.len();
        let mut agents = Vec::new();
        let mut knowledge = Vec::new();
        let mut belief = Vec::new();
        for (a, (r, q)) in relations {
            if !is_identifier(a.as_str()) {
                return Err(ModelError::BadIdentifier { kind: "agent", id: a.to_string() });
            }
            if r.size() != n || q.size() != n {
                return Err(ModelError::Shape(format!("relations of `{a}` are not over {n} worlds")));
            }
            agents.push(a);
            knowledge.push(r);
            belief.push(q);
        }
        for (p, set) in &valuation {
            if !is_identifier(p.as_str()) {
                return Err(ModelError::BadIdentifier { kind: "atom", id: p.to_string() });
            }
            if set.len() != n {
                return Err(ModelError::Shape(format!("valuation of `{p}` is not over {n} worlds")));
            }
        }
        Ok(RelationalModel { worlds, world_index, agents, knowledge, belief, valuation })
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, i: usize) -> &str {
        &self.worlds[i]
    }

    pub fn world(&self, name: &str) -> Result<usize, EvalError> {
        self.world_index
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnknownPoint { kind: "world", name: name.to_string() })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_index(&self, a: &Agent) -> Option<usize> {
        self.agents.binary_search(a).ok()
    }

    pub fn knowledge(&self, agent: usize) -> &Relation {
        &self.knowledge[agent]
    }

    pub fn belief(&self, agent: usize) -> &Relation {
        &self.belief[agent]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.valuation.keys()
    }

    pub fn valuation_of(&self, p: &Atom) -> Option<&PointSet> {
        self.valuation.get(p)
    }

    pub fn valuation_map(&self) -> &BTreeMap<Atom, PointSet> {
        &self.valuation
    }

    fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.worlds[i].clone()).collect()
    }

    /// Errors on the first agent or atom of `f` this model does not declare.
    pub fn check_vocabulary(&self, f: &Formula) -> Result<(), EvalError> {
        if let Some(a) = f.agents().into_iter().find(|a| self.agent_index(a).is_none()) {
            return Err(EvalError::UnknownAgent(a));
        }
        if let Some(p) = f.atoms().into_iter().find(|p| !self.valuation.contains_key(p)) {
            return Err(EvalError::UnknownAtom(p));
        }
        Ok(())
    }

    fn equivalence_violation(&self, agent: usize) -> Option<NotEquivalence> {
        let r = &self.knowledge[agent];
        let agent = self.agents[agent].clone();
        if let Some(i) = r.non_reflexive() {
            return Some(NotEquivalence { agent, detail: "not reflexive", witness: self.names(&[i]) });
        }
        if let Some((i, j)) = r.non_symmetric() {
            return Some(NotEquivalence { agent, detail: "not symmetric", witness: self.names(&[i, j]) });
        }
        if let Some((i, j, k)) = r.non_transitive() {
            return Some(NotEquivalence { agent, detail: "not transitive", witness: self.names(&[i, j, k]) });
        }
        None
    }

    /// The knowledge classes of `agent`, each sorted, ordered by least member.
    pub fn knowledge_partition(&self, agent: usize) -> Result<Vec<Vec<usize>>, NotEquivalence> {
        if let Some(v) = self.equivalence_violation(agent) {
            return Err(v);
        }
        let r = &self.knowledge[agent];
        let mut seen = PointSet::with_capacity(self.world_count());
        let mut classes = Vec::new();
        for w in 0..self.world_count() {
            if !seen.contains(w) {
                seen.union_with(r.successors(w));
                classes.push(r.successors(w).ones().collect());
            }
        }
        Ok(classes)
    }

    /// Two distinct worlds lying in the same knowledge class for every agent.
    pub fn improper_pair(&self) -> Result<Option<(usize, usize)>, NotEquivalence> {
        let mut common: Vec<PointSet> = (0..self.world_count()).map(|_| crate::eval::full_set(self.world_count())).collect();
        for a in 0..self.agents.len() {
            if let Some(v) = self.equivalence_violation(a) {
                return Err(v);
            }
            for (w, c) in common.iter_mut().enumerate() {
                c.intersect_with(self.knowledge[a].successors(w));
            }
        }
        Ok(common
            .iter()
            .enumerate()
            .find_map(|(w, c)| c.ones().find(|&u| u != w).map(|u| (w.min(u), w.max(u)))))
    }

    /// Direct recursive evaluation at world `w`.
    pub fn eval_at(&self, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(p) => self.valuation.get(p).is_some_and(|s| s.contains(w)),
            Formula::Falsum => false,
            Formula::Implies(l, r) => !self.eval_at(w, l) || self.eval_at(w, r),
            Formula::Knows(a, b) => {
                let r = &self.knowledge[self.agent_index(a).expect("vocabulary checked")];
                r.successors(w).ones().all(|v| self.eval_at(v, b))
            }
            Formula::Believes(a, b) => {
                let q = &self.belief[self.agent_index(a).expect("vocabulary checked")];
                q.successors(w).ones().all(|v| self.eval_at(v, b))
            }
        }
    }
}

impl RelationalModel {
    /// Stable content digest (SHA-256 over the canonical JSON form).
    pub fn digest(&self) -> String {
        crate::io::digest_json(&crate::io::relational_to_file(self))
    }
}

impl Semantics for RelationalModel {
    fn point_count(&self) -> usize {
        self.world_count()
    }

    fn point_label(&self, index: usize) -> String {
        self.worlds[index].clone()
    }

    fn agents(&self) -> &[Agent] {
        &self.agents
    }

    fn valuation(&self, atom: &Atom) -> Option<&PointSet> {
        self.valuation.get(atom)
    }

    fn knowledge_box(&self, agent: usize, body: &PointSet) -> PointSet {
        boxed(&self.knowledge[agent], body)
    }

    fn belief_box(&self, agent: usize, body: &PointSet) -> PointSet {
        boxed(&self.belief[agent], body)
    }

    fn digest(&self) -> String {
        RelationalModel::digest(self)
    }
}

fn boxed(rel: &Relation, body: &PointSet) -> PointSet {
    let mut out = PointSet::with_capacity(rel.size());
    for w in 0..rel.size() {
        if rel.successors(w).is_subset(body) {
            out.insert(w);
        }
    }
    out
}

/// Checks the knowledge/belief model conditions. Properness is reported as
/// an informational flag only.
pub fn validate_relational(m: &RelationalModel) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = m.world_count();
    let name = |i: usize| m.worlds[i].clone();
    for (ai, a) in m.agents.iter().enumerate() {
        let r = &m.knowledge[ai];
        let q = &m.belief[ai];
        let a = a.to_string();
        for w in 0..n {
            if !r.contains(w, w) {
                report.violation("knowledge-equivalence", vec![a.clone(), name(w)], "not reflexive");
            }
        }
        for (w, v) in r.pairs() {
            if !r.contains(v, w) {
                report.violation("knowledge-equivalence", vec![a.clone(), name(w), name(v)], "not symmetric");
            }
            for u in r.successors(v).difference(r.successors(w)) {
                report.violation(
                    "knowledge-equivalence",
                    vec![a.clone(), name(w), name(v), name(u)],
                    "not transitive",
                );
            }
        }
        for (w, v) in q.pairs() {
            if !r.contains(w, v) {
                report.violation("belief-within-knowledge", vec![a.clone(), name(w), name(v)], "Q not contained in R");
            }
        }
        for w in 0..n {
            if q.successors(w).is_clear() {
                report.violation("belief-serial", vec![a.clone(), name(w)], "no belief-accessible world");
            }
        }
        for (w, v) in r.pairs() {
            if let Some(u) = q.successors(w).symmetric_difference(q.successors(v)).next() {
                report.violation(
                    "belief-constant",
                    vec![a.clone(), name(w), name(v), name(u)],
                    "belief sets differ within a knowledge class",
                );
            }
        }
    }
    match m.improper_pair() {
        Ok(None) => report.flag("proper", true, vec![]),
        Ok(Some((w, u))) => report.flag("proper", false, vec![name(w), name(u)]),
        Err(_) => {}
    }
    report.finish()
}

/// Returns `[w]_a` as a sorted list of world indices.
pub fn knowledge_class(m: &RelationalModel, agent: &Agent, w: usize) -> Result<Vec<usize>, ClassError> {
    let ai = m.agent_index(agent).ok_or_else(|| ClassError::UnknownAgent(agent.clone()))?;
    if w >= m.world_count() {
        return Err(ClassError::UnknownWorld(w.to_string()));
    }
    if let Some(v) = m.equivalence_violation(ai) {
        return Err(ClassError::NotEquivalence(v));
    }
    Ok(m.knowledge[ai].successors(w).ones().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(Agent),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error(transparent)]
    NotEquivalence(#[from] NotEquivalence),
}

/// True iff every world is the only member of the intersection of its
/// knowledge classes.
pub fn is_proper(m: &RelationalModel) -> Result<bool, NotEquivalence> {
    Ok(m.improper_pair()?.is_none())
}

/// Evaluates `f` at world `w`.
pub fn eval_relational(m: &RelationalModel, w: &str, f: &Formula) -> Result<bool, EvalError> {
    let wi = m.world(w)?;
    m.check_vocabulary(f)?;
    Ok(m.eval_at(wi, f))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("map covers {got} worlds but the source has {expected}")]
    NotTotal { expected: usize, got: usize },
    #[error("map sends `{0}` outside the target")]
    OutOfRange(String),
    #[error("source and target declare different agents")]
    AgentMismatch,
}

/// Checks that `h` (source world index to target world index) is a
/// surjective bounded morphism for both the knowledge and the belief
/// relations and preserves every atom.
pub fn check_bounded_morphism(
    source: &RelationalModel,
    target: &RelationalModel,
    h: &[usize],
) -> Result<ValidationReport, MorphismError> {
    if h.len() != source.world_count() {
        return Err(MorphismError::NotTotal { expected: source.world_count(), got: h.len() });
    }
    if let Some(w) = (0..h.len()).find(|&w| h[w] >= target.world_count()) {
        return Err(MorphismError::OutOfRange(source.worlds[w].clone()));
    }
    if source.agents != target.agents {
        return Err(MorphismError::AgentMismatch);
    }
    let mut report = ValidationReport::new();
    let sn = |i: usize| source.worlds[i].clone();
    let tn = |i: usize| target.worlds[i].clone();
    for (ai, a) in source.agents.iter().enumerate() {
        for (family, src, tgt) in [
            ("R", &source.knowledge[ai], &target.knowledge[ai]),
            ("Q", &source.belief[ai], &target.belief[ai]),
        ] {
            for (w, v) in src.pairs() {
                if !tgt.contains(h[w], h[v]) {
                    report.violation(
                        &format!("forth-{family}"),
                        vec![a.to_string(), sn(w), sn(v)],
                        format!("{} -> {} missing in target", tn(h[w]), tn(h[v])),
                    );
                }
            }
            for w in 0..source.world_count() {
                let mut image = PointSet::with_capacity(target.world_count());
                for v in src.successors(w).ones() {
                    image.insert(h[v]);
                }
                for u in tgt.successors(h[w]).difference(&image) {
                    report.violation(
                        &format!("back-{family}"),
                        vec![a.to_string(), sn(w), tn(u)],
                        format!("{} -> {} has no preimage step from {}", tn(h[w]), tn(u), sn(w)),
                    );
                }
            }
        }
    }
    let empty_s = PointSet::with_capacity(source.world_count());
    let empty_t = PointSet::with_capacity(target.world_count());
    let atoms: std::collections::BTreeSet<&Atom> = source.valuation.keys().chain(target.valuation.keys()).collect();
    for p in atoms {
        let sv = source.valuation.get(p).unwrap_or(&empty_s);
        let tv = target.valuation.get(p).unwrap_or(&empty_t);
        for (w, &u) in h.iter().enumerate() {
            if sv.contains(w) != tv.contains(u) {
                report.violation("atom", vec![p.to_string(), sn(w), tn(u)], "valuation differs");
            }
        }
    }
    let mut hit = PointSet::with_capacity(target.world_count());
    for &u in h {
        hit.insert(u);
    }
    for u in (0..target.world_count()).filter(|&u| !hit.contains(u)) {
        report.violation("surjective", vec![tn(u)], "not in the image");
    }
    Ok(report.finish())
}

/// Name-based builder used by fixtures, tests, and the file loader.
#[derive(Clone, Debug, Default)]
pub struct RelationalBuilder {
    worlds: Vec<String>,
    agents: Vec<Agent>,
    knowledge: BTreeMap<Agent, Vec<(String, String)>>,
    belief: BTreeMap<Agent, Vec<(String, String)>>,
    valuation: BTreeMap<Atom, Vec<String>>,
}

impl RelationalBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn worlds<I: IntoIterator<Item = S>, S: Into<String>>(mut self, ws: I) -> Self {
        self.worlds.extend(ws.into_iter().map(Into::into));
        self
    }

    pub fn agents<I: IntoIterator<Item = S>, S: Into<Agent>>(mut self, agents: I) -> Self {
        self.agents.extend(agents.into_iter().map(Into::into));
        self
    }

    pub fn knows(mut self, a: &str, w: &str, v: &str) -> Self {
        self.knowledge.entry(a.into()).or_default().push((w.into(), v.into()));
        self
    }

    pub fn believes(mut self, a: &str, w: &str, v: &str) -> Self {
        self.belief.entry(a.into()).or_default().push((w.into(), v.into()));
        self
    }

    /// Adds `R_a = W × W`.
    pub fn knows_all(mut self, a: &str) -> Self {
        let ws = self.worlds.clone();
        let e = self.knowledge.entry(a.into()).or_default();
        for w in &ws {
            for v in &ws {
                e.push((w.clone(), v.clone()));
            }
        }
        self
    }

    pub fn atom<I: IntoIterator<Item = S>, S: Into<String>>(mut self, p: &str, ws: I) -> Self {
        self.valuation.entry(p.into()).or_default().extend(ws.into_iter().map(Into::into));
        self
    }

    pub fn build(self) -> Result<RelationalModel, ModelError> {
        let n = self.worlds.len();
        let index: HashMap<&str, usize> = self.worlds.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let lookup = |w: &str| {
            index.get(w).copied().ok_or_else(|| ModelError::Unknown { kind: "world", id: w.to_string() })
        };
        let mut agents = self.agents.clone();
        agents.sort();
        if let Some(w) = agents.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::Duplicate { kind: "agent", id: w[0].to_string() });
        }
        for a in self.knowledge.keys().chain(self.belief.keys()) {
            if agents.binary_search(a).is_err() {
                return Err(ModelError::Unknown { kind: "agent", id: a.to_string() });
            }
        }
        let mut relations = BTreeMap::new();
        for a in agents {
            let mut r = Relation::empty(n);
            let mut q = Relation::empty(n);
            for (w, v) in self.knowledge.get(&a).into_iter().flatten() {
                r.insert(lookup(w)?, lookup(v)?);
            }
            for (w, v) in self.belief.get(&a).into_iter().flatten() {
                q.insert(lookup(w)?, lookup(v)?);
            }
            relations.insert(a, (r, q));
        }
        let mut valuation = BTreeMap::new();
        for (p, ws) in &self.valuation {
            let mut set = PointSet::with_capacity(n);
            for w in ws {
                set.insert(lookup(w)?);
            }
            valuation.insert(p.clone(), set);
        }
        RelationalModel::new(self.worlds, relations, valuation)
    }
}
