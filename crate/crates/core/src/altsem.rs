//! Two rival readings of belief on colored complexes: perspective
//! functions on UCF models, and multiplicity-ordered belief on complexes
//! whose facets may repeat colors.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{EvalError, PointSet, Semantics};
use crate::logic::{is_identifier, Agent, Atom, Formula};
use crate::relational::ModelError;
use crate::simplicial::{ColoredNode, SimplicialModel};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PerspectiveError {
    #[error("perspective map names unknown agent `{0}`")]
    UnknownAgent(Agent),
    #[error("perspective map of `{agent}` names unknown node `{node}`")]
    UnknownNode { agent: Agent, node: String },
    #[error("perspective map of `{agent}` sends `{node}` outside the `{agent}`-colored nodes")]
    ColorMismatch { agent: Agent, node: String },
    #[error("perspective map of `{agent}` is not idempotent at `{node}` (`{node}` -> `{image}` -> `{image2}`)")]
    NotIdempotent { agent: Agent, node: String, image: String, image2: String },
}

/// Per-agent maps on that agent's nodes. Nodes without an entry are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PerspectiveMap {
    maps: BTreeMap<Agent, BTreeMap<String, String>>,
}

impl PerspectiveMap {
    pub fn identity() -> Self {
        Self::default()
    }

    /// From `(agent, node, image)` triples.
    pub fn from_pairs<'s>(pairs: impl IntoIterator<Item = (&'s str, &'s str, &'s str)>) -> Self {
        let mut maps: BTreeMap<Agent, BTreeMap<String, String>> = BTreeMap::new();
        for (a, n, img) in pairs {
            maps.entry(a.into()).or_default().insert(n.to_string(), img.to_string());
        }
        PerspectiveMap { maps }
    }

    pub fn insert(&mut self, agent: Agent, node: String, image: String) {
        self.maps.entry(agent).or_default().insert(node, image);
    }

    pub fn is_empty(&self) -> bool {
        self.maps.values().all(BTreeMap::is_empty)
    }

    pub fn entries(&self) -> &BTreeMap<Agent, BTreeMap<String, String>> {
        &self.maps
    }

    fn image<'a>(&'a self, agent: &Agent, node: &'a str) -> &'a str {
        self.maps.get(agent).and_then(|m| m.get(node)).map_or(node, String::as_str)
    }

    /// Checks that every map is color-preserving and idempotent over the
    /// model's nodes.
    pub fn validate(&self, m: &SimplicialModel) -> Result<(), PerspectiveError> {
        self.resolve(m).map(|_| ())
    }

    /// `target[node]`: index of `f_a(node)` where `a` is the node's color.
    fn resolve(&self, m: &SimplicialModel) -> Result<Vec<usize>, PerspectiveError> {
        for (a, map) in &self.maps {
            let ai = m.agent_index(a).ok_or_else(|| PerspectiveError::UnknownAgent(a.clone()))?;
            for (n, img) in map {
                for id in [n, img] {
                    let idx = m
                        .node(id)
                        .ok_or_else(|| PerspectiveError::UnknownNode { agent: a.clone(), node: id.clone() })?;
                    if m.node_color(idx) != ai {
                        return Err(PerspectiveError::ColorMismatch { agent: a.clone(), node: id.clone() });
                    }
                }
                let img2 = self.image(a, img);
                if img2 != img {
                    return Err(PerspectiveError::NotIdempotent {
                        agent: a.clone(),
                        node: n.clone(),
                        image: img.clone(),
                        image2: img2.to_string(),
                    });
                }
            }
        }
        Ok(m.nodes()
            .iter()
            .map(|n| m.node(self.image(&n.color, &n.id)).expect("validated above"))
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AltError {
    #[error(transparent)]
    Perspective(#[from] PerspectiveError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("facet X{facet} has no node colored `{agent}`")]
    MissingColor { facet: usize, agent: Agent },
    #[error("facet X{facet} is contained in facet X{within}")]
    NotMaximal { facet: usize, within: usize },
}

/// Perspective-function belief on a UCF model: `B_a φ` holds at `X` iff
/// `φ` holds on every facet through `f_a(π_a(X))`. The model's belief
/// complexes are ignored.
pub struct Kasc<'m> {
    model: &'m SimplicialModel,
    target: Vec<usize>,
}

impl<'m> Kasc<'m> {
    pub fn new(model: &'m SimplicialModel, pm: &PerspectiveMap) -> Result<Self, AltError> {
        model.ready()?;
        let target = pm.resolve(model)?;
        Ok(Kasc { model, target })
    }

    pub fn model(&self) -> &'m SimplicialModel {
        self.model
    }

    /// Direct recursive evaluation at facet `x`.
    pub fn eval_at(&self, x: usize, f: &Formula) -> Result<bool, EvalError> {
        self.model.check_vocabulary(f)?;
        if x >= self.model.facet_count() {
            return Err(EvalError::UnknownPoint { kind: "facet", name: SimplicialModel::facet_label(x) });
        }
        Ok(self.eval_rec(x, f))
    }

    fn eval_rec(&self, x: usize, f: &Formula) -> bool {
        let m = self.model;
        let pi = |a: usize, y: usize| m.pi_index(a, y).expect("ready");
        match f {
            Formula::Atom(p) => m.valuation_map().get(p).is_some_and(|s| s.contains(x)),
            Formula::Falsum => false,
            Formula::Implies(l, r) => !self.eval_rec(x, l) || self.eval_rec(x, r),
            Formula::Knows(a, b) => {
                let a = m.agent_index(a).expect("vocabulary checked");
                (0..m.facet_count()).filter(|&y| pi(a, y) == pi(a, x)).all(|y| self.eval_rec(y, b))
            }
            Formula::Believes(a, b) => {
                let a = m.agent_index(a).expect("vocabulary checked");
                let seen = self.target[pi(a, x)];
                (0..m.facet_count()).filter(|&y| pi(a, y) == seen).all(|y| self.eval_rec(y, b))
            }
        }
    }
}

impl Semantics for Kasc<'_> {
    fn point_count(&self) -> usize {
        self.model.facet_count()
    }

    fn point_label(&self, index: usize) -> String {
        SimplicialModel::facet_label(index)
    }

    fn agents(&self) -> &[Agent] {
        self.model.agents()
    }

    fn valuation(&self, atom: &Atom) -> Option<&PointSet> {
        self.model.valuation_map().get(atom)
    }

    fn knowledge_box(&self, agent: usize, body: &PointSet) -> PointSet {
        self.model.knowledge_box(agent, body)
    }

    fn belief_box(&self, agent: usize, body: &PointSet) -> PointSet {
        let m = self.model;
        let mut out = PointSet::with_capacity(m.facet_count());
        for node in (0..m.nodes().len()).filter(|&n| m.node_color(n) == agent) {
            if m.star(self.target[node]).expect("ready").is_subset(body) {
                out.union_with(m.star(node).expect("ready"));
            }
        }
        out
    }

    fn ready(&self) -> Result<(), EvalError> {
        self.model.ready()
    }

    fn digest(&self) -> String {
        self.model.digest()
    }
}

/// Evaluates `f` at facet `x` under perspective-function belief.
pub fn eval_kasc(m: &SimplicialModel, pm: &PerspectiveMap, x: &str, f: &Formula) -> Result<bool, AltError> {
    let k = Kasc::new(m, pm)?;
    let xi = m.facet(x)?;
    Ok(k.eval_at(xi, f)?)
}

/// Number of `agent`-colored nodes in `face`.
pub fn multiplicity<'n>(face: impl IntoIterator<Item = &'n ColoredNode>, agent: &Agent) -> usize {
    face.into_iter().filter(|n| &n.color == agent).count()
}

/// A colored complex without the unique-color requirement and without
/// belief complexes. Every facet must carry every color.
#[derive(Clone, Debug)]
pub struct GeneralColoredModel {
    agents: Vec<Agent>,
    nodes: Vec<ColoredNode>,
    color: Vec<usize>,
    facets: Vec<BTreeSet<usize>>,
    valuation: BTreeMap<Atom, PointSet>,
    /// `mult[x][a]`
    mult: Vec<Vec<usize>>,
    /// `similar[a][x]`: facets sharing an `a`-colored node with `x`.
    similar: Vec<Vec<PointSet>>,
}

impl GeneralColoredModel {
    pub fn new(
        agents: Vec<Agent>,
        nodes: Vec<ColoredNode>,
        facets: Vec<BTreeSet<String>>,
        valuation: BTreeMap<Atom, BTreeSet<usize>>,
    ) -> Result<Self, AltError> {
        let mut agents = agents;
        agents.sort();
        if agents.is_empty() {
            return Err(ModelError::Empty("agents").into());
        }
        if facets.is_empty() {
            return Err(ModelError::Empty("facets").into());
        }
        if let Some(w) = agents.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::Duplicate { kind: "agent", id: w[0].to_string() }.into());
        }
        if let Some(a) = agents.iter().find(|a| !is_identifier(a.as_str())) {
            return Err(ModelError::BadIdentifier { kind: "agent", id: a.to_string() }.into());
        }
        let mut index = HashMap::new();
        let mut color = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.id.is_empty() {
                return Err(ModelError::BadIdentifier { kind: "node", id: n.id.clone() }.into());
            }
            if index.insert(n.id.as_str(), i).is_some() {
                return Err(ModelError::Duplicate { kind: "node", id: n.id.clone() }.into());
            }
            let c = agents
                .binary_search(&n.color)
                .map_err(|_| ModelError::Unknown { kind: "agent", id: n.color.to_string() })?;
            color.push(c);
        }
        let facets: Vec<BTreeSet<usize>> = facets
            .iter()
            .map(|f| {
                f.iter()
                    .map(|id| index.get(id.as_str()).copied().ok_or_else(|| ModelError::Unknown { kind: "node", id: id.clone() }))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        for (i, x) in facets.iter().enumerate() {
            for (j, y) in facets.iter().enumerate() {
                if i != j && x.is_subset(y) && (x != y || i > j) {
                    return Err(AltError::NotMaximal { facet: i, within: j });
                }
            }
        }
        let k = agents.len();
        let mut mult = Vec::with_capacity(facets.len());
        for (i, x) in facets.iter().enumerate() {
            let mut row = vec![0; k];
            for &n in x {
                row[color[n]] += 1;
            }
            if let Some(a) = row.iter().position(|&c| c == 0) {
                return Err(AltError::MissingColor { facet: i, agent: agents[a].clone() });
            }
            mult.push(row);
        }
        let nf = facets.len();
        let mut star = vec![PointSet::with_capacity(nf); nodes.len()];
        for (i, x) in facets.iter().enumerate() {
            for &n in x {
                star[n].insert(i);
            }
        }
        let similar = (0..k)
            .map(|a| {
                facets
                    .iter()
                    .map(|x| {
                        let mut s = PointSet::with_capacity(nf);
                        for &n in x.iter().filter(|&&n| color[n] == a) {
                            s.union_with(&star[n]);
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let mut val = BTreeMap::new();
        for (p, idx) in valuation {
            if !is_identifier(p.as_str()) {
                return Err(ModelError::BadIdentifier { kind: "atom", id: p.to_string() }.into());
            }
            let mut set = PointSet::with_capacity(nf);
            for i in idx {
                if i >= nf {
                    return Err(ModelError::Unknown { kind: "facet", id: i.to_string() }.into());
                }
                set.insert(i);
            }
            val.insert(p, set);
        }
        Ok(GeneralColoredModel { agents, nodes, color, facets, valuation: val, mult, similar })
    }

    pub fn builder() -> GeneralColoredBuilder {
        GeneralColoredBuilder::default()
    }

    /// Forgets the belief complexes of a simplicial model.
    pub fn from_simplicial(m: &SimplicialModel) -> Result<Self, AltError> {
        let facets = (0..m.facet_count())
            .map(|i| m.facet_nodes(i).iter().map(|&n| m.nodes()[n].id.clone()).collect())
            .collect();
        let valuation = m.valuation_map().iter().map(|(p, s)| (p.clone(), s.ones().collect())).collect();
        Self::new(m.agents().to_vec(), m.nodes().to_vec(), facets, valuation)
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn nodes(&self) -> &[ColoredNode] {
        &self.nodes
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn facet_nodes(&self, i: usize) -> &BTreeSet<usize> {
        &self.facets[i]
    }

    pub fn valuation_map(&self) -> &BTreeMap<Atom, PointSet> {
        &self.valuation
    }

    /// `m_a` of facet `x`.
    pub fn multiplicity(&self, x: usize, agent: usize) -> usize {
        self.mult[x][agent]
    }

    /// Stable content digest (SHA-256 over the canonical JSON form).
    pub fn digest(&self) -> String {
        crate::io::digest_json(&crate::io::general_to_file(self, None))
    }

    pub fn is_ucf(&self) -> bool {
        self.mult.iter().all(|row| row.iter().all(|&c| c == 1))
    }

    /// Accepts `X3` or `3`.
    pub fn facet(&self, name: &str) -> Result<usize, EvalError> {
        let digits = name.strip_prefix('X').unwrap_or(name);
        digits
            .parse::<usize>()
            .ok()
            .filter(|&i| i < self.facet_count())
            .ok_or_else(|| EvalError::UnknownPoint { kind: "facet", name: name.to_string() })
    }

    pub fn check_vocabulary(&self, f: &Formula) -> Result<(), EvalError> {
        if let Some(a) = f.agents().into_iter().find(|a| self.agents.binary_search(a).is_err()) {
            return Err(EvalError::UnknownAgent(a));
        }
        if let Some(p) = f.atoms().into_iter().find(|p| !self.valuation.contains_key(p)) {
            return Err(EvalError::UnknownAtom(p));
        }
        Ok(())
    }

    fn shares(&self, agent: usize, x: usize, y: usize) -> bool {
        self.facets[x].iter().any(|&n| self.color[n] == agent && self.facets[y].contains(&n))
    }
}

#[derive(Clone, Debug, Default)]
pub struct GeneralColoredBuilder {
    agents: Vec<Agent>,
    nodes: Vec<ColoredNode>,
    facets: Vec<BTreeSet<String>>,
    valuation: BTreeMap<Atom, BTreeSet<usize>>,
}

impl GeneralColoredBuilder {
    pub fn agents<I: IntoIterator<Item = S>, S: Into<Agent>>(mut self, agents: I) -> Self {
        self.agents.extend(agents.into_iter().map(Into::into));
        self
    }

    pub fn nodes(mut self, nodes: &[(&str, &str)]) -> Self {
        self.nodes
            .extend(nodes.iter().map(|(id, c)| ColoredNode { id: id.to_string(), color: (*c).into() }));
        self
    }

    pub fn facet(mut self, nodes: &[&str]) -> Self {
        self.facets.push(nodes.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn atom(mut self, p: &str, facets: &[usize]) -> Self {
        self.valuation.entry(p.into()).or_default().extend(facets.iter().copied());
        self
    }

    pub fn build(self) -> Result<GeneralColoredModel, AltError> {
        GeneralColoredModel::new(self.agents, self.nodes, self.facets, self.valuation)
    }
}

/// Which facets multiplicity belief quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `Y ∼_a X` and `m_a(Y) ≤ m_a(X)`.
    Bounded,
    /// `Y ∼_a X` with `m_a(Y)` least over the `∼_a`-neighbourhood of `X`.
    Minimal,
}

/// Multiplicity belief over a [`GeneralColoredModel`]. Knowledge
/// quantifies over every facet sharing an `a`-node.
pub struct SimpBel<'m> {
    model: &'m GeneralColoredModel,
    variant: Variant,
    /// `access[a][x]`
    access: Vec<Vec<PointSet>>,
}

impl<'m> SimpBel<'m> {
    pub fn new(model: &'m GeneralColoredModel, variant: Variant) -> Self {
        let access = (0..model.agents.len())
            .map(|a| {
                (0..model.facet_count())
                    .map(|x| {
                        let near = &model.similar[a][x];
                        let bound = match variant {
                            Variant::Bounded => model.mult[x][a],
                            Variant::Minimal => near.ones().map(|y| model.mult[y][a]).min().unwrap_or(0),
                        };
                        let mut s = PointSet::with_capacity(model.facet_count());
                        s.extend(near.ones().filter(|&y| match variant {
                            Variant::Bounded => model.mult[y][a] <= bound,
                            Variant::Minimal => model.mult[y][a] == bound,
                        }));
                        s
                    })
                    .collect()
            })
            .collect();
        SimpBel { model, variant, access }
    }

    /// Facets `B_a` quantifies over at `x`.
    pub fn belief_accessible(&self, agent: usize, x: usize) -> &PointSet {
        &self.access[agent][x]
    }

    /// Direct recursive evaluation at facet `x`, straight from the clauses.
    pub fn eval_at(&self, x: usize, f: &Formula) -> Result<bool, EvalError> {
        self.model.check_vocabulary(f)?;
        if x >= self.model.facet_count() {
            return Err(EvalError::UnknownPoint { kind: "facet", name: SimplicialModel::facet_label(x) });
        }
        Ok(self.eval_rec(x, f))
    }

    fn eval_rec(&self, x: usize, f: &Formula) -> bool {
        let m = self.model;
        let all = 0..m.facet_count();
        match f {
            Formula::Atom(p) => m.valuation.get(p).is_some_and(|s| s.contains(x)),
            Formula::Falsum => false,
            Formula::Implies(l, r) => !self.eval_rec(x, l) || self.eval_rec(x, r),
            Formula::Knows(a, b) => {
                let a = m.agents.binary_search(a).expect("vocabulary checked");
                all.filter(|&y| m.shares(a, x, y)).all(|y| self.eval_rec(y, b))
            }
            Formula::Believes(a, b) => {
                let a = m.agents.binary_search(a).expect("vocabulary checked");
                let near: Vec<usize> = all.filter(|&y| m.shares(a, x, y)).collect();
                let least = near.iter().map(|&y| m.mult[y][a]).min().unwrap_or(0);
                near.iter()
                    .filter(|&&y| match self.variant {
                        Variant::Bounded => m.mult[y][a] <= m.mult[x][a],
                        Variant::Minimal => m.mult[y][a] == least,
                    })
                    .all(|&y| self.eval_rec(y, b))
            }
        }
    }
}

impl Semantics for SimpBel<'_> {
    fn point_count(&self) -> usize {
        self.model.facet_count()
    }

    fn point_label(&self, index: usize) -> String {
        SimplicialModel::facet_label(index)
    }

    fn agents(&self) -> &[Agent] {
        &self.model.agents
    }

    fn valuation(&self, atom: &Atom) -> Option<&PointSet> {
        self.model.valuation.get(atom)
    }

    fn knowledge_box(&self, agent: usize, body: &PointSet) -> PointSet {
        boxed(&self.model.similar[agent], body)
    }

    fn belief_box(&self, agent: usize, body: &PointSet) -> PointSet {
        boxed(&self.access[agent], body)
    }

    fn digest(&self) -> String {
        self.model.digest()
    }
}

fn boxed(access: &[PointSet], body: &PointSet) -> PointSet {
    let mut out = PointSet::with_capacity(access.len());
    out.extend((0..access.len()).filter(|&x| access[x].is_subset(body)));
    out
}

/// Evaluates `f` at facet `x` under multiplicity belief.
pub fn eval_simpbel(m: &GeneralColoredModel, x: &str, f: &Formula, variant: Variant) -> Result<bool, EvalError> {
    let xi = m.facet(x)?;
    SimpBel::new(m, variant).eval_at(xi, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Evaluator;
    use crate::fixtures::{fb, multiplicity as mult_fixture, perspective_shift};
    use crate::logic::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn perspective_shift_breaks_k_implies_b() {
        let (m, pm) = perspective_shift();
        assert!(eval_kasc(&m, &pm, "X0", &f("K[a] p & ~B[a] p")).unwrap());
        let k = Kasc::new(&m, &pm).unwrap();
        let mut ev = Evaluator::new(&k);
        assert_eq!(ev.counterexample(&f("K[a] p -> B[a] p")).unwrap(), Some(0));
    }

    #[test]
    fn identity_perspective_is_knowledge() {
        let m = fb();
        let k = Kasc::new(&m, &PerspectiveMap::identity()).unwrap();
        for x in 0..m.facet_count() {
            for s in ["B[a] p", "B[b] p", "B[a] ~B[b] p"] {
                let g = f(s);
                assert_eq!(k.eval_at(x, &g).unwrap(), crate::simplicial::eval_simplicial_at(&m, x, &g.belief_as_knowledge()).unwrap());
            }
        }
    }

    #[test]
    fn swap_is_not_idempotent() {
        let (m, _) = perspective_shift();
        let pm = PerspectiveMap::from_pairs([("a", "a0", "a1"), ("a", "a1", "a0")]);
        assert!(matches!(pm.validate(&m), Err(PerspectiveError::NotIdempotent { .. })));
        let pm = PerspectiveMap::from_pairs([("a", "a0", "b0")]);
        assert!(matches!(pm.validate(&m), Err(PerspectiveError::ColorMismatch { .. })));
        let pm = PerspectiveMap::from_pairs([("a", "a9", "a0")]);
        assert!(matches!(pm.validate(&m), Err(PerspectiveError::UnknownNode { .. })));
    }

    #[test]
    fn counting() {
        let nodes = [
            ColoredNode { id: "a0".into(), color: "a".into() },
            ColoredNode { id: "a1".into(), color: "a".into() },
            ColoredNode { id: "b0".into(), color: "b".into() },
        ];
        assert_eq!(multiplicity(&nodes, &"a".into()), 2);
        assert_eq!(multiplicity(&nodes[1..], &"b".into()), 1);
        assert_eq!(multiplicity(&[] as &[ColoredNode], &"a".into()), 0);
    }

    #[test]
    fn multiplicity_fixture() {
        let m = mult_fixture();
        assert!(!m.is_ucf());
        assert_eq!((m.multiplicity(0, 0), m.multiplicity(1, 0), m.multiplicity(2, 0)), (2, 1, 3));
        let ev = |s: &str, v| eval_simpbel(&m, "X0", &f(s), v).unwrap();
        assert!(ev("B[a] p", Variant::Bounded));
        assert!(!ev("K[a] p", Variant::Bounded));
        assert!(ev("B[a] p", Variant::Minimal));
        let minimal = SimpBel::new(&m, Variant::Minimal);
        assert_eq!(minimal.belief_accessible(0, 0).ones().collect::<Vec<_>>(), vec![1]);
        let bounded = SimpBel::new(&m, Variant::Bounded);
        assert_eq!(bounded.belief_accessible(0, 0).ones().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn missing_color_is_a_load_error() {
        let err = GeneralColoredModel::builder()
            .agents(["a", "b"])
            .nodes(&[("a0", "a"), ("b0", "b")])
            .facet(&["a0", "b0"])
            .facet(&["a0"])
            .build()
            .unwrap_err();
        assert!(matches!(err, AltError::NotMaximal { facet: 1, within: 0 }));
        let err = GeneralColoredModel::builder()
            .agents(["a", "b"])
            .nodes(&[("a0", "a"), ("a1", "a"), ("b0", "b")])
            .facet(&["a0", "b0"])
            .facet(&["a1"])
            .build()
            .unwrap_err();
        assert_eq!(err, AltError::MissingColor { facet: 1, agent: "b".into() });
    }

    #[test]
    fn bounded_validates_k_implies_b_on_fixture() {
        let m = mult_fixture();
        for v in [Variant::Bounded, Variant::Minimal] {
            let sb = SimpBel::new(&m, v);
            let mut ev = Evaluator::new(&sb);
            for s in ["K[a] p -> B[a] p", "K[b] p -> B[b] p", "K[a] ~p -> B[a] ~p"] {
                assert_eq!(ev.counterexample(&f(s)).unwrap(), None, "{s}");
            }
        }
    }

    #[test]
    fn set_and_pointwise_agree() {
        let m = mult_fixture();
        let fs = crate::harness::enumerate_formulas(m.agents(), &["p".into()], 1, 100_000).unwrap();
        for v in [Variant::Bounded, Variant::Minimal] {
            let sb = SimpBel::new(&m, v);
            let mut ev = Evaluator::new(&sb);
            for g in &fs {
                let set = ev.truth_set(g).unwrap();
                for x in 0..m.facet_count() {
                    assert_eq!(set.contains(x), sb.eval_at(x, g).unwrap(), "{g} at X{x}");
                }
            }
        }
        let (sm, pm) = perspective_shift();
        let k = Kasc::new(&sm, &pm).unwrap();
        let mut ev = Evaluator::new(&k);
        for g in &fs {
            let set = ev.truth_set(g).unwrap();
            for x in 0..sm.facet_count() {
                assert_eq!(set.contains(x), k.eval_at(x, g).unwrap(), "{g} at X{x}");
            }
        }
    }
}
