//! Colored simplicial complexes and simplicial belief models.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::eval::{EvalError, PointSet, Semantics};
use crate::logic::{is_identifier, Agent, Atom, Formula};
use crate::relational::ModelError;
use crate::report::ValidationReport;

/// Smallest subset-closed family containing `faces`.
pub fn close_downward<T: Ord + Clone>(faces: &BTreeSet<BTreeSet<T>>) -> BTreeSet<BTreeSet<T>> {
    let mut out = BTreeSet::new();
    for face in faces {
        let items: Vec<&T> = face.iter().collect();
        assert!(items.len() < 32, "face too large to close downward");
        for mask in 0u32..(1 << items.len()) {
            let sub: BTreeSet<T> = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| (*x).clone())
                .collect();
            out.insert(sub);
        }
    }
    out
}

/// The ⊆-maximal members of `faces`.
pub fn facets<T: Ord + Clone>(faces: &BTreeSet<BTreeSet<T>>) -> BTreeSet<BTreeSet<T>> {
    faces
        .iter()
        .filter(|f| !faces.iter().any(|g| g != *f && f.is_subset(g)))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoredNode {
    pub id: String,
    pub color: Agent,
}

/// A complex given by its facet list; faces are implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex {
    facets: Vec<BTreeSet<usize>>,
}

impl Complex {
    pub fn new(facets: Vec<BTreeSet<usize>>) -> Self {
        Complex { facets }
    }

    pub fn facets(&self) -> &[BTreeSet<usize>] {
        &self.facets
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Every face, including the empty one.
    pub fn faces(&self) -> BTreeSet<BTreeSet<usize>> {
        close_downward(&self.facets.iter().cloned().collect())
    }

    pub fn contains_face(&self, face: &BTreeSet<usize>) -> bool {
        self.facets.iter().any(|f| face.is_subset(f))
    }

    /// Pairs `(i, j)` where facet `i` is contained in facet `j`.
    fn non_maximal(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, x) in self.facets.iter().enumerate() {
            for (j, y) in self.facets.iter().enumerate() {
                if i != j && x.is_subset(y) && (x != y || i > j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A simplicial belief model: nodes colored by agents, the knowledge
/// complex, one belief complex per agent, and a facet valuation.
///
/// Facets are identified by their index in the knowledge complex's list.
#[derive(Clone, Debug)]
pub struct SimplicialModel {
    agents: Vec<Agent>,
    nodes: Vec<ColoredNode>,
    node_index: HashMap<String, usize>,
    color: Vec<usize>,
    knowledge: Complex,
    belief: Vec<Complex>,
    valuation: BTreeMap<Atom, PointSet>,
    derived: Result<Derived, String>,
}

#[derive(Clone, Debug)]
struct Derived {
    /// `pi[facet][agent]` is the facet's node of that color.
    pi: Vec<Vec<usize>>,
    /// Facets of S, by index, that are facets of `S_a`.
    belief_members: Vec<PointSet>,
    /// Facets through each node, as a point set.
    star: Vec<PointSet>,
}

impl SimplicialModel {
    /// Builds a model from node ids. Belief facets must be given as node
    /// sets so that containment in `S` can be checked rather than assumed.
    pub fn new(
        agents: Vec<Agent>,
        nodes: Vec<ColoredNode>,
        facets: Vec<BTreeSet<String>>,
        belief: BTreeMap<Agent, Vec<BTreeSet<String>>>,
        valuation: BTreeMap<Atom, BTreeSet<usize>>,
    ) -> Result<Self, ModelError> {
        let mut agents = agents;
        if agents.is_empty() {
            return Err(ModelError::Empty("agents"));
        }
        if facets.is_empty() {
            return Err(ModelError::Empty("facets"));
        }
        agents.sort();
        if let Some(w) = agents.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::Duplicate { kind: "agent", id: w[0].to_string() });
        }
        if let Some(a) = agents.iter().find(|a| !is_identifier(a.as_str())) {
            return Err(ModelError::BadIdentifier { kind: "agent", id: a.to_string() });
        }
        let mut node_index = HashMap::new();
        let mut color = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.id.is_empty() {
                return Err(ModelError::BadIdentifier { kind: "node", id: n.id.clone() });
            }
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(ModelError::Duplicate { kind: "node", id: n.id.clone() });
            }
            let c = agents
                .binary_search(&n.color)
                .map_err(|_| ModelError::Unknown { kind: "agent", id: n.color.to_string() })?;
            color.push(c);
        }
        let resolve = |face: &BTreeSet<String>| -> Result<BTreeSet<usize>, ModelError> {
            face.iter()
                .map(|id| node_index.get(id).copied().ok_or_else(|| ModelError::Unknown { kind: "node", id: id.clone() }))
                .collect()
        };
        let knowledge = Complex::new(facets.iter().map(resolve).collect::<Result<_, _>>()?);
        for a in belief.keys() {
            if agents.binary_search(a).is_err() {
                return Err(ModelError::Unknown { kind: "agent", id: a.to_string() });
            }
        }
        let belief = agents
            .iter()
            .map(|a| {
                let fs = belief.get(a).map(|v| v.as_slice()).unwrap_or(&[]);
                fs.iter().map(resolve).collect::<Result<Vec<_>, _>>().map(Complex::new)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = knowledge.facets.len();
        let mut val = BTreeMap::new();
        for (p, idx) in valuation {
            if !is_identifier(p.as_str()) {
                return Err(ModelError::BadIdentifier { kind: "atom", id: p.to_string() });
            }
            let mut set = PointSet::with_capacity(n);
            for i in idx {
                if i >= n {
                    return Err(ModelError::Unknown { kind: "facet", id: i.to_string() });
                }
                set.insert(i);
            }
            val.insert(p, set);
        }
        let mut m = SimplicialModel {
            agents,
            nodes,
            node_index,
            color,
            knowledge,
            belief,
            valuation: val,
            derived: Err(String::new()),
        };
        m.derived = m.derive();
        Ok(m)
    }

    fn derive(&self) -> Result<Derived, String> {
        let k = self.agents.len();
        let mut pi = Vec::with_capacity(self.knowledge.facets.len());
        for (i, x) in self.knowledge.facets.iter().enumerate() {
            pi.push(self.ucf_row(x).map_err(|(a, c)| {
                format!("facet X{i} has {c} nodes colored `{}`", self.agents[a])
            })?);
        }
        let mut lookup: HashMap<&BTreeSet<usize>, usize> = HashMap::new();
        for (i, x) in self.knowledge.facets.iter().enumerate() {
            lookup.entry(x).or_insert(i);
        }
        let mut belief_members = Vec::with_capacity(k);
        for (a, c) in self.belief.iter().enumerate() {
            let mut set = PointSet::with_capacity(pi.len());
            for y in &c.facets {
                match lookup.get(y) {
                    Some(&i) => set.insert(i),
                    None => {
                        return Err(format!(
                            "belief facet {} of `{}` is not a facet of the knowledge complex",
                            self.face_label(y),
                            self.agents[a]
                        ))
                    }
                }
            }
            belief_members.push(set);
        }
        let mut star = vec![PointSet::with_capacity(pi.len()); self.nodes.len()];
        for (i, x) in self.knowledge.facets.iter().enumerate() {
            for &node in x {
                star[node].insert(i);
            }
        }
        Ok(Derived { pi, belief_members, star })
    }

    /// One node per agent, or the first agent whose count differs from 1.
    fn ucf_row(&self, face: &BTreeSet<usize>) -> Result<Vec<usize>, (usize, usize)> {
        let mut row = vec![usize::MAX; self.agents.len()];
        let mut count = vec![0usize; self.agents.len()];
        for &n in face {
            row[self.color[n]] = n;
            count[self.color[n]] += 1;
        }
        match count.iter().position(|&c| c != 1) {
            Some(a) => Err((a, count[a])),
            None => Ok(row),
        }
    }

    fn derived(&self) -> Result<&Derived, EvalError> {
        self.derived.as_ref().map_err(|e| EvalError::IllFormed(e.clone()))
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_index(&self, a: &Agent) -> Option<usize> {
        self.agents.binary_search(a).ok()
    }

    pub fn nodes(&self) -> &[ColoredNode] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn node_color(&self, node: usize) -> usize {
        self.color[node]
    }

    pub fn knowledge(&self) -> &Complex {
        &self.knowledge
    }

    pub fn belief(&self, agent: usize) -> &Complex {
        &self.belief[agent]
    }

    pub fn facet_count(&self) -> usize {
        self.knowledge.facets.len()
    }

    pub fn facet_nodes(&self, i: usize) -> &BTreeSet<usize> {
        &self.knowledge.facets[i]
    }

    pub fn facet_label(i: usize) -> String {
        format!("X{i}")
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

    pub fn face_label(&self, face: &BTreeSet<usize>) -> String {
        let ids: Vec<&str> = face.iter().map(|&n| self.nodes[n].id.as_str()).collect();
        format!("{{{}}}", ids.join(","))
    }

    pub fn valuation_map(&self) -> &BTreeMap<Atom, PointSet> {
        &self.valuation
    }

    /// Facets of `S` that belong to `S_a` (requires a well-formed model).
    pub fn belief_facets(&self, agent: usize) -> Result<&PointSet, EvalError> {
        Ok(&self.derived()?.belief_members[agent])
    }

    /// The `agent`-colored node of facet `x`.
    pub fn pi_index(&self, agent: usize, x: usize) -> Result<usize, EvalError> {
        Ok(self.derived()?.pi[x][agent])
    }

    /// Facets of `S` through `node`.
    pub fn star(&self, node: usize) -> Result<&PointSet, EvalError> {
        Ok(&self.derived()?.star[node])
    }

    pub fn check_vocabulary(&self, f: &Formula) -> Result<(), EvalError> {
        if let Some(a) = f.agents().into_iter().find(|a| self.agent_index(a).is_none()) {
            return Err(EvalError::UnknownAgent(a));
        }
        if let Some(p) = f.atoms().into_iter().find(|p| !self.valuation.contains_key(p)) {
            return Err(EvalError::UnknownAtom(p));
        }
        Ok(())
    }

    /// Direct recursive evaluation at facet `x`, by the satisfaction clauses.
    fn eval_at(&self, d: &Derived, x: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(p) => self.valuation.get(p).is_some_and(|s| s.contains(x)),
            Formula::Falsum => false,
            Formula::Implies(l, r) => !self.eval_at(d, x, l) || self.eval_at(d, x, r),
            Formula::Knows(a, b) => {
                let a = self.agent_index(a).expect("vocabulary checked");
                (0..self.facet_count())
                    .filter(|&y| d.pi[y][a] == d.pi[x][a])
                    .all(|y| self.eval_at(d, y, b))
            }
            Formula::Believes(a, b) => {
                let a = self.agent_index(a).expect("vocabulary checked");
                d.belief_members[a]
                    .ones()
                    .filter(|&y| d.pi[y][a] == d.pi[x][a])
                    .all(|y| self.eval_at(d, y, b))
            }
        }
    }

    /// Stable content digest (SHA-256 over the canonical JSON form).
    pub fn digest(&self) -> String {
        crate::io::digest_json(&crate::io::simplicial_to_file(self))
    }
}

impl Semantics for SimplicialModel {
    fn point_count(&self) -> usize {
        self.facet_count()
    }

    fn point_label(&self, index: usize) -> String {
        Self::facet_label(index)
    }

    fn agents(&self) -> &[Agent] {
        &self.agents
    }

    fn valuation(&self, atom: &Atom) -> Option<&PointSet> {
        self.valuation.get(atom)
    }

    fn knowledge_box(&self, agent: usize, body: &PointSet) -> PointSet {
        let d = self.derived.as_ref().expect("checked by ready()");
        let mut out = PointSet::with_capacity(self.facet_count());
        for node in (0..self.nodes.len()).filter(|&n| self.color[n] == agent) {
            let group = &d.star[node];
            if group.is_subset(body) {
                out.union_with(group);
            }
        }
        out
    }

    fn belief_box(&self, agent: usize, body: &PointSet) -> PointSet {
        let d = self.derived.as_ref().expect("checked by ready()");
        let mut out = PointSet::with_capacity(self.facet_count());
        for node in (0..self.nodes.len()).filter(|&n| self.color[n] == agent) {
            let group = &d.star[node];
            if group.intersection(&d.belief_members[agent]).all(|y| body.contains(y)) {
                out.union_with(group);
            }
        }
        out
    }

    fn ready(&self) -> Result<(), EvalError> {
        self.derived().map(|_| ())
    }

    fn digest(&self) -> String {
        SimplicialModel::digest(self)
    }
}

/// Checks UCF for `S` and every `S_a`, non-emptiness and containment of
/// each `S_a`, and facet maximality. Reports `<agent>-serial` flags.
pub fn validate_simplicial(m: &SimplicialModel) -> ValidationReport {
    let mut report = ValidationReport::new();
    for (i, j) in m.knowledge.non_maximal() {
        report.violation(
            "facet-maximal",
            vec![SimplicialModel::facet_label(i), SimplicialModel::facet_label(j)],
            "facet contained in another facet",
        );
    }
    for (i, x) in m.knowledge.facets.iter().enumerate() {
        if let Err((a, c)) = m.ucf_row(x) {
            report.violation(
                "ucf",
                vec![SimplicialModel::facet_label(i), m.agents[a].to_string()],
                format!("{c} nodes of this color"),
            );
        }
    }
    for (a, complex) in m.belief.iter().enumerate() {
        let agent = m.agents[a].to_string();
        if complex.is_empty() {
            report.violation("belief-nonempty", vec![agent.clone()], "belief complex has no facets");
        }
        for (i, j) in complex.non_maximal() {
            report.violation(
                "facet-maximal",
                vec![agent.clone(), m.face_label(&complex.facets[i]), m.face_label(&complex.facets[j])],
                "belief facet contained in another belief facet",
            );
        }
        for y in &complex.facets {
            if !m.knowledge.contains_face(y) {
                report.violation(
                    "belief-containment",
                    vec![agent.clone(), m.face_label(y)],
                    "not a face of the knowledge complex",
                );
            }
            if let Err((b, c)) = m.ucf_row(y) {
                report.violation(
                    "belief-ucf",
                    vec![agent.clone(), m.face_label(y), m.agents[b].to_string()],
                    format!("{c} nodes of this color"),
                );
            }
        }
    }
    if let Ok(d) = &m.derived {
        for (a, agent) in m.agents.iter().enumerate() {
            let believed: BTreeSet<usize> = d.belief_members[a].ones().map(|y| d.pi[y][a]).collect();
            let gap = (0..m.facet_count()).find(|&x| !believed.contains(&d.pi[x][a]));
            match gap {
                None => report.flag(format!("{agent}-serial"), true, vec![]),
                Some(x) => report.flag(
                    format!("{agent}-serial"),
                    false,
                    vec![SimplicialModel::facet_label(x), m.nodes[d.pi[x][a]].id.clone()],
                ),
            }
        }
    }
    report.finish()
}

/// True iff every agent is serial. `None` if the model is not well formed.
pub fn is_serial(m: &SimplicialModel) -> Option<bool> {
    let report = validate_simplicial(m);
    if !report.ok {
        return None;
    }
    Some(report.flags.iter().filter(|f| f.name.ends_with("-serial")).all(|f| f.value))
}

/// The unique `agent`-colored node of facet `x`.
pub fn pi<'m>(m: &'m SimplicialModel, agent: &Agent, x: usize) -> Result<&'m ColoredNode, PiError> {
    let a = m.agent_index(agent).ok_or_else(|| PiError::UnknownAgent(agent.clone()))?;
    let face = m.knowledge.facets.get(x).ok_or(PiError::UnknownFacet(x))?;
    let found: Vec<usize> = face.iter().copied().filter(|&n| m.color[n] == a).collect();
    match found.as_slice() {
        [n] => Ok(&m.nodes[*n]),
        _ => Err(PiError::NotUniquelyColored { facet: x, agent: agent.clone(), count: found.len() }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PiError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(Agent),
    #[error("unknown facet X{0}")]
    UnknownFacet(usize),
    #[error("facet X{facet} has {count} nodes colored `{agent}`")]
    NotUniquelyColored { facet: usize, agent: Agent, count: usize },
}

/// Evaluates `f` at facet `x` (given as `X<i>` or `<i>`).
pub fn eval_simplicial(m: &SimplicialModel, x: &str, f: &Formula) -> Result<bool, EvalError> {
    let xi = m.facet(x)?;
    eval_simplicial_at(m, xi, f)
}

pub fn eval_simplicial_at(m: &SimplicialModel, x: usize, f: &Formula) -> Result<bool, EvalError> {
    if x >= m.facet_count() {
        return Err(EvalError::UnknownPoint { kind: "facet", name: SimplicialModel::facet_label(x) });
    }
    let d = m.derived()?;
    m.check_vocabulary(f)?;
    Ok(m.eval_at(d, x, f))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validity {
    pub valid: bool,
    pub counterexample: Option<usize>,
}

/// Truth at every facet; otherwise the first failing facet.
pub fn is_valid_in_model(m: &SimplicialModel, f: &Formula) -> Result<Validity, EvalError> {
    let d = m.derived()?;
    m.check_vocabulary(f)?;
    let counterexample = (0..m.facet_count()).find(|&x| !m.eval_at(d, x, f));
    Ok(Validity { valid: counterexample.is_none(), counterexample })
}

/// Name-based builder.
#[derive(Clone, Debug, Default)]
pub struct SimplicialBuilder {
    agents: Vec<Agent>,
    nodes: Vec<ColoredNode>,
    facets: Vec<BTreeSet<String>>,
    belief: BTreeMap<Agent, Vec<BTreeSet<String>>>,
    valuation: BTreeMap<Atom, BTreeSet<usize>>,
}

impl SimplicialBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn agents<I: IntoIterator<Item = S>, S: Into<Agent>>(mut self, agents: I) -> Self {
        self.agents.extend(agents.into_iter().map(Into::into));
        self
    }

    pub fn node(mut self, id: &str, color: &str) -> Self {
        self.nodes.push(ColoredNode { id: id.to_string(), color: color.into() });
        self
    }

    pub fn facet(mut self, nodes: &[&str]) -> Self {
        self.facets.push(nodes.iter().map(|s| s.to_string()).collect());
        self
    }

    /// Adds knowledge facet `index` (which must already exist) to `S_a`.
    pub fn believe_facet(mut self, agent: &str, index: usize) -> Self {
        let face = self.facets[index].clone();
        self.belief.entry(agent.into()).or_default().push(face);
        self
    }

    pub fn believe_face(mut self, agent: &str, nodes: &[&str]) -> Self {
        self.belief.entry(agent.into()).or_default().push(nodes.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn atom(mut self, p: &str, facets: &[usize]) -> Self {
        self.valuation.entry(p.into()).or_default().extend(facets.iter().copied());
        self
    }

    pub fn build(self) -> Result<SimplicialModel, ModelError> {
        SimplicialModel::new(self.agents, self.nodes, self.facets, self.belief, self.valuation)
    }
}
