//! Translations between relational and simplicial belief models, and the
//! product construction that makes an improper relational model proper.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::eval::{EvalError, PointSet};
use crate::logic::Agent;
use crate::relational::{validate_relational, ModelError, Relation, RelationalModel};
use crate::report::ValidationReport;
use crate::simplicial::{ColoredNode, SimplicialModel};

#[derive(Clone, Debug, Error)]
pub enum TransformError {
    #[error("input model fails validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("model is not proper: worlds `{0}` and `{1}` share every knowledge class")]
    Improper(String, String),
    #[error("properization needs at least two agents")]
    TooFewAgents,
    #[error("unknown distinguished agent `{0}`")]
    UnknownAgent(Agent),
    #[error(transparent)]
    NotEvaluable(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The world/facet correspondence of a translation, plus what each node
/// stands for (an agent and a set of worlds).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationWitness {
    /// `world_to_facet[w]` is the facet index of world `w`.
    pub world_to_facet: Vec<usize>,
    pub world_names: Vec<String>,
    pub node_semantics: Vec<NodeMeaning>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeMeaning {
    pub node: String,
    pub agent: Agent,
    pub worlds: Vec<String>,
}

/// Builds `M_N` from a valid proper relational model: one node per
/// knowledge class per agent, one facet per world, and `S_a` made of the
/// facets of worlds that are belief-accessible from themselves.
pub fn to_simplicial(m: &RelationalModel) -> Result<(SimplicialModel, TranslationWitness), TransformError> {
    let report = validate_relational(m);
    if !report.ok {
        return Err(TransformError::Invalid(report));
    }
    if let Some((w, u)) = m.improper_pair().expect("validated") {
        return Err(TransformError::Improper(m.world_name(w).into(), m.world_name(u).into()));
    }
    let n = m.world_count();
    let agents = m.agents().to_vec();
    let mut nodes = Vec::new();
    let mut node_semantics = Vec::new();
    // node_of[a][w] = id of the node for [w]_a
    let mut node_of = vec![vec![String::new(); n]; agents.len()];
    for (ai, a) in agents.iter().enumerate() {
        for class in m.knowledge_partition(ai).expect("validated") {
            let id = format!("({},{})", m.world_name(class[0]), a);
            for &w in &class {
                node_of[ai][w] = id.clone();
            }
            nodes.push(ColoredNode { id: id.clone(), color: a.clone() });
            node_semantics.push(NodeMeaning {
                node: id,
                agent: a.clone(),
                worlds: class.iter().map(|&w| m.world_name(w).to_string()).collect(),
            });
        }
    }
    let facet_of = |w: usize| -> BTreeSet<String> { (0..agents.len()).map(|a| node_of[a][w].clone()).collect() };
    let facets: Vec<BTreeSet<String>> = (0..n).map(facet_of).collect();
    let mut belief = BTreeMap::new();
    for (ai, a) in agents.iter().enumerate() {
        let q = m.belief(ai);
        let fs: Vec<BTreeSet<String>> = (0..n).filter(|&w| q.contains(w, w)).map(facet_of).collect();
        belief.insert(a.clone(), fs);
    }
    let valuation = m
        .valuation_map()
        .iter()
        .map(|(p, set)| (p.clone(), set.ones().collect()))
        .collect();
    let sm = SimplicialModel::new(agents, nodes, facets, belief, valuation)?;
    let witness = TranslationWitness {
        world_to_facet: (0..n).collect(),
        world_names: m.worlds().to_vec(),
        node_semantics,
    };
    Ok((sm, witness))
}

/// Reads a simplicial belief model as a relational one: worlds are facets,
/// `X R_a Y` iff `π_a(X) = π_a(Y)`, and `X Q_a Y` iff additionally
/// `Y ∈ F(S_a)`.
pub fn to_relational(m: &SimplicialModel) -> Result<(RelationalModel, TranslationWitness), TransformError> {
    use crate::eval::Semantics;
    m.ready()?;
    let n = m.facet_count();
    let worlds: Vec<String> = (0..n).map(SimplicialModel::facet_label).collect();
    let mut relations = BTreeMap::new();
    for (ai, a) in m.agents().iter().enumerate() {
        let members = m.belief_facets(ai)?;
        let mut r = Relation::empty(n);
        let mut q = Relation::empty(n);
        for x in 0..n {
            let star = m.star(m.pi_index(ai, x)?)?;
            for y in star.ones() {
                r.insert(x, y);
                if members.contains(y) {
                    q.insert(x, y);
                }
            }
        }
        relations.insert(a.clone(), (r, q));
    }
    let valuation: BTreeMap<_, PointSet> = m.valuation_map().clone();
    let rm = RelationalModel::new(worlds.clone(), relations, valuation)?;
    let mut node_semantics = Vec::new();
    for (i, node) in m.nodes().iter().enumerate() {
        node_semantics.push(NodeMeaning {
            node: node.id.clone(),
            agent: node.color.clone(),
            worlds: m.star(i)?.ones().map(SimplicialModel::facet_label).collect(),
        });
    }
    Ok((rm, TranslationWitness { world_to_facet: (0..n).collect(), world_names: worlds, node_semantics }))
}

/// Data needed to replay a properization: the index map `g` into `Z_n`,
/// the skewed agent, and the projection onto the first coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperizeWitness {
    pub distinguished: Agent,
    pub modulus: usize,
    /// `g[w]` for each original world, in world order.
    pub g: BTreeMap<String, usize>,
    /// Original world index of each product world.
    pub projection: Vec<usize>,
    pub carrier: Vec<(String, String)>,
}

/// Makes `m` proper by taking `|W|` copies of it and skewing the
/// distinguished agent's relations across the copies.
///
/// With `g(w_i) = i` in `Z_n`, for agents other than the distinguished
/// `b`: `(w,u) ~ (w',u')` iff `u = u'` and `w ~ w'`. For `b`: iff
/// `g(u) - g(w) = g(u') - g(w') (mod n)` and `w ~ w'`. The same rule is
/// applied to knowledge and belief. The first projection is a surjective
/// bounded morphism onto `m`.
pub fn properize(
    m: &RelationalModel,
    distinguished: Option<&Agent>,
) -> Result<(RelationalModel, ProperizeWitness), TransformError> {
    if m.agents().len() < 2 {
        return Err(TransformError::TooFewAgents);
    }
    let report = validate_relational(m);
    if !report.ok {
        return Err(TransformError::Invalid(report));
    }
    let b = match distinguished {
        Some(a) => m.agent_index(a).ok_or_else(|| TransformError::UnknownAgent(a.clone()))?,
        None => 0,
    };
    let n = m.world_count();
    let pair = |w: usize, u: usize| w * n + u;
    let worlds: Vec<String> = (0..n * n)
        .map(|i| format!("({},{})", m.world_name(i / n), m.world_name(i % n)))
        .collect();
    let lift = |rel: &Relation, skew: bool| {
        let mut out = Relation::empty(n * n);
        for (w, w2) in rel.pairs() {
            for u in 0..n {
                let u2 = if skew { (u + n - w + w2) % n } else { u };
                out.insert(pair(w, u), pair(w2, u2));
            }
        }
        out
    };
    let mut relations = BTreeMap::new();
    for (ai, a) in m.agents().iter().enumerate() {
        let skew = ai == b;
        relations.insert(a.clone(), (lift(m.knowledge(ai), skew), lift(m.belief(ai), skew)));
    }
    let valuation = m
        .valuation_map()
        .iter()
        .map(|(p, set)| {
            let mut lifted = PointSet::with_capacity(n * n);
            for w in set.ones() {
                lifted.insert_range(pair(w, 0)..pair(w, 0) + n);
            }
            (p.clone(), lifted)
        })
        .collect();
    let out = RelationalModel::new(worlds, relations, valuation)?;
    let witness = ProperizeWitness {
        distinguished: m.agents()[b].clone(),
        modulus: n,
        g: (0..n).map(|w| (m.world_name(w).to_string(), w)).collect(),
        projection: (0..n * n).map(|i| i / n).collect(),
        carrier: (0..n * n)
            .map(|i| (m.world_name(i / n).to_string(), m.world_name(i % n).to_string()))
            .collect(),
    };
    Ok((out, witness))
}
