//! JSON model files, witness sidecars, and content digests.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::altsem::{AltError, GeneralColoredModel, PerspectiveMap};
use crate::eval::PointSet;
use crate::logic::{Agent, Atom};
use crate::relational::{ModelError, Relation, RelationalModel};
use crate::simplicial::{ColoredNode, SimplicialModel};
use crate::transform::{ProperizeWitness, TranslationWitness};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Alt(#[from] AltError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelFile {
    Relational(RelationalFile),
    Simplicial(SimplicialFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationalFile {
    pub agents: Vec<Agent>,
    pub worlds: Vec<String>,
    #[serde(rename = "R")]
    pub r: BTreeMap<Agent, Vec<(String, String)>>,
    #[serde(rename = "Q")]
    pub q: BTreeMap<Agent, Vec<(String, String)>>,
    #[serde(default)]
    pub val: BTreeMap<Atom, Vec<String>>,
}

/// A belief facet given either as an index into `facets` or as node ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FaceRef {
    Index(usize),
    Nodes(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialFile {
    pub agents: Vec<Agent>,
    pub nodes: Vec<ColoredNode>,
    pub facets: Vec<Vec<String>>,
    #[serde(default)]
    pub belief: BTreeMap<Agent, Vec<FaceRef>>,
    #[serde(default)]
    pub val: BTreeMap<Atom, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perspective_map: Option<PerspectiveMap>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_non_ucf: bool,
}

/// A model as loaded from disk.
#[derive(Clone, Debug)]
pub enum LoadedModel {
    Relational(RelationalModel),
    Simplicial { model: SimplicialModel, perspective: Option<PerspectiveMap> },
    /// Loaded with `allow_non_ucf`; belief complexes are not read.
    General { model: GeneralColoredModel, perspective: Option<PerspectiveMap> },
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<LoadedModel, LoadError> {
    let file: ModelFile = serde_json::from_str(text)?;
    model_from_file(file)
}

pub fn model_from_file(file: ModelFile) -> Result<LoadedModel, LoadError> {
    match file {
        ModelFile::Relational(f) => Ok(LoadedModel::Relational(relational_from_file(f)?)),
        ModelFile::Simplicial(f) => {
            let perspective = f.perspective_map.clone();
            if f.allow_non_ucf {
                let facets = f.facets.into_iter().map(|x| x.into_iter().collect()).collect();
                let val = f.val.into_iter().map(|(p, xs)| (p, xs.into_iter().collect())).collect();
                let model = GeneralColoredModel::new(f.agents, f.nodes, facets, val)?;
                Ok(LoadedModel::General { model, perspective })
            } else {
                Ok(LoadedModel::Simplicial { model: simplicial_from_file(f)?, perspective })
            }
        }
    }
}

fn relational_from_file(f: RelationalFile) -> Result<RelationalModel, ModelError> {
    let index: HashMap<&str, usize> = f.worlds.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let n = f.worlds.len();
    let world = |w: &str| index.get(w).copied().ok_or_else(|| ModelError::Unknown { kind: "world", id: w.to_string() });
    let relation = |pairs: &[(String, String)]| -> Result<Relation, ModelError> {
        let mut r = Relation::empty(n);
        for (w, v) in pairs {
            r.insert(world(w)?, world(v)?);
        }
        Ok(r)
    };
    let declared: BTreeSet<&Agent> = f.agents.iter().collect();
    if declared.len() != f.agents.len() {
        return Err(ModelError::Shape("agent list has duplicates".into()));
    }
    for a in f.r.keys().chain(f.q.keys()) {
        if !declared.contains(a) {
            return Err(ModelError::Unknown { kind: "agent", id: a.to_string() });
        }
    }
    let mut relations = BTreeMap::new();
    for a in &f.agents {
        let r = relation(f.r.get(a).map_or(&[][..], Vec::as_slice))?;
        let q = relation(f.q.get(a).map_or(&[][..], Vec::as_slice))?;
        relations.insert(a.clone(), (r, q));
    }
    let mut val = BTreeMap::new();
    for (p, ws) in &f.val {
        let mut set = PointSet::with_capacity(n);
        for w in ws {
            set.insert(world(w)?);
        }
        val.insert(p.clone(), set);
    }
    RelationalModel::new(f.worlds, relations, val)
}

fn simplicial_from_file(f: SimplicialFile) -> Result<SimplicialModel, ModelError> {
    let facets: Vec<BTreeSet<String>> = f.facets.iter().map(|x| x.iter().cloned().collect()).collect();
    let mut belief = BTreeMap::new();
    for (a, refs) in f.belief {
        let mut faces = Vec::new();
        for r in refs {
            faces.push(match r {
                FaceRef::Index(i) => facets
                    .get(i)
                    .cloned()
                    .ok_or_else(|| ModelError::Unknown { kind: "facet", id: i.to_string() })?,
                FaceRef::Nodes(ids) => ids.into_iter().collect(),
            });
        }
        belief.insert(a, faces);
    }
    let val = f.val.into_iter().map(|(p, xs)| (p, xs.into_iter().collect())).collect();
    SimplicialModel::new(f.agents, f.nodes, facets, belief, val)
}

pub fn relational_to_file(m: &RelationalModel) -> ModelFile {
    let name = |w: usize| m.world_name(w).to_string();
    let pairs = |r: &Relation| r.pairs().map(|(w, v)| (name(w), name(v))).collect::<Vec<_>>();
    ModelFile::Relational(RelationalFile {
        agents: m.agents().to_vec(),
        worlds: m.worlds().to_vec(),
        r: m.agents().iter().enumerate().map(|(i, a)| (a.clone(), pairs(m.knowledge(i)))).collect(),
        q: m.agents().iter().enumerate().map(|(i, a)| (a.clone(), pairs(m.belief(i)))).collect(),
        val: m.valuation_map().iter().map(|(p, s)| (p.clone(), s.ones().map(name).collect())).collect(),
    })
}

/// Belief facets that coincide with a knowledge facet are written as
/// indices, others as node lists.
pub fn simplicial_to_file(m: &SimplicialModel) -> ModelFile {
    let ids = |face: &BTreeSet<usize>| face.iter().map(|&n| m.nodes()[n].id.clone()).collect::<Vec<_>>();
    let lookup: HashMap<&BTreeSet<usize>, usize> =
        m.knowledge().facets().iter().enumerate().map(|(i, x)| (x, i)).rev().collect();
    let belief = m
        .agents()
        .iter()
        .enumerate()
        .map(|(a, agent)| {
            let refs = m
                .belief(a)
                .facets()
                .iter()
                .map(|y| match lookup.get(y) {
                    Some(&i) => FaceRef::Index(i),
                    None => FaceRef::Nodes(ids(y)),
                })
                .collect();
            (agent.clone(), refs)
        })
        .collect();
    ModelFile::Simplicial(SimplicialFile {
        agents: m.agents().to_vec(),
        nodes: m.nodes().to_vec(),
        facets: m.knowledge().facets().iter().map(ids).collect(),
        belief,
        val: m.valuation_map().iter().map(|(p, s)| (p.clone(), s.ones().collect())).collect(),
        perspective_map: None,
        allow_non_ucf: false,
    })
}

pub fn general_to_file(m: &GeneralColoredModel, perspective: Option<PerspectiveMap>) -> ModelFile {
    ModelFile::Simplicial(SimplicialFile {
        agents: m.agents().to_vec(),
        nodes: m.nodes().to_vec(),
        facets: (0..m.facet_count())
            .map(|i| m.facet_nodes(i).iter().map(|&n| m.nodes()[n].id.clone()).collect())
            .collect(),
        belief: BTreeMap::new(),
        val: m.valuation_map().iter().map(|(p, s)| (p.clone(), s.ones().collect())).collect(),
        perspective_map: perspective,
        allow_non_ucf: true,
    })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("model files always serialize")
}

/// SHA-256 of the compact JSON encoding, as lowercase hex.
pub fn digest_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("value serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Sidecar for a translation: the world-to-facet table and the meaning of
/// every node.
pub fn translation_sidecar(w: &TranslationWitness) -> serde_json::Value {
    let f: BTreeMap<&str, String> = w
        .world_names
        .iter()
        .zip(&w.world_to_facet)
        .map(|(name, &i)| (name.as_str(), SimplicialModel::facet_label(i)))
        .collect();
    serde_json::json!({
        "world_to_facet": f,
        "nodes": w.node_semantics,
    })
}

/// Sidecar for a properization. `rho` maps each product world to its
/// first coordinate, by name, so it can be fed back into the
/// bounded-morphism check.
pub fn properize_sidecar(w: &ProperizeWitness, product: &RelationalModel, source: &RelationalModel) -> serde_json::Value {
    let rho: BTreeMap<&str, &str> = w
        .projection
        .iter()
        .enumerate()
        .map(|(i, &t)| (product.world_name(i), source.world_name(t)))
        .collect();
    serde_json::json!({
        "distinguished": w.distinguished,
        "modulus": w.modulus,
        "g": w.g,
        "rho": rho,
    })
}

/// Reads a world map (`{"source world": "target world"}`, or an object
/// with such a map under `rho`) into indices.
pub fn read_world_map(
    value: &serde_json::Value,
    source: &RelationalModel,
    target: &RelationalModel,
) -> Result<Vec<Option<usize>>, ModelError> {
    let map = value.get("rho").unwrap_or(value);
    let map: BTreeMap<String, String> = serde_json::from_value(map.clone())
        .map_err(|e| ModelError::Shape(format!("world map is not a string-to-string object: {e}")))?;
    let mut out = vec![None; source.world_count()];
    for (s, t) in &map {
        let si = source.world(s).map_err(|_| ModelError::Unknown { kind: "world", id: s.clone() })?;
        let ti = target.world(t).map_err(|_| ModelError::Unknown { kind: "world", id: t.clone() })?;
        out[si] = Some(ti);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fb, fig1, multiplicity, perspective_shift};
    use crate::relational::validate_relational;

    #[test]
    fn relational_round_trip() {
        let m = fig1();
        let text = to_pretty_json(&relational_to_file(&m));
        let LoadedModel::Relational(back) = parse_model(&text).unwrap() else { panic!() };
        assert_eq!(relational_to_file(&back), relational_to_file(&m));
        assert!(validate_relational(&back).ok);
    }

    #[test]
    fn simplicial_round_trip_and_digest() {
        let m = fb();
        let file = simplicial_to_file(&m);
        let text = to_pretty_json(&file);
        assert!(text.contains("\"kind\": \"simplicial\""));
        let LoadedModel::Simplicial { model, perspective } = parse_model(&text).unwrap() else { panic!() };
        assert!(perspective.is_none());
        assert_eq!(model.digest(), m.digest());
        assert_eq!(m.digest().len(), 64);
        assert_ne!(m.digest(), perspective_shift().0.digest());
    }

    #[test]
    fn general_round_trip() {
        let m = multiplicity();
        let text = to_pretty_json(&general_to_file(&m, None));
        let LoadedModel::General { model, .. } = parse_model(&text).unwrap() else { panic!() };
        assert_eq!(model.facet_count(), 3);
        assert_eq!(model.multiplicity(2, 0), 3);
    }

    #[test]
    fn belief_by_node_list() {
        let text = r#"{"kind":"simplicial","agents":["a"],"nodes":[{"id":"a0","color":"a"}],
            "facets":[["a0"]],"belief":{"a":[["a0"]]},"val":{"p":[0]}}"#;
        let LoadedModel::Simplicial { model, .. } = parse_model(text).unwrap() else { panic!() };
        assert_eq!(model.belief_facets(0).unwrap().count_ones(..), 1);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_model("{"), Err(LoadError::Json(_))));
        assert!(matches!(parse_model(r#"{"kind":"cubical"}"#), Err(LoadError::Json(_))));
        let unknown_world = r#"{"kind":"relational","agents":["a"],"worlds":["w"],"R":{"a":[["w","v"]]},"Q":{}}"#;
        assert!(matches!(parse_model(unknown_world), Err(LoadError::Model(ModelError::Unknown { .. }))));
        let stray = r#"{"kind":"relational","agents":["a"],"worlds":["w"],"R":{},"Q":{},"extra":1}"#;
        assert!(matches!(parse_model(stray), Err(LoadError::Json(_))));
    }

    #[test]
    fn world_map_round_trip() {
        let m = fig1();
        let (p, w) = crate::transform::properize(&m, None).unwrap();
        let side = properize_sidecar(&w, &p, &m);
        let map = read_world_map(&side, &p, &m).unwrap();
        assert_eq!(map, w.projection.iter().map(|&i| Some(i)).collect::<Vec<_>>());
    }
}
