//! Seeded model generators, formula enumeration, axiom-schema checks and
//! cross-evaluator agreement checks.
//!
//! All randomness comes from `Pcg32` (a 64-bit-state linear congruential
//! generator with a permuted output) seeded with `seed_from_u64`, so a
//! [`GenParams`] value fully determines the model it produces.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg32;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{full_set, truth_set_with, EvalError, Evaluator, PointSet, Semantics};
use crate::logic::{Agent, Atom, Formula};
use crate::relational::{check_bounded_morphism, is_proper, Relation, RelationalModel};
use crate::report::ValidationReport;
use crate::simplicial::{ColoredNode, SimplicialModel};
use crate::transform::{properize, to_simplicial, TransformError};

/// Upper bound on enumerated formulas unless a caller asks otherwise.
pub const DEFAULT_CAP: usize = 200_000;

/// Failures kept per schema report; the rest are only counted.
const MAX_RECORDED: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub n_agents: usize,
    pub n_atoms: usize,
    /// Relational models only.
    pub n_worlds: usize,
    /// Simplicial models only: candidate nodes per color.
    pub nodes_per_agent: usize,
    /// Simplicial models only: distinct facets requested.
    pub n_facets: usize,
    /// Simplicial models only: make every agent serial.
    pub serial: bool,
    /// Relational models only: resample until proper.
    pub proper: bool,
    /// Simplicial models only: give every agent the same belief complex.
    pub tie_beliefs: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            n_agents: 2,
            n_atoms: 1,
            n_worlds: 3,
            nodes_per_agent: 2,
            n_facets: 3,
            serial: true,
            proper: false,
            tie_beliefs: false,
        }
    }
}

/// `a`, `b`, ..., `z`, then `a26`, `a27`, ...
pub fn agent_names(n: usize) -> Vec<Agent> {
    (0..n)
        .map(|i| if i < 26 { char::from(b'a' + i as u8).to_string() } else { format!("a{i}") })
        .map(Agent::from)
        .collect()
}

/// `p` through `y`, then `p10`, `p11`, ...
pub fn atom_names(n: usize) -> Vec<Atom> {
    (0..n)
        .map(|i| if i < 10 { char::from(b'p' + i as u8).to_string() } else { format!("p{i}") })
        .map(Atom::from)
        .collect()
}

/// Uniform random surjection of `0..n` onto `k` blocks, `k` uniform in
/// `1..=n`. Blocks come back sorted by least element.
fn random_partition(rng: &mut Pcg32, n: usize) -> Vec<Vec<usize>> {
    let k = rng.random_range(1..=n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut block = vec![0; n];
    for (i, &w) in order.iter().enumerate() {
        block[w] = if i < k { i } else { rng.random_range(0..k) };
    }
    let mut blocks = vec![Vec::new(); k];
    for w in 0..n {
        blocks[block[w]].push(w);
    }
    blocks.sort();
    blocks
}

/// Uniform non-empty subset of `items`, by rejection.
fn nonempty_subset(rng: &mut Pcg32, items: &[usize]) -> Vec<usize> {
    loop {
        let pick: Vec<usize> = items.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if !pick.is_empty() {
            return pick;
        }
    }
}

fn partitions_separate(parts: &[Vec<Vec<usize>>], n: usize) -> bool {
    let mut profile = vec![Vec::with_capacity(parts.len()); n];
    for blocks in parts {
        for (b, block) in blocks.iter().enumerate() {
            for &w in block {
                profile[w].push(b);
            }
        }
    }
    let distinct: HashSet<&Vec<usize>> = profile.iter().collect();
    distinct.len() == n
}

/// A random model satisfying the knowledge/belief conditions.
///
/// Each `R_a` comes from [`random_partition`]; on each class `C`, `Q_a` is
/// `C × T` for a uniform non-empty `T ⊆ C`; each atom holds at each world
/// with probability 1/2. With `proper`, partitions are resampled until
/// they separate worlds, falling back to the identity partition for the
/// first agent after 1000 attempts.
pub fn gen_relational(p: &GenParams) -> RelationalModel {
    let mut rng = Pcg32::seed_from_u64(p.seed);
    let n = p.n_worlds.max(1);
    let agents = agent_names(p.n_agents.max(1));
    let mut attempts = 0;
    let parts = loop {
        let mut parts: Vec<Vec<Vec<usize>>> = agents.iter().map(|_| random_partition(&mut rng, n)).collect();
        if !p.proper || partitions_separate(&parts, n) {
            break parts;
        }
        attempts += 1;
        if attempts == 1000 {
            parts[0] = (0..n).map(|w| vec![w]).collect();
            break parts;
        }
    };
    let mut relations = BTreeMap::new();
    for (a, blocks) in agents.iter().zip(&parts) {
        let r = Relation::from_partition(n, blocks);
        let mut q = Relation::empty(n);
        for block in blocks {
            let targets = nonempty_subset(&mut rng, block);
            for &w in block {
                for &t in &targets {
                    q.insert(w, t);
                }
            }
        }
        relations.insert(a.clone(), (r, q));
    }
    let valuation = atom_names(p.n_atoms)
        .into_iter()
        .map(|atom| {
            let mut set = PointSet::with_capacity(n);
            set.extend((0..n).filter(|_| rng.random_bool(0.5)));
            (atom, set)
        })
        .collect();
    let worlds = (0..n).map(|i| format!("w{i}")).collect();
    RelationalModel::new(worlds, relations, valuation).expect("generated model is well formed")
}

/// More facets were requested than there are distinct colorings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub requested: usize,
    pub available: usize,
}

/// A random UCF model. Facets pick one node per color uniformly and are
/// deduplicated; unused nodes are dropped. With `serial`, each belief
/// complex first receives, for every node of its color, one random facet
/// through that node; every other facet is then added with probability
/// 1/2. An empty belief complex receives one random facet.
pub fn gen_simplicial(p: &GenParams) -> (SimplicialModel, Option<Truncation>) {
    let mut rng = Pcg32::seed_from_u64(p.seed);
    let agents = agent_names(p.n_agents.max(1));
    let k = agents.len();
    let per = p.nodes_per_agent.max(1);
    let available = u32::try_from(k).ok().and_then(|k| per.checked_pow(k)).unwrap_or(usize::MAX);
    let requested = p.n_facets.max(1);
    let target = requested.min(available);
    let truncated = (requested > available).then_some(Truncation { requested, available });
    let mut seen = HashSet::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    while rows.len() < target {
        let row: Vec<usize> = (0..k).map(|_| rng.random_range(0..per)).collect();
        if seen.insert(row.clone()) {
            rows.push(row);
        }
    }
    let used: BTreeSet<(usize, usize)> = rows.iter().flat_map(|r| r.iter().copied().enumerate()).collect();
    let name = |a: usize, i: usize| format!("{}{i}", agents[a]);
    let nodes: Vec<ColoredNode> =
        used.iter().map(|&(a, i)| ColoredNode { id: name(a, i), color: agents[a].clone() }).collect();
    let facet_ids: Vec<BTreeSet<String>> =
        rows.iter().map(|r| r.iter().enumerate().map(|(a, &i)| name(a, i)).collect()).collect();

    let mut sample_belief = |colors: &[usize]| -> BTreeSet<usize> {
        let mut chosen = BTreeSet::new();
        if p.serial {
            for &(a, i) in used.iter().filter(|(a, _)| colors.contains(a)) {
                let through: Vec<usize> = (0..rows.len()).filter(|&x| rows[x][a] == i).collect();
                chosen.insert(through[rng.random_range(0..through.len())]);
            }
        }
        for x in 0..rows.len() {
            if rng.random_bool(0.5) {
                chosen.insert(x);
            }
        }
        if chosen.is_empty() {
            chosen.insert(rng.random_range(0..rows.len()));
        }
        chosen
    };
    let to_faces = |xs: &BTreeSet<usize>| xs.iter().map(|&x| facet_ids[x].clone()).collect::<Vec<_>>();
    let mut belief = BTreeMap::new();
    if p.tie_beliefs {
        let all: Vec<usize> = (0..k).collect();
        let shared = to_faces(&sample_belief(&all));
        for a in &agents {
            belief.insert(a.clone(), shared.clone());
        }
    } else {
        for (ai, a) in agents.iter().enumerate() {
            belief.insert(a.clone(), to_faces(&sample_belief(&[ai])));
        }
    }
    let valuation = atom_names(p.n_atoms)
        .into_iter()
        .map(|atom| (atom, (0..rows.len()).filter(|_| rng.random_bool(0.5)).collect()))
        .collect();
    let m = SimplicialModel::new(agents, nodes, facet_ids, belief, valuation).expect("generated model is well formed");
    (m, truncated)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("formula enumeration exceeds the cap of {0} formulas")]
    TooMany(usize),
}

/// All formulas of the layered grammar below, deduplicated, in a fixed
/// order:
///
/// * level 0: atoms, `⊥`, and `x → y` for `x, y` among those;
/// * level `d+1`: level `d`, then `K_a φ` and `B_a φ` for `φ` at level
///   `d` (the new modal formulas `N`), then `¬n` for `n ∈ N`.
pub fn enumerate_formulas(
    agents: &[Agent],
    atoms: &[Atom],
    depth: usize,
    cap: usize,
) -> Result<Vec<Formula>, EnumerationError> {
    let mut out: Vec<Formula> = Vec::new();
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut push = |f: Formula, out: &mut Vec<Formula>| -> Result<(), EnumerationError> {
        if seen.insert(f.clone()) {
            out.push(f);
            if out.len() > cap {
                return Err(EnumerationError::TooMany(cap));
            }
        }
        Ok(())
    };
    let base: Vec<Formula> = atoms.iter().map(|p| Formula::Atom(p.clone())).chain([Formula::Falsum]).collect();
    for b in &base {
        push(b.clone(), &mut out)?;
    }
    for x in &base {
        for y in &base {
            push(Formula::implies(x.clone(), y.clone()), &mut out)?;
        }
    }
    for _ in 0..depth {
        let before = out.len();
        let current = out.clone();
        for phi in &current {
            for a in agents {
                push(Formula::knows(a.clone(), phi.clone()), &mut out)?;
                push(Formula::believes(a.clone(), phi.clone()), &mut out)?;
            }
        }
        let fresh: Vec<Formula> = out[before..].to_vec();
        for n in fresh {
            push(Formula::not(n), &mut out)?;
        }
    }
    Ok(out)
}

/// A random formula of modal depth exactly `depth`.
pub fn random_formula(rng: &mut Pcg32, agents: &[Agent], atoms: &[Atom], depth: usize) -> Formula {
    random_exact(rng, agents, atoms, depth, 3)
}

fn random_leaf(rng: &mut Pcg32, atoms: &[Atom]) -> Formula {
    let i = rng.random_range(0..=atoms.len());
    atoms.get(i).map_or(Formula::Falsum, |p| Formula::Atom(p.clone()))
}

fn random_exact(rng: &mut Pcg32, agents: &[Agent], atoms: &[Atom], depth: usize, budget: usize) -> Formula {
    if depth == 0 {
        return if budget > 0 && rng.random_bool(0.5) {
            Formula::implies(random_leaf(rng, atoms), random_leaf(rng, atoms))
        } else {
            random_leaf(rng, atoms)
        };
    }
    let choice = if budget == 0 { 0 } else { rng.random_range(0..4) };
    match choice {
        0 | 1 => {
            let a = agents[rng.random_range(0..agents.len())].clone();
            let body = random_exact(rng, agents, atoms, depth - 1, budget);
            if rng.random_bool(0.5) {
                Formula::knows(a, body)
            } else {
                Formula::believes(a, body)
            }
        }
        2 => {
            let deep = random_exact(rng, agents, atoms, depth, budget - 1);
            let other_depth = rng.random_range(0..=depth);
            let other = random_exact(rng, agents, atoms, other_depth, budget - 1);
            if rng.random_bool(0.5) {
                Formula::implies(deep, other)
            } else {
                Formula::implies(other, deep)
            }
        }
        _ => Formula::not(random_exact(rng, agents, atoms, depth, budget - 1)),
    }
}

/// `count` seeded random formulas of modal depth exactly `depth`.
pub fn sample_formulas(agents: &[Agent], atoms: &[Atom], depth: usize, count: usize, seed: u64) -> Vec<Formula> {
    let mut rng = Pcg32::seed_from_u64(seed);
    (0..count).map(|_| random_formula(&mut rng, agents, atoms, depth)).collect()
}

/// Named axiom schemas. `φ`, `ψ` range over fill formulas and `a`, `b`
/// over agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    /// `K_a(φ → ψ) → (K_a φ → K_a ψ)`
    KDist,
    /// `K_a φ → φ`
    T,
    /// `K_a φ → K_a K_a φ`
    K4,
    /// `¬K_a φ → K_a ¬K_a φ`
    K5,
    /// `B_a(φ → ψ) → (B_a φ → B_a ψ)`
    BDist,
    /// `B_a φ → ¬B_a ¬φ`
    D,
    /// `B_a φ → B_a B_a φ`
    B4,
    /// `¬B_a φ → B_a ¬B_a φ`
    B5,
    /// `K_a φ → B_a φ`
    KB,
    /// `B_a φ → K_a B_a φ`
    Spi,
    /// `¬B_a φ → K_a ¬B_a φ`
    Sni,
    /// `B_a φ → φ`, which is not expected to hold.
    BT,
    /// `B_a(B_b φ → φ)` for distinct `a`, `b`.
    Prop1,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown schema `{0}` (known: K-dist, T, 4K, 5K, B-dist, D, 4B, 5B, KB, SPI, SNI, BT, PROP1, and groups FULL, S5, KD45)")]
pub struct UnknownSchema(pub String);

impl Schema {
    pub const ALL: [Schema; 13] = [
        Schema::KDist,
        Schema::T,
        Schema::K4,
        Schema::K5,
        Schema::BDist,
        Schema::D,
        Schema::B4,
        Schema::B5,
        Schema::KB,
        Schema::Spi,
        Schema::Sni,
        Schema::BT,
        Schema::Prop1,
    ];

    /// S5 for knowledge, KD45 for belief, and the three bridge axioms.
    pub const FULL: [Schema; 11] = [
        Schema::KDist,
        Schema::T,
        Schema::K4,
        Schema::K5,
        Schema::BDist,
        Schema::D,
        Schema::B4,
        Schema::B5,
        Schema::KB,
        Schema::Spi,
        Schema::Sni,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::KDist => "K-dist",
            Schema::T => "T",
            Schema::K4 => "4K",
            Schema::K5 => "5K",
            Schema::BDist => "B-dist",
            Schema::D => "D",
            Schema::B4 => "4B",
            Schema::B5 => "5B",
            Schema::KB => "KB",
            Schema::Spi => "SPI",
            Schema::Sni => "SNI",
            Schema::BT => "BT",
            Schema::Prop1 => "PROP1",
        }
    }

    /// Number of formula placeholders.
    pub fn arity(self) -> usize {
        match self {
            Schema::KDist | Schema::BDist => 2,
            _ => 1,
        }
    }

    /// Agent tuples the schema is instantiated with.
    pub fn agent_tuples(self, agents: &[Agent]) -> Vec<Vec<Agent>> {
        match self {
            Schema::Prop1 => agents
                .iter()
                .flat_map(|a| agents.iter().filter(move |b| *b != a).map(move |b| vec![a.clone(), b.clone()]))
                .collect(),
            _ => agents.iter().map(|a| vec![a.clone()]).collect(),
        }
    }

    /// Schema body with placeholder atoms (see [`placeholder`]).
    pub fn template(self, agents: &[Agent]) -> Formula {
        let a = agents[0].clone();
        let phi = Formula::Atom(placeholder(0));
        let psi = Formula::Atom(placeholder(1));
        let k = |f: Formula| Formula::knows(a.clone(), f);
        let b = |f: Formula| Formula::believes(a.clone(), f);
        match self {
            Schema::KDist => Formula::implies(
                k(Formula::implies(phi.clone(), psi.clone())),
                Formula::implies(k(phi), k(psi)),
            ),
            Schema::T => Formula::implies(k(phi.clone()), phi),
            Schema::K4 => Formula::implies(k(phi.clone()), k(k(phi))),
            Schema::K5 => Formula::implies(Formula::not(k(phi.clone())), k(Formula::not(k(phi)))),
            Schema::BDist => Formula::implies(
                b(Formula::implies(phi.clone(), psi.clone())),
                Formula::implies(b(phi), b(psi)),
            ),
            Schema::D => Formula::implies(b(phi.clone()), Formula::not(b(Formula::not(phi)))),
            Schema::B4 => Formula::implies(b(phi.clone()), b(b(phi))),
            Schema::B5 => Formula::implies(Formula::not(b(phi.clone())), b(Formula::not(b(phi)))),
            Schema::KB => Formula::implies(k(phi.clone()), b(phi)),
            Schema::Spi => Formula::implies(b(phi.clone()), k(b(phi))),
            Schema::Sni => Formula::implies(Formula::not(b(phi.clone())), k(Formula::not(b(phi)))),
            Schema::BT => Formula::implies(b(phi.clone()), phi),
            Schema::Prop1 => {
                let other = agents[1].clone();
                b(Formula::implies(Formula::believes(other, phi.clone()), phi))
            }
        }
    }

    /// The instance for the given agents and fill formulas.
    pub fn instantiate(self, agents: &[Agent], fills: &[&Formula]) -> Formula {
        self.template(agents).substitute(&|p: &Atom| {
            (0..fills.len()).find(|&i| *p == placeholder(i)).map(|i| fills[i].clone())
        })
    }

    /// Parses a comma-separated list of schema and group names,
    /// case-insensitively, dropping repeats.
    pub fn parse_list(text: &str) -> Result<Vec<Schema>, UnknownSchema> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let group: Vec<Schema> = match part.to_ascii_uppercase().as_str() {
                "FULL" => Schema::FULL.to_vec(),
                "S5" => Schema::FULL[..4].to_vec(),
                "KD45" => Schema::FULL[4..8].to_vec(),
                _ => vec![part.parse()?],
            };
            for s in group {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        Ok(out)
    }
}

/// Atom standing for the `i`-th fill formula. Not a valid identifier, so
/// it cannot clash with a model's own atoms.
pub fn placeholder(i: usize) -> Atom {
    Atom::new(format!("${i}"))
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Schema {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = UnknownSchema;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownSchema(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemaFailure {
    /// The failing instance, rendered.
    pub formula: String,
    /// Digest of the model it fails in.
    pub model: String,
    /// First point (world or facet) where it fails.
    pub point: String,
    /// Generator seed of the model, when it came from one.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemaReport {
    pub schema: String,
    pub instances: u64,
    pub failed: u64,
    /// At most a handful of witnesses; `failed` counts them all.
    pub failures: Vec<SchemaFailure>,
}

impl SchemaReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Fill formulas grouped by truth set: the truth set and the indices of
/// the fills that have it, in order of first appearance.
fn extension_classes<S: Semantics + ?Sized>(
    m: &S,
    fill: &[Formula],
) -> Result<Vec<(PointSet, Vec<usize>)>, EvalError> {
    let mut ev = Evaluator::new(m);
    let mut index: HashMap<PointSet, usize> = HashMap::new();
    let mut classes: Vec<(PointSet, Vec<usize>)> = Vec::new();
    for (i, f) in fill.iter().enumerate() {
        let ext = ev.truth_set(f)?;
        match index.get(&ext) {
            Some(&c) => classes[c].1.push(i),
            None => {
                index.insert(ext.clone(), classes.len());
                classes.push((ext, vec![i]));
            }
        }
    }
    Ok(classes)
}

/// Checks every instance of `schema` over `fill` and every agent tuple.
///
/// A schema instance's truth depends on its fills only through their
/// truth sets, so fills are grouped by truth set and each group is
/// checked once with its truth set bound to the placeholder. Counts are
/// per instance; the recorded witness uses the group's first fill.
pub fn check_axiom_schema<S: Semantics + ?Sized>(
    m: &S,
    schema: Schema,
    fill: &[Formula],
) -> Result<SchemaReport, EvalError> {
    m.ready()?;
    for f in fill {
        for a in f.agents() {
            m.agent_index(&a)?;
        }
        if let Some(p) = f.atoms().into_iter().find(|p| m.valuation(p).is_none()) {
            return Err(EvalError::UnknownAtom(p));
        }
    }
    let classes = extension_classes(m, fill)?;
    let full = full_set(m.point_count());
    let mut report = SchemaReport { schema: schema.name().to_string(), instances: 0, failed: 0, failures: Vec::new() };
    let mut digest = None;
    for agents in schema.agent_tuples(m.agents()) {
        let template = schema.template(&agents);
        let combos: Vec<Vec<usize>> = match schema.arity() {
            1 => (0..classes.len()).map(|c| vec![c]).collect(),
            _ => (0..classes.len()).flat_map(|c| (0..classes.len()).map(move |d| vec![c, d])).collect(),
        };
        for combo in combos {
            let mut bindings = HashMap::new();
            let mut count = 1u64;
            for (slot, &c) in combo.iter().enumerate() {
                bindings.insert(placeholder(slot), classes[c].0.clone());
                count *= classes[c].1.len() as u64;
            }
            report.instances += count;
            let truth = truth_set_with(m, &template, &bindings)?;
            if truth == full {
                continue;
            }
            report.failed += count;
            if report.failures.len() < MAX_RECORDED {
                let fills: Vec<&Formula> = combo.iter().map(|&c| &fill[classes[c].1[0]]).collect();
                let point = (0..m.point_count()).find(|&x| !truth.contains(x)).expect("not full");
                report.failures.push(SchemaFailure {
                    formula: schema.instantiate(&agents, &fills).to_string(),
                    model: digest.get_or_insert_with(|| m.digest()).clone(),
                    point: m.point_label(point),
                    seed: None,
                });
            }
        }
    }
    Ok(report)
}

/// The same check, instance by instance, with no grouping. Quadratic in
/// `fill` for the distribution schemas; meant as a reference.
pub fn check_axiom_schema_naive<S: Semantics + ?Sized>(
    m: &S,
    schema: Schema,
    fill: &[Formula],
) -> Result<SchemaReport, EvalError> {
    let mut ev = Evaluator::new(m);
    let mut report = SchemaReport { schema: schema.name().to_string(), instances: 0, failed: 0, failures: Vec::new() };
    let tuples: Vec<Vec<usize>> = match schema.arity() {
        1 => (0..fill.len()).map(|i| vec![i]).collect(),
        _ => (0..fill.len()).flat_map(|i| (0..fill.len()).map(move |j| vec![i, j])).collect(),
    };
    for agents in schema.agent_tuples(m.agents()) {
        for t in &tuples {
            let fills: Vec<&Formula> = t.iter().map(|&i| &fill[i]).collect();
            let inst = schema.instantiate(&agents, &fills);
            report.instances += 1;
            if let Some(x) = ev.counterexample(&inst)? {
                report.failed += 1;
                if report.failures.len() < MAX_RECORDED {
                    report.failures.push(SchemaFailure {
                        formula: inst.to_string(),
                        model: m.digest(),
                        point: m.point_label(x),
                        seed: None,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Exhaustive formulas to `depth` plus `samples` random formulas of
/// modal depth `depth + 1`.
pub fn formula_battery(
    agents: &[Agent],
    atoms: &[Atom],
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<Formula>, EnumerationError> {
    let mut fs = enumerate_formulas(agents, atoms, depth, DEFAULT_CAP)?;
    fs.extend(sample_formulas(agents, atoms, depth + 1, samples, seed));
    Ok(fs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub formula: String,
    pub world: String,
    pub facet: String,
    pub relational: bool,
    pub simplicial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub formulas: usize,
    pub points: usize,
    pub mismatches: Vec<Mismatch>,
}

impl AgreementReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares truth in `m` at each world `w` with truth in `s` at facet
/// `world_to_facet[w]`, for every formula.
pub fn compare_translation(
    m: &RelationalModel,
    s: &SimplicialModel,
    world_to_facet: &[usize],
    formulas: &[Formula],
) -> Result<AgreementReport, EvalError> {
    let mut er = Evaluator::new(m);
    let mut es = Evaluator::new(s);
    let mut mismatches = Vec::new();
    for f in formulas {
        let tr = er.truth_set(f)?;
        let ts = es.truth_set(f)?;
        for (w, &x) in world_to_facet.iter().enumerate() {
            if tr.contains(w) != ts.contains(x) {
                mismatches.push(Mismatch {
                    formula: f.to_string(),
                    world: m.world_name(w).to_string(),
                    facet: SimplicialModel::facet_label(x),
                    relational: tr.contains(w),
                    simplicial: ts.contains(x),
                });
            }
        }
    }
    Ok(AgreementReport { formulas: formulas.len(), points: world_to_facet.len(), mismatches })
}

/// Translates a proper model and checks that the translation preserves
/// truth of every formula from [`formula_battery`].
pub fn oracle_agreement(
    m: &RelationalModel,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<AgreementReport, TransformError> {
    let (s, w) = to_simplicial(m)?;
    let atoms: Vec<Atom> = m.atoms().cloned().collect();
    let fs = formula_battery(m.agents(), &atoms, depth, samples, seed)
        .map_err(|e| TransformError::NotEvaluable(EvalError::IllFormed(e.to_string())))?;
    Ok(compare_translation(m, &s, &w.world_to_facet, &fs)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperizeCheck {
    pub worlds: usize,
    pub proper: bool,
    /// The first projection, checked as a bounded morphism onto the input.
    pub projection: ValidationReport,
}

impl ProperizeCheck {
    pub fn ok(&self) -> bool {
        self.proper && self.projection.ok
    }
}

pub fn check_properize(m: &RelationalModel, distinguished: Option<&Agent>) -> Result<ProperizeCheck, TransformError> {
    let (p, w) = properize(m, distinguished)?;
    let proper = is_proper(&p).unwrap_or(false);
    let projection = check_bounded_morphism(&p, m, &w.projection).expect("projection is total and in range");
    Ok(ProperizeCheck { worlds: p.world_count(), proper, projection })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Rel,
    Simp,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rel" | "relational" => Ok(Family::Rel),
            "simp" | "simplicial" => Ok(Family::Simp),
            _ => Err(format!("unknown model family `{s}` (expected rel or simp)")),
        }
    }
}

/// A schema-validity fuzz run. Model sizes are drawn per trial, each
/// uniformly from 1 up to the stated maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub family: Family,
    pub schemas: Vec<Schema>,
    pub serial: bool,
    pub tie_beliefs: bool,
    /// Fill formulas are all formulas of [`enumerate_formulas`] to this depth.
    pub depth: usize,
    pub min_agents: usize,
    pub max_agents: usize,
    pub max_atoms: usize,
    pub max_worlds: usize,
    pub max_nodes: usize,
    pub max_facets: usize,
}

impl SuiteConfig {
    pub fn new(seed: u64, trials: usize, family: Family, schemas: Vec<Schema>) -> Self {
        let min_agents = if schemas.contains(&Schema::Prop1) { 2 } else { 1 };
        SuiteConfig {
            seed,
            trials,
            family,
            schemas,
            serial: true,
            tie_beliefs: false,
            depth: 2,
            min_agents,
            max_agents: 3,
            max_atoms: 2,
            max_worlds: 5,
            max_nodes: 3,
            max_facets: 6,
        }
    }

    /// Generator parameters of trial `trial`.
    pub fn trial_params(&self, trial: usize) -> GenParams {
        let mut rng = Pcg32::seed_from_u64(self.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let lo = self.min_agents.max(1);
        GenParams {
            seed: rng.random(),
            n_agents: rng.random_range(lo..=self.max_agents.max(lo)),
            n_atoms: rng.random_range(1..=self.max_atoms.max(1)),
            n_worlds: rng.random_range(1..=self.max_worlds.max(1)),
            nodes_per_agent: rng.random_range(1..=self.max_nodes.max(1)),
            n_facets: rng.random_range(1..=self.max_facets.max(1)),
            serial: self.serial,
            proper: false,
            tie_beliefs: self.tie_beliefs,
        }
    }
}

/// One line of the suite log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub params: GenParams,
    pub model: String,
    pub failed: u64,
    pub schemas: Vec<SchemaReport>,
}

/// Fill formulas keyed by (agent count, atom count).
pub type FillCache = HashMap<(usize, usize), Vec<Formula>>;

pub fn fill_cache(cfg: &SuiteConfig) -> Result<FillCache, EnumerationError> {
    let mut cache = FillCache::new();
    for t in 0..cfg.trials {
        let p = cfg.trial_params(t);
        let key = (p.n_agents, p.n_atoms);
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
            e.insert(enumerate_formulas(&agent_names(key.0), &atom_names(key.1), cfg.depth, DEFAULT_CAP)?);
        }
    }
    Ok(cache)
}

pub fn run_trial(cfg: &SuiteConfig, trial: usize, fills: &FillCache) -> TrialRecord {
    let params = cfg.trial_params(trial);
    let fill = &fills[&(params.n_agents, params.n_atoms)];
    let check = |m: &dyn Semantics| -> Vec<SchemaReport> {
        cfg.schemas
            .iter()
            .map(|&s| {
                let mut r = check_axiom_schema(m, s, fill).expect("generated models evaluate");
                for f in &mut r.failures {
                    f.seed = Some(params.seed);
                }
                r
            })
            .collect()
    };
    let (model, schemas) = match cfg.family {
        Family::Rel => {
            let m = gen_relational(&params);
            (m.digest(), check(&m))
        }
        Family::Simp => {
            let (m, _) = gen_simplicial(&params);
            (m.digest(), check(&m))
        }
    };
    let failed = schemas.iter().map(|r| r.failed).sum();
    TrialRecord { trial, params, model, failed, schemas }
}

/// Runs every trial, in parallel, and returns the records in trial order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TrialRecord>, EnumerationError> {
    let fills = fill_cache(cfg)?;
    Ok((0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t, &fills)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fb, fig1};
    use crate::logic::parse_formula;
    use crate::relational::validate_relational;
    use crate::simplicial::{is_serial, validate_simplicial};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn depth_zero_enumeration() {
        let fs = enumerate_formulas(&agent_names(1), &atom_names(1), 0, 100).unwrap();
        let shown: Vec<String> = fs.iter().map(|g| g.to_string()).collect();
        assert_eq!(shown, ["p", "false", "p -> p", "~p", "false -> p", "true"]);
    }

    #[test]
    fn depth_one_enumeration() {
        let fs = enumerate_formulas(&agent_names(1), &atom_names(1), 1, 1000).unwrap();
        assert!(fs.contains(&f("K[a] p")));
        assert!(fs.contains(&f("B[a] p")));
        assert!(fs.contains(&f("~B[a] (p -> false)")));
        let unique: HashSet<&Formula> = fs.iter().collect();
        assert_eq!(unique.len(), fs.len());
        assert_eq!(fs.len(), 6 + 12 + 12);
        assert!(fs.iter().all(|g| g.modal_depth() <= 1));
    }

    #[test]
    fn enumeration_sizes_and_cap() {
        let fs = enumerate_formulas(&agent_names(3), &atom_names(2), 2, DEFAULT_CAP).unwrap();
        assert_eq!(fs.len(), 1884);
        assert_eq!(
            enumerate_formulas(&agent_names(3), &atom_names(2), 2, 1000),
            Err(EnumerationError::TooMany(1000))
        );
    }

    #[test]
    fn random_formulas_have_exact_depth() {
        let fs = sample_formulas(&agent_names(2), &atom_names(2), 3, 200, 7);
        assert!(fs.iter().all(|g| g.modal_depth() == 3));
        assert_eq!(fs, sample_formulas(&agent_names(2), &atom_names(2), 3, 200, 7));
    }

    #[test]
    fn generators_are_deterministic_and_valid() {
        for seed in 0..200 {
            let p = GenParams { seed, n_worlds: 1 + (seed as usize % 6), n_agents: 1 + (seed as usize % 3), ..GenParams::default() };
            let m = gen_relational(&p);
            assert_eq!(m.digest(), gen_relational(&p).digest());
            let report = validate_relational(&m);
            assert!(report.ok, "{report}");
            for a in 0..m.agents().len() {
                assert!(m.belief(a).non_euclidean().is_none());
                assert!(m.belief(a).non_transitive().is_none());
            }
            let (s, _) = gen_simplicial(&GenParams { n_facets: 1 + (seed as usize % 7), ..p.clone() });
            assert!(validate_simplicial(&s).ok);
            assert_eq!(is_serial(&s), Some(true));
        }
    }

    #[test]
    fn single_world_generation() {
        let m = gen_relational(&GenParams { n_worlds: 1, n_agents: 3, ..GenParams::default() });
        for a in 0..3 {
            assert_eq!(*m.knowledge(a), Relation::identity(1));
            assert_eq!(m.belief(a), m.knowledge(a));
        }
    }

    #[test]
    fn proper_generation() {
        for seed in 0..100 {
            let m = gen_relational(&GenParams { seed, n_worlds: 5, proper: true, ..GenParams::default() });
            assert_eq!(is_proper(&m), Ok(true));
        }
    }

    #[test]
    fn truncation_is_reported() {
        let (m, t) = gen_simplicial(&GenParams { nodes_per_agent: 2, n_agents: 2, n_facets: 9, ..GenParams::default() });
        assert_eq!(t, Some(Truncation { requested: 9, available: 4 }));
        assert_eq!(m.facet_count(), 4);
    }

    #[test]
    fn schema_names() {
        assert_eq!("k-DIST".parse::<Schema>(), Ok(Schema::KDist));
        assert_eq!(Schema::parse_list("FULL").unwrap().len(), 11);
        assert_eq!(Schema::parse_list("d, kd45").unwrap(), vec![Schema::D, Schema::BDist, Schema::B4, Schema::B5]);
        assert!(Schema::parse_list("FULL,Q").is_err());
        assert_eq!(
            Schema::Prop1.instantiate(&["a".into(), "b".into()], &[&f("p")]),
            f("B[a] (B[b] p -> p)")
        );
        assert_eq!(Schema::KDist.instantiate(&["a".into()], &[&f("p"), &f("q")]), f("K[a](p -> q) -> K[a] p -> K[a] q"));
    }

    #[test]
    fn belief_not_factive_in_fb() {
        let m = fb();
        let r = check_axiom_schema(&m, Schema::BT, &[f("p")]).unwrap();
        // B[b] p -> p fails there too, vacuously.
        assert_eq!(r.failed, 2);
        assert_eq!(r.failures[0].point, "X1");
        assert_eq!(r.failures[0].formula, "B[a] p -> p");
        assert_eq!(r.failures[0].model, m.digest());
    }

    #[test]
    fn grouped_and_naive_checks_agree() {
        let fill = enumerate_formulas(&agent_names(2), &atom_names(1), 1, 1000).unwrap();
        for seed in 0..15 {
            let p = GenParams { seed, serial: seed % 2 == 0, n_facets: 4, ..GenParams::default() };
            let (s, _) = gen_simplicial(&p);
            let r = gen_relational(&p);
            for schema in Schema::ALL {
                let fast = check_axiom_schema(&s, schema, &fill).unwrap();
                let slow = check_axiom_schema_naive(&s, schema, &fill).unwrap();
                assert_eq!((fast.instances, fast.failed), (slow.instances, slow.failed), "{schema} seed {seed}");
                let fast = check_axiom_schema(&r, schema, &fill).unwrap();
                let slow = check_axiom_schema_naive(&r, schema, &fill).unwrap();
                assert_eq!((fast.instances, fast.failed), (slow.instances, slow.failed), "{schema} seed {seed}");
            }
        }
    }

    #[test]
    fn properized_fig1_agrees_with_translation() {
        let (p, _) = properize(&fig1(), None).unwrap();
        let r = oracle_agreement(&p, 2, 50, 1).unwrap();
        assert!(r.ok(), "{:?}", r.mismatches.first());
        assert_eq!(r.formulas, 942 + 50);
        assert!(matches!(oracle_agreement(&fig1(), 1, 0, 0), Err(TransformError::Improper(..))));
    }

    #[test]
    fn corrupted_translation_is_caught() {
        let (p, _) = properize(&fig1(), None).unwrap();
        let (s, w) = to_simplicial(&p).unwrap();
        let mut file = match crate::io::simplicial_to_file(&s) {
            crate::io::ModelFile::Simplicial(f) => f,
            _ => unreachable!(),
        };
        file.belief.get_mut(&Agent::from("b")).unwrap().remove(0);
        let corrupted = match crate::io::model_from_file(crate::io::ModelFile::Simplicial(file)).unwrap() {
            crate::io::LoadedModel::Simplicial { model, .. } => model,
            _ => unreachable!(),
        };
        let fs = formula_battery(p.agents(), &atom_names(1), 1, 0, 0).unwrap();
        let r = compare_translation(&p, &corrupted, &w.world_to_facet, &fs).unwrap();
        assert!(!r.ok());
        assert!(r.mismatches[0].formula.contains("B[b]"));
    }

    #[test]
    fn suite_is_deterministic() {
        let mut cfg = SuiteConfig::new(11, 12, Family::Simp, Schema::FULL.to_vec());
        cfg.depth = 1;
        let a = run_suite(&cfg).unwrap();
        assert_eq!(a, run_suite(&cfg).unwrap());
        assert!(a.iter().all(|t| t.failed == 0));
        let fills = fill_cache(&cfg).unwrap();
        assert_eq!(run_trial(&cfg, 5, &fills), a[5]);
        cfg.trials = 0;
        assert!(run_suite(&cfg).unwrap().is_empty());
    }
}
