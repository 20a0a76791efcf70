use std::collections::HashSet;

use doxa::eval::Evaluator;
use doxa::harness::{agent_names, atom_names, enumerate_formulas, gen_relational, gen_simplicial, GenParams};
use doxa::logic::{modal_depth, Formula};
use doxa::relational::validate_relational;
use doxa::simplicial::validate_simplicial;

fn rel(seed: u64) -> GenParams {
    GenParams {
        seed,
        n_agents: 1 + (seed % 4) as usize,
        n_atoms: 1 + (seed % 3) as usize,
        n_worlds: 1 + (seed % 9) as usize,
        ..GenParams::default()
    }
}

#[test]
fn ten_thousand_relational_models_validate() {
    for seed in 0..10_000 {
        let m = gen_relational(&rel(seed));
        let report = validate_relational(&m);
        assert!(report.ok, "seed {seed}: {report}");
        // Q_a is the same set on every world of an R_a-class.
        for a in 0..m.agents().len() {
            for (w, v) in m.knowledge(a).pairs() {
                assert_eq!(m.belief(a).successors(w), m.belief(a).successors(v), "seed {seed}");
            }
            assert!(m.belief(a).is_subset(m.knowledge(a)));
        }
    }
}

#[test]
fn generators_are_deterministic() {
    for seed in [0, 7, u64::MAX] {
        assert_eq!(gen_relational(&rel(seed)).digest(), gen_relational(&rel(seed)).digest());
        let p = GenParams { seed, n_agents: 3, nodes_per_agent: 3, n_facets: 10, ..GenParams::default() };
        assert_eq!(gen_simplicial(&p).0.digest(), gen_simplicial(&p).0.digest());
    }
}

#[test]
fn single_world_is_reflexive_with_q_equal_r() {
    let m = gen_relational(&GenParams { n_worlds: 1, n_agents: 3, ..GenParams::default() });
    for a in 0..3 {
        assert!(m.knowledge(a).contains(0, 0));
        assert_eq!(m.knowledge(a), m.belief(a));
    }
}

#[test]
fn serial_simplicial_models_are_serial() {
    for seed in 0..2_000 {
        let p = GenParams {
            seed,
            n_agents: 1 + (seed % 3) as usize,
            nodes_per_agent: 1 + (seed % 4) as usize,
            n_facets: 1 + (seed % 12) as usize,
            serial: true,
            ..GenParams::default()
        };
        let (m, _) = gen_simplicial(&p);
        let report = validate_simplicial(&m);
        assert!(report.ok, "seed {seed}: {report}");
        for a in m.agents() {
            assert_eq!(report.flag_value(&format!("{a}-serial")), Some(true), "seed {seed}");
        }
    }
}

#[test]
fn unconstrained_simplicial_models_can_believe_falsum() {
    let hit = (0..500u64).find(|&seed| {
        let p = GenParams { seed, n_agents: 2, nodes_per_agent: 2, n_facets: 3, serial: false, ..GenParams::default() };
        let (m, _) = gen_simplicial(&p);
        let mut ev = Evaluator::new(&m);
        m.agents().iter().any(|a| !ev.truth_set(&Formula::believes(a.clone(), Formula::Falsum)).unwrap().is_clear())
    });
    assert!(hit.is_some());
}

#[test]
fn oversized_facet_request_is_truncated() {
    let p = GenParams { n_agents: 2, nodes_per_agent: 2, n_facets: 9, ..GenParams::default() };
    let (m, t) = gen_simplicial(&p);
    let t = t.unwrap();
    assert_eq!((t.requested, t.available), (9, 4));
    assert_eq!(m.facet_count(), 4);
}

/// Layer sizes of the enumeration grammar, counted directly: level 0 has
/// `m + m²` formulas over `m = atoms + 1` bases, and each later level adds
/// a boxed copy and its negation of everything new at the previous one.
fn expected_count(agents: usize, atoms: usize, depth: usize) -> usize {
    let m = atoms + 1;
    let mut prev = 0;
    let mut cur = m + m * m;
    for _ in 0..depth {
        let fresh = cur - prev;
        prev = cur;
        cur += 2 * (2 * agents * fresh);
    }
    cur
}

#[test]
fn enumeration_sizes_match_direct_count() {
    for agents in 1..=3 {
        for atoms in 1..=2 {
            for depth in 0..=2 {
                let fs = enumerate_formulas(&agent_names(agents), &atom_names(atoms), depth, 1_000_000).unwrap();
                assert_eq!(fs.len(), expected_count(agents, atoms, depth), "{agents} {atoms} {depth}");
                let distinct: HashSet<&Formula> = fs.iter().collect();
                assert_eq!(distinct.len(), fs.len());
                assert!(fs.iter().all(|f| modal_depth(f) <= depth));
            }
        }
    }
    assert_eq!(expected_count(3, 2, 2), 1884);
    assert_eq!(expected_count(3, 1, 2), 942);
}

#[test]
fn enumeration_respects_cap() {
    assert!(enumerate_formulas(&agent_names(3), &atom_names(2), 3, 10_000).is_err());
}
