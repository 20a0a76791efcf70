//! Acceptance gate. Runs each criterion at its stated scale, prints one
//! PASS/FAIL line per criterion, and exits non-zero if any fails or runs
//! over its time budget.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg32;
use rayon::prelude::*;

use doxa::altsem::{GeneralColoredModel, Kasc, PerspectiveMap, SimpBel, Variant};
use doxa::eval::{Evaluator, Semantics};
use doxa::harness::{
    agent_names, atom_names, check_axiom_schema, check_properize, compare_translation, enumerate_formulas,
    gen_relational, gen_simplicial, run_suite, sample_formulas, Family, GenParams, Schema, SuiteConfig, DEFAULT_CAP,
};
use doxa::io::{load_model, LoadedModel};
use doxa::logic::{parse_formula, Formula};
use doxa::relational::is_proper;
use doxa::simplicial::{eval_simplicial, is_serial};
use doxa::transform::{properize, to_simplicial};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The fig1 fixture through properization and translation.
fn fixture_pipeline() -> Outcome {
    let LoadedModel::Relational(m) = load_model(fixture("fig1.json")).map_err(|e| e.to_string())? else {
        return Err("fig1.json is not relational".into());
    };
    ensure(is_proper(&m) == Ok(false), || "fig1 should be improper".into())?;
    let (p, _) = properize(&m, None).map_err(|e| e.to_string())?;
    ensure(p.world_count() == 9, || format!("properized model has {} worlds", p.world_count()))?;
    let (s, _) = to_simplicial(&p).map_err(|e| e.to_string())?;
    ensure(s.facet_count() == 9, || format!("{} facets", s.facet_count()))?;
    for a in s.agents() {
        let n = s.nodes().iter().filter(|n| &n.color == a).count();
        ensure(n == 3, || format!("{n} nodes colored {a}"))?;
    }
    let sa = s.belief_facets(0).map_err(|e| e.to_string())?;
    let sb = s.belief_facets(1).map_err(|e| e.to_string())?;
    let sc = s.belief_facets(2).map_err(|e| e.to_string())?;
    let ab = (0..9).filter(|&x| sa.contains(x) && sb.contains(x)).count();
    let ac = (0..9).filter(|&x| sa.contains(x) && sc.contains(x)).count();
    let none = (0..9).filter(|&x| !sa.contains(x) && !sb.contains(x) && !sc.contains(x)).count();
    let total = sa.count_ones(..) + sb.count_ones(..) + sc.count_ones(..);
    ensure((ab, ac, none, total) == (3, 3, 3, 12), || format!("belief pattern {ab}/{ac}/{none}, {total} memberships"))?;
    Ok("9 worlds, 9 facets, 3 nodes per agent, S_a∩S_b=3 S_a∩S_c=3 S-only=3".into())
}

/// Relational and simplicial truth agree on random proper models.
fn translation_agreement() -> Outcome {
    const MODELS: u64 = 1000;
    const SAMPLES: usize = 200;
    let params: Vec<GenParams> = (0..MODELS)
        .map(|i| {
            let mut rng = Pcg32::seed_from_u64(0x7431 + i);
            GenParams {
                seed: rng.random(),
                n_agents: rng.random_range(1..=3),
                n_atoms: rng.random_range(1..=2),
                n_worlds: rng.random_range(1..=6),
                proper: true,
                ..GenParams::default()
            }
        })
        .collect();
    let mut exhaustive: HashMap<(usize, usize), Vec<Formula>> = HashMap::new();
    for p in &params {
        exhaustive.entry((p.n_agents, p.n_atoms)).or_insert_with(|| {
            enumerate_formulas(&agent_names(p.n_agents), &atom_names(p.n_atoms), 2, DEFAULT_CAP).expect("within cap")
        });
    }
    let results: Vec<Result<(usize, usize), String>> = params
        .par_iter()
        .map(|p| {
            let m = gen_relational(p);
            if is_proper(&m) != Ok(true) {
                return Err(format!("seed {} produced an improper model", p.seed));
            }
            let (s, w) = to_simplicial(&m).map_err(|e| e.to_string())?;
            let mut fs = exhaustive[&(p.n_agents, p.n_atoms)].clone();
            fs.extend(sample_formulas(m.agents(), &atom_names(p.n_atoms), 3, SAMPLES, p.seed));
            let r = compare_translation(&m, &s, &w.world_to_facet, &fs).map_err(|e| e.to_string())?;
            match r.mismatches.first() {
                None => Ok((r.formulas, r.points)),
                Some(x) => Err(format!("seed {}: {} at {} / {}", p.seed, x.formula, x.world, x.facet)),
            }
        })
        .collect();
    let mut checks = 0usize;
    for r in results {
        let (f, w) = r?;
        checks += f * w;
    }
    Ok(format!("{MODELS} proper models, {checks} (formula, world) pairs, 0 mismatches"))
}

/// Properization yields proper models with a bounded-morphism projection.
fn properization() -> Outcome {
    const MODELS: u64 = 1000;
    let results: Vec<Result<bool, String>> = (0..MODELS)
        .into_par_iter()
        .map(|i| {
            // Three in four inputs are drawn until improper; the rest are taken as they come.
            let mut rng = Pcg32::seed_from_u64(0x9e0 + i);
            let want_improper = i % 4 != 0;
            let (p, m) = loop {
                let p = GenParams {
                    seed: rng.random(),
                    n_agents: rng.random_range(2..=3),
                    n_atoms: rng.random_range(1..=2),
                    n_worlds: rng.random_range(1..=6),
                    ..GenParams::default()
                };
                let m = gen_relational(&p);
                if !want_improper || is_proper(&m) == Ok(false) {
                    break (p, m);
                }
            };
            let was_proper = is_proper(&m) == Ok(true);
            let check = check_properize(&m, None).map_err(|e| format!("seed {}: {e}", p.seed))?;
            if !check.proper {
                return Err(format!("seed {}: output not proper", p.seed));
            }
            if let Some(v) = check.projection.violations.first() {
                return Err(format!("seed {}: {} {:?}", p.seed, v.check, v.witness));
            }
            Ok(was_proper)
        })
        .collect();
    let mut improper = 0;
    for r in results {
        if !r? {
            improper += 1;
        }
    }
    ensure(improper * 2 > MODELS, || format!("only {improper} of {MODELS} inputs were improper"))?;
    Ok(format!("{MODELS} models ({improper} improper inputs), all outputs proper, projection bounded for R and Q"))
}

/// Every FULL schema holds on serial simplicial models.
fn full_soundness() -> Outcome {
    let cfg = SuiteConfig::new(0x5017d, 1000, Family::Simp, Schema::FULL.to_vec());
    for t in 0..cfg.trials {
        let (m, _) = gen_simplicial(&cfg.trial_params(t));
        ensure(is_serial(&m) == Some(true), || format!("trial {t} is not serial"))?;
    }
    let records = run_suite(&cfg).map_err(|e| e.to_string())?;
    let instances: u64 = records.iter().flat_map(|r| &r.schemas).map(|s| s.instances).sum();
    if let Some(bad) = records.iter().find(|r| r.failed > 0) {
        let s = bad.schemas.iter().find(|s| s.failed > 0).expect("some schema failed");
        return Err(format!("trial {}: {} fails: {:?}", bad.trial, s.schema, s.failures.first()));
    }
    Ok(format!("{} models, {instances} schema instances, 0 counterexamples", records.len()))
}

/// False belief in the fixture, and PROP1 with shared belief complexes.
fn false_belief_and_prop1() -> Outcome {
    let LoadedModel::Simplicial { model: fb, .. } = load_model(fixture("fb.json")).map_err(|e| e.to_string())? else {
        return Err("fb.json is not a simplicial model".into());
    };
    let demo = parse_formula("B[a] p & ~p").expect("parses");
    ensure(eval_simplicial(&fb, "X1", &demo) == Ok(true), || "B[a] p & ~p should hold at X1".into())?;

    let mut tied = SuiteConfig::new(0x9a1, 500, Family::Simp, vec![Schema::Prop1]);
    tied.tie_beliefs = true;
    tied.serial = false;
    let records = run_suite(&tied).map_err(|e| e.to_string())?;
    let instances: u64 = records.iter().flat_map(|r| &r.schemas).map(|s| s.instances).sum();
    if let Some(bad) = records.iter().find(|r| r.failed > 0) {
        return Err(format!("tied trial {} fails: {:?}", bad.trial, bad.schemas[0].failures.first()));
    }

    let mut free = SuiteConfig::new(0x9a2, 500, Family::Simp, vec![Schema::Prop1]);
    free.serial = false;
    let records = run_suite(&free).map_err(|e| e.to_string())?;
    let refuting = records.iter().filter(|r| r.failed > 0).count();
    ensure(refuting > 0, || "no unconstrained model refutes B[a](B[b] φ -> φ)".into())?;
    Ok(format!(
        "B[a] p & ~p at X1; 500 tied models valid ({instances} instances); {refuting}/500 unconstrained models refute"
    ))
}

/// Multiplicity belief and identity perspectives collapse to knowledge.
fn collapse() -> Outcome {
    const MODELS: u64 = 500;
    let results: Vec<Result<(), String>> = (0..MODELS)
        .into_par_iter()
        .map(|i| {
            let mut rng = Pcg32::seed_from_u64(0xc011 + i);
            let p = GenParams {
                seed: rng.random(),
                n_agents: rng.random_range(1..=3),
                n_atoms: rng.random_range(1..=2),
                nodes_per_agent: rng.random_range(1..=3),
                n_facets: rng.random_range(1..=6),
                serial: rng.random_bool(0.5),
                ..GenParams::default()
            };
            let (m, _) = gen_simplicial(&p);
            let general = GeneralColoredModel::from_simplicial(&m).map_err(|e| e.to_string())?;
            let bounded = SimpBel::new(&general, Variant::Bounded);
            let kasc = Kasc::new(&m, &PerspectiveMap::identity()).map_err(|e| e.to_string())?;
            let fs = enumerate_formulas(m.agents(), &atom_names(p.n_atoms), 2, DEFAULT_CAP).expect("within cap");
            let mut ek = Evaluator::new(&m);
            let mut eb = Evaluator::new(&bounded);
            let mut ep = Evaluator::new(&kasc);
            for f in fs.iter().filter(|f| f.to_string().contains("B[")) {
                let k = ek.truth_set(&f.belief_as_knowledge()).map_err(|e| e.to_string())?;
                if eb.truth_set(f).map_err(|e| e.to_string())? != k {
                    return Err(format!("seed {}: multiplicity belief differs on {f}", p.seed));
                }
                if ep.truth_set(f).map_err(|e| e.to_string())? != k {
                    return Err(format!("seed {}: identity perspective differs on {f}", p.seed));
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<()>, String>>()?;

    let LoadedModel::Simplicial { model, perspective } =
        load_model(fixture("perspective_shift.json")).map_err(|e| e.to_string())?
    else {
        return Err("perspective_shift.json is not a simplicial model".into());
    };
    let pm = perspective.ok_or("fixture has no perspective map")?;
    ensure(pm != PerspectiveMap::identity(), || "fixture map is the identity".into())?;
    let kasc = Kasc::new(&model, &pm).map_err(|e| e.to_string())?;
    let witness = parse_formula("K[a] p & ~B[a] p").expect("parses");
    let holds = Evaluator::new(&kasc).truth_set(&witness).map_err(|e| e.to_string())?;
    let at = holds.ones().next().ok_or("K[a] p & ~B[a] p holds nowhere")?;
    Ok(format!(
        "{MODELS} UCF models: bounded multiplicity and identity perspective match K; fixture witnesses K[a] p & ~B[a] p at {}",
        kasc.point_label(at)
    ))
}

/// Without seriality, B_a ⊥ can hold and axiom D fails.
fn axiom_d_gap() -> Outcome {
    let fill = |n: usize| enumerate_formulas(&agent_names(n), &atom_names(1), 0, DEFAULT_CAP).expect("within cap");
    for trial in 0..200u64 {
        let p = GenParams { seed: 0xd0 + trial, n_agents: 2, nodes_per_agent: 2, n_facets: 3, serial: false, ..GenParams::default() };
        let (m, _) = gen_simplicial(&p);
        let mut ev = Evaluator::new(&m);
        for a in m.agents().to_vec() {
            let absurd = Formula::believes(a.clone(), Formula::falsum());
            let set = ev.truth_set(&absurd).map_err(|e| e.to_string())?;
            if let Some(x) = set.ones().next() {
                let d = check_axiom_schema(&m, Schema::D, &fill(m.agents().len())).map_err(|e| e.to_string())?;
                ensure(d.failed > 0, || format!("trial {trial}: B[{a}] false holds but D is valid"))?;
                ensure(is_serial(&m) == Some(false), || format!("trial {trial}: model claims seriality"))?;
                return Ok(format!(
                    "trial {trial} (seed {}): B[{a}] false at X{x}; schema D fails {} of {} instances, e.g. {}",
                    p.seed, d.failed, d.instances, d.failures[0].formula
                ));
            }
        }
    }
    Err("no model with B_a false found in 200 trials".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("fig1 pipeline", Duration::from_secs(1), fixture_pipeline),
        ("translation preserves truth", Duration::from_secs(120), translation_agreement),
        ("properization", Duration::from_secs(120), properization),
        ("FULL soundness", Duration::from_secs(180), full_soundness),
        ("false belief and shared belief complexes", Duration::from_secs(60), false_belief_and_prop1),
        ("belief collapses to knowledge", Duration::from_secs(60), collapse),
        ("axiom D without seriality", Duration::from_secs(30), axiom_d_gap),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("over budget: {d}")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "{verdict} criterion {} {name} [{:.2}s / {}s]: {detail}",
            i + 1,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
