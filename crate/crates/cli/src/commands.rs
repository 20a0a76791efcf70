use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use doxa::altsem::{GeneralColoredModel, Kasc, PerspectiveMap, SimpBel, Variant};
use doxa::eval::{Evaluator, Semantics};
use doxa::harness::{gen_relational, gen_simplicial, run_suite, GenParams, Schema, SuiteConfig};
use doxa::io::{
    load_model, properize_sidecar, read_world_map, relational_to_file, simplicial_to_file, to_pretty_json,
    translation_sidecar, LoadError, LoadedModel,
};
use doxa::relational::check_bounded_morphism;
use doxa::report::{Flag, Violation};
use doxa::transform::{properize, to_relational, to_simplicial, TransformError};
use doxa::{parse_formula, validate_relational, validate_simplicial, Agent, Formula, RelationalModel, ValidationReport};

use crate::{Cli, Command, FamilyArg, Format, SemanticsArg};

pub fn run(cli: Cli) -> Result<u8> {
    let fmt = cli.format;
    match cli.command {
        Command::Check { model, strict, morphism, target } => {
            check(fmt, &model, strict, morphism.as_deref().zip(target.as_deref()))
        }
        Command::Eval { model, at, formula, semantics } => eval(fmt, &model, &at, &formula, semantics),
        Command::Translate { model, properize_first, distinguished, output } => {
            translate(fmt, &model, properize_first, distinguished, output.as_deref())
        }
        Command::ToRelational { model, output } => to_relational_cmd(fmt, &model, output.as_deref()),
        Command::Properize { model, distinguished, output } => {
            properize_cmd(fmt, &model, distinguished, output.as_deref())
        }
        Command::Suite {
            seed,
            trials,
            family,
            schemas,
            serial,
            tie_beliefs,
            depth,
            max_agents,
            max_atoms,
            max_worlds,
            max_nodes,
            max_facets,
        } => {
            let schemas = Schema::parse_list(&schemas)?;
            let mut cfg = SuiteConfig::new(seed, trials, family.into(), schemas);
            cfg.serial = serial.get();
            cfg.tie_beliefs = tie_beliefs;
            cfg.depth = depth;
            cfg.max_agents = max_agents;
            cfg.max_atoms = max_atoms;
            cfg.max_worlds = max_worlds;
            cfg.max_nodes = max_nodes;
            cfg.max_facets = max_facets;
            suite(fmt, &cfg)
        }
        Command::Gen { family, seed, agents, atoms, worlds, nodes, facets, serial, proper, tie_beliefs, output } => {
            let p = GenParams {
                seed,
                n_agents: agents,
                n_atoms: atoms,
                n_worlds: worlds,
                nodes_per_agent: nodes,
                n_facets: facets,
                serial: serial.get(),
                proper,
                tie_beliefs,
            };
            gen(family, &p, output.as_deref())
        }
        Command::CompareSemantics { model, formulas } => compare(fmt, &model, &formulas),
    }
}

fn load(path: &Path) -> Result<LoadedModel> {
    load_model(path).map_err(|e: LoadError| anyhow!(e))
}

fn load_relational(path: &Path) -> Result<RelationalModel> {
    match load(path)? {
        LoadedModel::Relational(m) => Ok(m),
        _ => bail!("{} is not a relational model", path.display()),
    }
}

fn formula(text: &str) -> Result<Formula> {
    parse_formula(text).with_context(|| format!("cannot parse `{text}`"))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("cannot write {}", p.display())),
        None => stdout_line(text),
    }
}

/// A closed pipe downstream is not an error.
fn stdout_line(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// `out.json` -> `out.<tag>.json`
fn sidecar(path: &Path, tag: &str) -> PathBuf {
    path.with_extension(format!("{tag}.json"))
}

fn print_report(fmt: Format, report: &ValidationReport) {
    match fmt {
        Format::Text => print!("{report}"),
        Format::Json => println!("{}", serde_json::to_string(report).expect("report serializes")),
    }
}

fn check(fmt: Format, path: &Path, strict: bool, morphism: Option<(&Path, &Path)>) -> Result<u8> {
    let model = load(path)?;
    let mut report = match &model {
        LoadedModel::Relational(m) => validate_relational(m),
        LoadedModel::Simplicial { model, perspective } => {
            let mut r = validate_simplicial(model);
            if let Some(pm) = perspective {
                if let Err(e) = pm.validate(model) {
                    r.violations.push(Violation {
                        check: "perspective-map".into(),
                        witness: Vec::new(),
                        detail: e.to_string(),
                    });
                    r.ok = false;
                }
            }
            r
        }
        LoadedModel::General { model, perspective } => {
            if perspective.is_some() {
                bail!("perspective maps need a UCF model");
            }
            ValidationReport {
                ok: true,
                violations: Vec::new(),
                flags: vec![Flag { name: "ucf".into(), value: model.is_ucf(), witness: Vec::new() }],
            }
        }
    };
    let mut ok = report.ok && !(strict && report.flags.iter().any(|f| !f.value));

    if let Some((map_path, target_path)) = morphism {
        let LoadedModel::Relational(source) = &model else {
            bail!("bounded morphisms are checked between relational models");
        };
        let target = load_relational(target_path)?;
        let raw: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(map_path).with_context(|| format!("cannot read {}", map_path.display()))?,
        )?;
        let map = read_world_map(&raw, source, &target)?;
        let missing: Vec<&str> =
            map.iter().enumerate().filter(|(_, t)| t.is_none()).map(|(i, _)| source.world_name(i)).collect();
        if !missing.is_empty() {
            bail!("world map is undefined at {}", missing.join(", "));
        }
        let map: Vec<usize> = map.into_iter().flatten().collect();
        let m = check_bounded_morphism(source, &target, &map)?;
        ok &= m.ok;
        match fmt {
            Format::Text => {
                print!("{report}");
                println!("morphism:");
                print!("{m}");
            }
            Format::Json => println!("{}", json!({ "model": report, "morphism": m })),
        }
        return Ok(if ok { 0 } else { 1 });
    }
    if strict && report.ok && !ok {
        report.ok = false;
    }
    print_report(fmt, &report);
    Ok(if ok { 0 } else { 1 })
}

fn eval(fmt: Format, path: &Path, at: &str, text: &str, semantics: Option<SemanticsArg>) -> Result<u8> {
    let f = formula(text)?;
    let model = load(path)?;
    let (value, semantics) = match &model {
        LoadedModel::Relational(m) => {
            let s = semantics.unwrap_or(SemanticsArg::Standard);
            if s != SemanticsArg::Standard {
                bail!("relational models only support standard semantics");
            }
            let w = m.world(at)?;
            (holds(m, w, &f)?, s)
        }
        LoadedModel::Simplicial { model: m, perspective } => {
            let x = m.facet(at)?;
            let s = semantics.unwrap_or(SemanticsArg::Standard);
            let v = match s {
                SemanticsArg::Standard => holds(m, x, &f)?,
                SemanticsArg::Kasc => {
                    let pm = perspective.clone().unwrap_or_else(PerspectiveMap::identity);
                    holds(&Kasc::new(m, &pm)?, x, &f)?
                }
                SemanticsArg::Bounded | SemanticsArg::Minimal => {
                    let g = GeneralColoredModel::from_simplicial(m)?;
                    holds(&SimpBel::new(&g, variant(s)), x, &f)?
                }
            };
            (v, s)
        }
        LoadedModel::General { model: g, .. } => {
            let s = semantics.unwrap_or(SemanticsArg::Bounded);
            if !matches!(s, SemanticsArg::Bounded | SemanticsArg::Minimal) {
                bail!("non-UCF models only support bounded and minimal semantics");
            }
            let x = g.facet(at)?;
            (holds(&SimpBel::new(g, variant(s)), x, &f)?, s)
        }
    };
    match fmt {
        Format::Text => println!("{value}"),
        Format::Json => println!(
            "{}",
            json!({ "at": at, "formula": f.to_string(), "semantics": format!("{semantics:?}").to_lowercase(), "value": value })
        ),
    }
    Ok(if value { 0 } else { 1 })
}

fn variant(s: SemanticsArg) -> Variant {
    if s == SemanticsArg::Minimal {
        Variant::Minimal
    } else {
        Variant::Bounded
    }
}

fn holds<S: Semantics>(s: &S, point: usize, f: &Formula) -> Result<bool> {
    Ok(Evaluator::new(s).holds_at(point, f)?)
}

/// Prints the failure and returns exit code 1 for refusals the user can act
/// on; everything else is an error.
fn refused(fmt: Format, e: TransformError) -> Result<u8> {
    match &e {
        TransformError::Improper(w, v) => match fmt {
            Format::Text => println!("not proper: {w} {v}"),
            Format::Json => println!("{}", json!({ "error": "improper", "witness": [w, v] })),
        },
        TransformError::Invalid(r) => match fmt {
            Format::Text => print!("invalid input\n{r}"),
            Format::Json => println!("{}", json!({ "error": "invalid", "report": r })),
        },
        TransformError::TooFewAgents => match fmt {
            Format::Text => println!("{e}"),
            Format::Json => println!("{}", json!({ "error": "too-few-agents" })),
        },
        _ => return Err(anyhow!(e)),
    }
    Ok(1)
}

fn translate(
    fmt: Format,
    path: &Path,
    properize_first: bool,
    distinguished: Option<String>,
    output: Option<&Path>,
) -> Result<u8> {
    let source = load_relational(path)?;
    let mut proper = None;
    let input = if properize_first {
        let agent = distinguished.map(Agent::new);
        match properize(&source, agent.as_ref()) {
            Ok((p, w)) => &proper.insert((p, w)).0,
            Err(e) => return refused(fmt, e),
        }
    } else {
        &source
    };
    let (s, witness) = match to_simplicial(input) {
        Ok(x) => x,
        Err(e) => return refused(fmt, e),
    };
    emit(output, &to_pretty_json(&simplicial_to_file(&s)))?;
    if let Some(out) = output {
        std::fs::write(sidecar(out, "witness"), to_pretty_json(&translation_sidecar(&witness)))?;
        if let Some((p, w)) = &proper {
            std::fs::write(sidecar(out, "proper"), to_pretty_json(&relational_to_file(p)))?;
            std::fs::write(sidecar(out, "properize"), to_pretty_json(&properize_sidecar(w, p, &source)))?;
        }
        summary(fmt, out, s.facet_count(), "facets");
    }
    Ok(0)
}

fn summary(fmt: Format, out: &Path, n: usize, what: &str) {
    match fmt {
        Format::Text => eprintln!("wrote {} ({n} {what})", out.display()),
        Format::Json => println!("{}", json!({ "output": out.display().to_string(), what: n })),
    }
}

fn to_relational_cmd(fmt: Format, path: &Path, output: Option<&Path>) -> Result<u8> {
    let LoadedModel::Simplicial { model, .. } = load(path)? else {
        bail!("{} is not a UCF simplicial model", path.display());
    };
    let (r, witness) = match to_relational(&model) {
        Ok(x) => x,
        Err(e) => return refused(fmt, e),
    };
    emit(output, &to_pretty_json(&relational_to_file(&r)))?;
    if let Some(out) = output {
        std::fs::write(sidecar(out, "witness"), to_pretty_json(&translation_sidecar(&witness)))?;
        summary(fmt, out, r.world_count(), "worlds");
    }
    Ok(0)
}

fn properize_cmd(fmt: Format, path: &Path, distinguished: Option<String>, output: Option<&Path>) -> Result<u8> {
    let source = load_relational(path)?;
    let agent = distinguished.map(Agent::new);
    let (p, w) = match properize(&source, agent.as_ref()) {
        Ok(x) => x,
        Err(e) => return refused(fmt, e),
    };
    emit(output, &to_pretty_json(&relational_to_file(&p)))?;
    if let Some(out) = output {
        std::fs::write(sidecar(out, "properize"), to_pretty_json(&properize_sidecar(&w, &p, &source)))?;
        summary(fmt, out, p.world_count(), "worlds");
    }
    Ok(0)
}

fn suite(fmt: Format, cfg: &SuiteConfig) -> Result<u8> {
    let records = run_suite(cfg)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let failed: u64 = records.iter().map(|r| r.failed).sum();
    let bad_trials = records.iter().filter(|r| r.failed > 0).count();
    for r in &records {
        if let Err(e) = writeln!(out, "{}", serde_json::to_string(r)?) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                break;
            }
            return Err(e.into());
        }
    }
    let _ = out.flush();
    if fmt == Format::Text {
        eprintln!("{} trials, {bad_trials} with failures, {failed} failed instances", records.len());
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn gen(family: FamilyArg, p: &GenParams, output: Option<&Path>) -> Result<u8> {
    let text = match family {
        FamilyArg::Rel => to_pretty_json(&relational_to_file(&gen_relational(p))),
        FamilyArg::Simp => {
            let (m, cut) = gen_simplicial(p);
            if let Some(t) = cut {
                eprintln!("warning: {} facets requested, only {} distinct exist", t.requested, t.available);
            }
            to_pretty_json(&simplicial_to_file(&m))
        }
    };
    emit(output, &text)?;
    Ok(0)
}

type Column<'a> = (&'static str, Box<dyn Fn(&Formula) -> Result<doxa::eval::PointSet> + 'a>);

fn truth<S: Semantics>(s: &S, f: &Formula) -> Result<doxa::eval::PointSet> {
    Ok(Evaluator::new(s).truth_set(f)?)
}

fn compare(fmt: Format, path: &Path, texts: &[String]) -> Result<u8> {
    let formulas: Vec<Formula> = texts.iter().map(|t| formula(t)).collect::<Result<_>>()?;
    let model = load(path)?;
    let (simplicial, pm, general) = match model {
        LoadedModel::Relational(_) => bail!("compare-semantics needs a simplicial model"),
        LoadedModel::Simplicial { model, perspective } => {
            let g = GeneralColoredModel::from_simplicial(&model)?;
            (Some(model), Some(perspective.unwrap_or_else(PerspectiveMap::identity)), g)
        }
        LoadedModel::General { model, .. } => (None, None, model),
    };
    let bounded = SimpBel::new(&general, Variant::Bounded);
    let minimal = SimpBel::new(&general, Variant::Minimal);
    let kasc = match (&simplicial, &pm) {
        (Some(s), Some(pm)) => Some(Kasc::new(s, pm)?),
        _ => None,
    };
    let mut columns: Vec<Column> = Vec::new();
    if let Some(s) = &simplicial {
        columns.push(("standard", Box::new(move |f| truth(s, f))));
    }
    if let Some(k) = &kasc {
        columns.push(("kasc", Box::new(move |f| truth(k, f))));
    }
    columns.push(("bounded", Box::new(|f| truth(&bounded, f))));
    columns.push(("minimal", Box::new(|f| truth(&minimal, f))));
    columns.push(("K", Box::new(|f| truth(&bounded, &f.belief_as_knowledge()))));

    let n = general.facet_count();
    let mut tables = Vec::new();
    for f in &formulas {
        let sets: Vec<_> = columns.iter().map(|(_, c)| c(f)).collect::<Result<_>>()?;
        let rows: Vec<(String, Vec<bool>)> = (0..n)
            .map(|x| (format!("X{x}"), sets.iter().map(|s| s.contains(x)).collect()))
            .collect();
        tables.push((f, rows));
    }
    let names: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
    match fmt {
        Format::Text => {
            for (f, rows) in &tables {
                println!("{f}");
                println!("  facet  {}  agree", names.iter().map(|n| format!("{n:>8}")).collect::<Vec<_>>().join(" "));
                for (label, vals) in rows {
                    let cells: Vec<String> = vals.iter().map(|v| format!("{:>8}", if *v { "T" } else { "F" })).collect();
                    let agree = vals.iter().all(|v| *v == vals[0]);
                    println!("  {label:<5}  {}  {}", cells.join(" "), if agree { "yes" } else { "no" });
                }
            }
        }
        Format::Json => {
            let out: Vec<_> = tables
                .iter()
                .map(|(f, rows)| {
                    let facets: Vec<_> = rows
                        .iter()
                        .map(|(label, vals)| {
                            let values: serde_json::Map<String, serde_json::Value> =
                                names.iter().zip(vals).map(|(n, v)| (n.to_string(), json!(v))).collect();
                            json!({ "facet": label, "values": values, "agree": vals.iter().all(|v| *v == vals[0]) })
                        })
                        .collect();
                    json!({ "formula": f.to_string(), "facets": facets })
                })
                .collect();
            println!("{}", serde_json::Value::Array(out));
        }
    }
    Ok(0)
}
