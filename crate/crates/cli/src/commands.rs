use std::path::Path;

use anyhow::{bail, Context, Result};
use ldg_core::bisim::{self, FeatureSet, Pair, RelationFile};
use ldg_core::graph::{apply_sequence, LDGraph};
use ldg_core::logic::{Formula, LogicKind};
use ldg_core::random;
use ldg_core::strategy::{derivations, execute, rule_set, Limits, Outcome, RuleSet};
use ldg_core::subst::{eliminate_dl_traced, eliminate_fol_traced, suite};
use ldg_core::syntax::{formula_full, parse_actions, parse_formula, parse_rules, parse_strategy};
use ldg_core::verifier::{
    self, bounded_validity, close, correctness_formula, parse_spec, Bounds, Reading, Spec,
};

use crate::output::Sink;
use crate::{BisimCommand, CalcArgs, Cli, Command, Status};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_graph(path: &Path) -> Result<LDGraph> {
    LDGraph::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_rules(path: &Path) -> Result<RuleSet> {
    let rules = parse_rules(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    Ok(rule_set(rules))
}

/// Formula text given inline or as `@file`.
fn formula_arg(text: &str, kind: LogicKind) -> Result<Formula> {
    let text = match text.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => text.to_string(),
    };
    parse_formula(text.trim(), kind).context("in formula")
}

fn show(f: &Formula, full: bool) -> String {
    if full {
        formula_full(f)
    } else {
        f.to_string()
    }
}

fn outcome_json(o: &Outcome) -> serde_json::Value {
    match o {
        Outcome::Graph(g) => serde_json::json!({
            "outcome": "graph",
            "graph": serde_json::from_str::<serde_json::Value>(&g.to_json()).expect("graph JSON"),
        }),
        Outcome::AnyGraph => serde_json::json!({ "outcome": "any" }),
        Outcome::Failure => serde_json::json!({ "outcome": "failure" }),
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    let sink = Sink::new(cli.out)?;
    match cli.command {
        Command::Apply { graph, actions, dot } => {
            let g = read_graph(&graph)?;
            let alpha = parse_actions(&actions).context("in actions")?;
            let h = apply_sequence(&g, &alpha)?;
            if dot {
                sink.artifact("result.dot", &h.to_dot())?;
            } else {
                sink.artifact("result.json", &h.to_json())?;
            }
            Ok(Status::Ok)
        }
        Command::Rewrite { graph, rules, strategy, all, injective, max_steps, logic, dot } => {
            let g = read_graph(&graph)?;
            let rules = read_rules(&rules)?;
            let s = parse_strategy(&strategy, logic.into()).context("in strategy")?;
            let limits = Limits { max_steps, injective, ..Limits::default() };
            if all {
                let outs = derivations(&g, &rules, &s, &limits)?;
                let list: Vec<serde_json::Value> = outs.iter().map(outcome_json).collect();
                let text = serde_json::to_string_pretty(&list)?;
                sink.artifact("outcomes.json", &text)?;
                return Ok(Status::Ok);
            }
            match execute(&g, &rules, &s, &limits)? {
                Outcome::Graph(h) if dot => sink.artifact("result.dot", &h.to_dot())?,
                Outcome::Graph(h) => sink.artifact("result.json", &h.to_json())?,
                other => sink.artifact("result.json", &serde_json::to_string_pretty(&outcome_json(&other))?)?,
            }
            Ok(Status::Ok)
        }
        Command::Eliminate { formula, logic, trace, full } => {
            let f = formula_arg(&formula, logic.into())?;
            let (out, steps) = match &f {
                Formula::Dl(c) => {
                    let (r, t) = eliminate_dl_traced(c)?;
                    (Formula::Dl(r), t.to_string())
                }
                Formula::Fol(h) => {
                    let (r, t) = eliminate_fol_traced(h)?;
                    (Formula::Fol(r), t.to_string())
                }
            };
            sink.artifact("formula.txt", &show(&out, full))?;
            if trace {
                sink.artifact("trace.txt", &steps)?;
            }
            Ok(Status::Ok)
        }
        Command::Wp(args) => calc(&sink, args, false),
        Command::Vc(args) => calc(&sink, args, true),
        Command::Verify { spec, bound_nodes, trials, seed, step_bound, emit_formula } => {
            verify(&sink, &spec, bound_nodes, trials, seed, step_bound, emit_formula.as_deref())
        }
        Command::Bisim(BisimCommand::Check { left, right, relation, features }) => {
            let Some(f) = FeatureSet::parse(&features) else {
                bail!("unknown feature set `{features}`; expected letters from Q, U, O, Self");
            };
            let (i, j) = (read_graph(&left)?, read_graph(&right)?);
            let file: RelationFile = serde_json::from_str(&read(&relation)?)
                .with_context(|| format!("in {}", relation.display()))?;
            let pair = Pair { left: &i, right: &j, nominals: &file.nominals };
            let (ok, violations) = bisim::is_bisimulation(&pair, &file.relation(), f)?;
            if ok {
                sink.line(&format!("{}: the relation is an {f}-bisimulation", sink.good("ok")));
                return Ok(Status::Ok);
            }
            sink.line(&format!("{}: the relation is not an {f}-bisimulation", sink.bad("FAILED")));
            for v in &violations {
                sink.line(&format!("  {v}"));
            }
            Ok(Status::Counterexample)
        }
        Command::Bisim(BisimCommand::DemoNonclosure) => {
            let report = bisim::demonstrate_non_closure();
            for (k, s) in report.steps.iter().enumerate() {
                let mark = if s.passed { sink.good("ok") } else { sink.bad("FAILED") };
                sink.line(&format!("step {}: {} ... {mark}", k + 1, s.claim));
            }
            sink.line(&format!("eliminated form: {}", report.eliminated));
            Ok(if report.passed() { Status::Ok } else { Status::Counterexample })
        }
        Command::Fuzz { seed, cases, logic, kind, depth } => fuzz(&sink, seed, cases, logic, kind, depth),
    }
}

fn calc(sink: &Sink, args: CalcArgs, vc: bool) -> Result<Status> {
    let kind: LogicKind = args.logic.into();
    let rules = read_rules(&args.rules)?;
    let s = parse_strategy(&args.strategy, kind).context("in strategy")?;
    let post = close(&formula_arg(&args.post, kind)?);
    let raw = if vc {
        verifier::vc_strategy(&s, &post, &rules)?
    } else {
        verifier::wp_strategy(&s, &post, &rules)?
    };
    let out = if args.pending { raw } else { verifier::simplify(&verifier::eliminate(&raw)?) };
    sink.artifact("formula.txt", &show(&out, args.full))?;
    Ok(Status::Ok)
}

fn load_spec(path: &Path) -> Result<Spec> {
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let text = read(path)?;
    let spec = parse_spec(&text, &mut |rules| {
        let p = dir.join(rules);
        std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))
    })
    .with_context(|| format!("in {}", path.display()))?;
    Ok(spec)
}

fn verify(
    sink: &Sink,
    path: &Path,
    bound_nodes: Option<usize>,
    trials: usize,
    seed: u64,
    step_bound: usize,
    emit: Option<&Path>,
) -> Result<Status> {
    let mut sp = load_spec(path)?;
    if let Some(k) = bound_nodes {
        sp.bound_nodes = k;
    }
    let formula = correctness_formula(&sp)?;
    if let Some(p) = emit {
        let p = sink.path(p);
        std::fs::write(&p, formula_full(&formula) + "\n").with_context(|| format!("cannot write {}", p.display()))?;
    }
    let alphabet = sp.alphabet();
    let list = |names: &std::collections::BTreeSet<String>| names.iter().cloned().collect::<Vec<_>>().join(", ");
    sink.line(&format!(
        "concepts: {}; roles: {}",
        list(&alphabet.concepts),
        list(&alphabet.roles)
    ));
    let bounds = Bounds { max_nodes: sp.bound_nodes, max_parallel: 1, reserved: sp.reserved_needed() };
    if let Some(cx) = bounded_validity(&formula, &alphabet, &bounds, Reading::Closed)? {
        sink.line(&format!(
            "{}: correctness formula fails on a graph of size {}",
            sink.bad("counterexample"),
            cx.graph.active().len()
        ));
        for (p, n) in &cx.valuation {
            sink.line(&format!("  {p} = {n}"));
        }
        sink.artifact("counterexample.json", &cx.graph.to_json())?;
        return Ok(Status::Counterexample);
    }
    sink.line(&format!("{}: no counterexample up to size {}", sink.good("ok"), sp.bound_nodes));
    if trials == 0 {
        return Ok(Status::Ok);
    }
    let mut rng = random::rng(seed);
    let samples = verifier::sample_spec_graphs(&sp, trials, &mut rng)?;
    let mut pool = samples.into_iter();
    let report = verifier::test_soundness(&sp, &mut |_: &mut random::Rng64| pool.next(), &mut rng, trials, step_bound)?;
    sink.line(&format!(
        "sampled {} graphs, {} satisfy the precondition, {} outcome graphs, {} over the step bound",
        report.sampled, report.checked, report.outcomes, report.unbounded
    ));
    if let Some(v) = report.violations.first() {
        sink.line(&format!("{}: an outcome violates the postcondition", sink.bad("counterexample")));
        sink.artifact("counterexample.json", &v.graph.to_json())?;
        sink.artifact("outcome.json", &v.outcome.to_json())?;
        return Ok(Status::Counterexample);
    }
    sink.line(&format!("{}: every outcome satisfies the postcondition", sink.good("ok")));
    Ok(Status::Ok)
}

fn fuzz(
    sink: &Sink,
    seed: u64,
    cases: usize,
    logic: Option<crate::Logic>,
    kind: Option<String>,
    depth: usize,
) -> Result<Status> {
    let logics: Vec<LogicKind> = match logic {
        Some(l) => vec![l.into()],
        None => vec![LogicKind::Dl, LogicKind::Fol],
    };
    let mut rng = random::rng(seed);
    let mut failures = Vec::new();
    for logic in logics {
        let name = match logic {
            LogicKind::Dl => "dl",
            LogicKind::Fol => "fol",
        };
        let runs = match &kind {
            Some(k) if k == "cl" => vec![
                (k.clone(), suite::run_kind(k, logic, cases, depth, &mut rng)?),
                ("cl sweep".to_string(), suite::clone_sweep(logic, cases.div_ceil(32).max(1), depth, &mut rng)?),
            ],
            Some(k) => vec![(k.clone(), suite::run_kind(k, logic, cases, depth, &mut rng)?)],
            None => suite::run_all(logic, cases, depth, &mut rng)?,
        };
        for (k, r) in runs {
            let mark = if r.failures.is_empty() { sink.good("ok") } else { sink.bad("FAILED") };
            sink.line(&format!("{name:<4}{k:<10}{:>7} cases {:>5} failures  {mark}", r.cases, r.failures.len()));
            failures.extend(r.failures);
        }
    }
    if failures.is_empty() {
        return Ok(Status::Ok);
    }
    let mut text = String::new();
    for f in &failures {
        text.push_str(&format!("action: {}\nformula: {}\ngraph: {}\n\n", f.action, f.formula, f.graph.to_json()));
    }
    sink.artifact("failures.txt", &text)?;
    Ok(Status::Counterexample)
}
