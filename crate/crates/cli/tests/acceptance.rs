//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero
//! exit if any fails. Runs under `cargo test` with its own harness.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ldg_core::bisim;
use ldg_core::fixtures;
use ldg_core::graph::{apply_elementary, apply_sequence, Alphabet, ElementaryAction, LDGraph, NodeId};
use ldg_core::logic::{eval_concept, eval_fol, Concept, Fol, Formula, LogicKind};
use ldg_core::random::{self, FormulaShape, GraphShape, Rng64, ACTION_KINDS};
use ldg_core::rewrite::{app_formula_alcu, app_formula_fol, applicable, Rule};
use ldg_core::strategy::{rule_set, RuleSet, Strategy};
use ldg_core::subst::suite;
use ldg_core::verifier::enumerate;
use ldg_core::verifier::symbolic::{Bit, Encoder};
use ldg_core::verifier::{
    bounded_validity, check_closed, check_on_graph, close, correctness_parts, eliminate, sample_spec_graphs,
    simplify, test_soundness, wp_action, Bounds, Calculus, Reading,
};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;

/// Name, time limit, check.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ldg(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ldg"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures"))
        .env("LDG_COLOR", "0")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn triples(g: &LDGraph) -> BTreeSet<(String, String, String, String)> {
    g.edges()
        .iter()
        .map(|(id, e)| (id.to_string(), e.src.to_string(), e.tgt.to_string(), e.role.clone()))
        .collect()
}

fn t(id: &str, s: &str, d: &str, r: &str) -> (String, String, String, String) {
    (id.into(), s.into(), d.into(), r.into())
}

// ----- 1 -----

fn merge_golden() -> Outcome {
    let g = fixtures::merge_graph();
    let h = apply_elementary(&g, &ElementaryAction::Merge("i".into(), "j".into())).map_err(|e| e.to_string())?;
    let expected: BTreeSet<_> =
        [t("e1", "i", "l", "r"), t("e2", "k", "i", "r"), t("e3", "i", "i", "r"), t("e4", "i", "k", "r")].into();
    check(triples(&h) == expected, format!("edges {:?}", triples(&h)))?;
    let active: Vec<&str> = h.active().iter().map(NodeId::as_str).collect();
    check(active == ["i", "k", "l"], format!("active nodes {active:?}"))?;
    Ok("4 edges, ids preserved".into())
}

// ----- 2 -----

fn clone_sweep() -> Outcome {
    let g = fixtures::automaton();
    for mask in 0..8u8 {
        let (x, y, z) = (mask & 1 != 0, mask & 2 != 0, mask & 4 != 0);
        let h = apply_elementary(&g, &fixtures::automaton_clone(x, y, z)).map_err(|e| e.to_string())?;
        let got: BTreeSet<(String, String, String)> =
            h.edges().values().map(|e| (e.src.to_string(), e.tgt.to_string(), e.role.clone())).collect();
        let mut want: BTreeSet<(String, String, String)> = [
            ("q0", "q1", "b"),
            ("q1", "q2", "b"),
            ("q1", "q1", "a"),
            ("q0", "q1'", "b"),
            ("q1'", "q2", "b"),
        ]
        .iter()
        .map(|(s, d, r)| (s.to_string(), d.to_string(), r.to_string()))
        .collect();
        for (on, s, d) in [(x, "q1", "q1'"), (y, "q1'", "q1"), (z, "q1'", "q1'")] {
            if on {
                want.insert((s.into(), d.into(), "a".into()));
            }
        }
        check(got == want, format!("X={x} Y={y} Z={z}: {got:?}"))?;
        check(h.edges().len() == want.len(), "unexpected parallel edges")?;
        for (id, e) in g.edges() {
            check(h.edge(id) == Some(e), format!("edge {id} changed"))?;
        }
        check(h.is_active(&"q1'".into()), "clone not active")?;
    }
    Ok("8 parameter combinations".into())
}

// ----- 3 -----

fn biconditional() -> Outcome {
    let mut rng = random::rng(2025);
    let mut total = 0;
    for logic in [LogicKind::Dl, LogicKind::Fol] {
        let runs = suite::run_all(logic, 10_000, 4, &mut rng).map_err(|e| e.to_string())?;
        for (kind, r) in runs {
            let need = if kind == "cl sweep" { 32 * 313 } else { 10_000 };
            check(r.cases >= need, format!("{logic:?} {kind}: only {} cases", r.cases))?;
            if let Some(f) = r.failures.first() {
                return Err(format!("{logic:?} {kind}: {} failures, first {} on {}", r.failures.len(), f.action, f.graph.to_json()));
            }
            total += r.cases;
        }
    }
    Ok(format!("{total} cases, 0 failures"))
}

// ----- 4 -----

fn wp_of_actions() -> Outcome {
    let alphabet = random::small_alphabet();
    let shape = FormulaShape { depth: 3, ..FormulaShape::default() };
    let mut rng = random::rng(4);
    let (mut cases, mut premise) = (0, 0);
    while cases < 5000 {
        let g = random::random_graph(&mut rng, &alphabet, &GraphShape::default());
        let mut alpha = Vec::new();
        let mut cur = g.clone();
        for _ in 0..rng.gen_range(0..=4) {
            let kind = ACTION_KINDS.choose(&mut rng).expect("kinds");
            if let Some(a) = random::random_action(&mut rng, &cur, kind) {
                if let Ok(next) = apply_sequence(&cur, std::slice::from_ref(&a)) {
                    cur = next;
                    alpha.push(a);
                }
            }
        }
        let names: Vec<NodeId> = g.universe().iter().cloned().collect();
        let q = if cases % 2 == 0 {
            Formula::Dl(random::random_concept(&mut rng, &alphabet, &names, &shape, 3))
        } else {
            Formula::Fol(random::random_fol(&mut rng, &alphabet, &names, 3))
        };
        let pre = eliminate(&wp_action(&alpha, &close(&q))).map_err(|e| e.to_string())?;
        if check_closed(&g, &pre).map_err(|e| e.to_string())? {
            premise += 1;
            let post = check_on_graph(&cur, &q).map_err(|e| e.to_string())?;
            check(post, format!("violation: {alpha:?} {q} on {}", g.to_json()))?;
        }
        cases += 1;
    }
    Ok(format!("{cases} cases, premise held in {premise}, 0 violations"))
}

// ----- 5 -----

fn soundness() -> Outcome {
    let mut rng = random::rng(5);
    let mut outcomes = 0;
    for (name, sp) in fixtures::specs() {
        let samples = sample_spec_graphs(&sp, 500, &mut rng).map_err(|e| format!("{name}: {e}"))?;
        check(samples.len() == 500, format!("{name}: only {} samples", samples.len()))?;
        let mut pool = samples.into_iter();
        let report = test_soundness(&sp, &mut |_: &mut Rng64| pool.next(), &mut rng, 500, 50)
            .map_err(|e| format!("{name}: {e}"))?;
        check(report.checked == 500, format!("{name}: {} of 500 samples satisfy the formula", report.checked))?;
        if let Some(v) = report.violations.first() {
            return Err(format!("{name}: outcome {} violates Post", v.outcome.to_json()));
        }
        outcomes += report.outcomes;
    }
    Ok(format!("10 specs x 500 samples, {outcomes} outcome graphs checked, 0 violations"))
}

// ----- 6 -----

fn servernet() -> Outcome {
    let sp = fixtures::servernet_spec();
    let calc = Calculus::new(&sp.rules, sp.logic);
    let post = close(&sp.post);
    let (main, vc) = correctness_parts(&sp).map_err(|e| e.to_string())?;
    let app = |r: &str| calc.app_rule(r).map_err(|e| e.to_string());
    let act = |r: &str, k| calc.wp_rule_action(r, k, &post).map_err(|e| e.to_string());
    let dl = |f: Formula| match f {
        Formula::Dl(c) => c,
        Formula::Fol(_) => panic!("servernet is a DL spec"),
    };
    let want = Concept::implies(
        dl(close(&sp.pre)),
        Concept::and(
            Concept::implies(dl(app("r0")?), dl(act("r0", 0)?)),
            Concept::implies(dl(app("r1")?), dl(act("r1", 1)?)),
        ),
    );
    check(main == Formula::Dl(want), "correctness formula shape differs")?;
    check(simplify(&vc) == Formula::Dl(Concept::Top), format!("vc folds to {}", simplify(&vc)))?;
    let alphabet = sp.alphabet();
    check(
        alphabet == Alphabet::new(["Client", "Proxy"], ["Request", "C2P"]).expect("alphabet"),
        format!("alphabet {alphabet:?}"),
    )?;
    let formula = ldg_core::verifier::correctness_formula(&sp).map_err(|e| e.to_string())?;
    let bounds = Bounds { max_nodes: 4, max_parallel: 1, reserved: sp.reserved_needed() };
    let cx = bounded_validity(&formula, &alphabet, &bounds, Reading::Closed).map_err(|e| e.to_string())?;
    check(cx.is_none(), "bounded search found a counterexample")?;
    let (code, out) = ldg(&["verify", "servernet.ldv", "--bound-nodes", "4", "--trials", "0"]);
    check(code == 0, format!("verify exited with {code}"))?;
    check(out.contains("no counterexample up to size 4"), out)?;
    Ok("shape matches, no counterexample up to 4 nodes, exit 0".into())
}

// ----- 7 -----

/// Whether some map from the left-hand side to active nodes respects labels
/// and edges, as one circuit over every assignment.
fn match_bit(enc: &mut Encoder, rule: &Rule) -> Bit {
    let size = enc.size();
    let k = rule.nodes.len();
    let mut labels = Vec::new();
    for n in &rule.nodes {
        let mut ok = enc.active().to_vec();
        for l in &n.labels {
            let ext = enc.concept(&l.relativize()).expect("label encodes");
            ok = ok.iter().zip(ext).map(|(a, b)| enc.and(*a, b)).collect();
        }
        labels.push(ok);
    }
    let pos = |id: &NodeId| rule.nodes.iter().position(|n| &n.id == id).expect("lhs node");
    let mut options = Vec::new();
    for code in 0..size.pow(k as u32) {
        let h: Vec<usize> = (0..k).map(|x| code / size.pow(x as u32) % size).collect();
        let mut parts: Vec<Bit> = (0..k).map(|x| labels[x][h[x]]).collect();
        for e in &rule.edges {
            parts.push(enc.edge_bit(&e.role, h[pos(&e.src)], h[pos(&e.tgt)]).expect("role"));
        }
        options.push(enc.and_all(parts));
    }
    enc.or_all(options)
}

fn app_equivalence() -> Outcome {
    let alphabet = Alphabet::new(["C", "D"], ["R", "S"]).expect("alphabet");
    let rules = fixtures::corpus();
    let tree: BTreeSet<&str> = fixtures::TREE_RULES.into();
    // Every host with at most 4 active nodes, through the solver.
    for rule in &rules {
        let fol = app_formula_fol(rule).map_err(|e| e.to_string())?;
        let mut enc = Encoder::free(&alphabet, 4, 0);
        let m = match_bit(&mut enc, rule);
        let f = enc.fol(&fol, &mut Vec::new()).map_err(|e| e.to_string())?;
        let mut bad = enc.xor(m, f);
        if tree.contains(rule.name.as_str()) {
            let c = app_formula_alcu(rule).map_err(|e| e.to_string())?.relativize();
            let ext = enc.concept(&c).map_err(|e| e.to_string())?;
            let x = enc.xor(m, ext[0]);
            bad = enc.or(bad, x);
        }
        enc.assert(bad);
        if let Some(model) = enc.solve(&[]) {
            return Err(format!("{}: mismatch on {}", rule.name, model.graph.to_json()));
        }
    }
    // The matcher itself, on every host with at most 2 active nodes and on
    // random hosts with 3 or 4.
    let small: Vec<LDGraph> = enumerate::graphs(&alphabet, &Bounds::nodes(2)).collect();
    let mut rng = random::rng(7);
    let shape = GraphShape { max_active: 4, max_reserved: 0, max_edges: 10 };
    let mut hosts = small.len();
    for rule in &rules {
        let fol = app_formula_fol(rule).map_err(|e| e.to_string())?;
        let alcu = tree.contains(rule.name.as_str()).then(|| app_formula_alcu(rule).expect("tree").relativize());
        let sampled = (0..2000).map(|_| random::random_graph(&mut rng, &alphabet, &shape));
        for g in small.iter().cloned().chain(sampled) {
            let engine = applicable(&g, rule).map_err(|e| e.to_string())?;
            let by_fol = eval_fol(&g, &fol, &Default::default()).map_err(|e| e.to_string())?;
            check(engine == by_fol, format!("{}: FOL {by_fol} vs matcher {engine} on {}", rule.name, g.to_json()))?;
            if let Some(c) = &alcu {
                let by_dl = !eval_concept(&g, c).map_err(|e| e.to_string())?.is_empty();
                check(engine == by_dl, format!("{}: ALCU {by_dl} vs matcher {engine} on {}", rule.name, g.to_json()))?;
            }
        }
        hosts += 2000;
    }
    Ok(format!(
        "{} rules ({} tree-shaped), all hosts up to 4 nodes by SAT, {hosts} hosts through the matcher",
        rules.len(),
        tree.len()
    ))
}

// ----- 8 -----

fn nonclosure() -> Outcome {
    let report = bisim::demonstrate_non_closure();
    check(report.passed(), report.to_string())?;
    check(report.steps.len() == 3, "expected three steps")?;
    let (code, out) = ldg(&["bisim", "demo-nonclosure"]);
    check(code == 0, format!("demo exited with {code}"))?;
    check(out.lines().filter(|l| l.starts_with("step ") && l.ends_with("... ok")).count() == 3, out)?;
    Ok("3 steps ok".into())
}

// ----- 9 -----

fn random_strategy(rng: &mut Rng64, names: &[&str], depth: usize, logic: LogicKind) -> Strategy {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        let r = names.choose(rng).expect("rules").to_string();
        return match rng.gen_range(0..4) {
            0 => Strategy::Empty,
            1 => Strategy::Must(r),
            2 => Strategy::Try(r),
            _ => Strategy::Rule(r),
        };
    }
    let sub = |rng: &mut Rng64| random_strategy(rng, names, depth - 1, logic);
    match rng.gen_range(0..3) {
        0 => {
            let a = sub(rng);
            Strategy::seq(a, sub(rng))
        }
        1 => {
            let a = sub(rng);
            Strategy::choice(a, sub(rng))
        }
        _ => {
            let body = sub(rng);
            Strategy::closure(body, Some(random_formula(rng, logic, 2)))
        }
    }
}

fn random_formula(rng: &mut Rng64, logic: LogicKind, depth: usize) -> Formula {
    let alphabet = Alphabet::new(["C", "D"], ["R", "S"]).expect("alphabet");
    match logic {
        LogicKind::Dl => {
            let shape = FormulaShape { depth, ..FormulaShape::default() };
            Formula::Dl(random::random_concept(rng, &alphabet, &[], &shape, depth))
        }
        LogicKind::Fol => Formula::Fol(random::random_fol(rng, &alphabet, &[], depth)),
    }
}

/// The two tables written out directly: rule-level entries come from the
/// calculus, every composite entry is rebuilt here.
struct Tables<'a> {
    calc: Calculus<'a>,
}

fn occ(s: &Strategy) -> usize {
    match s {
        Strategy::Empty => 0,
        Strategy::Rule(_) | Strategy::Must(_) | Strategy::Try(_) => 1,
        Strategy::Seq(a, b) | Strategy::Choice(a, b) => occ(a) + occ(b),
        Strategy::Closure(a, _) => occ(a),
    }
}

fn and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Dl(a), Formula::Dl(b)) => Formula::Dl(Concept::and(a, b)),
        (Formula::Fol(a), Formula::Fol(b)) => Formula::Fol(Fol::and(a, b)),
        _ => panic!("mixed logics"),
    }
}

fn or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Dl(a), Formula::Dl(b)) => Formula::Dl(Concept::or(a, b)),
        (Formula::Fol(a), Formula::Fol(b)) => Formula::Fol(Fol::or(a, b)),
        _ => panic!("mixed logics"),
    }
}

fn not(a: Formula) -> Formula {
    match a {
        Formula::Dl(a) => Formula::Dl(Concept::not(a)),
        Formula::Fol(a) => Formula::Fol(Fol::not(a)),
    }
}

fn imp(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::Dl(a), Formula::Dl(b)) => Formula::Dl(Concept::implies(a, b)),
        (Formula::Fol(a), Formula::Fol(b)) => Formula::Fol(Fol::implies(a, b)),
        _ => panic!("mixed logics"),
    }
}

impl Tables<'_> {
    fn top(&self) -> Formula {
        match self.calc.kind {
            LogicKind::Dl => Formula::Dl(Concept::Top),
            LogicKind::Fol => Formula::Fol(Fol::Top),
        }
    }

    fn app(&self, s: &Strategy) -> Formula {
        match s {
            Strategy::Empty | Strategy::Try(_) | Strategy::Closure(..) => self.top(),
            Strategy::Rule(r) | Strategy::Must(r) => self.calc.app_rule(r).expect("app"),
            Strategy::Seq(a, _) => self.app(a),
            Strategy::Choice(a, b) => or(self.app(a), self.app(b)),
        }
    }

    fn inv(s: &Strategy) -> Formula {
        match s {
            Strategy::Closure(_, Some(i)) => close(i),
            _ => panic!("closure without invariant"),
        }
    }

    fn wp(&self, s: &Strategy, q: &Formula, k: usize) -> Formula {
        let app = |r: &str| self.calc.app_rule(r).expect("app");
        let act = |r: &str| self.calc.wp_rule_action(r, k, q).expect("wp of action");
        match s {
            Strategy::Empty => q.clone(),
            Strategy::Rule(r) => imp(app(r), act(r)),
            Strategy::Must(r) => and(app(r), act(r)),
            Strategy::Try(r) => and(imp(app(r), act(r)), imp(not(app(r)), q.clone())),
            Strategy::Seq(a, b) => self.wp(a, &self.wp(b, q, k + occ(a)), k),
            Strategy::Choice(a, b) => and(self.wp(a, q, k), self.wp(b, q, k + occ(a))),
            Strategy::Closure(..) => Self::inv(s),
        }
    }

    fn vc(&self, s: &Strategy, q: &Formula, k: usize) -> Formula {
        match s {
            Strategy::Empty | Strategy::Rule(_) | Strategy::Must(_) | Strategy::Try(_) => self.top(),
            Strategy::Seq(a, b) => and(self.vc(a, &self.wp(b, q, k + occ(a)), k), self.vc(b, q, k + occ(a))),
            Strategy::Choice(a, b) => and(self.vc(a, q, k), self.vc(b, q, k + occ(a))),
            Strategy::Closure(body, _) => {
                let inv = Self::inv(s);
                let app = self.app(body);
                and(
                    and(self.vc(body, q, k), imp(and(inv.clone(), app.clone()), self.wp(body, &inv, k))),
                    imp(and(inv, not(app)), q.clone()),
                )
            }
        }
    }
}

fn wp_vc_identities() -> Outcome {
    let corpus = fixtures::corpus();
    let all: Vec<&str> = corpus.iter().map(|r| r.name.as_str()).collect();
    let dl_rules: RuleSet = rule_set(corpus.iter().filter(|r| fixtures::TREE_RULES.contains(&r.name.as_str())).cloned());
    let fol_rules: RuleSet = rule_set(corpus.iter().cloned());
    let mut rng = random::rng(9);
    let mut checked = 0;
    for (logic, rules, names) in
        [(LogicKind::Dl, &dl_rules, fixtures::TREE_RULES.to_vec()), (LogicKind::Fol, &fol_rules, all)]
    {
        let tables = Tables { calc: Calculus::new(rules, logic) };
        for _ in 0..500 {
            let s = random_strategy(&mut rng, &names, 4, logic);
            check(s.depth() <= 4, format!("depth of {s}"))?;
            let q = close(&random_formula(&mut rng, logic, 3));
            let wp = tables.calc.wp(&s, &q, 0).map_err(|e| e.to_string())?;
            check(wp == tables.wp(&s, &q, 0), format!("wp differs for {s}"))?;
            let vc = tables.calc.vc(&s, &q, 0).map_err(|e| e.to_string())?;
            check(vc == tables.vc(&s, &q, 0), format!("vc differs for {s}"))?;
            check(tables.calc.app(&s).map_err(|e| e.to_string())? == tables.app(&s), format!("App differs for {s}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} strategies"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("merge semantics golden", Duration::from_secs(1), merge_golden),
        ("clone semantics sweep", Duration::from_secs(1), clone_sweep),
        ("substitution biconditional", Duration::from_secs(300), biconditional),
        ("weakest precondition of actions", Duration::from_secs(120), wp_of_actions),
        ("soundness on sampled graphs", Duration::from_secs(300), soundness),
        ("servernet end to end", Duration::from_secs(600), servernet),
        ("applicability formulas", Duration::from_secs(600), app_equivalence),
        ("non-closure demonstration", Duration::from_secs(1), nonclosure),
        ("wp/vc structural identities", Duration::from_secs(30), wp_vc_identities),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let result = match result {
            Ok(_) if took > *limit => Err(format!("took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {}: {name} ... PASS ({detail}; {took:.2?})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name} ... FAIL ({why}; {took:.2?})", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
