use super::enumerate::bounded_validity_explicit;
use super::*;
use crate::fixtures;
use crate::graph::apply_sequence;
use crate::random::{self, FormulaShape, ACTION_KINDS};
use crate::rewrite::find_matches;
use crate::strategy::rule_set;
use crate::syntax::{parse_concept, parse_formula, parse_rules, parse_strategy};
use rand::seq::SliceRandom;

fn dl(s: &str) -> Formula {
    Formula::Dl(parse_concept(s).unwrap())
}

fn strategy(s: &str) -> Strategy {
    parse_strategy(s, LogicKind::Dl).unwrap()
}

fn marking_rules() -> RuleSet {
    let text = "rule a { lhs { nodes: x [A] } rhs { del_C(x, A) } }
                rule b { lhs { nodes: x, y; edges: x -r-> y } rhs { add_C(x, A) } }
                rule f { lhs { nodes: x } rhs { add_N(y); add_E(x, y, r) } }";
    rule_set(parse_rules(text).unwrap())
}

fn spec(pre: &str, post: &str, s: &str) -> Spec {
    Spec {
        pre: dl(pre),
        post: dl(post),
        rules: marking_rules(),
        strategy: strategy(s),
        logic: LogicKind::Dl,
        alphabet: None,
        bound_nodes: 2,
    }
}

#[test]
fn wp_of_basic_strategies() {
    let rules = marking_rules();
    let calc = Calculus::new(&rules, LogicKind::Dl);
    let q = close(&dl("A"));
    assert_eq!(calc.wp(&Strategy::Empty, &q, 0).unwrap(), q);
    let app = calc.app_rule("a").unwrap();
    let body = calc.wp_rule_action("a", 0, &q).unwrap();
    assert_eq!(calc.wp(&strategy("a"), &q, 0).unwrap(), f_implies(app.clone(), body.clone()));
    assert_eq!(calc.wp(&strategy("a!"), &q, 0).unwrap(), f_and(app.clone(), body.clone()));
    assert_eq!(
        calc.wp(&strategy("a?"), &q, 0).unwrap(),
        f_and(f_implies(app.clone(), body), f_implies(f_not(app), q.clone()))
    );
    // The second occurrence gets its own parameters.
    let inner = calc.wp(&strategy("b"), &q, 1).unwrap();
    assert_eq!(calc.wp(&strategy("a; b"), &q, 0).unwrap(), calc.wp(&strategy("a"), &inner, 0).unwrap());
    assert_ne!(inner, calc.wp(&strategy("b"), &q, 0).unwrap());
    assert_eq!(
        calc.wp(&strategy("a + b"), &q, 0).unwrap(),
        f_and(calc.wp(&strategy("a"), &q, 0).unwrap(), inner)
    );
    let inv = dl("A or not A");
    assert_eq!(calc.wp(&strategy("a* {inv: A or not A}"), &q, 0).unwrap(), close(&inv));
    assert!(matches!(calc.wp(&strategy("a*"), &q, 0), Err(VerifyError::MissingInvariant(_))));
}

#[test]
fn wp_of_a_rule_names_its_parameters() {
    let rules = marking_rules();
    let calc = Calculus::new(&rules, LogicKind::Dl);
    let Formula::Dl(w) = calc.wp_rule_action("a", 3, &close(&dl("A"))).unwrap() else { panic!() };
    let noms: Vec<String> = w.nominals().into_iter().map(|n| n.0).collect();
    assert_eq!(noms, ["?x_3"]);
    let Formula::Dl(w) = calc.wp_rule_action("f", 0, &close(&dl("A"))).unwrap() else { panic!() };
    assert!(w.nominals().contains(&NodeId::from("?y_0")));
}

#[test]
fn vc_of_basic_strategies() {
    let rules = marking_rules();
    let calc = Calculus::new(&rules, LogicKind::Dl);
    let q = close(&dl("A"));
    for s in ["eps", "a", "a?", "a!", "a + b", "a; b"] {
        assert_eq!(simplify(&calc.vc(&strategy(s), &q, 0).unwrap()), f_top(LogicKind::Dl), "{s}");
    }
    let s = strategy("a; b* {inv: A}");
    let Strategy::Seq(first, second) = &s else { panic!() };
    assert_eq!(
        calc.vc(&s, &q, 0).unwrap(),
        f_and(calc.vc(first, &calc.wp(second, &q, 1).unwrap(), 0).unwrap(), calc.vc(second, &q, 1).unwrap())
    );
    let Strategy::Closure(body, _) = second.as_ref() else { panic!() };
    let inv = close(&dl("A"));
    let app = calc.app(body).unwrap();
    assert_eq!(
        calc.vc(second, &q, 0).unwrap(),
        f_and(
            f_and(
                calc.vc(body, &q, 0).unwrap(),
                f_implies(f_and(inv.clone(), app.clone()), calc.wp(body, &inv, 0).unwrap())
            ),
            f_implies(f_and(inv, f_not(app)), q)
        )
    );
}

#[test]
fn applicability_of_strategies() {
    let rules = marking_rules();
    let calc = Calculus::new(&rules, LogicKind::Dl);
    let top = f_top(LogicKind::Dl);
    for s in ["eps", "a?", "a* {inv: A}"] {
        assert_eq!(calc.app(&strategy(s)).unwrap(), top, "{s}");
    }
    let a = calc.app_rule("a").unwrap();
    let b = calc.app_rule("b").unwrap();
    assert_eq!(calc.app(&strategy("a; b")).unwrap(), a);
    assert_eq!(calc.app(&strategy("a + b")).unwrap(), f_or(a, b));
}

#[test]
fn correctness_of_trivial_specs() {
    let sp = spec("A", "A or B", "eps");
    assert_eq!(
        correctness_formula(&sp).unwrap(),
        simplify(&f_implies(close(&sp.pre), close(&sp.post)))
    );
    let sp = spec("bot", "A", "a; b");
    assert_eq!(correctness_formula(&sp).unwrap(), f_top(LogicKind::Dl));
}

#[test]
fn servernet_correctness_shape() {
    let sp = fixtures::servernet_spec();
    let (main, vc) = correctness_parts(&sp).unwrap();
    assert_eq!(simplify(&vc), f_top(LogicKind::Dl));
    let calc = Calculus::new(&sp.rules, LogicKind::Dl);
    let post = close(&sp.post);
    let branch = |r: &str, occ| {
        f_implies(calc.app_rule(r).unwrap(), calc.wp_rule_action(r, occ, &post).unwrap())
    };
    assert_eq!(main, f_implies(close(&sp.pre), f_and(branch("r0", 0), branch("r1", 1))));
    let f = correctness_formula(&sp).unwrap();
    assert_eq!(f, simplify(&eliminate(&main).unwrap()));
}

#[test]
fn graph_checks() {
    let g = fixtures::servernet_graph();
    assert!(check_on_graph(&g, &dl("top")).unwrap());
    let sp = fixtures::servernet_spec();
    assert!(check_on_graph(&g, &sp.pre).unwrap());
    // The only request goes to a full proxy, so `r1` fires.
    let outs = derivations(&g, &sp.rules, &sp.strategy, &Limits::default()).unwrap();
    assert_eq!(outs.len(), 2);
    assert!(outs.contains(&Outcome::AnyGraph));
    for o in outs {
        if let Outcome::Graph(h) = o {
            assert!(check_on_graph(&h, &sp.post).unwrap());
            assert!(h.is_active(&"n0".into()));
        }
    }
    let f = correctness_formula(&sp).unwrap();
    assert!(check_closed(&g, &f).unwrap());
}

#[test]
fn bounded_validity_examples() {
    let a = Alphabet::new(["A"], Vec::<String>::new()).unwrap();
    assert!(bounded_validity(&dl("top"), &a, &Bounds::nodes(3), Reading::User).unwrap().is_none());
    let cx = bounded_validity(&dl("A"), &a, &Bounds::nodes(3), Reading::User).unwrap().unwrap();
    assert!(cx.graph.active().iter().any(|n| !cx.graph.has_label(n, "A")));
    assert!(!holds_with(&cx.graph, &dl("A"), Reading::User, &cx.valuation).unwrap());
    let cx = bounded_validity_explicit(&dl("A"), &a, &Bounds::nodes(3), Reading::User, 1000).unwrap().unwrap();
    assert_eq!(cx.graph.active().len(), 1);
}

/// The SAT search and brute-force enumeration agree on random formulas
/// with parameters.
#[test]
fn symbolic_search_matches_enumeration() {
    let alphabet = Alphabet::new(["A", "B"], ["r"]).unwrap();
    let params: Vec<NodeId> = ["?p", "?q"].into_iter().map(NodeId::from).collect();
    let shape = FormulaShape { depth: 3, max_count: 2, ..FormulaShape::default() };
    let mut rng = random::rng(7);
    for case in 0..60 {
        let bounds = Bounds { max_nodes: 1 + case % 2, max_parallel: 1, reserved: case % 3 / 2 };
        let f = if case % 3 == 2 {
            Formula::Fol(random::random_fol(&mut rng, &alphabet, &params, 3))
        } else {
            Formula::Dl(random::random_concept(&mut rng, &alphabet, &params, &shape, 3))
        };
        for reading in [Reading::User, Reading::Closed] {
            let sat = bounded_validity(&f, &alphabet, &bounds, reading).unwrap();
            let brute = bounded_validity_explicit(&f, &alphabet, &bounds, reading, 1 << 12).unwrap();
            assert_eq!(sat.is_some(), brute.is_some(), "{f:?} under {reading:?} with {bounds:?}");
            if let Some(cx) = sat {
                let params = params_of(&cx.graph, &f);
                let val: Valuation = cx.valuation.into_iter().filter(|(p, _)| params.contains(p)).collect();
                assert!(!holds_with(&cx.graph, &f, reading, &val).unwrap());
            }
        }
    }
}

#[test]
fn sampled_models_satisfy_the_formula() {
    let alphabet = Alphabet::new(["A"], ["r"]).unwrap();
    let f = close(&dl("A => exists r . A"));
    let bounds = Bounds { max_nodes: 3, max_parallel: 1, reserved: 1 };
    let gs = sample_models(&f, &alphabet, &bounds, 20, &mut random::rng(3)).unwrap();
    assert_eq!(gs.len(), 20);
    for g in &gs {
        assert_eq!(g.reserved().count() + g.active().len(), 4);
        assert!(check_closed(g, &f).unwrap());
        assert!(check_on_graph(g, &dl("A => exists r . A")).unwrap());
    }
}

/// `g ⊨ wp(α, Q)` implies `g[α] ⊨ Q` on random action sequences.
#[test]
fn wp_of_actions_is_sufficient() {
    let alphabet = random::small_alphabet();
    let shape = FormulaShape { depth: 3, ..FormulaShape::default() };
    let mut rng = random::rng(21);
    let mut checked = 0;
    while checked < 300 {
        let g = random::random_graph(&mut rng, &alphabet, &random::GraphShape::default());
        let mut alpha = Vec::new();
        let mut cur = g.clone();
        for _ in 0..rng.gen_range(0..=4) {
            let kind = ACTION_KINDS.choose(&mut rng).unwrap();
            if let Some(a) = random::random_action(&mut rng, &cur, kind) {
                if let Ok(next) = apply_sequence(&cur, std::slice::from_ref(&a)) {
                    cur = next;
                    alpha.push(a);
                }
            }
        }
        let names: Vec<NodeId> = g.universe().iter().cloned().collect();
        let q = if rng.gen_bool(0.5) {
            Formula::Dl(random::random_concept(&mut rng, &alphabet, &names, &shape, 3))
        } else {
            Formula::Fol(random::random_fol(&mut rng, &alphabet, &names, 3))
        };
        let Ok(pre) = eliminate(&wp_action(&alpha, &close(&q))) else { continue };
        if check_closed(&g, &pre).unwrap() {
            assert!(check_on_graph(&cur, &q).unwrap(), "{alpha:?} {q:?}\n{}", g.to_json());
        }
        assert_eq!(check_closed(&g, &pre).unwrap(), check_on_graph(&cur, &q).unwrap());
        checked += 1;
    }
}

#[test]
fn soundness_of_an_empty_strategy() {
    let sp = spec("A", "A", "eps");
    let alphabet = Alphabet::new(["A"], ["r"]).unwrap();
    let mut rng = random::rng(5);
    let report = test_soundness(
        &sp,
        &mut |rng: &mut random::Rng64| {
            Some(random::random_graph(rng, &alphabet, &random::GraphShape::default()))
        },
        &mut rng,
        100,
        50,
    )
    .unwrap();
    assert_eq!(report.sampled, 100);
    assert!(report.checked > 0);
    assert!(report.violations.is_empty());
}

#[test]
fn fresh_nodes_come_from_reserved_ones() {
    let sp = spec("top", "exists r . top", "f");
    let f = correctness_formula(&sp).unwrap();
    let alphabet = Alphabet::new(["A"], ["r"]).unwrap();
    let bounds = Bounds { max_nodes: 2, max_parallel: 1, reserved: sp.reserved_needed() };
    assert_eq!(bounds.reserved, 1);
    for g in sample_models(&f, &alphabet, &bounds, 10, &mut random::rng(9)).unwrap() {
        let rule = &sp.rules["f"];
        for m in find_matches(&g, rule, false).unwrap() {
            let h = crate::rewrite::apply_rule(&g, rule, &m).unwrap();
            assert_eq!(h.universe(), g.universe());
        }
    }
}

#[test]
fn fol_specs_are_closed_over_active_nodes() {
    let pre = parse_formula("exists x . A(x)", LogicKind::Fol).unwrap();
    let mut g = LDGraph::new(Alphabet::new(["A"], Vec::<String>::new()).unwrap());
    g.add_reserved("n0").unwrap();
    assert!(!check_on_graph(&g, &pre).unwrap());
    assert!(!check_closed(&g, &close(&pre)).unwrap());
}
