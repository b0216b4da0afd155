use super::*;
use crate::fixtures;
use crate::graph::{Alphabet, CloneParams, NodeId};
use crate::logic::{eval_concept, Role};
use crate::random::{self, FormulaShape, GraphShape};
use crate::syntax::{parse_concept, parse_fol};

fn dl_out(text: &str) -> String {
    eliminate_dl(&parse_concept(text).unwrap()).unwrap().to_string()
}

fn fol_out(text: &str) -> String {
    eliminate_fol(&parse_fol(text).unwrap()).unwrap().to_string()
}

#[test]
fn dl_rule_examples() {
    assert_eq!(dl_out("C0[add_C(i, C0)]"), "C0 or {i}");
    assert_eq!(dl_out("top[mrg(i, j)]"), "top");
    assert_eq!(dl_out("Active[mrg(i, j)]"), "Active and not {j}");
    assert_eq!(dl_out("C0[del_C(i, C0)]"), "C0 and not {i}");
    // Corrected readings of the listing.
    assert_eq!(dl_out("C0[del_N(i)]"), "C0 and not {i}");
    assert_eq!(dl_out("Active[add_N(i)]"), "Active or {i}");
}

#[test]
fn fol_rule_examples() {
    assert_eq!(fol_out("forall x . Active(x)[add_N(i)]"), "forall x . (Active(x) or i = x)");
    assert_eq!(
        fol_out("forall x, y . r(x, y)[mrg(i, j)]"),
        "forall x . forall y . (x != j and y != j and (r(x,y) or r(x,j) and y = i or r(j,y) and x = i or x = i and y = i and r(j,j)))"
    );
    assert_eq!(fol_out("forall x . C(x)[mrg(i, j)]"), "forall x . (x != j and (C(x) or x = i and C(j)))");
    let neg = eliminate_fol(&parse_fol("not (exists x . A(x))[del_C(i, A)]").unwrap()).unwrap();
    assert!(matches!(neg, Fol::Not(_)));
}

/// A clone with the loop family selected: the new node gets a loop only
/// if the original has one.
#[test]
fn clone_loop_case_needs_the_original_loop() {
    let roles = ["r".to_string()].into();
    let p = CloneParams { r_l_l: roles, ..Default::default() };
    let a = ElementaryAction::Clone("i".into(), "j".into(), p);
    let self_r = Concept::ExistsSelf(Role::basic("r"));
    let ours = eliminate_dl(&Concept::subst(self_r.clone(), a.clone())).unwrap();
    assert_eq!(ours.to_string(), "exists r . Self or {j} and exists U . ({i} and exists r . Self)");
    let listed = Concept::or(self_r.clone(), Concept::nominal("j"));
    let mut g = LDGraph::new(Alphabet::new(Vec::<String>::new(), ["r"]).unwrap());
    g.add_node("i", Vec::<String>::new()).unwrap();
    g.add_reserved("j").unwrap();
    let after = apply_elementary(&g, &a).unwrap();
    let truth = eval_concept(&after, &self_r).unwrap();
    assert_eq!(eval_concept(&g, &ours).unwrap(), truth);
    assert_ne!(eval_concept(&g, &listed).unwrap(), truth);
    let without = ElementaryAction::Clone("i".into(), "j".into(), CloneParams::default());
    assert_eq!(eliminate_dl(&Concept::subst(self_r, without)).unwrap().to_string(), "exists r . Self");
}

#[test]
fn merge_example_biconditional() {
    let g = fixtures::merge_graph();
    let c = parse_concept("exists r . exists r . Self").unwrap();
    let a = ElementaryAction::Merge("i".into(), "j".into());
    assert!(check_biconditional(&g, &Formula::Dl(c.clone()), &a).unwrap());
    let after = apply_elementary(&g, &a).unwrap();
    assert!(eval_concept(&after, &c).unwrap().contains(&NodeId::from("i")));
}

#[test]
fn biconditional_examples() {
    let mut g = LDGraph::new(Alphabet::new(["A"], Vec::<String>::new()).unwrap());
    g.add_node("n0", ["A"]).unwrap();
    let a = ElementaryAction::DelConcept("n0".into(), "A".into());
    assert!(check_biconditional(&g, &Formula::Dl(Concept::atomic("A")), &a).unwrap());
    let pre = eliminate_dl(&Concept::subst(Concept::atomic("A"), a)).unwrap();
    assert!(eval_concept(&g, &pre).unwrap().is_empty());
    let mut rng = random::rng(2);
    let alphabet = random::small_alphabet();
    for kind in random::ACTION_KINDS {
        let g = random::random_graph(&mut rng, &alphabet, &GraphShape::default());
        if let Some(a) = random::random_action(&mut rng, &g, kind) {
            assert!(check_biconditional(&g, &Formula::Dl(Concept::Top), &a).unwrap());
            assert!(check_biconditional(&g, &Formula::Fol(Fol::Top), &a).unwrap());
        }
    }
}

#[test]
fn edges_by_id_are_not_substitutable() {
    let c = Concept::subst(Concept::atomic("A"), ElementaryAction::DelEdgeId("e1".into()));
    assert!(matches!(eliminate_dl(&c), Err(SubstError::NotSubstitutable(_))));
    let f = Fol::subst(Fol::Top, ElementaryAction::DelEdgeId("e1".into()));
    assert!(matches!(eliminate_fol(&f), Err(SubstError::NotSubstitutable(_))));
}

#[test]
fn elimination_is_idempotent_and_traced() {
    let mut rng = random::rng(8);
    let alphabet = random::small_alphabet();
    let shape = FormulaShape { depth: 3, ..FormulaShape::default() };
    let small_shape = FormulaShape { depth: 2, max_count: 2, ..FormulaShape::default() };
    for _ in 0..200 {
        let g = random::random_graph(&mut rng, &alphabet, &GraphShape::default());
        let names: Vec<NodeId> = g.universe().iter().cloned().collect();
        let c = random::random_concept(&mut rng, &alphabet, &names, &shape, 3);
        assert_eq!(eliminate_dl(&c).unwrap(), c);
        let f = random::random_fol(&mut rng, &alphabet, &names, 3);
        assert_eq!(eliminate_fol(&f).unwrap(), f);
        let kind = random::ACTION_KINDS[rand::Rng::gen_range(&mut rng, 0..9)];
        let Some(a) = random::random_action(&mut rng, &g, kind) else { continue };
        let Some(b) = random::random_action(&mut rng, &g, kind) else { continue };
        let small = random::random_concept(&mut rng, &alphabet, &names, &small_shape, 2);
        let nested = Concept::subst(Concept::or(Concept::subst(small.clone(), a.clone()), small), b.clone());
        if let Ok((out, trace)) = eliminate_dl_traced(&nested) {
            assert!(!out.has_subst());
            assert_eq!(trace.replay(&nested), Some(out.clone()));
            assert_eq!(eliminate_dl(&out).unwrap(), out);
        }
        let small = random::random_fol(&mut rng, &alphabet, &names, 2);
        let nested = Fol::subst(Fol::and(Fol::subst(small.clone(), a), small), b);
        if let Ok((out, trace)) = eliminate_fol_traced(&nested) {
            assert!(!out.has_subst());
            assert_eq!(trace.replay(&nested), Some(out));
        }
    }
}
