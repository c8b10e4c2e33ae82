// SPDX-License-Identifier: Apache-2.0
use std::collections::BTreeSet;

use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::prenex::verify;
use super::*;
use crate::adqbf::{evaluate_adqbf, random_instance, AdqbfInstance, GenParams, Shape};
use crate::deciders::{brute_entails_prop, brute_sat_modal, brute_sat_prop, emdl_entails, emdl_sat, emdl_valid, qplinc_entails, Caps};
use crate::gen::FormulaGen;
use crate::models::{KripkeModel, PropTeam, Team};
use crate::parser::parse;
use crate::syntax::Fragment;
use crate::teamcheck::{check_modal, check_prop};

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn v(s: &str) -> Var {
    Var::new(s)
}

fn caps() -> Caps {
    Caps::default()
}

fn inst(json: &str) -> AdqbfInstance {
    AdqbfInstance::from_json(json).unwrap()
}

fn equivalent_on_teams(a: &Formula, b: &Formula) -> bool {
    let vars: Vec<Var> = a.free_vars().union(&b.free_vars()).cloned().collect();
    let ok = PropTeam::all_teams(&vars).all(|x| check_prop(&x, a).unwrap() == check_prop(&x, b).unwrap());
    ok
}

fn is_prenex(f: &Formula) -> bool {
    match f {
        Formula::Exists(_, b) | Formula::Forall(_, b) => is_prenex(b),
        other => !other.features().quant,
    }
}

#[test]
fn store_and_branch_shapes() {
    assert_eq!(store_formula(&v("q"), 0), f("(q & q) | (!q & !q)"));
    assert_eq!(store_formula(&v("q"), 1), f("(q & [] q) | (!q & [] !q)"));
    assert_eq!(branch_formula(&v("p"), 0), f("<> p & <> !p & [] ((p & p) | (!p & !p))"));
    assert_eq!(branch_formula(&v("p"), 1), f("<> p & <> !p & [] ((p & [] p) | (!p & [] !p))"));
}

#[test]
fn tree_shape() {
    let t = tree_formula(&[v("q")], &[v("p1"), v("p2")], 2).unwrap();
    let want = f("((q & [] [] q) | (!q & [] [] !q)) \
                  & (<> p1 & <> !p1 & [] ((p1 & [] p1) | (!p1 & [] !p1))) \
                  & [] (<> p2 & <> !p2 & [] ((p2 & p2) | (!p2 & !p2)))");
    assert_eq!(t, want);
    assert_eq!(tree_formula(&[], &[], 0).unwrap(), Formula::top());
    assert_eq!(
        tree_formula(&[v("p1")], &[v("p1")], 1),
        Err(ReductionError::Overlap(vec!["p1".into()]))
    );
    assert!(matches!(tree_formula(&[], &[v("p1")], 2), Err(ReductionError::Shape(_))));
}

#[test]
fn tree_is_ml_and_polynomial() {
    let sizes = [(0usize, 1usize, 14usize), (1, 2, 44), (2, 3, 81), (3, 4, 125)];
    for (nv, n, size) in sizes {
        let vs: Vec<Var> = (0..nv).map(|i| Var::new(&format!("q{i}"))).collect();
        let ps: Vec<Var> = (0..n).map(|i| Var::new(&format!("p{i}"))).collect();
        let t = tree_formula(&vs, &ps, n).unwrap();
        assert_eq!(t.classify().unwrap(), Fragment::ML);
        assert_eq!(t.size(), size, "|V|={nv}, n={n}");
        assert!(t.size() <= 8 * (nv * (n + 1) + (n + 1) * (n + 1)) + 8);
    }
}

/// Depth-one trees: a root with up to two children, every valuation.
#[test]
fn tree_depth_one_forces_both_values() {
    let tree = tree_formula(&[], &[v("p")], 1).unwrap();
    for kids in 0..=2usize {
        for val in 0..1u32 << (kids + 1) {
            let mut m = KripkeModel::new(kids + 1);
            for k in 1..=kids {
                m.add_edge(0, k).unwrap();
            }
            m.set_true_at(v("p"), (0..=kids).filter(|w| val >> w & 1 == 1)).unwrap();
            let root = Team::singleton(0);
            if check_modal(&m, &root, &tree).unwrap() {
                let succ = m.successors(&root);
                let values: BTreeSet<bool> = succ.iter().map(|w| m.holds(&v("p"), w).unwrap()).collect();
                assert_eq!(values.len(), 2);
            }
        }
    }
}

#[test]
fn prenex_examples() {
    let already = f("E p . p & =(q)");
    let (out, steps) = prenex(&already).unwrap();
    assert_eq!(out, already);
    assert!(steps.is_empty());

    let (out, steps) = prenex(&f("(E p . p & =(p)) & q")).unwrap();
    assert_eq!(out, f("E p . (p & =(p)) & q"));
    assert_eq!(steps.len(), 1);

    let src = f("(E p . p & q) | (E p . !p & =(q))");
    let (out, _) = prenex(&src).unwrap();
    assert_eq!(out, f("E p . E p_1 . (p & q) | (!p_1 & =(q))"));
    assert!(equivalent_on_teams(&src, &out));
}

#[test]
fn prenex_universal_under_disjunction() {
    let src = f("(A p . =(p,q)) | q");
    let (out, steps) = prenex(&src).unwrap();
    assert!(is_prenex(&out));
    assert_eq!(steps[0].rule, "(∀p ψ) ∨ χ → ∃s ∀p ((s ∧ ψ) ∨ (¬s ∧ χ))");
    assert!(equivalent_on_teams(&src, &out));
}

#[test]
fn prenex_refuses_what_it_cannot_check() {
    let wide = f("(E a . a & b & c) & (E d . d & e)");
    assert!(matches!(prenex(&wide), Err(ReductionError::Prenex(_))));
    assert!(matches!(prenex(&f("[] p")), Err(ReductionError::Fragment(_))));
}

#[test]
fn verify_rejects_a_false_rewrite() {
    assert!(verify(&f("A p . p | q"), &f("q")).is_ok());
    assert!(verify(&f("=(q)"), &f("q")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prenex_is_equivalent(seed in 0u64..1 << 32) {
        let g = FormulaGen::for_fragment(Fragment::QPDL).with_vars(&["p", "q"]).with_max_size(6).with_deps(1, 1);
        let phi = g.generate(&mut ChaCha8Rng::seed_from_u64(seed));
        match prenex(&phi) {
            Ok((out, _)) => {
                prop_assert!(is_prenex(&out));
                prop_assert!(equivalent_on_teams(&phi, &out), "{phi} vs {out}");
            }
            Err(e) => prop_assert!(matches!(e, ReductionError::Prenex(_)), "{e}"),
        }
    }

    #[test]
    fn qpdl_sat_transfers(seed in 0u64..1 << 32) {
        let g = FormulaGen::for_fragment(Fragment::QPDL).with_vars(&["p", "q"]).with_max_size(5).with_deps(1, 1).with_quantifiers(1);
        let phi = g.generate(&mut ChaCha8Rng::seed_from_u64(seed));
        let Ok(out) = qpdl_to_mdl(Task::Sat, &[], &phi) else { return Ok(()) };
        prop_assert_eq!(brute_sat_prop(&phi, &caps()).unwrap().answer, emdl_sat(&out.conclusion, &caps()).unwrap().answer, "{}", phi);
    }
}

#[test]
fn qpdl_examples() {
    let phi = f("A p . =(p)");
    let out = qpdl_to_mdl(Task::Valid, &[], &phi).unwrap();
    assert!(!brute_entails_prop(&[], &phi, &caps()).unwrap().answer);
    assert!(!emdl_valid(&out.conclusion, &caps()).unwrap().answer);

    let phi = f("E p . p & =(p)");
    let out = qpdl_to_mdl(Task::Sat, &[], &phi).unwrap();
    assert!(emdl_sat(&out.conclusion, &caps()).unwrap().answer);
    assert!(brute_sat_modal(&out.conclusion, 3).unwrap().is_some());

    let out = qpdl_to_mdl(Task::Entail, &[f("A p . q")], &f("q")).unwrap();
    assert!(brute_entails_prop(&[f("A p . q")], &f("q"), &caps()).unwrap().answer);
    assert_eq!(out.premises.len(), 2);
    assert!(emdl_entails(&out.premises, &out.conclusion, &caps()).unwrap().answer);
}

#[test]
fn qpdl_rejects_other_fragments() {
    assert!(matches!(qpdl_to_mdl(Task::Sat, &[], &f("E p . inc(p,q)")), Err(ReductionError::Fragment(_))));
    assert!(matches!(qpdl_to_mdl(Task::Sat, &[], &f("<> p")), Err(ReductionError::Fragment(_))));
}

#[test]
fn qpdl_pads_shorter_prefixes() {
    let out = qpdl_to_mdl(Task::Entail, &[f("E p . A r . p | r")], &f("q")).unwrap();
    assert_eq!(out.premises[0], f("<> [] (p_1 | p_2)"));
    assert_eq!(out.conclusion, f("[] [] q"));
    assert_eq!(out.fresh.keys().cloned().collect::<Vec<_>>(), ["p_1", "p_2"]);
}

const PI2_EXAMPLE: &str = r#"{"shape":"pi2","n":1,
  "blocks":[{"q":"A","fns":[{"name":"f","args":["p1"]}]},{"q":"E","fns":[{"name":"g","args":["p1"]}]}],
  "matrix":"f(p1) & g(p1) | !f(p1) & !g(p1)"}"#;

#[test]
fn pi2_example() {
    let i = inst(PI2_EXAMPLE);
    let out = adqbf_pi2_to_pdl_entailment(&i).unwrap();
    assert_eq!(out.premises, vec![f("=(p1,q_1)")]);
    assert_eq!(out.conclusion, f("(q_1 & q_2 | !q_1 & !q_2) | =(p1,q_2)"));
    assert!(evaluate_adqbf(&i).unwrap());
    assert!(brute_entails_prop(&out.premises, &out.conclusion, &caps()).unwrap().answer);
    let json: serde_json::Value = serde_json::from_str(&out.varmap_json()).unwrap();
    assert_eq!(json["q_1"], "value of f");
    assert!(matches!(
        adqbf_sigma1_complement_to_qplinc_entailment(&i),
        Err(ReductionError::Shape(_))
    ));
}

#[test]
fn pi2_trivial_matrix_entails() {
    let i = inst(
        r#"{"shape":"pi2","n":1,"blocks":[{"q":"A","fns":[{"name":"f","args":[]}]},{"q":"E","fns":[]}],
        "matrix":"p1 | !p1"}"#,
    );
    let out = adqbf_pi2_to_pdl_entailment(&i).unwrap();
    assert!(brute_entails_prop(&out.premises, &out.conclusion, &caps()).unwrap().answer);
}

fn small(shape: Shape, n: usize) -> GenParams {
    GenParams {
        shape,
        n,
        functions: 2,
        max_arity: 1,
        matrix_size: 3,
    }
}

#[test]
fn pi2_transfers() {
    for seed in 0..12 {
        let i = random_instance(seed, small(Shape::Pi(2), 1));
        let out = adqbf_pi2_to_pdl_entailment(&i).unwrap();
        let v = brute_entails_prop(&out.premises, &out.conclusion, &caps()).unwrap();
        assert_eq!(evaluate_adqbf(&i).unwrap(), v.answer, "seed {seed}: {}", i.matrix);
    }
}

#[test]
fn fresh_names_avoid_the_source() {
    for seed in 0..8 {
        let i = random_instance(seed, GenParams::default());
        let out = adqbf_to_qplind_validity(&i, QplindForm::Pure).unwrap();
        let source: BTreeSet<String> = i.vars().iter().map(|v| v.name().to_string()).collect();
        assert!(out.fresh.keys().all(|k| !source.contains(k)));
        let free: BTreeSet<String> = out.conclusion.free_vars().iter().map(|v| v.name().to_string()).collect();
        assert!(free.iter().all(|x| source.contains(x) || x.starts_with("q_")));
    }
}

#[test]
fn qplind_without_universal_functions() {
    let i = inst(
        r#"{"shape":"pi2","n":1,"blocks":[{"q":"A","fns":[]},{"q":"E","fns":[{"name":"g","args":["p1"]}]}],
        "matrix":"p1 | g(p1)"}"#,
    );
    let out = adqbf_to_qplind_validity(&i, QplindForm::Mixed).unwrap();
    assert_eq!(out.conclusion, f("p1 | q_1 | =(p1,q_1)"));
    let pure = adqbf_to_qplind_validity(&i, QplindForm::Pure).unwrap();
    assert_eq!(pure.conclusion, f("p1 | q_1 | ind(p1;q_1;q_1)"));
}

#[test]
fn qplind_one_layer_shape() {
    let i = inst(
        r#"{"shape":"pi2","n":1,"blocks":[{"q":"A","fns":[{"name":"f","args":["p1"]}]},{"q":"E","fns":[]}],
        "matrix":"f(p1) | !f(p1)"}"#,
    );
    let out = adqbf_to_qplind_validity(&i, QplindForm::Mixed).unwrap();
    let want = f("E r_1 . =(p1,q_1,r_1) & =(p1,r_1,q_1) \
                  & (A rp_1 . !rp_1 | (rp_1 & inc(p1 rp_1,p1 r_1))) \
                  & (!r_1 | (r_1 & (q_1 | !q_1)))");
    assert_eq!(out.conclusion, want);
    let pure = adqbf_to_qplind_validity(&i, QplindForm::Pure).unwrap();
    assert_eq!(pure.conclusion.classify().unwrap(), Fragment::QPLInd);
    assert!(check_prop(&PropTeam::empty(vec![v("p1"), v("q_1")]), &pure.conclusion).unwrap());
}

/// Validity over every team on the free variables.
fn valid_on_all_teams(phi: &Formula) -> bool {
    let vars: Vec<Var> = phi.free_vars().into_iter().collect();
    let ok = PropTeam::all_teams(&vars).all(|x| check_prop(&x, phi).unwrap());
    ok
}

#[test]
fn qplind_transfers() {
    for seed in 0..10 {
        let i = random_instance(seed, small(Shape::Pi(2), 1));
        let out = adqbf_to_qplind_validity(&i, QplindForm::Mixed).unwrap();
        assert_eq!(evaluate_adqbf(&i).unwrap(), valid_on_all_teams(&out.conclusion), "seed {seed}: {}", i.matrix);
    }
}

#[test]
fn sigma1_examples() {
    let yes = inst(r#"{"shape":"sigma1","n":1,"blocks":[{"q":"E","fns":[{"name":"g","args":["p1"]}]}],"matrix":"g(p1)"}"#);
    let no = inst(
        r#"{"shape":"sigma1","n":1,"blocks":[{"q":"E","fns":[{"name":"g","args":["p1"]}]}],"matrix":"g(p1) & !g(p1)"}"#,
    );
    for (i, truth) in [(yes, true), (no, false)] {
        assert_eq!(evaluate_adqbf(&i).unwrap(), truth);
        let out = adqbf_sigma1_complement_to_qplinc_entailment(&i).unwrap();
        assert_eq!(qplinc_entails(&out.premises, &out.conclusion, &caps()).unwrap().answer, !truth);
    }
}

#[test]
fn sigma1_bad_row_substitution() {
    let i = inst(r#"{"shape":"sigma1","n":1,"blocks":[{"q":"E","fns":[{"name":"g","args":[]}]}],"matrix":"p1 | g()"}"#);
    let out = adqbf_sigma1_complement_to_qplinc_entailment(&i).unwrap();
    let Formula::Or(bad, clash) = &out.conclusion else { panic!("{}", out.conclusion) };
    assert_eq!(**bad, f("E pp_1 . E qq_1 . !pp_1 & !qq_1 & inc(pp_1 qq_1,p1 q_1)"));
    assert_eq!(**clash, f("inc(t_1,q_1) & inc(f_1,q_1)"));
}

#[test]
fn galliani_exhaustive_two_variables() {
    let phi = inclusion_to_independence(&[v("p")], &[v("q")]).unwrap();
    let inc = Formula::inc(vec![v("p")], vec![v("q")]);
    let teams: Vec<PropTeam> = PropTeam::all_teams(&[v("p"), v("q")]).collect();
    assert_eq!(teams.len(), 16);
    for x in &teams {
        assert_eq!(check_prop(x, &inc).unwrap(), check_prop(x, &phi).unwrap(), "{:?}", x.rows().collect::<Vec<_>>());
    }
    let Formula::Forall(a, rest) = &phi else { panic!() };
    let Formula::Forall(b, rest) = &**rest else { panic!() };
    let Formula::Forall(c, body) = &**rest else { panic!() };
    assert_eq!([a.name(), b.name(), c.name()], ["v_1", "v_2", "r_1"]);
    assert!(!body.features().quant);
    assert_eq!(inclusion_to_independence(&[v("p")], &[]), Err(ReductionError::Length(1, 0)));
}

#[test]
fn galliani_arity_two_spot_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vars = [v("p"), v("q"), v("r")];
    for (l, r) in [(["p", "q"], ["q", "r"]), (["p", "p"], ["q", "r"]), (["r", "q"], ["p", "q"])] {
        let left: Vec<Var> = l.iter().map(|s| v(s)).collect();
        let right: Vec<Var> = r.iter().map(|s| v(s)).collect();
        let phi = inclusion_to_independence(&left, &right).unwrap();
        let inc = Formula::inc(left, right);
        for _ in 0..4 {
            let x = crate::gen::random_prop_team(&mut rng, &vars, 2);
            assert_eq!(check_prop(&x, &inc).unwrap(), check_prop(&x, &phi).unwrap());
        }
    }
}

#[test]
fn output_serializes_as_text() {
    let out = adqbf_pi2_to_pdl_entailment(&inst(PI2_EXAMPLE)).unwrap();
    let json = serde_json::to_value(&out).unwrap();
    assert_eq!(json["premises"][0], "=(p1,q_1)");
    assert_eq!(json["conclusion"], out.psi_text().trim_end());
}
