// SPDX-License-Identifier: Apache-2.0
use std::collections::BTreeSet;

use super::{prenex, FreshNames, ReductionError, ReductionOutput};
use crate::syntax::{Formula, Fragment, Var};

/// `(q ∧ □ⁿq) ∨ (¬q ∧ □ⁿ¬q)`: the value of `q` is repeated `n` steps down.
///
/// ```
/// use teamlogic::reductions::store_formula;
/// use teamlogic::syntax::Var;
/// assert_eq!(store_formula(&Var::new("q"), 0).to_string(), "q & q | !q & !q");
/// assert_eq!(store_formula(&Var::new("q"), 2).to_string(), "q & [] [] q | !q & [] [] !q");
/// ```
pub fn store_formula(q: &Var, n: usize) -> Formula {
    let pos = Formula::Atom(q.clone());
    let neg = Formula::NegAtom(q.clone());
    Formula::or(
        Formula::and(pos.clone(), Formula::nec_n(n, pos)),
        Formula::and(neg.clone(), Formula::nec_n(n, neg)),
    )
}

/// `◇p ∧ ◇¬p ∧ □Store(p, n)`: two successors disagreeing on `p`, each
/// keeping its value `n` more steps.
pub fn branch_formula(p: &Var, n: usize) -> Formula {
    Formula::and(
        Formula::and(Formula::diamond(Formula::Atom(p.clone())), Formula::diamond(Formula::NegAtom(p.clone()))),
        Formula::nec(store_formula(p, n)),
    )
}

/// `⋀_{q∈V} Store(q,n) ∧ ⋀_{i<n} □ⁱ Branch(p_{i+1}, n−i−1)`: below every
/// world, the `n`-step successors realise every valuation of `p₁…pₙ` and
/// keep the root values of `V`. Empty conjunctions give `⊤`.
///
/// ```
/// use teamlogic::reductions::tree_formula;
/// use teamlogic::syntax::{Fragment, Var};
/// let t = tree_formula(&[Var::new("q")], &[Var::new("p1"), Var::new("p2")], 2).unwrap();
/// assert_eq!(t.classify().unwrap(), Fragment::ML);
/// ```
pub fn tree_formula(stored: &[Var], p: &[Var], n: usize) -> Result<Formula, ReductionError> {
    let overlap: Vec<String> = stored.iter().filter(|v| p.contains(v)).map(|v| v.name().to_string()).collect();
    if !overlap.is_empty() {
        return Err(ReductionError::Overlap(overlap));
    }
    if p.len() < n {
        return Err(ReductionError::Shape(format!("{} tree variables for depth {n}", p.len())));
    }
    let stores = stored.iter().map(|q| store_formula(q, n));
    let branches = (0..n).map(|i| Formula::nec_n(i, branch_formula(&p[i], n - i - 1)));
    Ok(Formula::conj(stores.chain(branches)).unwrap_or_else(Formula::top))
}

/// Which question a [`qpdl_to_mdl`] output answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Sat,
    Valid,
    Entail,
}

/// Rewrites QPDL formulas into MDL over tree models: each formula is put in
/// prenex form, its bound variables become the shared list `p_1, p_2, …`,
/// shorter prefixes are padded with vacuous `∀`, and `∃`/`∀` become `◇`/`□`.
/// With `φ₁` the translation of the conclusion and `tree` the tree formula
/// over the free variables:
///
/// * sat: `tree ∧ φ₁`;
/// * valid: `tree^⊥ ∨ (tree ∧ φ₁)`, where `tree^⊥` is the classical dual;
/// * entail: premises `θ₁` of each premise plus `tree`, conclusion `φ₁`.
///
/// ```
/// use teamlogic::parser::parse;
/// use teamlogic::reductions::{qpdl_to_mdl, Task};
/// let out = qpdl_to_mdl(Task::Sat, &[], &parse("E p . p & =(p)").unwrap()).unwrap();
/// assert_eq!(out.conclusion.to_string(), "<> p_1 & <> !p_1 & [] (p_1 & p_1 | !p_1 & !p_1) & <> (p_1 & =(p_1))");
/// ```
pub fn qpdl_to_mdl(task: Task, premises: &[Formula], conclusion: &Formula) -> Result<ReductionOutput, ReductionError> {
    let premises: &[Formula] = if task == Task::Entail { premises } else { &[] };
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    for f in &all {
        if !Fragment::QPDL.admits(f) {
            return Err(ReductionError::Fragment(format!("expected a QPDL formula, got {f}")));
        }
    }
    let mut prefixed = Vec::new();
    for f in &all {
        let (g, _) = prenex(f)?;
        let mut prefix = Vec::new();
        let mut body = g;
        loop {
            match body {
                Formula::Exists(v, b) => {
                    prefix.push((true, v));
                    body = *b;
                }
                Formula::Forall(v, b) => {
                    prefix.push((false, v));
                    body = *b;
                }
                other => {
                    body = other;
                    break;
                }
            }
        }
        prefixed.push((prefix, body));
    }
    let m = prefixed.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
    let mut names = FreshNames::avoiding(all.iter().copied());
    let shared: Vec<Var> = (0..m).map(|i| names.fresh("p", &format!("tree level {}", i + 1))).collect();
    let stored: Vec<Var> = all
        .iter()
        .flat_map(|f| f.free_vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let translated: Vec<Formula> = prefixed
        .into_iter()
        .map(|(prefix, body)| {
            let map: Vec<(Var, Var)> = prefix.iter().zip(&shared).map(|((_, v), s)| (v.clone(), s.clone())).collect();
            let renamed = body.rename_free(&|w| map.iter().find(|(v, _)| v == w).map(|(_, s)| s.clone()));
            let mut modal = renamed;
            for i in (0..m).rev() {
                modal = match prefix.get(i) {
                    Some((true, _)) => Formula::diamond(modal),
                    _ => Formula::nec(modal),
                };
            }
            modal
        })
        .collect();
    let tree = tree_formula(&stored, &shared, m)?;
    let (phi1, thetas) = translated.split_last().expect("conclusion present");
    let fresh = names.issued().clone();
    Ok(match task {
        Task::Sat => ReductionOutput {
            premises: Vec::new(),
            conclusion: Formula::and(tree, phi1.clone()),
            fresh,
        },
        Task::Valid => ReductionOutput {
            premises: Vec::new(),
            conclusion: Formula::or(tree.negate_nnf()?, Formula::and(tree, phi1.clone())),
            fresh,
        },
        Task::Entail => ReductionOutput {
            premises: thetas.iter().cloned().chain([tree]).collect(),
            conclusion: phi1.clone(),
            fresh,
        },
    })
}
