// SPDX-License-Identifier: Apache-2.0
use super::galliani::inclusion_with;
use super::{dep_of, FreshNames, ReductionError, ReductionOutput};
use crate::adqbf::{AdqbfInstance, Quant, Shape};
use crate::syntax::{Formula, Var};

/// How dependence and inclusion atoms appear in the QPLInd output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QplindForm {
    /// Only independence atoms: `dep(x⃗,y)` as `ind(x⃗;y;y)`, inclusion
    /// atoms through [`super::inclusion_to_independence`].
    #[default]
    Pure,
    /// Dependence and inclusion atoms kept as they are.
    Mixed,
}

struct Setup {
    names: FreshNames,
    qs: Vec<Var>,
    theta: Formula,
}

fn setup(inst: &AdqbfInstance, shape: Shape) -> Result<Setup, ReductionError> {
    if inst.shape != shape {
        return Err(ReductionError::Shape(format!("expected a {shape} instance, got {}", inst.shape)));
    }
    let mut names = FreshNames::default();
    names.reserve(inst.vars());
    let qs: Vec<Var> = inst
        .functions()
        .iter()
        .map(|(_, f)| names.fresh("q", &format!("value of {}", f.name)))
        .collect();
    let theta = inst.matrix_with(&|k| qs[k].clone())?;
    Ok(Setup { names, qs, theta })
}

/// `θ ∨ ⋁ dep(c⃗ᵢ,qᵢ)` over the existential functions.
fn selection(inst: &AdqbfInstance, s: &Setup, dep: &dyn Fn(&[Var], &Var) -> Formula) -> Formula {
    let deps = inst
        .functions()
        .iter()
        .zip(&s.qs)
        .filter(|((q, _), _)| *q == Quant::Exists)
        .map(|((_, f), q)| dep(&f.args, q))
        .collect::<Vec<_>>();
    match Formula::disj(deps) {
        Some(d) => Formula::or(s.theta.clone(), d),
        None => s.theta.clone(),
    }
}

/// A PDL entailment `Σ ⊨ ψ` that holds iff the Π₂ instance is true:
/// `Σ = {dep(c⃗ᵢ,qᵢ)}` over the universal functions and
/// `ψ = θ ∨ ⋁ dep(c⃗ᵢ,qᵢ)` over the existential ones, where `θ` is the matrix
/// with each application of the `i`-th function replaced by a fresh `qᵢ`.
///
/// ```
/// use teamlogic::adqbf::AdqbfInstance;
/// use teamlogic::reductions::adqbf_pi2_to_pdl_entailment;
/// let inst = AdqbfInstance::from_json(r#"{"shape":"pi2","n":1,
///   "blocks":[{"q":"A","fns":[{"name":"f","args":["p1"]}]},{"q":"E","fns":[{"name":"g","args":["p1"]}]}],
///   "matrix":"f(p1) & g(p1) | !f(p1) & !g(p1)"}"#).unwrap();
/// let out = adqbf_pi2_to_pdl_entailment(&inst).unwrap();
/// assert_eq!(out.sigma_text(), "=(p1,q_1)\n");
/// assert_eq!(out.psi_text(), "q_1 & q_2 | !q_1 & !q_2 | =(p1,q_2)\n");
/// ```
pub fn adqbf_pi2_to_pdl_entailment(inst: &AdqbfInstance) -> Result<ReductionOutput, ReductionError> {
    let s = setup(inst, Shape::Pi(2))?;
    let premises = inst
        .functions()
        .iter()
        .zip(&s.qs)
        .filter(|((q, _), _)| *q == Quant::Forall)
        .map(|((_, f), q)| dep_of(&f.args, q))
        .collect();
    let conclusion = selection(inst, &s, &dep_of);
    Ok(ReductionOutput {
        premises,
        conclusion,
        fresh: s.names.issued().clone(),
    })
}

/// A QPLInd formula that is valid iff the Π₂ instance is true. Each
/// universal function `fᵢ` contributes a layer
///
/// `∃rᵢ(dep(c⃗ᵢqᵢ,rᵢ) ∧ dep(c⃗ᵢrᵢ,qᵢ) ∧ ∀r′ᵢ(¬r′ᵢ ∨ (r′ᵢ ∧ c⃗ᵢr′ᵢ ⊆ c⃗ᵢrᵢ)) ∧ (¬rᵢ ∨ (rᵢ ∧ ψᵢ₊₁)))`
///
/// that keeps a maximal subteam satisfying `dep(c⃗ᵢ,qᵢ)`; the innermost
/// formula is `θ ∨ ⋁ dep(c⃗ᵢ,qᵢ)` over the existential functions.
pub fn adqbf_to_qplind_validity(inst: &AdqbfInstance, form: QplindForm) -> Result<ReductionOutput, ReductionError> {
    let mut s = setup(inst, Shape::Pi(2))?;
    let dep = |xs: &[Var], y: &Var| match form {
        QplindForm::Pure => Formula::ind(xs.to_vec(), vec![y.clone()], vec![y.clone()]),
        QplindForm::Mixed => dep_of(xs, y),
    };
    let mut psi = selection(inst, &s, &dep);
    let universal: Vec<(Vec<Var>, Var, String)> = inst
        .functions()
        .iter()
        .zip(&s.qs)
        .filter(|((q, _), _)| *q == Quant::Forall)
        .map(|((_, f), q)| (f.args.clone(), q.clone(), f.name.clone()))
        .collect();
    let layers: Vec<(Var, Var)> = universal
        .iter()
        .map(|(_, _, name)| {
            let r = s.names.fresh("r", &format!("kept rows for {name}"));
            let rp = s.names.fresh("rp", &format!("maximality probe for {name}"));
            (r, rp)
        })
        .collect();
    for ((c, q, _), (r, rp)) in universal.iter().zip(&layers).rev() {
        let with = |x: &Var| c.iter().cloned().chain([x.clone()]).collect::<Vec<_>>();
        let inc = match form {
            QplindForm::Pure => inclusion_with(&mut s.names, &with(rp), &with(r))?,
            QplindForm::Mixed => Formula::inc(with(rp), with(r)),
        };
        let maximal = Formula::forall(
            rp.clone(),
            Formula::or(Formula::NegAtom(rp.clone()), Formula::and(Formula::Atom(rp.clone()), inc)),
        );
        let rest = Formula::or(Formula::NegAtom(r.clone()), Formula::and(Formula::Atom(r.clone()), psi));
        let body = Formula::and(Formula::and(Formula::and(dep(&with(q), r), dep(&with(r), q)), maximal), rest);
        psi = Formula::exists(r.clone(), body);
    }
    Ok(ReductionOutput {
        premises: Vec::new(),
        conclusion: psi,
        fresh: s.names.issued().clone(),
    })
}

/// A QPLInc entailment `{φ₁, φ₂} ⊨ ψ` that holds iff the Σ₁ instance is
/// false. With fresh `t`, `f`:
///
/// * `φ₁ = t ∧ ¬f` and `φ₂ = ⋀ᵢ (p₁…pᵢ₋₁t ⊆ p₁…pᵢ₋₁pᵢ ∧ p₁…pᵢ₋₁f ⊆ p₁…pᵢ₋₁pᵢ)`
///   make every team complete over `p⃗`;
/// * `ψ = ∃p⃗′q⃗′(θ^⊥(p⃗′q⃗′/p⃗q⃗) ∧ p⃗′q⃗′ ⊆ p⃗q⃗) ∨ ⋁ᵢ ∃v⃗ᵢ(v⃗ᵢt ⊆ c⃗ᵢqᵢ ∧ v⃗ᵢf ⊆ c⃗ᵢqᵢ)`
///   says some row falsifies `θ` or some `qᵢ` is not a function of `c⃗ᵢ`.
///
/// ```
/// use teamlogic::adqbf::AdqbfInstance;
/// use teamlogic::reductions::adqbf_sigma1_complement_to_qplinc_entailment;
/// let inst = AdqbfInstance::from_json(r#"{"shape":"sigma1","n":1,
///   "blocks":[{"q":"E","fns":[{"name":"g","args":["p1"]}]}],"matrix":"p1 | g(p1)"}"#).unwrap();
/// let out = adqbf_sigma1_complement_to_qplinc_entailment(&inst).unwrap();
/// assert_eq!(out.sigma_text(), "t_1 & !f_1\ninc(t_1,p1) & inc(f_1,p1)\n");
/// assert!(out.psi_text().starts_with("(E pp_1 . E qq_1 . !pp_1 & !qq_1 & inc(pp_1 qq_1,p1 q_1)"));
/// ```
pub fn adqbf_sigma1_complement_to_qplinc_entailment(inst: &AdqbfInstance) -> Result<ReductionOutput, ReductionError> {
    let mut s = setup(inst, Shape::Sigma(1))?;
    let t = s.names.fresh("t", "constant true");
    let f = s.names.fresh("f", "constant false");
    let ps = inst.vars();
    let phi1 = Formula::and(Formula::Atom(t.clone()), Formula::NegAtom(f.clone()));
    let mut premises = vec![phi1];
    let complete = (0..ps.len()).map(|i| {
        let prefix = |x: &Var| ps[..i].iter().cloned().chain([x.clone()]).collect::<Vec<_>>();
        Formula::and(Formula::inc(prefix(&t), prefix(&ps[i])), Formula::inc(prefix(&f), prefix(&ps[i])))
    });
    premises.extend(Formula::conj(complete));

    let pc: Vec<Var> = ps.iter().map(|p| s.names.fresh("pp", &format!("copy of {}", p.name()))).collect();
    let qc: Vec<Var> = s.qs.iter().map(|q| s.names.fresh("qq", &format!("copy of {}", q.name()))).collect();
    let from: Vec<Var> = ps.iter().chain(&s.qs).cloned().collect();
    let to: Vec<Var> = pc.iter().chain(&qc).cloned().collect();
    let falsified = s
        .theta
        .negate_nnf()?
        .rename_free(&|v| from.iter().position(|x| x == v).map(|k| to[k].clone()));
    let bad_row = to.iter().rev().fold(
        Formula::and(falsified, Formula::inc(to.clone(), from.clone())),
        |acc, v| Formula::exists(v.clone(), acc),
    );
    let fns = inst.functions();
    let mut disjuncts = vec![bad_row];
    for ((_, g), q) in fns.iter().zip(&s.qs) {
        let vs: Vec<Var> = g.args.iter().map(|_| s.names.fresh("v", &format!("clashing argument of {}", g.name))).collect();
        let with = |xs: &[Var], y: &Var| xs.iter().cloned().chain([y.clone()]).collect::<Vec<_>>();
        let clash = Formula::and(
            Formula::inc(with(&vs, &t), with(&g.args, q)),
            Formula::inc(with(&vs, &f), with(&g.args, q)),
        );
        disjuncts.push(vs.iter().rev().fold(clash, |acc, v| Formula::exists(v.clone(), acc)));
    }
    let conclusion = Formula::disj(disjuncts).expect("nonempty");
    Ok(ReductionOutput {
        premises,
        conclusion,
        fresh: s.names.issued().clone(),
    })
}
