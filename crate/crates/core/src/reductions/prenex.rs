// SPDX-License-Identifier: Apache-2.0
use std::collections::BTreeSet;

use super::{FreshNames, ReductionError};
use crate::models::PropTeam;
use crate::syntax::{Formula, Var};
use crate::teamcheck::{check_prop_with, CheckError, CheckOptions};

/// Largest number of free variables for which a rewrite is checked.
const VERIFY_VARS: usize = 3;
const VERIFY_STEPS: u64 = 5_000_000;

/// One applied rewrite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrenexStep {
    pub rule: &'static str,
    pub before: Formula,
    pub after: Formula,
}

struct Prenexer {
    names: FreshNames,
    steps: Vec<PrenexStep>,
}

/// A prenex form `Q₁p₁…Qₙpₙ ψ` of a propositional formula, with the applied
/// rewrites. Bound variables are renamed apart first. Every rewrite is
/// checked for equivalence on all teams over its free variables; a rewrite
/// over more than three free variables cannot be checked and is reported as
/// an error.
///
/// ```
/// use teamlogic::parser::parse;
/// use teamlogic::reductions::prenex;
/// let (f, steps) = prenex(&parse("(E p . p & =(q)) & q").unwrap()).unwrap();
/// assert_eq!(f.to_string(), "E p . p & =(q) & q");
/// assert_eq!(steps.len(), 1);
/// ```
pub fn prenex(phi: &Formula) -> Result<(Formula, Vec<PrenexStep>), ReductionError> {
    let mut p = Prenexer {
        names: FreshNames::avoiding([phi]),
        steps: Vec::new(),
    };
    let apart = p.rename_apart(phi, &mut phi.free_vars());
    let out = p.norm(&apart)?;
    Ok((out, p.steps))
}

fn split(f: &Formula) -> Option<(bool, &Var, &Formula)> {
    match f {
        Formula::Exists(v, b) => Some((true, v, b)),
        Formula::Forall(v, b) => Some((false, v, b)),
        _ => None,
    }
}

fn quant(exists: bool, v: Var, body: Formula) -> Formula {
    if exists {
        Formula::exists(v, body)
    } else {
        Formula::forall(v, body)
    }
}

impl Prenexer {
    fn rename_apart(&mut self, f: &Formula, seen: &mut BTreeSet<Var>) -> Formula {
        if let Some((e, v, body)) = split(f) {
            let (v2, body2) = if seen.contains(v) {
                let fresh = self.names.fresh(v.name(), "renamed bound variable");
                (fresh.clone(), body.rename_free(&|w| (w == v).then(|| fresh.clone())))
            } else {
                (v.clone(), body.clone())
            };
            seen.insert(v2.clone());
            let inner = self.rename_apart(&body2, seen);
            return quant(e, v2, inner);
        }
        match f {
            Formula::And(a, b) => Formula::and(self.rename_apart(a, seen), self.rename_apart(b, seen)),
            Formula::Or(a, b) => Formula::or(self.rename_apart(a, seen), self.rename_apart(b, seen)),
            Formula::IDisj(a, b) => Formula::idisj(self.rename_apart(a, seen), self.rename_apart(b, seen)),
            other => other.clone(),
        }
    }

    fn norm(&mut self, f: &Formula) -> Result<Formula, ReductionError> {
        if let Some((e, v, body)) = split(f) {
            return Ok(quant(e, v.clone(), self.norm(body)?));
        }
        match f {
            Formula::And(a, b) => {
                let (a, b) = (self.norm(a)?, self.norm(b)?);
                self.and_pull(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.norm(a)?, self.norm(b)?);
                self.or_pull(a, b)
            }
            Formula::IDisj(a, b) => {
                let (a, b) = (self.norm(a)?, self.norm(b)?);
                self.idisj_pull(a, b)
            }
            Formula::Box(_) | Formula::Diamond(_) | Formula::CNeg(_) | Formula::Rel(..) => {
                Err(ReductionError::Fragment(format!("prenex expects a propositional formula, got {f}")))
            }
            other => Ok(other.clone()),
        }
    }

    fn and_pull(&mut self, a: Formula, b: Formula) -> Result<Formula, ReductionError> {
        if let Some((e, v, psi)) = split(&a) {
            let (v, psi) = (v.clone(), psi.clone());
            self.step("(Qp ψ) ∧ χ → Qp (ψ ∧ χ)", Formula::and(a.clone(), b.clone()), quant(e, v.clone(), Formula::and(psi.clone(), b.clone())))?;
            return Ok(quant(e, v, self.and_pull(psi, b)?));
        }
        if let Some((e, v, psi)) = split(&b) {
            let (v, psi) = (v.clone(), psi.clone());
            self.step("χ ∧ (Qp ψ) → Qp (χ ∧ ψ)", Formula::and(a.clone(), b.clone()), quant(e, v.clone(), Formula::and(a.clone(), psi.clone())))?;
            return Ok(quant(e, v, self.and_pull(a, psi)?));
        }
        Ok(Formula::and(a, b))
    }

    fn or_pull(&mut self, a: Formula, b: Formula) -> Result<Formula, ReductionError> {
        let before = Formula::or(a.clone(), b.clone());
        if let Some((e, v, psi)) = split(&a) {
            let (v, psi) = (v.clone(), psi.clone());
            if e {
                self.step("(∃p ψ) ∨ χ → ∃p (ψ ∨ χ)", before, Formula::exists(v.clone(), Formula::or(psi.clone(), b.clone())))?;
                return Ok(Formula::exists(v, self.or_pull(psi, b)?));
            }
            let s = self.names.fresh("s", "side of a split disjunction");
            let (pos, neg) = (Formula::Atom(s.clone()), Formula::NegAtom(s.clone()));
            let after = Formula::exists(
                s.clone(),
                Formula::forall(
                    v.clone(),
                    Formula::or(Formula::and(pos.clone(), psi.clone()), Formula::and(neg.clone(), b.clone())),
                ),
            );
            self.step("(∀p ψ) ∨ χ → ∃s ∀p ((s ∧ ψ) ∨ (¬s ∧ χ))", before, after)?;
            let left = self.and_pull(pos, psi)?;
            let right = self.and_pull(neg, b)?;
            return Ok(Formula::exists(s, Formula::forall(v, self.or_pull(left, right)?)));
        }
        if let Some((e, v, psi)) = split(&b) {
            let (v, psi) = (v.clone(), psi.clone());
            if e {
                self.step("χ ∨ (∃p ψ) → ∃p (χ ∨ ψ)", before, Formula::exists(v.clone(), Formula::or(a.clone(), psi.clone())))?;
                return Ok(Formula::exists(v, self.or_pull(a, psi)?));
            }
            let s = self.names.fresh("s", "side of a split disjunction");
            let (pos, neg) = (Formula::Atom(s.clone()), Formula::NegAtom(s.clone()));
            let after = Formula::exists(
                s.clone(),
                Formula::forall(
                    v.clone(),
                    Formula::or(Formula::and(neg.clone(), a.clone()), Formula::and(pos.clone(), psi.clone())),
                ),
            );
            self.step("χ ∨ (∀p ψ) → ∃s ∀p ((¬s ∧ χ) ∨ (s ∧ ψ))", before, after)?;
            let left = self.and_pull(neg, a)?;
            let right = self.and_pull(pos, psi)?;
            return Ok(Formula::exists(s, Formula::forall(v, self.or_pull(left, right)?)));
        }
        Ok(before)
    }

    fn idisj_pull(&mut self, a: Formula, b: Formula) -> Result<Formula, ReductionError> {
        let before = Formula::idisj(a.clone(), b.clone());
        if let Some((e, v, psi)) = split(&a) {
            let (v, psi) = (v.clone(), psi.clone());
            self.step("(Qp ψ) ⋁ χ → Qp (ψ ⋁ χ)", before, quant(e, v.clone(), Formula::idisj(psi.clone(), b.clone())))?;
            return Ok(quant(e, v, self.idisj_pull(psi, b)?));
        }
        if let Some((e, v, psi)) = split(&b) {
            let (v, psi) = (v.clone(), psi.clone());
            self.step("χ ⋁ (Qp ψ) → Qp (χ ⋁ ψ)", before, quant(e, v.clone(), Formula::idisj(a.clone(), psi.clone())))?;
            return Ok(quant(e, v, self.idisj_pull(a, psi)?));
        }
        Ok(before)
    }

    fn step(&mut self, rule: &'static str, before: Formula, after: Formula) -> Result<(), ReductionError> {
        verify(&before, &after).map_err(|m| ReductionError::Prenex(format!("{rule} on {before}: {m}")))?;
        self.steps.push(PrenexStep { rule, before, after });
        Ok(())
    }
}

/// Equivalence on every team over the free variables of `a` and `b`.
pub(crate) fn verify(a: &Formula, b: &Formula) -> Result<(), String> {
    let vars: BTreeSet<Var> = a.free_vars().union(&b.free_vars()).cloned().collect();
    if vars.len() > VERIFY_VARS {
        return Err(format!("{} free variables, rewrites are only checked up to {VERIFY_VARS}", vars.len()));
    }
    let domain: Vec<Var> = vars.into_iter().collect();
    let opts = CheckOptions {
        max_steps: VERIFY_STEPS,
        ..CheckOptions::default()
    };
    let check = |x: &PropTeam, f: &Formula| {
        check_prop_with(x, f, opts).map_err(|e| match e {
            CheckError::Resource(_) => "the equivalence check ran out of steps".to_string(),
            other => other.to_string(),
        })
    };
    for x in PropTeam::all_teams(&domain) {
        if check(&x, a)? != check(&x, b)? {
            return Err(format!("not equivalent on the team {:?}", x.rows().collect::<Vec<_>>()));
        }
    }
    Ok(())
}
