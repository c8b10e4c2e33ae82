// SPDX-License-Identifier: Apache-2.0
//! Model checking under lax team semantics.
//!
//! [`check_modal`] evaluates modal team logics on a team of a Kripke model,
//! [`check_prop`] evaluates quantified propositional team logics on a
//! propositional team. Both implement the clauses literally; the default
//! [`Strategy::Pruned`] additionally cuts the search for splits, successor
//! teams and supplementing functions using flatness and downward closure.

mod modal;
mod prop;
mod split;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::models::{KripkeModel, PropTeam, Team};
use crate::syntax::{Formula, RelSymbol, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("formula node not supported here: {0}")]
    Fragment(String),
    #[error("variable `{0}` has no value")]
    MissingVar(Var),
    #[error("relation {0} is missing or has the wrong arity")]
    Relation(RelSymbol),
    #[error("world {0} is not in the model")]
    World(usize),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

/// How the existential choices of the semantics are searched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Prune with guards, flatness and downward closure.
    #[default]
    Pruned,
    /// Enumerate every split, successor team and supplementing function.
    Definitional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub strategy: Strategy,
    /// Upper bound on recursive evaluation steps.
    pub max_steps: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strategy: Strategy::Pruned,
            max_steps: 200_000_000,
        }
    }
}

impl CheckOptions {
    pub fn definitional() -> Self {
        CheckOptions {
            strategy: Strategy::Definitional,
            ..Self::default()
        }
    }
}

/// `M, T ⊨ φ` for modal team logics (ML, MDL, EMDL, MLInd, MLInc, ML(⋁)).
///
/// ```
/// use teamlogic::models::{KripkeModel, Team};
/// use teamlogic::parser::parse;
/// use teamlogic::syntax::Var;
/// use teamlogic::teamcheck::check_modal;
/// let mut m = KripkeModel::new(2);
/// m.set_true_at(Var::new("p"), [0]).unwrap();
/// m.set_true_at(Var::new("q"), [0, 1]).unwrap();
/// assert!(check_modal(&m, &Team::new([0, 1]), &parse("=(p,q)").unwrap()).unwrap());
/// assert!(!check_modal(&m, &Team::new([0, 1]), &parse("=(q,p)").unwrap()).unwrap());
/// ```
pub fn check_modal(m: &KripkeModel, t: &Team, phi: &Formula) -> Result<bool, CheckError> {
    check_modal_with(m, t, phi, CheckOptions::default())
}

pub fn check_modal_with(m: &KripkeModel, t: &Team, phi: &Formula, opts: CheckOptions) -> Result<bool, CheckError> {
    if let Some(w) = t.iter().find(|&w| w >= m.worlds()) {
        return Err(CheckError::World(w));
    }
    let mut c = modal::ModalChecker::new(m, phi, opts)?;
    let team: Vec<u32> = t.iter().map(|w| w as u32).collect();
    c.check(&team)
}

/// `X ⊨ φ` for quantified propositional team logics (QPL, QPDL, QPLInd,
/// QPLInc, QPL(⋁) and their quantifier-free parts).
///
/// On quantifier-free formulas this agrees with [`check_modal`] on the
/// induced model of `X`.
///
/// ```
/// use teamlogic::parser::{parse, parse_team};
/// use teamlogic::teamcheck::check_prop;
/// let x = parse_team(r#"{"vars":["p","q"],"rows":[[0,0],[1,1]]}"#).unwrap();
/// assert!(check_prop(&x, &parse("=(p,q)").unwrap()).unwrap());
/// assert!(!check_prop(&x, &parse("=(q)").unwrap()).unwrap());
/// assert!(check_prop(&x, &parse("E r . =(r) & inc(q, p)").unwrap()).unwrap());
/// ```
pub fn check_prop(x: &PropTeam, phi: &Formula) -> Result<bool, CheckError> {
    check_prop_with(x, phi, CheckOptions::default())
}

pub fn check_prop_with(x: &PropTeam, phi: &Formula, opts: CheckOptions) -> Result<bool, CheckError> {
    let mut c = prop::PropChecker::new(x.domain(), phi, opts)?;
    c.check(x)
}

/// Classical truth of a relational modal formula at a world. Also accepts
/// the classical ML connectives `!p`, `|`, `<>`.
///
/// ```
/// use teamlogic::models::{KripkeModel, Relation};
/// use teamlogic::parser::parse;
/// use teamlogic::syntax::{RelSymbol, Var};
/// use teamlogic::teamcheck::check_rml_pointed;
/// let mut m = KripkeModel::new(1);
/// m.set_true_at(Var::new("p"), [0]).unwrap();
/// m.set_relation(RelSymbol(0), Relation::new(1, [vec![false]]));
/// assert!(!check_rml_pointed(&m, 0, &parse("S_0(p)").unwrap()).unwrap());
/// assert!(check_rml_pointed(&m, 0, &parse("S_0(~p)").unwrap()).unwrap());
/// ```
pub fn check_rml_pointed(m: &KripkeModel, w: usize, phi: &Formula) -> Result<bool, CheckError> {
    if w >= m.worlds() {
        return Err(CheckError::World(w));
    }
    pointed(m, w, phi)
}

fn pointed(m: &KripkeModel, w: usize, phi: &Formula) -> Result<bool, CheckError> {
    Ok(match phi {
        Formula::Atom(v) => m.holds(v, w).ok_or_else(|| CheckError::MissingVar(v.clone()))?,
        Formula::NegAtom(v) => !m.holds(v, w).ok_or_else(|| CheckError::MissingVar(v.clone()))?,
        Formula::And(a, b) => pointed(m, w, a)? && pointed(m, w, b)?,
        Formula::Or(a, b) => pointed(m, w, a)? || pointed(m, w, b)?,
        Formula::CNeg(a) => !pointed(m, w, a)?,
        Formula::Box(a) => {
            for &v in m.succ(w) {
                if !pointed(m, v, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Diamond(a) => {
            for &v in m.succ(w) {
                if pointed(m, v, a)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Rel(s, args) => {
            let rel = m.relation(*s).ok_or(CheckError::Relation(*s))?;
            if rel.arity != args.len() {
                return Err(CheckError::Relation(*s));
            }
            let tuple = args.iter().map(|a| pointed(m, w, a)).collect::<Result<Vec<bool>, _>>()?;
            rel.contains(&tuple)
        }
        other => return Err(CheckError::Fragment(other.to_string())),
    })
}

/// The truth function `w ↦ w_M(φ)` of ML formulas, read classically.
pub struct TruthFn<'a> {
    model: &'a KripkeModel,
}

impl<'a> TruthFn<'a> {
    pub fn new(model: &'a KripkeModel) -> Self {
        TruthFn { model }
    }

    /// `1` iff `M, {w} ⊨ φ`.
    pub fn eval(&self, w: usize, phi: &Formula) -> Result<bool, CheckError> {
        if !phi.is_modal_classical() {
            return Err(CheckError::Fragment(phi.to_string()));
        }
        check_rml_pointed(self.model, w, phi)
    }

    /// The set of worlds where `φ` holds.
    pub fn extension(&self, phi: &Formula) -> Result<Team, CheckError> {
        let mut out = Team::empty();
        for w in 0..self.model.worlds() {
            if self.eval(w, phi)? {
                out.insert(w);
            }
        }
        Ok(out)
    }
}

/// Classical truth of a QPL formula (atoms, `!`, `&`, `|`, `E`, `A`) under one
/// assignment.
///
/// ```
/// use teamlogic::parser::parse;
/// use teamlogic::syntax::Var;
/// use teamlogic::teamcheck::eval_assignment;
/// let f = parse("A p . p | !p & q").unwrap();
/// assert!(!eval_assignment(&[Var::new("q")], &[false], &f).unwrap());
/// ```
pub fn eval_assignment(domain: &[Var], row: &[bool], phi: &Formula) -> Result<bool, CheckError> {
    let mut env: BTreeMap<Var, bool> = domain.iter().cloned().zip(row.iter().copied()).collect();
    classical(&mut env, phi)
}

fn classical(env: &mut BTreeMap<Var, bool>, phi: &Formula) -> Result<bool, CheckError> {
    let get = |env: &BTreeMap<Var, bool>, v: &Var| env.get(v).copied().ok_or_else(|| CheckError::MissingVar(v.clone()));
    Ok(match phi {
        Formula::Atom(v) => get(env, v)?,
        Formula::NegAtom(v) => !get(env, v)?,
        Formula::And(a, b) => classical(env, a)? && classical(env, b)?,
        Formula::Or(a, b) => classical(env, a)? || classical(env, b)?,
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let saved = env.get(v).copied();
            let mut results = [false; 2];
            for (i, a) in [false, true].into_iter().enumerate() {
                env.insert(v.clone(), a);
                results[i] = classical(env, body)?;
            }
            match saved {
                Some(b) => env.insert(v.clone(), b),
                None => env.remove(v),
            };
            if matches!(phi, Formula::Exists(..)) {
                results[0] || results[1]
            } else {
                results[0] && results[1]
            }
        }
        other => return Err(CheckError::Fragment(other.to_string())),
    })
}
