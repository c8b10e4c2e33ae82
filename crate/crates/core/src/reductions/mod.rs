// SPDX-License-Identifier: Apache-2.0
//! Reductions between the logics and from ADQBF.
//!
//! * [`prenex`]: quantifiers to the front, each rewrite checked by team
//!   enumeration.
//! * [`qpdl_to_mdl`]: quantifiers become modalities over a complete binary
//!   assignment tree ([`tree_formula`]).
//! * [`adqbf_pi2_to_pdl_entailment`], [`adqbf_to_qplind_validity`],
//!   [`adqbf_sigma1_complement_to_qplinc_entailment`]: hardness
//!   constructions from ADQBF.
//! * [`inclusion_to_independence`]: inclusion atoms in QPLInd.
//!
//! Introduced variables are named `<role>_<k>` and never clash with the
//! variables of the input.

mod galliani;
mod prenex;
mod qbf;
mod tree;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::adqbf::AdqbfError;
use crate::deciders::DecideError;
use crate::parser::render;
use crate::syntax::{Formula, SyntaxError, Var};

pub use galliani::inclusion_to_independence;
pub use prenex::{prenex, PrenexStep};
pub use qbf::{
    adqbf_pi2_to_pdl_entailment, adqbf_sigma1_complement_to_qplinc_entailment, adqbf_to_qplind_validity, QplindForm,
};
pub use tree::{branch_formula, qpdl_to_mdl, store_formula, tree_formula, Task};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("{0}")]
    Fragment(String),
    #[error("instance shape: {0}")]
    Shape(String),
    #[error("the tree variables {0:?} overlap the stored variables")]
    Overlap(Vec<String>),
    #[error("inclusion atom sides differ in length ({0} and {1})")]
    Length(usize, usize),
    #[error("prenex: {0}")]
    Prenex(String),
    #[error(transparent)]
    Adqbf(#[from] AdqbfError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Hands out variables `<role>_<k>` avoiding every name seen so far.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    used: BTreeSet<Var>,
    issued: BTreeMap<String, String>,
}

impl FreshNames {
    pub fn avoiding<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut used = BTreeSet::new();
        for f in formulas {
            used.extend(f.vars());
        }
        FreshNames {
            used,
            issued: BTreeMap::new(),
        }
    }

    pub fn reserve(&mut self, vars: impl IntoIterator<Item = Var>) {
        self.used.extend(vars);
    }

    /// A new variable for `role`; `note` says what it stands for.
    ///
    /// ```
    /// use teamlogic::reductions::FreshNames;
    /// use teamlogic::syntax::Var;
    /// let mut names = FreshNames::default();
    /// names.reserve([Var::new("q_1")]);
    /// assert_eq!(names.fresh("q", "value of f").name(), "q_2");
    /// assert_eq!(names.fresh("q", "value of g").name(), "q_3");
    /// ```
    pub fn fresh(&mut self, role: &str, note: &str) -> Var {
        let v = (1..)
            .map(|k| Var::new(&format!("{role}_{k}")))
            .find(|v| !self.used.contains(v))
            .expect("unbounded");
        self.used.insert(v.clone());
        self.issued.insert(v.name().to_string(), note.to_string());
        v
    }

    /// Every issued name with its note.
    pub fn issued(&self) -> &BTreeMap<String, String> {
        &self.issued
    }
}

/// The result of a reduction: premises (possibly none), a conclusion, and
/// the introduced variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionOutput {
    #[serde(serialize_with = "texts")]
    pub premises: Vec<Formula>,
    #[serde(serialize_with = "text")]
    pub conclusion: Formula,
    pub fresh: BTreeMap<String, String>,
}

fn text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render(f))
}

fn texts<S: serde::Serializer>(fs: &[Formula], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(fs.iter().map(render))
}

impl ReductionOutput {
    /// Premises, one per line.
    pub fn sigma_text(&self) -> String {
        self.premises.iter().map(|f| render(f) + "\n").collect()
    }

    pub fn psi_text(&self) -> String {
        render(&self.conclusion) + "\n"
    }

    pub fn varmap_json(&self) -> String {
        serde_json::to_string_pretty(&self.fresh).expect("serializable")
    }
}

/// `x ≠ y` as a flat formula.
pub(crate) fn differ(x: &Var, y: &Var) -> Formula {
    Formula::or(
        Formula::and(Formula::Atom(x.clone()), Formula::NegAtom(y.clone())),
        Formula::and(Formula::NegAtom(x.clone()), Formula::Atom(y.clone())),
    )
}

/// `x = y` as a flat formula.
pub(crate) fn agree(x: &Var, y: &Var) -> Formula {
    Formula::or(
        Formula::and(Formula::Atom(x.clone()), Formula::Atom(y.clone())),
        Formula::and(Formula::NegAtom(x.clone()), Formula::NegAtom(y.clone())),
    )
}

/// `dep(xs, y)` over variables.
pub(crate) fn dep_of(xs: &[Var], y: &Var) -> Formula {
    Formula::dep(xs.iter().cloned().map(Formula::Atom).collect(), Formula::Atom(y.clone()))
}

#[cfg(test)]
mod tests;
