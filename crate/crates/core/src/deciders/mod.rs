// SPDX-License-Identifier: Apache-2.0
//! Satisfiability, validity and entailment.
//!
//! * EMDL and its fragments: witness functions for the dependence atoms,
//!   star translation and the RML tableau ([`emdl_entails`]).
//! * ML(⋁): resolution of intuitionistic disjunctions ([`mldisj_entails`]).
//! * QPLInc: maximal satisfying subteams ([`maxsub`], [`qplinc_entails`]).
//! * QPLInd and other propositional logics: exhaustive team enumeration
//!   over the joint free variables ([`brute_entails_prop`]).
//! * MLInd, MLInc: bounded model enumeration only ([`brute_entails_modal`]).
//!
//! Validity is entailment from no premises, and satisfiability means
//! satisfiable by a non-empty team.
//!
//! ```
//! use teamlogic::deciders::{emdl_entails, Caps};
//! use teamlogic::parser::parse;
//! let p = |s: &str| parse(s).unwrap();
//! let v = emdl_entails(&[p("=(p,q)"), p("=(q,r)")], &p("=(p,r)"), &Caps::default()).unwrap();
//! assert!(v.answer);
//! ```

mod brute;
mod emdl;
mod maxsub;

use std::str::FromStr;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use thiserror::Error;

use crate::models::{KripkeModel, PropTeam, Team};
use crate::syntax::{classify_all, Formula, Fragment, SyntaxError, Var};
use crate::tableau::TableauError;
use crate::teamcheck::CheckError;
use crate::witness::{WitnessError, WitnessFunction};

pub use brute::{
    brute_entails_modal, brute_entails_prop, brute_sat_modal, brute_sat_prop, brute_sat_rml, brute_valid_modal,
    brute_valid_prop, qplind_entails, qplind_valid, RmlFamily,
};
pub use emdl::{emdl_entails, emdl_sat, emdl_valid, mldisj_entails, mldisj_sat, mldisj_valid, resolutions};
pub use maxsub::{maxsub, qplinc_entails, qplinc_valid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("{0}")]
    Fragment(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Resource limits. Exceeding one yields [`DecideError::Resource`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest number of arguments of a dependence atom.
    pub max_dep_arity: usize,
    /// Largest joint domain for team enumeration.
    pub max_domain: usize,
    /// Model size bound for bounded modal search.
    pub max_worlds: usize,
    /// Largest number of witness (or resolution) tuples examined.
    pub max_tuples: u64,
    /// Worker threads for the outer loops.
    pub jobs: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_dep_arity: 3,
            max_domain: 4,
            max_worlds: 4,
            max_tuples: 1 << 22,
            jobs: 1,
        }
    }
}

impl FromStr for Caps {
    type Err = String;

    /// Comma separated `key=value` pairs over `dep_arity`, `domain`,
    /// `worlds`, `tuples`, `jobs`; unspecified keys keep their defaults.
    ///
    /// ```
    /// use teamlogic::deciders::Caps;
    /// let c: Caps = "domain=3, jobs=2".parse().unwrap();
    /// assert_eq!((c.max_domain, c.jobs, c.max_worlds), (3, 2, 4));
    /// assert!("colour=3".parse::<Caps>().is_err());
    /// ```
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut caps = Caps::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let n: u64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
            match k.trim() {
                "dep_arity" => caps.max_dep_arity = n as usize,
                "domain" => caps.max_domain = n as usize,
                "worlds" => caps.max_worlds = n as usize,
                "tuples" => caps.max_tuples = n,
                "jobs" => caps.jobs = (n as usize).max(1),
                other => return Err(format!("unknown cap `{other}`")),
            }
        }
        Ok(caps)
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A model and team: a countermodel when the answer is negative, a
    /// satisfying model for satisfiability.
    Kripke { model: KripkeModel, team: Team },
    /// A propositional team, in the same roles.
    Team(PropTeam),
    /// Witness functions for the conclusion's dependence atoms under which
    /// it is valid.
    Witnesses(Vec<WitnessFunction>),
    /// A valid ML resolution of the conclusion.
    Resolution(Formula),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecideStats {
    pub tuples: u64,
    pub tableau_calls: u64,
    pub max_depth: usize,
    pub teams: u64,
}

#[derive(Default)]
pub(crate) struct Counters {
    tuples: AtomicU64,
    tableau_calls: AtomicU64,
    max_depth: AtomicUsize,
    teams: AtomicU64,
}

impl Counters {
    pub(crate) fn tuple(&self) {
        self.tuples.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn team(&self) {
        self.teams.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn tableau(&self, s: crate::tableau::TableauStats) {
        self.tableau_calls.fetch_add(s.calls, Ordering::Relaxed);
        self.max_depth.fetch_max(s.max_depth, Ordering::Relaxed);
    }

    pub(crate) fn snapshot(&self) -> DecideStats {
        DecideStats {
            tuples: self.tuples.load(Ordering::Relaxed),
            tableau_calls: self.tableau_calls.load(Ordering::Relaxed),
            max_depth: self.max_depth.load(Ordering::Relaxed),
            teams: self.teams.load(Ordering::Relaxed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    /// False when the answer only covers models up to a size bound.
    pub exact: bool,
    pub witness: Option<Witness>,
    pub stats: DecideStats,
}

impl Verdict {
    pub(crate) fn new(answer: bool, witness: Option<Witness>, stats: DecideStats) -> Self {
        Verdict {
            answer,
            exact: true,
            witness,
            stats,
        }
    }
}

/// Which question to ask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sat,
    Valid,
    Entail,
}

/// Which procedure answers it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Oracle {
    /// The complete decider of the fragment.
    #[default]
    Auto,
    /// Exhaustive enumeration: teams over the joint free variables for
    /// propositional logics, models up to `bound` worlds for modal ones.
    Brute { bound: Option<usize> },
}

pub(crate) fn check_fragment(fs: &[&Formula], frag: Fragment, what: &str) -> Result<(), DecideError> {
    for f in fs {
        if !frag.admits(f) {
            return Err(DecideError::Fragment(format!("{what} expects {frag} formulas, got {f}")));
        }
    }
    Ok(())
}

pub(crate) fn joint_domain(fs: &[&Formula], caps: &Caps) -> Result<Vec<Var>, DecideError> {
    let mut vars = std::collections::BTreeSet::new();
    for f in fs {
        vars.extend(f.free_vars());
    }
    if vars.len() > caps.max_domain {
        return Err(DecideError::Resource(format!(
            "{} free variables, the cap is {}",
            vars.len(),
            caps.max_domain
        )));
    }
    Ok(vars.into_iter().collect())
}

/// The assignments of a modal team, read as a propositional team over
/// `domain`.
pub fn team_rows(m: &KripkeModel, t: &Team, domain: &[Var]) -> PropTeam {
    let rows = t.iter().map(|w| domain.iter().map(|v| m.holds(v, w).unwrap_or(false)).collect::<Vec<bool>>());
    PropTeam::new(domain.to_vec(), rows).expect("rows match the domain")
}

/// Answers `mode` for the given formulas, routing by the joint fragment
/// (or `logic`, when given).
///
/// ```
/// use teamlogic::deciders::{decide, Caps, Mode, Oracle};
/// use teamlogic::parser::parse;
/// let v = decide(Mode::Valid, &[], &parse("=(p,p)").unwrap(), None, Oracle::Auto, &Caps::default()).unwrap();
/// assert!(v.answer);
/// ```
pub fn decide(
    mode: Mode,
    premises: &[Formula],
    conclusion: &Formula,
    logic: Option<Fragment>,
    oracle: Oracle,
    caps: &Caps,
) -> Result<Verdict, DecideError> {
    let premises: &[Formula] = if mode == Mode::Entail { premises } else { &[] };
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    let frag = match logic {
        Some(f) => {
            check_fragment(&all, f, "the selected logic")?;
            f
        }
        None => match classify_all(all.iter().copied()) {
            Ok(f) => f,
            Err(SyntaxError::MixedFragment(_)) if !all.iter().any(|f| is_modal_syntax(f)) => {
                return match mode {
                    Mode::Sat => brute_sat_prop(conclusion, caps),
                    Mode::Valid => brute_valid_prop(conclusion, caps),
                    Mode::Entail => brute_entails_prop(premises, conclusion, caps),
                };
            }
            Err(e) => return Err(e.into()),
        },
    };
    if frag == Fragment::RML {
        return Err(DecideError::Fragment(
            "RML formulas need relation interpretations; use the tableau directly".into(),
        ));
    }
    if let Oracle::Brute { bound } = oracle {
        if frag.is_modal() {
            let bound = bound.unwrap_or(caps.max_worlds);
            return match mode {
                Mode::Sat => {
                    let found = brute_sat_modal(conclusion, bound)?;
                    let answer = found.is_some();
                    let mut v = Verdict::new(answer, found.map(|(model, team)| Witness::Kripke { model, team }), DecideStats::default());
                    v.exact = answer;
                    Ok(v)
                }
                Mode::Valid => brute_valid_modal(conclusion, bound),
                Mode::Entail => brute_entails_modal(premises, conclusion, bound),
            };
        }
        return match mode {
            Mode::Sat => brute_sat_prop(conclusion, caps),
            Mode::Valid => brute_valid_prop(conclusion, caps),
            Mode::Entail => brute_entails_prop(premises, conclusion, caps),
        };
    }
    match frag {
        Fragment::PL | Fragment::PDL | Fragment::ML | Fragment::MDL | Fragment::EMDL => {
            let v = match mode {
                Mode::Sat => emdl_sat(conclusion, caps)?,
                Mode::Valid => emdl_valid(conclusion, caps)?,
                Mode::Entail => emdl_entails(premises, conclusion, caps)?,
            };
            Ok(if frag.is_modal() { v } else { as_prop(v, &all) })
        }
        Fragment::PLIDisj | Fragment::MLIDisj => {
            let v = match mode {
                Mode::Sat => mldisj_sat(conclusion, caps)?,
                Mode::Valid => mldisj_valid(conclusion, caps)?,
                Mode::Entail => mldisj_entails(premises, conclusion, caps)?,
            };
            Ok(if frag.is_modal() { v } else { as_prop(v, &all) })
        }
        Fragment::PLInc | Fragment::QPL | Fragment::QPLInc => match mode {
            Mode::Sat => brute_sat_prop(conclusion, caps),
            Mode::Valid => qplinc_valid(conclusion, caps),
            Mode::Entail => qplinc_entails(premises, conclusion, caps),
        },
        Fragment::PLInd | Fragment::QPLInd => match mode {
            Mode::Sat => brute_sat_prop(conclusion, caps),
            Mode::Valid => qplind_valid(conclusion, caps),
            Mode::Entail => qplind_entails(premises, conclusion, caps),
        },
        Fragment::QPDL | Fragment::QPLIDisj => match mode {
            Mode::Sat => brute_sat_prop(conclusion, caps),
            Mode::Valid => brute_valid_prop(conclusion, caps),
            Mode::Entail => brute_entails_prop(premises, conclusion, caps),
        },
        Fragment::MLInd | Fragment::MLInc => Err(DecideError::Fragment(format!(
            "{frag} has no complete decider; use the brute-force oracle with a model bound"
        ))),
        Fragment::RML => unreachable!("handled above"),
    }
}

/// Mixed propositional formulas fall back to team enumeration.
fn is_modal_syntax(f: &Formula) -> bool {
    let x = f.features();
    x.nec || x.diamond || x.cneg || x.rel
}

/// Rewrites a modal countermodel of propositional formulas as a team.
fn as_prop(mut v: Verdict, fs: &[&Formula]) -> Verdict {
    if let Some(Witness::Kripke { model, team }) = &v.witness {
        let mut vars = std::collections::BTreeSet::new();
        for f in fs {
            vars.extend(f.free_vars());
        }
        let domain: Vec<Var> = vars.into_iter().collect();
        v.witness = Some(Witness::Team(team_rows(model, team, &domain)));
    }
    v
}
