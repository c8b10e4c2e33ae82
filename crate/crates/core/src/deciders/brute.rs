// SPDX-License-Identifier: Apache-2.0
//! Exhaustive oracles: all teams over the free variables for propositional
//! logics, all small models for modal ones.

use super::{joint_domain, Caps, Counters, DecideError, DecideStats, Verdict, Witness};
use crate::models::{KripkeModel, PropTeam, Team};
use crate::syntax::{classify_all, Formula, Fragment, Var};
use crate::tableau::TableOracle;
use crate::teamcheck::{check_modal, check_prop, check_rml_pointed};

/// Accepts any mix of propositional team atoms and quantifiers.
fn propositional(fs: &[&Formula]) -> Result<(), DecideError> {
    for f in fs {
        let x = f.features();
        if x.nec || x.diamond || x.cneg || x.rel {
            return Err(DecideError::Fragment(format!(
                "the team enumeration oracle expects propositional formulas, got {f}"
            )));
        }
    }
    Ok(())
}

/// `Σ ⊨ φ` by checking every team over the joint free variables. A negative
/// answer carries a countermodel with no redundant rows.
///
/// ```
/// use teamlogic::deciders::{brute_entails_prop, Caps};
/// use teamlogic::parser::parse;
/// let v = brute_entails_prop(&[], &parse("p \\/ !p").unwrap(), &Caps::default()).unwrap();
/// assert!(!v.answer);
/// ```
pub fn brute_entails_prop(premises: &[Formula], conclusion: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    propositional(&all)?;
    let domain = joint_domain(&all, caps)?;
    let counters = Counters::default();
    let bad = |x: &PropTeam| -> Result<bool, DecideError> {
        for p in premises {
            if !check_prop(x, p)? {
                return Ok(false);
            }
        }
        Ok(!check_prop(x, conclusion)?)
    };
    for x in PropTeam::all_teams(&domain) {
        counters.team();
        if bad(&x)? {
            let mut x = x;
            for row in x.rows().cloned().collect::<Vec<_>>() {
                let smaller = x.without_row(&row);
                if bad(&smaller)? {
                    x = smaller;
                }
            }
            return Ok(Verdict::new(false, Some(Witness::Team(x)), counters.snapshot()));
        }
    }
    Ok(Verdict::new(true, None, counters.snapshot()))
}

pub fn brute_valid_prop(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    brute_entails_prop(&[], phi, caps)
}

/// Satisfiability by a non-empty team over the free variables.
pub fn brute_sat_prop(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    propositional(&[phi])?;
    let domain = joint_domain(&[phi], caps)?;
    let counters = Counters::default();
    for x in PropTeam::all_teams(&domain).filter(|x| !x.is_empty()) {
        counters.team();
        if check_prop(&x, phi)? {
            return Ok(Verdict::new(true, Some(Witness::Team(x)), counters.snapshot()));
        }
    }
    Ok(Verdict::new(false, None, counters.snapshot()))
}

/// QPLInd, with dependence atoms admitted as abbreviations of independence
/// atoms.
fn qplind_check(fs: &[&Formula]) -> Result<(), DecideError> {
    let mut allowed = Fragment::QPLInd.allowed();
    allowed.dep = true;
    for f in fs {
        if !f.features().within(allowed) {
            return Err(DecideError::Fragment(format!("the QPLInd decider expects QPLInd formulas, got {f}")));
        }
    }
    Ok(())
}

/// `Σ ⊨ φ` for QPLInd: every team over the joint free variables satisfying
/// the premises satisfies the conclusion.
pub fn qplind_entails(premises: &[Formula], conclusion: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    qplind_check(&all)?;
    brute_entails_prop(premises, conclusion, caps)
}

pub fn qplind_valid(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    qplind_entails(&[], phi, caps)
}

const MAX_BOUND: usize = 5;

/// Models with `1..=bound` worlds over `vars`. Teams are the leading worlds
/// `{0..t}`, which loses nothing up to renumbering; models with worlds not
/// reachable from the team are skipped, as smaller models cover them.
struct Models {
    vars: Vec<Var>,
    bound: usize,
}

impl Models {
    fn new(fs: &[&Formula], bound: usize) -> Result<Self, DecideError> {
        if bound > MAX_BOUND {
            return Err(DecideError::Resource(format!("model bound {bound}, the cap is {MAX_BOUND}")));
        }
        let mut vars = std::collections::BTreeSet::new();
        for f in fs {
            vars.extend(f.vars());
        }
        if vars.len() > 4 {
            return Err(DecideError::Resource(format!("{} variables, the cap is 4", vars.len())));
        }
        Ok(Models {
            vars: vars.into_iter().collect(),
            bound,
        })
    }

    /// Calls `f(model, team)` for every model and team `{0..t}` with
    /// `t <= max_team`; stops at the first `Some`.
    fn search<T>(
        &self,
        max_team: usize,
        counters: &Counters,
        mut f: impl FnMut(&KripkeModel, &Team) -> Result<Option<T>, DecideError>,
    ) -> Result<Option<T>, DecideError> {
        let k = self.vars.len();
        for n in 1..=self.bound {
            for edges in 0..1u64 << (n * n) {
                let mut frame = KripkeModel::new(n);
                for i in 0..n * n {
                    if edges >> i & 1 == 1 {
                        frame.add_edge(i / n, i % n).expect("in range");
                    }
                }
                for t in 1..=n.min(max_team) {
                    let team: Team = (0..t).collect();
                    if frame.reachable_part(&team).0.worlds() != n {
                        continue;
                    }
                    for val in 0..1u64 << (n * k) {
                        let mut m = frame.clone();
                        for (j, v) in self.vars.iter().enumerate() {
                            let ws = (0..n).filter(|w| val >> (j * n + w) & 1 == 1);
                            m.set_true_at(v.clone(), ws).expect("in range");
                        }
                        counters.team();
                        if let Some(x) = f(&m, &team)? {
                            return Ok(Some(x));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

fn downward_closed(phi: &Formula) -> bool {
    phi.paths().iter().all(|(_, f)| !matches!(f, Formula::Inc { .. } | Formula::Ind { .. }))
}

fn modal_check(fs: &[&Formula]) -> Result<(), DecideError> {
    let frag = classify_all(fs.iter().copied())?;
    if frag == Fragment::RML || frag.allowed().quant {
        return Err(DecideError::Fragment(format!("the model enumeration oracle does not handle {frag}")));
    }
    Ok(())
}

/// A model of at most `bound` worlds and a non-empty team satisfying `phi`.
///
/// ```
/// use teamlogic::deciders::brute_sat_modal;
/// use teamlogic::parser::parse;
/// assert!(brute_sat_modal(&parse("p & !p").unwrap(), 3).unwrap().is_none());
/// let (m, t) = brute_sat_modal(&parse("<> p & <> !p").unwrap(), 3).unwrap().unwrap();
/// assert!(m.worlds() >= 2 && t.len() == 1);
/// ```
pub fn brute_sat_modal(phi: &Formula, bound: usize) -> Result<Option<(KripkeModel, Team)>, DecideError> {
    modal_check(&[phi])?;
    let models = Models::new(&[phi], bound)?;
    let max_team = if downward_closed(phi) { 1 } else { bound };
    models.search(max_team, &Counters::default(), |m, t| {
        Ok(check_modal(m, t, phi)?.then(|| (m.clone(), t.clone())))
    })
}

/// `Σ ⊨ φ` over models of at most `bound` worlds. A positive answer is
/// marked inexact; a negative one carries a countermodel.
pub fn brute_entails_modal(premises: &[Formula], conclusion: &Formula, bound: usize) -> Result<Verdict, DecideError> {
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    modal_check(&all)?;
    let models = Models::new(&all, bound)?;
    let counters = Counters::default();
    let found = models.search(bound, &counters, |m, t| {
        for p in premises {
            if !check_modal(m, t, p)? {
                return Ok(None);
            }
        }
        Ok((!check_modal(m, t, conclusion)?).then(|| (m.clone(), t.clone())))
    })?;
    let stats: DecideStats = counters.snapshot();
    Ok(match found {
        Some((model, team)) => Verdict::new(false, Some(Witness::Kripke { model, team }), stats),
        None => {
            let mut v = Verdict::new(true, None, stats);
            v.exact = false;
            v
        }
    })
}

pub fn brute_valid_modal(phi: &Formula, bound: usize) -> Result<Verdict, DecideError> {
    brute_entails_modal(&[], phi, bound)
}

/// Which frames [`brute_sat_rml`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmlFamily {
    /// Trees rooted at the evaluation world.
    Tree,
    /// All frames, evaluated at world 0.
    All,
}

/// A pointed model of at most `bound` worlds satisfying the RML formula
/// `phi`, relation symbols read from `oracle`.
pub fn brute_sat_rml(
    phi: &Formula,
    oracle: &TableOracle,
    bound: usize,
    family: RmlFamily,
) -> Result<Option<(KripkeModel, usize)>, DecideError> {
    if bound > MAX_BOUND {
        return Err(DecideError::Resource(format!("model bound {bound}, the cap is {MAX_BOUND}")));
    }
    let vars: Vec<Var> = phi.vars().into_iter().collect();
    let k = vars.len();
    if k > 4 {
        return Err(DecideError::Resource(format!("{k} variables, the cap is 4")));
    }
    for n in 1..=bound {
        let frames: Box<dyn Iterator<Item = KripkeModel>> = match family {
            RmlFamily::Tree => Box::new(trees(n)),
            RmlFamily::All => Box::new((0..1u64 << (n * n)).map(move |edges| {
                let mut m = KripkeModel::new(n);
                for i in 0..n * n {
                    if edges >> i & 1 == 1 {
                        m.add_edge(i / n, i % n).expect("in range");
                    }
                }
                m
            })),
        };
        for frame in frames {
            let mut frame = frame;
            for (s, r) in oracle.relations() {
                frame.set_relation(*s, r.clone());
            }
            for val in 0..1u64 << (n * k) {
                let mut m = frame.clone();
                for (j, v) in vars.iter().enumerate() {
                    let ws = (0..n).filter(|w| val >> (j * n + w) & 1 == 1);
                    m.set_true_at(v.clone(), ws).expect("in range");
                }
                if check_rml_pointed(&m, 0, phi)? {
                    return Ok(Some((m, 0)));
                }
            }
        }
    }
    Ok(None)
}

/// Trees on `n` worlds rooted at 0 with every parent numbered below its
/// children.
fn trees(n: usize) -> impl Iterator<Item = KripkeModel> {
    let count: usize = (1..n).product();
    (0..count).map(move |mut code| {
        let mut m = KripkeModel::new(n);
        for child in 1..n {
            let parent = code % child;
            code /= child;
            m.add_edge(parent, child).expect("in range");
        }
        m
    })
}
