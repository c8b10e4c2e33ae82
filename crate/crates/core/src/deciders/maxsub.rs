// SPDX-License-Identifier: Apache-2.0
//! Maximal satisfying subteams for quantified inclusion logic.

use std::collections::{BTreeSet, HashSet};

use super::{check_fragment, joint_domain, Caps, Counters, DecideError, Verdict, Witness};
use crate::models::{bits_of, PropTeam};
use crate::syntax::{Formula, Fragment, Var};
use crate::teamcheck::check_prop;

enum Node {
    Lit(usize, bool),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
    Inc(Vec<usize>, Vec<usize>),
}

/// Rows are bit masks over slots; slot `i < domain.len()` holds the `i`-th
/// domain variable, later slots hold quantified variables.
struct Compiler {
    scope: Vec<(Var, usize)>,
    next: usize,
}

impl Compiler {
    fn slot(&self, v: &Var) -> Result<usize, DecideError> {
        self.scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|&(_, s)| s)
            .ok_or_else(|| DecideError::Fragment(format!("variable {} is not in the team's domain", v.name())))
    }

    fn slots(&self, vs: &[Var]) -> Result<Vec<usize>, DecideError> {
        vs.iter().map(|v| self.slot(v)).collect()
    }

    fn compile(&mut self, f: &Formula) -> Result<Node, DecideError> {
        Ok(match f {
            Formula::Atom(v) => Node::Lit(self.slot(v)?, true),
            Formula::NegAtom(v) => Node::Lit(self.slot(v)?, false),
            Formula::And(a, b) => Node::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Inc { left, right } => Node::Inc(self.slots(left)?, self.slots(right)?),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let s = self.next;
                if s >= 64 {
                    return Err(DecideError::Resource("more than 64 variables in scope".into()));
                }
                self.next += 1;
                self.scope.push((v.clone(), s));
                let b = Box::new(self.compile(body)?);
                self.scope.pop();
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(s, b)
                } else {
                    Node::Forall(s, b)
                }
            }
            other => return Err(DecideError::Fragment(format!("not a QPLInc formula: {other}"))),
        })
    }
}

type Rows = BTreeSet<u64>;

fn with(s: u64, slot: usize, b: bool) -> u64 {
    if b {
        s | (1 << slot)
    } else {
        s & !(1 << slot)
    }
}

fn project(s: u64, slots: &[usize]) -> u64 {
    slots.iter().enumerate().fold(0, |acc, (i, &k)| acc | (((s >> k) & 1) << i))
}

fn duplicate(x: &Rows, slot: usize) -> Rows {
    x.iter().flat_map(|&s| [with(s, slot, false), with(s, slot, true)]).collect()
}

fn run(x: &Rows, n: &Node) -> Rows {
    match n {
        Node::Lit(k, b) => x.iter().copied().filter(|s| ((s >> k) & 1 == 1) == *b).collect(),
        Node::Exists(k, body) => {
            let m = run(&duplicate(x, *k), body);
            x.iter()
                .copied()
                .filter(|&s| m.contains(&with(s, *k, false)) || m.contains(&with(s, *k, true)))
                .collect()
        }
        Node::Forall(k, body) => {
            let mut y = duplicate(x, *k);
            loop {
                let m = run(&y, body);
                let next: Rows = y
                    .iter()
                    .copied()
                    .filter(|&s| m.contains(&with(s, *k, false)) && m.contains(&with(s, *k, true)))
                    .collect();
                if next == y {
                    break;
                }
                y = next;
            }
            x.iter()
                .copied()
                .filter(|&s| y.contains(&with(s, *k, false)) && y.contains(&with(s, *k, true)))
                .collect()
        }
        Node::Or(a, b) => {
            let mut out = run(x, a);
            out.extend(run(x, b));
            out
        }
        Node::And(a, b) => {
            let mut y = x.clone();
            loop {
                let next = run(&run(&y, a), b);
                if next == y {
                    return y;
                }
                y = next;
            }
        }
        Node::Inc(l, r) => {
            let mut y = x.clone();
            loop {
                let image: HashSet<u64> = y.iter().map(|&s| project(s, r)).collect();
                let next: Rows = y.iter().copied().filter(|&s| image.contains(&project(s, l))).collect();
                if next == y {
                    return y;
                }
                y = next;
            }
        }
    }
}

/// The largest subteam of `x` satisfying `phi`. Inclusion logic is closed
/// under unions, so it is unique.
///
/// ```
/// use teamlogic::deciders::maxsub;
/// use teamlogic::models::PropTeam;
/// use teamlogic::parser::parse;
/// use teamlogic::syntax::Var;
/// let x = PropTeam::full(vec![Var::new("p"), Var::new("q")]);
/// let y = maxsub(&x, &parse("p").unwrap()).unwrap();
/// assert_eq!(y.len(), 2);
/// assert!(y.rows().all(|r| r[0]));
/// ```
pub fn maxsub(x: &PropTeam, phi: &Formula) -> Result<PropTeam, DecideError> {
    check_fragment(&[phi], Fragment::QPLInc, "maxsub")?;
    let domain = x.domain();
    if domain.len() > 63 {
        return Err(DecideError::Resource("team domain wider than 63 variables".into()));
    }
    let mut c = Compiler {
        scope: domain.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
        next: domain.len(),
    };
    let node = c.compile(phi)?;
    let rows: Rows = x
        .rows()
        .map(|r| r.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i)))
        .collect();
    let out = run(&rows, &node);
    let n = domain.len();
    let back = out.into_iter().map(|s| (0..n).map(|i| (s >> i) & 1 == 1).collect::<Vec<bool>>());
    Ok(PropTeam::new(domain.to_vec(), back).expect("rows match the domain"))
}

fn fixed(x: &PropTeam, phi: &Formula) -> Result<bool, DecideError> {
    Ok(maxsub(x, phi)?.len() == x.len())
}

/// `Σ ⊨ φ` for QPLInc by enumerating the teams over the joint free
/// variables. A negative answer carries a minimal countermodel.
pub fn qplinc_entails(premises: &[Formula], conclusion: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    check_fragment(&all, Fragment::QPLInc, "the QPLInc decider")?;
    let domain = joint_domain(&all, caps)?;
    let counters = Counters::default();
    let bad = |x: &PropTeam| -> Result<bool, DecideError> {
        for p in premises {
            if !fixed(x, p)? {
                return Ok(false);
            }
        }
        Ok(!fixed(x, conclusion)?)
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

/// Renames every bound variable to a name unused in `phi`.
fn bound_apart(phi: &Formula, used: &mut BTreeSet<Var>) -> Formula {
    match phi {
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let mut k = 0;
            let fresh = loop {
                let cand = Var::new(&format!("{}_{k}", v.name()));
                if !used.contains(&cand) {
                    break cand;
                }
                k += 1;
            };
            used.insert(fresh.clone());
            let renamed = body.rename_free(&|w| (w == v).then(|| fresh.clone()));
            let b = bound_apart(&renamed, used);
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(fresh, b)
            } else {
                Formula::forall(fresh, b)
            }
        }
        Formula::And(a, b) => Formula::and(bound_apart(a, used), bound_apart(b, used)),
        Formula::Or(a, b) => Formula::or(bound_apart(a, used), bound_apart(b, used)),
        other => other.clone(),
    }
}

fn widen(phi: &Formula, prefix: &[Var]) -> Formula {
    match phi {
        Formula::Inc { left, right } => Formula::inc(
            prefix.iter().chain(left).cloned().collect(),
            prefix.iter().chain(right).cloned().collect(),
        ),
        Formula::And(a, b) => Formula::and(widen(a, prefix), widen(b, prefix)),
        Formula::Or(a, b) => Formula::or(widen(a, prefix), widen(b, prefix)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), widen(b, prefix)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), widen(b, prefix)),
        other => other.clone(),
    }
}

/// The universal closure `∀p⃗ φ*` whose truth on the unit team decides the
/// validity of `phi`: inclusion atoms `q⃗ ⊆ r⃗` become `p⃗q⃗ ⊆ p⃗r⃗` for the free
/// variables `p⃗` of `phi`.
pub(crate) fn validity_closure(phi: &Formula) -> Formula {
    let free: Vec<Var> = phi.free_vars().into_iter().collect();
    let mut used = phi.vars();
    let apart = bound_apart(phi, &mut used);
    free.iter().rev().fold(widen(&apart, &free), |acc, v| Formula::forall(v.clone(), acc))
}

/// Validity for QPLInc via the universal closure on the unit team. A negative
/// answer carries a refuting singleton team.
pub fn qplinc_valid(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    check_fragment(&[phi], Fragment::QPLInc, "the QPLInc decider")?;
    let domain = joint_domain(&[phi], caps)?;
    let closed = validity_closure(phi);
    let counters = Counters::default();
    counters.team();
    if fixed(&PropTeam::unit(), &closed)? {
        return Ok(Verdict::new(true, None, counters.snapshot()));
    }
    for m in 0..1u64 << domain.len() {
        let x = PropTeam::new(domain.clone(), [bits_of(m, domain.len())]).expect("row matches the domain");
        if !check_prop(&x, phi)? {
            return Ok(Verdict::new(false, Some(Witness::Team(x)), counters.snapshot()));
        }
    }
    Err(DecideError::Resource(
        "the universal closure fails but no singleton team refutes the formula".into(),
    ))
}
