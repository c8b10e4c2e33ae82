// SPDX-License-Identifier: Apache-2.0
//! Entailment for EMDL via witness functions, and for ML(⋁) via resolutions.
//!
//! Both reduce `Σ ⊨ φ` to a universal choice over the premises and an
//! existential choice over the conclusion, each choice turning the formulas
//! into RML formulas whose conjunction `Σ* ∧ ∼φ*` is tested with the tableau.

use rayon::prelude::*;

use super::{check_fragment, Caps, Counters, DecideError, Verdict, Witness};
use crate::models::{KripkeModel, Team};
use crate::syntax::{Formula, Fragment, RelSymbol};
use crate::tableau::{RelationOracle, Tableau, TableOracle, TableauState};
use crate::teamcheck::check_modal;
use crate::witness::{dep_arities, oracle_from_witnesses, star_translate, WitnessFunction};

/// One choice: an RML formula and the interpretation of its symbols.
struct Instance {
    formula: Option<Formula>,
    oracle: TableOracle,
}

trait Family: Sync {
    fn count(&self) -> u64;
    fn get(&self, i: u64) -> Instance;
}

/// Digits of `i` in the mixed radix `sizes`, last digit fastest.
fn decode(mut i: u64, sizes: &[u64]) -> Vec<u64> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = i % s;
        i /= s;
    }
    out
}

fn product(sizes: &[u64]) -> Option<u64> {
    sizes.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s))
}

/// Witness sequences for the dependence atoms of one fixed star formula.
struct WitnessFamily {
    star: Option<Formula>,
    symbols: Vec<RelSymbol>,
    arities: Vec<usize>,
    sizes: Vec<u64>,
}

impl WitnessFamily {
    fn new(formulas: &[&Formula], first_symbol: u32, caps: &Caps) -> Result<Self, DecideError> {
        let mut next = first_symbol;
        let mut parts = Vec::new();
        let mut symbols = Vec::new();
        let mut arities = Vec::new();
        for f in formulas {
            let ar = dep_arities(f);
            if let Some(&a) = ar.iter().find(|&&a| a > caps.max_dep_arity) {
                return Err(DecideError::Resource(format!(
                    "dependence atom of arity {a}, the cap is {}",
                    caps.max_dep_arity
                )));
            }
            let syms: Vec<RelSymbol> = (0..ar.len() as u32).map(|k| RelSymbol(next + k)).collect();
            next += ar.len() as u32;
            parts.push(star_translate(f, &syms)?);
            symbols.extend(syms);
            arities.extend(ar);
        }
        let sizes = arities.iter().map(|&a| 1u64 << (1u64 << a)).collect();
        Ok(WitnessFamily {
            star: Formula::conj(parts),
            symbols,
            arities,
            sizes,
        })
    }

    fn witnesses(&self, i: u64) -> Vec<WitnessFunction> {
        decode(i, &self.sizes)
            .into_iter()
            .zip(&self.arities)
            .map(|(c, &a)| WitnessFunction::from_code(a, c))
            .collect()
    }
}

impl Family for WitnessFamily {
    fn count(&self) -> u64 {
        product(&self.sizes).unwrap_or(u64::MAX)
    }

    fn get(&self, i: u64) -> Instance {
        let fs = self.witnesses(i);
        Instance {
            formula: self.star.clone(),
            oracle: oracle_from_witnesses(&fs, &self.symbols).expect("matching lengths"),
        }
    }
}

/// Choices of one ML resolution per formula.
struct ResolutionFamily {
    options: Vec<Vec<Formula>>,
    sizes: Vec<u64>,
}

impl ResolutionFamily {
    fn new(formulas: &[&Formula], caps: &Caps) -> Result<Self, DecideError> {
        let mut options = Vec::new();
        for f in formulas {
            let rs = resolutions(f, caps.max_tuples)?;
            options.push(rs.iter().map(|r| star_translate(r, &[]).expect("ML formula")).collect::<Vec<_>>());
        }
        let sizes = options.iter().map(|o: &Vec<Formula>| o.len() as u64).collect();
        Ok(ResolutionFamily { options, sizes })
    }
}

impl Family for ResolutionFamily {
    fn count(&self) -> u64 {
        product(&self.sizes).unwrap_or(u64::MAX)
    }

    fn get(&self, i: u64) -> Instance {
        let picks = decode(i, &self.sizes);
        let parts = picks.iter().zip(&self.options).map(|(&k, o)| o[k as usize].clone());
        Instance {
            formula: Formula::conj(parts),
            oracle: TableOracle::new(),
        }
    }
}

/// The ML formulas obtained by choosing one side of every reachable `⋁`.
/// `θ` is equivalent to their intuitionistic disjunction.
///
/// ```
/// use teamlogic::deciders::resolutions;
/// use teamlogic::parser::parse;
/// let rs = resolutions(&parse("(p \\/ q) & [] (r \\/ !r)").unwrap(), 100).unwrap();
/// let shown: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
/// assert_eq!(shown, ["p & [] r", "p & [] !r", "q & [] r", "q & [] !r"]);
/// ```
pub fn resolutions(theta: &Formula, cap: u64) -> Result<Vec<Formula>, DecideError> {
    let too_many = || DecideError::Resource(format!("more than {cap} resolutions"));
    Ok(match theta {
        Formula::Atom(_) | Formula::NegAtom(_) => vec![theta.clone()],
        Formula::IDisj(a, b) => {
            let mut out = resolutions(a, cap)?;
            out.extend(resolutions(b, cap)?);
            if out.len() as u64 > cap {
                return Err(too_many());
            }
            out
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let xs = resolutions(a, cap)?;
            let ys = resolutions(b, cap)?;
            if (xs.len() as u64).saturating_mul(ys.len() as u64) > cap {
                return Err(too_many());
            }
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for x in &xs {
                for y in &ys {
                    out.push(if matches!(theta, Formula::And(..)) {
                        Formula::and(x.clone(), y.clone())
                    } else {
                        Formula::or(x.clone(), y.clone())
                    });
                }
            }
            out
        }
        Formula::Box(a) => resolutions(a, cap)?.into_iter().map(Formula::nec).collect(),
        Formula::Diamond(a) => resolutions(a, cap)?.into_iter().map(Formula::diamond).collect(),
        other => return Err(DecideError::Fragment(format!("not an ML(⋁) formula: {other}"))),
    })
}

fn merged(a: &TableOracle, b: &TableOracle) -> TableOracle {
    let mut o = a.clone();
    for (s, r) in b.relations() {
        o.insert(*s, r.clone());
    }
    o
}

/// Classical truth of an RML formula at a world, relation symbols read from
/// `oracle`.
fn pointed(m: &KripkeModel, w: usize, phi: &Formula, oracle: &dyn RelationOracle) -> bool {
    match phi {
        Formula::Atom(v) => m.holds(v, w).unwrap_or(false),
        Formula::CNeg(a) => !pointed(m, w, a, oracle),
        Formula::And(a, b) => pointed(m, w, a, oracle) && pointed(m, w, b, oracle),
        Formula::Box(a) => m.succ(w).iter().all(|&v| pointed(m, v, a, oracle)),
        Formula::Rel(s, args) => {
            let t: Vec<bool> = args.iter().map(|a| pointed(m, w, a, oracle)).collect();
            oracle.contains(*s, &t)
        }
        _ => unreachable!("star formulas are RML"),
    }
}

type Pointed = (KripkeModel, usize);

/// For a fixed premise choice, either finds a conclusion choice closing the
/// tableau (`Ok(j)`) or returns pointed models refuting every conclusion
/// choice while satisfying the premises.
fn refute_all(p: &Instance, concl: &dyn Family, counters: &Counters) -> Result<Result<u64, Vec<Pointed>>, DecideError> {
    let mut roots: Vec<Pointed> = Vec::new();
    for j in 0..concl.count() {
        counters.tuple();
        let c = concl.get(j);
        let cf = c.formula.expect("conclusion formula");
        if roots.iter().any(|(m, w)| !pointed(m, *w, &cf, &c.oracle)) {
            continue;
        }
        let oracle = merged(&p.oracle, &c.oracle);
        let neg = Formula::cneg(cf);
        let goal = match &p.formula {
            Some(f) => Formula::and(f.clone(), neg),
            None => neg,
        };
        let mut t = Tableau::new(&oracle);
        let found = t.model(&TableauState::sat_of(goal))?;
        counters.tableau(t.stats());
        match found {
            None => return Ok(Ok(j)),
            Some(mw) => roots.push(mw),
        }
    }
    Ok(Err(roots))
}

fn find_first<T: Send>(
    count: u64,
    jobs: usize,
    f: impl Fn(u64) -> Result<Option<T>, DecideError> + Sync + Send,
) -> Result<Option<(u64, T)>, DecideError> {
    if jobs <= 1 {
        for i in 0..count {
            if let Some(t) = f(i)? {
                return Ok(Some((i, t)));
            }
        }
        return Ok(None);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| DecideError::Resource(e.to_string()))?;
    let hit = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| f(i).map(|o| o.map(|t| (i, t))))
            .find_first(|r| !matches!(r, Ok(None)))
    });
    hit.unwrap_or(Ok(None))
}

fn check_cap(n: u64, caps: &Caps) -> Result<(), DecideError> {
    if n > caps.max_tuples {
        return Err(DecideError::Resource(format!(
            "{n} witness tuples, the cap is {}",
            caps.max_tuples
        )));
    }
    Ok(())
}

/// Gives every variable of `fs` a valuation, false where the tableau left it
/// unconstrained.
fn declare_vars<'a>(m: &mut KripkeModel, fs: impl IntoIterator<Item = &'a Formula>) {
    for f in fs {
        for v in f.vars() {
            if m.valuation(&v).is_none() {
                m.set_true_at(v, []).expect("no worlds named");
            }
        }
    }
}

/// Disjoint union of the pointed models, team of their roots, shrunk while
/// the premises hold and the conclusion fails.
fn countermodel(roots: Vec<Pointed>, premises: &[Formula], conclusion: &Formula) -> Result<Witness, DecideError> {
    let parts: Vec<KripkeModel> = roots.iter().map(|(m, _)| m.without_relations()).collect();
    let (mut m, offsets) = KripkeModel::disjoint_union(&parts);
    declare_vars(&mut m, premises.iter().chain(std::iter::once(conclusion)));
    let mut team: Team = roots.iter().zip(&offsets).map(|((_, w), off)| w + off).collect();
    let bad = |t: &Team| -> Result<bool, DecideError> {
        for p in premises {
            if !check_modal(&m, t, p)? {
                return Ok(false);
            }
        }
        Ok(!check_modal(&m, t, conclusion)?)
    };
    debug_assert!(bad(&team)?);
    for w in team.clone().iter() {
        let mut smaller = team.clone();
        smaller.remove(w);
        if bad(&smaller)? {
            team = smaller;
        }
    }
    let (model, team) = m.reachable_part(&team);
    Ok(Witness::Kripke { model, team })
}

fn entails_with(
    prem: &dyn Family,
    concl: &dyn Family,
    premises: &[Formula],
    conclusion: &Formula,
    caps: &Caps,
) -> Result<Verdict, DecideError> {
    check_cap(prem.count().saturating_mul(concl.count()), caps)?;
    let counters = Counters::default();
    let hit = find_first(prem.count(), caps.jobs, |i| Ok(refute_all(&prem.get(i), concl, &counters)?.err()))?;
    let witness = match hit {
        Some((_, roots)) => Some(countermodel(roots, premises, conclusion)?),
        None => None,
    };
    Ok(Verdict::new(witness.is_none(), witness, counters.snapshot()))
}

/// Validity: the single premise choice is the empty conjunction. Returns the
/// closing conclusion choice on success.
fn valid_with(concl: &dyn Family, conclusion: &Formula, caps: &Caps) -> Result<(Verdict, Option<u64>), DecideError> {
    check_cap(concl.count(), caps)?;
    let counters = Counters::default();
    let none = Instance {
        formula: None,
        oracle: TableOracle::new(),
    };
    Ok(match refute_all(&none, concl, &counters)? {
        Ok(j) => (Verdict::new(true, None, counters.snapshot()), Some(j)),
        Err(roots) => {
            let w = countermodel(roots, &[], conclusion)?;
            (Verdict::new(false, Some(w), counters.snapshot()), None)
        }
    })
}

fn emdl_check(fs: &[&Formula]) -> Result<(), DecideError> {
    check_fragment(fs, Fragment::EMDL, "the EMDL decider")
}

/// `Σ ⊨ φ` for EMDL. A negative answer carries a countermodel.
pub fn emdl_entails(premises: &[Formula], conclusion: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    let ps: Vec<&Formula> = premises.iter().collect();
    emdl_check(&ps)?;
    emdl_check(&[conclusion])?;
    let prem = WitnessFamily::new(&ps, 0, caps)?;
    let concl = WitnessFamily::new(&[conclusion], prem.symbols.len() as u32, caps)?;
    entails_with(&prem, &concl, premises, conclusion, caps)
}

/// Validity for EMDL. A positive answer carries the witness functions under
/// which the formula is valid.
pub fn emdl_valid(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    emdl_check(&[phi])?;
    let concl = WitnessFamily::new(&[phi], 0, caps)?;
    let (mut v, j) = valid_with(&concl, phi, caps)?;
    if let Some(j) = j {
        v.witness = Some(Witness::Witnesses(concl.witnesses(j)));
    }
    Ok(v)
}

fn sat_with(concl: &dyn Family, phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    check_cap(concl.count(), caps)?;
    let counters = Counters::default();
    let hit = find_first(concl.count(), caps.jobs, |j| {
        counters.tuple();
        let c = concl.get(j);
        let mut t = Tableau::new(&c.oracle);
        let found = t.model(&TableauState::sat_of(c.formula.expect("formula")))?;
        counters.tableau(t.stats());
        Ok(found)
    })?;
    let witness = hit.map(|(_, (m, w))| {
        let mut model = m.without_relations();
        declare_vars(&mut model, [phi]);
        Witness::Kripke {
            model,
            team: Team::singleton(w),
        }
    });
    Ok(Verdict::new(witness.is_some(), witness, counters.snapshot()))
}

/// Satisfiability by a non-empty team for EMDL. A positive answer carries a
/// pointed tree model.
pub fn emdl_sat(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    emdl_check(&[phi])?;
    let concl = WitnessFamily::new(&[phi], 0, caps)?;
    sat_with(&concl, phi, caps)
}

fn mldisj_check(fs: &[&Formula]) -> Result<(), DecideError> {
    check_fragment(fs, Fragment::MLIDisj, "the ML(⋁) decider")
}

/// `Σ ⊨ φ` for ML(⋁).
pub fn mldisj_entails(premises: &[Formula], conclusion: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    let ps: Vec<&Formula> = premises.iter().collect();
    mldisj_check(&ps)?;
    mldisj_check(&[conclusion])?;
    let prem = ResolutionFamily::new(&ps, caps)?;
    let concl = ResolutionFamily::new(&[conclusion], caps)?;
    entails_with(&prem, &concl, premises, conclusion, caps)
}

/// Validity for ML(⋁). A positive answer names a valid resolution.
pub fn mldisj_valid(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    mldisj_check(&[phi])?;
    let rs = resolutions(phi, caps.max_tuples)?;
    let concl = ResolutionFamily::new(&[phi], caps)?;
    let (mut v, j) = valid_with(&concl, phi, caps)?;
    if let Some(j) = j {
        v.witness = Some(Witness::Resolution(rs[j as usize].clone()));
    }
    Ok(v)
}

/// Satisfiability by a non-empty team for ML(⋁).
pub fn mldisj_sat(phi: &Formula, caps: &Caps) -> Result<Verdict, DecideError> {
    mldisj_check(&[phi])?;
    let concl = ResolutionFamily::new(&[phi], caps)?;
    sat_with(&concl, phi, caps)
}
