// SPDX-License-Identifier: Apache-2.0
use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use teamlogic::adqbf::{evaluate_adqbf, random_instance, GenParams};
use teamlogic::deciders::{brute_entails_prop, emdl_entails, qplinc_valid, Caps, DecideStats};
use teamlogic::gen::FormulaGen;
use teamlogic::models::PropTeam;
use teamlogic::parser::render;
use teamlogic::reductions::adqbf_pi2_to_pdl_entailment;
use teamlogic::syntax::{Formula, Fragment, Var};
use teamlogic::teamcheck::check_prop;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// PDL entailment: witness-function decider against team enumeration.
    OracleAgreement,
    /// Π₂ instances: direct evaluation against the PDL entailment reduction.
    Pi2Transfer,
    /// QPLInc validity against satisfaction on all singleton teams.
    QplincValid,
}

#[derive(Serialize)]
struct Row {
    instance: usize,
    input: String,
    verdict: bool,
    oracle: bool,
    disagreements: usize,
    millis: u128,
    tuples: u64,
    teams: u64,
    tableau_calls: u64,
    max_depth: usize,
}

/// Writes one CSV row per instance and returns the number of disagreements.
pub fn run(suite: Suite, seed: u64, count: usize, caps: &Caps, out: impl Write) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreements = 0;
    for instance in 0..count {
        let start = Instant::now();
        let (input, verdict, oracle, stats) = match suite {
            Suite::OracleAgreement => {
                let g = FormulaGen::for_fragment(Fragment::PDL).with_max_size(6).with_deps(1, 2);
                let premises: Vec<Formula> = (0..instance % 3).map(|_| g.generate(&mut rng)).collect();
                let conclusion = g.generate(&mut rng);
                let v = emdl_entails(&premises, &conclusion, caps)?;
                let o = brute_entails_prop(&premises, &conclusion, caps)?;
                let text = premises.iter().map(render).collect::<Vec<_>>().join("; ") + " |= " + &render(&conclusion);
                (text, v.answer, o.answer, v.stats)
            }
            Suite::Pi2Transfer => {
                let inst = random_instance(seed.wrapping_add(instance as u64), GenParams::default());
                let out = adqbf_pi2_to_pdl_entailment(&inst)?;
                let v = brute_entails_prop(&out.premises, &out.conclusion, caps)?;
                (inst.matrix.clone(), v.answer, evaluate_adqbf(&inst)?, v.stats)
            }
            Suite::QplincValid => {
                let g = FormulaGen::for_fragment(Fragment::QPLInc).with_vars(&["p", "q"]).with_max_size(6);
                let phi = g.generate(&mut rng);
                let v = qplinc_valid(&phi, caps)?;
                (render(&phi), v.answer, singletons_satisfy(&phi)?, v.stats)
            }
        };
        if verdict != oracle {
            disagreements += 1;
        }
        let DecideStats {
            tuples,
            teams,
            tableau_calls,
            max_depth,
        } = stats;
        w.serialize(Row {
            instance,
            input,
            verdict,
            oracle,
            disagreements,
            millis: start.elapsed().as_millis(),
            tuples,
            teams,
            tableau_calls,
            max_depth,
        })?;
    }
    w.flush()?;
    Ok(disagreements)
}

fn singletons_satisfy(phi: &Formula) -> Result<bool> {
    let vars: Vec<Var> = phi.free_vars().into_iter().collect();
    for bits in 0..1u64 << vars.len() {
        let row: Vec<bool> = (0..vars.len()).map(|i| bits >> i & 1 == 1).collect();
        let x = PropTeam::new(vars.clone(), [row])?;
        if !check_prop(&x, phi)? {
            return Ok(false);
        }
    }
    Ok(true)
}
