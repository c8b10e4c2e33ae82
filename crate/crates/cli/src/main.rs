// SPDX-License-Identifier: Apache-2.0
//! `teamlogic` command-line front end.
//!
//! Exit codes: 0 when the answer is positive (satisfied, valid, entailed,
//! no disagreements), 1 when it is negative, 2 on any error.

mod bench;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use teamlogic::adqbf::{random_instance, AdqbfInstance, GenParams, Shape};
use teamlogic::deciders::{decide, Caps, Mode, Oracle};
use teamlogic::gen::FormulaGen;
use teamlogic::models::Team;
use teamlogic::parser::{parse, parse_kripke, parse_team, render};
use teamlogic::reductions::{
    adqbf_pi2_to_pdl_entailment, adqbf_sigma1_complement_to_qplinc_entailment, adqbf_to_qplind_validity,
    inclusion_to_independence, prenex, qpdl_to_mdl, QplindForm, ReductionOutput, Task,
};
use teamlogic::syntax::{classify_all, Formula, Fragment, Var};
use teamlogic::teamcheck::{check_modal, check_prop, check_rml_pointed};

use report::{witness_text, RunReport};

#[derive(Parser)]
#[command(name = "teamlogic", version, about = "Team semantics workbench for dependence logics")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Resource limits as `key=value` pairs (dep_arity, domain, worlds, tuples, jobs).
    #[arg(long, global = true, env = "TEAMLOGIC_CAPS")]
    caps: Option<Caps>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print its canonical text and fragment.
    Parse {
        /// Formula text, or `@path` to read it from a file.
        formula: String,
    },
    /// Check a formula on a propositional team or on a Kripke model and team.
    Check {
        formula: String,
        /// Propositional team JSON file.
        #[arg(long, conflicts_with = "model")]
        team: Option<PathBuf>,
        /// Kripke model JSON file.
        #[arg(long, required_unless_present = "team")]
        model: Option<PathBuf>,
        /// Team of the model as comma separated worlds; all worlds if omitted.
        #[arg(long, value_delimiter = ',', requires = "model")]
        worlds: Option<Vec<usize>>,
    },
    /// Decide satisfiability, validity or entailment.
    Decide {
        #[arg(value_enum)]
        mode: ModeArg,
        /// The formula (the conclusion for `entail`).
        formula: Option<String>,
        /// Premise of an entailment; repeatable.
        #[arg(short, long = "premise")]
        premises: Vec<String>,
        /// Conclusion of an entailment.
        #[arg(short, long, conflicts_with = "formula")]
        conclusion: Option<String>,
        /// Logic to decide in, instead of the detected one.
        #[arg(long)]
        logic: Option<Fragment>,
        #[arg(long, value_enum, default_value = "auto")]
        oracle: OracleArg,
        /// Model size bound for the brute-force modal oracle.
        #[arg(long)]
        bound: Option<usize>,
        /// Worker threads for the outer search loops.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run a reduction and write sigma.txt, psi.txt and varmap.json.
    Reduce {
        #[arg(value_enum)]
        name: Reduction,
        /// Instance file, or formulas for qpdl-to-mdl and prenex.
        inputs: Vec<String>,
        /// Premises for qpdl-to-mdl entailment.
        #[arg(short, long = "premise")]
        premises: Vec<String>,
        #[arg(long, value_enum, default_value = "sat")]
        task: TaskArg,
        /// Keep dependence and inclusion atoms in pi2-to-qplind output.
        #[arg(long)]
        mixed: bool,
        /// Left and right tuples for inc-to-ind, space separated.
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Quantifier shape of an ADQBF instance, such as pi2 or sigma1.
        #[arg(long, default_value = "pi2")]
        shape: Shape,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        functions: usize,
        #[arg(long, default_value_t = 1)]
        max_arity: usize,
        #[arg(long, default_value_t = 4)]
        matrix_size: usize,
        /// Logic of a generated formula.
        #[arg(long, default_value = "PDL")]
        logic: Fragment,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a benchmark suite and print CSV.
    Bench {
        #[arg(value_enum)]
        suite: bench::Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sat,
    Valid,
    Entail,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Auto,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Sat,
    Valid,
    Entail,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Adqbf,
    Formula,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reduction {
    Pi2ToPdl,
    Pi2ToQplind,
    Sigma1ToQplinc,
    QpdlToMdl,
    Prenex,
    IncToInd,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli, command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn formula_arg(s: &str) -> Result<Formula> {
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => s.to_string(),
    };
    Ok(parse(text.trim())?)
}

fn exit(answer: bool) -> ExitCode {
    if answer {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit(cli: &Cli, report: &RunReport, text: &str) -> Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        println!("{text}");
    }
    Ok(())
}

fn run(cli: &Cli, command: Vec<String>) -> Result<ExitCode> {
    let start = Instant::now();
    let mut report = RunReport::new(command);
    let caps = cli.caps.unwrap_or_default();
    match &cli.cmd {
        Cmd::Parse { formula } => {
            let f = formula_arg(formula)?;
            let frag = f.classify().map(|g| g.to_string()).unwrap_or_else(|e| e.to_string());
            report.fragment = Some(frag.clone());
            report.millis = start.elapsed().as_millis();
            if cli.json {
                let free: Vec<String> = f.free_vars().iter().map(|v| v.name().to_string()).collect();
                let out = json!({ "formula": render(&f), "fragment": frag, "size": f.size(), "free": free });
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                println!("{}\n{frag}", render(&f));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check {
            formula,
            team,
            model,
            worlds,
        } => {
            let f = formula_arg(formula)?;
            let sat = if let Some(path) = team {
                let x = parse_team(&read(path)?)?;
                check_prop(&x, &f)?
            } else {
                let path = model.as_ref().expect("clap requires a team or a model");
                let m = parse_kripke(&read(path)?)?;
                let t = match worlds {
                    Some(ws) => Team::new(ws.iter().copied()),
                    None => m.all_worlds(),
                };
                if let Some(w) = t.iter().find(|&w| w >= m.worlds()) {
                    bail!("world {w} is not in the model");
                }
                if f.classify()? == Fragment::RML {
                    let mut all = true;
                    for w in t.iter() {
                        all &= check_rml_pointed(&m, w, &f)?;
                    }
                    all
                } else {
                    check_modal(&m, &t, &f)?
                }
            };
            report.verdict = Some(sat);
            report.millis = start.elapsed().as_millis();
            emit(cli, &report, if sat { "satisfied" } else { "violated" })?;
            Ok(exit(sat))
        }
        Cmd::Decide {
            mode,
            formula,
            premises,
            conclusion,
            logic,
            oracle,
            bound,
            jobs,
        } => {
            let mut caps = caps;
            if let Some(j) = jobs {
                caps.jobs = (*j).max(1);
            }
            let mode = match mode {
                ModeArg::Sat => Mode::Sat,
                ModeArg::Valid => Mode::Valid,
                ModeArg::Entail => Mode::Entail,
            };
            if mode != Mode::Entail && !premises.is_empty() {
                bail!("premises are only allowed with `entail`");
            }
            let Some(c) = formula.as_ref().or(conclusion.as_ref()) else {
                bail!("missing formula");
            };
            let c = formula_arg(c)?;
            let ps = premises.iter().map(|p| formula_arg(p)).collect::<Result<Vec<_>>>()?;
            let oracle = match (oracle, bound) {
                (OracleArg::Brute, b) => Oracle::Brute { bound: *b },
                (OracleArg::Auto, None) => Oracle::Auto,
                (OracleArg::Auto, Some(_)) => bail!("--bound needs --oracle brute"),
            };
            let all: Vec<&Formula> = ps.iter().chain([&c]).collect();
            report.fragment = logic.map(|l| l.to_string()).or_else(|| classify_all(all).ok().map(|f| f.to_string()));
            let v = decide(mode, &ps, &c, *logic, oracle, &caps)?;
            let mut text = format!("{}", v.answer);
            if !v.exact {
                text.push_str(" (up to the model bound)");
            }
            if let Some(w) = &v.witness {
                text.push('\n');
                text.push_str(&witness_text(w));
            }
            report = report.with_verdict(&v);
            report.millis = start.elapsed().as_millis();
            emit(cli, &report, &text)?;
            Ok(exit(v.answer))
        }
        Cmd::Reduce {
            name,
            inputs,
            premises,
            task,
            mixed,
            left,
            right,
            out,
        } => {
            let output = reduce(*name, inputs, premises, *task, *mixed, left.as_deref(), right.as_deref())?;
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            fs::write(out.join("sigma.txt"), output.sigma_text())?;
            fs::write(out.join("psi.txt"), output.psi_text())?;
            fs::write(out.join("varmap.json"), output.varmap_json() + "\n")?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&output)?);
            } else {
                print!("{}", output.sigma_text());
                if !output.premises.is_empty() {
                    println!("|=");
                }
                print!("{}", output.psi_text());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Gen {
            kind,
            seed,
            shape,
            n,
            functions,
            max_arity,
            matrix_size,
            logic,
            output,
        } => {
            let text = match kind {
                GenKind::Adqbf => {
                    let params = GenParams {
                        shape: *shape,
                        n: *n,
                        functions: *functions,
                        max_arity: *max_arity,
                        matrix_size: *matrix_size,
                    };
                    random_instance(*seed, params).to_json()
                }
                GenKind::Formula => {
                    let g = FormulaGen::for_fragment(*logic).with_max_size(*matrix_size.max(&1) * 2);
                    render(&g.generate(&mut ChaCha8Rng::seed_from_u64(*seed)))
                }
            };
            match output {
                Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench { suite, seed, count } => {
            let bad = bench::run(*suite, *seed, *count, &caps, std::io::stdout().lock())?;
            if bad > 0 {
                eprintln!("{bad} disagreements");
            }
            Ok(exit(bad == 0))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn instance(inputs: &[String]) -> Result<AdqbfInstance> {
    let [path] = inputs else {
        bail!("expected one instance file");
    };
    Ok(AdqbfInstance::from_json(&read(Path::new(path))?)?)
}

fn tuple(s: Option<&str>, which: &str) -> Result<Vec<Var>> {
    let Some(s) = s else {
        bail!("inc-to-ind needs --{which}");
    };
    s.split_whitespace()
        .map(|v| Var::try_new(v).map_err(Into::into))
        .collect()
}

fn reduce(
    name: Reduction,
    inputs: &[String],
    premises: &[String],
    task: TaskArg,
    mixed: bool,
    left: Option<&str>,
    right: Option<&str>,
) -> Result<ReductionOutput> {
    Ok(match name {
        Reduction::Pi2ToPdl => adqbf_pi2_to_pdl_entailment(&instance(inputs)?)?,
        Reduction::Pi2ToQplind => {
            let form = if mixed { QplindForm::Mixed } else { QplindForm::Pure };
            adqbf_to_qplind_validity(&instance(inputs)?, form)?
        }
        Reduction::Sigma1ToQplinc => adqbf_sigma1_complement_to_qplinc_entailment(&instance(inputs)?)?,
        Reduction::QpdlToMdl => {
            let [c] = inputs else {
                bail!("expected one formula");
            };
            let task = match task {
                TaskArg::Sat => Task::Sat,
                TaskArg::Valid => Task::Valid,
                TaskArg::Entail => Task::Entail,
            };
            let ps = premises.iter().map(|p| formula_arg(p)).collect::<Result<Vec<_>>>()?;
            qpdl_to_mdl(task, &ps, &formula_arg(c)?)?
        }
        Reduction::Prenex => {
            let [c] = inputs else {
                bail!("expected one formula");
            };
            let (f, steps) = prenex(&formula_arg(c)?)?;
            for s in &steps {
                eprintln!("{}: {} => {}", s.rule, render(&s.before), render(&s.after));
            }
            ReductionOutput {
                premises: Vec::new(),
                conclusion: f,
                fresh: Default::default(),
            }
        }
        Reduction::IncToInd => {
            let phi = inclusion_to_independence(&tuple(left, "left")?, &tuple(right, "right")?)?;
            ReductionOutput {
                premises: Vec::new(),
                conclusion: phi,
                fresh: Default::default(),
            }
        }
    })
}
