// SPDX-License-Identifier: Apache-2.0
//! Alternating dependency quantified Boolean formulas.
//!
//! An instance quantifies Boolean functions block by block, each function
//! with a constraint listing which of the universally quantified variables
//! `p1..pn` it may read, and then requires the matrix for every assignment
//! of `p1..pn`.
//!
//! ```
//! use teamlogic::adqbf::{evaluate_adqbf, AdqbfInstance};
//! let inst = AdqbfInstance::from_json(r#"{"shape":"pi2","n":1,
//!     "blocks":[{"q":"A","fns":[{"name":"f","args":["p1"]}]},
//!               {"q":"E","fns":[{"name":"g","args":["p1"]}]}],
//!     "matrix":"f(p1) & g(p1) | !f(p1) & !g(p1)"}"#).unwrap();
//! assert!(evaluate_adqbf(&inst).unwrap());
//! ```

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::bits_of;
use crate::parser::{parse_with_apps, ParseError};
use crate::syntax::{Formula, Var};
use crate::witness::WitnessFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdqbfError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("matrix: {0}")]
    Parse(#[from] ParseError),
    #[error("JSON: {0}")]
    Json(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quant {
    #[serde(rename = "E")]
    Exists,
    #[serde(rename = "A")]
    Forall,
}

impl Quant {
    pub fn flip(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }
}

/// The quantifier alternation class: `Sigma(k)` starts existential, `Pi(k)`
/// universal, both with `k` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Shape {
    Sigma(usize),
    Pi(usize),
}

impl Shape {
    pub fn first(self) -> Quant {
        match self {
            Shape::Sigma(_) => Quant::Exists,
            Shape::Pi(_) => Quant::Forall,
        }
    }

    pub fn blocks(self) -> usize {
        match self {
            Shape::Sigma(k) | Shape::Pi(k) => k,
        }
    }

    fn flip(self) -> Shape {
        match self {
            Shape::Sigma(k) => Shape::Pi(k),
            Shape::Pi(k) => Shape::Sigma(k),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Sigma(k) => write!(f, "sigma{k}"),
            Shape::Pi(k) => write!(f, "pi{k}"),
        }
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let (ctor, digits): (fn(usize) -> Shape, &str) = if let Some(d) = lower.strip_prefix("sigma") {
            (Shape::Sigma, d)
        } else if let Some(d) = lower.strip_prefix("pi") {
            (Shape::Pi, d)
        } else {
            return Err(format!("unknown shape `{s}`, expected sigmaK or piK"));
        };
        match digits.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(ctor(k)),
            _ => Err(format!("unknown shape `{s}`, expected sigmaK or piK")),
        }
    }
}

impl TryFrom<String> for Shape {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Shape> for String {
    fn from(s: Shape) -> String {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnDecl {
    pub name: String,
    /// The constraint: the variables among `p1..pn` the function reads.
    pub args: Vec<Var>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub q: Quant,
    pub fns: Vec<FnDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdqbfInstance {
    pub shape: Shape,
    pub blocks: Vec<Block>,
    pub n: usize,
    /// Propositional formula over `p1..pn` and applications `f(c)` of the
    /// declared functions to their constraints.
    pub matrix: String,
}

/// One truth table per function, in declaration order.
pub type SkolemTable = Vec<WitnessFunction>;

/// The matrix with each application replaced by a relational atom whose
/// symbol is the index of the applied function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub formula: Formula,
}

/// Default bound on `Σ 2^(2^arity)` over all functions.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 16;

impl AdqbfInstance {
    pub fn from_json(text: &str) -> Result<Self, AdqbfError> {
        let inst: AdqbfInstance = serde_json::from_str(text).map_err(|e| AdqbfError::Json(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// `p1..pn`.
    pub fn vars(&self) -> Vec<Var> {
        (1..=self.n).map(|i| Var::new(&format!("p{i}"))).collect()
    }

    /// All functions in quantifier order with their quantifier.
    pub fn functions(&self) -> Vec<(Quant, &FnDecl)> {
        self.blocks.iter().flat_map(|b| b.fns.iter().map(move |f| (b.q, f))).collect()
    }

    /// Checks the shape, the constraints and the matrix, and returns the
    /// lowered matrix.
    pub fn validate(&self) -> Result<Matrix, AdqbfError> {
        let bad = |m: String| Err(AdqbfError::Invalid(m));
        if self.blocks.len() != self.shape.blocks() {
            return bad(format!("{} blocks for shape {}", self.blocks.len(), self.shape));
        }
        let mut q = self.shape.first();
        for b in &self.blocks {
            if b.q != q {
                return bad("quantifier blocks must alternate as the shape says".into());
            }
            q = q.flip();
        }
        let vars = self.vars();
        let fns = self.functions();
        for (i, (_, f)) in fns.iter().enumerate() {
            if vars.iter().any(|v| v.name() == f.name) || fns[..i].iter().any(|(_, g)| g.name == f.name) {
                return bad(format!("function name `{}` is reused", f.name));
            }
            if let Some(a) = f.args.iter().find(|a| !vars.contains(a)) {
                return bad(format!("constraint of `{}` mentions {}, not among p1..p{}", f.name, a.name(), self.n));
            }
        }
        let (formula, apps) = parse_with_apps(&self.matrix)?;
        let mut index = Vec::with_capacity(apps.len());
        for (name, args) in &apps {
            let Some(k) = fns.iter().position(|(_, f)| &f.name == name) else {
                return bad(format!("matrix applies undeclared function `{name}`"));
            };
            if &fns[k].1.args != args {
                return bad(format!("`{name}` must be applied to its constraint"));
            }
            index.push(k);
        }
        let lowered = relabel(&formula, &index);
        if let Some(v) = lowered.free_vars().iter().find(|v| !vars.contains(v)) {
            return bad(format!("matrix mentions {}, not among p1..p{}", v.name(), self.n));
        }
        if !matrix_shape(&lowered) {
            return bad("the matrix must be built from literals, applications, & and |".into());
        }
        Ok(Matrix { formula: lowered })
    }

    /// The matrix as a propositional formula, each application of the
    /// `k`-th function replaced by `subst(k)`.
    pub fn matrix_with(&self, subst: &dyn Fn(usize) -> Var) -> Result<Formula, AdqbfError> {
        Ok(lower(&self.validate()?.formula, subst))
    }

    /// The instance with the matrix negated and every function quantifier
    /// flipped. The final quantification over `p1..pn` stays universal, so
    /// this is not the negation; see [`evaluate_general`].
    pub fn dual(&self) -> Result<AdqbfInstance, AdqbfError> {
        let m = self.validate()?;
        let neg = negate(&m.formula);
        let names: Vec<String> = self.functions().iter().map(|(_, f)| f.name.clone()).collect();
        Ok(AdqbfInstance {
            shape: self.shape.flip(),
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    q: b.q.flip(),
                    fns: b.fns.clone(),
                })
                .collect(),
            n: self.n,
            matrix: render_matrix(&neg, &|k| app_text(&names[k], &self.functions()[k].1.args)),
        })
    }
}

fn relabel(f: &Formula, index: &[usize]) -> Formula {
    match f {
        Formula::Rel(s, args) => Formula::Rel(crate::syntax::RelSymbol(index[s.0 as usize] as u32), args.clone()),
        Formula::CNeg(a) => Formula::cneg(relabel(a, index)),
        Formula::And(a, b) => Formula::and(relabel(a, index), relabel(b, index)),
        Formula::Or(a, b) => Formula::or(relabel(a, index), relabel(b, index)),
        other => other.clone(),
    }
}

fn matrix_shape(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) | Formula::NegAtom(_) | Formula::Rel(..) => true,
        Formula::CNeg(a) => matches!(**a, Formula::Rel(..)),
        Formula::And(a, b) | Formula::Or(a, b) => matrix_shape(a) && matrix_shape(b),
        _ => false,
    }
}

fn lower(f: &Formula, subst: &dyn Fn(usize) -> Var) -> Formula {
    match f {
        Formula::Rel(s, _) => Formula::Atom(subst(s.0 as usize)),
        Formula::CNeg(a) => match &**a {
            Formula::Rel(s, _) => Formula::NegAtom(subst(s.0 as usize)),
            _ => unreachable!("validated matrix"),
        },
        Formula::And(a, b) => Formula::and(lower(a, subst), lower(b, subst)),
        Formula::Or(a, b) => Formula::or(lower(a, subst), lower(b, subst)),
        other => other.clone(),
    }
}

fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Atom(v) => Formula::NegAtom(v.clone()),
        Formula::NegAtom(v) => Formula::Atom(v.clone()),
        Formula::Rel(..) => Formula::cneg(f.clone()),
        Formula::CNeg(a) => (**a).clone(),
        Formula::And(a, b) => Formula::or(negate(a), negate(b)),
        Formula::Or(a, b) => Formula::and(negate(a), negate(b)),
        _ => unreachable!("validated matrix"),
    }
}

fn app_text(name: &str, args: &[Var]) -> String {
    format!("{name}({})", args.iter().map(Var::name).collect::<Vec<_>>().join(","))
}

/// Renders a lowered matrix back to text, applications via `app`.
fn render_matrix(f: &Formula, app: &dyn Fn(usize) -> String) -> String {
    let paren = |g: &Formula, s: String| {
        if matches!(g, Formula::And(..) | Formula::Or(..)) {
            format!("({s})")
        } else {
            s
        }
    };
    match f {
        Formula::Atom(v) => v.name().to_string(),
        Formula::NegAtom(v) => format!("!{}", v.name()),
        Formula::Rel(s, _) => app(s.0 as usize),
        Formula::CNeg(a) => format!("!{}", render_matrix(a, app)),
        Formula::And(a, b) => format!("{} & {}", paren(a, render_matrix(a, app)), paren(b, render_matrix(b, app))),
        Formula::Or(a, b) => format!("{} | {}", paren(a, render_matrix(a, app)), paren(b, render_matrix(b, app))),
        _ => unreachable!("validated matrix"),
    }
}

fn truth(f: &Formula, row: &[bool], tables: &[WitnessFunction], args: &[Vec<usize>], vars: &[Var]) -> bool {
    match f {
        Formula::Atom(v) => row[vars.iter().position(|w| w == v).expect("validated")],
        Formula::NegAtom(v) => !row[vars.iter().position(|w| w == v).expect("validated")],
        Formula::Rel(s, _) => {
            let k = s.0 as usize;
            let a: Vec<bool> = args[k].iter().map(|&i| row[i]).collect();
            tables[k].apply(&a)
        }
        Formula::CNeg(a) => !truth(a, row, tables, args, vars),
        Formula::And(a, b) => truth(a, row, tables, args, vars) && truth(b, row, tables, args, vars),
        Formula::Or(a, b) => truth(a, row, tables, args, vars) || truth(b, row, tables, args, vars),
        _ => unreachable!("validated matrix"),
    }
}

/// Whether the matrix holds for every assignment of `p1..pn` under fixed
/// tables.
pub fn evaluate_with(inst: &AdqbfInstance, tables: &[WitnessFunction]) -> Result<bool, AdqbfError> {
    let m = inst.validate()?;
    let fns = inst.functions();
    if tables.len() != fns.len() || tables.iter().zip(&fns).any(|(t, (_, f))| t.arity() != f.args.len()) {
        return Err(AdqbfError::Invalid("tables do not match the declared functions".into()));
    }
    Ok(Evaluator::new(inst, &m, Quant::Forall).matrix_holds(tables))
}

struct Evaluator {
    formula: Formula,
    vars: Vec<Var>,
    args: Vec<Vec<usize>>,
    arities: Vec<usize>,
    blocks: Vec<(Quant, std::ops::Range<usize>)>,
    n: usize,
    last: Quant,
}

impl Evaluator {
    fn new(inst: &AdqbfInstance, m: &Matrix, last: Quant) -> Self {
        let vars = inst.vars();
        let fns = inst.functions();
        let args = fns
            .iter()
            .map(|(_, f)| f.args.iter().map(|a| vars.iter().position(|v| v == a).expect("validated")).collect())
            .collect();
        let arities = fns.iter().map(|(_, f)| f.args.len()).collect();
        let mut start = 0;
        let blocks = inst
            .blocks
            .iter()
            .map(|b| {
                let r = start..start + b.fns.len();
                start = r.end;
                (b.q, r)
            })
            .collect();
        Evaluator {
            formula: m.formula.clone(),
            vars,
            args,
            arities,
            blocks,
            n: inst.n,
            last,
        }
    }

    fn matrix_holds(&self, tables: &[WitnessFunction]) -> bool {
        let holds = |a: u64| truth(&self.formula, &bits_of(a, self.n), tables, &self.args, &self.vars);
        match self.last {
            Quant::Forall => (0..1u64 << self.n).all(holds),
            Quant::Exists => (0..1u64 << self.n).any(holds),
        }
    }

    fn block(&self, i: usize, tables: &mut Vec<WitnessFunction>) -> bool {
        let Some((q, range)) = self.blocks.get(i).cloned() else {
            return self.matrix_holds(tables);
        };
        let sizes: Vec<u64> = range.clone().map(|k| 1u64 << (1u64 << self.arities[k])).collect();
        let total: u64 = sizes.iter().product();
        let mut test = |code: u64| {
            let mut c = code;
            let base = tables.len();
            for (k, s) in range.clone().zip(&sizes) {
                tables.push(WitnessFunction::from_code(self.arities[k], c % s));
                c /= s;
            }
            let r = self.block(i + 1, tables);
            tables.truncate(base);
            r
        };
        match q {
            Quant::Exists => (0..total).any(&mut test),
            Quant::Forall => (0..total).all(&mut test),
        }
    }
}

/// Truth of the instance by exhaustive quantification over truth tables,
/// with the default table cap.
pub fn evaluate_adqbf(inst: &AdqbfInstance) -> Result<bool, AdqbfError> {
    evaluate_adqbf_capped(inst, DEFAULT_TABLE_CAP)
}

pub fn evaluate_adqbf_capped(inst: &AdqbfInstance, cap: u64) -> Result<bool, AdqbfError> {
    evaluate_general(inst, Quant::Forall, cap)
}

/// Like [`evaluate_adqbf_capped`], with `last` quantifying `p1..pn` instead
/// of the universal quantifier. The negation of an instance is its
/// [`AdqbfInstance::dual`] evaluated with `last = Exists`.
pub fn evaluate_general(inst: &AdqbfInstance, last: Quant, cap: u64) -> Result<bool, AdqbfError> {
    let m = inst.validate()?;
    let mut space: u64 = 0;
    for (_, f) in inst.functions() {
        let a = f.args.len();
        if a >= 6 {
            return Err(AdqbfError::Resource(format!("function `{}` has {a} arguments", f.name)));
        }
        space = space.saturating_add(1u64 << (1u64 << a));
    }
    if space > cap {
        return Err(AdqbfError::Resource(format!("table space {space}, the cap is {cap}")));
    }
    Ok(Evaluator::new(inst, &m, last).block(0, &mut Vec::new()))
}

/// Parameters of [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub shape: Shape,
    pub n: usize,
    pub functions: usize,
    pub max_arity: usize,
    /// Number of binary connectives in the matrix.
    pub matrix_size: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            shape: Shape::Pi(2),
            n: 2,
            functions: 2,
            max_arity: 1,
            matrix_size: 4,
        }
    }
}

/// A seeded random instance. Functions are spread over the blocks front
/// first; the matrix is a random negation normal form formula over the
/// variables and the applications.
///
/// ```
/// use teamlogic::adqbf::{random_instance, GenParams, Quant};
/// let a = random_instance(7, GenParams::default());
/// assert_eq!(a, random_instance(7, GenParams::default()));
/// assert_eq!(a.blocks[0].q, Quant::Forall);
/// assert!(a.validate().is_ok());
/// ```
pub fn random_instance(seed: u64, params: GenParams) -> AdqbfInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = params.shape.blocks();
    let vars: Vec<Var> = (1..=params.n).map(|i| Var::new(&format!("p{i}"))).collect();
    let mut blocks: Vec<Block> = (0..k)
        .map(|i| Block {
            q: if i % 2 == 0 { params.shape.first() } else { params.shape.first().flip() },
            fns: Vec::new(),
        })
        .collect();
    let mut apps = Vec::new();
    for j in 0..params.functions {
        let arity = rng.gen_range(0..=params.max_arity.min(params.n));
        let mut args: Vec<Var> = vars.choose_multiple(&mut rng, arity).cloned().collect();
        args.sort();
        let name = format!("f{}", j + 1);
        apps.push(app_text(&name, &args));
        blocks[j * k / params.functions.max(1)].fns.push(FnDecl { name, args });
    }
    let mut atoms: Vec<String> = vars.iter().map(|v| v.name().to_string()).collect();
    atoms.extend(apps);
    let matrix = if atoms.is_empty() {
        Formula::top().to_string()
    } else {
        random_nnf(&mut rng, &atoms, params.matrix_size)
    };
    AdqbfInstance {
        shape: params.shape,
        blocks,
        n: params.n,
        matrix,
    }
}

fn random_nnf<R: Rng>(rng: &mut R, atoms: &[String], size: usize) -> String {
    if size == 0 {
        let a = atoms.choose(rng).expect("non-empty");
        return if rng.gen_bool(0.5) { format!("!{a}") } else { a.clone() };
    }
    let left = rng.gen_range(0..size);
    let op = if rng.gen_bool(0.5) { "&" } else { "|" };
    format!(
        "({} {op} {})",
        random_nnf(rng, atoms, left),
        random_nnf(rng, atoms, size - 1 - left)
    )
}
