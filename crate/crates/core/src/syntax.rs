// SPDX-License-Identifier: Apache-2.0
//! Formula syntax shared by every logic in the crate.
//!
//! One [`Formula`] type covers propositional, modal and quantified team logics
//! as well as the relational modal logic used by the tableau. Which nodes may
//! co-occur is decided by [`Formula::classify`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Errors raised by syntactic operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("path {0:?} does not address a subformula")]
    BadPath(Vec<usize>),
    #[error("`{0}` cannot be negated in negation normal form")]
    NotNegatable(String),
    #[error("no fragment admits this formula: {0}")]
    MixedFragment(String),
    #[error("unknown fragment `{0}`")]
    UnknownFragment(String),
}

/// A propositional variable. Equal names give equal variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

/// Returns true if `name` is a legal variable name.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_ascii_alphabetic() || first == '_') {
        return false;
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
        return false;
    }
    name != "E" && name != "A"
}

impl Var {
    /// Creates a variable, panicking on an illegal name.
    ///
    /// ```
    /// use teamlogic::syntax::Var;
    /// assert_eq!(Var::new("p1").name(), "p1");
    /// ```
    pub fn new(name: &str) -> Var {
        Var::try_new(name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_new(name: &str) -> Result<Var, SyntaxError> {
        if is_identifier(name) {
            Ok(Var(Arc::from(name)))
        } else {
            Err(SyntaxError::InvalidIdentifier(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The variable used by [`Formula::top`].
    pub fn reserved() -> Var {
        Var::new("_top")
    }
}

impl serde::Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Var::try_new(&name).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A relation symbol `S_k` of the relational modal logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelSymbol(pub u32);

impl fmt::Display for RelSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}", self.0)
    }
}

impl FromStr for RelSymbol {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix("S_")
            .and_then(|k| k.parse().ok())
            .map(RelSymbol)
            .ok_or_else(|| SyntaxError::InvalidIdentifier(s.to_string()))
    }
}

/// Formula AST.
///
/// `Or` is the splitting (tensor) disjunction and `IDisj` the intuitionistic
/// one. `NegAtom` is the only negation of team logics; `CNeg` is the
/// classical negation of the relational modal logic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Var),
    NegAtom(Var),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    IDisj(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
    /// Dependence atom. Plain when every argument is an atom, extended otherwise.
    Dep {
        args: Vec<Formula>,
        target: Box<Formula>,
    },
    /// Conditional independence `ind(cond; left; right)`.
    Ind {
        cond: Vec<Var>,
        left: Vec<Var>,
        right: Vec<Var>,
    },
    /// Inclusion `left ⊆ right`; both sides have the same length.
    Inc { left: Vec<Var>, right: Vec<Var> },
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    CNeg(Box<Formula>),
    Rel(RelSymbol, Vec<Formula>),
}

/// A child-index path from the root. Dependence atoms list their arguments
/// before the target.
pub type Path = Vec<usize>;

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Var::new(name))
    }

    pub fn neg_atom(name: &str) -> Formula {
        Formula::NegAtom(Var::new(name))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn idisj(a: Formula, b: Formula) -> Formula {
        Formula::IDisj(Box::new(a), Box::new(b))
    }

    pub fn nec(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn diamond(a: Formula) -> Formula {
        Formula::Diamond(Box::new(a))
    }

    pub fn cneg(a: Formula) -> Formula {
        Formula::CNeg(Box::new(a))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn dep(args: Vec<Formula>, target: Formula) -> Formula {
        Formula::Dep {
            args,
            target: Box::new(target),
        }
    }

    /// Plain dependence atom over variable names.
    pub fn dep_vars(args: &[&str], target: &str) -> Formula {
        Formula::dep(args.iter().map(|a| Formula::atom(a)).collect(), Formula::atom(target))
    }

    pub fn inc(left: Vec<Var>, right: Vec<Var>) -> Formula {
        Formula::Inc { left, right }
    }

    pub fn ind(cond: Vec<Var>, left: Vec<Var>, right: Vec<Var>) -> Formula {
        Formula::Ind { cond, left, right }
    }

    /// `v ∨ ¬v`, true on every team.
    pub fn top_over(v: Var) -> Formula {
        Formula::or(Formula::Atom(v.clone()), Formula::NegAtom(v))
    }

    /// Tautology over the reserved variable `_top`.
    pub fn top() -> Formula {
        Formula::top_over(Var::reserved())
    }

    /// `□ⁿ φ`.
    pub fn nec_n(n: usize, phi: Formula) -> Formula {
        (0..n).fold(phi, |acc, _| Formula::nec(acc))
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Left-nested splitting disjunction; `None` for an empty iterator.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Ind { .. } | Formula::Inc { .. } => {
                Vec::new()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::IDisj(a, b) => vec![a, b],
            Formula::Box(a)
            | Formula::Diamond(a)
            | Formula::CNeg(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a) => vec![a],
            Formula::Dep { args, target } => {
                args.iter().chain(std::iter::once(target.as_ref())).collect()
            }
            Formula::Rel(_, args) => args.iter().collect(),
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Formula> {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) | Formula::Ind { .. } | Formula::Inc { .. } => {
                Vec::new()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::IDisj(a, b) => vec![a, b],
            Formula::Box(a)
            | Formula::Diamond(a)
            | Formula::CNeg(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a) => vec![a],
            Formula::Dep { args, target } => {
                args.iter_mut().chain(std::iter::once(target.as_mut())).collect()
            }
            Formula::Rel(_, args) => args.iter_mut().collect(),
        }
    }

    /// Number of AST nodes. Team atoms count as one node each.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Nesting depth of `Box`/`Diamond`.
    pub fn modal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::Box(_) | Formula::Diamond(_) => inner + 1,
            _ => inner,
        }
    }

    pub fn subformula(&self, path: &[usize]) -> Option<&Formula> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Replaces the subformula at `path` by `replacement`.
    ///
    /// ```
    /// use teamlogic::syntax::Formula;
    /// let f = Formula::and(Formula::atom("p"), Formula::atom("q"));
    /// let g = f.substitute(&[1], Formula::atom("r")).unwrap();
    /// assert_eq!(g, Formula::and(Formula::atom("p"), Formula::atom("r")));
    /// ```
    pub fn substitute(&self, path: &[usize], replacement: Formula) -> Result<Formula, SyntaxError> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in path {
            cur = cur
                .children_mut()
                .into_iter()
                .nth(i)
                .ok_or_else(|| SyntaxError::BadPath(path.to_vec()))?;
        }
        *cur = replacement;
        Ok(out)
    }

    /// Every node with its path, in preorder.
    pub fn paths(&self) -> Vec<(Path, &Formula)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((path, f)) = stack.pop() {
            let children = f.children();
            for (i, c) in children.into_iter().enumerate().rev() {
                let mut p = path.clone();
                p.push(i);
                stack.push((p, c));
            }
            out.push((path, f));
        }
        out
    }

    /// Free variables. Quantifiers bind their variable in the body.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Atom(v) | Formula::NegAtom(v) => add(v, bound),
            Formula::Ind { cond, left, right } => {
                for v in cond.iter().chain(left).chain(right) {
                    add(v, bound);
                }
            }
            Formula::Inc { left, right } => {
                for v in left.iter().chain(right) {
                    add(v, bound);
                }
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (_, f) in self.paths() {
            match f {
                Formula::Atom(v) | Formula::NegAtom(v) | Formula::Exists(v, _) | Formula::Forall(v, _) => {
                    out.insert(v.clone());
                }
                Formula::Ind { cond, left, right } => out.extend(cond.iter().chain(left).chain(right).cloned()),
                Formula::Inc { left, right } => out.extend(left.iter().chain(right).cloned()),
                _ => {}
            }
        }
        out
    }

    /// Renames free occurrences according to `map`. Binders are left alone and
    /// shadow the map inside their scope; callers supply fresh target names.
    pub fn rename_free(&self, map: &dyn Fn(&Var) -> Option<Var>) -> Formula {
        self.rename_inner(map, &mut Vec::new())
    }

    fn rename_inner(&self, map: &dyn Fn(&Var) -> Option<Var>, bound: &mut Vec<Var>) -> Formula {
        let r = |v: &Var, bound: &Vec<Var>| {
            if bound.contains(v) {
                v.clone()
            } else {
                map(v).unwrap_or_else(|| v.clone())
            }
        };
        match self {
            Formula::Atom(v) => Formula::Atom(r(v, bound)),
            Formula::NegAtom(v) => Formula::NegAtom(r(v, bound)),
            Formula::Ind { cond, left, right } => Formula::Ind {
                cond: cond.iter().map(|v| r(v, bound)).collect(),
                left: left.iter().map(|v| r(v, bound)).collect(),
                right: right.iter().map(|v| r(v, bound)).collect(),
            },
            Formula::Inc { left, right } => Formula::Inc {
                left: left.iter().map(|v| r(v, bound)).collect(),
                right: right.iter().map(|v| r(v, bound)).collect(),
            },
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                let b = body.rename_inner(map, bound);
                bound.pop();
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v.clone(), b)
                } else {
                    Formula::forall(v.clone(), b)
                }
            }
            _ => {
                let mut out = self.clone();
                let kids: Vec<Formula> = self.children().into_iter().map(|c| c.rename_inner(map, bound)).collect();
                for (slot, k) in out.children_mut().into_iter().zip(kids) {
                    *slot = k;
                }
                out
            }
        }
    }

    /// True for formulas built from literals, `∧`, `∨`, `□`, `◇` only.
    pub fn is_modal_classical(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::NegAtom(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_modal_classical() && b.is_modal_classical(),
            Formula::Box(a) | Formula::Diamond(a) => a.is_modal_classical(),
            _ => false,
        }
    }

    /// Negation pushed to the atoms: the classical dual of an ML formula
    /// (quantifiers dualise as well).
    ///
    /// ```
    /// use teamlogic::parser::parse;
    /// let f = parse("[] p | <> !q").unwrap();
    /// assert_eq!(f.negate_nnf().unwrap().to_string(), "<> !p & [] q");
    /// ```
    pub fn negate_nnf(&self) -> Result<Formula, SyntaxError> {
        Ok(match self {
            Formula::Atom(v) => Formula::NegAtom(v.clone()),
            Formula::NegAtom(v) => Formula::Atom(v.clone()),
            Formula::And(a, b) => Formula::or(a.negate_nnf()?, b.negate_nnf()?),
            Formula::Or(a, b) => Formula::and(a.negate_nnf()?, b.negate_nnf()?),
            Formula::Box(a) => Formula::diamond(a.negate_nnf()?),
            Formula::Diamond(a) => Formula::nec(a.negate_nnf()?),
            Formula::Exists(v, a) => Formula::forall(v.clone(), a.negate_nnf()?),
            Formula::Forall(v, a) => Formula::exists(v.clone(), a.negate_nnf()?),
            other => return Err(SyntaxError::NotNegatable(other.to_string())),
        })
    }

    /// Collects the syntactic features used to classify the formula.
    pub fn features(&self) -> Features {
        let mut fs = Features::default();
        for (_, f) in self.paths() {
            match f {
                Formula::Atom(_) | Formula::And(..) => {}
                Formula::NegAtom(_) => fs.neg_atom = true,
                Formula::Or(..) => fs.or = true,
                Formula::IDisj(..) => fs.idisj = true,
                Formula::Box(_) => fs.nec = true,
                Formula::Diamond(_) => fs.diamond = true,
                Formula::Dep { args, target } => {
                    let plain = args.iter().chain(std::iter::once(target.as_ref())).all(|a| matches!(a, Formula::Atom(_)));
                    if plain {
                        fs.dep = true;
                    } else {
                        fs.ext_dep = true;
                    }
                }
                Formula::Ind { .. } => fs.ind = true,
                Formula::Inc { .. } => fs.inc = true,
                Formula::Exists(..) | Formula::Forall(..) => fs.quant = true,
                Formula::CNeg(_) => fs.cneg = true,
                Formula::Rel(..) => fs.rel = true,
            }
        }
        fs
    }

    /// The least fragment whose grammar admits every node of the formula.
    ///
    /// ```
    /// use teamlogic::parser::parse;
    /// use teamlogic::syntax::Fragment;
    /// assert_eq!(parse("p & !q").unwrap().classify().unwrap(), Fragment::PL);
    /// assert_eq!(parse("[] =(p,q)").unwrap().classify().unwrap(), Fragment::MDL);
    /// assert!(parse("<> S_1(p)").unwrap().classify().is_err());
    /// ```
    pub fn classify(&self) -> Result<Fragment, SyntaxError> {
        self.features().classify()
    }

    /// Dependence atoms in preorder, with their paths.
    pub fn dep_atoms(&self) -> Vec<(Path, &Formula)> {
        self.paths()
            .into_iter()
            .filter(|(_, f)| matches!(f, Formula::Dep { .. }))
            .collect()
    }
}

/// Syntactic features of a formula, see [`Formula::features`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Features {
    pub neg_atom: bool,
    pub or: bool,
    pub idisj: bool,
    pub nec: bool,
    pub diamond: bool,
    pub dep: bool,
    pub ext_dep: bool,
    pub ind: bool,
    pub inc: bool,
    pub quant: bool,
    pub cneg: bool,
    pub rel: bool,
}

impl Features {
    pub fn union(self, o: Features) -> Features {
        Features {
            neg_atom: self.neg_atom || o.neg_atom,
            or: self.or || o.or,
            idisj: self.idisj || o.idisj,
            nec: self.nec || o.nec,
            diamond: self.diamond || o.diamond,
            dep: self.dep || o.dep,
            ext_dep: self.ext_dep || o.ext_dep,
            ind: self.ind || o.ind,
            inc: self.inc || o.inc,
            quant: self.quant || o.quant,
            cneg: self.cneg || o.cneg,
            rel: self.rel || o.rel,
        }
    }

    /// True when every feature present here is also present in `allowed`.
    pub fn within(self, allowed: Features) -> bool {
        let a = [
            self.neg_atom, self.or, self.idisj, self.nec, self.diamond, self.dep, self.ext_dep, self.ind,
            self.inc, self.quant, self.cneg, self.rel,
        ];
        let b = [
            allowed.neg_atom, allowed.or, allowed.idisj, allowed.nec, allowed.diamond, allowed.dep,
            allowed.ext_dep, allowed.ind, allowed.inc, allowed.quant, allowed.cneg, allowed.rel,
        ];
        a.iter().zip(b.iter()).all(|(x, y)| !*x || *y)
    }

    /// The first fragment, in order of increasing generality, admitting these features.
    pub fn classify(self) -> Result<Fragment, SyntaxError> {
        Fragment::ALL
            .iter()
            .copied()
            .find(|f| self.within(f.allowed()))
            .ok_or_else(|| SyntaxError::MixedFragment(format!("{self:?}")))
    }
}

/// Logic fragments, ordered so that [`Features::classify`] picks the least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    PL,
    ML,
    PDL,
    MDL,
    EMDL,
    PLInd,
    MLInd,
    PLInc,
    MLInc,
    PLIDisj,
    MLIDisj,
    QPL,
    QPDL,
    QPLInd,
    QPLInc,
    QPLIDisj,
    RML,
}

impl Fragment {
    pub const ALL: [Fragment; 17] = [
        Fragment::PL,
        Fragment::ML,
        Fragment::PDL,
        Fragment::MDL,
        Fragment::EMDL,
        Fragment::PLInd,
        Fragment::MLInd,
        Fragment::PLInc,
        Fragment::MLInc,
        Fragment::PLIDisj,
        Fragment::MLIDisj,
        Fragment::QPL,
        Fragment::QPDL,
        Fragment::QPLInd,
        Fragment::QPLInc,
        Fragment::QPLIDisj,
        Fragment::RML,
    ];

    /// Features the fragment's grammar admits.
    pub fn allowed(self) -> Features {
        let base = Features {
            neg_atom: true,
            or: true,
            ..Features::default()
        };
        let modal = Features {
            nec: true,
            diamond: true,
            ..base
        };
        match self {
            Fragment::PL => base,
            Fragment::ML => modal,
            Fragment::PDL => Features { dep: true, ..base },
            Fragment::MDL => Features { dep: true, ..modal },
            Fragment::EMDL => Features {
                dep: true,
                ext_dep: true,
                ..modal
            },
            Fragment::PLInd => Features { ind: true, ..base },
            Fragment::MLInd => Features { ind: true, ..modal },
            Fragment::PLInc => Features { inc: true, ..base },
            Fragment::MLInc => Features { inc: true, ..modal },
            Fragment::PLIDisj => Features { idisj: true, ..base },
            Fragment::MLIDisj => Features { idisj: true, ..modal },
            Fragment::QPL => Features { quant: true, ..base },
            Fragment::QPDL => Features {
                quant: true,
                dep: true,
                ..base
            },
            Fragment::QPLInd => Features {
                quant: true,
                ind: true,
                ..base
            },
            Fragment::QPLInc => Features {
                quant: true,
                inc: true,
                ..base
            },
            Fragment::QPLIDisj => Features {
                quant: true,
                idisj: true,
                ..base
            },
            Fragment::RML => Features {
                nec: true,
                cneg: true,
                rel: true,
                ..Features::default()
            },
        }
    }

    /// True if the fragment's grammar generates `f`.
    pub fn admits(self, f: &Formula) -> bool {
        f.features().within(self.allowed())
    }

    /// Grammar inclusion between fragments.
    pub fn le(self, other: Fragment) -> bool {
        self.allowed().within(other.allowed())
    }

    pub fn is_modal(self) -> bool {
        self.allowed().nec
    }

    pub fn name(self) -> &'static str {
        match self {
            Fragment::PL => "PL",
            Fragment::ML => "ML",
            Fragment::PDL => "PDL",
            Fragment::MDL => "MDL",
            Fragment::EMDL => "EMDL",
            Fragment::PLInd => "PLInd",
            Fragment::MLInd => "MLInd",
            Fragment::PLInc => "PLInc",
            Fragment::MLInc => "MLInc",
            Fragment::PLIDisj => "PLIDisj",
            Fragment::MLIDisj => "MLIDisj",
            Fragment::QPL => "QPL",
            Fragment::QPDL => "QPDL",
            Fragment::QPLInd => "QPLInd",
            Fragment::QPLInc => "QPLInc",
            Fragment::QPLIDisj => "QPLIDisj",
            Fragment::RML => "RML",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fragment {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fragment::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SyntaxError::UnknownFragment(s.to_string()))
    }
}

/// Classifies a set of formulas jointly.
pub fn classify_all<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Result<Fragment, SyntaxError> {
    formulas
        .into_iter()
        .fold(Features::default(), |acc, f| acc.union(f.features()))
        .classify()
}
