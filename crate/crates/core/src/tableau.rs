// SPDX-License-Identifier: Apache-2.0
//! Tableau decision procedure for pointed satisfiability of relational modal
//! logic (RML) over models whose relations are fixed by an oracle.
//!
//! A state `(A, B, C, D)` asks for a world where every formula of `A` holds,
//! every formula of `B` fails, `□φ` holds for `φ ∈ C` and `□φ` fails for
//! `φ ∈ D`. Non-atomic formulas of `A ∪ B` are decomposed one at a time (the
//! one interned first, `A` before `B`); relational atoms branch over the
//! tuples of the relation or of its complement.
//!
//! ```
//! use teamlogic::models::Relation;
//! use teamlogic::parser::parse;
//! use teamlogic::syntax::RelSymbol;
//! use teamlogic::tableau::{rml_satisfiable, TableOracle};
//! let mut o = TableOracle::new();
//! o.insert(RelSymbol(0), Relation::new(1, [vec![true]]));
//! assert!(rml_satisfiable(&parse("S_0(p)").unwrap(), &o).unwrap());
//! assert!(!rml_satisfiable(&parse("S_0(p) & ~p").unwrap(), &o).unwrap());
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::models::{bits_of, KripkeModel, Relation};
use crate::syntax::{Formula, RelSymbol, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("not an RML formula: {0}")]
    Fragment(String),
    #[error("the oracle does not know {0}")]
    UnknownRelation(RelSymbol),
    #[error("{symbol} has arity {expected} but is applied to {got} arguments")]
    Arity { symbol: RelSymbol, expected: usize, got: usize },
}

/// Interpretations of relation symbols, answered by membership queries.
pub trait RelationOracle: Sync {
    fn arity(&self, s: RelSymbol) -> Option<usize>;

    fn contains(&self, s: RelSymbol, tuple: &[bool]) -> bool;

    /// `S^A` in ascending bit order.
    fn members(&self, s: RelSymbol) -> Vec<Vec<bool>> {
        let k = self.arity(s).unwrap_or(0);
        (0..1u64 << k).map(|m| bits_of(m, k)).filter(|t| self.contains(s, t)).collect()
    }

    /// `{0,1}^k ∖ S^A` in ascending bit order.
    fn non_members(&self, s: RelSymbol) -> Vec<Vec<bool>> {
        let k = self.arity(s).unwrap_or(0);
        (0..1u64 << k).map(|m| bits_of(m, k)).filter(|t| !self.contains(s, t)).collect()
    }
}

/// An oracle given by explicit relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableOracle {
    relations: BTreeMap<RelSymbol, Relation>,
}

impl TableOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_model(m: &KripkeModel) -> Self {
        TableOracle {
            relations: m.relations().clone(),
        }
    }

    pub fn insert(&mut self, s: RelSymbol, r: Relation) {
        self.relations.insert(s, r);
    }

    pub fn relations(&self) -> &BTreeMap<RelSymbol, Relation> {
        &self.relations
    }
}

impl RelationOracle for TableOracle {
    fn arity(&self, s: RelSymbol) -> Option<usize> {
        self.relations.get(&s).map(|r| r.arity)
    }

    fn contains(&self, s: RelSymbol, tuple: &[bool]) -> bool {
        self.relations.get(&s).is_some_and(|r| r.contains(tuple))
    }
}

/// Which leaf test is applied once `A ∪ B` contains only variables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LeafRule {
    /// Recurse into `Sat(C, {D}, ∅, ∅)` for every `D ∈ 𝒟` whenever `𝒟` is
    /// non-empty.
    #[default]
    Corrected,
    /// Recurse only when `C ∩ D ≠ ∅`, otherwise accept. Unsound: it accepts
    /// `[]S_0(p) & ~[]p` with `S_0 = {(1)}`.
    AsWritten,
}

/// Input `(A, B, C, D)` of the procedure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableauState {
    pub a: Vec<Formula>,
    pub b: Vec<Formula>,
    pub c: Vec<Formula>,
    pub d: Vec<Formula>,
}

impl TableauState {
    pub fn sat_of(phi: Formula) -> Self {
        TableauState {
            a: vec![phi],
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableauStats {
    pub calls: u64,
    /// Deepest nesting of recursive calls, the outermost call counting 1.
    pub max_depth: usize,
}

#[derive(Debug, Clone)]
enum Node {
    Atom(Var),
    CNeg(u32),
    And(u32, u32),
    Box(u32),
    Rel(RelSymbol, Vec<u32>),
}

#[derive(Debug, Clone)]
struct Tree {
    true_atoms: Vec<u32>,
    children: Vec<Tree>,
}

type Set = Vec<u32>;

fn insert(s: &mut Set, x: u32) {
    if let Err(i) = s.binary_search(&x) {
        s.insert(i, x);
    }
}

fn remove(s: &mut Set, x: u32) {
    if let Ok(i) = s.binary_search(&x) {
        s.remove(i);
    }
}

fn intersects(a: &Set, b: &Set) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

/// One run of the procedure against a fixed oracle.
pub struct Tableau<'o> {
    oracle: &'o dyn RelationOracle,
    rule: LeafRule,
    nodes: Vec<Node>,
    ids: HashMap<Formula, u32>,
    stats: TableauStats,
}

impl<'o> Tableau<'o> {
    pub fn new(oracle: &'o dyn RelationOracle) -> Self {
        Tableau {
            oracle,
            rule: LeafRule::default(),
            nodes: Vec::new(),
            ids: HashMap::new(),
            stats: TableauStats::default(),
        }
    }

    pub fn with_rule(mut self, rule: LeafRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn stats(&self) -> TableauStats {
        self.stats
    }

    /// Ids are handed out in preorder of first occurrence.
    fn intern(&mut self, f: &Formula) -> Result<u32, TableauError> {
        if let Some(&id) = self.ids.get(f) {
            return Ok(id);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node::Atom(Var::reserved()));
        self.ids.insert(f.clone(), id);
        let node = match f {
            Formula::Atom(v) => Node::Atom(v.clone()),
            Formula::CNeg(a) => Node::CNeg(self.intern(a)?),
            Formula::And(a, b) => {
                let x = self.intern(a)?;
                Node::And(x, self.intern(b)?)
            }
            Formula::Box(a) => Node::Box(self.intern(a)?),
            Formula::Rel(s, args) => {
                let expected = self.oracle.arity(*s).ok_or(TableauError::UnknownRelation(*s))?;
                if expected != args.len() {
                    return Err(TableauError::Arity {
                        symbol: *s,
                        expected,
                        got: args.len(),
                    });
                }
                let ids = args.iter().map(|a| self.intern(a)).collect::<Result<_, _>>()?;
                Node::Rel(*s, ids)
            }
            other => return Err(TableauError::Fragment(other.to_string())),
        };
        self.nodes[id as usize] = node;
        Ok(id)
    }

    fn intern_all(&mut self, fs: &[Formula]) -> Result<Set, TableauError> {
        let mut s = Set::new();
        for f in fs {
            insert(&mut s, self.intern(f)?);
        }
        Ok(s)
    }

    fn run(&mut self, state: &TableauState) -> Result<Option<Tree>, TableauError> {
        let a = self.intern_all(&state.a)?;
        let b = self.intern_all(&state.b)?;
        let c = self.intern_all(&state.c)?;
        let d = self.intern_all(&state.d)?;
        Ok(self.go(a, b, c, d, 1))
    }

    /// `Sat(A, B, C, D)`.
    pub fn sat(&mut self, state: &TableauState) -> Result<bool, TableauError> {
        Ok(self.run(state)?.is_some())
    }

    /// A tree model and its root satisfying `state`, if the procedure
    /// accepts. Under [`LeafRule::Corrected`] the model always satisfies the
    /// state; under the literal rule it may not.
    pub fn model(&mut self, state: &TableauState) -> Result<Option<(KripkeModel, usize)>, TableauError> {
        let Some(tree) = self.run(state)? else {
            return Ok(None);
        };
        Ok(Some((self.build(&tree, state)?, 0)))
    }

    fn is_atom(&self, id: u32) -> bool {
        matches!(self.nodes[id as usize], Node::Atom(_))
    }

    fn go(&mut self, mut a: Set, mut b: Set, mut c: Set, mut d: Set, depth: usize) -> Option<Tree> {
        self.stats.calls += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let in_a = a.iter().copied().find(|&x| !self.is_atom(x));
        let pick = in_a.map(|x| (x, true)).or_else(|| b.iter().copied().find(|&x| !self.is_atom(x)).map(|x| (x, false)));
        if let Some((id, positive)) = pick {
            let node = self.nodes[id as usize].clone();
            if positive {
                remove(&mut a, id);
                match node {
                    Node::CNeg(x) => insert(&mut b, x),
                    Node::And(x, y) => {
                        insert(&mut a, x);
                        insert(&mut a, y);
                    }
                    Node::Box(x) => insert(&mut c, x),
                    Node::Rel(s, args) => return self.rel_branch(s, &args, true, &a, &b, &c, &d, depth),
                    Node::Atom(_) => unreachable!(),
                }
                return self.go(a, b, c, d, depth + 1);
            }
            remove(&mut b, id);
            match node {
                Node::CNeg(x) => insert(&mut a, x),
                Node::And(x, y) => {
                    let mut b1 = b.clone();
                    insert(&mut b1, x);
                    if let Some(t) = self.go(a.clone(), b1, c.clone(), d.clone(), depth + 1) {
                        return Some(t);
                    }
                    insert(&mut b, y);
                }
                Node::Box(x) => insert(&mut d, x),
                Node::Rel(s, args) => return self.rel_branch(s, &args, false, &a, &b, &c, &d, depth),
                Node::Atom(_) => unreachable!(),
            }
            return self.go(a, b, c, d, depth + 1);
        }
        if intersects(&a, &b) {
            return None;
        }
        let recurse = match self.rule {
            LeafRule::Corrected => !d.is_empty(),
            LeafRule::AsWritten => intersects(&c, &d),
        };
        let mut children = Vec::new();
        if recurse {
            for &x in &d {
                children.push(self.go(c.clone(), vec![x], Vec::new(), Vec::new(), depth + 1)?);
            }
        }
        Some(Tree {
            true_atoms: a,
            children,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn rel_branch(
        &mut self,
        s: RelSymbol,
        args: &[u32],
        positive: bool,
        a: &Set,
        b: &Set,
        c: &Set,
        d: &Set,
        depth: usize,
    ) -> Option<Tree> {
        let tuples = if positive {
            self.oracle.members(s)
        } else {
            self.oracle.non_members(s)
        };
        for t in tuples {
            let (mut a2, mut b2) = (a.clone(), b.clone());
            for (&x, &bit) in args.iter().zip(&t) {
                insert(if bit { &mut a2 } else { &mut b2 }, x);
            }
            if let Some(tree) = self.go(a2, b2, c.clone(), d.clone(), depth + 1) {
                return Some(tree);
            }
        }
        None
    }

    fn build(&self, tree: &Tree, state: &TableauState) -> Result<KripkeModel, TableauError> {
        let mut worlds: Vec<&Tree> = Vec::new();
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([tree]);
        while let Some(t) = queue.pop_front() {
            let me = worlds.len();
            worlds.push(t);
            for ch in &t.children {
                edges.push((me, me + queue.len() + 1));
                queue.push_back(ch);
            }
        }
        let mut m = KripkeModel::new(worlds.len());
        for (x, y) in edges {
            m.add_edge(x, y).expect("tree edge");
        }
        let mut vars: BTreeSet<Var> = BTreeSet::new();
        for f in state.a.iter().chain(&state.b).chain(&state.c).chain(&state.d) {
            vars.extend(f.vars());
        }
        for v in vars {
            let ws: Vec<usize> = worlds
                .iter()
                .enumerate()
                .filter(|(_, t)| t.true_atoms.iter().any(|&id| matches!(&self.nodes[id as usize], Node::Atom(x) if *x == v)))
                .map(|(w, _)| w)
                .collect();
            m.set_true_at(v, ws).expect("in range");
        }
        for node in &self.nodes {
            if let Node::Rel(s, _) = node {
                if m.relation(*s).is_none() {
                    let k = self.oracle.arity(*s).ok_or(TableauError::UnknownRelation(*s))?;
                    m.set_relation(*s, Relation::new(k, self.oracle.members(*s)));
                }
            }
        }
        Ok(m)
    }
}

/// `Sat(state)` with the default leaf rule.
pub fn sat(state: &TableauState, oracle: &dyn RelationOracle) -> Result<bool, TableauError> {
    Tableau::new(oracle).sat(state)
}

/// `Sat({φ}, ∅, ∅, ∅)`.
pub fn rml_satisfiable(phi: &Formula, oracle: &dyn RelationOracle) -> Result<bool, TableauError> {
    sat(&TableauState::sat_of(phi.clone()), oracle)
}

/// A pointed tree model of `φ`, if there is one.
pub fn rml_model(phi: &Formula, oracle: &dyn RelationOracle) -> Result<Option<(KripkeModel, usize)>, TableauError> {
    Tableau::new(oracle).model(&TableauState::sat_of(phi.clone()))
}
