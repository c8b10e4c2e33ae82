// SPDX-License-Identifier: Apache-2.0
//! Kripke models, teams of worlds and propositional teams.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{RelSymbol, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("world {world} out of range for a model with {worlds} worlds")]
    WorldOutOfRange { world: usize, worlds: usize },
    #[error("row {row} has {got} values, expected {expected}")]
    RowArity { row: usize, got: usize, expected: usize },
    #[error("variable `{0}` is not in the team domain")]
    MissingVar(Var),
    #[error("variable `{0}` occurs twice in the domain")]
    DuplicateVar(Var),
    #[error("relation {symbol} mixes tuple arities {a} and {b}")]
    MixedArity { symbol: RelSymbol, a: usize, b: usize },
    #[error("supplement function is undefined or empty on row {0}")]
    BadSupplement(usize),
    #[error("team domain has {0} variables; at most 64 are supported")]
    DomainTooLarge(usize),
}

/// A set of worlds of one Kripke model.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Team(BTreeSet<usize>);

impl Team {
    pub fn new(worlds: impl IntoIterator<Item = usize>) -> Team {
        Team(worlds.into_iter().collect())
    }

    pub fn empty() -> Team {
        Team::default()
    }

    pub fn singleton(w: usize) -> Team {
        Team::new([w])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, w: usize) -> bool {
        self.0.contains(&w)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &Team) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Team) -> Team {
        Team(self.0.union(&other.0).copied().collect())
    }

    pub fn insert(&mut self, w: usize) {
        self.0.insert(w);
    }

    pub fn remove(&mut self, w: usize) {
        self.0.remove(&w);
    }
}

impl FromIterator<usize> for Team {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Team::new(iter)
    }
}

/// A Boolean relation of fixed arity on truth values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<bool>>,
}

impl Relation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Vec<bool>>) -> Relation {
        let tuples: BTreeSet<Vec<bool>> = tuples.into_iter().collect();
        debug_assert!(tuples.iter().all(|t| t.len() == arity));
        Relation { arity, tuples }
    }

    pub fn contains(&self, tuple: &[bool]) -> bool {
        self.tuples.contains(tuple)
    }
}

/// A Kripke model, optionally carrying Boolean relations for relational atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: usize,
    succ: Vec<Vec<usize>>,
    val: BTreeMap<Var, Vec<bool>>,
    relations: BTreeMap<RelSymbol, Relation>,
}

impl KripkeModel {
    /// A model with `worlds` worlds, no edges and an empty valuation.
    pub fn new(worlds: usize) -> KripkeModel {
        KripkeModel {
            worlds,
            succ: vec![Vec::new(); worlds],
            val: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn all_worlds(&self) -> Team {
        Team::new(0..self.worlds)
    }

    fn check_world(&self, w: usize) -> Result<(), ModelError> {
        if w < self.worlds {
            Ok(())
        } else {
            Err(ModelError::WorldOutOfRange {
                world: w,
                worlds: self.worlds,
            })
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<(), ModelError> {
        self.check_world(from)?;
        self.check_world(to)?;
        let s = &mut self.succ[from];
        if let Err(i) = s.binary_search(&to) {
            s.insert(i, to);
        }
        Ok(())
    }

    /// Declares `v` with the given set of worlds where it holds.
    pub fn set_true_at(&mut self, v: Var, worlds: impl IntoIterator<Item = usize>) -> Result<(), ModelError> {
        let mut bits = vec![false; self.worlds];
        for w in worlds {
            self.check_world(w)?;
            bits[w] = true;
        }
        self.val.insert(v, bits);
        Ok(())
    }

    /// Sets the truth value of `v` at one world, declaring `v` if needed.
    pub fn set_val(&mut self, v: &Var, w: usize, value: bool) -> Result<(), ModelError> {
        self.check_world(w)?;
        let n = self.worlds;
        self.val.entry(v.clone()).or_insert_with(|| vec![false; n])[w] = value;
        Ok(())
    }

    pub fn set_relation(&mut self, s: RelSymbol, r: Relation) {
        self.relations.insert(s, r);
    }

    pub fn relation(&self, s: RelSymbol) -> Option<&Relation> {
        self.relations.get(&s)
    }

    pub fn relations(&self) -> &BTreeMap<RelSymbol, Relation> {
        &self.relations
    }

    /// Truth value of `v` at `w`; `None` if `v` is not in the valuation domain.
    pub fn holds(&self, v: &Var, w: usize) -> Option<bool> {
        self.val.get(v).map(|bits| bits[w])
    }

    pub fn valuation(&self, v: &Var) -> Option<&[bool]> {
        self.val.get(v).map(Vec::as_slice)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.val.keys()
    }

    pub fn succ(&self, w: usize) -> &[usize] {
        &self.succ[w]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(w, s)| s.iter().map(move |&v| (w, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// `R[T]`: every successor of a world of `T`.
    pub fn successors(&self, t: &Team) -> Team {
        t.iter().flat_map(|w| self.succ[w].iter().copied()).collect()
    }

    /// `R⟨T⟩` in ascending bitmask order over the elements of `R[T]`.
    ///
    /// ```
    /// use teamlogic::models::{KripkeModel, Team};
    /// let mut m = KripkeModel::new(3);
    /// m.add_edge(0, 1).unwrap();
    /// m.add_edge(0, 2).unwrap();
    /// let ts: Vec<Team> = m.successor_teams(&Team::singleton(0)).collect();
    /// assert_eq!(ts, vec![Team::new([1]), Team::new([2]), Team::new([1, 2])]);
    /// ```
    pub fn successor_teams<'a>(&'a self, t: &'a Team) -> impl Iterator<Item = Team> + 'a {
        let image: Vec<usize> = self.successors(t).iter().collect();
        let n = image.len();
        assert!(n < 64, "successor image too large to enumerate");
        let start: u64 = if t.is_empty() { 0 } else { 1 };
        (start..(1u64 << n)).filter_map(move |mask| {
            let cand: Team = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| image[i]).collect();
            t.iter()
                .all(|w| self.succ[w].iter().any(|v| cand.contains(*v)))
                .then_some(cand)
        })
    }

    /// Disjoint union; returns the offset of each component.
    pub fn disjoint_union(parts: &[KripkeModel]) -> (KripkeModel, Vec<usize>) {
        let total = parts.iter().map(|m| m.worlds).sum();
        let mut out = KripkeModel::new(total);
        let mut offsets = Vec::with_capacity(parts.len());
        let mut off = 0;
        for m in parts {
            offsets.push(off);
            for (a, b) in m.edges() {
                out.succ[a + off].push(b + off);
            }
            for v in m.val.keys() {
                out.val.entry(v.clone()).or_insert_with(|| vec![false; total]);
            }
            for (v, bits) in &m.val {
                let dst = out.val.get_mut(v).expect("declared above");
                dst[off..off + m.worlds].copy_from_slice(bits);
            }
            for (s, r) in &m.relations {
                out.relations.entry(*s).or_insert_with(|| r.clone());
            }
            off += m.worlds;
        }
        (out, offsets)
    }

    /// The same frame and valuation with no relation interpretations.
    pub fn without_relations(&self) -> KripkeModel {
        let mut out = self.clone();
        out.relations.clear();
        out
    }

    /// Restricts to worlds reachable from `t`, renumbering them in
    /// breadth-first order. Returns the new model and the image of `t`.
    pub fn reachable_part(&self, t: &Team) -> (KripkeModel, Team) {
        let mut order: Vec<usize> = t.iter().collect();
        let mut index = vec![usize::MAX; self.worlds];
        for (i, &w) in order.iter().enumerate() {
            index[w] = i;
        }
        let mut head = 0;
        while head < order.len() {
            let w = order[head];
            head += 1;
            for &v in &self.succ[w] {
                if index[v] == usize::MAX {
                    index[v] = order.len();
                    order.push(v);
                }
            }
        }
        let mut out = KripkeModel::new(order.len());
        for (i, &w) in order.iter().enumerate() {
            out.succ[i] = self.succ[w].iter().map(|&v| index[v]).collect();
            out.succ[i].sort_unstable();
        }
        for (v, bits) in &self.val {
            out.val.insert(v.clone(), order.iter().map(|&w| bits[w]).collect());
        }
        out.relations = self.relations.clone();
        let team = t.iter().map(|w| index[w]).collect();
        (out, team)
    }
}

/// Value set used by [`PropTeam::supplement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    Zero,
    One,
    Both,
}

impl Choice {
    /// Enumeration order used by the quantifier search.
    pub const ORDER: [Choice; 3] = [Choice::Zero, Choice::One, Choice::Both];

    pub fn values(self) -> &'static [bool] {
        match self {
            Choice::Zero => &[false],
            Choice::One => &[true],
            Choice::Both => &[false, true],
        }
    }
}

/// A propositional team: a set of assignments over an ordered domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropTeam {
    domain: Vec<Var>,
    rows: BTreeSet<Vec<bool>>,
}

impl PropTeam {
    pub fn new(domain: Vec<Var>, rows: impl IntoIterator<Item = Vec<bool>>) -> Result<PropTeam, ModelError> {
        for (i, v) in domain.iter().enumerate() {
            if domain[..i].contains(v) {
                return Err(ModelError::DuplicateVar(v.clone()));
            }
        }
        if domain.len() > 64 {
            return Err(ModelError::DomainTooLarge(domain.len()));
        }
        let mut set = BTreeSet::new();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != domain.len() {
                return Err(ModelError::RowArity {
                    row: i,
                    got: r.len(),
                    expected: domain.len(),
                });
            }
            set.insert(r);
        }
        Ok(PropTeam { domain, rows: set })
    }

    pub fn empty(domain: Vec<Var>) -> PropTeam {
        PropTeam::new(domain, []).expect("empty team is valid")
    }

    /// `{∅}`: the team holding the single empty assignment.
    pub fn unit() -> PropTeam {
        PropTeam::new(Vec::new(), [Vec::new()]).expect("valid")
    }

    /// All `2^|domain|` assignments.
    pub fn full(domain: Vec<Var>) -> PropTeam {
        let k = domain.len();
        let rows = (0..1u64 << k).map(|m| bits_of(m, k));
        PropTeam::new(domain, rows).expect("valid")
    }

    /// Every team over `domain`, in ascending bitmask order over the
    /// assignments of [`PropTeam::full`].
    pub fn all_teams(domain: &[Var]) -> impl Iterator<Item = PropTeam> + '_ {
        let k = domain.len();
        assert!(k <= 5, "too many variables to enumerate all teams");
        let n = 1usize << k;
        (0..1u64 << n).map(move |mask| {
            let rows = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| bits_of(i as u64, k));
            PropTeam::new(domain.to_vec(), rows).expect("valid")
        })
    }

    pub fn domain(&self) -> &[Var] {
        &self.domain
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<bool>> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: &[bool]) -> bool {
        self.rows.contains(row)
    }

    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.domain.iter().position(|d| d == v)
    }

    pub fn value(&self, row: &[bool], v: &Var) -> Option<bool> {
        self.index_of(v).map(|i| row[i])
    }

    pub fn is_subteam_of(&self, other: &PropTeam) -> bool {
        self.domain == other.domain && self.rows.is_subset(&other.rows)
    }

    pub fn union(&self, other: &PropTeam) -> Result<PropTeam, ModelError> {
        let other = other.reorder(&self.domain)?;
        Ok(PropTeam {
            domain: self.domain.clone(),
            rows: self.rows.union(&other.rows).cloned().collect(),
        })
    }

    /// The same team over a permutation of its domain.
    pub fn reorder(&self, domain: &[Var]) -> Result<PropTeam, ModelError> {
        if domain.len() != self.domain.len() {
            return Err(ModelError::RowArity {
                row: 0,
                got: domain.len(),
                expected: self.domain.len(),
            });
        }
        let idx = domain
            .iter()
            .map(|v| self.index_of(v).ok_or_else(|| ModelError::MissingVar(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect());
        PropTeam::new(domain.to_vec(), rows)
    }

    /// Keeps the rows satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&[bool]) -> bool) -> PropTeam {
        PropTeam {
            domain: self.domain.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn without_row(&self, row: &[bool]) -> PropTeam {
        self.filter(|r| r != row)
    }

    /// `X[F/p]`. A variable already in the domain is overwritten.
    pub fn supplement(&self, p: &Var, f: impl Fn(&[bool]) -> Option<Choice>) -> Result<PropTeam, ModelError> {
        let (domain, slot) = match self.index_of(p) {
            Some(i) => (self.domain.clone(), i),
            None => {
                let mut d = self.domain.clone();
                d.push(p.clone());
                let n = d.len() - 1;
                (d, n)
            }
        };
        let mut rows = BTreeSet::new();
        for (i, r) in self.rows.iter().enumerate() {
            let choice = f(r).ok_or(ModelError::BadSupplement(i))?;
            for &a in choice.values() {
                let mut s = r.clone();
                if slot == s.len() {
                    s.push(a);
                } else {
                    s[slot] = a;
                }
                rows.insert(s);
            }
        }
        PropTeam::new(domain, rows)
    }

    /// `X[{0,1}/p]`.
    ///
    /// ```
    /// use teamlogic::models::PropTeam;
    /// use teamlogic::syntax::Var;
    /// let x = PropTeam::new(vec![Var::new("q")], [vec![true]]).unwrap();
    /// let d = x.duplicate(&Var::new("p"));
    /// assert_eq!(d.len(), 2);
    /// assert_eq!(d.domain(), &[Var::new("q"), Var::new("p")]);
    /// ```
    pub fn duplicate(&self, p: &Var) -> PropTeam {
        self.supplement(p, |_| Some(Choice::Both)).expect("total supplement")
    }

    /// `X ↾ V′`, keeping the domain order of `X`.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Result<PropTeam, ModelError> {
        if let Some(v) = vars.iter().find(|v| self.index_of(v).is_none()) {
            return Err(ModelError::MissingVar(v.clone()));
        }
        let keep: Vec<usize> = (0..self.domain.len()).filter(|&i| vars.contains(&self.domain[i])).collect();
        let domain = keep.iter().map(|&i| self.domain[i].clone()).collect();
        let rows = self.rows.iter().map(|r| keep.iter().map(|&i| r[i]).collect::<Vec<bool>>());
        PropTeam::new(domain, rows)
    }

    /// `(M_X, T_X)`: one world per row, no edges.
    pub fn induced_kripke(&self) -> (KripkeModel, Team) {
        let mut m = KripkeModel::new(self.rows.len());
        for (i, v) in self.domain.iter().enumerate() {
            let worlds = self.rows.iter().enumerate().filter(|(_, r)| r[i]).map(|(w, _)| w);
            m.set_true_at(v.clone(), worlds).expect("in range");
        }
        let t = m.all_worlds();
        (m, t)
    }
}

/// The `k` low bits of `m`, most significant first.
pub fn bits_of(m: u64, k: usize) -> Vec<bool> {
    (0..k).map(|i| m >> (k - 1 - i) & 1 == 1).collect()
}

/// Inverse of [`bits_of`].
pub fn index_of_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u64)
}
