// SPDX-License-Identifier: Apache-2.0
//! Reference evaluators and enumerators for the acceptance harness. They
//! share no code with the library beyond the AST and model types.
#![allow(dead_code)]

use std::collections::BTreeMap;

use teamlogic::models::{KripkeModel, Relation};
use teamlogic::syntax::{Formula, RelSymbol, Var};

/// One enumerated node. Children always precede their parent.
#[derive(Debug, Clone, Copy)]
pub enum Op {
    Leaf(usize),
    Un(usize, usize),
    Bin(usize, usize, usize),
}

/// Every formula of size at most `max` over the given constructor counts,
/// ordered by size.
pub struct Family {
    pub ops: Vec<Op>,
    pub by_size: Vec<std::ops::Range<usize>>,
}

impl Family {
    pub fn enumerate(leaves: usize, unary: usize, binary: usize, max: usize) -> Family {
        let mut ops = Vec::new();
        let mut by_size: Vec<std::ops::Range<usize>> = vec![0..0];
        for size in 1..=max {
            let start = ops.len();
            if size == 1 {
                ops.extend((0..leaves).map(Op::Leaf));
            } else {
                for u in 0..unary {
                    for c in by_size[size - 1].clone() {
                        ops.push(Op::Un(u, c));
                    }
                }
                for b in 0..binary {
                    for ls in 1..size - 1 {
                        let rs = size - 1 - ls;
                        for l in by_size[ls].clone() {
                            for r in by_size[rs].clone() {
                                ops.push(Op::Bin(b, l, r));
                            }
                        }
                    }
                }
            }
            by_size.push(start..ops.len());
        }
        Family { ops, by_size }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn build(
        &self,
        leaf: impl Fn(usize) -> Formula,
        un: impl Fn(usize, Formula) -> Formula,
        bin: impl Fn(usize, Formula, Formula) -> Formula,
    ) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let f = match *op {
                Op::Leaf(i) => leaf(i),
                Op::Un(u, c) => un(u, out[c].clone()),
                Op::Bin(b, l, r) => bin(b, out[l].clone(), out[r].clone()),
            };
            out.push(f);
        }
        out
    }
}

/// All formulas built from `leaves` with `□`, `◇`, `∧`, `∨` and, when
/// `deps` is set, dependence atoms of arity at most one whose argument and
/// target are such formulas without dependence atoms. Indexed by size.
pub fn modal_formulas(leaves: &[Formula], deps: bool, max: usize) -> Vec<Vec<Formula>> {
    let ml = grow(leaves, max, &|_, _| Vec::new());
    if !deps {
        return ml;
    }
    let dep_atoms = |size: usize, _: &[Vec<Formula>]| {
        let mut out = Vec::new();
        for t in &ml[size - 1] {
            out.push(Formula::dep(vec![], t.clone()));
        }
        for a in 1..size.saturating_sub(1) {
            for x in &ml[a] {
                for t in &ml[size - 1 - a] {
                    out.push(Formula::dep(vec![x.clone()], t.clone()));
                }
            }
        }
        out
    };
    grow(leaves, max, &dep_atoms)
}

fn grow(leaves: &[Formula], max: usize, atoms: &dyn Fn(usize, &[Vec<Formula>]) -> Vec<Formula>) -> Vec<Vec<Formula>> {
    let mut by: Vec<Vec<Formula>> = vec![Vec::new(), leaves.to_vec()];
    for size in 2..=max {
        let mut cur = atoms(size, &by);
        for f in &by[size - 1] {
            cur.push(Formula::nec(f.clone()));
            cur.push(Formula::diamond(f.clone()));
        }
        for ls in 1..size - 1 {
            for l in &by[ls] {
                for r in &by[size - 1 - ls] {
                    cur.push(Formula::and(l.clone(), r.clone()));
                    cur.push(Formula::or(l.clone(), r.clone()));
                }
            }
        }
        by.push(cur);
    }
    by
}

/// A model with at most 32 worlds as bit masks.
#[derive(Debug, Clone)]
pub struct Frame {
    pub n: usize,
    pub succ: Vec<u32>,
    pub val: BTreeMap<Var, u32>,
    pub rels: BTreeMap<RelSymbol, Relation>,
}

impl Frame {
    pub fn of(m: &KripkeModel) -> Frame {
        let n = m.worlds();
        let succ = (0..n).map(|w| m.succ(w).iter().fold(0u32, |a, &v| a | 1 << v)).collect();
        let val = m
            .vars()
            .map(|v| {
                let mask = (0..n).filter(|&w| m.holds(v, w) == Some(true)).fold(0u32, |a, w| a | 1 << w);
                (v.clone(), mask)
            })
            .collect();
        Frame {
            n,
            succ,
            val,
            rels: m.relations().clone(),
        }
    }

    /// A tree from a parent array (`parent[0]` is ignored).
    pub fn tree(parent: &[usize]) -> Frame {
        let n = parent.len();
        let mut succ = vec![0u32; n];
        for (w, &p) in parent.iter().enumerate().skip(1) {
            succ[p] |= 1 << w;
        }
        Frame {
            n,
            succ,
            val: BTreeMap::new(),
            rels: BTreeMap::new(),
        }
    }

    pub fn all(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    pub fn image(&self, t: u32) -> u32 {
        (0..self.n).filter(|w| t >> w & 1 == 1).fold(0, |a, w| a | self.succ[w])
    }

    fn boxed(&self, e: u32) -> u32 {
        (0..self.n).filter(|&w| self.succ[w] & !e == 0).fold(0, |a, w| a | 1 << w)
    }

    fn dia(&self, e: u32) -> u32 {
        (0..self.n).filter(|&w| self.succ[w] & e != 0).fold(0, |a, w| a | 1 << w)
    }

    /// Worlds `n` steps from `t`.
    pub fn steps(&self, t: u32, n: usize) -> u32 {
        (0..n).fold(t, |x, _| self.image(x))
    }
}

/// Classical extension of an ML, ML(⋁) or RML formula.
pub fn ext(m: &Frame, phi: &Formula) -> u32 {
    let all = m.all();
    match phi {
        Formula::Atom(v) => m.val.get(v).copied().unwrap_or(0),
        Formula::NegAtom(v) => all & !m.val.get(v).copied().unwrap_or(0),
        Formula::And(a, b) => ext(m, a) & ext(m, b),
        Formula::Or(a, b) | Formula::IDisj(a, b) => ext(m, a) | ext(m, b),
        Formula::Box(a) => m.boxed(ext(m, a)),
        Formula::Diamond(a) => m.dia(ext(m, a)),
        Formula::CNeg(a) => all & !ext(m, a),
        Formula::Rel(s, args) => {
            let exts: Vec<u32> = args.iter().map(|a| ext(m, a)).collect();
            let rel = m.rels.get(s);
            (0..m.n)
                .filter(|&w| {
                    let tuple: Vec<bool> = exts.iter().map(|e| e >> w & 1 == 1).collect();
                    rel.is_some_and(|r| r.contains(&tuple))
                })
                .fold(0, |a, w| a | 1 << w)
        }
        other => panic!("not classical: {other}"),
    }
}

/// Sets of teams of a model with at most 6 worlds, as 64-bit masks indexed
/// by the team's world mask.
pub struct Teams<'m> {
    pub m: &'m Frame,
    count: usize,
    image: Vec<u32>,
    /// For each team, the set of its successor teams.
    succ_teams: Vec<u64>,
}

impl<'m> Teams<'m> {
    pub fn new(m: &'m Frame) -> Self {
        assert!(m.n <= 6);
        let count = 1usize << m.n;
        let image: Vec<u32> = (0..count as u32).map(|t| m.image(t)).collect();
        let succ_teams = (0..count as u32)
            .map(|t| {
                let mut s = 0u64;
                for u in 0..count as u32 {
                    let legal = u & !image[t as usize] == 0
                        && (0..m.n).filter(|w| t >> w & 1 == 1).all(|w| m.succ[w] & u != 0);
                    if legal {
                        s |= 1 << u;
                    }
                }
                s
            })
            .collect();
        Teams {
            m,
            count,
            image,
            succ_teams,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn subsets_of(&self, e: u32) -> u64 {
        (0..self.count as u32).filter(|t| t & !e == 0).fold(0, |a, t| a | 1 << t)
    }

    /// The teams satisfying an EMDL or ML(⋁) formula under lax semantics.
    pub fn sat(&self, phi: &Formula) -> u64 {
        let n = self.count as u32;
        match phi {
            Formula::Atom(_) | Formula::NegAtom(_) => self.subsets_of(ext(self.m, phi)),
            Formula::And(a, b) => self.sat(a) & self.sat(b),
            Formula::IDisj(a, b) => self.sat(a) | self.sat(b),
            Formula::Or(a, b) => {
                let (x, y) = (self.sat(a), self.sat(b));
                let mut out = 0;
                for t in 0..n {
                    let split = (0..n).filter(|l| l & !t == 0 && x >> l & 1 == 1).any(|l| {
                        (0..n).any(|r| r & !t == 0 && l | r == t && y >> r & 1 == 1)
                    });
                    if split {
                        out |= 1 << t;
                    }
                }
                out
            }
            Formula::Box(a) => {
                let x = self.sat(a);
                (0..n).filter(|&t| x >> self.image[t as usize] & 1 == 1).fold(0, |o, t| o | 1 << t)
            }
            Formula::Diamond(a) => {
                let x = self.sat(a);
                (0..n).filter(|&t| self.succ_teams[t as usize] & x != 0).fold(0, |o, t| o | 1 << t)
            }
            Formula::Dep { args, target } => {
                let a: Vec<u32> = args.iter().map(|f| ext(self.m, f)).collect();
                let b = ext(self.m, target);
                let val = |e: u32, w: usize| e >> w & 1;
                let mut out = 0;
                for t in 0..n {
                    let ws: Vec<usize> = (0..self.m.n).filter(|w| t >> w & 1 == 1).collect();
                    let ok = ws.iter().all(|&u| {
                        ws.iter().all(|&v| !a.iter().all(|&e| val(e, u) == val(e, v)) || val(b, u) == val(b, v))
                    });
                    if ok {
                        out |= 1 << t;
                    }
                }
                out
            }
            other => panic!("unsupported: {other}"),
        }
    }
}

/// Team semantics over the four assignments to `p, q`. Row `r` has
/// `p = r >> 1 & 1`, `q = r & 1`; a team is a 4-bit mask and a set of teams
/// a 16-bit mask.
pub mod pq {
    use teamlogic::models::PropTeam;
    use teamlogic::syntax::{Formula, Var};

    pub const TEAMS: u32 = 16;

    fn index(v: &Var) -> usize {
        match v.name() {
            "p" => 0,
            "q" => 1,
            other => panic!("variable {other} outside p, q"),
        }
    }

    fn bit(row: u32, var: usize) -> u32 {
        if var == 0 {
            row >> 1 & 1
        } else {
            row & 1
        }
    }

    fn rows(t: u32) -> impl Iterator<Item = u32> {
        (0..4).filter(move |r| t >> r & 1 == 1)
    }

    fn tuple(row: u32, vars: &[Var]) -> Vec<u32> {
        vars.iter().map(|v| bit(row, index(v))).collect()
    }

    /// The values of the other variable occurring in `t`.
    fn other_values(t: u32, var: usize) -> u32 {
        rows(t).fold(0, |a, r| a | 1 << bit(r, 1 - var))
    }

    fn collect(f: impl Fn(u32) -> bool) -> u32 {
        (0..TEAMS).filter(|&t| f(t)).fold(0, |a, t| a | 1 << t)
    }

    pub fn sat(phi: &Formula) -> u32 {
        match phi {
            Formula::Atom(v) | Formula::NegAtom(v) => {
                let want = matches!(phi, Formula::Atom(_)) as u32;
                let i = index(v);
                collect(|t| rows(t).all(|r| bit(r, i) == want))
            }
            Formula::Inc { left, right } => collect(|t| {
                rows(t).all(|r| rows(t).any(|s| tuple(r, left) == tuple(s, right)))
            }),
            Formula::Dep { args, target } => {
                let vars: Vec<Var> = args
                    .iter()
                    .map(|a| match a {
                        Formula::Atom(v) => v.clone(),
                        other => panic!("extended argument {other}"),
                    })
                    .collect();
                let Formula::Atom(tv) = target.as_ref() else { panic!("extended target") };
                let tv = index(tv);
                collect(|t| {
                    rows(t).all(|r| rows(t).all(|s| tuple(r, &vars) != tuple(s, &vars) || bit(r, tv) == bit(s, tv)))
                })
            }
            Formula::And(a, b) => sat(a) & sat(b),
            Formula::IDisj(a, b) => sat(a) | sat(b),
            Formula::Or(a, b) => {
                let (x, y) = (sat(a), sat(b));
                collect(|t| {
                    (0..TEAMS).any(|l| {
                        l & !t == 0 && x >> l & 1 == 1 && (0..TEAMS).any(|r| l | r == t && y >> r & 1 == 1)
                    })
                })
            }
            Formula::Exists(v, body) => {
                let i = index(v);
                let x = sat(body);
                collect(|t| (0..TEAMS).any(|u| x >> u & 1 == 1 && other_values(u, i) == other_values(t, i)))
            }
            Formula::Forall(v, body) => {
                let i = index(v);
                let x = sat(body);
                collect(|t| {
                    let keep = other_values(t, i);
                    let full = (0..4).filter(|&r| keep >> bit(r, 1 - i) & 1 == 1).fold(0u32, |a, r| a | 1 << r);
                    x >> full & 1 == 1
                })
            }
            other => panic!("unsupported: {other}"),
        }
    }

    /// The team over `p, q` with the given row mask.
    pub fn team(t: u32) -> PropTeam {
        let rows = super::pq::rows(t).map(|r| vec![bit(r, 0) == 1, bit(r, 1) == 1]);
        PropTeam::new(vec![Var::new("p"), Var::new("q")], rows).expect("valid")
    }

    /// The row mask of a team over `p, q`.
    pub fn mask(x: &PropTeam) -> u32 {
        let (p, q) = (Var::new("p"), Var::new("q"));
        x.rows()
            .map(|row| {
                let r = (x.value(row, &p).unwrap() as u32) << 1 | x.value(row, &q).unwrap() as u32;
                1 << r
            })
            .fold(0, |a, b| a | b)
    }
}

/// Classical truth of a QPL formula under an assignment.
pub fn classical_prop(a: &mut BTreeMap<Var, bool>, phi: &Formula) -> bool {
    match phi {
        Formula::Atom(v) => a[v],
        Formula::NegAtom(v) => !a[v],
        Formula::And(x, y) => classical_prop(a, x) && classical_prop(a, y),
        Formula::Or(x, y) | Formula::IDisj(x, y) => classical_prop(a, x) || classical_prop(a, y),
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let old = a.get(v).copied();
            let mut results = [false; 2];
            for (i, val) in [false, true].into_iter().enumerate() {
                a.insert(v.clone(), val);
                results[i] = classical_prop(a, b);
            }
            match old {
                Some(o) => a.insert(v.clone(), o),
                None => a.remove(v),
            };
            if matches!(phi, Formula::Exists(..)) {
                results[0] || results[1]
            } else {
                results[0] && results[1]
            }
        }
        other => panic!("not classical: {other}"),
    }
}

/// Parent arrays of every rooted tree with at most `max` worlds, children
/// numbered after their parents.
pub fn parent_arrays(max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![vec![0usize]];
    for _ in 0..max {
        out.extend(cur.iter().cloned());
        let mut next = Vec::new();
        for p in &cur {
            for parent in 0..p.len() {
                let mut q = p.clone();
                q.push(parent);
                next.push(q);
            }
        }
        cur = next;
    }
    out
}

/// Unordered trees of depth at most `depth` with at most two children per
/// node, as parent arrays.
pub fn binary_shapes(depth: usize) -> Vec<Vec<usize>> {
    #[derive(Clone)]
    struct Shape(Vec<Shape>);
    fn shapes(d: usize) -> Vec<Shape> {
        if d == 0 {
            return vec![Shape(vec![])];
        }
        let sub = shapes(d - 1);
        let mut out = vec![Shape(vec![])];
        for i in 0..sub.len() {
            out.push(Shape(vec![sub[i].clone()]));
            for j in i..sub.len() {
                out.push(Shape(vec![sub[i].clone(), sub[j].clone()]));
            }
        }
        out
    }
    fn flatten(s: &Shape, parent: usize, out: &mut Vec<usize>) {
        let me = out.len();
        out.push(parent);
        for c in &s.0 {
            flatten(c, me, out);
        }
    }
    shapes(depth)
        .iter()
        .map(|s| {
            let mut out = Vec::new();
            flatten(s, 0, &mut out);
            out
        })
        .collect()
}
