// SPDX-License-Identifier: Apache-2.0
//! Seeded random formulas, teams and models for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::models::{KripkeModel, PropTeam, Relation, Team};
use crate::syntax::{Fragment, Formula, RelSymbol, Var};

/// Which node kinds a [`FormulaGen`] may emit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Nodes {
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
}

/// Random formula generator. Sizes are drawn uniformly from `1..=max_size`.
#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub vars: Vec<Var>,
    pub nodes: Nodes,
    pub max_size: usize,
    pub max_deps: usize,
    pub max_dep_arity: usize,
    pub max_quantifiers: usize,
    pub max_list_len: usize,
    pub relations: Vec<(RelSymbol, usize)>,
}

#[derive(Default)]
struct State {
    deps: usize,
    quants: usize,
}

#[derive(Clone, Copy)]
enum Kind {
    And,
    Or,
    IDisj,
    Nec,
    Pos,
    CNeg,
    Exists,
    Forall,
    ExtDep,
    Rel(usize),
}

impl FormulaGen {
    pub fn new(vars: &[&str], nodes: Nodes) -> FormulaGen {
        FormulaGen {
            vars: vars.iter().map(|v| Var::new(v)).collect(),
            nodes,
            max_size: 10,
            max_deps: 2,
            max_dep_arity: 2,
            max_quantifiers: 2,
            max_list_len: 2,
            relations: Vec::new(),
        }
    }

    /// A generator exercising every node kind of `frag` over `p, q, r`.
    pub fn for_fragment(frag: Fragment) -> FormulaGen {
        let allowed = frag.allowed();
        let nodes = Nodes {
            neg_atom: allowed.neg_atom,
            or: allowed.or,
            idisj: allowed.idisj,
            nec: allowed.nec,
            diamond: allowed.diamond,
            dep: allowed.dep,
            ext_dep: allowed.ext_dep,
            ind: allowed.ind,
            inc: allowed.inc,
            quant: allowed.quant,
            cneg: allowed.cneg,
        };
        let mut g = FormulaGen::new(&["p", "q", "r"], nodes);
        if allowed.rel {
            g.relations = vec![(RelSymbol(0), 1), (RelSymbol(1), 2), (RelSymbol(2), 0)];
        }
        g
    }

    pub fn with_vars(mut self, vars: &[&str]) -> Self {
        self.vars = vars.iter().map(|v| Var::new(v)).collect();
        self
    }

    pub fn with_max_size(mut self, n: usize) -> Self {
        self.max_size = n;
        self
    }

    pub fn with_deps(mut self, count: usize, arity: usize) -> Self {
        self.max_deps = count;
        self.max_dep_arity = arity;
        self
    }

    pub fn with_quantifiers(mut self, n: usize) -> Self {
        self.max_quantifiers = n;
        self
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        let size = rng.gen_range(1..=self.max_size.max(1));
        self.sized(rng, size)
    }

    /// A formula of roughly `size` nodes.
    pub fn sized<R: Rng + ?Sized>(&self, rng: &mut R, size: usize) -> Formula {
        self.node(rng, size.max(1), &mut State::default())
    }

    fn var<R: Rng + ?Sized>(&self, rng: &mut R) -> Var {
        self.vars.choose(rng).expect("at least one variable").clone()
    }

    fn vars_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.var(rng)).collect()
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R, st: &mut State) -> Formula {
        let n = &self.nodes;
        let mut opts: Vec<u8> = vec![0];
        if n.neg_atom {
            opts.push(1);
        }
        let team_atoms = st.deps < self.max_deps;
        if n.dep && team_atoms {
            opts.extend([2, 2]);
        }
        if n.ind && team_atoms {
            opts.extend([3, 3]);
        }
        if n.inc && team_atoms {
            opts.extend([4, 4]);
        }
        if self.relations.iter().any(|r| r.1 == 0) {
            opts.push(5);
        }
        match *opts.choose(rng).expect("non-empty") {
            0 => Formula::Atom(self.var(rng)),
            1 => Formula::NegAtom(self.var(rng)),
            2 => {
                st.deps += 1;
                let k = rng.gen_range(0..=self.max_dep_arity);
                let args = self.vars_n(rng, k).into_iter().map(Formula::Atom).collect();
                Formula::dep(args, Formula::Atom(self.var(rng)))
            }
            3 => {
                st.deps += 1;
                let c = rng.gen_range(0..=self.max_list_len);
                let l = rng.gen_range(1..=self.max_list_len.max(1));
                let r = rng.gen_range(1..=self.max_list_len.max(1));
                Formula::ind(self.vars_n(rng, c), self.vars_n(rng, l), self.vars_n(rng, r))
            }
            4 => {
                st.deps += 1;
                let k = rng.gen_range(1..=self.max_list_len.max(1));
                Formula::inc(self.vars_n(rng, k), self.vars_n(rng, k))
            }
            _ => {
                let zero: Vec<RelSymbol> = self.relations.iter().filter(|r| r.1 == 0).map(|r| r.0).collect();
                Formula::Rel(*zero.choose(rng).expect("checked"), Vec::new())
            }
        }
    }

    fn classical(&self) -> FormulaGen {
        let mut g = self.clone();
        g.nodes = Nodes {
            neg_atom: true,
            or: true,
            nec: self.nodes.nec || self.nodes.diamond,
            diamond: self.nodes.nec || self.nodes.diamond,
            ..Nodes::default()
        };
        g
    }

    fn node<R: Rng + ?Sized>(&self, rng: &mut R, budget: usize, st: &mut State) -> Formula {
        if budget <= 1 {
            return self.leaf(rng, st);
        }
        let n = &self.nodes;
        let mut opts = Vec::new();
        if budget >= 3 {
            opts.push(Kind::And);
            if n.or {
                opts.push(Kind::Or);
            }
            if n.idisj {
                opts.push(Kind::IDisj);
            }
            if n.ext_dep && st.deps < self.max_deps {
                opts.push(Kind::ExtDep);
            }
        }
        if n.nec {
            opts.push(Kind::Nec);
        }
        if n.diamond {
            opts.push(Kind::Pos);
        }
        if n.cneg {
            opts.push(Kind::CNeg);
        }
        if n.quant && st.quants < self.max_quantifiers {
            opts.extend([Kind::Exists, Kind::Forall]);
        }
        for &(_, arity) in &self.relations {
            if arity > 0 && budget > arity {
                opts.push(Kind::Rel(arity));
            }
        }
        let Some(&kind) = opts.choose(rng) else {
            return self.leaf(rng, st);
        };
        let rest = budget - 1;
        match kind {
            Kind::And | Kind::Or | Kind::IDisj => {
                let l = rng.gen_range(1..rest);
                let a = self.node(rng, l, st);
                let b = self.node(rng, rest - l, st);
                match kind {
                    Kind::And => Formula::and(a, b),
                    Kind::Or => Formula::or(a, b),
                    _ => Formula::idisj(a, b),
                }
            }
            Kind::Nec => Formula::nec(self.node(rng, rest, st)),
            Kind::Pos => Formula::diamond(self.node(rng, rest, st)),
            Kind::CNeg => Formula::cneg(self.node(rng, rest, st)),
            Kind::Exists | Kind::Forall => {
                st.quants += 1;
                let v = self.var(rng);
                let body = self.node(rng, rest, st);
                if matches!(kind, Kind::Exists) {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
            Kind::ExtDep => {
                st.deps += 1;
                let ml = self.classical();
                let k = rng.gen_range(0..=self.max_dep_arity.min(rest - 1));
                let mut sizes = vec![1usize; k + 1];
                for _ in 0..rest.saturating_sub(k + 1) {
                    let i = rng.gen_range(0..=k);
                    sizes[i] += 1;
                }
                let mut parts: Vec<Formula> = sizes.iter().map(|&s| ml.sized(rng, s)).collect();
                let target = parts.pop().expect("k+1 parts");
                Formula::dep(parts, target)
            }
            Kind::Rel(arity) => {
                let syms: Vec<RelSymbol> = self.relations.iter().filter(|r| r.1 == arity).map(|r| r.0).collect();
                let sym = *syms.choose(rng).expect("present");
                let mut sizes = vec![1usize; arity];
                for _ in 0..rest - arity {
                    let i = rng.gen_range(0..arity);
                    sizes[i] += 1;
                }
                let args = sizes.iter().map(|&s| self.node(rng, s, st)).collect();
                Formula::Rel(sym, args)
            }
        }
    }
}

/// A random team over `domain` with at most `max_rows` distinct rows.
pub fn random_prop_team<R: Rng + ?Sized>(rng: &mut R, domain: &[Var], max_rows: usize) -> PropTeam {
    let n = rng.gen_range(0..=max_rows);
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|_| (0..domain.len()).map(|_| rng.gen_bool(0.5)).collect())
        .collect();
    PropTeam::new(domain.to_vec(), rows).expect("valid")
}

/// A random Kripke model with between 1 and `max_worlds` worlds.
pub fn random_kripke<R: Rng + ?Sized>(rng: &mut R, vars: &[Var], max_worlds: usize, edge_prob: f64) -> KripkeModel {
    let n = rng.gen_range(1..=max_worlds.max(1));
    let mut m = KripkeModel::new(n);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(edge_prob) {
                m.add_edge(a, b).expect("in range");
            }
        }
    }
    for v in vars {
        let ws: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        m.set_true_at(v.clone(), ws).expect("in range");
    }
    m
}

/// A random subset of the model's worlds.
pub fn random_team<R: Rng + ?Sized>(rng: &mut R, m: &KripkeModel) -> Team {
    (0..m.worlds()).filter(|_| rng.gen_bool(0.5)).collect()
}

/// A random relation of the given arity.
pub fn random_relation<R: Rng + ?Sized>(rng: &mut R, arity: usize) -> Relation {
    let tuples = (0..1u64 << arity)
        .filter(|_| rng.gen_bool(0.5))
        .map(|m| crate::models::bits_of(m, arity));
    Relation::new(arity, tuples)
}
