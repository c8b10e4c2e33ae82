// SPDX-License-Identifier: Apache-2.0
use std::collections::{HashMap, HashSet};

use super::modal::independence;
use super::split::{self, SplitInfo};
use super::{CheckError, CheckOptions, Strategy};
use crate::models::PropTeam;
use crate::syntax::{Formula, Var};

const MAX_SLOTS: usize = 64;

#[derive(Debug, Clone)]
enum Node {
    Lit { slot: u32, pos: bool },
    And(u32, u32),
    Or(u32, u32),
    IDisj(u32, u32),
    Exists { slot: u32, body: u32 },
    Forall { slot: u32, body: u32 },
    Dep { args: Vec<u32>, target: u32 },
    Ind { cond: Vec<u32>, left: Vec<u32>, right: Vec<u32> },
    Inc { left: Vec<u32>, right: Vec<u32> },
}

#[derive(Debug, Clone, Copy)]
struct Info {
    flat: bool,
    dc: bool,
    guard: Option<u32>,
}

/// Rows are bit vectors: slot `i` is bit `i`. The first slots hold the
/// domain; each quantifier over a name not in scope gets a fresh slot.
pub(crate) struct PropChecker {
    nodes: Vec<Node>,
    info: Vec<Info>,
    root: u32,
    domain_len: usize,
    slots: usize,
    memo: HashMap<(u32, Vec<u64>), bool>,
    opts: CheckOptions,
    steps: u64,
}

impl PropChecker {
    pub(crate) fn new(domain: &[Var], phi: &Formula, opts: CheckOptions) -> Result<Self, CheckError> {
        if domain.len() > MAX_SLOTS {
            return Err(CheckError::Resource(format!("{} variables", domain.len())));
        }
        let mut c = PropChecker {
            nodes: Vec::new(),
            info: Vec::new(),
            root: 0,
            domain_len: domain.len(),
            slots: domain.len(),
            memo: HashMap::new(),
            opts,
            steps: 0,
        };
        let mut scope: Vec<(Var, u32)> = domain.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        c.root = c.compile(phi, &mut scope)?;
        Ok(c)
    }

    fn lookup(scope: &[(Var, u32)], v: &Var) -> Result<u32, CheckError> {
        scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, s)| *s)
            .ok_or_else(|| CheckError::MissingVar(v.clone()))
    }

    fn push(&mut self, n: Node, info: Info) -> u32 {
        self.nodes.push(n);
        self.info.push(info);
        (self.nodes.len() - 1) as u32
    }

    fn push_flat(&mut self, n: Node) -> u32 {
        let id = self.push(
            n,
            Info {
                flat: true,
                dc: true,
                guard: None,
            },
        );
        self.info[id as usize].guard = Some(id);
        id
    }

    fn compile(&mut self, f: &Formula, scope: &mut Vec<(Var, u32)>) -> Result<u32, CheckError> {
        let lists = |scope: &[(Var, u32)], vs: &[Var]| vs.iter().map(|v| Self::lookup(scope, v)).collect::<Result<Vec<u32>, _>>();
        let team_atom = Info {
            flat: false,
            dc: false,
            guard: None,
        };
        Ok(match f {
            Formula::Atom(v) | Formula::NegAtom(v) => {
                let slot = Self::lookup(scope, v)?;
                self.push_flat(Node::Lit {
                    slot,
                    pos: matches!(f, Formula::Atom(_)),
                })
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::IDisj(a, b) => {
                let x = self.compile(a, scope)?;
                let y = self.compile(b, scope)?;
                let (ix, iy) = (self.info[x as usize], self.info[y as usize]);
                let node = match f {
                    Formula::And(..) => Node::And(x, y),
                    Formula::Or(..) => Node::Or(x, y),
                    _ => Node::IDisj(x, y),
                };
                if ix.flat && iy.flat && !matches!(f, Formula::IDisj(..)) {
                    return Ok(self.push_flat(node));
                }
                let guard = match (f, ix.guard, iy.guard) {
                    (Formula::And(..), Some(g), Some(h)) => Some(self.push_flat(Node::And(g, h))),
                    (Formula::And(..), g, None) | (Formula::And(..), None, g) => g,
                    (_, Some(g), Some(h)) => Some(self.push_flat(Node::Or(g, h))),
                    _ => None,
                };
                self.push(
                    node,
                    Info {
                        flat: false,
                        dc: ix.dc && iy.dc,
                        guard,
                    },
                )
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = match Self::lookup(scope, v) {
                    Ok(s) => s,
                    Err(_) => {
                        if self.slots == MAX_SLOTS {
                            return Err(CheckError::Resource("more than 64 variables in scope".into()));
                        }
                        self.slots += 1;
                        (self.slots - 1) as u32
                    }
                };
                scope.push((v.clone(), slot));
                let b = self.compile(body, scope);
                scope.pop();
                let b = b?;
                let ib = self.info[b as usize];
                let exists = matches!(f, Formula::Exists(..));
                let mk = |body| {
                    if exists {
                        Node::Exists { slot, body }
                    } else {
                        Node::Forall { slot, body }
                    }
                };
                if ib.flat {
                    return Ok(self.push_flat(mk(b)));
                }
                let guard = ib.guard.map(|g| self.push_flat(mk(g)));
                self.push(
                    mk(b),
                    Info {
                        flat: false,
                        dc: ib.dc,
                        guard,
                    },
                )
            }
            Formula::Dep { args, target } => {
                let mut ids = Vec::with_capacity(args.len() + 1);
                for a in args.iter().chain(std::iter::once(target.as_ref())) {
                    let id = self.compile(a, scope)?;
                    if !self.info[id as usize].flat {
                        return Err(CheckError::Fragment(format!("dependence argument {a}")));
                    }
                    ids.push(id);
                }
                let target = ids.pop().expect("target");
                self.push(
                    Node::Dep { args: ids, target },
                    Info {
                        dc: true,
                        ..team_atom
                    },
                )
            }
            Formula::Ind { cond, left, right } => {
                let node = Node::Ind {
                    cond: lists(scope, cond)?,
                    left: lists(scope, left)?,
                    right: lists(scope, right)?,
                };
                self.push(node, team_atom)
            }
            Formula::Inc { left, right } => {
                let node = Node::Inc {
                    left: lists(scope, left)?,
                    right: lists(scope, right)?,
                };
                self.push(node, team_atom)
            }
            other => return Err(CheckError::Fragment(other.to_string())),
        })
    }

    pub(crate) fn check(&mut self, x: &PropTeam) -> Result<bool, CheckError> {
        debug_assert_eq!(x.domain().len(), self.domain_len);
        let mut team: Vec<u64> = x
            .rows()
            .map(|r| r.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i))
            .collect();
        team.sort_unstable();
        self.eval(self.root, &team)
    }

    fn pruned(&self) -> bool {
        self.opts.strategy == Strategy::Pruned
    }

    fn tick(&mut self) -> Result<(), CheckError> {
        self.steps += 1;
        if self.steps > self.opts.max_steps {
            return Err(CheckError::Resource(format!("more than {} evaluation steps", self.opts.max_steps)));
        }
        Ok(())
    }

    /// Classical truth of a flat node at one row.
    fn row(&self, n: u32, r: u64) -> bool {
        match &self.nodes[n as usize] {
            Node::Lit { slot, pos } => (r >> slot & 1 == 1) == *pos,
            Node::And(a, b) => self.row(*a, r) && self.row(*b, r),
            Node::Or(a, b) => self.row(*a, r) || self.row(*b, r),
            Node::Exists { slot, body } => self.row(*body, r & !(1 << slot)) || self.row(*body, r | 1 << slot),
            Node::Forall { slot, body } => self.row(*body, r & !(1 << slot)) && self.row(*body, r | 1 << slot),
            _ => unreachable!("row evaluation of a team atom"),
        }
    }

    fn value(&mut self, n: u32, r: u64) -> Result<bool, CheckError> {
        if self.pruned() {
            Ok(self.row(n, r))
        } else {
            self.eval(n, &[r])
        }
    }

    fn eval(&mut self, n: u32, team: &[u64]) -> Result<bool, CheckError> {
        self.tick()?;
        let info = self.info[n as usize];
        if self.pruned() {
            if team.is_empty() {
                return Ok(true);
            }
            if info.flat {
                return Ok(team.iter().all(|&r| self.row(n, r)));
            }
        }
        let node = self.nodes[n as usize].clone();
        let memoize = matches!(node, Node::Or(..) | Node::Exists { .. } | Node::Forall { .. });
        if memoize {
            if let Some(&r) = self.memo.get(&(n, team.to_vec())) {
                return Ok(r);
            }
        }
        let result = match node {
            Node::Lit { slot, pos } => team.iter().all(|&r| (r >> slot & 1 == 1) == pos),
            Node::And(a, b) => self.eval(a, team)? && self.eval(b, team)?,
            Node::IDisj(a, b) => self.eval(a, team)? || self.eval(b, team)?,
            Node::Or(a, b) => self.split(a, b, team)?,
            Node::Exists { slot, body } => self.exists(slot, body, team)?,
            Node::Forall { slot, body } => {
                let mut t: Vec<u64> = team.iter().flat_map(|&r| [r & !(1 << slot), r | 1 << slot]).collect();
                t.sort_unstable();
                t.dedup();
                self.eval(body, &t)?
            }
            Node::Dep { args, target } => {
                let mut seen: HashMap<Vec<bool>, bool> = HashMap::new();
                let mut ok = true;
                for &r in team {
                    let key = args.iter().map(|&a| self.value(a, r)).collect::<Result<Vec<bool>, _>>()?;
                    let val = self.value(target, r)?;
                    if *seen.entry(key).or_insert(val) != val {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Node::Ind { cond, left, right } => {
                let get = |vs: &[u32], r: u64| vs.iter().map(|&s| r >> s & 1 == 1).collect::<Vec<bool>>();
                let rows: HashSet<_> = team.iter().map(|&r| (get(&cond, r), get(&left, r), get(&right, r))).collect();
                independence(&rows)
            }
            Node::Inc { left, right } => {
                let get = |vs: &[u32], r: u64| vs.iter().map(|&s| r >> s & 1 == 1).collect::<Vec<bool>>();
                let rhs: HashSet<Vec<bool>> = team.iter().map(|&r| get(&right, r)).collect();
                team.iter().all(|&r| rhs.contains(&get(&left, r)))
            }
        };
        if memoize {
            self.memo.insert((n, team.to_vec()), result);
        }
        Ok(result)
    }

    fn split(&mut self, a: u32, b: u32, team: &[u64]) -> Result<bool, CheckError> {
        if !self.pruned() {
            return split::definitional(team, &mut |side, t| self.eval(if side == 0 { a } else { b }, t));
        }
        let (ia, ib) = (self.info[a as usize], self.info[b as usize]);
        let guard = |g: Option<u32>| -> Vec<bool> {
            match g {
                None => vec![true; team.len()],
                Some(g) => team.iter().map(|&r| self.row(g, r)).collect(),
            }
        };
        let g1 = guard(ia.guard);
        let g2 = guard(ib.guard);
        let info = SplitInfo {
            g1: &g1,
            g2: &g2,
            flat1: ia.flat,
            flat2: ib.flat,
            dc1: ia.dc,
            dc2: ib.dc,
        };
        split::pruned(team, &info, &mut |side, t| self.eval(if side == 0 { a } else { b }, t))
    }

    fn exists(&mut self, slot: u32, body: u32, team: &[u64]) -> Result<bool, CheckError> {
        let set = |r: u64, b: bool| if b { r | 1 << slot } else { r & !(1 << slot) };
        let ib = self.info[body as usize];
        // Per row, the admissible non-empty value sets.
        let options: Vec<Vec<Vec<u64>>> = if self.pruned() {
            let mut out = Vec::with_capacity(team.len());
            for &r in team {
                let ok: Vec<bool> = [false, true]
                    .iter()
                    .map(|&b| ib.guard.map_or(true, |g| self.row(g, set(r, b))))
                    .collect();
                let mut o = Vec::new();
                if ok[0] {
                    o.push(vec![set(r, false)]);
                }
                if ok[1] {
                    o.push(vec![set(r, true)]);
                }
                if ok[0] && ok[1] && !ib.dc {
                    o.push(vec![set(r, false), set(r, true)]);
                }
                if o.is_empty() {
                    return Ok(false);
                }
                out.push(o);
            }
            if ib.flat {
                return Ok(true);
            }
            out
        } else {
            team.iter()
                .map(|&r| vec![vec![set(r, false)], vec![set(r, true)], vec![set(r, false), set(r, true)]])
                .collect()
        };
        let mut digits = vec![0usize; team.len()];
        let mut seen = HashSet::new();
        loop {
            let mut t: Vec<u64> = digits.iter().zip(&options).flat_map(|(&d, o)| o[d].iter().copied()).collect();
            t.sort_unstable();
            t.dedup();
            if seen.insert(t.clone()) && self.eval(body, &t)? {
                return Ok(true);
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return Ok(false);
                }
                digits[i] += 1;
                if digits[i] < options[i].len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}
