// SPDX-License-Identifier: Apache-2.0
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::split::{self, SplitInfo};
use super::{CheckError, CheckOptions, Strategy};
use crate::models::KripkeModel;
use crate::syntax::{Formula, Var};

#[derive(Debug, Clone)]
enum Node {
    True,
    Lit { var: usize, pos: bool },
    And(u32, u32),
    Or(u32, u32),
    IDisj(u32, u32),
    Nec(u32),
    Pos(u32),
    Dep { args: Vec<u32>, target: u32 },
    Ind { cond: Vec<usize>, left: Vec<usize>, right: Vec<usize> },
    Inc { left: Vec<usize>, right: Vec<usize> },
}

#[derive(Debug, Clone, Copy)]
struct Info {
    flat: bool,
    dc: bool,
    /// A flat node every world of a satisfying team satisfies; `None` for ⊤.
    guard: Option<u32>,
}

pub(crate) struct ModalChecker<'m> {
    m: &'m KripkeModel,
    nodes: Vec<Node>,
    info: Vec<Info>,
    root: u32,
    vals: Vec<&'m [bool]>,
    var_index: Vec<Var>,
    truth: Vec<Option<Rc<Vec<bool>>>>,
    memo: HashMap<(u32, Vec<u32>), bool>,
    opts: CheckOptions,
    steps: u64,
}

impl<'m> ModalChecker<'m> {
    pub(crate) fn new(m: &'m KripkeModel, phi: &Formula, opts: CheckOptions) -> Result<Self, CheckError> {
        let mut c = ModalChecker {
            m,
            nodes: Vec::new(),
            info: Vec::new(),
            root: 0,
            vals: Vec::new(),
            var_index: Vec::new(),
            truth: Vec::new(),
            memo: HashMap::new(),
            opts,
            steps: 0,
        };
        c.root = c.compile(phi)?;
        c.truth = vec![None; c.nodes.len()];
        Ok(c)
    }

    fn var(&mut self, v: &Var) -> Result<usize, CheckError> {
        if let Some(i) = self.var_index.iter().position(|x| x == v) {
            return Ok(i);
        }
        let bits = self.m.valuation(v).ok_or_else(|| CheckError::MissingVar(v.clone()))?;
        self.var_index.push(v.clone());
        self.vals.push(bits);
        Ok(self.vals.len() - 1)
    }

    fn push(&mut self, n: Node, info: Info) -> u32 {
        self.nodes.push(n);
        self.info.push(info);
        (self.nodes.len() - 1) as u32
    }

    fn flat_info() -> Info {
        Info {
            flat: true,
            dc: true,
            guard: None,
        }
    }

    fn push_flat(&mut self, n: Node) -> u32 {
        let id = self.push(n, Self::flat_info());
        self.info[id as usize].guard = Some(id);
        id
    }

    fn guard_and(&mut self, a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(self.push_flat(Node::And(x, y))),
            (g, None) | (None, g) => g,
        }
    }

    fn guard_or(&mut self, a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(self.push_flat(Node::Or(x, y))),
            _ => None,
        }
    }

    fn compile(&mut self, f: &Formula) -> Result<u32, CheckError> {
        Ok(match f {
            Formula::Atom(v) | Formula::NegAtom(v) => {
                let var = self.var(v)?;
                self.push_flat(Node::Lit {
                    var,
                    pos: matches!(f, Formula::Atom(_)),
                })
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::IDisj(a, b) => {
                let x = self.compile(a)?;
                let y = self.compile(b)?;
                let (ix, iy) = (self.info[x as usize], self.info[y as usize]);
                let flat = ix.flat && iy.flat && !matches!(f, Formula::IDisj(..));
                let node = match f {
                    Formula::And(..) => Node::And(x, y),
                    Formula::Or(..) => Node::Or(x, y),
                    _ => Node::IDisj(x, y),
                };
                if flat {
                    return Ok(self.push_flat(node));
                }
                let guard = match f {
                    Formula::And(..) => self.guard_and(ix.guard, iy.guard),
                    _ => self.guard_or(ix.guard, iy.guard),
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
            Formula::Box(a) | Formula::Diamond(a) => {
                let x = self.compile(a)?;
                let ix = self.info[x as usize];
                let is_box = matches!(f, Formula::Box(_));
                let node = if is_box { Node::Nec(x) } else { Node::Pos(x) };
                if ix.flat {
                    return Ok(self.push_flat(node));
                }
                let guard = match (ix.guard, is_box) {
                    (Some(g), true) => Some(self.push_flat(Node::Nec(g))),
                    (None, true) => None,
                    (g, false) => {
                        let inner = match g {
                            Some(g) => g,
                            None => self.push_flat(Node::True),
                        };
                        Some(self.push_flat(Node::Pos(inner)))
                    }
                };
                self.push(
                    node,
                    Info {
                        flat: false,
                        dc: ix.dc,
                        guard,
                    },
                )
            }
            Formula::Dep { args, target } => {
                let mut ids = Vec::with_capacity(args.len());
                for a in args.iter().chain(std::iter::once(target.as_ref())) {
                    if !a.is_modal_classical() {
                        return Err(CheckError::Fragment(format!("dependence argument {a}")));
                    }
                    ids.push(self.compile(a)?);
                }
                let target = ids.pop().expect("target");
                self.push(
                    Node::Dep { args: ids, target },
                    Info {
                        flat: false,
                        dc: true,
                        guard: None,
                    },
                )
            }
            Formula::Ind { cond, left, right } => {
                let cond = cond.iter().map(|v| self.var(v)).collect::<Result<_, _>>()?;
                let left = left.iter().map(|v| self.var(v)).collect::<Result<_, _>>()?;
                let right = right.iter().map(|v| self.var(v)).collect::<Result<_, _>>()?;
                self.push(
                    Node::Ind { cond, left, right },
                    Info {
                        flat: false,
                        dc: false,
                        guard: None,
                    },
                )
            }
            Formula::Inc { left, right } => {
                let left = left.iter().map(|v| self.var(v)).collect::<Result<_, _>>()?;
                let right = right.iter().map(|v| self.var(v)).collect::<Result<_, _>>()?;
                self.push(
                    Node::Inc { left, right },
                    Info {
                        flat: false,
                        dc: false,
                        guard: None,
                    },
                )
            }
            other => return Err(CheckError::Fragment(other.to_string())),
        })
    }

    pub(crate) fn check(&mut self, team: &[u32]) -> Result<bool, CheckError> {
        self.eval(self.root, team)
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

    /// Pointed truth vector of a flat node.
    fn truth(&mut self, n: u32) -> Rc<Vec<bool>> {
        if let Some(t) = &self.truth[n as usize] {
            return t.clone();
        }
        let w = self.m.worlds();
        let v: Vec<bool> = match self.nodes[n as usize].clone() {
            Node::True => vec![true; w],
            Node::Lit { var, pos } => self.vals[var].iter().map(|&b| b == pos).collect(),
            Node::And(a, b) => {
                let (x, y) = (self.truth(a), self.truth(b));
                x.iter().zip(y.iter()).map(|(p, q)| *p && *q).collect()
            }
            Node::Or(a, b) => {
                let (x, y) = (self.truth(a), self.truth(b));
                x.iter().zip(y.iter()).map(|(p, q)| *p || *q).collect()
            }
            Node::Nec(a) => {
                let x = self.truth(a);
                (0..w).map(|u| self.m.succ(u).iter().all(|&s| x[s])).collect()
            }
            Node::Pos(a) => {
                let x = self.truth(a);
                (0..w).map(|u| self.m.succ(u).iter().any(|&s| x[s])).collect()
            }
            _ => unreachable!("truth of a non-flat node"),
        };
        let rc = Rc::new(v);
        self.truth[n as usize] = Some(rc.clone());
        rc
    }

    /// `w_M(α)` for a dependence argument.
    fn value(&mut self, n: u32, w: u32) -> Result<bool, CheckError> {
        if self.pruned() {
            Ok(self.truth(n)[w as usize])
        } else {
            self.eval(n, &[w])
        }
    }

    fn guard_bits(&mut self, g: Option<u32>, team: &[u32]) -> Vec<bool> {
        match g {
            None => vec![true; team.len()],
            Some(g) => {
                let t = self.truth(g);
                team.iter().map(|&w| t[w as usize]).collect()
            }
        }
    }

    fn image(&self, team: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = team
            .iter()
            .flat_map(|&w| self.m.succ(w as usize).iter().map(|&s| s as u32))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn eval(&mut self, n: u32, team: &[u32]) -> Result<bool, CheckError> {
        self.tick()?;
        let info = self.info[n as usize];
        if self.pruned() {
            if team.is_empty() {
                return Ok(true);
            }
            if info.flat {
                let t = self.truth(n);
                return Ok(team.iter().all(|&w| t[w as usize]));
            }
        }
        let node = self.nodes[n as usize].clone();
        let memoize = matches!(node, Node::Or(..) | Node::IDisj(..) | Node::Pos(_) | Node::Nec(_) | Node::And(..));
        if memoize {
            if let Some(&r) = self.memo.get(&(n, team.to_vec())) {
                return Ok(r);
            }
        }
        let r = match node {
            Node::True => true,
            Node::Lit { var, pos } => team.iter().all(|&w| self.vals[var][w as usize] == pos),
            Node::And(a, b) => self.eval(a, team)? && self.eval(b, team)?,
            Node::IDisj(a, b) => self.eval(a, team)? || self.eval(b, team)?,
            Node::Or(a, b) => {
                if !self.pruned() {
                    split::definitional(team, &mut |side, t| self.eval(if side == 0 { a } else { b }, t))?
                } else {
                    let (ia, ib) = (self.info[a as usize], self.info[b as usize]);
                    let g1 = self.guard_bits(ia.guard, team);
                    let g2 = self.guard_bits(ib.guard, team);
                    let info = SplitInfo {
                        g1: &g1,
                        g2: &g2,
                        flat1: ia.flat,
                        flat2: ib.flat,
                        dc1: ia.dc,
                        dc2: ib.dc,
                    };
                    split::pruned(team, &info, &mut |side, t| self.eval(if side == 0 { a } else { b }, t))?
                }
            }
            Node::Nec(a) => {
                let img = self.image(team);
                self.eval(a, &img)?
            }
            Node::Pos(a) => self.diamond(a, team)?,
            Node::Dep { args, target } => {
                let mut seen: HashMap<Vec<bool>, bool> = HashMap::new();
                let mut ok = true;
                for &w in team {
                    let key = args.iter().map(|&x| self.value(x, w)).collect::<Result<Vec<bool>, _>>()?;
                    let val = self.value(target, w)?;
                    if *seen.entry(key).or_insert(val) != val {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Node::Ind { cond, left, right } => {
                let rows: HashSet<(Vec<bool>, Vec<bool>, Vec<bool>)> = team
                    .iter()
                    .map(|&w| {
                        let get = |vs: &[usize]| vs.iter().map(|&v| self.vals[v][w as usize]).collect::<Vec<bool>>();
                        (get(&cond), get(&left), get(&right))
                    })
                    .collect();
                independence(&rows)
            }
            Node::Inc { left, right } => {
                let get = |vs: &[usize], w: u32| vs.iter().map(|&v| self.vals[v][w as usize]).collect::<Vec<bool>>();
                let rhs: HashSet<Vec<bool>> = team.iter().map(|&w| get(&right, w)).collect();
                team.iter().all(|&w| rhs.contains(&get(&left, w)))
            }
        };
        if memoize {
            self.memo.insert((n, team.to_vec()), r);
        }
        Ok(r)
    }

    fn diamond(&mut self, body: u32, team: &[u32]) -> Result<bool, CheckError> {
        let img = self.image(team);
        let info = self.info[body as usize];
        let allowed: Vec<u32> = if self.pruned() {
            let g = self.guard_bits(info.guard, &img);
            img.iter().zip(g).filter(|(_, ok)| *ok).map(|(w, _)| *w).collect()
        } else {
            img
        };
        let succ_in = |m: &KripkeModel, w: u32, cand: &[u32]| -> Vec<u32> {
            m.succ(w as usize)
                .iter()
                .map(|&s| s as u32)
                .filter(|s| cand.binary_search(s).is_ok())
                .collect()
        };
        let options: Vec<Vec<u32>> = team.iter().map(|&w| succ_in(self.m, w, &allowed)).collect();
        if options.iter().any(Vec::is_empty) {
            return Ok(false);
        }
        if self.pruned() && info.flat {
            return self.eval(body, &allowed);
        }
        if self.pruned() && info.dc {
            let mut digits = vec![0usize; team.len()];
            let mut seen = HashSet::new();
            loop {
                let mut t: Vec<u32> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
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
        let k = allowed.len();
        if k > 40 {
            return Err(CheckError::Resource(format!("{k} candidate successors")));
        }
        let start: u64 = if team.is_empty() { 0 } else { 1 };
        for mask in start..1u64 << k {
            let t: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| allowed[i]).collect();
            let legal = options.iter().all(|o| o.iter().any(|s| t.binary_search(s).is_ok()));
            if legal && self.eval(body, &t)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Checks `∀ a, b with equal cond ∃ c: c(cond left) = a(cond left) ∧ c(right) = b(right)`
/// over projected triples.
pub(crate) fn independence(rows: &HashSet<(Vec<bool>, Vec<bool>, Vec<bool>)>) -> bool {
    for a in rows {
        for b in rows {
            if a.0 != b.0 {
                continue;
            }
            let witness = (a.0.clone(), a.1.clone(), b.2.clone());
            if !rows.contains(&witness) {
                return false;
            }
        }
    }
    true
}
