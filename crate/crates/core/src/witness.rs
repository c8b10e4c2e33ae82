// SPDX-License-Identifier: Apache-2.0
//! Witness functions for dependence atoms.
//!
//! A witness of `=(α1,…,αn,β)` is a Boolean function `f` of `n` arguments.
//! The witnessing formula `D(f, d)` is the splitting disjunction over all
//! argument vectors `a` of `α1^{a1} ∧ … ∧ αn^{an} ∧ β^{f(a)}`. Replacing every
//! dependence atom by such a formula turns an EMDL formula into an ML
//! formula, and the disjunction of these over all witness sequences is
//! equivalent to the original.
//!
//! ```
//! use teamlogic::parser::parse;
//! use teamlogic::witness::{witness_formula, WitnessFunction};
//! let d = parse("=(p,q)").unwrap();
//! let id = WitnessFunction::identity();
//! assert_eq!(witness_formula(&id, &d).unwrap().to_string(), "p & q | !p & !q");
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{bits_of, index_of_bits, Relation};
use crate::syntax::{Formula, RelSymbol};
use crate::tableau::TableOracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("witness of arity {got} for a dependence atom with {expected} arguments")]
    Arity { expected: usize, got: usize },
    #[error("{got} witnesses for {expected} dependence atoms")]
    Count { expected: usize, got: usize },
    #[error("not a dependence atom: {0}")]
    NotDep(String),
    #[error("argument {0} has no classical negation")]
    NotNegatable(String),
    #[error("formula node not supported here: {0}")]
    Fragment(String),
    #[error("table of length {0} is not a power of two")]
    TableLength(usize),
}

/// `f : {0,1}^n → {0,1}`. Entry `i` of the table is `f(bits_of(i, n))`, so
/// arguments are read most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WitnessFunction {
    arity: usize,
    table: Vec<bool>,
}

impl WitnessFunction {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self, WitnessError> {
        if table.len() != 1usize << arity {
            return Err(WitnessError::TableLength(table.len()));
        }
        Ok(WitnessFunction { arity, table })
    }

    /// The witness whose table, read as a `2^n`-bit number with entry `i` at
    /// bit `i`, equals `code`.
    pub fn from_code(arity: usize, code: u64) -> Self {
        let table = (0..1usize << arity).map(|i| code >> i & 1 == 1).collect();
        WitnessFunction { arity, table }
    }

    pub fn code(&self) -> u64 {
        self.table.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn constant(arity: usize, value: bool) -> Self {
        WitnessFunction {
            arity,
            table: vec![value; 1 << arity],
        }
    }

    /// The unary identity.
    pub fn identity() -> Self {
        WitnessFunction {
            arity: 1,
            table: vec![false, true],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn apply(&self, args: &[bool]) -> bool {
        self.table[index_of_bits(args) as usize]
    }

    /// All `2^(2^n)` witnesses, counting the table code upward.
    pub fn all(arity: usize) -> impl Iterator<Item = WitnessFunction> {
        (0..1u64 << (1u64 << arity)).map(move |c| Self::from_code(arity, c))
    }

    /// `{(a, f(a))}` as a relation of arity `n+1`.
    pub fn graph(&self) -> Relation {
        let tuples = (0..1u64 << self.arity).map(|i| {
            let mut t = bits_of(i, self.arity);
            t.push(self.table[i as usize]);
            t
        });
        Relation::new(self.arity + 1, tuples)
    }
}

impl std::fmt::Display for WitnessFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.table {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Number of witness sequences for the given arities, `None` on overflow.
pub fn sequence_count(arities: &[usize]) -> Option<u128> {
    arities.iter().try_fold(1u128, |acc, &a| {
        let bits = 1u32.checked_shl(a as u32)?;
        acc.checked_mul(1u128.checked_shl(bits)?)
    })
}

/// Every witness sequence for the given arities, the last position varying
/// fastest.
pub fn witness_sequences(arities: &[usize]) -> impl Iterator<Item = Vec<WitnessFunction>> + '_ {
    let sizes: Vec<u64> = arities.iter().map(|&a| 1u64 << (1u64 << a)).collect();
    let mut codes: Option<Vec<u64>> = Some(vec![0; arities.len()]);
    std::iter::from_fn(move || {
        let cur = codes.clone()?;
        let seq = cur.iter().zip(arities).map(|(&c, &a)| WitnessFunction::from_code(a, c)).collect();
        let mut next = cur;
        let mut i = next.len();
        codes = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < sizes[i] {
                break Some(next);
            }
            next[i] = 0;
        };
        Some(seq)
    })
}

/// The arities of the dependence atom occurrences of `φ`, in preorder.
pub fn dep_arities(phi: &Formula) -> Vec<usize> {
    phi.dep_atoms()
        .iter()
        .map(|(_, d)| match d {
            Formula::Dep { args, .. } => args.len(),
            _ => unreachable!("dep_atoms yields dependence atoms"),
        })
        .collect()
}

fn literal(f: &Formula, positive: bool) -> Result<Formula, WitnessError> {
    if positive {
        Ok(f.clone())
    } else {
        f.negate_nnf().map_err(|_| WitnessError::NotNegatable(f.to_string()))
    }
}

/// `D(f, d)`. Disjuncts are listed from the all-true argument vector down to
/// the all-false one and nested to the left.
pub fn witness_formula(f: &WitnessFunction, d: &Formula) -> Result<Formula, WitnessError> {
    let Formula::Dep { args, target } = d else {
        return Err(WitnessError::NotDep(d.to_string()));
    };
    if args.len() != f.arity {
        return Err(WitnessError::Arity {
            expected: args.len(),
            got: f.arity,
        });
    }
    let mut disjuncts = Vec::with_capacity(f.table.len());
    for i in (0..1u64 << f.arity).rev() {
        let bits = bits_of(i, f.arity);
        let mut conj = Vec::with_capacity(args.len() + 1);
        for (a, &b) in args.iter().zip(&bits) {
            conj.push(literal(a, b)?);
        }
        conj.push(literal(target, f.table[i as usize])?);
        disjuncts.push(Formula::conj(conj).expect("non-empty"));
    }
    Ok(Formula::disj(disjuncts).expect("non-empty"))
}

/// `φ(f/d)`: every dependence atom occurrence replaced by its witnessing
/// formula.
pub fn substitute_witnesses(phi: &Formula, fs: &[WitnessFunction]) -> Result<Formula, WitnessError> {
    let deps = phi.dep_atoms();
    if deps.len() != fs.len() {
        return Err(WitnessError::Count {
            expected: deps.len(),
            got: fs.len(),
        });
    }
    let mut out = phi.clone();
    for ((path, d), f) in deps.iter().zip(fs).rev() {
        let repl = witness_formula(f, d)?;
        out = out.substitute(path, repl).expect("path from dep_atoms");
    }
    Ok(out)
}

/// `φ*`: dependence atom occurrence `i` becomes `symbols[i](α*, β*)`, and
/// `¬p`, `◇ψ`, `ψ ∨ θ` become `∼p`, `∼□∼ψ*`, `∼(∼ψ* ∧ ∼θ*)`.
///
/// ```
/// use teamlogic::parser::parse;
/// use teamlogic::syntax::RelSymbol;
/// use teamlogic::witness::star_translate;
/// let f = parse("<> p | =(q)").unwrap();
/// let s = star_translate(&f, &[RelSymbol(3)]).unwrap();
/// assert_eq!(s.to_string(), "~(~~[] ~p & ~S_3(q))");
/// ```
pub fn star_translate(phi: &Formula, symbols: &[RelSymbol]) -> Result<Formula, WitnessError> {
    let n = phi.dep_atoms().len();
    if symbols.len() != n {
        return Err(WitnessError::Count {
            expected: n,
            got: symbols.len(),
        });
    }
    let mut next = 0;
    star(phi, symbols, &mut next)
}

fn star(phi: &Formula, symbols: &[RelSymbol], next: &mut usize) -> Result<Formula, WitnessError> {
    Ok(match phi {
        Formula::Atom(_) => phi.clone(),
        Formula::NegAtom(v) => Formula::cneg(Formula::Atom(v.clone())),
        Formula::And(a, b) => Formula::and(star(a, symbols, next)?, star(b, symbols, next)?),
        Formula::Or(a, b) => {
            let x = star(a, symbols, next)?;
            let y = star(b, symbols, next)?;
            Formula::cneg(Formula::and(Formula::cneg(x), Formula::cneg(y)))
        }
        Formula::Box(a) => Formula::nec(star(a, symbols, next)?),
        Formula::Diamond(a) => Formula::cneg(Formula::nec(Formula::cneg(star(a, symbols, next)?))),
        Formula::Dep { args, target } => {
            let s = symbols[*next];
            *next += 1;
            let mut parts = Vec::with_capacity(args.len() + 1);
            for a in args.iter().chain(std::iter::once(target.as_ref())) {
                parts.push(star(a, symbols, next)?);
            }
            Formula::Rel(s, parts)
        }
        other => return Err(WitnessError::Fragment(other.to_string())),
    })
}

/// The oracle interpreting `symbols[i]` as the graph of `fs[i]`.
pub fn oracle_from_witnesses(fs: &[WitnessFunction], symbols: &[RelSymbol]) -> Result<TableOracle, WitnessError> {
    if fs.len() != symbols.len() {
        return Err(WitnessError::Count {
            expected: symbols.len(),
            got: fs.len(),
        });
    }
    let mut o = TableOracle::new();
    for (f, &s) in fs.iter().zip(symbols) {
        o.insert(s, f.graph());
    }
    Ok(o)
}

/// `S_offset, S_offset+1, …` for the dependence atoms of `φ`.
pub fn default_symbols(phi: &Formula, offset: u32) -> Vec<RelSymbol> {
    (0..phi.dep_atoms().len() as u32).map(|i| RelSymbol(offset + i)).collect()
}
