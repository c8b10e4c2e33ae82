// SPDX-License-Identifier: Apache-2.0
use std::fmt;

use crate::syntax::{Formula, Var};

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::IDisj(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Box(_) | Formula::Diamond(_) | Formula::CNeg(_) => 4,
        _ => 5,
    }
}

fn vars(vs: &[Var]) -> String {
    vs.iter().map(Var::name).collect::<Vec<_>>().join(" ")
}

fn write_child(out: &mut String, f: &Formula, parens: bool) {
    if parens {
        out.push('(');
        write(out, f);
        out.push(')');
    } else {
        write(out, f);
    }
}

fn write(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom(v) => out.push_str(v.name()),
        Formula::NegAtom(v) => {
            out.push('!');
            out.push_str(v.name());
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::IDisj(a, b) => {
            let p = prec(f);
            let op = match f {
                Formula::And(..) => " & ",
                Formula::Or(..) => " | ",
                _ => " \\/ ",
            };
            write_child(out, a, prec(a) < p);
            out.push_str(op);
            write_child(out, b, prec(b) <= p);
        }
        Formula::Box(a) | Formula::Diamond(a) => {
            out.push_str(if matches!(f, Formula::Box(_)) { "[] " } else { "<> " });
            write_child(out, a, prec(a) < 4);
        }
        Formula::CNeg(a) => {
            out.push('~');
            write_child(out, a, prec(a) < 4);
        }
        Formula::Dep { args, target } => {
            out.push_str("=(");
            for a in args {
                write(out, a);
                out.push(',');
            }
            write(out, target);
            out.push(')');
        }
        Formula::Ind { cond, left, right } => {
            out.push_str(&format!("ind({};{};{})", vars(cond), vars(left), vars(right)));
        }
        Formula::Inc { left, right } => {
            out.push_str(&format!("inc({},{})", vars(left), vars(right)));
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            out.push_str(if matches!(f, Formula::Exists(..)) { "E " } else { "A " });
            out.push_str(v.name());
            out.push_str(" . ");
            write(out, body);
        }
        Formula::Rel(s, args) => {
            out.push_str(&s.to_string());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write(out, a);
            }
            out.push(')');
        }
    }
}

/// Renders a formula with as few parentheses as the grammar allows for
/// binary operators. Quantifiers under another operator are parenthesised.
///
/// ```
/// use teamlogic::parser::{parse, render};
/// assert_eq!(render(&parse("p & (q | r)").unwrap()), "p & (q | r)");
/// assert_eq!(render(&parse("[](=(p,q))").unwrap()), "[] =(p,q)");
/// ```
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(&mut out, f);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
