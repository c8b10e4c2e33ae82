// SPDX-License-Identifier: Apache-2.0
use super::{agree, differ, FreshNames, ReductionError};
use crate::syntax::{Formula, Var};

/// An independence logic formula equivalent to `left ⊆ right`:
///
/// `∀v₁∀v₂∀r⃗ ((r⃗≠left ∧ r⃗≠right) ∨ (v₁≠v₂ ∧ r⃗≠right) ∨ ((v₁=v₂ ∨ r⃗=right) ∧ ind(;r⃗;v₁v₂)))`
///
/// ```
/// use teamlogic::parser::parse_team;
/// use teamlogic::reductions::inclusion_to_independence;
/// use teamlogic::syntax::Var;
/// use teamlogic::teamcheck::check_prop;
/// let phi = inclusion_to_independence(&[Var::new("p")], &[Var::new("q")]).unwrap();
/// let x = parse_team(r#"{"vars":["p","q"],"rows":[[0,1],[1,0]]}"#).unwrap();
/// let y = parse_team(r#"{"vars":["p","q"],"rows":[[1,0]]}"#).unwrap();
/// assert!(check_prop(&x, &phi).unwrap());
/// assert!(!check_prop(&y, &phi).unwrap());
/// ```
pub fn inclusion_to_independence(left: &[Var], right: &[Var]) -> Result<Formula, ReductionError> {
    let mut names = FreshNames::default();
    names.reserve(left.iter().chain(right).cloned());
    inclusion_with(&mut names, left, right)
}

pub(crate) fn inclusion_with(names: &mut FreshNames, left: &[Var], right: &[Var]) -> Result<Formula, ReductionError> {
    if left.len() != right.len() {
        return Err(ReductionError::Length(left.len(), right.len()));
    }
    let v1 = names.fresh("v", "copy bit");
    let v2 = names.fresh("v", "copy bit");
    let rs: Vec<Var> = (0..left.len()).map(|_| names.fresh("r", "tuple probe")).collect();
    let ne = |xs: &[Var]| Formula::disj(rs.iter().zip(xs).map(|(r, x)| differ(r, x)));
    let eq = Formula::conj(rs.iter().zip(right).map(|(r, x)| agree(r, x)));
    let body = match (ne(left), ne(right), eq) {
        (Some(ne_left), Some(ne_right), Some(eq_right)) => Formula::or(
            Formula::or(
                Formula::and(ne_left, ne_right.clone()),
                Formula::and(differ(&v1, &v2), ne_right),
            ),
            Formula::and(
                Formula::or(agree(&v1, &v2), eq_right),
                Formula::ind(Vec::new(), rs.clone(), vec![v1.clone(), v2.clone()]),
            ),
        ),
        // Empty tuples: the inclusion always holds.
        _ => return Ok(Formula::forall(v1.clone(), Formula::top_over(v1))),
    };
    let quantified = rs
        .iter()
        .rev()
        .chain([&v2, &v1])
        .fold(body, |acc, v| Formula::forall(v.clone(), acc));
    Ok(quantified)
}
