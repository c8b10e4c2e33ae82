// SPDX-License-Identifier: Apache-2.0
//! Enumeration of covers `T = T1 ∪ T2` for the splitting disjunction.

use super::CheckError;

/// What is known about the two disjuncts of a split.
pub(crate) struct SplitInfo<'a> {
    /// Per element: may it belong to the left / right part at all.
    pub g1: &'a [bool],
    pub g2: &'a [bool],
    /// The guard of a side is exact (the side is flat).
    pub flat1: bool,
    pub flat2: bool,
    pub dc1: bool,
    pub dc2: bool,
}

fn merge<E: Copy + Ord>(a: &[E], b: &[E]) -> Vec<E> {
    let mut v: Vec<E> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn pick<E: Copy>(items: &[E], mask: u64) -> Vec<E> {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| *e)
        .collect()
}

fn check_width(n: usize) -> Result<(), CheckError> {
    if n > 40 {
        Err(CheckError::Resource(format!("split over {n} undetermined elements")))
    } else {
        Ok(())
    }
}

/// Every `(T1, T2)` with `T1 ∪ T2 = team`, left part first.
pub(crate) fn definitional<E: Copy + Ord>(
    team: &[E],
    eval: &mut dyn FnMut(usize, &[E]) -> Result<bool, CheckError>,
) -> Result<bool, CheckError> {
    let n = team.len();
    check_width(n)?;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut m1 = 0u64;
    loop {
        let t1 = pick(team, m1);
        if eval(0, &t1)? {
            let rest = full & !m1;
            let mut sub = 0u64;
            loop {
                if eval(1, &pick(team, rest | sub))? {
                    return Ok(true);
                }
                if sub == m1 {
                    break;
                }
                sub = (sub.wrapping_sub(m1)) & m1;
            }
        }
        if m1 == full {
            return Ok(false);
        }
        m1 += 1;
    }
}

/// Split search restricted by per-element guards.
///
/// An element outside both guards refutes the split. When one side is flat its
/// part is taken maximal; when a side is downward closed no element needs to
/// go to both parts.
pub(crate) fn pruned<E: Copy + Ord>(
    team: &[E],
    info: &SplitInfo<'_>,
    eval: &mut dyn FnMut(usize, &[E]) -> Result<bool, CheckError>,
) -> Result<bool, CheckError> {
    let mut only1 = Vec::new();
    let mut only2 = Vec::new();
    let mut free = Vec::new();
    for (i, &e) in team.iter().enumerate() {
        match (info.g1[i], info.g2[i]) {
            (true, false) => only1.push(e),
            (false, true) => only2.push(e),
            (true, true) => free.push(e),
            (false, false) => return Ok(false),
        }
    }
    let k = free.len();
    if info.flat1 || info.flat2 {
        let (side_flat, side_other, mine, theirs, dc_other) = if info.flat1 {
            (0, 1, &only1, &only2, info.dc2)
        } else {
            (1, 0, &only2, &only1, info.dc1)
        };
        if !eval(side_flat, &merge(mine, &free))? {
            return Ok(false);
        }
        if dc_other {
            return eval(side_other, theirs);
        }
        check_width(k)?;
        for mask in 0..1u64 << k {
            if eval(side_other, &merge(theirs, &pick(&free, mask)))? {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    check_width(k)?;
    if info.dc1 || info.dc2 {
        for mask in 0..1u64 << k {
            let t1 = merge(&only1, &pick(&free, mask));
            if !eval(0, &t1)? {
                continue;
            }
            let t2 = merge(&only2, &pick(&free, !mask));
            if eval(1, &t2)? {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    let mut digits = vec![0u8; k];
    loop {
        let mut t1 = only1.clone();
        let mut t2 = only2.clone();
        for (i, &d) in digits.iter().enumerate() {
            if d != 1 {
                t1.push(free[i]);
            }
            if d != 0 {
                t2.push(free[i]);
            }
        }
        t1.sort_unstable();
        t2.sort_unstable();
        if eval(0, &t1)? && eval(1, &t2)? {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(false);
            }
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
