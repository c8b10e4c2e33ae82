// SPDX-License-Identifier: Apache-2.0
//! Team semantics for propositional and modal dependence logics.

pub mod adqbf;
pub mod deciders;
pub mod gen;
pub mod models;
pub mod parser;
pub mod reductions;
pub mod syntax;
pub mod teamcheck;
pub mod tableau;
pub mod witness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/deciding.md")]
    mod deciding {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
