//! An engine for annotated logic programs over the four-valued lattice.

pub mod asp;
pub mod ast;
pub mod corpus;
pub mod grounder;
pub mod lattice;
pub mod oracle;
pub mod parser;
pub mod sat;
pub mod semantics;
pub mod solver;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/language.md")]
    mod language {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    mod semantics {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/asp.md")]
    mod asp {}
    #[doc = include_str!("../../../book/src/puzzles.md")]
    mod puzzles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/testing.md")]
    mod testing {}
}
