//! Cooling of a mechanical mode by a current-carrying triple quantum dot.
//!
//! See the guide in `book/` for a walk through the modules.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cooling;
pub mod dressed;
pub mod error;
pub mod fock;
pub mod liouville;
pub mod model;
pub mod operator;
pub mod reference;
pub mod spectrum;

pub use error::{Error, Result};

// Book chapters, compiled so their snippets run under `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fock-space.md")]
    mod fock_space {}
    #[doc = include_str!("../../../book/src/dot-model.md")]
    mod dot_model {}
    #[doc = include_str!("../../../book/src/master-equation.md")]
    mod master_equation {}
    #[doc = include_str!("../../../book/src/dressed-states.md")]
    mod dressed_states {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/cooling.md")]
    mod cooling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
