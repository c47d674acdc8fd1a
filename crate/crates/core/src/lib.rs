//! Univoque bases, entropy plateaus and the dimension spectrum of the set of
//! numbers with a unique expansion in a non-integer base.
//!
//! The crate is organised bottom-up: [`digits`] handles words and sequences,
//! [`expansion`] the arithmetic of bases, [`subshift`] window subshifts and
//! their entropy, [`bifurcation`] the plateau structure of the entropy
//! function, and [`dimension`] the resulting dimension bounds.

#![forbid(unsafe_code)]

pub mod bifurcation;
pub mod digits;
pub mod dimension;
pub mod error;
pub mod expansion;
pub mod poly;
pub mod rational;
pub mod subshift;

pub use error::{Error, Rejection, Result};
