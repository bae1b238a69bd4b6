//! Computational symbolic dynamics over free products of finite and cyclic groups.
//!
//! The crate covers subshifts of finite type, their Rauzy-graph form, sofic
//! images over ℤ, coloring automata with direction tracking, finite-scale
//! isolation and minimality certificates, pseudo-orbit tracing, and a
//! Toeplitz coding of binary sequences.

pub mod analysis;
pub mod automaton;
pub mod cli;
pub mod error;
pub mod format;
pub mod group;
pub mod pattern;
pub mod rauzy;
mod search;
pub mod sft;
pub mod shadowing;
pub mod sofic;
pub mod toeplitz;

pub use error::{Error, Result};
pub use group::{Factor, Group, GroupElement, Support};
pub use pattern::Pattern;
pub use rauzy::{to_rauzy, RauzyGraph, Recoding};
pub use sofic::{apply_code, canonical_form, image_sofic, sofic_equal, SlidingBlockCode, SoficPresentation};
pub use sft::{AlphabetMap, GlobalPatterns, Sft};
pub use format::SpecFile;
