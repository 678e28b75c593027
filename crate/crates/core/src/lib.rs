//! Executable shift-completeness witnesses for permutation models whose atoms
//! are the rationals and whose group is the (piecewise-linear) group of order
//! automorphisms of ℚ.
//!
//! The crate is organised bottom-up:
//!
//! - [`rational`], [`interval`], [`plmap`]: exact arithmetic and the group.
//! - [`ndset`]: finitely presented nowhere-dense sets, the supports.
//! - [`shift`]: the evacuation recursion producing shift witnesses, and an
//!   independent trace verifier.
//! - [`hfa`]: hereditarily finite values over atoms and the group action.
//! - [`subgroup`]: symbolic subgroup terms with membership oracles.
//! - [`dc`]: finite-prefix runs of both directions of the equivalence between
//!   shift completeness and dependent choice.
//! - [`cli`], [`props`]: command-line plumbing and the seeded property runner.

pub mod cli;
pub mod dc;
pub mod enumerate;
pub mod error;
pub mod factor;
pub mod hfa;
pub mod interval;
pub mod ndset;
pub mod plmap;
pub mod props;
pub mod rational;
pub mod report;
pub mod sample;
pub mod shift;
pub mod subgroup;

pub use error::{Error, Result};
pub use interval::{ClosedInterval, Interval};
pub use ndset::{Containment, GeomTail, NdSet};
pub use plmap::{squeeze_map, PlMap};
pub use rational::{q, Rational};
pub use report::{Check, Report, Verdict};
pub use shift::{
    evacuate, run_shift_construction, verify_shift_trace, witness_subgroup, EStream, ShiftTrace,
};
