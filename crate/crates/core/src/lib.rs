//! Exact computations with reductive Borel-Serre categories of finite local
//! rings: rings and summands, chain complexes and their homology, finite
//! categories and nerves, flag posets and Tits complexes, and the
//! combinatorics of partitioned linearly ordered sets.

pub mod caps;
pub mod category;
pub mod error;
pub mod flags;
pub mod homology;
pub mod ordpm;
pub mod rbs;
pub mod ring;

pub use caps::Caps;
pub use error::{Error, Result};
