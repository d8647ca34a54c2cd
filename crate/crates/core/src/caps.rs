use serde::{Deserialize, Serialize};

/// Enumeration limits shared by every constructor that enumerates something.
///
/// The defaults admit GL_3(F_3) (11232 elements) but refuse GL_4(F_4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest ring that may be constructed.
    pub ring_size: u64,
    /// Rings up to this size get the exhaustive locality check.
    pub ring_check: u64,
    pub gl_order: u64,
    pub summands: u64,
    pub flags: u64,
    pub morphisms: u64,
    /// Largest number of composable chains in any single degree of a nerve.
    pub chains: u64,
    /// Categories with at most this many composable triples are checked for
    /// associativity exhaustively; larger ones are sampled.
    pub associativity: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            ring_size: 10_000,
            ring_check: 10_000,
            gl_order: 20_000,
            summands: 200_000,
            flags: 200_000,
            morphisms: 2_000_000,
            chains: 60_000_000,
            associativity: 5_000_000,
        }
    }
}
