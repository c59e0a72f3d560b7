//! Combinatorics of brane tilings.
//!
//! A tiling is read from a rotation system ([`tiling`]), unfolded into
//! patches of its universal cover ([`cover`]) and studied through the
//! F-term rewriting engine ([`fterm`]). The remaining modules build on the
//! engine: bounded consistency checks, graded exactness scans, crystal
//! modules with their dimer counterparts, and torus-localized DT counts.

pub mod consistency;
pub mod cover;
pub mod crystal;
pub mod cy3;
pub mod dt;
pub mod error;
pub mod fterm;
pub mod lattice;
pub mod linalg;
pub mod matchings;
pub mod par;
pub mod tiling;

pub use error::{Error, Result};
pub use tiling::{parse_tiling, Arrow, BraneTiling, EdgeId, FaceId, VertexId, Word};

/// The tilings shipped with the crate.
pub mod examples {
    use crate::tiling::{parse_tiling, BraneTiling};

    pub const C3: &str = include_str!("../tilings/c3.tiling");
    pub const CONIFOLD: &str = include_str!("../tilings/conifold.tiling");
    pub const CUBE: &str = include_str!("../tilings/cube.tiling");

    /// Bundled tiling text by file name, with or without the extension.
    pub fn bundled(name: &str) -> Option<&'static str> {
        match name.trim_end_matches(".tiling") {
            "c3" => Some(C3),
            "conifold" => Some(CONIFOLD),
            "cube" => Some(CUBE),
            _ => None,
        }
    }

    pub fn c3() -> BraneTiling {
        parse_tiling(C3).expect("bundled tiling parses")
    }

    pub fn conifold() -> BraneTiling {
        parse_tiling(CONIFOLD).expect("bundled tiling parses")
    }

    pub fn cube() -> BraneTiling {
        parse_tiling(CUBE).expect("bundled tiling parses")
    }
}
