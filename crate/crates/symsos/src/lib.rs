//! Symmetry-reduced sum-of-squares decompositions for polynomials invariant under a
//! finite group, with exactly verifiable rational certificates.

pub mod certpipeline;
pub mod cyclotomic;
pub mod equivariant;
pub mod error;
pub mod grouprep;
pub mod invariantring;
pub mod isotypic;
pub mod linalg;
pub mod molien;
pub mod polyring;
pub mod rational;
pub mod sdp;
pub mod textformat;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/lower-bounds.md")]
    mod lower_bounds {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
}
