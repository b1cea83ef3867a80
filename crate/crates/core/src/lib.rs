//! Positive definiteness (strong ellipticity) of 4th and 6th order three dimensional
//! paired symmetric and elasticity tensors.
//!
//! A 4th order tensor 𝒜 is positive definite when its biquadratic form
//! 𝒜x²y² = Σ a_ijkl x_i x_j y_k y_l is positive for all nonzero x, y. The crate
//! offers several routes to a verdict:
//!
//! - [`soscert`]: sum-of-squares certificates from PSD unfolded matrices;
//! - [`meigen`]: the smallest M-eigenvalue, whose sign decides definiteness;
//! - [`sylvester`]: leading-minor reductions of the parameterized matrix A(y);
//! - [`sdp`]: a hierarchy of semidefinite relaxations giving lower bounds.
//!
//! ```
//! use strong_ellipticity::tensor::PairedTensor4;
//! use strong_ellipticity::meigen::smallest_meig;
//!
//! let e = PairedTensor4::identity();
//! let est = smallest_meig(&e);
//! assert!((est.lambda_min.unwrap() - 1.0).abs() < 1e-10);
//! ```

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod form;
pub mod io;
pub mod linalg;
pub mod meigen;
pub mod poly;
pub mod report;
pub mod sdp;
pub mod soscert;
pub mod sylvester;
pub mod tensor;
pub mod unfold;
pub mod verdict;

pub use error::{Error, Result};
pub use verdict::Verdict;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/unfoldings.md")]
    mod unfoldings {}
    #[doc = include_str!("../../../book/src/meigen.md")]
    mod meigen {}
    #[doc = include_str!("../../../book/src/sylvester.md")]
    mod sylvester {}
    #[doc = include_str!("../../../book/src/sdp.md")]
    mod sdp {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
