//! The four worked examples shipped in `fixtures/`.

use crate::io::TensorFile;
use crate::tensor::{AnyTensor, PairedTensor4, PairedTensor6};

pub const EX71: &str = include_str!("../../../fixtures/ex71");
pub const EX72: &str = include_str!("../../../fixtures/ex72");
pub const EX73: &str = include_str!("../../../fixtures/ex73");
pub const EX74: &str = include_str!("../../../fixtures/ex74");

fn load4(text: &str) -> PairedTensor4 {
    match TensorFile::parse(text).and_then(|f| f.to_tensor()) {
        Ok(AnyTensor::Paired4(t)) => t,
        _ => unreachable!("bundled 4th order fixture"),
    }
}

/// Choi-type form: PSD, not SOS of bilinear forms, smallest M-eigenvalue 0.
pub fn ex71() -> PairedTensor4 {
    load4(EX71)
}

/// Positive definite with smallest M-eigenvalue 1.
pub fn ex72() -> PairedTensor4 {
    load4(EX72)
}

/// SOS of bilinear forms but not positive definite.
pub fn ex73() -> PairedTensor4 {
    load4(EX73)
}

/// 6th order SOS of trilinear forms, not positive definite.
pub fn ex74() -> PairedTensor6 {
    match TensorFile::parse(EX74).and_then(|f| f.to_tensor()) {
        Ok(AnyTensor::Paired6(t)) => t,
        _ => unreachable!("bundled 6th order fixture"),
    }
}
