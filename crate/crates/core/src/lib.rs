//! Certification and simulation of chemical reaction networks whose
//! dynamics preserve a cone order.

pub mod certify;
pub mod dsr;
pub mod factorization;
pub mod integrate;
pub mod kinetics;
pub mod linalg;
pub mod network;
pub mod order;
pub mod persistence;
pub mod scc;
pub mod simplex;
pub mod validate;

#[cfg(test)]
mod testutil;
