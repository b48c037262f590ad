#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod affine;
pub mod compact;
pub mod elemset;
pub mod geometry;
pub mod lattice;
pub mod linalg;
pub mod poset;
pub mod rational;
pub mod tubing;

pub use elemset::ElemSet;
pub use lattice::FaceLattice;
pub use poset::{Coords, Poset, PosetError};
pub use rational::Q;
