//! Exact computations with equivariant birational modular symbols.

pub mod burnside;
pub mod group_ring;
pub mod laws;
pub mod linalg;
pub mod nori;
pub mod ops;
pub mod qz;
pub mod relations;
pub mod sum;
pub mod symbol;
pub mod wire;
