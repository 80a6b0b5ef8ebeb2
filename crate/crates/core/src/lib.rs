//! Kauffman bracket skein modules of lens spaces through Heegaard splittings.

pub mod action;
pub mod annulus;
pub mod cli;
pub mod lang;
pub mod lens;
pub mod scalar;
pub mod torus;
pub mod verify;
