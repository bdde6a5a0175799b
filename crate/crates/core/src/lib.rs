//! Spectral data, Painlevé II transcendents and transition-layer asymptotics
//! for the defocusing nonlinear Schrödinger equation
//!
//! ```text
//! i q_t + q_xx − 2(|q|² − 1) q = 0,    q(x, t) → ±1 as x → ±∞,
//! ```
//!
//! in the two transition wedges |x/(2t) ∓ 1| t^{2/3} ≤ C.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches
//! files, FFTs or threads lives in the companion `dnls-lab` crate.
#![no_std]

extern crate alloc;

pub mod airy;
pub mod asymptotics;
pub mod error;
pub mod linalg;
pub mod painleve;
pub mod phase;
pub mod quad;
pub mod scattering;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
