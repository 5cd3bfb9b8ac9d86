//! Activity statistics of diffusion-limited pair annihilation and deposition
//! (DLPAD) on the integer torus.
//!
//! The crate is `no_std` (with `alloc`). It provides
//!
//! * [`model`]: rates, tilted XY parameters, the free-fermion dispersion and
//!   the critical tilt,
//! * [`combinatorics`]: Stirling numbers, half-integer binomials, derivative
//!   coefficients of square roots of quadratics, the trigonometric sums
//!   `Φ_m(N)` and odd zeta values,
//! * [`cgf`]: the exact finite-size cumulant generating function and
//!   closed-form critical cumulants of any order,
//! * [`asymptotics`]: the large-`L` coefficients and the scaling functions
//!   `h(u)` and `g(u)`,
//! * [`oracles`]: dense exact diagonalization of the tilted Hamiltonian and
//!   Richardson-extrapolated finite differences,
//! * [`mc`]: a kinetic Monte Carlo simulation of the untilted process with
//!   activity counting.
//!
//! Critical quantities are expressed through `nu = 1 - mu/w` at the
//! normalization `w = 1/2`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod cgf;
pub mod combinatorics;
pub mod dd;
mod error;
pub mod mc;
pub mod model;
pub mod oracles;
pub mod sum;

pub use error::{Error, Result};
pub use model::{ModelParams, Sector, TiltedParams, TrigPair};
