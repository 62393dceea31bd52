//! A desk-scale laboratory for the small-data asymptotics of the 2D
//! semilinear wave equation `□u = F(∂u)` with a cubic nonlinearity
//!
//! ```text
//! F(∂u) = Σ p_abc (∂_a u)(∂_b u) conj(∂_c u),     a, b, c ∈ {0, 1, 2}
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`nonlinearity`]: coefficient tensors, their trace on the null circle
//!   and the structural classification (null condition, Agemi condition,
//!   strict dissipation).
//! * [`profile`]: the asymptotic profile equation `∂_τP = −(F(ω̂)/2)|P|²P`,
//!   its closed-form solution and a fixed-step integrator.
//! * [`char_ode`]: the forced model ODE along a characteristic together
//!   with its `(ξ, η)` companion system and the constructive extraction of
//!   the limiting profile.
//! * [`solver`]: leapfrog time stepping in a radially symmetric mode and a
//!   full 2D Cartesian mode.
//! * [`asymptotics`]: ray extraction `U = D₋(r^{1/2}u)` from solver
//!   snapshots and the decay, phase and profile fits.
//! * [`runner`]: configuration files, presets, ε-sweeps and artifact
//!   persistence behind the `semiwave` binary.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod char_ode;
pub mod error;
pub mod fit;
pub mod nonlinearity;
pub mod profile;
pub mod quadrature;
pub mod rk4;
pub mod runner;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
