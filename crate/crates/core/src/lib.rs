//! Exact generating-series computations for quiver moduli.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: truncated multivariate power series over arbitrary-precision
//!   rationals, the arithmetic substrate for everything else.
//! * [`arith`]: partitions, the Möbius function, generalized binomials,
//!   p-adic valuations and the binomial congruences of Kummer and Jacobsthal.
//! * [`quiver`]: quivers, Euler form, slopes, Coxeter transformation and
//!   local quivers of polystable types.
//! * [`hilbert`]: Euler characteristics of non-commutative Hilbert schemes,
//!   both by the grafting functional equation and by brute-force forest
//!   enumeration.
//! * [`moduli`]: generating series of smooth models over a slope stratum.
//! * [`duality`]: Euler-product versus functional-equation duality, the
//!   Möbius inversion formula and Lagrange inversion checks.
//! * [`wall_crossing`]: Poisson automorphisms, slope-ordered factorizations and
//!   Donaldson-Thomas invariants of Kronecker quivers.
//! * [`verify`]: a property suite across all of the above.
//!
//! All arithmetic is exact. Nothing in this crate rounds.

pub mod arith;
pub mod duality;
mod error;
pub mod hilbert;
pub mod moduli;
pub mod quiver;
pub mod rational;
pub mod series;
pub mod verify;
pub mod wall_crossing;

pub use error::{Error, Result};
pub use quiver::{PolystableType, Quiver, Stability};
pub use series::{LatticePoint, TruncatedSeries};
