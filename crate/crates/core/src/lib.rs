//! Validated numerics for the rotation of an ellipsoidal satellite on an
//! elliptic orbit: interval arithmetic, rigorous Taylor integration, the
//! Poincare map on `{f = 0}`, interval Newton fixed points and covering
//! relations between h-sets.

pub mod cli;
pub mod integrator;
pub mod interval;
pub mod model;
pub mod hset;
pub mod newton;
pub mod poincare;
pub mod proofs;
pub mod scatter;
