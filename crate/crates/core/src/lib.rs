//! Hecke eigensystems on a definite quaternion algebra, their transfer to the
//! norm-one group, and the p-adic spectral data around them.

pub mod arith;
pub mod error;
pub mod hecke;
pub mod linalg;
pub mod overconvergent;
pub mod packets;
pub mod padic;
pub mod qp;
pub mod quadratic;
pub mod quaternion;
pub mod residue;
pub mod spectral;
pub mod tame;
pub mod transfer;
pub mod weight;

pub use error::{Error, Result};
pub use padic::{hensel_sqrt, newton_polygon, valuation, NewtonPolygon, PadicApprox, Rational, Valuation};
pub use quadratic::QuadraticNumber;
