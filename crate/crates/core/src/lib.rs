//! Signed enumeration of isotropic tangent lines through a base point to a
//! closed immersed hypersurface of ℝ²ⁿ with its standard symplectic form.
//!
//! For p off the surface, 𝒩(Σ, p) = 2·ind(Σ) − 2·ind_p(Σ), where ind is the
//! degree of the Gauss map and ind_p the degree of the radial projection from
//! p. The crate finds the tangencies, evaluates their signs from the shape
//! operator and the contact tensor, and computes both degrees independently.

pub mod ambient;
pub mod contact;
pub mod degree;
mod error;
pub mod lines;
pub mod solve;
pub mod surface;

pub use ambient::{AmbientSpace, Matrix, Vector};
pub use error::{Error, Result};
pub use surface::{make_scenario, BasePoint, ImmersedHypersurface, ScenarioParams, SourcePoint};
