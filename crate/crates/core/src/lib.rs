//! Numerical laboratory for sharp fractional and local Hardy inequalities:
//! sharp constants, deficits and remainder functionals, Lorentz-space
//! distances, the Emden-Fowler spectral transport map, and the associated
//! Hardy-Heisenberg uncertainty functionals.

pub mod constants;
pub mod cylinder;
pub mod deficits;
pub mod error;
pub mod kernel;
pub mod norms;
pub mod params;
pub mod profiles;
pub mod quad;
pub mod specfun;
pub mod stability;
pub mod uncertainty;

pub use error::{Error, Result};
pub use params::Params;
