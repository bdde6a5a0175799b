//! Direct scattering for the Zakharov–Shabat operator with a nonzero
//! background, on the uniformization variable z (λ = (z + 1/z)/2,
//! ζ = (z − 1/z)/2).

pub mod data;
pub mod datum;
pub mod jost;
pub mod nu;
pub mod spectrum;

pub use data::{EdgeData, GridInfo, ScatteringData, ScatteringSettings};
pub use datum::{tanh_plus_gaussian, InitialDatum};
pub use jost::{JostColumns, JostSolver, ScatteringCoefficients};
pub use nu::{Half, NuSettings, NuTable, RealSample};
pub use spectrum::{discrete_spectrum, DiscreteEigenvalue, SpectrumSettings};
