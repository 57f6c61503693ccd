//! Network autocorrelation models and the estimators used to test for
//! directional peer effects.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`). The aliases
//! at the bottom of this file fix the scalar: `f64` by default, `f32` for
//! names ending in `32`. Experiments and the command-line tool use `f64`.

pub mod error;
pub mod estimate;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod net;
pub mod outcome;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use net::{make_regular_network, DegreeSequences, Direction, DirectedNetwork, Edge, Rewired};
pub use scalar::Real;
pub use estimate::fit::{FitResult, Term};
pub use estimate::qad::{Family, QadResult};
pub use outcome::ising::IsingParams;
pub use outcome::panel::PanelDataset;
pub use outcome::sar::SarParams;

pub type Network = DirectedNetwork<f64>;
pub type Network32 = DirectedNetwork<f32>;
pub type Fit = FitResult<f64>;
pub type Fit32 = FitResult<f32>;
pub type Sar = SarParams<f64>;
pub type Sar32 = SarParams<f32>;
pub type Ising = IsingParams<f64>;
pub type Panel = PanelDataset<f64>;
pub type Qad = QadResult<f64>;
