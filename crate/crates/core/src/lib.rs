//! Simulation of an interferometric scheme that reads quantum work statistics
//! off fringe visibilities.
//!
//! A system is driven by a Hamiltonian protocol; one interferometer arm runs
//! the first part of the protocol forward, the other runs the remainder
//! backwards in time followed by the time-reversal map. The visibility of
//! the resulting fringes equals the square root of a two-point-measurement
//! transition probability, so the full work distribution and the average
//! dissipated work can be reconstructed without energy measurements. With
//! only thermal preparations available, the visibility still bounds the
//! dissipation.
//!
//! Modules:
//! - [`matcore`]: dense complex linear algebra (eigensolver, matrix functions,
//!   entropies, distances, partial traces).
//! - [`protocol`]: driving protocols, forward and time-reversed propagators.
//! - [`thermo`]: Gibbs states, work distributions, fluctuation theorems.
//! - [`interfero`]: the Mach-Zehnder scheme, reconstruction and bounds.
//! - [`oracle`]: independent brute-force cross-checks.
//!
//! Units: `hbar = k_B = 1`.

pub mod error;
pub mod interfero;
pub mod matcore;
pub mod oracle;
pub mod protocol;
pub mod thermo;

pub use error::{Error, Result};
pub use interfero::{InterferometerRun, PortProbabilities, PreparationMode, SchemeMode};
pub use matcore::{ComplexMatrix, DensityOperator, SpectralDecomposition, C64};
pub use protocol::{
    Driving, DrivingProtocol, HamiltonianSchedule, QubitRotationProtocol, TimeReversal,
};
pub use thermo::{Direction, ThermalState, TransitionMatrix, WorkDistribution};
