//! Driving protocols and their forward and time-reversed propagators.
//!
//! A [`DrivingProtocol`] couples an evolution (a piecewise-constant
//! [`HamiltonianSchedule`] or the continuous qubit rotation) with the
//! Hamiltonians whose eigenbases define the initial and final energy
//! measurements.

mod qubit;
mod reversal;
mod schedule;

pub use qubit::{Driving, QubitBasisState, QubitRotationProtocol};
pub use reversal::{apply_time_reversal, TimeReversal, TimeReversible};
pub use schedule::{HamiltonianSchedule, BOUNDARY_TOL, REALNESS_TOL};

use crate::error::{Error, Result};
use crate::matcore::{check_hermitian, ComplexMatrix};

#[derive(Clone, Debug)]
pub enum Evolution {
    Stepwise(HamiltonianSchedule),
    Continuous(QubitRotationProtocol),
}

#[derive(Clone, Debug)]
pub struct DrivingProtocol {
    initial: ComplexMatrix,
    last: ComplexMatrix,
    evolution: Evolution,
}

impl DrivingProtocol {
    /// Uses the first and last step generators as `H(0)` and `H(tau)`.
    pub fn from_schedule(schedule: HamiltonianSchedule) -> Self {
        let initial = schedule.hamiltonian(0).clone();
        let last = schedule.hamiltonian(schedule.len() - 1).clone();
        Self {
            initial,
            last,
            evolution: Evolution::Stepwise(schedule),
        }
    }

    pub fn with_endpoints(
        schedule: HamiltonianSchedule,
        initial: ComplexMatrix,
        last: ComplexMatrix,
    ) -> Result<Self> {
        for h in [&initial, &last] {
            if h.dim() != schedule.dim() {
                return Err(Error::DimensionMismatch {
                    expected: schedule.dim(),
                    found: h.dim(),
                });
            }
            check_hermitian(h)?;
            if !h.is_real(REALNESS_TOL * h.max_abs().max(1.0)) {
                return Err(Error::InvalidProtocol(
                    "endpoint Hamiltonian is not real".into(),
                ));
            }
        }
        Ok(Self {
            initial,
            last,
            evolution: Evolution::Stepwise(schedule),
        })
    }

    /// The rotation protocol, discretised or continuous as configured.
    pub fn qubit(p: &QubitRotationProtocol) -> Result<Self> {
        let evolution = match p.driving() {
            Driving::Discrete { .. } => Evolution::Stepwise(p.step_hamiltonians()?),
            Driving::Continuous => Evolution::Continuous(*p),
        };
        Ok(Self {
            initial: p.initial_hamiltonian(),
            last: p.final_hamiltonian(),
            evolution,
        })
    }

    pub fn evolution(&self) -> &Evolution {
        &self.evolution
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn duration(&self) -> f64 {
        match &self.evolution {
            Evolution::Stepwise(s) => s.total_duration(),
            Evolution::Continuous(p) => p.tau(),
        }
    }

    pub fn initial_hamiltonian(&self) -> &ComplexMatrix {
        &self.initial
    }

    pub fn final_hamiltonian(&self) -> &ComplexMatrix {
        &self.last
    }

    /// Step boundaries, or `None` for continuous driving.
    pub fn boundaries(&self) -> Option<&[f64]> {
        match &self.evolution {
            Evolution::Stepwise(s) => Some(s.boundaries()),
            Evolution::Continuous(_) => None,
        }
    }

    /// Interference time of the split scheme: the end of step `ceil(N/2)`,
    /// or `tau / 2` for continuous driving.
    pub fn split_time(&self) -> f64 {
        match &self.evolution {
            Evolution::Stepwise(s) => s.boundaries()[s.len().div_ceil(2)],
            Evolution::Continuous(p) => p.tau() / 2.0,
        }
    }

    /// Forward propagator `U(t1, t0)`.
    pub fn forward(&self, t1: f64, t0: f64) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Stepwise(s) => s.forward_unitary(t1, t0),
            Evolution::Continuous(p) => {
                let u0 = p.continuous_unitary(t0)?;
                Ok(p.continuous_unitary(t1)?.matmul(&u0.adjoint()))
            }
        }
    }

    /// Propagator `U~(t1, t0)` of the time-reversed protocol.
    pub fn reversed(&self, t1: f64, t0: f64) -> Result<ComplexMatrix> {
        match &self.evolution {
            Evolution::Stepwise(s) => s.reversed_unitary(t1, t0),
            Evolution::Continuous(p) => {
                let u0 = p.continuous_reversed_unitary(t0)?;
                Ok(p.continuous_reversed_unitary(t1)?.matmul(&u0.adjoint()))
            }
        }
    }
}
