//! Mach-Zehnder scheme: forward and time-reversed halves of a protocol
//! interfere on a path qubit, and the fringe contrast reads out transition
//! probabilities (pure preparations) or bounds the dissipation (thermal
//! preparations).

mod bounds;
mod reconstruct;

pub use bounds::{
    bounds_from_distinguishability, bounds_from_visibility, complementarity_report,
    dissipation_bounds, dissipation_bounds_marginal, ComplementarityReport, DissipationBounds,
    ALPHA_FLOOR,
};
pub use reconstruct::{reconstruct_dissipation, reconstruct_work_distribution, visibility_matrix};

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eig, kron_vec, partial_trace, trace_distance, ComplexMatrix, DensityOperator,
    StateRole, Subsystem, C64,
};
use crate::protocol::{DrivingProtocol, Evolution};
use crate::thermo::ThermalState;

/// Number of reference phases sampled before analytic refinement.
pub const PHASE_SCAN_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PreparationMode {
    /// `|E_n(0)>` into the forward arm, `Theta |E_m(tau)>` into the reversed arm.
    PureEigenpair { n: usize, m: usize },
    /// Index-matched purifications of the two Gibbs states.
    ThermalPurified { beta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchemeMode {
    /// Forward evolution up to the split time on one arm, the time-reversed
    /// remainder on the other.
    SplitHalf,
    /// Full forward evolution on one arm, nothing on the other.
    FullForward,
    /// Split at an explicit time.
    SplitAt(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PortProbabilities {
    pub plus: f64,
    pub minus: f64,
}

impl PortProbabilities {
    fn at_phase(coherence: C64, phase: f64) -> Self {
        let x = (C64::from_polar(1.0, phase) * coherence).re;
        Self {
            plus: 0.5 + x,
            minus: 0.5 - x,
        }
    }

    pub fn contrast(&self) -> f64 {
        (self.plus - self.minus).abs()
    }
}

#[derive(Clone, Debug)]
pub struct InterferometerRun {
    preparation: PreparationMode,
    scheme: SchemeMode,
    interference_time: f64,
    visibility: f64,
    ports_zero_phase: PortProbabilities,
    ports_optimal: PortProbabilities,
    optimal_phase: f64,
    ancilla: DensityOperator,
    system_marginal: Option<DensityOperator>,
}

impl InterferometerRun {
    pub fn preparation(&self) -> PreparationMode {
        self.preparation
    }

    pub fn scheme(&self) -> SchemeMode {
        self.scheme
    }

    pub fn interference_time(&self) -> f64 {
        self.interference_time
    }

    /// Fringe contrast `V = 2 |<0|rho_A|1>|`.
    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    pub fn ports_zero_phase(&self) -> PortProbabilities {
        self.ports_zero_phase
    }

    pub fn ports_optimal(&self) -> PortProbabilities {
        self.ports_optimal
    }

    pub fn optimal_phase(&self) -> f64 {
        self.optimal_phase
    }

    /// Reduced path state.
    pub fn ancilla(&self) -> &DensityOperator {
        &self.ancilla
    }

    /// Reduced system state at the interference time.
    pub fn system_marginal(&self) -> Option<&DensityOperator> {
        self.system_marginal.as_ref()
    }

    /// Port probabilities at reference phase `phase`.
    pub fn ports_at(&self, phase: f64) -> PortProbabilities {
        PortProbabilities::at_phase(self.ancilla.matrix()[(0, 1)], phase)
    }
}

/// Operators acting on the two arms: `first = U(t_s, 0)` on the forward arm
/// and `back = Theta^dagger U~(tau - t_s, 0) Theta` on the reversed arm.
#[derive(Clone, Debug)]
pub struct ArmOperators {
    pub first: ComplexMatrix,
    pub back: ComplexMatrix,
    pub split_time: f64,
}

pub fn arm_operators(protocol: &DrivingProtocol, scheme: SchemeMode) -> Result<ArmOperators> {
    let tau = protocol.duration();
    let split_time = match scheme {
        SchemeMode::SplitHalf => protocol.split_time(),
        SchemeMode::FullForward => tau,
        SchemeMode::SplitAt(t) => {
            if let Evolution::Stepwise(s) = protocol.evolution() {
                s.boundary_index(t)
                    .map_err(|_| Error::OddSplitBoundary { time: t })?;
            }
            t
        }
    };
    let first = protocol.forward(split_time, 0.0)?;
    let back = protocol.reversed((tau - split_time).max(0.0), 0.0)?.conj();
    Ok(ArmOperators {
        first,
        back,
        split_time,
    })
}

/// Arm states for a preparation: `(a0, a1, environment dimension)`.
fn arm_states(
    arms: &ArmOperators,
    h0: &ComplexMatrix,
    htau: &ComplexMatrix,
    preparation: PreparationMode,
) -> Result<(Vec<C64>, Vec<C64>, usize)> {
    let d = h0.dim();
    match preparation {
        PreparationMode::PureEigenpair { n, m } => {
            for index in [n, m] {
                if index >= d {
                    return Err(Error::IndexOutOfRange { index, dim: d });
                }
            }
            let initial = hermitian_eig(h0)?;
            let last = hermitian_eig(htau)?;
            let a0 = arms.first.apply(&initial.vector(n));
            let a1 = arms.back.apply(&last.vector(m));
            Ok((a0, a1, 1))
        }
        PreparationMode::ThermalPurified { beta } => {
            let rho0 = ThermalState::new(h0, beta)?;
            let rho_tilde = ThermalState::new(htau, beta)?;
            let a0 = purification(&rho0, &arms.first);
            let a1 = purification(&rho_tilde, &arms.back);
            Ok((a0, a1, d))
        }
    }
}

/// `(U (x) 1) sum_n sqrt(p_n) |E_n>|n>`.
fn purification(state: &ThermalState, u: &ComplexMatrix) -> Vec<C64> {
    let d = state.dim();
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for (n, &p) in state.probabilities().iter().enumerate() {
        let v = u.apply(&state.eigen().vector(n));
        let env = crate::matcore::basis_vector(d, n);
        for (o, x) in out.iter_mut().zip(kron_vec(&v, &env)) {
            *o += x * p.sqrt();
        }
    }
    out
}

fn optimal_phase(coherence: C64) -> f64 {
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..PHASE_SCAN_POINTS {
        let c = PortProbabilities::at_phase(coherence, TAU * k as f64 / PHASE_SCAN_POINTS as f64)
            .contrast();
        if c > best.1 {
            best = (k, c);
        }
    }
    if coherence.norm() == 0.0 {
        return 0.0;
    }
    let scanned = TAU * best.0 as f64 / PHASE_SCAN_POINTS as f64;
    // exact extremum of the fringe on the same branch as the scan winner
    let sign = (C64::from_polar(1.0, scanned) * coherence).re;
    let exact = if sign >= 0.0 {
        -coherence.arg()
    } else {
        PI - coherence.arg()
    };
    exact.rem_euclid(TAU)
}

/// Interference of two arm states on a path qubit.
///
/// The joint state `(|0>|a0> + |1>|a1>)/sqrt 2` is built explicitly and the
/// path qubit obtained by partial trace.
pub fn interfere(
    a0: &[C64],
    a1: &[C64],
    system_dim: usize,
    preparation: PreparationMode,
    scheme: SchemeMode,
    interference_time: f64,
) -> Result<InterferometerRun> {
    let dx = a0.len();
    if a1.len() != dx || !dx.is_multiple_of(system_dim) {
        return Err(Error::DimensionMismatch {
            expected: dx,
            found: a1.len(),
        });
    }
    let mut psi = Vec::with_capacity(2 * dx);
    psi.extend(a0.iter().map(|z| z * FRAC_1_SQRT_2));
    psi.extend(a1.iter().map(|z| z * FRAC_1_SQRT_2));
    let joint = DensityOperator::pure(&psi, StateRole::Joint)?;
    let ancilla = partial_trace(&joint, Subsystem::First, (2, dx))?.with_role(StateRole::Auxiliary);
    let rest = partial_trace(&joint, Subsystem::Second, (2, dx))?;
    let env_dim = dx / system_dim;
    let system = if env_dim == 1 {
        rest
    } else {
        partial_trace(&rest, Subsystem::First, (system_dim, env_dim))?
    }
    .with_role(StateRole::System);
    let coherence = ancilla.matrix()[(0, 1)];
    let phase = optimal_phase(coherence);
    Ok(InterferometerRun {
        preparation,
        scheme,
        interference_time,
        visibility: (2.0 * coherence.norm()).min(1.0),
        ports_zero_phase: PortProbabilities::at_phase(coherence, 0.0),
        ports_optimal: PortProbabilities::at_phase(coherence, phase),
        optimal_phase: phase,
        ancilla,
        system_marginal: Some(system),
    })
}

/// Runs the scheme with explicit arm operators and endpoint Hamiltonians.
pub fn run_with_arms(
    arms: &ArmOperators,
    h0: &ComplexMatrix,
    htau: &ComplexMatrix,
    preparation: PreparationMode,
    scheme: SchemeMode,
) -> Result<InterferometerRun> {
    let (a0, a1, _) = arm_states(arms, h0, htau, preparation)?;
    interfere(&a0, &a1, h0.dim(), preparation, scheme, arms.split_time)
}

pub fn run(
    protocol: &DrivingProtocol,
    preparation: PreparationMode,
    scheme: SchemeMode,
) -> Result<InterferometerRun> {
    let arms = arm_operators(protocol, scheme)?;
    run_with_arms(
        &arms,
        protocol.initial_hamiltonian(),
        protocol.final_hamiltonian(),
        preparation,
        scheme,
    )
}

/// Pure eigenstate preparation; `V^2 = p_{m|n}`.
pub fn run_pure(
    protocol: &DrivingProtocol,
    scheme: SchemeMode,
    n: usize,
    m: usize,
) -> Result<InterferometerRun> {
    run(protocol, PreparationMode::PureEigenpair { n, m }, scheme)
}

/// Thermal preparation via canonical purifications.
pub fn run_thermal(
    protocol: &DrivingProtocol,
    scheme: SchemeMode,
    beta: f64,
) -> Result<InterferometerRun> {
    run(protocol, PreparationMode::ThermalPurified { beta }, scheme)
}

/// The which-path states of system and environment at the split time.
#[derive(Clone, Debug)]
pub struct DetectorStates {
    pub plus: DensityOperator,
    pub minus: DensityOperator,
    system_dim: usize,
}

impl DetectorStates {
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// Trace distance of the pure joint detector states.
    pub fn joint_distinguishability(&self) -> Result<f64> {
        trace_distance(&self.plus, &self.minus)
    }

    /// Trace distance of the system marginals `rho(t_s)` and
    /// `Theta^dagger rho~(tau - t_s) Theta`.
    pub fn marginal_distinguishability(&self) -> Result<f64> {
        let (plus, minus) = self.system_marginals()?;
        trace_distance(&plus, &minus)
    }

    pub fn system_marginals(&self) -> Result<(DensityOperator, DensityOperator)> {
        let d = self.system_dim;
        Ok((
            partial_trace(&self.plus, Subsystem::First, (d, d))?,
            partial_trace(&self.minus, Subsystem::First, (d, d))?,
        ))
    }
}

/// Detector states of the split scheme with thermal preparation.
pub fn detector_states(protocol: &DrivingProtocol, beta: f64) -> Result<DetectorStates> {
    let arms = arm_operators(protocol, SchemeMode::SplitHalf)?;
    let (a0, a1, _) = arm_states(
        &arms,
        protocol.initial_hamiltonian(),
        protocol.final_hamiltonian(),
        PreparationMode::ThermalPurified { beta },
    )?;
    Ok(DetectorStates {
        plus: DensityOperator::pure(&a0, StateRole::Joint)?,
        minus: DensityOperator::pure(&a1, StateRole::Joint)?,
        system_dim: protocol.dim(),
    })
}
