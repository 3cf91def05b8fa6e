use super::{arm_operators, run_with_arms, PreparationMode, SchemeMode};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::protocol::DrivingProtocol;
use crate::thermo::{Direction, ThermalState, TransitionMatrix, WorkDistribution};

/// Row sum tolerance for `sum_m V_{m,n}^2 = 1`.
pub const STOCHASTIC_TOL: f64 = 1e-8;

/// `V_{m,n}` for every eigenpair, indexed `[m][n]`.
pub fn visibility_matrix(protocol: &DrivingProtocol, scheme: SchemeMode) -> Result<Vec<Vec<f64>>> {
    let arms = arm_operators(protocol, scheme)?;
    let d = protocol.dim();
    (0..d)
        .map(|m| {
            (0..d)
                .map(|n| {
                    run_with_arms(
                        &arms,
                        protocol.initial_hamiltonian(),
                        protocol.final_hamiltonian(),
                        PreparationMode::PureEigenpair { n, m },
                        scheme,
                    )
                    .map(|r| r.visibility())
                })
                .collect()
        })
        .collect()
}

fn conditionals(visibilities: &[Vec<f64>], d: usize) -> Result<TransitionMatrix> {
    if visibilities.len() != d || visibilities.iter().any(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: visibilities.len(),
        });
    }
    let c = TransitionMatrix::from_fn(d, |m, n| visibilities[m][n].powi(2));
    for (column, sum) in c.column_sums().into_iter().enumerate() {
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NonStochasticVisibilities { column, sum });
        }
    }
    Ok(c)
}

/// `P(W) = sum p_n V_{m,n}^2 delta(W - E_m(tau) + E_n(0))`.
pub fn reconstruct_work_distribution(
    visibilities: &[Vec<f64>],
    h0: &ComplexMatrix,
    htau: &ComplexMatrix,
    beta: f64,
) -> Result<WorkDistribution> {
    let c = conditionals(visibilities, h0.dim())?;
    let initial = ThermalState::new(h0, beta)?;
    let last = ThermalState::new(htau, beta)?;
    WorkDistribution::from_conditionals(&c, &initial, &last, Direction::Forward)
}

/// `beta <W_diss> = sum_n p_n ln p_n - sum_{m,n} p_n V_{m,n}^2 ln p~_m`, nats.
#[allow(clippy::needless_range_loop)]
pub fn reconstruct_dissipation(
    visibilities: &[Vec<f64>],
    h0: &ComplexMatrix,
    htau: &ComplexMatrix,
    beta: f64,
) -> Result<f64> {
    let d = h0.dim();
    let c = conditionals(visibilities, d)?;
    let initial = ThermalState::new(h0, beta)?;
    let last = ThermalState::new(htau, beta)?;
    let (p, lp) = (initial.probabilities(), initial.log_probabilities());
    let lq = last.log_probabilities();
    let mut total = 0.0;
    for n in 0..d {
        total += p[n] * lp[n];
        for m in 0..d {
            total -= p[n] * c.get(m, n) * lq[m];
        }
    }
    Ok(total)
}
