use super::{DetectorStates, InterferometerRun};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::thermo::ThermalState;

/// Smallest Gibbs weight for which the quadratic bound is reported finite.
pub const ALPHA_FLOOR: f64 = 1e-300;

/// Upper bounds on the average dissipated work, in energy units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationBounds {
    /// `4 (1 - V^2) / (alpha beta)`; `+inf` when `alpha <= ALPHA_FLOOR`.
    pub b2: f64,
    /// `[sqrt(1 - V^2) ln(d^2 / alpha) + 1/e] / beta`.
    pub b_log: f64,
    pub alpha: f64,
    pub log_alpha: f64,
}

impl DissipationBounds {
    pub fn checked_b2(&self) -> Result<f64> {
        if self.alpha <= ALPHA_FLOOR {
            Err(Error::InvalidAlpha { alpha: self.alpha })
        } else {
            Ok(self.b2)
        }
    }
}

/// Bounds from a distinguishability-like quantity `x` (`sqrt(1 - V^2)` or a
/// trace distance).
pub fn bounds_from_distinguishability(
    x: f64,
    beta: f64,
    htau: &ComplexMatrix,
    d: usize,
) -> Result<DissipationBounds> {
    if htau.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: htau.dim(),
        });
    }
    let log_alpha = ThermalState::new(htau, beta)?.min_log_probability();
    let alpha = log_alpha.exp();
    let x = x.clamp(0.0, 1.0);
    let b2 = if x == 0.0 {
        0.0
    } else if alpha <= ALPHA_FLOOR {
        f64::INFINITY
    } else {
        4.0 * x * x * (-log_alpha).exp() / beta
    };
    let log_ratio = 2.0 * (d as f64).ln() - log_alpha;
    let b_log = (x * log_ratio + (-1.0f64).exp()) / beta;
    Ok(DissipationBounds {
        b2,
        b_log,
        alpha,
        log_alpha,
    })
}

pub fn bounds_from_visibility(
    v: f64,
    beta: f64,
    htau: &ComplexMatrix,
    d: usize,
) -> Result<DissipationBounds> {
    bounds_from_distinguishability((1.0 - v * v).max(0.0).sqrt(), beta, htau, d)
}

/// Bounds with `1 - V^2` taken from the run's visibility.
pub fn dissipation_bounds(
    run: &InterferometerRun,
    beta: f64,
    htau: &ComplexMatrix,
    d: usize,
) -> Result<DissipationBounds> {
    bounds_from_visibility(run.visibility(), beta, htau, d)
}

/// Bounds with `sqrt(1 - V^2)` replaced by the trace distance of the system
/// marginals of the detector states.
pub fn dissipation_bounds_marginal(
    detectors: &DetectorStates,
    beta: f64,
    htau: &ComplexMatrix,
    d: usize,
) -> Result<DissipationBounds> {
    bounds_from_distinguishability(detectors.marginal_distinguishability()?, beta, htau, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplementarityReport {
    pub visibility_sq: f64,
    pub distinguishability_sq_joint: f64,
    pub distinguishability_sq_marginal: f64,
}

impl ComplementarityReport {
    pub fn joint_sum(&self) -> f64 {
        self.visibility_sq + self.distinguishability_sq_joint
    }

    pub fn marginal_sum(&self) -> f64 {
        self.visibility_sq + self.distinguishability_sq_marginal
    }
}

pub fn complementarity_report(
    run: &InterferometerRun,
    detectors: &DetectorStates,
) -> Result<ComplementarityReport> {
    let joint = detectors.joint_distinguishability()?;
    let marginal = detectors.marginal_distinguishability()?;
    Ok(ComplementarityReport {
        visibility_sq: run.visibility().powi(2),
        distinguishability_sq_joint: joint * joint,
        distinguishability_sq_marginal: marginal * marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interfero::{detector_states, run_thermal, SchemeMode};
    use crate::protocol::{Driving, DrivingProtocol, QubitRotationProtocol};
    use crate::thermo::{dissipative_work, work_distribution, Direction};

    fn protocol(ratio: f64) -> DrivingProtocol {
        let q = QubitRotationProtocol::from_ratio(ratio, Driving::Discrete { steps: 7 }).unwrap();
        DrivingProtocol::qubit(&q).unwrap()
    }

    #[test]
    fn unit_visibility() {
        let h = ComplexMatrix::diagonal(&[0.0, 1.0]);
        let b = bounds_from_visibility(1.0, 2.0, &h, 2).unwrap();
        assert_eq!(b.b2, 0.0);
        assert!((b.b_log - (-1.0f64).exp() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn underflowing_alpha() {
        let h = ComplexMatrix::diagonal(&[0.0, 1.0]);
        let b = bounds_from_visibility(0.5, 800.0, &h, 2).unwrap();
        assert!(b.b2.is_infinite());
        assert!(b.b_log.is_finite());
        assert!(matches!(b.checked_b2(), Err(Error::InvalidAlpha { .. })));
    }

    #[test]
    fn bounds_hold_and_complementarity() {
        let p = protocol(1.0);
        for beta in [0.1, 1.2, 4.0] {
            let run = run_thermal(&p, SchemeMode::SplitHalf, beta).unwrap();
            let det = detector_states(&p, beta).unwrap();
            let u = p.forward(p.duration(), 0.0).unwrap();
            let w = dissipative_work(
                &work_distribution(
                    &u,
                    p.initial_hamiltonian(),
                    p.final_hamiltonian(),
                    beta,
                    Direction::Forward,
                )
                .unwrap(),
            );
            let ht = p.final_hamiltonian();
            for b in [
                dissipation_bounds(&run, beta, ht, 2).unwrap(),
                dissipation_bounds_marginal(&det, beta, ht, 2).unwrap(),
            ] {
                assert!(w <= b.b2 && w <= b.b_log, "beta {beta}: {w} vs {b:?}");
                assert!(b.alpha > 0.0 && b.alpha <= 1.0);
            }
            let c = complementarity_report(&run, &det).unwrap();
            assert!((c.joint_sum() - 1.0).abs() < 1e-10);
            assert!(c.marginal_sum() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn regime_ordering_of_marginal_bounds() {
        let p = protocol(1.0);
        let ht = p.final_hamiltonian();
        let hot =
            dissipation_bounds_marginal(&detector_states(&p, 0.1).unwrap(), 0.1, ht, 2).unwrap();
        assert!(hot.b2 < hot.b_log);
        let cold =
            dissipation_bounds_marginal(&detector_states(&p, 4.0).unwrap(), 4.0, ht, 2).unwrap();
        assert!(cold.b_log < cold.b2);
    }
}
