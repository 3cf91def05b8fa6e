use crate::error::{Error, Result};
use crate::matcore::{check_hermitian, exp_hermitian_generator, ComplexMatrix};

/// Boundary matching tolerance, relative to `max(1, total duration)`.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in a time-reversal invariant generator.
pub const REALNESS_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Step {
    hamiltonian: ComplexMatrix,
    duration: f64,
    forward: ComplexMatrix,
    reversed: ComplexMatrix,
}

/// A piecewise-constant driving protocol: Hermitian generators, each held for
/// a fixed duration, applied in order.
///
/// Generators must be real in the computational basis so that they commute
/// with the time-reversal map (complex conjugation).
#[derive(Clone, Debug)]
pub struct HamiltonianSchedule {
    steps: Vec<Step>,
    boundaries: Vec<f64>,
}

impl HamiltonianSchedule {
    pub fn new(steps: Vec<(ComplexMatrix, f64)>) -> Result<Self> {
        let Some(dim) = steps.first().map(|(h, _)| h.dim()) else {
            return Err(Error::InvalidProtocol("schedule has no steps".into()));
        };
        let mut out = Vec::with_capacity(steps.len());
        let mut boundaries = Vec::with_capacity(steps.len() + 1);
        boundaries.push(0.0);
        let mut elapsed = 0.0;
        for (k, (hamiltonian, duration)) in steps.into_iter().enumerate() {
            if hamiltonian.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: hamiltonian.dim(),
                });
            }
            if !(duration > 0.0 && duration.is_finite()) {
                return Err(Error::InvalidProtocol(format!(
                    "step {k} has non-positive duration {duration}"
                )));
            }
            check_hermitian(&hamiltonian)?;
            if !hamiltonian.is_real(REALNESS_TOL * hamiltonian.max_abs().max(1.0)) {
                return Err(Error::InvalidProtocol(format!(
                    "step {k} generator is not real, so it is not time-reversal invariant"
                )));
            }
            let forward = exp_hermitian_generator(&hamiltonian, duration)?;
            let reversed = exp_hermitian_generator(&hamiltonian.conj(), duration)?;
            elapsed += duration;
            boundaries.push(elapsed);
            out.push(Step {
                hamiltonian,
                duration,
                forward,
                reversed,
            });
        }
        Ok(Self {
            steps: out,
            boundaries,
        })
    }

    pub fn dim(&self) -> usize {
        self.steps[0].hamiltonian.dim()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    /// Step boundary times `0 = t_0 < t_1 < ... < t_N = tau`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn hamiltonian(&self, k: usize) -> &ComplexMatrix {
        &self.steps[k].hamiltonian
    }

    pub fn duration(&self, k: usize) -> f64 {
        self.steps[k].duration
    }

    /// Index `i` with `t_i == t` (within tolerance).
    pub fn boundary_index(&self, t: f64) -> Result<usize> {
        let tol = BOUNDARY_TOL * self.total_duration().max(1.0);
        self.boundaries
            .iter()
            .position(|&b| (b - t).abs() <= tol)
            .ok_or(Error::NonBoundaryTime { time: t })
    }

    fn check_range(&self, t1: f64, t0: f64) -> Result<()> {
        let tol = BOUNDARY_TOL * self.total_duration().max(1.0);
        if t0 > t1 + tol || t0 < -tol || t1 > self.total_duration() + tol {
            return Err(Error::TimeOutOfRange {
                t0,
                t1,
                duration: self.total_duration(),
            });
        }
        Ok(())
    }

    /// Time-ordered propagator `U(t1, t0)` of the forward protocol.
    pub fn forward_unitary(&self, t1: f64, t0: f64) -> Result<ComplexMatrix> {
        self.check_range(t1, t0)?;
        let (i0, i1) = (self.boundary_index(t0)?, self.boundary_index(t1)?);
        Ok(self.steps[i0..i1]
            .iter()
            .fold(ComplexMatrix::identity(self.dim()), |acc, s| {
                s.forward.matmul(&acc)
            }))
    }

    /// Propagator of the time-reversed protocol: the steps run in reverse
    /// order with conjugated generators `Theta H_k Theta^dagger`.
    pub fn reversed_unitary(&self, t1: f64, t0: f64) -> Result<ComplexMatrix> {
        let tau = self.total_duration();
        self.check_range(t1, t0)?;
        // reversed time t is a boundary iff tau - t is one; segment j of the
        // reversed protocol carries original step n - 1 - j
        let n = self.len();
        let j0 = n - self.boundary_index(tau - t0)?;
        let j1 = n - self.boundary_index(tau - t1)?;
        let mut u = ComplexMatrix::identity(self.dim());
        for j in j0..j1 {
            u = self.steps[n - 1 - j].reversed.matmul(&u);
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{sigma_x, sigma_y, sigma_z};

    fn two_step() -> HamiltonianSchedule {
        HamiltonianSchedule::new(vec![(sigma_z(), 0.3), (sigma_x(), 0.5)]).unwrap()
    }

    #[test]
    fn identity_on_empty_interval() {
        let s = two_step();
        let u = s.forward_unitary(0.3, 0.3).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn composition_law() {
        let s = two_step();
        let full = s.forward_unitary(0.8, 0.0).unwrap();
        let split = s
            .forward_unitary(0.8, 0.3)
            .unwrap()
            .matmul(&s.forward_unitary(0.3, 0.0).unwrap());
        assert!(full.max_abs_diff(&split) < 1e-15);
    }

    #[test]
    fn rejects_times_between_boundaries() {
        let s = two_step();
        assert!(matches!(
            s.forward_unitary(0.5, 0.0),
            Err(Error::NonBoundaryTime { .. })
        ));
        assert!(matches!(
            s.reversed_unitary(0.8, 0.1),
            Err(Error::NonBoundaryTime { .. })
        ));
        assert!(matches!(
            s.forward_unitary(0.0, 0.3),
            Err(Error::TimeOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_complex_generators() {
        assert!(matches!(
            HamiltonianSchedule::new(vec![(sigma_y(), 1.0)]),
            Err(Error::InvalidProtocol(_))
        ));
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(HamiltonianSchedule::new(vec![]).is_err());
        assert!(HamiltonianSchedule::new(vec![(sigma_z(), 0.0)]).is_err());
        assert!(HamiltonianSchedule::new(vec![
            (sigma_z(), 1.0),
            (ComplexMatrix::identity(3), 1.0)
        ])
        .is_err());
    }

    #[test]
    fn reversed_runs_steps_backwards() {
        let s = two_step();
        // first reversed segment lasts 0.5 and uses sigma_x
        let u = s.reversed_unitary(0.5, 0.0).unwrap();
        let expected = exp_hermitian_generator(&sigma_x(), 0.5).unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }
}
