use std::f64::consts::FRAC_PI_2;

use super::schedule::HamiltonianSchedule;
use crate::error::{Error, Result};
use crate::matcore::{exp_hermitian_generator, sigma_x, sigma_y, sigma_z, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Driving {
    /// `N` sudden quenches of equal length.
    Discrete { steps: usize },
    /// Continuous rotation `Lambda(t) = Omega t`.
    Continuous,
}

/// Eigenstates of the initial qubit Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitBasisState {
    /// `|z+>`, energy `hbar omega`.
    ZPlus,
    /// `|z->`, energy 0.
    ZMinus,
}

impl QubitBasisState {
    pub fn vector(self) -> Vec<C64> {
        match self {
            Self::ZPlus => vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            Self::ZMinus => vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }
}

/// Qubit Hamiltonian `H(Lambda) = omega/2 [1 + cos(Lambda) sz + sin(Lambda) sx]`
/// rotated from `Lambda = 0` to `Lambda = pi/2` over a duration `tau`, at the
/// rate `Omega = pi / (2 tau)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitRotationProtocol {
    omega: f64,
    tau: f64,
    driving: Driving,
}

impl QubitRotationProtocol {
    pub fn new(omega: f64, tau: f64, driving: Driving) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidProtocol(format!(
                "natural frequency must be positive, got {omega}"
            )));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidProtocol(format!(
                "duration must be positive, got {tau}"
            )));
        }
        if let Driving::Discrete { steps: 0 } = driving {
            return Err(Error::InvalidProtocol("need at least one step".into()));
        }
        Ok(Self {
            omega,
            tau,
            driving,
        })
    }

    /// Protocol with `Omega = 1`, so energies are in units of `hbar Omega`
    /// and `omega` equals the ratio `omega / Omega`.
    pub fn from_ratio(omega_over_rate: f64, driving: Driving) -> Result<Self> {
        Self::new(omega_over_rate, FRAC_PI_2, driving)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn driving(&self) -> Driving {
        self.driving
    }

    /// `Omega = pi / (2 tau)`.
    pub fn rotation_rate(&self) -> f64 {
        FRAC_PI_2 / self.tau
    }

    pub fn steps(&self) -> Option<usize> {
        match self.driving {
            Driving::Discrete { steps } => Some(steps),
            Driving::Continuous => None,
        }
    }

    pub fn step_duration(&self) -> Result<f64> {
        let n = self.steps().ok_or(Error::ContinuousModeRequested)?;
        Ok(FRAC_PI_2 / (n as f64 * self.rotation_rate()))
    }

    /// Control angle reached at the end of step `k` (1-based): `k pi / 2N`.
    pub fn step_angle(&self, k: usize) -> Result<f64> {
        let n = self.steps().ok_or(Error::ContinuousModeRequested)?;
        Ok(k as f64 * FRAC_PI_2 / n as f64)
    }

    /// Rotation axis `(sin L_k, 0, cos L_k)` of step `k`.
    pub fn rotation_axis(&self, k: usize) -> Result<[f64; 3]> {
        let l = self.step_angle(k)?;
        Ok([l.sin(), 0.0, l.cos()])
    }

    /// Rotation angle of every step, `(pi / 2N) (omega / Omega)`.
    pub fn retardance(&self) -> Result<f64> {
        let n = self.steps().ok_or(Error::ContinuousModeRequested)?;
        Ok(FRAC_PI_2 / n as f64 * self.omega / self.rotation_rate())
    }

    pub fn hamiltonian_at(&self, lambda: f64) -> ComplexMatrix {
        rotating_hamiltonian(self.omega, lambda)
    }

    pub fn initial_hamiltonian(&self) -> ComplexMatrix {
        self.hamiltonian_at(0.0)
    }

    pub fn final_hamiltonian(&self) -> ComplexMatrix {
        self.hamiltonian_at(FRAC_PI_2)
    }

    /// The discretised protocol: `H(k pi / 2N)` held for `dt` at step `k`.
    pub fn step_hamiltonians(&self) -> Result<HamiltonianSchedule> {
        let n = self.steps().ok_or(Error::ContinuousModeRequested)?;
        let dt = self.step_duration()?;
        let steps = (1..=n)
            .map(|k| (self.hamiltonian_at(k as f64 * FRAC_PI_2 / n as f64), dt))
            .collect();
        HamiltonianSchedule::new(steps)
    }

    fn check_continuous_time(&self, t: f64) -> Result<()> {
        if self.driving != Driving::Continuous {
            return Err(Error::DiscreteModeRequested);
        }
        let tol = 1e-12 * self.tau.max(1.0);
        if !(t >= -tol && t <= self.tau + tol) {
            return Err(Error::TimeOutOfRange {
                t0: 0.0,
                t1: t,
                duration: self.tau,
            });
        }
        Ok(())
    }

    /// `U(t, 0) = exp(-i Omega t sy / 2) exp(-i [omega (1 + sz) - Omega sy] t / 2)`,
    /// global phase included.
    pub fn continuous_unitary(&self, t: f64) -> Result<ComplexMatrix> {
        self.check_continuous_time(t)?;
        let rate = self.rotation_rate();
        let frame = exp_hermitian_generator(&sigma_y().scale_real(rate / 2.0), t)?;
        let one = ComplexMatrix::identity(2);
        let generator = (&(&one + &sigma_z()).scale_real(self.omega) - &sigma_y().scale_real(rate))
            .scale_real(0.5);
        Ok(frame.matmul(&exp_hermitian_generator(&generator, t)?))
    }

    /// Propagator of the reversed rotation `Lambda(tau - t) = pi/2 - Omega t`:
    /// `exp(+i Omega t sy / 2) exp(-i [H(pi/2) + Omega sy / 2] t)`.
    pub fn continuous_reversed_unitary(&self, t: f64) -> Result<ComplexMatrix> {
        self.check_continuous_time(t)?;
        let rate = self.rotation_rate();
        let frame = exp_hermitian_generator(&sigma_y().scale_real(-rate / 2.0), t)?;
        let generator = &self.final_hamiltonian() + &sigma_y().scale_real(rate / 2.0);
        Ok(frame.matmul(&exp_hermitian_generator(&generator, t)?))
    }

    /// Closed-form solution of the continuous protocol starting from an
    /// eigenstate of `H(0)`, expanded on the eigenbasis of `n . sigma` in the
    /// co-rotating frame. Global phase `exp(-i omega t / 2)` omitted.
    pub fn appendix_b_state(&self, initial: QubitBasisState, t: f64) -> Result<Vec<C64>> {
        self.check_continuous_time(t)?;
        let w = self.omega;
        let rate = self.rotation_rate();
        let a = w.hypot(rate);
        // sin xi = w / a, cos xi = -rate / a
        let xi = w.atan2(-rate);
        let (ch, sh) = ((xi / 2.0).cos(), (xi / 2.0).sin());
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let (c1, c2) = match initial {
            QubitBasisState::ZPlus => (
                C64::new((ch + sh) * r2, 0.0),
                C64::new(-(sh - ch) * r2, 0.0),
            ),
            QubitBasisState::ZMinus => (
                C64::new(0.0, -(ch - sh) * r2),
                C64::new(0.0, (sh + ch) * r2),
            ),
        };
        let slow = C64::from_polar(1.0, -a * t / 2.0);
        let fast = C64::from_polar(1.0, a * t / 2.0);
        let amp_yp = (c1 * slow * ch - c2 * fast * sh) * C64::from_polar(1.0, -rate * t / 2.0);
        let amp_ym = (c1 * slow * sh + c2 * fast * ch) * C64::from_polar(1.0, rate * t / 2.0);
        // |y+-> = (|z+> +- i |z->) / sqrt 2
        let i = C64::i();
        Ok(vec![(amp_yp + amp_ym) * r2, (amp_yp - amp_ym) * i * r2])
    }
}

pub(crate) fn rotating_hamiltonian(omega: f64, lambda: f64) -> ComplexMatrix {
    let one = ComplexMatrix::identity(2);
    let m = &(&one + &sigma_z().scale_real(lambda.cos())) + &sigma_x().scale_real(lambda.sin());
    m.scale_real(omega / 2.0)
}
