//! Independent cross-checks of the qubit rotation protocol.
//!
//! Propagators here come from closed-form SU(2) exponentials and analytic
//! eigenvectors of the rotating Hamiltonian ([`su2`]); the interferometer is
//! simulated as one global controlled unitary on ancilla, system and
//! environment. None of it goes through the `protocol`, `thermo` or
//! `interfero` code paths it is compared against.

pub mod su2;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::interfero::{
    reconstruct_dissipation, reconstruct_work_distribution, run_pure, run_thermal,
    visibility_matrix, PreparationMode, SchemeMode,
};
use crate::matcore::ComplexMatrix;
use crate::protocol::{Driving, DrivingProtocol, QubitBasisState, QubitRotationProtocol};
use crate::thermo::{
    crooks_check, dissipation_relative_entropy, dissipative_work, jarzynski_check, tpm_conditional,
    work_distribution, Direction, WorkDistribution,
};
use su2::{M2, V2};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub max_deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, max_deviation: f64, threshold: f64) -> Self {
        let max_deviation = if max_deviation.is_nan() {
            f64::INFINITY
        } else {
            max_deviation.abs()
        };
        Self {
            name: name.into(),
            max_deviation,
            threshold,
            passed: max_deviation <= threshold,
        }
    }
}

fn to_m2(m: &ComplexMatrix) -> M2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn from_m2(m: &M2) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| m[i][j])
}

fn check_qubit_dims(p: &QubitRotationProtocol) -> Result<usize> {
    p.steps().ok_or(Error::ContinuousModeRequested)
}

/// Product of steps `k0 + 1 ..= k1` (1-based) of the discretised rotation.
fn forward_steps(p: &QubitRotationProtocol, k0: usize, k1: usize) -> Result<M2> {
    let n = check_qubit_dims(p)?;
    let dt = p.tau() / n as f64;
    let mut u = su2::identity();
    for k in k0 + 1..=k1 {
        let lambda = FRAC_PI_2 * k as f64 / n as f64;
        u = su2::mul(&su2::rotation_step(p.omega(), lambda, dt), &u);
    }
    Ok(u)
}

/// Reversed protocol re-simulated from its definition: segment `j` (1-based)
/// holds `Theta H(Lambda(tau - t)) Theta^dagger`, i.e. the conjugate of the
/// original step `N + 1 - j`. `corrupt` swaps segment 1 for its inverse.
fn reversed_steps(p: &QubitRotationProtocol, j0: usize, j1: usize, corrupt: bool) -> Result<M2> {
    let n = check_qubit_dims(p)?;
    let dt = p.tau() / n as f64;
    let mut u = su2::identity();
    for j in j0 + 1..=j1 {
        let lambda = FRAC_PI_2 * (n + 1 - j) as f64 / n as f64;
        // Theta H Theta^dagger: conjugate the (real) generator entrywise
        let (h, theta) = (p.omega() / 2.0, lambda);
        let step = su2::exp_pauli(h, [h * theta.sin(), -0.0, h * theta.cos()], dt);
        let step = if corrupt && j == 1 {
            su2::adjoint(&step)
        } else {
            step
        };
        u = su2::mul(&step, &u);
    }
    Ok(u)
}

fn continuous_forward(p: &QubitRotationProtocol, t: f64) -> M2 {
    let (w, r) = (p.omega(), p.rotation_rate());
    let frame = su2::exp_pauli(0.0, [0.0, r / 2.0, 0.0], t);
    su2::mul(
        &frame,
        &su2::exp_pauli(w / 2.0, [0.0, -r / 2.0, w / 2.0], t),
    )
}

fn continuous_reversed(p: &QubitRotationProtocol, t: f64, corrupt: bool) -> M2 {
    let (w, r) = (p.omega(), p.rotation_rate());
    let frame = su2::exp_pauli(0.0, [0.0, -r / 2.0, 0.0], t);
    let u = su2::mul(&frame, &su2::exp_pauli(w / 2.0, [w / 2.0, r / 2.0, 0.0], t));
    if corrupt {
        su2::adjoint(&u)
    } else {
        u
    }
}

fn full_propagator(p: &QubitRotationProtocol) -> Result<M2> {
    match p.driving() {
        Driving::Discrete { steps } => forward_steps(p, 0, steps),
        Driving::Continuous => Ok(continuous_forward(p, p.tau())),
    }
}

/// Gibbs weights `(ground, excited)` of a gap `omega`.
fn weights(beta: f64, omega: f64) -> [f64; 2] {
    let x = beta * omega;
    let excited = if x > 0.0 {
        (-x).exp() / (1.0 + (-x).exp())
    } else {
        1.0 / (1.0 + x.exp())
    };
    [1.0 / (1.0 + (-x).exp()), excited]
}

fn bases() -> ([V2; 2], [V2; 2]) {
    let (g0, e0) = su2::eigenvectors(0.0);
    let (gt, et) = su2::eigenvectors(FRAC_PI_2);
    ([g0, e0], [gt, et])
}

/// TPM work distribution of the rotation by explicit enumeration of the
/// four transitions.
#[allow(clippy::needless_range_loop)]
pub fn tpm_direct(p: &QubitRotationProtocol, beta: f64) -> Result<WorkDistribution> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta { beta });
    }
    let u = full_propagator(p)?;
    let (b0, bt) = bases();
    let pn = weights(beta, p.omega());
    // bins for W = -omega, 0, +omega
    let mut bins = [0.0; 3];
    for n in 0..2 {
        let evolved = su2::apply(&u, &b0[n]);
        for m in 0..2 {
            let c = su2::dot(&bt[m], &evolved).norm_sqr();
            let label = m as isize - n as isize;
            bins[(label + 1) as usize] += pn[n] * c;
        }
    }
    let support = bins
        .iter()
        .enumerate()
        .filter(|(_, &pr)| pr > 0.0)
        .map(|(i, &pr)| ((i as f64 - 1.0) * p.omega(), pr))
        .collect();
    // both endpoint Hamiltonians share the spectrum {0, omega}
    WorkDistribution::new(support, Direction::Forward, 0.0)
}

/// Result of the brute-force interferometer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointSimulation {
    pub visibility: f64,
    /// `<0|rho_A|1>`
    pub coherence: C,
    /// Dimension of the ancilla x system x environment space.
    pub dim: usize,
}

fn split_arms(p: &QubitRotationProtocol, scheme: SchemeMode) -> Result<(M2, M2)> {
    let tau = p.tau();
    let split = match scheme {
        SchemeMode::FullForward => return Ok((full_propagator(p)?, su2::identity())),
        SchemeMode::SplitHalf => None,
        SchemeMode::SplitAt(t) => Some(t),
    };
    match p.driving() {
        Driving::Discrete { steps } => {
            let k = match split {
                None => steps.div_ceil(2),
                Some(t) => {
                    let x = t / tau * steps as f64;
                    let k = x.round();
                    if (x - k).abs() > 1e-9 || k < 0.0 || k > steps as f64 {
                        return Err(Error::OddSplitBoundary { time: t });
                    }
                    k as usize
                }
            };
            let first = forward_steps(p, 0, k)?;
            let back = su2::conj(&reversed_steps(p, 0, steps - k, false)?);
            Ok((first, back))
        }
        Driving::Continuous => {
            let t = split.unwrap_or(tau / 2.0);
            Ok((
                continuous_forward(p, t),
                su2::conj(&continuous_reversed(p, tau - t, false)),
            ))
        }
    }
}

/// Builds `(|0>|psi> + |1>|psi~>)/sqrt 2` on ancilla x system x environment,
/// applies `|0><0| (x) U_first (x) 1 + |1><1| (x) U_back (x) 1` as a single
/// matrix and traces out everything but the ancilla.
#[allow(clippy::needless_range_loop)]
pub fn full_joint_simulation(
    p: &QubitRotationProtocol,
    preparation: PreparationMode,
    scheme: SchemeMode,
) -> Result<JointSimulation> {
    let (first, back) = split_arms(p, scheme)?;
    let (b0, bt) = bases();
    let (psi0, psi1, env): (Vec<C>, Vec<C>, usize) = match preparation {
        PreparationMode::PureEigenpair { n, m } => {
            for index in [n, m] {
                if index >= 2 {
                    return Err(Error::IndexOutOfRange { index, dim: 2 });
                }
            }
            (b0[n].to_vec(), bt[m].to_vec(), 1)
        }
        PreparationMode::ThermalPurified { beta } => {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::InvalidBeta { beta });
            }
            let w = weights(beta, p.omega());
            let purify = |basis: &[V2; 2]| {
                let mut v = vec![C::new(0.0, 0.0); 4];
                for k in 0..2 {
                    for s in 0..2 {
                        v[s * 2 + k] += basis[k][s] * w[k].sqrt();
                    }
                }
                v
            };
            (purify(&b0), purify(&bt), 2)
        }
    };
    let half = 2 * env;
    let dim = 2 * half;
    let mut state = vec![C::new(0.0, 0.0); dim];
    for k in 0..half {
        state[k] = psi0[k] * FRAC_1_SQRT_2;
        state[half + k] = psi1[k] * FRAC_1_SQRT_2;
    }
    let mut global = vec![C::new(0.0, 0.0); dim * dim];
    for (a, u) in [(0, &first), (1, &back)] {
        for s in 0..2 {
            for s2 in 0..2 {
                for e in 0..env {
                    let row = a * half + s * env + e;
                    let col = a * half + s2 * env + e;
                    global[row * dim + col] = u[s][s2];
                }
            }
        }
    }
    let out: Vec<C> = (0..dim)
        .map(|i| (0..dim).map(|j| global[i * dim + j] * state[j]).sum())
        .collect();
    let coherence: C = (0..half).map(|k| out[k] * out[half + k].conj()).sum();
    Ok(JointSimulation {
        visibility: 2.0 * coherence.norm(),
        coherence,
        dim,
    })
}

/// Deviation from `Theta^dagger U~(tau - t, 0) Theta = U^dagger(tau, t)` at
/// every boundary (16 uniform times for continuous driving), comparing each
/// independently built side against the primary propagators.
pub fn microreversibility_audit(p: &QubitRotationProtocol, corrupt: bool) -> Result<OracleReport> {
    let primary = DrivingProtocol::qubit(p)?;
    let tau = p.tau();
    let mut worst: f64 = 0.0;
    match p.driving() {
        Driving::Discrete { steps } => {
            let boundaries = primary.boundaries().unwrap_or(&[]).to_vec();
            for (k, &t) in boundaries.iter().enumerate() {
                let lhs = su2::conj(&reversed_steps(p, 0, steps - k, corrupt)?);
                let rhs = su2::adjoint(&to_m2(&primary.forward(tau, t)?));
                worst = worst.max(su2::max_diff(&lhs, &rhs));
                let lhs = su2::conj(&to_m2(&primary.reversed(tau - t, 0.0)?));
                let rhs = su2::adjoint(&forward_steps(p, k, steps)?);
                worst = worst.max(su2::max_diff(&lhs, &rhs));
            }
        }
        Driving::Continuous => {
            for i in 0..=16 {
                let t = tau * i as f64 / 16.0;
                let lhs = su2::conj(&continuous_reversed(p, tau - t, corrupt));
                let rhs = su2::adjoint(&to_m2(&primary.forward(tau, t)?));
                worst = worst.max(su2::max_diff(&lhs, &rhs));
            }
        }
    }
    Ok(OracleReport::new(
        format!("microreversibility[{}]", label(None, p)),
        worst,
        1e-10,
    ))
}

/// Thermal state at `t` assembled from the closed-form pure-state solutions,
/// `sum_n p_n |psi_n(t)><psi_n(t)|`.
pub fn appendix_b_thermal_evolution(
    p: &QubitRotationProtocol,
    beta: f64,
    t: f64,
) -> Result<ComplexMatrix> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta { beta });
    }
    let w = weights(beta, p.omega());
    let mut rho = [[C::new(0.0, 0.0); 2]; 2];
    for (state, weight) in [
        (QubitBasisState::ZMinus, w[0]),
        (QubitBasisState::ZPlus, w[1]),
    ] {
        let psi = p.appendix_b_state(state, t)?;
        su2::add_scaled(&mut rho, &su2::outer(&[psi[0], psi[1]]), weight);
    }
    Ok(from_m2(&rho))
}

/// Trace distance between the closed-form thermal evolution and
/// `U(tau, 0) rho_0 U^dagger(tau, 0)`.
pub fn appendix_b_audit(p: &QubitRotationProtocol, beta: f64) -> Result<OracleReport> {
    let analytic = to_m2(&appendix_b_thermal_evolution(p, beta, p.tau())?);
    let u = to_m2(&p.continuous_unitary(p.tau())?);
    let w = weights(beta, p.omega());
    let rho0 = [
        [C::new(w[1], 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(w[0], 0.0)],
    ];
    let numeric = su2::mul(&su2::mul(&u, &rho0), &su2::adjoint(&u));
    Ok(OracleReport::new(
        format!("appendix_b[{}]", label(Some(beta), p)),
        su2::trace_distance(&analytic, &numeric),
        1e-10,
    ))
}

fn label(beta: Option<f64>, p: &QubitRotationProtocol) -> String {
    let steps = match p.driving() {
        Driving::Discrete { steps } => steps.to_string(),
        Driving::Continuous => "continuous".into(),
    };
    let ratio = p.omega() / p.rotation_rate();
    match beta {
        Some(b) => format!("beta={b},ratio={ratio},steps={steps}"),
        None => format!("ratio={ratio},steps={steps}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationGrid {
    pub betas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub steps: Vec<usize>,
}

impl VerificationGrid {
    /// `beta` in `{0.1, 0.5, 1.2, 2, 5}`, `omega/Omega` in
    /// `{0.01, 0.5, 1, 1.5, 3, 100}`, `N` in `{1, 2, 7, 14, 28, 56}`.
    pub fn standard() -> Self {
        Self {
            betas: vec![0.1, 0.5, 1.2, 2.0, 5.0],
            ratios: vec![0.01, 0.5, 1.0, 1.5, 3.0, 100.0],
            steps: vec![1, 2, 7, 14, 28, 56],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty() || self.ratios.is_empty() || self.steps.is_empty()
    }

    pub fn tasks(&self) -> Vec<VerificationTask> {
        let mut out = Vec::new();
        for &ratio in &self.ratios {
            for &steps in &self.steps {
                out.push(VerificationTask::Microreversibility { ratio, steps });
                for &beta in &self.betas {
                    out.push(VerificationTask::Statistics { beta, ratio, steps });
                }
            }
            for &beta in &self.betas {
                out.push(VerificationTask::Continuous { beta, ratio });
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VerificationTask {
    Statistics { beta: f64, ratio: f64, steps: usize },
    Microreversibility { ratio: f64, steps: usize },
    Continuous { beta: f64, ratio: f64 },
}

/// Runs one task. Numerical errors become failed reports.
pub fn run_task(task: VerificationTask, corrupt: bool) -> Vec<OracleReport> {
    let attempt = || -> Result<Vec<OracleReport>> {
        match task {
            VerificationTask::Statistics { beta, ratio, steps } => {
                statistics_checks(beta, ratio, steps)
            }
            VerificationTask::Microreversibility { ratio, steps } => {
                let p = QubitRotationProtocol::from_ratio(ratio, Driving::Discrete { steps })?;
                Ok(vec![microreversibility_audit(&p, corrupt)?])
            }
            VerificationTask::Continuous { beta, ratio } => {
                let p = QubitRotationProtocol::from_ratio(ratio, Driving::Continuous)?;
                Ok(vec![
                    appendix_b_audit(&p, beta)?,
                    microreversibility_audit(&p, corrupt)?,
                ])
            }
        }
    };
    attempt().unwrap_or_else(|e| {
        vec![OracleReport {
            name: format!("error[{task:?}]: {e}"),
            max_deviation: f64::INFINITY,
            threshold: 0.0,
            passed: false,
        }]
    })
}

/// Every check on the grid, sorted by name.
pub fn run_verification(grid: &VerificationGrid, corrupt: bool) -> Vec<OracleReport> {
    let mut reports: Vec<_> = grid
        .tasks()
        .into_iter()
        .flat_map(|t| run_task(t, corrupt))
        .collect();
    sort_reports(&mut reports);
    reports
}

pub fn sort_reports(reports: &mut [OracleReport]) {
    reports.sort_by(|a, b| a.name.cmp(&b.name));
}

/// Largest mismatch between two atomic distributions, support and mass.
pub fn distribution_deviation(a: &WorkDistribution, b: &WorkDistribution, tol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, y) in [(a, b), (b, a)] {
        for &(w, p) in x.support() {
            let matched = y.support().iter().find(|s| (s.0 - w).abs() <= tol);
            worst = worst.max(match matched {
                Some(&(w2, p2)) => (p - p2).abs().max((w - w2).abs()),
                None => p,
            });
        }
    }
    worst
}

fn statistics_checks(beta: f64, ratio: f64, steps: usize) -> Result<Vec<OracleReport>> {
    let q = QubitRotationProtocol::from_ratio(ratio, Driving::Discrete { steps })?;
    let p = DrivingProtocol::qubit(&q)?;
    let tag = label(Some(beta), &q);
    let (h0, ht) = (p.initial_hamiltonian(), p.final_hamiltonian());
    let u = p.forward(p.duration(), 0.0)?;
    let fwd = work_distribution(&u, h0, ht, beta, Direction::Forward)?;
    let rev = work_distribution(&u, h0, ht, beta, Direction::Reversed)?;
    let mut out = Vec::new();

    out.push(OracleReport::new(
        format!("jarzynski[{tag}]"),
        jarzynski_check(&fwd, beta) - 1.0,
        1e-10,
    ));
    let crooks = match crooks_check(&fwd, &rev, beta) {
        Ok(r) => r.iter().map(|x| x.1).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    out.push(OracleReport::new(format!("crooks[{tag}]"), crooks, 1e-9));

    let vis = visibility_matrix(&p, SchemeMode::SplitHalf)?;
    let rec = reconstruct_work_distribution(&vis, h0, ht, beta)?;
    let direct = tpm_direct(&q, beta)?;
    out.push(OracleReport::new(
        format!("reconstruction[{tag}]"),
        distribution_deviation(&rec, &direct, 1e-9 * ratio).max(distribution_deviation(
            &fwd,
            &direct,
            1e-9 * ratio,
        )),
        1e-10,
    ));

    let mean = beta * dissipative_work(&fwd);
    let mut values = vec![mean, reconstruct_dissipation(&vis, h0, ht, beta)?];
    let b = p.boundaries().unwrap_or(&[]);
    for t in [0.0, b[steps / 4], p.split_time(), p.duration()] {
        values.push(dissipation_relative_entropy(&p, beta, t)?);
    }
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(OracleReport::new(
        format!("dissipation[{tag}]"),
        hi - lo,
        1e-10,
    ));

    let conditionals = tpm_conditional(&u, h0, ht)?;
    let full = visibility_matrix(&p, SchemeMode::FullForward)?;
    let (mut tpm_dev, mut scheme_dev, mut joint_dev): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for m in 0..2 {
        for n in 0..2 {
            tpm_dev = tpm_dev.max((vis[m][n].powi(2) - conditionals.get(m, n)).abs());
            scheme_dev = scheme_dev.max((vis[m][n] - full[m][n]).abs());
            let brute = full_joint_simulation(
                &q,
                PreparationMode::PureEigenpair { n, m },
                SchemeMode::SplitHalf,
            )?;
            joint_dev = joint_dev.max((brute.visibility - vis[m][n]).abs());
        }
    }
    for scheme in [SchemeMode::SplitHalf, SchemeMode::FullForward] {
        let brute = full_joint_simulation(&q, PreparationMode::ThermalPurified { beta }, scheme)?;
        let v = run_thermal(&p, scheme, beta)?.visibility();
        joint_dev = joint_dev.max((brute.visibility - v).abs());
    }
    out.push(OracleReport::new(
        format!("visibility_tpm[{tag}]"),
        tpm_dev,
        1e-12,
    ));
    out.push(OracleReport::new(
        format!("scheme_equivalence[{tag}]"),
        scheme_dev,
        1e-12,
    ));
    out.push(OracleReport::new(
        format!("joint_simulation[{tag}]"),
        joint_dev,
        1e-12,
    ));
    Ok(out)
}

/// Pure-preparation visibility through the primary route, for spot checks.
pub fn primary_pure_visibility(
    p: &QubitRotationProtocol,
    scheme: SchemeMode,
    n: usize,
    m: usize,
) -> Result<f64> {
    Ok(run_pure(&DrivingProtocol::qubit(p)?, scheme, n, m)?.visibility())
}
