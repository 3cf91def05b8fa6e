//! Acceptance criteria C1-C12. Each test prints one `[PASS]`/`[FAIL]` line
//! to standard error.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use workint::interfero::{
    complementarity_report, detector_states, dissipation_bounds, dissipation_bounds_marginal,
    reconstruct_dissipation, reconstruct_work_distribution, run_pure, run_thermal, run_with_arms,
    visibility_matrix, ArmOperators,
};
use workint::matcore::{exp_hermitian_generator, inner, trace_distance};
use workint::oracle::{appendix_b_audit, microreversibility_audit};
use workint::protocol::QubitBasisState;
use workint::thermo::{
    crooks_check, dissipation_relative_entropy, dissipative_work, jarzynski_check, thermal_state,
    tpm_conditional, work_distribution,
};
use workint::{
    ComplexMatrix, Direction, Driving, DrivingProtocol, PreparationMode, QubitRotationProtocol,
    SchemeMode, WorkDistribution, C64,
};

const BETAS: [f64; 5] = [0.1, 0.5, 1.2, 2.0, 5.0];
const RATIOS: [f64; 6] = [0.01, 0.5, 1.0, 1.5, 3.0, 100.0];
const STEPS: [usize; 6] = [1, 2, 7, 14, 28, 56];
const VELOCITIES: [f64; 3] = [0.5, 1.5, 3.0];

fn verdict(id: &str, title: &str, passed: bool, detail: String) {
    let tag = if passed { "PASS" } else { "FAIL" };
    // direct handle write, so the line survives libtest output capture
    let _ = writeln!(std::io::stderr(), "[{tag}] {id} {title}: {detail}");
    assert!(passed, "{id} {title}: {detail}");
}

fn qubit(ratio: f64, driving: Driving) -> (QubitRotationProtocol, DrivingProtocol) {
    let q = QubitRotationProtocol::from_ratio(ratio, driving).unwrap();
    (q, DrivingProtocol::qubit(&q).unwrap())
}

fn discrete(ratio: f64, steps: usize) -> DrivingProtocol {
    qubit(ratio, Driving::Discrete { steps }).1
}

fn grid() -> impl Iterator<Item = (f64, f64, usize)> {
    BETAS.into_iter().flat_map(|b| {
        RATIOS
            .into_iter()
            .flat_map(move |r| STEPS.into_iter().map(move |n| (b, r, n)))
    })
}

fn forward(p: &DrivingProtocol, beta: f64) -> WorkDistribution {
    let u = p.forward(p.duration(), 0.0).unwrap();
    work_distribution(
        &u,
        p.initial_hamiltonian(),
        p.final_hamiltonian(),
        beta,
        Direction::Forward,
    )
    .unwrap()
}

fn zero_work_probability(p: &DrivingProtocol, beta: f64, ratio: f64) -> f64 {
    forward(p, beta).probability_at(0.0, 1e-9 * ratio)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    exp_hermitian_generator(&g.hermitian_part(), 3.0).unwrap()
}

fn random_real_symmetric(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| C64::new(gaussian(rng), 0.0)).hermitian_part()
}

#[test]
fn c01_visibility_tpm_identity() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for ratio in VELOCITIES {
        let p = discrete(ratio, 7);
        let u = p.forward(p.duration(), 0.0).unwrap();
        let c = tpm_conditional(&u, p.initial_hamiltonian(), p.final_hamiltonian()).unwrap();
        for n in 0..2 {
            for m in 0..2 {
                let v = run_pure(&p, SchemeMode::SplitHalf, n, m)
                    .unwrap()
                    .visibility();
                worst = worst.max((v * v - c.get(m, n)).abs());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..500 {
        let d = 2 + i % 2;
        let first = random_unitary(&mut rng, d);
        let rest = random_unitary(&mut rng, d);
        let h0 = random_real_symmetric(&mut rng, d);
        let ht = random_real_symmetric(&mut rng, d);
        let c = tpm_conditional(&rest.matmul(&first), &h0, &ht).unwrap();
        let arms = ArmOperators {
            first,
            back: rest.adjoint(),
            split_time: 0.5,
        };
        for n in 0..d {
            for m in 0..d {
                let run = run_with_arms(
                    &arms,
                    &h0,
                    &ht,
                    PreparationMode::PureEigenpair { n, m },
                    SchemeMode::SplitHalf,
                )
                .unwrap();
                worst = worst.max((run.visibility().powi(2) - c.get(m, n)).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "C1",
        "visibility-TPM identity",
        worst <= 1e-12 && secs < 5.0,
        format!("max |V^2 - p(m|n)| = {worst:.3e} (tol 1e-12), runtime {secs:.2} s (limit 5 s)"),
    );
}

#[test]
fn c02_jarzynski() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (beta, ratio, steps) in grid() {
        let w = forward(&discrete(ratio, steps), beta);
        worst = worst.max((jarzynski_check(&w, beta) - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "C2",
        "Jarzynski equality",
        worst <= 1e-10 && secs < 10.0,
        format!("max |<exp(-beta W_diss)> - 1| = {worst:.3e} (tol 1e-10), runtime {secs:.2} s (limit 10 s)"),
    );
}

#[test]
fn c03_crooks() {
    let mut worst: f64 = 0.0;
    let mut worst_df: f64 = 0.0;
    for (beta, ratio, steps) in grid() {
        let p = discrete(ratio, steps);
        let (h0, ht) = (p.initial_hamiltonian(), p.final_hamiltonian());
        let fwd = forward(&p, beta);
        // TPM statistics of the reversed protocol, started in equilibrium with H(tau)
        let ur = p.reversed(p.duration(), 0.0).unwrap();
        let rev = work_distribution(&ur, &ht.conj(), &h0.conj(), beta, Direction::Forward).unwrap();
        let residuals = crooks_check(&fwd, &rev, beta).unwrap();
        worst = residuals.iter().map(|r| r.1).fold(worst, f64::max);
        worst_df = worst_df.max(fwd.delta_f().abs());
    }
    verdict(
        "C3",
        "Crooks theorem",
        worst <= 1e-9 && worst_df <= 1e-12,
        format!("max log-residual = {worst:.3e} (tol 1e-9), max |dF| = {worst_df:.3e}"),
    );
}

#[test]
fn c04_dissipation_triple_identity() {
    let mut worst: f64 = 0.0;
    for (beta, ratio, steps) in grid() {
        let p = discrete(ratio, steps);
        let (h0, ht) = (p.initial_hamiltonian(), p.final_hamiltonian());
        let tpm = beta * dissipative_work(&forward(&p, beta));
        let vis = visibility_matrix(&p, SchemeMode::SplitHalf).unwrap();
        let rec = reconstruct_dissipation(&vis, h0, ht, beta).unwrap();
        let b = p.boundaries().unwrap();
        let mut values = vec![tpm, rec];
        for t in [0.0, b[steps / 4], p.split_time(), p.duration()] {
            values.push(dissipation_relative_entropy(&p, beta, t).unwrap());
        }
        for a in &values {
            for c in &values {
                worst = worst.max((a - c).abs());
            }
        }
    }
    verdict(
        "C4",
        "dissipation triple identity",
        worst <= 1e-10,
        format!("max pairwise deviation = {worst:.3e} nats (tol 1e-10)"),
    );
}

#[test]
fn c05_microreversibility() {
    let mut worst: f64 = 0.0;
    let mut audits_ok = true;
    for ratio in RATIOS {
        for steps in STEPS {
            let (q, p) = qubit(ratio, Driving::Discrete { steps });
            let tau = p.duration();
            for &t in p.boundaries().unwrap() {
                let lhs = p.reversed(tau - t, 0.0).unwrap().conj();
                let rhs = p.forward(tau, t).unwrap().adjoint();
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
            let audit = microreversibility_audit(&q, false).unwrap();
            audits_ok &= audit.passed;
            worst = worst.max(audit.max_deviation);
        }
    }
    verdict(
        "C5",
        "micro-reversibility",
        worst <= 1e-10 && audits_ok,
        format!("max entrywise deviation = {worst:.3e} (tol 1e-10)"),
    );
}

#[test]
fn c06_complementarity() {
    let (mut joint, mut marginal) = (0.0f64, f64::NEG_INFINITY);
    for beta in [0.1, 1.2, 5.0] {
        for ratio in RATIOS {
            let drivings = STEPS
                .into_iter()
                .map(|steps| Driving::Discrete { steps })
                .chain([Driving::Continuous]);
            for driving in drivings {
                let p = qubit(ratio, driving).1;
                let run = run_thermal(&p, SchemeMode::SplitHalf, beta).unwrap();
                let r = complementarity_report(&run, &detector_states(&p, beta).unwrap()).unwrap();
                joint = joint.max((r.joint_sum() - 1.0).abs());
                marginal = marginal.max(r.marginal_sum());
            }
        }
    }
    verdict(
        "C6",
        "complementarity",
        joint <= 1e-10 && marginal <= 1.0 + 1e-10,
        format!(
            "max |V^2 + D_joint^2 - 1| = {joint:.3e} (tol 1e-10), max V^2 + D_marginal^2 = {marginal:.12} (<= 1 + 1e-10)"
        ),
    );
}

#[test]
fn c07_bound_validity() {
    let p = discrete(1.0, 7);
    let ht = p.final_hamiltonian();
    let mut valid = true;
    let mut min_gap = f64::INFINITY;
    let at = |beta: f64| {
        let run = run_thermal(&p, SchemeMode::SplitHalf, beta).unwrap();
        let joint = dissipation_bounds(&run, beta, ht, 2).unwrap();
        let marginal =
            dissipation_bounds_marginal(&detector_states(&p, beta).unwrap(), beta, ht, 2).unwrap();
        (joint, marginal)
    };
    for k in 1..=50 {
        let beta = k as f64 / 10.0;
        let w = dissipative_work(&forward(&p, beta));
        let (joint, marginal) = at(beta);
        for b in [joint.b2, joint.b_log, marginal.b2, marginal.b_log] {
            valid &= w <= b;
            min_gap = min_gap.min(b - w);
        }
    }
    let (_, low_t) = at(4.0);
    let (_, high_t) = at(0.1);
    let ordering = low_t.b_log < low_t.b2 && high_t.b2 < high_t.b_log;
    verdict(
        "C7",
        "bound validity and regime ordering",
        valid && ordering,
        format!(
            "min (B - <W_diss>) over 50 points and both variants = {min_gap:.3e}; \
             beta=4: Blog {:.4} < B2 {:.4}; beta=0.1: B2 {:.4} < Blog {:.4} (marginal D)",
            low_t.b_log, low_t.b2, high_t.b2, high_t.b_log
        ),
    );
}

#[test]
fn c08_work_distribution_shape() {
    let beta = 1.2;
    let mut support_ok = true;
    let mut asymmetry_ok = true;
    let mut zeros = Vec::new();
    for ratio in VELOCITIES {
        let p = discrete(ratio, 7);
        let vis = visibility_matrix(&p, SchemeMode::SplitHalf).unwrap();
        let rec = reconstruct_work_distribution(
            &vis,
            p.initial_hamiltonian(),
            p.final_hamiltonian(),
            beta,
        )
        .unwrap();
        for w in [forward(&p, beta), rec] {
            let xs: Vec<f64> = w.support().iter().map(|a| a.0 / ratio).collect();
            support_ok &= xs.len() == 3
                && xs
                    .iter()
                    .zip([-1.0, 0.0, 1.0])
                    .all(|(x, k)| (x - k).abs() <= 1e-9);
            let tol = 1e-9 * ratio;
            asymmetry_ok &= w.probability_at(ratio, tol) > w.probability_at(-ratio, tol);
        }
        zeros.push(zero_work_probability(&p, beta, ratio));
    }
    let increasing = zeros.windows(2).all(|w| w[1] > w[0]);
    verdict(
        "C8",
        "work distribution shape",
        support_ok && asymmetry_ok && increasing,
        format!(
            "support {{-1, 0, +1}} hbar*omega: {support_ok}; P(+) > P(-): {asymmetry_ok}; \
             P(0) over omega/Omega = 0.5, 1.5, 3: {zeros:.6?}"
        ),
    );
}

#[test]
fn c09_discrete_to_continuous_convergence() {
    let beta = 1.2;
    let ns = [7, 14, 28, 56, 112];
    let mut decreasing = true;
    let mut in_band = true;
    let mut lines = Vec::new();
    for ratio in VELOCITIES {
        let (_, cont) = qubit(ratio, Driving::Continuous);
        let pc = zero_work_probability(&cont, beta, ratio);
        let diffs: Vec<f64> = ns
            .iter()
            .map(|&n| (zero_work_probability(&discrete(ratio, n), beta, ratio) - pc).abs())
            .collect();
        let ratios: Vec<f64> = diffs.windows(2).map(|w| w[0] / w[1]).collect();
        decreasing &= diffs.windows(2).all(|w| w[1] < w[0]);
        in_band &= ratios.iter().all(|r| (1.5..=2.5).contains(r));
        lines.push(format!(
            "omega/Omega={ratio}: successive ratios {ratios:.3?}"
        ));
    }
    verdict(
        "C9",
        "discrete-to-continuous convergence",
        decreasing && in_band,
        format!(
            "strictly decreasing: {decreasing}; ratios in [1.5, 2.5]: {in_band}; {}",
            lines.join("; ")
        ),
    );
}

#[test]
fn c10_adiabatic_and_sudden_limits() {
    let mut adiabatic: f64 = 0.0;
    let mut sudden: f64 = 0.0;
    for beta in BETAS {
        let (slow, p) = qubit(100.0, Driving::Continuous);
        let rho0 = thermal_state(p.initial_hamiltonian(), beta)
            .unwrap()
            .density();
        let u = slow.continuous_unitary(slow.tau()).unwrap();
        let target = thermal_state(p.final_hamiltonian(), beta)
            .unwrap()
            .density();
        adiabatic = adiabatic.max(trace_distance(&rho0.evolve(&u).unwrap(), &target).unwrap());

        let (fast, p) = qubit(0.01, Driving::Continuous);
        let rho0 = thermal_state(p.initial_hamiltonian(), beta)
            .unwrap()
            .density();
        let u = fast.continuous_unitary(fast.tau()).unwrap();
        sudden = sudden.max(trace_distance(&rho0.evolve(&u).unwrap(), &rho0).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut deficit: f64 = 0.0;
    let mut audits_ok = true;
    for i in 0..100 {
        let ratio = 10f64.powf(rng.gen_range(-2.0..=2.0));
        let q = QubitRotationProtocol::from_ratio(ratio, Driving::Continuous).unwrap();
        let t = rng.gen_range(0.0..=q.tau());
        let u = q.continuous_unitary(t).unwrap();
        for s in [QubitBasisState::ZPlus, QubitBasisState::ZMinus] {
            let analytic = q.appendix_b_state(s, t).unwrap();
            let numeric = u.apply(&s.vector());
            deficit = deficit.max(1.0 - inner(&analytic, &numeric).norm());
        }
        if i % 10 == 0 {
            audits_ok &= appendix_b_audit(&q, BETAS[i / 10 % 5]).unwrap().passed;
        }
    }
    verdict(
        "C10",
        "adiabatic and sudden limits",
        adiabatic <= 2e-3 && sudden <= 2e-3 && deficit <= 1e-10 && audits_ok,
        format!(
            "adiabatic D(rho(tau), thermal(H_tau)) = {adiabatic:.3e}, sudden D(rho(tau), rho(0)) = {sudden:.3e} \
             (tol 2e-3); max overlap deficit over 100 random (omega/Omega, t) = {deficit:.3e} (tol 1e-10)"
        ),
    );
}

#[test]
fn c11_scheme_equivalence() {
    let mut worst: f64 = 0.0;
    for ratio in RATIOS {
        let drivings = STEPS
            .into_iter()
            .map(|steps| Driving::Discrete { steps })
            .chain([Driving::Continuous]);
        for driving in drivings {
            let p = qubit(ratio, driving).1;
            let split = visibility_matrix(&p, SchemeMode::SplitHalf).unwrap();
            let full = visibility_matrix(&p, SchemeMode::FullForward).unwrap();
            for (a, b) in split.iter().flatten().zip(full.iter().flatten()) {
                worst = worst.max((a - b).abs());
            }
            for beta in BETAS {
                let a = run_thermal(&p, SchemeMode::SplitHalf, beta)
                    .unwrap()
                    .visibility();
                let b = run_thermal(&p, SchemeMode::FullForward, beta)
                    .unwrap()
                    .visibility();
                worst = worst.max((a - b).abs());
            }
        }
    }
    verdict(
        "C11",
        "scheme equivalence",
        worst <= 1e-12,
        format!("max |V_split - V_full| = {worst:.3e} (tol 1e-12)"),
    );
}

#[test]
fn c12_cli_determinism() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let run = |cmd: &str, threads: &str, format: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_workint"))
            .args([cmd, "--config"])
            .arg(configs.join(format!("{cmd}.json")))
            .args(["--threads", threads, "--format", format])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for cmd in ["workdist", "bounds", "convergence", "verify"] {
        for format in ["csv", "json"] {
            let reference = run(cmd, "1", format);
            for threads in ["1", "8"] {
                compared += 1;
                if run(cmd, threads, format) != reference {
                    mismatches.push(format!("{cmd}/{format}/threads={threads}"));
                }
            }
        }
    }
    verdict(
        "C12",
        "CLI determinism",
        mismatches.is_empty(),
        format!("{compared} repeat runs byte-compared, mismatches: {mismatches:?}"),
    );
}
