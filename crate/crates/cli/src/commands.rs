use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use workint::interfero::{
    bounds_from_distinguishability, bounds_from_visibility, detector_states,
    reconstruct_dissipation, reconstruct_work_distribution, run_thermal, visibility_matrix,
};
use workint::oracle::{run_task, sort_reports, OracleReport, VerificationGrid};
use workint::thermo::MERGE_TOL;
use workint::{
    Driving, DrivingProtocol, HamiltonianSchedule, QubitRotationProtocol, SchemeMode,
    WorkDistribution,
};

use crate::config::{GridPoint, Mode, Preparation, ProtocolSpec, RunConfig};
use crate::dataset::{Cell, Dataset};
use crate::error::CliError;

/// A grid point turned into internal units.
struct Instance {
    protocol: DrivingProtocol,
    /// Inverse temperature in internal energy units.
    beta: f64,
    /// Energy unit of the reported work (`hbar omega`, or 1 for custom schedules).
    energy: f64,
}

fn instance(cfg: &RunConfig, pt: &GridPoint, continuous: bool) -> Result<Instance, CliError> {
    match &cfg.protocol {
        ProtocolSpec::Qubit { mode, tau } => {
            let rate = FRAC_PI_2 / tau;
            let omega = pt.ratio.expect("qubit points carry a ratio") * rate;
            let driving = match (mode, pt.steps, continuous) {
                (Mode::Discrete, Some(steps), false) => Driving::Discrete { steps },
                _ => Driving::Continuous,
            };
            let q = QubitRotationProtocol::new(omega, *tau, driving)?;
            Ok(Instance {
                protocol: DrivingProtocol::qubit(&q)?,
                beta: pt.beta / rate,
                energy: omega,
            })
        }
        ProtocolSpec::Custom { steps } => Ok(Instance {
            protocol: DrivingProtocol::from_schedule(HamiltonianSchedule::new(steps.clone())?),
            beta: pt.beta,
            energy: 1.0,
        }),
    }
}

/// Maps `f` over the points in parallel and returns results in point order;
/// the first failing point (in order) decides the error.
fn evaluate<T: Send>(
    points: &[GridPoint],
    f: impl Fn(&GridPoint) -> Result<T, CliError> + Sync + Send,
) -> Result<Vec<T>, CliError> {
    let results: Vec<Result<T, CliError>> = points.par_iter().map(f).collect();
    results.into_iter().collect()
}

fn grid(cfg: &RunConfig) -> Result<Vec<GridPoint>, CliError> {
    if cfg.is_empty() {
        return Err(CliError::Config("the parameter grid is empty".into()));
    }
    Ok(cfg.points())
}

fn point_cells(pt: &GridPoint) -> [Cell; 3] {
    [
        Cell::Num(pt.beta),
        Cell::Num(pt.ratio.unwrap_or(f64::NAN)),
        match pt.steps {
            Some(n) => Cell::Int(n),
            None => Cell::Text("continuous".into()),
        },
    ]
}

fn unit_notes(cfg: &RunConfig) -> Vec<String> {
    match cfg.protocol {
        ProtocolSpec::Qubit { .. } => vec![
            "beta: inverse temperature in units of 1/(hbar*Omega), Omega = pi/(2*tau)".into(),
            "omega_over_Omega: qubit frequency over rotation rate".into(),
            "steps: piecewise-constant steps, 'continuous' for smooth driving".into(),
        ],
        ProtocolSpec::Custom { .. } => vec![
            "custom schedule: energies and beta in the schedule's own units".into(),
            "omega_over_Omega: not applicable (nan)".into(),
            "steps: number of schedule steps".into(),
        ],
    }
}

fn scheme_name(s: SchemeMode) -> &'static str {
    match s {
        SchemeMode::FullForward => "full forward arm",
        _ => "split at mid-protocol",
    }
}

fn reconstructed(inst: &Instance, scheme: SchemeMode) -> Result<WorkDistribution, CliError> {
    let p = &inst.protocol;
    let v = visibility_matrix(p, scheme)?;
    Ok(reconstruct_work_distribution(
        &v,
        p.initial_hamiltonian(),
        p.final_hamiltonian(),
        inst.beta,
    )?)
}

pub fn workdist(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let points = grid(cfg)?;
    let scheme = cfg.scheme.mode();
    let groups = evaluate(&points, |pt| {
        let inst = instance(cfg, pt, false)?;
        let dist = reconstructed(&inst, scheme)?;
        let mut atoms: Vec<(f64, f64)> = dist
            .support()
            .iter()
            .map(|&(w, p)| (w / inst.energy, p))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(atoms
            .into_iter()
            .map(|(w, p)| {
                let mut row = point_cells(pt).to_vec();
                row.extend([Cell::Num(w), Cell::Num(p)]);
                row
            })
            .collect::<Vec<_>>())
    })?;
    let mut notes = unit_notes(cfg);
    notes.push("W_over_hbar_omega: work in units of hbar*omega".into());
    notes.push(format!(
        "probability: P(W) reconstructed from eigenpair visibilities, {} scheme",
        scheme_name(scheme)
    ));
    Ok(Dataset {
        command: "workdist",
        notes,
        columns: vec![
            "beta",
            "omega_over_Omega",
            "steps",
            "W_over_hbar_omega",
            "probability",
        ],
        rows: groups.into_iter().flatten().collect(),
    })
}

pub fn bounds(cfg: &RunConfig) -> Result<Dataset, CliError> {
    if cfg.preparation != Preparation::Thermal {
        return Err(CliError::Config("bounds need a thermal preparation".into()));
    }
    let points = grid(cfg)?;
    let scheme = cfg.scheme.mode();
    let rows = evaluate(&points, |pt| {
        let inst = instance(cfg, pt, false)?;
        let p = &inst.protocol;
        let (h0, htau, d) = (p.initial_hamiltonian(), p.final_hamiltonian(), p.dim());
        let v = run_thermal(p, scheme, inst.beta)?.visibility();
        let joint = bounds_from_visibility(v, inst.beta, htau, d)?;
        let dm = detector_states(p, inst.beta)?.marginal_distinguishability()?;
        let marginal = bounds_from_distinguishability(dm, inst.beta, htau, d)?;
        let w_diss = reconstruct_dissipation(&visibility_matrix(p, scheme)?, h0, htau, inst.beta)?
            / inst.beta;
        let e = inst.energy;
        let mut row = point_cells(pt).to_vec();
        row.extend([
            Cell::Num(w_diss / e),
            Cell::Num(joint.b2 / e),
            Cell::Num(joint.b_log / e),
            Cell::Num(joint.alpha),
            Cell::Num(v),
            Cell::Num(dm),
            Cell::Num(marginal.b2 / e),
            Cell::Num(marginal.b_log / e),
        ]);
        Ok(row)
    })?;
    let mut notes = unit_notes(cfg);
    notes.extend([
        "W_diss, B2, Blog, B2_marginal, Blog_marginal: energies in units of hbar*omega".to_string(),
        "B2, Blog: bounds from the thermal visibility V via sqrt(1 - V^2)".into(),
        "B2_marginal, Blog_marginal: bounds from the system-marginal trace distance D_marginal"
            .into(),
        "alpha: smallest Gibbs weight of the final Hamiltonian; B2 is inf when it underflows"
            .into(),
    ]);
    Ok(Dataset {
        command: "bounds",
        notes,
        columns: vec![
            "beta",
            "omega_over_Omega",
            "steps",
            "W_diss",
            "B2",
            "Blog",
            "alpha",
            "V",
            "D_marginal",
            "B2_marginal",
            "Blog_marginal",
        ],
        rows,
    })
}

fn zero_work_probability(dist: &WorkDistribution, energy: f64) -> f64 {
    dist.probability_at(0.0, MERGE_TOL * energy)
}

pub fn convergence(cfg: &RunConfig) -> Result<Dataset, CliError> {
    match cfg.protocol {
        ProtocolSpec::Qubit {
            mode: Mode::Discrete,
            ..
        } => {}
        ProtocolSpec::Qubit { .. } => {
            return Err(CliError::Config(
                "convergence compares discrete and continuous driving; set mode to discrete".into(),
            ))
        }
        ProtocolSpec::Custom { .. } => {
            return Err(CliError::Config(
                "convergence needs the qubit rotation protocol".into(),
            ))
        }
    }
    let points = grid(cfg)?;
    let scheme = cfg.scheme.mode();
    let rows = evaluate(&points, |pt| {
        let discrete = instance(cfg, pt, false)?;
        let continuous = instance(cfg, pt, true)?;
        let pn = zero_work_probability(&reconstructed(&discrete, scheme)?, discrete.energy);
        let pc = zero_work_probability(&reconstructed(&continuous, scheme)?, continuous.energy);
        let mut row = point_cells(pt).to_vec();
        row.extend([Cell::Num(pn), Cell::Num(pc), Cell::Num((pn - pc).abs())]);
        Ok(row)
    })?;
    let mut notes = unit_notes(cfg);
    notes.push(
        "P_discrete_zero, P_continuous_zero: P(W = 0) for N steps and for smooth driving".into(),
    );
    notes.push("abs_difference: |P_discrete_zero - P_continuous_zero|".into());
    Ok(Dataset {
        command: "convergence",
        notes,
        columns: vec![
            "beta",
            "omega_over_Omega",
            "steps",
            "P_discrete_zero",
            "P_continuous_zero",
            "abs_difference",
        ],
        rows,
    })
}

/// Oracle audits over the config grid. The dataset is returned even when
/// checks fail; the caller decides the exit code from the second value.
pub fn verify(cfg: &RunConfig, corrupt: bool) -> Result<(Dataset, usize), CliError> {
    let ProtocolSpec::Qubit {
        mode: Mode::Discrete,
        ..
    } = cfg.protocol
    else {
        return Err(CliError::Config(
            "verify runs on the discrete qubit rotation protocol".into(),
        ));
    };
    let grid = VerificationGrid {
        betas: cfg.betas.clone(),
        ratios: cfg.ratios.iter().flatten().copied().collect(),
        steps: cfg.steps.iter().flatten().copied().collect(),
    };
    if grid.is_empty() {
        return Err(CliError::Config("the verification grid is empty".into()));
    }
    let mut reports: Vec<OracleReport> = grid
        .tasks()
        .into_par_iter()
        .flat_map_iter(|t| run_task(t, corrupt))
        .collect();
    sort_reports(&mut reports);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let rows = reports
        .into_iter()
        .map(|r| {
            vec![
                Cell::Text(r.name),
                Cell::Num(r.max_deviation),
                Cell::Num(r.threshold),
                Cell::Bool(r.passed),
            ]
        })
        .collect();
    Ok((
        Dataset {
            command: "verify",
            notes: vec![
                "beta in units of 1/(hbar*Omega); ratio = omega/Omega; steps = N".into(),
                "max_deviation: largest absolute deviation of the check; passed iff <= threshold"
                    .into(),
            ],
            columns: vec!["check", "max_deviation", "threshold", "passed"],
            rows,
        },
        failed,
    ))
}
