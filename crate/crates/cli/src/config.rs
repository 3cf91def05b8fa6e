use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use workint::{ComplexMatrix, SchemeMode};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preparation {
    Pure,
    Thermal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Split,
    Full,
}

impl Scheme {
    pub fn mode(self) -> SchemeMode {
        match self {
            Scheme::Split => SchemeMode::SplitHalf,
            Scheme::Full => SchemeMode::FullForward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    matrix: Vec<f64>,
    dt: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    mode: Option<Mode>,
    #[serde(rename = "omega_over_Omega")]
    omega_over_omega: Option<f64>,
    tau: Option<f64>,
    steps: Option<usize>,
    dimension: Option<usize>,
    schedule: Option<Vec<RawStep>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    beta: Option<Vec<f64>>,
    #[serde(rename = "omega_over_Omega")]
    omega_over_omega: Option<Vec<f64>>,
    steps: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    protocol: RawProtocol,
    beta: Option<f64>,
    preparation: Option<Preparation>,
    scheme: Option<Scheme>,
    indices: Option<[usize; 2]>,
    sweep: Option<RawSweep>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

/// Protocol family selected by the config.
#[derive(Clone, Debug)]
pub enum ProtocolSpec {
    /// Qubit rotation; `tau` fixes `Omega = pi / (2 tau)`.
    Qubit { mode: Mode, tau: f64 },
    /// Piecewise-constant real schedule in its own energy units.
    Custom { steps: Vec<(ComplexMatrix, f64)> },
}

/// A validated run configuration with every axis resolved to a list.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub protocol: ProtocolSpec,
    pub betas: Vec<f64>,
    /// `None` for custom schedules.
    pub ratios: Vec<Option<f64>>,
    /// `None` for continuous driving.
    pub steps: Vec<Option<usize>>,
    pub preparation: Preparation,
    pub scheme: Scheme,
    pub indices: Option<(usize, usize)>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// One grid point, with `beta` in config units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub beta: f64,
    pub ratio: Option<f64>,
    pub steps: Option<usize>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn axis<T: Clone>(
    name: &str,
    single: Option<T>,
    sweep: Option<Vec<T>>,
) -> Result<Vec<T>, CliError> {
    match (single, sweep) {
        (Some(_), Some(_)) => Err(bad(format!(
            "{name} is given both as a single value and as a sweep axis"
        ))),
        (Some(v), None) => Ok(vec![v]),
        (None, Some(vs)) => Ok(vs),
        (None, None) => Err(bad(format!("{name} is missing"))),
    }
}

fn positive(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(bad(format!("{name} must be positive and finite, got {v}"))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| bad(format!("invalid config: {e}")))?;
        Self::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> Result<Self, CliError> {
        let sweep = raw.sweep.unwrap_or_default();
        let p = raw.protocol;
        let betas = axis("beta", raw.beta, sweep.beta)?;
        positive("beta", &betas)?;

        let (protocol, ratios, steps) = match p.schedule {
            Some(schedule) => {
                if p.mode == Some(Mode::Continuous) {
                    return Err(bad("a custom schedule is always discrete"));
                }
                if p.omega_over_omega.is_some()
                    || p.tau.is_some()
                    || p.steps.is_some()
                    || sweep.omega_over_omega.is_some()
                    || sweep.steps.is_some()
                {
                    return Err(bad(
                        "omega_over_Omega, tau and steps do not apply to a custom schedule",
                    ));
                }
                let steps = custom_schedule(schedule, p.dimension)?;
                let n = steps.len();
                (ProtocolSpec::Custom { steps }, vec![None], vec![Some(n)])
            }
            None => {
                let mode = p.mode.ok_or_else(|| bad("protocol.mode is missing"))?;
                if let Some(d) = p.dimension {
                    if d != 2 {
                        return Err(bad(format!(
                            "the rotation protocol is a qubit (dimension 2), got {d}"
                        )));
                    }
                }
                let tau = p.tau.unwrap_or(FRAC_PI_2);
                positive("tau", &[tau])?;
                let ratios = axis(
                    "omega_over_Omega",
                    p.omega_over_omega,
                    sweep.omega_over_omega,
                )?;
                positive("omega_over_Omega", &ratios)?;
                let steps = match mode {
                    Mode::Continuous => {
                        if p.steps.is_some() || sweep.steps.is_some() {
                            return Err(bad("steps do not apply to continuous driving"));
                        }
                        vec![None]
                    }
                    Mode::Discrete => {
                        let steps = axis("steps", p.steps, sweep.steps)?;
                        if steps.contains(&0) {
                            return Err(bad("steps must be at least 1"));
                        }
                        steps.into_iter().map(Some).collect()
                    }
                };
                (
                    ProtocolSpec::Qubit { mode, tau },
                    ratios.into_iter().map(Some).collect(),
                    steps,
                )
            }
        };

        let preparation = raw.preparation.unwrap_or(Preparation::Thermal);
        let indices = match (preparation, raw.indices) {
            (Preparation::Pure, Some([n, m])) => Some((n, m)),
            (Preparation::Pure, None) => return Err(bad("pure preparation needs indices [n, m]")),
            (Preparation::Thermal, Some(_)) => {
                return Err(bad("indices only apply to a pure preparation"))
            }
            (Preparation::Thermal, None) => None,
        };
        let cfg = Self {
            protocol,
            betas,
            ratios,
            steps,
            preparation,
            scheme: raw.scheme.unwrap_or(Scheme::Split),
            indices,
            output: raw.output,
            format: raw.format,
        };
        if let Some((n, m)) = cfg.indices {
            let d = cfg.dim();
            if n >= d || m >= d {
                return Err(bad(format!(
                    "indices ({n}, {m}) out of range for dimension {d}"
                )));
            }
        }
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        match &self.protocol {
            ProtocolSpec::Qubit { .. } => 2,
            ProtocolSpec::Custom { steps } => steps[0].0.dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty() || self.ratios.is_empty() || self.steps.is_empty()
    }

    /// Grid points in ascending `(beta, ratio, steps)` order, duplicates removed.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &beta in &self.betas {
            for &ratio in &self.ratios {
                for &steps in &self.steps {
                    out.push(GridPoint { beta, ratio, steps });
                }
            }
        }
        out.sort_by(|a, b| {
            a.beta
                .total_cmp(&b.beta)
                .then(cmp_opt(a.ratio, b.ratio))
                .then(a.steps.cmp(&b.steps))
        });
        out.dedup();
        out
    }
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => a.is_some().cmp(&b.is_some()),
    }
}

fn custom_schedule(
    schedule: Vec<RawStep>,
    dimension: Option<usize>,
) -> Result<Vec<(ComplexMatrix, f64)>, CliError> {
    let first = schedule.first().ok_or_else(|| bad("schedule is empty"))?;
    let inferred = (first.matrix.len() as f64).sqrt().round() as usize;
    let d = dimension.unwrap_or(inferred);
    if d == 0 {
        return Err(bad("schedule matrices are empty"));
    }
    schedule
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            if s.matrix.len() != d * d {
                return Err(bad(format!(
                    "schedule step {k} has {} entries, expected {}",
                    s.matrix.len(),
                    d * d
                )));
            }
            if s.matrix.iter().any(|x| !x.is_finite()) {
                return Err(bad(format!("schedule step {k} has a non-finite entry")));
            }
            if !(s.dt.is_finite() && s.dt > 0.0) {
                return Err(bad(format!("schedule step {k} has invalid dt {}", s.dt)));
            }
            let h = ComplexMatrix::from_real(d, &s.matrix)
                .map_err(|e| bad(format!("schedule step {k}: {e}")))?;
            Ok((h, s.dt))
        })
        .collect()
}
