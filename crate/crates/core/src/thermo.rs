//! Gibbs ensembles, two-point-measurement work statistics and the
//! fluctuation theorems they satisfy.
//!
//! Probabilities are carried in log form alongside their linear values so
//! that deep low-temperature tails (`beta E` of several hundred) survive in
//! ratios and logarithms.

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eig, inner, relative_entropy, ComplexMatrix, DensityOperator, SpectralDecomposition,
    StateRole,
};
use crate::protocol::DrivingProtocol;

/// Support points closer than this (in units of the spectral width) merge.
pub const MERGE_TOL: f64 = 1e-9;
/// Normalisation tolerance of a work distribution.
pub const NORMALIZATION_TOL: f64 = 1e-10;

pub(crate) fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBeta { beta })
    }
}

/// Gibbs state `exp(-beta (H - F))` of a Hermitian Hamiltonian.
#[derive(Clone, Debug)]
pub struct ThermalState {
    beta: f64,
    hamiltonian: ComplexMatrix,
    eigen: SpectralDecomposition,
    log_probabilities: Vec<f64>,
    probabilities: Vec<f64>,
    log_partition_function: f64,
}

pub fn thermal_state(h: &ComplexMatrix, beta: f64) -> Result<ThermalState> {
    ThermalState::new(h, beta)
}

impl ThermalState {
    pub fn new(h: &ComplexMatrix, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let eigen = hermitian_eig(h)?;
        let ground = eigen.eigenvalues()[0];
        let shifted: Vec<f64> = eigen
            .eigenvalues()
            .iter()
            .map(|&e| -beta * (e - ground))
            .collect();
        let log_norm = log_sum_exp(shifted.iter().copied());
        let log_probabilities: Vec<f64> = shifted.iter().map(|s| s - log_norm).collect();
        let probabilities = log_probabilities.iter().map(|l| l.exp()).collect();
        Ok(Self {
            beta,
            hamiltonian: h.clone(),
            eigen,
            log_probabilities,
            probabilities,
            log_partition_function: log_norm - beta * ground,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// Energy eigenpairs, ascending.
    pub fn eigen(&self) -> &SpectralDecomposition {
        &self.eigen
    }

    pub fn energies(&self) -> &[f64] {
        self.eigen.eigenvalues()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn log_probabilities(&self) -> &[f64] {
        &self.log_probabilities
    }

    pub fn log_partition_function(&self) -> f64 {
        self.log_partition_function
    }

    /// May overflow to infinity for very negative energies; prefer the log.
    pub fn partition_function(&self) -> f64 {
        self.log_partition_function.exp()
    }

    /// `F = -ln(Z) / beta`.
    pub fn free_energy(&self) -> f64 {
        -self.log_partition_function / self.beta
    }

    /// Log of the smallest Gibbs weight, `-beta (E_max - F)`.
    pub fn min_log_probability(&self) -> f64 {
        *self.log_probabilities.last().unwrap()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_spectrum(
            &self.probabilities,
            self.eigen.eigenvectors(),
            StateRole::System,
        )
        .expect("Gibbs weights form a valid spectrum")
    }
}

/// Conditional probabilities `p_{m|n}`, stored as `[m][n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for m in 0..dim {
            for n in 0..dim {
                entries.push(f(m, n));
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `p_{m|n}`.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[m * self.dim + n]
    }

    /// `sum_n p_{m|n}` for each `m`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|m| (0..self.dim).map(|n| self.get(m, n)).sum())
            .collect()
    }

    /// `sum_m p_{m|n}` for each `n`.
    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|n| (0..self.dim).map(|m| self.get(m, n)).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn conditionals_in_bases(
    u: &ComplexMatrix,
    initial: &SpectralDecomposition,
    last: &SpectralDecomposition,
) -> TransitionMatrix {
    let evolved: Vec<_> = (0..u.dim()).map(|n| u.apply(&initial.vector(n))).collect();
    TransitionMatrix::from_fn(u.dim(), |m, n| {
        inner(&last.vector(m), &evolved[n]).norm_sqr()
    })
}

fn check_dims(u: &ComplexMatrix, h0: &ComplexMatrix, htau: &ComplexMatrix) -> Result<()> {
    for found in [h0.dim(), htau.dim()] {
        if found != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found,
            });
        }
    }
    Ok(())
}

/// `p_{m|n} = |<E_m(tau)| U |E_n(0)>|^2`.
pub fn tpm_conditional(
    u: &ComplexMatrix,
    h0: &ComplexMatrix,
    htau: &ComplexMatrix,
) -> Result<TransitionMatrix> {
    check_dims(u, h0, htau)?;
    Ok(conditionals_in_bases(
        u,
        &hermitian_eig(h0)?,
        &hermitian_eig(htau)?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reversed,
}

/// Atomic work distribution with merged support.
///
/// Work values are in internal energy units. `delta_f` is the free-energy
/// difference of the process the distribution describes (`F_tau - F_0` for
/// the forward process, its negative for the reversed one).
#[derive(Clone, Debug)]
pub struct WorkDistribution {
    support: Vec<(f64, f64)>,
    log_probabilities: Vec<f64>,
    direction: Direction,
    delta_f: f64,
}

impl WorkDistribution {
    /// Validated distribution from explicit `(W, P)` pairs. Points must be
    /// separated by more than `MERGE_TOL` times the largest `|W|`.
    pub fn new(support: Vec<(f64, f64)>, direction: Direction, delta_f: f64) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if !delta_f.is_finite() {
            return Err(Error::InvalidDistribution(
                "free-energy difference is not finite".into(),
            ));
        }
        for &(w, p) in &support {
            if !w.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!("bad atom ({w}, {p})")));
            }
        }
        let mut support = support;
        support.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = support.iter().map(|a| a.0.abs()).fold(0.0, f64::max);
        let tol = MERGE_TOL * if scale > 0.0 { scale } else { 1.0 };
        for pair in support.windows(2) {
            if pair[1].0 - pair[0].0 <= tol {
                return Err(Error::InvalidDistribution(format!(
                    "support points {} and {} are not separated",
                    pair[0].0, pair[1].0
                )));
            }
        }
        let total: f64 = support.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "total probability {total}"
            )));
        }
        let log_probabilities = support.iter().map(|a| a.1.ln()).collect();
        Ok(Self {
            support,
            log_probabilities,
            direction,
            delta_f,
        })
    }

    /// Merges `(W, ln P)` atoms whose work values lie within `tol` of each
    /// other; zero-probability atoms are dropped.
    pub(crate) fn from_log_atoms(
        mut atoms: Vec<(f64, f64)>,
        tol: f64,
        direction: Direction,
        delta_f: f64,
    ) -> Result<Self> {
        atoms.retain(|a| a.1 > f64::NEG_INFINITY);
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution(
                "all atoms have zero weight".into(),
            ));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut groups: Vec<Vec<(f64, f64)>> = Vec::new();
        for atom in atoms {
            match groups.last_mut() {
                Some(g) if atom.0 - g.last().unwrap().0 <= tol => g.push(atom),
                _ => groups.push(vec![atom]),
            }
        }
        let mut support = Vec::with_capacity(groups.len());
        let mut log_probabilities = Vec::with_capacity(groups.len());
        for g in groups {
            let log_p = log_sum_exp(g.iter().map(|a| a.1));
            let w = g.iter().map(|a| a.0 * (a.1 - log_p).exp()).sum::<f64>();
            support.push((w, log_p.exp()));
            log_probabilities.push(log_p);
        }
        let total: f64 = support.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "total probability {total}"
            )));
        }
        Ok(Self {
            support,
            log_probabilities,
            direction,
            delta_f,
        })
    }

    /// Builds `P(W)` (forward) or `P~(W)` (reversed) from conditionals and the
    /// two Gibbs states.
    #[allow(clippy::needless_range_loop)]
    pub fn from_conditionals(
        conditionals: &TransitionMatrix,
        initial: &ThermalState,
        last: &ThermalState,
        direction: Direction,
    ) -> Result<Self> {
        let d = conditionals.dim();
        if initial.dim() != d || last.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: initial.dim().min(last.dim()),
            });
        }
        let (e0, etau) = (initial.energies(), last.energies());
        let mut atoms = Vec::with_capacity(d * d);
        for n in 0..d {
            for m in 0..d {
                let ln_c = conditionals.get(m, n).ln();
                atoms.push(match direction {
                    Direction::Forward => (etau[m] - e0[n], initial.log_probabilities()[n] + ln_c),
                    Direction::Reversed => (e0[n] - etau[m], last.log_probabilities()[m] + ln_c),
                });
            }
        }
        let forward_df = last.free_energy() - initial.free_energy();
        let delta_f = match direction {
            Direction::Forward => forward_df,
            Direction::Reversed => -forward_df,
        };
        Self::from_log_atoms(atoms, merge_tolerance(e0, etau), direction, delta_f)
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn log_probabilities(&self) -> &[f64] {
        &self.log_probabilities
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn index_of(&self, w: f64, tol: f64) -> Option<usize> {
        self.support.iter().position(|a| (a.0 - w).abs() <= tol)
    }

    /// `P(W)` at the support point within `tol` of `w`, else 0.
    pub fn probability_at(&self, w: f64, tol: f64) -> f64 {
        self.index_of(w, tol).map_or(0.0, |i| self.support[i].1)
    }

    pub fn log_probability_at(&self, w: f64, tol: f64) -> Option<f64> {
        self.index_of(w, tol).map(|i| self.log_probabilities[i])
    }

    pub fn mean_work(&self) -> f64 {
        self.support.iter().map(|(w, p)| w * p).sum()
    }
}

/// Merge tolerance scaled to the spectral width of both Hamiltonians.
pub(crate) fn merge_tolerance(e0: &[f64], etau: &[f64]) -> f64 {
    let all = e0.iter().chain(etau);
    let hi = all.clone().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = all.copied().fold(f64::INFINITY, f64::min);
    let width = hi - lo;
    MERGE_TOL * if width > 0.0 { width } else { 1.0 }
}

/// TPM work distribution of the process `U` between `H0` and `Htau`.
///
/// The reversed distribution uses `p~_{n|m} = p_{m|n}` and Gibbs weights of
/// `Htau`.
pub fn work_distribution(
    u: &ComplexMatrix,
    h0: &ComplexMatrix,
    htau: &ComplexMatrix,
    beta: f64,
    direction: Direction,
) -> Result<WorkDistribution> {
    check_dims(u, h0, htau)?;
    let initial = ThermalState::new(h0, beta)?;
    let last = ThermalState::new(htau, beta)?;
    let c = conditionals_in_bases(u, initial.eigen(), last.eigen());
    WorkDistribution::from_conditionals(&c, &initial, &last, direction)
}

/// `<exp(-beta W_diss)>`, evaluated in log space.
pub fn jarzynski_check(p: &WorkDistribution, beta: f64) -> f64 {
    let terms = p
        .support
        .iter()
        .zip(&p.log_probabilities)
        .map(|((w, _), lp)| lp - beta * (w - p.delta_f));
    log_sum_exp(terms).exp()
}

/// Log-residuals `|ln P(W) - ln P~(-W) - beta (W - dF)|` at every support
/// point with `P(W) > 1e-12`.
pub fn crooks_check(
    forward: &WorkDistribution,
    reversed: &WorkDistribution,
    beta: f64,
) -> Result<Vec<(f64, f64)>> {
    let tol = MERGE_TOL
        * forward
            .support
            .iter()
            .chain(&reversed.support)
            .map(|a| a.0.abs())
            .fold(1.0, f64::max);
    let mut out = Vec::with_capacity(forward.len());
    for (&(w, p), &lp) in forward.support.iter().zip(&forward.log_probabilities) {
        if p <= 1e-12 {
            continue;
        }
        let lr = reversed
            .log_probability_at(-w, tol)
            .filter(|l| l.is_finite())
            .ok_or(Error::SupportMismatch)?;
        out.push((w, (lp - lr - beta * (w - forward.delta_f)).abs()));
    }
    Ok(out)
}

/// `<W> - dF`.
pub fn dissipative_work(p: &WorkDistribution) -> f64 {
    p.mean_work() - p.delta_f
}

/// `S(rho(t) || Theta^dagger rho~(tau - t) Theta)` with Gibbs states of
/// `H(0)` and `Theta H(tau) Theta^dagger` on the two legs.
pub fn dissipation_relative_entropy(protocol: &DrivingProtocol, beta: f64, t: f64) -> Result<f64> {
    let tau = protocol.duration();
    let rho0 = ThermalState::new(protocol.initial_hamiltonian(), beta)?.density();
    let reversed0 = ThermalState::new(&protocol.final_hamiltonian().conj(), beta)?.density();
    let rho_t = rho0.evolve(&protocol.forward(t, 0.0)?)?;
    let remaining = (tau - t).max(0.0);
    let reversed_t = reversed0.evolve(&protocol.reversed(remaining, 0.0)?)?;
    relative_entropy(&rho_t, &reversed_t.conj())
}
