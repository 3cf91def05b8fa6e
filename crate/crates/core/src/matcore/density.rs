use super::eig::{hermitian_eig, SpectralDecomposition};
use super::matrix::{ComplexMatrix, C64, UNITARY_TOL};
use crate::error::{Error, Result};

/// Trace, Hermiticity and positivity tolerance for density operators.
pub const DENSITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateRole {
    System,
    Environment,
    Auxiliary,
    Joint,
}

/// Which factor of a bipartite space survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// A validated density operator together with its eigenpairs.
///
/// The eigenpairs are carried alongside the matrix so that states obtained by
/// unitary evolution of a known spectrum keep their exact (possibly tiny)
/// eigenvalues; entropies are evaluated from these rather than from a fresh
/// diagonalisation.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    role: StateRole,
    spectrum: SpectralDecomposition,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, role: StateRole) -> Result<Self> {
        let herm = matrix.hermiticity_deviation();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let spectrum = hermitian_eig(&matrix)?;
        let min = spectrum.eigenvalues()[0];
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self {
            matrix,
            role,
            spectrum,
        })
    }

    /// Builds `sum_k p_k |v_k><v_k|` from probabilities and orthonormal columns.
    pub fn from_spectrum(
        probabilities: &[f64],
        eigenvectors: &ComplexMatrix,
        role: StateRole,
    ) -> Result<Self> {
        if probabilities.len() != eigenvectors.dim() {
            return Err(Error::DimensionMismatch {
                expected: eigenvectors.dim(),
                found: probabilities.len(),
            });
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "probabilities sum to {total}"
            )));
        }
        if probabilities
            .iter()
            .any(|&p| p < -DENSITY_TOL || !p.is_finite())
        {
            return Err(Error::InvalidDensity("negative probability".into()));
        }
        if !eigenvectors.is_unitary(UNITARY_TOL) {
            return Err(Error::InvalidDensity(
                "eigenvectors are not orthonormal".into(),
            ));
        }
        let mut order: Vec<usize> = (0..probabilities.len()).collect();
        order.sort_by(|&i, &j| probabilities[i].total_cmp(&probabilities[j]));
        let mut vectors = ComplexMatrix::zeros(eigenvectors.dim());
        for (k, &src) in order.iter().enumerate() {
            vectors.set_column(k, &eigenvectors.column(src));
        }
        let values = order.iter().map(|&k| probabilities[k]).collect();
        let spectrum = SpectralDecomposition::from_parts(values, vectors);
        Ok(Self {
            matrix: spectrum.reconstruct(),
            role,
            spectrum,
        })
    }

    /// `|psi><psi|` for a normalised vector.
    pub fn pure(psi: &[C64], role: StateRole) -> Result<Self> {
        let n = super::matrix::norm(psi);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("state norm is {n}")));
        }
        Self::new(ComplexMatrix::outer(psi, psi), role)
    }

    pub fn maximally_mixed(dim: usize, role: StateRole) -> Self {
        let p = vec![1.0 / dim as f64; dim];
        Self::from_spectrum(&p, &ComplexMatrix::identity(dim), role)
            .expect("uniform spectrum is a valid state")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn role(&self) -> StateRole {
        self.role
    }

    pub fn with_role(mut self, role: StateRole) -> Self {
        self.role = role;
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// `U rho U^dagger`, keeping the spectrum exact.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let spectrum = self.spectrum.rotated(u);
        Ok(Self {
            matrix: u.matmul(&self.matrix).matmul(&u.adjoint()),
            role: self.role,
            spectrum,
        })
    }

    /// Entrywise conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self {
            matrix: self.matrix.conj(),
            role: self.role,
            spectrum: self.spectrum.conj(),
        }
    }
}

/// Quantum relative entropy `S(rho || sigma) = Tr[rho ln rho - rho ln sigma]` in nats.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let r = rho.spectrum();
    let s = sigma.spectrum();
    let s_vecs: Vec<Vec<C64>> = (0..s.dim()).map(|j| s.vector(j)).collect();

    let mut self_term = 0.0;
    let mut cross_term = 0.0;
    for (i, &ri) in r.eigenvalues().iter().enumerate() {
        if ri <= 0.0 {
            continue;
        }
        self_term += ri * ri.ln();
        let rv = r.vector(i);
        let overlaps: Vec<f64> = s_vecs
            .iter()
            .map(|sv| super::matrix::inner(sv, &rv).norm_sqr())
            .collect();
        let expectation: f64 = overlaps
            .iter()
            .zip(s.eigenvalues())
            .map(|(o, &sj)| o * sj.max(0.0))
            .sum();
        if ri > 1e-12 && expectation <= 1e-14 {
            return Err(Error::SupportMismatch);
        }
        for (o, &sj) in overlaps.iter().zip(s.eigenvalues()) {
            if sj > 0.0 {
                cross_term += ri * o * sj.ln();
            } else if ri * o > 1e-24 {
                return Err(Error::SupportMismatch);
            }
        }
    }
    Ok(self_term - cross_term)
}

/// `D = ||rho - sigma||_1 / 2`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let diff = (rho.matrix() - sigma.matrix()).hermitian_part();
    let eig = hermitian_eig(&diff)?;
    Ok(0.5 * eig.eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
}

/// `sqrt(Tr[M^dagger M])`
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Trace norm: the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    let gram = m.adjoint().matmul(m).hermitian_part();
    hermitian_eig(&gram)
        .expect("Gram matrix is Hermitian")
        .eigenvalues()
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum()
}

/// Partial trace of a state on a `dims.0 x dims.1` bipartite space.
pub fn partial_trace(
    joint: &DensityOperator,
    keep: Subsystem,
    dims: (usize, usize),
) -> Result<DensityOperator> {
    let (da, db) = dims;
    if da * db != joint.dim() {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: joint.dim(),
        });
    }
    let m = joint.matrix();
    let reduced = match keep {
        Subsystem::First => ComplexMatrix::from_fn(da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    };
    DensityOperator::new(reduced.hermitian_part(), joint.role())
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{basis_vector, kron, kron_vec, sigma_x};
    use super::*;
    use std::f64::consts::{LN_2, SQRT_2};

    fn ket_z(plus: bool) -> Vec<C64> {
        basis_vector(2, if plus { 0 } else { 1 })
    }

    #[test]
    fn relative_entropy_of_state_with_itself_is_zero() {
        let rho = DensityOperator::from_spectrum(
            &[0.3, 0.7],
            &ComplexMatrix::identity(2),
            StateRole::System,
        )
        .unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pure_against_maximally_mixed_is_ln2() {
        let rho = DensityOperator::pure(&ket_z(true), StateRole::System).unwrap();
        let mm = DensityOperator::maximally_mixed(2, StateRole::System);
        assert!((relative_entropy(&rho, &mm).unwrap() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_detects_support_mismatch() {
        let rho = DensityOperator::maximally_mixed(2, StateRole::System);
        let sigma = DensityOperator::pure(&ket_z(true), StateRole::System).unwrap();
        assert_eq!(relative_entropy(&rho, &sigma), Err(Error::SupportMismatch));
        let plus: Vec<C64> = vec![C64::new(1.0 / SQRT_2, 0.0); 2];
        let rho = DensityOperator::pure(&plus, StateRole::System).unwrap();
        assert_eq!(relative_entropy(&rho, &sigma), Err(Error::SupportMismatch));
    }

    #[test]
    fn trace_distance_examples() {
        let up = DensityOperator::pure(&ket_z(true), StateRole::System).unwrap();
        let down = DensityOperator::pure(&ket_z(false), StateRole::System).unwrap();
        let mm = DensityOperator::maximally_mixed(2, StateRole::System);
        assert!(trace_distance(&up, &up).unwrap().abs() < 1e-15);
        assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&mm, &up).unwrap() - 0.5).abs() < 1e-15);
        let big = DensityOperator::maximally_mixed(3, StateRole::System);
        assert!(matches!(
            trace_distance(&up, &big),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn norms_of_simple_matrices() {
        assert!((frobenius_norm(&ComplexMatrix::identity(2)) - SQRT_2).abs() < 1e-15);
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3)), 0.0);
        let x = sigma_x();
        assert!((frobenius_norm(&x) - SQRT_2).abs() < 1e-15);
        assert!((trace_norm(&x) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = DensityOperator::from_spectrum(
            &[0.25, 0.75],
            &ComplexMatrix::identity(2),
            StateRole::System,
        )
        .unwrap();
        let b = DensityOperator::maximally_mixed(3, StateRole::Environment);
        let joint = DensityOperator::new(kron(a.matrix(), b.matrix()), StateRole::Joint).unwrap();
        let ra = partial_trace(&joint, Subsystem::First, (2, 3)).unwrap();
        let rb = partial_trace(&joint, Subsystem::Second, (2, 3)).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-15);
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-15);
        assert!(partial_trace(&joint, Subsystem::First, (2, 2)).is_err());
    }

    #[test]
    fn partial_trace_of_schmidt_state() {
        // sum_n sqrt(p_n) |E_n>|n> with E_n = |x+>, |x->
        let s = 1.0 / SQRT_2;
        let e0 = vec![C64::new(s, 0.0), C64::new(s, 0.0)];
        let e1 = vec![C64::new(s, 0.0), C64::new(-s, 0.0)];
        let p = [0.2f64, 0.8];
        let psi: Vec<C64> = kron_vec(&e0, &basis_vector(2, 0))
            .iter()
            .zip(kron_vec(&e1, &basis_vector(2, 1)))
            .map(|(a, b)| a * p[0].sqrt() + b * p[1].sqrt())
            .collect();
        let joint = DensityOperator::pure(&psi, StateRole::Joint).unwrap();
        let rs = partial_trace(&joint, Subsystem::First, (2, 2)).unwrap();
        let expected = &ComplexMatrix::outer(&e0, &e0).scale_real(p[0])
            + &ComplexMatrix::outer(&e1, &e1).scale_real(p[1]);
        assert!(rs.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn evolve_keeps_exact_spectrum() {
        let rho = DensityOperator::from_spectrum(
            &[1e-200, 1.0 - 1e-200],
            &ComplexMatrix::identity(2),
            StateRole::System,
        )
        .unwrap();
        let u = super::super::eig::exp_hermitian_generator(&sigma_x(), 0.4).unwrap();
        let out = rho.evolve(&u).unwrap();
        assert_eq!(out.spectrum().eigenvalues()[0], 1e-200);
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_states() {
        assert!(DensityOperator::new(ComplexMatrix::identity(2), StateRole::System).is_err());
        assert!(
            DensityOperator::new(ComplexMatrix::diagonal(&[1.5, -0.5]), StateRole::System).is_err()
        );
        assert!(DensityOperator::pure(&[C64::new(2.0, 0.0)], StateRole::System).is_err());
    }
}
