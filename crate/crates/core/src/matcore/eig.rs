use super::matrix::{inner, ComplexMatrix, C64, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

/// Eigenvalue gap below which eigenvectors are treated as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Relative off-diagonal Frobenius mass at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a Hermitian operator: ascending real eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// Wraps eigenpairs that are already known (e.g. propagated by a unitary).
    /// The caller guarantees orthonormal columns.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: ComplexMatrix) -> Self {
        assert_eq!(eigenvalues.len(), eigenvectors.dim());
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `sum_k f(lambda_k) |v_k><v_k|`
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let d = self.dim();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d)
                .map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| C64::new(l, 0.0))
    }

    /// Eigenpairs of `U M U^dagger`.
    pub fn rotated(&self, u: &ComplexMatrix) -> Self {
        Self {
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: u.matmul(&self.eigenvectors),
        }
    }

    /// Eigenpairs of the entrywise conjugate `M*`.
    pub fn conj(&self) -> Self {
        Self {
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.conj(),
        }
    }
}

pub(crate) fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NonHermitianInput { deviation });
    }
    Ok(())
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalises a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Vectors inside a degenerate cluster are
/// re-orthonormalised, and every eigenvector is phased so that its first
/// non-negligible component is real and positive.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    check_hermitian(m)?;
    let d = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let scale = a
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) < JACOBI_TOL * scale {
            break;
        }
        for p in 0..d.saturating_sub(1) {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&k| v.column(k)).collect();

    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eigenvalues[end] - eigenvalues[end - 1] < DEGENERACY_GAP {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut vectors[start..end]);
        }
        start = end;
    }

    let mut eigenvectors = ComplexMatrix::zeros(d);
    for (k, vec) in vectors.iter_mut().enumerate() {
        fix_phase(vec);
        eigenvectors.set_column(k, vec);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

// One two-sided rotation zeroing a[p][q]. The unitary is diag(1, e^{-i phi})
// followed by the real symmetric Schur rotation of the phased 2x2 block.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;

    let d = a.dim();
    for k in 0..d {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..d {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..d {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

fn gram_schmidt(vectors: &mut [Vec<C64>]) {
    for i in 0..vectors.len() {
        for j in 0..i {
            let (head, tail) = vectors.split_at_mut(i);
            let proj = inner(&head[j], &tail[0]);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= proj * y;
            }
        }
        let n = super::matrix::norm(&vectors[i]);
        for x in vectors[i].iter_mut() {
            *x /= n;
        }
    }
}

fn fix_phase(v: &mut [C64]) {
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = lead.conj() / lead.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// `exp(-i H t)` (hbar = 1), evaluated on the eigenbasis of `H`.
pub fn exp_hermitian_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidMatrix(format!(
            "duration must be finite, got {t}"
        )));
    }
    let eig = hermitian_eig(h)?;
    Ok(eig.map(|l| C64::from_polar(1.0, -l * t)))
}

/// Principal logarithm of a positive-definite Hermitian matrix.
pub fn log_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min_eigenvalue = eig.eigenvalues()[0];
    if min_eigenvalue <= 1e-14 {
        return Err(Error::SingularInput { min_eigenvalue });
    }
    Ok(eig.map(|l| C64::new(l.ln(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{sigma_x, sigma_y, sigma_z};
    use super::*;
    use std::f64::consts::{E, FRAC_PI_4, PI};

    fn h_rot(lambda: f64) -> ComplexMatrix {
        let (c, s) = (lambda.cos(), lambda.sin());
        let one = ComplexMatrix::identity(2);
        let m = &(&one + &sigma_z().scale_real(c)) + &sigma_x().scale_real(s);
        m.scale_real(0.5)
    }

    #[test]
    fn pauli_z_spectrum() {
        let eig = hermitian_eig(&sigma_z()).unwrap();
        assert_eq!(eig.eigenvalues(), &[-1.0, 1.0]);
        // |z-> = e_1 first, then |z+> = e_0
        assert!((eig.vector(0)[1] - 1.0).norm() < 1e-15);
        assert!((eig.vector(1)[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn identity_is_degenerate_but_orthonormal() {
        let eig = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues(), &[1.0, 1.0]);
        assert!(eig.eigenvectors().is_unitary(1e-14));
    }

    #[test]
    fn rotated_hamiltonian_has_fixed_spectrum() {
        let eig = hermitian_eig(&h_rot(FRAC_PI_4)).unwrap();
        assert!(eig.eigenvalues()[0].abs() < 1e-14);
        assert!((eig.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_convention_first_component_positive() {
        let m = ComplexMatrix::from_rows(&[
            &[C64::new(1.0, 0.0), C64::new(0.3, -0.4)],
            &[C64::new(0.3, 0.4), C64::new(-0.5, 0.0)],
        ])
        .unwrap();
        let eig = hermitian_eig(&m).unwrap();
        for k in 0..2 {
            let v = eig.vector(k);
            assert!(v[0].im.abs() < 1e-15 && v[0].re > 0.0);
        }
        assert!(eig.reconstruct().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn y_rotation_by_pi() {
        let u = exp_hermitian_generator(&sigma_y().scale_real(0.5), PI).unwrap();
        let expected = ComplexMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn zero_time_is_identity() {
        let u = exp_hermitian_generator(&h_rot(0.7), 0.0).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn log_of_maximally_mixed() {
        let l = log_psd(&ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        let expected = ComplexMatrix::identity(2).scale_real(-(2f64.ln()));
        assert!(l.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn log_of_exponential_diagonal() {
        let l = log_psd(&ComplexMatrix::diagonal(&[E, E * E])).unwrap();
        assert!(l.max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 2.0])) < 1e-14);
    }

    #[test]
    fn log_of_thermal_qubit_round_trips() {
        let p1 = (-1.2f64).exp() / (1.0 + (-1.2f64).exp());
        let rho = ComplexMatrix::diagonal(&[p1, 1.0 - p1]);
        // rotate off the computational basis
        let u = exp_hermitian_generator(&sigma_y().scale_real(0.5), 0.9).unwrap();
        let rho = u.matmul(&rho).matmul(&u.adjoint());
        let l = log_psd(&rho).unwrap();
        let back = hermitian_eig(&l).unwrap().map(|x| C64::new(x.exp(), 0.0));
        assert!(back.max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn log_rejects_singular() {
        let m = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(log_psd(&m), Err(Error::SingularInput { .. })));
    }

    #[test]
    fn exp_rejects_non_finite_time() {
        assert!(exp_hermitian_generator(&sigma_z(), f64::INFINITY).is_err());
    }
}
