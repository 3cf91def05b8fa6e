#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use workint::matcore::{exp_hermitian_generator, ComplexMatrix, DensityOperator, StateRole};
use workint::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

pub fn random_matrix(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    random_matrix(rng, d).hermitian_part()
}

pub fn random_real_symmetric(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(d, |_, _| C64::new(gaussian(rng), 0.0));
    m.hermitian_part()
}

pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let h = random_hermitian(rng, d);
    exp_hermitian_generator(&h, 3.0).unwrap()
}

/// `G G^dagger / Tr` with a Gaussian `G`: full rank almost surely.
pub fn random_density(rng: &mut impl Rng, d: usize) -> DensityOperator {
    let g = random_matrix(rng, d);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr).hermitian_part(), StateRole::System).unwrap()
}

pub fn random_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(gaussian(rng), gaussian(rng)))
        .collect()
}
