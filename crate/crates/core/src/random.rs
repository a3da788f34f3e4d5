//! Seeded random sampling of unitaries, density matrices and setups.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assembly::{SetupConfig, StationConfig};
use crate::measure::DensityMat;
use crate::numkernel::{Mat, Mat4, StateVec, C64, ZERO};

/// The generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a complex
/// Gaussian matrix.
pub fn haar_unitary<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> Mat<N> {
    let mut cols = [[ZERO; N]; N];
    for col in cols.iter_mut() {
        for x in col.iter_mut() {
            *x = complex_gaussian(rng);
        }
    }
    for j in 0..N {
        for k in 0..j {
            let proj: C64 = (0..N).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..N {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    Mat::from_columns(cols)
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> StateVec {
    loop {
        let amps = [(); 4].map(|_| complex_gaussian(rng));
        if let Ok(s) = StateVec::new(amps) {
            return s;
        }
    }
}

/// Mixed state obtained by tracing a two-dimensional environment out of a
/// random pure state of system ⊗ environment.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMat {
    let psi = [[(); 2]; 4].map(|row| row.map(|_| complex_gaussian(rng)));
    let norm: f64 = psi.iter().flatten().map(|x| x.norm_sqr()).sum();
    let mut rho = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            rho[(i, j)] = (0..2).map(|e| psi[i][e] * psi[j][e].conj()).sum::<C64>() / norm;
        }
    }
    DensityMat::new(rho).expect("partial trace of a pure state is a density operator")
}

/// Uniform random station angles on (−π, π].
pub fn random_station<R: Rng + ?Sized>(rng: &mut R) -> StationConfig {
    let mut angle = || rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    StationConfig::new(angle(), angle(), angle(), angle())
}

pub fn random_setup<R: Rng + ?Sized>(rng: &mut R) -> SetupConfig {
    SetupConfig {
        entry: random_station(rng),
        exit: random_station(rng),
        arm_r: random_station(rng),
        arm_l: random_station(rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{is_unitary, Mat4};

    #[test]
    fn haar_samples_are_unitary_and_seeded() {
        let mut a = rng_from_seed(7);
        let mut b = rng_from_seed(7);
        for _ in 0..50 {
            let u: Mat4 = haar_unitary(&mut a);
            assert!(is_unitary(&u, 1e-12));
            assert_eq!(u, haar_unitary::<4, _>(&mut b));
        }
    }

    #[test]
    fn random_density_is_mixed() {
        let mut rng = rng_from_seed(4);
        for _ in 0..100 {
            let rho = random_density(&mut rng);
            let ev = rho.eigenvalues();
            // rank two: two vanishing eigenvalues, two positive ones
            assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12 && ev[2] > 0.0);
            assert!((random_state(&mut rng).amps().iter().map(|x| x.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_first_entry_moments() {
        // For Haar U(4), E|u00|² = 1/4 and E|u00|⁴ = 1/10.
        let mut rng = rng_from_seed(11);
        let n = 20_000;
        let (mut m2, mut m4) = (0.0, 0.0);
        for _ in 0..n {
            let u: Mat4 = haar_unitary(&mut rng);
            let p = u[(0, 0)].norm_sqr();
            m2 += p;
            m4 += p * p;
        }
        assert!((m2 / n as f64 - 0.25).abs() < 0.01);
        assert!((m4 / n as f64 - 0.1).abs() < 0.01);
    }
}
