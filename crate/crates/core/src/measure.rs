//! Detection through a gate and four polarization-resolving detectors,
//! multinomial shot sampling, observable estimates and linear-inversion
//! tomography over the five complementary bases.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{gate, observable_pair, GateName, ObservablePair, TOMOGRAPHY_PAIRS};
use crate::numkernel::{distance, tau_sigma, Mat4, StateVec, C64, DEFAULT_TOL};
use crate::random::rng_from_seed;

const PROB_TOL: f64 = 1e-9;

/// Two-qubit density operator: Hermitian with unit trace. Operators built by
/// [`DensityMat::new`] are also positive; linear-inversion reconstructions may
/// not be, see [`DensityMat::is_positive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMat {
    rho: Mat4,
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat4) -> [f64; 4] {
    let h = nalgebra::Matrix4::<C64>::from_fn(|i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let mut values = [0.0; 4];
    for (v, e) in values.iter_mut().zip(h.symmetric_eigenvalues().iter()) {
        *v = *e;
    }
    values.sort_by(f64::total_cmp);
    values
}

impl DensityMat {
    pub fn new(rho: Mat4) -> Result<Self> {
        let d = Self::hermitian_unit_trace(rho)?;
        let low = d.eigenvalues()[0];
        if low < -DEFAULT_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {low:.3e}")));
        }
        Ok(d)
    }

    /// Checks only Hermiticity and unit trace.
    pub fn hermitian_unit_trace(rho: Mat4) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = rho.hermiticity_defect();
        if deviation > DEFAULT_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > DEFAULT_TOL {
            return Err(Error::InvalidDensity(format!("trace {:.12} differs from 1", tr.re)));
        }
        Ok(Self { rho })
    }

    pub fn from_state(psi: &StateVec) -> Self {
        Self { rho: psi.projector() }
    }

    pub fn maximally_mixed() -> Self {
        Self { rho: Mat4::identity().scale(C64::new(0.25, 0.0)) }
    }

    /// ¼(1 + Σ c_jk τ_j σ_k).
    pub fn from_pauli(c: &PauliCoefficients) -> Self {
        let mut rho = Mat4::identity();
        for ((j, k), value) in c.iter() {
            rho = rho + tau_sigma(j, k).scale(C64::new(value, 0.0));
        }
        Self { rho: rho.scale(C64::new(0.25, 0.0)) }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.rho
    }

    /// tr(ρ·m) for Hermitian m.
    pub fn expectation(&self, m: &Mat4) -> f64 {
        (self.rho * *m).trace().re
    }

    pub fn pauli_coefficients(&self) -> PauliCoefficients {
        let mut c = PauliCoefficients::zero();
        for j in 0..4 {
            for k in 0..4 {
                if (j, k) != (0, 0) {
                    c.set(j, k, self.expectation(&tau_sigma(j, k)));
                }
            }
        }
        c
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.rho)
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        self.eigenvalues()[0] >= -tol
    }
}

/// ½ Σ |eigenvalues of (a − b)|.
pub fn trace_distance(a: &DensityMat, b: &DensityMat) -> f64 {
    0.5 * hermitian_eigenvalues(&(a.rho - b.rho)).iter().map(|x| x.abs()).sum::<f64>()
}

/// The 15 coefficients c_jk = tr(ρ τ_j σ_k), (j, k) ≠ (0, 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliCoefficients {
    c: [[f64; 4]; 4],
}

impl PauliCoefficients {
    pub fn zero() -> Self {
        Self { c: [[0.0; 4]; 4] }
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.c[j][k]
    }

    pub fn set(&mut self, j: usize, k: usize, value: f64) {
        assert!((j, k) != (0, 0), "the identity coefficient is fixed by the trace");
        self.c[j][k] = value;
    }

    /// Row-major over (j, k), skipping (0, 0).
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        (0..16).skip(1).map(move |n| ((n / 4, n % 4), self.c[n / 4][n % 4]))
    }

    /// Key used in reports, e.g. "t1s2" for τ₁σ₂.
    pub fn key(j: usize, k: usize) -> String {
        format!("t{j}s{k}")
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|((_, a), (_, b))| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// One of the four detectors behind the polarizing beam splitters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    Rv,
    Rh,
    Lv,
    Lh,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Detector::Rv, Detector::Rh, Detector::Lv, Detector::Lh];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL.get(i).copied().ok_or(Error::IndexOutOfRange { index: i, expected: "0..=3" })
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detector::Rv => "Rv",
            Detector::Rh => "Rh",
            Detector::Lv => "Lv",
            Detector::Lh => "Lh",
        })
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Clicks per detector, in (Rv, Rh, Lv, Lh) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CountTable {
    pub counts: [u64; 4],
}

impl CountTable {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Result<[f64; 4]> {
        let n = self.shots();
        if n == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(self.counts.map(|c| c as f64 / n as f64))
    }
}

/// p_k = ⟨k| S ρ S† |k⟩ over the standard basis.
pub fn detection_probabilities(rho: &DensityMat, s: &Mat4) -> Result<[f64; 4]> {
    s.require_unitary(DEFAULT_TOL)?;
    let out = *s * rho.rho * s.adjoint();
    Ok([0, 1, 2, 3].map(|k| out[(k, k)].re.max(0.0)))
}

fn validate_probabilities(probs: &[f64; 4]) -> Result<()> {
    if probs.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    if let Some(p) = probs.iter().find(|&&p| p < -PROB_TOL) {
        return Err(Error::InvalidProbabilities(format!("negative entry {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidProbabilities(format!("entries sum to {total}")));
    }
    Ok(())
}

/// Multinomial draw by inverse CDF, one uniform per shot.
pub fn sample_counts_with<R: Rng + ?Sized>(probs: &[f64; 4], shots: u64, rng: &mut R) -> Result<CountTable> {
    validate_probabilities(probs)?;
    let mut cdf = [0.0; 4];
    let mut acc = 0.0;
    for (c, p) in cdf.iter_mut().zip(probs) {
        acc += p.max(0.0);
        *c = acc;
    }
    // Rounding may leave the last cumulative value just below u.
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(3);
    let mut table = CountTable::default();
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.iter().position(|&c| u < c).unwrap_or(last);
        table.counts[k] += 1;
    }
    Ok(table)
}

pub fn sample_counts(probs: &[f64; 4], shots: u64, seed: u64) -> Result<CountTable> {
    sample_counts_with(probs, shots, &mut rng_from_seed(seed))
}

/// Means of A, B and AB for a gate that maps A to τ₃ and B to σ₃.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbEstimate {
    pub a: f64,
    pub b: f64,
    pub ab: f64,
}

impl AbEstimate {
    pub fn from_frequencies(f: &[f64; 4]) -> Self {
        AbEstimate {
            a: f[0] + f[1] - f[2] - f[3],
            b: f[0] - f[1] + f[2] - f[3],
            ab: f[0] - f[1] - f[2] + f[3],
        }
    }
}

pub fn estimate_abs(counts: &CountTable) -> Result<AbEstimate> {
    Ok(AbEstimate::from_frequencies(&counts.frequencies()?))
}

/// Estimates gathered with one observable pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisRun {
    pub pair: ObservablePair,
    pub estimate: AbEstimate,
}

fn row_of(pair: &ObservablePair) -> Option<usize> {
    (1..=5).find(|&k| {
        let p = observable_pair(k).expect("k in range");
        distance(&p.a, &pair.a) < 1e-12 && distance(&p.b, &pair.b) < 1e-12
    })
}

/// Linear inversion from the five complementary pairs, in any order.
pub fn tomography_reconstruct(runs: &[BasisRun]) -> Result<DensityMat> {
    if runs.len() != 5 {
        return Err(Error::WrongPairSet(format!("expected 5 runs, got {}", runs.len())));
    }
    let mut by_row: [Option<AbEstimate>; 5] = [None; 5];
    for run in runs {
        let row = row_of(&run.pair).ok_or_else(|| Error::WrongPairSet("unrecognized pair".into()))?;
        if by_row[row - 1].replace(run.estimate).is_some() {
            return Err(Error::WrongPairSet(format!("pair {row} given twice")));
        }
    }
    let mut c = PauliCoefficients::zero();
    for (row, est) in by_row.iter().enumerate() {
        let est = est.expect("five distinct rows present");
        let ((aj, ak), (bj, bk)) = TOMOGRAPHY_PAIRS[row];
        c.set(aj, ak, est.a);
        c.set(bj, bk, est.b);
        match row {
            // AB = τ_k σ_k
            0..=2 => c.set(row + 1, row + 1, est.ab),
            // τ₁σ₂ · τ₂σ₃ = −τ₃σ₁
            3 => c.set(3, 1, -est.ab),
            // τ₂σ₁ · τ₃σ₂ = −τ₁σ₃
            _ => c.set(1, 3, -est.ab),
        }
    }
    Ok(DensityMat::from_pauli(&c))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TomographyResult {
    pub rho: DensityMat,
    pub coefficients: PauliCoefficients,
}

/// Measures each of the five bases; `shots_per_basis = 0` uses exact
/// probabilities. One generator seeded once serves all five bases in order.
pub fn tomography_pipeline(rho: &DensityMat, shots_per_basis: u64, seed: u64) -> Result<TomographyResult> {
    let mut rng = rng_from_seed(seed);
    let mut runs = Vec::with_capacity(5);
    for k in 1..=5 {
        let s = gate(GateName::tomography(k)?);
        let probs = detection_probabilities(rho, &s)?;
        let estimate = if shots_per_basis == 0 {
            AbEstimate::from_frequencies(&probs)
        } else {
            estimate_abs(&sample_counts_with(&probs, shots_per_basis, &mut rng)?)?
        };
        runs.push(BasisRun { pair: observable_pair(k)?, estimate });
    }
    let rho = tomography_reconstruct(&runs)?;
    Ok(TomographyResult { coefficients: rho.pauli_coefficients(), rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{basis, BasisName};
    use crate::random::{haar_unitary, random_density};
    use proptest::prelude::*;

    fn pure(k: usize) -> DensityMat {
        DensityMat::from_state(&StateVec::basis(k))
    }

    #[test]
    fn density_validation() {
        assert!(DensityMat::new(Mat4::identity()).is_err());
        assert!(DensityMat::new(Mat4::diag([C64::new(1.5, 0.0), C64::new(-0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])).is_err());
        let mut m = *DensityMat::maximally_mixed().matrix();
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(matches!(DensityMat::new(m), Err(Error::NotHermitian { .. })));
        assert!(DensityMat::new(*DensityMat::maximally_mixed().matrix()).is_ok());
        let mut nan = Mat4::zeros();
        nan[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert_eq!(DensityMat::new(nan), Err(Error::NonFinite));
    }

    #[test]
    fn detection_examples() {
        assert_eq!(detection_probabilities(&pure(0), &Mat4::identity()).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let e4 = DensityMat::from_state(&basis(BasisName::Bell)[3]);
        let p = detection_probabilities(&e4, &gate(GateName::Bell)).unwrap();
        for (x, y) in p.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let u: Mat4 = haar_unitary(&mut rng_from_seed(2));
        let p = detection_probabilities(&DensityMat::maximally_mixed(), &u).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
        assert!(detection_probabilities(&pure(0), &Mat4::identity().scale(C64::new(2.0, 0.0))).is_err());
    }

    #[test]
    fn sampling_examples() {
        assert_eq!(sample_counts(&[1.0, 0.0, 0.0, 0.0], 100, 9).unwrap().counts, [100, 0, 0, 0]);
        assert_eq!(sample_counts(&[0.0, 0.0, 0.0, 1.0], 100, 9).unwrap().counts, [0, 0, 0, 100]);
        assert_eq!(sample_counts(&[0.25; 4], 0, 9).unwrap().counts, [0; 4]);
        assert_eq!(sample_counts(&[0.25; 4], 1000, 4).unwrap(), sample_counts(&[0.25; 4], 1000, 4).unwrap());

        let n = 1_000_000;
        let t = sample_counts(&[0.25; 4], n, 17).unwrap();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in t.counts {
            assert!((c as f64 - 250_000.0).abs() < 3.0 * sigma, "{c}");
        }
        assert_eq!(t.shots(), n);

        assert!(sample_counts(&[0.5, 0.5, 0.5, 0.0], 1, 0).is_err());
        assert!(sample_counts(&[1.5, -0.5, 0.0, 0.0], 1, 0).is_err());
        assert!(sample_counts(&[f64::NAN, 0.0, 0.0, 1.0], 1, 0).is_err());
    }

    #[test]
    fn estimate_examples() {
        let e = estimate_abs(&CountTable { counts: [7, 0, 0, 0] }).unwrap();
        assert_eq!((e.a, e.b, e.ab), (1.0, 1.0, 1.0));
        let e = estimate_abs(&CountTable { counts: [0, 0, 7, 0] }).unwrap();
        assert_eq!((e.a, e.b, e.ab), (-1.0, 1.0, -1.0));
        let e = estimate_abs(&CountTable { counts: [5; 4] }).unwrap();
        assert_eq!((e.a, e.b, e.ab), (0.0, 0.0, 0.0));
        assert_eq!(estimate_abs(&CountTable::default()), Err(Error::ZeroShots));
    }

    #[test]
    fn exact_estimates_are_expectations() {
        let mut rng = rng_from_seed(12);
        for _ in 0..50 {
            let rho = random_density(&mut rng);
            for k in 1..=5 {
                let pair = observable_pair(k).unwrap();
                let p = detection_probabilities(&rho, &gate(GateName::tomography(k).unwrap())).unwrap();
                let e = AbEstimate::from_frequencies(&p);
                assert!((e.a - rho.expectation(&pair.a)).abs() < 1e-10);
                assert!((e.b - rho.expectation(&pair.b)).abs() < 1e-10);
                assert!((e.ab - rho.expectation(&pair.ab())).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn analytic_tomography_examples() {
        let mixed = tomography_pipeline(&DensityMat::maximally_mixed(), 0, 0).unwrap();
        assert!(distance(mixed.rho.matrix(), DensityMat::maximally_mixed().matrix()) < 1e-12);

        let e4 = DensityMat::from_state(&basis(BasisName::Bell)[3]);
        let r = tomography_pipeline(&e4, 0, 0).unwrap();
        assert!(distance(r.rho.matrix(), e4.matrix()) < 1e-10);
        let mut expected = PauliCoefficients::zero();
        expected.set(1, 1, 1.0);
        expected.set(2, 2, -1.0);
        expected.set(3, 3, 1.0);
        assert!(r.coefficients.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn reconstruction_rejects_wrong_pairs() {
        let est = AbEstimate { a: 0.0, b: 0.0, ab: 0.0 };
        let runs: Vec<BasisRun> = (1..=5).map(|k| BasisRun { pair: observable_pair(k).unwrap(), estimate: est }).collect();
        assert!(tomography_reconstruct(&runs).is_ok());
        let mut reversed = runs.clone();
        reversed.reverse();
        assert!(tomography_reconstruct(&reversed).is_ok());
        assert!(tomography_reconstruct(&runs[..4]).is_err());
        let mut dup = runs.clone();
        dup[4] = dup[0];
        assert!(tomography_reconstruct(&dup).is_err());
        let mut odd = runs;
        odd[0].pair.a = tau_sigma(1, 1);
        assert!(tomography_reconstruct(&odd).is_err());
    }

    #[test]
    fn sampled_tomography_of_mixed_state() {
        let r = tomography_pipeline(&DensityMat::maximally_mixed(), 10_000, 5).unwrap();
        for (_, c) in r.coefficients.iter() {
            assert!(c.abs() < 0.05);
        }
        let back = tomography_pipeline(&DensityMat::maximally_mixed(), 10_000, 5).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn trace_distance_examples() {
        assert!((trace_distance(&pure(0), &pure(1)) - 1.0).abs() < 1e-12);
        assert!(trace_distance(&pure(2), &pure(2)).abs() < 1e-12);
        assert!((trace_distance(&pure(0), &DensityMat::maximally_mixed()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn detectors_parse() {
        for d in Detector::ALL {
            assert_eq!(d.to_string().parse::<Detector>().unwrap(), d);
            assert_eq!(Detector::from_index(d.index()).unwrap(), d);
        }
        assert!("Rx".parse::<Detector>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn analytic_tomography_is_exact(seed in any::<u64>()) {
            let rho = random_density(&mut rng_from_seed(seed));
            let r = tomography_pipeline(&rho, 0, 0).unwrap();
            prop_assert!(r.coefficients.max_abs_diff(&rho.pauli_coefficients()) < 1e-10);
            prop_assert!(distance(r.rho.matrix(), rho.matrix()) < 1e-10);
        }

        #[test]
        fn probabilities_are_normalized(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let rho = random_density(&mut rng);
            let u: Mat4 = haar_unitary(&mut rng);
            let p = detection_probabilities(&rho, &u).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn pauli_round_trip(seed in any::<u64>()) {
            let rho = random_density(&mut rng_from_seed(seed));
            let back = DensityMat::from_pauli(&rho.pauli_coefficients());
            prop_assert!(distance(back.matrix(), rho.matrix()) < 1e-12);
            for (_, c) in rho.pauli_coefficients().iter() {
                prop_assert!(c.abs() <= 1.0 + 1e-9);
            }
        }
    }
}
