//! Inverse model: element settings that realize a requested unitary.
//!
//! Every 2×2 unitary is factored as e^{iδ} e^{i(a/2)O} e^{i(b/2)M} e^{i(c/2)O}
//! for a pair of anticommuting Hermitian involutions O (outer) and M
//! (middle). A 4×4 unitary is first split into four polarization gates
//! through a cosine-sine style frame of its spatial blocks, then each gate
//! is mapped onto one wave-plate station.

use std::f64::consts::FRAC_PI_4;

use crate::assembly::{blocks, MZConfig, PolarizationGates, SetupConfig, StationConfig};
use crate::error::{Error, Result};
use crate::numkernel::{
    eig_hermitian_2x2, exp_i, is_hermitian, normalize2, orthogonal2, pauli, Mat2,
    Mat4, C64, DEFAULT_TOL, I, ONE, ZERO,
};

const GIMBAL_EPS: f64 = 1e-12;

/// u = e^{iδ} e^{i(a/2)A₃} e^{i(b/2)A₂} e^{i(c/2)A₃}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerFactors {
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl EulerFactors {
    pub fn reconstruct(&self, axis2: &Mat2, axis3: &Mat2) -> Mat2 {
        (exp_i(self.a / 2.0, axis3) * exp_i(self.b / 2.0, axis2) * exp_i(self.c / 2.0, axis3))
            .scale(C64::from_polar(1.0, self.delta))
    }
}

fn check_axes(outer: &Mat2, middle: &Mat2) -> Result<()> {
    let one = Mat2::identity();
    let ok = [outer, middle].iter().all(|m| {
        m.is_finite() && is_hermitian(*m, DEFAULT_TOL) && (**m * **m).max_abs_diff(&one) < DEFAULT_TOL
    });
    let anti = *outer * *middle + *middle * *outer;
    if ok && anti.max_abs_diff(&Mat2::zeros()) < DEFAULT_TOL {
        Ok(())
    } else {
        Err(Error::InvalidAxes)
    }
}

/// Euler angles of `u` with `axis3` as the outer and `axis2` as the middle
/// rotation axis. b lies in [0, π]; at b = 0 or b = π the split between a
/// and c is arbitrary and c is set to 0.
pub fn euler_su2(u: &Mat2, axis2: &Mat2, axis3: &Mat2) -> Result<EulerFactors> {
    let (outer, middle) = (axis3, axis2);
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    u.require_unitary(DEFAULT_TOL)?;
    check_axes(outer, middle)?;

    // Frame in which O = σ₃ and M = σ₂.
    let eig = eig_hermitian_2x2(outer)?;
    let plus = eig.vectors.column(0);
    let minus = eig.vectors.column(1);
    let m_pm: C64 = (0..2)
        .map(|i| (0..2).map(|j| plus[i].conj() * middle[(i, j)] * minus[j]).sum::<C64>())
        .sum();
    let rephase = -I * m_pm.conj() / m_pm.norm();
    let frame = Mat2::from_columns([plus, [minus[0] * rephase, minus[1] * rephase]]);

    let w = frame.adjoint() * *u * frame;
    let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
    let delta = det.arg() / 2.0;
    let w = w.scale(C64::from_polar(1.0, -delta));

    let (diag, off) = (w[(0, 0)], w[(0, 1)]);
    let b = 2.0 * off.norm().atan2(diag.norm());
    let (a, c) = if off.norm() < GIMBAL_EPS {
        (2.0 * diag.arg(), 0.0)
    } else if diag.norm() < GIMBAL_EPS {
        (2.0 * off.arg(), 0.0)
    } else {
        let sum = 2.0 * diag.arg();
        let diff = 2.0 * off.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    Ok(EulerFactors { delta, a, b, c })
}

/// Phase-shifter settings of the spatial interferometer realizing `u`.
pub fn compile_spatial(u: &Mat2) -> Result<MZConfig> {
    let e = euler_su2(u, &pauli(2), &pauli(3))?;
    let sum = 2.0 * e.delta - e.a - e.c;
    Ok(MZConfig {
        phi1: e.c.into(),
        phi2: e.a.into(),
        vphi1: ((sum + e.b) / 2.0).into(),
        vphi2: ((sum - e.b) / 2.0).into(),
    })
}

/// Station settings (global phase plus QWP, HWP, QWP angles) realizing `v`.
pub fn compile_polarization(v: &Mat2) -> Result<StationConfig> {
    let e = euler_su2(v, &pauli(3), &pauli(2))?;
    let alpha = e.c / 2.0 + FRAC_PI_4;
    let gamma = -e.a / 2.0 - 3.0 * FRAC_PI_4;
    let beta = (alpha + gamma - e.b / 2.0) / 2.0;
    Ok(StationConfig::new(e.delta, alpha, beta, gamma))
}

/// Common frame of the four spatial blocks of a two-qubit unitary:
///
/// S_RR = Σ ψ̄ₖ cos θₖ ψₖ†, S_LL = Σ χ̄ₖ cos θₖ χₖ†,
/// S_RL = −i Σ ψ̄ₖ sin θₖ χₖ†, S_LR = −i Σ χ̄ₖ sin θₖ ψₖ†,
///
/// with orthonormal bases stored as matrix columns and θₖ ∈ [0, π/2].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularFrame {
    pub psi: Mat2,
    pub psi_bar: Mat2,
    pub chi: Mat2,
    pub chi_bar: Mat2,
    pub theta: [f64; 2],
}

fn outer(x: [C64; 2], y: [C64; 2]) -> Mat2 {
    Mat2::from_rows([
        [x[0] * y[0].conj(), x[0] * y[1].conj()],
        [x[1] * y[0].conj(), x[1] * y[1].conj()],
    ])
}

fn vnorm(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn vdot(x: [C64; 2], y: [C64; 2]) -> C64 {
    x[0].conj() * y[0] + x[1].conj() * y[1]
}

/// Σₖ xₖ wₖ yₖ† over column bases `x`, `y`.
fn sum_outer(x: &Mat2, w: [C64; 2], y: &Mat2) -> Mat2 {
    outer(x.column(0), y.column(0)).scale(w[0]) + outer(x.column(1), y.column(1)).scale(w[1])
}

/// Orthonormal pair built from image vectors `img[k]` of magnitude `mag[k]`:
/// the larger one fixes the first direction, the other is the orthogonal
/// complement carrying the phase of its image when that image is nonzero.
fn image_basis(img: [[C64; 2]; 2], mag: [f64; 2]) -> Mat2 {
    let (big, small) = if mag[0] >= mag[1] { (0, 1) } else { (1, 0) };
    if mag[big] < GIMBAL_EPS {
        return Mat2::identity();
    }
    let first = normalize2(img[big]);
    let mut second = orthogonal2(first);
    let overlap = vdot(second, img[small]);
    if overlap.norm() > GIMBAL_EPS {
        let p = overlap / overlap.norm();
        second = [second[0] * p, second[1] * p];
    }
    let mut cols = [[ZERO; 2]; 2];
    cols[big] = first;
    cols[small] = second;
    Mat2::from_columns(cols)
}

/// Unitary factor of the polar decomposition of a near-unitary 2×2 matrix.
fn nearest_unitary(w: &Mat2) -> Result<Mat2> {
    let eig = eig_hermitian_2x2(&(w.adjoint() * *w))?;
    if eig.values[1] <= 0.0 {
        return Err(Error::NotUnitary { deviation: w.unitarity_defect() });
    }
    let inv_sqrt = [
        C64::new(eig.values[0].sqrt().recip(), 0.0),
        C64::new(eig.values[1].sqrt().recip(), 0.0),
    ];
    Ok(*w * sum_outer(&eig.vectors, inv_sqrt, &eig.vectors))
}

pub fn singular_frame(s: &Mat4) -> Result<SingularFrame> {
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    s.require_unitary(DEFAULT_TOL)?;
    let b = blocks(s);

    let gram = b.rr.adjoint() * b.rr;
    let psi = eig_hermitian_2x2(&(gram + gram.adjoint()).scale(C64::new(0.5, 0.0)))?.vectors;
    let rr_img = [b.rr.mul_vec(&psi.column(0)), b.rr.mul_vec(&psi.column(1))];
    let lr_img = [0, 1].map(|k| {
        let v = b.lr.mul_vec(&psi.column(k));
        [I * v[0], I * v[1]]
    });
    let cos = [vnorm(rr_img[0]), vnorm(rr_img[1])];
    let sin = [vnorm(lr_img[0]), vnorm(lr_img[1])];

    let psi_bar = image_basis(rr_img, cos);
    let chi_bar = image_basis(lr_img, sin);

    let rl_i = b.rl.scale(I);
    let w = Mat2::diag([C64::new(cos[0], 0.0), C64::new(cos[1], 0.0)]) * chi_bar.adjoint() * b.ll
        + Mat2::diag([C64::new(sin[0], 0.0), C64::new(sin[1], 0.0)]) * psi_bar.adjoint() * rl_i;
    let chi = nearest_unitary(&w)?.adjoint();

    Ok(SingularFrame {
        psi,
        psi_bar,
        chi,
        chi_bar,
        theta: [sin[0].atan2(cos[0]), sin[1].atan2(cos[1])],
    })
}

impl SingularFrame {
    /// (cos θ₀, cos θ₁), descending.
    pub fn cos_angles(&self) -> [f64; 2] {
        self.theta.map(f64::cos)
    }

    fn weights(&self, f: fn(f64) -> f64, k: C64) -> [C64; 2] {
        self.theta.map(|t| k * f(t))
    }

    /// The four blocks (rr, rl, lr, ll) rebuilt from the frame.
    pub fn blocks(&self) -> crate::assembly::Blocks {
        let cos = self.weights(f64::cos, ONE);
        let sin = self.weights(f64::sin, -I);
        crate::assembly::Blocks {
            rr: sum_outer(&self.psi_bar, cos, &self.psi),
            rl: sum_outer(&self.psi_bar, sin, &self.chi),
            lr: sum_outer(&self.chi_bar, sin, &self.psi),
            ll: sum_outer(&self.chi_bar, cos, &self.chi),
        }
    }

    /// Polarization gates realizing the frame.
    pub fn gates(&self) -> PolarizationGates {
        let minus_i = [-I, -I];
        let plus_i = [I, I];
        PolarizationGates {
            v1: sum_outer(&self.chi, minus_i, &self.psi),
            v2: sum_outer(&self.psi_bar, plus_i, &self.chi_bar),
            vr: sum_outer(&self.chi_bar, self.theta.map(|t| C64::from_polar(1.0, -t)), &self.chi),
            vl: sum_outer(&self.chi_bar, self.theta.map(|t| C64::from_polar(1.0, t)), &self.chi),
        }
    }
}

/// Polarization gates (entry, exit, R arm, L arm) whose interferometer
/// equals `s` exactly, global phase included.
pub fn decompose_vs(s: &Mat4) -> Result<PolarizationGates> {
    Ok(singular_frame(s)?.gates())
}

pub fn compile_two_qubit(s: &Mat4) -> Result<SetupConfig> {
    let g = decompose_vs(s)?;
    Ok(SetupConfig {
        entry: compile_polarization(&g.v1)?,
        exit: compile_polarization(&g.v2)?,
        arm_r: compile_polarization(&g.vr)?,
        arm_l: compile_polarization(&g.vl)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_mz, assemble_two_qubit, station_unitary};
    use crate::numkernel::{distance, is_unitary, kron, tau_sigma};
    use crate::random::{haar_unitary, random_setup, rng_from_seed};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    const TOL: f64 = 1e-10;

    fn axis_pairs() -> Vec<(Mat2, Mat2)> {
        let mut rng = rng_from_seed(3);
        let mut pairs = vec![(pauli(3), pauli(2)), (pauli(2), pauli(3)), (pauli(1), pauli(3)), (pauli(3), -pauli(1))];
        for _ in 0..4 {
            let r: Mat2 = haar_unitary(&mut rng);
            pairs.push((r * pauli(3) * r.adjoint(), r * pauli(1) * r.adjoint()));
        }
        pairs
    }

    #[test]
    fn euler_round_trip_many_axes() {
        let mut rng = rng_from_seed(1);
        for (o, m) in axis_pairs() {
            for _ in 0..200 {
                let u: Mat2 = haar_unitary(&mut rng);
                let e = euler_su2(&u, &m, &o).unwrap();
                assert!((0.0..=PI).contains(&e.b));
                assert!(distance(&e.reconstruct(&m, &o), &u) < TOL);
            }
        }
    }

    #[test]
    fn euler_gimbal_lock() {
        for (o, m) in axis_pairs() {
            for t in [0.0, 0.3, -1.1, PI] {
                // Commutes with the outer axis: middle angle 0.
                let u = exp_i(t, &o).scale(C64::from_polar(1.0, 0.7));
                let e = euler_su2(&u, &m, &o).unwrap();
                assert!(e.b.abs() < 1e-9 && e.c == 0.0);
                assert!(distance(&e.reconstruct(&m, &o), &u) < TOL);

                // Middle angle π.
                let u = exp_i(t, &o) * m.scale(I);
                let e = euler_su2(&u, &m, &o).unwrap();
                assert!((e.b - PI).abs() < 1e-9 && e.c == 0.0);
                assert!(distance(&e.reconstruct(&m, &o), &u) < TOL);
            }
        }
    }

    #[test]
    fn euler_examples() {
        let e = euler_su2(&Mat2::identity(), &pauli(2), &pauli(3)).unwrap();
        assert_eq!((e.delta, e.a, e.b, e.c), (0.0, 0.0, 0.0, 0.0));
        let e = euler_su2(&exp_i(FRAC_PI_4, &pauli(3)), &pauli(2), &pauli(3)).unwrap();
        assert!(e.delta.abs() < 1e-15 && (e.a - FRAC_PI_2).abs() < 1e-15 && e.b == 0.0 && e.c == 0.0);
        let q = crate::elements::qwp(PI / 3.0);
        let e = euler_su2(&q, &pauli(2), &pauli(3)).unwrap();
        assert!(distance(&e.reconstruct(&pauli(2), &pauli(3)), &q) < TOL);
    }

    #[test]
    fn euler_rejects_bad_input() {
        let u = Mat2::identity();
        assert_eq!(euler_su2(&u, &pauli(1), &pauli(1)), Err(Error::InvalidAxes));
        assert_eq!(euler_su2(&u, &pauli(1).scale(I), &pauli(3)), Err(Error::InvalidAxes));
        assert_eq!(euler_su2(&u, &(pauli(1) + pauli(3)), &pauli(2)), Err(Error::InvalidAxes));
        let not_unitary = Mat2::diag([ONE, C64::new(0.5, 0.0)]);
        assert!(matches!(euler_su2(&not_unitary, &pauli(2), &pauli(3)), Err(Error::NotUnitary { .. })));
        let nan = Mat2::diag([ONE, C64::new(f64::NAN, 0.0)]);
        assert_eq!(euler_su2(&nan, &pauli(2), &pauli(3)), Err(Error::NonFinite));
    }

    #[test]
    fn spatial_examples() {
        let cfg = compile_spatial(&Mat2::identity()).unwrap();
        assert!(distance(&assemble_mz(&cfg), &Mat2::identity()) < TOL);
        for u in [pauli(1), pauli(2), pauli(3), crate::elements::beam_splitter()] {
            assert!(distance(&assemble_mz(&compile_spatial(&u).unwrap()), &u) < TOL);
        }
        let mut rng = rng_from_seed(5);
        for _ in 0..500 {
            let u: Mat2 = haar_unitary(&mut rng);
            assert!(distance(&assemble_mz(&compile_spatial(&u).unwrap()), &u) < TOL);
        }
    }

    #[test]
    fn polarization_examples() {
        for t in [-FRAC_PI_2, -1.0, -0.25, 0.0] {
            let v = Mat2::diag([C64::from_polar(1.0, -t), C64::from_polar(1.0, t)]);
            let s = compile_polarization(&v).unwrap();
            assert!((s.alpha.radians() - FRAC_PI_4).abs() < 1e-12);
            assert!((s.gamma.radians() - FRAC_PI_4).abs() < 1e-12);
            let expected = crate::elements::WavePlateAngle::new(t / 2.0 - FRAC_PI_4).radians();
            assert!((s.beta.radians() - expected).abs() < 1e-12);
            assert!(distance(&station_unitary(&s), &v) < TOL);
        }
        let mut rng = rng_from_seed(6);
        for _ in 0..500 {
            let v: Mat2 = haar_unitary(&mut rng);
            assert!(distance(&station_unitary(&compile_polarization(&v).unwrap()), &v) < TOL);
        }
    }

    fn special_gates() -> Vec<Mat4> {
        let h = (pauli(1) + pauli(3)).scale(C64::new(FRAC_1_SQRT_2, 0.0));
        let half = C64::new(0.5, 0.0);
        let swap = (Mat4::identity() + tau_sigma(1, 1) + tau_sigma(2, 2) + tau_sigma(3, 3)).scale(half);
        let cnot = (Mat4::identity() + tau_sigma(3, 0) + tau_sigma(0, 1) - tau_sigma(3, 1)).scale(half);
        vec![
            Mat4::identity(),
            Mat4::identity().scale(C64::from_polar(1.0, 2.1)),
            swap,
            cnot,
            kron(&h, &h),
            kron(&pauli(1), &Mat2::identity()),
            kron(&pauli(2), &pauli(3)),
            kron(&Mat2::identity(), &pauli(1)),
            kron(&h, &Mat2::identity()),
            (Mat4::identity() - tau_sigma(2, 1).scale(I)).scale(C64::new(FRAC_1_SQRT_2, 0.0)),
            Mat4::from_blocks(&Mat2::diag([ONE, ZERO]), &Mat2::diag([ZERO, ONE]), &Mat2::diag([ZERO, ONE]), &Mat2::diag([ONE, ZERO])),
        ]
    }

    fn check_frame(s: &Mat4) {
        let f = singular_frame(s).unwrap();
        for m in [f.psi, f.psi_bar, f.chi, f.chi_bar] {
            assert!(is_unitary(&m, 1e-10));
        }
        for t in f.theta {
            assert!((0.0..=FRAC_PI_2).contains(&t));
        }
        assert!(f.cos_angles()[0] >= f.cos_angles()[1] - 1e-12);
        assert!(distance(&f.blocks().to_mat4(), s) < TOL);
        let g = f.gates();
        assert!(distance(&g.assemble().unwrap(), s) < TOL);
        assert!(distance(&assemble_two_qubit(&compile_two_qubit(s).unwrap()), s) < 1e-9);
    }

    #[test]
    fn frame_of_structured_gates() {
        for s in special_gates() {
            check_frame(&s);
        }
    }

    #[test]
    fn frame_of_haar_gates() {
        let mut rng = rng_from_seed(8);
        for _ in 0..300 {
            check_frame(&haar_unitary(&mut rng));
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let s = Mat4::identity().scale(C64::new(1.1, 0.0));
        assert!(matches!(compile_two_qubit(&s), Err(Error::NotUnitary { .. })));
    }

    /// The 16 station angles reach every direction of U(4) at a generic point.
    #[test]
    fn settings_map_has_full_rank() {
        let mut rng = rng_from_seed(21);
        let cfg = random_setup(&mut rng);
        let params = |c: &SetupConfig| -> [f64; 16] {
            let mut out = [0.0; 16];
            for (i, s) in [c.entry, c.exit, c.arm_r, c.arm_l].iter().enumerate() {
                out[4 * i..4 * i + 4].copy_from_slice(&[s.phase.radians(), s.alpha.radians(), s.beta.radians(), s.gamma.radians()]);
            }
            out
        };
        let build = |p: &[f64; 16]| {
            let st = |i: usize| StationConfig::new(p[4 * i], p[4 * i + 1], p[4 * i + 2], p[4 * i + 3]);
            assemble_two_qubit(&SetupConfig { entry: st(0), exit: st(1), arm_r: st(2), arm_l: st(3) })
        };
        let base = params(&cfg);
        let h = 1e-6;
        let mut jac = nalgebra::DMatrix::<f64>::zeros(32, 16);
        for k in 0..16 {
            let (mut up, mut down) = (base, base);
            up[k] += h;
            down[k] -= h;
            let (a, b) = (build(&up), build(&down));
            for i in 0..4 {
                for j in 0..4 {
                    let d = (a[(i, j)] - b[(i, j)]) / (2.0 * h);
                    jac[(8 * i + 2 * j, k)] = d.re;
                    jac[(8 * i + 2 * j + 1, k)] = d.im;
                }
            }
        }
        let sv = jac.singular_values();
        assert!(sv.iter().all(|&x| x > 1e-4), "{sv}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn compile_inverts_assembly(seed in any::<u64>()) {
            let cfg = random_setup(&mut rng_from_seed(seed));
            let s = assemble_two_qubit(&cfg);
            let back = assemble_two_qubit(&compile_two_qubit(&s).unwrap());
            prop_assert!(distance(&back, &s) < 1e-9);
        }

        #[test]
        fn spatial_round_trip(x in prop::array::uniform4(-PI..PI)) {
            let cfg = MZConfig { phi1: x[0].into(), phi2: x[1].into(), vphi1: x[2].into(), vphi2: x[3].into() };
            let u = assemble_mz(&cfg);
            prop_assert!(distance(&assemble_mz(&compile_spatial(&u).unwrap()), &u) < TOL);
        }
    }
}
