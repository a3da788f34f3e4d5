//! Fixed-size complex linear algebra for the 2×2 polarization / spatial
//! operators and the 4×4 two-qubit operators.
//!
//! Basis conventions: a [`Mat2`] acts on (v, h) for polarization or (R, L)
//! for the spatial alternative. A [`Mat4`] acts on (Rv, Rh, Lv, Lh), i.e. the
//! spatial index is the slow one, so `kron(spatial, polarization)` has entry
//! `[2i+k][2j+l] = spatial[i][j] * polarization[k][l]`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default tolerance on Frobenius norms.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Dense N×N complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const N: usize> {
    rows: [[C64; N]; N],
}

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Mat<N> {
    pub const fn from_rows(rows: [[C64; N]; N]) -> Self {
        Self { rows }
    }

    /// Builds a matrix from real entries.
    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.rows[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    pub const fn zeros() -> Self {
        Self { rows: [[ZERO; N]; N] }
    }

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    /// `c` times the identity.
    pub fn scalar(c: C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.rows[i][i] = c;
        }
        m
    }

    pub fn diag(entries: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, e) in entries.into_iter().enumerate() {
            m.rows[i][i] = e;
        }
        m
    }

    /// Matrix whose k-th column is `cols[k]`.
    pub fn from_columns(cols: [[C64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.rows[i][j] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> &[[C64; N]; N] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> [C64; N] {
        std::array::from_fn(|i| self.rows[i][j])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.rows[j][i] = self.rows[i][j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.rows[i][i]).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.rows.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut m = *self;
        m.rows.iter_mut().flatten().for_each(|z| *z *= c);
        m
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        std::array::from_fn(|i| (0..N).map(|j| self.rows[i][j] * v[j]).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖m†m − 1‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        distance(&(self.adjoint() * *self), &Self::identity())
    }

    /// ‖m − m†‖_F.
    pub fn hermiticity_defect(&self) -> f64 {
        distance(self, &self.adjoint())
    }

    pub(crate) fn require_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_defect();
        if deviation <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.rows[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.rows[i][j]
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.rows[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.rows[i][j] += a * rhs.rows[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Mul<Mat<N>> for C64 {
    type Output = Mat<N>;
    fn mul(self, rhs: Mat<N>) -> Mat<N> {
        rhs.scale(self)
    }
}

impl<const N: usize> Mul<Mat<N>> for f64 {
    type Output = Mat<N>;
    fn mul(self, rhs: Mat<N>) -> Mat<N> {
        rhs.scale(C64::new(self, 0.0))
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.rows.iter_mut().flatten().zip(rhs.rows.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.rows.iter_mut().flatten().zip(rhs.rows.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mat4 {
    /// The 2×2 polarization block coupling spatial input `col` to spatial
    /// output `row` (0 = R, 1 = L).
    pub fn block(&self, row: usize, col: usize) -> Mat2 {
        let mut b = Mat2::zeros();
        for k in 0..2 {
            for l in 0..2 {
                b.rows[k][l] = self.rows[2 * row + k][2 * col + l];
            }
        }
        b
    }

    /// Inverse of [`Mat4::block`]: `[[rr, rl], [lr, ll]]`.
    pub fn from_blocks(rr: &Mat2, rl: &Mat2, lr: &Mat2, ll: &Mat2) -> Self {
        let mut m = Self::zeros();
        for (bi, bj, b) in [(0, 0, rr), (0, 1, rl), (1, 0, lr), (1, 1, ll)] {
            for k in 0..2 {
                for l in 0..2 {
                    m.rows[2 * bi + k][2 * bj + l] = b.rows[k][l];
                }
            }
        }
        m
    }
}

/// Tensor product with the spatial factor as the slow index.
pub fn kron(spatial: &Mat2, polarization: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.rows[2 * i + k][2 * j + l] = spatial.rows[i][j] * polarization.rows[k][l];
                }
            }
        }
    }
    m
}

const PAULI: [Mat2; 4] = [
    Mat2::from_rows([[ONE, ZERO], [ZERO, ONE]]),
    Mat2::from_rows([[ZERO, ONE], [ONE, ZERO]]),
    Mat2::from_rows([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]),
    Mat2::from_rows([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]),
];

/// Pauli matrix by index, 0 being the identity. Panics on an index above 3;
/// use [`pauli_tau`] / [`pauli_sigma`] for checked access.
pub(crate) fn pauli(k: usize) -> Mat2 {
    PAULI[k]
}

fn checked_pauli(k: usize) -> Result<Mat2> {
    PAULI.get(k).copied().ok_or(Error::IndexOutOfRange { index: k, expected: "0..=3" })
}

/// Spatial Pauli operator τ_k in (R, L) order; τ_0 is the identity.
pub fn pauli_tau(k: usize) -> Result<Mat2> {
    checked_pauli(k)
}

/// Polarization Pauli operator σ_k in (v, h) order; σ_0 is the identity.
pub fn pauli_sigma(k: usize) -> Result<Mat2> {
    checked_pauli(k)
}

/// The two-qubit product τ_j σ_k.
pub fn tau_sigma(j: usize, k: usize) -> Mat4 {
    kron(&pauli(j), &pauli(k))
}

/// exp(i·angle·axis) for an involution `axis` (axis² = 1).
pub fn exp_i(angle: f64, axis: &Mat2) -> Mat2 {
    Mat2::scalar(C64::new(angle.cos(), 0.0)) + axis.scale(C64::new(0.0, angle.sin()))
}

pub fn is_unitary<const N: usize>(m: &Mat<N>, tol: f64) -> bool {
    m.unitarity_defect() <= tol
}

/// Closest unitary in Frobenius norm: U·V† from the SVD m = U Σ V†.
pub fn nearest_unitary<const N: usize>(m: &Mat<N>) -> Result<Mat<N>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let a = nalgebra::DMatrix::<C64>::from_fn(N, N, |i, j| m[(i, j)]);
    let svd = a.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NotUnitary { deviation: m.unitarity_defect() }),
    };
    let q = u * v_t;
    let mut out = Mat::<N>::zeros();
    for i in 0..N {
        for j in 0..N {
            out[(i, j)] = q[(i, j)];
        }
    }
    Ok(out)
}

pub fn is_hermitian<const N: usize>(m: &Mat<N>, tol: f64) -> bool {
    m.hermiticity_defect() <= tol
}

/// Frobenius distance ‖a − b‖_F.
pub fn distance<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> f64 {
    (*a - *b).frobenius_norm()
}

/// min over φ of ‖a − e^{iφ} b‖_F, i.e. sqrt(‖a‖² + ‖b‖² − 2|tr(a†b)|).
///
/// Evaluated at the optimal phase rather than through the closed form, which
/// cancels catastrophically when a ≈ b.
pub fn dist_up_to_phase<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> f64 {
    let overlap = (b.adjoint() * *a).trace();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    distance(a, &b.scale(phase))
}

/// Eigen-decomposition of a Hermitian 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEigen2 {
    /// Descending.
    pub values: [f64; 2],
    /// Column k is the eigenvector of `values[k]`.
    pub vectors: Mat2,
}

/// Phase convention for eigenvectors: the largest-magnitude component is
/// made real positive (ties go to the first component).
pub(crate) fn fix_phase(v: [C64; 2]) -> [C64; 2] {
    let pivot = if v[1].norm() > v[0].norm() + 1e-12 { v[1] } else { v[0] };
    if pivot.norm() == 0.0 {
        return v;
    }
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase, v[1] * phase]
}

pub(crate) fn normalize2(v: [C64; 2]) -> [C64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Unit vector orthogonal to the unit vector `v`.
pub(crate) fn orthogonal2(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

pub fn eig_hermitian_2x2(h: &Mat2) -> Result<HermitianEigen2> {
    let deviation = h.hermiticity_defect();
    if deviation > DEFAULT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b.norm());
    let (hi, lo) = (mean + radius, mean - radius);

    if distance(h, &Mat2::scalar(C64::new(hi, 0.0))) <= DEFAULT_TOL {
        return Ok(HermitianEigen2 { values: [hi, lo], vectors: Mat2::identity() });
    }

    // Null vectors of (h − hi) read off either row; keep the better conditioned.
    let from_row0 = [b, C64::new(hi - a, 0.0)];
    let from_row1 = [C64::new(hi - d, 0.0), b.conj()];
    let norm0 = from_row0[0].norm_sqr() + from_row0[1].norm_sqr();
    let norm1 = from_row1[0].norm_sqr() + from_row1[1].norm_sqr();
    let top = normalize2(if norm0 >= norm1 { from_row0 } else { from_row1 });
    let bottom = orthogonal2(top);

    Ok(HermitianEigen2 {
        values: [hi, lo],
        vectors: Mat2::from_columns([fix_phase(top), fix_phase(bottom)]),
    })
}

/// Pure two-qubit state with amplitudes in (Rv, Rh, Lv, Lh) order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVec {
    amps: [C64; 4],
}

impl StateVec {
    /// Normalizes `amps`; fails on the zero vector or non-finite entries.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        if amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { amps: amps.map(|z| z / norm) })
    }

    /// Standard basis state `k` (0 = Rv, 1 = Rh, 2 = Lv, 3 = Lh).
    pub fn basis(k: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[k] = ONE;
        Self { amps }
    }

    pub fn amps(&self) -> &[C64; 4] {
        &self.amps
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVec) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `m|self⟩`; renormalized to absorb rounding.
    pub fn apply(&self, m: &Mat4) -> StateVec {
        StateVec::new(m.mul_vec(&self.amps)).unwrap_or(*self)
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.amps.map(|z| z.norm_sqr())
    }

    /// |self⟩⟨self|.
    pub fn projector(&self) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        m
    }

    /// 1 − |⟨a|b⟩|², zero iff the states agree up to a global phase.
    pub fn infidelity(&self, other: &StateVec) -> f64 {
        (1.0 - self.inner(other).norm_sqr()).max(0.0)
    }
}
