//! Forward model: builds the unitary of the spatial Mach-Zehnder gate and of
//! the full two-qubit interferometer from their physical settings, and splits
//! a two-qubit operator into its spatial blocks.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::elements::{
    beam_splitter, branch_projector, mirror_pair, phase_shifter, pol_triple, PhaseAngle, Port,
    WavePlateAngle,
};
use crate::error::Result;
use crate::numkernel::{kron, pauli, Mat2, Mat4, C64, DEFAULT_TOL, I};

/// Phase shifters of the spatial-only interferometer: `phi1`/`phi2` in the
/// R entry/exit ports, `vphi1`/`vphi2` inside the R and L arms.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MZConfig {
    pub phi1: PhaseAngle,
    pub phi2: PhaseAngle,
    pub vphi1: PhaseAngle,
    pub vphi2: PhaseAngle,
}

/// One phase shifter followed by a QWP–HWP–QWP triple.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationConfig {
    pub phase: PhaseAngle,
    pub alpha: WavePlateAngle,
    pub beta: WavePlateAngle,
    pub gamma: WavePlateAngle,
}

impl StationConfig {
    pub fn new(phase: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            phase: phase.into(),
            alpha: alpha.into(),
            beta: beta.into(),
            gamma: gamma.into(),
        }
    }

    /// A station acting as the scalar e^{i·phase}: the wave plates are set to
    /// (0, π/2, 0) so that the outer QWPs undo each other around the HWP.
    pub fn scalar(phase: f64) -> Self {
        Self::new(phase, 0.0, std::f64::consts::FRAC_PI_2, 0.0)
    }

    /// e^{i·phase}·hwp(θ), realized as (θ + π/2, θ, θ).
    pub fn half_wave(theta: f64, phase: f64) -> Self {
        Self::new(phase, theta + std::f64::consts::FRAC_PI_2, theta, theta)
    }

    /// e^{i·phase}·qwp(second)·qwp(first), realized as
    /// (first, second, second + π/2).
    pub fn quarter_waves(first: f64, second: f64, phase: f64) -> Self {
        Self::new(phase, first, second, second + std::f64::consts::FRAC_PI_2)
    }
}

/// The four stations of the two-qubit gate. The L entry and exit ports carry
/// no elements.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupConfig {
    /// R entry port (V₁).
    pub entry: StationConfig,
    /// R exit port (V₂).
    pub exit: StationConfig,
    /// Inside the R arm (V_R).
    pub arm_r: StationConfig,
    /// Inside the L arm (V_L).
    pub arm_l: StationConfig,
}

/// The four polarization operators that characterize a two-qubit setup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationGates {
    pub v1: Mat2,
    pub v2: Mat2,
    pub vr: Mat2,
    pub vl: Mat2,
}

impl SetupConfig {
    pub fn polarization_gates(&self) -> PolarizationGates {
        PolarizationGates {
            v1: station_unitary(&self.entry),
            v2: station_unitary(&self.exit),
            vr: station_unitary(&self.arm_r),
            vl: station_unitary(&self.arm_l),
        }
    }
}

pub fn assemble_mz(cfg: &MZConfig) -> Mat2 {
    phase_shifter(Port::R, cfg.phi2)
        * beam_splitter()
        * phase_shifter(Port::R, cfg.vphi1)
        * phase_shifter(Port::L, cfg.vphi2)
        * mirror_pair()
        * beam_splitter()
        * phase_shifter(Port::R, cfg.phi1)
}

pub fn station_unitary(s: &StationConfig) -> Mat2 {
    pol_triple(s.alpha, s.beta, s.gamma).scale(s.phase.phasor())
}

/// τ†τ ⊗ on_r + ττ† ⊗ on_l
pub fn branch_operator(on_r: &Mat2, on_l: &Mat2) -> Mat4 {
    kron(&branch_projector(Port::R), on_r) + kron(&branch_projector(Port::L), on_l)
}

/// Full product of elementary factors, in the order the photon meets them.
pub fn assemble_two_qubit(cfg: &SetupConfig) -> Mat4 {
    let v = cfg.polarization_gates();
    let one = Mat2::identity();
    let bs = kron(&beam_splitter(), &one);
    let mirrors = kron(&mirror_pair(), &one);
    branch_operator(&v.v2, &one)
        * bs
        * branch_operator(&v.vr, &v.vl)
        * mirrors
        * bs
        * branch_operator(&v.v1, &one)
}

/// The two-qubit gate from its polarization operators through the closed
/// block formulas.
pub fn assemble_from_vs(v1: &Mat2, v2: &Mat2, vr: &Mat2, vl: &Mat2) -> Result<Mat4> {
    for v in [v1, v2, vr, vl] {
        v.require_unitary(DEFAULT_TOL)?;
    }
    let half = C64::new(0.5, 0.0);
    let sum = *vr + *vl;
    let diff = *vr - *vl;
    let rr = (*v2 * sum * *v1).scale(half);
    let ll = sum.scale(half);
    let rl = (*v2 * diff).scale(-half * I);
    let lr = (diff * *v1).scale(half * I);
    Ok(Mat4::from_blocks(&rr, &rl, &lr, &ll))
}

impl PolarizationGates {
    pub fn assemble(&self) -> Result<Mat4> {
        assemble_from_vs(&self.v1, &self.v2, &self.vr, &self.vl)
    }
}

/// Spatial blocks of a two-qubit operator; `lr` carries amplitude from the
/// R input to the L output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blocks {
    pub rr: Mat2,
    pub rl: Mat2,
    pub lr: Mat2,
    pub ll: Mat2,
}

impl Blocks {
    pub fn to_mat4(&self) -> Mat4 {
        Mat4::from_blocks(&self.rr, &self.rl, &self.lr, &self.ll)
    }
}

pub fn blocks(s: &Mat4) -> Blocks {
    Blocks {
        rr: s.block(0, 0),
        rl: s.block(0, 1),
        lr: s.block(1, 0),
        ll: s.block(1, 1),
    }
}

/// Closed form of a beam splitter dressed with polarization gates:
/// 2^{−1/2}(τ†τ⊗R₂R₁ + ττ†⊗L₂L₁ + iτ⊗L₂R₁ + iτ†⊗R₂L₁), where R₁/L₁ sit in
/// the input ports and R₂/L₂ in the output ports.
pub fn bs_halfgate(r1: &Mat2, r2: &Mat2, l1: &Mat2, l2: &Mat2) -> Result<Mat4> {
    for v in [r1, r2, l1, l2] {
        v.require_unitary(DEFAULT_TOL)?;
    }
    let k = C64::new(FRAC_1_SQRT_2, 0.0);
    let tau = Mat2::from_rows([[C64::new(0.0, 0.0); 2], [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]]);
    let sum = kron(&branch_projector(Port::R), &(*r2 * *r1))
        + kron(&branch_projector(Port::L), &(*l2 * *l1))
        + kron(&tau.scale(I), &(*l2 * *r1))
        + kron(&tau.adjoint().scale(I), &(*r2 * *l1));
    Ok(sum.scale(k))
}

/// Polarization gates in the four ports around one beam splitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsPlacement {
    pub r_in: Mat2,
    pub l_in: Mat2,
    pub r_out: Mat2,
    pub l_out: Mat2,
}

impl BsPlacement {
    /// Propagates through input gates, the beam splitter, then output gates.
    pub fn unitary(&self) -> Mat4 {
        branch_operator(&self.r_out, &self.l_out)
            * kron(&beam_splitter(), &Mat2::identity())
            * branch_operator(&self.r_in, &self.l_in)
    }
}

/// The five equivalent ways of dressing a beam splitter: all four ports
/// occupied, or one input / output port left empty with its gate pushed
/// through the beam splitter into the opposite side.
pub fn equivalent_placements(r1: &Mat2, r2: &Mat2, l1: &Mat2, l2: &Mat2) -> [BsPlacement; 5] {
    let one = Mat2::identity();
    [
        BsPlacement { r_in: *r1, l_in: *l1, r_out: *r2, l_out: *l2 },
        // empty L input
        BsPlacement { r_in: l1.adjoint() * *r1, l_in: one, r_out: *r2 * *l1, l_out: *l2 * *l1 },
        // empty R input
        BsPlacement { r_in: one, l_in: r1.adjoint() * *l1, r_out: *r2 * *r1, l_out: *l2 * *r1 },
        // empty L output
        BsPlacement { r_in: *l2 * *r1, l_in: *l2 * *l1, r_out: *r2 * l2.adjoint(), l_out: one },
        // empty R output
        BsPlacement { r_in: *r2 * *r1, l_in: *r2 * *l1, r_out: one, l_out: *l2 * r2.adjoint() },
    ]
}

/// Lifts a spatial gate to the full space, leaving polarization untouched.
pub fn spatial_only(u: &Mat2) -> Mat4 {
    kron(u, &pauli(0))
}
