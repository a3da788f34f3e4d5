//! Named two-qubit gates, their hand-derived optical settings, measurement
//! bases and the A, B observable pairs that label them.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::assembly::{branch_operator as branch, SetupConfig, StationConfig};
use crate::error::{Error, Result};
use crate::numkernel::{kron, pauli, tau_sigma, Mat2, Mat4, StateVec, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateName {
    CnotTauSigma,
    CnotSigmaTau,
    Swap,
    WalshHadamard,
    Bell,
    GroverG1,
    GroverG2,
    GroverG3,
    GroverG4,
    GroverSg,
    Vaa,
    Tomo1,
    Tomo2,
    Tomo3,
    Tomo4,
    Tomo5,
}

impl GateName {
    pub const ALL: [GateName; 16] = [
        GateName::CnotTauSigma,
        GateName::CnotSigmaTau,
        GateName::Swap,
        GateName::WalshHadamard,
        GateName::Bell,
        GateName::GroverG1,
        GateName::GroverG2,
        GateName::GroverG3,
        GateName::GroverG4,
        GateName::GroverSg,
        GateName::Vaa,
        GateName::Tomo1,
        GateName::Tomo2,
        GateName::Tomo3,
        GateName::Tomo4,
        GateName::Tomo5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::CnotTauSigma => "cnot-tau-sigma",
            GateName::CnotSigmaTau => "cnot-sigma-tau",
            GateName::Swap => "swap",
            GateName::WalshHadamard => "walsh-hadamard",
            GateName::Bell => "bell",
            GateName::GroverG1 => "grover-g1",
            GateName::GroverG2 => "grover-g2",
            GateName::GroverG3 => "grover-g3",
            GateName::GroverG4 => "grover-g4",
            GateName::GroverSg => "grover-sg",
            GateName::Vaa => "vaa",
            GateName::Tomo1 => "tomo-1",
            GateName::Tomo2 => "tomo-2",
            GateName::Tomo3 => "tomo-3",
            GateName::Tomo4 => "tomo-4",
            GateName::Tomo5 => "tomo-5",
        }
    }

    /// Measurement gate for row `k` (1..=5) of the tomography pairs.
    pub fn tomography(k: usize) -> Result<GateName> {
        const ROWS: [GateName; 5] =
            [GateName::Tomo1, GateName::Tomo2, GateName::Tomo3, GateName::Tomo4, GateName::Tomo5];
        k.checked_sub(1)
            .and_then(|i| ROWS.get(i).copied())
            .ok_or(Error::IndexOutOfRange { index: k, expected: "1..=5" })
    }

    /// Oracle G_k (k = 1..=4) of the four-item search.
    pub fn grover_oracle(k: usize) -> Result<GateName> {
        const ORACLES: [GateName; 4] =
            [GateName::GroverG1, GateName::GroverG2, GateName::GroverG3, GateName::GroverG4];
        k.checked_sub(1)
            .and_then(|i| ORACLES.get(i).copied())
            .ok_or(Error::IndexOutOfRange { index: k, expected: "1..=4" })
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace('_', "-");
        GateName::ALL
            .into_iter()
            .find(|g| g.as_str() == wanted)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// A gate that can be looked up by name.
pub trait NamedGate: Send + Sync {
    fn name(&self) -> GateName;
    fn matrix(&self) -> Mat4;
    /// Hand-derived optical settings, if the gate has them.
    fn settings(&self) -> Option<SetupConfig>;
}

/// A gate together with a closed-form optical realization.
struct Realized {
    name: GateName,
    matrix: fn() -> Mat4,
    settings: fn() -> SetupConfig,
}

impl NamedGate for Realized {
    fn name(&self) -> GateName {
        self.name
    }
    fn matrix(&self) -> Mat4 {
        (self.matrix)()
    }
    fn settings(&self) -> Option<SetupConfig> {
        Some((self.settings)())
    }
}

/// Search oracle 1 − 2|k⟩⟨k|; no dedicated settings.
struct GroverOracle {
    name: GateName,
    index: usize,
}

impl NamedGate for GroverOracle {
    fn name(&self) -> GateName {
        self.name
    }
    fn matrix(&self) -> Mat4 {
        let mut m = Mat4::identity();
        m[(self.index, self.index)] = -ONE;
        m
    }
    fn settings(&self) -> Option<SetupConfig> {
        None
    }
}

#[derive(Default)]
pub struct GateRegistry {
    gates: BTreeMap<GateName, Box<dyn NamedGate>>,
}

impl GateRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every built-in gate.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        let realized: [(GateName, fn() -> Mat4, fn() -> SetupConfig); 12] = [
            (GateName::CnotTauSigma, cnot_tau_sigma, settings_cnot_tau_sigma),
            (GateName::CnotSigmaTau, cnot_sigma_tau, settings_cnot_sigma_tau),
            (GateName::Swap, swap, settings_swap),
            (GateName::WalshHadamard, walsh_hadamard, settings_walsh_hadamard),
            (GateName::Bell, bell, settings_bell),
            (GateName::GroverSg, grover_sg, settings_grover_sg),
            (GateName::Vaa, vaa, settings_vaa),
            (GateName::Tomo1, walsh_hadamard, settings_walsh_hadamard),
            (GateName::Tomo2, tomo_2, settings_tomo_2),
            (GateName::Tomo3, Mat4::identity, settings_identity),
            (GateName::Tomo4, tomo_4, settings_tomo_4),
            (GateName::Tomo5, tomo_5, settings_tomo_5),
        ];
        for (name, matrix, settings) in realized {
            r.register(Box::new(Realized { name, matrix, settings }));
        }
        for k in 1..=4 {
            let name = GateName::grover_oracle(k).expect("k in range");
            r.register(Box::new(GroverOracle { name, index: k - 1 }));
        }
        r
    }

    /// Adds a gate, replacing any previous entry of the same name.
    pub fn register(&mut self, gate: Box<dyn NamedGate>) {
        self.gates.insert(gate.name(), gate);
    }

    pub fn get(&self, name: GateName) -> Option<&dyn NamedGate> {
        self.gates.get(&name).map(|g| g.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = GateName> + '_ {
        self.gates.keys().copied()
    }
}

pub fn registry() -> &'static GateRegistry {
    static REGISTRY: OnceLock<GateRegistry> = OnceLock::new();
    REGISTRY.get_or_init(GateRegistry::builtin)
}

fn lookup(name: GateName) -> Result<&'static dyn NamedGate> {
    registry().get(name).ok_or_else(|| Error::UnknownName(name.to_string()))
}

pub fn gate(name: GateName) -> Mat4 {
    lookup(name).map(|g| g.matrix()).expect("builtin registry covers every name")
}

pub fn settings(name: GateName) -> Result<SetupConfig> {
    lookup(name)?.settings().ok_or_else(|| Error::NoSettings(name.to_string()))
}

fn half() -> C64 {
    C64::new(0.5, 0.0)
}

fn cnot_tau_sigma() -> Mat4 {
    branch(&Mat2::identity(), &pauli(1))
}

fn cnot_sigma_tau() -> Mat4 {
    let pv = Mat2::diag([ONE, ZERO]);
    let ph = Mat2::diag([ZERO, ONE]);
    kron(&Mat2::identity(), &pv) + kron(&pauli(1), &ph)
}

fn swap() -> Mat4 {
    (Mat4::identity() + tau_sigma(1, 1) + tau_sigma(2, 2) + tau_sigma(3, 3)).scale(half())
}

fn walsh_hadamard() -> Mat4 {
    let h = pauli(1) + pauli(3);
    kron(&h, &h).scale(half())
}

fn bell() -> Mat4 {
    (Mat4::identity() - tau_sigma(2, 1).scale(I)).scale(C64::new(FRAC_1_SQRT_2, 0.0))
}

fn grover_sg() -> Mat4 {
    (Mat4::identity() - tau_sigma(1, 0) - tau_sigma(0, 1) - tau_sigma(1, 1)).scale(half())
}

/// Σⱼ cⱼ|eⱼ⟩⟨fⱼ| over the VAA basis fⱼ, with c = (i, i, 1, 1).
fn vaa() -> Mat4 {
    let f = basis(BasisName::Vaa);
    let phases = [I, I, ONE, ONE];
    let mut m = Mat4::zeros();
    for (j, fj) in f.iter().enumerate() {
        for k in 0..4 {
            m[(j, k)] = phases[j] * fj.amps()[k].conj();
        }
    }
    m
}

fn tomo_2() -> Mat4 {
    let x = Mat2::identity() - pauli(1).scale(I);
    kron(&x, &x).scale(half())
}

fn tomo_4() -> Mat4 {
    (Mat4::identity() + tau_sigma(2, 0) - tau_sigma(0, 2).scale(I) + tau_sigma(2, 2).scale(I)).scale(half())
}

fn tomo_5() -> Mat4 {
    (Mat4::identity() - (tau_sigma(2, 0) + tau_sigma(1, 1) + tau_sigma(3, 1)).scale(I)).scale(half())
}

/// Station with phase and angles given in units of π/8.
fn eighths(phase: i32, alpha: i32, beta: i32, gamma: i32) -> StationConfig {
    let r = |n: i32| n as f64 * FRAC_PI_8;
    StationConfig::new(r(phase), r(alpha), r(beta), r(gamma))
}

// Stations for the operators that recur in the settings below.
fn one() -> StationConfig {
    eighths(0, 0, 4, 0)
}
fn minus_one() -> StationConfig {
    eighths(0, 0, 0, 0)
}
fn plus_i() -> StationConfig {
    eighths(-4, 0, 0, 0)
}
fn minus_i() -> StationConfig {
    eighths(4, 0, 0, 0)
}
fn sigma1() -> StationConfig {
    eighths(-4, 0, -2, 0)
}

fn setup(entry: StationConfig, exit: StationConfig, arm_r: StationConfig, arm_l: StationConfig) -> SetupConfig {
    SetupConfig { entry, exit, arm_r, arm_l }
}

fn settings_cnot_tau_sigma() -> SetupConfig {
    setup(sigma1(), one(), sigma1(), sigma1())
}

fn settings_cnot_sigma_tau() -> SetupConfig {
    // V_L = σ₃
    setup(minus_i(), plus_i(), one(), eighths(4, -3, 0, -1))
}

fn settings_swap() -> SetupConfig {
    // −iσ₁, iσ₁, 1, −σ₃
    setup(eighths(0, 0, 2, 0), eighths(0, 0, -2, 0), one(), eighths(-4, -3, 0, -1))
}

fn settings_walsh_hadamard() -> SetupConfig {
    // V_R, V_L = −i e^{±iπ/4} hwp(π/8)
    setup(one(), minus_one(), eighths(-2, -2, 1, 0), eighths(2, -2, -3, 0))
}

fn settings_bell() -> SetupConfig {
    // qwp(±π/4) in the arms
    setup(one(), one(), eighths(0, 0, 3, 0), eighths(0, 0, -3, 0))
}

fn settings_grover_sg() -> SetupConfig {
    // V₁ = −i, V₂ = i, V_R = −σ₁, V_L = 1
    setup(minus_i(), plus_i(), eighths(-4, 0, 2, 0), one())
}

/// The commonly quoted realization iV₁ = −iV₂ = −V_L = 1, V_R = σ₁. It
/// assembles to −S_G, which is the same measurement.
pub fn grover_sg_literal_settings() -> SetupConfig {
    setup(minus_i(), plus_i(), sigma1(), minus_one())
}

fn settings_vaa() -> SetupConfig {
    // iσ₁, 1, e^{−iπ/4} qwp(0) qwp(−π/4), qwp(π/4) qwp(0) qwp(−π/4)
    setup(eighths(0, 0, -2, 0), one(), eighths(-2, 2, -2, 0), eighths(0, 0, 3, -2))
}

fn settings_tomo_2() -> SetupConfig {
    // ε(1 − iσ₁) and ε*(1 − iσ₁) in the arms, ε = (1 + i)/2
    setup(plus_i(), minus_i(), eighths(2, 0, 3, 0), eighths(-2, 0, 3, 0))
}

fn settings_identity() -> SetupConfig {
    setup(one(), one(), one(), one())
}

fn settings_tomo_4() -> SetupConfig {
    // V_L = −iσ₂
    setup(one(), one(), one(), eighths(0, 2, 0, -2))
}

fn settings_tomo_5() -> SetupConfig {
    // V_L = iσ₁
    setup(minus_i(), sigma1(), one(), eighths(0, 0, -2, 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisName {
    Standard,
    Bell,
    Vaa,
}

impl FromStr for BasisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(BasisName::Standard),
            "bell" => Ok(BasisName::Bell),
            "vaa" => Ok(BasisName::Vaa),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Rows: VAA states in Bell-state components, read as bras.
pub fn vaa_coefficients() -> Mat4 {
    let (p, m) = (half(), -half());
    let (pi, mi) = (half() * I, -half() * I);
    Mat4::from_rows([[p, mi, p, p], [p, pi, m, p], [m, pi, p, p], [m, mi, m, p]])
}

fn bell_states() -> [StateVec; 4] {
    let k = C64::new(FRAC_1_SQRT_2, 0.0);
    let amps = [[k, ZERO, ZERO, -k], [ZERO, k, -k, ZERO], [ZERO, k, k, ZERO], [k, ZERO, ZERO, k]];
    amps.map(|a| StateVec::new(a).expect("normalized"))
}

pub fn basis(name: BasisName) -> [StateVec; 4] {
    match name {
        BasisName::Standard => [0, 1, 2, 3].map(StateVec::basis),
        BasisName::Bell => bell_states(),
        BasisName::Vaa => {
            let e = bell_states();
            let m = vaa_coefficients();
            [0, 1, 2, 3].map(|j| {
                let mut amps = [ZERO; 4];
                for (k, ek) in e.iter().enumerate() {
                    for (a, x) in amps.iter_mut().zip(ek.amps()) {
                        *a += m[(j, k)].conj() * x;
                    }
                }
                StateVec::new(amps).expect("orthonormal combination")
            })
        }
    }
}

/// Two commuting ±1-valued observables whose joint eigenbasis is measured
/// by one gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservablePair {
    pub a: Mat4,
    pub b: Mat4,
}

impl ObservablePair {
    pub fn ab(&self) -> Mat4 {
        self.a * self.b
    }
}

/// Pauli index pairs (τ_j σ_k) of the tomography observables, rows 1..=5.
pub(crate) const TOMOGRAPHY_PAIRS: [((usize, usize), (usize, usize)); 5] = [
    ((1, 0), (0, 1)),
    ((2, 0), (0, 2)),
    ((3, 0), (0, 3)),
    ((1, 2), (2, 3)),
    ((2, 1), (3, 2)),
];

pub fn observable_pair(k: usize) -> Result<ObservablePair> {
    let ((aj, ak), (bj, bk)) = k
        .checked_sub(1)
        .and_then(|i| TOMOGRAPHY_PAIRS.get(i).copied())
        .ok_or(Error::IndexOutOfRange { index: k, expected: "1..=5" })?;
    Ok(ObservablePair { a: tau_sigma(aj, ak), b: tau_sigma(bj, bk) })
}

/// (A, B, AB) whose joint eigenbasis is the VAA basis.
pub fn vaa_observables() -> (Mat4, Mat4, Mat4) {
    let a = (tau_sigma(3, 0) + tau_sigma(0, 3) + tau_sigma(1, 2) - tau_sigma(2, 1)).scale(half());
    let b = (tau_sigma(1, 0) + tau_sigma(0, 1) - tau_sigma(2, 3) + tau_sigma(3, 2)).scale(half());
    let ab = (-tau_sigma(2, 0) + tau_sigma(0, 2) + tau_sigma(1, 3) + tau_sigma(3, 1)).scale(half());
    (a, b, ab)
}

/// Bell measurement as CNOT (σ controls τ), then swap, then a Hadamard on
/// the spatial qubit.
pub fn alternative_bell_sequence() -> Mat4 {
    let h = (pauli(1) + pauli(3)).scale(C64::new(FRAC_1_SQRT_2, 0.0));
    kron(&h, &Mat2::identity()) * swap() * cnot_sigma_tau()
}
