//! Scripted experiments: four-item search with a single oracle call, and
//! the three-stage retrodiction game in which one party infers the result
//! of any of three complementary polarization measurements.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;

use crate::assembly::StationConfig;
use crate::error::{Error, Result};
use crate::gates::{basis, gate, BasisName, GateName};
use crate::measure::{sample_counts_with, Detector};
use crate::numkernel::{eig_hermitian_2x2, kron, pauli, Mat2, StateVec, C64, I, ONE, ZERO};
use crate::random::rng_from_seed;
use crate::synth::compile_polarization;

const ZERO_PROB: f64 = 1e-9;

/// Selects oracle G_k, k = 1..=4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroverOracleId(u8);

impl GroverOracleId {
    pub fn new(k: usize) -> Result<Self> {
        GateName::grover_oracle(k)?;
        Ok(Self(k as u8))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// Detection probabilities after Walsh-Hadamard, the oracle and the
/// decoding gate, starting from |Rv⟩.
pub fn grover_probabilities(k: GroverOracleId) -> [f64; 4] {
    let oracle = gate(GateName::grover_oracle(k.get()).expect("validated id"));
    let s = gate(GateName::GroverSg) * oracle * gate(GateName::WalshHadamard);
    StateVec::basis(0).apply(&s).probabilities()
}

/// The detector that clicks; the outcome is certain.
pub fn grover_run(k: GroverOracleId) -> Detector {
    let p = grover_probabilities(k);
    let best = (0..4).max_by(|&a, &b| p[a].total_cmp(&p[b])).expect("four outcomes");
    Detector::from_index(best).expect("index below 4")
}

/// Which Pauli operator is measured on the second photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VaaAxis {
    Sigma1,
    Sigma2,
    Sigma3,
}

impl VaaAxis {
    pub const ALL: [VaaAxis; 3] = [VaaAxis::Sigma1, VaaAxis::Sigma2, VaaAxis::Sigma3];

    /// 1, 2 or 3.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn operator(self) -> Mat2 {
        pauli(self.index())
    }
}

impl fmt::Display for VaaAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma{}", self.index())
    }
}

impl FromStr for VaaAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let digit = t.strip_prefix("sigma").or_else(|| t.strip_prefix('σ')).unwrap_or(&t);
        match digit {
            "1" => Ok(VaaAxis::Sigma1),
            "2" => Ok(VaaAxis::Sigma2),
            "3" => Ok(VaaAxis::Sigma3),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("expected +1 or -1, got `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VaaMeasurement {
    pub axis: VaaAxis,
    pub outcome: Sign,
}

impl VaaMeasurement {
    pub fn all() -> impl Iterator<Item = VaaMeasurement> {
        VaaAxis::ALL
            .into_iter()
            .flat_map(|axis| [Sign::Plus, Sign::Minus].map(|outcome| VaaMeasurement { axis, outcome }))
    }
}

/// Outcome of the final measurement in the VAA basis f₁..f₄.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VaaDetector {
    F1,
    F2,
    F3,
    F4,
}

impl VaaDetector {
    pub const ALL: [VaaDetector; 4] = [VaaDetector::F1, VaaDetector::F2, VaaDetector::F3, VaaDetector::F4];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for VaaDetector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.index() + 1)
    }
}

/// State of the first photon after the measurement and its polarization record.
pub fn vaa_prepare(m: VaaMeasurement) -> StateVec {
    let h = C64::new(0.5, 0.0);
    let s = C64::new(m.outcome.value() as f64, 0.0);
    let amps = match m.axis {
        VaaAxis::Sigma1 => [h, s * h, s * h, h],
        VaaAxis::Sigma2 => [h, s * h * I, -s * h * I, h],
        VaaAxis::Sigma3 => match m.outcome {
            Sign::Plus => [ONE, ZERO, ZERO, ZERO],
            Sign::Minus => [ZERO, ZERO, ZERO, ONE],
        },
    };
    StateVec::new(amps).expect("unit norm")
}

/// Eigenvector of the measured axis for the given outcome.
fn detected_polarization(m: VaaMeasurement) -> [C64; 2] {
    let eig = eig_hermitian_2x2(&m.axis.operator()).expect("Pauli matrices are Hermitian");
    eig.vectors.column(match m.outcome {
        Sign::Plus => 0,
        Sign::Minus => 1,
    })
}

/// Polarization unitary that turns v into the detected polarization.
pub fn vaa_record_unitary(m: VaaMeasurement) -> Mat2 {
    let w = detected_polarization(m);
    Mat2::from_columns([w, [-w[1].conj(), w[0].conj()]])
}

/// Wave-plate settings for the polarization record.
pub fn vaa_record_settings(m: VaaMeasurement) -> Result<StationConfig> {
    compile_polarization(&vaa_record_unitary(m))
}

/// The first stage followed by the second, computed from the entangled pair:
/// (Rv ⊗ v + Lv ⊗ h)/√2 for photon 1 ⊗ photon 2, projection of photon 2 onto
/// the detected polarization, then the record rewrite on photon 1.
pub fn vaa_stage_one(m: VaaMeasurement) -> StateVec {
    let w = detected_polarization(m);
    // ⟨w|v⟩ and ⟨w|h⟩
    let (on_v, on_h) = (w[0].conj(), w[1].conj());
    let conditional = [on_v, ZERO, on_h, ZERO];
    let photon1 = StateVec::new(conditional).expect("each outcome has probability one half");
    photon1.apply(&kron(&Mat2::identity(), &vaa_record_unitary(m)))
}

/// |⟨f_j|state⟩|² over the VAA basis.
pub fn vaa_probabilities(state: &StateVec) -> [f64; 4] {
    let f = basis(BasisName::Vaa);
    [0, 1, 2, 3].map(|j| f[j].inner(state).norm_sqr())
}

/// For each detector and axis, the only outcome compatible with a click.
fn inference_table() -> &'static [[Sign; 3]; 4] {
    static TABLE: OnceLock<[[Sign; 3]; 4]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[Sign::Plus; 3]; 4];
        for (j, row) in table.iter_mut().enumerate() {
            for axis in VaaAxis::ALL {
                let possible: Vec<Sign> = [Sign::Plus, Sign::Minus]
                    .into_iter()
                    .filter(|&outcome| vaa_probabilities(&vaa_prepare(VaaMeasurement { axis, outcome }))[j] > ZERO_PROB)
                    .collect();
                assert_eq!(possible.len(), 1, "detector f{} with {axis} is ambiguous", j + 1);
                row[axis.index() - 1] = possible[0];
            }
        }
        table
    })
}

pub fn vaa_infer(detector: VaaDetector, axis: VaaAxis) -> Sign {
    inference_table()[detector.index()][axis.index() - 1]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VaaTranscript {
    pub measurement: VaaMeasurement,
    pub prepared_state: StateVec,
    pub detector: VaaDetector,
    pub inferred: Sign,
    pub consistent: bool,
    pub seed: u64,
}

fn finish_run<R: Rng + ?Sized>(m: VaaMeasurement, rng: &mut R, seed: u64) -> Result<VaaTranscript> {
    let prepared_state = vaa_prepare(m);
    let counts = sample_counts_with(&vaa_probabilities(&prepared_state), 1, rng)?;
    let j = counts.counts.iter().position(|&c| c == 1).expect("one shot recorded");
    let detector = VaaDetector::ALL[j];
    let inferred = vaa_infer(detector, m.axis);
    Ok(VaaTranscript { measurement: m, prepared_state, detector, inferred, consistent: inferred == m.outcome, seed })
}

/// Random axis, random outcome, sampled final detector.
pub fn vaa_full_run(seed: u64) -> Result<VaaTranscript> {
    let mut rng = rng_from_seed(seed);
    let axis = VaaAxis::ALL[rng.random_range(0..3)];
    // The pair is maximally entangled, so every axis gives ±1 with probability ½.
    let outcome = if rng.random::<f64>() < 0.5 { Sign::Plus } else { Sign::Minus };
    finish_run(VaaMeasurement { axis, outcome }, &mut rng, seed)
}

/// Fixed measurement and outcome; only the final detector is sampled.
pub fn vaa_run_with(m: VaaMeasurement, seed: u64) -> Result<VaaTranscript> {
    finish_run(m, &mut rng_from_seed(seed), seed)
}
