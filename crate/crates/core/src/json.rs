//! JSON formats for matrices, states, setups and reports.
//!
//! Numbers are written with 17 significant digits in exponent form, so
//! output bytes depend only on the values and round-trip exactly.

use std::collections::BTreeMap;
use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::measure::{DensityMat, PauliCoefficients, TomographyResult};
use crate::numkernel::{Mat, StateVec, C64};
use crate::protocols::VaaTranscript;

#[derive(Clone, Copy, Debug, Default)]
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // -0 prints as 0
        let v = if value == 0.0 { 0.0 } else { value };
        write!(writer, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with the fixed number format.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value.serialize(&mut ser).expect("in-memory serialization of plain data");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// {"dim": N, "rows": [[[re, im], ...], ...]}
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl<const N: usize> From<&Mat<N>> for MatrixJson {
    fn from(m: &Mat<N>) -> Self {
        MatrixJson {
            dim: N,
            rows: m.rows().iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_mat<const N: usize>(&self) -> Result<Mat<N>> {
        if self.dim != N {
            return Err(Error::Dimension { expected: N, found: self.dim });
        }
        if self.rows.len() != N {
            return Err(Error::Dimension { expected: N, found: self.rows.len() });
        }
        let mut m = Mat::<N>::zeros();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != N {
                return Err(Error::Dimension { expected: N, found: row.len() });
            }
            for (j, [re, im]) in row.iter().enumerate() {
                m[(i, j)] = C64::new(*re, *im);
            }
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }
}

pub fn matrix_to_json<const N: usize>(m: &Mat<N>) -> String {
    to_json_string(&MatrixJson::from(m))
}

pub fn matrix_from_json<const N: usize>(text: &str) -> Result<Mat<N>> {
    parse::<MatrixJson>(text)?.to_mat()
}

/// {"amps": [[re, im], ...]}, normalized on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub amps: Vec<[f64; 2]>,
}

pub fn state_to_json(s: &StateVec) -> String {
    to_json_string(&StateJson { amps: s.amps().iter().map(|z| [z.re, z.im]).collect() })
}

pub fn state_from_json(text: &str) -> Result<StateVec> {
    let raw: StateJson = parse(text)?;
    if raw.amps.len() != 4 {
        return Err(Error::Dimension { expected: 4, found: raw.amps.len() });
    }
    let mut amps = [C64::new(0.0, 0.0); 4];
    for (a, [re, im]) in amps.iter_mut().zip(&raw.amps) {
        *a = C64::new(*re, *im);
    }
    StateVec::new(amps)
}

/// Density operators use the matrix format and are validated on load.
pub fn density_from_json(text: &str) -> Result<DensityMat> {
    DensityMat::new(matrix_from_json::<4>(text)?)
}

/// Setup and interferometer configurations; angles may be numbers (radians)
/// or strings with a unit suffix.
pub fn config_from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    parse(text)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographyReport {
    /// Keyed "t{j}s{k}" for τ_j σ_k.
    pub coefficients: BTreeMap<String, f64>,
    pub rho: MatrixJson,
    pub positive: bool,
    pub shots: u64,
    pub seed: u64,
}

pub fn coefficient_map(c: &PauliCoefficients) -> BTreeMap<String, f64> {
    c.iter().map(|((j, k), v)| (PauliCoefficients::key(j, k), v)).collect()
}

impl TomographyReport {
    pub fn new(result: &TomographyResult, shots: u64, seed: u64) -> Self {
        TomographyReport {
            coefficients: coefficient_map(&result.coefficients),
            rho: MatrixJson::from(result.rho.matrix()),
            positive: result.rho.is_positive(1e-10),
            shots,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VaaTranscriptJson {
    pub measurement: String,
    pub outcome: i8,
    pub detector: String,
    pub inferred: i8,
    pub consistent: bool,
    pub seed: u64,
}

impl From<&VaaTranscript> for VaaTranscriptJson {
    fn from(t: &VaaTranscript) -> Self {
        VaaTranscriptJson {
            measurement: t.measurement.axis.to_string(),
            outcome: t.measurement.outcome.value(),
            detector: t.detector.to_string(),
            inferred: t.inferred.value(),
            consistent: t.consistent,
            seed: t.seed,
        }
    }
}
