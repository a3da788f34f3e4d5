//! Unitaries of the individual optical elements: beam splitter, mirror pair,
//! phase shifters and wave plates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numkernel::{pauli, Mat2, C64, I, ONE, ZERO};

/// Maps `x` into (−period/2, period/2].
fn wrap(x: f64, period: f64) -> f64 {
    let mut y = x.rem_euclid(period);
    if y > 0.5 * period {
        y -= period;
    }
    y
}

/// Orientation of a wave plate's major axis from vertical, in radians,
/// normalized to (−π/2, π/2]. Wave-plate action has period π.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct WavePlateAngle(f64);

impl WavePlateAngle {
    pub fn new(theta: f64) -> Self {
        Self(wrap(theta, PI))
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<f64> for WavePlateAngle {
    fn from(theta: f64) -> Self {
        Self::new(theta)
    }
}

/// Phase of a phase shifter in radians, normalized to (−π, π].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct PhaseAngle(f64);

impl PhaseAngle {
    pub fn new(phi: f64) -> Self {
        Self(wrap(phi, 2.0 * PI))
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// e^{iφ}
    pub fn phasor(self) -> C64 {
        C64::from_polar(1.0, self.0)
    }
}

impl From<f64> for PhaseAngle {
    fn from(phi: f64) -> Self {
        Self::new(phi)
    }
}

/// Parses an angle given either as plain radians or with an explicit unit
/// suffix: `"45deg"`, `"45°"`, `"0.25rad"`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim();
    let (number, degrees) = if let Some(n) = t.strip_suffix("deg").or_else(|| t.strip_suffix('°')) {
        (n, true)
    } else if let Some(n) = t.strip_suffix("rad") {
        (n, false)
    } else {
        (t, false)
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid angle `{text}`")))?;
    if !value.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(if degrees { value.to_radians() } else { value })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Number(f64),
    Text(String),
}

fn deserialize_radians<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let value = match AngleRepr::deserialize(d)? {
        AngleRepr::Number(x) => x,
        AngleRepr::Text(s) => parse_angle(&s).map_err(serde::de::Error::custom)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(serde::de::Error::custom("angle must be finite"))
    }
}

macro_rules! angle_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_f64(self.0)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                deserialize_radians(d).map(<$ty>::new)
            }
        }
    };
}

angle_serde!(WavePlateAngle);
angle_serde!(PhaseAngle);

/// Spatial branch of the interferometer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Port {
    R,
    L,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::R => "R",
            Port::L => "L",
        })
    }
}

impl FromStr for Port {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(Port::R),
            "L" | "l" => Ok(Port::L),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

/// Projector onto one spatial branch: τ†τ for R, ττ† for L.
pub fn branch_projector(port: Port) -> Mat2 {
    match port {
        Port::R => Mat2::diag([ONE, ZERO]),
        Port::L => Mat2::diag([ZERO, ONE]),
    }
}

/// Symmetric beam splitter, (1 + iτ₁)/√2.
pub fn beam_splitter() -> Mat2 {
    (Mat2::identity() + pauli(1).scale(I)).scale(C64::new(FRAC_1_SQRT_2, 0.0))
}

/// Both interferometer mirrors together, −iτ₁. The −i makes
/// beam splitter · mirrors · beam splitter the identity.
pub fn mirror_pair() -> Mat2 {
    pauli(1).scale(-I)
}

pub fn phase_shifter(port: Port, phi: impl Into<PhaseAngle>) -> Mat2 {
    let p = phi.into().phasor();
    match port {
        Port::R => Mat2::diag([p, ONE]),
        Port::L => Mat2::diag([ONE, p]),
    }
}

/// Quarter-wave plate, (1 − iσ₁ sin2θ − iσ₃ cos2θ)/√2.
pub fn qwp(theta: impl Into<WavePlateAngle>) -> Mat2 {
    let two_theta = 2.0 * theta.into().radians();
    let (s, c) = two_theta.sin_cos();
    let k = FRAC_1_SQRT_2;
    Mat2::from_rows([
        [C64::new(k, -k * c), C64::new(0.0, -k * s)],
        [C64::new(0.0, -k * s), C64::new(k, k * c)],
    ])
}

/// Half-wave plate, −i(σ₁ sin2θ + σ₃ cos2θ); equal to qwp(θ)².
pub fn hwp(theta: impl Into<WavePlateAngle>) -> Mat2 {
    let two_theta = 2.0 * theta.into().radians();
    let (s, c) = two_theta.sin_cos();
    Mat2::from_rows([[C64::new(0.0, -c), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(0.0, c)]])
}

/// The QWP–HWP–QWP sequence: qwp(γ)·hwp(β)·qwp(α), α being traversed first.
pub fn pol_triple(
    alpha: impl Into<WavePlateAngle>,
    beta: impl Into<WavePlateAngle>,
    gamma: impl Into<WavePlateAngle>,
) -> Mat2 {
    qwp(gamma) * hwp(beta) * qwp(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{distance, exp_i, is_unitary};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    const TOL: f64 = 1e-12;

    #[test]
    fn angle_normalization() {
        assert_eq!(WavePlateAngle::new(FRAC_PI_2).radians(), FRAC_PI_2);
        assert!((WavePlateAngle::new(-FRAC_PI_2).radians() - FRAC_PI_2).abs() < 1e-15);
        assert!((WavePlateAngle::new(PI + 0.1).radians() - 0.1).abs() < 1e-15);
        assert_eq!(PhaseAngle::new(PI).radians(), PI);
        assert!((PhaseAngle::new(-PI).radians() - PI).abs() < 1e-15);
        assert!((PhaseAngle::new(3.0 * PI + 0.5).radians() - (0.5 - PI)).abs() < 1e-14);
    }

    #[test]
    fn angle_parsing() {
        assert!((parse_angle("45deg").unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("90°").unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(parse_angle("0.5rad").unwrap(), 0.5);
        assert_eq!(parse_angle(" 1.25 ").unwrap(), 1.25);
        assert!(parse_angle("fourty").is_err());
        assert_eq!(parse_angle("inf"), Err(Error::NonFinite));
    }

    #[test]
    fn beam_splitter_examples() {
        let bs = beam_splitter();
        let k = FRAC_1_SQRT_2;
        let expected = Mat2::from_rows([[C64::new(k, 0.0), C64::new(0.0, k)], [C64::new(0.0, k), C64::new(k, 0.0)]]);
        assert!(distance(&bs, &expected) < 1e-15);
        assert!(distance(&(bs * bs), &pauli(1).scale(I)) < TOL);
        assert!(is_unitary(&bs, TOL));
    }

    #[test]
    fn mirror_examples() {
        let m = mirror_pair();
        assert_eq!(m, Mat2::from_rows([[ZERO, -I], [-I, ZERO]]));
        assert!(distance(&(beam_splitter() * m * beam_splitter()), &Mat2::identity()) < TOL);
        assert!(distance(&(m * m), &-Mat2::identity()) < TOL);
    }

    #[test]
    fn phase_shifter_examples() {
        assert!(distance(&phase_shifter(Port::R, 0.0), &Mat2::identity()) < TOL);
        assert!(distance(&phase_shifter(Port::R, PI), &Mat2::diag([-ONE, ONE])) < TOL);
        assert!(distance(&phase_shifter(Port::L, FRAC_PI_2), &Mat2::diag([ONE, I])) < TOL);
    }

    #[test]
    fn wave_plate_examples() {
        let k = FRAC_1_SQRT_2;
        assert!(distance(&qwp(0.0), &Mat2::diag([C64::new(k, -k), C64::new(k, k)])) < TOL);
        let q45 = (Mat2::identity() - pauli(1).scale(I)).scale(C64::new(k, 0.0));
        assert!(distance(&qwp(FRAC_PI_4), &q45) < TOL);
        assert!(distance(&hwp(0.0), &Mat2::diag([-I, I])) < TOL);
        assert!(distance(&hwp(FRAC_PI_4), &pauli(1).scale(-I)) < TOL);
    }

    #[test]
    fn triple_examples() {
        let a = 0.37;
        assert!(distance(&pol_triple(a, a + FRAC_PI_2, a), &Mat2::identity()) < TOL);
        assert!(distance(&pol_triple(a, a - FRAC_PI_2, a), &Mat2::identity()) < TOL);
        assert!(distance(&pol_triple(a, a, a), &-Mat2::identity()) < TOL);
        for vt in [-1.3, -0.2, 0.0, 0.8, 2.9] {
            let shifter = Mat2::diag([C64::from_polar(1.0, -vt), C64::from_polar(1.0, vt)]);
            assert!(distance(&pol_triple(FRAC_PI_4, vt / 2.0 - FRAC_PI_4, FRAC_PI_4), &shifter) < TOL);
        }
    }

    fn angle() -> impl Strategy<Value = f64> {
        -10.0f64..10.0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn constructors_are_unitary(t in angle(), p in angle()) {
            prop_assert!(is_unitary(&qwp(t), TOL));
            prop_assert!(is_unitary(&hwp(t), TOL));
            prop_assert!(is_unitary(&phase_shifter(Port::R, p), TOL));
            prop_assert!(is_unitary(&phase_shifter(Port::L, p), TOL));
            prop_assert!(is_unitary(&pol_triple(t, p, t - p), TOL));
        }

        #[test]
        fn wave_plates_have_period_pi(t in angle()) {
            prop_assert!(distance(&qwp(t), &qwp(t + PI)) < TOL);
            prop_assert!(distance(&hwp(t), &hwp(t + PI)) < TOL);
        }

        #[test]
        fn quarter_wave_inverse(t in angle()) {
            prop_assert!(distance(&(qwp(t) * qwp(t + FRAC_PI_2)), &Mat2::identity()) < TOL);
        }

        #[test]
        fn half_wave_is_squared_quarter_wave(t in angle()) {
            prop_assert!(distance(&hwp(t), &(qwp(t) * qwp(t))) < TOL);
            prop_assert!(distance(&(hwp(t) * hwp(t)), &-Mat2::identity()) < TOL);
        }

        #[test]
        fn triple_matches_euler_form(a in angle(), b in angle(), g in angle()) {
            let euler = exp_i(-(g + 3.0 * FRAC_PI_4), &pauli(2))
                * exp_i(a - 2.0 * b + g, &pauli(3))
                * exp_i(a - FRAC_PI_4, &pauli(2));
            prop_assert!(distance(&pol_triple(a, b, g), &euler) < TOL);
        }
    }
}
