//! The elementary optical toolbox as single-photon mode operators.
//!
//! Every element acts as the identity on modes whose path is not one of its
//! ports, and treats polarization as a spectator. Beamsplitters and phase
//! shifters never touch the winding number; the odd number of reflections
//! inside a symmetric multiport is modeled once per multiport (see
//! [`crate::multiport`]).
//!
//! Counter-propagation is handled by [`Element::reversed`], which returns the
//! transposed (reciprocal) element. For a Dove prism this negates the
//! rotation, matching the opposite rotation angle seen by a photon traveling
//! right to left.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::state::{Image, ModeLabel, ModeOperator, ModeSpace};
use crate::{Error, Result};

/// Propagation direction through a device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

/// An elementary optical element. Angles are in radians.
///
/// The serialized form is the netlist element schema: an object tagged by
/// `"type"` with floats written to 17 significant digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Element {
    /// `|l>_p -> e^{i phi} |l>_p`.
    #[serde(rename = "phase")]
    PhaseShifter {
        port: usize,
        #[serde(serialize_with = "float17::serialize")]
        phi: f64,
    },
    /// Mixes paths `ports[0]` (A) and `ports[1]` (B) with
    /// `[[cos t, i e^{i phi} sin t], [i e^{-i phi} sin t, cos t]]`.
    #[serde(rename = "beamsplitter")]
    BeamSplitter {
        ports: [usize; 2],
        #[serde(serialize_with = "float17::serialize")]
        theta: f64,
        #[serde(serialize_with = "float17::serialize")]
        phi: f64,
    },
    /// `|l> -> |-l>` with unit phase.
    Mirror { port: usize },
    /// `|l> -> e^{-i alpha l} |-l>`. `alpha` is twice the physical prism
    /// rotation angle.
    #[serde(rename = "dove")]
    DovePrism {
        port: usize,
        #[serde(serialize_with = "float17::serialize")]
        alpha: f64,
    },
    /// `|l> -> |l + k>`.
    Hologram { port: usize, k: i64 },
    /// Mirror combined with a hologram: `|l> -> |-l - k>`, sending the photon
    /// back the way it came.
    ReflectiveHologram { port: usize, k: i64 },
}

impl Element {
    pub fn ports(&self) -> &[usize] {
        match self {
            Element::BeamSplitter { ports, .. } => ports,
            Element::PhaseShifter { port, .. }
            | Element::Mirror { port }
            | Element::DovePrism { port, .. }
            | Element::Hologram { port, .. }
            | Element::ReflectiveHologram { port, .. } => std::slice::from_ref(port),
        }
    }

    /// Checks ports against a network of dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        for &p in self.ports() {
            if p >= d {
                return Err(Error::domain(format!(
                    "element port {p} outside network dimension {d}"
                )));
            }
        }
        if let Element::BeamSplitter { ports: [a, b], .. } = self {
            if a == b {
                return Err(Error::domain(format!(
                    "beamsplitter ports must differ, got {a} twice"
                )));
            }
        }
        Ok(())
    }

    /// The element as seen by a counter-propagating photon (its transpose).
    pub fn reversed(&self) -> Element {
        match *self {
            Element::BeamSplitter { ports, theta, phi } => Element::BeamSplitter {
                ports,
                theta,
                phi: -phi,
            },
            Element::DovePrism { port, alpha } => Element::DovePrism {
                port,
                alpha: -alpha,
            },
            Element::Hologram { port, k } => Element::Hologram { port, k: -k },
            ref other => other.clone(),
        }
    }

    pub fn oriented(&self, direction: Direction) -> Element {
        match direction {
            Direction::Forward => self.clone(),
            Direction::Reverse => self.reversed(),
        }
    }

    /// 2x2 block of a beamsplitter in `(A, B)` order.
    pub fn beamsplitter_block(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
        let (s, c) = theta.sin_cos();
        let cos = Complex64::new(c, 0.0);
        [
            [cos, Complex64::from_polar(s, phi + FRAC_PI_2)],
            [Complex64::from_polar(s, -phi + FRAC_PI_2), cos],
        ]
    }
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl ModeOperator for Element {
    fn map_mode(&self, mode: ModeLabel, space: &ModeSpace) -> Result<Image> {
        self.validate(space.dimension())?;
        if !self.ports().contains(&mode.path) {
            return Ok(vec![(mode, unit())]);
        }
        let image = match *self {
            Element::PhaseShifter { phi, .. } => vec![(mode, Complex64::from_polar(1.0, phi))],
            Element::BeamSplitter {
                ports: [a, b],
                theta,
                phi,
            } => {
                let block = Element::beamsplitter_block(theta, phi);
                let col = usize::from(mode.path == b);
                vec![
                    (mode.with_path(a), block[0][col]),
                    (mode.with_path(b), block[1][col]),
                ]
            }
            Element::Mirror { .. } => vec![(mode.with_oam(-mode.oam), unit())],
            Element::DovePrism { alpha, .. } => {
                vec![(
                    mode.with_oam(-mode.oam),
                    Complex64::from_polar(1.0, -alpha * mode.oam as f64),
                )]
            }
            Element::Hologram { k, .. } => vec![(mode.with_oam(mode.oam + k), unit())],
            Element::ReflectiveHologram { k, .. } => vec![(mode.with_oam(-mode.oam - k), unit())],
        };
        Ok(image)
    }
}

/// Applies `element` in the given propagation direction.
pub fn apply_element<S: crate::state::QuantumState>(
    state: &S,
    element: &Element,
    direction: Direction,
) -> Result<S> {
    state.apply(&element.oriented(direction))
}

/// `%.17g`-style float formatting: 17 significant digits, trailing zeros
/// trimmed, exponent form outside `[1e-4, 1e17)`. Round-trips every finite
/// double exactly.
pub mod float17 {
    use serde::Serializer;
    use serde_json::value::RawValue;

    pub fn format(x: f64) -> String {
        if x == 0.0 {
            return if x.is_sign_negative() {
                "-0".into()
            } else {
                "0".into()
            };
        }
        let sci = format!("{x:.16e}");
        let (mantissa, exp) = sci.split_once('e').expect("exponent form");
        let exp: i32 = exp.parse().expect("integer exponent");
        if (-4..17).contains(&exp) {
            let decimals = (16 - exp).max(0) as usize;
            trim(format!("{x:.decimals$}"))
        } else {
            let sign = if exp < 0 { '-' } else { '+' };
            format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
        }
    }

    fn trim(s: String) -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if !x.is_finite() {
            return Err(serde::ser::Error::custom("non-finite float in netlist"));
        }
        let raw = RawValue::from_string(format(*x)).map_err(serde::ser::Error::custom)?;
        serde::Serialize::serialize(&raw, s)
    }
}
