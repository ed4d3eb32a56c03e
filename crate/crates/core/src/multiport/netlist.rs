//! Element-level netlists and triangular (Reck-style) synthesis.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    default_oam_values, device_matrix, mode_matrix, operator_matrix, Basis, CompositeDevice,
};
use crate::elements::{float17, Direction, Element};
use crate::linalg::{global_phase_distance, unitarity_error, CMatrix};
use crate::state::{Image, ModeLabel, ModeOperator, ModeSpace};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetlistMetadata {
    /// Global-phase replay residual against the synthesis target.
    #[serde(serialize_with = "float17::serialize")]
    pub replay_error: f64,
}

/// An ordered list of elements, replayed first to last. With `parity_flip`
/// a global `l -> -l` is appended after the last element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub dimension: usize,
    pub parity_flip: bool,
    pub elements: Vec<Element>,
    #[serde(default)]
    pub metadata: NetlistMetadata,
}

impl Netlist {
    pub fn new(dimension: usize, parity_flip: bool, elements: Vec<Element>) -> Result<Self> {
        let netlist = Netlist {
            dimension,
            parity_flip,
            elements,
            metadata: NetlistMetadata::default(),
        };
        netlist.validate()?;
        Ok(netlist)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::domain("netlist dimension must be at least 1"));
        }
        self.elements
            .iter()
            .try_for_each(|e| e.validate(self.dimension))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let netlist: Netlist = serde_json::from_str(text)?;
        netlist.validate()?;
        Ok(netlist)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlist floats are finite")
    }

    pub fn beamsplitter_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, Element::BeamSplitter { .. }))
            .count()
    }

    /// The netlist traversed right to left: elements in reverse order, each
    /// transposed. A trailing parity flip becomes a leading mirror layer.
    pub fn reversed(&self) -> Netlist {
        let mut elements = Vec::with_capacity(self.elements.len() + self.dimension);
        if self.parity_flip {
            elements.extend((0..self.dimension).map(|port| Element::Mirror { port }));
        }
        elements.extend(self.elements.iter().rev().map(Element::reversed));
        Netlist {
            dimension: self.dimension,
            parity_flip: false,
            elements,
            metadata: self.metadata.clone(),
        }
    }

    pub fn oriented(&self, direction: Direction) -> Netlist {
        match direction {
            Direction::Forward => self.clone(),
            Direction::Reverse => self.reversed(),
        }
    }

    /// Replayed path unitary (one `l = 0`, H mode per path).
    pub fn path_unitary(&self) -> Result<CMatrix> {
        let space = ModeSpace::new(self.dimension)?;
        operator_matrix(self, &Basis::paths(self.dimension), &space)
    }
}

impl ModeOperator for Netlist {
    fn map_mode(&self, mode: ModeLabel, space: &ModeSpace) -> Result<Image> {
        if space.dimension() != self.dimension {
            return Err(Error::domain(
                "netlist applied in a space of different dimension",
            ));
        }
        let mut image = vec![(mode, Complex64::new(1.0, 0.0))];
        for e in &self.elements {
            image = super::push_image(image, e, space)?;
        }
        if self.parity_flip {
            for (m, _) in image.iter_mut() {
                *m = m.with_oam(-m.oam);
            }
        }
        Ok(image)
    }
}

/// Replays `netlist` on `state`.
pub fn netlist_apply<S: crate::state::QuantumState>(netlist: &Netlist, state: &S) -> Result<S> {
    state.apply(netlist)
}

/// Triangular decomposition of a unitary into beamsplitters and trailing
/// phase shifters.
///
/// Rows are cleared top to bottom, each row right to left: the entry in
/// column `j` is nulled by mixing columns `j-1` and `j` with the adjoint of a
/// beamsplitter, which then appears in the netlist. The leftover diagonal is
/// emitted as one phase shifter per port. The replayed unitary equals
/// `target` up to rounding; `metadata.replay_error` records the residual.
pub fn reck_decompose(target: &CMatrix) -> Result<Netlist> {
    let (rows, cols) = target.dim();
    if rows != cols || rows == 0 {
        return Err(Error::domain(format!(
            "cannot decompose a {rows}x{cols} matrix"
        )));
    }
    let err = unitarity_error(target);
    if err >= 1e-10 {
        return Err(Error::NonUnitary { error: err });
    }
    let d = rows;
    let mut u = target.clone();
    let mut elements = Vec::new();

    for row in 0..d {
        for j in (row + 1..d).rev() {
            let a = u[[row, j - 1]];
            let b = u[[row, j]];
            if b.norm() < 1e-15 {
                continue;
            }
            let theta = b.norm().atan2(a.norm());
            let phi = if a.norm() == 0.0 {
                0.0
            } else {
                b.arg() - a.arg() - FRAC_PI_2
            };
            let block = Element::beamsplitter_block(theta, phi);
            // u <- u * B^dag on columns (j-1, j)
            for r in 0..d {
                let x = u[[r, j - 1]];
                let y = u[[r, j]];
                u[[r, j - 1]] = x * block[0][0].conj() + y * block[0][1].conj();
                u[[r, j]] = x * block[1][0].conj() + y * block[1][1].conj();
            }
            elements.push(Element::BeamSplitter {
                ports: [j - 1, j],
                theta,
                phi,
            });
        }
    }
    elements.extend((0..d).map(|port| Element::PhaseShifter {
        port,
        phi: u[[port, port]].arg(),
    }));

    let mut netlist = Netlist::new(d, false, elements)?;
    netlist.metadata.replay_error = global_phase_distance(&netlist.path_unitary()?, target).error;
    Ok(netlist)
}

/// Triangular netlist of the symmetric multiport, with its aggregate parity flip.
pub fn symmetric_netlist(d: usize) -> Result<Netlist> {
    let mut netlist = reck_decompose(&super::symmetric_matrix(d)?)?;
    netlist.parity_flip = true;
    Ok(netlist)
}

/// The OAM beamsplitter at element level: symmetric-multiport netlist, an
/// explicit mirror layer standing for that multiport's parity flip, the Dove
/// stage (a mirror on port 0, prisms with `alpha = 2 pi n / D` on ports
/// `1..D`), the second symmetric-multiport netlist, and the netlist-level
/// parity flip for the second multiport.
///
/// `metadata.replay_error` is the global-phase residual against the
/// stage-level device over `l` in `[-(D-1), D-1]`.
pub fn oambs_netlist(d: usize) -> Result<Netlist> {
    let s = symmetric_netlist(d)?;
    let mut elements = s.elements.clone();
    elements.extend((0..d).map(|port| Element::Mirror { port }));
    elements.push(Element::Mirror { port: 0 });
    elements.extend((1..d).map(|port| Element::DovePrism {
        port,
        alpha: TAU * port as f64 / d as f64,
    }));
    elements.extend(s.elements.iter().cloned());

    let mut netlist = Netlist::new(d, true, elements)?;
    let values = default_oam_values(d);
    let (_, replayed) = mode_matrix(&netlist, d, &values)?;
    let (_, reference) = device_matrix(&CompositeDevice::oambs(d)?, &values)?;
    netlist.metadata.replay_error = global_phase_distance(&replayed, &reference).error;
    Ok(netlist)
}
