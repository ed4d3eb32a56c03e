//! Multiport devices: the symmetric multiport, the Dove stage and the OAM
//! beamsplitter built from them, in both transit directions.
//!
//! The symmetric multiport has the DFT-type scattering matrix
//! `S[n][m] = e^{i 2 pi n m / D} / sqrt(D)` and flips the winding number of
//! every photon that crosses it (an odd number of internal reflections). The
//! Dove stage carries a prism with `alpha = 2 pi n / D` on port `n`. The OAM
//! beamsplitter is `S, DP, S` and sends `|l>_n` to `|-l>_{(-l-n) mod D}`;
//! traversed right to left the Dove phases conjugate and the map becomes
//! `|l>_n -> |-l>_{(l-n) mod D}`, the inverse of the forward map.

mod netlist;

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::elements::{Direction, Element};
use crate::linalg::CMatrix;
use crate::state::{Image, ModeLabel, ModeOperator, ModeSpace, Polarization};
use crate::{Error, Result, PRUNE_THRESHOLD};

pub use crate::linalg::{is_generalized_permutation, PermutationEntry};
pub use netlist::{
    netlist_apply, oambs_netlist, reck_decompose, symmetric_netlist, Netlist, NetlistMetadata,
};

/// `e^{i 2 pi r / d}` with `r` reduced modulo `d` first.
fn root_of_unity(r: i64, d: usize) -> Complex64 {
    let r = r.rem_euclid(d as i64);
    Complex64::from_polar(1.0, TAU * r as f64 / d as f64)
}

/// The `D x D` symmetric multiport matrix.
pub fn symmetric_matrix(d: usize) -> Result<CMatrix> {
    if d == 0 {
        return Err(Error::domain("symmetric multiport needs D >= 1"));
    }
    let scale = 1.0 / (d as f64).sqrt();
    Ok(CMatrix::from_shape_fn((d, d), |(n, m)| {
        root_of_unity((n * m) as i64, d) * scale
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetricMultiport {
    pub dimension: usize,
    /// Aggregate `l -> -l` on transit.
    pub parity_flip: bool,
}

impl SymmetricMultiport {
    pub fn new(dimension: usize) -> Self {
        SymmetricMultiport {
            dimension,
            parity_flip: true,
        }
    }

    pub fn matrix(&self) -> Result<CMatrix> {
        symmetric_matrix(self.dimension)
    }
}

impl ModeOperator for SymmetricMultiport {
    fn map_mode(&self, mode: ModeLabel, _space: &ModeSpace) -> Result<Image> {
        let d = self.dimension;
        let oam = if self.parity_flip {
            -mode.oam
        } else {
            mode.oam
        };
        let scale = 1.0 / (d as f64).sqrt();
        Ok((0..d)
            .map(|m| {
                let amp = root_of_unity((mode.path * m) as i64, d) * scale;
                (ModeLabel::new(m, oam, mode.pol), amp)
            })
            .collect())
    }
}

/// One Dove prism per port, `alpha_n = 2 pi n / D`. Forward transit maps
/// `|l>_n -> e^{-i 2 pi l n / D} |-l>_n`; reverse transit conjugates the phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoveStage {
    pub dimension: usize,
    pub direction: Direction,
}

impl DoveStage {
    pub fn alpha(&self, port: usize) -> f64 {
        TAU * port as f64 / self.dimension as f64
    }

    /// The stage as individual prisms.
    pub fn elements(&self) -> Vec<Element> {
        (0..self.dimension)
            .map(|port| {
                Element::DovePrism {
                    port,
                    alpha: self.alpha(port),
                }
                .oriented(self.direction)
            })
            .collect()
    }
}

impl ModeOperator for DoveStage {
    fn map_mode(&self, mode: ModeLabel, _space: &ModeSpace) -> Result<Image> {
        let sign = match self.direction {
            Direction::Forward => -1,
            Direction::Reverse => 1,
        };
        let phase = root_of_unity(sign * mode.oam * mode.path as i64, self.dimension);
        Ok(vec![(mode.with_oam(-mode.oam), phase)])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stage {
    Symmetric(SymmetricMultiport),
    Dove(DoveStage),
    Element(Element),
}

impl ModeOperator for Stage {
    fn map_mode(&self, mode: ModeLabel, space: &ModeSpace) -> Result<Image> {
        match self {
            Stage::Symmetric(s) => s.map_mode(mode, space),
            Stage::Dove(d) => d.map_mode(mode, space),
            Stage::Element(e) => e.map_mode(mode, space),
        }
    }
}

/// An ordered chain of stages sharing one dimension, applied first to last.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeDevice {
    dimension: usize,
    stages: Vec<Stage>,
}

impl CompositeDevice {
    pub fn new(dimension: usize, stages: Vec<Stage>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::domain("device dimension must be at least 1"));
        }
        for stage in &stages {
            match stage {
                Stage::Symmetric(s) if s.dimension != dimension => {
                    return Err(Error::domain("symmetric multiport dimension mismatch"))
                }
                Stage::Dove(d) if d.dimension != dimension => {
                    return Err(Error::domain("Dove stage dimension mismatch"))
                }
                Stage::Element(e) => e.validate(dimension)?,
                _ => {}
            }
        }
        Ok(CompositeDevice { dimension, stages })
    }

    pub fn identity(dimension: usize) -> Result<Self> {
        CompositeDevice::new(dimension, Vec::new())
    }

    /// Forward OAM beamsplitter `S, DP, S`.
    pub fn oambs(dimension: usize) -> Result<Self> {
        Self::oam_core(dimension, Direction::Forward)
    }

    /// The OAM beamsplitter traversed right to left: `S, DP^dag, S`.
    pub fn sbmao(dimension: usize) -> Result<Self> {
        Self::oam_core(dimension, Direction::Reverse)
    }

    fn oam_core(dimension: usize, direction: Direction) -> Result<Self> {
        let s = Stage::Symmetric(SymmetricMultiport::new(dimension));
        CompositeDevice::new(
            dimension,
            vec![
                s.clone(),
                Stage::Dove(DoveStage {
                    dimension,
                    direction,
                }),
                s,
            ],
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// `self` followed by `next`.
    pub fn then(mut self, next: &CompositeDevice) -> Result<Self> {
        if next.dimension != self.dimension {
            return Err(Error::domain("cannot chain devices of different dimension"));
        }
        self.stages.extend(next.stages.iter().cloned());
        Ok(self)
    }

    pub fn with_elements(mut self, elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        for e in elements {
            e.validate(self.dimension)?;
            self.stages.push(Stage::Element(e));
        }
        Ok(self)
    }

    /// A device made only of elements.
    pub fn from_elements(
        dimension: usize,
        elements: impl IntoIterator<Item = Element>,
    ) -> Result<Self> {
        CompositeDevice::identity(dimension)?.with_elements(elements)
    }
}

/// Pushes a sparse image through `op`, merging equal modes.
pub(crate) fn push_image<O: ModeOperator + ?Sized>(
    image: Image,
    op: &O,
    space: &ModeSpace,
) -> Result<Image> {
    let mut acc: Vec<(ModeLabel, Complex64)> = Vec::new();
    let mut slot: HashMap<ModeLabel, usize> = HashMap::new();
    for (mode, amp) in image {
        for (m, a) in op.map_mode(mode, space)? {
            let i = *slot.entry(m).or_insert_with(|| {
                acc.push((m, Complex64::new(0.0, 0.0)));
                acc.len() - 1
            });
            acc[i].1 += amp * a;
        }
    }
    acc.retain(|(_, a)| a.norm() > PRUNE_THRESHOLD);
    Ok(acc)
}

impl ModeOperator for CompositeDevice {
    fn map_mode(&self, mode: ModeLabel, space: &ModeSpace) -> Result<Image> {
        if space.dimension() != self.dimension {
            return Err(Error::domain(format!(
                "device of dimension {} applied in a space of dimension {}",
                self.dimension,
                space.dimension()
            )));
        }
        let mut image = vec![(mode, Complex64::new(1.0, 0.0))];
        for stage in &self.stages {
            image = push_image(image, stage, space)?;
        }
        Ok(image)
    }
}

/// Closed-form OAM beamsplitter map for `|l>_n`: forward gives
/// `(-l, (-l-n) mod D)`, reverse gives `(-l, (l-n) mod D)`, each with unit
/// amplitude.
pub fn oambs_closed_form(oam: i64, path: usize, d: usize, direction: Direction) -> (i64, usize) {
    let d = d as i64;
    let n = path as i64;
    let out = match direction {
        Direction::Forward => (-oam - n).rem_euclid(d),
        Direction::Reverse => (oam - n).rem_euclid(d),
    };
    (-oam, out as usize)
}

/// An enumerated mode basis in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    modes: Vec<ModeLabel>,
    index: HashMap<ModeLabel, usize>,
}

impl Basis {
    pub fn new(dimension: usize, oam_values: &[i64], pols: &[Polarization]) -> Self {
        let mut modes = Vec::new();
        for path in 0..dimension {
            for &oam in oam_values {
                for &pol in pols {
                    modes.push(ModeLabel::new(path, oam, pol));
                }
            }
        }
        Basis::from_modes(modes)
    }

    pub fn from_modes(mut modes: Vec<ModeLabel>) -> Self {
        modes.sort();
        modes.dedup();
        let index = modes.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Basis { modes, index }
    }

    /// One H-polarized, `l = 0` mode per path.
    pub fn paths(dimension: usize) -> Self {
        Basis::new(dimension, &[0], &[Polarization::H])
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn index_of(&self, mode: &ModeLabel) -> Option<usize> {
        self.index.get(mode).copied()
    }
}

/// `l` in `[-(D-1), D-1]`.
pub fn default_oam_values(dimension: usize) -> Vec<i64> {
    let top = dimension as i64 - 1;
    (-top..=top).collect()
}

/// Matrix of `op` on `basis` (column `j` is the image of mode `j`). Errors if
/// any image leaves the basis.
pub fn operator_matrix<O: ModeOperator + ?Sized>(
    op: &O,
    basis: &Basis,
    space: &ModeSpace,
) -> Result<CMatrix> {
    let mut m = CMatrix::zeros((basis.len(), basis.len()));
    for (col, &mode) in basis.modes().iter().enumerate() {
        for (out, amp) in op.map_mode(mode, space)? {
            if amp.norm() <= PRUNE_THRESHOLD {
                continue;
            }
            let row = basis
                .index_of(&out)
                .ok_or(Error::BasisNotClosed { mode: out })?;
            m[[row, col]] += amp;
        }
    }
    Ok(m)
}

fn space_for(dimension: usize, oam_values: &[i64]) -> Result<ModeSpace> {
    let widest = oam_values.iter().map(|l| l.abs()).max().unwrap_or(0);
    ModeSpace::with_window(dimension, widest.max(4 * dimension as i64))
}

/// Explicit matrix of `device` over paths x `oam_values` x {H, V}, as the
/// product of its stage matrices. `oam_values` must be closed under negation.
pub fn device_matrix(device: &CompositeDevice, oam_values: &[i64]) -> Result<(Basis, CMatrix)> {
    for l in oam_values {
        if !oam_values.contains(&-l) {
            return Err(Error::domain(format!(
                "OAM basis contains {l} but not {}",
                -l
            )));
        }
    }
    let d = device.dimension();
    let basis = Basis::new(d, oam_values, &Polarization::ALL);
    let space = space_for(d, oam_values)?;
    let n = basis.len();
    let mut total = CMatrix::eye(n);
    for stage in device.stages() {
        // stage matrices are sparse; multiply column images instead of dense products
        let stage_m = operator_matrix(stage, &basis, &space)?;
        let columns: Vec<Vec<(usize, Complex64)>> = (0..n)
            .map(|k| {
                let col = stage_m.column(k);
                (0..n)
                    .filter(|&r| col[r] != Complex64::new(0.0, 0.0))
                    .map(|r| (r, col[r]))
                    .collect()
            })
            .collect();
        let mut next = CMatrix::zeros((n, n));
        for j in 0..n {
            for (k, image) in columns.iter().enumerate() {
                let t = total[[k, j]];
                if t == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for &(r, a) in image {
                    next[[r, j]] += a * t;
                }
            }
        }
        total = next;
    }
    Ok((basis, total))
}

/// [`operator_matrix`] for any operator over paths x `oam_values` x {H, V}.
pub fn mode_matrix<O: ModeOperator + ?Sized>(
    op: &O,
    dimension: usize,
    oam_values: &[i64],
) -> Result<(Basis, CMatrix)> {
    let basis = Basis::new(dimension, oam_values, &Polarization::ALL);
    let space = space_for(dimension, oam_values)?;
    let m = operator_matrix(op, &basis, &space)?;
    Ok((basis, m))
}
