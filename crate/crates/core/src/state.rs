//! Mode space and photon state representations.
//!
//! A photon mode is a [`ModeLabel`]: spatial path, signed OAM winding number
//! and polarization. One-photon states are sparse amplitude maps over mode
//! labels ([`PhotonState`]); few-photon states use distinguishable slots
//! ([`EnsembleState`]), which is exact for devices that act as generalized
//! permutations on mode labels and is rejected for anything else.
//!
//! OAM is kept as a true signed integer. Reduction modulo the network
//! dimension only happens inside routing formulas and in
//! [`PhotonState::oam_residues`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{is_generalized_permutation, CMatrix};
use crate::{Error, Result, PRUNE_THRESHOLD, TOLERANCE};

/// Output tuples that bunch two slots into one mode are an error above this modulus.
pub const BUNCHING_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];
}

/// A single-photon mode. Ordering is lexicographic: path, then OAM, then
/// polarization (H before V), which fixes every basis enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub path: usize,
    pub oam: i64,
    pub pol: Polarization,
}

impl ModeLabel {
    pub const fn new(path: usize, oam: i64, pol: Polarization) -> Self {
        ModeLabel { path, oam, pol }
    }

    pub const fn h(path: usize, oam: i64) -> Self {
        ModeLabel::new(path, oam, Polarization::H)
    }

    pub const fn v(path: usize, oam: i64) -> Self {
        ModeLabel::new(path, oam, Polarization::V)
    }

    pub const fn with_path(self, path: usize) -> Self {
        ModeLabel { path, ..self }
    }

    pub const fn with_oam(self, oam: i64) -> Self {
        ModeLabel { oam, ..self }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}^{:?}>_{}", self.oam, self.pol, self.path)
    }
}

/// Network dimension `D` (paths `0..D`) and the OAM window `[-L, L]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModeSpace {
    dimension: usize,
    oam_window: i64,
}

impl ModeSpace {
    /// Space with the default window `L = 4 D`.
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::domain("network dimension must be at least 1"));
        }
        Ok(ModeSpace {
            dimension,
            oam_window: 4 * dimension as i64,
        })
    }

    pub fn with_window(dimension: usize, oam_window: i64) -> Result<Self> {
        let mut space = ModeSpace::new(dimension)?;
        if oam_window < 0 {
            return Err(Error::domain("OAM window must be non-negative"));
        }
        space.oam_window = oam_window;
        Ok(space)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn oam_window(&self) -> i64 {
        self.oam_window
    }

    pub fn check_path(&self, path: usize) -> Result<()> {
        if path >= self.dimension {
            return Err(Error::domain(format!(
                "path {path} outside network dimension {}",
                self.dimension
            )));
        }
        Ok(())
    }

    pub fn check(&self, mode: &ModeLabel) -> Result<()> {
        self.check_path(mode.path)?;
        if mode.oam.abs() > self.oam_window {
            return Err(Error::WindowOverflow {
                oam: mode.oam,
                window: self.oam_window,
            });
        }
        Ok(())
    }
}

/// Sparse image of one basis mode under a linear operator.
pub type Image = Vec<(ModeLabel, Complex64)>;

/// A linear single-photon operator, described by its action on basis modes.
pub trait ModeOperator {
    fn map_mode(&self, mode: ModeLabel, space: &ModeSpace) -> Result<Image>;
}

impl<T: ModeOperator + ?Sized> ModeOperator for &T {
    fn map_mode(&self, mode: ModeLabel, space: &ModeSpace) -> Result<Image> {
        (**self).map_mode(mode, space)
    }
}

/// The identity operator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl ModeOperator for Identity {
    fn map_mode(&self, mode: ModeLabel, _space: &ModeSpace) -> Result<Image> {
        Ok(vec![(mode, Complex64::new(1.0, 0.0))])
    }
}

/// Image of `mode` with every output mode checked against the space.
fn checked_image<O: ModeOperator + ?Sized>(
    op: &O,
    mode: ModeLabel,
    space: &ModeSpace,
) -> Result<Image> {
    let image = op.map_mode(mode, space)?;
    for (m, _) in &image {
        space.check(m)?;
    }
    Ok(image)
}

/// Matrix of `op` with columns indexed by `inputs` and rows by the sorted
/// union of their images (entries at or below the prune threshold ignored).
pub fn restricted_operator_matrix<O: ModeOperator + ?Sized>(
    op: &O,
    inputs: &[ModeLabel],
    space: &ModeSpace,
) -> Result<(Vec<ModeLabel>, CMatrix)> {
    let images = inputs
        .iter()
        .map(|&m| checked_image(op, m, space))
        .collect::<Result<Vec<_>>>()?;
    let outputs: Vec<ModeLabel> = images
        .iter()
        .flatten()
        .filter(|(_, a)| a.norm() > PRUNE_THRESHOLD)
        .map(|(m, _)| *m)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<ModeLabel, usize> =
        outputs.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut matrix = CMatrix::zeros((outputs.len(), inputs.len()));
    for (col, image) in images.iter().enumerate() {
        for (m, a) in image {
            if let Some(&row) = index.get(m) {
                matrix[[row, col]] += a;
            }
        }
    }
    Ok((outputs, matrix))
}

fn prune<K: Ord>(map: BTreeMap<K, Complex64>) -> BTreeMap<K, Complex64> {
    map.into_iter()
        .filter(|(_, a)| a.norm() > PRUNE_THRESHOLD)
        .collect()
}

fn check_norm(norm_sqr: f64) -> Result<()> {
    if (norm_sqr - 1.0).abs() > TOLERANCE {
        return Err(Error::Normalization { norm_sqr });
    }
    Ok(())
}

/// Behaviour shared by one-photon and few-photon states.
pub trait QuantumState: Sized {
    fn space(&self) -> &ModeSpace;

    /// `<self|other>`; errors when the two states are not comparable.
    fn inner(&self, other: &Self) -> Result<Complex64>;

    fn norm_sqr(&self) -> f64;

    /// Applies a single-photon operator (slot-wise for ensembles).
    fn apply<O: ModeOperator + ?Sized>(&self, op: &O) -> Result<Self>;

    /// Distance to `e^{i gamma} other` for the best-aligned `gamma`, as
    /// `(max amplitude error, gamma)`.
    fn phase_distance(&self, other: &Self) -> (f64, f64);
}

/// `|<a|b>|^2`, symmetric in its arguments.
pub fn fidelity<S: QuantumState>(a: &S, b: &S) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Applies `op` to `state`. Ensembles are only accepted when `op` acts as a
/// generalized permutation on their occupied modes.
pub fn apply_mode_map<S: QuantumState, O: ModeOperator + ?Sized>(state: &S, op: &O) -> Result<S> {
    state.apply(op)
}

fn inner_sorted<K: Ord>(a: &BTreeMap<K, Complex64>, b: &BTreeMap<K, Complex64>) -> Complex64 {
    a.iter()
        .filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y))
        .sum()
}

fn phase_distance_sorted<K: Ord + Clone>(
    a: &BTreeMap<K, Complex64>,
    b: &BTreeMap<K, Complex64>,
) -> (f64, f64) {
    let keys: BTreeSet<&K> = a.keys().chain(b.keys()).collect();
    let zero = Complex64::new(0.0, 0.0);
    let pairs = || {
        keys.iter().map(|k| {
            (
                a.get(*k).copied().unwrap_or(zero),
                b.get(*k).copied().unwrap_or(zero),
            )
        })
    };
    let phase = crate::linalg::aligning_phase(pairs());
    let rot = Complex64::from_polar(1.0, phase);
    let err = pairs()
        .map(|(x, y)| (x - rot * y).norm())
        .fold(0.0, f64::max);
    (err, phase)
}

/// A normalized polarization qubit `alpha |H> + beta |V>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitSpec {
    #[serde(with = "complex_pair")]
    pub alpha: Complex64,
    #[serde(with = "complex_pair")]
    pub beta: Complex64,
}

impl QubitSpec {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        check_norm(alpha.norm_sqr() + beta.norm_sqr())?;
        Ok(QubitSpec { alpha, beta })
    }

    pub fn horizontal() -> Self {
        QubitSpec {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn vertical() -> Self {
        QubitSpec {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// Normalized complex-Gaussian qubit.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        use rand_distr::StandardNormal;
        let mut draw = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let (a, b) = (draw(), draw());
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        QubitSpec {
            alpha: a / n,
            beta: b / n,
        }
    }
}

/// One photon: a normalized sparse amplitude map over mode labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    space: ModeSpace,
    amplitudes: BTreeMap<ModeLabel, Complex64>,
}

impl PhotonState {
    /// Builds a state from (mode, amplitude) pairs; repeated modes accumulate.
    pub fn from_amplitudes(
        space: ModeSpace,
        entries: impl IntoIterator<Item = (ModeLabel, Complex64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (mode, amp) in entries {
            space.check(&mode)?;
            *map.entry(mode).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let state = PhotonState {
            space,
            amplitudes: prune(map),
        };
        check_norm(state.norm_sqr())?;
        Ok(state)
    }

    pub fn basis(space: ModeSpace, mode: ModeLabel) -> Result<Self> {
        PhotonState::from_amplitudes(space, [(mode, Complex64::new(1.0, 0.0))])
    }

    pub fn amplitude(&self, mode: &ModeLabel) -> Complex64 {
        self.amplitudes.get(mode).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeLabel, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Detection probability per path.
    pub fn path_probabilities(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (m, a) in &self.amplitudes {
            *out.entry(m.path).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    /// The same state with every winding number replaced by its residue
    /// modulo `modulus` (amplitudes of merged labels add).
    pub fn oam_residues(&self, modulus: usize) -> PhotonState {
        let mut map = BTreeMap::new();
        for (m, a) in &self.amplitudes {
            let tag = m.with_oam(m.oam.rem_euclid(modulus as i64));
            *map.entry(tag).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        PhotonState {
            space: self.space,
            amplitudes: prune(map),
        }
    }

    /// The single occupied mode, if the state is a basis state up to phase.
    pub fn as_basis_mode(&self) -> Option<(ModeLabel, Complex64)> {
        let mut it = self.amplitudes.iter();
        match (it.next(), it.next()) {
            (Some((m, a)), None) => Some((*m, *a)),
            _ => None,
        }
    }
}

impl QuantumState for PhotonState {
    fn space(&self) -> &ModeSpace {
        &self.space
    }

    fn inner(&self, other: &Self) -> Result<Complex64> {
        Ok(inner_sorted(&self.amplitudes, &other.amplitudes))
    }

    fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    fn apply<O: ModeOperator + ?Sized>(&self, op: &O) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (&mode, &amp) in &self.amplitudes {
            for (m, a) in checked_image(op, mode, &self.space)? {
                *out.entry(m).or_insert(Complex64::new(0.0, 0.0)) += amp * a;
            }
        }
        Ok(PhotonState {
            space: self.space,
            amplitudes: prune(out),
        })
    }

    fn phase_distance(&self, other: &Self) -> (f64, f64) {
        phase_distance_sorted(&self.amplitudes, &other.amplitudes)
    }
}

/// `alpha` on `(path, oam, H)` and `beta` on `(path, oam, V)`.
pub fn make_qubit_photon(
    space: ModeSpace,
    spec: QubitSpec,
    path: usize,
    oam: i64,
) -> Result<PhotonState> {
    check_norm(spec.alpha.norm_sqr() + spec.beta.norm_sqr())?;
    space.check_path(path)?;
    PhotonState::from_amplitudes(
        space,
        [
            (ModeLabel::h(path, oam), spec.alpha),
            (ModeLabel::v(path, oam), spec.beta),
        ],
    )
}

fn first_duplicate(modes: &[ModeLabel]) -> Option<ModeLabel> {
    for (i, m) in modes.iter().enumerate() {
        if modes[i + 1..].contains(m) {
            return Some(*m);
        }
    }
    None
}

/// Few photons in distinguishable slots: amplitudes over ordered tuples of
/// mode labels. No tuple may place two slots in the same mode.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleState {
    space: ModeSpace,
    slot_count: usize,
    amplitudes: BTreeMap<Vec<ModeLabel>, Complex64>,
}

impl EnsembleState {
    pub fn from_amplitudes(
        space: ModeSpace,
        slot_count: usize,
        entries: impl IntoIterator<Item = (Vec<ModeLabel>, Complex64)>,
    ) -> Result<Self> {
        if slot_count == 0 {
            return Err(Error::domain("ensemble needs at least one slot"));
        }
        let mut map = BTreeMap::new();
        for (modes, amp) in entries {
            if modes.len() != slot_count {
                return Err(Error::domain(format!(
                    "tuple of length {} in a {slot_count}-slot ensemble",
                    modes.len()
                )));
            }
            for m in &modes {
                space.check(m)?;
            }
            *map.entry(modes).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let map = prune(map);
        for modes in map.keys() {
            if let Some(mode) = first_duplicate(modes) {
                return Err(Error::Bunching { mode });
            }
        }
        let state = EnsembleState {
            space,
            slot_count,
            amplitudes: map,
        };
        check_norm(state.norm_sqr())?;
        Ok(state)
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn amplitude(&self, modes: &[ModeLabel]) -> Complex64 {
        self.amplitudes.get(modes).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<ModeLabel>, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Every mode occupied by any slot in any tuple, sorted.
    pub fn support(&self) -> Vec<ModeLabel> {
        self.amplitudes
            .keys()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// See [`PhotonState::oam_residues`].
    pub fn oam_residues(&self, modulus: usize) -> EnsembleState {
        let mut map = BTreeMap::new();
        for (modes, a) in &self.amplitudes {
            let tags = modes
                .iter()
                .map(|m| m.with_oam(m.oam.rem_euclid(modulus as i64)))
                .collect::<Vec<_>>();
            *map.entry(tags).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        EnsembleState {
            space: self.space,
            slot_count: self.slot_count,
            amplitudes: prune(map),
        }
    }
}

impl QuantumState for EnsembleState {
    fn space(&self) -> &ModeSpace {
        &self.space
    }

    fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.slot_count != other.slot_count {
            return Err(Error::domain(format!(
                "cannot compare {}-slot and {}-slot ensembles",
                self.slot_count, other.slot_count
            )));
        }
        Ok(inner_sorted(&self.amplitudes, &other.amplitudes))
    }

    fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    fn apply<O: ModeOperator + ?Sized>(&self, op: &O) -> Result<Self> {
        let support = self.support();
        let (_, restricted) = restricted_operator_matrix(op, &support, &self.space)?;
        if is_generalized_permutation(&restricted).is_none() {
            return Err(Error::NotSlotSafe);
        }
        let images: BTreeMap<ModeLabel, Image> = support
            .iter()
            .map(|&m| checked_image(op, m, &self.space).map(|img| (m, img)))
            .collect::<Result<_>>()?;

        let mut out: BTreeMap<Vec<ModeLabel>, Complex64> = BTreeMap::new();
        for (modes, &amp) in &self.amplitudes {
            // cartesian product over the slot images
            let mut partial: Vec<(Vec<ModeLabel>, Complex64)> =
                vec![(Vec::with_capacity(self.slot_count), amp)];
            for m in modes {
                let image = &images[m];
                partial = partial
                    .into_iter()
                    .flat_map(|(prefix, a)| {
                        image.iter().map(move |(m2, a2)| {
                            let mut next = prefix.clone();
                            next.push(*m2);
                            (next, a * a2)
                        })
                    })
                    .collect();
            }
            for (tuple, a) in partial {
                *out.entry(tuple).or_insert(Complex64::new(0.0, 0.0)) += a;
            }
        }
        for (modes, a) in &out {
            if a.norm() > BUNCHING_THRESHOLD {
                if let Some(mode) = first_duplicate(modes) {
                    return Err(Error::Bunching { mode });
                }
            }
        }
        Ok(EnsembleState {
            space: self.space,
            slot_count: self.slot_count,
            amplitudes: prune(out),
        })
    }

    fn phase_distance(&self, other: &Self) -> (f64, f64) {
        phase_distance_sorted(&self.amplitudes, &other.amplitudes)
    }
}

/// Product state of the given photons, slot `i` holding photon `i`.
pub fn tensor(photons: &[PhotonState]) -> Result<EnsembleState> {
    let first = photons
        .first()
        .ok_or_else(|| Error::domain("tensor of an empty photon list"))?;
    let space = first.space;
    if photons.iter().any(|p| p.space != space) {
        return Err(Error::domain("photons live in different mode spaces"));
    }
    let mut tuples: Vec<(Vec<ModeLabel>, Complex64)> = vec![(Vec::new(), Complex64::new(1.0, 0.0))];
    for photon in photons {
        tuples = tuples
            .into_iter()
            .flat_map(|(prefix, a)| {
                photon.iter().map(move |(m, b)| {
                    let mut next = prefix.clone();
                    next.push(*m);
                    (next, a * b)
                })
            })
            .collect();
    }
    EnsembleState::from_amplitudes(space, photons.len(), tuples)
}

/// `[re, im]` serialization for complex numbers.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space(d: usize) -> ModeSpace {
        ModeSpace::new(d).unwrap()
    }

    /// |l> -> |l + k> on every path, a generalized permutation.
    struct Shift(i64);

    impl ModeOperator for Shift {
        fn map_mode(&self, mode: ModeLabel, _: &ModeSpace) -> Result<Image> {
            Ok(vec![(mode.with_oam(mode.oam + self.0), c(1.0, 0.0))])
        }
    }

    /// Balanced mixing of paths 0 and 1; not a generalized permutation.
    struct Mix;

    impl ModeOperator for Mix {
        fn map_mode(&self, mode: ModeLabel, _: &ModeSpace) -> Result<Image> {
            let h = FRAC_1_SQRT_2;
            Ok(match mode.path {
                0 => vec![(mode, c(h, 0.0)), (mode.with_path(1), c(h, 0.0))],
                1 => vec![(mode.with_path(0), c(h, 0.0)), (mode, c(-h, 0.0))],
                _ => vec![(mode, c(1.0, 0.0))],
            })
        }
    }

    #[test]
    fn qubit_photon_basis_and_superposition() {
        let s = make_qubit_photon(space(3), QubitSpec::horizontal(), 0, 0).unwrap();
        assert_eq!(s.as_basis_mode(), Some((ModeLabel::h(0, 0), c(1.0, 0.0))));

        let q = QubitSpec::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let s = make_qubit_photon(space(3), q, 2, 1).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.amplitude(&ModeLabel::h(2, 1)), c(FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitude(&ModeLabel::v(2, 1)), c(FRAC_1_SQRT_2, 0.0));

        // 0.36 + 0.64 = 1
        let q = QubitSpec::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let s = make_qubit_photon(space(3), q, 1, 3).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_photon_errors() {
        assert!(matches!(
            QubitSpec::new(c(1.0, 0.0), c(0.1, 0.0)),
            Err(Error::Normalization { .. })
        ));
        let bad = QubitSpec {
            alpha: c(0.5, 0.0),
            beta: c(0.5, 0.0),
        };
        assert!(matches!(
            make_qubit_photon(space(3), bad, 0, 0),
            Err(Error::Normalization { .. })
        ));
        assert!(matches!(
            make_qubit_photon(space(3), QubitSpec::horizontal(), 3, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn zero_amplitudes_are_not_stored() {
        let s = PhotonState::from_amplitudes(
            space(2),
            [
                (ModeLabel::h(0, 0), c(1.0, 0.0)),
                (ModeLabel::v(0, 0), c(1e-17, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn window_is_enforced() {
        let sp = ModeSpace::with_window(2, 3).unwrap();
        assert!(PhotonState::basis(sp, ModeLabel::h(0, 3)).is_ok());
        assert!(matches!(
            PhotonState::basis(sp, ModeLabel::h(0, -4)),
            Err(Error::WindowOverflow { oam: -4, window: 3 })
        ));
        let s = PhotonState::basis(sp, ModeLabel::h(0, 2)).unwrap();
        assert!(matches!(
            s.apply(&Shift(2)),
            Err(Error::WindowOverflow { .. })
        ));
        assert_eq!(ModeSpace::new(5).unwrap().oam_window(), 20);
        assert!(ModeSpace::new(0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let sp = space(1);
        let h = PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap();
        let v = PhotonState::basis(sp, ModeLabel::v(0, 0)).unwrap();
        let plus = PhotonState::from_amplitudes(
            sp,
            [
                (ModeLabel::h(0, 0), c(FRAC_1_SQRT_2, 0.0)),
                (ModeLabel::v(0, 0), c(FRAC_1_SQRT_2, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(fidelity(&h, &h).unwrap(), 1.0);
        assert_eq!(fidelity(&h, &v).unwrap(), 0.0);
        assert!((fidelity(&h, &plus).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_rejects_mismatched_slot_counts() {
        let sp = space(2);
        let a = tensor(&[PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap()]).unwrap();
        let b = tensor(&[
            PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap(),
            PhotonState::basis(sp, ModeLabel::h(1, 0)).unwrap(),
        ])
        .unwrap();
        assert!(matches!(fidelity(&a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn tensor_examples() {
        let sp = space(2);
        assert!(matches!(tensor(&[]), Err(Error::Domain(_))));

        let single = tensor(&[PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap()]).unwrap();
        assert_eq!(single.slot_count(), 1);
        assert_eq!(single.amplitude(&[ModeLabel::h(0, 0)]), c(1.0, 0.0));

        let pair = tensor(&[
            PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap(),
            PhotonState::basis(sp, ModeLabel::v(1, 1)).unwrap(),
        ])
        .unwrap();
        assert_eq!(pair.len(), 1);
        assert_eq!(
            pair.amplitude(&[ModeLabel::h(0, 0), ModeLabel::v(1, 1)]),
            c(1.0, 0.0)
        );

        let plus = PhotonState::from_amplitudes(
            sp,
            [
                (ModeLabel::h(0, 0), c(FRAC_1_SQRT_2, 0.0)),
                (ModeLabel::v(0, 0), c(FRAC_1_SQRT_2, 0.0)),
            ],
        )
        .unwrap();
        let two = tensor(&[plus, PhotonState::basis(sp, ModeLabel::h(1, 2)).unwrap()]).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(
            two.amplitude(&[ModeLabel::h(0, 0), ModeLabel::h(1, 2)]),
            c(FRAC_1_SQRT_2, 0.0)
        );
        assert_eq!(
            two.amplitude(&[ModeLabel::v(0, 0), ModeLabel::h(1, 2)]),
            c(FRAC_1_SQRT_2, 0.0)
        );
    }

    #[test]
    fn tensor_rejects_bunching() {
        let sp = space(2);
        let p = PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap();
        assert!(matches!(
            tensor(&[p.clone(), p]),
            Err(Error::Bunching { .. })
        ));
    }

    #[test]
    fn identity_and_shift_application() {
        let sp = space(3);
        let s =
            make_qubit_photon(sp, QubitSpec::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap(), 1, 0).unwrap();
        assert_eq!(s.apply(&Identity).unwrap(), s);
        let shifted = PhotonState::basis(sp, ModeLabel::h(0, 1))
            .unwrap()
            .apply(&Shift(2))
            .unwrap();
        assert_eq!(
            shifted.as_basis_mode(),
            Some((ModeLabel::h(0, 3), c(1.0, 0.0)))
        );
    }

    #[test]
    fn ensemble_rejects_non_permutation_operators() {
        let sp = space(2);
        let e = tensor(&[
            PhotonState::basis(sp, ModeLabel::h(0, 0)).unwrap(),
            PhotonState::basis(sp, ModeLabel::h(1, 0)).unwrap(),
        ])
        .unwrap();
        assert!(matches!(e.apply(&Mix), Err(Error::NotSlotSafe)));
        // the single-photon route is unrestricted
        let p = PhotonState::basis(sp, ModeLabel::h(0, 0))
            .unwrap()
            .apply(&Mix)
            .unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn oam_residues_relabel() {
        let sp = space(4);
        let s = PhotonState::basis(sp, ModeLabel::v(3, -3)).unwrap();
        assert_eq!(
            s.oam_residues(4).as_basis_mode().unwrap().0,
            ModeLabel::v(3, 1)
        );
    }
}
