//! Network applications built from the OAM beamsplitter: the OAM
//! multiplexer/demultiplexer, the simple two-sided self-routing network, the
//! star self-routing network, and the superposed-destination and
//! entanglement-distribution scenarios.
//!
//! Delivered winding numbers are reported as true signed integers. The star
//! network returns the sender index only modulo `D` (the reflectors at the
//! landing ports cannot tell which multiple of `D` the photon carried), so it
//! is exposed as [`RouteRow::sender_tag`], the residue of the delivered OAM.

use num_complex::Complex64;
use serde::Serialize;

use crate::elements::{Direction, Element};
use crate::multiport::{oambs_closed_form, CompositeDevice};
use crate::state::{
    make_qubit_photon, tensor, EnsembleState, ModeLabel, ModeSpace, PhotonState, Polarization,
    QuantumState, QubitSpec,
};
use crate::{Error, Result, TOLERANCE};

fn check_index(what: &str, index: usize, d: usize) -> Result<()> {
    if index >= d {
        return Err(Error::domain(format!(
            "{what} {index} outside network dimension {d}"
        )));
    }
    Ok(())
}

/// The mode carrying most of the weight, with its amplitude.
fn dominant_mode(state: &PhotonState) -> (ModeLabel, Complex64) {
    state
        .iter()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(m, a)| (*m, *a))
        .expect("normalized states are non-empty")
}

/// `D x 1` multiplexer and `1 x D` demultiplexer.
///
/// User `n` injects at port `n` with `l = 0`; a `-n` hologram in front of the
/// OAM beamsplitter makes every user leave on path 0 tagged with OAM `n`. The
/// receiver is the same beamsplitter traversed in reverse, optionally followed
/// by `+n` holograms that restore OAM 0.
#[derive(Clone, Debug)]
pub struct MuxNetwork {
    dimension: usize,
    space: ModeSpace,
    pub input_holograms: Vec<Element>,
    pub core: CompositeDevice,
    pub demux_core: CompositeDevice,
    pub output_holograms: Vec<Element>,
}

impl MuxNetwork {
    pub fn new(dimension: usize) -> Result<Self> {
        Self::with_space(ModeSpace::new(dimension)?)
    }

    pub fn with_space(space: ModeSpace) -> Result<Self> {
        let dimension = space.dimension();
        Ok(MuxNetwork {
            dimension,
            space,
            input_holograms: (0..dimension)
                .map(|port| Element::Hologram {
                    port,
                    k: -(port as i64),
                })
                .collect(),
            core: CompositeDevice::oambs(dimension)?,
            demux_core: CompositeDevice::sbmao(dimension)?,
            output_holograms: (0..dimension)
                .map(|port| Element::Hologram {
                    port,
                    k: port as i64,
                })
                .collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    /// Input holograms followed by the forward core.
    pub fn transmitter(&self) -> Result<CompositeDevice> {
        CompositeDevice::from_elements(self.dimension, self.input_holograms.iter().cloned())?
            .then(&self.core)
    }

    pub fn receiver(&self, restore_oam: bool) -> Result<CompositeDevice> {
        let rx = self.demux_core.clone();
        if restore_oam {
            rx.with_elements(self.output_holograms.iter().cloned())
        } else {
            Ok(rx)
        }
    }

    /// The users' photons before the multiplexer: qubit `n` on path `n`, OAM 0.
    pub fn user_inputs(&self, qubits: &[QubitSpec]) -> Result<EnsembleState> {
        if qubits.len() != self.dimension {
            return Err(Error::domain(format!(
                "multiplexer of dimension {} needs {} qubits, got {}",
                self.dimension,
                self.dimension,
                qubits.len()
            )));
        }
        let photons = qubits
            .iter()
            .enumerate()
            .map(|(n, q)| make_qubit_photon(self.space, *q, n, 0))
            .collect::<Result<Vec<_>>>()?;
        tensor(&photons)
    }

    pub fn transmit(&self, qubits: &[QubitSpec]) -> Result<EnsembleState> {
        self.user_inputs(qubits)?.apply(&self.transmitter()?)
    }

    /// `(x)_n (alpha_n |n^H>_0 + beta_n |n^V>_0)`.
    pub fn expected_multiplexed(&self, qubits: &[QubitSpec]) -> Result<EnsembleState> {
        let photons = qubits
            .iter()
            .enumerate()
            .map(|(n, q)| make_qubit_photon(self.space, *q, 0, n as i64))
            .collect::<Result<Vec<_>>>()?;
        tensor(&photons)
    }

    pub fn receive(&self, multiplexed: &EnsembleState, restore_oam: bool) -> Result<EnsembleState> {
        let top = self.dimension as i64 - 1;
        for mode in multiplexed.support() {
            if mode.path != 0 || !(0..=top).contains(&mode.oam) {
                return Err(Error::Routing(format!(
                    "demultiplexer input {mode} is not on path 0 with OAM in [0, {top}]"
                )));
            }
        }
        multiplexed.apply(&self.receiver(restore_oam)?)
    }
}

/// Multiplexes `qubits` (one per user) onto path 0.
pub fn mux_transmit(dimension: usize, qubits: &[QubitSpec]) -> Result<EnsembleState> {
    MuxNetwork::new(dimension)?.transmit(qubits)
}

/// Separates a multiplexed state: OAM `n` on path 0 exits on path `n` with
/// OAM `-n`, or OAM 0 when `restore_oam` is set.
pub fn demux_receive(
    dimension: usize,
    multiplexed: &EnsembleState,
    restore_oam: bool,
) -> Result<EnsembleState> {
    if multiplexed.space().dimension() != dimension {
        return Err(Error::domain(format!(
            "state of dimension {} given to a demultiplexer of dimension {dimension}",
            multiplexed.space().dimension()
        )));
    }
    MuxNetwork::with_space(*multiplexed.space())?.receive(multiplexed, restore_oam)
}

/// Winding number that sends a photon from port `n` to port `m` through the
/// simple network: `(-m-n) mod D` left to right, `(m+n) mod D` right to left.
pub fn choose_winding_simple(n: usize, m: usize, dimension: usize, side: Direction) -> i64 {
    let (n, m, d) = (n as i64, m as i64, dimension as i64);
    match side {
        Direction::Forward => (-m - n).rem_euclid(d),
        Direction::Reverse => (m + n).rem_euclid(d),
    }
}

/// Outcome of sending one basis photon through a network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delivery {
    pub mode: ModeLabel,
    pub amplitude: Complex64,
}

/// Two groups of `D` users on either side of one OAM beamsplitter.
#[derive(Clone, Debug)]
pub struct SimpleRoutingNetwork {
    dimension: usize,
    space: ModeSpace,
    pub core: CompositeDevice,
    reverse_core: CompositeDevice,
}

impl SimpleRoutingNetwork {
    pub fn new(dimension: usize) -> Result<Self> {
        Self::with_space(ModeSpace::new(dimension)?)
    }

    pub fn with_space(space: ModeSpace) -> Result<Self> {
        let dimension = space.dimension();
        Ok(SimpleRoutingNetwork {
            dimension,
            space,
            core: CompositeDevice::oambs(dimension)?,
            reverse_core: CompositeDevice::sbmao(dimension)?,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The device seen by a photon entering from `side`.
    pub fn transit(&self, side: Direction) -> &CompositeDevice {
        match side {
            Direction::Forward => &self.core,
            Direction::Reverse => &self.reverse_core,
        }
    }

    pub fn send(
        &self,
        sender: usize,
        oam: i64,
        side: Direction,
        payload: QubitSpec,
    ) -> Result<PhotonState> {
        make_qubit_photon(self.space, payload, sender, oam)?.apply(self.transit(side))
    }

    pub fn deliver(&self, sender: usize, oam: i64, side: Direction) -> Result<Delivery> {
        check_index("sender", sender, self.dimension)?;
        let input = PhotonState::basis(self.space, ModeLabel::h(sender, oam))?;
        let (mode, amplitude) = dominant_mode(&input.apply(self.transit(side))?);
        Ok(Delivery { mode, amplitude })
    }

    /// Every `l` in `[0, D-1]` that delivers `sender`'s photon to `destination`.
    pub fn brute_force_windings(
        &self,
        sender: usize,
        destination: usize,
        side: Direction,
    ) -> Result<Vec<i64>> {
        let mut hits = Vec::new();
        for l in 0..self.dimension as i64 {
            let d = self.deliver(sender, l, side)?;
            if d.mode.path == destination && (d.amplitude.norm() - 1.0).abs() <= TOLERANCE {
                hits.push(l);
            }
        }
        Ok(hits)
    }

    /// Exhaustive report for one side.
    pub fn report(&self, side: Direction) -> Result<RoutingReport> {
        let mut rows = Vec::with_capacity(self.dimension * self.dimension);
        for n in 0..self.dimension {
            for m in 0..self.dimension {
                let l = choose_winding_simple(n, m, self.dimension, side);
                let d = self.deliver(n, l, side)?;
                rows.push(RouteRow::new(n, m, l, d, None, self.dimension));
            }
        }
        Ok(RoutingReport {
            dimension: self.dimension,
            kind: RouteKind::Simple(side),
            rows,
        })
    }

    /// Output ports reached by more than one of the `(sender, winding)`
    /// assignments. Collisions are reported, not arbitrated.
    pub fn detect_collisions(
        &self,
        assignments: &[(usize, i64)],
        side: Direction,
    ) -> Result<Vec<Collision>> {
        let mut by_port: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &(sender, l) in assignments {
            let d = self.deliver(sender, l, side)?;
            by_port.entry(d.mode.path).or_default().push(sender);
        }
        Ok(by_port
            .into_iter()
            .filter(|(_, s)| s.len() > 1)
            .map(|(port, senders)| Collision { port, senders })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub port: usize,
    pub senders: Vec<usize>,
}

/// `D` users around one OAM beamsplitter whose output ports are closed by
/// reflective holograms; port `p` carries a reflector with shift `-p`.
#[derive(Clone, Debug)]
pub struct StarNetwork {
    dimension: usize,
    space: ModeSpace,
    pub core: CompositeDevice,
    reverse_core: CompositeDevice,
    reflectors: Vec<Element>,
}

impl StarNetwork {
    pub fn new(dimension: usize) -> Result<Self> {
        Self::with_space(ModeSpace::new(dimension)?)
    }

    pub fn with_space(space: ModeSpace) -> Result<Self> {
        let dimension = space.dimension();
        Ok(StarNetwork {
            dimension,
            space,
            core: CompositeDevice::oambs(dimension)?,
            reverse_core: CompositeDevice::sbmao(dimension)?,
            reflectors: (0..dimension)
                .map(|port| Element::ReflectiveHologram {
                    port,
                    k: -(port as i64),
                })
                .collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn reflectors(&self) -> &[Element] {
        &self.reflectors
    }

    /// Replaces the reflector shift at `port` (fault injection).
    pub fn with_reflector_shift(mut self, port: usize, k: i64) -> Result<Self> {
        check_index("reflector port", port, self.dimension)?;
        self.reflectors[port] = Element::ReflectiveHologram { port, k };
        Ok(self)
    }

    /// Forward core, reflector layer, reverse core. Each basis component sits
    /// on a single landing port, so the whole layer can be applied at once.
    pub fn pipeline(&self) -> Result<CompositeDevice> {
        self.core
            .clone()
            .with_elements(self.reflectors.iter().cloned())?
            .then(&self.reverse_core)
    }

    /// Port where a photon from `sender` with winding `oam` meets its reflector.
    pub fn landing_port(&self, sender: usize, oam: i64) -> usize {
        oambs_closed_form(oam, sender, self.dimension, Direction::Forward).1
    }

    /// Sends `payload` from `sender` to `destination` with `l = destination`.
    pub fn deliver(
        &self,
        sender: usize,
        destination: usize,
        payload: QubitSpec,
    ) -> Result<PhotonState> {
        check_index("sender", sender, self.dimension)?;
        check_index("destination", destination, self.dimension)?;
        make_qubit_photon(self.space, payload, sender, destination as i64)?.apply(&self.pipeline()?)
    }

    /// See [`superposed_destination`].
    pub fn superposed(&self, n: usize, dests: &[(usize, Complex64)]) -> Result<PhotonState> {
        let d = self.dimension;
        check_index("sender", n, d)?;
        let mut seen = vec![false; d];
        for &(m, _) in dests {
            check_index("destination", m, d)?;
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::domain(format!("destination {m} listed twice")));
            }
        }
        let input = PhotonState::from_amplitudes(
            self.space,
            dests.iter().map(|&(m, c)| (ModeLabel::h(n, m as i64), c)),
        )?;
        input.apply(&self.pipeline()?)
    }

    /// Bell pair from ports `x`, `y` with `+n`, `+m` source holograms, then
    /// the star pipeline.
    pub fn distribute_bell_pair(
        &self,
        x: usize,
        y: usize,
        n: usize,
        m: usize,
    ) -> Result<EnsembleState> {
        let d = self.dimension;
        for (what, i) in [
            ("source", x),
            ("source", y),
            ("destination", n),
            ("destination", m),
        ] {
            check_index(what, i, d)?;
        }
        if x == y {
            return Err(Error::domain("both photons of the pair on one input path"));
        }
        let source_holograms = CompositeDevice::from_elements(
            d,
            [
                Element::Hologram {
                    port: x,
                    k: n as i64,
                },
                Element::Hologram {
                    port: y,
                    k: m as i64,
                },
            ],
        )?;
        bell_source(x, y, self.space)?.apply(&source_holograms.then(&self.pipeline()?)?)
    }

    pub fn report(&self) -> Result<RoutingReport> {
        let pipeline = self.pipeline()?;
        let mut rows = Vec::with_capacity(self.dimension * self.dimension);
        for n in 0..self.dimension {
            for m in 0..self.dimension {
                let l = m as i64;
                let out = PhotonState::basis(self.space, ModeLabel::h(n, l))?.apply(&pipeline)?;
                let (mode, amplitude) = dominant_mode(&out);
                let landing = self.landing_port(n, l);
                rows.push(RouteRow::new(
                    n,
                    m,
                    l,
                    Delivery { mode, amplitude },
                    Some(landing),
                    self.dimension,
                ));
            }
        }
        Ok(RoutingReport {
            dimension: self.dimension,
            kind: RouteKind::Star,
            rows,
        })
    }
}

/// Star delivery of `payload` from user `n` to user `m` (winding number `m`).
/// The photon arrives on path `m` carrying OAM congruent to `n` modulo `D`.
pub fn star_deliver(
    n: usize,
    m: usize,
    dimension: usize,
    payload: QubitSpec,
) -> Result<PhotonState> {
    StarNetwork::new(dimension)?.deliver(n, m, payload)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteKind {
    Simple(Direction),
    Star,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteRow {
    pub sender: usize,
    pub destination: usize,
    pub winding_number: i64,
    pub delivered_path: usize,
    pub delivered_oam: i64,
    /// Delivered OAM reduced modulo `D`; the sender index in a star network.
    pub sender_tag: i64,
    /// Reflector port visited (star network only).
    pub landing_port: Option<usize>,
    pub amplitude_modulus: f64,
    pub pass: bool,
}

impl RouteRow {
    fn new(
        sender: usize,
        destination: usize,
        l: i64,
        d: Delivery,
        landing: Option<usize>,
        dim: usize,
    ) -> Self {
        let modulus = d.amplitude.norm();
        RouteRow {
            sender,
            destination,
            winding_number: l,
            delivered_path: d.mode.path,
            delivered_oam: d.mode.oam,
            sender_tag: d.mode.oam.rem_euclid(dim as i64),
            landing_port: landing,
            amplitude_modulus: modulus,
            pass: d.mode.path == destination && (modulus - 1.0).abs() <= TOLERANCE,
        }
    }
}

/// Exhaustive `(sender, destination)` delivery table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoutingReport {
    pub dimension: usize,
    pub kind: RouteKind,
    pub rows: Vec<RouteRow>,
}

impl RoutingReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RouteRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Networks that can produce an exhaustive routing report.
pub trait RoutingNetwork {
    fn routing_report(&self) -> Result<RoutingReport>;
}

impl RoutingNetwork for StarNetwork {
    fn routing_report(&self) -> Result<RoutingReport> {
        self.report()
    }
}

/// A simple network seen from one side.
#[derive(Clone, Copy, Debug)]
pub struct SimpleSide<'a>(pub &'a SimpleRoutingNetwork, pub Direction);

impl RoutingNetwork for SimpleSide<'_> {
    fn routing_report(&self) -> Result<RoutingReport> {
        self.0.report(self.1)
    }
}

pub fn routing_report<N: RoutingNetwork + ?Sized>(network: &N) -> Result<RoutingReport> {
    network.routing_report()
}

/// User `n` sends an H photon in the superposition `sum_m c_m |m>_n` through
/// the star network; branch `m` arrives on path `m`.
pub fn superposed_destination(
    n: usize,
    dimension: usize,
    dests: &[(usize, Complex64)],
) -> Result<PhotonState> {
    StarNetwork::new(dimension)?.superposed(n, dests)
}

/// `(|0^H>_x |0^V>_y + |0^V>_x |0^H>_y) / sqrt 2`, photon from `x` in slot 0.
pub fn bell_source(x: usize, y: usize, space: ModeSpace) -> Result<EnsembleState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    EnsembleState::from_amplitudes(
        space,
        2,
        [
            (
                vec![ModeLabel::h(x, 0), ModeLabel::v(y, 0)],
                Complex64::new(h, 0.0),
            ),
            (
                vec![ModeLabel::v(x, 0), ModeLabel::h(y, 0)],
                Complex64::new(h, 0.0),
            ),
        ],
    )
}

/// `(|x^H>_n |y^V>_m + |x^V>_n |y^H>_m) / sqrt 2`: the pair shared by users
/// `n` and `m`, each photon tagged with its source port.
pub fn bell_target(
    x: usize,
    y: usize,
    n: usize,
    m: usize,
    space: ModeSpace,
) -> Result<EnsembleState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (x, y) = (x as i64, y as i64);
    EnsembleState::from_amplitudes(
        space,
        2,
        [
            (
                vec![ModeLabel::h(n, x), ModeLabel::v(m, y)],
                Complex64::new(h, 0.0),
            ),
            (
                vec![ModeLabel::v(n, x), ModeLabel::h(m, y)],
                Complex64::new(h, 0.0),
            ),
        ],
    )
}

/// Sends a polarization Bell pair generated on ports `x` and `y` to users
/// `n` and `m` through the star network.
pub fn distribute_bell_pair(
    x: usize,
    y: usize,
    n: usize,
    m: usize,
    dimension: usize,
) -> Result<EnsembleState> {
    StarNetwork::new(dimension)?.distribute_bell_pair(x, y, n, m)
}

/// Checks that `output` carries `input`'s polarization qubit up to one
/// common phase; returns the largest ratio mismatch.
pub fn polarization_mismatch(input: QubitSpec, output: &PhotonState) -> f64 {
    let mut h = Complex64::new(0.0, 0.0);
    let mut v = Complex64::new(0.0, 0.0);
    for (m, a) in output.iter() {
        match m.pol {
            Polarization::H => h += a,
            Polarization::V => v += a,
        }
    }
    // common phase: a single unit factor relating (alpha, beta) to (h, v)
    let reference = if input.alpha.norm() >= input.beta.norm() {
        h / input.alpha
    } else {
        v / input.beta
    };
    ((h - reference * input.alpha).norm()).max((v - reference * input.beta).norm())
}
