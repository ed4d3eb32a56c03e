//! Invariant suites driven by `verify`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::elements::Direction;
use crate::linalg::{
    global_phase_distance, is_generalized_permutation, max_abs_diff, random_unitary,
    unitarity_error, CMatrix,
};
use crate::multiport::{
    default_oam_values, device_matrix, oambs_closed_form, oambs_netlist, reck_decompose,
    symmetric_matrix, CompositeDevice, SymmetricMultiport,
};
use crate::network::{bell_target, MuxNetwork, SimpleRoutingNetwork, StarNetwork};
use crate::state::{
    fidelity, restricted_operator_matrix, ModeLabel, ModeOperator, ModeSpace, Polarization,
    QubitSpec,
};
use crate::Result;

pub const RANDOM_UNITARIES: usize = 20;
pub const MUX_TRIALS: usize = 100;
pub const BELL_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Null in JSON when the check could not be evaluated.
    pub measured_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn measure(name: &str, tolerance: f64, outcome: Result<f64>) -> Check {
        match outcome {
            Ok(err) => Check {
                name: name.into(),
                pass: err <= tolerance,
                measured_error: err,
                detail: None,
            },
            Err(e) => Check {
                name: name.into(),
                pass: false,
                measured_error: f64::INFINITY,
                detail: Some(e.to_string()),
            },
        }
    }
}

/// Runs every suite for dimension `space.dimension()`, in a fixed order.
pub fn run_all(space: ModeSpace, tolerance: f64, seed: u64) -> Vec<Check> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = space.dimension();
    let mut checks = vec![
        Check::measure("symmetric_multiport_unitary", tolerance, symmetric_error(d)),
        Check::measure(
            "oambs_closed_form",
            tolerance,
            closed_form_error(d, Direction::Forward),
        ),
        Check::measure(
            "sbmao_closed_form",
            tolerance,
            closed_form_error(d, Direction::Reverse),
        ),
        Check::measure("inverse_identity", tolerance, inverse_error(d)),
        Check::measure("direction_symmetry", tolerance, direction_symmetry_error(d)),
        Check::measure(
            "synthesis_symmetric",
            tolerance,
            symmetric_matrix(d)
                .and_then(|s| reck_decompose(&s))
                .map(|n| n.metadata.replay_error),
        ),
        Check::measure(
            "synthesis_random",
            tolerance,
            synthesis_random_error(d, &mut rng),
        ),
        Check::measure(
            "oambs_netlist",
            tolerance,
            oambs_netlist(d).map(|n| n.metadata.replay_error),
        ),
        Check::measure("slot_model_devices", tolerance, slot_model_error(space)),
    ];
    if d >= 2 {
        checks.push(Check::measure(
            "symmetric_multiport_not_slot_safe",
            tolerance,
            raw_multiport_rejected(space),
        ));
    }
    checks.extend([
        Check::measure(
            "routing_simple_forward",
            tolerance,
            simple_routing_error(space, Direction::Forward),
        ),
        Check::measure(
            "routing_simple_reverse",
            tolerance,
            simple_routing_error(space, Direction::Reverse),
        ),
        Check::measure("routing_star", tolerance, star_routing_error(space)),
        Check::measure("mux_roundtrip", tolerance, mux_error(space, &mut rng)),
    ]);
    if d >= 2 {
        checks.push(Check::measure(
            "bell_distribution",
            tolerance,
            bell_error(space, &mut rng),
        ));
        checks.push(Check::measure(
            "superposed_destination",
            tolerance,
            superposed_error(space),
        ));
    }
    checks
}

fn symmetric_error(d: usize) -> Result<f64> {
    let s = symmetric_matrix(d)?;
    Ok(unitarity_error(&s).max(max_abs_diff(&s, &s.t().to_owned())))
}

/// Largest deviation of the device matrix from the closed-form map on all
/// `2 D^2` inputs with `l` in `[0, D-1]`, requiring one shared phase.
pub fn closed_form_error(d: usize, direction: Direction) -> Result<f64> {
    let device = match direction {
        Direction::Forward => CompositeDevice::oambs(d)?,
        Direction::Reverse => CompositeDevice::sbmao(d)?,
    };
    let (basis, m) = device_matrix(&device, &default_oam_values(d))?;
    let mut worst = 0.0f64;
    let mut common: Option<Complex64> = None;
    for (col, input) in basis.modes().iter().enumerate() {
        if !(0..d as i64).contains(&input.oam) {
            continue;
        }
        let (oam, path) = oambs_closed_form(input.oam, input.path, d, direction);
        let row = basis
            .index_of(&ModeLabel::new(path, oam, input.pol))
            .expect("closed basis");
        let a = m[[row, col]];
        let reference = *common.get_or_insert(a);
        worst = worst
            .max((a.norm() - 1.0).abs())
            .max((a - reference).norm());
        for (r, z) in m.column(col).iter().enumerate() {
            if r != row {
                worst = worst.max(z.norm());
            }
        }
    }
    Ok(worst)
}

fn inverse_error(d: usize) -> Result<f64> {
    let values = default_oam_values(d);
    let (_, fwd) = device_matrix(&CompositeDevice::oambs(d)?, &values)?;
    let (_, rev) = device_matrix(&CompositeDevice::sbmao(d)?, &values)?;
    let product = rev.dot(&fwd);
    Ok(global_phase_distance(&product, &CMatrix::eye(product.nrows())).error)
}

fn direction_symmetry_error(d: usize) -> Result<f64> {
    let s = symmetric_matrix(d)?;
    let values = default_oam_values(d);
    let (_, fwd) = device_matrix(&CompositeDevice::oambs(d)?, &values)?;
    let (_, rev) = device_matrix(&CompositeDevice::sbmao(d)?, &values)?;
    Ok(max_abs_diff(&s, &s.t().to_owned()).max(max_abs_diff(&rev, &fwd.t().to_owned())))
}

fn synthesis_random_error<R: Rng>(d: usize, rng: &mut R) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_UNITARIES {
        worst = worst.max(
            reck_decompose(&random_unitary(d, rng))?
                .metadata
                .replay_error,
        );
    }
    Ok(worst)
}

fn inputs(space: ModeSpace) -> Vec<ModeLabel> {
    let d = space.dimension();
    let mut v = Vec::new();
    for path in 0..d {
        for oam in 0..d as i64 {
            for pol in Polarization::ALL {
                v.push(ModeLabel::new(path, oam, pol));
            }
        }
    }
    v
}

fn permutation_defect<O: ModeOperator + ?Sized>(op: &O, space: ModeSpace) -> Result<f64> {
    let (_, m) = restricted_operator_matrix(op, &inputs(space), &space)?;
    Ok(if is_generalized_permutation(&m).is_some() {
        0.0
    } else {
        f64::INFINITY
    })
}

/// Every composite device applied to ensembles must be a generalized
/// permutation on the `l in [0, D-1]` inputs.
fn slot_model_error(space: ModeSpace) -> Result<f64> {
    let d = space.dimension();
    let mux = MuxNetwork::with_space(space)?;
    let star = StarNetwork::with_space(space)?;
    let devices = [
        CompositeDevice::oambs(d)?,
        CompositeDevice::sbmao(d)?,
        mux.transmitter()?,
        mux.receiver(false)?,
        mux.receiver(true)?,
        star.pipeline()?,
    ];
    let mut worst = 0.0f64;
    for dev in &devices {
        worst = worst.max(permutation_defect(dev, space)?);
    }
    Ok(worst)
}

/// Zero when a bare symmetric multiport is correctly refused.
fn raw_multiport_rejected(space: ModeSpace) -> Result<f64> {
    let defect = permutation_defect(&SymmetricMultiport::new(space.dimension()), space)?;
    Ok(if defect.is_infinite() {
        0.0
    } else {
        f64::INFINITY
    })
}

fn simple_routing_error(space: ModeSpace, side: Direction) -> Result<f64> {
    let net = SimpleRoutingNetwork::with_space(space)?;
    let report = net.report(side)?;
    let mut worst = 0.0f64;
    for row in &report.rows {
        if !row.pass
            || net.brute_force_windings(row.sender, row.destination, side)? != [row.winding_number]
        {
            return Ok(f64::INFINITY);
        }
        worst = worst.max((row.amplitude_modulus - 1.0).abs());
    }
    Ok(worst)
}

fn star_routing_error(space: ModeSpace) -> Result<f64> {
    let report = StarNetwork::with_space(space)?.report()?;
    let mut worst = 0.0f64;
    for row in &report.rows {
        if !row.pass || row.sender_tag != row.sender as i64 {
            return Ok(f64::INFINITY);
        }
        worst = worst.max((row.amplitude_modulus - 1.0).abs());
    }
    Ok(worst)
}

fn mux_error<R: Rng>(space: ModeSpace, rng: &mut R) -> Result<f64> {
    let net = MuxNetwork::with_space(space)?;
    let mut worst = 0.0f64;
    for _ in 0..MUX_TRIALS {
        let qubits: Vec<QubitSpec> = (0..space.dimension())
            .map(|_| QubitSpec::random(rng))
            .collect();
        let sent = net.transmit(&qubits)?;
        let expected = net.expected_multiplexed(&qubits)?;
        let back = net.receive(&sent, true)?;
        let original = net.user_inputs(&qubits)?;
        worst = worst
            .max(1.0 - fidelity(&sent, &expected)?)
            .max(1.0 - fidelity(&back, &original)?);
    }
    Ok(worst)
}

/// Draws `(x, y, n, m)` with `x != y`.
pub fn bell_tuple<R: Rng>(d: usize, rng: &mut R) -> (usize, usize, usize, usize) {
    let x = rng.random_range(0..d);
    let y = (x + rng.random_range(1..d)) % d;
    (x, y, rng.random_range(0..d), rng.random_range(0..d))
}

fn bell_error<R: Rng>(space: ModeSpace, rng: &mut R) -> Result<f64> {
    let star = StarNetwork::with_space(space)?;
    let mut worst = 0.0f64;
    for _ in 0..BELL_SAMPLES {
        let (x, y, n, m) = bell_tuple(space.dimension(), rng);
        let out = star.distribute_bell_pair(x, y, n, m)?;
        let target = bell_target(x, y, n, m, space)?;
        worst = worst.max(1.0 - fidelity(&out.oam_residues(space.dimension()), &target)?);
    }
    Ok(worst)
}

/// Equal-weight superposition of destinations 0 and 1 from sender 0: path
/// weights and linearity against single-destination deliveries.
fn superposed_error(space: ModeSpace) -> Result<f64> {
    let star = StarNetwork::with_space(space)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new(h, 0.0);
    let out = star.superposed(0, &[(0, c), (1, c)])?;
    let probs = out.path_probabilities();
    let mut worst = (probs.get(&0).copied().unwrap_or(0.0) - 0.5)
        .abs()
        .max((probs.get(&1).copied().unwrap_or(0.0) - 0.5).abs());
    let a = star.deliver(0, 0, QubitSpec::horizontal())?;
    let b = star.deliver(0, 1, QubitSpec::horizontal())?;
    for (mode, amp) in out.iter() {
        let expected = (a.amplitude(mode) + b.amplitude(mode)) * h;
        worst = worst.max((amp - expected).norm());
    }
    Ok(worst)
}
