//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Reference values are recomputed here from first
//! principles rather than taken from the library's own closed forms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oamnet::elements::Direction;
use oamnet::linalg::{
    global_phase_distance, is_generalized_permutation, max_abs_diff, random_unitary, CMatrix,
};
use oamnet::multiport::{
    default_oam_values, device_matrix, netlist_apply, oambs_netlist, reck_decompose,
    symmetric_matrix, CompositeDevice, SymmetricMultiport,
};
use oamnet::network::{MuxNetwork, SimpleRoutingNetwork, StarNetwork};
use oamnet::state::{
    fidelity, restricted_operator_matrix, tensor, EnsembleState, ModeLabel, ModeOperator,
    ModeSpace, PhotonState, Polarization, QuantumState, QubitSpec,
};

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// `e^{i 2 pi n m / D} / sqrt D`, written out independently of the library.
fn dft(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    Array2::from_shape_fn((d, d), |(n, m)| {
        Complex64::from_polar(norm, 2.0 * PI * (n * m) as f64 / d as f64)
    })
}

fn modd(x: i64, d: usize) -> usize {
    x.rem_euclid(d as i64) as usize
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for d in 1..=12 {
        let s = symmetric_matrix(d).unwrap();
        let gram = s.t().mapv(|z| z.conj()).dot(&s);
        let unitarity = max_abs_diff(&gram, &CMatrix::eye(d));
        let symmetry = max_abs_diff(&s, &s.t().to_owned());
        let vs_reference = max_abs_diff(&s, &dft(d));
        worst = worst.max(unitarity).max(symmetry).max(vs_reference);
    }
    outcome(
        worst < 1e-12,
        format!("max |S^dag S - I|, |S - S^T|, |S - ref| = {worst:.2e} over D=1..12"),
    )
}

/// Sweeps all `2 D^2` inputs `(l, n)` with `l` in `[0, D-1]` through a device
/// and compares against `target(l, n) -> (oam, path)`. Returns the worst
/// deviation and the shared global phase.
fn closed_form_sweep(
    device: &CompositeDevice,
    d: usize,
    target: impl Fn(i64, usize) -> (i64, usize),
) -> (f64, f64) {
    let (basis, m) = device_matrix(device, &default_oam_values(d)).unwrap();
    let mut common: Option<Complex64> = None;
    let mut worst = 0.0f64;
    for n in 0..d {
        for l in 0..d as i64 {
            for pol in Polarization::ALL {
                let col = basis.index_of(&ModeLabel::new(n, l, pol)).unwrap();
                let (oam, path) = target(l, n);
                let row = basis.index_of(&ModeLabel::new(path, oam, pol)).unwrap();
                let a = m[[row, col]];
                let phase = *common.get_or_insert(a);
                worst = worst.max((a.norm() - 1.0).abs()).max((a - phase).norm());
                let leak: f64 = m
                    .column(col)
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| *r != row)
                    .map(|(_, z)| z.norm_sqr())
                    .sum();
                worst = worst.max(leak.sqrt());
            }
        }
    }
    (worst, common.map_or(0.0, |z| z.arg()))
}

fn phases(list: &[f64]) -> String {
    list.iter()
        .map(|p| format!("{p:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut gammas = Vec::new();
    for d in 2..=8 {
        let dev = CompositeDevice::oambs(d).unwrap();
        let (err, gamma) = closed_form_sweep(&dev, d, |l, n| (-l, modd(-l - n as i64, d)));
        worst = worst.max(err);
        gammas.push(gamma);
    }
    outcome(
        worst <= 1e-9,
        format!("max deviation from |-l>_(-l-n mod D) = {worst:.2e} over D=2..8; global phase per D: [{}]", phases(&gammas)),
    )
}

fn criterion_3() -> Outcome {
    let mut worst_map = 0.0f64;
    let mut worst_inverse = 0.0f64;
    let mut gammas = Vec::new();
    for d in 2..=8 {
        let rev = CompositeDevice::sbmao(d).unwrap();
        let (err, gamma) = closed_form_sweep(&rev, d, |l, n| (-l, modd(l - n as i64, d)));
        worst_map = worst_map.max(err);
        gammas.push(gamma);
        let values = default_oam_values(d);
        let (_, f) = device_matrix(&CompositeDevice::oambs(d).unwrap(), &values).unwrap();
        let (_, r) = device_matrix(&rev, &values).unwrap();
        let product = r.dot(&f);
        worst_inverse = worst_inverse
            .max(global_phase_distance(&product, &CMatrix::eye(product.nrows())).error);
    }
    outcome(
        worst_map <= 1e-9 && worst_inverse < 1e-9,
        format!(
            "reverse map deviation {worst_map:.2e}, |SBMAO OAMBS - e^(ig) I| = {worst_inverse:.2e}; global phase per D: [{}]",
            phases(&gammas)
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_sym = 0.0f64;
    let mut worst_random = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in 2..=8 {
        let target = dft(d);
        let net = reck_decompose(&target).unwrap();
        worst_sym =
            worst_sym.max(global_phase_distance(&net.path_unitary().unwrap(), &target).error);
        for _ in 0..20 {
            let u = random_unitary(d, &mut rng);
            let net = reck_decompose(&u).unwrap();
            worst_random =
                worst_random.max(global_phase_distance(&net.path_unitary().unwrap(), &u).error);
        }
    }
    // whole OAMBS as a netlist, replayed photon by photon
    let mut worst_oambs = 0.0f64;
    for d in 2..=5 {
        let net = oambs_netlist(d).unwrap();
        let space = ModeSpace::new(d).unwrap();
        let mut common: Option<Complex64> = None;
        for n in 0..d {
            for l in 0..d as i64 {
                for pol in Polarization::ALL {
                    let out = netlist_apply(
                        &net,
                        &PhotonState::basis(space, ModeLabel::new(n, l, pol)).unwrap(),
                    )
                    .unwrap();
                    let expected = ModeLabel::new(modd(-l - n as i64, d), -l, pol);
                    let a = out.amplitude(&expected);
                    let phase = *common.get_or_insert(a);
                    let leak = (out.norm_sqr() - a.norm_sqr()).max(0.0).sqrt();
                    worst_oambs = worst_oambs
                        .max((a.norm() - 1.0).abs())
                        .max((a - phase).norm())
                        .max(leak);
                }
            }
        }
    }
    let pass = worst_sym < 1e-9 && worst_random < 1e-9 && worst_oambs < 1e-9;
    outcome(
        pass,
        format!("residual symmetric {worst_sym:.2e}, random {worst_random:.2e}, OAMBS netlist {worst_oambs:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_roundtrip = 0.0f64;
    let mut worst_transmit = 0.0f64;
    for d in 2..=8 {
        let space = ModeSpace::new(d).unwrap();
        let net = MuxNetwork::new(d).unwrap();
        for _ in 0..100 {
            let qubits: Vec<QubitSpec> = (0..d).map(|_| QubitSpec::random(&mut rng)).collect();
            let sent = net.transmit(&qubits).unwrap();
            // tensor_n (alpha_n |n^H>_0 + beta_n |n^V>_0)
            let photons: Vec<PhotonState> = qubits
                .iter()
                .enumerate()
                .map(|(n, q)| {
                    PhotonState::from_amplitudes(
                        space,
                        [
                            (ModeLabel::h(0, n as i64), q.alpha),
                            (ModeLabel::v(0, n as i64), q.beta),
                        ],
                    )
                    .unwrap()
                })
                .collect();
            let expected = tensor(&photons).unwrap();
            worst_transmit = worst_transmit.max(sent.phase_distance(&expected).0);
            let back = net.receive(&sent, true).unwrap();
            let originals: Vec<PhotonState> = qubits
                .iter()
                .enumerate()
                .map(|(n, q)| {
                    PhotonState::from_amplitudes(
                        space,
                        [(ModeLabel::h(n, 0), q.alpha), (ModeLabel::v(n, 0), q.beta)],
                    )
                    .unwrap()
                })
                .collect();
            worst_roundtrip =
                worst_roundtrip.max(1.0 - fidelity(&back, &tensor(&originals).unwrap()).unwrap());
        }
    }
    outcome(
        worst_roundtrip <= 1e-9 && worst_transmit <= 1e-9,
        format!("1 - round-trip fidelity {worst_roundtrip:.2e}, transmitted-state deviation {worst_transmit:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut failures = 0;
    let mut total = 0;
    for d in 2..=8 {
        let net = SimpleRoutingNetwork::new(d).unwrap();
        for side in [Direction::Forward, Direction::Reverse] {
            let report = net.report(side).unwrap();
            for row in &report.rows {
                total += 1;
                // brute force: which l in [0, D-1] puts the photon on path m?
                let delivering: Vec<i64> = (0..d as i64)
                    .filter(|&l| {
                        let out = net.deliver(row.sender, l, side).unwrap();
                        out.mode.path == row.destination
                            && (out.amplitude.norm() - 1.0).abs() <= 1e-9
                    })
                    .collect();
                if !(row.pass && delivering == [row.winding_number]) {
                    failures += 1;
                }
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "{}/{} (n, m, side) rows deliver with the unique l in [0, D-1]",
            total - failures,
            total
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut failures = 0;
    let mut total = 0;
    let mut exact = 0;
    for d in 2..=8 {
        let report = StarNetwork::new(d).unwrap().report().unwrap();
        for row in &report.rows {
            total += 1;
            let ok = row.delivered_path == row.destination
                && row.delivered_oam.rem_euclid(d as i64) == row.sender as i64
                && (row.amplitude_modulus - 1.0).abs() <= 1e-9;
            if !ok {
                failures += 1;
            }
            if row.delivered_oam == row.sender as i64 {
                exact += 1;
            }
        }
    }
    // fault injection: one mis-shifted reflector, failures only at that port
    let mut fault_ok = true;
    for d in 2..=8 {
        for bad in 0..d {
            let net = StarNetwork::new(d)
                .unwrap()
                .with_reflector_shift(bad, -(bad as i64) - 1)
                .unwrap();
            let report = net.report().unwrap();
            let failing: Vec<_> = report
                .rows
                .iter()
                .filter(|r| !(r.pass && r.delivered_oam.rem_euclid(d as i64) == r.sender as i64))
                .collect();
            fault_ok &= !failing.is_empty() && failing.iter().all(|r| r.landing_port == Some(bad));
        }
    }
    outcome(
        failures == 0 && fault_ok,
        format!(
            "{}/{total} rows: path = m, OAM = n (mod D), |amp| = 1; fault localized: {fault_ok}; exact integer OAM = n on {exact}/{total}",
            total - failures
        ),
    )
}

/// `(|x^H>_n |y^V>_m + |x^V>_n |y^H>_m) / sqrt 2` with OAM taken mod `D`.
fn bell_reference(space: ModeSpace, x: usize, y: usize, n: usize, m: usize) -> EnsembleState {
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let (x, y) = (x as i64, y as i64);
    EnsembleState::from_amplitudes(
        space,
        2,
        [
            (vec![ModeLabel::h(n, x), ModeLabel::v(m, y)], c),
            (vec![ModeLabel::v(n, x), ModeLabel::h(m, y)], c),
        ],
    )
    .unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for d in 2..=6 {
        let space = ModeSpace::new(d).unwrap();
        let star = StarNetwork::new(d).unwrap();
        for _ in 0..10 {
            let x = rng.random_range(0..d);
            let y = (x + rng.random_range(1..d)) % d;
            let (n, m) = (rng.random_range(0..d), rng.random_range(0..d));
            let out = star.distribute_bell_pair(x, y, n, m).unwrap();
            let f = fidelity(&out.oam_residues(d), &bell_reference(space, x, y, n, m)).unwrap();
            worst = worst.max(1.0 - f);
        }
    }
    outcome(
        worst <= 1e-9,
        format!("1 - fidelity (OAM mod D) = {worst:.2e} over 50 tuples, D=2..6"),
    )
}

fn slot_inputs(d: usize) -> Vec<ModeLabel> {
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

fn is_slot_safe<O: ModeOperator>(op: &O, space: ModeSpace) -> bool {
    let (_, m) = restricted_operator_matrix(op, &slot_inputs(space.dimension()), &space).unwrap();
    is_generalized_permutation(&m).is_some()
}

fn criterion_9() -> Outcome {
    let mut devices_ok = true;
    let mut raw_rejected = true;
    for d in 1..=8 {
        let space = ModeSpace::new(d).unwrap();
        let mux = MuxNetwork::new(d).unwrap();
        let star = StarNetwork::new(d).unwrap();
        let devices = [
            CompositeDevice::oambs(d).unwrap(),
            CompositeDevice::sbmao(d).unwrap(),
            mux.transmitter().unwrap(),
            mux.receiver(false).unwrap(),
            mux.receiver(true).unwrap(),
            star.pipeline().unwrap(),
        ];
        devices_ok &= devices.iter().all(|dev| is_slot_safe(dev, space));
        if d >= 2 {
            raw_rejected &= !is_slot_safe(&SymmetricMultiport::new(d), space);
        }
    }
    outcome(
        devices_ok && raw_rejected,
        format!("composite devices pass: {devices_ok}; bare symmetric multiport rejected: {raw_rejected}"),
    )
}

fn oamnet(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_oamnet"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_10() -> Outcome {
    let args = ["verify", "--dimension", "4", "--seed", "11"];
    let (c1, a) = oamnet(&args);
    let (c2, b) = oamnet(&args);
    let identical = c1 == 0 && c2 == 0 && a == b && !a.is_empty();
    let invalid = [
        (vec!["verify", "--dimension", "0"], 2),
        (vec!["verify", "--dimension", "4", "--tolerance", "nan"], 2),
        (
            vec![
                "netlist",
                "--dimension",
                "3",
                "--target",
                "symmetric",
                "--output",
                "/nonexistent-dir/x.json",
            ],
            3,
        ),
    ];
    let codes: Vec<i32> = invalid.iter().map(|(a, _)| oamnet(a).0).collect();
    let codes_ok = codes
        .iter()
        .zip(&invalid)
        .all(|(got, (_, want))| got == want);
    outcome(
        identical && codes_ok,
        format!("byte-identical verify output: {identical}; invalid-input exit codes {codes:?} (want [2, 2, 3])"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "1 symmetric multiport construction",
            Duration::from_secs(1),
            criterion_1,
        ),
        (
            "2 OAMBS closed-form map",
            Duration::from_secs(10),
            criterion_2,
        ),
        (
            "3 SBMAO map and inverse identity",
            Duration::from_secs(10),
            criterion_3,
        ),
        (
            "4 triangular synthesis",
            Duration::from_secs(30),
            criterion_4,
        ),
        (
            "5 MUX/DEMUX round trip",
            Duration::from_secs(20),
            criterion_5,
        ),
        (
            "6 simple self-routing",
            Duration::from_secs(20),
            criterion_6,
        ),
        ("7 star self-routing", Duration::from_secs(20), criterion_7),
        (
            "8 Bell-pair distribution",
            Duration::from_secs(10),
            criterion_8,
        ),
        (
            "9 generalized-permutation gate",
            Duration::from_secs(5),
            criterion_9,
        ),
        (
            "10 CLI determinism and exit codes",
            Duration::from_secs(5),
            criterion_10,
        ),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= limit;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.3}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
