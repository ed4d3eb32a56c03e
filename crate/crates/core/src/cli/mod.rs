//! Command-line front end: `verify`, `route`, `netlist` and `scenario`.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
//! error, 3 I/O error. JSON output is byte-deterministic for identical flags
//! and seed; text output is for humans only.

mod json;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use serde::Serialize;

use crate::elements::Direction;
use crate::multiport::{default_oam_values, mode_matrix, oambs_netlist, symmetric_netlist};
use crate::network::{
    bell_target, choose_winding_simple, MuxNetwork, SimpleRoutingNetwork, StarNetwork,
};
use crate::state::{fidelity, ModeSpace, QubitSpec};
use crate::{Error, TOLERANCE};

pub use json::MatrixDump;
pub use suites::Check;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "oamnet",
    version,
    about = "OAM-routed linear-optical network simulator"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Network dimension D (number of ports).
    #[arg(long, global = true)]
    pub dimension: Option<usize>,
    #[arg(long, global = true, default_value_t = TOLERANCE)]
    pub tolerance: f64,
    /// OAM window L: winding numbers are confined to [-L, L] (default 4 D).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub oam_window: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the device, synthesis and routing suites.
    Verify,
    /// Route one photon and report where it lands.
    Route {
        #[arg(long, value_enum)]
        kind: RouteKindArg,
        /// Entry side for the simple network.
        #[arg(long, value_enum, default_value_t = SideArg::Forward)]
        side: SideArg,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Write the triangular netlist of a device.
    Netlist {
        #[arg(long, value_enum)]
        target: NetlistTarget,
        /// Also write the replayed matrix here.
        #[arg(long)]
        matrix_output: Option<PathBuf>,
    },
    /// Run an end-to-end scenario.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        /// Bell-pair source ports `x,y`.
        #[arg(long, value_delimiter = ',')]
        src: Vec<usize>,
        /// Bell-pair destination users `n,m`.
        #[arg(long, value_delimiter = ',')]
        dst: Vec<usize>,
        /// Sender for the superposed-destination scenario.
        #[arg(long)]
        from: Option<usize>,
        /// Destinations (equal weights) for the superposed-destination scenario.
        #[arg(long, value_delimiter = ',')]
        to: Vec<usize>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteKindArg {
    Simple,
    Star,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Forward,
    Reverse,
}

impl From<SideArg> for Direction {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Forward => Direction::Forward,
            SideArg::Reverse => Direction::Reverse,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetlistTarget {
    Symmetric,
    Oambs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    MuxRoundtrip,
    Bell,
    Superposed,
}

/// Validated global configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub dimension: usize,
    pub tolerance: f64,
    pub oam_window: i64,
    pub seed: u64,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(args: &GlobalArgs, command: &'static str) -> Result<Self, String> {
        let dimension = args.dimension.ok_or("--dimension is required")?;
        if dimension == 0 {
            return Err("--dimension must be at least 1".into());
        }
        if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
            return Err(format!(
                "--tolerance must be a positive number, got {}",
                args.tolerance
            ));
        }
        let space = match args.oam_window {
            Some(w) => ModeSpace::with_window(dimension, w).map_err(|e| e.to_string())?,
            None => ModeSpace::new(dimension).map_err(|e| e.to_string())?,
        };
        Ok(RunConfig {
            command,
            dimension,
            tolerance: args.tolerance,
            oam_window: space.oam_window(),
            seed: args.seed,
            format: args.format,
            output: args.output.clone(),
        })
    }

    pub fn space(&self) -> ModeSpace {
        ModeSpace::with_window(self.dimension, self.oam_window).expect("validated")
    }
}

/// A command outcome before it is written out.
struct Outcome {
    exit: i32,
    json: String,
    text: String,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let name = match cli.command {
        Command::Verify => "verify",
        Command::Route { .. } => "route",
        Command::Netlist { .. } => "netlist",
        Command::Scenario { .. } => "scenario",
    };
    let config = match RunConfig::from_args(&cli.global, name) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Verify => Ok(cmd_verify(&config)),
        Command::Route {
            kind,
            side,
            from,
            to,
        } => cmd_route(&config, *kind, (*side).into(), *from, *to),
        Command::Netlist {
            target,
            matrix_output,
        } => cmd_netlist(&config, *target, matrix_output.as_deref()),
        Command::Scenario {
            name,
            src,
            dst,
            from,
            to,
        } => cmd_scenario(&config, *name, src, dst, *from, to),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_IO;
        }
    };
    let body = match config.format {
        Format::Json => &outcome.json,
        Format::Text => &outcome.text,
    };
    // `netlist` writes its own file; every other command honors --output here.
    let written = match (&config.output, name) {
        (Some(path), n) if n != "netlist" => write_file(path, body),
        _ => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    };
    if let Err(Failure::Io(msg) | Failure::Usage(msg)) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_IO;
    }
    outcome.exit
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    checks: &'a [Check],
    config: &'a RunConfig,
}

fn cmd_verify(config: &RunConfig) -> Outcome {
    let checks = suites::run_all(config.space(), config.tolerance, config.seed);
    let all_pass = checks.iter().all(|c| c.pass);
    let mut text = format!(
        "verify D={} tolerance={:e} seed={}\n",
        config.dimension, config.tolerance, config.seed
    );
    for c in &checks {
        text += &format!(
            "{} {:<34} {:.3e}{}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured_error,
            c.detail
                .as_deref()
                .map(|d| format!("  ({d})"))
                .unwrap_or_default()
        );
    }
    Outcome {
        exit: if all_pass { EXIT_OK } else { EXIT_FAILURE },
        json: to_json(&VerifyReport {
            checks: &checks,
            config,
        }),
        text,
    }
}

#[derive(Serialize)]
struct RouteReport<'a> {
    kind: RouteKindArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    side: Option<Direction>,
    from: usize,
    to: usize,
    winding_number: i64,
    delivered_path: usize,
    delivered_oam: i64,
    sender_tag: i64,
    amplitude_modulus: f64,
    pass: bool,
    config: &'a RunConfig,
}

fn cmd_route(
    config: &RunConfig,
    kind: RouteKindArg,
    side: Direction,
    from: usize,
    to: usize,
) -> Result<Outcome, Failure> {
    let d = config.dimension;
    if from >= d || to >= d {
        return Err(Failure::Usage(format!(
            "--from {from} / --to {to} must be below the dimension {d}"
        )));
    }
    let space = config.space();
    let row = match kind {
        RouteKindArg::Simple => {
            let net = SimpleRoutingNetwork::with_space(space)?;
            let report = net.report(side)?;
            report
                .rows
                .into_iter()
                .find(|r| r.sender == from && r.destination == to)
        }
        RouteKindArg::Star => {
            let report = StarNetwork::with_space(space)?.report()?;
            report
                .rows
                .into_iter()
                .find(|r| r.sender == from && r.destination == to)
        }
    }
    .expect("exhaustive report covers every pair");
    if kind == RouteKindArg::Simple {
        debug_assert_eq!(row.winding_number, choose_winding_simple(from, to, d, side));
    }
    let pass = row.pass && (kind == RouteKindArg::Simple || row.sender_tag == from as i64);
    let report = RouteReport {
        kind,
        side: (kind == RouteKindArg::Simple).then_some(side),
        from,
        to,
        winding_number: row.winding_number,
        delivered_path: row.delivered_path,
        delivered_oam: row.delivered_oam,
        sender_tag: row.sender_tag,
        amplitude_modulus: row.amplitude_modulus,
        pass,
        config,
    };
    let text = format!(
        "{:?} route D={d}: {from} -> {to} with l={}: delivered path {}, OAM {} (tag {}), |amplitude|={:.9} {}\n",
        kind,
        row.winding_number,
        row.delivered_path,
        row.delivered_oam,
        row.sender_tag,
        row.amplitude_modulus,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(Outcome {
        exit: if pass { EXIT_OK } else { EXIT_FAILURE },
        json: to_json(&report),
        text,
    })
}

fn cmd_netlist(
    config: &RunConfig,
    target: NetlistTarget,
    matrix_output: Option<&Path>,
) -> Result<Outcome, Failure> {
    let d = config.dimension;
    let netlist = match target {
        NetlistTarget::Symmetric => symmetric_netlist(d)?,
        NetlistTarget::Oambs => oambs_netlist(d)?,
    };
    let mut json = netlist.to_json();
    json.push('\n');
    if let Some(path) = &config.output {
        write_file(path, &json)?;
    }
    if let Some(path) = matrix_output {
        let (basis, m) = mode_matrix(&netlist, d, &default_oam_values(d))?;
        write_file(path, &to_json(&MatrixDump::new(&basis, &m)))?;
    }
    let pass = netlist.metadata.replay_error <= config.tolerance;
    let text = format!(
        "{:?} netlist D={d}: {} elements ({} beamsplitters), parity flip {}, replay error {:.3e}{}\n",
        target,
        netlist.elements.len(),
        netlist.beamsplitter_count(),
        netlist.parity_flip,
        netlist.metadata.replay_error,
        config.output.as_ref().map(|p| format!(", written to {}", p.display())).unwrap_or_default()
    );
    // with --output the file holds the netlist and stdout gets a short summary
    let json = if config.output.is_some() {
        to_json(&serde_json::json!({
            "target": target,
            "output": config.output.as_ref().map(|p| p.display().to_string()),
            "replay_error": netlist.metadata.replay_error,
            "pass": pass,
        }))
    } else {
        json
    };
    Ok(Outcome {
        exit: if pass { EXIT_OK } else { EXIT_FAILURE },
        json,
        text,
    })
}

fn cmd_scenario(
    config: &RunConfig,
    name: ScenarioName,
    src: &[usize],
    dst: &[usize],
    from: Option<usize>,
    to: &[usize],
) -> Result<Outcome, Failure> {
    match name {
        ScenarioName::MuxRoundtrip => scenario_mux(config),
        ScenarioName::Bell => {
            let (&[x, y], &[n, m]) = (src, dst) else {
                return Err(Failure::Usage("bell needs --src x,y and --dst n,m".into()));
            };
            scenario_bell(config, x, y, n, m)
        }
        ScenarioName::Superposed => {
            let Some(from) = from else {
                return Err(Failure::Usage("superposed needs --from n".into()));
            };
            if to.is_empty() {
                return Err(Failure::Usage("superposed needs --to m1,m2,...".into()));
            }
            scenario_superposed(config, from, to)
        }
    }
}

#[derive(Serialize)]
struct MuxScenario<'a> {
    scenario: ScenarioName,
    inputs: Vec<QubitSpec>,
    multiplexed: Vec<json::EnsembleEntry>,
    received: Vec<json::EnsembleEntry>,
    transmit_fidelity: f64,
    roundtrip_fidelity: f64,
    pass: bool,
    config: &'a RunConfig,
}

fn scenario_mux(config: &RunConfig) -> Result<Outcome, Failure> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let net = MuxNetwork::with_space(config.space())?;
    let qubits: Vec<QubitSpec> = (0..config.dimension)
        .map(|_| QubitSpec::random(&mut rng))
        .collect();
    let sent = net.transmit(&qubits)?;
    let received = net.receive(&sent, true)?;
    let transmit_fidelity = fidelity(&sent, &net.expected_multiplexed(&qubits)?)?;
    let roundtrip_fidelity = fidelity(&received, &net.user_inputs(&qubits)?)?;
    let pass =
        1.0 - transmit_fidelity <= config.tolerance && 1.0 - roundtrip_fidelity <= config.tolerance;
    let text = format!(
        "mux-roundtrip D={}: {} photons on path 0, transmit fidelity {:.12}, round-trip fidelity {:.12} {}\n",
        config.dimension,
        qubits.len(),
        transmit_fidelity,
        roundtrip_fidelity,
        if pass { "PASS" } else { "FAIL" }
    );
    let report = MuxScenario {
        scenario: ScenarioName::MuxRoundtrip,
        inputs: qubits,
        multiplexed: json::ensemble(&sent),
        received: json::ensemble(&received),
        transmit_fidelity,
        roundtrip_fidelity,
        pass,
        config,
    };
    Ok(Outcome {
        exit: if pass { EXIT_OK } else { EXIT_FAILURE },
        json: to_json(&report),
        text,
    })
}

#[derive(Serialize)]
struct BellScenario<'a> {
    scenario: ScenarioName,
    src: [usize; 2],
    dst: [usize; 2],
    delivered: Vec<json::EnsembleEntry>,
    target: Vec<json::EnsembleEntry>,
    fidelity: f64,
    pass: bool,
    config: &'a RunConfig,
}

fn scenario_bell(
    config: &RunConfig,
    x: usize,
    y: usize,
    n: usize,
    m: usize,
) -> Result<Outcome, Failure> {
    let space = config.space();
    let delivered = StarNetwork::with_space(space)?.distribute_bell_pair(x, y, n, m)?;
    let target = bell_target(x, y, n, m, space)?;
    let f = fidelity(&delivered.oam_residues(config.dimension), &target)?;
    let pass = 1.0 - f <= config.tolerance;
    let text = format!(
        "bell D={}: sources ({x},{y}) -> users ({n},{m}), fidelity {f:.12} {}\n",
        config.dimension,
        if pass { "PASS" } else { "FAIL" }
    );
    let report = BellScenario {
        scenario: ScenarioName::Bell,
        src: [x, y],
        dst: [n, m],
        delivered: json::ensemble(&delivered),
        target: json::ensemble(&target),
        fidelity: f,
        pass,
        config,
    };
    Ok(Outcome {
        exit: if pass { EXIT_OK } else { EXIT_FAILURE },
        json: to_json(&report),
        text,
    })
}

#[derive(Serialize)]
struct SuperposedScenario<'a> {
    scenario: ScenarioName,
    from: usize,
    to: &'a [usize],
    delivered: Vec<json::PhotonEntry>,
    path_weights: std::collections::BTreeMap<String, f64>,
    pass: bool,
    config: &'a RunConfig,
}

fn scenario_superposed(config: &RunConfig, from: usize, to: &[usize]) -> Result<Outcome, Failure> {
    let c = Complex64::new(1.0 / (to.len() as f64).sqrt(), 0.0);
    let dests: Vec<(usize, Complex64)> = to.iter().map(|&m| (m, c)).collect();
    let out = StarNetwork::with_space(config.space())?.superposed(from, &dests)?;
    let probs = out.path_probabilities();
    let expected = c.norm_sqr();
    let pass = to
        .iter()
        .all(|m| (probs.get(m).copied().unwrap_or(0.0) - expected).abs() <= config.tolerance)
        && probs.keys().all(|p| to.contains(p));
    let weights = json::path_weights(&out);
    let text = format!(
        "superposed D={}: sender {from} -> {:?}, path weights {:?} {}\n",
        config.dimension,
        to,
        probs,
        if pass { "PASS" } else { "FAIL" }
    );
    let report = SuperposedScenario {
        scenario: ScenarioName::Superposed,
        from,
        to,
        delivered: json::photon(&out),
        path_weights: weights,
        pass,
        config,
    };
    Ok(Outcome {
        exit: if pass { EXIT_OK } else { EXIT_FAILURE },
        json: to_json(&report),
        text,
    })
}
