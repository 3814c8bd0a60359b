//! The `polarmap` command line.
//!
//! Exit codes: 0 on success, 2 when an input fails validation or a check
//! fails, 1 for usage and I/O errors. Every failure prints one line to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cloude::{classify, cloude_decompose, KrausSet};
use crate::io::{complex_rows, read_matrix, serialize_matrix, TypedMatrix};
use crate::linalg::c;
use crate::mems::{mems_mueller_pair, mems_state, verify_mems};
use crate::metrics::{boundary_curves, monte_carlo_dichroic, write_curves_csv, write_scatter_csv};
use crate::mueller::{mueller_from_jones, MuellerStd};
use crate::network::{figure_layout, figure_network, network_equals_kraus, run_network};
use crate::qmaps::{apply_bilocal, apply_one_qubit, singlet};
use crate::stokes::JonesVector;

/// Tolerance for `mems --check`.
pub const MEMS_CHECK_TOL: f64 = 1e-9;
/// Tolerance and input count for `network --check`.
pub const NETWORK_CHECK_TOL: f64 = 1e-10;
pub const NETWORK_CHECK_TRIALS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "polarmap", version, about = "Polarization optics as one- and two-qubit quantum maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Standard- and Pauli-basis Mueller matrices of a Jones matrix document.
    Jones2mueller { input: PathBuf },
    /// Cloude eigenvalues, Jones (Kraus) operators and classification of a Mueller matrix.
    Cloude { input: PathBuf },
    /// Classification of a Mueller matrix; exits 2 if it is unphysical.
    Validate { input: PathBuf },
    /// Applies a map (or a pair of local maps) to a one- or two-qubit state.
    Apply {
        #[arg(long)]
        map: PathBuf,
        /// Map on qubit B; identity when omitted.
        #[arg(long)]
        map_b: Option<PathBuf>,
        #[arg(long, required_unless_present = "singlet")]
        state: Option<PathBuf>,
        /// Use the singlet as the input state.
        #[arg(long, conflicts_with = "state")]
        singlet: bool,
    },
    /// Monte Carlo scatter of dichroic maps applied to the singlet, as CSV.
    SimulateDichroic {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, env = "POLARMAP_SEED", default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Werner and MEMS boundary curves in the (S_L, τ) plane, as CSV.
    Curves {
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// MEMS state, Mueller pair and Kraus operators for a given p.
    Mems {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        /// Run the full verification and exit 2 if it fails.
        #[arg(long)]
        check: bool,
    },
    /// Runs one of the MEMS optical networks on a pure input.
    Network {
        #[arg(long, value_parser = clap::value_parser!(u8).range(5..=8))]
        figure: u8,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        /// Input amplitudes `a_re,a_im,b_re,b_im` of `a|H⟩ + b|V⟩`.
        #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
        input: String,
        /// Compare against the closed-form Kraus map on random inputs.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Invalid(crate::Error),
    Check(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Invalid(_) | Failure::Check(_) => 2,
        }
    }

    fn line(&self) -> String {
        let (tag, msg) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Io(m) => ("io", m.clone()),
            Failure::Invalid(e) => ("invalid", e.to_string()),
            Failure::Check(m) => ("check", m.clone()),
        };
        format!("polarmap: {tag}: {}", msg.replace('\n', " "))
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(err, "{}", Failure::Usage(first.trim_start_matches("error: ").to_string()).line());
            return 1;
        }
    };
    match dispatch(&cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.line());
            f.code()
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Jones2mueller { input } => jones2mueller(input, out),
        Command::Cloude { input } => cloude(input, out),
        Command::Validate { input } => validate(input, out),
        Command::Apply { map, map_b, state, singlet } => apply(map, map_b.as_deref(), state.as_deref(), *singlet, out),
        Command::SimulateDichroic { samples, seed, out: path } => {
            let data = monte_carlo_dichroic(*samples, *seed);
            with_sink(path.as_deref(), out, |w| write_scatter_csv(&data, w))
        }
        Command::Curves { grid, out: path } => {
            let (werner, mems) = boundary_curves(*grid)?;
            with_sink(path.as_deref(), out, |w| write_curves_csv(&[werner, mems], w))
        }
        Command::Mems { p, check } => mems(*p, *check, out),
        Command::Network { figure, p, input, check } => network(*figure, *p, input, *check, out),
    }
}

fn with_sink(
    path: Option<&Path>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Outcome {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(out)?,
    }
    Ok(())
}

fn emit(out: &mut dyn Write, v: &impl Serialize) -> Outcome {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn load(path: &Path) -> std::result::Result<TypedMatrix, Failure> {
    read_matrix(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        .map_err(Failure::Invalid)
}

fn load_mueller(path: &Path) -> std::result::Result<MuellerStd, Failure> {
    let m = load(path)?;
    m.as_mueller_std().ok_or_else(|| {
        Failure::Usage(format!("{}: expected a jones or mueller document, got {}", path.display(), m.kind().as_str()))
    })
}

fn kraus_json(ks: &KrausSet) -> Value {
    ks.terms
        .iter()
        .map(|t| json!({ "weight": t.weight, "jones": complex_rows(&t.op.t) }))
        .collect()
}

fn jones2mueller(input: &Path, out: &mut dyn Write) -> Outcome {
    let t = match load(input)? {
        TypedMatrix::Jones(t) => t,
        other => return Err(Failure::Usage(format!("expected a jones document, got {}", other.kind().as_str()))),
    };
    let (std, real) = mueller_from_jones(&t);
    emit(
        out,
        &json!({
            "mueller_std": serialize_matrix(&TypedMatrix::MuellerStd(std)),
            "mueller_real": serialize_matrix(&TypedMatrix::MuellerReal(real)),
        }),
    )
}

fn cloude(input: &Path, out: &mut dyn Write) -> Outcome {
    let m = load_mueller(input)?;
    let ks = cloude_decompose(&m)?;
    emit(
        out,
        &json!({
            "eigenvalues": ks.weights(),
            "kraus": kraus_json(&ks),
            "classification": classify(&m),
        }),
    )
}

fn validate(input: &Path, out: &mut dyn Write) -> Outcome {
    let cls = classify(&load_mueller(input)?);
    emit(out, &cls)?;
    if cls.physical {
        Ok(())
    } else {
        Err(Failure::Check(format!("map is unphysical (minimum normalized eigenvalue {:e})", cls.min_eigenvalue)))
    }
}

fn apply(map: &Path, map_b: Option<&Path>, state: Option<&Path>, use_singlet: bool, out: &mut dyn Write) -> Outcome {
    let m_a = load_mueller(map)?;
    let m_b = map_b.map(load_mueller).transpose()?;
    let input = match (state, use_singlet) {
        (_, true) => TypedMatrix::Density2(singlet()),
        (Some(p), false) => load(p)?,
        (None, false) => return Err(Failure::Usage("either --state or --singlet is required".into())),
    };
    let (rho, trace) = match input {
        TypedMatrix::Density1(r) => {
            if m_b.is_some() {
                return Err(Failure::Usage("--map-b needs a two-qubit state".into()));
            }
            let (r, t) = apply_one_qubit(&m_a, &r)?;
            (TypedMatrix::Density1(r), t)
        }
        TypedMatrix::Density2(r) => {
            let (r, t) = apply_bilocal(&m_a, &m_b.unwrap_or_else(MuellerStd::identity), &r)?;
            (TypedMatrix::Density2(r), t)
        }
        other => return Err(Failure::Usage(format!("expected a density document, got {}", other.kind().as_str()))),
    };
    emit(out, &json!({ "rho": serialize_matrix(&rho), "trace": trace }))
}

fn mems(p: f64, check: bool, out: &mut dyn Write) -> Outcome {
    let pair = mems_mueller_pair(p)?;
    let rho = mems_state(p)?;
    let mut doc = json!({
        "p": p,
        "region": pair.params.region,
        "g": pair.params.g,
        "rho_mems": serialize_matrix(&TypedMatrix::Density2(rho)),
        "mueller_a": serialize_matrix(&TypedMatrix::MuellerReal(pair.m_a)),
        "mueller_b": serialize_matrix(&TypedMatrix::MuellerReal(pair.m_b)),
        "kraus_a": kraus_json(&pair.kraus_a),
        "kraus_b": kraus_json(&pair.kraus_b),
        "spectrum": pair.spectrum,
    });
    if !check {
        return emit(out, &doc);
    }
    let report = verify_mems(p)?;
    let passed = report.passed(MEMS_CHECK_TOL);
    doc["report"] = serde_json::to_value(&report).map_err(|e| Failure::Io(e.to_string()))?;
    doc["max_error"] = json!(report.max_error());
    doc["passed"] = json!(passed);
    emit(out, &doc)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("MEMS verification failed (max error {:e})", report.max_error())))
    }
}

fn parse_input(s: &str) -> std::result::Result<JonesVector, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("--input: {e}")))?;
    match parts[..] {
        [a_re, a_im, b_re, b_im] if parts.iter().all(|x| x.is_finite()) => {
            Ok(JonesVector::new(c(a_re, a_im), c(b_re, b_im)))
        }
        _ => Err(Failure::Usage("--input expects four finite numbers a_re,a_im,b_re,b_im".into())),
    }
}

fn network(figure: u8, p: f64, input: &str, check: bool, out: &mut dyn Write) -> Outcome {
    let psi = parse_input(input)?;
    let spec = figure_network(figure, p)?;
    let res = run_network(&spec, &psi)?;
    let branches: Vec<Value> = res
        .branches
        .iter()
        .map(|b| json!({ "mode": b.mode, "label": b.label, "state": [[b.state.e0.re, b.state.e0.im], [b.state.e1.re, b.state.e1.im]] }))
        .collect();
    let mut doc = json!({
        "figure": figure,
        "p": p,
        "branches": branches,
        "rho": complex_rows(&res.rho),
        "trace": res.trace(),
    });
    if !check {
        return emit(out, &doc);
    }
    let (side, _) = figure_layout(figure)?;
    let err = network_equals_kraus(side, p, NETWORK_CHECK_TRIALS)?;
    doc["kraus_max_error"] = json!(err);
    doc["passed"] = json!(err <= NETWORK_CHECK_TOL);
    emit(out, &doc)?;
    if err <= NETWORK_CHECK_TOL {
        Ok(())
    } else {
        Err(Failure::Check(format!("network differs from Kraus map by {err:e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_with_io(std::iter::once("polarmap").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run(&["frobnicate"]);
        assert_eq!(code, 1);
        assert_eq!(err.lines().count(), 1);
        let (code, _, err) = run(&["mems", "--p", "0.5", "--bogus"]);
        assert_eq!(code, 1);
        assert_eq!(err.lines().count(), 1);
        let (code, _, _) = run(&["network", "--figure", "4", "--p", "0.5"]);
        assert_eq!(code, 1);
        let (code, _, _) = run(&["network", "--figure", "5", "--p", "0.9", "--input", "1,2"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(run(&["--help"]).0, 0);
        assert_eq!(run(&["--version"]).0, 0);
    }

    #[test]
    fn validation_failures_exit_two() {
        let (code, _, err) = run(&["mems", "--p", "1.5"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("polarmap: invalid:"));
        let (code, _, _) = run(&["network", "--figure", "5", "--p", "0.5"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn mems_check_passes() {
        let (code, out, _) = run(&["mems", "--p", "0.8", "--check"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["max_error"].as_f64().unwrap() <= MEMS_CHECK_TOL);
        assert_eq!(v["passed"], json!(true));
    }

    #[test]
    fn network_check_passes() {
        let (code, out, _) = run(&["network", "--figure", "8", "--p", "0.4", "--input", "0.6,0,0,0.8", "--check"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v["branches"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn missing_file_is_io_error() {
        let (code, _, err) = run(&["validate", "/nonexistent/m.json"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("polarmap: io:"));
    }
}
