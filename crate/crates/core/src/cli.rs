//! Command-line front end and the matrix/report file formats.
//!
//! Exit codes: 0 pass, 1 check failed, 2 usage or input error. Certificates
//! go to stdout as single-line JSON; human-readable logs go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DEFAULT_RANK_THRESHOLD};
use crate::optimality::{check_optimality, ZERO_FAMILY_TOL};
use crate::posmap::{
    check_bistochastic_tol, check_positivity_rank1_tol, MapSpec, POSITIVITY_TOL, TRACE_TOL,
};
use crate::states::{build_rho, check_ppt_tol, detect, detect_matrices, PPT_TOL};
use crate::witness::{
    build_witness, check_block_positivity, Normalization, BLOCK_POSITIVITY_TOL, DEFAULT_MAX_ITERS,
    DEFAULT_RESTARTS,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fallback seed when neither `--seed` nor `PMTOOL_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;

// ---------------------------------------------------------------------------
// File formats

/// `{"rows": m, "cols": n, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        let data = f
            .data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        ComplexMatrix::from_row_major(f.rows, f.cols, data)
    }
}

/// Serialized matrix; floats use the shortest round-tripping representation.
pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixFile::from(m)).expect("matrix serializes")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let f: MatrixFile = serde_json::from_str(s)
        .map_err(|e| Error::InvalidArgument(format!("malformed matrix file: {e}")))?;
    f.try_into()
}

/// Output of `certify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub d: usize,
    pub seed: u64,
    pub certificates: Vec<Certificate>,
    pub toolkit_version: String,
    pub timestamp: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "pmtool",
    version,
    about = "Certify the bistochastic positive maps Λ_d, their witnesses and PPT entangled states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a witness or state matrix as JSON.
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "projector")]
        normalization: Normalization,
        /// Divide ρ by its trace.
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one certification check and print its certificate.
    Check {
        #[arg(value_enum)]
        check: CheckKind,
        #[arg(long)]
        d: usize,
        /// Sample count; restarts for block-positivity.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
    },
    /// Evaluate Tr(W·ρ) for a witness and a state file.
    Detect { witness: PathBuf, state: PathBuf },
    /// Run the full certification suite for one d.
    Certify {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SeedArg {
    #[arg(long, env = "PMTOOL_SEED")]
    seed: Option<u64>,
}

impl SeedArg {
    fn value(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BuildKind {
    Witness,
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Bistochastic,
    Positivity,
    BlockPositivity,
    Ppt,
    Optimality,
}

impl clap::builder::ValueParserFactory for Normalization {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Normalization>())
    }
}

// ---------------------------------------------------------------------------
// Commands

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn verdict(passed: bool) -> i32 {
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn print_certificate(out: &mut dyn Write, cert: &Certificate) -> Result<()> {
    let line = serde_json::to_string(cert).expect("certificate serializes");
    writeln!(out, "{line}").map_err(|e| Error::InvalidArgument(format!("stdout: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let s = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    matrix_from_json(&s)
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Build {
            kind,
            d,
            normalization,
            normalized,
            out,
        } => {
            let spec = MapSpec::new(d)?;
            let matrix = match kind {
                BuildKind::Witness => build_witness(spec, normalization)?.matrix,
                BuildKind::Rho => build_rho(d, normalized)?.matrix,
            };
            write_file(&out, &matrix_to_json(&matrix))?;
            let _ = writeln!(
                stderr,
                "wrote {}×{} matrix to {}",
                matrix.rows(),
                matrix.cols(),
                out.display()
            );
            Ok(EXIT_PASS)
        }
        Command::Check {
            check,
            d,
            samples,
            seed,
            tol,
        } => {
            let spec = MapSpec::new(d)?;
            let cert = run_check(check, spec, samples, seed.value(), tol)?;
            print_certificate(stdout, &cert)?;
            Ok(verdict(cert.passed))
        }
        Command::Detect { witness, state } => {
            let w = read_matrix(&witness)?;
            let rho = read_matrix(&state)?;
            let cert = detect_matrices(&w, &rho, "files")?;
            let _ = writeln!(
                stderr,
                "Tr(W·rho) = {:.17e}",
                cert.value.unwrap_or(f64::NAN)
            );
            print_certificate(stdout, &cert)?;
            Ok(verdict(cert.passed))
        }
        Command::Certify { d, seed, out } => {
            let report = certify(d, seed.value())?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match out {
                Some(path) => write_file(&path, &json)?,
                None => {
                    writeln!(stdout, "{json}")
                        .map_err(|e| Error::InvalidArgument(format!("stdout: {e}")))?;
                }
            }
            let _ = writeln!(stderr, "{}", summary(&report));
            Ok(verdict(report.passed()))
        }
    }
}

/// One check with CLI defaults for sample counts and tolerances.
pub fn run_check(
    check: CheckKind,
    spec: MapSpec,
    samples: Option<usize>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Certificate> {
    let d = spec.d();
    let cert = match check {
        CheckKind::Bistochastic => {
            check_bistochastic_tol(spec, samples.unwrap_or(100), seed, tol.unwrap_or(TRACE_TOL))
        }
        CheckKind::Positivity => check_positivity_rank1_tol(
            spec,
            samples.unwrap_or(1000),
            seed,
            tol.unwrap_or(POSITIVITY_TOL),
        ),
        CheckKind::BlockPositivity => check_block_positivity(
            spec,
            samples.unwrap_or(DEFAULT_RESTARTS),
            DEFAULT_MAX_ITERS,
            seed,
            tol.unwrap_or(BLOCK_POSITIVITY_TOL),
        )?,
        CheckKind::Ppt => {
            let mut c = check_ppt_tol(&build_rho(d, false)?, tol.unwrap_or(PPT_TOL))?;
            c.seed = None;
            c
        }
        CheckKind::Optimality => {
            let n = samples.unwrap_or(d * d + 20);
            check_optimality(
                spec,
                n,
                n,
                seed,
                tol.unwrap_or(ZERO_FAMILY_TOL),
                DEFAULT_RANK_THRESHOLD,
            )?
        }
    };
    Ok(cert)
}

/// The full suite: bistochasticity, positivity, PPT, detection,
/// optimality and block positivity of the witness.
pub fn certify(d: usize, seed: u64) -> Result<Report> {
    let spec = MapSpec::new(d)?;
    let bistochastic = check_bistochastic_tol(spec, 100, seed, TRACE_TOL);
    let positivity = check_positivity_rank1_tol(spec, 1000, seed, POSITIVITY_TOL);
    let rho = build_rho(d, false)?;
    let ppt = check_ppt_tol(&rho, PPT_TOL)?;
    let w = build_witness(spec, Normalization::default())?;
    let detection = detect(&w, &rho)?.require(ppt.passed);
    let optimality = check_optimality(
        spec,
        1000,
        d * d + 20,
        seed,
        ZERO_FAMILY_TOL,
        DEFAULT_RANK_THRESHOLD,
    )?;
    let block = check_block_positivity(
        spec,
        DEFAULT_RESTARTS,
        DEFAULT_MAX_ITERS,
        seed,
        BLOCK_POSITIVITY_TOL,
    )?;
    Ok(Report {
        d,
        seed,
        certificates: vec![bistochastic, positivity, ppt, detection, optimality, block],
        toolkit_version: TOOLKIT_VERSION.to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    })
}

pub fn summary(report: &Report) -> String {
    let mut s = format!("certify d = {} (seed {})\n", report.d, report.seed);
    for c in &report.certificates {
        let value = c
            .value
            .map(|v| format!("{v:.6e}"))
            .unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "  [{}] {:<18} value {:>14}  tol {:.1e}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            value,
            c.tolerance
        ));
    }
    s.push_str(if report.passed() {
        "all checks passed"
    } else {
        "some checks FAILED"
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pmtool").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn matrix_json_shape() {
        let m = ComplexMatrix::from_fn(1, 2, |_, j| Complex64::new(j as f64, -0.5));
        assert_eq!(
            matrix_to_json(&m),
            r#"{"rows":1,"cols":2,"data":[[0.0,-0.5],[1.0,-0.5]]}"#
        );
    }

    #[test]
    fn matrix_json_is_lossless() {
        let m = crate::sampling::GaussianSampler::new(3).complex_matrix(4, 5);
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn matrix_json_rejects_bad_input() {
        assert!(matrix_from_json(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
        assert!(matrix_from_json("not json").is_err());
    }

    #[test]
    fn build_rejects_small_d() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("w.json");
        let (code, _, err) = run_args(&[
            "build",
            "witness",
            "--d",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("d must be ≥ 3"), "{err}");
    }

    #[test]
    fn unknown_check_is_usage_error() {
        let (code, _, _) = run_args(&["check", "nonsense", "--d", "3"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn check_prints_single_line_certificate() {
        let (code, out, _) = run_args(&["check", "ppt", "--d", "4"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(out.lines().count(), 1);
        let cert: Certificate = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(cert.name, "ppt");
        assert!(cert.passed);
    }

    #[test]
    fn tolerance_override_can_fail_a_check() {
        // Negative tolerance: eigenvalues must exceed +1.
        let (code, out, _) = run_args(&[
            "check",
            "positivity",
            "--d",
            "3",
            "--samples",
            "10",
            "--tol",
            "-1",
        ]);
        assert_eq!(code, EXIT_FAIL);
        let cert: Certificate = serde_json::from_str(out.trim()).unwrap();
        assert!(!cert.passed);
    }

    #[test]
    fn optimality_needs_enough_samples() {
        let (code, _, err) = run_args(&["check", "optimality", "--d", "3", "--samples", "4"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("d²"));
    }
}
