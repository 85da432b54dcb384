//! The `affmin` command line: `measure`, `sweep`, `dynamics` and `verify`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::channels::{dynamics_sweep, unit_grid};
use crate::error::{Error, Result};
use crate::format::csv_number;
use crate::linalg;
use crate::measures::{
    affinity_alpha, apply_measurement, closed_form_isotropic, closed_form_two_qubit_werner,
    closed_form_werner, concurrence, hs_min, min_affinity, min_affinity_upper_bound, ClosedForm,
    MinConfig, MinResult, DEFAULT_DEG_TOL,
};
use crate::states::{BipartiteState, CorrelationVector};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_STATE: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "affmin",
    version,
    about = "Affinity-based measurement-induced nonlocality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute all measures for a state file and print a JSON report.
    Measure(MeasureArgs),
    /// Closed-form MIN values along a one-parameter state family, as CSV.
    Sweep(SweepArgs),
    /// Bell-diagonal state under generalized amplitude damping (p = 1/2), as CSV.
    Dynamics(DynamicsArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    pub state_file: PathBuf,
    /// Order of the alpha-affinity between the state and its optimally measured version.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long, default_value_t = DEFAULT_DEG_TOL)]
    pub deg_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Werner,
    Isotropic,
    /// Two-qubit line `c = (-p, -p, -p)`, `p` in `[-1/3, 1]`.
    BellDiagonalLine,
}

impl Family {
    pub fn range(&self) -> (f64, f64) {
        match self {
            Family::Werner => (-1.0, 1.0),
            Family::Isotropic => (0.0, 1.0),
            Family::BellDiagonalLine => (-1.0 / 3.0, 1.0),
        }
    }

    pub fn evaluate(&self, m: usize, x: f64) -> Result<ClosedForm> {
        match self {
            Family::Werner => closed_form_werner(m, x),
            Family::Isotropic => closed_form_isotropic(m, x),
            Family::BellDiagonalLine => closed_form_two_qubit_werner(x),
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Defaults to the lower end of the family's range.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub end: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Initial correlation vector `c1,c2,c3`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "1,1,-1"
    )]
    pub c0: Vec<f64>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of metric-axioms, min-equivalences, ancilla, bounds, channel, or all.
    pub suite: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Validated sweep request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub m: usize,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn new(family: Family, m: usize, start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Range(format!(
                "points = {points} must be at least 2"
            )));
        }
        let (lo, hi) = family.range();
        let inside = |x: f64| x >= lo - 1e-12 && x <= hi + 1e-12;
        if !inside(start) || !inside(end) {
            return Err(Error::Range(format!(
                "[{start}, {end}] leaves the {family:?} range [{lo}, {hi}]"
            )));
        }
        if family == Family::BellDiagonalLine && m != 2 {
            return Err(Error::Range(format!(
                "bell-diagonal-line is two-qubit, got m = {m}"
            )));
        }
        if m < 2 {
            return Err(Error::Range(format!("m = {m} must be at least 2")));
        }
        Ok(Self {
            family,
            m,
            start: start.clamp(lo, hi),
            end: end.clamp(lo, hi),
            points,
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                // exact endpoints, so the family's vanishing points land on the grid
                if i == n {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

pub fn sweep_csv(spec: &SweepSpec) -> Result<String> {
    let mut out = String::from("param,n_affinity,n_hs\n");
    for x in spec.grid() {
        let v = spec.family.evaluate(spec.m, x)?;
        out.push_str(&format!(
            "{},{},{}\n",
            csv_number(x),
            csv_number(v.affinity_min),
            csv_number(v.hs_min)
        ));
    }
    Ok(out)
}

pub fn dynamics_csv(c0: CorrelationVector, points: usize) -> Result<String> {
    if points < 2 {
        return Err(Error::Range(format!(
            "points = {points} must be at least 2"
        )));
    }
    let mut out = String::from("gamma,n_affinity,n_hs,concurrence\n");
    for r in dynamics_sweep(c0, &unit_grid(points))? {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_number(r.gamma),
            csv_number(r.n_affinity),
            csv_number(r.n_hs),
            csv_number(r.concurrence)
        ));
    }
    Ok(out)
}

fn measurement_json(r: &MinResult) -> Value {
    let mut v = json!({
        "value": r.value,
        "method": r.method.as_str(),
        "iterations": r.iterations,
        "converged": r.converged,
    });
    if let Some(b) = r.measurement.bloch_vector() {
        v["bloch_vector"] = json!(b);
    }
    let basis = r.measurement.basis();
    v["basis"] = json!((0..basis.nrows())
        .map(|i| (0..basis.ncols())
            .map(|j| [basis[(i, j)].re, basis[(i, j)].im])
            .collect())
        .collect::<Vec<Vec<[f64; 2]>>>());
    v
}

/// The JSON report written by `affmin measure`.
///
/// `alpha_affinity` is `A_alpha(rho, Pi(rho))` for the measurement `Pi` that attains the
/// affinity MIN.
pub fn measure_report(rho: &BipartiteState, cfg: &MinConfig, alpha: f64) -> Result<Value> {
    let n_aff = min_affinity(rho, cfg)?;
    let n_hs = hs_min(rho, cfg)?;
    let measured = apply_measurement(rho, &n_aff.measurement)?;
    let conc = if rho.dim_a() == 2 && rho.dim_b() == 2 {
        json!(concurrence(rho)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "dimA": rho.dim_a(),
        "dimB": rho.dim_b(),
        "n_affinity": measurement_json(&n_aff),
        "n_hs": measurement_json(&n_hs),
        "upper_bound": min_affinity_upper_bound(rho),
        "concurrence": conc,
        "purity": rho.purity(),
        "spectrum_a": linalg::eigvalsh(&rho.marginal_a())?,
        "spectrum_b": linalg::eigvalsh(&rho.marginal_b())?,
        "alpha": alpha,
        "alpha_affinity": affinity_alpha(rho.matrix(), measured.matrix(), alpha)?,
    }))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => EXIT_PARSE,
        Error::InvalidState(_)
        | Error::NotHermitian { .. }
        | Error::NotPsd { .. }
        | Error::NotPure { .. }
        | Error::OutsideTetrahedron { .. } => EXIT_INVALID_STATE,
        Error::Range(_) | Error::Dimension(_) => EXIT_USAGE,
        Error::IncompleteMeasurement(_) | Error::InvalidChannel(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

fn load_state(path: &Path) -> Result<BipartiteState> {
    let text = std::fs::read_to_string(path)?;
    BipartiteState::from_json_str(&text).map_err(|e| match e {
        // a well-formed document with inconsistent dimensions is still a state defect
        Error::Dimension(msg) => Error::InvalidState(msg),
        other => other,
    })
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Measure(a) => {
            if !(a.alpha > 0.0 && a.alpha < 1.0) {
                return Err(Error::Range(format!("--alpha {} not in (0, 1)", a.alpha)));
            }
            if a.starts == 0 {
                return Err(Error::Range("--starts must be positive".into()));
            }
            let rho = load_state(&a.state_file)?;
            let cfg = MinConfig {
                seed: a.seed,
                starts: a.starts,
                deg_tol: a.deg_tol,
                ..Default::default()
            };
            let report = measure_report(&rho, &cfg, a.alpha)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            emit(&text, a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Sweep(a) => {
            let (lo, hi) = a.family.range();
            let spec = SweepSpec::new(
                a.family,
                a.m,
                a.start.unwrap_or(lo),
                a.end.unwrap_or(hi),
                a.points,
            )?;
            emit(&sweep_csv(&spec)?, a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Dynamics(a) => {
            let &[c1, c2, c3] = a.c0.as_slice() else {
                return Err(Error::Range(format!(
                    "--c0 needs 3 values, got {}",
                    a.c0.len()
                )));
            };
            let c0 = CorrelationVector::new(c1, c2, c3)?;
            emit(&dynamics_csv(c0, a.points)?, a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let suites = if a.suite == "all" {
                Suite::ALL.to_vec()
            } else {
                match a.suite.parse::<Suite>() {
                    Ok(s) => vec![s],
                    Err(e) => {
                        eprintln!("error: {e}");
                        return Ok(EXIT_USAGE);
                    }
                }
            };
            let mut ok = true;
            for s in suites {
                let report = run_suite(s, a.seed)?;
                print!("{report}");
                ok &= report.all_passed();
            }
            Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid_hits_vanishing_points() {
        let spec = SweepSpec::new(Family::Isotropic, 2, 0.0, 1.0, 5).unwrap();
        let csv = sweep_csv(&spec).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "param,n_affinity,n_hs");
        assert_eq!(rows[2], "0.25,0,0");
        assert_eq!(rows[5], "1,0.5,0.5");

        let spec = SweepSpec::new(Family::Werner, 2, -1.0, 1.0, 5).unwrap();
        let csv = sweep_csv(&spec).unwrap();
        assert!(csv.lines().any(|l| l == "0.5,0,0"), "{csv}");
    }

    #[test]
    fn sweep_spec_rejects_bad_ranges() {
        assert!(SweepSpec::new(Family::Isotropic, 2, -0.1, 1.0, 5).is_err());
        assert!(SweepSpec::new(Family::Werner, 3, -1.0, 1.0, 1).is_err());
        assert!(SweepSpec::new(Family::BellDiagonalLine, 3, 0.0, 1.0, 5).is_err());
        assert!(SweepSpec::new(Family::Werner, 1, 0.0, 1.0, 5).is_err());
    }

    #[test]
    fn bell_diagonal_line_endpoint() {
        let spec = SweepSpec::new(Family::BellDiagonalLine, 2, -1.0 / 3.0, 1.0, 3).unwrap();
        let csv = sweep_csv(&spec).unwrap();
        assert_eq!(csv.lines().last().unwrap(), "1,0.5,0.5");
    }

    #[test]
    fn dynamics_zero_vector() {
        let csv = dynamics_csv(CorrelationVector::new(0.0, 0.0, 0.0).unwrap(), 11).unwrap();
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",0,0,0")));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_PARSE);
        assert_eq!(
            exit_code(&Error::InvalidState("x".into())),
            EXIT_INVALID_STATE
        );
        assert_eq!(exit_code(&Error::Range("x".into())), EXIT_USAGE);
        assert_eq!(run(["affmin", "verify", "nope"]), EXIT_USAGE);
        assert_eq!(run(["affmin", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["affmin", "--help"]), EXIT_OK);
    }
}
