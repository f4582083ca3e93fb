//! Command-line front end: problem documents in, solve records and
//! plot-ready CSV out. Exit status 0 on success, 2 on validation or parse
//! errors, 3 when an iteration fails to converge.

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use extremal::fmt::sci17;
use extremal::{
    angle_grid_oracle_2d, boundary_sample_oracle, compare, continuity_probe, geometric_grid,
    kkt_verify, lambda_grid_oracle, linear_grid, smoothness_probe, solve_extremal,
    sweep_direction, sweep_epsilon, sweep_ray, AnyProblem, ComparisonReport, ExtremalResult,
    KktReport, Problem, Scalar, SolverConfig,
};
use nalgebra::{Complex, DVector};

const LAMBDA_ORACLE_DECADES: u32 = 12;
const ANGLE_ORACLE_POINTS: usize = 3600;

#[derive(Parser)]
#[command(
    name = "extremal",
    version,
    about = "Minimal-norm vectors under a residual ball constraint"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem document: JSON with matrix (rows), x0, epsilon, optional
    /// field ("real" or "complex").
    #[arg(long, value_name = "PATH")]
    problem: PathBuf,
    /// Output path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative tolerance on | ||Ty - x0|| - epsilon |.
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,
    /// Budget of secular-equation evaluations.
    #[arg(long, value_name = "INT")]
    max_iter: Option<u32>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut config = SolverConfig::default();
        if let Some(tol) = self.tol {
            config.tol_residual_rel = tol;
        }
        if let Some(max_iter) = self.max_iter {
            config.max_iterations = max_iter;
        }
        config
    }
}

#[derive(Clone)]
struct GridSpec {
    start: f64,
    stop: f64,
    count: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected start,stop,count, got {s:?}"));
        }
        let start = parts[0].trim().parse().map_err(|e| format!("grid start: {e}"))?;
        let stop = parts[1].trim().parse().map_err(|e| format!("grid stop: {e}"))?;
        let count = parts[2].trim().parse().map_err(|e| format!("grid count: {e}"))?;
        Ok(GridSpec { start, stop, count })
    }
}

#[derive(Args)]
struct GridArgs {
    /// Inclusive grid over the swept parameter.
    #[arg(long, value_name = "START,STOP,COUNT", allow_hyphen_values = true)]
    grid: GridSpec,
    /// Space the grid geometrically instead of uniformly.
    #[arg(long)]
    log_grid: bool,
}

impl GridArgs {
    fn build(&self) -> extremal::Result<Vec<f64>> {
        if self.log_grid {
            geometric_grid(self.grid.start, self.grid.stop, self.grid.count)
        } else {
            linear_grid(self.grid.start, self.grid.stop, self.grid.count)
        }
    }

    /// The same grid walked from its large end toward zero, as the probes
    /// expect their step ladders.
    fn build_ladder(&self) -> extremal::Result<Vec<f64>> {
        let mut ladder = self.build()?;
        ladder.reverse();
        Ok(ladder)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the extremal vector and emit its record.
    Solve {
        #[command(flatten)]
        io: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve over an epsilon grid; CSV param,y_norm,r,residual.
    SweepEps {
        #[command(flatten)]
        io: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Solve with the center at t*x0 over a t grid; CSV as sweep-eps.
    SweepRay {
        #[command(flatten)]
        io: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Solve with the center at x0 + t*u over a t grid; CSV as sweep-eps.
    SweepDir {
        #[command(flatten)]
        io: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Direction u, comma-separated entries.
        #[arg(
            long,
            value_name = "V1,V2,...",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        direction: Vec<f64>,
    },
    /// Measure ||y(x0 + delta u) - y(x0)|| while delta shrinks; the --grid
    /// values are walked from stop down to start. CSV step,measurement.
    ProbeContinuity {
        #[command(flatten)]
        io: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Direction u, comma-separated entries; normalized before use.
        #[arg(
            long,
            value_name = "V1,V2,...",
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        direction: Vec<f64>,
    },
    /// Central-difference derivative of ||y_eps|| while the step shrinks;
    /// the --grid values are walked from stop down to start. CSV
    /// step,measurement.
    ProbeSmoothness {
        #[command(flatten)]
        io: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Re-run the stationarity report on a previously emitted y.
    Verify {
        #[command(flatten)]
        io: ProblemArgs,
        /// Record holding the y to verify (a solve record or any JSON
        /// object with a y array); standard input when absent.
        #[arg(value_name = "RECORD")]
        record: Option<PathBuf>,
    },
    /// Solve, then cross-check against every oracle the instance admits.
    OracleCompare {
        #[command(flatten)]
        io: ProblemArgs,
        /// Agreement tolerance for the comparisons.
        #[arg(long, value_name = "REAL", default_value_t = 1e-6)]
        tol: f64,
        /// Budget of secular-equation evaluations for the solver run.
        #[arg(long, value_name = "INT")]
        max_iter: Option<u32>,
        /// Boundary-sampling draw count.
        #[arg(long, value_name = "INT", default_value_t = 100_000)]
        samples: usize,
        /// Boundary-sampling seed.
        #[arg(long, value_name = "INT", default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<extremal::Error> for Failure {
    fn from(e: extremal::Error) -> Self {
        Failure {
            code: if e.is_convergence_failure() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn read_failure(what: &str, path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("cannot read {what} {}: {e}", path.display()),
    }
}

fn load(path: &Path) -> Result<AnyProblem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| read_failure("problem file", path, e))?;
    extremal::load_problem(&text).map_err(Failure::from)
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, payload).map_err(|e| Failure {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// Monomorphizes one expression over both scalar fields of a problem.
macro_rules! with_problem {
    ($any:expr, $p:ident => $body:expr) => {
        match $any {
            AnyProblem::Real($p) => $body,
            AnyProblem::Complex($p) => $body,
        }
    };
}

fn json_vector<S: Scalar>(y: &DVector<S>) -> String {
    let entries: Vec<String> = y.iter().map(|e| e.json_repr()).collect();
    format!("[{}]", entries.join(","))
}

fn kkt_json(k: &KktReport) -> String {
    format!(
        "{{\"multiplier_estimate\":{},\"multiplier_sign_ok\":{},\
         \"collinearity_residual\":{},\"boundary_gap\":{},\"cap_slack\":{},\
         \"obtuse_pairing\":{},\"imag_leak\":{}}}",
        sci17(k.multiplier_estimate),
        k.multiplier_sign_ok,
        sci17(k.collinearity_residual),
        sci17(k.boundary_gap),
        sci17(k.cap_slack),
        sci17(k.obtuse_pairing),
        k.imag_leak.map_or_else(|| "null".into(), sci17),
    )
}

fn solve_record<S: Scalar>(res: &ExtremalResult<S>) -> String {
    format!(
        "{{\"y\":{},\"r\":{},\"residual_norm\":{},\"iterations\":{},\"kkt\":{}}}\n",
        json_vector(&res.y),
        sci17(res.r),
        sci17(res.residual_norm),
        res.iterations,
        kkt_json(&res.kkt),
    )
}

fn comparison_json(rep: &ComparisonReport) -> String {
    format!(
        "{{\"method\":\"{}\",\"y_norm_solver\":{},\"y_norm_oracle\":{},\
         \"norm_gap\":{},\"vector_gap\":{},\"tol\":{},\"pass\":{}}}",
        rep.method.as_str(),
        sci17(rep.y_norm_solver),
        sci17(rep.y_norm_oracle),
        sci17(rep.norm_gap),
        rep.vector_gap.map_or_else(|| "null".into(), sci17),
        sci17(rep.tol),
        rep.pass,
    )
}

fn lift_direction<S: Scalar>(entries: &[f64]) -> DVector<S> {
    DVector::from_iterator(entries.len(), entries.iter().map(|&v| S::from_real(v)))
}

fn unit_direction(entries: &[f64]) -> Result<Vec<f64>, Failure> {
    let norm = entries.iter().map(|v| v * v).sum::<f64>().sqrt();
    let usable = norm.is_finite() && norm > 0.0;
    if !usable {
        return Err(Failure {
            code: 2,
            message: "direction must be a nonzero finite vector".into(),
        });
    }
    Ok(entries.iter().map(|v| v / norm).collect())
}

/// One real or `[re, im]` JSON entry as its parts.
fn entry_parts(v: &serde_json::Value) -> Option<(f64, f64)> {
    if let Some(x) = v.as_f64() {
        return Some((x, 0.0));
    }
    let pair = v.as_array()?;
    if pair.len() != 2 {
        return None;
    }
    Some((pair[0].as_f64()?, pair[1].as_f64()?))
}

fn parse_y_entries(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Failure {
        code: 2,
        message: format!("record parse: {e}"),
    })?;
    let entries = value
        .get("y")
        .and_then(|y| y.as_array())
        .ok_or_else(|| Failure {
            code: 2,
            message: "record must contain a y array".into(),
        })?;
    entries
        .iter()
        .enumerate()
        .map(|(i, v)| {
            entry_parts(v).ok_or_else(|| Failure {
                code: 2,
                message: format!("y[{i}] must be a number or an [re, im] pair"),
            })
        })
        .collect()
}

/// Angle-scan comparison where the field and shape admit it.
trait AngleCheck: Scalar {
    fn angle_comparison(
        problem: &Problem<Self>,
        res: &ExtremalResult<Self>,
        tol: f64,
    ) -> Option<extremal::Result<ComparisonReport>>;
}

impl AngleCheck for f64 {
    fn angle_comparison(
        problem: &Problem<Self>,
        res: &ExtremalResult<Self>,
        tol: f64,
    ) -> Option<extremal::Result<ComparisonReport>> {
        if problem.op().nrows() != 2 || problem.op().ncols() != 2 {
            return None;
        }
        let oracle = angle_grid_oracle_2d(
            problem.op(),
            problem.x0(),
            problem.epsilon(),
            ANGLE_ORACLE_POINTS,
        );
        Some(oracle.map(|o| compare(res, &o, tol)))
    }
}

impl AngleCheck for Complex<f64> {
    fn angle_comparison(
        _: &Problem<Self>,
        _: &ExtremalResult<Self>,
        _: f64,
    ) -> Option<extremal::Result<ComparisonReport>> {
        None
    }
}

fn run_oracle_compare<S: AngleCheck>(
    problem: &Problem<S>,
    config: &SolverConfig,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<String, Failure> {
    let res = solve_extremal(problem, config)?;
    let mut reports = Vec::new();

    let grid = lambda_grid_oracle(
        problem.op(),
        problem.x0(),
        problem.epsilon(),
        LAMBDA_ORACLE_DECADES,
    )?;
    reports.push(compare(&res, &grid, tol));

    if let Some(rep) = S::angle_comparison(problem, &res, tol) {
        reports.push(rep?);
    }

    let op = problem.op();
    if op.nrows() == op.ncols() && op.nrows() <= 4 && op.is_surjective() {
        let sampled = boundary_sample_oracle(op, problem.x0(), problem.epsilon(), samples, seed)?;
        reports.push(compare(&res, &sampled, tol));
    }

    let body: Vec<String> = reports.iter().map(comparison_json).collect();
    Ok(format!("[{}]\n", body.join(",")))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { io, solver } => {
            let config = solver.config();
            let record = with_problem!(load(&io.problem)?, p => {
                let res = solve_extremal(&p, &config)?;
                solve_record(&res)
            });
            emit(&io.out, &record)
        }
        Command::SweepEps { io, solver, grid } => {
            let config = solver.config();
            let grid = grid.build()?;
            let csv = with_problem!(load(&io.problem)?, p => {
                sweep_epsilon(p.op(), p.x0(), &grid, &config)?.to_csv()
            });
            emit(&io.out, &csv)
        }
        Command::SweepRay { io, solver, grid } => {
            let config = solver.config();
            let grid = grid.build()?;
            let csv = with_problem!(load(&io.problem)?, p => {
                sweep_ray(p.op(), p.x0(), p.epsilon(), &grid, &config)?.to_csv()
            });
            emit(&io.out, &csv)
        }
        Command::SweepDir {
            io,
            solver,
            grid,
            direction,
        } => {
            let config = solver.config();
            let grid = grid.build()?;
            let csv = with_problem!(load(&io.problem)?, p => {
                let u = lift_direction(&direction);
                sweep_direction(p.op(), p.x0(), &u, p.epsilon(), &grid, &config)?.to_csv()
            });
            emit(&io.out, &csv)
        }
        Command::ProbeContinuity {
            io,
            solver,
            grid,
            direction,
        } => {
            let config = solver.config();
            let ladder = grid.build_ladder()?;
            let unit = unit_direction(&direction)?;
            let csv = with_problem!(load(&io.problem)?, p => {
                let u = lift_direction(&unit);
                continuity_probe(p.op(), p.x0(), &u, p.epsilon(), &ladder, &config)?.to_csv()
            });
            emit(&io.out, &csv)
        }
        Command::ProbeSmoothness { io, solver, grid } => {
            let config = solver.config();
            let ladder = grid.build_ladder()?;
            let csv = with_problem!(load(&io.problem)?, p => {
                smoothness_probe(p.op(), p.x0(), p.epsilon(), &ladder, &config)?.to_csv()
            });
            emit(&io.out, &csv)
        }
        Command::Verify { io, record } => {
            let text = match &record {
                Some(path) => {
                    fs::read_to_string(path).map_err(|e| read_failure("record", path, e))?
                }
                None => {
                    let mut buf = String::new();
                    std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure {
                        code: 2,
                        message: format!("cannot read record from standard input: {e}"),
                    })?;
                    buf
                }
            };
            let parts = parse_y_entries(&text)?;
            let report = match load(&io.problem)? {
                AnyProblem::Real(p) => {
                    if let Some(i) = parts.iter().position(|&(_, im)| im != 0.0) {
                        return Err(Failure {
                            code: 2,
                            message: format!(
                                "y[{i}] has a nonzero imaginary part for a real problem"
                            ),
                        });
                    }
                    let y = DVector::from_iterator(parts.len(), parts.iter().map(|&(re, _)| re));
                    kkt_verify(p.op(), p.x0(), p.epsilon(), &y)?
                }
                AnyProblem::Complex(p) => {
                    let y = DVector::from_iterator(
                        parts.len(),
                        parts.iter().map(|&(re, im)| Complex::new(re, im)),
                    );
                    kkt_verify(p.op(), p.x0(), p.epsilon(), &y)?
                }
            };
            emit(&io.out, &format!("{}\n", kkt_json(&report)))
        }
        Command::OracleCompare {
            io,
            tol,
            max_iter,
            samples,
            seed,
        } => {
            let config = SolverArgs { tol: None, max_iter }.config();
            let payload = with_problem!(load(&io.problem)?, p => {
                run_oracle_compare(&p, &config, tol, samples, seed)?
            });
            emit(&io.out, &payload)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
