use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use copw_cli::io::{self, num, MatrixJson, StateJson, WitnessJson};
use copw_cli::registry::{self, Expectation};
use copw_cli::scan::{self, AxisName, GridSpec, SvgView};
use copw_cli::{CliError, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};
use copw_core::certify::{certify_state, classify_witness, ds_separable_lowdim, ppt_with_tol, Verdict};
use copw_core::cone::{
    decompose, hoffman_pereira, horn, is_copositive, verify_split, CopositivityVerdict, DecompositionResult,
    SplitTolerance, DEFAULT_DECOMPOSE_MAX_ITER, DEFAULT_DECOMPOSE_TOL,
};
use copw_core::witness::{coherent_witness, project_sym, witness};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "copw", version, about = "Entanglement witnesses from copositive matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Copositivity and PSD + nonnegative splitting.
    #[command(subcommand)]
    Cop(CopCommand),
    /// Witness construction.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Symmetric state construction.
    #[command(subcommand)]
    State(StateCommand),
    /// Certify a state against a witness, or a DS state with d <= 4 via `certify ds`.
    Certify(CertifyArgs),
    /// Classify a grid of d = 3 coherences; writes scan.csv and scan.svg.
    Scan(ScanArgs),
    /// Reference examples.
    #[command(subcommand)]
    Examples(ExamplesCommand),
}

#[derive(Subcommand)]
enum CopCommand {
    /// Exact copositivity test with a violating vector when it fails.
    Check { matrix: PathBuf },
    /// Search for H = PSD + nonnegative.
    Decompose {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DECOMPOSE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_DECOMPOSE_MAX_ITER)]
        max_iter: usize,
    },
    /// Horn-type matrix for odd d >= 5.
    Horn { d: usize },
    /// The 7x7 Hoffman-Pereira matrix.
    Hp7,
}

#[derive(Subcommand)]
enum WitnessCommand {
    Build {
        /// Source matrix H.
        matrix: PathBuf,
        /// JSON list of {"i","j","k","value"} coherence coefficients.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Project onto the symmetric subspace.
        #[arg(long)]
        project_sym: bool,
        /// Classify from the exceptionality of H (plain witnesses only).
        #[arg(long)]
        classify: bool,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    Build { spec: PathBuf },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct CertifyArgs {
    #[command(subcommand)]
    sub: Option<CertifySub>,
    #[arg(required = true)]
    state: Option<PathBuf>,
    #[arg(long, required = true)]
    witness: Option<PathBuf>,
    /// Relative tolerance for PPT and detection.
    #[arg(long, env = "COPW_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Exit with code 1 unless this verdict is reached.
    #[arg(long, value_parser = parse_verdict)]
    expect: Option<Verdict>,
}

#[derive(Subcommand)]
enum CertifySub {
    /// Decide separability of a DS state with d <= 4.
    Ds { state: PathBuf },
}

#[derive(Args)]
struct ScanArgs {
    /// DS weights of the family (state JSON; coherences are ignored).
    #[arg(long = "p")]
    p: PathBuf,
    #[arg(long)]
    witness: PathBuf,
    /// Grid JSON; defaults to real alpha, beta in [-0.2, 0.2] x 201 and gamma in {0, p_01/4}.
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_axis, default_value = "alpha_re")]
    x: AxisName,
    #[arg(long, value_parser = parse_axis, default_value = "beta_re")]
    y: AxisName,
    #[arg(long, env = "COPW_TOL", default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum ExamplesCommand {
    List,
    Run {
        name: String,
        #[arg(long, env = "COPW_TOL", default_value_t = 1e-9)]
        tol: f64,
    },
}

fn parse_verdict(s: &str) -> Result<Verdict, String> {
    match s {
        "NPT-entangled" | "npt" => Ok(Verdict::NptEntangled),
        "PPT-entangled" | "ppt-entangled" => Ok(Verdict::PptEntangled),
        "separable" => Ok(Verdict::SeparableProved),
        "undecided" => Ok(Verdict::Undecided),
        _ => Err("expected one of NPT-entangled, PPT-entangled, separable, undecided".into()),
    }
}

fn parse_axis(s: &str) -> Result<AxisName, String> {
    AxisName::ALL
        .into_iter()
        .find(|a| a.label() == s)
        .ok_or_else(|| format!("unknown axis {s:?}"))
}

fn print(v: &Value) {
    println!("{}", io::to_pretty(v));
}

fn report_json(r: &copw_core::certify::CertificationReport) -> Value {
    json!({
        "state_valid": r.state_valid,
        "state_min_eig": num(r.state_min_eig),
        "ppt": r.ppt,
        "pt_min_eig": num(r.pt_min_eig),
        "witness_value": r.witness_value.map(num),
        "verdict": r.verdict.to_string(),
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Cop(cmd) => cop(cmd),
        Command::Witness(WitnessCommand::Build {
            matrix,
            coeffs,
            project_sym: project,
            classify,
        }) => {
            let h = io::read_json::<MatrixJson>(&matrix)?.to_real()?;
            let mut w = match coeffs {
                Some(path) => {
                    let list: Vec<io::CoefficientJson> = io::read_json(&path)?;
                    coherent_witness(&h, &io::coefficient_map(&list)?)?
                }
                None => witness(&h),
            };
            if project && !w.is_projected() {
                w = project_sym(&w);
            }
            if classify {
                w = classify_witness(&w)?;
            }
            print(&serde_json::to_value(WitnessJson::from_witness(&w)).expect("serializable"));
            Ok(EXIT_OK)
        }
        Command::State(StateCommand::Build { spec }) => {
            let s = io::read_json::<StateJson>(&spec)?.build()?;
            let pt = ppt_with_tol(&s, 1e-9)?;
            print(&json!({
                "d": s.d(),
                "trace": num(s.trace()),
                "valid": s.is_valid(),
                "min_eig": num(s.min_eigenvalue()),
                "ppt": pt.ppt,
                "pt_min_eig": num(pt.min_eig),
                "rho": MatrixJson::from_hermitian(s.rho()),
            }));
            Ok(EXIT_OK)
        }
        Command::Certify(args) => certify(args),
        Command::Scan(args) => scan_cmd(args),
        Command::Examples(ExamplesCommand::List) => {
            for name in registry::NAMES {
                let ex = registry::build(name)?;
                println!("{name:14} {}", ex.summary);
            }
            Ok(EXIT_OK)
        }
        Command::Examples(ExamplesCommand::Run { name, tol }) => {
            let out = registry::run(&name, tol)?;
            let expected = match out.expected {
                Expectation::Verdict { verdict, value } => json!({
                    "verdict": verdict.to_string(),
                    "witness_value": value.map(|(v, _)| num(v)),
                }),
                Expectation::EdgeRanks(r, q) => json!({ "ppt": true, "ranks": [r, q] }),
            };
            print(&json!({
                "example": out.name,
                "report": report_json(&out.report),
                "ranks": [out.ranks.0, out.ranks.1],
                "expected": expected,
                "reproduced": out.reproduced,
            }));
            Ok(if out.reproduced { EXIT_OK } else { EXIT_MISMATCH })
        }
    }
}

fn cop(cmd: CopCommand) -> Result<u8, CliError> {
    match cmd {
        CopCommand::Check { matrix } => {
            let h = io::read_json::<MatrixJson>(&matrix)?.to_real()?;
            let out = match is_copositive(&h)? {
                CopositivityVerdict::Copositive => json!({ "verdict": "copositive" }),
                CopositivityVerdict::NotCopositive(v) => json!({
                    "verdict": "not copositive",
                    "certificate": {
                        "x": v.x.iter().copied().map(num).collect::<Vec<_>>(),
                        "value": num(v.value),
                        "support": v.support,
                    },
                }),
            };
            print(&out);
            Ok(EXIT_OK)
        }
        CopCommand::Decompose { matrix, tol, max_iter } => {
            let h = io::read_json::<MatrixJson>(&matrix)?.to_real()?;
            let out = match decompose(&h, tol, max_iter)? {
                DecompositionResult::Split {
                    psd,
                    nonneg,
                    iterations,
                } => {
                    let check = verify_split(&h, &psd, &nonneg, SplitTolerance::default())?;
                    json!({
                        "status": "split",
                        "iterations": iterations,
                        "psd": MatrixJson::from_real(&psd),
                        "nonneg": MatrixJson::from_real(&nonneg),
                        "check": {
                            "sum_error": num(check.sum_error),
                            "psd_min_eig": num(check.psd_min_eig),
                            "nonneg_min_entry": num(check.nonneg_min_entry),
                            "ok": check.ok,
                        },
                    })
                }
                DecompositionResult::Exceptional { residual, iterations } => json!({
                    "status": "exceptional (numerical)",
                    "iterations": iterations,
                    "residual": num(residual),
                }),
            };
            print(&out);
            Ok(EXIT_OK)
        }
        CopCommand::Horn { d } => {
            print(&serde_json::to_value(MatrixJson::from_real(&horn(d)?)).expect("serializable"));
            Ok(EXIT_OK)
        }
        CopCommand::Hp7 => {
            print(&serde_json::to_value(MatrixJson::from_real(&hoffman_pereira())).expect("serializable"));
            Ok(EXIT_OK)
        }
    }
}

fn certify(args: CertifyArgs) -> Result<u8, CliError> {
    let (verdict, out) = match (args.sub, args.state, args.witness) {
        (Some(CertifySub::Ds { state }), _, _) => {
            let spec: StateJson = io::read_json(&state)?;
            if !spec.coherences.is_empty() || spec.d3.is_some() || spec.rho.is_some() {
                return Err(CliError::Parse("certify ds takes DS weights only".into()));
            }
            let v = ds_separable_lowdim(&spec.probabilities()?)?;
            (v, json!({ "verdict": v.to_string() }))
        }
        (None, Some(state), Some(w)) => {
            let s = io::read_json::<StateJson>(&state)?.build()?;
            let w = io::read_json::<WitnessJson>(&w)?.to_witness()?;
            let (report, w) = certify_state(&s, &w, args.tol)?;
            let mut out = report_json(&report);
            out["witness_classification"] = WitnessJson::from_witness(&w).classification.into();
            (report.verdict, out)
        }
        _ => return Err(CliError::Parse("certify needs <state> and --witness".into())),
    };
    print(&out);
    Ok(match args.expect {
        Some(e) if e != verdict => EXIT_MISMATCH,
        _ => EXIT_OK,
    })
}

fn scan_cmd(args: ScanArgs) -> Result<u8, CliError> {
    let p = io::read_json::<StateJson>(&args.p)?.probabilities()?;
    let w = io::read_json::<WitnessJson>(&args.witness)?.to_witness()?;
    let grid = match &args.grid {
        Some(path) => io::read_json::<GridSpec>(path)?,
        None => GridSpec::default_for(&p),
    };
    let report = scan::scan_d3(&p, &w, &grid, args.tol)?;
    let view = SvgView {
        x: args.x,
        y: args.y,
        ..SvgView::default()
    };
    fs::create_dir_all(&args.out).map_err(|e| CliError::Io(args.out.display().to_string(), e))?;
    write(&args.out.join("scan.csv"), &scan::to_csv(&report)?)?;
    write(&args.out.join("scan.svg"), scan::to_svg(&report, &view)?.as_bytes())?;
    print(&json!({
        "points": report.records.len(),
        "invalid": report.count(scan::PointClass::Invalid),
        "NPT": report.count(scan::PointClass::Npt),
        "PPT-undetected": report.count(scan::PointClass::PptUndetected),
        "PPT-detected": report.count(scan::PointClass::PptDetected),
        "csv": args.out.join("scan.csv"),
        "svg": args.out.join("scan.svg"),
    }));
    Ok(EXIT_OK)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
