//! `polynet` command-line front end. Argument handling, path checks and file
//! plumbing only; all numerics live in the library.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polynet::nn::{load_weights, save_weights};
use polynet::poly::{load_polynomial, save_polynomial};
use polynet::simlab::{
    generate_data, run_batch, run_study, write_records, write_summary, DataGenConfig,
    SimulationConfig,
};
use polynet::table::{load_table, save_table};
use polynet::transcode::rescale_to_original;
use polynet::{
    coefficient_distance, coverage, nn_to_poly, ols_fit, train_rprop, valid_range, Activation,
    ScaleMode, ScalingSpec, TrainConfig,
};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "polynet",
    version,
    about = "Turn trained regression networks into explicit polynomials"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Report errors on stderr as one JSON object.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a synthetic dataset from a random polynomial.
    Generate(GenerateArgs),
    /// Train a network on a data table.
    Train(TrainArgs),
    /// Convert network weights into a polynomial.
    Transcode(TranscodeArgs),
    /// Print the interval where the truncated series is within epsilon of the activation.
    DiagnoseRange(RangeArgs),
    /// Share of synaptic potentials inside the valid Taylor range.
    Coverage(CoverageArgs),
    /// Least-squares polynomial fit of a data table.
    FitOls(OlsArgs),
    /// Compare the coefficients of two polynomial files.
    CompareCoeffs(CompareArgs),
    /// Run the repeated grid experiment from a config file.
    Simulate(SimulateArgs),
    /// Run the fixed-data coefficient study and write surface grids.
    Surfaces(SurfacesArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    #[arg(long, default_value_t = 0.1)]
    noise_sd: f64,
    #[arg(long)]
    seed: u64,
    /// Data table to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the generating polynomial.
    #[arg(long)]
    generator: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "softplus")]
    activation: Activation,
    #[arg(long, default_value_t = 4)]
    hidden: usize,
    /// unit ([0,1]), symmetric ([-1,1]) or none.
    #[arg(long, default_value = "symmetric")]
    scaling: ScaleMode,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Weights file to write.
    #[arg(long)]
    out: PathBuf,
    /// Scaling file to write; needed to map results back to original units.
    #[arg(long)]
    scaling_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TranscodeArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    order: u32,
    #[arg(long)]
    out: PathBuf,
    /// Scaling file from `train`; the polynomial is written in original units.
    #[arg(long)]
    scaling: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RangeArgs {
    #[arg(long)]
    activation: Activation,
    #[arg(long)]
    order: u32,
    #[arg(long, default_value_t = polynet::activations::DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args, Debug)]
struct CoverageArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    order: u32,
    #[arg(long, default_value_t = polynet::activations::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Scaling file from `train`; applied to the data first.
    #[arg(long)]
    scaling: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OlsArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    degree: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.reps`.
    #[arg(long)]
    reps: Option<usize>,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for records.csv and summary.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SurfacesArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `study.data.seed`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<polynet::Error> for Failure {
    fn from(e: polynet::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn need_file(path: &Path, what: &str) -> Outcome {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{what} {} does not exist or is not a file",
            path.display()
        )))
    }
}

fn need_parent(path: &Path) -> Outcome {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(invalid(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ if path.is_dir() => Err(invalid(format!("output {} is a directory", path.display()))),
        _ => Ok(()),
    }
}

fn need_out_dir(path: &Path) -> Outcome {
    if path.exists() && !path.is_dir() {
        return Err(invalid(format!(
            "output {} exists and is not a directory",
            path.display()
        )));
    }
    fs::create_dir_all(path)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", path.display())))
}

fn load_scaling(path: &Path) -> Result<ScalingSpec, Failure> {
    Ok(ScalingSpec::from_json(&read_text(path)?, path)?)
}

fn load_config(path: &Path) -> Result<SimulationConfig, Failure> {
    let cfg: SimulationConfig = toml::from_str(&read_text(path)?)
        .map_err(|e| invalid(format!("config {}: {}", path.display(), e.message())))?;
    cfg.validate()?;
    Ok(cfg)
}

fn print_json(value: serde_json::Value) {
    use std::io::Write;
    // output to a closed pipe is dropped
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(&value).expect("json values serialize")
    );
}

fn generate(a: GenerateArgs) -> Outcome {
    need_parent(&a.out)?;
    if let Some(g) = &a.generator {
        need_parent(g)?;
    }
    let cfg = DataGenConfig {
        n: a.n,
        p: a.p,
        degree: a.degree,
        noise_sd: a.noise_sd,
        seed: a.seed,
        ..Default::default()
    };
    let data = generate_data(&cfg)?;
    save_table(&data.x, &data.y, &a.out)?;
    if let Some(g) = &a.generator {
        save_polynomial(&data.generator, g)?;
    }
    Ok(())
}

fn train(a: TrainArgs) -> Outcome {
    need_file(&a.data, "data table")?;
    need_parent(&a.out)?;
    if let Some(s) = &a.scaling_out {
        need_parent(s)?;
    }
    let table = load_table(&a.data)?;
    let scaling = ScalingSpec::fit(&table.x, &table.y, a.scaling)?;
    let xs = scaling.scale_x(&table.x)?;
    let ys = scaling.scale_y(&table.y);
    let mut cfg = TrainConfig::with_seed(a.seed);
    if let Some(m) = a.max_epochs {
        cfg.max_epochs = m;
    }
    let (net, trace) = train_rprop(&xs, &ys, a.hidden, a.activation, &cfg)?;
    save_weights(&net, &a.out)?;
    if let Some(s) = &a.scaling_out {
        write_text(s, &scaling.to_json()?)?;
    }
    print_json(json!({
        "epochs": trace.epochs(),
        "converged": trace.converged,
        "final_loss": trace.final_loss(),
        "final_max_grad": trace.final_max_grad,
    }));
    Ok(())
}

fn transcode(a: TranscodeArgs) -> Outcome {
    need_file(&a.weights, "weights file")?;
    if let Some(s) = &a.scaling {
        need_file(s, "scaling file")?;
    }
    need_parent(&a.out)?;
    let net = load_weights(&a.weights)?;
    let result = nn_to_poly(&net, a.order)?;
    let poly = match &a.scaling {
        Some(s) => rescale_to_original(&result, &load_scaling(s)?)?,
        None => result.poly,
    };
    save_polynomial(&poly, &a.out)?;
    Ok(())
}

fn diagnose_range(a: RangeArgs) -> Outcome {
    let r = valid_range(a.activation, a.order, a.epsilon)?;
    print_json(json!({
        "activation": a.activation.name(),
        "order": a.order,
        "epsilon": r.epsilon,
        "lo": r.lo,
        "hi": r.hi,
        "lo_saturated": r.lo_saturated,
        "hi_saturated": r.hi_saturated,
    }));
    Ok(())
}

fn coverage_cmd(a: CoverageArgs) -> Outcome {
    need_file(&a.weights, "weights file")?;
    need_file(&a.data, "data table")?;
    if let Some(s) = &a.scaling {
        need_file(s, "scaling file")?;
    }
    let net = load_weights(&a.weights)?;
    let table = load_table(&a.data)?;
    let xs = match &a.scaling {
        Some(s) => load_scaling(s)?.scale_x(&table.x)?,
        None => table.x,
    };
    let r = coverage(&net, &xs, a.order, a.epsilon)?;
    print_json(json!({
        "order": r.order,
        "epsilon": r.epsilon,
        "lo": r.lo,
        "hi": r.hi,
        "overall": r.overall,
        "per_unit": r.per_unit,
    }));
    Ok(())
}

fn fit_ols(a: OlsArgs) -> Outcome {
    need_file(&a.data, "data table")?;
    need_parent(&a.out)?;
    let table = load_table(&a.data)?;
    let (poly, report) = ols_fit(&table.x, &table.y, a.degree)?;
    save_polynomial(&poly, &a.out)?;
    let terms: Vec<_> = report
        .estimates
        .iter()
        .map(|e| json!({"monomial": e.index.to_string(), "estimate": e.estimate, "std_error": e.std_error}))
        .collect();
    print_json(json!({
        "n": report.n,
        "rss": report.rss,
        "condition": report.condition,
        "terms": terms,
    }));
    Ok(())
}

fn compare_coeffs(a: CompareArgs) -> Outcome {
    need_file(&a.a, "polynomial file")?;
    need_file(&a.b, "polynomial file")?;
    let pa = load_polynomial(&a.a)?;
    let pb = load_polynomial(&a.b)?;
    let d = coefficient_distance(&pa, &pb)?;
    let terms: Vec<_> = d
        .per_term
        .iter()
        .map(|(m, diff)| json!({"monomial": m.to_string(), "a": pa.coeff(m), "b": pb.coeff(m), "abs_diff": diff}))
        .collect();
    print_json(json!({"max_abs": d.max_abs, "l2": d.l2, "terms": terms}));
    Ok(())
}

fn create(path: &Path) -> Result<fs::File, Failure> {
    fs::File::create(path)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn simulate(a: SimulateArgs) -> Outcome {
    need_file(&a.config, "config file")?;
    let mut cfg = load_config(&a.config)?;
    if let Some(r) = a.reps {
        cfg.run.reps = r;
    }
    if let Some(s) = a.seed {
        cfg.run.seed = s;
    }
    cfg.validate()?;
    need_out_dir(&a.out)?;
    let batch = run_batch(&cfg.experiment(), &cfg.grid, cfg.run.reps, cfg.run.seed)?;
    write_records(&batch.rows, create(&a.out.join("records.csv"))?)?;
    write_summary(&batch.summary, create(&a.out.join("summary.csv"))?)?;
    let failed = batch.rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} runs failed; see the error column of records.csv",
            batch.rows.len()
        );
    }
    Ok(())
}

fn surfaces(a: SurfacesArgs) -> Outcome {
    need_file(&a.config, "config file")?;
    let mut cfg = load_config(&a.config)?;
    if let Some(s) = a.seed {
        cfg.study.data.seed = s;
    }
    need_out_dir(&a.out)?;
    run_study(&cfg.study)?.write(&a.out)?;
    Ok(())
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Train(a) => train(a),
        Command::Transcode(a) => transcode(a),
        Command::DiagnoseRange(a) => diagnose_range(a),
        Command::Coverage(a) => coverage_cmd(a),
        Command::FitOls(a) => fit_ols(a),
        Command::CompareCoeffs(a) => compare_coeffs(a),
        Command::Simulate(a) => simulate(a),
        Command::Surfaces(a) => surfaces(a),
    }
}

fn report(json_errors: bool, kind: &str, message: &str) {
    if json_errors {
        eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
    } else {
        eprintln!("error: {message}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code != 0 && std::env::args().any(|a| a == "--json-errors") {
                report(true, "usage", e.render().to_string().trim());
            } else {
                let _ = e.print();
            }
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            report(cli.json_errors, "validation", &m);
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            report(cli.json_errors, "runtime", &m);
            ExitCode::from(1)
        }
    }
}
