//! `incgreen` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use incgreen::diagnostics::{self, Comparison, SuiteOptions};
use incgreen::oracle::OracleOptions;
use incgreen::reproduce::{self, Case, ReproduceOptions};
use incgreen::{probes, AsymptoticModel, Axis, Error, GridSpec, Point, Quantity, Scenario};

#[derive(Parser, Debug)]
#[command(name = "incgreen", version, about = "Green's function of a disk with small circular inclusions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one quantity at a point and print its term breakdown.
    Eval(EvalArgs),
    /// Sample a quantity on a rectangular grid and write it as CSV.
    Grid(GridArgs),
    /// Run the diagnostics suite and print a pass/fail table.
    Validate(ValidateArgs),
    /// Measure the order of the remainder against the oracle.
    Convergence(ConvergenceArgs),
    /// Regenerate a built-in configuration: gradient grid and oracle report.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    config: PathBuf,
    /// Field point "x1,x2".
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x: Point,
    /// Source point "y1,y2".
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Point,
    #[arg(long, default_value = "reps")]
    quantity: Quantity,
    /// Shift the disk Neumann function to zero boundary mean.
    #[arg(long)]
    normalized: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Point,
    /// Node counts "NXxNY".
    #[arg(long, value_parser = parse_grid, default_value = "256x256")]
    grid: (usize, usize),
    /// "xmin,xmax,ymin,ymax"; the bounding square of the disk by default.
    #[arg(long, value_parser = parse_extent, allow_hyphen_values = true)]
    extent: Option<[f64; 4]>,
    #[arg(long, default_value = "grad")]
    quantity: Quantity,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    normalized: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Source for the oracle checks; the admissible probe nearest the
    /// centre by default.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Option<Point>,
    #[arg(long, default_value_t = 32)]
    n_modes: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125")]
    scales: Vec<f64>,
    #[arg(long, default_value_t = probes::DEFAULT_SEED)]
    seed: u64,
    /// Also write the table as JSON into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Point,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125")]
    scales: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    n_modes: usize,
    #[arg(long, default_value_t = probes::DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// fig1, example1 or example2.
    case: Case,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 32)]
    n_modes: usize,
    #[arg(long, default_value_t = probes::DEFAULT_SEED)]
    seed: u64,
    /// Give every inclusion the matrix modulus.
    #[arg(long)]
    homogeneous: bool,
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(v)
}

fn parse_point(s: &str) -> Result<Point, String> {
    let v = parse_floats(s, 2)?;
    Ok(Point::new(v[0], v[1]))
}

fn parse_extent(s: &str) -> Result<[f64; 4], String> {
    let v = parse_floats(s, 4)?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err("extent must satisfy xmin < xmax and ymin < ymax".into());
    }
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(['x', 'X', '×']).collect();
    if parts.len() != 2 {
        return Err(format!("expected NXxNY, got `{s}`"));
    }
    let nx: usize = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let ny: usize = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    if nx == 0 || ny == 0 {
        return Err("grid counts must be positive".into());
    }
    Ok((nx, ny))
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_ORACLE: u8 = 5;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::Json(_) => EXIT_CONFIG,
            Error::IllConditioned { .. } => EXIT_ORACLE,
            Error::Io(_) => 1,
            _ => EXIT_DOMAIN,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn failure(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type CmdResult = Result<(), Failure>;

fn load(path: &Path) -> Result<Scenario, Failure> {
    Ok(Scenario::from_path(path)?)
}

/// Rejects scenarios violating the geometric invariants.
fn load_valid(path: &Path) -> Result<Scenario, Failure> {
    let s = load(path)?;
    let v = s.validate();
    if !v.is_empty() {
        let text: Vec<String> = v.iter().map(|v| v.to_string()).collect();
        return Err(failure(EXIT_DOMAIN, format!("invalid scenario: {}", text.join("; "))));
    }
    Ok(s)
}

fn fmt_point(p: &Point) -> String {
    format!("{},{}", p[0], p[1])
}

fn eval(args: EvalArgs) -> CmdResult {
    let s = load_valid(&args.config)?;
    let model = AsymptoticModel::new(&s).normalized(args.normalized);
    let mut out = String::new();
    out.push_str(&format!("quantity={}\nx={}\ny={}\n", args.quantity, fmt_point(&args.x), fmt_point(&args.y)));
    match args.quantity {
        Quantity::Neps | Quantity::Reps => {
            let e = match args.quantity {
                Quantity::Neps => model.n_eps(&args.x, &args.y)?,
                _ => model.r_eps(&args.x, &args.y)?,
            };
            out.push_str(&format!("region_x={}\nregion_y={}\nvalue={:e}\n", e.region_x, e.region_y, e.value));
            for t in &e.terms {
                out.push_str(&format!("term.{}={:e}\n", t.label(), t.value));
            }
            for w in &e.warnings {
                out.push_str(&format!("warning={w}\n"));
            }
        }
        Quantity::GradRepsMagnitude => {
            let g = model.grad_r_eps(&args.x, &args.y)?;
            out.push_str(&format!(
                "region_x={}\nregion_y={}\nvalue={:e}\ngrad_x={:e}\ngrad_y={:e}\n",
                s.classify_point(&args.x)?,
                s.classify_point(&args.y)?,
                g.norm(),
                g[0],
                g[1]
            ));
        }
    }
    for (label, p) in [("x", &args.x), ("y", &args.y)] {
        if let Some((j, d)) = s.nearest_interface(p) {
            out.push_str(&format!("nearest_interface_{label}={} distance={d:e}\n", j + 1));
        }
    }
    print!("{out}");
    Ok(())
}

fn grid(args: GridArgs) -> CmdResult {
    let s = load_valid(&args.config)?;
    let model = AsymptoticModel::new(&s).normalized(args.normalized);
    let r = s.outer_radius;
    let [x0, x1, y0, y1] = args.extent.unwrap_or([-r, r, -r, r]);
    let spec = GridSpec { x: Axis::new(x0, x1, args.grid.0), y: Axis::new(y0, y1, args.grid.1) };
    let field = model.grid_eval(&args.y, &spec, args.quantity)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join(format!("grid_{}.csv", args.quantity));
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    field.write_csv(&mut file)?;
    file.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn comparison(c: Comparison) -> &'static str {
    match c {
        Comparison::AtMost => "<=",
        Comparison::AtLeast => ">=",
    }
}

fn validate(args: ValidateArgs) -> CmdResult {
    let s = load(&args.config)?;
    let options = SuiteOptions {
        seed: args.seed,
        oracle: OracleOptions::with_modes(args.n_modes),
        y: args.y,
        scales: args.scales,
    };
    let report = diagnostics::run_suite(&s, &options)?;
    println!("{:<24} {:>13}    {:>10}  result", "check", "measured", "threshold");
    for c in &report.checks {
        println!(
            "{:<24} {:>13.4e} {:>2} {:>10.1e}  {}{}",
            c.name,
            c.measured,
            comparison(c.comparison),
            c.threshold,
            if c.pass { "PASS" } else { "FAIL" },
            if c.note.is_empty() { String::new() } else { format!(" ({})", c.note) }
        );
    }
    for name in &report.skipped {
        println!("{name:<24} {:>13} {:>2} {:>10}  SKIPPED", "-", "", "-");
    }
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("validate_report.json"), report.to_json())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(failure(EXIT_VALIDATION, "validation failed"))
    }
}

fn convergence(args: ConvergenceArgs) -> CmdResult {
    let s = load_valid(&args.config)?;
    let probe_set = probes::generate(&s, probes::DEFAULT_PROBE_COUNT, args.seed)?;
    let report = diagnostics::convergence_study(&s, &args.y, &probe_set, &args.scales, OracleOptions::with_modes(args.n_modes))?;
    println!("{:>10} {:>13} {:>13} {:>13} {:>13}", "scale", "sup_value", "relative", "sup_grad", "oracle_res");
    for k in 0..report.scales.len() {
        println!(
            "{:>10} {:>13.4e} {:>13.4e} {:>13.4e} {:>13.4e}",
            report.scales[k],
            report.errors[k],
            report.relative_errors[k],
            report.gradient_errors[k],
            report.oracle_residuals[k]
        );
    }
    let slope = report.fitted_slope.map_or("undefined".to_string(), |v| format!("{v:.4}"));
    println!("fitted_slope={slope}");
    println!("threshold={}", report.threshold);
    println!("floor_limited={}", report.floor_limited);
    println!("result={}", if report.pass { "PASS" } else { "FAIL" });
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("convergence_report.json"), report.to_json())?;
    }
    if report.pass {
        Ok(())
    } else {
        Err(failure(EXIT_VALIDATION, "convergence order below threshold"))
    }
}

fn reproduce_case(args: ReproduceArgs) -> CmdResult {
    let options = ReproduceOptions {
        oracle: OracleOptions::with_modes(args.n_modes),
        seed: args.seed,
        homogeneous: args.homogeneous,
        ..ReproduceOptions::default()
    };
    let (report, path) = reproduce::reproduce(args.case, &args.out, &options)?;
    let d = &report.discrepancy;
    println!("case={}", report.case);
    println!("grid={}", args.out.join(&report.grid_file).display());
    println!("grid_sha256={}", report.grid_sha256);
    println!("report={}", path.display());
    println!("sup_value={:e}", d.sup_value);
    println!("relative_sup_value={:e}", d.relative_sup_value);
    println!("sup_grad={:e}", d.sup_grad);
    println!("relative_sup_grad={:e}", d.relative_sup_grad);
    println!("result={}", if report.pass { "PASS" } else { "FAIL" });
    if report.pass {
        Ok(())
    } else {
        Err(failure(EXIT_VALIDATION, "gradient discrepancy above threshold"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Grid(a) => grid(a),
        Command::Validate(a) => validate(a),
        Command::Convergence(a) => convergence(a),
        Command::Reproduce(a) => reproduce_case(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
