//! Command-line surface over the hausdim library.
//!
//! Every subcommand is deterministic: fixed flags (including `--seed`)
//! reproduce byte-identical output. Exit codes are stable for scripting:
//! 0 success/certified, 1 usage error, 2 numerical failure.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hausdim::covering::{
    cover_sum_table, cover_sum_table_csv, regress_series, upper_bound_exponent, BoxCountSeries,
};
use hausdim::dimension::{check_osc, hausdorff_dimension_via_similarity};
use hausdim::fmt::sig17;
use hausdim::ifs::{cantor_preset, square_preset, Ifs};
use hausdim::measure::{lebesgue_square_mass, mdd_check, SelfSimilarMeasure};

mod render;

/// log 2 / log 3, the middle-thirds Cantor dimension.
fn cantor_critical_exponent() -> f64 {
    2.0_f64.ln() / 3.0_f64.ln()
}

#[derive(Parser)]
#[command(
    name = "hausdim",
    about = "Compute and certify Hausdorff dimensions of self-similar sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Similarity dimension with an open set condition certificate
    Simdim(SimdimArgs),
    /// Box counts of a chaos-game cloud plus a log-log regression slope
    Boxcount(BoxcountArgs),
    /// Covering sums over the natural cell covers per (depth, s) pair
    Coversum(CoversumArgs),
    /// Mass distribution principle certificate over seeded random boxes
    Massdist(MassdistArgs),
    /// Exponent above which the natural cover sums vanish (dimension upper bound)
    Upperbound(UpperboundArgs),
    /// SVG rendering of construction stages
    Render(RenderArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Built-in system
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Gap parameter of the cantor preset (default 1/3)
    #[arg(long)]
    alpha: Option<f64>,
    /// IFS description file
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Cantor,
    Square,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (each subcommand supports one)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Plain,
}

#[derive(Args)]
struct SimdimArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoxcountArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Chaos-game cloud size
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Chaos-game seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Grid scales, strictly decreasing (defaults: cantor 3^-3..3^-8,
    /// square 2^-2..2^-7)
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CoversumArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Refinement depths (default 1..8)
    #[arg(long, value_delimiter = ',')]
    depths: Vec<usize>,
    /// Exponents s (defaults: cantor log2/log3, square 2)
    #[arg(long = "s", value_delimiter = ',')]
    exponents: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MassdistArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Exponent s to test (defaults: cantor log2/log3, square 2)
    #[arg(long = "s")]
    exponent: Option<f64>,
    /// Sampled boxes
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Sampling seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Diameter range as min,max (default 1e-6,1e-1)
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct UpperboundArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Refinement depths for the decay criterion (default 1..8)
    #[arg(long, value_delimiter = ',')]
    depths: Vec<usize>,
    /// Bisection tolerance for unequal-ratio systems
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Stages to draw (cap: 12 in 1-D, 6 in 2-D)
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[command(flatten)]
    output: OutputArgs,
}

enum CliError {
    Core(hausdim::Error),
    Io(std::io::Error),
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(hausdim::Error::DegenerateRegression) => 2,
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<hausdim::Error> for CliError {
    fn from(e: hausdim::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simdim(args) => cmd_simdim(args),
        Command::Boxcount(args) => cmd_boxcount(args),
        Command::Coversum(args) => cmd_coversum(args),
        Command::Massdist(args) => cmd_massdist(args),
        Command::Upperbound(args) => cmd_upperbound(args),
        Command::Render(args) => cmd_render(args),
    }
}

enum Source {
    Cantor(Ifs),
    Square(Ifs),
    File(Ifs),
}

impl Source {
    fn ifs(&self) -> &Ifs {
        match self {
            Source::Cantor(ifs) | Source::Square(ifs) | Source::File(ifs) => ifs,
        }
    }
}

fn load_source(args: &SourceArgs) -> Result<Source, CliError> {
    match (&args.preset, &args.file) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --preset or --file, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "an IFS source is required: --preset or --file".into(),
        )),
        (Some(Preset::Cantor), None) => {
            let alpha = args.alpha.unwrap_or(1.0 / 3.0);
            Ok(Source::Cantor(cantor_preset(alpha)?))
        }
        (Some(Preset::Square), None) => {
            if args.alpha.is_some() {
                return Err(CliError::Usage("--alpha applies to the cantor preset only".into()));
            }
            Ok(Source::Square(square_preset()))
        }
        (None, Some(path)) => {
            if args.alpha.is_some() {
                return Err(CliError::Usage("--alpha applies to the cantor preset only".into()));
            }
            let text = fs::read_to_string(path)?;
            Ok(Source::File(Ifs::from_description(&text)?))
        }
    }
}

fn check_format(output: &OutputArgs, supported: Format, name: &str) -> Result<(), CliError> {
    match output.format {
        None => Ok(()),
        Some(f) if f == supported => Ok(()),
        Some(_) => Err(CliError::Usage(format!(
            "{name} supports --format {} only",
            match supported {
                Format::Csv => "csv",
                Format::Svg => "svg",
                Format::Plain => "plain",
            }
        ))),
    }
}

fn write_output(output: &OutputArgs, content: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_simdim(args: SimdimArgs) -> Result<(), CliError> {
    check_format(&args.output, Format::Plain, "simdim")?;
    let source = load_source(&args.source)?;
    let ifs = source.ifs();
    let candidate = ifs.seed_box();
    let report = check_osc(ifs, candidate)?;
    let estimate = hausdorff_dimension_via_similarity(ifs, candidate)?;

    let mut out = String::new();
    out.push_str(&format!("dimension: {}\n", estimate.value));
    out.push_str(&format!("method: {}\n", estimate.method));
    out.push_str(&format!("uncertainty: {}\n", estimate.uncertainty));
    if report.satisfied() {
        out.push_str("osc: certified\n");
        out.push_str(&format!(
            "witness: int({})\n",
            report.witness().expect("certified report has witness")
        ));
    } else {
        out.push_str(&format!(
            "osc: unverified ({})\n",
            report.violation().expect("failed report has violation")
        ));
        out.push_str("witness: none\n");
        out.push_str("warning: similarity dimension is an upper bound only\n");
    }
    write_output(&args.output, &out)
}

fn cmd_boxcount(args: BoxcountArgs) -> Result<(), CliError> {
    check_format(&args.output, Format::Csv, "boxcount")?;
    let source = load_source(&args.source)?;
    let deltas = if args.deltas.is_empty() {
        match &source {
            Source::Cantor(_) => (3..=8).map(|n| 3.0_f64.powi(-n)).collect(),
            Source::Square(_) => (2..=7).map(|n| 2.0_f64.powi(-n)).collect(),
            Source::File(_) => {
                return Err(CliError::Usage(
                    "--deltas is required for file-based systems".into(),
                ))
            }
        }
    } else {
        args.deltas
    };
    let points = source.ifs().chaos_game(args.samples, args.seed)?;
    let series = BoxCountSeries::from_points(&points, &deltas)?;
    let estimate = regress_series(&series)?;

    let mut out = series.to_csv();
    out.push_str("slope,stderr\n");
    out.push_str(&format!(
        "{},{}\n",
        sig17(estimate.value),
        sig17(estimate.uncertainty)
    ));
    write_output(&args.output, &out)
}

fn cmd_coversum(args: CoversumArgs) -> Result<(), CliError> {
    check_format(&args.output, Format::Csv, "coversum")?;
    let source = load_source(&args.source)?;
    let depths: Vec<usize> = if args.depths.is_empty() {
        (1..=8).collect()
    } else {
        args.depths
    };
    let exponents = if args.exponents.is_empty() {
        match &source {
            Source::Cantor(_) => vec![cantor_critical_exponent()],
            Source::Square(_) => vec![2.0],
            Source::File(_) => {
                return Err(CliError::Usage("--s is required for file-based systems".into()))
            }
        }
    } else {
        args.exponents
    };
    let rows = cover_sum_table(source.ifs(), &depths, &exponents)?;
    write_output(&args.output, &cover_sum_table_csv(&rows))
}

fn cmd_massdist(args: MassdistArgs) -> Result<(), CliError> {
    check_format(&args.output, Format::Csv, "massdist")?;
    let source = load_source(&args.source)?;
    let delta_range = match args.deltas.as_slice() {
        [] => (1e-6, 1e-1),
        [min, max] => (*min, *max),
        other => {
            return Err(CliError::Usage(format!(
                "--deltas takes exactly two values min,max for massdist, got {}",
                other.len()
            )))
        }
    };

    let (cert, target) = match &source {
        Source::Cantor(ifs) => {
            let s_star = cantor_critical_exponent();
            let s = args.exponent.unwrap_or(s_star);
            let measure = SelfSimilarMeasure::new(ifs.clone())?;
            let max_depth = mu_depth_for(ifs, delta_range.0);
            let cert = mdd_check(
                |u| Ok(measure.mu_box(u, max_depth)?.upper),
                ifs.seed_box(),
                s,
                delta_range,
                args.samples,
                args.seed,
            )?;
            let target = ((s - s_star).abs() <= 1e-12).then_some(4.0);
            (cert, target)
        }
        Source::Square(ifs) => {
            let s = args.exponent.unwrap_or(2.0);
            let cert = mdd_check(
                lebesgue_square_mass,
                ifs.seed_box(),
                s,
                delta_range,
                args.samples,
                args.seed,
            )?;
            let target = (s == 2.0).then_some(std::f64::consts::FRAC_PI_4);
            (cert, target)
        }
        Source::File(_) => {
            return Err(CliError::Usage(
                "massdist supports the cantor and square presets only".into(),
            ))
        }
    };

    write_output(&args.output, &cert.to_csv())?;
    if let Some(target) = target {
        if cert.c > target + 1e-9 {
            return Err(CliError::Numerical(format!(
                "scaling constant c = {} exceeds the analytic target {target}",
                cert.c
            )));
        }
    }
    Ok(())
}

fn cmd_upperbound(args: UpperboundArgs) -> Result<(), CliError> {
    check_format(&args.output, Format::Plain, "upperbound")?;
    let source = load_source(&args.source)?;
    let depths: Vec<usize> = if args.depths.is_empty() {
        (1..=8).collect()
    } else {
        args.depths
    };
    let estimate = upper_bound_exponent(source.ifs(), &depths, args.tolerance)?;

    let mut out = String::new();
    out.push_str(&format!("exponent: {}\n", estimate.value));
    out.push_str(&format!("method: {}\n", estimate.method));
    out.push_str(&format!("uncertainty: {}\n", estimate.uncertainty));
    out.push_str(&format!("{}\n", estimate.metadata));
    write_output(&args.output, &out)
}

/// Recursion depth resolving cells below the smallest sampled diameter.
fn mu_depth_for(ifs: &Ifs, delta_min: f64) -> usize {
    let r_max = ifs
        .ratios()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let depth = ((1.0 / delta_min).ln() / (1.0 / r_max).ln()).ceil() as usize + 1;
    depth.clamp(1, 30)
}

fn cmd_render(args: RenderArgs) -> Result<(), CliError> {
    check_format(&args.output, Format::Svg, "render")?;
    let source = load_source(&args.source)?;
    let svg = render::render_stages(source.ifs(), args.depth)?;
    write_output(&args.output, &svg)
}
