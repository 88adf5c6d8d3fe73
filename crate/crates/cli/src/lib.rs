//! Command-line front end. [`run`] is the whole program; `main` only wires
//! it to the process streams so tests can drive it in memory.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand};

use quadratura::bounds::{bound_report, is_prime, mersenne_construction};
use quadratura::geometry::{parse_tiling, validate, write_tiling};
use quadratura::model::{build_base_model, export_model, ExportFormat, IlpModel};
use quadratura::network::{extract_network, layout_equations, recover_and_check, solve_sizes};
use quadratura::solver::{
    brute_force_oracle, solve_min_squares, SolveOptions, Variant, ORACLE_CAP,
};
use quadratura::{Error, Tiling};

pub const TIME_LIMIT_ENV: &str = "QUADRATURA_TIME_LIMIT_MS";

/// Largest side drawn in human output.
const RENDER_LIMIT: usize = 40;

#[derive(Debug, Parser)]
#[command(
    name = "quadratura",
    version,
    about = "Exact tools for tiling a square with integer squares"
)]
struct Cli {
    /// Print stable key=value lines instead of prose.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimum number of squares tiling an n x n square.
    Solve(SolveArgs),
    /// Check a tiling file.
    Verify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Write the integer program as LP or MPS.
    Export(ExportArgs),
    /// Analyse the dissector network of a tiling.
    Network {
        #[arg(long)]
        file: PathBuf,
        /// Print vertices, edges and poles.
        #[arg(long)]
        dump: bool,
        /// Recover square sizes from the network alone.
        #[arg(long)]
        recover: bool,
    },
    /// Build a tiling from a known construction.
    Construct(ConstructArgs),
    /// Lower and upper bounds on the square count.
    Bounds {
        #[arg(long)]
        n: usize,
    },
    /// Draw a tiling file as a grid of sizes.
    Render {
        #[arg(long)]
        file: PathBuf,
    },
    /// Exhaustive enumeration for tiny sides.
    Oracle {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    n: usize,
    /// Require exactly V squares of side H.
    #[arg(long, value_name = "H=V", value_parser = parse_force)]
    force: Option<(usize, usize)>,
    /// Side lengths must have gcd one.
    #[arg(long, conflicts_with = "force")]
    gcd_one: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    node_limit: Option<u64>,
    /// Milliseconds; falls back to $QUADRATURA_TIME_LIMIT_MS.
    #[arg(long, value_name = "MS", value_parser = clap::value_parser!(u64).range(1..))]
    time_limit: Option<u64>,
    /// Write the witness tiling here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_format)]
    format: ExportFormat,
    /// base, ylink, force:H=V or gcd-one; may be repeated.
    #[arg(long, value_parser = parse_variant)]
    variant: Vec<ModelVariant>,
    /// Target file, or a directory that receives the conventional name.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["mersenne", "scale"])))]
struct ConstructArgs {
    /// Exponent r of the side 2^r - 1.
    #[arg(long, value_name = "R")]
    mersenne: Option<u32>,
    /// Scale a tiling file by an integer factor.
    #[arg(long, num_args = 2, value_names = ["FILE", "K"])]
    scale: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModelVariant {
    Base,
    YLink,
    Force(usize, usize),
    GcdOne,
}

fn parse_force(s: &str) -> Result<(usize, usize), String> {
    let (h, v) = s.split_once('=').ok_or("expected H=V")?;
    let h = h.parse().map_err(|_| format!("bad size `{h}`"))?;
    let v = v.parse().map_err(|_| format!("bad count `{v}`"))?;
    Ok((h, v))
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    match s {
        "lp" => Ok(ExportFormat::Lp),
        "mps" => Ok(ExportFormat::Mps),
        _ => Err("expected lp or mps".into()),
    }
}

fn parse_variant(s: &str) -> Result<ModelVariant, String> {
    match s {
        "base" => Ok(ModelVariant::Base),
        "ylink" => Ok(ModelVariant::YLink),
        "gcd-one" => Ok(ModelVariant::GcdOne),
        _ => match s.strip_prefix("force:") {
            Some(rest) => parse_force(rest).map(|(h, v)| ModelVariant::Force(h, v)),
            None => Err("expected base, ylink, force:H=V or gcd-one".into()),
        },
    }
}

/// Failures after argument parsing. Domain errors exit with 1, late usage
/// errors (like a malformed environment variable) with 2.
enum Failure {
    Domain(Error),
    Usage(String),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<(), Failure>;

struct Ctx<'a> {
    machine: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// One `key=value` line in machine mode, `key: value` otherwise.
    fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        if self.machine {
            let _ = writeln!(self.out, "{key}={value}");
        } else {
            let _ = writeln!(self.out, "{key}: {value}");
        }
    }

    fn text(&mut self, s: &str) {
        let _ = self.out.write_all(s.as_bytes());
    }

    fn render(&mut self, t: &Tiling) -> Outcome {
        if !self.machine && t.n() <= RENDER_LIMIT {
            let _ = writeln!(self.out);
            self.text(&t.render_ascii()?);
        }
        Ok(())
    }
}

/// Runs the program on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            if code == 0 {
                let _ = write!(out, "{rendered}");
                return 0;
            }
            let _ = write!(err, "{rendered}");
            return 2;
        }
    };
    let mut ctx = Ctx {
        machine: cli.machine,
        out,
    };
    let result = dispatch(cli.command, &mut ctx);
    let _ = ctx.out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Domain(e)) => {
            report(err, &e);
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Io(path, e)) => {
            let _ = writeln!(err, "IoError: {}: {e}", path.display());
            1
        }
    }
}

fn report(err: &mut dyn Write, e: &Error) {
    match e {
        Error::InvalidTiling(violations) => {
            for v in violations {
                let _ = writeln!(err, "{}: {v}", e.name());
            }
        }
        _ => {
            let _ = writeln!(err, "{}: {e}", e.name());
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Outcome {
    match command {
        Command::Solve(args) => solve(args, ctx),
        Command::Verify { file } => verify(&file, ctx),
        Command::Export(args) => export(args, ctx),
        Command::Network {
            file,
            dump,
            recover,
        } => network(&file, dump, recover, ctx),
        Command::Construct(args) => construct(args, ctx),
        Command::Bounds { n } => bounds(n, ctx),
        Command::Render { file } => {
            let t = load_valid(&file)?;
            ctx.text(&t.render_ascii()?);
            Ok(())
        }
        Command::Oracle { n } => oracle(n, ctx),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn load_valid(path: &Path) -> Result<Tiling, Failure> {
    let t = parse_tiling(&read(path)?)?;
    let report = validate(&t);
    if !report.ok() {
        return Err(Error::InvalidTiling(report.violations).into());
    }
    Ok(t)
}

fn default_time_limit() -> Result<Option<u64>, Failure> {
    match std::env::var(TIME_LIMIT_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<u64>() {
            Ok(ms) if ms > 0 => Ok(Some(ms)),
            _ => Err(Failure::Usage(format!(
                "{TIME_LIMIT_ENV} must be a positive integer, got `{raw}`"
            ))),
        },
    }
}

fn solve(args: SolveArgs, ctx: &mut Ctx) -> Outcome {
    let variant = match (args.force, args.gcd_one) {
        (Some((size, count)), _) => Variant::ForceCount { size, count },
        (None, true) => Variant::GcdOne,
        (None, false) => Variant::Base,
    };
    let time_limit = match args.time_limit {
        Some(ms) => Some(ms),
        None => default_time_limit()?,
    };
    let opts = SolveOptions {
        node_limit: args.node_limit,
        time_limit: time_limit.map(Duration::from_millis),
        threads: usize::try_from(args.threads).unwrap_or(usize::MAX),
        ..SolveOptions::with_variant(variant)
    };
    let result = solve_min_squares(args.n, &opts)?;
    if let Some(path) = &args.out {
        write_file(path, &write_tiling(&result.witness)?)?;
    }
    let multiset = result.witness.multiset()?;
    if ctx.machine {
        ctx.field("optimum", result.optimum);
        ctx.field("nodes", result.nodes);
        ctx.field("time_ms", result.elapsed.as_millis());
        ctx.field("proven", result.proven);
        ctx.field("multiset", &multiset);
    } else {
        let status = if result.proven {
            "optimal"
        } else {
            "best found, not proven"
        };
        let _ = writeln!(
            ctx.out,
            "n = {}: {} squares ({status})",
            args.n, result.optimum
        );
        let _ = writeln!(ctx.out, "sizes: {multiset}");
        let _ = writeln!(
            ctx.out,
            "{} nodes in {} ms",
            result.nodes,
            result.elapsed.as_millis()
        );
        if let Some(path) = &args.out {
            let _ = writeln!(ctx.out, "witness written to {}", path.display());
        }
        ctx.render(&result.witness)?;
    }
    Ok(())
}

fn verify(file: &Path, ctx: &mut Ctx) -> Outcome {
    let t = parse_tiling(&read(file)?)?;
    let report = validate(&t);
    if !report.ok() {
        let _ = writeln!(
            ctx.out,
            "valid=false violations={}",
            report.violations.len()
        );
        return Err(Error::InvalidTiling(report.violations).into());
    }
    let _ = writeln!(
        ctx.out,
        "valid=true count={} multiset={}",
        t.len(),
        t.multiset()?
    );
    ctx.render(&t)
}

fn build_model(n: usize, variants: &[ModelVariant]) -> Result<IlpModel, Error> {
    let mut model = build_base_model(n)?;
    let needs_link = variants.iter().any(|v| {
        matches!(
            v,
            ModelVariant::YLink | ModelVariant::Force(..) | ModelVariant::GcdOne
        )
    });
    if needs_link {
        model = model.add_y_link()?;
    }
    for v in variants {
        model = match *v {
            ModelVariant::Base | ModelVariant::YLink => model,
            ModelVariant::Force(h, c) => model.force_count(h, c)?,
            ModelVariant::GcdOne => model.add_gcd_one()?,
        };
    }
    Ok(model)
}

fn export(args: ExportArgs, ctx: &mut Ctx) -> Outcome {
    let links = args
        .variant
        .iter()
        .filter(|v| **v == ModelVariant::YLink)
        .count();
    if links > 1 {
        return Err(Error::DuplicateVariant("ylink").into());
    }
    let model = build_model(args.n, &args.variant)?;
    let text = export_model(&model, args.format);
    let Some(out) = args.out else {
        ctx.text(&text);
        return Ok(());
    };
    let path = if out.is_dir() {
        out.join(format!("{}.{}", model.file_stem(), args.format.extension()))
    } else {
        out
    };
    write_file(&path, &text)?;
    ctx.field("file", path.display());
    ctx.field("variables", model.variables().len());
    ctx.field("constraints", model.constraints().len());
    Ok(())
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn network(file: &Path, dump: bool, recover: bool, ctx: &mut Ctx) -> Outcome {
    let t = load_valid(file)?;
    let net = extract_network(&t)?;
    if dump {
        ctx.text(&net.dump());
        if !recover {
            return Ok(());
        }
    }
    ctx.field("vertices", net.vertices.len());
    ctx.field("edges", net.edges.len());
    if recover {
        let rec = solve_sizes(&net)?;
        ctx.field("sizes", join(&rec.sizes));
        ctx.field("side", rec.side);
        ctx.field("dimension", rec.scale_dimension);
        ctx.field("layout_equations", layout_equations(&t)?.rows.len());
        let ok = recover_and_check(&t)?;
        ctx.field("recovered", ok);
        if !ok {
            return Err(
                Error::InvalidParameter("recovered sizes disagree with the tiling".into()).into(),
            );
        }
    }
    Ok(())
}

fn construct(args: ConstructArgs, ctx: &mut Ctx) -> Outcome {
    let t = match (args.mersenne, args.scale) {
        (Some(r), _) => mersenne_construction(r)?,
        (None, Some(scale)) => {
            let k = scale[1].parse::<usize>().map_err(|_| {
                Failure::Usage(format!("scale factor `{}` is not an integer", scale[1]))
            })?;
            load_valid(Path::new(&scale[0]))?.scale(k)?
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let text = write_tiling(&t)?;
    match args.out {
        Some(path) => {
            write_file(&path, &text)?;
            ctx.field("n", t.n());
            ctx.field("count", t.len());
            ctx.field("multiset", t.multiset()?);
        }
        None => ctx.text(&text),
    }
    Ok(())
}

fn bounds(n: usize, ctx: &mut Ctx) -> Outcome {
    let report = bound_report(n)?;
    if is_prime(n as u64) {
        ctx.field("conway", format!("{:.9}", report.lower));
    } else {
        ctx.field("conway", "none");
    }
    ctx.field("lower", report.lower_int);
    ctx.field("trustrum", format!("{:.9}", report.upper_trustrum));
    ctx.field("construction", report.upper_construction);
    if let Some(w) = &report.witness {
        ctx.field("multiset", w.multiset()?);
    }
    Ok(())
}

fn oracle(n: usize, ctx: &mut Ctx) -> Outcome {
    if n > ORACLE_CAP {
        return Err(
            Error::InvalidParameter(format!("oracle is capped at n = {ORACLE_CAP}")).into(),
        );
    }
    let (optimum, forms) = brute_force_oracle(n)?;
    ctx.field("optimum", optimum);
    ctx.field("orbits", forms.len());
    if let Some(first) = forms.iter().next() {
        ctx.field("multiset", first.multiset()?);
        ctx.render(first)?;
    }
    Ok(())
}
