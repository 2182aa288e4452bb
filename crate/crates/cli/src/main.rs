//! `hmi`: hierarchical models, their ideals and differential cumulants from
//! the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hmi::partitions::MultiIndex;

use commands::Output;

#[derive(Parser, Debug)]
#[command(name = "hmi", version, about = "Hierarchical models, monomial ideals and differential cumulants")]
struct Cli {
    /// Output mode.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct ComplexArg {
    /// Complex JSON: {"p": 5, "facets": [[1,2,3], ...]}.
    #[arg(long)]
    complex: PathBuf,
}

#[derive(Args, Debug)]
struct IdealArg {
    /// Ideal JSON: {"p": 5, "generators": [[1,4], ...]}.
    #[arg(long)]
    ideal: PathBuf,
}

#[derive(Args, Debug)]
struct NetworkArg {
    /// Network JSON: {"nodes": [..], "edges": [{"id":1,"u":1,"v":2}, ..], "input": 1, "output": 4}.
    #[arg(long)]
    network: PathBuf,
}

#[derive(Args, Debug)]
struct PolyArg {
    /// Polynomial text, e.g. "3/2*x1*x2 - x2^2".
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    /// Density JSON (Gaussian, multilinear exponential or product).
    #[arg(long)]
    density: PathBuf,
    /// Evaluation point, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    xi: Vec<f64>,
    /// Multi-index, e.g. 1,1.
    #[arg(long)]
    k: MultiIndex,
}

#[derive(Args, Debug)]
pub struct FdArgs {
    /// Relative finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    step_scale: f64,
    /// Skip the Richardson extrapolation step.
    #[arg(long)]
    no_richardson: bool,
}

#[derive(Args, Debug)]
pub struct IntegratorArgs {
    /// Gauss–Legendre nodes per axis.
    #[arg(long, default_value_t = 16, conflicts_with = "samples")]
    nodes: usize,
    /// Use Monte Carlo with this many samples (seed from HMI_SEED).
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CumulantMethod {
    Partition,
    Logderiv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stanley–Reisner ideal of a complex.
    Sr(ComplexArg),
    /// Complex of a square-free ideal.
    ComplexOf(IdealArg),
    /// Alexander dual of a complex.
    Dual(ComplexArg),
    /// Decomposability test, with a witness when it fails.
    Decompose(ComplexArg),
    /// Clique/separator factorization of a decomposable complex.
    Factorize(ComplexArg),
    /// Integrate out vertices of a model.
    Marginalize {
        #[command(flatten)]
        input: ComplexArg,
        /// Vertices removed one at a time, in order.
        #[arg(long, value_delimiter = ',', required_unless_present = "remove", conflicts_with = "remove")]
        strip: Vec<usize>,
        /// Vertices removed together in one step.
        #[arg(long, value_delimiter = ',')]
        remove: Vec<usize>,
    },
    /// Whether a quadratic ideal has a 2-linear resolution.
    LinearResolution(IdealArg),
    /// Ferrer recognition and the cliques of its model.
    Ferrer(IdealArg),
    /// Minimal cuts of a two-terminal network.
    NetworkCuts(NetworkArg),
    /// Minimal paths of a two-terminal network.
    NetworkPaths(NetworkArg),
    /// Cut and path ideals of a network.
    NetworkIdeals(NetworkArg),
    /// Checks that the cut and path complexes are Alexander dual.
    NetworkDuality(NetworkArg),
    /// Nerve of equal balls around a point cloud.
    Nerve {
        /// CSV file, one point per row.
        #[arg(long)]
        points: PathBuf,
        /// Common ball radius.
        #[arg(long, required_unless_present = "filtration", conflicts_with = "filtration")]
        radius: Option<String>,
        /// Strictly increasing radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        filtration: Vec<f64>,
        /// Largest face dimension to test.
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Multiset partitions of k with their collapse numbers.
    Partitions {
        #[arg(long)]
        k: MultiIndex,
    },
    /// Collapse number of a multiset partition given by its blocks.
    Collapse {
        /// Blocks as multi-indices, e.g. `1,1 0,1`.
        #[arg(required = true)]
        blocks: Vec<MultiIndex>,
    },
    /// Cumulant of order k from a moment table.
    CumulantFromMoments {
        /// Moment JSON: {"1,0": "3/2", ...}.
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        k: MultiIndex,
    },
    /// Terms of the multivariate chain rule for D^k g(h(x)).
    ChainRule {
        #[arg(long)]
        k: MultiIndex,
    },
    /// Parses and canonicalises a polynomial.
    ParsePoly {
        #[command(flatten)]
        poly: PolyArg,
        /// Number of variables.
        #[arg(long)]
        p: usize,
    },
    /// Whether a log-density polynomial is hierarchical for a complex.
    CheckModel {
        #[command(flatten)]
        poly: PolyArg,
        #[command(flatten)]
        input: ComplexArg,
    },
    /// Degree conditions that make cumulants vanish.
    Artinian {
        #[command(flatten)]
        poly: PolyArg,
        #[arg(long)]
        p: usize,
        /// Per-variable orders n; checks deg_i g < n_i.
        #[arg(long, required_unless_present = "degree")]
        n: Option<MultiIndex>,
        /// Total order d; checks deg g < d.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Ideal of the zero pattern of a Gaussian precision matrix.
    GaussianIdeal {
        /// Gaussian JSON: {"mean": [..], "precision": [[..], ..]}.
        #[arg(long)]
        density: PathBuf,
        /// Entries at most this large count as zero.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Polynomial, support complex and ideal of a multilinear exponential model.
    Mec {
        /// MEC JSON: {"p": 2, "coeffs": {"11": "5", ...}}.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Local moment (or cumulant) over a cube window.
    LocalMoment {
        #[command(flatten)]
        point: PointArgs,
        /// Window edge length.
        #[arg(long)]
        eps: f64,
        /// Report the local cumulant instead.
        #[arg(long)]
        cumulant: bool,
        #[command(flatten)]
        integrator: IntegratorArgs,
    },
    /// Differential moment by finite differences.
    DiffMoment {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        fd: FdArgs,
    },
    /// Differential cumulant.
    DiffCumulant {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = CumulantMethod::Partition)]
        method: CumulantMethod,
        #[command(flatten)]
        fd: FdArgs,
    },
    /// Scaled local cumulants along shrinking windows.
    LimitProbe {
        #[command(flatten)]
        point: PointArgs,
        /// Strictly decreasing window edges.
        #[arg(long, value_delimiter = ',', required = true)]
        eps_seq: Vec<f64>,
        #[command(flatten)]
        integrator: IntegratorArgs,
        #[command(flatten)]
        fd: FdArgs,
    },
    /// Zero-cumulant generators of X_I ⫫ X_J | X_K.
    CiGenerators {
        #[arg(long)]
        p: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        i: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<usize>,
        /// Conditioning set; defaults to every other variable.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
    },
}

/// A problem with the invocation rather than with the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn dispatch(command: Command) -> anyhow::Result<Output> {
    use commands as c;
    match command {
        Command::Sr(a) => c::sr(&a.complex),
        Command::ComplexOf(a) => c::complex_of(&a.ideal),
        Command::Dual(a) => c::dual(&a.complex),
        Command::Decompose(a) => c::decompose(&a.complex),
        Command::Factorize(a) => c::factorize(&a.complex),
        Command::Marginalize { input, strip, remove } => c::marginalize(&input.complex, &strip, &remove),
        Command::LinearResolution(a) => c::linear_resolution(&a.ideal),
        Command::Ferrer(a) => c::ferrer(&a.ideal),
        Command::NetworkCuts(a) => c::network_cuts(&a.network),
        Command::NetworkPaths(a) => c::network_paths(&a.network),
        Command::NetworkIdeals(a) => c::network_ideals(&a.network),
        Command::NetworkDuality(a) => c::network_duality(&a.network),
        Command::Nerve { points, radius, filtration, max_dim } => {
            c::nerve(&points, radius.as_deref(), &filtration, max_dim)
        }
        Command::Partitions { k } => c::partitions(&k),
        Command::Collapse { blocks } => c::collapse(blocks),
        Command::CumulantFromMoments { moments, k } => c::cumulant_from_moments(&moments, &k),
        Command::ChainRule { k } => c::chain_rule(&k),
        Command::ParsePoly { poly, p } => c::parse_poly(&poly.poly, p),
        Command::CheckModel { poly, input } => c::check_model(&poly.poly, &input.complex),
        Command::Artinian { poly, p, n, degree } => c::artinian(&poly.poly, p, n.as_ref(), degree),
        Command::GaussianIdeal { density, tol } => c::gaussian_ideal(&density, tol),
        Command::Mec { spec } => c::mec(&spec),
        Command::LocalMoment { point, eps, cumulant, integrator } => {
            c::local_moment(&point, eps, cumulant, &integrator)
        }
        Command::DiffMoment { point, fd } => c::diff_moment(&point, &fd),
        Command::DiffCumulant { point, method, fd } => {
            let method = match method {
                CumulantMethod::Partition => hmi::diffcum::Method::PartitionSum,
                CumulantMethod::Logderiv => hmi::diffcum::Method::LogDerivative,
            };
            c::diff_cumulant(&point, method, &fd)
        }
        Command::LimitProbe { point, eps_seq, integrator, fd } => c::limit_probe(&point, &eps_seq, &integrator, &fd),
        Command::CiGenerators { p, i, j, k } => c::ci_generators(p, &i, &j, k.as_deref()),
    }
}

fn run(cli: Cli) -> anyhow::Result<(Output, Format)> {
    if cli.threads == 0 {
        return Err(UsageError("--threads must be at least 1".into()).into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    let output = dispatch(cli.command)?;
    Ok((output, cli.format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok((output, format)) => {
            match format {
                Format::Text => print!("{}", output.text),
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&output.json).expect("JSON values serialise"))
                }
            }
            match output.failure {
                Some(message) => {
                    eprintln!("error: {message}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
