use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "specmorph", version, about = "Operator transformations between solvable 1-D potentials, checked against a finite-difference oracle")]
pub struct Cli {
    /// Seed for sampled checks; recorded in every report.
    #[arg(long, global = true, env = "SPECMORPH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List potential catalog entries.
    Catalog {
        /// Show a single entry (id or alias).
        #[arg(long)]
        id: Option<String>,
    },
    /// Run a transformation plan and print the resulting operator and relation.
    Transform(TransformArgs),
    /// Bound-state spectrum by closed form, finite differences or the representation labels.
    Spectrum(SpectrumArgs),
    /// Run a verification suite; exit 5 when any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ConstArgs {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Inverse length scale a.
    #[arg(long = "a", default_value_t = 1.0)]
    pub a: f64,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    /// Grid as `lo,hi,n` (interior points, Dirichlet ends).
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(f64, f64, usize)>,
    /// Margin removed from both grid ends.
    #[arg(long, default_value_t = 0.0)]
    pub inset: f64,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Source catalog entry; defaults to the plan's source.
    #[arg(long)]
    pub from: Option<String>,
    /// `builtin:rm-to-pt`, `empty`, or a path to a plan JSON file.
    #[arg(long, default_value = "builtin:rm-to-pt")]
    pub plan: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ClosedForm,
    Fd,
    Rep,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub id: String,
    #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
    pub method: Method,
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    /// Parameter as `NAME=VALUE`; repeatable.
    #[arg(long = "param", value_parser = parse_kv)]
    pub params: Vec<(String, f64)>,
    /// Pöschl-Teller exponent γ (alternative to the csc² coupling A).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Pöschl-Teller exponent δ (alternative to the sec² coupling B).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[command(flatten)]
    pub consts: ConstArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Commutators,
    Casimir,
    Hermiticity,
    Mapping,
    Propagator,
    Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Cartesian,
    Euler,
    /// Rosen-Morse generators, full transform (PCT and similarity).
    Rm,
    /// Rosen-Morse generators, PCT only (the printed form).
    RmPct,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub what: Suite,
    #[arg(long, value_enum, default_value_t = FrameArg::Euler)]
    pub frame: FrameArg,
    /// Transformation pair for mapping and propagator checks.
    #[arg(long, default_value = "rm-to-pt")]
    pub pair: String,
    /// Negative control: replace the endpoint prefactor by 1.
    #[arg(long)]
    pub corrupt_prefactor: bool,
    /// Source parameters as `NAME=VALUE`.
    #[arg(long = "param", value_parser = parse_kv)]
    pub params: Vec<(String, f64)>,
    /// Comma-separated source energies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub energies: Vec<f64>,
    /// Source grid `lo,hi,n`.
    #[arg(long, value_parser = parse_grid)]
    pub source_grid: Option<(f64, f64, usize)>,
    /// Target grid point count.
    #[arg(long)]
    pub target_n: Option<usize>,
    /// Relative tolerance override.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Random test-function pairs for the hermiticity suite.
    #[arg(long, default_value_t = 12)]
    pub pairs: usize,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected lo,hi,n, got `{s}`"));
    }
    let f = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let n = parts[2].parse::<usize>().map_err(|e| format!("`{}`: {e}", parts[2]))?;
    Ok((f(parts[0])?, f(parts[1])?, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_pairs() {
        assert_eq!(parse_kv("A = 0.5"), Ok(("A".into(), 0.5)));
        assert!(parse_kv("A").is_err());
        assert!(parse_kv("A=x").is_err());
    }

    #[test]
    fn grid_triples() {
        assert_eq!(parse_grid("-12, 12,8000"), Ok((-12.0, 12.0, 8000)));
        assert!(parse_grid("0,1").is_err());
        assert!(parse_grid("0,1,2.5").is_err());
    }

    #[test]
    fn seed_defaults_to_seven() {
        let c = Cli::try_parse_from(["specmorph", "catalog"]).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        let c = Cli::try_parse_from(["specmorph", "--seed", "3", "catalog"]).unwrap();
        assert_eq!(c.seed, 3);
    }
}
