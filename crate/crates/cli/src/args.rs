use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use geometer_core::bench::QueryTag;

#[derive(Debug, Parser)]
#[command(
    name = "geometer",
    version,
    about = "Measure brand visibility in generative-engine answers",
    propagate_version = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file (TOML or JSON).
    #[arg(long, global = true, env = "GEOMETER_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Brand registry file; repeat for several files.
    #[arg(long = "brands", global = true, value_name = "FILE")]
    pub brands: Vec<PathBuf>,
    /// Analyzer config file, applied over the main config.
    #[arg(long, global = true, value_name = "FILE")]
    pub analyzer_config: Option<PathBuf>,
    /// Entity clarity config file, applied over the main config.
    #[arg(long, global = true, value_name = "FILE")]
    pub clarity_config: Option<PathBuf>,
    #[arg(long, short = 'f', global = true, value_enum)]
    pub format: Option<Format>,
    /// More detail on stderr; repeatable.
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count, conflicts_with = "quiet")]
    pub verbose: u8,
    /// Suppress warnings on stderr.
    #[arg(long, short = 'q', global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-source visibility and owned/earned shares for one answer.
    Score(ScoreArgs),
    /// Score a content document against the nine content strategies.
    Analyze(AnalyzeArgs),
    /// Audit JSON-LD structured data for entity clarity.
    Entity(EntityArgs),
    /// Run query libraries and report trends.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["transcript", "text"])))]
pub struct ScoreArgs {
    /// Transcript JSON file, or `-` for stdin.
    #[arg(long, short = 't', value_name = "FILE")]
    pub transcript: Option<PathBuf>,
    /// Plain answer text with `[n]` markers, or `-` for stdin.
    #[arg(long, value_name = "FILE", requires = "sources")]
    pub text: Option<PathBuf>,
    /// Tab-separated `id url [title]` sources for `--text`.
    #[arg(long, value_name = "FILE", requires = "text")]
    pub sources: Option<PathBuf>,
    #[arg(long, requires = "text", default_value = "")]
    pub query: String,
    #[arg(long, requires = "text", default_value = "unknown")]
    pub engine: String,
    /// Capture time for `--text` input (RFC 3339); defaults to now.
    #[arg(long, requires = "text")]
    pub captured_at: Option<String>,
    /// Only report this brand.
    #[arg(long)]
    pub brand: Option<String>,
    /// Weight sentences by raw index instead of index over sentence count.
    #[arg(long)]
    pub raw_position: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Content file, or `-` for stdin.
    #[arg(long, short = 'i', value_name = "FILE")]
    pub input: PathBuf,
    /// Treat input as Markdown (the default for .md files).
    #[arg(long, conflicts_with = "plain")]
    pub markdown: bool,
    /// Treat input as plain text.
    #[arg(long)]
    pub plain: bool,
    /// Target keywords, comma separated; replaces configured keywords.
    #[arg(long, value_delimiter = ',')]
    pub keywords: Option<Vec<String>>,
    /// Strategy priors CSV replacing the bundled table.
    #[arg(long, value_name = "FILE")]
    pub priors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EntityArgs {
    /// HTML pages or JSON-LD files.
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
    /// Service taxonomy, comma separated; replaces the configured list.
    #[arg(long, value_delimiter = ',')]
    pub taxonomy: Option<Vec<String>>,
    /// Licence identifier keys, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub licence_keys: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Execute every query on every engine and append results to the store.
    Run(BenchRunArgs),
    /// Compare brands across engines and two time windows.
    Report(BenchReportArgs),
}

#[derive(Debug, Args)]
pub struct BenchRunArgs {
    #[arg(long, value_name = "FILE")]
    pub library: PathBuf,
    /// Engine as `[id=]fixtures:<dir>`; repeat for several engines.
    #[arg(long = "engine", required = true, value_name = "SPEC")]
    pub engines: Vec<String>,
    #[arg(long, value_name = "FILE")]
    pub store: Option<PathBuf>,
    /// Freeze the capture clock at this RFC 3339 time.
    #[arg(long, value_name = "TIME")]
    pub clock: Option<String>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub raw_position: bool,
}

#[derive(Debug, Args)]
pub struct BenchReportArgs {
    #[arg(long, value_name = "FILE")]
    pub store: Option<PathBuf>,
    /// Baseline window as `<start>..<end>` (RFC 3339, end exclusive).
    #[arg(long, value_name = "WINDOW")]
    pub window_a: String,
    /// Comparison window; defaults to the baseline window.
    #[arg(long, value_name = "WINDOW")]
    pub window_b: Option<String>,
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long, value_parser = parse_tag)]
    pub tag: Option<QueryTag>,
    #[arg(long)]
    pub raw_position: bool,
}

fn parse_tag(s: &str) -> Result<QueryTag, String> {
    s.parse()
}
