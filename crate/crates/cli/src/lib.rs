//! Command-line front end: capture parsing, upload and serving, simulation,
//! identification, regression sweeps and store reports.

mod capture;
mod experiment;
mod registry;
mod report;
mod service;

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use probelink::identify::AssignmentMode;

pub use experiment::{sweep, SweepGrid};

#[derive(Debug, Parser)]
#[command(name = "probelink", version, about = "Probe-request sighting toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract deduplicated sightings from a pcap file into an upload document
    Parse(ParseArgs),
    /// POST an upload document to an ingestion service
    Upload(UploadArgs),
    /// Run the ingestion service over a store file
    Serve(ServeArgs),
    /// Simulate an attendance experiment and write its transcript
    Simulate(SimulateArgs),
    /// Run identification over a transcript
    Identify(IdentifyArgs),
    /// Run a parameter sweep and fit the accuracy regression
    Sweep(SweepArgs),
    /// Print store statistics and export report data
    Report(ReportArgs),
    /// Convert or query the OUI registry
    #[command(subcommand)]
    Oui(OuiCommand),
    /// Maintain the owner table
    #[command(subcommand)]
    Owner(OwnerCommand),
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Capture file (classic pcap, radiotap or bare 802.11)
    pub capture: PathBuf,
    /// Where to write the upload document; stdout if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Latitude of the scan site
    #[arg(long, requires = "lon", allow_hyphen_values = true)]
    pub lat: Option<f64>,
    /// Longitude of the scan site
    #[arg(long, requires = "lat", allow_hyphen_values = true)]
    pub lon: Option<f64>,
    /// Only keep probes from this scan window start (YYYY-MM-DD HH:MM:SS, UTC)
    #[arg(long)]
    pub scan_start: Option<String>,
    /// Scan window length in seconds, used with --scan-start
    #[arg(long, default_value_t = 45, value_parser = clap::value_parser!(u32).range(1..))]
    pub scan_len: u32,
    /// OUI registry used to fill the manufacturer field
    #[arg(long)]
    pub oui: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UploadArgs {
    /// Upload document produced by `parse`
    pub batch: PathBuf,
    /// Service base URL, e.g. http://127.0.0.1:8080
    #[arg(long)]
    pub endpoint: String,
    /// Identifier of the sniffing device
    #[arg(long)]
    pub device_id: String,
    /// OUI registry used to fill the manufacturer field
    #[arg(long)]
    pub oui: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Store file, created if missing
    #[arg(long)]
    pub store: PathBuf,
    /// OUI registry used to resolve manufacturers
    #[arg(long)]
    pub oui: Option<PathBuf>,
    /// `ssid,lat,lon` file replacing the store's SSID location table
    #[arg(long)]
    pub locations: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 50)]
    pub people: usize,
    #[arg(long, default_value_t = 30)]
    pub lectures: usize,
    #[arg(long, default_value_t = 0.7)]
    pub attendance: f64,
    #[arg(long, default_value_t = 0.95)]
    pub probe: f64,
    /// Background MACs detected per lecture
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    /// Size of the background MAC pool
    #[arg(long, default_value_t = 0)]
    pub noise_pool: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Transcript output (JSON)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Duplicates,
    Unique,
}

impl From<ModeArg> for AssignmentMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Duplicates => AssignmentMode::DuplicatesAllowed,
            ModeArg::Unique => AssignmentMode::UniqueAssignments,
        }
    }
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    /// Transcript written by `simulate`
    pub transcript: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Duplicates)]
    pub mode: ModeArg,
    /// Candidates kept per person
    #[arg(long, default_value_t = probelink::identify::DEFAULT_CAP, value_parser = clap::value_parser!(usize))]
    pub cap: usize,
    /// Drop proposals whose weight is below this
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,
    /// Per-observation accuracy CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 50)]
    pub people: usize,
    /// Lecture counts; each is one observation_number sample per run
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15, 20, 25, 30])]
    pub lectures: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.7, 0.8, 0.9, 0.95])]
    pub probe: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.6, 0.7, 0.8, 0.9])]
    pub attendance: Vec<f64>,
    /// Seeds per configuration
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// First seed; configurations share seeds base..base+seeds
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long, default_value_t = 0)]
    pub noise_pool: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Duplicates)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = probelink::identify::DEFAULT_CAP)]
    pub cap: usize,
    /// Regression input samples (CSV)
    #[arg(long)]
    pub out: PathBuf,
    /// Regression summary; stdout if omitted
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Store file
    #[arg(long)]
    pub store: PathBuf,
    /// Directory for stats.json, manufacturers.csv, hourly.csv, macs.json and sightings.json
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Rows of the manufacturer table to print
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Subcommand)]
pub enum OuiCommand {
    /// Convert the IEEE oui.txt listing into a tab-separated registry
    Convert {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the manufacturer of each MAC
    Lookup {
        #[arg(long)]
        oui: PathBuf,
        #[arg(required = true)]
        macs: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OwnerCommand {
    /// Add an owner or update their contact
    Add {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long, default_value = "")]
        contact: String,
    },
    /// Link a MAC to an existing owner
    Link {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long)]
        mac: String,
    },
    /// List owners
    List {
        #[arg(long)]
        store: PathBuf,
    },
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Parse(a) => capture::parse(&a),
        Command::Upload(a) => service::upload(&a),
        Command::Serve(a) => service::serve(&a),
        Command::Simulate(a) => experiment::simulate(&a),
        Command::Identify(a) => experiment::identify(&a),
        Command::Sweep(a) => experiment::sweep_command(&a),
        Command::Report(a) => report::report(&a),
        Command::Oui(c) => registry::oui(&c),
        Command::Owner(c) => report::owner(&c),
    }
}

/// Parse `args` and run. Returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
