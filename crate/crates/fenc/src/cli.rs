//! `fenc` command-line front end.
//!
//! Every subcommand renders its report in memory first; the reports are then
//! printed or written atomically into `--out DIR`. Runs are deterministic for
//! a given `--seed` and configuration.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fenc_core::array::{MemoryArray, Topology};
use fenc_core::cipher::{decrypt_read, encrypt_write_blocks, KeyGranularity, KeyShape, KeyStore};
use fenc_core::device::VthState;
use fenc_core::perfmodel::compare;
use fenc_core::threat::{
    accuracy, attack_readout, bit_error_rate, run_trial, summarize, trial_rng, AttackScenario, PtPattern, TrialConfig,
    TrialOutcome,
};
use fenc_core::workloads::{reduction_report, TrafficMode};
use fenc_core::BitMatrix;

use crate::config::GlobalConfig;
use crate::report::{self, Format, RoundtripReport};
use crate::{bitfile, dump, keyfile, workload_io, FencError, Result};

#[derive(Debug, Parser)]
#[command(name = "fenc", version, about = "In-situ XOR encryption simulator for FeFET memory arrays")]
pub struct Cli {
    /// JSON configuration file (falls back to $FENC_CONFIG, then defaults).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master random seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write reports into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a plaintext into an array, read it back and report every map.
    Roundtrip(RoundtripArgs),
    /// Monte Carlo attacker readout statistics.
    Attack(AttackArgs),
    /// Latency / throughput comparison against the AES baseline.
    Perf(PerfArgs),
    /// Latency reduction over neural-network workload descriptors.
    Workloads(WorkloadArgs),
    /// Bit error rate of correct-key reads under V_TH variability.
    Ber(BerArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    And,
    Nand,
    Nor,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::And => Topology::And,
            TopologyArg::Nand => Topology::Nand,
            TopologyArg::Nor => Topology::Nor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GranularityArg {
    PerBit,
    PerRow,
    PerBlock,
}

impl From<GranularityArg> for KeyGranularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::PerBit => KeyGranularity::PerBit,
            GranularityArg::PerRow => KeyGranularity::PerRow,
            GranularityArg::PerBlock => KeyGranularity::PerBlock,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Correct,
    AllZero,
    Random,
}

impl ScenarioArg {
    fn scenario(self, seed: u64) -> AttackScenario {
        match self {
            ScenarioArg::Correct => AttackScenario::CorrectKeys,
            ScenarioArg::AllZero => AttackScenario::AllZeroKeys,
            // guesses come from a stream unrelated to the true-key stream
            ScenarioArg::Random => AttackScenario::RandomKeys { seed: seed ^ 0x9e37_79b9_7f4a_7c15 },
        }
    }

    fn name(self) -> &'static str {
        match self {
            ScenarioArg::Correct => "correct",
            ScenarioArg::AllZero => "all-zero",
            ScenarioArg::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    Checkerboard,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrafficArg {
    AllLayers,
    FinalLayer,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Plaintext file (rows of 0/1).
    #[arg(long, conflicts_with = "pattern")]
    pub pt: Option<PathBuf>,
    /// Generated plaintext pattern.
    #[arg(long, value_enum)]
    pub pattern: Option<PatternArg>,
    /// Rows of a generated plaintext.
    #[arg(long, default_value_t = 4)]
    pub rows: usize,
    /// Columns of a generated plaintext.
    #[arg(long, default_value_t = 7)]
    pub cols: usize,
    /// Hex key file.
    #[arg(long, conflicts_with = "random_keys")]
    pub keys: Option<PathBuf>,
    /// Draw random keys (the default when no key file is given).
    #[arg(long)]
    pub random_keys: bool,
    #[arg(long, value_enum, default_value = "per-bit")]
    pub granularity: GranularityArg,
    /// Overrides the configured topology.
    #[arg(long, value_enum)]
    pub topology: Option<TopologyArg>,
    /// Read back with an attacker's key set instead of the true keys.
    #[arg(long, value_enum)]
    pub attack: Option<ScenarioArg>,
    /// Also write the array state dump to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub pt_pattern: PatternArg,
    #[arg(long, default_value_t = 1)]
    pub rows: usize,
    #[arg(long, default_value_t = 128)]
    pub cols: usize,
    #[arg(long, value_enum, default_value = "per-bit")]
    pub granularity: GranularityArg,
    #[arg(long, value_enum)]
    pub topology: Option<TopologyArg>,
}

#[derive(Debug, Args)]
pub struct PerfArgs {
    /// Number of sense amplifiers.
    #[arg(long)]
    pub sa: Option<u64>,
    /// Clock frequency, e.g. `25MHz`, `50e6`, `1GHz`.
    #[arg(long, value_parser = parse_frequency)]
    pub freq: Option<f64>,
    #[arg(long, value_enum)]
    pub granularity: Option<GranularityArg>,
}

#[derive(Debug, Args)]
pub struct WorkloadArgs {
    #[arg(long, default_value = "workloads")]
    pub dir: PathBuf,
    #[arg(long, value_enum)]
    pub traffic: Option<TrafficArg>,
}

#[derive(Debug, Args)]
pub struct BerArgs {
    /// V_TH standard deviations to sweep, in volts.
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.2,0.4")]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub rows: usize,
    #[arg(long, default_value_t = 100)]
    pub cols: usize,
    #[arg(long, value_enum)]
    pub topology: Option<TopologyArg>,
}

/// Parses a frequency with an optional `Hz` / `kHz` / `MHz` / `GHz` suffix.
pub fn parse_frequency(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (number, scale) = [("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)]
        .iter()
        .find_map(|(suffix, scale)| lower.strip_suffix(suffix).map(|n| (n.trim().to_string(), *scale)))
        .unwrap_or((lower.clone(), 1.0));
    let value: f64 = number.parse().map_err(|_| format!("invalid frequency '{text}'"))?;
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("frequency must be positive, got '{text}'"));
    }
    Ok(value * scale)
}

/// Rendered outputs of one command.
#[derive(Debug, Default)]
pub struct Outcome {
    /// `(file name, contents)` pairs.
    pub files: Vec<(String, String)>,
    pub invariant_failures: Vec<String>,
}

impl Outcome {
    fn single(stem: &str, format: Format, json: String, csv: String) -> Self {
        let file = match format {
            Format::Json => (format!("{stem}.json"), json),
            Format::Csv => (format!("{stem}.csv"), csv),
        };
        Self {
            files: vec![file],
            invariant_failures: Vec::new(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut config = GlobalConfig::resolve(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match &cli.command {
        Command::Roundtrip(args) => roundtrip(&config, args, cli.format),
        Command::Attack(args) => attack(&config, args, cli.format),
        Command::Perf(args) => perf(&config, args, cli.format),
        Command::Workloads(args) => workloads(&config, args, cli.format),
        Command::Ber(args) => ber(&config, args, cli.format),
    }
}

fn roundtrip(config: &GlobalConfig, args: &RoundtripArgs, format: Format) -> Result<Outcome> {
    let mut rng = trial_rng(config.seed, 0);
    let pt = match (&args.pt, args.pattern) {
        (Some(path), _) => bitfile::load(path)?,
        (None, Some(PatternArg::Random)) => BitMatrix::random(args.rows, args.cols, &mut rng),
        (None, _) => {
            if args.rows == 0 || args.cols == 0 {
                return Err(FencError::Usage("--rows and --cols must be positive".into()));
            }
            BitMatrix::checkerboard(args.rows, args.cols)
        }
    };
    let (rows, cols) = (pt.rows(), pt.cols());
    let mut global = config.clone();
    if let Some(t) = args.topology {
        global.array.topology = t.into();
    }
    let keys = match &args.keys {
        Some(path) => {
            let keys = keyfile::load(path)?;
            if (keys.shape().rows, keys.shape().cols) != (rows, cols) {
                return Err(FencError::Usage(format!(
                    "key file covers {}x{}, plaintext is {rows}x{cols}",
                    keys.shape().rows,
                    keys.shape().cols
                )));
            }
            global.array.block_rows = Some(keys.shape().block_rows);
            keys
        }
        None => {
            let shape = KeyShape::of(&global.array_config_sized(rows, cols)?);
            KeyStore::random(args.granularity.into(), shape, &mut rng)
        }
    };
    let array_config = global.array_config_sized(rows, cols)?;
    let mut array = MemoryArray::new(array_config)?;
    let stats = encrypt_write_blocks(&mut array, &pt, &keys, &mut rng)?;

    let readout = args.attack.unwrap_or(ScenarioArg::Correct);
    let guess = match readout.scenario(config.seed) {
        AttackScenario::CorrectKeys => keys.clone(),
        AttackScenario::AllZeroKeys => KeyStore::zeros(keys.granularity(), keys.shape()),
        AttackScenario::RandomKeys { seed } => KeyStore::random(keys.granularity(), keys.shape(), &mut trial_rng(seed, 0)),
    };
    let recovered = attack_readout(&array, &guess)?;
    let (correct, sense_cycles) = decrypt_read(&array, 0, rows, &keys)?;
    let correct_key_accuracy = accuracy(&correct, &pt)?;

    let key_map = keys.expand(0, rows, cols);
    let ct = pt.xor(&key_map)?;
    let mut vth_map = Vec::with_capacity(2 * rows);
    let mut state_map = Vec::with_capacity(2 * rows);
    for r in 0..rows {
        for pick in [|c: &fenc_core::array::Cell| c.top, |c: &fenc_core::array::Cell| c.bottom] {
            let devices: Vec<_> = (0..cols).map(|c| pick(array.cell(r, c).unwrap())).collect();
            vth_map.push(devices.iter().map(|d| d.vth_effective).collect());
            state_map.push(devices.iter().map(|d| if d.state == VthState::Lvt { 'L' } else { 'H' }).collect());
        }
    }

    let report = RoundtripReport {
        topology: array.config().topology,
        granularity: keys.granularity(),
        rows,
        cols,
        seed: config.seed,
        pt: pt.to_row_strings(),
        keys: key_map.to_row_strings(),
        ct: ct.to_row_strings(),
        vth_map,
        state_map,
        readout_keys: readout.name().to_string(),
        accuracy: accuracy(&recovered, &pt)?,
        recovered: recovered.to_row_strings(),
        correct_key_accuracy,
        write_counters: stats.counters,
        sense_cycles,
    };
    let mut outcome = Outcome::single("roundtrip", format, report::to_json("roundtrip", &report), report::roundtrip_csv(&report)?);
    if !array.cells().all(|(_, c)| c.is_complementary()) {
        outcome.invariant_failures.push("written cells are not complementary".into());
    }
    if config.device.vth_sigma == 0.0 && correct_key_accuracy != 1.0 {
        outcome
            .invariant_failures
            .push(format!("correct-key accuracy {correct_key_accuracy} != 1"));
    }
    if let Some(path) = &args.dump {
        report::write_atomic(path, dump::to_json(&array).as_bytes())?;
    }
    Ok(outcome)
}

/// Runs trials on all available cores. Each trial owns its random stream, so
/// the result does not depend on the split.
fn parallel_trials(config: &TrialConfig, scenario: AttackScenario, n: usize, seed: u64) -> Result<Vec<TrialOutcome>> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(n.max(1));
    let chunk = n.div_ceil(workers);
    let results: Vec<fenc_core::Result<Vec<TrialOutcome>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(n)..((w + 1) * chunk).min(n);
                s.spawn(move || range.map(|t| run_trial(config, scenario, seed, t as u64)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(n);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn attack(config: &GlobalConfig, args: &AttackArgs, format: Format) -> Result<Outcome> {
    if args.trials == 0 {
        return Err(FencError::Usage("--trials must be at least 1".into()));
    }
    let mut global = config.clone();
    if let Some(t) = args.topology {
        global.array.topology = t.into();
    }
    let trial_config = TrialConfig {
        array: global.array_config_sized(args.rows, args.cols)?,
        granularity: args.granularity.into(),
        pt_pattern: match args.pt_pattern {
            PatternArg::Checkerboard => PtPattern::Checkerboard,
            PatternArg::Random => PtPattern::Uniform,
        },
    };
    let scenario = args.scenario.scenario(config.seed);
    let trials = parallel_trials(&trial_config, scenario, args.trials, config.seed)?;
    let report = summarize(scenario, &trial_config, config.seed, trials);
    let mut outcome = Outcome::single("attack", format, report::to_json("attack", &report), report::attack_csv(&report)?);
    if config.device.vth_sigma == 0.0 {
        if let Some(bad) = report.per_trial.iter().find(|t| t.accuracy != t.key_agreement) {
            outcome.invariant_failures.push(format!(
                "trial {}: accuracy {} differs from key agreement {}",
                bad.trial, bad.accuracy, bad.key_agreement
            ));
        }
    }
    Ok(outcome)
}

fn perf(config: &GlobalConfig, args: &PerfArgs, format: Format) -> Result<Outcome> {
    let mut cfg = config.perf;
    if let Some(sa) = args.sa {
        cfg.num_sense_amps = sa;
    }
    if let Some(f) = args.freq {
        cfg.freq_hz = f;
    }
    if let Some(g) = args.granularity {
        cfg.key_granularity = g.into();
    }
    let report = compare(&cfg, &config.baseline)?;
    Ok(Outcome::single("perf", format, report::to_json("perf", &report), report::perf_csv(&report)?))
}

fn workloads(config: &GlobalConfig, args: &WorkloadArgs, format: Format) -> Result<Outcome> {
    let specs = workload_io::load_dir(&args.dir)?;
    let traffic = match args.traffic {
        Some(TrafficArg::AllLayers) => TrafficMode::AllLayers,
        Some(TrafficArg::FinalLayer) => TrafficMode::FinalLayer,
        None => config.traffic,
    };
    let report = reduction_report(&specs, &config.perf, &config.baseline, traffic)?;
    Ok(Outcome::single(
        "workloads",
        format,
        report::to_json("workloads", &report),
        report::workloads_csv(&report)?,
    ))
}

fn ber(config: &GlobalConfig, args: &BerArgs, format: Format) -> Result<Outcome> {
    let topology = args.topology.map_or(config.array.topology, Into::into);
    let mut results = Vec::with_capacity(args.sigmas.len());
    for (i, &sigma) in args.sigmas.iter().enumerate() {
        let device = fenc_core::device::DeviceParams {
            vth_sigma: sigma,
            ..config.device
        };
        device.validate()?;
        results.push(bit_error_rate(topology, device, args.rows, args.cols, config.seed.wrapping_add(i as u64))?);
    }
    let mut outcome = Outcome::single(
        "ber",
        format,
        report::to_json("ber", &serde_json::json!({ "topology": topology, "sweep": results })),
        report::ber_csv(&results)?,
    );
    if let Some(r) = results.iter().find(|r| r.vth_sigma == 0.0 && r.errors != 0) {
        outcome
            .invariant_failures
            .push(format!("{} bit errors without variability", r.errors));
    }
    Ok(outcome)
}

/// Prints or writes the outcome; returns the process exit code.
pub fn emit(outcome: &Outcome, out_dir: Option<&Path>) -> Result<i32> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| FencError::io(dir, e))?;
            for (name, contents) in &outcome.files {
                report::write_atomic(&dir.join(name), contents.as_bytes())?;
            }
        }
        None => {
            for (_, contents) in &outcome.files {
                print!("{contents}");
            }
        }
    }
    for failure in &outcome.invariant_failures {
        eprintln!("fenc: {failure}");
    }
    Ok(if outcome.invariant_failures.is_empty() { 0 } else { 3 })
}

pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(&cli).and_then(|o| emit(&o, cli.out.as_deref())) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fenc: {e}");
            match e {
                FencError::Usage(_) => EXIT_USAGE,
                _ => EXIT_ERROR,
            }
        }
    }
}
