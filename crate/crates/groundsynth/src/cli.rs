//! Command-line driver.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use groundsynth_core::eval::{snap_to_element, split_page_blocks, BLOCK_VIEWPORT};
use groundsynth_core::geometry::{BBox, Point};
use groundsynth_core::resolution::plan_grid;
use groundsynth_core::sample::ScreenshotRecord;
use groundsynth_core::stats::StatsAccumulator;

use crate::adapters::{adapt_file, load_profile, SourceName};
use crate::augment::marker::render_marker_file;
use crate::augment::{AugmentClient, AugmentError};
use crate::config::{load_config, load_policy, RunConfig};
use crate::downsample::downsample_file;
use crate::evaluation::{evaluate, render_table, Gold, Prediction};
use crate::extract::{ingest, run_driver, ExtractionConfig, ViewportProfile};
use crate::jsonl::{read_all, write_json, JsonlReader, JsonlWriter};
use crate::pipeline::{synthesize, Mode, PipelineError, SynthesisOptions};
use crate::snapshot_io::{list_snapshots, read_snapshot, write_snapshot};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_REMOTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "groundsynth", version, about = "GUI grounding data synthesis and evaluation")]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an extraction driver (or read its saved output) and write a validated snapshot.
    Extract(ExtractArgs),
    /// Turn snapshots into grounding samples.
    Synthesize(SynthArgs),
    /// Convert a third-party dataset into sample records.
    Adapt(AdaptArgs),
    /// Tag, descriptor and expression-type shares of a sample file.
    Stats(StatsArgs),
    /// Cap how often any one label occurs in a sample file.
    Downsample(DownsampleArgs),
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Print the slice-grid plan for an image size.
    PlanRes(PlanArgs),
    /// Draw the box-and-arrow marker on a screenshot.
    RenderMarker(MarkerArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Shell command that prints snapshot JSON; receives EXTRACT_CONFIG.
    #[arg(long, conflicts_with = "from", required_unless_present = "from")]
    pub driver: Option<String>,
    /// Previously captured extractor output.
    #[arg(long)]
    pub from: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5000)]
    pub max_elements: usize,
    #[arg(long)]
    pub include_offscreen: bool,
    #[arg(long, value_enum, default_value_t = ViewportProfile::Desktop)]
    pub viewport: ViewportProfile,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Hybrid,
    DirectFree,
    DirectFunctional,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Snapshot directory or single snapshot file.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Use the offline mock instead of the model endpoint.
    #[arg(long)]
    pub mock_llm: bool,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub page_elems: Option<usize>,
    #[arg(long)]
    pub label_cap: Option<usize>,
    #[arg(long)]
    pub rel_dist: Option<u32>,
    #[arg(long)]
    pub sim_threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Hybrid)]
    pub mode: ModeArg,
    /// Also write corpus statistics here.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdaptArgs {
    #[arg(long, value_enum)]
    pub source: SourceName,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Field-mapping profile; defaults to the bundled one for the source.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DownsampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Point-in-box accuracy by platform and element type.
    Ground {
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Report JSON path; without it the JSON goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Viewport-height blocks covering a full-page screenshot.
    Blocks {
        #[arg(long)]
        height: u32,
        #[arg(long, default_value_t = BLOCK_VIEWPORT.1)]
        block_height: u32,
    },
    /// Smallest visible element containing a point.
    Snap {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        x: u32,
        #[arg(long)]
        y: u32,
    },
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub width: u32,
    #[arg(long)]
    pub height: u32,
}

#[derive(Debug, Args)]
pub struct MarkerArgs {
    #[arg(long)]
    pub screenshot: PathBuf,
    /// `x,y,w,h`
    #[arg(long, value_parser = parse_bbox)]
    pub bbox: BBox,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_bbox(s: &str) -> Result<BBox, String> {
    let v: Vec<u32> = s.split(',').map(|p| p.trim().parse::<u32>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, w, h] if w > 0 && h > 0 => Ok(BBox::new(x, y, w, h)),
        _ => Err("expected x,y,w,h with positive w and h".into()),
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(m: impl ToString) -> Self {
        Self { code: EXIT_USAGE, message: m.to_string() }
    }

    fn data(m: impl ToString) -> Self {
        Self { code: EXIT_DATA, message: m.to_string() }
    }
}

impl From<AugmentError> for CliError {
    fn from(e: AugmentError) -> Self {
        let code = match e {
            AugmentError::Config(_) => EXIT_USAGE,
            AugmentError::Request(_) => EXIT_DATA,
            AugmentError::Remote(_) => EXIT_REMOTE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Remote(a) => a.into(),
            other => CliError::data(other),
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_extract(a: ExtractArgs) -> Result<(), CliError> {
    let cfg = ExtractionConfig { max_elements: a.max_elements, include_offscreen: a.include_offscreen, viewport_profile: a.viewport };
    let snap = match (&a.driver, &a.from) {
        (Some(d), _) => run_driver(d, &cfg, None).map_err(CliError::data)?,
        (None, Some(f)) => {
            let raw = std::fs::read(f).map_err(|e| CliError::data(format!("{}: {e}", f.display())))?;
            ingest(&raw, &cfg).map_err(CliError::data)?
        }
        (None, None) => return Err(CliError::usage("one of --driver or --from is required")),
    };
    write_snapshot(&a.out, &snap).map_err(|e| CliError::data(format!("{}: {e}", a.out.display())))?;
    log::info!("wrote {} ({} elements)", a.out.display(), snap.elements.len());
    Ok(())
}

fn cmd_synthesize(a: SynthArgs, rc: RunConfig) -> Result<(), CliError> {
    let input = a.input.or(rc.input).ok_or_else(|| CliError::usage("--in is required"))?;
    let out = a.out.or(rc.output).ok_or_else(|| CliError::usage("--out is required"))?;
    let policy = match a.policy.or(rc.policy) {
        Some(p) => load_policy(&p).map_err(CliError::usage)?,
        None => Default::default(),
    };
    let seed = a.seed.or(rc.seed).unwrap_or(policy.seed);
    let mut caps = rc.caps;
    caps.page_elems = a.page_elems.unwrap_or(caps.page_elems);
    caps.label_cap = a.label_cap.unwrap_or(caps.label_cap);
    caps.rel_dist = a.rel_dist.unwrap_or(caps.rel_dist);
    caps.sim_threshold = a.sim_threshold.unwrap_or(caps.sim_threshold);
    let jobs = a
        .jobs
        .or(rc.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mode = match a.mode {
        ModeArg::Hybrid => Mode::Hybrid,
        ModeArg::DirectFree => Mode::DirectFree,
        ModeArg::DirectFunctional => Mode::DirectFunctional,
    };

    let mut aug = rc.augment;
    aug.apply_lookup(|k| std::env::var(k).ok());
    aug.mock |= a.mock_llm || rc.mock_llm;
    let client = AugmentClient::new(aug)?;

    let inputs = list_snapshots(&input).map_err(|e| CliError::data(format!("{}: {e}", input.display())))?;
    let opts = SynthesisOptions { seed, caps, policy, jobs, mode };
    let (records, summary) = synthesize(&inputs, &client, &opts)?;

    let mut w = JsonlWriter::create(&out).map_err(CliError::data)?;
    let mut acc = StatsAccumulator::default();
    for r in &records {
        w.write(r).map_err(CliError::data)?;
        r.samples.iter().for_each(|e| acc.add(e));
    }
    w.finish().map_err(CliError::data)?;
    if let Some(p) = a.stats {
        write_json(&p, &acc.finish()).map_err(CliError::data)?;
    }
    eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    Ok(())
}

fn cmd_adapt(a: AdaptArgs) -> Result<(), CliError> {
    let profile = match &a.profile {
        Some(p) => load_profile(p).map_err(CliError::usage)?,
        None => a.source.default_profile(),
    };
    let counters = adapt_file(a.source, &profile, &a.input, &a.out, a.seed).map_err(CliError::data)?;
    eprintln!("{}", serde_json::to_string(&counters).expect("counters serialize"));
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<(), CliError> {
    let mut acc = StatsAccumulator::default();
    for rec in JsonlReader::<ScreenshotRecord>::open(&a.input).map_err(CliError::data)? {
        let (_, rec) = rec.map_err(CliError::data)?;
        rec.samples.iter().for_each(|e| acc.add(e));
    }
    let report = acc.finish();
    match &a.out {
        Some(p) => write_json(p, &report).map_err(CliError::data)?,
        None => print_json(&report),
    }
    Ok(())
}

fn cmd_downsample(a: DownsampleArgs) -> Result<(), CliError> {
    let s = downsample_file(&a.input, &a.out, a.cap, a.seed).map_err(CliError::data)?;
    eprintln!("{}", serde_json::to_string(&s).expect("summary serializes"));
    Ok(())
}

fn cmd_eval(c: EvalCommand) -> Result<(), CliError> {
    match c {
        EvalCommand::Ground { preds, gold, out } => {
            let preds: Vec<Prediction> = read_all(&preds).map_err(CliError::data)?;
            let gold: Vec<Gold> = read_all(&gold).map_err(CliError::data)?;
            let (report, _) = evaluate(&preds, &gold).map_err(CliError::data)?;
            match out {
                Some(p) => {
                    write_json(&p, &report).map_err(CliError::data)?;
                    print!("{}", render_table(&report.table));
                }
                None => {
                    print_json(&report);
                    eprint!("{}", render_table(&report.table));
                }
            }
        }
        EvalCommand::Blocks { height, block_height } => {
            if height == 0 || block_height == 0 {
                return Err(CliError::usage("--height and --block-height must be positive"));
            }
            let blocks: Vec<_> = split_page_blocks(height, block_height)
                .into_iter()
                .map(|(y, h)| serde_json::json!({ "y_offset": y, "height": h }))
                .collect();
            print_json(&blocks);
        }
        EvalCommand::Snap { snapshot, x, y } => {
            let s = read_snapshot(&snapshot).map_err(|e| CliError::data(format!("{}: {e}", snapshot.display())))?;
            let id = snap_to_element(Point::new(x, y), &s.elements).map(|e| e.id.clone());
            print_json(&serde_json::json!({ "element_id": id }));
        }
    }
    Ok(())
}

fn cmd_plan(a: PlanArgs) -> Result<(), CliError> {
    if a.width == 0 || a.height == 0 {
        return Err(CliError::usage("--width and --height must be positive"));
    }
    print_json(&plan_grid(a.width, a.height));
    Ok(())
}

fn cmd_marker(a: MarkerArgs) -> Result<(), CliError> {
    render_marker_file(&a.screenshot, a.bbox, &a.out).map_err(CliError::data)
}

fn load_run_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => load_config(p).map_err(CliError::usage),
        None => Ok(RunConfig::default()),
    }
}

/// Runs one command and returns its process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = load_run_config(cli.config.as_deref()).and_then(|rc| match cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Synthesize(a) => cmd_synthesize(a, rc),
        Command::Adapt(a) => cmd_adapt(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Downsample(a) => cmd_downsample(a),
        Command::Eval(c) => cmd_eval(c),
        Command::PlanRes(a) => cmd_plan(a),
        Command::RenderMarker(a) => cmd_marker(a),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbox_flag() {
        assert_eq!(parse_bbox("1, 2,3,4").unwrap(), BBox::new(1, 2, 3, 4));
        assert!(parse_bbox("1,2,0,4").is_err());
        assert!(parse_bbox("1,2,3").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["groundsynth", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["groundsynth", "plan-res", "--width", "0", "--height", "5"]), EXIT_USAGE);
        assert_eq!(run(["groundsynth", "synthesize", "--out", "x.jsonl"]), EXIT_USAGE);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
