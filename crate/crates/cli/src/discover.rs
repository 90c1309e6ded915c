//! `insight discover`: run the search over a CSV file and write a report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use insight_core::report::ReportDocument;
use insight_core::search::{Preset, Search};
use insight_core::tabular::{load_csv, Schema};

use crate::config::{Format, RunConfigFile};

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    /// CSV file to explore.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON schema fixing column types.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named configuration C1..C10.
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interestingness a pattern must exceed to be reported.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write one JSON line per iteration to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Record wall time in the report, which makes it non-reproducible.
    #[arg(long)]
    pub timing: bool,
}

pub fn run(args: DiscoverArgs) -> anyhow::Result<()> {
    let file = match &args.config {
        Some(path) => RunConfigFile::load(path)?,
        None => RunConfigFile::default(),
    };
    let (mut cfg, mut preset) = file.base_search()?;
    if let Some(p) = args.preset {
        cfg = p.config(cfg.iterations, cfg.seed);
        preset = Some(p);
    }
    if let Some(n) = args.iterations {
        cfg.iterations = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.threshold {
        cfg.intr.success_threshold = t;
    }
    cfg.validate()?;

    let Some(input) = args.input.or(file.input) else {
        bail!("no input file given (use --input or `input` in the config)");
    };
    let schema = match args.schema.or(file.schema) {
        Some(path) => Some(Schema::load(&path)?),
        None => None,
    };
    let data = load_csv(&input, schema.as_ref()).context("loading input")?;

    let start = Instant::now();
    let mut result = Search::new(&data, cfg.clone())?.run();
    if args.timing {
        result.wall_time = Some(start.elapsed().as_secs_f64());
    }
    if let Some(path) = &args.trace {
        write(path, &result.trace_jsonl())?;
    }
    let doc = ReportDocument::new(
        &result,
        &cfg,
        Some(input.display().to_string()),
        preset.map(|p| p.name().to_owned()),
    );
    let text = match args.format.or(file.format).unwrap_or_default() {
        Format::Json => doc.to_json(),
        Format::Markdown => doc.to_markdown(),
    };
    match args.output.or(file.output) {
        Some(path) => write(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
