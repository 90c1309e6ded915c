//! `insight generate`: write a synthetic dataset with its planted patterns.

use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use insight_core::synth::{export_dataset, generate_scenario1, generate_scenario2, Scenario2};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// 1 for the trend sweep, 2 for the mixed-pattern datasets.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub scenario: u8,
    /// 1..10 for scenario 1, A..E for scenario 2.
    #[arg(long)]
    pub variant: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving `<name>.csv`, `<name>.schema.json` and
    /// `<name>.specs.json`.
    #[arg(long)]
    pub output: PathBuf,
}

pub fn run(args: GenerateArgs) -> anyhow::Result<()> {
    let (name, data, specs) = if args.scenario == 1 {
        let Ok(i) = args.variant.trim().parse::<usize>() else {
            bail!("scenario 1 variant must be an integer in 1..=10, got `{}`", args.variant);
        };
        let (d, spec) = generate_scenario1(i, args.seed)?;
        (scenario1_name(i), d, vec![spec])
    } else {
        let which: Scenario2 = args.variant.parse()?;
        let (d, specs) = generate_scenario2(which, args.seed)?;
        (which.name().to_owned(), d, specs)
    };
    export_dataset(&args.output, &name, &data, &specs)?;
    eprintln!(
        "wrote {name} ({} rows, {} columns) to {}",
        data.row_count(),
        data.column_count(),
        args.output.display()
    );
    Ok(())
}

pub fn scenario1_name(i: usize) -> String {
    format!("S1_{i:02}")
}
