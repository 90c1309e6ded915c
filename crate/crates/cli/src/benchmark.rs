//! `insight benchmark`: run presets over the synthetic datasets and score
//! them against the planted patterns.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use insight_core::report::ReportDocument;
use insight_core::search::{run_search, Preset};
use insight_core::synth::{
    evaluate_run, generate_scenario1, generate_scenario2, rank_configurations, Evaluation, PlantedPatternSpec,
    Scenario2, CUTOFFS, SEEDS,
};
use insight_core::Dataset;
use rayon::prelude::*;
use serde::Serialize;

use crate::discover::write;
use crate::generate::scenario1_name;

/// Budget cap of the scenario-1 sweep; runs that never find the insight
/// count as needing this many iterations.
pub const SCENARIO1_CAP: u64 = 500;

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub scenario: u8,
    /// Datasets to run: A..E for scenario 2, indices 1..10 for scenario 1.
    /// Accepts lists and inclusive ranges such as `1..3`. Defaults to all.
    #[arg(long)]
    pub datasets: Option<String>,
    /// Comma-separated presets. Defaults to C1..C10.
    #[arg(long, value_delimiter = ',')]
    pub presets: Vec<Preset>,
    /// Comma-separated iteration cut-offs. Scenario 1 uses the largest as
    /// its cap.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Vec<u64>,
    /// Search seeds as a list or an inclusive range such as `1..10`.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Seed of the dataset generator.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub output: PathBuf,
}

/// Parses `a,b,c` and inclusive ranges `a..b`, in either combination.
pub fn parse_u64_list(text: &str) -> anyhow::Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().with_context(|| format!("bad range `{part}`"))?;
            let b: u64 = b.trim().parse().with_context(|| format!("bad range `{part}`"))?;
            if a > b {
                bail!("empty range `{part}`");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().with_context(|| format!("bad number `{part}`"))?);
        }
    }
    if out.is_empty() {
        bail!("empty list `{text}`");
    }
    Ok(out)
}

struct Workload {
    name: String,
    data: Dataset,
    specs: Vec<PlantedPatternSpec>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct CellFile<'a> {
    dataset: &'a str,
    preset: &'a str,
    seed: u64,
    cutoff: u64,
    evaluation: &'a Evaluation,
    /// First iteration at which a planted pattern was reported.
    first_found: Option<u64>,
    report: ReportDocument,
}

struct Cell {
    dataset: String,
    preset: Preset,
    seed: u64,
    cutoff: u64,
    evaluation: Evaluation,
    first_found: Option<u64>,
    report: ReportDocument,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct Aggregate {
    dataset: String,
    preset: String,
    cutoff: u64,
    runs: usize,
    /// Per planted pattern, the fraction of seeds finding it.
    mean_found: Vec<f64>,
    /// Per planted pattern, the mean number of matching reports.
    mean_count: Vec<f64>,
    /// Sum of `meanFound`: expected number of planted patterns found.
    expected_found: f64,
    mean_patterns: f64,
    mean_other: f64,
    /// Seeds with at least one planted pattern found.
    found_runs: usize,
    /// Mean first-found iteration, counting misses as the cut-off.
    mean_iterations_to_find: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct Summary {
    scenario: u8,
    data_seed: u64,
    datasets: Vec<String>,
    presets: Vec<String>,
    cutoffs: Vec<u64>,
    seeds: Vec<u64>,
    /// Which aggregate the ranks use and in which direction.
    rank_metric: &'static str,
    aggregates: Vec<Aggregate>,
    /// Average rank per preset over datasets, keyed by cut-off.
    ranks: BTreeMap<String, BTreeMap<String, f64>>,
}

fn workloads(args: &BenchmarkArgs) -> anyhow::Result<Vec<Workload>> {
    if args.scenario == 1 {
        let indices = match &args.datasets {
            Some(text) => parse_u64_list(text)?,
            None => (1..=10).collect(),
        };
        indices
            .into_par_iter()
            .map(|i| {
                let (data, spec) = generate_scenario1(i as usize, args.data_seed)?;
                Ok(Workload {
                    name: scenario1_name(i as usize),
                    data,
                    specs: vec![spec],
                })
            })
            .collect()
    } else {
        let which: Vec<Scenario2> = match &args.datasets {
            Some(text) => text
                .split(',')
                .map(|s| s.parse::<Scenario2>())
                .collect::<Result<_, _>>()?,
            None => Scenario2::ALL.to_vec(),
        };
        which
            .into_par_iter()
            .map(|w| {
                let (data, specs) = generate_scenario2(w, args.data_seed)?;
                Ok(Workload {
                    name: w.name().to_owned(),
                    data,
                    specs,
                })
            })
            .collect()
    }
}

pub fn run(args: BenchmarkArgs) -> anyhow::Result<()> {
    let presets = if args.presets.is_empty() { Preset::ALL.to_vec() } else { args.presets.clone() };
    let mut cutoffs = if !args.cutoffs.is_empty() {
        args.cutoffs.clone()
    } else if args.scenario == 1 {
        vec![SCENARIO1_CAP]
    } else {
        CUTOFFS.to_vec()
    };
    cutoffs.sort_unstable();
    cutoffs.dedup();
    if cutoffs[0] == 0 {
        bail!("cut-offs must be positive");
    }
    if args.scenario == 1 {
        cutoffs = vec![*cutoffs.last().expect("non-empty")];
    }
    let seeds = match &args.seeds {
        Some(text) => parse_u64_list(text)?,
        None => SEEDS.to_vec(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.jobs {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("cannot start worker pool")?;

    let loads = pool.install(|| workloads(&args))?;
    let max_cutoff = *cutoffs.last().expect("non-empty");
    let mut jobs: Vec<(&Workload, Preset, u64)> = Vec::new();
    for w in &loads {
        for &p in &presets {
            jobs.extend(seeds.iter().map(|&s| (w, p, s)));
        }
    }
    let cells: Vec<Vec<Cell>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(w, preset, seed)| run_cell(w, preset, seed, &cutoffs, max_cutoff))
            .collect::<anyhow::Result<_>>()
    })?;
    let cells: Vec<Cell> = cells.into_iter().flatten().collect();

    let cell_dir = args.output.join("cells");
    std::fs::create_dir_all(&cell_dir).with_context(|| format!("cannot create {}", cell_dir.display()))?;
    for c in &cells {
        let file = CellFile {
            dataset: &c.dataset,
            preset: c.preset.name(),
            seed: c.seed,
            cutoff: c.cutoff,
            evaluation: &c.evaluation,
            first_found: c.first_found,
            report: c.report.clone(),
        };
        let name = format!("{}_{}_seed{}_iter{}.json", c.dataset, c.preset, c.seed, c.cutoff);
        write(&cell_dir.join(name), &canonical_json(&file))?;
    }

    let summary = summarize(&args, &loads, &presets, &cutoffs, &seeds, &cells)?;
    write(&args.output.join("summary.json"), &canonical_json(&summary))?;
    eprintln!("{} runs written to {}", cells.len(), args.output.display());
    Ok(())
}

fn run_cell(w: &Workload, preset: Preset, seed: u64, cutoffs: &[u64], max_cutoff: u64) -> anyhow::Result<Vec<Cell>> {
    let cfg = preset.config(max_cutoff, seed);
    let full = run_search(&w.data, &cfg).with_context(|| format!("{} {preset} seed {seed}", w.name))?;
    Ok(cutoffs
        .iter()
        .map(|&cutoff| {
            let result = full.truncated(cutoff);
            let first_found = result
                .patterns
                .iter()
                .filter(|p| w.specs.iter().any(|s| s.matches(p)))
                .map(|p| p.iteration)
                .min();
            let mut cut_cfg = cfg.clone();
            cut_cfg.iterations = cutoff;
            Cell {
                dataset: w.name.clone(),
                preset,
                seed,
                cutoff,
                evaluation: evaluate_run(&result, &w.specs),
                first_found,
                report: ReportDocument::new(&result, &cut_cfg, Some(w.name.clone()), Some(preset.name().to_owned())),
            }
        })
        .collect())
}

fn summarize(
    args: &BenchmarkArgs,
    loads: &[Workload],
    presets: &[Preset],
    cutoffs: &[u64],
    seeds: &[u64],
    cells: &[Cell],
) -> anyhow::Result<Summary> {
    let mut aggregates = Vec::new();
    let mut tables: BTreeMap<u64, BTreeMap<(String, String), f64>> = BTreeMap::new();
    for w in loads {
        for &preset in presets {
            for &cutoff in cutoffs {
                let runs: Vec<&Cell> = cells
                    .iter()
                    .filter(|c| c.dataset == w.name && c.preset == preset && c.cutoff == cutoff)
                    .collect();
                let n = runs.len() as f64;
                let per_spec = |f: &dyn Fn(&Cell, usize) -> f64| -> Vec<f64> {
                    (0..w.specs.len())
                        .map(|i| runs.iter().map(|c| f(c, i)).sum::<f64>() / n)
                        .collect()
                };
                let mean_found = per_spec(&|c, i| c.evaluation.per_spec[i].found as f64);
                let mean_count = per_spec(&|c, i| c.evaluation.per_spec[i].count as f64);
                let agg = Aggregate {
                    dataset: w.name.clone(),
                    preset: preset.name().to_owned(),
                    cutoff,
                    runs: runs.len(),
                    expected_found: mean_found.iter().sum(),
                    mean_found,
                    mean_count,
                    mean_patterns: runs.iter().map(|c| c.report.patterns.len() as f64).sum::<f64>() / n,
                    mean_other: runs.iter().map(|c| c.evaluation.other_count as f64).sum::<f64>() / n,
                    found_runs: runs.iter().filter(|c| c.first_found.is_some()).count(),
                    mean_iterations_to_find: runs
                        .iter()
                        .map(|c| c.first_found.unwrap_or(cutoff) as f64)
                        .sum::<f64>()
                        / n,
                };
                let score = if args.scenario == 1 { agg.mean_iterations_to_find } else { agg.expected_found };
                tables
                    .entry(cutoff)
                    .or_default()
                    .insert((agg.preset.clone(), agg.dataset.clone()), score);
                aggregates.push(agg);
            }
        }
    }
    let higher_is_better = args.scenario == 2;
    let mut ranks = BTreeMap::new();
    for (cutoff, table) in &tables {
        ranks.insert(cutoff.to_string(), rank_configurations(table, higher_is_better)?);
    }
    Ok(Summary {
        scenario: args.scenario,
        data_seed: args.data_seed,
        datasets: loads.iter().map(|w| w.name.clone()).collect(),
        presets: presets.iter().map(|p| p.name().to_owned()).collect(),
        cutoffs: cutoffs.to_vec(),
        seeds: seeds.to_vec(),
        rank_metric: if higher_is_better {
            "expectedFound (higher is better)"
        } else {
            "meanIterationsToFind (lower is better)"
        },
        aggregates,
        ranks,
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
fn canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("benchmark documents serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        assert_eq!(parse_u64_list("1..3").unwrap(), [1, 2, 3]);
        assert_eq!(parse_u64_list("4, 1..2,9").unwrap(), [4, 1, 2, 9]);
        assert!(parse_u64_list("3..1").is_err());
        assert!(parse_u64_list("").is_err());
        assert!(parse_u64_list("x").is_err());
    }
}
