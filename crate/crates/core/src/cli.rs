//! `dedupe-kb` command line.
//!
//! Exit codes: 0 on success, 1 for bad input, 2 for internal errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cleaning::clean_record;
use crate::evaluation::evaluate;
use crate::groundtruth::{generate_ground_truth, load_groups};
use crate::ingest::{default_config, load_config, load_kb, load_links, save_kb, write_links};
use crate::matcher::{compare_records, deduplicate_with};
use crate::record::MatchConfig;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dedupe-kb",
    version,
    about = "Find duplicate records in a CSV knowledge base"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect duplicates and write a links file.
    Dedup {
        #[arg(long)]
        kb: PathBuf,
        /// Match configuration (JSON). Defaults to the bundled configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the configured match threshold.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compare a links file against ground truth.
    Evaluate {
        #[arg(long)]
        found: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Build a ground-truth knowledge base and links file from duplicate groups.
    MakeTruth {
        #[arg(long)]
        groups: PathBuf,
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_kb: PathBuf,
        #[arg(long)]
        out_links: PathBuf,
    },
    /// Show per-attribute evidence for one record pair.
    Explain {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        id_a: String,
        id_b: String,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(CliError::Engine(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_internal() {
                EXIT_INTERNAL
            } else {
                EXIT_INPUT
            }
        }
        Err(CliError::Output(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

enum CliError {
    Engine(Error),
    Output(std::io::Error),
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Engine(e.into())
    }
}

fn output(e: std::io::Error) -> CliError {
    CliError::Output(e)
}

fn config_from(path: Option<&Path>, threshold: Option<f64>) -> Result<MatchConfig, CliError> {
    let config = match path {
        Some(p) => load_config(p)?,
        None => default_config(),
    };
    Ok(match threshold {
        Some(t) => config.with_threshold(t)?,
        None => config,
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Dedup {
            kb,
            config,
            out: out_path,
            threshold,
            jobs,
        } => {
            let config = config_from(config.as_deref(), threshold)?;
            let kb = load_kb(&kb, &config)?;
            let run = deduplicate_with(&kb, &config, jobs)?;
            write_links(&run.links, &out_path)?;
            writeln!(out, "records: {}", run.records).map_err(output)?;
            writeln!(out, "candidate pairs: {}", run.candidate_pairs).map_err(output)?;
            writeln!(out, "links: {}", run.links.len()).map_err(output)?;
        }
        Command::Evaluate { found, truth, json } => {
            let found = load_links(&found)?;
            let truth = load_links(&truth)?;
            let report = evaluate(&found, &truth);
            if json {
                writeln!(out, "{}", report.to_json()).map_err(output)?;
            } else {
                writeln!(out, "{report}").map_err(output)?;
            }
        }
        Command::MakeTruth {
            groups,
            kb,
            config,
            seed,
            out_kb,
            out_links,
        } => {
            let config = config_from(config.as_deref(), None)?;
            let groups = load_groups(&groups).map_err(Error::from)?;
            let kb = load_kb(&kb, &config)?;
            let gt = generate_ground_truth(&groups, &kb, seed)?;
            save_kb(&gt.kb, &config.id_attribute, &out_kb)?;
            write_links(&gt.links, &out_links)?;
            writeln!(
                out,
                "groups: {} (duplicates: {}, uniques: {})",
                groups.len(),
                gt.duplicate_groups.len(),
                gt.unique_groups.len()
            )
            .map_err(output)?;
            writeln!(out, "records: {}", gt.kb.len()).map_err(output)?;
            writeln!(out, "links: {}", gt.links.len()).map_err(output)?;
        }
        Command::Explain {
            kb,
            config,
            threshold,
            id_a,
            id_b,
        } => {
            let config = config_from(config.as_deref(), threshold)?;
            let kb = load_kb(&kb, &config)?;
            let raw_a = kb
                .get(&id_a)
                .ok_or_else(|| Error::UnknownRecord(id_a.clone()))?;
            let raw_b = kb
                .get(&id_b)
                .ok_or_else(|| Error::UnknownRecord(id_b.clone()))?;
            let verdict = compare_records(
                &clean_record(raw_a, &config),
                &clean_record(raw_b, &config),
                &config,
            )?;
            for (evidence, spec) in verdict.evidence.iter().zip(&config.attributes) {
                let sim = match evidence.similarity {
                    Some(s) => s.to_string(),
                    None => "MISSING".to_string(),
                };
                writeln!(
                    out,
                    "{}\t{:?}\t{:?}\t{}\t{:.6}",
                    spec.name,
                    raw_a.get(&spec.name),
                    raw_b.get(&spec.name),
                    sim,
                    evidence.probability
                )
                .map_err(output)?;
            }
            writeln!(out, "combined: {:.6}", verdict.probability).map_err(output)?;
            writeln!(
                out,
                "decision: {} (threshold {})",
                if verdict.is_match {
                    "MATCH"
                } else {
                    "NO MATCH"
                },
                config.threshold
            )
            .map_err(output)?;
        }
    }
    Ok(())
}
