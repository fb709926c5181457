//! Command line front end for the mining pipeline.
//!
//! Exit codes: 0 success, 1 strict run with warning findings, 2 failure.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use eamine_core::pipeline::{
    self, build_model_stage, ingest_stage, run_pipeline, transform_stage, ArtifactSelection,
};
use eamine_core::{ChangeAction, Finding, RunConfig, Severity};

#[derive(Parser)]
#[command(
    name = "eamine",
    version,
    about = "Mines an enterprise architecture model from network observations"
)]
struct Cli {
    /// Configuration file. Falls back to $EAMINE_CONFIG, then eamine.toml.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured target framework.
    #[arg(long, global = true)]
    target: Option<String>,
    /// Override the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 1 when any warning-level finding surfaces.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the configured sources and write the observation snapshot.
    Ingest,
    /// Build the generic model and print its statistics.
    Build,
    /// Transform to the target framework and print the accounting.
    Transform,
    /// Write the model artifacts: exchange file and graph.
    Export,
    /// Write the verification report.
    Report,
    /// Run the whole pipeline and write every artifact.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn config_path(cli: &Cli) -> PathBuf {
    cli.config
        .clone()
        .or_else(|| std::env::var_os("EAMINE_CONFIG").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("eamine.toml"))
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let path = config_path(cli);
    let mut config = RunConfig::load(&path)
        .with_context(|| format!("cannot load configuration {}", path.display()))?;
    if let Some(target) = &cli.target {
        config.target = target.clone();
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn severity_counts(findings: &[Finding]) -> BTreeMap<&'static str, usize> {
    let mut counts = BTreeMap::new();
    for f in findings {
        *counts.entry(f.severity.name()).or_insert(0) += 1;
    }
    counts
}

fn findings_summary(findings: &[Finding]) -> String {
    if findings.is_empty() {
        return "no findings".to_string();
    }
    let counts = severity_counts(findings);
    let parts: Vec<String> = ["warning", "verify", "info"]
        .iter()
        .filter_map(|s| counts.get(s).map(|n| format!("{n} {s}")))
        .collect();
    format!("{} finding(s): {}", findings.len(), parts.join(", "))
}

/// Shared ending: strict runs fail on warnings, everything else passes.
fn finish(strict: bool, findings: &[Finding]) -> ExitCode {
    let warnings = findings.iter().filter(|f| f.severity == Severity::Warning).count();
    if strict && warnings > 0 {
        println!("strict: failing on {warnings} warning finding(s)");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn execute(cli: Cli) -> anyhow::Result<ExitCode> {
    let config = load_config(&cli)?;
    match cli.command {
        Command::Ingest => {
            let (store, stats) = ingest_stage(&config)?;
            for s in &stats {
                println!(
                    "ingested {} ({}): {} observation(s), {} skipped, {} ignored",
                    s.path, s.adapter, s.observations, s.skipped, s.ignored
                );
            }
            let staged = vec![(format!("{}.store.jsonl", config.run_name), store.to_bytes()?)];
            for path in pipeline::write_files(&config.output_dir, &staged)? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Build => {
            let (store, _) = ingest_stage(&config)?;
            let (model, findings) = build_model_stage(&config, &store)?;
            let mut by_kind: BTreeMap<&str, usize> = BTreeMap::new();
            for elem in model.elements() {
                *by_kind.entry(elem.kind.name()).or_insert(0) += 1;
            }
            println!(
                "model: {} element(s), {} relation(s), {} dummy element(s)",
                model.element_count(),
                model.relation_count(),
                model.dummy_count()
            );
            for (kind, count) in by_kind {
                println!("  {kind}: {count}");
            }
            println!("{}", findings_summary(&findings));
            Ok(finish(cli.strict, &findings))
        }
        Command::Transform => {
            let (store, _) = ingest_stage(&config)?;
            let (model, mut findings) = build_model_stage(&config, &store)?;
            let (target, changelog, transform_findings) = transform_stage(&config, &model)?;
            findings.extend(transform_findings);
            println!(
                "target {}: {} element(s), {} relation(s)",
                target.metamodel,
                target.elements.len(),
                target.relations.len()
            );
            let mut by_action: BTreeMap<&str, usize> = BTreeMap::new();
            for entry in &changelog.entries {
                let key = match entry.action {
                    ChangeAction::Mapped => "mapped",
                    ChangeAction::Defaulted => "defaulted",
                    ChangeAction::Downgraded => "downgraded",
                    ChangeAction::Dropped => "dropped",
                };
                *by_action.entry(key).or_insert(0) += 1;
            }
            if by_action.is_empty() {
                println!("change log: empty; the framework covered everything");
            } else {
                for (action, count) in by_action {
                    println!("change log: {count} {action}");
                }
            }
            println!("{}", findings_summary(&findings));
            Ok(finish(cli.strict, &findings))
        }
        Command::Export => {
            let run = run_pipeline(&config)?;
            let selection = ArtifactSelection {
                model: true,
                report: false,
                store: false,
            };
            let staged = pipeline::stage_artifacts(&config, &run, selection)?;
            for path in pipeline::write_files(&config.output_dir, &staged)? {
                println!("wrote {}", path.display());
            }
            println!("{}", findings_summary(&run.findings));
            Ok(finish(cli.strict, &run.findings))
        }
        Command::Report => {
            let run = run_pipeline(&config)?;
            let selection = ArtifactSelection {
                model: false,
                report: true,
                store: false,
            };
            let staged = pipeline::stage_artifacts(&config, &run, selection)?;
            for path in pipeline::write_files(&config.output_dir, &staged)? {
                println!("wrote {}", path.display());
            }
            println!("{}", findings_summary(&run.findings));
            Ok(finish(cli.strict, &run.findings))
        }
        Command::Run => {
            let run = run_pipeline(&config)?;
            for path in pipeline::write_artifacts(&config, &run)? {
                println!("wrote {}", path.display());
            }
            println!(
                "model: {} element(s), {} relation(s), {} dummy element(s); target {}: {} element(s)",
                run.model.element_count(),
                run.model.relation_count(),
                run.model.dummy_count(),
                run.target.metamodel,
                run.target.elements.len()
            );
            println!("{}", findings_summary(&run.findings));
            Ok(finish(cli.strict, &run.findings))
        }
    }
}
