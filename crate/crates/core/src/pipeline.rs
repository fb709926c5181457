//! Stage orchestration: configuration in, artifacts out.
//!
//! Stage order is fixed: ingest, map, process mining, reasoning, manual
//! enrichment, transformation, report. Mining runs before reasoning so
//! completion rules see mined processes; enrichment runs after reasoning
//! so human additions are taken as stated rather than second-guessed by
//! rules.
//!
//! `write_artifacts` stages every file fully in memory, writes to
//! temporary names, and renames into place only after everything else
//! succeeded, so a failed run never leaves partial artifacts behind.

use std::fs;
use std::path::PathBuf;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::export;
use crate::finding::{Finding, Severity};
use crate::ingest;
use crate::mapper;
use crate::model::GenericModel;
use crate::procmine;
use crate::reason;
use crate::report::{self, Report, RunMeta, SourceSummary};
use crate::store::ObservationStore;
use crate::transform::{self, ChangeLog, TargetModel};

/// Everything a run produced, in memory.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub store: ObservationStore,
    pub source_stats: Vec<SourceSummary>,
    pub model: GenericModel,
    pub target: TargetModel,
    pub changelog: ChangeLog,
    pub findings: Vec<Finding>,
    pub report: Report,
}

impl PipelineRun {
    /// True when anything warning-level surfaced; strict runs fail on it.
    pub fn has_warnings(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Warning)
    }
}

/// Reads and harmonises every configured source.
pub fn ingest_stage(config: &RunConfig) -> Result<(ObservationStore, Vec<SourceSummary>)> {
    let options = config.ingest_options();
    let mut store = ObservationStore::new();
    let mut stats = Vec::new();
    for source in &config.sources {
        store.register_source(source.clone())?;
        let outcome = ingest::read_and_parse(source, &config.base_dir, &options)?;
        let appended = store.append_all(&source.path, &outcome.observations)?;
        stats.push(SourceSummary {
            path: source.path.clone(),
            adapter: source.adapter.name().to_string(),
            priority: source.priority,
            observations: appended,
            skipped: outcome.skipped as usize,
            ignored: outcome.ignored as usize,
        });
    }
    Ok((store, stats))
}

/// Maps observations, mines processes, runs the rules, and applies manual
/// enrichment. Returns the finished generic model and the findings of the
/// mapping and reasoning stages.
pub fn build_model_stage(
    config: &RunConfig,
    store: &ObservationStore,
) -> Result<(GenericModel, Vec<Finding>)> {
    let catalogue = config.catalogue()?;
    let rules = config.rule_config()?;
    let outcome = mapper::map_observations(store, &catalogue, &rules.ports)?;
    let mut model = outcome.model;
    let mut findings = outcome.findings;
    procmine::mine_processes(&mut model, store, config.dfg_edge_threshold)?;
    findings.extend(reason::run_reasoning(&mut model, store, &rules)?);
    if let Some(doc) = config.enrichment_doc()? {
        mapper::apply_manual_enrichment(&mut model, &catalogue, &doc)?;
    }
    model.check_integrity()?;
    Ok((model, findings))
}

/// Expresses the model in the configured target framework.
pub fn transform_stage(
    config: &RunConfig,
    model: &GenericModel,
) -> Result<(TargetModel, ChangeLog, Vec<Finding>)> {
    let fw = config.framework(&config.target)?;
    transform::transform_model(model, &fw)
}

pub fn report_stage(
    config: &RunConfig,
    store: &ObservationStore,
    source_stats: &[SourceSummary],
    model: &GenericModel,
    target: &TargetModel,
    changelog: &ChangeLog,
    findings: &[Finding],
) -> Result<Report> {
    let meta = RunMeta {
        timestamp: config.timestamp,
        config_digest: config.digest.clone(),
        target: config.target.clone(),
        sources: source_stats.to_vec(),
    };
    report::build_report(
        meta,
        store,
        model,
        target,
        changelog,
        findings,
        &config.catalogue()?,
    )
}

/// Runs every stage. Nothing is written to disk.
pub fn run_pipeline(config: &RunConfig) -> Result<PipelineRun> {
    let (store, source_stats) = ingest_stage(config)?;
    let (model, mut findings) = build_model_stage(config, &store)?;
    let (target, changelog, transform_findings) = transform_stage(config, &model)?;
    findings.extend(transform_findings);
    let report = report_stage(
        config,
        &store,
        &source_stats,
        &model,
        &target,
        &changelog,
        &findings,
    )?;
    Ok(PipelineRun {
        store,
        source_stats,
        model,
        target,
        changelog,
        findings,
        report,
    })
}

/// Which artifact families to render.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArtifactSelection {
    /// Exchange XML or structured JSON, plus the Graphviz view.
    pub model: bool,
    /// Markdown and structured report.
    pub report: bool,
    /// Observation snapshot.
    pub store: bool,
}

impl ArtifactSelection {
    pub const ALL: ArtifactSelection = ArtifactSelection {
        model: true,
        report: true,
        store: true,
    };
}

/// Renders the selected artifacts fully in memory, named after the run.
pub fn stage_artifacts(
    config: &RunConfig,
    run: &PipelineRun,
    selection: ArtifactSelection,
) -> Result<Vec<(String, Vec<u8>)>> {
    let run_name = &config.run_name;
    let mut staged: Vec<(String, Vec<u8>)> = Vec::new();
    if selection.model {
        if config.target == "archimate-3" {
            staged.push((
                format!("{run_name}.archimate.xml"),
                export::to_xml(&run.target).into_bytes(),
            ));
        } else {
            staged.push((
                format!("{run_name}.{}.model.json", config.target),
                export::to_structured_json(&run.target)?.into_bytes(),
            ));
        }
        staged.push((format!("{run_name}.dot"), export::to_dot(&run.target).into_bytes()));
    }
    if selection.report {
        staged.push((
            format!("{run_name}.report.md"),
            report::render_markdown(&run.report).into_bytes(),
        ));
        staged.push((
            format!("{run_name}.report.json"),
            report::render_structured(&run.report)?.into_bytes(),
        ));
    }
    if selection.store {
        staged.push((format!("{run_name}.store.jsonl"), run.store.to_bytes()?));
    }
    Ok(staged)
}

/// Writes staged files under a directory: all content goes to temporary
/// names first and is renamed into place only after every write succeeded,
/// so a partially written final artifact can never exist.
pub fn write_files(dir: &std::path::Path, staged: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cleanup = |temps: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in temps {
            let _ = fs::remove_file(tmp);
        }
    };
    let mut temps: Vec<(PathBuf, PathBuf)> = Vec::new();
    for (name, bytes) in staged {
        let final_path = dir.join(name);
        let tmp_path = dir.join(format!("{name}.tmp"));
        if let Err(e) = fs::write(&tmp_path, bytes) {
            cleanup(&temps);
            return Err(Error::io(&tmp_path, e));
        }
        temps.push((tmp_path, final_path));
    }
    let mut written = Vec::new();
    for (i, (tmp, final_path)) in temps.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, final_path) {
            cleanup(&temps[i..]);
            return Err(Error::io(final_path, e));
        }
        written.push(final_path.clone());
    }
    Ok(written)
}

/// Renders and writes every artifact under the configured output
/// directory. Returns the written paths in a fixed order: model, graph,
/// report (md, json), observation snapshot.
pub fn write_artifacts(config: &RunConfig, run: &PipelineRun) -> Result<Vec<PathBuf>> {
    let staged = stage_artifacts(config, run, ArtifactSelection::ALL)?;
    write_files(&config.output_dir, &staged)
}
