//! End-to-end orchestration: configuration checks, the parallel extraction
//! phase and the file-based post-processing phase.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::dataset_sink::{summarize, DatasetCatalog, DatasetWriter, RunCounters, SerializedBatch, SinkError, StatsReport};
use crate::dump_reader::{open_dump, parse_entity_bytes, DumpError, RawRecord, Record, RecordLines};
use crate::extractors::{extract_redirect, ExtractStats, Extractor};
use crate::mapping_engine::{parse_mapping_config, MappingError, MappingTable};
use crate::ontology::{load_ontology, Ontology, OntologyError};
use crate::postprocess::run_postprocess;

pub const DEFAULT_LANGUAGES: &[&str] = &["en", "de", "fr", "es", "it", "nl", "pl", "pt", "ru", "ja", "zh"];

/// Records read before a batch is handed to the worker pool.
const CHUNK_RECORDS: usize = 8192;
/// Records serialized together by one worker task.
const TASK_RECORDS: usize = 256;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{what} not found: {path}")]
    MissingFile { what: &'static str, path: PathBuf },
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },
    #[error("workers must be at least 1")]
    NoWorkers,
    #[error("invalid language code {0:?}")]
    InvalidLanguage(String),
    #[error("ontology {path}: {source}")]
    Ontology { path: PathBuf, source: OntologyError },
    #[error("mappings {path}: {source}")]
    Mapping { path: PathBuf, source: MappingError },
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sink(#[from] SinkError),
    #[error("reading dump {path}: {source}")]
    Dump { path: PathBuf, source: DumpError },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl PipelineError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Sink(SinkError::MissingDataset(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub dump_path: PathBuf,
    pub ontology_path: PathBuf,
    pub mappings_path: PathBuf,
    pub output_dir: PathBuf,
    pub mapped_languages: Vec<String>,
    pub workers: usize,
    pub compress: bool,
    pub skip_postprocess: bool,
}

impl RunConfig {
    pub fn new(dump: impl Into<PathBuf>, ontology: impl Into<PathBuf>, mappings: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            dump_path: dump.into(),
            ontology_path: ontology.into(),
            mappings_path: mappings.into(),
            output_dir: out.into(),
            mapped_languages: DEFAULT_LANGUAGES.iter().map(|s| s.to_string()).collect(),
            workers: default_workers(),
            compress: false,
            skip_postprocess: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (what, path) in [
            ("dump", &self.dump_path),
            ("ontology", &self.ontology_path),
            ("mappings", &self.mappings_path),
        ] {
            if !path.is_file() {
                return Err(ConfigError::MissingFile {
                    what,
                    path: path.clone(),
                });
            }
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        for lang in &self.mapped_languages {
            if lang.is_empty() || oxilangtag::LanguageTag::parse(lang.as_str()).is_err() {
                return Err(ConfigError::InvalidLanguage(lang.clone()));
            }
        }
        Ok(())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn read_text(path: &Path) -> Result<String, ConfigError> {
    if !path.is_file() {
        return Err(ConfigError::MissingFile {
            what: "input file",
            path: path.to_owned(),
        });
    }
    fs::read_to_string(path).map_err(|source| ConfigError::Unreadable {
        path: path.to_owned(),
        source,
    })
}

pub fn load_ontology_file(path: &Path) -> Result<Ontology, ConfigError> {
    load_ontology(&read_text(path)?).map_err(|source| ConfigError::Ontology {
        path: path.to_owned(),
        source,
    })
}

pub fn load_mappings_file(path: &Path) -> Result<MappingTable, ConfigError> {
    parse_mapping_config(&read_text(path)?).map_err(|source| ConfigError::Mapping {
        path: path.to_owned(),
        source,
    })
}

fn process_records(records: &[RawRecord], extractor: &Extractor<'_>) -> (SerializedBatch, ExtractStats) {
    let mut batch = SerializedBatch::new();
    let mut stats = ExtractStats::default();
    for raw in records {
        stats.records += 1;
        match parse_entity_bytes(&raw.bytes) {
            Ok(Record::Entity(e)) => batch.push_all(&extractor.extract(&e, &mut stats)),
            Ok(Record::Redirect(r)) => {
                stats.redirects += 1;
                batch.push(&extract_redirect(&r));
            }
            Ok(Record::Skipped { entity_type }) => {
                *stats.skipped_entity_types.entry(entity_type).or_default() += 1;
            }
            Err(e) => {
                warn!("record at byte {}: {e}", raw.offset);
                stats.malformed_records += 1;
            }
        }
    }
    (batch, stats)
}

fn finish_run(dir: &Path, catalog: &DatasetCatalog, counters: &RunCounters) -> Result<StatsReport, SinkError> {
    catalog.save(dir)?;
    counters.save(dir)?;
    let report = summarize(dir, catalog, counters)?;
    report.save(dir)?;
    Ok(report)
}

/// Runs the whole pipeline and writes datasets, catalog and statistics
/// into `cfg.output_dir`.
pub fn run_extract(cfg: &RunConfig) -> Result<StatsReport, PipelineError> {
    cfg.validate()?;
    let ontology = load_ontology_file(&cfg.ontology_path)?;
    let rules = load_mappings_file(&cfg.mappings_path)?;
    let languages: BTreeSet<String> = cfg.mapped_languages.iter().map(|l| l.to_ascii_lowercase()).collect();
    let extractor = Extractor {
        rules: &rules,
        ontology: &ontology,
        mapped_languages: &languages,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;

    let dump_err = |source: DumpError| PipelineError::Dump {
        path: cfg.dump_path.clone(),
        source,
    };
    let reader = open_dump(&cfg.dump_path).map_err(|e| dump_err(e.into()))?;
    let mut records = RecordLines::new(reader);
    let mut writer = DatasetWriter::create(&cfg.output_dir, cfg.compress)?;
    let mut stats = ExtractStats::default();
    let mut chunk: Vec<RawRecord> = Vec::with_capacity(CHUNK_RECORDS);
    loop {
        chunk.clear();
        for raw in records.by_ref().take(CHUNK_RECORDS) {
            chunk.push(raw.map_err(|e| dump_err(e.into()))?);
        }
        if chunk.is_empty() {
            break;
        }
        let results: Vec<(SerializedBatch, ExtractStats)> = pool.install(|| {
            chunk
                .par_chunks(TASK_RECORDS)
                .map(|part| process_records(part, &extractor))
                .collect()
        });
        for (batch, part_stats) in &results {
            writer.write_batch(batch)?;
            stats.merge(part_stats);
        }
        info!("{} records processed", stats.records);
    }
    let mut catalog = writer.finish()?;
    if stats.hash_collisions > 0 {
        warn!("{} statement hash collisions", stats.hash_collisions);
    }

    let mut counters = RunCounters {
        extraction: stats,
        redirect_rewrites: 0,
    };
    if !cfg.skip_postprocess {
        let report = run_postprocess(&cfg.output_dir, &mut catalog, &ontology)?;
        counters.redirect_rewrites += report.redirect_rewrites;
    }
    Ok(finish_run(&cfg.output_dir, &catalog, &counters)?)
}

/// Re-runs the post-processing passes over an existing output directory.
pub fn run_validate_only(out: &Path, ontology_path: &Path) -> Result<StatsReport, PipelineError> {
    let ontology = load_ontology_file(ontology_path)?;
    let mut catalog = DatasetCatalog::load(out)?;
    let mut counters = RunCounters::load(out)?;
    let report = run_postprocess(out, &mut catalog, &ontology)?;
    counters.redirect_rewrites += report.redirect_rewrites;
    Ok(finish_run(out, &catalog, &counters)?)
}

/// Recomputes the statistics of an existing output directory.
pub fn run_stats(out: &Path) -> Result<StatsReport, PipelineError> {
    let catalog = DatasetCatalog::load(out)?;
    let counters = RunCounters::load(out)?;
    let report = summarize(out, &catalog, &counters)?;
    report.save(out)?;
    Ok(report)
}
