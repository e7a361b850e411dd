//! N-Triples serialization into one file per dataset, the catalog of
//! written files, a line reader for post-processing passes, and the run
//! statistics.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extractors::ExtractStats;
use crate::rdf::{vocab, DatasetId, Iri, Term, Triple};

pub const CATALOG_FILE: &str = "catalog.json";
pub const COUNTERS_FILE: &str = "counters.json";
pub const STATS_JSON: &str = "stats.json";
pub const STATS_TXT: &str = "stats.txt";
pub const QUARANTINE_FILE: &str = "quarantine.txt";
const TOP_N: usize = 10;

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("i/o failure on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid IRI <{0}>")]
    InvalidIri(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("missing dataset output: {0}")]
    MissingDataset(PathBuf),
    #[error("malformed {path}: {message}")]
    BadMetadata { path: PathBuf, message: String },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SinkError + '_ {
    move |source| SinkError::Io {
        path: path.to_owned(),
        source,
    }
}

// ---------------------------------------------------------------------------
// Serialization

fn check_iri(iri: &str) -> Result<(), SinkError> {
    oxiri::Iri::parse(iri)
        .map(|_| ())
        .map_err(|_| SinkError::InvalidIri(iri.to_owned()))
}

fn check_lang(lang: &str) -> Result<(), SinkError> {
    oxilangtag::LanguageTag::parse(lang)
        .map(|_| ())
        .map_err(|_| SinkError::InvalidLanguageTag(lang.to_owned()))
}

/// Escapes a literal's lexical form for a double-quoted N-Triples string.
pub fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

fn push_iri(iri: &str, out: &mut String) -> Result<(), SinkError> {
    check_iri(iri)?;
    out.push('<');
    out.push_str(iri);
    out.push('>');
    Ok(())
}

fn push_term(term: &Term, out: &mut String) -> Result<(), SinkError> {
    match term {
        Term::Iri(iri) => push_iri(iri.as_str(), out),
        Term::Literal { lexical, datatype } => {
            out.push('"');
            escape_literal(lexical, out);
            out.push('"');
            if datatype.as_str() != vocab::XSD_STRING {
                out.push_str("^^");
                push_iri(datatype.as_str(), out)?;
            }
            Ok(())
        }
        Term::LangLiteral { lexical, lang } => {
            check_lang(lang)?;
            out.push('"');
            escape_literal(lexical, out);
            out.push_str("\"@");
            out.push_str(lang);
            Ok(())
        }
    }
}

/// Appends `<s> <p> <o> .\n` to `out`. On error `out` is left unchanged.
pub fn format_triple_into(subject: &Iri, predicate: &Iri, object: &Term, out: &mut String) -> Result<(), SinkError> {
    let mark = out.len();
    let result = (|| {
        push_iri(subject.as_str(), out)?;
        out.push(' ');
        push_iri(predicate.as_str(), out)?;
        out.push(' ');
        push_term(object, out)?;
        out.push_str(" .\n");
        Ok(())
    })();
    if result.is_err() {
        out.truncate(mark);
    }
    result
}

pub fn format_triple(t: &Triple) -> Result<String, SinkError> {
    let mut s = String::new();
    format_triple_into(&t.subject, &t.predicate, &t.object, &mut s)?;
    Ok(s)
}

// ---------------------------------------------------------------------------
// Parsing

/// One parsed N-Triples statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NtTriple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl NtTriple {
    pub fn into_triple(self, dataset: DatasetId) -> Triple {
        Triple {
            subject: self.subject,
            predicate: self.predicate,
            object: self.object,
            dataset,
        }
    }

    pub fn to_line(&self) -> Result<String, SinkError> {
        let mut s = String::new();
        format_triple_into(&self.subject, &self.predicate, &self.object, &mut s)?;
        Ok(s)
    }
}

impl From<Triple> for NtTriple {
    fn from(t: Triple) -> Self {
        NtTriple {
            subject: t.subject,
            predicate: t.predicate,
            object: t.object,
        }
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn iri(&mut self) -> Result<String, String> {
        let rest = self.rest();
        if !rest.starts_with('<') {
            return Err(format!("expected IRI at column {}", self.pos + 1));
        }
        let end = rest.find('>').ok_or("unterminated IRI")?;
        let raw = &rest[1..end];
        self.pos += end + 1;
        if raw.contains('\\') {
            unescape(raw)
        } else {
            Ok(raw.to_owned())
        }
    }

    fn literal(&mut self) -> Result<Term, String> {
        let rest = self.rest();
        let bytes = rest.as_bytes();
        let mut i = 1;
        loop {
            match bytes.get(i) {
                None => return Err("unterminated literal".into()),
                Some(b'\\') => i += 2,
                Some(b'"') => break,
                Some(_) => i += 1,
            }
        }
        let lexical = unescape(&rest[1..i])?;
        self.pos += i + 1;
        let rest = self.rest();
        if rest.starts_with("^^") {
            self.pos += 2;
            let dt = self.iri()?;
            Ok(Term::Literal {
                lexical,
                datatype: Iri::new(dt),
            })
        } else if let Some(tail) = rest.strip_prefix('@') {
            let len = tail
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(tail.len());
            if len == 0 {
                return Err("empty language tag".into());
            }
            let lang = tail[..len].to_owned();
            self.pos += 1 + len;
            Ok(Term::LangLiteral { lexical, lang })
        } else {
            Ok(Term::string(lexical))
        }
    }
}

fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('"') => out.push('"'),
            Some('\'') => out.push('\''),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some('b') => out.push('\u{8}'),
            Some('f') => out.push('\u{c}'),
            Some(u @ ('u' | 'U')) => {
                let n = if u == 'u' { 4 } else { 8 };
                let hex: String = chars.by_ref().take(n).collect();
                let code = u32::from_str_radix(&hex, 16).map_err(|_| format!("bad \\{u} escape"))?;
                out.push(char::from_u32(code).ok_or("escape is not a scalar value")?);
            }
            other => return Err(format!("unknown escape \\{}", other.unwrap_or(' '))),
        }
    }
    Ok(out)
}

/// Parses one line. `Ok(None)` for blank and comment lines.
pub fn parse_ntriples_line(line: &str) -> Result<Option<NtTriple>, String> {
    let line = line.trim_end_matches(['\n', '\r']);
    let trimmed = line.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut c = Cursor { s: line, pos: 0 };
    c.skip_ws();
    let subject = Iri::new(c.iri()?);
    c.skip_ws();
    let predicate = Iri::new(c.iri()?);
    c.skip_ws();
    let object = if c.rest().starts_with('<') {
        Term::Iri(Iri::new(c.iri()?))
    } else if c.rest().starts_with('"') {
        c.literal()?
    } else {
        return Err(format!("unsupported object at column {}", c.pos + 1));
    };
    c.skip_ws();
    if !c.rest().starts_with('.') {
        return Err("missing terminating '.'".into());
    }
    c.pos += 1;
    c.skip_ws();
    if !c.rest().is_empty() && !c.rest().starts_with('#') {
        return Err("trailing characters after '.'".into());
    }
    Ok(Some(NtTriple {
        subject,
        predicate,
        object,
    }))
}

// ---------------------------------------------------------------------------
// Catalog and files

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub dataset: DatasetId,
    pub file: String,
    pub triples: u64,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCatalog {
    pub compressed: bool,
    pub datasets: Vec<DatasetEntry>,
    pub quarantined: u64,
}

impl DatasetCatalog {
    pub fn new(compressed: bool) -> Self {
        DatasetCatalog {
            compressed,
            datasets: DatasetId::ALL
                .iter()
                .map(|&d| DatasetEntry {
                    dataset: d,
                    file: d.file_name(compressed),
                    triples: 0,
                    bytes: 0,
                })
                .collect(),
            quarantined: 0,
        }
    }

    pub fn entry(&self, d: DatasetId) -> &DatasetEntry {
        &self.datasets[d.index()]
    }

    pub fn entry_mut(&mut self, d: DatasetId) -> &mut DatasetEntry {
        &mut self.datasets[d.index()]
    }

    pub fn total_triples(&self) -> u64 {
        self.datasets.iter().map(|e| e.triples).sum()
    }

    pub fn path(&self, dir: &Path, d: DatasetId) -> PathBuf {
        dir.join(&self.entry(d).file)
    }

    pub fn load(dir: &Path) -> Result<DatasetCatalog, SinkError> {
        let path = dir.join(CATALOG_FILE);
        if !path.exists() {
            return Err(SinkError::MissingDataset(path));
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let catalog: DatasetCatalog = serde_json::from_str(&text).map_err(|e| SinkError::BadMetadata {
            path: path.clone(),
            message: e.to_string(),
        })?;
        if catalog.datasets.len() != DatasetId::ALL.len()
            || catalog.datasets.iter().zip(DatasetId::ALL).any(|(e, d)| e.dataset != *d)
        {
            return Err(SinkError::BadMetadata {
                path,
                message: "dataset list does not match the known datasets".into(),
            });
        }
        for d in DatasetId::ALL {
            let p = catalog.path(dir, *d);
            if !p.exists() {
                return Err(SinkError::MissingDataset(p));
            }
        }
        Ok(catalog)
    }

    pub fn save(&self, dir: &Path) -> Result<(), SinkError> {
        write_json(&dir.join(CATALOG_FILE), self)
    }

    /// Re-reads on-disk sizes for every dataset file.
    pub fn refresh_sizes(&mut self, dir: &Path) -> Result<(), SinkError> {
        for d in DatasetId::ALL {
            let p = self.path(dir, *d);
            let len = fs::metadata(&p).map_err(io_err(&p))?.len();
            self.entry_mut(*d).bytes = len;
        }
        Ok(())
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SinkError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, SinkError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| SinkError::BadMetadata {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn create_output(path: &Path, compressed: bool) -> Result<Box<dyn Write + Send>, SinkError> {
    let file = File::create(path).map_err(io_err(path))?;
    let buffered = BufWriter::with_capacity(1 << 16, file);
    Ok(if compressed {
        Box::new(flate2::write::GzEncoder::new(buffered, flate2::Compression::default()))
    } else {
        Box::new(buffered)
    })
}

/// Opens a dataset file for line reading, decompressing `.gz`.
pub fn open_dataset(path: &Path) -> Result<Box<dyn BufRead + Send>, SinkError> {
    let file = File::open(path).map_err(io_err(path))?;
    let reader = BufReader::with_capacity(1 << 16, file);
    Ok(if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufReader::new(flate2::bufread::MultiGzDecoder::new(reader)))
    } else {
        Box::new(reader)
    })
}

/// Calls `f` on every triple of a dataset file, in file order.
pub fn for_each_triple(path: &Path, mut f: impl FnMut(NtTriple)) -> Result<u64, SinkError> {
    let reader = open_dataset(path)?;
    let mut n = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        match parse_ntriples_line(&line) {
            Ok(Some(t)) => {
                n += 1;
                f(t)
            }
            Ok(None) => {}
            Err(message) => {
                return Err(SinkError::Parse {
                    path: path.to_owned(),
                    line: idx + 1,
                    message,
                })
            }
        }
    }
    Ok(n)
}

/// Serialized triples of one work unit, bucketed per dataset.
#[derive(Debug, Default)]
pub struct SerializedBatch {
    buffers: Vec<String>,
    counts: Vec<u64>,
    quarantine: Vec<String>,
}

impl SerializedBatch {
    pub fn new() -> Self {
        SerializedBatch {
            buffers: vec![String::new(); DatasetId::ALL.len()],
            counts: vec![0; DatasetId::ALL.len()],
            quarantine: Vec::new(),
        }
    }

    pub fn push(&mut self, t: &Triple) {
        let i = t.dataset.index();
        match format_triple_into(&t.subject, &t.predicate, &t.object, &mut self.buffers[i]) {
            Ok(()) => self.counts[i] += 1,
            Err(e) => self.quarantine.push(format!("{}\t{e}\t{t:?}", t.dataset)),
        }
    }

    pub fn push_all<'a>(&mut self, ts: impl IntoIterator<Item = &'a Triple>) {
        for t in ts {
            self.push(t);
        }
    }
}

/// Owns one output file per dataset; the only writer of those files.
pub struct DatasetWriter {
    dir: PathBuf,
    outputs: Vec<Box<dyn Write + Send>>,
    quarantine: BufWriter<File>,
    catalog: DatasetCatalog,
}

impl DatasetWriter {
    pub fn create(dir: &Path, compressed: bool) -> Result<DatasetWriter, SinkError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let catalog = DatasetCatalog::new(compressed);
        let mut outputs = Vec::new();
        for d in DatasetId::ALL {
            outputs.push(create_output(&catalog.path(dir, *d), compressed)?);
        }
        let qpath = dir.join(QUARANTINE_FILE);
        let quarantine = BufWriter::new(File::create(&qpath).map_err(io_err(&qpath))?);
        Ok(DatasetWriter {
            dir: dir.to_owned(),
            outputs,
            quarantine,
            catalog,
        })
    }

    pub fn write_batch(&mut self, batch: &SerializedBatch) -> Result<(), SinkError> {
        for (i, buf) in batch.buffers.iter().enumerate() {
            if !buf.is_empty() {
                let path = self.catalog.path(&self.dir, DatasetId::ALL[i]);
                self.outputs[i].write_all(buf.as_bytes()).map_err(io_err(&path))?;
                self.catalog.datasets[i].triples += batch.counts[i];
            }
        }
        for q in &batch.quarantine {
            let qpath = self.dir.join(QUARANTINE_FILE);
            writeln!(self.quarantine, "{q}").map_err(io_err(&qpath))?;
            self.catalog.quarantined += 1;
        }
        Ok(())
    }

    /// Serializes and appends triples; invalid ones go to the quarantine
    /// file.
    pub fn write_ntriples<'a>(&mut self, ts: impl IntoIterator<Item = &'a Triple>) -> Result<(), SinkError> {
        let mut batch = SerializedBatch::new();
        batch.push_all(ts);
        self.write_batch(&batch)
    }

    pub fn finish(self) -> Result<DatasetCatalog, SinkError> {
        let DatasetWriter {
            dir,
            outputs,
            mut quarantine,
            mut catalog,
        } = self;
        for (i, mut out) in outputs.into_iter().enumerate() {
            let path = catalog.path(&dir, DatasetId::ALL[i]);
            out.flush().map_err(io_err(&path))?;
            // Dropping a GzEncoder writes the trailer; flush surfaced errors.
            drop(out);
        }
        quarantine.flush().map_err(io_err(&dir.join(QUARANTINE_FILE)))?;
        catalog.refresh_sizes(&dir)?;
        Ok(catalog)
    }
}

/// Rewrites one dataset file line by line. `f` returns the replacement
/// line (including the trailing newline) or `None` to drop it.
pub fn rewrite_dataset(
    dir: &Path,
    catalog: &mut DatasetCatalog,
    d: DatasetId,
    mut f: impl FnMut(NtTriple, &str) -> Option<String>,
) -> Result<(), SinkError> {
    let path = catalog.path(dir, d);
    let tmp = dir.join(format!(".{}.tmp", catalog.entry(d).file));
    let mut out = create_output(&tmp, catalog.compressed)?;
    let mut count = 0;
    {
        let reader = open_dataset(&path)?;
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(io_err(&path))?;
            let parsed = parse_ntriples_line(&line).map_err(|message| SinkError::Parse {
                path: path.clone(),
                line: idx + 1,
                message,
            })?;
            let Some(t) = parsed else { continue };
            if let Some(replacement) = f(t, &line) {
                out.write_all(replacement.as_bytes()).map_err(io_err(&tmp))?;
                count += 1;
            }
        }
    }
    finish_output(out, &tmp)?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    let entry = catalog.entry_mut(d);
    entry.triples = count;
    entry.bytes = fs::metadata(&path).map_err(io_err(&path))?.len();
    Ok(())
}

fn finish_output(mut out: Box<dyn Write + Send>, path: &Path) -> Result<(), SinkError> {
    out.flush().map_err(io_err(path))?;
    drop(out);
    Ok(())
}

/// Replaces a dataset file with the given serialized triples.
pub fn replace_dataset<'a>(
    dir: &Path,
    catalog: &mut DatasetCatalog,
    d: DatasetId,
    triples: impl IntoIterator<Item = &'a Triple>,
) -> Result<(), SinkError> {
    let path = catalog.path(dir, d);
    let tmp = dir.join(format!(".{}.tmp", catalog.entry(d).file));
    let mut out = create_output(&tmp, catalog.compressed)?;
    let mut count = 0;
    let mut line = String::new();
    for t in triples {
        line.clear();
        match format_triple_into(&t.subject, &t.predicate, &t.object, &mut line) {
            Ok(()) => {
                out.write_all(line.as_bytes()).map_err(io_err(&tmp))?;
                count += 1;
            }
            Err(_) => catalog.quarantined += 1,
        }
    }
    finish_output(out, &tmp)?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    let entry = catalog.entry_mut(d);
    entry.triples = count;
    entry.bytes = fs::metadata(&path).map_err(io_err(&path))?.len();
    Ok(())
}

// ---------------------------------------------------------------------------
// Statistics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetCount {
    pub dataset: String,
    pub title: String,
    pub triples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub name: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub triples_per_dataset: Vec<DatasetCount>,
    pub total_triples: u64,
    pub quarantined: u64,
    pub top_classes: Vec<Ranked>,
    pub top_properties: Vec<Ranked>,
    pub top_mapped_qualifier_properties: Vec<Ranked>,
    pub top_wikidata_properties: Vec<Ranked>,
    pub mapping_coverage: f64,
    pub redirect_rewrites: u64,
    pub unique_subjects: u64,
    pub extraction: ExtractStats,
}

/// Counters carried between runs in `counters.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunCounters {
    pub extraction: ExtractStats,
    pub redirect_rewrites: u64,
}

impl RunCounters {
    pub fn load(dir: &Path) -> Result<RunCounters, SinkError> {
        let path = dir.join(COUNTERS_FILE);
        if path.exists() {
            read_json(&path)
        } else {
            Ok(RunCounters::default())
        }
    }

    pub fn save(&self, dir: &Path) -> Result<(), SinkError> {
        write_json(&dir.join(COUNTERS_FILE), self)
    }
}

/// Descending by count, ties broken lexicographically.
pub fn rank(counts: HashMap<String, u64>, n: usize) -> Vec<Ranked> {
    let mut v: Vec<Ranked> = counts.into_iter().map(|(name, count)| Ranked { name, count }).collect();
    v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.name.cmp(&b.name)));
    v.truncate(n);
    v
}

fn counts_predicates(d: DatasetId) -> bool {
    !matches!(
        d,
        DatasetId::RawFactsReified
            | DatasetId::MappedFactsReified
            | DatasetId::RawQualifiers
            | DatasetId::MappedQualifiers
            | DatasetId::MappingErrors
            | DatasetId::OntologyErrors
    )
}

/// Builds the report by scanning the dataset files under `dir`.
pub fn summarize(dir: &Path, catalog: &DatasetCatalog, counters: &RunCounters) -> Result<StatsReport, SinkError> {
    let mut classes: HashMap<String, u64> = HashMap::new();
    let mut properties: HashMap<String, u64> = HashMap::new();
    let mut qualifiers: HashMap<String, u64> = HashMap::new();
    let mut subjects: HashSet<String> = HashSet::new();
    for d in DatasetId::ALL {
        let d = *d;
        let typed = matches!(
            d,
            DatasetId::MappedTypes | DatasetId::MappedTransitiveTypes | DatasetId::MappedCoordinates
        );
        for_each_triple(&catalog.path(dir, d), |t| {
            if typed && t.predicate.as_str() == vocab::RDF_TYPE && t.object.lexical() != vocab::OWL_THING {
                *classes.entry(t.object.lexical().to_owned()).or_default() += 1;
            }
            if counts_predicates(d) {
                *properties.entry(t.predicate.as_str().to_owned()).or_default() += 1;
            }
            if d == DatasetId::MappedQualifiers {
                *qualifiers.entry(t.predicate.as_str().to_owned()).or_default() += 1;
            }
            if !subjects.contains(t.subject.as_str()) {
                subjects.insert(t.subject.into_string());
            }
        })?;
    }
    let wikidata: HashMap<String, u64> = counters
        .extraction
        .property_occurrences
        .iter()
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    Ok(StatsReport {
        triples_per_dataset: catalog
            .datasets
            .iter()
            .map(|e| DatasetCount {
                dataset: e.dataset.file_stem().to_owned(),
                title: e.dataset.title().to_owned(),
                triples: e.triples,
            })
            .collect(),
        total_triples: catalog.total_triples(),
        quarantined: catalog.quarantined,
        top_classes: rank(classes, TOP_N),
        top_properties: rank(properties, TOP_N),
        top_mapped_qualifier_properties: rank(qualifiers, TOP_N),
        top_wikidata_properties: rank(wikidata, TOP_N),
        mapping_coverage: counters.extraction.mapping_coverage(),
        redirect_rewrites: counters.redirect_rewrites,
        unique_subjects: subjects.len() as u64,
        extraction: counters.extraction.clone(),
    })
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<36} {:>14}", "Dataset", "Triples");
        let _ = writeln!(s, "{}", "-".repeat(51));
        for d in &self.triples_per_dataset {
            let _ = writeln!(s, "{:<36} {:>14}", d.title, d.triples);
        }
        let _ = writeln!(s, "{}", "-".repeat(51));
        let _ = writeln!(s, "{:<36} {:>14}", "Total", self.total_triples);
        let _ = writeln!(s, "{:<36} {:>14}", "Quarantined", self.quarantined);
        let _ = writeln!(s, "{:<36} {:>14}", "Unique subjects", self.unique_subjects);
        let _ = writeln!(s, "{:<36} {:>13.1}%", "Mapping coverage", self.mapping_coverage * 100.0);
        let _ = writeln!(s, "{:<36} {:>14}", "Redirect rewrites", self.redirect_rewrites);
        let e = &self.extraction;
        let _ = writeln!(
            s,
            "{:<36} {:>14}",
            "Entities / redirects / malformed",
            format!("{}/{}/{}", e.entities, e.redirects, e.malformed_records)
        );
        let _ = writeln!(s, "{:<36} {:>14}", "Skipped values", e.skipped_values);
        for (title, list) in [
            ("Top classes", &self.top_classes),
            ("Top properties", &self.top_properties),
            ("Top mapped qualifiers", &self.top_mapped_qualifier_properties),
            ("Top properties in Wikidata", &self.top_wikidata_properties),
        ] {
            let _ = writeln!(s, "\n{title}");
            for r in list {
                let _ = writeln!(s, "  {:<60} {:>12}", r.name, r.count);
            }
        }
        s
    }

    pub fn save(&self, dir: &Path) -> Result<(), SinkError> {
        write_json(&dir.join(STATS_JSON), self)?;
        let path = dir.join(STATS_TXT);
        fs::write(&path, self.to_text()).map_err(io_err(&path))
    }
}
