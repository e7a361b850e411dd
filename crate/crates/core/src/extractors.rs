//! Per-entity extractors. Each one turns a parsed [`Entity`] into
//! dataset-tagged triples; together they cover labels, aliases,
//! descriptions, Wikidata links, sitelinks, provenance, redirects,
//! references, raw statements and mapped statements.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::LazyLock;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::dump_reader::{Entity, EntityId, RedirectRecord, Rank, Statement};
use crate::iri_scheme::{entity_iri, hash_input, statement_id, Discriminator, StatementIri};
use crate::mapping_engine::{map_qualifier, map_statement, MappingTable};
use crate::ontology::{EquivalenceMap, Ontology};
use crate::rdf::{vocab, DatasetId, Iri, Term, Triple};
use crate::values::{encode_title, value_term};

/// Sites whose key ends in `wiki` but that are not language editions of
/// Wikipedia.
const NON_LANGUAGE_WIKIS: &[&str] = &[
    "commons",
    "species",
    "meta",
    "mediawiki",
    "wikidata",
    "testwikidata",
    "sources",
    "incubator",
    "outreach",
    "wikimania",
    "foundation",
    "test",
    "test2",
    "wikifunctions",
    "beta",
    "nostalgia",
    "ten",
];

/// Wikipedia language of a sitelink key (`enwiki` → `en`,
/// `zh_min_nanwiki` → `zh-min-nan`); `None` for other projects.
pub fn sitelink_language(site: &str) -> Option<String> {
    let code = site.strip_suffix("wiki")?;
    if code.is_empty() || NON_LANGUAGE_WIKIS.contains(&code) {
        return None;
    }
    if !code.bytes().all(|b| b.is_ascii_lowercase() || b == b'_' || b.is_ascii_digit()) {
        return None;
    }
    Some(code.replace('_', "-"))
}

/// DBpedia resource IRI of a Wikipedia page in `lang`.
pub fn dbpedia_iri(lang: &str, title: &str) -> Iri {
    let title = encode_title(title);
    if lang == "en" {
        Iri::new(format!("http://dbpedia.org/resource/{title}"))
    } else {
        Iri::new(format!("http://{lang}.dbpedia.org/resource/{title}"))
    }
}

fn is_dbpedia_host(iri: &str) -> bool {
    let Some(rest) = iri.strip_prefix("http://").or_else(|| iri.strip_prefix("https://")) else {
        return false;
    };
    let host = rest.split(['/', '?', '#']).next().unwrap_or("");
    host == "dbpedia.org" || host.ends_with(".dbpedia.org")
}

/// Split of an accepted mapped triple into its dataset.
pub fn classify_mapped(predicate: &Iri, object: &Term) -> DatasetId {
    let object_iri = object.as_iri().map(Iri::as_str);
    match predicate.as_str() {
        vocab::RDF_TYPE if object_iri == Some(vocab::GEO_SPATIAL_THING) => DatasetId::MappedCoordinates,
        vocab::RDF_TYPE => DatasetId::MappedTypes,
        vocab::GEO_LAT | vocab::GEO_LONG | vocab::GEORSS_POINT => DatasetId::MappedCoordinates,
        vocab::FOAF_DEPICTION | vocab::DBO_THUMBNAIL => DatasetId::MappedImages,
        _ if object_iri.is_some_and(|o| o.starts_with(vocab::COMMONS_FILE_PATH)) => DatasetId::MappedImages,
        vocab::OWL_SAME_AS if object_iri.is_some_and(|o| !is_dbpedia_host(o)) => DatasetId::MappedExternalSameAs,
        _ => DatasetId::MappedFacts,
    }
}

fn eligible(st: &Statement) -> bool {
    st.rank != Rank::Deprecated
}

pub fn extract_terminology(e: &Entity) -> Vec<Triple> {
    let subject = entity_iri(e.id);
    let mut out = Vec::new();
    for (lang, label) in &e.labels {
        out.push(Triple::new(subject.clone(), vocab::RDFS_LABEL, Term::lang(label.clone(), lang), DatasetId::Labels));
    }
    for (lang, aliases) in &e.aliases {
        for alias in aliases {
            out.push(Triple::new(subject.clone(), vocab::DBO_ALIAS, Term::lang(alias.clone(), lang), DatasetId::Aliases));
        }
    }
    for (lang, desc) in &e.descriptions {
        out.push(Triple::new(
            subject.clone(),
            vocab::DBO_DESCRIPTION,
            Term::lang(desc.clone(), lang),
            DatasetId::Descriptions,
        ));
    }
    out
}

pub fn extract_sitelinks(e: &Entity, mapped_languages: &BTreeSet<String>) -> Vec<Triple> {
    let subject = entity_iri(e.id);
    let same_as = Iri::from(vocab::OWL_SAME_AS);
    let mut out = vec![Triple::new(
        subject.clone(),
        same_as.clone(),
        Term::iri(format!("{}{}", vocab::WKDT, e.id)),
        DatasetId::WikidataLinks,
    )];
    let mut mapped: BTreeMap<&str, Iri> = BTreeMap::new();
    for (site, title) in &e.sitelinks {
        let Some(lang) = sitelink_language(site) else {
            continue;
        };
        let iri = dbpedia_iri(&lang, title);
        out.push(Triple::new(subject.clone(), same_as.clone(), Term::Iri(iri.clone()), DatasetId::Sitelinks));
        if let Some(l) = mapped_languages.get(&lang) {
            mapped.insert(l.as_str(), iri);
        }
    }
    for (a, iri_a) in &mapped {
        for (b, iri_b) in &mapped {
            if a != b {
                out.push(Triple::new(iri_a.clone(), same_as.clone(), Term::Iri(iri_b.clone()), DatasetId::Sitelinks));
            }
        }
    }
    out
}

pub fn extract_provenance(e: &Entity) -> Vec<Triple> {
    let subject = entity_iri(e.id);
    let mut out = Vec::new();
    if let Some(page) = e.page_id {
        out.push(Triple::new(
            subject.clone(),
            vocab::DBO_WIKI_PAGE_ID,
            Term::typed(page.to_string(), vocab::XSD_INTEGER),
            DatasetId::Provenance,
        ));
    }
    if let Some(rev) = e.revision_id {
        out.push(Triple::new(
            subject,
            vocab::DBO_WIKI_PAGE_REVISION_ID,
            Term::typed(rev.to_string(), vocab::XSD_INTEGER),
            DatasetId::Provenance,
        ));
    }
    out
}

pub fn extract_redirect(r: &RedirectRecord) -> Triple {
    Triple::new(
        entity_iri(r.from),
        vocab::DBO_WIKI_PAGE_REDIRECTS,
        Term::Iri(entity_iri(r.to)),
        DatasetId::Redirects,
    )
}

struct ReificationVocab {
    rdf_type: Iri,
    statement: Term,
    subject: Iri,
    predicate: Iri,
    object: Iri,
}

static REIFICATION: LazyLock<ReificationVocab> = LazyLock::new(|| ReificationVocab {
    rdf_type: Iri::from(vocab::RDF_TYPE),
    statement: Term::iri(vocab::RDF_STATEMENT),
    subject: Iri::from(vocab::RDF_SUBJECT),
    predicate: Iri::from(vocab::RDF_PREDICATE),
    object: Iri::from(vocab::RDF_OBJECT),
});

fn reification(node: &Iri, subject: &Iri, predicate: &Iri, object: &Term, dataset: DatasetId) -> [Triple; 4] {
    let v = &*REIFICATION;
    [
        Triple::new(node.clone(), v.rdf_type.clone(), v.statement.clone(), dataset),
        Triple::new(node.clone(), v.subject.clone(), Term::Iri(subject.clone()), dataset),
        Triple::new(node.clone(), v.predicate.clone(), Term::Iri(predicate.clone()), dataset),
        Triple::new(node.clone(), v.object.clone(), object.clone(), dataset),
    ]
}

pub fn extract_raw_statements(e: &Entity) -> Vec<Triple> {
    let mut out = Vec::new();
    raw_statements_into(e, &mut out, &mut ExtractStats::default());
    out
}

fn raw_statements_into(e: &Entity, out: &mut Vec<Triple>, stats: &mut ExtractStats) {
    let subject = entity_iri(e.id);
    let mut hashes: HashMap<(EntityId, String), String> = HashMap::new();
    for st in e.statements.iter().filter(|s| eligible(s)) {
        let Some(term) = value_term(&st.value) else {
            stats.skipped_values += 1;
            continue;
        };
        let Ok(sid) = statement_id(e.id, st.property, &st.value) else {
            continue;
        };
        if let Discriminator::LiteralHash(h) = &sid.discriminator {
            let input = hash_input(&term);
            let prev = hashes.entry((st.property, h.clone())).or_insert_with(|| input.to_string());
            if *prev != input {
                warn!("statement hash collision on {sid}: {prev:?} vs {input:?}");
                stats.hash_collisions += 1;
            }
        }
        let node = sid.to_iri();
        let predicate = entity_iri(st.property);
        out.push(Triple::new(subject.clone(), predicate.clone(), term.clone(), DatasetId::RawFacts));
        out.extend(reification(&node, &subject, &predicate, &term, DatasetId::RawFactsReified));
        for q in &st.qualifiers {
            match value_term(&q.value) {
                Some(qterm) => out.push(Triple::new(node.clone(), entity_iri(q.property), qterm, DatasetId::RawQualifiers)),
                None => stats.skipped_values += 1,
            }
        }
    }
}

pub fn extract_references(e: &Entity) -> Vec<Triple> {
    let mut out = Vec::new();
    for st in e.statements.iter().filter(|s| eligible(s)) {
        if value_term(&st.value).is_none() {
            continue;
        }
        let Ok(node) = statement_id(e.id, st.property, &st.value) else {
            continue;
        };
        let node = node.to_iri();
        for reference in &st.references {
            for snak in reference {
                if let Some(term) = value_term(&snak.value) {
                    out.push(Triple::new(node.clone(), vocab::DBO_REFERENCE, term, DatasetId::References));
                }
            }
        }
    }
    out
}

pub fn extract_mapped_statements(e: &Entity, rules: &MappingTable, em: &EquivalenceMap, onto: &Ontology) -> Vec<Triple> {
    let mut out = Vec::new();
    mapped_statements_into(e, rules, em, onto, &mut out, &mut ExtractStats::default());
    out
}

fn mapped_statements_into(
    e: &Entity,
    rules: &MappingTable,
    em: &EquivalenceMap,
    onto: &Ontology,
    out: &mut Vec<Triple>,
    stats: &mut ExtractStats,
) {
    let subject = entity_iri(e.id);
    for st in &e.statements {
        let emission = map_statement(st, rules, em, onto);
        stats.unevaluated_bindings += emission.unevaluated as u64;
        if emission.is_empty() {
            continue;
        }
        let base: Option<StatementIri> = statement_id(e.id, st.property, &st.value).ok();
        let multi = emission.bindings > 1;
        let mut nodes = Vec::new();
        for t in &emission.triples {
            let dataset = classify_mapped(&t.predicate, &t.object);
            out.push(Triple::new(subject.clone(), t.predicate.clone(), t.object.clone(), dataset));
            if let Some(base) = &base {
                let node = if multi {
                    base.clone().with_binding(t.binding).to_iri()
                } else {
                    base.to_iri()
                };
                out.extend(reification(&node, &subject, &t.predicate, &t.object, DatasetId::MappedFactsReified));
                nodes.push(node);
            }
        }
        for (t, _) in &emission.rejected {
            out.push(Triple::new(subject.clone(), t.predicate.clone(), t.object.clone(), DatasetId::MappingErrors));
        }
        if nodes.is_empty() {
            continue;
        }
        for q in &st.qualifiers {
            let qe = map_qualifier(q.property, &q.value, rules, em, onto);
            stats.unevaluated_bindings += qe.unevaluated as u64;
            for node in &nodes {
                for t in &qe.triples {
                    out.push(Triple::new(node.clone(), t.predicate.clone(), t.object.clone(), DatasetId::MappedQualifiers));
                }
                for (t, _) in &qe.rejected {
                    out.push(Triple::new(node.clone(), t.predicate.clone(), t.object.clone(), DatasetId::MappingErrors));
                }
            }
        }
    }
}

/// Extraction-time counters, merged across workers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractStats {
    pub records: u64,
    pub entities: u64,
    pub redirects: u64,
    pub malformed_records: u64,
    /// Records of entity types without a modelled structure, by type.
    pub skipped_entity_types: BTreeMap<String, u64>,
    pub statements: u64,
    /// Statements whose property has a mapping rule or an equivalent
    /// property.
    pub mapped_statements: u64,
    pub deprecated_statements: u64,
    /// some/no/unsupported values and times coarser than a year, across
    /// statements and qualifiers.
    pub skipped_values: u64,
    pub unevaluated_bindings: u64,
    pub skipped_sitelinks: u64,
    pub hash_collisions: u64,
    /// Statement occurrences per Wikidata property.
    pub property_occurrences: BTreeMap<String, u64>,
}

impl ExtractStats {
    pub fn merge(&mut self, other: &ExtractStats) {
        self.records += other.records;
        self.entities += other.entities;
        self.redirects += other.redirects;
        self.malformed_records += other.malformed_records;
        for (k, v) in &other.skipped_entity_types {
            *self.skipped_entity_types.entry(k.clone()).or_default() += v;
        }
        self.statements += other.statements;
        self.mapped_statements += other.mapped_statements;
        self.deprecated_statements += other.deprecated_statements;
        self.skipped_values += other.skipped_values;
        self.unevaluated_bindings += other.unevaluated_bindings;
        self.skipped_sitelinks += other.skipped_sitelinks;
        self.hash_collisions += other.hash_collisions;
        for (k, v) in &other.property_occurrences {
            *self.property_occurrences.entry(k.clone()).or_default() += v;
        }
    }

    /// Mapped ÷ total statement occurrences; 0 when there are none.
    pub fn mapping_coverage(&self) -> f64 {
        if self.statements == 0 {
            0.0
        } else {
            self.mapped_statements as f64 / self.statements as f64
        }
    }
}

/// Runs all entity extractors with shared configuration.
pub struct Extractor<'a> {
    pub rules: &'a MappingTable,
    pub ontology: &'a Ontology,
    pub mapped_languages: &'a BTreeSet<String>,
}

impl Extractor<'_> {
    /// All triples for one entity, de-duplicated, in a fixed order.
    pub fn extract(&self, e: &Entity, stats: &mut ExtractStats) -> Vec<Triple> {
        let em = &self.ontology.equivalences;
        stats.entities += 1;
        for st in &e.statements {
            stats.statements += 1;
            *stats.property_occurrences.entry(st.property.to_string()).or_default() += 1;
            if self.rules.covers(st.property, em) {
                stats.mapped_statements += 1;
            }
            if st.rank == Rank::Deprecated {
                stats.deprecated_statements += 1;
            }
        }
        stats.skipped_sitelinks += e.sitelinks.keys().filter(|s| sitelink_language(s).is_none()).count() as u64;

        let mut out = extract_provenance(e);
        out.extend(extract_terminology(e));
        out.extend(extract_sitelinks(e, self.mapped_languages));
        raw_statements_into(e, &mut out, stats);
        out.extend(extract_references(e));
        mapped_statements_into(e, self.rules, em, self.ontology, &mut out, stats);

        let mut seen = HashSet::with_capacity(out.len());
        out.retain(|t| seen.insert(t.clone()));
        out
    }
}
