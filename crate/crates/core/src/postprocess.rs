//! Passes that run over the written datasets once extraction is done:
//! redirect resolution, transitive type inference and the disjointness
//! check of mapped object properties.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use log::{info, warn};

use crate::dataset_sink::{for_each_triple, replace_dataset, rewrite_dataset, DatasetCatalog, NtTriple, SinkError};
use crate::dump_reader::{EntityId, RedirectRecord};
use crate::iri_scheme::{entity_iri, entity_of_iri, Discriminator, StatementIri};
use crate::ontology::{Ontology, RangeSpec};
use crate::rdf::{vocab, DatasetId, Iri, Term, Triple};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RedirectClosure {
    pub resolved: BTreeMap<EntityId, EntityId>,
    pub cyclic: BTreeSet<EntityId>,
}

enum Walk {
    Target(EntityId),
    Cyclic,
}

/// Collapses redirect chains to their final targets. Ids on a cycle, and
/// ids whose chain runs into one, end up in `cyclic`.
pub fn build_redirect_closure(rs: &[RedirectRecord]) -> RedirectClosure {
    let mut next: HashMap<EntityId, EntityId> = HashMap::with_capacity(rs.len());
    for r in rs {
        match next.get(&r.from) {
            Some(prev) if *prev != r.to => {
                warn!("conflicting redirects for {}: keeping {prev}, ignoring {}", r.from, r.to)
            }
            Some(_) => {}
            None => {
                next.insert(r.from, r.to);
            }
        }
    }

    let mut done: HashMap<EntityId, Walk> = HashMap::with_capacity(next.len());
    let mut on_path: HashSet<EntityId> = HashSet::new();
    let mut sources: Vec<EntityId> = next.keys().copied().collect();
    sources.sort();
    for start in sources {
        if done.contains_key(&start) {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        let outcome = loop {
            if let Some(w) = done.get(&cur) {
                break match w {
                    Walk::Target(t) => Walk::Target(*t),
                    Walk::Cyclic => Walk::Cyclic,
                };
            }
            if on_path.contains(&cur) {
                break Walk::Cyclic;
            }
            match next.get(&cur) {
                None => break Walk::Target(cur),
                Some(&to) => {
                    on_path.insert(cur);
                    path.push(cur);
                    cur = to;
                }
            }
        };
        for id in path {
            on_path.remove(&id);
            done.insert(
                id,
                match outcome {
                    Walk::Target(t) => Walk::Target(t),
                    Walk::Cyclic => Walk::Cyclic,
                },
            );
        }
    }

    let mut closure = RedirectClosure::default();
    for (id, w) in done {
        match w {
            Walk::Target(t) => {
                closure.resolved.insert(id, t);
            }
            Walk::Cyclic => {
                closure.cyclic.insert(id);
            }
        }
    }
    if !closure.cyclic.is_empty() {
        warn!("{} redirect sources are on or lead into a cycle; left unresolved", closure.cyclic.len());
    }
    closure
}

/// The rewritten form of `iri`, or `None` when nothing in it is redirected.
pub fn resolve_iri(iri: &str, c: &RedirectClosure) -> Option<Iri> {
    if c.resolved.is_empty() || !iri.starts_with(vocab::DW) {
        return None;
    }
    if let Some(id) = entity_of_iri(iri) {
        return c.resolved.get(&id).map(|t| entity_iri(*t));
    }
    let mut st = StatementIri::parse(iri)?;
    let mut changed = false;
    if let Some(t) = c.resolved.get(&st.subject) {
        st.subject = *t;
        changed = true;
    }
    if let Discriminator::ItemPart(v) = st.discriminator {
        if let Some(t) = c.resolved.get(&v) {
            st.discriminator = Discriminator::ItemPart(*t);
            changed = true;
        }
    }
    changed.then(|| st.to_iri())
}

fn resolve_parts(subject: &Iri, object: &Term, c: &RedirectClosure) -> Option<(Iri, Term)> {
    let s = resolve_iri(subject.as_str(), c);
    let o = object.as_iri().and_then(|o| resolve_iri(o.as_str(), c));
    if s.is_none() && o.is_none() {
        return None;
    }
    Some((
        s.unwrap_or_else(|| subject.clone()),
        o.map(Term::Iri).unwrap_or_else(|| object.clone()),
    ))
}

/// Rewritten triple, or `None` when it is unaffected. Predicates are
/// never rewritten.
pub fn resolve_triple(t: &Triple, c: &RedirectClosure) -> Option<Triple> {
    let (subject, object) = resolve_parts(&t.subject, &t.object, c)?;
    Some(Triple {
        subject,
        predicate: t.predicate.clone(),
        object,
        dataset: t.dataset,
    })
}

/// Applies the closure to a triple stream; returns the output and the
/// number of rewritten triples.
pub fn resolve_triples(ts: impl IntoIterator<Item = Triple>, c: &RedirectClosure) -> (Vec<Triple>, u64) {
    let mut rewritten = 0;
    let out = ts
        .into_iter()
        .map(|t| match resolve_triple(&t, c) {
            Some(r) => {
                rewritten += 1;
                r
            }
            None => t,
        })
        .collect();
    (out, rewritten)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeIndex {
    pub direct_types: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl TypeIndex {
    pub fn insert(&mut self, subject: Iri, class: Iri) {
        self.direct_types.entry(subject).or_default().insert(class);
    }

    /// Indexes the `rdf:type` triples with IRI objects.
    pub fn from_triples<'a>(ts: impl IntoIterator<Item = &'a Triple>) -> TypeIndex {
        let mut idx = TypeIndex::default();
        for t in ts {
            if t.predicate.as_str() == vocab::RDF_TYPE {
                if let Some(class) = t.object.as_iri() {
                    idx.insert(t.subject.clone(), class.clone());
                }
            }
        }
        idx
    }

    pub fn types_of(&self, subject: &Iri) -> Option<&BTreeSet<Iri>> {
        self.direct_types.get(subject)
    }
}

pub fn infer_transitive_types(idx: &TypeIndex, o: &Ontology) -> Vec<Triple> {
    let mut out = Vec::new();
    for (subject, direct) in &idx.direct_types {
        let inferred: BTreeSet<&Iri> = direct
            .iter()
            .flat_map(|c| o.superclasses_of(c))
            .filter(|sc| !direct.contains(*sc))
            .collect();
        for sc in inferred {
            out.push(Triple::new(
                subject.clone(),
                vocab::RDF_TYPE,
                Term::Iri(sc.clone()),
                DatasetId::MappedTransitiveTypes,
            ));
        }
    }
    out
}

/// True when the object has a direct type disjoint with the predicate's
/// object range.
pub fn violates_range(predicate: &Iri, object: &Term, idx: &TypeIndex, o: &Ontology) -> bool {
    let RangeSpec::ObjectRange(range) = o.range_of(predicate) else {
        return false;
    };
    let Some(obj) = object.as_iri() else {
        return false;
    };
    idx.types_of(obj)
        .is_some_and(|types| types.iter().any(|t| o.are_disjoint(t, range)))
}

pub fn validate_disjointness(
    facts: impl IntoIterator<Item = Triple>,
    idx: &TypeIndex,
    o: &Ontology,
) -> (Vec<Triple>, Vec<Triple>) {
    let (rejected, accepted): (Vec<Triple>, Vec<Triple>) = facts
        .into_iter()
        .partition(|t| violates_range(&t.predicate, &t.object, idx, o));
    let rejected = rejected
        .into_iter()
        .map(|t| Triple {
            dataset: DatasetId::OntologyErrors,
            ..t
        })
        .collect();
    (accepted, rejected)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PostprocessReport {
    pub redirect_rewrites: u64,
    pub cyclic_redirects: u64,
    pub transitive_types: u64,
    pub ontology_errors: u64,
}

fn read_redirects(dir: &Path, catalog: &DatasetCatalog) -> Result<Vec<RedirectRecord>, SinkError> {
    let mut out = Vec::new();
    for_each_triple(&catalog.path(dir, DatasetId::Redirects), |t| {
        let from = entity_of_iri(t.subject.as_str());
        let to = t.object.as_iri().and_then(|o| entity_of_iri(o.as_str()));
        match (from, to) {
            (Some(from), Some(to)) if from != to => out.push(RedirectRecord { from, to }),
            _ => warn!("ignoring unusable redirect triple {t:?}"),
        }
    })?;
    Ok(out)
}

fn line_of(t: &NtTriple) -> String {
    t.to_line().expect("re-serializing a parsed triple")
}

fn resolve_datasets(dir: &Path, catalog: &mut DatasetCatalog, c: &RedirectClosure) -> Result<u64, SinkError> {
    let mut rewrites = 0;
    if c.resolved.is_empty() {
        return Ok(0);
    }
    for &d in DatasetId::ALL {
        rewrite_dataset(dir, catalog, d, |mut t, line| {
            let changed = if d == DatasetId::Redirects {
                let target = entity_of_iri(t.subject.as_str())
                    .and_then(|s| c.resolved.get(&s))
                    .map(|to| Term::Iri(entity_iri(*to)));
                match target {
                    Some(to) if to != t.object => {
                        t.object = to;
                        true
                    }
                    _ => false,
                }
            } else if let Some((s, o)) = resolve_parts(&t.subject, &t.object, c) {
                t.subject = s;
                t.object = o;
                true
            } else {
                false
            };
            if changed {
                rewrites += 1;
                Some(line_of(&t))
            } else {
                Some(format!("{line}\n"))
            }
        })?;
    }
    Ok(rewrites)
}

fn load_type_index(dir: &Path, catalog: &DatasetCatalog) -> Result<TypeIndex, SinkError> {
    let mut idx = TypeIndex::default();
    for_each_triple(&catalog.path(dir, DatasetId::MappedTypes), |t| {
        if t.predicate.as_str() == vocab::RDF_TYPE {
            if let Term::Iri(class) = t.object {
                idx.insert(t.subject, class);
            }
        }
    })?;
    Ok(idx)
}

#[derive(Default)]
struct PartialNode {
    subject: Option<Iri>,
    predicate: Option<Iri>,
    object: Option<Term>,
}

fn validate_datasets(
    dir: &Path,
    catalog: &mut DatasetCatalog,
    idx: &TypeIndex,
    o: &Ontology,
) -> Result<u64, SinkError> {
    let mut rejected: Vec<NtTriple> = Vec::new();
    let mut rejected_set: HashSet<NtTriple> = HashSet::new();
    for &d in DatasetId::ALL.iter().filter(|d| d.is_mapped_simple()) {
        rewrite_dataset(dir, catalog, d, |t, line| {
            if violates_range(&t.predicate, &t.object, idx, o) {
                if rejected_set.insert(t.clone()) {
                    rejected.push(t);
                }
                None
            } else {
                Some(format!("{line}\n"))
            }
        })?;
    }
    if rejected.is_empty() {
        return Ok(0);
    }

    // Reified nodes describing a rejected fact go with it, and so do the
    // qualifiers attached to those nodes.
    let mut partial: HashMap<Iri, PartialNode> = HashMap::new();
    let mut dropped_nodes: HashSet<Iri> = HashSet::new();
    for_each_triple(&catalog.path(dir, DatasetId::MappedFactsReified), |t| {
        let node = partial.entry(t.subject.clone()).or_default();
        match t.predicate.as_str() {
            vocab::RDF_SUBJECT => node.subject = t.object.as_iri().cloned(),
            vocab::RDF_PREDICATE => node.predicate = t.object.as_iri().cloned(),
            vocab::RDF_OBJECT => node.object = Some(t.object),
            _ => return,
        }
        if let PartialNode {
            subject: Some(_),
            predicate: Some(_),
            object: Some(_),
        } = node
        {
            let n = partial.remove(&t.subject).expect("present");
            let fact = NtTriple {
                subject: n.subject.expect("set"),
                predicate: n.predicate.expect("set"),
                object: n.object.expect("set"),
            };
            if rejected_set.contains(&fact) {
                dropped_nodes.insert(t.subject);
            }
        }
    })?;
    if !dropped_nodes.is_empty() {
        for d in [DatasetId::MappedFactsReified, DatasetId::MappedQualifiers] {
            rewrite_dataset(dir, catalog, d, |t, line| {
                (!dropped_nodes.contains(&t.subject)).then(|| format!("{line}\n"))
            })?;
        }
    }

    let mut errors: Vec<Triple> = Vec::new();
    let mut seen: HashSet<NtTriple> = HashSet::new();
    for_each_triple(&catalog.path(dir, DatasetId::OntologyErrors), |t| {
        if seen.insert(t.clone()) {
            errors.push(t.into_triple(DatasetId::OntologyErrors));
        }
    })?;
    let new = rejected.len() as u64;
    for t in rejected {
        if seen.insert(t.clone()) {
            errors.push(t.into_triple(DatasetId::OntologyErrors));
        }
    }
    replace_dataset(dir, catalog, DatasetId::OntologyErrors, &errors)?;
    Ok(new)
}

/// Runs redirect resolution, transitive typing and disjointness
/// validation over the datasets in `dir`, updating `catalog`.
pub fn run_postprocess(dir: &Path, catalog: &mut DatasetCatalog, o: &Ontology) -> Result<PostprocessReport, SinkError> {
    let redirects = read_redirects(dir, catalog)?;
    let closure = build_redirect_closure(&redirects);
    let redirect_rewrites = resolve_datasets(dir, catalog, &closure)?;
    info!(
        "redirects: {} resolved, {} cyclic, {redirect_rewrites} triples rewritten",
        closure.resolved.len(),
        closure.cyclic.len()
    );

    let idx = load_type_index(dir, catalog)?;
    let transitive = infer_transitive_types(&idx, o);
    replace_dataset(dir, catalog, DatasetId::MappedTransitiveTypes, &transitive)?;
    info!("transitive types: {}", transitive.len());

    let ontology_errors = validate_datasets(dir, catalog, &idx, o)?;
    info!("ontology errors: {ontology_errors} facts rejected");

    Ok(PostprocessReport {
        redirect_rewrites,
        cyclic_redirects: closure.cyclic.len() as u64,
        transitive_types: transitive.len() as u64,
        ontology_errors,
    })
}
