//! Converts Wikidata JSON entity dumps into DBpedia-style N-Triples
//! datasets.
//!
//! The pipeline streams dump records ([`dump_reader`]), runs the per-entity
//! [`extractors`] with the declarative [`mapping_engine`] against an
//! [`ontology`], writes one N-Triples file per dataset ([`dataset_sink`])
//! and finally resolves redirects, infers transitive types and validates
//! object ranges over the written files ([`postprocess`]).

pub mod dataset_sink;
pub mod dump_reader;
pub mod extractors;
pub mod iri_scheme;
pub mod mapping_engine;
pub mod ontology;
pub mod pipeline;
pub mod postprocess;
pub mod rdf;
pub mod values;
