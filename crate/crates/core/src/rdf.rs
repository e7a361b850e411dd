//! RDF terms, triples and the dataset taxonomy shared by every stage.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const DBO: &str = "http://dbpedia.org/ontology/";
    pub const DW: &str = "http://wikidata.dbpedia.org/resource/";
    pub const WKDT: &str = "http://www.wikidata.org/entity/";
    pub const GEO: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#";
    pub const GEORSS: &str = "http://www.georss.org/georss/";
    pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_STATEMENT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement";
    pub const RDF_SUBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#subject";
    pub const RDF_PREDICATE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#predicate";
    pub const RDF_OBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#object";
    pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
    pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";

    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
    pub const XSD_GYEAR: &str = "http://www.w3.org/2001/XMLSchema#gYear";
    pub const XSD_GYEAR_MONTH: &str = "http://www.w3.org/2001/XMLSchema#gYearMonth";

    pub const DBO_ALIAS: &str = "http://dbpedia.org/ontology/alias";
    pub const DBO_DESCRIPTION: &str = "http://dbpedia.org/ontology/description";
    pub const DBO_WIKI_PAGE_ID: &str = "http://dbpedia.org/ontology/wikiPageID";
    pub const DBO_WIKI_PAGE_REVISION_ID: &str = "http://dbpedia.org/ontology/wikiPageRevisionID";
    pub const DBO_WIKI_PAGE_REDIRECTS: &str = "http://dbpedia.org/ontology/wikiPageRedirects";
    pub const DBO_REFERENCE: &str = "http://dbpedia.org/ontology/reference";
    pub const DBO_THUMBNAIL: &str = "http://dbpedia.org/ontology/thumbnail";

    pub const GEO_LAT: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#lat";
    pub const GEO_LONG: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#long";
    pub const GEO_SPATIAL_THING: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#SpatialThing";
    pub const GEORSS_POINT: &str = "http://www.georss.org/georss/point";
    pub const FOAF_DEPICTION: &str = "http://xmlns.com/foaf/0.1/depiction";

    pub const COMMONS_FILE_PATH: &str = "http://commons.wikimedia.org/wiki/Special:FilePath/";
}

/// Built-in prefix table used by mapping configs and ontology files.
const PREFIXES: &[(&str, &str)] = &[
    ("rdf", vocab::RDF),
    ("rdfs", vocab::RDFS),
    ("owl", vocab::OWL),
    ("xsd", vocab::XSD),
    ("dbo", vocab::DBO),
    ("dw", vocab::DW),
    ("wkdt", vocab::WKDT),
    ("wd", vocab::WKDT),
    ("geo", vocab::GEO),
    ("georss", vocab::GEORSS),
    ("foaf", vocab::FOAF),
    ("db", "http://dbpedia.org/resource/"),
    ("skos", "http://www.w3.org/2004/02/skos/core#"),
    ("dct", "http://purl.org/dc/terms/"),
    ("dc", "http://purl.org/dc/elements/1.1/"),
    ("schema", "http://schema.org/"),
];

pub fn prefix_namespace(prefix: &str) -> Option<&'static str> {
    PREFIXES
        .iter()
        .find(|(p, _)| *p == prefix)
        .map(|(_, ns)| *ns)
}

/// Expands `prefix:local` against the built-in table. Returns `None` when the
/// prefix is unknown or the token has no colon.
pub fn expand_curie(token: &str) -> Option<String> {
    let (prefix, local) = token.split_once(':')?;
    if local.starts_with("//") {
        return None;
    }
    prefix_namespace(prefix).map(|ns| format!("{ns}{local}"))
}

pub fn has_http_scheme(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://")
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(s: impl Into<String>) -> Self {
        Iri(Arc::from(s.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0.to_string()
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Iri {
    fn from(s: &str) -> Self {
        Iri(Arc::from(s))
    }
}

impl PartialEq<str> for Iri {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for Iri {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal { lexical: String, datatype: Iri },
    LangLiteral { lexical: String, lang: String },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(Iri::new(s))
    }

    pub fn typed(lexical: impl Into<String>, datatype: &str) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: Iri::from(datatype),
        }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Term::typed(lexical, vocab::XSD_STRING)
    }

    pub fn lang(lexical: impl Into<String>, lang: &str) -> Self {
        Term::LangLiteral {
            lexical: lexical.into(),
            lang: lang.to_ascii_lowercase(),
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    /// The IRI string or the literal's lexical form.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(iri) => iri.as_str(),
            Term::Literal { lexical, .. } | Term::LangLiteral { lexical, .. } => lexical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
    pub dataset: DatasetId,
}

impl Triple {
    pub fn new(subject: Iri, predicate: impl Into<Iri>, object: Term, dataset: DatasetId) -> Self {
        Triple {
            subject,
            predicate: predicate.into(),
            object,
            dataset,
        }
    }
}

macro_rules! datasets {
    ($($variant:ident => $file:literal, $title:literal;)*) => {
        /// One output dataset. Aggregate rows of the published dataset table
        /// ("Mapped facts") decompose into the `Mapped*` splits.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum DatasetId {
            $($variant,)*
        }

        impl DatasetId {
            pub const ALL: &'static [DatasetId] = &[$(DatasetId::$variant,)*];

            /// File stem, without the `.nt` / `.nt.gz` extension.
            pub fn file_stem(self) -> &'static str {
                match self {
                    $(DatasetId::$variant => $file,)*
                }
            }

            pub fn title(self) -> &'static str {
                match self {
                    $(DatasetId::$variant => $title,)*
                }
            }

            pub fn from_file_stem(stem: &str) -> Option<DatasetId> {
                match stem {
                    $($file => Some(DatasetId::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

datasets! {
    Provenance => "provenance", "Provenance";
    Redirects => "redirects", "Redirects";
    Aliases => "aliases", "Aliases";
    Labels => "labels", "Labels";
    Descriptions => "descriptions", "Descriptions";
    Sitelinks => "sitelinks", "Sitelinks";
    WikidataLinks => "wikidata-links", "Wikidata links";
    MappedTypes => "mapped-types", "Mapped facts - Types";
    MappedTransitiveTypes => "mapped-transitive-types", "Mapped facts - Transitive Types";
    MappedCoordinates => "mapped-coordinates", "Mapped facts - Coordinates";
    MappedImages => "mapped-images", "Mapped facts - Images";
    MappedFacts => "mapped-facts", "Mapped facts - mappings";
    MappedExternalSameAs => "mapped-external-links", "Mapped facts - External links";
    MappedFactsReified => "mapped-facts-reified", "Mapped facts (R)";
    MappedQualifiers => "mapped-qualifiers", "Mapped facts (RQ)";
    RawFacts => "raw-facts", "Raw facts";
    RawFactsReified => "raw-facts-reified", "Raw facts (R)";
    RawQualifiers => "raw-qualifiers", "Raw facts (RQ)";
    References => "references", "References";
    MappingErrors => "mapping-errors", "Mapping Errors";
    OntologyErrors => "ontology-errors", "Ontology Errors";
}

impl DatasetId {
    pub fn index(self) -> usize {
        DatasetId::ALL.iter().position(|d| *d == self).unwrap()
    }

    pub fn file_name(self, compressed: bool) -> String {
        if compressed {
            format!("{}.nt.gz", self.file_stem())
        } else {
            format!("{}.nt", self.file_stem())
        }
    }

    /// Simple (non-reified) mapped datasets.
    pub fn is_mapped_simple(self) -> bool {
        matches!(
            self,
            DatasetId::MappedTypes
                | DatasetId::MappedCoordinates
                | DatasetId::MappedImages
                | DatasetId::MappedFacts
                | DatasetId::MappedExternalSameAs
        )
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_stem())
    }
}
