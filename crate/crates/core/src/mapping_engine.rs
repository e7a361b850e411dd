//! Value-transformation mappings from Wikidata properties to DBpedia terms.
//!
//! The configuration is a JSON object keyed by property id. Each value is an
//! object, or a list of objects, of `predicate: template` pairs:
//!
//! ```json
//! { "P625": [{"rdf:type": "geo:SpatialThing"}, {"geo:lat": "$getLatitude"}],
//!   "P1566": {"owl:sameAs": "http://sws.geonames.org/$1/"} }
//! ```
//!
//! A template holds at most one `$` placeholder; without one it is constant.

use std::collections::HashMap;

use serde_json::Value;
use thiserror::Error;

use crate::dump_reader::{EntityId, Rank, SnakValue, Statement};
use crate::ontology::{resolve_term, EquivalenceMap, Ontology, RangeSpec};
use crate::rdf::{expand_curie, has_http_scheme, vocab, Iri, Term};
use crate::values::{encode_title, raw_lexical, value_term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    /// `$1`
    Raw,
    /// `$2`
    WikiTitle,
    GetDBpediaClass,
    GetLatitude,
    GetLongitude,
    GetGeoRss,
}

impl Function {
    fn from_name(name: &str) -> Option<Function> {
        Some(match name {
            "1" => Function::Raw,
            "2" => Function::WikiTitle,
            "getDBpediaClass" => Function::GetDBpediaClass,
            "getLatitude" => Function::GetLatitude,
            "getLongitude" => Function::GetLongitude,
            "getGeoRss" => Function::GetGeoRss,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    Constant(String),
    Placeholder {
        function: Function,
        prefix: String,
        suffix: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub predicate: Iri,
    pub object: Template,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub wikidata_property: EntityId,
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingTable {
    rules: HashMap<EntityId, MappingRule>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("mapping config parse error: {0}")]
    Parse(String),
    #[error("{property}: unknown function ${name}")]
    UnknownFunction { property: String, name: String },
}

impl MappingTable {
    pub fn get(&self, p: EntityId) -> Option<&MappingRule> {
        self.rules.get(&p)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn insert(&mut self, rule: MappingRule) {
        self.rules.insert(rule.wikidata_property, rule);
    }

    /// Whether statements of `p` are mapped, by a rule or by a schema
    /// equivalence alone.
    pub fn covers(&self, p: EntityId, em: &EquivalenceMap) -> bool {
        self.rules.contains_key(&p) || em.equivalent_property_for(p).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateError {
    MultiplePlaceholders,
    UnknownFunction(String),
}

pub fn parse_template(text: &str) -> Result<Template, TemplateError> {
    let mut found: Option<(usize, usize)> = None;
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'$' {
            let start = i;
            let mut end = i + 1;
            while end < bytes.len() && bytes[end].is_ascii_alphanumeric() {
                end += 1;
            }
            if end > start + 1 {
                if found.is_some() {
                    return Err(TemplateError::MultiplePlaceholders);
                }
                found = Some((start, end));
            }
            i = end;
        } else {
            i += 1;
        }
    }
    match found {
        None => Ok(Template::Constant(text.to_owned())),
        Some((start, end)) => {
            let name = &text[start + 1..end];
            let function =
                Function::from_name(name).ok_or_else(|| TemplateError::UnknownFunction(name.to_owned()))?;
            Ok(Template::Placeholder {
                function,
                prefix: text[..start].to_owned(),
                suffix: text[end..].to_owned(),
            })
        }
    }
}

pub fn parse_mapping_config(text: &str) -> Result<MappingTable, MappingError> {
    let root: Value = serde_json::from_str(text).map_err(|e| MappingError::Parse(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| MappingError::Parse("top level must be an object".into()))?;
    let mut table = MappingTable::default();
    for (key, spec) in obj {
        let property: EntityId = key
            .parse()
            .ok()
            .filter(EntityId::is_property)
            .ok_or_else(|| MappingError::Parse(format!("key {key:?} is not a property id")))?;
        let groups: Vec<&Value> = match spec {
            Value::Array(items) => items.iter().collect(),
            Value::Object(_) => vec![spec],
            _ => return Err(MappingError::Parse(format!("{key}: expected object or list of objects"))),
        };
        let mut bindings = Vec::new();
        for group in groups {
            let group = group
                .as_object()
                .ok_or_else(|| MappingError::Parse(format!("{key}: list entries must be objects")))?;
            for (pred, tpl) in group {
                if pred.contains('$') {
                    return Err(MappingError::Parse(format!("{key}: predicate {pred:?} must be constant")));
                }
                let predicate = resolve_term(pred).map_err(|e| MappingError::Parse(format!("{key}: {e}")))?;
                let tpl = tpl
                    .as_str()
                    .filter(|t| !t.is_empty())
                    .ok_or_else(|| MappingError::Parse(format!("{key}: template for {pred} must be a non-empty string")))?;
                let object = parse_template(tpl).map_err(|e| match e {
                    TemplateError::MultiplePlaceholders => {
                        MappingError::Parse(format!("{key}: template {tpl:?} has more than one placeholder"))
                    }
                    TemplateError::UnknownFunction(name) => MappingError::UnknownFunction {
                        property: key.clone(),
                        name,
                    },
                })?;
                bindings.push(Binding { predicate, object });
            }
        }
        table.insert(MappingRule {
            wikidata_property: property,
            bindings,
        });
    }
    Ok(table)
}

fn constant_term(text: &str) -> Term {
    if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Term::iri(inner);
    }
    if has_http_scheme(text) {
        return Term::iri(text);
    }
    match expand_curie(text) {
        Some(iri) => Term::iri(iri),
        None => Term::string(text),
    }
}

fn coordinate(v: &SnakValue) -> Option<(f64, f64)> {
    match v {
        SnakValue::GlobeCoordinate { lat, lon, .. } => Some((*lat, *lon)),
        _ => None,
    }
}

fn natural_term(function: Function, v: &SnakValue, em: &EquivalenceMap) -> Option<Term> {
    match function {
        Function::Raw => value_term(v),
        Function::WikiTitle => match v {
            SnakValue::StringValue(s) | SnakValue::Url(s) => Some(Term::string(encode_title(s))),
            _ => None,
        },
        Function::GetDBpediaClass => match v {
            SnakValue::ItemValue(id) => em.equivalent_class_for(*id).cloned().map(Term::Iri),
            _ => None,
        },
        Function::GetLatitude => coordinate(v).map(|(lat, _)| Term::typed(lat.to_string(), vocab::XSD_FLOAT)),
        Function::GetLongitude => coordinate(v).map(|(_, lon)| Term::typed(lon.to_string(), vocab::XSD_FLOAT)),
        Function::GetGeoRss => coordinate(v).map(|(lat, lon)| Term::string(format!("{lat} {lon}"))),
    }
}

/// Evaluates one object template against a value. `None` when the function
/// does not apply to the value's kind (or the class is unmapped).
pub fn eval_template(t: &Template, v: &SnakValue, em: &EquivalenceMap) -> Option<Term> {
    match t {
        Template::Constant(text) => Some(constant_term(text)),
        Template::Placeholder {
            function,
            prefix,
            suffix,
        } => {
            if v.is_skip_marker() {
                return None;
            }
            if prefix.is_empty() && suffix.is_empty() {
                return natural_term(*function, v, em);
            }
            let lexical = match function {
                Function::Raw => raw_lexical(v)?,
                Function::WikiTitle => match v {
                    SnakValue::StringValue(s) | SnakValue::Url(s) => encode_title(s),
                    _ => return None,
                },
                other => natural_term(*other, v, em)?.lexical().to_owned(),
            };
            let spliced = format!("{prefix}{lexical}{suffix}");
            if has_http_scheme(prefix) {
                Some(Term::iri(spliced))
            } else {
                Some(Term::string(spliced))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// Literal object for an object-ranged property, or the reverse.
    RangeKindMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedTriple {
    /// Position of the producing binding within its rule.
    pub binding: usize,
    pub predicate: Iri,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MappedEmission {
    pub triples: Vec<MappedTriple>,
    pub rejected: Vec<(MappedTriple, RejectReason)>,
    /// Number of bindings in the applied rule (0 when nothing applied).
    pub bindings: usize,
    /// Bindings whose template did not apply to the value.
    pub unevaluated: usize,
}

impl MappedEmission {
    pub fn is_empty(&self) -> bool {
        self.triples.is_empty() && self.rejected.is_empty()
    }
}

fn range_compatible(range: &RangeSpec, object: &Term) -> bool {
    match range {
        RangeSpec::Unconstrained => true,
        RangeSpec::ObjectRange(_) => object.is_iri(),
        RangeSpec::LiteralRange(_) => !object.is_iri(),
    }
}

fn map_snak(
    property: EntityId,
    value: &SnakValue,
    rules: &MappingTable,
    em: &EquivalenceMap,
    onto: &Ontology,
) -> MappedEmission {
    let mut out = MappedEmission::default();
    if value.is_skip_marker() {
        return out;
    }
    let default_binding;
    let bindings: &[Binding] = match rules.get(property) {
        Some(rule) => &rule.bindings,
        None => match em.equivalent_property_for(property) {
            Some(predicate) => {
                default_binding = [Binding {
                    predicate: predicate.clone(),
                    object: Template::Placeholder {
                        function: Function::Raw,
                        prefix: String::new(),
                        suffix: String::new(),
                    },
                }];
                &default_binding
            }
            None => return out,
        },
    };
    out.bindings = bindings.len();
    for (idx, binding) in bindings.iter().enumerate() {
        let Some(object) = eval_template(&binding.object, value, em) else {
            out.unevaluated += 1;
            continue;
        };
        let triple = MappedTriple {
            binding: idx,
            predicate: binding.predicate.clone(),
            object,
        };
        if range_compatible(onto.range_of(&triple.predicate), &triple.object) {
            out.triples.push(triple);
        } else {
            out.rejected.push((triple, RejectReason::RangeKindMismatch));
        }
    }
    out
}

/// Applies the rule for `s.property` to the statement's main value.
/// Deprecated statements and unknown/some/no values emit nothing.
pub fn map_statement(
    s: &Statement,
    rules: &MappingTable,
    em: &EquivalenceMap,
    onto: &Ontology,
) -> MappedEmission {
    if s.rank == Rank::Deprecated {
        return MappedEmission::default();
    }
    map_snak(s.property, &s.value, rules, em, onto)
}

/// Same evaluation as [`map_statement`] for a qualifier pair; the caller
/// attaches the result to the reified statement.
pub fn map_qualifier(
    property: EntityId,
    value: &SnakValue,
    rules: &MappingTable,
    em: &EquivalenceMap,
    onto: &Ontology,
) -> MappedEmission {
    map_snak(property, value, rules, em, onto)
}
