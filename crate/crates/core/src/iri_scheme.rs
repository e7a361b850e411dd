//! IRI minting for entities and reified statements.
//!
//! Entities live under `http://wikidata.dbpedia.org/resource/`. A reified
//! statement is named `<subject>_<property>_<value>` where the value part is
//! the item id for item values and a 5-character SHA-256 prefix of the
//! literal's lexical form otherwise. Language-tagged literals hash
//! `text@lang` so the same text in two languages names two statements.

use std::borrow::Cow;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dump_reader::{EntityId, SnakValue};
use crate::rdf::{vocab, Iri, Term};
use crate::values::value_term;

pub const STATEMENT_HASH_LEN: usize = 5;

pub fn entity_iri(id: EntityId) -> Iri {
    Iri::new(format!("{}{id}", vocab::DW))
}

/// Entity id of a dw-namespace IRI, if it names one.
pub fn entity_of_iri(iri: &str) -> Option<EntityId> {
    iri.strip_prefix(vocab::DW)?.parse().ok()
}

/// First `n` lowercase hex characters of SHA-256 over the UTF-8 bytes.
pub fn literal_hash(lexical: &str, n: usize) -> String {
    assert!((1..=64).contains(&n), "hash length must be within 1..=64");
    let digest = Sha256::digest(lexical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest.iter() {
        out.push_str(&format!("{byte:02x}"));
    }
    out.truncate(n);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Discriminator {
    ItemPart(EntityId),
    LiteralHash(String),
}

/// Parsed form of a reified-statement IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatementIri {
    pub subject: EntityId,
    pub property: EntityId,
    pub discriminator: Discriminator,
    /// Set for nodes minted per binding of a multi-binding mapping rule.
    pub binding: Option<usize>,
}

impl StatementIri {
    pub fn to_iri(&self) -> Iri {
        Iri::new(format!("{}{self}", vocab::DW))
    }

    pub fn parse(iri: &str) -> Option<StatementIri> {
        let local = iri.strip_prefix(vocab::DW)?;
        let mut parts = local.split('_');
        let subject: EntityId = parts.next()?.parse().ok()?;
        let property: EntityId = parts.next()?.parse().ok()?;
        if !property.is_property() {
            return None;
        }
        let value = parts.next()?;
        let discriminator = match value.parse::<EntityId>() {
            Ok(id) => Discriminator::ItemPart(id),
            Err(_)
                if value.len() == STATEMENT_HASH_LEN
                    && value.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) =>
            {
                Discriminator::LiteralHash(value.to_owned())
            }
            Err(_) => return None,
        };
        let binding = match parts.next() {
            Some(b) => Some(b.parse().ok()?),
            None => None,
        };
        if parts.next().is_some() {
            return None;
        }
        Some(StatementIri {
            subject,
            property,
            discriminator,
            binding,
        })
    }

    pub fn with_binding(mut self, binding: usize) -> Self {
        self.binding = Some(binding);
        self
    }
}

impl fmt::Display for StatementIri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_", self.subject, self.property)?;
        match &self.discriminator {
            Discriminator::ItemPart(id) => write!(f, "{id}")?,
            Discriminator::LiteralHash(h) => f.write_str(h)?,
        }
        if let Some(b) = self.binding {
            write!(f, "_{b}")?;
        }
        Ok(())
    }
}

/// The string a literal statement value is hashed from.
pub fn hash_input(term: &Term) -> Cow<'_, str> {
    match term {
        Term::LangLiteral { lexical, lang } => Cow::Owned(format!("{lexical}@{lang}")),
        other => Cow::Borrowed(other.lexical()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("value has no lexical form to name a statement after")]
pub struct UnhashableValue;

pub fn statement_id(
    subject: EntityId,
    property: EntityId,
    value: &SnakValue,
) -> Result<StatementIri, UnhashableValue> {
    let discriminator = match value {
        SnakValue::ItemValue(id) => Discriminator::ItemPart(*id),
        other => {
            let term = value_term(other).ok_or(UnhashableValue)?;
            Discriminator::LiteralHash(literal_hash(&hash_input(&term), STATEMENT_HASH_LEN))
        }
    };
    Ok(StatementIri {
        subject,
        property,
        discriminator,
        binding: None,
    })
}

pub fn statement_iri(subject: EntityId, property: EntityId, value: &SnakValue) -> Result<Iri, UnhashableValue> {
    statement_id(subject, property, value).map(|s| s.to_iri())
}
