//! Datatype-driven conversion of Wikidata values into RDF terms.

use crate::dump_reader::SnakValue;
use crate::iri_scheme::entity_iri;
use crate::rdf::{vocab, Term};

/// Natural RDF term for a value: items become dw IRIs, times follow the
/// precision rule, coordinates become a `"lat lon"` point literal,
/// quantities a decimal literal. `None` for skip markers and times coarser
/// than a year.
pub fn value_term(v: &SnakValue) -> Option<Term> {
    match v {
        SnakValue::ItemValue(id) => Some(Term::Iri(entity_iri(*id))),
        SnakValue::StringValue(s) => Some(Term::string(s.clone())),
        SnakValue::Url(s) => Some(Term::iri(s.clone())),
        SnakValue::TimeValue { time, precision, .. } => time_literal(time, *precision),
        SnakValue::GlobeCoordinate { lat, lon, .. } => Some(Term::string(format!("{lat} {lon}"))),
        SnakValue::Quantity { amount, .. } => {
            let amount = amount.strip_prefix('+').unwrap_or(amount);
            Some(Term::typed(amount, vocab::XSD_DECIMAL))
        }
        SnakValue::MonolingualText { text, language } => Some(Term::lang(text.clone(), language)),
        SnakValue::SomeValue | SnakValue::NoValue | SnakValue::Unsupported(_) => None,
    }
}

/// The value as text for splicing into a `$1` template: the entity id for
/// items, the converted lexical form otherwise.
pub fn raw_lexical(v: &SnakValue) -> Option<String> {
    match v {
        SnakValue::ItemValue(id) => Some(id.to_string()),
        other => value_term(other).map(|t| t.lexical().to_owned()),
    }
}

/// Day precision and finer → `xsd:date`, month → `xsd:gYearMonth`,
/// year → `xsd:gYear`. Components are printed without zero padding.
pub fn time_literal(time: &str, precision: u8) -> Option<Term> {
    let (year, month, day) = split_time(time)?;
    match precision {
        11..=14 => Some(Term::typed(format!("{year}-{month}-{day}"), vocab::XSD_DATE)),
        10 => Some(Term::typed(format!("{year}-{month}"), vocab::XSD_GYEAR_MONTH)),
        9 => Some(Term::typed(year, vocab::XSD_GYEAR)),
        _ => None,
    }
}

fn split_time(time: &str) -> Option<(String, u32, u32)> {
    let date = time.split('T').next()?;
    let (negative, date) = match date.as_bytes().first()? {
        b'+' => (false, &date[1..]),
        b'-' => (true, &date[1..]),
        _ => (false, date),
    };
    let mut parts = date.split('-');
    let year: u64 = parts.next()?.parse().ok()?;
    let month: u32 = parts.next()?.parse().ok()?;
    let day: u32 = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    let year = if negative && year != 0 {
        format!("-{year}")
    } else {
        year.to_string()
    };
    Some((year, month, day))
}

/// Page title as an IRI path segment: spaces become underscores and
/// characters that may not appear raw in an IRI are percent-encoded.
/// Non-ASCII characters are kept.
pub fn encode_title(title: &str) -> String {
    let mut out = String::with_capacity(title.len());
    for c in title.trim().chars() {
        match c {
            ' ' => out.push('_'),
            '"' | '<' | '>' | '\\' | '^' | '`' | '{' | '|' | '}' | '%' | '?' | '#' => {
                out.push_str(&format!("%{:02X}", c as u32));
            }
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                out.push_str(&format!("%{:02X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}
