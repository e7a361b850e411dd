//! Streaming reader for Wikidata entity-JSON dumps.
//!
//! Two layouts are accepted: the classic array dump (`[`, one entity per
//! line followed by `,`, `]`) and plain JSON lines. The layout is chosen by
//! the first non-whitespace byte. Records are parsed into [`Record`]s; a bad
//! record is reported in place and never stops the stream.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

const READ_BUFFER: usize = 1 << 20;
const DEFAULT_CALENDAR: EntityId = EntityId {
    kind: EntityKind::Item,
    number: 1985727,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityKind {
    Item,
    Property,
}

/// `Q<number>` or `P<number>`, number ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId {
    pub kind: EntityKind,
    pub number: u64,
}

impl EntityId {
    pub fn item(number: u64) -> Self {
        assert!(number >= 1, "entity numbers start at 1");
        EntityId {
            kind: EntityKind::Item,
            number,
        }
    }

    pub fn property(number: u64) -> Self {
        assert!(number >= 1, "entity numbers start at 1");
        EntityId {
            kind: EntityKind::Property,
            number,
        }
    }

    pub fn is_property(&self) -> bool {
        self.kind == EntityKind::Property
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            EntityKind::Item => 'Q',
            EntityKind::Property => 'P',
        };
        write!(f, "{letter}{}", self.number)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid entity id {0:?}")]
pub struct InvalidEntityId(pub String);

impl FromStr for EntityId {
    type Err = InvalidEntityId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || InvalidEntityId(s.to_owned());
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('Q') => EntityKind::Item,
            Some('P') => EntityKind::Property,
            _ => return Err(err()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(err());
        }
        let number: u64 = digits.parse().map_err(|_| err())?;
        Ok(EntityId { kind, number })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rank {
    Preferred,
    Normal,
    Deprecated,
}

impl Rank {
    fn as_str(self) -> &'static str {
        match self {
            Rank::Preferred => "preferred",
            Rank::Normal => "normal",
            Rank::Deprecated => "deprecated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SnakValue {
    ItemValue(EntityId),
    StringValue(String),
    /// A string snak whose datatype is `url`.
    Url(String),
    TimeValue {
        /// Raw Wikidata time, e.g. `+1991-11-25T00:00:00Z`.
        time: String,
        precision: u8,
        calendar: EntityId,
    },
    GlobeCoordinate {
        lat: f64,
        lon: f64,
        precision: Option<f64>,
    },
    Quantity {
        amount: String,
        unit: String,
    },
    MonolingualText {
        text: String,
        language: String,
    },
    SomeValue,
    NoValue,
    /// Value of a datatype this reader does not model; downstream skips it.
    Unsupported(String),
}

impl SnakValue {
    /// Whether extractors should ignore this value.
    pub fn is_skip_marker(&self) -> bool {
        matches!(
            self,
            SnakValue::SomeValue | SnakValue::NoValue | SnakValue::Unsupported(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snak {
    pub property: EntityId,
    pub value: SnakValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub property: EntityId,
    pub value: SnakValue,
    pub qualifiers: Vec<Snak>,
    pub references: Vec<Vec<Snak>>,
    pub rank: Rank,
}

impl Statement {
    pub fn new(property: EntityId, value: SnakValue) -> Self {
        Statement {
            property,
            value,
            qualifiers: Vec::new(),
            references: Vec::new(),
            rank: Rank::Normal,
        }
    }

    pub fn with_qualifier(mut self, property: EntityId, value: SnakValue) -> Self {
        self.qualifiers.push(Snak { property, value });
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub id: EntityId,
    pub labels: BTreeMap<String, String>,
    pub descriptions: BTreeMap<String, String>,
    pub aliases: BTreeMap<String, Vec<String>>,
    pub sitelinks: BTreeMap<String, String>,
    pub statements: Vec<Statement>,
    pub page_id: Option<u64>,
    pub revision_id: Option<u64>,
}

impl Entity {
    pub fn new(id: EntityId) -> Self {
        Entity {
            id,
            labels: BTreeMap::new(),
            descriptions: BTreeMap::new(),
            aliases: BTreeMap::new(),
            sitelinks: BTreeMap::new(),
            statements: Vec::new(),
            page_id: None,
            revision_id: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RedirectRecord {
    pub from: EntityId,
    pub to: EntityId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Entity(Entity),
    Redirect(RedirectRecord),
    /// Entity types without a modelled structure (query pages, lexemes).
    Skipped { entity_type: String },
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

fn malformed(msg: impl Into<String>) -> DumpError {
    DumpError::MalformedRecord(msg.into())
}

pub fn parse_entity(record: &str) -> Result<Record, DumpError> {
    parse_entity_bytes(record.as_bytes())
}

pub fn parse_entity_bytes(record: &[u8]) -> Result<Record, DumpError> {
    let value: Value =
        serde_json::from_slice(record).map_err(|e| malformed(format!("invalid json: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("record is not a JSON object"))?;
    let id_str = obj
        .get("id")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing \"id\""))?;

    if let Some(target) = obj.get("redirect") {
        let to_str = target
            .as_str()
            .ok_or_else(|| malformed("redirect target is not a string"))?;
        let from = parse_id(id_str)?;
        let to = parse_id(to_str)?;
        if from == to {
            return Err(malformed(format!("{from} redirects to itself")));
        }
        return Ok(Record::Redirect(RedirectRecord { from, to }));
    }

    if let Some(ty) = obj.get("type").and_then(Value::as_str) {
        if ty != "item" && ty != "property" {
            return Ok(Record::Skipped {
                entity_type: ty.to_owned(),
            });
        }
    }

    let id = parse_id(id_str)?;
    let mut entity = Entity::new(id);
    entity.page_id = obj.get("pageid").and_then(Value::as_u64);
    entity.revision_id = obj.get("lastrevid").and_then(Value::as_u64);

    if let Some(labels) = obj.get("labels").and_then(Value::as_object) {
        entity.labels = language_values(labels);
    }
    if let Some(descriptions) = obj.get("descriptions").and_then(Value::as_object) {
        entity.descriptions = language_values(descriptions);
    }
    if let Some(aliases) = obj.get("aliases").and_then(Value::as_object) {
        for (lang, list) in aliases {
            let Some(lang) = language_code(lang) else {
                continue;
            };
            let values: Vec<String> = list
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|a| a.get("value").and_then(Value::as_str))
                .map(str::to_owned)
                .collect();
            if !values.is_empty() {
                entity.aliases.insert(lang, values);
            }
        }
    }
    if let Some(sitelinks) = obj.get("sitelinks").and_then(Value::as_object) {
        for (site, link) in sitelinks {
            let title = link.get("title").and_then(Value::as_str).unwrap_or("");
            if !site.is_empty() && !title.is_empty() {
                entity.sitelinks.insert(site.clone(), title.to_owned());
            }
        }
    }
    // Older dumps sometimes serialize empty claims as `[]`.
    if let Some(claims) = obj.get("claims").and_then(Value::as_object) {
        for (key, list) in claims {
            let Some(list) = list.as_array() else {
                return Err(malformed(format!("claims for {key} are not a list")));
            };
            for claim in list {
                entity.statements.push(parse_statement(key, claim)?);
            }
        }
    }
    Ok(Record::Entity(entity))
}

fn parse_id(s: &str) -> Result<EntityId, DumpError> {
    s.parse().map_err(|e: InvalidEntityId| malformed(e.to_string()))
}

fn language_code(raw: &str) -> Option<String> {
    if raw.is_empty() {
        None
    } else {
        Some(raw.to_ascii_lowercase())
    }
}

fn language_values(map: &Map<String, Value>) -> BTreeMap<String, String> {
    map.iter()
        .filter_map(|(lang, v)| {
            let lang = language_code(lang)?;
            let text = v.get("value").and_then(Value::as_str)?;
            Some((lang, text.to_owned()))
        })
        .collect()
}

fn parse_statement(claims_key: &str, claim: &Value) -> Result<Statement, DumpError> {
    let mainsnak = claim
        .get("mainsnak")
        .ok_or_else(|| malformed(format!("claim under {claims_key} has no mainsnak")))?;
    let fallback = parse_id(claims_key)?;
    let Snak { property, value } = parse_snak(mainsnak, fallback)?;
    if !property.is_property() {
        return Err(malformed(format!("statement property {property} is not a property id")));
    }
    let rank = match claim.get("rank").and_then(Value::as_str) {
        Some("preferred") => Rank::Preferred,
        Some("deprecated") => Rank::Deprecated,
        _ => Rank::Normal,
    };
    let qualifiers = match claim.get("qualifiers").and_then(Value::as_object) {
        Some(q) => parse_snak_group(q, claim.get("qualifiers-order"))?,
        None => Vec::new(),
    };
    let mut references = Vec::new();
    for reference in claim
        .get("references")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
    {
        if let Some(snaks) = reference.get("snaks").and_then(Value::as_object) {
            references.push(parse_snak_group(snaks, reference.get("snaks-order"))?);
        }
    }
    Ok(Statement {
        property,
        value,
        qualifiers,
        references,
        rank,
    })
}

/// Flattens a `{ "P580": [snak, ...], ... }` object, honouring an explicit
/// `*-order` list when present.
fn parse_snak_group(group: &Map<String, Value>, order: Option<&Value>) -> Result<Vec<Snak>, DumpError> {
    let mut keys: Vec<&str> = order
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
        .filter_map(Value::as_str)
        .filter(|k| group.contains_key(*k))
        .collect();
    for k in group.keys() {
        if !keys.contains(&k.as_str()) {
            keys.push(k);
        }
    }
    let mut out = Vec::new();
    for key in keys {
        let fallback = parse_id(key)?;
        for snak in group[key].as_array().into_iter().flatten() {
            out.push(parse_snak(snak, fallback)?);
        }
    }
    Ok(out)
}

fn parse_snak(snak: &Value, fallback: EntityId) -> Result<Snak, DumpError> {
    let property = match snak.get("property").and_then(Value::as_str) {
        Some(p) => parse_id(p)?,
        None => fallback,
    };
    let value = match snak.get("snaktype").and_then(Value::as_str) {
        Some("somevalue") => SnakValue::SomeValue,
        Some("novalue") => SnakValue::NoValue,
        _ => {
            let datatype = snak.get("datatype").and_then(Value::as_str);
            match snak.get("datavalue") {
                Some(dv) => parse_datavalue(dv, datatype),
                None => SnakValue::Unsupported(datatype.unwrap_or("").to_owned()),
            }
        }
    };
    Ok(Snak { property, value })
}

fn parse_datavalue(dv: &Value, datatype: Option<&str>) -> SnakValue {
    let ty = dv.get("type").and_then(Value::as_str).unwrap_or("");
    let value = dv.get("value");
    let unsupported = || SnakValue::Unsupported(ty.to_owned());
    let Some(value) = value else {
        return unsupported();
    };
    match ty {
        "string" => match value.as_str() {
            Some(s) if datatype == Some("url") => SnakValue::Url(s.to_owned()),
            Some(s) => SnakValue::StringValue(s.to_owned()),
            None => unsupported(),
        },
        "wikibase-entityid" => entity_value(value).map(SnakValue::ItemValue).unwrap_or_else(unsupported),
        "time" => {
            let time = value.get("time").and_then(Value::as_str);
            let precision = value.get("precision").and_then(Value::as_u64);
            match (time, precision) {
                (Some(time), Some(p)) if p <= 14 => {
                    let calendar = value
                        .get("calendarmodel")
                        .and_then(Value::as_str)
                        .and_then(|c| c.rsplit('/').next())
                        .and_then(|c| c.parse().ok())
                        .unwrap_or(DEFAULT_CALENDAR);
                    SnakValue::TimeValue {
                        time: time.to_owned(),
                        precision: p as u8,
                        calendar,
                    }
                }
                _ => unsupported(),
            }
        }
        "globecoordinate" => {
            let lat = value.get("latitude").and_then(Value::as_f64);
            let lon = value.get("longitude").and_then(Value::as_f64);
            match (lat, lon) {
                (Some(lat), Some(lon))
                    if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) =>
                {
                    SnakValue::GlobeCoordinate {
                        lat,
                        lon,
                        precision: value.get("precision").and_then(Value::as_f64),
                    }
                }
                _ => unsupported(),
            }
        }
        "quantity" => match value.get("amount").and_then(Value::as_str) {
            Some(amount) => SnakValue::Quantity {
                amount: amount.to_owned(),
                unit: value.get("unit").and_then(Value::as_str).unwrap_or("1").to_owned(),
            },
            None => unsupported(),
        },
        "monolingualtext" => {
            let text = value.get("text").and_then(Value::as_str);
            let language = value.get("language").and_then(Value::as_str);
            match (text, language) {
                (Some(text), Some(language)) if !language.is_empty() => SnakValue::MonolingualText {
                    text: text.to_owned(),
                    language: language.to_ascii_lowercase(),
                },
                _ => unsupported(),
            }
        }
        _ => unsupported(),
    }
}

fn entity_value(value: &Value) -> Option<EntityId> {
    if let Some(id) = value.get("id").and_then(Value::as_str) {
        return id.parse().ok();
    }
    let number = value.get("numeric-id").and_then(Value::as_u64).filter(|n| *n >= 1)?;
    match value.get("entity-type").and_then(Value::as_str) {
        Some("item") | None => Some(EntityId::item(number)),
        Some("property") => Some(EntityId::property(number)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Serialization back to dump JSON (fixtures, synthetic dumps).

impl Entity {
    /// Renders this entity in Wikidata dump JSON. Statements and qualifiers
    /// are grouped by property in first-appearance order.
    pub fn to_dump_json(&self) -> Value {
        let lang_map = |m: &BTreeMap<String, String>| -> Value {
            m.iter()
                .map(|(l, v)| (l.clone(), json!({"language": l, "value": v})))
                .collect::<Map<_, _>>()
                .into()
        };
        let aliases: Map<String, Value> = self
            .aliases
            .iter()
            .map(|(l, vs)| {
                let list: Vec<Value> = vs.iter().map(|v| json!({"language": l, "value": v})).collect();
                (l.clone(), Value::Array(list))
            })
            .collect();
        let sitelinks: Map<String, Value> = self
            .sitelinks
            .iter()
            .map(|(s, t)| (s.clone(), json!({"site": s, "title": t, "badges": []})))
            .collect();

        let mut claims = Map::new();
        for st in &self.statements {
            let key = st.property.to_string();
            let mut stmt = Map::new();
            stmt.insert("mainsnak".into(), snak_json(st.property, &st.value));
            stmt.insert("type".into(), "statement".into());
            if !st.qualifiers.is_empty() {
                let (group, order) = snak_group_json(&st.qualifiers);
                stmt.insert("qualifiers".into(), group);
                stmt.insert("qualifiers-order".into(), order);
            }
            stmt.insert("rank".into(), st.rank.as_str().into());
            if !st.references.is_empty() {
                let refs: Vec<Value> = st
                    .references
                    .iter()
                    .map(|r| {
                        let (group, order) = snak_group_json(r);
                        json!({"snaks": group, "snaks-order": order})
                    })
                    .collect();
                stmt.insert("references".into(), Value::Array(refs));
            }
            claims
                .entry(key)
                .or_insert_with(|| Value::Array(Vec::new()))
                .as_array_mut()
                .unwrap()
                .push(Value::Object(stmt));
        }

        let mut obj = Map::new();
        obj.insert(
            "type".into(),
            if self.id.is_property() { "property" } else { "item" }.into(),
        );
        obj.insert("id".into(), self.id.to_string().into());
        if let Some(p) = self.page_id {
            obj.insert("pageid".into(), p.into());
        }
        if let Some(r) = self.revision_id {
            obj.insert("lastrevid".into(), r.into());
        }
        obj.insert("labels".into(), lang_map(&self.labels));
        obj.insert("descriptions".into(), lang_map(&self.descriptions));
        obj.insert("aliases".into(), aliases.into());
        obj.insert("claims".into(), claims.into());
        obj.insert("sitelinks".into(), sitelinks.into());
        Value::Object(obj)
    }
}

impl RedirectRecord {
    pub fn to_dump_json(&self) -> Value {
        json!({"id": self.from.to_string(), "redirect": self.to.to_string()})
    }
}

fn snak_group_json(snaks: &[Snak]) -> (Value, Value) {
    let mut group = Map::new();
    let mut order = Vec::new();
    for s in snaks {
        let key = s.property.to_string();
        if !group.contains_key(&key) {
            order.push(Value::String(key.clone()));
        }
        group
            .entry(key)
            .or_insert_with(|| Value::Array(Vec::new()))
            .as_array_mut()
            .unwrap()
            .push(snak_json(s.property, &s.value));
    }
    (Value::Object(group), Value::Array(order))
}

fn snak_json(property: EntityId, value: &SnakValue) -> Value {
    let p = property.to_string();
    let (datatype, datavalue) = match value {
        SnakValue::SomeValue => return json!({"snaktype": "somevalue", "property": p}),
        SnakValue::NoValue => return json!({"snaktype": "novalue", "property": p}),
        SnakValue::ItemValue(id) => {
            let (dt, et) = if id.is_property() {
                ("wikibase-property", "property")
            } else {
                ("wikibase-item", "item")
            };
            (
                dt.to_owned(),
                json!({"type": "wikibase-entityid", "value": {"entity-type": et, "numeric-id": id.number, "id": id.to_string()}}),
            )
        }
        SnakValue::StringValue(s) => ("string".to_owned(), json!({"type": "string", "value": s})),
        SnakValue::Url(s) => ("url".to_owned(), json!({"type": "string", "value": s})),
        SnakValue::TimeValue {
            time,
            precision,
            calendar,
        } => (
            "time".to_owned(),
            json!({"type": "time", "value": {
                "time": time, "timezone": 0, "before": 0, "after": 0,
                "precision": precision,
                "calendarmodel": format!("http://www.wikidata.org/entity/{calendar}")
            }}),
        ),
        SnakValue::GlobeCoordinate { lat, lon, precision } => (
            "globe-coordinate".to_owned(),
            json!({"type": "globecoordinate", "value": {
                "latitude": lat, "longitude": lon, "altitude": null, "precision": precision,
                "globe": "http://www.wikidata.org/entity/Q2"
            }}),
        ),
        SnakValue::Quantity { amount, unit } => (
            "quantity".to_owned(),
            json!({"type": "quantity", "value": {"amount": amount, "unit": unit}}),
        ),
        SnakValue::MonolingualText { text, language } => (
            "monolingualtext".to_owned(),
            json!({"type": "monolingualtext", "value": {"text": text, "language": language}}),
        ),
        SnakValue::Unsupported(ty) => (ty.clone(), json!({"type": ty, "value": null})),
    };
    json!({"snaktype": "value", "property": p, "datavalue": datavalue, "datatype": datatype})
}

// ---------------------------------------------------------------------------
// Streaming

/// Opens a dump file, decompressing `.gz` / `.bz2` by extension.
pub fn open_dump(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let file = File::open(path)?;
    let reader = BufReader::with_capacity(READ_BUFFER, file);
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    Ok(match ext {
        "gz" => Box::new(BufReader::with_capacity(
            READ_BUFFER,
            flate2::bufread::MultiGzDecoder::new(reader),
        )),
        "bz2" => Box::new(BufReader::with_capacity(
            READ_BUFFER,
            bzip2::bufread::MultiBzDecoder::new(reader),
        )),
        _ => Box::new(reader),
    })
}

/// One undecoded record and the byte offset of its line in the
/// (decompressed) stream.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub offset: u64,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Unknown,
    Array,
    Lines,
}

/// Splits a dump into record texts. An I/O error is yielded once and ends
/// the iteration.
pub struct RecordLines<R> {
    reader: R,
    offset: u64,
    layout: Layout,
    buf: Vec<u8>,
    failed: bool,
}

impl<R: BufRead> RecordLines<R> {
    pub fn new(reader: R) -> Self {
        RecordLines {
            reader,
            offset: 0,
            layout: Layout::Unknown,
            buf: Vec::new(),
            failed: false,
        }
    }
}

impl<R: BufRead> Iterator for RecordLines<R> {
    type Item = io::Result<RawRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            let start = self.offset;
            let n = match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(n) => n,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            };
            if n == 0 {
                return None;
            }
            self.offset += n as u64;
            let mut line = self.buf.trim_ascii();
            if line.is_empty() {
                continue;
            }
            if self.layout == Layout::Unknown {
                self.layout = if line[0] == b'[' { Layout::Array } else { Layout::Lines };
            }
            if self.layout == Layout::Array {
                if let Some(rest) = line.strip_prefix(b"[") {
                    line = rest.trim_ascii_start();
                }
                if let Some(rest) = line.strip_suffix(b"]") {
                    let rest = rest.trim_ascii_end();
                    if rest.is_empty() || rest.ends_with(b"}") || rest.ends_with(b",") {
                        line = rest;
                    }
                }
                if let Some(rest) = line.strip_suffix(b",") {
                    line = rest.trim_ascii_end();
                }
                if line.is_empty() {
                    continue;
                }
            }
            return Some(Ok(RawRecord {
                offset: start,
                bytes: line.to_vec(),
            }));
        }
    }
}

/// Parse result for one record in file order.
#[derive(Debug)]
pub struct StreamItem {
    pub offset: u64,
    pub result: Result<Record, DumpError>,
}

pub fn stream_entities<R: BufRead>(source: R) -> impl Iterator<Item = StreamItem> {
    RecordLines::new(source).map(|raw| match raw {
        Ok(raw) => StreamItem {
            offset: raw.offset,
            result: parse_entity_bytes(&raw.bytes),
        },
        Err(e) => StreamItem {
            offset: 0,
            result: Err(DumpError::Io(e)),
        },
    })
}
