#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dbw_core::dataset_sink::StatsReport;
use dbw_core::dump_reader::{Entity, EntityId, Rank, RedirectRecord, Snak, SnakValue, Statement};
use dbw_core::pipeline::{run_extract, RunConfig};
use dbw_core::rdf::DatasetId;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    fs::read_to_string(fixture(name)).unwrap()
}

/// Items the generator types entities with; all but the last have a class
/// equivalence in the fixture ontology.
const CLASS_ITEMS: &[u64] = &[5, 36180, 515, 6256, 571, 43229, 3918, 999_999];
const LANGS: &[&str] = &["en", "de", "fr", "es", "it", "nl"];
const WORDS: &[&str] = &[
    "alpha", "Beta", "gamma \"quoted\"", "δέλτα", "eps\\ilon", "zeta\tz", "Éta", "theta\nline", "東京", "kappa",
];

fn word(rng: &mut StdRng) -> String {
    WORDS[rng.random_range(0..WORDS.len())].to_owned()
}

fn random_value(rng: &mut StdRng, n: u64) -> (EntityId, SnakValue) {
    let pick = rng.random_range(0..12);
    let item = |rng: &mut StdRng| SnakValue::ItemValue(EntityId::item(rng.random_range(1..=n)));
    match pick {
        0 => (EntityId::property(26), item(rng)),
        1 => (EntityId::property(19), item(rng)),
        2 => (EntityId::property(50), item(rng)),
        3 => {
            let precision = [7u8, 9, 10, 11, 11][rng.random_range(0..5)];
            let time = format!(
                "+{:04}-{:02}-{:02}T00:00:00Z",
                rng.random_range(1..2025),
                rng.random_range(1..13),
                rng.random_range(1..29)
            );
            (
                EntityId::property(569),
                SnakValue::TimeValue {
                    time,
                    precision,
                    calendar: EntityId::item(1985727),
                },
            )
        }
        4 => (
            EntityId::property(625),
            SnakValue::GlobeCoordinate {
                lat: rng.random_range(-9000..9000) as f64 / 100.0,
                lon: rng.random_range(-18000..18000) as f64 / 100.0,
                precision: Some(0.01),
            },
        ),
        5 => (
            EntityId::property(1082),
            SnakValue::Quantity {
                amount: format!("+{}", rng.random_range(0..10_000_000)),
                unit: "1".into(),
            },
        ),
        6 => (
            EntityId::property(1566),
            SnakValue::StringValue(rng.random_range(1..9_999_999).to_string()),
        ),
        7 => (EntityId::property(18), SnakValue::StringValue(format!("{} {}.jpg", word(rng), rng.random_range(0..100)))),
        8 => (
            EntityId::property(1477),
            SnakValue::MonolingualText {
                text: word(rng),
                language: LANGS[rng.random_range(0..LANGS.len())].into(),
            },
        ),
        9 => (EntityId::property(735), SnakValue::StringValue(word(rng))),
        10 => (EntityId::property(856), SnakValue::Url(format!("http://example.org/{}", rng.random_range(0..1000)))),
        _ => (
            EntityId::property(rng.random_range(2000..2010)),
            if rng.random_bool(0.5) { SnakValue::SomeValue } else { SnakValue::NoValue },
        ),
    }
}

/// A random entity `Q<id>` whose item values point into `1..=n`.
pub fn random_entity(rng: &mut StdRng, id: u64, n: u64) -> Entity {
    let mut e = Entity::new(EntityId::item(id));
    e.page_id = Some(id * 3);
    e.revision_id = Some(1_000_000 + id);
    for lang in LANGS.iter().take(rng.random_range(0..4)) {
        e.labels.insert((*lang).into(), format!("{} {id}", word(rng)));
        if rng.random_bool(0.3) {
            e.descriptions.insert((*lang).into(), word(rng));
        }
        if rng.random_bool(0.2) {
            e.aliases.insert((*lang).into(), vec![word(rng), format!("alias {id}")]);
        }
    }
    for lang in LANGS.iter().take(rng.random_range(0..5)) {
        e.sitelinks.insert(format!("{lang}wiki"), format!("Page {id} {}", word(rng)));
    }
    if rng.random_bool(0.1) {
        e.sitelinks.insert("commonswiki".into(), format!("Category:{id}"));
    }
    if rng.random_bool(0.9) {
        let class = CLASS_ITEMS[rng.random_range(0..CLASS_ITEMS.len())];
        e.statements.push(Statement::new(EntityId::property(31), SnakValue::ItemValue(EntityId::item(class))));
    }
    for _ in 0..rng.random_range(0..8) {
        let (property, value) = random_value(rng, n);
        let mut st = Statement::new(property, value);
        for _ in 0..rng.random_range(0..3) {
            let (qp, qv) = random_value(rng, n);
            let qp = if rng.random_bool(0.5) { EntityId::property(580) } else { qp };
            st.qualifiers.push(Snak { property: qp, value: qv });
        }
        if rng.random_bool(0.3) {
            st.references.push(vec![Snak {
                property: EntityId::property(854),
                value: SnakValue::Url(format!("http://ref.example.org/{}", rng.random_range(0..50))),
            }]);
        }
        st.rank = match rng.random_range(0..20) {
            0 => Rank::Deprecated,
            1 => Rank::Preferred,
            _ => Rank::Normal,
        };
        e.statements.push(st);
    }
    e
}

/// JSON-lines records for `n` entities plus redirects (chains and cycles)
/// among ids above `n`, deterministic in `seed`.
pub fn synthetic_records(n: u64, seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut lines = Vec::new();
    for id in 1..=n {
        lines.push(random_entity(&mut rng, id, n + n / 10).to_dump_json().to_string());
        if id % 10 == 0 {
            // Redirect source ids live above n so they never collide with
            // entity ids; some chains end in a cycle.
            let from = n + id / 10;
            let to = match rng.random_range(0..4) {
                0 => n + id / 10 + 1,
                1 if id > 20 => n + id / 10 - 1,
                _ => rng.random_range(1..=n),
            };
            if from != to {
                lines.push(RedirectRecord { from: EntityId::item(from), to: EntityId::item(to) }.to_dump_json().to_string());
            }
        }
    }
    lines
}

pub fn write_dump(path: &Path, lines: &[String]) {
    let mut f = fs::File::create(path).unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
}

pub fn config(dump: &Path, out: &Path, workers: usize) -> RunConfig {
    RunConfig {
        mapped_languages: ["en", "de", "fr"].iter().map(|s| s.to_string()).collect(),
        workers,
        ..RunConfig::new(dump, fixture("ontology.txt"), fixture("mappings.json"), out)
    }
}

pub fn run(dump: &Path, out: &Path, workers: usize, skip_postprocess: bool) -> StatsReport {
    let cfg = RunConfig {
        skip_postprocess,
        ..config(dump, out, workers)
    };
    run_extract(&cfg).unwrap()
}

/// Contents of every dataset file of an uncompressed run, keyed by file.
pub fn dataset_bytes(out: &Path) -> BTreeMap<String, Vec<u8>> {
    DatasetId::ALL
        .iter()
        .map(|d| {
            let name = d.file_name(false);
            let bytes = fs::read(out.join(&name)).unwrap();
            (name, bytes)
        })
        .collect()
}

pub fn sorted_lines(bytes: &[u8]) -> Vec<String> {
    let mut lines: Vec<String> = String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect();
    lines.sort();
    lines
}

pub fn dataset_lines(out: &Path, d: DatasetId) -> Vec<String> {
    fs::read_to_string(out.join(d.file_name(false)))
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}
