#![allow(dead_code)]

//! Synthetic listing corpus shared by the integration tests.

use dedupe_kb::comparators::EARTH_RADIUS_M;
use dedupe_kb::{KnowledgeBase, LinkSet, MatchConfig, Record};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RECORDS: usize = 200;
pub const PLANTED_PAIRS: usize = 50;

const SYLLABLES: &[&str] = &[
    "ba", "ce", "di", "fo", "gu", "ha", "je", "ki", "lo", "mu", "na", "pe", "ri", "so", "tu", "va",
    "xe", "zi", "yo", "wu",
];
const PROPERTY_TYPES: &[&str] = &["casa", "departamento", "ph", "lote", "local", "oficina"];

/// Entity-specific vocabulary: every word ends with a two-letter code unique
/// to the entity, and all words have the same length, so no two entities
/// share a token.
struct Vocabulary {
    code: String,
}

impl Vocabulary {
    fn new(entity: usize) -> Self {
        let a = (b'a' + (entity / 26) as u8) as char;
        let b = (b'a' + (entity % 26) as u8) as char;
        Vocabulary {
            code: format!("{a}{b}"),
        }
    }

    fn word(&self, rng: &mut ChaCha8Rng) -> String {
        let mut w = String::new();
        for _ in 0..3 {
            w.push_str(SYLLABLES[rng.random_range(0..SYLLABLES.len())]);
        }
        w.push_str(&self.code);
        w
    }

    fn words(&self, rng: &mut ChaCha8Rng, n: usize) -> String {
        (0..n).map(|_| self.word(rng)).collect::<Vec<_>>().join(" ")
    }
}

fn listing(id: &str, entity: usize, rng: &mut ChaCha8Rng) -> Record {
    let vocab = Vocabulary::new(entity);
    let lat = rng.random_range(-34.95..-34.85);
    let lon = rng.random_range(-58.05..-57.90);
    let total: u32 = rng.random_range(40..900);
    let covered: u32 = rng.random_range(30..=total);
    let title = {
        // capitalize and pad with spaces to exercise cleaning
        let t = vocab.words(rng, 4);
        format!(" {}{} ", t[..1].to_uppercase(), &t[1..])
    };
    Record::new(id)
        .with("title", &[&title])
        .with("description", &[&vocab.words(rng, 12)])
        .with(
            "price",
            &[&rng.random_range(50_000u32..900_000).to_string()],
        )
        .with(
            "maintenance_fee",
            &[&rng.random_range(0u32..20_000).to_string()],
        )
        .with(
            "property_type",
            &[PROPERTY_TYPES[rng.random_range(0..PROPERTY_TYPES.len())]],
        )
        .with("age", &[&rng.random_range(1950u32..2024).to_string()])
        .with("coordinates", &[&format!("{lat},{lon}")])
        .with("address", &[&vocab.words(rng, 2)])
        .with("district", &[&vocab.word(rng)])
        .with("total_surface", &[&total.to_string()])
        .with("covered_surface", &[&covered.to_string()])
        .with("land_surface", &[&total.to_string()])
        .with("amount_of_rooms", &[&rng.random_range(1u32..8).to_string()])
        .with(
            "amount_of_bathrooms",
            &[&rng.random_range(1u32..4).to_string()],
        )
        .with(
            "amount_of_garages",
            &[&rng.random_range(0u32..3).to_string()],
        )
        .with(
            "amount_of_bedrooms",
            &[&rng.random_range(0u32..6).to_string()],
        )
}

pub struct Corpus {
    pub kb: KnowledgeBase,
    pub truth: LinkSet,
}

fn schema(config: &MatchConfig) -> Vec<String> {
    let mut schema = vec![config.id_attribute.clone()];
    schema.extend(config.attributes.iter().map(|a| a.name.clone()));
    schema
}

/// 200 records: 50 field-for-field duplicate pairs and 100 singletons.
pub fn exact_corpus(config: &MatchConfig, seed: u64) -> Corpus {
    build(config, seed, |_, r| r)
}

/// Moves a `"lat,lon"` coordinate `meters` due north.
pub fn shift_north(coordinate: &str, meters: f64) -> String {
    let (lat, lon) = coordinate.split_once(',').unwrap();
    let lat: f64 = lat.trim().parse().unwrap();
    let lon: f64 = lon.trim().parse().unwrap();
    format!("{},{}", lat + (meters / EARTH_RADIUS_M).to_degrees(), lon)
}

/// Replaces one letter of `s` (never the first or a space) with a different
/// letter.
pub fn one_char_edit(s: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    let positions: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_ascii_lowercase())
        .map(|(i, _)| i)
        .collect();
    let pos = positions[rng.random_range(0..positions.len())];
    let old = chars[pos];
    let mut new = old;
    while new == old {
        new = (b'a' + rng.random_range(0..26u8)) as char;
    }
    chars[pos] = new;
    chars.into_iter().collect()
}

/// Same corpus with each planted copy's title edited by one character and its
/// coordinates moved 30 m.
pub fn perturbed_corpus(config: &MatchConfig, seed: u64) -> Corpus {
    let mut edit_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    build(config, seed, move |copy, mut r| {
        if copy {
            let title = one_char_edit(&r.get("title")[0], &mut edit_rng);
            let coords = shift_north(&r.get("coordinates")[0], 30.0);
            r = r.with("title", &[&title]).with("coordinates", &[&coords]);
        }
        r
    })
}

fn build(
    config: &MatchConfig,
    seed: u64,
    mut mutate: impl FnMut(bool, Record) -> Record,
) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kb = KnowledgeBase::new(schema(config));
    let mut truth = LinkSet::new();
    for k in 0..PLANTED_PAIRS {
        let original = listing(&format!("p{k:02}a"), k, &mut rng);
        let copy = Record {
            id: format!("p{k:02}b"),
            values: original.values.clone(),
        };
        truth.insert(&original.id, &copy.id, 1.0).unwrap();
        kb.insert(mutate(false, original)).unwrap();
        kb.insert(mutate(true, copy)).unwrap();
    }
    for k in 0..(RECORDS - 2 * PLANTED_PAIRS) {
        let r = listing(&format!("s{k:03}"), PLANTED_PAIRS + k, &mut rng);
        kb.insert(mutate(false, r)).unwrap();
    }
    Corpus { kb, truth }
}
