#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use punforge_core::homophone::HomophonePair;
use punforge_core::lexicon::{Category, LexicalEntry, Relation, SlotValue};
use punforge_core::schema::SHIPPED_SCHEMATA;
use punforge_core::template::SHIPPED_TEMPLATES;
use punforge_core::{Chunk, HomophoneBase, KnowledgeBase, LexemeId, Lexicon, PairKind};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(rel: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", rel]
        .iter()
        .collect();
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture_kb(dir: &str) -> KnowledgeBase {
    KnowledgeBase::from_texts(
        &data(&format!("fixtures/{dir}/lexicon.txt")),
        &data(&format!("fixtures/{dir}/homophones.txt")),
        SHIPPED_SCHEMATA,
        SHIPPED_TEMPLATES,
    )
    .unwrap()
}

pub fn id(s: &str) -> LexemeId {
    LexemeId::new(s).unwrap()
}

const WORDS: &[&str] = &[
    "apple", "bark", "cave", "drum", "egg", "fox", "gull", "hat", "ink", "jam", "kite", "lamp",
    "moss", "nut", "owl", "pea", "quill", "reed", "sock", "toad", "urn", "vine", "wasp", "yak",
    "zinc",
];

fn chunk(words: &[&str]) -> Chunk {
    Chunk::new(words.iter().copied()).unwrap()
}

fn entry(name: String, category: Category, form: &str) -> LexicalEntry {
    LexicalEntry::new(id(&name), category, chunk(&[form]))
}

/// A small random lexicon in the shape of the shipped data: nouns,
/// adjectives and verbs linked by semantic slots, two-word noun phrases
/// over them, and a few homophone pairs among the words.
pub fn random_world(seed: u64) -> (Lexicon, HomophoneBase) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_nouns = rng.random_range(3..=7);
    let n_adjs = rng.random_range(1..=3);
    let n_verbs = rng.random_range(1..=2);
    let nouns: Vec<String> = (0..n_nouns).map(|i| format!("noun_{i}")).collect();
    let adjs: Vec<String> = (0..n_adjs).map(|i| format!("adj_{i}")).collect();
    let verbs: Vec<String> = (0..n_verbs).map(|i| format!("verb_{i}")).collect();
    let mut words = WORDS.to_vec();
    let mut form = |rng: &mut ChaCha8Rng| {
        let i = rng.random_range(0..words.len());
        words.swap_remove(i)
    };

    let mut entries = Vec::new();
    let pick =
        |rng: &mut ChaCha8Rng, from: &[String]| SlotValue::Lexeme(id(from.choose(rng).unwrap()));
    for n in &nouns {
        let mut e = entry(n.clone(), Category::Noun, form(&mut rng));
        e.vowel_start = Some(rng.random_bool(0.3));
        e.countable = Some(rng.random_bool(0.8));
        for rel in [
            Relation::Class,
            Relation::SpecIs,
            Relation::Synonym,
            Relation::DescribesAll,
            Relation::ActVerb,
            Relation::InactVerb,
            Relation::UsedTo,
            Relation::Has,
        ] {
            if !rng.random_bool(0.35) {
                continue;
            }
            let v = match rel {
                Relation::SpecIs => pick(&mut rng, &adjs),
                Relation::ActVerb | Relation::InactVerb | Relation::UsedTo => {
                    pick(&mut rng, &verbs)
                }
                Relation::Has => SlotValue::Chunk(chunk(&["some", "bits"])),
                _ => pick(&mut rng, &nouns),
            };
            e.relations.push((rel, v));
        }
        entries.push(e);
    }
    for a in &adjs {
        let mut e = entry(a.clone(), Category::Adj, form(&mut rng));
        e.vowel_start = Some(rng.random_bool(0.3));
        if rng.random_bool(0.5) {
            e.relations
                .push((Relation::DescribesAll, pick(&mut rng, &nouns)));
        }
        if rng.random_bool(0.4) {
            e.relations.push((Relation::Synonym, pick(&mut rng, &adjs)));
        }
        entries.push(e);
    }
    for v in &verbs {
        let f = form(&mut rng);
        let mut e = entry(v.clone(), Category::Verb, f);
        e.second = Some(chunk(&[f]));
        e.third = Some(Chunk::new([format!("{f}s")]).unwrap());
        entries.push(e);
    }
    let words_pool: Vec<String> = nouns.iter().chain(&adjs).cloned().collect();
    for i in 0..rng.random_range(1..=3) {
        let first = words_pool.choose(&mut rng).unwrap().clone();
        let second = nouns.choose(&mut rng).unwrap().clone();
        let mut e = LexicalEntry::new(
            id(&format!("phrase_{i}")),
            Category::Np,
            chunk(&[form(&mut rng), form(&mut rng)]),
        );
        e.comp_lex = Some(vec![id(&first), id(&second)]);
        e.vowel_start = Some(false);
        e.countable = Some(true);
        if rng.random_bool(0.5) {
            e.relations.push((Relation::Class, pick(&mut rng, &nouns)));
        }
        if rng.random_bool(0.5) {
            e.relations.push((Relation::SpecIs, pick(&mut rng, &adjs)));
        }
        entries.push(e);
    }
    let lexicon = Lexicon::from_entries(entries).unwrap();

    let mut pairs: Vec<HomophonePair> = Vec::new();
    for _ in 0..rng.random_range(1..=5) {
        let a = words_pool.choose(&mut rng).unwrap();
        let b = words_pool.choose(&mut rng).unwrap();
        let dup = pairs.iter().any(|p| {
            (p.a.as_str() == a && p.b.as_str() == b) || (p.a.as_str() == b && p.b.as_str() == a)
        });
        if a == b || dup {
            continue;
        }
        let kind = if rng.random_bool(0.5) {
            PairKind::Alternate
        } else {
            PairKind::Homonym
        };
        pairs.push(HomophonePair {
            a: id(a),
            b: id(b),
            kind,
        });
    }
    (lexicon, HomophoneBase::from_pairs(pairs).unwrap())
}
