mod common;

use std::collections::BTreeSet;

use common::{fixture_kb, random_world};
use proptest::prelude::*;
use punforge_core::engine::instantiations_for_np;
use punforge_core::schema::SHIPPED_SCHEMATA;
use punforge_core::template::SHIPPED_TEMPLATES;
use punforge_core::{
    brute_force_instantiations, generate, parse_schemata, parse_templates, GenerationConfig,
    HomophoneBase, Instantiation, Lexicon,
};

fn engine_set(
    schema: &punforge_core::Schema,
    template: &punforge_core::Template,
    lexicon: &Lexicon,
    base: &HomophoneBase,
) -> BTreeSet<Instantiation> {
    lexicon
        .noun_phrases()
        .flat_map(|np| instantiations_for_np(schema, template, &np.lexeme, lexicon, base))
        .collect()
}

/// Compares engine and oracle for every schema/template pair; returns how
/// many instantiations were compared.
fn compare_all(lexicon: &Lexicon, base: &HomophoneBase) -> Result<usize, String> {
    let schemata = parse_schemata(SHIPPED_SCHEMATA).unwrap();
    let templates = parse_templates(SHIPPED_TEMPLATES).unwrap();
    let mut seen = 0;
    for schema in schemata.values() {
        for template in templates.values() {
            let engine = engine_set(schema, template, lexicon, base);
            let oracle = brute_force_instantiations(schema, template, lexicon, base);
            if engine != oracle {
                let missing: Vec<_> = oracle.difference(&engine).take(3).collect();
                let extra: Vec<_> = engine.difference(&oracle).take(3).collect();
                return Err(format!(
                    "{} / {}: engine missed {missing:?}, engine extra {extra:?}",
                    schema.name, template.name
                ));
            }
            seen += engine.len();
        }
    }
    Ok(seen)
}

#[test]
fn engine_matches_oracle_on_worked_example() {
    let kb = fixture_kb("worked_example");
    let n = compare_all(&kb.lexicon, &kb.homophones).unwrap();
    assert!(n > 0);
}

#[test]
fn engine_matches_oracle_on_demo() {
    let kb = fixture_kb("demo");
    assert!(kb.lexicon.len() <= 60);
    assert!(kb.homophones.len() >= 5);
    let n = compare_all(&kb.lexicon, &kb.homophones).unwrap();
    // Every instantiation becomes either a riddle or a rejection.
    let g = generate(&kb, &GenerationConfig::default()).unwrap();
    assert_eq!(n, g.riddles.len() + g.rejected.len());
}

#[test]
fn oracle_on_empty_lexicon_is_empty() {
    let schemata = parse_schemata(SHIPPED_SCHEMATA).unwrap();
    let templates = parse_templates(SHIPPED_TEMPLATES).unwrap();
    let lex = Lexicon::default();
    let base = HomophoneBase::default();
    for s in schemata.values() {
        for t in templates.values() {
            assert!(brute_force_instantiations(s, t, &lex, &base).is_empty());
        }
    }
}

#[test]
fn no_pairs_means_no_homophone_schema_instances() {
    let kb = fixture_kb("worked_example");
    let schemata = parse_schemata(SHIPPED_SCHEMATA).unwrap();
    let templates = parse_templates(SHIPPED_TEMPLATES).unwrap();
    let empty = HomophoneBase::default();
    for s in schemata.values() {
        for t in templates.values() {
            assert!(
                brute_force_instantiations(s, t, &kb.lexicon, &empty).is_empty(),
                "{}",
                s.name
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_matches_oracle_on_random_lexicons(seed in any::<u64>()) {
        let (lexicon, base) = random_world(seed);
        if let Err(e) = compare_all(&lexicon, &base) {
            prop_assert!(false, "{}", e);
        }
    }
}
