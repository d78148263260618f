mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{fixture_kb, id, random_world};
use num_rational::Rational64;
use proptest::prelude::*;
use proptest::sample::{select, subsequence};
use punforge_core::homophone::HomophonePair;
use punforge_core::lexicon::{Category, Relation, SlotValue};
use punforge_core::report::{aggregate, apply_trim, names_in, Grouping, RatingRecord, TrimRules};
use punforge_core::score::{funny_letters, score_parts, Rational};
use punforge_core::template::FragmentRole;
use punforge_core::{
    check, generate, parse_lexicon, rank, realize_fragment, Binding, Chunk, GenerationConfig,
    HomophoneBase, LexicalEntry, Lexicon, PairKind, ScoreWeights,
};

const CASES: u32 = 1000;

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

// ---- lexicon ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lexicon_text_round_trips(seed in any::<u64>()) {
        let (lexicon, _) = random_world(seed);
        let again = parse_lexicon(&lexicon.to_text()).unwrap();
        prop_assert_eq!(&again, &lexicon);
        prop_assert_eq!(again.to_text(), lexicon.to_text());
    }
}

// ---- homophones ----

fn arb_pairs() -> impl Strategy<Value = Vec<(usize, usize, bool)>> {
    prop::collection::vec((0usize..8, 0usize..8, any::<bool>()), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn homophone_lookup_is_symmetric_and_irreflexive(raw in arb_pairs()) {
        let name = |i: usize| id(&format!("w_{i}"));
        let mut pairs: Vec<HomophonePair> = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, b, alt) in raw {
            let key = (a.min(b), a.max(b));
            if a == b || !seen.insert(key) {
                continue;
            }
            let kind = if alt { PairKind::Alternate } else { PairKind::Homonym };
            pairs.push(HomophonePair { a: name(a), b: name(b), kind });
        }
        let base = HomophoneBase::from_pairs(pairs.clone()).unwrap();
        for i in 0..8 {
            let x = name(i);
            for (y, kind) in base.homophones_of(&x) {
                prop_assert_ne!(y, &x);
                prop_assert!(base.homophones_of(y).contains(&(x.clone(), *kind)));
                prop_assert_eq!(base.kind_of(&x, y), Some(*kind));
                prop_assert_eq!(base.kind_of(y, &x), Some(*kind));
            }
            prop_assert_eq!(base.kind_of(&x, &x), None);
        }
        for p in &pairs {
            // either orientation of an existing pair is a duplicate
            let flipped = HomophonePair { a: p.b.clone(), b: p.a.clone(), kind: p.kind };
            let mut more = pairs.clone();
            more.push(flipped);
            prop_assert!(HomophoneBase::from_pairs(more).is_err());
        }
    }

    #[test]
    fn self_pairs_are_refused(i in 0usize..8, alt in any::<bool>()) {
        let x = id(&format!("w_{i}"));
        let kind = if alt { PairKind::Alternate } else { PairKind::Homonym };
        let pair = HomophonePair { a: x.clone(), b: x, kind };
        prop_assert!(HomophoneBase::from_pairs(vec![pair]).is_err());
    }
}

// ---- determiners ----

const VOWELS: &[&str] = &["apple", "egg", "ink", "owl", "urn"];
const CONSONANTS: &[&str] = &["bark", "cave", "drum", "fox", "gull"];

fn noun_world(
    adj_vowel: bool,
    noun_vowel: bool,
    countable: bool,
    adj_form: &str,
    noun_form: &str,
) -> Lexicon {
    let mut adj = LexicalEntry::new(id("adj"), Category::Adj, Chunk::new([adj_form]).unwrap());
    adj.vowel_start = Some(adj_vowel);
    let mut noun = LexicalEntry::new(id("noun"), Category::Noun, Chunk::new([noun_form]).unwrap());
    noun.vowel_start = Some(noun_vowel);
    noun.countable = Some(countable);
    noun.relations
        .push((Relation::SpecIs, SlotValue::Lexeme(id("adj"))));
    Lexicon::from_entries(vec![adj, noun]).unwrap()
}

fn expected_det(vowel: bool) -> &'static str {
    if vowel {
        "an"
    } else {
        "a"
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn entity_determiner_agrees(
        adj_vowel in any::<bool>(),
        countable in any::<bool>(),
        noun_vowel in any::<bool>(),
        adj_i in 0usize..5,
        noun_i in 0usize..5,
        with_adj in any::<bool>(),
    ) {
        let adj_form = if adj_vowel { VOWELS[adj_i] } else { CONSONANTS[adj_i] };
        let noun_form = if noun_vowel { VOWELS[noun_i] } else { CONSONANTS[noun_i] };
        let lex = noun_world(adj_vowel, noun_vowel, countable, adj_form, noun_form);
        let binding = if with_adj {
            Binding::Lexemes(vec![id("adj"), id("noun")])
        } else {
            Binding::lexeme(id("noun"))
        };
        let tokens = realize_fragment(&binding, FragmentRole::Entity, &lex).unwrap();
        let body: Vec<&str> = if with_adj { vec![adj_form, noun_form] } else { vec![noun_form] };
        if countable {
            let first_vowel = if with_adj { adj_vowel } else { noun_vowel };
            prop_assert_eq!(tokens[0].as_str(), expected_det(first_vowel));
            prop_assert_eq!(&tokens[1..], &body[..]);
        } else {
            prop_assert_eq!(tokens, body);
        }
    }
}

fn vowel_initial(word: &str) -> bool {
    word.starts_with(['a', 'e', 'i', 'o', 'u'])
}

/// Every a/an in every generated question and answer agrees with the word after it.
#[test]
fn determiners_agree_in_every_generated_riddle() {
    let mut checked = 0;
    for dir in ["worked_example", "demo"] {
        let kb = fixture_kb(dir);
        let g = generate(&kb, &GenerationConfig::default()).unwrap();
        for r in &g.riddles {
            for part in [&r.nsf.question, &r.nsf.answer] {
                for w in part.windows(2) {
                    if w[0] == "a" || w[0] == "an" {
                        assert_eq!(w[0], expected_det(vowel_initial(&w[1])), "{}", r.surface);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 10);
}

// ---- scoring and ranking ----

fn demo_riddles() -> Vec<punforge_core::Riddle> {
    generate(&fixture_kb("demo"), &GenerationConfig::default())
        .unwrap()
        .riddles
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn rank_is_a_stable_descending_permutation(
        totals in prop::collection::vec(-2i64..3, 12),
        order in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let base = demo_riddles();
        prop_assume!(base.len() == 12);
        let input: Vec<_> = order
            .iter()
            .map(|&i| {
                let mut r = base[i].clone();
                r.scores.total = Rational::from_integer(totals[i]);
                r.index = i;
                r
            })
            .collect();
        let ranked = rank(input.clone());
        let mut a: Vec<usize> = input.iter().map(|r| r.index).collect();
        let mut b: Vec<usize> = ranked.iter().map(|r| r.index).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        for w in ranked.windows(2) {
            prop_assert!(w[0].scores.total >= w[1].scores.total);
            if w[0].scores.total == w[1].scores.total {
                let pos = |idx| input.iter().position(|r| r.index == idx).unwrap();
                prop_assert!(pos(w[0].index) < pos(w[1].index));
            }
        }
        prop_assert_eq!(rank(ranked.clone()), ranked);
    }

    #[test]
    fn funny_letters_only_add(
        punchline in prop::collection::vec("[a-z]{1,8}", 1..4),
        at in any::<prop::sample::Index>(),
        letter in select(vec!['k', 'q', 'v', 'w', 'z']),
        weight in 1i64..8,
    ) {
        let mut more = punchline.clone();
        let i = at.index(more.len());
        let at = 1.min(more[i].len());
        more[i].insert(at, letter);
        prop_assert_eq!(funny_letters(&more), funny_letters(&punchline) + 1);

        let mut weights = ScoreWeights::zero();
        weights.funny_letters = Rational(Rational64::new(weight, 4));
        let q = words("what do you call it ?");
        let before = score_parts(&q, &punchline, &weights).total;
        let after = score_parts(&q, &more, &weights).total;
        prop_assert!(after > before);
    }

    #[test]
    fn zero_weights_score_zero(
        question in prop::collection::vec("[a-z]{1,6}", 0..20),
        punchline in prop::collection::vec("[a-z]{1,8}", 1..4),
    ) {
        let s = score_parts(&question, &punchline, &ScoreWeights::zero());
        prop_assert_eq!(s.total, Rational::default());
    }
}

// ---- ratings ----

fn arb_records() -> impl Strategy<Value = Vec<RatingRecord>> {
    let rec = (
        select(vec!["elan", "jumper", "lotus"]),
        select(vec!["syn_syn", "syn_verb", "use_syn"]),
        select(vec!["fur_coat", "odd_number", "wild_boar", "love_bite"]),
        prop::collection::vec(0u8..=5, 1..4),
    );
    prop::collection::vec(rec, 0..40).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (s, t, p, scores))| RatingRecord {
                joke_id: format!("j{i}"),
                schema: s.into(),
                template: t.into(),
                phrase: p.into(),
                scores,
            })
            .collect()
    })
}

const GROUPINGS: [Grouping; 4] = [
    Grouping::Schema,
    Grouping::Template,
    Grouping::Pair,
    Grouping::Phrase,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn aggregate_ignores_record_order(
        (records, shuffled) in arb_records().prop_flat_map(|r| (Just(r.clone()), Just(r).prop_shuffle())),
    ) {
        for g in GROUPINGS {
            let a = aggregate(&records, g);
            let b = aggregate(&shuffled, g);
            let rows = |t: &punforge_core::report::ReportTable| {
                t.rows.iter().map(|r| (r.key.clone(), (r.count, r.mean))).collect::<BTreeMap<_, _>>()
            };
            prop_assert_eq!(rows(&a), rows(&b));
            prop_assert_eq!(&a.total, &b.total);
            prop_assert_eq!(a.rows.iter().map(|r| r.count).sum::<usize>(), records.len());
            prop_assert_eq!(a.total.count, records.len());
        }
    }

    #[test]
    fn trimming_never_grows_a_group(
        records in arb_records(),
        schemata in subsequence(vec!["elan", "jumper", "lotus"], 0..=3),
        templates in subsequence(vec!["syn_syn", "syn_verb", "use_syn"], 0..=3),
    ) {
        let rules = TrimRules {
            schemata: schemata.iter().map(|s| s.to_string()).collect(),
            templates: templates.iter().map(|s| s.to_string()).collect(),
            pairs: BTreeSet::new(),
        };
        let known_s = ["elan", "jumper", "lotus"].map(String::from).into();
        let known_t = ["syn_syn", "syn_verb", "use_syn"].map(String::from).into();
        let out = apply_trim(&records, &rules, &known_s, &known_t).unwrap();
        let (s_left, t_left) = names_in(&out.survivors);
        prop_assert!(s_left.is_disjoint(&rules.schemata));
        prop_assert!(t_left.is_disjoint(&rules.templates));
        for g in GROUPINGS {
            let before = aggregate(&records, g);
            let after = aggregate(&out.survivors, g);
            for row in &after.rows {
                let old = before.row(&row.key).map_or(0, |r| r.count);
                prop_assert!(row.count <= old);
            }
        }
        if rules.is_empty() {
            prop_assert_eq!(out.before, out.after);
        }
    }
}

// ---- pipeline ----

fn riddle_keys(
    g: &punforge_core::pipeline::Generation,
) -> BTreeSet<(String, String, String, String)> {
    g.riddles
        .iter()
        .map(|r| {
            (
                r.np.to_string(),
                r.instantiation.schema.clone(),
                r.instantiation.template.clone(),
                r.surface.clone(),
            )
        })
        .collect()
}

#[test]
fn every_emitted_riddle_passes_both_checks() {
    let kb = fixture_kb("demo");
    let g = generate(&kb, &GenerationConfig::default()).unwrap();
    for r in &g.riddles {
        let schema = &kb.schemata[&r.instantiation.schema];
        assert!(check(&r.instantiation, schema, &kb.lexicon, &kb.homophones).passed());
        assert!(r.verdicts.passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pinning_only_shrinks_the_output(
        np in prop::option::of(select(vec!["woolly_jumper", "serial_killer", "wild_boar", "fur_coat", "spring_cabbage", "odd_number"])),
        schema in prop::option::of(select(vec!["elan", "jumper", "lotus", "woolly", "double"])),
        template in prop::option::of(select(vec!["syn_syn", "syn_verb", "class_verb", "class_has", "adj_syn"])),
    ) {
        let kb = fixture_kb("demo");
        let full = riddle_keys(&generate(&kb, &GenerationConfig::default()).unwrap());
        let config = GenerationConfig {
            np: np.map(id),
            schema: schema.map(String::from),
            template: template.map(String::from),
            ..GenerationConfig::default()
        };
        let pinned = riddle_keys(&generate(&kb, &config).unwrap());
        prop_assert!(pinned.is_subset(&full));
        for (n, s, t, _) in &pinned {
            prop_assert!(np.is_none_or(|x| x == n));
            prop_assert!(schema.is_none_or(|x| x == s));
            prop_assert!(template.is_none_or(|x| x == t));
        }
    }

    #[test]
    fn threshold_is_a_floor(num in -4i64..8) {
        let kb = fixture_kb("demo");
        let threshold = Rational(Rational64::new(num, 4));
        let config = GenerationConfig { threshold: Some(threshold), ..GenerationConfig::default() };
        let g = generate(&kb, &config).unwrap();
        prop_assert!(g.riddles.iter().all(|r| r.scores.total >= threshold));
    }

    #[test]
    fn random_lexicons_emit_only_checked_riddles(seed in any::<u64>()) {
        let (lexicon, base) = random_world(seed);
        let kb = punforge_core::KnowledgeBase {
            lexicon,
            homophones: base,
            schemata: fixture_kb("worked_example").schemata,
            templates: fixture_kb("worked_example").templates,
        };
        let g = generate(&kb, &GenerationConfig::default()).unwrap();
        for r in &g.riddles {
            let schema = &kb.schemata[&r.instantiation.schema];
            prop_assert!(check(&r.instantiation, schema, &kb.lexicon, &kb.homophones).passed());
        }
    }
}
