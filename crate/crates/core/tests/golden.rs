mod common;

use common::{data, fixture_kb, id};
use punforge_core::engine::instantiations_for_np;
use punforge_core::lexicon::Relation;
use punforge_core::pipeline::explain_rejected;
use punforge_core::schema::Provenance;
use punforge_core::template::FragmentRole;
use punforge_core::{
    brute_force_instantiations, explain, fill, fit_np, generate, parse_schemata, realize_fragment,
    specialize_and_complete, to_surface, Binding, GenerationConfig, KnowledgeBase, RelationLabel,
};

fn checker_kb() -> KnowledgeBase {
    let file = |f: &str| data(&format!("fixtures/checker/{f}.txt"));
    KnowledgeBase::from_texts(
        &file("lexicon"),
        &file("homophones"),
        &file("schemata"),
        &file("templates"),
    )
    .unwrap()
}

#[test]
fn coke_can_is_rejected_as_sensible() {
    let kb = checker_kb();
    let g = generate(&kb, &pinned("coke_can", "plain", "describe")).unwrap();
    assert!(g.riddles.is_empty());
    let t = explain_rejected(&kb, &g.rejected[0]);
    assert!(t.failed.contains(&"check_sensible"));
    assert_eq!(
        t.surface.as_deref(),
        Some("What do you call a cylindrical drink container? A coke can.")
    );
}

fn pinned(np: &str, schema: &str, template: &str) -> GenerationConfig {
    GenerationConfig {
        np: Some(id(np)),
        schema: Some(schema.into()),
        template: Some(template.into()),
        ..GenerationConfig::default()
    }
}

fn surfaces(kb: &KnowledgeBase, config: &GenerationConfig) -> Vec<String> {
    generate(kb, config)
        .unwrap()
        .riddles
        .into_iter()
        .map(|r| r.surface)
        .collect()
}

#[test]
fn cross_a_sheep_with_a_kangaroo() {
    let kb = fixture_kb("worked_example");
    assert_eq!(
        surfaces(&kb, &pinned("woolly_jumper", "jumper", "syn_syn")),
        ["What do you get when you cross a sheep with a kangaroo? A woolly jumper."]
    );
}

#[test]
fn sheep_that_can_leap() {
    let kb = fixture_kb("worked_example");
    assert_eq!(
        surfaces(&kb, &pinned("woolly_jumper", "jumper", "syn_verb")),
        ["What do you call a sheep that can leap? A woolly jumper."]
    );
}

#[test]
fn jumper_fits_woolly_jumper_once() {
    let kb = fixture_kb("worked_example");
    let schema = &kb.schemata["jumper"];
    let partials = fit_np(schema, &id("woolly_jumper"), &kb.lexicon, &kb.homophones).unwrap();
    assert_eq!(partials.len(), 1);
    let b = &partials[0].bindings;
    for (var, lex) in [
        ("NP", "woolly_jumper"),
        ("W1", "woolly"),
        ("W2", "jumper_1"),
        ("H", "jumper_2"),
    ] {
        assert_eq!(b[var], Binding::lexeme(id(lex)), "{var}");
    }
}

#[test]
fn lotus_fits_spring_cabbage_by_hand() {
    // spring_cabbage = spring_1 + cabbage; the only homophone of spring_1 is
    // spring_2, so the single consistent binding has H = spring_2.
    let kb = fixture_kb("demo");
    let schema = &kb.schemata["lotus"];
    let partials = fit_np(schema, &id("spring_cabbage"), &kb.lexicon, &kb.homophones).unwrap();
    assert_eq!(partials.len(), 1);
    let b = &partials[0].bindings;
    assert_eq!(b["W1"], Binding::lexeme(id("spring_1")));
    assert_eq!(b["W2"], Binding::lexeme(id("cabbage")));
    assert_eq!(b["H"], Binding::lexeme(id("spring_2")));
}

#[test]
fn no_homophone_for_second_word_gives_nothing() {
    let kb = fixture_kb("demo");
    // number has no homophone entry; odd_number only puns on its first word.
    let partials = fit_np(
        &kb.schemata["jumper"],
        &id("odd_number"),
        &kb.lexicon,
        &kb.homophones,
    )
    .unwrap();
    assert!(partials.is_empty());
}

#[test]
fn jumper_partial_specializes_to_describes_all_pair() {
    let kb = fixture_kb("worked_example");
    let schema = &kb.schemata["jumper"];
    let template = &kb.templates["syn_syn"];
    let partial = fit_np(schema, &id("woolly_jumper"), &kb.lexicon, &kb.homophones)
        .unwrap()
        .remove(0);
    let all = specialize_and_complete(&partial, schema, template, &kb.lexicon).unwrap();
    let describes_all = RelationLabel::Slot(Relation::DescribesAll);
    assert!(all.iter().any(|i| i.relations["C1"] == describes_all
        && i.relations["C2"] == describes_all
        && i.bindings["C1"] == Binding::lexeme(id("sheep"))
        && i.bindings["C2"] == Binding::lexeme(id("kangaroo"))));
}

#[test]
fn spec_is_class_binds_a_two_lexeme_sequence() {
    // A characteristic drawn from W2 (jumper_1), which has spec_is warm and class clothing.
    let schemata = parse_schemata(
        "schema from_w2\nvar NP key\nvar W1 key\nvar W2 key\nvar H key\nvar C1 char\nvar C2 char\n\
         constituents NP -> W1 W2\nlink homophone W2 H\nchar C1 from W2\nchar C2 from H\n\
         punchline W1 H\nquestion_slots C1 C2\n",
    )
    .unwrap();
    let schema = &schemata["from_w2"];
    let kb = fixture_kb("worked_example");
    let mut template = kb.templates["syn_syn"].clone();
    template.schemata.insert("from_w2".into());
    let partial = fit_np(schema, &id("woolly_jumper"), &kb.lexicon, &kb.homophones)
        .unwrap()
        .remove(0);
    let all = specialize_and_complete(&partial, schema, &template, &kb.lexicon).unwrap();
    let hit = all
        .iter()
        .find(|i| i.relations["C1"] == RelationLabel::SpecIsClass)
        .expect("spec_is_class instantiation");
    assert_eq!(
        hit.bindings["C1"],
        Binding::Lexemes(vec![id("warm"), id("clothing")])
    );
    let oracle = brute_force_instantiations(schema, &template, &kb.lexicon, &kb.homophones);
    assert!(oracle.contains(hit));
}

#[test]
fn fragments_from_the_worked_example() {
    let kb = fixture_kb("worked_example");
    let lex = &kb.lexicon;
    let words = |b: Binding, role| realize_fragment(&b, role, lex).unwrap().join(" ");
    assert_eq!(
        words(Binding::lexeme(id("sheep")), FragmentRole::Entity),
        "a sheep"
    );
    assert_eq!(
        words(Binding::lexeme(id("leap")), FragmentRole::VerbCan),
        "that can leap"
    );
    assert_eq!(
        words(
            Binding::Lexemes(vec![id("warm"), id("clothing")]),
            FragmentRole::Entity
        ),
        "warm clothing"
    );
}

#[test]
fn fill_gives_the_near_surface_form() {
    let kb = fixture_kb("worked_example");
    let schema = &kb.schemata["jumper"];
    let template = &kb.templates["syn_syn"];
    let inst = instantiations_for_np(
        schema,
        template,
        &id("woolly_jumper"),
        &kb.lexicon,
        &kb.homophones,
    )
    .into_iter()
    .find(|i| i.bindings["C1"] == Binding::lexeme(id("sheep")))
    .unwrap();
    let nsf = fill(template, schema, &inst, &kb.lexicon).unwrap();
    assert_eq!(
        nsf.question.join(" "),
        "what do you get when you cross a sheep with a kangaroo ?"
    );
    assert_eq!(nsf.answer.join(" "), "a woolly jumper .");
    assert_eq!(
        to_surface(&nsf),
        "What do you get when you cross a sheep with a kangaroo? A woolly jumper."
    );
}

#[test]
fn trace_of_the_worked_example() {
    let kb = fixture_kb("worked_example");
    let g = generate(&kb, &pinned("woolly_jumper", "jumper", "syn_syn")).unwrap();
    let t = explain(&kb, &g.riddles[0]);
    assert_eq!(t.np, id("woolly_jumper"));
    assert_eq!(t.bindings["H"], "jumper_2");
    assert_eq!(
        t.relations["C1"],
        RelationLabel::Slot(Relation::DescribesAll)
    );
    assert_eq!(
        t.relations["C2"],
        RelationLabel::Slot(Relation::DescribesAll)
    );
    assert_eq!(t.provenance.schema, Provenance::Paper);
    assert!(t.to_text().contains("check_identity=pass"));
}

#[test]
fn extrapolated_provenance_reaches_the_trace() {
    let kb = fixture_kb("demo");
    let g = generate(&kb, &GenerationConfig::default()).unwrap();
    let r = g
        .riddles
        .iter()
        .find(|r| r.instantiation.schema == "woolly")
        .unwrap();
    assert_eq!(explain(&kb, r).provenance.schema, Provenance::Extrapolated);
}

#[test]
fn degenerate_jumper_candidate_is_rejected_for_identity() {
    let kb = checker_kb();
    let g = generate(&kb, &pinned("woolly_jumper", "jumper", "syn_syn")).unwrap();
    let bad = g
        .rejected
        .iter()
        .find(|r| r.instantiation.bindings["C1"] == Binding::lexeme(id("jumper_1")))
        .expect("candidate with C1 = jumper_1");
    let t = explain_rejected(&kb, bad);
    assert_eq!(t.failed, ["check_identity"]);
}

#[test]
fn empty_lexicon_generates_nothing() {
    let kb = KnowledgeBase::from_texts(
        "",
        "",
        punforge_core::schema::SHIPPED_SCHEMATA,
        punforge_core::template::SHIPPED_TEMPLATES,
    )
    .unwrap();
    let g = generate(&kb, &GenerationConfig::default()).unwrap();
    assert!(g.riddles.is_empty());
}

#[test]
fn generation_is_deterministic() {
    let kb = fixture_kb("demo");
    for config in [
        GenerationConfig::default(),
        GenerationConfig {
            sample: true,
            seed: 42,
            max: Some(3),
            ..GenerationConfig::default()
        },
    ] {
        let a = generate(&kb, &config).unwrap();
        let b = generate(&kb, &config).unwrap();
        assert_eq!(a, b);
    }
}
