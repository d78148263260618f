//! Shared fixtures for the generation benchmarks.

use punforge_core::pipeline::KnowledgeBase;
use punforge_core::schema::SHIPPED_SCHEMATA;
use punforge_core::template::SHIPPED_TEMPLATES;

pub const DEMO_LEXICON: &str = include_str!("../../../data/fixtures/demo/lexicon.txt");
pub const DEMO_HOMOPHONES: &str = include_str!("../../../data/fixtures/demo/homophones.txt");

/// The demo knowledge base with the shipped schemata and templates.
pub fn demo_kb() -> KnowledgeBase {
    KnowledgeBase::from_texts(
        DEMO_LEXICON,
        DEMO_HOMOPHONES,
        SHIPPED_SCHEMATA,
        SHIPPED_TEMPLATES,
    )
    .expect("demo fixture loads")
}
