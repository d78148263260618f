//! Punning-riddle generation from a humour-neutral lexicon.
//!
//! The pipeline picks a noun phrase, fits it into a [`schema::Schema`],
//! lets a [`template::Template`] specialize the schema's open links,
//! realizes the result as text, rejects candidates that fail the
//! post-production checks, and ranks the rest by heuristic score.

pub mod check;
pub mod engine;
pub mod homophone;
pub mod lexicon;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod schema;
pub mod score;
pub mod template;
pub mod violation;

pub use check::{check, check_identity, check_sensible, CheckVerdict};
pub use engine::{fit_np, specialize_and_complete, Instantiation, PartialInstantiation};
pub use homophone::{parse_homophone_base, HomophoneBase, HomophonePair, PairKind};
pub use lexicon::{parse_lexicon, Binding, Chunk, LexemeId, LexicalEntry, Lexicon, RelationLabel};
pub use oracle::brute_force_instantiations;
pub use pipeline::{explain, generate, GenerationConfig, KnowledgeBase, Riddle};
pub use schema::{parse_schemata, Schema};
pub use score::{rank, score, ScoreRecord, ScoreWeights};
pub use template::{
    fill, parse_templates, realize_fragment, to_surface, NearSurfaceForm, Template,
};
pub use violation::{Severity, Violation};
