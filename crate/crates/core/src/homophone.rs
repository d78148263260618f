//! The homophone base: curated pairs of phonologically identical lexemes.
//!
//! Homonyms differ in spelling (`serial`/`cereal`); alternate-meaning pairs
//! share a spelling but nothing else (`jumper_1`/`jumper_2`). Schema
//! instantiation treats both kinds the same; the kind is kept so it can be
//! reported.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{Category, LexemeId, LexicalEntry, Lexicon, Relation, SlotValue};
use crate::violation::Violation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Homonym,
    Alternate,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::Homonym => "homonym",
            PairKind::Alternate => "alternate",
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HomophonePair {
    pub a: LexemeId,
    pub b: LexemeId,
    pub kind: PairKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomophoneError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown lexeme `{id}`")]
    UnknownLexeme { line: usize, id: LexemeId },
    #[error("line {line}: {kind} pair `{a}`/`{b}`: {message}")]
    Kind {
        line: usize,
        kind: PairKind,
        a: LexemeId,
        b: LexemeId,
        message: String,
    },
    #[error("line {line}: pair `{a}`/`{b}` listed twice")]
    Duplicate {
        line: usize,
        a: LexemeId,
        b: LexemeId,
    },
}

/// Immutable set of homophone pairs with a symmetric lookup index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomophoneBase {
    pairs: Vec<HomophonePair>,
    index: BTreeMap<LexemeId, Vec<(LexemeId, PairKind)>>,
}

impl HomophoneBase {
    /// Builds a base from pairs already checked against a lexicon.
    /// Self-pairs and duplicates (in either orientation) are rejected.
    pub fn from_pairs(pairs: Vec<HomophonePair>) -> Result<Self, HomophoneError> {
        let mut base = HomophoneBase::default();
        for (i, pair) in pairs.into_iter().enumerate() {
            base.insert(i + 1, pair)?;
        }
        Ok(base)
    }

    fn insert(&mut self, line: usize, pair: HomophonePair) -> Result<(), HomophoneError> {
        if pair.a == pair.b {
            return Err(HomophoneError::Kind {
                line,
                kind: pair.kind,
                a: pair.a.clone(),
                b: pair.b,
                message: "a lexeme cannot be its own homophone".into(),
            });
        }
        if self.kind_of(&pair.a, &pair.b).is_some() {
            return Err(HomophoneError::Duplicate {
                line,
                a: pair.a,
                b: pair.b,
            });
        }
        self.index
            .entry(pair.a.clone())
            .or_default()
            .push((pair.b.clone(), pair.kind));
        self.index
            .entry(pair.b.clone())
            .or_default()
            .push((pair.a.clone(), pair.kind));
        self.pairs.push(pair);
        Ok(())
    }

    pub fn pairs(&self) -> &[HomophonePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Homophones of `lexeme` in file order; empty when it is in no pair.
    pub fn homophones_of(&self, lexeme: &LexemeId) -> &[(LexemeId, PairKind)] {
        self.index.get(lexeme).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The kind of the pair joining `a` and `b`, in either orientation.
    pub fn kind_of(&self, a: &LexemeId, b: &LexemeId) -> Option<PairKind> {
        self.homophones_of(a)
            .iter()
            .find(|(other, _)| other == b)
            .map(|(_, k)| *k)
    }

    pub fn to_text(&self) -> String {
        self.pairs
            .iter()
            .map(|p| format!("pair {} {} {}\n", p.kind, p.a, p.b))
            .collect()
    }

    /// Lints every pair; see [`lint_pair`].
    pub fn lint(&self, lexicon: &Lexicon) -> Vec<Violation> {
        self.pairs
            .iter()
            .flat_map(|p| lint_pair(p, lexicon))
            .collect()
    }
}

/// Parses a homophone file, checking each pair against `lexicon`.
pub fn parse_homophone_base(
    text: &str,
    lexicon: &Lexicon,
) -> Result<HomophoneBase, HomophoneError> {
    let mut base = HomophoneBase::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [keyword, kind, a, b] = fields.as_slice() else {
            return Err(HomophoneError::Syntax {
                line,
                message: format!("expected `pair <homonym|alternate> <a> <b>`, found `{content}`"),
            });
        };
        if *keyword != "pair" {
            return Err(HomophoneError::Syntax {
                line,
                message: format!("expected `pair`, found `{keyword}`"),
            });
        }
        let kind = match *kind {
            "homonym" => PairKind::Homonym,
            "alternate" => PairKind::Alternate,
            other => {
                return Err(HomophoneError::Syntax {
                    line,
                    message: format!("unknown pair kind `{other}`"),
                })
            }
        };
        let id = |s: &str| {
            LexemeId::new(s).map_err(|e| HomophoneError::Syntax {
                line,
                message: e.to_string(),
            })
        };
        let (a, b) = (id(a)?, id(b)?);
        let (Some(ea), Some(eb)) = (lexicon.get(&a), lexicon.get(&b)) else {
            let missing = if lexicon.contains(&a) { b } else { a };
            return Err(HomophoneError::UnknownLexeme { line, id: missing });
        };
        let same_spelling = ea.written_form == eb.written_form;
        let message = match (kind, same_spelling) {
            (PairKind::Homonym, true) => Some("homonyms must differ in spelling"),
            (PairKind::Alternate, false) => Some("alternate meanings must share a spelling"),
            _ => None,
        };
        if let Some(message) = message {
            return Err(HomophoneError::Kind {
                line,
                kind,
                a,
                b,
                message: message.into(),
            });
        }
        base.insert(line, HomophonePair { a, b, kind })?;
    }
    Ok(base)
}

fn shared_values<'a>(x: &'a LexicalEntry, y: &LexicalEntry) -> Vec<(Relation, &'a SlotValue)> {
    x.relations
        .iter()
        .filter(|(rel, v)| y.values(*rel).any(|w| w == v))
        .map(|(rel, v)| (*rel, v))
        .collect()
}

/// Curation rules applied to a homophone pair. All findings are warnings.
///
/// * both members must be nouns or adjectives
/// * neither member may be tagged `abstract yes`
/// * members of an alternate pair must share no semantic slot value
/// * homonyms with identical semantic content are spelling variants
pub fn lint_pair(pair: &HomophonePair, lexicon: &Lexicon) -> Vec<Violation> {
    let subject = format!("{}/{}", pair.a, pair.b);
    let mut out = Vec::new();
    let (Some(a), Some(b)) = (lexicon.get(&pair.a), lexicon.get(&pair.b)) else {
        out.push(Violation::error(
            subject,
            "unknown-lexeme",
            "pair member has no lexicon entry",
        ));
        return out;
    };
    let bad_category: Vec<String> = [a, b]
        .iter()
        .filter(|e| !matches!(e.category, Category::Noun | Category::Adj))
        .map(|e| format!("`{}` is {}", e.lexeme, e.category))
        .collect();
    if !bad_category.is_empty() {
        out.push(Violation::warning(
            subject.clone(),
            "pair-category",
            format!(
                "members must be nouns or adjectives: {}",
                bad_category.join(", ")
            ),
        ));
    }
    for e in [a, b] {
        if e.is_abstract == Some(true) {
            out.push(Violation::warning(
                subject.clone(),
                "pair-abstract",
                format!("`{}` is tagged abstract", e.lexeme),
            ));
        }
    }
    match pair.kind {
        PairKind::Alternate => {
            let shared = shared_values(a, b);
            if !shared.is_empty() {
                let what: Vec<String> = shared
                    .iter()
                    .map(|(rel, v)| match v {
                        SlotValue::Lexeme(id) => format!("{rel} {id}"),
                        SlotValue::Chunk(c) => format!("{rel} \"{c}\""),
                    })
                    .collect();
                out.push(Violation::warning(
                    subject,
                    "pair-not-distinct",
                    format!("alternate meanings share {}", what.join(", ")),
                ));
            }
        }
        PairKind::Homonym => {
            let same = a.category == b.category && !a.relations.is_empty() && {
                let mut x = a.relations.clone();
                let mut y = b.relations.clone();
                x.sort();
                y.sort();
                x == y
            };
            if same {
                out.push(Violation::warning(
                    subject,
                    "pair-spelling-variant",
                    "entries are identical; this looks like a spelling variant",
                ));
            }
        }
    }
    out
}
