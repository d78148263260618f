//! The humour-independent lexicon.
//!
//! A lexicon is a finite set of lexemes, each with one entry holding
//! syntactic slots (category, written form, agreement data) and semantic
//! slots that point at other lexemes or carry ready-made text chunks. Taken
//! together the semantic slots form a lexical network that schemata walk
//! over.
//!
//! The on-disk format is a sequence of blank-line separated records:
//!
//! ```text
//! lexeme woolly_jumper
//! category np
//! written_form "woolly jumper"
//! comp_lex woolly jumper_1
//! vowel_start no
//! countable yes
//! class sweater
//! inact_verb wear
//! ```
//!
//! A semantic slot may be repeated; the values are kept in file order and
//! enumeration branches over them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::violation::Violation;

/// Identifier of a single lexeme, e.g. `jumper_1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LexemeId(String);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid {what} `{text}`")]
pub struct InvalidToken {
    pub what: &'static str,
    pub text: String,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\'' || c == '-'
}

impl LexemeId {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidToken> {
        let text = text.into();
        let ok = !text.is_empty()
            && text.chars().all(|c| is_word_char(c) || c == '_')
            && text.chars().any(|c| c.is_ascii_alphanumeric());
        if ok {
            Ok(LexemeId(text))
        } else {
            Err(InvalidToken {
                what: "lexeme id",
                text,
            })
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LexemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LexemeId {
    type Err = InvalidToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LexemeId::new(s)
    }
}

/// A near-surface text fragment: a non-empty list of lowercase word tokens.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Chunk(Vec<String>);

impl Chunk {
    pub fn new<I, S>(tokens: I) -> Result<Self, InvalidToken>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(InvalidToken {
                what: "chunk",
                text: String::new(),
            });
        }
        for tok in &tokens {
            let ok = !tok.is_empty()
                && tok.chars().all(is_word_char)
                && tok.chars().any(|c| c.is_ascii_alphanumeric());
            if !ok {
                return Err(InvalidToken {
                    what: "chunk token",
                    text: tok.clone(),
                });
            }
        }
        Ok(Chunk(tokens))
    }

    /// Splits `text` on whitespace.
    pub fn parse(text: &str) -> Result<Self, InvalidToken> {
        Chunk::new(text.split_whitespace())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.0
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Np,
    Noun,
    Adj,
    Verb,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Np => "np",
            Category::Noun => "noun",
            Category::Adj => "adj",
            Category::Verb => "verb",
        }
    }

    /// Nouns and noun phrases can head a noun phrase.
    pub fn is_nominal(self) -> bool {
        matches!(self, Category::Np | Category::Noun)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = InvalidToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "np" => Ok(Category::Np),
            "noun" => Ok(Category::Noun),
            "adj" => Ok(Category::Adj),
            "verb" => Ok(Category::Verb),
            _ => Err(InvalidToken {
                what: "category",
                text: s.to_string(),
            }),
        }
    }
}

const NP_NOUN: &[Category] = &[Category::Np, Category::Noun];
const NP_NOUN_ADJ: &[Category] = &[Category::Np, Category::Noun, Category::Adj];

/// A semantic slot of a lexical entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Class,
    SpecIs,
    Is,
    Has,
    ActVerb,
    ActObj,
    InactVerb,
    Location,
    UsedTo,
    UsedToObj,
    Synonym,
    DescribesAll,
}

impl Relation {
    pub const ALL: [Relation; 12] = [
        Relation::Class,
        Relation::SpecIs,
        Relation::Is,
        Relation::Has,
        Relation::ActVerb,
        Relation::ActObj,
        Relation::InactVerb,
        Relation::Location,
        Relation::UsedTo,
        Relation::UsedToObj,
        Relation::Synonym,
        Relation::DescribesAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Class => "class",
            Relation::SpecIs => "spec_is",
            Relation::Is => "is",
            Relation::Has => "has",
            Relation::ActVerb => "act_verb",
            Relation::ActObj => "act_obj",
            Relation::InactVerb => "inact_verb",
            Relation::Location => "location",
            Relation::UsedTo => "used_to",
            Relation::UsedToObj => "used_to_obj",
            Relation::Synonym => "synonym",
            Relation::DescribesAll => "describes_all",
        }
    }

    /// Slots whose value is a text chunk rather than a lexeme.
    pub fn takes_chunk(self) -> bool {
        matches!(
            self,
            Relation::Has | Relation::ActObj | Relation::Location | Relation::UsedToObj
        )
    }

    pub fn categories(self) -> &'static [Category] {
        match self {
            Relation::Synonym => NP_NOUN_ADJ,
            Relation::DescribesAll => &[Category::Noun, Category::Adj],
            _ => NP_NOUN,
        }
    }

    fn from_name(name: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A label a characteristic link can be specialised to: either a plain
/// semantic slot or the derived `spec_is_class` pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationLabel {
    Slot(Relation),
    /// `[spec_is value, class value]`, e.g. `[warm, clothing]`.
    SpecIsClass,
}

impl RelationLabel {
    pub fn name(self) -> &'static str {
        match self {
            RelationLabel::Slot(r) => r.name(),
            RelationLabel::SpecIsClass => "spec_is_class",
        }
    }
}

impl Ord for RelationLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name().cmp(other.name())
    }
}

impl PartialOrd for RelationLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RelationLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown relation label `{0}`")]
pub struct UnknownRelation(pub String);

impl FromStr for RelationLabel {
    type Err = UnknownRelation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "spec_is_class" {
            return Ok(RelationLabel::SpecIsClass);
        }
        Relation::from_name(s)
            .map(RelationLabel::Slot)
            .ok_or_else(|| UnknownRelation(s.to_string()))
    }
}

/// Value held by a semantic slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum SlotValue {
    Lexeme(LexemeId),
    Chunk(Chunk),
}

/// What a schema variable is bound to: a sequence of lexemes (almost always
/// of length one) or a text chunk taken from a chunk-valued slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Binding {
    Lexemes(Vec<LexemeId>),
    Chunk(Chunk),
}

impl Binding {
    pub fn lexeme(id: LexemeId) -> Self {
        Binding::Lexemes(vec![id])
    }

    /// The single lexeme of a length-one sequence.
    pub fn as_single(&self) -> Option<&LexemeId> {
        match self {
            Binding::Lexemes(ids) if ids.len() == 1 => Some(&ids[0]),
            _ => None,
        }
    }

    pub fn lexemes(&self) -> &[LexemeId] {
        match self {
            Binding::Lexemes(ids) => ids,
            Binding::Chunk(_) => &[],
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Lexemes(ids) => {
                let names: Vec<&str> = ids.iter().map(LexemeId::as_str).collect();
                write!(f, "{}", names.join(" + "))
            }
            Binding::Chunk(c) => write!(f, "\"{c}\""),
        }
    }
}

impl From<SlotValue> for Binding {
    fn from(v: SlotValue) -> Self {
        match v {
            SlotValue::Lexeme(id) => Binding::lexeme(id),
            SlotValue::Chunk(c) => Binding::Chunk(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LexicalEntry {
    pub lexeme: LexemeId,
    pub category: Category,
    pub written_form: Chunk,
    pub vowel_start: Option<bool>,
    pub second: Option<Chunk>,
    pub third: Option<Chunk>,
    pub comp_lex: Option<Vec<LexemeId>>,
    pub countable: Option<bool>,
    /// Editorial lint tag used by homophone curation.
    pub is_abstract: Option<bool>,
    /// Semantic slots in file order; a relation may repeat.
    pub relations: Vec<(Relation, SlotValue)>,
}

impl LexicalEntry {
    pub fn new(lexeme: LexemeId, category: Category, written_form: Chunk) -> Self {
        LexicalEntry {
            lexeme,
            category,
            written_form,
            vowel_start: None,
            second: None,
            third: None,
            comp_lex: None,
            countable: None,
            is_abstract: None,
            relations: Vec::new(),
        }
    }

    pub fn values(&self, relation: Relation) -> impl Iterator<Item = &SlotValue> + '_ {
        self.relations
            .iter()
            .filter(move |(r, _)| *r == relation)
            .map(|(_, v)| v)
    }

    /// Every lexeme this entry points at, in slot order.
    pub fn referenced_lexemes(&self) -> impl Iterator<Item = &LexemeId> + '_ {
        let comp = self.comp_lex.iter().flatten();
        let sem = self.relations.iter().filter_map(|(_, v)| match v {
            SlotValue::Lexeme(id) => Some(id),
            SlotValue::Chunk(_) => None,
        });
        comp.chain(sem)
    }

    fn syntactic_slots(&self) -> impl Iterator<Item = &'static str> + '_ {
        [
            self.vowel_start.map(|_| "vowel_start"),
            self.second.as_ref().map(|_| "second"),
            self.third.as_ref().map(|_| "third"),
            self.comp_lex.as_ref().map(|_| "comp_lex"),
            self.countable.map(|_| "countable"),
            self.is_abstract.map(|_| "abstract"),
        ]
        .into_iter()
        .flatten()
    }

    /// Renders this entry as one lexicon-file record (no trailing blank line).
    pub fn to_record(&self) -> String {
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        out.push_str(&format!("lexeme {}\n", self.lexeme));
        out.push_str(&format!("category {}\n", self.category));
        out.push_str(&format!("written_form \"{}\"\n", self.written_form));
        if let Some(v) = self.vowel_start {
            out.push_str(&format!("vowel_start {}\n", yes_no(v)));
        }
        if let Some(c) = &self.second {
            out.push_str(&format!("second \"{c}\"\n"));
        }
        if let Some(c) = &self.third {
            out.push_str(&format!("third \"{c}\"\n"));
        }
        if let Some(ids) = &self.comp_lex {
            let names: Vec<&str> = ids.iter().map(LexemeId::as_str).collect();
            out.push_str(&format!("comp_lex {}\n", names.join(" ")));
        }
        if let Some(v) = self.countable {
            out.push_str(&format!("countable {}\n", yes_no(v)));
        }
        if let Some(v) = self.is_abstract {
            out.push_str(&format!("abstract {}\n", yes_no(v)));
        }
        for (rel, value) in &self.relations {
            match value {
                SlotValue::Lexeme(id) => out.push_str(&format!("{rel} {id}\n")),
                SlotValue::Chunk(c) => out.push_str(&format!("{rel} \"{c}\"\n")),
            }
        }
        out
    }
}

fn syntactic_categories(slot: &str) -> &'static [Category] {
    match slot {
        "vowel_start" | "abstract" => NP_NOUN_ADJ,
        "second" | "third" => &[Category::Verb],
        "comp_lex" => &[Category::Np],
        "countable" => NP_NOUN,
        _ => &[Category::Np, Category::Noun, Category::Adj, Category::Verb],
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown slot `{slot}`")]
    UnknownSlot { line: usize, slot: String },
    #[error("line {line}: slot `{slot}` is not used with category {category}")]
    SlotCategory {
        line: usize,
        slot: String,
        category: Category,
    },
    #[error("line {line}: lexeme `{from}` references `{target}`, which has no entry")]
    Dangling {
        line: usize,
        from: LexemeId,
        target: LexemeId,
    },
    #[error("line {line}: duplicate lexeme `{id}`")]
    Duplicate { line: usize, id: LexemeId },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown lexeme `{0}`")]
    UnknownLexeme(LexemeId),
    #[error(transparent)]
    UnknownRelation(#[from] UnknownRelation),
}

/// An immutable, referentially closed lexicon.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<LexemeId, LexicalEntry>,
    np_index: BTreeMap<Chunk, Vec<LexemeId>>,
}

impl Lexicon {
    /// Builds a lexicon from entries, checking uniqueness and referential
    /// closure. Line numbers in errors are entry positions (1-based).
    pub fn from_entries(entries: Vec<LexicalEntry>) -> Result<Self, LexiconError> {
        let lines: Vec<usize> = (1..=entries.len()).collect();
        Lexicon::build(entries, &lines)
    }

    fn build(entries: Vec<LexicalEntry>, lines: &[usize]) -> Result<Self, LexiconError> {
        let mut map = BTreeMap::new();
        let mut order = Vec::with_capacity(entries.len());
        for (entry, &line) in entries.into_iter().zip(lines) {
            if map.contains_key(&entry.lexeme) {
                return Err(LexiconError::Duplicate {
                    line,
                    id: entry.lexeme,
                });
            }
            order.push((entry.lexeme.clone(), line));
            map.insert(entry.lexeme.clone(), entry);
        }
        for (id, line) in &order {
            let entry = &map[id];
            if let Some(target) = entry.referenced_lexemes().find(|t| !map.contains_key(*t)) {
                return Err(LexiconError::Dangling {
                    line: *line,
                    from: id.clone(),
                    target: target.clone(),
                });
            }
        }
        let mut np_index: BTreeMap<Chunk, Vec<LexemeId>> = BTreeMap::new();
        for entry in map.values().filter(|e| e.category == Category::Np) {
            np_index
                .entry(entry.written_form.clone())
                .or_default()
                .push(entry.lexeme.clone());
        }
        Ok(Lexicon {
            entries: map,
            np_index,
        })
    }

    pub fn get(&self, id: &LexemeId) -> Option<&LexicalEntry> {
        self.entries.get(id)
    }

    pub fn contains(&self, id: &LexemeId) -> bool {
        self.entries.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexeme-id order.
    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> + '_ {
        self.entries.values()
    }

    /// Noun-phrase entries in lexeme-id order.
    pub fn noun_phrases(&self) -> impl Iterator<Item = &LexicalEntry> + '_ {
        self.entries.values().filter(|e| e.category == Category::Np)
    }

    /// Written forms of every noun-phrase entry.
    pub fn np_index(&self) -> impl Iterator<Item = &Chunk> + '_ {
        self.np_index.keys()
    }

    /// True iff `tokens` is the written form of some noun-phrase entry.
    pub fn is_genuine_np(&self, tokens: &[String]) -> bool {
        self.np_index.keys().any(|c| c.tokens() == tokens)
    }

    /// The values reachable from `lexeme` through `label`, in slot order.
    ///
    /// `spec_is_class` yields `[spec_is, class]` pairs and is empty unless
    /// both slots are populated.
    pub fn relation_values(
        &self,
        lexeme: &LexemeId,
        label: RelationLabel,
    ) -> Result<Vec<Binding>, QueryError> {
        let entry = self
            .get(lexeme)
            .ok_or_else(|| QueryError::UnknownLexeme(lexeme.clone()))?;
        Ok(match label {
            RelationLabel::Slot(rel) => entry.values(rel).cloned().map(Binding::from).collect(),
            RelationLabel::SpecIsClass => {
                let mut out = Vec::new();
                for spec in entry.values(Relation::SpecIs) {
                    for class in entry.values(Relation::Class) {
                        if let (SlotValue::Lexeme(s), SlotValue::Lexeme(c)) = (spec, class) {
                            out.push(Binding::Lexemes(vec![s.clone(), c.clone()]));
                        }
                    }
                }
                out
            }
        })
    }

    /// Same as [`Lexicon::relation_values`] with the label given by name.
    pub fn relation_values_named(
        &self,
        lexeme: &LexemeId,
        label: &str,
    ) -> Result<Vec<Binding>, QueryError> {
        let label: RelationLabel = label.parse()?;
        self.relation_values(lexeme, label)
    }

    /// All violations and lint warnings across the lexicon.
    pub fn validate(&self) -> Vec<Violation> {
        self.entries()
            .flat_map(|e| validate_entry(e, self))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let records: Vec<String> = self.entries().map(LexicalEntry::to_record).collect();
        records.join("\n")
    }
}

/// Checks one entry against the slot table and the lexicon it lives in.
///
/// Structural problems are reported as errors; missing agreement data on
/// nouns and adjectives and missing verb forms are warnings.
pub fn validate_entry(entry: &LexicalEntry, lexicon: &Lexicon) -> Vec<Violation> {
    let id = entry.lexeme.as_str();
    let mut out = Vec::new();

    for slot in entry.syntactic_slots() {
        if !syntactic_categories(slot).contains(&entry.category) {
            out.push(Violation::error(
                id,
                "slot-category",
                format!("slot `{slot}` is not used with category {}", entry.category),
            ));
        }
    }
    for (rel, value) in &entry.relations {
        if !rel.categories().contains(&entry.category) {
            out.push(Violation::error(
                id,
                "slot-category",
                format!("slot `{rel}` is not used with category {}", entry.category),
            ));
        }
        match (rel.takes_chunk(), value) {
            (true, SlotValue::Lexeme(v)) => out.push(Violation::error(
                id,
                "slot-value",
                format!("slot `{rel}` takes a text chunk, found lexeme `{v}`"),
            )),
            (false, SlotValue::Chunk(c)) => out.push(Violation::error(
                id,
                "slot-value",
                format!("slot `{rel}` takes a lexeme, found chunk \"{c}\""),
            )),
            _ => {}
        }
    }
    for target in entry.referenced_lexemes() {
        if !lexicon.contains(target) {
            out.push(Violation::error(
                id,
                "dangling",
                format!("references `{target}`, which has no entry"),
            ));
        }
    }

    if entry.category == Category::Np {
        match &entry.comp_lex {
            None => out.push(Violation::error(
                id,
                "np-required",
                "np entry lacks comp_lex",
            )),
            Some(parts) if parts.len() < 2 => out.push(Violation::error(
                id,
                "np-required",
                format!(
                    "comp_lex lists {} lexeme(s), at least 2 required",
                    parts.len()
                ),
            )),
            Some(_) => {}
        }
        if entry.countable.is_none() {
            out.push(Violation::error(
                id,
                "np-required",
                "np entry lacks countable",
            ));
        }
        if entry.vowel_start.is_none() {
            out.push(Violation::error(
                id,
                "np-required",
                "np entry lacks vowel_start",
            ));
        }
    } else if matches!(entry.category, Category::Noun | Category::Adj)
        && entry.vowel_start.is_none()
    {
        out.push(Violation::warning(
            id,
            "vowel-start",
            "no vowel_start; determiners cannot be chosen",
        ));
    }
    if entry.category == Category::Verb && (entry.second.is_none() || entry.third.is_none()) {
        out.push(Violation::warning(
            id,
            "verb-forms",
            "verb lacks second- or third-person form",
        ));
    }

    for value in entry.values(Relation::Synonym) {
        let SlotValue::Lexeme(syn) = value else {
            continue;
        };
        let Some(other) = lexicon.get(syn) else {
            continue;
        };
        if other.category != entry.category {
            out.push(Violation::error(
                id,
                "synonym-category",
                format!(
                    "synonym `{syn}` is {}, entry is {}",
                    other.category, entry.category
                ),
            ));
        }
        let back = other
            .values(Relation::Synonym)
            .any(|v| matches!(v, SlotValue::Lexeme(b) if *b == entry.lexeme));
        if !back {
            out.push(Violation::error(
                id,
                "synonym-symmetry",
                format!("synonym `{syn}` does not list `{id}` as its synonym"),
            ));
        }
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Splits a document into records of `(line number, content)` pairs,
/// dropping comments; records are separated by blank lines.
pub(crate) fn records(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let raw_trimmed = raw.trim();
        let line = strip_comment(raw).trim();
        if raw_trimmed.is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.is_empty() {
            // comment-only line; does not end a record
            continue;
        }
        current.push((i + 1, line));
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

pub(crate) fn parse_quoted(line: usize, value: &str) -> Result<Chunk, LexiconError> {
    let inner = value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .filter(|_| value.len() >= 2)
        .ok_or_else(|| LexiconError::Syntax {
            line,
            message: format!("expected a double-quoted chunk, found `{value}`"),
        })?;
    Chunk::parse(inner).map_err(|e| LexiconError::Syntax {
        line,
        message: e.to_string(),
    })
}

fn parse_id(line: usize, value: &str) -> Result<LexemeId, LexiconError> {
    LexemeId::new(value).map_err(|e| LexiconError::Syntax {
        line,
        message: e.to_string(),
    })
}

fn parse_bool(line: usize, value: &str) -> Result<bool, LexiconError> {
    match value {
        "yes" => Ok(true),
        "no" => Ok(false),
        _ => Err(LexiconError::Syntax {
            line,
            message: format!("expected yes or no, found `{value}`"),
        }),
    }
}

fn set_once<T>(
    slot: &mut Option<T>,
    value: T,
    line: usize,
    name: &str,
) -> Result<(), LexiconError> {
    if slot.is_some() {
        return Err(LexiconError::Syntax {
            line,
            message: format!("slot `{name}` given twice"),
        });
    }
    *slot = Some(value);
    Ok(())
}

fn parse_record(record: &[(usize, &str)]) -> Result<LexicalEntry, LexiconError> {
    let (first_line, head) = record[0];
    let id = match head.split_once(char::is_whitespace) {
        Some(("lexeme", rest)) => parse_id(first_line, rest.trim())?,
        _ => {
            return Err(LexiconError::Syntax {
                line: first_line,
                message: format!("record must start with `lexeme <id>`, found `{head}`"),
            })
        }
    };

    let mut category: Option<Category> = None;
    let mut written: Option<Chunk> = None;
    let mut entry = LexicalEntry::new(id, Category::Noun, Chunk(vec!["x".into()]));
    let mut slot_lines: Vec<(usize, String)> = Vec::new();

    for &(line, text) in &record[1..] {
        let (slot, value) = match text.split_once(char::is_whitespace) {
            Some((s, v)) => (s, v.trim()),
            None => {
                return Err(LexiconError::Syntax {
                    line,
                    message: format!("slot `{text}` has no value"),
                })
            }
        };
        match slot {
            "lexeme" => {
                return Err(LexiconError::Syntax {
                    line,
                    message: "`lexeme` inside a record; records must be separated by a blank line"
                        .into(),
                })
            }
            "category" => {
                let c = value
                    .parse()
                    .map_err(|e: InvalidToken| LexiconError::Syntax {
                        line,
                        message: e.to_string(),
                    })?;
                set_once(&mut category, c, line, slot)?;
                continue;
            }
            "written_form" => set_once(&mut written, parse_quoted(line, value)?, line, slot)?,
            "vowel_start" => {
                set_once(&mut entry.vowel_start, parse_bool(line, value)?, line, slot)?
            }
            "countable" => set_once(&mut entry.countable, parse_bool(line, value)?, line, slot)?,
            "abstract" => set_once(&mut entry.is_abstract, parse_bool(line, value)?, line, slot)?,
            "second" => set_once(&mut entry.second, parse_quoted(line, value)?, line, slot)?,
            "third" => set_once(&mut entry.third, parse_quoted(line, value)?, line, slot)?,
            "comp_lex" => {
                let ids = value
                    .split_whitespace()
                    .map(|v| parse_id(line, v))
                    .collect::<Result<Vec<_>, _>>()?;
                set_once(&mut entry.comp_lex, ids, line, slot)?;
            }
            other => {
                let rel = Relation::from_name(other).ok_or_else(|| LexiconError::UnknownSlot {
                    line,
                    slot: other.to_string(),
                })?;
                let v = if rel.takes_chunk() {
                    SlotValue::Chunk(parse_quoted(line, value)?)
                } else {
                    SlotValue::Lexeme(parse_id(line, value)?)
                };
                entry.relations.push((rel, v));
            }
        }
        slot_lines.push((line, slot.to_string()));
    }

    entry.category = category.ok_or_else(|| LexiconError::Syntax {
        line: first_line,
        message: format!("lexeme `{}` has no category", entry.lexeme),
    })?;
    entry.written_form = written.ok_or_else(|| LexiconError::Syntax {
        line: first_line,
        message: format!("lexeme `{}` has no written_form", entry.lexeme),
    })?;

    for (line, slot) in slot_lines {
        let allowed = match Relation::from_name(&slot) {
            Some(rel) => rel.categories(),
            None => syntactic_categories(&slot),
        };
        if !allowed.contains(&entry.category) {
            return Err(LexiconError::SlotCategory {
                line,
                slot,
                category: entry.category,
            });
        }
    }
    Ok(entry)
}

/// Parses a lexicon document.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    for record in records(text) {
        lines.push(record[0].0);
        entries.push(parse_record(&record)?);
    }
    Lexicon::build(entries, &lines)
}

impl FromStr for Lexicon {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_lexicon(s)
    }
}
