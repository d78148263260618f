//! Templates and text realization.
//!
//! A template fixes the relation of every characteristic link and supplies
//! question and answer skeletons. Realization turns bindings into
//! lowercase token fragments (the near-surface form), and [`to_surface`]
//! pretty-prints that into the final riddle text.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::engine::Instantiation;
use crate::lexicon::{Binding, Category, LexemeId, LexicalEntry, Lexicon, RelationLabel};
use crate::schema::{Provenance, Schema};

/// How a slot's binding is rendered inside the question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentRole {
    /// Noun phrase with determiner: `a sheep`, `warm clothing`.
    Entity,
    /// `that can` + infinitive: `that can leap`.
    VerbCan,
    /// `you` + second-person form: `you wear`.
    VerbYou,
    /// A chunk passed through unchanged: `bits`.
    Chunk,
    /// Bare noun, no determiner: `what kind of {pig}`.
    Noun,
    /// Bare infinitive: `what do you use to {ignore}`.
    Verb,
}

impl FragmentRole {
    pub fn name(self) -> &'static str {
        match self {
            FragmentRole::Entity => "entity",
            FragmentRole::VerbCan => "verb_can",
            FragmentRole::VerbYou => "verb_you",
            FragmentRole::Chunk => "chunk",
            FragmentRole::Noun => "noun",
            FragmentRole::Verb => "verb",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "entity" => FragmentRole::Entity,
            "verb_can" => FragmentRole::VerbCan,
            "verb_you" => FragmentRole::VerbYou,
            "chunk" => FragmentRole::Chunk,
            "noun" => FragmentRole::Noun,
            "verb" => FragmentRole::Verb,
            _ => return None,
        })
    }
}

impl fmt::Display for FragmentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSpec {
    pub allowed: BTreeSet<RelationLabel>,
    pub role: FragmentRole,
}

/// One element of a question skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuestionPart {
    Word(String),
    /// Zero-based slot index.
    Slot(usize),
    /// Two slots realized together as a single entity, e.g. `a quirky
    /// quantifier`: the first supplies the modifier, the second the head.
    Joint(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnswerPart {
    Word(String),
    Punchline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub schemata: BTreeSet<String>,
    pub slots: Vec<SlotSpec>,
    pub question: Vec<QuestionPart>,
    pub answer: Vec<AnswerPart>,
    pub provenance: Provenance,
}

impl Template {
    pub fn is_compatible(&self, schema: &Schema) -> bool {
        self.schemata.contains(&schema.name) && self.slots.len() == schema.question_slots.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("template {}\nprovenance {}\n", self.name, self.provenance);
        let schemata: Vec<&str> = self.schemata.iter().map(String::as_str).collect();
        out.push_str(&format!("schemata {}\n", schemata.join(" ")));
        for (i, s) in self.slots.iter().enumerate() {
            let allowed: Vec<&str> = s.allowed.iter().map(|r| r.name()).collect();
            out.push_str(&format!("slot {} allow {}\n", i + 1, allowed.join("|")));
            out.push_str(&format!("slot {} role {}\n", i + 1, s.role));
        }
        let question: Vec<String> = self
            .question
            .iter()
            .map(|p| match p {
                QuestionPart::Word(w) => w.clone(),
                QuestionPart::Slot(i) => format!("{{{}}}", i + 1),
                QuestionPart::Joint(i, j) => format!("{{{}+{}}}", i + 1, j + 1),
            })
            .collect();
        out.push_str(&format!("question \"{}\"\n", question.join(" ")));
        let answer: Vec<String> = self
            .answer
            .iter()
            .map(|p| match p {
                AnswerPart::Word(w) => w.clone(),
                AnswerPart::Punchline => "{punchline}".to_string(),
            })
            .collect();
        out.push_str(&format!("answer \"{}\"\n", answer.join(" ")));
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("template `{template}` (line {line}): question has placeholders for {placeholders} slot(s) but {slots} slot(s) are specified")]
    PlaceholderCount {
        line: usize,
        template: String,
        placeholders: usize,
        slots: usize,
    },
    #[error("template `{template}` (line {line}): {message}")]
    Invalid {
        line: usize,
        template: String,
        message: String,
    },
    #[error("line {line}: template `{name}` defined twice")]
    Duplicate { line: usize, name: String },
}

#[derive(Default)]
struct Draft {
    line: usize,
    name: String,
    schemata: BTreeSet<String>,
    allowed: Vec<Option<BTreeSet<RelationLabel>>>,
    roles: Vec<Option<FragmentRole>>,
    question: Option<Vec<QuestionPart>>,
    answer: Option<Vec<AnswerPart>>,
    provenance: Provenance,
}

impl Draft {
    fn finish(self) -> Result<Template, TemplateError> {
        let invalid = |message: String| TemplateError::Invalid {
            line: self.line,
            template: self.name.clone(),
            message,
        };
        let question = self
            .question
            .clone()
            .ok_or_else(|| invalid("missing question".into()))?;
        let answer = self
            .answer
            .clone()
            .ok_or_else(|| invalid("missing answer".into()))?;
        if self.schemata.is_empty() {
            return Err(invalid("missing schemata list".into()));
        }
        let n = self.allowed.len().max(self.roles.len());
        let mut slots = Vec::with_capacity(n);
        for i in 0..n {
            let allowed = self
                .allowed
                .get(i)
                .cloned()
                .flatten()
                .ok_or_else(|| invalid(format!("slot {} has no allow line", i + 1)))?;
            let role = self
                .roles
                .get(i)
                .copied()
                .flatten()
                .ok_or_else(|| invalid(format!("slot {} has no role line", i + 1)))?;
            slots.push(SlotSpec { allowed, role });
        }

        let mut used = Vec::new();
        for p in &question {
            match p {
                QuestionPart::Slot(i) => used.push(*i),
                QuestionPart::Joint(i, j) => used.extend([*i, *j]),
                QuestionPart::Word(_) => {}
            }
        }
        let distinct: BTreeSet<usize> = used.iter().copied().collect();
        if used.len() != n || distinct.len() != n || distinct.iter().any(|&i| i >= n) {
            return Err(TemplateError::PlaceholderCount {
                line: self.line,
                template: self.name.clone(),
                placeholders: used.len(),
                slots: n,
            });
        }
        for p in &question {
            if let QuestionPart::Joint(i, j) = p {
                if slots[*i].role != FragmentRole::Entity || slots[*j].role != FragmentRole::Entity
                {
                    return Err(invalid("joint placeholders need entity slots".into()));
                }
            }
        }
        if question.last() != Some(&QuestionPart::Word("?".into())) {
            return Err(invalid("question must end with `?`".into()));
        }
        if answer
            .iter()
            .filter(|p| **p == AnswerPart::Punchline)
            .count()
            != 1
        {
            return Err(invalid(
                "answer needs exactly one {punchline} placeholder".into(),
            ));
        }
        Ok(Template {
            name: self.name,
            schemata: self.schemata,
            slots,
            question,
            answer,
            provenance: self.provenance,
        })
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_word(s: &str) -> bool {
    s == "?"
        || (!s.is_empty()
            && s.chars()
                .all(|c| c.is_ascii_lowercase() || c == '\'' || c == '-'))
}

fn slot_index(line: usize, s: &str) -> Result<usize, TemplateError> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n - 1),
        _ => Err(TemplateError::Syntax {
            line,
            message: format!("slot numbers start at 1, found `{s}`"),
        }),
    }
}

fn parse_question(line: usize, text: &str) -> Result<Vec<QuestionPart>, TemplateError> {
    text.split_whitespace()
        .map(|tok| {
            if let Some(inner) = tok.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
                return match inner.split_once('+') {
                    Some((a, b)) => Ok(QuestionPart::Joint(
                        slot_index(line, a)?,
                        slot_index(line, b)?,
                    )),
                    None => Ok(QuestionPart::Slot(slot_index(line, inner)?)),
                };
            }
            if is_word(tok) {
                Ok(QuestionPart::Word(tok.to_string()))
            } else {
                Err(TemplateError::Syntax {
                    line,
                    message: format!(
                        "question token `{tok}` is not a lowercase word or placeholder"
                    ),
                })
            }
        })
        .collect()
}

fn parse_answer(line: usize, text: &str) -> Result<Vec<AnswerPart>, TemplateError> {
    text.split_whitespace()
        .map(|tok| {
            if tok == "{punchline}" {
                Ok(AnswerPart::Punchline)
            } else if is_word(tok) && tok != "?" {
                Ok(AnswerPart::Word(tok.to_string()))
            } else {
                Err(TemplateError::Syntax {
                    line,
                    message: format!(
                        "answer token `{tok}` is not a lowercase word or {{punchline}}"
                    ),
                })
            }
        })
        .collect()
}

fn quoted(line: usize, s: &str) -> Result<&str, TemplateError> {
    s.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .ok_or_else(|| TemplateError::Syntax {
            line,
            message: format!("expected a double-quoted string, found `{s}`"),
        })
}

fn set_slot<T>(v: &mut Vec<Option<T>>, i: usize, value: T) -> bool {
    if v.len() <= i {
        v.resize_with(i + 1, || None);
    }
    v[i].replace(value).is_none()
}

/// Parses a template definitions file. Templates keep their file order.
pub fn parse_templates(text: &str) -> Result<IndexMap<String, Template>, TemplateError> {
    let mut out: IndexMap<String, Template> = IndexMap::new();
    let mut current: Option<Draft> = None;

    let finish =
        |draft: Option<Draft>, out: &mut IndexMap<String, Template>| -> Result<(), TemplateError> {
            if let Some(d) = draft {
                let line = d.line;
                let t = d.finish()?;
                if out.contains_key(&t.name) {
                    return Err(TemplateError::Duplicate { line, name: t.name });
                }
                out.insert(t.name.clone(), t);
            }
            Ok(())
        };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| TemplateError::Syntax { line, message };
        let (keyword, rest) = content.split_once(' ').unwrap_or((content, ""));
        let rest = rest.trim();
        if keyword == "template" {
            finish(current.take(), &mut out)?;
            if !is_name(rest) {
                return Err(syntax(format!("invalid template name `{rest}`")));
            }
            current = Some(Draft {
                line,
                name: rest.to_string(),
                ..Draft::default()
            });
            continue;
        }
        let Some(d) = current.as_mut() else {
            return Err(syntax(format!("`{keyword}` outside a template record")));
        };
        match keyword {
            "schemata" => {
                for s in rest.split_whitespace() {
                    if !is_name(s) {
                        return Err(syntax(format!("invalid schema name `{s}`")));
                    }
                    d.schemata.insert(s.to_string());
                }
            }
            "slot" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    [n, "allow", rels] => {
                        let idx = slot_index(line, n)?;
                        let mut set = BTreeSet::new();
                        for r in rels.split('|') {
                            let label: RelationLabel = r
                                .parse()
                                .map_err(|_| syntax(format!("unknown relation `{r}`")))?;
                            set.insert(label);
                        }
                        if !set_slot(&mut d.allowed, idx, set) {
                            return Err(syntax(format!("slot {n} allow given twice")));
                        }
                    }
                    [n, "role", role] => {
                        let idx = slot_index(line, n)?;
                        let role = FragmentRole::parse(role)
                            .ok_or_else(|| syntax(format!("unknown fragment role `{role}`")))?;
                        if !set_slot(&mut d.roles, idx, role) {
                            return Err(syntax(format!("slot {n} role given twice")));
                        }
                    }
                    _ => return Err(syntax(format!("unrecognised slot line `{content}`"))),
                }
            }
            "question" => d.question = Some(parse_question(line, quoted(line, rest)?)?),
            "answer" => d.answer = Some(parse_answer(line, quoted(line, rest)?)?),
            "provenance" => {
                d.provenance = Provenance::parse(rest).ok_or_else(|| {
                    syntax(format!(
                        "provenance must be paper or extrapolated, found `{rest}`"
                    ))
                })?;
            }
            _ => return Err(syntax(format!("unrecognised template line `{content}`"))),
        }
    }
    finish(current, &mut out)?;
    Ok(out)
}

/// The eleven shipped templates.
pub const SHIPPED_TEMPLATES: &str = include_str!("../../../data/templates.txt");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("empty binding")]
    Empty,
    #[error("unknown lexeme `{0}`")]
    UnknownLexeme(LexemeId),
    #[error("`{lexeme}` is a {category}, but a {role} fragment needs a noun or noun phrase head")]
    NotNominal {
        lexeme: LexemeId,
        category: Category,
        role: FragmentRole,
    },
    #[error("`{lexeme}` is a {category}, but a {role} fragment needs a verb")]
    NotVerb {
        lexeme: LexemeId,
        category: Category,
        role: FragmentRole,
    },
    #[error("`{0}` has no vowel_start, needed to choose a determiner")]
    MissingVowelStart(LexemeId),
    #[error("`{0}` has no countable slot, needed to choose a determiner")]
    MissingCountable(LexemeId),
    #[error("verb `{0}` has no second-person form")]
    MissingVerbForm(LexemeId),
    #[error("a {role} fragment cannot render `{binding}`")]
    WrongBinding { role: FragmentRole, binding: String },
}

fn entry<'a>(lexicon: &'a Lexicon, id: &LexemeId) -> Result<&'a LexicalEntry, RealizeError> {
    lexicon
        .get(id)
        .ok_or_else(|| RealizeError::UnknownLexeme(id.clone()))
}

/// `a`/`an`/nothing for a phrase whose first word comes from `first` and
/// whose head noun is `head`.
fn determiner(
    first: &LexicalEntry,
    head: &LexicalEntry,
    fallback_countable: Option<bool>,
) -> Result<Option<&'static str>, RealizeError> {
    match head.countable.or(fallback_countable) {
        None => Err(RealizeError::MissingCountable(head.lexeme.clone())),
        Some(false) => Ok(None),
        Some(true) => match first.vowel_start {
            None => Err(RealizeError::MissingVowelStart(first.lexeme.clone())),
            Some(true) => Ok(Some("an")),
            Some(false) => Ok(Some("a")),
        },
    }
}

fn entity(
    ids: &[LexemeId],
    lexicon: &Lexicon,
    role: FragmentRole,
) -> Result<Vec<String>, RealizeError> {
    let (first, head) = match (ids.first(), ids.last()) {
        (Some(f), Some(h)) => (entry(lexicon, f)?, entry(lexicon, h)?),
        _ => return Err(RealizeError::Empty),
    };
    if !head.category.is_nominal() {
        return Err(RealizeError::NotNominal {
            lexeme: head.lexeme.clone(),
            category: head.category,
            role,
        });
    }
    let mut out = Vec::new();
    if role == FragmentRole::Entity {
        if let Some(det) = determiner(first, head, None)? {
            out.push(det.to_string());
        }
    }
    for id in ids {
        out.extend(entry(lexicon, id)?.written_form.tokens().iter().cloned());
    }
    Ok(out)
}

fn verb<'a>(
    binding: &Binding,
    lexicon: &'a Lexicon,
    role: FragmentRole,
) -> Result<&'a LexicalEntry, RealizeError> {
    let id = binding
        .as_single()
        .ok_or_else(|| RealizeError::WrongBinding {
            role,
            binding: binding.to_string(),
        })?;
    let e = entry(lexicon, id)?;
    if e.category != Category::Verb {
        return Err(RealizeError::NotVerb {
            lexeme: id.clone(),
            category: e.category,
            role,
        });
    }
    Ok(e)
}

/// Renders one binding as a question fragment.
pub fn realize_fragment(
    binding: &Binding,
    role: FragmentRole,
    lexicon: &Lexicon,
) -> Result<Vec<String>, RealizeError> {
    match (role, binding) {
        (FragmentRole::Chunk, Binding::Chunk(c)) => Ok(c.tokens().to_vec()),
        (FragmentRole::Entity | FragmentRole::Noun, Binding::Lexemes(ids)) => {
            entity(ids, lexicon, role)
        }
        (FragmentRole::VerbCan, b) => {
            let e = verb(b, lexicon, role)?;
            let mut out = vec!["that".to_string(), "can".to_string()];
            out.extend(e.written_form.tokens().iter().cloned());
            Ok(out)
        }
        (FragmentRole::VerbYou, b) => {
            let e = verb(b, lexicon, role)?;
            let form = e
                .second
                .as_ref()
                .ok_or_else(|| RealizeError::MissingVerbForm(e.lexeme.clone()))?;
            let mut out = vec!["you".to_string()];
            out.extend(form.tokens().iter().cloned());
            Ok(out)
        }
        (FragmentRole::Verb, b) => Ok(verb(b, lexicon, role)?.written_form.tokens().to_vec()),
        (_, Binding::Lexemes(ids)) if ids.is_empty() => Err(RealizeError::Empty),
        (role, b) => Err(RealizeError::WrongBinding {
            role,
            binding: b.to_string(),
        }),
    }
}

/// Lowercase question and answer tokens before pretty-printing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NearSurfaceForm {
    pub question: Vec<String>,
    pub answer: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FillError {
    #[error("instantiation is for template `{found}`, not `{expected}`")]
    TemplateMismatch { expected: String, found: String },
    #[error("variable `{0}` is unbound")]
    Unbound(String),
    #[error("slot {slot}: relation `{relation}` is not allowed by the template")]
    RelationNotAllowed {
        slot: usize,
        relation: RelationLabel,
    },
    #[error("slot {slot}: {source}")]
    Slot { slot: usize, source: RealizeError },
    #[error("punchline: {0}")]
    Punchline(RealizeError),
}

/// Lexemes of the punchline, in recipe order.
pub fn punchline_lexemes(
    schema: &Schema,
    inst: &Instantiation,
) -> Result<Vec<LexemeId>, FillError> {
    let mut out = Vec::new();
    for var in &schema.punchline {
        let b = inst
            .bindings
            .get(var)
            .ok_or_else(|| FillError::Unbound(var.clone()))?;
        out.extend(b.lexemes().iter().cloned());
    }
    Ok(out)
}

/// Written-form tokens of the punchline.
pub fn punchline_tokens(
    schema: &Schema,
    inst: &Instantiation,
    lexicon: &Lexicon,
) -> Result<Vec<String>, FillError> {
    let mut out = Vec::new();
    for id in punchline_lexemes(schema, inst)? {
        let e = entry(lexicon, &id).map_err(FillError::Punchline)?;
        out.extend(e.written_form.tokens().iter().cloned());
    }
    Ok(out)
}

fn answer_phrase(
    schema: &Schema,
    inst: &Instantiation,
    lexicon: &Lexicon,
) -> Result<Vec<String>, FillError> {
    let ids = punchline_lexemes(schema, inst)?;
    let (first, head) = match (ids.first(), ids.last()) {
        (Some(f), Some(h)) => (
            entry(lexicon, f).map_err(FillError::Punchline)?,
            entry(lexicon, h).map_err(FillError::Punchline)?,
        ),
        _ => return Err(FillError::Punchline(RealizeError::Empty)),
    };
    let (phrase_var, _) = schema.constituents();
    let np_countable = inst
        .bindings
        .get(phrase_var)
        .and_then(Binding::as_single)
        .and_then(|id| lexicon.get(id))
        .and_then(|e| e.countable);
    let mut out = Vec::new();
    if let Some(det) = determiner(first, head, np_countable).map_err(FillError::Punchline)? {
        out.push(det.to_string());
    }
    out.extend(punchline_tokens(schema, inst, lexicon)?);
    Ok(out)
}

/// Fills the template skeletons from a complete instantiation.
pub fn fill(
    template: &Template,
    schema: &Schema,
    inst: &Instantiation,
    lexicon: &Lexicon,
) -> Result<NearSurfaceForm, FillError> {
    if inst.template != template.name {
        return Err(FillError::TemplateMismatch {
            expected: template.name.clone(),
            found: inst.template.clone(),
        });
    }
    let slot_binding = |i: usize| -> Result<&Binding, FillError> {
        let var = schema
            .question_slots
            .get(i)
            .ok_or_else(|| FillError::Unbound(format!("slot {}", i + 1)))?;
        if let Some(rel) = inst.relations.get(var) {
            if !template.slots[i].allowed.contains(rel) {
                return Err(FillError::RelationNotAllowed {
                    slot: i + 1,
                    relation: *rel,
                });
            }
        }
        inst.bindings
            .get(var)
            .ok_or_else(|| FillError::Unbound(var.clone()))
    };

    let mut question = Vec::new();
    for part in &template.question {
        match part {
            QuestionPart::Word(w) => question.push(w.clone()),
            QuestionPart::Slot(i) => {
                let frag = realize_fragment(slot_binding(*i)?, template.slots[*i].role, lexicon)
                    .map_err(|source| FillError::Slot {
                        slot: i + 1,
                        source,
                    })?;
                question.extend(frag);
            }
            QuestionPart::Joint(i, j) => {
                let mut ids = Vec::new();
                for k in [*i, *j] {
                    match slot_binding(k)? {
                        Binding::Lexemes(l) => ids.extend(l.iter().cloned()),
                        b => {
                            return Err(FillError::Slot {
                                slot: k + 1,
                                source: RealizeError::WrongBinding {
                                    role: FragmentRole::Entity,
                                    binding: b.to_string(),
                                },
                            })
                        }
                    }
                }
                let frag = realize_fragment(&Binding::Lexemes(ids), FragmentRole::Entity, lexicon)
                    .map_err(|source| FillError::Slot {
                        slot: j + 1,
                        source,
                    })?;
                question.extend(frag);
            }
        }
    }

    let mut answer = Vec::new();
    for part in &template.answer {
        match part {
            AnswerPart::Word(w) => answer.push(w.clone()),
            AnswerPart::Punchline => answer.extend(answer_phrase(schema, inst, lexicon)?),
        }
    }
    answer.push(".".to_string());
    Ok(NearSurfaceForm { question, answer })
}

fn finish_sentence(tokens: &[String]) -> String {
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 && tok != "?" && tok != "." {
            out.push(' ');
        }
        if i == 0 {
            let mut chars = tok.chars();
            if let Some(c) = chars.next() {
                out.extend(c.to_uppercase());
                out.push_str(chars.as_str());
            }
        } else {
            out.push_str(tok);
        }
    }
    out
}

/// Pretty-prints a near-surface form: capitalized, punctuation attached.
pub fn to_surface(nsf: &NearSurfaceForm) -> String {
    format!(
        "{} {}",
        finish_sentence(&nsf.question),
        finish_sentence(&nsf.answer)
    )
}

impl NearSurfaceForm {
    /// Builds a form from space-separated token strings.
    pub fn from_text(question: &str, answer: &str) -> Self {
        let split = |s: &str| s.split_whitespace().map(str::to_string).collect();
        NearSurfaceForm {
            question: split(question),
            answer: split(answer),
        }
    }
}
