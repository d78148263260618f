//! End-to-end generation: choose a phrase, fit it into a schema, specialize
//! with a template, realize, check, score and rank.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::check::{check, CheckVerdict};
use crate::engine::{instantiations_for_np, Instantiation};
use crate::homophone::{parse_homophone_base, HomophoneBase, HomophoneError, PairKind};
use crate::lexicon::{parse_lexicon, Binding, LexemeId, Lexicon, LexiconError, RelationLabel};
use crate::schema::{parse_schemata, Link, Provenance, Schema, SchemaError};
use crate::score::{rank, score, Rational, ScoreRecord, ScoreWeights};
use crate::template::{
    fill, parse_templates, punchline_tokens, to_surface, NearSurfaceForm, Template, TemplateError,
};
use crate::violation::Violation;

/// Everything generation reads: lexicon, homophones, schemata, templates.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    pub lexicon: Lexicon,
    pub homophones: HomophoneBase,
    pub schemata: IndexMap<String, Schema>,
    pub templates: IndexMap<String, Template>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("homophones: {0}")]
    Homophones(#[from] HomophoneError),
    #[error("schemata: {0}")]
    Schemata(#[from] SchemaError),
    #[error("templates: {0}")]
    Templates(#[from] TemplateError),
    #[error("template `{template}` lists unknown schema `{schema}`")]
    UnknownSchema { template: String, schema: String },
    #[error("lexicon fails validation:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

impl KnowledgeBase {
    /// Parses all four sources and rejects data with validation errors.
    /// Lint warnings do not block loading.
    pub fn from_texts(
        lexicon: &str,
        homophones: &str,
        schemata: &str,
        templates: &str,
    ) -> Result<Self, LoadError> {
        let lexicon = parse_lexicon(lexicon)?;
        let errors: Vec<Violation> = lexicon
            .validate()
            .into_iter()
            .filter(Violation::is_error)
            .collect();
        if !errors.is_empty() {
            return Err(LoadError::Invalid(errors));
        }
        let homophones = parse_homophone_base(homophones, &lexicon)?;
        let schemata = parse_schemata(schemata)?;
        let templates = parse_templates(templates)?;
        for t in templates.values() {
            if let Some(s) = t.schemata.iter().find(|s| !schemata.contains_key(*s)) {
                return Err(LoadError::UnknownSchema {
                    template: t.name.clone(),
                    schema: s.clone(),
                });
            }
        }
        Ok(KnowledgeBase {
            lexicon,
            homophones,
            schemata,
            templates,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenerationConfig {
    pub np: Option<LexemeId>,
    pub schema: Option<String>,
    pub template: Option<String>,
    pub seed: u64,
    /// Draw `max` riddles (default one) at random instead of listing all.
    pub sample: bool,
    pub max: Option<usize>,
    pub threshold: Option<Rational>,
    pub weights: ScoreWeights,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown noun phrase `{0}`")]
    UnknownNp(LexemeId),
    #[error("`{0}` is not a noun phrase")]
    NotNp(LexemeId),
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("--max must be at least 1")]
    ZeroMax,
}

/// A homophone link as used by one riddle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HomophoneUse {
    pub from: LexemeId,
    pub to: LexemeId,
    pub kind: PairKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProvenanceRecord {
    pub schema: Provenance,
    pub template: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Riddle {
    /// 1-based position in the final output.
    pub index: usize,
    pub np: LexemeId,
    pub instantiation: Instantiation,
    pub nsf: NearSurfaceForm,
    pub surface: String,
    pub punchline: Vec<String>,
    pub verdicts: CheckVerdict,
    pub scores: ScoreRecord,
    pub homophones: Vec<HomophoneUse>,
    pub provenance: ProvenanceRecord,
}

/// Why a candidate did not become a riddle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Rejection {
    Realization {
        error: String,
    },
    Check {
        verdicts: CheckVerdict,
        surface: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejected {
    pub np: LexemeId,
    pub instantiation: Instantiation,
    pub rejection: Rejection,
}

impl Rejected {
    /// Short names of the checks that failed, or `realization`.
    pub fn failed_checks(&self) -> Vec<&'static str> {
        match &self.rejection {
            Rejection::Realization { .. } => vec!["realization"],
            Rejection::Check { verdicts, .. } => {
                let mut out = Vec::new();
                if !verdicts.identity_ok {
                    out.push("check_identity");
                }
                if !verdicts.sensible_ok {
                    out.push("check_sensible");
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generation {
    pub riddles: Vec<Riddle>,
    /// Rejected candidates in generation order.
    pub rejected: Vec<Rejected>,
}

enum Candidate {
    Accepted(Riddle),
    Rejected(Rejected),
}

fn homophone_uses(
    inst: &Instantiation,
    schema: &Schema,
    base: &HomophoneBase,
) -> Vec<HomophoneUse> {
    schema
        .links
        .iter()
        .filter_map(|l| match l {
            Link::Homophone(a, b) => {
                let from = inst.bindings.get(a)?.as_single()?.clone();
                let to = inst.bindings.get(b)?.as_single()?.clone();
                let kind = base.kind_of(&from, &to)?;
                Some(HomophoneUse { from, to, kind })
            }
            _ => None,
        })
        .collect()
}

fn evaluate(
    kb: &KnowledgeBase,
    schema: &Schema,
    template: &Template,
    np: &LexemeId,
    inst: Instantiation,
    weights: &ScoreWeights,
) -> Candidate {
    let realized = fill(template, schema, &inst, &kb.lexicon)
        .and_then(|nsf| Ok((punchline_tokens(schema, &inst, &kb.lexicon)?, nsf)));
    let verdicts = check(&inst, schema, &kb.lexicon, &kb.homophones);
    if !verdicts.passed() {
        let surface = realized.as_ref().ok().map(|(_, nsf)| to_surface(nsf));
        return Candidate::Rejected(Rejected {
            np: np.clone(),
            instantiation: inst,
            rejection: Rejection::Check { verdicts, surface },
        });
    }
    let (punchline, nsf) = match realized {
        Ok(x) => x,
        Err(e) => {
            return Candidate::Rejected(Rejected {
                np: np.clone(),
                instantiation: inst,
                rejection: Rejection::Realization {
                    error: e.to_string(),
                },
            })
        }
    };
    let surface = to_surface(&nsf);
    let scores = score(&nsf, &punchline, weights);
    Candidate::Accepted(Riddle {
        index: 0,
        np: np.clone(),
        homophones: homophone_uses(&inst, schema, &kb.homophones),
        provenance: ProvenanceRecord {
            schema: schema.provenance,
            template: template.provenance,
        },
        instantiation: inst,
        nsf,
        surface,
        punchline,
        verdicts,
        scores,
    })
}

fn sorted<'a, T>(map: &'a IndexMap<String, T>, only: Option<&String>) -> Vec<&'a T> {
    let mut keys: Vec<&String> = map
        .keys()
        .filter(|k| only.is_none_or(|o| o == *k))
        .collect();
    keys.sort();
    keys.into_iter().map(|k| &map[k]).collect()
}

/// Runs generation. Candidates are produced in order of noun phrase id,
/// schema name, template name, homophone choice and relation choice; the
/// result does not depend on how work is spread across threads.
pub fn generate(kb: &KnowledgeBase, config: &GenerationConfig) -> Result<Generation, ConfigError> {
    if let Some(np) = &config.np {
        let e = kb
            .lexicon
            .get(np)
            .ok_or_else(|| ConfigError::UnknownNp(np.clone()))?;
        if e.comp_lex.is_none() {
            return Err(ConfigError::NotNp(np.clone()));
        }
    }
    if let Some(s) = &config.schema {
        if !kb.schemata.contains_key(s) {
            return Err(ConfigError::UnknownSchema(s.clone()));
        }
    }
    if let Some(t) = &config.template {
        if !kb.templates.contains_key(t) {
            return Err(ConfigError::UnknownTemplate(t.clone()));
        }
    }
    if config.max == Some(0) {
        return Err(ConfigError::ZeroMax);
    }

    let nps: Vec<&LexemeId> = kb
        .lexicon
        .noun_phrases()
        .map(|e| &e.lexeme)
        .filter(|id| config.np.as_ref().is_none_or(|n| n == *id))
        .collect();
    let schemata = sorted(&kb.schemata, config.schema.as_ref());
    let templates = sorted(&kb.templates, config.template.as_ref());

    let per_np: Vec<Vec<Candidate>> = nps
        .par_iter()
        .map(|np| {
            let mut out = Vec::new();
            for schema in &schemata {
                for template in templates.iter().filter(|t| t.is_compatible(schema)) {
                    for inst in
                        instantiations_for_np(schema, template, np, &kb.lexicon, &kb.homophones)
                    {
                        out.push(evaluate(kb, schema, template, np, inst, &config.weights));
                    }
                }
            }
            out
        })
        .collect();

    let mut riddles = Vec::new();
    let mut rejected = Vec::new();
    for c in per_np.into_iter().flatten() {
        match c {
            Candidate::Accepted(r) => riddles.push(r),
            Candidate::Rejected(r) => rejected.push(r),
        }
    }

    if let Some(t) = config.threshold {
        riddles.retain(|r| r.scores.total >= t);
    }
    let mut riddles = rank(riddles);
    if config.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let k = config.max.unwrap_or(1).min(riddles.len());
        riddles = riddles.choose_multiple(&mut rng, k).cloned().collect();
    } else if let Some(max) = config.max {
        riddles.truncate(max);
    }
    for (i, r) in riddles.iter_mut().enumerate() {
        r.index = i + 1;
    }
    Ok(Generation { riddles, rejected })
}

/// One output record per riddle.
#[derive(Clone, Debug, Serialize)]
pub struct RiddleRecord<'a> {
    pub index: usize,
    pub surface: &'a str,
    pub question: &'a [String],
    pub answer: &'a [String],
    pub np: &'a LexemeId,
    pub schema: &'a str,
    pub template: &'a str,
    pub relations: &'a BTreeMap<String, RelationLabel>,
    pub bindings: BTreeMap<&'a str, String>,
    pub homophones: &'a [HomophoneUse],
    pub scores: &'a ScoreRecord,
    pub provenance: &'a ProvenanceRecord,
}

impl Riddle {
    pub fn record(&self) -> RiddleRecord<'_> {
        RiddleRecord {
            index: self.index,
            surface: &self.surface,
            question: &self.nsf.question,
            answer: &self.nsf.answer,
            np: &self.np,
            schema: &self.instantiation.schema,
            template: &self.instantiation.template,
            relations: &self.instantiation.relations,
            bindings: self
                .instantiation
                .bindings
                .iter()
                .map(|(k, v)| (k.as_str(), v.to_string()))
                .collect(),
            homophones: &self.homophones,
            scores: &self.scores,
            provenance: &self.provenance,
        }
    }
}

/// One link of a schema and how the bindings satisfy it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkTrace {
    pub link: String,
    pub detail: String,
}

/// Everything needed to see why a candidate came out the way it did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub index: Option<usize>,
    pub surface: Option<String>,
    pub np: LexemeId,
    pub schema: String,
    pub template: String,
    pub provenance: ProvenanceRecord,
    pub bindings: BTreeMap<String, String>,
    pub relations: BTreeMap<String, RelationLabel>,
    pub links: Vec<LinkTrace>,
    pub verdicts: Option<CheckVerdict>,
    pub failed: Vec<&'static str>,
    pub rejection: Option<String>,
    pub scores: Option<ScoreRecord>,
}

fn link_traces(kb: &KnowledgeBase, schema: &Schema, inst: &Instantiation) -> Vec<LinkTrace> {
    let show = |v: &str| {
        inst.bindings
            .get(v)
            .map(Binding::to_string)
            .unwrap_or_else(|| "?".into())
    };
    schema
        .links
        .iter()
        .map(|l| {
            let detail = match l {
                Link::Constituents { phrase, parts } => {
                    let parts: Vec<String> = parts.iter().map(|p| show(p)).collect();
                    format!("{} = {}", show(phrase), parts.join(" + "))
                }
                Link::Homophone(a, b) => {
                    let kind = match (
                        inst.bindings.get(a).and_then(Binding::as_single),
                        inst.bindings.get(b).and_then(Binding::as_single),
                    ) {
                        (Some(x), Some(y)) => kb
                            .homophones
                            .kind_of(x, y)
                            .map(|k| k.name())
                            .unwrap_or("not a pair"),
                        _ => "unbound",
                    };
                    format!("{} ~ {} ({kind})", show(a), show(b))
                }
                Link::Identity(a, b) => format!("{} = {}", show(a), show(b)),
                Link::Characteristic { target, source } => {
                    let rel = inst.relations.get(target).map(|r| r.name()).unwrap_or("?");
                    format!("{} --{rel}--> {}", show(source), show(target))
                }
            };
            LinkTrace {
                link: l.to_string(),
                detail,
            }
        })
        .collect()
}

fn base_trace(kb: &KnowledgeBase, np: &LexemeId, inst: &Instantiation) -> Trace {
    let schema = &kb.schemata[&inst.schema];
    let template = &kb.templates[&inst.template];
    Trace {
        index: None,
        surface: None,
        np: np.clone(),
        schema: inst.schema.clone(),
        template: inst.template.clone(),
        provenance: ProvenanceRecord {
            schema: schema.provenance,
            template: template.provenance,
        },
        bindings: inst
            .bindings
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        relations: inst.relations.clone(),
        links: link_traces(kb, schema, inst),
        verdicts: None,
        failed: Vec::new(),
        rejection: None,
        scores: None,
    }
}

pub fn explain(kb: &KnowledgeBase, riddle: &Riddle) -> Trace {
    Trace {
        index: Some(riddle.index),
        surface: Some(riddle.surface.clone()),
        verdicts: Some(riddle.verdicts.clone()),
        scores: Some(riddle.scores),
        ..base_trace(kb, &riddle.np, &riddle.instantiation)
    }
}

pub fn explain_rejected(kb: &KnowledgeBase, rejected: &Rejected) -> Trace {
    let mut t = base_trace(kb, &rejected.np, &rejected.instantiation);
    t.failed = rejected.failed_checks();
    match &rejected.rejection {
        Rejection::Realization { error } => t.rejection = Some(error.clone()),
        Rejection::Check { verdicts, surface } => {
            t.surface = surface.clone();
            t.rejection = Some(verdicts.reasons.join("; "));
            t.verdicts = Some(verdicts.clone());
        }
    }
    t
}

impl Trace {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.index {
            Some(i) => out.push_str(&format!("riddle {i}\n")),
            None => out.push_str(&format!("rejected ({})\n", self.failed.join(", "))),
        }
        if let Some(s) = &self.surface {
            out.push_str(&format!("  surface: {s}\n"));
        }
        out.push_str(&format!("  np: {}\n", self.np));
        out.push_str(&format!(
            "  schema: {} (provenance={})\n",
            self.schema, self.provenance.schema
        ));
        out.push_str(&format!(
            "  template: {} (provenance={})\n",
            self.template, self.provenance.template
        ));
        out.push_str("  bindings:\n");
        for (k, v) in &self.bindings {
            out.push_str(&format!("    {k} = {v}\n"));
        }
        out.push_str("  relations:\n");
        for (k, v) in &self.relations {
            out.push_str(&format!("    {k}: {v}\n"));
        }
        out.push_str("  links:\n");
        for l in &self.links {
            out.push_str(&format!("    {}: {}\n", l.link, l.detail));
        }
        if let Some(v) = &self.verdicts {
            out.push_str(&format!(
                "  checks: check_identity={} check_sensible={}\n",
                if v.identity_ok { "pass" } else { "FAIL" },
                if v.sensible_ok { "pass" } else { "FAIL" }
            ));
        }
        if let Some(r) = &self.rejection {
            out.push_str(&format!("  reason: {r}\n"));
        }
        if let Some(s) = &self.scores {
            out.push_str(&format!(
                "  scores: total={} alliteration={} rhyme={} funny_letters={} question_length_penalty={}\n",
                s.total, s.alliteration, s.rhyme, s.funny_letters, s.question_length_penalty
            ));
        }
        out
    }
}
