use std::fs;

use anyhow::{bail, Context, Result};
use punforge_core::lexicon::LexemeId;
use punforge_core::pipeline::{GenerationConfig, KnowledgeBase};
use punforge_core::schema::SHIPPED_SCHEMATA;
use punforge_core::score::{Rational, ScoreWeights};
use punforge_core::template::SHIPPED_TEMPLATES;
use serde::Deserialize;

use crate::{GenArgs, KbArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    threshold: Option<Rational>,
    #[serde(default)]
    weights: ScoreWeights,
}

pub fn read(path: &std::path::Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_kb(args: &KbArgs) -> Result<KnowledgeBase> {
    let lexicon = read(&args.lexicon)?;
    let homophones = read(&args.homophones)?;
    let schemata = match &args.schemata {
        Some(p) => read(p)?,
        None => SHIPPED_SCHEMATA.to_string(),
    };
    let templates = match &args.templates {
        Some(p) => read(p)?,
        None => SHIPPED_TEMPLATES.to_string(),
    };
    Ok(KnowledgeBase::from_texts(
        &lexicon,
        &homophones,
        &schemata,
        &templates,
    )?)
}

fn rational(flag: &str, value: &Option<String>) -> Result<Option<Rational>> {
    value
        .as_deref()
        .map(|v| v.parse::<Rational>().with_context(|| format!("--{flag}")))
        .transpose()
}

pub fn generation_config(args: &GenArgs) -> Result<GenerationConfig> {
    let file: ConfigFile = match &args.config {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => ConfigFile::default(),
    };
    let mut weights = file.weights;
    if let Some(w) = rational("w-alliteration", &args.w_alliteration)? {
        weights.alliteration = w;
    }
    if let Some(w) = rational("w-rhyme", &args.w_rhyme)? {
        weights.rhyme = w;
    }
    if let Some(w) = rational("w-funny-letters", &args.w_funny_letters)? {
        weights.funny_letters = w;
    }
    if let Some(w) = rational("w-question-length", &args.w_question_length)? {
        weights.question_length = w;
    }
    if let Some(n) = args.min_question_len {
        weights.min_question_len = n;
    }
    if let Some(n) = args.max_question_len {
        weights.max_question_len = n;
    }
    if weights.min_question_len > weights.max_question_len {
        bail!("minimum question length exceeds the maximum");
    }
    let np = args
        .np
        .as_deref()
        .map(LexemeId::new)
        .transpose()
        .context("--np")?;
    Ok(GenerationConfig {
        np,
        schema: args.schema.clone(),
        template: args.template.clone(),
        seed: args.seed.or(file.seed).unwrap_or(0),
        sample: args.sample,
        max: args.max,
        threshold: rational("threshold", &args.threshold)?.or(file.threshold),
        weights,
    })
}
