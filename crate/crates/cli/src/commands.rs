use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use punforge_core::homophone::parse_homophone_base;
use punforge_core::lexicon::{parse_lexicon, Lexicon};
use punforge_core::pipeline::{explain_rejected, generate, Generation, KnowledgeBase};
use punforge_core::report::{
    aggregate_with_keys, apply_trim, format_mean, names_in, pair_key, parse_ratings,
    parse_trim_rules, Grouping, TrimRules,
};
use punforge_core::schema::{parse_schemata, SHIPPED_SCHEMATA};
use punforge_core::template::{parse_templates, SHIPPED_TEMPLATES};
use punforge_core::violation::Violation;
use punforge_core::{explain as explain_riddle, Schema, Template};
use serde::Serialize;

use crate::config::{generation_config, load_kb, read};
use crate::{Format, GenArgs, ReportArgs};

fn run(args: &GenArgs) -> Result<(KnowledgeBase, Generation)> {
    let kb = load_kb(&args.kb)?;
    let config = generation_config(args)?;
    let generation = generate(&kb, &config)?;
    Ok((kb, generation))
}

#[derive(Serialize)]
struct RejectedLine<'a> {
    rejected: &'a punforge_core::pipeline::Trace,
}

pub fn gen(args: &GenArgs) -> Result<ExitCode> {
    let (kb, generation) = run(args)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for r in &generation.riddles {
        match args.format {
            Format::Text => writeln!(out, "{}", r.surface)?,
            Format::Records => writeln!(out, "{}", serde_json::to_string(&r.record())?)?,
        }
    }
    if args.show_rejected {
        for rej in &generation.rejected {
            let trace = explain_rejected(&kb, rej);
            match args.format {
                Format::Text => write!(out, "\n{}", trace.to_text())?,
                Format::Records => writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&RejectedLine { rejected: &trace })?
                )?,
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn explain(id: usize, args: &GenArgs) -> Result<ExitCode> {
    let (kb, generation) = run(args)?;
    let riddle = generation
        .riddles
        .iter()
        .find(|r| r.index == id)
        .ok_or_else(|| {
            anyhow!(
                "no riddle {id}; this run produced {}",
                generation.riddles.len()
            )
        })?;
    let trace = explain_riddle(&kb, riddle);
    match args.format {
        Format::Text => print!("{}", trace.to_text()),
        Format::Records => println!("{}", serde_json::to_string(&trace)?),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FileKind {
    Lexicon,
    Homophones,
    Schemata,
    Templates,
    Ratings,
}

fn sniff(text: &str) -> FileKind {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next());
    match first {
        Some("lexeme") => FileKind::Lexicon,
        Some("pair") => FileKind::Homophones,
        Some("schema") => FileKind::Schemata,
        Some("template") => FileKind::Templates,
        _ => FileKind::Ratings,
    }
}

struct Findings {
    count: usize,
}

impl Findings {
    fn error(&mut self, path: &Path, msg: impl std::fmt::Display) {
        println!("{}: error: {msg}", path.display());
        self.count += 1;
    }

    fn violations(&mut self, path: &Path, found: &[Violation]) {
        for v in found {
            println!("{}: {v}", path.display());
        }
        self.count += found.len();
    }
}

/// Every parse failure and every lint finding counts once toward the exit code.
pub fn validate(paths: &[PathBuf]) -> Result<ExitCode> {
    let mut files = Vec::new();
    for p in paths {
        let text = read(p)?;
        let kind = sniff(&text);
        files.push((p.as_path(), kind, text));
    }
    let mut f = Findings { count: 0 };
    let mut lexicon: Option<Lexicon> = None;
    let mut schemata: BTreeSet<String> = BTreeSet::new();
    let mut saw_schemata = false;

    // Homophone and template files refer to lexicons and schemata, so those go first.
    for (path, kind, text) in &files {
        match kind {
            FileKind::Lexicon => match parse_lexicon(text) {
                Ok(lex) => {
                    f.violations(path, &lex.validate());
                    lexicon = Some(lex);
                }
                Err(e) => f.error(path, e),
            },
            FileKind::Schemata => {
                saw_schemata = true;
                match parse_schemata(text) {
                    Ok(s) => schemata.extend(s.into_keys()),
                    Err(e) => f.error(path, e),
                }
            }
            _ => {}
        }
    }
    if !saw_schemata {
        let shipped = parse_schemata(SHIPPED_SCHEMATA).expect("built-in schemata parse");
        schemata.extend(shipped.into_keys());
    }
    for (path, kind, text) in &files {
        match kind {
            FileKind::Homophones => match &lexicon {
                None => f.error(
                    path,
                    "a homophone file needs a lexicon file in the same invocation",
                ),
                Some(lex) => match parse_homophone_base(text, lex) {
                    Ok(base) => f.violations(path, &base.lint(lex)),
                    Err(e) => f.error(path, e),
                },
            },
            FileKind::Templates => match parse_templates(text) {
                Ok(ts) => {
                    for t in ts.values() {
                        for s in t.schemata.iter().filter(|s| !schemata.contains(*s)) {
                            f.error(
                                path,
                                format!("template {} lists unknown schema {s}", t.name),
                            );
                        }
                    }
                }
                Err(e) => f.error(path, e),
            },
            FileKind::Ratings => {
                if let Err(e) = parse_ratings(text) {
                    f.error(path, e);
                }
            }
            FileKind::Lexicon | FileKind::Schemata => {}
        }
    }
    println!("{} finding(s)", f.count);
    Ok(ExitCode::from(f.count.min(125) as u8))
}

fn load_schemata(path: &Option<PathBuf>) -> Result<Vec<Schema>> {
    let text = match path {
        Some(p) => read(p)?,
        None => SHIPPED_SCHEMATA.to_string(),
    };
    Ok(parse_schemata(&text)?.into_values().collect())
}

fn load_templates(path: &Option<PathBuf>) -> Result<Vec<Template>> {
    let text = match path {
        Some(p) => read(p)?,
        None => SHIPPED_TEMPLATES.to_string(),
    };
    Ok(parse_templates(&text)?.into_values().collect())
}

/// Row order follows the schema and template files; phrases are sorted.
fn row_keys(
    grouping: Grouping,
    schemata: &[Schema],
    templates: &[Template],
    phrases: &BTreeSet<String>,
) -> Vec<String> {
    match grouping {
        Grouping::Schema => schemata.iter().map(|s| s.name.clone()).collect(),
        Grouping::Template => templates.iter().map(|t| t.name.clone()).collect(),
        Grouping::Pair => schemata
            .iter()
            .flat_map(|s| {
                templates
                    .iter()
                    .filter(|t| t.schemata.contains(&s.name))
                    .map(|t| pair_key(&s.name, &t.name))
            })
            .collect(),
        Grouping::Phrase => phrases.iter().cloned().collect(),
    }
}

pub fn report(args: &ReportArgs) -> Result<ExitCode> {
    let grouping: Grouping = args.by.parse().map_err(|e: String| anyhow!(e))?;
    let records = parse_ratings(&read(&args.ratings)?)
        .with_context(|| format!("parsing {}", args.ratings.display()))?;
    let schemata = load_schemata(&args.schemata)?;
    let templates = load_templates(&args.templates)?;

    let known_s: BTreeSet<String> = schemata.iter().map(|s| s.name.clone()).collect();
    let known_t: BTreeSet<String> = templates.iter().map(|t| t.name.clone()).collect();
    let (used_s, used_t) = names_in(&records);
    if let Some(s) = used_s.difference(&known_s).next() {
        bail!("ratings mention unknown schema {s}");
    }
    if let Some(t) = used_t.difference(&known_t).next() {
        bail!("ratings mention unknown template {t}");
    }

    let rules = match &args.trim {
        Some(p) => {
            Some(parse_trim_rules(&read(p)?).with_context(|| format!("parsing {}", p.display()))?)
        }
        None => None,
    };
    let (records, trim) = match &rules {
        Some(rules) => {
            let outcome = apply_trim(&records, rules, &known_s, &known_t)?;
            let before = format_mean(outcome.before);
            let after = format_mean(outcome.after);
            (outcome.survivors, Some((before, after)))
        }
        None => (records, None),
    };
    let phrases: BTreeSet<String> = records.iter().map(|r| r.phrase.clone()).collect();
    let mut keys = row_keys(grouping, &schemata, &templates, &phrases);
    if let Some(rules) = &rules {
        // Trimmed keys stay out of the table rather than showing as empty rows.
        keys.retain(|k| match grouping {
            Grouping::Schema => !rules.schemata.contains(k),
            Grouping::Template => !rules.templates.contains(k),
            Grouping::Pair => !pair_trimmed(k, rules),
            Grouping::Phrase => true,
        });
    }
    let table = aggregate_with_keys(&records, grouping, &keys);
    print!("{}", table.render());
    if let Some((before, after)) = trim {
        println!();
        println!("mean before trimming: {before}");
        println!("mean after trimming: {after}");
    }
    Ok(ExitCode::SUCCESS)
}

fn pair_trimmed(key: &str, rules: &TrimRules) -> bool {
    let Some((s, t)) = key.split_once(" + ") else {
        return false;
    };
    rules.schemata.contains(s)
        || rules.templates.contains(t)
        || rules.pairs.contains(&(s.to_string(), t.to_string()))
}
