//! Ratings aggregation and trimming.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

/// Judges' scores for one generated joke.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatingRecord {
    pub joke_id: String,
    pub schema: String,
    pub template: String,
    pub phrase: String,
    pub scores: Vec<u8>,
}

impl RatingRecord {
    /// Mean over judges.
    pub fn mean(&self) -> Rational64 {
        let sum: i64 = self.scores.iter().map(|&s| s as i64).sum();
        Rational64::new(sum, self.scores.len() as i64)
    }

    pub fn to_line(&self) -> String {
        let scores: Vec<String> = self.scores.iter().map(u8::to_string).collect();
        format!(
            "{} {} {} {} {}",
            self.joke_id,
            self.schema,
            self.template,
            self.phrase,
            scores.join(",")
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatingsError {
    #[error("line {line}: expected `<joke_id> <schema> <template> <phrase> <score>[,<score>...]`")]
    Syntax { line: usize },
    #[error("line {line}: score `{score}` is not an integer from 0 to 5")]
    Score { line: usize, score: String },
    #[error("line {line}: joke `{id}` listed twice")]
    Duplicate { line: usize, id: String },
}

pub fn parse_ratings(text: &str) -> Result<Vec<RatingRecord>, RatingsError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [id, schema, template, phrase, scores] = fields.as_slice() else {
            return Err(RatingsError::Syntax { line });
        };
        let scores = scores
            .split(',')
            .map(|s| match s.parse::<u8>() {
                Ok(n) if n <= 5 => Ok(n),
                _ => Err(RatingsError::Score {
                    line,
                    score: s.to_string(),
                }),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        if !seen.insert(id.to_string()) {
            return Err(RatingsError::Duplicate {
                line,
                id: id.to_string(),
            });
        }
        out.push(RatingRecord {
            joke_id: id.to_string(),
            schema: schema.to_string(),
            template: template.to_string(),
            phrase: phrase.to_string(),
            scores,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grouping {
    Schema,
    Template,
    Pair,
    Phrase,
}

impl Grouping {
    pub fn key(self, r: &RatingRecord) -> String {
        match self {
            Grouping::Schema => r.schema.clone(),
            Grouping::Template => r.template.clone(),
            Grouping::Pair => pair_key(&r.schema, &r.template),
            Grouping::Phrase => r.phrase.clone(),
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Grouping::Schema => "Schemata",
            Grouping::Template => "Templates",
            Grouping::Pair => "Schema-Template Pairings",
            Grouping::Phrase => "Noun Phrases",
        }
    }
}

impl FromStr for Grouping {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "schema" => Ok(Grouping::Schema),
            "template" => Ok(Grouping::Template),
            "pair" => Ok(Grouping::Pair),
            "phrase" => Ok(Grouping::Phrase),
            _ => Err(format!(
                "unknown grouping `{s}` (expected schema, template, pair or phrase)"
            )),
        }
    }
}

pub fn pair_key(schema: &str, template: &str) -> String {
    format!("{schema} + {template}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub key: String,
    pub count: usize,
    /// Mean over jokes of each joke's mean judge score; absent when empty.
    pub mean: Option<Rational64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportTable {
    pub grouping: Grouping,
    pub rows: Vec<ReportRow>,
    pub total: ReportRow,
}

/// Mean over jokes of per-joke means.
pub fn overall_mean(records: &[RatingRecord]) -> Option<Rational64> {
    if records.is_empty() {
        return None;
    }
    let sum: Rational64 = records.iter().map(RatingRecord::mean).sum();
    Some(sum / Rational64::from_integer(records.len() as i64))
}

/// Groups records by `grouping`. Rows come out in the order of `keys`
/// (which may name groups with no records), followed by any other keys in
/// order of first appearance.
pub fn aggregate_with_keys(
    records: &[RatingRecord],
    grouping: Grouping,
    keys: &[String],
) -> ReportTable {
    let mut groups: BTreeMap<String, Vec<Rational64>> = BTreeMap::new();
    let mut order: Vec<String> = keys.to_vec();
    for r in records {
        let k = grouping.key(r);
        if !groups.contains_key(&k) && !order.contains(&k) {
            order.push(k.clone());
        }
        groups.entry(k).or_default().push(r.mean());
    }
    let mut seen = BTreeSet::new();
    let rows = order
        .into_iter()
        .filter(|k| seen.insert(k.clone()))
        .map(|key| {
            let means = groups.get(&key).map(Vec::as_slice).unwrap_or(&[]);
            let mean = (!means.is_empty()).then(|| {
                means.iter().sum::<Rational64>() / Rational64::from_integer(means.len() as i64)
            });
            ReportRow {
                key,
                count: means.len(),
                mean,
            }
        })
        .collect();
    ReportTable {
        grouping,
        rows,
        total: ReportRow {
            key: "Total".into(),
            count: records.len(),
            mean: overall_mean(records),
        },
    }
}

/// Groups records by `grouping`, rows in order of first appearance.
pub fn aggregate(records: &[RatingRecord], grouping: Grouping) -> ReportTable {
    aggregate_with_keys(records, grouping, &[])
}

/// Rounds half up to one decimal.
pub fn round1(x: Rational64) -> Rational64 {
    let tenths = (x * Rational64::from_integer(10) + Rational64::new(1, 2)).floor();
    tenths / Rational64::from_integer(10)
}

/// One-decimal rendering; an empty group shows `0`.
pub fn format_mean(mean: Option<Rational64>) -> String {
    match mean {
        None => "0".into(),
        Some(m) => {
            let tenths = (round1(m) * Rational64::from_integer(10)).to_integer();
            format!("{}.{}", tenths / 10, tenths % 10)
        }
    }
}

impl ReportTable {
    pub fn row(&self, key: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    /// Aligned text table: aspect, number of jokes, average score.
    pub fn render(&self) -> String {
        let header = ["Aspect", "Number of Jokes", "Average Score"];
        let mut lines: Vec<[String; 3]> = vec![header.map(String::from)];
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            lines.push([r.key.clone(), r.count.to_string(), format_mean(r.mean)]);
        }
        let widths: Vec<usize> = (0..3)
            .map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0))
            .collect();
        let rule = widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  ");
        let mut out = format!("{}\n", self.grouping.title());
        for (i, l) in lines.iter().enumerate() {
            if i == 1 || i == lines.len() - 1 {
                out.push_str(&rule);
                out.push('\n');
            }
            out.push_str(&format!(
                "{:<w0$}  {:>w1$}  {:>w2$}\n",
                l[0],
                l[1],
                l[2],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2]
            ));
        }
        out
    }
}

impl fmt::Display for ReportTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Schemata, templates and schema-template pairs to drop.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrimRules {
    pub schemata: BTreeSet<String>,
    pub templates: BTreeSet<String>,
    pub pairs: BTreeSet<(String, String)>,
}

impl TrimRules {
    pub fn is_empty(&self) -> bool {
        self.schemata.is_empty() && self.templates.is_empty() && self.pairs.is_empty()
    }

    pub fn matches(&self, r: &RatingRecord) -> bool {
        self.schemata.contains(&r.schema)
            || self.templates.contains(&r.template)
            || self.pairs.contains(&(r.schema.clone(), r.template.clone()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrimError {
    #[error(
        "line {line}: expected `schema <name>`, `template <name>` or `pair <schema> <template>`"
    )]
    Syntax { line: usize },
    #[error("trim rule names unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
}

pub fn parse_trim_rules(text: &str) -> Result<TrimRules, TrimError> {
    let mut rules = TrimRules::default();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.as_slice() {
            ["schema", s] => {
                rules.schemata.insert(s.to_string());
            }
            ["template", t] => {
                rules.templates.insert(t.to_string());
            }
            ["pair", s, t] => {
                rules.pairs.insert((s.to_string(), t.to_string()));
            }
            _ => return Err(TrimError::Syntax { line: i + 1 }),
        }
    }
    Ok(rules)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimOutcome {
    pub survivors: Vec<RatingRecord>,
    pub before: Option<Rational64>,
    /// Absent when every record was dropped.
    pub after: Option<Rational64>,
}

/// Drops records matching any rule. Every name in the rules must be a
/// known schema or template.
pub fn apply_trim(
    records: &[RatingRecord],
    rules: &TrimRules,
    known_schemata: &BTreeSet<String>,
    known_templates: &BTreeSet<String>,
) -> Result<TrimOutcome, TrimError> {
    let unknown = |kind, name: &String| TrimError::UnknownName {
        kind,
        name: name.clone(),
    };
    for s in rules
        .schemata
        .iter()
        .chain(rules.pairs.iter().map(|(s, _)| s))
    {
        if !known_schemata.contains(s) {
            return Err(unknown("schema", s));
        }
    }
    for t in rules
        .templates
        .iter()
        .chain(rules.pairs.iter().map(|(_, t)| t))
    {
        if !known_templates.contains(t) {
            return Err(unknown("template", t));
        }
    }
    let survivors: Vec<RatingRecord> = records
        .iter()
        .filter(|r| !rules.matches(r))
        .cloned()
        .collect();
    Ok(TrimOutcome {
        before: overall_mean(records),
        after: overall_mean(&survivors),
        survivors,
    })
}

/// Schema and template names appearing in a set of records.
pub fn names_in(records: &[RatingRecord]) -> (BTreeSet<String>, BTreeSet<String>) {
    (
        records.iter().map(|r| r.schema.clone()).collect(),
        records.iter().map(|r| r.template.clone()).collect(),
    )
}
