//! Schemata: variable graphs whose links say which lexemes may combine
//! into a pun.
//!
//! A schema file holds one record per schema:
//!
//! ```text
//! schema jumper
//! provenance paper
//! var NP key
//! var W1 key
//! var W2 key
//! var H key
//! var C1 char
//! var C2 char
//! constituents NP -> W1 W2
//! link homophone W2 H
//! char C1 from W1
//! char C2 from H
//! punchline W1 H
//! question_slots C1 C2
//! ```
//!
//! Key variables are bound from the noun phrase through constituents,
//! homophone and identity links. Characteristic variables hang off a key
//! variable by exactly one characteristic link, whose relation is left open
//! until a template is chosen.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarRole {
    Key,
    #[serde(rename = "char")]
    Characteristic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub role: VarRole,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Link {
    /// The phrase variable's `comp_lex`, in order.
    Constituents {
        phrase: String,
        parts: Vec<String>,
    },
    Homophone(String, String),
    Identity(String, String),
    /// Characteristic variable `target` is related to key variable `source`.
    Characteristic {
        target: String,
        source: String,
    },
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::Constituents { phrase, parts } => {
                write!(f, "constituents {phrase} -> {}", parts.join(" "))
            }
            Link::Homophone(a, b) => write!(f, "link homophone {a} {b}"),
            Link::Identity(a, b) => write!(f, "link identity {a} {b}"),
            Link::Characteristic { target, source } => write!(f, "char {target} from {source}"),
        }
    }
}

/// Whether a definition is anchored in a published description or was
/// reconstructed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Paper,
    Extrapolated,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Paper => "paper",
            Provenance::Extrapolated => "extrapolated",
        }
    }

    pub(crate) fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(Provenance::Paper),
            "extrapolated" => Some(Provenance::Extrapolated),
            _ => None,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub variables: Vec<Variable>,
    pub links: Vec<Link>,
    pub punchline: Vec<String>,
    pub question_slots: Vec<String>,
    pub provenance: Provenance,
}

impl Schema {
    pub fn role(&self, var: &str) -> Option<VarRole> {
        self.variables
            .iter()
            .find(|v| v.name == var)
            .map(|v| v.role)
    }

    pub fn key_variables(&self) -> impl Iterator<Item = &str> + '_ {
        self.variables
            .iter()
            .filter(|v| v.role == VarRole::Key)
            .map(|v| v.name.as_str())
    }

    /// The constituents link: `(phrase variable, part variables)`.
    pub fn constituents(&self) -> (&str, &[String]) {
        self.links
            .iter()
            .find_map(|l| match l {
                Link::Constituents { phrase, parts } => Some((phrase.as_str(), parts.as_slice())),
                _ => None,
            })
            .expect("validated schema has a constituents link")
    }

    /// Key variable a characteristic variable is related to.
    pub fn char_source(&self, var: &str) -> Option<&str> {
        self.links.iter().find_map(|l| match l {
            Link::Characteristic { target, source } if target == var => Some(source.as_str()),
            _ => None,
        })
    }

    /// True if an identity link joins `a` and `b` (in either direction).
    pub fn identity_linked(&self, a: &str, b: &str) -> bool {
        self.links.iter().any(|l| match l {
            Link::Identity(x, y) => (x == a && y == b) || (x == b && y == a),
            _ => false,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("schema {}\nprovenance {}\n", self.name, self.provenance);
        for v in &self.variables {
            let role = match v.role {
                VarRole::Key => "key",
                VarRole::Characteristic => "char",
            };
            out.push_str(&format!("var {} {role}\n", v.name));
        }
        for l in &self.links {
            out.push_str(&format!("{l}\n"));
        }
        out.push_str(&format!("punchline {}\n", self.punchline.join(" ")));
        out.push_str(&format!(
            "question_slots {}\n",
            self.question_slots.join(" ")
        ));
        out
    }

    fn validate(&self, line: usize) -> Result<(), SchemaError> {
        let err = |message: String| SchemaError::Invalid {
            line,
            schema: self.name.clone(),
            message,
        };
        let dangling = |var: &str| SchemaError::DanglingVariable {
            line,
            schema: self.name.clone(),
            var: var.to_string(),
        };
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                return Err(err(format!("variable `{}` declared twice", v.name)));
            }
        }

        let mut constituents = 0;
        let mut char_links: BTreeMap<&str, usize> = BTreeMap::new();
        for link in &self.links {
            match link {
                Link::Constituents { phrase, parts } => {
                    constituents += 1;
                    for v in std::iter::once(phrase).chain(parts) {
                        match self.role(v) {
                            None => return Err(dangling(v)),
                            Some(VarRole::Characteristic) => {
                                return Err(err(format!(
                                    "constituents link uses characteristic variable `{v}`"
                                )))
                            }
                            Some(VarRole::Key) => {}
                        }
                    }
                    if parts.is_empty() {
                        return Err(err("constituents link lists no parts".into()));
                    }
                }
                Link::Homophone(a, b) | Link::Identity(a, b) => {
                    for v in [a, b] {
                        match self.role(v) {
                            None => return Err(dangling(v)),
                            Some(VarRole::Characteristic) => {
                                return Err(err(format!(
                                    "`{link}` must join key variables; `{v}` is characteristic"
                                )))
                            }
                            Some(VarRole::Key) => {}
                        }
                    }
                    if a == b {
                        return Err(err(format!("`{link}` joins a variable to itself")));
                    }
                }
                Link::Characteristic { target, source } => {
                    match self.role(target) {
                        None => return Err(dangling(target)),
                        Some(VarRole::Key) => {
                            return Err(err(format!(
                                "characteristic link target `{target}` is a key variable"
                            )))
                        }
                        Some(VarRole::Characteristic) => {}
                    }
                    match self.role(source) {
                        None => return Err(dangling(source)),
                        Some(VarRole::Characteristic) => {
                            return Err(err(format!(
                                "characteristic link source `{source}` must be a key variable"
                            )))
                        }
                        Some(VarRole::Key) => {}
                    }
                    *char_links.entry(target.as_str()).or_default() += 1;
                }
            }
        }
        if constituents != 1 {
            return Err(err(format!(
                "expected exactly one constituents link, found {constituents}"
            )));
        }
        for v in self
            .variables
            .iter()
            .filter(|v| v.role == VarRole::Characteristic)
        {
            let count = char_links.get(v.name.as_str()).copied().unwrap_or(0);
            if count != 1 {
                return Err(SchemaError::CharacteristicLinks {
                    line,
                    schema: self.name.clone(),
                    var: v.name.clone(),
                    count,
                });
            }
        }

        if self.punchline.is_empty() {
            return Err(err("punchline lists no variables".into()));
        }
        for v in &self.punchline {
            match self.role(v) {
                None => return Err(dangling(v)),
                Some(VarRole::Characteristic) => {
                    return Err(err(format!(
                        "punchline variable `{v}` must be a key variable"
                    )))
                }
                Some(VarRole::Key) => {}
            }
        }
        let mut slots = BTreeSet::new();
        for v in &self.question_slots {
            match self.role(v) {
                None => return Err(dangling(v)),
                Some(VarRole::Key) => {
                    return Err(err(format!("question slot `{v}` is a key variable")))
                }
                Some(VarRole::Characteristic) => {}
            }
            if !slots.insert(v.as_str()) {
                return Err(err(format!("question slot `{v}` listed twice")));
            }
        }
        if let Some(v) = self
            .variables
            .iter()
            .find(|v| v.role == VarRole::Characteristic && !slots.contains(v.name.as_str()))
        {
            return Err(err(format!(
                "characteristic variable `{}` is not a question slot",
                v.name
            )));
        }

        // every key variable must be reachable from the phrase variable
        let (phrase, _) = self.constituents();
        let mut reached: BTreeSet<&str> = BTreeSet::from([phrase]);
        loop {
            let before = reached.len();
            for link in &self.links {
                let ends: Vec<&str> = match link {
                    Link::Constituents { phrase, parts } => std::iter::once(phrase)
                        .chain(parts)
                        .map(String::as_str)
                        .collect(),
                    Link::Homophone(a, b) | Link::Identity(a, b) => vec![a.as_str(), b.as_str()],
                    Link::Characteristic { .. } => continue,
                };
                if ends.iter().any(|e| reached.contains(e)) {
                    reached.extend(ends);
                }
            }
            if reached.len() == before {
                break;
            }
        }
        if let Some(v) = self.key_variables().find(|v| !reached.contains(v)) {
            return Err(err(format!(
                "key variable `{v}` is not reachable from `{phrase}`"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("schema `{schema}` (line {line}): undeclared variable `{var}`")]
    DanglingVariable {
        line: usize,
        schema: String,
        var: String,
    },
    #[error("schema `{schema}` (line {line}): characteristic variable `{var}` has {count} characteristic links, expected 1")]
    CharacteristicLinks {
        line: usize,
        schema: String,
        var: String,
        count: usize,
    },
    #[error("schema `{schema}` (line {line}): {message}")]
    Invalid {
        line: usize,
        schema: String,
        message: String,
    },
    #[error("line {line}: schema `{name}` defined twice")]
    Duplicate { line: usize, name: String },
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a schema definitions file. Schemata keep their file order.
pub fn parse_schemata(text: &str) -> Result<IndexMap<String, Schema>, SchemaError> {
    let mut out: IndexMap<String, Schema> = IndexMap::new();
    let mut current: Option<(usize, Schema)> = None;

    let finish = |current: Option<(usize, Schema)>,
                  out: &mut IndexMap<String, Schema>|
     -> Result<(), SchemaError> {
        if let Some((line, schema)) = current {
            schema.validate(line)?;
            if out.contains_key(&schema.name) {
                return Err(SchemaError::Duplicate {
                    line,
                    name: schema.name,
                });
            }
            out.insert(schema.name.clone(), schema);
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| SchemaError::Syntax { line, message };
        let names = |fs: &[&str]| -> Result<Vec<String>, SchemaError> {
            fs.iter()
                .map(|f| {
                    if is_name(f) {
                        Ok(f.to_string())
                    } else {
                        Err(SchemaError::Syntax {
                            line,
                            message: format!("invalid variable name `{f}`"),
                        })
                    }
                })
                .collect()
        };

        if fields[0] == "schema" {
            finish(current.take(), &mut out)?;
            let [_, name] = fields.as_slice() else {
                return Err(syntax("expected `schema <name>`".into()));
            };
            if !is_name(name) {
                return Err(syntax(format!("invalid schema name `{name}`")));
            }
            current = Some((
                line,
                Schema {
                    name: name.to_string(),
                    variables: Vec::new(),
                    links: Vec::new(),
                    punchline: Vec::new(),
                    question_slots: Vec::new(),
                    provenance: Provenance::Paper,
                },
            ));
            continue;
        }
        let Some((_, schema)) = current.as_mut() else {
            return Err(syntax(format!("`{}` outside a schema record", fields[0])));
        };
        match fields.as_slice() {
            ["var", name, role] => {
                let role = match *role {
                    "key" => VarRole::Key,
                    "char" => VarRole::Characteristic,
                    other => {
                        return Err(syntax(format!(
                            "variable role must be key or char, found `{other}`"
                        )))
                    }
                };
                let name = names(&[name])?.remove(0);
                schema.variables.push(Variable { name, role });
            }
            ["constituents", phrase, "->", parts @ ..] => {
                schema.links.push(Link::Constituents {
                    phrase: names(&[phrase])?.remove(0),
                    parts: names(parts)?,
                });
            }
            ["link", "homophone", a, b] => {
                let v = names(&[a, b])?;
                schema
                    .links
                    .push(Link::Homophone(v[0].clone(), v[1].clone()));
            }
            ["link", "identity", a, b] => {
                let v = names(&[a, b])?;
                schema
                    .links
                    .push(Link::Identity(v[0].clone(), v[1].clone()));
            }
            ["char", target, "from", source] => {
                let v = names(&[target, source])?;
                schema.links.push(Link::Characteristic {
                    target: v[0].clone(),
                    source: v[1].clone(),
                });
            }
            ["punchline", vars @ ..] => schema.punchline = names(vars)?,
            ["question_slots", vars @ ..] => schema.question_slots = names(vars)?,
            ["provenance", p] => {
                schema.provenance = Provenance::parse(p).ok_or_else(|| {
                    syntax(format!(
                        "provenance must be paper or extrapolated, found `{p}`"
                    ))
                })?;
            }
            _ => return Err(syntax(format!("unrecognised schema line `{content}`"))),
        }
    }
    finish(current, &mut out)?;
    Ok(out)
}

/// The six shipped schemata.
pub const SHIPPED_SCHEMATA: &str = include_str!("../../../data/schemata.txt");
