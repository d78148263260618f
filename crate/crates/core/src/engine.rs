//! Schema instantiation: fit a noun phrase into a schema's key variables,
//! then let a template specialize and bind the characteristic variables.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::homophone::HomophoneBase;
use crate::lexicon::{Binding, Category, LexemeId, Lexicon, RelationLabel};
use crate::schema::{Link, Schema};
use crate::template::Template;

/// A schema with its key variables bound and characteristics still open.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PartialInstantiation {
    pub schema: String,
    pub bindings: BTreeMap<String, Binding>,
}

/// A fully bound schema together with the template that specialized it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Instantiation {
    pub schema: String,
    pub template: String,
    pub bindings: BTreeMap<String, Binding>,
    /// Characteristic variable -> relation chosen for its link.
    pub relations: BTreeMap<String, RelationLabel>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FitError {
    #[error("unknown lexeme `{0}`")]
    UnknownLexeme(LexemeId),
    #[error("`{0}` is not a noun phrase")]
    NotNounPhrase(LexemeId),
    #[error("schema `{schema}` splits a phrase into {expected} words, but `{np}` has {found}")]
    Arity {
        schema: String,
        np: LexemeId,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("template `{template}` cannot be used with schema `{schema}`")]
pub struct Incompatible {
    pub schema: String,
    pub template: String,
}

/// Binds the phrase variable and every key variable of `schema` for the
/// noun phrase `np`. Homophone links branch over the base's candidates,
/// giving one result per consistent choice.
pub fn fit_np(
    schema: &Schema,
    np: &LexemeId,
    lexicon: &Lexicon,
    base: &HomophoneBase,
) -> Result<Vec<PartialInstantiation>, FitError> {
    let entry = lexicon
        .get(np)
        .ok_or_else(|| FitError::UnknownLexeme(np.clone()))?;
    let comp = match (&entry.category, &entry.comp_lex) {
        (Category::Np, Some(comp)) => comp,
        _ => return Err(FitError::NotNounPhrase(np.clone())),
    };
    let (phrase, parts) = schema.constituents();
    if parts.len() != comp.len() {
        return Err(FitError::Arity {
            schema: schema.name.clone(),
            np: np.clone(),
            expected: parts.len(),
            found: comp.len(),
        });
    }

    let mut bindings = BTreeMap::new();
    bindings.insert(phrase.to_string(), Binding::lexeme(np.clone()));
    for (var, id) in parts.iter().zip(comp) {
        match bindings.get(var) {
            Some(b) if *b != Binding::lexeme(id.clone()) => return Ok(Vec::new()),
            _ => {
                bindings.insert(var.clone(), Binding::lexeme(id.clone()));
            }
        }
    }

    let mut out = Vec::new();
    propagate(schema, bindings, base, &mut out);
    Ok(out)
}

fn propagate(
    schema: &Schema,
    bindings: BTreeMap<String, Binding>,
    base: &HomophoneBase,
    out: &mut Vec<PartialInstantiation>,
) {
    for link in &schema.links {
        let (a, b, homophone) = match link {
            Link::Homophone(a, b) => (a, b, true),
            Link::Identity(a, b) => (a, b, false),
            _ => continue,
        };
        let (free, value) = match (bindings.get(a), bindings.get(b)) {
            (Some(x), Some(y)) => {
                let ok = if homophone {
                    match (x.as_single(), y.as_single()) {
                        (Some(x), Some(y)) => base.kind_of(x, y).is_some(),
                        _ => false,
                    }
                } else {
                    x == y
                };
                if ok {
                    continue;
                }
                return;
            }
            (Some(x), None) => (b, x),
            (None, Some(y)) => (a, y),
            (None, None) => continue,
        };
        let candidates: Vec<Binding> = if homophone {
            match value.as_single() {
                Some(id) => base
                    .homophones_of(id)
                    .iter()
                    .map(|(h, _)| Binding::lexeme(h.clone()))
                    .collect(),
                None => Vec::new(),
            }
        } else {
            vec![value.clone()]
        };
        for c in candidates {
            let mut next = bindings.clone();
            next.insert(free.clone(), c);
            propagate(schema, next, base, out);
        }
        return;
    }
    if schema.key_variables().all(|v| bindings.contains_key(v)) {
        out.push(PartialInstantiation {
            schema: schema.name.clone(),
            bindings,
        });
    }
}

/// Specializes every characteristic link with a relation allowed by the
/// template and binds the characteristic variables to that relation's
/// values. Slot 1 varies slowest; within a slot, relations run in name
/// order and values in slot order.
pub fn specialize_and_complete(
    partial: &PartialInstantiation,
    schema: &Schema,
    template: &Template,
    lexicon: &Lexicon,
) -> Result<Vec<Instantiation>, Incompatible> {
    if !template.is_compatible(schema) || partial.schema != schema.name {
        return Err(Incompatible {
            schema: schema.name.clone(),
            template: template.name.clone(),
        });
    }

    // per slot: every (relation, value) choice
    let mut options: Vec<Vec<(RelationLabel, Binding)>> = Vec::new();
    for (var, spec) in schema.question_slots.iter().zip(&template.slots) {
        let source = schema
            .char_source(var)
            .and_then(|s| partial.bindings.get(s))
            .and_then(Binding::as_single);
        let mut choices = Vec::new();
        if let Some(source) = source {
            for label in &spec.allowed {
                for value in lexicon.relation_values(source, *label).unwrap_or_default() {
                    choices.push((*label, value));
                }
            }
        }
        if choices.is_empty() {
            return Ok(Vec::new());
        }
        options.push(choices);
    }

    let mut out = Vec::new();
    let mut index = vec![0usize; options.len()];
    loop {
        let mut inst = Instantiation {
            schema: schema.name.clone(),
            template: template.name.clone(),
            bindings: partial.bindings.clone(),
            relations: BTreeMap::new(),
        };
        for ((var, choices), &i) in schema.question_slots.iter().zip(&options).zip(&index) {
            let (label, value) = &choices[i];
            inst.relations.insert(var.clone(), *label);
            inst.bindings.insert(var.clone(), value.clone());
        }
        out.push(inst);

        // odometer, last slot fastest
        let mut k = index.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            index[k] += 1;
            if index[k] < options[k].len() {
                break;
            }
            index[k] = 0;
        }
    }
}

/// Every instantiation of `schema` under `template` for one noun phrase.
/// Noun phrases whose length does not fit the schema yield nothing.
pub fn instantiations_for_np(
    schema: &Schema,
    template: &Template,
    np: &LexemeId,
    lexicon: &Lexicon,
    base: &HomophoneBase,
) -> Vec<Instantiation> {
    let Ok(partials) = fit_np(schema, np, lexicon, base) else {
        return Vec::new();
    };
    partials
        .iter()
        .flat_map(|p| specialize_and_complete(p, schema, template, lexicon).unwrap_or_default())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homophone::parse_homophone_base;
    use crate::lexicon::parse_lexicon;
    use crate::schema::{parse_schemata, SHIPPED_SCHEMATA};
    use crate::template::{parse_templates, SHIPPED_TEMPLATES};

    const LEX: &str = include_str!("../../../data/fixtures/worked_example/lexicon.txt");
    const HOM: &str = include_str!("../../../data/fixtures/worked_example/homophones.txt");

    fn id(s: &str) -> LexemeId {
        LexemeId::new(s).unwrap()
    }

    fn one(s: &str) -> Binding {
        Binding::lexeme(id(s))
    }

    #[test]
    fn fits_worked_example() {
        let lex = parse_lexicon(LEX).unwrap();
        let base = parse_homophone_base(HOM, &lex).unwrap();
        let schemata = parse_schemata(SHIPPED_SCHEMATA).unwrap();
        let partials = fit_np(&schemata["jumper"], &id("woolly_jumper"), &lex, &base).unwrap();
        assert_eq!(partials.len(), 1);
        let b = &partials[0].bindings;
        assert_eq!(b["NP"], one("woolly_jumper"));
        assert_eq!(b["W1"], one("woolly"));
        assert_eq!(b["W2"], one("jumper_1"));
        assert_eq!(b["H"], one("jumper_2"));
        assert!(!b.contains_key("C1"));

        // woolly has no homophone, so lotus cannot fit
        assert!(
            fit_np(&schemata["lotus"], &id("woolly_jumper"), &lex, &base)
                .unwrap()
                .is_empty()
        );
        assert!(matches!(
            fit_np(&schemata["jumper"], &id("sheep"), &lex, &base),
            Err(FitError::NotNounPhrase(_))
        ));
    }

    #[test]
    fn specializes_worked_example() {
        let lex = parse_lexicon(LEX).unwrap();
        let base = parse_homophone_base(HOM, &lex).unwrap();
        let schemata = parse_schemata(SHIPPED_SCHEMATA).unwrap();
        let templates = parse_templates(SHIPPED_TEMPLATES).unwrap();
        let jumper = &schemata["jumper"];
        let partial = &fit_np(jumper, &id("woolly_jumper"), &lex, &base).unwrap()[0];

        let syn_syn =
            specialize_and_complete(partial, jumper, &templates["syn_syn"], &lex).unwrap();
        let describes_all: RelationLabel = "describes_all".parse().unwrap();
        assert!(syn_syn.iter().any(|i| i.bindings["C1"] == one("sheep")
            && i.bindings["C2"] == one("kangaroo")
            && i.relations["C1"] == describes_all
            && i.relations["C2"] == describes_all));

        let syn_verb =
            specialize_and_complete(partial, jumper, &templates["syn_verb"], &lex).unwrap();
        assert!(syn_verb
            .iter()
            .any(|i| i.bindings["C1"] == one("sheep") && i.bindings["C2"] == one("leap")));

        assert!(
            specialize_and_complete(partial, jumper, &templates["syn_syn"], &lex)
                .unwrap()
                .iter()
                .all(|i| i.relations.len() == 2)
        );
        let ginger = &schemata["ginger"];
        assert!(specialize_and_complete(partial, ginger, &templates["syn_syn"], &lex).is_err());
    }
}
