//! Exhaustive reference enumeration, used as a test oracle for the
//! constraint-propagating engine. Exponential; keep lexicons small.

use std::collections::BTreeSet;

use crate::engine::Instantiation;
use crate::homophone::HomophoneBase;
use crate::lexicon::{Binding, Category, LexemeId, Lexicon, Relation, RelationLabel, SlotValue};
use crate::schema::{Link, Schema, VarRole};
use crate::template::Template;

/// Tries every lexeme for every key variable and every candidate value
/// for every characteristic variable, keeping assignments that satisfy all
/// links.
pub fn brute_force_instantiations(
    schema: &Schema,
    template: &Template,
    lexicon: &Lexicon,
    base: &HomophoneBase,
) -> BTreeSet<Instantiation> {
    let mut out = BTreeSet::new();
    if !template.is_compatible(schema) {
        return out;
    }
    let ids: Vec<LexemeId> = lexicon.entries().map(|e| e.lexeme.clone()).collect();
    let key_domain: Vec<Binding> = ids.iter().cloned().map(Binding::lexeme).collect();

    // candidate values for a characteristic variable: any single lexeme,
    // any chunk held anywhere in the lexicon, any ordered pair of lexemes
    let mut char_domain: Vec<Binding> = key_domain.clone();
    let chunks: BTreeSet<Binding> = lexicon
        .entries()
        .flat_map(|e| e.relations.iter())
        .filter_map(|(_, v)| match v {
            SlotValue::Chunk(c) => Some(Binding::Chunk(c.clone())),
            SlotValue::Lexeme(_) => None,
        })
        .collect();
    char_domain.extend(chunks);
    let pair_domain: Vec<(LexemeId, Vec<Binding>)> = ids
        .iter()
        .map(|a| {
            let pairs = ids
                .iter()
                .map(|b| Binding::Lexemes(vec![a.clone(), b.clone()]))
                .collect();
            (a.clone(), pairs)
        })
        .collect();

    let vars: Vec<(&str, VarRole)> = schema
        .variables
        .iter()
        .map(|v| (v.name.as_str(), v.role))
        .collect();
    let slot_of: Vec<Option<usize>> = vars
        .iter()
        .map(|(name, _)| schema.question_slots.iter().position(|q| q == name))
        .collect();

    let mut search = Search {
        schema,
        template,
        lexicon,
        base,
        key_domain: &key_domain,
        char_domain: &char_domain,
        pair_domain: &pair_domain,
        slot_of: &slot_of,
        vars: &vars,
        bindings: vec![None; vars.len()],
        relations: vec![None; vars.len()],
        out: &mut out,
    };
    search.assign(0);
    out
}

struct Search<'a> {
    schema: &'a Schema,
    template: &'a Template,
    lexicon: &'a Lexicon,
    base: &'a HomophoneBase,
    key_domain: &'a [Binding],
    char_domain: &'a [Binding],
    /// Ordered lexeme pairs grouped by first element.
    pair_domain: &'a [(LexemeId, Vec<Binding>)],
    slot_of: &'a [Option<usize>],
    vars: &'a [(&'a str, VarRole)],
    bindings: Vec<Option<&'a Binding>>,
    relations: Vec<Option<RelationLabel>>,
    out: &'a mut BTreeSet<Instantiation>,
}

impl<'a> Search<'a> {
    fn assign(&mut self, depth: usize) {
        let Some(&(_, role)) = self.vars.get(depth) else {
            let named = |i: usize| self.vars[i].0.to_string();
            self.out.insert(Instantiation {
                schema: self.schema.name.clone(),
                template: self.template.name.clone(),
                bindings: (0..self.vars.len())
                    .filter_map(|i| self.bindings[i].map(|b| (named(i), b.clone())))
                    .collect(),
                relations: (0..self.vars.len())
                    .filter_map(|i| self.relations[i].map(|r| (named(i), r)))
                    .collect(),
            });
            return;
        };
        match role {
            VarRole::Key => {
                for value in self.key_domain {
                    self.bindings[depth] = Some(value);
                    if self.consistent(depth) {
                        self.assign(depth + 1);
                    }
                }
            }
            VarRole::Characteristic => {
                let Some(slot) = self.slot_of[depth] else {
                    return;
                };
                let allowed: Vec<RelationLabel> =
                    self.template.slots[slot].allowed.iter().copied().collect();
                for label in allowed {
                    self.relations[depth] = Some(label);
                    for value in self.char_domain {
                        self.try_value(depth, value);
                    }
                    for (first, pairs) in self.pair_domain {
                        if self.pair_may_hold(depth, label, first) {
                            for value in pairs {
                                self.try_value(depth, value);
                            }
                        }
                    }
                }
                self.relations[depth] = None;
            }
        }
        self.bindings[depth] = None;
    }

    fn try_value(&mut self, depth: usize, value: &'a Binding) {
        self.bindings[depth] = Some(value);
        if self.consistent(depth) {
            self.assign(depth + 1);
        }
    }

    /// Whether some pair starting with `first` could satisfy the variable's
    /// characteristic link. Only prunes when the source is already bound.
    fn pair_may_hold(&self, depth: usize, label: RelationLabel, first: &LexemeId) -> bool {
        let var = self.vars[depth].0;
        let source = self.schema.links.iter().find_map(|l| match l {
            Link::Characteristic { target, source } if target == var => Some(source.as_str()),
            _ => None,
        });
        let Some(src) = source.and_then(|s| self.single(s)) else {
            return true;
        };
        match label {
            RelationLabel::Slot(_) => false,
            RelationLabel::SpecIsClass => self.lexicon.get(src).is_some_and(|e| {
                e.relations
                    .iter()
                    .any(|(r, v)| *r == Relation::SpecIs && *v == SlotValue::Lexeme(first.clone()))
            }),
        }
    }

    fn index(&self, name: &str) -> usize {
        self.vars
            .iter()
            .position(|(v, _)| *v == name)
            .expect("declared variable")
    }

    fn get(&self, name: &str) -> Option<&'a Binding> {
        self.bindings[self.index(name)]
    }

    /// Checks every link touching the variable at `depth` whose endpoints are all bound.
    fn consistent(&self, depth: usize) -> bool {
        let var = self.vars[depth].0;
        for link in &self.schema.links {
            let ok = match link {
                Link::Constituents { phrase, parts } => {
                    parts.iter().enumerate().all(|(i, part)| {
                        if var != phrase && var != part {
                            return true;
                        }
                        match (self.single(phrase), self.single(part)) {
                            (Some(np), Some(w)) => self.is_constituent(np, i, parts.len(), w),
                            _ => true,
                        }
                    })
                }
                Link::Homophone(a, b) if var == a || var == b => {
                    match (self.single(a), self.single(b)) {
                        (Some(x), Some(y)) => self
                            .base
                            .pairs()
                            .iter()
                            .any(|p| (p.a == *x && p.b == *y) || (p.a == *y && p.b == *x)),
                        _ => true,
                    }
                }
                Link::Identity(a, b) if var == a || var == b => match (self.get(a), self.get(b)) {
                    (Some(x), Some(y)) => x == y,
                    _ => true,
                },
                Link::Characteristic { target, source } if var == target || var == source => {
                    let label = self.relations[self.index(target)];
                    match (self.get(target), self.single(source), label) {
                        (Some(value), Some(src), Some(label)) => self.related(src, label, value),
                        _ => true,
                    }
                }
                _ => true,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn single(&self, var: &str) -> Option<&'a LexemeId> {
        match self.get(var) {
            Some(Binding::Lexemes(ids)) if ids.len() == 1 => Some(&ids[0]),
            _ => None,
        }
    }
    fn is_constituent(
        &self,
        np: &LexemeId,
        position: usize,
        arity: usize,
        word: &LexemeId,
    ) -> bool {
        let Some(entry) = self.lexicon.get(np) else {
            return false;
        };
        entry.category == Category::Np
            && entry
                .comp_lex
                .as_ref()
                .is_some_and(|c| c.len() == arity && c[position] == *word)
    }

    fn related(&self, source: &LexemeId, label: RelationLabel, value: &Binding) -> bool {
        let Some(entry) = self.lexicon.get(source) else {
            return false;
        };
        let holds = |rel: Relation, want: &Binding| {
            entry.relations.iter().any(|(r, v)| {
                *r == rel
                    && match (v, want) {
                        (SlotValue::Lexeme(id), Binding::Lexemes(ids)) => {
                            ids.len() == 1 && ids[0] == *id
                        }
                        (SlotValue::Chunk(c), Binding::Chunk(w)) => c == w,
                        _ => false,
                    }
            })
        };
        match label {
            RelationLabel::Slot(rel) => holds(rel, value),
            RelationLabel::SpecIsClass => match value {
                Binding::Lexemes(ids) if ids.len() == 2 => {
                    holds(Relation::SpecIs, &Binding::lexeme(ids[0].clone()))
                        && holds(Relation::Class, &Binding::lexeme(ids[1].clone()))
                }
                _ => false,
            },
        }
    }
}
