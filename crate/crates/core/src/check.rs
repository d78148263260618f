//! Post-production checks that reject a generated candidate.

use serde::Serialize;

use crate::engine::Instantiation;
use crate::homophone::{HomophoneBase, PairKind};
use crate::lexicon::{Binding, Lexicon};
use crate::schema::Schema;
use crate::template::{punchline_lexemes, punchline_tokens};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CheckVerdict {
    pub identity_ok: bool,
    pub sensible_ok: bool,
    pub reasons: Vec<String>,
}

impl CheckVerdict {
    pub fn passed(&self) -> bool {
        self.identity_ok && self.sensible_ok
    }
}

/// Pairs of distinct variables bound to the same value without an identity
/// link between them.
pub fn identity_conflicts(inst: &Instantiation, schema: &Schema) -> Vec<(String, String)> {
    let vars: Vec<(&String, &Binding)> = inst.bindings.iter().collect();
    let mut out = Vec::new();
    for (i, (a, x)) in vars.iter().enumerate() {
        for (b, y) in &vars[i + 1..] {
            if x == y && !schema.identity_linked(a, b) {
                out.push((a.to_string(), b.to_string()));
            }
        }
    }
    out
}

/// True unless two lexemes used to build the riddle are accidentally the
/// same.
pub fn check_identity(inst: &Instantiation, schema: &Schema) -> bool {
    identity_conflicts(inst, schema).is_empty()
}

/// True unless the punchline is an ordinary noun phrase. A punchline that
/// spells a real phrase still passes when it was built by swapping in an
/// alternate meaning of at least one of that phrase's words.
pub fn check_sensible(
    inst: &Instantiation,
    schema: &Schema,
    lexicon: &Lexicon,
    base: &HomophoneBase,
) -> bool {
    let Ok(tokens) = punchline_tokens(schema, inst, lexicon) else {
        return false;
    };
    if !lexicon.is_genuine_np(&tokens) {
        return true;
    }
    let Ok(used) = punchline_lexemes(schema, inst) else {
        return false;
    };
    let (phrase, _) = schema.constituents();
    let comp = inst
        .bindings
        .get(phrase)
        .and_then(Binding::as_single)
        .and_then(|np| lexicon.get(np))
        .and_then(|e| e.comp_lex.as_ref());
    let Some(comp) = comp else {
        return false;
    };
    if comp.len() != used.len() {
        return false;
    }
    let mut swapped = false;
    for (orig, got) in comp.iter().zip(&used) {
        if orig == got {
            continue;
        }
        if base.kind_of(orig, got) == Some(PairKind::Alternate) {
            swapped = true;
        } else {
            return false;
        }
    }
    swapped
}

/// Runs both checks and explains any failure.
pub fn check(
    inst: &Instantiation,
    schema: &Schema,
    lexicon: &Lexicon,
    base: &HomophoneBase,
) -> CheckVerdict {
    let conflicts = identity_conflicts(inst, schema);
    let sensible_ok = check_sensible(inst, schema, lexicon, base);
    let mut reasons: Vec<String> = conflicts
        .iter()
        .map(|(a, b)| {
            format!(
                "identity: {a} and {b} are both bound to {}",
                inst.bindings[a]
            )
        })
        .collect();
    if !sensible_ok {
        let tokens = punchline_tokens(schema, inst, lexicon).unwrap_or_default();
        reasons.push(format!(
            "sensible: punchline \"{}\" is a genuine noun phrase",
            tokens.join(" ")
        ));
    }
    CheckVerdict {
        identity_ok: conflicts.is_empty(),
        sensible_ok,
        reasons,
    }
}
