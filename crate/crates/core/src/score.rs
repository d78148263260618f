//! Heuristic quality scores. Scores order output; they never reject.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::pipeline::Riddle;
use crate::template::NearSurfaceForm;

/// Letters that read as funny.
pub const FUNNY_LETTERS: [char; 5] = ['k', 'q', 'v', 'w', 'z'];

/// An exact rational written as a decimal (`0.25`), a fraction (`1/4`) or
/// an integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub Rational64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("`{0}` is not a decimal or fraction")]
pub struct InvalidRational(pub String);

impl FromStr for Rational {
    type Err = InvalidRational;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvalidRational(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Rational(Rational64::new(n, d)));
        }
        let (neg, digits) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 12
        {
            return Err(bad());
        }
        let denom = 10i64.pow(frac.len() as u32);
        let whole: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let part: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let numer = whole
            .checked_mul(denom)
            .and_then(|w| w.checked_add(part))
            .ok_or_else(bad)?;
        let r = Rational64::new(numer, denom);
        Ok(Rational(if neg { -r } else { r }))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.0;
        if r.is_integer() {
            write!(f, "{}", r.to_integer())
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())
        }
    }
}

impl Rational {
    pub fn from_integer(n: i64) -> Self {
        Rational(Rational64::from_integer(n))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Rational::from_integer(n)),
            // floats go through their shortest decimal rendering, so 0.1 stays 1/10
            Raw::Float(x) => x.to_string().parse().map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreWeights {
    pub alliteration: Rational,
    pub rhyme: Rational,
    pub funny_letters: Rational,
    pub question_length: Rational,
    pub min_question_len: usize,
    pub max_question_len: usize,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            alliteration: Rational::from_integer(1),
            rhyme: Rational::from_integer(1),
            funny_letters: Rational(Rational64::new(1, 2)),
            question_length: Rational(Rational64::new(1, 4)),
            min_question_len: 6,
            max_question_len: 14,
        }
    }
}

impl ScoreWeights {
    pub fn zero() -> Self {
        ScoreWeights {
            alliteration: Rational::default(),
            rhyme: Rational::default(),
            funny_letters: Rational::default(),
            question_length: Rational::default(),
            ..ScoreWeights::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ScoreRecord {
    pub question_length_penalty: u32,
    pub alliteration: Rational,
    pub rhyme: bool,
    pub funny_letters: u32,
    pub total: Rational,
}

/// Words in the question, not counting the question mark.
pub fn question_length(question: &[String]) -> usize {
    question
        .iter()
        .filter(|t| t.chars().any(|c| c.is_alphanumeric()))
        .count()
}

pub fn length_penalty(len: usize, weights: &ScoreWeights) -> u32 {
    let over = len.saturating_sub(weights.max_question_len);
    let under = weights.min_question_len.saturating_sub(len);
    (over + under) as u32
}

/// Largest share of words starting with the same letter.
pub fn alliteration(words: &[String]) -> Rational {
    let mut counts: BTreeMap<char, i64> = BTreeMap::new();
    for w in words {
        if let Some(c) = w.chars().next() {
            *counts.entry(c).or_default() += 1;
        }
    }
    match counts.values().max() {
        Some(&best) if !words.is_empty() => Rational(Rational64::new(best, words.len() as i64)),
        _ => Rational::default(),
    }
}

/// The last two words end in the same two or more letters.
pub fn rhymes(words: &[String]) -> bool {
    let [.., a, b] = words else {
        return false;
    };
    let common = a
        .chars()
        .rev()
        .zip(b.chars().rev())
        .take_while(|(x, y)| x == y && x.is_alphabetic())
        .count();
    common >= 2
}

pub fn funny_letters(words: &[String]) -> u32 {
    words
        .iter()
        .flat_map(|w| w.chars())
        .filter(|c| FUNNY_LETTERS.contains(c))
        .count() as u32
}

/// Scores a riddle from its question and its punchline words.
pub fn score_parts(
    question: &[String],
    punchline: &[String],
    weights: &ScoreWeights,
) -> ScoreRecord {
    let penalty = length_penalty(question_length(question), weights);
    let allit = alliteration(punchline);
    let rhyme = rhymes(punchline);
    let funny = funny_letters(punchline);
    let w = weights;
    let total = w.alliteration.0 * allit.0
        + if rhyme {
            w.rhyme.0
        } else {
            Rational64::from_integer(0)
        }
        + w.funny_letters.0 * Rational64::from_integer(funny as i64)
        - w.question_length.0 * Rational64::from_integer(penalty as i64);
    ScoreRecord {
        question_length_penalty: penalty,
        alliteration: allit,
        rhyme,
        funny_letters: funny,
        total: Rational(total),
    }
}

/// Scores a near-surface form given the punchline words it ends with.
pub fn score(nsf: &NearSurfaceForm, punchline: &[String], weights: &ScoreWeights) -> ScoreRecord {
    score_parts(&nsf.question, punchline, weights)
}

/// Stable sort by descending total; equal totals keep generation order.
pub fn rank(mut riddles: Vec<Riddle>) -> Vec<Riddle> {
    riddles.sort_by_key(|r| Reverse(r.scores.total));
    riddles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn grizzly_bare_letters() {
        // g-r-i-z-z-l-y b-a-r-e: two z, nothing else from k q v w z
        assert_eq!(funny_letters(&words("grizzly bare")), 2);
    }

    #[test]
    fn alliteration_and_rhyme() {
        assert_eq!(
            alliteration(&words("quirky quantifier")),
            Rational::from_integer(1)
        );
        assert_eq!(
            alliteration(&words("woolly jumper")).0,
            Rational64::new(1, 2)
        );
        assert!(rhymes(&words("battered tattered")));
        assert!(!rhymes(&words("grizzly bare")));
        assert!(!rhymes(&words("alone")));
    }

    #[test]
    fn zero_weights_give_zero() {
        let r = score_parts(&words("a ?"), &words("zzz kkk"), &ScoreWeights::zero());
        assert_eq!(r.total, Rational::default());
    }

    #[test]
    fn question_length_penalty() {
        let w = ScoreWeights::default();
        let q = words("what do you get when you cross a sheep with a kangaroo ?");
        assert_eq!(question_length(&q), 12);
        assert_eq!(length_penalty(12, &w), 0);
        assert_eq!(length_penalty(3, &w), 3);
        assert_eq!(length_penalty(16, &w), 2);
    }

    #[test]
    fn rationals_parse() {
        assert_eq!("0.25".parse::<Rational>().unwrap().0, Rational64::new(1, 4));
        assert_eq!(
            "-1/2".parse::<Rational>().unwrap().0,
            Rational64::new(-1, 2)
        );
        assert_eq!("3".parse::<Rational>().unwrap(), Rational::from_integer(3));
        assert_eq!(".5".parse::<Rational>().unwrap().0, Rational64::new(1, 2));
        assert!("x".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!(".".parse::<Rational>().is_err());
    }
}
