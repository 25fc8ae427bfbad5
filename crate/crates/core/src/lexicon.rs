//! Word categories, numeric POS codes and verb-stem normalization.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::lf::{normalize_case, LfError, LogicalForm};
use crate::seq::Sequence;

const EMBEDDED: &str = include_str!("../data/lexicon.tsv");

/// Number of verb-type slots per word.
pub const VERB_SLOTS: usize = 4;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: unknown category `{category}`")]
    UnknownCategory { line: usize, category: String },
    #[error("line {line}: duplicate word `{word}`")]
    DuplicateWord { line: usize, word: String },
    #[error("lexicon is empty")]
    Empty,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("reading lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}: {source}")]
    BadLogicalForm { row: usize, source: LfError },
}

/// Numeric part-of-speech / verb-type code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum PosCode {
    Filler = 0,
    Det = 1,
    Pp = 2,
    Was = 3,
    By = 4,
    To = 5,
    That = 6,
    CommonNoun = 7,
    ProperNoun = 8,
    VTransOmissible = 9,
    VTransOmissiblePp = 10,
    VTransNotOmissible = 11,
    VTransNotOmissiblePp = 12,
    VCpTaking = 13,
    VInfTaking = 14,
    VUnacc = 15,
    VUnerg = 16,
    VInf = 17,
    VDat = 18,
    VDatPp = 19,
    VUnaccPp = 20,
    VNormalizedInOutput = 21,
}

use PosCode::*;

const ALL: [PosCode; 22] = [
    Filler,
    Det,
    Pp,
    Was,
    By,
    To,
    That,
    CommonNoun,
    ProperNoun,
    VTransOmissible,
    VTransOmissiblePp,
    VTransNotOmissible,
    VTransNotOmissiblePp,
    VCpTaking,
    VInfTaking,
    VUnacc,
    VUnerg,
    VInf,
    VDat,
    VDatPp,
    VUnaccPp,
    VNormalizedInOutput,
];

impl PosCode {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn value(self) -> f64 {
        self as u8 as f64
    }

    pub fn from_code(code: u8) -> Option<PosCode> {
        ALL.get(code as usize).copied()
    }

    pub fn all() -> &'static [PosCode] {
        &ALL
    }

    pub fn name(self) -> &'static str {
        match self {
            Filler => "filler",
            Det => "det",
            Pp => "pp",
            Was => "was",
            By => "by",
            To => "to",
            That => "that",
            CommonNoun => "common_noun",
            ProperNoun => "proper_noun",
            VTransOmissible => "v_trans_omissible",
            VTransOmissiblePp => "v_trans_omissible_pp",
            VTransNotOmissible => "v_trans_not_omissible",
            VTransNotOmissiblePp => "v_trans_not_omissible_pp",
            VCpTaking => "v_cp_taking",
            VInfTaking => "v_inf_taking",
            VUnacc => "v_unacc",
            VUnerg => "v_unerg",
            VInf => "v_inf",
            VDat => "v_dat",
            VDatPp => "v_dat_pp",
            VUnaccPp => "v_unacc_pp",
            VNormalizedInOutput => "v_normalized_in_output",
        }
    }

    /// Parses a category name. Grammar leaf names with a `_p1`..`_p4`
    /// suffix map to their base code; plain decimal codes are accepted too.
    pub fn from_category(name: &str) -> Option<PosCode> {
        if let Ok(n) = name.parse::<u8>() {
            return PosCode::from_code(n).filter(|c| *c != Filler);
        }
        let base = ["_p1", "_p2", "_p3", "_p4"]
            .iter()
            .find_map(|suf| name.strip_suffix(suf))
            .unwrap_or(name);
        ALL[1..].iter().copied().find(|c| c.name() == base)
    }

    pub fn is_verb(self) -> bool {
        (9..=20).contains(&self.code())
    }

    pub fn is_noun(self) -> bool {
        matches!(self, CommonNoun | ProperNoun)
    }
}

impl fmt::Display for PosCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One vocabulary word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub word: String,
    /// Primary code (the first listed category).
    pub pos: PosCode,
    /// Verb-type slots in listed order; unused slots are `Filler`.
    pub vmap: [PosCode; VERB_SLOTS],
    /// Present iff the surface form differs from its logical-form stem.
    pub stem: Option<String>,
}

impl LexEntry {
    /// Every code this word carries.
    pub fn codes(&self) -> impl Iterator<Item = PosCode> + '_ {
        std::iter::once(self.pos)
            .chain(self.vmap.iter().copied())
            .filter(|c| *c != Filler)
    }

    pub fn has(&self, code: PosCode) -> bool {
        self.codes().any(|c| c == code)
    }
}

/// The five embedding sequences for a token list.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub pos: Sequence,
    pub vmap: [Sequence; VERB_SLOTS],
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// 0/1 per position: does any slot carry `code`.
    pub fn has_code(&self, code: PosCode) -> Sequence {
        let c = code.value();
        let n = self.len();
        Sequence::Num(
            (0..n)
                .map(|i| {
                    let hit = self.pos.num(i) == c || self.vmap.iter().any(|v| v.num(i) == c);
                    if hit {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, LexEntry>,
}

impl Lexicon {
    /// The shipped vocabulary.
    pub fn embedded() -> &'static Lexicon {
        static LEX: OnceLock<Lexicon> = OnceLock::new();
        LEX.get_or_init(|| Lexicon::parse(EMBEDDED).expect("embedded lexicon is valid"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        Lexicon::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses `word<TAB>categories<TAB>stem` lines. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(LexiconError::Malformed {
                    line,
                    reason: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
                });
            }
            let word = fields[0].trim().to_lowercase();
            if word.is_empty() || word.contains(char::is_whitespace) {
                return Err(LexiconError::Malformed {
                    line,
                    reason: "empty or multi-token word".into(),
                });
            }
            let mut codes = Vec::new();
            for cat in fields[1]
                .split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
            {
                let code = PosCode::from_category(cat)
                    .filter(|c| *c != VNormalizedInOutput)
                    .ok_or_else(|| LexiconError::UnknownCategory {
                        line,
                        category: cat.to_string(),
                    })?;
                codes.push(code);
            }
            if codes.is_empty() {
                return Err(LexiconError::Malformed {
                    line,
                    reason: "no categories".into(),
                });
            }
            let verbs: Vec<PosCode> = codes.iter().copied().filter(|c| c.is_verb()).collect();
            if verbs.len() > VERB_SLOTS {
                return Err(LexiconError::Malformed {
                    line,
                    reason: format!("{} verb types exceed {VERB_SLOTS} slots", verbs.len()),
                });
            }
            if !verbs.is_empty() && verbs.len() != codes.len() {
                return Err(LexiconError::Malformed {
                    line,
                    reason: "verb and non-verb categories mixed".into(),
                });
            }
            let mut vmap = [Filler; VERB_SLOTS];
            for (slot, code) in verbs.iter().enumerate() {
                vmap[slot] = *code;
            }
            let stem = fields
                .get(2)
                .map(|s| s.trim().to_lowercase())
                .filter(|s| !s.is_empty() && *s != word);
            let entry = LexEntry {
                word: word.clone(),
                pos: codes[0],
                vmap,
                stem,
            };
            if entries.insert(word.clone(), entry).is_some() {
                return Err(LexiconError::DuplicateWord { line, word });
            }
        }
        if entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(Lexicon { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, word: &str) -> Option<&LexEntry> {
        self.entries.get(word)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values()
    }

    /// Words carrying `code` in any slot, in lexical order.
    pub fn words_with(&self, code: PosCode) -> Vec<&str> {
        self.entries
            .values()
            .filter(|e| e.has(code))
            .map(|e| e.word.as_str())
            .collect()
    }

    /// Codes for one token. `.` is the filler token.
    pub fn codes_of(&self, word: &str) -> Result<(PosCode, [PosCode; VERB_SLOTS]), LexiconError> {
        if word == "." {
            return Ok((Filler, [Filler; VERB_SLOTS]));
        }
        let e = self
            .lookup(word)
            .ok_or_else(|| LexiconError::UnknownWord(word.to_string()))?;
        Ok((e.pos, e.vmap))
    }

    pub fn embed<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Embedding, LexiconError> {
        let mut pos = Vec::with_capacity(tokens.len());
        let mut slots: [Vec<f64>; VERB_SLOTS] = Default::default();
        for t in tokens {
            let (p, vm) = self.codes_of(t.as_ref())?;
            pos.push(p.value());
            for (s, c) in slots.iter_mut().zip(vm) {
                s.push(c.value());
            }
        }
        Ok(Embedding {
            pos: Sequence::Num(pos),
            vmap: slots.map(Sequence::Num),
        })
    }

    /// Logical-form stem of a word; unknown words and non-verbs pass through.
    pub fn normalize_nv<'a>(&'a self, word: &'a str) -> &'a str {
        self.lookup(word)
            .and_then(|e| e.stem.as_deref())
            .unwrap_or(word)
    }

    /// Adds or replaces stems for known words.
    pub fn with_stems(mut self, stems: &BTreeMap<String, String>) -> Lexicon {
        for (surface, stem) in stems {
            if let Some(e) = self.entries.get_mut(surface) {
                e.stem = (stem != surface).then(|| stem.clone());
            }
        }
        self
    }

    /// Serializes back to the TSV format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# word\tcategories\tstem\n");
        for e in self.entries.values() {
            let cats: Vec<&str> = if e.pos.is_verb() {
                e.vmap
                    .iter()
                    .filter(|c| **c != Filler)
                    .map(|c| c.name())
                    .collect()
            } else {
                vec![e.pos.name()]
            };
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                e.word,
                cats.join(","),
                e.stem.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

/// Surface-to-stem pairs for verbs, read off (sentence, logical form) pairs.
///
/// A verb is an introduced index that is the left argument of some
/// non-`nmod` relation; its surface form is the sentence token at that index.
pub fn derive_stems<S: AsRef<str>, L: AsRef<str>>(
    rows: &[(S, L)],
) -> Result<BTreeMap<String, String>, LexiconError> {
    let mut out = BTreeMap::new();
    for (row, (sentence, lf)) in rows.iter().enumerate() {
        let tokens: Vec<String> = sentence
            .as_ref()
            .split_whitespace()
            .map(str::to_lowercase)
            .collect();
        let lf = LogicalForm::parse(&normalize_case(lf.as_ref()))
            .map_err(|source| LexiconError::BadLogicalForm { row, source })?;
        for intro in lf.intros() {
            let is_verb = lf
                .atoms()
                .any(|a| !a.relation.is_nmod() && a.left == intro.index);
            if let (true, Some(surface)) = (is_verb, tokens.get(intro.index)) {
                if *surface != intro.label {
                    out.insert(surface.clone(), intro.label.clone());
                }
            }
        }
    }
    Ok(out)
}
