//! The COGS input grammar and the tools built on it: a chart parser,
//! expansion coverage, a sentence fuzzer, a tree-walking logical-form
//! oracle, attraction-error analysis and the v_dat_p2 augmentation.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use thiserror::Error;

use crate::lexicon::PosCode;

pub mod analysis;
pub mod augment;
pub mod coverage;
pub mod fuzz;
pub mod oracle;
pub mod parser;

pub use analysis::{
    classify_error, get_agent_side, get_verbs, predict_attraction_error, AgentSide, AnalysisError,
    ErrorDescriptor, VerbLeaf,
};
pub use augment::{augment_v_dat_p2, SkipReason, AUGMENT_CATEGORY};
pub use coverage::{
    coverage, coverage_curve, expansion_keys, key_sets, max_expansion_coverage, CoverageError,
    CoverageReport, CurveStats,
};
pub use fuzz::{FuzzCase, FuzzConfig, FuzzError, Fuzzer, MAX_DEPTH};
pub use oracle::{lf_oracle, OracleError};
pub use parser::{parse_sentence, parse_tokens};

const COGS: &str = include_str!("../../data/cogs_grammar.txt");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("symbol `{0}` is used but never defined")]
    Undefined(String),
    #[error("grammar has no rules")]
    Empty,
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("no parse for `{sentence}` (stuck at token {stuck})")]
    NoParse { sentence: String, stuck: usize },
    #[error("empty sentence")]
    EmptySentence,
}

/// A context-free grammar with lexical categories as leaf symbols.
///
/// Nonterminals keep their listed order, and so do their alternatives.
#[derive(Debug, Clone)]
pub struct Grammar {
    names: Vec<String>,
    alternatives: Vec<Vec<Vec<usize>>>,
    ids: HashMap<String, usize>,
}

impl Grammar {
    /// The shipped COGS grammar.
    pub fn cogs() -> &'static Grammar {
        static G: OnceLock<Grammar> = OnceLock::new();
        G.get_or_init(|| Grammar::parse(COGS).expect("embedded grammar is valid"))
    }

    /// Reads `<lhs> ::= <a> <b> | <c>` lines; the first rule's left side is
    /// the start symbol.
    pub fn parse(text: &str) -> Result<Grammar, GrammarError> {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut raw: Vec<(usize, Vec<Vec<String>>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("::=")
                .ok_or_else(|| GrammarError::Malformed {
                    line: line_no,
                    reason: "missing `::=`".into(),
                })?;
            let lhs = symbol(lhs.trim(), line_no)?;
            if ids.contains_key(&lhs) {
                return Err(GrammarError::Malformed {
                    line: line_no,
                    reason: format!("`{lhs}` defined twice"),
                });
            }
            let mut alts = Vec::new();
            if !rhs.trim().is_empty() {
                for alt in rhs.split('|') {
                    let syms = alt
                        .split_whitespace()
                        .map(|s| symbol(s, line_no))
                        .collect::<Result<Vec<_>, _>>()?;
                    if syms.is_empty() {
                        return Err(GrammarError::Malformed {
                            line: line_no,
                            reason: "empty alternative".into(),
                        });
                    }
                    alts.push(syms);
                }
            }
            ids.insert(lhs.clone(), names.len());
            names.push(lhs);
            raw.push((line_no, alts));
        }
        if names.is_empty() {
            return Err(GrammarError::Empty);
        }
        let mut alternatives = Vec::with_capacity(raw.len());
        for (_, alts) in raw {
            let mut out = Vec::with_capacity(alts.len());
            for alt in alts {
                let ids = alt
                    .iter()
                    .map(|s| {
                        ids.get(s)
                            .copied()
                            .ok_or_else(|| GrammarError::Undefined(s.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                out.push(ids);
            }
            alternatives.push(out);
        }
        Ok(Grammar {
            names,
            alternatives,
            ids,
        })
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, sym: usize) -> &str {
        &self.names[sym]
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn alternatives(&self, sym: usize) -> &[Vec<usize>] {
        &self.alternatives[sym]
    }

    /// A leaf has no expansions; words attach to it through the lexicon.
    pub fn is_leaf(&self, sym: usize) -> bool {
        self.alternatives[sym].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|s| self.is_leaf(*s))
    }

    /// Lexicon code a leaf accepts; `None` for leaves outside the lexicon.
    pub fn leaf_code(&self, sym: usize) -> Option<PosCode> {
        if self.is_leaf(sym) {
            PosCode::from_category(self.name(sym))
        } else {
            None
        }
    }
}

fn symbol(raw: &str, line: usize) -> Result<String, GrammarError> {
    raw.strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .ok_or_else(|| GrammarError::Malformed {
            line,
            reason: format!("bad symbol `{raw}`"),
        })
}

/// A derivation. Leaves carry the word they cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub span: Range<usize>,
    pub word: Option<String>,
}

impl ParseTree {
    pub fn leaf(label: &str, word: &str, position: usize) -> ParseTree {
        ParseTree {
            label: label.to_string(),
            children: Vec::new(),
            span: position..position + 1,
            word: Some(word.to_string()),
        }
    }

    pub fn node(label: &str, children: Vec<ParseTree>) -> ParseTree {
        let start = children.first().map_or(0, |c| c.span.start);
        let end = children.last().map_or(start, |c| c.span.end);
        ParseTree {
            label: label.to_string(),
            children,
            span: start..end,
            word: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves left to right.
    pub fn leaves(&self) -> Vec<&ParseTree> {
        let mut out = Vec::new();
        self.collect(&mut |t| t.is_leaf(), &mut out);
        out
    }

    /// The words the tree covers.
    pub fn frontier(&self) -> Vec<&str> {
        self.leaves()
            .into_iter()
            .filter_map(|l| l.word.as_deref())
            .collect()
    }

    /// All nodes with `label`, in preorder.
    pub fn find(&self, label: &str) -> Vec<&ParseTree> {
        let mut out = Vec::new();
        self.collect(&mut |t| t.label == label, &mut out);
        out
    }

    pub fn child(&self, label: &str) -> Option<&ParseTree> {
        self.children.iter().find(|c| c.label == label)
    }

    fn collect<'a>(
        &'a self,
        keep: &mut impl FnMut(&ParseTree) -> bool,
        out: &mut Vec<&'a ParseTree>,
    ) {
        if keep(self) {
            out.push(self);
        }
        for c in &self.children {
            c.collect(keep, out);
        }
    }

    /// Longest chain of nested `np_pp` nodes.
    pub fn pp_depth(&self) -> usize {
        self.nesting("np_pp")
    }

    /// Longest chain of nested sentential complements.
    pub fn cp_depth(&self) -> usize {
        self.nesting("vp_external5")
    }

    fn nesting(&self, label: &str) -> usize {
        let below = self
            .children
            .iter()
            .map(|c| c.nesting(label))
            .max()
            .unwrap_or(0);
        below + usize::from(self.label == label)
    }
}

impl fmt::Display for ParseTree {
    /// Bracketed form: `(np_det (det the) (common_noun girl))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.word {
            Some(w) => write!(f, "({} {})", self.label, w),
            None => {
                write!(f, "({}", self.label)?;
                for c in &self.children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cogs_grammar_shape() {
        let g = Grammar::cogs();
        assert_eq!(g.name(g.start()), "start");
        let np_pp = g.id("np_pp").unwrap();
        let names: Vec<&str> = g.alternatives(np_pp)[0]
            .iter()
            .map(|s| g.name(*s))
            .collect();
        assert_eq!(names, ["np_det", "pp", "np"]);
        let vp5 = g.id("vp_external5").unwrap();
        let names: Vec<&str> = g.alternatives(vp5)[0].iter().map(|s| g.name(*s)).collect();
        assert_eq!(names, ["v_cp_taking", "that", "start"]);
        assert_eq!(g.leaves().count(), 29);
        for leaf in g.leaves() {
            assert!(g.leaf_code(leaf).is_some(), "{}", g.name(leaf));
        }
    }

    #[test]
    fn rejects_bad_grammars() {
        assert!(matches!(
            Grammar::parse("<s> ::= <a>"),
            Err(GrammarError::Undefined(_))
        ));
        assert!(matches!(
            Grammar::parse("s ::= <a>\n<a> ::="),
            Err(GrammarError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            Grammar::parse("# nothing"),
            Err(GrammarError::Empty)
        ));
        assert!(matches!(
            Grammar::parse("<a> ::=\n<a> ::="),
            Err(GrammarError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn tree_depths() {
        let inner = ParseTree::node("np_pp", vec![ParseTree::leaf("pp", "on", 2)]);
        let outer = ParseTree::node("np", vec![ParseTree::node("np_pp", vec![inner])]);
        assert_eq!(outer.pp_depth(), 2);
        assert_eq!(outer.cp_depth(), 0);
        assert_eq!(outer.frontier(), ["on"]);
    }
}
