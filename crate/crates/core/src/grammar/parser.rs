//! Earley recognition over a part-of-speech lattice, then tree extraction.
//!
//! A word may carry several categories, so position `i` of the lattice holds
//! every leaf the word can fill. When more than one derivation exists, the
//! first listed alternative wins at each node, and earlier split points win
//! within an alternative.

use std::collections::{HashMap, HashSet};

use super::{Grammar, GrammarError, ParseTree};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    lhs: usize,
    alt: usize,
    dot: usize,
    origin: usize,
}

/// Parses a raw sentence with the COGS grammar. Case is ignored and a
/// trailing `.` is dropped.
pub fn parse_sentence(sentence: &str, lexicon: &Lexicon) -> Result<ParseTree, GrammarError> {
    let tokens: Vec<String> = sentence.split_whitespace().map(str::to_lowercase).collect();
    parse_tokens(Grammar::cogs(), &tokens, lexicon)
}

/// Parses lowercased tokens. Leaf spans index into `tokens`.
pub fn parse_tokens<S: AsRef<str>>(
    grammar: &Grammar,
    tokens: &[S],
    lexicon: &Lexicon,
) -> Result<ParseTree, GrammarError> {
    let mut words: Vec<&str> = tokens.iter().map(|t| t.as_ref()).collect();
    if words.last() == Some(&".") {
        words.pop();
    }
    if words.is_empty() {
        return Err(GrammarError::EmptySentence);
    }
    let lattice = lattice(grammar, &words, lexicon)?;
    let chart = Chart::recognize(grammar, &lattice);
    let n = words.len();
    if !chart.done.contains(&(grammar.start(), 0, n)) {
        return Err(GrammarError::NoParse {
            sentence: words.join(" "),
            stuck: chart.furthest,
        });
    }
    let mut ex = Extractor {
        grammar,
        words: &words,
        lattice: &lattice,
        done: &chart.done,
        memo: HashMap::new(),
    };
    Ok(ex
        .build(grammar.start(), 0, n)
        .expect("recognized span has a derivation"))
}

fn lattice(
    grammar: &Grammar,
    words: &[&str],
    lexicon: &Lexicon,
) -> Result<Vec<Vec<usize>>, GrammarError> {
    words
        .iter()
        .map(|w| {
            let entry = lexicon
                .lookup(w)
                .ok_or_else(|| GrammarError::UnknownWord(w.to_string()))?;
            Ok(grammar
                .leaves()
                .filter(|l| grammar.leaf_code(*l).is_some_and(|c| entry.has(c)))
                .collect())
        })
        .collect()
}

struct Chart {
    /// `(symbol, start, end)` for every completed constituent.
    done: HashSet<(usize, usize, usize)>,
    furthest: usize,
}

impl Chart {
    fn recognize(grammar: &Grammar, lattice: &[Vec<usize>]) -> Chart {
        let n = lattice.len();
        let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
        let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
        let mut done = HashSet::new();
        let push =
            |sets: &mut Vec<Vec<Item>>, seen: &mut Vec<HashSet<Item>>, at: usize, it: Item| {
                if seen[at].insert(it) {
                    sets[at].push(it);
                }
            };
        for alt in 0..grammar.alternatives(grammar.start()).len() {
            push(
                &mut sets,
                &mut seen,
                0,
                Item {
                    lhs: grammar.start(),
                    alt,
                    dot: 0,
                    origin: 0,
                },
            );
        }
        let mut furthest = 0;
        for i in 0..=n {
            if !sets[i].is_empty() {
                furthest = i;
            }
            let mut k = 0;
            while k < sets[i].len() {
                let it = sets[i][k];
                k += 1;
                let rhs = &grammar.alternatives(it.lhs)[it.alt];
                match rhs.get(it.dot) {
                    None => {
                        done.insert((it.lhs, it.origin, i));
                        let waiting: Vec<Item> = sets[it.origin]
                            .iter()
                            .filter(|w| {
                                grammar.alternatives(w.lhs)[w.alt].get(w.dot) == Some(&it.lhs)
                            })
                            .copied()
                            .collect();
                        for w in waiting {
                            push(
                                &mut sets,
                                &mut seen,
                                i,
                                Item {
                                    dot: w.dot + 1,
                                    ..w
                                },
                            );
                        }
                    }
                    Some(&next) if grammar.is_leaf(next) => {
                        if i < n && lattice[i].contains(&next) {
                            done.insert((next, i, i + 1));
                            push(
                                &mut sets,
                                &mut seen,
                                i + 1,
                                Item {
                                    dot: it.dot + 1,
                                    ..it
                                },
                            );
                        }
                    }
                    Some(&next) => {
                        for alt in 0..grammar.alternatives(next).len() {
                            push(
                                &mut sets,
                                &mut seen,
                                i,
                                Item {
                                    lhs: next,
                                    alt,
                                    dot: 0,
                                    origin: i,
                                },
                            );
                        }
                    }
                }
            }
        }
        Chart { done, furthest }
    }
}

struct Extractor<'a> {
    grammar: &'a Grammar,
    words: &'a [&'a str],
    lattice: &'a [Vec<usize>],
    done: &'a HashSet<(usize, usize, usize)>,
    memo: HashMap<(usize, usize, usize), Option<ParseTree>>,
}

impl Extractor<'_> {
    fn build(&mut self, sym: usize, i: usize, j: usize) -> Option<ParseTree> {
        if let Some(t) = self.memo.get(&(sym, i, j)) {
            return t.clone();
        }
        let out = if self.grammar.is_leaf(sym) {
            (j == i + 1 && self.lattice[i].contains(&sym))
                .then(|| ParseTree::leaf(self.grammar.name(sym), self.words[i], i))
        } else if !self.done.contains(&(sym, i, j)) {
            None
        } else {
            let grammar = self.grammar;
            grammar.alternatives(sym).iter().find_map(|rhs| {
                self.fit(rhs, i, j).map(|children| ParseTree {
                    label: grammar.name(sym).to_string(),
                    children,
                    span: i..j,
                    word: None,
                })
            })
        };
        self.memo.insert((sym, i, j), out.clone());
        out
    }

    fn fit(&mut self, rhs: &[usize], i: usize, j: usize) -> Option<Vec<ParseTree>> {
        let (&first, rest) = rhs.split_first()?;
        if rest.is_empty() {
            return self.build(first, i, j).map(|t| vec![t]);
        }
        for mid in i + 1..j {
            if !self.done.contains(&(first, i, mid)) {
                continue;
            }
            if let Some(tail) = self.fit(rest, mid, j) {
                let head = self.build(first, i, mid)?;
                let mut out = Vec::with_capacity(rhs.len());
                out.push(head);
                out.extend(tail);
                return Some(out);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> ParseTree {
        parse_sentence(s, Lexicon::embedded()).unwrap()
    }

    #[test]
    fn frontier_reproduces_sentence() {
        for s in [
            "a boy painted the girl",
            "The baby beside a valve painted the cake .",
            "emma gave the girl a cake",
        ] {
            let t = parse(s);
            let words: Vec<String> = s
                .split_whitespace()
                .map(str::to_lowercase)
                .filter(|w| w != ".")
                .collect();
            assert_eq!(t.frontier(), words);
        }
    }

    #[test]
    fn intransitive_uses_p1_leaf() {
        let t = parse("a boy painted");
        assert_eq!(t.find("v_trans_omissible_p1").len(), 1);
        assert_eq!(t.to_string(), "(start (s1 (np (np_det (det a) (common_noun boy))) (vp_external (v_trans_omissible_p1 painted))))");
    }

    #[test]
    fn nested_pp_is_right_branching() {
        let t = parse("a girl on the stool on the table drew a frog");
        assert_eq!(t.pp_depth(), 2);
        let subj = &t.children[0].children[0];
        assert_eq!(subj.span, 0..8);
    }

    #[test]
    fn cp_clause() {
        let t = parse("the girl noticed that a boy painted the girl");
        assert_eq!(t.cp_depth(), 1);
        assert_eq!(t.find("start").len(), 2);
    }

    #[test]
    fn errors() {
        let lex = Lexicon::embedded();
        assert!(matches!(
            parse_sentence("painted a boy the", lex),
            Err(GrammarError::NoParse { .. })
        ));
        assert!(matches!(
            parse_sentence("a boy zorbed", lex),
            Err(GrammarError::UnknownWord(_))
        ));
        assert!(matches!(
            parse_sentence(" . ", lex),
            Err(GrammarError::EmptySentence)
        ));
    }
}
