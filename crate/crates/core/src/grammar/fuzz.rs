//! Random in-grammar sentences with their derivations.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::coverage::{expansion_keys, max_expansion_coverage};
use super::{Grammar, ParseTree};
use crate::lexicon::Lexicon;

/// Largest supported recursion cap.
pub const MAX_DEPTH: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FuzzError {
    #[error("no lexicon words for leaf `{0}`")]
    NoWords(String),
    #[error("depth cap {0} exceeds {MAX_DEPTH}")]
    DepthCap(usize),
    #[error("grammar lacks symbol `{0}`")]
    MissingSymbol(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    /// Maximum nesting of prepositional phrases on one noun phrase.
    pub pp_depth: usize,
    /// Maximum nesting of sentential complements.
    pub cp_depth: usize,
    /// Prefer expansions that earlier sentences have not exercised.
    pub guided: bool,
    /// Drive the first noun phrase, and the first clause chain, to the caps.
    pub force_depth: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            pp_depth: 2,
            cp_depth: 2,
            guided: false,
            force_depth: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzCase {
    /// Space-joined words followed by ` .`.
    pub sentence: String,
    pub tokens: Vec<String>,
    pub tree: ParseTree,
}

pub struct Fuzzer<'a> {
    grammar: &'a Grammar,
    config: FuzzConfig,
    rng: ChaCha8Rng,
    words: HashMap<usize, Vec<String>>,
    seen: BTreeSet<String>,
    /// Symbols reachable from each symbol, itself included.
    reach: Vec<Vec<usize>>,
    np: usize,
    np_pp: usize,
    vp_external: usize,
    vp_external5: usize,
    s1: usize,
}

struct Walk {
    position: usize,
    force_pp: bool,
    force_cp: bool,
}

impl<'a> Fuzzer<'a> {
    pub fn new(
        grammar: &'a Grammar,
        lexicon: &Lexicon,
        config: FuzzConfig,
        seed: u64,
    ) -> Result<Fuzzer<'a>, FuzzError> {
        for cap in [config.pp_depth, config.cp_depth] {
            if cap > MAX_DEPTH {
                return Err(FuzzError::DepthCap(cap));
            }
        }
        let mut words = HashMap::new();
        for leaf in grammar.leaves() {
            let list: Vec<String> = grammar
                .leaf_code(leaf)
                .map(|c| {
                    lexicon
                        .words_with(c)
                        .into_iter()
                        .map(str::to_string)
                        .collect()
                })
                .unwrap_or_default();
            if list.is_empty() {
                return Err(FuzzError::NoWords(grammar.name(leaf).to_string()));
            }
            words.insert(leaf, list);
        }
        let id = |name: &'static str| grammar.id(name).ok_or(FuzzError::MissingSymbol(name));
        Ok(Fuzzer {
            grammar,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
            words,
            seen: BTreeSet::new(),
            reach: reachability(grammar),
            np: id("np")?,
            np_pp: id("np_pp")?,
            vp_external: id("vp_external")?,
            vp_external5: id("vp_external5")?,
            s1: id("s1")?,
        })
    }

    /// Expansion keys produced so far.
    pub fn seen(&self) -> &BTreeSet<String> {
        &self.seen
    }

    pub fn generate(&mut self) -> FuzzCase {
        let mut walk = Walk {
            position: 0,
            force_pp: self.config.force_depth && self.config.pp_depth > 0,
            force_cp: self.config.force_depth && self.config.cp_depth > 0,
        };
        let tree = self.expand(self.grammar.start(), 0, 0, &mut walk);
        self.seen.extend(expansion_keys(&tree));
        let tokens: Vec<String> = tree.frontier().into_iter().map(str::to_string).collect();
        let sentence = format!("{} .", tokens.join(" "));
        FuzzCase {
            sentence,
            tokens,
            tree,
        }
    }

    /// Generates sentences until every expansion key has been produced or
    /// `limit` sentences have been made.
    pub fn until_covered(&mut self, limit: usize) -> Vec<FuzzCase> {
        let universe = max_expansion_coverage(self.grammar);
        let mut out = Vec::new();
        while out.len() < limit && !universe.iter().all(|k| self.seen.contains(k)) {
            out.push(self.generate());
        }
        out
    }

    fn expand(&mut self, sym: usize, pp: usize, cp: usize, walk: &mut Walk) -> ParseTree {
        let g = self.grammar;
        if g.is_leaf(sym) {
            let list = &self.words[&sym];
            let word = list[self.rng.gen_range(0..list.len())].clone();
            let t = ParseTree::leaf(g.name(sym), &word, walk.position);
            walk.position += 1;
            return t;
        }
        let alt = self.choose(sym, pp, cp, walk);
        let rhs = g.alternatives(sym)[alt].clone();
        let mut children = Vec::with_capacity(rhs.len());
        for c in rhs {
            let inner_pp = if sym == self.np_pp && c == self.np {
                pp + 1
            } else {
                pp
            };
            let inner_cp = if sym == self.vp_external5 && c == g.start() {
                cp + 1
            } else {
                cp
            };
            children.push(self.expand(c, inner_pp, inner_cp, walk));
        }
        ParseTree::node(g.name(sym), children)
    }

    fn choose(&mut self, sym: usize, pp: usize, cp: usize, walk: &mut Walk) -> usize {
        let g = self.grammar;
        let alts = g.alternatives(sym);
        let allowed: Vec<usize> = (0..alts.len())
            .filter(|&a| {
                let first = alts[a][0];
                !(sym == self.np && first == self.np_pp && pp >= self.config.pp_depth)
                    && !(sym == self.vp_external
                        && first == self.vp_external5
                        && cp >= self.config.cp_depth)
            })
            .collect();
        let forced = |target: usize| allowed.iter().copied().find(|&a| alts[a][0] == target);
        if sym == self.np && walk.force_pp {
            if let Some(a) = forced(self.np_pp) {
                if pp + 1 >= self.config.pp_depth {
                    walk.force_pp = false;
                }
                return a;
            }
        }
        if walk.force_cp && cp < self.config.cp_depth {
            if sym == g.start() {
                if let Some(a) = forced(self.s1) {
                    return a;
                }
            }
            if sym == self.vp_external {
                if let Some(a) = forced(self.vp_external5) {
                    if cp + 1 >= self.config.cp_depth {
                        walk.force_cp = false;
                    }
                    return a;
                }
            }
        }
        if self.config.guided {
            let fresh: Vec<usize> = allowed
                .iter()
                .copied()
                .filter(|&a| self.has_unseen(sym, &alts[a]))
                .collect();
            if let Some(&a) = fresh.choose(&mut self.rng) {
                return a;
            }
        }
        *allowed
            .choose(&mut self.rng)
            .expect("every nonterminal keeps one alternative")
    }

    /// Whether taking `rhs` for `sym` could still produce an unseen key.
    fn has_unseen(&self, sym: usize, rhs: &[usize]) -> bool {
        let g = self.grammar;
        if !self.seen.contains(&key(g, sym, rhs)) {
            return true;
        }
        rhs.iter().any(|&c| {
            self.reach[c].iter().any(|&r| {
                g.alternatives(r)
                    .iter()
                    .any(|alt| !self.seen.contains(&key(g, r, alt)))
            })
        })
    }
}

fn key(g: &Grammar, sym: usize, rhs: &[usize]) -> String {
    let mut k = format!("<{}> ->", g.name(sym));
    for &c in rhs {
        k.push_str(&format!(" <{}>", g.name(c)));
    }
    k
}

fn reachability(g: &Grammar) -> Vec<Vec<usize>> {
    (0..g.len())
        .map(|s| {
            let mut seen = vec![false; g.len()];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(x) = stack.pop() {
                for alt in g.alternatives(x) {
                    for &c in alt {
                        if !seen[c] {
                            seen[c] = true;
                            stack.push(c);
                        }
                    }
                }
            }
            (0..g.len()).filter(|&x| seen[x]).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parser::parse_tokens;

    fn fuzzer(config: FuzzConfig, seed: u64) -> Fuzzer<'static> {
        Fuzzer::new(Grammar::cogs(), Lexicon::embedded(), config, seed).unwrap()
    }

    #[test]
    fn deterministic_and_reparses() {
        let cfg = FuzzConfig {
            pp_depth: 1,
            cp_depth: 1,
            ..FuzzConfig::default()
        };
        let a = fuzzer(cfg, 7).generate();
        let b = fuzzer(cfg, 7).generate();
        assert_eq!(a, b);
        assert!(a.sentence.ends_with(" ."));
        let t = parse_tokens(Grammar::cogs(), &a.tokens, Lexicon::embedded()).unwrap();
        assert_eq!(t.frontier(), a.tree.frontier());
    }

    #[test]
    fn caps_are_respected() {
        let mut f = fuzzer(
            FuzzConfig {
                pp_depth: 1,
                cp_depth: 1,
                ..FuzzConfig::default()
            },
            3,
        );
        for _ in 0..300 {
            let c = f.generate();
            assert!(
                c.tree.pp_depth() <= 1 && c.tree.cp_depth() <= 1,
                "{}",
                c.sentence
            );
        }
    }

    #[test]
    fn forced_depth_reaches_cap() {
        let mut f = fuzzer(
            FuzzConfig {
                pp_depth: 12,
                cp_depth: 0,
                force_depth: true,
                ..FuzzConfig::default()
            },
            1,
        );
        let c = f.generate();
        assert_eq!(c.tree.pp_depth(), 12);
        assert_eq!(c.tree.cp_depth(), 0);
        let mut f = fuzzer(
            FuzzConfig {
                pp_depth: 0,
                cp_depth: 5,
                force_depth: true,
                ..FuzzConfig::default()
            },
            1,
        );
        assert_eq!(f.generate().tree.cp_depth(), 5);
    }

    #[test]
    fn guided_covers_quickly() {
        let mut f = fuzzer(
            FuzzConfig {
                guided: true,
                ..FuzzConfig::default()
            },
            11,
        );
        let cases = f.until_covered(200);
        assert!(cases.len() < 55, "{} sentences", cases.len());
    }

    #[test]
    fn cap_limit() {
        let cfg = FuzzConfig {
            pp_depth: 13,
            ..FuzzConfig::default()
        };
        assert!(matches!(
            Fuzzer::new(Grammar::cogs(), Lexicon::embedded(), cfg, 0),
            Err(FuzzError::DepthCap(13))
        ));
    }
}
