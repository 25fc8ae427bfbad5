//! Expansion keys, the reachable key universe, and coverage statistics.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::{parser::parse_tokens, Grammar, GrammarError, ParseTree};
use crate::lexicon::Lexicon;

/// The first 21 sentences of the COGS training file.
pub const COGS_TRAIN_HEAD: [&str; 21] = [
    "A rose was helped by a dog",
    "The sailor dusted a boy",
    "Emma rolled a teacher",
    "Evelyn rolled the girl",
    "A cake was forwarded to Levi by Charlotte",
    "The captain ate",
    "The girl needed to cook",
    "A cake rolled",
    "The cookie was passed to Emma",
    "Emma ate the ring beside a bed",
    "A horse gave the cake beside a table to the mouse",
    "Amelia gave Emma a strawberry",
    "A cat disintegrated a girl",
    "Eleanor sold Evelyn the cake",
    "The book was lended to Benjamin by a cat",
    "The cake was frozen by the giraffe",
    "The donut was studied",
    "Isabella forwarded a box on a tree to Emma",
    "A cake was stabbed by Scarlett",
    "A pencil was fed to Liam by the deer",
    "The cake was eaten by Olivia",
];

/// One sentence per flat frame.
pub const DESIGN_SENTENCES: [&str; 19] = [
    "the girl was painted",
    "a boy painted",
    "a boy painted the girl",
    "the girl was painted by a boy",
    "a boy respected the girl",
    "the girl was respected",
    "the girl was respected by a boy",
    "the boy grew the flower",
    "the flower was grown",
    "the flower was grown by a boy",
    "the scientist wanted to read",
    "the guest smiled",
    "the flower grew",
    "ella sold a car to the customer",
    "ella sold a customer a car",
    "the customer was sold a car",
    "the customer was sold a car by ella",
    "the car was sold to the customer by ella",
    "the car was sold to the customer",
];

/// A prepositional-phrase and a sentential-complement sentence that complete
/// coverage of [`DESIGN_SENTENCES`].
pub const DESIGN_EXTRAS: [&str; 2] = [
    "a boy painted the girl in a house",
    "the girl noticed that a boy painted the girl",
];

#[derive(Debug, Error)]
#[error("sentence {index}: {source}")]
pub struct CoverageError {
    pub index: usize,
    #[source]
    pub source: GrammarError,
}

/// `<lhs> -> <c1> <c2> ...` for every node that has children.
pub fn expansion_keys(tree: &ParseTree) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![tree];
    while let Some(node) = stack.pop() {
        if node.children.is_empty() {
            continue;
        }
        let mut key = format!("<{}> ->", node.label);
        for c in &node.children {
            key.push_str(&format!(" <{}>", c.label));
            stack.push(c);
        }
        out.insert(key);
    }
    out
}

/// Every expansion key reachable from the start symbol. Leaves contribute
/// none.
pub fn max_expansion_coverage(grammar: &Grammar) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut seen = vec![false; grammar.len()];
    let mut stack = vec![grammar.start()];
    seen[grammar.start()] = true;
    while let Some(sym) = stack.pop() {
        for rhs in grammar.alternatives(sym) {
            let mut key = format!("<{}> ->", grammar.name(sym));
            for &c in rhs {
                key.push_str(&format!(" <{}>", grammar.name(c)));
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
            out.insert(key);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub observed: BTreeSet<String>,
    pub universe: BTreeSet<String>,
}

impl CoverageReport {
    pub fn missing(&self) -> BTreeSet<&str> {
        self.universe
            .iter()
            .filter(|k| !self.observed.contains(*k))
            .map(String::as_str)
            .collect()
    }

    pub fn fraction(&self) -> f64 {
        1.0 - self.missing().len() as f64 / self.universe.len() as f64
    }
}

/// Union of expansion keys over `sentences` against the grammar's universe.
pub fn coverage<S: AsRef<str>>(
    sentences: &[S],
    grammar: &Grammar,
    lexicon: &Lexicon,
) -> Result<CoverageReport, CoverageError> {
    let mut observed = BTreeSet::new();
    for (index, s) in sentences.iter().enumerate() {
        let tokens: Vec<String> = s
            .as_ref()
            .split_whitespace()
            .map(str::to_lowercase)
            .collect();
        let tree = parse_tokens(grammar, &tokens, lexicon)
            .map_err(|source| CoverageError { index, source })?;
        observed.extend(expansion_keys(&tree));
    }
    Ok(CoverageReport {
        observed,
        universe: max_expansion_coverage(grammar),
    })
}

/// Expansion keys of each sentence, parsed in parallel.
pub fn key_sets<S: AsRef<str> + Sync>(
    sentences: &[S],
    grammar: &Grammar,
    lexicon: &Lexicon,
) -> Result<Vec<BTreeSet<String>>, CoverageError> {
    sentences
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            let tokens: Vec<String> = s
                .as_ref()
                .split_whitespace()
                .map(str::to_lowercase)
                .collect();
            parse_tokens(grammar, &tokens, lexicon)
                .map(|t| expansion_keys(&t))
                .map_err(|source| CoverageError { index, source })
        })
        .collect()
}

/// Examples needed to reach full coverage, in the given order and over
/// seeded shuffles.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveStats {
    pub unshuffled: Option<usize>,
    /// One entry per shuffle; `None` when the shuffle never covers everything.
    pub shuffled: Vec<Option<usize>>,
    pub median: Option<f64>,
    pub low: Option<f64>,
    pub high: Option<f64>,
}

impl CurveStats {
    pub fn never_covered(&self) -> usize {
        self.shuffled.iter().filter(|s| s.is_none()).count()
    }
}

/// Coverage curve over per-example key sets. Shuffle `i` uses a generator
/// seeded with `seed + i`. `low`/`high` are the 2.5th and 97.5th
/// percentiles with linear interpolation.
pub fn coverage_curve(
    key_sets: &[BTreeSet<String>],
    universe: &BTreeSet<String>,
    shuffles: usize,
    seed: u64,
) -> CurveStats {
    let masks = bit_masks(key_sets, universe);
    let full = full_mask(universe.len());
    let order: Vec<usize> = (0..masks.len()).collect();
    let unshuffled = first_full(&masks, &order, full);
    let shuffled: Vec<Option<usize>> = (0..shuffles)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let mut order = order.clone();
            order.shuffle(&mut rng);
            first_full(&masks, &order, full)
        })
        .collect();
    let mut reached: Vec<f64> = shuffled.iter().flatten().map(|n| *n as f64).collect();
    reached.sort_by(f64::total_cmp);
    CurveStats {
        unshuffled,
        median: percentile(&reached, 50.0),
        low: percentile(&reached, 2.5),
        high: percentile(&reached, 97.5),
        shuffled,
    }
}

fn bit_masks(key_sets: &[BTreeSet<String>], universe: &BTreeSet<String>) -> Vec<u128> {
    assert!(
        universe.len() <= 128,
        "coverage masks hold at most 128 keys"
    );
    let index: Vec<&String> = universe.iter().collect();
    key_sets
        .iter()
        .map(|ks| {
            index
                .iter()
                .enumerate()
                .filter(|(_, k)| ks.contains(**k))
                .fold(0u128, |m, (b, _)| m | (1u128 << b))
        })
        .collect()
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

fn first_full(masks: &[u128], order: &[usize], full: u128) -> Option<usize> {
    let mut acc = 0u128;
    for (k, &i) in order.iter().enumerate() {
        acc |= masks[i];
        if acc == full {
            return Some(k + 1);
        }
    }
    None
}

/// Percentile of sorted data, interpolating linearly between ranks.
pub fn percentile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64))
}
