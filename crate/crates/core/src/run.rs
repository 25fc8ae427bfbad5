//! Batch decoding, per-split scoring, failure listings and the
//! attraction-error table.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dataset::DatasetRow;
use crate::decoder::{decode, DecodeConfig};
use crate::grammar::{
    classify_error, get_agent_side, get_verbs, parse_sentence, predict_attraction_error, AgentSide,
    FuzzConfig, Fuzzer, Grammar, ParseTree,
};
use crate::lexicon::Lexicon;
use crate::lf::{normalize_case, sem_equal, string_exact_match, LogicalForm};
use crate::score::{score_split, ScoreError, ScoreReport};

/// Directory name of the positional-index dataset.
pub const DATASET_DIR: &str = "recogs_positional_index";

/// Looks for the dataset directory: `explicit`, then `$RR_DATA`, then
/// `data/recogs_positional_index` under the working directory and the
/// workspace root.
pub fn find_dataset(explicit: Option<&Path>) -> Option<PathBuf> {
    let mut candidates: Vec<PathBuf> = Vec::new();
    if let Some(p) = explicit {
        candidates.push(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os("RR_DATA") {
        candidates.push(PathBuf::from(p));
    }
    candidates.push(Path::new("data").join(DATASET_DIR));
    candidates.push(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data")
            .join(DATASET_DIR),
    );
    candidates.push(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("data")
            .join(DATASET_DIR),
    );
    candidates
        .into_iter()
        .find(|p| p.join("test.tsv").is_file() || p.join("train.tsv").is_file())
}

/// Outcome of decoding one row.
#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: DatasetRow,
    /// Decoded logical form, or the error text.
    pub output: Result<String, String>,
    pub sem: bool,
    pub exact: bool,
}

/// Decodes every row in parallel; results keep row order. Gold forms are
/// compared after lowercasing.
pub fn run_rows(rows: &[DatasetRow], lexicon: &Lexicon, config: &DecodeConfig) -> Vec<RowResult> {
    rows.par_iter()
        .map(|row| {
            let tokens: Vec<String> = row
                .sentence
                .split_whitespace()
                .map(str::to_lowercase)
                .collect();
            let output = decode(&tokens, lexicon, config)
                .map(|lf| lf.to_string())
                .map_err(|e| e.to_string());
            let gold = normalize_case(&row.lf);
            let (sem, exact) = match &output {
                Ok(out) => {
                    let exact = string_exact_match(&gold, out);
                    let sem = match (LogicalForm::parse(&gold), LogicalForm::parse(out)) {
                        (Ok(g), Ok(o)) => sem_equal(&g, &o),
                        _ => false,
                    };
                    (sem, exact)
                }
                Err(_) => (false, false),
            };
            RowResult {
                row: row.clone(),
                output,
                sem,
                exact,
            }
        })
        .collect()
}

/// One report per category in name order, then `all`.
pub fn reports(results: &[RowResult]) -> Result<Vec<ScoreReport>, ScoreError> {
    let mut by_split: BTreeMap<&str, Vec<(String, Option<String>)>> = BTreeMap::new();
    let mut all = Vec::with_capacity(results.len());
    for r in results {
        let pair = (normalize_case(&r.row.lf), r.output.clone().ok());
        by_split
            .entry(r.row.category.as_str())
            .or_default()
            .push(pair.clone());
        all.push(pair);
    }
    let mut out = Vec::with_capacity(by_split.len() + 1);
    for (split, pairs) in &by_split {
        out.push(score_split(split, pairs)?);
    }
    if !all.is_empty() {
        out.push(score_split("all", &all)?);
    }
    Ok(out)
}

/// `sentence \t expected \t actual \t descriptor` for every semantic miss.
pub fn failures_tsv(results: &[RowResult], lexicon: &Lexicon) -> String {
    let mut out = String::from("sentence\texpected\tactual\tdescriptor\n");
    for r in results.iter().filter(|r| !r.sem) {
        let actual = r.output.clone().unwrap_or_else(|e| format!("ERROR: {e}"));
        let descriptor = describe(r, lexicon);
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.row.sentence, r.row.lf, actual, descriptor
        ));
    }
    out
}

fn describe(r: &RowResult, lexicon: &Lexicon) -> String {
    let Ok(out) = &r.output else {
        return "decode-error".into();
    };
    let (Ok(gold), Ok(actual)) = (
        LogicalForm::parse(&normalize_case(&r.row.lf)),
        LogicalForm::parse(out),
    ) else {
        return "unparsable".into();
    };
    let prediction = parse_sentence(&r.row.sentence, lexicon)
        .ok()
        .and_then(|t| predict_attraction_error(&t).ok());
    match classify_error(&gold, &actual, prediction) {
        Ok(d) if d.single_atom => format!(
            "single-atom relation={} wrong_index={} matches_prediction={}",
            d.relation.map(|r| r.to_string()).unwrap_or_default(),
            d.wrong_index.map(|i| i.to_string()).unwrap_or_default(),
            d.matches_prediction
                .map_or("n/a".to_string(), |b| b.to_string())
        ),
        Ok(d) => format!(
            "multi missing={} extra={} intros_differ={}",
            d.missing.len(),
            d.extra.len(),
            d.intros_differ
        ),
        Err(e) => e.to_string(),
    }
}

/// Counts behind the attraction-error analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttractionTable {
    pub rows: usize,
    pub errors: usize,
    /// Errors on single-verb sentences without complements.
    pub single_verb_errors: usize,
    pub single_atom_errors: usize,
    /// Single-atom agent errors on agent-left sentences.
    pub agent_left_agent_errors: usize,
    /// Of those, errors whose wrong index is the predicted attractor.
    pub matching_prediction: usize,
    pub by_side_and_relation: BTreeMap<(String, String), usize>,
}

impl AttractionTable {
    pub fn match_rate(&self) -> Option<f64> {
        (self.agent_left_agent_errors > 0)
            .then(|| self.matching_prediction as f64 / self.agent_left_agent_errors as f64)
    }
}

impl fmt::Display for AttractionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows                         {}", self.rows)?;
        writeln!(f, "semantic errors              {}", self.errors)?;
        writeln!(
            f,
            "single-verb, no complement   {}",
            self.single_verb_errors
        )?;
        writeln!(
            f,
            "single-atom                  {}",
            self.single_atom_errors
        )?;
        writeln!(
            f,
            "agent-left agent errors      {}",
            self.agent_left_agent_errors
        )?;
        write!(
            f,
            "matching attraction predict  {}",
            self.matching_prediction
        )?;
        if let Some(r) = self.match_rate() {
            write!(f, " ({:.2}%)", 100.0 * r)?;
        }
        for ((side, rel), n) in &self.by_side_and_relation {
            write!(f, "\n  agent {side:<16} {rel:<12} {n}")?;
        }
        Ok(())
    }
}

/// Builds the attraction table from decoded rows.
pub fn analyze_errors(results: &[RowResult], lexicon: &Lexicon) -> AttractionTable {
    let mut t = AttractionTable {
        rows: results.len(),
        ..AttractionTable::default()
    };
    for r in results.iter().filter(|r| !r.sem) {
        t.errors += 1;
        let Ok(tree) = parse_sentence(&r.row.sentence, lexicon) else {
            continue;
        };
        if get_verbs(&tree).len() != 1 || tree.cp_depth() > 0 {
            continue;
        }
        t.single_verb_errors += 1;
        let Ok(out) = &r.output else { continue };
        let (Ok(gold), Ok(actual)) = (
            LogicalForm::parse(&normalize_case(&r.row.lf)),
            LogicalForm::parse(out),
        ) else {
            continue;
        };
        let prediction = predict_attraction_error(&tree).ok();
        let Ok(d) = classify_error(&gold, &actual, prediction) else {
            continue;
        };
        if !d.single_atom {
            continue;
        }
        t.single_atom_errors += 1;
        let side = get_agent_side(&tree)
            .map(|s| s.to_string())
            .unwrap_or_default();
        let rel = d
            .relation
            .as_ref()
            .map(|r| r.to_string())
            .unwrap_or_default();
        *t.by_side_and_relation
            .entry((side.clone(), rel.clone()))
            .or_default() += 1;
        if side == AgentSide::Left.to_string() && rel == "agent" {
            t.agent_left_agent_errors += 1;
            if d.matches_prediction == Some(true) {
                t.matching_prediction += 1;
            }
        }
    }
    t
}

/// Whether every prepositional phrase in a single-verb, agent-left
/// sentence sits on the subject, and there is at least one.
pub fn is_subject_only_pp(tree: &ParseTree) -> bool {
    let Some(subject) = tree.children.first().and_then(|c| c.children.first()) else {
        return false;
    };
    let on_subject = subject.find("np_pp").len();
    on_subject > 0
        && on_subject == tree.find("np_pp").len()
        && get_verbs(tree).len() == 1
        && get_agent_side(tree) == Ok(AgentSide::Left)
}

/// Fuzzed single-verb, agent-left sentences whose only prepositional
/// phrases modify the subject, with oracle logical forms as gold.
pub fn attraction_corpus(
    lexicon: &Lexicon,
    pp_depth: usize,
    wanted: usize,
    seed: u64,
) -> Vec<DatasetRow> {
    let config = FuzzConfig {
        pp_depth,
        cp_depth: 0,
        ..FuzzConfig::default()
    };
    let mut fuzzer = Fuzzer::new(Grammar::cogs(), lexicon, config, seed)
        .expect("embedded lexicon fills every leaf");
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < wanted && attempts < wanted * 200 {
        attempts += 1;
        let case = fuzzer.generate();
        if !is_subject_only_pp(&case.tree) {
            continue;
        }
        let Ok(lf) = crate::grammar::lf_oracle(&case.tree, lexicon) else {
            continue;
        };
        out.push(DatasetRow {
            sentence: case.sentence,
            lf: lf.to_string(),
            category: "fuzz_subject_pp".into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(s: &str, lf: &str, cat: &str) -> DatasetRow {
        DatasetRow {
            sentence: s.into(),
            lf: lf.into(),
            category: cat.into(),
        }
    }

    #[test]
    fn scores_by_category_in_order() {
        let rows = vec![
            row(
                "A cat smiled .",
                "cat ( 1 ) ; smile ( 2 ) AND agent ( 2 , 1 )",
                "b",
            ),
            row(
                "Emma smiled .",
                "Emma ( 0 ) ; smile ( 1 ) AND agent ( 1 , 0 )",
                "a",
            ),
            row(
                "Emma smiled .",
                "Emma ( 0 ) ; smile ( 1 ) AND theme ( 1 , 0 )",
                "a",
            ),
        ];
        let res = run_rows(&rows, Lexicon::embedded(), &DecodeConfig::default());
        assert_eq!(
            res.iter().map(|r| r.sem).collect::<Vec<_>>(),
            [true, true, false]
        );
        let reps = reports(&res).unwrap();
        let names: Vec<&str> = reps.iter().map(|r| r.split.as_str()).collect();
        assert_eq!(names, ["a", "b", "all"]);
        assert_eq!((reps[0].n, reps[0].sem_matches), (2, 1));
        assert_eq!(reps[2].n, 3);
        let fails = failures_tsv(&res, Lexicon::embedded());
        assert_eq!(fails.lines().count(), 2);
        assert!(fails.contains("single-atom relation=theme"));
    }

    #[test]
    fn decode_errors_count_as_misses() {
        let rows = vec![row("zorb zorb .", "cat ( 1 )", "x")];
        let res = run_rows(&rows, Lexicon::embedded(), &DecodeConfig::default());
        assert!(res[0].output.is_err());
        assert_eq!(reports(&res).unwrap()[0].n, 1);
    }

    #[test]
    fn ablated_corpus_errors_match_prediction() {
        let lex = Lexicon::embedded();
        let rows = attraction_corpus(lex, 2, 40, 3);
        assert_eq!(rows.len(), 40);
        let cfg = DecodeConfig {
            ablate_no_pp_rule: true,
            ..DecodeConfig::default()
        };
        let t = analyze_errors(&run_rows(&rows, lex, &cfg), lex);
        assert_eq!(t.errors, 40);
        assert_eq!(t.matching_prediction, 40);
    }
}
