//! Tab-separated `sentence \t logical form \t category` rows.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::grammar::parse_sentence;
use crate::lexicon::Lexicon;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected 3 tab-separated fields, found {found}")]
    Fields { line: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRow {
    pub sentence: String,
    pub lf: String,
    pub category: String,
}

/// Rows plus how many were dropped by the augmentation filter.
#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub rows: Vec<DatasetRow>,
    pub dropped: usize,
}

/// Parses TSV text. A first line starting with `input\t` is a header.
pub fn parse_tsv(text: &str) -> Result<Vec<DatasetRow>, DatasetError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (i == 0 && line.starts_with("input\t")) {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(DatasetError::Fields {
                line: i + 1,
                found: fields.len(),
            });
        }
        rows.push(DatasetRow {
            sentence: fields[0].trim().to_string(),
            lf: fields[1].trim().to_string(),
            category: fields[2].trim().to_string(),
        });
    }
    Ok(rows)
}

/// Reads a dataset file. With `filter_augmentations`, rows whose sentence is
/// outside the grammar (preposed or "um"-sprinkled variants) are dropped.
pub fn load_tsv(
    path: impl AsRef<Path>,
    filter_augmentations: bool,
    lexicon: &Lexicon,
) -> Result<Loaded, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let rows = parse_tsv(&text)?;
    if !filter_augmentations {
        return Ok(Loaded { rows, dropped: 0 });
    }
    let total = rows.len();
    let rows: Vec<DatasetRow> = rows
        .into_iter()
        .filter(|r| parse_sentence(&r.sentence, lexicon).is_ok())
        .collect();
    Ok(Loaded {
        dropped: total - rows.len(),
        rows,
    })
}

pub fn to_tsv(rows: &[DatasetRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(out, "{}\t{}\t{}", r.sentence, r.lf, r.category);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_fields() {
        let rows = parse_tsv("input\toutput\ttype\nA cat smiled .\tcat ( 1 ) ; smile ( 2 ) AND agent ( 2 , 1 )\tin_distribution\n")
            .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].category, "in_distribution");
        assert_eq!(parse_tsv(&to_tsv(&rows)).unwrap(), rows);
    }

    #[test]
    fn short_line_reports_number() {
        let err = parse_tsv("a\tb\tc\nonly\ttwo\n").unwrap_err();
        assert!(matches!(err, DatasetError::Fields { line: 2, found: 2 }));
    }
}
