//! Moves a theme's prepositional phrase onto the recipient in
//! `np v_dat_p2 np np` sentences.

use thiserror::Error;

use super::{lf_oracle, oracle::OracleError, parse_sentence, GrammarError, ParseTree};
use crate::dataset::DatasetRow;
use crate::lexicon::Lexicon;

/// Category given to transformed rows.
pub const AUGMENT_CATEGORY: &str = "v_dat_p2_pp_moved_to_recipient";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SkipReason {
    #[error("sentence does not parse: {0}")]
    NoParse(GrammarError),
    #[error("not an active v_dat_p2 double-object sentence")]
    NotVDatP2,
    #[error("sentence has {0} prepositional phrases, expected 1")]
    PpCount(usize),
    #[error("the prepositional phrase is not on the theme")]
    PpNotOnTheme,
    #[error("recipient is a proper noun")]
    ProperNounRecipient,
    #[error("moved sentence does not reparse: {0}")]
    Reparse(GrammarError),
    #[error("oracle failed on the moved sentence: {0}")]
    Oracle(OracleError),
}

/// `Liam gave the monkey a chalk in the container .` becomes
/// `Liam gave the monkey in the container a chalk .`, with the logical form
/// recomputed from the new parse.
pub fn augment_v_dat_p2(row: &DatasetRow, lexicon: &Lexicon) -> Result<DatasetRow, SkipReason> {
    let tree = parse_sentence(&row.sentence, lexicon).map_err(SkipReason::NoParse)?;
    let vp = double_object(&tree).ok_or(SkipReason::NotVDatP2)?;
    let pps = tree.find("np_pp").len();
    if pps != 1 {
        return Err(SkipReason::PpCount(pps));
    }
    let (recipient, theme) = (&vp.children[1], &vp.children[2]);
    match recipient.children[0].label.as_str() {
        "np_prop" => return Err(SkipReason::ProperNounRecipient),
        "np_det" => {}
        _ => return Err(SkipReason::PpNotOnTheme),
    }
    let theme_pp = &theme.children[0];
    if theme_pp.label != "np_pp" {
        return Err(SkipReason::PpNotOnTheme);
    }

    let words: Vec<&str> = row.sentence.split_whitespace().collect();
    let rec_end = recipient.span.end;
    let pp_start = theme_pp.children[1].span.start;
    let theme_end = theme.span.end;
    let mut moved: Vec<&str> = Vec::with_capacity(words.len());
    moved.extend(&words[..rec_end]);
    moved.extend(&words[pp_start..theme_end]);
    moved.extend(&words[rec_end..pp_start]);
    moved.extend(&words[theme_end..]);
    let sentence = moved.join(" ");

    let new_tree = parse_sentence(&sentence, lexicon).map_err(SkipReason::Reparse)?;
    let lf = lf_oracle(&new_tree, lexicon).map_err(SkipReason::Oracle)?;
    let proper: Vec<usize> = new_tree
        .find("proper_noun")
        .iter()
        .map(|l| l.span.start)
        .collect();
    let lf = lf.map_intros(|i| {
        if proper.contains(&i.index) {
            i.label = moved[i.index].to_string();
        }
    });
    Ok(DatasetRow {
        sentence,
        lf: lf.to_string(),
        category: AUGMENT_CATEGORY.to_string(),
    })
}

fn double_object(tree: &ParseTree) -> Option<&ParseTree> {
    let s1 = tree.child("s1")?;
    let vp = s1.child("vp_external")?.child("vp_external7")?;
    (vp.children.len() == 3).then_some(vp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(s: &str) -> DatasetRow {
        DatasetRow {
            sentence: s.into(),
            lf: String::new(),
            category: "in_distribution".into(),
        }
    }

    #[test]
    fn moves_pp_to_recipient() {
        let out = augment_v_dat_p2(
            &row("Liam gave the monkey a chalk in the container ."),
            Lexicon::embedded(),
        )
        .unwrap();
        assert_eq!(
            out.sentence,
            "Liam gave the monkey in the container a chalk ."
        );
        assert_eq!(
            out.lf,
            "Liam ( 0 ) ; * monkey ( 3 ) ; * container ( 6 ) ; chalk ( 8 ) ; give ( 1 ) AND agent ( 1 , 0 ) AND recipient ( 1 , 3 ) AND theme ( 1 , 8 ) AND nmod . in ( 3 , 6 )"
        );
    }

    #[test]
    fn skips() {
        let lex = Lexicon::embedded();
        assert_eq!(
            augment_v_dat_p2(&row("Liam gave Emma a chalk in the container ."), lex),
            Err(SkipReason::ProperNounRecipient)
        );
        assert_eq!(
            augment_v_dat_p2(&row("a boy painted the girl ."), lex),
            Err(SkipReason::NotVDatP2)
        );
        assert_eq!(
            augment_v_dat_p2(&row("Liam gave the monkey a chalk ."), lex),
            Err(SkipReason::PpCount(0))
        );
        assert!(matches!(
            augment_v_dat_p2(&row("gave gave ."), lex),
            Err(SkipReason::NoParse(_))
        ));
    }
}
