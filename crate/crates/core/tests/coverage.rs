use rasp_recogs::grammar::coverage::{COGS_TRAIN_HEAD, DESIGN_EXTRAS, DESIGN_SENTENCES};
use rasp_recogs::grammar::{coverage, max_expansion_coverage, Grammar};
use rasp_recogs::Lexicon;

#[test]
fn first_cogs_sentences() {
    let r = coverage(&COGS_TRAIN_HEAD, Grammar::cogs(), Lexicon::embedded()).unwrap();
    assert_eq!(r.fraction(), 0.7115384615384616);
}

#[test]
fn handpicked_sentences() {
    let r = coverage(&DESIGN_SENTENCES, Grammar::cogs(), Lexicon::embedded()).unwrap();
    assert_eq!(r.fraction(), 0.9230769230769231);
    let missing: Vec<&str> = r.missing().into_iter().collect();
    assert_eq!(
        missing,
        [
            "<np> -> <np_pp>",
            "<np_pp> -> <np_det> <pp> <np>",
            "<vp_external5> -> <v_cp_taking> <that> <start>",
            "<vp_external> -> <vp_external5>",
        ]
    );
}

#[test]
fn handpicked_plus_pp_and_cp() {
    let mut all: Vec<&str> = DESIGN_SENTENCES.to_vec();
    all.extend(DESIGN_EXTRAS);
    let r = coverage(&all, Grammar::cogs(), Lexicon::embedded()).unwrap();
    assert_eq!(r.fraction(), 1.0);
    assert!(r.missing().is_empty());
}

#[test]
fn universe_covers_itself() {
    let u = max_expansion_coverage(Grammar::cogs());
    assert_eq!(u.len(), 52);
}

#[test]
fn unparseable_sentence_reported_by_index() {
    let err = coverage(
        &["a boy painted", "boy a painted"],
        Grammar::cogs(),
        Lexicon::embedded(),
    )
    .unwrap_err();
    assert_eq!(err.index, 1);
}
