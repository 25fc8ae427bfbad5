//! Builds verb stems from sentence/logical-form pairs and shows lexicon
//! entries for a few words.

use rasp_recogs::lexicon::derive_stems;
use rasp_recogs::Lexicon;

fn main() -> anyhow::Result<()> {
    let pairs = [
        (
            "The sailor dusted a boy .",
            "* sailor ( 1 ) ; boy ( 4 ) ; dust ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )",
        ),
        (
            "A cake was frozen by the giraffe .",
            "cake ( 1 ) ; * giraffe ( 6 ) ; freeze ( 3 ) AND theme ( 3 , 1 ) AND agent ( 3 , 6 )",
        ),
    ];
    let stems = derive_stems(&pairs)?;
    for (surface, stem) in &stems {
        println!("{surface} -> {stem}");
    }
    let lex = Lexicon::embedded().clone().with_stems(&stems);
    for w in ["the", "giraffe", "frozen", "gave", "that"] {
        let (pos, verb) = lex.codes_of(w)?;
        let slots: Vec<&str> = verb.iter().map(|c| c.name()).collect();
        println!(
            "{w:>8}  {:<22} {:?}  stem {}",
            pos.name(),
            slots,
            lex.normalize_nv(w)
        );
    }
    println!("{} entries", lex.len());
    Ok(())
}
