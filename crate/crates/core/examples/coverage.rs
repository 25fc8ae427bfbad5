//! Grammar coverage of the reference sentence sets.

use rasp_recogs::grammar::coverage::{COGS_TRAIN_HEAD, DESIGN_EXTRAS, DESIGN_SENTENCES};
use rasp_recogs::grammar::{coverage, Grammar};
use rasp_recogs::Lexicon;

fn main() -> anyhow::Result<()> {
    let (g, lex) = (Grammar::cogs(), Lexicon::embedded());
    let with_extras: Vec<&str> = DESIGN_SENTENCES
        .iter()
        .chain(&DESIGN_EXTRAS)
        .copied()
        .collect();
    for (name, set) in [
        ("train head", &COGS_TRAIN_HEAD[..]),
        ("design", &DESIGN_SENTENCES[..]),
        ("design + extras", &with_extras[..]),
    ] {
        let r = coverage(set, g, lex)?;
        println!(
            "{name}: {}/{} = {}",
            r.universe.len() - r.missing().len(),
            r.universe.len(),
            r.fraction()
        );
        for k in r.missing() {
            println!("  missing {k}");
        }
    }
    Ok(())
}
