//! Moves a theme's prepositional phrase onto the recipient.

use rasp_recogs::dataset::DatasetRow;
use rasp_recogs::grammar::augment_v_dat_p2;
use rasp_recogs::Lexicon;

fn main() {
    let lex = Lexicon::embedded();
    for s in [
        "Liam gave the monkey a chalk in the container .",
        "Emma sold a girl the cake on the table .",
        "Liam gave Emma a chalk in the container .",
    ] {
        let row = DatasetRow {
            sentence: s.into(),
            lf: String::new(),
            category: "in_distribution".into(),
        };
        match augment_v_dat_p2(&row, lex) {
            Ok(out) => println!("{s}\n  -> {}\n     {}", out.sentence, out.lf),
            Err(why) => println!("{s}\n  skipped: {why}"),
        }
    }
}
