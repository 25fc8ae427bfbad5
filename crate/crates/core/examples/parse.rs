//! Parses a sentence with the COGS grammar and prints the tree, its
//! expansion keys and the tree-derived logical form.

use rasp_recogs::grammar::expansion_keys;
use rasp_recogs::{lf_oracle, parse_sentence, Lexicon};

fn main() -> anyhow::Result<()> {
    let sentence = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "the girl noticed that a boy painted the girl".into());
    let lex = Lexicon::embedded();
    let tree = parse_sentence(&sentence, lex)?;
    println!("{tree}");
    println!("pp depth {}, cp depth {}", tree.pp_depth(), tree.cp_depth());
    for k in expansion_keys(&tree) {
        println!("  {k}");
    }
    println!("{}", lf_oracle(&tree, lex)?);
    Ok(())
}
