//! Decodes sentences to positional logical forms.
//!
//! `cargo run --example decode -- "a boy painted the girl ."`

use rasp_recogs::{decode_sentence, Lexicon};

const DEFAULT: [&str; 4] = [
    "The baby beside a valve painted the cake .",
    "Ella sold a car to the customer .",
    "The girl needed to cook .",
    "The girl noticed that a boy painted the girl .",
];

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sentences: Vec<&str> = if args.is_empty() {
        DEFAULT.to_vec()
    } else {
        args.iter().map(String::as_str).collect()
    };
    let lex = Lexicon::embedded();
    for s in sentences {
        match decode_sentence(s, lex) {
            Ok(lf) => println!("{s}\n  {lf}"),
            Err(e) => println!("{s}\n  error: {e}"),
        }
    }
    Ok(())
}
