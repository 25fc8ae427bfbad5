//! Shows the encoder's per-position sequences for one sentence.

use rasp_recogs::encoder::encode;
use rasp_recogs::tokenize;
use rasp_recogs::Lexicon;

fn main() -> anyhow::Result<()> {
    let sentence = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "a girl on the stool on the table drew a frog .".into());
    let tokens = tokenize(&sentence);
    let state = encode(&tokens, Lexicon::embedded(), 512)?;
    let row = |name: &str, v: &[f64]| {
        let cells: Vec<String> = v.iter().map(|x| format!("{x:>4}")).collect();
        println!("{name:>10} {}", cells.join(""));
    };
    let words: Vec<String> = state
        .tokens
        .iter()
        .map(|t| format!("{:>4}", &t[..t.len().min(4)]))
        .collect();
    println!("{:>10} {}", "token", words.join(""));
    row("pos", state.embedding.pos.nums());
    row("noun", state.noun_mask.nums());
    row("pp", state.pp_mask.nums());
    row("no_pp_np", state.no_pp_np_mask.nums());
    row("clause", state.clause_ids.nums());
    row("verb", state.verb_mask.nums());
    for c in &state.clauses {
        println!(
            "clause {:?}: {} verbs at {:?}",
            c.span,
            c.template.name(),
            c.verbs
        );
    }
    Ok(())
}
