//! Without the prepositional-phrase mask, relation arguments drift onto the
//! noun nearest the verb. Compares both decoders against the prediction.

use rasp_recogs::grammar::{classify_error, predict_attraction_error};
use rasp_recogs::{decode, decode_ablated, parse_sentence, tokenize, DecodeConfig, Lexicon};

fn main() -> anyhow::Result<()> {
    let lex = Lexicon::embedded();
    let dc = DecodeConfig::default();
    for s in [
        "The baby beside a valve painted the cake .",
        "A girl on the stool on the table drew a frog .",
    ] {
        let tokens = tokenize(s);
        let good = decode(&tokens, lex, &dc)?;
        let bad = decode_ablated(&tokens, lex, &dc)?;
        let predicted = predict_attraction_error(&parse_sentence(s, lex)?)?;
        let d = classify_error(&good, &bad, Some(predicted))?;
        println!("{s}");
        println!("  with mask     {good}");
        println!("  without mask  {bad}");
        println!(
            "  missing {:?}",
            d.missing
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
        );
        println!(
            "  extra   {:?}",
            d.extra.iter().map(ToString::to_string).collect::<Vec<_>>()
        );
        println!(
            "  predicted {predicted}, matches {:?}",
            d.matches_prediction
        );
    }
    Ok(())
}
