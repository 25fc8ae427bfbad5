use rasp_recogs::grammar::{lf_oracle, parse_tokens, FuzzConfig, Fuzzer, Grammar};
use rasp_recogs::{decode, sem_equal, DecodeConfig, Lexicon};

fn sweep(config: FuzzConfig, seed: u64, n: usize) -> Vec<String> {
    let lex = Lexicon::embedded();
    let dc = DecodeConfig {
        max_len: 4096,
        max_steps: 4096,
        ..DecodeConfig::default()
    };
    let mut f = Fuzzer::new(Grammar::cogs(), lex, config, seed).unwrap();
    let mut bad = Vec::new();
    for _ in 0..n {
        let case = f.generate();
        let tree = parse_tokens(Grammar::cogs(), &case.tokens, lex).unwrap();
        let gold = lf_oracle(&tree, lex).unwrap();
        match decode(&case.tokens, lex, &dc) {
            Ok(out) if sem_equal(&out, &gold) && out.to_string() == gold.to_string() => {}
            Ok(out) => bad.push(format!("{}\n  gold {gold}\n  got  {out}", case.sentence)),
            Err(e) => bad.push(format!("{}\n  error {e}", case.sentence)),
        }
    }
    bad
}

#[test]
fn shallow_sentences_match_oracle() {
    let bad = sweep(FuzzConfig::default(), 1, 1000);
    assert!(
        bad.is_empty(),
        "{} mismatches, first:\n{}",
        bad.len(),
        bad[..bad.len().min(5)].join("\n")
    );
}

#[test]
fn deep_pp_sentences_match_oracle() {
    let bad = sweep(
        FuzzConfig {
            pp_depth: 12,
            cp_depth: 3,
            ..FuzzConfig::default()
        },
        2,
        500,
    );
    assert!(
        bad.is_empty(),
        "{} mismatches, first:\n{}",
        bad.len(),
        bad[..bad.len().min(5)].join("\n")
    );
}
