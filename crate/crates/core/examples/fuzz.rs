//! Generates fuzzed sentences and checks each against the tree oracle.
//!
//! `cargo run --example fuzz -- [count] [pp_depth] [cp_depth] [seed]`

use rasp_recogs::grammar::{get_verbs, lf_oracle, FuzzConfig, Fuzzer, Grammar};
use rasp_recogs::{decode, sem_equal, DecodeConfig, Lexicon};

fn main() -> anyhow::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let get = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let (count, pp, cp, seed) = (
        get(0, 10),
        get(1, 2) as usize,
        get(2, 1) as usize,
        get(3, 0),
    );
    let lex = Lexicon::embedded();
    let config = FuzzConfig {
        pp_depth: pp,
        cp_depth: cp,
        ..FuzzConfig::default()
    };
    let mut fuzzer = Fuzzer::new(Grammar::cogs(), lex, config, seed)?;
    let dc = DecodeConfig {
        max_len: 4096,
        max_steps: 4096,
        ..DecodeConfig::default()
    };
    let mut agree = 0;
    for _ in 0..count {
        let case = fuzzer.generate();
        let oracle = lf_oracle(&case.tree, lex)?;
        let out = decode(&case.tokens, lex, &dc)?;
        let ok = sem_equal(&out, &oracle);
        agree += usize::from(ok);
        let frame = get_verbs(&case.tree)
            .last()
            .map(|v| v.label.clone())
            .unwrap_or_default();
        println!(
            "{}\t{frame}\t{}",
            case.sentence,
            if ok { "ok" } else { "MISMATCH" }
        );
        println!("  {out}");
    }
    println!("{agree}/{count} agree with the oracle");
    Ok(())
}
