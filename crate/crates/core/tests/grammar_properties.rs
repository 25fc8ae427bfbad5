use std::collections::BTreeMap;

use proptest::prelude::*;
use rasp_recogs::dataset::DatasetRow;
use rasp_recogs::decoder::{DecoderProgram, DecoderState, LfToken};
use rasp_recogs::encoder::encode;
use rasp_recogs::grammar::{
    augment_v_dat_p2, classify_error, coverage, get_agent_side, get_verbs,
    predict_attraction_error, AgentSide, FuzzCase, FuzzConfig, Fuzzer,
};
use rasp_recogs::lf::Relation;
use rasp_recogs::run::{reports, run_rows};
use rasp_recogs::{
    decode, decode_ablated, lf_oracle, parse_sentence, sem_equal, DecodeConfig, Grammar, Lexicon,
    LogicalForm,
};

fn lex() -> &'static Lexicon {
    Lexicon::embedded()
}

fn wide() -> DecodeConfig {
    DecodeConfig {
        max_len: 8192,
        max_steps: 8192,
        ..DecodeConfig::default()
    }
}

fn cases(seed: u64, pp: usize, cp: usize, n: usize) -> Vec<FuzzCase> {
    let config = FuzzConfig {
        pp_depth: pp,
        cp_depth: cp,
        ..FuzzConfig::default()
    };
    let mut f = Fuzzer::new(Grammar::cogs(), lex(), config, seed).unwrap();
    (0..n).map(|_| f.generate()).collect()
}

fn one(seed: u64, pp: usize, cp: usize) -> FuzzCase {
    cases(seed, pp, cp, 1).pop().unwrap()
}

fn template_names(tokens: &[String]) -> Vec<&'static str> {
    encode(tokens, lex(), 8192)
        .unwrap()
        .templates()
        .iter()
        .map(|t| t.name())
        .collect()
}

/// Label of every intro, keyed by index, lowercased.
fn labels(lf: &LogicalForm) -> BTreeMap<usize, String> {
    lf.intros()
        .map(|i| (i.index, i.label.to_lowercase()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reparse_round_trip(seed in any::<u64>(), pp in 0usize..4, cp in 0usize..3) {
        let case = one(seed, pp, cp);
        let tree = parse_sentence(&case.sentence, lex()).unwrap();
        prop_assert_eq!(tree, case.tree);
    }

    #[test]
    fn clause_frames_match_tree_verbs(seed in any::<u64>(), pp in 0usize..3, cp in 0usize..3) {
        let case = one(seed, pp, cp);
        let enc = encode(&case.tokens, lex(), 8192).unwrap();
        let at: BTreeMap<usize, String> = get_verbs(&case.tree).into_iter().map(|v| (v.position, v.label)).collect();
        for clause in &enc.clauses {
            let head = clause.verbs.first().copied().unwrap();
            prop_assert_eq!(clause.template.name(), at[&head].as_str(), "{}", case.sentence);
        }
        let frames = at.values().filter(|l| l.as_str() != "v_inf").count();
        prop_assert_eq!(enc.clauses.len(), frames);
    }

    #[test]
    fn pp_insertion_keeps_frames(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let case = one(seed, 1, 1);
        let nps = case.tree.find("np_det");
        prop_assume!(!nps.is_empty());
        let at = nps[pick.index(nps.len())].span.end;
        let mut tokens = case.tokens.clone();
        tokens.splice(at..at, ["on", "the", "table"].map(String::from));
        parse_sentence(&tokens.join(" "), lex()).unwrap();
        prop_assert_eq!(template_names(&case.tokens), template_names(&tokens));
    }

    #[test]
    fn no_pp_np_mask_matches_trees(seed in any::<u64>(), pp in 0usize..4, cp in 0usize..3) {
        let case = one(seed, pp, cp);
        let enc = encode(&case.tokens, lex(), 8192).unwrap();
        let mut inside = vec![false; case.tokens.len()];
        for node in case.tree.find("np_pp") {
            for leaf in node.children[2].leaves() {
                if leaf.label == "common_noun" || leaf.label == "proper_noun" {
                    inside[leaf.span.start] = true;
                }
            }
        }
        for (i, hidden) in inside.iter().enumerate() {
            prop_assert_eq!(enc.no_pp_np_mask.num(i) == 0.0, *hidden, "position {} of {}", i, case.sentence);
        }
    }

    #[test]
    fn decode_matches_oracle(seed in any::<u64>(), pp in 0usize..=2, cp in 0usize..=2) {
        let case = one(seed, pp, cp);
        let out = decode(&case.tokens, lex(), &DecodeConfig::default()).unwrap();
        let oracle = lf_oracle(&case.tree, lex()).unwrap();
        prop_assert!(sem_equal(&out, &oracle), "{}\n{}\n{}", case.sentence, out, oracle);
        prop_assert_eq!(out.to_string(), oracle.to_string());
    }

    #[test]
    fn output_length_arithmetic(seed in any::<u64>(), pp in 0usize..3, cp in 0usize..3) {
        let case = one(seed, pp, cp);
        let enc = encode(&case.tokens, lex(), 8192).unwrap();
        let out = decode(&case.tokens, lex(), &wide()).unwrap();
        let nouns = enc.noun_mask.nums().iter().filter(|x| **x == 1.0).count();
        let verbs = enc.verb_mask.nums().iter().filter(|x| **x == 1.0).count();
        let stars = out.intros().filter(|i| i.definite).count();
        let nmods = out.atoms().filter(|a| a.relation.is_nmod()).count();
        let rels = out.atoms().count() - nmods;
        prop_assert_eq!(out.tokens().len(), 5 * (nouns + verbs) - 1 + stars + 7 * rels + 9 * nmods);
    }

    #[test]
    fn unmodified_sentences_ignore_ablation(seed in any::<u64>(), cp in 0usize..3) {
        let case = one(seed, 0, cp);
        let dc = DecodeConfig::default();
        prop_assert_eq!(decode(&case.tokens, lex(), &dc).unwrap(), decode_ablated(&case.tokens, lex(), &dc).unwrap());
    }

    #[test]
    fn coverage_is_monotone(seed in any::<u64>(), cut in 1usize..20) {
        let sentences: Vec<String> = cases(seed, 1, 1, 20).into_iter().map(|c| c.sentence).collect();
        let small = coverage(&sentences[..cut], Grammar::cogs(), lex()).unwrap();
        let big = coverage(&sentences, Grammar::cogs(), lex()).unwrap();
        prop_assert!(small.fraction() <= big.fraction());
        prop_assert!(small.observed.is_subset(&big.observed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deep_sentences_decode(seed in any::<u64>(), pp in 0usize..=12, cp in 0usize..=12) {
        let case = one(seed, pp, cp);
        let out = decode(&case.tokens, lex(), &wide()).unwrap();
        prop_assert!(LogicalForm::parse(&out.to_string()).is_ok());
        prop_assert!(sem_equal(&out, &lf_oracle(&case.tree, lex()).unwrap()), "{}", case.sentence);
    }

    #[test]
    fn prefix_replay_is_causal(seed in any::<u64>(), pp in 0usize..3, cp in 0usize..2) {
        let case = one(seed, pp, cp);
        let program = DecoderProgram::new(encode(&case.tokens, lex(), 8192).unwrap(), lex(), false).unwrap();
        let mut state = DecoderState::new(&case.tokens);
        let mut emitted = Vec::new();
        loop {
            let tok = program.next_token(&state).unwrap();
            if tok == LfToken::End {
                break;
            }
            state.push(&tok);
            emitted.push(tok);
        }
        for k in 0..emitted.len() {
            let mut replay = DecoderState::new(&case.tokens);
            for t in &emitted[..k] {
                replay.push(t);
            }
            prop_assert_eq!(&program.next_token(&replay).unwrap(), &emitted[k]);
        }
    }

    #[test]
    fn ablation_hits_predicted_noun(seed in any::<u64>(), pp in 1usize..=2) {
        let dc = DecodeConfig::default();
        for case in cases(seed, pp, 0, 40) {
            let tree = &case.tree;
            let subject = &tree.children[0].children[0];
            let pps = tree.find("np_pp");
            let subject_only = !pps.is_empty() && subject.find("np_pp").len() == pps.len();
            if !subject_only || get_verbs(tree).len() != 1 || get_agent_side(tree) != Ok(AgentSide::Left) {
                continue;
            }
            let good = decode(&case.tokens, lex(), &dc).unwrap();
            let bad = decode_ablated(&case.tokens, lex(), &dc).unwrap();
            let predicted = predict_attraction_error(tree).unwrap();
            let d = classify_error(&good, &bad, Some(predicted)).unwrap();
            prop_assert!(d.single_atom, "{}", case.sentence);
            prop_assert_eq!(d.relation, Some(Relation::Agent));
            prop_assert_eq!(d.matches_prediction, Some(true));
        }
    }

    #[test]
    fn augmented_rows_reparse(seed in any::<u64>()) {
        let mut done = 0;
        for case in cases(seed, 1, 0, 600) {
            if case.tree.find("v_dat_p2").is_empty() {
                continue;
            }
            let before = lf_oracle(&case.tree, lex()).unwrap();
            let row = DatasetRow { sentence: case.sentence.clone(), lf: before.to_string(), category: "x".into() };
            let Ok(out) = augment_v_dat_p2(&row, lex()) else { continue };
            done += 1;
            parse_sentence(&out.sentence, lex()).unwrap();
            let after = LogicalForm::parse(&out.lf).unwrap();
            prop_assert!(!sem_equal(&before, &after));
            let (lb, la) = (labels(&before), labels(&after));
            let mut a: Vec<&String> = lb.values().collect();
            let mut b: Vec<&String> = la.values().collect();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
            let view = |lf: &LogicalForm, l: &BTreeMap<usize, String>, nmod: bool| {
                let mut v: Vec<(String, String, String)> = lf
                    .atoms()
                    .filter(|x| x.relation.is_nmod() == nmod)
                    .map(|x| (x.relation.to_string(), if nmod { String::new() } else { l[&x.left].clone() }, l[&x.right].clone()))
                    .collect();
                v.sort();
                v
            };
            prop_assert_eq!(view(&before, &lb, false), view(&after, &la, false));
            prop_assert_eq!(view(&before, &lb, true), view(&after, &la, true));
        }
        prop_assume!(done > 0);
    }
}

#[test]
fn runs_are_reproducible_and_count_every_row() {
    let mut rows: Vec<DatasetRow> = cases(9, 2, 1, 60)
        .into_iter()
        .map(|c| DatasetRow {
            lf: lf_oracle(&c.tree, lex()).unwrap().to_string(),
            sentence: c.sentence,
            category: "fuzz".into(),
        })
        .collect();
    rows.push(DatasetRow {
        sentence: "zorp blick .".into(),
        lf: "x ( 0 )".into(),
        category: "fuzz".into(),
    });
    let first = reports(&run_rows(&rows, lex(), &DecodeConfig::default())).unwrap();
    let second = reports(&run_rows(&rows, lex(), &DecodeConfig::default())).unwrap();
    let text =
        |r: &[rasp_recogs::score::ScoreReport]| r.iter().map(|x| x.to_kv()).collect::<String>();
    assert_eq!(text(&first), text(&second));
    let all = first.iter().find(|r| r.split == "all").unwrap();
    assert_eq!(all.n, rows.len() as u64);
    assert_eq!(all.sem_matches, rows.len() as u64 - 1);
}
