use std::borrow::Cow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rasp_recogs::dataset::{load_tsv, to_tsv, DatasetRow};
use rasp_recogs::grammar::coverage::{DESIGN_EXTRAS, DESIGN_SENTENCES};
use rasp_recogs::grammar::{
    augment_v_dat_p2, coverage, coverage_curve, key_sets, lf_oracle, max_expansion_coverage,
    FuzzConfig, Fuzzer, Grammar,
};
use rasp_recogs::lexicon::derive_stems;
use rasp_recogs::run::{
    analyze_errors, attraction_corpus, failures_tsv, find_dataset, reports, run_rows,
};
use rasp_recogs::{decode, sem_equal, DecodeConfig, Lexicon};

#[derive(Parser)]
#[command(
    name = "recogs",
    version,
    about = "Flat sequence-program parser for ReCOGS_pos and its grammar tools"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Dataset directory holding train/dev/test/gen TSV files.
    #[arg(long, global = true, env = "RR_DATA")]
    data: Option<PathBuf>,
    /// Lexicon TSV; the built-in vocabulary is used when absent.
    #[arg(long, global = true, env = "RR_LEXICON")]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true, env = "RR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "RR_MAX_LEN", default_value_t = 512)]
    max_len: usize,
    #[arg(long, global = true, env = "RR_MAX_STEPS", default_value_t = 400)]
    max_steps: usize,
    #[arg(long, global = true, env = "RR_PP_DEPTH", default_value_t = 2)]
    pp_depth: usize,
    #[arg(long, global = true, env = "RR_CP_DEPTH", default_value_t = 2)]
    cp_depth: usize,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true, env = "RR_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decode a dataset split and score it.
    Run(RunArgs),
    /// Grammar coverage of sentences, or the coverage curve of the training file.
    Coverage(CoverageArgs),
    /// Generate in-grammar sentences with oracle logical forms.
    Fuzz(FuzzArgs),
    /// Move theme prepositional phrases to the recipient in v_dat_p2 training rows.
    Augment,
    /// Tabulate single-atom errors and attraction predictions.
    AnalyzeErrors(AnalyzeArgs),
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long = "use_test_split", env = "RR_USE_TEST_SPLIT")]
    test: bool,
    #[arg(long = "use_gen_split", env = "RR_USE_GEN_SPLIT")]
    gen: bool,
    #[arg(long = "use_dev_split", env = "RR_USE_DEV_SPLIT")]
    dev: bool,
    /// Keep only rows of this category.
    #[arg(long, env = "RR_SPLIT")]
    split: Option<String>,
    /// Count relation arguments over every noun, including pp nouns.
    #[arg(long = "ablate-no-pp-rule", env = "RR_ABLATE_NO_PP_RULE")]
    ablate: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Exit nonzero if any split's semantic match rate is below this fraction.
    #[arg(long, env = "RR_MIN_SEM")]
    min_sem: Option<f64>,
}

#[derive(Args)]
struct CoverageArgs {
    /// Sentences to measure; the built-in design sentences when empty.
    sentences: Vec<String>,
    /// Add the pp and cp sentences to the built-in set.
    #[arg(long)]
    with_extras: bool,
    /// Coverage curve over the training file instead.
    #[arg(long)]
    curve: bool,
    #[arg(long, env = "RR_SHUFFLES", default_value_t = 1000)]
    shuffles: usize,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Prefer unexercised expansions.
    #[arg(long)]
    guided: bool,
    /// Drive the first noun phrase and clause chain to the depth caps.
    #[arg(long)]
    force_depth: bool,
    /// Print each derivation.
    #[arg(long)]
    trees: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    split: SplitArgs,
    /// Fuzzed cases to use when no dataset is available.
    #[arg(long, default_value_t = 400)]
    count: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let c = &cli.common;
    let lexicon = load_lexicon(c)?;
    let decode_config = DecodeConfig {
        max_len: c.max_len,
        max_steps: c.max_steps,
        ablate_no_pp_rule: false,
    };
    match &cli.command {
        Command::Run(a) => cmd_run(c, &lexicon, decode_config, a),
        Command::Coverage(a) => cmd_coverage(c, &lexicon, a),
        Command::Fuzz(a) => cmd_fuzz(c, &lexicon, decode_config, a),
        Command::Augment => cmd_augment(c, &lexicon),
        Command::AnalyzeErrors(a) => cmd_analyze(c, &lexicon, decode_config, a),
    }
}

/// The chosen lexicon, with verb stems refreshed from the training file
/// when one is present.
fn load_lexicon(c: &Common) -> Result<Cow<'static, Lexicon>> {
    let lex = match &c.lexicon {
        Some(p) => Cow::Owned(
            Lexicon::load(p).with_context(|| format!("loading lexicon {}", p.display()))?,
        ),
        None => Cow::Borrowed(Lexicon::embedded()),
    };
    let Some(train) = find_dataset(c.data.as_deref())
        .map(|d| d.join("train.tsv"))
        .filter(|p| p.is_file())
    else {
        return Ok(lex);
    };
    let rows = load_tsv(&train, false, &lex)?.rows;
    let pairs: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r.sentence.as_str(), r.lf.as_str()))
        .collect();
    let stems = derive_stems(&pairs)?;
    Ok(Cow::Owned(lex.into_owned().with_stems(&stems)))
}

fn dataset_dir(c: &Common) -> Result<PathBuf> {
    find_dataset(c.data.as_deref()).context(
        "dataset not found: pass --data or set RR_DATA to a recogs_positional_index directory",
    )
}

fn split_file(a: &SplitArgs) -> &'static str {
    if a.test {
        "test.tsv"
    } else if a.gen {
        "gen.tsv"
    } else {
        "dev.tsv"
    }
}

fn load_split(c: &Common, a: &SplitArgs, lexicon: &Lexicon) -> Result<Vec<DatasetRow>> {
    let path = dataset_dir(c)?.join(split_file(a));
    let mut rows = load_tsv(&path, false, lexicon)?.rows;
    if let Some(s) = &a.split {
        rows.retain(|r| &r.category == s);
        if rows.is_empty() {
            bail!("no rows with category `{s}` in {}", path.display());
        }
    }
    Ok(rows)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_run(c: &Common, lexicon: &Lexicon, dc: DecodeConfig, a: &RunArgs) -> Result<ExitCode> {
    let rows = load_split(c, &a.split, lexicon)?;
    let dc = DecodeConfig {
        ablate_no_pp_rule: a.split.ablate,
        ..dc
    };
    let results = run_rows(&rows, lexicon, &dc);
    let reps = reports(&results)?;
    let mut text = String::new();
    let mut kv = String::new();
    for r in &reps {
        text.push_str(&format!("{r}\n"));
        kv.push_str(&r.to_kv());
        kv.push('\n');
    }
    print!("{text}");
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
        write_out(&dir.join("report.txt"), &text)?;
        write_out(&dir.join("report.kv"), &kv)?;
        write_out(&dir.join("failures.tsv"), &failures_tsv(&results, lexicon))?;
    }
    let missed = a
        .min_sem
        .is_some_and(|m| reps.iter().any(|r| r.sem_rate() < m));
    Ok(if missed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_coverage(c: &Common, lexicon: &Lexicon, a: &CoverageArgs) -> Result<ExitCode> {
    let grammar = Grammar::cogs();
    if a.curve {
        let train = dataset_dir(c)?.join("train.tsv");
        let loaded = load_tsv(&train, true, lexicon)?;
        println!(
            "rows {} (dropped {} outside the grammar)",
            loaded.rows.len(),
            loaded.dropped
        );
        let sentences: Vec<&str> = loaded.rows.iter().map(|r| r.sentence.as_str()).collect();
        let sets = key_sets(&sentences, grammar, lexicon)?;
        let stats = coverage_curve(&sets, &max_expansion_coverage(grammar), a.shuffles, c.seed);
        let show = |v: Option<f64>| v.map_or("never".to_string(), |x| format!("{x}"));
        println!(
            "unshuffled: {}",
            stats
                .unshuffled
                .map_or("never".to_string(), |n| n.to_string())
        );
        println!(
            "shuffled (n={}): median {}, 2.5% {}, 97.5% {}, never covered {}",
            a.shuffles,
            show(stats.median),
            show(stats.low),
            show(stats.high),
            stats.never_covered()
        );
        return Ok(ExitCode::SUCCESS);
    }
    let mut sentences: Vec<String> = a.sentences.clone();
    if sentences.is_empty() {
        sentences.extend(DESIGN_SENTENCES.iter().map(|s| s.to_string()));
        if a.with_extras {
            sentences.extend(DESIGN_EXTRAS.iter().map(|s| s.to_string()));
        }
    }
    let report = coverage(&sentences, grammar, lexicon)?;
    println!("{}", report.fraction());
    for k in report.missing() {
        println!("missing {k}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fuzz(c: &Common, lexicon: &Lexicon, dc: DecodeConfig, a: &FuzzArgs) -> Result<ExitCode> {
    let config = FuzzConfig {
        pp_depth: c.pp_depth,
        cp_depth: c.cp_depth,
        guided: a.guided,
        force_depth: a.force_depth,
    };
    let mut fuzzer = Fuzzer::new(Grammar::cogs(), lexicon, config, c.seed)?;
    let category = format!("fuzz_pp{}_cp{}", c.pp_depth, c.cp_depth);
    let mut rows = Vec::with_capacity(a.count);
    let mut agree = 0;
    for _ in 0..a.count {
        let case = fuzzer.generate();
        let oracle = lf_oracle(&case.tree, lexicon)?;
        if decode(&case.tokens, lexicon, &dc).is_ok_and(|out| sem_equal(&out, &oracle)) {
            agree += 1;
        }
        if a.trees {
            println!("{}", case.tree);
        }
        rows.push(DatasetRow {
            sentence: case.sentence,
            lf: oracle.to_string(),
            category: category.clone(),
        });
    }
    let tsv = to_tsv(&rows);
    match &c.out {
        Some(p) => write_out(p, &tsv)?,
        None => print!("{tsv}"),
    }
    eprintln!("{agree}/{} decoded forms match the oracle", a.count);
    Ok(if agree == a.count {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_augment(c: &Common, lexicon: &Lexicon) -> Result<ExitCode> {
    let train = dataset_dir(c)?.join("train.tsv");
    let rows = load_tsv(&train, false, lexicon)?.rows;
    let out: Vec<DatasetRow> = rows
        .iter()
        .filter_map(|r| augment_v_dat_p2(r, lexicon).ok())
        .collect();
    let tsv = to_tsv(&out);
    match &c.out {
        Some(p) => write_out(p, &tsv)?,
        None => print!("{tsv}"),
    }
    eprintln!("{} rows transformed from {}", out.len(), rows.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(
    c: &Common,
    lexicon: &Lexicon,
    dc: DecodeConfig,
    a: &AnalyzeArgs,
) -> Result<ExitCode> {
    let dc = DecodeConfig {
        ablate_no_pp_rule: a.split.ablate,
        ..dc
    };
    let rows = match find_dataset(c.data.as_deref()) {
        Some(_) => load_split(c, &a.split, lexicon)?,
        None => {
            eprintln!(
                "no dataset found; using {} fuzzed subject-pp sentences",
                a.count
            );
            attraction_corpus(lexicon, c.pp_depth.max(1), a.count, c.seed)
        }
    };
    let table = analyze_errors(&run_rows(&rows, lexicon, &dc), lexicon);
    println!("{table}");
    Ok(ExitCode::SUCCESS)
}
