//! Semantic match ignores variable numbering and conjunct order; string
//! match does not.

use rasp_recogs::{sem_equal, string_exact_match, LogicalForm};

fn main() -> anyhow::Result<()> {
    let gold = "* boy ( 1 ) ; * girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )";
    for other in [
        gold,
        "* boy ( 7 ) ; * girl ( 3 ) ; paint ( 5 ) AND theme ( 5 , 3 ) AND agent ( 5 , 7 )",
        "* boy ( 1 ) ; * girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 4 ) AND theme ( 2 , 1 )",
        "boy ( 1 ) ; * girl ( 4 ) ; paint ( 2 ) AND agent ( 2 , 1 ) AND theme ( 2 , 4 )",
    ] {
        let sem = sem_equal(&LogicalForm::parse(gold)?, &LogicalForm::parse(other)?);
        println!(
            "sem={sem:<5} exact={:<5} {other}",
            string_exact_match(gold, other)
        );
    }
    Ok(())
}
