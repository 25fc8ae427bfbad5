//! The sequence primitives on their own: reversal, histogram and a running
//! count, each built from select/aggregate/selector_width.

use rasp_recogs::seq::{
    aggregate, elementwise, indices, select, selector_width, BinaryOp, Predicate, Sequence,
};

fn main() -> anyhow::Result<()> {
    let tokens = Sequence::symbols(&["the", "cat", "saw", "the", "dog"]);
    let n = tokens.len();
    let idx = indices(n);

    // reverse: query i reads key n-1-i
    let flip = elementwise(BinaryOp::Sub, (n - 1) as f64, &idx)?;
    let reversed = aggregate(&select(&idx, &flip, Predicate::Eq)?, &tokens)?;
    println!("reverse   {:?}", reversed.syms());

    let hist = selector_width(&select(&tokens, &tokens, Predicate::Eq)?);
    println!("histogram {:?}", hist.nums());

    // prefix width: keys at or before the query
    let running = selector_width(&select(&idx, &idx, Predicate::Le)?);
    println!("running   {:?}", running.nums());
    Ok(())
}
