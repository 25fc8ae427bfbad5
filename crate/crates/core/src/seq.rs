//! Sequence primitives: select, aggregate, selector width and elementwise maps.
//!
//! Every derived sequence has one value per position. A selector is an N x N
//! boolean matrix indexed `[query][key]`; `select(keys, queries, p)` sets
//! cell `(q, k)` to `p(keys[k], queries[q])`.

use std::fmt;

use thiserror::Error;

/// Default maximum sequence length.
pub const DEFAULT_MAX_LEN: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("cannot compare or mix numeric and symbolic values")]
    KindMismatch,
    #[error("predicate {0} is not defined on symbolic values")]
    SymbolicOrder(Predicate),
    #[error("select needs at least one sequence operand")]
    NoSequence,
    #[error("symbolic aggregate at position {query} selected disagreeing values")]
    AmbiguousSymbol { query: usize },
    #[error("elementwise operation {0} is not defined on symbolic values")]
    SymbolicArithmetic(&'static str),
}

pub type Result<T> = std::result::Result<T, SeqError>;

/// A single numeric or symbolic value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Sym(String),
}

/// A sequence of values, all numeric or all symbolic.
#[derive(Debug, Clone, PartialEq)]
pub enum Sequence {
    Num(Vec<f64>),
    Sym(Vec<String>),
}

impl Sequence {
    pub fn len(&self) -> usize {
        match self {
            Sequence::Num(v) => v.len(),
            Sequence::Sym(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn symbols<S: AsRef<str>>(items: &[S]) -> Sequence {
        Sequence::Sym(items.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn constant(value: f64, n: usize) -> Sequence {
        Sequence::Num(vec![value; n])
    }

    pub fn get(&self, i: usize) -> Value {
        match self {
            Sequence::Num(v) => Value::Num(v[i]),
            Sequence::Sym(v) => Value::Sym(v[i].clone()),
        }
    }

    /// Numeric view; panics on a symbolic sequence.
    pub fn nums(&self) -> &[f64] {
        match self {
            Sequence::Num(v) => v,
            Sequence::Sym(_) => panic!("expected a numeric sequence"),
        }
    }

    pub fn num(&self, i: usize) -> f64 {
        self.nums()[i]
    }

    /// Value at `i` rounded to an integer index.
    pub fn index_at(&self, i: usize) -> usize {
        self.num(i).round().max(0.0) as usize
    }

    pub fn syms(&self) -> &[String] {
        match self {
            Sequence::Sym(v) => v,
            Sequence::Num(_) => panic!("expected a symbolic sequence"),
        }
    }

    /// Numeric map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Sequence {
        Sequence::Num(self.nums().iter().map(|&x| f(x)).collect())
    }

    /// Symbolic map into either kind.
    pub fn map_sym(&self, f: impl Fn(&str) -> Value) -> Result<Sequence> {
        let vals: Vec<Value> = self.syms().iter().map(|s| f(s)).collect();
        from_values(vals)
    }
}

fn from_values(vals: Vec<Value>) -> Result<Sequence> {
    if vals.iter().all(|v| matches!(v, Value::Num(_))) {
        Ok(Sequence::Num(
            vals.into_iter()
                .map(|v| match v {
                    Value::Num(x) => x,
                    Value::Sym(_) => unreachable!(),
                })
                .collect(),
        ))
    } else if vals.iter().all(|v| matches!(v, Value::Sym(_))) {
        Ok(Sequence::Sym(
            vals.into_iter()
                .map(|v| match v {
                    Value::Sym(s) => s,
                    Value::Num(_) => unreachable!(),
                })
                .collect(),
        ))
    } else {
        Err(SeqError::KindMismatch)
    }
}

/// `0..n` as a numeric sequence.
pub fn indices(n: usize) -> Sequence {
    Sequence::Num((0..n).map(|i| i as f64).collect())
}

/// An operand: a sequence or a broadcast scalar.
#[derive(Debug, Clone, Copy)]
pub enum Arg<'a> {
    Seq(&'a Sequence),
    Num(f64),
    Sym(&'a str),
}

impl<'a> From<&'a Sequence> for Arg<'a> {
    fn from(s: &'a Sequence) -> Self {
        Arg::Seq(s)
    }
}

impl From<f64> for Arg<'_> {
    fn from(x: f64) -> Self {
        Arg::Num(x)
    }
}

impl From<usize> for Arg<'_> {
    fn from(x: usize) -> Self {
        Arg::Num(x as f64)
    }
}

impl From<i32> for Arg<'_> {
    fn from(x: i32) -> Self {
        Arg::Num(x as f64)
    }
}

impl<'a> From<&'a str> for Arg<'a> {
    fn from(s: &'a str) -> Self {
        Arg::Sym(s)
    }
}

impl Arg<'_> {
    fn len(&self) -> Option<usize> {
        match self {
            Arg::Seq(s) => Some(s.len()),
            _ => None,
        }
    }

    fn is_sym(&self) -> bool {
        match self {
            Arg::Seq(s) => matches!(s, Sequence::Sym(_)),
            Arg::Num(_) => false,
            Arg::Sym(_) => true,
        }
    }

    fn num_at(&self, i: usize) -> f64 {
        match self {
            Arg::Seq(s) => s.num(i),
            Arg::Num(x) => *x,
            Arg::Sym(_) => unreachable!(),
        }
    }

    fn sym_at(&self, i: usize) -> &str {
        match self {
            Arg::Seq(s) => &s.syms()[i],
            Arg::Sym(x) => x,
            Arg::Num(_) => unreachable!(),
        }
    }
}

fn common_len(a: &Arg, b: &Arg) -> Result<Option<usize>> {
    match (a.len(), b.len()) {
        (Some(x), Some(y)) if x != y => Err(SeqError::LengthMismatch { left: x, right: y }),
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        (None, None) => Ok(None),
    }
}

/// Comparison used by `select` and by indicator maps; evaluated as `p(key, query)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::Eq => "==",
            Predicate::Lt => "<",
            Predicate::Le => "<=",
            Predicate::Gt => ">",
            Predicate::Ge => ">=",
        })
    }
}

impl Predicate {
    pub fn holds(self, key: f64, query: f64) -> bool {
        match self {
            Predicate::Eq => key == query,
            Predicate::Lt => key < query,
            Predicate::Le => key <= query,
            Predicate::Gt => key > query,
            Predicate::Ge => key >= query,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cells {
    /// Row-major `n * n`.
    Dense(Vec<bool>),
    /// Every row equals this key mask.
    KeysOnly(Vec<bool>),
    /// Row `q` is all-true iff `mask[q]`.
    QueriesOnly(Vec<bool>),
}

/// N x N boolean attention pattern, indexed `[query][key]`.
///
/// Selectors built against a scalar operand are stored compactly; the
/// observable matrix is the same.
#[derive(Debug, Clone)]
pub struct Selector {
    n: usize,
    cells: Cells,
}

impl PartialEq for Selector {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.to_matrix() == other.to_matrix()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
}

impl Selector {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, query: usize, key: usize) -> bool {
        match &self.cells {
            Cells::Dense(m) => m[query * self.n + key],
            Cells::KeysOnly(k) => k[key],
            Cells::QueriesOnly(q) => q[query],
        }
    }

    pub fn row(&self, query: usize) -> Vec<bool> {
        (0..self.n).map(|k| self.get(query, k)).collect()
    }

    pub fn to_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|q| self.row(q)).collect()
    }

    pub fn from_matrix(m: &[Vec<bool>]) -> Selector {
        let n = m.len();
        let mut cells = Vec::with_capacity(n * n);
        for row in m {
            assert_eq!(row.len(), n, "selector matrix must be square");
            cells.extend_from_slice(row);
        }
        Selector {
            n,
            cells: Cells::Dense(cells),
        }
    }

    pub fn transpose(&self) -> Selector {
        let n = self.n;
        let mut cells = vec![false; n * n];
        for q in 0..n {
            for k in 0..n {
                cells[k * n + q] = self.get(q, k);
            }
        }
        Selector {
            n,
            cells: Cells::Dense(cells),
        }
    }

    pub fn negate(&self) -> Selector {
        let cells = match &self.cells {
            Cells::Dense(m) => Cells::Dense(m.iter().map(|b| !b).collect()),
            Cells::KeysOnly(k) => Cells::KeysOnly(k.iter().map(|b| !b).collect()),
            Cells::QueriesOnly(q) => Cells::QueriesOnly(q.iter().map(|b| !b).collect()),
        };
        Selector { n: self.n, cells }
    }

    pub fn and(&self, other: &Selector) -> Result<Selector> {
        combine(self, other, Connective::And)
    }

    pub fn or(&self, other: &Selector) -> Result<Selector> {
        combine(self, other, Connective::Or)
    }
}

pub fn combine(a: &Selector, b: &Selector, op: Connective) -> Result<Selector> {
    if a.n != b.n {
        return Err(SeqError::LengthMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let f = |x: bool, y: bool| match op {
        Connective::And => x && y,
        Connective::Or => x || y,
    };
    let zip = |x: &[bool], y: &[bool]| x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect();
    let cells = match (&a.cells, &b.cells) {
        (Cells::KeysOnly(x), Cells::KeysOnly(y)) => Cells::KeysOnly(zip(x, y)),
        (Cells::QueriesOnly(x), Cells::QueriesOnly(y)) => Cells::QueriesOnly(zip(x, y)),
        _ => {
            let n = a.n;
            let mut m = Vec::with_capacity(n * n);
            for q in 0..n {
                for k in 0..n {
                    m.push(f(a.get(q, k), b.get(q, k)));
                }
            }
            Cells::Dense(m)
        }
    };
    Ok(Selector { n: a.n, cells })
}

fn compare(keys: &Arg, kq: usize, queries: &Arg, qi: usize, pred: Predicate) -> bool {
    if keys.is_sym() {
        keys.sym_at(kq) == queries.sym_at(qi)
    } else {
        pred.holds(keys.num_at(kq), queries.num_at(qi))
    }
}

/// `matrix[q][k] = pred(keys[k], queries[q])`; scalars broadcast.
pub fn select<'a, 'b>(
    keys: impl Into<Arg<'a>>,
    queries: impl Into<Arg<'b>>,
    pred: Predicate,
) -> Result<Selector> {
    let keys = keys.into();
    let queries = queries.into();
    if keys.is_sym() != queries.is_sym() {
        return Err(SeqError::KindMismatch);
    }
    if keys.is_sym() && pred != Predicate::Eq {
        return Err(SeqError::SymbolicOrder(pred));
    }
    let n = common_len(&keys, &queries)?.ok_or(SeqError::NoSequence)?;
    let cells = match (keys.len(), queries.len()) {
        (Some(_), None) => Cells::KeysOnly(
            (0..n)
                .map(|k| compare(&keys, k, &queries, 0, pred))
                .collect(),
        ),
        (None, Some(_)) => Cells::QueriesOnly(
            (0..n)
                .map(|q| compare(&keys, 0, &queries, q, pred))
                .collect(),
        ),
        _ => {
            let mut m = Vec::with_capacity(n * n);
            for q in 0..n {
                for k in 0..n {
                    m.push(compare(&keys, k, &queries, q, pred));
                }
            }
            Cells::Dense(m)
        }
    };
    Ok(Selector { n, cells })
}

/// Conjunction of several selectors.
pub fn select_all(parts: &[Selector]) -> Result<Selector> {
    let (first, rest) = parts.split_first().ok_or(SeqError::NoSequence)?;
    rest.iter().try_fold(first.clone(), |acc, s| acc.and(s))
}

fn aggregate_row(row: impl Iterator<Item = bool>, values: &Arg, q: usize) -> Result<Value> {
    let picked: Vec<usize> = row
        .enumerate()
        .filter(|(_, b)| *b)
        .map(|(k, _)| k)
        .collect();
    if values.is_sym() {
        let mut out: Option<&str> = None;
        for &k in &picked {
            let v = values.sym_at(k);
            match out {
                None => out = Some(v),
                Some(prev) if prev != v => return Err(SeqError::AmbiguousSymbol { query: q }),
                _ => {}
            }
        }
        Ok(Value::Sym(out.unwrap_or("").to_string()))
    } else if picked.is_empty() {
        Ok(Value::Num(0.0))
    } else {
        let sum: f64 = picked.iter().map(|&k| values.num_at(k)).sum();
        Ok(Value::Num(sum / picked.len() as f64))
    }
}

/// Mean of selected values per query row (numeric); the shared selected
/// symbol (symbolic). Empty rows give 0 or the empty symbol.
pub fn aggregate<'a>(sel: &Selector, values: impl Into<Arg<'a>>) -> Result<Sequence> {
    let values = values.into();
    if let Some(len) = values.len() {
        if len != sel.n {
            return Err(SeqError::LengthMismatch {
                left: sel.n,
                right: len,
            });
        }
    }
    let n = sel.n;
    match &sel.cells {
        Cells::KeysOnly(mask) => {
            let v = aggregate_row(mask.iter().copied(), &values, 0)?;
            from_values(vec![v; n])
        }
        Cells::QueriesOnly(mask) => {
            let full = aggregate_row(std::iter::repeat_n(true, n), &values, 0);
            let empty = aggregate_row(std::iter::repeat_n(false, n), &values, 0)?;
            let mut out = Vec::with_capacity(n);
            for (q, &on) in mask.iter().enumerate() {
                out.push(if on {
                    full.clone()
                        .map_err(|_| SeqError::AmbiguousSymbol { query: q })?
                } else {
                    empty.clone()
                });
            }
            from_values(out)
        }
        Cells::Dense(_) => {
            let out = (0..n)
                .map(|q| aggregate_row((0..n).map(|k| sel.get(q, k)), &values, q))
                .collect::<Result<Vec<_>>>()?;
            from_values(out)
        }
    }
}

/// Number of selected keys per query row.
pub fn selector_width(sel: &Selector) -> Sequence {
    let n = sel.n;
    match &sel.cells {
        Cells::KeysOnly(mask) => Sequence::constant(mask.iter().filter(|b| **b).count() as f64, n),
        Cells::QueriesOnly(mask) => Sequence::Num(
            mask.iter()
                .map(|&b| if b { n as f64 } else { 0.0 })
                .collect(),
        ),
        Cells::Dense(m) => Sequence::Num(
            m.chunks(n.max(1))
                .take(n)
                .map(|r| r.iter().filter(|b| **b).count() as f64)
                .collect(),
        ),
    }
}

/// Binary elementwise operations. Comparisons yield 0/1 indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    And,
    Or,
    Cmp(Predicate),
}

impl BinaryOp {
    fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
            BinaryOp::Cmp(_) => "compare",
        }
    }
}

fn bit(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Elementwise `a op b` with scalar broadcast.
pub fn elementwise<'a, 'b>(
    op: BinaryOp,
    a: impl Into<Arg<'a>>,
    b: impl Into<Arg<'b>>,
) -> Result<Sequence> {
    let a = a.into();
    let b = b.into();
    let n = common_len(&a, &b)?.ok_or(SeqError::NoSequence)?;
    if a.is_sym() != b.is_sym() {
        return Err(SeqError::KindMismatch);
    }
    if a.is_sym() {
        return match op {
            BinaryOp::Cmp(Predicate::Eq) => Ok(Sequence::Num(
                (0..n).map(|i| bit(a.sym_at(i) == b.sym_at(i))).collect(),
            )),
            other => Err(SeqError::SymbolicArithmetic(other.name())),
        };
    }
    let out = (0..n)
        .map(|i| {
            let (x, y) = (a.num_at(i), b.num_at(i));
            match op {
                BinaryOp::Add => x + y,
                BinaryOp::Sub => x - y,
                BinaryOp::Mul => x * y,
                BinaryOp::And => bit(x != 0.0 && y != 0.0),
                BinaryOp::Or => bit(x != 0.0 || y != 0.0),
                BinaryOp::Cmp(p) => bit(p.holds(x, y)),
            }
        })
        .collect();
    Ok(Sequence::Num(out))
}

/// 0/1 indicator of `pred(a, b)`.
pub fn indicator<'a, 'b>(
    a: impl Into<Arg<'a>>,
    pred: Predicate,
    b: impl Into<Arg<'b>>,
) -> Result<Sequence> {
    elementwise(BinaryOp::Cmp(pred), a, b)
}

/// `cond != 0 ? then : otherwise`, elementwise.
pub fn ternary<'a, 'b>(
    cond: &Sequence,
    then: impl Into<Arg<'a>>,
    otherwise: impl Into<Arg<'b>>,
) -> Result<Sequence> {
    let t = then.into();
    let e = otherwise.into();
    let n = cond.len();
    for arg in [&t, &e] {
        if let Some(len) = arg.len() {
            if len != n {
                return Err(SeqError::LengthMismatch {
                    left: n,
                    right: len,
                });
            }
        }
    }
    if t.is_sym() != e.is_sym() {
        return Err(SeqError::KindMismatch);
    }
    let c = cond.nums();
    if t.is_sym() {
        Ok(Sequence::Sym(
            (0..n)
                .map(|i| {
                    if c[i] != 0.0 {
                        t.sym_at(i)
                    } else {
                        e.sym_at(i)
                    }
                    .to_string()
                })
                .collect(),
        ))
    } else {
        Ok(Sequence::Num(
            (0..n)
                .map(|i| {
                    if c[i] != 0.0 {
                        t.num_at(i)
                    } else {
                        e.num_at(i)
                    }
                })
                .collect(),
        ))
    }
}

/// Sum over selected keys, computed as mean times width.
pub fn aggregate_sum(sel: &Selector, values: &Sequence) -> Result<Sequence> {
    let mean = aggregate(sel, values)?;
    let width = selector_width(sel);
    Ok(elementwise(BinaryOp::Mul, &mean, &width)?.map(|x| x.round()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nums(v: &[f64]) -> Sequence {
        Sequence::Num(v.to_vec())
    }

    #[test]
    fn select_scalar_key_marks_query_rows() {
        let pos = nums(&[1.0, 7.0, 16.0]);
        let s = select(7.0, &pos, Predicate::Eq).unwrap();
        assert_eq!(
            s.to_matrix(),
            vec![vec![false; 3], vec![true; 3], vec![false; 3]]
        );
    }

    #[test]
    fn shifted_index_select() {
        let idx = indices(3);
        let plus = idx.map(|x| x + 1.0);
        let s = select(&plus, &idx, Predicate::Eq).unwrap();
        for (q, row) in s.to_matrix().iter().enumerate() {
            for (k, &cell) in row.iter().enumerate() {
                assert_eq!(cell, (q, k) == (1, 0) || (q, k) == (2, 1));
            }
        }
    }

    #[test]
    fn aggregate_mean_and_empty_rows() {
        let idx = indices(4);
        let sel = select(&idx, &idx, Predicate::Lt).unwrap();
        let out = aggregate(&sel, &idx).unwrap();
        assert_eq!(out.nums(), &[0.0, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn symbolic_aggregate() {
        let toks = Sequence::symbols(&["a", "b", "a"]);
        let one = select(&indices(3), 1.0, Predicate::Eq).unwrap();
        assert_eq!(aggregate(&one, &toks).unwrap().syms(), &["b", "b", "b"]);
        let none = select(&indices(3), 9.0, Predicate::Eq).unwrap();
        assert_eq!(aggregate(&none, &toks).unwrap().syms(), &["", "", ""]);
        let two = select(&toks, "a", Predicate::Eq).unwrap();
        assert_eq!(aggregate(&two, &toks).unwrap().syms(), &["a", "a", "a"]);
        let all = select(&indices(3), 5.0, Predicate::Lt).unwrap();
        assert!(matches!(
            aggregate(&all, &toks),
            Err(SeqError::AmbiguousSymbol { .. })
        ));
    }

    #[test]
    fn width_counts_rows() {
        let idx = indices(5);
        let sel = select(&idx, &idx, Predicate::Le).unwrap();
        assert_eq!(selector_width(&sel).nums(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn kind_and_length_errors() {
        let a = indices(3);
        let b = indices(4);
        let s = Sequence::symbols(&["x", "y", "z"]);
        assert!(matches!(
            select(&a, &b, Predicate::Eq),
            Err(SeqError::LengthMismatch { .. })
        ));
        assert_eq!(
            select(&a, &s, Predicate::Eq).unwrap_err(),
            SeqError::KindMismatch
        );
        assert_eq!(
            select(&s, "x", Predicate::Lt).unwrap_err(),
            SeqError::SymbolicOrder(Predicate::Lt)
        );
        let s3 = select(&a, &a, Predicate::Eq).unwrap();
        let s4 = select(&b, &b, Predicate::Eq).unwrap();
        assert!(s3.and(&s4).is_err());
    }

    #[test]
    fn elementwise_ops() {
        let a = nums(&[0.0, 1.0, 2.0]);
        assert_eq!(
            elementwise(BinaryOp::Add, &a, 1.0).unwrap().nums(),
            &[1.0, 2.0, 3.0]
        );
        assert_eq!(
            indicator(&a, Predicate::Ge, 1.0).unwrap().nums(),
            &[0.0, 1.0, 1.0]
        );
        let t = ternary(&a, 5.0, &a).unwrap();
        assert_eq!(t.nums(), &[0.0, 5.0, 5.0]);
    }

    #[test]
    fn compact_and_dense_agree() {
        let idx = indices(4);
        let v = nums(&[3.0, 1.0, 4.0, 1.0]);
        let compact = select(&v, 1.0, Predicate::Eq).unwrap();
        let dense = select(&v, &Sequence::constant(1.0, 4), Predicate::Eq).unwrap();
        assert_eq!(compact, dense);
        assert_eq!(
            aggregate(&compact, &idx).unwrap(),
            aggregate(&dense, &idx).unwrap()
        );
        assert_eq!(selector_width(&compact), selector_width(&dense));
        let q = select(1.0, &v, Predicate::Eq).unwrap();
        let qd = select(&Sequence::constant(1.0, 4), &v, Predicate::Eq).unwrap();
        assert_eq!(q, qd);
        assert_eq!(aggregate(&q, &idx).unwrap(), aggregate(&qd, &idx).unwrap());
        assert_eq!(selector_width(&q), selector_width(&qd));
        let mixed = compact.and(&q).unwrap();
        let mixed_d = dense.and(&qd).unwrap();
        assert_eq!(mixed, mixed_d);
    }
}
