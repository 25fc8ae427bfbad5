//! Per-split scoring and exact binomial confidence intervals.

use std::fmt;

use statrs::function::beta::beta_reg;
use thiserror::Error;

use crate::lf::{sem_equal, string_exact_match, LogicalForm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("need 0 <= k <= n and n >= 1 (k={k}, n={n})")]
    BadCounts { k: u64, n: u64 },
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
}

const BISECT_TOL: f64 = 1e-10;

/// `x` with `I_x(a, b) = p`, by bisection.
fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper-Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, alpha: f64) -> Result<(f64, f64), ScoreError> {
    if n == 0 || k > n {
        return Err(ScoreError::BadCounts { k, n });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ScoreError::BadAlpha(alpha));
    }
    let (kf, nf) = (k as f64, n as f64);
    let low = if k == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, kf, nf - kf + 1.0)
    };
    let high = if k == n {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, kf + 1.0, nf - kf)
    };
    Ok((low, high))
}

/// Accuracy on one split. Interval is for the semantic match rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub split: String,
    pub n: u64,
    pub sem_matches: u64,
    pub exact_matches: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ScoreReport {
    pub fn sem_rate(&self) -> f64 {
        self.sem_matches as f64 / self.n as f64
    }

    pub fn exact_rate(&self) -> f64 {
        self.exact_matches as f64 / self.n as f64
    }

    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        format!(
            "split={}\nn={}\nsem={:.6}\nem={:.6}\nci_low={:.6}\nci_high={:.6}\n",
            self.split,
            self.n,
            self.sem_rate(),
            self.exact_rate(),
            self.ci_low,
            self.ci_high
        )
    }
}

impl fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} n={:<6} SEM {:>7.2}% ({:.2}-{:.2}%)  EM {:>7.2}%",
            self.split,
            self.n,
            100.0 * self.sem_rate(),
            100.0 * self.ci_low,
            100.0 * self.ci_high,
            100.0 * self.exact_rate()
        )
    }
}

/// Scores `(gold, output)` pairs; a missing or unparsable output counts as a miss.
pub fn score_split<G: AsRef<str>, O: AsRef<str>>(
    split: &str,
    pairs: &[(G, Option<O>)],
) -> Result<ScoreReport, ScoreError> {
    let n = pairs.len() as u64;
    let mut sem = 0;
    let mut exact = 0;
    for (gold, out) in pairs {
        let Some(out) = out else { continue };
        let (gold, out) = (gold.as_ref(), out.as_ref());
        if string_exact_match(gold, out) {
            exact += 1;
        }
        if let (Ok(g), Ok(o)) = (LogicalForm::parse(gold), LogicalForm::parse(out)) {
            if sem_equal(&g, &o) {
                sem += 1;
            }
        }
    }
    let (ci_low, ci_high) = clopper_pearson(sem, n, 0.05)?;
    Ok(ScoreReport {
        split: split.to_string(),
        n,
        sem_matches: sem,
        exact_matches: exact,
        ci_low,
        ci_high,
    })
}
