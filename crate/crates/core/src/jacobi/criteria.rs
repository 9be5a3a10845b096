//! Carleman and Berezanskii criteria.
//!
//! * Carleman: `sum 1/a_n = inf` implies essential self-adjointness.
//! * Berezanskii: `sum 1/a_n < inf`, eventual log-concavity
//!   `a_{n-1} a_{n+1} <= a_n^2` and bounded `b_n` imply deficiency index 1.
//!
//! Registered [`AsymptoticRule`](super::AsymptoticRule)s are decisive;
//! numerical scans only decide when no rule applies, and a scan that
//! contradicts a rule is reported as an internal inconsistency.

use serde::Serialize;

use super::{CompensatedSum, JacobiError, JacobiMatrix};
use crate::json::opt_f64_17;

pub const MIN_CARLEMAN_N: usize = 10;

/// Consecutive clean indices required at the end of a log-concavity scan.
pub const DEFAULT_CLEAN_TAIL: usize = 100;

/// Relative slack on `a_{n-1} a_{n+1} / a_n^2 <= 1`, for rounding only.
const LOG_CONCAVITY_SLACK: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Diagnostic payload of a criterion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(serialize_with = "opt_f64_17", skip_serializing_if = "Option::is_none")]
    pub partial_sum: Option<f64>,
    #[serde(serialize_with = "opt_f64_17", skip_serializing_if = "Option::is_none")]
    pub tail_upper: Option<f64>,
    #[serde(serialize_with = "opt_f64_17", skip_serializing_if = "Option::is_none")]
    pub tail_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_violation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<usize>,
    #[serde(serialize_with = "opt_f64_17", skip_serializing_if = "Option::is_none")]
    pub diagonal_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: &'static str,
    pub verdict: Verdict,
    pub witness: Witness,
}

/// `sum_{n <= n_max} 1/a_n` (compensated).
pub fn reciprocal_partial_sum(j: &JacobiMatrix, n_max: usize) -> Result<f64, JacobiError> {
    let mut s = CompensatedSum::default();
    for n in 0..=n_max {
        s.add(1.0 / j.a(n)?);
    }
    Ok(s.value())
}

pub fn carleman_test(
    j: &JacobiMatrix,
    n_max: usize,
    divergence_threshold: f64,
) -> Result<CriterionResult, JacobiError> {
    if n_max < MIN_CARLEMAN_N {
        return Err(JacobiError::Contract(format!(
            "carleman_test needs n_max >= {MIN_CARLEMAN_N}, got {n_max}"
        )));
    }
    let partial = reciprocal_partial_sum(j, n_max)?;
    let numeric_diverges = partial > divergence_threshold;
    let mut witness = Witness {
        n_max: Some(n_max),
        partial_sum: Some(partial),
        ..Default::default()
    };
    let verdict = match j.rule().map(|r| r.reciprocal_series(n_max)) {
        Some(facts) if facts.diverges => {
            witness.rule = Some(facts.comparison);
            Verdict::Holds
        }
        Some(facts) => {
            if numeric_diverges {
                return Err(JacobiError::InternalInconsistency(format!(
                    "rule '{}' says sum 1/a_n converges but the partial sum {partial} \
                     exceeds the divergence threshold {divergence_threshold}",
                    facts.comparison
                )));
            }
            witness.rule = Some(facts.comparison);
            witness.tail_upper = facts.tail_upper;
            witness.tail_exact = facts.tail_exact;
            Verdict::Fails
        }
        None if numeric_diverges => {
            witness.note = Some(format!(
                "partial sum exceeds the divergence threshold {divergence_threshold}"
            ));
            Verdict::Holds
        }
        None => Verdict::Inconclusive,
    };
    Ok(CriterionResult {
        criterion: "carleman",
        verdict,
        witness,
    })
}

/// Eventual log-concavity scan over `1 <= n <= n_max`.
///
/// Requires a registered rule establishing `sum 1/a_n < inf`.
pub fn berezanskii_test(
    j: &JacobiMatrix,
    n_max: usize,
    min_clean_tail: usize,
) -> Result<CriterionResult, JacobiError> {
    let rule = match j.rule() {
        Some(r) if !r.reciprocal_series(n_max).diverges => *r,
        _ => {
            return Err(JacobiError::Contract(
                "berezanskii_test requires sum 1/a_n < inf established by a registered rule"
                    .into(),
            ))
        }
    };
    if n_max < 2 {
        return Err(JacobiError::Contract(format!(
            "berezanskii_test needs n_max >= 2, got {n_max}"
        )));
    }
    let mut first = None;
    let mut last = None;
    let mut count = 0usize;
    let mut diag_sup = j.b(0)?.abs();
    let (mut a_prev, mut a_cur) = (j.a(0)?, j.a(1)?);
    for n in 1..=n_max {
        let a_next = j.a(n + 1)?;
        diag_sup = diag_sup.max(j.b(n)?.abs());
        let ratio = (a_prev / a_cur) * (a_next / a_cur);
        if ratio > 1.0 + LOG_CONCAVITY_SLACK {
            first.get_or_insert(n);
            last = Some(n);
            count += 1;
        }
        a_prev = a_cur;
        a_cur = a_next;
    }
    let mut witness = Witness {
        n_max: Some(n_max),
        first_violation: first,
        last_violation: last,
        violations: Some(count),
        diagonal_bound: Some(j.diagonal_bound().unwrap_or(diag_sup)),
        ..Default::default()
    };

    if let Some(n0) = rule.log_concave_from() {
        if let Some(l) = last.filter(|&l| l >= n0) {
            return Err(JacobiError::InternalInconsistency(format!(
                "log-concavity is known from n = {n0} but the scan found a violation at n = {l}"
            )));
        }
        witness.rule = Some(format!("a_(n-1) a_(n+1) <= a_n^2 for n >= {n0}"));
        witness.n0 = Some(n0);
        return Ok(CriterionResult {
            criterion: "berezanskii",
            verdict: Verdict::Holds,
            witness,
        });
    }

    let clean = n_max - last.unwrap_or(0);
    let verdict = if n_max < min_clean_tail {
        witness.note = Some(format!("scan shorter than {min_clean_tail} indices"));
        Verdict::Inconclusive
    } else if clean >= min_clean_tail {
        witness.n0 = Some(last.map_or(1, |l| l + 1));
        Verdict::Holds
    } else if last.is_some_and(|l| l + 1 >= n_max) {
        witness.note = Some("violations persist up to n_max".into());
        Verdict::Fails
    } else {
        witness.note = Some(format!(
            "only {clean} clean indices at the tail, {min_clean_tail} required"
        ));
        Verdict::Inconclusive
    };
    Ok(CriterionResult {
        criterion: "berezanskii",
        verdict,
        witness,
    })
}
