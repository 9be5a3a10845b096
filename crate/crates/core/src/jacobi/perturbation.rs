//! Bounded differences between Jacobi matrices.
//!
//! A finite scan alone never proves that `J1 - J2` is bounded. The bound is
//! `certified` only when the scanned part is complemented by analytic tail
//! bounds: [`certified_difference_tail`] for the off-diagonals and known
//! diagonal bounds for `b`.

use serde::Serialize;

use super::{certified_difference_tail, JacobiError, JacobiMatrix};
use crate::json::{f64_17, opt_f64_17};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationBound {
    /// `max(sup_a, sup_b)`.
    #[serde(serialize_with = "f64_17")]
    pub sup_estimate: f64,
    /// `max_{n <= n_max} |a1_n - a2_n|`.
    #[serde(serialize_with = "f64_17")]
    pub sup_a: f64,
    /// `max_{n <= n_max} |b1_n - b2_n|`.
    #[serde(serialize_with = "f64_17")]
    pub sup_b: f64,
    pub scanned_up_to: usize,
    /// Certified bound on `|a1_n - a2_n|` for `n > n_max`.
    #[serde(serialize_with = "opt_f64_17")]
    pub tail_bound_a: Option<f64>,
    /// Certified bound on `|b1_n - b2_n|` for `n > n_max`.
    #[serde(serialize_with = "opt_f64_17")]
    pub tail_bound_b: Option<f64>,
    pub certified: bool,
    /// Relative bound `a` in `|(J1 - J2) f| <= a |J2 f| + b |f|`; zero for
    /// a bounded difference.
    #[serde(serialize_with = "f64_17")]
    pub relative_a: f64,
    /// Absolute bound `b = 2 sup|da| + sup|db|`, over all indices when
    /// certified and over the scan otherwise.
    #[serde(serialize_with = "f64_17")]
    pub relative_b: f64,
}

pub fn bounded_difference(
    j1: &JacobiMatrix,
    j2: &JacobiMatrix,
    n_max: usize,
) -> Result<PerturbationBound, JacobiError> {
    let mut sup_a = 0.0f64;
    let mut sup_b = 0.0f64;
    for n in 0..=n_max {
        sup_a = sup_a.max((j1.a(n)? - j2.a(n)?).abs());
        sup_b = sup_b.max((j1.b(n)? - j2.b(n)?).abs());
    }
    let tail_bound_a = match (j1.rule(), j2.rule()) {
        (Some(r1), Some(r2)) => certified_difference_tail(r1, r2, n_max + 1),
        _ => None,
    };
    let tail_bound_b = match (j1.diagonal_bound(), j2.diagonal_bound()) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let certified = tail_bound_a.is_some() && tail_bound_b.is_some();
    let da = sup_a.max(tail_bound_a.unwrap_or(0.0));
    let db = sup_b.max(tail_bound_b.unwrap_or(0.0));
    Ok(PerturbationBound {
        sup_estimate: sup_a.max(sup_b),
        sup_a,
        sup_b,
        scanned_up_to: n_max,
        tail_bound_a,
        tail_bound_b,
        certified,
        relative_a: 0.0,
        relative_b: 2.0 * da + db,
    })
}
