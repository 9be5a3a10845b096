//! Numerical limit-point / limit-circle classification at `z = i`.
//!
//! Two solutions of `(J - z) u = 0` are run forward from independent
//! initial conditions. Forward recursion amplifies the dominant solution,
//! so only its square-summability is examined:
//!
//! 1. tail test: the increment of `S(n) = sum_{k<=n} |u(k)|^2` over the last
//!    window is below `tail_fraction` of `S(n_max)`: limit circle;
//! 2. growth test: `S(n_max) > divergence_factor * S(n_max / 2)`: limit point;
//! 3. exponent test: with window sums `W_k` over `(N_k / r, N_k]`,
//!    `N_k = n_max / r^k`, the local decay exponent of `|u|^2` is
//!    `p_k = 1 - log_r(W_k / W_{k+1})`. A limit circle needs `p_0` clearly
//!    above 1 and not decreasing; a limit point needs `p_0` clearly below 1
//!    and not increasing. Anything else is inconclusive.
//!
//! The trend requirement matters near the critical growth: at `z = i` the
//! dominant solution carries a factor `exp(sum_{k<n} 1/a_k)` whose local
//! exponent drifts slowly, and a drifting exponent is never trusted.

use num_complex::Complex64;
use serde::Serialize;

use super::recurrence::Stepper;
use super::{JacobiError, JacobiMatrix};
use crate::json::{f64_17, vec_f64_17};

pub const MIN_CLASSIFIER_N: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierTolerances {
    pub n_max: usize,
    #[serde(serialize_with = "f64_17")]
    pub tail_fraction: f64,
    #[serde(serialize_with = "f64_17")]
    pub divergence_factor: f64,
    /// Ratio `r` between consecutive window ends.
    pub window_ratio: usize,
    /// Half-width of the band around exponent 1 that is left undecided.
    #[serde(serialize_with = "f64_17")]
    pub exponent_margin: f64,
    /// Allowed change of the exponent between consecutive windows in the
    /// "wrong" direction.
    #[serde(serialize_with = "f64_17")]
    pub trend_tolerance: f64,
}

impl Default for ClassifierTolerances {
    fn default() -> Self {
        ClassifierTolerances {
            n_max: 100_000,
            tail_fraction: 1e-6,
            divergence_factor: 1e6,
            window_ratio: 10,
            exponent_margin: 0.1,
            trend_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    LimitPoint,
    LimitCircle,
    Inconclusive,
}

impl LimitClass {
    /// Deficiency index of the Jacobi matrix implied by the class.
    pub fn deficiency_index(self) -> Option<u64> {
        match self {
            LimitClass::LimitPoint => Some(0),
            LimitClass::LimitCircle => Some(1),
            LimitClass::Inconclusive => None,
        }
    }
}

/// Partial-sum diagnostics of one solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionDiagnostics {
    /// `(u(0), u(1))` as `[re, im, re, im]`.
    #[serde(serialize_with = "vec_f64_17")]
    pub init: Vec<f64>,
    #[serde(serialize_with = "f64_17")]
    pub log10_partial_sum: f64,
    /// Fraction of `S(n_max)` accumulated over the last window.
    #[serde(serialize_with = "f64_17")]
    pub tail_fraction: f64,
    /// `log10(S(n_max) / S(n_max / 2))`.
    #[serde(serialize_with = "f64_17")]
    pub log10_growth: f64,
    /// Local decay exponents `p_0, p_1, ...` (latest window first).
    #[serde(serialize_with = "vec_f64_17")]
    pub exponents: Vec<f64>,
    /// Sample indices of the trajectory.
    pub trajectory_n: Vec<usize>,
    /// `log10 S(n)` at `trajectory_n`.
    #[serde(serialize_with = "vec_f64_17")]
    pub trajectory_log10_partial_sum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitClassification {
    pub class: LimitClass,
    pub deficiency_index: Option<u64>,
    /// Which test decided, or why none did.
    pub decided_by: String,
    #[serde(serialize_with = "vec_f64_17")]
    pub z: Vec<f64>,
    pub tolerances: ClassifierTolerances,
    /// Index into `solutions` of the dominant one.
    pub dominant: usize,
    pub solutions: Vec<SolutionDiagnostics>,
}

/// Classification at the canonical point `z = i`.
pub fn classify_limit(
    j: &JacobiMatrix,
    tol: &ClassifierTolerances,
) -> Result<LimitClassification, JacobiError> {
    classify_limit_at(j, Complex64::new(0.0, 1.0), tol)
}

/// Classification at an arbitrary non-real `z`, for diagnostics.
pub fn classify_limit_at(
    j: &JacobiMatrix,
    z: Complex64,
    tol: &ClassifierTolerances,
) -> Result<LimitClassification, JacobiError> {
    validate(tol)?;
    if z.im == 0.0 {
        return Err(JacobiError::Contract(
            "classification needs a non-real spectral parameter".into(),
        ));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let inits = [(one, zero), (zero, one)];
    let solutions = inits
        .iter()
        .map(|&init| trace_solution(j, z, init, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let dominant = if solutions[1].log10_partial_sum > solutions[0].log10_partial_sum {
        1
    } else {
        0
    };
    let d = &solutions[dominant];
    let (class, decided_by) = decide(d, tol);
    Ok(LimitClassification {
        class,
        deficiency_index: class.deficiency_index(),
        decided_by,
        z: vec![z.re, z.im],
        tolerances: *tol,
        dominant,
        solutions,
    })
}

fn validate(tol: &ClassifierTolerances) -> Result<(), JacobiError> {
    let bad = |m: String| Err(JacobiError::Contract(m));
    if tol.n_max < MIN_CLASSIFIER_N {
        return bad(format!(
            "classifier needs n_max >= {MIN_CLASSIFIER_N}, got {}",
            tol.n_max
        ));
    }
    if tol.window_ratio < 2 || tol.n_max / tol.window_ratio.pow(3) < 1 {
        return bad(format!(
            "window ratio {} needs n_max >= ratio^3",
            tol.window_ratio
        ));
    }
    if !(tol.tail_fraction > 0.0 && tol.tail_fraction < 1.0) {
        return bad(format!("tail_fraction must be in (0, 1), got {}", tol.tail_fraction));
    }
    if !(tol.divergence_factor > 1.0) {
        return bad(format!(
            "divergence_factor must exceed 1, got {}",
            tol.divergence_factor
        ));
    }
    if !(tol.exponent_margin >= 0.0 && tol.trend_tolerance >= 0.0) {
        return bad("exponent margin and trend tolerance must be non-negative".into());
    }
    Ok(())
}

const LN_10: f64 = std::f64::consts::LN_10;

/// `ln(exp(hi) - exp(lo))` for `hi >= lo`.
fn ln_diff(hi: f64, lo: f64) -> f64 {
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (-(lo - hi).exp()).ln_1p()
    }
}

fn trace_solution(
    j: &JacobiMatrix,
    z: Complex64,
    init: (Complex64, Complex64),
    tol: &ClassifierTolerances,
) -> Result<SolutionDiagnostics, JacobiError> {
    let n_max = tol.n_max;
    let r = tol.window_ratio;
    // Window ends n_max / r^k, k = 0..=3, their left ends, and n_max / 2.
    let mut marks: Vec<usize> = (0..=3).map(|k| n_max / r.pow(k)).collect();
    marks.push(n_max / r.pow(4));
    marks.push(n_max / 2);
    let mut trajectory_n: Vec<usize> = Vec::new();
    let mut x = 1.0f64;
    while (x as usize) <= n_max {
        let n = x as usize;
        if trajectory_n.last() != Some(&n) {
            trajectory_n.push(n);
        }
        x *= 10f64.powf(0.25);
    }
    if trajectory_n.last() != Some(&n_max) {
        trajectory_n.push(n_max);
    }

    let mut st = Stepper::new(j, z, init)?;
    let ln_s_at = |n: usize, ls: f64, marks_ln: &mut Vec<(usize, f64)>| {
        if marks.contains(&n) || trajectory_n.contains(&n) {
            marks_ln.push((n, ls));
        }
    };
    let mut recorded: Vec<(usize, f64)> = Vec::new();
    // S(0) only contains |u(0)|^2.
    ln_s_at(0, 2.0 * st.previous().ln_abs(), &mut recorded);
    loop {
        let (_, ls) = st.current();
        ln_s_at(st.index(), ls, &mut recorded);
        if st.index() >= n_max {
            break;
        }
        st.step()?;
    }
    let ln_s = |n: usize| -> f64 {
        recorded
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, v)| *v)
            .expect("every mark is recorded")
    };

    let total = ln_s(n_max);
    let window_ln: Vec<f64> = (0..=2)
        .map(|k| ln_diff(ln_s(n_max / r.pow(k)), ln_s(n_max / r.pow(k + 1))))
        .collect();
    let ln_r = (r as f64).ln();
    let exponents: Vec<f64> = window_ln
        .windows(2)
        .map(|w| 1.0 - (w[0] - w[1]) / ln_r)
        .collect();
    let tail_fraction = (window_ln[0] - total).exp();
    let log10_growth = (total - ln_s(n_max / 2)) / LN_10;
    Ok(SolutionDiagnostics {
        init: vec![init.0.re, init.0.im, init.1.re, init.1.im],
        log10_partial_sum: total / LN_10,
        tail_fraction,
        log10_growth,
        exponents,
        trajectory_log10_partial_sum: trajectory_n.iter().map(|&n| ln_s(n) / LN_10).collect(),
        trajectory_n,
    })
}

fn decide(d: &SolutionDiagnostics, tol: &ClassifierTolerances) -> (LimitClass, String) {
    if d.tail_fraction < tol.tail_fraction {
        return (
            LimitClass::LimitCircle,
            format!(
                "tail test: last window holds {:.3e} of the partial sum",
                d.tail_fraction
            ),
        );
    }
    if d.log10_growth > tol.divergence_factor.log10() {
        return (
            LimitClass::LimitPoint,
            format!(
                "growth test: S(n_max) / S(n_max/2) = 10^{:.3}",
                d.log10_growth
            ),
        );
    }
    let (p0, p1) = (d.exponents[0], d.exponents[1]);
    if !(p0.is_finite() && p1.is_finite()) {
        return (
            LimitClass::Inconclusive,
            "exponent test: non-finite window exponents".into(),
        );
    }
    if p0 > 1.0 + tol.exponent_margin && p0 >= p1 - tol.trend_tolerance {
        return (
            LimitClass::LimitCircle,
            format!("exponent test: |u|^2 ~ n^{:.4} (previous window n^{:.4})", -p0, -p1),
        );
    }
    if p0 < 1.0 - tol.exponent_margin && p0 <= p1 + tol.trend_tolerance {
        return (
            LimitClass::LimitPoint,
            format!("exponent test: |u|^2 ~ n^{:.4} (previous window n^{:.4})", -p0, -p1),
        );
    }
    (
        LimitClass::Inconclusive,
        format!("exponent test undecided: p0 = {p0:.4}, p1 = {p1:.4}"),
    )
}
