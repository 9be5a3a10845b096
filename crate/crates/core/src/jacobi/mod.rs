//! Jacobi matrices: semi-infinite symmetric tridiagonal matrices with
//! positive off-diagonal `a_n` and real diagonal `b_n`, `n >= 0`.
//!
//! Coefficients are evaluated lazily, so a matrix generated by a rule can be
//! scanned to any index. A matrix may also carry an [`AsymptoticRule`]: a
//! small piece of analytic knowledge (comparison series, log-concavity,
//! comparison matrices) that the criteria consult before any numerical scan.

pub mod classify;
pub mod criteria;
pub mod perturbation;
pub mod recurrence;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::graph::antitree::sphere_size;
use crate::graph::GraphError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobiError {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("coefficient index {index} is beyond the known range (< {len})")]
    OutOfRange { index: usize, len: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type CoefficientFn = Arc<dyn Fn(usize) -> Result<f64, JacobiError> + Send + Sync>;

/// A coefficient sequence `n -> c_n`.
#[derive(Clone)]
pub enum Coefficients {
    Constant(f64),
    Sequence(Arc<[f64]>),
    Rule(CoefficientFn),
}

impl Coefficients {
    pub fn rule(f: impl Fn(usize) -> Result<f64, JacobiError> + Send + Sync + 'static) -> Self {
        Coefficients::Rule(Arc::new(f))
    }

    pub fn eval(&self, n: usize) -> Result<f64, JacobiError> {
        match self {
            Coefficients::Constant(c) => Ok(*c),
            Coefficients::Sequence(s) => s.get(n).copied().ok_or(JacobiError::OutOfRange {
                index: n,
                len: s.len(),
            }),
            Coefficients::Rule(f) => f(n),
        }
    }

    fn known_len(&self) -> Option<usize> {
        match self {
            Coefficients::Sequence(s) => Some(s.len()),
            _ => None,
        }
    }
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Constant(c) => write!(f, "Constant({c})"),
            Coefficients::Sequence(s) => write!(f, "Sequence(len = {})", s.len()),
            Coefficients::Rule(_) => write!(f, "Rule(..)"),
        }
    }
}

/// Analytic facts about the off-diagonal sequence of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AsymptoticRule {
    /// `a_n = sqrt(s_n s_{n+1})`, `s_0 = 1`, `s_n = floor(n^alpha)`.
    AntitreeFloor { alpha: f64 },
    /// `a_0 = 1`, `a_n = (n (n + 1))^(alpha / 2)` for `n >= 1`.
    AntitreeExact { alpha: f64 },
    /// `lower * n^exponent <= a_n <= upper * n^exponent` for `n >= from`.
    PowerLaw {
        exponent: f64,
        lower: f64,
        upper: f64,
        from: usize,
    },
    /// `a_n >= constant * ratio^n` for `n >= from`, `ratio > 1`.
    Geometric {
        ratio: f64,
        constant: f64,
        from: usize,
    },
}

/// What a rule says about `sum 1/a_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFacts {
    pub diverges: bool,
    pub comparison: String,
    /// Upper bound on `sum_{k > n} 1/a_k`, when the rule supplies one at `n`.
    pub tail_upper: Option<f64>,
    /// Exact value of `sum_{k > n} 1/a_k`, for telescoping cases.
    pub tail_exact: Option<f64>,
}

impl AsymptoticRule {
    /// Divergence or convergence of `sum 1/a_n`, with tail bounds past `n`.
    pub fn reciprocal_series(&self, n: usize) -> SeriesFacts {
        let nf = n as f64;
        match *self {
            AsymptoticRule::AntitreeFloor { alpha } | AsymptoticRule::AntitreeExact { alpha } => {
                let floor = matches!(self, AsymptoticRule::AntitreeFloor { .. });
                if alpha <= 1.0 {
                    return SeriesFacts {
                        diverges: true,
                        comparison: format!(
                            "1/a_n >= (n+1)^-{alpha} and sum (n+1)^-alpha diverges for alpha <= 1"
                        ),
                        tail_upper: None,
                        tail_exact: None,
                    };
                }
                // Floor sizes: s_k >= k^alpha / 2 once k^alpha >= 2, so a_k >= k^alpha / 2.
                let (factor, valid_from) = if floor {
                    (2.0, 2f64.powf(1.0 / alpha).ceil())
                } else {
                    (1.0, 1.0)
                };
                let tail_upper = (nf >= valid_from)
                    .then(|| factor * nf.powf(1.0 - alpha) / (alpha - 1.0));
                let tail_exact = (alpha == 2.0).then(|| 1.0 / (nf + 1.0));
                SeriesFacts {
                    diverges: false,
                    comparison: if floor {
                        format!("1/a_n <= 2 n^-{alpha} for n^alpha >= 2")
                    } else {
                        format!("1/a_n <= n^-{alpha} for n >= 1")
                    },
                    tail_upper,
                    tail_exact,
                }
            }
            AsymptoticRule::PowerLaw {
                exponent,
                lower,
                upper,
                from,
            } => {
                if exponent <= 1.0 {
                    SeriesFacts {
                        diverges: true,
                        comparison: format!("1/a_n >= n^-{exponent} / {upper}"),
                        tail_upper: None,
                        tail_exact: None,
                    }
                } else {
                    SeriesFacts {
                        diverges: false,
                        comparison: format!("1/a_n <= n^-{exponent} / {lower}"),
                        tail_upper: (n >= from.max(1))
                            .then(|| nf.powf(1.0 - exponent) / ((exponent - 1.0) * lower)),
                        tail_exact: None,
                    }
                }
            }
            AsymptoticRule::Geometric {
                ratio,
                constant,
                from,
            } => SeriesFacts {
                diverges: false,
                comparison: format!("1/a_n <= {ratio}^-n / {constant}"),
                tail_upper: (n + 1 >= from)
                    .then(|| ratio.powf(-(nf + 1.0)) / (constant * (1.0 - 1.0 / ratio))),
                tail_exact: None,
            },
        }
    }

    /// Index from which `a_{n-1} a_{n+1} <= a_n^2` is known to hold.
    pub fn log_concave_from(&self) -> Option<usize> {
        match *self {
            // (n-1)(n+2) <= n(n+1) for n >= 2; n = 1 fails because a_0 = 1.
            AsymptoticRule::AntitreeExact { .. } => Some(2),
            AsymptoticRule::AntitreeFloor { alpha } if alpha.fract() == 0.0 => Some(2),
            _ => None,
        }
    }

    /// A comparison matrix whose off-diagonal differs from this one by a
    /// bounded amount, with a certified bound on `|a_n - a~_n|` for all
    /// `n >= from`.
    pub fn comparison(&self) -> Option<JacobiMatrix> {
        match *self {
            AsymptoticRule::AntitreeFloor { alpha } => Some(JacobiMatrix::antitree_exact(alpha)),
            _ => None,
        }
    }
}

/// Certified bound on `|a_n - a~_n|` for all `n >= from`, for a pair of
/// rules, if one is known.
pub fn certified_difference_tail(r1: &AsymptoticRule, r2: &AsymptoticRule, from: usize) -> Option<f64> {
    use AsymptoticRule::*;
    match (*r1, *r2) {
        (AntitreeFloor { alpha: a1 }, AntitreeExact { alpha: a2 })
        | (AntitreeExact { alpha: a2 }, AntitreeFloor { alpha: a1 })
            if a1 == a2 =>
        {
            if a1.fract() == 0.0 {
                return Some(0.0);
            }
            // 0 <= a~_n - a_n <= (n^a + (n+1)^a - 1) / (a~_n + sqrt((n^a - 1)((n+1)^a - 1)))
            //                  <= ((1 + 1/n)^a + 1) / (2 - n^-a), decreasing to 1.
            let n = from.max(1) as f64;
            Some(((1.0 + 1.0 / n).powf(a1) + 1.0) / (2.0 - n.powf(-a1)))
        }
        (a, b) if a == b => Some(0.0),
        _ => None,
    }
}

/// Jacobi matrix `(Ju)(n) = a_n u(n+1) + b_n u(n) + a_{n-1} u(n-1)`,
/// `a_{-1} = 0`.
#[derive(Clone, Debug)]
pub struct JacobiMatrix {
    name: String,
    a: Coefficients,
    b: Coefficients,
    rule: Option<AsymptoticRule>,
    diagonal_bound: Option<f64>,
}

impl JacobiMatrix {
    pub fn new(name: impl Into<String>, a: Coefficients, b: Coefficients) -> Self {
        let diagonal_bound = match b {
            Coefficients::Constant(c) => Some(c.abs()),
            _ => None,
        };
        JacobiMatrix {
            name: name.into(),
            a,
            b,
            rule: None,
            diagonal_bound,
        }
    }

    /// Finite coefficient sequences; `b` may be shorter than `a` only if empty
    /// (treated as zero).
    pub fn from_sequences(a: Vec<f64>, b: Vec<f64>) -> Result<Self, JacobiError> {
        if let Some(pos) = a.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(JacobiError::InvariantViolation(format!(
                "a_{pos} = {} is not positive",
                a[pos]
            )));
        }
        let b = if b.is_empty() {
            Coefficients::Constant(0.0)
        } else {
            Coefficients::Sequence(b.into())
        };
        Ok(JacobiMatrix::new("sequence", Coefficients::Sequence(a.into()), b))
    }

    /// Constant coefficients; `a = 1, b = 0` is the free Jacobi matrix.
    pub fn constant(a: f64, b: f64) -> Result<Self, JacobiError> {
        if !(a.is_finite() && a > 0.0) || !b.is_finite() {
            return Err(JacobiError::InvariantViolation(format!(
                "constant Jacobi matrix needs a > 0 and finite b, got a = {a}, b = {b}"
            )));
        }
        Ok(JacobiMatrix::new(
            format!("constant(a={a}, b={b})"),
            Coefficients::Constant(a),
            Coefficients::Constant(b),
        ))
    }

    /// Radial reduction of the power-law antitree:
    /// `a_n = sqrt(s_n s_{n+1})`, `b_n = 0`.
    pub fn antitree_floor(alpha: f64) -> Result<Self, JacobiError> {
        sphere_size(alpha, 0)?;
        let a = Coefficients::rule(move |n| {
            let s0 = sphere_size(alpha, n as u64)? as f64;
            let s1 = sphere_size(alpha, n as u64 + 1)? as f64;
            Ok((s0 * s1).sqrt())
        });
        Ok(JacobiMatrix::new(
            format!("antitree_floor(alpha={alpha})"),
            a,
            Coefficients::Constant(0.0),
        )
        .with_rule(AsymptoticRule::AntitreeFloor { alpha }))
    }

    /// Comparison matrix `a_0 = 1`, `a_n = sqrt(n^alpha (n+1)^alpha)`.
    pub fn antitree_exact(alpha: f64) -> Self {
        let power = move |n: usize| -> f64 {
            if alpha.fract() == 0.0 && alpha <= 64.0 {
                if let Some(p) = (n as u64).checked_pow(alpha as u32) {
                    return p as f64;
                }
            }
            (n as f64).powf(alpha)
        };
        let a = Coefficients::rule(move |n| {
            if n == 0 {
                Ok(1.0)
            } else {
                Ok((power(n) * power(n + 1)).sqrt())
            }
        });
        JacobiMatrix::new(
            format!("antitree_exact(alpha={alpha})"),
            a,
            Coefficients::Constant(0.0),
        )
        .with_rule(AsymptoticRule::AntitreeExact { alpha })
    }

    pub fn with_rule(mut self, rule: AsymptoticRule) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn without_rule(mut self) -> Self {
        self.rule = None;
        self
    }

    /// Replaces the diagonal; `bound` is a known bound on `sup |b_n|`.
    pub fn with_diagonal(mut self, b: Coefficients, bound: Option<f64>) -> Self {
        self.name = format!("{} + diagonal", self.name);
        self.diagonal_bound = match b {
            Coefficients::Constant(c) => Some(c.abs()),
            _ => bound,
        };
        self.b = b;
        self
    }

    /// Copy with `a_index` shifted by `delta`. The rule is dropped since it no
    /// longer describes the matrix exactly.
    pub fn perturbed_at(&self, index: usize, delta: f64) -> Self {
        let base = self.a.clone();
        JacobiMatrix {
            name: format!("{} with a_{index} += {delta}", self.name),
            a: Coefficients::rule(move |n| {
                let v = base.eval(n)?;
                Ok(if n == index { v + delta } else { v })
            }),
            b: self.b.clone(),
            rule: None,
            diagonal_bound: self.diagonal_bound,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rule(&self) -> Option<&AsymptoticRule> {
        self.rule.as_ref()
    }

    pub fn diagonal_bound(&self) -> Option<f64> {
        self.diagonal_bound
    }

    /// Largest `n` for which both `a_n` and `b_n` are known, if finite.
    pub fn known_len(&self) -> Option<usize> {
        match (self.a.known_len(), self.b.known_len()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        }
    }

    pub fn a(&self, n: usize) -> Result<f64, JacobiError> {
        let v = self.a.eval(n)?;
        if !(v.is_finite() && v > 0.0) {
            return Err(JacobiError::InvariantViolation(format!(
                "a_{n} = {v} is not a positive finite number"
            )));
        }
        Ok(v)
    }

    pub fn b(&self, n: usize) -> Result<f64, JacobiError> {
        let v = self.b.eval(n)?;
        if !v.is_finite() {
            return Err(JacobiError::InvariantViolation(format!(
                "b_{n} = {v} is not finite"
            )));
        }
        Ok(v)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
