//! Forward three-term recurrence for `(J - z) u = 0` with explicit
//! rescaling.
//!
//! `u(n+1) = ((z - b_n) u(n) - a_{n-1} u(n-1)) / a_n`, `a_{-1} = 0`.
//! The working pair is renormalised whenever its magnitude leaves
//! `[RESCALE_LOW, RESCALE_HIGH]`; every stored sample carries the natural
//! log of its scale, and running sums of `|u|^2` are kept in log form, so
//! nothing overflows even when solutions grow like `exp(n^0.7)`.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{JacobiError, JacobiMatrix};

pub const RESCALE_HIGH: f64 = 1e150;
pub const RESCALE_LOW: f64 = 1e-150;

/// `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledComplex {
    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        ScaledComplex {
            mantissa,
            log_scale,
        }
    }

    /// The plain value; may overflow to infinity or underflow to zero.
    pub fn to_complex(self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn ln_abs(self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    pub fn mul(self, other: ScaledComplex) -> ScaledComplex {
        ScaledComplex::new(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
    }

    pub fn scale(self, c: f64) -> ScaledComplex {
        ScaledComplex::new(self.mantissa * c, self.log_scale)
    }

    /// Mantissa expressed at the scale `log_scale`.
    pub fn at_scale(self, log_scale: f64) -> Complex64 {
        self.mantissa * (self.log_scale - log_scale).exp()
    }

    pub fn sub(self, other: ScaledComplex) -> ScaledComplex {
        let s = self.log_scale.max(other.log_scale);
        ScaledComplex::new(self.at_scale(s) - other.at_scale(s), s)
    }

    /// `|self - other| / max(|self|, |other|)`, computed without leaving
    /// log space.
    pub fn relative_difference(self, other: ScaledComplex) -> f64 {
        let s = self.log_scale.max(other.log_scale);
        let (x, y) = (self.at_scale(s), other.at_scale(s));
        let denom = x.norm().max(y.norm());
        if denom == 0.0 {
            0.0
        } else {
            (x - y).norm() / denom
        }
    }
}

/// Running `ln(sum x_k)` for terms supplied as `ln x_k`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    scale: f64,
    sum: super::CompensatedSum,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum {
            scale: f64::NEG_INFINITY,
            sum: Default::default(),
        }
    }

    pub(crate) fn add_ln(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.scale + 300.0 || self.scale == f64::NEG_INFINITY {
            let factor = (self.scale - ln_term).exp();
            let v = self.sum.value() * factor;
            self.sum = Default::default();
            self.sum.add(v);
            self.scale = ln_term;
        }
        self.sum.add((ln_term - self.scale).exp());
    }

    pub(crate) fn ln(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.scale + self.sum.value().ln()
        }
    }
}

/// One step of the forward recurrence, with the pair `(u(n-1), u(n))`
/// sharing a common scale.
pub(crate) struct Stepper<'a> {
    j: &'a JacobiMatrix,
    z: Complex64,
    prev: Complex64,
    cur: Complex64,
    scale: f64,
    n: usize,
    a_prev: f64,
    sum: LogSum,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(
        j: &'a JacobiMatrix,
        z: Complex64,
        init: (Complex64, Complex64),
    ) -> Result<Self, JacobiError> {
        let (u0, u1) = init;
        let m = u0.norm().max(u1.norm());
        if !(m.is_finite() && m > 0.0) {
            return Err(JacobiError::Contract(
                "initial values must be finite and not both zero".into(),
            ));
        }
        let mut sum = LogSum::new();
        sum.add_ln(2.0 * (u0.norm() / m).ln() + 2.0 * m.ln());
        sum.add_ln(2.0 * (u1.norm() / m).ln() + 2.0 * m.ln());
        Ok(Stepper {
            j,
            z,
            prev: u0 / m,
            cur: u1 / m,
            scale: m.ln(),
            n: 1,
            a_prev: j.a(0)?,
            sum,
        })
    }

    /// `(u(1), ln S(1))` before any step; after a step, `(u(n), ln S(n))`.
    pub(crate) fn current(&self) -> (ScaledComplex, f64) {
        (ScaledComplex::new(self.cur, self.scale), self.sum.ln())
    }

    pub(crate) fn previous(&self) -> ScaledComplex {
        ScaledComplex::new(self.prev, self.scale)
    }

    pub(crate) fn index(&self) -> usize {
        self.n
    }

    /// Advances to `u(n+1)`.
    pub(crate) fn step(&mut self) -> Result<(), JacobiError> {
        let n = self.n;
        let a_n = self.j.a(n)?;
        let b_n = self.j.b(n)?;
        let next = ((self.z - b_n) * self.cur - self.a_prev * self.prev) / a_n;
        self.prev = self.cur;
        self.cur = next;
        self.a_prev = a_n;
        self.n += 1;
        let m = self.prev.norm().max(self.cur.norm());
        if !m.is_finite() {
            return Err(JacobiError::InvariantViolation(format!(
                "recurrence overflowed within one step at n = {}",
                self.n
            )));
        }
        if m > RESCALE_HIGH || (m < RESCALE_LOW && m > 0.0) {
            self.prev /= m;
            self.cur /= m;
            self.scale += m.ln();
        }
        self.sum.add_ln(2.0 * (self.cur.norm().ln() + self.scale));
        Ok(())
    }
}

/// Samples `u(0..=n_max)` of a solution of `(J - z) u = 0` for `n >= 1`.
#[derive(Debug, Clone)]
pub struct RecurrenceSolution {
    pub z: Complex64,
    /// Rescaled samples; `u_true(n) = values[n] * exp(log_scale[n])`.
    pub values: Vec<Complex64>,
    pub log_scale: Vec<f64>,
    /// `ln sum_{k <= n} |u_true(k)|^2`.
    pub log_partial_sums: Vec<f64>,
}

impl RecurrenceSolution {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, n: usize) -> ScaledComplex {
        ScaledComplex::new(self.values[n], self.log_scale[n])
    }

    pub fn log10_abs(&self, n: usize) -> f64 {
        self.value(n).ln_abs() / std::f64::consts::LN_10
    }

    pub fn log10_partial_sum(&self, n: usize) -> f64 {
        self.log_partial_sums[n] / std::f64::consts::LN_10
    }

    /// Largest interior residual
    /// `|a_n u(n+1) + (b_n - z) u(n) + a_{n-1} u(n-1)|`, relative to
    /// `|a_n u(n+1)| + (|z| + |b_n|) |u(n)| + |a_{n-1} u(n-1)|`.
    pub fn max_relative_residual(&self, j: &JacobiMatrix) -> Result<f64, JacobiError> {
        let mut worst: f64 = 0.0;
        for n in 1..self.len().saturating_sub(1) {
            let s = self.log_scale[n];
            let (up, u, un) = (
                self.value(n - 1).at_scale(s),
                self.value(n).at_scale(s),
                self.value(n + 1).at_scale(s),
            );
            let (a_prev, a_n, b_n) = (j.a(n - 1)?, j.a(n)?, j.b(n)?);
            let t1 = un * a_n;
            let t2 = u * (b_n - self.z);
            let t3 = up * a_prev;
            let scale = t1.norm() + (self.z.norm() + b_n.abs()) * u.norm() + t3.norm();
            if scale > 0.0 {
                worst = worst.max((t1 + t2 + t3).norm() / scale);
            }
        }
        Ok(worst)
    }

    /// CSV with header `n,log10_abs_u,log10_partial_sum`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,log10_abs_u,log10_partial_sum\n");
        for n in 0..self.len() {
            writeln!(
                out,
                "{},{},{}",
                n,
                csv_f64(self.log10_abs(n)),
                csv_f64(self.log10_partial_sum(n))
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

fn csv_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn solve_recurrence(
    j: &JacobiMatrix,
    z: Complex64,
    init: (Complex64, Complex64),
    n_max: usize,
) -> Result<RecurrenceSolution, JacobiError> {
    if n_max == 0 {
        return Err(JacobiError::Contract("n_max must be positive".into()));
    }
    let mut st = Stepper::new(j, z, init)?;
    let mut values = Vec::with_capacity(n_max + 1);
    let mut log_scale = Vec::with_capacity(n_max + 1);
    let mut log_partial_sums = Vec::with_capacity(n_max + 1);
    let u0 = st.previous();
    values.push(u0.mantissa);
    log_scale.push(u0.log_scale);
    log_partial_sums.push(2.0 * u0.ln_abs());
    loop {
        let (u, ls) = st.current();
        values.push(u.mantissa);
        log_scale.push(u.log_scale);
        log_partial_sums.push(ls);
        if st.index() == n_max {
            break;
        }
        st.step()?;
    }
    Ok(RecurrenceSolution {
        z,
        values,
        log_scale,
        log_partial_sums,
    })
}

/// `a_n (u(n+1) v(n) - u(n) v(n+1))`, constant in `n` for exact solutions.
pub fn wronskian(
    j: &JacobiMatrix,
    u: &RecurrenceSolution,
    v: &RecurrenceSolution,
    n: usize,
) -> Result<ScaledComplex, JacobiError> {
    if u.z != v.z {
        return Err(JacobiError::Contract(format!(
            "solutions belong to different spectral parameters {} and {}",
            u.z, v.z
        )));
    }
    if n + 1 >= u.len() || n + 1 >= v.len() {
        return Err(JacobiError::Contract(format!(
            "wronskian at n = {n} needs samples up to {}",
            n + 1
        )));
    }
    let w = u
        .value(n + 1)
        .mul(v.value(n))
        .sub(u.value(n).mul(v.value(n + 1)));
    Ok(w.scale(j.a(n)?))
}
