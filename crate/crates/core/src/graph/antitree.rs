//! Antitrees: rooted graphs in which every vertex at distance `n >= 1`
//! from the root is joined to all of `S_{n-1}` and `S_{n+1}` and to
//! nothing else.
//!
//! Sphere sizes are either explicit or follow the power law
//! `s_0 = 1`, `s_n = floor(n^alpha)`. The floor is computed exactly: the
//! exponent is taken to be the exact binary64 value of `alpha`, integer and
//! small-dyadic exponents use integer arithmetic, and the remaining cases
//! use a guarded `powf` that falls back to 320-bit evaluation near integers.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_integer::Roots;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder, GraphError, VertexLabel, MAX_EDGES};

/// Distance to the nearest integer below which the `f64` result is not
/// trusted and the high-precision path decides the floor.
pub const FLOOR_GUARD: f64 = 1e-9;

const HIGH_PRECISION_BITS: usize = 320;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AntitreeKind {
    PowerLaw { alpha: f64 },
    Explicit { sizes: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntitreeSpec {
    #[serde(flatten)]
    pub kind: AntitreeKind,
    /// Index of the outermost materialised sphere.
    pub depth: usize,
}

impl AntitreeSpec {
    pub fn power_law(alpha: f64, depth: usize) -> Result<Self, GraphError> {
        let spec = AntitreeSpec {
            kind: AntitreeKind::PowerLaw { alpha },
            depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Explicit sizes; the depth is `sizes.len() - 1`.
    pub fn explicit(sizes: Vec<u64>) -> Result<Self, GraphError> {
        let depth = sizes.len().saturating_sub(1);
        let spec = AntitreeSpec {
            kind: AntitreeKind::Explicit { sizes },
            depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.depth == 0 {
            return Err(GraphError::Domain("antitree depth must be positive".into()));
        }
        match &self.kind {
            AntitreeKind::PowerLaw { alpha } => check_alpha(*alpha),
            AntitreeKind::Explicit { sizes } => {
                if sizes.first() != Some(&1) {
                    return Err(GraphError::Domain(
                        "explicit sphere sizes must start with s_0 = 1".into(),
                    ));
                }
                if let Some(pos) = sizes.iter().position(|&s| s == 0) {
                    return Err(GraphError::Domain(format!(
                        "sphere size s_{pos} must be at least 1"
                    )));
                }
                if sizes.len() <= self.depth {
                    return Err(GraphError::Domain(format!(
                        "depth {} needs {} explicit sizes, got {}",
                        self.depth,
                        self.depth + 1,
                        sizes.len()
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.kind {
            AntitreeKind::PowerLaw { alpha } => Some(alpha),
            AntitreeKind::Explicit { .. } => None,
        }
    }

    /// `s_n`; power laws are defined for every `n`, explicit sequences only
    /// as far as they go.
    pub fn size(&self, n: usize) -> Result<u64, GraphError> {
        match &self.kind {
            AntitreeKind::PowerLaw { alpha } => sphere_size(*alpha, n as u64),
            AntitreeKind::Explicit { sizes } => sizes.get(n).copied().ok_or_else(|| {
                GraphError::Domain(format!(
                    "explicit sphere sizes end at index {}, requested {n}",
                    sizes.len() - 1
                ))
            }),
        }
    }

    /// `(s_0, ..., s_depth)`.
    pub fn sizes(&self) -> Result<Vec<u64>, GraphError> {
        (0..=self.depth).map(|n| self.size(n)).collect()
    }
}

fn check_alpha(alpha: f64) -> Result<(), GraphError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(GraphError::Domain(format!(
            "exponent alpha must be a positive real, got {alpha}"
        )));
    }
    Ok(())
}

/// `(s_0, ..., s_{n_max})` for the power law `s_0 = 1`, `s_n = floor(n^alpha)`.
pub fn sphere_sizes(alpha: f64, n_max: usize) -> Result<Vec<u64>, GraphError> {
    check_alpha(alpha)?;
    (0..=n_max as u64).map(|n| sphere_size(alpha, n)).collect()
}

/// Single power-law sphere size.
pub fn sphere_size(alpha: f64, n: u64) -> Result<u64, GraphError> {
    check_alpha(alpha)?;
    if n <= 1 {
        return Ok(1);
    }
    floor_pow(n, alpha)
}

/// `alpha = numerator / 2^shift` with `numerator` odd, for `shift <= 6`.
fn small_dyadic(alpha: f64) -> Option<(u32, u32)> {
    let mut x = alpha;
    for shift in 0..=6u32 {
        if x.fract() == 0.0 {
            if x > u32::MAX as f64 {
                return None;
            }
            return Some((x as u32, shift));
        }
        x *= 2.0;
    }
    None
}

/// `floor(n^alpha)` for `n >= 2`.
fn floor_pow(n: u64, alpha: f64) -> Result<u64, GraphError> {
    let overflow = || GraphError::Overflow { n, alpha };
    if let Some((num, shift)) = small_dyadic(alpha) {
        let root_degree = 1u32 << shift;
        // n a perfect 2^shift-th power: n^alpha = r^num exactly.
        let r = n.nth_root(root_degree);
        if r.checked_pow(root_degree) == Some(n) {
            return r.checked_pow(num).ok_or_else(overflow);
        }
        // Otherwise n^alpha is irrational and floor(n^alpha) is the integer
        // root of n^num, when that fits.
        if let Some(p) = (n as u128).checked_pow(num) {
            let f = p.nth_root(root_degree);
            return u64::try_from(f).map_err(|_| overflow());
        }
    }
    let y = (n as f64).powf(alpha);
    if !y.is_finite() || y >= 18_446_744_073_709_551_616.0 {
        return Err(overflow());
    }
    let k = y.floor();
    let frac = y - k;
    let band = FLOOR_GUARD.max(8.0 * f64::EPSILON * y);
    if frac > band && 1.0 - frac > band {
        return Ok(k as u64);
    }
    floor_pow_high_precision(n, alpha, k as u64)
}

thread_local! {
    static CONSTS: RefCell<Option<Consts>> = const { RefCell::new(None) };
}

fn floor_pow_high_precision(n: u64, alpha: f64, guess: u64) -> Result<u64, GraphError> {
    let p = HIGH_PRECISION_BITS;
    let rm = RoundingMode::ToEven;
    let unresolved = || GraphError::FloorUnresolved { n, alpha };
    CONSTS.with(|cell| {
        let mut slot = cell.borrow_mut();
        if slot.is_none() {
            *slot = Some(Consts::new().map_err(|_| unresolved())?);
        }
        let cc = slot.as_mut().expect("initialised above");
        let y = BigFloat::from_u64(n, p).pow(&BigFloat::from_f64(alpha, p), p, rm, cc);
        if y.is_nan() || y.is_inf() {
            return Err(unresolved());
        }
        let one = BigFloat::from_u64(1, p);
        let zero = BigFloat::from_u64(0, p);
        let mut k = guess;
        for _ in 0..4 {
            let d = y.sub(&BigFloat::from_u64(k, p), p, rm);
            if d.cmp(&zero) == Some(-1) {
                k = k.checked_sub(1).ok_or_else(unresolved)?;
                continue;
            }
            if d.cmp(&one) != Some(-1) {
                k = k.checked_add(1).ok_or_else(unresolved)?;
                continue;
            }
            // 2^-250 relative is far below the 320-bit evaluation error;
            // anything closer is indistinguishable from an integer here.
            let tiny = y.mul(&BigFloat::from_f64(2f64.powi(-250), p), p, rm);
            let up = one.sub(&d, p, rm);
            if d.cmp(&tiny) != Some(1) || up.cmp(&tiny) != Some(1) {
                return Err(unresolved());
            }
            return Ok(k);
        }
        Err(unresolved())
    })
}

/// Materialises spheres `S_0, ..., S_depth` with complete bipartite layers.
/// Vertices are numbered sphere by sphere; `S_depth` is the boundary.
pub fn build_antitree(spec: &AntitreeSpec) -> Result<Graph, GraphError> {
    spec.validate()?;
    let sizes = spec.sizes()?;
    let edges: u128 = sizes
        .windows(2)
        .map(|w| w[0] as u128 * w[1] as u128)
        .sum();
    if edges > MAX_EDGES as u128 {
        return Err(GraphError::TooLarge {
            edges,
            limit: MAX_EDGES,
        });
    }
    let offsets = sphere_offsets(&sizes);
    let total = *offsets.last().expect("offsets has depth + 2 entries");
    let mut b = GraphBuilder::new(total);
    for (n, w) in offsets.windows(2).enumerate() {
        for (i, v) in (w[0]..w[1]).enumerate() {
            b.label(
                v,
                VertexLabel {
                    copy: 0,
                    sphere: Some(n),
                    index: Some(i),
                },
            )?;
            if n == spec.depth {
                b.mark_boundary(v)?;
            }
        }
    }
    for n in 0..spec.depth {
        for u in offsets[n]..offsets[n + 1] {
            for v in offsets[n + 1]..offsets[n + 2] {
                b.add_edge(u, v)?;
            }
        }
    }
    Ok(b.build())
}

/// Start of each sphere in the vertex numbering, plus the total at the end.
pub fn sphere_offsets(sizes: &[u64]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &s in sizes {
        acc += s as usize;
        offsets.push(acc);
    }
    offsets
}
