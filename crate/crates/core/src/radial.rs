//! Radial functions on antitrees.
//!
//! `P` averages a function over the spheres around the root, `U` maps the
//! weighted space `l^2(N, s_n)` unitarily onto `l^2(N)` by `f~(n) -> sqrt(s_n) f~(n)`.
//! On an antitree the adjacency matrix maps radial functions to radial
//! functions,
//!
//! ```text
//! (A Pf)~(n) = s_{n-1} f~(n-1) + s_{n+1} f~(n+1),
//! ```
//!
//! and conjugating by `U` turns this into the Jacobi matrix with
//! `a_n = sqrt(s_n s_{n+1})`, `b_n = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

use crate::graph::antitree::{build_antitree, AntitreeKind, AntitreeSpec};
use crate::graph::bfs::{bfs_spheres, SphereDecomposition};
use crate::graph::{Graph, GraphError, VertexId};
use crate::jacobi::{JacobiError, JacobiMatrix};
use crate::json::f64_17;
use crate::operators::{apply_adjacency, FiniteFunction, OperatorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("vertex {0:?} is not reachable from the root of the sphere decomposition")]
    Unreachable(VertexId),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("reduction inconsistency: {0}")]
    Inconsistent(ConsistencyReport),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
}

/// `f~` together with the sphere sizes `s_n` that weight its norm.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub values: Vec<Complex64>,
    pub weights: Vec<u64>,
}

impl RadialFunction {
    pub fn new(values: Vec<Complex64>, weights: Vec<u64>) -> Result<Self, RadialError> {
        if values.len() > weights.len() {
            return Err(RadialError::Contract(format!(
                "{} radial values but only {} sphere weights",
                values.len(),
                weights.len()
            )));
        }
        Ok(RadialFunction { values, weights })
    }

    /// Sphere averages of `f`, one per sphere of `dec`.
    pub fn from_function(dec: &SphereDecomposition, f: &FiniteFunction) -> Result<Self, RadialError> {
        let sums = sphere_sums(dec, f)?;
        let values = dec
            .spheres
            .iter()
            .enumerate()
            .map(|(n, s)| sums.get(&n).map_or(Complex64::default(), |x| x / s.len() as f64))
            .collect();
        Ok(RadialFunction {
            values,
            weights: dec.sizes(),
        })
    }

    /// `sum s_n |f~(n)|^2`.
    pub fn weighted_norm_sqr(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, &s)| s as f64 * v.norm_sqr())
            .sum()
    }
}

fn sphere_sums(
    dec: &SphereDecomposition,
    f: &FiniteFunction,
) -> Result<BTreeMap<usize, Complex64>, RadialError> {
    let mut sums = BTreeMap::new();
    for (v, c) in f.iter() {
        let n = dec.radius(v).ok_or(RadialError::Unreachable(v))?;
        *sums.entry(n).or_default() += c;
    }
    Ok(sums)
}

/// `(Pf)(x) = (1/s_|x|) sum_{y in S_|x|} f(y)`.
pub fn project_radial(
    g: &Graph,
    dec: &SphereDecomposition,
    f: &FiniteFunction,
) -> Result<FiniteFunction, RadialError> {
    for v in f.support() {
        if !g.contains(v) {
            return Err(GraphError::VertexOutOfRange {
                vertex: v.0,
                vertex_count: g.vertex_count(),
            }
            .into());
        }
    }
    let sums = sphere_sums(dec, f)?;
    let mut out = FiniteFunction::zero();
    for (n, total) in sums {
        let sphere = &dec.spheres[n];
        let avg = total / sphere.len() as f64;
        for &v in sphere {
            out.set(v, avg);
        }
    }
    Ok(out)
}

/// `U f~ = (sqrt(s_n) f~(n))_n`.
pub fn weight_transform(rf: &RadialFunction) -> Vec<Complex64> {
    rf.values
        .iter()
        .zip(&rf.weights)
        .map(|(v, &s)| v * (s as f64).sqrt())
        .collect()
}

/// Jacobi matrix of the radial part of the antitree adjacency matrix.
///
/// Power laws give a matrix defined at every index; explicit sizes
/// `(s_0, ..., s_d)` give `a_0, ..., a_{d-1}`.
pub fn reduce_to_jacobi(spec: &AntitreeSpec) -> Result<JacobiMatrix, RadialError> {
    spec.validate()?;
    match &spec.kind {
        AntitreeKind::PowerLaw { alpha } => Ok(JacobiMatrix::antitree_floor(*alpha)?),
        AntitreeKind::Explicit { sizes } => {
            let a = sizes
                .windows(2)
                .map(|w| (w[0] as f64 * w[1] as f64).sqrt())
                .collect();
            Ok(JacobiMatrix::from_sequences(a, vec![])?)
        }
    }
}

/// Parameters of [`check_reduction_consistency`].
#[derive(Debug, Clone)]
pub struct ReductionCheck {
    pub spec: AntitreeSpec,
    pub depth: usize,
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    /// Matrix compared against the graph; defaults to [`reduce_to_jacobi`].
    pub jacobi: Option<JacobiMatrix>,
}

impl ReductionCheck {
    pub fn new(spec: AntitreeSpec, depth: usize, trials: usize, tol: f64) -> Self {
        ReductionCheck {
            spec,
            depth,
            trials,
            tol,
            seed: 0,
            jacobi: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_jacobi(mut self, j: JacobiMatrix) -> Self {
        self.jacobi = Some(j);
        self
    }
}

/// The identities checked, in order.
pub const IDENTITIES: [&str; 4] = [
    "A Pf = P A Pf",
    "P A f = A Pf",
    "(A Pf)~(n) = s_(n-1) f~(n-1) + s_(n+1) f~(n+1)",
    "sqrt(s_n) (A Pf)~(n) = (J U f~)(n)",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    #[serde(serialize_with = "f64_17")]
    pub max_deviation: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_identity: Option<String>,
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max deviation {:e} over {} trials (seed {})",
            self.max_deviation, self.trials, self.seed
        )?;
        if let Some(id) = &self.failing_identity {
            write!(f, ", failing identity: {id}")?;
        }
        Ok(())
    }
}

fn truncated_spec(spec: &AntitreeSpec, depth: usize) -> Result<AntitreeSpec, RadialError> {
    let out = match &spec.kind {
        AntitreeKind::PowerLaw { alpha } => AntitreeSpec::power_law(*alpha, depth)?,
        AntitreeKind::Explicit { sizes } => {
            if sizes.len() <= depth {
                return Err(RadialError::Contract(format!(
                    "depth {depth} exceeds the {} explicit sphere sizes",
                    sizes.len()
                )));
            }
            AntitreeSpec::explicit(sizes[..=depth].to_vec())?
        }
    };
    Ok(out)
}

/// Random-function check that the antitree adjacency matrix acts on radial
/// functions as the reduced Jacobi matrix does.
///
/// Test functions are supported on radii `0..=depth-3`; all comparisons are
/// made on radii `0..=depth-2`, and deviations are relative to the sup norm
/// of the input (`f` for the graph identities, `U f~` for the Jacobi one).
pub fn check_reduction_consistency(check: &ReductionCheck) -> Result<ConsistencyReport, RadialError> {
    let ReductionCheck {
        spec,
        depth,
        trials,
        tol,
        seed,
        ..
    } = check;
    let (depth, trials, tol, seed) = (*depth, *trials, *tol, *seed);
    if depth < 3 {
        return Err(RadialError::Contract(format!("depth must be at least 3, got {depth}")));
    }
    if trials == 0 {
        return Err(RadialError::Contract("trials must be positive".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(RadialError::Contract(format!("tolerance must be positive, got {tol}")));
    }
    let spec = truncated_spec(spec, depth)?;
    let j = match &check.jacobi {
        Some(j) => j.clone(),
        None => reduce_to_jacobi(&spec)?,
    };
    let g = build_antitree(&spec)?;
    let dec = bfs_spheres(&g, VertexId(0))?;
    let s = dec.sizes();
    let last = depth - 2;
    let support: Vec<VertexId> = dec.spheres[..=depth - 3].iter().flatten().copied().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    for _ in 0..trials {
        let f: FiniteFunction = support
            .iter()
            .map(|&v| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                (v, Complex64::new(re, im))
            })
            .collect();
        let scale = f.sup_norm().max(f64::MIN_POSITIVE);
        let pf = project_radial(&g, &dec, &f)?;
        let apf = apply_adjacency(&g, &pf)?;
        let papf = project_radial(&g, &dec, &apf)?;
        let paf = project_radial(&g, &dec, &apply_adjacency(&g, &f)?)?;
        let inner = |v: &VertexId| dec.radius(*v).is_some_and(|r| r <= last);
        let dist = |x: &FiniteFunction, y: &FiniteFunction| {
            x.support()
                .chain(y.support())
                .filter(inner)
                .map(|v| (x.get(v) - y.get(v)).norm())
                .fold(0.0, f64::max)
        };
        worst[0] = worst[0].max(dist(&apf, &papf) / scale);
        worst[1] = worst[1].max(dist(&paf, &apf) / scale);

        let ft = RadialFunction::from_function(&dec, &pf)?;
        let aft = RadialFunction::from_function(&dec, &apf)?;
        let at = |v: &[Complex64], n: isize| -> Complex64 {
            if n < 0 {
                Complex64::default()
            } else {
                v.get(n as usize).copied().unwrap_or_default()
            }
        };
        let uf = weight_transform(&ft);
        let uscale = uf.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for n in 0..=last {
            let ni = n as isize;
            let s_prev = if n == 0 { 0.0 } else { s[n - 1] as f64 };
            let expected = at(&ft.values, ni - 1) * s_prev + at(&ft.values, ni + 1) * s[n + 1] as f64;
            worst[2] = worst[2].max((aft.values[n] - expected).norm() / scale);

            let lhs = aft.values[n] * (s[n] as f64).sqrt();
            let mut rhs = at(&uf, ni + 1) * j.a(n)? + at(&uf, ni) * j.b(n)?;
            if n > 0 {
                rhs += at(&uf, ni - 1) * j.a(n - 1)?;
            }
            worst[3] = worst[3].max((lhs - rhs).norm() / uscale);
        }
    }
    let max_deviation = worst.iter().copied().fold(0.0, f64::max);
    let failing = worst.iter().position(|&w| !(w <= tol));
    let report = ConsistencyReport {
        max_deviation,
        trials,
        seed,
        failing_identity: failing.map(|i| IDENTITIES[i].to_string()),
    };
    match failing {
        Some(_) => Err(RadialError::Inconsistent(report)),
        None => Ok(report),
    }
}
