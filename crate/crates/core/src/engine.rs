//! Deficiency-index engine.
//!
//! [`analyze`] walks an [`OperatorDescriptor`] and fires rules in a fixed
//! priority order. Each rule appends a [`TraceEntry`]; criterion results and
//! classifier output are attached as diagnostics. Conflicting decisive
//! answers are an error, and a question no rule can settle is reported as
//! [`DeficiencyIndex::Undetermined`].

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::graph::antitree::{AntitreeKind, AntitreeSpec};
use crate::graph::{is_tree, Graph, GraphError};
use crate::jacobi::classify::{classify_limit, ClassifierTolerances, LimitClass};
use crate::jacobi::criteria::{berezanskii_test, carleman_test, CriterionResult, Verdict};
use crate::jacobi::perturbation::bounded_difference;
use crate::jacobi::{JacobiError, JacobiMatrix};
use crate::json::format_f64;
use crate::radial::{reduce_to_jacobi, RadialError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("contract error: {0}")]
    Contract(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Jacobi(JacobiError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Radial(RadialError),
}

impl EngineError {
    pub fn is_internal_inconsistency(&self) -> bool {
        matches!(self, EngineError::InternalInconsistency(_))
    }
}

impl From<JacobiError> for EngineError {
    fn from(e: JacobiError) -> Self {
        match e {
            JacobiError::InternalInconsistency(m) => EngineError::InternalInconsistency(m),
            other => EngineError::Jacobi(other),
        }
    }
}

impl From<RadialError> for EngineError {
    fn from(e: RadialError) -> Self {
        match e {
            RadialError::Jacobi(j) => j.into(),
            RadialError::Graph(g) => EngineError::Graph(g),
            other => EngineError::Radial(other),
        }
    }
}

/// Serializable Jacobi matrices for the `jacobi` descriptor kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum JacobiSource {
    /// `a_n = sqrt(s_n s_{n+1})` with `s_n = floor(n^alpha)`.
    AntitreeFloor { alpha: f64 },
    /// `a_0 = 1`, `a_n = (n (n+1))^(alpha/2)`.
    AntitreeExact { alpha: f64 },
    Constant { a: f64, b: f64 },
}

impl JacobiSource {
    pub fn build(&self) -> Result<JacobiMatrix, JacobiError> {
        match *self {
            JacobiSource::AntitreeFloor { alpha } => JacobiMatrix::antitree_floor(alpha),
            JacobiSource::AntitreeExact { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(JacobiError::InvariantViolation(format!(
                        "alpha must be positive, got {alpha}"
                    )));
                }
                Ok(JacobiMatrix::antitree_exact(alpha))
            }
            JacobiSource::Constant { a, b } => JacobiMatrix::constant(a, b),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorDescriptor {
    /// A finite graph; a non-empty boundary marks it as a truncation.
    FiniteGraph { graph: Graph },
    Antitree { spec: AntitreeSpec },
    /// `copies` copies of `base` joined in a chain at `vertex`.
    Glued {
        base: Box<OperatorDescriptor>,
        copies: usize,
        #[serde(default)]
        vertex: usize,
    },
    DisjointUnion { components: Vec<OperatorDescriptor> },
    /// A tree; a non-empty boundary marks it as a truncation.
    Tree { graph: Graph },
    Jacobi { matrix: JacobiSource },
    /// In-memory matrix, not serializable.
    #[serde(skip)]
    JacobiMatrix { matrix: JacobiMatrix },
}

/// `eta` in `N u {inf} u {undetermined}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeficiencyIndex {
    Finite(u64),
    Infinite,
    Undetermined,
}

impl DeficiencyIndex {
    pub fn is_decisive(self) -> bool {
        self != DeficiencyIndex::Undetermined
    }

    fn times(self, n: u64) -> DeficiencyIndex {
        match self {
            DeficiencyIndex::Finite(k) => k
                .checked_mul(n)
                .map_or(DeficiencyIndex::Infinite, DeficiencyIndex::Finite),
            DeficiencyIndex::Infinite if n == 0 => DeficiencyIndex::Finite(0),
            other => other,
        }
    }
}

impl fmt::Display for DeficiencyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeficiencyIndex::Finite(k) => write!(f, "{k}"),
            DeficiencyIndex::Infinite => f.write_str("infinity"),
            DeficiencyIndex::Undetermined => f.write_str("undetermined"),
        }
    }
}

impl Serialize for DeficiencyIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DeficiencyIndex::Finite(k) => s.serialize_u64(*k),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Strength of the conclusion a trace entry supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// Determines the index exactly.
    Exact,
    /// Shows only `eta >= value`.
    LowerBound,
    /// Narrows the set of possible values.
    Restriction,
    /// Numerical classification without an analytic certificate.
    Numerical,
    /// Numerical check of a conclusion reached otherwise.
    Corroboration,
    /// Bookkeeping or a criterion that did not decide.
    Step,
}

/// Ordered key/value map with pre-rendered JSON values.
#[derive(Debug, Clone, Default)]
pub struct Params(Vec<(String, Box<RawValue>)>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    fn raw(mut self, key: &str, json: String) -> Self {
        let v = RawValue::from_string(json).expect("rendered values are valid JSON");
        self.0.push((key.to_string(), v));
        self
    }

    pub fn num(self, key: &str, x: f64) -> Self {
        self.raw(key, format_f64(x))
    }

    pub fn int(self, key: &str, k: u64) -> Self {
        self.raw(key, k.to_string())
    }

    pub fn text(self, key: &str, s: &str) -> Self {
        self.raw(key, serde_json::to_string(s).expect("strings serialize"))
    }

    pub fn value<T: Serialize>(self, key: &str, v: &T) -> Self {
        let json = serde_json::to_string(v).expect("engine values serialize");
        self.raw(key, json)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(k, _)| k.as_str())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.get())
    }

    fn prefixed(self, scope: &str) -> Params {
        Params(
            self.0
                .into_iter()
                .map(|(k, v)| (format!("{scope}.{k}"), v))
                .collect(),
        )
    }
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|((k1, v1), (k2, v2))| k1 == k2 && v1.get() == v2.get())
    }
}

impl Serialize for Params {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    /// Position of the sub-operator the rule was applied to, `""` for the root.
    pub scope: String,
    pub rule: String,
    /// The mathematical statement the rule relies on.
    pub reference: String,
    pub verdict: String,
    pub evidence: Evidence,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyReport {
    pub eta: DeficiencyIndex,
    /// Values still possible when `eta` is undetermined but a rule narrowed
    /// the answer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted_to: Option<Vec<DeficiencyIndex>>,
    pub trace: Vec<TraceEntry>,
    pub diagnostics: Params,
}

impl DeficiencyReport {
    fn new() -> Self {
        DeficiencyReport {
            eta: DeficiencyIndex::Undetermined,
            restricted_to: None,
            trace: Vec::new(),
            diagnostics: Params::new(),
        }
    }

    fn push(
        &mut self,
        rule: &str,
        reference: &str,
        verdict: impl Into<String>,
        evidence: Evidence,
        params: Params,
    ) {
        self.trace.push(TraceEntry {
            scope: String::new(),
            rule: rule.to_string(),
            reference: reference.to_string(),
            verdict: verdict.into(),
            evidence,
            params,
        });
    }

    fn diagnose<T: Serialize>(&mut self, key: &str, v: &T) {
        let d = std::mem::take(&mut self.diagnostics);
        self.diagnostics = d.value(key, v);
    }

    /// Moves a sub-report's trace and diagnostics under `scope`.
    fn absorb(&mut self, scope: &str, sub: DeficiencyReport) {
        for mut e in sub.trace {
            e.scope = if e.scope.is_empty() {
                scope.to_string()
            } else {
                format!("{scope}.{}", e.scope)
            };
            self.trace.push(e);
        }
        let mut d = std::mem::take(&mut self.diagnostics);
        d.0.extend(sub.diagnostics.prefixed(scope).0);
        self.diagnostics = d;
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(self).expect("reports serialize")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Scan length of the Carleman sum, the log-concavity scan and the
    /// bounded-difference scan.
    pub scan_n_max: usize,
    pub divergence_threshold: f64,
    pub min_clean_tail: usize,
    pub classifier: ClassifierTolerances,
    /// Run the classifier even when an analytic rule has decided.
    pub corroborate: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            scan_n_max: 1_000_000,
            divergence_threshold: 1e4,
            min_clean_tail: crate::jacobi::criteria::DEFAULT_CLEAN_TAIL,
            classifier: ClassifierTolerances::default(),
            corroborate: true,
        }
    }
}

const REF_BOUNDED: &str = "bounded symmetric operators are self-adjoint: eta = 0";
const REF_RADIAL: &str = "the antitree adjacency matrix is unitarily equivalent to 0 on the \
    orthogonal complement of radial functions plus the Jacobi matrix a_n = sqrt(s_n s_(n+1)), b_n = 0";
const REF_CARLEMAN: &str = "sum 1/a_n = infinity implies the Jacobi matrix is essentially self-adjoint";
const REF_BEREZANSKII: &str = "sum 1/a_n < infinity, a_(n-1) a_(n+1) <= a_n^2 for n >= n_0 and \
    |b_n| <= C imply deficiency index 1";
const REF_STABILITY: &str = "bounded symmetric perturbations leave deficiency indices unchanged";
const REF_CLASSIFIER: &str = "a Jacobi matrix is limit circle (index 1) iff every solution of \
    (J - i)u = 0 is square-summable, limit point (index 0) otherwise";
const REF_SUM: &str = "deficiency indices add over orthogonal direct sums";
const REF_GLUE: &str = "the glued graph differs from the disjoint union of its copies by finitely \
    many edges, a bounded perturbation: eta = copies * eta(base)";
const REF_TREE: &str = "the adjacency matrix of a tree has deficiency index 0 or infinity";

pub fn analyze(d: &OperatorDescriptor, cfg: &EngineConfig) -> Result<DeficiencyReport, EngineError> {
    match d {
        OperatorDescriptor::FiniteGraph { graph } => Ok(finite_graph(graph)),
        OperatorDescriptor::Antitree { spec } => antitree(spec, cfg),
        OperatorDescriptor::DisjointUnion { components } => {
            let reports = components
                .par_iter()
                .map(|c| analyze(c, cfg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(direct_sum_index(reports))
        }
        OperatorDescriptor::Glued {
            base,
            copies,
            vertex,
        } => glued(base, *copies, *vertex, cfg),
        OperatorDescriptor::Tree { graph } => tree(graph),
        OperatorDescriptor::Jacobi { matrix } => {
            let j = matrix.build()?;
            jacobi_pipeline(&j, cfg)
        }
        OperatorDescriptor::JacobiMatrix { matrix } => jacobi_pipeline(matrix, cfg),
    }
}

fn finite_graph(g: &Graph) -> DeficiencyReport {
    let mut r = DeficiencyReport::new();
    let params = Params::new()
        .int("vertices", g.vertex_count() as u64)
        .int("edges", g.edge_count() as u64)
        .int("boundary", g.boundary().len() as u64);
    if g.boundary().is_empty() {
        r.push("finite_graph", REF_BOUNDED, "eta = 0", Evidence::Exact, params);
        r.eta = DeficiencyIndex::Finite(0);
    } else {
        r.push(
            "finite_graph",
            REF_BOUNDED,
            "not applicable: the graph is a truncation with a boundary",
            Evidence::Step,
            params,
        );
    }
    r
}

fn tree(g: &Graph) -> Result<DeficiencyReport, EngineError> {
    let check = is_tree(g);
    if !check.holds() {
        return Err(EngineError::Contract(format!(
            "tree descriptor does not describe a tree: {check:?}"
        )));
    }
    let mut r = DeficiencyReport::new();
    r.push(
        "tree",
        REF_TREE,
        "eta in {0, infinity}",
        Evidence::Restriction,
        Params::new().int("vertices", g.vertex_count() as u64),
    );
    let sub = finite_graph(g);
    let eta = sub.eta;
    r.absorb("finite", sub);
    r.eta = eta;
    if !eta.is_decisive() {
        r.restricted_to = Some(vec![DeficiencyIndex::Finite(0), DeficiencyIndex::Infinite]);
        r.push(
            "tree",
            REF_TREE,
            "undetermined within {0, infinity}: no certificate for an infinite tree",
            Evidence::Restriction,
            Params::new(),
        );
    }
    Ok(r)
}

fn antitree(spec: &AntitreeSpec, cfg: &EngineConfig) -> Result<DeficiencyReport, EngineError> {
    let j = reduce_to_jacobi(spec)?;
    let mut r = DeficiencyReport::new();
    r.push(
        "radial_reduction",
        REF_RADIAL,
        "eta(A) = eta(J); the zero block contributes 0",
        Evidence::Step,
        Params::new().value("spec", spec),
    );
    if let AntitreeKind::Explicit { sizes } = &spec.kind {
        r.push(
            "radial_reduction",
            REF_RADIAL,
            "undetermined: explicit sphere sizes do not determine the infinite antitree",
            Evidence::Step,
            Params::new().int("sizes", sizes.len() as u64),
        );
        return Ok(r);
    }
    let sub = jacobi_pipeline(&j, cfg)?;
    r.eta = sub.eta;
    r.absorb("jacobi", sub);
    Ok(r)
}

fn glued(
    base: &OperatorDescriptor,
    copies: usize,
    vertex: usize,
    cfg: &EngineConfig,
) -> Result<DeficiencyReport, EngineError> {
    if copies == 0 {
        return Err(EngineError::Contract("number of copies must be positive".into()));
    }
    check_connected_base(base, vertex)?;
    let sub = analyze(base, cfg)?;
    let mut r = DeficiencyReport::new();
    let base_eta = sub.eta;
    r.absorb("base", sub);
    r.eta = base_eta.times(copies as u64);
    let evidence = if r.eta.is_decisive() {
        Evidence::Exact
    } else {
        Evidence::Step
    };
    r.push(
        "glued_copies",
        REF_GLUE,
        format!("eta = {copies} * {base_eta} = {}", r.eta),
        evidence,
        Params::new()
            .int("copies", copies as u64)
            .int("vertex", vertex as u64)
            .int("added_edges", copies as u64 - 1),
    );
    Ok(r)
}

fn check_connected_base(d: &OperatorDescriptor, vertex: usize) -> Result<(), EngineError> {
    let fail = |m: &str| Err(EngineError::Contract(format!("glued base {m}")));
    let graph_check = |g: &Graph| {
        if !g.is_connected() {
            fail("must be a connected graph")
        } else if vertex >= g.vertex_count() {
            fail(&format!("has no vertex {vertex}"))
        } else {
            Ok(())
        }
    };
    match d {
        OperatorDescriptor::FiniteGraph { graph } | OperatorDescriptor::Tree { graph } => {
            graph_check(graph)
        }
        OperatorDescriptor::Antitree { spec } => {
            spec.validate()?;
            Ok(())
        }
        OperatorDescriptor::Glued { base, vertex: v, .. } => check_connected_base(base, *v),
        OperatorDescriptor::DisjointUnion { components } if components.len() == 1 => {
            check_connected_base(&components[0], vertex)
        }
        OperatorDescriptor::DisjointUnion { .. } => fail("must be connected, not a disjoint union"),
        OperatorDescriptor::Jacobi { .. } | OperatorDescriptor::JacobiMatrix { .. } => {
            fail("must describe a graph, not a Jacobi matrix")
        }
    }
}

/// `eta = sum eta_k`, with infinity absorbing; any undetermined component
/// makes the sum undetermined.
pub fn direct_sum_index(reports: Vec<DeficiencyReport>) -> DeficiencyReport {
    let mut r = DeficiencyReport::new();
    let etas: Vec<DeficiencyIndex> = reports.iter().map(|c| c.eta).collect();
    for (i, c) in reports.into_iter().enumerate() {
        r.absorb(&format!("components[{i}]"), c);
    }
    let eta = etas.iter().try_fold(DeficiencyIndex::Finite(0), |acc, e| match (acc, *e) {
        (_, DeficiencyIndex::Undetermined) => None,
        (DeficiencyIndex::Finite(a), DeficiencyIndex::Finite(b)) => Some(
            a.checked_add(b)
                .map_or(DeficiencyIndex::Infinite, DeficiencyIndex::Finite),
        ),
        _ => Some(DeficiencyIndex::Infinite),
    });
    r.eta = eta.unwrap_or(DeficiencyIndex::Undetermined);
    let summands: Vec<String> = etas.iter().map(ToString::to_string).collect();
    r.push(
        "direct_sum",
        REF_SUM,
        format!("eta = {} = {}", if summands.is_empty() { "0".into() } else { summands.join(" + ") }, r.eta),
        if r.eta.is_decisive() {
            Evidence::Exact
        } else {
            Evidence::Step
        },
        Params::new().int("components", etas.len() as u64),
    );
    r
}

fn verdict_text(c: &CriterionResult) -> &'static str {
    match c.verdict {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Analytic route to index 1 for a matrix whose `sum 1/a_n` converges:
/// log-concavity on the matrix itself, otherwise on a comparison matrix at
/// certified bounded distance.
fn berezanskii_route(
    j: &JacobiMatrix,
    cfg: &EngineConfig,
    r: &mut DeficiencyReport,
) -> Result<bool, EngineError> {
    let bounded_b = j.diagonal_bound();
    let ber = berezanskii_test(j, cfg.scan_n_max, cfg.min_clean_tail)?;
    r.diagnose("berezanskii", &ber);
    let holds = ber.verdict == Verdict::Holds && bounded_b.is_some();
    r.push(
        "berezanskii",
        REF_BEREZANSKII,
        if ber.verdict == Verdict::Holds && bounded_b.is_none() {
            "log-concave, but no certified bound on b_n"
        } else {
            verdict_text(&ber)
        },
        if holds { Evidence::Exact } else { Evidence::Step },
        Params::new()
            .text("matrix", j.name())
            .int("n_max", cfg.scan_n_max as u64)
            .int("min_clean_tail", cfg.min_clean_tail as u64),
    );
    if holds {
        return Ok(true);
    }

    let Some(cmp) = j.rule().and_then(|rule| rule.comparison()) else {
        return Ok(false);
    };
    let bound = bounded_difference(j, &cmp, cfg.scan_n_max)?;
    r.diagnose("perturbation", &bound);
    r.push(
        "bounded_difference",
        REF_STABILITY,
        if bound.certified {
            "certified bounded difference"
        } else {
            "difference not certified"
        },
        Evidence::Step,
        Params::new()
            .text("comparison", cmp.name())
            .num("sup_a", bound.sup_a)
            .num("sup_b", bound.sup_b),
    );
    if !bound.certified {
        return Ok(false);
    }
    let carl = carleman_test(&cmp, cfg.scan_n_max, cfg.divergence_threshold)?;
    r.diagnose("comparison.carleman", &carl);
    if carl.verdict != Verdict::Fails {
        r.push(
            "carleman",
            REF_CARLEMAN,
            format!("comparison matrix: {}", verdict_text(&carl)),
            Evidence::Step,
            Params::new().text("matrix", cmp.name()),
        );
        return Ok(false);
    }
    let ber = berezanskii_test(&cmp, cfg.scan_n_max, cfg.min_clean_tail)?;
    r.diagnose("comparison.berezanskii", &ber);
    let holds = ber.verdict == Verdict::Holds && cmp.diagonal_bound().is_some();
    r.push(
        "berezanskii",
        REF_BEREZANSKII,
        format!("comparison matrix: {}", verdict_text(&ber)),
        Evidence::Step,
        Params::new().text("matrix", cmp.name()),
    );
    if holds {
        r.push(
            "perturbation_stability",
            REF_STABILITY,
            "eta = eta(comparison) = 1",
            Evidence::Exact,
            Params::new()
                .num("relative_a", bound.relative_a)
                .num("relative_b", bound.relative_b),
        );
    }
    Ok(holds)
}

fn jacobi_pipeline(j: &JacobiMatrix, cfg: &EngineConfig) -> Result<DeficiencyReport, EngineError> {
    let mut r = DeficiencyReport::new();
    let carl = carleman_test(j, cfg.scan_n_max, cfg.divergence_threshold)?;
    r.diagnose("carleman", &carl);
    let mut params = Params::new()
        .text("matrix", j.name())
        .int("n_max", cfg.scan_n_max as u64);
    if let Some(s) = carl.witness.partial_sum {
        params = params.num("partial_sum", s);
    }
    r.push(
        "carleman",
        REF_CARLEMAN,
        verdict_text(&carl),
        if carl.verdict == Verdict::Holds {
            Evidence::Exact
        } else {
            Evidence::Step
        },
        params,
    );

    let analytic = match carl.verdict {
        Verdict::Holds => Some(0),
        Verdict::Fails if berezanskii_route(j, cfg, &mut r)? => Some(1),
        _ => None,
    };

    let classification = if analytic.is_none() || cfg.corroborate {
        let c = classify_limit(j, &cfg.classifier)?;
        r.diagnose("classifier", &c);
        Some(c)
    } else {
        None
    };
    let numeric = classification.as_ref().and_then(|c| c.class.deficiency_index());

    if let Some(c) = &classification {
        let verdict = match c.class {
            LimitClass::LimitPoint => "limit_point",
            LimitClass::LimitCircle => "limit_circle",
            LimitClass::Inconclusive => "inconclusive",
        };
        let evidence = match (analytic, numeric) {
            (Some(_), Some(_)) => Evidence::Corroboration,
            (None, Some(_)) => Evidence::Numerical,
            _ => Evidence::Step,
        };
        r.push(
            "limit_classifier",
            REF_CLASSIFIER,
            verdict,
            evidence,
            Params::new()
                .int("n_max", c.tolerances.n_max as u64)
                .text("decided_by", &c.decided_by),
        );
    }

    r.eta = match (analytic, numeric) {
        (Some(a), Some(n)) if a != n => {
            return Err(EngineError::InternalInconsistency(format!(
                "analytic criteria give eta = {a} but the classifier gives eta = {n} for {}",
                j.name()
            )))
        }
        (Some(a), _) => DeficiencyIndex::Finite(a),
        (None, Some(n)) => DeficiencyIndex::Finite(n),
        (None, None) => DeficiencyIndex::Undetermined,
    };
    Ok(r)
}
