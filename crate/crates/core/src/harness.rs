//! Seeded trial batches with oracle comparison and CSV output.

use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::edge_arrival::{estimate_eps, estimate_phi, BITS_PER_SAMPLE};
use crate::error::EstimatorError;
use crate::graph::{
    alpha_exact, beta_exact, materialize, parse_stream, turan_bound, Graph, GraphError, GraphStream, ParseError,
    StreamEvent, StreamMode, ALPHA_EXACT_LIMIT,
};
use crate::stream_gen::{gen_gadget_stream, gen_gnm, to_stream, GadgetMeta, GadgetSpec, GenError, OrderPolicy};
use crate::vertex_arrival::{degtest, estimate_vertex_arrival, n_d_of_stream, DegTestConfig};

/// Version written on the first line of every CSV report.
pub const CSV_SCHEMA: u32 = 1;

/// Largest stream for which the `n_d` oracle is run automatically.
pub const ND_ORACLE_LIMIT: usize = 10_000;

pub const DEFAULT_EPS: f64 = 0.25;
pub const DEFAULT_DEGTEST_EPS: f64 = 0.5;
pub const DEFAULT_PHI: f64 = 4.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot summarize an empty batch")]
    Empty,
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// True for problems with the request itself rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, HarnessError::Io(_) | HarnessError::Csv(_) | HarnessError::Input { .. })
            && !matches!(self, HarnessError::Parse(ParseError::Io(_)))
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, HarnessError> {
    Err(HarnessError::Invalid(msg.into()))
}

/// Where the graph stream comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Gnm { n: usize, m: usize },
    Gadget(GadgetSpec),
}

impl FromStr for Source {
    type Err = HarnessError;

    /// `gnm:n=..,m=..` or `gadget:k=..,z=..,c=..,x=1+3,y=..`; anything else
    /// is taken as a path.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("gnm:") {
            let kv = key_values(rest, &["n", "m"])?;
            let n = number(&kv, "n")?.ok_or_else(|| HarnessError::Invalid("gnm needs n".into()))?;
            let m = number(&kv, "m")?.ok_or_else(|| HarnessError::Invalid("gnm needs m".into()))?;
            Ok(Source::Gnm { n, m })
        } else if let Some(rest) = s.strip_prefix("gadget:") {
            let kv = key_values(rest, &["k", "z", "c", "x", "y"])?;
            let get = |key| number(&kv, key)?.ok_or_else(|| HarnessError::Invalid(format!("gadget needs {key}")));
            let set = |key| -> Result<Vec<usize>, HarnessError> {
                match kv.iter().find(|(k, _)| k == key) {
                    None => Ok(Vec::new()),
                    Some((_, v)) if v.is_empty() => Ok(Vec::new()),
                    Some((_, v)) => v
                        .split('+')
                        .map(|x| x.parse().map_err(|_| HarnessError::Invalid(format!("bad element {x:?} in {key}"))))
                        .collect(),
                }
            };
            let spec = GadgetSpec::new(get("k")?, get("z")?, get("c")?, set("x")?, set("y")?)?;
            Ok(Source::Gadget(spec))
        } else if s.is_empty() {
            invalid("empty source")
        } else {
            Ok(Source::File(PathBuf::from(s)))
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |set: &std::collections::BTreeSet<usize>| {
            set.iter().map(usize::to_string).collect::<Vec<_>>().join("+")
        };
        match self {
            Source::File(path) => write!(f, "{}", path.display()),
            Source::Gnm { n, m } => write!(f, "gnm:n={n},m={m}"),
            Source::Gadget(s) => write!(f, "gadget:k={},z={},c={},x={},y={}", s.k, s.z, s.c, join(&s.x), join(&s.y)),
        }
    }
}

fn key_values(body: &str, allowed: &[&str]) -> Result<Vec<(String, String)>, HarnessError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let Some((k, v)) = part.split_once('=') else {
            return invalid(format!("expected key=value, got {part:?}"));
        };
        if !allowed.contains(&k) {
            return invalid(format!("unknown key {k:?}"));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return invalid(format!("key {k:?} given twice"));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn number(kv: &[(String, String)], key: &str) -> Result<Option<usize>, HarnessError> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.parse().map_err(|_| HarnessError::Invalid(format!("{key} must be a nonnegative integer"))))
        .transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// `(1 + eps)` edge-arrival estimator.
    Eps,
    /// `phi` edge-arrival estimator.
    Phi,
    /// Vertex-arrival lower bound.
    Vertex,
    /// A single `n_d` estimate.
    Degtest,
}

impl EstimatorKind {
    pub fn mode(self) -> StreamMode {
        match self {
            EstimatorKind::Eps | EstimatorKind::Phi => StreamMode::Edge,
            EstimatorKind::Vertex | EstimatorKind::Degtest => StreamMode::Vertex,
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Eps => "eps",
            EstimatorKind::Phi => "phi",
            EstimatorKind::Vertex => "vertex",
            EstimatorKind::Degtest => "degtest",
        })
    }
}

impl FromStr for EstimatorKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eps" => Ok(EstimatorKind::Eps),
            "phi" => Ok(EstimatorKind::Phi),
            "vertex" => Ok(EstimatorKind::Vertex),
            "degtest" => Ok(EstimatorKind::Degtest),
            _ => invalid(format!("unknown estimator {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    #[default]
    Auto,
    Off,
}

impl FromStr for OracleMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(OracleMode::Auto),
            "off" => Ok(OracleMode::Off),
            _ => invalid(format!("unknown oracle mode {s:?}")),
        }
    }
}

/// Estimator parameters; unset values fall back to documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Params {
    pub eps: Option<f64>,
    pub phi: Option<f64>,
    /// `gamma` for `eps`, `gamma'` for `phi`. Defaults to the Turán bound.
    pub gamma: Option<f64>,
    pub d: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub source: Source,
    /// Stream mode; defaults to the mode the estimator consumes.
    pub mode: Option<StreamMode>,
    pub estimator: EstimatorKind,
    pub params: Params,
    pub trials: usize,
    pub base_seed: u64,
    pub oracle: OracleMode,
}

impl TrialPlan {
    pub fn new(source: Source, estimator: EstimatorKind) -> Self {
        TrialPlan {
            source,
            mode: None,
            estimator,
            params: Params::default(),
            trials: 1,
            base_seed: 0,
            oracle: OracleMode::Auto,
        }
    }

    pub fn mode(&self) -> StreamMode {
        self.mode.unwrap_or(self.estimator.mode())
    }

    /// Checks everything that can be checked without reading the input.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.mode() != self.estimator.mode() {
            return invalid(format!(
                "estimator {} needs a {} stream, not {}",
                self.estimator,
                self.estimator.mode(),
                self.mode()
            ));
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.base_seed.checked_add(self.trials as u64 - 1).is_none() {
            return invalid("seed range overflows");
        }
        if self.estimator == EstimatorKind::Degtest && self.params.d.is_none() {
            return invalid("degtest needs a degree bound d");
        }
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => invalid(format!("{name} must be a finite positive number")),
            _ => Ok(()),
        };
        positive("eps", self.params.eps)?;
        positive("phi", self.params.phi)?;
        positive("gamma", self.params.gamma)?;
        Ok(())
    }
}

/// A stream ready for trials, plus gadget metadata when generated.
#[derive(Debug, Clone)]
pub struct Instance {
    pub stream: GraphStream,
    pub graph: Graph,
    pub gadget: Option<GadgetMeta>,
}

/// Builds the plan's stream. Generated instances use `base_seed` for both
/// the graph and the arrival order, so all trials see the same stream.
pub fn load_instance(plan: &TrialPlan) -> Result<Instance, HarnessError> {
    let mode = plan.mode();
    let seed = plan.base_seed;
    let (stream, gadget) = match &plan.source {
        Source::File(path) => {
            let file = File::open(path).map_err(|source| HarnessError::Input {
                path: path.clone(),
                source,
            })?;
            let stream = parse_stream(BufReader::new(file))?;
            if stream.mode != mode {
                return invalid(format!("{} holds a {} stream, expected {mode}", path.display(), stream.mode));
            }
            (stream, None)
        }
        Source::Gnm { n, m } => {
            let g = gen_gnm(*n, *m, seed)?;
            (to_stream(&g, mode, &OrderPolicy::UniformShuffle(seed))?, None)
        }
        Source::Gadget(spec) => {
            let (stream, meta) = gen_gadget_stream(spec, seed)?;
            let stream = match mode {
                StreamMode::Vertex => stream,
                StreamMode::Edge => flatten_to_edges(&stream),
            };
            (stream, Some(meta))
        }
    };
    let graph = materialize(&stream)?;
    Ok(Instance { stream, graph, gadget })
}

/// Edge-arrival stream with the same edges in the same order.
pub fn flatten_to_edges(stream: &GraphStream) -> GraphStream {
    let events = stream
        .events
        .iter()
        .flat_map(|ev| match ev {
            StreamEvent::Vertex { v, back } => back.iter().map(|&u| StreamEvent::Edge(u, *v)).collect(),
            StreamEvent::Edge(u, v) => vec![StreamEvent::Edge(*u, *v)],
        })
        .collect();
    GraphStream::new(StreamMode::Edge, stream.declared_n, events)
}

/// Exact reference values computed once per instance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Oracle {
    pub beta: Option<f64>,
    pub alpha: Option<usize>,
    pub n_d: Option<usize>,
}

pub fn compute_oracle(plan: &TrialPlan, instance: &Instance) -> Result<Oracle, HarnessError> {
    if plan.oracle == OracleMode::Off {
        return Ok(Oracle::default());
    }
    let g = &instance.graph;
    let alpha = if g.n() <= ALPHA_EXACT_LIMIT {
        Some(alpha_exact(g)?)
    } else {
        None
    };
    let n_d = match (plan.estimator, plan.params.d) {
        (EstimatorKind::Degtest, Some(d)) if g.n() <= ND_ORACLE_LIMIT => Some(n_d_of_stream(&instance.stream, d)?),
        _ => None,
    };
    Ok(Oracle {
        beta: Some(beta_exact(g)),
        alpha,
        n_d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub estimate: f64,
    pub exact_beta: Option<f64>,
    pub exact_alpha: Option<usize>,
    pub exact_nd: Option<usize>,
    /// `max(estimate / target, target / estimate)` where the target is `n_d`
    /// for `degtest` and beta otherwise.
    pub ratio: Option<f64>,
    pub sample_size: usize,
    pub space_bits: u64,
    pub wall_time_s: f64,
}

/// `max(a / b, b / a)`; 1 when both are zero, infinite when one is.
pub fn symmetric_ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else if a <= 0.0 || b <= 0.0 {
        f64::INFINITY
    } else {
        (a / b).max(b / a)
    }
}

/// Resolved parameters shared by every trial of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolved {
    pub eps: f64,
    pub phi: Option<f64>,
    pub gamma: Option<f64>,
    pub d: Option<u64>,
}

pub fn resolve(plan: &TrialPlan, instance: &Instance) -> Resolved {
    let p = plan.params;
    let eps = p.eps.unwrap_or(match plan.estimator {
        EstimatorKind::Degtest | EstimatorKind::Vertex => DEFAULT_DEGTEST_EPS,
        _ => DEFAULT_EPS,
    });
    let gamma = match plan.estimator {
        EstimatorKind::Eps | EstimatorKind::Phi => Some(p.gamma.unwrap_or_else(|| turan_bound(&instance.graph))),
        _ => None,
    };
    Resolved {
        eps,
        phi: match plan.estimator {
            EstimatorKind::Phi => Some(p.phi.unwrap_or(DEFAULT_PHI)),
            _ => p.phi,
        },
        gamma,
        d: p.d,
    }
}

/// Runs one trial. Deterministic in `(plan, instance, trial)` apart from
/// `wall_time_s`.
pub fn run_trial(
    plan: &TrialPlan,
    instance: &Instance,
    resolved: &Resolved,
    oracle: &Oracle,
    trial: usize,
) -> Result<TrialRecord, HarnessError> {
    let seed = plan.base_seed + trial as u64;
    let stream = &instance.stream;
    let start = Instant::now();
    let (estimate, sample_size, space_bits) = match plan.estimator {
        EstimatorKind::Eps => {
            let r = estimate_eps(stream, resolved.eps, resolved.gamma.unwrap_or_default(), seed)?;
            (r.beta_hat, r.sample_size, r.space_bits)
        }
        EstimatorKind::Phi => {
            let phi = resolved.phi.unwrap_or(DEFAULT_PHI);
            let r = estimate_phi(stream, phi, resolved.gamma.unwrap_or_default(), seed)?;
            (r.value, r.inner.sample_size, r.inner.space_bits)
        }
        EstimatorKind::Vertex => {
            let r = estimate_vertex_arrival(stream, seed)?;
            let peak = r.per_degree.iter().map(|t| t.peak_sample).sum();
            (r.gamma_hat, peak, r.peak_bits)
        }
        EstimatorKind::Degtest => {
            let d = resolved.d.unwrap_or_default();
            let r = degtest(stream, DegTestConfig::new(d, resolved.eps, stream.declared_n, seed)?)?;
            (r.estimate, r.peak_sample, r.peak_sample as u64 * BITS_PER_SAMPLE)
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let target = match plan.estimator {
        EstimatorKind::Degtest => oracle.n_d.map(|x| x as f64),
        _ => oracle.beta,
    };
    Ok(TrialRecord {
        trial,
        seed,
        estimate,
        exact_beta: oracle.beta,
        exact_alpha: oracle.alpha,
        exact_nd: oracle.n_d,
        ratio: target.map(|t| symmetric_ratio(estimate, t)),
        sample_size,
        space_bits,
        wall_time_s,
    })
}

/// Result of [`run_plan`]: records in trial order.
#[derive(Debug, Clone)]
pub struct PlanOutput {
    pub plan: TrialPlan,
    pub resolved: Resolved,
    pub n: usize,
    pub m: usize,
    pub records: Vec<TrialRecord>,
    pub gadget: Option<GadgetMeta>,
}

/// Runs all trials (concurrently) with seeds `base_seed + t`.
pub fn run_plan(plan: &TrialPlan) -> Result<PlanOutput, HarnessError> {
    plan.validate()?;
    let instance = load_instance(plan)?;
    run_plan_on(plan, &instance)
}

/// Like [`run_plan`] on an already loaded instance.
pub fn run_plan_on(plan: &TrialPlan, instance: &Instance) -> Result<PlanOutput, HarnessError> {
    plan.validate()?;
    let resolved = resolve(plan, instance);
    let oracle = compute_oracle(plan, instance)?;
    let records = (0..plan.trials)
        .into_par_iter()
        .map(|t| run_trial(plan, instance, &resolved, &oracle, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PlanOutput {
        plan: plan.clone(),
        resolved,
        n: instance.graph.n(),
        m: instance.graph.m(),
        records,
        gadget: instance.gadget.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    /// Records that carry a ratio.
    pub compared: usize,
    pub within_1_plus_eps: Option<f64>,
    pub within_1_5: Option<f64>,
    pub within_phi: Option<f64>,
    pub mean_sample_size: f64,
    pub max_sample_size: usize,
    pub mean_space_bits: f64,
}

/// Fraction of compared records whose ratio is at most `factor`.
pub fn fraction_within(records: &[TrialRecord], factor: f64) -> Option<f64> {
    let ratios: Vec<f64> = records.iter().filter_map(|r| r.ratio).collect();
    if ratios.is_empty() {
        return None;
    }
    Some(ratios.iter().filter(|&&r| r <= factor).count() as f64 / ratios.len() as f64)
}

pub fn summarize(records: &[TrialRecord], eps: Option<f64>, phi: Option<f64>) -> Result<Summary, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Empty);
    }
    let count = records.len() as f64;
    Ok(Summary {
        trials: records.len(),
        compared: records.iter().filter(|r| r.ratio.is_some()).count(),
        within_1_plus_eps: eps.and_then(|e| fraction_within(records, 1.0 + e)),
        within_1_5: fraction_within(records, 1.5),
        within_phi: phi.and_then(|p| fraction_within(records, p)),
        mean_sample_size: records.iter().map(|r| r.sample_size as f64).sum::<f64>() / count,
        max_sample_size: records.iter().map(|r| r.sample_size).max().unwrap_or(0),
        mean_space_bits: records.iter().map(|r| r.space_bits as f64).sum::<f64>() / count,
    })
}

const COLUMNS: [&str; 20] = [
    "source", "mode", "estimator", "n", "m", "eps", "phi", "gamma", "d", "base_seed", "trials", "trial", "seed",
    "estimate", "exact_beta", "exact_alpha", "exact_nd", "ratio", "sample_size", "space_bits",
];

fn opt<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `schema=1`, a header and one row per record. Every row repeats
/// the full parameter set. Wall time is written only with `timing`, so
/// that identical plans give byte-identical files by default.
pub fn write_csv<W: Write>(mut w: W, out: &PlanOutput, timing: bool) -> Result<(), HarnessError> {
    writeln!(w, "schema={CSV_SCHEMA}")?;
    let mut csv = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if timing {
        header.push("wall_time_s");
    }
    csv.write_record(&header)?;
    let (plan, res) = (&out.plan, &out.resolved);
    for r in &out.records {
        let mut row = vec![
            plan.source.to_string(),
            plan.mode().to_string(),
            plan.estimator.to_string(),
            out.n.to_string(),
            out.m.to_string(),
            res.eps.to_string(),
            opt(res.phi),
            opt(res.gamma),
            opt(res.d),
            plan.base_seed.to_string(),
            plan.trials.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.estimate.to_string(),
            opt(r.exact_beta),
            opt(r.exact_alpha),
            opt(r.exact_nd),
            opt(r.ratio),
            r.sample_size.to_string(),
            r.space_bits.to_string(),
        ];
        if timing {
            row.push(r.wall_time_s.to_string());
        }
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(mut w: W, summary: &Summary) -> Result<(), HarnessError> {
    writeln!(w, "schema={CSV_SCHEMA}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.serialize(summary)?;
    csv.flush()?;
    Ok(())
}
