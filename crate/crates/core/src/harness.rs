//! Campaigns: enumerate instances, run the oracle and every classifier on
//! each, and report where they disagree.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classifier::{
    classify, classify_classic, classify_exp_two_kernel, classify_plain, exp_two_kernel_hypotheses,
    kernel_plain_context, necessary_conditions, CaseLabel, ClassificationVerdict, ClassifierError,
    ConditionId, PlainReading, SlcNote, Witness,
};
use crate::grouprings::{oracle_with_interrupt, GroupRingError, OracleVerdict, SkewGenerator};
use crate::groups::{
    build_group, parse_group_spec, Group, GroupError, Involution, InvolutionError,
};
use crate::orientations::{enumerate_orientations, InstanceContext, OrientationError};
use crate::rings::{parse_ring_spec, Residues, Ring, RingError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("group {spec:?}: {source}")]
    Group { spec: String, source: GroupError },
    #[error("ring {spec:?}: {source}")]
    Ring { spec: String, source: RingError },
    #[error("invalid instance at {location}: {source}")]
    Validation {
        location: String,
        source: ValidationError,
    },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error("{0}")]
    Other(String),
}

fn invalid(location: impl Into<String>, source: impl Into<ValidationError>) -> HarnessError {
    HarnessError::Validation {
        location: location.into(),
        source: source.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub max_group_order: usize,
    /// Group specs as accepted by [`parse_group_spec`].
    pub group_families: Vec<String>,
    /// Ring specs as accepted by [`parse_ring_spec`].
    pub ring_specs: Vec<String>,
    /// 0 picks the worker pool's default.
    pub parallel_workers: usize,
    pub report_format: ReportFormat,
    pub fail_fast: bool,
    /// Per-instance budget; `None` disables the limit.
    pub timeout_secs: Option<f64>,
    /// Adds wall-clock fields, which makes reports run-dependent.
    pub record_timings: bool,
    pub plain_reading: PlainReading,
}

pub fn default_group_specs() -> Vec<String> {
    let mut specs: Vec<String> = (1..=16).map(|n| format!("C{n}")).collect();
    specs.extend((2..=4).map(|k| format!("C2^{k}")));
    specs.extend(["C2xC4", "C2xC8", "C4xC4"].map(String::from));
    specs.extend((3..=8).map(|n| format!("D{n}")));
    specs.extend((2..=4).map(|n| format!("Dic{n}")));
    specs
}

pub fn default_ring_specs() -> Vec<String> {
    [
        "Z3", "Z4", "Z5", "Z8", "Z9", "Z12", "Z4xZ3", "Z4xZ4", "Z8xZ3",
    ]
    .map(String::from)
    .to_vec()
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            max_group_order: 16,
            group_families: default_group_specs(),
            ring_specs: default_ring_specs(),
            parallel_workers: 0,
            report_format: ReportFormat::Json,
            fail_fast: false,
            timeout_secs: Some(30.0),
            record_timings: false,
            plain_reading: PlainReading::Literal,
        }
    }
}

impl CampaignConfig {
    pub fn restricted(groups: &[&str], rings: &[&str]) -> Self {
        CampaignConfig {
            group_families: groups.iter().map(|s| s.to_string()).collect(),
            ring_specs: rings.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: CampaignConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn timeout(&self) -> Option<Duration> {
        self.timeout_secs.map(Duration::from_secs_f64)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.resolve().map(|_| ())
    }

    fn resolve(&self) -> Result<Resolved, HarnessError> {
        if let Some(t) = self.timeout_secs {
            if !(t.is_finite() && t > 0.0) {
                return Err(HarnessError::Config(format!(
                    "timeout_secs must be positive, got {t}"
                )));
            }
        }
        let groups = self
            .group_families
            .iter()
            .map(|spec| {
                let g = parse_group_spec(spec).map_err(|source| HarnessError::Group {
                    spec: spec.clone(),
                    source,
                })?;
                if g.order() > self.max_group_order {
                    return Err(HarnessError::Config(format!(
                        "group {spec} has order {} > max_group_order {}",
                        g.order(),
                        self.max_group_order
                    )));
                }
                Ok(Arc::new(g))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rings = self
            .ring_specs
            .iter()
            .map(|spec| {
                parse_ring_spec(spec)
                    .map(Arc::new)
                    .map_err(|source| HarnessError::Ring {
                        spec: spec.clone(),
                        source,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((groups, rings))
    }
}

type Resolved = (Vec<Arc<Group>>, Vec<Arc<Ring>>);
type Block = (Arc<Group>, usize, Arc<Involution>);

/// One enumerated instance and its coordinates in the stream.
#[derive(Debug, Clone)]
pub struct Instance {
    pub position: usize,
    pub instance_id: String,
    pub involution_index: usize,
    pub orientation_index: usize,
    pub ctx: InstanceContext,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn sigma_residues(ctx: &InstanceContext) -> Vec<Residues> {
    ctx.sigma_values()
        .iter()
        .map(|&v| ctx.ring().to_residues(v))
        .collect()
}

fn sigma_digest(ctx: &InstanceContext) -> String {
    let json = serde_json::to_vec(&sigma_residues(ctx)).expect("residues serialize");
    hex(&Sha256::digest(json)[..8])
}

/// Stable hash of the serialized group table, involution, ring and
/// orientation.
pub fn instance_id(ctx: &InstanceContext) -> String {
    let payload = serde_json::json!({
        "table": ctx.group().table_rows(),
        "involution": ctx.involution().perm(),
        "ring": ctx.ring().moduli(),
        "sigma": sigma_residues(ctx),
    });
    let bytes = serde_json::to_vec(&payload).expect("payload serializes");
    hex(&Sha256::digest(bytes)[..16])
}

/// Every catalog group, involution, ring and compatible nontrivial
/// orientation, in that nesting order.
pub fn enumerate_instances(config: &CampaignConfig) -> Result<Vec<Instance>, HarnessError> {
    let (groups, rings) = config.resolve()?;
    let blocks: Vec<Block> = groups
        .iter()
        .flat_map(|g| {
            g.enumerate_involutions()
                .into_iter()
                .enumerate()
                .map(move |(i, tau)| (g.clone(), i, Arc::new(tau)))
                .collect::<Vec<_>>()
        })
        .collect();
    let cells: Vec<(&Block, &Arc<Ring>)> = blocks
        .iter()
        .flat_map(|b| rings.iter().map(move |r| (b, r)))
        .collect();
    let expand = |((g, i, tau), r): &(&Block, &Arc<Ring>)| {
        enumerate_orientations(g, tau, r)
            .into_iter()
            .enumerate()
            .map(|(k, o)| {
                let ctx = InstanceContext::new(g.clone(), tau.clone(), (*r).clone(), o)
                    .expect("enumerated orientations are valid");
                (*i, k, ctx)
            })
            .collect::<Vec<_>>()
    };
    #[cfg(feature = "parallel")]
    let expanded: Vec<Vec<(usize, usize, InstanceContext)>> = {
        use rayon::prelude::*;
        cells.par_iter().map(expand).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let expanded: Vec<Vec<(usize, usize, InstanceContext)>> = cells.iter().map(expand).collect();

    Ok(expanded
        .into_iter()
        .flatten()
        .enumerate()
        .map(
            |(position, (involution_index, orientation_index, ctx))| Instance {
                position,
                instance_id: instance_id(&ctx),
                involution_index,
                orientation_index,
                ctx,
            },
        )
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordState {
    Ok,
    TimedOut,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub element: usize,
    pub coefficient: Residues,
}

fn terms(ring: &Ring, pairs: &[(usize, crate::rings::RingElem)]) -> Vec<Term> {
    pairs
        .iter()
        .map(|&(element, c)| Term {
            element,
            coefficient: ring.to_residues(c),
        })
        .collect()
}

fn format_terms(terms: &[Term]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|t| {
            let c: Vec<String> = t.coefficient.0.iter().map(u32::to_string).collect();
            if c.len() == 1 {
                format!("{}*g{}", c[0], t.element)
            } else {
                format!("({})*g{}", c.join(","), t.element)
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Two generators whose anticommutator is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleWitnessSummary {
    pub first: Vec<Term>,
    pub second: Vec<Term>,
    pub sum: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub anticommutative: bool,
    pub generator_count: usize,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<OracleWitnessSummary>,
}

fn summarize_oracle(ctx: &InstanceContext, v: &OracleVerdict) -> OracleSummary {
    let r = ctx.ring();
    let gen_terms = |g: &SkewGenerator| terms(r, &g.terms);
    let gens = crate::grouprings::skew_generators(ctx);
    let by_index: Vec<&SkewGenerator> = gens.iter().collect();
    OracleSummary {
        anticommutative: v.anticommutative,
        generator_count: v.generator_count,
        vacuous: v.vacuous,
        witness: v.witness.as_ref().map(|w| OracleWitnessSummary {
            first: gen_terms(by_index[w.first]),
            second: gen_terms(by_index[w.second]),
            sum: terms(r, &w.sum),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub anticommutative: bool,
    pub case: CaseLabel,
    /// Conditions that did not pass, with their first witness.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failed: Vec<FailedCondition>,
    pub slc_note: SlcNote,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedCondition {
    pub condition: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

fn summarize_verdict(v: &ClassificationVerdict) -> VerdictSummary {
    VerdictSummary {
        anticommutative: v.anticommutative,
        case: v.case_label,
        failed: v
            .diagnostics
            .iter()
            .filter(|d| !d.passed)
            .map(|d| FailedCondition {
                condition: d.condition.clone(),
                witness: d.witness.clone(),
            })
            .collect(),
        slc_note: v.slc_note,
    }
}

/// Plain-involution criterion on the kernel subgroup against the oracle on
/// the kernel group ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelPlainSummary {
    pub kernel_order: usize,
    pub classifier: bool,
    pub case: CaseLabel,
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<ConditionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub position: Option<usize>,
    pub instance_id: String,
    pub group: String,
    pub group_order: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub involution_index: Option<usize>,
    pub involution_is_identity: bool,
    pub ring: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orientation_index: Option<usize>,
    pub sigma_digest: String,
    pub classic: bool,
    pub state: RecordState,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub general: Option<VerdictSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classic_criterion: Option<VerdictSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exp_two_criterion: Option<VerdictSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kernel_plain: Option<KernelPlainSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conditions: Option<ConditionSummary>,
    pub disagreement: bool,
    /// Which comparisons failed: `general`, `classic`, `exp_two`,
    /// `kernel_plain`, `conditions`, `vacuous`, `inconsistency`.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub disagreements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

impl InstanceRecord {
    fn skeleton(ctx: &InstanceContext) -> Self {
        InstanceRecord {
            position: None,
            instance_id: instance_id(ctx),
            group: ctx.group().name().to_string(),
            group_order: ctx.group().order(),
            involution_index: None,
            involution_is_identity: ctx.involution().is_identity(),
            ring: ctx.ring().spec(),
            orientation_index: None,
            sigma_digest: sigma_digest(ctx),
            classic: ctx.is_classic(),
            state: RecordState::Ok,
            error: None,
            oracle: None,
            general: None,
            classic_criterion: None,
            exp_two_criterion: None,
            kernel_plain: None,
            conditions: None,
            disagreement: false,
            disagreements: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn is_failure(&self) -> bool {
        self.disagreement || self.state != RecordState::Ok
    }
}

/// Per-instance evaluation settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub timeout: Option<Duration>,
    pub record_timings: bool,
    pub plain_reading: PlainReading,
}

impl From<&CampaignConfig> for EvalOptions {
    fn from(c: &CampaignConfig) -> Self {
        EvalOptions {
            timeout: c.timeout(),
            record_timings: c.record_timings,
            plain_reading: c.plain_reading,
        }
    }
}

/// Runs the oracle and every applicable classifier on one context.
pub fn evaluate(ctx: &InstanceContext, opts: &EvalOptions) -> InstanceRecord {
    let start = (opts.timeout.is_some() || opts.record_timings).then(Instant::now);
    let stop = || match (start, opts.timeout) {
        (Some(s), Some(t)) => s.elapsed() > t,
        _ => false,
    };
    let mut rec = InstanceRecord::skeleton(ctx);
    if let Err(e) = evaluate_into(ctx, opts, &stop, &mut rec) {
        match e {
            EvalFailure::Interrupted => {
                rec.state = RecordState::TimedOut;
                rec.error = Some("timed out".into());
            }
            EvalFailure::Other(message) => {
                rec.state = RecordState::Error;
                rec.error = Some(message);
            }
        }
    }
    rec.disagreement = !rec.disagreements.is_empty();
    if opts.record_timings {
        rec.elapsed_ms = start.map(|s| s.elapsed().as_secs_f64() * 1e3);
    }
    rec
}

enum EvalFailure {
    Interrupted,
    Other(String),
}

impl From<GroupRingError> for EvalFailure {
    fn from(e: GroupRingError) -> Self {
        match e {
            GroupRingError::Interrupted => EvalFailure::Interrupted,
            e => EvalFailure::Other(e.to_string()),
        }
    }
}

impl From<ClassifierError> for EvalFailure {
    fn from(e: ClassifierError) -> Self {
        EvalFailure::Other(e.to_string())
    }
}

fn evaluate_into(
    ctx: &InstanceContext,
    opts: &EvalOptions,
    stop: &dyn Fn() -> bool,
    rec: &mut InstanceRecord,
) -> Result<(), EvalFailure> {
    let oracle = oracle_with_interrupt(ctx, stop)?;
    let truth = oracle.anticommutative;
    rec.oracle = Some(summarize_oracle(ctx, &oracle));
    if oracle.vacuous {
        rec.disagreements.push("vacuous".into());
    }

    let general = classify(ctx)?;
    if general.anticommutative != truth {
        rec.disagreements.push("general".into());
    }
    if !general.inconsistencies.is_empty() {
        rec.disagreements.push("inconsistency".into());
    }
    rec.general = Some(summarize_verdict(&general));

    if ctx.is_classic() {
        let v = classify_classic(ctx)?;
        if v.anticommutative != truth {
            rec.disagreements.push("classic".into());
        }
        rec.classic_criterion = Some(summarize_verdict(&v));
    }

    match exp_two_kernel_hypotheses(ctx) {
        Ok(()) => {
            let v = classify_exp_two_kernel(ctx)?;
            if v.anticommutative != truth {
                rec.disagreements.push("exp_two".into());
            }
            rec.exp_two_criterion = Some(summarize_verdict(&v));
        }
        Err(ClassifierError::HypothesesNotMet(_)) => {}
        Err(e) => return Err(e.into()),
    }

    let kctx = kernel_plain_context(ctx);
    let plain = classify_plain(
        kctx.group(),
        kctx.involution(),
        kctx.ring(),
        opts.plain_reading,
    );
    let plain_oracle = oracle_with_interrupt(&kctx, stop)?.anticommutative;
    if plain.anticommutative != plain_oracle {
        rec.disagreements.push("kernel_plain".into());
    }
    rec.kernel_plain = Some(KernelPlainSummary {
        kernel_order: kctx.group().order(),
        classifier: plain.anticommutative,
        case: plain.case_label,
        oracle: plain_oracle,
    });

    if truth {
        let checks = necessary_conditions(ctx, true)?;
        let violations: Vec<ConditionId> =
            checks.iter().filter(|c| !c.holds).map(|c| c.id).collect();
        if !violations.is_empty() {
            rec.disagreements.push("conditions".into());
        }
        rec.conditions = Some(ConditionSummary {
            checked: checks.len(),
            violations,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub instances: usize,
    pub anticommutative: usize,
    pub disagreements: usize,
    pub errors: usize,
    pub timed_out: usize,
    pub vacuous: usize,
    /// Anticommutative instances per case of the general criterion.
    pub cases: BTreeMap<String, usize>,
    /// Set when `fail_fast` cut the campaign short.
    pub stopped_early: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub summary: CampaignSummary,
    pub records: Vec<InstanceRecord>,
}

impl Report {
    pub fn from_records(records: Vec<InstanceRecord>, stopped_early: bool) -> Self {
        let mut s = CampaignSummary {
            instances: records.len(),
            stopped_early,
            ..Default::default()
        };
        for r in &records {
            match r.state {
                RecordState::Ok => {}
                RecordState::TimedOut => s.timed_out += 1,
                RecordState::Error => s.errors += 1,
            }
            if r.disagreement {
                s.disagreements += 1;
            }
            if let Some(o) = &r.oracle {
                if o.vacuous {
                    s.vacuous += 1;
                }
                if o.anticommutative {
                    s.anticommutative += 1;
                    if let Some(g) = &r.general {
                        *s.cases.entry(g.case.as_str().to_string()).or_default() += 1;
                    }
                }
            }
        }
        Report {
            summary: s,
            records,
        }
    }

    /// Zero disagreements and zero errors or timeouts.
    pub fn passed(&self) -> bool {
        self.summary.disagreements == 0 && self.summary.errors == 0 && self.summary.timed_out == 0
    }
}

/// Evaluates every instance of the campaign. Record order follows the
/// instance stream regardless of worker count.
pub fn run_campaign(config: &CampaignConfig) -> Result<Report, HarnessError> {
    let started = config.record_timings.then(Instant::now);
    let instances = enumerate_instances(config)?;
    let opts = EvalOptions::from(config);
    let first_failure = AtomicUsize::new(usize::MAX);

    let eval = |inst: &Instance| -> Option<InstanceRecord> {
        if config.fail_fast && inst.position > first_failure.load(Ordering::Relaxed) {
            return None;
        }
        let mut rec = evaluate(&inst.ctx, &opts);
        rec.position = Some(inst.position);
        rec.involution_index = Some(inst.involution_index);
        rec.orientation_index = Some(inst.orientation_index);
        if config.fail_fast && rec.is_failure() {
            first_failure.fetch_min(inst.position, Ordering::Relaxed);
        }
        Some(rec)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Option<InstanceRecord>> = {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallel_workers)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        pool.install(|| instances.par_iter().map(eval).collect())
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Option<InstanceRecord>> = instances.iter().map(eval).collect();

    let cutoff = first_failure.into_inner();
    let stopped_early = cutoff != usize::MAX && cutoff + 1 < instances.len();
    let records: Vec<InstanceRecord> = results
        .into_iter()
        .take(cutoff.saturating_add(1))
        .map(|r| r.expect("instances up to the first failure are evaluated"))
        .collect();
    let mut report = Report::from_records(records, stopped_early);
    report.summary.runtime_ms = started.map(|s| s.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// Group part of an instance file: a catalog name or an explicit table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvolutionSource {
    pub perm: Vec<usize>,
}

/// A ring value written either as a bare residue (one-factor rings) or as a
/// residue tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSource {
    Scalar(u32),
    Tuple(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub group: GroupSource,
    pub involution: InvolutionSource,
    pub ring: String,
    pub sigma: Vec<ValueSource>,
}

impl InstanceFile {
    pub fn from_context(ctx: &InstanceContext) -> Self {
        InstanceFile {
            group: GroupSource {
                name: Some(ctx.group().name().to_string()),
                table: Some(ctx.group().table_rows()),
                identity: Some(ctx.group().identity()),
            },
            involution: InvolutionSource {
                perm: ctx.involution().perm().to_vec(),
            },
            ring: ctx.ring().spec(),
            sigma: sigma_residues(ctx)
                .into_iter()
                .map(|r| ValueSource::Tuple(r.0))
                .collect(),
        }
    }

    pub fn to_context(&self) -> Result<InstanceContext, HarnessError> {
        let group = match (&self.group.name, &self.group.table) {
            (name, Some(table)) => build_group(
                name.clone().unwrap_or_else(|| "G".into()),
                table,
                self.group.identity,
            )
            .map_err(|e| invalid("group.table", e))?,
            (Some(name), None) => parse_group_spec(name).map_err(|e| invalid("group.name", e))?,
            (None, None) => {
                return Err(invalid(
                    "group",
                    ValidationError::Other("expected name or table".into()),
                ))
            }
        };
        let tau = Involution::new(&group, self.involution.perm.clone())
            .map_err(|e| invalid("involution.perm", e))?;
        let ring = parse_ring_spec(&self.ring).map_err(|e| invalid("ring", e))?;
        if self.sigma.len() != group.order() {
            return Err(invalid(
                "sigma",
                ValidationError::Other(format!(
                    "expected {} values, got {}",
                    group.order(),
                    self.sigma.len()
                )),
            ));
        }
        let values = self
            .sigma
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let res = match v {
                    ValueSource::Scalar(a) => vec![*a],
                    ValueSource::Tuple(t) => t.clone(),
                };
                ring.elem(&res)
                    .map_err(|e| invalid(format!("sigma[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        InstanceContext::from_values(group.into(), tau.into(), ring.into(), values)
            .map_err(|e| invalid("sigma", e))
    }
}

/// Parses an instance file body and evaluates it.
pub fn check_instance_str(text: &str, opts: &EvalOptions) -> Result<InstanceRecord, HarnessError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let ctx = file.to_context()?;
    Ok(evaluate(&ctx, opts))
}

pub fn check_instance(path: &Path, opts: &EvalOptions) -> Result<InstanceRecord, HarnessError> {
    check_instance_str(&fs::read_to_string(path)?, opts)
}

/// Flat CSV row; witnesses are compacted into strings.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    position: Option<usize>,
    instance_id: &'a str,
    group: &'a str,
    group_order: usize,
    involution_index: Option<usize>,
    involution_is_identity: bool,
    ring: &'a str,
    orientation_index: Option<usize>,
    sigma_digest: &'a str,
    classic: bool,
    state: &'static str,
    error: &'a str,
    oracle: Option<bool>,
    generator_count: Option<usize>,
    oracle_witness: String,
    general: Option<bool>,
    general_case: &'static str,
    general_failed: String,
    classic_criterion: Option<bool>,
    classic_case: &'static str,
    exp_two_criterion: Option<bool>,
    exp_two_case: &'static str,
    kernel_plain_classifier: Option<bool>,
    kernel_plain_oracle: Option<bool>,
    condition_violations: String,
    disagreement: bool,
    disagreements: String,
    elapsed_ms: Option<f64>,
}

fn format_witness(w: &Witness) -> String {
    let coeffs: Vec<String> = w
        .coefficients
        .iter()
        .map(|c| c.0.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .collect();
    format!(
        "g{}|{}",
        w.elements
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",g"),
        coeffs.join(";")
    )
}

impl<'a> From<&'a InstanceRecord> for CsvRow<'a> {
    fn from(r: &'a InstanceRecord) -> Self {
        let case = |v: &Option<VerdictSummary>| v.as_ref().map_or("", |v| v.case.as_str());
        CsvRow {
            position: r.position,
            instance_id: &r.instance_id,
            group: &r.group,
            group_order: r.group_order,
            involution_index: r.involution_index,
            involution_is_identity: r.involution_is_identity,
            ring: &r.ring,
            orientation_index: r.orientation_index,
            sigma_digest: &r.sigma_digest,
            classic: r.classic,
            state: match r.state {
                RecordState::Ok => "ok",
                RecordState::TimedOut => "timed_out",
                RecordState::Error => "error",
            },
            error: r.error.as_deref().unwrap_or(""),
            oracle: r.oracle.as_ref().map(|o| o.anticommutative),
            generator_count: r.oracle.as_ref().map(|o| o.generator_count),
            oracle_witness: r
                .oracle
                .as_ref()
                .and_then(|o| o.witness.as_ref())
                .map(|w| {
                    format!(
                        "{{{}}} & {{{}}} -> {}",
                        format_terms(&w.first),
                        format_terms(&w.second),
                        format_terms(&w.sum)
                    )
                })
                .unwrap_or_default(),
            general: r.general.as_ref().map(|v| v.anticommutative),
            general_case: case(&r.general),
            general_failed: r
                .general
                .as_ref()
                .map(|v| {
                    v.failed
                        .iter()
                        .map(|f| match &f.witness {
                            Some(w) => format!("{}[{}]", f.condition, format_witness(w)),
                            None => f.condition.clone(),
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default(),
            classic_criterion: r.classic_criterion.as_ref().map(|v| v.anticommutative),
            classic_case: case(&r.classic_criterion),
            exp_two_criterion: r.exp_two_criterion.as_ref().map(|v| v.anticommutative),
            exp_two_case: case(&r.exp_two_criterion),
            kernel_plain_classifier: r.kernel_plain.as_ref().map(|k| k.classifier),
            kernel_plain_oracle: r.kernel_plain.as_ref().map(|k| k.oracle),
            condition_violations: r
                .conditions
                .as_ref()
                .map(|c| {
                    c.violations
                        .iter()
                        .map(|id| {
                            serde_json::to_value(id)
                                .ok()
                                .and_then(|v| v.as_str().map(String::from))
                                .unwrap_or_default()
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default(),
            disagreement: r.disagreement,
            disagreements: r.disagreements.join(" "),
            elapsed_ms: r.elapsed_ms,
        }
    }
}

/// Serializes a report. JSON holds the summary and structured records; CSV
/// has one flat row per record.
pub fn render_report(report: &Report, format: ReportFormat) -> Result<Vec<u8>, HarnessError> {
    match format {
        ReportFormat::Json => {
            // Compact, one record per line: campaigns run to 10^5 records.
            let mut out = b"{\"summary\":".to_vec();
            serde_json::to_writer(&mut out, &report.summary)?;
            out.extend_from_slice(b",\"records\":[");
            for (i, r) in report.records.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                out.push(b'\n');
                serde_json::to_writer(&mut out, r)?;
            }
            out.extend_from_slice(if report.records.is_empty() {
                b"]}\n"
            } else {
                b"\n]}\n"
            });
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if report.records.is_empty() {
                // Keep the header so empty reports still parse.
                w.write_record(csv_header())?;
            }
            for r in &report.records {
                w.serialize(CsvRow::from(r))?;
            }
            w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
        }
    }
}

fn csv_header() -> Vec<&'static str> {
    vec![
        "position",
        "instance_id",
        "group",
        "group_order",
        "involution_index",
        "involution_is_identity",
        "ring",
        "orientation_index",
        "sigma_digest",
        "classic",
        "state",
        "error",
        "oracle",
        "generator_count",
        "oracle_witness",
        "general",
        "general_case",
        "general_failed",
        "classic_criterion",
        "classic_case",
        "exp_two_criterion",
        "exp_two_case",
        "kernel_plain_classifier",
        "kernel_plain_oracle",
        "condition_violations",
        "disagreement",
        "disagreements",
        "elapsed_ms",
    ]
}

pub fn emit_report(report: &Report, format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let bytes = render_report(report, format)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}
