//! Named checks and transforms, selected at runtime.
//!
//! A [`Check`] turns a parameter point into a [`CheckOutcome`]; a
//! [`Transform`] rewrites a pipeline [`Stage`]. Both registries come
//! preloaded with the built-in strategies and accept extra ones.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::analysis::{
    battery, function_alternation_probe, weight_log_battery, BatteryTarget, Flavor, ProbeFlavor,
    PropertyVerdict, DEFAULT_K_MAX, DEFAULT_N_MAX,
};
use crate::berger::{berger_measure, verify_representation, AtomicMeasure, DEFAULT_DEPTH};
use crate::error::{GrwsError, Result};
use crate::hankel::{hyponormality_order, HypoVerdict, DEFAULT_J_PROBE, DEFAULT_K_PROBE};
use crate::model::{ShiftParams, WeightSequence};
use crate::rational::{parse_rational, rat, serde_rational, serde_rational_vec, Rational};
use crate::sequence::LogSequence;
use crate::transforms::{
    affine_subshift, affine_subshift_params, aluthge, quotient_shift, reciprocal,
    reciprocal_weights, schur_power, viiia_derived_weights, AffineMap,
};

/// Depths shared by every check run on a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckContext {
    pub params: ShiftParams,
    pub n_max: usize,
    pub k_max: usize,
    pub k_probe: usize,
    pub j_probe: usize,
    pub berger_depth: usize,
    pub spacings: Vec<Rational>,
}

impl CheckContext {
    pub fn new(params: ShiftParams) -> Self {
        Self {
            params,
            n_max: DEFAULT_N_MAX,
            k_max: DEFAULT_K_MAX,
            k_probe: DEFAULT_K_PROBE,
            j_probe: DEFAULT_J_PROBE,
            berger_depth: DEFAULT_DEPTH,
            spacings: vec![rat(1, 2), rat(1, 1), rat(2, 1)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckOutcome {
    Property {
        verdict: PropertyVerdict,
    },
    Hypo {
        verdict: HypoVerdict,
    },
    Measure {
        measure: AtomicMeasure,
        representation: PropertyVerdict,
    },
    Error {
        error: String,
        message: String,
    },
}

impl CheckOutcome {
    pub fn from_error(e: &GrwsError) -> Self {
        CheckOutcome::Error {
            error: e.kind().to_string(),
            message: e.to_string(),
        }
    }

    /// One-cell summary for CSV output.
    pub fn summary(&self) -> String {
        match self {
            CheckOutcome::Property { verdict } => verdict.summary(),
            CheckOutcome::Hypo { verdict } => verdict.order.summary(),
            CheckOutcome::Measure { measure, .. } if measure.truncated => {
                format!("truncated:{}", measure.atoms.len())
            }
            CheckOutcome::Measure { measure, .. } => format!("exact:{}", measure.atoms.len()),
            CheckOutcome::Error { error, .. } => error.clone(),
        }
    }

    pub fn property(&self) -> Option<&PropertyVerdict> {
        match self {
            CheckOutcome::Property { verdict } => Some(verdict),
            CheckOutcome::Measure { representation, .. } => Some(representation),
            _ => None,
        }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome>;
}

struct HypoOrderCheck;

impl Check for HypoOrderCheck {
    fn name(&self) -> &'static str {
        "hypo-order"
    }
    fn describe(&self) -> &'static str {
        "largest k with every Hankel window of size k+1 positive"
    }
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let verdict = hyponormality_order(&ctx.params, ctx.k_probe, ctx.j_probe)?;
        Ok(CheckOutcome::Hypo { verdict })
    }
}

/// A battery on a sequence derived from the point.
struct SequenceBattery {
    name: &'static str,
    describe: &'static str,
    flavor: Flavor,
    on_moments: bool,
}

impl Check for SequenceBattery {
    fn name(&self) -> &'static str {
        self.name
    }
    fn describe(&self) -> &'static str {
        self.describe
    }
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let verdict = if self.on_moments {
            let m = ctx.params.moments();
            if self.flavor.is_log() {
                let log = LogSequence::new(Arc::new(m));
                battery(BatteryTarget::Log(&log), self.flavor, ctx.n_max, ctx.k_max)?
            } else {
                battery(BatteryTarget::Plain(&m), self.flavor, ctx.n_max, ctx.k_max)?
            }
        } else {
            let w = ctx.params.weights();
            if self.flavor.is_log() {
                weight_log_battery(&w, self.flavor, ctx.n_max, ctx.k_max)?
            } else {
                battery(BatteryTarget::Plain(&w), self.flavor, ctx.n_max, ctx.k_max)?
            }
        };
        Ok(CheckOutcome::Property { verdict })
    }
}

struct InterpolationProbe {
    name: &'static str,
    describe: &'static str,
    flavor: ProbeFlavor,
}

impl Check for InterpolationProbe {
    fn name(&self) -> &'static str {
        self.name
    }
    fn describe(&self) -> &'static str {
        self.describe
    }
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let verdict = function_alternation_probe(
            &ctx.params,
            self.flavor,
            &ctx.spacings,
            ctx.n_max,
            ctx.k_max,
        )?;
        Ok(CheckOutcome::Property { verdict })
    }
}

struct BergerCheck;

impl Check for BergerCheck {
    fn name(&self) -> &'static str {
        "berger"
    }
    fn describe(&self) -> &'static str {
        "atomic Berger measure on 1/p^i and its moment check"
    }
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let measure = berger_measure(&ctx.params, ctx.berger_depth)?;
        let representation = verify_representation(&ctx.params, &measure, 2 * ctx.n_max);
        Ok(CheckOutcome::Measure {
            measure,
            representation,
        })
    }
}

pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(HypoOrderCheck);
        r.register(SequenceBattery {
            name: "mid",
            describe: "weights squared log completely alternating",
            flavor: Flavor::LogAlternating,
            on_moments: false,
        });
        r.register(SequenceBattery {
            name: "weights-alternating",
            describe: "weights squared completely alternating",
            flavor: Flavor::Alternating,
            on_moments: false,
        });
        r.register(SequenceBattery {
            name: "che",
            describe: "moments completely alternating (complete hyperexpansivity)",
            flavor: Flavor::Alternating,
            on_moments: true,
        });
        r.register(SequenceBattery {
            name: "contractive",
            describe: "moments completely monotone (n-contractive for every tested n)",
            flavor: Flavor::Monotone,
            on_moments: true,
        });
        r.register(SequenceBattery {
            name: "log-monotone-moments",
            describe: "moments log completely monotone",
            flavor: Flavor::LogMonotone,
            on_moments: true,
        });
        r.register(InterpolationProbe {
            name: "bernstein",
            describe: "alternation of (p^x+N)/(p^x+D) sampled at several spacings",
            flavor: ProbeFlavor::Plain,
        });
        r.register(InterpolationProbe {
            name: "log-bernstein",
            describe: "log alternation of (p^x+N)/(p^x+D) sampled at several spacings",
            flavor: ProbeFlavor::Log,
        });
        r.register(BergerCheck);
        r
    }
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self {
            checks: BTreeMap::new(),
        }
    }

    pub fn register<C: Check + 'static>(&mut self, check: C) {
        self.checks.insert(check.name(), Box::new(check));
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.get(name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn resolve(&self, names: &[String]) -> Result<Vec<&dyn Check>> {
        names
            .iter()
            .map(|n| {
                self.get(n).ok_or_else(|| {
                    GrwsError::InvalidArgument(format!(
                        "unknown check {n:?}; known: {}",
                        self.names().collect::<Vec<_>>().join(", ")
                    ))
                })
            })
            .collect()
    }

    /// Runs the named checks; failures become `Error` outcomes.
    pub fn run_all(
        &self,
        names: &[String],
        ctx: &CheckContext,
    ) -> Result<BTreeMap<String, CheckOutcome>> {
        let checks = self.resolve(names)?;
        Ok(checks
            .into_iter()
            .map(|c| {
                let outcome = c.run(ctx).unwrap_or_else(|e| CheckOutcome::from_error(&e));
                (c.name().to_string(), outcome)
            })
            .collect())
    }
}

/// What flows between pipeline steps.
#[derive(Clone, Debug)]
pub enum Stage {
    Params(ShiftParams),
    Weights(WeightSequence),
}

impl Stage {
    pub fn weights(&self) -> WeightSequence {
        match self {
            Stage::Params(p) => p.weights(),
            Stage::Weights(w) => w.clone(),
        }
    }
}

pub trait Transform: Send + Sync {
    fn name(&self) -> &'static str;
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage>;
}

fn no_arg(name: &str, arg: Option<&str>) -> Result<()> {
    match arg {
        None => Ok(()),
        Some(a) => Err(GrwsError::InvalidArgument(format!(
            "{name} takes no argument, got {a:?}"
        ))),
    }
}

struct Aluthge;

impl Transform for Aluthge {
    fn name(&self) -> &'static str {
        "aluthge"
    }
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage> {
        no_arg(self.name(), arg)?;
        Ok(Stage::Weights(aluthge(&stage.weights())))
    }
}

struct Subshift;

impl Transform for Subshift {
    fn name(&self) -> &'static str {
        "subshift"
    }
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage> {
        let bad = || {
            GrwsError::InvalidArgument("subshift needs \"stride,offset\", e.g. subshift:2,1".into())
        };
        let (l, r) = arg.and_then(|a| a.split_once(',')).ok_or_else(bad)?;
        let l: usize = l.trim().parse().map_err(|_| bad())?;
        let r: usize = r.trim().parse().map_err(|_| bad())?;
        let map = AffineMap::new(l, r)?;
        Ok(match stage {
            Stage::Params(p) => Stage::Params(affine_subshift_params(&p, map)),
            Stage::Weights(w) => Stage::Weights(affine_subshift(&w, map)),
        })
    }
}

struct Schur;

impl Transform for Schur {
    fn name(&self) -> &'static str {
        "schur"
    }
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage> {
        let s = arg.ok_or_else(|| {
            GrwsError::InvalidArgument("schur needs an exponent, e.g. schur:1/2".into())
        })?;
        let s = parse_rational(s)?;
        Ok(Stage::Weights(schur_power(&stage.weights(), &s)?))
    }
}

struct Quotient;

impl Transform for Quotient {
    fn name(&self) -> &'static str {
        "quotient"
    }
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage> {
        no_arg(self.name(), arg)?;
        Ok(Stage::Weights(quotient_shift(&stage.weights())))
    }
}

struct Reciprocal;

impl Transform for Reciprocal {
    fn name(&self) -> &'static str {
        "reciprocal"
    }
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage> {
        no_arg(self.name(), arg)?;
        Ok(match stage {
            Stage::Params(p) => Stage::Params(reciprocal(&p)),
            Stage::Weights(w) => Stage::Weights(reciprocal_weights(&w)),
        })
    }
}

struct DerivedViiia;

impl Transform for DerivedViiia {
    fn name(&self) -> &'static str {
        "viiia-derived"
    }
    fn apply(&self, stage: Stage, arg: Option<&str>) -> Result<Stage> {
        no_arg(self.name(), arg)?;
        match stage {
            Stage::Params(p) => Ok(Stage::Weights(viiia_derived_weights(&p)?.weights)),
            Stage::Weights(_) => Err(GrwsError::InvalidArgument(
                "viiia-derived needs GRWS parameters, not transformed weights".into(),
            )),
        }
    }
}

pub struct TransformRegistry {
    transforms: BTreeMap<&'static str, Box<dyn Transform>>,
}

impl Default for TransformRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Aluthge);
        r.register(Subshift);
        r.register(Schur);
        r.register(Quotient);
        r.register(Reciprocal);
        r.register(DerivedViiia);
        r
    }
}

impl TransformRegistry {
    pub fn empty() -> Self {
        Self {
            transforms: BTreeMap::new(),
        }
    }

    pub fn register<T: Transform + 'static>(&mut self, t: T) {
        self.transforms.insert(t.name(), Box::new(t));
    }

    pub fn get(&self, name: &str) -> Option<&dyn Transform> {
        self.transforms.get(name).map(|t| t.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.transforms.keys().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineStep {
    pub name: String,
    pub arg: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pipeline {
    pub steps: Vec<PipelineStep>,
    /// Trailing `battery:<flavor>` step, if any.
    pub battery: Option<Flavor>,
}

/// Parses `"aluthge|subshift:2,1|battery:log-alternating"`.
pub fn parse_pipeline(spec: &str) -> Result<Pipeline> {
    let mut steps = Vec::new();
    let mut battery = None;
    for raw in spec.split('|').map(str::trim).filter(|s| !s.is_empty()) {
        if battery.is_some() {
            return Err(GrwsError::InvalidArgument(
                "battery must be the last pipeline step".into(),
            ));
        }
        let (name, arg) = match raw.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim().to_string())),
            None => (raw, None),
        };
        if name == "battery" {
            let flavor = arg
                .as_deref()
                .ok_or_else(|| GrwsError::InvalidArgument("battery needs a flavor".into()))?;
            battery = Some(Flavor::parse(flavor)?);
        } else {
            steps.push(PipelineStep {
                name: name.to_string(),
                arg,
            });
        }
    }
    Ok(Pipeline { steps, battery })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum StageEcho {
    Params {
        #[serde(flatten)]
        params: ShiftParams,
    },
    Weights {
        #[serde(with = "serde_rational")]
        power: Rational,
        #[serde(with = "serde_rational_vec")]
        base_prefix: Vec<Rational>,
    },
}

const ECHO_TERMS: usize = 6;

impl StageEcho {
    fn of(stage: &Stage) -> Self {
        match stage {
            Stage::Params(p) => StageEcho::Params { params: p.clone() },
            Stage::Weights(w) => StageEcho::Weights {
                power: w.power().clone(),
                base_prefix: w.base().prefix(ECHO_TERMS),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: String,
    pub result: StageEcho,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineOutcome {
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<Flavor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<PropertyVerdict>,
}

impl TransformRegistry {
    pub fn run(
        &self,
        params: &ShiftParams,
        pipeline: &Pipeline,
        n_max: usize,
        k_max: usize,
    ) -> Result<PipelineOutcome> {
        let mut stage = Stage::Params(params.clone());
        let mut records = Vec::new();
        for step in &pipeline.steps {
            let t = self.get(&step.name).ok_or_else(|| {
                GrwsError::InvalidArgument(format!(
                    "unknown transform {:?}; known: {}",
                    step.name,
                    self.names().collect::<Vec<_>>().join(", ")
                ))
            })?;
            stage = t.apply(stage, step.arg.as_deref())?;
            let label = match &step.arg {
                Some(a) => format!("{}:{a}", step.name),
                None => step.name.clone(),
            };
            records.push(StepRecord {
                step: label,
                result: StageEcho::of(&stage),
            });
        }
        let verdict = match pipeline.battery {
            None => None,
            Some(flavor) => Some(stage_battery(&stage, flavor, n_max, k_max)?),
        };
        Ok(PipelineOutcome {
            steps: records,
            battery: pipeline.battery,
            verdict,
        })
    }
}

/// Battery on the squared weights of a stage.
pub fn stage_battery(
    stage: &Stage,
    flavor: Flavor,
    n_max: usize,
    k_max: usize,
) -> Result<PropertyVerdict> {
    let w = stage.weights();
    if flavor.is_log() {
        weight_log_battery(&w, flavor, n_max, k_max)
    } else {
        battery(BatteryTarget::Plain(&w), flavor, n_max, k_max)
    }
}
