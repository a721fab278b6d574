//! Report assembly for the command-line tool.
//!
//! Every report is plain data with a fixed field order; maps are
//! `BTreeMap`s and rows are emitted in grid order, so identical inputs
//! render to identical bytes.

use std::collections::BTreeMap;

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{PropertyVerdict, VerdictStatus};
use crate::berger::{atom_count_on_ray, berger_measure, verify_representation, AtomicMeasure};
use crate::completion::{
    family_completion, family_sector_ranges, same_p_completion, target_moments, CompletionSolution,
    SectorRange, TwoAtomSpec,
};
use crate::error::{GrwsError, Result};
use crate::hankel::{
    det_closed_form, det_exact, hankel, sector_iv_predicted_order, HypoOrder, PredictedOrder,
};
use crate::model::{Sector, SectorLabel, ShiftParams};
use crate::rational::{format_rational, serde_rational, serde_rational_vec, sign, Rational};
use crate::registry::{
    CheckContext, CheckOutcome, CheckRegistry, PipelineOutcome, TransformRegistry,
};

pub const TOOL: &str = concat!("grws ", env!("CARGO_PKG_VERSION"));

/// Ray search depth used for labels in reports.
pub const RAY_DEPTH: u32 = 32;

/// Checks run by `classify` on top of those its predictions need.
pub const CLASSIFY_CHECKS: [&str; 5] = ["berger", "che", "contractive", "hypo-order", "mid"];

/// Checks run by `sweep` when none are named.
pub const SWEEP_CHECKS: [&str; 4] = ["berger", "che", "hypo-order", "mid"];

const ECHO_TERMS: usize = 8;

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "expect", content = "value", rename_all = "kebab-case")]
pub enum Expectation {
    Holds,
    Fails,
    Order(PredictedOrder),
    Atoms(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub claim: String,
    pub check: &'static str,
    #[serde(flatten)]
    pub expectation: Expectation,
}

fn predict(claim: &str, check: &'static str, expectation: Expectation) -> Prediction {
    Prediction {
        claim: claim.to_string(),
        check,
        expectation,
    }
}

/// What the sector predicts about the point, one entry per checkable claim.
pub fn predictions(params: &ShiftParams, label: &SectorLabel) -> Vec<Prediction> {
    use Expectation::*;
    let mut out = Vec::new();
    if label.on_diagonal {
        out.push(predict("unweighted shift: MID", "mid", Holds));
        out.push(predict(
            "unweighted shift: completely hyperexpansive",
            "che",
            Holds,
        ));
        out.push(predict(
            "unweighted shift: Berger measure is the point mass at 1",
            "berger",
            Atoms(1),
        ));
        return out;
    }
    let has = |s| label.contains(s);
    if has(Sector::I) {
        out.push(predict("MID", "mid", Holds));
        out.push(predict(
            "weights squared interpolated by a Bernstein function",
            "bernstein",
            Holds,
        ));
    }
    if has(Sector::II) {
        out.push(predict("MID", "mid", Holds));
        out.push(predict(
            "weights squared interpolated by a log Bernstein function",
            "log-bernstein",
            Holds,
        ));
        if !has(Sector::I) {
            out.push(predict(
                "off the Sector I boundary: no Bernstein interpolation",
                "bernstein",
                Fails,
            ));
        }
    }
    if has(Sector::III) {
        out.push(predict("subnormal", "berger", Holds));
        if !has(Sector::II) {
            out.push(predict("off the Sector II boundary: not MID", "mid", Fails));
        }
    }
    if has(Sector::IV) {
        match label.special_ray_k {
            Some(k) => out.push(predict(
                &format!(
                    "on the ray D = p^{k} N: subnormal with a {}-atomic Berger measure",
                    k + 1
                ),
                "berger",
                Atoms(k + 1),
            )),
            None => {
                if let Ok(order) = sector_iv_predicted_order(params) {
                    let claim = match order {
                        PredictedOrder::Finite(k) => {
                            format!("{k}-hyponormal but not {}-hyponormal", k + 1)
                        }
                        PredictedOrder::Infinite => "subnormal".to_string(),
                    };
                    out.push(predict(&claim, "hypo-order", Order(order)));
                }
            }
        }
        out.push(predict("not MID", "mid", Fails));
    }
    if label.viiia {
        out.push(predict("completely hyperexpansive", "che", Holds));
    }
    let named = [Sector::I, Sector::II, Sector::III, Sector::IV];
    if !label.viiia && !named.iter().any(|s| has(*s)) {
        out.push(predict("not MID", "mid", Fails));
        out.push(predict("not completely hyperexpansive", "che", Fails));
    }
    dedup(out)
}

fn dedup(v: Vec<Prediction>) -> Vec<Prediction> {
    let mut out: Vec<Prediction> = Vec::new();
    for p in v {
        if !out
            .iter()
            .any(|q| q.check == p.check && q.expectation == p.expectation)
        {
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    /// The check confirms the claim to its depth.
    Agrees,
    /// The check neither confirms nor refutes at its depth.
    Consistent,
    Contradicts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcordanceRow {
    pub check: &'static str,
    pub claim: String,
    pub observed: String,
    pub agreement: Agreement,
}

fn judge(expectation: &Expectation, outcome: &CheckOutcome, k_probe: usize) -> Agreement {
    use Agreement::*;
    match (expectation, outcome) {
        (Expectation::Holds, CheckOutcome::Error { .. }) => Contradicts,
        (Expectation::Fails, CheckOutcome::Error { .. }) => Agrees,
        (Expectation::Holds, o) => match o.property().map(|v| v.status) {
            Some(VerdictStatus::HoldsToDepth) => Agrees,
            Some(VerdictStatus::Violated) => Contradicts,
            _ => Consistent,
        },
        (Expectation::Fails, o) => match o.property().map(|v| v.status) {
            Some(VerdictStatus::Violated) => Agrees,
            _ => Consistent,
        },
        (Expectation::Order(order), CheckOutcome::Hypo { verdict }) => match (order, verdict.order)
        {
            (PredictedOrder::Finite(k), HypoOrder::Exact(m)) if *k as usize == m => Agrees,
            (PredictedOrder::Finite(k), HypoOrder::AtLeast(m))
                if *k as usize > m && m == k_probe =>
            {
                Consistent
            }
            (PredictedOrder::Infinite, HypoOrder::AtLeast(_)) => Agrees,
            _ => Contradicts,
        },
        (
            Expectation::Atoms(n),
            CheckOutcome::Measure {
                measure,
                representation,
            },
        ) if !measure.truncated
            && measure.atoms.len() == *n as usize
            && representation.is_holds() =>
        {
            Agrees
        }
        _ => Contradicts,
    }
}

pub fn concordance(
    predictions: &[Prediction],
    checks: &BTreeMap<String, CheckOutcome>,
    k_probe: usize,
) -> Vec<ConcordanceRow> {
    predictions
        .iter()
        .filter_map(|p| {
            let outcome = checks.get(p.check)?;
            Some(ConcordanceRow {
                check: p.check,
                claim: p.claim.clone(),
                observed: outcome.summary(),
                agreement: judge(&p.expectation, outcome, k_probe),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyReport {
    pub tool: &'static str,
    pub params: ShiftParams,
    pub sector: SectorLabel,
    pub predictions: Vec<Prediction>,
    pub checks: BTreeMap<String, CheckOutcome>,
    pub concordance: Vec<ConcordanceRow>,
    #[serde(with = "serde_rational_vec")]
    pub weights_sq: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub moments: Vec<Rational>,
    pub notes: Vec<String>,
}

impl ClassifyReport {
    pub fn contradictions(&self) -> usize {
        self.concordance
            .iter()
            .filter(|r| r.agreement == Agreement::Contradicts)
            .count()
    }
}

fn notes_for(
    params: &ShiftParams,
    label: &SectorLabel,
    checks: &BTreeMap<String, CheckOutcome>,
) -> Vec<String> {
    let mut notes = Vec::new();
    if let (Some(k), false) = (label.special_ray_k, label.on_diagonal) {
        notes.push(format!(
            "on the ray D = p^{k} N the Berger measure has exactly {} atoms, at 1/p^i for i = 0..{k}; \
             m_{} = 0 ends the support, so a count of {} atoms for this shift is an off-by-one",
            k + 1,
            k + 1,
            k + 2
        ));
    }
    let n = params.N();
    if n.is_negative() && params.D() == &-n.clone() {
        notes.push(
            "point lies on the Sector II/III boundary D = -N; the Berger construction is applied there by continuity"
                .to_string(),
        );
    }
    if let Some(CheckOutcome::Measure { measure, .. }) = checks.get("berger") {
        if let Some(t) = &measure.tail_bound {
            notes.push(format!(
                "Berger measure truncated after {} atoms; each moment is within {} of the listed atoms",
                measure.atoms.len(),
                format_rational(t)
            ));
        }
    }
    notes.push("holds-to-depth verdicts cover only the listed depths".to_string());
    notes
}

pub fn classify_report(
    ctx: &CheckContext,
    registry: &CheckRegistry,
    extra: &[String],
) -> Result<ClassifyReport> {
    let params = &ctx.params;
    let sector = params.classify(RAY_DEPTH);
    let preds = predictions(params, &sector);
    let mut names: Vec<String> = CLASSIFY_CHECKS.iter().map(|s| s.to_string()).collect();
    names.extend(preds.iter().map(|p| p.check.to_string()));
    names.extend(extra.iter().cloned());
    names.sort();
    names.dedup();
    let checks = registry.run_all(&names, ctx)?;
    let concordance = concordance(&preds, &checks, ctx.k_probe);
    let notes = notes_for(params, &sector, &checks);
    Ok(ClassifyReport {
        tool: TOOL,
        params: params.clone(),
        sector,
        predictions: preds,
        checks,
        concordance,
        weights_sq: (0..ECHO_TERMS).map(|n| params.weight_sq(n)).collect(),
        moments: (0..ECHO_TERMS).map(|n| params.moment(n)).collect(),
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetCell {
    pub k: usize,
    pub j: usize,
    #[serde(with = "serde_rational")]
    pub det: Rational,
    pub sign: i8,
    pub closed_form_equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetReport {
    pub tool: &'static str,
    pub params: ShiftParams,
    pub k_max: usize,
    pub j_max: usize,
    pub mismatches: usize,
    pub cells: Vec<DetCell>,
}

/// `det_exact` against `det_closed_form` for `2 <= k <= k_max`, `j <= j_max`.
pub fn det_report(params: &ShiftParams, k_max: usize, j_max: usize) -> Result<DetReport> {
    if k_max < 2 {
        return Err(GrwsError::InvalidArgument(
            "k-max must be at least 2".into(),
        ));
    }
    let moments = params.moments();
    let grid: Vec<(usize, usize)> = (2..=k_max)
        .flat_map(|k| (0..=j_max).map(move |j| (k, j)))
        .collect();
    let cells: Vec<DetCell> = grid
        .par_iter()
        .map(|&(k, j)| {
            let det = det_exact(&hankel(&moments, k, j)?);
            let closed_form_equal = det_closed_form(params, k, j) == det;
            Ok(DetCell {
                k,
                j,
                sign: sign(&det),
                det,
                closed_form_equal,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DetReport {
        tool: TOOL,
        params: params.clone(),
        k_max,
        j_max,
        mismatches: cells.iter().filter(|c| !c.closed_form_equal).count(),
        cells,
    })
}

pub fn det_csv(report: &DetReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "j", "det", "sign"])
        .expect("in-memory write");
    for c in &report.cells {
        w.write_record([
            c.k.to_string(),
            c.j.to_string(),
            format_rational(&c.det),
            c.sign.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum MeasureOrError {
    Measure(AtomicMeasure),
    Error { error: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BergerReport {
    pub tool: &'static str,
    pub params: ShiftParams,
    pub depth: usize,
    pub measure: MeasureOrError,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representation: Option<PropertyVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms_on_ray: Option<u32>,
}

pub fn berger_report(params: &ShiftParams, depth: usize, n_max: usize) -> BergerReport {
    let (measure, representation) = match berger_measure(params, depth) {
        Ok(m) => {
            let v = verify_representation(params, &m, n_max);
            (MeasureOrError::Measure(m), Some(v))
        }
        Err(e) => (
            MeasureOrError::Error {
                error: e.kind().to_string(),
                message: e.to_string(),
            },
            None,
        ),
    };
    BergerReport {
        tool: TOOL,
        params: params.clone(),
        depth,
        measure,
        representation,
        atoms_on_ray: atom_count_on_ray(params).ok(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub tool: &'static str,
    pub params: ShiftParams,
    pub sector: SectorLabel,
    pub checks: BTreeMap<String, CheckOutcome>,
}

pub fn battery_report(
    ctx: &CheckContext,
    registry: &CheckRegistry,
    names: &[String],
) -> Result<BatteryReport> {
    Ok(BatteryReport {
        tool: TOOL,
        params: ctx.params.clone(),
        sector: ctx.params.classify(RAY_DEPTH),
        checks: registry.run_all(names, ctx)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformReport {
    pub tool: &'static str,
    pub params: ShiftParams,
    pub pipeline: String,
    #[serde(flatten)]
    pub outcome: PipelineOutcome,
}

pub fn transform_report(
    params: &ShiftParams,
    pipeline: &str,
    registry: &TransformRegistry,
    n_max: usize,
    k_max: usize,
) -> Result<TransformReport> {
    let parsed = crate::registry::parse_pipeline(pipeline)?;
    Ok(TransformReport {
        tool: TOOL,
        params: params.clone(),
        pipeline: pipeline.to_string(),
        outcome: registry.run(params, &parsed, n_max, k_max)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum SolutionOrError {
    Solution(CompletionSolution),
    Error { error: String, message: String },
}

impl From<Result<CompletionSolution>> for SolutionOrError {
    fn from(r: Result<CompletionSolution>) -> Self {
        match r {
            Ok(s) => SolutionOrError::Solution(s),
            Err(e) => SolutionOrError::Error {
                error: e.kind().to_string(),
                message: e.to_string(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompleteReport {
    pub tool: &'static str,
    pub spec: TwoAtomSpec,
    #[serde(with = "serde_rational_vec")]
    pub target: Vec<Rational>,
    pub same_p: SolutionOrError,
    pub family_ranges: [SectorRange; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<SolutionOrError>,
}

/// Same-`p` completion and family ranges; the family member when `n` is given.
pub fn complete_report(spec: &TwoAtomSpec, n: Option<&Rational>) -> Result<CompleteReport> {
    let family = match n {
        Some(n) => Some(SolutionOrError::Solution(family_completion(spec, n)?)),
        None => None,
    };
    Ok(CompleteReport {
        tool: TOOL,
        spec: spec.clone(),
        target: target_moments(spec).to_vec(),
        same_p: same_p_completion(spec).into(),
        family_ranges: family_sector_ranges(spec),
        family,
    })
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub p: Rational,
    pub step: Rational,
    pub checks: Vec<String>,
    /// Template for per-point depths; its parameters are replaced.
    pub template: CheckContext,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N", with = "serde_rational")]
    pub n: Rational,
    #[serde(rename = "D", with = "serde_rational")]
    pub d: Rational,
    pub sector: SectorLabel,
    pub checks: BTreeMap<String, CheckOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub tool: &'static str,
    #[serde(with = "serde_rational")]
    pub p: Rational,
    #[serde(with = "serde_rational")]
    pub step: Rational,
    pub checks: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// `-1 + i·step` for `i >= 1`, strictly below 1.
pub fn grid_axis(step: &Rational) -> Vec<Rational> {
    let one = Rational::from_integer(1.into());
    let mut out = Vec::new();
    let mut v = -one.clone() + step;
    while v < one {
        out.push(v.clone());
        v += step;
    }
    out
}

/// One row per grid point in `(N, D)` order; points run in parallel.
pub fn sweep(spec: &SweepSpec, registry: &CheckRegistry) -> Result<SweepReport> {
    if !spec.step.is_positive() {
        return Err(GrwsError::InvalidArgument("step must be positive".into()));
    }
    registry.resolve(&spec.checks)?;
    let axis = grid_axis(&spec.step);
    let points: Vec<(Rational, Rational)> = axis
        .iter()
        .flat_map(|n| axis.iter().map(move |d| (n.clone(), d.clone())))
        .collect();
    let rows = points
        .par_iter()
        .map(|(n, d)| {
            let params = ShiftParams::new(spec.p.clone(), n.clone(), d.clone())?;
            let ctx = CheckContext {
                params: params.clone(),
                ..spec.template.clone()
            };
            Ok(SweepRow {
                n: n.clone(),
                d: d.clone(),
                sector: params.classify(RAY_DEPTH),
                checks: registry.run_all(&spec.checks, &ctx)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        tool: TOOL,
        p: spec.p.clone(),
        step: spec.step.clone(),
        checks: spec.checks.clone(),
        rows,
    })
}

pub const SWEEP_CSV_COLUMNS: [&str; 8] = [
    "N",
    "D",
    "sectors",
    "special_ray_k",
    "hypo_order",
    "mid_verdict",
    "che_verdict",
    "berger_status",
];

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_CSV_COLUMNS).expect("in-memory write");
    for row in &report.rows {
        let cell = |name: &str| {
            row.checks
                .get(name)
                .map(|o| o.summary())
                .unwrap_or_default()
        };
        w.write_record([
            format_rational(&row.n),
            format_rational(&row.d),
            row.sector.joined(),
            row.sector
                .special_ray_k
                .map(|k| k.to_string())
                .unwrap_or_default(),
            cell("hypo-order"),
            cell("mid"),
            cell("che"),
            cell("berger"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
