mod common;

use common::{grws, q};
use grws_core::analysis::{is_n_monotone, Flavor};
use grws_core::registry::{
    parse_pipeline, Check, CheckContext, CheckOutcome, CheckRegistry, Stage, Transform,
    TransformRegistry,
};
use grws_core::transforms::{affine_subshift_params, AffineMap};
use grws_core::Result;

/// Moments decreasing to first order, registered from outside the crate.
struct Contraction;

impl Check for Contraction {
    fn name(&self) -> &'static str {
        "contraction"
    }
    fn describe(&self) -> &'static str {
        "moments do not increase"
    }
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        Ok(CheckOutcome::Property {
            verdict: is_n_monotone(&ctx.params.moments(), 1, ctx.k_max),
        })
    }
}

struct Double;

impl Transform for Double {
    fn name(&self) -> &'static str {
        "double"
    }
    fn apply(&self, stage: Stage, _arg: Option<&str>) -> Result<Stage> {
        match stage {
            Stage::Params(p) => Ok(Stage::Params(affine_subshift_params(
                &p,
                AffineMap::new(2, 0)?,
            ))),
            other => Ok(other),
        }
    }
}

#[test]
fn custom_check_runs_beside_builtins() {
    let mut r = CheckRegistry::default();
    r.register(Contraction);
    let ctx = CheckContext::new(grws(q(2, 1), q(-1, 2), q(-1, 4)));
    let out = r
        .run_all(&["contraction".into(), "che".into()], &ctx)
        .unwrap();
    assert!(out["contraction"].property().unwrap().is_holds());
    assert!(out["che"].property().unwrap().is_violated());

    let expansive = CheckContext::new(grws(q(2, 1), q(1, 2), q(1, 4)));
    let out = r.run_all(&["contraction".into()], &expansive).unwrap();
    assert!(out["contraction"].property().unwrap().is_violated());
    assert!(r.resolve(&["no-such-check".into()]).is_err());
}

#[test]
fn custom_transform_composes() {
    let mut r = TransformRegistry::default();
    r.register(Double);
    let params = grws(q(2, 1), q(-1, 2), q(-1, 4));
    let mine = r
        .run(
            &params,
            &parse_pipeline("double|battery:log-alternating").unwrap(),
            6,
            12,
        )
        .unwrap();
    let builtin = r
        .run(
            &params,
            &parse_pipeline("subshift:2,0|battery:log-alternating").unwrap(),
            6,
            12,
        )
        .unwrap();
    assert_eq!(mine.steps[0].result, builtin.steps[0].result);
    assert_eq!(mine.battery, Some(Flavor::LogAlternating));
    assert!(mine.verdict.unwrap().is_holds());
}

#[test]
fn battery_must_end_the_pipeline() {
    assert!(parse_pipeline("battery:mid|aluthge").is_err());
    assert!(parse_pipeline("aluthge|reciprocal")
        .unwrap()
        .battery
        .is_none());
}
