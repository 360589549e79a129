//! Seeded verification suites and the export pipeline.
//!
//! Each [`LemmaId`] names one suite. A suite runs `trials` independent
//! configurations, each drawn from its own `(seed, trial)` stream, so trials
//! may execute on any number of workers. The merge keeps a failure count and
//! the trial with the largest normalized value (`value / bound`; a trial fails
//! when this exceeds 1), ties going to the lowest trial index.

mod pipeline;
mod suites;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use pipeline::{
    quasi_invariance, run_pipeline, run_pipeline_for, PipelineSummary, QuasiInvarianceRecord, DENSITY_THRESHOLD,
    DIV_RADII, SHADOW_RADIUS, SINGLE_FACTOR_AGREEMENT,
};
pub use suites::APPENDIX_QUOTED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Thin,
    Contracting,
    ProjectionDefect,
    Squeeze,
    AlignDichotomy,
    ShadowAlignFwd,
    ShadowAlignBwd,
    AxisBounds,
    AppendixConst,
    Cocycle,
    ShadowBuse,
    SimultaneousShadow,
    DivFactors,
}

impl LemmaId {
    pub const ALL: [LemmaId; 13] = [
        LemmaId::Thin,
        LemmaId::Contracting,
        LemmaId::ProjectionDefect,
        LemmaId::Squeeze,
        LemmaId::AlignDichotomy,
        LemmaId::ShadowAlignFwd,
        LemmaId::ShadowAlignBwd,
        LemmaId::AxisBounds,
        LemmaId::AppendixConst,
        LemmaId::Cocycle,
        LemmaId::ShadowBuse,
        LemmaId::SimultaneousShadow,
        LemmaId::DivFactors,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::Thin => "thin",
            LemmaId::Contracting => "contracting",
            LemmaId::ProjectionDefect => "projection_defect",
            LemmaId::Squeeze => "squeeze",
            LemmaId::AlignDichotomy => "align_dichotomy",
            LemmaId::ShadowAlignFwd => "shadow_align_fwd",
            LemmaId::ShadowAlignBwd => "shadow_align_bwd",
            LemmaId::AxisBounds => "axis_bounds",
            LemmaId::AppendixConst => "appendix_const",
            LemmaId::Cocycle => "cocycle",
            LemmaId::ShadowBuse => "shadow_buse",
            LemmaId::SimultaneousShadow => "simultaneous_shadow",
            LemmaId::DivFactors => "div_factors",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyJob {
    pub lemma_id: LemmaId,
    pub trials: usize,
    pub seed: u64,
}

impl VerifyJob {
    pub fn new(lemma_id: LemmaId, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(Self { lemma_id, trials, seed })
    }

    pub fn parse(lemma: &str, trials: usize, seed: u64) -> Result<Self> {
        Self::new(lemma.parse()?, trials, seed)
    }
}

/// The trial with the largest normalized value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub trial: u64,
    pub value: f64,
    pub bound: f64,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub lemma_id: LemmaId,
    pub trials: usize,
    pub seed: u64,
    /// Named tolerances the suite checks against.
    pub tolerances: Value,
    pub failures: usize,
    /// Trials whose hypotheses held, for suites checking implications.
    pub non_vacuous: usize,
    pub worst_case: Option<WorstCase>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Result of one trial.
#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub value: f64,
    pub bound: f64,
    pub failed: bool,
    pub non_vacuous: bool,
    pub detail: Value,
}

impl Outcome {
    /// Fails when `value > bound`.
    pub fn bounded(value: f64, bound: f64, detail: Value) -> Self {
        Self {
            value,
            bound,
            failed: !(value <= bound),
            non_vacuous: true,
            detail,
        }
    }

    fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.value / self.bound
        } else {
            self.value
        }
    }
}

pub(crate) fn merge(job: &VerifyJob, tolerances: Value, outcomes: Vec<Outcome>) -> Report {
    let mut failures = 0;
    let mut non_vacuous = 0;
    let mut worst: Option<(u64, Outcome)> = None;
    for (trial, o) in outcomes.into_iter().enumerate() {
        failures += o.failed as usize;
        non_vacuous += o.non_vacuous as usize;
        let replace = match &worst {
            None => true,
            Some((_, w)) => o.ratio() > w.ratio() || (o.ratio().is_nan() && !w.ratio().is_nan()),
        };
        if replace {
            worst = Some((trial as u64, o));
        }
    }
    Report {
        lemma_id: job.lemma_id,
        trials: job.trials,
        seed: job.seed,
        tolerances,
        failures,
        non_vacuous,
        worst_case: worst.map(|(trial, o)| WorstCase {
            trial,
            value: o.value,
            bound: o.bound,
            detail: o.detail,
        }),
    }
}

/// Runs `f(seed, trial)` for every trial in parallel; the output order is the trial order.
pub(crate) fn run_trials<F>(job: &VerifyJob, f: F) -> Result<Vec<Outcome>>
where
    F: Fn(u64, u64) -> Result<Outcome> + Sync,
{
    (0..job.trials as u64)
        .into_par_iter()
        .map(|t| f(job.seed, t))
        .collect()
}

pub fn run_verify(job: &VerifyJob) -> Result<Report> {
    if job.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    suites::run(job)
}
