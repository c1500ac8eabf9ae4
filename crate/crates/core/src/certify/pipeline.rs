use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::witness::Witness;
use super::{
    test_condition13, test_entropic, test_gap_concavity, test_gap_superadditive,
    test_matrix_entropy, test_principle1_concavity, Counterexample, TestConfig, TestOutcome,
    Verdict,
};
use crate::error::Result;
use crate::scalar::{gap_function, log_grid, ScalarFunction};

/// Bound on the fit residual and on `|b − 1/f''(1)|`.
pub const FIT_TOL: f64 = 1e-6;

/// Least-squares fit `g(t) ≈ b t` on a log grid over `[0.01, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapFit {
    pub b: f64,
    /// `‖g − b t‖ / ‖g‖` over the grid.
    pub residual: f64,
    /// `1 / f''(1)`.
    pub target: f64,
}

impl GapFit {
    /// Nonnegative iff both fit criteria hold.
    pub fn margin(&self) -> f64 {
        (FIT_TOL - self.residual).min(FIT_TOL - (self.b - self.target).abs())
    }

    pub fn passes(&self) -> bool {
        self.margin() >= 0.0
    }
}

pub fn fit_gap_function(f: &ScalarFunction) -> Result<GapFit> {
    let g = gap_function(f)?;
    let grid = log_grid(0.01, 100.0, 100);
    let values = grid.iter().map(|&t| g.value(t)).collect::<Result<Vec<_>>>()?;
    let (mut gt, mut tt) = (0.0, 0.0);
    for (t, v) in grid.iter().zip(&values) {
        gt += v * t;
        tt += t * t;
    }
    let b = gt / tt;
    let (mut res, mut norm) = (0.0, 0.0);
    for (t, v) in grid.iter().zip(&values) {
        res += (v - b * t).powi(2);
        norm += v * v;
    }
    Ok(GapFit {
        b,
        residual: (res / norm).sqrt(),
        target: 1.0 / f.derivative_value(1.0, 2)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub outcome: TestOutcome,
    pub stages: Vec<TestOutcome>,
    pub stopped_at: Option<String>,
    pub fit: Option<GapFit>,
    /// `(f(1), f'(1), f''(1))`.
    pub normalization: Option<[f64; 3]>,
}

type Stage = fn(&ScalarFunction, &TestConfig) -> Result<TestOutcome>;

/// Stage order: scalar checks run before the matrix searches they imply, so a
/// function stops at the cheapest certain failure.
pub const STAGES: [(&str, Stage); 6] = [
    ("principle1", test_principle1_concavity),
    ("gap_superadditive", test_gap_superadditive),
    ("entropic", test_entropic),
    ("condition13", test_condition13),
    ("matrix_entropy", test_matrix_entropy),
    ("gap_concavity", test_gap_concavity),
];

pub fn uniqueness_pipeline(f: &ScalarFunction, cfg: &TestConfig) -> Result<PipelineReport> {
    uniqueness_pipeline_cached(f, cfg, &mut BTreeMap::new())
}

/// As [`uniqueness_pipeline`], reusing outcomes already present in `cache`
/// (keyed by stage name) and storing the ones it computes.
pub fn uniqueness_pipeline_cached(
    f: &ScalarFunction,
    cfg: &TestConfig,
    cache: &mut BTreeMap<String, TestOutcome>,
) -> Result<PipelineReport> {
    cfg.validate()?;
    let normalization = f.jet(1.0).ok().map(|j| [j.value, j.d1, j.d2]);
    let mut stages = Vec::new();
    let mut stopped_at = None;
    for (name, run) in STAGES {
        let outcome = match cache.get(name) {
            Some(o) => o.clone(),
            None => {
                let o = run(f, cfg)?;
                cache.insert(name.to_string(), o.clone());
                o
            }
        };
        let passed = outcome.verdict == Verdict::Pass;
        stages.push(outcome);
        if !passed {
            stopped_at = Some(name.to_string());
            break;
        }
    }
    let trials_run = stages.iter().map(|s| s.trials_run).sum();
    let trials_skipped = stages.iter().map(|s| s.trials_skipped).sum();
    let mut notes = Vec::new();
    let mut fit = None;

    let (verdict, min_margin, counterexample) = if let Some(stage) = stages.last().filter(|_| stopped_at.is_some()) {
        notes.push(format!("stopped at {} ({})", stage.name, stage.verdict));
        let v = match stage.verdict {
            Verdict::Fail => Verdict::Fail,
            _ => Verdict::Inconclusive,
        };
        (v, stage.min_margin, stage.counterexample.clone())
    } else {
        let g = fit_gap_function(f)?;
        fit = Some(g);
        notes.push(format!("gap fit b = {:e}, relative residual = {:e}", g.b, g.residual));
        if g.passes() {
            (Verdict::Pass, Some(g.margin()), None)
        } else {
            let c = Counterexample {
                witness: Witness::GapFit {
                    b: g.b,
                    residual: g.residual,
                },
                margin: g.margin(),
            };
            (Verdict::Fail, Some(g.margin()), Some(c))
        }
    };
    Ok(PipelineReport {
        outcome: TestOutcome {
            name: "uniqueness".into(),
            verdict,
            min_margin,
            trials_run,
            trials_skipped,
            counterexample,
            notes,
        },
        stages,
        stopped_at,
        fit,
        normalization,
    })
}
