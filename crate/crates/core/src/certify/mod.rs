//! Randomized refutation suites for the entropy conditions.
//!
//! Every suite samples instances, evaluates a signed margin on each and
//! reports the smallest. PASS means no violation was found at the configured
//! budget; FAIL always carries a counterexample that re-evaluates standalone
//! through [`Counterexample::reverify`]. INCONCLUSIVE is reserved for searches
//! where a scalar necessary condition already rules the property out but the
//! sampler found no matrix witness.

mod pipeline;
mod suites;
mod witness;

pub use pipeline::{fit_gap_function, uniqueness_pipeline, uniqueness_pipeline_cached, GapFit, PipelineReport};
pub use suites::*;
pub use witness::{evaluate, Evaluation, Witness};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ScalarFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub dims: Vec<usize>,
    pub bipartite: Vec<(usize, usize)>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub eig_range: (f64, f64),
    /// Worker cap: `None` uses the global pool, `Some(0)` runs serially.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3],
            bipartite: vec![(2, 2), (2, 3), (3, 2)],
            samples: 200,
            seed: 0,
            tol: 1e-8,
            eig_range: (0.1, 10.0),
            threads: None,
        }
    }
}

/// Largest factor dimension accepted by the suites.
pub const MAX_DIM: usize = 8;

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        let (lo, hi) = self.eig_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!("invalid eigenvalue range [{lo}, {hi}]")));
        }
        if self.dims.is_empty() || self.bipartite.is_empty() {
            return Err(Error::Config("need at least one dimension and one bipartite shape".into()));
        }
        let bad = |d: usize| d == 0 || d > MAX_DIM;
        if let Some(d) = self.dims.iter().copied().find(|&d| bad(d)) {
            return Err(Error::Config(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if let Some(&(a, b)) = self.bipartite.iter().find(|(a, b)| bad(*a) || bad(*b)) {
            return Err(Error::Config(format!("bipartite shape {a}x{b} outside 1..={MAX_DIM}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub witness: Witness,
    pub margin: f64,
}

impl Counterexample {
    /// Recomputes the margin from the stored witness alone.
    pub fn reverify(&self, f: &ScalarFunction) -> Result<f64> {
        Ok(evaluate(f, &self.witness)?.margin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub name: String,
    pub verdict: Verdict,
    /// Smallest signed margin over evaluated trials; `None` if nothing ran.
    pub min_margin: Option<f64>,
    pub trials_run: usize,
    pub trials_skipped: usize,
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// One evaluated trial, for margin sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub test: String,
    pub dim: usize,
    pub trial: usize,
    pub margin: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRun {
    pub outcome: TestOutcome,
    pub records: Vec<TrialRecord>,
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Generator for one trial, keyed by test name, dimension slot and index so
/// that trials are independent of scheduling and of the total budget.
pub fn trial_rng(seed: u64, test: &str, slot: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(test));
    rng.set_stream(((slot as u64) << 40) | index as u64);
    rng
}

/// Maps `work` over `0..n` honoring the worker cap; results stay in index order.
pub(crate) fn run_indexed<T, F>(n: usize, threads: Option<usize>, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match threads {
        Some(0) | Some(1) => (0..n).map(work).collect(),
        None => (0..n).into_par_iter().map(work).collect(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&work).collect()),
            Err(_) => (0..n).map(work).collect(),
        },
    }
}

#[cfg(test)]
mod tests;
