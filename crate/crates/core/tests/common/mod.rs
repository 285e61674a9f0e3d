#![allow(dead_code)]

pub mod characterization;
pub mod lemmas;
pub mod oracle;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use std::cell::Cell;

/// Result of running one property over many seeds.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub cases: u32,
    /// Cases whose premise held.
    pub applicable: u32,
    pub failure: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} cases, {} applicable", self.name, self.cases, self.applicable)?;
        if let Some(e) = &self.failure {
            write!(f, ", FAILED: {}", e)?;
        }
        Ok(())
    }
}

/// Runs `check` on `cases` seeds from a fixed generator. `check` returns
/// whether its premise held.
pub fn run_seeded(
    name: &'static str,
    cases: u32,
    check: impl Fn(u64) -> Result<bool, TestCaseError>,
) -> Outcome {
    let config = Config {
        cases,
        failure_persistence: None,
        max_shrink_iters: 64,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let applicable = Cell::new(0u32);
    let result = runner.run(&any::<u64>(), |seed| {
        if check(seed)? {
            applicable.set(applicable.get() + 1);
        }
        Ok(())
    });
    Outcome {
        name,
        cases,
        applicable: applicable.get(),
        failure: result.err().map(|e| e.to_string()),
    }
}
