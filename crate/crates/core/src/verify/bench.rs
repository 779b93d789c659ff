//! Size comparison between token extraction and the dense matrix.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::angle::Angle;
use crate::diagram::{Diagram, EdgeId};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::machine::{normalize, RunConfig, Scheduler, SchedulerKind, State, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `Z(n, n, 0)`.
    Spider,
    /// `n` CNOTs in a row.
    CnotChain,
}

impl Family {
    pub fn build(self, n: usize) -> Diagram {
        match self {
            Family::Spider => fixtures::spider(n, Angle::ZERO),
            Family::CnotChain => fixtures::cnot_chain(n),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spider" => Ok(Family::Spider),
            "cnot-chain" => Ok(Family::CnotChain),
            other => Err(Error::Parse {
                offset: 0,
                message: format!("unknown family {other:?}"),
            }),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Spider => "spider",
            Family::CnotChain => "cnot-chain",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub family: Family,
    pub size: usize,
    pub strategy: String,
    /// Terms in the extracted state.
    pub terms: usize,
    /// Token count of each term, in canonical order.
    pub tokens_per_term: Vec<usize>,
    pub dense_rows: u128,
    pub dense_cols: u128,
    pub dense_entries: u128,
    pub steps: usize,
    pub elapsed_ms: f64,
}

/// Extracts the family member of size `n` from edge 0 (the runs from
/// `(e↓x)(e↑x)` summed, as in extraction) and reports the size of the token
/// state next to the shape of the dense matrix, which is never built.
pub fn sparse_report(family: Family, n: usize, strategy: SchedulerKind) -> Result<BenchReport> {
    let d = family.build(n);
    let mut sched = Scheduler::build(strategy, &d, 0);
    let cfg = RunConfig::default();
    let start = Instant::now();
    let mut state = State::zero();
    let mut steps = 0;
    for x in 0..2 {
        let seed = State::term(
            vec![Token::down(EdgeId(0), x), Token::up(EdgeId(0), x)],
            Complex64::new(1.0, 0.0),
        );
        let run = normalize(&d, &seed, &mut sched, &cfg)?;
        steps += run.steps;
        state = &state + &run.state;
    }
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let rows = 1u128 << d.num_outputs().min(127);
    let cols = 1u128 << d.num_inputs().min(127);
    Ok(BenchReport {
        family,
        size: n,
        strategy: strategy.to_string(),
        terms: state.len(),
        tokens_per_term: state.keys().map(Vec::len).collect(),
        dense_rows: rows,
        dense_cols: cols,
        dense_entries: rows * cols,
        steps,
        elapsed_ms,
    })
}
