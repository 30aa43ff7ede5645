//! Named verification suites over one tower, with a work estimate per suite
//! so oversized runs are skipped instead of started.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{verify_bent, verify_distribution_ii, verify_lemma_a, verify_lemma_b, verify_p_q};
use crate::characters::{verify_fourier_all, verify_gauss_properties, verify_restriction};
use crate::constructions::Construction;
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::tower::{verify_trace_transitivity, Level, TowerCtx, TowerParams};

/// A suite may use at most this many times the enumeration budget in
/// elementary steps.
pub const WORK_FACTOR: u128 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    #[serde(rename = "gauss")]
    Gauss,
    #[serde(rename = "fourier")]
    Fourier,
    #[serde(rename = "trace")]
    Trace,
    #[serde(rename = "restriction")]
    Restriction,
    #[serde(rename = "lemmaA")]
    LemmaA,
    #[serde(rename = "lemmaB")]
    LemmaB,
    #[serde(rename = "bent")]
    Bent,
    #[serde(rename = "PQ")]
    PQ,
    #[serde(rename = "distribution")]
    Distribution,
}

pub const ALL_SUITES: [Suite; 9] = [
    Suite::Gauss,
    Suite::Fourier,
    Suite::Trace,
    Suite::Restriction,
    Suite::LemmaA,
    Suite::LemmaB,
    Suite::Bent,
    Suite::PQ,
    Suite::Distribution,
];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Gauss => "gauss",
            Suite::Fourier => "fourier",
            Suite::Trace => "trace",
            Suite::Restriction => "restriction",
            Suite::LemmaA => "lemmaA",
            Suite::LemmaB => "lemmaB",
            Suite::Bent => "bent",
            Suite::PQ => "PQ",
            Suite::Distribution => "distribution",
        }
    }

    /// Rough count of elementary steps.
    pub fn work(self, params: &TowerParams) -> u128 {
        let (p, q, r, q2) = (params.p as u128, params.q, params.r, params.q2);
        let n2 = 2 * params.degree_q() as u128;
        let transform = q2.saturating_mul(p * p * n2);
        match self {
            Suite::Gauss => q.saturating_mul(q).saturating_mul(n2 * 16),
            Suite::Fourier => q.saturating_pow(3).saturating_mul(3),
            Suite::Trace => q * n2 * 64,
            Suite::Restriction => r * n2,
            Suite::LemmaA | Suite::LemmaB => q.saturating_mul(q).saturating_mul(2),
            Suite::Bent => transform.saturating_mul(r),
            Suite::PQ => transform.saturating_mul(3),
            Suite::Distribution => transform,
        }
    }

    /// Whether the suite's statement applies to the tower at all.
    pub fn applies(self, params: &TowerParams) -> bool {
        match self {
            Suite::LemmaA | Suite::LemmaB => Construction::I.check_params(params).is_ok(),
            _ => true,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a suite name; `all` expands to every suite.
pub fn parse_suites(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        return Ok(ALL_SUITES.to_vec());
    }
    Ok(vec![Suite::from_str(name)?])
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_SUITES
            .into_iter()
            .find(|suite| suite.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub suite: Suite,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub reports: Vec<CheckReport>,
    pub skipped: Vec<Skipped>,
    pub not_applicable: Vec<Suite>,
}

impl VerifyOutcome {
    /// Every requested suite ran and passed.
    pub fn passed(&self) -> bool {
        self.skipped.is_empty() && self.reports.iter().all(CheckReport::passed)
    }
}

/// Runs the suites on tower (p, t, s). Suites whose statement needs p ∤ s
/// are listed as not applicable when `lenient`, and rejected otherwise.
pub fn run_suites(params: &TowerParams, suites: &[Suite], budget: u64, lenient: bool) -> Result<VerifyOutcome> {
    let mut outcome = VerifyOutcome::default();
    let cap = budget as u128 * WORK_FACTOR;
    let mut runnable = Vec::new();
    for &suite in suites {
        if !suite.applies(params) {
            if lenient {
                outcome.not_applicable.push(suite);
                continue;
            }
            Construction::I.check_params(params)?;
        }
        let work = suite.work(params);
        if work > cap || !params.within_budget(budget) {
            outcome.skipped.push(Skipped {
                suite,
                reason: format!("needs about {work} steps for {params}, cap is {cap} (budget {budget})"),
            });
        } else {
            runnable.push(suite);
        }
    }
    if runnable.is_empty() {
        return Ok(outcome);
    }
    let tower = TowerCtx::build(*params, budget)?;
    for suite in runnable {
        outcome.reports.push(run_one(&tower, suite)?);
    }
    Ok(outcome)
}

fn run_one(tower: &TowerCtx, suite: Suite) -> Result<CheckReport> {
    let fields = [tower.field(Level::R), tower.field(Level::Q)];
    let mut report = CheckReport::new(suite.name());
    match suite {
        Suite::Gauss => {
            for f in fields {
                report.absorb(verify_gauss_properties(f));
            }
        }
        Suite::Fourier => {
            for f in fields {
                report.absorb(verify_fourier_all(f)?);
            }
        }
        Suite::Trace => report.absorb(verify_trace_transitivity(tower)?),
        Suite::Restriction => report.absorb(verify_restriction(
            tower.field(Level::R),
            tower.field(Level::Q),
            tower.r_in_q(),
            tower.params().s,
        )),
        Suite::LemmaA => report.absorb(verify_lemma_a(tower)?),
        Suite::LemmaB => report.absorb(verify_lemma_b(tower)?),
        Suite::Bent => report.absorb(verify_bent(tower)?),
        Suite::PQ => report.absorb(verify_p_q(tower)?),
        Suite::Distribution => report.absorb(verify_distribution_ii(tower)?),
    }
    Ok(report)
}
