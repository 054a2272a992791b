//! Pairs each bound's measured left side with its right side and renders a
//! verdict.

mod ck;
mod params;
mod rhs;
mod run;

pub use ck::*;
pub use params::{GraphSpec, ModelParams, PointParams, WeightSpec};
pub use rhs::*;
pub use run::{diluted_tail, run_theorem, DilutedTail};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::models::Family;

/// Every bound the harness knows how to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "thm2_1")]
    Thm2_1,
    #[serde(rename = "thm2_1_twotemp")]
    Thm2_1TwoTemp,
    #[serde(rename = "main1")]
    Main1,
    #[serde(rename = "eqChatt1_ref")]
    EqChatt1Ref,
    #[serde(rename = "mixed_pspin")]
    MixedPspin,
    #[serde(rename = "vector_sk")]
    VectorSk,
    #[serde(rename = "diluted")]
    Diluted,
    #[serde(rename = "ea_bond")]
    EaBond,
    #[serde(rename = "ea_site")]
    EaSite,
    #[serde(rename = "thm3_1")]
    Thm3_1,
    #[serde(rename = "fkg_overlap")]
    FkgOverlap,
    #[serde(rename = "thm5_1")]
    Thm5_1,
    #[serde(rename = "thm5_2")]
    Thm5_2,
    #[serde(rename = "thm5_3_ineq1")]
    Thm5_3Ineq1,
    #[serde(rename = "thm5_3_ineq2")]
    Thm5_3Ineq2,
    #[serde(rename = "eqlast")]
    Eqlast,
    #[serde(rename = "eqlast2")]
    Eqlast2,
    #[serde(rename = "diluted_tail")]
    DilutedTail,
}

impl TheoremId {
    pub const ALL: [TheoremId; 18] = [
        TheoremId::Thm2_1,
        TheoremId::Thm2_1TwoTemp,
        TheoremId::Main1,
        TheoremId::EqChatt1Ref,
        TheoremId::MixedPspin,
        TheoremId::VectorSk,
        TheoremId::Diluted,
        TheoremId::EaBond,
        TheoremId::EaSite,
        TheoremId::Thm3_1,
        TheoremId::FkgOverlap,
        TheoremId::Thm5_1,
        TheoremId::Thm5_2,
        TheoremId::Thm5_3Ineq1,
        TheoremId::Thm5_3Ineq2,
        TheoremId::Eqlast,
        TheoremId::Eqlast2,
        TheoremId::DilutedTail,
    ];

    pub fn as_str(self) -> &'static str {
        use TheoremId::*;
        match self {
            Thm2_1 => "thm2_1",
            Thm2_1TwoTemp => "thm2_1_twotemp",
            Main1 => "main1",
            EqChatt1Ref => "eqChatt1_ref",
            MixedPspin => "mixed_pspin",
            VectorSk => "vector_sk",
            Diluted => "diluted",
            EaBond => "ea_bond",
            EaSite => "ea_site",
            Thm3_1 => "thm3_1",
            FkgOverlap => "fkg_overlap",
            Thm5_1 => "thm5_1",
            Thm5_2 => "thm5_2",
            Thm5_3Ineq1 => "thm5_3_ineq1",
            Thm5_3Ineq2 => "thm5_3_ineq2",
            Eqlast => "eqlast",
            Eqlast2 => "eqlast2",
            DilutedTail => "diluted_tail",
        }
    }

    /// Whether the left side is a two-system overlap variance needing `t`.
    pub fn is_two_system(self) -> bool {
        use TheoremId::*;
        matches!(self, Thm2_1 | Thm2_1TwoTemp | Main1 | EqChatt1Ref | MixedPspin | VectorSk | Diluted | EaBond | EaSite)
    }

    /// Whether the left side is a random-field variance with a Hermite degree.
    pub fn uses_field(self) -> bool {
        use TheoremId::*;
        matches!(self, Thm5_1 | Thm5_2 | Thm5_3Ineq1 | Thm5_3Ineq2 | Eqlast | Eqlast2)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown theorem id {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A theorem hypothesis (positive correlations) was not met.
    HypothesisFailed,
    /// Comparison row with no claim attached.
    Reference,
}

impl Verdict {
    /// Pass iff `lhs − 3·stderr ≤ rhs`.
    pub fn judge(lhs: f64, stderr: f64, rhs: f64) -> Verdict {
        if lhs - 3.0 * stderr <= rhs {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypothesisFailed => "hypothesis_failed",
            Verdict::Reference => "reference",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        [Verdict::Pass, Verdict::Fail, Verdict::HypothesisFailed, Verdict::Reference]
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown verdict {s:?}")))
    }
}

/// One checked parameter point. Columns that do not apply are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub family: Family,
    pub e_size: Option<usize>,
    pub v_size: Option<usize>,
    pub t: Option<f64>,
    /// Effective chaos-term strengths `γ` (after any `N`-normalisation).
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub k: Option<usize>,
    pub n_disorder: usize,
    pub engine: String,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: Verdict,
    /// Side measurements: `c_k`, `worst_fkg_gap`, `overlap_mean`, `chatterjee_ref`, ...
    pub extras: BTreeMap<String, f64>,
    pub model: ModelParams,
    pub point: PointParams,
}

impl BoundReport {
    /// Re-derives the verdict from the stored numbers (reference and
    /// hypothesis rows keep their label).
    pub fn recomputed_verdict(&self) -> Verdict {
        match self.verdict {
            Verdict::Reference | Verdict::HypothesisFailed => self.verdict,
            _ => Verdict::judge(self.lhs, self.lhs_stderr, self.rhs),
        }
    }
}

#[cfg(test)]
mod tests;
