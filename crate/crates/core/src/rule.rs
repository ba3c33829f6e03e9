use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Every dynamic the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Cross Learning, one sample per update.
    #[serde(rename = "CL")]
    Cl,
    /// Maynard-Cross Learning, one sample per update.
    #[serde(rename = "MCL")]
    Mcl,
    /// Batched Cross Learning.
    #[serde(rename = "BCL")]
    Bcl,
    /// Batched Maynard-Cross Learning.
    #[serde(rename = "BMCL")]
    Bmcl,
    /// Voter rule population.
    #[serde(rename = "VR")]
    Vr,
    /// Weighted voter rule population.
    #[serde(rename = "WVR")]
    Wvr,
    /// Taylor replicator dynamic.
    #[serde(rename = "TRD")]
    Trd,
    /// Maynard Smith replicator dynamic.
    #[serde(rename = "MRD")]
    Mrd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleClass {
    Learner,
    BatchedLearner,
    Population,
    Reference,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Cl,
        Rule::Mcl,
        Rule::Bcl,
        Rule::Bmcl,
        Rule::Vr,
        Rule::Wvr,
        Rule::Trd,
        Rule::Mrd,
    ];

    pub fn class(self) -> RuleClass {
        match self {
            Rule::Cl | Rule::Mcl => RuleClass::Learner,
            Rule::Bcl | Rule::Bmcl => RuleClass::BatchedLearner,
            Rule::Vr | Rule::Wvr => RuleClass::Population,
            Rule::Trd | Rule::Mrd => RuleClass::Reference,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Cl => "CL",
            Rule::Mcl => "MCL",
            Rule::Bcl => "BCL",
            Rule::Bmcl => "BMCL",
            Rule::Vr => "VR",
            Rule::Wvr => "WVR",
            Rule::Trd => "TRD",
            Rule::Mrd => "MRD",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown rule {s:?}")))
    }
}
