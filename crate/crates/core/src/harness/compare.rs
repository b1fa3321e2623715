use serde::{Deserialize, Serialize};

use crate::engine::IndividualId;
use crate::{Error, Result};

/// Seven-step preference scale, from "highly inferior" (-3) to "highly
/// superior" (+3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct Verdict(i8);

impl Verdict {
    pub fn new(value: i8) -> Result<Self> {
        if (-3..=3).contains(&value) {
            Ok(Verdict(value))
        } else {
            Err(Error::invalid(format!("verdict {value} outside -3..=3")))
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        ["<<<", "<<", "<", "=", ">", ">>", ">>>"][(self.0 + 3) as usize]
    }

    pub fn from_symbol(symbol: &str) -> Result<Self> {
        ["<<<", "<<", "<", "=", ">", ">>", ">>>"]
            .iter()
            .position(|s| *s == symbol)
            .map(|i| Verdict(i as i8 - 3))
            .ok_or_else(|| Error::invalid(format!("unknown comparison symbol {symbol:?}")))
    }
}

impl TryFrom<i8> for Verdict {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        Verdict::new(v)
    }
}

impl From<Verdict> for i8 {
    fn from(v: Verdict) -> i8 {
        v.0
    }
}

/// "left is `verdict` compared with right".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub left: IndividualId,
    pub right: IndividualId,
    pub verdict: Verdict,
}
