//! Families of quorums sharing one cycle length, with an access
//! distribution.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quorum::Quorum;
use crate::scalar::parse_rational;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuorumSystem {
    n: usize,
    quorums: Vec<Quorum>,
    weights: Vec<Rational>,
}

impl QuorumSystem {
    /// A system in which every quorum is picked with equal probability.
    pub fn uniform(n: usize, quorums: Vec<Quorum>) -> Result<Self> {
        let m = quorums.len().max(1) as i128;
        let weights = vec![Rational::new(1, m); quorums.len()];
        Self::with_weights(n, quorums, weights)
    }

    pub fn with_weights(n: usize, quorums: Vec<Quorum>, weights: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroCycle);
        }
        if quorums.is_empty() {
            return Err(Error::InvalidParameters(
                "a quorum system needs at least one quorum".into(),
            ));
        }
        if let Some(q) = quorums.iter().find(|q| q.n() != n) {
            return Err(Error::CycleMismatch {
                left: n,
                right: q.n(),
            });
        }
        if weights.len() != quorums.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} quorums",
                weights.len(),
                quorums.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| **w < Rational::zero()) {
            return Err(Error::InvalidWeights(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().copied().sum();
        if !total.is_one() {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            n,
            quorums,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn quorums(&self) -> &[Quorum] {
        &self.quorums
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.quorums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quorums.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|w| *w == self.weights[0])
    }

    /// Parse the JSON interchange document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
            token: text.chars().take(40).collect(),
            reason: e.to_string(),
        })?;
        doc.into_system()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SystemDoc::from(self)).expect("system document serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&SystemDoc::from(self)).expect("system document serializes")
    }
}

/// On-disk form: `{"n": 16, "quorums": [[0,4,…], …], "weights": ["1/4", …]}`.
///
/// Weights are omitted for uniform systems. On input each weight is either
/// a string (`"1/3"`, `"0.25"`) or a JSON number, read exactly from its
/// decimal text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDoc {
    pub n: usize,
    pub quorums: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<serde_json::Value>>,
}

impl SystemDoc {
    pub fn into_system(self) -> Result<QuorumSystem> {
        let quorums = self
            .quorums
            .into_iter()
            .map(|slots| Quorum::new(self.n, slots))
            .collect::<Result<Vec<_>>>()?;
        match self.weights {
            None => QuorumSystem::uniform(self.n, quorums),
            Some(values) => {
                let weights = values
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => parse_rational(s),
                        serde_json::Value::Number(x) => parse_rational(&x.to_string()),
                        other => Err(Error::InvalidWeights(format!(
                            "weight {other} is not a number"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                QuorumSystem::with_weights(self.n, quorums, weights)
            }
        }
    }
}

impl From<&QuorumSystem> for SystemDoc {
    fn from(sys: &QuorumSystem) -> Self {
        SystemDoc {
            n: sys.n,
            quorums: sys.quorums.iter().map(|q| q.slots().to_vec()).collect(),
            weights: (!sys.is_uniform()).then(|| {
                sys.weights
                    .iter()
                    .map(|w| serde_json::Value::String(w.to_string()))
                    .collect()
            }),
        }
    }
}
