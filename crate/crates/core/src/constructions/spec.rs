use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cyclic::{fpp_order, DifferenceSet};
use super::grid::grid_side;
use crate::error::{invalid, Error, Result};

/// Names a construction and its parameters.
///
/// The compact text form (`grid:16`, `torus:3x6`, `etorus:8x16:k4`,
/// `cyclic:7:[1,2,4]`, `fpp:7`, `asgrid:4x6`, `lpsgrid:3x5`) round-trips
/// through `Display` and `FromStr`; parsing ignores case.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemSpec {
    Grid {
        n: usize,
    },
    Torus {
        t: usize,
        w: usize,
    },
    ETorus {
        t: usize,
        w: usize,
        k_branches: usize,
    },
    Cyclic {
        n: usize,
        set: Vec<usize>,
    },
    Fpp {
        n: usize,
    },
    AsGrid {
        t: usize,
        w: usize,
    },
    LpsGrid {
        t: usize,
        w: usize,
    },
}

impl SystemSpec {
    pub fn n(&self) -> usize {
        match self {
            SystemSpec::Grid { n } | SystemSpec::Cyclic { n, .. } | SystemSpec::Fpp { n } => *n,
            SystemSpec::Torus { t, w }
            | SystemSpec::ETorus { t, w, .. }
            | SystemSpec::AsGrid { t, w }
            | SystemSpec::LpsGrid { t, w } => t * w,
        }
    }

    /// Family keyword, as used in the text form.
    pub fn kind(&self) -> &'static str {
        match self {
            SystemSpec::Grid { .. } => "grid",
            SystemSpec::Torus { .. } => "torus",
            SystemSpec::ETorus { .. } => "etorus",
            SystemSpec::Cyclic { .. } => "cyclic",
            SystemSpec::Fpp { .. } => "fpp",
            SystemSpec::AsGrid { .. } => "asgrid",
            SystemSpec::LpsGrid { .. } => "lpsgrid",
        }
    }

    /// `(rows, columns)` of the array picture, if the family has one.
    pub fn shape(&self) -> Option<(usize, usize)> {
        match self {
            SystemSpec::Grid { n } => grid_side(*n).ok().map(|m| (m, m)),
            SystemSpec::Torus { t, w }
            | SystemSpec::ETorus { t, w, .. }
            | SystemSpec::AsGrid { t, w }
            | SystemSpec::LpsGrid { t, w } => Some((*t, *w)),
            SystemSpec::Cyclic { .. } | SystemSpec::Fpp { .. } => None,
        }
    }

    /// Checks every structural constraint of the family.
    pub fn validate(&self) -> Result<()> {
        let shape = |t: usize, w: usize| {
            if t < 2 || w < 2 {
                Err(invalid(format!("{self} needs t ≥ 2 and w ≥ 2")))
            } else {
                Ok(())
            }
        };
        match self {
            SystemSpec::Grid { n } => grid_side(*n).map(|_| ()),
            SystemSpec::Torus { t, w }
            | SystemSpec::AsGrid { t, w }
            | SystemSpec::LpsGrid { t, w } => shape(*t, *w),
            SystemSpec::ETorus { t, w, k_branches } => {
                shape(*t, *w)?;
                if *k_branches == 0 || k_branches > t {
                    return Err(invalid(format!("{self} needs 1 ≤ k ≤ t = {t}")));
                }
                Ok(())
            }
            SystemSpec::Cyclic { n, set } => {
                DifferenceSet::new(*n, set.iter().copied()).map(|_| ())
            }
            SystemSpec::Fpp { n } => fpp_order(*n).map(|_| ()),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Grid { n } => write!(f, "grid:{n}"),
            SystemSpec::Torus { t, w } => write!(f, "torus:{t}x{w}"),
            SystemSpec::ETorus { t, w, k_branches } => write!(f, "etorus:{t}x{w}:k{k_branches}"),
            SystemSpec::Cyclic { n, set } => {
                let items: Vec<String> = set.iter().map(usize::to_string).collect();
                write!(f, "cyclic:{n}:[{}]", items.join(","))
            }
            SystemSpec::Fpp { n } => write!(f, "fpp:{n}"),
            SystemSpec::AsGrid { t, w } => write!(f, "asgrid:{t}x{w}"),
            SystemSpec::LpsGrid { t, w } => write!(f, "lpsgrid:{t}x{w}"),
        }
    }
}

fn parse_err(token: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        token: token.to_string(),
        reason: reason.into(),
    }
}

fn number(token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(token, "expected a non-negative integer"))
}

fn dims(token: &str) -> Result<(usize, usize)> {
    let (t, w) = token
        .split_once('x')
        .ok_or_else(|| parse_err(token, "expected TxW, e.g. 4x6"))?;
    Ok((number(t)?, number(w)?))
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let lower = text.trim().to_ascii_lowercase();
        let (kind, rest) = lower
            .split_once(':')
            .ok_or_else(|| parse_err(&lower, "expected KIND:PARAMS, e.g. asgrid:4x6"))?;
        let single = |rest: &str| -> Result<()> {
            match rest.find(':') {
                Some(pos) => Err(parse_err(&rest[pos..], "unexpected trailing field")),
                None => Ok(()),
            }
        };
        match kind {
            "grid" => {
                single(rest)?;
                Ok(SystemSpec::Grid { n: number(rest)? })
            }
            "fpp" => {
                single(rest)?;
                Ok(SystemSpec::Fpp { n: number(rest)? })
            }
            "torus" | "asgrid" | "lpsgrid" => {
                single(rest)?;
                let (t, w) = dims(rest)?;
                Ok(match kind {
                    "torus" => SystemSpec::Torus { t, w },
                    "asgrid" => SystemSpec::AsGrid { t, w },
                    _ => SystemSpec::LpsGrid { t, w },
                })
            }
            "etorus" => {
                let (shape, k) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(rest, "expected TxW:kK, e.g. 8x16:k4"))?;
                let (t, w) = dims(shape)?;
                let k = k
                    .strip_prefix('k')
                    .ok_or_else(|| parse_err(k, "branch count must look like k4"))?;
                Ok(SystemSpec::ETorus {
                    t,
                    w,
                    k_branches: number(k)?,
                })
            }
            "cyclic" => {
                let (n, set) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(rest, "expected N:[d1,d2,…]"))?;
                let inner = set
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| {
                        parse_err(set, "difference set must be bracketed, e.g. [1,2,4]")
                    })?;
                let set = inner
                    .split(',')
                    .map(|d| number(d.trim()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SystemSpec::Cyclic { n: number(n)?, set })
            }
            other => Err(parse_err(
                other,
                "unknown family (grid, torus, etorus, cyclic, fpp, asgrid, lpsgrid)",
            )),
        }
    }
}

impl Serialize for SystemSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
