use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use quorumlab::constructions::{find_difference_set, is_prime_power};
use quorumlab::metrics::CSV_HEADER;
use quorumlab::{Budget, BuildOptions, Convention, ExactMetrics, SystemSpec};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::metrics::compute;
use super::{MISMATCH, OK};
use crate::output::{emit, json_line, Format};
use crate::Global;

const SELF_CHECK_ROWS: usize = 5;

#[derive(Args)]
pub struct SweepArgs {
    /// Protocol templates: grid, torus, etorus:kK, cyclic, fpp, asgrid[:TxW], lpsgrid[:TxW].
    #[arg(long, value_delimiter = ',', required = true)]
    pub protocols: Vec<Template>,
    #[arg(long, default_value_t = 4)]
    pub n_min: usize,
    #[arg(long, default_value_t = 100)]
    pub n_max: usize,
    /// Fixed row count for asgrid, lpsgrid, torus and etorus; otherwise
    /// stepped grids are square and tori are t×2t for every t.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub w_min: usize,
    #[arg(long)]
    pub w_max: Option<usize>,
    /// Conventions whose columns are filled; the others are left empty.
    #[arg(long, value_delimiter = ',', default_values_t = [Conv::Aligned, Conv::Unordered, Conv::Rotational])]
    pub conventions: Vec<Conv>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Conv {
    Aligned,
    Unordered,
    Rotational,
}

impl Conv {
    fn matches(self, c: Convention) -> bool {
        matches!(
            (self, c),
            (Conv::Aligned, Convention::Aligned)
                | (Conv::Unordered, Convention::Unordered)
                | (Conv::Rotational, Convention::Rotational)
        )
    }
}

impl std::fmt::Display for Conv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Conv::Aligned => "aligned",
            Conv::Unordered => "unordered",
            Conv::Rotational => "rotational",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Grid,
    Torus,
    ETorus(usize),
    Cyclic,
    Fpp,
    AsGrid(Option<(usize, usize)>),
    LpsGrid(Option<(usize, usize)>),
}

impl FromStr for Template {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.trim().to_ascii_lowercase();
        let (kind, rest) = match lower.split_once(':') {
            Some((k, r)) => (k.to_string(), Some(r.to_string())),
            None => (lower.clone(), None),
        };
        let dims = |r: &str| -> std::result::Result<(usize, usize), String> {
            let bad = || format!("{s}: expected TxW after the colon");
            let (t, w) = r.split_once('x').ok_or_else(bad)?;
            Ok((t.parse().map_err(|_| bad())?, w.parse().map_err(|_| bad())?))
        };
        match (kind.as_str(), rest.as_deref()) {
            ("grid", None) => Ok(Template::Grid),
            ("torus", None) => Ok(Template::Torus),
            ("cyclic", None) => Ok(Template::Cyclic),
            ("fpp", None) => Ok(Template::Fpp),
            ("etorus", Some(k)) => k
                .strip_prefix('k')
                .and_then(|k| k.parse().ok())
                .map(Template::ETorus)
                .ok_or_else(|| format!("{s}: expected etorus:kK, e.g. etorus:k2")),
            ("asgrid", r) => Ok(Template::AsGrid(r.map(dims).transpose()?)),
            ("lpsgrid", r) => Ok(Template::LpsGrid(r.map(dims).transpose()?)),
            _ => Err(format!("unknown protocol template {s:?}")),
        }
    }
}

impl SweepArgs {
    fn in_range(&self, n: usize) -> bool {
        (self.n_min..=self.n_max).contains(&n)
    }

    fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        let hi = self.n_max.isqrt().max(2);
        match self.t {
            Some(t) => t..=t,
            None => 2..=hi,
        }
    }

    fn widths(&self, t: usize) -> Vec<usize> {
        let hi = self.w_max.unwrap_or(self.n_max / t.max(1));
        (self.w_min.max(2)..=hi)
            .filter(|&w| self.in_range(t * w))
            .collect()
    }

    /// Specs of one template, by increasing `n`.
    fn expand(&self, tpl: &Template, budget: &Budget) -> Result<Vec<SystemSpec>> {
        let mut out = Vec::new();
        match *tpl {
            Template::Grid => {
                out.extend((2..=self.n_max.isqrt()).map(|m| SystemSpec::Grid { n: m * m }));
            }
            Template::Torus => out.extend(self.rows().map(|t| SystemSpec::Torus { t, w: 2 * t })),
            Template::ETorus(k) => {
                out.extend(
                    self.rows()
                        .filter(|&t| k >= 1 && k <= t)
                        .map(|t| SystemSpec::ETorus {
                            t,
                            w: 2 * t,
                            k_branches: k,
                        }),
                )
            }
            Template::Cyclic | Template::Fpp => {
                for k in 3.. {
                    let n = k * (k - 1) + 1;
                    if n > self.n_max {
                        break;
                    }
                    if !self.in_range(n) || !is_prime_power(k - 1) {
                        continue;
                    }
                    out.push(if *tpl == Template::Fpp {
                        SystemSpec::Fpp { n }
                    } else {
                        let set = find_difference_set(n, k, budget)?
                            .ok_or_else(|| anyhow!("no difference set of size {k} mod {n}"))?;
                        SystemSpec::Cyclic {
                            n,
                            set: set.elements().to_vec(),
                        }
                    });
                }
            }
            Template::AsGrid(Some((t, w))) => out.push(SystemSpec::AsGrid { t, w }),
            Template::LpsGrid(Some((t, w))) => out.push(SystemSpec::LpsGrid { t, w }),
            Template::AsGrid(None) | Template::LpsGrid(None) => {
                let make = |t, w| match tpl {
                    Template::AsGrid(_) => SystemSpec::AsGrid { t, w },
                    _ => SystemSpec::LpsGrid { t, w },
                };
                match self.t {
                    Some(t) => out.extend(self.widths(t).into_iter().map(|w| make(t, w))),
                    None => out.extend((2..=self.n_max.isqrt()).map(|m| make(m, m))),
                }
            }
        }
        out.retain(|s| self.in_range(s.n()) && s.validate().is_ok());
        out.sort_by_key(|s| s.n());
        Ok(out)
    }

    /// CSV fields of `r`, with columns of unselected conventions blanked.
    fn fields(&self, r: &ExactMetrics) -> Vec<String> {
        let mut f = r.csv_fields();
        let on = |c: Conv| self.conventions.contains(&c);
        let blank: &[(Conv, &[usize])] = &[
            (Conv::Aligned, &[4, 7]),
            (Conv::Unordered, &[5]),
            (Conv::Rotational, &[6, 8]),
        ];
        for (c, cols) in blank {
            if !on(*c) {
                for &i in *cols {
                    f[i].clear();
                }
            }
        }
        if let Some(cf) = &r.closed_form {
            if !self.conventions.iter().any(|c| c.matches(cf.convention)) {
                for v in &mut f[9..13] {
                    v.clear();
                }
            }
        }
        f
    }
}

fn to_csv(rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Re-parses the emitted CSV and recomputes up to five seeded rows through
/// the `metrics` path. Returns the disagreements.
fn self_check(
    a: &SweepArgs,
    csv_text: &str,
    seed: u64,
    opts: &BuildOptions,
) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let records: Vec<csv::StringRecord> =
        reader.records().collect::<std::result::Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, records.len(), SELF_CHECK_ROWS.min(records.len()));
    let mut bad = Vec::new();
    for i in picks.into_vec() {
        let rec = &records[i];
        let spec: SystemSpec = rec[0].parse()?;
        let expected = a.fields(&compute(&spec, opts)?);
        let got: Vec<&str> = rec.iter().collect();
        if got != expected {
            bad.push(format!(
                "row {i} ({spec}) re-parsed as {got:?}, metrics gives {expected:?}"
            ));
        }
    }
    Ok(bad)
}

pub fn run(a: &SweepArgs, g: &Global) -> Result<u8> {
    if a.n_min > a.n_max {
        bail!("empty n range {}..={}", a.n_min, a.n_max);
    }
    let opts = g.build_options();
    let mut specs = Vec::new();
    for tpl in &a.protocols {
        specs.extend(a.expand(tpl, &opts.budget)?);
    }
    if specs.is_empty() {
        eprintln!("warning: no constructible sizes for the requested protocols and range");
        emit(g, "")?;
        return Ok(OK);
    }
    let reports: Vec<ExactMetrics> = specs
        .par_iter()
        .map(|s| compute(s, &opts))
        .collect::<Result<_>>()?;
    let mismatches: Vec<String> = reports.iter().flat_map(|r| r.mismatches()).collect();

    let rows: Vec<Vec<String>> = reports.iter().map(|r| a.fields(r)).collect();
    let csv_text = to_csv(&rows)?;
    let check = self_check(a, &csv_text, g.seed, &opts)?;

    let text = match g.format {
        Format::Json => json_line(&serde_json::Value::Array(
            reports.iter().map(|r| r.to_json()).collect(),
        )),
        Format::Csv | Format::Pretty => csv_text,
    };
    emit(g, &text)?;
    for m in mismatches.iter().chain(&check) {
        eprintln!("mismatch: {m}");
    }
    Ok(if mismatches.is_empty() && check.is_empty() {
        OK
    } else {
        MISMATCH
    })
}
