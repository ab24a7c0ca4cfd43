use anyhow::{bail, Result};
use clap::Args;
use quorumlab::constructions::{
    build_as_grid, build_e_torus, build_grid, build_lps_grid, build_system, build_torus,
};
use quorumlab::{Quorum, QuorumSystem, SystemSpec};
use serde_json::{json, Value};

use super::OK;
use crate::output::{emit, json_line, Format};
use crate::Global;

#[derive(Args)]
pub struct BuildArgs {
    /// System spec, e.g. `asgrid:4x4`, `grid:16`, `fpp:7`.
    pub spec: String,
    /// Row (grid, AS-Grid, LPS-Grid, e-torus).
    #[arg(long)]
    pub row: Option<usize>,
    /// Column (grid, torus, e-torus).
    #[arg(long)]
    pub col: Option<usize>,
    /// Torus branch rows, one per half-width column.
    #[arg(long, value_delimiter = ',')]
    pub branch_rows: Option<Vec<usize>>,
    /// Index into the built system, for any family.
    #[arg(long, conflicts_with_all = ["row", "col", "branch_rows"])]
    pub quorum: Option<usize>,
}

fn select(spec: &SystemSpec, a: &BuildArgs, g: &Global) -> Result<Option<Quorum>> {
    if let Some(i) = a.quorum {
        let sys = build_system(spec, &g.build_options())?;
        let Some(q) = sys.quorums().get(i) else {
            bail!("{spec} has {} quorums, no index {i}", sys.len());
        };
        return Ok(Some(q.clone()));
    }
    if a.row.is_none() && a.col.is_none() && a.branch_rows.is_none() {
        return Ok(None);
    }
    let need = |v: Option<usize>, name: &str| match v {
        Some(v) => Ok(v),
        None => Err(anyhow::anyhow!("{spec} needs --{name} to select a quorum")),
    };
    let q = match *spec {
        SystemSpec::Grid { n } => build_grid(n, need(a.row, "row")?, need(a.col, "col")?)?,
        SystemSpec::Torus { t, w } => {
            let rows = a.branch_rows.clone().unwrap_or_default();
            build_torus(t, w, need(a.col, "col")?, &rows)?
        }
        SystemSpec::ETorus { t, w, k_branches } => {
            build_e_torus(t, w, k_branches, need(a.row, "row")?, need(a.col, "col")?)?
        }
        SystemSpec::AsGrid { t, w } => build_as_grid(t, w, need(a.row, "row")?)?,
        SystemSpec::LpsGrid { t, w } => build_lps_grid(t, w, need(a.row, "row")?)?,
        SystemSpec::Cyclic { .. } | SystemSpec::Fpp { .. } => {
            bail!("{spec} quorums are shifts; select one with --quorum")
        }
    };
    Ok(Some(q))
}

/// Slot shown at array position `(r, c)`.
fn slot_at(spec: &SystemSpec, rows: usize, cols: usize, r: usize, c: usize) -> usize {
    match spec {
        SystemSpec::AsGrid { .. } | SystemSpec::LpsGrid { .. } => c * rows + r,
        _ => r * cols + c,
    }
}

/// The array picture with the quorum's slots in brackets.
pub fn layout(spec: &SystemSpec, q: &Quorum) -> String {
    let (rows, cols) = spec.shape().unwrap_or((1, spec.n()));
    let width = (spec.n().saturating_sub(1)).to_string().len() + 2;
    let mut out = String::new();
    for r in 0..rows {
        let cells: Vec<String> = (0..cols)
            .map(|c| {
                let s = slot_at(spec, rows, cols, r, c);
                let cell = if q.contains(s) {
                    format!("[{s}]")
                } else {
                    s.to_string()
                };
                format!("{cell:>width$}")
            })
            .collect();
        out += cells.join(" ").trim_end();
        out.push('\n');
    }
    out
}

fn quorum_doc(spec: &SystemSpec, q: &Quorum) -> Value {
    json!({ "spec": spec.to_string(), "n": q.n(), "quorum": q.slots() })
}

fn system_doc(spec: &SystemSpec, sys: &QuorumSystem) -> Result<Value> {
    let mut doc: Value = serde_json::from_str(&sys.to_json())?;
    doc.as_object_mut()
        .expect("system document is an object")
        .insert("spec".into(), spec.to_string().into());
    Ok(doc)
}

pub fn run(a: &BuildArgs, g: &Global) -> Result<u8> {
    let spec: SystemSpec = a.spec.parse()?;
    spec.validate()?;
    let text = match select(&spec, a, g)? {
        Some(q) => match g.format {
            Format::Json => json_line(&quorum_doc(&spec, &q)),
            Format::Csv => format!("spec,n,slots\n{spec},{},\"{}\"\n", q.n(), slots_list(&q)),
            Format::Pretty => format!(
                "{spec}  quorum {q}  ({} of {} slots awake)\n\n{}\n{}",
                q.len(),
                q.n(),
                layout(&spec, &q),
                json_line(&quorum_doc(&spec, &q))
            ),
        },
        None => {
            let sys = build_system(&spec, &g.build_options())?;
            match g.format {
                Format::Json => json_line(&system_doc(&spec, &sys)?),
                Format::Csv => {
                    let mut s = String::from("index,size,slots\n");
                    for (i, q) in sys.quorums().iter().enumerate() {
                        s += &format!("{i},{},\"{}\"\n", q.len(), slots_list(q));
                    }
                    s
                }
                Format::Pretty => {
                    let mut s = format!("{spec}  n={}  {} quorums\n", sys.n(), sys.len());
                    for (i, q) in sys.quorums().iter().enumerate() {
                        s += &format!("  {i:>4}  {q}\n");
                    }
                    s
                }
            }
        }
    };
    emit(g, &text)?;
    Ok(OK)
}

fn slots_list(q: &Quorum) -> String {
    q.slots()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
