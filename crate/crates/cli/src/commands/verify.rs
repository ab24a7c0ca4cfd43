use anyhow::{bail, Result};
use clap::Args;
use quorumlab::closure::{check_cross_closure, check_rotational_closure};
use quorumlab::constructions::build_system;
use quorumlab::{ClosureReport, QuorumSystem, SystemSpec};
use serde_json::json;

use super::{CLOSURE_FAIL, OK};
use crate::output::{emit, json_line, Format};
use crate::Global;

#[derive(Args)]
pub struct VerifyArgs {
    /// One spec for rotational closure, two for cross closure.
    #[arg(num_args = 0..=2)]
    pub specs: Vec<String>,
    /// System documents (`{"n":..,"quorums":[[..]]}`) in place of specs.
    #[arg(long, num_args = 1)]
    pub raw: Vec<String>,
}

struct Named {
    label: String,
    sys: QuorumSystem,
}

pub fn run(a: &VerifyArgs, g: &Global) -> Result<u8> {
    let mut systems = Vec::new();
    for s in &a.specs {
        let spec: SystemSpec = s.parse()?;
        systems.push(Named {
            label: spec.to_string(),
            sys: build_system(&spec, &g.build_options())?,
        });
    }
    for (i, raw) in a.raw.iter().enumerate() {
        systems.push(Named {
            label: format!("raw#{i}"),
            sys: QuorumSystem::from_json(raw)?,
        });
    }
    let budget = g.budget();
    let (mode, report, replay) = match systems.as_slice() {
        [one] => {
            let r = check_rotational_closure(&one.sys, &budget)?;
            let replay = r
                .witness()
                .map(|w| w.replay_rotational(&one.sys))
                .transpose()?;
            ("rotational", r, replay)
        }
        [x, y] => {
            let r = check_cross_closure(&x.sys, &y.sys, &budget)?;
            let replay = r
                .witness()
                .map(|w| w.replay_cross(&x.sys, &y.sys))
                .transpose()?;
            ("cross", r, replay)
        }
        _ => bail!("verify takes one or two systems, got {}", systems.len()),
    };
    let labels: Vec<&str> = systems.iter().map(|s| s.label.as_str()).collect();
    let second = systems.last().expect("at least one system");
    let text = match g.format {
        Format::Json => {
            let mut doc = json!({ "check": mode, "systems": labels, "result": report });
            if let Some(w) = report.witness() {
                doc["first_quorum"] = json!(systems[0].sys.quorums()[w.first].slots());
                doc["second_quorum"] = json!(second.sys.quorums()[w.second].slots());
            }
            json_line(&doc)
        }
        Format::Csv => {
            let (verdict, f, s, o) = match report {
                ClosureReport::Pass => ("pass", String::new(), String::new(), String::new()),
                ClosureReport::Fail(w) => ("fail", w.first.to_string(), w.second.to_string(), w.offset.to_string()),
            };
            format!("check,systems,verdict,first,second,offset\n{mode},{},{verdict},{f},{s},{o}\n", labels.join(" "))
        }
        Format::Pretty => match report {
            ClosureReport::Pass => format!("PASS {mode} closure: {}\n", labels.join(" vs ")),
            ClosureReport::Fail(w) => format!(
                "FAIL {mode} closure: {}\n  witness: G = #{} {}, H = #{} {}, offset {}\n  shared slots: {:?}\n",
                labels.join(" vs "),
                w.first,
                systems[0].sys.quorums()[w.first],
                w.second,
                second.sys.quorums()[w.second],
                w.offset,
                replay.unwrap_or_default(),
            ),
        },
    };
    emit(g, &text)?;
    Ok(if report.passed() { OK } else { CLOSURE_FAIL })
}
