use anyhow::Result;
use clap::Args;
use quorumlab::constructions::build_system;
use quorumlab::metrics::CSV_HEADER;
use quorumlab::{format_decimal, BuildOptions, ExactMetrics, Scalar, SystemSpec};

use super::{MISMATCH, OK};
use crate::output::{emit, json_line, Format};
use crate::Global;

#[derive(Args)]
pub struct MetricsArgs {
    pub spec: String,
}

pub fn compute(spec: &SystemSpec, opts: &BuildOptions) -> Result<ExactMetrics> {
    let sys = build_system(spec, opts)?;
    Ok(ExactMetrics::compute(spec, &sys)?)
}

fn line(label: &str, value: Option<&quorumlab::Rational>) -> String {
    match value {
        Some(v) => format!(
            "  {label:<18} {:<14} ≈ {}\n",
            v.to_string(),
            format_decimal(Scalar::to_f64(v), 6)
        ),
        None => format!("  {label:<18} n/a\n"),
    }
}

pub fn pretty(r: &ExactMetrics) -> String {
    let mut s = format!("{}  n={}  {} quorums\n", r.spec, r.n, r.quorum_count);
    s += &line("ar", Some(&r.active_ratio));
    s += &line("eqos_aligned", Some(&r.eqos_aligned));
    s += &line("eqos_unordered", r.eqos_unordered.as_ref());
    s += &line("eqos_rotational", Some(&r.eqos_rotational));
    s += &line("qer_aligned", Some(&r.qer_aligned));
    s += &line("qer_rotational", Some(&r.qer_rotational));
    match &r.closed_form {
        Some(cf) => {
            s += &format!("  closed form ({})\n", cf.convention.as_str());
            s += &line("  eqos", Some(&cf.eqos));
            s += &line("  ar", Some(&cf.active_ratio));
            s += &line("  qer", Some(&cf.qer));
        }
        None => s += "  closed form        n/a\n",
    }
    s
}

pub fn run(a: &MetricsArgs, g: &Global) -> Result<u8> {
    let spec: SystemSpec = a.spec.parse()?;
    let report = compute(&spec, &g.build_options())?;
    let text = match g.format {
        Format::Json => json_line(&report.to_json()),
        Format::Csv => format!("{CSV_HEADER}\n{}\n", report.csv_row()),
        Format::Pretty => pretty(&report),
    };
    emit(g, &text)?;
    let mismatches = report.mismatches();
    for m in &mismatches {
        eprintln!("mismatch: {m}");
    }
    Ok(if mismatches.is_empty() { OK } else { MISMATCH })
}
