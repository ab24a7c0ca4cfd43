use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use quorumlab::format_decimal;
use quorumlab::sim::{lifetime_summary, run_simulation, SimConfig, SimReport};
use quorumlab::Scalar;

use super::OK;
use crate::output::{json_line, Format};
use crate::Global;

#[derive(Args)]
pub struct SimulateArgs {
    /// Path to a JSON simulation config.
    pub config: PathBuf,
}

fn summary(r: &SimReport) -> String {
    let life = lifetime_summary(r);
    let mut s = format!(
        "{} nodes, {} pairs, horizon {} slots\n",
        r.nodes.len(),
        r.pairs.len(),
        r.horizon
    );
    let discovered = r.pairs.iter().filter(|p| p.latency.is_some()).count();
    let worst = r.pairs.iter().filter_map(|p| p.latency).max();
    s += &format!("  discovered pairs   {discovered}/{}\n", r.pairs.len());
    if let Some(w) = worst {
        s += &format!("  max latency        {w} slots\n");
    }
    let mean_duty = r
        .nodes
        .iter()
        .map(|n| Scalar::to_f64(&n.duty_cycle))
        .sum::<f64>()
        / r.nodes.len() as f64;
    s += &format!("  mean duty cycle    {}\n", format_decimal(mean_duty, 6));
    match life.network {
        Some(l) => s += &format!("  network lifetime   {l} slots\n"),
        None => s += "  network lifetime   beyond horizon\n",
    }
    s += &format!("  resize events      {}\n", r.resize_events.len());
    if let Some(sweep) = &r.offset_sweep {
        let worst = sweep.iter().filter_map(|p| p.outcome.max_latency).max();
        let missed: u64 = sweep.iter().map(|p| p.outcome.undiscovered).sum();
        s += &format!(
            "  offset sweep       max latency {}, undiscovered offset pairs {missed}\n",
            worst.map_or("n/a".to_string(), |w| w.to_string())
        );
    }
    s
}

pub fn run(a: &SimulateArgs, g: &Global) -> Result<u8> {
    let text =
        fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let cfg = SimConfig::from_json(&text)?;
    let report = run_simulation(&cfg)?;
    let dir = match &g.out {
        Some(d) => d.clone(),
        None => a.config.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    };
    let json = report.to_json_pretty() + "\n";
    write("report.json", &json)?;
    write("pairs.csv", &report.pairs_csv())?;
    write("nodes.csv", &report.nodes_csv())?;
    match g.format {
        Format::Json => print!("{}", json_line(&serde_json::to_value(&report)?)),
        Format::Csv => print!("{}", report.pairs_csv()),
        Format::Pretty => print!("{}", summary(&report)),
    }
    Ok(OK)
}
