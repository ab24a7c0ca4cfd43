//! Slot-synchronous multi-node discovery simulator.
//!
//! Every node runs one quorum with an integer clock offset. Node `u` is awake
//! at global slot `s` iff its quorum contains `(s − offset_u) mod n_u`. Two
//! adjacent nodes discover each other in the first slot where both are awake.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::adaptive::{select_width, AdaptivePolicy, EnergyState};
use crate::constructions::{build_as_grid, build_system, BuildOptions, SystemSpec};
use crate::error::{Error, Result};
use crate::quorum::Quorum;
use crate::scalar::{format_decimal, Scalar};
use crate::system::QuorumSystem;
use crate::Rational;

/// A fixed index or a seeded uniform draw (`"random"` in JSON).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Pick {
    #[default]
    Random,
    Fixed(usize),
}

impl Serialize for Pick {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Pick::Random => s.serialize_str("random"),
            Pick::Fixed(i) => s.serialize_u64(*i as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Pick {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PickVisitor;
        impl Visitor<'_> for PickVisitor {
            type Value = Pick;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer or \"random\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Pick, E> {
                Ok(Pick::Fixed(v as usize))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Pick, E> {
                usize::try_from(v)
                    .map(Pick::Fixed)
                    .map_err(|_| E::custom(format!("{v} is negative")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Pick, E> {
                if v == "random" {
                    Ok(Pick::Random)
                } else {
                    Err(E::custom(format!("expected \"random\", got {v:?}")))
                }
            }
        }
        d.deserialize_any(PickVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    /// Spec text such as `asgrid:4x4`.
    pub system: String,
    #[serde(default)]
    pub quorum: Pick,
    #[serde(default)]
    pub offset: Pick,
    pub initial_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyModel {
    pub active_cost: f64,
    pub sleep_cost: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            active_cost: 1.0,
            sleep_cost: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub t: usize,
    pub w_base: usize,
    pub k_step: f64,
    pub full_energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_max: Option<usize>,
    #[serde(default)]
    pub traffic_bands: usize,
}

impl PolicyConfig {
    pub fn to_policy(&self) -> Result<AdaptivePolicy<f64>> {
        let p = AdaptivePolicy::new(self.t, self.w_base, self.k_step, self.full_energy)?;
        let p = match self.w_max {
            Some(w) => p.with_w_max(w)?,
            None => p,
        };
        Ok(p.with_traffic_bands(self.traffic_bands))
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum Topology {
    #[default]
    Complete,
    Adjacency(Vec<[usize; 2]>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TopologyDoc {
    Named(String),
    Edges { adjacency: Vec<[usize; 2]> },
}

impl Serialize for Topology {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Topology::Complete => TopologyDoc::Named("complete".into()).serialize(s),
            Topology::Adjacency(edges) => TopologyDoc::Edges {
                adjacency: edges.clone(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match TopologyDoc::deserialize(d)? {
            TopologyDoc::Named(name) if name == "complete" => Ok(Topology::Complete),
            TopologyDoc::Named(name) => Err(de::Error::custom(format!(
                "unknown topology {name:?}; expected \"complete\" or {{\"adjacency\": [[a, b], ...]}}"
            ))),
            TopologyDoc::Edges { adjacency } => Ok(Topology::Adjacency(adjacency)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub nodes: Vec<NodeConfig>,
    #[serde(default)]
    pub energy: EnergyModel,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<PolicyConfig>,
    #[serde(default)]
    pub topology: Topology,
    /// Also sweep every offset pair for every node pair.
    #[serde(default)]
    pub exhaustive_offsets: bool,
    /// Subfamily cap for torus nodes.
    #[serde(default = "default_torus_cap")]
    pub torus_cap: usize,
}

fn default_torus_cap() -> usize {
    BuildOptions::default().torus_cap
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    /// Every violation in the config, in node order.
    pub fn validate(&self) -> Result<()> {
        self.resolve_systems().map(|_| ())
    }

    fn resolve_systems(&self) -> Result<Vec<(SystemSpec, QuorumSystem)>> {
        let mut errs = Vec::new();
        if self.horizon == 0 {
            errs.push("horizon must be at least 1 slot".to_string());
        }
        if self.nodes.len() < 2 {
            errs.push(format!("need at least 2 nodes, got {}", self.nodes.len()));
        }
        let EnergyModel {
            active_cost,
            sleep_cost,
        } = self.energy;
        if !(sleep_cost >= 0.0 && active_cost >= sleep_cost && active_cost.is_finite()) {
            errs.push(format!(
                "energy costs must satisfy active_cost ≥ sleep_cost ≥ 0, got {active_cost} and {sleep_cost}"
            ));
        }
        let policy = match self.adaptive.as_ref().map(PolicyConfig::to_policy) {
            Some(Err(e)) => {
                errs.push(format!("adaptive: {e}"));
                None
            }
            Some(Ok(p)) => Some(p),
            None => None,
        };
        let opts = BuildOptions {
            seed: self.seed,
            torus_cap: self.torus_cap,
            ..BuildOptions::default()
        };
        let mut systems = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !(node.initial_energy >= 0.0 && node.initial_energy.is_finite()) {
                errs.push(format!(
                    "node {i}: initial_energy must be a finite value ≥ 0"
                ));
            }
            let spec: SystemSpec = match node.system.parse() {
                Ok(s) => s,
                Err(e) => {
                    errs.push(format!("node {i}: {e}"));
                    continue;
                }
            };
            if let (Some(p), SystemSpec::AsGrid { t, .. }) = (&policy, &spec) {
                if *t != p.t {
                    errs.push(format!(
                        "node {i}: adaptive policy fixes t={} but {spec} has t={t}",
                        p.t
                    ));
                }
            }
            let sys = match build_system(&spec, &opts) {
                Ok(s) => s,
                Err(e) => {
                    errs.push(format!("node {i}: {e}"));
                    continue;
                }
            };
            if let Pick::Fixed(q) = node.quorum {
                if q >= sys.len() {
                    errs.push(format!(
                        "node {i}: quorum {q} out of range, {spec} has {}",
                        sys.len()
                    ));
                }
            }
            if let Pick::Fixed(o) = node.offset {
                if o >= sys.n() {
                    errs.push(format!("node {i}: offset {o} must be below n={}", sys.n()));
                }
            }
            systems.push((spec, sys));
        }
        if let Topology::Adjacency(edges) = &self.topology {
            for &[a, b] in edges {
                if a >= self.nodes.len() || b >= self.nodes.len() {
                    errs.push(format!(
                        "adjacency [{a}, {b}] names a node that does not exist"
                    ));
                } else if a == b {
                    errs.push(format!("adjacency [{a}, {b}] is a self loop"));
                }
            }
        }
        if errs.is_empty() {
            Ok(systems)
        } else {
            Err(Error::Config(errs))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeReport {
    pub node: usize,
    pub system: String,
    pub quorum: usize,
    pub offset: usize,
    pub awake_slots: u64,
    pub alive_slots: u64,
    #[serde(serialize_with = "as_string")]
    pub duty_cycle: Rational,
    /// First slot at which remaining energy was below `active_cost`; `None`
    /// if the node outlived the horizon.
    pub lifetime: Option<u64>,
    pub final_energy: f64,
    pub resize_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub node_a: usize,
    pub node_b: usize,
    /// First slot in which both were awake; `None` if they never met.
    pub latency: Option<u64>,
    pub shared_slots: u64,
    /// `shared_slots · max(n_a, n_b) / horizon`, using the initial cycle lengths.
    #[serde(serialize_with = "as_string")]
    pub overlaps_per_cycle: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResizeEvent {
    pub node: usize,
    pub slot: u64,
    pub old_w: usize,
    pub new_w: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepOutcome {
    pub offset_pairs: u64,
    /// Largest first-discovery slot over all discovering offset pairs.
    pub max_latency: Option<u64>,
    pub undiscovered: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSweep {
    pub node_a: usize,
    pub node_b: usize,
    #[serde(flatten)]
    pub outcome: SweepOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub horizon: u64,
    pub seed: u64,
    pub nodes: Vec<NodeReport>,
    pub pairs: Vec<PairReport>,
    pub resize_events: Vec<ResizeEvent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_sweep: Option<Vec<PairSweep>>,
}

fn as_string<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl SimReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("node_a,node_b,latency_slots,overlaps_per_cycle\n");
        for p in &self.pairs {
            let latency = p.latency.map(|l| l.to_string()).unwrap_or_default();
            let overlaps = format_decimal(Scalar::to_f64(&p.overlaps_per_cycle), 6);
            out += &format!("{},{},{latency},{overlaps}\n", p.node_a, p.node_b);
        }
        out
    }

    pub fn nodes_csv(&self) -> String {
        let mut out = String::from("node,duty_cycle,lifetime_slots,resize_count\n");
        for n in &self.nodes {
            let lifetime = n.lifetime.map(|l| l.to_string()).unwrap_or_default();
            let duty = format_decimal(Scalar::to_f64(&n.duty_cycle), 6);
            out += &format!("{},{duty},{lifetime},{}\n", n.node, n.resize_count);
        }
        out
    }
}

struct NodeState {
    quorum: Quorum,
    mask: Vec<bool>,
    phase: usize,
    /// `(t, w, row)` for nodes that follow the adaptive policy.
    adaptive: Option<(usize, usize, usize)>,
    energy: f64,
    alive: bool,
    awake_slots: u64,
    alive_slots: u64,
    lifetime: Option<u64>,
    resize_count: usize,
}

fn mask_of(q: &Quorum) -> Vec<bool> {
    let mut mask = vec![false; q.n()];
    for &s in q.slots() {
        mask[s] = true;
    }
    mask
}

fn phase_at_zero(n: usize, offset: usize) -> usize {
    (n - offset % n) % n
}

fn adjacent_pairs(nodes: usize, topology: &Topology) -> Vec<(usize, usize)> {
    match topology {
        Topology::Complete => (0..nodes)
            .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
            .collect(),
        Topology::Adjacency(edges) => edges
            .iter()
            .map(|&[a, b]| (a.min(b), a.max(b)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    }
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimReport> {
    let systems = cfg.resolve_systems()?;
    let policy = cfg
        .adaptive
        .as_ref()
        .map(PolicyConfig::to_policy)
        .transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut chosen = Vec::with_capacity(systems.len());
    let mut states = Vec::with_capacity(systems.len());
    for ((spec, sys), node) in systems.iter().zip(&cfg.nodes) {
        let qi = match node.quorum {
            Pick::Fixed(i) => i,
            Pick::Random => rng.gen_range(0..sys.len()),
        };
        let offset = match node.offset {
            Pick::Fixed(o) => o,
            Pick::Random => rng.gen_range(0..sys.n()),
        };
        let quorum = sys.quorums()[qi].clone();
        let adaptive = match (spec, &policy) {
            (SystemSpec::AsGrid { t, w }, Some(_)) => Some((*t, *w, qi)),
            _ => None,
        };
        chosen.push((qi, offset));
        states.push(NodeState {
            mask: mask_of(&quorum),
            phase: phase_at_zero(quorum.n(), offset),
            quorum,
            adaptive,
            energy: node.initial_energy,
            alive: true,
            awake_slots: 0,
            alive_slots: 0,
            lifetime: None,
            resize_count: 0,
        });
    }

    let pairs = adjacent_pairs(states.len(), &cfg.topology);
    let mut latency: Vec<Option<u64>> = vec![None; pairs.len()];
    let mut shared = vec![0u64; pairs.len()];
    let mut events = Vec::new();
    let mut awake = vec![false; states.len()];
    let EnergyModel {
        active_cost,
        sleep_cost,
    } = cfg.energy;

    for slot in 0..cfg.horizon as u64 {
        for (u, st) in states.iter_mut().enumerate() {
            awake[u] = false;
            if !st.alive {
                continue;
            }
            if st.energy < active_cost {
                st.alive = false;
                st.lifetime = Some(slot);
                continue;
            }
            if let (Some((t, w, row)), Some(p), 0) = (st.adaptive, &policy, st.phase) {
                let e = EnergyState::clamped(st.energy, p.full_energy)?;
                let new_w = select_width(&e, p);
                if new_w != w {
                    st.quorum = build_as_grid(t, new_w, row)?;
                    st.mask = mask_of(&st.quorum);
                    st.adaptive = Some((t, new_w, row));
                    st.resize_count += 1;
                    events.push(ResizeEvent {
                        node: u,
                        slot,
                        old_w: w,
                        new_w,
                    });
                }
            }
            awake[u] = st.mask[st.phase];
            st.alive_slots += 1;
            if awake[u] {
                st.awake_slots += 1;
                st.energy -= active_cost;
            } else {
                st.energy -= sleep_cost;
            }
            st.phase += 1;
            if st.phase == st.mask.len() {
                st.phase = 0;
            }
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if awake[a] && awake[b] {
                shared[k] += 1;
                latency[k].get_or_insert(slot);
            }
        }
    }

    let horizon = cfg.horizon as i128;
    let pair_reports = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let cycle = systems[a].1.n().max(systems[b].1.n()) as i128;
            PairReport {
                node_a: a,
                node_b: b,
                latency: latency[k],
                shared_slots: shared[k],
                overlaps_per_cycle: Rational::new(shared[k] as i128 * cycle, horizon),
            }
        })
        .collect();

    let node_reports = states
        .iter()
        .enumerate()
        .map(|(u, st)| NodeReport {
            node: u,
            system: systems[u].0.to_string(),
            quorum: chosen[u].0,
            offset: chosen[u].1,
            awake_slots: st.awake_slots,
            alive_slots: st.alive_slots,
            duty_cycle: if st.alive_slots == 0 {
                Rational::from_integer(0)
            } else {
                Rational::new(st.awake_slots as i128, st.alive_slots as i128)
            },
            lifetime: st.lifetime,
            final_energy: st.energy,
            resize_count: st.resize_count,
        })
        .collect();

    let offset_sweep = cfg.exhaustive_offsets.then(|| {
        pairs
            .iter()
            .map(|&(a, b)| PairSweep {
                node_a: a,
                node_b: b,
                outcome: discovery_sweep(
                    &systems[a].1.quorums()[chosen[a].0],
                    &systems[b].1.quorums()[chosen[b].0],
                ),
            })
            .collect()
    });

    Ok(SimReport {
        horizon: cfg.horizon as u64,
        seed: cfg.seed,
        nodes: node_reports,
        pairs: pair_reports,
        resize_events: events,
        offset_sweep,
    })
}

/// First slot in `[0, lcm(n_a, n_b))` at which both schedules are awake.
/// The joint pattern repeats with that period, so `None` means never.
pub fn first_discovery(a: &Quorum, offset_a: usize, b: &Quorum, offset_b: usize) -> Option<u64> {
    first_discovery_masks(&mask_of(a), offset_a, &mask_of(b), offset_b)
}

fn first_discovery_masks(a: &[bool], offset_a: usize, b: &[bool], offset_b: usize) -> Option<u64> {
    let period = a.len().lcm(&b.len());
    let (mut pa, mut pb) = (
        phase_at_zero(a.len(), offset_a),
        phase_at_zero(b.len(), offset_b),
    );
    for s in 0..period {
        if a[pa] && b[pb] {
            return Some(s as u64);
        }
        pa += 1;
        if pa == a.len() {
            pa = 0;
        }
        pb += 1;
        if pb == b.len() {
            pb = 0;
        }
    }
    None
}

/// First discovery for every offset pair `(o_a, o_b) ∈ [0, n_a) × [0, n_b)`.
pub fn discovery_sweep(a: &Quorum, b: &Quorum) -> SweepOutcome {
    if a.n() == b.n() && a.n() <= 64 {
        return discovery_sweep_word(a, b);
    }
    let (ma, mb) = (mask_of(a), mask_of(b));
    let mut out = SweepOutcome {
        offset_pairs: 0,
        max_latency: None,
        undiscovered: 0,
    };
    for oa in 0..a.n() {
        for ob in 0..b.n() {
            out.offset_pairs += 1;
            match first_discovery_masks(&ma, oa, &mb, ob) {
                Some(l) => out.max_latency = Some(out.max_latency.map_or(l, |m| m.max(l))),
                None => out.undiscovered += 1,
            }
        }
    }
    out
}

/// Bit `s` of the result is set iff the schedule started at `offset` is awake at slot `s`.
fn schedule_word(q: &Quorum, offset: usize) -> u64 {
    q.slots()
        .iter()
        .fold(0u64, |w, &s| w | 1 << ((s + offset) % q.n()))
}

/// [`discovery_sweep`] for one shared cycle length `n ≤ 64`: the first slot
/// of a common cycle is the lowest set bit of the two schedules ANDed.
fn discovery_sweep_word(a: &Quorum, b: &Quorum) -> SweepOutcome {
    let n = a.n();
    let wa: Vec<u64> = (0..n).map(|o| schedule_word(a, o)).collect();
    let wb: Vec<u64> = (0..n).map(|o| schedule_word(b, o)).collect();
    let mut out = SweepOutcome {
        offset_pairs: (n * n) as u64,
        max_latency: None,
        undiscovered: 0,
    };
    for x in &wa {
        for y in &wb {
            let both = x & y;
            if both == 0 {
                out.undiscovered += 1;
            } else {
                let l = both.trailing_zeros() as u64;
                out.max_latency = Some(out.max_latency.map_or(l, |m| m.max(l)));
            }
        }
    }
    out
}

/// [`discovery_sweep`] merged over every quorum pair of two systems.
pub fn discovery_sweep_systems(a: &QuorumSystem, b: &QuorumSystem) -> SweepOutcome {
    let mut total = SweepOutcome {
        offset_pairs: 0,
        max_latency: None,
        undiscovered: 0,
    };
    for qa in a.quorums() {
        for qb in b.quorums() {
            let o = discovery_sweep(qa, qb);
            total.offset_pairs += o.offset_pairs;
            total.undiscovered += o.undiscovered;
            total.max_latency = match (total.max_latency, o.max_latency) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            };
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trials {
    /// Every quorum pair (and every offset under [`OffsetMode::Uniform`]).
    Exhaustive,
    Sampled(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OffsetMode {
    Uniform,
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub mean: Rational,
    /// Standard error of the mean; zero for exhaustive enumeration.
    pub stderr: f64,
    pub trials: u64,
}

/// Shared awake slots in one cycle between `G` started at 0 and `H` started
/// at `offset`, stepped slot by slot.
fn overlap_in_cycle(g: &[bool], h: &Quorum, offset: usize) -> u64 {
    let hs = h.awake_schedule(offset as i64, g.len());
    g.iter().zip(hs).filter(|&(&x, y)| x && y).count() as u64
}

/// Mean overlap per cycle of two quorums drawn by the access weights, the
/// second shifted by a uniform or zero offset. Under uniform offsets the
/// expectation is the rotational EQOS; under zero offsets it is the aligned one.
pub fn estimate_eqos_empirical(
    sys: &QuorumSystem,
    trials: Trials,
    offsets: OffsetMode,
    seed: u64,
) -> Result<Estimate> {
    let n = sys.n();
    let masks: Vec<Vec<bool>> = sys.quorums().iter().map(mask_of).collect();
    let offset_count = match offsets {
        OffsetMode::Uniform => n,
        OffsetMode::Zero => 1,
    };
    match trials {
        Trials::Exhaustive => {
            let mut mean = Rational::from_integer(0);
            let mut count = 0u64;
            for (g, pg) in masks.iter().zip(sys.weights()) {
                for (h, ph) in sys.quorums().iter().zip(sys.weights()) {
                    let total: u64 = (0..offset_count).map(|o| overlap_in_cycle(g, h, o)).sum();
                    count += offset_count as u64;
                    mean += pg * ph * Rational::new(total as i128, offset_count as i128);
                }
            }
            Ok(Estimate {
                mean,
                stderr: 0.0,
                trials: count,
            })
        }
        Trials::Sampled(0) => Err(Error::InvalidParameters(
            "sampled estimate needs at least one trial".into(),
        )),
        Trials::Sampled(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let weights: Vec<f64> = sys.weights().iter().map(Scalar::to_f64).collect();
            let pick =
                WeightedIndex::new(&weights).map_err(|e| Error::InvalidWeights(e.to_string()))?;
            let (mut sum, mut sum_sq) = (0u128, 0u128);
            for _ in 0..k {
                let g = pick.sample(&mut rng);
                let h = pick.sample(&mut rng);
                let o = match offsets {
                    OffsetMode::Uniform => rng.gen_range(0..n),
                    OffsetMode::Zero => 0,
                };
                let x = overlap_in_cycle(&masks[g], &sys.quorums()[h], o) as u128;
                sum += x;
                sum_sq += x * x;
            }
            let mean_f = sum as f64 / k as f64;
            let var = if k > 1 {
                (sum_sq as f64 - k as f64 * mean_f * mean_f) / (k - 1) as f64
            } else {
                0.0
            };
            Ok(Estimate {
                mean: Rational::new(sum as i128, k as i128),
                stderr: (var.max(0.0) / k as f64).sqrt(),
                trials: k,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LifetimeSummary {
    /// `None` for nodes that outlived the horizon.
    pub per_node: Vec<Option<u64>>,
    /// Earliest node death; `None` if every node survived.
    pub network: Option<u64>,
}

pub fn lifetime_summary(report: &SimReport) -> LifetimeSummary {
    let per_node: Vec<Option<u64>> = report.nodes.iter().map(|n| n.lifetime).collect();
    let network = per_node.iter().flatten().min().copied();
    LifetimeSummary { per_node, network }
}
