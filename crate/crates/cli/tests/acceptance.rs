//! Acceptance criteria, one test per criterion. Each prints a PASS/FAIL line;
//! run with `--nocapture` to see them alongside the libtest summary.

use std::process::Command;
use std::time::Instant;

use quorumlab::closure::{check_cross_closure, check_rotational_closure, min_quorum_size_check};
use quorumlab::constructions::*;
use quorumlab::metrics::formulas::*;
use quorumlab::metrics::{
    active_ratio, adaptive_deltas, eqos_aligned, eqos_rotational, eqos_unordered, qer,
};
use quorumlab::sim::{discovery_sweep_systems, estimate_eqos_empirical, OffsetMode, Trials};
use quorumlab::{Budget, Quorum, QuorumSystem, Rational, Scalar};

type Check = Result<String, String>;

fn report(id: u32, title: &str, check: impl FnOnce() -> Check) {
    let start = Instant::now();
    let outcome = check();
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("PASS criterion {id:>2} {title}: {detail} [{secs:.2}s]"),
        Err(why) => println!("FAIL criterion {id:>2} {title}: {why} [{secs:.2}s]"),
    }
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

fn r(a: i128, b: i128) -> Rational {
    Rational::new(a, b)
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every system built for the closure and simulator criteria, labelled.
fn catalog(max_n: usize, torus_cap: usize) -> Vec<(String, QuorumSystem)> {
    let mut out = Vec::new();
    let mut add = |label: String, sys: QuorumSystem| out.push((label, sys));
    for m in 2..=max_n.isqrt() {
        add(format!("grid:{}", m * m), build_grid_system(m * m).unwrap());
    }
    for t in 2..=max_n / 2 {
        for w in 2..=max_n / t {
            add(
                format!("torus:{t}x{w}"),
                build_torus_system(t, w, torus_cap, 0).unwrap(),
            );
            for k in 1..=t {
                add(
                    format!("etorus:{t}x{w}:k{k}"),
                    build_e_torus_system(t, w, k).unwrap(),
                );
            }
            add(
                format!("asgrid:{t}x{w}"),
                build_as_grid_system(t, w).unwrap(),
            );
            add(
                format!("lpsgrid:{t}x{w}"),
                build_lps_grid_system(t, w).unwrap(),
            );
        }
    }
    let budget = Budget::default();
    for n in [7, 13, 21, 31, 57].into_iter().filter(|&n| n <= max_n) {
        add(format!("fpp:{n}"), build_fpp_system(n, &budget).unwrap());
    }
    for n in 3..=max_n.min(40) {
        let k = (2..=n).find(|k| k * (k - 1) >= n - 1).unwrap();
        let set = (k..=n)
            .find_map(|k| find_difference_set(n, k, &budget).unwrap())
            .unwrap();
        add(
            format!("cyclic:{n}:{:?}", set.elements()),
            build_cyclic_system(&set).unwrap(),
        );
    }
    out
}

#[test]
fn criterion_01_as_grid_5x10_eqos() {
    report(1, "AS-Grid(5x10) EQOS", || {
        let sys = build_as_grid_system(5, 10).unwrap();
        expect(
            "eqos_aligned oracle",
            eqos_aligned::<Rational>(&sys),
            r(6, 1),
        )?;
        expect(
            "closed form",
            as_grid_eqos::<Rational>(5, 10).unwrap(),
            r(6, 1),
        )?;
        Ok("oracle = closed form = 6".into())
    });
}

#[test]
fn criterion_02_lps_grid_eqos() {
    report(2, "LPS-Grid EQOS", || {
        for (t, w, want) in [(3, 5, r(24, 9)), (4, 6, r(7, 2))] {
            let sys = build_lps_grid_system(t, w).unwrap();
            expect(
                &format!("lpsgrid:{t}x{w} oracle"),
                eqos_aligned::<Rational>(&sys),
                want,
            )?;
            expect(
                &format!("lpsgrid:{t}x{w} closed form"),
                lps_grid_eqos::<Rational>(t, w).unwrap(),
                want,
            )?;
        }
        Ok("3x5 = 24/9, 4x6 = 7/2, oracle and closed form".into())
    });
}

#[test]
fn criterion_03_adaptive_triple() {
    report(3, "AS-Grid(4xw) adaptive triple", || {
        for (w, e, a) in [
            (4, r(17, 4), r(7, 16)),
            (5, r(9, 2), r(2, 5)),
            (6, r(19, 4), r(3, 8)),
        ] {
            let sys = build_as_grid_system(4, w).unwrap();
            expect(
                &format!("4x{w} oracle eqos"),
                eqos_aligned::<Rational>(&sys),
                e,
            )?;
            expect(
                &format!("4x{w} oracle ar"),
                active_ratio::<Rational>(&sys),
                a,
            )?;
            expect(
                &format!("4x{w} closed eqos"),
                as_grid_eqos::<Rational>(4, w).unwrap(),
                e,
            )?;
            expect(
                &format!("4x{w} closed ar"),
                as_grid_active_ratio::<Rational>(4, w).unwrap(),
                a,
            )?;
        }
        expect(
            "4->5 deltas",
            adaptive_deltas::<Rational>(4, 4, 5).unwrap(),
            (r(1, 4), r(3, 80)),
        )?;
        expect(
            "5->6 deltas",
            adaptive_deltas::<Rational>(4, 5, 6).unwrap(),
            (r(1, 4), r(1, 40)),
        )?;
        Ok("(4.25, 0.4375) (4.5, 0.4) (4.75, 0.375); deltas (0.25, 0.0375) (0.25, 0.025)".into())
    });
}

#[test]
fn criterion_04_oracle_equals_formula_grids() {
    report(4, "oracle = closed form grids", || {
        let start = Instant::now();
        let mut as_cases = 0;
        for t in 2..=8 {
            for w in 2..=16 {
                let sys = build_as_grid_system(t, w).unwrap();
                expect(
                    &format!("asgrid:{t}x{w}"),
                    eqos_aligned::<Rational>(&sys),
                    as_grid_eqos(t, w).unwrap(),
                )?;
                as_cases += 1;
            }
        }
        let mut lps_cases = 0;
        for t in [3, 4] {
            for w in t..=16 {
                let sys = build_lps_grid_system(t, w).unwrap();
                expect(
                    &format!("lpsgrid:{t}x{w}"),
                    eqos_aligned::<Rational>(&sys),
                    lps_grid_eqos(t, w).unwrap(),
                )?;
                lps_cases += 1;
            }
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 10.0, || format!("took {secs:.1}s"))?;
        Ok(format!("{as_cases} AS-Grid cases (w in [2,16], covering w in [t,16]), {lps_cases} LPS-Grid cases"))
    });
}

#[test]
fn criterion_05_table_rows() {
    report(5, "comparison table rows", || {
        for m in 2..=8i128 {
            let n = (m * m) as usize;
            let sys = build_grid_system(n).unwrap();
            let rot: Rational = eqos_rotational(&sys);
            expect(
                &format!("grid:{n} rotational"),
                rot,
                r((2 * m - 1).pow(2), m * m),
            )?;
            expect(
                &format!("grid:{n} aligned"),
                eqos_aligned::<Rational>(&sys),
                rot,
            )?;
            let q = qer(rot, active_ratio::<Rational>(&sys)).unwrap();
            expect(&format!("grid:{n} qer"), q, r(2 * m - 1, 1))?;
            expect(
                &format!("grid:{n} closed qer"),
                grid_qer::<Rational>(n).unwrap(),
                q,
            )?;
        }
        for t in 2..=4 {
            let sys = build_torus_system(t, 2 * t, 512, 0).unwrap();
            expect(
                &format!("torus:{t}x{}", 2 * t),
                eqos_rotational::<Rational>(&sys),
                r(2, 1),
            )?;
            expect(
                "torus closed form",
                torus_eqos::<Rational>(t, 2 * t).unwrap(),
                r(2, 1),
            )?;
        }
        let budget = Budget::default();
        for n in [7usize, 13, 31] {
            let s = fpp_order(n).unwrap();
            let want = r((2 * s + n - 1) as i128, (n + 1) as i128);
            let singer = find_difference_set(n, s, &budget).unwrap().unwrap();
            expect(&format!("n={n} planar"), singer.is_planar(), true)?;
            let cyc = build_cyclic_system(&singer).unwrap();
            expect(
                &format!("cyclic n={n}"),
                eqos_unordered::<Rational>(&cyc).unwrap(),
                want,
            )?;
            let fpp = build_fpp_system(n, &budget).unwrap();
            expect(
                &format!("fpp n={n}"),
                eqos_unordered::<Rational>(&fpp).unwrap(),
                want,
            )?;
            expect(
                &format!("closed n={n}"),
                cyclic_eqos::<Rational>(n, s, 1).unwrap(),
                want,
            )?;
        }
        Ok("grid n in {4..64}, torus t in {2,3,4}, cyclic/FPP n in {7,13,31}".into())
    });
}

#[test]
fn criterion_06_grid_asymptote() {
    report(6, "grid EQOS asymptote", || {
        let at = grid_eqos::<Rational>(1_000_000).unwrap();
        ensure(at > r(399, 100) && at < r(4, 1), || {
            format!("EQOS at 10^6 = {at}")
        })?;
        let mut prev = r(0, 1);
        for m in 2..=1000usize {
            let e: Rational = grid_eqos(m * m).unwrap();
            ensure(e > prev, || format!("not increasing at n = {}", m * m))?;
            prev = e;
        }
        Ok(format!(
            "EQOS(10^6) = {} ≈ {:.6}, increasing over n = m², m in [2,1000]",
            at,
            at.to_f64()
        ))
    });
}

#[test]
fn criterion_07_and_08_closure_exhaustion() {
    let start = Instant::now();
    let systems = catalog(64, 512);
    let budget = Budget::default();
    let mut failures = Vec::new();
    let mut small = Vec::new();
    for (label, sys) in &systems {
        if !check_rotational_closure(sys, &budget).unwrap().passed() {
            failures.push(label.clone());
        } else if !min_quorum_size_check(sys) {
            small.push(label.clone());
        }
    }

    let mut cross = 0;
    let mut cross_fail = Vec::new();
    for t in 2..=6usize {
        for w1 in 2..=12usize {
            for w2 in w1 + 1..=12 {
                let (n1, n2) = (t * w1, t * w2);
                if num_lcm(n1, n2) > 10_000 {
                    continue;
                }
                let pairs = [
                    (
                        "asgrid",
                        build_as_grid_system(t, w1).unwrap(),
                        build_as_grid_system(t, w2).unwrap(),
                    ),
                    (
                        "lpsgrid",
                        build_lps_grid_system(t, w1).unwrap(),
                        build_lps_grid_system(t, w2).unwrap(),
                    ),
                ];
                for (kind, a, b) in &pairs {
                    cross += 1;
                    if !check_cross_closure(a, b, &budget).unwrap().passed() {
                        cross_fail.push(format!("{kind}:{t}x{w1} vs {kind}:{t}x{w2}"));
                    }
                }
            }
        }
    }

    let single = QuorumSystem::uniform(2, vec![Quorum::new(2, [0]).unwrap()]).unwrap();
    let witness = check_cross_closure(&single, &single, &budget)
        .unwrap()
        .witness();
    let secs = start.elapsed().as_secs_f64();

    report(7, "closure exhaustion", || {
        ensure(failures.is_empty(), || {
            format!("rotational closure fails for {failures:?}")
        })?;
        ensure(cross_fail.is_empty(), || {
            format!("cross closure fails for {cross_fail:?}")
        })?;
        let w = witness.ok_or("{{0}} vs shifted {{0}} passed")?;
        expect("counterexample offset", w.offset, 1)?;
        ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
        Ok(format!(
            "{} systems with n ≤ 64 closed, {cross} same-t cross pairs (t ≤ 6, w ≤ 12) closed, counterexample witness δ = 1, {secs:.1}s total",
            systems.len()
        ))
    });
    report(8, "quorum size lower bound", || {
        ensure(small.is_empty(), || {
            format!("quorums below ⌈√n⌉ in {small:?}")
        })?;
        Ok(format!(
            "{} closure-passing systems, every quorum has ≥ ⌈√n⌉ slots",
            systems.len() - failures.len()
        ))
    });
}

fn num_lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

#[test]
fn criterion_09_simulator_guarantees() {
    report(9, "simulator guarantees", || {
        let budget = Budget::default();
        let systems = catalog(36, 64);
        let mut checked = 0;
        for (label, sys) in &systems {
            if !check_rotational_closure(sys, &budget).unwrap().passed() {
                continue;
            }
            let sweep = discovery_sweep_systems(sys, sys);
            expect(&format!("{label} undiscovered"), sweep.undiscovered, 0)?;
            let worst = sweep.max_latency.unwrap();
            ensure((worst as usize) < sys.n(), || {
                format!("{label}: latency {worst} ≥ n = {}", sys.n())
            })?;
            let est =
                estimate_eqos_empirical(sys, Trials::Exhaustive, OffsetMode::Uniform, 0).unwrap();
            expect(
                &format!("{label} empirical eqos"),
                est.mean,
                eqos_rotational(sys),
            )?;
            checked += 1;
        }
        let lps = build_lps_grid_system(3, 5).unwrap();
        let est =
            estimate_eqos_empirical(&lps, Trials::Sampled(100_000), OffsetMode::Uniform, 2024)
                .unwrap();
        let rel = (est.mean.to_f64() - 2.4).abs() / 2.4;
        ensure(rel < 0.02, || {
            format!(
                "sampled estimate {} off by {:.2}%",
                est.mean.to_f64(),
                rel * 100.0
            )
        })?;
        Ok(format!(
            "{checked} systems with n ≤ 36 discover under every offset pair within n slots; empirical = rotational; \
             sampled lpsgrid:3x5 = {:.4} ({:.2}% from 2.4)",
            est.mean.to_f64(),
            rel * 100.0
        ))
    });
}

#[test]
fn criterion_10_qer_comparison() {
    report(10, "LPS-Grid vs grid QER", || {
        let mut seen = Vec::new();
        for m in [4usize, 6, 8] {
            let n = m * m;
            let grid = build_grid_system(n).unwrap();
            let grid_qer = qer(eqos_rotational::<Rational>(&grid), active_ratio(&grid)).unwrap();
            for (t, w) in [(m, m), (4, n / 4)] {
                let lps = build_lps_grid_system(t, w).unwrap();
                let lps_qer = qer(eqos_aligned::<Rational>(&lps), active_ratio(&lps)).unwrap();
                ensure(lps_qer > grid_qer, || {
                    format!("lpsgrid:{t}x{w} qer {lps_qer} ≤ grid:{n} qer {grid_qer}")
                })?;
                seen.push(format!("lpsgrid:{t}x{w} {lps_qer} > {grid_qer}"));
            }
        }
        seen.dedup();
        Ok(format!(
            "aligned LPS vs rotational grid: {}",
            seen.join(", ")
        ))
    });
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quorumlab"))
}

fn run_twice(args: &[&str]) -> Result<Vec<u8>, String> {
    let a = bin().args(args).output().map_err(|e| e.to_string())?;
    let b = bin().args(args).output().map_err(|e| e.to_string())?;
    ensure(a.status.code() == b.status.code(), || {
        format!("{args:?}: exit codes differ")
    })?;
    ensure(a.stdout == b.stdout && a.stderr == b.stderr, || {
        format!("{args:?}: outputs differ")
    })?;
    Ok(a.stdout)
}

#[test]
fn criterion_11_determinism() {
    report(11, "determinism", || {
        let dir = std::env::temp_dir().join(format!("quorumlab-accept-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let nodes: Vec<String> = (0..20)
            .map(|i| {
                format!(
                    r#"{{"system":"asgrid:3x{}","quorum":"random","offset":"random","initial_energy":{}}}"#,
                    3 + i % 4,
                    60 + 5 * i
                )
            })
            .collect();
        let config = format!(
            r#"{{"nodes":[{}],"horizon":3000,"seed":99,
                "adaptive":{{"t":3,"w_base":3,"k_step":15,"full_energy":160}}}}"#,
            nodes.join(",")
        );
        let cfg_path = dir.join("adaptive.json");
        std::fs::write(&cfg_path, config).unwrap();
        let cfg = cfg_path.to_str().unwrap();

        let commands: Vec<Vec<&str>> = vec![
            vec!["build", "torus:4x8", "--seed", "5", "--format", "json"],
            vec!["verify", "asgrid:3x3", "asgrid:3x8"],
            vec!["metrics", "lpsgrid:4x6", "--format", "json"],
            vec![
                "sweep",
                "--protocols",
                "grid,torus,cyclic,fpp,asgrid,lpsgrid",
                "--n-max",
                "64",
                "--seed",
                "3",
            ],
            vec!["simulate", cfg, "--format", "json"],
        ];
        for args in &commands {
            run_twice(args)?;
        }
        let mut files = Vec::new();
        for run in ["a", "b"] {
            let out = dir.join(run);
            run_twice(&["simulate", cfg, "--out", out.to_str().unwrap()])?;
            let read = |f: &str| std::fs::read(out.join(f)).unwrap();
            files.push((read("report.json"), read("pairs.csv"), read("nodes.csv")));
        }
        ensure(files[0] == files[1], || {
            "simulate output files differ between runs".into()
        })?;
        let resized = String::from_utf8(files[0].0.clone())
            .unwrap()
            .contains("\"new_w\"");
        ensure(resized, || "adaptive run recorded no resize events".into())?;
        std::fs::remove_dir_all(&dir).ok();
        Ok(format!(
            "{} commands byte-identical across reruns, incl. a 20-node adaptive simulation",
            commands.len() + 1
        ))
    });
}
