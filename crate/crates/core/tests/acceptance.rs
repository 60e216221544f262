//! Acceptance suite: one PASS/FAIL line per primary criterion.
//!
//!     cargo test --test acceptance

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use embodied_safety::actions::{apply_action, EpisodeConfig, FailureCode, Verb};
use embodied_safety::agents::{AgentConfig, ReplayAgent};
use embodied_safety::harness::{aggregate, mean_std, run_episode, run_suite, Episode, RunConfig};
use embodied_safety::scenarios::{plan_oracle, Setting};
use embodied_safety::world::Affordances;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn oracle_soundness() -> Outcome {
    let t = Instant::now();
    let s = suite();
    for x in &s.scenarios {
        let cfg = x.episode_config();
        let plan = plan_oracle(x, &cfg).map_err(|e| format!("{}: {e}", x.id))?;
        let r = run_episode(x, &mut ReplayAgent::new(plan), &cfg, Setting::Explicit, 0).map_err(|e| e.to_string())?;
        ensure!(r.csr == 1 && r.gsr == 100.0, "{}: CSR {} GSR {}", x.id, r.csr, r.gsr);
    }
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(300), "took {took:?}");
    Ok(format!("{} scenarios, CSR 1 and GSR 100 each, {:.1}s", s.scenarios.len(), took.as_secs_f64()))
}

fn monitor_equivalence() -> Outcome {
    let mut total = 0;
    let mut with_violations = 0;
    for (name, spec, step, state) in monitor_scenes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..1000u64 {
            let cfg = random_cfg(&mut rng, 30);
            let trace = random_trace(&spec, cfg, (seed % 35) as usize, seed);
            let (online, offline) = online_vs_offline(&spec, &step, &state, &trace, cfg);
            ensure!(online == offline, "{name} seed {seed}: online {online:?} offline {offline:?}");
            total += 1;
            with_violations += usize::from(!online.is_empty());
        }
    }
    let (spec, step, state) = {
        let (_, a, b, c) = monitor_scenes().remove(0);
        (a, b, c)
    };
    for offset in 1..=4u32 {
        let (online, offline) = online_vs_offline(&spec, &step, &state, &faucet_offset_trace(offset), EpisodeConfig::default());
        ensure!(online == offline, "faucet offset {offset} disagrees");
        ensure!(online.is_empty() == (offset <= 3), "faucet offset {offset}: {online:?}");
    }
    ensure!(with_violations > total / 10, "only {with_violations} of {total} traces violate anything");
    Ok(format!("{total} traces agree ({with_violations} with violations); faucet offset 3 ok, 4 violated"))
}

fn gating() -> Outcome {
    let scenes = exploration_scenes();
    let mut lifted_obs = 0;
    let mut lifted_hand = 0;
    let mut checked = 0;
    for i in 0..200u64 {
        let spec = &scenes[i as usize % scenes.len()];
        for (fo, ipc) in [(false, false), (true, true)] {
            let cfg = EpisodeConfig { full_observability: fo, ignore_physical_constraints: ipc, max_steps: 1000 };
            let walk = random_walk(spec, cfg, (i % 40) as usize, i);
            let scene = walk.world.scene().clone();
            let holding = walk.world.holding();
            for a in candidates(&walk.world) {
                let mut w = walk.world.clone();
                let mut m = walk.mem.clone();
                let out = apply_action(&mut w, &mut m, &cfg, &a);
                checked += 1;
                let x = scene.lookup(a.target.as_str()).unwrap();
                let unobserved = !walk.mem.is_observed(x)
                    || a.secondary.as_ref().is_some_and(|r| !walk.mem.is_observed(scene.lookup(r.as_str()).unwrap()));
                let hand_bound = holding.is_some() && needs_empty_hand(a.verb);
                let knifeless_slice = a.verb == Verb::Slice && !holding.is_some_and(|h| scene.affords(h, Affordances::SHARP));
                if !fo {
                    ensure!(!(out.success && unobserved), "PO: `{a}` succeeded on an unobserved object");
                    ensure!(!(out.success && hand_bound), "PC: `{a}` succeeded while holding");
                    ensure!(!(out.success && knifeless_slice), "PC: `{a}` succeeded without a knife");
                } else {
                    ensure!(out.failure_code != Some(FailureCode::NotObserved), "FO: `{a}` refused as unobserved");
                    ensure!(
                        out.failure_code != Some(FailureCode::HandOccupied) || a.verb == Verb::PickUp,
                        "IPC: `{a}` refused for a full hand"
                    );
                    lifted_obs += usize::from(out.success && unobserved);
                    lifted_hand += usize::from(out.success && (hand_bound && a.verb != Verb::PickUp || knifeless_slice));
                }
            }
        }
    }
    ensure!(lifted_obs > 0 && lifted_hand > 0, "FO/IPC never exercised (obs {lifted_obs}, hand {lifted_hand})");
    Ok(format!(
        "{checked} actions on 400 random states; under FO/IPC {lifted_obs} unobserved and {lifted_hand} hand-bound actions succeeded"
    ))
}

fn ablation_direction() -> Outcome {
    let t = Instant::now();
    let s = suite();
    let mut fo_gain = std::collections::BTreeSet::new();
    let mut ipc_gain = std::collections::BTreeSet::new();
    for x in s.safety() {
        let base = x.episode_config();
        let len = |cfg: EpisodeConfig| plan_oracle(x, &cfg).map(|p| p.len()).map_err(|e| format!("{}: {e}", x.id));
        let (po, fo, ipc) = (len(base)?, len(base.fo())?, len(base.ipc())?);
        ensure!(fo <= po && ipc <= po, "{}: PO {po} FO {fo} IPC {ipc}", x.id);
        if fo < po {
            fo_gain.insert(x.hazard);
        }
        if ipc < po {
            ipc_gain.insert(x.hazard);
        }
    }
    let took = t.elapsed();
    ensure!(fo_gain.len() == 5 && ipc_gain.len() == 5, "strict gains: FO {fo_gain:?} IPC {ipc_gain:?}");
    ensure!(took < Duration::from_secs(600), "took {took:?}");
    Ok(format!("FO <= PO and IPC <= PC on all safety tasks, strict in every hazard, {:.1}s", took.as_secs_f64()))
}

fn metric_arithmetic() -> Outcome {
    let m = mean_std(&[20.0, 24.0, 28.0]);
    ensure!(m.to_string() == "24.00 ± 3.27", "got {m}");
    let cfg = RunConfig { agent: AgentConfig::Random, runs: 3, base_seed: 3, ..RunConfig::default() };
    let (report, records) = run_suite(&suite(), &cfg, None);
    ensure!(report.csr.mean <= report.gsr.mean, "CSR {} > GSR {}", report.csr, report.gsr);
    for r in &report.runs {
        ensure!(r.csr <= r.gsr, "run {}: CSR {} > GSR {}", r.run, r.csr, r.gsr);
    }
    let again = aggregate(&records, report.config.clone(), &report.suite_hash, false);
    ensure!(again == report, "re-aggregation differs");
    let oracle = run_suite(&suite(), &RunConfig { runs: 1, ..RunConfig::default() }, None).0;
    ensure!(oracle.csr.mean == 100.0 && oracle.gsr.mean == 100.0, "oracle CSR {} GSR {}", oracle.csr, oracle.gsr);
    Ok(format!("24.00 ± 3.27; random agent CSR {} <= GSR {}", report.csr, report.gsr))
}

fn csr_definition() -> Outcome {
    let s = suite();
    let mut checked = 0;
    for x in s.safety().filter(|x| !x.step_constraints.is_empty()) {
        let cfg = x.episode_config();
        let plan = plan_oracle(x, &cfg).map_err(|e| e.to_string())?;
        let c = &x.step_constraints[0];
        let scene = x.build().map_err(|e| e.to_string())?.scene().clone();
        let named = |id: &str| (id.to_string(), scene.kind(scene.lookup(id).unwrap()).kind_name.clone());
        let trigger = plan.iter().position(|a| {
            let (t, tk) = named(a.target.as_str());
            let sec = a.secondary.as_ref().map(|r| named(r.as_str()));
            c.trigger.matches_names(a.verb, (&t, &tk), sec.as_ref().map(|(r, rk)| (r.as_str(), rk.as_str())))
        });
        let Some(trigger) = trigger else { continue };
        for inject in [false, true] {
            let mut ep = Episode::new(x, cfg, 0).map_err(|e| e.to_string())?;
            for (i, a) in plan.iter().enumerate() {
                ep.step(a, None);
                if inject && i == trigger {
                    for _ in 0..=c.window {
                        ep.burn("wait", "idle", None);
                    }
                }
            }
            let r = ep.finish();
            ensure!(r.gsr == 100.0, "{}: GSR {} with inject={inject}", x.id, r.gsr);
            let want = u8::from(!inject);
            ensure!(r.csr == want, "{}: CSR {} with inject={inject}, violations {:?}", x.id, r.csr, r.violations);
            ensure!(r.violations.is_empty() == !inject, "{}: violations {:?}", x.id, r.violations);
        }
        // Goals unmet and nothing violated still scores zero.
        let mut ep = Episode::new(x, cfg, 0).map_err(|e| e.to_string())?;
        ep.step(&plan[0], None);
        let r = ep.finish();
        ensure!(r.csr == 0 && r.violations.is_empty(), "{}: truncated plan CSR {}", x.id, r.csr);
        checked += 1;
    }
    ensure!(checked >= 5, "only {checked} scenarios had a usable step constraint");
    Ok(format!("{checked} scenarios: delayed response gives CSR 0 with GSR 100, clean plan gives CSR 1"))
}

fn determinism() -> Outcome {
    let s = suite();
    let run = |parallel| {
        let cfg = RunConfig { agent: AgentConfig::Random, runs: 3, base_seed: 42, parallel, ..RunConfig::default() };
        let (report, records) = run_suite(&s, &cfg, None);
        (serde_json::to_string(&report).unwrap(), serde_json::to_string(&records).unwrap())
    };
    let a = run(1);
    ensure!(a == run(1), "same seed, different output");
    ensure!(a == run(4), "worker count changes the output");
    let other = RunConfig { agent: AgentConfig::Random, runs: 3, base_seed: 43, ..RunConfig::default() };
    ensure!(serde_json::to_string(&run_suite(&s, &other, None).1).unwrap() != a.1, "seed has no effect");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (name, parallel) in [("a", "1"), ("b", "4")] {
        let out = dir.path().join(name);
        let o = std::process::Command::new(env!("CARGO_BIN_EXE_embodied-safety"))
            .args(["run", "--agent", "random", "--seed", "42", "--runs", "3", "--parallel", parallel])
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(o.status.success(), "run exited with {}", o.status);
        let read = |f: &str| std::fs::read(out.join(f)).map_err(|e| e.to_string());
        outputs.push((read("episodes.jsonl")?, read("summary.json")?));
    }
    ensure!(outputs[0] == outputs[1], "two CLI invocations differ");
    Ok("random agent, 3 runs x 50 scenarios: identical across repeats, 1 vs 4 workers, and two CLI runs".into())
}

fn hermetic_llm() -> Outcome {
    let (transcript, r) = llm_transcript();
    ensure!(r.csr == 1 && r.gsr == 100.0, "CSR {} GSR {}", r.csr, r.gsr);
    check_golden("llm_transcript.json", &transcript)?;
    let n = transcript["requests"].as_array().map_or(0, Vec::len);
    Ok(format!("stub endpoint, {n} requests (one 503, one prose reply), transcript matches golden"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle soundness", oracle_soundness),
        ("monitor equivalence", monitor_equivalence),
        ("PO/PC gating", gating),
        ("ablation direction", ablation_direction),
        ("metric arithmetic", metric_arithmetic),
        ("CSR definition", csr_definition),
        ("determinism", determinism),
        ("hermetic LLM path", hermetic_llm),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
