//! Benchmark acceptance suite. Runs every criterion at full size and prints
//! one PASS/FAIL line each; exits non-zero when any criterion fails.
//!
//! Runtime is dominated by the WBC and MountainCar experiments (about half
//! an hour on one core). `XCSER_ACCEPT=P1,P7` restricts the run.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use xcser_core::env::{make_env, multiplexer_answer, EnvData};
use xcser_core::evolution::{delete_one, deletion_vote, mean_fitness};
use xcser_core::harness::{run_repetition, run_summaries, ExperimentConfig, ExperimentSummary};
use xcser_core::learning::{accuracy, rls_update};
use xcser_core::matching::PredictionArray;
use xcser_core::stats::{compare, paired_t_one_sided, shapiro_wilk, wilcoxon_signed_rank, Alternative};
use xcser_core::*;

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Check);

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn experiment(preset: &str, mode: Mode, tele: bool, reps: usize, steps: Option<u64>) -> Result<ExperimentSummary, String> {
    let mut cfg = ExperimentConfig::preset(preset).map_err(|e| e.to_string())?;
    cfg.resolve_paths(&data_dir());
    cfg.mode = mode;
    cfg.env.teletransport = tele;
    cfg.repetitions = reps;
    if let Some(s) = steps {
        cfg.hp.max_learning_steps = s;
    }
    let data = EnvData::load(&cfg.env).map_err(|e| e.to_string())?;
    let t0 = Instant::now();
    let runs = run_summaries(&cfg, &data, jobs()).map_err(|e| e.to_string())?;
    let s = ExperimentSummary::new(&cfg, runs);
    eprintln!(
        "  {preset} {mode} teletransport={tele}: {} reps in {:.0?}",
        reps,
        t0.elapsed()
    );
    if s.corrupt_runs > 0 {
        return Err(format!("{preset} {mode}: {} corrupt runs", s.corrupt_runs));
    }
    Ok(s)
}

fn mean(s: &ExperimentSummary, metric: &str) -> f64 {
    s.aggregate[metric].mean
}

fn sd(s: &ExperimentSummary, metric: &str) -> f64 {
    s.aggregate[metric].sd
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

/// Collects failed sub-conditions into one verdict.
struct Verdict {
    detail: Vec<String>,
    failed: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self { detail: Vec::new(), failed: Vec::new() }
    }

    fn note(&mut self, s: String) {
        self.detail.push(s);
    }

    fn require(&mut self, ok: bool, what: &str) {
        if !ok {
            self.failed.push(what.to_string());
        }
    }

    fn finish(self) -> Check {
        let detail = self.detail.join("; ");
        if self.failed.is_empty() {
            Ok(detail)
        } else {
            Err(format!("{detail} | failed: {}", self.failed.join(", ")))
        }
    }
}

fn p1() -> Check {
    let xcs = experiment("rmp6", Mode::Standard, false, 30, None)?;
    let er = experiment("rmp6", Mode::Er, false, 30, None)?;
    let row = compare(&xcs.values("reward").unwrap(), &er.values("reward").unwrap(), "reward").map_err(|e| e.to_string())?;
    let mut v = Verdict::new();
    v.note(format!(
        "reward XCS {:.2}±{:.2} ER {:.2}±{:.2} {}{} ({:?} p={:.2e})",
        mean(&xcs, "reward"),
        sd(&xcs, "reward"),
        mean(&er, "reward"),
        sd(&er, "reward"),
        row.arrow(),
        row.stars,
        row.test,
        row.p.unwrap_or(f64::NAN)
    ));
    v.note(format!("macro XCS {:.1} ER {:.1}", mean(&xcs, "macro"), mean(&er, "macro")));
    v.require(row.stars == "**" && row.arrow() == "↑", "ER reward above XCS at **");
    v.require(within(mean(&xcs, "reward"), 926.0, 30.0), "XCS reward within 926±30");
    v.require(within(mean(&er, "reward"), 958.0, 30.0), "ER reward within 958±30");
    v.require(mean(&er, "macro") < mean(&xcs, "macro"), "ER macro count below XCS");
    v.finish()
}

fn p2() -> Check {
    let xcs = experiment("wbc", Mode::Standard, false, 30, None)?;
    let er = experiment("wbc", Mode::Er, false, 30, None)?;
    let row = compare(&xcs.values("sys_err").unwrap(), &er.values("sys_err").unwrap(), "sys_err").map_err(|e| e.to_string())?;
    let mut v = Verdict::new();
    v.note(format!(
        "sys_err XCS {:.2}±{:.2} ER {:.2}±{:.2} {}{} ({:?})",
        mean(&xcs, "sys_err"),
        sd(&xcs, "sys_err"),
        mean(&er, "sys_err"),
        sd(&er, "sys_err"),
        row.arrow(),
        row.stars,
        row.test
    ));
    v.note(format!("reward XCS {:.2} ER {:.2}", mean(&xcs, "reward"), mean(&er, "reward")));
    v.require(row.significant() && row.arrow() == "↓", "ER system error below XCS with significance");
    v.require(within(mean(&xcs, "sys_err"), 24.01, 5.0), "XCS system error within 24.01±5");
    v.require(within(mean(&er, "sys_err"), 15.83, 5.0), "ER system error within 15.83±5");
    v.require(mean(&er, "reward") <= mean(&xcs, "reward") + 2.0, "ER reward at most XCS + 2");
    v.finish()
}

fn p3() -> Check {
    let xcs = experiment("mario", Mode::Standard, false, 10, Some(30_000))?;
    let er = experiment("mario", Mode::Er, false, 10, Some(30_000))?;
    let gain = mean(&er, "reward") - mean(&xcs, "reward");
    let mut v = Verdict::new();
    v.note(format!(
        "30k steps, 10 reps: reward XCS {:.2}±{:.2} ER {:.2}±{:.2}, gain {gain:.2}",
        mean(&xcs, "reward"),
        sd(&xcs, "reward"),
        mean(&er, "reward"),
        sd(&er, "reward")
    ));
    v.require(gain >= 20.0, "ER reward gain of at least 20");
    v.finish()
}

fn divergences(s: &ExperimentSummary) -> usize {
    s.divergences.expect("multi-step task")
}

fn p4() -> Check {
    let tele = experiment("16chain", Mode::Er, true, 30, None)?;
    let plain = experiment("16chain", Mode::Er, false, 30, None)?;
    let mut v = Verdict::new();
    v.note(format!(
        "ER+T div {} (OTM {:.1}±{:.1}); ER div {} (OTM {:.1}±{:.1})",
        divergences(&tele),
        mean(&tele, "otm"),
        sd(&tele, "otm"),
        divergences(&plain),
        mean(&plain, "otm"),
        sd(&plain, "otm")
    ));
    v.require(divergences(&tele) == 0, "no divergence with teletransportation");
    v.require(divergences(&plain) >= 3, "at least 3 divergences without teletransportation");
    v.finish()
}

fn p5() -> Check {
    let xcs = experiment("mountaincar", Mode::Standard, false, 30, None)?;
    let er = experiment("mountaincar", Mode::Er, false, 30, None)?;
    let tele = experiment("mountaincar", Mode::Er, true, 30, None)?;
    let mut v = Verdict::new();
    v.note(format!(
        "div XCS {} ER {} ER+T {}; ER+T OTM {:.1}±{:.1}",
        divergences(&xcs),
        divergences(&er),
        divergences(&tele),
        mean(&tele, "otm"),
        sd(&tele, "otm")
    ));
    v.require(divergences(&xcs) >= 20, "XCS diverges in at least 20 runs");
    v.require(divergences(&er) >= 20, "ER diverges in at least 20 runs");
    v.require(divergences(&tele) <= 3, "ER+T diverges in at most 3 runs");
    v.require(mean(&tele, "otm") > 300.0, "ER+T OTM above 300");
    v.finish()
}

fn rmp6_agent(mode: Mode, seed: u64) -> (Agent, Box<dyn Environment>) {
    let cfg = ExperimentConfig::preset("rmp6").unwrap();
    let env = make_env(&cfg.env, &EnvData::default(), seed).unwrap();
    let agent = Agent::new(mode, cfg.hp.clone(), env.spec(), seed).unwrap();
    (agent, env)
}

fn p6() -> Check {
    let mut v = Verdict::new();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut fifo_ok = true;
    for _ in 0..500 {
        let cap = rng.random_range(1..64);
        let pushes = rng.random_range(0..256);
        let mut rm = ReplayMemory::new(cap);
        for i in 0..pushes {
            rm.push(Experience::single_step(vec![0.0], 0, i as f64));
            fifo_ok &= rm.len() == (i + 1).min(cap);
        }
        let kept: Vec<f64> = rm.iter().map(|e| e.reward).collect();
        let expected: Vec<f64> = (pushes.saturating_sub(cap)..pushes).map(|i| i as f64).collect();
        fifo_ok &= kept == expected;
    }
    v.note(format!("FIFO {}", if fifo_ok { "ok" } else { "broken" }));
    v.require(fifo_ok, "FIFO capacity and order");

    let (mut agent, mut env) = rmp6_agent(Mode::Er, 1);
    for _ in 0..agent.hyperparameters().warmup_steps {
        agent.step(&mut env).unwrap();
    }
    let frozen = agent.counters().updates == 0
        && agent.population().iter().all(|(_, c)| c.experience == 0);
    agent.step(&mut env).unwrap();
    let thawed = agent.counters().updates > 0;
    v.note(format!("warm-up frozen {frozen}, learning after {thawed}"));
    v.require(frozen && thawed, "warm-up freeze");

    let mut counts = Vec::new();
    for seed in 1..=5 {
        let mut pair = [0u64; 2];
        for (i, mode) in [Mode::Standard, Mode::Er].into_iter().enumerate() {
            let (mut agent, mut env) = rmp6_agent(mode, seed);
            for _ in 0..5000 {
                agent.step(&mut env).unwrap();
            }
            pair[i] = agent.counters().ga_invocations;
        }
        counts.push(pair);
    }
    v.note(format!("GA invocations (XCS, ER) over 5000 steps: {counts:?}"));
    v.require(counts.iter().all(|[x, e]| e > x), "more GA invocations under ER");
    v.finish()
}

fn fixtures() -> Value {
    serde_json::from_str(include_str!("fixtures/stats.json")).unwrap()
}

fn values(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn p7() -> Check {
    let mut v = Verdict::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut mux_ok = true;
    for _ in 0..100_000 {
        let bits: Vec<usize> = (0..6).map(|_| rng.random_range(0..2)).collect();
        let state: Vec<f64> = bits.iter().map(|&b| if b == 1 { 0.75 } else { 0.25 }).collect();
        mux_ok &= multiplexer_answer(&state, 2) == bits[2 + 2 * bits[0] + bits[1]];
    }
    v.require(mux_ok, "multiplexer oracle");

    let hp = Hyperparameters::default();
    let mut pa_err: f64 = 0.0;
    for _ in 0..500 {
        let mut pop = Population::new(1, 1000);
        let mut sums = [(0.0, 0.0); 2];
        for _ in 0..rng.random_range(1..20) {
            let a = rng.random_range(0..2);
            let (p, f) = (rng.random::<f64>() * 1000.0, rng.random::<f64>() + 1e-3);
            let mut cl = Classifier::new(Condition::full(1), a, 0, &hp);
            cl.prediction = Prediction::Scalar(p);
            cl.fitness = f;
            pop.insert(cl).unwrap();
            sums[a].0 += p * f;
            sums[a].1 += f;
        }
        let m = pop.matching(&[0.5]).unwrap();
        let pa = PredictionArray::new(&pop, &m, &[0.5], 1.0, 2);
        for (a, (num, den)) in sums.iter().enumerate() {
            if let Some(x) = pa.get(a) {
                pa_err = pa_err.max((x - num / den).abs());
            }
        }
    }
    v.note(format!("PA max error {pa_err:.1e}"));
    v.require(pa_err <= 1e-10, "PA weighted mean");

    let rls_hp = Hyperparameters { delta_rls: 100.0, lambda_rls: 1.0, ..Default::default() };
    let mut model = LinearModel::new(2, 10.0, 100.0);
    let w0 = DVector::from_column_slice(&model.weights);
    let mut a = DMatrix::<f64>::identity(3, 3) / 100.0;
    let mut b = &a * &w0;
    let mut rls_err: f64 = 0.0;
    for _ in 0..100 {
        let s = [rng.random::<f64>(), rng.random::<f64>()];
        let y = 5.0 + 3.0 * s[0] - 4.0 * s[1] + rng.random::<f64>();
        rls_update(&mut model, &s, y, &rls_hp);
        let x = DVector::from_column_slice(&[1.0, s[0], s[1]]);
        a += &x * x.transpose();
        b += x * y;
        let w = a.clone().lu().solve(&b).unwrap();
        for (p, q) in model.weights.iter().zip(w.iter()) {
            rls_err = rls_err.max((p - q).abs());
        }
    }
    v.note(format!("RLS max error {rls_err:.1e}"));
    v.require(rls_err <= 1e-8, "RLS normal equations");

    let acc_hp = Hyperparameters { epsilon0: 10.0, alpha: 0.1, nu: 5.0, ..Default::default() };
    let spots = [accuracy(5.0, &acc_hp), accuracy(10.0, &acc_hp), accuracy(20.0, &acc_hp)];
    v.note(format!("accuracy spots {spots:?}"));
    v.require(spots[0] == 1.0 && (spots[1] - 0.1).abs() < 1e-15 && (spots[2] - 0.003125).abs() < 1e-15, "accuracy spot values");

    let del_hp = Hyperparameters { theta_del: 20, ..Default::default() };
    let build = || {
        let mut pop = Population::new(1, 1000);
        for (i, &(n, s, f, e)) in [(1u32, 10.0, 0.5, 100u64), (3, 5.0, 0.9, 100), (2, 20.0, 0.01, 100), (4, 2.0, 0.4, 0)].iter().enumerate() {
            let mut cl = Classifier::new(Condition::new(vec![Interval::new(0.0, 0.1 * (i + 1) as f64)]), 0, 0, &del_hp);
            cl.numerosity = n;
            cl.action_set_size = s;
            cl.fitness = f;
            cl.experience = e;
            pop.insert(cl).unwrap();
        }
        pop
    };
    let pop = build();
    let ids = pop.ids();
    let mf = mean_fitness(&pop);
    let votes: Vec<f64> = ids.iter().map(|id| deletion_vote(pop.get(*id).unwrap(), mf, &del_hp)).collect();
    let total: f64 = votes.iter().sum();
    let draws = 100_000;
    let mut counts = vec![0u64; ids.len()];
    for _ in 0..draws {
        let mut p = build();
        let victim = delete_one(&mut p, &del_hp, &mut rng).unwrap();
        counts[ids.iter().position(|id| *id == victim).unwrap()] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&votes)
        .map(|(&o, vt)| {
            let e = vt / total * draws as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    v.note(format!("deletion chi2 {chi2:.2} (3 dof)"));
    v.require(chi2 < 16.27, "deletion-vote multinomial");

    let fx = fixtures();
    let mut worst: f64 = 0.0;
    for c in fx["shapiro"].as_array().unwrap() {
        let (_, p) = shapiro_wilk(&values(&c["x"])).map_err(|e| e.to_string())?;
        worst = worst.max((p - c["p"].as_f64().unwrap()).abs());
    }
    for c in fx["ttest"].as_array().unwrap() {
        let alt = if c["alternative"] == "greater" { Alternative::Greater } else { Alternative::Less };
        let (_, p) = paired_t_one_sided(&values(&c["x"]), &values(&c["y"]), alt).map_err(|e| e.to_string())?;
        worst = worst.max((p - c["p"].as_f64().unwrap()).abs());
    }
    for c in fx["wilcoxon"].as_array().unwrap() {
        let r = wilcoxon_signed_rank(&values(&c["x"]), &values(&c["y"])).map_err(|e| e.to_string())?;
        worst = worst.max((r.p - c["p"].as_f64().unwrap()).abs());
    }
    v.note(format!("stats fixtures max |dp| {worst:.1e}"));
    v.require(worst <= 1e-4, "statistics fixtures");
    v.finish()
}

fn p8() -> Check {
    let tmp = std::env::temp_dir().join(format!("xcser-accept-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).map_err(|e| e.to_string())?;
    let mut v = Verdict::new();
    let mut checked = Vec::new();
    for (preset, mode) in [("rmp6", Mode::Er), ("mario", Mode::Standard), ("16chain", Mode::Er), ("cartpole", Mode::Er), ("mountaincar", Mode::Standard)] {
        let mut cfg = ExperimentConfig::preset(preset).unwrap();
        cfg.mode = mode;
        cfg.hp.max_learning_steps = 3000;
        let data = EnvData::load(&cfg.env).unwrap();
        let mut files = Vec::new();
        for k in 0..2 {
            let log = run_repetition(&cfg, &data, 3).map_err(|e| e.to_string())?;
            let (s, e) = (tmp.join(format!("{preset}-{k}.csv")), tmp.join(format!("{preset}-{k}-ep.csv")));
            log.write_steps(&s).map_err(|e| e.to_string())?;
            log.write_episodes(&e).map_err(|e| e.to_string())?;
            files.push((std::fs::read(s).unwrap(), std::fs::read(e).unwrap()));
        }
        v.require(files[0] == files[1], preset);
        checked.push(preset);
    }
    let _ = std::fs::remove_dir_all(&tmp);
    v.note(format!("byte-identical reruns: {}", checked.join(", ")));
    v.finish()
}

fn main() {
    let only: Option<Vec<String>> = std::env::var("XCSER_ACCEPT")
        .ok()
        .map(|s| s.split(',').map(|x| x.trim().to_uppercase()).collect());
    // libtest flags such as --nocapture are accepted and ignored
    let criteria: [Criterion; 8] = [
        ("P1", "6-RMP reproduction", p1),
        ("P2", "WBC reproduction", p2),
        ("P3", "Mario directional check", p3),
        ("P4", "16Chain teletransportation", p4),
        ("P5", "MountainCar sparse reward", p5),
        ("P6", "ER mechanics", p6),
        ("P7", "numerical oracles", p7),
        ("P8", "determinism", p8),
    ];
    let mut failures = 0;
    let mut lines = Vec::new();
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.iter().any(|x| x == id)) {
            continue;
        }
        eprintln!("{id} {name} ...");
        let t0 = Instant::now();
        let line = match run() {
            Ok(d) => format!("{id} PASS {name}: {d}"),
            Err(d) => {
                failures += 1;
                format!("{id} FAIL {name}: {d}")
            }
        };
        println!("{line} [{:.0?}]", t0.elapsed());
        lines.push(line);
    }
    println!();
    for l in &lines {
        println!("{l}");
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
