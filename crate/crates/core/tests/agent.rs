use xcser_core::env::{make_env, EnvData};
use xcser_core::harness::{run_repetition, ExperimentConfig};
use xcser_core::*;

fn rmp6(mode: Mode, seed: u64) -> (Agent, Box<dyn Environment>) {
    let cfg = ExperimentConfig::preset("rmp6").unwrap();
    let env = make_env(&cfg.env, &EnvData::default(), seed).unwrap();
    let agent = Agent::new(mode, cfg.hp.clone(), env.spec(), seed).unwrap();
    (agent, env)
}

#[test]
fn nothing_is_learned_during_warm_up() {
    let (mut agent, mut env) = rmp6(Mode::Er, 4);
    let hp = agent.hyperparameters().clone();
    assert_eq!(hp.warmup_steps, 1000);
    for _ in 0..hp.warmup_steps {
        agent.step(&mut env).unwrap();
    }
    let c = agent.counters();
    assert_eq!((c.updates, c.replays, c.ga_invocations), (0, 0, 0));
    assert!(c.covered > 0);
    assert_eq!(agent.replay_memory().unwrap().len(), 1000);
    // every rule is exactly as covering created it
    for (_, cl) in agent.population().iter() {
        let fresh = Classifier::new(cl.condition.clone(), cl.action, cl.timestamp, &hp);
        assert_eq!(cl.prediction, fresh.prediction);
        assert_eq!(cl.epsilon, fresh.epsilon);
        assert_eq!(cl.fitness, fresh.fitness);
        assert_eq!(cl.experience, 0);
        assert_eq!(cl.action_set_size, fresh.action_set_size);
    }
    agent.step(&mut env).unwrap();
    let c = agent.counters();
    assert_eq!(c.replays, hp.minibatch as u64);
    assert!(c.updates > 0);
}

#[test]
fn replay_gives_the_ga_more_chances() {
    for seed in 1..=3 {
        let mut invocations = Vec::new();
        for mode in [Mode::Standard, Mode::Er] {
            let (mut agent, mut env) = rmp6(mode, seed);
            for _ in 0..5000 {
                agent.step(&mut env).unwrap();
            }
            invocations.push(agent.counters().ga_invocations);
        }
        assert!(invocations[1] > invocations[0], "seed {seed}: {invocations:?}");
    }
}

#[test]
fn identical_seeds_give_identical_logs() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["rmp6", "16chain"] {
        let mut cfg = ExperimentConfig::preset(name).unwrap();
        cfg.mode = Mode::Er;
        cfg.hp.max_learning_steps = 1500;
        let bytes = |tag: &str| {
            let log = run_repetition(&cfg, &EnvData::default(), 2).unwrap();
            let p = tmp.path().join(format!("{name}-{tag}.csv"));
            log.write_steps(&p).unwrap();
            std::fs::read(p).unwrap()
        };
        let a = bytes("a");
        assert_eq!(a, bytes("b"));
        let mut other = cfg.clone();
        other.base_seed += 1;
        let log = run_repetition(&other, &EnvData::default(), 2).unwrap();
        let p = tmp.path().join(format!("{name}-c.csv"));
        log.write_steps(&p).unwrap();
        assert_ne!(a, std::fs::read(p).unwrap());
    }
}

/// Two states on a line: 0.25 leads to 0.75 with reward 0, 0.75 ends the
/// episode with reward 1000, whatever the action.
struct TwoStates {
    spec: EnvSpec,
    at_start: bool,
}

impl TwoStates {
    fn new() -> Self {
        Self {
            spec: EnvSpec {
                name: "two-states".into(),
                state_dim: 1,
                action_count: 2,
                episode_limit: 2,
                reward_range: (0.0, 1000.0),
                kind: TaskKind::MultiStep,
            },
            at_start: true,
        }
    }
}

impl Environment for TwoStates {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }
    fn reset(&mut self) -> Vec<f64> {
        self.at_start = true;
        vec![0.25]
    }
    fn reset_uniform(&mut self) -> Vec<f64> {
        self.reset()
    }
    fn step(&mut self, _action: usize) -> Result<EnvStep> {
        let out = if self.at_start {
            EnvStep { next_state: vec![0.75], reward: 0.0, terminal: false }
        } else {
            EnvStep { next_state: vec![0.75], reward: 1000.0, terminal: true }
        };
        self.at_start = false;
        Ok(out)
    }
}

fn predictions_at(agent: &Agent, s: f64, action: usize) -> Vec<f64> {
    agent
        .population()
        .iter()
        .filter(|(_, c)| c.action == action && c.matches(&[s]).unwrap())
        .map(|(_, c)| c.predict(1.0, &[s]))
        .collect()
}

#[test]
fn delayed_update_follows_the_bellman_target() {
    let hp = Hyperparameters {
        beta: 1.0,
        gamma: 0.9,
        p_ini: 10.0,
        r0: 0.2,
        theta_ga: 1e12,
        exploration_prob: 0.0,
        ..Default::default()
    };
    let mut env = TwoStates::new();
    let mut agent = Agent::new(Mode::Standard, hp, env.spec(), 1).unwrap();

    let first = agent.step(&mut env).unwrap();
    assert!(!first.terminal);
    // nothing matches 0.75 yet, so the bootstrap has nothing to add
    assert_eq!(first.target, 0.0);
    assert!(agent.has_carry());
    assert_eq!(agent.counters().updates, 0);

    let second = agent.step(&mut env).unwrap();
    assert!(second.terminal);
    assert!(!agent.has_carry());
    assert_eq!(agent.counters().updates, 2);
    // carried set: 0 + 0.9 * max PA(0.75) with every rule there still at p_ini
    assert_eq!(predictions_at(&agent, 0.25, first.action), vec![9.0]);
    assert_eq!(predictions_at(&agent, 0.25, 1 - first.action), vec![10.0]);
    assert_eq!(predictions_at(&agent, 0.75, second.action), vec![1000.0]);

    // greedy now prefers the untried action at 0.25
    let third = agent.step(&mut env).unwrap();
    assert_eq!(third.action, 1 - first.action);
    assert_eq!(third.target, 900.0);
    agent.step(&mut env).unwrap();
    assert_eq!(predictions_at(&agent, 0.25, third.action), vec![900.0]);
}
