//! Shapiro-Wilk, paired t and Wilcoxon against values frozen from scipy
//! (see scripts/stats_fixtures.py).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde_json::Value;
use xcser_core::stats::compare::compare;
use xcser_core::stats::wilcoxon::wilcoxon_with;
use xcser_core::stats::{paired_t_one_sided, shapiro_wilk, wilcoxon_signed_rank, Alternative, Test};

fn fixtures() -> Value {
    serde_json::from_str(include_str!("fixtures/stats.json")).unwrap()
}

fn vec(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn shapiro_wilk_matches_reference() {
    for case in fixtures()["shapiro"].as_array().unwrap() {
        let x = vec(&case["x"]);
        let (w, p) = shapiro_wilk(&x).unwrap();
        let name = case["name"].as_str().unwrap();
        let (ew, ep) = (case["w"].as_f64().unwrap(), case["p"].as_f64().unwrap());
        assert!((w - ew).abs() < 1e-4, "{name}: W {w} vs {ew}");
        assert!((p - ep).abs() < 1e-4, "{name}: p {p} vs {ep}");
        assert!(w > 0.0 && w <= 1.0 && (0.0..=1.0).contains(&p));
    }
}

#[test]
fn paired_t_matches_reference() {
    for case in fixtures()["ttest"].as_array().unwrap() {
        let alt = match case["alternative"].as_str().unwrap() {
            "greater" => Alternative::Greater,
            _ => Alternative::Less,
        };
        let (t, p) = paired_t_one_sided(&vec(&case["x"]), &vec(&case["y"]), alt).unwrap();
        let name = case["name"].as_str().unwrap();
        assert!((t - case["t"].as_f64().unwrap()).abs() < 1e-9, "{name}: t {t}");
        assert!((p - case["p"].as_f64().unwrap()).abs() < 1e-4, "{name}: p {p}");
    }
}

#[test]
fn wilcoxon_matches_reference() {
    for case in fixtures()["wilcoxon"].as_array().unwrap() {
        let r = wilcoxon_signed_rank(&vec(&case["x"]), &vec(&case["y"])).unwrap();
        let name = case["name"].as_str().unwrap();
        assert_eq!(r.exact, case["method"] == "exact", "{name}");
        assert_eq!(r.statistic, case["statistic"].as_f64().unwrap(), "{name}");
        assert!((r.p - case["p"].as_f64().unwrap()).abs() < 1e-4, "{name}: p {}", r.p);
    }
}

#[test]
fn exact_and_normal_agree_at_twelve() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let noise = Normal::new(0.0, 1.0).unwrap();
    for shift in [0.0, 0.3, 0.6, 1.0] {
        for _ in 0..25 {
            let x: Vec<f64> = (0..12).map(|_| noise.sample(&mut rng) + shift).collect();
            let y: Vec<f64> = (0..12).map(|_| noise.sample(&mut rng)).collect();
            let e = wilcoxon_with(&x, &y, Some(true)).unwrap();
            let a = wilcoxon_with(&x, &y, Some(false)).unwrap();
            // near the centre the corrected normal p cannot reach 1
            if e.p < 0.5 {
                assert!((e.p - a.p).abs() < 0.02, "exact {} vs normal {}", e.p, a.p);
            }
        }
    }
}

fn rejection_rate<D: Distribution<f64>>(dist: D, alpha: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = 1000;
    let mut rejected = 0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..30).map(|_| dist.sample(&mut rng)).collect();
        if shapiro_wilk(&x).unwrap().1 < alpha {
            rejected += 1;
        }
    }
    rejected as f64 / trials as f64
}

#[test]
fn shapiro_wilk_calibration_and_power() {
    let size = rejection_rate(Normal::new(0.0, 1.0).unwrap(), 0.05, 1);
    assert!((size - 0.05).abs() <= 0.02, "size {size}");
    let power = rejection_rate(Uniform::new(0.0, 1.0).unwrap(), 0.01, 2);
    assert!(power > 0.05, "power {power}");
}

#[test]
fn shifted_treatment_gets_two_stars() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base_d = Normal::new(900.0, 10.0).unwrap();
    let shift = Normal::new(50.0, 1.0).unwrap();
    let b: Vec<f64> = (0..30).map(|_| base_d.sample(&mut rng)).collect();
    let t: Vec<f64> = b.iter().map(|v| v + shift.sample(&mut rng)).collect();
    let row = compare(&b, &t, "reward").unwrap();
    assert!(row.p.unwrap() < 0.01);
    assert_eq!(row.stars, "**");
    assert_eq!(row.arrow(), "↑");
}

#[test]
fn bimodal_sample_takes_the_wilcoxon_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = Normal::new(0.0, 1.0).unwrap();
    let b: Vec<f64> = (0..30).map(|_| n.sample(&mut rng)).collect();
    let t: Vec<f64> = (0..30)
        .map(|i| n.sample(&mut rng) * 0.3 + if i % 2 == 0 { 0.0 } else { 10.0 })
        .collect();
    let row = compare(&b, &t, "sys_err").unwrap();
    assert!(row.normality_treatment.unwrap() < 0.05);
    assert_eq!(row.test, Test::Wilcoxon);
}

#[test]
fn normal_samples_take_the_t_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = Normal::new(0.0, 1.0).unwrap();
    let b: Vec<f64> = (0..30).map(|_| n.sample(&mut rng)).collect();
    let t: Vec<f64> = b.iter().map(|v| v + 0.5 + n.sample(&mut rng)).collect();
    let row = compare(&b, &t, "reward").unwrap();
    assert_eq!(row.test, Test::PairedT);
}
