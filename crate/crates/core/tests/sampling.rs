use seqweak::erasure::{run_protocol, sample_outcome_shots, sample_protocol, Strength};
use seqweak::qcore::{uniform, OutcomeSampler};
use seqweak::tsvf::{distinct_path_probability, transition_amplitudes, GoldenRoot, PathLabel, SelectionAngles};

#[test]
fn tallies_do_not_depend_on_chunking() {
    let a = SelectionAngles::new(0.8, 2.3).unwrap();
    let out = run_protocol(&a, PathLabel::D, Strength::from_normalized(0.4).unwrap()).unwrap();
    let reference = sample_outcome_shots(&out, 20_000, 11, 20_000).unwrap();
    for chunk in [1, 7, 1000, 4096, 8192, 1 << 20] {
        let t = sample_outcome_shots(&out, 20_000, 11, chunk).unwrap();
        assert_eq!(t, reference, "chunk {chunk}");
    }
    let other = sample_outcome_shots(&out, 20_000, 12, 4096).unwrap();
    assert_ne!(other.counts(), reference.counts());
}

#[test]
fn draws_are_pure_functions_of_seed_and_index() {
    let s = OutcomeSampler::new(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    let forward: Vec<usize> = (0..500).map(|d| s.sample(3, d)).collect();
    let backward: Vec<usize> = (0..500).rev().map(|d| s.sample(3, d)).collect();
    assert!(forward.iter().eq(backward.iter().rev()));
    assert_eq!(uniform(99, 12345), uniform(99, 12345));
}

/// `|f − p| ≤ 4 sqrt(p(1 − p)/n)`, or exact agreement for `p ∈ {0, 1}`.
fn within_binomial_band(f: f64, p: f64, n: u64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (f - p).abs() <= 4.0 * sigma
}

#[test]
fn golden_click_frequencies() {
    let a = SelectionAngles::golden(GoldenRoot::Positive);
    let q = transition_amplitudes(&a);
    for path in PathLabel::ALL {
        let t = sample_protocol(&a, path, Strength::STRONG, 100_000, 42).unwrap();
        let f = t.click_frequency().unwrap();
        let p = distinct_path_probability(&q, path).unwrap();
        assert!(within_binomial_band(f, p, t.accepted_successes()), "{path}: {f} vs {p}");
    }
    let b = sample_protocol(&a, PathLabel::B, Strength::STRONG, 100_000, 42).unwrap();
    assert_eq!(b.click_frequency(), Some(1.0));
}

#[test]
fn sampled_statistics_track_the_joint_distribution() {
    let shots = 50_000;
    for (k, (t, p)) in [(0.3, 1.9), (2.2, 0.4), (1.0, 1.0)].into_iter().enumerate() {
        let a = SelectionAngles::new(t, p).unwrap();
        for path in PathLabel::ALL {
            let out = run_protocol(&a, path, Strength::from_normalized(0.6).unwrap()).unwrap();
            let tally = sample_outcome_shots(&out, shots, k as u64, 4096).unwrap();
            for (count, prob) in tally.counts().iter().zip(out.joint_distribution()) {
                let f = *count as f64 / shots as f64;
                assert!(within_binomial_band(f, prob, shots), "{path} {f} {prob}");
            }
        }
    }
}
