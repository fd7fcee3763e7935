//! Sampled click frequencies converge on the exact probability; the tally
//! is the same whatever the parallel chunk size.

use seqweak::erasure::{run_protocol, sample_outcome_shots, Strength};
use seqweak::tsvf::{GoldenRoot, PathLabel, SelectionAngles};

fn main() -> seqweak::Result<()> {
    let a = SelectionAngles::golden(GoldenRoot::Positive);
    let out = run_protocol(&a, PathLabel::A, Strength::STRONG)?;
    println!("exact click probability {:.7}", out.success.click_probability()?);
    for shots in [1_000, 10_000, 100_000, 1_000_000] {
        let t = sample_outcome_shots(&out, shots, 42, 8192)?;
        println!(
            "{shots:>9} shots: {:>7} post-selected successes, click frequency {:.5}",
            t.accepted_successes(),
            t.click_frequency().unwrap_or(f64::NAN)
        );
    }
    let a1 = sample_outcome_shots(&out, 50_000, 7, 1)?;
    let a2 = sample_outcome_shots(&out, 50_000, 7, 50_000)?;
    println!("chunking-independent: {}", a1 == a2);
    Ok(())
}
