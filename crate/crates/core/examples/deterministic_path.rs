//! Both golden roots: paths B and C are each certain under their own
//! measurement, and both weak values equal one.

use seqweak::erasure::Strength;
use seqweak::scenarios::run_deterministic_path_experiment;
use seqweak::tsvf::{deterministic_angles, GoldenRoot};

fn main() -> seqweak::Result<()> {
    for root in deterministic_angles() {
        println!(
            "root {:?}: cot = {:.10}, theta = phi = {:.10}, residual {:.1e}",
            root.root, root.cot, root.angles.theta, root.residual
        );
    }
    let strengths = [0.05, 0.5, 1.0].map(|s| Strength::from_normalized(s).unwrap());
    for root in [GoldenRoot::Positive, GoldenRoot::Negative] {
        let report = run_deterministic_path_experiment(root, &strengths, 100_000, 42)?;
        println!("\n{root:?} root");
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            println!("  {mark} {:<34} observed {:.10}", c.name, c.observed);
        }
    }
    Ok(())
}
