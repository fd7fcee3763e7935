//! Step through one run of the erasure circuit for path A.

use seqweak::erasure::{estimate_weak_value, run_protocol, Strength};
use seqweak::tsvf::{PathLabel, SelectionAngles};

fn main() -> seqweak::Result<()> {
    let a = SelectionAngles::new(0.6, 1.1)?;
    let out = run_protocol(&a, PathLabel::A, Strength::from_normalized(0.1)?)?;
    println!("after CNOT:          {:?}", out.psi2);
    println!("after coupling:      {:?}", out.psi3);
    println!("P(erasure succeeds): {:.10}", out.success.probability);
    println!("P(post | success):   {:.10}", out.success.conditional_postselection()?);
    println!("meter | success, Φ:  {:?}", out.success.normalized_meter()?);
    println!("weak value estimate: {:.6}", estimate_weak_value(&out)?);
    Ok(())
}
