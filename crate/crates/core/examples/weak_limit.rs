//! Errors of the weak measurement shrink as g² when g is halved; the
//! pointer's distance to R(g·w)|0⟩ shrinks as g³.

use seqweak::scenarios::weak_limit_convergence;
use seqweak::tsvf::{PathLabel, SelectionAngles};

fn main() -> seqweak::Result<()> {
    let a = SelectionAngles::new(0.3, 0.7)?;
    let t = weak_limit_convergence(&a, PathLabel::C, &[0.2, 0.1, 0.05, 0.025, 0.0125])?;
    println!("{{C}}_w = {:.10}", t.weak_value);
    println!("{:>8} {:>12} {:>12} {:>12}  ratios", "g", "disturbance", "pointer", "trace dist");
    for r in &t.rows {
        let ratio = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
        println!(
            "{:>8} {:>12.3e} {:>12.3e} {:>12.3e}  {} {} {}",
            r.g,
            r.non_disturbance_error,
            r.pointer_error,
            r.trace_distance,
            ratio(r.non_disturbance_ratio),
            ratio(r.pointer_ratio),
            ratio(r.trace_distance_ratio)
        );
    }
    Ok(())
}
