//! Two weakly coupled qubit meters: their post-selected correlation
//! approaches the weak-value prediction as g → 0.

use seqweak::scenarios::{named_operator, resch_steinberg_check};
use seqweak::tsvf::{GoldenRoot, SelectionAngles};

fn main() -> seqweak::Result<()> {
    let (a1, a2) = (named_operator("P1")?, named_operator("P+")?);
    let g = [0.2, 0.1, 0.05, 0.025];
    for (name, angles) in [
        ("theta = phi = pi/4", SelectionAngles::new(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)?),
        ("golden root", SelectionAngles::golden(GoldenRoot::Positive)),
    ] {
        println!("{name}");
        for r in resch_steinberg_check(&angles, &a1, &a2, &g)?.rows {
            println!("  g = {:<6} simulated {:+.6e}  predicted {:+.6e}  ratio {:?}", r.g, r.simulated, r.rhs, r.ratio);
        }
    }
    Ok(())
}
