//! A failed erasure is a success of the measurement with A↔C and B↔D
//! swapped, once σz is applied to the system.

use seqweak::erasure::{correct_failed_erasure, run_protocol, Strength};
use seqweak::tsvf::{PathLabel, SelectionAngles};

fn main() -> seqweak::Result<()> {
    let a = SelectionAngles::new(0.8, 2.4)?;
    let st = Strength::from_normalized(0.3)?;
    for path in PathLabel::ALL {
        let fixed = correct_failed_erasure(&run_protocol(&a, path, st)?)?;
        let direct = run_protocol(&a, path.swapped(), st)?;
        let f = fixed.success.state.fidelity(&direct.success.state)?;
        println!("failed {path} -> {} : fidelity {f:.15}", path.swapped());
    }
    Ok(())
}
