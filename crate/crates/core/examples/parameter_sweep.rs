//! Sweep θ = φ through the golden point and print the distinct-path table
//! as CSV.

use seqweak::cli::render_csv;
use seqweak::scenarios::{sweep, SweepParameter, SweepSpec};
use seqweak::tsvf::{PathLabel, Scheme};

fn main() -> seqweak::Result<()> {
    let spec = SweepSpec {
        steps: 9,
        ..SweepSpec::new(SweepParameter::Diagonal, 0.9, 1.1)
    };
    let table = sweep(&spec, Scheme::DistinctPath, Some(PathLabel::B))?;
    print!("{}", render_csv(&table));
    Ok(())
}
