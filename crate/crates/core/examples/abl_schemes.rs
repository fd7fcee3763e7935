//! The three ways of asking about the path give three different answers.

use seqweak::tsvf::{closed_form_probabilities, path_weak_values, GoldenRoot, Scheme, SelectionAngles};

fn main() -> seqweak::Result<()> {
    let a = SelectionAngles::golden(GoldenRoot::Positive);
    for scheme in [Scheme::Sequence, Scheme::Modular, Scheme::DistinctPath] {
        let probs = closed_form_probabilities(&a, scheme)?;
        let cells: Vec<String> = probs.iter().map(|(l, p)| format!("P({l}) = {p:.7}")).collect();
        println!("{:<13} {}", scheme.as_str(), cells.join("  "));
    }
    let w = path_weak_values(&a)?;
    println!("weak values   A {:.7}  B {:.7}  C {:.7}  D {:.7}", w[0], w[1], w[2], w[3]);

    // θ = −φ makes the even modular outcome certain
    let even = closed_form_probabilities(&SelectionAngles::new(-0.6, 0.6)?, Scheme::Modular)?;
    println!("theta = -phi: {even:?}");
    Ok(())
}
