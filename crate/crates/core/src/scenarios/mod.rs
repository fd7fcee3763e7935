//! Executable experiments built on the closed forms and the erasure circuit.
//!
//! Every function here is a pure computation; grid points are evaluated in
//! parallel and the resulting tables are sorted canonically, so output does
//! not depend on scheduling.

mod convergence;
mod paradox;
mod resch;
mod sweep;

pub use convergence::{trace_distance, weak_limit_convergence, ConvergenceRow, ConvergenceTable};
pub use paradox::{run_deterministic_path_experiment, Check, DeterministicPathReport};
pub use resch::{
    named_operator, resch_steinberg_check, two_meter_correlation, universality_spread, ReschRow,
    ReschTable,
};
pub use sweep::{probability_rows, sweep, SweepParameter, SweepSpec, DEFAULT_STEPS, MAX_STEPS};

use crate::erasure::{run_coupled_protocol, run_protocol, Coupling, Strength};
use crate::qcore::{project_wire, Basis};
use crate::tsvf::{
    complement_label, PathLabel, Scheme, SelectionAngles, ABL_DENOM_TOL, EVEN_LABEL, ODD_LABEL,
};
use crate::{Error, Result};

/// Probability of each outcome of `scheme` obtained by simulating the
/// measurement rather than evaluating the ABL formula.
///
/// The sequence scheme is two projective measurements (Z, then X) followed
/// by post-selection. The modular and distinct-path schemes run the erasure
/// circuit at full strength and read the meter in the Z basis.
pub fn circuit_probabilities(angles: &SelectionAngles, scheme: Scheme) -> Result<Vec<(String, Result<f64>)>> {
    match scheme {
        Scheme::Sequence => {
            let pre = angles.pre_ket();
            let post = angles.post_ket();
            let mut weights = Vec::with_capacity(4);
            for p in PathLabel::ALL {
                let (after_z, _) = project_wire(&pre, 0, Basis::Z, p.j)?;
                let x_outcome = match p.i {
                    crate::tsvf::XSign::Plus => 0,
                    crate::tsvf::XSign::Minus => 1,
                };
                let (after_x, _) = project_wire(&after_z, 0, Basis::X, x_outcome)?;
                weights.push((p.name().to_string(), post.inner(&after_x)?.norm_sqr()));
            }
            let total: f64 = weights.iter().map(|(_, w)| w).sum();
            if total < ABL_DENOM_TOL {
                return Err(Error::VanishingDenominator(total));
            }
            Ok(weights.into_iter().map(|(l, w)| (l, Ok(w / total))).collect())
        }
        Scheme::Modular => {
            let click = |c: Coupling| -> Result<f64> {
                run_coupled_protocol(angles, c, Strength::STRONG)?.success.click_probability()
            };
            Ok(vec![
                (EVEN_LABEL.to_string(), click(Coupling::even())),
                (ODD_LABEL.to_string(), click(Coupling::odd())),
            ])
        }
        Scheme::DistinctPath => Ok(PathLabel::ALL
            .iter()
            .map(|&p| {
                let click = run_protocol(angles, p, Strength::STRONG)
                    .and_then(|o| o.success.click_probability());
                (p.name().to_string(), click)
            })
            .collect()),
    }
}

/// Label for the "no click" outcome of a distinct-path measurement.
pub fn no_click_label(path: PathLabel) -> String {
    complement_label(path)
}

/// Fixed-width decimal tag so lexical order matches numeric order.
pub(crate) fn param_tag(name: &str, value: f64) -> String {
    format!("{name}={value:.10}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsvf::closed_form_probabilities;

    #[test]
    fn circuit_matches_closed_form() {
        let a = SelectionAngles::new(0.37, 2.1).unwrap();
        for scheme in [Scheme::Sequence, Scheme::Modular, Scheme::DistinctPath] {
            let closed = closed_form_probabilities(&a, scheme).unwrap();
            let circuit = circuit_probabilities(&a, scheme).unwrap();
            for ((l1, p1), (l2, p2)) in closed.iter().zip(circuit) {
                assert_eq!(l1, &l2);
                assert!((p1 - p2.unwrap()).abs() < 1e-12, "{scheme} {l1}");
            }
        }
    }
}
