use crate::erasure::POSTSELECTION_TOL;
use crate::qcore::{apply_gate, contract_wire, Ket, MatrixOp};
use crate::table::{Quantity, Row, ScenarioTable, Source};
use crate::tsvf::{resch_steinberg_rhs, SelectionAngles, TwoStateVector};
use crate::{Error, Result, C64};

/// `|rhs|` below this counts as zero; such rows carry no ratio.
const ZERO_RHS: f64 = 1e-15;

/// Named single-qubit observables accepted by the correlation check.
pub fn named_operator(name: &str) -> Result<MatrixOp> {
    let proj = |k: Ket| MatrixOp::projector(&k);
    match name {
        "I" => Ok(MatrixOp::identity(1)),
        "X" => Ok(MatrixOp::pauli_x()),
        "Y" => Ok(MatrixOp::pauli_y()),
        "Z" => Ok(MatrixOp::pauli_z()),
        "P0" => proj(Ket::zero()),
        "P1" => proj(Ket::one()),
        "P+" | "Pplus" => proj(Ket::plus()),
        "P-" | "Pminus" => proj(Ket::minus()),
        other => Err(Error::InvalidArgument(format!("unknown operator `{other}`"))),
    }
}

/// `exp(i g A ⊗ σx) = e^{igA} ⊗ |+⟩⟨+| + e^{−igA} ⊗ |−⟩⟨−|`
fn meter_coupling(a: &MatrixOp, g: f64) -> Result<MatrixOp> {
    let plus = a.exp_i_hermitian_2x2(g)?.tensor(&MatrixOp::projector(&Ket::plus())?);
    let minus = a.exp_i_hermitian_2x2(-g)?.tensor(&MatrixOp::projector(&Ket::minus())?);
    plus.add(&minus)
}

/// Post-selected `⟨q₁q₂⟩` for two independent qubit meters, each read as
/// `q = σy/2`, coupled by `exp(igA₁σx)` then `exp(igA₂σx)`.
pub fn two_meter_correlation(tsv: &TwoStateVector, a1: &MatrixOp, a2: &MatrixOp, g: f64) -> Result<f64> {
    let start = tsv.pre().tensor(&Ket::zero()).tensor(&Ket::zero());
    let after1 = apply_gate(&start, &meter_coupling(a1, g)?, &[0, 1])?;
    let after2 = apply_gate(&after1, &meter_coupling(a2, g)?, &[0, 2])?;
    let meters = contract_wire(&after2, 0, tsv.post())?;
    if meters.norm_sqr() < POSTSELECTION_TOL {
        return Err(Error::Unpostselectable);
    }
    let q = MatrixOp::pauli_y().scale(C64::new(0.5, 0.0));
    Ok(q.tensor(&q).expectation(&meters)?.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReschRow {
    pub g: f64,
    pub simulated: f64,
    pub rhs: f64,
    /// `simulated / rhs`; `None` when the right-hand side vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ReschTable {
    pub angles: SelectionAngles,
    pub rows: Vec<ReschRow>,
}

impl ReschTable {
    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(|r| r.ratio)
    }

    pub fn to_scenario_table(&self, a1: &str, a2: &str) -> ScenarioTable {
        let (t, p) = (self.angles.theta, self.angles.phi);
        let scheme = "resch";
        let mut table = ScenarioTable::new();
        for r in &self.rows {
            let tag = format!("{a1}->{a2};{}", super::param_tag("g", r.g));
            table.push(Row::new(t, p, scheme, format!("{tag};simulated"), Quantity::MeterStat, r.simulated, Source::Circuit));
            table.push(Row::new(t, p, scheme, format!("{tag};rhs"), Quantity::MeterStat, r.rhs, Source::ClosedForm));
            if let Some(x) = r.ratio {
                table.push(Row::new(t, p, scheme, format!("{tag};ratio"), Quantity::MeterStat, x, Source::Circuit));
            }
        }
        table.sort_canonical();
        table
    }
}

/// Compares the simulated two-meter correlation with the weak-value
/// prediction at each coupling in `g_list`.
pub fn resch_steinberg_check(
    angles: &SelectionAngles,
    a1: &MatrixOp,
    a2: &MatrixOp,
    g_list: &[f64],
) -> Result<ReschTable> {
    let tsv = angles.two_state_vector();
    let rows = g_list
        .iter()
        .map(|&g| {
            let rhs = resch_steinberg_rhs(&tsv, a1, a2, g)?;
            let simulated = two_meter_correlation(&tsv, a1, a2, g)?;
            Ok(ReschRow {
                g,
                simulated,
                rhs,
                ratio: (rhs.abs() > ZERO_RHS).then(|| simulated / rhs),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReschTable {
        angles: *angles,
        rows,
    })
}

/// `max ratio / min ratio − 1` over every ratio in `tables`: how far the
/// calibration constant strays from being universal.
pub fn universality_spread(tables: &[ReschTable]) -> Option<f64> {
    let ratios: Vec<f64> = tables.iter().flat_map(|t| t.ratios()).collect();
    let max = ratios.iter().cloned().reduce(f64::max)?;
    let min = ratios.iter().cloned().reduce(f64::min)?;
    if min <= 0.0 {
        return Some(f64::INFINITY);
    }
    Some(max / min - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_couplings() {
        let id = MatrixOp::identity(1);
        let tsv = SelectionAngles::new(0.4, 1.3).unwrap().two_state_vector();
        for g in [0.1, 0.05] {
            let sim = two_meter_correlation(&tsv, &id, &id, g).unwrap();
            // each meter ends in R(g)|0⟩ with ⟨σy⟩ = sin 2g
            assert!((sim - (2.0 * g).sin().powi(2) / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_pi_rhs() {
        let a = SelectionAngles::new(PI / 4.0, PI / 4.0).unwrap();
        let t = resch_steinberg_check(
            &a,
            &named_operator("P1").unwrap(),
            &named_operator("P+").unwrap(),
            &[0.1, 0.05],
        )
        .unwrap();
        assert!((t.rows[0].rhs - 0.0025).abs() < 1e-15);
        assert!(t.rows.iter().all(|r| r.ratio.is_some()));
    }

    #[test]
    fn operator_names() {
        assert!(named_operator("Q").is_err());
        assert!(named_operator("P-").unwrap().hermiticity_deviation() < 1e-15);
    }
}
