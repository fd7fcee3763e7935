use crate::erasure::{estimate_weak_value, rotation, run_protocol, Strength};
use crate::qcore::Ket;
use crate::scenarios::param_tag;
use crate::table::{Quantity, Row, ScenarioTable, Source};
use crate::tsvf::{weak_value, PathLabel, SelectionAngles};
use crate::{Error, Result};

/// Errors below this are treated as exact zeros and get no ratio.
const ZERO_ERROR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub g: f64,
    /// `|P(Φ | success; g) − P(Φ | success; 0)|`
    pub non_disturbance_error: f64,
    /// `|estimated weak value − {X}_w|`, the pointer shift error in
    /// weak-value units.
    pub pointer_error: f64,
    /// Trace distance between the post-selected meter and `R(g·Re{X}_w)|0⟩`.
    pub trace_distance: f64,
    /// Previous row's error over this row's, when both are nonzero.
    pub non_disturbance_ratio: Option<f64>,
    pub pointer_ratio: Option<f64>,
    pub trace_distance_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub angles: SelectionAngles,
    pub path: PathLabel,
    pub weak_value: f64,
    /// `P(Φ | success; g = 0) / |⟨Φ|ψ⟩|²`
    pub calibration: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    fn ratios_within(ratios: impl Iterator<Item = Option<f64>>, lo: f64, hi: f64) -> bool {
        ratios.flatten().all(|r| (lo..=hi).contains(&r))
    }

    pub fn non_disturbance_within(&self, lo: f64, hi: f64) -> bool {
        Self::ratios_within(self.rows.iter().map(|r| r.non_disturbance_ratio), lo, hi)
    }

    pub fn pointer_within(&self, lo: f64, hi: f64) -> bool {
        Self::ratios_within(self.rows.iter().map(|r| r.pointer_ratio), lo, hi)
    }

    /// Both error families shrink quadratically under halving of `g`.
    pub fn passes(&self) -> bool {
        self.non_disturbance_within(3.5, 4.5) && self.pointer_within(3.5, 4.5)
    }

    pub fn to_scenario_table(&self) -> ScenarioTable {
        let (t, p) = (self.angles.theta, self.angles.phi);
        let scheme = "distinctPath";
        let mut table = ScenarioTable::new();
        for r in &self.rows {
            let tag = format!("{};{}", self.path.name(), param_tag("g", r.g));
            for (name, v) in [
                ("nonDisturbanceError", Some(r.non_disturbance_error)),
                ("pointerError", Some(r.pointer_error)),
                ("traceDistance", Some(r.trace_distance)),
                ("nonDisturbanceRatio", r.non_disturbance_ratio),
                ("pointerRatio", r.pointer_ratio),
            ] {
                if let Some(v) = v {
                    table.push(Row::new(t, p, scheme, format!("{tag};{name}"), Quantity::MeterStat, v, Source::Circuit));
                }
            }
        }
        table.sort_canonical();
        table
    }
}

/// Trace distance between the pure states of two kets, `sqrt(1 − F²)`.
///
/// For qubits this is evaluated as `|u₀v₁ − u₁v₀|` on the normalized kets,
/// which keeps full relative precision when the states nearly coincide.
pub fn trace_distance(u: &Ket, v: &Ket) -> Result<f64> {
    if u.dim() == 2 && v.dim() == 2 {
        let (u, v) = (u.normalize()?, v.normalize()?);
        let cross = u.amplitude(0) * v.amplitude(1) - u.amplitude(1) * v.amplitude(0);
        return Ok(cross.norm().min(1.0));
    }
    let f = u.fidelity(v)?.min(1.0);
    Ok((1.0 - f * f).max(0.0).sqrt())
}

fn ratio(prev: f64, cur: f64) -> Option<f64> {
    (prev > ZERO_ERROR && cur > ZERO_ERROR).then(|| prev / cur)
}

/// Tracks how fast the weak-measurement properties set in as `g → 0`.
pub fn weak_limit_convergence(angles: &SelectionAngles, path: PathLabel, g_list: &[f64]) -> Result<ConvergenceTable> {
    if g_list.len() < 4 {
        return Err(Error::InvalidArgument("need at least 4 strengths".into()));
    }
    if g_list.windows(2).any(|w| w[1] >= w[0]) || g_list.iter().any(|&g| g <= 0.0) {
        return Err(Error::InvalidArgument(
            "strengths must be positive and strictly decreasing".into(),
        ));
    }
    let tsv = angles.two_state_vector();
    let w = weak_value(&tsv, &path.operator())?;
    let base = run_protocol(angles, path, Strength::OFF)?.success.conditional_postselection()?;
    let calibration = base / tsv.overlap().norm_sqr();

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(g_list.len());
    for &g in g_list {
        let out = run_protocol(angles, path, Strength::from_angle(g)?)?;
        let nd = (out.success.conditional_postselection()? - base).abs();
        let est = estimate_weak_value(&out)?;
        let pe = (est - w.value()).norm();
        let target = rotation(g * w.re()).apply_to(&Ket::zero())?;
        let td = trace_distance(&out.success.normalized_meter()?, &target)?;
        let prev = rows.last();
        rows.push(ConvergenceRow {
            g,
            non_disturbance_error: nd,
            pointer_error: pe,
            trace_distance: td,
            non_disturbance_ratio: prev.and_then(|r| ratio(r.non_disturbance_error, nd)),
            pointer_ratio: prev.and_then(|r| ratio(r.pointer_error, pe)),
            trace_distance_ratio: prev.and_then(|r| ratio(r.trace_distance, td)),
        });
    }
    Ok(ConvergenceTable {
        angles: *angles,
        path,
        weak_value: w.re(),
        calibration,
        rows,
    })
}
