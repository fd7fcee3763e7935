use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::erasure::{
    estimate_weak_value, run_coupled_protocol, sample_outcome_shots, Coupling, Strength,
};
use crate::scenarios::{circuit_probabilities, param_tag};
use crate::table::{Quantity, Row, ScenarioTable, Source};
use crate::tsvf::{
    closed_form_probabilities, path_weak_values, transition_amplitudes, PathLabel, Scheme,
    SelectionAngles, EVEN_LABEL, ODD_LABEL,
};
use crate::{Error, Result};

pub const DEFAULT_STEPS: usize = 41;
pub const MAX_STEPS: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    Theta,
    Phi,
    /// `theta = phi`, both swept together.
    Diagonal,
    /// Raw rotation angle `g`.
    Strength,
    Shots,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(Self::Theta),
            "phi" => Ok(Self::Phi),
            "diag" | "diagonal" | "theta=phi" => Ok(Self::Diagonal),
            "g" | "strength" => Ok(Self::Strength),
            "shots" => Ok(Self::Shots),
            other => Err(Error::InvalidSweep(format!("unknown parameter `{other}`"))),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Theta => "theta",
            Self::Phi => "phi",
            Self::Diagonal => "diag",
            Self::Strength => "g",
            Self::Shots => "shots",
        })
    }
}

/// One swept parameter over an inclusive linear grid, the others fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub theta: f64,
    pub phi: f64,
    pub strength: Strength,
    pub shots: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, from: f64, to: f64) -> Self {
        let golden = SelectionAngles::golden(Default::default());
        SweepSpec {
            parameter,
            from,
            to,
            steps: DEFAULT_STEPS,
            theta: golden.theta,
            phi: golden.phi,
            strength: Strength::STRONG,
            shots: 10_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSweep(m));
        if !self.from.is_finite() || !self.to.is_finite() || self.from >= self.to {
            return bad(format!("need from < to, got {} .. {}", self.from, self.to));
        }
        if !(2..=MAX_STEPS).contains(&self.steps) {
            return bad(format!("steps must be in 2..={MAX_STEPS}, got {}", self.steps));
        }
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return bad("fixed angles must be finite".into());
        }
        match self.parameter {
            SweepParameter::Strength if self.from < 0.0 || self.to > FRAC_PI_2 => {
                bad(format!("g must lie in [0, π/2], got {} .. {}", self.from, self.to))
            }
            SweepParameter::Shots if self.from < 1.0 => bad("shot counts start at 1".into()),
            SweepParameter::Shots if self.to > 1e9 => bad("at most 1e9 shots".into()),
            _ => Ok(()),
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    self.to
                } else {
                    self.from + (self.to - self.from) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn angles_at(&self, x: f64) -> Result<SelectionAngles> {
        match self.parameter {
            SweepParameter::Theta => SelectionAngles::new(x, self.phi),
            SweepParameter::Phi => SelectionAngles::new(self.theta, x),
            SweepParameter::Diagonal => SelectionAngles::new(x, x),
            _ => SelectionAngles::new(self.theta, self.phi),
        }
    }
}

fn keep_label(label: &str, scheme: Scheme, path: Option<PathLabel>) -> bool {
    match (scheme, path) {
        (Scheme::Modular, _) | (_, None) => true,
        (_, Some(p)) => label == p.name(),
    }
}

fn couplings(scheme: Scheme, path: Option<PathLabel>) -> Result<Vec<(String, Coupling)>> {
    match (scheme, path) {
        (Scheme::Modular, _) => Ok(vec![
            (EVEN_LABEL.to_string(), Coupling::even()),
            (ODD_LABEL.to_string(), Coupling::odd()),
        ]),
        (_, Some(p)) => Ok(vec![(p.name().to_string(), Coupling::single(p))]),
        (_, None) => Ok(PathLabel::ALL
            .iter()
            .map(|p| (p.name().to_string(), Coupling::single(*p)))
            .collect()),
    }
}

fn weak_values_for(angles: &SelectionAngles, scheme: Scheme) -> Option<Vec<(String, f64)>> {
    let w = path_weak_values(angles).ok()?;
    Some(match scheme {
        Scheme::Modular => vec![
            (EVEN_LABEL.to_string(), w[0] + w[3]),
            (ODD_LABEL.to_string(), w[1] + w[2]),
        ],
        _ => PathLabel::ALL
            .iter()
            .map(|p| (p.name().to_string(), w[p.index()]))
            .collect(),
    })
}

/// Closed-form and full-strength circuit probabilities plus closed-form weak
/// values of `scheme` at one angle pair. Outcomes whose probability is
/// undefined there (vanishing denominator, nothing post-selectable) are left
/// out rather than reported as errors.
pub fn probability_rows(angles: &SelectionAngles, scheme: Scheme, path: Option<PathLabel>) -> Result<Vec<Row>> {
    let (t, p) = (angles.theta, angles.phi);
    let s = scheme.as_str();
    let mut rows = Vec::new();
    let per_label = |label: &str, r: Result<f64>| -> Result<Option<f64>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::VanishingDenominator(_) | Error::Unpostselectable | Error::DegenerateBranch(_)) => Ok(None),
            Err(e) => Err(e).map_err(|e: Error| Error::InvalidSweep(format!("{label}: {e}"))),
        }
    };
    let closed: Vec<(String, Result<f64>)> = match closed_form_probabilities(angles, scheme) {
        Ok(v) => v.into_iter().map(|(l, x)| (l, Ok(x))).collect(),
        // distinct-path labels are independent experiments; evaluate one by one
        Err(_) if scheme == Scheme::DistinctPath => {
            let q = transition_amplitudes(angles);
            PathLabel::ALL
                .iter()
                .map(|&pl| (pl.name().to_string(), crate::tsvf::distinct_path_probability(&q, pl)))
                .collect()
        }
        Err(e) => vec![(String::new(), Err(e))],
    };
    for (label, v) in closed {
        if !label.is_empty() && keep_label(&label, scheme, path) {
            if let Some(v) = per_label(&label, v)? {
                rows.push(Row::new(t, p, s, label, Quantity::Probability, v, Source::ClosedForm));
            }
        }
    }
    let circuit = match circuit_probabilities(angles, scheme) {
        Ok(v) => v,
        Err(Error::VanishingDenominator(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    for (label, v) in circuit {
        if keep_label(&label, scheme, path) {
            if let Some(v) = per_label(&label, v)? {
                rows.push(Row::new(t, p, s, label, Quantity::Probability, v, Source::Circuit));
            }
        }
    }
    if let Some(ws) = weak_values_for(angles, scheme) {
        for (label, w) in ws {
            if keep_label(&label, scheme, path) {
                rows.push(Row::new(t, p, s, label, Quantity::WeakValueRe, w, Source::ClosedForm));
            }
        }
    }
    Ok(rows)
}

fn strength_point(angles: &SelectionAngles, scheme: Scheme, path: Option<PathLabel>, g: f64) -> Result<Vec<Row>> {
    let (t, p) = (angles.theta, angles.phi);
    let s = scheme.as_str();
    let st = Strength::from_angle(g)?;
    let closed = weak_values_for(angles, scheme);
    let mut rows = Vec::new();
    for (name, coupling) in couplings(scheme, path)? {
        let tag = format!("{name};{}", param_tag("g", g));
        let out = match run_coupled_protocol(angles, coupling, st) {
            Ok(o) => o,
            Err(Error::Unpostselectable) => continue,
            Err(e) => return Err(e),
        };
        if let Ok(click) = out.success.click_probability() {
            rows.push(Row::new(t, p, s, format!("{tag};click"), Quantity::MeterStat, click, Source::Circuit));
        }
        if let Ok(ps) = out.success.conditional_postselection() {
            rows.push(Row::new(t, p, s, format!("{tag};postselect"), Quantity::MeterStat, ps, Source::Circuit));
        }
        if g > 0.0 {
            if let Ok(est) = estimate_weak_value(&out) {
                rows.push(Row::new(t, p, s, tag.clone(), Quantity::WeakValueRe, est.re, Source::Circuit));
                rows.push(Row::new(t, p, s, tag.clone(), Quantity::WeakValueIm, est.im, Source::Circuit));
            }
        }
        if let Some(w) = closed.as_ref().and_then(|ws| ws.iter().find(|(l, _)| *l == name)) {
            rows.push(Row::new(t, p, s, tag, Quantity::WeakValueRe, w.1, Source::ClosedForm));
        }
    }
    Ok(rows)
}

fn shots_point(spec: &SweepSpec, angles: &SelectionAngles, scheme: Scheme, path: Option<PathLabel>, n: u64) -> Result<Vec<Row>> {
    let (t, p) = (angles.theta, angles.phi);
    let s = scheme.as_str();
    let mut rows = Vec::new();
    for (name, coupling) in couplings(scheme, path)? {
        let tag = format!("{name};n={n:010}");
        let out = run_coupled_protocol(angles, coupling, spec.strength)?;
        if let Ok(click) = out.success.click_probability() {
            rows.push(Row::new(t, p, s, tag.clone(), Quantity::Probability, click, Source::Circuit));
        }
        let tally = sample_outcome_shots(&out, n, spec.seed, 8192)?;
        if let Some(f) = tally.click_frequency() {
            rows.push(Row::new(t, p, s, tag, Quantity::Probability, f, Source::Sampled));
        }
    }
    Ok(rows)
}

/// Evaluates `scheme` over the grid of `spec`.
///
/// Angle sweeps emit closed-form and full-strength circuit probabilities plus
/// closed-form weak values. Strength sweeps emit the circuit's weak-value
/// readings, click and post-selection probabilities at each `g`, labeled
/// `<outcome>;g=<g>`. Shot sweeps emit sampled click frequencies labeled
/// `<outcome>;n=<shots>`. `path` restricts the outcomes (ignored for the
/// modular scheme); the sequence scheme cannot be run at variable strength
/// without one.
pub fn sweep(spec: &SweepSpec, scheme: Scheme, path: Option<PathLabel>) -> Result<ScenarioTable> {
    spec.validate()?;
    if scheme == Scheme::Sequence
        && path.is_none()
        && matches!(spec.parameter, SweepParameter::Strength | SweepParameter::Shots)
    {
        return Err(Error::InvalidSweep(
            "the sequence scheme needs --path for strength or shot sweeps".into(),
        ));
    }
    let grid = spec.grid();
    let chunks: Vec<Result<Vec<Row>>> = grid
        .par_iter()
        .map(|&x| {
            let angles = spec.angles_at(x)?;
            match spec.parameter {
                SweepParameter::Theta | SweepParameter::Phi | SweepParameter::Diagonal => {
                    probability_rows(&angles, scheme, path)
                }
                SweepParameter::Strength => strength_point(&angles, scheme, path, x),
                SweepParameter::Shots => shots_point(spec, &angles, scheme, path, x.round() as u64),
            }
        })
        .collect();
    let mut table = ScenarioTable::new();
    for c in chunks {
        table.extend(c?.into_iter().collect());
    }
    table.sort_canonical();
    Ok(table)
}
