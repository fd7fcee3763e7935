//! Pre- and post-selected qubits: two-state vectors, the ABL rule over
//! Kraus sets, weak values, and the closed-form quantities of the
//! Z-then-X path setup.
//!
//! The setup pre-selects `|ψ⟩ = cos θ|0⟩ + sin θ|1⟩`, post-selects
//! `|Φ⟩ = cos φ|+⟩ + sin φ|−⟩`, and in between asks which of the four
//! Z-then-X paths the system took. The path operators are
//!
//! ```text
//! A = |+⟩⟨+| |0⟩⟨0|    B = |+⟩⟨+| |1⟩⟨1|
//! C = |−⟩⟨−| |0⟩⟨0|    D = |−⟩⟨−| |1⟩⟨1|
//! ```
//!
//! with transition amplitudes `a = ⟨Φ|A|ψ⟩` etc., all real for real angles.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::qcore::{Ket, MatrixOp};
use crate::table::{Quantity, Row, ScenarioTable, Source};
use crate::{Error, Result, C64};

/// Smallest `|⟨Φ|ψ⟩|` accepted when dividing by the overlap.
pub const OVERLAP_TOL: f64 = 1e-12;
/// Smallest ABL denominator accepted.
pub const ABL_DENOM_TOL: f64 = 1e-24;
/// Tolerance of the completeness tag on Kraus sets.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Pre-selection angle `theta` and post-selection angle `phi`, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionAngles {
    pub theta: f64,
    pub phi: f64,
}

impl SelectionAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidAngle);
        }
        Ok(SelectionAngles { theta, phi })
    }

    /// The deterministic-path point for the given root.
    pub fn golden(root: GoldenRoot) -> Self {
        let angle = root.angle();
        SelectionAngles {
            theta: angle,
            phi: angle,
        }
    }

    /// Both angles reduced to `[0, π)`. Used for reporting only.
    pub fn canonical(&self) -> Self {
        let reduce = |x: f64| {
            let r = x.rem_euclid(PI);
            if r >= PI {
                0.0
            } else {
                r
            }
        };
        SelectionAngles {
            theta: reduce(self.theta),
            phi: reduce(self.phi),
        }
    }

    /// `cos θ|0⟩ + sin θ|1⟩`
    pub fn pre_ket(&self) -> Ket {
        Ket::qubit(self.theta.cos(), self.theta.sin()).expect("finite angle")
    }

    /// `cos φ|+⟩ + sin φ|−⟩`
    pub fn post_ket(&self) -> Ket {
        let (c, s) = (self.phi.cos(), self.phi.sin());
        Ket::qubit((c + s) * FRAC_1_SQRT_2, (c - s) * FRAC_1_SQRT_2).expect("finite angle")
    }

    pub fn two_state_vector(&self) -> TwoStateVector {
        TwoStateVector::new(self.pre_ket(), self.post_ket()).expect("normalized kets")
    }
}

/// The two roots of `cot²φ + cot φ − 1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GoldenRoot {
    #[default]
    /// `cot = (√5 − 1)/2`
    Positive,
    /// `cot = −(√5 + 1)/2`
    Negative,
}

impl GoldenRoot {
    pub fn cot(self) -> f64 {
        let s5 = 5f64.sqrt();
        match self {
            GoldenRoot::Positive => (s5 - 1.0) / 2.0,
            GoldenRoot::Negative => (-1.0 - s5) / 2.0,
        }
    }

    /// The angle in `(0, π)` whose cotangent is [`GoldenRoot::cot`].
    pub fn angle(self) -> f64 {
        1f64.atan2(self.cot())
    }
}

/// X-basis outcome of the second-time measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XSign {
    Plus,
    Minus,
}

impl XSign {
    pub fn ket(self) -> Ket {
        match self {
            XSign::Plus => Ket::plus(),
            XSign::Minus => Ket::minus(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            XSign::Plus => XSign::Minus,
            XSign::Minus => XSign::Plus,
        }
    }
}

/// One of the four Z-then-X paths: `i` is the X outcome at the later time,
/// `j` the Z outcome at the earlier time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathLabel {
    pub i: XSign,
    pub j: u8,
}

impl PathLabel {
    pub const A: PathLabel = PathLabel { i: XSign::Plus, j: 0 };
    pub const B: PathLabel = PathLabel { i: XSign::Plus, j: 1 };
    pub const C: PathLabel = PathLabel { i: XSign::Minus, j: 0 };
    pub const D: PathLabel = PathLabel { i: XSign::Minus, j: 1 };

    pub const ALL: [PathLabel; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn new(i: XSign, j: u8) -> Result<Self> {
        if j > 1 {
            return Err(Error::InvalidArgument(format!("Z index {j}")));
        }
        Ok(PathLabel { i, j })
    }

    pub fn name(self) -> &'static str {
        match (self.i, self.j) {
            (XSign::Plus, 0) => "A",
            (XSign::Plus, _) => "B",
            (XSign::Minus, 0) => "C",
            (XSign::Minus, _) => "D",
        }
    }

    /// Position in `A, B, C, D` order.
    pub fn index(self) -> usize {
        match self.i {
            XSign::Plus => self.j as usize,
            XSign::Minus => 2 + self.j as usize,
        }
    }

    /// The label a σz on the system maps this path to: `A↔C`, `B↔D`.
    pub fn swapped(self) -> Self {
        PathLabel {
            i: self.i.flipped(),
            j: self.j,
        }
    }

    /// `|i⟩⟨i| |j⟩⟨j|`.
    pub fn operator(self) -> MatrixOp {
        let x = MatrixOp::projector(&self.i.ket()).expect("qubit");
        let z = MatrixOp::projector(&Ket::basis(1, self.j as usize).expect("bit")).expect("qubit");
        x.matmul(&z).expect("2x2")
    }
}

impl fmt::Display for PathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PathLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" | "+0" => Ok(Self::A),
            "B" | "b" | "+1" => Ok(Self::B),
            "C" | "c" | "-0" => Ok(Self::C),
            "D" | "d" | "-1" => Ok(Self::D),
            other => Err(Error::InvalidArgument(format!("path label `{other}`"))),
        }
    }
}

/// Forward-evolving `|ψ⟩` and backward-evolving `⟨Φ|` over the same register.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateVector {
    pre: Ket,
    post: Ket,
    overlap: C64,
}

impl TwoStateVector {
    pub fn new(pre: Ket, post: Ket) -> Result<Self> {
        for k in [&pre, &post] {
            if !k.is_normalized() {
                return Err(Error::NotNormalized(k.norm()));
            }
        }
        let overlap = post.inner(&pre)?;
        Ok(TwoStateVector { pre, post, overlap })
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    pub fn post(&self) -> &Ket {
        &self.post
    }

    /// `⟨Φ|ψ⟩`
    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    /// `⟨Φ|op|ψ⟩`
    pub fn transition(&self, op: &MatrixOp) -> Result<C64> {
        op.sandwich(&self.post, &self.pre)
    }

    fn nonorthogonal_overlap(&self) -> Result<C64> {
        if self.overlap.norm() < OVERLAP_TOL {
            return Err(Error::Orthogonal(self.overlap.norm()));
        }
        Ok(self.overlap)
    }
}

/// Labeled measurement operators defining one scheme's outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    outcomes: Vec<(String, MatrixOp)>,
    complete: bool,
}

impl KrausSet {
    pub fn new<S: Into<String>>(outcomes: impl IntoIterator<Item = (S, MatrixOp)>) -> Result<Self> {
        let outcomes: Vec<(String, MatrixOp)> =
            outcomes.into_iter().map(|(l, op)| (l.into(), op)).collect();
        let Some((_, first)) = outcomes.first() else {
            return Err(Error::EmptyKrausSet);
        };
        let dim = first.dim();
        for (idx, (label, op)) in outcomes.iter().enumerate() {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            if outcomes[..idx].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(KrausSet {
            outcomes,
            complete: false,
        })
    }

    /// Sets the completeness tag after checking `Σ K†K = I`.
    pub fn with_completeness(mut self) -> Result<Self> {
        let residual = self.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::Incomplete(residual));
        }
        self.complete = true;
        Ok(self)
    }

    /// Max entrywise deviation of `Σ K†K` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let wires = self.outcomes[0].1.arity();
        let mut sum = MatrixOp::identity(wires).scale(C64::new(0.0, 0.0));
        for (_, k) in &self.outcomes {
            sum = sum.add(&k.adjoint().matmul(k).expect("uniform dims")).expect("uniform dims");
        }
        sum.max_diff(&MatrixOp::identity(wires)).expect("uniform dims")
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &MatrixOp)> {
        self.outcomes.iter().map(|(l, k)| (l.as_str(), k))
    }

    pub fn get(&self, label: &str) -> Result<&MatrixOp> {
        self.outcomes
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, k)| k)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// Transition amplitudes `a, b, c, d` of the four path operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeQuad {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AmplitudeQuad {
    pub fn get(&self, path: PathLabel) -> f64 {
        self.as_array()[path.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `a + b + c + d = ⟨Φ|ψ⟩`
    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }

    /// Always `1/2`.
    pub fn sum_sq(&self) -> f64 {
        self.as_array().iter().map(|x| x * x).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue(pub C64);

impl WeakValue {
    pub fn value(self) -> C64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }
}

pub fn transition_amplitudes(angles: &SelectionAngles) -> AmplitudeQuad {
    let (ct, st) = (angles.theta.cos(), angles.theta.sin());
    let (cp, sp) = (angles.phi.cos(), angles.phi.sin());
    AmplitudeQuad {
        a: ct * cp * FRAC_1_SQRT_2,
        b: st * cp * FRAC_1_SQRT_2,
        c: ct * sp * FRAC_1_SQRT_2,
        d: -st * sp * FRAC_1_SQRT_2,
    }
}

/// ABL probabilities for every outcome of `kraus`, in the set's order.
///
/// The ratio normalizes over the listed outcomes, so sets that are not
/// trace preserving are accepted.
pub fn abl_distribution(tsv: &TwoStateVector, kraus: &KrausSet) -> Result<Vec<(String, f64)>> {
    let weights = kraus
        .iter()
        .map(|(l, k)| Ok((l.to_string(), tsv.transition(k)?.norm_sqr())))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if total < ABL_DENOM_TOL {
        return Err(Error::VanishingDenominator(total));
    }
    Ok(weights.into_iter().map(|(l, w)| (l, w / total)).collect())
}

/// `|⟨Φ|K_k|ψ⟩|² / Σ_j |⟨Φ|K_j|ψ⟩|²`
pub fn abl_probability(tsv: &TwoStateVector, kraus: &KrausSet, label: &str) -> Result<f64> {
    kraus.get(label)?;
    abl_distribution(tsv, kraus)?
        .into_iter()
        .find(|(l, _)| l == label)
        .map(|(_, p)| p)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

/// `⟨Φ|op|ψ⟩ / ⟨Φ|ψ⟩`
pub fn weak_value(tsv: &TwoStateVector, op: &MatrixOp) -> Result<WeakValue> {
    let overlap = tsv.nonorthogonal_overlap()?;
    Ok(WeakValue(tsv.transition(op)? / overlap))
}

/// The measurement schemes of the path setup.
#[derive(Debug, Clone)]
pub struct SequentialKrausSets {
    /// `A, B, C, D` in path order.
    pub paths: [MatrixOp; 4],
    /// `M_E = A + D`
    pub even: MatrixOp,
    /// `M_O = B + C`
    pub odd: MatrixOp,
    /// `{A, B, C, D}`: a Z then an X measurement, each read out.
    pub sequence: KrausSet,
    /// `{M_E, M_O}`: one meter sees only the product of the two results.
    pub modular: KrausSet,
    /// `{X, 1 − X}` for each path, in path order. Not trace preserving.
    pub distinct: [KrausSet; 4],
}

impl SequentialKrausSets {
    pub fn path(&self, path: PathLabel) -> &MatrixOp {
        &self.paths[path.index()]
    }

    pub fn distinct(&self, path: PathLabel) -> &KrausSet {
        &self.distinct[path.index()]
    }

    pub fn for_scheme(&self, scheme: Scheme) -> Vec<&KrausSet> {
        match scheme {
            Scheme::Sequence => vec![&self.sequence],
            Scheme::Modular => vec![&self.modular],
            Scheme::DistinctPath => self.distinct.iter().collect(),
        }
    }

    /// `σ_XZ = M_E − M_O`
    pub fn sigma_xz(&self) -> MatrixOp {
        self.even.sub(&self.odd).expect("2x2")
    }
}

pub const EVEN_LABEL: &str = "ME";
pub const ODD_LABEL: &str = "MO";

pub fn complement_label(path: PathLabel) -> String {
    format!("1-{}", path.name())
}

pub fn sequential_kraus_sets() -> SequentialKrausSets {
    let paths = PathLabel::ALL.map(PathLabel::operator);
    let even = paths[0].add(&paths[3]).expect("2x2");
    let odd = paths[1].add(&paths[2]).expect("2x2");
    let sequence = KrausSet::new(PathLabel::ALL.iter().map(|p| (p.name(), p.operator())))
        .and_then(KrausSet::with_completeness)
        .expect("path operators are complete");
    let modular = KrausSet::new([(EVEN_LABEL, even.clone()), (ODD_LABEL, odd.clone())])
        .and_then(KrausSet::with_completeness)
        .expect("modular operators are complete");
    let distinct = PathLabel::ALL.map(|p| {
        let x = p.operator();
        let rest = MatrixOp::identity(1).sub(&x).expect("2x2");
        KrausSet::new([(p.name().to_string(), x), (complement_label(p), rest)]).expect("two labels")
    });
    SequentialKrausSets {
        paths,
        even,
        odd,
        sequence,
        modular,
        distinct,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Sequence,
    Modular,
    DistinctPath,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Sequence => "sequence",
            Scheme::Modular => "modular",
            Scheme::DistinctPath => "distinctPath",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequence" => Ok(Scheme::Sequence),
            "modular" => Ok(Scheme::Modular),
            "distinctPath" | "distinct-path" | "distinct" => Ok(Scheme::DistinctPath),
            other => Err(Error::InvalidArgument(format!("scheme `{other}`"))),
        }
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den < ABL_DENOM_TOL {
        return Err(Error::VanishingDenominator(den));
    }
    Ok(num / den)
}

/// Closed-form click probability `x² / (x² + (S − x)²)` of the distinct-path
/// measurement for `path`, where `S = a + b + c + d`.
pub fn distinct_path_probability(q: &AmplitudeQuad, path: PathLabel) -> Result<f64> {
    let x = q.get(path);
    let rest = q.sum() - x;
    ratio(x * x, x * x + rest * rest)
}

/// Closed-form `(label, probability)` pairs for one scheme.
pub fn closed_form_probabilities(angles: &SelectionAngles, scheme: Scheme) -> Result<Vec<(String, f64)>> {
    let q = transition_amplitudes(angles);
    match scheme {
        Scheme::Sequence => {
            let den = q.sum_sq();
            PathLabel::ALL
                .iter()
                .map(|&p| Ok((p.name().to_string(), ratio(q.get(p).powi(2), den)?)))
                .collect()
        }
        Scheme::Modular => {
            let even = (q.a + q.d).powi(2);
            let odd = (q.b + q.c).powi(2);
            Ok(vec![
                (EVEN_LABEL.to_string(), ratio(even, even + odd)?),
                (ODD_LABEL.to_string(), ratio(odd, even + odd)?),
            ])
        }
        Scheme::DistinctPath => PathLabel::ALL
            .iter()
            .map(|&p| Ok((p.name().to_string(), distinct_path_probability(&q, p)?)))
            .collect(),
    }
}

/// Closed-form probability table for one scheme at one angle pair.
///
/// For the distinct-path scheme each row is the click probability of a
/// separate experiment, so the rows do not sum to one.
pub fn scenario_probabilities(angles: &SelectionAngles, scheme: Scheme) -> Result<ScenarioTable> {
    let probs = closed_form_probabilities(angles, scheme)?;
    Ok(probs
        .into_iter()
        .map(|(label, p)| {
            Row::new(
                angles.theta,
                angles.phi,
                scheme.as_str(),
                label,
                Quantity::Probability,
                p,
                Source::ClosedForm,
            )
        })
        .collect())
}

/// Closed-form path weak values `x / (a + b + c + d)`.
pub fn path_weak_values(angles: &SelectionAngles) -> Result<[f64; 4]> {
    let q = transition_amplitudes(angles);
    let s = q.sum();
    if s.abs() < OVERLAP_TOL {
        return Err(Error::Orthogonal(s.abs()));
    }
    Ok(q.as_array().map(|x| x / s))
}

/// One root of the deterministic-path condition with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicRoot {
    pub root: GoldenRoot,
    pub cot: f64,
    pub angles: SelectionAngles,
    /// `cot² + cot − 1`
    pub residual: f64,
    /// `a + c + d`, zero when path B clicks with certainty.
    pub acd_sum: f64,
    /// `a + b + d`, zero when path C clicks with certainty.
    pub abd_sum: f64,
}

/// Both solutions of `cot θ = cot φ`, `cot²φ + cot φ − 1 = 0`, positive root
/// first.
pub fn deterministic_angles() -> [DeterministicRoot; 2] {
    [GoldenRoot::Positive, GoldenRoot::Negative].map(|root| {
        let cot = root.cot();
        let angles = SelectionAngles::golden(root);
        let q = transition_amplitudes(&angles);
        DeterministicRoot {
            root,
            cot,
            angles,
            residual: cot * cot + cot - 1.0,
            acd_sum: q.a + q.c + q.d,
            abd_sum: q.a + q.b + q.d,
        }
    })
}

/// Leading-order two-meter correlation predicted from weak values:
/// `(g²/2) Re[{A₂A₁}_w + {A₁}_w conj({A₂}_w)]`.
pub fn resch_steinberg_rhs(tsv: &TwoStateVector, a1: &MatrixOp, a2: &MatrixOp, g: f64) -> Result<f64> {
    let w21 = weak_value(tsv, &a2.matmul(a1)?)?.value();
    let w1 = weak_value(tsv, a1)?.value();
    let w2 = weak_value(tsv, a2)?.value();
    Ok(0.5 * g * g * (w21 + w1 * w2.conj()).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 1.0172219679;

    fn tsv(theta: f64, phi: f64) -> TwoStateVector {
        SelectionAngles::new(theta, phi).unwrap().two_state_vector()
    }

    #[test]
    fn amplitudes_at_zero() {
        let q = transition_amplitudes(&SelectionAngles::new(0.0, 0.0).unwrap());
        assert!((q.a - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!([q.b, q.c, q.d], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn amplitudes_at_quarter_pi() {
        let q = transition_amplitudes(&SelectionAngles::new(PI / 4.0, PI / 4.0).unwrap());
        for (x, e) in q.as_array().iter().zip([0.3535534, 0.3535534, 0.3535534, -0.3535534]) {
            assert!((x - e).abs() < 1e-7);
        }
    }

    #[test]
    fn amplitudes_at_golden_angle() {
        let q = transition_amplitudes(&SelectionAngles::new(GOLDEN, GOLDEN).unwrap());
        for (x, e) in q.as_array().iter().zip([0.1954395, 0.3162278, 0.3162278, -0.5116673]) {
            assert!((x - e).abs() < 1e-7);
        }
        let exact = transition_amplitudes(&SelectionAngles::golden(GoldenRoot::Positive));
        assert!((exact.a + exact.c + exact.d).abs() < 1e-12);
    }

    #[test]
    fn path_operators_match_outer_products() {
        let r2 = FRAC_1_SQRT_2;
        let sets = sequential_kraus_sets();
        let expect = [
            MatrixOp::outer(&Ket::plus(), &Ket::zero()).unwrap().scale(C64::new(r2, 0.0)),
            MatrixOp::outer(&Ket::plus(), &Ket::one()).unwrap().scale(C64::new(r2, 0.0)),
            MatrixOp::outer(&Ket::minus(), &Ket::zero()).unwrap().scale(C64::new(r2, 0.0)),
            MatrixOp::outer(&Ket::minus(), &Ket::one()).unwrap().scale(C64::new(-r2, 0.0)),
        ];
        for (got, want) in sets.paths.iter().zip(&expect) {
            assert!(got.approx_eq(want, 1e-15), "{got:?} vs {want:?}");
        }
        let sum = sets.paths[1..]
            .iter()
            .fold(sets.paths[0].clone(), |acc, k| acc.add(k).unwrap());
        assert!(sum.approx_eq(&MatrixOp::identity(1), 1e-15));
    }

    #[test]
    fn modular_operators() {
        let sets = sequential_kraus_sets();
        let iy = MatrixOp::pauli_y().scale(C64::new(0.0, 1.0));
        let half = C64::new(0.5, 0.0);
        let me = MatrixOp::identity(1).sub(&iy).unwrap().scale(half);
        let mo = MatrixOp::identity(1).add(&iy).unwrap().scale(half);
        assert!(sets.even.approx_eq(&me, 1e-15));
        assert!(sets.odd.approx_eq(&mo, 1e-15));
        assert!(sets.modular.completeness_residual() < 1e-15);
        assert!(sets.modular.is_complete() && sets.sequence.is_complete());
        assert!(sets.distinct.iter().all(|k| !k.is_complete()));
        assert!(sets.distinct[0].completeness_residual() > 0.1);
    }

    #[test]
    fn kraus_set_validation() {
        assert_eq!(KrausSet::new(Vec::<(String, MatrixOp)>::new()), Err(Error::EmptyKrausSet));
        let dup = KrausSet::new([("x", MatrixOp::pauli_x()), ("x", MatrixOp::pauli_z())]);
        assert_eq!(dup, Err(Error::DuplicateLabel("x".into())));
        let mixed = KrausSet::new([("x", MatrixOp::pauli_x()), ("i", MatrixOp::identity(2))]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
        let half = KrausSet::new([("p0", MatrixOp::projector(&Ket::zero()).unwrap())]).unwrap();
        assert!(matches!(half.with_completeness(), Err(Error::Incomplete(_))));
    }

    #[test]
    fn abl_trivial_case() {
        let sets = sequential_kraus_sets();
        let t = tsv(0.0, 0.0);
        assert!((abl_probability(&t, &sets.sequence, "A").unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            abl_probability(&t, &sets.sequence, "Q"),
            Err(Error::UnknownLabel("Q".into()))
        );
    }

    #[test]
    fn abl_golden_sequence_and_distinct() {
        let sets = sequential_kraus_sets();
        let t = tsv(GOLDEN, GOLDEN);
        let dist = abl_distribution(&t, &sets.sequence).unwrap();
        for ((_, p), e) in dist.iter().zip([0.0763932, 0.2, 0.2, 0.5236068]) {
            assert!((p - e).abs() < 1e-7, "{p} vs {e}");
        }
        let exact = SelectionAngles::golden(GoldenRoot::Positive).two_state_vector();
        let pb = abl_probability(&exact, sets.distinct(PathLabel::B), "B").unwrap();
        assert!((pb - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forbidden_pair_is_rejected() {
        // θ = π/2, φ = π/4: a = 0 and ⟨Φ|ψ⟩ = 0, so {A, 1−A} has no weight
        let sets = sequential_kraus_sets();
        let t = tsv(PI / 2.0, PI / 4.0);
        assert!(matches!(
            abl_probability(&t, sets.distinct(PathLabel::A), "A"),
            Err(Error::VanishingDenominator(_))
        ));
        assert!(matches!(weak_value(&t, &MatrixOp::pauli_z()), Err(Error::Orthogonal(_))));
        // the four-outcome scheme is still defined there
        assert!(abl_distribution(&t, &sets.sequence).is_ok());
    }

    #[test]
    fn weak_values() {
        let t = tsv(0.0, 0.0);
        assert!((weak_value(&t, &MatrixOp::pauli_z()).unwrap().re() - 1.0).abs() < 1e-15);

        let sets = sequential_kraus_sets();
        let t = tsv(GOLDEN, GOLDEN);
        let got: Vec<f64> = sets.paths.iter().map(|k| weak_value(&t, k).unwrap().re()).collect();
        for (x, e) in got.iter().zip([0.6180340, 1.0, 1.0, -1.6180340]) {
            assert!((x - e).abs() < 1e-6, "{x} vs {e}");
        }

        let t = tsv(PI / 4.0, PI / 4.0);
        assert!(weak_value(&t, &sets.even).unwrap().value().norm() < 1e-15);
        assert!((weak_value(&t, &sets.odd).unwrap().re() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scenario_tables() {
        let quarter = SelectionAngles::new(PI / 4.0, PI / 4.0).unwrap();
        let t = scenario_probabilities(&quarter, Scheme::Modular).unwrap();
        let me = t.value("modular", "ME", Quantity::Probability, Source::ClosedForm).unwrap();
        let mo = t.value("modular", "MO", Quantity::Probability, Source::ClosedForm).unwrap();
        assert!(me.abs() < 1e-15 && (mo - 1.0).abs() < 1e-15);

        let golden = SelectionAngles::new(GOLDEN, GOLDEN).unwrap();
        let t = scenario_probabilities(&golden, Scheme::DistinctPath).unwrap();
        let vals: Vec<f64> = t.iter().map(|r| r.value).collect();
        for (x, e) in vals.iter().zip([0.7236068, 1.0, 1.0, 0.2763932]) {
            assert!((x - e).abs() < 1e-6, "{x} vs {e}");
        }

        let zero = SelectionAngles::new(0.0, 0.0).unwrap();
        let t = scenario_probabilities(&zero, Scheme::Sequence).unwrap();
        let vals: Vec<f64> = t.iter().map(|r| r.value).collect();
        assert_eq!(vals, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn golden_roots() {
        let [pos, neg] = deterministic_angles();
        assert!((pos.cot - 0.6180340).abs() < 1e-7);
        assert!((pos.angles.theta - 1.0172220).abs() < 1e-7);
        assert!((neg.cot + 1.6180340).abs() < 1e-7);
        for r in [pos, neg] {
            assert!(r.residual.abs() < 1e-12);
            assert!(r.acd_sum.abs() < 1e-12 && r.abd_sum.abs() < 1e-12);
            assert!((1.0 / r.angles.theta.tan() - r.cot).abs() < 1e-12);
        }
    }

    #[test]
    fn resch_steinberg_values() {
        let p1 = MatrixOp::projector(&Ket::one()).unwrap();
        let pp = MatrixOp::projector(&Ket::plus()).unwrap();
        let golden = SelectionAngles::golden(GoldenRoot::Positive).two_state_vector();
        for g in [0.01, 0.3, 1.0] {
            assert!(resch_steinberg_rhs(&golden, &p1, &pp, g).unwrap().abs() < 1e-12);
        }
        let quarter = tsv(PI / 4.0, PI / 4.0);
        let rhs = resch_steinberg_rhs(&quarter, &p1, &pp, 0.1).unwrap();
        assert!((rhs - 0.0025).abs() < 1e-15);
        let id = MatrixOp::identity(1);
        let rhs = resch_steinberg_rhs(&tsv(0.0, 0.0), &id, &id, 0.3).unwrap();
        assert!((rhs - 0.09).abs() < 1e-15);
    }

    #[test]
    fn path_labels() {
        for p in PathLabel::ALL {
            assert_eq!(p.name().parse::<PathLabel>().unwrap(), p);
            assert_eq!(p.swapped().swapped(), p);
            assert_eq!(PathLabel::ALL[p.index()], p);
        }
        assert_eq!(PathLabel::A.swapped(), PathLabel::C);
        assert_eq!(PathLabel::B.swapped(), PathLabel::D);
        assert!("E".parse::<PathLabel>().is_err());
    }

    #[test]
    fn canonical_angles() {
        let a = SelectionAngles::new(-0.5, 4.0).unwrap().canonical();
        assert!((a.theta - (PI - 0.5)).abs() < 1e-15);
        assert!((a.phi - (4.0 - PI)).abs() < 1e-15);
    }
}
