//! Variable-strength measurement of a single path operator through the
//! erasure scheme.
//!
//! Three wires: system (0), ancilla (1), meter (2). The circuit is
//!
//! 1. `|Ψ₁⟩ = |ψ⟩|0⟩|0⟩`
//! 2. CNOT system → ancilla records the Z value: `|Ψ₂⟩`
//! 3. `C_{ij}R(g)` rotates the meter by `R(g) = exp(igσx)` when the system is
//!    `|i⟩` (X basis) and the ancilla is `|j⟩` (Z basis): `|Ψ₃⟩`
//! 4. the ancilla is measured in the X basis and discarded; `+` is a
//!    successful erasure, `−` a failed one
//! 5. the system is post-selected on `⟨Φ|`, leaving the meter.
//!
//! Both erasure branches are kept. Branch states are unnormalized with
//! squared norm equal to the joint probability of the branch, which makes
//! them half of the textbook `|Ψ₄⟩`, `|Ψ₅⟩` expressions.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rayon::prelude::*;

use crate::qcore::{apply_gate, contract_wire, Ket, MatrixOp, OutcomeSampler};
use crate::tsvf::SelectionAngles;
use crate::{Error, Result, C64};

pub use crate::tsvf::{PathLabel, XSign};

pub const SYSTEM: usize = 0;
pub const ANCILLA: usize = 1;
pub const METER: usize = 2;

/// Smallest joint post-selection probability treated as a usable branch.
pub const POSTSELECTION_TOL: f64 = 1e-24;

/// Coupling strength. `s ∈ [0, 1]` maps to the rotation angle `g = s·π/2`,
/// so `s = 1` leaves the meter in an orthogonal pointer state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strength {
    s: f64,
    g: f64,
}

impl Strength {
    pub const STRONG: Strength = Strength { s: 1.0, g: FRAC_PI_2 };
    pub const OFF: Strength = Strength { s: 0.0, g: 0.0 };

    pub fn from_normalized(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidStrength(s));
        }
        Ok(Strength { s, g: s * FRAC_PI_2 })
    }

    /// Raw rotation angle `g ∈ [0, π/2]`.
    pub fn from_angle(g: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&g) {
            return Err(Error::InvalidStrength(g));
        }
        Ok(Strength { s: g / FRAC_PI_2, g })
    }

    pub fn s(self) -> f64 {
        self.s
    }

    pub fn g(self) -> f64 {
        self.g
    }
}

/// The set of paths on which the meter is rotated.
///
/// A single path gives the distinct-path measurement; `{A, D}` and `{B, C}`
/// give the two outcomes of the modular measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coupling(u8);

impl Coupling {
    pub fn single(path: PathLabel) -> Self {
        Coupling(1 << path.index())
    }

    pub fn from_paths(paths: &[PathLabel]) -> Self {
        Coupling(paths.iter().fold(0, |m, p| m | (1 << p.index())))
    }

    /// `M_E = A + D`
    pub fn even() -> Self {
        Self::from_paths(&[PathLabel::A, PathLabel::D])
    }

    /// `M_O = B + C`
    pub fn odd() -> Self {
        Self::from_paths(&[PathLabel::B, PathLabel::C])
    }

    pub fn contains(self, path: PathLabel) -> bool {
        self.0 & (1 << path.index()) != 0
    }

    pub fn paths(self) -> impl Iterator<Item = PathLabel> {
        PathLabel::ALL.into_iter().filter(move |p| self.contains(*p))
    }

    pub fn single_path(self) -> Option<PathLabel> {
        let mut it = self.paths();
        match (it.next(), it.next()) {
            (Some(p), None) => Some(p),
            _ => None,
        }
    }

    /// Image under a σz on the system: every `i` flips.
    pub fn swapped(self) -> Self {
        Coupling(self.paths().fold(0, |m, p| m | (1 << p.swapped().index())))
    }

    /// Sum of the coupled path operators.
    pub fn operator(self) -> MatrixOp {
        self.paths()
            .map(PathLabel::operator)
            .reduce(|acc, k| acc.add(&k).expect("2x2"))
            .unwrap_or_else(|| MatrixOp::identity(1).scale(C64::new(0.0, 0.0)))
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Coupling::even() {
            return f.write_str("ME");
        }
        if *self == Coupling::odd() {
            return f.write_str("MO");
        }
        let names: Vec<&str> = self.paths().map(PathLabel::name).collect();
        f.write_str(&names.join("+"))
    }
}

/// CNOT with the first wire as control.
pub fn cnot() -> MatrixOp {
    MatrixOp::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .and_then(MatrixOp::into_unitary)
    .expect("cnot")
}

/// `R(g) = exp(igσx) = cos g I + i sin g σx`
pub fn rotation(g: f64) -> MatrixOp {
    let (c, s) = (C64::new(g.cos(), 0.0), C64::new(0.0, g.sin()));
    MatrixOp::new(2, vec![c, s, s, c])
        .and_then(MatrixOp::into_unitary)
        .expect("rotation")
}

/// `R_{ij}^{kl}(g)`: `R(g)` when the measured path equals the branch path,
/// identity otherwise.
pub fn branch_rotation(g: f64, measured: PathLabel, branch: PathLabel) -> MatrixOp {
    if measured == branch {
        rotation(g)
    } else {
        MatrixOp::identity(1)
    }
}

/// `Σ_{(i,j)} |i⟩⟨i| ⊗ |j⟩⟨j| ⊗ (R(g) if (i,j) is coupled else I)` on
/// system, ancilla, meter.
pub fn controlled_rotation(g: f64, coupling: Coupling) -> MatrixOp {
    let r = rotation(g);
    let id = MatrixOp::identity(1);
    PathLabel::ALL
        .iter()
        .map(|&p| {
            let sys = MatrixOp::projector(&p.i.ket()).expect("qubit");
            let anc = MatrixOp::projector(&Ket::basis(1, p.j as usize).expect("bit")).expect("qubit");
            let meter = if coupling.contains(p) { &r } else { &id };
            sys.tensor(&anc).tensor(meter)
        })
        .reduce(|acc, term| acc.add(&term).expect("8x8"))
        .expect("four terms")
        .into_unitary()
        .expect("controlled rotation is unitary")
}

/// The gate family of one distinct-path measurement.
#[derive(Debug, Clone)]
pub struct ErasureGates {
    pub cnot: MatrixOp,
    pub rotation: MatrixOp,
    pub controlled: MatrixOp,
    /// `R_{ij}^{kl}(g)` for `(k, l)` in `A, B, C, D` order.
    pub branch: [MatrixOp; 4],
}

pub fn build_gates(strength: Strength, path: PathLabel) -> ErasureGates {
    let g = strength.g();
    ErasureGates {
        cnot: cnot(),
        rotation: rotation(g),
        controlled: controlled_rotation(g, Coupling::single(path)),
        branch: PathLabel::ALL.map(|k| branch_rotation(g, path, k)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Erasure {
    Success,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostSelection {
    /// Found in `|Φ⟩`.
    Accepted,
    /// Found in `|Φ⊥⟩`.
    Rejected,
}

/// One erasure outcome and what post-selection leaves of it.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// System ⊗ meter after the ancilla is measured and discarded.
    pub state: Ket,
    pub probability: f64,
    /// `⟨Φ|` applied to the system; unnormalized meter state.
    pub meter: Ket,
    /// Joint probability of this branch and a successful post-selection.
    pub postselection_probability: f64,
    /// `⟨Φ⊥|` applied to the system.
    pub rejected_meter: Ket,
    pub rejection_probability: f64,
}

impl Branch {
    fn from_state(state: Ket, post: &Ket) -> Result<Self> {
        let meter = contract_wire(&state, 0, post)?;
        let rejected_meter = contract_wire(&state, 0, &post.orthogonal_complement()?)?;
        Ok(Branch {
            probability: state.norm_sqr(),
            postselection_probability: meter.norm_sqr(),
            rejection_probability: rejected_meter.norm_sqr(),
            state,
            meter,
            rejected_meter,
        })
    }

    pub fn is_postselectable(&self) -> bool {
        self.postselection_probability >= POSTSELECTION_TOL
    }

    /// `P(Φ | this branch)`
    pub fn conditional_postselection(&self) -> Result<f64> {
        if self.probability < POSTSELECTION_TOL {
            return Err(Error::DegenerateBranch("branch has zero probability".into()));
        }
        Ok(self.postselection_probability / self.probability)
    }

    /// Meter state conditioned on this branch and `Φ`.
    pub fn normalized_meter(&self) -> Result<Ket> {
        if !self.is_postselectable() {
            return Err(Error::DegenerateBranch("post-selection probability vanishes".into()));
        }
        self.meter.normalize()
    }

    /// `P(meter reads 1 | this branch, Φ)` for a Z readout.
    pub fn click_probability(&self) -> Result<f64> {
        let m = self.normalized_meter()?;
        Ok(m.amplitude(1).norm_sqr())
    }

    fn joint(&self) -> [f64; 4] {
        [
            self.meter.amplitude(0).norm_sqr(),
            self.meter.amplitude(1).norm_sqr(),
            self.rejected_meter.amplitude(0).norm_sqr(),
            self.rejected_meter.amplitude(1).norm_sqr(),
        ]
    }
}

/// Full record of one run of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub angles: SelectionAngles,
    pub coupling: Coupling,
    pub strength: Strength,
    pub psi1: Ket,
    pub psi2: Ket,
    pub psi3: Ket,
    pub success: Branch,
    pub fail: Branch,
    /// Set by [`correct_failed_erasure`]; the intermediate states then still
    /// describe the physical run.
    pub corrected: bool,
}

impl ProtocolOutcome {
    pub fn path(&self) -> Option<PathLabel> {
        self.coupling.single_path()
    }

    pub fn branch(&self, erasure: Erasure) -> &Branch {
        match erasure {
            Erasure::Success => &self.success,
            Erasure::Fail => &self.fail,
        }
    }

    /// Joint probabilities indexed by [`ShotTally::index`].
    pub fn joint_distribution(&self) -> [f64; 8] {
        let (s, f) = (self.success.joint(), self.fail.joint());
        [s[0], s[1], s[2], s[3], f[0], f[1], f[2], f[3]]
    }
}

/// Runs the circuit measuring one path operator.
pub fn run_protocol(angles: &SelectionAngles, path: PathLabel, strength: Strength) -> Result<ProtocolOutcome> {
    run_coupled_protocol(angles, Coupling::single(path), strength)
}

/// Runs the circuit with the meter coupled to every path in `coupling`.
pub fn run_coupled_protocol(
    angles: &SelectionAngles,
    coupling: Coupling,
    strength: Strength,
) -> Result<ProtocolOutcome> {
    let post = angles.post_ket();
    let psi1 = angles.pre_ket().tensor(&Ket::zero()).tensor(&Ket::zero());
    let psi2 = apply_gate(&psi1, &cnot(), &[SYSTEM, ANCILLA])?;
    let psi3 = apply_gate(
        &psi2,
        &controlled_rotation(strength.g(), coupling),
        &[SYSTEM, ANCILLA, METER],
    )?;
    let success = Branch::from_state(contract_wire(&psi3, ANCILLA, &Ket::plus())?, &post)?;
    let fail = Branch::from_state(contract_wire(&psi3, ANCILLA, &Ket::minus())?, &post)?;
    if !success.is_postselectable() && !fail.is_postselectable() {
        return Err(Error::Unpostselectable);
    }
    Ok(ProtocolOutcome {
        angles: *angles,
        coupling,
        strength,
        psi1,
        psi2,
        psi3,
        success,
        fail,
        corrected: false,
    })
}

/// Applies σz to the system of both erasure branches and relabels the
/// measured paths `A↔C`, `B↔D`. The corrected failure branch becomes the
/// success branch of the returned outcome.
pub fn correct_failed_erasure(outcome: &ProtocolOutcome) -> Result<ProtocolOutcome> {
    let post = outcome.angles.post_ket();
    let z = MatrixOp::pauli_z();
    let flip = |b: &Branch| -> Result<Branch> {
        Branch::from_state(apply_gate(&b.state, &z, &[0])?, &post)
    };
    Ok(ProtocolOutcome {
        angles: outcome.angles,
        coupling: outcome.coupling.swapped(),
        strength: outcome.strength,
        psi1: outcome.psi1.clone(),
        psi2: outcome.psi2.clone(),
        psi3: outcome.psi3.clone(),
        success: flip(&outcome.fail)?,
        fail: flip(&outcome.success)?,
        corrected: !outcome.corrected,
    })
}

/// Reads the weak value off the successful, post-selected meter.
///
/// The real part is the pointer's rotation angle `atan2(⟨σy⟩, ⟨σz⟩)/2`
/// divided by `g`, which equals `arcsin(⟨σy⟩)/(2g)` whenever the rotation is
/// below π/4 and stays exact for a pure pointer `R(g)|0⟩` up to `g = π/2`.
/// The imaginary part is `−⟨σx⟩/(2g)`.
pub fn estimate_weak_value(outcome: &ProtocolOutcome) -> Result<C64> {
    let g = outcome.strength.g();
    if g <= 0.0 {
        return Err(Error::DegenerateBranch("zero coupling carries no pointer shift".into()));
    }
    let m = outcome.success.normalized_meter()?;
    let x = MatrixOp::pauli_x().expectation(&m)?.re;
    let y = MatrixOp::pauli_y().expectation(&m)?.re;
    let z = MatrixOp::pauli_z().expectation(&m)?.re;
    let mut angle = y.atan2(z);
    // a rotation by π and by −π give the same ray; report +π
    if angle <= -PI + 1e-12 {
        angle += 2.0 * PI;
    }
    Ok(C64::new(angle / (2.0 * g), -x / (2.0 * g)))
}

/// Counts of sampled `(erasure, post-selection, meter Z readout)` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotTally {
    counts: [u64; 8],
    pub seed: u64,
    pub shots: u64,
}

impl ShotTally {
    pub fn empty(seed: u64) -> Self {
        ShotTally {
            counts: [0; 8],
            seed,
            shots: 0,
        }
    }

    pub fn index(erasure: Erasure, post: PostSelection, meter: u8) -> usize {
        let e = match erasure {
            Erasure::Success => 0,
            Erasure::Fail => 4,
        };
        let p = match post {
            PostSelection::Accepted => 0,
            PostSelection::Rejected => 2,
        };
        e + p + (meter & 1) as usize
    }

    pub fn count(&self, erasure: Erasure, post: PostSelection, meter: u8) -> u64 {
        self.counts[Self::index(erasure, post, meter)]
    }

    pub fn counts(&self) -> &[u64; 8] {
        &self.counts
    }

    fn record(&mut self, index: usize) {
        self.counts[index] += 1;
        self.shots += 1;
    }

    /// Associative merge of two tallies with the same seed.
    pub fn merge(mut self, other: &ShotTally) -> Self {
        for (c, o) in self.counts.iter_mut().zip(other.counts) {
            *c += o;
        }
        self.shots += other.shots;
        self
    }

    /// Shots with a successful erasure and post-selection.
    pub fn accepted_successes(&self) -> u64 {
        self.count(Erasure::Success, PostSelection::Accepted, 0)
            + self.count(Erasure::Success, PostSelection::Accepted, 1)
    }

    /// Fraction of accepted successful shots where the meter read 1.
    pub fn click_frequency(&self) -> Option<f64> {
        let n = self.accepted_successes();
        (n > 0).then(|| self.count(Erasure::Success, PostSelection::Accepted, 1) as f64 / n as f64)
    }
}

const DEFAULT_CHUNK: u64 = 8192;

/// Samples `shots` runs of the circuit from its exact joint distribution.
pub fn sample_protocol(
    angles: &SelectionAngles,
    path: PathLabel,
    strength: Strength,
    shots: u64,
    seed: u64,
) -> Result<ShotTally> {
    let outcome = run_protocol(angles, path, strength)?;
    sample_outcome_shots(&outcome, shots, seed, DEFAULT_CHUNK)
}

/// Samples from an already computed outcome, splitting the shots into
/// parallel chunks of `chunk` draws. The tally does not depend on `chunk`.
pub fn sample_outcome_shots(outcome: &ProtocolOutcome, shots: u64, seed: u64, chunk: u64) -> Result<ShotTally> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    if chunk == 0 {
        return Err(Error::InvalidArgument("chunk size must be at least 1".into()));
    }
    let sampler = OutcomeSampler::new(&outcome.joint_distribution())?;
    let chunks = shots.div_ceil(chunk);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = ShotTally::empty(seed);
            let first = c * chunk;
            for k in sampler.sample_run(seed, first, chunk.min(shots - first)) {
                t.record(k);
            }
            t
        })
        .reduce(|| ShotTally::empty(seed), |a, b| a.merge(&b));
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsvf::GoldenRoot;

    fn angles(t: f64, p: f64) -> SelectionAngles {
        SelectionAngles::new(t, p).unwrap()
    }

    #[test]
    fn strength_range() {
        assert!(Strength::from_normalized(1.2).is_err());
        assert!(Strength::from_normalized(-0.1).is_err());
        assert!(Strength::from_angle(2.0).is_err());
        let s = Strength::from_normalized(0.5).unwrap();
        assert!((s.g() - PI / 4.0).abs() < 1e-15);
        assert_eq!(Strength::from_normalized(1.0).unwrap(), Strength::STRONG);
    }

    #[test]
    fn rotation_limits() {
        assert!(rotation(0.0).approx_eq(&MatrixOp::identity(1), 0.0));
        let r = rotation(FRAC_PI_2).apply_to(&Ket::zero()).unwrap();
        let expect = Ket::new(vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!(r.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn controlled_rotation_leaves_other_paths() {
        let g = 0.8;
        let gates = build_gates(Strength::from_angle(g).unwrap(), PathLabel::A);
        let other = Ket::minus().tensor(&Ket::zero()).tensor(&Ket::zero());
        let out = apply_gate(&other, &gates.controlled, &[0, 1, 2]).unwrap();
        assert!(out.approx_eq(&other, 1e-15));
        let hit = Ket::plus().tensor(&Ket::zero()).tensor(&Ket::zero());
        let out = apply_gate(&hit, &gates.controlled, &[0, 1, 2]).unwrap();
        let expect = Ket::plus()
            .tensor(&Ket::zero())
            .tensor(&rotation(g).apply_to(&Ket::zero()).unwrap());
        assert!(out.approx_eq(&expect, 1e-15));
        for (k, b) in PathLabel::ALL.iter().zip(&gates.branch) {
            let want = if *k == PathLabel::A { rotation(g) } else { MatrixOp::identity(1) };
            assert!(b.approx_eq(&want, 0.0));
        }
    }

    #[test]
    fn coupling_sets() {
        assert_eq!(Coupling::single(PathLabel::A).swapped(), Coupling::single(PathLabel::C));
        assert_eq!(Coupling::even().swapped(), Coupling::odd());
        assert_eq!(Coupling::even().to_string(), "ME");
        assert_eq!(Coupling::single(PathLabel::D).single_path(), Some(PathLabel::D));
        assert_eq!(Coupling::even().single_path(), None);
    }

    #[test]
    fn golden_path_c_points_at_g() {
        let a = SelectionAngles::golden(GoldenRoot::Positive);
        for s in [0.05, 0.3, 0.7, 1.0] {
            let st = Strength::from_normalized(s).unwrap();
            let out = run_protocol(&a, PathLabel::C, st).unwrap();
            let m = out.success.normalized_meter().unwrap();
            let pointer = rotation(st.g()).apply_to(&Ket::zero()).unwrap();
            assert!((m.fidelity(&pointer).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_selection_strong() {
        let out = run_protocol(&angles(0.0, 0.0), PathLabel::A, Strength::STRONG).unwrap();
        assert!((out.success.click_probability().unwrap() - 1.0).abs() < 1e-15);
        let m = out.success.normalized_meter().unwrap();
        let i1 = Ket::new(vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!(m.approx_eq(&i1, 1e-15));
    }

    #[test]
    fn golden_path_a_strong_click() {
        let a = SelectionAngles::new(1.0172219679, 1.0172219679).unwrap();
        let out = run_protocol(&a, PathLabel::A, Strength::STRONG).unwrap();
        assert!((out.success.click_probability().unwrap() - 0.7236068).abs() < 1e-7);
    }

    #[test]
    fn zero_strength_keeps_meter() {
        for (t, p) in [(0.3, 1.1), (2.0, -0.4), (1.0, 1.0)] {
            for path in PathLabel::ALL {
                let out = run_protocol(&angles(t, p), path, Strength::OFF).unwrap();
                assert!((out.success.probability - 0.5).abs() < 1e-15);
                let m = out.success.normalized_meter().unwrap();
                assert!(m.amplitude(1).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn branches_complete() {
        let out = run_protocol(&angles(0.4, 2.2), PathLabel::D, Strength::from_angle(0.6).unwrap()).unwrap();
        let total = out.success.probability + out.fail.probability;
        assert!((total - 1.0).abs() < 1e-14);
        let joint: f64 = out.joint_distribution().iter().sum();
        assert!((joint - 1.0).abs() < 1e-14);
    }

    #[test]
    fn estimate_needs_coupling() {
        let out = run_protocol(&angles(0.0, 0.0), PathLabel::A, Strength::OFF).unwrap();
        assert!(matches!(estimate_weak_value(&out), Err(Error::DegenerateBranch(_))));
    }

    #[test]
    fn estimate_on_trivial_path() {
        let out = run_protocol(&angles(0.0, 0.0), PathLabel::A, Strength::from_angle(0.01).unwrap()).unwrap();
        let w = estimate_weak_value(&out).unwrap();
        assert!((w.re - 1.0).abs() < 5e-4 && w.im.abs() < 1e-12);
    }

    #[test]
    fn correction_swaps_labels() {
        let out = run_protocol(&angles(0.3, 0.9), PathLabel::B, Strength::from_angle(0.4).unwrap()).unwrap();
        let fixed = correct_failed_erasure(&out).unwrap();
        assert_eq!(fixed.path(), Some(PathLabel::D));
        assert!(fixed.corrected);
        let back = correct_failed_erasure(&fixed).unwrap();
        assert_eq!(back.path(), Some(PathLabel::B));
        assert!(back.success.state.approx_eq(&out.success.state, 1e-15));
    }

    #[test]
    fn tally_bookkeeping() {
        let out = run_protocol(&angles(0.0, 0.0), PathLabel::A, Strength::STRONG).unwrap();
        assert!(sample_outcome_shots(&out, 0, 1, 10).is_err());
        let t = sample_outcome_shots(&out, 1000, 1, 64).unwrap();
        assert_eq!(t.counts().iter().sum::<u64>(), 1000);
        assert_eq!(t.shots, 1000);
        assert_eq!(t.click_frequency(), Some(1.0));
    }
}
