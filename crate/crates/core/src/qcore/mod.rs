//! Dense linear algebra over small qubit registers.
//!
//! Everything here is a pure function of immutable values. Amplitudes are
//! ordered big-endian: wire 0 is the most significant bit of the index.

mod ket;
mod matrix;
mod sample;

pub use ket::{Ket, NormTag, NORM_TOL};
pub use matrix::{MatrixOp, UNITARY_TOL};
pub use sample::{sample_outcome, uniform, DrawStream, OutcomeSampler, DISTRIBUTION_TOL};

use crate::{Error, Result, C64};

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `{|0⟩, |1⟩}`
    Z,
    /// `{|+⟩, |−⟩}`
    X,
}

impl Basis {
    /// The two basis kets, indexed by outcome.
    pub fn kets(self) -> [Ket; 2] {
        match self {
            Basis::Z => [Ket::zero(), Ket::one()],
            Basis::X => [Ket::plus(), Ket::minus()],
        }
    }

    pub fn ket(self, outcome: u8) -> Result<Ket> {
        match outcome {
            0 | 1 => Ok(self.kets()[outcome as usize].clone()),
            _ => Err(Error::InvalidArgument(format!("outcome {outcome}"))),
        }
    }
}

/// Either argument kind accepted by [`tensor`].
#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Ket(Ket),
    Op(MatrixOp),
}

impl From<Ket> for Operand {
    fn from(k: Ket) -> Self {
        Operand::Ket(k)
    }
}

impl From<MatrixOp> for Operand {
    fn from(m: MatrixOp) -> Self {
        Operand::Op(m)
    }
}

/// Kronecker product of two kets or two operators, `a`'s wires first.
pub fn tensor(a: &Operand, b: &Operand) -> Result<Operand> {
    match (a, b) {
        (Operand::Ket(x), Operand::Ket(y)) => Ok(Operand::Ket(x.tensor(y))),
        (Operand::Op(x), Operand::Op(y)) => Ok(Operand::Op(x.tensor(y))),
        _ => Err(Error::MixedKinds),
    }
}

#[inline]
fn bit(index: usize, wire: usize, n: usize) -> usize {
    (index >> (n - 1 - wire)) & 1
}

fn check_wires(wires: &[usize], n: usize) -> Result<()> {
    let bad = wires.iter().any(|&w| w >= n)
        || wires
            .iter()
            .enumerate()
            .any(|(i, w)| wires[..i].contains(w));
    if bad || wires.is_empty() {
        return Err(Error::InvalidWires {
            wires: wires.to_vec(),
            register: n,
        });
    }
    Ok(())
}

/// Embeds `gate` on `wires` (identity elsewhere) and applies it to `state`.
///
/// The first listed wire is the most significant bit of the gate's index.
pub fn apply_gate(state: &Ket, gate: &MatrixOp, wires: &[usize]) -> Result<Ket> {
    let n = state.wire_count();
    check_wires(wires, n)?;
    if gate.arity() != wires.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << wires.len(),
            found: gate.dim(),
        });
    }
    let k = wires.len();
    let mask: usize = wires.iter().map(|&w| 1usize << (n - 1 - w)).sum();
    let amps = state.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let row = wires
            .iter()
            .fold(0usize, |acc, &w| (acc << 1) | bit(idx, w, n));
        let base = idx & !mask;
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..gate.dim() {
            let mut src = base;
            for (pos, &w) in wires.iter().enumerate() {
                if (col >> (k - 1 - pos)) & 1 == 1 {
                    src |= 1 << (n - 1 - w);
                }
            }
            acc += gate.entry(row, col) * amps[src];
        }
        *slot = acc;
    }
    Ket::new(out)
}

/// Applies `gate` on its own target wires.
pub fn apply(state: &Ket, gate: &MatrixOp) -> Result<Ket> {
    apply_gate(state, gate, gate.target_wires())
}

/// Projects `wire` onto the basis ket selected by `outcome`.
///
/// The branch is not renormalized; the returned probability is its squared
/// norm, i.e. the joint probability of this outcome when `state` itself is
/// an unnormalized branch.
pub fn project_wire(state: &Ket, wire: usize, basis: Basis, outcome: u8) -> Result<(Ket, f64)> {
    let proj = MatrixOp::projector(&basis.ket(outcome)?)?;
    let branch = apply_gate(state, &proj, &[wire])?;
    let p = branch.norm_sqr();
    Ok((branch, p))
}

/// Contracts `wire` against `⟨bra|`, returning the state of the remaining
/// wires (in their original order). Not renormalized.
pub fn contract_wire(state: &Ket, wire: usize, bra: &Ket) -> Result<Ket> {
    let n = state.wire_count();
    check_wires(&[wire], n)?;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "cannot contract the only wire of a register".into(),
        ));
    }
    if bra.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: bra.dim(),
        });
    }
    let amps = state.amplitudes();
    let low_bits = n - 1 - wire;
    let out = (0..1usize << (n - 1))
        .map(|rest| {
            let hi = (rest >> low_bits) << (low_bits + 1);
            let lo = rest & ((1 << low_bits) - 1);
            let i0 = hi | lo;
            let i1 = i0 | (1 << low_bits);
            bra.amplitude(0).conj() * amps[i0] + bra.amplitude(1).conj() * amps[i1]
        })
        .collect();
    Ket::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnot() -> MatrixOp {
        MatrixOp::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap()
    }

    #[test]
    fn tensor_identities() {
        let i2 = Operand::Op(MatrixOp::identity(1));
        let Operand::Op(i4) = tensor(&i2, &i2).unwrap() else {
            panic!()
        };
        assert!(i4.approx_eq(&MatrixOp::identity(2), 0.0));
        assert_eq!(i4.target_wires(), &[0, 1]);
    }

    #[test]
    fn tensor_x_z_entry() {
        // σx ⊗ σz = [[0, σz], [σz, 0]], so (0, 2) is σz(0, 0) = 1
        let op = MatrixOp::pauli_x().tensor(&MatrixOp::pauli_z());
        assert_eq!(op.entry(0, 2), C64::new(1.0, 0.0));
        assert_eq!(op.entry(1, 3), C64::new(-1.0, 0.0));
        assert_eq!(op.entry(0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn tensor_rejects_mixed() {
        let a = Operand::Ket(Ket::zero());
        let b = Operand::Op(MatrixOp::pauli_x());
        assert_eq!(tensor(&a, &b), Err(Error::MixedKinds));
        assert_eq!(tensor(&b, &a), Err(Error::MixedKinds));
    }

    #[test]
    fn x_flips_zero() {
        let out = apply_gate(&Ket::zero(), &MatrixOp::pauli_x(), &[0]).unwrap();
        assert_eq!(out, Ket::one());
    }

    #[test]
    fn cnot_truth_table() {
        let s00 = Ket::zero().tensor(&Ket::zero());
        let s10 = Ket::one().tensor(&Ket::zero());
        let s11 = Ket::one().tensor(&Ket::one());
        assert_eq!(apply_gate(&s00, &cnot(), &[0, 1]).unwrap(), s00);
        assert_eq!(apply_gate(&s10, &cnot(), &[0, 1]).unwrap(), s11);
    }

    #[test]
    fn reversed_wires_swap_control() {
        // control on wire 1, target wire 0: |01⟩ -> |11⟩
        let s01 = Ket::zero().tensor(&Ket::one());
        let s11 = Ket::one().tensor(&Ket::one());
        assert_eq!(apply_gate(&s01, &cnot(), &[1, 0]).unwrap(), s11);
    }

    #[test]
    fn embedding_matches_explicit_kron() {
        let state = Ket::from_real(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap();
        let y = MatrixOp::pauli_y();
        let full = MatrixOp::identity(1)
            .tensor(&y)
            .tensor(&MatrixOp::identity(1));
        let direct = full.apply_to(&state).unwrap();
        let embedded = apply_gate(&state, &y, &[1]).unwrap();
        assert!(direct.approx_eq(&embedded, 1e-15));
    }

    #[test]
    fn gate_wire_errors() {
        let s = Ket::zero().tensor(&Ket::zero());
        assert!(matches!(
            apply_gate(&s, &MatrixOp::pauli_x(), &[2]),
            Err(Error::InvalidWires { .. })
        ));
        assert!(matches!(
            apply_gate(&s, &cnot(), &[0, 0]),
            Err(Error::InvalidWires { .. })
        ));
        assert!(matches!(
            apply_gate(&s, &cnot(), &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn project_plus_on_z() {
        let (branch, p) = project_wire(&Ket::plus(), 0, Basis::Z, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((branch.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(branch.amplitude(1), C64::new(0.0, 0.0));
    }

    #[test]
    fn project_zero_on_x() {
        let (branch, p) = project_wire(&Ket::zero(), 0, Basis::X, 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(branch.approx_eq(&Ket::from_real(&[0.5, 0.5]).unwrap(), 1e-15));
    }

    #[test]
    fn project_golden_angle() {
        let theta: f64 = 1.0172219679;
        let k = Ket::qubit(theta.cos(), theta.sin()).unwrap();
        let (_, p) = project_wire(&k, 0, Basis::Z, 1).unwrap();
        assert!((p - 0.7236068).abs() < 1e-7);
    }

    #[test]
    fn contract_middle_wire() {
        // |0⟩|+⟩|1⟩ contracted on wire 1 with ⟨+| gives |0⟩|1⟩
        let s = Ket::zero().tensor(&Ket::plus()).tensor(&Ket::one());
        let r = contract_wire(&s, 1, &Ket::plus()).unwrap();
        assert!(r.approx_eq(&Ket::zero().tensor(&Ket::one()), 1e-15));
        let r = contract_wire(&s, 1, &Ket::minus()).unwrap();
        assert!(r.norm() < 1e-15);
    }
}
