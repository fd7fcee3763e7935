use std::fmt;

use crate::qcore::Ket;
use crate::{Error, Result, C64};

/// Tolerance for the unitarity tag.
pub const UNITARY_TOL: f64 = 1e-12;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Dense `2^k x 2^k` complex matrix acting on `k` target wires.
///
/// Entries are stored row-major. The first target wire is the most
/// significant bit of the row/column index.
#[derive(Clone, PartialEq)]
pub struct MatrixOp {
    dim: usize,
    entries: Vec<C64>,
    wires: Vec<usize>,
    unitary: bool,
}

impl MatrixOp {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::BadLength(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let k = dim.trailing_zeros() as usize;
        Ok(MatrixOp {
            dim,
            entries,
            wires: (0..k).collect(),
            unitary: false,
        })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn identity(wires: usize) -> Self {
        let dim = 1 << wires;
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        let mut op = Self::new(dim, entries).expect("identity");
        op.unitary = true;
        op
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0])
            .unwrap()
            .assume_unitary()
    }

    pub fn pauli_y() -> Self {
        Self::new(2, vec![ZERO, -I, I, ZERO]).unwrap().assume_unitary()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0])
            .unwrap()
            .assume_unitary()
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &Ket, bra: &Ket) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch {
                expected: ket.dim(),
                found: bra.dim(),
            });
        }
        let dim = ket.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(ket.amplitude(r) * bra.amplitude(c).conj());
            }
        }
        Self::new(dim, entries)
    }

    /// `|ket⟩⟨ket|`.
    pub fn projector(ket: &Ket) -> Result<Self> {
        Self::outer(ket, ket)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.wires.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn target_wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn on(mut self, wires: &[usize]) -> Result<Self> {
        if wires.len() != self.arity() || has_duplicates(wires) {
            return Err(Error::InvalidWires {
                wires: wires.to_vec(),
                register: self.arity(),
            });
        }
        self.wires = wires.to_vec();
        Ok(self)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Sets the unitarity tag after checking `U†U = I`.
    pub fn into_unitary(mut self) -> Result<Self> {
        let dev = self.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.unitary = true;
        Ok(self)
    }

    fn assume_unitary(mut self) -> Self {
        debug_assert!(self.unitarity_deviation() <= UNITARY_TOL);
        self.unitary = true;
        self
    }

    /// Max entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.adjoint().matmul(self).expect("square");
        prod.max_diff(&Self::identity(self.arity())).expect("same dim")
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_diff(&self.adjoint()).expect("same dim")
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        MatrixOp {
            dim: d,
            entries,
            wires: self.wires.clone(),
            unitary: self.unitary,
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let x = self.entries[r * d + k];
                if x == ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += x * other.entries[k * d + c];
                }
            }
        }
        let mut out = Self::new(d, entries)?;
        out.wires = self.wires.clone();
        out.unitary = self.unitary && other.unitary;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&x, &y)| f(x, y))
            .collect();
        let mut out = Self::new(self.dim, entries)?;
        out.wires = self.wires.clone();
        Ok(out)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = Self::new(self.dim, self.entries.iter().map(|z| z * factor).collect())
            .expect("finite scale");
        out.wires = self.wires.clone();
        out
    }

    /// Kronecker product, `self`'s wires first. When the two wire lists
    /// overlap, `other`'s wires are shifted past the largest wire of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![ZERO; d * d];
        for ra in 0..da {
            for ca in 0..da {
                let x = self.entries[ra * da + ca];
                for rb in 0..db {
                    for cb in 0..db {
                        entries[(ra * db + rb) * d + ca * db + cb] = x * other.entries[rb * db + cb];
                    }
                }
            }
        }
        let mut wires = self.wires.clone();
        if other.wires.iter().any(|w| self.wires.contains(w)) {
            let shift = self.wires.iter().max().map_or(0, |m| m + 1);
            wires.extend(other.wires.iter().map(|w| w + shift));
        } else {
            wires.extend_from_slice(&other.wires);
        }
        MatrixOp {
            dim: d,
            entries,
            wires,
            unitary: self.unitary && other.unitary,
        }
    }

    /// Plain matrix-vector product on a ket of the operator's full dimension.
    pub fn apply_to(&self, ket: &Ket) -> Result<Ket> {
        if ket.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ket.dim(),
            });
        }
        let d = self.dim;
        let amps = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| self.entries[r * d + c] * ket.amplitude(c))
                    .sum()
            })
            .collect();
        Ket::new(amps)
    }

    /// `⟨bra|self|ket⟩`.
    pub fn sandwich(&self, bra: &Ket, ket: &Ket) -> Result<C64> {
        bra.inner(&self.apply_to(ket)?)
    }

    /// `⟨ket|self|ket⟩ / ⟨ket|ket⟩`.
    pub fn expectation(&self, ket: &Ket) -> Result<C64> {
        let n = ket.norm_sqr();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.sandwich(ket, ket)? / n)
    }

    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_diff(other).is_ok_and(|d| d <= tol)
    }

    /// `exp(i t H)` for a Hermitian single-qubit `H`, via the Pauli
    /// decomposition `H = h0 I + h·σ`.
    pub fn exp_i_hermitian_2x2(&self, t: f64) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        if self.hermiticity_deviation() > 1e-12 {
            return Err(Error::NotHermitian);
        }
        let h0 = 0.5 * (self.entry(0, 0).re + self.entry(1, 1).re);
        let hz = 0.5 * (self.entry(0, 0).re - self.entry(1, 1).re);
        let hx = self.entry(1, 0).re;
        let hy = self.entry(1, 0).im;
        let len = (hx * hx + hy * hy + hz * hz).sqrt();
        let phase = C64::from_polar(1.0, t * h0);
        let (c, s) = ((t * len).cos(), (t * len).sin());
        let (nx, ny, nz) = if len > 0.0 {
            (hx / len, hy / len, hz / len)
        } else {
            (0.0, 0.0, 0.0)
        };
        // cos I + i sin (n·σ)
        let entries = vec![
            C64::new(c, s * nz),
            C64::new(s * ny, s * nx),
            C64::new(-s * ny, s * nx),
            C64::new(c, -s * nz),
        ];
        let mut out = Self::new(2, entries)?.scale(phase);
        out.wires = self.wires.clone();
        Ok(out.assume_unitary())
    }
}

fn has_duplicates(wires: &[usize]) -> bool {
    wires
        .iter()
        .enumerate()
        .any(|(i, w)| wires[..i].contains(w))
}

impl fmt::Debug for MatrixOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixOp {}x{} on {:?}", self.dim, self.dim, self.wires)?;
        for r in 0..self.dim {
            write!(f, "  [")?;
            for c in 0..self.dim {
                let z = self.entry(r, c);
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paulis_are_unitary_and_hermitian() {
        for p in [MatrixOp::pauli_x(), MatrixOp::pauli_y(), MatrixOp::pauli_z()] {
            assert!(p.unitarity_deviation() < 1e-15);
            assert!(p.hermiticity_deviation() < 1e-15);
        }
    }

    #[test]
    fn xy_equals_iz() {
        let xy = MatrixOp::pauli_x().matmul(&MatrixOp::pauli_y()).unwrap();
        assert!(xy.approx_eq(&MatrixOp::pauli_z().scale(I), 1e-15));
    }

    #[test]
    fn non_unitary_rejected_by_tag() {
        let p = MatrixOp::projector(&Ket::zero()).unwrap();
        assert!(matches!(p.into_unitary(), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn exp_of_pauli_x() {
        let g = 0.37;
        let r = MatrixOp::pauli_x().exp_i_hermitian_2x2(g).unwrap();
        let expect = MatrixOp::identity(1)
            .scale(C64::new(g.cos(), 0.0))
            .add(&MatrixOp::pauli_x().scale(C64::new(0.0, g.sin())))
            .unwrap();
        assert!(r.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn exp_of_projector_is_phase_on_one() {
        let p1 = MatrixOp::projector(&Ket::one()).unwrap();
        let e = p1.exp_i_hermitian_2x2(0.9).unwrap();
        assert!((e.entry(0, 0) - ONE).norm() < 1e-15);
        assert!((e.entry(1, 1) - C64::from_polar(1.0, 0.9)).norm() < 1e-15);
        assert!(e.entry(0, 1).norm() < 1e-15);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        let a = MatrixOp::outer(&Ket::plus(), &Ket::zero()).unwrap();
        assert_eq!(a.exp_i_hermitian_2x2(1.0), Err(Error::NotHermitian));
    }

    #[test]
    fn duplicate_wires_rejected() {
        let op = MatrixOp::identity(2);
        assert!(op.on(&[1, 1]).is_err());
    }
}
