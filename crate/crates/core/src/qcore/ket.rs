use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::{Error, Result, C64};

/// Tolerance on the 2-norm for a ket to carry [`NormTag::Normalized`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormTag {
    Normalized,
    Unnormalized,
}

/// Complex amplitude vector over an ordered register of `n` qubits.
///
/// Wire 0 is the most significant bit of the basis-state index, so
/// `|s⟩|a⟩|m⟩` has amplitude index `4s + 2a + m`.
///
/// Branch states produced by projections are kept unnormalized; their squared
/// norm is the joint probability of the branch. Use [`Ket::normalize`] to get
/// the conditional state.
#[derive(Clone, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
    wires: usize,
    tag: NormTag,
}

impl Ket {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadLength(len));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let wires = len.trailing_zeros() as usize;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tag = if (norm - 1.0).abs() <= NORM_TOL {
            NormTag::Normalized
        } else {
            NormTag::Unnormalized
        };
        Ok(Ket { amps, wires, tag })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` on `wires` qubits.
    pub fn basis(wires: usize, index: usize) -> Result<Self> {
        if wires == 0 || wires >= usize::BITS as usize || index >= 1 << wires {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} on {wires} wires"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << wires];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn zero() -> Self {
        Self::from_real(&[1.0, 0.0]).unwrap()
    }

    pub fn one() -> Self {
        Self::from_real(&[0.0, 1.0]).unwrap()
    }

    pub fn plus() -> Self {
        Self::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    pub fn minus() -> Self {
        Self::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap()
    }

    /// `c0|0⟩ + c1|1⟩` for real coefficients.
    pub fn qubit(c0: f64, c1: f64) -> Result<Self> {
        Self::from_real(&[c0, c1])
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn wire_count(&self) -> usize {
        self.wires
    }

    pub fn norm_tag(&self) -> NormTag {
        self.tag
    }

    pub fn is_normalized(&self) -> bool {
        self.tag == NormTag::Normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Ket> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ket::new(self.amps.iter().map(|z| z / n).collect())
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket::new(self.amps.iter().map(|z| z * factor).collect()).expect("scaled ket")
    }

    fn check_same_dim(&self, other: &Ket) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        self.check_same_dim(other)?;
        Ket::new(self.amps.iter().zip(&other.amps).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &Ket) -> Result<Ket> {
        self.check_same_dim(other)?;
        Ket::new(self.amps.iter().zip(&other.amps).map(|(x, y)| x - y).collect())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        self.check_same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Kronecker product with `self`'s wires first.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for x in &self.amps {
            for y in &other.amps {
                amps.push(x * y);
            }
        }
        Ket::new(amps).expect("tensor of valid kets")
    }

    /// Phase-insensitive overlap `|⟨u|v⟩| / (‖u‖‖v‖)`.
    pub fn fidelity(&self, other: &Ket) -> Result<f64> {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.inner(other)?.norm() / denom)
    }

    /// Largest absolute amplitude difference.
    pub fn max_diff(&self, other: &Ket) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &Ket, tol: f64) -> bool {
        self.max_diff(other).is_ok_and(|d| d <= tol)
    }

    /// Orthonormal partner of a single-qubit ket, `(-conj(c1), conj(c0))`.
    pub fn orthogonal_complement(&self) -> Result<Ket> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        Ket::new(vec![-self.amps[1].conj(), self.amps[0].conj()])
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ket[{}w; ", self.wires)?;
        for (i, z) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}
