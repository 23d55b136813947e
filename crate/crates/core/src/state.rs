//! Two-qubit pure states and the Bell/computational basis change.
//!
//! The Bell basis is fixed in the order (β00, β01, β10, β11) with
//! β_AB = (|0,B> + (-1)^A |1,1⊕B>)/√2; the computational order is
//! (|00>, |01>, |10>, |11>). All matrices in the crate are read in one of
//! these two orders, tagged explicitly.

use crate::error::Error;
use crate::math::{C64, Mat4, ONE, ZERO};
use serde::{Deserialize, Serialize};

pub const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Which ordered basis a state vector or matrix is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Bell,
    Computational,
}

/// A pure two-qubit state: four complex amplitudes plus the basis tag.
#[derive(Clone, Copy, Debug)]
pub struct TwoQubitState {
    pub amp: [C64; 4],
    pub basis: Basis,
}

/// Unitary whose columns are the Bell states in computational coordinates;
/// maps Bell-basis coefficient vectors to computational ones.
pub fn bell_transform() -> Mat4 {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    Mat4([
        [s, ZERO, s, ZERO],
        [ZERO, s, ZERO, s],
        [ZERO, s, ZERO, -s],
        [s, ZERO, -s, ZERO],
    ])
}

impl TwoQubitState {
    pub fn new(amp: [C64; 4], basis: Basis) -> Self {
        TwoQubitState { amp, basis }
    }

    /// Bell state β_{AB}, expressed in the Bell basis.
    pub fn bell(a: u8, b: u8) -> Self {
        let mut amp = [ZERO; 4];
        amp[(2 * a + b) as usize] = ONE;
        TwoQubitState { amp, basis: Basis::Bell }
    }

    /// Computational basis state |AB>.
    pub fn computational(a: u8, b: u8) -> Self {
        let mut amp = [ZERO; 4];
        amp[(2 * a + b) as usize] = ONE;
        TwoQubitState { amp, basis: Basis::Computational }
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn check_normalized(&self, tol: f64) -> Result<(), Error> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            Err(Error::NotNormalized { norm: n })
        } else {
            Ok(())
        }
    }

    /// The same state re-expressed in the computational basis.
    pub fn to_computational(&self) -> TwoQubitState {
        match self.basis {
            Basis::Computational => *self,
            Basis::Bell => TwoQubitState {
                amp: bell_transform().mul_vec(&self.amp),
                basis: Basis::Computational,
            },
        }
    }

    /// The same state re-expressed in the Bell basis.
    pub fn to_bell(&self) -> TwoQubitState {
        match self.basis {
            Basis::Bell => *self,
            Basis::Computational => TwoQubitState {
                amp: bell_transform().adjoint().mul_vec(&self.amp),
                basis: Basis::Bell,
            },
        }
    }

    /// `|<self|other>|`, comparing in a common basis.
    pub fn overlap(&self, other: &TwoQubitState) -> f64 {
        let a = self.to_computational();
        let b = other.to_computational();
        a.amp
            .iter()
            .zip(b.amp.iter())
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_transform_is_unitary() {
        assert!(bell_transform().unitarity_defect() < 1e-15);
    }

    #[test]
    fn bell_states_have_expected_amplitudes() {
        let b00 = TwoQubitState::bell(0, 0).to_computational();
        assert!((b00.amp[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b00.amp[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let b11 = TwoQubitState::bell(1, 1).to_computational();
        assert!((b11.amp[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b11.amp[2].re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn round_trip_preserves_amplitudes() {
        let s = TwoQubitState::new(
            [
                C64::new(0.5, 0.1),
                C64::new(-0.3, 0.2),
                C64::new(0.0, 0.7),
                C64::new(0.2, -0.3),
            ],
            Basis::Bell,
        );
        let back = s.to_computational().to_bell();
        for k in 0..4 {
            assert!((s.amp[k] - back.amp[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn overlap_of_orthogonal_bells_is_zero() {
        let a = TwoQubitState::bell(0, 0);
        let b = TwoQubitState::bell(1, 1);
        assert!(a.overlap(&b) < 1e-15);
        assert!((a.overlap(&a) - 1.0).abs() < 1e-15);
    }
}
