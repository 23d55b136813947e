//! Physical parameters of one driven-Ising pulse and the derived scalar
//! quantities, energies and eigenvectors of the two-qubit Hamiltonian
//!
//!   H_h = -Σ_k J_k σ1_k σ2_k + B1_h σ1_h + B2_h σ2_h
//!
//! with the magnetic field restricted to a single axis h per pulse (ħ = 1,
//! so times are reciprocal energies).

use crate::error::Error;
use crate::math::{C64, I, Mat4, ONE, ZERO};
use crate::state::bell_transform;
use serde::{Deserialize, Serialize};

/// Field axis h ∈ {1,2,3} ↔ {x,y,z}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn from_index(h: u8) -> Result<Axis, Error> {
        match h {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            3 => Ok(Axis::Z),
            _ => Err(Error::InvalidParams(format!("axis must be 1, 2 or 3, got {h}"))),
        }
    }

    /// 1-based index h.
    pub fn index(self) -> u8 {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }

    /// 0-based position into a `[f64; 3]` coupling triple.
    pub fn pos(self) -> usize {
        (self.index() - 1) as usize
    }

    /// 0-based positions (i, j) of the two couplings complementary to h, in
    /// index order, so that J_{{h}}± = J_i ± J_j. For h = 2 this is (J1, J3):
    /// the index-ordered reading (rather than the literal cyclic pair) is the
    /// one under which the closed-form propagators and eigenvectors agree
    /// with the Hamiltonian, as pinned by the oracle tests.
    pub fn coupling_pair(self) -> (usize, usize) {
        match self {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }

    pub fn all() -> [Axis; 3] {
        [Axis::X, Axis::Y, Axis::Z]
    }
}

impl Serialize for Axis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.index())
    }
}

impl<'de> Deserialize<'de> for Axis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Axis::from_index(v).map_err(serde::de::Error::custom)
    }
}

/// Sector / energy-label sign, written α, μ, ν in the closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn f(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn from_f(x: f64) -> Sign {
        if x >= 0.0 { Sign::Plus } else { Sign::Minus }
    }

    /// 0 for minus, 1 for plus; the bit used in Bell-state labels.
    pub fn bit(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Minus, Sign::Plus]
    }
}

/// Bell-basis position of β_{μν}.
pub fn bell_index(mu: Sign, nu: Sign) -> usize {
    2 * mu.bit() + nu.bit()
}

/// Couplings and per-qubit field amplitudes of one rectangular pulse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Ising couplings (J1, J2, J3).
    #[serde(rename = "J")]
    pub j: [f64; 3],
    /// Field amplitude on qubit 1 along the pulse axis.
    #[serde(rename = "B1")]
    pub b1: f64,
    /// Field amplitude on qubit 2 along the pulse axis.
    #[serde(rename = "B2")]
    pub b2: f64,
    pub axis: Axis,
}

impl PhysicalParams {
    pub fn new(j: [f64; 3], b1: f64, b2: f64, axis: Axis) -> Self {
        PhysicalParams { j, b1, b2, axis }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.j.iter().all(|x| x.is_finite()) && self.b1.is_finite() && self.b2.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams("all couplings and fields must be finite".into()))
        }
    }

    /// J_h, the coupling along the pulse axis.
    pub fn j_axis(&self) -> f64 {
        self.j[self.axis.pos()]
    }

    pub fn derive(&self) -> DerivedParams {
        derive(self)
    }
}

/// Reduced quantities feeding every closed form: B_{h±}, J_{{h}}±, R_{h±}
/// and the normalized pair (b_{h±}, j_{h±}) = (B_{h±}, J_{{h}}∓) / R_{h±}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DerivedParams {
    pub b_plus: f64,
    pub b_minus: f64,
    /// J_{{h}}+ = J_i + J_j for the coupling pair (i, j) complementary to h.
    pub j_sum: f64,
    /// J_{{h}}- = J_i - J_j.
    pub j_diff: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub b_hat_plus: f64,
    pub b_hat_minus: f64,
    pub j_hat_plus: f64,
    pub j_hat_minus: f64,
    /// R_{h+} = 0: b_hat_plus and j_hat_plus are set to 0 by convention.
    pub degenerate_plus: bool,
    pub degenerate_minus: bool,
}

impl DerivedParams {
    /// R_{h,s}.
    pub fn r(&self, s: Sign) -> f64 {
        match s {
            Sign::Plus => self.r_plus,
            Sign::Minus => self.r_minus,
        }
    }

    /// B_{h,s}.
    pub fn b_field(&self, s: Sign) -> f64 {
        match s {
            Sign::Plus => self.b_plus,
            Sign::Minus => self.b_minus,
        }
    }

    /// J_{{h}}s (the coupling combination carrying the subscript s).
    pub fn j_coupling(&self, s: Sign) -> f64 {
        match s {
            Sign::Plus => self.j_sum,
            Sign::Minus => self.j_diff,
        }
    }

    /// b_{h,s} = B_{h,s} / R_{h,s}.
    pub fn b_hat(&self, s: Sign) -> f64 {
        match s {
            Sign::Plus => self.b_hat_plus,
            Sign::Minus => self.b_hat_minus,
        }
    }

    /// j_{h,s} = J_{{h}}(-s) / R_{h,s}.
    pub fn j_hat(&self, s: Sign) -> f64 {
        match s {
            Sign::Plus => self.j_hat_plus,
            Sign::Minus => self.j_hat_minus,
        }
    }

    pub fn degenerate(&self, s: Sign) -> bool {
        match s {
            Sign::Plus => self.degenerate_plus,
            Sign::Minus => self.degenerate_minus,
        }
    }
}

/// Computes every derived scalar. A vanishing Rabi frequency R_{h±} = 0 is
/// flagged degenerate (with b, j set to 0) rather than treated as an error.
pub fn derive(p: &PhysicalParams) -> DerivedParams {
    let (i, j) = p.axis.coupling_pair();
    let j_sum = p.j[i] + p.j[j];
    let j_diff = p.j[i] - p.j[j];
    let b_plus = p.b1 + p.b2;
    let b_minus = p.b1 - p.b2;
    // R_{h±} pairs B_{h±} with the opposite coupling combination J_{{h}}∓.
    let r_plus = (b_plus * b_plus + j_diff * j_diff).sqrt();
    let r_minus = (b_minus * b_minus + j_sum * j_sum).sqrt();
    let degenerate_plus = r_plus == 0.0;
    let degenerate_minus = r_minus == 0.0;
    DerivedParams {
        b_plus,
        b_minus,
        j_sum,
        j_diff,
        r_plus,
        r_minus,
        b_hat_plus: if degenerate_plus { 0.0 } else { b_plus / r_plus },
        b_hat_minus: if degenerate_minus { 0.0 } else { b_minus / r_minus },
        j_hat_plus: if degenerate_plus { 0.0 } else { j_diff / r_plus },
        j_hat_minus: if degenerate_minus { 0.0 } else { j_sum / r_minus },
        degenerate_plus,
        degenerate_minus,
    }
}

const PAULI: [[[C64; 2]; 2]; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]],
];

fn kron2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> Mat4 {
    let mut m = Mat4::zeros();
    for r0 in 0..2 {
        for r1 in 0..2 {
            for c0 in 0..2 {
                for c1 in 0..2 {
                    m.0[2 * r0 + r1][2 * c0 + c1] = a[r0][c0] * b[r1][c1];
                }
            }
        }
    }
    m
}

const ID2: [[C64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];

/// The Hamiltonian in the computational basis (|00>, |01>, |10>, |11>).
pub fn hamiltonian_computational(p: &PhysicalParams) -> Mat4 {
    let mut h = Mat4::zeros();
    for k in 0..3 {
        let term = kron2(&PAULI[k], &PAULI[k]).scale(C64::new(-p.j[k], 0.0));
        h = h.add(&term);
    }
    let s = &PAULI[p.axis.pos()];
    h = h.add(&kron2(s, &ID2).scale(C64::new(p.b1, 0.0)));
    h = h.add(&kron2(&ID2, s).scale(C64::new(p.b2, 0.0)));
    h
}

/// The Hamiltonian conjugated into the ordered Bell basis.
pub fn hamiltonian_bell(p: &PhysicalParams) -> Mat4 {
    let t = bell_transform();
    t.adjoint().mul(&hamiltonian_computational(p)).mul(&t)
}

/// The four energies E_{μν} = μ J_h + ν R_{h,-μ}, indexed by the pair of
/// signs. Their sum vanishes, so the evolution lies in SU(4).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnergySpectrum {
    /// e[mu.bit()][nu.bit()]
    pub e: [[f64; 2]; 2],
}

impl EnergySpectrum {
    pub fn energy(&self, mu: Sign, nu: Sign) -> f64 {
        self.e[mu.bit()][nu.bit()]
    }

    pub fn sum(&self) -> f64 {
        self.e.iter().flatten().sum()
    }

    /// Energies ordered by the Bell label of their eigenvector, (μ,ν).
    pub fn as_array(&self) -> [f64; 4] {
        [self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]]
    }

    /// Energies in ascending order (for comparison with a dense solver).
    pub fn sorted(&self) -> [f64; 4] {
        let mut v = self.as_array();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

pub fn spectrum(p: &PhysicalParams) -> EnergySpectrum {
    let d = derive(p);
    let jh = p.j_axis();
    let mut e = [[0.0; 2]; 2];
    for mu in Sign::both() {
        for nu in Sign::both() {
            e[mu.bit()][nu.bit()] = mu.f() * jh + nu.f() * d.r(mu.flip());
        }
    }
    EnergySpectrum { e }
}

/// The four Bell-basis eigenvectors |φ_{μν}^h>, columns indexed by the
/// label pair (μ,ν) in Bell order.
#[derive(Clone, Copy, Debug)]
pub struct EigenBasis {
    /// vectors[k] is the eigenvector with label index k = bell_index(μ,ν),
    /// expressed as four Bell-basis amplitudes.
    pub vectors: [[C64; 4]; 4],
    pub energies: EnergySpectrum,
    /// Set when some R vanishes and the eigenvectors within that sector are
    /// an arbitrary orthonormal choice.
    pub degenerate: bool,
}

/// `1 + x` evaluated without cancellation, given `comp² = 1 - x²`.
fn stable_one_plus(x: f64, comp: f64) -> f64 {
    if x >= 0.0 {
        1.0 + x
    } else {
        comp * comp / (1.0 - x)
    }
}

/// Bell-basis positions coupled by the eigenvector |φ_{μν}^h>, together with
/// its two amplitudes. Index arithmetic per family: h=1 couples β_{μ,∓};
/// h=2 couples β_{-μ,-} with β_{μ,+}; h=3 couples β_{∓,μ}.
///
/// Each family reduces to the same normalized pair
/// (A/√(2w), ν√(w/2)) with a family-specific weight w and amplitude A; the
/// weight is computed through `stable_one_plus` so eigenvectors stay
/// orthonormal to machine precision near |j| = 1 or |b| = 1.
fn eigenvector_slots(axis: Axis, mu: Sign, nu: Sign, d: &DerivedParams) -> ([usize; 2], [C64; 2]) {
    let b = d.b_hat(mu.flip());
    let j = d.j_hat(mu.flip());
    let (slots, w, amp) = match axis {
        Axis::X => (
            [bell_index(mu, Sign::Minus), bell_index(mu, Sign::Plus)],
            stable_one_plus(mu.f() * nu.f() * j, b),
            C64::new(-mu.f() * b, 0.0),
        ),
        Axis::Y => (
            [bell_index(mu.flip(), Sign::Minus), bell_index(mu, Sign::Plus)],
            stable_one_plus(mu.f() * nu.f() * j, b),
            I * mu.f() * b,
        ),
        Axis::Z => (
            [bell_index(Sign::Minus, mu), bell_index(Sign::Plus, mu)],
            stable_one_plus(nu.f() * j, b),
            C64::new(b, 0.0),
        ),
    };
    if w < 1e-30 {
        // b -> 0 limit with the weight vanishing: the eigenvector collapses
        // onto the first slot (its partner, with weight 2, takes the second).
        (slots, [ONE, ZERO])
    } else {
        let c0 = amp / (2.0 * w).sqrt();
        let c1 = C64::new(nu.f() * (w / 2.0).sqrt(), 0.0);
        (slots, [c0, c1])
    }
}

pub fn eigenbasis(p: &PhysicalParams) -> EigenBasis {
    let d = derive(p);
    let energies = spectrum(p);
    let mut vectors = [[ZERO; 4]; 4];
    let mut degenerate = false;
    for mu in Sign::both() {
        let sector_degenerate = d.degenerate(mu.flip());
        for nu in Sign::both() {
            let k = bell_index(mu, nu);
            if sector_degenerate {
                // Degenerate sector: the block is μ J_h times the identity,
                // so the Bell pair itself is a valid orthonormal choice.
                degenerate = true;
                let ([s0, s1], _) = eigenvector_slots(p.axis, mu, nu, &d);
                let slot = if nu == Sign::Minus { s0 } else { s1 };
                vectors[k][slot] = ONE;
            } else {
                let (slots, coeffs) = eigenvector_slots(p.axis, mu, nu, &d);
                vectors[k][slots[0]] = coeffs[0];
                vectors[k][slots[1]] = coeffs[1];
            }
        }
    }
    EigenBasis { vectors, energies, degenerate }
}

impl EigenBasis {
    /// Max deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let g: C64 = (0..4).map(|r| self.vectors[a][r].conj() * self.vectors[b][r]).sum();
                let target = if a == b { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Max over eigenpairs of ||H v - E v||.
    pub fn residual(&self, p: &PhysicalParams) -> f64 {
        let h = hamiltonian_bell(p);
        let mut worst: f64 = 0.0;
        for mu in Sign::both() {
            for nu in Sign::both() {
                let k = bell_index(mu, nu);
                let hv = h.mul_vec(&self.vectors[k]);
                let e = self.energies.energy(mu, nu);
                let res: f64 = (0..4)
                    .map(|r| (hv[r] - self.vectors[k][r] * e).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(res);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::eigh4;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub fn random_params(rng: &mut ChaCha8Rng) -> PhysicalParams {
        let axis = Axis::from_index(rng.gen_range(1..=3)).unwrap();
        PhysicalParams::new(
            [
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
            ],
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            axis,
        )
    }

    #[test]
    fn derive_matches_hand_evaluated_case() {
        // Couplings (2, 0.4, 0.6) along x with no field.
        let p = PhysicalParams::new([2.0, 0.4, 0.6], 0.0, 0.0, Axis::X);
        let d = derive(&p);
        assert_eq!(d.b_plus, 0.0);
        assert_eq!(d.b_minus, 0.0);
        assert!((d.j_sum - 1.0).abs() < 1e-15);
        assert!((d.j_diff - (-0.2)).abs() < 1e-15);
        assert!((d.r_plus - 0.2).abs() < 1e-15);
        assert!((d.r_minus - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derive_flags_degenerate_r() {
        let p = PhysicalParams::new([0.0, 0.0, 0.0], 1.5, 1.5, Axis::Z);
        let d = derive(&p);
        assert_eq!(d.b_minus, 0.0);
        assert_eq!(d.r_minus, 0.0);
        assert!(d.degenerate_minus);
        assert!((d.r_plus - 3.0).abs() < 1e-15);
        assert!(!d.degenerate_plus);
    }

    #[test]
    fn b_j_pair_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p = random_params(&mut rng);
            let d = derive(&p);
            for s in Sign::both() {
                if d.r(s) > 0.0 {
                    let n = d.b_hat(s).powi(2) + d.j_hat(s).powi(2);
                    assert!((n - 1.0).abs() < 1e-12, "b^2+j^2 = {n}");
                }
                // R² - B² - J∓² vanishes as algebra.
                let res = d.r(s).powi(2) - d.b_field(s).powi(2) - d.j_coupling(s.flip()).powi(2);
                assert!(res.abs() < 1e-12 * (1.0 + d.r(s).powi(2)));
            }
        }
    }

    #[test]
    fn hamiltonian_bell_is_hermitian_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let p = random_params(&mut rng);
            let h = hamiltonian_bell(&p);
            assert!(h.hermiticity_defect() < 1e-12);
            assert!(h.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn zero_params_give_zero_hamiltonian() {
        let p = PhysicalParams::new([0.0; 3], 0.0, 0.0, Axis::Y);
        assert!(hamiltonian_bell(&p).max_abs() < 1e-15);
    }

    #[test]
    fn field_free_bell_hamiltonian_is_diagonal() {
        let p = PhysicalParams::new([1.3, -0.7, 0.4], 0.0, 0.0, Axis::Z);
        let h = hamiltonian_bell(&p);
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert!(h.0[r][c].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn spectrum_matches_dense_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let p = random_params(&mut rng);
            let closed = spectrum(&p).sorted();
            let (dense, _) = eigh4(&hamiltonian_bell(&p));
            for k in 0..4 {
                assert!(
                    (closed[k] - dense[k]).abs() < 1e-10,
                    "closed {closed:?} dense {dense:?}"
                );
            }
        }
    }

    #[test]
    fn spectrum_sum_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let p = random_params(&mut rng);
            assert!(spectrum(&p).sum().abs() < 1e-12);
        }
        let p0 = PhysicalParams::new([0.0; 3], 0.0, 0.0, Axis::X);
        assert_eq!(spectrum(&p0).sorted(), [0.0; 4]);
    }

    #[test]
    fn degenerate_isotropic_z_spectrum() {
        // J = (0,0,1), axis z, no field: degenerate pairs at ±J3.
        let p = PhysicalParams::new([0.0, 0.0, 1.0], 0.0, 0.0, Axis::Z);
        let s = spectrum(&p);
        assert_eq!(s.energy(Sign::Minus, Sign::Minus), -1.0);
        assert_eq!(s.energy(Sign::Minus, Sign::Plus), -1.0);
        assert_eq!(s.energy(Sign::Plus, Sign::Minus), 1.0);
        assert_eq!(s.energy(Sign::Plus, Sign::Plus), 1.0);
        let (dense, _) = eigh4(&hamiltonian_bell(&p));
        assert!((dense[0] + 1.0).abs() < 1e-12 && (dense[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_invariant_under_cyclic_relabeling() {
        // Relabeling the couplings cyclically while rotating the axis the
        // same way permutes nothing in the spectrum.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let j = [
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            ];
            let b1 = rng.gen_range(-5.0..5.0);
            let b2 = rng.gen_range(-5.0..5.0);
            let a = spectrum(&PhysicalParams::new(j, b1, b2, Axis::X)).sorted();
            let rotated = [j[2], j[0], j[1]]; // J1 moves to slot 2
            let b = spectrum(&PhysicalParams::new(rotated, b1, b2, Axis::Y)).sorted();
            for k in 0..4 {
                assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenbasis_is_orthonormal_with_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let p = random_params(&mut rng);
            let eb = eigenbasis(&p);
            assert!(eb.orthonormality_defect() < 1e-12);
            assert!(eb.residual(&p) < 1e-10 * (1.0 + hamiltonian_bell(&p).max_abs()));
        }
    }

    #[test]
    fn field_free_z_eigenvectors_are_bell_states() {
        let p = PhysicalParams::new([1.0, 0.3, 0.8], 0.0, 0.0, Axis::Z);
        let eb = eigenbasis(&p);
        for k in 0..4 {
            let mass: f64 = eb.vectors[k].iter().map(|z| z.norm_sqr()).sum();
            let max: f64 = eb.vectors[k].iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
            assert!((mass - 1.0).abs() < 1e-12);
            assert!((max - 1.0).abs() < 1e-12, "eigenvector not a single Bell state");
        }
        assert!(eb.residual(&p) < 1e-12);
    }

    #[test]
    fn params_json_round_trip() {
        let p = PhysicalParams::new([2.0, 0.4, 0.6], 1.25, -0.5, Axis::Y);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"J\":[2.0,0.4,0.6]"));
        assert!(s.contains("\"axis\":2"));
        let q: PhysicalParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<PhysicalParams>("{\"J\":[1,2,3],\"B1\":0,\"B2\":0,\"axis\":5}").is_err());
    }
}
