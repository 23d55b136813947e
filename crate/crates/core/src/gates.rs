//! Basis transforms between the Bell and computational representations,
//! numerical verification of the gate equivalences satisfied by the
//! canonical exchange forms, and the Ising-driven teleportation protocol
//! with its full measurement-outcome table.

use crate::error::Error;
use crate::evolution::{exchange_form, UnitaryBell};
use crate::math::{C64, Mat2, Mat4, ONE, ZERO};
use crate::model::Axis;
use crate::state::{bell_transform, Basis};
use serde::{Deserialize, Serialize};

/// Label channel of a two-qubit Bell-label operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    Q1,
    Q2,
}

/// Control condition of a controlled label gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Control {
    Q1,
    Q2,
    /// Fires when the XOR of the two labels is 1.
    Xor,
}

/// Composition tree over primitive label gates and the Ising forms. The
/// expression evaluates to a 4x4 unitary acting on the (A, B) label space;
/// `Seq` composes right-to-left like an operator product.
#[derive(Clone, Debug)]
pub enum GateExpr {
    I,
    X(Channel),
    Y(Channel),
    Z(Channel),
    H(Channel),
    Controlled { control: Control, gate: Box<GateExpr> },
    Scaled { factor: C64, gate: Box<GateExpr> },
    Seq(Vec<GateExpr>),
    /// Canonical exchange form A^{0,π/2}_{h,j}.
    IsingA { axis: Axis, sector: u8 },
    /// Diagonal form D_h^φ with sector signs.
    IsingD { axis: Axis, phi: f64, signs: [i8; 2] },
}

pub const PAULI_X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
pub const PAULI_Y: Mat2 = Mat2([[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]]);
pub const PAULI_Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]);

pub fn hadamard() -> Mat2 {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat2([[s, s], [s, -s]])
}

fn on_channel(g: &Mat2, ch: Channel) -> Mat4 {
    let mut m = Mat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let entry = match ch {
                        Channel::Q1 => {
                            if b == d { g.0[a][c] } else { ZERO }
                        }
                        Channel::Q2 => {
                            if a == c { g.0[b][d] } else { ZERO }
                        }
                    };
                    m.0[2 * a + b][2 * c + d] = entry;
                }
            }
        }
    }
    m
}

fn control_fires(control: Control, a: usize, b: usize) -> bool {
    match control {
        Control::Q1 => a == 1,
        Control::Q2 => b == 1,
        Control::Xor => (a ^ b) == 1,
    }
}

impl GateExpr {
    pub fn eval(&self) -> Mat4 {
        match self {
            GateExpr::I => Mat4::identity(),
            GateExpr::X(ch) => on_channel(&PAULI_X, *ch),
            GateExpr::Y(ch) => on_channel(&PAULI_Y, *ch),
            GateExpr::Z(ch) => on_channel(&PAULI_Z, *ch),
            GateExpr::H(ch) => on_channel(&hadamard(), *ch),
            GateExpr::Controlled { control, gate } => {
                let g = gate.eval();
                let mut m = Mat4::zeros();
                for c in 0..2 {
                    for d in 0..2 {
                        let col = 2 * c + d;
                        if control_fires(*control, c, d) {
                            for row in 0..4 {
                                m.0[row][col] = g.0[row][col];
                            }
                        } else {
                            m.0[col][col] = ONE;
                        }
                    }
                }
                m
            }
            GateExpr::Scaled { factor, gate } => gate.eval().scale(*factor),
            GateExpr::Seq(gates) => {
                let mut m = Mat4::identity();
                for g in gates.iter().rev() {
                    m = g.eval().mul(&m);
                }
                m
            }
            GateExpr::IsingA { axis, sector } => exchange_form(*axis, *sector),
            GateExpr::IsingD { axis, phi, signs } => crate::evolution::d_form(*axis, *phi, *signs),
        }
    }
}

/// Conjugates a Bell-basis operator into the computational representation
/// through (C¹X₂)(H₁⊗I) · U · (H₁⊗I)(C¹X₂).
pub fn to_computational(u: &UnitaryBell) -> Result<UnitaryBell, Error> {
    if u.basis != Basis::Bell {
        return Err(Error::BasisMismatch { expected: Basis::Bell, got: u.basis });
    }
    let t = bell_transform();
    Ok(UnitaryBell { m: t.mul(&u.m).mul(&t.adjoint()), basis: Basis::Computational })
}

pub fn from_computational(u: &UnitaryBell) -> Result<UnitaryBell, Error> {
    if u.basis != Basis::Computational {
        return Err(Error::BasisMismatch { expected: Basis::Computational, got: u.basis });
    }
    let t = bell_transform();
    Ok(UnitaryBell { m: t.adjoint().mul(&u.m).mul(&t), basis: Basis::Bell })
}

/// One verified gate identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub identities: Vec<IdentityCheck>,
    pub pass: bool,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "identities": self.identities,
            "pass": self.pass,
        })
    }
}

fn scaled_i(g: GateExpr) -> GateExpr {
    GateExpr::Scaled { factor: C64::new(0.0, 1.0), gate: Box::new(g) }
}

fn controlled(c: Control, g: GateExpr) -> GateExpr {
    GateExpr::Controlled { control: c, gate: Box::new(g) }
}

/// The six equivalences between the canonical exchange forms and controlled
/// label gates, checked as matrix identities.
pub fn verify_equivalences(tol: f64) -> EquivalenceReport {
    use Channel::{Q1, Q2};
    let cases: Vec<(&str, Axis, u8, GateExpr)> = vec![
        (
            "A[1,1] = X1 C1(iY2) X1",
            Axis::X,
            1,
            GateExpr::Seq(vec![
                GateExpr::X(Q1),
                controlled(Control::Q1, scaled_i(GateExpr::Y(Q2))),
                GateExpr::X(Q1),
            ]),
        ),
        (
            "A[1,2] = C1(iY2)",
            Axis::X,
            2,
            controlled(Control::Q1, scaled_i(GateExpr::Y(Q2))),
        ),
        (
            "A[2,1] = X1 C1xor2(iX1X2) X1",
            Axis::Y,
            1,
            GateExpr::Seq(vec![
                GateExpr::X(Q1),
                controlled(
                    Control::Xor,
                    scaled_i(GateExpr::Seq(vec![GateExpr::X(Q1), GateExpr::X(Q2)])),
                ),
                GateExpr::X(Q1),
            ]),
        ),
        (
            "A[2,2] = C1xor2(iX1X2)",
            Axis::Y,
            2,
            controlled(
                Control::Xor,
                scaled_i(GateExpr::Seq(vec![GateExpr::X(Q1), GateExpr::X(Q2)])),
            ),
        ),
        (
            "A[3,1] = X2 C2(iY1) X2",
            Axis::Z,
            1,
            GateExpr::Seq(vec![
                GateExpr::X(Q2),
                controlled(Control::Q2, scaled_i(GateExpr::Y(Q1))),
                GateExpr::X(Q2),
            ]),
        ),
        (
            "A[3,2] = C2(iY1)",
            Axis::Z,
            2,
            controlled(Control::Q2, scaled_i(GateExpr::Y(Q1))),
        ),
    ];

    let identities: Vec<IdentityCheck> = cases
        .into_iter()
        .map(|(name, axis, sector, rhs)| {
            let lhs = exchange_form(axis, sector);
            let residual = lhs.max_abs_diff(&rhs.eval());
            IdentityCheck { name: name.to_string(), residual, pass: residual < tol }
        })
        .collect();
    let pass = identities.iter().all(|c| c.pass);
    EquivalenceReport { identities, pass }
}

/// Measurement basis of the teleportation sender.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementBasis {
    Computational,
    Bell,
}

/// One teleportation measurement branch: the outcome label, its
/// probability, the receiver's state before and after the prescribed
/// correction, and the resulting fidelity with the input qubit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TeleportOutcome {
    pub basis: MeasurementBasis,
    pub label: String,
    pub probability: f64,
    pub post_state: [[f64; 2]; 2],
    pub corrections: Vec<String>,
    pub fidelity: f64,
}

fn apply_single(g: &Mat2, v: [C64; 2]) -> [C64; 2] {
    [
        g.0[0][0] * v[0] + g.0[0][1] * v[1],
        g.0[1][0] * v[0] + g.0[1][1] * v[1],
    ]
}

/// Runs the Ising-driven teleportation of a|0> + b|1> through the
/// A^{0,π/2}_{1,2} operation and returns every measurement branch for the
/// chosen sender basis. Corrections follow the outcome table: X^B Z^{1+A} H
/// for computational outcomes |AB>, Z^A X^{A⊕B} for Bell outcomes β_AB.
pub fn teleport(
    a: C64,
    b: C64,
    basis: MeasurementBasis,
) -> Result<Vec<TeleportOutcome>, Error> {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }

    // Three-qubit register |q1 q2 q3>, amplitudes indexed 4 q1 + 2 q2 + q3.
    // Qubits 2 and 3 start in β00; the sender holds 1 and 2.
    let mut psi = [ZERO; 8];
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for (q1, amp1) in [(0usize, a), (1, b)] {
        psi[4 * q1] += amp1 * s; // |q1 0 0>
        psi[4 * q1 + 3] += amp1 * s; // |q1 1 1>
    }

    // Drive the Ising interaction on qubits 1-2: the exchange form in its
    // computational representation.
    let gate = to_computational(&UnitaryBell { m: exchange_form(Axis::X, 2), basis: Basis::Bell })?;
    let mut out = [ZERO; 8];
    for c in 0..2 {
        for (rowpair, row) in out.iter_mut().enumerate() {
            let (r12, r3) = (rowpair / 2, rowpair % 2);
            if r3 != c {
                continue;
            }
            let mut acc = ZERO;
            for c12 in 0..4 {
                acc += gate.m.0[r12][c12] * psi[2 * c12 + c];
            }
            *row = acc;
        }
    }
    psi = out;

    let input = [a, b];
    let mut branches = Vec::new();
    match basis {
        MeasurementBasis::Computational => {
            for q1 in 0..2usize {
                for q2 in 0..2usize {
                    let v = [psi[4 * q1 + 2 * q2], psi[4 * q1 + 2 * q2 + 1]];
                    branches.push(make_outcome(
                        basis,
                        format!("|{q1}{q2}>"),
                        v,
                        computational_corrections(q1, q2),
                        input,
                    ));
                }
            }
        }
        MeasurementBasis::Bell => {
            for la in 0..2usize {
                for lb in 0..2usize {
                    // Project qubits 1-2 onto β_{la lb}.
                    let bell = bell_transform();
                    let mut v = [ZERO; 2];
                    for c3 in 0..2 {
                        let mut acc = ZERO;
                        for c12 in 0..4 {
                            acc += bell.0[c12][2 * la + lb].conj() * psi[2 * c12 + c3];
                        }
                        v[c3] = acc;
                    }
                    let sgn = |x: usize| if x == 0 { "-" } else { "+" };
                    branches.push(make_outcome(
                        basis,
                        format!("|beta_{}{}>", sgn(la), sgn(lb)),
                        v,
                        bell_corrections(la, lb),
                        input,
                    ));
                }
            }
        }
    }
    Ok(branches)
}

fn computational_corrections(a: usize, b: usize) -> Vec<(&'static str, Mat2)> {
    // Right-to-left product X^B Z^{1+A} H: apply H, then Z^{1+A}, then X^B.
    let mut gates = vec![("H", hadamard())];
    if (1 + a) % 2 == 1 {
        gates.push(("Z", PAULI_Z));
    }
    if b == 1 {
        gates.push(("X", PAULI_X));
    }
    gates
}

fn bell_corrections(a: usize, b: usize) -> Vec<(&'static str, Mat2)> {
    // Z^A X^{A xor B}: apply X first, then Z.
    let mut gates = Vec::new();
    if (a ^ b) == 1 {
        gates.push(("X", PAULI_X));
    }
    if a == 1 {
        gates.push(("Z", PAULI_Z));
    }
    gates
}

fn make_outcome(
    basis: MeasurementBasis,
    label: String,
    v: [C64; 2],
    corrections: Vec<(&'static str, Mat2)>,
    input: [C64; 2],
) -> TeleportOutcome {
    let probability = v[0].norm_sqr() + v[1].norm_sqr();
    let scale = C64::new(1.0 / probability.sqrt().max(1e-300), 0.0);
    let post = [v[0] * scale, v[1] * scale];
    let mut corrected = post;
    for (_, g) in &corrections {
        corrected = apply_single(g, corrected);
    }
    let fidelity = (input[0].conj() * corrected[0] + input[1].conj() * corrected[1]).norm();
    TeleportOutcome {
        basis,
        label,
        probability,
        post_state: [[post[0].re, post[0].im], [post[1].re, post[1].im]],
        corrections: corrections.iter().map(|(n, _)| n.to_string()).collect(),
        fidelity,
    }
}
