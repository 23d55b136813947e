//! Concurrence of two-qubit pure states, the closed-form concurrence
//! dynamics of evolved Bell states, and the field-tuning prescriptions that
//! shape those dynamics.

use crate::error::Error;
use crate::math::fmt_g12;
use crate::model::{Axis, PhysicalParams, Sign};
use crate::state::TwoQubitState;
use serde::{Deserialize, Serialize};

/// Pure-state concurrence via the spin-flip overlap,
/// C = 2 |A00 A11 - A01 A10| on computational amplitudes. 1 on Bell states,
/// 0 on product states.
pub fn concurrence(state: &TwoQubitState) -> Result<f64, Error> {
    state.check_normalized(1e-9)?;
    let a = state.to_computational().amp;
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

/// Sector label f^h_{μν} of the Bell state β_{μν} under the axis-h
/// propagator: μ for h=1, μν for h=2, ν for h=3. The evolved concurrence
/// depends on the single Rabi frequency R_{h,-f}.
pub fn bell_sector(axis: Axis, mu: Sign, nu: Sign) -> Sign {
    match axis {
        Axis::X => mu,
        Axis::Y => {
            if mu == nu { Sign::Plus } else { Sign::Minus }
        }
        Axis::Z => nu,
    }
}

/// Closed-form concurrence of U_h(t) β_{μν}:
/// C = sqrt(1 - 4 j² b² sin⁴ Δ⁻) with (b, j) = (b, j)_{h,-f} and
/// Δ⁻ = R_{h,-f} t. (The squared closed form is C², as fixed against the
/// spin-flip oracle by a regression test.)
pub fn bell_concurrence_closed(params: &PhysicalParams, mu: Sign, nu: Sign, t: f64) -> f64 {
    let f = bell_sector(params.axis, mu, nu);
    let d = params.derive();
    let b = d.b_hat(f.flip()).abs();
    let j = d.j_hat(f.flip()).abs();
    let delta = d.r(f.flip()) * t;
    let (s2, c2) = (delta.sin().powi(2), delta.cos().powi(2));
    // 1 - 2jb sin² = (j-b)² + 2jb cos² (using b²+j² = 1): this factored form
    // stays exact at the separable points where the naive difference loses
    // half the working digits.
    let lo = (j - b).powi(2) + 2.0 * j * b * c2;
    let hi = 1.0 + 2.0 * j * b * s2;
    (lo * hi).sqrt().min(1.0)
}

/// Where a tuning offset is applied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TuningOffset {
    /// The same offset added to both qubit fields.
    Homogeneous(f64),
    /// Separate per-qubit increments.
    PerQubit { d1: f64, d2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TuningMode {
    Commensurate { n_minus: i64, n_plus: i64 },
    MaxAmplitude,
    Selective,
}

/// One field-tuning prescription together with its target effect.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TuningField {
    pub mode: TuningMode,
    pub offset: TuningOffset,
}

impl TuningField {
    /// The parameters after applying the offset.
    pub fn apply(&self, p: &PhysicalParams) -> PhysicalParams {
        let (d1, d2) = match self.offset {
            TuningOffset::Homogeneous(b0) => (b0, b0),
            TuningOffset::PerQubit { d1, d2 } => (d1, d2),
        };
        PhysicalParams::new(p.j, p.b1 + d1, p.b2 + d2, p.axis)
    }
}

/// Homogeneous offset making the two Rabi frequencies commensurate,
/// n_+ R'_- = n_- R'_+. A homogeneous offset leaves B_- (hence R_-)
/// untouched and moves B_+ to ±sqrt((n_+ R_-/n_-)² - J_{{h}}-²); both roots
/// are returned.
pub fn tuning_field_commensurate(
    params: &PhysicalParams,
    n_minus: i64,
    n_plus: i64,
) -> Result<[TuningField; 2], Error> {
    if n_minus <= 0 || n_plus <= 0 {
        return Err(Error::InvalidParams("commensurate integers must be positive".into()));
    }
    let d = params.derive();
    let target = n_plus as f64 * d.r_minus / n_minus as f64;
    let radicand = target * target - d.j_diff * d.j_diff;
    if radicand < 0.0 {
        return Err(Error::InfeasibleRadicand { radicand });
    }
    let root = radicand.sqrt();
    let mode = TuningMode::Commensurate { n_minus, n_plus };
    Ok([
        TuningField { mode, offset: TuningOffset::Homogeneous((-d.b_plus + root) / 2.0) },
        TuningField { mode, offset: TuningOffset::Homogeneous((-d.b_plus - root) / 2.0) },
    ])
}

/// Homogeneous offset maximizing the concurrence oscillation amplitude for
/// the Bell pair tied to B_+: sets |B'_+| = |J_{{h}}-| so that
/// 4 j² b² = 1 and the evolved concurrence reaches 0 periodically.
pub fn amplitude_maximizing_field(params: &PhysicalParams) -> [TuningField; 2] {
    let d = params.derive();
    [
        TuningField {
            mode: TuningMode::MaxAmplitude,
            offset: TuningOffset::Homogeneous((-d.b_plus + d.j_diff.abs()) / 2.0),
        },
        TuningField {
            mode: TuningMode::MaxAmplitude,
            offset: TuningOffset::Homogeneous((-d.b_plus - d.j_diff.abs()) / 2.0),
        },
    ]
}

/// Per-qubit increments for the Bell pair tied to B_-: the constraint is
/// δB1 - δB2 = -B_- ± |J_{{h}}+|; the minimal-norm pair splits it evenly.
pub fn selective_fields(params: &PhysicalParams) -> [TuningField; 2] {
    let d = params.derive();
    let make = |rhs: f64| TuningField {
        mode: TuningMode::Selective,
        offset: TuningOffset::PerQubit { d1: rhs / 2.0, d2: -rhs / 2.0 },
    };
    [make(-d.b_minus + d.j_sum.abs()), make(-d.b_minus - d.j_sum.abs())]
}

/// Sampled concurrence dynamics of one evolved Bell state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcurrenceTrace {
    pub axis: Axis,
    pub mu: Sign,
    pub nu: Sign,
    /// Rabi frequency R_{h,-f} governing the trace.
    pub rabi: f64,
    pub samples: Vec<(f64, f64)>,
}

impl ConcurrenceTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,C,axis,mu,nu\n");
        let sgn = |x: Sign| if x == Sign::Plus { "+" } else { "-" };
        for (t, c) in &self.samples {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_g12(*t),
                fmt_g12(*c),
                self.axis.index(),
                sgn(self.mu),
                sgn(self.nu)
            ));
        }
        s
    }
}

/// Samples the closed-form trace on [0, t_max] at `steps` points.
pub fn bell_concurrence_trace(
    params: &PhysicalParams,
    mu: Sign,
    nu: Sign,
    t_max: f64,
    steps: usize,
) -> ConcurrenceTrace {
    let f = bell_sector(params.axis, mu, nu);
    let d = params.derive();
    let samples = (0..steps.max(2))
        .map(|k| {
            let t = t_max * k as f64 / (steps.max(2) - 1) as f64;
            (t, bell_concurrence_closed(params, mu, nu, t))
        })
        .collect();
    ConcurrenceTrace { axis: params.axis, mu, nu, rabi: d.r(f.flip()), samples }
}
