//! The (α, β, γ) representation chart of S³, its folding equivalences, the
//! two projections from the full state space, the chart concurrence and
//! trajectory sampling for figure data export.
//!
//! Chart convention: the chart state is
//! sinα sinβ cosγ |00> + sinα sinβ sinγ |01> + sinα cosβ |11> + cosα |10>,
//! and the canonical cube is [0, π)³ after folding.

use crate::entanglement::concurrence;
use crate::error::Error;
use crate::evolution::{apply, propagator};
use crate::math::{fmt_g12, C64};
use crate::model::PhysicalParams;
use crate::state::{Basis, TwoQubitState};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Arccos argument beyond which clamping is flagged rather than treated as
/// floating-point spill.
const CLAMP_WARN: f64 = 1e-8;

/// A point of the representation chart.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChartPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Set when a coordinate singularity (sin α or sin β ≈ 0) left the
    /// remaining angles undetermined; they are reported as 0.
    pub degenerate: bool,
    /// Set when an arccos argument had to be clamped by more than the
    /// floating-point spill allowance.
    pub clamp_warning: bool,
}

impl ChartPoint {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        ChartPoint { alpha, beta, gamma, degenerate: false, clamp_warning: false }
    }

    /// Lies in the canonical cube [0, π)³.
    pub fn canonical(&self) -> bool {
        let ok = |x: f64| (0.0..PI).contains(&x);
        ok(self.alpha) && ok(self.beta) && ok(self.gamma)
    }
}

/// The real-amplitude state of a chart point, in the computational basis.
pub fn chart_state(alpha: f64, beta: f64, gamma: f64) -> TwoQubitState {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    TwoQubitState::new(
        [
            C64::new(sa * sb * cg, 0.0),
            C64::new(sa * sb * sg, 0.0),
            C64::new(ca, 0.0),
            C64::new(sa * cb, 0.0),
        ],
        Basis::Computational,
    )
}

fn clamped_acos(x: f64, warn: &mut bool) -> f64 {
    if x.abs() > 1.0 + CLAMP_WARN {
        *warn = true;
    }
    x.clamp(-1.0, 1.0).acos()
}

fn project_with(amp: impl Fn(usize) -> f64) -> ChartPoint {
    let mut warn = false;
    let alpha = clamped_acos(amp(2), &mut warn); // A_10 component
    let sa = alpha.sin();
    if sa < 1e-12 {
        return ChartPoint { alpha, beta: 0.0, gamma: 0.0, degenerate: true, clamp_warning: warn };
    }
    let beta = clamped_acos(amp(3) / sa, &mut warn); // A_11 component
    let sb = beta.sin();
    if sb < 1e-12 {
        return ChartPoint { alpha, beta, gamma: 0.0, degenerate: true, clamp_warning: warn };
    }
    let gamma = clamped_acos(amp(0) / (sa * sb), &mut warn); // A_00 component
    ChartPoint { alpha, beta, gamma, degenerate: false, clamp_warning: warn }
}

/// Projection through amplitude magnitudes; maps every state onto one
/// octant of the canonical cube.
pub fn project_magnitude(state: &TwoQubitState) -> ChartPoint {
    let a = state.to_computational().amp;
    project_with(|k| a[k].norm())
}

/// Projection through the real parts of the amplitudes. Faithful on
/// real-amplitude states; states with essentially imaginary components
/// project with information loss (flagged degenerate where the chart
/// denominators vanish).
pub fn project_real(state: &TwoQubitState) -> ChartPoint {
    let a = state.to_computational().amp;
    project_with(|k| a[k].re)
}

/// Folds a chart point into the canonical cube [0, π)³ using the chart
/// equivalences; the folded state equals the original up to a global sign.
pub fn fold_chart(p: &ChartPoint) -> ChartPoint {
    let mut a = p.alpha.rem_euclid(2.0 * PI);
    let mut b = p.beta.rem_euclid(2.0 * PI);
    let mut g = p.gamma.rem_euclid(2.0 * PI);
    for _ in 0..8 {
        if a > PI {
            // (π+ε, β, γ) ~ (π-ε, π-β, γ+π)
            a = 2.0 * PI - a;
            b = (PI - b).rem_euclid(2.0 * PI);
            g = (g + PI).rem_euclid(2.0 * PI);
            continue;
        }
        if b > PI {
            // (α, π+ε, γ) ~ (α, π-ε, γ+π)
            b = 2.0 * PI - b;
            g = (g + PI).rem_euclid(2.0 * PI);
            continue;
        }
        if a >= PI || b >= PI || g >= PI {
            // (α, β, γ) -> (π-α, π-β, γ+π) flips the state's global sign.
            a = PI - a;
            b = PI - b;
            g = (g + PI).rem_euclid(2.0 * PI);
            continue;
        }
        break;
    }
    ChartPoint {
        alpha: a,
        beta: b,
        gamma: g,
        degenerate: p.degenerate,
        clamp_warning: p.clamp_warning,
    }
}

/// Concurrence of the chart state in closed form.
pub fn chart_concurrence(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    let ssq = sa * sa * sb * sb;
    let cross = ca * cg + sa * sg * cb;
    let c_sq = 4.0 * ssq * (1.0 - ssq - cross * cross);
    c_sq.max(0.0).sqrt().min(1.0)
}

/// Which projection a trajectory uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    Magnitude,
    Real,
}

pub fn project(state: &TwoQubitState, projection: Projection) -> ChartPoint {
    match projection {
        Projection::Magnitude => project_magnitude(state),
        Projection::Real => project_real(state),
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub point: ChartPoint,
    pub concurrence: f64,
}

/// A sampled chart trajectory of a pulse sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// true: every sample folded into the canonical cube; false: angles
    /// continue smoothly outside it (nearest-branch continuation).
    pub folded: bool,
    pub projection: Projection,
}

impl Trajectory {
    /// CSV export: t, alpha, beta, gamma, concurrence, folded, degenerate.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,alpha,beta,gamma,concurrence,folded,degenerate\n");
        for smp in &self.samples {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_g12(smp.t),
                fmt_g12(smp.point.alpha),
                fmt_g12(smp.point.beta),
                fmt_g12(smp.point.gamma),
                fmt_g12(smp.concurrence),
                self.folded as u8,
                smp.point.degenerate as u8,
            ));
        }
        s
    }
}

/// Nearest 2π-branch of `raw` (or of its arccos mirror) to `prev`.
fn continue_angle(raw: f64, prev: f64) -> f64 {
    let mut best = raw;
    let mut best_d = f64::INFINITY;
    for cand_base in [raw, -raw] {
        let k = ((prev - cand_base) / (2.0 * PI)).round();
        let cand = cand_base + 2.0 * PI * k;
        let d = (cand - prev).abs();
        if d < best_d {
            best_d = d;
            best = cand;
        }
    }
    best
}

/// Samples the chart trajectory of a pulse sequence from an initial state.
/// Each pulse contributes `steps` samples (at least 2); loop endpoints
/// coincide in state space even when the chart representative differs.
pub fn sample_trajectory(
    pulses: &[(PhysicalParams, f64)],
    initial: &TwoQubitState,
    steps: usize,
    projection: Projection,
    folded: bool,
) -> Result<Trajectory, Error> {
    initial.check_normalized(1e-9)?;
    let steps = steps.max(2);
    let mut samples: Vec<TrajectorySample> = Vec::new();
    let mut state = initial.to_bell();
    let mut t0 = 0.0;
    let mut prev: Option<ChartPoint> = None;

    let mut push = |t: f64, s: &TwoQubitState, prev: &mut Option<ChartPoint>| -> Result<(), Error> {
        let mut point = project(s, projection);
        if folded {
            point = fold_chart(&point);
        } else if let Some(p) = prev {
            point.alpha = continue_angle(point.alpha, p.alpha);
            point.beta = continue_angle(point.beta, p.beta);
            point.gamma = continue_angle(point.gamma, p.gamma);
        }
        let c = concurrence(s)?;
        samples.push(TrajectorySample { t, point, concurrence: c });
        *prev = Some(point);
        Ok(())
    };

    push(0.0, &state, &mut prev)?;
    if pulses.is_empty() {
        // Zero-duration sequence: a single repeated point.
        push(0.0, &state, &mut prev)?;
    }
    for (params, duration) in pulses {
        for k in 1..=steps - 1 {
            let tau = duration * k as f64 / (steps - 1) as f64;
            let u = propagator(params, tau);
            let s = apply(&u, &state)?;
            push(t0 + tau, &s, &mut prev)?;
        }
        let u = propagator(params, *duration);
        state = apply(&u, &state)?;
        t0 += duration;
    }

    Ok(Trajectory { samples, folded, projection })
}
