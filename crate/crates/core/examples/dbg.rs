use isingpulse::entanglement::*;
use isingpulse::model::*;
use isingpulse::evolution::{apply, propagator};
use isingpulse::state::TwoQubitState;
use std::f64::consts::PI;

fn main() {
    let j = [2.0, 0.4, 0.6];
    let d0 = PhysicalParams::new(j, 0.0, 0.0, Axis::X).derive();
    println!("j_diff = {}, j_sum = {}", d0.j_diff, d0.j_sum);
    let b_plus = d0.j_diff.abs();
    let p = PhysicalParams::new(j, b_plus / 2.0, b_plus / 2.0, Axis::X);
    let d = p.derive();
    println!("b_plus={} r_plus={} b_hat={} j_hat={}", d.b_plus, d.r_plus, d.b_hat_plus, d.j_hat_plus);
    let t = PI / (2.0 * d.r_plus);
    let c = bell_concurrence_closed(&p, Sign::Minus, Sign::Minus, t);
    println!("closed C = {c:.3e}");
    let evolved = apply(&propagator(&p, t), &TwoQubitState::bell(0,0)).unwrap();
    let oracle = concurrence(&evolved).unwrap();
    println!("oracle C = {oracle:.3e}");
    println!("sector f = {:?}", bell_sector(Axis::X, Sign::Minus, Sign::Minus));
}
