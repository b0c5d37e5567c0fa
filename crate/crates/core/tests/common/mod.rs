#![allow(dead_code)]

use ilp_reparam::{IlpInstance, RelaxedPoint, SeededSampler};
use proptest::prelude::*;

pub fn uniform(s: &mut SeededSampler, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * s.next_uniform()
}

pub fn point(s: &mut SeededSampler, d: usize, lo: f64, hi: f64) -> RelaxedPoint {
    RelaxedPoint::new((0..d).map(|_| uniform(s, lo, hi)).collect()).unwrap()
}

pub fn random_instance(s: &mut SeededSampler, m: usize, d: usize, lo: f64, hi: f64) -> IlpInstance {
    let a = (0..m).map(|_| (0..d).map(|_| uniform(s, lo, hi)).collect()).collect();
    let b = (0..m).map(|_| uniform(s, lo, hi)).collect();
    let c = (0..d).map(|_| uniform(s, lo, hi)).collect();
    IlpInstance::new(a, b, c).unwrap()
}

/// Rejection-samples instances until one has a feasible corner (by the oracle).
pub fn random_feasible(s: &mut SeededSampler, max_m: usize, max_d: usize) -> IlpInstance {
    loop {
        let m = 1 + (s.next_uniform() * max_m as f64) as usize;
        let d = 1 + (s.next_uniform() * max_d as f64) as usize;
        let inst = random_instance(s, m.min(max_m), d.min(max_d), -2.0, 2.0);
        if oracle_solve(&inst).0.is_some() {
            return inst;
        }
    }
}

/// All corners of `{0,1}^d` in lexicographic order, built recursively.
pub fn oracle_corners(d: usize) -> Vec<Vec<f64>> {
    if d == 0 {
        return vec![vec![]];
    }
    let tails = oracle_corners(d - 1);
    let mut out = Vec::with_capacity(2 * tails.len());
    for head in [0.0, 1.0] {
        for t in &tails {
            let mut v = vec![head];
            v.extend_from_slice(t);
            out.push(v);
        }
    }
    out
}

pub fn oracle_slack(inst: &IlpInstance, i: usize, x: &[f64]) -> f64 {
    let mut lhs = 0.0;
    for (a, v) in inst.row(i).iter().zip(x) {
        if *v == 1.0 {
            lhs += a;
        }
    }
    lhs - inst.b()[i]
}

/// Optimal value and optimal corners, by a second independent enumeration.
pub fn oracle_solve(inst: &IlpInstance) -> (Option<f64>, Vec<Vec<f64>>) {
    let mut best: Option<f64> = None;
    let mut set = Vec::new();
    for x in oracle_corners(inst.d()) {
        if (0..inst.m()).any(|i| oracle_slack(inst, i, &x) > 0.0) {
            continue;
        }
        let mut v = 0.0;
        for (c, xj) in inst.c().iter().zip(&x) {
            if *xj == 1.0 {
                v += c;
            }
        }
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => set.push(x),
            _ => {
                best = Some(v);
                set = vec![x];
            }
        }
    }
    (best, set)
}

/// `Φᵢ` by brute force over corners with independently computed weights.
pub fn oracle_phi(inst: &IlpInstance, xhat: &[f64]) -> Vec<f64> {
    let mut phi = vec![0.0; inst.m()];
    for x in oracle_corners(inst.d()) {
        let w: f64 = x.iter().zip(xhat).map(|(b, p)| if *b == 1.0 { *p } else { 1.0 - p }).product();
        for (i, acc) in phi.iter_mut().enumerate() {
            *acc += w * oracle_slack(inst, i, &x).max(0.0);
        }
    }
    phi
}

fn continuous(m: usize, d: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), m),
        prop::collection::vec(-2.0..2.0f64, m),
        prop::collection::vec(-2.0..2.0f64, d),
    )
}

fn integral(m: usize, d: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    let e = || (-2i32..=2).prop_map(f64::from);
    (
        prop::collection::vec(prop::collection::vec(e(), d), m),
        prop::collection::vec(e(), m),
        prop::collection::vec(e(), d),
    )
}

/// Instances with entries in `[−2, 2]`; the integral half exercises ties.
pub fn instances(max_m: usize, max_d: usize) -> impl Strategy<Value = IlpInstance> {
    (1..=max_m, 1..=max_d)
        .prop_flat_map(|(m, d)| prop_oneof![continuous(m, d), integral(m, d)])
        .prop_map(|(a, b, c)| IlpInstance::new(a, b, c).unwrap())
}
