//! Dense-matrix oracle for network propagation, independent of the element
//! application code in `quantum`.

#![allow(dead_code)]

use std::collections::BTreeMap;

use ifm_core::{Absorber, BeamSplitter, Element, NetworkSpec, PhaseShifter};
use num_complex::Complex64;
use rand::Rng;

pub type Matrix = Vec<Vec<Complex64>>;

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// Full `n x n` matrix of one element. Absorbers are projectors.
pub fn element_matrix(spec: &NetworkSpec, e: &Element) -> Matrix {
    let idx = |m: &str| spec.modes.iter().position(|x| x == m).unwrap();
    let mut m = identity(spec.modes.len());
    match e {
        Element::BeamSplitter(bs) => {
            let (i, j) = (idx(&bs.mode_a), idx(&bs.mode_b));
            let t = bs.transmission.sqrt();
            let r = (1.0 - bs.transmission).sqrt();
            m[i][i] = Complex64::new(t, 0.0);
            m[j][j] = Complex64::new(t, 0.0);
            m[i][j] = Complex64::new(0.0, r);
            m[j][i] = Complex64::new(0.0, r);
        }
        Element::Phase(ph) => {
            let i = idx(&ph.mode);
            m[i][i] = Complex64::new(ph.phase.cos(), ph.phase.sin());
        }
        Element::Absorber(ab) => {
            if ab.present {
                let i = idx(&ab.mode);
                m[i][i] = Complex64::new(0.0, 0.0);
            }
        }
    }
    m
}

/// Outcome probabilities from `M_k ... M_1 e_in`. Every absorber must report
/// `explosion`; its probability is the norm lost by the product.
pub fn brute_force(spec: &NetworkSpec) -> BTreeMap<String, f64> {
    let n = spec.modes.len();
    let total = spec
        .elements
        .iter()
        .fold(identity(n), |acc, e| matmul(&element_matrix(spec, e), &acc));
    let input = spec.modes.iter().position(|m| *m == spec.input_mode).unwrap();
    let out: Vec<Complex64> = (0..n).map(|i| total[i][input]).collect();
    let mut probs = BTreeMap::new();
    let mut kept = 0.0;
    for (mode, amp) in spec.modes.iter().zip(&out) {
        *probs.entry(spec.detector_map[mode].clone()).or_insert(0.0) += amp.norm_sqr();
        kept += amp.norm_sqr();
    }
    if spec
        .elements
        .iter()
        .any(|e| matches!(e, Element::Absorber(a) if a.present))
    {
        *probs.entry("explosion".to_owned()).or_insert(0.0) += 1.0 - kept;
    }
    probs
}

/// Random network over 2..=4 modes with up to `max_elements` elements.
pub fn random_network(rng: &mut impl Rng, max_elements: usize) -> NetworkSpec {
    let n = rng.gen_range(2..=4);
    let modes: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
    let count = rng.gen_range(0..=max_elements);
    let elements = (0..count)
        .map(|_| {
            let a = rng.gen_range(0..n);
            match rng.gen_range(0..3) {
                0 => {
                    let b = (a + rng.gen_range(1..n)) % n;
                    BeamSplitter::new(&modes[a], &modes[b], rng.gen_range(0.0..=1.0))
                        .unwrap()
                        .into()
                }
                1 => PhaseShifter::new(&modes[a], rng.gen_range(-7.0..7.0)).unwrap().into(),
                _ => Absorber::new(&modes[a], rng.gen_bool(0.5)).into(),
            }
        })
        .collect();
    // Detectors: one per mode, occasionally two modes share a label.
    let detector_map = modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            (
                m.clone(),
                format!("D{}", if i == 3 && rng.gen_bool(0.5) { 0 } else { i }),
            )
        })
        .collect();
    NetworkSpec {
        input_mode: modes[rng.gen_range(0..n)].clone(),
        modes,
        elements,
        detector_map,
    }
}

pub fn max_diff(a: &BTreeMap<String, f64>, b: &ifm_core::OutcomeDistribution) -> f64 {
    a.keys()
        .map(String::as_str)
        .chain(b.labels())
        .map(|l| (a.get(l).copied().unwrap_or(0.0) - b.prob(l)).abs())
        .fold(0.0, f64::max)
}
