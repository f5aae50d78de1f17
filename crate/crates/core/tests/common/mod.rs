//! Test-only oracles. Nothing here calls into the combination code under test.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use ds_forecast::frame::{Frame, HypothesisSet};
use ds_forecast::mass::{validate_mass, MassFunction, RawAssignment};
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn small_frame(size: usize) -> Arc<Frame> {
    Arc::new(Frame::new((0..size).map(|i| format!("h{i}"))).unwrap())
}

/// A random mass function with up to four focal sets; Θ keeps some mass with
/// probability `theta_prob`.
pub fn random_mass<R: Rng>(rng: &mut R, frame: &Arc<Frame>, theta_prob: f64) -> MassFunction {
    let full = frame.full().bits();
    let focal_count = rng.gen_range(1..=4);
    let mut raw: Vec<(HypothesisSet, f64)> = (0..focal_count)
        .map(|_| {
            (
                HypothesisSet::from_bits(rng.gen_range(1..=full)),
                rng.gen_range(0.05..1.0),
            )
        })
        .collect();
    if rng.gen_bool(theta_prob) {
        raw.push((frame.full(), rng.gen_range(0.05..1.0)));
    }
    let total: f64 = raw.iter().map(|r| r.1).sum();
    let assignments: Vec<_> = raw
        .into_iter()
        .map(|(h, b)| RawAssignment::new(h, b / total))
        .collect();
    validate_mass(frame, &assignments).unwrap()
}

/// Dempster combination of all inputs at once: every tuple of focal sets is
/// intersected and the result normalised a single time. `None` on total
/// conflict.
pub fn multiway_combination(masses: &[MassFunction]) -> Option<BTreeMap<u64, f64>> {
    let lists: Vec<Vec<(u64, f64)>> = masses
        .iter()
        .map(|m| m.focal().map(|(s, v)| (s.bits(), v)).collect())
        .collect();
    let full = masses[0].frame().full().bits();
    let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    let mut idx = vec![0usize; lists.len()];
    loop {
        let mut set = full;
        let mut product = 1.0;
        for (list, &i) in lists.iter().zip(&idx) {
            set &= list[i].0;
            product *= list[i].1;
        }
        if set == 0 {
            conflict += product;
        } else {
            *acc.entry(set).or_insert(0.0) += product;
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == idx.len() {
                let norm = 1.0 - conflict;
                if norm <= 1e-12 {
                    return None;
                }
                return Some(acc.into_iter().map(|(s, v)| (s, v / norm)).collect());
            }
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Largest per-focal-set difference between a mass function and an oracle map.
pub fn max_deviation(m: &MassFunction, oracle: &BTreeMap<u64, f64>) -> f64 {
    let mut keys: Vec<u64> = oracle.keys().copied().collect();
    keys.extend(m.focal().map(|(s, _)| s.bits()));
    keys.into_iter()
        .map(|k| {
            (m.mass(HypothesisSet::from_bits(k)) - oracle.get(&k).copied().unwrap_or(0.0)).abs()
        })
        .fold(0.0, f64::max)
}

/// Bel({i}) by scanning focal sets.
pub fn singleton_belief(m: &MassFunction, i: usize) -> f64 {
    m.focal()
        .filter(|(s, _)| s.bits() == 1 << i)
        .map(|(_, v)| v)
        .sum()
}

/// Pl({i}) by scanning focal sets.
pub fn singleton_plausibility(m: &MassFunction, i: usize) -> f64 {
    m.focal()
        .filter(|(s, _)| s.bits() & (1 << i) != 0)
        .map(|(_, v)| v)
        .sum()
}
