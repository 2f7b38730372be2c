#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use respmot::linker::CostMatrix;
use respmot::synth::SceneSpec;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn scene_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

pub fn lanes_spec() -> SceneSpec {
    SceneSpec::load(scene_path("lanes.toml")).expect("lanes scene")
}

/// Minimum total cost over all matchings of size min(n, m), by enumeration.
/// Returns the cost and the lexicographically smallest optimal pair list.
pub fn brute_force(c: &CostMatrix) -> (f64, Vec<(usize, usize)>) {
    let (n, m) = (c.rows(), c.cols());
    let transpose = n > m;
    let (small, large) = if transpose { (m, n) } else { (n, m) };
    let cost = |i: usize, j: usize| if transpose { c.get(j, i) } else { c.get(i, j) };
    let mut best = (f64::INFINITY, Vec::new());
    let mut used = vec![false; large];
    let mut pick = Vec::with_capacity(small);
    fn rec(
        i: usize,
        small: usize,
        large: usize,
        acc: f64,
        used: &mut [bool],
        pick: &mut Vec<usize>,
        cost: &dyn Fn(usize, usize) -> f64,
        transpose: bool,
        best: &mut (f64, Vec<(usize, usize)>),
    ) {
        if i == small {
            let mut pairs: Vec<(usize, usize)> = pick
                .iter()
                .enumerate()
                .map(|(a, &b)| if transpose { (b, a) } else { (a, b) })
                .collect();
            pairs.sort_unstable();
            if acc < best.0 || (acc == best.0 && pairs < best.1) {
                *best = (acc, pairs);
            }
            return;
        }
        for j in 0..large {
            if !used[j] {
                used[j] = true;
                pick.push(j);
                rec(i + 1, small, large, acc + cost(i, j), used, pick, cost, transpose, best);
                pick.pop();
                used[j] = false;
            }
        }
    }
    rec(0, small, large, 0.0, &mut used, &mut pick, &cost, transpose, &mut best);
    best
}

/// Integer-valued random cost matrix with at least one dimension <= 7.
pub fn random_matrix(r: &mut impl Rng) -> CostMatrix {
    let a = r.random_range(1..=7usize);
    let b = r.random_range(1..=7usize);
    let (n, m) = if r.random_bool(0.5) { (a, b) } else { (b, a) };
    let hi = if r.random_bool(0.3) { 4 } else { 100 };
    CostMatrix::from_fn(n, m, |_, _| f64::from(r.random_range(0..hi)))
}
