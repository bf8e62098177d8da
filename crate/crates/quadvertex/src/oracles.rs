//! Independent reference implementations used by the verification suites.
//!
//! These deliberately avoid the production enumeration paths: the solid
//! partition counter works layer by layer through chains of 3D diagrams, and
//! the box-configuration counter filters raw subsets of a candidate window.
//! They exist to catch systematic errors in the fast enumerations.

use std::collections::{BTreeMap, BTreeSet};

use crate::partitions::{BoxConfiguration, PlanePartition};

type Diagram = BTreeSet<[i32; 3]>;

fn ideals_inside(top: &Diagram, max_size: usize) -> Vec<Diagram> {
    let mut out: Vec<Diagram> = vec![Diagram::new()];
    let mut seen: BTreeSet<Vec<[i32; 3]>> = BTreeSet::new();
    seen.insert(Vec::new());
    let mut frontier: Vec<Diagram> = vec![Diagram::new()];
    while let Some(cur) = frontier.pop() {
        if cur.len() >= max_size {
            continue;
        }
        for w in top {
            if cur.contains(w) {
                continue;
            }
            let ok = (0..3).all(|i| {
                let mut p = *w;
                p[i] -= 1;
                p[i] < 1 || cur.contains(&p)
            });
            if ok {
                let mut next = cur.clone();
                next.insert(*w);
                let key: Vec<[i32; 3]> = next.iter().copied().collect();
                if seen.insert(key) {
                    out.push(next.clone());
                    frontier.push(next);
                }
            }
        }
    }
    out
}

fn count_chains(
    top: &Diagram,
    remaining: usize,
    memo: &mut BTreeMap<(Vec<[i32; 3]>, usize), u64>,
) -> u64 {
    if remaining == 0 {
        return 1;
    }
    let key = (top.iter().copied().collect::<Vec<_>>(), remaining);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut acc = 0u64;
    for layer in ideals_inside(top, remaining) {
        if !layer.is_empty() && layer.len() <= remaining {
            acc += count_chains(&layer, remaining - layer.len(), memo);
        }
    }
    memo.insert(key, acc);
    acc
}

/// Number of solid partitions of `n`, counted as weakly decreasing chains of
/// 3D diagrams (the slices along the fourth axis).
pub fn solid_partition_count(n: usize) -> u64 {
    let mut cube = Diagram::new();
    for i in 1..=(n as i32) {
        for j in 1..=(n as i32) {
            for k in 1..=(n as i32) {
                cube.insert([i, j, k]);
            }
        }
    }
    let mut memo = BTreeMap::new();
    count_chains(&cube, n, &mut memo)
}

/// Box-configuration counts by length, from raw subsets of the candidate
/// window filtered by the closure rule. Only usable for small windows.
pub fn box_configuration_counts_brute(
    legs: [PlanePartition; 4],
    len_max: u32,
) -> Option<Vec<usize>> {
    let base = BoxConfiguration::empty(legs).ok()?;
    let window = base.candidate_window(len_max);
    if window.len() > 22 {
        return None;
    }
    let mut counts = vec![0usize; len_max as usize + 1];
    for mask in 0u64..(1 << window.len()) {
        if mask.count_ones() > len_max {
            continue;
        }
        let boxes: BTreeSet<[i32; 4]> = window
            .iter()
            .enumerate()
            .filter(|(idx, _)| mask & (1 << idx) != 0)
            .map(|(_, w)| *w)
            .collect();
        let cfg = BoxConfiguration { legs: base.legs.clone(), boxes };
        if cfg.is_closed() {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    Some(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_low_counts() {
        assert_eq!(solid_partition_count(1), 1);
        assert_eq!(solid_partition_count(2), 4);
        assert_eq!(solid_partition_count(3), 10);
        assert_eq!(solid_partition_count(4), 26);
    }
}
