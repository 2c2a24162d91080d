//! Plug-in entropy and mutual information of discrete variables, in nats.

use std::collections::HashMap;
use std::hash::Hash;

fn entropy_from_counts(counts: &mut [u64], n: f64) -> f64 {
    counts.sort_unstable();
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

/// Empirical entropy of a sample.
pub fn entropy<T: Hash + Eq>(xs: &[T]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut counts: HashMap<&T, u64> = HashMap::new();
    for x in xs {
        *counts.entry(x).or_default() += 1;
    }
    let mut c: Vec<u64> = counts.into_values().collect();
    entropy_from_counts(&mut c, xs.len() as f64)
}

/// Empirical mutual information between two aligned samples, as
/// `sum p(x,y) ln(p(x,y) / (p(x) p(y)))`.
pub fn mutual_information<X: Hash + Eq, Y: Hash + Eq>(xs: &[X], ys: &[Y]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "samples must be aligned");
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mut px: HashMap<&X, u64> = HashMap::new();
    let mut py: HashMap<&Y, u64> = HashMap::new();
    let mut pxy: HashMap<(&X, &Y), u64> = HashMap::new();
    for (x, y) in xs.iter().zip(ys) {
        *px.entry(x).or_default() += 1;
        *py.entry(y).or_default() += 1;
        *pxy.entry((x, y)).or_default() += 1;
    }
    let mut terms: Vec<f64> = pxy
        .iter()
        .map(|((x, y), &c)| {
            let joint = c as f64 / n;
            let (cx, cy) = (px[x] as f64, py[y] as f64);
            joint * (c as f64 * n / (cx * cy)).ln()
        })
        .collect();
    // fixed summation order regardless of hash iteration order
    terms.sort_by(f64::total_cmp);
    terms.iter().sum::<f64>().max(0.0)
}
