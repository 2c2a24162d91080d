use smallvec::SmallVec;

use crate::corpus::Meaning;
use crate::error::{Error, Result};

/// Unit-cost edit distance (insertions, deletions, substitutions).
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: SmallVec<[usize; 32]> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let sub = diag + usize::from(ca != cb);
            row[j + 1] = sub.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

/// Hamming distance between attribute tuples.
pub fn meaning_distance(a: &Meaning, b: &Meaning) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::Metric(format!(
            "meanings ({a}) and ({b}) come from different configurations"
        )));
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count())
}
