//! Same-parity adjacency penalty for a toy phonotactic rule.

use crate::corpus::Char;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArticulationScore {
    /// `epsilon` times the number of violations.
    pub score: f64,
    /// Adjacent pairs with equal parity.
    pub violations: usize,
    /// Violations over the `len - 1` adjacencies; 0 for messages shorter than 2.
    pub violation_rate: f64,
}

pub fn articulation_score(message: &[Char], epsilon: f64) -> ArticulationScore {
    let violations = message
        .windows(2)
        .filter(|w| w[0] % 2 == w[1] % 2)
        .count();
    let adjacencies = message.len().saturating_sub(1);
    ArticulationScore {
        score: epsilon * violations as f64,
        violations,
        violation_rate: if adjacencies == 0 {
            0.0
        } else {
            violations as f64 / adjacencies as f64
        },
    }
}

/// Mean per-message violation rate.
pub fn mean_violation_rate<'a>(messages: impl ExactSizeIterator<Item = &'a [Char]>) -> f64 {
    let n = messages.len();
    if n == 0 {
        return 0.0;
    }
    messages
        .map(|m| articulation_score(m, 1.0).violation_rate)
        .sum::<f64>()
        / n as f64
}
