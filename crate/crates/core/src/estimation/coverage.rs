use serde::Serialize;

use crate::choice::ChoiceObservation;

/// How often each unordered item pair appeared together in a display.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCoverage {
    pub n: usize,
    counts: Vec<usize>,
    /// Pairs `(i, j)`, `i < j`, never displayed together.
    pub uncovered: Vec<(usize, usize)>,
}

impl PairCoverage {
    pub fn count(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.counts[a * self.n + b]
    }

    pub fn is_covered(&self, i: usize, j: usize) -> bool {
        self.count(i, j) > 0
    }

    pub fn all_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Counts pair co-occurrences over all displays and lists the pairs whose
/// relative order the data cannot identify.
pub fn coverage_report(n: usize, data: &[ChoiceObservation]) -> PairCoverage {
    let mut counts = vec![0usize; n * n];
    for obs in data {
        let items = obs.display().items();
        for (a, &i) in items.iter().enumerate() {
            for &j in &items[a + 1..] {
                counts[i * n + j] += 1;
            }
        }
    }
    let uncovered = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| counts[i * n + j] == 0)
        .collect();
    PairCoverage {
        n,
        counts,
        uncovered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::DisplaySet;

    #[test]
    fn full_displays_cover_everything() {
        let data = vec![ChoiceObservation::single(DisplaySet::full(4), 2).unwrap()];
        let cov = coverage_report(4, &data);
        assert!(cov.all_covered());
        assert_eq!(cov.count(3, 1), 1);
    }

    #[test]
    fn chain_of_pairs_misses_the_ends() {
        let data = vec![
            ChoiceObservation::single(DisplaySet::new(vec![0, 1], 3).unwrap(), 0).unwrap(),
            ChoiceObservation::single(DisplaySet::new(vec![1, 2], 3).unwrap(), 1).unwrap(),
        ];
        let cov = coverage_report(3, &data);
        assert_eq!(cov.uncovered, vec![(0, 2)]);
        assert!(!cov.is_covered(2, 0));
    }
}
