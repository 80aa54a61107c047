use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::MatchingError;

/// Degree sequence kept in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    values: Vec<usize>,
}

impl DegreeSequence {
    /// Sorts the values descending.
    pub fn new(mut values: Vec<usize>) -> Self {
        values.sort_unstable_by(|a, b| b.cmp(a));
        DegreeSequence { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn sum(&self) -> usize {
        self.values.iter().sum()
    }
}

/// Even total and largest value at most the sum of the others.
pub fn is_multigraphic(d: &[usize]) -> bool {
    let sum: usize = d.iter().sum();
    let max = d.iter().copied().max().unwrap_or(0);
    sum % 2 == 0 && max <= sum - max
}

/// Loopless multigraph with degree d[i] at vertex i, built by repeatedly
/// joining the two largest residual degrees (ties to the smaller index).
/// Edges come out as (i, j) with i < j.
pub fn realize_multigraph(d: &[usize]) -> Result<Vec<(usize, usize)>, MatchingError> {
    if !is_multigraphic(d) {
        return Err(MatchingError::NotMultigraphic(d.to_vec()));
    }
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = d.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| (x, Reverse(i))).collect();
    let mut edges = Vec::with_capacity(d.iter().sum::<usize>() / 2);
    while let Some((x, Reverse(i))) = heap.pop() {
        let (y, Reverse(j)) = heap.pop().expect("multigraphic sequence leaves a partner");
        edges.push((i.min(j), i.max(j)));
        if x > 1 {
            heap.push((x - 1, Reverse(i)));
        }
        if y > 1 {
            heap.push((y - 1, Reverse(j)));
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recount(len: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut deg = vec![0; len];
        for &(a, b) in edges {
            assert_ne!(a, b);
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    #[test]
    fn closed_form_examples() {
        assert!(is_multigraphic(&[2, 1, 1]));
        assert!(!is_multigraphic(&[3, 1]));
        assert!(!is_multigraphic(&[1, 1, 1]));
        assert!(is_multigraphic(&[]));
    }

    #[test]
    fn realizations_recount() {
        for d in [vec![2, 1, 1], vec![0, 0], vec![2, 2, 2], vec![4, 4], vec![3, 3, 2, 2]] {
            let e = realize_multigraph(&d).unwrap();
            assert_eq!(recount(d.len(), &e), d);
        }
        assert!(realize_multigraph(&[0, 0]).unwrap().is_empty());
        assert_eq!(realize_multigraph(&[3, 1]), Err(MatchingError::NotMultigraphic(vec![3, 1])));
    }

    #[test]
    fn sequence_sorts_descending() {
        assert_eq!(DegreeSequence::new(vec![1, 3, 2]).values(), &[3, 2, 1]);
    }
}
