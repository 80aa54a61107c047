//! Integer lattices in Z^d, kept in Hermite normal form.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::graph::PartitionLabeling;

/// Row-style Hermite normal form: rows are sorted by strictly increasing
/// pivot column, pivots are positive, and entries above a pivot lie in
/// [0, pivot).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerLattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

fn pivot(row: &[i128]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

impl IntegerLattice {
    pub fn from_generators(dim: usize, generators: &[Vec<i64>]) -> Self {
        let mut rows: Vec<Vec<i128>> = generators
            .iter()
            .map(|g| {
                assert_eq!(g.len(), dim, "generator has wrong dimension");
                g.iter().map(|&x| x as i128).collect()
            })
            .filter(|g: &Vec<i128>| g.iter().any(|&x| x != 0))
            .collect();
        let mut basis: Vec<Vec<i128>> = Vec::new();
        for col in 0..dim {
            // Euclid on the rows with leading entry in this column.
            loop {
                let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| pivot(&rows[i]) == Some(col)).collect();
                if idx.is_empty() {
                    break;
                }
                idx.sort_by_key(|&i| rows[i][col].abs());
                let lead = idx[0];
                if idx.len() == 1 {
                    let mut row = rows.swap_remove(lead);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    basis.push(row);
                    break;
                }
                let lead_row = rows[lead].clone();
                for &i in &idx[1..] {
                    let q = Integer::div_floor(&rows[i][col], &lead_row[col]);
                    for (x, y) in rows[i].iter_mut().zip(&lead_row) {
                        *x -= q * y;
                    }
                }
                rows.retain(|r| r.iter().any(|&x| x != 0));
            }
        }
        // Reduce entries above each pivot.
        for i in 0..basis.len() {
            let pc = pivot(&basis[i]).expect("nonzero basis row");
            let pv = basis[i][pc];
            for j in 0..i {
                let q = Integer::div_floor(&basis[j][pc], &pv);
                if q != 0 {
                    let bi = basis[i].clone();
                    for (x, y) in basis[j].iter_mut().zip(&bi) {
                        *x -= q * y;
                    }
                }
            }
        }
        let basis = basis.into_iter().map(|r| r.into_iter().map(|x| i64::try_from(x).expect("lattice entry overflow")).collect()).collect();
        IntegerLattice { dim, basis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Back-substitution against the echelon basis.
    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let mut t: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for row in &self.basis {
            let pc = row.iter().position(|&x| x != 0).expect("nonzero basis row");
            if t[..pc].iter().any(|&x| x != 0) {
                return false;
            }
            let pv = row[pc] as i128;
            if t[pc] % pv != 0 {
                return false;
            }
            let q = t[pc] / pv;
            for (x, &y) in t.iter_mut().zip(row) {
                *x -= q * y as i128;
            }
        }
        t.iter().all(|&x| x == 0)
    }
}

fn unit(dim: usize, i: usize) -> Vec<i64> {
    let mut u = vec![0; dim];
    u[i] = 1;
    u
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RobustLattice {
    pub lattice: IntegerLattice,
    /// How often each index vector occurs among the edges.
    pub attained: BTreeMap<Vec<i64>, usize>,
    /// Index vectors occurring at least `mu_count` times (and at least once).
    pub robust: Vec<Vec<i64>>,
}

/// Lattice generated by the index vectors of edges that occur at least
/// `mu_count` times.
pub fn robust_edge_lattice(edges: &[Vec<usize>], labeling: &PartitionLabeling, mu_count: usize) -> RobustLattice {
    let mut attained: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for e in edges {
        *attained.entry(labeling.index_vector(e)).or_insert(0) += 1;
    }
    let robust: Vec<Vec<i64>> = attained.iter().filter(|(_, &c)| c >= mu_count.max(1)).map(|(v, _)| v.clone()).collect();
    let lattice = IntegerLattice::from_generators(labeling.d(), &robust);
    RobustLattice { lattice, attained, robust }
}

/// Parts i < j inside one class with u_i − u_j outside the lattice. Empty
/// means the lattice is complete with respect to the partition.
pub fn incomplete_pairs(lattice: &IntegerLattice, class_of_part: &[usize]) -> Vec<(usize, usize)> {
    let d = lattice.dim();
    let mut out = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            if class_of_part[i] != usize::MAX && class_of_part[i] == class_of_part[j] {
                let diff: Vec<i64> = unit(d, i).iter().zip(unit(d, j)).map(|(a, b)| a - b).collect();
                if !lattice.contains(&diff) {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

pub fn is_complete_wrt(lattice: &IntegerLattice, class_of_part: &[usize]) -> bool {
    incomplete_pairs(lattice, class_of_part).is_empty()
}

/// Merge parts (in the same class) whose difference lies in the lattice,
/// recomputing the lattice after each round, until no merge applies.
/// Returns the merged labeling and its lattice.
pub fn merge_to_minimal(
    edges: &[Vec<usize>],
    labeling: &PartitionLabeling,
    class_of_part: &[usize],
    mu_count: usize,
) -> (PartitionLabeling, Vec<usize>, RobustLattice) {
    let mut lab = labeling.clone();
    let mut classes = class_of_part.to_vec();
    loop {
        let rl = robust_edge_lattice(edges, &lab, mu_count);
        let d = lab.d();
        let mut merge: Option<(usize, usize)> = None;
        'find: for i in 0..d {
            for j in (i + 1)..d {
                if classes[i] != usize::MAX && classes[i] == classes[j] {
                    let diff: Vec<i64> = (0..d).map(|x| i64::from(x == i) - i64::from(x == j)).collect();
                    if rl.lattice.contains(&diff) {
                        merge = Some((i, j));
                        break 'find;
                    }
                }
            }
        }
        let Some((i, j)) = merge else { return (lab, classes, rl) };
        // Part j folds into part i; parts above j shift down.
        let parts = lab.parts().iter().map(|&p| if p == j { i } else if p > j { p - 1 } else { p }).collect();
        lab = PartitionLabeling::new(d - 1, parts).expect("merged labeling");
        classes.remove(j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_first_coordinate() {
        let l = IntegerLattice::from_generators(2, &[vec![-2, 2], vec![0, 1]]);
        assert!(l.contains(&[2, 0]));
        assert!(l.contains(&[4, -7]));
        assert!(!l.contains(&[1, 1]));
        assert!(!l.contains(&[3, 3]));
        assert_eq!(l.basis(), &[vec![2, 0], vec![0, 1]]);
    }

    #[test]
    fn hnf_of_dependent_generators() {
        let l = IntegerLattice::from_generators(3, &[vec![2, 4, 6], vec![3, 6, 9], vec![0, 0, 0]]);
        assert_eq!(l.rank(), 1);
        assert_eq!(l.basis(), &[vec![1, 2, 3]]);
    }

    #[test]
    fn completeness_by_class() {
        let l = IntegerLattice::from_generators(4, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        assert_eq!(incomplete_pairs(&l, &[0, 0, 1, 1]), vec![(0, 1), (2, 3)]);
        let l = IntegerLattice::from_generators(4, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 0, 1]]);
        assert!(is_complete_wrt(&l, &[0, 0, 1, 1]));
    }
}
