use serde::{Deserialize, Serialize};

/// Bipartite graph with `left` and `right` vertices numbered from zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    /// Sorted right neighbours of each left vertex.
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph { left, right, adj: vec![Vec::new(); left] }
    }

    pub fn complete(left: usize, right: usize) -> Self {
        BipartiteGraph { left, right, adj: vec![(0..right).collect(); left] }
    }

    pub fn add_edge(&mut self, l: usize, r: usize) {
        assert!(l < self.left && r < self.right, "edge ({l},{r}) out of range");
        if let Err(pos) = self.adj[l].binary_search(&r) {
            self.adj[l].insert(pos, r);
        }
    }

    pub fn has_edge(&self, l: usize, r: usize) -> bool {
        self.adj[l].binary_search(&r).is_ok()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right];
        for ns in &self.adj {
            for &r in ns {
                deg[r] += 1;
            }
        }
        deg
    }

    pub fn regularity(&self) -> Regularity {
        if self.left != self.right {
            return Regularity::UnequalSides;
        }
        let d = self.adj.first().map_or(0, Vec::len);
        if d >= 1 && self.adj.iter().all(|ns| ns.len() == d) && self.right_degrees().iter().all(|&x| x == d) {
            Regularity::Regular(d)
        } else {
            Regularity::Irregular
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regularity {
    Regular(usize),
    UnequalSides,
    Irregular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectMatchingReport {
    pub regularity: Regularity,
    /// partner[l] is the right vertex matched to l.
    pub partner: Option<Vec<usize>>,
}

/// Maximum matching by augmenting paths, trying left vertices and their
/// neighbours in increasing order. Returns the partner of each left vertex.
pub fn maximum_matching(b: &BipartiteGraph) -> Vec<Option<usize>> {
    fn augment(b: &BipartiteGraph, l: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &b.adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].map_or(true, |l2| augment(b, l2, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; b.right];
    for l in 0..b.left {
        let mut seen = vec![false; b.right];
        augment(b, l, &mut seen, &mut owner);
    }
    let mut partner = vec![None; b.left];
    for (r, o) in owner.iter().enumerate() {
        if let Some(l) = *o {
            partner[l] = Some(r);
        }
    }
    partner
}

/// Perfect matching of a (checked) regular bipartite graph. Irregular or
/// unbalanced inputs are reported as such but still searched.
pub fn regular_bipartite_perfect_matching(b: &BipartiteGraph) -> PerfectMatchingReport {
    let regularity = b.regularity();
    let partner = if b.left == b.right {
        let m = maximum_matching(b);
        m.into_iter().collect::<Option<Vec<usize>>>()
    } else {
        None
    };
    if let Regularity::Regular(_) = regularity {
        assert!(partner.is_some(), "regular bipartite graph without a perfect matching");
    }
    PerfectMatchingReport { regularity, partner }
}
