use super::{GraphError, MultipartiteGraph};

/// A partition of the vertex ids into `d` labelled parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLabeling {
    d: usize,
    part_of: Vec<usize>,
}

impl PartitionLabeling {
    pub fn new(d: usize, part_of: Vec<usize>) -> Result<Self, GraphError> {
        if let Some(&bad) = part_of.iter().find(|&&p| p >= d) {
            return Err(GraphError::InvalidParameters(format!("part {bad} out of range 0..{d}")));
        }
        Ok(PartitionLabeling { d, part_of })
    }

    /// One part per class.
    pub fn by_class(g: &MultipartiteGraph) -> Self {
        PartitionLabeling { d: g.r(), part_of: (0..g.vertex_count()).map(|v| g.class_of(v)).collect() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    pub fn parts(&self) -> &[usize] {
        &self.part_of
    }

    pub fn members(&self, part: usize) -> Vec<usize> {
        (0..self.part_of.len()).filter(|&v| self.part_of[v] == part).collect()
    }

    /// True when every part lies inside a single class.
    pub fn respects_classes(&self, g: &MultipartiteGraph) -> bool {
        self.class_of_part(g).is_some()
    }

    /// The class containing each part, when the labeling refines the classes.
    /// Empty parts map to `usize::MAX`.
    pub fn class_of_part(&self, g: &MultipartiteGraph) -> Option<Vec<usize>> {
        let mut cls = vec![usize::MAX; self.d];
        for (v, &p) in self.part_of.iter().enumerate() {
            let c = g.class_of(v);
            if cls[p] == usize::MAX {
                cls[p] = c;
            } else if cls[p] != c {
                return None;
            }
        }
        Some(cls)
    }

    /// Number of vertices of `set` in each part.
    pub fn index_vector(&self, set: &[usize]) -> Vec<i64> {
        let mut out = vec![0; self.d];
        for &v in set {
            out[self.part_of[v]] += 1;
        }
        out
    }

    /// Lift to the blow-up produced by `MultipartiteGraph::blow_up`.
    pub fn blow_up(&self, g: &MultipartiteGraph, factor: usize) -> Self {
        let mut part_of = Vec::with_capacity(self.part_of.len() * factor);
        for c in 0..g.r() {
            for v in g.class_range(c) {
                part_of.extend(std::iter::repeat(self.part_of[v]).take(factor));
            }
        }
        PartitionLabeling { d: self.d, part_of }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_vector_counts_parts() {
        let l = PartitionLabeling::new(3, vec![0, 0, 1, 2]).unwrap();
        assert_eq!(l.index_vector(&[0, 1, 3]), vec![2, 0, 1]);
        assert!(PartitionLabeling::new(2, vec![0, 2]).is_err());
    }

    #[test]
    fn respects_classes() {
        let g = MultipartiteGraph::new(&[2, 2]);
        assert!(PartitionLabeling::new(3, vec![0, 1, 2, 2]).unwrap().respects_classes(&g));
        assert!(!PartitionLabeling::new(2, vec![0, 1, 0, 1]).unwrap().respects_classes(&g));
    }
}
