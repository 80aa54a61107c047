use std::collections::VecDeque;

use super::MatchingError;
use crate::graph::MultipartiteGraph;

/// Some class j = {x, y} with a simple path of even length from x to y.
/// Classes are tried in order; a parity breadth-first search first rules out
/// classes without even walks, then a depth-first search looks for a simple
/// path.
pub fn even_path_between_copartners(h: &MultipartiteGraph) -> Result<Option<(usize, Vec<usize>)>, MatchingError> {
    if h.class_sizes().iter().any(|&s| s != 2) {
        return Err(MatchingError::Malformed("every class must have exactly two vertices".into()));
    }
    for j in 0..h.r() {
        let (x, y) = (h.class_range(j).start, h.class_range(j).start + 1);
        if !even_walk_exists(h, x, y) {
            continue;
        }
        let mut on_path = vec![false; h.vertex_count()];
        let mut path = vec![x];
        on_path[x] = true;
        if dfs(h, y, &mut on_path, &mut path) {
            return Ok(Some((j, path)));
        }
    }
    Ok(None)
}

fn even_walk_exists(h: &MultipartiteGraph, x: usize, y: usize) -> bool {
    let n = h.vertex_count();
    let mut seen = vec![[false; 2]; n];
    seen[x][0] = true;
    let mut queue = VecDeque::from([(x, 0usize)]);
    while let Some((v, parity)) = queue.pop_front() {
        for w in h.neighbors(v).ones() {
            let p = 1 - parity;
            if !seen[w][p] {
                seen[w][p] = true;
                queue.push_back((w, p));
            }
        }
    }
    seen[y][0]
}

fn dfs(h: &MultipartiteGraph, target: usize, on_path: &mut [bool], path: &mut Vec<usize>) -> bool {
    let v = *path.last().expect("path starts at x");
    for w in h.neighbors(v).ones() {
        if w == target {
            // path has path.len() − 1 edges; stepping to the target adds one.
            if path.len() % 2 == 1 {
                continue;
            }
            path.push(w);
            return true;
        }
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        if dfs(h, target, on_path, path) {
            return true;
        }
        path.pop();
        on_path[w] = false;
    }
    false
}

/// Simple path of even length joining the two vertices of one class.
pub fn is_even_copartner_path(h: &MultipartiteGraph, path: &[usize]) -> bool {
    let (Some(&x), Some(&y)) = (path.first(), path.last()) else { return false };
    let mut seen = std::collections::HashSet::new();
    path.len() >= 3
        && (path.len() - 1) % 2 == 0
        && x != y
        && h.class_of(x) == h.class_of(y)
        && path.iter().all(|&v| seen.insert(v))
        && path.windows(2).all(|w| h.has_edge(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_cycle() {
        // classes {0,1} and {2,3}: x1=0, y1=1, x2=2, y2=3; cycle 0-2-1-3-0.
        let mut h = MultipartiteGraph::new(&[2, 2]);
        for (a, b) in [(0, 2), (2, 1), (1, 3), (3, 0)] {
            h.add_edge(a, b).unwrap();
        }
        let (j, path) = even_path_between_copartners(&h).unwrap().unwrap();
        assert_eq!(j, 0);
        assert_eq!(path, vec![0, 2, 1]);
        assert!(is_even_copartner_path(&h, &path));
    }

    #[test]
    fn parallel_matchings_have_none() {
        // x_i ~ x_{i+1}, y_i ~ y_{i+1} cyclically with r = 4.
        let r = 4;
        let mut h = MultipartiteGraph::new(&vec![2; r]);
        for i in 0..r {
            let j = (i + 1) % r;
            h.add_edge(2 * i, 2 * j).unwrap();
            h.add_edge(2 * i + 1, 2 * j + 1).unwrap();
        }
        assert_eq!(even_path_between_copartners(&h).unwrap(), None);
    }

    #[test]
    fn single_class_and_bad_sizes() {
        let h = MultipartiteGraph::new(&[2]);
        assert_eq!(even_path_between_copartners(&h).unwrap(), None);
        assert!(even_path_between_copartners(&MultipartiteGraph::new(&[2, 3])).is_err());
    }
}
