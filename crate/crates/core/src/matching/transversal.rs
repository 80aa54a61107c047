use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::MatchingError;

/// An s × r table (s ≤ r) with some cells coloured; cells are (row, col).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    pub s: usize,
    pub r: usize,
    pub colored: BTreeSet<(usize, usize)>,
}

impl Rectangle {
    pub fn new(s: usize, r: usize, colored: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, MatchingError> {
        if s > r {
            return Err(MatchingError::Malformed(format!("rectangle has {s} rows but only {r} columns")));
        }
        let colored: BTreeSet<(usize, usize)> = colored.into_iter().collect();
        if let Some(&(a, b)) = colored.iter().find(|&&(a, b)| a >= s || b >= r) {
            return Err(MatchingError::Malformed(format!("cell ({a},{b}) outside {s}x{r}")));
        }
        Ok(Rectangle { s, r, colored })
    }

    /// At most r coloured cells, at most one per column, at most r − 1 per row.
    pub fn satisfies_hypotheses(&self) -> bool {
        if self.r == 0 || self.colored.len() > self.r {
            return false;
        }
        let mut per_row = vec![0; self.s];
        let mut per_col = vec![0; self.r];
        for &(a, b) in &self.colored {
            per_row[a] += 1;
            per_col[b] += 1;
        }
        per_col.iter().all(|&c| c <= 1) && per_row.iter().all(|&c| c < self.r)
    }
}

/// s uncoloured cells in distinct rows and columns (sorted by row).
pub fn is_transversal(rect: &Rectangle, cells: &[(usize, usize)]) -> bool {
    let rows: BTreeSet<usize> = cells.iter().map(|c| c.0).collect();
    let cols: BTreeSet<usize> = cells.iter().map(|c| c.1).collect();
    cells.len() == rect.s
        && rows.len() == rect.s
        && cols.len() == rect.s
        && cells.iter().all(|&(a, b)| a < rect.s && b < rect.r && !rect.colored.contains(&(a, b)))
}

/// A transversal of uncoloured cells. Under the hypotheses of
/// [`Rectangle::satisfies_hypotheses`] one always exists and is built by
/// induction on s: take an uncoloured cell in a row with the most coloured
/// cells and recurse on the rectangle without its row and column. Otherwise
/// an exhaustive search decides.
pub fn find_transversal(rect: &Rectangle) -> Option<Vec<(usize, usize)>> {
    let rows: Vec<usize> = (0..rect.s).collect();
    let cols: Vec<usize> = (0..rect.r).collect();
    let mut out = if rect.satisfies_hypotheses() {
        inductive(rect, rows, cols).or_else(|| exhaustive(rect))
    } else {
        exhaustive(rect)
    }?;
    out.sort_unstable();
    debug_assert!(is_transversal(rect, &out));
    Some(out)
}

fn inductive(rect: &Rectangle, rows: Vec<usize>, cols: Vec<usize>) -> Option<Vec<(usize, usize)>> {
    if rows.is_empty() {
        return Some(Vec::new());
    }
    if cols.len() <= 2 {
        return search(rect, &rows, &cols);
    }
    let colored_in = |row: usize| cols.iter().filter(|&&c| rect.colored.contains(&(row, c))).count();
    let &row = rows.iter().max_by_key(|&&a| (colored_in(a), std::cmp::Reverse(a)))?;
    let &col = cols.iter().find(|&&c| !rect.colored.contains(&(row, c)))?;
    let rest_rows = rows.iter().copied().filter(|&a| a != row).collect();
    let rest_cols = cols.iter().copied().filter(|&c| c != col).collect();
    let mut t = inductive(rect, rest_rows, rest_cols)?;
    t.push((row, col));
    Some(t)
}

fn exhaustive(rect: &Rectangle) -> Option<Vec<(usize, usize)>> {
    let rows: Vec<usize> = (0..rect.s).collect();
    let cols: Vec<usize> = (0..rect.r).collect();
    search(rect, &rows, &cols)
}

/// Depth-first assignment of columns to rows in order.
fn search(rect: &Rectangle, rows: &[usize], cols: &[usize]) -> Option<Vec<(usize, usize)>> {
    fn go(rect: &Rectangle, rows: &[usize], cols: &[usize], used: &mut Vec<bool>, acc: &mut Vec<(usize, usize)>) -> bool {
        let Some(&row) = rows.get(acc.len()) else { return true };
        for (i, &c) in cols.iter().enumerate() {
            if used[i] || rect.colored.contains(&(row, c)) {
                continue;
            }
            used[i] = true;
            acc.push((row, c));
            if go(rect, rows, cols, used, acc) {
                return true;
            }
            acc.pop();
            used[i] = false;
        }
        false
    }
    let mut acc = Vec::with_capacity(rows.len());
    go(rect, rows, cols, &mut vec![false; cols.len()], &mut acc).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let r = Rectangle::new(1, 1, []).unwrap();
        assert_eq!(find_transversal(&r), Some(vec![(0, 0)]));
        let r = Rectangle::new(0, 3, []).unwrap();
        assert_eq!(find_transversal(&r), Some(vec![]));
        let r = Rectangle::new(2, 3, [(1, 1), (1, 2), (0, 0)]).unwrap();
        let t = find_transversal(&r).unwrap();
        assert!(is_transversal(&r, &t));
        assert_eq!(t, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn blocked_rectangle_has_none() {
        let r = Rectangle::new(2, 2, [(0, 0), (1, 0)]).unwrap();
        assert!(!r.satisfies_hypotheses());
        assert_eq!(find_transversal(&r), None);
        let r = Rectangle::new(2, 2, [(0, 1), (1, 1), (0, 0)]).unwrap();
        assert_eq!(find_transversal(&r), None);
    }

    #[test]
    fn rejects_bad_shape() {
        assert!(Rectangle::new(3, 2, []).is_err());
        assert!(Rectangle::new(1, 2, [(0, 2)]).is_err());
    }
}
