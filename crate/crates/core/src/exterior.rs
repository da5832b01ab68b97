//! Exterior powers of subspaces of `ℚⁿ` in Plücker coordinates.

use crate::linalg::{det_field, Matrix};
use crate::{Rat, RatMatrix};

/// All `r`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        go(0, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

/// Subsets of the given sorted index list (not just `0..n`).
pub(crate) fn subsets_of(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    subsets(items.len(), r).into_iter().map(|s| s.into_iter().map(|i| items[i]).collect()).collect()
}

pub(crate) fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Coordinates of `v_1 ∧ … ∧ v_r` in the basis `{e_S}` of `∧^r ℚⁿ`,
/// `S` running over `subsets(n, r)`.
pub(crate) fn wedge(vectors: &[Vec<Rat>], n: usize) -> Vec<Rat> {
    let r = vectors.len();
    subsets(n, r)
        .iter()
        .map(|cols| {
            let m =
                RatMatrix::new(r, r, vectors.iter().flat_map(|v| cols.iter().map(move |&c| v[c].clone())).collect());
            det_field(&m)
        })
        .collect()
}

/// Columns are the wedges `b_S` over `S ∈ subsets(d, r)` of the given basis
/// `b_0..b_{d-1}` of a subspace; they form a basis of its `r`-th exterior
/// power inside `∧^r ℚⁿ`.
pub(crate) fn wedge_basis(basis: &[Vec<Rat>], n: usize, r: usize) -> RatMatrix {
    let cols: Vec<Vec<Rat>> = subsets(basis.len(), r)
        .iter()
        .map(|s| {
            let vs: Vec<Vec<Rat>> = s.iter().map(|&i| basis[i].clone()).collect();
            wedge(&vs, n)
        })
        .collect();
    Matrix::from_cols(binomial(n, r), &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn q(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_integer(x.into())).collect()
    }

    #[test]
    fn subset_order_and_counts() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
        assert_eq!(subsets_of(&[1, 4, 5], 2), vec![vec![1, 4], vec![1, 5], vec![4, 5]]);
        for n in 0..7 {
            for r in 0..=n + 1 {
                assert_eq!(subsets(n, r).len(), binomial(n, r));
            }
        }
    }

    #[test]
    fn wedge_is_alternating() {
        let a = q(&[1, 2, 0]);
        let b = q(&[0, 1, 3]);
        let ab = wedge(&[a.clone(), b.clone()], 3);
        let ba = wedge(&[b, a.clone()], 3);
        assert!(ab.iter().zip(&ba).all(|(x, y)| x == &-y.clone()));
        assert!(wedge(&[a.clone(), a], 3).iter().all(Zero::is_zero));
        assert_eq!(ab, q(&[1, 3, 6]));
        assert_eq!(wedge(&[], 3), vec![Rat::one()]);
    }
}
