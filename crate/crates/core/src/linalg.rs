//! Exact rank over the rationals by fraction-free Gaussian elimination.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::tensor::Entry;

/// Rank of the matrix whose rows are given. Rows may have different
/// lengths; missing trailing entries count as zero.
pub fn rank<E: Entry>(rows: &[Vec<E>]) -> usize {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut row: Vec<BigInt> = r.iter().cloned().map(Into::into).collect();
            row.resize(width, BigInt::zero());
            row
        })
        .collect();
    bareiss_rank(&mut m, width)
}

fn bareiss_rank(m: &mut [Vec<BigInt>], width: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..width {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            for c in col + 1..width {
                // exact by Sylvester's identity
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Whether two row sets span the same space.
pub fn same_row_space<E: Entry>(a: &[Vec<E>], b: &[Vec<E>]) -> bool {
    let ra = rank(a);
    if ra != rank(b) {
        return false;
    }
    let joint: Vec<Vec<E>> = a.iter().chain(b).cloned().collect();
    rank(&joint) == ra
}
