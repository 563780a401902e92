use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Rank of a rational matrix by fraction-free (Bareiss) elimination.
///
/// Rows are first scaled to integers; every intermediate entry is then a minor
/// of that integer matrix, so all divisions are exact.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for c in col + 1..cols {
                let v = &pivot * &row[c] - &factor * &pivot_row[c];
                debug_assert!((&v % &prev).is_zero());
                row[c] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    /// Plain Gaussian elimination over the rationals.
    fn naive_rank(rows: &[Vec<Rational>]) -> usize {
        let mut m = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && !m[r][col].is_zero() {
                    let f = &m[r][col] / &m[rank][col];
                    for c in 0..cols {
                        let sub = &f * &m[rank][c];
                        m[r][c] -= sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_cases() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![int(1), int(2)], vec![int(2), int(4)]]), 1);
        assert_eq!(rank(&[vec![rat(1, 2), int(0)], vec![int(0), rat(1, 3)], vec![int(1), int(1)]]), 2);
        assert_eq!(rank(&[vec![int(0), int(0), int(1)], vec![int(0), int(1), int(0)]]), 2);
    }

    proptest! {
        #[test]
        fn matches_gaussian_elimination(
            entries in proptest::collection::vec((-3i64..4, 1i64..4), 1..36),
            cols in 1usize..7,
        ) {
            let rows: Vec<Vec<Rational>> = entries
                .chunks(cols)
                .filter(|c| c.len() == cols)
                .map(|c| c.iter().map(|&(n, d)| if n % 2 == 0 { int(0) } else { rat(n, d) }).collect())
                .collect();
            prop_assert_eq!(rank(&rows), naive_rank(&rows));
        }
    }
}
