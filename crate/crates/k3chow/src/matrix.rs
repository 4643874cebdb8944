//! Exact linear algebra over the rationals.
//!
//! Elimination is fraction-free: each row is scaled to integers, forward
//! elimination runs Bareiss-style over `BigInt` (every intermediate entry is
//! a minor of the scaled matrix, so no fraction blowup), and a rational
//! back-substitution pass produces the reduced row echelon form with unit
//! pivots. Pivoting is deterministic: the first row with a nonzero entry in
//! the current column wins, so two runs on equal inputs agree exactly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{denominator_lcm, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rat>>,
}

impl RatMat {
    pub fn new(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![vec![Rat::zero(); cols]; rows] }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMat { rows: r, cols: c, data: rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i]
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Reduced row echelon form: nonzero rows only, unit pivots, zeros above and
/// below each pivot, pivot columns strictly increasing.
#[derive(Debug, Clone)]
pub struct Rref {
    pub rows: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `v` against the rows; returns the residual. The residual is
    /// zero exactly when `v` lies in the row space.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let f = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                *o -= &f * r;
            }
        }
        out
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Rat::is_zero)
    }
}

/// Scale each row by the LCM of its denominators (and divide by the GCD of
/// the numerators) to get a primitive integer row. Row space is unchanged.
fn integer_rows(m: &RatMat) -> Vec<Vec<BigInt>> {
    m.data
        .iter()
        .map(|row| {
            let lcm = denominator_lcm(row);
            let ints: Vec<BigInt> =
                row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
            let mut gcd = BigInt::zero();
            for x in &ints {
                gcd = num_integer::gcd(gcd, x.clone());
            }
            if gcd.is_zero() || gcd.is_one() {
                ints
            } else {
                ints.into_iter().map(|x| x / &gcd).collect()
            }
        })
        .collect()
}

/// Fraction-free reduced row echelon form. See the module docs.
pub fn rref(m: &RatMat) -> Rref {
    let mut a = integer_rows(m);
    let rows = a.len();
    let cols = m.cols;
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut pr = 0usize;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        let Some(found) = (pr..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(pr, found);
        // Bareiss step on the rows below the pivot row.
        for i in pr + 1..rows {
            let head = std::mem::replace(&mut a[i][col], BigInt::zero());
            if head.is_zero() && a[pr][col].is_one() && prev.is_one() {
                continue;
            }
            for j in col + 1..cols {
                let num = &a[pr][col] * &a[i][j] - &head * &a[pr][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss exact division failed");
                a[i][j] = num / &prev;
            }
            for j in 0..col {
                a[i][j] = BigInt::zero(); // already eliminated in earlier steps
            }
        }
        prev = a[pr][col].clone();
        pivots.push(col);
        pr += 1;
    }
    // Rational back-substitution: normalize pivots to 1, clear above.
    let mut rat_rows: Vec<Vec<Rat>> = Vec::with_capacity(pivots.len());
    for (r, &p) in pivots.iter().enumerate() {
        let inv = Rat::new(BigInt::one(), a[r][p].clone());
        rat_rows.push(a[r].iter().map(|x| Rat::from_integer(x.clone()) * &inv).collect());
    }
    for r in (0..pivots.len()).rev() {
        for above in 0..r {
            let f = rat_rows[above][pivots[r]].clone();
            if f.is_zero() {
                continue;
            }
            let (head, tail) = rat_rows.split_at_mut(r);
            let pivot_row = &tail[0];
            for (x, y) in head[above].iter_mut().zip(pivot_row) {
                *x -= &f * y;
            }
        }
    }
    Rref { rows: rat_rows, pivots, cols }
}

pub fn rank(m: &RatMat) -> usize {
    rref(m).rank()
}

/// Basis of the right nullspace `{v : M v = 0}`, one vector per free column,
/// in ascending free-column order.
pub fn nullspace(m: &RatMat) -> Vec<Vec<Rat>> {
    let r = rref(m);
    let pivot_set: std::collections::BTreeSet<usize> = r.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); m.cols];
        v[free] = Rat::one();
        for (row, &p) in r.rows.iter().zip(&r.pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solve `A x = b` exactly. Returns the unique solution of the reduced
/// system with free variables set to zero, or an error when inconsistent.
pub fn solve(a: &RatMat, b: &[Rat]) -> Result<Vec<Rat>> {
    assert_eq!(b.len(), a.rows);
    let mut aug = RatMat::new(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.set(i, j, a.at(i, j).clone());
        }
        aug.set(i, a.cols, b[i].clone());
    }
    let r = rref(&aug);
    if r.pivots.contains(&a.cols) {
        return Err(Error::Unsolvable("inconsistent linear system".into()));
    }
    let mut x = vec![Rat::zero(); a.cols];
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        x[p] = row[a.cols].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn m(rows: &[&[i64]]) -> RatMat {
        RatMat::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect(),
        )
    }

    #[test]
    fn rref_of_identity_like_matrix() {
        let a = m(&[&[2, 0, 4], &[0, 3, 6]]);
        let r = rref(&a);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rows[0], vec![rat_int(1), rat_int(0), rat_int(2)]);
        assert_eq!(r.rows[1], vec![rat_int(0), rat_int(1), rat_int(2)]);
    }

    #[test]
    fn rank_detects_dependent_rows() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let a = m(&[&[1, 2, 3, 4], &[0, 1, 1, 1]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Rat::is_zero));
        }
    }

    #[test]
    fn solve_hilbert_5x5_exactly() {
        // Hilbert matrix H[i][j] = 1/(i+j+1); rhs = H * (1,...,1).
        let n = 5;
        let mut h = RatMat::new(n, n);
        for i in 0..n {
            for j in 0..n {
                h.set(i, j, rat(1, (i + j + 1) as i64));
            }
        }
        let ones = vec![rat_int(1); n];
        let b = h.mul_vec(&ones);
        let x = solve(&h, &b).unwrap();
        assert_eq!(x, ones);
    }

    #[test]
    fn solve_reports_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        let b = vec![rat_int(1), rat_int(3)];
        assert!(matches!(solve(&a, &b), Err(Error::Unsolvable(_))));
    }

    #[test]
    fn containment_oracle_on_row_space() {
        let a = m(&[&[1, 0, 2], &[0, 1, 1]]);
        let r = rref(&a);
        assert!(r.contains(&[rat_int(2), rat_int(3), rat_int(7)]));
        assert!(!r.contains(&[rat_int(0), rat_int(0), rat_int(1)]));
    }

    #[test]
    fn rref_is_idempotent_on_its_own_rows() {
        let a = m(&[&[3, 1, 4, 1], &[5, 9, 2, 6], &[5, 3, 5, 8], &[9, 7, 9, 3]]);
        let r = rref(&a);
        let again = rref(&RatMat::from_rows(r.rows.clone()));
        assert_eq!(r.rows, again.rows);
        assert_eq!(r.pivots, again.pivots);
    }
}
