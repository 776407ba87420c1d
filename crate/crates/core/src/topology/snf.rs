use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::TopologyError;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `U A V = D` with unimodular `U`, `V` and diagonal `D`
/// whose non-zero entries satisfy `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diag: Vec<i128>,
    pub rank: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Integer ring abstraction so the reduction runs checked on i128 and
/// falls back to arbitrary precision on overflow.
trait SnfInt: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering;
    fn checked_neg(&self) -> Option<Self>;
    fn checked_sub_mul(&self, q: &Self, x: &Self) -> Option<Self>; // self - q * x
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn div_trunc(&self, other: &Self) -> Self;
    fn divides(&self, other: &Self) -> bool;
    fn is_negative(&self) -> bool;
}

impl SnfInt for i128 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn checked_neg(&self) -> Option<Self> {
        i128::checked_neg(*self)
    }
    fn checked_sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*x)?)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        i128::checked_add(*self, *other)
    }
    fn div_trunc(&self, other: &Self) -> Self {
        self / other
    }
    fn divides(&self, other: &Self) -> bool {
        other % self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
}

impl SnfInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.abs().cmp(&other.abs())
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn checked_sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn div_trunc(&self, other: &Self) -> Self {
        self / other
    }
    fn divides(&self, other: &Self) -> bool {
        SnfInt::is_zero(&(other % self))
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

struct Work<T> {
    r: usize,
    c: usize,
    b: Vec<T>,
    u: Vec<T>, // r x r
    v: Vec<T>, // c x c
}

impl<T: SnfInt + OneHelper> Work<T> {
    fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        let mut u = vec![T::zero(); rows * rows];
        let mut v = vec![T::zero(); cols * cols];
        for i in 0..rows {
            u[i * rows + i] = T::one();
        }
        for j in 0..cols {
            v[j * cols + j] = T::one();
        }
        Self { r: rows, c: cols, b: data, u, v }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.c {
            self.b.swap(a * self.c + j, b * self.c + j);
        }
        for j in 0..self.r {
            self.u.swap(a * self.r + j, b * self.r + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.r {
            self.b.swap(i * self.c + a, i * self.c + b);
        }
        for i in 0..self.c {
            self.v.swap(i * self.c + a, i * self.c + b);
        }
    }

    /// row_i -= q * row_t (both in B and U).
    fn row_op(&mut self, i: usize, t: usize, q: &T) -> Option<()> {
        for j in 0..self.c {
            let x = self.b[t * self.c + j].clone();
            self.b[i * self.c + j] = self.b[i * self.c + j].checked_sub_mul(q, &x)?;
        }
        for j in 0..self.r {
            let x = self.u[t * self.r + j].clone();
            self.u[i * self.r + j] = self.u[i * self.r + j].checked_sub_mul(q, &x)?;
        }
        Some(())
    }

    /// col_j -= q * col_t (both in B and V).
    fn col_op(&mut self, j: usize, t: usize, q: &T) -> Option<()> {
        for i in 0..self.r {
            let x = self.b[i * self.c + t].clone();
            self.b[i * self.c + j] = self.b[i * self.c + j].checked_sub_mul(q, &x)?;
        }
        for i in 0..self.c {
            let x = self.v[i * self.c + t].clone();
            self.v[i * self.c + j] = self.v[i * self.c + j].checked_sub_mul(q, &x)?;
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.c {
            self.b[i * self.c + j] = self.b[i * self.c + j].checked_neg()?;
        }
        for j in 0..self.r {
            self.u[i * self.r + j] = self.u[i * self.r + j].checked_neg()?;
        }
        Some(())
    }

    /// row_t += row_i.
    fn add_row(&mut self, t: usize, i: usize) -> Option<()> {
        for j in 0..self.c {
            self.b[t * self.c + j] =
                self.b[t * self.c + j].checked_add(&self.b[i * self.c + j].clone())?;
        }
        for j in 0..self.r {
            self.u[t * self.r + j] =
                self.u[t * self.r + j].checked_add(&self.u[i * self.r + j].clone())?;
        }
        Some(())
    }
}

trait OneHelper {
    fn one() -> Self;
}
impl OneHelper for i128 {
    fn one() -> Self {
        1
    }
}
impl OneHelper for BigInt {
    fn one() -> Self {
        BigInt::from(1)
    }
}

fn snf_generic<T: SnfInt + OneHelper>(rows: usize, cols: usize, data: Vec<T>) -> Option<Work<T>> {
    let mut w = Work::new(rows, cols, data);
    let steps = rows.min(cols);
    for t in 0..steps {
        'outer: loop {
            // Move the minimal non-zero entry of the trailing block to (t, t).
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let e = &w.b[i * cols + j];
                    if e.is_zero() {
                        continue;
                    }
                    match &pivot {
                        None => pivot = Some((i, j)),
                        Some((pi, pj)) => {
                            if e.abs_cmp(&w.b[pi * cols + pj]) == std::cmp::Ordering::Less {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return Some(w); // trailing block is zero; done
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if w.b[i * cols + t].is_zero() {
                    continue;
                }
                let q = w.b[i * cols + t].div_trunc(&w.b[t * cols + t]);
                if !q.is_zero() {
                    w.row_op(i, t, &q)?;
                }
                if !w.b[i * cols + t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.b[t * cols + j].is_zero() {
                    continue;
                }
                let q = w.b[t * cols + j].div_trunc(&w.b[t * cols + t]);
                if !q.is_zero() {
                    w.col_op(j, t, &q)?;
                }
                if !w.b[t * cols + j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'outer;
            }
            // Enforce the divisibility chain: fold a non-divisible trailing
            // entry into the pivot row and restart.
            let pivot_val = w.b[t * cols + t].clone();
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.b[i * cols + j].is_zero() && !pivot_val.divides(&w.b[i * cols + j]) {
                        w.add_row(t, i)?;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        if w.b[t * cols + t].is_negative() {
            w.negate_row(t)?;
        }
    }
    Some(w)
}

/// Compute the Smith normal form. Runs in checked i128 arithmetic and falls
/// back to BigInt on intermediate overflow; `OverflowGuard` only if a final
/// invariant factor itself exceeds i128.
pub fn smith_normal_form(a: &IntMatrix) -> Result<Snf, TopologyError> {
    let (rows, cols) = (a.rows, a.cols);
    let finish = |b: Vec<i128>, u: Vec<i128>, v: Vec<i128>| {
        let mut diag = Vec::new();
        for t in 0..rows.min(cols) {
            let d = b[t * cols + t];
            if d != 0 {
                diag.push(d);
            }
        }
        let rank = diag.len();
        Snf {
            diag,
            rank,
            u: IntMatrix { rows, cols: rows, data: u },
            v: IntMatrix { rows: cols, cols, data: v },
        }
    };
    if let Some(w) = snf_generic::<i128>(rows, cols, a.data.clone()) {
        return Ok(finish(w.b, w.u, w.v));
    }
    let big: Vec<BigInt> = a.data.iter().map(|&x| BigInt::from(x)).collect();
    let w = snf_generic::<BigInt>(rows, cols, big).expect("BigInt ops cannot overflow");
    let back = |v: Vec<BigInt>| -> Result<Vec<i128>, TopologyError> {
        v.into_iter()
            .map(|x| i128::try_from(x).map_err(|_| TopologyError::OverflowGuard))
            .collect()
    };
    Ok(finish(back(w.b)?, back(w.u)?, back(w.v)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn check_snf(a: &IntMatrix) {
        let snf = smith_normal_form(a).unwrap();
        // U A V = D
        let d = snf.u.mul(a).mul(&snf.v);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let expect = if i == j && i < snf.rank { snf.diag[i] } else { 0 };
                assert_eq!(d[(i, j)], expect, "at ({i},{j})");
            }
        }
        // divisibility chain, positive factors
        for w in snf.diag.windows(2) {
            assert!(w[0] > 0 && w[1] % w[0] == 0, "chain {:?}", snf.diag);
        }
    }

    #[test]
    fn known_small_matrix() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&a).unwrap();
        assert_eq!(snf.diag, vec![2, 2, 156]);
        check_snf(&a);
    }

    #[test]
    fn zero_and_empty_matrices() {
        check_snf(&IntMatrix::zeros(3, 2));
        let snf = smith_normal_form(&IntMatrix::zeros(0, 4)).unwrap();
        assert_eq!(snf.rank, 0);
    }

    #[test]
    fn random_matrices_divisibility_and_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let r = rng.gen_range(1..=6);
            let c = rng.gen_range(1..=6);
            let rows: Vec<Vec<i128>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            check_snf(&IntMatrix::from_rows(&rows));
        }
    }

    #[test]
    fn bigint_fallback_on_overflow_prone_entries() {
        // Large entries whose reduction overflows i128 intermediates.
        let big = i128::MAX / 3;
        let a = IntMatrix::from_rows(&[vec![big, big - 1], vec![big - 2, big - 5]]);
        let snf = smith_normal_form(&a).unwrap();
        assert!(snf.rank >= 1);
        for w in snf.diag.windows(2) {
            assert!(w[1] % w[0] == 0);
        }
    }
}
