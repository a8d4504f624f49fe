//! Shared test support: an exact rational-arithmetic oracle for rank
//! decisions on integer inputs, plus deterministic integer-matrix draws.
//!
//! Every expected rank or dimension frozen into the suites was computed by
//! this oracle; the tests re-run it live so the numbers stay checkable.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense rational matrix, row-major.
#[derive(Clone)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

#[allow(dead_code)]
impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        QMatrix {
            rows,
            cols,
            data: entries
                .iter()
                .map(|e| BigRational::from_integer(BigInt::from(*e)))
                .collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut out = QMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &QMatrix) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigRational::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &QMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = QMatrix::zero(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    /// Rank by fraction-free-ish Gaussian elimination (exact rationals).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            // find pivot
            let mut pivot = None;
            for r in row..m.rows {
                if !m.get(r, col).is_zero() {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            // swap rows
            if p != row {
                for c in 0..m.cols {
                    let a = m.get(row, c).clone();
                    let b = m.get(p, c).clone();
                    m.set(row, c, b);
                    m.set(p, c, a);
                }
            }
            let inv = m.get(row, col).clone();
            for r in (row + 1)..m.rows {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col) / &inv;
                for c in col..m.cols {
                    let v = m.get(r, c) - &factor * m.get(row, c);
                    m.set(r, c, v);
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Is A·x = b solvable? rank(A) == rank([A | b]).
    pub fn consistent(&self, rhs: &QMatrix) -> bool {
        self.rank() == self.hstack(rhs).rank()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| {
            let q = self.get(r, c);
            let num = q.numer().to_string().parse::<f64>().unwrap();
            let den = q.denom().to_string().parse::<f64>().unwrap();
            num / den
        })
    }
}

/// Deterministic integer matrix with entries in [-bound, bound].
#[allow(dead_code)]
pub fn rand_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Vec<i64> {
    (0..rows * cols).map(|_| rng.gen_range(-bound..=bound)).collect()
}

#[allow(dead_code)]
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[allow(dead_code)]
pub fn int_to_f64(rows: usize, cols: usize, entries: &[i64]) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c] as f64)
}

/// The forward-difference matrix of the n-cell interval grid, as integers.
#[allow(dead_code)]
pub fn grid_difference_matrix(n: usize) -> QMatrix {
    let mut entries = vec![0i64; n * (n + 1)];
    for k in 0..n {
        entries[k * (n + 1) + k] = -1;
        entries[k * (n + 1) + k + 1] = 1;
    }
    QMatrix::from_i64(n, n + 1, &entries)
}

/// Columns of the identity with the listed indices, as an integer span.
#[allow(dead_code)]
pub fn coordinate_span(ambient: usize, kept: &[usize]) -> QMatrix {
    let mut out = QMatrix::zero(ambient, kept.len());
    for (j, &k) in kept.iter().enumerate() {
        out.set(k, j, BigRational::from_integer(BigInt::from(1)));
    }
    out
}
