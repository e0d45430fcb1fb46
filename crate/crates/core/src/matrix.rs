//! Dense matrices over F_p with exact Gaussian elimination.
//!
//! Pivoting always takes the first nonzero entry in column order, so echelon
//! forms and kernel bases are reproducible run to run.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeField;

#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let p = field.modulus();
        let entries = entries.into_iter().map(|e| e % p).collect();
        Ok(FpMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1 % field.modulus();
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.cols + j] = v % self.field.modulus();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.field.modulus() as u64;
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (j, &v) in acc.iter().enumerate() {
                out.entries[i * other.cols + j] = v as u32;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u32, |acc, (&a, &b)| f.mul_add(acc, a, b))
            })
            .collect())
    }

    pub fn pow(&self, mut e: u64) -> Result<FpMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = Self::identity(self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// In-place elimination. With `reduced` the result is the RREF,
    /// otherwise a row echelon form with unit pivots.
    fn eliminate(&mut self, reduced: bool) -> Vec<usize> {
        let f = self.field;
        let p = f.modulus() as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.entries[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in c..cols {
                    self.entries.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.entries[r * cols + c]);
            for j in c..cols {
                let e = &mut self.entries[r * cols + j];
                *e = f.mul(*e, inv);
            }
            let (head, tail) = self.entries.split_at_mut(r * cols);
            let (pivot_row, below) = tail.split_at_mut(cols);
            let targets = below
                .chunks_mut(cols)
                .chain(if reduced { head.chunks_mut(cols) } else { head[..0].chunks_mut(cols) });
            for row in targets {
                let factor = row[c] as u64;
                if factor == 0 {
                    continue;
                }
                let neg = p - factor;
                for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    if y != 0 {
                        *x = ((*x as u64 + neg * y as u64) % p) as u32;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        // zero rows never contribute; drop them before eliminating
        let nonzero: Vec<usize> = (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|&e| e != 0))
            .collect();
        if nonzero.is_empty() {
            return 0;
        }
        let mut entries = Vec::with_capacity(nonzero.len() * self.cols);
        for &i in &nonzero {
            entries.extend_from_slice(self.row(i));
        }
        let mut m = FpMatrix {
            field: self.field,
            rows: nonzero.len(),
            cols: self.cols,
            entries,
        };
        if m.rows > m.cols {
            m = m.transpose();
        }
        m.eliminate(false).len()
    }

    /// Basis of the right null space, one vector per free column (ascending),
    /// each with a 1 in its own free column and 0 in the others.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        self.kernel().0
    }

    /// Kernel basis together with the free column of each vector.
    pub fn kernel(&self) -> (Vec<Vec<u32>>, Vec<usize>) {
        let ech = self.rref();
        let f = self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let basis: Vec<Vec<u32>> = free
            .iter()
            .map(|&j| {
                let mut v = vec![0u32; self.cols];
                v[j] = 1 % f.modulus();
                for (i, &c) in ech.pivots.iter().enumerate() {
                    v[c] = f.neg(ech.matrix.get(i, j));
                }
                v
            })
            .collect();
        assert_eq!(
            ech.pivots.len() + basis.len(),
            self.cols,
            "rank-nullity violated"
        );
        (basis, free)
    }

    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn cokernel_dim(&self) -> usize {
        self.transpose().kernel_basis().len()
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Rank of `M^g` for a `g x g` matrix: the eventual rank of the iterates.
    pub fn stable_rank(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.pow(self.rows as u64)?.rank())
    }
}

/// Row space built one vector at a time, for spans given by long lists of
/// generators where only the rank matters.
#[derive(Debug, Clone)]
pub struct RowReducer {
    field: PrimeField,
    cols: usize,
    // (pivot column, row with a unit at the pivot)
    rows: Vec<(usize, Vec<u32>)>,
}

impl RowReducer {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        RowReducer {
            field,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        let p = f.modulus() as u64;
        // Unreduced accumulation: each step adds less than p^2 <= 2^32, and
        // there are at most `cols` steps.
        let lazy = p < (1 << 16) && (self.cols as u64) < (1 << 30);
        let mut acc: Vec<u64> = v.into_iter().map(u64::from).collect();
        for (pc, row) in &self.rows {
            let factor = acc[*pc] % p;
            if factor == 0 {
                acc[*pc] = 0;
                continue;
            }
            let neg = p - factor;
            if lazy {
                for (x, &y) in acc.iter_mut().zip(row) {
                    *x += neg * y as u64;
                }
            } else {
                for (x, &y) in acc.iter_mut().zip(row) {
                    *x = (*x % p + neg * y as u64) % p;
                }
            }
        }
        let mut v: Vec<u32> = acc.into_iter().map(|x| (x % p) as u32).collect();
        let Some(pc) = v.iter().position(|&e| e != 0) else {
            return false;
        };
        let inv = f.inv(v[pc]);
        v.iter_mut().for_each(|e| *e = f.mul(*e, inv));
        self.rows.push((pc, v));
        true
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix(p={}, {:?})", self.field.modulus(), self.to_rows())
    }
}
