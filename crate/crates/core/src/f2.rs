//! Dense and sparse linear algebra over F₂.
//!
//! Coefficient maps and change-of-basis matrices are small (tens of rows), so
//! they live in [`BitMatrix`], a row-major matrix of packed `u64` words.
//! Box-complex boundaries can reach a few thousand generators but are very
//! sparse; [`sparse_rank`] eliminates those without densifying.

use std::collections::HashMap;
use std::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over F₂ of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn and_parity(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// Indices of the nonzero entries, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + b)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "[{s}]")
    }
}

/// A dense `rows × cols` matrix over F₂. Entry `(r, c)` is the coefficient of
/// basis vector `r` in the image of basis vector `c`, so `M · e_c` is column `c`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(BitVec::count_ones).sum()
    }

    /// Nonzero entries as `(row, col)` pairs in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.ones().map(move |c| (r, c)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, c) in self.entries() {
            t.set(c, r, true);
        }
        t
    }

    /// `self · v`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch in apply");
        let mut out = BitVec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.and_parity(v) {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix product `self · rhs`, i.e. apply `rhs` first.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for (r, row) in self.data.iter().enumerate() {
            let acc = &mut out.data[r];
            for k in row.ones() {
                acc.xor_assign(&rhs.data[k]);
            }
        }
        out
    }

    pub fn add(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn add_assign(&mut self, rhs: &BitMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            a.xor_assign(b);
        }
    }

    pub fn rank(&self) -> usize {
        rank_of_rows(self.data.clone())
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = BitMatrix::identity(n).data;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r].get(col))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r].get(col) {
                    let (src_a, src_i) = (a[col].clone(), inv[col].clone());
                    a[r].xor_assign(&src_a);
                    inv[r].xor_assign(&src_i);
                }
            }
        }
        Some(BitMatrix::from_rows(inv, n))
    }

    /// Restriction to the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

fn rank_of_rows(mut rows: Vec<BitVec>) -> usize {
    let mut rank = 0;
    let ncols = rows.first().map_or(0, BitVec::len);
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in rank + 1..rows.len() {
            if rows[r].get(col) {
                rows[r].xor_assign(&pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// Incremental row-echelon basis, used for span-membership queries.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    pivots: Vec<(usize, BitVec)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a>(vs: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut b = Self::new();
        for v in vs {
            b.insert(v.clone());
        }
        b
    }

    /// Reduce `v` against the basis; returns the remainder.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        for (p, row) in &self.pivots {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v`; returns `false` if it was already in the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let v = self.reduce(v);
        match v.first_one() {
            None => false,
            Some(p) => {
                for (_, row) in self.pivots.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&v);
                    }
                }
                self.pivots.push((p, v));
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// The reduced basis vectors.
    pub fn vectors(&self) -> Vec<BitVec> {
        self.pivots.iter().map(|(_, v)| v.clone()).collect()
    }
}

/// Solves `Σ λ_i cols[i] = rhs`. Returns one solution together with a basis
/// of the solution space of the homogeneous system, or `None` if there is
/// no solution.
pub fn solve(cols: &[BitVec], rhs: &BitVec) -> Option<(BitVec, Vec<BitVec>)> {
    let m = cols.len();
    let rows = rhs.len();
    let mut mat: Vec<(BitVec, bool)> = (0..rows)
        .map(|r| {
            let coeffs = BitVec::from_indices(m, (0..m).filter(|&i| cols[i].get(r)));
            (coeffs, rhs.get(r))
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..rows).find(|&r| mat[r].0.get(col)) else {
            continue;
        };
        mat.swap(rank, p);
        let pivot = mat[rank].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != rank && row.0.get(col) {
                row.0.xor_assign(&pivot.0);
                row.1 ^= pivot.1;
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if mat[rank..].iter().any(|(_, b)| *b) {
        return None;
    }
    let mut x = BitVec::zeros(m);
    for (r, &c) in pivot_cols.iter().enumerate() {
        if mat[r].1 {
            x.set(c, true);
        }
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; m];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let kernel = (0..m)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut k = BitVec::unit(m, free);
            for (r, &c) in pivot_cols.iter().enumerate() {
                if mat[r].0.get(free) {
                    k.set(c, true);
                }
            }
            k
        })
        .collect();
    Some((x, kernel))
}

/// Basis of the kernel of `m` (vectors `v` with `m · v = 0`).
pub fn kernel(m: &BitMatrix) -> Vec<BitVec> {
    let cols: Vec<BitVec> = (0..m.cols()).map(|c| m.column(c)).collect();
    solve(&cols, &BitVec::zeros(m.rows())).map_or_else(Vec::new, |(_, k)| k)
}

/// Rank over F₂ of a sparse matrix given as rows of column indices.
///
/// Each row must list distinct columns. Elimination pivots on the smallest
/// column of each row and keeps rows sorted, so fill-in stays local for the
/// banded boundaries produced by box tensor products.
pub fn sparse_rank(rows: impl IntoIterator<Item = Vec<usize>>) -> usize {
    let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
    for mut row in rows {
        row.sort_unstable();
        while let Some(&lead) = row.first() {
            match pivots.get(&lead) {
                Some(p) => row = sym_diff_sorted(&row, p),
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn sym_diff_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
