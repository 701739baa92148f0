//! Exact rational dense linear algebra.
//!
//! Every rank decision in this crate is made here, over arbitrary-precision
//! rationals, so controllability verdicts never depend on a floating-point
//! tolerance. Rank uses fraction-free (Bareiss) elimination with full
//! pivoting on a denominator-cleared integer copy of the matrix.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Exact rational scalar: arbitrary-precision numerator and positive
/// denominator, always in lowest terms.
pub type Rat = BigRational;

/// Shorthand for a rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Shorthand for a rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a rational literal: an integer (`-3`), a fraction (`7/2`), or a
/// finite decimal (`0.25`), each converted exactly.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty number".into()));
    }
    let bad = |s: &str| Error::InvalidArgument(format!("cannot parse `{s}` as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad(s))?;
        let d: BigInt = den.trim().parse().map_err(|_| bad(s))?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in `{s}`")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') {
            -1
        } else {
            1
        };
        let int_digits = if int_part.is_empty() { "0" } else { int_part };
        let i: BigInt = int_digits.parse().map_err(|_| bad(s))?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(s));
        }
        let f: BigInt = frac_part.parse().map_err(|_| bad(s))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let numer = i.magnitude().clone() * scale.magnitude() + f.magnitude();
        return Ok(Rat::new(BigInt::from(sign) * BigInt::from(numer), scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad(s))?;
    Ok(Rat::from(n))
}

/// Dense matrix over exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    /// All-zero matrix. Zero-sized matrices are allowed; they show up as
    /// empty blocks of a decomposition.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
        .expect("literal rows have equal length")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Exact matrix product; panics if the inner dimensions differ.
    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "product of {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sum shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "difference shape");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, k: &Rat) -> RatMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= k;
        }
        out
    }

    /// Exact integer power of a square matrix.
    pub fn pow(&self, e: u32) -> RatMatrix {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Kronecker product: entry `((i*b.rows + k), (j*b.cols + l))` equals
    /// `a[i,j] * b[k,l]`.
    pub fn kron(&self, b: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows * b.rows, self.cols * b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        out[(i * b.rows + k, j * b.cols + l)] = a * &b[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, rhs.rows, "hstack row count");
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        out
    }

    /// New matrix consisting of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (ri, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out[(ri, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// New matrix consisting of the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (cj, &j) in cols.iter().enumerate() {
                out[(i, cj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Contiguous block `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> RatMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        out
    }

    /// Indices of rows that are exactly zero.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| self.row(i).iter().all(Rat::is_zero))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    /// Exact rank by fraction-free (Bareiss) elimination with full pivoting.
    ///
    /// Each row is first scaled by the least common multiple of its
    /// denominators, which leaves the rank unchanged and keeps every
    /// intermediate value an integer minor of the scaled matrix.
    pub fn rank(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let lcm = self
                    .row(i)
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                self.row(i)
                    .iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut r = 0;
        while r < rows.min(cols) {
            // Full pivot: the largest-magnitude entry of the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in r..rows {
                for j in r..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if m[i][j].magnitude() <= m[pi][pj].magnitude() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            m.swap(r, pi);
            if pj != r {
                for row in m.iter_mut() {
                    row.swap(r, pj);
                }
            }
            for i in r + 1..rows {
                for j in r + 1..cols {
                    let num = &m[i][j] * &m[r][r] - &m[i][r] * &m[r][j];
                    debug_assert!((&num % &prev).is_zero());
                    m[i][j] = num / &prev;
                }
                m[i][r] = BigInt::zero();
            }
            prev = m[r][r].clone();
            r += 1;
        }
        r
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a[(i, col)].is_zero());
            let Some(p) = pivot else {
                return Err(Error::InvalidArgument("matrix is singular".into()));
            };
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let d = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= &d;
                inv[(col, j)] /= &d;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(i, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Indices of the first `rank` linearly independent columns, scanned
    /// left to right.
    pub fn independent_columns(&self) -> Vec<usize> {
        let mut basis = RatBasis::new(self.rows);
        let mut picked = Vec::new();
        for j in 0..self.cols {
            if basis.try_insert(self.col(j)) {
                picked.push(j);
                if basis.len() == self.rows {
                    break;
                }
            }
        }
        picked
    }

    /// Rendering helper for reports: entries as exact decimal-free strings.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Rat::to_string).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rat::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Incrementally maintained reduced basis of rational vectors, used to pick
/// independent columns/rows without recomputing ranks from scratch.
#[derive(Clone)]
pub(crate) struct RatBasis {
    dim: usize,
    // Rows in reduced echelon form: pivot entry 1, zero at all other pivots.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl RatBasis {
    pub fn new(dim: usize) -> Self {
        RatBasis { dim, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v` if it is independent of the current basis; returns whether
    /// it was inserted.
    pub fn try_insert(&mut self, mut v: Vec<Rat>) -> bool {
        assert_eq!(v.len(), self.dim);
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &f * r;
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let d = v[pivot].clone();
        for x in v.iter_mut() {
            *x /= &d;
        }
        for (p, row) in self.rows.iter_mut() {
            if !row[pivot].is_zero() {
                let f = row[pivot].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    *x -= &f * r;
                }
                debug_assert!(row[*p].is_one());
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Enumerates, in lexicographic order, row-index subsets of `m` of the given
/// size whose rows are linearly independent (rank = size). Stops after `cap`
/// subsets; the flag reports whether the enumeration was truncated.
pub fn independent_row_subsets(
    m: &RatMatrix,
    size: usize,
    cap: usize,
) -> (Vec<Vec<usize>>, bool) {
    let mut out = Vec::new();
    let mut truncated = false;
    if size == 0 {
        return (vec![Vec::new()], false);
    }
    fn recurse(
        m: &RatMatrix,
        size: usize,
        cap: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        basis: &RatBasis,
        out: &mut Vec<Vec<usize>>,
        truncated: &mut bool,
    ) {
        if chosen.len() == size {
            if out.len() == cap {
                *truncated = true;
            } else {
                out.push(chosen.clone());
            }
            return;
        }
        let needed = size - chosen.len();
        for i in start..m.nrows() {
            if m.nrows() - i < needed || *truncated {
                return;
            }
            let mut next = basis.clone();
            if !next.try_insert(m.row(i).to_vec()) {
                continue;
            }
            chosen.push(i);
            recurse(m, size, cap, i + 1, chosen, &next, out, truncated);
            chosen.pop();
        }
    }
    let basis = RatBasis::new(m.ncols());
    recurse(m, size, cap, 0, &mut Vec::new(), &basis, &mut out, &mut truncated);
    (out, truncated)
}

/// Block zero-pattern over a 3x3 partition of the row and column index
/// ranges. A matrix conforms when every entry inside a declared zero block
/// is exactly zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroPattern {
    row_groups: [Range<usize>; 3],
    col_groups: [Range<usize>; 3],
    zero_blocks: BTreeSet<(usize, usize)>,
}

impl ZeroPattern {
    /// Pattern with explicit group sizes (groups tile `0..sum` in order).
    /// Empty groups are allowed.
    pub fn new(
        row_sizes: [usize; 3],
        col_sizes: [usize; 3],
        zero_blocks: &[(usize, usize)],
    ) -> Result<Self> {
        if zero_blocks.iter().any(|&(r, c)| r > 2 || c > 2) {
            return Err(Error::InvalidArgument("block index out of range".into()));
        }
        Ok(ZeroPattern {
            row_groups: ranges(row_sizes),
            col_groups: ranges(col_sizes),
            zero_blocks: zero_blocks.iter().copied().collect(),
        })
    }

    /// The square three-block form with zero blocks at (0,1) and (2,1):
    ///
    /// ```text
    /// [ *  0  * ]
    /// [ *  *  * ]
    /// [ *  0  * ]
    /// ```
    ///
    /// Diagonal blocks are square by construction. This class is closed
    /// under sums, products, scalar multiples, and powers.
    pub fn block_form(diag_sizes: [usize; 3]) -> Self {
        Self::new(diag_sizes, diag_sizes, &[(0, 1), (2, 1)]).expect("fixed block ids")
    }

    pub fn nrows(&self) -> usize {
        self.row_groups[2].end
    }

    pub fn ncols(&self) -> usize {
        self.col_groups[2].end
    }
}

fn ranges(sizes: [usize; 3]) -> [Range<usize>; 3] {
    let a = 0..sizes[0];
    let b = a.end..a.end + sizes[1];
    let c = b.end..b.end + sizes[2];
    [a, b, c]
}

/// True iff every entry of `m` inside a declared zero block of `p` is
/// exactly zero. The pattern must tile `m` exactly.
pub fn conforms_to_pattern(m: &RatMatrix, p: &ZeroPattern) -> Result<bool> {
    if m.nrows() != p.nrows() || m.ncols() != p.ncols() {
        return Err(Error::Dimension(format!(
            "pattern is {}x{}, matrix is {}x{}",
            p.nrows(),
            p.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    for &(rb, cb) in &p.zero_blocks {
        for i in p.row_groups[rb].clone() {
            for j in p.col_groups[cb].clone() {
                if !m[(i, j)].is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
