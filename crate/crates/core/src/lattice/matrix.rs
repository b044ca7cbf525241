//! Dense exact matrices over the rationals, plus builders for the incidence
//! matrices of a subspace lattice (containment, disjointness, identity, and
//! all-ones blocks).
//!
//! Products are computed exactly. Entries are scaled to integers first; when
//! every scaled entry fits comfortably in `i128` the multiplication runs on
//! machine words, otherwise it falls back to big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::lattice::subspace::{intersect_dim, Subspace, SubspaceLattice};

/// Dense matrix with exact rational entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::one(); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Rational>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        RationalMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Column sums, as a 1 x cols matrix.
    pub fn column_sums(&self) -> Self {
        let mut out = RationalMatrix::zeros(1, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let s = out.get(0, c) + self.get(r, c);
                out.set(0, c, s);
            }
        }
        out
    }

    /// Exact matrix product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let (a_int, a_den) = integer_scaled(&self.data);
        let (b_int, b_den) = integer_scaled(&other.data);
        let inner = self.cols;
        let den = &a_den * &b_den;

        let prod_int = match (as_i128_slice(&a_int), as_i128_slice(&b_int)) {
            (Some(a_small), Some(b_small)) if i128_product_safe(&a_small, &b_small, inner) => {
                mul_i128(&a_small, &b_small, self.rows, inner, other.cols)
            }
            _ => mul_bigint(&a_int, &b_int, self.rows, inner, other.cols),
        };

        let data = prod_int
            .into_iter()
            .map(|v| Rational::new(v, den.clone()))
            .collect();
        RationalMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }
}

/// Clears denominators: returns the entries times the lcm of all
/// denominators, together with that lcm.
fn integer_scaled(data: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for v in data {
        lcm = lcm.lcm(v.denom());
    }
    if lcm.is_one() {
        return (data.iter().map(|v| v.numer().clone()).collect(), lcm);
    }
    let scaled = data
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    (scaled, lcm)
}

fn as_i128_slice(data: &[BigInt]) -> Option<Vec<i128>> {
    data.iter().map(|v| v.to_i128()).collect()
}

/// True when `sum_j a[i][j] * b[j][k]` cannot overflow i128 for any cell.
fn i128_product_safe(a: &[i128], b: &[i128], inner: usize) -> bool {
    let bits = |xs: &[i128]| {
        xs.iter()
            .map(|v| 128 - v.unsigned_abs().leading_zeros())
            .max()
            .unwrap_or(0)
    };
    let inner_bits = usize::BITS - inner.max(1).leading_zeros();
    bits(a) + bits(b) + inner_bits <= 125
}

fn mul_i128(a: &[i128], b: &[i128], rows: usize, inner: usize, cols: usize) -> Vec<BigInt> {
    let mut acc = vec![0i128; rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            let aik = a[i * inner + k];
            if aik == 0 {
                continue;
            }
            let brow = &b[k * cols..(k + 1) * cols];
            let arow = &mut acc[i * cols..(i + 1) * cols];
            for (dst, &bkj) in arow.iter_mut().zip(brow) {
                *dst += aik * bkj;
            }
        }
    }
    acc.into_iter().map(BigInt::from).collect()
}

fn mul_bigint(a: &[BigInt], b: &[BigInt], rows: usize, inner: usize, cols: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            let aik = &a[i * inner + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..cols {
                let t = aik * &b[k * cols + j];
                acc[i * cols + j] += t;
            }
        }
    }
    acc
}

/// Which incidence relation a built matrix encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatrixKind {
    /// Containment: entry 1 when the smaller subspace lies inside the larger.
    W,
    /// Disjointness: entry 1 when the subspaces meet only in 0.
    Wbar,
    /// Identity block (requires equal row and column levels).
    I,
    /// All-ones block.
    J,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::W => "W",
            MatrixKind::Wbar => "Wbar",
            MatrixKind::I => "I",
            MatrixKind::J => "J",
        }
    }
}

/// Where the block lands inside the built matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Just the level-k x level-l block.
    Block,
    /// The full lattice ground set, block placed at the level offsets.
    Full,
    /// Ground set extended by a disjoint copy of one level, so that a level
    /// can index rows and columns independently (needed when the same level
    /// plays two roles). `row_copy`/`col_copy` select the appended copy as
    /// the row or column side; the corresponding level must equal
    /// `copy_level`.
    Duplicated {
        copy_level: i64,
        row_copy: bool,
        col_copy: bool,
    },
}

/// A built incidence matrix together with its construction data.
#[derive(Clone, Debug)]
pub struct IncidenceMatrix {
    pub kind: MatrixKind,
    pub row_level: i64,
    pub col_level: i64,
    pub scope: Scope,
    pub matrix: RationalMatrix,
}

fn entry_on(kind: MatrixKind, x: &Subspace, y: &Subspace, same_index: bool) -> Result<bool> {
    Ok(match kind {
        MatrixKind::W => {
            let m = x.dim().min(y.dim());
            intersect_dim(x, y)? == m
        }
        MatrixKind::Wbar => intersect_dim(x, y)? == 0,
        MatrixKind::I => same_index,
        MatrixKind::J => true,
    })
}

/// Builds the incidence matrix of `kind` between levels `row_level` and
/// `col_level` of the lattice, in the requested scope. Refuses to allocate
/// more than `max_entries` entries.
pub fn build(
    lat: &SubspaceLattice,
    kind: MatrixKind,
    row_level: i64,
    col_level: i64,
    scope: Scope,
    max_entries: u128,
) -> Result<IncidenceMatrix> {
    let n = lat.n() as i64;
    for (name, lvl) in [("row level", row_level), ("column level", col_level)] {
        if lvl < 0 || lvl > n {
            return Err(Error::invalid(format!(
                "{name} {lvl} outside 0..={n}"
            )));
        }
    }
    if kind == MatrixKind::I && row_level != col_level {
        return Err(Error::invalid(format!(
            "identity block needs equal levels, got {row_level} and {col_level}"
        )));
    }

    let rk = lat.level(row_level);
    let cl = lat.level(col_level);
    let (rows, cols, row_base, col_base) = match scope {
        Scope::Block => (rk.len(), cl.len(), 0usize, 0usize),
        Scope::Full => (
            lat.total(),
            lat.total(),
            lat.offset(row_level),
            lat.offset(col_level),
        ),
        Scope::Duplicated {
            copy_level,
            row_copy,
            col_copy,
        } => {
            if copy_level < 0 || copy_level > n {
                return Err(Error::invalid(format!(
                    "copy level {copy_level} outside 0..={n}"
                )));
            }
            if row_copy && row_level != copy_level {
                return Err(Error::invalid(
                    "row side uses the copy but its level differs from copy_level".to_string(),
                ));
            }
            if col_copy && col_level != copy_level {
                return Err(Error::invalid(
                    "column side uses the copy but its level differs from copy_level".to_string(),
                ));
            }
            let copy_len = lat.size(copy_level);
            let size = lat.total() + copy_len;
            let rb = if row_copy {
                lat.total()
            } else {
                lat.offset(row_level)
            };
            let cb = if col_copy {
                lat.total()
            } else {
                lat.offset(col_level)
            };
            (size, size, rb, cb)
        }
    };

    let needed = rows as u128 * cols as u128;
    if needed > max_entries {
        return Err(Error::SizeGuard {
            required: needed,
            limit: max_entries,
        });
    }

    let mut m = RationalMatrix::zeros(rows, cols);
    let same_block = match scope {
        Scope::Block | Scope::Full => row_level == col_level,
        Scope::Duplicated {
            row_copy, col_copy, ..
        } => row_level == col_level && row_copy == col_copy,
    };
    let one = Rational::one();
    for (i, x) in rk.iter().enumerate() {
        for (j, y) in cl.iter().enumerate() {
            let same_index = same_block && i == j;
            if entry_on(kind, x, y, same_index)? {
                m.set(row_base + i, col_base + j, one.clone());
            }
        }
    }

    Ok(IncidenceMatrix {
        kind,
        row_level,
        col_level,
        scope,
        matrix: m,
    })
}

/// Sparse triplet dump: a header line `n k l q kind rows cols`, then one
/// `row col value` line per nonzero entry, row-major.
pub fn export_triplets(lat: &SubspaceLattice, im: &IncidenceMatrix) -> String {
    let m = &im.matrix;
    let mut out = format!(
        "{} {} {} {} {} {} {}\n",
        lat.n(),
        im.row_level,
        im.col_level,
        lat.q(),
        im.kind.as_str(),
        m.rows(),
        m.cols()
    );
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.get(r, c);
            if v.is_zero() {
                continue;
            }
            if v.denom().is_one() {
                out.push_str(&format!("{} {} {}\n", r, c, v.numer()));
            } else {
                out.push_str(&format!("{} {} {}/{}\n", r, c, v.numer(), v.denom()));
            }
        }
    }
    out
}
