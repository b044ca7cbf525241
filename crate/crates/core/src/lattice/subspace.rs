//! Subspaces of F_q^n in canonical reduced row echelon form, their
//! enumeration, and intersection dimensions.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exactnum::gauss_int;
use crate::lattice::fp::{is_prime, PrimeFieldElement};

/// Dense matrix over F_p. Small and short-lived; used for bases and row
/// reduction only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    modulus: u32,
    rows: usize,
    cols: usize,
    data: Vec<PrimeFieldElement>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u32) -> Self {
        FpMatrix {
            modulus,
            rows,
            cols,
            data: vec![PrimeFieldElement::zero(modulus); rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u32) -> Self {
        let mut m = FpMatrix::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, PrimeFieldElement::one(modulus));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn get(&self, r: usize, c: usize) -> PrimeFieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: PrimeFieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &FpMatrix) -> FpMatrix {
        debug_assert_eq!(self.cols, other.cols);
        debug_assert_eq!(self.modulus, other.modulus);
        let mut m = FpMatrix::zeros(self.rows + other.rows, self.cols, self.modulus);
        m.data[..self.data.len()].copy_from_slice(&self.data);
        m.data[self.data.len()..].copy_from_slice(&other.data);
        m
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.modulus, other.modulus);
        let mut out = FpMatrix::zeros(self.rows, other.cols, self.modulus);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur.add(&a.mul(&other.get(t, j))));
                }
            }
        }
        out
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, pr);
            let inv = self.get(row, col).inv().expect("nonzero pivot");
            for c in col..self.cols {
                self.set(row, c, self.get(row, c).mul(&inv));
            }
            for r in 0..self.rows {
                if r == row || self.get(r, col).is_zero() {
                    continue;
                }
                let f = self.get(r, col);
                for c in col..self.cols {
                    let v = self.get(r, c).sub(&f.mul(&self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }
}

/// Subspace of F_q^n, canonically represented by its RREF basis (dim x n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    q: u32,
    n: usize,
    dim: usize,
    basis: FpMatrix,
}

impl Subspace {
    /// Canonicalize the row span of an arbitrary generating matrix.
    pub fn from_span(mut m: FpMatrix) -> Subspace {
        let pivots = m.rref();
        let dim = pivots.len();
        let mut basis = FpMatrix::zeros(dim, m.cols(), m.modulus());
        for r in 0..dim {
            for c in 0..m.cols() {
                basis.set(r, c, m.get(r, c));
            }
        }
        Subspace { q: m.modulus(), n: m.cols(), dim, basis }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    /// Flat entry list; unique per subspace within one (n, q, dim) level.
    pub fn key(&self) -> Vec<u32> {
        (0..self.dim)
            .flat_map(|r| (0..self.n).map(move |c| self.basis.get(r, c).value()))
            .collect()
    }

    /// Image under an invertible change of coordinates g (acting on row
    /// vectors), re-canonicalized.
    pub fn apply(&self, g: &FpMatrix) -> Subspace {
        Subspace::from_span(self.basis.mul(g))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(intersect_dim(self, other)? == other.dim)
    }
}

/// dim(x ∩ y) = dim x + dim y - rank of the stacked bases.
pub fn intersect_dim(x: &Subspace, y: &Subspace) -> Result<usize> {
    if x.n != y.n || x.q != y.q {
        return Err(Error::invalid(format!(
            "mismatched ambient spaces: F_{}^{} vs F_{}^{}",
            x.q, x.n, y.q, y.n
        )));
    }
    let mut stack = x.basis.vstack(&y.basis);
    let rank = stack.rref().len();
    Ok(x.dim + y.dim - rank)
}

/// All k-dimensional subspaces of F_q^n (q prime), exactly once, ordered
/// lexicographically by (pivot-column set, row-major free entries).
pub fn enumerate(n: usize, k: usize, q: u64) -> Result<Vec<Subspace>> {
    if !is_prime(q) {
        return Err(Error::UnsupportedField(format!(
            "subspace enumeration needs prime q, got {q}"
        )));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds n = {n}")));
    }
    let q32 = q as u32;
    let mut out = Vec::new();
    if k == 0 {
        out.push(Subspace {
            q: q32,
            n,
            dim: 0,
            basis: FpMatrix::zeros(0, n, q32),
        });
        return Ok(out);
    }

    // Lexicographic pivot-column combinations.
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // Free positions (row-major): entries right of the row's pivot and
        // not in a pivot column.
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (r, &p) in pivots.iter().enumerate() {
            for c in (p + 1)..n {
                if !pivots.contains(&c) {
                    free.push((r, c));
                }
            }
        }
        let mut vals = vec![0u32; free.len()];
        loop {
            let mut basis = FpMatrix::zeros(k, n, q32);
            for (r, &p) in pivots.iter().enumerate() {
                basis.set(r, p, PrimeFieldElement::one(q32));
            }
            for (f, &(r, c)) in free.iter().enumerate() {
                basis.set(r, c, PrimeFieldElement::new(vals[f] as u64, q32));
            }
            out.push(Subspace { q: q32, n, dim: k, basis });

            // Odometer: last free position varies fastest.
            let mut pos = free.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                vals[pos] += 1;
                if vals[pos] < q32 {
                    break;
                }
                vals[pos] = 0;
            }
            if free.is_empty() || (pos == 0 && vals[0] == 0) {
                break;
            }
        }

        // Next lexicographic combination of pivot columns.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in (i + 1)..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All levels L_0..L_n of the subspace lattice of F_q^n, with canonical
/// index lookup per level.
#[derive(Clone, Debug)]
pub struct SubspaceLattice {
    q: u64,
    n: usize,
    levels: Vec<Vec<Subspace>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
    offsets: Vec<usize>,
}

impl SubspaceLattice {
    /// Build with the given dense-entry guard: refuses when some level pair
    /// would not fit in a max_entries dense block.
    pub fn with_guard(q: u64, n: i64, max_entries: u128) -> Result<Self> {
        if n < 0 {
            return Err(Error::invalid(format!("n must be >= 0, got {n}")));
        }
        if !is_prime(q) {
            return Err(Error::UnsupportedField(format!(
                "lattice construction needs prime q, got {q}"
            )));
        }
        let mut max_level: u128 = 0;
        for k in 0..=n {
            let count = gauss_int(n, k, q)?;
            let count: u128 = count
                .try_into()
                .map_err(|_| Error::SizeGuard { required: u128::MAX, limit: max_entries })?;
            max_level = max_level.max(count);
        }
        if max_level * max_level > max_entries {
            return Err(Error::SizeGuard {
                required: max_level * max_level,
                limit: max_entries,
            });
        }
        let n = n as usize;
        let mut levels = Vec::with_capacity(n + 1);
        let mut index = Vec::with_capacity(n + 1);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut running = 0usize;
        for k in 0..=n {
            let level = enumerate(n, k, q)?;
            let mut map = HashMap::with_capacity(level.len());
            for (i, s) in level.iter().enumerate() {
                map.insert(s.key(), i);
            }
            offsets.push(running);
            running += level.len();
            levels.push(level);
            index.push(map);
        }
        Ok(SubspaceLattice { q, n, levels, index, offsets })
    }

    pub fn new(q: u64, n: i64) -> Result<Self> {
        SubspaceLattice::with_guard(q, n, crate::lattice::DEFAULT_MAX_ENTRIES)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self, k: i64) -> &[Subspace] {
        &self.levels[k as usize]
    }

    pub fn size(&self, k: i64) -> usize {
        self.levels[k as usize].len()
    }

    /// Canonical index of a subspace within its level.
    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s.dim())?.get(&s.key()).copied()
    }

    /// Offset of level k in whole-lattice indexing.
    pub fn offset(&self, k: i64) -> usize {
        self.offsets[k as usize]
    }

    /// Total number of subspaces across all levels.
    pub fn total(&self) -> usize {
        self.offsets[self.n] + self.levels[self.n].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_match_gauss() {
        let cases: &[(usize, usize, u64, usize)] = &[
            (4, 2, 2, 35),
            (3, 1, 3, 13),
            (3, 2, 3, 13),
            (2, 1, 2, 3),
            (4, 0, 2, 1),
            (4, 4, 2, 1),
            (5, 2, 2, 155),
            (4, 2, 3, 130),
        ];
        for &(n, k, q, want) in cases {
            assert_eq!(enumerate(n, k, q).unwrap().len(), want, "({n},{k},{q})");
        }
    }

    #[test]
    fn enumeration_rejects_non_prime() {
        assert!(matches!(enumerate(4, 2, 4), Err(Error::UnsupportedField(_))));
        assert!(matches!(enumerate(4, 2, 9), Err(Error::UnsupportedField(_))));
        assert!(enumerate(3, 4, 2).is_err());
    }

    #[test]
    fn enumeration_is_canonical_and_distinct() {
        let subs = enumerate(4, 2, 3).unwrap();
        let mut seen = std::collections::HashSet::new();
        for s in &subs {
            assert_eq!(s.dim(), 2);
            // RREF: re-canonicalizing is the identity.
            assert_eq!(&Subspace::from_span(s.basis().clone()), s);
            assert!(seen.insert(s.key()), "duplicate subspace");
        }
    }

    #[test]
    fn enumeration_order_is_pivot_then_entries() {
        let subs = enumerate(4, 2, 2).unwrap();
        // First: pivots {0,1}, all free entries zero = span{e1, e2}.
        assert_eq!(subs[0].key(), vec![1, 0, 0, 0, 0, 1, 0, 0]);
        // Last: pivots {2,3} = span{e3, e4}.
        assert_eq!(subs[34].key(), vec![0, 0, 1, 0, 0, 0, 0, 1]);
        // Second: pivots {0,1}, last free entry 1.
        assert_eq!(subs[1].key(), vec![1, 0, 0, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn intersection_dimensions() {
        let q = 2;
        let subs = enumerate(4, 2, q).unwrap();
        for s in &subs {
            assert_eq!(intersect_dim(s, s).unwrap(), 2);
        }
        // span{e1,e2} vs span{e2,e3}: intersection is span{e2}.
        let mut a = FpMatrix::zeros(2, 4, 2);
        a.set(0, 0, PrimeFieldElement::one(2));
        a.set(1, 1, PrimeFieldElement::one(2));
        let mut b = FpMatrix::zeros(2, 4, 2);
        b.set(0, 1, PrimeFieldElement::one(2));
        b.set(1, 2, PrimeFieldElement::one(2));
        let (sa, sb) = (Subspace::from_span(a), Subspace::from_span(b));
        assert_eq!(intersect_dim(&sa, &sb).unwrap(), 1);
        assert!(sa.contains(&sb).is_ok());
        // distinct lines in F_2^2 meet trivially
        let lines = enumerate(2, 1, 2).unwrap();
        for (i, x) in lines.iter().enumerate() {
            for (j, y) in lines.iter().enumerate() {
                assert_eq!(intersect_dim(x, y).unwrap(), usize::from(i == j));
            }
        }
    }

    #[test]
    fn intersect_rejects_mismatched_spaces() {
        let a = enumerate(3, 1, 2).unwrap()[0].clone();
        let b = enumerate(4, 1, 2).unwrap()[0].clone();
        assert!(intersect_dim(&a, &b).is_err());
        let c = enumerate(3, 1, 3).unwrap()[0].clone();
        assert!(intersect_dim(&a, &c).is_err());
    }

    #[test]
    fn lattice_round_trip_and_offsets() {
        let lat = SubspaceLattice::new(2, 4).unwrap();
        assert_eq!(lat.total(), 1 + 15 + 35 + 15 + 1);
        for k in 0..=4i64 {
            for (i, s) in lat.level(k).iter().enumerate() {
                assert_eq!(lat.index_of(s), Some(i));
            }
        }
        assert_eq!(lat.offset(0), 0);
        assert_eq!(lat.offset(1), 1);
        assert_eq!(lat.offset(2), 16);
    }

    #[test]
    fn lattice_guard_refuses_oversized() {
        // q=2, n=7 has a 11811-wide middle level; 11811^2 > 10^6.
        assert!(matches!(
            SubspaceLattice::with_guard(2, 7, 1_000_000),
            Err(Error::SizeGuard { .. })
        ));
        assert!(SubspaceLattice::with_guard(2, 5, 1_000_000).is_ok());
    }

    #[test]
    fn gl_action_permutes_levels() {
        let lat = SubspaceLattice::new(2, 3).unwrap();
        // g = identity with an extra 1 above the diagonal (a transvection).
        let mut g = FpMatrix::identity(3, 2);
        g.set(0, 1, PrimeFieldElement::one(2));
        for k in 0..=3i64 {
            let mut image: Vec<usize> = lat
                .level(k)
                .iter()
                .map(|s| lat.index_of(&s.apply(&g)).expect("image in lattice"))
                .collect();
            image.sort_unstable();
            let want: Vec<usize> = (0..lat.size(k)).collect();
            assert_eq!(image, want, "k={k}");
        }
    }
}
