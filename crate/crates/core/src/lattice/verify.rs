//! Exact verification of the operator identities on an explicit subspace
//! lattice, harmonic (kernel) bases, and a floating-point eigenvalue
//! crosscheck against the closed-form spectrum.
//!
//! Everything except `spectrum_crosscheck` runs in exact rational
//! arithmetic. Matrix names follow the conventions used throughout the
//! crate: `W` blocks are containment incidence, `Wbar` blocks are
//! disjointness incidence, rows index the first level and columns the
//! second.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{gauss_int, pow_q, rat_to_f64, Rational};
use crate::lattice::matrix::{build, MatrixKind, RationalMatrix, Scope};
use crate::lattice::subspace::{intersect_dim, SubspaceLattice};
use crate::report::{all_pass, CheckItem};
use crate::spectrum::{multiplicities, theta, Parameters};

/// Outcome of an exact verification run over one lattice.
#[derive(Debug, Serialize)]
pub struct LatticeReport {
    pub q: u64,
    pub n: u64,
    pub levels: Vec<u64>,
    pub items: Vec<CheckItem>,
    pub products_checked: u64,
    pub pass: bool,
}

/// Basis of the level-`level` harmonic space: the kernel of the
/// containment map down to level `level - 1`, with integer entries.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub level: i64,
    /// Columns are basis vectors; rows index the level's subspaces.
    pub basis: RationalMatrix,
}

fn w_block(
    lat: &SubspaceLattice,
    kind: MatrixKind,
    k: i64,
    l: i64,
    max_entries: u128,
) -> Result<RationalMatrix> {
    Ok(build(lat, kind, k, l, Scope::Block, max_entries)?.matrix)
}

fn block_cache(
    lat: &SubspaceLattice,
    kind: MatrixKind,
    kmax: i64,
    max_entries: u128,
) -> Result<Vec<Vec<RationalMatrix>>> {
    let mut cache = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let mut row = Vec::with_capacity(kmax as usize + 1);
        for l in 0..=kmax {
            row.push(w_block(lat, kind, k, l, max_entries)?);
        }
        cache.push(row);
    }
    Ok(cache)
}

fn gauss_rat(a: i64, b: i64, q: u64) -> Result<Rational> {
    Ok(Rational::from(gauss_int(a, b, q)?))
}

fn binom2(i: i64) -> i64 {
    i * (i - 1) / 2
}

fn sign_rat(i: i64) -> Rational {
    if i % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Verifies the three composition identities between containment and
/// disjointness matrices, for every valid level combination up to `kmax`:
///
/// - `W(k,l) W(l,i) = gauss(k-i, l-i) W(k,i)` for `i <= l <= k`,
/// - `W(i,k) Wbar(k,l) = q^(l(k-i)) gauss(n-i-l, k-i) Wbar(i,l)` for `i <= k`,
/// - `Wbar(k,l) = sum_h (-1)^h q^(h(h-1)/2) W(k,h) W(h,l)`.
///
/// Also checks transpose symmetry of the blocks and that level sizes match
/// the Gaussian binomials.
pub fn verify_identities(
    lat: &SubspaceLattice,
    kmax: i64,
    max_entries: u128,
) -> Result<LatticeReport> {
    let q = lat.q();
    let n = lat.n() as i64;
    if !(0..=n).contains(&kmax) {
        return Err(Error::invalid(format!("kmax {kmax} outside 0..={n}")));
    }
    let w = block_cache(lat, MatrixKind::W, kmax, max_entries)?;
    let wbar = block_cache(lat, MatrixKind::Wbar, kmax, max_entries)?;

    let mut items = Vec::new();
    let mut products: u64 = 0;

    // Level sizes against the Gaussian binomials.
    {
        let mut bad = Vec::new();
        for l in 0..=n {
            let expect = gauss_int(n, l, q)?;
            if BigInt::from(lat.size(l)) != expect {
                bad.push(format!("level {l}: {} != {expect}", lat.size(l)));
            }
        }
        items.push(CheckItem::new(
            "level_count_matches_gauss",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} levels", n + 1)
            } else {
                bad.join("; ")
            },
        ));
    }

    // Transpose symmetry of both incidence families.
    {
        let mut bad = Vec::new();
        for k in 0..=kmax {
            for l in 0..=kmax {
                if w[k as usize][l as usize].transpose() != w[l as usize][k as usize] {
                    bad.push(format!("W({k},{l})"));
                }
                if wbar[k as usize][l as usize].transpose() != wbar[l as usize][k as usize] {
                    bad.push(format!("Wbar({k},{l})"));
                }
            }
        }
        items.push(CheckItem::new(
            "transpose_symmetry",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} block pairs", (kmax + 1) * (kmax + 1))
            } else {
                bad.join("; ")
            },
        ));
    }

    // W(k,l) W(l,i) = gauss(k-i, l-i) W(k,i).
    {
        let mut bad = Vec::new();
        let mut count = 0u64;
        for k in 0..=kmax {
            for l in 0..=k {
                for i in 0..=l {
                    let lhs = w[k as usize][l as usize].mul(&w[l as usize][i as usize]);
                    let rhs = w[k as usize][i as usize].scale(&gauss_rat(k - i, l - i, q)?);
                    count += 1;
                    if lhs != rhs {
                        bad.push(format!("(k={k},l={l},i={i})"));
                    }
                }
            }
        }
        products += count;
        items.push(CheckItem::new(
            "containment_composition",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{count} triples")
            } else {
                bad.join("; ")
            },
        ));
    }

    // W(i,k) Wbar(k,l) = q^(l(k-i)) gauss(n-i-l, k-i) Wbar(i,l).
    {
        let mut bad = Vec::new();
        let mut count = 0u64;
        for k in 0..=kmax {
            for i in 0..=k {
                for l in 0..=kmax {
                    let lhs = w[i as usize][k as usize].mul(&wbar[k as usize][l as usize]);
                    let coeff = pow_q(q, l * (k - i)) * gauss_rat(n - i - l, k - i, q)?;
                    let rhs = wbar[i as usize][l as usize].scale(&coeff);
                    count += 1;
                    if lhs != rhs {
                        bad.push(format!("(i={i},k={k},l={l})"));
                    }
                }
            }
        }
        products += count;
        items.push(CheckItem::new(
            "containment_disjointness_commutation",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{count} triples")
            } else {
                bad.join("; ")
            },
        ));
    }

    // Wbar(k,l) = sum_h (-1)^h q^(h(h-1)/2) W(k,h) W(h,l).
    {
        let mut bad = Vec::new();
        let mut count = 0u64;
        for k in 0..=kmax {
            for l in 0..=kmax {
                let mut acc = RationalMatrix::zeros(lat.size(k), lat.size(l));
                for h in 0..=k.min(l) {
                    let term = w[k as usize][h as usize].mul(&w[h as usize][l as usize]);
                    let coeff = sign_rat(h) * pow_q(q, binom2(h));
                    acc = acc.add(&term.scale(&coeff));
                    count += 1;
                }
                if acc != wbar[k as usize][l as usize] {
                    bad.push(format!("(k={k},l={l})"));
                }
            }
        }
        products += count;
        items.push(CheckItem::new(
            "disjointness_inclusion_exclusion",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{count} summands")
            } else {
                bad.join("; ")
            },
        ));
    }

    let pass = all_pass(&items);
    Ok(LatticeReport {
        q,
        n: lat.n() as u64,
        levels: (0..=n).map(|l| lat.size(l) as u64).collect(),
        items,
        products_checked: products,
        pass,
    })
}

/// Kernel of a rational matrix as an integer-entry basis, one column per
/// kernel vector. Uses fraction-free (Bareiss) elimination so intermediate
/// values stay integral.
fn integer_kernel(a: &RationalMatrix) -> RationalMatrix {
    let nrows = a.rows();
    let ncols = a.cols();
    // Row scaling does not change the kernel, so clear denominators per row.
    let mut m: Vec<Vec<BigInt>> = (0..nrows)
        .map(|r| {
            let mut lcm = BigInt::one();
            for c in 0..ncols {
                lcm = lcm.lcm(a.get(r, c).denom());
            }
            (0..ncols)
                .map(|c| {
                    let v = a.get(r, c);
                    v.numer() * (&lcm / v.denom())
                })
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..nrows {
            if m[i][c].is_zero() && m[i][(c + 1)..].iter().all(|v| v.is_zero()) {
                continue;
            }
            for j in (c + 1)..ncols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                let (quo, rem) = num.div_rem(&prev);
                assert!(rem.is_zero(), "fraction-free step must divide exactly");
                m[i][j] = quo;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }

    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = RationalMatrix::zeros(ncols, free_cols.len());
    for (out_col, &f) in free_cols.iter().enumerate() {
        let mut x = vec![Rational::zero(); ncols];
        x[f] = Rational::one();
        for (row, &pc) in pivot_cols.iter().enumerate().rev() {
            let mut s = Rational::zero();
            for j in (pc + 1)..ncols {
                if !m[row][j].is_zero() && !x[j].is_zero() {
                    s += Rational::from(m[row][j].clone()) * &x[j];
                }
            }
            x[pc] = -s / Rational::from(m[row][pc].clone());
        }
        let mut lcm = BigInt::one();
        for v in &x {
            lcm = lcm.lcm(v.denom());
        }
        let scale = Rational::from(lcm);
        for (row, v) in x.into_iter().enumerate() {
            basis.set(row, out_col, v * &scale);
        }
    }
    basis
}

/// Basis of the harmonic space at `level`: the kernel of the containment
/// map from `level` down to `level - 1` (all of the level-0 space when
/// `level` is 0).
pub fn harmonic_basis(lat: &SubspaceLattice, level: i64) -> Result<HarmonicBasis> {
    let n = lat.n() as i64;
    if !(0..=n / 2).contains(&level) {
        return Err(Error::invalid(format!(
            "harmonic level {level} outside 0..={}",
            n / 2
        )));
    }
    if level == 0 {
        return Ok(HarmonicBasis {
            level,
            basis: RationalMatrix::identity(1),
        });
    }
    let down = w_block(lat, MatrixKind::W, level - 1, level, u128::MAX)?;
    let basis = integer_kernel(&down);
    for col in 0..basis.cols() {
        debug_assert!(!(0..basis.rows()).all(|r| basis.get(r, col).is_zero()));
    }
    Ok(HarmonicBasis { level, basis })
}

/// Verifies, in exact arithmetic, how the incidence operators act on the
/// harmonic spaces. With `C(k,i) = W(k,i) B_i` (the level-`i` harmonics
/// raised to level `k`):
///
/// - dimensions: each harmonic space has the expected dimension,
/// - band vanishing: `C(k,i) = 0` exactly when `k < i` or `k > n-i`,
/// - scalar action: `Wbar(k,i) B_i = (-1)^i q^(i(i-1)/2) C(k,i)`,
/// - orthogonality: `C(k,i)^T C(k,j)` is zero for `i != j` and
///   `q^(i(k-i)) gauss(n-2i, k-i) (B_i^T B_i)` for `i = j`,
/// - eigen action: `Wbar(k,l) C(l,i) = (-1)^i q^(i(i-1)/2 + k(l-i)) gauss(n-k-i, l-i) C(k,i)`,
/// - the all-ones block annihilates every harmonic space above level 0 and
///   scales the constant vector by the level size.
pub fn verify_lemmas(lat: &SubspaceLattice, max_entries: u128) -> Result<LatticeReport> {
    let q = lat.q();
    let n = lat.n() as i64;
    let half = n / 2;

    let w = block_cache(lat, MatrixKind::W, n, max_entries)?;
    let wbar = block_cache(lat, MatrixKind::Wbar, n, max_entries)?;
    let mults = multiplicities(q, n)?;

    let mut items = Vec::new();
    let mut products: u64 = 0;

    let mut bases = Vec::with_capacity(half as usize + 1);
    for i in 0..=half {
        bases.push(harmonic_basis(lat, i)?);
    }

    // Kernel dimensions match the closed-form multiplicities.
    {
        let mut bad = Vec::new();
        let mut dims = Vec::new();
        for (i, b) in bases.iter().enumerate() {
            let d = BigInt::from(b.basis.cols());
            dims.push(b.basis.cols().to_string());
            if &d != mults.get(i as i64) {
                bad.push(format!(
                    "level {i}: {} != {}",
                    b.basis.cols(),
                    mults.get(i as i64)
                ));
            }
        }
        items.push(CheckItem::new(
            "harmonic_dimension_matches_multiplicity",
            bad.is_empty(),
            if bad.is_empty() {
                format!("d = [{}]", dims.join(", "))
            } else {
                bad.join("; ")
            },
        ));
    }

    // Raised harmonics C(k,i) for every level pair.
    let mut c: Vec<Vec<RationalMatrix>> = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let mut row = Vec::with_capacity(half as usize + 1);
        for i in 0..=half {
            row.push(w[k as usize][i as usize].mul(&bases[i as usize].basis));
            products += 1;
        }
        c.push(row);
    }

    // Band vanishing.
    {
        let mut bad = Vec::new();
        for k in 0..=n {
            for i in 0..=half {
                let outside = k < i || k > n - i;
                if c[k as usize][i as usize].is_zero() != outside {
                    bad.push(format!("(k={k},i={i})"));
                }
            }
        }
        items.push(CheckItem::new(
            "harmonic_band_vanishing",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} pairs", (n + 1) * (half + 1))
            } else {
                bad.join("; ")
            },
        ));
    }

    // Wbar(k,i) B_i = (-1)^i q^(i(i-1)/2) C(k,i).
    {
        let mut bad = Vec::new();
        let mut count = 0u64;
        for k in 0..=n {
            for i in 0..=half {
                let lhs = wbar[k as usize][i as usize].mul(&bases[i as usize].basis);
                let coeff = sign_rat(i) * pow_q(q, binom2(i));
                let rhs = c[k as usize][i as usize].scale(&coeff);
                count += 1;
                if lhs != rhs {
                    bad.push(format!("(k={k},i={i})"));
                }
            }
        }
        products += count;
        items.push(CheckItem::new(
            "disjointness_scalar_action",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{count} pairs")
            } else {
                bad.join("; ")
            },
        ));
    }

    // C(k,i)^T C(k,j) = delta_ij q^(i(k-i)) gauss(n-2i, k-i) B_i^T B_i.
    {
        let mut bad = Vec::new();
        let mut count = 0u64;
        let grams: Vec<RationalMatrix> = bases
            .iter()
            .map(|b| b.basis.transpose().mul(&b.basis))
            .collect();
        for k in 0..=n {
            for i in 0..=half {
                for j in 0..=half {
                    let lhs = c[k as usize][i as usize]
                        .transpose()
                        .mul(&c[k as usize][j as usize]);
                    let rhs = if i == j {
                        let coeff = pow_q(q, i * (k - i)) * gauss_rat(n - 2 * i, k - i, q)?;
                        grams[i as usize].scale(&coeff)
                    } else {
                        RationalMatrix::zeros(lhs.rows(), lhs.cols())
                    };
                    count += 1;
                    if lhs != rhs {
                        bad.push(format!("(k={k},i={i},j={j})"));
                    }
                }
            }
        }
        products += count;
        items.push(CheckItem::new(
            "raised_harmonic_orthogonality",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{count} triples")
            } else {
                bad.join("; ")
            },
        ));
    }

    // Wbar(k,l) C(l,i) = (-1)^i q^(i(i-1)/2 + k(l-i)) gauss(n-k-i, l-i) C(k,i).
    {
        let mut bad = Vec::new();
        let mut count = 0u64;
        for k in 0..=n {
            for l in 0..=n {
                for i in 0..=half {
                    let lhs = wbar[k as usize][l as usize].mul(&c[l as usize][i as usize]);
                    let g = gauss_rat(n - k - i, l - i, q)?;
                    let rhs = if g.is_zero() {
                        RationalMatrix::zeros(lhs.rows(), lhs.cols())
                    } else {
                        let coeff = sign_rat(i) * pow_q(q, binom2(i) + k * (l - i)) * g;
                        c[k as usize][i as usize].scale(&coeff)
                    };
                    count += 1;
                    if lhs != rhs {
                        bad.push(format!("(k={k},l={l},i={i})"));
                    }
                }
            }
        }
        products += count;
        items.push(CheckItem::new(
            "disjointness_eigen_action",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{count} triples")
            } else {
                bad.join("; ")
            },
        ));
    }

    // All-ones annihilation: J(k,l) C(l,i) = ones * colsums(C(l,i)), so the
    // statement for every k at once is that each column of C(l,i) sums to
    // zero for i >= 1. Checked literally for one middle pair as well.
    {
        let mut bad = Vec::new();
        for l in 0..=n {
            for i in 1..=half {
                if !c[l as usize][i as usize].column_sums().is_zero() {
                    bad.push(format!("(l={l},i={i})"));
                }
            }
        }
        let mid = half as usize;
        for i in 1..=half {
            let ones = RationalMatrix::ones(lat.size(half), lat.size(half));
            let lit = ones.mul(&c[mid][i as usize]);
            products += 1;
            if !lit.is_zero() {
                bad.push(format!("literal (k={mid},l={mid},i={i})"));
            }
        }
        items.push(CheckItem::new(
            "allones_annihilates_harmonics",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} level pairs", (n + 1) * half)
            } else {
                bad.join("; ")
            },
        ));
    }

    // Constant vector: C(k,0) is all-ones and J(k,l) maps the constant
    // vector on level l to gauss(n,l) times the constant vector on level k.
    {
        let mut bad = Vec::new();
        for k in 0..=n {
            let ck = &c[k as usize][0];
            let nk = lat.size(k);
            if ck.rows() != nk
                || ck.cols() != 1
                || !(0..nk).all(|r| ck.get(r, 0).is_one())
            {
                bad.push(format!("C({k},0) not all-ones"));
            }
        }
        let mid = half as usize;
        let ones = RationalMatrix::ones(lat.size(half), lat.size(half));
        let lit = ones.mul(&c[mid][0]);
        products += 1;
        let expect = c[mid][0].scale(&gauss_rat(n, half, q)?);
        if lit != expect {
            bad.push(format!("literal (k={mid},l={mid},i=0)"));
        }
        items.push(CheckItem::new(
            "allones_on_constant",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} levels", n + 1)
            } else {
                bad.join("; ")
            },
        ));
    }

    let pass = all_pass(&items);
    Ok(LatticeReport {
        q,
        n: lat.n() as u64,
        levels: (0..=n).map(|l| lat.size(l) as u64).collect(),
        items,
        products_checked: products,
        pass,
    })
}

/// One eigenvalue of the disjointness matrix with its multiplicity, exact.
#[derive(Debug, Serialize)]
pub struct ExpectedEigenvalue {
    pub theta: String,
    pub multiplicity: String,
}

/// Floating-point eigenvalue crosscheck of the level-`k` disjointness
/// matrix against the closed-form spectrum. Floats are diagnostic; the
/// exact side checks (trace, multiplicity sum) use big rationals.
#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub q: u64,
    pub n: u64,
    pub k: i64,
    pub matrix_size: usize,
    pub eigenvalues: Vec<ExpectedEigenvalue>,
    pub float_max_rel_err: f64,
    pub trace_is_zero: bool,
    pub pass: bool,
}

/// Compares the numerically computed spectrum of the disjointness matrix on
/// level `k` with the closed-form eigenvalues and multiplicities.
/// `tol` bounds the allowed relative error per eigenvalue.
pub fn spectrum_crosscheck(
    lat: &SubspaceLattice,
    k: i64,
    tol: f64,
    max_entries: u128,
) -> Result<SpectrumReport> {
    let q = lat.q();
    let n = lat.n() as i64;
    if !(1..=n / 2).contains(&k) {
        return Err(Error::invalid(format!("level {k} outside 1..={}", n / 2)));
    }
    let level = lat.level(k);
    let nk = level.len();
    let needed = nk as u128 * nk as u128;
    if needed > max_entries {
        return Err(Error::SizeGuard {
            required: needed,
            limit: max_entries,
        });
    }

    let params = Parameters::new(q, n, k, k)?;
    let mults = multiplicities(q, n)?;
    let mut expected = Vec::with_capacity(k as usize + 1);
    let mut exact: Vec<(Rational, BigInt)> = Vec::new();
    for i in 0..=k {
        let th = theta(&params, i, k, k)?;
        let val = th.rational_value().ok_or_else(|| {
            Error::invalid(format!("eigenvalue at index {i} is not rational"))
        })?;
        let d = mults.get(i).clone();
        expected.push(ExpectedEigenvalue {
            theta: crate::exactnum::rat_to_string(&val),
            multiplicity: d.to_string(),
        });
        exact.push((val, d));
    }

    // Exact side conditions: multiplicities fill the space, trace vanishes.
    let total: BigInt = exact.iter().map(|(_, d)| d.clone()).sum();
    if total != BigInt::from(nk) {
        return Err(Error::invalid(format!(
            "multiplicities sum to {total}, expected {nk}"
        )));
    }
    let trace: Rational = exact
        .iter()
        .map(|(v, d)| v * Rational::from(d.clone()))
        .sum();
    let trace_is_zero = trace.is_zero();

    let m = DMatrix::<f64>::from_fn(nk, nk, |r, c| {
        match intersect_dim(&level[r], &level[c]) {
            Ok(0) => 1.0,
            _ => 0.0,
        }
    });
    let mut computed: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    computed.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mut wanted: Vec<f64> = Vec::with_capacity(nk);
    for (v, d) in &exact {
        let f = rat_to_f64(v);
        for _ in 0..d.to_usize().expect("multiplicity fits usize") {
            wanted.push(f);
        }
    }
    wanted.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mut max_rel = 0.0f64;
    for (a, e) in computed.iter().zip(&wanted) {
        let rel = (a - e).abs() / e.abs().max(1.0);
        max_rel = max_rel.max(rel);
    }

    let pass = trace_is_zero && computed.len() == wanted.len() && max_rel <= tol;
    Ok(SpectrumReport {
        q,
        n: lat.n() as u64,
        k,
        matrix_size: nk,
        eigenvalues: expected,
        float_max_rel_err: max_rel,
        trace_is_zero,
        pass,
    })
}
