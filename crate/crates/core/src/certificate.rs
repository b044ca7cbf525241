//! Dual certificate assembly and exact feasibility checking.
//!
//! For parameters (q, n, k, l) the dual solution is a one-parameter family:
//! a multiplier lambda plus derived coefficients a(lambda), b(lambda) in
//! Q(sqrt(D)), D = [n-1,k-1][n-1,l-1]. Feasibility reduces to finitely many
//! 2x2 blocks (one per harmonic level i = 0..l) and scalar conditions
//! (i = l+1..k), each decided by exact sign computations after a congruence
//! scaling that clears every radical except sqrt(D). A feasible certificate
//! proves |F||G| <= D for all cross-intersecting pairs (F, G).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{
    gauss, pow_q, rat_from_str, rat_sign, rat_to_string, serde_str, QuadraticNumber, Rational,
};
use crate::report::CheckItem;
use crate::spectrum::{theta, Parameters};

/// Dual variables at a fixed multiplier lambda; all values share radicand D.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCoefficients {
    pub lambda: Rational,
    pub alpha: QuadraticNumber,
    pub beta: QuadraticNumber,
    pub a_lambda: QuadraticNumber,
    pub b_lambda: QuadraticNumber,
}

/// Congruence-scaled 2x2 block at harmonic level i: entries p (first
/// diagonal), r (off-diagonal), s (scaled second diagonal), its determinant,
/// and the exact PSD verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedBlock {
    pub i: i64,
    pub p: QuadraticNumber,
    pub r: QuadraticNumber,
    pub s: QuadraticNumber,
    pub det: QuadraticNumber,
    pub psd: bool,
}

/// Scalar feasibility condition at level i in l+1..=k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarCondition {
    pub i: i64,
    pub value: QuadraticNumber,
    pub nonneg: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        }
    }

}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feasible" => Ok(Verdict::Feasible),
            "infeasible" => Ok(Verdict::Infeasible),
            other => Err(Error::Parse(format!("unknown verdict {other:?}"))),
        }
    }
}

/// Complete dual certificate for one parameter tuple.
#[derive(Clone, Debug)]
pub struct DualCertificate {
    pub params: Parameters,
    pub coefficients: DualCoefficients,
    pub blocks: Vec<ReducedBlock>,
    pub scalars: Vec<ScalarCondition>,
    pub bound: BigInt,
    pub lambda_bracket: (Rational, Rational),
    pub verdict: Verdict,
}

/// a(lambda) = [ (1/2) q^l (q^{k-l} - 1) sqrt(D)
///             + q^{l^2} (q^l - 1) [n-l,l] lambda ]
///           / [ q^{k^2} (q^k - 1) [n-k,k] ].
///
/// For k = l the radical term vanishes and the rest cancels to a(lambda) =
/// lambda.
pub fn coeff_a(p: &Parameters, lambda: &Rational) -> QuadraticNumber {
    let (q, n, k, l) = (p.q(), p.n(), p.k(), p.l());
    let d = p.radicand();
    let denom = pow_q(q, k * k)
        * (pow_q(q, k) - Rational::one())
        * gauss(n - k, k, q).expect("validated params");
    let rad_num = (pow_q(q, l) / Rational::from_integer(BigInt::from(2)))
        * (pow_q(q, k - l) - Rational::one());
    let rat_num = pow_q(q, l * l)
        * (pow_q(q, l) - Rational::one())
        * gauss(n - l, l, q).expect("validated params")
        * lambda;
    QuadraticNumber::new(d, rat_num / &denom, rad_num / &denom).expect("D >= 1")
}

/// b(lambda) = [ -(1/2) q^l [n-1,l]
///             - q^{l^2} [n-l,l] (sqrt(D) / [n-1,k-1]) lambda ]
///           / [ q^{kl} [n-k,l] ].
pub fn coeff_b(p: &Parameters, lambda: &Rational) -> QuadraticNumber {
    let (q, n, k, l) = (p.q(), p.n(), p.k(), p.l());
    let d = p.radicand();
    let denom = pow_q(q, k * l) * gauss(n - k, l, q).expect("validated params");
    let rat_num = -(pow_q(q, l) / Rational::from_integer(BigInt::from(2)))
        * gauss(n - 1, l, q).expect("validated params");
    let rad_num = -pow_q(q, l * l) * gauss(n - l, l, q).expect("validated params") * lambda
        / gauss(n - 1, k - 1, q).expect("validated params");
    QuadraticNumber::new(d, rat_num / &denom, rad_num / &denom).expect("D >= 1")
}

/// (1/2) sqrt(D), the shared diagonal constant alpha = beta.
pub fn half_sqrt_d(p: &Parameters) -> QuadraticNumber {
    QuadraticNumber::radical_multiple(
        p.radicand(),
        Rational::new(BigInt::one(), BigInt::from(2)),
    )
}

/// Dual coefficients at a fixed multiplier.
pub fn coefficients(p: &Parameters, lambda: &Rational) -> DualCoefficients {
    let c = half_sqrt_d(p);
    DualCoefficients {
        lambda: lambda.clone(),
        alpha: c.clone(),
        beta: c,
        a_lambda: coeff_a(p, lambda),
        b_lambda: coeff_b(p, lambda),
    }
}

/// Assemble all reduced blocks (i = 0..=l) and scalar conditions
/// (i = l+1..=k) at the given multiplier.
///
/// Raw block at level i has diagonal (c - theta_i^{k,k} a, c - theta_i^{l,l}
/// lambda) and off-diagonal -theta_i^{k,l} b, with an extra
/// -(1/2)sqrt([n,k][n,l]) on the off-diagonal at i = 0. Scaling the second
/// row and column by t_i = sqrt(den_rad_i / num_rad_i) turns the
/// off-diagonal radical into the rational rho_i (and the i = 0 extra term
/// into -(1/2)[n,l]), so every scaled entry lies in Q(sqrt(D)). The scaling
/// is a congruence by a positive diagonal matrix, hence preserves PSD-ness
/// and the sign of the determinant.
pub fn build_blocks(
    p: &Parameters,
    lambda: &Rational,
) -> (Vec<ReducedBlock>, Vec<ScalarCondition>) {
    let (q, n, k, l) = (p.q(), p.n(), p.k(), p.l());
    let a_l = coeff_a(p, lambda);
    let b_l = coeff_b(p, lambda);
    let c = half_sqrt_d(p);
    let half = Rational::new(BigInt::one(), BigInt::from(2));

    let mut blocks = Vec::with_capacity((l + 1) as usize);
    for i in 0..=l {
        let th_kk = theta(p, i, k, k)
            .expect("in range")
            .rational_value()
            .expect("equal radicals");
        let th_ll = theta(p, i, l, l)
            .expect("in range")
            .rational_value()
            .expect("equal radicals");
        let t_kl = theta(p, i, k, l).expect("in range");
        // t_i^2; num_rad > 0 because i <= l <= k <= n - i here.
        let scale = Rational::new(t_kl.den_rad().clone(), t_kl.num_rad().clone());

        let p_entry = c.try_sub(&a_l.mul_rat(&th_kk)).expect("same field");
        let mut r_entry = b_l.mul_rat(t_kl.rho()).neg();
        if i == 0 {
            let jn = gauss(n, l, q).expect("validated params");
            r_entry = r_entry.sub_rat(&(&half * &jn));
        }
        let s_entry = c.sub_rat(&(lambda * &th_ll)).mul_rat(&scale);
        let det = p_entry
            .try_mul(&s_entry)
            .expect("same field")
            .try_sub(&r_entry.square())
            .expect("same field");
        let psd = p_entry.sign() >= 0 && s_entry.sign() >= 0 && det.sign() >= 0;
        blocks.push(ReducedBlock { i, p: p_entry, r: r_entry, s: s_entry, det, psd });
    }

    let mut scalars = Vec::with_capacity((k - l).max(0) as usize);
    for i in (l + 1)..=k {
        let th_kk = theta(p, i, k, k)
            .expect("in range")
            .rational_value()
            .expect("equal radicals");
        let value = c.try_sub(&a_l.mul_rat(&th_kk)).expect("same field");
        let nonneg = value.sign() >= 0;
        scalars.push(ScalarCondition { i, value, nonneg });
    }
    (blocks, scalars)
}

/// Exact 2x2 PSD criterion on the stored entries: p >= 0, s >= 0 and
/// ps - r^2 >= 0. Ignores the cached `det` and `psd` fields.
pub fn psd_check_2x2(block: &ReducedBlock) -> bool {
    if block.p.sign() < 0 || block.s.sign() < 0 {
        return false;
    }
    let det = block
        .p
        .try_mul(&block.s)
        .expect("shared radicand")
        .try_sub(&block.r.square())
        .expect("shared radicand");
    det.sign() >= 0
}

impl ReducedBlock {
    /// p*s - r^2 recomputed from the stored entries.
    pub fn recompute_det(&self) -> QuadraticNumber {
        self.p
            .try_mul(&self.s)
            .expect("shared radicand")
            .try_sub(&self.r.square())
            .expect("shared radicand")
    }
}

/// Feasibility of the full condition system at one multiplier value.
pub fn feasible_at(p: &Parameters, lambda: &Rational) -> bool {
    let (blocks, scalars) = build_blocks(p, lambda);
    verdict_from_parts(lambda, &coeff_a(p, lambda), &blocks, &scalars) == Verdict::Feasible
}

/// The shared feasibility predicate: lambda > 0, a(lambda) > 0, every block
/// PSD (re-derived from entries), every scalar nonnegative.
pub fn verdict_from_parts(
    lambda: &Rational,
    a_lambda: &QuadraticNumber,
    blocks: &[ReducedBlock],
    scalars: &[ScalarCondition],
) -> Verdict {
    let ok = rat_sign(lambda) > 0
        && a_lambda.sign() > 0
        && blocks.iter().all(psd_check_2x2)
        && scalars.iter().all(|s| s.value.sign() >= 0);
    if ok {
        Verdict::Feasible
    } else {
        Verdict::Infeasible
    }
}

/// Smallest power of two accepted by the search.
fn lambda_floor() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << 64)
}

/// Halving search for a feasible multiplier: tries 1, 1/2, 1/4, ... and
/// returns the first feasible value plus the bracket (feasible, last
/// infeasible), or (1, 1) when lambda = 1 already works. Exhausting the
/// floor 2^-64 is reported as an error, never ignored.
pub fn lambda_search(p: &Parameters) -> Result<(Rational, (Rational, Rational))> {
    let floor = lambda_floor();
    let mut lambda = Rational::one();
    loop {
        if feasible_at(p, &lambda) {
            let upper = if lambda == Rational::one() {
                lambda.clone()
            } else {
                &lambda * Rational::from_integer(BigInt::from(2))
            };
            return Ok((lambda.clone(), (lambda, upper)));
        }
        if lambda <= floor {
            return Err(Error::SearchExhausted { floor: "2^-64".into() });
        }
        lambda /= Rational::from_integer(BigInt::from(2));
    }
}

/// Bisect the feasibility boundary inside (feasible lo, infeasible hi) for
/// the requested number of steps, keeping lo feasible throughout. Returns
/// the narrowed bracket. A degenerate bracket (lo = hi) is returned as is.
pub fn refine_window(
    p: &Parameters,
    bracket: &(Rational, Rational),
    bits: u32,
) -> (Rational, Rational) {
    let (mut lo, mut hi) = bracket.clone();
    if lo == hi {
        return (lo, hi);
    }
    for _ in 0..bits {
        let mid = (&lo + &hi) / Rational::from_integer(BigInt::from(2));
        if feasible_at(p, &mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn assemble(
    p: &Parameters,
    lambda: &Rational,
    bracket: (Rational, Rational),
) -> DualCertificate {
    let coefficients = coefficients(p, lambda);
    let (blocks, scalars) = build_blocks(p, lambda);
    let verdict = verdict_from_parts(lambda, &coefficients.a_lambda, &blocks, &scalars);
    DualCertificate {
        params: p.clone(),
        coefficients,
        blocks,
        scalars,
        bound: p.bound(),
        lambda_bracket: bracket,
        verdict,
    }
}

/// Find a feasible multiplier and assemble the certificate; the certified
/// bound (alpha + beta)^2 = D is exact.
pub fn certify(p: &Parameters) -> Result<DualCertificate> {
    let (lambda, bracket) = lambda_search(p)?;
    Ok(assemble(p, &lambda, bracket))
}

/// Assemble the certificate at an explicitly chosen multiplier. The verdict
/// reports infeasibility instead of failing.
pub fn certify_at(p: &Parameters, lambda: &Rational) -> Result<DualCertificate> {
    if rat_sign(lambda) < 0 {
        return Err(Error::invalid(format!(
            "lambda must be >= 0, got {}",
            rat_to_string(lambda)
        )));
    }
    Ok(assemble(p, lambda, (lambda.clone(), lambda.clone())))
}

impl DualCertificate {
    /// Verdict recomputed from the stored blocks and scalars only.
    pub fn recheck(&self) -> Verdict {
        verdict_from_parts(
            &self.coefficients.lambda,
            &self.coefficients.a_lambda,
            &self.blocks,
            &self.scalars,
        )
    }

    /// True iff every cached field (dets, psd flags, nonneg flags, bound)
    /// matches recomputation from the primary data.
    pub fn consistent(&self) -> bool {
        self.bound == self.params.bound()
            && self.recheck() == self.verdict
            && self.blocks.iter().all(|b| {
                b.recompute_det() == b.det && b.psd == psd_check_2x2(b)
            })
            && self.scalars.iter().all(|s| s.nonneg == (s.value.sign() >= 0))
    }

    pub fn to_document(&self) -> CertificateDocument {
        CertificateDocument {
            params: self.params.clone(),
            swapped: self.params.swapped(),
            q_prime_power: self.params.q_prime_power(),
            bound: self.bound.clone(),
            d: self.params.radicand(),
            lambda: self.coefficients.lambda.clone(),
            lambda_bracket: (
                rat_to_string(&self.lambda_bracket.0),
                rat_to_string(&self.lambda_bracket.1),
            ),
            a_lambda: self.coefficients.a_lambda.clone(),
            b_lambda: self.coefficients.b_lambda.clone(),
            blocks: self.blocks.clone(),
            scalars: self.scalars.clone(),
            verdict: self.verdict.as_str().to_string(),
        }
    }
}

/// Self-contained serialized form: rechecking the stored numbers reproduces
/// the verdict without re-deriving anything from (q, n, k, l).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub params: Parameters,
    pub swapped: bool,
    pub q_prime_power: bool,
    #[serde(with = "serde_str::bigint")]
    pub bound: BigInt,
    #[serde(rename = "D", with = "serde_str::bigint")]
    pub d: BigInt,
    #[serde(with = "serde_str::rational")]
    pub lambda: Rational,
    pub lambda_bracket: (String, String),
    pub a_lambda: QuadraticNumber,
    pub b_lambda: QuadraticNumber,
    pub blocks: Vec<ReducedBlock>,
    pub scalars: Vec<ScalarCondition>,
    pub verdict: String,
}

impl CertificateDocument {
    /// Recompute the verdict from the serialized numbers alone.
    pub fn recheck(&self) -> Result<Verdict> {
        for b in &self.blocks {
            for entry in [&b.p, &b.r, &b.s, &b.det] {
                if entry.radicand() != &self.d {
                    return Err(Error::RadicandMismatch {
                        left: self.d.clone(),
                        right: entry.radicand().clone(),
                    });
                }
            }
        }
        for s in &self.scalars {
            if s.value.radicand() != &self.d {
                return Err(Error::RadicandMismatch {
                    left: self.d.clone(),
                    right: s.value.radicand().clone(),
                });
            }
        }
        let _ = rat_from_str(&self.lambda_bracket.0)?;
        let _ = rat_from_str(&self.lambda_bracket.1)?;
        Ok(verdict_from_parts(&self.lambda, &self.a_lambda, &self.blocks, &self.scalars))
    }
}

/// Outcome of the structural identities behind the feasibility argument.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureReport {
    #[serde(with = "serde_str::rational")]
    pub lambda: Rational,
    pub items: Vec<CheckItem>,
    pub pass: bool,
}

/// Verify the structural facts the feasibility argument rests on, all
/// exactly:
///
/// (a) det S_0(lambda) = det S_1(lambda) = 0 and each is a scalar multiple
///     of its stated rank-one matrix;
/// (b) |theta_i^{k,k} a(0)| matches its closed form for i = 0..=k;
/// (c) that closed form is < (1/2)sqrt(D) for i in {0,1} and < (1/2q)sqrt(D)
///     for i >= 2;
/// (d) (theta_i^{k,l} b(0))^2 <= (theta_2^{k,l} b(0))^2 < D/(4q) for
///     i = 2..=l.
pub fn structure_checks(p: &Parameters, lambda: &Rational) -> StructureReport {
    let (q, n, k, l) = (p.q(), p.n(), p.k(), p.l());
    let d_int = p.radicand();
    let d_rat = Rational::from_integer(d_int.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let (blocks, _) = build_blocks(p, lambda);
    let mut items: Vec<CheckItem> = Vec::new();

    // (a) Rank-one structure of S_0 and S_1. The comparison matrix for i = 0
    // has squared diagonal (q^l - 1, q^k - 1), for i = 1 it is
    // (q^l (q^{n-l} - 1), q^k (q^{n-k} - 1)); both have negative
    // off-diagonals with squared magnitude equal to the diagonal product.
    // Proportionality is decided by cross-ratios after applying the same
    // second-coordinate scaling t_i^2 used for the blocks.
    for (idx, mp, ms, mr2) in [
        (
            0usize,
            pow_q(q, l) - Rational::one(),
            pow_q(q, k) - Rational::one(),
            (pow_q(q, l) - Rational::one()) * (pow_q(q, k) - Rational::one()),
        ),
        (
            1usize,
            pow_q(q, l) * (pow_q(q, n - l) - Rational::one()),
            pow_q(q, k) * (pow_q(q, n - k) - Rational::one()),
            pow_q(q, k + l)
                * (pow_q(q, n - l) - Rational::one())
                * (pow_q(q, n - k) - Rational::one()),
        ),
    ] {
        let block = &blocks[idx];
        let t_kl = theta(p, idx as i64, k, l).expect("in range");
        let scale = Rational::new(t_kl.den_rad().clone(), t_kl.num_rad().clone());
        let det_zero = block.det.sign() == 0;
        items.push(CheckItem::new(
            &format!("det_s{idx}_zero"),
            det_zero,
            format!("det S_{idx}({}) = 0", rat_to_string(lambda)),
        ));
        let cross = block
            .p
            .mul_rat(&(&ms * &scale))
            .try_sub(&block.s.mul_rat(&mp))
            .expect("same field")
            .sign()
            == 0;
        let off = block
            .r
            .square()
            .mul_rat(&(&mp * &mp))
            .try_sub(&block.p.square().mul_rat(&(&mr2 * &scale)))
            .expect("same field")
            .sign()
            == 0;
        let signs = block.r.sign() == -block.p.sign();
        items.push(CheckItem::new(
            &format!("s{idx}_rank_one"),
            cross && off && signs,
            format!(
                "S_{idx} proportional to rank-one comparison matrix \
                 (cross={cross}, offdiag={off}, signs={signs})"
            ),
        ));
    }

    // (b) + (c): evaluation-diagonal closed form at lambda = 0 and its
    // strict bounds. R_i below satisfies |theta_i^{k,k} a(0)| = R_i sqrt(D).
    let a0 = coeff_a(p, &Rational::zero());
    let mut form_ok = true;
    let mut small_ok = true;
    let mut large_ok = true;
    let mut first_fail = String::new();
    for i in 0..=k {
        let th_kk = theta(p, i, k, k)
            .expect("in range")
            .rational_value()
            .expect("equal radicals");
        let direct = a0.mul_rat(&th_kk);
        let direct_abs = if direct.sign() < 0 { direct.neg() } else { direct };
        let r_i = &half
            * pow_q(q, i * (i - 1) / 2 + l - i * k)
            * (pow_q(q, k - l) - Rational::one())
            / (pow_q(q, k) - Rational::one())
            * gauss(n - k - i, k - i, q).expect("validated params")
            / gauss(n - k, k, q).expect("validated params");
        let expected = QuadraticNumber::radical_multiple(d_int.clone(), r_i.clone());
        if direct_abs.try_sub(&expected).expect("same field").sign() != 0 {
            form_ok = false;
            if first_fail.is_empty() {
                first_fail = format!("closed form mismatch at i={i}");
            }
        }
        // The bound R_i < 1/2 (resp. 1/(2q)) is equivalent to
        // |theta a(0)| < (1/2) sqrt(D) (resp. /q) after dividing by sqrt(D).
        if i <= 1 {
            if r_i >= half {
                small_ok = false;
            }
        } else if r_i >= &half / pow_q(q, 1) {
            large_ok = false;
        }
    }
    items.push(CheckItem::new(
        "eval_diagonal_closed_form",
        form_ok,
        if form_ok { format!("matches for i=0..={k}") } else { first_fail },
    ));
    items.push(CheckItem::new(
        "eval_diagonal_bound_small_i",
        small_ok,
        "|theta_i a(0)| < (1/2) sqrt(D) for i in {0,1}".to_string(),
    ));
    items.push(CheckItem::new(
        "eval_diagonal_bound_large_i",
        large_ok,
        format!("|theta_i a(0)| < (1/2q) sqrt(D) for i=2..={k}"),
    ));

    // (d) off-diagonal chain at lambda = 0; b(0) is rational, so everything
    // here is a rational comparison. Vacuous for l < 2.
    let b0 = coeff_b(p, &Rational::zero());
    debug_assert!(b0.radical_coeff().is_zero());
    let b0_sq = b0.rational_part() * b0.rational_part();
    let mut dominated = true;
    let mut chain_end = true;
    let mut detail = String::from("vacuous (l < 2)");
    if l >= 2 {
        let t2_sq = theta(p, 2, k, l).expect("in range").square() * &b0_sq;
        for i in 2..=l {
            let ti_sq = theta(p, i, k, l).expect("in range").square() * &b0_sq;
            if ti_sq > t2_sq {
                dominated = false;
            }
        }
        chain_end = t2_sq < &d_rat / pow_q(q, 1) / Rational::from_integer(BigInt::from(4));
        detail = format!("(theta_i b(0))^2 <= (theta_2 b(0))^2 < D/(4q) for i=2..={l}");
    }
    items.push(CheckItem::new("offdiag_dominated_by_i2", dominated, detail.clone()));
    items.push(CheckItem::new("offdiag_chain_end", chain_end, detail));

    let pass = items.iter().all(|c| c.pass);
    StructureReport { lambda: lambda.clone(), items, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u64, n: i64, k: i64, l: i64) -> Parameters {
        Parameters::new(q, n, k, l).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn coeff_a_reduces_to_lambda_for_equal_levels() {
        for (q, n, k) in [(2u64, 4i64, 2i64), (2, 6, 3), (3, 6, 2), (5, 4, 2)] {
            let p = params(q, n, k, k);
            for lam in [rat(0, 1), rat(1, 8), rat(3, 7)] {
                let a = coeff_a(&p, &lam);
                assert_eq!(a.rational_part(), &lam);
                assert!(a.radical_coeff().is_zero());
            }
        }
    }

    #[test]
    fn coeff_a_frozen_value() {
        // q=2, n=6, k=3, l=2 at lambda = 0: a(0) = (1/1792) sqrt(4805).
        let p = params(2, 6, 3, 2);
        let a0 = coeff_a(&p, &Rational::zero());
        assert_eq!(a0.radicand(), &BigInt::from(4805));
        assert!(a0.rational_part().is_zero());
        assert_eq!(a0.radical_coeff(), &rat(1, 1792));
    }

    #[test]
    fn coeff_b_frozen_value() {
        // q=2, n=4, k=l=2 at lambda = 0: b(0) = -7/8.
        let p = params(2, 4, 2, 2);
        let b0 = coeff_b(&p, &Rational::zero());
        assert_eq!(b0.rational_part(), &rat(-7, 8));
        assert!(b0.radical_coeff().is_zero());
        // lambda decreases b: the radical coefficient is strictly negative.
        let b1 = coeff_b(&p, &rat(1, 8));
        assert!(b1.try_sub(&b0).unwrap().sign() < 0);
    }

    #[test]
    fn certify_smallest_instance() {
        // q=2, n=2, k=l=1: D = 1, S_0 forces lambda <= 1/4, so the halving
        // search lands exactly on 1/4 with bracket (1/4, 1/2).
        let p = params(2, 2, 1, 1);
        let cert = certify(&p).unwrap();
        assert_eq!(cert.verdict, Verdict::Feasible);
        assert_eq!(cert.bound, BigInt::one());
        assert_eq!(cert.coefficients.lambda, rat(1, 4));
        assert_eq!(cert.lambda_bracket, (rat(1, 4), rat(1, 2)));
        assert_eq!(cert.blocks.len(), 2);
        assert!(cert.scalars.is_empty());
        // Both blocks are identically singular here.
        for b in &cert.blocks {
            assert_eq!(b.det.sign(), 0);
        }
        assert!(cert.consistent());
    }

    #[test]
    fn certify_q2_n4_equal_levels() {
        // Hand-computed: p_0 = 7/2 - 16 lambda forces lambda <= 7/32; the
        // search accepts 1/8, where b = -1 exactly.
        let p = params(2, 4, 2, 2);
        let cert = certify(&p).unwrap();
        assert_eq!(cert.verdict, Verdict::Feasible);
        assert_eq!(cert.bound, BigInt::from(49));
        assert_eq!(cert.coefficients.lambda, rat(1, 8));
        assert_eq!(cert.lambda_bracket, (rat(1, 8), rat(1, 4)));
        // b is stored over radicand 49, so the rational value -1 appears as
        // -7/8 - (1/56) sqrt(49); compare by value, not representation.
        let b = &cert.coefficients.b_lambda;
        assert!(b.sub_rat(&rat(-1, 1)).is_zero_value());
        // S_1 is singular, S_2 strictly positive definite.
        assert_eq!(cert.blocks[1].det.sign(), 0);
        assert_eq!(cert.blocks[2].det.sign(), 1);
    }

    #[test]
    fn certify_q2_n6_mixed_levels() {
        // p_0 >= 0 forces lambda <= sqrt(4805)/1120 ~ 0.0619, so the search
        // stops at 1/32; one scalar condition exists at i = 3.
        let p = params(2, 6, 3, 2);
        let cert = certify(&p).unwrap();
        assert_eq!(cert.verdict, Verdict::Feasible);
        assert_eq!(cert.bound, BigInt::from(4805));
        assert_eq!(cert.coefficients.lambda, rat(1, 32));
        assert_eq!(cert.lambda_bracket, (rat(1, 32), rat(1, 16)));
        assert_eq!(cert.blocks.len(), 3);
        assert_eq!(cert.scalars.len(), 1);
        assert_eq!(cert.scalars[0].i, 3);
        assert!(cert.scalars[0].nonneg);
        assert!(cert.consistent());
        // det S_0 = det S_1 = 0, det S_2 > 0 at the accepted multiplier.
        assert_eq!(cert.blocks[0].det.sign(), 0);
        assert_eq!(cert.blocks[1].det.sign(), 0);
        assert_eq!(cert.blocks[2].det.sign(), 1);
    }

    #[test]
    fn certify_rejects_bad_parameters() {
        assert!(Parameters::new(2, 3, 2, 1).is_err());
        assert!(certify_at(&params(2, 4, 2, 2), &rat(-1, 2)).is_err());
    }

    #[test]
    fn explicit_multiplier_can_be_infeasible() {
        let p = params(2, 4, 2, 2);
        let cert = certify_at(&p, &rat(1, 1)).unwrap();
        assert_eq!(cert.verdict, Verdict::Infeasible);
        assert_eq!(cert.recheck(), Verdict::Infeasible);
        // 7/32 is the exact boundary for S_0; it is feasible (p_0 = 0).
        let boundary = certify_at(&p, &rat(7, 32)).unwrap();
        assert_eq!(boundary.verdict, Verdict::Feasible);
        let beyond = certify_at(&p, &rat(29, 128)).unwrap();
        assert_eq!(beyond.verdict, Verdict::Infeasible);
        // lambda = 0 fails the strict positivity requirement.
        let zero = certify_at(&p, &Rational::zero()).unwrap();
        assert_eq!(zero.verdict, Verdict::Infeasible);
    }

    #[test]
    fn refine_window_narrows_to_boundary() {
        let p = params(2, 4, 2, 2);
        let cert = certify(&p).unwrap();
        let (lo, hi) = refine_window(&p, &cert.lambda_bracket, 12);
        // The true boundary 7/32 lies inside every refined bracket.
        assert!(lo <= rat(7, 32) && rat(7, 32) <= hi);
        assert!(&hi - &lo <= rat(1, 8) / Rational::from_integer(BigInt::from(1 << 12)));
        assert!(feasible_at(&p, &lo));
        assert!(!feasible_at(&p, &hi) || hi == rat(7, 32));
    }

    #[test]
    fn psd_check_basic_cases() {
        let one = QuadraticNumber::rational(BigInt::from(5), rat(1, 1));
        let zero = QuadraticNumber::zero(BigInt::from(5));
        let two = QuadraticNumber::rational(BigInt::from(5), rat(2, 1));
        let id = ReducedBlock {
            i: 0,
            p: one.clone(),
            r: zero.clone(),
            s: one.clone(),
            det: one.clone(),
            psd: true,
        };
        assert!(psd_check_2x2(&id));
        let bad = ReducedBlock { i: 0, p: one.clone(), r: two, s: one, det: zero, psd: false };
        assert!(!psd_check_2x2(&bad));
    }

    #[test]
    fn structure_checks_pass_on_reference_instances() {
        for (q, n, k, l) in [(2u64, 6i64, 3i64, 2i64), (2, 4, 2, 2), (3, 6, 2, 2), (2, 8, 4, 3)] {
            let p = params(q, n, k, l);
            let lambda = certify(&p).unwrap().coefficients.lambda;
            for lam in [lambda, Rational::zero(), rat(1, 4)] {
                let report = structure_checks(&p, &lam);
                assert!(
                    report.pass,
                    "q={q} n={n} k={k} l={l} lambda={}: {:?}",
                    rat_to_string(&lam),
                    report.items.iter().filter(|c| !c.pass).collect::<Vec<_>>()
                );
            }
        }
    }

    #[test]
    fn structure_checks_det_s0_zero_at_quarter() {
        let p = params(2, 6, 3, 2);
        let report = structure_checks(&p, &rat(1, 4));
        let det0 = report.items.iter().find(|c| c.name == "det_s0_zero").unwrap();
        assert!(det0.pass);
    }

    #[test]
    fn document_round_trip_and_recheck() {
        let p = params(2, 6, 3, 2);
        let cert = certify(&p).unwrap();
        let doc = cert.to_document();
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: CertificateDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.recheck().unwrap(), Verdict::Feasible);
        assert_eq!(serde_json::to_string(&parsed).unwrap(), serde_json::to_string(&doc).unwrap());
        // Tamper with one block entry: the recheck must flip.
        let mut tampered = parsed.clone();
        tampered.blocks[2].s = tampered.blocks[2].s.neg();
        assert_eq!(tampered.recheck().unwrap(), Verdict::Infeasible);
    }

    #[test]
    fn bound_is_star_product() {
        for (q, n, k, l) in [(2u64, 4i64, 2i64, 2i64), (2, 6, 3, 2), (3, 6, 3, 1), (5, 4, 2, 1)] {
            let p = params(q, n, k, l);
            let cert = certify(&p).unwrap();
            let want = crate::exactnum::gauss_int(n - 1, k - 1, q).unwrap()
                * crate::exactnum::gauss_int(n - 1, l - 1, q).unwrap();
            assert_eq!(cert.bound, want);
            assert_eq!(cert.verdict, Verdict::Feasible);
        }
    }
}
