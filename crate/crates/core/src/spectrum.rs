//! Problem parameters and the association-scheme spectrum: eigenvalues of the
//! disjointness operators and their multiplicities.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{gauss_int, pow_q, rat_sign, rat_to_f64, rat_to_string, Rational};

/// Instance parameters (q, n, k, l), normalized so that k >= l.
///
/// Supported range: q >= 2, 1 <= l <= k, n >= 2k. A constructor call with
/// k < l swaps the two and records the swap; every downstream formula assumes
/// the normalized order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameters {
    q: u64,
    n: i64,
    k: i64,
    l: i64,
    swapped: bool,
    q_prime_power: bool,
}

/// True iff q = p^e for a prime p and e >= 1.
pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut m = q;
            while m.is_multiple_of(p) {
                m /= p;
            }
            return m == 1;
        }
        p += 1;
    }
    true
}

impl Parameters {
    pub fn new(q: u64, n: i64, k: i64, l: i64) -> Result<Self> {
        if q < 2 {
            return Err(Error::invalid(format!("q must be >= 2, got {q}")));
        }
        let (k, l, swapped) = if k >= l { (k, l, false) } else { (l, k, true) };
        if l < 1 {
            return Err(Error::invalid(format!("need k, l >= 1, got k={k}, l={l}")));
        }
        if n < 2 * k {
            return Err(Error::invalid(format!("need n >= 2 max(k,l), got n={n}, k={k}")));
        }
        Ok(Parameters { q, n, k, l, swapped, q_prime_power: is_prime_power(q) })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn q_prime_power(&self) -> bool {
        self.q_prime_power
    }

    pub fn floor_half_n(&self) -> i64 {
        self.n / 2
    }

    /// Radicand of the working field: the product of the two one-point-star
    /// counts. This integer is also the certified bound on |F||G|.
    pub fn radicand(&self) -> BigInt {
        let a = gauss_int(self.n - 1, self.k - 1, self.q).expect("validated q");
        let b = gauss_int(self.n - 1, self.l - 1, self.q).expect("validated q");
        a * b
    }

    /// The certified upper bound for |F||G|; equal to the radicand.
    pub fn bound(&self) -> BigInt {
        self.radicand()
    }

    pub fn multiplicities(&self) -> MultiplicityTable {
        multiplicities(self.q, self.n).expect("validated q")
    }
}

impl Serialize for Parameters {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Parameters", 4)?;
        s.serialize_field("q", &self.q)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("l", &self.l)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Parameters {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            q: u64,
            n: i64,
            k: i64,
            l: i64,
        }
        let r = Repr::deserialize(deserializer)?;
        Parameters::new(r.q, r.n, r.k, r.l).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalue theta_i^{k,l} of the disjointness operator, stored exactly as
/// rho * sqrt(num_rad / den_rad) with rho rational and integer radicals.
///
/// The half-integer power of q in the closed form is split so that rho always
/// carries the integer part and num_rad absorbs one leftover factor of q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theta {
    pub i: i64,
    pub k: i64,
    pub l: i64,
    rho: Rational,
    num_rad: BigInt,
    den_rad: BigInt,
}

/// theta_i^{k,l} for the scheme on l-spaces of F_q^n, evaluated at row k.
///
/// Requires 0 <= i <= n/2, i <= l <= n - i, and 0 <= k <= n. The value is
/// zero exactly when k < i or k > n - i (then rho = 0 and the radical part is
/// canonicalized to 1/1).
pub fn theta(p: &Parameters, i: i64, k: i64, l: i64) -> Result<Theta> {
    let (q, n) = (p.q(), p.n());
    if i < 0 || i > n / 2 {
        return Err(Error::invalid(format!("theta index i={i} outside 0..={}", n / 2)));
    }
    if l < i || l > n - i {
        return Err(Error::invalid(format!("theta level l={l} outside {i}..={}", n - i)));
    }
    if k < 0 || k > n {
        return Err(Error::invalid(format!("theta row k={k} outside 0..={n}")));
    }
    if k < i || k > n - i {
        return Ok(Theta {
            i,
            k,
            l,
            rho: Rational::zero(),
            num_rad: BigInt::one(),
            den_rad: BigInt::one(),
        });
    }
    let num_rad = gauss_int(n - 2 * i, k - i, q)?;
    let den_rad = gauss_int(n - 2 * i, l - i, q)?;
    debug_assert!(num_rad.is_positive() && den_rad.is_positive());
    // Exponent of q is binom(i,2) + k*l - i(k+l)/2; track twice that value.
    let e2 = i * (i - 1) + 2 * k * l - i * (k + l);
    debug_assert!(e2 >= 0);
    let mut rho = pow_q(q, e2 / 2)
        * Rational::from_integer(gauss_int(n - k - i, l - i, q)?);
    if i % 2 == 1 {
        rho = -rho;
    }
    let num_rad = if e2 % 2 == 1 { num_rad * BigInt::from(q) } else { num_rad };
    Ok(Theta { i, k, l, rho, num_rad, den_rad })
}

impl Theta {
    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn num_rad(&self) -> &BigInt {
        &self.num_rad
    }

    pub fn den_rad(&self) -> &BigInt {
        &self.den_rad
    }

    pub fn value_is_zero(&self) -> bool {
        self.rho.is_zero()
    }

    /// Sign of the value: the radical factor is positive, so this is rho's.
    pub fn signum(&self) -> i32 {
        rat_sign(&self.rho)
    }

    /// Exact square rho^2 * num_rad / den_rad.
    pub fn square(&self) -> Rational {
        &self.rho * &self.rho * Rational::new(self.num_rad.clone(), self.den_rad.clone())
    }

    /// Exact rational value when sqrt(num_rad / den_rad) is rational.
    pub fn rational_value(&self) -> Option<Rational> {
        if self.rho.is_zero() {
            return Some(Rational::zero());
        }
        if self.num_rad == self.den_rad {
            return Some(self.rho.clone());
        }
        let prod = &self.num_rad * &self.den_rad;
        let root = prod.sqrt();
        if &root * &root == prod {
            Some(&self.rho * Rational::new(root, self.den_rad.clone()))
        } else {
            None
        }
    }

    /// Exact equality of values (shared scheme assumed).
    pub fn value_eq(&self, other: &Theta) -> bool {
        self.signum() == other.signum() && self.square() == other.square()
    }

    pub fn to_f64(&self) -> f64 {
        let ratio = Rational::new(self.num_rad.clone(), self.den_rad.clone());
        rat_to_f64(&self.rho) * rat_to_f64(&ratio).sqrt()
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Theta", 3)?;
        s.serialize_field("rho", &rat_to_string(&self.rho))?;
        s.serialize_field("num_rad", &self.num_rad.to_string())?;
        s.serialize_field("den_rad", &self.den_rad.to_string())?;
        s.end()
    }
}

/// Eigenspace dimensions d_i = [n,i] - [n,i-1] for i = 0..=floor(n/2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityTable {
    q: u64,
    n: i64,
    d: Vec<BigInt>,
}

pub fn multiplicities(q: u64, n: i64) -> Result<MultiplicityTable> {
    if n < 0 {
        return Err(Error::invalid(format!("n must be >= 0, got {n}")));
    }
    let mut d = Vec::with_capacity((n / 2 + 1) as usize);
    for i in 0..=n / 2 {
        d.push(gauss_int(n, i, q)? - gauss_int(n, i - 1, q)?);
    }
    Ok(MultiplicityTable { q, n, d })
}

impl MultiplicityTable {
    pub fn get(&self, i: i64) -> &BigInt {
        &self.d[i as usize]
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigInt> {
        self.d.iter()
    }

    /// Sum of d_0..d_k, which telescopes to [n,k].
    pub fn sum_through(&self, k: i64) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..=k {
            acc += self.get(i);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::gauss;

    fn params(q: u64, n: i64, k: i64, l: i64) -> Parameters {
        Parameters::new(q, n, k, l).unwrap()
    }

    fn rational_theta(p: &Parameters, i: i64, k: i64, l: i64) -> Rational {
        theta(p, i, k, l).unwrap().rational_value().expect("rational eigenvalue")
    }

    #[test]
    fn parameter_normalization_and_validation() {
        let p = params(2, 6, 2, 3);
        assert_eq!((p.k(), p.l()), (3, 2));
        assert!(p.swapped());
        assert!(!params(2, 6, 3, 2).swapped());
        assert!(Parameters::new(1, 6, 3, 2).is_err());
        assert!(Parameters::new(2, 6, 3, 0).is_err());
        assert!(Parameters::new(2, 5, 3, 3).is_err());
        assert!(Parameters::new(2, 5, 2, 3).is_err()); // swaps to k=3, 5 < 6
        assert!(Parameters::new(6, 4, 1, 1).is_ok()); // non prime power allowed here
        assert!(!params(6, 4, 1, 1).q_prime_power());
        assert!(params(9, 4, 2, 1).q_prime_power());
    }

    #[test]
    fn prime_power_detection() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 97] {
            assert!(is_prime_power(q), "{q}");
        }
        for q in [0u64, 1, 6, 10, 12, 15, 100] {
            assert!(!is_prime_power(q), "{q}");
        }
    }

    #[test]
    fn radicand_matches_star_product() {
        let p = params(2, 6, 3, 2);
        // [5,2]_2 * [5,1]_2 = 155 * 31
        assert_eq!(p.radicand(), BigInt::from(155 * 31));
        assert_eq!(p.bound(), p.radicand());
        let p = params(2, 2, 1, 1);
        assert_eq!(p.radicand(), BigInt::one());
    }

    #[test]
    fn theta_known_values_q2_n4() {
        // Hand-evaluated from the closed form.
        let p = params(2, 4, 2, 2);
        for (i, k, l, want) in [
            (0, 2, 2, 16),
            (1, 2, 2, -4),
            (2, 2, 2, 2),
            (0, 1, 1, 14),
            (1, 1, 1, -1),
        ] {
            assert_eq!(
                rational_theta(&p, i, k, l),
                Rational::from_integer(BigInt::from(want)),
                "theta_{i}^{{{k},{l}}}"
            );
        }
    }

    #[test]
    fn theta_mixed_irrational_value() {
        // theta_0^{3,2} at q=2, n=6: rho = 448, radical = 1395/651, and the
        // square 448^2 * 15/7 = 430080.
        let p = params(2, 6, 3, 2);
        let t = theta(&p, 0, 3, 2).unwrap();
        assert_eq!(t.rho(), &Rational::from_integer(BigInt::from(448)));
        assert_eq!(t.num_rad(), &BigInt::from(1395));
        assert_eq!(t.den_rad(), &BigInt::from(651));
        assert_eq!(t.square(), Rational::from_integer(BigInt::from(430080)));
        assert!(t.rational_value().is_none());
        assert_eq!(t.signum(), 1);
        assert!((t.to_f64() - 430080f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn theta_zero_outside_band() {
        // Nonzero exactly for i <= k <= n - l: below i the harmonic space is
        // absent, above n - l every k-space meets every l-space.
        let p = params(3, 8, 3, 2);
        for k in 0..=8 {
            let t = theta(&p, 2, k, 3).unwrap();
            assert_eq!(t.value_is_zero(), !(2..=5).contains(&k), "k={k}");
        }
        for k in 0..=8 {
            let t = theta(&p, 0, k, 2).unwrap();
            assert_eq!(t.value_is_zero(), k > 6, "k={k}");
        }
    }

    #[test]
    fn theta_rejects_bad_indices() {
        let p = params(2, 6, 3, 2);
        assert!(theta(&p, 4, 3, 3).is_err()); // i > n/2
        assert!(theta(&p, 2, 3, 1).is_err()); // l < i
        assert!(theta(&p, 1, 3, 6).is_err()); // l > n - i
        assert!(theta(&p, 0, 7, 2).is_err()); // k > n
        assert!(theta(&p, 0, -1, 2).is_err());
    }

    #[test]
    fn theta_top_eigenvalue_is_degree() {
        // theta_0^{l,l} = q^{l^2} [n-l, l] counts l-spaces disjoint from one.
        let p = params(3, 6, 2, 2);
        let degree = pow_q(3, 4) * gauss(4, 2, 3).unwrap();
        assert_eq!(rational_theta(&p, 0, 2, 2), degree);
        assert_eq!(degree, Rational::from_integer(BigInt::from(81 * 130)));
        for i in 1..=2 {
            assert!(theta(&p, i, 0, 2).unwrap().value_is_zero());
        }
    }

    #[test]
    fn trace_vanishes() {
        // sum_i d_i theta_i^{k,k} = 0 for k >= 1 (disjointness has zero trace).
        for (q, n) in [(2u64, 4i64), (2, 6), (3, 6), (5, 4)] {
            let table = multiplicities(q, n).unwrap();
            for k in 1..=n / 2 {
                let p = Parameters::new(q, n, k, k).unwrap();
                let mut acc = Rational::zero();
                for i in 0..=k {
                    acc += Rational::from_integer(table.get(i).clone())
                        * rational_theta(&p, i, k, k);
                }
                assert!(acc.is_zero(), "q={q} n={n} k={k}");
            }
        }
    }

    #[test]
    fn multiplicity_sums_telescope() {
        for (q, n) in [(2u64, 4i64), (2, 6), (3, 5), (7, 4)] {
            let table = multiplicities(q, n).unwrap();
            for k in 0..=n / 2 {
                assert_eq!(table.sum_through(k), gauss_int(n, k, q).unwrap());
            }
        }
        let table = multiplicities(2, 4).unwrap();
        let want: Vec<BigInt> = [1, 14, 20].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(table.iter().cloned().collect::<Vec<_>>(), want);
    }

    #[test]
    fn eigenvalue_ratio_chain_below_one() {
        // (theta_{i+1}/theta_i)^2 < 1 for 2 <= i < l across the sweep range.
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for n in 4..=14i64 {
                for k in 2..=n / 2 {
                    for l in 2..=k {
                        let p = Parameters::new(q, n, k, l).unwrap();
                        for i in 2..l {
                            let lo = theta(&p, i, k, l).unwrap().square();
                            let hi = theta(&p, i + 1, k, l).unwrap().square();
                            assert!(hi < lo, "q={q} n={n} k={k} l={l} i={i}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parameters_serde_shape() {
        let p = params(2, 6, 2, 3);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"q":2,"n":6,"k":3,"l":2}"#);
        let back: Parameters = serde_json::from_str(r#"{"q":2,"n":6,"k":3,"l":2}"#).unwrap();
        assert_eq!(back.k(), 3);
        assert!(!back.swapped());
        assert!(serde_json::from_str::<Parameters>(r#"{"q":1,"n":6,"k":3,"l":2}"#).is_err());
    }

    #[test]
    fn theta_serde_shape() {
        let p = params(2, 6, 3, 2);
        let t = theta(&p, 0, 3, 2).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"rho":"448/1","num_rad":"1395","den_rad":"651"}"#
        );
    }
}
