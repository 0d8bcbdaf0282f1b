//! Exact coefficient arithmetic: Laurent polynomials and rational functions
//! in `v = q^{1/L}` with rational coefficients, plus q-combinatorics.
//!
//! Every structure constant of the algebras in this crate lives in the field
//! represented by [`Scalar`]. Values are kept in a reduced canonical form so
//! that equality is plain structural equality. The formal parameter `q` is
//! treated as real, so conjugation is the identity map.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exponent map of a Laurent polynomial in `v`; absent keys are zero.
pub type Coeffs = BTreeMap<i64, BigRational>;

/// Global exponent used by [`Scalar::eval_exact`]: evaluation points are taken
/// as `q = t^M` so that `v = q^{1/L} = t^{M/L}` stays rational for every root
/// order `L` dividing `M`.
pub const EVAL_ROOT: i64 = 120;

#[derive(Debug, Clone, PartialEq)]
pub enum ExactqError {
    DivisionByZero,
    PoleAtSample(f64),
    BadQCombInput { m: i64, n: i64 },
    RootMismatch { wanted: i64, got: i64 },
}

impl fmt::Display for ExactqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactqError::DivisionByZero => write!(f, "division by zero"),
            ExactqError::PoleAtSample(q0) => write!(f, "pole at q0 = {q0}"),
            ExactqError::BadQCombInput { m, n } => {
                write!(f, "invalid q-combinatorial input (m = {m}, n = {n})")
            }
            ExactqError::RootMismatch { wanted, got } => {
                write!(f, "root order {got} does not divide {wanted}")
            }
        }
    }
}

impl std::error::Error for ExactqError {}

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// Laurent-polynomial helpers on raw coefficient maps
// ---------------------------------------------------------------------------

fn poly_is_zero(p: &Coeffs) -> bool {
    p.is_empty()
}

fn poly_insert(p: &mut Coeffs, e: i64, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(e).or_insert_with(BigRational::zero);
    *entry += c;
    if entry.is_zero() {
        p.remove(&e);
    }
}

fn poly_add(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut out = a.clone();
    for (e, c) in b {
        poly_insert(&mut out, *e, c.clone());
    }
    out
}

fn poly_neg(a: &Coeffs) -> Coeffs {
    a.iter().map(|(e, c)| (*e, -c.clone())).collect()
}

fn poly_mul(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut out = Coeffs::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            poly_insert(&mut out, ea + eb, ca * cb);
        }
    }
    out
}

fn poly_shift(a: &Coeffs, k: i64) -> Coeffs {
    a.iter().map(|(e, c)| (e + k, c.clone())).collect()
}

fn poly_scale(a: &Coeffs, s: &BigRational) -> Coeffs {
    if s.is_zero() {
        return Coeffs::new();
    }
    a.iter().map(|(e, c)| (*e, c * s)).collect()
}

fn poly_min_exp(a: &Coeffs) -> i64 {
    *a.keys().next().expect("nonzero polynomial")
}

fn poly_max_exp(a: &Coeffs) -> i64 {
    *a.keys().next_back().expect("nonzero polynomial")
}

/// Division with remainder for honest polynomials (min exponent >= 0).
fn poly_divrem(a: &Coeffs, b: &Coeffs) -> (Coeffs, Coeffs) {
    assert!(!poly_is_zero(b));
    let db = poly_max_exp(b);
    let lb = b[&db].clone();
    let mut rem = a.clone();
    let mut quo = Coeffs::new();
    while !poly_is_zero(&rem) && poly_max_exp(&rem) >= db {
        let dr = poly_max_exp(&rem);
        let c = &rem[&dr] / &lb;
        poly_insert(&mut quo, dr - db, c.clone());
        let sub = poly_scale(&poly_shift(b, dr - db), &c);
        rem = poly_add(&rem, &poly_neg(&sub));
    }
    (quo, rem)
}

fn poly_monic(a: &Coeffs) -> Coeffs {
    if poly_is_zero(a) {
        return a.clone();
    }
    let lead = a[&poly_max_exp(a)].clone();
    poly_scale(a, &lead.recip())
}

/// Monic gcd of two honest polynomials over the rationals.
fn poly_gcd(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut x = poly_monic(a);
    let mut y = poly_monic(b);
    while !poly_is_zero(&y) {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = poly_monic(&r);
    }
    x
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    num_integer::gcd(a.abs(), b.abs())
}

fn lcm_i64(a: i64, b: i64) -> i64 {
    num_integer::lcm(a.abs(), b.abs())
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// A reduced rational function in `v = q^{1/root}` over the rationals.
///
/// Invariants of the canonical form: the denominator is a nonzero polynomial
/// with nonzero constant term and leading coefficient 1, numerator and
/// denominator share no common factor, and `root` is minimal (the gcd of all
/// exponents with the root order is 1). Zero is stored as `0/1` with root 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    num: Coeffs,
    den: Coeffs,
    root: i64,
}

impl Scalar {
    fn make(num: Coeffs, den: Coeffs, root: i64) -> Scalar {
        assert!(root >= 1, "root order must be positive");
        assert!(!poly_is_zero(&den), "denominator must be nonzero");
        if poly_is_zero(&num) {
            return Scalar {
                num: Coeffs::new(),
                den: [(0, BigRational::one())].into_iter().collect(),
                root: 1,
            };
        }
        // Pull v^k factors out so the denominator has constant term.
        let dshift = poly_min_exp(&den);
        let mut num = poly_shift(&num, -dshift);
        let mut den = poly_shift(&den, -dshift);
        let nshift = poly_min_exp(&num);
        let npoly = poly_shift(&num, -nshift);
        let g = poly_gcd(&npoly, &den);
        if poly_max_exp(&g) > 0 {
            let (nq, nr) = poly_divrem(&npoly, &g);
            let (dq, dr) = poly_divrem(&den, &g);
            debug_assert!(poly_is_zero(&nr) && poly_is_zero(&dr));
            num = poly_shift(&nq, nshift);
            den = dq;
        }
        let lead = den[&poly_max_exp(&den)].clone();
        num = poly_scale(&num, &lead.recip());
        den = poly_scale(&den, &lead.recip());
        // v^k may still be common after gcd removal (den constant term fixed,
        // but num may have been shifted); den now has min exp 0 by
        // construction unless gcd removed it -- restore.
        let dmin = poly_min_exp(&den);
        if dmin != 0 {
            num = poly_shift(&num, -dmin);
            den = poly_shift(&den, -dmin);
        }
        // Minimise the root order.
        let mut g = root;
        for e in num.keys().chain(den.keys()) {
            g = gcd_i64(g, *e);
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            num = num.iter().map(|(e, c)| (e / g, c.clone())).collect();
            den = den.iter().map(|(e, c)| (e / g, c.clone())).collect();
        }
        Scalar {
            num,
            den,
            root: root / g.max(1),
        }
    }

    pub fn zero() -> Scalar {
        Scalar::make(Coeffs::new(), [(0, BigRational::one())].into_iter().collect(), 1)
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rat(rat(n))
    }

    pub fn from_rat(r: BigRational) -> Scalar {
        let mut num = Coeffs::new();
        poly_insert(&mut num, 0, r);
        Scalar::make(num, [(0, BigRational::one())].into_iter().collect(), 1)
    }

    /// `q^e` for a rational exponent `e = p/s`.
    pub fn q_pow(p: i64, s: i64) -> Scalar {
        assert!(s != 0);
        let (p, s) = if s < 0 { (-p, -s) } else { (p, s) };
        let g = gcd_i64(p, s).max(1);
        let (p, s) = (p / g, s / g);
        let num: Coeffs = [(p, BigRational::one())].into_iter().collect();
        Scalar::make(num, [(0, BigRational::one())].into_iter().collect(), s)
    }

    /// `q^e` for an exact rational exponent.
    pub fn q_pow_rat(e: &BigRational) -> Scalar {
        use num_traits::ToPrimitive;
        let p = e.numer().to_i64().expect("exponent numerator fits i64");
        let s = e.denom().to_i64().expect("exponent denominator fits i64");
        Scalar::q_pow(p, s)
    }

    pub fn is_zero(&self) -> bool {
        poly_is_zero(&self.num)
    }

    pub fn is_one(&self) -> bool {
        self == &Scalar::one()
    }

    /// True when the reduced denominator is 1, i.e. the value is a Laurent
    /// polynomial in `v`.
    pub fn is_laurent(&self) -> bool {
        self.den.len() == 1 && self.den.contains_key(&0) && self.den[&0].is_one()
    }

    pub fn root_order(&self) -> i64 {
        self.root
    }

    fn with_root(&self, root: i64) -> Result<(Coeffs, Coeffs), ExactqError> {
        if root % self.root != 0 {
            return Err(ExactqError::RootMismatch {
                wanted: root,
                got: self.root,
            });
        }
        let k = root / self.root;
        Ok((
            self.num.iter().map(|(e, c)| (e * k, c.clone())).collect(),
            self.den.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        ))
    }

    pub fn inverse(&self) -> Result<Scalar, ExactqError> {
        if self.is_zero() {
            return Err(ExactqError::DivisionByZero);
        }
        Ok(Scalar::make(self.den.clone(), self.num.clone(), self.root))
    }

    pub fn pow(&self, n: i64) -> Scalar {
        if n == 0 {
            return Scalar::one();
        }
        let base = if n < 0 {
            self.inverse().expect("nonzero base for negative power")
        } else {
            self.clone()
        };
        let mut out = Scalar::one();
        for _ in 0..n.abs() {
            out = &out * &base;
        }
        out
    }

    /// Formal conjugation; the identity since `q` is a real parameter.
    pub fn conj(&self) -> Scalar {
        self.clone()
    }

    /// Floating-point evaluation at `v = q0^{1/root}` for `q0` in `(0,1)`.
    pub fn specialize(&self, q0: f64) -> Result<f64, ExactqError> {
        assert!(q0 > 0.0 && q0 < 1.0, "q0 must lie in (0,1)");
        let v0 = q0.powf(1.0 / self.root as f64);
        let eval = |p: &Coeffs| -> f64 {
            use num_traits::ToPrimitive;
            p.iter()
                .map(|(e, c)| c.to_f64().unwrap() * v0.powi(*e as i32))
                .sum()
        };
        let d = eval(&self.den);
        if d.abs() < 1e-300 {
            return Err(ExactqError::PoleAtSample(q0));
        }
        Ok(eval(&self.num) / d)
    }

    /// Evaluation over `GF(p)` at `q = t^EVAL_ROOT` (so `v = t^{EVAL_ROOT/root}`
    /// stays in the prime field). Returns `None` when a denominator vanishes
    /// mod `p`; a full-rank result at any such sample certifies symbolic rank.
    pub fn eval_mod(&self, t: u64, p: u64) -> Option<u64> {
        assert!(EVAL_ROOT % self.root == 0);
        let v0 = pow_mod(t % p, (EVAL_ROOT / self.root) as u64, p);
        if v0 == 0 {
            return None;
        }
        let vinv = pow_mod(v0, p - 2, p);
        let eval = |poly: &Coeffs| -> Option<u64> {
            let mut acc: u64 = 0;
            for (e, c) in poly {
                let cm = rat_mod(c, p)?;
                let base = if *e >= 0 { v0 } else { vinv };
                let pw = pow_mod(base, e.unsigned_abs(), p);
                acc = (acc + mul_mod(cm, pw, p)) % p;
            }
            Some(acc)
        };
        let d = eval(&self.den)?;
        if d == 0 {
            return None;
        }
        Some(mul_mod(eval(&self.num)?, pow_mod(d, p - 2, p), p))
    }

    /// Exact rational evaluation at `q = t^EVAL_ROOT`, so `v = t^{EVAL_ROOT/root}`.
    /// Returns `None` at a pole.
    pub fn eval_exact(&self, t: &BigRational) -> Option<BigRational> {
        assert!(EVAL_ROOT % self.root == 0);
        let k = (EVAL_ROOT / self.root) as i32;
        let eval = |p: &Coeffs| -> BigRational {
            let mut acc = BigRational::zero();
            for (e, c) in p {
                let pw = t.pow(k * (*e as i32));
                acc += c * pw;
            }
            acc
        };
        let d = eval(&self.den);
        if d.is_zero() {
            return None;
        }
        Some(eval(&self.num) / d)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let root = lcm_i64(self.root, rhs.root);
        let (n1, d1) = self.with_root(root).unwrap();
        let (n2, d2) = rhs.with_root(root).unwrap();
        Scalar::make(
            poly_add(&poly_mul(&n1, &d2), &poly_mul(&n2, &d1)),
            poly_mul(&d1, &d2),
            root,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: poly_neg(&self.num),
            den: self.den.clone(),
            root: self.root,
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let root = lcm_i64(self.root, rhs.root);
        let (n1, d1) = self.with_root(root).unwrap();
        let (n2, d2) = rhs.with_root(root).unwrap();
        Scalar::make(poly_mul(&n1, &n2), poly_mul(&d1, &d2), root)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inverse().expect("division by zero scalar")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let fmt_poly = |p: &Coeffs| -> String {
            let mut parts = Vec::new();
            for (e, c) in p.iter().rev() {
                let mono = if *e == 0 {
                    String::new()
                } else if *e % self.root == 0 {
                    let k = e / self.root;
                    if k == 1 {
                        "q".to_string()
                    } else {
                        format!("q^{k}")
                    }
                } else {
                    format!("q^({}/{})", e, self.root)
                };
                let part = if mono.is_empty() {
                    format!("{c}")
                } else if c.is_one() {
                    mono
                } else if (-c).is_one() {
                    format!("-{mono}")
                } else {
                    format!("{c}*{mono}")
                };
                parts.push(part);
            }
            parts.join(" + ").replace("+ -", "- ")
        };
        if self.is_laurent() {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({}) / ({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

// ---------------------------------------------------------------------------
// q-combinatorics
// ---------------------------------------------------------------------------

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// A rational number mod a prime `p`; `None` when `p` divides the denominator.
pub fn rat_mod(c: &BigRational, p: u64) -> Option<u64> {
    use num_traits::ToPrimitive;
    let pb = BigInt::from(p);
    let n = ((c.numer() % &pb) + &pb) % &pb;
    let d = ((c.denom() % &pb) + &pb) % &pb;
    let d = d.to_u64().unwrap();
    if d == 0 {
        return None;
    }
    Some(mul_mod(n.to_u64().unwrap(), pow_mod(d, p - 2, p), p))
}

/// The balanced q-integer `[n]_{q_d} = (q_d^n - q_d^{-n})/(q_d - q_d^{-1})`
/// with `q_d = q^d`.
pub fn qint(n: i64, d: i64) -> Scalar {
    assert!(d >= 1);
    if n == 0 {
        return Scalar::zero();
    }
    let num: Coeffs = {
        let mut p = Coeffs::new();
        poly_insert(&mut p, d * n, BigRational::one());
        poly_insert(&mut p, -d * n, -BigRational::one());
        p
    };
    let den: Coeffs = {
        let mut p = Coeffs::new();
        poly_insert(&mut p, d, BigRational::one());
        poly_insert(&mut p, -d, -BigRational::one());
        p
    };
    Scalar::make(num, den, 1)
}

/// `[n]_{q_d}!`
pub fn qfact(n: i64, d: i64) -> Result<Scalar, ExactqError> {
    if n < 0 {
        return Err(ExactqError::BadQCombInput { m: n, n });
    }
    let mut out = Scalar::one();
    for k in 1..=n {
        out = &out * &qint(k, d);
    }
    Ok(out)
}

/// The q-binomial coefficient `[m choose n]_{q_d}`; always a Laurent polynomial.
pub fn qbinom(m: i64, n: i64, d: i64) -> Result<Scalar, ExactqError> {
    if n < 0 || m < 0 || n > m {
        return Err(ExactqError::BadQCombInput { m, n });
    }
    let out = &(&qfact(m, d)? / &qfact(n, d)?) / &qfact(m - n, d)?;
    debug_assert!(out.is_laurent());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::q_pow(1, 1)
    }

    #[test]
    fn qint_basics() {
        assert_eq!(qint(0, 1), Scalar::zero());
        // [2]_q = q + q^{-1}
        let expect = &q() + &q().pow(-1);
        assert_eq!(qint(2, 1), expect);
        // antisymmetry
        assert_eq!(qint(-3, 2), -&qint(3, 2));
    }

    #[test]
    fn qint_3_2_by_long_division() {
        // independent oracle: expand (q^6 - q^{-6})/(q^2 - q^{-2}) as the
        // geometric sum q^4 + 1 + q^{-4}
        let expect = &(&Scalar::q_pow(4, 1) + &Scalar::one()) + &Scalar::q_pow(-4, 1);
        assert_eq!(qint(3, 2), expect);
    }

    #[test]
    fn qbinom_values() {
        assert_eq!(qbinom(5, 0, 1).unwrap(), Scalar::one());
        assert_eq!(qbinom(2, 1, 1).unwrap(), qint(2, 1));
        // [4 choose 2]_q = q^4 + q^2 + 2 + q^{-2} + q^{-4}
        let mut expect = Scalar::from_int(2);
        for e in [4i64, 2, -2, -4] {
            expect = &expect + &Scalar::q_pow(e, 1);
        }
        assert_eq!(qbinom(4, 2, 1).unwrap(), expect);
        assert!(qbinom(2, 3, 1).is_err());
        assert!(qbinom(-1, 0, 1).is_err());
    }

    #[test]
    fn qbinom_symmetry() {
        for m in 0..=8i64 {
            for n in 0..=m {
                for d in 1..=3 {
                    assert_eq!(qbinom(m, n, d).unwrap(), qbinom(m, m - n, d).unwrap());
                    assert!(qbinom(m, n, d).unwrap().is_laurent());
                }
            }
        }
    }

    #[test]
    fn specialize_values() {
        assert!((Scalar::one().specialize(0.5).unwrap() - 1.0).abs() < 1e-12);
        let x = &q() + &q().pow(-1);
        assert!((x.specialize(0.5).unwrap() - 2.5).abs() < 1e-12);
        // sum the five monomials of [4 choose 2]_q at q = 0.5
        let b = qbinom(4, 2, 1).unwrap();
        assert!((b.specialize(0.5).unwrap() - 22.3125).abs() < 1e-12);
    }

    #[test]
    fn specialize_detects_pole() {
        // 1/(q - q^{-1}) has no pole in (0,1); 1/(2q - 1) has one at 1/2
        let den = &(&Scalar::from_int(2) * &q()) - &Scalar::one();
        let x = den.inverse().unwrap();
        assert!(matches!(x.specialize(0.5), Err(ExactqError::PoleAtSample(_))));
    }

    #[test]
    fn root_unification() {
        // q^{1/2} * q^{1/2} = q
        let h = Scalar::q_pow(1, 2);
        assert_eq!(&h * &h, q());
        assert_eq!((&h * &h).root_order(), 1);
        // q^{1/2} + q^{1/3} keeps root 6
        let t = Scalar::q_pow(1, 3);
        assert_eq!((&h + &t).root_order(), 6);
    }

    #[test]
    fn field_inverse_roundtrip() {
        let x = &(&q() + &Scalar::from_int(3)) / &(&q().pow(-2) - &Scalar::from_int(1));
        assert_eq!(&x * &x.inverse().unwrap(), Scalar::one());
    }

    #[test]
    fn eval_exact_matches_float() {
        let x = &qint(3, 2) + &Scalar::q_pow(1, 2).inverse().unwrap();
        let t = BigRational::new(BigInt::from(9999), BigInt::from(10000));
        let exact = x.eval_exact(&t).unwrap();
        use num_traits::ToPrimitive;
        let q0 = t.to_f64().unwrap().powi(EVAL_ROOT as i32);
        let approx = x.specialize(q0).unwrap();
        assert!((exact.to_f64().unwrap() - approx).abs() < 1e-6);
    }
}
