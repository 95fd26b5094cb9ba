//! Exact scalars: rationals and cyclotomic field elements.
//!
//! A [`CycloScalar`] is an element of `Q(zeta_m)` stored as a rational
//! coefficient vector of length `phi(m)` over the power basis
//! `1, zeta, ..., zeta^(phi(m)-1)`, reduced modulo the m-th cyclotomic
//! polynomial. The order `m` is part of the value: arithmetic between
//! different orders is rejected rather than silently coerced, and
//! [`CycloScalar::embed`] performs the explicit field embedding
//! `Q(zeta_m) -> Q(zeta_n)` for `m | n` via `zeta_m = zeta_n^(n/m)`.
//!
//! Values are immutable and all operations are pure, so concurrent use
//! needs no external locking; the per-order reduction tables live behind
//! a small internal mutex.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
/// Always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Euler's totient, by trial-division factorization. Inputs here are tiny
/// (root-of-unity orders), so no sieve is warranted.
pub fn euler_phi(m: u64) -> u64 {
    assert!(m >= 1, "order must be positive");
    let mut n = m;
    let mut phi = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            phi = phi / p * (p - 1);
        }
        p += 1;
    }
    if n > 1 {
        phi = phi / n * (n - 1);
    }
    phi
}

fn divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for d in 1..=m {
        if m % d == 0 {
            out.push(d);
        }
    }
    out
}

fn big(i: i64) -> BigInt {
    BigInt::from(i)
}

/// Exact division of integer polynomials (ascending coefficients), used only
/// with monic divisors; panics if the division leaves a remainder, which
/// cannot happen for products of cyclotomic polynomials.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false), "divisor must be monic");
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(rem.len() >= den.len());
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            quot[k] = c.clone();
            for (i, dc) in den.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// The m-th cyclotomic polynomial as ascending integer coefficients
/// (degree `phi(m)`, monic), computed by exact division of `x^m - 1` by all
/// lower-order cyclotomic polynomials.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    let mut memo: HashMap<u64, Vec<BigInt>> = HashMap::new();
    for d in divisors(m) {
        // x^d - 1
        let mut poly = vec![BigInt::zero(); d as usize + 1];
        poly[0] = big(-1);
        poly[d as usize] = big(1);
        for e in divisors(d) {
            if e < d {
                let phi_e = memo[&e].clone();
                poly = int_poly_div_exact(&poly, &phi_e);
            }
        }
        memo.insert(d, poly);
    }
    memo.remove(&m).expect("memo contains m")
}

/// Precomputed reduction data for one order: the minimal polynomial and the
/// expansions of `zeta^k` in the power basis for every exponent that can
/// appear during multiplication or term reduction.
struct CycloTable {
    phi: usize,
    /// `zeta^k` in the power basis, for `k` up to `max(m-1, 2*phi-2)`.
    powers: Vec<Vec<Rational>>,
}

impl CycloTable {
    fn new(m: u64) -> CycloTable {
        let phi = euler_phi(m) as usize;
        let minpoly: Vec<Rational> = cyclotomic_polynomial(m)
            .into_iter()
            .map(|c| Rational::from_integer(c))
            .collect();
        let max_pow = usize::max(m as usize - 1, 2 * phi.max(1) - 2);
        let mut powers: Vec<Vec<Rational>> = Vec::with_capacity(max_pow + 1);
        let mut row = vec![Rational::zero(); phi];
        row[0] = Rational::one();
        powers.push(row.clone());
        for _ in 1..=max_pow {
            // Multiply by zeta: shift up, then fold zeta^phi = -(lower part
            // of the monic minimal polynomial) back into the basis.
            let overflow = row[phi - 1].clone();
            for i in (1..phi).rev() {
                row[i] = row[i - 1].clone();
            }
            row[0] = Rational::zero();
            if !overflow.is_zero() {
                for i in 0..phi {
                    row[i] -= &overflow * &minpoly[i];
                }
            }
            powers.push(row.clone());
        }
        CycloTable { phi, powers }
    }
}

static TABLES: Lazy<Mutex<HashMap<u64, Arc<CycloTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn table(m: u64) -> Arc<CycloTable> {
    let mut map = TABLES.lock().expect("cyclotomic table lock");
    map.entry(m).or_insert_with(|| Arc::new(CycloTable::new(m))).clone()
}

/// An element of the cyclotomic field `Q(zeta_m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CycloScalar {
    fn with_coeffs(order: u64, coeffs: Vec<Rational>) -> CycloScalar {
        debug_assert_eq!(coeffs.len() as u64, euler_phi(order));
        CycloScalar { order, coeffs }
    }

    pub fn zero(order: u64) -> CycloScalar {
        let phi = euler_phi(order) as usize;
        CycloScalar::with_coeffs(order, vec![Rational::zero(); phi])
    }

    pub fn one(order: u64) -> CycloScalar {
        let mut s = CycloScalar::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn from_rational(order: u64, value: Rational) -> CycloScalar {
        let mut s = CycloScalar::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn from_integer(order: u64, value: i64) -> CycloScalar {
        CycloScalar::from_rational(order, Rational::from_integer(BigInt::from(value)))
    }

    /// `zeta_m^k`, with any integer exponent (reduced modulo `m`).
    pub fn root_power(order: u64, k: i64) -> CycloScalar {
        let e = k.rem_euclid(order as i64) as usize;
        let t = table(order);
        CycloScalar::with_coeffs(order, t.powers[e].clone())
    }

    /// Reduce a finite sum `sum_i c_i * zeta^(e_i)` with arbitrary integer
    /// exponents into the canonical power-basis representation.
    pub fn reduce_terms(order: u64, terms: &[(i64, Rational)]) -> CycloScalar {
        let t = table(order);
        let mut coeffs = vec![Rational::zero(); t.phi];
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let k = e.rem_euclid(order as i64) as usize;
            for i in 0..t.phi {
                if !t.powers[k][i].is_zero() {
                    coeffs[i] += c * &t.powers[k][i];
                }
            }
        }
        CycloScalar::with_coeffs(order, coeffs)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in the prime field.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_order(&self, other: &CycloScalar) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        Ok(())
    }

    pub fn add(&self, other: &CycloScalar) -> Result<CycloScalar> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycloScalar::with_coeffs(self.order, coeffs))
    }

    pub fn sub(&self, other: &CycloScalar) -> Result<CycloScalar> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycloScalar::with_coeffs(self.order, coeffs))
    }

    pub fn neg(&self) -> CycloScalar {
        CycloScalar::with_coeffs(self.order, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &CycloScalar) -> Result<CycloScalar> {
        self.check_order(other)?;
        let t = table(self.order);
        let phi = t.phi;
        // Convolution product, degree <= 2*phi - 2.
        let mut prod = vec![Rational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut coeffs: Vec<Rational> = prod[..phi].to_vec();
        for (k, c) in prod.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for i in 0..phi {
                if !t.powers[k][i].is_zero() {
                    coeffs[i] += c * &t.powers[k][i];
                }
            }
        }
        Ok(CycloScalar::with_coeffs(self.order, coeffs))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`
    /// against the minimal polynomial, which is coprime to any nonzero
    /// residue of smaller degree.
    pub fn inv(&self) -> Result<CycloScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi = self.coeffs.len();
        let mut minpoly: Vec<Rational> = cyclotomic_polynomial(self.order)
            .into_iter()
            .map(Rational::from_integer)
            .collect();
        poly_trim(&mut minpoly);
        let mut a = self.coeffs.clone();
        poly_trim(&mut a);

        // Invariants: r0 = u0*a (mod minpoly), r1 = u1*a (mod minpoly).
        let mut r0 = minpoly;
        let mut r1 = a;
        let mut u0: Vec<Rational> = vec![];
        let mut u1: Vec<Rational> = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let u = poly_sub(&u0, &poly_mul(&q, &u1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u;
        }
        // r0 is a nonzero constant multiple of gcd = 1.
        debug_assert_eq!(r0.len(), 1, "residue coprime to the minimal polynomial");
        let scale = r0[0].recip();
        let mut inv_coeffs = vec![Rational::zero(); phi];
        for (i, c) in u0.iter().enumerate() {
            // deg u0 < deg minpoly = phi, so this is already reduced.
            inv_coeffs[i] = c * &scale;
        }
        Ok(CycloScalar::with_coeffs(self.order, inv_coeffs))
    }

    pub fn div(&self, other: &CycloScalar) -> Result<CycloScalar> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, exp: i64) -> Result<CycloScalar> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = CycloScalar::one(self.order);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Embed into `Q(zeta_n)` for a multiple `n` of the current order,
    /// sending `zeta_m` to `zeta_n^(n/m)`.
    pub fn embed(&self, target_order: u64) -> Result<CycloScalar> {
        if target_order % self.order != 0 {
            return Err(Error::OrderMismatch { left: self.order, right: target_order });
        }
        if target_order == self.order {
            return Ok(self.clone());
        }
        let step = (target_order / self.order) as i64;
        let terms: Vec<(i64, Rational)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 * step, c.clone()))
            .collect();
        Ok(CycloScalar::reduce_terms(target_order, &terms))
    }
}

fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(&mut out);
    out
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Division with remainder in `Q[x]`; `den` must be nonzero.
fn poly_divmod(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    assert!(!den.is_empty(), "division by the zero polynomial");
    let mut rem = num.to_vec();
    if rem.len() < den.len() {
        return (vec![], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - den.len() + 1];
    let lead = den.last().expect("nonzero divisor").clone();
    for k in (0..quot.len()).rev() {
        let c = &rem[k + den.len() - 1] / &lead;
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (i, dc) in den.iter().enumerate() {
            let t = &c * dc;
            rem[k + i] -= t;
        }
    }
    poly_trim(&mut rem);
    poly_trim(&mut quot);
    (quot, rem)
}

impl fmt::Display for CycloScalar {
    /// Canonical text form: descending powers of `z` (a fixed primitive
    /// m-th root of unity), e.g. `-z^2 + 1/2`. Deterministic for identical
    /// values, used verbatim in reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_part = if mag.is_one() && i > 0 { None } else { Some(mag.to_string()) };
            match (coeff_part, i) {
                (None, 1) => write!(f, "z")?,
                (None, _) => write!(f, "z^{i}")?,
                (Some(cs), 0) => write!(f, "{cs}")?,
                (Some(cs), 1) => write!(f, "{cs}*z")?,
                (Some(cs), _) => write!(f, "{cs}*z^{i}")?,
            }
        }
        Ok(())
    }
}
