//! Fixed-precision arithmetic in Z_p together with the combinatorial
//! primitives (differences, binomials, h-nomial coefficients) used by the
//! rest of the crate.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ord_big, pow_big};
use crate::error::{Error, Result};

/// Valuation reported for an exact zero.
pub const INFINITE_VALUATION: u32 = u32::MAX;

/// A p-adic integer known modulo `p^precision`.
///
/// The residue is always the canonical representative in `[0, p^precision)`.
/// `exact_zero` marks an element that is exactly zero rather than merely
/// divisible by `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    p: u64,
    residue: BigUint,
    precision: u32,
    exact_zero: bool,
}

impl PadicApprox {
    pub fn new(p: u64, residue: BigUint, precision: u32) -> Self {
        assert!(p >= 2, "p must be a prime");
        assert!(precision >= 1, "precision must be at least 1");
        let residue = residue % pow_big(p, precision);
        PadicApprox { p, residue, precision, exact_zero: false }
    }

    pub fn from_bigint(p: u64, value: &BigInt, precision: u32) -> Self {
        let m = BigInt::from(pow_big(p, precision));
        let r = value.mod_floor(&m);
        Self::new(p, r.to_biguint().expect("mod_floor is nonnegative"), precision)
    }

    pub fn from_i64(p: u64, value: i64, precision: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(value), precision)
    }

    pub fn from_u64(p: u64, value: u64, precision: u32) -> Self {
        Self::new(p, BigUint::from(value), precision)
    }

    /// Projects a rational with p-free denominator. Zero becomes an exact zero.
    pub fn from_ratio(p: u64, value: &BigRational, precision: u32) -> Result<Self> {
        if value.is_zero() {
            return Ok(Self::exact_zero(p, precision));
        }
        let den = value.denom();
        if (den % BigInt::from(p)).is_zero() {
            return Err(Error::NotPIntegral(format!("{value} at p = {p}")));
        }
        let m = BigInt::from(pow_big(p, precision));
        let inv = den.mod_floor(&m).modinv(&m).expect("denominator is a unit");
        Ok(Self::from_bigint(p, &(value.numer() * inv), precision))
    }

    pub fn exact_zero(p: u64, precision: u32) -> Self {
        let mut z = Self::new(p, BigUint::zero(), precision);
        z.exact_zero = true;
        z
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::new(p, BigUint::one(), precision)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    pub fn modulus(&self) -> BigUint {
        pow_big(self.p, self.precision)
    }

    /// `min(ord_p residue, precision)`, or [`INFINITE_VALUATION`] for an exact zero.
    pub fn valuation(&self) -> u32 {
        if self.exact_zero {
            return INFINITE_VALUATION;
        }
        ord_big(self.p, &self.residue).unwrap_or(self.precision)
    }

    pub fn is_unit(&self) -> bool {
        !self.exact_zero && !(&self.residue % self.p).is_zero()
    }

    /// True when the residue is zero (exactly or to full precision).
    pub fn vanishes(&self) -> bool {
        self.residue.is_zero()
    }

    /// The residue modulo p, as a digit.
    pub fn mod_p(&self) -> u64 {
        (&self.residue % self.p).to_u64().unwrap()
    }

    /// Reduces to a lower precision.
    pub fn reduce(&self, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::PrecisionExhausted("reduction to precision 0".into()));
        }
        if precision > self.precision && !self.exact_zero {
            return Err(Error::PrecisionExhausted(format!(
                "requested {precision} digits, only {} known",
                self.precision
            )));
        }
        if self.exact_zero {
            return Ok(Self::exact_zero(self.p, precision));
        }
        Ok(Self::new(self.p, self.residue.clone(), precision))
    }

    /// Like [`reduce`](Self::reduce) but never fails: caps at the known precision.
    pub fn truncate(&self, precision: u32) -> Self {
        self.reduce(precision.clamp(1, self.precision)).unwrap()
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        match (self.exact_zero, other.exact_zero) {
            (true, true) => Ok(Self::exact_zero(self.p, self.precision.min(other.precision))),
            (true, false) => Ok(other.clone()),
            (false, true) => Ok(self.clone()),
            _ => {
                let n = self.precision.min(other.precision);
                Ok(Self::new(self.p, &self.residue + &other.residue, n))
            }
        }
    }

    pub fn neg(&self) -> Self {
        if self.exact_zero || self.residue.is_zero() {
            return self.clone();
        }
        Self::new(self.p, self.modulus() - &self.residue, self.precision)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.exact_zero || other.exact_zero {
            return Ok(Self::exact_zero(self.p, self.precision.min(other.precision)));
        }
        let n = self.precision.min(other.precision);
        Ok(Self::new(self.p, &self.residue * &other.residue, n))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if self.exact_zero {
            return self.clone();
        }
        let v = BigInt::from(self.residue.clone()) * k;
        Self::from_bigint(self.p, &v, self.precision)
    }

    /// Multiplies by `p^k`; the result is known to `k` more digits.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        if self.exact_zero {
            return Self::exact_zero(self.p, self.precision + k);
        }
        Self::new(self.p, &self.residue * pow_big(self.p, k), self.precision + k)
    }

    /// Exact division by `p^k`.
    pub fn div_exact_p(&self, k: u32) -> Result<Self> {
        if self.exact_zero {
            return Ok(Self::exact_zero(self.p, self.precision.saturating_sub(k).max(1)));
        }
        if k == 0 {
            return Ok(self.clone());
        }
        if self.valuation() < k {
            return Err(Error::NotDivisible(format!("valuation {} < {k} at p = {}", self.valuation(), self.p)));
        }
        if self.precision <= k {
            return Err(Error::PrecisionExhausted(format!("dividing by p^{k} leaves no digits of {}", self.precision)));
        }
        Ok(Self::new(self.p, &self.residue / pow_big(self.p, k), self.precision - k))
    }

    pub fn invert_unit(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(format!("{self}")));
        }
        let m = self.modulus();
        let inv = self.residue.modinv(&m).expect("unit residue is invertible");
        Ok(Self::new(self.p, inv, self.precision))
    }

    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return Self::one(self.p, self.precision);
        }
        if self.exact_zero {
            return self.clone();
        }
        let m = self.modulus();
        Self::new(self.p, self.residue.modpow(&BigUint::from(e), &m), self.precision)
    }

    /// Splits off the valuation: returns `(v, u)` with `self = p^v u` and `u`
    /// a unit known to `precision - v` digits.
    pub fn unit_part(&self) -> Result<(u32, Self)> {
        let v = self.valuation();
        if v == INFINITE_VALUATION || v >= self.precision {
            return Err(Error::PrecisionExhausted("no unit part of a vanishing value".into()));
        }
        Ok((v, self.div_exact_p(v)?))
    }

    /// Congruence modulo `p^k`; `k` may not exceed either precision.
    pub fn eq_mod(&self, other: &Self, k: u32) -> bool {
        let m = pow_big(self.p, k);
        (&self.residue % &m) == (&other.residue % &m)
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.residue.clone())
    }

    /// Base-p digits of the residue, `precision` many.
    pub fn digits(&self) -> DigitExpansion {
        DigitExpansion::from_padic(self)
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact_zero {
            write!(f, "0 (exact)")
        } else {
            write!(f, "{} mod {}^{}", self.residue, self.p, self.precision)
        }
    }
}

/// The first `n` base-p digits `s_0, ..., s_{n-1}` of a p-adic integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitExpansion {
    pub p: u64,
    pub digits: Vec<u64>,
}

impl DigitExpansion {
    pub fn new(p: u64, digits: Vec<u64>) -> Self {
        assert!(digits.iter().all(|&d| d < p), "digit out of range");
        DigitExpansion { p, digits }
    }

    pub fn from_padic(x: &PadicApprox) -> Self {
        let mut digits = Vec::with_capacity(x.precision as usize);
        let mut r = x.residue.clone();
        let pb = BigUint::from(x.p);
        for _ in 0..x.precision {
            let (q, d) = r.div_rem(&pb);
            digits.push(d.to_u64().unwrap());
            r = q;
        }
        DigitExpansion { p: x.p, digits }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        self.digits.iter().rev().fold(BigUint::zero(), |acc, &d| acc * self.p + d)
    }

    pub fn to_padic(&self) -> PadicApprox {
        PadicApprox::new(self.p, self.value(), self.digits.len() as u32)
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: usize) -> DigitExpansion {
        DigitExpansion { p: self.p, digits: self.digits[..n.min(self.len())].to_vec() }
    }
}

impl fmt::Display for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// Base-p digit sum.
pub fn digit_sum(p: u64, mut n: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `ord_p(n!) = (n - S_p(n)) / (p - 1)`.
pub fn ord_factorial(p: u64, n: u64) -> u64 {
    (n - digit_sum(p, n)) / (p - 1)
}

/// Largest `j` with `p^j <= k`; zero for `k <= 1`.
pub fn floor_log(p: u64, k: u64) -> u32 {
    let mut j = 0;
    let mut pk = p as u128;
    while pk <= k as u128 {
        j += 1;
        pk *= p as u128;
    }
    j
}

/// `C(s, k) mod p^n` for an integer `s` (negative allowed).
///
/// The falling factorial is formed modulo `p^(n + ord_p k!)`, the p-part of
/// `k!` is divided out exactly and the unit part inverted.
pub fn binom_mod(s: &BigInt, k: u64, p: u64, n: u32) -> BigUint {
    if k == 0 {
        return BigUint::one() % pow_big(p, n);
    }
    let v = ord_factorial(p, k) as u32;
    let big_m = BigInt::from(pow_big(p, n + v));
    let s_red = s.mod_floor(&big_m);
    let mut num = BigInt::one();
    let mut unit = BigInt::one();
    let pb = BigInt::from(p);
    for i in 0..k {
        num = (num * (&s_red - BigInt::from(i))).mod_floor(&big_m);
        let mut j = BigInt::from(i + 1);
        while (&j % &pb).is_zero() {
            j /= &pb;
        }
        unit = (unit * j).mod_floor(&big_m);
    }
    let num = num.to_biguint().unwrap();
    let pv = pow_big(p, v);
    debug_assert!((&num % &pv).is_zero());
    let m = pow_big(p, n);
    let q = (num / pv) % &m;
    let u = unit.to_biguint().unwrap() % &m;
    let uinv = u.modinv(&m).expect("unit part of k! is invertible");
    (q * uinv) % m
}

/// `C(s, k)` as a p-adic integer, losing `floor(log_p k)` digits.
pub fn binom_padic(s: &PadicApprox, k: u64) -> Result<PadicApprox> {
    if k == 0 {
        return Ok(PadicApprox::one(s.p, s.precision));
    }
    if s.exact_zero {
        return Ok(PadicApprox::exact_zero(s.p, s.precision));
    }
    let j = floor_log(s.p, k);
    if s.precision <= j {
        return Err(Error::PrecisionExhausted(format!(
            "C(s,{k}) needs more than {j} digits of s, have {}",
            s.precision
        )));
    }
    let n = s.precision - j;
    Ok(PadicApprox::new(s.p, binom_mod(&s.to_bigint(), k, s.p, n), n))
}

/// `C(n, k) mod p` for `0 <= n, k < p` (zero when `k > n`).
pub fn small_binom_mod_p(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = crate::arith::mul_mod(num, (n - i) % p, p);
        den = crate::arith::mul_mod(den, (i + 1) % p, p);
    }
    crate::arith::mul_mod(num, crate::arith::inv_mod(den, p).unwrap(), p)
}

/// Lucas: `C(s, r) mod p` as the product of digit binomials. Digits of `s`
/// beyond the given ones are taken as zero.
pub fn lucas_binom_mod_p(s_digits: &[u64], mut r: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut i = 0;
    while r > 0 {
        let ri = r % p;
        let si = s_digits.get(i).copied().unwrap_or(0);
        acc = crate::arith::mul_mod(acc, small_binom_mod_p(si, ri, p), p);
        if acc == 0 {
            return 0;
        }
        r /= p;
        i += 1;
    }
    acc
}

/// `Σ_ν C(n,ν)(-1)^(n-ν) values[ν]`.
///
/// `values[i]` is the sample `f(s + i h)`, so the step `h` is fixed by the
/// caller when sampling.
pub fn forward_diff(values: &[PadicApprox], n: usize) -> Result<PadicApprox> {
    if values.len() < n + 1 {
        return Err(Error::InsufficientValues { needed: n + 1, got: values.len() });
    }
    let p = values[0].p;
    let mut acc = PadicApprox::exact_zero(p, values[0].precision);
    let mut c = BigInt::one();
    for (nu, v) in values[..=n].iter().enumerate() {
        // c = C(n, nu)
        let sign = if (n - nu) % 2 == 0 { 1 } else { -1 };
        let term = v.mul_int(&(&c * sign));
        acc = acc.add(&term)?;
        c = c * BigInt::from(n - nu) / BigInt::from(nu + 1);
    }
    Ok(acc)
}

/// Coefficient of `x^nu` in `(1 + x + ... + x^(h-1))^n`.
pub fn hnomial(n: u64, nu: u64, h: u64) -> BigUint {
    assert!(h >= 1);
    if nu > n * (h - 1) {
        return BigUint::zero();
    }
    let mut poly = vec![BigUint::one()];
    for _ in 0..n {
        let len = poly.len() + h as usize - 1;
        let mut next = vec![BigUint::zero(); len];
        // sliding window sum of width h
        let mut window = BigUint::zero();
        for (i, slot) in next.iter_mut().enumerate() {
            if i < poly.len() {
                window += &poly[i];
            }
            if i >= h as usize {
                window -= &poly[i - h as usize];
            }
            *slot = window.clone();
        }
        poly = next;
    }
    poly[nu as usize].clone()
}

/// Exponent of `p` in a nonzero rational (may be negative).
pub fn ord_rational(p: u64, x: &BigRational) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let n = ord_big(p, &x.numer().abs().to_biguint().unwrap()).unwrap() as i64;
    let d = ord_big(p, &x.denom().abs().to_biguint().unwrap()).unwrap() as i64;
    Some(n - d)
}

/// Exponent of `p` in a nonzero signed integer.
pub fn ord_bigint(p: u64, x: &BigInt) -> Option<u32> {
    match x.sign() {
        Sign::NoSign => None,
        _ => ord_big(p, x.magnitude()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pa(p: u64, r: u64, n: u32) -> PadicApprox {
        PadicApprox::from_u64(p, r, n)
    }

    // Extended Euclid on i128, independent of the library inverse.
    fn egcd_inverse(a: i128, m: i128) -> i128 {
        let (mut old_r, mut r) = (a, m);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        assert_eq!(old_r, 1);
        old_s.rem_euclid(m)
    }

    #[test]
    fn ring_operations() {
        let s = pa(5, 3, 4).add(&pa(5, 2, 4)).unwrap();
        assert_eq!(s.residue(), &BigUint::from(5u8));
        assert_eq!(s.valuation(), 1);
        let z = PadicApprox::exact_zero(7, 5);
        let prod = pa(7, 123, 3).mul(&z).unwrap();
        assert!(prod.is_exact_zero());
        assert_eq!(prod.valuation(), INFINITE_VALUATION);
        let m = pa(5, 7, 2).mul(&pa(5, 8, 4)).unwrap();
        assert_eq!((m.residue().clone(), m.precision()), (BigUint::from(6u8), 2));
        assert_eq!(pa(5, 1, 3).add(&pa(7, 1, 3)).unwrap_err(), Error::PrimeMismatch(5, 7));
        assert_eq!(pa(5, 0, 3).valuation(), 3);
    }

    #[test]
    fn exact_division() {
        let a = pa(5, 25, 4).div_exact_p(2).unwrap();
        assert_eq!((a.residue().clone(), a.precision()), (BigUint::one(), 2));
        assert!(PadicApprox::exact_zero(5, 3).div_exact_p(7).unwrap().is_exact_zero());
        let b = pa(5, 50, 4).div_exact_p(1).unwrap();
        assert_eq!((b.residue().clone(), b.precision()), (BigUint::from(10u8), 3));
        assert!(matches!(pa(5, 5, 4).div_exact_p(2), Err(Error::NotDivisible(_))));
        assert!(matches!(pa(5, 0, 2).div_exact_p(2), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn unit_inversion_examples() {
        assert_eq!(pa(5, 2, 2).invert_unit().unwrap().residue(), &BigUint::from(13u8));
        assert_eq!(pa(2, 3, 4).invert_unit().unwrap().residue(), &BigUint::from(11u8));
        assert_eq!(pa(11, 1, 6).invert_unit().unwrap().residue(), &BigUint::one());
        assert!(matches!(pa(5, 10, 3).invert_unit(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn ord_factorial_against_factorization() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut fact = BigUint::one();
            for n in 0..=200u64 {
                if n > 0 {
                    fact *= n;
                }
                assert_eq!(ord_factorial(p, n) as u32, ord_big(p, &fact).unwrap(), "p={p} n={n}");
            }
        }
        assert_eq!(ord_factorial(3, 9), 4);
        assert_eq!(ord_factorial(5, 0), 0);
        assert_eq!(ord_factorial(2, 4), 3);
    }

    #[test]
    fn binomial_basics() {
        let s = pa(7, 12345, 5);
        assert_eq!(binom_padic(&s, 0).unwrap().residue(), &BigUint::one());
        let minus_one = PadicApprox::from_i64(5, -1, 6);
        for k in 0..40u64 {
            let c = binom_padic(&minus_one, k).unwrap();
            assert_eq!(c.precision(), 6 - floor_log(5, k));
            let expect = PadicApprox::from_i64(5, if k % 2 == 0 { 1 } else { -1 }, c.precision());
            assert_eq!(c, expect, "k={k}");
        }
        // exact integer check against num's binomial
        for s in [0i64, 3, 17, 100, 1000] {
            for k in 0..12u64 {
                let exact = num_integer::binomial(BigInt::from(s), BigInt::from(k));
                let m = BigInt::from(pow_big(3, 6));
                assert_eq!(BigInt::from(binom_mod(&BigInt::from(s), k, 3, 6)), exact.mod_floor(&m));
            }
        }
        assert!(matches!(binom_padic(&pa(5, 1, 2), 25), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn hnomial_values() {
        assert_eq!(hnomial(2, 2, 3), BigUint::from(3u8));
        for n in 1..8u64 {
            for nu in 0..=n {
                assert_eq!(hnomial(n, nu, 2), num_integer::binomial(BigUint::from(n), BigUint::from(nu)));
            }
            for h in 1..6u64 {
                let total: BigUint = (0..=n * (h - 1)).map(|nu| hnomial(n, nu, h)).sum();
                assert_eq!(total, num_traits::pow(BigUint::from(h), n as usize));
            }
        }
        assert!(hnomial(2, 9, 3).is_zero());
    }

    #[test]
    fn theta_is_p_integral() {
        for p in [2u64, 3, 5] {
            for h in 1..=6u64 {
                let oh = crate::arith::ord_u64(p, h);
                for n in 1..=6u64 {
                    for k in 0..=6u64 {
                        let sum: BigUint = (0..=n * (h - 1))
                            .map(|nu| hnomial(n, nu, h) * num_integer::binomial(BigUint::from(nu), BigUint::from(k)))
                            .sum();
                        if sum.is_zero() {
                            continue;
                        }
                        let ord = k as u32 + ord_big(p, &sum).unwrap();
                        assert!(ord >= n as u32 * oh, "p={p} h={h} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn differences_lower_binomials() {
        let p = 7;
        for m in 0..6u64 {
            for n in 0..=m {
                for s in 0..5i64 {
                    let vals: Vec<_> = (0..=n as i64)
                        .map(|i| PadicApprox::new(p, binom_mod(&BigInt::from(s + i), m, p, 6), 6))
                        .collect();
                    let d = forward_diff(&vals, n as usize).unwrap();
                    let expect = binom_mod(&BigInt::from(s), m - n, p, 6);
                    assert_eq!(d.residue(), &expect);
                }
            }
        }
        let consts = vec![pa(5, 3, 4); 6];
        assert!(forward_diff(&consts, 3).unwrap().vanishes());
        let ident = vec![pa(5, 0, 4), pa(5, 1, 4)];
        assert_eq!(forward_diff(&ident, 1).unwrap().residue(), &BigUint::one());
        assert!(matches!(forward_diff(&ident, 2), Err(Error::InsufficientValues { .. })));
    }

    #[test]
    fn digits_round_trip() {
        let x = pa(37, 123_456_789, 6);
        let d = x.digits();
        assert_eq!(d.len(), 6);
        assert_eq!(d.to_padic(), x);
        assert_eq!(d.to_string().split(',').count(), 6);
    }

    #[test]
    fn rational_projection() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = PadicApprox::from_ratio(5, &third, 4).unwrap();
        assert_eq!(x.mul_int(&BigInt::from(3)).residue(), &BigUint::one());
        assert!(matches!(PadicApprox::from_ratio(3, &third, 4), Err(Error::NotPIntegral(_))));
        assert!(PadicApprox::from_ratio(3, &BigRational::zero(), 4).unwrap().is_exact_zero());
    }

    proptest! {
        #[test]
        fn inverse_is_inverse(p in prop::sample::select(vec![2u64, 3, 5, 7, 37, 1009]),
                              r in 1u64..1_000_000_000, n in 1u32..7) {
            let a = pa(p, r, n);
            prop_assume!(a.is_unit());
            let inv = a.invert_unit().unwrap();
            let prod = a.mul(&inv).unwrap();
            prop_assert_eq!(prod.residue(), &BigUint::one());
            let m = pow_big(p, n).to_u64().unwrap() as i128;
            let oracle = egcd_inverse((r as i128) % m, m);
            prop_assert_eq!(inv.residue().to_u64().unwrap() as i128, oracle);
        }

        #[test]
        fn lucas_matches_binomial(p in prop::sample::select(vec![3u64, 5, 13]),
                                  xi in 0u64..10_000_000, r in 0u64..3000) {
            let s = pa(p, xi, 8);
            let want = binom_padic(&s, r).unwrap().mod_p();
            let digits = s.digits().digits;
            prop_assert_eq!(lucas_binom_mod_p(&digits, r, p), want);
        }

        #[test]
        fn add_sub_round_trip(a in 0u64..1_000_000, b in 0u64..1_000_000, n in 1u32..6) {
            let x = pa(7, a, n);
            let y = pa(7, b, n + 2);
            let back = x.add(&y).unwrap().sub(&y).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
