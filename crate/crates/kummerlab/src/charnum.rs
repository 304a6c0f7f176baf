//! Quadratic characters, Bernoulli and Euler numbers, generalized Bernoulli
//! numbers, and power sums, with an exact and a congruence backend.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{ord_u64, pow_big, pow_mod};
use crate::error::{Error, Result};
use crate::padic::{floor_log, PadicApprox};

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut t: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            t = -t;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            t = -t;
        }
    }
    // Jacobi symbol for odd positive n
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

fn is_squarefree(mut m: u64) -> bool {
    let mut d = 2u64;
    while d * d <= m {
        if m % (d * d) == 0 {
            return false;
        }
        if m % d == 0 {
            m /= d;
        }
        d += 1;
    }
    true
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A real primitive Dirichlet character: principal (`D = 1`) or `χ_D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadChar {
    d: i64,
}

impl QuadChar {
    pub fn principal() -> Self {
        QuadChar { d: 1 }
    }

    pub fn new(d: i64) -> Result<Self> {
        if !is_fundamental_discriminant(d) {
            return Err(Error::UnsupportedCase(format!("{d} is not a fundamental discriminant")));
        }
        Ok(QuadChar { d })
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    pub fn is_principal(&self) -> bool {
        self.d == 1
    }

    pub fn conductor(&self) -> u64 {
        self.d.unsigned_abs()
    }

    /// δ_χ: 0 for even characters, 1 for odd ones.
    pub fn parity(&self) -> u64 {
        u64::from(self.d < 0)
    }

    pub fn eval(&self, a: i64) -> i8 {
        if self.d == 1 {
            1
        } else {
            kronecker(self.d, a)
        }
    }

    pub fn eval_u(&self, a: u64) -> i8 {
        if self.d == 1 {
            1
        } else {
            kronecker(self.d, (a % self.conductor()) as i64)
        }
    }
}

impl fmt::Display for QuadChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_principal() {
            f.write_str("principal")
        } else {
            write!(f, "D={}", self.d)
        }
    }
}

impl FromStr for QuadChar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("principal") || s == "1" || s == "D=1" {
            return Ok(QuadChar::principal());
        }
        let body = s.strip_prefix("D=").unwrap_or(s);
        let d: i64 = body.parse().map_err(|_| Error::UnsupportedCase(format!("cannot parse character `{s}`")))?;
        QuadChar::new(d)
    }
}

/// Zigzag numbers `A_n` (tangent numbers at odd n, secant numbers at even
/// n), extended one boustrophedon row at a time.
struct ZigZag {
    row: Vec<BigInt>,
    values: Vec<BigInt>,
}

impl ZigZag {
    fn extend_to(&mut self, n: usize) {
        while self.values.len() <= n {
            let k = self.row.len();
            let mut next = Vec::with_capacity(k + 1);
            next.push(BigInt::zero());
            for i in 0..k {
                let v = &next[i] + &self.row[k - 1 - i];
                next.push(v);
            }
            self.values.push(next[k].clone());
            self.row = next;
        }
    }
}

fn zigzag(n: usize) -> BigInt {
    static Z: OnceLock<Mutex<ZigZag>> = OnceLock::new();
    let z = Z.get_or_init(|| Mutex::new(ZigZag { row: vec![BigInt::one()], values: vec![BigInt::one()] }));
    let mut g = z.lock().unwrap();
    g.extend_to(n);
    g.values[n].clone()
}

fn bernoulli_memo() -> &'static Mutex<BTreeMap<u64, BigRational>> {
    static M: OnceLock<Mutex<BTreeMap<u64, BigRational>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// `B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: u64) -> BigRational {
    match n {
        0 => return BigRational::one(),
        1 => return BigRational::new((-1).into(), 2.into()),
        _ if n % 2 == 1 => return BigRational::zero(),
        _ => {}
    }
    if let Some(b) = bernoulli_memo().lock().unwrap().get(&n) {
        return b.clone();
    }
    // B_{2k} = (-1)^(k-1) 2k A_{2k-1} / (4^k (4^k - 1))
    let k = n / 2;
    let t = zigzag(n as usize - 1);
    let four_k = BigInt::one() << (2 * k as usize);
    let mut num = t * BigInt::from(n);
    if k % 2 == 0 {
        num = -num;
    }
    let den = &four_k * (&four_k - BigInt::one());
    let b = BigRational::new(num, den);
    bernoulli_memo().lock().unwrap().insert(n, b.clone());
    b
}

/// Euler numbers `E_n` (`E_0 = 1`, zero at odd n).
pub fn euler(n: u64) -> BigInt {
    if n % 2 == 1 {
        return BigInt::zero();
    }
    let a = zigzag(n as usize);
    if (n / 2) % 2 == 1 {
        -a
    } else {
        a
    }
}

/// Writes every memoized Bernoulli number as `n num/den` under a `BCACHE1`
/// header.
pub fn save_bernoulli_cache(path: &Path) -> std::io::Result<()> {
    let memo = bernoulli_memo().lock().unwrap();
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "BCACHE1")?;
    for (n, b) in memo.iter() {
        writeln!(out, "{n} {}/{}", b.numer(), b.denom())?;
    }
    out.flush()
}

/// Loads a cache written by [`save_bernoulli_cache`]; returns the number of
/// entries read. A missing file is not an error.
pub fn load_bernoulli_cache(path: &Path) -> std::io::Result<usize> {
    let file = match std::fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(e),
    };
    let bad = |msg: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string());
    let mut lines = std::io::BufReader::new(file).lines();
    if lines.next().transpose()?.as_deref() != Some("BCACHE1") {
        return Err(bad("missing BCACHE1 header"));
    }
    let mut memo = bernoulli_memo().lock().unwrap();
    let mut count = 0;
    for line in lines {
        let line = line?;
        let (n, frac) = line.split_once(' ').ok_or_else(|| bad(&line))?;
        let (num, den) = frac.split_once('/').ok_or_else(|| bad(&line))?;
        let n: u64 = n.parse().map_err(|_| bad(&line))?;
        let num: BigInt = num.parse().map_err(|_| bad(&line))?;
        let den: BigInt = den.parse().map_err(|_| bad(&line))?;
        if den.is_zero() || n % 2 == 1 {
            return Err(bad(&line));
        }
        memo.insert(n, BigRational::new(num, den));
        count += 1;
    }
    Ok(count)
}

fn gen_memo() -> &'static Mutex<HashMap<(i64, u64), BigRational>> {
    static M: OnceLock<Mutex<HashMap<(i64, u64), BigRational>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Generalized Bernoulli number `B_{n,χ}`.
pub fn gen_bernoulli(n: u64, chi: QuadChar) -> Result<BigRational> {
    if n == 0 {
        return Ok(if chi.is_principal() { BigRational::one() } else { BigRational::zero() });
    }
    if chi.is_principal() {
        if n == 1 {
            return Err(Error::UnsupportedCase("B_{1,χ} for the principal character".into()));
        }
        return Ok(bernoulli(n));
    }
    if n % 2 != chi.parity() % 2 {
        return Ok(BigRational::zero());
    }
    if let Some(b) = gen_memo().lock().unwrap().get(&(chi.d, n)) {
        return Ok(b.clone());
    }
    // f B_{n,χ} = Σ_k C(n,k) B_k f^k S_{n-k,χ}(f), summed over the common
    // denominator of B_0..B_n to avoid a gcd per term
    let f = chi.conductor();
    let sums = chi_power_sums(chi, f, n);
    let bs: Vec<(u64, BigRational)> = (0..=n).filter(|&k| k <= 1 || k % 2 == 0).map(|k| (k, bernoulli(k))).collect();
    let den = bs.iter().fold(BigInt::one(), |acc, (_, b)| acc.lcm(b.denom()));
    let mut acc = BigInt::zero();
    let mut binom = BigInt::one();
    let mut fk = BigInt::one();
    let mut next = bs.iter().peekable();
    for k in 0..=n {
        if let Some((_, b)) = next.next_if(|(j, _)| *j == k) {
            let scaled = b.numer() * (&den / b.denom());
            acc += scaled * &binom * &fk * &sums[(n - k) as usize];
        }
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
        fk *= BigInt::from(f);
    }
    let b = BigRational::new(acc, den * BigInt::from(f));
    gen_memo().lock().unwrap().insert((chi.d, n), b.clone());
    Ok(b)
}

/// `S_{j,χ}(m) = Σ_{a=1}^{m} χ(a) a^j` for `j = 0..=n`.
fn chi_power_sums(chi: QuadChar, m: u64, n: u64) -> Vec<BigInt> {
    let terms: Vec<(i8, u64)> = (1..=m).map(|a| (chi.eval_u(a), a)).filter(|t| t.0 != 0).collect();
    let mut powers: Vec<BigInt> = terms.iter().map(|_| BigInt::one()).collect();
    let mut out = Vec::with_capacity(n as usize + 1);
    for _ in 0..=n {
        let mut s = BigInt::zero();
        for (pw, (c, a)) in powers.iter_mut().zip(&terms) {
            if *c > 0 {
                s += &*pw;
            } else {
                s -= &*pw;
            }
            *pw *= BigInt::from(*a);
        }
        out.push(s);
    }
    out
}

/// `S_n(m) = 1^n + ... + (m-1)^n`.
pub fn power_sum(n: u64, m: u64) -> BigInt {
    (1..m).map(|a| num_traits::pow(BigInt::from(a), n as usize)).sum()
}

/// `S_{n,χ}(m) = Σ_{a=1}^{m} χ(a) a^n`.
pub fn power_sum_chi(n: u64, chi: QuadChar, m: u64) -> BigInt {
    power_sum_chi_filtered(n, chi, m, None)
}

/// `S*_{n,χ}(m)`: as [`power_sum_chi`] but skipping multiples of `p`.
pub fn power_sum_chi_restricted(n: u64, chi: QuadChar, m: u64, p: u64) -> BigInt {
    power_sum_chi_filtered(n, chi, m, Some(p))
}

fn power_sum_chi_filtered(n: u64, chi: QuadChar, m: u64, skip: Option<u64>) -> BigInt {
    let mut acc = BigInt::zero();
    for a in 1..=m {
        if skip.is_some_and(|p| a % p == 0) {
            continue;
        }
        let c = chi.eval_u(a);
        if c == 0 {
            continue;
        }
        let t = num_traits::pow(BigInt::from(a), n as usize);
        if c > 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// `Σ χ(a) a^n mod p^prec` over `1 ≤ a ≤ m`, optionally skipping `p | a`.
pub fn power_sum_chi_mod(n: u64, chi: QuadChar, m: u64, restrict: bool, p: u64, prec: u32) -> BigUint {
    let modulus = pow_big(p, prec);
    if let Some(md) = modulus.to_u64() {
        let mut acc = 0u64;
        for a in 1..=m {
            if restrict && a % p == 0 {
                continue;
            }
            let c = chi.eval_u(a);
            if c == 0 {
                continue;
            }
            let t = pow_mod(a, n, md);
            acc = if c > 0 { (acc + t) % md } else { (acc + md - t) % md };
        }
        return BigUint::from(acc);
    }
    let e = BigUint::from(n);
    let mut acc = BigInt::zero();
    for a in 1..=m {
        if restrict && a % p == 0 {
            continue;
        }
        let c = chi.eval_u(a);
        if c == 0 {
            continue;
        }
        let t = BigInt::from(BigUint::from(a).modpow(&e, &modulus));
        if c > 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc.mod_floor(&BigInt::from(modulus)).to_biguint().unwrap()
}

/// Which method produces Bernoulli numbers modulo prime powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    PowerSum,
    Auto,
}

/// Largest index computed exactly by default.
pub const EXACT_SMALL: u64 = 512;
/// Hard ceiling of the exact backend.
pub const EXACT_MAX: u64 = 2000;
/// Largest precision the power-sum recursion is used for.
pub const POWER_SUM_MAX_PRECISION: u32 = 16;

fn euler_factor(chi: QuadChar, p: u64, n: u64) -> BigRational {
    let c = chi.eval_u(p) as i64;
    if n == 0 {
        return BigRational::one() - BigRational::new(BigInt::from(c), BigInt::from(p));
    }
    BigRational::from_integer(BigInt::one() - BigInt::from(c) * num_traits::pow(BigInt::from(p), n as usize - 1))
}

/// `β_n = (1 - χ(p) p^(n-1)) B_{n,χ}` as an exact rational.
pub fn removed_bernoulli(n: u64, chi: QuadChar, p: u64) -> Result<BigRational> {
    if n == 1 && chi.is_principal() {
        // the Euler factor vanishes, so the ambiguity of B_1 is irrelevant
        return Ok(BigRational::zero());
    }
    Ok(euler_factor(chi, p, n) * gen_bernoulli(n, chi)?)
}

fn pick_backend(n: u64, prec: u32, backend: Backend) -> Result<Backend> {
    match backend {
        Backend::Auto => {
            if n <= EXACT_SMALL {
                Ok(Backend::Exact)
            } else if prec <= POWER_SUM_MAX_PRECISION {
                Ok(Backend::PowerSum)
            } else if n <= EXACT_MAX {
                Ok(Backend::Exact)
            } else {
                Err(Error::BackendOutOfRange(format!("index {n} at precision {prec} exceeds both backends")))
            }
        }
        Backend::PowerSum if prec > POWER_SUM_MAX_PRECISION => {
            Err(Error::BackendOutOfRange(format!("power sums are limited to precision {POWER_SUM_MAX_PRECISION}")))
        }
        other => Ok(other),
    }
}

/// `β_n mod p^prec` with the requested backend.
pub fn removed_bernoulli_mod(n: u64, chi: QuadChar, p: u64, prec: u32, backend: Backend) -> Result<PadicApprox> {
    if chi.conductor() % p == 0 {
        return Err(Error::UnsupportedCase(format!("p = {p} divides the conductor")));
    }
    match pick_backend(n, prec, backend)? {
        Backend::Exact => {
            let b = removed_bernoulli(n, chi, p)?;
            if b.is_zero() {
                return Ok(PadicApprox::exact_zero(p, prec));
            }
            PadicApprox::from_ratio(p, &b, prec)
        }
        _ => {
            let r = beta_by_power_sums(n, chi, p, prec)?;
            Ok(PadicApprox::from_bigint(p, &r, prec))
        }
    }
}

/// Below this index the recursion falls back to exact rationals.
const RECURSION_FLOOR: u64 = 64;

fn beta_by_power_sums(n: u64, chi: QuadChar, p: u64, prec: u32) -> Result<BigInt> {
    let mut memo = HashMap::new();
    if !chi.is_principal() {
        return beta_power_sum(n, chi, p, prec, &mut memo);
    }
    let scaled = beta_power_sum(n, chi, p, prec + 1, &mut memo)?;
    let (q, r) = scaled.div_rem(&BigInt::from(p));
    if !r.is_zero() {
        return Err(Error::NotPIntegral(format!("B_{n} at p = {p}")));
    }
    Ok(q)
}

/// `p^σ β_n mod p^prec`, where `σ = 1` for the principal character (so that
/// every index is p-integral) and `σ = 0` otherwise. Uses
/// `S*_n(m)/m = Σ_{j ≥ 0} C(n,j)/(j+1) m^j β_{n-j}` with `m = p f_χ`.
fn beta_power_sum(n: u64, chi: QuadChar, p: u64, prec: u32, memo: &mut HashMap<(u64, u32), BigInt>) -> Result<BigInt> {
    if prec == 0 {
        return Ok(BigInt::zero());
    }
    if let Some(v) = memo.get(&(n, prec)) {
        return Ok(v.clone());
    }
    let principal = chi.is_principal();
    let modulus = BigInt::from(pow_big(p, prec));
    if n <= RECURSION_FLOOR.max(2 * prec as u64 + 4) {
        let mut b = removed_bernoulli(n, chi, p)?;
        if principal {
            b *= BigRational::from_integer(BigInt::from(p));
        }
        let v = if b.is_zero() { BigInt::zero() } else { PadicApprox::from_ratio(p, &b, prec)?.to_bigint() };
        memo.insert((n, prec), v.clone());
        return Ok(v);
    }
    let f = chi.conductor();
    let mut acc = if principal {
        BigInt::from(power_sum_chi_mod(n, chi, p, true, p, prec))
    } else {
        let s = power_sum_chi_mod(n, chi, p * f, true, p, prec + 1);
        let (q, r) = s.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return Err(Error::RelationViolated("restricted power sum not divisible by p".into()));
        }
        BigInt::from(q) * BigInt::from(f).modinv(&modulus).unwrap()
    };
    let mut j = 2u64;
    while j < n && j - floor_log(p, j + 1) as u64 <= prec as u64 {
        let e = ord_u64(p, j + 1);
        let drop = j as u32 - e;
        if drop < prec {
            let sub = beta_power_sum(n - j, chi, p, prec - drop, memo)?;
            let unit = BigInt::from((j + 1) / p.pow(e));
            let coeff = num_integer::binomial(BigInt::from(n), BigInt::from(j))
                * BigInt::from(pow_big(p, drop))
                * num_traits::pow(BigInt::from(f), j as usize)
                * unit.modinv(&modulus).unwrap();
            acc -= coeff * sub;
        }
        j += 2;
    }
    if principal {
        // j = n: p β_0 m^n / (n+1) with β_0 = 1 - 1/p
        let e = ord_u64(p, n + 1);
        let v = n - e as u64;
        if v < prec as u64 {
            let unit = BigInt::from((n + 1) / p.pow(e));
            acc -= BigInt::from(p - 1) * BigInt::from(pow_big(p, v as u32)) * unit.modinv(&modulus).unwrap();
        }
    } else if n % 2 == 1 && (n - 1) - floor_log(p, n) as u64 <= prec as u64 {
        // j = n - 1 reaches β_1, which the loop above stops short of
        let j = n - 1;
        let e = ord_u64(p, j + 1);
        let drop = j as u32 - e;
        if drop < prec {
            let b1 = removed_bernoulli(1, chi, p)?;
            let b1 = PadicApprox::from_ratio(p, &b1, prec - drop)?.to_bigint();
            let unit = BigInt::from((j + 1) / p.pow(e));
            acc -= BigInt::from(n)
                * BigInt::from(pow_big(p, drop))
                * num_traits::pow(BigInt::from(f), j as usize)
                * unit.modinv(&modulus).unwrap()
                * b1;
        }
    }
    let v = acc.mod_floor(&modulus);
    memo.insert((n, prec), v.clone());
    Ok(v)
}

/// `B_{n,χ} mod p^prec`.
pub fn gen_bernoulli_mod(n: u64, chi: QuadChar, p: u64, prec: u32, backend: Backend) -> Result<PadicApprox> {
    if n >= 2 || (n == 1 && !chi.is_principal() && chi.eval_u(p) != 1) {
        let beta = removed_bernoulli_mod(n, chi, p, prec, backend)?;
        let factor = euler_factor(chi, p, n);
        let factor = PadicApprox::from_ratio(p, &factor, prec)?;
        return beta.mul(&factor.invert_unit()?);
    }
    let b = gen_bernoulli(n, chi)?;
    PadicApprox::from_ratio(p, &b, prec)
}

/// Modular Euler number `E_n mod p^prec` via `E_n = -2 B_{n+1,χ_{-4}}/(n+1)`.
pub fn euler_mod(n: u64, p: u64, prec: u32, backend: Backend) -> Result<PadicApprox> {
    if p == 2 {
        return Err(Error::UnsupportedCase("p = 2 divides the conductor of χ_{-4}".into()));
    }
    if n % 2 == 1 {
        return Ok(PadicApprox::exact_zero(p, prec));
    }
    let chi = QuadChar::new(-4)?;
    let extra = ord_u64(p, n + 1);
    let b = gen_bernoulli_mod(n + 1, chi, p, prec + extra, backend)?;
    let q = b.div_exact_p(extra)?;
    let unit = PadicApprox::from_u64(p, (n + 1) / p.pow(extra), prec);
    Ok(q.mul(&unit.invert_unit()?)?.mul_int(&BigInt::from(-2)))
}

/// Renders a rational as `num/den`, or just `num` for integers.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Absolute value helper for report code.
pub fn abs_rational(x: &BigRational) -> BigRational {
    BigRational::new(x.numer().abs(), x.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, primes_in};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bernoulli_by_recurrence(nmax: usize) -> Vec<BigRational> {
        let mut b = vec![BigRational::one()];
        for m in 1..=nmax {
            let mut s = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                s += bk * BigRational::from_integer(num_integer::binomial(BigInt::from(m + 1), BigInt::from(k)));
            }
            b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-4, 6), 0);
        assert_eq!(kronecker(12, 9), 0);
        for p in primes_in(3, 500) {
            assert_eq!(kronecker(-4, p as i64) == 1, p % 4 == 1, "p={p}");
            for d in [-3i64, 5, 8, -7, 13] {
                if (d.unsigned_abs()) % p == 0 {
                    continue;
                }
                let euler = pow_mod(d.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let want = if euler == 1 { 1 } else { -1 };
                if d % 4 == 0 || d.rem_euclid(4) == 1 {
                    assert_eq!(kronecker(d, p as i64), want, "d={d} p={p}");
                }
            }
        }
        // χ_D is multiplicative in n and periodic mod |D| for fundamental D
        for d in [-3i64, -4, 5, 8, -8, 12, 77, -23] {
            let f = d.abs();
            for a in 1..60i64 {
                assert_eq!(kronecker(d, a), kronecker(d, a + f));
                for b in 1..20i64 {
                    assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b));
                }
            }
            assert_eq!(QuadChar::new(d).unwrap().eval(-1), if d > 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn characters_parse_and_validate() {
        assert!(QuadChar::new(-4).is_ok());
        assert!(QuadChar::new(12).is_ok());
        assert!(QuadChar::new(3).is_err());
        assert!(QuadChar::new(-8).is_ok());
        assert!(QuadChar::new(20).is_err());
        let c: QuadChar = "D=-3".parse().unwrap();
        assert_eq!((c.conductor(), c.parity()), (3, 1));
        assert_eq!("principal".parse::<QuadChar>().unwrap(), QuadChar::principal());
        assert_eq!(c.to_string(), "D=-3");
    }

    #[test]
    fn bernoulli_matches_recurrence() {
        let oracle = bernoulli_by_recurrence(80);
        for (n, b) in oracle.iter().enumerate() {
            assert_eq!(&bernoulli(n as u64), b, "B_{n}");
        }
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn von_staudt_clausen() {
        for n in (2..=200u64).step_by(2) {
            let mut s = bernoulli(n);
            let mut den = BigInt::one();
            for p in primes_in(2, n + 1) {
                if n % (p - 1) == 0 {
                    s += rat(1, p as i64);
                    den *= BigInt::from(p);
                }
            }
            assert!(s.is_integer(), "n={n}");
            if n <= 100 {
                assert_eq!(bernoulli(n).denom(), &den);
            }
        }
    }

    #[test]
    fn euler_numbers() {
        // Σ_k C(2m, 2k) E_{2k} = 0 for m ≥ 1
        let mut e = vec![BigInt::one()];
        for m in 1..=30usize {
            let mut s = BigInt::zero();
            for (k, ek) in e.iter().enumerate() {
                s += num_integer::binomial(BigInt::from(2 * m), BigInt::from(2 * k)) * ek;
            }
            e.push(-s);
        }
        for (k, v) in e.iter().enumerate() {
            assert_eq!(&euler(2 * k as u64), v);
            assert!(euler(2 * k as u64 + 1).is_zero());
        }
        assert_eq!(euler(8), BigInt::from(1385));
        let chi = QuadChar::new(-4).unwrap();
        for n in 0..=20u64 {
            let via = rat(-2, 1) * gen_bernoulli(n + 1, chi).unwrap() / rat(n as i64 + 1, 1);
            assert_eq!(via, BigRational::from_integer(euler(n)), "n={n}");
        }
    }

    #[test]
    fn euler_numbers_mod_prime_powers() {
        // E_n ≡ 0 (p ≡ 1 mod 4) or 2 (p ≡ 3 mod 4) mod p^r when φ(p^r) | n
        for p in [3u64, 5, 7, 11, 13] {
            for r in 1..=2u32 {
                let phi = (p - 1) * p.pow(r - 1);
                let mut n = phi;
                while n <= 160 {
                    if n % 2 == 0 {
                        let e = PadicApprox::from_bigint(p, &euler(n), r);
                        let want = if p % 4 == 1 { 0 } else { 2 };
                        assert_eq!(e, PadicApprox::from_u64(p, want, r), "p={p} r={r} n={n}");
                    }
                    n += phi;
                }
            }
        }
    }

    #[test]
    fn generalized_bernoulli_basics() {
        let chi4 = QuadChar::new(-4).unwrap();
        assert_eq!(gen_bernoulli(1, chi4).unwrap(), rat(-1, 2));
        assert_eq!(gen_bernoulli(2, chi4).unwrap(), BigRational::zero());
        assert!(gen_bernoulli(1, QuadChar::principal()).is_err());
        for n in 2..30 {
            assert_eq!(gen_bernoulli(n, QuadChar::principal()).unwrap(), bernoulli(n));
        }
        // direct definition through Bernoulli polynomials
        for d in [5i64, -3, 8, -7] {
            let chi = QuadChar::new(d).unwrap();
            let f = chi.conductor() as i64;
            for n in 1..12u64 {
                let mut s = BigRational::zero();
                for a in 1..=f {
                    let x = rat(a, f);
                    let mut poly = BigRational::zero();
                    for k in 0..=n {
                        let c = num_integer::binomial(BigInt::from(n), BigInt::from(k));
                        poly +=
                            BigRational::from_integer(c) * bernoulli(k) * num_traits::pow(x.clone(), (n - k) as usize);
                    }
                    s += poly * rat(chi.eval(a) as i64, 1);
                }
                let want = s * num_traits::pow(rat(f, 1), n as usize - 1);
                assert_eq!(gen_bernoulli(n, chi).unwrap(), want, "D={d} n={n}");
            }
        }
    }

    #[test]
    fn kummer_1851() {
        for p in [5u64, 7, 11] {
            for n in (2..40u64).step_by(2) {
                if n % (p - 1) == 0 {
                    continue;
                }
                for r in 1..=4u32 {
                    if n <= r as u64 {
                        continue;
                    }
                    let mut s = BigRational::zero();
                    for nu in 0..=r {
                        let m = n + nu as u64 * (p - 1);
                        let c = num_integer::binomial(BigInt::from(r), BigInt::from(nu));
                        let sign = if (r - nu) % 2 == 0 { 1 } else { -1 };
                        s += BigRational::from_integer(c * sign) * bernoulli(m) / rat(m as i64, 1);
                    }
                    let v = PadicApprox::from_ratio(p, &s, r).unwrap();
                    assert!(v.vanishes(), "p={p} n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn power_sum_identities() {
        for m in 1..30u64 {
            assert_eq!(power_sum(1, m), BigInt::from(m * (m - 1) / 2));
        }
        let chi = QuadChar::new(5).unwrap();
        for p in [3u64, 7, 11] {
            for n in [2u64, 4, 7, 10] {
                let m = 15 * p;
                let lhs = power_sum_chi_restricted(n, chi, m, p);
                let rhs = power_sum_chi(n, chi, m)
                    - BigInt::from(chi.eval_u(p))
                        * num_traits::pow(BigInt::from(p), n as usize)
                        * power_sum_chi(n, chi, m / p);
                assert_eq!(lhs, rhs);
                let modp = power_sum_chi_mod(n, chi, m, true, p, 5);
                assert_eq!(BigInt::from(modp), lhs.mod_floor(&BigInt::from(pow_big(p, 5))));
            }
        }
        // S_{n,χ}(m)/m ≡ B_{n,χ} mod p² when p f | m and n ≡ δ mod 2
        for (d, p) in [(5i64, 7u64), (-4, 5), (-3, 11), (8, 3)] {
            let chi = QuadChar::new(d).unwrap();
            for n in (1..20u64).filter(|n| n % 2 == chi.parity()) {
                for k in 1..=2u64 {
                    let m = p * chi.conductor() * k;
                    let lhs = BigRational::new(power_sum_chi(n, chi, m), BigInt::from(m));
                    let diff = lhs - gen_bernoulli(n, chi).unwrap();
                    if !diff.is_zero() {
                        assert!(crate::padic::ord_rational(p, &diff).unwrap() >= 2, "D={d} p={p} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn backends_agree() {
        for (d, p) in [(1i64, 37u64), (-4, 19), (5, 19), (-3, 13), (77, 37), (1, 5)] {
            let chi = QuadChar::new(d).unwrap();
            let step = 2;
            let mut n = 66 + chi.parity();
            while n <= 400 {
                if chi.is_principal() && n % (p - 1) == 0 {
                    assert!(removed_bernoulli_mod(n, chi, p, 2, Backend::PowerSum).is_err());
                    n += step;
                    continue;
                }
                for prec in [1u32, 4] {
                    let a = removed_bernoulli_mod(n, chi, p, prec, Backend::Exact).unwrap();
                    let b = removed_bernoulli_mod(n, chi, p, prec, Backend::PowerSum).unwrap();
                    assert!(a.eq_mod(&b, prec), "D={d} p={p} n={n} prec={prec}");
                }
                n += step * 9;
            }
        }
    }

    #[test]
    fn backend_selection() {
        assert_eq!(pick_backend(100, 30, Backend::Auto).unwrap(), Backend::Exact);
        assert_eq!(pick_backend(10_000, 3, Backend::Auto).unwrap(), Backend::PowerSum);
        assert_eq!(pick_backend(1000, 20, Backend::Auto).unwrap(), Backend::Exact);
        assert!(matches!(pick_backend(10_000, 20, Backend::Auto), Err(Error::BackendOutOfRange(_))));
    }

    #[test]
    fn bernoulli_cache_round_trip() {
        let _ = bernoulli(20);
        let dir = std::env::temp_dir().join(format!("kummerlab-bcache-{}", std::process::id()));
        save_bernoulli_cache(&dir).unwrap();
        let text = std::fs::read_to_string(&dir).unwrap();
        assert!(text.starts_with("BCACHE1\n"));
        assert!(text.contains("\n12 -691/2730\n"));
        assert!(load_bernoulli_cache(&dir).unwrap() >= 1);
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(load_bernoulli_cache(&dir).unwrap(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chi_over_n_is_integral(d in prop::sample::select(vec![-3i64, -4, 5, 8, -7, 12, 13, -8]),
                                  n in 1u64..60, p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17])) {
            let chi = QuadChar::new(d).unwrap();
            prop_assume!(chi.conductor() % p != 0);
            let b = gen_bernoulli(n, chi).unwrap() / rat(n as i64, 1);
            prop_assert!(PadicApprox::from_ratio(p, &b, 3).is_ok());
        }

        #[test]
        fn parity_mismatch_vanishes(d in prop::sample::select(vec![-3i64, -4, 5, 8, 13]), n in 1u64..40) {
            let chi = QuadChar::new(d).unwrap();
            prop_assume!(n % 2 != chi.parity());
            prop_assert!(gen_bernoulli(n, chi).unwrap().is_zero());
        }

        #[test]
        fn carlitz_fresnel(p in prop::sample::select(vec![5u64, 7, 11]),
                           d in prop::sample::select(vec![1i64, -4, 5, -3]),
                           k in 1u64..3, r in 1u32..3, n in 1u32..4, m0 in 0u64..6) {
            let chi = QuadChar::new(d).unwrap();
            prop_assume!(chi.conductor() % p != 0);
            let h = k * (p - 1) * p.pow(r - 1);
            prop_assume!(h % 2 == 0);
            let m = chi.parity() + 2 * m0 + if chi.parity() == 0 { 2 } else { 0 };
            prop_assume!(!chi.is_principal() || m % (p - 1) != 0);
            prop_assume!(m + n as u64 * h <= 400);
            // Δ_h^n L_p(1-s, χ) at s = m
            let mut acc = BigRational::zero();
            for nu in 0..=n as u64 {
                let t = m + nu * h;
                let l = -removed_bernoulli(t, chi, p).unwrap() / rat(t as i64, 1);
                let c = num_integer::binomial(BigInt::from(n), BigInt::from(nu));
                let sign = if (n as u64 - nu) % 2 == 0 { 1 } else { -1 };
                acc += BigRational::from_integer(c * sign) * l;
            }
            let v = PadicApprox::from_ratio(p, &acc, n * r).unwrap();
            prop_assert!(v.vanishes());
        }
    }

    #[test]
    fn primes_helper_sanity() {
        assert!(is_prime(29789));
    }
}
