//! Digit-by-digit computation of zeros and fixed points.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod, pow_big};
use crate::error::{Error, Result};
use crate::mahler::{DegenerateFn, KummerFn};
use crate::padic::{binom_mod, floor_log, lucas_binom_mod_p, DigitExpansion, PadicApprox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZeroMethod {
    /// Interpolation through `f(0)/p, ..., f(n)/p`.
    Values,
    /// Mahler coefficients, with Lucas for the top binomial.
    Coefficients,
    /// Truncated sums over a δ-degenerate coefficient table.
    Degenerate,
}

impl ZeroMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroMethod::Values => "values",
            ZeroMethod::Coefficients => "coefficients",
            ZeroMethod::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroResult {
    pub digits: DigitExpansion,
    pub method: ZeroMethod,
    /// `ord_p f(ξ_r)` after step `r`, capped by the working precision.
    pub residual_valuations: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointResult {
    pub digits: DigitExpansion,
    /// Whether `f(τ_n) ≡ τ_n mod p^n` holds on re-evaluation.
    pub consistency: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoZeros {
    pub xi1: DigitExpansion,
    pub xi2: DigitExpansion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub ord_f0: u32,
    pub ord_tau: u32,
    pub ord_xi: u32,
    /// `τ/(pξ) mod p`, when both valuations are determined.
    pub tau_over_pxi: Option<u64>,
    pub f0_over_tau: u64,
    pub samples_checked: usize,
}

fn neg_inverse_mod_p(x: u64, p: u64) -> u64 {
    (p - inv_mod(x, p).expect("unit")) % p
}

fn check_wks0(f: &KummerFn) -> Result<u64> {
    let c = f.coeffs();
    let p = f.prime();
    if c.len() < 2 {
        return Err(Error::PrecisionExhausted("need Δ_f(1)".into()));
    }
    if c[0].mod_p() != 0 {
        return Err(Error::NotInWKS0("f(0) is a unit".into()));
    }
    if !c[1].is_unit() {
        return Err(Error::NotInWKS0("Δ_f is not a unit".into()));
    }
    if p == 2 && c.get(2).map_or(true, |x| x.mod_p() != 0) {
        return Err(Error::NotInWKS0("p = 2 needs 2 | Δ_f(2)".into()));
    }
    Ok(c[1].mod_p())
}

/// The unique simple zero of `f ∈ WKS0` to `n` digits.
pub fn find_zero(f: &KummerFn, n: u32, method: ZeroMethod) -> Result<ZeroResult> {
    let delta = check_wks0(f)?;
    let p = f.prime();
    if method == ZeroMethod::Degenerate {
        return find_zero_degenerate(&DegenerateFn::from_kummer(f), n);
    }
    if (f.coeffs().len() as u32) < n + 1 {
        return Err(Error::PrecisionExhausted(format!(
            "{n} digits need base precision {}, have {}",
            n + 1,
            f.precision()
        )));
    }
    let dinv = neg_inverse_mod_p(delta, p);
    let c = f.coeffs();
    let ftilde: Vec<BigUint> = match method {
        ZeroMethod::Values => (0..=n as i64)
            .map(|k| {
                let v = f.value_at_i64(k).truncate(n + 1);
                v.div_exact_p(1).map(|q| q.residue().clone())
            })
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let c0_over_p = c[0].div_exact_p(1).map(|q| q.residue().clone()).unwrap_or_default();
    let mut xi = BigInt::zero();
    let mut digits = Vec::with_capacity(n as usize);
    let mut residuals = Vec::with_capacity(n as usize);
    for r in 1..=n {
        let m = pow_big(p, r);
        let gamma = match method {
            ZeroMethod::Values => {
                let other = BigInt::from(r) - &xi;
                let mut acc = BigUint::zero();
                for nu in 0..=r {
                    let w = binom_mod(&xi, nu as u64, p, r) * binom_mod(&other, (r - nu) as u64, p, r);
                    acc += &ftilde[nu as usize] * w;
                }
                acc % &m
            }
            _ => {
                let mut acc = c0_over_p.clone();
                for nu in 1..r {
                    let cv = &c[nu as usize];
                    if cv.vanishes() {
                        continue;
                    }
                    acc += cv.residue() * binom_mod(&xi, nu as u64, p, r - nu + 1) * pow_big(p, nu - 1);
                }
                let top = lucas_binom_mod_p(&digits, r as u64, p) * c[r as usize].mod_p() % p;
                acc += BigUint::from(top) * pow_big(p, r - 1);
                acc % &m
            }
        };
        let s = next_digit(&gamma, r, p, dinv)?;
        digits.push(s);
        xi += BigInt::from(s) * BigInt::from(pow_big(p, r - 1));
        let res = f.value_at(&xi).valuation().min(f.precision());
        if res < (r + 1).min(f.precision()) {
            return Err(Error::RelationViolated(format!("residual after step {r} is p^{res}")));
        }
        residuals.push(res);
    }
    Ok(ZeroResult { digits: DigitExpansion::new(p, digits), method, residual_valuations: residuals })
}

/// `γ / p^(r-1) · δ mod p`, checking the divisibility the lift relies on.
fn next_digit(gamma: &BigUint, r: u32, p: u64, dinv: u64) -> Result<u64> {
    let (q, rem) = gamma.div_rem(&pow_big(p, r - 1));
    if !rem.is_zero() {
        return Err(Error::RelationViolated(format!("γ_{} not divisible by p^{}", r - 1, r - 1)));
    }
    let q = (q % BigUint::from(p)).to_u64().unwrap();
    Ok(crate::arith::mul_mod(q, dinv, p))
}

/// The fixed point `f(τ) = τ` to `n` digits.
pub fn find_fixed_point(f: &KummerFn, n: u32) -> Result<FixedPointResult> {
    let p = f.prime();
    let c = f.coeffs();
    if n == 0 {
        return Ok(FixedPointResult { digits: DigitExpansion::new(p, vec![]), consistency: true });
    }
    if (c.len() as u32) < n {
        return Err(Error::PrecisionExhausted(format!("{n} digits need base precision {n}, have {}", f.precision())));
    }
    let mut digits = vec![c[0].mod_p()];
    let mut tau = BigInt::from(digits[0]);
    for r in 1..n {
        let m = BigInt::from(pow_big(p, r + 1));
        let mut acc = BigInt::zero();
        for nu in 0..r {
            let cv = &c[nu as usize];
            if cv.vanishes() {
                continue;
            }
            acc +=
                BigInt::from(cv.residue() * binom_mod(&tau, nu as u64, p, r + 1 - nu)) * BigInt::from(pow_big(p, nu));
        }
        let diff = (acc - &tau).mod_floor(&m);
        let (q, rem) = diff.div_rem(&BigInt::from(pow_big(p, r)));
        if !rem.is_zero() {
            return Err(Error::RelationViolated(format!("fixed-point step {r} lost divisibility")));
        }
        let top = lucas_binom_mod_p(&digits, r as u64, p) * c[r as usize].mod_p() % p;
        let t = (q.to_u64().unwrap() + top) % p;
        digits.push(t);
        tau += BigInt::from(t) * BigInt::from(pow_big(p, r));
    }
    let tau_n = PadicApprox::from_bigint(p, &tau, n);
    let consistency = f.evaluate(&tau_n, n - 1)? == tau_n;
    Ok(FixedPointResult { digits: DigitExpansion::new(p, digits), consistency })
}

/// The unique simple zero of a δ-degenerate `g` with `g(0) ∈ pZ_p`.
pub fn find_zero_degenerate(g: &DegenerateFn, n: u32) -> Result<ZeroResult> {
    let p = g.prime();
    let delta = match g.delta() {
        Some(d) if d % p != 0 => d,
        _ => return Err(Error::NotInWKSd("Δ_g is not a unit".into())),
    };
    if g.value_at_zero().mod_p() != 0 {
        return Err(Error::NotInWKSd("g(0) is a unit".into()));
    }
    if !g.in_ks_d() {
        return Err(Error::NotInWKSd("schedule violates the KS^d bounds".into()));
    }
    let dinv = neg_inverse_mod_p(delta, p);
    let arg_prec = n + 2 + floor_log(p, g.entries().len() as u64);
    let mut xi = BigInt::zero();
    let mut digits = Vec::with_capacity(n as usize);
    let mut residuals = Vec::with_capacity(n as usize);
    for r in 1..=n {
        let s = PadicApprox::from_bigint(p, &xi, arg_prec);
        let v = g.evaluate(&s, r + 1)?;
        // γ_{r-1} = g(ξ_{r-1}) / p mod p^r
        let gamma = v.residue() / BigUint::from(p);
        if !(v.residue() % BigUint::from(p)).is_zero() {
            return Err(Error::RelationViolated("g(ξ) not divisible by p".into()));
        }
        let d = next_digit(&gamma, r, p, dinv)?;
        digits.push(d);
        xi += BigInt::from(d) * BigInt::from(pow_big(p, r - 1));
        let s = PadicApprox::from_bigint(p, &xi, arg_prec);
        let res = g.evaluate(&s, r + 1)?.valuation().min(r + 1);
        if res < r + 1 {
            return Err(Error::RelationViolated(format!("residual after step {r} is p^{res}")));
        }
        residuals.push(res);
    }
    Ok(ZeroResult {
        digits: DigitExpansion::new(p, digits),
        method: ZeroMethod::Degenerate,
        residual_valuations: residuals,
    })
}

/// Roots mod p of `f(0)/p² + (Δ_f(1)/p) s + Δ_f(2) s(s-1)/2`.
fn reduced_quadratic_roots(f: &KummerFn) -> Result<Vec<u64>> {
    let p = f.prime();
    let c = f.coeffs();
    let q0 = if c[0].is_exact_zero() { 0 } else { c[0].div_exact_p(2)?.mod_p() };
    let q1 = c[1].div_exact_p(1)?.mod_p();
    let half = inv_mod(2, p).unwrap();
    let q2 = crate::arith::mul_mod(c[2].mod_p(), half, p);
    Ok((0..p)
        .filter(|&s| {
            let lin = (q1 + p - q2) % p;
            let v = (q0 + crate::arith::mul_mod(lin, s, p) + crate::arith::mul_mod(q2, s * s % p, p)) % p;
            v == 0
        })
        .collect())
}

/// The zero of `f` in the residue class `r mod p`, through
/// `F(t) = f(r + p t)/p²`, which lies in WKS0 when that class holds a
/// simple zero of a KS² function.
fn lift_in_class(f: &KummerFn, r: u64, digits: u32) -> Result<BigInt> {
    let p = f.prime();
    let n = f.precision();
    if n < digits + 2 {
        return Err(Error::PrecisionExhausted(format!("{digits} digits need base precision {}, have {n}", digits + 2)));
    }
    let base = n - 2;
    let values: Vec<_> = (0..base as i64)
        .map(|k| {
            let s = BigInt::from(r) + BigInt::from(p as i64 * k);
            f.value_at(&s).div_exact_p(2)
        })
        .collect::<Result<_>>()
        .map_err(|_| Error::RelationViolated(format!("f is not divisible by p² on {r} + pZ_p")))?;
    let big_f = KummerFn::from_values(p, &values, base)?;
    let t = find_zero(&big_f, digits - 1, ZeroMethod::Coefficients)?;
    Ok(BigInt::from(r) + BigInt::from(p) * BigInt::from(t.digits.value()))
}

/// Both zeros of a KS² function with two simple zeros mod p.
///
/// The first zero comes from the residue class lift; the second from
/// dividing the translated function by `p s` and running the degenerate
/// algorithm.
pub fn find_two_zeros(f: &KummerFn, n: u32, seeds: &[u64]) -> Result<TwoZeros> {
    let p = f.prime();
    if p <= 3 {
        return Err(Error::UnsupportedCase("two-zero splitting needs p > 3".into()));
    }
    let c = f.coeffs();
    if c.len() < 3 || c[1].mod_p() != 0 || !c[2].is_unit() {
        return Err(Error::UnsupportedCase("f is not in KS2 (needs Δ_f = 0, Δ_f(2) a unit)".into()));
    }
    if c[0].valuation() < 2 {
        return Err(Error::NoZeroModP(p));
    }
    let roots = reduced_quadratic_roots(f)?;
    let (r1, r2) = match roots.as_slice() {
        [] => return Err(Error::NoZeroModP(p)),
        [root] => return Err(Error::DoubleRootModP { p, root: *root }),
        [a, b] => match seeds.first().map(|s| s % p) {
            None => (*a, *b),
            Some(s) if s == *a => (*a, *b),
            Some(s) if s == *b => (*b, *a),
            Some(s) => return Err(Error::UnsupportedCase(format!("seed {s} is not a root mod {p}"))),
        },
        _ => unreachable!("a quadratic with a unit leading term"),
    };
    let exact_origin = r1 == 0 && c[0].is_exact_zero();
    let (xi1, h) = if exact_origin {
        (BigInt::zero(), f.clone())
    } else {
        let xi1 = lift_in_class(f, r1, f.precision() - 2)?;
        let hp = f.precision() - 1;
        let mut values: Vec<_> = (0..hp as i64).map(|k| f.value_at(&(&xi1 + BigInt::from(k))).truncate(hp)).collect();
        if !values[0].vanishes() {
            return Err(Error::RelationViolated("translated function misses its zero".into()));
        }
        values[0] = PadicApprox::exact_zero(p, hp);
        (xi1, KummerFn::from_values(p, &values, hp)?)
    };
    let g = h.divide_out_zero()?;
    let d = find_zero_degenerate(&g, n)?;
    let m = BigInt::from(pow_big(p, n));
    let xi2 = (&xi1 + BigInt::from(d.digits.value())).mod_floor(&m);
    let xi1 = xi1.mod_floor(&m);
    let to_digits = |x: &BigInt| DigitExpansion::from_padic(&PadicApprox::from_bigint(p, x, n));
    let (e1, e2) = (to_digits(&xi1), to_digits(&xi2));
    if n >= 1 && (e1.digits[0] != r1 || e2.digits[0] != r2) {
        return Err(Error::RelationViolated("zeros left their residue classes".into()));
    }
    Ok(TwoZeros { xi1: e1, xi2: e2 })
}

fn unit_and_ord(x: &BigUint, len: u32, p: u64) -> (u32, u64) {
    match crate::arith::ord_big(p, x) {
        Some(v) if v < len => {
            let u = x / pow_big(p, v) % BigUint::from(p);
            (v, u.to_u64().unwrap())
        }
        _ => (len, 0),
    }
}

/// Checks the relations between `f(0)`, the zero ξ and the fixed point τ of
/// `f ∈ WKS0`, and samples the norm law `|f(s)| = |p(s - ξ)|`.
pub fn verify_zero_relations(f: &KummerFn, xi: &DigitExpansion, tau: &DigitExpansion) -> Result<RelationReport> {
    let p = f.prime();
    let delta = check_wks0(f)?;
    let c0 = &f.coeffs()[0];
    if c0.vanishes() {
        return Err(Error::UnsupportedCase("f(0) vanishes to working precision".into()));
    }
    let n_xi = xi.len() as u32;
    let n_tau = tau.len() as u32;
    let (ord_f0, u_f0) = unit_and_ord(c0.residue(), c0.precision(), p);
    let (ord_tau, u_tau) = unit_and_ord(&tau.value(), n_tau, p);
    let (ord_xi, u_xi) = unit_and_ord(&xi.value(), n_xi, p);
    let violated = |what: &str| Err(Error::RelationViolated(what.to_string()));
    if ord_tau < n_tau && ord_tau != ord_f0 {
        return violated("ord τ differs from ord f(0)");
    }
    if ord_xi < n_xi && ord_f0 != 1 + ord_xi {
        return violated("ord f(0) differs from 1 + ord ξ");
    }
    let tau_over_pxi = if ord_tau < n_tau && ord_xi < n_xi {
        let q = crate::arith::mul_mod(u_tau, inv_mod(u_xi, p).unwrap(), p);
        if q != (p - delta) % p {
            return violated("τ/(pξ) differs from -Δ_f");
        }
        Some(q)
    } else {
        None
    };
    let f0_over_tau = if ord_tau < n_tau { crate::arith::mul_mod(u_f0, inv_mod(u_tau, p).unwrap(), p) } else { 1 };
    if f0_over_tau != 1 {
        return violated("f(0)/τ is not 1 mod p");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + p);
    let modulus = pow_big(p, n_xi.max(1));
    let xi_val = BigInt::from(xi.value());
    let mut checked = 0;
    for _ in 0..100 {
        let s = BigInt::from(rng.gen::<u64>()) % BigInt::from(modulus.clone());
        let d = &s - &xi_val;
        let ord_d = crate::padic::ord_bigint(p, &d).unwrap_or(u32::MAX);
        if ord_d >= n_xi || 1 + ord_d >= f.precision() {
            continue;
        }
        let got = f.value_at(&s).valuation();
        if got != 1 + ord_d {
            return violated("|f(s)| differs from |p(s - ξ)|");
        }
        checked += 1;
    }
    Ok(RelationReport { ord_f0, ord_tau, ord_xi, tau_over_pxi, f0_over_tau, samples_checked: checked })
}
