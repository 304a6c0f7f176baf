//! Fermat quotients, the Teichmüller character and the functions
//! `T^r_{p,l}(s, χ) = f_χ^{-1} Σ χ(a) a^{l+δ} q(a)^r u(a)^s`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{inv_mod, mul_mod, pow_big, pow_mod};
use crate::charnum::{power_sum_chi_mod, QuadChar};
use crate::error::{Error, Result};
use crate::lfunc::{build_lpl, lp_value, LplSpec};
use crate::mahler::{KummerFn, Label};
use crate::padic::PadicApprox;
use crate::solver::{find_fixed_point, find_zero, ZeroMethod};

fn check_unit(a: &BigInt, p: u64) -> Result<()> {
    if a.mod_floor(&BigInt::from(p)).is_zero() {
        return Err(Error::NotAUnit(format!("{a} is divisible by {p}")));
    }
    Ok(())
}

/// `q(a) = (a^(p-1) - 1)/p mod p^n`.
pub fn fermat_quotient(a: &BigInt, p: u64, n: u32) -> Result<PadicApprox> {
    check_unit(a, p)?;
    let m = pow_big(p, n + 1);
    let base = a.mod_floor(&BigInt::from(m.clone())).to_biguint().unwrap();
    let u = base.modpow(&BigUint::from(p - 1), &m);
    let q = ((u + &m - BigUint::one()) % &m) / BigUint::from(p);
    Ok(PadicApprox::new(p, q, n))
}

/// The `(p-1)`-th root of unity `ω(a) ≡ a mod p`, by iterating `x ↦ x^p`.
pub fn teichmuller(a: &BigInt, p: u64, n: u32) -> Result<PadicApprox> {
    check_unit(a, p)?;
    let m = pow_big(p, n);
    let e = BigUint::from(p);
    let mut x = a.mod_floor(&BigInt::from(m.clone())).to_biguint().unwrap();
    loop {
        let y = x.modpow(&e, &m);
        if y == x {
            return Ok(PadicApprox::new(p, x, n));
        }
        x = y;
    }
}

/// Parameters of `T^r_{p,l}(·, χ)` at base precision `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TSpec {
    pub p: u64,
    pub l: i64,
    pub r: u32,
    pub chi: QuadChar,
    pub precision: u32,
}

impl TSpec {
    pub fn new(p: u64, l: i64, r: u32, chi: QuadChar, precision: u32) -> Result<Self> {
        if p == 2 || !crate::arith::is_prime(p) {
            return Err(Error::UnsupportedCase(format!("{p} is not an odd prime")));
        }
        if chi.conductor() % p == 0 {
            return Err(Error::UnsupportedCase(format!("p = {p} divides the conductor of {chi}")));
        }
        if r == 0 || precision == 0 {
            return Err(Error::UnsupportedCase("r and the precision must be positive".into()));
        }
        Ok(TSpec { p, l, r, chi, precision })
    }
}

/// `T^r_{p,l}(s, χ) mod p^n` for `s >= 0` by the defining sum.
pub fn t_value(p: u64, l: i64, r: u32, chi: QuadChar, s: u64, n: u32) -> Result<PadicApprox> {
    let f = chi.conductor();
    let exp = l + chi.parity() as i64 + ((p - 1) * s) as i64;
    let terms = (1..=p * f).filter(|a| a % p != 0).map(|a| (a, chi.eval_u(a))).filter(|t| t.1 != 0);
    let m1 = pow_big(p, n + 1);
    let acc = if let Some(m1) = m1.to_u64() {
        let m = m1 / p;
        let mut acc = 0u64;
        for (a, c) in terms {
            let q = (pow_mod(a, p - 1, m1) + m1 - 1) % m1 / p;
            let base = if exp >= 0 {
                pow_mod(a, exp as u64, m)
            } else {
                pow_mod(inv_mod(a % m, m).unwrap(), exp.unsigned_abs(), m)
            };
            let term = mul_mod(base, pow_mod(q, r as u64, m), m);
            acc = if c > 0 { (acc + term) % m } else { (acc + m - term) % m };
        }
        BigInt::from(acc)
    } else {
        let m = pow_big(p, n);
        let bp = BigUint::from(p);
        let mut acc = BigInt::zero();
        for (a, c) in terms {
            let ab = BigUint::from(a);
            let q = (ab.modpow(&BigUint::from(p - 1), &m1) + &m1 - BigUint::one()) % &m1 / &bp;
            let base = if exp >= 0 {
                ab.modpow(&BigUint::from(exp as u64), &m)
            } else {
                let inv = BigInt::from(a).modinv(&BigInt::from(m.clone())).unwrap().to_biguint().unwrap();
                inv.modpow(&BigUint::from(exp.unsigned_abs()), &m)
            };
            let term = BigInt::from(base * q.modpow(&BigUint::from(r), &m) % &m);
            if c > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    };
    let f_inv = BigInt::from(f).modinv(&BigInt::from(pow_big(p, n))).unwrap();
    Ok(PadicApprox::from_bigint(p, &(acc * f_inv), n))
}

/// `T^r_{p,l}(s, χ)` through `f_χ^{-1} p^{-r} Δ^r_{p-1} S*_{t,χ}(p f_χ)` at
/// `t = l + δ + s(p-1)`; requires `l >= 0`.
pub fn t_from_power_sums(p: u64, l: u64, r: u32, chi: QuadChar, s: u64, n: u32) -> Result<PadicApprox> {
    let f = chi.conductor();
    let t0 = l + chi.parity() + (p - 1) * s;
    let m = BigInt::from(pow_big(p, n + r));
    let mut acc = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 0..=r as u64 {
        let sum = BigInt::from(power_sum_chi_mod(t0 + k * (p - 1), chi, p * f, true, p, n + r));
        if (r as u64 - k) % 2 == 0 {
            acc += &binom * sum;
        } else {
            acc -= &binom * sum;
        }
        binom = binom * BigInt::from(r as u64 - k) / BigInt::from(k + 1);
    }
    let acc = acc.mod_floor(&m);
    let (q, rem) = acc.div_rem(&BigInt::from(pow_big(p, r)));
    if !rem.is_zero() {
        return Err(Error::NotDivisible(format!("Δ^{r} of the power sums is not divisible by p^{r}")));
    }
    let f_inv = BigInt::from(f).modinv(&BigInt::from(pow_big(p, n))).unwrap();
    Ok(PadicApprox::from_bigint(p, &(q * f_inv), n))
}

/// `T^r_{p,l}(·, χ)` from the coefficients `T^{r+ν}(0)`, cross-checked
/// against its values at `s = 0..4`.
pub fn build_t(spec: &TSpec) -> Result<KummerFn> {
    let n = spec.precision;
    let coeffs =
        (0..n).map(|nu| t_value(spec.p, spec.l, spec.r + nu, spec.chi, 0, n - nu)).collect::<Result<Vec<_>>>()?;
    let f = KummerFn::from_coeffs(spec.p, &coeffs, n)?;
    for s in 0..4u64 {
        let direct = t_value(spec.p, spec.l, spec.r, spec.chi, s, n)?;
        if f.value_at_i64(s as i64) != direct {
            return Err(Error::RelationViolated(format!("T^{} coefficients disagree with T({s})", spec.r)));
        }
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceCheck {
    pub name: &'static str,
    /// `None` where the relation does not apply.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub p: u64,
    pub l: u64,
    pub chi: QuadChar,
    pub delta_t: u64,
    pub delta_l: u64,
    pub label_t: Label,
    pub label_l: Label,
    pub checks: Vec<CongruenceCheck>,
}

impl CongruenceReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds != Some(false))
    }
}

/// `(ord, unit mod p)` of a digit expansion, `None` if it vanishes.
fn ord_unit(x: &BigUint, p: u64) -> Option<(u32, u64)> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.clone();
    let bp = BigUint::from(p);
    let mut e = 0;
    while (&x % &bp).is_zero() {
        x /= &bp;
        e += 1;
    }
    Some((e, (x % bp).to_u64().unwrap()))
}

/// Digits used for the zero and fixed point in the reciprocity check.
const RECIPROCITY_DIGITS: u32 = 4;

/// Evaluates the T ↔ L congruences at `(p, l, χ)`, computing each side
/// independently.
pub fn congruence_suite(p: u64, l: u64, chi: QuadChar) -> Result<CongruenceReport> {
    if p <= 3 {
        return Err(Error::UnsupportedCase("needs p > 3".into()));
    }
    let n = RECIPROCITY_DIGITS + 1;
    let lspec = LplSpec::new(p, l, chi, n)?;
    let lf = build_lpl(&lspec)?;
    let tf = build_t(&TSpec::new(p, l as i64, 1, chi, n)?)?;
    let cl = lf.classify();
    let ct = tf.classify();
    let mut checks = Vec::new();

    let mut values_agree = true;
    for s in 0..=10u64 {
        let t = t_value(p, l as i64, 1, chi, s, 1)?;
        let v = lp_value(lspec.index(s), chi, p, 1)?;
        values_agree &= t.mod_p() == v.mod_p();
    }
    checks.push(CongruenceCheck { name: "T(s) = L(s) mod p, s = 0..10", holds: Some(values_agree) });
    checks.push(CongruenceCheck { name: "Δ_T = 2Δ_L mod p", holds: Some(ct.delta_f == 2 * cl.delta_f % p) });
    let same_star = (ct.label == Label::KsStar) == (cl.label == Label::KsStar);
    let same_wks0 = (ct.label == Label::Wks0) == (cl.label == Label::Wks0);
    checks.push(CongruenceCheck { name: "same KS*/WKS0 classification", holds: Some(same_star && same_wks0) });

    let mut dual = true;
    for s in 0..4u64 {
        dual &= t_value(p, l as i64, 1, chi, s, 3)? == t_from_power_sums(p, l, 1, chi, s, 3)?;
    }
    checks.push(CongruenceCheck { name: "T from power sums", holds: Some(dual) });

    let (d2, d3) = if chi.is_principal() {
        (None, None)
    } else {
        let l2 = if l == 0 { p as i64 - 3 } else { l as i64 - 2 };
        let f2 = (chi.conductor() % p).pow(2) % p;
        let t3 = t_value(p, l as i64, 3, chi, 0, 1)?.mod_p();
        let t4 = t_value(p, l as i64, 4, chi, 0, 1)?.mod_p();
        let u1 = t_value(p, l2, 1, chi, 0, 1)?.mod_p();
        let u2 = t_value(p, l2, 2, chi, 0, 1)?.mod_p();
        let l2c = lf.coeff(2).unwrap().mod_p();
        let l3c = lf.coeff(3).unwrap().mod_p();
        let lhs2 = 3 * l2c % p;
        let rhs2 = (t3 + p * p - f2 * u1 % p) % p;
        let lhs3 = 4 * l3c % p;
        let rhs3 = (t4 + p * p - 2 * f2 % p * u2 % p) % p;
        (Some(lhs2 == rhs2), Some(lhs3 == rhs3))
    };
    checks.push(CongruenceCheck { name: "3Δ_L(2) = Δ_T(2) - f²T_{l-2}(0) mod p", holds: d2 });
    checks.push(CongruenceCheck { name: "4Δ_L(3) = Δ_T(3) - 2f²T²_{l-2}(0) mod p", holds: d3 });

    let reciprocity = if cl.label == Label::Wks0 && ct.label == Label::Wks0 {
        let d = RECIPROCITY_DIGITS;
        let xl = find_zero(&lf, d, ZeroMethod::Coefficients)?.digits.value();
        let xt = find_zero(&tf, d, ZeroMethod::Coefficients)?.digits.value();
        let tl = find_fixed_point(&lf, d)?.digits.value();
        let tt = find_fixed_point(&tf, d)?.digits.value();
        match (ord_unit(&tt, p), ord_unit(&tl, p), ord_unit(&xl, p), ord_unit(&xt, p)) {
            (Some((e1, u1)), Some((e2, u2)), Some((e3, u3)), Some((e4, u4))) if e1 + e3 == e2 + e4 => {
                let num = u1 * u3 % p;
                let den = u2 * u4 % p;
                Some(num * inv_mod(den, p).unwrap() % p == 2)
            }
            _ => None,
        }
    } else {
        None
    };
    checks.push(CongruenceCheck { name: "τ_T/τ_L · ξ_L/ξ_T = 2 mod p", holds: reciprocity });

    Ok(CongruenceReport {
        p,
        l,
        chi,
        delta_t: ct.delta_f,
        delta_l: cl.delta_f,
        label_t: ct.label,
        label_l: cl.label,
        checks,
    })
}
