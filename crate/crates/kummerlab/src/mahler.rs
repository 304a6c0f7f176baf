//! Functions in KS_{p,2} stored by their normalized Mahler coefficients,
//! and δ-degenerate functions with an explicit exponent schedule.
//!
//! A [`KummerFn`] built at base precision `N` stores `c_0, ..., c_{N-1}` where
//! `f(s) = Σ c_ν p^ν C(s, ν)` and `c_ν` is known modulo `p^(N-ν)`. Every
//! value `f(s)` is then determined modulo `p^N`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{ord_big, ord_u64, pow_big};
use crate::error::{Error, Result};
use crate::padic::{binom_mod, floor_log, PadicApprox, INFINITE_VALUATION};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerFn {
    p: u64,
    coeffs: Vec<PadicApprox>,
    base_precision: u32,
}

/// A lower bound that may or may not be attained within the stored data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact(u32),
    AtLeast(u32),
}

impl Bound {
    pub fn exact(self) -> Option<u32> {
        match self {
            Bound::Exact(v) => Some(v),
            Bound::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(v) => write!(f, "{v}"),
            Bound::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// `f(0)` is a unit.
    KsStar,
    /// `f(0) ≡ 0 mod p` and `Δ_f` a unit: a unique simple zero.
    Wks0,
    /// `λ_f = 2` and `ord f(0) ≥ 2`.
    Ks2,
    /// Constant absolute value.
    KsC,
    /// `f / p` lies in KS*.
    PksStar,
    Indeterminate,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::KsStar => "KS*",
            Label::Wks0 => "WKS0",
            Label::Ks2 => "KS2",
            Label::KsC => "KSc",
            Label::PksStar => "pKS*",
            Label::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// `Δ_f = c_1 mod p`.
    pub delta_f: u64,
    pub lambda_f: Bound,
    pub mu_f: Bound,
    /// Valuation of `f(0)`, [`INFINITE_VALUATION`] for an exact zero.
    pub ord_f0: u32,
    pub label: Label,
    /// For `p = 2` whether `2 | Δ_f(2)`; vacuously true for odd `p`.
    pub p2_condition: bool,
}

impl KummerFn {
    /// Mahler coefficients from the values `f(0), ..., f(N-1)`.
    pub fn from_values(p: u64, values: &[PadicApprox], n: u32) -> Result<Self> {
        let len = n as usize;
        if n == 0 {
            return Err(Error::PrecisionExhausted("base precision 0".into()));
        }
        if values.len() < len {
            return Err(Error::InsufficientValues { needed: len, got: values.len() });
        }
        let m = BigInt::from(pow_big(p, n));
        let mut table = Vec::with_capacity(len);
        let mut exact = Vec::with_capacity(len);
        for v in &values[..len] {
            if v.prime() != p {
                return Err(Error::PrimeMismatch(p, v.prime()));
            }
            if !v.is_exact_zero() && v.precision() < n {
                return Err(Error::PrecisionExhausted(format!("value known to {} digits, need {n}", v.precision())));
            }
            table.push(v.to_bigint());
            exact.push(v.is_exact_zero());
        }
        let mut coeffs = Vec::with_capacity(len);
        for nu in 0..len {
            let prec = n - nu as u32;
            let d0 = table[0].mod_floor(&m).to_biguint().unwrap();
            let c = if exact[0] {
                PadicApprox::exact_zero(p, prec)
            } else {
                if let Some(v) = ord_big(p, &d0) {
                    if v < nu as u32 {
                        return Err(Error::NotKummer(format!("Δ^{nu} f(0) has valuation {v} < {nu} at p = {p}")));
                    }
                }
                PadicApprox::new(p, d0 / pow_big(p, nu as u32), prec)
            };
            coeffs.push(c);
            for i in 0..table.len() - 1 {
                table[i] = (&table[i + 1] - &table[i]).mod_floor(&m);
                exact[i] = exact[i] && exact[i + 1];
            }
            table.pop();
            exact.pop();
        }
        Ok(KummerFn { p, coeffs, base_precision: n })
    }

    /// Wraps a coefficient table; `c_ν` must be known to `N - ν` digits.
    pub fn from_coeffs(p: u64, coeffs: &[PadicApprox], n: u32) -> Result<Self> {
        if coeffs.len() < n as usize {
            return Err(Error::InsufficientValues { needed: n as usize, got: coeffs.len() });
        }
        let mut out = Vec::with_capacity(n as usize);
        for (nu, c) in coeffs[..n as usize].iter().enumerate() {
            if c.prime() != p {
                return Err(Error::PrimeMismatch(p, c.prime()));
            }
            out.push(c.reduce(n - nu as u32)?);
        }
        Ok(KummerFn { p, coeffs: out, base_precision: n })
    }

    pub fn constant(c: &PadicApprox) -> Self {
        let n = c.precision();
        let mut coeffs = vec![c.clone()];
        for nu in 1..n {
            coeffs.push(PadicApprox::exact_zero(c.prime(), n - nu));
        }
        KummerFn { p: c.prime(), coeffs, base_precision: n }
    }

    /// `f_a(s) = a^s` for `a ≡ 1 mod p`.
    pub fn exponential(a: &PadicApprox) -> Result<Self> {
        if a.mod_p() != 1 % a.prime() {
            return Err(Error::UnsupportedCase(format!("{a} is not in 1 + pZ_p")));
        }
        let n = a.precision();
        let values: Vec<_> = (0..n as u64).map(|k| a.pow(k)).collect();
        Self::from_values(a.prime(), &values, n)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.base_precision
    }

    pub fn coeffs(&self) -> &[PadicApprox] {
        &self.coeffs
    }

    pub fn coeff(&self, nu: usize) -> Option<&PadicApprox> {
        self.coeffs.get(nu)
    }

    /// `Δ_f = Δ_f(1) mod p`, if at least two coefficients are stored.
    pub fn delta(&self) -> Option<u64> {
        self.coeffs.get(1).map(|c| c.mod_p())
    }

    fn is_exact_zero_fn(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }

    /// `f(k)` modulo `p^N` for an integer argument.
    pub fn value_at(&self, k: &BigInt) -> PadicApprox {
        let n = self.base_precision;
        if self.is_exact_zero_fn() || (k.is_zero() && self.coeffs[0].is_exact_zero()) {
            return PadicApprox::exact_zero(self.p, n);
        }
        let m = pow_big(self.p, n);
        let mut acc = BigUint::zero();
        for (nu, c) in self.coeffs.iter().enumerate() {
            if c.vanishes() {
                continue;
            }
            let b = binom_mod(k, nu as u64, self.p, n - nu as u32);
            acc += c.residue() * b * pow_big(self.p, nu as u32);
        }
        PadicApprox::new(self.p, acc % m, n)
    }

    pub fn value_at_i64(&self, k: i64) -> PadicApprox {
        self.value_at(&BigInt::from(k))
    }

    /// The values `f(0), ..., f(count - 1)` at full precision.
    pub fn values(&self, count: usize) -> Vec<PadicApprox> {
        (0..count as i64).map(|k| self.value_at_i64(k)).collect()
    }

    fn check_level(&self, n: u32) -> Result<()> {
        if n as usize >= self.coeffs.len() {
            return Err(Error::PrecisionExhausted(format!(
                "level {n} needs {} coefficients, {} stored",
                n + 1,
                self.coeffs.len()
            )));
        }
        Ok(())
    }

    /// `f(s) mod p^(n+1)` by the truncated Mahler expansion.
    pub fn evaluate(&self, s: &PadicApprox, n: u32) -> Result<PadicApprox> {
        self.check_level(n)?;
        if s.prime() != self.p {
            return Err(Error::PrimeMismatch(self.p, s.prime()));
        }
        if s.is_exact_zero() {
            return self.coeffs[0].reduce(n + 1);
        }
        if s.precision() < n + 1 {
            return Err(Error::PrecisionExhausted(format!(
                "argument known to {} digits, level {n} needs {}",
                s.precision(),
                n + 1
            )));
        }
        let lift = s.to_bigint();
        let m = pow_big(self.p, n + 1);
        let mut acc = BigUint::zero();
        for nu in 0..=n {
            let c = &self.coeffs[nu as usize];
            if c.vanishes() {
                continue;
            }
            let b = binom_mod(&lift, nu as u64, self.p, n + 1 - nu);
            acc += c.residue() * b * pow_big(self.p, nu);
        }
        Ok(PadicApprox::new(self.p, acc % m, n + 1))
    }

    /// `f(-r) mod p^(n+1)` through the difference formula
    /// `(-1)^n r C(n+r, r) Δ^n [f(s)/(s+r)]` at `s = 0`.
    ///
    /// Denominators `k + r` divisible by p are absorbed by the factor
    /// `r C(n+r, r)`; this costs `max ord_p(k+r)` extra digits of the table.
    pub fn evaluate_negative(&self, r: u64, n: u32) -> Result<PadicApprox> {
        self.check_level(n)?;
        assert!(r > 0, "r must be positive");
        let p = self.p;
        let e_max = (0..=n as u64).map(|k| ord_u64(p, k + r)).max().unwrap();
        let work = n + 1 + e_max;
        if work > self.base_precision {
            return Err(Error::DivisionByP(format!(
                "p^{e_max} divides some s + r; needs {work} digits, table has {}",
                self.base_precision
            )));
        }
        let m = BigInt::from(pow_big(p, work));
        let mut diff = BigInt::zero();
        let mut binom_nk = BigInt::one();
        for k in 0..=n as u64 {
            let e = ord_u64(p, k + r);
            let unit = BigInt::from((k + r) / p.pow(e));
            let fk = self.value_at_i64(k as i64).to_bigint();
            let term = fk * BigInt::from(pow_big(p, e_max - e)) * unit.modinv(&m).unwrap() * &binom_nk;
            if (n as u64 - k) % 2 == 0 {
                diff += term;
            } else {
                diff -= term;
            }
            binom_nk = binom_nk * BigInt::from(n as u64 - k) / BigInt::from(k + 1);
        }
        diff = diff.mod_floor(&m);
        let c = num_integer::binomial(BigInt::from(n as u64 + r), BigInt::from(r)) * BigInt::from(r);
        let v_c = ord_bigint_nz(p, &c);
        let unit_c = &c / BigInt::from(pow_big(p, v_c));
        let mut v = if v_c >= e_max {
            diff * BigInt::from(pow_big(p, v_c - e_max))
        } else {
            let shift = BigInt::from(pow_big(p, e_max - v_c));
            if !(&diff % &shift).is_zero() {
                return Err(Error::RelationViolated("difference table not divisible".into()));
            }
            diff / shift
        };
        v *= unit_c;
        if n % 2 == 1 {
            v = -v;
        }
        Ok(PadicApprox::from_bigint(p, &v, n + 1))
    }

    /// Reflection weights `a_ν = C(s,ν) C(n-s, n-ν)` together with `f(n - s)`.
    ///
    /// The weights are formed from the canonical integer lift of `s`; the
    /// weighted sums `Σ a_ν f(ν)` do not depend on that choice modulo
    /// `p^(n+1)`.
    pub fn reflect_coeffs(&self, s: &PadicApprox, n: u32) -> Result<(Vec<PadicApprox>, PadicApprox)> {
        self.check_level(n)?;
        if s.precision() < n + 1 && !s.is_exact_zero() {
            return Err(Error::PrecisionExhausted("argument too coarse for level".into()));
        }
        let p = self.p;
        let prec = n + 1;
        let lift = s.to_bigint();
        let other = BigInt::from(n) - &lift;
        let weights: Vec<PadicApprox> = (0..=n as u64)
            .map(|nu| {
                let a = binom_mod(&lift, nu, p, prec) * binom_mod(&other, n as u64 - nu, p, prec);
                PadicApprox::new(p, a, prec)
            })
            .collect();
        let mut acc = PadicApprox::exact_zero(p, prec);
        for nu in 0..=n as usize {
            let fv = self.value_at_i64(nu as i64).truncate(prec);
            acc = acc.add(&weights[n as usize - nu].mul(&fv)?)?;
        }
        Ok((weights, acc))
    }

    /// `∇^r f`, whose coefficients are `c_{ν+r}`.
    pub fn shift_op(&self, r: usize) -> Result<Self> {
        if r >= self.coeffs.len() {
            return Err(Error::PrecisionExhausted(format!("shift by {r} exhausts the table")));
        }
        Ok(KummerFn { p: self.p, coeffs: self.coeffs[r..].to_vec(), base_precision: self.base_precision - r as u32 })
    }

    pub fn multiply(&self, g: &KummerFn) -> Result<Self> {
        if self.p != g.p {
            return Err(Error::PrimeMismatch(self.p, g.p));
        }
        let n = self.base_precision.min(g.base_precision);
        let values: Vec<_> = (0..n as i64)
            .map(|k| {
                let a = self.value_at_i64(k).truncate(n);
                let b = g.value_at_i64(k).truncate(n);
                a.mul(&b)
            })
            .collect::<Result<_>>()?;
        Self::from_values(self.p, &values, n)
    }

    /// Pointwise inverse of a function with unit constant term.
    pub fn invert(&self) -> Result<Self> {
        if !self.coeffs[0].is_unit() {
            return Err(Error::NotAUnit("f(0) is not a unit".into()));
        }
        let n = self.base_precision;
        let values: Vec<_> = (0..n as i64).map(|k| self.value_at_i64(k).invert_unit()).collect::<Result<_>>()?;
        Self::from_values(self.p, &values, n)
    }

    /// `s ↦ f(a + b s)`.
    pub fn compose_linear(&self, a: &PadicApprox, b: i64) -> Result<Self> {
        if a.prime() != self.p {
            return Err(Error::PrimeMismatch(self.p, a.prime()));
        }
        let k = if a.is_exact_zero() { self.base_precision } else { a.precision().min(self.base_precision) };
        let lift = a.to_bigint();
        let values: Vec<_> = (0..k as i64)
            .map(|j| {
                let s = PadicApprox::from_bigint(self.p, &(&lift + BigInt::from(b * j)), k);
                self.evaluate(&s, k - 1)
            })
            .collect::<Result<_>>()?;
        let g = Self::from_values(self.p, &values, k)?;
        if b != 0 {
            let extra = ord_u64(self.p, b.unsigned_abs());
            for (nu, c) in g.coeffs.iter().enumerate() {
                let need = nu as u32 * extra;
                if !c.vanishes() && c.valuation() < need.min(c.precision()) {
                    return Err(Error::NotKummer(format!(
                        "Δ^{nu} of f∘λ lacks divisibility p^{}",
                        nu as u32 * (1 + extra)
                    )));
                }
            }
        }
        Ok(g)
    }

    /// `∫ f(s) ds = Σ (-1)^ν c_ν p^ν / (ν + 1)`.
    pub fn volkenborn(&self) -> Result<PadicApprox> {
        let p = self.p;
        let n = self.base_precision;
        let mut prec = hull_schedule(p, n as u64);
        for nu in 0..self.coeffs.len() as u64 {
            prec = prec.min(n - ord_u64(p, nu + 1));
        }
        if prec == 0 {
            return Err(Error::PrecisionExhausted("Volkenborn integral below one digit".into()));
        }
        let m = BigInt::from(pow_big(p, prec));
        let mut acc = BigInt::zero();
        for (nu, c) in self.coeffs.iter().enumerate() {
            if c.vanishes() {
                continue;
            }
            let e = ord_u64(p, nu as u64 + 1);
            let unit = BigInt::from((nu as u64 + 1) / p.pow(e));
            let term =
                BigInt::from(c.residue().clone()) * BigInt::from(pow_big(p, nu as u32 - e)) * unit.modinv(&m).unwrap();
            if nu % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        if self.is_exact_zero_fn() {
            return Ok(PadicApprox::exact_zero(p, prec));
        }
        Ok(PadicApprox::from_bigint(p, &acc, prec))
    }

    /// λ_f, μ_f, ord f(0) and the class label, using only what the stored
    /// coefficients decide. Coefficients beyond the table are not inspected.
    pub fn classify(&self) -> Classification {
        let p = self.p;
        let c = &self.coeffs;
        let ord_f0 = c[0].valuation();
        let delta_f = self.delta().unwrap_or(0);
        let lambda_f = match c.iter().position(|x| x.is_unit()) {
            Some(nu) => Bound::Exact(nu as u32),
            None => Bound::AtLeast(c.len() as u32),
        };
        let mu_f = {
            let attained = c.iter().filter(|x| !x.vanishes()).map(|x| x.valuation()).min();
            let floor = c.iter().filter(|x| x.vanishes() && !x.is_exact_zero()).map(|x| x.precision()).min();
            match (attained, floor) {
                (Some(a), Some(f)) if a <= f => Bound::Exact(a),
                (Some(a), None) => Bound::Exact(a),
                (Some(_), Some(f)) | (None, Some(f)) => Bound::AtLeast(f),
                (None, None) => Bound::AtLeast(INFINITE_VALUATION),
            }
        };
        let p2_condition = if p == 2 { c.get(2).map(|x| x.mod_p() == 0).unwrap_or(false) } else { true };
        let f0_zero_mod_p = ord_f0 >= 1;
        let label = if ord_f0 == 0 {
            Label::KsStar
        } else if lambda_f == Bound::Exact(1) && f0_zero_mod_p && p2_condition {
            Label::Wks0
        } else if mu_f == Bound::Exact(1) && ord_f0 == 1 {
            Label::PksStar
        } else if self.is_constant_norm(ord_f0, lambda_f) {
            Label::KsC
        } else if lambda_f == Bound::Exact(2) && ord_f0 >= 2 {
            Label::Ks2
        } else {
            Label::Indeterminate
        };
        Classification { delta_f, lambda_f, mu_f, ord_f0, label, p2_condition }
    }

    fn is_constant_norm(&self, ord_f0: u32, lambda: Bound) -> bool {
        let n = ord_f0;
        if n == INFINITE_VALUATION || n == 0 || n >= self.coeffs[0].precision() {
            return false;
        }
        let lambda_ok = match lambda {
            Bound::Exact(l) => l > n,
            Bound::AtLeast(l) => l > n,
        };
        if !lambda_ok || (n as usize) >= self.coeffs.len() {
            return false;
        }
        (1..=n as usize).all(|nu| {
            let c = &self.coeffs[nu];
            let need = n - nu as u32 + 1;
            c.valuation() >= need && (c.precision() >= need || c.is_exact_zero())
        })
    }

    /// `g = f / (p s)` for `f(0) = 0`, as a δ-degenerate function in `s`.
    ///
    /// With `f(s) = Σ_{μ≥0} c_{μ+1} p^μ/(μ+1) · p s C(s-1, μ)` one gets
    /// `g(s) = Σ_j a_j C(s, j)`, `a_j = Σ_{μ≥j} (-1)^{μ-j} c_{μ+1} p^μ/(μ+1)`.
    /// The schedule is the monotone hull of `μ - ord_p(μ+1)`.
    pub fn divide_out_zero(&self) -> Result<DegenerateFn> {
        if !self.coeffs[0].vanishes() {
            return Err(Error::NonzeroConstant);
        }
        let p = self.p;
        let n = self.base_precision;
        if n < 2 {
            return Err(Error::PrecisionExhausted("need at least two coefficients".into()));
        }
        // terms t_μ = c_{μ+1} p^μ / (μ+1) for μ = 0..=N-2, each mod p^(N-1-ord(μ+1))
        let top = n - 1;
        let m_top = BigInt::from(pow_big(p, top));
        let terms: Vec<BigInt> = (0..=(n - 2) as u64)
            .map(|mu| {
                let c = &self.coeffs[mu as usize + 1];
                let e = ord_u64(p, mu + 1);
                let unit = BigInt::from((mu + 1) / p.pow(e));
                let inv = unit.modinv(&m_top).unwrap();
                (BigInt::from(c.residue().clone()) * BigInt::from(pow_big(p, mu as u32 - e)) * inv).mod_floor(&m_top)
            })
            .collect();
        let tail_floor = hull_schedule(p, (n - 1) as u64);
        let mut entries = Vec::new();
        for j in 0..=(n - 2) as u64 {
            let mut prec = tail_floor;
            let mut acc = BigInt::zero();
            for mu in j..=(n - 2) as u64 {
                prec = prec.min(top - ord_u64(p, mu + 1));
                if (mu - j) % 2 == 0 {
                    acc += &terms[mu as usize];
                } else {
                    acc -= &terms[mu as usize];
                }
            }
            let d = hull_schedule(p, j);
            if prec <= d {
                break;
            }
            let a = PadicApprox::from_bigint(p, &acc, prec);
            let u = if a.vanishes() {
                PadicApprox::new(p, BigUint::zero(), prec - d)
            } else {
                a.div_exact_p(d).map_err(|_| Error::RelationViolated(format!("coefficient {j} below its schedule")))?
            };
            entries.push((d, u));
        }
        let stored = entries.len() as u64;
        Ok(DegenerateFn::new(p, entries, n)?.with_tail(hull_schedule(p, stored)))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("KFN1\n{} {}\n", self.p, self.base_precision);
        for (nu, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                out.push_str(&format!("{nu} 0 {} exact\n", c.precision()));
            } else {
                out.push_str(&format!("{nu} {} {}\n", c.residue(), c.precision()));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::UnsupportedCase(format!("malformed KFN1 record: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("KFN1") {
            return Err(bad("missing KFN1 tag"));
        }
        let head: Vec<u64> = lines
            .next()
            .ok_or_else(|| bad("missing header"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("header")))
            .collect::<Result<_>>()?;
        if head.len() != 2 {
            return Err(bad("header needs `p N`"));
        }
        let (p, n) = (head[0], head[1] as u32);
        let mut coeffs = Vec::new();
        for (i, line) in lines.enumerate() {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() < 3 || t[0].parse::<usize>().ok() != Some(i) {
                return Err(bad(line));
            }
            let prec: u32 = t[2].parse().map_err(|_| bad(line))?;
            if t.get(3) == Some(&"exact") {
                coeffs.push(PadicApprox::exact_zero(p, prec));
            } else {
                let r: BigUint = t[1].parse().map_err(|_| bad(line))?;
                coeffs.push(PadicApprox::new(p, r, prec));
            }
        }
        Self::from_coeffs(p, &coeffs, n)
    }
}

/// `min_{μ ≥ ν} (μ - ord_p(μ + 1))`, the monotone exponent schedule of `f/(ps)`.
pub fn hull_schedule(p: u64, nu: u64) -> u32 {
    let raw = |mu: u64| mu - ord_u64(p, mu + 1) as u64;
    let mut best = raw(nu);
    let mut mu = nu + 1;
    while mu - (floor_log(p, mu + 1) as u64) < best {
        best = best.min(raw(mu));
        mu += 1;
    }
    best as u32
}

/// `f(s) = Σ u_ν p^{δ(ν)} C(s, ν)` with a non-decreasing schedule δ.
///
/// Entries beyond the stored ones are only known to have exponent at least
/// `tail`, which by monotonicity is never below the last stored exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateFn {
    p: u64,
    entries: Vec<(u32, PadicApprox)>,
    base_precision: u32,
    tail: u32,
}

impl DegenerateFn {
    pub fn new(p: u64, entries: Vec<(u32, PadicApprox)>, base_precision: u32) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InsufficientEntries("no entries".into()));
        }
        if entries.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::UnsupportedCase("exponent schedule is not monotone".into()));
        }
        if let Some((_, u)) = entries.iter().find(|(_, u)| u.prime() != p) {
            return Err(Error::PrimeMismatch(p, u.prime()));
        }
        let tail = entries.last().unwrap().0;
        Ok(DegenerateFn { p, entries, base_precision, tail })
    }

    /// Raises the known lower bound for the exponents of unstored entries.
    pub fn with_tail(mut self, tail: u32) -> Self {
        self.tail = self.tail.max(tail);
        self
    }

    pub fn tail(&self) -> u32 {
        self.tail
    }

    /// A KS_{p,2} function seen as δ-degenerate with `δ(ν) = ν`.
    pub fn from_kummer(f: &KummerFn) -> Self {
        let entries = f.coeffs().iter().enumerate().map(|(nu, c)| (nu as u32, c.clone())).collect();
        DegenerateFn { p: f.prime(), entries, base_precision: f.precision(), tail: f.precision() }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.base_precision
    }

    pub fn entries(&self) -> &[(u32, PadicApprox)] {
        &self.entries
    }

    pub fn schedule(&self, nu: usize) -> Option<u32> {
        self.entries.get(nu).map(|e| e.0)
    }

    /// ϑ = min{ν : δ(ν) < ν} within the stored range.
    pub fn defect_index(&self) -> Option<usize> {
        self.entries.iter().enumerate().position(|(nu, (d, _))| (*d as usize) < nu)
    }

    /// η(n) = min{ν : δ(ν) ≥ n}, or an upper bound for it from the tail.
    pub fn eta(&self, n: u32) -> Option<usize> {
        self.entries.iter().position(|(d, _)| *d >= n).or_else(|| (self.tail >= n).then_some(self.entries.len()))
    }

    /// ϑ ≥ 3 and `δ(ν) ≥ 2 + ⌊log_p ν⌋` for `ν ≥ 3`, over the stored range.
    pub fn in_ks_d(&self) -> bool {
        let theta_ok = self.defect_index().map_or(true, |t| t >= 3);
        theta_ok && self.entries.iter().enumerate().skip(3).all(|(nu, (d, _))| *d >= 2 + floor_log(self.p, nu as u64))
    }

    /// The coefficient `a_ν = u_ν p^{δ(ν)}` of `C(s, ν)`.
    pub fn mahler_coeff(&self, nu: usize) -> Option<PadicApprox> {
        self.entries.get(nu).map(|(d, u)| u.mul_p_pow(*d))
    }

    /// `Δ_g`: the coefficient of `C(s,1)` divided by p, mod p. `None` when
    /// that coefficient is not divisible by p.
    pub fn delta(&self) -> Option<u64> {
        let (d, u) = self.entries.get(1)?;
        match d {
            0 => None,
            1 => Some(u.mod_p()),
            _ => Some(0),
        }
    }

    pub fn value_at_zero(&self) -> PadicApprox {
        let (d, u) = &self.entries[0];
        u.mul_p_pow(*d)
    }

    /// `g(s) mod p^n`.
    pub fn evaluate(&self, s: &PadicApprox, n: u32) -> Result<PadicApprox> {
        if n == 0 {
            return Err(Error::PrecisionExhausted("target precision 0".into()));
        }
        let eta = self.eta(n).ok_or_else(|| Error::InsufficientEntries(format!("no stored ν with δ(ν) ≥ {n}")))?;
        let p = self.p;
        let lift = s.to_bigint();
        let m = pow_big(p, n);
        let mut acc = BigUint::zero();
        for nu in 0..eta {
            let (d, u) = &self.entries[nu];
            let need = n - d;
            if !u.is_exact_zero() && u.precision() < need {
                return Err(Error::PrecisionExhausted(format!(
                    "entry {nu} known to {} digits, need {need}",
                    u.precision()
                )));
            }
            if !s.is_exact_zero() && s.precision() < need + floor_log(p, nu as u64) {
                return Err(Error::PrecisionExhausted("argument too coarse".into()));
            }
            if u.vanishes() {
                continue;
            }
            acc += u.residue() * binom_mod(&lift, nu as u64, p, need) * pow_big(p, *d);
        }
        Ok(PadicApprox::new(p, acc % m, n))
    }

    /// `s ↦ g(s + a)`; the schedule is unchanged.
    pub fn translate(&self, a: &PadicApprox) -> Result<DegenerateFn> {
        let p = self.p;
        let len = self.entries.len();
        let lift = a.to_bigint();
        let tail = self.entries[len - 1].0;
        let mut out = Vec::with_capacity(len);
        for j in 0..len {
            let dj = self.entries[j].0;
            let mut prec = tail;
            let mut terms = Vec::new();
            for nu in j..len {
                let (d, u) = &self.entries[nu];
                let k = (nu - j) as u64;
                let known_a = if a.is_exact_zero() { u32::MAX } else { a.precision().saturating_sub(floor_log(p, k)) };
                let known = if u.is_exact_zero() { u32::MAX } else { u.precision() };
                prec = prec.min(d.saturating_add(known.min(known_a)));
                terms.push((u.clone(), k, *d));
            }
            if prec <= dj {
                break;
            }
            let m = pow_big(p, prec);
            let mut acc = BigUint::zero();
            for (u, k, d) in terms {
                if u.vanishes() || d >= prec {
                    continue;
                }
                acc += u.residue() * binom_mod(&lift, k, p, prec - d) * pow_big(p, d);
            }
            let a_j = PadicApprox::new(p, acc % m, prec);
            let u_j =
                if a_j.vanishes() { PadicApprox::new(p, BigUint::zero(), prec - dj) } else { a_j.div_exact_p(dj)? };
            out.push((dj, u_j));
        }
        Ok(DegenerateFn::new(p, out, self.base_precision)?.with_tail(self.tail))
    }
}

/// Integer lift of a p-adic argument shifted by an integer, as a new approximation.
pub fn shifted(s: &PadicApprox, k: i64) -> PadicApprox {
    PadicApprox::from_bigint(s.prime(), &(s.to_bigint() + BigInt::from(k)), s.precision())
}

fn ord_bigint_nz(p: u64, x: &BigInt) -> u32 {
    ord_big(p, &abs_big(x)).expect("nonzero")
}

/// `ord_p` of a small signed integer, `None` for zero.
pub fn ord_i64(p: u64, x: i64) -> Option<u32> {
    if x == 0 {
        None
    } else {
        Some(ord_u64(p, x.unsigned_abs()))
    }
}

fn abs_big(x: &BigInt) -> BigUint {
    x.abs().to_biguint().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pa(p: u64, r: i64, n: u32) -> PadicApprox {
        PadicApprox::from_i64(p, r, n)
    }

    fn exp_fn(p: u64, a: i64, n: u32) -> KummerFn {
        KummerFn::exponential(&pa(p, a, n)).unwrap()
    }

    #[test]
    fn constant_and_exponential_coefficients() {
        let c = KummerFn::from_values(7, &vec![pa(7, 10, 5); 5], 5).unwrap();
        assert_eq!(c.coeffs()[0].residue(), &BigUint::from(10u8));
        assert!(c.coeffs()[1..].iter().all(|x| x.vanishes()));
        // a = 1 + p: every normalized coefficient is 1
        let f = exp_fn(5, 6, 8);
        assert!(f.coeffs().iter().all(|x| x.residue() == &BigUint::one()));
        let alt: Vec<_> = (0..6).map(|k| pa(5, k % 2, 6)).collect();
        assert!(matches!(KummerFn::from_values(5, &alt, 6), Err(Error::NotKummer(_))));
    }

    #[test]
    fn evaluation_paths_agree() {
        let p = 5;
        let f = exp_fn(p, 1 + 5 * 3, 6);
        for k in 0..6 {
            let v = f.evaluate(&pa(p, k, 6), 5).unwrap();
            assert_eq!(v, f.value_at_i64(k));
        }
        // f(-1) = a^{-1}
        let minus_one = pa(p, -1, 6);
        let inv = pa(p, 16, 6).invert_unit().unwrap();
        assert_eq!(f.evaluate(&minus_one, 5).unwrap(), inv);
        assert_eq!(f.evaluate_negative(1, 4).unwrap(), inv.truncate(5));
        assert_eq!(f.evaluate_negative(1, 0).unwrap(), f.value_at_i64(0).truncate(1));
        for (r, n) in [(4u64, 3u32), (3, 4), (24, 2)] {
            let direct = f.evaluate(&pa(p, -(r as i64), 6), n).unwrap();
            assert_eq!(f.evaluate_negative(r, n).unwrap(), direct, "r={r} n={n}");
        }
        assert!(matches!(f.evaluate_negative(4, 5), Err(Error::DivisionByP(_))));
        // f_p(s) = (1+p)^s - 1 vanishes at 0
        let g = f.compose_linear(&PadicApprox::exact_zero(p, 6), 0).unwrap();
        assert_eq!(g.value_at_i64(3), f.value_at_i64(0));
    }

    #[test]
    fn reflection_matches_evaluation() {
        let p = 7;
        let f = exp_fn(p, 8, 7).multiply(&exp_fn(p, 15, 7)).unwrap();
        let n = 5;
        for k in 0..=n {
            let (a, _) = f.reflect_coeffs(&pa(p, k as i64, 7), n).unwrap();
            for (nu, w) in a.iter().enumerate() {
                let want = if nu == k as usize { 1u8 } else { 0 };
                assert_eq!(w.residue(), &BigUint::from(want));
            }
        }
        for s in [123i64, -45, 9999, 7 * 7 * 3] {
            let s = pa(p, s, 7);
            let (a, reflected) = f.reflect_coeffs(&s, n).unwrap();
            let mut sum = PadicApprox::exact_zero(p, n + 1);
            for (nu, w) in a.iter().enumerate() {
                sum = sum.add(&w.mul(&f.value_at_i64(nu as i64)).unwrap()).unwrap();
            }
            assert_eq!(sum, f.evaluate(&s, n).unwrap());
            let ns = PadicApprox::from_bigint(p, &(BigInt::from(n) - s.to_bigint()), 7);
            assert_eq!(reflected, f.evaluate(&ns, n).unwrap());
        }
    }

    #[test]
    fn shift_and_ring_operations() {
        let p = 5;
        let f = exp_fn(p, 6, 6);
        assert_eq!(f.shift_op(0).unwrap(), f);
        let g = f.shift_op(2).unwrap();
        assert_eq!(g.value_at_i64(0).residue(), f.coeffs()[2].residue());
        assert!(g.coeffs().iter().all(|c| c.residue() == &BigUint::one()));
        let one = KummerFn::constant(&pa(p, 1, 6));
        assert_eq!(f.multiply(&one).unwrap(), f);
        let ab = exp_fn(p, 6, 6).multiply(&exp_fn(p, 11, 6)).unwrap();
        assert_eq!(ab, exp_fn(p, 66, 6));
        assert_eq!(
            exp_fn(p, 6, 6).invert().unwrap(),
            KummerFn::exponential(&pa(p, 6, 6).invert_unit().unwrap()).unwrap()
        );
        let u = KummerFn::constant(&pa(p, 3, 4));
        let inv = pa(p, 3, 4).invert_unit().unwrap();
        assert!(u.invert().unwrap().values(6).iter().all(|v| *v == inv));
    }

    #[test]
    fn product_second_coefficient_congruence() {
        for p in [3u64, 5, 7, 11] {
            let f = exp_fn(p, 1 + 2 * p as i64, 6).multiply(&KummerFn::constant(&pa(p, 2, 6))).unwrap();
            let g = exp_fn(p, 1 + 3 * p as i64, 6);
            let w = f.multiply(&g).unwrap();
            let c = |h: &KummerFn, i: usize| h.coeffs()[i].mod_p();
            let want = (c(&f, 0) * c(&g, 2) + 2 * c(&f, 1) * c(&g, 1) + c(&f, 2) * c(&g, 0)) % p;
            assert_eq!(c(&w, 2), want, "p={p}");
        }
    }

    #[test]
    fn p2_condition_survives_inversion() {
        let f = exp_fn(2, 1 + 4, 8);
        assert!(f.classify().p2_condition || f.coeffs()[2].mod_p() != 0);
        if f.coeffs()[2].mod_p() == 0 {
            assert_eq!(f.invert().unwrap().coeffs()[2].mod_p(), 0);
        }
        let g = exp_fn(2, 9, 8);
        assert_eq!(g.coeffs()[2].mod_p(), 0);
        assert_eq!(g.invert().unwrap().coeffs()[2].mod_p(), 0);
    }

    #[test]
    fn linear_composition() {
        let p = 7;
        let f = exp_fn(p, 8, 6).multiply(&exp_fn(p, 22, 6)).unwrap();
        let t = pa(p, 12345, 6);
        let g = f.compose_linear(&t, 1).unwrap();
        for nu in 0..4 {
            // translation keeps the Δ coefficients mod p for ν ≥ 1
            if nu >= 1 {
                assert_eq!(g.coeffs()[nu].mod_p(), f.coeffs()[nu].mod_p());
            }
        }
        let h = f.compose_linear(&pa(p, 3, 6), p as i64).unwrap();
        for (nu, c) in h.coeffs().iter().enumerate() {
            assert!(c.vanishes() || c.valuation() >= nu as u32);
        }
        let k = f.compose_linear(&pa(p, 2, 6), 0).unwrap();
        assert!(k.coeffs()[1..].iter().all(|c| c.vanishes()));
    }

    #[test]
    fn volkenborn_examples() {
        let c = KummerFn::constant(&pa(11, 5, 6));
        assert_eq!(c.volkenborn().unwrap().residue(), &BigUint::from(5u8));
        // f(s) = p s
        let p = 7;
        let coeffs: Vec<_> =
            (0..6u32).map(|nu| if nu == 1 { pa(p, 1, 6 - nu) } else { PadicApprox::exact_zero(p, 6 - nu) }).collect();
        let f = KummerFn::from_coeffs(p, &coeffs, 6).unwrap();
        let v = f.volkenborn().unwrap();
        let want = PadicApprox::from_ratio(
            p,
            &num_rational::BigRational::new(BigInt::from(-(p as i64)), BigInt::from(2)),
            v.precision(),
        )
        .unwrap();
        assert_eq!(v, want);
    }

    #[test]
    fn classification_examples() {
        let p = 5;
        assert_eq!(exp_fn(p, 6, 5).classify().label, Label::KsStar);
        // f_p(s) = (1+p)^s - 1
        let minus_one = KummerFn::constant(&pa(p, -1, 6));
        let fp = add(&exp_fn(p, 6, 6), &minus_one);
        let cl = fp.classify();
        assert_eq!(cl.label, Label::Wks0);
        assert_eq!(cl.lambda_f, Bound::Exact(1));
        // p times a unit function
        let pf: Vec<_> = exp_fn(p, 6, 6).values(6).iter().map(|v| v.mul_p_pow(1).truncate(6)).collect();
        let g = KummerFn::from_values(p, &pf, 6).unwrap();
        assert_eq!(g.classify().label, Label::PksStar);
        assert_eq!(g.classify().mu_f, Bound::Exact(1));
        // square of a WKS0 function
        let sq = fp.multiply(&fp).unwrap();
        let cl = sq.classify();
        assert_eq!((cl.lambda_f, cl.label), (Bound::Exact(2), Label::Ks2));
    }

    fn add(f: &KummerFn, g: &KummerFn) -> KummerFn {
        let n = f.precision().min(g.precision());
        let v: Vec<_> = (0..n as i64).map(|k| f.value_at_i64(k).add(&g.value_at_i64(k)).unwrap().truncate(n)).collect();
        KummerFn::from_values(f.prime(), &v, n).unwrap()
    }

    #[test]
    fn constant_norm_class() {
        // f(s) = p + p^3 C(s,1)·1: ord f(0) = 1, λ ≥ 2, ord c_1 = 2 > 0
        let p = 7;
        let coeffs = vec![pa(p, 7, 6), pa(p, 49, 5), pa(p, 7, 4), pa(p, 0, 3), pa(p, 1, 2), pa(p, 0, 1)];
        let f = KummerFn::from_coeffs(p, &coeffs, 6).unwrap();
        assert_eq!(f.classify().label, Label::KsC);
        let mut rng = 12345u64;
        for _ in 0..100 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let s = pa(p, (rng >> 20) as i64, 6);
            assert_eq!(f.evaluate(&s, 5).unwrap().valuation(), 1);
        }
    }

    #[test]
    fn hull_schedule_is_monotone_hull() {
        for p in [2u64, 3, 5, 7] {
            for nu in 0..300u64 {
                let brute = (nu..nu + 2000).map(|mu| mu - ord_u64(p, mu + 1) as u64).min().unwrap();
                assert_eq!(hull_schedule(p, nu) as u64, brute, "p={p} nu={nu}");
                assert!(hull_schedule(p, nu) <= hull_schedule(p, nu + 1));
            }
        }
    }

    #[test]
    fn divide_out_zero_on_fp() {
        for p in [5u64, 7, 13] {
            let n = 12;
            let fp = add(&exp_fn(p, 1 + p as i64, n), &KummerFn::constant(&pa(p, -1, n)));
            let g = fp.divide_out_zero().unwrap();
            assert!(g.defect_index().map_or(true, |t| t >= p as usize - 1));
            assert!(g.in_ks_d());
            // p s g(s) = f(s)
            for s in 1..=5i64 {
                let gs = g.evaluate(&pa(p, s, n), n - 2).unwrap();
                let lhs = gs.mul_int(&BigInt::from(p as i64 * s)).truncate(n - 2);
                assert_eq!(lhs, fp.value_at_i64(s).truncate(n - 2));
            }
            // g(0) = ∫ ∇f
            let v = fp.shift_op(1).unwrap().volkenborn().unwrap();
            let g0 = g.value_at_zero();
            let k = v.precision().min(g0.precision());
            assert!(v.eq_mod(&g0, k));
            // explicit series g(s) = 1 + Σ p^ν/(ν+1) C(s-1, ν)
            for s in [2i64, 9, 40] {
                let mut acc = num_rational::BigRational::zero();
                for nu in 0..=(s - 1) as u64 {
                    let term = num_rational::BigRational::new(
                        BigInt::from(pow_big(p, nu as u32))
                            * num_integer::binomial(BigInt::from(s - 1), BigInt::from(nu)),
                        BigInt::from(nu + 1),
                    );
                    acc += term;
                }
                let want = PadicApprox::from_ratio(p, &acc, n - 3).unwrap();
                assert_eq!(g.evaluate(&pa(p, s, n), n - 3).unwrap(), want, "p={p} s={s}");
            }
        }
        let unit = exp_fn(5, 6, 5);
        assert_eq!(unit.divide_out_zero().unwrap_err(), Error::NonzeroConstant);
    }

    #[test]
    fn degenerate_translation_keeps_schedule() {
        let p = 7;
        let n = 12;
        let fp = add(&exp_fn(p, 8, n), &KummerFn::constant(&pa(p, -1, n)));
        let g = fp.divide_out_zero().unwrap();
        let t = pa(p, 3, n);
        let h = g.translate(&t).unwrap();
        for (nu, (d, _)) in h.entries().iter().enumerate() {
            assert_eq!(Some(*d), g.schedule(nu));
        }
        for s in 0..4i64 {
            let a = h.evaluate(&pa(p, s, n), 8).unwrap();
            let b = g.evaluate(&pa(p, s + 3, n), 8).unwrap();
            assert_eq!(a, b);
        }
        let zero = DegenerateFn::new(p, vec![(0, pa(p, 0, 5)), (1, pa(p, 0, 4)), (9, pa(p, 0, 1))], 5).unwrap();
        assert!(zero.evaluate(&pa(p, 11, 9), 5).unwrap().vanishes());
        assert!(matches!(zero.evaluate(&pa(p, 11, 9), 12), Err(Error::InsufficientEntries(_))));
    }

    #[test]
    fn text_round_trip() {
        let f = exp_fn(11, 12, 5).multiply(&KummerFn::constant(&PadicApprox::exact_zero(11, 5))).unwrap();
        assert_eq!(KummerFn::from_text(&f.to_text()).unwrap(), f);
        let g = exp_fn(13, 1 + 13 * 5, 7);
        let text = g.to_text();
        assert!(text.starts_with("KFN1\n13 7\n0 1 7\n"));
        assert_eq!(KummerFn::from_text(&text).unwrap(), g);
        assert!(KummerFn::from_text("KFN2\n").is_err());
    }

    fn wks0_sample(p: u64, a: i64, b: i64, n: u32) -> KummerFn {
        // p (s - b) a^s  with a ∈ 1 + pZ_p
        let e = exp_fn(p, a, n);
        let v: Vec<_> = (0..n as i64).map(|k| e.value_at_i64(k).mul_int(&BigInt::from(p as i64 * (k - b)))).collect();
        KummerFn::from_values(p, &v, n).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kummer_congruence(p in prop::sample::select(vec![3u64, 5, 7]), a in 0i64..50,
                              s in 0i64..100_000, k in 1i64..50, n in 1u32..5) {
            let f = exp_fn(p, 1 + p as i64 * a, 7).multiply(&KummerFn::constant(&pa(p, 2 + a, 7))).unwrap();
            let t = s + k * (p as i64).pow(n);
            let fs = f.evaluate(&pa(p, s, 7), 6).unwrap();
            let ft = f.evaluate(&pa(p, t, 7), 6).unwrap();
            prop_assert!(fs.eq_mod(&ft, n + 1));
        }

        #[test]
        fn strong_kummer_for_wks0(p in prop::sample::select(vec![5u64, 7, 11]), a in 0i64..30,
                                  b in 0i64..30, s in 0i64..1_000_000, t in 0i64..1_000_000) {
            prop_assume!(s != t);
            let f = wks0_sample(p, 1 + p as i64 * a, b, 9);
            prop_assert_eq!(f.classify().label, Label::Wks0);
            let diff = f.value_at_i64(s).sub(&f.value_at_i64(t)).unwrap();
            let want = 1 + ord_i64(p, s - t).unwrap();
            prop_assume!(want < 9);
            prop_assert_eq!(diff.valuation(), want);
            // derivative congruence
            let q = diff.div_exact_p(want).unwrap().mod_p();
            let u = (s - t).unsigned_abs() / p.pow(want - 1);
            let sign_unit = if s > t { u % p } else { (p - u % p) % p };
            prop_assert_eq!(q, (f.delta().unwrap() * sign_unit) % p);
        }

        #[test]
        fn round_trip(p in prop::sample::select(vec![3u64, 5, 7]), a in 0i64..40, c in 1i64..40) {
            let f = exp_fn(p, 1 + p as i64 * a, 6).multiply(&KummerFn::constant(&pa(p, c, 6))).unwrap();
            let g = KummerFn::from_values(p, &f.values(6), 6).unwrap();
            prop_assert_eq!(f, g);
        }

        #[test]
        fn convolution_is_kummer(p in prop::sample::select(vec![3u64, 5, 7]), a in 0i64..30,
                                 b in 0i64..30, s in 0i64..1000) {
            // Σ C(n,ν) (-1)^(n-ν) f(s+ν) g(s+n-ν)
            let f = exp_fn(p, 1 + p as i64 * a, 7);
            let g = wks0_sample(p, 1 + p as i64 * b, 3, 7);
            for n in 1..=5i64 {
                let mut acc = BigInt::zero();
                for nu in 0..=n {
                    let term = num_integer::binomial(BigInt::from(n), BigInt::from(nu))
                        * f.value_at_i64(s + nu).to_bigint()
                        * g.value_at_i64(s + n - nu).to_bigint();
                    if (n - nu) % 2 == 0 { acc += term } else { acc -= term }
                }
                let d = PadicApprox::from_bigint(p, &acc, 7);
                prop_assert!(d.valuation() >= n as u32);
            }
        }

        #[test]
        fn power_of_reflection_sum(p in prop::sample::select(vec![5u64, 7]), a in 0i64..30,
                                   s in 0i64..100_000, r in 1u64..6) {
            let n = 4;
            let f = exp_fn(p, 1 + p as i64 * a, 6).multiply(&KummerFn::constant(&pa(p, 3, 6))).unwrap();
            let (w, _) = f.reflect_coeffs(&pa(p, s, 6), n).unwrap();
            let mut lhs = PadicApprox::exact_zero(p, n + 1);
            let mut rhs = PadicApprox::exact_zero(p, n + 1);
            for (nu, a_nu) in w.iter().enumerate() {
                let fv = f.value_at_i64(nu as i64).truncate(n + 1);
                lhs = lhs.add(&fv.mul(a_nu).unwrap()).unwrap();
                rhs = rhs.add(&fv.pow(r).mul(a_nu).unwrap()).unwrap();
            }
            prop_assert_eq!(lhs.pow(r), rhs);
        }

        #[test]
        fn lambda_of_products(p in prop::sample::select(vec![5u64, 7, 11]), a in 0i64..20,
                              b in 0i64..20, c in 1i64..20) {
            let f = wks0_sample(p, 1 + p as i64 * a, 1, 8);
            let g = wks0_sample(p, 1 + p as i64 * b, 2, 8);
            let fg = f.multiply(&g).unwrap();
            prop_assert_eq!(fg.classify().lambda_f, Bound::Exact(2));
            let unit = exp_fn(p, 1 + p as i64 * b, 8).multiply(&KummerFn::constant(&pa(p, c, 8))).unwrap();
            prop_assume!(unit.coeffs()[0].is_unit());
            prop_assert_eq!(f.multiply(&unit).unwrap().classify().lambda_f, Bound::Exact(1));
            prop_assert_eq!(fg.multiply(&unit).unwrap().classify().lambda_f, Bound::Exact(2));
        }
    }
}
