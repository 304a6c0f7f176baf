//! p-adic L-functions `L_{p,l}(s, χ)` of quadratic characters as Kummer
//! functions, scanners for irregular and exceptional pairs, and the
//! factorization report for `|L(1-n, χ)|`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{
    inv_mod, is_probable_prime_big, mul_mod, ord_u64, pow_big, pow_mod, primes_in, smallest_prime_factors,
};
use crate::charnum::{gen_bernoulli, removed_bernoulli_mod, Backend, QuadChar};
use crate::error::{Error, Result};
use crate::mahler::{Bound, DegenerateFn, KummerFn, Label};
use crate::padic::{DigitExpansion, PadicApprox};
use crate::solver::{find_zero, ZeroMethod};

/// `φ(q)` with `q = 4` for `p = 2` and `q = p` otherwise.
pub fn phi_q(p: u64) -> u64 {
    if p == 2 {
        2
    } else {
        p - 1
    }
}

/// `L_p(1-n, χ) = -(1 - χ(p) p^(n-1)) B_{n,χ}/n mod p^prec`, backend chosen
/// automatically.
pub fn lp_value(n: u64, chi: QuadChar, p: u64, prec: u32) -> Result<PadicApprox> {
    lp_value_with(n, chi, p, prec, Backend::Auto)
}

pub fn lp_value_with(n: u64, chi: QuadChar, p: u64, prec: u32, backend: Backend) -> Result<PadicApprox> {
    if n == 0 {
        return Err(Error::UnsupportedCase("L_p(1) is not a Bernoulli value".into()));
    }
    if n % 2 != chi.parity() % 2 && n > 1 {
        return Ok(PadicApprox::exact_zero(p, prec));
    }
    if chi.is_principal() && n % (p - 1) == 0 && n > 1 {
        return Err(Error::NotPIntegral(format!("ζ_p(1-{n}) at p = {p}")));
    }
    let e = ord_u64(p, n);
    let beta = removed_bernoulli_mod(n, chi, p, prec + e, backend)?;
    if beta.is_exact_zero() {
        return Ok(PadicApprox::exact_zero(p, prec));
    }
    let q = beta.div_exact_p(e).map_err(|_| Error::NotPIntegral(format!("L_p(1-{n}, {chi}) at p = {p}")))?;
    let unit = PadicApprox::from_u64(p, n / p.pow(e), prec).invert_unit()?;
    Ok(q.mul(&unit)?.neg())
}

/// Parameters of `L_{p,l}(s, χ) = L_p(1 - (δ_χ + l + φ(q) s), χ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LplSpec {
    pub p: u64,
    pub l: u64,
    pub chi: QuadChar,
    pub precision: u32,
}

impl LplSpec {
    pub fn new(p: u64, l: u64, chi: QuadChar, precision: u32) -> Result<Self> {
        let spec = LplSpec { p, l, chi, precision };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let p = self.p;
        if !crate::arith::is_prime(p) {
            return Err(Error::UnsupportedCase(format!("{p} is not prime")));
        }
        if self.chi.conductor() % p == 0 {
            return Err(Error::UnsupportedCase(format!("p = {p} divides the conductor of {}", self.chi)));
        }
        if self.l % 2 != 0 || self.l + 2 > phi_q(p) {
            return Err(Error::UnsupportedCase(format!("l must be even with 0 <= l <= {}", phi_q(p) - 2)));
        }
        if self.chi.is_principal() && self.l == 0 {
            return Err(Error::UnsupportedCase("the principal character has a pole at l = 0".into()));
        }
        if self.precision == 0 {
            return Err(Error::PrecisionExhausted("precision 0".into()));
        }
        Ok(())
    }

    /// Whether `s = 0` corresponds to `L_p(1, χ)` and the values are taken at
    /// `s = 1..=N` instead.
    pub fn shifted(&self) -> bool {
        self.l == 0 && self.chi.parity() == 0 && !self.chi.is_principal()
    }

    /// The Bernoulli index `δ_χ + l + φ(q) s`.
    pub fn index(&self, s: u64) -> u64 {
        self.chi.parity() + self.l + phi_q(self.p) * s
    }
}

/// `L_{p,l}(·, χ)` from its values at precision `N`.
pub fn build_lpl(spec: &LplSpec) -> Result<KummerFn> {
    spec.validate()?;
    let (p, n) = (spec.p, spec.precision);
    let start = u64::from(spec.shifted());
    let values =
        (start..start + n as u64).map(|s| lp_value(spec.index(s), spec.chi, p, n)).collect::<Result<Vec<_>>>()?;
    let f = KummerFn::from_values(p, &values, n)?;
    if spec.shifted() {
        // values were g(t) = f(t + 1); recover f(s) = g(s - 1)
        return f.compose_linear(&PadicApprox::from_i64(p, -1, n), 1);
    }
    Ok(f)
}

/// `Π L_{p,l}(·, χ_i)` for characters of equal parity.
pub fn build_product_l(specs: &[LplSpec]) -> Result<KummerFn> {
    let first = specs.first().ok_or_else(|| Error::UnsupportedCase("empty product".into()))?;
    for s in specs {
        if (s.p, s.l, s.precision) != (first.p, first.l, first.precision) {
            return Err(Error::UnsupportedCase("factors must share p, l and precision".into()));
        }
        if s.chi.parity() != first.chi.parity() {
            return Err(Error::ParityMismatch(format!("{} and {}", first.chi, s.chi)));
        }
    }
    let mut acc = build_lpl(first)?;
    for s in &specs[1..] {
        acc = acc.multiply(&build_lpl(s)?)?;
    }
    Ok(acc)
}

/// `L_{p,0}(s, χ)/(p s)` for odd `χ` with `χ(p) = 1`.
pub fn build_tilde_l(p: u64, chi: QuadChar, precision: u32) -> Result<DegenerateFn> {
    if p <= 3 {
        return Err(Error::UnsupportedCase("needs p > 3".into()));
    }
    if chi.parity() != 1 || chi.eval_u(p) != 1 {
        return Err(Error::UnsupportedCase(format!("{chi} must be odd with χ({p}) = 1")));
    }
    build_lpl(&LplSpec::new(p, 0, chi, precision)?)?.divide_out_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScanKind {
    Irregular,
    Exceptional,
}

impl ScanKind {
    pub fn header(self) -> &'static str {
        match self {
            ScanKind::Irregular => "IRR1",
            ScanKind::Exceptional => "EXC1",
        }
    }
}

/// One scanner hit with the diagnostics of `L_{p,l}` at precision 3.
///
/// `ord` is `ord_p L_{p,l}(0, χ)` for irregular pairs and
/// `ord_p L_{p,0}(1, χ)` for exceptional ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub p: u64,
    pub l: u64,
    pub chi: QuadChar,
    pub ord: u32,
    pub delta: u64,
    pub lambda: Bound,
    pub label: Label,
}

impl fmt::Display for PairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {} {} {}", self.p, self.l, self.chi.discriminant(), self.ord, self.delta, self.lambda)
    }
}

/// Options for the scanners.
#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Progress file rewritten every [`CHECKPOINT_EVERY`] primes; an
    /// existing file is resumed.
    pub checkpoint: Option<PathBuf>,
}

pub const CHECKPOINT_EVERY: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanResult {
    pub kind: ScanKind,
    pub chi: QuadChar,
    pub through: u64,
    pub pairs: Vec<PairReport>,
}

impl ScanResult {
    /// `i_χ(p)`, the number of irregular indices at `p`.
    pub fn index_of(&self, p: u64) -> usize {
        self.pairs.iter().filter(|r| r.p == p).count()
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.pairs.iter().map(|r| r.p).collect();
        v.dedup();
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n# {} through {}\n", self.kind.header(), self.chi, self.through);
        for r in &self.pairs {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::UnsupportedCase(format!("malformed scan file: {m}"));
        let mut lines = text.lines();
        let kind = match lines.next() {
            Some("IRR1") => ScanKind::Irregular,
            Some("EXC1") => ScanKind::Exceptional,
            _ => return Err(bad("header")),
        };
        let meta = lines.next().ok_or_else(|| bad("progress line"))?;
        let parts: Vec<&str> = meta.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "#" || parts[2] != "through" {
            return Err(bad(meta));
        }
        let chi: QuadChar = parts[1].parse()?;
        let through: u64 = parts[3].parse().map_err(|_| bad(meta))?;
        let mut pairs = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(bad(line));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad(line));
            let lambda = match f[5].strip_prefix(">=") {
                Some(v) => Bound::AtLeast(num(v)? as u32),
                None => Bound::Exact(num(f[5])? as u32),
            };
            let label = match (kind, lambda) {
                (ScanKind::Exceptional, Bound::Exact(2)) => Label::Ks2,
                (_, Bound::Exact(1)) => Label::Wks0,
                _ => Label::Indeterminate,
            };
            pairs.push(PairReport {
                p: num(f[0])?,
                l: num(f[1])?,
                chi: QuadChar::new(f[2].parse().map_err(|_| bad(line))?)?,
                ord: num(f[3])? as u32,
                delta: num(f[4])?,
                lambda,
                label,
            });
        }
        Ok(ScanResult { kind, chi, through, pairs })
    }
}

/// Fermat quotients `q(b) mod p` for `1 <= b < p`, additive over a smallest
/// prime factor table so only primes need a modular power.
fn fermat_quotients_mod_p(p: u64, spf: &[u32]) -> Vec<u64> {
    let p2 = p * p;
    let mut q = vec![0u64; p as usize];
    for b in 2..p as usize {
        let s = spf[b] as usize;
        q[b] = if s == b { (pow_mod(b as u64, p - 1, p2) + p2 - 1) % p2 / p } else { (q[s] + q[b / s]) % p };
    }
    q
}

fn inverses_mod_p(p: u64) -> Vec<u64> {
    let mut inv = vec![0u64; p as usize];
    if p > 1 {
        inv[1] = 1;
    }
    for b in 2..p as usize {
        inv[b] = (p - mul_mod(p / b as u64, inv[(p % b as u64) as usize], p)) % p;
    }
    inv
}

/// `A_j(b) = Σ_{k<f} χ(b + k p) k^j mod p` for `j = 0, 1, 2`.
fn chi_moments(chi: QuadChar, p: u64, b: u64, table: &[i8]) -> [u64; 3] {
    let f = chi.conductor();
    let mut a = [0u64; 3];
    for k in 0..f {
        let c = table[((b + k * p) % f) as usize];
        if c == 0 {
            continue;
        }
        let km = k % p;
        let pw = [1, km, km * km % p];
        for j in 0..3 {
            a[j] = if c > 0 { (a[j] + pw[j]) % p } else { (a[j] + p - pw[j]) % p };
        }
    }
    a
}

fn char_table(chi: QuadChar) -> Vec<i8> {
    (0..chi.conductor()).map(|a| chi.eval_u(a)).collect()
}

/// `T_{p,l}(0, χ) mod p` for every even `l` in `[2, p-3]`, indexed by `l`.
///
/// Writing `a = b + k p` gives `q(a) ≡ q(b) - k/b` and `a^e ≡ b^e`, so the
/// sum over `a <= p f` collapses to one over `b < p`.
pub fn t_values_mod_p(p: u64, chi: QuadChar, spf: &[u32]) -> Vec<(u64, u64)> {
    let q = fermat_quotients_mod_p(p, spf);
    let inv = inverses_mod_p(p);
    let table = char_table(chi);
    let f_inv = inv_mod(chi.conductor() % p, p).unwrap();
    let delta = chi.parity();
    let w: Vec<u64> = (1..p)
        .map(|b| {
            let a = chi_moments(chi, p, b, &table);
            (mul_mod(q[b as usize], a[0], p) + p - mul_mod(a[1], inv[b as usize], p)) % p
        })
        .collect();
    let mut pw: Vec<u64> = (1..p).map(|b| pow_mod(b, 2 + delta, p)).collect();
    let sq: Vec<u64> = (1..p).map(|b| b * b % p).collect();
    let mut out = Vec::new();
    let mut l = 2;
    while l + 3 <= p {
        let mut s = 0u64;
        for i in 0..w.len() {
            s = (s + mul_mod(w[i], pw[i], p)) % p;
            pw[i] = mul_mod(pw[i], sq[i], p);
        }
        out.push((l, mul_mod(s, f_inv, p)));
        l += 2;
    }
    out
}

/// `T²_{p,0}(0, χ) mod p` for odd `χ`, which vanishes exactly at the
/// exceptional pairs.
pub fn t2_value_mod_p(p: u64, chi: QuadChar, spf: &[u32]) -> u64 {
    let q = fermat_quotients_mod_p(p, spf);
    let inv = inverses_mod_p(p);
    let table = char_table(chi);
    let mut s = 0u64;
    for b in 1..p {
        let a = chi_moments(chi, p, b, &table);
        let qb = q[b as usize];
        // b q² A0 - 2 q A1 + A2 / b
        let t0 = mul_mod(mul_mod(b, mul_mod(qb, qb, p), p), a[0], p);
        let t1 = mul_mod(2 * qb % p, a[1], p);
        let t2 = mul_mod(a[2], inv[b as usize], p);
        s = (s + t0 + p - t1 + t2) % p;
    }
    mul_mod(s, inv_mod(chi.conductor() % p, p).unwrap(), p)
}

fn diagnostics(p: u64, l: u64, chi: QuadChar, kind: ScanKind) -> Result<PairReport> {
    let f = build_lpl(&LplSpec::new(p, l, chi, 3)?)?;
    let c = f.classify();
    let ord = match kind {
        ScanKind::Irregular => c.ord_f0,
        ScanKind::Exceptional => f.value_at_i64(1).valuation(),
    };
    Ok(PairReport { p, l, chi, ord, delta: c.delta_f, lambda: c.lambda_f, label: c.label })
}

fn scan_prime(p: u64, chi: QuadChar, kind: ScanKind, spf: &[u32]) -> Result<Vec<PairReport>> {
    match kind {
        ScanKind::Irregular => {
            let mut hits = Vec::new();
            for (l, t) in t_values_mod_p(p, chi, spf) {
                if t != 0 {
                    continue;
                }
                // slow path confirmation through Bernoulli numbers
                if !(lp_value(chi.parity() + l, chi, p, 2)?.mod_p() == 0) {
                    return Err(Error::RelationViolated(format!("T and L disagree mod {p} at l = {l}")));
                }
                hits.push(diagnostics(p, l, chi, kind)?);
            }
            Ok(hits)
        }
        ScanKind::Exceptional => {
            if chi.eval_u(p) != 1 || t2_value_mod_p(p, chi, spf) != 0 {
                return Ok(Vec::new());
            }
            let v = lp_value(chi.parity() + p - 1, chi, p, 3)?;
            if v.valuation() < 2 {
                return Err(Error::RelationViolated(format!("T² and L_{{p,0}}(1) disagree at {p}")));
            }
            Ok(vec![diagnostics(p, 0, chi, kind)?])
        }
    }
}

fn eligible(p: u64, chi: QuadChar) -> bool {
    p > 3 && chi.conductor() % p != 0
}

/// Scans primes `p <= pmax` for χ-irregular (`kind = Irregular`) or
/// χ-exceptional pairs. Results are sorted by `(p, l)`.
pub fn scan(kind: ScanKind, chi: QuadChar, pmax: u64, opts: &ScanOptions) -> Result<ScanResult> {
    if kind == ScanKind::Exceptional && chi.parity() != 1 {
        return Err(Error::UnsupportedCase("exceptional pairs need an odd character".into()));
    }
    let mut result = ScanResult { kind, chi, through: 3, pairs: Vec::new() };
    if let Some(path) = &opts.checkpoint {
        if let Ok(text) = std::fs::read_to_string(path) {
            let prev = ScanResult::from_text(&text)?;
            if prev.kind == kind && prev.chi == chi {
                result = prev;
                result.pairs.retain(|r| r.p <= pmax);
            }
        }
    }
    if result.through >= pmax {
        return Ok(result);
    }
    let spf = smallest_prime_factors(pmax as usize);
    let primes: Vec<u64> = primes_in(result.through + 1, pmax).into_iter().filter(|&p| eligible(p, chi)).collect();
    for chunk in primes.chunks(CHECKPOINT_EVERY) {
        let found: Vec<Vec<PairReport>> =
            chunk.par_iter().map(|&p| scan_prime(p, chi, kind, &spf)).collect::<Result<_>>()?;
        result.pairs.extend(found.into_iter().flatten());
        result.through = *chunk.last().unwrap();
        if let Some(path) = &opts.checkpoint {
            write_atomic(path, &result.to_text())?;
        }
    }
    result.through = pmax;
    if let Some(path) = &opts.checkpoint {
        write_atomic(path, &result.to_text())?;
    }
    Ok(result)
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let io = |e: std::io::Error| Error::UnsupportedCase(format!("cannot write {}: {e}", path.display()));
    std::fs::write(&tmp, text).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

pub fn scan_irregular(chi: QuadChar, pmax: u64) -> Result<ScanResult> {
    scan(ScanKind::Irregular, chi, pmax, &ScanOptions::default())
}

pub fn scan_exceptional(chi: QuadChar, pmax: u64) -> Result<ScanResult> {
    scan(ScanKind::Exceptional, chi, pmax, &ScanOptions::default())
}

/// Which factor of `|L|_∞` a prime belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorClass {
    /// `p ∤ f_χ` and `p - 1 ∤ n`: the irregular part `𝔦`.
    Irregular,
    /// `p | f_χ`: the conductor part `𝔖`.
    Conductor,
    /// `p ∤ f_χ` and `p - 1 | n`: the part `𝔇`.
    Denominator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConjectureStatus {
    /// `ord_p L = 1 + ord_p(s - ξ)` holds.
    Agree,
    Disagree {
        predicted: u32,
    },
    /// `L_{p,l}` is not in WKS0, so no zero to compare with.
    NotWks0,
    /// The prime is outside the checked range.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactor {
    pub p: u64,
    /// Total valuation over all character factors.
    pub ord: i64,
    pub class: FactorClass,
    /// For irregular primes: whether `(p, n mod (p-1))` was confirmed to be
    /// an irregular pair from the independent value `L_{p,l}(0, χ)`.
    pub pair_confirmed: Option<bool>,
    pub conjecture: Vec<ConjectureStatus>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub n: u64,
    pub chars: Vec<QuadChar>,
    pub value: BigRational,
    pub factors: Vec<PrimeFactor>,
    /// Part of the numerator left after trial division when it is not a
    /// probable prime; 1 when the factorization is complete.
    pub unfactored: BigUint,
    pub i_part: BigRational,
    pub s_part: BigRational,
    pub d_part: BigRational,
    pub identity_holds: bool,
    pub i_integral: bool,
}

impl StructureReport {
    /// The theorem-level checks: the product identity, integrality of `𝔦`
    /// and every irregular prime belonging to an irregular pair.
    pub fn theorem_holds(&self) -> bool {
        self.identity_holds && self.i_integral && self.factors.iter().all(|f| f.pair_confirmed != Some(false))
    }
}

/// Primes up to this bound are found by trial division.
pub const TRIAL_BOUND: u64 = 100_000;
/// Conjectural linear forms are evaluated for primes up to this bound.
pub const CONJECTURE_PMAX: u64 = 1000;

fn strip_prime(x: &mut BigUint, p: u64) -> u32 {
    let bp = BigUint::from(p);
    let mut e = 0;
    loop {
        let (q, r) = x.div_rem(&bp);
        if !r.is_zero() {
            return e;
        }
        *x = q;
        e += 1;
    }
}

fn classify_prime(p: u64, n: u64, chars: &[QuadChar]) -> FactorClass {
    if chars.iter().any(|c| c.conductor() % p == 0) {
        FactorClass::Conductor
    } else if n % (p - 1) == 0 {
        FactorClass::Denominator
    } else {
        FactorClass::Irregular
    }
}

fn pow_rational(p: u64, e: i64) -> BigRational {
    let b = BigInt::from(pow_big(p, e.unsigned_abs() as u32));
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// Factors `|Π_χ L(1 - (δ + n), χ)|` into its `𝔦`, `𝔖` and `𝔇` parts and
/// compares each irregular prime with the zero of `L_{p,l}`.
pub fn structure_check(n: u64, chars: &[QuadChar]) -> Result<StructureReport> {
    let first = chars.first().ok_or_else(|| Error::UnsupportedCase("no characters".into()))?;
    if n % 2 != 0 || n == 0 {
        return Err(Error::UnsupportedCase("n must be even and positive".into()));
    }
    if chars.iter().any(|c| c.parity() != first.parity()) {
        return Err(Error::ParityMismatch("characters differ in parity".into()));
    }
    let parts: Vec<BigRational> = chars
        .iter()
        .map(|&c| {
            let m = c.parity() + n;
            Ok(-gen_bernoulli(m, c)? / BigRational::from_integer(BigInt::from(m)))
        })
        .collect::<Result<_>>()?;
    let value: BigRational = parts.iter().fold(BigRational::one(), |a, b| a * b);
    if value.is_zero() {
        return Err(Error::UnsupportedCase("L-value vanishes".into()));
    }
    let mut num = value.numer().abs().to_biguint().unwrap();
    let mut den = value.denom().to_biguint().unwrap();
    let mut ords: BTreeMap<u64, i64> = BTreeMap::new();
    for p in primes_in(2, TRIAL_BOUND) {
        let e = strip_prime(&mut num, p) as i64 - strip_prime(&mut den, p) as i64;
        if e != 0 {
            ords.insert(p, e);
        }
    }
    if !den.is_one() {
        return Err(Error::RelationViolated("denominator has a prime above the trial bound".into()));
    }
    let mut unfactored = BigUint::one();
    if !num.is_one() {
        match num.to_u64() {
            Some(q) if is_probable_prime_big(&num) => {
                ords.insert(q, 1);
            }
            _ if is_probable_prime_big(&num) => {
                // a prime beyond u64 cannot satisfy p - 1 | n, so it is irregular
                unfactored = num.clone();
            }
            _ => unfactored = num.clone(),
        }
    }
    let mut factors = Vec::new();
    let (mut i_part, mut s_part, mut d_part) = (BigRational::one(), BigRational::one(), BigRational::one());
    let mut i_integral = true;
    for (&p, &e) in &ords {
        let class = classify_prime(p, n, chars);
        let mut pair_confirmed = None;
        let mut conjecture = Vec::new();
        match class {
            FactorClass::Irregular => {
                i_part *= pow_rational(p, e);
                i_integral &= e > 0;
                if p <= TRIAL_BOUND {
                    let l = n % (p - 1);
                    let mut ok = true;
                    for (c, part) in chars.iter().zip(&parts) {
                        let e_c = crate::padic::ord_rational(p, part).unwrap_or(0);
                        if e_c > 0 {
                            ok &= lp_value(c.parity() + l, *c, p, 1)?.vanishes();
                        }
                        if p <= CONJECTURE_PMAX && e_c > 0 {
                            conjecture.push(conjecture_status(p, l, n, *c, e_c as u32)?);
                        }
                    }
                    pair_confirmed = Some(ok);
                }
                if p > CONJECTURE_PMAX {
                    conjecture.push(ConjectureStatus::Skipped);
                }
            }
            FactorClass::Conductor => s_part *= pow_rational(p, e),
            FactorClass::Denominator => d_part *= pow_rational(p, e),
        }
        factors.push(PrimeFactor { p, ord: e, class, pair_confirmed, conjecture });
    }
    let cof = BigRational::from_integer(BigInt::from(unfactored.clone()));
    if !unfactored.is_one() {
        i_part *= cof.clone();
    }
    let abs = BigRational::new(value.numer().abs(), value.denom().clone());
    let identity_holds = &i_part * &s_part * &d_part == abs;
    Ok(StructureReport {
        n,
        chars: chars.to_vec(),
        value,
        factors,
        unfactored,
        i_part,
        s_part,
        d_part,
        identity_holds,
        i_integral,
    })
}

fn conjecture_status(p: u64, l: u64, n: u64, chi: QuadChar, ord: u32) -> Result<ConjectureStatus> {
    let digits = ord + 1;
    let f = build_lpl(&LplSpec::new(p, l, chi, digits + 1)?)?;
    if f.classify().label != Label::Wks0 {
        return Ok(ConjectureStatus::NotWks0);
    }
    let xi = find_zero(&f, digits, ZeroMethod::Coefficients)?.digits.value();
    let s = BigInt::from((n - l) / phi_q(p));
    let diff = (s - BigInt::from(xi)).mod_floor(&BigInt::from(pow_big(p, digits)));
    let predicted = 1 + crate::padic::ord_bigint(p, &diff).unwrap_or(digits).min(digits);
    Ok(if predicted == ord { ConjectureStatus::Agree } else { ConjectureStatus::Disagree { predicted } })
}

/// `n_ν = l + φ(q) s_ν`, with `s_ν` the least `s >= 0` such that
/// `s ≡ ξ mod p^(ν-1)` and `s ≢ ξ mod p^ν`.
pub fn smallest_indices_from_digits(xi: &DigitExpansion, l: u64, nu_max: usize) -> Result<Vec<u64>> {
    if xi.len() < nu_max {
        return Err(Error::DigitDepthExceeded { needed: nu_max, have: xi.len() });
    }
    let p = xi.p;
    let mut out = Vec::with_capacity(nu_max);
    let mut x = 0u64;
    let mut pk = 1u64;
    for nu in 1..=nu_max {
        let s = if xi.digits[nu - 1] == 0 { x + pk } else { x };
        out.push(l + phi_q(p) * s);
        x += xi.digits[nu - 1] * pk;
        pk *= p;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallestIndices {
    pub xi: DigitExpansion,
    pub indices: Vec<u64>,
    /// `ord_p L_p(1 - (δ + n_ν)) == ν`, computed directly.
    pub verified: Vec<bool>,
    /// No smaller `n ≡ l` attains valuation `ν`; `None` where not checked.
    pub minimal: Vec<Option<bool>>,
}

/// Smallest indices with `ord_p L_p(1 - (δ + n), χ) = ν` along `n ≡ l`,
/// checking minimality by brute force for `ν <= check_minimal`.
pub fn smallest_indices(p: u64, l: u64, chi: QuadChar, nu_max: usize, check_minimal: usize) -> Result<SmallestIndices> {
    let spec = LplSpec::new(p, l, chi, nu_max as u32 + 1)?;
    let f = build_lpl(&spec)?;
    let xi = find_zero(&f, nu_max as u32, ZeroMethod::Coefficients)?.digits;
    let indices = smallest_indices_from_digits(&xi, l, nu_max)?;
    let delta = chi.parity();
    let ord_at = |n: u64, prec: u32| -> Result<u32> { Ok(lp_value(delta + n, chi, p, prec)?.valuation()) };
    let mut verified = Vec::new();
    let mut minimal = Vec::new();
    for (i, &n) in indices.iter().enumerate() {
        let nu = i as u32 + 1;
        verified.push(ord_at(n, nu + 1)? == nu);
        if i < check_minimal {
            let mut ok = true;
            let mut m = l;
            while m < n {
                if ord_at(m, nu + 1)? == nu {
                    ok = false;
                    break;
                }
                m += phi_q(p);
            }
            minimal.push(Some(ok));
        } else {
            minimal.push(None);
        }
    }
    Ok(SmallestIndices { xi, indices, verified, minimal })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongKummerReport {
    pub delta: u64,
    pub samples: usize,
    /// Pairs `(n, m, r)` where the biconditional failed.
    pub failures: Vec<(u64, u64, u32)>,
}

impl StrongKummerReport {
    pub fn delta_nonzero(&self) -> bool {
        self.delta != 0
    }
}

/// Tests `n ≡ m mod φ(p^r) ⟺ ζ_p(1-n) ≡ ζ_p(1-m) mod p^r` on random
/// `n, m ≡ l mod p-1` and `r <= 3`. When `Δ = 0` the pair `(l, l+p-1, 2)`
/// is always included, since it is the expected witness.
pub fn strong_kummer_check(p: u64, l: u64, samples: usize, seed: u64) -> Result<StrongKummerReport> {
    if p <= 3 || l % 2 != 0 || l == 0 || l >= p - 1 {
        return Err(Error::UnsupportedCase("needs p > 3 and even 0 < l < p-1".into()));
    }
    let chi = QuadChar::principal();
    let f = build_lpl(&LplSpec::new(p, l, chi, 3)?)?;
    let delta = f.delta().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p3 = p.pow(3);
    let mut cases = Vec::with_capacity(samples + 1);
    if delta == 0 {
        cases.push((0u64, 1u64, 2u32));
    }
    while cases.len() < samples + usize::from(delta == 0) {
        let r = rng.gen_range(1..=3u32);
        let s = rng.gen_range(0..p3);
        let t =
            if rng.gen_bool(0.5) { s + rng.gen_range(1..p) * p.pow(rng.gen_range(0..r)) } else { rng.gen_range(0..p3) };
        if s != t {
            cases.push((s, t, r));
        }
    }
    let mut failures = Vec::new();
    for &(s, t, r) in &cases {
        let (n, m) = (l + (p - 1) * s, l + (p - 1) * t);
        let same_class = (s as i64 - t as i64).rem_euclid(p.pow(r - 1) as i64) == 0;
        let a = lp_value(n, chi, p, r)?;
        let b = lp_value(m, chi, p, r)?;
        if same_class != (a == b) {
            failures.push((n, m, r));
        }
    }
    Ok(StrongKummerReport { delta, samples: cases.len(), failures })
}
