use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use kummerlab::charnum::{self, bernoulli, euler, gen_bernoulli};
use kummerlab::fermat::{build_t, congruence_suite};
use kummerlab::lfunc::{
    build_lpl, build_product_l, build_tilde_l, scan, structure_check, ConjectureStatus, ScanOptions,
};
use kummerlab::padic::INFINITE_VALUATION;
use kummerlab::solver::{find_fixed_point, find_two_zeros, find_zero, find_zero_degenerate};
use kummerlab::{Bound, Classification, Error, KummerFn, LplSpec, QuadChar, ScanKind, TSpec, ZeroMethod};

#[derive(Parser)]
#[command(name = "kummerlab", version, about = "Zeros, fixed points and scans of p-adic Kummer functions")]
struct Cli {
    /// Emit JSON, one object per line.
    #[arg(long, global = true)]
    json: bool,
    /// Bernoulli number cache, loaded at start and rewritten on exit.
    #[arg(long, global = true, env = "KUMMERLAB_CACHE")]
    cache: Option<PathBuf>,
    /// Worker threads for the scanners.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digits of the zero of a function in WKS0.
    Zero(FnArgs),
    /// Digits of the fixed point `f(τ) = τ`.
    FixedPoint(FnArgs),
    /// Both zeros of a function with λ = 2.
    TwoZeros {
        #[command(flatten)]
        f: FnArgs,
        /// Residue mod p to report as the first zero.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Δ, λ, μ, ord f(0) and the class label.
    Classify(FnArgs),
    /// Irregular or exceptional pairs up to a bound.
    Scan {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "char", default_value = "principal")]
        chi: String,
        #[arg(long)]
        pmax: u64,
        /// Progress file, resumed when present.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Factor L(1-n) over a product of characters and split it into parts.
    Structure {
        #[arg(long)]
        n: u64,
        #[arg(long = "char", default_value = "principal")]
        chi: String,
    },
    /// T-function versus L-function congruences at one pair.
    Congruences {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        l: u64,
        #[arg(long = "char", default_value = "principal")]
        chi: String,
    },
    /// Exact B_{n,χ}, or the Euler number E_n.
    Bernoulli {
        #[arg(long)]
        n: u64,
        #[arg(long = "char", default_value = "principal")]
        chi: String,
        #[arg(long, conflicts_with = "chi")]
        euler: bool,
    },
}

#[derive(Args, Clone)]
struct FnArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 0)]
    l: u64,
    /// `principal`, `D=<int>`, or a comma separated product.
    #[arg(long = "char", default_value = "principal")]
    chi: String,
    /// Number of digits to compute.
    #[arg(long, default_value_t = 10)]
    precision: u32,
    #[arg(long, value_enum, default_value_t = MethodArg::Coefficients)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = FuncArg::L)]
    func: FuncArg,
}

#[derive(ValueEnum, Clone, Copy)]
enum KindArg {
    Irregular,
    Exceptional,
}

#[derive(ValueEnum, Clone, Copy)]
enum MethodArg {
    Values,
    Coefficients,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum FuncArg {
    /// L_{p,l}(s, χ), or a product over several characters.
    L,
    /// T_{p,l}(s, χ).
    T,
    /// The degenerate quotient tilde-L_{p,0}(s, χ).
    Tilde,
}

/// Extra precision for functions whose zeros lose digits to `p²`.
const TWO_ZERO_SLACK: u32 = 4;

fn parse_chars(s: &str) -> Result<Vec<QuadChar>, Error> {
    s.split(',').map(str::parse).collect()
}

fn char_json(chars: &[QuadChar]) -> Value {
    let one = |c: &QuadChar| {
        if c.is_principal() {
            json!({"kind": "principal"})
        } else {
            json!({"kind": "quadratic", "d": c.discriminant()})
        }
    };
    match chars {
        [c] => one(c),
        _ => json!({"kind": "product", "factors": chars.iter().map(one).collect::<Vec<_>>()}),
    }
}

fn classification_json(c: &Classification) -> Value {
    json!({
        "delta": c.delta_f,
        "lambda": bound_json(c.lambda_f),
        "ord_f0": (c.ord_f0 != INFINITE_VALUATION).then_some(c.ord_f0),
        "label": c.label.as_str(),
    })
}

fn bound_json(b: Bound) -> Value {
    match b {
        Bound::Exact(v) => json!(v),
        Bound::AtLeast(v) => json!(format!(">={v}")),
    }
}

fn row(d: &[u64]) -> String {
    d.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn build(a: &FnArgs, n: u32) -> Result<KummerFn, Error> {
    let chars = parse_chars(&a.chi)?;
    match (a.func, chars.as_slice()) {
        (FuncArg::L, [c]) => build_lpl(&LplSpec::new(a.p, a.l, *c, n)?),
        (FuncArg::L, cs) => {
            let specs = cs.iter().map(|c| LplSpec::new(a.p, a.l, *c, n)).collect::<Result<Vec<_>, _>>()?;
            build_product_l(&specs)
        }
        (FuncArg::T, [c]) => build_t(&TSpec::new(a.p, a.l as i64, 1, *c, n)?),
        (FuncArg::T, _) => Err(Error::UnsupportedCase("T-functions take a single character".into())),
        (FuncArg::Tilde, _) => Err(Error::UnsupportedCase("the degenerate function only supports `zero`".into())),
    }
}

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: impl AsRef<str>, obj: impl FnOnce() -> Value) {
        if self.json {
            println!("{}", obj());
        } else {
            println!("{}", text.as_ref());
        }
    }
}

/// The fixed JSON record shared by the single-function commands.
#[derive(Serialize)]
struct FnRecord {
    p: u64,
    l: u64,
    #[serde(rename = "char")]
    chi: Value,
    precision: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_digits: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_digits: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<Value>,
}

impl FnRecord {
    fn new(a: &FnArgs) -> Result<Self, Error> {
        Ok(FnRecord {
            p: a.p,
            l: a.l,
            chi: char_json(&parse_chars(&a.chi)?),
            precision: a.precision,
            zero_digits: None,
            fixed_digits: None,
            classification: None,
        })
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Zero(a) => {
            let mut rec = FnRecord::new(&a)?;
            let digits = if a.func == FuncArg::Tilde {
                let [c] = parse_chars(&a.chi)?[..] else {
                    return Err(Error::UnsupportedCase("the degenerate function takes a single character".into()));
                };
                let g = build_tilde_l(a.p, c, a.precision + TWO_ZERO_SLACK)?;
                find_zero_degenerate(&g, a.precision)?.digits.digits
            } else {
                let f = build(&a, a.precision + 1)?;
                let method = match a.method {
                    MethodArg::Values => ZeroMethod::Values,
                    MethodArg::Coefficients => ZeroMethod::Coefficients,
                };
                rec.classification = Some(classification_json(&f.classify()));
                find_zero(&f, a.precision, method)?.digits.digits
            };
            let text = row(&digits);
            rec.zero_digits = Some(json!(digits));
            out.emit(text, || json!(rec));
        }
        Command::FixedPoint(a) => {
            let f = build(&a, a.precision + 1)?;
            let r = find_fixed_point(&f, a.precision)?;
            if !r.consistency {
                return Err(Error::RelationViolated("fixed point fails re-evaluation".into()));
            }
            let mut rec = FnRecord::new(&a)?;
            rec.classification = Some(classification_json(&f.classify()));
            rec.fixed_digits = Some(r.digits.digits.clone());
            out.emit(row(&r.digits.digits), || json!(rec));
        }
        Command::TwoZeros { f: a, seed } => {
            let f = build(&a, a.precision + TWO_ZERO_SLACK)?;
            let seeds: Vec<u64> = seed.into_iter().collect();
            let z = find_two_zeros(&f, a.precision, &seeds)?;
            let mut rec = FnRecord::new(&a)?;
            rec.classification = Some(classification_json(&f.classify()));
            rec.zero_digits = Some(json!([z.xi1.digits, z.xi2.digits]));
            out.emit(format!("{}\n{}", row(&z.xi1.digits), row(&z.xi2.digits)), || json!(rec));
        }
        Command::Classify(a) => {
            let f = build(&a, a.precision + 1)?;
            let c = f.classify();
            let text = format!(
                "delta {}\nlambda {}\nmu {}\nord_f0 {}\nlabel {}",
                c.delta_f,
                c.lambda_f,
                c.mu_f,
                if c.ord_f0 == INFINITE_VALUATION { "inf".to_string() } else { c.ord_f0.to_string() },
                c.label
            );
            let mut rec = FnRecord::new(&a)?;
            rec.classification = Some(classification_json(&c));
            out.emit(text, || json!(rec));
        }
        Command::Scan { kind, chi, pmax, checkpoint } => {
            let chi: QuadChar = chi.parse()?;
            let kind = match kind {
                KindArg::Irregular => ScanKind::Irregular,
                KindArg::Exceptional => ScanKind::Exceptional,
            };
            let res = scan(kind, chi, pmax, &ScanOptions { checkpoint })?;
            if out.json {
                for r in &res.pairs {
                    println!(
                        "{}",
                        json!({"p": r.p, "l": r.l, "d": r.chi.discriminant(), "ord": r.ord,
                               "delta": r.delta, "lambda": bound_json(r.lambda), "label": r.label.as_str()})
                    );
                }
            } else {
                print!("{}", res.to_text());
            }
        }
        Command::Structure { n, chi } => {
            let chars = parse_chars(&chi)?;
            let r = structure_check(n, &chars)?;
            let value = charnum::format_rational(&r.value);
            let factors: Vec<Value> = r
                .factors
                .iter()
                .map(|f| {
                    json!({"p": f.p, "ord": f.ord, "class": format!("{:?}", f.class),
                           "pair_confirmed": f.pair_confirmed,
                           "conjecture": f.conjecture.iter().map(conjecture_str).collect::<Vec<_>>()})
                })
                .collect();
            if out.json {
                println!(
                    "{}",
                    json!({"n": n, "char": char_json(&chars), "value": value, "factors": factors,
                           "unfactored": r.unfactored.to_string(),
                           "i_part": charnum::format_rational(&r.i_part),
                           "s_part": charnum::format_rational(&r.s_part),
                           "d_part": charnum::format_rational(&r.d_part),
                           "theorem_holds": r.theorem_holds()})
                );
            } else {
                println!("value {value}");
                for f in &r.factors {
                    let conj: Vec<_> = f.conjecture.iter().map(conjecture_str).collect();
                    println!("{} {} {:?} {}", f.p, f.ord, f.class, conj.join(","));
                }
                if r.unfactored != 1u32.into() {
                    println!("unfactored {}", r.unfactored);
                }
                println!("i {}", charnum::format_rational(&r.i_part));
                println!("s {}", charnum::format_rational(&r.s_part));
                println!("d {}", charnum::format_rational(&r.d_part));
                println!("theorem {}", if r.theorem_holds() { "holds" } else { "FAILS" });
            }
            if !r.theorem_holds() {
                return Err(Error::RelationViolated(format!("structure identity fails at n = {n}")));
            }
        }
        Command::Congruences { p, l, chi } => {
            let r = congruence_suite(p, l, chi.parse()?)?;
            let state = |h: Option<bool>| match h {
                Some(true) => "holds",
                Some(false) => "FAILS",
                None => "n/a",
            };
            if out.json {
                let checks: serde_json::Map<String, Value> =
                    r.checks.iter().map(|c| (c.name.to_string(), json!(c.holds))).collect();
                println!(
                    "{}",
                    json!({"p": p, "l": l, "d": r.chi.discriminant(), "delta_t": r.delta_t,
                           "delta_l": r.delta_l, "label_t": r.label_t.as_str(),
                           "label_l": r.label_l.as_str(), "checks": checks})
                );
            } else {
                println!("delta_t {} delta_l {}", r.delta_t, r.delta_l);
                println!("label_t {} label_l {}", r.label_t, r.label_l);
                for c in &r.checks {
                    println!("{} {}", c.name, state(c.holds));
                }
            }
            if !r.all_hold() {
                return Err(Error::RelationViolated(format!("congruence failure at ({p}, {l})")));
            }
        }
        Command::Bernoulli { n, chi, euler: want_euler } => {
            let text = if want_euler {
                euler(n).to_string()
            } else {
                let c: QuadChar = chi.parse()?;
                let b = if c.is_principal() { bernoulli(n) } else { gen_bernoulli(n, c)? };
                charnum::format_rational(&b)
            };
            out.emit(&text, || json!({"n": n, "value": text}));
        }
    }
    Ok(())
}

fn conjecture_str(c: &ConjectureStatus) -> String {
    match c {
        ConjectureStatus::Agree => "agree".into(),
        ConjectureStatus::Disagree { predicted } => format!("disagree({predicted})"),
        ConjectureStatus::NotWks0 => "not-wks0".into(),
        ConjectureStatus::Skipped => "skipped".into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let cache = cli.cache.clone();
    if let Some(path) = &cache {
        if let Err(e) = charnum::load_bernoulli_cache(path) {
            eprintln!("warning: cannot read cache {}: {e}", path.display());
        }
    }
    let result = run(cli);
    if let Some(path) = &cache {
        if let Err(e) = charnum::save_bernoulli_cache(path) {
            eprintln!("warning: cannot write cache {}: {e}", path.display());
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}
