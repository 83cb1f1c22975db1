//! Explicit constants and threshold right-hand sides.
//!
//! The recursive constants grow as exponential towers, so values are kept exactly while they fit a
//! bit budget, then as a fixed-point `log₂` with an error bound, and finally as a floating
//! `log₂ log₂` approximation. Nothing here claims a hypothesis holds; the functions only report
//! numbers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::biring::FunctionalPoint;
use crate::error::{Error, Result};
use crate::exactalg::Scalar;
use crate::geometry::ord_pair;
use crate::series::{OrdValue, TruncatedSeries};

/// Default bit budget for exact values.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// Fractional bits of a [`Log2Value`].
pub const FRAC_BITS: u32 = 96;

/// Extra working precision beyond which `log₂` evaluation stops refining.
const MAX_EXTRA_BITS: u64 = 8192;

/// `log₂` of a positive quantity as `fixed / 2^FRAC_BITS`, within `2^err_log2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Log2Value {
    pub fixed: BigInt,
    pub err_log2: i64,
}

impl Log2Value {
    pub fn to_f64(&self) -> f64 {
        let (bits, top) = leading_bits(&self.fixed.abs());
        let mag = if bits == 0 { 0.0 } else { top * 2f64.powi(bits as i32 - 64 - FRAC_BITS as i32) };
        if self.fixed.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// Decimal rendering with 24 fractional digits (truncated toward zero).
    pub fn to_decimal(&self) -> String {
        let neg = self.fixed.is_negative();
        let a = self.fixed.abs();
        let one = BigInt::one() << FRAC_BITS;
        let (int, rem) = a.div_rem(&one);
        let frac = (rem * BigInt::from(10u8).pow(24)) >> FRAC_BITS;
        format!("{}{}.{:0>24}", if neg { "-" } else { "" }, int, frac)
    }

    fn add(&self, other: &Log2Value) -> Log2Value {
        Log2Value {
            fixed: &self.fixed + &other.fixed,
            err_log2: self.err_log2.max(other.err_log2) + 1,
        }
    }

    fn times(&self, k: u64) -> Log2Value {
        Log2Value {
            fixed: &self.fixed * BigInt::from(k),
            err_log2: self.err_log2 + bit_len_u64(k) as i64,
        }
    }

    fn is_positive(&self) -> bool {
        self.fixed.is_positive()
    }
}

fn bit_len_u64(k: u64) -> u64 {
    64 - k.leading_zeros() as u64
}

/// Bit length and the leading 64 bits (as an `f64` mantissa-sized integer) of a nonnegative integer.
fn leading_bits(a: &BigInt) -> (u64, f64) {
    let bits = a.bits();
    if bits == 0 {
        return (0, 0.0);
    }
    let top = if bits > 64 { a >> (bits - 64) } else { a << (64 - bits) };
    (bits, top.to_f64().unwrap_or(f64::MAX))
}

/// `log₂ a` as an `f64` for positive integers of any size.
fn bigint_log2_f64(a: &BigInt) -> f64 {
    let (bits, top) = leading_bits(a);
    bits as f64 - 64.0 + top.log2()
}

/// `⌊log₂(n)·2^prec⌋` up to one unit, for `n ≥ 1`, by repeated squaring.
fn log2_int(n: &BigInt, prec: u32) -> BigInt {
    let k = n.bits() - 1;
    let w = prec as u64 + 64;
    let mut y = if k > w { n >> (k - w) } else { n << (w - k) };
    let two = BigInt::one() << (w + 1);
    let steps = prec as u64 + 16;
    let mut frac = BigInt::zero();
    for _ in 0..steps {
        y = (&y * &y) >> w;
        frac <<= 1;
        if y >= two {
            y >>= 1;
            frac += 1;
        }
    }
    (BigInt::from(k) << prec) + (frac >> 16)
}

fn rational_bits(q: &BigRational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

/// `e · log₂ q` for positive `q` and nonnegative `e`.
pub fn log2_scaled(q: &BigRational, e: &BigRational) -> Result<Log2Value> {
    if !q.is_positive() {
        return Err(Error::InvalidInput("log2 of a nonpositive value".into()));
    }
    let ebits = e.numer().bits();
    let extra = (ebits + 8).min(MAX_EXTRA_BITS);
    let prec = FRAC_BITS as u64 + extra;
    let l = log2_int(q.numer(), prec as u32) - log2_int(q.denom(), prec as u32);
    let scaled = (l * e.numer()).div_floor(e.denom()) >> extra;
    let err_log2 = (ebits as i64 + 2 - prec as i64).max(1 - FRAC_BITS as i64) + 1;
    Ok(Log2Value { fixed: scaled, err_log2 })
}

/// A possibly astronomically large positive number.
#[derive(Debug, Clone, PartialEq)]
pub enum BigOrLog {
    Exact(BigRational),
    Log2(Log2Value),
    /// `log₂ log₂` of the value, for quantities whose `log₂` itself exceeds the budget.
    Log2Log2(f64),
}

impl BigOrLog {
    pub fn integer(k: impl Into<BigInt>) -> Self {
        BigOrLog::Exact(BigRational::from_integer(k.into()))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            BigOrLog::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// `log₂` with error bound; unavailable beyond the `Log2` level.
    pub fn log2(&self) -> Result<Option<Log2Value>> {
        match self {
            BigOrLog::Exact(q) => log2_scaled(q, &BigRational::one()).map(Some),
            BigOrLog::Log2(l) => Ok(Some(l.clone())),
            BigOrLog::Log2Log2(_) => Ok(None),
        }
    }

    /// `log₂ log₂` as a float (`-∞` for values at most 1).
    pub fn log2_log2(&self) -> f64 {
        match self {
            BigOrLog::Exact(q) => {
                if q <= &BigRational::one() {
                    return f64::NEG_INFINITY;
                }
                (bigint_log2_f64(q.numer()) - bigint_log2_f64(q.denom())).log2()
            }
            BigOrLog::Log2(l) => {
                if !l.is_positive() {
                    return f64::NEG_INFINITY;
                }
                bigint_log2_f64(&l.fixed) - FRAC_BITS as f64
            }
            BigOrLog::Log2Log2(v) => *v,
        }
    }

    fn level(&self) -> u8 {
        match self {
            BigOrLog::Exact(_) => 0,
            BigOrLog::Log2(_) => 1,
            BigOrLog::Log2Log2(_) => 2,
        }
    }

    pub fn mul(&self, other: &BigOrLog, budget: u64) -> Result<BigOrLog> {
        match (self, other) {
            (BigOrLog::Exact(a), BigOrLog::Exact(b))
                if rational_bits(a) + rational_bits(b) <= budget =>
            {
                Ok(BigOrLog::Exact(a * b))
            }
            _ if self.level().max(other.level()) <= 1 => {
                let (a, b) = (self.log2()?.expect("level"), other.log2()?.expect("level"));
                Ok(BigOrLog::Log2(a.add(&b)))
            }
            _ => Ok(BigOrLog::Log2Log2(log_sum_exp2(self.log2_log2(), other.log2_log2()))),
        }
    }

    pub fn scale(&self, c: &BigRational, budget: u64) -> Result<BigOrLog> {
        self.mul(&BigOrLog::Exact(c.clone()), budget)
    }

    pub fn pow(&self, k: u64, budget: u64) -> Result<BigOrLog> {
        if k == 0 {
            return Ok(BigOrLog::integer(1));
        }
        match self {
            BigOrLog::Exact(q) if rational_bits(q).saturating_mul(k) <= budget => {
                Ok(BigOrLog::Exact(num_traits::pow(q.clone(), k as usize)))
            }
            BigOrLog::Exact(_) | BigOrLog::Log2(_) => {
                Ok(BigOrLog::Log2(self.log2()?.expect("level").times(k)))
            }
            BigOrLog::Log2Log2(v) => Ok(BigOrLog::Log2Log2(v + (k as f64).log2())),
        }
    }

    /// `m^self` for a rational base `m ≥ 1`.
    pub fn exp_base(&self, m: &BigRational, budget: u64) -> Result<BigOrLog> {
        if m < &BigRational::one() {
            return Err(Error::InvalidInput("exponential base must be at least 1".into()));
        }
        if m.is_one() {
            return Ok(BigOrLog::integer(1));
        }
        match self {
            BigOrLog::Exact(e) => {
                let small = e.is_integer()
                    && !e.is_negative()
                    && e.numer().to_u64().is_some_and(|k| rational_bits(m).saturating_mul(k) <= budget);
                if small {
                    let k = e.numer().to_usize().expect("checked");
                    Ok(BigOrLog::Exact(num_traits::pow(m.clone(), k)))
                } else {
                    Ok(BigOrLog::Log2(log2_scaled(m, e)?))
                }
            }
            BigOrLog::Log2(l) => {
                let lm = bigint_log2_f64(m.numer()) - bigint_log2_f64(m.denom());
                let v = l.to_f64() + lm.log2();
                if !v.is_finite() {
                    return Err(Error::Overflow("log2 log2 beyond floating range".into()));
                }
                Ok(BigOrLog::Log2Log2(v))
            }
            BigOrLog::Log2Log2(_) => {
                Err(Error::Overflow("exponent tower deeper than log2 log2".into()))
            }
        }
    }

    pub fn max(&self, other: &BigOrLog) -> Result<BigOrLog> {
        let pick_self = match (self, other) {
            (BigOrLog::Exact(a), BigOrLog::Exact(b)) => a >= b,
            _ if self.level() != other.level() => self.level() > other.level(),
            (BigOrLog::Log2(a), BigOrLog::Log2(b)) => a.fixed >= b.fixed,
            _ => self.log2_log2() >= other.log2_log2(),
        };
        Ok(if pick_self { self.clone() } else { other.clone() })
    }

    /// Adds a nonnegative rational; beyond the exact level the sum is absorbed by the error bound.
    pub fn add_rational(&self, s: &BigRational, budget: u64) -> BigOrLog {
        match self {
            BigOrLog::Exact(q) if rational_bits(q) <= budget => BigOrLog::Exact(q + s),
            other => other.clone(),
        }
    }
}

fn log_sum_exp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for BigOrLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BigOrLog::Exact(q) => write!(f, "{}", rational_string(q)),
            BigOrLog::Log2(l) => write!(f, "2^{}", l.to_decimal()),
            BigOrLog::Log2Log2(v) => write!(f, "2^2^{v}"),
        }
    }
}

impl Serialize for BigOrLog {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self {
            BigOrLog::Exact(q) => m.serialize_entry("exact", &rational_string(q))?,
            BigOrLog::Log2(l) => {
                m.serialize_entry("log2", &l.to_decimal())?;
                m.serialize_entry("log2_error_bound", &format!("2^{}", l.err_log2))?;
            }
            BigOrLog::Log2Log2(v) => m.serialize_entry("log2log2", &format!("{v}"))?,
        }
        m.end()
    }
}

/// `2^{n+1}(n+2)^{(n+1)(n+3)}`.
pub fn c_n(n: u32) -> BigInt {
    let n = n as usize;
    (BigInt::one() << (n + 1)) * num_traits::pow(BigInt::from(n + 2), (n + 1) * (n + 3))
}

/// `6^{n+2}(n+2)^{(n+1)²}`, the common factor of the recursion and of `C_m`.
pub fn rho_factor(n: u32) -> BigInt {
    let n = n as usize;
    num_traits::pow(BigInt::from(6), n + 2) * num_traits::pow(BigInt::from(n + 2), (n + 1) * (n + 1))
}

/// `ρ_0, …, ρ_{n+1}`. Exponents are kept exact up to at least [`DEFAULT_BIT_BUDGET`] bits even
/// when `budget` is smaller, so a zero budget yields the pure `log₂` evaluation path.
pub fn rho_sequence(n: u32, mu: &BigRational, nu0: &BigRational, budget: u64) -> Result<Vec<BigOrLog>> {
    let m = mu.max(nu0).clone();
    if m < BigRational::one() {
        return Err(Error::InvalidInput("max(mu, nu0) must be at least 1".into()));
    }
    let a = BigRational::from_integer(rho_factor(n));
    let mut rho = vec![BigOrLog::integer(0), BigOrLog::integer(1)];
    for i in 1..=n as usize {
        let prev = &rho[i];
        let head = prev.pow(n as u64 + 2, budget)?.scale(&a, budget)?;
        let eb = budget.max(DEFAULT_BIT_BUDGET);
        let exponent = prev.pow(n as u64 + 1, eb)?.scale(&a, eb)?;
        rho.push(head.mul(&exponent.exp_base(&m, budget)?, budget)?);
    }
    Ok(rho)
}

/// `((c_n·Ord(f ∧ f(0)) + 1) / min(ν₀, μ))^n`.
pub fn c_iso(n: u32, mu: &BigRational, nu0: &BigRational, f: &FunctionalPoint) -> Result<(BigRational, usize)> {
    let ord = ord_to_constant(f)?;
    let k = ord
        .finite()
        .ok_or_else(|| Error::PrecisionExhausted(format!("Ord(f, f(0)) is {ord}")))?;
    let base = (BigRational::from_integer(c_n(n) * BigInt::from(k)) + BigRational::one()) / mu.min(nu0);
    Ok((num_traits::pow(base, n as usize), k))
}

/// `Ord(f ∧ f(0))` for the point `(1 : f_1 : … : f_n)`.
pub fn ord_to_constant(f: &FunctionalPoint) -> Result<OrdValue> {
    let prec = f.precision();
    let one = TruncatedSeries::constant(Scalar::one(f.field()), prec);
    let x: Vec<TruncatedSeries> = std::iter::once(one.clone()).chain(f.series().iter().cloned()).collect();
    let y: Vec<TruncatedSeries> = std::iter::once(one)
        .chain(f.series().iter().map(|s| TruncatedSeries::constant(s.coeff(0).clone(), prec)))
        .collect();
    ord_pair(&x, &y)
}

#[derive(Debug, Clone, Serialize)]
pub struct PaperConstants {
    pub n: u32,
    #[serde(serialize_with = "ser_string")]
    pub c_n: BigInt,
    pub rho: Vec<BigOrLog>,
    pub c_m: BigOrLog,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_iso: Option<BigOrLog>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ord_f_wedge_f0: Option<usize>,
}

fn ser_string<S: Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn paper_constants(
    n: u32,
    mu: &BigRational,
    nu0: &BigRational,
    f: Option<&FunctionalPoint>,
    budget: u64,
) -> Result<PaperConstants> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if !mu.is_positive() || !nu0.is_positive() {
        return Err(Error::InvalidInput("mu and nu0 must be positive".into()));
    }
    let rho = rho_sequence(n, mu, nu0, budget)?;
    let a = BigRational::from_integer(rho_factor(n));
    let c_m = rho[n as usize + 1].pow(n as u64 + 1, budget)?.scale(&a, budget)?;
    let (c_iso, ord) = match f {
        Some(f) => {
            if f.n() != n as usize {
                return Err(Error::ArityMismatch { expected: n as usize, found: f.n() });
            }
            let (c, k) = c_iso(n, mu, nu0, f)?;
            (Some(BigOrLog::Exact(c)), Some(k))
        }
        None => (None, None),
    };
    Ok(PaperConstants { n, c_n: c_n(n), rho, c_m, c_iso, ord_f_wedge_f0: ord })
}

/// Which threshold right-hand side to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    Transference,
    LmgpRhs,
    StabilityRhs,
    EstimationP,
}

impl ThresholdKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "transference" => Ok(ThresholdKind::Transference),
            "lmgp_rhs" | "lmgp" => Ok(ThresholdKind::LmgpRhs),
            "stability_rhs" | "stability" => Ok(ThresholdKind::StabilityRhs),
            "estimationP" | "estimation" => Ok(ThresholdKind::EstimationP),
            other => Err(Error::InvalidInput(format!("unknown threshold kind {other:?}"))),
        }
    }

    /// Parameter names read by each evaluator; optional ones are marked with `?`.
    pub fn params(&self) -> &'static [&'static str] {
        match self {
            ThresholdKind::Transference => &[
                "C", "t", "mu", "nu0", "nu1", "hP", "degP", "n?", "Cf?", "h_pf?", "deg_pf?",
            ],
            ThresholdKind::LmgpRhs => &["K", "mu", "nu0", "nu1", "n", "t", "degXp", "degX"],
            ThresholdKind::StabilityRhs => &["K0", "deg0", "deg1"],
            ThresholdKind::EstimationP => {
                &["n", "t", "mu", "nu0", "nu1", "lambda", "degXp", "degX", "ordf"]
            }
        }
    }
}

/// Output of a threshold evaluator.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdValue {
    pub kind: String,
    pub value: BigOrLog,
    /// Named side conditions (e.g. the two largeness conditions on `C`).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub conditions: BTreeMap<String, bool>,
}

pub type Params = BTreeMap<String, BigRational>;

fn get<'a>(p: &'a Params, k: &str) -> Result<&'a BigRational> {
    p.get(k).ok_or_else(|| Error::MissingParam(k.to_string()))
}

fn get_u64(p: &Params, k: &str) -> Result<u64> {
    let v = get(p, k)?;
    if !v.is_integer() || v.is_negative() {
        return Err(Error::InvalidInput(format!("{k} must be a nonnegative integer")));
    }
    v.numer().to_u64().ok_or_else(|| Error::Overflow(k.to_string()))
}

fn powq(q: &BigRational, k: u64) -> BigRational {
    num_traits::pow(q.clone(), k as usize)
}

fn int(k: u64) -> BigRational {
    BigRational::from_integer(k.into())
}

/// `C·t·((ν₀+μ)(h(P)+1) + (ν₁+μ)deg P)·μ^{t−1}(deg P+1)^t`.
pub fn transference_rhs(p: &Params) -> Result<ThresholdValue> {
    let (c, t) = (get(p, "C")?, get_u64(p, "t")?);
    let (mu, nu0, nu1) = (get(p, "mu")?, get(p, "nu0")?, get(p, "nu1")?);
    let (h, d) = (get(p, "hP")?, get(p, "degP")?);
    if t == 0 {
        return Err(Error::InvalidInput("t must be at least 1".into()));
    }
    let one = BigRational::one();
    let value = c
        * int(t)
        * ((nu0 + mu) * (h + &one) + (nu1 + mu) * d)
        * powq(mu, t - 1)
        * powq(&(d + &one), t);
    let mut conditions = BTreeMap::new();
    if let (Some(n), Some(cf)) = (p.get("n"), p.get("Cf")) {
        let n = n.numer().to_u32().ok_or_else(|| Error::Overflow("n".into()))?;
        let m = one.clone().max(nu0.clone()).max(mu.clone());
        let rhs = powq(&BigRational::from_integer(c_n(n)), t) * powq(cf, t + 1) / powq(&m, t + 1);
        conditions.insert("C_large_transference".into(), c >= &rhs);
    }
    if let (Some(hp), Some(dp)) = (p.get("h_pf"), p.get("deg_pf")) {
        let m = one.clone().max(one.clone() / nu0).max(one.clone() / mu);
        conditions.insert("C_large_height".into(), powq(c, t + 1) >= (hp + dp) * m);
    }
    Ok(ThresholdValue { kind: "transference".into(), value: BigOrLog::Exact(value), conditions })
}

/// `K((μ+ν₀)(deg_{X'}P+1) + ν₁deg_X P)·μ^{n−1}(deg_X P+1)^t`.
pub fn lmgp_rhs(p: &Params) -> Result<ThresholdValue> {
    let k = get(p, "K")?;
    let (mu, nu0, nu1) = (get(p, "mu")?, get(p, "nu0")?, get(p, "nu1")?);
    let (n, t) = (get_u64(p, "n")?, get_u64(p, "t")?);
    let (dxp, dx) = (get(p, "degXp")?, get(p, "degX")?);
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let one = BigRational::one();
    let value = k
        * ((mu + nu0) * (dxp + &one) + nu1 * dx)
        * powq(mu, n - 1)
        * powq(&(dx + &one), t);
    Ok(ThresholdValue { kind: "lmgp_rhs".into(), value: BigOrLog::Exact(value), conditions: BTreeMap::new() })
}

/// `K₀(deg_{(0,·)}𝔮 + deg_{(1,·)}𝔮)`.
pub fn stability_rhs(p: &Params) -> Result<ThresholdValue> {
    let value = get(p, "K0")? * (get(p, "deg0")? + get(p, "deg1")?);
    Ok(ThresholdValue {
        kind: "stability_rhs".into(),
        value: BigOrLog::Exact(value),
        conditions: BTreeMap::new(),
    })
}

/// The general order bound, with `ρ_{n+1}` and `c_n` evaluated from `n`, `μ`, `ν₀`.
pub fn estimation_p(p: &Params, budget: u64) -> Result<ThresholdValue> {
    let (n, t) = (get_u64(p, "n")?, get_u64(p, "t")?);
    let (mu, nu0, nu1) = (get(p, "mu")?, get(p, "nu0")?, get(p, "nu1")?);
    let lambda = get(p, "lambda")?;
    let (dxp, dx, ordf) = (get(p, "degXp")?, get(p, "degX")?, get(p, "ordf")?);
    if t == 0 || n == 0 {
        return Err(Error::InvalidInput("n and t must be at least 1".into()));
    }
    let n32 = u32::try_from(n).map_err(|_| Error::Overflow("n".into()))?;
    let one = BigRational::one();
    let rho = rho_sequence(n32, mu, nu0, budget)?;
    let cn = BigRational::from_integer(c_n(n32));
    let first = BigOrLog::Exact(int(t) / powq(mu.min(nu0), t));
    let denom = powq(&one.clone().min(lambda.clone()), t) * powq(&one.clone().min(mu.clone()), t);
    let second = rho[n as usize + 1]
        .scale(&int(2), budget)?
        .pow(t, budget)?
        .scale(&(powq(&cn, t) / denom), budget)?;
    let shape = ((mu + nu0) * (dxp + &one) + nu1 * dx) * powq(mu, t - 1) * powq(&(dx + &one), t);
    let value = first
        .max(&second)?
        .scale(&shape, budget)?
        .add_rational(&(ordf * dx + dxp), budget);
    Ok(ThresholdValue { kind: "estimationP".into(), value, conditions: BTreeMap::new() })
}

pub fn threshold(kind: ThresholdKind, p: &Params, budget: u64) -> Result<ThresholdValue> {
    match kind {
        ThresholdKind::Transference => transference_rhs(p),
        ThresholdKind::LmgpRhs => lmgp_rhs(p),
        ThresholdKind::StabilityRhs => stability_rhs(p),
        ThresholdKind::EstimationP => estimation_p(p, budget),
    }
}

/// Relative gap between two `log₂` values, `|a − b| / max(|a|, |b|)` (0 when both vanish).
pub fn log2_relative_gap(a: &Log2Value, b: &Log2Value) -> f64 {
    let diff = Log2Value { fixed: &a.fixed - &b.fixed, err_log2: 0 }.to_f64().abs();
    let scale = a.to_f64().abs().max(b.to_f64().abs());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: i64) -> BigRational {
        BigRational::from_integer(k.into())
    }

    fn params(kv: &[(&str, i64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), q(*v))).collect()
    }

    #[test]
    fn cn_values() {
        assert_eq!(c_n(1), BigInt::from(26244));
        assert!(c_n(2) > c_n(1));
    }

    #[test]
    fn rho_and_cm_at_unit_growth() {
        let c = paper_constants(1, &q(1), &q(1), None, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(c.rho[0], BigOrLog::integer(0));
        assert_eq!(c.rho[1], BigOrLog::integer(1));
        assert_eq!(c.rho[2], BigOrLog::integer(17496));
        assert_eq!(c.c_m, BigOrLog::integer(num_traits::pow(BigInt::from(17496), 3)));
    }

    #[test]
    fn log2_path_matches_exact() {
        for (mu, nu0) in [(1, 1), (2, 1), (3, 2)] {
            let e = paper_constants(1, &q(mu), &q(nu0), None, DEFAULT_BIT_BUDGET).unwrap();
            let l = paper_constants(1, &q(mu), &q(nu0), None, 0).unwrap();
            for (x, y) in [(&e.rho[2], &l.rho[2]), (&e.c_m, &l.c_m)] {
                assert!(x.as_exact().is_some());
                assert!(matches!(y, BigOrLog::Log2(_)));
                let gap = log2_relative_gap(&x.log2().unwrap().unwrap(), &y.log2().unwrap().unwrap());
                assert!(gap < 2f64.powi(-30), "gap {gap}");
            }
        }
    }

    #[test]
    fn log2_accuracy() {
        let l = log2_scaled(&q(3), &q(1)).unwrap();
        assert!((l.to_f64() - 3f64.log2()).abs() < 1e-15);
        assert!(l.err_log2 <= -(FRAC_BITS as i64) + 3);
        let l = log2_scaled(&q(1024), &q(5)).unwrap();
        assert_eq!(l.fixed, BigInt::from(50) << FRAC_BITS);
    }

    #[test]
    fn towers_degrade_gracefully() {
        let c = paper_constants(2, &q(2), &q(1), None, DEFAULT_BIT_BUDGET).unwrap();
        assert!(matches!(c.rho[2], BigOrLog::Log2(_)));
        assert!(matches!(c.rho[3], BigOrLog::Log2Log2(_)));
        assert!(c.rho[3].log2_log2() > c.rho[2].log2_log2());
    }

    #[test]
    fn threshold_examples() {
        let p = params(&[("K", 1), ("mu", 1), ("nu0", 1), ("nu1", 0), ("n", 1), ("t", 1), ("degXp", 1), ("degX", 1)]);
        assert_eq!(lmgp_rhs(&p).unwrap().value, BigOrLog::integer(8));
        let p = params(&[("K0", 2), ("deg0", 3), ("deg1", 4)]);
        assert_eq!(stability_rhs(&p).unwrap().value, BigOrLog::integer(14));
        let p = params(&[("C", 1), ("t", 1), ("mu", 1), ("nu0", 1), ("nu1", 0), ("hP", 0), ("degP", 1)]);
        assert_eq!(transference_rhs(&p).unwrap().value, BigOrLog::integer(6));
        let err = stability_rhs(&params(&[("K0", 2)])).unwrap_err();
        assert_eq!(err, Error::MissingParam("deg0".into()));
    }
}
