//! Auxiliary polynomials and the empirical maximal finite vanishing order
//! `Λ(a, b) = max ord P(1, z, 1, f)` over polynomials of bidegree `≤ (a, b)` that do not vanish
//! at `f` to the working precision.
//!
//! Columns of the evaluation matrix `M_N` are the monomials `z^i·X^e` (`i ≤ a`, `|e| ≤ b`) and
//! row `r` holds their `r`-th Taylor coefficients. A vector of `ker M_r \ ker M_N` evaluates to a
//! series of order at least `r`, so `Λ` is the index of the last row that raises the rank.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::biring::{affine_monomials, AffinePolynomial, BiPolynomial, Exponents, FunctionalPoint};
use crate::error::{Error, Result};
use crate::exactalg::{ExactMatrix, Field, RowEchelon, Scalar};
use crate::series::{OrdValue, TruncatedSeries};

/// Number of affine monomials of bidegree `≤ (a, b)` in `n` variables: `(a+1)·C(b+n, n)`.
pub fn monomial_count(n: usize, a: u32, b: u32) -> usize {
    let mut c: u128 = 1;
    for k in 1..=n as u128 {
        c = c * (b as u128 + k) / k;
    }
    (a as usize + 1) * c as usize
}

/// Evaluations of every column monomial at `f`, modulo `z^N`.
#[derive(Debug, Clone)]
pub struct EvaluationTable {
    pub n: usize,
    pub bidegree: (u32, u32),
    pub columns: Vec<Exponents>,
    pub values: Vec<TruncatedSeries>,
}

impl EvaluationTable {
    pub fn new(f: &FunctionalPoint, a: u32, b: u32, precision: usize) -> Result<Self> {
        let n = f.n();
        let f = f.truncate(precision);
        let precision = f.working_precision(precision);
        let powers = f.power_table(b);
        let columns = affine_monomials(n, a, b);
        let mut cache: std::collections::HashMap<Vec<u32>, TruncatedSeries> =
            std::collections::HashMap::new();
        let mut values = Vec::with_capacity(columns.len());
        for e in &columns {
            let xe = &e[1..];
            let base = match cache.get(xe) {
                Some(s) => s.clone(),
                None => {
                    let mut s = TruncatedSeries::constant(Scalar::one(f.field()), precision);
                    for (j, &k) in xe.iter().enumerate() {
                        if k > 0 {
                            s = s.mul(&powers[j][k as usize])?;
                        }
                    }
                    cache.insert(xe.to_vec(), s.clone());
                    s
                }
            };
            values.push(base.shift(e[0] as usize));
        }
        Ok(EvaluationTable { n, bidegree: (a, b), columns, values })
    }

    pub fn field(&self) -> Field {
        self.values.first().map_or(Field::Rational, |s| s.field())
    }

    pub fn precision(&self) -> usize {
        self.values.first().map_or(0, |s| s.precision())
    }

    pub fn u(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        self.values.iter().map(|s| s.coeff(r).clone()).collect()
    }

    /// `M_rows`: the first `rows` Taylor coefficients.
    pub fn matrix(&self, rows: usize) -> Result<ExactMatrix> {
        let rows = rows.min(self.precision());
        ExactMatrix::from_rows(self.field(), self.u(), (0..rows).map(|r| self.row(r)).collect())
    }

    /// `Σ v_k·(column k)` as an affine polynomial.
    pub fn polynomial(&self, v: &[Scalar]) -> Result<AffinePolynomial> {
        AffinePolynomial::from_terms(
            self.field(),
            self.n,
            self.columns.iter().cloned().zip(v.iter().cloned()),
        )
    }

    /// Evaluation of the combination `v` of the columns.
    pub fn combine(&self, v: &[Scalar]) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::zero(self.field(), self.precision());
        for (s, c) in self.values.iter().zip(v) {
            if !c.is_zero() {
                acc = acc.add(&s.scale(c)?)?;
            }
        }
        Ok(acc)
    }
}

/// Rank growth of `M_r` as rows are added.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankTrace {
    pub u: usize,
    pub rows: usize,
    /// Row indices at which the rank increased.
    pub pivot_rows: Vec<usize>,
}

impl RankTrace {
    pub fn compute(table: &EvaluationTable) -> Result<Self> {
        let mut ech = RowEchelon::new(table.field(), table.u());
        let mut pivot_rows = Vec::new();
        for r in 0..table.precision() {
            if ech.push_row(&table.row(r))? {
                pivot_rows.push(r);
                if pivot_rows.len() == table.u() {
                    break;
                }
            }
        }
        Ok(RankTrace { u: table.u(), rows: table.precision(), pivot_rows })
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    /// `dim ker M_N`: the observed slice of the vanishing ideal.
    pub fn kernel_dim(&self) -> usize {
        self.u - self.rank()
    }

    /// Index of the last rank increase.
    pub fn last_pivot(&self) -> Option<usize> {
        self.pivot_rows.last().copied()
    }

    /// `dim ker M_r` for `r = 0..=rows`.
    pub fn kernel_dims(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.rows + 1);
        let mut k = 0;
        for r in 0..=self.rows {
            while k < self.pivot_rows.len() && self.pivot_rows[k] < r {
                k += 1;
            }
            out.push(self.u - k);
        }
        out
    }
}

/// Default stabilization window `max(8, u)`.
pub fn default_window(u: usize) -> usize {
    u.max(8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMode {
    Off,
    /// Exhaustive enumeration of coefficient vectors over `𝔽_p`.
    FiniteField(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleOutcome {
    pub modulus: u64,
    /// Maximal finite order found by enumeration; `None` if every vector vanishes.
    pub lambda: Option<usize>,
    pub candidates: u64,
}

/// Per-cell diagnostics of the Λ measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub a: u32,
    pub b: u32,
    pub u: usize,
    pub precision: usize,
    pub window: usize,
    /// `Finite(Λ)` when stabilized, `AtLeast(last pivot)` when the rank still grows inside the
    /// window, `None` when every polynomial vanishes at the working precision.
    pub lambda: Option<OrdValue>,
    pub kernel_dim_final: usize,
    pub stabilized: bool,
    pub pivot_rows: Vec<usize>,
    pub oracle: Option<OracleOutcome>,
}

impl CellReport {
    pub fn lower_bound(&self) -> usize {
        self.u.saturating_sub(1)
    }
}

/// Reduces a point over ℚ modulo `p` (or checks it already lives over `𝔽_p`).
pub fn reduce_point(f: &FunctionalPoint, p: u64) -> Result<FunctionalPoint> {
    let target = Field::prime(p)?;
    match f.field() {
        Field::Prime(q) if q == p => Ok(f.clone()),
        Field::Prime(_) => Err(Error::FieldMismatch(f.field().to_string(), target.to_string())),
        Field::Rational => {
            let series = f
                .series()
                .iter()
                .map(|s| {
                    let coeffs = s
                        .coeffs()
                        .iter()
                        .map(|c| Scalar::from_rational(target, c.as_rational().expect("rational")))
                        .collect::<Result<Vec<_>>>()?;
                    TruncatedSeries::new(target, coeffs)
                })
                .collect::<Result<Vec<_>>>()?;
            FunctionalPoint::new(target, series, f.t_f)
        }
    }
}

/// Largest oracle search accepted: `p^u` candidates.
pub const ORACLE_LIMIT: u64 = 1 << 24;

/// Enumerates every nonzero coefficient vector over `𝔽_p` in reflected Gray-code order,
/// updating the evaluated series by one column per step, and returns the largest finite order.
pub fn enumerate_lambda(f: &FunctionalPoint, a: u32, b: u32, precision: usize, p: u64) -> Result<OracleOutcome> {
    let fp = reduce_point(f, p)?;
    let table = EvaluationTable::new(&fp, a, b, precision)?;
    let u = table.u();
    let total = (p as u128).checked_pow(u as u32).unwrap_or(u128::MAX);
    if total > ORACLE_LIMIT as u128 {
        return Err(Error::InvalidInput(format!("oracle search of {p}^{u} vectors is too large")));
    }
    let n = table.precision();
    let cols: Vec<Vec<u64>> = table
        .values
        .iter()
        .map(|s| {
            s.coeffs()
                .iter()
                .map(|c| match c {
                    Scalar::Mod { value, .. } => *value,
                    _ => unreachable!("reduced point"),
                })
                .collect()
        })
        .collect();
    let mut acc = vec![0u64; n];
    let mut digits = vec![0u64; u];
    let mut dirs = vec![true; u];
    let mut best: Option<usize> = None;
    let mut candidates = 0u64;
    loop {
        // next reflected p-ary Gray code step: the lowest digit that can move in its direction
        let mut k = 0;
        while k < u {
            let can = if dirs[k] { digits[k] + 1 < p } else { digits[k] > 0 };
            if can {
                break;
            }
            dirs[k] = !dirs[k];
            k += 1;
        }
        if k == u {
            break;
        }
        let delta = if dirs[k] { 1 } else { p - 1 };
        digits[k] = if dirs[k] { digits[k] + 1 } else { digits[k] - 1 };
        for (x, c) in acc.iter_mut().zip(&cols[k]) {
            *x = (*x + delta * c) % p;
        }
        candidates += 1;
        if let Some(o) = acc.iter().position(|&x| x != 0) {
            if best.map_or(true, |b| o > b) {
                best = Some(o);
            }
        }
    }
    Ok(OracleOutcome { modulus: p, lambda: best, candidates })
}

/// Measures `Λ(a, b)` without failing on instability.
pub fn measure_cell(
    f: &FunctionalPoint,
    a: u32,
    b: u32,
    precision: usize,
    window: Option<usize>,
    oracle: OracleMode,
) -> Result<CellReport> {
    let table = EvaluationTable::new(f, a, b, precision)?;
    let u = table.u();
    let n = table.precision();
    let window = window.unwrap_or_else(|| default_window(u));
    let trace = RankTrace::compute(&table)?;
    let stabilized = n > window && trace.last_pivot().map_or(true, |r| r < n - window);
    let lambda = trace.last_pivot().map(|r| if stabilized { OrdValue::Finite(r) } else { OrdValue::AtLeast(r) });
    let oracle = match oracle {
        OracleMode::Off => None,
        OracleMode::FiniteField(p) => {
            let out = enumerate_lambda(f, a, b, precision, p)?;
            let rank_lambda = trace.last_pivot();
            if out.lambda != rank_lambda {
                return Err(Error::OracleMismatch {
                    rank: format!("{rank_lambda:?}"),
                    enumeration: format!("{:?}", out.lambda),
                });
            }
            Some(out)
        }
    };
    Ok(CellReport {
        a,
        b,
        u,
        precision: n,
        window,
        lambda,
        kernel_dim_final: trace.kernel_dim(),
        stabilized,
        pivot_rows: trace.pivot_rows,
        oracle,
    })
}

/// `Λ(a, b)` with stabilization required over the trailing window.
pub fn max_finite_ord(
    f: &FunctionalPoint,
    a: u32,
    b: u32,
    precision: usize,
    oracle: OracleMode,
) -> Result<CellReport> {
    let cell = measure_cell(f, a, b, precision, None, oracle)?;
    if !cell.stabilized {
        return Err(Error::PrecisionExhausted(format!(
            "rank of the ({a},{b}) evaluation matrix still grows within the last {} rows of {}",
            cell.window, cell.precision
        )));
    }
    if cell.lambda.is_none() {
        return Err(Error::AllInIdeal);
    }
    Ok(cell)
}

/// An auxiliary polynomial and its vanishing order at `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxPoly {
    pub affine: AffinePolynomial,
    /// The bi-homogenization at bidegree exactly `(a, b)`.
    pub poly: BiPolynomial,
    pub ord: OrdValue,
    pub u: usize,
}

/// Nonzero `P` of bidegree `≤ (a, b)` with `ord P(f) ≥ u − 1` and `P(f) ≠ 0` modulo `z^N`:
/// the first kernel basis vector of `M_{u−1}` outside `ker M_N`.
pub fn aux_poly(f: &FunctionalPoint, a: u32, b: u32, precision: usize) -> Result<AuxPoly> {
    let u = monomial_count(f.n(), a, b);
    let table = EvaluationTable::new(f, a, b, precision)?;
    if table.precision() < u {
        return Err(Error::PrecisionExhausted(format!(
            "precision {} below the {u} rows needed",
            table.precision()
        )));
    }
    // With a single monomial there are no conditions: the constant 1 is the answer.
    let basis = if u == 1 {
        vec![vec![Scalar::one(table.field())]]
    } else {
        table.matrix(u - 1)?.kernel_basis()
    };
    for v in &basis {
        let value = table.combine(v)?;
        if value.ord().is_finite() {
            let affine = table.polynomial(v)?;
            let poly = affine.homogenize_to(a, b)?;
            return Ok(AuxPoly { affine, poly, ord: value.ord(), u });
        }
    }
    Err(Error::AllInIdeal)
}

/// A random element of `ker M_k` for random `1 ≤ k < u`, bi-homogenized at `(a, b)`.
pub fn random_vanishing_poly(
    f: &FunctionalPoint,
    a: u32,
    b: u32,
    rng: &mut ChaCha8Rng,
) -> Result<Option<BiPolynomial>> {
    let u = monomial_count(f.n(), a, b);
    if u < 2 {
        return Ok(None);
    }
    let rows = rng.gen_range(1..u);
    let table = EvaluationTable::new(f, a, b, f.working_precision(u))?;
    let basis = table.matrix(rows)?.kernel_basis();
    let field = table.field();
    let mut v = vec![Scalar::zero(field); u];
    for b in &basis {
        let c = Scalar::from_i64(field, rng.gen_range(-2..=2));
        for (x, y) in v.iter_mut().zip(b) {
            *x = &*x + &(&c * y);
        }
    }
    if v.iter().all(|x| x.is_zero()) {
        return Ok(None);
    }
    Ok(Some(table.polynomial(&v)?.homogenize_to(a, b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    /// `(a+1)·(b+1)^t`
    Product,
    /// `(a+b+1)·(b+1)^t`
    Sum,
}

impl Shape {
    pub fn value(self, a: u32, b: u32, t: u32) -> u128 {
        let base = match self {
            Shape::Product => a as u128 + 1,
            Shape::Sum => a as u128 + b as u128 + 1,
        };
        base * (b as u128 + 1).pow(t)
    }

    pub fn parse(s: &str) -> Result<Shape> {
        match s {
            "product" | "(a+1)(b+1)^t" => Ok(Shape::Product),
            "sum" | "(a+b+1)(b+1)^t" => Ok(Shape::Sum),
            other => Err(Error::InvalidInput(format!("unknown shape '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Product => "(a+1)(b+1)^t",
            Shape::Sum => "(a+b+1)(b+1)^t",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell {
    #[serde(flatten)]
    pub report: CellReport,
    /// `Λ / shape(a, b)` as an exact fraction, when `Λ` is finite.
    pub ratio: Option<String>,
    /// `Λ ≥ u − 1 − dim ker M_N` (always expected to hold).
    pub lower_bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub a_max: u32,
    pub b_max: u32,
    pub precision: usize,
    pub shape: String,
    pub t: u32,
    pub cells: Vec<ScanCell>,
    /// `max Λ(a, b)/shape(a, b)` over finite cells.
    pub empirical_k: Option<String>,
    pub all_finite: bool,
    pub all_stabilized: bool,
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub a_max: u32,
    pub b_max: u32,
    pub precision: usize,
    pub shape: Shape,
    pub t: Option<u32>,
    pub window: Option<usize>,
    pub oracle: OracleMode,
}

/// Λ over the grid `0..=a_max × 0..=b_max`, cells computed in parallel.
pub fn multiplicity_scan(f: &FunctionalPoint, opts: &ScanOptions) -> Result<ScanResult> {
    let t = match opts.t.or(f.t_f.map(|t| t as u32)) {
        Some(t) => t,
        None => return Err(Error::MissingParam("t".into())),
    };
    let grid: Vec<(u32, u32)> = (0..=opts.a_max)
        .flat_map(|a| (0..=opts.b_max).map(move |b| (a, b)))
        .collect();
    let mut reports = grid
        .par_iter()
        .map(|&(a, b)| measure_cell(f, a, b, opts.precision, opts.window, opts.oracle))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by_key(|c| (c.a, c.b));

    let mut best: Option<BigRational> = None;
    let mut cells = Vec::with_capacity(reports.len());
    for report in reports {
        let (ratio, lower_bound_ok) = match report.lambda {
            Some(OrdValue::Finite(l)) => {
                let shape = opts.shape.value(report.a, report.b, t);
                let r = BigRational::new(l.into(), shape.into());
                if best.as_ref().map_or(true, |b| &r > b) {
                    best = Some(r.clone());
                }
                (Some(r.to_string()), l + 1 + report.kernel_dim_final >= report.u)
            }
            _ => (None, true),
        };
        cells.push(ScanCell { report, ratio, lower_bound_ok });
    }
    let all_finite = cells.iter().all(|c| matches!(c.report.lambda, Some(OrdValue::Finite(_))));
    let all_stabilized = cells.iter().all(|c| c.report.stabilized);
    let lam = |a: u32, b: u32| -> Option<usize> {
        cells
            .iter()
            .find(|c| c.report.a == a && c.report.b == b)
            .and_then(|c| c.report.lambda.and_then(|o| o.finite()))
    };
    let mut monotone = true;
    for c in &cells {
        let (a, b) = (c.report.a, c.report.b);
        if let Some(l) = lam(a, b) {
            for (a2, b2) in [(a + 1, b), (a, b + 1)] {
                if let Some(l2) = lam(a2, b2) {
                    monotone &= l2 >= l;
                }
            }
        }
    }
    Ok(ScanResult {
        a_max: opts.a_max,
        b_max: opts.b_max,
        precision: opts.precision,
        shape: opts.shape.name().into(),
        t,
        cells,
        empirical_k: best.map(|b| b.to_string()),
        all_finite,
        all_stabilized,
        monotone,
    })
}

fn ratio_decimal(r: &str) -> String {
    let q: Option<BigRational> = crate::exactalg::parse_rational(r).ok();
    q.and_then(|q| q.to_f64()).map_or_else(String::new, |x| format!("{x:.6}"))
}

impl ScanResult {
    /// CSV with columns `a,b,lambda_kind,lambda_value,kernel_dim_final,stabilized,
    /// lower_bound_u_minus_1,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "a,b,lambda_kind,lambda_value,kernel_dim_final,stabilized,lower_bound_u_minus_1,ratio\n",
        );
        for c in &self.cells {
            let r = &c.report;
            let (kind, value) = match r.lambda {
                Some(OrdValue::Finite(k)) => ("Finite", k.to_string()),
                Some(OrdValue::AtLeast(k)) => ("AtLeast", k.to_string()),
                None => ("AllInIdeal", String::new()),
            };
            let ratio = c.ratio.as_deref().map(ratio_decimal).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.a,
                r.b,
                kind,
                value,
                r.kernel_dim_final,
                r.stabilized,
                r.lower_bound(),
                ratio
            ));
        }
        out
    }
}
