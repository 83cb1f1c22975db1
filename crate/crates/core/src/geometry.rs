//! Heights, degrees and distances for `k(z)`-rational points and split cycles.
//!
//! Points of `ℙⁿ` over `k(z)` are stored with coprime polynomial coordinates; the only place
//! contributing to the height is then infinity, so `h` is the largest coordinate degree. A
//! bi-projective point carries an extra `ℙ¹` pair, which defaults to the graph coordinate
//! `(1 : z)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::biring::{
    bi_monomials, evaluate_bi, parse_affine, AffinePolynomial, BiPolynomial, Exponents,
    FunctionalPoint,
};
use crate::error::{Error, Result};
use crate::exactalg::{normalize_leading_one, ExactMatrix, Field, RowEchelon, Scalar};
use crate::ideals::pf_slice_with_flag;
use crate::series::{OrdValue, TruncatedSeries};

/// Dense polynomial in `z`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl ZPoly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Result<Self> {
        for c in &coeffs {
            field.ensure_same(&c.field())?;
        }
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Ok(ZPoly { field, coeffs })
    }

    pub fn zero(field: Field) -> Self {
        ZPoly { field, coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        let field = c.field();
        ZPoly::new(field, vec![c]).expect("single coefficient")
    }

    /// Parses an expression in `z` alone, such as `"z^2 + 1"`.
    pub fn parse(s: &str, field: Field) -> Result<Self> {
        let p = parse_affine(s, field, 0)?;
        let mut coeffs = vec![Scalar::zero(field); p.deg_z() as usize + 1];
        for (e, c) in p.terms() {
            coeffs[e[0] as usize] = c.clone();
        }
        ZPoly::new(field, coeffs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order at `z = 0`; `None` for the zero polynomial.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        ZPoly::new(self.field, coeffs).expect("same field")
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.scale(&Scalar::from_i64(self.field, -1)))
    }

    pub fn scale(&self, c: &Scalar) -> ZPoly {
        ZPoly::new(self.field, self.coeffs.iter().map(|x| x * c).collect()).expect("same field")
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero(self.field);
        }
        let mut out = vec![Scalar::zero(self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        ZPoly::new(self.field, out).expect("same field")
    }

    pub fn pow(&self, k: u32) -> ZPoly {
        let mut acc = ZPoly::constant(Scalar::one(self.field));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &ZPoly) -> Result<(ZPoly, ZPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = d.coeffs[dd].inv()?;
        let mut r = self.coeffs.clone();
        let mut q = vec![Scalar::zero(self.field); r.len().saturating_sub(dd)];
        while r.len() > dd {
            let top = r.len() - 1;
            let c = &r[top] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + j;
                    r[idx] = &r[idx] - &(&c * dc);
                }
                q[top - dd] = c;
            }
            r.pop();
        }
        Ok((ZPoly::new(self.field, q)?, ZPoly::new(self.field, r)?))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &ZPoly) -> Result<ZPoly> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b)?.1;
            a = b;
            b = r;
        }
        match a.coeffs.last() {
            Some(lead) => Ok(a.scale(&lead.inv()?)),
            None => Ok(a),
        }
    }

    /// The polynomial as a series truncated at `precision`.
    pub fn to_series(&self, precision: usize) -> TruncatedSeries {
        let coeffs = (0..precision).map(|i| self.coeff(i)).collect();
        TruncatedSeries::new(self.field, coeffs).expect("same field")
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.coeffs.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone()));
        let p = AffinePolynomial::from_terms(self.field, 0, terms).map_err(|_| fmt::Error)?;
        write!(f, "{p}")
    }
}

/// A point of `ℙⁿ(k(z))` with coprime polynomial coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    coords: Vec<ZPoly>,
}

impl RationalPoint {
    /// Divides out the common factor; rejects the zero vector.
    pub fn new(coords: Vec<ZPoly>) -> Result<Self> {
        let field = coords.first().ok_or(Error::ZeroVector)?.field();
        let mut g = ZPoly::zero(field);
        for c in &coords {
            field.ensure_same(&c.field())?;
            g = g.gcd(c)?;
        }
        if g.is_zero() {
            return Err(Error::ZeroVector);
        }
        let coords = coords
            .iter()
            .map(|c| Ok(c.div_rem(&g)?.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalPoint { coords })
    }

    pub fn parse(coords: &[impl AsRef<str>], field: Field) -> Result<Self> {
        RationalPoint::new(
            coords.iter().map(|s| ZPoly::parse(s.as_ref(), field)).collect::<Result<_>>()?,
        )
    }

    pub fn field(&self) -> Field {
        self.coords[0].field()
    }

    /// Projective dimension.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[ZPoly] {
        &self.coords
    }

    /// Largest coordinate degree.
    pub fn height(&self) -> usize {
        self.coords.iter().filter_map(ZPoly::degree).max().unwrap_or(0)
    }

    fn series(&self, precision: usize) -> Vec<TruncatedSeries> {
        self.coords.iter().map(|c| c.to_series(precision)).collect()
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(" : "))
    }
}

/// A point of `ℙ¹ × ℙⁿ` over `k(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPoint {
    pub p1: RationalPoint,
    pub pn: RationalPoint,
}

impl BiPoint {
    pub fn new(p1: RationalPoint, pn: RationalPoint) -> Result<Self> {
        if p1.n() != 1 {
            return Err(Error::ArityMismatch { expected: 2, found: p1.coords.len() });
        }
        p1.field().ensure_same(&pn.field())?;
        Ok(BiPoint { p1, pn })
    }

    /// `((1 : z), pn)`.
    pub fn graph(pn: RationalPoint) -> Self {
        let field = pn.field();
        let p1 = RationalPoint::new(vec![
            ZPoly::constant(Scalar::one(field)),
            ZPoly::new(field, vec![Scalar::zero(field), Scalar::one(field)]).expect("z"),
        ])
        .expect("nonzero");
        BiPoint { p1, pn }
    }

    /// Coordinates in the order `X0', X1', X0, …, Xn`.
    fn all_coords(&self) -> impl Iterator<Item = &ZPoly> {
        self.p1.coords.iter().chain(self.pn.coords.iter())
    }
}

/// A finite formal sum of split points with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCycle {
    points: Vec<BiPoint>,
    mult: Vec<u64>,
}

/// `{"points": [["1", "z^2+1"], …], "mult": [1, …]}` with optional `ℙ¹` parts in `"p1"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleJson {
    pub points: Vec<Vec<String>>,
    #[serde(default)]
    pub mult: Option<Vec<u64>>,
    #[serde(default)]
    pub p1: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub char: u64,
}

impl SplitCycle {
    pub fn new(points: Vec<BiPoint>, mult: Vec<u64>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidInput("a cycle needs at least one point".into()))?;
        if mult.len() != points.len() {
            return Err(Error::ArityMismatch { expected: points.len(), found: mult.len() });
        }
        if mult.contains(&0) {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        let (n, field) = (first.pn.n(), first.pn.field());
        for p in &points {
            if p.pn.n() != n {
                return Err(Error::ArityMismatch { expected: n + 1, found: p.pn.n() + 1 });
            }
            field.ensure_same(&p.pn.field())?;
        }
        Ok(SplitCycle { points, mult })
    }

    /// Points of `ℙⁿ` with multiplicity one each, on the graph `(1 : z)`.
    pub fn from_points(points: Vec<RationalPoint>) -> Result<Self> {
        let mult = vec![1; points.len()];
        SplitCycle::new(points.into_iter().map(BiPoint::graph).collect(), mult)
    }

    pub fn from_json(j: &CycleJson) -> Result<Self> {
        let field = Field::from_characteristic(j.char)?;
        let pns = j
            .points
            .iter()
            .map(|c| RationalPoint::parse(c, field))
            .collect::<Result<Vec<_>>>()?;
        let points = match &j.p1 {
            None => pns.into_iter().map(BiPoint::graph).collect(),
            Some(p1s) => {
                if p1s.len() != pns.len() {
                    return Err(Error::ArityMismatch { expected: pns.len(), found: p1s.len() });
                }
                p1s.iter()
                    .zip(pns)
                    .map(|(c, pn)| BiPoint::new(RationalPoint::parse(c, field)?, pn))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let mult = j.mult.clone().unwrap_or_else(|| vec![1; points.len()]);
        SplitCycle::new(points, mult)
    }

    pub fn n(&self) -> usize {
        self.points[0].pn.n()
    }

    pub fn field(&self) -> Field {
        self.points[0].pn.field()
    }

    pub fn points(&self) -> &[BiPoint] {
        &self.points
    }

    pub fn mult(&self) -> &[u64] {
        &self.mult
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BiPoint, u64)> {
        self.points.iter().zip(self.mult.iter().copied())
    }
}

/// Degree and height; a single point has degree 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegHeight {
    pub deg: u64,
    pub h: u64,
}

pub fn point_deg_height(x: &RationalPoint) -> DegHeight {
    DegHeight { deg: 1, h: x.height() as u64 }
}

/// Aggregates over the `ℙⁿ` components with multiplicity.
pub fn cycle_deg_height(z: &SplitCycle) -> DegHeight {
    z.iter().fold(DegHeight { deg: 0, h: 0 }, |acc, (p, m)| DegHeight {
        deg: acc.deg + m,
        h: acc.h + m * p.pn.height() as u64,
    })
}

fn wedge_ord(x: &[TruncatedSeries], y: &[TruncatedSeries]) -> Result<OrdValue> {
    if x.len() != y.len() {
        return Err(Error::ArityMismatch { expected: x.len(), found: y.len() });
    }
    let precision = x.iter().chain(y).map(|s| s.precision()).min().unwrap_or(0);
    let mut ord = OrdValue::AtLeast(precision);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let w = x[i].mul(&y[j])?.sub(&x[j].mul(&y[i])?)?;
            ord = ord.min(w.truncate(precision).ord());
        }
    }
    Ok(ord)
}

fn vector_ord(x: &[TruncatedSeries]) -> Result<usize> {
    let mut ord = OrdValue::AtLeast(usize::MAX);
    for s in x {
        ord = ord.min(s.ord());
    }
    ord.finite().ok_or(Error::ZeroVector)
}

/// `ord(x ∧ y) − ord x − ord y` for two coordinate vectors of series.
pub fn ord_pair(x: &[TruncatedSeries], y: &[TruncatedSeries]) -> Result<OrdValue> {
    let w = wedge_ord(x, y)?;
    Ok(w.minus(vector_ord(x)? + vector_ord(y)?))
}

/// The functional point `(1 : f_1 : … : f_n)` as series.
fn point_series(f: &FunctionalPoint) -> Vec<TruncatedSeries> {
    let n = f.precision();
    std::iter::once(TruncatedSeries::constant(Scalar::one(f.field()), n))
        .chain(f.series().iter().cloned())
        .collect()
}

/// `(1 : z)` as series.
fn graph_series(field: Field, n: usize) -> Vec<TruncatedSeries> {
    vec![TruncatedSeries::constant(Scalar::one(field), n), TruncatedSeries::monomial(field, 1, n)]
}

/// Distance from `(1 : z) × (1 : f)` to a bi-projective point: minimum over the two factors.
pub fn ord_to_point(f: &FunctionalPoint, y: &BiPoint) -> Result<OrdValue> {
    if y.pn.n() != f.n() {
        return Err(Error::ArityMismatch { expected: f.n() + 1, found: y.pn.n() + 1 });
    }
    f.field().ensure_same(&y.pn.field())?;
    let n = f.precision();
    let d1 = ord_pair(&graph_series(f.field(), n), &y.p1.series(n))?;
    let dn = ord_pair(&point_series(f), &y.pn.series(n))?;
    Ok(d1.min(dn))
}

/// How distances to the points of a cycle are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleMode {
    /// `Σ m_β · ord(x, β)`.
    Sum,
    /// `max_β ord(x, β)`.
    Max,
}

impl CycleMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(CycleMode::Sum),
            "max" => Ok(CycleMode::Max),
            other => Err(Error::InvalidInput(format!("unknown cycle mode {other:?}"))),
        }
    }
}

/// Upper envelope of a family of orders; finite only when every member is finite.
fn ord_max(a: OrdValue, b: OrdValue) -> OrdValue {
    match (a, b) {
        (OrdValue::Finite(x), OrdValue::Finite(y)) => OrdValue::Finite(x.max(y)),
        _ => OrdValue::AtLeast(a.lower_bound().max(b.lower_bound())),
    }
}

pub fn ord_to_cycle(f: &FunctionalPoint, z: &SplitCycle, mode: CycleMode) -> Result<OrdValue> {
    let mut acc: Option<OrdValue> = None;
    for (p, m) in z.iter() {
        let d = ord_to_point(f, p)?;
        let term = match (mode, d) {
            (CycleMode::Sum, OrdValue::Finite(k)) => OrdValue::Finite(k * m as usize),
            (CycleMode::Sum, OrdValue::AtLeast(k)) => OrdValue::AtLeast(k * m as usize),
            (CycleMode::Max, d) => d,
        };
        acc = Some(match (acc, mode) {
            (None, _) => term,
            (Some(a), CycleMode::Sum) => a.add(term),
            (Some(a), CycleMode::Max) => ord_max(a, term),
        });
    }
    Ok(acc.expect("cycles are nonempty"))
}

/// `ord F(x) − deg F · ord x`; the second term vanishes since `x = (1 : z) × (1 : f)`.
pub fn ord_to_hypersurface(f: &FunctionalPoint, hyper: &BiPolynomial) -> Result<OrdValue> {
    if hyper.bidegree().is_none() {
        return Err(Error::NotBiHomogeneous);
    }
    Ok(evaluate_bi(hyper, f)?.ord())
}

fn eval_homogeneous(q: &AffinePolynomial, x: &RationalPoint) -> ZPoly {
    let field = q.field();
    let d = q.deg_x();
    let zvar = ZPoly::new(field, vec![Scalar::zero(field), Scalar::one(field)]).expect("z");
    let mut acc = ZPoly::zero(field);
    for (e, c) in q.terms() {
        let tot: u32 = e[1..].iter().sum();
        let mut t = zvar.pow(e[0]).mul(&x.coords[0].pow(d - tot)).scale(c);
        for (j, &k) in e[1..].iter().enumerate() {
            t = t.mul(&x.coords[j + 1].pow(k));
        }
        acc = acc.add(&t);
    }
    acc
}

/// Outcome of the Liouville inequality check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiouvilleCheck {
    pub holds: bool,
    pub deg_q: u64,
    pub h_q: u64,
    pub deg_z: u64,
    pub h_z: u64,
    /// `Σ m_β · ord_{z=0} Q(β)`.
    pub total_ord: u64,
    /// `deg Q · h(Z) + h(Q) · deg Z − total_ord`.
    pub slack: i64,
}

/// Checks `deg Q·h(Z) + h(Q)·deg Z ≥ Σ m_β ord Q(β)` for `Q` read homogeneously in `X`.
pub fn liouville_check(q: &AffinePolynomial, z: &SplitCycle) -> Result<LiouvilleCheck> {
    if q.n() != z.n() {
        return Err(Error::ArityMismatch { expected: z.n(), found: q.n() });
    }
    q.field().ensure_same(&z.field())?;
    let mut total = 0u64;
    for (p, m) in z.iter() {
        let v = eval_homogeneous(q, &p.pn);
        total += m * v.ord().ok_or(Error::VanishesOnCycle)? as u64;
    }
    let dh = cycle_deg_height(z);
    let (deg_q, h_q) = (q.deg_x() as u64, q.deg_z() as u64);
    let bound = deg_q * dh.h + h_q * dh.deg;
    Ok(LiouvilleCheck {
        holds: bound >= total,
        deg_q,
        h_q,
        deg_z: dh.deg,
        h_z: dh.h,
        total_ord: total,
        slack: bound as i64 - total as i64,
    })
}

/// Degree bounds after cutting by `r − r_p` further hypersurfaces of bidegree at most `(a, b)`.
pub fn bezout_bounds(
    deg1_p: &BigInt,
    deg0_p: &BigInt,
    r: u32,
    r_p: u32,
    a: &BigInt,
    b: &BigInt,
) -> Result<(BigInt, BigInt)> {
    let k = r
        .checked_sub(r_p)
        .ok_or_else(|| Error::InvalidInput(format!("r = {r} is smaller than r_p = {r_p}")))?;
    let bk = num_traits::pow(b.clone(), k as usize);
    let first = deg1_p * &bk;
    let mut second = deg0_p * &bk;
    if k > 0 {
        second += BigInt::from(k) * deg1_p * a * num_traits::pow(b.clone(), k as usize - 1);
    }
    Ok((first, second))
}

/// `deg0·b^d + d·deg1·a·b^{d−1}` with `d = dim X`.
pub fn deg_weighted(
    deg0: &BigInt,
    deg1: &BigInt,
    dim: u32,
    a: &BigRational,
    b: &BigRational,
) -> BigRational {
    let d0 = BigRational::from_integer(deg0.clone());
    if dim == 0 {
        return d0;
    }
    let d1 = BigRational::from_integer(deg1.clone());
    let bd = num_traits::pow(b.clone(), dim as usize);
    let bd1 = num_traits::pow(b.clone(), dim as usize - 1);
    d0 * bd + BigRational::from_integer(dim.into()) * d1 * a * bd1
}

/// Coefficients `(c', c)` of the linear form minimized in the `δ` search, for a variety with
/// degrees `deg_{(0,·)} = deg0`, `deg_{(1,·)} = deg1`.
pub fn delta_form(
    mu: &BigRational,
    nu0: &BigRational,
    nu1: &BigRational,
    deg0: &BigInt,
    deg1: &BigInt,
) -> (BigRational, BigRational) {
    let d0 = BigRational::from_integer(deg0.clone());
    let d1 = BigRational::from_integer(deg1.clone());
    (nu0 * &d1, mu * &d0 + nu1 * &d1)
}

/// Result of the `δ` search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaPair {
    /// Degree in `X'`.
    pub delta0: u32,
    /// Degree in `X`.
    pub delta1: u32,
    pub weight: BigRational,
    pub witness: BiPolynomial,
    pub witness_ord: OrdValue,
    /// Bidegrees examined, including the hit.
    pub examined: usize,
    pub precision: usize,
    /// Every observed slice used for exclusion had a stabilized kernel.
    pub stabilized: bool,
}

/// Bidegrees `(a, b)` with `a, b ≤ cap`, sorted by `c'a + cb`, then `b`, then `a`.
pub fn delta_order(cp: &BigRational, c: &BigRational, cap: u32) -> Vec<(u32, u32, BigRational)> {
    let mut out: Vec<(u32, u32, BigRational)> = (0..=cap)
        .flat_map(|a| (0..=cap).map(move |b| (a, b)))
        .map(|(a, b)| {
            let w = cp * BigRational::from_integer(a.into()) + c * BigRational::from_integer(b.into());
            (a, b, w)
        })
        .collect();
    out.sort_by(|x, y| x.2.cmp(&y.2).then(x.1.cmp(&y.1)).then(x.0.cmp(&y.0)));
    out
}

/// Basis of the bidegree-`(a, b)` forms vanishing at every point of `z`, as coefficient
/// vectors over `bi_monomials(n, a, b)`.
pub fn vanishing_forms(z: &SplitCycle, a: u32, b: u32) -> Result<Vec<Vec<Scalar>>> {
    let field = z.field();
    let monos = bi_monomials(z.n(), a, b);
    let mut cols: Vec<Vec<ZPoly>> = Vec::with_capacity(monos.len());
    for e in &monos {
        cols.push(z.points.iter().map(|p| monomial_at(e, p)).collect());
    }
    let mut rows = Vec::new();
    for (pi, _) in z.points.iter().enumerate() {
        let len = cols.iter().map(|c| c[pi].coeffs.len()).max().unwrap_or(0);
        for k in 0..len {
            rows.push(cols.iter().map(|c| c[pi].coeff(k)).collect::<Vec<_>>());
        }
    }
    if rows.is_empty() {
        return Ok(identity(field, monos.len()));
    }
    let m = ExactMatrix::from_rows(field, monos.len(), rows)?;
    Ok(m.kernel_basis())
}

fn identity(field: Field, k: usize) -> Vec<Vec<Scalar>> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { Scalar::one(field) } else { Scalar::zero(field) })
                .collect()
        })
        .collect()
}

fn monomial_at(e: &Exponents, p: &BiPoint) -> ZPoly {
    let field = p.pn.field();
    p.all_coords()
        .zip(e)
        .fold(ZPoly::constant(Scalar::one(field)), |acc, (c, &k)| acc.mul(&c.pow(k)))
}

fn coefficient_vector(p: &BiPolynomial, monos: &[Exponents]) -> Vec<Scalar> {
    monos.iter().map(|e| p.coeff(e)).collect()
}

fn form_from_vector(field: Field, n: usize, monos: &[Exponents], v: &[Scalar]) -> Result<BiPolynomial> {
    BiPolynomial::from_terms(field, n, monos.iter().cloned().zip(v.iter().cloned()))
}

/// Least bidegree (for `c'a + cb`) carrying a form that vanishes on `z` but not at `f`.
pub fn delta_pair(
    z: &SplitCycle,
    f: &FunctionalPoint,
    cp: &BigRational,
    c: &BigRational,
    cap: u32,
) -> Result<DeltaPair> {
    if z.n() != f.n() {
        return Err(Error::ArityMismatch { expected: f.n(), found: z.n() });
    }
    if cp < &BigRational::zero() || c < &BigRational::zero() {
        return Err(Error::InvalidInput("form coefficients must be nonnegative".into()));
    }
    for p in &z.points {
        if !ord_to_point(f, p)?.is_finite() {
            return Err(Error::PrecisionExhausted(format!(
                "the point is not separated from {} at precision {}",
                p.pn,
                f.precision()
            )));
        }
    }
    let field = f.field();
    let precision = f.precision();
    let mut stabilized = true;
    for (examined, (a, b, weight)) in delta_order(cp, c, cap).into_iter().enumerate() {
        let forms = vanishing_forms(z, a, b)?;
        if forms.is_empty() {
            continue;
        }
        let monos = bi_monomials(z.n(), a, b);
        let slice = pf_slice_with_flag(f, a, b, precision, None)?;
        stabilized &= slice.stabilized;
        let mut ech = RowEchelon::new(field, monos.len());
        for s in &slice.basis {
            ech.push_row(&coefficient_vector(s, &monos))?;
        }
        for v in forms {
            if ech.clone().push_row(&v)? {
                let mut v = v;
                normalize_leading_one(&mut v);
                let witness = form_from_vector(field, z.n(), &monos, &v)?;
                let witness_ord = evaluate_bi(&witness, f)?.ord();
                return Ok(DeltaPair {
                    delta0: a,
                    delta1: b,
                    weight,
                    witness,
                    witness_ord,
                    examined: examined + 1,
                    precision,
                    stabilized,
                });
            }
        }
    }
    Err(Error::CapExceeded(cap as usize))
}

/// Rational from an integer, for callers building form coefficients.
pub fn rational(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}
