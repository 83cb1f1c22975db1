//! Power-series solutions of Mahler-type systems `A0(z,f)·f_i(p(z)) = A_i(z,f)` and of
//! differential systems `A0(z,f)·f_i'(z) = A_i(z,f)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::biring::{evaluate_affine, parse_affine, AffinePolynomial, FunctionalPoint};
use crate::error::{Error, Result};
use crate::exactalg::{ExactMatrix, Field, Scalar};
use crate::series::{OrdValue, TruncatedSeries};

/// `f_i(p(z)) = A_i(z, f) / A0(z, f)` with `p = p_num / p_den`, `ord p ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MahlerSystem {
    pub n: usize,
    pub field: Field,
    /// Numerator of `p`, a polynomial in `z` alone.
    pub p_num: AffinePolynomial,
    /// Denominator of `p`; `None` means 1.
    pub p_den: Option<AffinePolynomial>,
    /// `A0, …, An`.
    pub a: Vec<AffinePolynomial>,
    /// `f_1(0), …, f_n(0)`.
    pub seed: Vec<Scalar>,
    pub t_f: Option<usize>,
}

/// `f_i' = A_i(z, f) / A0(z, f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialSystem {
    pub n: usize,
    pub field: Field,
    pub a: Vec<AffinePolynomial>,
    pub init: Vec<Scalar>,
    pub t_f: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionalSystem {
    Mahler(MahlerSystem),
    Differential(DifferentialSystem),
}

/// JSON descriptor of a system; polynomials use the text grammar of [`crate::biring`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_den: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    pub seed: Vec<String>,
    #[serde(default)]
    pub char: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_f: Option<usize>,
}

fn check_arity(n: usize, a: &[AffinePolynomial], seed: &[Scalar], field: Field) -> Result<()> {
    if a.len() != n + 1 {
        return Err(Error::ArityMismatch { expected: n + 1, found: a.len() });
    }
    if seed.len() != n {
        return Err(Error::ArityMismatch { expected: n, found: seed.len() });
    }
    for p in a {
        if p.n() != n {
            return Err(Error::ArityMismatch { expected: n, found: p.n() });
        }
        field.ensure_same(&p.field())?;
    }
    for s in seed {
        field.ensure_same(&s.field())?;
    }
    Ok(())
}

impl MahlerSystem {
    /// Validates `ord p ≥ 2`, `A0(0, seed) ≠ 0` and the fixed-point condition on the seed.
    pub fn new(
        field: Field,
        p_num: AffinePolynomial,
        p_den: Option<AffinePolynomial>,
        a: Vec<AffinePolynomial>,
        seed: Vec<Scalar>,
    ) -> Result<Self> {
        let n = seed.len();
        check_arity(n, &a, &seed, field)?;
        let s = MahlerSystem { n, field, p_num, p_den, a, seed, t_f: None };
        if s.p_num.n() != 0 || s.p_den.as_ref().is_some_and(|d| d.n() != 0) {
            return Err(Error::InvalidInput("p must be a polynomial in z alone".into()));
        }
        if let Some(d) = &s.p_den {
            if d.coeff(&[0]).is_zero() {
                return Err(Error::InvalidInput("denominator of p vanishes at 0".into()));
            }
        }
        if s.delta() < 2 {
            return Err(Error::InvalidInput(format!("ord p = {} < 2", s.delta())));
        }
        let zero = Scalar::zero(field);
        let a0 = s.a[0].eval_scalar(&zero, &s.seed)?;
        if a0.is_zero() {
            return Err(Error::DegenerateA0);
        }
        for i in 1..=n {
            let rhs = s.a[i].eval_scalar(&zero, &s.seed)?;
            if &s.seed[i - 1] * &a0 != rhs {
                return Err(Error::SeedNotFixedPoint { index: i });
            }
        }
        Ok(s)
    }

    /// `δ = ord_{z=0} p`.
    pub fn delta(&self) -> usize {
        self.p_num.terms().map(|(e, _)| e[0] as usize).min().unwrap_or(usize::MAX)
    }

    /// `d = deg p` (maximum of numerator and denominator degrees).
    pub fn degree(&self) -> usize {
        let den = self.p_den.as_ref().map_or(0, |d| d.deg_z());
        self.p_num.deg_z().max(den) as usize
    }

    /// `p(z)` modulo `z^precision`.
    pub fn p_series(&self, precision: usize) -> Result<TruncatedSeries> {
        let num = poly_series(&self.p_num, precision);
        match &self.p_den {
            None => Ok(num),
            Some(d) => num.mul(&series_inverse(&poly_series(d, precision))?),
        }
    }
}

impl DifferentialSystem {
    pub fn new(field: Field, a: Vec<AffinePolynomial>, init: Vec<Scalar>) -> Result<Self> {
        let n = init.len();
        check_arity(n, &a, &init, field)?;
        if a[0].eval_scalar(&Scalar::zero(field), &init)?.is_zero() {
            return Err(Error::DegenerateA0);
        }
        Ok(DifferentialSystem { n, field, a, init, t_f: None })
    }
}

impl FunctionalSystem {
    pub fn n(&self) -> usize {
        match self {
            FunctionalSystem::Mahler(s) => s.n,
            FunctionalSystem::Differential(s) => s.n,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            FunctionalSystem::Mahler(s) => s.field,
            FunctionalSystem::Differential(s) => s.field,
        }
    }

    pub fn equations(&self) -> &[AffinePolynomial] {
        match self {
            FunctionalSystem::Mahler(s) => &s.a,
            FunctionalSystem::Differential(s) => &s.a,
        }
    }

    pub fn solve(&self, precision: usize) -> Result<FunctionalPoint> {
        match self {
            FunctionalSystem::Mahler(s) => solve_mahler(s, precision),
            FunctionalSystem::Differential(s) => solve_differential(s, precision),
        }
    }

    pub fn from_descriptor(d: &SystemDescriptor) -> Result<Self> {
        let field = Field::from_characteristic(d.char)?;
        let a = d
            .a
            .iter()
            .map(|s| parse_affine(s, field, d.n))
            .collect::<Result<Vec<_>>>()?;
        let seed = d.seed.iter().map(|s| Scalar::parse(s, field)).collect::<Result<Vec<_>>>()?;
        if seed.len() != d.n {
            return Err(Error::ArityMismatch { expected: d.n, found: seed.len() });
        }
        match d.kind.as_str() {
            "mahler" => {
                let p = d.p.as_deref().ok_or_else(|| Error::MissingParam("p".into()))?;
                let p_num = parse_affine(p, field, 0)?;
                let p_den = d.p_den.as_deref().map(|s| parse_affine(s, field, 0)).transpose()?;
                let mut s = MahlerSystem::new(field, p_num, p_den, a, seed)?;
                s.t_f = d.t_f;
                Ok(FunctionalSystem::Mahler(s))
            }
            "differential" => {
                let mut s = DifferentialSystem::new(field, a, seed)?;
                s.t_f = d.t_f;
                Ok(FunctionalSystem::Differential(s))
            }
            other => Err(Error::InvalidInput(format!("unknown system kind '{other}'"))),
        }
    }

    pub fn to_descriptor(&self) -> SystemDescriptor {
        let (kind, p, p_den, seed, t_f) = match self {
            FunctionalSystem::Mahler(s) => (
                "mahler",
                Some(s.p_num.to_string()),
                s.p_den.as_ref().map(|d| d.to_string()),
                &s.seed,
                s.t_f,
            ),
            FunctionalSystem::Differential(s) => ("differential", None, None, &s.init, s.t_f),
        };
        SystemDescriptor {
            kind: kind.into(),
            n: self.n(),
            p,
            p_den,
            a: self.equations().iter().map(|a| a.to_string()).collect(),
            seed: seed.iter().map(scalar_text).collect(),
            char: self.field().characteristic(),
            t_f,
        }
    }
}

fn scalar_text(c: &Scalar) -> String {
    match c {
        Scalar::Mod { value, .. } => value.to_string(),
        Scalar::Rat(_) => c.to_string(),
    }
}

/// A polynomial in `z` alone as a series modulo `z^precision`.
fn poly_series(p: &AffinePolynomial, precision: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(p.field(), precision);
    for (e, c) in p.terms() {
        if (e[0] as usize) < precision {
            s.set_coeff(e[0] as usize, c.clone()).expect("same field");
        }
    }
    s
}

fn series_inverse(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    let n = s.precision();
    let inv0 = s.coeff(0).inv()?;
    let mut out = vec![inv0.clone()];
    for m in 1..n {
        let mut acc = Scalar::zero(s.field());
        for k in 1..=m {
            acc = &acc + &(s.coeff(k) * &out[m - k]);
        }
        out.push(-&(&acc * &inv0));
    }
    TruncatedSeries::new(s.field(), out)
}

/// Coefficient tables of every `X`-monomial `f^e` occurring in a family of polynomials,
/// extended one coefficient at a time.
struct MonomialTable {
    index: BTreeMap<Vec<u32>, usize>,
    /// `(parent, variable)` with `f^e = f^parent · f_variable`; `None` for the constant monomial.
    links: Vec<Option<(usize, usize)>>,
    values: Vec<Vec<Scalar>>,
}

impl MonomialTable {
    fn new(n: usize, polys: &[AffinePolynomial]) -> Self {
        let mut t = MonomialTable { index: BTreeMap::new(), links: Vec::new(), values: Vec::new() };
        t.insert(vec![0; n]);
        for p in polys {
            for (e, _) in p.terms() {
                t.insert(e[1..].to_vec());
            }
        }
        t
    }

    fn insert(&mut self, e: Vec<u32>) -> usize {
        if let Some(&i) = self.index.get(&e) {
            return i;
        }
        let link = e.iter().position(|&k| k > 0).map(|var| {
            let mut parent = e.clone();
            parent[var] -= 1;
            (self.insert(parent), var)
        });
        let i = self.links.len();
        self.links.push(link);
        self.values.push(Vec::new());
        self.index.insert(e, i);
        i
    }

    /// Computes coefficient `m` of every monomial from coefficients `0..=m` of `f`.
    /// Parents always precede children, so one pass suffices.
    fn set_coeff(&mut self, m: usize, f: &[Vec<Scalar>], field: Field) {
        for i in 0..self.links.len() {
            let v = match self.links[i] {
                None => {
                    if m == 0 {
                        Scalar::one(field)
                    } else {
                        Scalar::zero(field)
                    }
                }
                Some((parent, var)) => {
                    let mut acc = Scalar::zero(field);
                    for l in 0..=m {
                        let a = &self.values[parent][l];
                        let b = &f[var][m - l];
                        if !a.is_zero() && !b.is_zero() {
                            acc = &acc + &(a * b);
                        }
                    }
                    acc
                }
            };
            if self.values[i].len() == m {
                self.values[i].push(v);
            } else {
                self.values[i][m] = v;
            }
        }
    }

    /// Coefficient `m` of `P(z, f)`.
    fn eval_coeff(&self, p: &AffinePolynomial, m: usize) -> Scalar {
        let mut acc = Scalar::zero(p.field());
        for (e, c) in p.terms() {
            let ez = e[0] as usize;
            if ez <= m {
                let v = &self.values[self.index[&e[1..]]][m - ez];
                if !v.is_zero() {
                    acc = &acc + &(c * v);
                }
            }
        }
        acc
    }
}

/// Matrix `∂A_i/∂X_j(0, s) − s_i·∂A0/∂X_j(0, s)`.
fn recursion_matrix(a: &[AffinePolynomial], s: &[Scalar], field: Field) -> Result<ExactMatrix> {
    let n = s.len();
    let zero = Scalar::zero(field);
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let mut row = Vec::with_capacity(n);
        for j in 1..=n {
            let di = a[i].d_x(j).eval_scalar(&zero, s)?;
            let d0 = a[0].d_x(j).eval_scalar(&zero, s)?;
            row.push(&di - &(&s[i - 1] * &d0));
        }
        rows.push(row);
    }
    ExactMatrix::from_rows(field, n, rows)
}

/// Expands the unique solution with `f(0) = seed` modulo `z^precision`.
///
/// At step `m ≥ 1` the unknown `f_m` enters coefficient `m` of the residual only through the
/// linear term `−M·f_m`, since `f_i(p(z))` depends on `f_{i,k}` with `k ≤ m/δ < m` there.
pub fn solve_mahler(s: &MahlerSystem, precision: usize) -> Result<FunctionalPoint> {
    let field = s.field;
    let n = s.n;
    let precision = precision.max(1);
    let m_mat = recursion_matrix(&s.a, &s.seed, field)?;
    if n > 0 && m_mat.rank() < n {
        return Err(Error::SingularRecursion { step: 1 });
    }
    let delta = s.delta();
    let monomial_p = s.p_den.is_none() && s.p_num.num_terms() == 1;
    let p_powers: Vec<TruncatedSeries> = if monomial_p {
        Vec::new()
    } else {
        let p = s.p_series(precision)?;
        let mut v = vec![TruncatedSeries::constant(Scalar::one(field), precision)];
        for k in 1..=(precision - 1) / delta {
            let next = v[k - 1].mul(&p)?;
            v.push(next);
        }
        v
    };
    let p_lead = s.p_num.coeff(&[delta as u32]);

    let mut f: Vec<Vec<Scalar>> = s.seed.iter().map(|c| vec![c.clone()]).collect();
    let mut table = MonomialTable::new(n, &s.a);
    table.set_coeff(0, &f, field);
    let mut a0 = vec![table.eval_coeff(&s.a[0], 0)];

    for m in 1..precision {
        for fi in f.iter_mut() {
            fi.push(Scalar::zero(field));
        }
        table.set_coeff(m, &f, field);
        let a0_m = table.eval_coeff(&s.a[0], m);
        let mut rhs = Vec::with_capacity(n);
        for i in 1..=n {
            // coefficient m of A0(z,f)·(f_i∘p), with the tentative A0 coefficient a0_m
            let mut prod = Scalar::zero(field);
            for l in 0..=m {
                let a0l = if l == m { &a0_m } else { &a0[l] };
                let fc = comp_coeff(&f[i - 1], m - l, delta, monomial_p, &p_lead, &p_powers, field);
                prod = &prod + &(a0l * &fc);
            }
            let residual = &prod - &table.eval_coeff(&s.a[i], m);
            rhs.push(residual);
        }
        let sol = if n == 0 {
            Vec::new()
        } else {
            m_mat.solve(&rhs)?.ok_or(Error::SingularRecursion { step: m })?
        };
        for (fi, v) in f.iter_mut().zip(sol) {
            fi[m] = v;
        }
        table.set_coeff(m, &f, field);
        a0.push(table.eval_coeff(&s.a[0], m));
    }

    let series = f
        .into_iter()
        .map(|c| TruncatedSeries::new(field, c))
        .collect::<Result<Vec<_>>>()?;
    FunctionalPoint::new(field, series, s.t_f)
}

fn comp_coeff(
    f: &[Scalar],
    m: usize,
    delta: usize,
    monomial_p: bool,
    p_lead: &Scalar,
    p_powers: &[TruncatedSeries],
    field: Field,
) -> Scalar {
    if monomial_p {
        if m % delta == 0 {
            &f[m / delta] * &p_lead.pow((m / delta) as u32)
        } else {
            Scalar::zero(field)
        }
    } else {
        let mut acc = Scalar::zero(field);
        for k in 0..=m / delta {
            acc = &acc + &(&f[k] * p_powers[k].coeff(m));
        }
        acc
    }
}

/// Expands the solution with `f(0) = init` modulo `z^precision`.
///
/// `f_{i,m} = −r / (m·A0(0, init))` where `r` is coefficient `m−1` of `A0·f_i' − A_i` with
/// `f_m` set to zero.
pub fn solve_differential(s: &DifferentialSystem, precision: usize) -> Result<FunctionalPoint> {
    let field = s.field;
    let n = s.n;
    let precision = precision.max(1);
    let mut f: Vec<Vec<Scalar>> = s.init.iter().map(|c| vec![c.clone()]).collect();
    let mut table = MonomialTable::new(n, &s.a);
    table.set_coeff(0, &f, field);
    let mut a0 = vec![table.eval_coeff(&s.a[0], 0)];
    let a00 = a0[0].clone();

    for m in 1..precision {
        let denom = a00.scale(m as i64);
        if denom.is_zero() {
            return Err(Error::CharacteristicDivision { step: m, modulus: field.characteristic() });
        }
        let inv = denom.inv()?;
        let mut next = Vec::with_capacity(n);
        for i in 1..=n {
            let mut r = Scalar::zero(field);
            for l in 1..m {
                let d = f[i - 1][m - l].scale((m - l) as i64);
                r = &r + &(&a0[l] * &d);
            }
            r = &r - &table.eval_coeff(&s.a[i], m - 1);
            next.push(-&(&r * &inv));
        }
        for (fi, v) in f.iter_mut().zip(next) {
            fi.push(v);
        }
        table.set_coeff(m, &f, field);
        a0.push(table.eval_coeff(&s.a[0], m));
    }

    let series = f
        .into_iter()
        .map(|c| TruncatedSeries::new(field, c))
        .collect::<Result<Vec<_>>>()?;
    FunctionalPoint::new(field, series, s.t_f)
}

/// Residual series of every equation of `s` at `f` truncated to `precision`.
pub fn residuals(
    s: &FunctionalSystem,
    f: &FunctionalPoint,
    precision: usize,
) -> Result<Vec<TruncatedSeries>> {
    if f.n() != s.n() {
        return Err(Error::ArityMismatch { expected: s.n(), found: f.n() });
    }
    let f = f.truncate(precision);
    let a = s.equations();
    let a0 = evaluate_affine(&a[0], &f)?;
    let mut out = Vec::with_capacity(s.n());
    for i in 1..=s.n() {
        let ai = evaluate_affine(&a[i], &f)?;
        let fi = &f.series()[i - 1];
        let lhs = match s {
            FunctionalSystem::Mahler(m) => {
                let p = m.p_series(fi.precision())?;
                a0.mul(&fi.compose(&p)?)?
            }
            FunctionalSystem::Differential(_) => a0.mul(&fi.derivative())?,
        };
        out.push(lhs.sub(&ai)?);
    }
    Ok(out)
}

/// `ord` of every residual; `AtLeast` everywhere certifies `f` to the achievable precision.
pub fn verify_residual(
    s: &FunctionalSystem,
    f: &FunctionalPoint,
    precision: usize,
) -> Result<Vec<OrdValue>> {
    Ok(residuals(s, f, precision)?.iter().map(|r| r.ord()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn desc(kind: &str, n: usize, p: Option<&str>, a: &[&str], seed: &[&str]) -> SystemDescriptor {
        SystemDescriptor {
            kind: kind.into(),
            n,
            p: p.map(String::from),
            p_den: None,
            a: a.iter().map(|s| s.to_string()).collect(),
            seed: seed.iter().map(|s| s.to_string()).collect(),
            char: 0,
            t_f: None,
        }
    }

    fn system(d: &SystemDescriptor) -> FunctionalSystem {
        FunctionalSystem::from_descriptor(d).unwrap()
    }

    fn coeffs_i64(f: &FunctionalPoint, i: usize) -> Vec<String> {
        f.series()[i].coeffs().iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn cantor_expansion() {
        let s = system(&desc("mahler", 1, Some("z^2"), &["1", "X1 - z"], &["0"]));
        let f = s.solve(17).unwrap();
        let expect: Vec<String> = (0..17)
            .map(|k: usize| if k.is_power_of_two() { "1" } else { "0" }.to_string())
            .collect();
        assert_eq!(coeffs_i64(&f, 0), expect);
        assert!(verify_residual(&s, &f, 17).unwrap().iter().all(|o| !o.is_finite()));
    }

    #[test]
    fn infinite_product_expansion() {
        let s = system(&desc("mahler", 1, Some("z^2"), &["1 - z", "X1"], &["1"]));
        let f = s.solve(8).unwrap();
        assert_eq!(coeffs_i64(&f, 0), ["1", "-1", "-1", "1", "-1", "1", "1", "-1"]);
    }

    #[test]
    fn trivial_mahler_solution_is_zero() {
        let s = system(&desc("mahler", 1, Some("z^2"), &["1", "X1"], &["0"]));
        let f = s.solve(10).unwrap();
        assert!(f.series()[0].ord() == OrdValue::AtLeast(10));
    }

    #[test]
    fn singular_recursion_and_seed_checks() {
        let d = desc("mahler", 1, Some("z^2"), &["1", "X1^2"], &["0"]);
        assert!(matches!(
            FunctionalSystem::from_descriptor(&d).unwrap().solve(5),
            Err(Error::SingularRecursion { .. })
        ));
        let d = desc("mahler", 1, Some("z^2"), &["1", "X1 + 1"], &["0"]);
        assert!(matches!(
            FunctionalSystem::from_descriptor(&d),
            Err(Error::SeedNotFixedPoint { index: 1 })
        ));
        let d = desc("mahler", 1, Some("z^2"), &["z", "X1"], &["0"]);
        assert!(matches!(FunctionalSystem::from_descriptor(&d), Err(Error::DegenerateA0)));
        let d = desc("mahler", 1, Some("z + z^2"), &["1", "X1"], &["0"]);
        assert!(matches!(FunctionalSystem::from_descriptor(&d), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rational_p_matches_direct_composition() {
        let mut d = desc("mahler", 1, Some("z^2"), &["1", "X1 - z"], &["0"]);
        d.p_den = Some("1 - z".into());
        let s = system(&d);
        let f = s.solve(20).unwrap();
        assert!(verify_residual(&s, &f, 20).unwrap().iter().all(|o| !o.is_finite()));
        let d2 = desc("mahler", 1, Some("z^2 + z^3"), &["1", "X1 - z"], &["0"]);
        let s2 = system(&d2);
        let f2 = s2.solve(20).unwrap();
        assert!(verify_residual(&s2, &f2, 20).unwrap().iter().all(|o| !o.is_finite()));
    }

    #[test]
    fn exponential_and_trig() {
        let s = system(&desc("differential", 1, None, &["1", "X1"], &["1"]));
        let f = s.solve(5).unwrap();
        assert_eq!(coeffs_i64(&f, 0), ["1", "1", "1/2", "1/6", "1/24"]);

        let s = system(&desc("differential", 1, None, &["1", "1"], &["0"]));
        assert_eq!(coeffs_i64(&s.solve(4).unwrap(), 0), ["0", "1", "0", "0"]);

        let s = system(&desc("differential", 2, None, &["1", "X2", "-X1"], &["0", "1"]));
        let f = s.solve(6).unwrap();
        assert_eq!(coeffs_i64(&f, 0), ["0", "1", "0", "-1/6", "0", "1/120"]);
        assert!(verify_residual(&s, &f, 6).unwrap().iter().all(|o| *o == OrdValue::AtLeast(5)));
    }

    #[test]
    fn differential_nonconstant_a0() {
        // (1 - z) f' = 1, f(0) = 0: f = -log(1 - z)
        let s = system(&desc("differential", 1, None, &["1 - z", "1"], &["0"]));
        let f = s.solve(6).unwrap();
        assert_eq!(coeffs_i64(&f, 0), ["0", "1", "1/2", "1/3", "1/4", "1/5"]);
    }

    #[test]
    fn characteristic_division() {
        let mut d = desc("differential", 1, None, &["1", "X1"], &["1"]);
        d.char = 3;
        let s = system(&d);
        assert!(matches!(
            s.solve(10),
            Err(Error::CharacteristicDivision { step: 3, modulus: 3 })
        ));
        assert!(s.solve(3).is_ok());
    }

    #[test]
    fn residual_examples() {
        let s = system(&desc("mahler", 1, Some("z^2"), &["1", "X1 - z"], &["0"]));
        let f = FunctionalPoint::new(Q, vec![TruncatedSeries::monomial(Q, 1, 10)], None).unwrap();
        assert_eq!(verify_residual(&s, &f, 10).unwrap(), vec![OrdValue::Finite(2)]);

        let e = system(&desc("differential", 1, None, &["1", "X1"], &["1"]));
        let mut g = e.solve(10).unwrap().series()[0].clone();
        g.set_coeff(5, Scalar::from_i64(Q, 7)).unwrap();
        let g = FunctionalPoint::new(Q, vec![g], None).unwrap();
        assert_eq!(verify_residual(&e, &g, 10).unwrap(), vec![OrdValue::Finite(4)]);
    }

    #[test]
    fn modular_mahler_system() {
        let mut d = desc("mahler", 1, Some("z^2"), &["1", "X1 - z"], &["0"]);
        d.char = 2;
        let s = system(&d);
        let f = s.solve(33).unwrap();
        assert!(verify_residual(&s, &f, 33).unwrap().iter().all(|o| !o.is_finite()));
    }

    #[test]
    fn descriptor_roundtrip() {
        let d = desc("mahler", 2, Some("z^3"), &["1", "X1 - z", "X2 + X1*z"], &["0", "0"]);
        let s = system(&d);
        let back = FunctionalSystem::from_descriptor(&s.to_descriptor()).unwrap();
        assert_eq!(s, back);
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"A\""));
    }
}
