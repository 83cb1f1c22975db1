//! The map `φ: 𝒜 → 𝒜`, either a derivation attached to a differential system or the pullback
//! `Q ↦ Q(A0', A1', A0, …, An)` attached to a Mahler system, with iteration and empirical
//! checks of the degree growth laws and of the order growth `ord φ(Q)(f) ≥ λ·ord Q(f)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::biring::{
    bi_monomials, evaluate_bi, parse_bi, parse_poly, AffinePolynomial, AnyPolynomial,
    BiPolynomial, FunctionalPoint,
};
use crate::error::{Error, Result};
use crate::exactalg::{parse_rational, Field, Scalar};
use crate::funceq::{DifferentialSystem, MahlerSystem};
use crate::series::OrdValue;

/// Constants of `deg_X φ(Q) ≤ μ·deg_X Q`, `deg_X' φ(Q) ≤ ν0·deg_X' Q + ν1·deg_X Q`, and of
/// `ord φ(Q)(f) ≥ λ·ord Q(f)` whenever `ord Q(f) ≥ K_λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthConstants {
    pub mu: BigRational,
    pub nu0: BigRational,
    pub nu1: BigRational,
    pub lambda: BigRational,
    pub k_lambda: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapKind {
    /// `D = h[0]·∂/∂X1' + Σ h[i]·∂/∂X_i`.
    Derivation { h: Vec<BiPolynomial> },
    /// `Q ↦ Q(a_prime[0], a_prime[1], a[0], …, a[n])`.
    MahlerPullback { a_prime: [BiPolynomial; 2], a: Vec<BiPolynomial> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapSpec {
    pub n: usize,
    pub field: Field,
    pub kind: MapKind,
    pub growth: GrowthConstants,
}

/// JSON form: `{"kind": "derivation"|"mahler", "n", "char", "Aprime": [...], "A": [...],
/// "growth": {"mu", "nu0", "nu1", "lambda", "Klambda"}}`. Missing growth entries default to the
/// structural constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSpecJson {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub char: u64,
    #[serde(rename = "Aprime", default)]
    pub a_prime: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(default)]
    pub growth: Option<GrowthJson>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GrowthJson {
    #[serde(default)]
    pub mu: Option<serde_json::Value>,
    #[serde(default)]
    pub nu0: Option<serde_json::Value>,
    #[serde(default)]
    pub nu1: Option<serde_json::Value>,
    #[serde(default)]
    pub lambda: Option<serde_json::Value>,
    #[serde(rename = "Klambda", default)]
    pub k_lambda: Option<u64>,
}

/// Reads a rational from a JSON integer or a string such as `"3/2"`.
pub fn rational_from_json(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::Number(x) => match x.as_i64() {
            Some(k) => Ok(BigRational::from_integer(k.into())),
            None => Err(Error::InvalidInput(format!("expected an exact rational, got {x}"))),
        },
        serde_json::Value::String(s) => parse_rational(s.trim()),
        other => Err(Error::InvalidInput(format!("expected a rational, got {other}"))),
    }
}

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

/// Shift `(σ, κ)` making the homogenized derivation bi-homogeneous:
/// `σ = max(deg_z A0 − 1, deg_z A_i, 0)`, `κ = max(deg_X A0, deg_X A_i − 1, 0)`.
pub fn derivation_shift(a: &[AffinePolynomial]) -> (u32, u32) {
    let mut sigma = a[0].deg_z().saturating_sub(1);
    let mut kappa = a[0].deg_x();
    for ai in &a[1..] {
        sigma = sigma.max(ai.deg_z());
        kappa = kappa.max(ai.deg_x().saturating_sub(1));
    }
    (sigma, kappa)
}

impl MapSpec {
    /// Derivation with explicit coefficients `h[0]` (of `∂/∂X1'`) and `h[i]` (of `∂/∂X_i`).
    pub fn derivation(h: Vec<BiPolynomial>, growth: Option<GrowthConstants>) -> Result<Self> {
        let n = h.len().checked_sub(1).ok_or(Error::ArityMismatch { expected: 1, found: 0 })?;
        let field = h[0].field();
        for p in &h {
            if p.n() != n {
                return Err(Error::ArityMismatch { expected: n, found: p.n() });
            }
            field.ensure_same(&p.field())?;
        }
        let mut spec = MapSpec {
            n,
            field,
            kind: MapKind::Derivation { h },
            growth: GrowthConstants {
                mu: rat(1),
                nu0: rat(1),
                nu1: rat(0),
                lambda: BigRational::new(1.into(), 2.into()),
                k_lambda: 2,
            },
        };
        spec.growth = growth.unwrap_or_else(|| spec.structural_constants());
        Ok(spec)
    }

    /// Homogenized derivation of `A0·∂/∂z + Σ A_i·∂/∂X_i`:
    /// `D(X1') = X0'^{σ+1}·X0^κ·A0(X1'/X0', X/X0)`, `D(X_i) = X0'^σ·X0^{κ+1}·A_i(X1'/X0', X/X0)`,
    /// with `(σ, κ)` from [`derivation_shift`].
    pub fn from_differential(a: &[AffinePolynomial]) -> Result<Self> {
        let (sigma, kappa) = derivation_shift(a);
        let mut h = Vec::with_capacity(a.len());
        h.push(a[0].homogenize_to(sigma + 1, kappa)?);
        for ai in &a[1..] {
            h.push(ai.homogenize_to(sigma, kappa + 1)?);
        }
        MapSpec::derivation(h, None)
    }

    pub fn from_differential_system(s: &DifferentialSystem) -> Result<Self> {
        MapSpec::from_differential(&s.a)
    }

    pub fn pullback(
        a_prime: [BiPolynomial; 2],
        a: Vec<BiPolynomial>,
        growth: Option<GrowthConstants>,
    ) -> Result<Self> {
        let n = a.len().checked_sub(1).ok_or(Error::ArityMismatch { expected: 1, found: 0 })?;
        let field = a_prime[0].field();
        for p in a_prime.iter().chain(a.iter()) {
            if p.n() != n {
                return Err(Error::ArityMismatch { expected: n, found: p.n() });
            }
            field.ensure_same(&p.field())?;
        }
        let mut spec = MapSpec {
            n,
            field,
            kind: MapKind::MahlerPullback { a_prime, a },
            growth: GrowthConstants {
                mu: rat(1),
                nu0: rat(1),
                nu1: rat(0),
                lambda: rat(1),
                k_lambda: 0,
            },
        };
        spec.pullback_degrees()?;
        spec.growth = growth.unwrap_or_else(|| spec.structural_constants());
        Ok(spec)
    }

    /// The morphism mutually associated with a Mahler system: `A1'/A0' = p`, both of degree
    /// `r = deg p`, and every `A_j` homogenized to the common bidegree `(s, q)`.
    pub fn from_mahler_system(s: &MahlerSystem) -> Result<Self> {
        let n = s.n;
        let field = s.field;
        let r = s.degree() as u32;
        let num = s.p_num.homogenize_to(r, 0)?;
        let den = match &s.p_den {
            Some(d) => d.homogenize_to(r, 0)?,
            None => AffinePolynomial::constant(Scalar::one(field), 0).homogenize_to(r, 0)?,
        };
        let lift = |p: &BiPolynomial| -> Result<BiPolynomial> {
            let images: Vec<BiPolynomial> = (0..3)
                .map(|i| {
                    if i < 2 {
                        BiPolynomial::x_prime(field, n, i)
                    } else {
                        BiPolynomial::x(field, n, 0)
                    }
                })
                .collect();
            p.substitute(&images)
        };
        let sdeg = s.a.iter().map(|p| p.deg_z()).max().unwrap_or(0);
        let qdeg = s.a.iter().map(|p| p.deg_x()).max().unwrap_or(0);
        let a = s.a.iter().map(|p| p.homogenize_to(sdeg, qdeg)).collect::<Result<Vec<_>>>()?;
        MapSpec::pullback([lift(&den)?, lift(&num)?], a, None)
    }

    pub fn from_json(j: &MapSpecJson) -> Result<Self> {
        let field = Field::from_characteristic(j.char)?;
        let n = j.n;
        let spec = match j.kind.as_str() {
            "derivation" => {
                let parsed = j.a.iter().map(|s| parse_poly(s, field, n)).collect::<Result<Vec<_>>>()?;
                if parsed.iter().all(|p| matches!(p, AnyPolynomial::Affine(_))) {
                    let a: Vec<AffinePolynomial> = parsed.iter().map(|p| p.to_affine()).collect();
                    if a.len() != n + 1 {
                        return Err(Error::ArityMismatch { expected: n + 1, found: a.len() });
                    }
                    MapSpec::from_differential(&a)?
                } else {
                    let h = j.a.iter().map(|s| parse_bi(s, field, n)).collect::<Result<Vec<_>>>()?;
                    MapSpec::derivation(h, None)?
                }
            }
            "mahler" => {
                if j.a_prime.len() != 2 {
                    return Err(Error::ArityMismatch { expected: 2, found: j.a_prime.len() });
                }
                let ap0 = parse_bi(&j.a_prime[0], field, n)?;
                let ap1 = parse_bi(&j.a_prime[1], field, n)?;
                let parsed = j.a.iter().map(|s| parse_poly(s, field, n)).collect::<Result<Vec<_>>>()?;
                let a = if parsed.iter().all(|p| matches!(p, AnyPolynomial::Affine(_))) {
                    let aff: Vec<AffinePolynomial> = parsed.iter().map(|p| p.to_affine()).collect();
                    let s = aff.iter().map(|p| p.deg_z()).max().unwrap_or(0);
                    let q = aff.iter().map(|p| p.deg_x()).max().unwrap_or(0);
                    aff.iter().map(|p| p.homogenize_to(s, q)).collect::<Result<Vec<_>>>()?
                } else {
                    j.a.iter().map(|s| parse_bi(s, field, n)).collect::<Result<Vec<_>>>()?
                };
                MapSpec::pullback([ap0, ap1], a, None)?
            }
            other => return Err(Error::InvalidInput(format!("unknown map kind '{other}'"))),
        };
        if spec.n != n {
            return Err(Error::ArityMismatch { expected: n, found: spec.n });
        }
        let mut spec = spec;
        if let Some(g) = &j.growth {
            let pick = |v: &Option<serde_json::Value>, d: &BigRational| -> Result<BigRational> {
                v.as_ref().map_or(Ok(d.clone()), rational_from_json)
            };
            let s = spec.growth.clone();
            spec.growth = GrowthConstants {
                mu: pick(&g.mu, &s.mu)?,
                nu0: pick(&g.nu0, &s.nu0)?,
                nu1: pick(&g.nu1, &s.nu1)?,
                lambda: pick(&g.lambda, &s.lambda)?,
                k_lambda: g.k_lambda.unwrap_or(s.k_lambda),
            };
            let c = &spec.growth;
            if c.mu <= BigRational::zero()
                || c.nu0 <= BigRational::zero()
                || c.nu1 < BigRational::zero()
                || c.lambda <= BigRational::zero()
            {
                return Err(Error::InvalidInput("growth constants out of range".into()));
            }
        }
        Ok(spec)
    }

    /// `(r, s, q)`: degree of `A'` and common bidegree of the `A_j`.
    fn pullback_degrees(&self) -> Result<(u32, u32, u32)> {
        let MapKind::MahlerPullback { a_prime, a } = &self.kind else {
            return Err(Error::InvalidInput("not a pullback".into()));
        };
        let mut r = None;
        for p in a_prime {
            if p.is_zero() {
                continue;
            }
            match p.bidegree() {
                Some((d, 0)) if r.is_none() || r == Some(d) => r = Some(d),
                _ => {
                    return Err(Error::InvalidInput(
                        "A0', A1' must be homogeneous of one degree in X0', X1'".into(),
                    ))
                }
            }
        }
        let mut sq = None;
        for p in a {
            if p.is_zero() {
                continue;
            }
            match p.bidegree() {
                Some(d) if sq.is_none() || sq == Some(d) => sq = Some(d),
                _ => {
                    return Err(Error::InvalidInput(
                        "A0..An must be bi-homogeneous of one bidegree".into(),
                    ))
                }
            }
        }
        let (s, q) = sq.unwrap_or((0, 0));
        Ok((r.unwrap_or(0), s, q))
    }

    /// `(σ, κ)` bounding `D(Q)` by bidegree `(a + σ, b + κ)`.
    fn derivation_degrees(&self) -> (u32, u32) {
        let MapKind::Derivation { h } = &self.kind else { return (0, 0) };
        let mut sigma = h[0].deg_x_prime().saturating_sub(1);
        let mut kappa = h[0].deg_x();
        for hi in &h[1..] {
            sigma = sigma.max(hi.deg_x_prime());
            kappa = kappa.max(hi.deg_x().saturating_sub(1));
        }
        (sigma, kappa)
    }

    /// Constants read off the map. Pullback: `(μ, ν0, ν1) = (q, r, s)` and `λ = ord p`.
    /// Derivation: `(1 + κ, 1, σ)`, valid for `deg_X Q ≥ 1`, and `λ = 1/2` with `K_λ = 2`.
    pub fn structural_constants(&self) -> GrowthConstants {
        match &self.kind {
            MapKind::MahlerPullback { a_prime, .. } => {
                let (r, s, q) = self.pullback_degrees().unwrap_or((0, 0, 0));
                let ord_at = |p: &BiPolynomial| p.dehomogenize().terms().map(|(e, _)| e[0]).min();
                let delta = match (ord_at(&a_prime[0]), ord_at(&a_prime[1])) {
                    (Some(o0), Some(o1)) if o1 > o0 => (o1 - o0) as i64,
                    _ => 1,
                };
                GrowthConstants {
                    mu: rat(q as i64),
                    nu0: rat(r as i64),
                    nu1: rat(s as i64),
                    lambda: rat(delta),
                    k_lambda: 0,
                }
            }
            MapKind::Derivation { .. } => {
                let (sigma, kappa) = self.derivation_degrees();
                GrowthConstants {
                    mu: rat(1 + kappa as i64),
                    nu0: rat(1),
                    nu1: rat(sigma as i64),
                    lambda: BigRational::new(1.into(), 2.into()),
                    k_lambda: 2,
                }
            }
        }
    }

    /// Domain on which [`MapSpec::structural_constants`] bound the degrees.
    pub fn validity_domain(&self) -> &'static str {
        match self.kind {
            MapKind::MahlerPullback { .. } => "all bi-homogeneous Q",
            MapKind::Derivation { .. } => "bi-homogeneous Q with deg_X Q >= 1",
        }
    }

    pub fn is_derivation(&self) -> bool {
        matches!(self.kind, MapKind::Derivation { .. })
    }

    /// One application of `φ`.
    pub fn apply(&self, q: &BiPolynomial) -> Result<BiPolynomial> {
        if q.n() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: q.n() });
        }
        self.field.ensure_same(&q.field())?;
        match &self.kind {
            MapKind::Derivation { h } => {
                let mut out = h[0].mul(&q.derivative(1))?;
                for (i, hi) in h.iter().enumerate().skip(1) {
                    out = out.add(&hi.mul(&q.derivative(i + 2))?)?;
                }
                Ok(out)
            }
            MapKind::MahlerPullback { a_prime, a } => {
                let mut images = vec![a_prime[0].clone(), a_prime[1].clone()];
                images.extend(a.iter().cloned());
                q.substitute(&images)
            }
        }
    }
}

/// `φ^N(Q)`.
pub fn apply_map(phi: &MapSpec, q: &BiPolynomial, iterations: usize) -> Result<BiPolynomial> {
    if !q.is_bihomogeneous() {
        return Err(Error::NotBiHomogeneous);
    }
    let mut cur = q.clone();
    for _ in 0..iterations {
        cur = phi.apply(&cur)?;
    }
    Ok(cur)
}

/// `A0·∂P/∂z + Σ A_i·∂P/∂X_i` on `k[z][X1..Xn]`.
pub fn affine_derivation(a: &[AffinePolynomial], p: &AffinePolynomial) -> Result<AffinePolynomial> {
    if a.len() != p.n() + 1 {
        return Err(Error::ArityMismatch { expected: p.n() + 1, found: a.len() });
    }
    let mut out = a[0].mul(&p.d_z())?;
    for i in 1..a.len() {
        out = out.add(&a[i].mul(&p.d_x(i))?)?;
    }
    Ok(out)
}

/// Outcome of comparing `D(ʰP)` with `ʰ(D P)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogenizationCheck {
    /// `D(ʰP) = X0'^{e'}·X0^{e}·ʰ(D P)` for the exponents below.
    pub holds: bool,
    /// Exponents `(e', e)` of the monomial factor `X0'^{e'}·X0^{e}`.
    pub factor: (u32, u32),
    /// Dehomogenizing `D(ʰP)` gives back `D P` exactly.
    pub dehomogenizes: bool,
}

/// Compares the homogenized derivation with homogenization of the affine derivation.
pub fn check_homogenized_derivation(
    a: &[AffinePolynomial],
    p: &AffinePolynomial,
) -> Result<HomogenizationCheck> {
    let d = MapSpec::from_differential(a)?;
    let (sigma, kappa) = derivation_shift(a);
    let hp = p.bihomogenize();
    let lhs = d.apply(&hp)?;
    let dp = affine_derivation(a, p)?;
    let dehomogenizes = lhs.dehomogenize() == dp;
    if dp.is_zero() {
        return Ok(HomogenizationCheck { holds: lhs.is_zero(), factor: (0, 0), dehomogenizes });
    }
    let e1 = (p.deg_z() + sigma).checked_sub(dp.deg_z());
    let e0 = (p.deg_x() + kappa).checked_sub(dp.deg_x());
    let (Some(e1), Some(e0)) = (e1, e0) else {
        return Ok(HomogenizationCheck { holds: false, factor: (0, 0), dehomogenizes });
    };
    let field = p.field();
    let n = p.n();
    let monomial = BiPolynomial::x_prime(field, n, 0)
        .pow(e1)
        .mul(&BiPolynomial::x(field, n, 0).pow(e0))?;
    let rhs = monomial.mul(&dp.bihomogenize())?;
    Ok(HomogenizationCheck { holds: lhs == rhs, factor: (e1, e0), dehomogenizes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstantsOut {
    pub mu: String,
    pub nu0: String,
    pub nu1: String,
    pub lambda: String,
    pub k_lambda: u64,
}

impl From<&GrowthConstants> for ConstantsOut {
    fn from(g: &GrowthConstants) -> Self {
        ConstantsOut {
            mu: g.mu.to_string(),
            nu0: g.nu0.to_string(),
            nu1: g.nu1.to_string(),
            lambda: g.lambda.to_string(),
            k_lambda: g.k_lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    pub sample: usize,
    pub iteration: usize,
    pub q: String,
    pub deg_x: u32,
    pub bound_x: String,
    pub deg_x_prime: u32,
    pub bound_x_prime: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaViolation {
    pub sample: usize,
    pub q: String,
    pub ord_q: usize,
    pub ord_phi_q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub kind: String,
    pub structural: ConstantsOut,
    pub declared: ConstantsOut,
    pub validity: String,
    pub samples: usize,
    pub max_iterations: usize,
    pub degree_checks: usize,
    pub degree_violations: Vec<DegreeViolation>,
    /// Samples with finite `ord Q(f) ≥ max(K_λ, 1)` and finite `ord φ(Q)(f)`.
    pub lambda_certified: usize,
    /// Samples skipped because one of the two orders is only a lower bound.
    pub lambda_excluded_at_least: usize,
    /// Samples skipped because `ord Q(f) < max(K_λ, 1)`.
    pub lambda_below_threshold: usize,
    pub empirical_lambda: Option<String>,
    pub lambda_flagged: bool,
    pub lambda_violations: Vec<LambdaViolation>,
}

fn random_bihomogeneous(
    rng: &mut ChaCha8Rng,
    field: Field,
    n: usize,
    a: u32,
    b: u32,
) -> Result<BiPolynomial> {
    let monos = bi_monomials(n, a, b);
    let count = rng.gen_range(1..=monos.len().min(4));
    let terms = monos
        .choose_multiple(rng, count)
        .map(|e| {
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-3..=3);
            }
            (e.clone(), Scalar::from_i64(field, c))
        })
        .collect::<Vec<_>>();
    BiPolynomial::from_terms(field, n, terms)
}

fn pow_rat(x: &BigRational, k: usize) -> BigRational {
    Pow::pow(x, k as u32)
}

/// Degree-law and order-growth measurements on seeded random samples.
///
/// Half of the samples are high-vanishing polynomials (random kernel vectors of truncated
/// evaluation matrices) so that the order comparison sees nontrivial orders.
pub fn growth_report(
    phi: &MapSpec,
    f: &FunctionalPoint,
    samples: usize,
    max_n: usize,
    seed: u64,
) -> Result<GrowthReport> {
    if f.n() != phi.n {
        return Err(Error::ArityMismatch { expected: phi.n, found: f.n() });
    }
    phi.field.ensure_same(&f.field())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = &phi.growth;
    let min_b = u32::from(phi.is_derivation());
    let mut report = GrowthReport {
        kind: if phi.is_derivation() { "derivation" } else { "mahler" }.into(),
        structural: (&phi.structural_constants()).into(),
        declared: g.into(),
        validity: phi.validity_domain().into(),
        samples,
        max_iterations: max_n,
        degree_checks: 0,
        degree_violations: Vec::new(),
        lambda_certified: 0,
        lambda_excluded_at_least: 0,
        lambda_below_threshold: 0,
        empirical_lambda: None,
        lambda_flagged: false,
        lambda_violations: Vec::new(),
    };
    let mut best: Option<BigRational> = None;
    let threshold = g.k_lambda.max(1) as usize;

    for sample in 0..samples {
        let a = rng.gen_range(0..=2u32);
        let b = rng.gen_range(min_b..=2u32.max(min_b));
        let q = if sample % 2 == 1 {
            match crate::estimates::random_vanishing_poly(f, a, b, &mut rng)? {
                Some(q) => q,
                None => random_bihomogeneous(&mut rng, phi.field, phi.n, a, b)?,
            }
        } else {
            random_bihomogeneous(&mut rng, phi.field, phi.n, a, b)?
        };
        let (dxp, dx) = (BigRational::from_integer(q.deg_x_prime().into()), q.deg_x());
        let dx_r = BigRational::from_integer(BigInt::from(dx));

        let mut cur = q.clone();
        for it in 1..=max_n {
            cur = phi.apply(&cur)?;
            if cur.is_zero() {
                break;
            }
            report.degree_checks += 1;
            let bound_x = pow_rat(&g.mu, it) * &dx_r;
            let mut geom = BigRational::zero();
            for i in 0..it {
                geom += pow_rat(&g.nu0, it - i - 1) * pow_rat(&g.mu, i);
            }
            let bound_xp = pow_rat(&g.nu0, it) * &dxp + &g.nu1 * geom * &dx_r;
            let ok_x = BigRational::from_integer(cur.deg_x().into()) <= bound_x;
            let ok_xp = BigRational::from_integer(cur.deg_x_prime().into()) <= bound_xp;
            if !(ok_x && ok_xp) {
                report.degree_violations.push(DegreeViolation {
                    sample,
                    iteration: it,
                    q: q.to_string(),
                    deg_x: cur.deg_x(),
                    bound_x: bound_x.to_string(),
                    deg_x_prime: cur.deg_x_prime(),
                    bound_x_prime: bound_xp.to_string(),
                });
            }
        }

        let ord_q = evaluate_bi(&q, f)?.ord();
        let ord_phi = evaluate_bi(&phi.apply(&q)?, f)?.ord();
        match (ord_q, ord_phi) {
            (OrdValue::Finite(k), _) if k < threshold => report.lambda_below_threshold += 1,
            (OrdValue::Finite(k), OrdValue::Finite(m)) => {
                report.lambda_certified += 1;
                let ratio = BigRational::new(m.into(), k.into());
                if ratio < g.lambda {
                    report.lambda_violations.push(LambdaViolation {
                        sample,
                        q: q.to_string(),
                        ord_q: k,
                        ord_phi_q: m,
                    });
                }
                if best.as_ref().map_or(true, |b| &ratio < b) {
                    best = Some(ratio);
                }
            }
            _ => report.lambda_excluded_at_least += 1,
        }
    }
    if report.lambda_certified == 0 && report.lambda_excluded_at_least > 0 {
        return Err(Error::PrecisionExhausted(format!(
            "no certified order ratio among {samples} samples"
        )));
    }
    report.lambda_flagged = !report.lambda_violations.is_empty();
    report.empirical_lambda = best.map(|b| b.to_string());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biring::parse_affine;
    use crate::funceq::{FunctionalSystem, SystemDescriptor};

    const Q: Field = Field::Rational;

    fn cantor_system() -> MahlerSystem {
        let d = SystemDescriptor {
            kind: "mahler".into(),
            n: 1,
            p: Some("z^2".into()),
            p_den: None,
            a: vec!["1".into(), "X1 - z".into()],
            seed: vec!["0".into()],
            char: 0,
            t_f: Some(1),
        };
        match FunctionalSystem::from_descriptor(&d).unwrap() {
            FunctionalSystem::Mahler(s) => s,
            _ => unreachable!(),
        }
    }

    fn bi(s: &str, n: usize) -> BiPolynomial {
        parse_bi(s, Q, n).unwrap()
    }

    #[test]
    fn cantor_pullback_images() {
        let phi = MapSpec::from_mahler_system(&cantor_system()).unwrap();
        assert_eq!(phi.apply(&bi("X1", 1)).unwrap(), bi("X1*X0' - X1'*X0", 1));
        assert_eq!(phi.apply(&bi("X0", 1)).unwrap(), bi("X0*X0'", 1));
        assert_eq!(phi.apply(&bi("X1'", 1)).unwrap(), bi("X1'^2", 1));
        let c = phi.structural_constants();
        assert_eq!((c.mu, c.nu0, c.nu1, c.lambda), (rat(1), rat(2), rat(1), rat(2)));
    }

    #[test]
    fn literal_derivation_example() {
        let d = MapSpec::derivation(vec![bi("1", 1), bi("X1", 1)], None).unwrap();
        assert_eq!(d.apply(&bi("X1", 1)).unwrap(), bi("X1", 1));
        assert_eq!(d.apply(&bi("X1'", 1)).unwrap(), bi("1", 1));
    }

    #[test]
    fn homogenized_exp_derivation() {
        let a = vec![parse_affine("1", Q, 1).unwrap(), parse_affine("X1", Q, 1).unwrap()];
        let d = MapSpec::from_differential(&a).unwrap();
        assert_eq!(d.apply(&bi("X1'", 1)).unwrap(), bi("X0'", 1));
        assert_eq!(d.apply(&bi("X1", 1)).unwrap(), bi("X1", 1));
        let c = d.structural_constants();
        assert_eq!((c.mu, c.nu0, c.nu1), (rat(1), rat(1), rat(0)));
        let p = parse_affine("z^2*X1 + 3*X1^2 - z", Q, 1).unwrap();
        let chk = check_homogenized_derivation(&a, &p).unwrap();
        assert!(chk.holds && chk.dehomogenizes);
    }

    #[test]
    fn identity_pullback() {
        let phi = MapSpec::pullback(
            [bi("X0'", 1), bi("X1'", 1)],
            vec![bi("X0", 1), bi("X1", 1)],
            None,
        )
        .unwrap();
        let q = bi("X1'*X1^2 - 2*X0'*X0*X1", 1);
        assert_eq!(apply_map(&phi, &q, 3).unwrap(), q);
        let c = phi.structural_constants();
        assert_eq!((c.mu, c.nu0, c.nu1, c.lambda), (rat(1), rat(1), rat(0), rat(1)));
    }

    #[test]
    fn cantor_growth_report() {
        let sys = cantor_system();
        let phi = MapSpec::from_mahler_system(&sys).unwrap();
        let f = crate::funceq::solve_mahler(&sys, 64).unwrap();
        let r = growth_report(&phi, &f, 30, 3, 7).unwrap();
        assert!(r.degree_violations.is_empty());
        assert!(r.lambda_violations.is_empty());
        assert!(r.lambda_certified > 0);
        let again = growth_report(&phi, &f, 30, 3, 7).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn json_spec() {
        let j: MapSpecJson = serde_json::from_str(
            r#"{"kind":"mahler","n":1,"Aprime":["X0'^2","X1'^2"],"A":["X0*X0'","X1*X0' - X1'*X0"],
                "growth":{"mu":1,"nu0":2,"nu1":1,"lambda":"2","Klambda":0}}"#,
        )
        .unwrap();
        let phi = MapSpec::from_json(&j).unwrap();
        assert_eq!(phi, MapSpec::from_mahler_system(&cantor_system()).unwrap());
        let j: MapSpecJson =
            serde_json::from_str(r#"{"kind":"derivation","n":1,"A":["1","X1"]}"#).unwrap();
        assert!(MapSpec::from_json(&j).unwrap().is_derivation());
    }
}
