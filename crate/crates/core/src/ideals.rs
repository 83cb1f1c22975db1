//! Bi-homogeneous ideals of `𝒜` handled one graded slice at a time: the `(a, b)` piece of
//! `⟨g_1, …, g_k⟩` is the span of the products `m·g_j` over monomials `m` of complementary
//! bidegree, so membership, stability and the vanishing-ideal slice reduce to linear algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::biring::{bi_monomials, parse_bi, BiPolynomial, Exponents, FunctionalPoint};
use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use crate::estimates::{default_window, EvaluationTable, RankTrace};
use crate::exactalg::{ExactMatrix, Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedIdeal {
    n: usize,
    field: Field,
    generators: Vec<BiPolynomial>,
}

/// `{"n": 1, "char": 0, "generators": ["X1'", ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealJson {
    pub n: usize,
    #[serde(default)]
    pub char: u64,
    pub generators: Vec<String>,
}

impl GeneratedIdeal {
    pub fn new(generators: Vec<BiPolynomial>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidInput("an ideal needs at least one generator".into()))?;
        let (n, field) = (first.n(), first.field());
        for g in &generators {
            if g.n() != n {
                return Err(Error::ArityMismatch { expected: n, found: g.n() });
            }
            field.ensure_same(&g.field())?;
            if g.is_zero() {
                return Err(Error::InvalidInput("zero generator".into()));
            }
            if g.bidegree().is_none() {
                return Err(Error::NotBiHomogeneous);
            }
        }
        Ok(GeneratedIdeal { n, field, generators })
    }

    pub fn from_json(j: &IdealJson) -> Result<Self> {
        let field = Field::from_characteristic(j.char)?;
        let gens = j
            .generators
            .iter()
            .map(|s| parse_bi(s, field, j.n))
            .collect::<Result<Vec<_>>>()?;
        GeneratedIdeal::new(gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn generators(&self) -> &[BiPolynomial] {
        &self.generators
    }

    /// Spanning products `(generator index, monomial multiplier, product)` of the `(a, b)` slice.
    fn slice_products(&self, a: u32, b: u32) -> Result<Vec<(usize, Exponents, BiPolynomial)>> {
        let mut out = Vec::new();
        for (j, g) in self.generators.iter().enumerate() {
            let (ga, gb) = g.bidegree().expect("checked at construction");
            if ga > a || gb > b {
                continue;
            }
            for m in bi_monomials(self.n, a - ga, b - gb) {
                let mono = BiPolynomial::from_terms(self.field, self.n, [(m.clone(), Scalar::one(self.field))])?;
                out.push((j, m, mono.mul(g)?));
            }
        }
        Ok(out)
    }
}

/// `P = Σ_j multipliers[j]·g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub multipliers: Vec<BiPolynomial>,
}

impl Membership {
    /// `Σ multipliers[j]·g_j`.
    pub fn recombine(&self, ideal: &GeneratedIdeal) -> Result<BiPolynomial> {
        let mut acc = BiPolynomial::zero(ideal.field, ideal.n);
        for (m, g) in self.multipliers.iter().zip(&ideal.generators) {
            acc = acc.add(&m.mul(g)?)?;
        }
        Ok(acc)
    }
}

fn coordinates(rows: &BTreeMap<Exponents, usize>, p: &BiPolynomial, field: Field) -> Option<Vec<Scalar>> {
    let mut v = vec![Scalar::zero(field); rows.len()];
    for (e, c) in p.terms() {
        v[*rows.get(e)?] = c.clone();
    }
    Some(v)
}

/// Exact membership of a bi-homogeneous `P` in the ideal, with multipliers on success.
pub fn slice_membership(ideal: &GeneratedIdeal, p: &BiPolynomial) -> Result<Membership> {
    if p.n() != ideal.n {
        return Err(Error::ArityMismatch { expected: ideal.n, found: p.n() });
    }
    ideal.field.ensure_same(&p.field())?;
    let zero_multipliers = || vec![BiPolynomial::zero(ideal.field, ideal.n); ideal.generators.len()];
    if p.is_zero() {
        return Ok(Membership { member: true, multipliers: zero_multipliers() });
    }
    let (a, b) = p.bidegree().ok_or(Error::NotBiHomogeneous)?;
    let monos = bi_monomials(ideal.n, a, b);
    let rows: BTreeMap<Exponents, usize> = monos.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let products = ideal.slice_products(a, b)?;
    let target = coordinates(&rows, p, ideal.field).expect("P has bidegree (a, b)");
    if products.is_empty() {
        return Ok(Membership { member: false, multipliers: Vec::new() });
    }
    let mut entries = vec![Scalar::zero(ideal.field); monos.len() * products.len()];
    for (col, (_, _, prod)) in products.iter().enumerate() {
        for (e, c) in prod.terms() {
            entries[rows[e] * products.len() + col] = c.clone();
        }
    }
    let m = ExactMatrix::new(ideal.field, monos.len(), products.len(), entries)?;
    match m.solve(&target)? {
        None => Ok(Membership { member: false, multipliers: Vec::new() }),
        Some(x) => {
            let mut terms: Vec<Vec<(Exponents, Scalar)>> = vec![Vec::new(); ideal.generators.len()];
            for ((j, mono, _), c) in products.iter().zip(x) {
                if !c.is_zero() {
                    terms[*j].push((mono.clone(), c));
                }
            }
            let multipliers = terms
                .into_iter()
                .map(|t| BiPolynomial::from_terms(ideal.field, ideal.n, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(Membership { member: true, multipliers })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityWitness {
    pub generator_index: usize,
    pub generator: String,
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// `φ(g_j)` for every generator.
    pub images: Vec<String>,
    pub witness: Option<StabilityWitness>,
    pub note: String,
}

/// `φ(I) ⊆ I`, checked on generators: `φ(g)` must lie in `I` for every `g`.
///
/// This suffices for derivations (Leibniz rule) and for substitution pullbacks
/// (multiplicativity), the two kinds of [`MapSpec`].
pub fn is_phi_stable(ideal: &GeneratedIdeal, phi: &MapSpec) -> Result<StabilityReport> {
    if phi.n != ideal.n {
        return Err(Error::ArityMismatch { expected: ideal.n, found: phi.n });
    }
    let mut images = Vec::new();
    let mut witness = None;
    for (j, g) in ideal.generators.iter().enumerate() {
        let img = phi.apply(g)?;
        images.push(img.to_string());
        if witness.is_some() {
            continue;
        }
        let member = if img.is_bihomogeneous() {
            slice_membership(ideal, &img)?.member
        } else {
            false
        };
        if !member {
            witness = Some(StabilityWitness {
                generator_index: j,
                generator: g.to_string(),
                image: img.to_string(),
            });
        }
    }
    Ok(StabilityReport {
        stable: witness.is_none(),
        images,
        witness,
        note: "generator check is exact for derivations (Leibniz rule) and substitution pullbacks \
               (multiplicativity)"
            .into(),
    })
}

/// Basis of the observed degree-`(a, b)` slice of the vanishing ideal of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceBasis {
    pub bidegree: (u32, u32),
    pub basis: Vec<BiPolynomial>,
    pub precision: usize,
    pub window: usize,
    /// The kernel did not change over the trailing `window` rows.
    pub stabilized: bool,
}

/// Kernel of the evaluation matrix at bidegree `(a, b)`; reports the stabilization flag.
pub fn pf_slice_with_flag(
    f: &FunctionalPoint,
    a: u32,
    b: u32,
    precision: usize,
    window: Option<usize>,
) -> Result<SliceBasis> {
    let table = EvaluationTable::new(f, a, b, precision)?;
    let n = table.precision();
    let window = window.unwrap_or_else(|| default_window(table.u()));
    let trace = RankTrace::compute(&table)?;
    let stabilized = n > window && trace.last_pivot().map_or(true, |r| r < n - window);
    let basis = table
        .matrix(n)?
        .kernel_basis()
        .iter()
        .map(|v| table.polynomial(v)?.homogenize_to(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(SliceBasis { bidegree: (a, b), basis, precision: n, window, stabilized })
}

/// As [`pf_slice_with_flag`], failing with `PrecisionExhausted` when not stabilized.
pub fn pf_slice(f: &FunctionalPoint, a: u32, b: u32, precision: usize) -> Result<SliceBasis> {
    let s = pf_slice_with_flag(f, a, b, precision, None)?;
    if !s.stabilized {
        return Err(Error::PrecisionExhausted(format!(
            "kernel at bidegree ({a},{b}) still changes within the last {} of {} rows",
            s.window, s.precision
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biring::parse_affine;
    use crate::series::TruncatedSeries;

    const Q: Field = Field::Rational;

    fn bi(s: &str) -> BiPolynomial {
        parse_bi(s, Q, 1).unwrap()
    }

    fn ideal(gens: &[&str]) -> GeneratedIdeal {
        GeneratedIdeal::new(gens.iter().map(|s| bi(s)).collect()).unwrap()
    }

    fn cantor_pullback() -> MapSpec {
        MapSpec::pullback(
            [bi("X0'^2"), bi("X1'^2")],
            vec![bi("X0*X0'"), bi("X1*X0' - X1'*X0")],
            None,
        )
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let i = ideal(&["X0 - X1"]);
        let p = bi("X1*X0 - X1^2");
        let m = slice_membership(&i, &p).unwrap();
        assert!(m.member);
        assert_eq!(m.recombine(&i).unwrap(), p);
        assert!(!slice_membership(&i, &bi("X0 + X1")).unwrap().member);

        let i = ideal(&["X1*X0' - X1'*X0"]);
        let m = slice_membership(&i, &bi("X1*X0'*X0 - X1'*X0^2")).unwrap();
        assert!(m.member);
        assert_eq!(m.multipliers[0], bi("X0"));
        assert!(matches!(slice_membership(&i, &bi("X0 + X0'")), Err(Error::NotBiHomogeneous)));
    }

    #[test]
    fn stability_examples() {
        let phi = cantor_pullback();
        assert!(is_phi_stable(&ideal(&["X1'"]), &phi).unwrap().stable);
        let r = is_phi_stable(&ideal(&["X0 - X1"]), &phi).unwrap();
        assert!(!r.stable);
        let w = r.witness.unwrap();
        assert_eq!(bi(&w.image), bi("X0'*(X0 - X1) + X1'*X0"));

        let d = MapSpec::derivation(vec![bi("1"), bi("0")], None).unwrap();
        assert!(is_phi_stable(&ideal(&["X1"]), &d).unwrap().stable);
    }

    #[test]
    fn vanishing_slices() {
        let f = FunctionalPoint::new(Q, vec![TruncatedSeries::monomial(Q, 1, 32)], None).unwrap();
        let s = pf_slice(&f, 1, 1, 32).unwrap();
        assert!(s.basis.contains(&bi("X1*X0' - X1'*X0")));

        let c: Vec<i64> = (0..32).map(|k: usize| i64::from(k.is_power_of_two())).collect();
        let cantor = TruncatedSeries::from_i64(Q, &c).unwrap();
        let f = FunctionalPoint::new(Q, vec![cantor.clone()], None).unwrap();
        let s = pf_slice(&f, 1, 1, 32).unwrap();
        assert!(s.basis.is_empty() && s.stabilized);

        let f2 = FunctionalPoint::new(Q, vec![cantor.clone(), cantor], None).unwrap();
        let s = pf_slice(&f2, 0, 1, 32).unwrap();
        let rel = parse_affine("X1 - X2", Q, 2).unwrap().homogenize_to(0, 1).unwrap();
        assert_eq!(s.basis, vec![rel]);
    }
}
