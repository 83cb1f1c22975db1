use serde::{Deserialize, Serialize};

use super::poly::{AffinePolynomial, BiPolynomial};
use crate::error::{Error, Result};
use crate::exactalg::{Field, Scalar};
use crate::series::TruncatedSeries;

/// The point `(1, z, 1, f1(z), …, fn(z))` with series known modulo `z^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalPoint {
    series: Vec<TruncatedSeries>,
    field: Field,
    precision: usize,
    /// Declared transcendence degree, if known.
    pub t_f: Option<usize>,
}

/// Serialized form: `{"field": 0|p, "series": [[..coefficients..], ..], "t_f": k|null}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalPointJson {
    pub field: u64,
    pub series: Vec<Vec<String>>,
    #[serde(default)]
    pub t_f: Option<usize>,
}

impl FunctionalPoint {
    /// All series are truncated to the smallest precision among them.
    pub fn new(field: Field, series: Vec<TruncatedSeries>, t_f: Option<usize>) -> Result<Self> {
        for s in &series {
            field.ensure_same(&s.field())?;
        }
        let precision = series.iter().map(|s| s.precision()).min().unwrap_or(usize::MAX);
        let series = series.into_iter().map(|s| s.truncate(precision)).collect();
        Ok(FunctionalPoint { series, field, precision, t_f })
    }

    pub fn n(&self) -> usize {
        self.series.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Common precision `N`; `usize::MAX` when `n = 0`.
    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn series(&self) -> &[TruncatedSeries] {
        &self.series
    }

    pub fn truncate(&self, precision: usize) -> Self {
        FunctionalPoint {
            series: self.series.iter().map(|s| s.truncate(precision)).collect(),
            field: self.field,
            precision: precision.min(self.precision),
            t_f: self.t_f,
        }
    }

    /// Precision used for evaluation: the common precision, or `fallback` when `n = 0`.
    pub fn working_precision(&self, fallback: usize) -> usize {
        if self.series.is_empty() {
            fallback
        } else {
            self.precision
        }
    }

    /// `f_i^k` for `k = 0..=max_power`, per coordinate.
    pub fn power_table(&self, max_power: u32) -> Vec<Vec<TruncatedSeries>> {
        let n = self.working_precision(1);
        self.series
            .iter()
            .map(|f| {
                let mut row = vec![TruncatedSeries::constant(Scalar::one(self.field), n)];
                for k in 1..=max_power as usize {
                    let next = row[k - 1].mul(f).expect("same field");
                    row.push(next);
                }
                row
            })
            .collect()
    }

    pub fn to_json(&self) -> FunctionalPointJson {
        FunctionalPointJson {
            field: self.field.characteristic(),
            series: self
                .series
                .iter()
                .map(|s| s.coeffs().iter().map(|c| coeff_string(c)).collect())
                .collect(),
            t_f: self.t_f,
        }
    }

    pub fn from_json(j: &FunctionalPointJson) -> Result<Self> {
        let field = Field::from_characteristic(j.field)?;
        let series = j
            .series
            .iter()
            .map(|cs| {
                let coeffs = cs.iter().map(|c| Scalar::parse(c, field)).collect::<Result<Vec<_>>>()?;
                TruncatedSeries::new(field, coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionalPoint::new(field, series, j.t_f)
    }
}

fn coeff_string(c: &Scalar) -> String {
    match c {
        Scalar::Mod { value, .. } => value.to_string(),
        Scalar::Rat(_) => c.to_string(),
    }
}

/// `P(1, z, 1, f1, …, fn)` modulo `z^N`.
pub fn evaluate_affine(p: &AffinePolynomial, f: &FunctionalPoint) -> Result<TruncatedSeries> {
    if p.n() != f.n() {
        return Err(Error::ArityMismatch { expected: f.n(), found: p.n() });
    }
    p.field().ensure_same(&f.field())?;
    let n = f.working_precision(p.deg_z() as usize + 1);
    let table = f.power_table(p.deg_x());
    let mut acc = TruncatedSeries::zero(f.field(), n);
    for (e, c) in p.terms() {
        if e[0] as usize >= n {
            continue;
        }
        let mut t = TruncatedSeries::constant(c.clone(), n);
        for (j, &k) in e[1..].iter().enumerate() {
            if k > 0 {
                t = t.mul(&table[j][k as usize])?;
            }
        }
        acc = acc.add(&t.shift(e[0] as usize))?;
    }
    Ok(acc)
}

/// Evaluates a bi-homogeneous polynomial through its dehomogenization.
pub fn evaluate_bi(p: &BiPolynomial, f: &FunctionalPoint) -> Result<TruncatedSeries> {
    evaluate_affine(&p.dehomogenize(), f)
}
