//! Truncated formal power series over an exact field.
//!
//! A [`TruncatedSeries`] of precision `N` is known modulo `z^N`. The order of vanishing
//! at the origin is three-valued ([`OrdValue`]): truncation cannot tell `ord ≥ N` from
//! the zero series, so every consumer has to branch on [`OrdValue::AtLeast`].
//!
//! Precision rules:
//! - `add`, `sub`, `mul`: minimum of the operand precisions;
//! - `compose(a, g)`: `min(N_a · ord g, N_g)`;
//! - `derivative`: `N − 1`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{Field, Scalar};

/// Order of vanishing at `z = 0` of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrdValue {
    /// Coefficient `k` is nonzero and all lower ones vanish.
    Finite(usize),
    /// All known coefficients (below `N`) vanish.
    AtLeast(usize),
}

impl OrdValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, OrdValue::Finite(_))
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            OrdValue::Finite(k) => Some(*k),
            OrdValue::AtLeast(_) => None,
        }
    }

    /// The certified lower bound on the true order.
    pub fn lower_bound(&self) -> usize {
        match self {
            OrdValue::Finite(k) | OrdValue::AtLeast(k) => *k,
        }
    }

    /// Exact minimum of two orders (sound for three-valued inputs).
    pub fn min(self, other: OrdValue) -> OrdValue {
        use OrdValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (Finite(a), AtLeast(n)) | (AtLeast(n), Finite(a)) => {
                if a < n {
                    Finite(a)
                } else {
                    AtLeast(n)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }

    /// Order of a product.
    pub fn add(self, other: OrdValue) -> OrdValue {
        use OrdValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (a, b) => AtLeast(a.lower_bound() + b.lower_bound()),
        }
    }

    /// Subtracts a known finite amount (used for normalizing distances).
    pub fn minus(self, k: usize) -> OrdValue {
        match self {
            OrdValue::Finite(v) => OrdValue::Finite(v.saturating_sub(k)),
            OrdValue::AtLeast(v) => OrdValue::AtLeast(v.saturating_sub(k)),
        }
    }

    /// Ordering for the maximum over a family; `AtLeast(n)` dominates `Finite(k)` when `n > k`.
    pub fn cmp_lower(&self, other: &OrdValue) -> Ordering {
        self.lower_bound()
            .cmp(&other.lower_bound())
            .then_with(|| self.is_finite().cmp(&other.is_finite()).reverse())
    }
}

impl fmt::Display for OrdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdValue::Finite(k) => write!(f, "Finite({k})"),
            OrdValue::AtLeast(n) => write!(f, "AtLeast({n})"),
        }
    }
}

/// Power series known modulo `z^N`, `N = coeffs.len() ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl TruncatedSeries {
    pub fn new(field: Field, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series precision must be at least 1".into()));
        }
        for c in &coeffs {
            field.ensure_same(&c.field())?;
        }
        Ok(TruncatedSeries { field, coeffs })
    }

    pub fn from_i64(field: Field, coeffs: &[i64]) -> Result<Self> {
        TruncatedSeries::new(field, coeffs.iter().map(|&c| Scalar::from_i64(field, c)).collect())
    }

    pub fn zero(field: Field, precision: usize) -> Self {
        TruncatedSeries { field, coeffs: vec![Scalar::zero(field); precision.max(1)] }
    }

    pub fn constant(c: Scalar, precision: usize) -> Self {
        let field = c.field();
        let mut s = TruncatedSeries::zero(field, precision);
        s.coeffs[0] = c;
        s
    }

    /// `z^k` modulo `z^precision`.
    pub fn monomial(field: Field, k: usize, precision: usize) -> Self {
        let mut s = TruncatedSeries::zero(field, precision);
        if k < s.coeffs.len() {
            s.coeffs[k] = Scalar::one(field);
        }
        s
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Scalar {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: Scalar) -> Result<()> {
        self.field.ensure_same(&c.field())?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn truncate(&self, precision: usize) -> Self {
        let n = precision.clamp(1, self.precision());
        TruncatedSeries { field: self.field, coeffs: self.coeffs[..n].to_vec() }
    }

    /// Extends with zero coefficients; only valid for series known to be polynomials.
    pub fn pad_polynomial(&self, precision: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(precision.max(coeffs.len()), Scalar::zero(self.field));
        TruncatedSeries { field: self.field, coeffs }
    }

    pub fn ord(&self) -> OrdValue {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => OrdValue::Finite(k),
            None => OrdValue::AtLeast(self.precision()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.field.ensure_same(&other.field)?;
        let n = self.precision().min(other.precision());
        let coeffs = (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect();
        Ok(TruncatedSeries { field: self.field, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.field.ensure_same(&other.field)?;
        let n = self.precision().min(other.precision());
        let coeffs = (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect();
        Ok(TruncatedSeries { field: self.field, coeffs })
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { field: self.field, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        self.field.ensure_same(&c.field())?;
        Ok(TruncatedSeries { field: self.field, coeffs: self.coeffs.iter().map(|x| x * c).collect() })
    }

    /// Product truncated to the smaller precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.field.ensure_same(&other.field)?;
        let n = self.precision().min(other.precision());
        let mut out = vec![Scalar::zero(self.field); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Ok(TruncatedSeries { field: self.field, coeffs: out })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = TruncatedSeries::constant(Scalar::one(self.field), self.precision());
        for _ in 0..k {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Multiplication by `z^k`, keeping the precision (the top `k` coefficients drop out).
    pub fn shift(&self, k: usize) -> Self {
        let n = self.precision();
        let mut coeffs = vec![Scalar::zero(self.field); n];
        for i in 0..n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i].clone();
        }
        TruncatedSeries { field: self.field, coeffs }
    }

    /// Formal derivative, precision `N − 1` (at least 1).
    pub fn derivative(&self) -> Self {
        if self.precision() == 1 {
            return TruncatedSeries::zero(self.field, 1);
        }
        let coeffs = (1..self.precision()).map(|i| self.coeffs[i].scale(i as i64)).collect();
        TruncatedSeries { field: self.field, coeffs }
    }

    /// `self ∘ g`, guaranteed modulo `z^{min(N_self·ord g, N_g)}`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.field.ensure_same(&g.field)?;
        let inner_ord = match g.ord() {
            OrdValue::Finite(0) => return Err(Error::InnerNotPositiveValuation),
            OrdValue::Finite(k) => k,
            OrdValue::AtLeast(n) => n,
        };
        let target = (self.precision() * inner_ord).min(g.precision());
        let g = g.truncate(target);
        // only a_k with k·ord(g) < target contribute
        let last = (self.precision() - 1).min((target - 1) / inner_ord);
        let mut acc = TruncatedSeries::constant(self.coeffs[last].clone(), target);
        for k in (0..last).rev() {
            acc = acc.mul(&g)?;
            acc.coeffs[0] = &acc.coeffs[0] + &self.coeffs[k];
        }
        Ok(acc)
    }

    /// JSON rendering: `{"coeffs": ["1", "3/2", ...], "precision": N}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "precision": self.precision(),
        })
    }

    pub fn from_json(v: &serde_json::Value, field: Field) -> Result<Self> {
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::InvalidInput("series JSON needs a \"coeffs\" array".into()))?;
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let s = c.as_str().ok_or_else(|| Error::InvalidInput("coefficients are strings".into()))?;
            out.push(Scalar::parse(s, field)?);
        }
        let s = TruncatedSeries::new(field, out)?;
        if let Some(p) = v.get("precision").and_then(|p| p.as_u64()) {
            if p as usize != s.precision() {
                return Err(Error::InvalidInput(format!(
                    "precision field {p} disagrees with {} coefficients",
                    s.precision()
                )));
            }
        }
        Ok(s)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{i}")?,
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(z^{})", self.precision())
    }
}

/// `mul_series(a, b)`.
pub fn mul_series(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.mul(b)
}

/// `compose_series(a, g)` = `a ∘ g`.
pub fn compose_series(a: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.compose(g)
}

pub fn ord_series(a: &TruncatedSeries) -> OrdValue {
    a.ord()
}
