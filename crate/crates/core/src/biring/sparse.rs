use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactalg::{Field, Scalar};

pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial: exponent vector → nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct SparsePoly {
    pub field: Field,
    pub nvars: usize,
    pub terms: BTreeMap<Exponents, Scalar>,
}

impl SparsePoly {
    pub fn zero(field: Field, nvars: usize) -> Self {
        SparsePoly { field, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: Scalar, nvars: usize) -> Self {
        let mut p = SparsePoly::zero(c.field(), nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn from_terms(
        field: Field,
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, Scalar)>,
    ) -> Result<Self> {
        let mut p = SparsePoly::zero(field, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ArityMismatch { expected: nvars, found: e.len() });
            }
            field.ensure_same(&c.field())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, e: Exponents, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        self.field.ensure_same(&other.field)?;
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            field: self.field,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = SparsePoly::zero(self.field, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        self.field.ensure_same(&c.field())?;
        let mut out = SparsePoly::zero(self.field, self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = SparsePoly::constant(Scalar::one(self.field), self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("compatible");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("compatible");
            }
        }
        acc
    }

    /// ∂/∂(variable `var`).
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = SparsePoly::zero(self.field, self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c.scale(e[var] as i64));
            }
        }
        out
    }

    /// Total degree in the variable block `range`, maximized over terms.
    pub fn max_block_degree(&self, range: std::ops::Range<usize>) -> u32 {
        self.terms.keys().map(|e| e[range.clone()].iter().sum()).max().unwrap_or(0)
    }

    /// Substitutes `images[i]` for variable `i`; all images share a target ring.
    pub fn substitute(&self, images: &[SparsePoly]) -> Result<SparsePoly> {
        if images.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, found: images.len() });
        }
        let target_vars = images.first().map_or(0, |p| p.nvars);
        for im in images {
            self.field.ensure_same(&im.field)?;
            if im.nvars != target_vars {
                return Err(Error::ArityMismatch { expected: target_vars, found: im.nvars });
            }
        }
        let mut cache: Vec<Vec<SparsePoly>> = images
            .iter()
            .map(|p| vec![SparsePoly::constant(Scalar::one(self.field), target_vars), p.clone()])
            .collect();
        let mut out = SparsePoly::zero(self.field, target_vars);
        for (e, c) in &self.terms {
            let mut term = SparsePoly::constant(c.clone(), target_vars);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().expect("nonempty").mul(&images[i])?;
                    cache[i].push(next);
                }
                term = term.mul(&cache[i][k as usize])?;
            }
            for (te, tc) in term.terms {
                out.add_term(te, tc);
            }
        }
        Ok(out)
    }
}
