use std::cmp::Ordering;
use std::fmt;

use super::sparse::{Exponents, SparsePoly};
use crate::error::{Error, Result};
use crate::exactalg::{Field, Scalar};

/// Polynomial in `𝒜 = k[X0', X1'][X0, …, Xn]`.
///
/// Exponent layout: `[e0', e1', e0, e1, …, en]`. Every stored coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BiPolynomial {
    n: usize,
    inner: SparsePoly,
}

/// Polynomial in `k[z][X1, …, Xn]`; exponent layout `[e_z, e1, …, en]`.
///
/// Its height is `deg_z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePolynomial {
    n: usize,
    inner: SparsePoly,
}

macro_rules! ring_ops {
    ($ty:ident) => {
        impl $ty {
            pub fn n(&self) -> usize {
                self.n
            }

            pub fn field(&self) -> Field {
                self.inner.field
            }

            pub fn is_zero(&self) -> bool {
                self.inner.is_zero()
            }

            pub fn num_terms(&self) -> usize {
                self.inner.terms.len()
            }

            pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Scalar)> {
                self.inner.terms.iter()
            }

            pub fn coeff(&self, e: &[u32]) -> Scalar {
                self.inner.terms.get(e).cloned().unwrap_or_else(|| Scalar::zero(self.field()))
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                Ok($ty { n: self.n, inner: self.inner.add(&other.inner)? })
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                Ok($ty { n: self.n, inner: self.inner.sub(&other.inner)? })
            }

            pub fn mul(&self, other: &Self) -> Result<Self> {
                Ok($ty { n: self.n, inner: self.inner.mul(&other.inner)? })
            }

            pub fn neg(&self) -> Self {
                $ty { n: self.n, inner: self.inner.neg() }
            }

            pub fn scale(&self, c: &Scalar) -> Result<Self> {
                Ok($ty { n: self.n, inner: self.inner.scale(c)? })
            }

            pub fn pow(&self, k: u32) -> Self {
                $ty { n: self.n, inner: self.inner.pow(k) }
            }

            /// Raw partial derivative with respect to slot `var` of the exponent layout.
            pub fn derivative(&self, var: usize) -> Self {
                $ty { n: self.n, inner: self.inner.derivative(var) }
            }

            pub(crate) fn from_sparse(n: usize, inner: SparsePoly) -> Self {
                $ty { n, inner }
            }
        }
    };
}

ring_ops!(BiPolynomial);
ring_ops!(AffinePolynomial);

impl BiPolynomial {
    pub fn zero(field: Field, n: usize) -> Self {
        BiPolynomial { n, inner: SparsePoly::zero(field, n + 3) }
    }

    pub fn constant(c: Scalar, n: usize) -> Self {
        BiPolynomial { n, inner: SparsePoly::constant(c, n + 3) }
    }

    pub fn from_terms(
        field: Field,
        n: usize,
        terms: impl IntoIterator<Item = (Exponents, Scalar)>,
    ) -> Result<Self> {
        Ok(BiPolynomial { n, inner: SparsePoly::from_terms(field, n + 3, terms)? })
    }

    /// `X0'` (`i = 0`) or `X1'` (`i = 1`).
    pub fn x_prime(field: Field, n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 3];
        e[i] = 1;
        BiPolynomial::from_terms(field, n, [(e, Scalar::one(field))]).expect("valid monomial")
    }

    /// `X_i` for `0 ≤ i ≤ n`.
    pub fn x(field: Field, n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 3];
        e[2 + i] = 1;
        BiPolynomial::from_terms(field, n, [(e, Scalar::one(field))]).expect("valid monomial")
    }

    /// Maximal degree in `(X0', X1')` over all terms.
    pub fn deg_x_prime(&self) -> u32 {
        self.inner.max_block_degree(0..2)
    }

    /// Maximal degree in `(X0, …, Xn)` over all terms.
    pub fn deg_x(&self) -> u32 {
        self.inner.max_block_degree(2..self.n + 3)
    }

    /// The shared bidegree when bi-homogeneous (the zero polynomial has none).
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.inner.terms.keys().map(|e| term_bidegree(e));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_bihomogeneous(&self) -> bool {
        self.is_zero() || self.bidegree().is_some()
    }

    /// Sets `(X0', X1', X0) = (1, z, 1)`.
    pub fn dehomogenize(&self) -> AffinePolynomial {
        let mut out = SparsePoly::zero(self.field(), self.n + 1);
        for (e, c) in &self.inner.terms {
            let mut a = Vec::with_capacity(self.n + 1);
            a.push(e[1]);
            a.extend_from_slice(&e[3..]);
            out.add_term(a, c.clone());
        }
        AffinePolynomial { n: self.n, inner: out }
    }

    /// Substitutes `(X0', X1', X0, …, Xn) ↦ images`.
    pub fn substitute(&self, images: &[BiPolynomial]) -> Result<BiPolynomial> {
        if images.len() != self.n + 3 {
            return Err(Error::ArityMismatch { expected: self.n + 3, found: images.len() });
        }
        let target_n = images[0].n;
        let sparse: Vec<SparsePoly> = images.iter().map(|p| p.inner.clone()).collect();
        Ok(BiPolynomial { n: target_n, inner: self.inner.substitute(&sparse)? })
    }

    /// Terms sorted graded-lexicographically, `X'` group first, largest first.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Scalar)> {
        let mut v: Vec<_> = self.inner.terms.iter().collect();
        v.sort_by(|a, b| grlex_blocks(b.0, a.0, &[0..2, 2..self.n + 3]));
        v
    }
}

pub(crate) fn term_bidegree(e: &[u32]) -> (u32, u32) {
    (e[0] + e[1], e[2..].iter().sum())
}

fn grlex_blocks(a: &[u32], b: &[u32], blocks: &[std::ops::Range<usize>]) -> Ordering {
    for r in blocks {
        let da: u32 = a[r.clone()].iter().sum();
        let db: u32 = b[r.clone()].iter().sum();
        let o = da.cmp(&db).then_with(|| a[r.clone()].cmp(&b[r.clone()]));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

impl AffinePolynomial {
    pub fn zero(field: Field, n: usize) -> Self {
        AffinePolynomial { n, inner: SparsePoly::zero(field, n + 1) }
    }

    pub fn constant(c: Scalar, n: usize) -> Self {
        AffinePolynomial { n, inner: SparsePoly::constant(c, n + 1) }
    }

    pub fn from_terms(
        field: Field,
        n: usize,
        terms: impl IntoIterator<Item = (Exponents, Scalar)>,
    ) -> Result<Self> {
        Ok(AffinePolynomial { n, inner: SparsePoly::from_terms(field, n + 1, terms)? })
    }

    pub fn z(field: Field, n: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[0] = 1;
        AffinePolynomial::from_terms(field, n, [(e, Scalar::one(field))]).expect("valid monomial")
    }

    /// `X_i` for `1 ≤ i ≤ n`.
    pub fn x(field: Field, n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        AffinePolynomial::from_terms(field, n, [(e, Scalar::one(field))]).expect("valid monomial")
    }

    pub fn deg_z(&self) -> u32 {
        self.inner.max_block_degree(0..1)
    }

    pub fn deg_x(&self) -> u32 {
        self.inner.max_block_degree(1..self.n + 1)
    }

    pub fn height(&self) -> u32 {
        self.deg_z()
    }

    /// `ʰP = X0'^{deg_z P} · X0^{deg_X P} · P(X1'/X0', X1/X0, …, Xn/X0)`.
    pub fn bihomogenize(&self) -> BiPolynomial {
        self.homogenize_to(self.deg_z(), self.deg_x()).expect("degrees bound the terms")
    }

    /// Bi-homogenization at a prescribed bidegree `(a, b) ≥ (deg_z, deg_X)`.
    pub fn homogenize_to(&self, a: u32, b: u32) -> Result<BiPolynomial> {
        if a < self.deg_z() || b < self.deg_x() {
            return Err(Error::InvalidInput(format!(
                "bidegree ({a},{b}) below ({},{})",
                self.deg_z(),
                self.deg_x()
            )));
        }
        let mut out = SparsePoly::zero(self.field(), self.n + 3);
        for (e, c) in &self.inner.terms {
            let dx: u32 = e[1..].iter().sum();
            let mut h = Vec::with_capacity(self.n + 3);
            h.push(a - e[0]);
            h.push(e[0]);
            h.push(b - dx);
            h.extend_from_slice(&e[1..]);
            out.add_term(h, c.clone());
        }
        Ok(BiPolynomial { n: self.n, inner: out })
    }

    /// `∂/∂z`.
    pub fn d_z(&self) -> Self {
        self.derivative(0)
    }

    /// `∂/∂X_i`, `1 ≤ i ≤ n`.
    pub fn d_x(&self, i: usize) -> Self {
        self.derivative(i)
    }

    /// Value at a point `(z, x1, …, xn)` of the base field.
    pub fn eval_scalar(&self, z: &Scalar, xs: &[Scalar]) -> Result<Scalar> {
        if xs.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, found: xs.len() });
        }
        self.field().ensure_same(&z.field())?;
        for x in xs {
            self.field().ensure_same(&x.field())?;
        }
        let mut acc = Scalar::zero(self.field());
        for (e, c) in &self.inner.terms {
            let mut t = c * &z.pow(e[0]);
            for (x, &k) in xs.iter().zip(&e[1..]) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitutes `(z, X1, …, Xn) ↦ images` inside the affine ring.
    pub fn substitute(&self, images: &[AffinePolynomial]) -> Result<AffinePolynomial> {
        if images.len() != self.n + 1 {
            return Err(Error::ArityMismatch { expected: self.n + 1, found: images.len() });
        }
        let sparse: Vec<SparsePoly> = images.iter().map(|p| p.inner.clone()).collect();
        Ok(AffinePolynomial { n: images[0].n, inner: self.inner.substitute(&sparse)? })
    }

    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Scalar)> {
        let mut v: Vec<_> = self.inner.terms.iter().collect();
        v.sort_by(|a, b| grlex_blocks(b.0, a.0, &[0..1, 1..self.n + 1]));
        v
    }
}

fn var_name_bi(i: usize) -> String {
    match i {
        0 => "X0'".into(),
        1 => "X1'".into(),
        k => format!("X{}", k - 2),
    }
}

fn var_name_affine(i: usize) -> String {
    match i {
        0 => "z".into(),
        k => format!("X{k}"),
    }
}

fn coeff_text(c: &Scalar) -> (bool, String) {
    match c {
        Scalar::Rat(q) => {
            let neg = q < &num_rational::BigRational::from_integer(0.into());
            let a = if neg { -q.clone() } else { q.clone() };
            (neg, Scalar::Rat(a).to_string())
        }
        Scalar::Mod { value, .. } => (false, value.to_string()),
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: &[(&Exponents, &Scalar)],
    name: fn(usize) -> String,
) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (k, (e, c)) in terms.iter().enumerate() {
        let (neg, mag) = coeff_text(c);
        match (k, neg) {
            (0, true) => write!(f, "-")?,
            (0, false) => {}
            (_, true) => write!(f, " - ")?,
            (_, false) => write!(f, " + ")?,
        }
        let mono: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| if x == 1 { name(i) } else { format!("{}^{x}", name(i)) })
            .collect();
        if mono.is_empty() {
            write!(f, "{mag}")?;
        } else if mag == "1" {
            write!(f, "{}", mono.join("*"))?;
        } else {
            write!(f, "{mag}*{}", mono.join("*"))?;
        }
    }
    Ok(())
}

impl fmt::Display for BiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.sorted_terms(), var_name_bi)
    }
}

impl fmt::Display for AffinePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.sorted_terms(), var_name_affine)
    }
}
