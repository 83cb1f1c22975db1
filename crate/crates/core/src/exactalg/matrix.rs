use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix over a single exact field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for e in &entries {
            field.ensure_same(&e.field())?;
        }
        Ok(ExactMatrix { field, rows, cols, entries })
    }

    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::InvalidMatrix(format!("row of length {} in {cols}-column matrix", r.len())));
            }
            entries.extend(r);
        }
        ExactMatrix::new(field, n, cols, entries)
    }

    /// Integer-entry convenience constructor.
    pub fn from_i64_rows(field: Field, rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Scalar::from_i64(field, v)).collect())
            .collect();
        ExactMatrix::from_rows(field, cols, rows)
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        ExactMatrix { field, rows, cols, entries: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product `M·v`.
    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::ArityMismatch { expected: self.cols, found: v.len() });
        }
        for x in v {
            self.field.ensure_same(&x.field())?;
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(self.field), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }

    /// Reduced row echelon form with deterministic pivoting.
    pub fn rref(&self) -> Rref {
        match self.field {
            Field::Rational => rref_fraction_free(self),
            Field::Prime(p) => rref_mod(self, p),
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space (see [`kernel_basis`]).
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        self.rref().kernel_basis(self.cols, self.field)
    }

    /// Ranks of the leading row blocks (see [`rank_profile`]).
    pub fn rank_profile(&self) -> Vec<usize> {
        let mut ech = RowEchelon::new(self.field, self.cols);
        let mut out = Vec::with_capacity(self.rows + 1);
        out.push(0);
        for r in 0..self.rows {
            ech.push_row(self.row(r)).expect("matrix entries share its field");
            out.push(ech.rank());
        }
        out
    }

    /// One solution of `M·x = rhs` (free variables set to zero), or `None`.
    pub fn solve(&self, rhs: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if rhs.len() != self.rows {
            return Err(Error::ArityMismatch { expected: self.rows, found: rhs.len() });
        }
        let mut rows = Vec::with_capacity(self.rows);
        for (r, b) in rhs.iter().enumerate() {
            self.field.ensure_same(&b.field())?;
            let mut row = self.row(r).to_vec();
            row.push(b.clone());
            rows.push(row);
        }
        let aug = ExactMatrix::from_rows(self.field, self.cols + 1, rows)?;
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(self.field); self.cols];
        for (k, &pc) in rref.pivots.iter().enumerate() {
            x[pc] = rref.rows[k][self.cols].clone();
        }
        Ok(Some(x))
    }
}

/// Right null space basis of `m`.
///
/// Each vector has first nonzero entry 1; vectors are ordered by their free column.
pub fn kernel_basis(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    m.kernel_basis()
}

/// `out[r]` is the rank of the first `r` rows; `out.len() == rows + 1`.
pub fn rank_profile(m: &ExactMatrix) -> Vec<usize> {
    m.rank_profile()
}

/// Reduced row echelon form: `rows[k]` has a 1 at column `pivots[k]`.
#[derive(Debug, Clone)]
pub struct Rref {
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<Scalar>>,
}

impl Rref {
    fn kernel_basis(&self, cols: usize, field: Field) -> Vec<Vec<Scalar>> {
        let mut is_pivot = vec![false; cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Scalar::zero(field); cols];
            v[free] = Scalar::one(field);
            for (k, &pc) in self.pivots.iter().enumerate() {
                v[pc] = -&self.rows[k][free];
            }
            normalize_leading_one(&mut v);
            basis.push(v);
        }
        basis
    }
}

/// Scales `v` so that its first nonzero entry is 1 (no-op on the zero vector).
pub fn normalize_leading_one(v: &mut [Scalar]) {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        if !lead.is_one() {
            let inv = lead.inv().expect("nonzero");
            for x in v.iter_mut() {
                *x = &*x * &inv;
            }
        }
    }
}

fn integer_row(row: &[Scalar]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in row {
        if let Some(q) = x.as_rational() {
            lcm = lcm.lcm(q.denom());
        }
    }
    row.iter()
        .map(|x| {
            let q = x.as_rational().expect("rational entry");
            q.numer() * (&lcm / q.denom())
        })
        .collect()
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// `target ← (p/g)·target − (t/g)·pivot_row` with `p = pivot_row[c]`, `t = target[c]`.
fn cross_eliminate(target: &mut [BigInt], pivot_row: &[BigInt], c: usize) {
    let p = &pivot_row[c];
    let t = target[c].clone();
    let g = p.gcd(&t);
    let pm = p / &g;
    let tm = &t / &g;
    for (x, y) in target.iter_mut().zip(pivot_row) {
        let scaled = &*x * &pm;
        *x = if y.is_zero() { scaled } else { scaled - &tm * y };
    }
    make_primitive(target);
}

fn rref_fraction_free(m: &ExactMatrix) -> Rref {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|r| integer_row(m.row(r))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == a.len() {
            break;
        }
        let Some(i) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, i);
        let (before, rest) = a.split_at_mut(r);
        let (prow, after) = rest.split_first_mut().expect("row r exists");
        for row in before.iter_mut().chain(after.iter_mut()) {
            if !row[c].is_zero() {
                cross_eliminate(row, prow, c);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rows = a
        .into_iter()
        .take(pivots.len())
        .zip(&pivots)
        .map(|(row, &pc)| {
            let p = row[pc].clone();
            row.into_iter()
                .map(|x| Scalar::Rat(BigRational::new(x, p.clone())))
                .collect()
        })
        .collect();
    Rref { pivots, rows }
}

fn mod_row(row: &[Scalar]) -> Vec<u64> {
    row.iter()
        .map(|x| match x {
            Scalar::Mod { value, .. } => *value,
            Scalar::Rat(_) => unreachable!("prime-field matrix"),
        })
        .collect()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    match (Scalar::Mod { value: a, modulus: p }).inv().expect("nonzero pivot") {
        Scalar::Mod { value, .. } => value,
        Scalar::Rat(_) => unreachable!(),
    }
}

fn axpy_mod(target: &mut [u64], factor: u64, src: &[u64], p: u64) {
    // target -= factor * src
    for (x, &y) in target.iter_mut().zip(src) {
        if y != 0 {
            let sub = ((factor as u128 * y as u128) % p as u128) as u64;
            *x = if *x >= sub { *x - sub } else { *x + (p - sub) };
        }
    }
}

fn rref_mod(m: &ExactMatrix, p: u64) -> Rref {
    let mut a: Vec<Vec<u64>> = (0..m.rows).map(|r| mod_row(m.row(r))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == a.len() {
            break;
        }
        let Some(i) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, i);
        let inv = inv_mod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = ((*x as u128 * inv as u128) % p as u128) as u64;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                axpy_mod(row, f, &prow, p);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rows = a
        .into_iter()
        .take(pivots.len())
        .map(|row| row.into_iter().map(|value| Scalar::Mod { value, modulus: p }).collect())
        .collect();
    Rref { pivots, rows }
}

/// Row-incremental echelon form.
///
/// Rows are reduced against the stored pivot rows in insertion order; a row that
/// survives contributes a new pivot at its first nonzero column. Over ℚ the rows are
/// kept as primitive integer vectors (fraction-free), over 𝔽_p with leading 1.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    field: Field,
    cols: usize,
    backend: Backend,
}

#[derive(Debug, Clone)]
enum Backend {
    Integer(Vec<(usize, Vec<BigInt>)>),
    Modular(u64, Vec<(usize, Vec<u64>)>),
}

impl RowEchelon {
    pub fn new(field: Field, cols: usize) -> Self {
        let backend = match field {
            Field::Rational => Backend::Integer(Vec::new()),
            Field::Prime(p) => Backend::Modular(p, Vec::new()),
        };
        RowEchelon { field, cols, backend }
    }

    pub fn rank(&self) -> usize {
        match &self.backend {
            Backend::Integer(v) => v.len(),
            Backend::Modular(_, v) => v.len(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Adds a row; returns whether the rank increased.
    pub fn push_row(&mut self, row: &[Scalar]) -> Result<bool> {
        if row.len() != self.cols {
            return Err(Error::ArityMismatch { expected: self.cols, found: row.len() });
        }
        for x in row {
            self.field.ensure_same(&x.field())?;
        }
        Ok(match &mut self.backend {
            Backend::Integer(pivots) => {
                let mut v = integer_row(row);
                for (c, prow) in pivots.iter() {
                    if !v[*c].is_zero() {
                        cross_eliminate(&mut v, prow, *c);
                    }
                }
                match v.iter().position(|x| !x.is_zero()) {
                    Some(c) => {
                        make_primitive(&mut v);
                        if v[c].is_negative() {
                            v.iter_mut().for_each(|x| *x = -&*x);
                        }
                        pivots.push((c, v));
                        true
                    }
                    None => false,
                }
            }
            Backend::Modular(p, pivots) => {
                let p = *p;
                let mut v = mod_row(row);
                for (c, prow) in pivots.iter() {
                    if v[*c] != 0 {
                        let f = v[*c];
                        axpy_mod(&mut v, f, prow, p);
                    }
                }
                match v.iter().position(|&x| x != 0) {
                    Some(c) => {
                        let inv = inv_mod(v[c], p);
                        for x in v.iter_mut() {
                            *x = ((*x as u128 * inv as u128) % p as u128) as u64;
                        }
                        pivots.push((c, v));
                        true
                    }
                    None => false,
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Scalar::from_i64(Field::Rational, v)
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[1, 0], &[0, 1]]).unwrap();
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn zero_row_kernel_is_standard_basis() {
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[0, 0]]).unwrap();
        assert_eq!(m.kernel_basis(), vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
    }

    #[test]
    fn single_relation_kernel_is_normalized() {
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[1, 1]]).unwrap();
        assert_eq!(m.kernel_basis(), vec![vec![q(1), q(-1)]]);
    }

    #[test]
    fn rank_profile_examples() {
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[1, 0], &[0, 1], &[1, 1]]).unwrap();
        assert_eq!(m.rank_profile(), vec![0, 1, 2, 2]);
        let z = ExactMatrix::zeros(Field::Rational, 2, 3);
        assert_eq!(z.rank_profile(), vec![0, 0, 0]);
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[2, 4], &[1, 2], &[0, 1]]).unwrap();
        assert_eq!(m.rank_profile(), vec![0, 1, 1, 2]);
    }

    #[test]
    fn modular_kernel() {
        let f5 = Field::prime(5).unwrap();
        let m = ExactMatrix::from_i64_rows(f5, &[&[1, 2, 3], &[2, 4, 2]]).unwrap();
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).unwrap().iter().all(Scalar::is_zero));
        assert!(ker[0][0].is_one());
    }

    #[test]
    fn mixed_field_entries_rejected() {
        let e = vec![q(1), Scalar::one(Field::Prime(3))];
        assert!(matches!(
            ExactMatrix::new(Field::Rational, 1, 2, e),
            Err(Error::FieldMismatch(..))
        ));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[1, 1], &[2, 2]]).unwrap();
        let x = m.solve(&[q(3), q(6)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![q(3), q(6)]);
        assert_eq!(m.solve(&[q(3), q(5)]).unwrap(), None);
    }

    #[test]
    fn kernel_rows_are_free_column_ordered() {
        let m = ExactMatrix::from_i64_rows(Field::Rational, &[&[0, 1, 2, 0], &[0, 0, 0, 1]]).unwrap();
        let ker = m.kernel_basis();
        assert_eq!(ker, vec![vec![q(1), q(0), q(0), q(0)], vec![q(0), q(1), Scalar::Rat(BigRational::new((-1).into(), 2.into())), q(0)]]);
    }
}
