//! Dense square matrices over a finite field and subspaces of the natural
//! module. Matrices act on column vectors.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{make_field, Field};
use crate::poly::Poly;

#[derive(Clone)]
pub struct Matrix {
    field: Field,
    dim: usize,
    data: Vec<u32>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.data == other.data && *self.field == *other.field
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over GF({})", self.dim, self.dim, self.field.q())?;
        for i in 0..self.dim {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Reduces `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub fn rref(field: &Field, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = field.inv(rows[r][col]).unwrap();
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = field.mul(*x, inv);
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let c = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = field.sub(*x, field.mul(c, y));
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

impl Matrix {
    pub fn new(field: &Field, dim: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(bad) = data.iter().find(|&&c| !field.contains(c)) {
            return Err(Error::InvalidArgument(format!(
                "entry {bad} outside GF({})",
                field.q()
            )));
        }
        Ok(Matrix {
            field: field.clone(),
            dim,
            data,
        })
    }

    pub(crate) fn from_raw(field: &Field, dim: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Matrix {
            field: field.clone(),
            dim,
            data,
        }
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        Self::new(field, dim, rows.concat())
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(field: &Field, cols: &[Vec<u32>]) -> Result<Self> {
        Ok(Self::from_rows(field, cols)?.transpose())
    }

    pub fn zero(field: &Field, dim: usize) -> Self {
        Self::from_raw(field, dim, vec![0; dim * dim])
    }

    pub fn identity(field: &Field, dim: usize) -> Self {
        let mut m = Self::zero(field, dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1;
        }
        m
    }

    pub fn diagonal(field: &Field, diag: &[u32]) -> Self {
        let dim = diag.len();
        let mut m = Self::zero(field, dim);
        for (i, &a) in diag.iter().enumerate() {
            m.data[i * dim + i] = a;
        }
        m
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and
    /// the negated lower coefficients in the last column.
    pub fn companion(f: &Poly) -> Result<Self> {
        if f.is_zero() || f.degree() == 0 || !f.is_monic() {
            return Err(Error::InvalidArgument(
                "companion matrix needs a monic polynomial of degree >= 1".into(),
            ));
        }
        let field = f.field();
        let n = f.degree();
        let mut m = Self::zero(field, n);
        for i in 1..n {
            m.data[i * n + i - 1] = 1;
        }
        for i in 0..n {
            m.data[i * n + n - 1] = field.neg(f.coeff(i));
        }
        Ok(m)
    }

    pub fn block_diagonal(blocks: &[Matrix]) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("no blocks".into()))?;
        let field = first.field.clone();
        if blocks.iter().any(|b| *b.field != *field) {
            return Err(Error::FieldMismatch);
        }
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zero(&field, dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m.data[(off + i) * dim + off + j] = b.get(i, j);
                }
            }
            off += b.dim;
        }
        Ok(m)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Product; panics on incompatible operands (see `try_mul`).
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("compatible matrices")
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.dim;
        let f = &self.field;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                if a == 1 {
                    for (o, &b) in orow.iter_mut().zip(brow) {
                        *o = f.add(*o, b);
                    }
                } else {
                    for (o, &b) in orow.iter_mut().zip(brow) {
                        *o = f.add(*o, f.mul(a, b));
                    }
                }
            }
        }
        Ok(Self::from_raw(f, n, out))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("compatible matrices");
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Self::from_raw(f, self.dim, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("compatible matrices");
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Self::from_raw(f, self.dim, data)
    }

    pub fn scale(&self, s: u32) -> Self {
        let f = &self.field;
        Self::from_raw(f, self.dim, self.data.iter().map(|&a| f.mul(a, s)).collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j];
            }
        }
        Self::from_raw(&self.field, n, out)
    }

    pub fn map_entries(&self, g: impl Fn(u32) -> u32) -> Self {
        Self::from_raw(&self.field, self.dim, self.data.iter().map(|&a| g(a)).collect())
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim;
        self.data
            .iter()
            .enumerate()
            .all(|(idx, &a)| a == u32::from(idx / n == idx % n))
    }

    pub fn det(&self) -> u32 {
        let f = &self.field;
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pv = a[col * n + col];
            det = f.mul(det, pv);
            let inv = f.inv(pv).unwrap();
            for r in col + 1..n {
                let c = f.mul(a[r * n + col], inv);
                if c == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(c, a[col * n + j]));
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        let f = &self.field;
        let n = self.dim;
        let mut rows: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let pivots = rref(f, &mut rows);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let data = rows.iter().flat_map(|r| r[n..].iter().copied()).collect();
        Some(Self::from_raw(f, n, data))
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u32>> = (0..self.dim).map(|i| self.row(i).to_vec()).collect();
        rref(&self.field, &mut rows).len()
    }

    /// Characteristic polynomial `det(xI - M)`, via reduction to upper
    /// Hessenberg form and the standard determinant recurrence.
    pub fn char_poly(&self) -> Poly {
        let f = &self.field;
        let n = self.dim;
        let mut h = self.data.clone();
        for m in 0..n.saturating_sub(2) {
            let Some(piv) = (m + 1..n).find(|&i| h[i * n + m] != 0) else {
                continue;
            };
            let s = m + 1;
            if piv != s {
                for j in 0..n {
                    h.swap(piv * n + j, s * n + j);
                }
                for i in 0..n {
                    h.swap(i * n + piv, i * n + s);
                }
            }
            let inv = f.inv(h[s * n + m]).unwrap();
            for i in m + 2..n {
                let u = f.mul(h[i * n + m], inv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    h[i * n + j] = f.sub(h[i * n + j], f.mul(u, h[s * n + j]));
                }
                for r in 0..n {
                    h[r * n + s] = f.add(h[r * n + s], f.mul(u, h[r * n + i]));
                }
            }
        }
        // p[m] is the characteristic polynomial of the leading m x m block
        let mut p: Vec<Vec<u32>> = vec![vec![1]];
        for m in 1..=n {
            let prev = &p[m - 1];
            let a = h[(m - 1) * n + (m - 1)];
            let mut cur = vec![0u32; m + 1];
            for (k, &c) in prev.iter().enumerate() {
                cur[k + 1] = f.add(cur[k + 1], c);
                cur[k] = f.sub(cur[k], f.mul(a, c));
            }
            let mut t = 1u32;
            for i in (1..m).rev() {
                t = f.mul(t, h[i * n + (i - 1)]);
                if t == 0 {
                    break;
                }
                let coef = f.mul(h[(i - 1) * n + (m - 1)], t);
                if coef == 0 {
                    continue;
                }
                for (k, &c) in p[i - 1].iter().enumerate() {
                    cur[k] = f.sub(cur[k], f.mul(coef, c));
                }
            }
            p.push(cur);
        }
        Poly::new(f, p.pop().unwrap())
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        let mut acc = Self::identity(&self.field, self.dim);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc);
            if e.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        self.pow(&BigUint::from(e))
    }

    /// `f(M)` by Horner's rule.
    pub fn eval_poly(&self, f: &Poly) -> Self {
        let mut acc = Self::zero(&self.field, self.dim);
        for &c in f.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..self.dim {
                let idx = i * self.dim + i;
                acc.data[idx] = self.field.add(acc.data[idx], c);
            }
        }
        acc
    }

    /// Right kernel.
    pub fn nullspace(&self) -> Subspace {
        let f = &self.field;
        let n = self.dim;
        let mut rows: Vec<Vec<u32>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let pivots = rref(f, &mut rows);
        let mut vecs = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; n];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[r][free]);
            }
            vecs.push(v);
        }
        Subspace::from_vectors(f, n, vecs)
    }

    /// Kernel of `f(M)`.
    pub fn kernel_of_poly(&self, f: &Poly) -> Result<Subspace> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.eval_poly(f).nullspace())
    }

    /// The induced action on an invariant subspace, in the subspace's
    /// echelon basis.
    pub fn restrict(&self, u: &Subspace) -> Result<Self> {
        if u.ambient != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.ambient,
            });
        }
        let k = u.dim();
        let mut cols = Vec::with_capacity(k);
        for b in &u.basis {
            let image = self.mul_vec(b);
            let coords = u.coordinates(&image).ok_or(Error::NotInvariant)?;
            cols.push(coords);
        }
        let mut out = vec![0u32; k * k];
        for (j, c) in cols.iter().enumerate() {
            for (i, &a) in c.iter().enumerate() {
                out[i * k + j] = a;
            }
        }
        Ok(Self::from_raw(&self.field, k, out))
    }

    /// No proper nonzero invariant subspace, decided by irreducibility of
    /// the characteristic polynomial.
    pub fn is_irreducible_action(&self) -> bool {
        self.dim > 0 && self.char_poly().is_irreducible()
    }

    /// Text form: header `d p e`, then `d` rows of integer-encoded entries.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.dim, self.field.p(), self.field.e());
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|a| a.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let h: Vec<u64> = parse_ints(header)?;
        if h.len() != 3 {
            return Err(Error::Parse(format!("matrix header must be `d p e`, got `{header}`")));
        }
        let (dim, p, e) = (h[0] as usize, h[1], h[2] as u32);
        let field = make_field(p, e)?;
        Self::parse_body(&field, dim, lines)
    }

    /// Parses with a known field; the header must agree with it.
    pub fn parse_in(field: &Field, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let h: Vec<u64> = parse_ints(header)?;
        if h.len() != 3 || h[1] != field.p() as u64 || h[2] != field.e() as u64 {
            return Err(Error::Parse(format!(
                "matrix header `{header}` does not match GF({}^{})",
                field.p(),
                field.e()
            )));
        }
        Self::parse_body(field, h[0] as usize, lines)
    }

    fn parse_body<'a>(field: &Field, dim: usize, lines: impl Iterator<Item = &'a str>) -> Result<Self> {
        let rows: Vec<Vec<u32>> = lines
            .map(|l| parse_ints(l).map(|r| r.into_iter().map(|x| x as u32).collect()))
            .collect::<Result<_>>()?;
        if rows.len() != dim {
            return Err(Error::Parse(format!("expected {dim} rows, found {}", rows.len())));
        }
        Self::from_rows(field, &rows)
    }
}

fn parse_ints(line: &str) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
        .collect()
}

/// A subspace of `F^d` held by its reduced row echelon basis, so equal
/// subspaces have equal representations.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: {:?})", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn from_vectors(field: &Field, ambient: usize, mut vecs: Vec<Vec<u32>>) -> Self {
        debug_assert!(vecs.iter().all(|v| v.len() == ambient));
        let pivots = rref(field, &mut vecs);
        Subspace {
            field: field.clone(),
            ambient,
            basis: vecs,
            pivots,
        }
    }

    pub fn full(field: &Field, ambient: usize) -> Self {
        let vecs = (0..ambient)
            .map(|i| (0..ambient).map(|j| u32::from(i == j)).collect())
            .collect();
        Self::from_vectors(field, ambient, vecs)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Coordinates in the echelon basis, or `None` if `v` is not in the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let f = &self.field;
        let coords: Vec<u32> = self.pivots.iter().map(|&p| v[p]).collect();
        let mut rebuilt = vec![0u32; self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c == 0 {
                continue;
            }
            for (r, &x) in rebuilt.iter_mut().zip(b) {
                *r = f.add(*r, f.mul(*c, x));
            }
        }
        (rebuilt == v).then_some(coords)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.coordinates(v).is_some()
    }
}
