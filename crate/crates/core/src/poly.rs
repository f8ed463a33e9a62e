//! Univariate polynomials over a finite field and their factorization.
//!
//! Factorization runs the usual three stages: squarefree decomposition
//! (taking p-th roots where the derivative vanishes), distinct-degree
//! splitting, and Cantor–Zassenhaus equal-degree splitting. In
//! characteristic 2 the equal-degree step uses the trace map instead of the
//! `(q^d - 1)/2` power. The random choices come from a fixed-seed generator,
//! so the output is a pure function of the input.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::Field;

const SPLIT_SEED: u64 = 0x5eed_f00d;

/// A polynomial with ascending coefficients; the zero polynomial has no
/// coefficients and every other value has a nonzero leading coefficient.
#[derive(Clone)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u32>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({:?})", self.field.q(), self.coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c != 1 || i == 0 { c.to_string() } else { String::new() };
            match i {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}x")?,
                _ => write!(f, "{coeff}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        debug_assert!(coeffs.iter().all(|&c| field.contains(c)));
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Checked constructor for untrusted coefficient data.
    pub fn from_coeffs(field: &Field, coeffs: Vec<u32>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|&&c| !field.contains(c)) {
            return Err(Error::InvalidArgument(format!(
                "coefficient {bad} outside GF({})",
                field.q()
            )));
        }
        Ok(Self::new(field, coeffs))
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::new(field, vec![1])
    }

    pub fn x(field: &Field) -> Self {
        Self::new(field, vec![0, 1])
    }

    pub fn constant(field: &Field, c: u32) -> Self {
        Self::new(field, vec![c])
    }

    /// `x - a`.
    pub fn linear(field: &Field, a: u32) -> Self {
        Self::new(field, vec![field.neg(a), 1])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; the zero polynomial reports 0 here, check `is_zero` first.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn eval(&self, a: u32) -> u32 {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, a), c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::new(f, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::new(f, c)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, s: u32) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let f = &self.field;
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Self::zero(f), self.clone());
        }
        let dd = divisor.degree();
        let lead_inv = f.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - dd];
        for shift in (0..quot.len()).rev() {
            let c = f.mul(rem[shift + dd], lead_inv);
            quot[shift] = c;
            if c == 0 {
                continue;
            }
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        (Self::new(f, quot), Self::new(f, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Exact quotient (debug-checked).
    pub fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.rem(self).is_zero()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.field.inv(self.leading()).unwrap();
        self.scale(inv)
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| f.mul(f.from_int(i as i64), a))
            .collect();
        Self::new(f, c)
    }

    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Self {
        self.mul(other).rem(modulus)
    }

    pub fn pow_mod(&self, n: &BigUint, modulus: &Self) -> Self {
        let mut acc = Self::one(&self.field).rem(modulus);
        let base = self.rem(modulus);
        for i in (0..n.bits()).rev() {
            acc = acc.mul_mod(&acc, modulus);
            if n.bit(i) {
                acc = acc.mul_mod(&base, modulus);
            }
        }
        acc
    }

    pub fn pow_mod_u64(&self, n: u64, modulus: &Self) -> Self {
        self.pow_mod(&BigUint::from(n), modulus)
    }

    /// The polynomial whose roots are the inverses of the roots of `self`,
    /// normalized to be monic: `f(0)^{-1} x^{deg f} f(1/x)`.
    pub fn conjugate(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let c0 = self.coeff(0);
        let inv = self.field.inv(c0).ok_or(Error::ZeroConstantTerm)?;
        let rev: Vec<u32> = self.coeffs.iter().rev().copied().collect();
        Ok(Self::new(&self.field, rev).scale(inv))
    }

    /// Whether the root set is closed under inversion (for monic `self`).
    pub fn is_self_conjugate(&self) -> Result<bool> {
        Ok(self.conjugate()? == *self)
    }

    /// Space-separated ascending integer encodings.
    pub fn to_text(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse(field: &Field, text: &str) -> Result<Self> {
        let coeffs = text
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(field, coeffs)
    }

    /// Inverse Frobenius applied to a polynomial in `x^p`.
    fn pth_root(&self) -> Self {
        let f = &self.field;
        let p = f.p() as usize;
        let undo = f.e() - 1;
        let c = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|&a| f.frobenius_power(a, undo))
            .collect();
        Self::new(f, c)
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        if self.is_zero() || self.degree() == 0 {
            return false;
        }
        let n = self.degree();
        if n == 1 {
            return true;
        }
        let f = self.monic();
        if f.coeff(0) == 0 {
            return false;
        }
        let q = BigUint::from(self.field.q());
        let x = Self::x(&self.field);
        let mut frob = vec![x.rem(&f)];
        for _ in 0..n {
            let next = frob.last().unwrap().pow_mod(&q, &f);
            frob.push(next);
        }
        if frob[n] != x.rem(&f) {
            return false;
        }
        let factors = arith::factorize_u64(n as u64).expect("n >= 2");
        let coprime = factors.primes().all(|r| {
            let r = num_traits::ToPrimitive::to_usize(r).unwrap();
            frob[n / r].sub(&x).gcd(&f).is_one()
        });
        coprime
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }

    pub fn factorize(&self) -> Result<FactoredPoly> {
        factorize_poly(self)
    }
}

/// Product of a unit and monic irreducible factors with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPoly {
    pub unit: u32,
    pub factors: Vec<(Poly, usize)>,
}

impl FactoredPoly {
    pub fn expand(&self, field: &Field) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(field, self.unit), |acc, (g, m)| {
                acc.mul(&g.pow(*m))
            })
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Complete factorization into monic irreducibles, ordered by degree and
/// then by coefficients from the top down.
pub fn factorize_poly(f: &Poly) -> Result<FactoredPoly> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.leading();
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut factors: Vec<(Poly, usize)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (block, degree) in distinct_degree(&part) {
            for g in equal_degree(&block, degree, &mut rng) {
                match factors.iter_mut().find(|(h, _)| *h == g) {
                    Some((_, m)) => *m += mult,
                    None => factors.push((g, mult)),
                }
            }
        }
    }
    factors.sort_by(|a, b| a.0.sort_key_cmp(&b.0));
    Ok(FactoredPoly { unit, factors })
}

/// Squarefree parts with multiplicities, for a monic input.
pub fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let p = f.field().p() as usize;
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if !c.is_one() {
        for (g, m) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field().clone();
    let q = BigUint::from(field.q());
    let x = Poly::x(&field);
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut i = 1;
    while rest.degree() >= 2 * i {
        h = h.pow_mod(&q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.degree() > 0 {
        let d = rest.degree();
        out.push((rest, d));
    }
    out
}

fn random_poly(field: &Field, below_degree: usize, rng: &mut ChaCha8Rng) -> Poly {
    let c = (0..below_degree).map(|_| rng.gen_range(0..field.q())).collect();
    Poly::new(field, c)
}

/// Cantor–Zassenhaus splitting of a product of distinct irreducibles of
/// degree `d`.
pub fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree();
    if n == d {
        return vec![f.clone()];
    }
    let field: Field = Arc::clone(f.field());
    let q = field.q();
    let exponent = if q % 2 == 1 {
        Some((BigUint::from(q).pow(d as u32) - 1u32) / 2u32)
    } else {
        None
    };
    loop {
        let a = random_poly(&field, n, rng);
        if a.degree() == 0 {
            continue;
        }
        let b = match &exponent {
            Some(e) => a.pow_mod(e, f).sub(&Poly::one(&field)),
            None => {
                // trace from GF(q^d) down to GF(2)
                let bits = field.e() as usize * d;
                let mut t = a.rem(f);
                let mut acc = t.clone();
                for _ in 1..bits {
                    t = t.mul_mod(&t, f);
                    acc = acc.add(&t);
                }
                acc
            }
        };
        let g = f.gcd(&b);
        if !g.is_one() && g.degree() < n {
            let h = f.div_exact(&g);
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}
