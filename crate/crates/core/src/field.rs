//! Finite fields `F_{p^e}` with table-driven arithmetic.
//!
//! Elements are stored as their integer encoding `Σ c_i p^i`, where `c_i` are
//! the coefficients of the residue modulo the defining polynomial. The same
//! encoding is used by every text format in the crate. Multiplication goes
//! through discrete log tables; addition is native for prime and binary
//! fields and uses Zech logarithms otherwise.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

pub const DEFAULT_SIZE_LIMIT: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Prime,
    Binary,
    Extension,
}

/// A finite field of order `q = p^e`.
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    kind: Kind,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

/// Shared handle to a field; matrices and polynomials hold one of these.
pub type Field = Arc<FieldSpec>;

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.e)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// The field with `p^e` elements and the default size limit.
pub fn make_field(p: u64, e: u32) -> Result<Field> {
    make_field_with_limit(p, e, DEFAULT_SIZE_LIMIT)
}

pub fn make_field_with_limit(p: u64, e: u32, limit: u64) -> Result<Field> {
    check_params(p, e, limit)?;
    let modulus = smallest_irreducible(p as u32, e);
    Ok(Arc::new(FieldSpec::build(p as u32, e, modulus)))
}

/// A field with an explicitly given monic modulus (ascending coefficients,
/// length `e + 1`), verified irreducible.
pub fn make_field_with_modulus(p: u64, modulus: &[u32]) -> Result<Field> {
    if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
        return Err(Error::InvalidArgument("modulus must be monic of degree >= 1".into()));
    }
    let e = (modulus.len() - 1) as u32;
    check_params(p, e, DEFAULT_SIZE_LIMIT)?;
    if modulus.iter().any(|&c| c as u64 >= p) {
        return Err(Error::InvalidArgument("modulus coefficient out of range".into()));
    }
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    if !prime_poly::is_irreducible(&m, p) {
        return Err(Error::InvalidArgument("modulus is reducible".into()));
    }
    Ok(Arc::new(FieldSpec::build(p as u32, e, modulus.to_vec())))
}

fn check_params(p: u64, e: u32, limit: u64) -> Result<()> {
    if p < 2 || !arith::is_prime(&BigUint::from(p)) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
    }
    let q = (p as u128).checked_pow(e);
    match q {
        Some(q) if q <= limit as u128 && q <= u32::MAX as u128 => Ok(()),
        _ => Err(Error::FieldTooLarge { p, e, limit }),
    }
}

/// Lexicographically smallest monic irreducible of degree `e` over `F_p`,
/// comparing the lower coefficients by their base-`p` encoding.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(e);
    for code in 0..count {
        let mut m = decode_digits(code, p as u64, e as usize);
        m.push(1);
        if prime_poly::is_irreducible(&m, p as u64) {
            return m.into_iter().map(|c| c as u32).collect();
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn decode_digits(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

impl FieldSpec {
    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(e);
        let kind = if e == 1 {
            Kind::Prime
        } else if p == 2 {
            Kind::Binary
        } else {
            Kind::Extension
        };
        let mut spec = FieldSpec {
            p,
            e,
            q,
            modulus,
            kind,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
        };
        spec.build_tables();
        spec
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let e = self.e as usize;
        let da = decode_digits(a as u64, p, e);
        let db = decode_digits(b as u64, p, e);
        let mut prod = vec![0u64; 2 * e];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for deg in (e..2 * e).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.modulus[..e].iter().enumerate() {
                let sub = c * m as u64 % p;
                let idx = deg - e + i;
                prod[idx] = (prod[idx] + p - sub) % p;
            }
        }
        self.encode(&prod[..e])
    }

    fn slow_add(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let e = self.e as usize;
        let da = decode_digits(a as u64, p, e);
        let db = decode_digits(b as u64, p, e);
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
        self.encode(&sum)
    }

    fn encode(&self, digits: &[u64]) -> u32 {
        digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + d) as u32
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let order = (q - 1) as u64;
        let prime_factors: Vec<u64> = if order >= 2 {
            arith::factorize_u64(order)
                .expect("order >= 2")
                .primes()
                .map(|r| r.to_u64().unwrap())
                .collect()
        } else {
            Vec::new()
        };
        let slow_pow = |s: &Self, a: u32, mut n: u64| {
            let mut acc = 1u32;
            let mut base = a;
            while n > 0 {
                if n & 1 == 1 {
                    acc = s.slow_mul(acc, base);
                }
                base = s.slow_mul(base, base);
                n >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .find(|&g| prime_factors.iter().all(|r| slow_pow(self, g, order / r) != 1))
            .expect("multiplicative group is cyclic");
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![NO_LOG; q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = self.slow_mul(x, generator);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        if n == 0 {
            exp[0] = 1;
        }
        self.exp = exp;
        self.log = log;
        if self.kind == Kind::Extension {
            let mut zech = vec![NO_LOG; n];
            for (i, z) in zech.iter_mut().enumerate() {
                let s = self.slow_add(1, self.exp[i]);
                if s != 0 {
                    *z = self.log[s as usize];
                }
            }
            self.zech = zech;
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Field order.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, ascending coefficients, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    /// Serialized header: `p e c_0 c_1 ... c_e`.
    pub fn header(&self) -> String {
        let mut s = format!("{} {}", self.p, self.e);
        for c in &self.modulus {
            s.push(' ');
            s.push_str(&c.to_string());
        }
        s
    }

    pub fn parse_header(text: &str) -> Result<Field> {
        let nums: Vec<u64> = text
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("{t}: {e}"))))
            .collect::<Result<_>>()?;
        if nums.len() < 2 {
            return Err(Error::Parse("field header needs at least p and e".into()));
        }
        let (p, e) = (nums[0], nums[1] as u32);
        if nums.len() == 2 {
            return make_field(p, e);
        }
        if nums.len() != e as usize + 3 {
            return Err(Error::Parse("modulus length does not match e".into()));
        }
        let modulus: Vec<u32> = nums[2..].iter().map(|&c| c as u32).collect();
        make_field_with_modulus(p, &modulus)
    }

    #[inline]
    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self.kind {
            Kind::Prime => {
                let s = a + b;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            }
            Kind::Binary => a ^ b,
            Kind::Extension => {
                if a == 0 {
                    return b;
                }
                if b == 0 {
                    return a;
                }
                let (la, lb) = (self.log[a as usize], self.log[b as usize]);
                let (lo, hi) = if la <= lb { (la, lb) } else { (lb, la) };
                let z = self.zech[(hi - lo) as usize];
                if z == NO_LOG {
                    0
                } else {
                    self.exp[(lo + z) as usize]
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match self.kind {
            Kind::Prime => {
                if a == 0 {
                    0
                } else {
                    self.p - a
                }
            }
            Kind::Binary => a,
            Kind::Extension => {
                if a == 0 {
                    0
                } else {
                    let half = (self.q - 1) / 2;
                    self.exp[(self.log[a as usize] + half) as usize]
                }
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        match self.kind {
            Kind::Prime => ((a as u64 * b as u64) % self.p as u64) as u32,
            _ => self.exp[(self.log[a as usize] + self.log[b as usize]) as usize],
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        let l = self.log[a as usize];
        Some(self.exp[((n - l) % n.max(1)) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow_u64(&self, a: u32, n: u64) -> u32 {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * (n % order)) % order;
        self.exp[l as usize]
    }

    pub fn pow(&self, a: u32, n: &BigUint) -> u32 {
        if n.is_zero() {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = BigUint::from(self.q - 1);
        let reduced = (n % &order).to_u64().expect("reduced below q - 1");
        self.pow_u64(a, reduced)
    }

    /// `a ↦ a^p`.
    #[inline]
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow_u64(a, self.p as u64)
    }

    /// `a ↦ a^(p^j)`.
    pub fn frobenius_power(&self, a: u32, j: u32) -> u32 {
        self.pow_u64(a, (self.p as u64).pow(j))
    }

    /// Logarithm to the table generator, `None` for zero.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// The table generator of the multiplicative group.
    pub fn primitive_element(&self) -> u32 {
        self.exp[if self.q > 2 { 1 } else { 0 }]
    }

    pub fn is_square(&self, a: u32) -> bool {
        if a == 0 || self.p == 2 {
            return true;
        }
        self.log[a as usize].is_multiple_of(2)
    }

    /// Smallest non-square by encoding (odd characteristic only).
    pub fn smallest_nonsquare(&self) -> Option<u32> {
        (1..self.q).find(|&a| !self.is_square(a))
    }

    /// Embeds an element of the prime subfield.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn element(self: &Arc<Self>, value: u32) -> Result<FieldElement> {
        if !self.contains(value) {
            return Err(Error::InvalidArgument(format!(
                "{value} is not an element of GF({})",
                self.q
            )));
        }
        Ok(FieldElement {
            field: self.clone(),
            value,
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

/// A field element bound to its field.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.value, self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.field == *other.field
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: u32) -> Self {
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        self.field
            .inv(self.value)
            .map(|v| self.with(v))
            .ok_or(Error::ZeroInverse)
    }

    pub fn pow(&self, n: &BigUint) -> Self {
        self.with(self.field.pow(self.value, n))
    }

    pub fn frobenius(&self) -> Self {
        self.with(self.field.frobenius(self.value))
    }

    /// `a ↦ a^r` for `r = p^j`; with `r = sqrt(q)` this is the involution
    /// used for Hermitian forms over `F_{r^2}`.
    pub fn frobenius_power(&self, j: u32) -> Self {
        self.with(self.field.frobenius_power(self.value, j))
    }
}

/// Polynomial helpers over a prime field, used to pick and verify moduli.
pub(crate) mod prime_poly {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        crate::arith::pow_mod_u64(a, p - 2, p)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let c = r.last().copied().unwrap() * lead_inv % p;
            let shift = r.len() - 1 - dm;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
                }
            }
            r.pop();
        }
        trim(r)
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    fn is_zero(a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !is_zero(&b) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^(p^j) mod m`.
    fn x_frob(m: &[u64], p: u64, j: u32) -> Vec<u64> {
        let mut x = rem(&[0, 1], m, p);
        for _ in 0..j {
            let mut acc = vec![1u64];
            let mut base = x.clone();
            let mut n = p;
            while n > 0 {
                if n & 1 == 1 {
                    acc = mul_mod(&acc, &base, m, p);
                }
                base = mul_mod(&base, &base, m, p);
                n >>= 1;
            }
            x = acc;
        }
        x
    }

    fn minus_x(a: &[u64], p: u64) -> Vec<u64> {
        let mut v = a.to_vec();
        if v.len() < 2 {
            v.resize(2, 0);
        }
        v[1] = (v[1] + p - 1) % p;
        trim(v)
    }

    /// Rabin's irreducibility test for a monic `m` over `F_p`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let n = (m.len() - 1) as u32;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        if m[0] == 0 {
            return false;
        }
        if !is_zero(&minus_x(&x_frob(m, p, n), p)) {
            return false;
        }
        let factors = crate::arith::factorize_u64(n as u64).expect("n >= 2");
        for r in factors.primes() {
            let r = num_traits::ToPrimitive::to_u32(r).unwrap();
            let h = minus_x(&x_frob(m, p, n / r), p);
            let g = gcd(m, &h, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}
