//! The classical groups SL, SU, Sp and SO as matrix groups with a fixed
//! Gram matrix: orders, membership, uniform sampling and enumeration.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::arith::prime_power;
use crate::error::{Error, Result};
use crate::field::{make_field, Field};
use crate::matrix::{rref, Matrix, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    SL,
    SU,
    Sp,
    SOodd,
    SOplus,
    SOminus,
}

impl Family {
    pub fn is_unitary(self) -> bool {
        self == Family::SU
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, Family::SOodd | Family::SOplus | Family::SOminus)
    }

    /// Symplectic and orthogonal groups: the families with `alpha = 2`.
    pub fn is_isometry_type(self) -> bool {
        matches!(
            self,
            Family::Sp | Family::SOodd | Family::SOplus | Family::SOminus
        )
    }
}

/// One row of the table of classical groups, with a fixed form.
#[derive(Clone)]
pub struct GroupSpec {
    family: Family,
    n: usize,
    q: u64,
    p: u64,
    e: u32,
    field: Field,
    form: Option<Matrix>,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.n == other.n && self.q == other.q
    }
}

impl Eq for GroupSpec {}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::SL => write!(f, "SL:{}:{}", self.n, self.q),
            Family::SU => write!(f, "SU:{}:{}", self.n, self.q),
            Family::Sp => write!(f, "Sp:{}:{}", self.n, self.q),
            Family::SOodd => write!(f, "SO:odd:{}:{}", self.n, self.q),
            Family::SOplus => write!(f, "SO:+:{}:{}", self.n, self.q),
            Family::SOminus => write!(f, "SO:-:{}:{}", self.n, self.q),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `SL:n:q`, `SU:n:q`, `Sp:n:q`, `SO:odd:n:q`, `SO:+:n:q`, `SO:-:n:q`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidSpec(format!("cannot parse group `{s}`"));
        let (family, rest) = match parts.as_slice() {
            ["SL", rest @ ..] => (Family::SL, rest),
            ["SU", rest @ ..] => (Family::SU, rest),
            ["Sp", rest @ ..] => (Family::Sp, rest),
            ["SO", "odd", rest @ ..] => (Family::SOodd, rest),
            ["SO", "+", rest @ ..] => (Family::SOplus, rest),
            ["SO", "-", rest @ ..] => (Family::SOminus, rest),
            _ => return Err(bad()),
        };
        let [n, q] = rest else {
            return Err(bad());
        };
        let n = n.parse::<usize>().map_err(|_| bad())?;
        let q = q.parse::<u64>().map_err(|_| bad())?;
        GroupSpec::new(family, n, q)
    }
}

fn hyperbolic(field: &Field) -> Matrix {
    Matrix::from_raw(field, 2, vec![0, 1, 1, 0])
}

impl GroupSpec {
    pub fn new(family: Family, n: usize, q: u64) -> Result<Self> {
        let (p, e) =
            prime_power(q).ok_or_else(|| Error::InvalidSpec(format!("{q} is not a prime power")))?;
        if n == 0 {
            return Err(Error::InvalidSpec("rank parameter must be positive".into()));
        }
        if family.is_orthogonal() && p == 2 {
            return Err(Error::InvalidSpec(
                "orthogonal groups are supported only for odd q".into(),
            ));
        }
        let field = if family.is_unitary() {
            make_field(p, 2 * e)
        } else {
            make_field(p, e)
        }
        .map_err(|err| Error::InvalidSpec(err.to_string()))?;
        let form = standard_form_for(family, n, &field);
        Ok(GroupSpec {
            family,
            n,
            q,
            p,
            e,
            field,
            form,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Dimension of the natural module.
    pub fn d(&self) -> usize {
        match self.family {
            Family::SL | Family::SU => self.n,
            Family::Sp | Family::SOplus | Family::SOminus => 2 * self.n,
            Family::SOodd => 2 * self.n + 1,
        }
    }

    pub fn alpha(&self) -> u32 {
        if self.family.is_isometry_type() {
            2
        } else {
            1
        }
    }

    pub fn delta(&self) -> u32 {
        if self.family.is_unitary() {
            2
        } else {
            1
        }
    }

    pub fn epsilon(&self) -> i32 {
        if self.family.is_unitary() {
            -1
        } else {
            1
        }
    }

    /// The field of the matrix entries (`F_{q^2}` for SU).
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Gram matrix of the preserved form, `None` for SL.
    pub fn standard_form(&self) -> Option<&Matrix> {
        self.form.as_ref()
    }

    /// Entrywise `a ↦ a^q` for SU, identity otherwise.
    pub fn conjugate_entries(&self, m: &Matrix) -> Matrix {
        if self.family.is_unitary() {
            let q = self.q;
            m.map_entries(|a| self.field.pow_u64(a, q))
        } else {
            m.clone()
        }
    }

    fn conj_scalar(&self, a: u32) -> u32 {
        if self.family.is_unitary() {
            self.field.pow_u64(a, self.q)
        } else {
            a
        }
    }

    /// `x^* F y` where `*` is transpose, composed with conjugation for SU.
    fn pair(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = &self.field;
        let gram = self.form.as_ref().expect("form");
        let fy = gram.mul_vec(y);
        x.iter()
            .zip(&fy)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(self.conj_scalar(a), b)))
    }

    pub fn order(&self) -> BigUint {
        group_order(self)
    }
}

pub fn group_order(spec: &GroupSpec) -> BigUint {
    let q = BigUint::from(spec.q);
    let n = spec.n as u32;
    let qpow = |i: u32| q.pow(i);
    let one = BigUint::one();
    match spec.family {
        Family::SL => {
            let mut o = qpow(n * (n - 1) / 2);
            for i in 2..=n {
                o *= qpow(i) - &one;
            }
            o
        }
        Family::SU => {
            let mut o = qpow(n * (n - 1) / 2);
            for i in 2..=n {
                o *= if i % 2 == 0 {
                    qpow(i) - &one
                } else {
                    qpow(i) + &one
                };
            }
            o
        }
        Family::Sp | Family::SOodd => {
            let mut o = qpow(n * n);
            for i in 1..=n {
                o *= qpow(2 * i) - &one;
            }
            o
        }
        Family::SOplus | Family::SOminus => {
            let mut o = qpow(n * (n - 1));
            o *= if spec.family == Family::SOplus {
                qpow(n) - &one
            } else {
                qpow(n) + &one
            };
            for i in 1..n {
                o *= qpow(2 * i) - &one;
            }
            o
        }
    }
}

fn standard_form_for(family: Family, n: usize, field: &Field) -> Option<Matrix> {
    let f = field;
    let block = |blocks: Vec<Matrix>| Matrix::block_diagonal(&blocks).expect("same field");
    match family {
        Family::SL => None,
        Family::SU => Some(Matrix::identity(f, n)),
        Family::Sp => {
            let j = Matrix::from_raw(f, 2, vec![0, 1, f.neg(1), 0]);
            Some(block(vec![j; n]))
        }
        Family::SOodd => {
            let mut b = vec![hyperbolic(f); n];
            b.push(Matrix::identity(f, 1));
            Some(block(b))
        }
        Family::SOplus => Some(block(vec![hyperbolic(f); n])),
        Family::SOminus => {
            let nu = f.smallest_nonsquare().expect("odd characteristic");
            let mut b = vec![hyperbolic(f); n - 1];
            b.push(Matrix::diagonal(f, &[1, f.neg(nu)]));
            Some(block(b))
        }
    }
}

pub fn standard_form(spec: &GroupSpec) -> Option<Matrix> {
    spec.form.clone()
}

fn check_shape(spec: &GroupSpec, m: &Matrix) -> Result<()> {
    if **m.field() != *spec.field {
        return Err(Error::FieldMismatch);
    }
    if m.dim() != spec.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            got: m.dim(),
        });
    }
    Ok(())
}

pub fn is_member(spec: &GroupSpec, m: &Matrix) -> Result<bool> {
    check_shape(spec, m)?;
    if m.det() != 1 {
        return Ok(false);
    }
    Ok(match &spec.form {
        None => true,
        Some(gram) => spec.conjugate_entries(m).transpose().mul(gram).mul(m) == *gram,
    })
}

fn random_vector<R: Rng + ?Sized>(field: &Field, d: usize, rng: &mut R) -> Vec<u32> {
    (0..d).map(|_| rng.gen_range(0..field.q())).collect()
}

fn sample_sl<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Matrix {
    let f = &spec.field;
    let d = spec.d();
    loop {
        let data = random_vector(f, d * d, rng);
        let mut m = Matrix::from_raw(f, d, data);
        let det = m.det();
        if det == 0 {
            continue;
        }
        let s = f.inv(det).unwrap();
        for j in 0..d {
            m.set(0, j, f.mul(m.get(0, j), s));
        }
        return m;
    }
}

/// Uniform element of the full isometry group of the form: the columns
/// are chosen one at a time, each uniformly among the vectors with the
/// prescribed pairings against the earlier columns and itself.
fn sample_isometry<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Matrix {
    let f = &spec.field;
    let d = spec.d();
    let gram = spec.form.as_ref().expect("form");
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(d);
    // rows of the linear constraints: c_i · v = gram[i][j]
    let mut constraint_rows: Vec<Vec<u32>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut system: Vec<Vec<u32>> = constraint_rows
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut row = c.clone();
                row.push(gram.get(i, j));
                row
            })
            .collect();
        let pivots = rref(f, &mut system);
        debug_assert!(pivots.last().is_none_or(|&p| p < d));
        let mut particular = vec![0u32; d];
        for (r, &pc) in pivots.iter().enumerate() {
            particular[pc] = system[r][d];
        }
        let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
        let span = Subspace::from_vectors(f, d, cols.clone());
        let v = loop {
            let mut v = particular.clone();
            for &fc in &free {
                let t = rng.gen_range(0..f.q());
                if t == 0 {
                    continue;
                }
                v[fc] = f.add(v[fc], t);
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.sub(v[pc], f.mul(t, system[r][fc]));
                }
            }
            if spec.pair(&v, &v) != gram.get(j, j) {
                continue;
            }
            if v.iter().all(|&a| a == 0) || span.contains(&v) {
                continue;
            }
            break v;
        };
        // pairing of v against later columns, as a linear functional
        let conj_v: Vec<u32> = v.iter().map(|&a| spec.conj_scalar(a)).collect();
        let row = gram.transpose().mul_vec(&conj_v);
        constraint_rows.push(row);
        cols.push(v);
    }
    Matrix::from_columns(f, &cols).expect("square")
}

/// A fixed reflection of determinant `-1` in the orthogonal group.
fn reflection(spec: &GroupSpec) -> Matrix {
    let f = &spec.field;
    let d = spec.d();
    let gram = spec.form.as_ref().expect("form");
    // e_0 + e_1 is anisotropic for every form used here
    let mut u = vec![0u32; d];
    if d == 1 {
        u[0] = 1;
    } else {
        u[0] = 1;
        u[1] = 1;
    }
    let norm = spec.pair(&u, &u);
    debug_assert_ne!(norm, 0);
    let coef = f.div(f.from_int(2), norm).unwrap();
    let fu = gram.mul_vec(&u);
    let mut m = Matrix::identity(f, d);
    for i in 0..d {
        for j in 0..d {
            let t = f.mul(coef, f.mul(u[i], fu[j]));
            m.set(i, j, f.sub(m.get(i, j), t));
        }
    }
    m
}

/// An exactly uniform element of the group.
pub fn sample_uniform<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> Matrix {
    match spec.family {
        Family::SL => sample_sl(spec, rng),
        Family::Sp => sample_isometry(spec, rng),
        Family::SU => {
            let f = &spec.field;
            let mut g = sample_isometry(spec, rng);
            let det = g.det();
            if det != 1 {
                // diag(det^-1, 1, ..., 1) is unitary for the identity Gram
                let s = f.inv(det).unwrap();
                for j in 0..g.dim() {
                    g.set(0, j, f.mul(g.get(0, j), s));
                }
            }
            g
        }
        Family::SOodd | Family::SOplus | Family::SOminus => {
            let g = sample_isometry(spec, rng);
            if g.det() == 1 {
                g
            } else {
                reflection(spec).mul(&g)
            }
        }
    }
}

const ENUMERATION_ATTEMPTS: usize = 32;

/// Every element of the group, by breadth-first closure from random
/// generators. The identity comes first; order is deterministic given the
/// rng state.
pub fn enumerate<R: Rng + ?Sized>(spec: &GroupSpec, cap: u64, rng: &mut R) -> Result<Vec<Matrix>> {
    let order = group_order(spec);
    if order > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            order: order.to_string(),
            cap,
        });
    }
    let order = order.to_usize().expect("below cap");
    let f = &spec.field;
    let d = spec.d();
    for attempt in 0..ENUMERATION_ATTEMPTS {
        let ngens = if attempt < ENUMERATION_ATTEMPTS / 2 { 2 } else { 3 };
        let gens: Vec<Matrix> = (0..ngens).map(|_| sample_uniform(spec, rng)).collect();
        let id = Matrix::identity(f, d);
        let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(order);
        seen.insert(id.data().to_vec());
        let mut elems = vec![id];
        let mut head = 0;
        while head < elems.len() && elems.len() < order {
            let x = elems[head].clone();
            head += 1;
            for g in &gens {
                let y = x.mul(g);
                if seen.insert(y.data().to_vec()) {
                    elems.push(y);
                }
            }
        }
        if elems.len() == order {
            return Ok(elems);
        }
    }
    Err(Error::ClosureStagnation {
        attempts: ENUMERATION_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(group_order(&spec("SL:2:2")), BigUint::from(6u32));
        assert_eq!(group_order(&spec("SL:3:2")), BigUint::from(168u32));
        assert_eq!(group_order(&spec("SO:odd:1:3")), BigUint::from(24u32));
        assert_eq!(group_order(&spec("Sp:2:3")), BigUint::from(51840u32));
        assert_eq!(group_order(&spec("SU:2:2")), BigUint::from(6u32));
        assert_eq!(group_order(&spec("SU:3:2")), BigUint::from(216u32));
        assert_eq!(group_order(&spec("SO:+:1:5")), BigUint::from(4u32));
        assert_eq!(group_order(&spec("SO:-:1:5")), BigUint::from(6u32));
        assert_eq!(group_order(&spec("SO:+:2:3")), BigUint::from(576u32));
        assert_eq!(group_order(&spec("SO:-:2:3")), BigUint::from(720u32));
    }

    #[test]
    fn parameters() {
        let s = spec("SU:7:2");
        assert_eq!((s.d(), s.alpha(), s.delta(), s.epsilon()), (7, 1, 2, -1));
        assert_eq!(s.field().q(), 4);
        let s = spec("SO:odd:6:3");
        assert_eq!((s.d(), s.alpha(), s.delta(), s.epsilon()), (13, 2, 1, 1));
        let s = spec("Sp:6:2");
        assert_eq!((s.d(), s.alpha(), s.delta()), (12, 2, 1));
        assert_eq!(s.to_string(), "Sp:6:2");
        assert_eq!(spec("SO:-:3:5").to_string(), "SO:-:3:5");
    }

    #[test]
    fn invalid_specs() {
        for bad in ["SO:odd:2:4", "SL:3:6", "SL:0:2", "GL:2:2", "SO:2:3", "SL:2", "SU:x:2"] {
            assert!(matches!(bad.parse::<GroupSpec>(), Err(Error::InvalidSpec(_))), "{bad}");
        }
    }

    #[test]
    fn forms() {
        let s = spec("Sp:1:3");
        let f = s.field().clone();
        assert_eq!(
            s.standard_form().unwrap(),
            &Matrix::from_rows(&f, &[vec![0, 1], vec![2, 0]]).unwrap()
        );
        let s = spec("SU:2:2");
        assert!(s.standard_form().unwrap().is_identity());
        let s = spec("SO:-:1:3");
        for x in 0..3u32 {
            for y in 0..3u32 {
                if (x, y) != (0, 0) {
                    assert_ne!(s.pair(&[x, y], &[x, y]), 0);
                }
            }
        }
        assert!(spec("SL:3:2").standard_form().is_none());
    }

    #[test]
    fn membership_examples() {
        for s in ["SL:3:2", "SU:3:3", "Sp:2:5", "SO:odd:2:3", "SO:+:2:3", "SO:-:2:5"] {
            let s = spec(s);
            assert!(is_member(&s, &Matrix::identity(s.field(), s.d())).unwrap());
        }
        let s = spec("SL:2:3");
        assert!(!is_member(&s, &Matrix::diagonal(s.field(), &[1, 2])).unwrap());
        let s = spec("Sp:1:3");
        assert!(is_member(&s, &Matrix::diagonal(s.field(), &[2, 2])).unwrap());
        let wrong = Matrix::identity(s.field(), 3);
        assert!(is_member(&s, &wrong).is_err());
    }

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in [
            "SL:4:3", "SU:3:2", "SU:4:3", "Sp:3:2", "Sp:2:5", "SO:odd:2:3", "SO:+:2:5",
            "SO:-:3:3", "SO:odd:1:7", "SO:-:1:3", "SU:1:4",
        ] {
            let s = spec(s);
            for _ in 0..200 {
                let g = sample_uniform(&s, &mut rng);
                assert!(is_member(&s, &g).unwrap(), "{s}");
            }
        }
    }

    #[test]
    fn enumeration_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (s, n) in [
            ("SL:2:2", 6),
            ("SL:2:3", 24),
            ("SL:3:2", 168),
            ("SO:odd:1:3", 24),
            ("SU:3:2", 216),
            ("SO:-:2:3", 720),
        ] {
            let s = spec(s);
            let all = enumerate(&s, 100_000, &mut rng).unwrap();
            assert_eq!(all.len(), n);
            assert!(all.iter().all(|g| is_member(&s, g).unwrap()));
        }
        assert!(matches!(
            enumerate(&spec("SL:4:3"), 1000, &mut rng),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn sampling_sl23_counts_are_balanced() {
        let s = spec("SL:2:3");
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..24_000 {
            *counts.entry(sample_uniform(&s, &mut rng).data().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 24);
        assert!(counts.values().all(|&c| (800..=1200).contains(&c)));
    }
}
