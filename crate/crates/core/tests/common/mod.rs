//! Deliberately simple reference implementations used as test oracles.
//! Only field arithmetic and matrix entry access come from the library.

#![allow(dead_code)]

use itertools::Itertools;
use qkset::classify::Tier;
use qkset::{Field, GroupSpec, Matrix};

/// Polynomial with ascending coefficients, no trailing zeros.
pub type P = Vec<u32>;

pub fn trim(mut a: P) -> P {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn padd(f: &Field, a: &P, b: &P) -> P {
    let n = a.len().max(b.len());
    trim((0..n)
        .map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect())
}

pub fn pmul(f: &Field, a: &P, b: &P) -> P {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient if `b` divides `a` exactly.
pub fn pdiv_exact(f: &Field, a: &P, b: &P) -> Option<P> {
    let mut r = a.clone();
    if b.len() > r.len() {
        return r.is_empty().then(Vec::new);
    }
    let lead_inv = f.inv(*b.last().unwrap()).unwrap();
    let mut quot = vec![0; r.len() - b.len() + 1];
    for i in (0..quot.len()).rev() {
        let c = f.mul(r[i + b.len() - 1], lead_inv);
        quot[i] = c;
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = f.sub(r[i + j], f.mul(c, y));
        }
    }
    trim(r).is_empty().then(|| trim(quot))
}

fn sign(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// `det(xI - M)` by the Leibniz expansion.
pub fn char_poly_leibniz(m: &Matrix) -> P {
    let f = m.field();
    let d = m.dim();
    let entry = |i: usize, j: usize| -> P {
        let c = f.neg(m.get(i, j));
        trim(if i == j { vec![c, 1] } else { vec![c] })
    };
    let mut total: P = vec![];
    for perm in (0..d).permutations(d) {
        let mut term: P = vec![1];
        for (i, &j) in perm.iter().enumerate() {
            term = pmul(f, &term, &entry(j, i));
            if term.is_empty() {
                break;
            }
        }
        if !sign(&perm) {
            term = term.iter().map(|&c| f.neg(c)).collect();
        }
        total = padd(f, &total, &term);
    }
    total
}

fn monic_polys(q: u32, deg: usize) -> impl Iterator<Item = P> {
    (0..(q as u64).pow(deg as u32)).map(move |mut code| {
        let mut c = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            c.push((code % q as u64) as u32);
            code /= q as u64;
        }
        c.push(1);
        c
    })
}

/// Factorization of a monic polynomial by trial division with monic
/// polynomials of increasing degree.
pub fn factor_trial(f: &Field, poly: &P) -> Vec<(P, usize)> {
    let mut rest = poly.clone();
    let mut out = Vec::new();
    let mut deg = 1;
    while 2 * deg <= rest.len().saturating_sub(1) {
        for g in monic_polys(f.q(), deg) {
            let mut count = 0;
            while let Some(quot) = pdiv_exact(f, &rest, &g) {
                rest = quot;
                count += 1;
            }
            if count > 0 {
                out.push((g, count));
            }
        }
        deg += 1;
    }
    if rest.len() > 1 {
        match out.iter_mut().find(|(g, _)| *g == rest) {
            Some(e) => e.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out
}

pub fn reciprocal(f: &Field, g: &P) -> P {
    let mut r: P = g.iter().rev().copied().collect();
    let s = f.inv(*r.last().unwrap()).unwrap();
    r.iter_mut().for_each(|c| *c = f.mul(*c, s));
    r
}

fn matmul(a: &Matrix, b: &Matrix) -> Vec<u32> {
    let f = a.field();
    let d = a.dim();
    let mut out = vec![0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0;
            for k in 0..d {
                s = f.add(s, f.mul(a.get(i, k), b.get(k, j)));
            }
            out[i * d + j] = s;
        }
    }
    out
}

/// Order by repeated multiplication.
pub fn element_order(g: &Matrix) -> u64 {
    let d = g.dim();
    let identity: Vec<u32> = (0..d * d).map(|i| u32::from(i / d == i % d)).collect();
    let mut cur = g.clone();
    let mut n = 1;
    while cur.data() != identity.as_slice() {
        cur = Matrix::from_rows(
            g.field(),
            &matmul(&cur, g).chunks(d).map(|r| r.to_vec()).collect::<Vec<_>>(),
        )
        .unwrap();
        n += 1;
    }
    n
}

pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes dividing `q^m - 1` and no `q^i - 1` with `i < m`.
pub fn ppd_brute(q: u128, m: u32) -> Vec<u128> {
    let n = q.pow(m) - 1;
    prime_factors(n)
        .into_iter()
        .filter(|&r| (1..m).all(|i| (q.pow(i) - 1) % r != 0))
        .collect()
}

fn valuation(mut n: u128, r: u128) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(r) {
        n /= r;
        v += 1;
    }
    v
}

/// Tier of `g` at level `k`, straight from the definitions.
pub fn naive_tier(spec: &GroupSpec, g: &Matrix, k: usize, group_size: u128) -> Tier {
    let f = g.field();
    let cp = char_poly_leibniz(g);
    let factors = factor_trial(f, &cp);
    let info: Vec<(usize, usize, bool)> = factors
        .iter()
        .map(|(p, mult)| (p.len() - 1, *mult, reciprocal(f, p) == *p))
        .collect();
    let is_qk = if spec.alpha() == 2 {
        let sc: Vec<_> = info.iter().filter(|(d, _, s)| *s && d % (2 * k) == 0).collect();
        let other = info.iter().any(|(d, _, s)| !*s && d % k == 0);
        sc.len() == 1 && sc[0].0 == 2 * k && sc[0].1 == 1 && !other
    } else {
        let div: Vec<_> = info.iter().filter(|(d, _, _)| d % k == 0).collect();
        let odd_ok = spec.delta() == 1 || k % 2 == 1;
        odd_ok && div.len() == 1 && div[0].0 == k && div[0].1 == 1
    };
    if !is_qk {
        return Tier::None;
    }
    let m = spec.delta() * spec.alpha() * k as u32;
    let q = spec.q() as u128;
    let ppds = ppd_brute(q, m);
    let ord = element_order(g) as u128;
    if !ppds.iter().any(|r| ord.is_multiple_of(*r)) {
        return Tier::Qk;
    }
    let qm1 = q.pow(m) - 1;
    let full = ppds
        .iter()
        .filter(|&&r| group_size.is_multiple_of(r))
        .all(|&r| valuation(ord, r) == valuation(qm1, r));
    if full {
        Tier::Full
    } else {
        Tier::Ppd
    }
}
