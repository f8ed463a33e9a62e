//! Integer arithmetic: factorization, Euler's totient, primitive prime
//! divisors and r-parts.
//!
//! Factorization is trial division by the primes below 10^6, followed by
//! Brent's variant of Pollard rho on whatever cofactor remains. Primality of
//! cofactors is decided by Miller-Rabin with fixed bases; the base set is
//! deterministic below 3.3 * 10^24, which covers every cofactor the group
//! computations produce.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(TRIAL_LIMIT))
}

/// Primes strictly below `limit`.
pub fn sieve(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// A natural number together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredNat {
    value: BigUint,
    factors: BTreeMap<BigUint, u32>,
}

impl FactoredNat {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Prime → exponent, primes ascending.
    pub fn factors(&self) -> &BTreeMap<BigUint, u32> {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.keys()
    }

    pub fn exponent_of(&self, r: &BigUint) -> u32 {
        self.factors.get(r).copied().unwrap_or(0)
    }
}

impl std::fmt::Display for FactoredNat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (p, e) in &self.factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn factorize_u64(n: u64) -> Result<FactoredNat> {
    factorize_nat(&BigUint::from(n))
}

/// Complete prime factorization of `n >= 2`.
pub fn factorize_nat(n: &BigUint) -> Result<FactoredNat> {
    if *n < BigUint::from(2u32) {
        return Err(Error::InvalidArgument(format!(
            "factorize_nat requires N >= 2, got {n}"
        )));
    }
    let mut factors = BTreeMap::new();
    let mut rest = n.clone();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.insert(pb, e);
        }
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_prime(&m) {
                *factors.entry(m).or_insert(0) += 1;
                continue;
            }
            let d = find_divisor(&m);
            let other = &m / &d;
            stack.push(d);
            stack.push(other);
        }
    }
    Ok(FactoredNat {
        value: n.clone(),
        factors,
    })
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin primality test with fixed bases.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &a in &MR_BASES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Nontrivial divisor of a composite `n` by Pollard-Brent.
fn find_divisor(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    if let Some(small) = n.to_u64() {
        for c in 1.. {
            if let Some(d) = brent_u64(small, c) {
                return BigUint::from(d);
            }
        }
    }
    for c in 1u64.. {
        if let Some(d) = brent_big(n, &BigUint::from(c)) {
            return d;
        }
    }
    unreachable!()
}

fn brent_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut x;
    let mut ys;
    let m = 128u64;
    let mut g;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
            if k >= r || g != 1 {
                break;
            }
        }
        r *= 2;
        if g != 1 {
            break;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g != 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigUint, c: &BigUint) -> Option<BigUint> {
    let f = |x: &BigUint| (x * x + c) % n;
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut x;
    let mut ys;
    let m = 128u64;
    let mut g;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (&q * absdiff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += m;
            if k >= r || !g.is_one() {
                break;
            }
        }
        r *= 2;
        if !g.is_one() {
            break;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = absdiff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Euler's totient.
pub fn euler_phi(m: u64) -> u64 {
    if m <= 1 {
        return 1;
    }
    let f = factorize_u64(m).expect("m >= 2");
    f.factors().iter().fold(m, |acc, (p, _)| {
        let p = p.to_u64().expect("prime factor of a u64");
        acc / p * (p - 1)
    })
}

/// Largest power of `r` dividing `n` (1 when `r` does not divide `n`).
pub fn r_part(n: &BigUint, r: &BigUint) -> BigUint {
    let mut out = BigUint::one();
    if n.is_zero() || r <= &BigUint::one() {
        return out;
    }
    let mut rest = n.clone();
    loop {
        let (q, rem) = rest.div_rem(r);
        if !rem.is_zero() {
            return out;
        }
        out *= r;
        rest = q;
    }
}

/// Exponent of `r` in `n`, together with the `r`-free cofactor.
pub fn split_r(n: &BigUint, r: &BigUint) -> (u32, BigUint) {
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, rem) = rest.div_rem(r);
        if !rem.is_zero() || rest.is_zero() {
            return (v, rest);
        }
        v += 1;
        rest = q;
    }
}

/// Multiplicative order of `a` modulo the prime `r` (requires `r ∤ a`).
pub fn multiplicative_order(a: &BigUint, r: &BigUint) -> BigUint {
    let one = BigUint::one();
    let group = r - &one;
    if group.is_one() {
        return one;
    }
    let mut order = group.clone();
    let f = factorize_nat(&group).expect("r - 1 >= 2");
    for (p, &e) in f.factors() {
        for _ in 0..e {
            let cand = &order / p;
            if a.modpow(&cand, r).is_one() {
                order = cand;
            } else {
                break;
            }
        }
    }
    order
}

fn mobius(n: u64) -> i32 {
    if n == 1 {
        return 1;
    }
    let f = factorize_u64(n).expect("n >= 2");
    if f.factors().values().any(|&e| e > 1) {
        0
    } else if f.factors().len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let upper: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&e| e * e != n).collect();
    out.extend(upper);
    out
}

/// The cyclotomic value Φ_m(q), evaluated via the Möbius product over the
/// divisors of `m`.
pub fn cyclotomic_value(q: u64, m: u64) -> BigUint {
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for d in divisors(m) {
        let term = qb.pow(d as u32) - 1u32;
        match mobius(m / d) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

/// Primitive prime divisors of `q^m - 1`, ascending.
///
/// Every such prime divides Φ_m(q), so only that value is factored; each
/// candidate is then kept when the multiplicative order of `q` modulo it is
/// exactly `m`.
pub fn ppd_primes(q: u64, m: u64) -> Vec<BigUint> {
    if q < 2 || m == 0 {
        return Vec::new();
    }
    let phi = cyclotomic_value(q, m);
    if phi < BigUint::from(2u32) {
        return Vec::new();
    }
    let qb = BigUint::from(q);
    let mb = BigUint::from(m);
    let f = factorize_nat(&phi).expect("phi >= 2");
    f.primes()
        .filter(|r| !(&qb % *r).is_zero() && multiplicative_order(&qb, r) == mb)
        .cloned()
        .collect()
}

/// Smallest `beta` with `p^beta >= n` (that is, the ceiling of `log_p n`).
pub fn ceil_log(p: u64, n: u64) -> u32 {
    let mut beta = 0;
    let mut acc: u128 = 1;
    while acc < n as u128 {
        acc *= p as u128;
        beta += 1;
    }
    beta
}

/// Splits a prime power `q = p^e`; `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factorize_u64(q).ok()?;
    if f.factors().len() != 1 {
        return None;
    }
    let (p, e) = f.factors().iter().next()?;
    Some((p.to_u64()?, *e))
}
