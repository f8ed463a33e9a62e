//! Exact cycle-type proportions in symmetric groups and the bound formulas
//! for the proportion of `Q_k` elements.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{Family, GroupSpec};

/// Slack used when comparing exact values against bounds evaluated in
/// floating point.
pub const BOUND_SLACK: f64 = 1e-12;

pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational num/den"));
    let (n, d) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Number of permutations of `0..=N` with no cycle of length divisible by
/// `m`, for every `N <= n`.
pub fn count_no_m_cycles(n: usize, m: usize) -> Vec<BigUint> {
    assert!(m >= 1);
    let mut c: Vec<BigUint> = Vec::with_capacity(n + 1);
    c.push(BigUint::one());
    for j in 1..=n {
        // c(j) = Σ_{ℓ, m ∤ ℓ} (j-1)!/(j-ℓ)! c(j-ℓ), by Horner in ℓ
        let mut acc = BigUint::zero();
        for l in (1..=j).rev() {
            acc *= (j - l) as u64;
            if l % m != 0 {
                acc += &c[j - l];
            }
        }
        c.push(acc);
    }
    c
}

/// `p_not_m(N)` for every `N <= n`.
pub fn p_not_m_table(n: usize, m: usize) -> Vec<BigRational> {
    let mut fact = BigUint::one();
    count_no_m_cycles(n, m)
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            if j > 0 {
                fact *= j as u64;
            }
            BigRational::new(c.into(), fact.clone().into())
        })
        .collect()
}

/// Proportion of `S_n` with no cycle of length divisible by `m`.
pub fn p_not_m(n: usize, m: usize) -> Result<BigRational> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m = {m} must be at least 2")));
    }
    if m > n {
        return Ok(BigRational::one());
    }
    Ok(p_not_m_table(n, m).pop().unwrap())
}

/// Proportion of `S_n` with exactly one `m`-cycle and no other cycle of
/// length divisible by `m`.
pub fn b_exact(n: usize, m: usize) -> Result<BigRational> {
    if m > n {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("m = {m} must be at least 2")));
        }
        return Ok(BigRational::zero());
    }
    Ok(p_not_m(n - m, m)? / BigRational::from_integer(BigInt::from(m)))
}

pub const BRUTE_FORCE_MAX_N: usize = 9;

/// `b_exact` by enumerating all permutations.
pub fn brute_force_b(n: usize, m: usize) -> Result<BigRational> {
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m = {m} must be at least 2")));
    }
    let mut hits = 0u64;
    for perm in (0..n).permutations(n) {
        let mut seen = vec![false; n];
        let mut exact = 0;
        let mut other = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            if len == m {
                exact += 1;
            } else if len % m == 0 {
                other += 1;
            }
        }
        if exact == 1 && other == 0 {
            hits += 1;
        }
    }
    Ok(BigRational::new(hits.into(), factorial(n).into()))
}

/// Total proportion of the Weyl group classes whose tori carry `Q_k`
/// elements: `b_k(n) / alpha`.
pub fn weyl_class_proportion(family: Family, n: usize, k: usize) -> Result<BigRational> {
    if k < 2 || k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 2..{n}")));
    }
    let b = b_exact(n, k)?;
    Ok(if family.is_isometry_type() {
        b / BigRational::from_integer(2.into())
    } else {
        b
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Qk,
    Ppd,
    Full,
}

impl SetKind {
    pub const ALL: [SetKind; 3] = [SetKind::Qk, SetKind::Ppd, SetKind::Full];
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Qk => "qk",
            SetKind::Ppd => "ppd",
            SetKind::Full => "full",
        })
    }
}

impl FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qk" => Ok(SetKind::Qk),
            "ppd" => Ok(SetKind::Ppd),
            "full" => Ok(SetKind::Full),
            _ => Err(Error::InvalidArgument(format!("unknown set `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// The headline bounds with explicit constants.
    Short,
    /// The general bounds, valid in the whole range of `k`.
    MainA,
    /// The sharper bounds for `ln n < k <= 2 ln n`.
    MainB,
    /// Torus proportion lower bounds.
    Torus,
    /// Bounds on `b_m(n)`.
    Cycle,
    /// The lower bound for a random good `k`.
    Corollary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
    /// The upper bound is strict.
    pub upper_strict: bool,
    pub source: BoundSource,
}

impl BoundInterval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower - BOUND_SLACK && x <= self.upper + BOUND_SLACK
    }
}

fn check_k_positive(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    Ok(())
}

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q = {q} must be at least 2")));
    }
    Ok(())
}

/// Lower bound on the proportion of `Q`-elements in a relevant torus.
pub fn torus_lower_bound(kind: SetKind, q: u64, k: usize, alpha: u32) -> Result<f64> {
    check_k_positive(k)?;
    check_q(q)?;
    let (qf, kf, af) = (q as f64, k as f64, alpha as f64);
    Ok(match kind {
        SetKind::Qk => 1.0 - 2.0 / qf.powf(kf / 2.0),
        SetKind::Ppd => 1.0 - 1.0 / (af * kf),
        SetKind::Full => 2f64.ln() / (kf * (qf + 1.0).ln()),
    })
}

/// The constant replacing the torus bound when `k` is close to `ln n`.
pub fn part_b_constant(kind: SetKind, q: u64, n: usize, alpha: u32) -> Result<f64> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 2")));
    }
    let (qf, l, af) = (q as f64, (n as f64).ln(), alpha as f64);
    Ok(match kind {
        SetKind::Qk => 1.0 - 2.0 / qf.powf(l / 2.0),
        SetKind::Ppd => 1.0 - 1.0 / (af * l),
        SetKind::Full => 2f64.ln() / (2.0 * l * (qf + 1.0).ln()),
    })
}

/// `max(3, ln n) <= k <= n/2`, with `k` odd for the unitary groups.
pub fn in_theorem_range(n: usize, k: usize, unitary: bool) -> bool {
    let kf = k as f64;
    kf >= 3f64.max((n as f64).ln()) && 2 * k <= n && (!unitary || k % 2 == 1)
}

/// `ln n < k <= 2 ln n`.
pub fn in_part_b_range(n: usize, k: usize) -> bool {
    let l = (n as f64).ln();
    (k as f64) > l && (k as f64) <= 2.0 * l
}

fn range_error(n: usize, k: usize) -> Error {
    Error::InvalidArgument(format!("k = {k} outside the admissible range for n = {n}"))
}

pub fn bounds_main(alpha: u32, delta: u32, n: usize, q: u64, k: usize, kind: SetKind) -> Result<BoundInterval> {
    if !in_theorem_range(n, k, delta == 2) {
        return Err(range_error(n, k));
    }
    let ak = (alpha as usize * k) as f64;
    let ell = torus_lower_bound(kind, q, k, alpha)?;
    Ok(BoundInterval {
        lower: ell / (3.0 * E * ak),
        upper: 5.0 / (3.0 * ak),
        upper_strict: false,
        source: BoundSource::MainA,
    })
}

pub fn bounds_main_b(alpha: u32, delta: u32, n: usize, q: u64, k: usize, kind: SetKind) -> Result<BoundInterval> {
    if !in_theorem_range(n, k, delta == 2) || !in_part_b_range(n, k) {
        return Err(range_error(n, k));
    }
    let al = alpha as f64 * (n as f64).ln();
    let m = part_b_constant(kind, q, n, alpha)?;
    Ok(BoundInterval {
        lower: m / (6.0 * E * al),
        upper: 5.0 / (3.0 * al),
        upper_strict: true,
        source: BoundSource::MainB,
    })
}

pub fn bounds_short(alpha: u32, q: u64, k: usize, kind: SetKind) -> Result<BoundInterval> {
    check_k_positive(k)?;
    check_q(q)?;
    let ak = (alpha as usize * k) as f64;
    let lower = match kind {
        SetKind::Qk | SetKind::Ppd => 2.0 / (9.0 * E * ak),
        SetKind::Full => 2.0 / (10.0 * E * ak * k as f64 * (q as f64 + 1.0).ln()),
    };
    Ok(BoundInterval {
        lower,
        upper: 5.0 / (3.0 * ak),
        upper_strict: false,
        source: BoundSource::Short,
    })
}

pub fn corollary_bound(alpha: u32, n: usize) -> Result<f64> {
    if n < 5 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 5")));
    }
    Ok(1.0 / (16.0 * E * alpha as f64 * (n as f64).ln()))
}

/// `(1/(3em), 5/(3m))`, valid for `m >= 3` and `ln n <= m <= n - m`.
pub fn cycle_bounds(m: usize) -> BoundInterval {
    let mf = m as f64;
    BoundInterval {
        lower: 1.0 / (3.0 * E * mf),
        upper: 5.0 / (3.0 * mf),
        upper_strict: false,
        source: BoundSource::Cycle,
    }
}

pub fn in_cycle_bound_range(n: usize, m: usize) -> bool {
    m >= 3 && (m as f64) >= (n as f64).ln() && 2 * m <= n
}

/// The bound a scan of `spec` at level `k` is compared against: the
/// sharper of the general bounds when `k` is admissible, `None` otherwise.
pub fn bounds_for_spec(spec: &GroupSpec, k: usize, kind: SetKind) -> Option<BoundInterval> {
    bounds_main(spec.alpha(), spec.delta(), spec.n(), spec.q(), k, kind).ok()
}
