//! Classification of group elements by the irreducible factors of their
//! characteristic polynomials, with the power-up witness.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::arith::{ceil_log, ppd_primes, r_part, split_r};
use crate::error::{Error, Result};
use crate::groups::{group_order, GroupSpec};
use crate::matrix::Matrix;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorInfo {
    pub poly: Poly,
    pub degree: usize,
    pub multiplicity: usize,
    pub self_conjugate: bool,
    /// Index of the conjugate factor when it differs from this one.
    pub partner: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPolyProfile {
    pub factors: Vec<FactorInfo>,
    pub d: usize,
}

impl CharPolyProfile {
    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.degree).collect()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity).max().unwrap_or(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    None,
    Qk,
    Ppd,
    Full,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::None => "none",
            Tier::Qk => "qk",
            Tier::Ppd => "ppd",
            Tier::Full => "full",
        })
    }
}

/// What powering by `B` produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PowerStructure {
    pub eigenspace_dim: usize,
    pub complement_dim: usize,
    pub irreducible: bool,
}

impl PowerStructure {
    /// Description of the failure when the 1-eigenspace of `g^B` has the
    /// wrong dimension.
    pub fn violation(&self, spec: &GroupSpec, k: usize) -> Option<String> {
        let expected = spec.d() - spec.alpha() as usize * k;
        (self.eigenspace_dim != expected).then(|| {
            format!(
                "1-eigenspace of g^B has dimension {}, expected {expected}",
                self.eigenspace_dim
            )
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub k: usize,
    pub tier: Tier,
    pub distinguished: Option<usize>,
    pub b: Option<BigUint>,
    pub beta: Option<u32>,
    pub ppd: Vec<BigUint>,
    pub witness: Option<PowerStructure>,
}

#[derive(Serialize)]
struct ClassificationJson {
    k: usize,
    tier: Tier,
    #[serde(rename = "B")]
    b: Option<String>,
    beta: Option<u32>,
    ppd: Vec<String>,
    eigenspace_dim: Option<usize>,
    complement_dim: Option<usize>,
    irreducible: Option<bool>,
}

impl Classification {
    pub fn to_json_value(&self) -> serde_json::Value {
        let j = ClassificationJson {
            k: self.k,
            tier: self.tier,
            b: self.b.as_ref().map(|b| b.to_string()),
            beta: self.beta,
            ppd: self.ppd.iter().map(|r| r.to_string()).collect(),
            eigenspace_dim: self.witness.map(|w| w.eigenspace_dim),
            complement_dim: self.witness.map(|w| w.complement_dim),
            irreducible: self.witness.map(|w| w.irreducible),
        };
        serde_json::to_value(j).expect("serializable")
    }
}

fn check_element(spec: &GroupSpec, g: &Matrix) -> Result<()> {
    if **g.field() != **spec.field() {
        return Err(Error::FieldMismatch);
    }
    if g.dim() != spec.d() {
        return Err(Error::DimensionMismatch {
            expected: spec.d(),
            got: g.dim(),
        });
    }
    Ok(())
}

/// Factors the characteristic polynomial over the entry field and pairs
/// each factor with its conjugate.
pub fn profile(spec: &GroupSpec, g: &Matrix) -> Result<CharPolyProfile> {
    check_element(spec, g)?;
    let cp = g.char_poly();
    let fact = cp.factorize()?;
    let mut factors: Vec<FactorInfo> = Vec::with_capacity(fact.factors.len());
    let mut conjugates = Vec::with_capacity(fact.factors.len());
    for (poly, mult) in &fact.factors {
        let conj = poly.conjugate()?;
        factors.push(FactorInfo {
            degree: poly.degree(),
            multiplicity: *mult,
            self_conjugate: conj == *poly,
            partner: None,
            poly: poly.clone(),
        });
        conjugates.push(conj);
    }
    for i in 0..factors.len() {
        if !factors[i].self_conjugate {
            factors[i].partner = factors.iter().position(|f| f.poly == conjugates[i]);
        }
    }
    Ok(CharPolyProfile {
        factors,
        d: spec.d(),
    })
}

fn check_k(spec: &GroupSpec, k: usize) -> Result<()> {
    if k < 2 || k > spec.d() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 2..={}",
            spec.d()
        )));
    }
    Ok(())
}

/// Index of the factor witnessing membership of `Q_k`, if the element is in
/// `Q_k`.
pub fn distinguished_factor(spec: &GroupSpec, prof: &CharPolyProfile, k: usize) -> Result<Option<usize>> {
    check_k(spec, k)?;
    if spec.family().is_isometry_type() {
        let sc: Vec<usize> = (0..prof.factors.len())
            .filter(|&i| prof.factors[i].self_conjugate && prof.factors[i].degree.is_multiple_of(2 * k))
            .collect();
        let blocked = prof
            .factors
            .iter()
            .any(|f| !f.self_conjugate && f.degree % k == 0);
        Ok(match sc.as_slice() {
            [i] if !blocked
                && prof.factors[*i].degree == 2 * k
                && prof.factors[*i].multiplicity == 1 =>
            {
                Some(*i)
            }
            _ => None,
        })
    } else {
        if spec.family().is_unitary() && k.is_multiple_of(2) {
            return Ok(None);
        }
        let div: Vec<usize> = (0..prof.factors.len())
            .filter(|&i| prof.factors[i].degree.is_multiple_of(k))
            .collect();
        Ok(match div.as_slice() {
            [i] if prof.factors[*i].degree == k && prof.factors[*i].multiplicity == 1 => Some(*i),
            _ => None,
        })
    }
}

pub fn classify_k(spec: &GroupSpec, prof: &CharPolyProfile, k: usize) -> Result<Tier> {
    Ok(match distinguished_factor(spec, prof, k)? {
        Some(_) => Tier::Qk,
        None => Tier::None,
    })
}

fn q_delta_pow_minus_one(spec: &GroupSpec, m: usize) -> BigUint {
    BigUint::from(spec.q()).pow(spec.delta() * m as u32) - 1u32
}

fn beta_of(spec: &GroupSpec, prof: &CharPolyProfile) -> u32 {
    ceil_log(spec.p(), prof.max_multiplicity() as u64)
}

/// The exponent `B` and `beta`: `B = p^beta · Π (q^{δ k_i} - 1)` over the
/// distinct factors other than the distinguished one.
pub fn compute_b(spec: &GroupSpec, prof: &CharPolyProfile, k: usize) -> Result<(BigUint, u32)> {
    let f1 = distinguished_factor(spec, prof, k)?.ok_or(Error::NotClassified)?;
    let beta = beta_of(spec, prof);
    let mut b = BigUint::from(spec.p()).pow(beta);
    for (i, f) in prof.factors.iter().enumerate() {
        if i != f1 {
            b *= q_delta_pow_minus_one(spec, f.degree);
        }
    }
    Ok((b, beta))
}

/// `p^beta · lcm_i (q^{δ k_i} - 1)`, which annihilates every element with
/// this profile.
pub fn annihilating_exponent(spec: &GroupSpec, prof: &CharPolyProfile) -> BigUint {
    let mut e = BigUint::from(spec.p()).pow(beta_of(spec, prof));
    let mut l = BigUint::one();
    for f in &prof.factors {
        l = l.lcm(&q_delta_pow_minus_one(spec, f.degree));
    }
    e *= l;
    e
}

/// The `r`-part of the order of `g`, given an exponent `e` with `g^e = 1`.
pub fn element_r_part(g: &Matrix, e: &BigUint, r: &BigUint) -> Result<BigUint> {
    let (v, cofactor) = split_r(e, r);
    let mut h = g.pow(&cofactor);
    let mut part = BigUint::one();
    for _ in 0..v {
        if h.is_identity() {
            return Ok(part);
        }
        h = h.pow(r);
        part *= r;
    }
    if h.is_identity() {
        Ok(part)
    } else {
        Err(Error::NotAnnihilating)
    }
}

/// Primitive prime divisors for a given `k`, and the full `r`-parts of
/// `q^{δαk} - 1` for those dividing the group order.
#[derive(Clone, Debug)]
pub struct PpdData {
    pub primes: Vec<BigUint>,
    pub full_parts: Vec<(BigUint, BigUint)>,
}

impl PpdData {
    pub fn new(spec: &GroupSpec, k: usize) -> Self {
        Self::with_order(spec, k, &group_order(spec))
    }

    fn with_order(spec: &GroupSpec, k: usize, order: &BigUint) -> Self {
        let m = (spec.delta() * spec.alpha()) as u64 * k as u64;
        let primes = ppd_primes(spec.q(), m);
        let qm1 = BigUint::from(spec.q()).pow(m as u32) - 1u32;
        let full_parts = primes
            .iter()
            .filter(|r| (order % *r).bits() == 0)
            .map(|r| (r.clone(), r_part(&qm1, r)))
            .collect();
        PpdData { primes, full_parts }
    }
}

pub fn refine_tier_with(g: &Matrix, e: &BigUint, data: &PpdData) -> Result<Tier> {
    let mut parts = HashMap::new();
    for r in &data.primes {
        parts.insert(r.clone(), element_r_part(g, e, r)?);
    }
    if !parts.values().any(|v| !v.is_one()) {
        return Ok(Tier::Qk);
    }
    let full = data.full_parts.iter().all(|(r, want)| parts[r] == *want);
    Ok(if full { Tier::Full } else { Tier::Ppd })
}

/// Upgrades a `Q_k` element to the ppd or full tier where it qualifies.
pub fn refine_tier(
    spec: &GroupSpec,
    g: &Matrix,
    prof: &CharPolyProfile,
    k: usize,
    base: Tier,
) -> Result<Tier> {
    if base != Tier::Qk {
        return Err(Error::InvalidArgument(format!("base tier must be qk, got {base}")));
    }
    let e = annihilating_exponent(spec, prof);
    refine_tier_with(g, &e, &PpdData::new(spec, k))
}

pub fn verify_power_structure(
    spec: &GroupSpec,
    g: &Matrix,
    prof: &CharPolyProfile,
    k: usize,
    b: &BigUint,
) -> Result<PowerStructure> {
    let f1 = distinguished_factor(spec, prof, k)?.ok_or(Error::NotClassified)?;
    let h = g.pow(b);
    let id = Matrix::identity(spec.field(), spec.d());
    let eigenspace_dim = h.sub(&id).nullspace().dim();
    let u = g.kernel_of_poly(&prof.factors[f1].poly)?;
    let irreducible = h.restrict(&u)?.is_irreducible_action();
    Ok(PowerStructure {
        eigenspace_dim,
        complement_dim: u.dim(),
        irreducible,
    })
}

/// Smallest odd `k` with `ln n < k <= 2 ln n` for which the element lies in
/// `Q_k`.
pub fn find_good_k(spec: &GroupSpec, prof: &CharPolyProfile) -> Option<usize> {
    good_k_range(spec.n())
        .filter(|&k| k >= 2 && k <= spec.d())
        .find(|&k| matches!(classify_k(spec, prof, k), Ok(Tier::Qk)))
}

/// Odd integers in `(ln n, 2 ln n]`.
pub fn good_k_range(n: usize) -> impl Iterator<Item = usize> {
    let l = (n as f64).ln();
    let lo = l.floor() as usize + 1;
    let hi = (2.0 * l).floor() as usize;
    (lo..=hi).filter(|k| k % 2 == 1)
}

/// Classification of elements of one group, caching per-`k` arithmetic.
pub struct Classifier {
    spec: GroupSpec,
    order: BigUint,
    cache: Mutex<HashMap<usize, Arc<PpdData>>>,
}

impl Classifier {
    pub fn new(spec: &GroupSpec) -> Self {
        Classifier {
            order: group_order(spec),
            spec: spec.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn ppd_data(&self, k: usize) -> Arc<PpdData> {
        let mut cache = self.cache.lock().expect("cache lock");
        cache
            .entry(k)
            .or_insert_with(|| Arc::new(PpdData::with_order(&self.spec, k, &self.order)))
            .clone()
    }

    pub fn classify(&self, g: &Matrix, k: usize) -> Result<Classification> {
        let prof = profile(&self.spec, g)?;
        self.classify_profile(g, &prof, k)
    }

    pub fn classify_profile(&self, g: &Matrix, prof: &CharPolyProfile, k: usize) -> Result<Classification> {
        let spec = &self.spec;
        let data = self.ppd_data(k);
        let Some(f1) = distinguished_factor(spec, prof, k)? else {
            return Ok(Classification {
                k,
                tier: Tier::None,
                distinguished: None,
                b: None,
                beta: None,
                ppd: data.primes.clone(),
                witness: None,
            });
        };
        let (b, beta) = compute_b(spec, prof, k)?;
        let e = annihilating_exponent(spec, prof);
        let tier = refine_tier_with(g, &e, &data)?;
        let witness = verify_power_structure(spec, g, prof, k, &b)?;
        Ok(Classification {
            k,
            tier,
            distinguished: Some(f1),
            b: Some(b),
            beta: Some(beta),
            ppd: data.primes.clone(),
            witness: Some(witness),
        })
    }
}
