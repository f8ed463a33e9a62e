//! Monte Carlo and exhaustive scans of `|Q|/|H|` with comparison against
//! the bound intervals.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{find_good_k, profile, Classifier, Tier};
use crate::error::{Error, Result};
use crate::groups::{enumerate, group_order, sample_uniform, GroupSpec};
use crate::matrix::Matrix;
use crate::proportions::{
    bounds_main, bounds_main_b, bounds_short, corollary_bound, in_theorem_range, rational_to_string,
    BoundInterval, BoundSource, SetKind,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CAP: u64 = 1_000_000;
pub const CHUNK_SIZE: u64 = 256;
/// Two-sided 99% normal quantile.
pub const WILSON_Z: f64 = 2.5758;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    MonteCarlo,
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub spec: GroupSpec,
    pub k: KChoice,
    pub kinds: Vec<SetKind>,
    pub samples: u64,
    pub seed: u64,
    /// Thread count; 0 uses the rayon default.
    pub workers: usize,
    pub mode: ScanMode,
    pub cap: u64,
    /// Include wall-clock time in the report (breaks byte-identity).
    pub timing: bool,
}

impl ScanConfig {
    pub fn new(spec: GroupSpec, k: KChoice) -> Self {
        ScanConfig {
            spec,
            k,
            kinds: SetKind::ALL.to_vec(),
            samples: 10_000,
            seed: 0,
            workers: 0,
            mode: ScanMode::MonteCarlo,
            cap: DEFAULT_CAP,
            timing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Within,
    Below,
    Above,
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Within => "within",
            Verdict::Below => "below",
            Verdict::Above => "above",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    #[serde(flatten)]
    pub interval: BoundInterval,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct KindReport {
    pub kind: SetKind,
    pub hits: u64,
    pub proportion: f64,
    /// Exact proportion as `num/den` (exhaustive mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub wilson: [f64; 2],
    /// Verdict against the headline interval.
    pub verdict: Verdict,
    pub bounds: Vec<BoundCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureDump {
    pub index: u64,
    pub k: usize,
    pub degrees: Vec<usize>,
    #[serde(rename = "B")]
    pub b: String,
    pub tier: Tier,
    pub eigenspace_dim: usize,
    pub expected_eigenspace_dim: usize,
    pub irreducible: bool,
    pub element: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub schema: u32,
    pub group: String,
    pub k: String,
    pub mode: ScanMode,
    pub samples: u64,
    pub seed: u64,
    pub hits_qk: u64,
    pub hits_ppd: u64,
    pub hits_full: u64,
    pub kinds: Vec<KindReport>,
    pub structural_failures: u64,
    /// Plain `Q_k` elements whose powered action on the complement is
    /// reducible (measured, not a failure).
    pub reducible_qk: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<FailureDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("group,k,kind,hits,samples,proportion,wilson_lo,wilson_hi,bound_lo,bound_hi,verdict\n");
        for kr in &self.kinds {
            let (lo, hi) = kr
                .bounds
                .first()
                .map(|b| (b.interval.lower.to_string(), b.interval.upper.to_string()))
                .unwrap_or_default();
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                self.group,
                self.k,
                kr.kind,
                kr.hits,
                self.samples,
                kr.proportion,
                kr.wilson[0],
                kr.wilson[1],
                lo,
                hi,
                kr.verdict
            )
            .unwrap();
        }
        s
    }

    pub fn hits(&self, kind: SetKind) -> u64 {
        match kind {
            SetKind::Qk => self.hits_qk,
            SetKind::Ppd => self.hits_ppd,
            SetKind::Full => self.hits_full,
        }
    }

    pub fn kind(&self, kind: SetKind) -> Option<&KindReport> {
        self.kinds.iter().find(|k| k.kind == kind)
    }
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson(hits: u64, n: u64, z: f64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    [(center - half).max(0.0), (center + half).min(1.0)]
}

/// `within` when the point lies in the interval or the confidence interval
/// meets it.
pub fn compare_with_bounds(point: f64, ci: [f64; 2], bound: Option<&BoundInterval>) -> Verdict {
    let Some(b) = bound else {
        return Verdict::NotApplicable;
    };
    if b.contains(point) || (ci[1] >= b.lower && ci[0] <= b.upper) {
        Verdict::Within
    } else if point > b.upper {
        Verdict::Above
    } else {
        Verdict::Below
    }
}

#[derive(Default, Clone)]
struct Tally {
    qk: u64,
    ppd: u64,
    full: u64,
    failures: u64,
    reducible_qk: u64,
    first_failure: Option<FailureDump>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.qk += other.qk;
        self.ppd += other.ppd;
        self.full += other.full;
        self.failures += other.failures;
        self.reducible_qk += other.reducible_qk;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
    }
}

fn examine(classifier: &Classifier, k: KChoice, g: &Matrix, index: u64, t: &mut Tally) -> Result<()> {
    let spec = classifier.spec();
    let prof = profile(spec, g)?;
    let k = match k {
        KChoice::Fixed(k) => k,
        KChoice::Auto => match find_good_k(spec, &prof) {
            Some(k) => k,
            None => return Ok(()),
        },
    };
    let c = classifier.classify_profile(g, &prof, k)?;
    let Some(w) = c.witness else {
        return Ok(());
    };
    t.qk += 1;
    if c.tier >= Tier::Ppd {
        t.ppd += 1;
    }
    if c.tier == Tier::Full {
        t.full += 1;
    }
    let bad_dim = w.violation(spec, k).is_some();
    let bad_irr = c.tier >= Tier::Ppd && !w.irreducible;
    if c.tier == Tier::Qk && !w.irreducible {
        t.reducible_qk += 1;
    }
    if bad_dim || bad_irr {
        t.failures += 1;
        if t.first_failure.is_none() {
            t.first_failure = Some(FailureDump {
                index,
                k,
                degrees: prof.degrees(),
                b: c.b.map(|b| b.to_string()).unwrap_or_default(),
                tier: c.tier,
                eigenspace_dim: w.eigenspace_dim,
                expected_eigenspace_dim: spec.d() - spec.alpha() as usize * k,
                irreducible: w.irreducible,
                element: g.to_text(),
            });
        }
    }
    Ok(())
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        b = b.num_threads(workers);
    }
    let pool = b
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn check_config(cfg: &ScanConfig) -> Result<()> {
    if cfg.kinds.is_empty() {
        return Err(Error::InvalidArgument("no sets requested".into()));
    }
    if let KChoice::Fixed(k) = cfg.k {
        if k < 2 || k > cfg.spec.d() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} outside 2..={}",
                cfg.spec.d()
            )));
        }
    }
    Ok(())
}

/// Rng for one chunk of a scan; streams are disjoint per chunk.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

pub fn scan_montecarlo(cfg: &ScanConfig) -> Result<ScanReport> {
    check_config(cfg)?;
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let start = Instant::now();
    let classifier = Classifier::new(&cfg.spec);
    let nchunks = cfg.samples.div_ceil(CHUNK_SIZE);
    let chunks: Vec<Result<Tally>> = with_pool(cfg.workers, || {
        (0..nchunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(cfg.seed, c);
                let mut t = Tally::default();
                let lo = c * CHUNK_SIZE;
                let hi = ((c + 1) * CHUNK_SIZE).min(cfg.samples);
                for i in lo..hi {
                    let g = sample_uniform(&cfg.spec, &mut rng);
                    examine(&classifier, cfg.k, &g, i, &mut t)?;
                }
                Ok(t)
            })
            .collect()
    })?;
    let mut total = Tally::default();
    for c in chunks {
        total.merge(c?);
    }
    Ok(build_report(cfg, &classifier, total, cfg.samples, None, start))
}

pub fn scan_exhaustive(cfg: &ScanConfig) -> Result<ScanReport> {
    check_config(cfg)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let elems = enumerate(&cfg.spec, cfg.cap, &mut rng)?;
    let classifier = Classifier::new(&cfg.spec);
    let chunks: Vec<Result<Tally>> = with_pool(cfg.workers, || {
        elems
            .par_chunks(CHUNK_SIZE as usize)
            .enumerate()
            .map(|(c, chunk)| {
                let mut t = Tally::default();
                for (j, g) in chunk.iter().enumerate() {
                    examine(&classifier, cfg.k, g, (c * CHUNK_SIZE as usize + j) as u64, &mut t)?;
                }
                Ok(t)
            })
            .collect()
    })?;
    let mut total = Tally::default();
    for c in chunks {
        total.merge(c?);
    }
    let n = elems.len() as u64;
    Ok(build_report(cfg, &classifier, total, n, Some(n), start))
}

pub fn scan(cfg: &ScanConfig) -> Result<ScanReport> {
    match cfg.mode {
        ScanMode::MonteCarlo => scan_montecarlo(cfg),
        ScanMode::Exhaustive => scan_exhaustive(cfg),
    }
}

/// Bound intervals a scan is compared against, headline first.
pub fn applicable_bounds(classifier: &Classifier, k: KChoice, kind: SetKind) -> Vec<BoundInterval> {
    let spec = classifier.spec();
    let (alpha, delta, n, q) = (spec.alpha(), spec.delta(), spec.n(), spec.q());
    match k {
        KChoice::Fixed(k) => {
            if !in_theorem_range(n, k, spec.family().is_unitary()) {
                return Vec::new();
            }
            // the ppd and full sets are empty without a usable ppd
            if kind != SetKind::Qk && classifier.ppd_data(k).full_parts.is_empty() {
                return Vec::new();
            }
            let mut out = Vec::new();
            out.extend(bounds_short(alpha, q, k, kind).ok());
            out.extend(bounds_main(alpha, delta, n, q, k, kind).ok());
            out.extend(bounds_main_b(alpha, delta, n, q, k, kind).ok());
            out
        }
        KChoice::Auto => match (kind, corollary_bound(alpha, n)) {
            (SetKind::Full, _) | (_, Err(_)) => Vec::new(),
            (_, Ok(lower)) => vec![BoundInterval {
                lower,
                upper: 1.0,
                upper_strict: false,
                source: BoundSource::Corollary,
            }],
        },
    }
}

fn build_report(
    cfg: &ScanConfig,
    classifier: &Classifier,
    t: Tally,
    n: u64,
    exact_of: Option<u64>,
    start: Instant,
) -> ScanReport {
    let mut kinds = cfg.kinds.clone();
    kinds.sort();
    kinds.dedup();
    let kinds = kinds
        .into_iter()
        .map(|kind| {
            let hits = match kind {
                SetKind::Qk => t.qk,
                SetKind::Ppd => t.ppd,
                SetKind::Full => t.full,
            };
            let (proportion, exact, ci) = match exact_of {
                Some(total) => {
                    let r = BigRational::new(BigInt::from(hits), BigInt::from(total));
                    let p = r.to_f64().unwrap_or(f64::NAN);
                    (p, Some(rational_to_string(&r)), [p, p])
                }
                None => (hits as f64 / n as f64, None, wilson(hits, n, WILSON_Z)),
            };
            let bounds: Vec<BoundCheck> = applicable_bounds(classifier, cfg.k, kind)
                .into_iter()
                .map(|b| BoundCheck {
                    verdict: compare_with_bounds(proportion, ci, Some(&b)),
                    interval: b,
                })
                .collect();
            KindReport {
                kind,
                hits,
                proportion,
                exact,
                wilson: ci,
                verdict: bounds.first().map_or(Verdict::NotApplicable, |b| b.verdict),
                bounds,
            }
        })
        .collect();
    ScanReport {
        schema: SCHEMA_VERSION,
        group: cfg.spec.to_string(),
        k: match cfg.k {
            KChoice::Fixed(k) => k.to_string(),
            KChoice::Auto => "auto".into(),
        },
        mode: cfg.mode,
        samples: n,
        seed: cfg.seed,
        hits_qk: t.qk,
        hits_ppd: t.ppd,
        hits_full: t.full,
        kinds,
        structural_failures: t.failures,
        reducible_qk: t.reducible_qk,
        first_failure: t.first_failure,
        runtime_ms: cfg.timing.then(|| start.elapsed().as_millis() as u64),
    }
}

/// `|H|` for reports.
pub fn order_string(spec: &GroupSpec) -> String {
    group_order(spec).to_string()
}
