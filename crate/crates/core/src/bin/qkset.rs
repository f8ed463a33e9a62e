use std::fs;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qkset::arith::ppd_primes;
use qkset::classify::{find_good_k, profile, Classifier};
use qkset::groups::{enumerate, group_order, is_member, GroupSpec};
use qkset::harness::{scan, KChoice, ScanConfig, ScanMode, DEFAULT_CAP, SCHEMA_VERSION};
use qkset::matrix::Matrix;
use qkset::proportions::{b_exact, bounds_main, bounds_main_b, bounds_short, p_not_m, rational_to_string, SetKind};
use qkset::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_STRUCTURAL: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "qkset", version, about = "Classify classical-group elements and estimate Q_k proportions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifyFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify one matrix read from a file
    #[command(group(ArgGroup::new("level").args(["k", "auto_k"])))]
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        k: Option<usize>,
        /// Pick the smallest odd k with ln n < k <= 2 ln n that applies
        #[arg(long)]
        auto_k: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: ClassifyFormat,
    },
    /// Estimate |Q|/|H| by sampling, or exactly by enumeration
    #[command(group(ArgGroup::new("level").args(["k", "auto_k"]).required(true)))]
    Scan {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        auto_k: bool,
        /// Sets to report (repeat or comma-separate); all by default
        #[arg(long = "set", value_delimiter = ',')]
        sets: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: ScanFormat,
        /// Add wall-clock time to the report
        #[arg(long)]
        timing: bool,
    },
    /// List every element of a small group
    Enumerate {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the elements, not just the count
        #[arg(long)]
        print: bool,
    },
    /// Evaluate the bound interval for a group, k and set
    #[command(group(ArgGroup::new("which").args(["short", "main", "partb"])))]
    Bounds {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long = "set")]
        set: String,
        #[arg(long)]
        short: bool,
        #[arg(long)]
        main: bool,
        #[arg(long)]
        partb: bool,
    },
    /// Proportion of S_n with exactly one m-cycle and no other cycle length divisible by m
    Bexact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Proportion of S_n with no cycle length divisible by m
    Pnotm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Primitive prime divisors of q^m - 1
    Ppd {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u64,
    },
    /// Group order
    Order {
        #[arg(long)]
        group: String,
    },
}

enum Failure {
    Lib(Error),
    Structural(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Classify {
            group,
            input,
            k,
            auto_k: _,
            format,
        } => {
            let spec: GroupSpec = group.parse()?;
            let text = fs::read_to_string(&input)
                .map_err(|e| Error::InvalidArgument(format!("{input}: {e}")))?;
            let g = Matrix::parse_in(spec.field(), &text)?;
            if !is_member(&spec, &g)? {
                return Err(Error::InvalidArgument(format!("matrix is not an element of {spec}")).into());
            }
            let prof = profile(&spec, &g)?;
            let k = match k {
                Some(k) => Some(k),
                None => find_good_k(&spec, &prof),
            };
            let Some(k) = k else {
                let v = json!({"schema": SCHEMA_VERSION, "group": spec.to_string(), "k": null, "tier": "none"});
                match format {
                    ClassifyFormat::Json => println!("{}", pretty(&v)),
                    ClassifyFormat::Text => println!("no admissible k"),
                }
                return Ok(());
            };
            let c = Classifier::new(&spec).classify_profile(&g, &prof, k)?;
            let mut v = c.to_json_value();
            v["schema"] = json!(SCHEMA_VERSION);
            v["group"] = json!(spec.to_string());
            match format {
                ClassifyFormat::Json => println!("{}", pretty(&v)),
                ClassifyFormat::Text => {
                    println!("group {spec}  k {k}  tier {}", c.tier);
                    let degrees: Vec<String> = prof
                        .factors
                        .iter()
                        .map(|f| format!("{}^{}", f.degree, f.multiplicity))
                        .collect();
                    println!("factor degrees {}", degrees.join(" "));
                    if let (Some(b), Some(beta), Some(w)) = (&c.b, c.beta, c.witness) {
                        println!("B {b}  beta {beta}");
                        println!(
                            "eigenspace {}  complement {}  irreducible {}",
                            w.eigenspace_dim, w.complement_dim, w.irreducible
                        );
                    }
                    let ppd: Vec<String> = c.ppd.iter().map(|r| r.to_string()).collect();
                    println!("ppd [{}]", ppd.join(", "));
                }
            }
            if let Some(msg) = c.witness.and_then(|w| w.violation(&spec, k)) {
                return Err(Failure::Structural(msg));
            }
            Ok(())
        }
        Cmd::Scan {
            group,
            k,
            auto_k: _,
            sets,
            samples,
            seed,
            workers,
            exhaustive,
            cap,
            format,
            timing,
        } => {
            let spec: GroupSpec = group.parse()?;
            let kinds = if sets.is_empty() {
                SetKind::ALL.to_vec()
            } else {
                sets.iter().map(|s| s.parse()).collect::<Result<Vec<SetKind>, _>>()?
            };
            let mut cfg = ScanConfig::new(spec, k.map_or(KChoice::Auto, KChoice::Fixed));
            cfg.kinds = kinds;
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.workers = workers;
            cfg.mode = if exhaustive {
                ScanMode::Exhaustive
            } else {
                ScanMode::MonteCarlo
            };
            cfg.cap = cap;
            cfg.timing = timing;
            let report = scan(&cfg)?;
            match format {
                ScanFormat::Json => println!("{}", report.to_json()),
                ScanFormat::Csv => print!("{}", report.to_csv()),
            }
            if report.structural_failures > 0 {
                let dump = report
                    .first_failure
                    .as_ref()
                    .map(|d| serde_json::to_string_pretty(d).expect("serializable"))
                    .unwrap_or_default();
                return Err(Failure::Structural(format!(
                    "{} structural failures; first:\n{dump}",
                    report.structural_failures
                )));
            }
            Ok(())
        }
        Cmd::Enumerate {
            group,
            cap,
            seed,
            print,
        } => {
            use rand::SeedableRng;
            let spec: GroupSpec = group.parse()?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let elems = enumerate(&spec, cap, &mut rng)?;
            if print {
                for g in &elems {
                    println!("{}", g.to_text());
                }
            } else {
                let v = json!({
                    "schema": SCHEMA_VERSION,
                    "group": spec.to_string(),
                    "order": group_order(&spec).to_string(),
                    "count": elems.len(),
                });
                println!("{}", pretty(&v));
            }
            Ok(())
        }
        Cmd::Bounds {
            group,
            k,
            set,
            short,
            main: _,
            partb,
        } => {
            let spec: GroupSpec = group.parse()?;
            let kind: SetKind = set.parse()?;
            let (a, d, n, q) = (spec.alpha(), spec.delta(), spec.n(), spec.q());
            let b = if short {
                bounds_short(a, q, k, kind)?
            } else if partb {
                bounds_main_b(a, d, n, q, k, kind)?
            } else {
                bounds_main(a, d, n, q, k, kind)?
            };
            let mut v = serde_json::to_value(b).expect("serializable");
            v["schema"] = json!(SCHEMA_VERSION);
            v["group"] = json!(spec.to_string());
            v["k"] = json!(k);
            v["set"] = json!(kind.to_string());
            println!("{}", pretty(&v));
            Ok(())
        }
        Cmd::Bexact { n, m } => {
            println!("{}", rational_to_string(&b_exact(n, m)?));
            Ok(())
        }
        Cmd::Pnotm { n, m } => {
            println!("{}", rational_to_string(&p_not_m(n, m)?));
            Ok(())
        }
        Cmd::Ppd { q, m } => {
            if qkset::arith::prime_power(q).is_none() || m == 0 {
                return Err(Error::InvalidArgument("need a prime power q and m >= 1".into()).into());
            }
            let primes: Vec<String> = ppd_primes(q, m).iter().map(|r| r.to_string()).collect();
            println!("{}", primes.join(" "));
            Ok(())
        }
        Cmd::Order { group } => {
            let spec: GroupSpec = group.parse()?;
            println!("{}", group_order(&spec));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Structural(msg)) => {
            eprintln!("structural check failed: {msg}");
            ExitCode::from(EXIT_STRUCTURAL)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::CapExceeded { .. } => EXIT_CAP,
                Error::Structural(_) => EXIT_STRUCTURAL,
                _ => EXIT_USAGE,
            })
        }
    }
}
