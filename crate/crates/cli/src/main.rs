//! Command-line front end of the multiplicity-estimate workbench.
//!
//! Exit status: 0 on success, 1 when a computation fails (the error name is printed), 2 when the
//! command line or a configuration file cannot be read.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use multlab::biring::{
    evaluate, parse_affine, parse_bi, parse_poly, FunctionalPoint, FunctionalPointJson,
};
use multlab::bounds::{self, ThresholdKind, DEFAULT_BIT_BUDGET};
use multlab::dynamics::{growth_report, MapSpec, MapSpecJson};
use multlab::estimates::{aux_poly, multiplicity_scan, OracleMode, ScanOptions, Shape};
use multlab::exactalg::{parse_rational, Field};
use multlab::funceq::{verify_residual, FunctionalSystem, SystemDescriptor};
use multlab::geometry::{self, CycleJson, CycleMode, RationalPoint, SplitCycle};
use multlab::ideals::{is_phi_stable, GeneratedIdeal, IdealJson};

#[derive(Parser)]
#[command(name = "multlab", version, about = "Exact experiments on vanishing orders of polynomials at power series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Experiment config or bare system descriptor (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Precomputed functional point (JSON with "field", "series", "t_f").
    #[arg(long)]
    point: Option<PathBuf>,
    /// Working precision N (series known modulo z^N).
    #[arg(long, alias = "N")]
    precision: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Expand the solution of a Mahler or differential system and certify the residuals.
    Series {
        #[command(flatten)]
        src: Source,
    },
    /// Order of vanishing at z = 0 of P(1, z, 1, f1, ..., fn) for an affine or bi-homogeneous P.
    Ord {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        poly: String,
    },
    /// Auxiliary polynomial of bidegree at most (a, b) vanishing to order at least u - 1.
    Auxpoly {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
    },
    /// Grid of maximal finite vanishing orders over bidegrees (a, b), written as CSV.
    Scan {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        amax: u32,
        #[arg(long)]
        bmax: u32,
        /// Normalizing shape: "product" for (a+1)(b+1)^t, "sum" for (a+b+1)(b+1)^t.
        #[arg(long, default_value = "sum")]
        shape: String,
        /// Transcendence degree used by the shape (defaults to the declared one).
        #[arg(long)]
        t: Option<u32>,
        /// Stabilization window (defaults to max(8, u)).
        #[arg(long)]
        window: Option<usize>,
        /// Cross-check every cell by exhaustive enumeration over F_p.
        #[arg(long)]
        oracle: Option<u64>,
        /// Emit the full JSON report instead of CSV.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether phi(I) lies in I for a generated ideal I and a derivation or Mahler pullback phi.
    Stability {
        /// Ideal JSON: {"n", "char", "generators"}.
        #[arg(long)]
        ideal: PathBuf,
        /// Map JSON; if omitted the map is derived from --config.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Degree and order growth laws of phi on seeded random polynomials.
    Growth {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Largest number of iterations of phi.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// RNG seed; overrides the config's "seed" (default 1).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Projective distance ord(x, y) between the functional point and a point, cycle or hypersurface.
    Distance {
        #[command(flatten)]
        src: Source,
        /// Coordinates of a k(z)-point, comma separated, e.g. "1,z^2+1".
        #[arg(long)]
        target: Option<String>,
        /// Cycle JSON: {"points": [[...]], "mult": [...]}.
        #[arg(long)]
        cycle: Option<PathBuf>,
        /// Bi-homogeneous polynomial defining a hypersurface.
        #[arg(long)]
        hyper: Option<String>,
        /// Aggregation over cycle points: "sum" or "max".
        #[arg(long, default_value = "sum")]
        mode: String,
    },
    /// Liouville inequality deg Q h(Z) + h(Q) deg Z >= sum of orders of Q on a split cycle.
    Liouville {
        /// Affine polynomial in z, X1..Xn.
        #[arg(long)]
        q: String,
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Degree bounds for the intersection with r - r_p hypersurfaces of bidegree at most (a, b).
    Bezout {
        #[arg(long)]
        deg1: String,
        #[arg(long)]
        deg0: String,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        rp: u32,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Least bidegree of a form vanishing on a cycle but not at the functional point.
    Delta {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        cycle: PathBuf,
        /// Coefficient of the X'-degree in the minimized linear form.
        #[arg(long, default_value = "1")]
        cprime: String,
        /// Coefficient of the X-degree in the minimized linear form.
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value_t = 6)]
        cap: u32,
    },
    /// The explicit constants c_n, rho_i, C_m and, with a point, C_iso.
    Constants {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu0: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        point: Option<PathBuf>,
        #[arg(long)]
        precision: Option<usize>,
        /// Largest exact value kept, in bits.
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        budget: u64,
    },
    /// Right-hand sides of the transference, multiplicity, stability and order bounds.
    Threshold {
        /// transference | lmgp_rhs | stability_rhs | estimationP
        #[arg(long)]
        kind: String,
        /// Parameter as name=value (rational), repeatable.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        budget: u64,
    },
}

enum CliError {
    Config(String),
    Domain(multlab::Error),
}

impl From<multlab::Error> for CliError {
    fn from(e: multlab::Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Experiment config; a bare system descriptor is accepted in its place.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    system: SystemDescriptor,
    #[serde(default)]
    precision: Option<usize>,
    #[serde(default)]
    map: Option<MapSpecJson>,
    #[serde(default)]
    seed: Option<u64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })
}

fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let v: Value = read_json(path)?;
    let v = if v.get("system").is_some() { v } else { json!({ "system": v }) };
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

const DEFAULT_PRECISION: usize = 64;

fn load_point(src: &Source) -> CliResult<FunctionalPoint> {
    if let Some(p) = src.precision {
        if p < 8 {
            return Err(CliError::Config("precision must be at least 8".into()));
        }
    }
    match (&src.config, &src.point) {
        (Some(c), None) => {
            let cfg = load_config(c)?;
            let sys = FunctionalSystem::from_descriptor(&cfg.system)?;
            let n = src.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
            Ok(sys.solve(n)?)
        }
        (None, Some(p)) => {
            let j: FunctionalPointJson = read_json(p)?;
            let f = FunctionalPoint::from_json(&j)?;
            Ok(match src.precision {
                Some(n) => f.truncate(n),
                None => f,
            })
        }
        _ => Err(CliError::Config("exactly one of --config and --point is required".into())),
    }
}

fn load_map(map: Option<&PathBuf>, config: Option<&PathBuf>) -> CliResult<MapSpec> {
    if let Some(m) = map {
        let j: MapSpecJson = read_json(m)?;
        return Ok(MapSpec::from_json(&j)?);
    }
    let c = config.ok_or_else(|| CliError::Config("--map or --config is required".into()))?;
    let cfg = load_config(c)?;
    if let Some(j) = &cfg.map {
        return Ok(MapSpec::from_json(j)?);
    }
    Ok(match FunctionalSystem::from_descriptor(&cfg.system)? {
        FunctionalSystem::Mahler(s) => MapSpec::from_mahler_system(&s)?,
        FunctionalSystem::Differential(s) => MapSpec::from_differential_system(&s)?,
    })
}

fn rational(name: &str, s: &str) -> CliResult<num_rational::BigRational> {
    parse_rational(s).map_err(|e| CliError::Config(format!("--{name}: {e}")))
}

fn integer(name: &str, s: &str) -> CliResult<BigInt> {
    s.trim().parse().map_err(|e| CliError::Config(format!("--{name}: {e}")))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(e.to_string())),
        _ => Ok(()),
    }
}

fn print_json(v: &impl serde::Serialize) -> CliResult<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    emit(&(s + "\n"))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Series { src } => {
            let cfg = src.config.as_ref().map(|c| load_config(c)).transpose()?;
            let cfg = cfg.ok_or_else(|| CliError::Config("--config is required".into()))?;
            let sys = FunctionalSystem::from_descriptor(&cfg.system)?;
            let n = src.precision.or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
            let f = sys.solve(n)?;
            let residual: Vec<String> =
                verify_residual(&sys, &f, f.precision())?.iter().map(|o| o.to_string()).collect();
            print_json(&json!({
                "precision": f.precision(),
                "point": f.to_json(),
                "display": f.series().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "residual": residual,
            }))
        }
        Command::Ord { src, poly } => {
            let f = load_point(&src)?;
            let p = parse_poly(&poly, f.field(), f.n())?;
            let v = evaluate(&p, &f)?;
            print_json(&json!({ "ord": v.ord(), "precision": f.precision() }))
        }
        Command::Auxpoly { src, a, b } => {
            let f = load_point(&src)?;
            let aux = aux_poly(&f, a, b, f.precision())?;
            print_json(&json!({
                "a": a,
                "b": b,
                "u": aux.u,
                "affine": aux.affine.to_string(),
                "poly": aux.poly.to_string(),
                "ord": aux.ord,
            }))
        }
        Command::Scan { src, amax, bmax, shape, t, window, oracle, json, out } => {
            let f = load_point(&src)?;
            let opts = ScanOptions {
                a_max: amax,
                b_max: bmax,
                precision: f.precision(),
                shape: Shape::parse(&shape)?,
                t,
                window,
                oracle: oracle.map_or(OracleMode::Off, OracleMode::FiniteField),
            };
            let res = multiplicity_scan(&f, &opts)?;
            let text = if json {
                serde_json::to_string_pretty(&res).map_err(|e| CliError::Config(e.to_string()))? + "\n"
            } else {
                res.to_csv()
            };
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
                None => emit(&text),
            }
        }
        Command::Stability { ideal, map, config } => {
            let j: IdealJson = read_json(&ideal)?;
            let ideal = GeneratedIdeal::from_json(&j)?;
            let phi = load_map(map.as_ref(), config.as_ref())?;
            print_json(&is_phi_stable(&ideal, &phi)?)
        }
        Command::Growth { src, map, samples, max_n, seed } => {
            let f = load_point(&src)?;
            let phi = load_map(map.as_ref(), src.config.as_ref())?;
            let seed = match (seed, &src.config) {
                (Some(s), _) => s,
                (None, Some(c)) => load_config(c)?.seed.unwrap_or(1),
                (None, None) => 1,
            };
            print_json(&growth_report(&phi, &f, samples, max_n, seed)?)
        }
        Command::Distance { src, target, cycle, hyper, mode } => {
            let f = load_point(&src)?;
            let ord = match (target, cycle, hyper) {
                (Some(t), None, None) => {
                    let coords: Vec<&str> = t.split(',').collect();
                    let pn = RationalPoint::parse(&coords, f.field())?;
                    geometry::ord_to_point(&f, &geometry::BiPoint::graph(pn))?
                }
                (None, Some(c), None) => {
                    let j: CycleJson = read_json(&c)?;
                    let z = SplitCycle::from_json(&j)?;
                    geometry::ord_to_cycle(&f, &z, CycleMode::parse(&mode)?)?
                }
                (None, None, Some(h)) => {
                    let h = parse_bi(&h, f.field(), f.n())?;
                    geometry::ord_to_hypersurface(&f, &h)?
                }
                _ => {
                    return Err(CliError::Config(
                        "exactly one of --target, --cycle, --hyper is required".into(),
                    ))
                }
            };
            print_json(&json!({ "ord": ord, "precision": f.precision() }))
        }
        Command::Liouville { q, cycle } => {
            let j: CycleJson = read_json(&cycle)?;
            let z = SplitCycle::from_json(&j)?;
            let q = parse_affine(&q, Field::from_characteristic(j.char)?, z.n())?;
            print_json(&geometry::liouville_check(&q, &z)?)
        }
        Command::Bezout { deg1, deg0, r, rp, a, b } => {
            let (d1, d0) = (integer("deg1", &deg1)?, integer("deg0", &deg0)?);
            let (a, b) = (integer("a", &a)?, integer("b", &b)?);
            let (x, y) = geometry::bezout_bounds(&d1, &d0, r, rp, &a, &b)?;
            print_json(&json!({ "deg1": x.to_string(), "deg0": y.to_string() }))
        }
        Command::Delta { src, cycle, cprime, c, cap } => {
            let f = load_point(&src)?;
            let j: CycleJson = read_json(&cycle)?;
            let z = SplitCycle::from_json(&j)?;
            let d = geometry::delta_pair(&z, &f, &rational("cprime", &cprime)?, &rational("c", &c)?, cap)?;
            print_json(&json!({
                "delta0": d.delta0,
                "delta1": d.delta1,
                "weight": d.weight.to_string(),
                "witness": d.witness.to_string(),
                "witness_ord": d.witness_ord,
                "examined": d.examined,
                "precision": d.precision,
                "stabilized": d.stabilized,
            }))
        }
        Command::Constants { n, mu, nu0, config, point, precision, budget } => {
            let (mu, nu0) = (rational("mu", &mu)?, rational("nu0", &nu0)?);
            let f = if config.is_some() || point.is_some() {
                Some(load_point(&Source { config, point, precision })?)
            } else {
                None
            };
            print_json(&bounds::paper_constants(n, &mu, &nu0, f.as_ref(), budget)?)
        }
        Command::Threshold { kind, params, budget } => {
            let kind = ThresholdKind::parse(&kind)?;
            let mut map = BTreeMap::new();
            for p in &params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("parameter {p:?} is not NAME=VALUE")))?;
                map.insert(k.trim().to_string(), rational(k, v)?);
            }
            print_json(&bounds::threshold(kind, &map, budget)?)
        }
    }
}

fn configure_threads() {
    if let Some(k) = std::env::var("MULTLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(e)) => {
            eprintln!("{}", json!({ "error": e.name(), "message": e.to_string() }));
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("{}", json!({ "error": "Config", "message": msg }));
            ExitCode::from(2)
        }
    }
}
