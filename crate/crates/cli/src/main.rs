use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aot_core::adapted::{av, aw_p_value};
use aot_core::bounds::rates::{default_rate_measure, default_rate_ns, rate_scheme, run_rate_experiment};
use aot_core::bounds::{run_suite, SuiteKind};
use aot_core::measure::{from_json, to_json_value};
use aot_core::moduli::ModulusContext;
use aot_core::ot::{wasserstein_p, WeightedPoints};
use aot_core::smoothing::standard::{standard_aw, standard_smooth_aw, standard_w};
use aot_core::smoothing::{smooth_aw, smooth_w, NoiseKind, NoiseModel, Scheme};
use aot_core::{tv_distance, Error, Measure};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod output;

use output::{Format, Table};

#[derive(Parser)]
#[command(name = "aot", version, about = "Adapted optimal transport between discrete path measures")]
struct Cli {
    /// Worker threads for parallel library calls (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance between two measures.
    Dist {
        kind: DistKind,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Distance between the noise-smoothed measures.
    SmoothDist {
        kind: SmoothKind,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        smoothing: SmoothingArgs,
    },
    /// Modulus of continuity of a measure's kernels at time `t`.
    Modulus {
        a: PathBuf,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// One or more budgets, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
    },
    /// Iterated modulus `h^0..h^{T-1}` at noise level sigma.
    HIter {
        a: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        sigma: f64,
    },
    /// Radially clip every step to the ball of radius R.
    Clip {
        a: PathBuf,
        #[arg(long = "r", alias = "R")]
        r: f64,
    },
    /// Empirical measure of n draws.
    Sample {
        a: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Round coordinates to a lattice of step h.
    Quantize {
        a: PathBuf,
        #[arg(long)]
        h: f64,
    },
    /// Inequality suites.
    Bounds {
        #[command(subcommand)]
        action: BoundsCmd,
    },
    /// Empirical convergence rate of the smoothed adapted distance.
    Rates {
        #[command(subcommand)]
        action: RatesCmd,
    },
    /// Closed-form reference examples.
    Example {
        #[command(subcommand)]
        which: ExampleCmd,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum RatesCmd {
    Run {
        /// Base measure (default: the built-in 8-atom measure).
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ExampleCmd {
    /// Two-atom example `½δ(ε,1) + ½δ(-ε,-1)` against its ε = 0 version.
    Standard {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DistKind {
    W,
    Aw,
    Av,
    Tv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SmoothKind {
    W,
    Aw,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    /// Compactly supported biweight product noise.
    #[value(alias = "uniform")]
    Bump,
}

#[derive(Args)]
struct SmoothingArgs {
    #[arg(long)]
    sigma: f64,
    /// Absolute lattice step (default: a fraction of sigma).
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    grid_fraction: Option<f64>,
    #[arg(long)]
    radius_mult: Option<f64>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    noise: NoiseArg,
}

impl SmoothingArgs {
    fn scheme(&self) -> Scheme {
        let mut s = Scheme {
            grid_step: self.grid_step,
            ..Scheme::default()
        };
        if let Some(f) = self.grid_fraction {
            s.grid_fraction = f;
        }
        if let Some(r) = self.radius_mult {
            s.radius_mult = r;
        }
        s
    }

    fn noise(&self, dim: usize) -> Result<NoiseModel, Error> {
        let kind = match self.noise {
            NoiseArg::Gaussian => NoiseKind::Gaussian,
            NoiseArg::Bump => NoiseKind::Bump,
        };
        NoiseModel::new(kind, dim, self.sigma)
    }
}

/// What a subcommand produces.
enum Outcome {
    /// JSON document plus its CSV rendering.
    Data(Value, Table),
    /// A measure, emitted in the loader's format.
    Measure(Measure),
    /// Data that also carries a failed verdict.
    Failed(Value, Table, String),
}

fn load(path: &Path) -> Result<Measure, Error> {
    let text = fs::read_to_string(path)?;
    from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn positive(name: &'static str, v: f64) -> Result<f64, Error> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parameter {
            name,
            value: v.to_string(),
            reason: "must be positive",
        })
    }
}

fn exponent(p: f64) -> Result<f64, Error> {
    if p >= 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(Error::Parameter {
            name: "p",
            value: p.to_string(),
            reason: "must be at least 1",
        })
    }
}

fn flat_w(mu: &Measure, nu: &Measure, p: f64) -> Result<f64, Error> {
    if mu.dim() != nu.dim() || mu.horizon() != nu.horizon() {
        return Err(Error::Dimension(format!(
            "shapes differ: d={} T={} vs d={} T={}",
            mu.dim(),
            mu.horizon(),
            nu.dim(),
            nu.horizon()
        )));
    }
    let n = mu.dim() * mu.horizon();
    let a = WeightedPoints::new(n, mu.paths_flat().to_vec(), mu.weights().to_vec())?;
    let b = WeightedPoints::new(n, nu.paths_flat().to_vec(), nu.weights().to_vec())?;
    Ok(wasserstein_p(&a, &b, p)?.0)
}

fn scalar(fields: Vec<(&str, Value)>) -> Outcome {
    let table = Table::from_fields(&fields);
    Outcome::Data(Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect()), table)
}

fn run(cmd: Cmd) -> Result<Outcome, Error> {
    Ok(match cmd {
        Cmd::Dist { kind, a, b, p } => {
            let p = exponent(p)?;
            let (mu, nu) = (load(&a)?, load(&b)?);
            let (name, v) = match kind {
                DistKind::W => ("w", flat_w(&mu, &nu, p)?),
                DistKind::Aw => ("aw", aw_p_value(&mu, &nu, p)?),
                DistKind::Av => ("av", av(&mu, &nu)?),
                DistKind::Tv => ("tv", tv_distance(&mu, &nu)?),
            };
            let mut fields = vec![("distance", json!(name)), ("value", json!(v))];
            if matches!(kind, DistKind::W | DistKind::Aw) {
                fields.push(("p", json!(p)));
            }
            scalar(fields)
        }
        Cmd::SmoothDist { kind, a, b, p, smoothing } => {
            let p = exponent(p)?;
            positive("sigma", smoothing.sigma)?;
            let (mu, nu) = (load(&a)?, load(&b)?);
            let noise = smoothing.noise(mu.dim() * mu.horizon())?;
            let scheme = smoothing.scheme();
            let (name, d) = match kind {
                SmoothKind::W => ("smooth_w", smooth_w(&mu, &nu, &noise, &scheme, p)?),
                SmoothKind::Aw => ("smooth_aw", smooth_aw(&mu, &nu, &noise, &scheme, p)?),
            };
            scalar(vec![
                ("distance", json!(name)),
                ("value", json!(d.value)),
                ("budget", json!(d.budget)),
                ("lower", json!(d.lower())),
                ("upper", json!(d.upper())),
                ("cells", json!(d.cells)),
                ("p", json!(p)),
                ("sigma", json!(noise.sigma)),
            ])
        }
        Cmd::Modulus { a, t, p, delta } => {
            let mu = load(&a)?;
            let curve = ModulusContext::new(&mu, exponent(p)?)?.curve(t, &delta)?;
            let table = Table::new(
                &["t", "p", "delta", "value", "breakpoint"],
                curve
                    .samples
                    .iter()
                    .map(|s| vec![json!(t), json!(curve.p), json!(s.delta), json!(s.value), json!(s.breakpoint)])
                    .collect(),
            );
            Outcome::Data(serde_json::to_value(&curve).expect("serializable"), table)
        }
        Cmd::HIter { a, p, sigma } => {
            let mu = load(&a)?;
            let h = ModulusContext::new(&mu, exponent(p)?)?.h_iteration(positive("sigma", sigma)?)?;
            let table = Table::new(&["t", "h"], h.iter().enumerate().map(|(t, v)| vec![json!(t), json!(v)]).collect());
            Outcome::Data(json!({ "p": p, "sigma": sigma, "h": h, "sum": h.iter().sum::<f64>() }), table)
        }
        Cmd::Clip { a, r } => Outcome::Measure(load(&a)?.clip(positive("R", r)?)?),
        Cmd::Sample { a, n, seed } => Outcome::Measure(load(&a)?.sample_empirical(n, seed)?),
        Cmd::Quantize { a, h } => Outcome::Measure(load(&a)?.quantize(positive("h", h)?, 1.0)?.0),
        Cmd::Bounds {
            action: BoundsCmd::Run { suite, seed },
        } => {
            let kind: SuiteKind = suite.parse()?;
            let report = run_suite(kind, seed)?;
            let table = Table::new(
                &["bound_id", "lhs", "rhs", "slack", "budget", "pass", "budget_dominated"],
                report
                    .reports
                    .iter()
                    .map(|r| {
                        vec![
                            json!(r.bound_id),
                            json!(r.lhs),
                            json!(r.rhs),
                            json!(r.slack),
                            json!(r.budget),
                            json!(r.pass),
                            json!(r.budget_dominated),
                        ]
                    })
                    .collect(),
            );
            let value = serde_json::to_value(&report).expect("serializable");
            if report.pass {
                Outcome::Data(value, table)
            } else {
                let why = match report.first_failure() {
                    Some(f) => format!("bound {} failed on {}", f.bound_id, f.instance),
                    None => "a trend or rate gate failed".to_string(),
                };
                Outcome::Failed(value, table, why)
            }
        }
        Cmd::Rates {
            action: RatesCmd::Run { measure, p, sigma, ns, seeds, seed },
        } => {
            let mu = match measure {
                Some(path) => load(&path)?,
                None => default_rate_measure(),
            };
            let noise = NoiseModel::gaussian(mu.dim() * mu.horizon(), positive("sigma", sigma)?)?;
            let ns = ns.unwrap_or_else(default_rate_ns);
            let fit = run_rate_experiment(&mu, exponent(p)?, &noise, &rate_scheme(), &ns, seeds, seed)?;
            let table = Table::new(
                &["n", "value"],
                fit.ns.iter().zip(&fit.values).map(|(n, v)| vec![json!(n), json!(v)]).collect(),
            );
            Outcome::Data(serde_json::to_value(&fit).expect("serializable"), table)
        }
        Cmd::Example {
            which: ExampleCmd::Standard { eps, sigma, p },
        } => {
            let p = exponent(p)?;
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::Parameter {
                    name: "eps",
                    value: eps.to_string(),
                    reason: "must be nonnegative",
                });
            }
            let mut fields = vec![
                ("eps", json!(eps)),
                ("p", json!(p)),
                ("w", json!(standard_w(eps))),
                ("aw", json!(standard_aw(eps, p))),
            ];
            if let Some(s) = sigma {
                fields.push(("sigma", json!(positive("sigma", s)?)));
                fields.push(("value", json!(standard_smooth_aw(eps, s, p)?)));
            }
            scalar(fields)
        }
    })
}

fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("parameter error: threads = 0 (must be positive)");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool configured once");
    }
    let format = cli.format;
    let (text, failure) = match run(cli.cmd) {
        Ok(Outcome::Data(v, t)) => (format.render(&v, &t), None),
        Ok(Outcome::Measure(m)) => {
            let text = match format {
                Format::Json => serde_json::to_string(&to_json_value(&m)).expect("serializable") + "\n",
                Format::Csv => Table::measure(&m).to_csv(),
            };
            (text, None)
        }
        Ok(Outcome::Failed(v, t, why)) => (format.render(&v, &t), Some(why)),
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(if e.is_validation() { 1 } else { 2 });
        }
    };
    if let Err(e) = emit(cli.out.as_deref(), &text) {
        eprintln!("io error: {e}");
        return ExitCode::from(1);
    }
    match failure {
        Some(why) => {
            eprintln!("numeric error: {why}");
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}
