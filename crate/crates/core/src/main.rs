use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ho_heat::config::RunConfig;
use ho_heat::even_case::{build_d_operator, build_psi_a_operator};
use ho_heat::heat::{heat_norms, heat_solution_grid, lambda_extension_grid, semigroup_defect, FockGrids};
use ho_heat::hypergeo::{gamma_coefficients, Hypergeometric, Method, SpectralParameter, TorusPoint};
use ho_heat::io::{read_grid_function, write_grid_function, write_holomorphic, write_json};
use ho_heat::transform::{GridFunction, HyperTransform, Scheme};
use ho_heat::verify::{self, Suite, VerifyOptions};
use ho_heat::{CVector, Complex64, Error, Vector};

#[derive(Parser)]
#[command(name = "ho-heat", version, about = "Heckman-Opdam hypergeometric functions and the heat transform")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Spatial box radius
    #[arg(long, global = true)]
    grid_radius: Option<f64>,
    #[arg(long, global = true)]
    scheme: Option<Scheme>,
    /// Tolerance override, NAME=VALUE; NAME is a check or suite name
    #[arg(long, global = true, value_parser = parse_tolerance)]
    tolerance: Vec<(String, f64)>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single quantity
    Eval {
        quantity: Quantity,
        /// Spectral parameter, comma-separated components `re` or `re:im`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<String>,
        /// Point in log coordinates, comma-separated components `re` or `re:im`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<String>,
        /// Largest height for `gamma`
        #[arg(long, default_value_t = 10)]
        cap: usize,
    },
    /// Hypergeometric Fourier transform and its relatives
    Transform {
        kind: TransformKind,
        /// Grid-function CSV (with its JSON header); the config's test function otherwise
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Heat evolution of the configured test function
    Heat {
        #[arg(long)]
        t: Option<f64>,
        /// Also write ΛF on X + iY
        #[arg(long)]
        complex_grid: bool,
    },
    /// Run verification suites and write a JSON report
    Verify {
        #[arg(default_value = "all")]
        suites: Vec<String>,
    },
    /// Print the exponential-polynomial operator as JSON
    DescribeOperator { which: OperatorKind },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Phi,
    C,
    Gamma,
    Delta,
    PlancherelDensity,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Forward,
    Inverse,
    Abel,
    Lambda,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorKind {
    PsiA,
    D,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("{e}"))?;
    Ok((k.to_string(), v))
}

fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let bad = || Error::InvalidInput(format!("cannot parse {s:?} as re or re:im"));
    let (re, im) = s.split_once(':').unwrap_or((s, "0"));
    Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

fn parse_cvector(parts: &[String], rank: usize, what: &str) -> Result<CVector, Error> {
    if parts.len() != rank {
        return Err(Error::InvalidInput(format!("{what} needs {rank} components, got {}", parts.len())));
    }
    let z: Vec<Complex64> = parts.iter().map(|p| parse_complex(p)).collect::<Result<_, _>>()?;
    Ok(CVector::new(z[0], z.get(1).copied().unwrap_or_default()))
}

/// Failure of a verification suite, as opposed to a usage or computation error.
struct Unverified;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Unverified)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::SchemaMismatch(_) | Error::UnsupportedType(_) | Error::Json(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(c: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &c.out {
        cfg.output_dir = o.clone();
    }
    cfg.grid.n = c.grid_n.or(cfg.grid.n);
    cfg.grid.radius = c.grid_radius.or(cfg.grid.radius);
    cfg.grid.scheme = c.scheme.or(cfg.grid.scheme);
    cfg.seed = c.seed.unwrap_or(cfg.seed);
    cfg.tolerances.extend(c.tolerance.iter().cloned());
    cfg.validate()?;
    Ok(cfg)
}

fn output_dir(cfg: &RunConfig) -> Result<&Path, Error> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    Ok(&cfg.output_dir)
}

fn run(cli: Cli) -> Result<Result<(), Unverified>, Error> {
    let cfg = load_config(&cli.common)?;
    match cli.command {
        Command::Eval { quantity, lambda, point, cap } => {
            let hg = cfg.context()?;
            println!("{}", serde_json::to_string_pretty(&eval(&hg, quantity, &lambda, &point, cap)?)?);
        }
        Command::Transform { kind, input } => transform(&cfg, kind, input.as_deref())?,
        Command::Heat { t, complex_grid } => heat(&cfg, t, complex_grid)?,
        Command::Verify { suites } => return verify_cmd(&cfg, &suites),
        Command::DescribeOperator { which } => {
            let hg = cfg.context()?;
            let op = match which {
                OperatorKind::PsiA => build_psi_a_operator(&hg)?,
                OperatorKind::D => build_d_operator(&hg)?,
            };
            println!("{}", op.to_json()?);
        }
    }
    Ok(Ok(()))
}

fn eval(hg: &Hypergeometric, q: Quantity, lambda: &[String], point: &[String], cap: usize) -> Result<serde_json::Value, Error> {
    let rank = hg.rank();
    let real = |v: &CVector| Vector::new(v[0].re, v[1].re);
    let value = match q {
        Quantity::Phi => {
            let l = parse_cvector(lambda, rank, "--lambda")?;
            let h = parse_cvector(point, rank, "--point")?;
            let a = TorusPoint::from_log(&hg.rs, &h)?;
            let v = hg.hypergeometric_function(&SpectralParameter::new(l), &a, Method::Auto)?;
            json!({"re": v.re, "im": v.im})
        }
        Quantity::C => {
            let v = hg.c(&parse_cvector(lambda, rank, "--lambda")?)?;
            json!({"re": v.re, "im": v.im})
        }
        Quantity::Gamma => {
            let l = SpectralParameter::new(parse_cvector(lambda, rank, "--lambda")?);
            let table = gamma_coefficients(hg, &l, cap)?;
            let mut rows = Vec::new();
            let top = cap as u32;
            for n1 in 0..=top {
                for n2 in 0..=if rank == 2 { top - n1 } else { 0 } {
                    if let Some(v) = table.get([n1, n2]) {
                        rows.push(json!({"n": [n1, n2], "re": v.re, "im": v.im}));
                    }
                }
            }
            json!(rows)
        }
        Quantity::Delta => json!(hg.delta(&real(&parse_cvector(point, rank, "--point")?))),
        Quantity::PlancherelDensity => json!(hg.plancherel_density(&real(&parse_cvector(lambda, rank, "--lambda")?))?),
    };
    Ok(json!({"root_system": hg.rs.kind.to_string(), "quantity": format!("{}", q.to_possible_value().unwrap().get_name()), "value": value}))
}

fn transform_for<'a>(cfg: &RunConfig, hg: &'a Hypergeometric) -> Result<HyperTransform<'a>, Error> {
    let (s, l) = cfg.grid_specs(hg);
    HyperTransform::from_specs(hg, s, l)
}

fn input_function(cfg: &RunConfig, tr: &HyperTransform, input: Option<&Path>) -> Result<GridFunction, Error> {
    match input {
        Some(p) => {
            let f = read_grid_function(p)?;
            if f.grid.spec != tr.space.spec && f.grid.spec != tr.spectrum.spec {
                return Err(Error::SchemaMismatch(format!("grid in {} does not match the configured grids", p.display())));
            }
            Ok(f)
        }
        None => Ok(tr.sample(|x| cfg.test_function.eval(&tr.hg.weyl, x))),
    }
}

fn transform(cfg: &RunConfig, kind: TransformKind, input: Option<&Path>) -> Result<(), Error> {
    let hg = cfg.context()?;
    let tr = transform_for(cfg, &hg)?;
    let f = input_function(cfg, &tr, input)?;
    let (name, g) = match kind {
        TransformKind::Forward => ("forward", tr.forward(&f)?),
        TransformKind::Inverse => {
            let big_f = if input.is_some() { f.clone() } else { tr.forward(&f)? };
            ("inverse", tr.inverse(&big_f)?)
        }
        TransformKind::Abel => ("abel", tr.abel(&f)?),
        TransformKind::Lambda => ("lambda", tr.lambda_map(&f)?),
    };
    let dir = output_dir(cfg)?;
    let path = dir.join(format!("{name}.csv"));
    write_grid_function(&path, &g)?;
    let mut report = json!({"transform": name, "output": path, "nodes": g.values.len()});
    if matches!(kind, TransformKind::Forward) {
        let p = tr.plancherel_with(&f, &g);
        report["plancherel"] = json!({"lhs": p.lhs, "rhs": p.rhs, "defect": p.defect()});
    }
    write_json(&dir.join(format!("{name}_report.json")), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn heat(cfg: &RunConfig, t: Option<f64>, complex_grid: bool) -> Result<(), Error> {
    let hg = cfg.context()?;
    let tr = transform_for(cfg, &hg)?;
    let f = tr.sample(|x| cfg.test_function.eval(&hg.weyl, x));
    let big_f = tr.forward(&f)?;
    let times = match t {
        Some(t) if t > 0.0 => vec![t],
        Some(t) => return Err(Error::InvalidInput(format!("t must be positive, got {t}"))),
        None => cfg.times.clone(),
    };
    let dir = output_dir(cfg)?;
    let norm_f = tr.norm_sq_dmu(&f).sqrt();
    let norms = heat_norms(&tr, &big_f, &times)?;
    let mut rows = Vec::new();
    for (&t, n) in times.iter().zip(&norms) {
        let u = heat_solution_grid(&tr, &big_f, t)?;
        write_grid_function(&dir.join(format!("heat_t{t}.csv")), &u)?;
        let mut row = json!({"t": t, "norm": n, "norm_ratio": n / norm_f, "semigroup_defect": semigroup_defect(&tr, &big_f, t / 2.0, t / 2.0)?});
        if complex_grid {
            let grids = FockGrids::default_for(hg.rank(), tr.space.spec.radius, tr.spectrum.spec.radius, t);
            let lf = lambda_extension_grid(&tr, &big_f, t, &grids)?;
            let p = dir.join(format!("lambda_heat_t{t}.csv"));
            write_holomorphic(&p, &lf)?;
            row["complex_grid"] = json!(p);
        }
        rows.push(row);
    }
    let report = json!({"root_system": hg.rs.kind.to_string(), "initial_norm": norm_f, "times": rows});
    write_json(&dir.join("heat_report.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn verify_cmd(cfg: &RunConfig, names: &[String]) -> Result<Result<(), Unverified>, Error> {
    let suites: Vec<Suite> = if names.iter().any(|n| n == "all") {
        Suite::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?
    };
    let opts = VerifyOptions { seed: cfg.seed, times: cfg.times.clone(), tolerances: cfg.tolerances.clone() };
    let report = verify::run(&suites, &opts);
    for s in &report.suites {
        println!("{} {} ({} checks, {:.1}s)", if s.pass { "PASS" } else { "FAIL" }, s.suite, s.checks.len(), s.seconds);
        for c in s.checks.iter().filter(|c| !c.pass) {
            println!("  {}: defect {:.3e} > {:.1e} ({})", c.name, c.defect, c.tolerance, c.statement);
        }
    }
    let path = output_dir(cfg)?.join("verify_report.json");
    write_json(&path, &report)?;
    println!("report written to {}", path.display());
    Ok(if report.pass { Ok(()) } else { Err(Unverified) })
}
