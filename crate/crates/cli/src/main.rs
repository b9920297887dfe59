use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fillvol::complex::{census_figure_eight, load_complex, TruncatedComplex};
use fillvol::peripheral::{a_polynomial, factor_hint, FillingOptions, FillingVector, LaurentPoly};
use fillvol::pipeline::{run_volume, VolumeConfig, VolumeOutcome};
use fillvol::{Complex64, Error};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "fillvol",
    version,
    about = "Complex volumes of Dehn fillings from deformed Ptolemy varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a filling and report Ψ, volume and Chern-Simons invariant.
    Volume(RunArgs),
    /// Run all consistency checks and print the residuals.
    Check(RunArgs),
    /// Eliminant of a two-tetrahedron one-cusp triangulation.
    Apoly {
        #[command(flatten)]
        source: Source,
        /// Also print the polynomial at M = 1 with a factorization.
        #[arg(long)]
        at_m1: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Bundled triangulation (`fig8`).
    #[arg(long)]
    census: Option<String>,
    /// Triangulation JSON file.
    #[arg(long)]
    triangulation: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Per cusp `r/s` or `inf`, comma separated.
    #[arg(long)]
    fill: String,
    /// Holonomy seeds `Mre,Mim,Lre,Lim` per cusp, `;` separated.
    #[arg(long)]
    holonomy: Option<String>,
    /// `u,v` per cusp, `;` separated.
    #[arg(long)]
    uv: Option<String>,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
    k_min: i64,
    #[arg(long, default_value_t = 8, allow_hyphen_values = true)]
    k_max: i64,
    /// Report Chern-Simons modulo π² instead of π²/2.
    #[arg(long)]
    link_exterior: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Decimal places in the output.
    #[arg(long, default_value_t = 9)]
    precision: usize,
    #[arg(long, hide = true)]
    corrupt_a: bool,
}

/// Failure classes with their exit codes.
enum Failure {
    Numeric(anyhow::Error),
    Config(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Numeric(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

fn config<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Config(e.into())
}

fn classify(e: Error) -> Failure {
    match e {
        Error::NoSolution
        | Error::Holonomy { .. }
        | Error::Incongruent(_)
        | Error::Degenerate(_)
        | Error::Empty
        | Error::NotNormal(_)
        | Error::Resultant(_)
        | Error::ZeroGauge(_)
        | Error::ZeroTarget(_) => Failure::Numeric(e.into()),
        other => Failure::Config(other.into()),
    }
}

fn load(source: &Source) -> Result<TruncatedComplex, Failure> {
    match (&source.census, &source.triangulation) {
        (Some(name), _) => match name.as_str() {
            "fig8" | "figure-eight" | "4_1" | "m004" => Ok(census_figure_eight().0),
            other => Err(config(anyhow!("unknown census triangulation {other:?}"))),
        },
        (None, Some(path)) => {
            let bytes = std::fs::read(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(config)?;
            load_complex(&bytes).map_err(|e| {
                config(anyhow::Error::from(e).context(format!("loading {}", path.display())))
            })
        }
        (None, None) => Err(config(anyhow!(
            "one of --census or --triangulation is required"
        ))),
    }
}

fn parse_holonomy(s: &str) -> anyhow::Result<Vec<(Complex64, Complex64)>> {
    s.split(';')
        .map(|part| {
            let xs: Vec<f64> = part
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()?;
            let [mr, mi, lr, li] = xs[..] else {
                bail!("expected Mre,Mim,Lre,Lim, got {part:?}")
            };
            Ok((Complex64::new(mr, mi), Complex64::new(lr, li)))
        })
        .collect()
}

fn parse_uv(s: &str) -> anyhow::Result<Vec<(i64, i64)>> {
    s.split(';')
        .map(|part| {
            let (u, v) = part
                .split_once(',')
                .ok_or_else(|| anyhow!("expected u,v, got {part:?}"))?;
            Ok((u.trim().parse()?, v.trim().parse()?))
        })
        .collect()
}

fn round(x: f64, digits: usize) -> Value {
    let s = format!("{x:.digits$}");
    let v: f64 = s.parse().unwrap_or(x);
    // avoid "-0.0"
    json!(if v == 0.0 { 0.0 } else { v })
}

fn pair(z: Complex64, digits: usize) -> Value {
    json!([round(z.re, digits), round(z.im, digits)])
}

fn fmt_complex(z: Complex64, digits: usize) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.digits$} {sign} {:.digits$}i", z.re, z.im.abs())
}

struct Run {
    args: RunArgs,
    cx: TruncatedComplex,
    config: VolumeConfig,
}

fn prepare(args: RunArgs) -> Result<Run, Failure> {
    // The filling is validated before anything else is loaded or solved.
    let filling: FillingVector = args.fill.parse().map_err(config)?;
    let holonomy = args
        .holonomy
        .as_deref()
        .map(parse_holonomy)
        .transpose()
        .map_err(config)?;
    let uv = args
        .uv
        .as_deref()
        .map(parse_uv)
        .transpose()
        .map_err(config)?;
    if args.k_min > args.k_max {
        return Err(config(anyhow!("--k-min exceeds --k-max")));
    }
    let cx = load(&args.source)?;
    let h = cx.cusp_count();
    if filling.0.len() != h {
        return Err(config(anyhow!(
            "--fill has {} entries for {h} cusps",
            filling.0.len()
        )));
    }
    if holonomy.as_ref().is_some_and(|x| x.len() != h) || uv.as_ref().is_some_and(|x| x.len() != h)
    {
        return Err(config(anyhow!(
            "--holonomy and --uv need one entry per cusp ({h})"
        )));
    }
    let config = VolumeConfig {
        filling,
        holonomy,
        uv,
        options: FillingOptions {
            k_range: (args.k_min, args.k_max),
            starts: args.starts,
            seed: args.seed,
            tol: args.tol,
            initial: None,
        },
        link_exterior: args.link_exterior,
        corrupt_a: args.corrupt_a,
        independence_trials: 10,
    };
    Ok(Run { args, cx, config })
}

fn report_json(run: &Run, out: &VolumeOutcome) -> Value {
    let d = run.args.precision;
    let sel = out.selected();
    let candidates: Vec<Value> = out
        .candidates
        .iter()
        .map(|c| {
            json!({
                "M": c.targets.iter().map(|t| pair(t.0, d)).collect::<Vec<_>>(),
                "L": c.targets.iter().map(|t| pair(t.1, d)).collect::<Vec<_>>(),
                "k": c.k,
                "volume": round(c.volume, d),
            })
        })
        .collect();
    let checks: serde_json::Map<String, Value> = out
        .checks
        .iter()
        .map(|c| {
            (
                c.name.to_string(),
                json!({ "residual": c.residual, "tol": c.tol, "passed": c.passed }),
            )
        })
        .collect();
    let r = &out.report;
    json!({
        "input": {
            "triangulation": run.args.source.census.clone().unwrap_or_else(|| {
                run.args.source.triangulation.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
            }),
            "fill": run.config.filling.to_string(),
            "uv": run.config.uv,
            "starts": run.args.starts,
            "seed": run.args.seed,
            "tol": run.args.tol,
            "k_range": [run.args.k_min, run.args.k_max],
            "link_exterior": run.args.link_exterior,
        },
        "candidates": candidates,
        "selected": {
            "M": sel.targets.iter().map(|t| pair(t.0, d)).collect::<Vec<_>>(),
            "L": sel.targets.iter().map(|t| pair(t.1, d)).collect::<Vec<_>>(),
            "k": sel.k,
            "uv": out.b.uv(),
            "psi": pair(r.psi, d),
            "volume": round(r.volume, d),
            "cs": round(r.cs, d),
            "modulus": r.modulus,
        },
        "checks": checks,
    })
}

fn print_checks(out: &VolumeOutcome) {
    println!("{:<18} {:>12} {:>10}  status", "check", "residual", "tol");
    for c in &out.checks {
        println!(
            "{:<18} {:>12.3e} {:>10.0e}  {}",
            c.name,
            c.residual,
            c.tol,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
}

fn cmd_run(args: RunArgs, full: bool) -> Result<(), Failure> {
    let run = prepare(args)?;
    let out = run_volume(&run.cx, &run.config).map_err(classify)?;
    let d = run.args.precision;
    match run.args.format {
        Format::Json => {
            let mut v = report_json(&run, &out);
            if !full {
                v = json!({ "input": v["input"], "checks": v["checks"] });
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("serializable")
            );
        }
        Format::Text => {
            if full {
                let sel = out.selected();
                for (j, (m, l)) in sel.targets.iter().enumerate() {
                    println!(
                        "cusp {j}: M = {}, L = {}",
                        fmt_complex(*m, d),
                        fmt_complex(*l, d)
                    );
                }
                let ks: Vec<String> = sel
                    .k
                    .iter()
                    .map(|k| k.map_or("-".into(), |k| k.to_string()))
                    .collect();
                println!("k = [{}], (u, v) = {:?}", ks.join(", "), out.b.uv());
                println!("psi = {}", fmt_complex(out.report.psi, d));
                println!("volume = {:.d$}", out.report.volume);
                println!(
                    "cs = {:.d$} (mod {:.d$})",
                    out.report.cs,
                    out.report.modulus.value()
                );
            }
            print_checks(&out);
        }
    }
    if out.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = out
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        Err(Failure::Numeric(anyhow!(
            "checks failed: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_apoly(source: &Source, at_m1: bool) -> Result<(), Failure> {
    let cx = load(source)?;
    let poly = a_polynomial(&cx).map_err(classify)?;
    println!("{poly}");
    if at_m1 {
        let coeffs = poly.at_m_equals_one();
        let at = LaurentPoly(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, &c)| ((0, i as i32), c))
                .collect(),
        );
        println!("M=1: {at} = {}", factor_hint(&coeffs));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = match &cli.command {
        Command::Volume(a) | Command::Check(a) => matches!(a.format, Format::Json),
        Command::Apoly { .. } => false,
    };
    let result = match cli.command {
        Command::Volume(args) => cmd_run(args, true),
        Command::Check(args) => cmd_run(args, false),
        Command::Apoly { source, at_m1 } => cmd_apoly(&source, at_m1),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, err) = match &f {
                Failure::Numeric(e) => ("numeric", e),
                Failure::Config(e) => ("config", e),
            };
            if json_errors {
                let v = json!({ "error": { "kind": kind, "message": format!("{err:#}") } });
                eprintln!("{}", serde_json::to_string(&v).expect("serializable"));
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(f.code())
        }
    }
}
