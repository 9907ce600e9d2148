use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use paswipt::config_file::ConfigFile;
use paswipt::energy::{avg_energy_lm_closed, avg_energy_nlm_bound, avg_energy_quadrature};
use paswipt::montecarlo::{estimate, DEFAULT_SAMPLES, DEFAULT_SEED};
use paswipt::rate::{avg_rate_closed, avg_rate_quadrature};
use paswipt::sweep::{self, AxisGrid, Experiment, Method, Preset, SweepSpec};
use paswipt::{McOptions, Metric, ModelKind, QuadratureOptions, Scenario64, Scheme};

/// Energy and rate analysis for pinching-antenna SWIPT deployments.
#[derive(Debug, Parser)]
#[command(name = "paswipt", version)]
struct Cli {
    /// TOML configuration file; omitted keys take the reference values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the squared-distance law (l, cdf, pdf) on 1000 points.
    Dist {
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        /// Output file; stdout when omitted.
        #[arg(long, value_name = "PATH")]
        emit_cdf: Option<PathBuf>,
    },
    /// Average harvested energy for one scheme and model, as a CSV row.
    Energy {
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
        /// Transmit power in watts.
        #[arg(long)]
        pt_w: f64,
        /// Add a Monte-Carlo estimate.
        #[arg(long)]
        mc: bool,
        #[command(flatten)]
        mc_args: McArgs,
    },
    /// Average achievable rate for one scheme, as a CSV row.
    Rate {
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        /// Transmit power in watts.
        #[arg(long)]
        pt_w: f64,
        /// closed, quad or mc; repeat for several. Defaults to closed.
        #[arg(long = "method", value_parser = parse_rate_method)]
        methods: Vec<Method>,
        #[command(flatten)]
        mc_args: McArgs,
    },
    /// Run a parameter sweep and write CSV plus a plot script.
    Sweep {
        /// energy, rate or region.
        #[arg(long, value_parser = parse_experiment)]
        experiment: Experiment,
        /// s1, s2, c1, c2 or fig4.
        #[arg(long, value_parser = parse_preset)]
        preset: Option<Preset>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Add Monte-Carlo rows to power sweeps.
        #[arg(long)]
        mc: bool,
        /// Transmit power for region sweeps, overriding preset and config.
        #[arg(long)]
        pt_w: Option<f64>,
        /// Number of grid points.
        #[arg(long)]
        points: Option<usize>,
        /// Skip writing the plot script.
        #[arg(long)]
        no_plot: bool,
        #[command(flatten)]
        mc_args: McArgs,
    },
}

#[derive(Debug, Args)]
struct McArgs {
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    /// Monte-Carlo seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl McArgs {
    fn options(&self) -> McOptions {
        McOptions {
            samples: self.samples,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_rate_method(s: &str) -> Result<Method, String> {
    match s.parse() {
        Ok(Method::Bound) => Err("the bound applies to harvested energy only".into()),
        other => other.map_err(|e| format!("{e}")),
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(ConfigFile::default()),
    }
}

fn scenario(file: &ConfigFile, pt_w: f64) -> Result<Scenario64> {
    Ok(file.to_scenario(Some(pt_w))?)
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn run_dist(file: &ConfigFile, scheme: Scheme, out: Option<&Path>) -> Result<()> {
    // The squared-distance law does not depend on power; any valid value works.
    let sc = file.to_scenario(Some(file.system.transmit_power_w.unwrap_or(1.0)))?;
    let dist = paswipt::Distribution64::new(sc.deployment(scheme));
    let (lo, hi) = dist.support();
    let mut w: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    writeln!(w, "l,cdf,pdf")?;
    // The density is unbounded at l = h^2, so the grid starts one step in.
    for i in 1..=1000u32 {
        let l = if i == 1000 {
            hi
        } else {
            lo + (hi - lo) * f64::from(i) / 1000.0
        };
        writeln!(w, "{},{},{}", l, dist.cdf(l), dist.pdf(l)?)?;
    }
    w.flush().with_context(|| {
        out.map_or("flushing stdout".into(), |p| {
            format!("writing {}", p.display())
        })
    })?;
    Ok(())
}

fn run_energy(
    file: &ConfigFile,
    scheme: Scheme,
    model: ModelKind,
    pt_w: f64,
    mc: Option<McOptions>,
) -> Result<()> {
    let sc = scenario(file, pt_w)?;
    let dep = sc.deployment(scheme);
    let harvest = sc.harvest(model);
    let (closed, bound) = match model {
        ModelKind::Linear => (
            Some(avg_energy_lm_closed(&dep, &sc.system, &sc.protocol, harvest)?.value_w),
            None,
        ),
        ModelKind::Logistic => (
            None,
            Some(avg_energy_nlm_bound(&dep, &sc.system, &sc.protocol, harvest)?.value_w),
        ),
    };
    let quad = avg_energy_quadrature(
        &dep,
        &sc.system,
        &sc.protocol,
        harvest,
        &QuadratureOptions::default(),
    )?
    .value_w;
    let est = mc
        .map(|opts| estimate(Metric::energy(model), scheme, &sc, &opts))
        .transpose()?;
    println!("scheme,model,pt_w,closed_w,bound_w,quadrature_w,mc_mean_w,mc_std_error_w");
    println!(
        "{}",
        csv_line(&[
            scheme.to_string(),
            model.to_string(),
            pt_w.to_string(),
            opt(closed),
            opt(bound),
            quad.to_string(),
            opt(est.map(|e| e.mean)),
            opt(est.map(|e| e.std_error)),
        ])
    );
    Ok(())
}

fn run_rate(
    file: &ConfigFile,
    scheme: Scheme,
    pt_w: f64,
    methods: &[Method],
    mc: McOptions,
) -> Result<()> {
    let sc = scenario(file, pt_w)?;
    let dep = sc.deployment(scheme);
    let mut methods = methods.to_vec();
    if methods.is_empty() {
        methods.push(Method::Closed);
    }
    methods.sort();
    methods.dedup();
    let mut header = vec!["scheme".to_string(), "pt_w".to_string()];
    let mut row = vec![scheme.to_string(), pt_w.to_string()];
    for m in methods {
        match m {
            Method::Closed => {
                header.push("closed_bits_s_hz".into());
                row.push(
                    avg_rate_closed(&dep, &sc.system, &sc.protocol)
                        .bits_per_s_per_hz
                        .to_string(),
                );
            }
            Method::Quadrature => {
                header.push("quadrature_bits_s_hz".into());
                let r = avg_rate_quadrature(
                    &dep,
                    &sc.system,
                    &sc.protocol,
                    &QuadratureOptions::default(),
                )?;
                row.push(r.bits_per_s_per_hz.to_string());
            }
            Method::MonteCarlo => {
                header.push("mc_mean_bits_s_hz".into());
                header.push("mc_std_error_bits_s_hz".into());
                let e = estimate(Metric::Rate, scheme, &sc, &mc)?;
                row.push(e.mean.to_string());
                row.push(e.std_error.to_string());
            }
            Method::Bound => unreachable!("rejected by the argument parser"),
        }
    }
    println!("{}", csv_line(&header));
    println!("{}", csv_line(&row));
    Ok(())
}

struct SweepArgs {
    experiment: Experiment,
    preset: Option<Preset>,
    out: PathBuf,
    mc: bool,
    pt_w: Option<f64>,
    points: Option<usize>,
    plot: bool,
    mc_opts: McOptions,
}

fn run_sweep(file: &ConfigFile, a: SweepArgs) -> Result<()> {
    let power_sweep = a.experiment != Experiment::EnergyRateRegion;
    // Power sweeps overwrite P_t at every grid point.
    let pt = match (a.pt_w, file.system.transmit_power_w) {
        (Some(p), _) | (None, Some(p)) => Some(p),
        (None, None) if power_sweep || a.preset == Some(Preset::Fig4) => {
            Some(AxisGrid::default_power().min)
        }
        (None, None) => None,
    };
    let mut base = file.to_config(pt)?;
    if let Some(preset) = a.preset {
        preset.apply(&mut base);
    }
    if let Some(p) = a.pt_w {
        base.transmit_power_w = p;
    }
    let mut spec = SweepSpec::new(a.experiment, base);
    if let Some(n) = a.points {
        spec.grid.points = n;
    }
    if a.mc {
        if !power_sweep {
            bail!("--mc applies to energy and rate sweeps only");
        }
        spec.methods.push(Method::MonteCarlo);
    }
    spec.mc = a.mc_opts;
    let table = sweep::run(&spec)?;
    for path in sweep::emit_outputs(&table, &a.out, a.plot)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let file = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Dist { scheme, emit_cdf } => run_dist(&file, scheme, emit_cdf.as_deref()),
        Command::Energy {
            scheme,
            model,
            pt_w,
            mc,
            mc_args,
        } => run_energy(&file, scheme, model, pt_w, mc.then(|| mc_args.options())),
        Command::Rate {
            scheme,
            pt_w,
            methods,
            mc_args,
        } => run_rate(&file, scheme, pt_w, &methods, mc_args.options()),
        Command::Sweep {
            experiment,
            preset,
            out,
            mc,
            pt_w,
            points,
            no_plot,
            mc_args,
        } => run_sweep(
            &file,
            SweepArgs {
                experiment,
                preset,
                out,
                mc,
                pt_w,
                points,
                plot: !no_plot,
                mc_opts: mc_args.options(),
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
