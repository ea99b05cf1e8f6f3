use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cechlab::textio::{bit, sig17};
use cechlab::{
    betti_numbers, build_complex, count_theta_cycles, enumerate_critical_points, is_covered, sample_poisson_seeded,
    sweep, CechComplex, GeometryContext, PointCloud, SweepConfig,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cechlab", version, about = "Random Čech complexes on the flat torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Poisson point cloud on the unit torus and write it as CSV.
    Sample {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        intensity: f64,
        #[arg(long)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the Čech complex of a point cloud.
    Complex {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        scale: Scale,
        /// Largest simplex dimension to store (default d+1).
        #[arg(long = "max-sdim")]
        max_sdim: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Betti numbers and Euler characteristic of a stored complex.
    Betti {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Critical points of the distance function with value at most r.
    Critical {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        scale: Scale,
    },
    /// Θ-cycle counts and the φ values of all window candidates.
    Theta {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        scale: Scale,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Whether the r-balls around the cloud cover the torus.
    Coverage {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        scale: Scale,
    },
    /// Run a Monte Carlo sweep described by a key=value config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Radius given directly or through `Λ = ω_d N r^d` with the realized count `N`.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Scale {
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

impl Scale {
    fn radius(&self, cloud: &PointCloud, ctx: &GeometryContext) -> Result<f64> {
        match (self.radius, self.lambda) {
            (Some(r), _) => Ok(r),
            (None, Some(l)) => {
                anyhow::ensure!(!cloud.is_empty(), "--lambda needs a nonempty cloud");
                Ok(ctx.radius_for_lambda(cloud.len() as f64, l))
            }
            (None, None) => unreachable!("clap enforces one of --radius/--lambda"),
        }
    }
}

fn read_cloud(path: &Path) -> Result<PointCloud> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    PointCloud::read_csv(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<()> {
    let mut stdout = BufWriter::new(io::stdout().lock());
    match cli.command {
        Command::Sample {
            dim,
            intensity,
            seed,
            out,
        } => {
            let ctx = GeometryContext::new(dim)?;
            let cloud = sample_poisson_seeded(intensity, &ctx, seed)?;
            let mut w = output(out.as_deref())?;
            cloud.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Complex {
            input,
            scale,
            max_sdim,
            out,
        } => {
            let cloud = read_cloud(&input)?;
            let ctx = GeometryContext::new(cloud.dim())?;
            let r = scale.radius(&cloud, &ctx)?;
            let cplx = build_complex(&cloud, r, max_sdim.unwrap_or(ctx.dim + 1), &ctx)?;
            let mut w = output(Some(&out))?;
            cplx.write_text(&mut w)?;
            w.flush()?;
        }
        Command::Betti { input } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let cplx = CechComplex::read_text(BufReader::new(file))?;
            let b = betti_numbers(&cplx)?;
            writeln!(stdout, "betti={}", joined(&b.betti))?;
            writeln!(stdout, "euler_characteristic={}", b.chi_from_betti)?;
            writeln!(stdout, "simplex_counts={}", joined(&b.simplex_counts))?;
        }
        Command::Critical { input, scale } => {
            let cloud = read_cloud(&input)?;
            let ctx = GeometryContext::new(cloud.dim())?;
            let r = scale.radius(&cloud, &ctx)?;
            let census = enumerate_critical_points(&cloud, r, &ctx)?;
            writeln!(stdout, "radius={}", sig17(r))?;
            writeln!(stdout, "counts={}", joined(&census.counts))?;
            writeln!(stdout, "euler_characteristic={}", census.chi_morse)?;
            writeln!(stdout, "ties={} degenerate={}", census.ties, census.degenerate)?;
            writeln!(stdout, "index;subset;center;value")?;
            for k in 1..=ctx.dim {
                for c in census.critical(k) {
                    let center: Vec<String> = c.center.coords().iter().map(|&x| sig17(x)).collect();
                    writeln!(
                        stdout,
                        "{k};{};{};{}",
                        joined(&c.subset_indices),
                        center.join(","),
                        sig17(c.circumradius)
                    )?;
                }
            }
        }
        Command::Theta { input, scale, epsilon } => {
            let cloud = read_cloud(&input)?;
            let ctx = GeometryContext::new(cloud.dim())?;
            let r = scale.radius(&cloud, &ctx)?;
            let out = count_theta_cycles(&cloud, r, epsilon, &ctx)?;
            let p = &out.params;
            writeln!(
                stdout,
                "radius={} lambda={} epsilon={}",
                sig17(r),
                sig17(p.lambda),
                p.epsilon
            )?;
            writeln!(stdout, "r_prime={} r_dprime={}", sig17(p.r_prime), sig17(p.r_dprime))?;
            writeln!(stdout, "theta_counts={}", joined(&out.counts))?;
            // annulus is "-" where the certificate was not needed
            writeln!(stdout, "index;subset;value;phi;isolated;annulus;counted")?;
            for c in &out.window {
                writeln!(
                    stdout,
                    "{};{};{};{};{};{};{}",
                    c.candidate.index_k,
                    joined(&c.candidate.subset_indices),
                    sig17(c.candidate.circumradius),
                    sig17(c.phi),
                    bit(c.isolation_certified),
                    c.annulus_certified.map_or("-", bit),
                    bit(c.counted)
                )?;
            }
        }
        Command::Coverage { input, scale } => {
            let cloud = read_cloud(&input)?;
            let ctx = GeometryContext::new(cloud.dim())?;
            let r = scale.radius(&cloud, &ctx)?;
            writeln!(stdout, "covered={}", bit(is_covered(&cloud, r, &ctx)?))?;
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = SweepConfig::parse(&text)?;
            let report = sweep(&cfg)?;
            if cfg.outputs.is_none() {
                report.write_csv(&mut stdout)?;
                eprint!("{}", report.summary_text());
            } else {
                if report.results.is_empty() {
                    writeln!(stdout, "empty grid; wrote header only")?;
                }
                write!(stdout, "{}", report.summary_text())?;
            }
        }
    }
    stdout.flush()?;
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
