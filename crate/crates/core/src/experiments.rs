//! Seeded Monte Carlo sweeps, per-trial records and constant estimation.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use crate::cech::build_complex;
use crate::error::{Error, Result};
use crate::geometry::GeometryContext;
use crate::homology::betti_numbers;
use crate::morse::{enumerate_critical_points, euler_coefficients, is_covered, poisson_upper_tail};
use crate::sampling::{sample_poisson_seeded, RngStream};
use crate::textio::{bit, sig17};
use crate::theta::{count_theta_cycles_in, ThetaParams};

/// How the `Λ` grid is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaRule {
    /// Explicit `Λ` values.
    Absolute(Vec<f64>),
    /// `Λ = log n + c·log log n + w` for each `w`.
    Offset { c: f64, w: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub dim: usize,
    pub n_values: Vec<f64>,
    pub lambda_rule: LambdaRule,
    pub trials: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub outputs: Option<PathBuf>,
}

/// One `(n, Λ)` cell of the sweep grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub n: f64,
    pub lambda: f64,
    /// Offset `w` when the grid uses the offset rule.
    pub w: Option<f64>,
    pub r: f64,
}

impl SweepConfig {
    /// Parses flat `key=value` text; lists are comma-separated and `#` starts a comment.
    ///
    /// Keys: `dim`, `n_values`, `lambda_rule` (`absolute` or `offset`),
    /// `lambda` (absolute rule), `c` and `w` (offset rule), `trials`,
    /// `master_seed`, `epsilon`, `outputs`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut n_values = None;
        let mut rule = None;
        let mut lambda = None;
        let mut c = None;
        let mut w = None;
        let mut trials = None;
        let mut master_seed = 0u64;
        let mut epsilon = crate::theta::DEFAULT_EPSILON;
        let mut outputs = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key=value, found {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: String| Error::Parse {
                line: i + 1,
                msg: format!("{key}: {e}"),
            };
            match key {
                "dim" => dim = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "n_values" => n_values = Some(parse_list(value).map_err(bad)?),
                "lambda_rule" => rule = Some(value.to_string()),
                "lambda" => lambda = Some(parse_list(value).map_err(bad)?),
                "c" => c = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "w" => w = Some(parse_list(value).map_err(bad)?),
                "trials" => trials = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "master_seed" => master_seed = value.parse::<u64>().map_err(|e| bad(e.to_string()))?,
                "epsilon" => epsilon = value.parse::<f64>().map_err(|e| bad(e.to_string()))?,
                "outputs" => outputs = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        let missing = |k: &str| Error::Config(format!("missing key {k}"));
        let lambda_rule = match rule.as_deref() {
            Some("absolute") | None if lambda.is_some() => LambdaRule::Absolute(lambda.unwrap()),
            Some("offset") | None if w.is_some() => LambdaRule::Offset {
                c: c.ok_or_else(|| missing("c"))?,
                w: w.unwrap(),
            },
            Some("absolute") => return Err(missing("lambda")),
            Some("offset") => return Err(missing("w")),
            Some(other) => return Err(Error::Config(format!("unknown lambda_rule {other:?}"))),
            None => return Err(missing("lambda or w")),
        };
        let config = Self {
            dim: dim.ok_or_else(|| missing("dim"))?,
            n_values: n_values.ok_or_else(|| missing("n_values"))?,
            lambda_rule,
            trials: trials.ok_or_else(|| missing("trials"))?,
            master_seed,
            epsilon,
            outputs,
        };
        config.grid()?;
        Ok(config)
    }

    /// Expands and validates the grid: every `r < r_max`, `Λ > 0`, `trials ≥ 1`.
    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        let ctx = GeometryContext::new(self.dim).map_err(|e| Error::Config(e.to_string()))?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        let mut out = Vec::new();
        for &n in &self.n_values {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Config(format!("intensity must be positive, got {n}")));
            }
            let cells: Vec<(f64, Option<f64>)> = match &self.lambda_rule {
                LambdaRule::Absolute(ls) => ls.iter().map(|&l| (l, None)).collect(),
                LambdaRule::Offset { c, w } => {
                    if n <= std::f64::consts::E {
                        return Err(Error::Config(format!("offset rule needs n > e, got {n}")));
                    }
                    w.iter().map(|&wi| (n.ln() + c * n.ln().ln() + wi, Some(wi))).collect()
                }
            };
            for (lambda, w) in cells {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::Config(format!("Λ must be positive, got {lambda} at n={n}")));
                }
                let r = ctx.radius_for_lambda(n, lambda);
                if r >= ctx.r_max {
                    return Err(Error::Config(format!(
                        "n={n}, Λ={lambda} gives r={r}, which exceeds r_max = r_conv/3 = {}",
                        ctx.r_max
                    )));
                }
                out.push(GridPoint { n, lambda, w, r });
            }
        }
        Ok(out)
    }
}

fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

/// One row of the trial CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub n_realized: usize,
    pub lambda: f64,
    pub r: f64,
    /// `β_0..β_d`.
    pub betti: Vec<usize>,
    /// `C_0..C_d`.
    pub critical: Vec<usize>,
    pub chi_betti: i64,
    pub chi_morse: i64,
    pub covered: bool,
    /// `β_k^ε` for `k = 1..d−1`.
    pub theta: Vec<usize>,
    pub torus_homology_match: bool,
}

impl TrialRecord {
    pub fn csv_header(dim: usize) -> String {
        let mut cols: Vec<String> = ["trial_index", "seed", "n_realized", "lambda", "r"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        cols.extend((0..=dim).map(|k| format!("betti_{k}")));
        cols.extend((0..=dim).map(|k| format!("C_{k}")));
        cols.extend(["chi_betti", "chi_morse", "covered"].iter().map(|s| s.to_string()));
        cols.extend((1..dim).map(|k| format!("theta_{k}")));
        cols.push("torus_homology_match".into());
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.trial_index.to_string(),
            self.seed.to_string(),
            self.n_realized.to_string(),
            sig17(self.lambda),
            sig17(self.r),
        ];
        cols.extend(self.betti.iter().map(usize::to_string));
        cols.extend(self.critical.iter().map(usize::to_string));
        cols.push(self.chi_betti.to_string());
        cols.push(self.chi_morse.to_string());
        cols.push(bit(self.covered).to_string());
        cols.extend(self.theta.iter().map(usize::to_string));
        cols.push(bit(self.torus_homology_match).to_string());
        cols.join(",")
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Seed of trial `trial_index`; `sample --seed` with this value reproduces the cloud.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    RngStream::new(master_seed, trial_index).seed()
}

/// Runs one trial at one grid point. Fails if the two Euler characteristics differ.
pub fn run_trial(config: &SweepConfig, point: &GridPoint, trial_index: u64) -> Result<TrialRecord> {
    let ctx = GeometryContext::new(config.dim)?;
    if point.r >= ctx.r_max {
        return Err(Error::Config(format!(
            "r={} exceeds r_max = r_conv/3 = {}",
            point.r, ctx.r_max
        )));
    }
    let d = config.dim;
    let seed = trial_seed(config.master_seed, trial_index);
    let cloud = sample_poisson_seeded(point.n, &ctx, seed)?;
    let cplx = build_complex(&cloud, point.r, d + 1, &ctx)?;
    let betti = betti_numbers(&cplx)?;
    let census = enumerate_critical_points(&cloud, point.r, &ctx)?;
    if betti.chi_from_betti != census.chi_morse {
        return Err(Error::EulerMismatch {
            trial: trial_index,
            chi_betti: betti.chi_from_betti,
            chi_morse: census.chi_morse,
        });
    }
    let covered = is_covered(&cloud, point.r, &ctx)?;
    let theta = if point.lambda > 1.0 {
        let params = ThetaParams::new(point.r, point.lambda, config.epsilon)?;
        count_theta_cycles_in(&cloud, &census, &params)?.counts
    } else {
        vec![0; d.saturating_sub(1)]
    };
    let torus_homology_match = betti.betti.iter().enumerate().all(|(k, &b)| b == binomial(d, k));
    Ok(TrialRecord {
        trial_index,
        seed,
        n_realized: cloud.len(),
        lambda: point.lambda,
        r: point.r,
        betti: betti.betti,
        critical: census.counts,
        chi_betti: betti.chi_from_betti,
        chi_morse: census.chi_morse,
        covered,
        theta,
        torus_homology_match,
    })
}

/// All trials of one grid point, in trial order.
#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub point: GridPoint,
    pub records: Vec<TrialRecord>,
}

/// Runs every trial of `point` in parallel; results are returned in trial order.
pub fn run_grid_point(config: &SweepConfig, point: &GridPoint) -> Result<GridResult> {
    let records = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, point, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(GridResult { point: *point, records })
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mean {
    pub mean: f64,
    pub se: f64,
}

impl Mean {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let xs: Vec<f64> = xs.into_iter().collect();
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self { mean, se: f64::NAN };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            se: (var / n).sqrt(),
        }
    }
}

/// Empirical proportion with a 95% Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn wilson(successes: usize, trials: usize) -> Self {
        const Z: f64 = 1.959_963_984_540_054;
        if trials == 0 {
            return Self {
                successes,
                trials,
                p: f64::NAN,
                lo: 0.0,
                hi: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z * Z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            successes,
            trials,
            p,
            lo: (center - half).max(0.0),
            hi: (center + half).min(1.0),
        }
    }
}

/// Per-grid-point summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSummary {
    pub point: GridPoint,
    pub coverage: Proportion,
    pub homology_match: Proportion,
    pub betti: Vec<Mean>,
    pub critical: Vec<Mean>,
    pub theta: Vec<Mean>,
    pub theta_positive: Vec<Proportion>,
}

impl GridSummary {
    pub fn of(result: &GridResult) -> Self {
        let recs = &result.records;
        let t = recs.len();
        let width = |f: &dyn Fn(&TrialRecord) -> usize| recs.first().map_or(0, f);
        let column = |k: usize, f: &dyn Fn(&TrialRecord) -> &Vec<usize>| Mean::of(recs.iter().map(|r| f(r)[k] as f64));
        let nb = width(&|r| r.betti.len());
        let nc = width(&|r| r.critical.len());
        let nt = width(&|r| r.theta.len());
        Self {
            point: result.point,
            coverage: Proportion::wilson(recs.iter().filter(|r| r.covered).count(), t),
            homology_match: Proportion::wilson(recs.iter().filter(|r| r.torus_homology_match).count(), t),
            betti: (0..nb).map(|k| column(k, &|r| &r.betti)).collect(),
            critical: (0..nc).map(|k| column(k, &|r| &r.critical)).collect(),
            theta: (0..nt).map(|k| column(k, &|r| &r.theta)).collect(),
            theta_positive: (0..nt)
                .map(|k| Proportion::wilson(recs.iter().filter(|r| r.theta[k] > 0).count(), t))
                .collect(),
        }
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let mut s = String::new();
        let p = &self.point;
        let _ = write!(s, "n={} lambda={:.6} r={:.6e}", p.n, p.lambda, p.r);
        if let Some(w) = p.w {
            let _ = write!(s, " w={w}");
        }
        let prop = |q: &Proportion| format!("{:.4} [{:.4},{:.4}]", q.p, q.lo, q.hi);
        let _ = write!(
            s,
            " trials={} covered={} torus_match={}",
            self.coverage.trials,
            prop(&self.coverage),
            prop(&self.homology_match)
        );
        for (k, m) in self.betti.iter().enumerate() {
            let _ = write!(s, " betti_{k}={:.4}±{:.4}", m.mean, m.se);
        }
        for (k, m) in self.critical.iter().enumerate() {
            let _ = write!(s, " C_{k}={:.4}±{:.4}", m.mean, m.se);
        }
        for (k, m) in self.theta.iter().enumerate() {
            let _ = write!(
                s,
                " theta_{}={:.4}±{:.4} P(theta_{}>0)={}",
                k + 1,
                m.mean,
                m.se,
                k + 1,
                prop(&self.theta_positive[k])
            );
        }
        s
    }
}

/// Records of a full sweep plus per-grid-point summaries.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub dim: usize,
    pub results: Vec<GridResult>,
    pub summaries: Vec<GridSummary>,
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", TrialRecord::csv_header(self.dim))?;
        for res in &self.results {
            for rec in &res.records {
                writeln!(out, "{}", rec.csv_row())?;
            }
        }
        Ok(())
    }

    pub fn summary_text(&self) -> String {
        self.summaries.iter().map(|s| s.line() + "\n").collect()
    }
}

/// Runs the whole grid and writes the CSV to `config.outputs` when set.
pub fn sweep(config: &SweepConfig) -> Result<SweepReport> {
    let grid = config.grid()?;
    let writer = match &config.outputs {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let results = grid
        .iter()
        .map(|p| run_grid_point(config, p))
        .collect::<Result<Vec<_>>>()?;
    let report = SweepReport {
        dim: config.dim,
        summaries: results.iter().map(GridSummary::of).collect(),
        results,
    };
    if let Some(mut w) = writer {
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(report)
}

/// Point estimate with standard error and a 95% normal interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Estimate {
    fn new(value: f64, se: f64) -> Self {
        Self {
            value,
            se,
            lo: value - 1.96 * se,
            hi: value + 1.96 * se,
        }
    }
}

/// Fitted constants of the expectation formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantFit {
    pub dim: usize,
    pub lambdas: Vec<f64>,
    /// `D̂_1..D̂_d`.
    pub d_hat: Vec<Estimate>,
    /// Relative residuals `(ȳ − D̂ g)/(D̂ g)` per index and grid point.
    pub residuals: Vec<Vec<f64>>,
    /// `Â_1..Â_{d−1}` implied by the `D̂_k`.
    pub a_from_d: Vec<Estimate>,
    /// `Â_1..Â_{d−1}` fitted directly to the mean Euler characteristic.
    pub a_direct: Vec<Estimate>,
    /// `Σ (−1)^{k−1} D̂_k`, which should equal 1.
    pub a0: Estimate,
}

impl ConstantFit {
    pub fn max_abs_residual(&self, k: usize) -> f64 {
        self.residuals[k - 1].iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Critical-point counts `C_0..C_d` of every trial at one grid point.
#[derive(Clone, Debug)]
pub struct CensusSeries {
    pub n: f64,
    pub lambda: f64,
    pub counts: Vec<Vec<usize>>,
}

impl CensusSeries {
    pub fn of(result: &GridResult) -> Self {
        Self {
            n: result.point.n,
            lambda: result.point.lambda,
            counts: result.records.iter().map(|r| r.critical.clone()).collect(),
        }
    }
}

/// Least-squares fit of `D_k` and `A_j` over a `Λ` grid.
pub fn estimate_constants(results: &[GridResult]) -> Result<ConstantFit> {
    let series: Vec<CensusSeries> = results.iter().map(CensusSeries::of).collect();
    fit_constants(&series)
}

/// [`estimate_constants`] on bare critical-point counts.
pub fn fit_constants(results: &[CensusSeries]) -> Result<ConstantFit> {
    let d = results
        .iter()
        .find_map(|g| g.counts.first())
        .ok_or_else(|| Error::Fit("no records".into()))?
        .len()
        - 1;
    if results.iter().flat_map(|g| &g.counts).any(|c| c.len() != d + 1) {
        return Err(Error::Fit("records disagree on the dimension".into()));
    }
    let mut lambdas: Vec<f64> = results.iter().map(|g| g.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    if lambdas.len() < 2 {
        return Err(Error::Fit("need at least two distinct Λ values".into()));
    }
    if results.iter().any(|g| g.counts.len() < 2) {
        return Err(Error::Fit("every grid point needs at least two trials".into()));
    }

    let mut d_hat = Vec::with_capacity(d);
    let mut residuals = Vec::with_capacity(d);
    for k in 1..=d {
        let mut sgg = 0.0;
        let mut sgy = 0.0;
        let mut var_num = 0.0;
        let mut pts = Vec::new();
        for g in results {
            let m = Mean::of(g.counts.iter().map(|c| c[k] as f64 / g.n));
            let shape = poisson_upper_tail(k, g.lambda);
            sgg += shape * shape;
            sgy += shape * m.mean;
            var_num += shape * shape * m.se * m.se;
            pts.push((m.mean, shape));
        }
        if sgg <= 0.0 {
            return Err(Error::Fit(format!("index {k} has a zero design")));
        }
        let value = sgy / sgg;
        d_hat.push(Estimate::new(value, var_num.sqrt() / sgg));
        residuals.push(pts.iter().map(|(y, s)| (y - value * s) / (value * s)).collect());
    }

    let dk: Vec<f64> = d_hat.iter().map(|e| e.value).collect();
    let (a0_value, a_vals) = euler_coefficients(&dk);
    let a0 = Estimate::new(a0_value, d_hat.iter().map(|e| e.se * e.se).sum::<f64>().sqrt());
    let a_from_d = a_vals
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let j = i + 1;
            let fact: f64 = (1..=j).map(|x| x as f64).product();
            let se = d_hat[j..].iter().map(|e| e.se * e.se).sum::<f64>().sqrt() / fact;
            Estimate::new(v, se)
        })
        .collect();

    let a_direct = fit_a_direct(results, d)?;
    Ok(ConstantFit {
        dim: d,
        lambdas,
        d_hat,
        residuals,
        a_from_d,
        a_direct,
        a0,
    })
}

/// Weighted least squares for `χ̄ e^{Λ}/n − 1 = Σ_j A_j Λ^j`.
fn alternating(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

fn fit_a_direct(results: &[CensusSeries], d: usize) -> Result<Vec<Estimate>> {
    let p = d - 1;
    if p == 0 {
        return Ok(Vec::new());
    }
    let mut normal = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    for g in results {
        let lam = g.lambda;
        let scale = lam.exp() / g.n;
        let m = Mean::of(g.counts.iter().map(|c| alternating(c) as f64 * scale));
        let se = if m.se.is_finite() && m.se > 0.0 {
            m.se
        } else {
            scale / (g.counts.len() as f64).sqrt()
        };
        let w = 1.0 / (se * se);
        let row: Vec<f64> = (1..=p).map(|j| lam.powi(j as i32)).collect();
        for a in 0..p {
            rhs[a] += w * row[a] * (m.mean - 1.0);
            for b in 0..p {
                normal[a * p + b] += w * row[a] * row[b];
            }
        }
    }
    let inv = invert(&normal, p).ok_or_else(|| Error::Fit("singular design for A_j".into()))?;
    Ok((0..p)
        .map(|a| {
            let value: f64 = (0..p).map(|b| inv[a * p + b] * rhs[b]).sum();
            Estimate::new(value, inv[a * p + a].max(0.0).sqrt())
        })
        .collect())
}

/// Gauss–Jordan inverse with partial pivoting.
fn invert(m: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; p * p];
    for i in 0..p {
        inv[i * p + i] = 1.0;
    }
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..p {
        let piv = (col..p).max_by(|&x, &y| a[x * p + col].abs().total_cmp(&a[y * p + col].abs()))?;
        if a[piv * p + col].abs() <= 1e-13 * scale {
            return None;
        }
        for j in 0..p {
            a.swap(col * p + j, piv * p + j);
            inv.swap(col * p + j, piv * p + j);
        }
        let d = a[col * p + col];
        for j in 0..p {
            a[col * p + j] /= d;
            inv[col * p + j] /= d;
        }
        for i in 0..p {
            if i != col {
                let f = a[i * p + col];
                if f != 0.0 {
                    for j in 0..p {
                        a[i * p + j] -= f * a[col * p + j];
                        inv[i * p + j] -= f * inv[col * p + j];
                    }
                }
            }
        }
    }
    Some(inv)
}
