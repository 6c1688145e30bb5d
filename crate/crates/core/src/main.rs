use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use harmclass::classkernel::{
    budget_of_poly, contributions, extreme_point_p, extreme_point_q, extreme_points,
    is_member_iff_th, is_member_sufficient, random_member, sharp_function, DistortionEnvelope,
    ExtremeKind,
};
use harmclass::oboudi::{apply_harmonic, OperatorParams};
use harmclass::series::{
    convex_combine, hadamard_convolve, CoefficientJson, MagnitudeJson, SeriesJson,
};
use harmclass::verifier::{self, condition_samples, distortion_rows, write_condition_csv};
use harmclass::{GridSpec, HarmonicPoly, ParamSet, Preset, TCoefficients};

#[derive(Parser)]
#[command(name = "harmclass", version, about = "Coefficient tests and numerical checks for k-uniformly harmonic classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient budget and membership verdict for a coefficient file
    Check {
        file: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Grid verification of the class condition, sense preservation and univalence
    Verify {
        /// Coefficient file; omit together with --count to verify random members
        file: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Number of random members to verify
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree of random members
        #[arg(long, default_value_t = 10)]
        degree: usize,
        /// Write (r, theta, condition_value) samples for a single file
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the Al-Oboudi operator D^u to a coefficient file
    Apply {
        file: PathBuf,
        #[arg(long)]
        u: u32,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sharp (extremal) function from weights given as n:w pairs
    Extremal {
        #[command(flatten)]
        params: ParamArgs,
        /// Analytic weight x_n, n >= 2
        #[arg(long = "x", value_name = "N:W")]
        x: Vec<String>,
        /// Co-analytic weight y_n, n >= 1
        #[arg(long = "y", value_name = "N:W")]
        y: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extreme points P_n and Q_n up to a degree
    ExtremePoints {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 5)]
        degree: usize,
        /// Emit a single point as a coefficient file, e.g. P3 or Q1
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distortion envelope as CSV; with a magnitude file, |f| is sampled against it
    Distort {
        file: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        b1: Option<f64>,
        /// Radii, comma separated
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hadamard product of two coefficient files
    Convolve {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex combination of coefficient files
    Combine {
        files: Vec<PathBuf>,
        /// Weights, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// SH_alpha, KH_alpha, GH_alpha, RSH_v_alpha, kUSH_v1, kHCV or kUSH
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    u: Option<u32>,
    #[arg(long)]
    v: Option<u32>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    lambda: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> anyhow::Result<ParamSet> {
        match &self.preset {
            Some(name) => {
                let preset: Preset = name.parse()?;
                if self.u.is_some() || self.lambda.is_some() {
                    bail!("--u and --lambda are fixed by preset {preset}");
                }
                if self.k.is_some() && !preset.has_free_k() {
                    bail!("--k is fixed by preset {preset}");
                }
                if self.v.is_some() && !preset.has_free_v() {
                    bail!("--v is fixed by preset {preset}");
                }
                Ok(preset.params(self.alpha, self.k.unwrap_or(0.0), self.v.unwrap_or(0))?)
            }
            None => {
                let u = self.u.ok_or_else(|| anyhow!("either --preset or --u is required"))?;
                Ok(ParamSet::new(
                    u,
                    self.v.unwrap_or(0),
                    self.k.unwrap_or(0.0),
                    self.alpha,
                    self.lambda.unwrap_or(1.0),
                )?)
            }
        }
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid radii, comma separated
    #[arg(long, value_delimiter = ',')]
    radii: Vec<f64>,
    #[arg(long)]
    angles: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

impl GridArgs {
    fn resolve(&self) -> anyhow::Result<GridSpec> {
        let d = GridSpec::default();
        let radii = if self.radii.is_empty() { d.radii().to_vec() } else { self.radii.clone() };
        Ok(GridSpec::new(
            radii,
            self.angles.unwrap_or(d.angles()),
            d.guard_eps(),
            self.tol.unwrap_or(d.tol()),
        )?)
    }
}

fn read_series(path: &Path) -> anyhow::Result<SeriesJson> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> anyhow::Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(out, &s)
}

fn parse_pairs(items: &[String], min_index: usize) -> anyhow::Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in items {
        let (n, w) = item.split_once(':').ok_or_else(|| anyhow!("expected N:W, got `{item}`"))?;
        let n: usize = n.trim().parse().with_context(|| format!("bad index in `{item}`"))?;
        let w: f64 = w.trim().parse().with_context(|| format!("bad weight in `{item}`"))?;
        if n < min_index {
            bail!("index {n} in `{item}` must be at least {min_index}");
        }
        let slot = n - min_index;
        if out.len() <= slot {
            out.resize(slot + 1, 0.0);
        }
        out[slot] += w;
    }
    Ok(out)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Check { file, params } => {
            let p = params.resolve()?;
            let series = read_series(&file)?;
            let f = series.to_poly()?;
            let (member, test) = match &series {
                SeriesJson::Magnitudes(m) => {
                    (is_member_iff_th(&TCoefficients::try_from(m)?, &p), "necessary_and_sufficient")
                }
                SeriesJson::Coefficients(_) => (is_member_sufficient(&f, &p), "sufficient"),
            };
            let budget = budget_of_poly(&f, &p);
            emit_json(
                None,
                &json!({
                    "budget": budget,
                    "member": member,
                    "test": test,
                    "class_eligible": f.is_class_eligible(),
                    "contributions": contributions(&f, &p),
                }),
            )?;
            Ok(verdict(member))
        }
        Command::Verify { file, params, grid, count, seed, degree, csv, out } => {
            let p = params.resolve()?;
            let grid = grid.resolve()?;
            match (file, count) {
                (Some(_), Some(_)) => bail!("give either a file or --count, not both"),
                (None, None) => bail!("give a coefficient file or --count"),
                (Some(file), None) => {
                    let f = read_series(&file)?.to_poly()?;
                    let report = verifier::verify(&f, &p, &grid)?;
                    if let Some(path) = csv {
                        let fh = fs::File::create(&path)
                            .with_context(|| format!("creating {}", path.display()))?;
                        write_condition_csv(fh, &condition_samples(&f, &p, &grid))?;
                    }
                    emit_json(out.as_deref(), &report)?;
                    Ok(verdict(report.pass))
                }
                (None, Some(count)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut reports = Vec::with_capacity(count);
                    for _ in 0..count {
                        let t = random_member(&p, degree, &mut rng);
                        reports.push(verifier::verify(&t.to_poly(), &p, &grid)?);
                    }
                    let passed = reports.iter().filter(|r| r.pass).count();
                    emit_json(
                        out.as_deref(),
                        &json!({ "count": count, "seed": seed, "passed": passed, "reports": reports }),
                    )?;
                    Ok(verdict(passed == count))
                }
            }
        }
        Command::Apply { file, u, lambda, out } => {
            let f = read_series(&file)?.to_poly()?;
            let d = apply_harmonic(&f, OperatorParams::new(u, lambda)?);
            emit_json(out.as_deref(), &CoefficientJson::from(&d))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Extremal { params, x, y, out } => {
            let p = params.resolve()?;
            let x_tail = parse_pairs(&x, 2)?;
            let y = parse_pairs(&y, 1)?;
            let f = sharp_function(&p, &x_tail, &y)?;
            if !f.is_class_eligible() {
                eprintln!("warning: |b_1| = {} violates |b_1| < 1", f.b(1).norm());
            }
            emit_json(out.as_deref(), &CoefficientJson::from(&f))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExtremePoints { params, degree, only, out } => {
            let p = params.resolve()?;
            if degree == 0 {
                bail!("--degree must be at least 1");
            }
            if let Some(spec) = only {
                let (kind, n) = spec.split_at(1.min(spec.len()));
                let n: usize = n.parse().with_context(|| format!("bad extreme point `{spec}`"))?;
                let e = match kind {
                    "P" | "p" => extreme_point_p(n, &p, degree)?,
                    "Q" | "q" => extreme_point_q(n, &p, degree)?,
                    _ => bail!("extreme point must be P<n> or Q<n>, got `{spec}`"),
                };
                if !e.eligible {
                    eprintln!("warning: {spec} violates |b_1| < 1");
                }
                emit_json(out.as_deref(), &CoefficientJson::from(&e.poly))?;
            } else {
                let list: Vec<_> = extreme_points(&p, degree)
                    .iter()
                    .map(|e| {
                        json!({
                            "kind": match e.kind { ExtremeKind::P => "P", ExtremeKind::Q => "Q" },
                            "n": e.n,
                            "eligible": e.eligible,
                            "budget": budget_of_poly(&e.poly, &p),
                            "coefficients": CoefficientJson::from(&e.poly),
                        })
                    })
                    .collect();
                emit_json(out.as_deref(), &list)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Distort { file, params, b1, r, grid, out } => {
            let p = params.resolve()?;
            match file {
                None => {
                    let env = DistortionEnvelope::new(&p, b1.unwrap_or(0.0))?;
                    let radii = if r.is_empty() { grid.resolve()?.radii().to_vec() } else { r };
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["r", "lower", "upper"])?;
                    for r in radii {
                        let (lo, hi) = env.bounds(r)?;
                        w.serialize((r, lo, hi))?;
                    }
                    emit(out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
                    Ok(ExitCode::SUCCESS)
                }
                Some(file) => {
                    if b1.is_some() {
                        bail!("|b_1| is read from the file; drop --b1");
                    }
                    let t = match read_series(&file)? {
                        SeriesJson::Magnitudes(m) => TCoefficients::try_from(&m)?,
                        SeriesJson::Coefficients(_) => {
                            bail!("distortion bounds apply to magnitude (k-UTH) files")
                        }
                    };
                    let mut g = grid.resolve()?;
                    if !r.is_empty() {
                        g = GridSpec::new(r, g.angles(), g.guard_eps(), g.tol())?;
                    }
                    let rows = distortion_rows(&t, &p, &g)?;
                    let mut buf = Vec::new();
                    verifier::write_envelope_csv(&mut buf, &rows)?;
                    emit(out.as_deref(), &String::from_utf8(buf)?)?;
                    let inside = rows.iter().all(|row| row.within());
                    for row in rows.iter().filter(|row| !row.within()) {
                        eprintln!(
                            "outside envelope: r={} theta={} |f|={} bounds=[{}, {}]",
                            row.r, row.theta, row.abs_f, row.lower, row.upper
                        );
                    }
                    Ok(verdict(inside))
                }
            }
        }
        Command::Convolve { f, g, out } => {
            let (sf, sg) = (read_series(&f)?, read_series(&g)?);
            let conv = hadamard_convolve(&sf.to_poly()?, &sg.to_poly()?);
            match (&sf, &sg) {
                (SeriesJson::Magnitudes(a), SeriesJson::Magnitudes(b)) if a.u == b.u => {
                    let t = TCoefficients::from_poly_magnitudes(&conv, a.u)?;
                    emit_json(out.as_deref(), &MagnitudeJson::from(&t))?;
                }
                _ => emit_json(out.as_deref(), &CoefficientJson::from(&conv))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Combine { files, t, out } => {
            let series: Vec<SeriesJson> =
                files.iter().map(|p| read_series(p)).collect::<anyhow::Result<_>>()?;
            let polys: Vec<HarmonicPoly> =
                series.iter().map(SeriesJson::to_poly).collect::<Result<_, _>>()?;
            let combo = convex_combine(&polys, &t)?;
            let common_u = series.iter().try_fold(None, |acc: Option<u32>, s| match s {
                SeriesJson::Magnitudes(m) if acc.map_or(true, |u| u == m.u) => Some(Some(m.u)),
                _ => None,
            });
            match common_u.flatten() {
                Some(u) => {
                    let t = TCoefficients::from_poly_magnitudes(&combo, u)?;
                    emit_json(out.as_deref(), &MagnitudeJson::from(&t))?;
                }
                None => emit_json(out.as_deref(), &CoefficientJson::from(&combo))?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
