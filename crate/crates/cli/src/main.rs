//! heckelab command line: every scan and check as a subcommand, with
//! reproducible seeds, machine-readable output, and a manifest next to each
//! output file recording exactly what produced it.

use clap::{Parser, Subcommand, ValueEnum};
use heckelab::amplifier;
use heckelab::counting::{CountingProfile, HyperbolicPoint};
use heckelab::format_float;
use heckelab::hecke;
use heckelab::kernel::{self, ScanMode};
use heckelab::quaternion::{enumerate_rn, IndefAlgebra};
use heckelab::supnorm;
use heckelab::window::SpectralWindow;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

type AnyError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(
    name = "heckelab",
    version,
    about = "Hecke operators, spectral kernels, lattice counting and amplification scans"
)]
struct Cli {
    /// RNG seed (precedence: this flag, then HECKELAB_SEED, then config)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Key=value config file (keys: a, b, delta_supp, seed, tail_threshold)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for scans (default: all cores); results do not
    /// depend on the thread count
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the norm-n odd quaternion stratum R(n)
    #[command(name = "rn-enumerate")]
    RnEnumerate {
        #[arg(long)]
        n: u64,
        /// Emit a JSON array instead of CSV rows
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV rows a0,a1,a2,a3 (the default)
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The (2k+1) x (2k+1) matrix of T_n on degree-k harmonics
    Hecke {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint Hecke-Laplace eigenvalues for all degrees up to kmax
    Spectrum {
        /// Comma-separated admissible levels, e.g. 5,13
        #[arg(long, default_value = "5,13")]
        levels: String,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sup norms of every joint eigenfunction over a degree range
    Supnorm {
        #[arg(long, default_value = "5,13")]
        levels: String,
        #[arg(long)]
        kmin: u32,
        #[arg(long)]
        kmax: u32,
        /// K-type weight l (0 scans the sphere; otherwise the group)
        #[arg(long, default_value_t = 0)]
        ktype: i32,
        /// Grid resolution factor: points per great circle = factor * k
        #[arg(long, default_value_t = 4)]
        grid_res: u32,
        /// Polish iterations after the grid pass
        #[arg(long, default_value_t = 60)]
        polish: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the sup-norm growth exponent from a supnorm CSV
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        family: Family,
    },
    /// Lattice counts on the sphere over a threshold grid
    #[command(name = "count-sphere")]
    CountSphere {
        #[arg(long)]
        n: u64,
        /// Base point nx,ny,nz (normalized)
        #[arg(long, default_value = "0,0,1")]
        x: String,
        /// Threshold grid lo:hi:steps (geodesic angle)
        #[arg(long)]
        delta_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice counts in the hyperbolic plane over a threshold grid
    #[command(name = "count-hyp")]
    CountHyp {
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        #[arg(long)]
        n: u64,
        /// Base point re,im with im > 0
        #[arg(long, default_value = "0,1")]
        z: String,
        /// Threshold grid lo:hi:steps (u-invariant)
        #[arg(long)]
        delta_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smoothed projector kernel scans over a spectral-parameter grid
    Kernel {
        #[arg(long, value_enum)]
        mode: KernelMode,
        /// Hecke level for mode=hecke
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        mu_min: f64,
        #[arg(long)]
        mu_max: f64,
        #[arg(long)]
        mu_steps: usize,
        /// Separation angle for mode=offdiag
        #[arg(long)]
        theta: Option<f64>,
        /// Window Fourier-support width
        #[arg(long)]
        delta_supp: Option<f64>,
        /// Relative window tail below which degree sums truncate
        /// (default 1e-14; config key tail_threshold)
        #[arg(long)]
        tail_threshold: Option<f64>,
        /// Base point for mode=hecke
        #[arg(long, default_value = "0,0,1")]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the amplified spectral sum through both pipelines
    Amplify {
        #[arg(long)]
        mu: f64,
        /// Amplifier length cap
        #[arg(long = "N")]
        n_cap: u64,
        /// Targeted form as k:index
        #[arg(long)]
        j0: String,
        #[arg(long, default_value = "0,0,1")]
        x: String,
        #[arg(long)]
        delta_supp: Option<f64>,
        /// Relative window tail; the default (1e-6) keeps the eigendata
        /// range at desk scale while both pipelines share the truncation
        #[arg(long)]
        tail_threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the deterministic invariant suite
    Selfcheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hecke,
    Zonal,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelMode {
    Diag,
    Offdiag,
    Hecke,
}

#[derive(Default)]
struct Config {
    a: Option<i64>,
    b: Option<i64>,
    delta_supp: Option<f64>,
    seed: Option<u64>,
    tail_threshold: Option<f64>,
}

fn load_config(path: &Path) -> Result<Config, AnyError> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = Config::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: {line}", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "a" => cfg.a = Some(value.parse()?),
            "b" => cfg.b = Some(value.parse()?),
            "delta_supp" => cfg.delta_supp = Some(value.parse()?),
            "seed" => cfg.seed = Some(value.parse()?),
            "tail_threshold" => cfg.tail_threshold = Some(value.parse()?),
            other => return Err(format!("unknown config key: {other}").into()),
        }
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct Manifest {
    subcommand: String,
    params: BTreeMap<String, serde_json::Value>,
    version: String,
    seed: u64,
    wall_time_s: f64,
    anchor: String,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

/// Write the body to --out (with its manifest alongside) or to stdout.
fn deliver(
    out: &Option<PathBuf>,
    body: &str,
    manifest: Manifest,
) -> Result<(), AnyError> {
    match out {
        Some(path) => {
            write_atomic(path, body.as_bytes())?;
            let mut mpath = path.as_os_str().to_owned();
            mpath.push(".manifest.json");
            let mjson = serde_json::to_string_pretty(&manifest)?;
            write_atomic(&PathBuf::from(mpath), mjson.as_bytes())?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn parse_levels(s: &str) -> Result<Vec<u64>, AnyError> {
    let levels: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<_, _>>()?;
    if levels.is_empty() {
        return Err("at least one level required".into());
    }
    Ok(levels)
}

fn parse_unit3(s: &str) -> Result<[f64; 3], AnyError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    if v.len() != 3 {
        return Err(format!("expected three coordinates, got {s}").into());
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm < 1e-12 {
        return Err("base point must be nonzero".into());
    }
    Ok([v[0] / norm, v[1] / norm, v[2] / norm])
}

fn parse_grid(s: &str) -> Result<Vec<f64>, AnyError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:steps, got {s}").into());
    }
    let lo: f64 = parts[0].trim().parse()?;
    let hi: f64 = parts[1].trim().parse()?;
    let steps: usize = parts[2].trim().parse()?;
    if steps < 1 || hi < lo {
        return Err("grid needs hi >= lo and steps >= 1".into());
    }
    Ok((0..steps)
        .map(|i| {
            if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn parse_j0(s: &str) -> Result<(u32, usize), AnyError> {
    let (k, idx) = s
        .split_once(':')
        .ok_or_else(|| format!("expected k:index, got {s}"))?;
    Ok((k.trim().parse()?, idx.trim().parse()?))
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<std::process::ExitCode, AnyError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => Config::default(),
    };
    let env_seed = std::env::var("HECKELAB_SEED")
        .ok()
        .map(|s| s.parse::<u64>())
        .transpose()
        .map_err(|e| format!("HECKELAB_SEED: {e}"))?;
    let seed = cli
        .seed
        .or(env_seed)
        .or(config.seed)
        .unwrap_or(heckelab::DEFAULT_SEED);

    let started = Instant::now();
    let mut params: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    macro_rules! p {
        ($k:expr, $v:expr) => {
            params.insert($k.to_string(), serde_json::json!($v));
        };
    }

    match cli.cmd {
        Cmd::RnEnumerate { n, json, csv: _, out } => {
            let elements = enumerate_rn(n);
            p!("n", n);
            p!("count", elements.len());
            let body = if json {
                let rows: Vec<[i64; 4]> =
                    elements.iter().map(|q| [q.a0, q.a1, q.a2, q.a3]).collect();
                format!("{}\n", serde_json::to_string(&rows)?)
            } else {
                let mut s = String::new();
                for q in &elements {
                    s.push_str(&format!("{},{},{},{}\n", q.a0, q.a1, q.a2, q.a3));
                }
                s
            };
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "rn-enumerate".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "quaternion-lattice-enumeration".into(),
                },
            )?;
        }

        Cmd::Hecke { n, k, out } => {
            let hm = hecke::hecke_matrix(n, k)?;
            p!("n", n);
            p!("k", k);
            let dim = 2 * k as usize + 1;
            let mut body = String::new();
            for i in 0..dim {
                let row: Vec<String> =
                    (0..dim).map(|j| format_float(hm.entries.get(i, j))).collect();
                body.push_str(&row.join(","));
                body.push('\n');
            }
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "hecke".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "hecke-operator-matrix".into(),
                },
            )?;
        }

        Cmd::Spectrum { levels, kmax, out } => {
            let levels = parse_levels(&levels)?;
            p!("levels", &levels);
            p!("kmax", kmax);
            let eigendata = hecke::joint_eigenbasis_range(kmax, &levels, seed)?;
            let mut body = String::from("k,j,laplace_eig");
            for n in &levels {
                body.push_str(&format!(",lambda_{n}"));
            }
            body.push('\n');
            for (k, basis) in &eigendata {
                for j in 0..basis.dim() {
                    body.push_str(&format!("{k},{j},{}", format_float(basis.laplace_eigenvalue)));
                    for li in 0..levels.len() {
                        body.push_str(&format!(",{}", format_float(basis.eigenvalues[li][j])));
                    }
                    body.push('\n');
                }
            }
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "spectrum".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "joint-hecke-laplace-spectrum".into(),
                },
            )?;
        }

        Cmd::Supnorm { levels, kmin, kmax, ktype, grid_res, polish, out } => {
            let levels = parse_levels(&levels)?;
            if kmax < kmin {
                return Err("kmax must be at least kmin".into());
            }
            p!("levels", &levels);
            p!("kmin", kmin);
            p!("kmax", kmax);
            p!("ktype", ktype);
            p!("grid_res", grid_res);
            p!("polish", polish);
            use rayon::prelude::*;
            let ks: Vec<u32> = (kmin..=kmax).filter(|&k| k as i32 >= ktype.abs()).collect();
            if ks.is_empty() {
                return Err("no degrees carry the requested K-type weight".into());
            }
            let per_k: Vec<heckelab::Result<Vec<supnorm::FamilyRow>>> = ks
                .par_iter()
                .map(|&k| supnorm::family_scan_degree(&levels, ktype, k, grid_res, polish, seed))
                .collect();
            let mut body = String::from("k,lambda,j,supnorm,ax,ay,az\n");
            for chunk in per_k {
                for r in chunk? {
                    body.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.k,
                        format_float(r.lambda),
                        r.j,
                        format_float(r.sup),
                        format_float(r.argmax[0]),
                        format_float(r.argmax[1]),
                        format_float(r.argmax[2]),
                    ));
                }
            }
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "supnorm".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "eigenfunction-supnorm-scan".into(),
                },
            )?;
        }

        Cmd::Fit { input, family } => {
            let text = std::fs::read_to_string(&input)?;
            let mut rows: Vec<(u32, f64, f64)> = Vec::new(); // (k, lambda, sup)
            for (i, line) in text.lines().enumerate() {
                if i == 0 || line.trim().is_empty() {
                    continue; // header
                }
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() < 4 {
                    return Err(format!("line {} has too few columns", i + 1).into());
                }
                rows.push((cols[0].parse()?, cols[1].parse()?, cols[3].parse()?));
            }
            let samples: Vec<(f64, f64)> = match family {
                Family::Hecke => {
                    let mut by_k: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
                    for (k, lambda, sup) in rows {
                        let e = by_k.entry(k).or_insert((lambda, 0.0));
                        e.1 = e.1.max(sup);
                    }
                    by_k.into_values().collect()
                }
                Family::Zonal => rows.into_iter().map(|(_, l, s)| (l, s)).collect(),
            };
            let (slope, intercept, stderr) = supnorm::exponent_fit(&samples)?;
            let report = serde_json::json!({
                "family": match family { Family::Hecke => "hecke", Family::Zonal => "zonal" },
                "samples": samples.len(),
                "slope": slope,
                "intercept": intercept,
                "stderr": stderr,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }

        Cmd::CountSphere { n, x, delta_grid, out } => {
            let point = parse_unit3(&x)?;
            let deltas = parse_grid(&delta_grid)?;
            p!("n", n);
            p!("x", point.to_vec());
            p!("delta_grid", &delta_grid);
            p!("delta_semantics", "geodesic angle on the unit sphere, strict <");
            let profile = CountingProfile::sphere_scan(n, point, &deltas)?;
            let mut body = String::from("delta,count\n");
            for (d, m) in &profile.rows {
                body.push_str(&format!("{},{m}\n", format_float(*d)));
            }
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "count-sphere".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "sphere-lattice-counting".into(),
                },
            )?;
        }

        Cmd::CountHyp { a, b, n, z, delta_grid, out } => {
            let a = a.or(config.a).unwrap_or(2);
            let b = b.or(config.b).unwrap_or(3);
            let alg = IndefAlgebra::new(a, b)?;
            let zv: Vec<f64> = z
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()?;
            if zv.len() != 2 {
                return Err(format!("expected re,im for z, got {z}").into());
            }
            let zp = HyperbolicPoint::new(zv[0], zv[1])?;
            let deltas = parse_grid(&delta_grid)?;
            p!("a", a);
            p!("b", b);
            p!("n", n);
            p!("z", zv);
            p!("delta_grid", &delta_grid);
            p!("delta_semantics", "point-pair invariant u(z, alpha z), strict <");
            let profile = CountingProfile::hyperbolic_scan(&alg, n, &zp, &deltas)?;
            let mut body = String::from("delta,count\n");
            for (d, m) in &profile.rows {
                body.push_str(&format!("{},{m}\n", format_float(*d)));
            }
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "count-hyp".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "hyperbolic-lattice-counting".into(),
                },
            )?;
        }

        Cmd::Kernel {
            mode,
            n,
            mu_min,
            mu_max,
            mu_steps,
            theta,
            delta_supp,
            tail_threshold,
            x,
            out,
        } => {
            let delta_supp = delta_supp.or(config.delta_supp).unwrap_or(1.0);
            let tail_threshold = tail_threshold.or(config.tail_threshold).unwrap_or(1e-14);
            let w = SpectralWindow::with_tail_threshold(delta_supp, tail_threshold)?;
            let point = parse_unit3(&x)?;
            let scan_mode = match mode {
                KernelMode::Diag => ScanMode::Diag,
                KernelMode::Offdiag => {
                    let theta = theta.ok_or("mode=offdiag requires --theta")?;
                    ScanMode::OffDiag { theta }
                }
                KernelMode::Hecke => {
                    let n = n.ok_or("mode=hecke requires --n")?;
                    ScanMode::Hecke { n }
                }
            };
            p!("mode", match mode {
                KernelMode::Diag => "diag",
                KernelMode::Offdiag => "offdiag",
                KernelMode::Hecke => "hecke",
            });
            if let Some(n) = n {
                p!("n", n);
            }
            if let Some(t) = theta {
                p!("theta", t);
            }
            p!("mu_min", mu_min);
            p!("mu_max", mu_max);
            p!("mu_steps", mu_steps);
            p!("delta_supp", delta_supp);
            p!("tail_threshold", tail_threshold);
            p!("x", point.to_vec());
            p!("degree_cutoff_at_mu_max", w.degree_cutoff(mu_max));
            use rayon::prelude::*;
            let mus: Vec<f64> = (0..mu_steps)
                .map(|i| {
                    if mu_steps == 1 {
                        mu_min
                    } else {
                        mu_min + (mu_max - mu_min) * i as f64 / (mu_steps - 1) as f64
                    }
                })
                .collect();
            let values: Vec<heckelab::Result<f64>> = mus
                .par_iter()
                .map(|&mu| match scan_mode {
                    ScanMode::Diag => Ok(kernel::kernel_diag(mu, &w)),
                    ScanMode::OffDiag { theta } => kernel::kernel_offdiag(mu, theta, &w),
                    ScanMode::Hecke { n } => kernel::hecke_kernel_diag(n, mu, point, &w),
                })
                .collect();
            let mut body = String::from("mu,value\n");
            for (mu, v) in mus.iter().zip(values) {
                body.push_str(&format!("{},{}\n", format_float(*mu), format_float(v?)));
            }
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "kernel".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "spectral-projector-kernel-scan".into(),
                },
            )?;
        }

        Cmd::Amplify { mu, n_cap, j0, x, delta_supp, tail_threshold, out } => {
            let delta_supp = delta_supp.or(config.delta_supp).unwrap_or(1.0);
            let tail_threshold = tail_threshold.or(config.tail_threshold).unwrap_or(1e-6);
            let w = SpectralWindow::with_tail_threshold(delta_supp, tail_threshold)?;
            let point = parse_unit3(&x)?;
            let (k0, index) = parse_j0(&j0)?;
            let primes = amplifier::admissible_primes(n_cap);
            if primes.is_empty() {
                return Err(heckelab::Error::NoAdmissiblePrimes(n_cap).into());
            }
            let mut levels: Vec<u64> = primes.to_vec();
            levels.extend(primes.iter().map(|&p| p * p));
            levels.sort_unstable();
            p!("mu", mu);
            p!("N", n_cap);
            p!("j0", format!("{k0}:{index}"));
            p!("x", point.to_vec());
            p!("delta_supp", delta_supp);
            p!("tail_threshold", tail_threshold);
            p!("levels", &levels);

            let kmax = w.degree_cutoff(mu).max(k0);
            let eigendata = hecke::joint_eigenbasis_range(kmax, &levels, seed)?;
            let basis0 = eigendata
                .get(&k0)
                .ok_or(heckelab::Error::MissingDegree(k0))?;
            let amp = amplifier::build_amplifier(basis0, index, n_cap)?;
            let spectral = amplifier::amplified_sum_spectral(point, mu, &amp, &w, &eigendata)?;
            let (geometric, terms) =
                amplifier::amplified_sum_geometric_terms(point, mu, &amp, &w)?;
            let gap = (spectral - geometric).abs() / spectral.abs().max(1e-300);
            let term_rows: Vec<serde_json::Value> = terms
                .iter()
                .map(|t| {
                    serde_json::json!({
                        "n": t.n,
                        "m": t.m,
                        "d": t.d,
                        "level": t.level,
                        "coefficient": [t.coefficient.re, t.coefficient.im],
                        "kernel": t.kernel_value,
                    })
                })
                .collect();
            let report = serde_json::json!({
                "mu": mu,
                "N": n_cap,
                "j0": {"k": k0, "index": index},
                "x": point.to_vec(),
                "amplifier_support": amp.support(),
                "spectral": spectral,
                "geometric": geometric,
                "relative_gap": gap,
                "normalization": "L2(S^2) unit norm against surface measure (mass 4 pi)",
                "terms": term_rows,
            });
            let body = format!("{}\n", serde_json::to_string_pretty(&report)?);
            deliver(
                &out,
                &body,
                Manifest {
                    subcommand: "amplify".into(),
                    params,
                    version: env!("CARGO_PKG_VERSION").into(),
                    seed,
                    wall_time_s: started.elapsed().as_secs_f64(),
                    anchor: "amplified-spectral-sum-dual-pipeline".into(),
                },
            )?;
        }

        Cmd::Selfcheck => {
            let (report, ok) = heckelab::selfcheck::run(seed);
            print!("{report}");
            if !ok {
                return Ok(std::process::ExitCode::FAILURE);
            }
        }
    }
    Ok(std::process::ExitCode::SUCCESS)
}
