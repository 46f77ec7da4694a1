//! `nevlab`: deterministic command-line front end for the nevlab-core
//! experiments. Every run embeds the resolved configuration and the library
//! version in its output, so reruns with the same arguments are
//! byte-identical.
//!
//! Exit codes: 0 on success, 1 when a checked property is violated, 2 on
//! input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use nevlab_core::config::CurveConfig;
use nevlab_core::counting;
use nevlab_core::curve::{Ambient, EntireCurve, PolynomialSection};
use nevlab_core::disk;
use nevlab_core::heights::{self, RationalPoint};
use nevlab_core::nevanlinna;
use nevlab_core::siegel;
use nevlab_core::suite;
use nevlab_core::VERSION;

#[derive(Parser)]
#[command(name = "nevlab", version = VERSION, about = "Nevanlinna-theoretic counting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CurveArg {
    /// Path to a TOML curve config
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in curve: identity, exp, exp-affine, interp, interp:<plateau>
    #[arg(long, default_value = "identity")]
    curve: String,
}

impl CurveArg {
    fn resolve(&self) -> Result<(CurveConfig, EntireCurve), String> {
        let cfg = match &self.config {
            Some(path) => CurveConfig::load(path).map_err(|e| e.to_string())?,
            None => match self.curve.as_str() {
                "identity" => CurveConfig::identity_projective(),
                "exp" => CurveConfig::exp_projective(),
                "exp-affine" => CurveConfig {
                    name: "exp_affine".into(),
                    kind: nevlab_core::config::KindTag::Affine,
                    dimension: 2,
                    components: vec!["z".into(), "exp(z)".into()],
                },
                "interp" => CurveConfig::interp_affine(0),
                other => match other.strip_prefix("interp:") {
                    Some(p) => {
                        let plateau: usize =
                            p.parse().map_err(|_| format!("bad plateau in {other:?}"))?;
                        CurveConfig::interp_affine(plateau)
                    }
                    None => return Err(format!("unknown curve {other:?}")),
                },
            },
        };
        let curve = cfg.build().map_err(|e| e.to_string())?;
        Ok((cfg, curve))
    }
}

#[derive(Args, Clone)]
struct OutArg {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn emit(&self, text: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect()
}

fn parse_ints(text: &str) -> Result<Vec<i64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad integer {t:?}")))
        .collect()
}

/// Linear section from comma-separated integer coefficients; the expected
/// length follows [`PolynomialSection::linear`] for the curve's ambient.
fn parse_section(curve: &EntireCurve, text: &str) -> Result<PolynomialSection, String> {
    let coeffs = parse_ints(text)?;
    PolynomialSection::linear(curve.section_ambient(), &coeffs).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    version: &'static str,
    config: CurveConfig,
    result: T,
}

fn json<T: Serialize>(config: CurveConfig, result: T) -> String {
    let env = Envelope { version: VERSION, config, result };
    let mut text = serde_json::to_string_pretty(&env).expect("serializable");
    text.push('\n');
    text
}

fn csv(config: &CurveConfig, body: &str) -> String {
    format!("# nevlab {VERSION} curve={}\n{body}", config.name)
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the characteristic T(r) over radii
    Tcurve {
        #[command(flatten)]
        curve: CurveArg,
        /// Comma-separated radii
        #[arg(long, default_value = "0.5,1,2,4")]
        radii: String,
        #[arg(long, default_value_t = 0.0)]
        w0_re: f64,
        #[arg(long, default_value_t = 0.0)]
        w0_im: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Verify the First Main Theorem identity for a linear section
    Fmt {
        #[command(flatten)]
        curve: CurveArg,
        /// Comma-separated integer coefficients of a degree-1 section
        #[arg(long, allow_hyphen_values = true)]
        section: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        w0_re: f64,
        #[arg(long, default_value_t = 0.0)]
        w0_im: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Fail (exit 1) when |residual| exceeds this
        #[arg(long, default_value_t = 1e-6)]
        max_residual: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Localize zeros of a section pullback in a disk
    Zeros {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, allow_hyphen_values = true)]
        section: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Cover a disk by hyperbolic balls of bounded diameter
    Cover {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Cartan exceptional set of a random atomic measure
    Cartan {
        /// Number of atoms
        #[arg(long, default_value_t = 50)]
        atoms: usize,
        /// Total mass
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Enumerate rational points of bounded height on the curve
    Heights {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Height budget H
        #[arg(long, default_value_t = 2.0)]
        h: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build an auxiliary polynomial vanishing on given points
    Auxpoly {
        /// Points as semicolon-separated integer coordinate lists,
        /// e.g. "1,1,1;1,-1,2"
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Tabulate C_phi(r, H) with envelope ratios
    Count {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value = "0.8,1.2,1.6,2.0")]
        radii: String,
        /// Comma-separated height budgets
        #[arg(long, default_value = "0.7,1.6,2.3,3.2,3.9")]
        budgets: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Polynomial-window membership scan over a count table
    Windows {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value = "0.8,1.2,1.8")]
        radii: String,
        #[arg(long, default_value = "0.7,1.4,2.1,2.8,3.5")]
        budgets: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 2.5)]
        gamma: f64,
        /// Subgeometric chain parameter A
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run acceptance criteria
    Suite {
        /// Run a single criterion by id (1..=12)
        #[arg(long)]
        only: Option<u32>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Tcurve { curve, radii, w0_re, w0_im, tol, out } => {
            let (cfg, phi) = curve.resolve()?;
            let radii = parse_list(&radii)?;
            let w0 = Complex64::new(w0_re, w0_im);
            let profile = nevanlinna::CharacteristicProfile::tabulate(&phi, w0, &radii, tol)
                .map_err(|e| e.to_string())?;
            out.emit(&csv(&cfg, &profile.to_csv()))?;
            Ok(true)
        }
        Command::Fmt { curve, section, r, w0_re, w0_im, tol, max_residual, out } => {
            let (cfg, phi) = curve.resolve()?;
            let s = parse_section(&phi, &section)?;
            let rep = nevanlinna::verify_fmt(&phi, &s, Complex64::new(w0_re, w0_im), r, tol)
                .map_err(|e| e.to_string())?;
            let ok = rep.residual.abs() <= max_residual;
            out.emit(&json(cfg, &rep))?;
            Ok(ok)
        }
        Command::Zeros { curve, section, r, tol, out } => {
            let (cfg, phi) = curve.resolve()?;
            let s = parse_section(&phi, &section)?;
            let pb = nevlab_core::curve::Pullback::new(&phi, &s).map_err(|e| e.to_string())?;
            let rep = nevlab_core::zeros::count_zeros(
                |z| pb.raw(z, tol * 1e-3).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                r,
            )
            .map_err(|e| e.to_string())?;
            out.emit(&json(cfg, &rep))?;
            Ok(true)
        }
        Command::Cover { r, epsilon, alpha, out } => {
            let cover = disk::cover_disk(r, epsilon, alpha).map_err(|e| e.to_string())?;
            let budget = (5.0 / (alpha * alpha * epsilon)).ceil() as usize + 1;
            let ok = cover.len() <= budget;
            let cfg = CurveConfig {
                name: "disk".into(),
                kind: nevlab_core::config::KindTag::Affine,
                dimension: 1,
                components: vec!["z".into()],
            };
            out.emit(&json(cfg, &cover))?;
            Ok(ok)
        }
        Command::Cartan { atoms, mass, threshold, seed, out } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<(Complex64, f64)> = (0..atoms.max(1))
                .map(|_| {
                    (
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        rng.gen_range(0.01..1.0),
                    )
                })
                .collect();
            let scale = mass / raw.iter().map(|&(_, m)| m).sum::<f64>();
            let mu = disk::AtomicMeasure::new(
                raw.iter().map(|&(z, m)| (z, m * scale)).collect(),
            )
            .map_err(|e| e.to_string())?;
            let e = disk::cartan_exceptional(&mu, threshold).map_err(|e| e.to_string())?;
            let ok = e.radii_sum() <= 5.0 * threshold + 1e-12;
            let cfg = CurveConfig {
                name: format!("cartan_seed{seed}"),
                kind: nevlab_core::config::KindTag::Affine,
                dimension: 1,
                components: vec!["z".into()],
            };
            out.emit(&json(cfg, &e))?;
            Ok(ok)
        }
        Command::Heights { curve, r, h, out } => {
            let (cfg, phi) = curve.resolve()?;
            let enumeration =
                heights::enumerate_points(&phi, r, h, None).map_err(|e| e.to_string())?;
            let n_coords = enumeration
                .points
                .first()
                .map(|p| p.point.coords().len())
                .unwrap_or(phi.ambient_vars() + 1);
            let mut body = nevlab_core::heights::HeightedPoint::csv_header(n_coords);
            body.push('\n');
            for p in &enumeration.points {
                body.push_str(&p.to_csv_row());
                body.push('\n');
            }
            out.emit(&csv(&cfg, &body))?;
            Ok(true)
        }
        Command::Auxpoly { points, degree, alpha, out } => {
            let mut pts = Vec::new();
            let mut vars = 0usize;
            for part in points.split(';') {
                let coords = parse_ints(part)?;
                vars = coords.len();
                let point =
                    RationalPoint::new(coords.iter().map(|&c| c.into()).collect())
                        .map_err(|e| e.to_string())?;
                let (h_fs, h_max) = point.height();
                pts.push(nevlab_core::heights::HeightedPoint {
                    point,
                    w_num: 0.into(),
                    w_den: 1.into(),
                    h_fs,
                    h_max,
                });
            }
            if vars < 2 {
                return Err("points need at least 2 coordinates".into());
            }
            let aux = siegel::build_aux_polynomial(&pts, Ambient::Projective(vars), degree, alpha)
                .map_err(|e| e.to_string())?;
            let ok = aux.verify_vanishing();
            let cfg = CurveConfig {
                name: "auxpoly".into(),
                kind: nevlab_core::config::KindTag::Projective,
                dimension: vars as u32 - 1,
                components: Vec::new(),
            };
            out.emit(&json(cfg, &aux))?;
            Ok(ok)
        }
        Command::Count { curve, radii, budgets, epsilon, tol, out } => {
            let (cfg, phi) = curve.resolve()?;
            let radii = parse_list(&radii)?;
            let budgets = parse_list(&budgets)?;
            let recs = counting::count_table(&phi, &radii, &budgets, epsilon, tol)
                .map_err(|e| e.to_string())?;
            let env = counting::bp_envelope_check(&recs);
            out.emit(&csv(&cfg, &counting::count_csv(&recs)))?;
            Ok(env.bounded)
        }
        Command::Windows { curve, radii, budgets, epsilon, gamma, a, tol, out } => {
            let (cfg, phi) = curve.resolve()?;
            let radii = parse_list(&radii)?;
            let budgets = parse_list(&budgets)?;
            let recs = counting::count_table(&phi, &radii, &budgets, epsilon, tol)
                .map_err(|e| e.to_string())?;
            let rep = counting::window_scan(gamma, epsilon, a, phi.dimension(), &recs);
            let ok = !rep.spanning_chain;
            out.emit(&json(cfg, &rep))?;
            Ok(ok)
        }
        Command::Suite { only, tol } => {
            let ids: Vec<u32> = match only {
                Some(id) => {
                    if id == 0 || id > suite::CRITERIA.len() as u32 {
                        return Err(format!("no criterion {id}"));
                    }
                    vec![id]
                }
                None => (1..=suite::CRITERIA.len() as u32).collect(),
            };
            let mut ok = true;
            for id in ids {
                let r = suite::run(id, tol).ok_or_else(|| format!("no criterion {id}"))?;
                println!("{}", r.line());
                ok &= r.passed;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
