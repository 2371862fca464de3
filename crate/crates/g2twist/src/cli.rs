//! Command-line driver: verification suites, lift construction, loop
//! building and checking, and fixture export.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 input or
//! configuration error.

use crate::bundles::{harmonic_residual, nilorder, s_invariant};
use crate::error::{G2Error, Result};
use crate::io;
use crate::jet::Jet;
use crate::loops::{example_s2_loop, example_s3_loop, grassmannian_model, uniton_number};
use crate::s6::Q5Curve;
use crate::scalar::Backend;
use crate::twistor::{lift, lift_s1, lift_s2, lift_s3};
use crate::verify::{self, CheckResult, Report, Status, Suite, VerifyConfig};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "g2twist",
    about = "Octonion algebra, twistor lifts and loop-group models for harmonic maps into G2/SO(4)",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct ConfigArgs {
    /// Scalar backend for suites that support both.
    #[arg(long, default_value = "float", env = "G2T_BACKEND")]
    backend: Backend,
    /// Residual tolerance for float checks.
    #[arg(long, default_value_t = 1e-9, env = "G2T_TOL")]
    tol: f64,
    /// Default jet order for generated maps.
    #[arg(long, default_value_t = 8, env = "G2T_JET_ORDER")]
    jet_order: usize,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 42, env = "G2T_SEED")]
    seed: u64,
    /// Number of sample points for pointwise sweeps.
    #[arg(long, default_value_t = 20, env = "G2T_POINTS")]
    points: usize,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

impl ConfigArgs {
    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            backend: self.backend,
            tol: self.tol,
            jet_order: self.jet_order,
            seed: self.seed,
            points: self.points,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a named invariant suite and report pass/fail per check.
    Verify {
        /// One of: algebra, weights, s6, twistor, loops, all.
        suite: Suite,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Construct and validate the twistor lift of a harmonic map.
    Lift {
        /// JSON file with map input (sections or named generator).
        #[arg(long, conflicts_with = "generator")]
        input: Option<String>,
        /// Named generator: vacuum_torus, superhorizontal_poly,
        /// chain_line_phi, geodesic_circle.
        #[arg(long)]
        generator: Option<String>,
        /// Generator parameter (family index for superhorizontal_poly).
        #[arg(long)]
        id: Option<u32>,
        /// Twistor level: auto, 1, 2 or 3.
        #[arg(long, default_value = "auto")]
        s: String,
        /// Base points "re,im;re,im;…" for generator inputs.
        #[arg(long, default_value = "0.17,0.31")]
        at: String,
        /// Write the lift flag as JSON here.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Build or check polynomial extended solutions.
    Loop {
        #[command(subcommand)]
        action: LoopAction,
    },
    /// Export deterministic fixtures (weight basis, curves) as JSON.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum LoopAction {
    /// Build one of the worked extended solutions.
    Build {
        /// Which example: the degree-4 (62) or degree-6 (63) solution.
        #[arg(long)]
        example: u32,
        /// Deformation parameter t (real part, imaginary part).
        #[arg(long, default_value = "1.0,0.0")]
        t: String,
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Check the loop-group conditions of an extended solution.
    Check {
        /// Loop JSON file; omit to rebuild from --example.
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        example: Option<u32>,
        #[arg(long, default_value = "1.0,0.0")]
        t: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    Generate {
        /// Output directory.
        #[arg(long, default_value = "fixtures")]
        out_dir: String,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_pass) => {
            if all_pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, config } => {
            let report = verify::run_suite(suite, &config.verify_config());
            emit(&report, config.json)?;
            Ok(report.all_pass())
        }
        Command::Lift {
            input,
            generator,
            id,
            s,
            at,
            out,
            config,
        } => cmd_lift(input, generator, id, &s, &at, out, &config),
        Command::Loop { action } => match action {
            LoopAction::Build {
                example,
                t,
                out,
                config,
            } => cmd_loop_build(example, &t, out, &config),
            LoopAction::Check {
                input,
                example,
                t,
                config,
            } => cmd_loop_check(input, example, &t, &config),
        },
        Command::Fixtures {
            action: FixtureAction::Generate { out_dir },
        } => {
            cmd_fixtures(&out_dir)?;
            Ok(true)
        }
    }
}

fn emit(report: &Report, as_json: bool) -> Result<()> {
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(report)
                .map_err(|e| G2Error::Input(format!("serialization failed: {e}")))?
        );
    } else {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let re = parts
        .first()
        .and_then(|p| p.trim().parse::<f64>().ok())
        .ok_or_else(|| G2Error::Input(format!("cannot parse complex number `{s}`")))?;
    let im = parts
        .get(1)
        .map(|p| p.trim().parse::<f64>())
        .transpose()
        .map_err(|_| G2Error::Input(format!("cannot parse complex number `{s}`")))?
        .unwrap_or(0.0);
    Ok(Complex64::new(re, im))
}

fn cmd_lift(
    input: Option<String>,
    generator: Option<String>,
    id: Option<u32>,
    s_choice: &str,
    at: &str,
    out: Option<String>,
    config: &ConfigArgs,
) -> Result<bool> {
    let tol = config.tol;
    let points: Vec<Complex64> = at
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<_>>()?;
    if points.is_empty() {
        return Err(G2Error::Input("no sample points supplied".into()));
    }
    let spec_value = match (&input, &generator) {
        (Some(path), _) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| G2Error::Input(format!("cannot read {path}: {e}")))?;
            serde_json::from_str(&raw)
                .map_err(|e| G2Error::Input(format!("bad JSON in {path}: {e}")))?
        }
        (None, Some(name)) => {
            let mut v = json!({ "generator": name });
            if let Some(k) = id {
                v["id"] = json!(k);
            }
            v
        }
        (None, None) => {
            return Err(G2Error::Input(
                "lift needs --input FILE or --generator NAME".into(),
            ))
        }
    };
    let is_raw = spec_value.get("generator").is_none()
        || spec_value.get("generator").and_then(serde_json::Value::as_str)
            == Some("from_sections");
    let mut checks = Vec::new();
    let mut flag_json = None;
    for (n, z0) in points.iter().enumerate() {
        if is_raw && n > 0 {
            return Err(G2Error::Input(
                "raw section input is jetted at its own base point; use a single point".into(),
            ));
        }
        let mut v = spec_value.clone();
        if !is_raw {
            v["z0"] = json!([z0.re, z0.im]);
        }
        let phi = io::map_input_from_json(&v, config.jet_order, tol)?;
        let hres = harmonic_residual(&phi, tol)?;
        if hres >= tol.max(1e-8) {
            return Err(G2Error::NotHarmonic { residual: hres });
        }
        if nilorder(&phi, tol.max(1e-8))?.is_none() {
            return Err(G2Error::NotNilconformal);
        }
        let flag = match s_choice {
            "auto" => lift(&phi, tol.max(1e-8))?,
            "1" => lift_s1(&phi, tol.max(1e-8))?,
            "2" => lift_s2(&phi, tol.max(1e-8))?,
            "3" => lift_s3(&phi, tol.max(1e-8))?,
            other => return Err(G2Error::Input(format!("bad --s value `{other}`"))),
        };
        let mut res = flag.orthogonality_residual();
        res = res.max(flag.reality_residual(tol));
        res = res.max(flag.g2_residual(tol));
        res = res.max(flag.j2_residual(tol)?);
        let proj = flag.project(tol)?;
        res = res.max(proj.contains_residual(&phi, tol));
        let sval = s_invariant(&phi, tol.max(1e-8))?;
        checks.push(CheckResult {
            id: format!("lift.point{n}"),
            status: if res < tol.max(1e-7) {
                Status::Pass
            } else {
                Status::Fail
            },
            residual: Some(res),
            anchor: format!(
                "lift into T_{} at z0 = {z0}: orthogonal, real, leg-products closed, J2, projects back",
                sval.map(|s| s.to_string()).unwrap_or_else(|| "?".into())
            ),
            detail: None,
        });
        if flag_json.is_none() {
            flag_json = Some(io::flag_to_json(&flag));
        }
    }
    let report = Report {
        suite: "lift".into(),
        config: config.verify_config(),
        checks,
    };
    emit(&report, config.json)?;
    if let (Some(path), Some(fj)) = (out, flag_json) {
        std::fs::write(&path, serde_json::to_string_pretty(&fj).unwrap())
            .map_err(|e| G2Error::Input(format!("cannot write {path}: {e}")))?;
        eprintln!("flag written to {path}");
    }
    Ok(report.all_pass())
}

fn build_example(example: u32, t: Complex64, tol: f64) -> Result<crate::loops::MatrixLoop<Complex64>> {
    match example {
        62 => {
            let h = Q5Curve::standard(
                &Complex64::new(1.0 / 3.0, 0.0),
                &Complex64::new(1.0, 0.0),
                14,
                1e-10,
            )?;
            Ok(example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, tol.min(1e-9))?.phi)
        }
        63 => {
            let h = Q5Curve::standard(
                &Complex64::new(1.0 / 3.0, 0.0),
                &Complex64::new(1.0, 0.0),
                16,
                1e-10,
            )?;
            Ok(example_s3_loop(&h, &Jet::one(16), &t, tol.min(1e-8))?.phi)
        }
        other => Err(G2Error::Input(format!(
            "unknown example `{other}` (expected 62 or 63)"
        ))),
    }
}

fn loop_checks(
    phi: &crate::loops::MatrixLoop<Complex64>,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<CheckResult>, id: &str, anchor: &str, res: f64, tol: f64| {
        checks.push(CheckResult {
            id: id.into(),
            status: if res < tol { Status::Pass } else { Status::Fail },
            residual: Some(res),
            anchor: anchor.into(),
            detail: None,
        });
    };
    push(
        &mut checks,
        "loop.unitary",
        "Phi(lambda)* Phi(lambda) = 1 on 16 roots of unity",
        phi.unitarity_residual(16),
        tol.max(1e-9),
    );
    push(
        &mut checks,
        "loop.based",
        "Phi(1) = 1",
        phi.based_residual(),
        tol.max(1e-9),
    );
    let model = grassmannian_model(phi, tol.max(1e-9))?;
    push(
        &mut checks,
        "loop.reality",
        "(conj W)^perp = lambda W",
        model.reality_residual(tol.max(1e-9))?,
        tol.max(1e-7),
    );
    push(
        &mut checks,
        "loop.closure",
        "W is closed under the lambda-graded vector product",
        model.closure_residual(tol.max(1e-9))?,
        tol.max(1e-7),
    );
    let flag = model.legs(tol.max(1e-9))?;
    push(
        &mut checks,
        "loop.legs.g2",
        "the canonical lift satisfies A_i x A_j inside A_{i+j}",
        flag.g2_residual(tol.max(1e-9)),
        tol.max(1e-6),
    );
    push(
        &mut checks,
        "loop.legs.j2",
        "the canonical lift is J2-holomorphic",
        flag.j2_residual(tol.max(1e-9))?,
        tol.max(1e-6),
    );
    let u = uniton_number(phi, tol.max(1e-9))?;
    checks.push(CheckResult {
        id: "loop.uniton.number".into(),
        status: Status::Pass,
        residual: None,
        anchor: format!(
            "degree span of lambda^s Phi = {}{}",
            u.value,
            if u.exact {
                " (exact: leading image full)"
            } else {
                " (lower bound)"
            }
        ),
        detail: None,
    });
    Ok(checks)
}

fn cmd_loop_build(
    example: u32,
    t: &str,
    out: Option<String>,
    config: &ConfigArgs,
) -> Result<bool> {
    let t = parse_complex(t)?;
    let phi = build_example(example, t, config.tol)?;
    let report = Report {
        suite: format!("loop.build.{example}"),
        config: config.verify_config(),
        checks: loop_checks(&phi, config.tol)?,
    };
    emit(&report, config.json)?;
    if let Some(path) = out {
        std::fs::write(
            &path,
            serde_json::to_string(&io::loop_to_json(&phi)).unwrap(),
        )
        .map_err(|e| G2Error::Input(format!("cannot write {path}: {e}")))?;
        eprintln!("loop written to {path}");
    }
    Ok(report.all_pass())
}

fn cmd_loop_check(
    input: Option<String>,
    example: Option<u32>,
    t: &str,
    config: &ConfigArgs,
) -> Result<bool> {
    let phi = match (input, example) {
        (Some(path), _) => {
            let raw = std::fs::read_to_string(&path)
                .map_err(|e| G2Error::Input(format!("cannot read {path}: {e}")))?;
            let v: serde_json::Value = serde_json::from_str(&raw)
                .map_err(|e| G2Error::Input(format!("bad JSON in {path}: {e}")))?;
            io::loop_from_json(&v, config.tol)?
        }
        (None, Some(ex)) => build_example(ex, parse_complex(t)?, config.tol)?,
        (None, None) => {
            return Err(G2Error::Input(
                "loop check needs --input FILE or --example N".into(),
            ))
        }
    };
    let report = Report {
        suite: "loop.check".into(),
        config: config.verify_config(),
        checks: loop_checks(&phi, config.tol)?,
    };
    emit(&report, config.json)?;
    Ok(report.all_pass())
}

fn cmd_fixtures(out_dir: &str) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| G2Error::Input(format!("cannot create {out_dir}: {e}")))?;
    // weight basis and its full product table
    let wb = crate::algebra::WeightBasis::<Complex64>::build();
    let mut weights = serde_json::Map::new();
    for &w in &crate::algebra::Weight::ALL {
        weights.insert(
            format!("{},{}", w.m, w.n),
            io::vec7_to_json(wb.vector(w)),
        );
    }
    let weights_json = json!({
        "labels": "m,n stands for m*alpha1 + n*alpha2",
        "normalization": "nonzero-weight vectors have squared norm 2; the zero-weight vector is a real unit",
        "vectors": weights,
        "product_table": verify::weight_product_fixture(),
    });
    write_json(out_dir, "weight_basis.json", &weights_json)?;

    // the polynomial superhorizontal curve as coefficient vectors
    let h = fixtures_curve_coeffs();
    write_json(out_dir, "superhorizontal_curve.json", &h)?;
    println!("fixtures written to {out_dir}/");
    Ok(())
}

fn fixtures_curve_coeffs() -> serde_json::Value {
    use crate::scalar::Scalar;
    let x = crate::fixtures::principal_nilpotent::<Complex64>();
    let wb = crate::algebra::WeightBasis::<Complex64>::build();
    let mut v = wb
        .vector(crate::algebra::Weight::A2A1A2.negated())
        .clone();
    let mut coeffs = Vec::new();
    coeffs.push(io::vec7_to_json(&v));
    for k in 1..=6usize {
        v = x.apply(&v).scale(&Complex64::new(1.0 / k as f64, 0.0));
        coeffs.push(io::vec7_to_json(&v));
    }
    json!({
        "description": "H(z) = sum_k c_k z^k: full holomorphic isotropic curve with H x H' = 0",
        "coefficients": coeffs,
    })
}

fn write_json(dir: &str, name: &str, v: &serde_json::Value) -> Result<()> {
    let path = format!("{dir}/{name}");
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap())
        .map_err(|e| G2Error::Input(format!("cannot write {path}: {e}")))
}
