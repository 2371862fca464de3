//! Verification suites with machine-readable reports.
//!
//! Every suite evaluates a fixed list of checks, each tied to one
//! documented invariant; the same functions back the CLI `verify`
//! subcommand and the acceptance test target.  Reports are deterministic
//! given (suite, config, seed).
//!
//! The `oracles` submodule holds independent brute-force routes —
//! plain dense elimination without the jet machinery, a direct quadric
//! solve for isotropic extensions, and the projection-derivative formula
//! for A_z — used to cross-check the main code paths.

use crate::algebra::{
    annihilator, extend_isotropic_line, is_complex_coassociative, orientation_sign, Subspace,
    Weight, WeightBasis,
};
use crate::bundles::{harmonic_residual, nilorder, s_invariant, JetSubbundle};
use crate::error::Result;
use crate::fixtures;
use crate::jet::{Jet, JetVec7};
use crate::loops::{
    alternating_factorization, cartan_cross_check, example_s2_loop, example_s3_loop,
    grassmannian_model, harmonic_map_of, quoted_basis_s2, quoted_basis_s3, uniton_number,
};
use crate::s6::{
    ac_flag, acmap_from_phi, add_uniton_pair, alpha_construction, bryant_map, chain_line,
    classify, prop_family, vacuum_solution, vacuum_value, AcMap, AcType, LSource, Q5Curve,
};
use crate::scalar::{Backend, Gq, Scalar};
use crate::twistor::{lift_s1, lift_s2, lift_s3, Flag};
use crate::vec7::Vec7;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    #[serde(serialize_with = "ser_backend")]
    pub backend: Backend,
    pub tol: f64,
    pub jet_order: usize,
    pub seed: u64,
    pub points: usize,
}

fn ser_backend<Se: serde::Serializer>(b: &Backend, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
    s.serialize_str(match b {
        Backend::Exact => "exact",
        Backend::Float => "float",
    })
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            backend: Backend::Float,
            tol: 1e-9,
            jet_order: 8,
            seed: 42,
            points: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "suite {} (backend {:?}, tol {:.1e}, order {}, seed {}, points {})\n",
            self.suite,
            self.config.backend,
            self.config.tol,
            self.config.jet_order,
            self.config.seed,
            self.config.points
        );
        for c in &self.checks {
            let res = c
                .residual
                .map(|r| format!(" residual {r:.3e}"))
                .unwrap_or_default();
            let detail = c
                .detail
                .as_ref()
                .map(|d| format!(" [{d}]"))
                .unwrap_or_default();
            out.push_str(&format!(
                "  {:<28} {:>5}{}  // {}{}\n",
                c.id,
                match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Error => "ERROR",
                },
                res,
                c.anchor,
                detail
            ));
        }
        out
    }

    fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Weights,
    S6,
    Twistor,
    Loops,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "weights" => Ok(Suite::Weights),
            "s6" => Ok(Suite::S6),
            "twistor" => Ok(Suite::Twistor),
            "loops" => Ok(Suite::Loops),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

struct Ctx {
    checks: Vec<CheckResult>,
}

impl Ctx {
    fn new() -> Self {
        Ctx { checks: Vec::new() }
    }

    fn residual(&mut self, id: &str, anchor: &str, tol: f64, f: impl FnOnce() -> Result<f64>) {
        let check = match f() {
            Ok(r) => CheckResult {
                id: id.into(),
                status: if r < tol { Status::Pass } else { Status::Fail },
                residual: Some(r),
                anchor: anchor.into(),
                detail: None,
            },
            Err(e) => CheckResult {
                id: id.into(),
                status: Status::Error,
                residual: None,
                anchor: anchor.into(),
                detail: Some(e.to_string()),
            },
        };
        self.checks.push(check);
    }

    fn bool(&mut self, id: &str, anchor: &str, f: impl FnOnce() -> Result<bool>) {
        let check = match f() {
            Ok(ok) => CheckResult {
                id: id.into(),
                status: if ok { Status::Pass } else { Status::Fail },
                residual: None,
                anchor: anchor.into(),
                detail: None,
            },
            Err(e) => CheckResult {
                id: id.into(),
                status: Status::Error,
                residual: None,
                anchor: anchor.into(),
                detail: Some(e.to_string()),
            },
        };
        self.checks.push(check);
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Report {
    let mut ctx = Ctx::new();
    match suite {
        Suite::Algebra => algebra_suite(&mut ctx, cfg),
        Suite::Weights => weights_suite(&mut ctx, cfg),
        Suite::S6 => s6_suite(&mut ctx, cfg),
        Suite::Twistor => twistor_suite(&mut ctx, cfg),
        Suite::Loops => loops_suite(&mut ctx, cfg),
        Suite::All => {
            algebra_suite(&mut ctx, cfg);
            weights_suite(&mut ctx, cfg);
            s6_suite(&mut ctx, cfg);
            twistor_suite(&mut ctx, cfg);
            loops_suite(&mut ctx, cfg);
        }
    }
    let mut report = Report {
        suite: format!("{suite:?}").to_lowercase(),
        config: cfg.clone(),
        checks: ctx.checks,
    };
    report.sort();
    report
}

// ---------------------------------------------------------------- algebra

fn algebra_suite(ctx: &mut Ctx, cfg: &VerifyConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    ctx.bool(
        "alg.identities.exact",
        "(u,v x w) = (u x v, w); u x (v x w) + (u x v) x w = 2(u,w)v - (u,v)w - (v,w)u",
        || {
            for _ in 0..1000 {
                let u = Vec7::<Gq>::random(&mut rng);
                let v = Vec7::<Gq>::random(&mut rng);
                let w = Vec7::<Gq>::random(&mut rng);
                if u.dot(&v.cross(&w)) != u.cross(&v).dot(&w) {
                    return Ok(false);
                }
                let lhs = u.cross(&v.cross(&w)).add(&u.cross(&v).cross(&w));
                let rhs = v
                    .scale(&u.dot(&w).scale_int(2))
                    .sub(&w.scale(&u.dot(&v)))
                    .sub(&u.scale(&v.dot(&w)));
                if lhs != rhs {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "alg.associator.oracle",
        "[u,v,w] from the 8-dim product equals its cross/dot expansion",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xA1);
            for _ in 0..200 {
                let u = Vec7::<Gq>::random(&mut rng);
                let v = Vec7::<Gq>::random(&mut rng);
                let w = Vec7::<Gq>::random(&mut rng);
                let direct = u.associator(&v, &w);
                let exp = u
                    .cross(&v)
                    .cross(&w)
                    .sub(&u.cross(&v.cross(&w)))
                    .sub(&w.scale(&u.dot(&v)))
                    .add(&u.scale(&v.dot(&w)));
                if direct != exp {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "alg.positivity.coassoc",
        "a maximally isotropic W over an associative 3-space is positive iff coassociative; positive orthonormal frames have (e1,[e2,e3,e4]) = 2",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xB2);
            let xi = Subspace::<Gq>::span(
                &[Vec7::basis(1), Vec7::basis(2), Vec7::basis(3)],
                0.0,
            );
            for k in 0..120 {
                let flip = k % 2 == 1;
                let (frame, w) = fixtures::random_max_isotropic_standard::<Gq, _>(&mut rng, flip);
                let coassoc = is_complex_coassociative(&w, 0.0)?;
                let sign = orientation_sign(&xi, &frame, 1e-12)?;
                if coassoc != (sign > 0) {
                    return Ok(false);
                }
                // the associator scalar on the orthonormal frame
                let scalar = frame[0].dot(&frame[1].associator(&frame[2], &frame[3]));
                let expect = Gq::from_int(2 * sign as i64);
                if scalar != expect {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "alg.positivity.float",
        "positivity iff coassociativity over random associative 3-spaces (float sweep)",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xB3);
            for _ in 0..50 {
                let xi = fixtures::random_associative::<Complex64, _>(&mut rng, 1e-9);
                // orthonormalize xi-perp by float Gram-Schmidt
                let perp = xi.herm_perp(1e-9);
                let mut frame: Vec<Vec7<Complex64>> = Vec::new();
                for b in perp.basis() {
                    let mut v = b.clone();
                    for u in &frame {
                        let c = v.herm(u);
                        v = v.sub(&u.scale(&c));
                    }
                    let n = v.herm(&v).re.sqrt();
                    frame.push(v.scale(&Complex64::new(1.0 / n, 0.0)));
                }
                let w = Subspace::span(
                    &[
                        frame[0].sub(&frame[1].scale(&Complex64::new(0.0, 1.0))),
                        frame[2].sub(&frame[3].scale(&Complex64::new(0.0, 1.0))),
                    ],
                    1e-9,
                );
                let coassoc = is_complex_coassociative(&w, 1e-9)?;
                let scalar = frame[0].dot(&frame[1].associator(&frame[2], &frame[3]));
                let positive = scalar.re > 0.0;
                if (scalar.re.abs() - 2.0).abs() > 1e-9 || coassoc != positive {
                    return Ok(false);
                }
                let sign = orientation_sign(
                    &xi,
                    &[
                        frame[0].clone(),
                        frame[1].clone(),
                        frame[2].clone(),
                        frame[3].clone(),
                    ],
                    1e-9,
                )?;
                if (sign > 0) != positive {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "alg.annihilator.props",
        "the annihilator of an isotropic line is isotropic, 3-dimensional, and contains the line",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xC3);
            for _ in 0..50 {
                let v = fixtures::random_isotropic::<Gq, _>(&mut rng);
                let beta = Subspace::span(&[v], 0.0);
                let ann = annihilator(&beta, 0.0);
                if ann.rank() != 3 || !ann.is_isotropic(0.0) || !ann.contains_subspace(&beta, 0.0)
                {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "alg.annihilator.oracle",
        "annihilators agree with a dense brute-force elimination oracle",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xC4);
            for _ in 0..50 {
                let v = fixtures::random_isotropic::<Gq, _>(&mut rng);
                let beta = Subspace::span(&[v.clone()], 0.0);
                let main = annihilator(&beta, 0.0);
                let oracle = oracles::annihilator_dense(&v);
                let ospan = Subspace::span(&oracle, 0.0);
                if !main.equals(&ospan, 0.0) {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "alg.extension.oracle",
        "the two isotropic extensions agree with the direct quadric-solve oracle and split by coassociativity",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xC5);
            let xi = Subspace::<Gq>::span(
                &[Vec7::basis(1), Vec7::basis(2), Vec7::basis(3)],
                0.0,
            );
            for _ in 0..50 {
                let (_frame, w) = fixtures::random_max_isotropic_standard::<Gq, _>(&mut rng, false);
                let beta = Subspace::span(&[w.basis()[0].clone()], 0.0);
                let plus = extend_isotropic_line(&beta, &xi, true, 0.0)?;
                let minus = extend_isotropic_line(&beta, &xi, false, 0.0)?;
                if !is_complex_coassociative(&plus, 0.0)? || is_complex_coassociative(&minus, 0.0)?
                {
                    return Ok(false);
                }
                let (o_plus, o_minus) = oracles::extensions_by_quadric(&beta, &xi)?;
                if !plus.equals(&o_plus, 0.0) || !minus.equals(&o_minus, 0.0) {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );
}

// ---------------------------------------------------------------- weights

fn weights_suite(ctx: &mut Ctx, _cfg: &VerifyConfig) {
    ctx.bool(
        "wt.table.49pairs",
        "l_a x l_b lies in l_{a+b} for all 49 weight pairs, exactly",
        || {
            let wb = WeightBasis::<Gq>::build();
            for &a in &Weight::ALL {
                for &b in &Weight::ALL {
                    let prod = wb.vector(a).cross(wb.vector(b));
                    match a.plus(b) {
                        Some(c) => {
                            if !(prod.is_zero() || wb.line_span(&[c], 0.0).contains(&prod, 0.0)) {
                                return Ok(false);
                            }
                        }
                        None => {
                            if !prod.is_zero() {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "wt.annihilator.topline",
        "the annihilator of the highest weight line is the span of the three positive lines",
        || {
            let wb = WeightBasis::<Gq>::build();
            let beta = wb.line_span(&[Weight::A2A1A2], 0.0);
            let ann = annihilator(&beta, 0.0);
            let expect = wb.line_span(&[Weight::A1, Weight::A1A2, Weight::A2A1A2], 0.0);
            Ok(ann.equals(&expect, 0.0))
        },
    );

    ctx.bool(
        "wt.flags.g2",
        "the three standard flags satisfy the leg-product condition exactly",
        || {
            for s in 1..=3u32 {
                let f = Flag::<Gq>::standard(s, 2, 0.0)?;
                if !f.is_g2_flag(0.0) {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "wt.flags.project",
        "all three standard flags project onto the real middle form",
        || {
            let wb = WeightBasis::<Gq>::build();
            let target = JetSubbundle::constant(&wb.real_form_middle(0.0), 2);
            for s in 1..=3u32 {
                let p = Flag::<Gq>::standard(s, 2, 0.0)?.project(0.0)?;
                if !p.equals_at_base(&target, 1e-12) {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "wt.table.fixture",
        "the exhaustive 7x7 weight product table matches the committed fixture",
        || {
            let computed = weight_product_fixture();
            Ok(computed == WEIGHT_TABLE_FIXTURE)
        },
    );
}

/// The full multiplication table of the weight basis as structure
/// triples (a, b) -> (coefficient, c), serialized compactly.
pub fn weight_product_fixture() -> String {
    let wb = WeightBasis::<Gq>::build();
    let mut out = String::new();
    for (i, &a) in Weight::ALL.iter().enumerate() {
        for &b in Weight::ALL.iter().skip(i) {
            let prod = wb.vector(a).cross(wb.vector(b));
            if prod.is_zero() {
                out.push_str(&format!("({},{})x({},{})=0;", a.m, a.n, b.m, b.n));
                continue;
            }
            let c = a.plus(b).expect("nonzero product lands on a weight");
            // coefficient against the stored weight vector
            let target = wb.vector(c);
            let coeff = prod.herm(target);
            let denom = target.herm(target);
            let lambda = coeff.mul(&denom.inv().unwrap());
            out.push_str(&format!(
                "({},{})x({},{})={}*({},{});",
                a.m, a.n, b.m, b.n, lambda, c.m, c.n
            ));
        }
    }
    out
}

/// Frozen from the exhaustive Cayley-table expansion of the weight
/// vectors; regenerated by `weight_product_fixture`.
pub const WEIGHT_TABLE_FIXTURE: &str = "(0,0)x(0,0)=0;(0,0)x(1,0)=0+1i*(1,0);(0,0)x(-1,0)=0+-1i*(-1,0);(0,0)x(1,1)=0+1i*(1,1);(0,0)x(-1,-1)=0+-1i*(-1,-1);(0,0)x(2,1)=0+-1i*(2,1);(0,0)x(-2,-1)=0+1i*(-2,-1);(1,0)x(1,0)=0;(1,0)x(-1,0)=0+2i*(0,0);(1,0)x(1,1)=2*(2,1);(1,0)x(-1,-1)=0;(1,0)x(2,1)=0;(1,0)x(-2,-1)=-2*(-1,-1);(-1,0)x(-1,0)=0;(-1,0)x(1,1)=0;(-1,0)x(-1,-1)=2*(-2,-1);(-1,0)x(2,1)=-2*(1,1);(-1,0)x(-2,-1)=0;(1,1)x(1,1)=0;(1,1)x(-1,-1)=0+2i*(0,0);(1,1)x(2,1)=0;(1,1)x(-2,-1)=2*(-1,0);(-1,-1)x(-1,-1)=0;(-1,-1)x(2,1)=2*(1,0);(-1,-1)x(-2,-1)=0;(2,1)x(2,1)=0;(2,1)x(-2,-1)=0+-2i*(0,0);(-2,-1)x(-2,-1)=0;";

// ---------------------------------------------------------------- s6

fn s6_suite(ctx: &mut Ctx, cfg: &VerifyConfig) {
    let order = cfg.jet_order.max(8);
    let seeds: Vec<Complex64> = {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.points.max(20))
            .map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect()
    };

    ctx.residual(
        "s6.torus.pointwise",
        "reality, unit norm, almost-complexity and harmonicity of the doubly periodic map",
        1e-9,
        || {
            let mut res: f64 = 0.0;
            for z0 in &seeds {
                let f = vacuum_solution(z0, order)?;
                res = res.max(f.reality_residual());
                res = res.max(f.unit_norm_residual());
                res = res.max(f.almost_complex_residual()?);
                res = res.max(harmonic_residual(&f.line(1e-10)?, 1e-10)?);
            }
            Ok(res)
        },
    );

    ctx.residual(
        "s6.torus.periods",
        "double periodicity with periods pi and i*pi/sqrt(3)",
        1e-9,
        || {
            let pi = std::f64::consts::PI;
            let mut res: f64 = 0.0;
            for z0 in &seeds {
                let base = vacuum_value(*z0);
                for period in [Complex64::new(pi, 0.0), Complex64::new(0.0, pi / 3f64.sqrt())] {
                    let shifted = vacuum_value(*z0 + period);
                    for (a, b) in base.iter().zip(shifted.iter()) {
                        res = res.max((a - b).norm());
                    }
                }
            }
            Ok(res)
        },
    );

    ctx.residual(
        "s6.torus.flag",
        "the 7-leg flag of the torus map is a G2-flag with only the cyclic-diagram arrows",
        1e-8,
        || {
            let mut res: f64 = 0.0;
            for z0 in seeds.iter().take(5) {
                let f = vacuum_solution(z0, order)?;
                let flag = ac_flag(&f, 1e-9)?;
                res = res.max(flag.orthogonality_residual());
                res = res.max(flag.reality_residual(1e-9));
                res = res.max(flag.g2_residual(1e-9));
                res = res.max(flag.tau_pattern_residual(1e-9)?);
            }
            Ok(res)
        },
    );

    ctx.bool(
        "s6.torus.type",
        "the torus map classifies as non-full with period-6 harmonic sequence",
        || {
            let f = vacuum_solution(&seeds[0], order)?;
            Ok(classify(&f, 1e-9)? == AcType::NotFull)
        },
    );

    ctx.bool(
        "s6.roundtrip.fphi",
        "the correspondence F -> G''(f) + f + G'(f) inverts through F = i conj(L) x L / |L|^2",
        || {
            let f = vacuum_solution(&seeds[1], order)?;
            let flag = ac_flag(&f, 1e-9)?;
            let phi = add_uniton_pair(&f, flag.leg(1), 1e-7)?;
            let back = acmap_from_phi(&phi, LSource::GaussDoublePrimePerp, 1e-7)?;
            Ok(back.section.sub(&f.section).max_mag() < 1e-7)
        },
    );

    ctx.bool(
        "s6.bryant.curve",
        "the polynomial superhorizontal curve maps to a full superminimal almost complex map with f = G3(h)",
        || {
            let h = Q5Curve::<Complex64>::standard(
                &Complex64::new(1.0 / 3.0, 0.0),
                &Complex64::new(1.0, 0.0),
                9,
                1e-10,
            )?;
            if !h.is_superhorizontal(1e-10)? {
                return Ok(false);
            }
            let f_map = bryant_map(&h, 1e-10)?;
            if f_map.almost_complex_residual()? > 1e-10 {
                return Ok(false);
            }
            let g3 = crate::bundles::iterated_gauss(&h.line(1e-10)?, 3, 1e-10)?;
            if !f_map.line(1e-10)?.equals_at_base(&g3, 1e-8) {
                return Ok(false);
            }
            Ok(classify(&f_map, 1e-9)? == AcType::FullSuperminimal)
        },
    );

    ctx.bool(
        "s6.superhorizontal.split",
        "the superhorizontality predicate separates the orbit curve from the counterexample",
        || {
            let good = Q5Curve::<Gq>::standard(&Gq::from_ratio(1, 3), &Gq::one(), 7, 0.0)?;
            let bad = Q5Curve::<Gq>::new(fixtures::non_superhorizontal_curve(5), 0.0)?;
            Ok(good.is_superhorizontal(0.0)? && !bad.is_superhorizontal(0.0)?)
        },
    );

    ctx.bool(
        "s6.lemma.tangent",
        "tangent-space identities at random points of the sphere: a x conj(b) = i(a, conj b)F and |a x b|^2 = 2(|a|^2|b|^2 - |(a,conj b)|^2)",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xD1);
            for _ in 0..100 {
                let f = vacuum_value(Complex64::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ));
                let fv = Vec7::<Complex64> {
                    c: std::array::from_fn(|k| f[k]),
                };
                // random (1,0) tangent vectors: v - i F x v projected
                let mut t10 = |rng: &mut ChaCha8Rng| {
                    let v = Vec7::<Complex64>::random(rng);
                    let v = v.sub(&fv.scale(&v.herm(&fv))); // tangent
                    let jv = fv.cross(&v);
                    v.sub(&jv.scale(&Complex64::new(0.0, 1.0))) // (1,0) part
                };
                let a = t10(&mut rng);
                let b = t10(&mut rng);
                let lhs = a.cross(&b.conj());
                let rhs = fv.scale(&a.herm(&b).mul(&Complex64::new(0.0, 1.0)));
                if lhs.sub(&rhs).mag() > 1e-9 {
                    return Ok(false);
                }
                let axb = a.cross(&b);
                // a x b lands in (0,1): J(a x b) = -i (a x b)
                let j = fv.cross(&axb);
                if j.add(&axb.scale(&Complex64::new(0.0, 1.0))).mag() > 1e-9 {
                    return Ok(false);
                }
                let n2 = axb.herm(&axb).re;
                let expect = 2.0
                    * (a.herm(&a).re * b.herm(&b).re - a.herm(&b).norm() * a.herm(&b).norm());
                if (n2 - expect).abs() > 1e-8 {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );
}

// ---------------------------------------------------------------- twistor

struct TwistorFixtures {
    phi1: JetSubbundle<Complex64>,
    phi2: JetSubbundle<Complex64>,
    phi3: JetSubbundle<Complex64>,
    f_torus: AcMap<Complex64>,
    torus_flag: Flag<Complex64>,
}

fn twistor_fixtures(cfg: &VerifyConfig) -> Result<TwistorFixtures> {
    let f_torus = vacuum_solution(&Complex64::new(0.17, 0.31), cfg.jet_order.max(8))?;
    let torus_flag = ac_flag(&f_torus, 1e-9)?;
    let phi1 = add_uniton_pair(&f_torus, torus_flag.leg(1), 1e-7)?;
    let h = Q5Curve::<Complex64>::standard(
        &Complex64::new(1.0 / 3.0, 0.0),
        &Complex64::new(1.0, 0.0),
        12,
        1e-10,
    )?;
    let alpha = chain_line(
        &h,
        &Jet::one(12),
        &Jet::zero(12),
        &Complex64::new(1.0, 0.0),
        1e-10,
    )?;
    let phi2 = alpha_construction(&h, &alpha, 1e-9)?;
    let h3 = Q5Curve::<Complex64>::standard(
        &Complex64::new(0.25, 0.0),
        &Complex64::new(1.0, 0.0),
        10,
        1e-10,
    )?;
    let phi3 = prop_family(&h3, 2, 1e-10)?;
    Ok(TwistorFixtures {
        phi1,
        phi2,
        phi3,
        f_torus,
        torus_flag,
    })
}

fn lift_residual<S: Scalar>(phi: &JetSubbundle<S>, flag: &Flag<S>, tol: f64) -> Result<f64> {
    let mut res: f64 = flag.orthogonality_residual();
    res = res.max(flag.reality_residual(tol));
    res = res.max(flag.g2_residual(tol));
    res = res.max(flag.j2_residual(tol)?);
    let proj = flag.project(tol)?;
    res = res.max(proj.contains_residual(phi, tol));
    res = res.max(phi.contains_residual(&proj, tol));
    Ok(res)
}

fn twistor_suite(ctx: &mut Ctx, cfg: &VerifyConfig) {
    let fx = match twistor_fixtures(cfg) {
        Ok(fx) => fx,
        Err(e) => {
            ctx.checks.push(CheckResult {
                id: "tw.fixtures".into(),
                status: Status::Error,
                residual: None,
                anchor: "fixture construction".into(),
                detail: Some(e.to_string()),
            });
            return;
        }
    };

    ctx.bool(
        "tw.s.invariants",
        "the three fixture maps have s = 1, 2, 3 respectively",
        || {
            Ok(s_invariant(&fx.phi1, 1e-7)? == Some(1)
                && s_invariant(&fx.phi2, 1e-8)? == Some(2)
                && s_invariant(&fx.phi3, 1e-8)? == Some(3))
        },
    );

    ctx.residual(
        "tw.lift.s1",
        "the coassociative lift of the strongly conformal torus map: G2-flag, J2, projects back",
        1e-8,
        || {
            let flag = lift_s1(&fx.phi1, 1e-7)?;
            let mut res = lift_residual(&fx.phi1, &flag, 1e-7)?;
            // W = psi2 + psi3 of the almost-complex flag
            let expect = fx.torus_flag.leg(2).sum(fx.torus_flag.leg(3), 1e-9)?;
            res = res.max(flag.leg(1).contains_residual(&expect, 1e-9));
            Ok(res)
        },
    );

    ctx.residual(
        "tw.lift.s2",
        "the isotropic-line lift of the chain-line construction, with psi2 = conj(alpha)",
        1e-8,
        || {
            let flag = lift_s2(&fx.phi2, 1e-8)?;
            lift_residual(&fx.phi2, &flag, 1e-8)
        },
    );

    ctx.residual(
        "tw.lift.s3",
        "the (line, plane) lift of the middle superhorizontal family member",
        1e-8,
        || {
            let flag = lift_s3(&fx.phi3, 1e-8)?;
            lift_residual(&fx.phi3, &flag, 1e-8)
        },
    );

    ctx.bool(
        "tw.nilorder.bound",
        "r - 1 <= 2 s(phi) <= r + 1 on every harmonic fixture",
        || {
            let rank2 = crate::s6::rank2_construction(&fx.f_torus, 1e-9)?;
            let h = Q5Curve::<Complex64>::standard(
                &Complex64::new(0.25, 0.0),
                &Complex64::new(1.0, 0.0),
                9,
                1e-10,
            )?;
            let fam1 = prop_family(&h, 1, 1e-9)?;
            let fam3 = prop_family(&h, 3, 1e-9)?;
            for (phi, tol) in [
                (&fx.phi1, 1e-7),
                (&fx.phi2, 1e-8),
                (&fx.phi3, 1e-8),
                (&rank2, 1e-7),
                (&fam1, 1e-8),
                (&fam3, 1e-8),
            ] {
                if harmonic_residual(phi, tol)? >= tol {
                    return Ok(false);
                }
                let r = nilorder(phi, tol)?.ok_or(crate::G2Error::NotNilconformal)? as i64;
                let s = s_invariant(phi, tol)?.ok_or(crate::G2Error::NotNilconformal)? as i64;
                if !(r - 1 <= 2 * s && 2 * s <= r + 1) {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "tw.uniqueness.s1",
        "the s = 1 lift equals the manual coassociative extension of G'(phi)",
        || {
            let flag = lift_s1(&fx.phi1, 1e-7)?;
            let gp = crate::bundles::gauss_transform(&fx.phi1, crate::bundles::GaussDir::Prime, 1e-7)?;
            let perp = fx.phi1.herm_perp(1e-7)?;
            let manual = gp.annihilator(1e-7)?.intersect(&perp, 1e-7)?;
            Ok(crate::twistor::check_uniqueness(
                &flag,
                &Flag::new(1, vec![manual.conj(), fx.phi1.clone(), manual])?,
                1e-6,
            ))
        },
    );

    ctx.residual(
        "tw.projection.nilpotency",
        "a J2-holomorphic flag's projection satisfies the nilpotency bound (A_z)^{2s}((-1)^{s-1}phi) = 0",
        1e-7,
        || {
            let flag = lift_s2(&fx.phi2, 1e-8)?;
            crate::twistor::projection_nilpotency_residual(&flag, 1e-8)
        },
    );

    ctx.residual(
        "tw.filtrations",
        "image and kernel filtrations are strict A_z-filtrations at jet level",
        1e-7,
        || {
            let fi = crate::bundles::filtration_by_images(&fx.phi1, 1e-7)?;
            let fk = crate::bundles::filtration_by_kernels(&fx.phi1, 1e-7)?;
            Ok(fi.residual(&fx.phi1, 1e-7)?.max(fk.residual(&fx.phi1, 1e-7)?))
        },
    );

    ctx.bool(
        "tw.az.oracle",
        "A_z powers agree with the projection-derivative oracle (2 pi - 1) d(pi) on random exact bundles",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xE1);
            for _ in 0..50 {
                let rank = rng.gen_range(1..=3);
                let phi = oracles::random_polynomial_bundle(&mut rng, rank, 4)?;
                if !oracles::az_matches_projection_derivative(&phi)? {
                    return Ok(false);
                }
            }
            Ok(true)
        },
    );

    ctx.bool(
        "tw.superhorizontal.family",
        "s = 1 for the outer family members, with both a T1 and a superhorizontal T2 lift at i = 3",
        || {
            let h = Q5Curve::<Complex64>::standard(
                &Complex64::new(0.25, 0.0),
                &Complex64::new(1.0, 0.0),
                10,
                1e-10,
            )?;
            for i in [1u32, 3] {
                let phi = prop_family(&h, i, 1e-9)?;
                if s_invariant(&phi, 1e-8)? != Some(1) {
                    return Ok(false);
                }
            }
            let phi3 = prop_family(&h, 3, 1e-9)?;
            let t1 = lift_s1(&phi3, 1e-8)?;
            if lift_residual(&phi3, &t1, 1e-8)? > 1e-7 {
                return Ok(false);
            }
            let hline = h.line(1e-10)?;
            let g = |k: i32| crate::bundles::iterated_gauss(&hline, k, 1e-10);
            let legs = vec![
                g(0)?,
                g(1)?.sum(&g(2)?, 1e-10)?,
                g(3)?,
                g(4)?.sum(&g(5)?, 1e-10)?,
                g(6)?,
            ];
            let t2 = Flag::new(2, legs)?;
            Ok(t2.is_superhorizontal(1e-8)?
                && t2.is_g2_flag(1e-7)
                && t2.project(1e-9)?.equals_at_base(&phi3, 1e-7))
        },
    );
}

// ---------------------------------------------------------------- loops

fn loops_suite(ctx: &mut Ctx, _cfg: &VerifyConfig) {
    let (h, h16) = match Q5Curve::<Complex64>::standard(
        &Complex64::new(1.0 / 3.0, 0.0),
        &Complex64::new(1.0, 0.0),
        14,
        1e-10,
    )
    .and_then(|a| {
        Q5Curve::<Complex64>::standard(
            &Complex64::new(1.0 / 3.0, 0.0),
            &Complex64::new(1.0, 0.0),
            16,
            1e-10,
        )
        .map(|b| (a, b))
    }) {
        Ok(pair) => pair,
        Err(e) => {
            ctx.checks.push(CheckResult {
                id: "lp.fixtures".into(),
                status: Status::Error,
                residual: None,
                anchor: "fixture construction".into(),
                detail: Some(e.to_string()),
            });
            return;
        }
    };
    let t = Complex64::new(1.0, 0.0);

    ctx.bool(
        "lp.e62.degree",
        "lambda^2 Phi is a polynomial of degree exactly 4, unitary on the circle",
        || {
            let ex = example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-9)?;
            Ok(ex.phi.min_deg() == -2
                && ex.phi.max_deg() == 2
                && !ex.phi.coeff(-2).unwrap().is_zero_tol(1e-8)
                && ex.phi.unitarity_residual(16) < 1e-9)
        },
    );

    ctx.residual(
        "lp.e62.model",
        "reality (conj W)^perp = lambda W and vector-product closure of the model",
        1e-9,
        || {
            let ex = example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-9)?;
            let model = grassmannian_model(&ex.phi, 1e-9)?;
            Ok(model
                .reality_residual(1e-9)?
                .max(model.closure_residual(1e-9)?))
        },
    );

    ctx.bool(
        "lp.e62.basis",
        "W/lambda W matches the quoted graded basis up to a change of frame",
        || {
            let ex = example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-9)?;
            let model = grassmannian_model(&ex.phi, 1e-9)?;
            let quoted = quoted_basis_s2(&ex.chain, &Jet::one(14), &Jet::zero(14), &t, 14);
            model.matches_quotient_basis(&quoted, 1e-8)
        },
    );

    ctx.bool(
        "lp.e62.s1.limit",
        "the t -> 0 limit is S1-invariant while the deformed loop is not (the projections do not commute)",
        || {
            let ex1 = example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-9)?;
            let ex0 = example_s2_loop(
                &h,
                &Jet::one(14),
                &Jet::zero(14),
                &Complex64::new(0.0, 0.0),
                1e-9,
            )?;
            let m1 = grassmannian_model(&ex1.phi, 1e-9)?;
            let m0 = grassmannian_model(&ex0.phi, 1e-9)?;
            Ok(!m1.is_s1_invariant(1e-8)? && m0.is_s1_invariant(1e-8)?)
        },
    );

    ctx.bool(
        "lp.e62.uniton.number",
        "the minimal uniton number is exactly 4, with the last uniton alpha and the preceding one A",
        || {
            let ex = example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-9)?;
            let u = uniton_number(&ex.phi, 1e-9)?;
            let unitons = alternating_factorization(&ex.phi, 1e-8)?;
            Ok(u.value == 4
                && u.exact
                && unitons.len() == 2
                && unitons[0].equals_at_base(&ex.alpha, 1e-7)
                && unitons[1].equals_at_base(&ex.big_a, 1e-7))
        },
    );

    ctx.residual(
        "lp.e62.lift",
        "the canonical lift is a J2-holomorphic G2-flag projecting onto the built harmonic map",
        1e-6,
        || {
            let ex = example_s2_loop(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-9)?;
            let model = grassmannian_model(&ex.phi, 1e-9)?;
            let flag = model.legs(1e-9)?;
            let alpha = chain_line(&h, &Jet::one(14), &Jet::zero(14), &t, 1e-10)?;
            let phi_map = alpha_construction(&h, &alpha, 1e-9)?;
            lift_residual(&phi_map, &flag, 1e-9)
        },
    );

    ctx.bool(
        "lp.e63.containments",
        "lambda^3 H+ inside W inside lambda^-3 H+ with width 3 minimal",
        || {
            let ex = example_s3_loop(&h16, &Jet::one(16), &t, 1e-8)?;
            Ok(ex.model.s == 3
                && ex.model.contains_lambda_power(3, 1e-7)?
                && !ex.model.contains_lambda_power(2, 1e-7)?
                && ex.model.within_lambda_power(3, 1e-8))
        },
    );

    ctx.residual(
        "lp.e63.model",
        "reality and vector-product closure of the graded module",
        1e-6,
        || {
            let ex = example_s3_loop(&h16, &Jet::one(16), &t, 1e-8)?;
            Ok(ex
                .model
                .reality_residual(1e-8)?
                .max(ex.model.closure_residual(1e-8)?))
        },
    );

    ctx.bool(
        "lp.e63.basis.and.lift",
        "the quoted graded basis spans W/lambda W and the canonical lift passes the leg-product conditions",
        || {
            let ex = example_s3_loop(&h16, &Jet::one(16), &t, 1e-8)?;
            let quoted = quoted_basis_s3(&ex.chain, &Jet::one(16), &t, ex.phi.order());
            if !ex.model.matches_quotient_basis(&quoted, 1e-7)? {
                return Ok(false);
            }
            let flag = ex.model.legs(1e-8)?;
            Ok(flag.g2_residual(1e-8) < 1e-6 && flag.j2_residual(1e-8)? < 1e-6)
        },
    );

    ctx.bool(
        "lp.e63.uniton.number",
        "the minimal uniton number is precisely 6 and the last uniton is spanned by H + t b H5",
        || {
            let ex = example_s3_loop(&h16, &Jet::one(16), &t, 1e-8)?;
            let u = uniton_number(&ex.phi, 1e-8)?;
            let unitons = alternating_factorization(&ex.phi, 1e-7)?;
            let gamma6 = JetSubbundle::from_sections(vec![ex.last_uniton_section.clone()], 1e-8)?;
            Ok(u.value == 6 && u.exact && unitons.len() == 3
                && unitons[0].equals_at_base(&gamma6, 1e-6))
        },
    );

    ctx.bool(
        "lp.s1loop.consistency",
        "the S1-invariant loop of a superhorizontal lift projects to the flag projection, with the Cartan cross-check",
        || {
            let h9 = Q5Curve::<Complex64>::standard(
                &Complex64::new(0.25, 0.0),
                &Complex64::new(1.0, 0.0),
                10,
                1e-10,
            )?;
            let phi3 = prop_family(&h9, 3, 1e-9)?;
            let flag = lift_s1(&phi3, 1e-8)?;
            let w = flag.leg(1);
            let loop1 = crate::loops::MatrixLoop::uniton_factor_real_pair(&w.conj(), 1e-8)?;
            let model = grassmannian_model(&loop1, 1e-8)?;
            if !model.is_s1_invariant(1e-7)? {
                return Ok(false);
            }
            let projected = harmonic_map_of(&loop1, 1e-8)?;
            if !projected.equals_at_base(&phi3, 1e-6) {
                return Ok(false);
            }
            Ok(cartan_cross_check(&loop1, &phi3, 1e-8)? < 1e-7)
        },
    );
}

// ---------------------------------------------------------------- oracles

pub mod oracles {
    //! Independent dense brute-force routes for the oracle-equivalence
    //! checks.  These deliberately avoid the jet linear-algebra engine.

    use super::*;
    use crate::error::G2Error;
    use crate::linalg::JetMat;

    /// Kernel of {v : v × b = 0} by plain dense elimination over the
    /// scalars, first-come pivoting, no jets involved.
    pub fn annihilator_dense(b: &Vec7<Gq>) -> Vec<Vec7<Gq>> {
        // build the 7×7 matrix of v ↦ v × b in coordinates
        let mut m: Vec<Vec<Gq>> = (0..7)
            .map(|k| {
                (0..7)
                    .map(|j| Vec7::<Gq>::basis(j + 1).cross(b).c[k].clone())
                    .collect()
            })
            .collect();
        let n = 7usize;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut row = 0usize;
        for col in 0..n {
            let piv = (row..n).find(|&r| !m[r][col].is_zero());
            let piv = match piv {
                Some(p) => p,
                None => continue,
            };
            m.swap(row, piv);
            let inv = m[row][col].inv().unwrap();
            for x in m[row].iter_mut() {
                *x = x.mul(&inv);
            }
            for r in 0..n {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..n {
                        let s = f.mul(&m[row][c]);
                        m[r][c] = m[r][c].sub(&s);
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        let piv_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut out = Vec::new();
        for free in 0..n {
            if piv_cols.contains(&free) {
                continue;
            }
            let mut v = Vec7::zero();
            v.c[free] = Gq::one();
            for &(r, c) in &pivots {
                v.c[c] = m[r][free].neg();
            }
            out.push(v);
        }
        out
    }

    /// Both maximally isotropic extensions of an isotropic line in
    /// ξ⊥⊗ℂ, found by solving the quadratic on the rank-2 quotient of
    /// the polar directly (exact square roots in ℚ(i)).
    pub fn extensions_by_quadric(
        beta: &Subspace<Gq>,
        xi: &Subspace<Gq>,
    ) -> Result<(Subspace<Gq>, Subspace<Gq>)> {
        let b = beta.basis()[0].clone();
        let amb = xi.herm_perp(0.0);
        // candidates: polar of beta inside the ambient, modulo beta
        let cand = beta.polar(0.0).intersect(&amb, 0.0);
        let mut others: Vec<Vec7<Gq>> = Vec::new();
        for v in cand.basis() {
            // quotient by beta: strip the beta-component via Hermitian
            // projection so representatives are independent
            let c = v.herm(&b).mul(&b.herm(&b).inv().unwrap());
            let w = v.sub(&b.scale(&c));
            if !w.is_zero() {
                others.push(w);
            }
        }
        let basis = Subspace::span(&others, 0.0);
        if basis.rank() != 2 {
            return Err(G2Error::RankDrop);
        }
        let (g1, g2) = (basis.basis()[0].clone(), basis.basis()[1].clone());
        // isotropic lines x g1 + y g2: a x² + 2b' x y + c y² = 0
        let aa = g1.dot(&g1);
        let bb = g1.dot(&g2);
        let cc = g2.dot(&g2);
        let mut lines: Vec<Vec7<Gq>> = Vec::new();
        if aa.is_zero() {
            lines.push(g1.clone());
            // second root: 2 b x + c y = 0 along y ≠ 0
            if !bb.is_zero() {
                lines.push(g1.scale(&cc.neg()).add(&g2.scale(&bb.scale_int(2))));
            } else {
                lines.push(g2.clone());
            }
        } else {
            let disc = bb.mul(&bb).sub(&aa.mul(&cc));
            let root = fixtures::gq_sqrt(&disc).ok_or_else(|| {
                G2Error::Precondition("extension discriminant is not a square".into())
            })?;
            for sign in [Gq::one(), Gq::one().neg()] {
                let x = bb.neg().add(&root.mul(&sign));
                lines.push(g1.scale(&x).add(&g2.scale(&aa)));
            }
        }
        let mut plus = None;
        let mut minus = None;
        for line in lines {
            let w = Subspace::span(&[b.clone(), line], 0.0);
            if w.rank() != 2 {
                continue;
            }
            if is_complex_coassociative(&w, 0.0)? {
                plus = Some(w);
            } else {
                minus = Some(w);
            }
        }
        match (plus, minus) {
            (Some(p), Some(m)) => Ok((p, m)),
            _ => Err(G2Error::Precondition(
                "quadric solve did not find both extensions".into(),
            )),
        }
    }

    /// Random exact subbundle with low-degree polynomial sections.
    pub fn random_polynomial_bundle(
        rng: &mut ChaCha8Rng,
        rank: usize,
        order: usize,
    ) -> Result<JetSubbundle<Gq>> {
        let mut sections = Vec::new();
        for _ in 0..rank {
            sections.push(JetVec7::from_fn(|_| {
                let mut j = Jet::zero(order);
                j.set_coeff(0, 0, Gq::random(rng));
                j.set_coeff(1, 0, Gq::random(rng));
                j.set_coeff(0, 1, Gq::random(rng));
                j
            }));
        }
        JetSubbundle::from_sections(sections, 0.0)
    }

    /// Does the section-wise A_z agree with (2π − I)·∂_z π as matrices,
    /// power by power, at jet level?
    pub fn az_matches_projection_derivative(phi: &JetSubbundle<Gq>) -> Result<bool> {
        let order = phi.order();
        let mut pmat = JetMat::zero(7, 7, order);
        for j in 0..7 {
            let ej = JetVec7::constant(&Vec7::basis(j + 1), order);
            let p = phi.project(&ej, 0.0)?;
            for k in 0..7 {
                *pmat.at_mut(k, j) = p.c[k].truncate(order.min(p.order()));
            }
        }
        let dp = pmat.map(|j| j.dz().expect("order"));
        let two_p_minus_i = pmat.add(&pmat).sub(&JetMat::identity(7, order));
        let oracle = two_p_minus_i
            .map(|j| j.truncate(order - 1))
            .mul(&dp);
        let main = crate::bundles::az_matrix(phi, 0.0)?;
        let o = main.order().min(oracle.order());
        let mut main_pow = main.map(|j| j.truncate(o));
        let mut oracle_pow = oracle.map(|j| j.truncate(o));
        let m0 = main_pow.clone();
        let o0 = oracle_pow.clone();
        for _ in 0..3 {
            if !main_pow.sub(&oracle_pow).is_zero_tol(0.0) {
                return Ok(false);
            }
            main_pow = main_pow.mul(&m0);
            oracle_pow = oracle_pow.mul(&o0);
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_fixture_is_current() {
        assert_eq!(weight_product_fixture(), WEIGHT_TABLE_FIXTURE);
    }

    #[test]
    fn algebra_suite_passes() {
        let report = run_suite(Suite::Algebra, &VerifyConfig::default());
        assert!(report.all_pass(), "{}", report.render_text());
    }

    #[test]
    fn weights_suite_passes() {
        let report = run_suite(Suite::Weights, &VerifyConfig::default());
        assert!(report.all_pass(), "{}", report.render_text());
    }
}
