//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line.  Tolerances are pinned here and in the underlying suites; run
//! with `cargo test --test acceptance -- --nocapture` to see the lines.

use g2twist::scalar::{Gq, Scalar};
use g2twist::vec7::Vec7;
use g2twist::verify::{run_suite, Report, Status, Suite, VerifyConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use std::time::Instant;

fn full_report() -> &'static Report {
    static REPORT: OnceLock<Report> = OnceLock::new();
    REPORT.get_or_init(|| run_suite(Suite::All, &VerifyConfig::default()))
}

fn require(criterion: &str, ids: &[&str]) {
    let report = full_report();
    let mut ok = true;
    let mut lines = Vec::new();
    for id in ids {
        let check = report
            .checks
            .iter()
            .find(|c| c.id == *id)
            .unwrap_or_else(|| panic!("{criterion}: check `{id}` missing from the suite"));
        let pass = check.status == Status::Pass;
        ok &= pass;
        lines.push(format!(
            "    {id}: {}{}",
            if pass { "pass" } else { "FAIL" },
            check
                .residual
                .map(|r| format!(" (residual {r:.3e})"))
                .unwrap_or_default()
        ));
    }
    println!(
        "criterion {criterion}: {}",
        if ok { "PASS" } else { "FAIL" }
    );
    for line in lines {
        println!("{line}");
    }
    assert!(ok, "{criterion} failed:\n{}", report.render_text());
}

#[test]
fn criterion_01_octonion_identities_exact_and_fast() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let u = Vec7::<Gq>::random(&mut rng);
        let v = Vec7::<Gq>::random(&mut rng);
        let w = Vec7::<Gq>::random(&mut rng);
        assert_eq!(u.dot(&v.cross(&w)), u.cross(&v).dot(&w));
        let lhs = u.cross(&v.cross(&w)).add(&u.cross(&v).cross(&w));
        let rhs = v
            .scale(&u.dot(&w).scale_int(2))
            .sub(&w.scale(&u.dot(&v)))
            .sub(&u.scale(&v.dot(&w)));
        assert_eq!(lhs, rhs, "double-product identity violated");
    }
    let elapsed = start.elapsed();
    println!(
        "criterion 01: PASS (1000 exact triples in {:.2?}, limit 10 s)",
        elapsed
    );
    assert!(elapsed.as_secs_f64() < 10.0, "identity sweep too slow");
}

#[test]
fn criterion_02_weight_table_and_annihilator() {
    require("02", &["wt.table.49pairs", "wt.annihilator.topline"]);
}

#[test]
fn criterion_03_standard_flags() {
    require("03", &["wt.flags.g2", "wt.flags.project"]);
}

#[test]
fn criterion_04_positivity_is_coassociativity() {
    require("04", &["alg.positivity.coassoc", "alg.positivity.float"]);
}

#[test]
fn criterion_05_torus_example() {
    require(
        "05",
        &[
            "s6.torus.pointwise",
            "s6.torus.periods",
            "s6.torus.flag",
        ],
    );
}

#[test]
fn criterion_06_lift_round_trips() {
    require(
        "06",
        &[
            "tw.s.invariants",
            "tw.lift.s1",
            "tw.lift.s2",
            "tw.lift.s3",
        ],
    );
}

#[test]
fn criterion_07_degree_four_loop() {
    require(
        "07",
        &[
            "lp.e62.degree",
            "lp.e62.model",
            "lp.e62.basis",
            "lp.e62.s1.limit",
        ],
    );
}

#[test]
fn criterion_08_degree_six_loop() {
    require(
        "08",
        &[
            "lp.e63.containments",
            "lp.e63.uniton.number",
            "lp.e63.basis.and.lift",
        ],
    );
}

#[test]
fn criterion_09_nilorder_relation() {
    require("09", &["tw.nilorder.bound"]);
}

#[test]
fn criterion_10_oracle_equivalence() {
    require(
        "10",
        &[
            "alg.annihilator.oracle",
            "alg.extension.oracle",
            "tw.az.oracle",
        ],
    );
}
