//! Acceptance suite: runs every verification criterion at its stated
//! truncation and prints one pass/fail line per criterion. All comparisons
//! are exact rational identities at deterministic pseudo-random points;
//! there are no tolerances to tune.

use quadvertex::verify::{
    verify_coho1, verify_coho2, verify_conifold, verify_dimred, verify_dtpt_sweep,
    verify_nekrasov, verify_properties, CriterionReport, VerifyOptions,
};

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn report_line(index: u32, what: &str, report: &CriterionReport) {
    println!(
        "criterion {index} ({what}): {}",
        if report.pass { "PASS" } else { "FAIL" }
    );
    for line in &report.lines {
        println!("    {line}");
    }
}

#[test]
fn criterion_1_point_count_closed_form() {
    // series identity through q^4 with per-order fixed-point counts
    // 1, 4, 10, 26 re-derived by the independent layer oracle, and the
    // per-order sign solutions unique
    let report = verify_nekrasov(4, &opts()).expect("nekrasov driver");
    report_line(1, "point-count closed form", &report);
    assert!(report.pass, "{:#?}", report.lines);
}

#[test]
fn criterion_2_vertex_correspondence() {
    // all leg data with total size <= 2 through q^3, total size 3 through
    // q^2; identities exact at 5 points; per-order sign solutions unique
    // and containing the closed-form signs on both sides
    let report =
        verify_dtpt_sweep(&[(0, 3), (1, 3), (2, 3), (3, 2)], &opts()).expect("dtpt driver");
    report_line(2, "vertex correspondence", &report);
    assert!(report.pass, "{:#?}", report.lines);
}

#[test]
fn criterion_3_local_conifold() {
    // degrees 1 and 2 through q^3 (and the stretch degree 3, whose first
    // nontrivial order is q^3), with unique edge signs per degree, plus the
    // reduced series against the reduced closed form
    let report = verify_conifold(3, 3, &opts()).expect("conifold driver");
    report_line(3, "local resolved conifold", &report);
    assert!(report.pass, "{:#?}", report.lines);
}

#[test]
fn criterion_4_dimensional_reduction() {
    // every 3-fold fixed point within total leg size <= 3 matches the
    // reduced 4-fold class weight by weight; off-hyperplane subschemes
    // reduce to zero; series identity at -q through q^2
    let report = verify_dimred(3, 2, &opts()).expect("dimred driver");
    report_line(4, "dimensional reduction", &report);
    assert!(report.pass, "{:#?}", report.lines);
}

#[test]
fn criterion_5_conifold_reduction() {
    // the y = t4 reduction of the assembled series equals the reduced
    // closed form through q^3, Q^2 (checked inside the conifold driver)
    let report = verify_conifold(2, 3, &opts()).expect("conifold driver");
    let line = report
        .lines
        .iter()
        .find(|l| l.contains("reduction"))
        .expect("reduction line present");
    println!("criterion 5 (conifold reduction): {}", if report.pass { "PASS" } else { "FAIL" });
    println!("    {line}");
    assert!(report.pass, "{:#?}", report.lines);
}

#[test]
fn criterion_6_cohomological_limits() {
    let r1 = verify_coho1(3, &opts()).expect("coho1 driver");
    report_line(6, "cohomological limit I", &r1);
    let r2 = verify_coho2(3, &opts()).expect("coho2 driver");
    report_line(6, "cohomological limit II", &r2);
    assert!(r1.pass, "{:#?}", r1.lines);
    assert!(r2.pass, "{:#?}", r2.lines);
}

#[test]
fn criterion_7_property_suites() {
    // enumeration counts against independent oracles, square-root
    // decompositions, worker-count determinism; the per-class structural
    // invariants (rank zero, integer torus powers, no fixed deformation
    // term, y-part identity) are enforced inside every class assembly and
    // so are exercised by every other criterion as well
    let report = verify_properties(&opts()).expect("properties driver");
    report_line(7, "property suites", &report);
    assert!(report.pass, "{:#?}", report.lines);
}
