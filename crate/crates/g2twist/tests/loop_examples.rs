//! Integration tests for the two explicit finite-uniton-number examples:
//! the degree-4 extended solution over the chain line and the degree-6
//! graded-module construction, including their Grassmannian models,
//! canonical lifts, uniton numbers and alternating factorizations.

use g2twist::jet::Jet;
use g2twist::linalg::JetMat;
use g2twist::loops::{
    alternating_factorization, example_s2_loop, example_s3_loop, grassmannian_model,
    harmonic_map_of, quoted_basis_s2, quoted_basis_s3, uniton_number, MatrixLoop,
};
use g2twist::s6::{alpha_construction, chain_line, prop_family, Q5Curve};
use num_complex::Complex64;

const TOL: f64 = 1e-9;

fn curve(order: usize) -> Q5Curve<Complex64> {
    Q5Curve::standard(
        &Complex64::new(1.0 / 3.0, 0.0),
        &Complex64::new(1.0, 0.0),
        order,
        1e-10,
    )
    .unwrap()
}

fn one(order: usize) -> Jet<Complex64> {
    Jet::one(order)
}

#[test]
fn degree_four_example_full_suite() {
    let h = curve(14);
    let t = Complex64::new(1.0, 0.0);
    let ex = example_s2_loop(&h, &one(14), &Jet::zero(14), &t, TOL).unwrap();

    // λ²Φ is a polynomial of degree exactly 4
    assert_eq!((ex.phi.min_deg(), ex.phi.max_deg()), (-2, 2));
    assert!(!ex.phi.coeff(-2).unwrap().is_zero_tol(1e-8));
    assert!(!ex.phi.coeff(2).unwrap().is_zero_tol(1e-8));
    assert!(ex.phi.unitarity_residual(16) < 1e-9);
    assert!(ex.phi.based_residual() < 1e-9);

    // leading term T₀ = π_A ∘ π_α with image h
    let order = ex.phi.order();
    let pa = projection(&ex.big_a, order);
    let pal = projection(&ex.alpha, order);
    let t0 = ex.phi.coeff(-2).unwrap();
    assert!(t0.sub(&pa.mul(&pal)).is_zero_tol(1e-9));
    let img = image_bundle(t0, TOL);
    assert!(img.equals_at_base(&ex.h_line, 1e-8));

    // Grassmannian model: reality, product closure, quoted basis
    let model = grassmannian_model(&ex.phi, TOL).unwrap();
    assert_eq!(model.s, 2);
    assert!(model.reality_residual(TOL).unwrap() < 1e-9);
    assert!(model.closure_residual(TOL).unwrap() < 1e-9);
    let quoted = quoted_basis_s2(&ex.chain, &one(14), &Jet::zero(14), &t, 14);
    assert!(model.matches_quotient_basis(&quoted, 1e-8).unwrap());
    assert!(!model.is_s1_invariant(1e-8).unwrap());

    // π_A and π_α do not commute
    let comm = pa.mul(&pal).sub(&pal.mul(&pa));
    assert!(comm.max_mag() > 1e-3);

    // canonical lift: G₂-flag, J₂-holomorphic, projects onto φ = ᾱ⊕f⊕α
    let flag = model.legs(TOL).unwrap();
    assert!(flag.g2_residual(TOL) < 1e-8);
    assert!(flag.j2_residual(TOL).unwrap() < 1e-7);
    assert!(flag.reality_residual(TOL) < 1e-8);
    let phi_map = alpha_construction(&h, &chain_line(&h, &one(14), &Jet::zero(14), &t, TOL).unwrap(), TOL)
        .unwrap();
    let projected = flag.project(TOL).unwrap();
    assert!(projected.equals_at_base(&phi_map, 1e-7));
    let via_loop = harmonic_map_of(&ex.phi, TOL).unwrap();
    assert!(via_loop.equals_at_base(&phi_map, 1e-7));

    // minimal uniton number 4, exact by fullness of the leading image
    let u = uniton_number(&ex.phi, TOL).unwrap();
    assert_eq!(u.value, 4);
    assert!(u.exact);

    // the last Uhlenbeck uniton is α, the previous one is A
    let unitons = alternating_factorization(&ex.phi, 1e-8).unwrap();
    assert_eq!(unitons.len(), 2);
    assert!(unitons[0].equals_at_base(&ex.alpha, 1e-7));
    assert!(unitons[1].equals_at_base(&ex.big_a, 1e-7));
}

#[test]
fn degree_four_example_s1_limit() {
    let h = curve(14);
    let t0 = Complex64::new(0.0, 0.0);
    let ex = example_s2_loop(&h, &one(14), &Jet::zero(14), &t0, TOL).unwrap();
    let model = grassmannian_model(&ex.phi, TOL).unwrap();
    assert!(model.is_s1_invariant(1e-8).unwrap());
    // the limit is the type-one solution of φ₀ = G^{(−3)}(f) ⊕ f ⊕ G^{(3)}(f)
    let phi0 = prop_family(&h, 3, TOL).unwrap();
    let via_loop = harmonic_map_of(&ex.phi, TOL).unwrap();
    assert!(via_loop.equals_at_base(&phi0, 1e-7));
    // s(φ₀) = 1 even though the deformed family has s(φ) = 2
    assert_eq!(
        g2twist::bundles::s_invariant(&phi0, 1e-8).unwrap(),
        Some(1)
    );
    let u = uniton_number(&ex.phi, TOL).unwrap();
    assert_eq!(u.value, 4);
}

#[test]
fn degree_six_example_full_suite() {
    let h = curve(16);
    let t = Complex64::new(1.0, 0.0);
    let b = Jet::one(16);
    let ex = example_s3_loop(&h, &b, &t, 1e-8).unwrap();

    assert!(ex.phi.unitarity_residual(16) < 1e-8);
    assert!(ex.phi.based_residual() < 1e-8);
    assert_eq!((ex.phi.min_deg(), ex.phi.max_deg()), (-3, 3));

    // containments λ³H₊ ⊂ W ⊂ λ⁻³H₊ with s = 3 minimal
    assert_eq!(ex.model.s, 3);
    assert!(ex.model.contains_lambda_power(3, 1e-7).unwrap());
    assert!(!ex.model.contains_lambda_power(2, 1e-7).unwrap());
    assert!(ex.model.within_lambda_power(3, 1e-8));

    // G₂ conditions on the model
    assert!(ex.model.reality_residual(1e-8).unwrap() < 1e-7);
    assert!(ex.model.closure_residual(1e-8).unwrap() < 1e-7);

    // quoted graded basis, up to frame change
    let quoted = quoted_basis_s3(&ex.chain, &b, &t, ex.phi.order());
    assert!(ex.model.matches_quotient_basis(&quoted, 1e-7).unwrap());

    // canonical lift passes the leg-product conditions
    let flag = ex.model.legs(1e-8).unwrap();
    assert!(flag.g2_residual(1e-8) < 1e-6);
    assert!(flag.j2_residual(1e-8).unwrap() < 1e-6);

    // minimal uniton number exactly 6
    let u = uniton_number(&ex.phi, 1e-8).unwrap();
    assert_eq!(u.value, 6);
    assert!(u.exact);

    // the last Uhlenbeck uniton is spanned by H + t·b·H₅
    let unitons = alternating_factorization(&ex.phi, 1e-7).unwrap();
    assert_eq!(unitons.len(), 3);
    let gamma6 = g2twist::bundles::JetSubbundle::from_sections(
        vec![ex.last_uniton_section.clone()],
        1e-8,
    )
    .unwrap();
    assert!(unitons[0].equals_at_base(&gamma6, 1e-6));
}

#[test]
fn degree_six_example_s1_limit() {
    let h = curve(16);
    let t0 = Complex64::new(0.0, 0.0);
    let b = Jet::one(16);
    let ex = example_s3_loop(&h, &b, &t0, 1e-8).unwrap();
    assert!(ex.model.is_s1_invariant(1e-7).unwrap());
    // the limit projects onto φ₀ = G^{(−2)}(f) ⊕ f ⊕ G^{(2)}(f), which
    // keeps s(φ₀) = 3
    let phi0 = prop_family(&h, 2, 1e-9).unwrap();
    let via_loop = harmonic_map_of(&ex.phi, 1e-8).unwrap();
    assert!(via_loop.equals_at_base(&phi0, 1e-6));
    assert_eq!(g2twist::bundles::s_invariant(&phi0, 1e-8).unwrap(), Some(3));
}

fn projection(
    b: &g2twist::bundles::JetSubbundle<Complex64>,
    order: usize,
) -> JetMat<Complex64> {
    let mut m = JetMat::zero(7, 7, order);
    for j in 0..7 {
        let ej = g2twist::jet::JetVec7::constant(&g2twist::vec7::Vec7::basis(j + 1), order);
        let p = b.project(&ej, TOL).unwrap();
        for k in 0..7 {
            *m.at_mut(k, j) = p.c[k].truncate(order.min(p.order()));
        }
    }
    m
}

fn image_bundle(m: &JetMat<Complex64>, tol: f64) -> g2twist::bundles::JetSubbundle<Complex64> {
    let cols = (0..7)
        .map(|j| g2twist::jet::JetVec7::from_fn(|k| m.at(k, j).clone()))
        .collect();
    g2twist::bundles::JetSubbundle::from_sections(cols, tol).unwrap()
}
