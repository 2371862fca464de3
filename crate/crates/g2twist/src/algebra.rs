//! Pointwise subspace algebra in ℂ⁷: associative and complex-coassociative
//! subspaces, annihilators, isotropic extensions, and the weight basis for
//! the 7-dimensional G₂ representation.
//!
//! Subspace linear algebra is delegated to the jet engine at order zero,
//! so the exact and float backends share one elimination routine.

use crate::error::{G2Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, JetMat};
use crate::scalar::Scalar;
use crate::vec7::Vec7;

fn row<S: Scalar>(v: &Vec7<S>) -> Vec<Jet<S>> {
    v.c.iter().map(|s| Jet::constant(0, s.clone())).collect()
}

fn unrow<S: Scalar>(r: &[Jet<S>]) -> Vec7<S> {
    Vec7::from_fn(|k| r[k].eval0())
}

/// A linear subspace of ℂ⁷ with a stored basis.
#[derive(Clone, Debug)]
pub struct Subspace<S: Scalar> {
    basis: Vec<Vec7<S>>,
}

impl<S: Scalar> Subspace<S> {
    /// Reduce the spanning set to a basis.
    pub fn span(vectors: &[Vec7<S>], tol: f64) -> Self {
        let rows: Vec<_> = vectors.iter().map(row).collect();
        let ech = linalg::span_reduce(&rows, tol).expect("order-0 jets cannot rank-drop");
        Subspace {
            basis: ech.iter().map(|r| unrow(r)).collect(),
        }
    }

    pub fn zero() -> Self {
        Subspace { basis: Vec::new() }
    }

    pub fn full(tol: f64) -> Self {
        Subspace::span(&(1..=7).map(Vec7::basis).collect::<Vec<_>>(), tol)
    }

    pub fn basis(&self) -> &[Vec7<S>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn conj(&self) -> Self {
        Subspace {
            basis: self.basis.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn contains(&self, v: &Vec7<S>, tol: f64) -> bool {
        let rows: Vec<_> = self.basis.iter().map(row).collect();
        linalg::in_span_at_base(&rows, &row(v), tol)
    }

    pub fn contains_subspace(&self, other: &Self, tol: f64) -> bool {
        other.basis.iter().all(|v| self.contains(v, tol))
    }

    pub fn equals(&self, other: &Self, tol: f64) -> bool {
        self.rank() == other.rank() && self.contains_subspace(other, tol)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.equals(&self.conj(), tol)
    }

    /// All basis pairs bilinearly null, i.e. the space is isotropic.
    pub fn is_isotropic(&self, tol: f64) -> bool {
        self.basis.iter().enumerate().all(|(i, u)| {
            self.basis[i..]
                .iter()
                .all(|v| u.dot(v).is_zero_tol(tol))
        })
    }

    pub fn sum(&self, other: &Self, tol: f64) -> Self {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(&all, tol)
    }

    /// Bilinear polar {v : (v, u) = 0 ∀ u}.
    pub fn polar(&self, tol: f64) -> Self {
        if self.basis.is_empty() {
            return Subspace::full(tol);
        }
        let m = JetMat::from_rows(self.basis.iter().map(row).collect());
        let k = linalg::kernel(&m, tol).expect("order-0 kernel");
        Subspace {
            basis: k.iter().map(|r| unrow(r)).collect(),
        }
    }

    /// Hermitian orthogonal complement {v : (v, ū) = 0 ∀ u}.
    pub fn herm_perp(&self, tol: f64) -> Self {
        self.conj().polar(tol)
    }

    pub fn intersect(&self, other: &Self, tol: f64) -> Self {
        let mut rows: Vec<Vec<Jet<S>>> = self.polar(tol).basis.iter().map(row).collect();
        rows.extend(other.polar(tol).basis.iter().map(row));
        if rows.is_empty() {
            return Subspace::full(tol);
        }
        let m = JetMat::from_rows(rows);
        let k = linalg::kernel(&m, tol).expect("order-0 kernel");
        Subspace {
            basis: k.iter().map(|r| unrow(r)).collect(),
        }
    }
}

/// Annihilator β^a = {v : v × b = 0 for every b in β}.
pub fn annihilator<S: Scalar>(beta: &Subspace<S>, tol: f64) -> Subspace<S> {
    if beta.rank() == 0 {
        return Subspace::full(tol);
    }
    let mut rows = Vec::new();
    for b in beta.basis() {
        // component k of e_j × b, as a 7×7 block acting on v
        for k in 0..7 {
            let mut r = vec![Jet::constant(0, S::zero()); 7];
            for j in 0..7 {
                let col = Vec7::basis(j + 1).cross(b);
                r[j] = Jet::constant(0, col.c[k].clone());
            }
            rows.push(r);
        }
    }
    let m = JetMat::from_rows(rows);
    let kern = linalg::kernel(&m, tol).expect("order-0 kernel");
    Subspace {
        basis: kern.iter().map(|r| unrow(r)).collect(),
    }
}

/// Is the real rank-3 subspace closed under the vector product?
pub fn is_associative<S: Scalar>(xi: &Subspace<S>, tol: f64) -> Result<bool> {
    if xi.rank() != 3 {
        return Err(G2Error::Precondition("associativity needs rank 3".into()));
    }
    if !xi.is_real(tol) {
        return Err(G2Error::Precondition("associativity needs a real subspace".into()));
    }
    for (i, u) in xi.basis().iter().enumerate() {
        for v in &xi.basis()[i + 1..] {
            if !xi.contains(&u.cross(v), tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Do all products of vectors in the rank-2 space vanish?
pub fn is_complex_coassociative<S: Scalar>(w: &Subspace<S>, tol: f64) -> Result<bool> {
    if w.rank() != 2 {
        return Err(G2Error::Precondition("coassociativity needs rank 2".into()));
    }
    Ok(w.basis()[0].cross(&w.basis()[1]).is_zero_tol(tol))
}

/// Orientation sign of four vectors of ξ⊥ against the canonical
/// orientation induced by an associative ξ = span{a, b, a×b}: the sign of
/// det[a, b, a×b, f₁..f₄] in the standard basis of ℝ⁷.
pub fn orientation_sign<S: Scalar>(xi: &Subspace<S>, frame: &[Vec7<S>; 4], tol: f64) -> Result<i8> {
    if xi.rank() != 3 {
        return Err(G2Error::Precondition("need rank-3 xi".into()));
    }
    let a = &xi.basis()[0];
    let b = &xi.basis()[1];
    let ab = a.cross(b);
    // replace the stored third basis vector by a×b to carry the canonical
    // orientation of the associative space
    let cols: Vec<&Vec7<S>> = vec![a, b, &ab, &frame[0], &frame[1], &frame[2], &frame[3]];
    let det = det7(&cols);
    if det.is_zero_tol(tol) {
        return Err(G2Error::Precondition("degenerate frame".into()));
    }
    let re = det.to_c64().re;
    Ok(if re > 0.0 { 1 } else { -1 })
}

fn det7<S: Scalar>(cols: &[&Vec7<S>]) -> S {
    // expansion by elimination over the fraction field; 7×7 only
    let mut m: Vec<Vec<S>> = (0..7)
        .map(|r| cols.iter().map(|c| c.c[r].clone()).collect())
        .collect();
    let mut det = S::one();
    for col in 0..7 {
        let piv = (col..7).find(|&r| !m[r][col].is_zero_tol(1e-13));
        let piv = match piv {
            Some(p) => p,
            None => return S::zero(),
        };
        if piv != col {
            m.swap(piv, col);
            det = det.neg();
        }
        let p = m[col][col].clone();
        det = det.mul(&p);
        let pinv = p.inv().expect("pivot nonzero");
        for r in col + 1..7 {
            let f = m[r][col].mul(&pinv);
            for c in col..7 {
                let sub = f.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&sub);
            }
        }
    }
    det
}

/// The two maximally isotropic extensions of an isotropic line in ξ⊥⊗ℂ.
///
/// `positive = true` gives β^a ∩ (ξ⊥⊗ℂ), the complex-coassociative one;
/// `false` gives the polar-side extension, which is not coassociative.
pub fn extend_isotropic_line<S: Scalar>(
    beta: &Subspace<S>,
    xi: &Subspace<S>,
    positive: bool,
    tol: f64,
) -> Result<Subspace<S>> {
    if beta.rank() != 1 {
        return Err(G2Error::Precondition("beta must be a line".into()));
    }
    if !is_associative(xi, tol)? {
        return Err(G2Error::Precondition("xi must be associative".into()));
    }
    if !beta.is_isotropic(tol) {
        return Err(G2Error::Precondition("beta must be isotropic".into()));
    }
    let xi_perp = xi.herm_perp(tol);
    if !xi_perp.contains_subspace(beta, tol) {
        return Err(G2Error::Precondition("beta must lie in xi-perp".into()));
    }
    let w = if positive {
        annihilator(beta, tol).intersect(&xi_perp, tol)
    } else {
        // the partner line sits in the annihilator of β̄, bilinearly
        // orthogonal to β; adding β gives the negative extension
        let bc = beta.conj();
        let partner = beta
            .polar(tol)
            .intersect(&annihilator(&bc, tol), tol)
            .intersect(&xi_perp, tol);
        partner.sum(beta, tol)
    };
    if w.rank() != 2 {
        return Err(G2Error::RankDrop);
    }
    Ok(w)
}

/// Weight labels m·α₁ + n·α₂ of the 7-dimensional representation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Weight {
    pub m: i8,
    pub n: i8,
}

impl Weight {
    pub const ZERO: Weight = Weight { m: 0, n: 0 };
    pub const A1: Weight = Weight { m: 1, n: 0 };
    pub const A1A2: Weight = Weight { m: 1, n: 1 };
    pub const A2A1A2: Weight = Weight { m: 2, n: 1 };

    /// All seven weights, conjugate pairs adjacent.
    pub const ALL: [Weight; 7] = [
        Weight::ZERO,
        Weight::A1,
        Weight::A1.negated(),
        Weight::A1A2,
        Weight::A1A2.negated(),
        Weight::A2A1A2,
        Weight::A2A1A2.negated(),
    ];

    pub const fn negated(self) -> Weight {
        Weight {
            m: -self.m,
            n: -self.n,
        }
    }

    /// Sum inside the weight diagram; `None` when the sum is not a weight.
    pub fn plus(self, o: Weight) -> Option<Weight> {
        let w = Weight {
            m: self.m + o.m,
            n: self.n + o.n,
        };
        Weight::ALL.contains(&w).then_some(w)
    }
}

/// The seven weight vectors, stored unnormalized over ℤ[i] so both
/// backends share them: nonzero-weight vectors have squared norm 2.
#[derive(Clone, Debug)]
pub struct WeightBasis<S: Scalar> {
    vectors: Vec<(Weight, Vec7<S>)>,
}

impl<S: Scalar> WeightBasis<S> {
    /// Diagonalize the Cartan pair of plane-rotation derivations; the
    /// eigenvectors per rotation plane are e_j ∓ i e_k and the labels
    /// read off the pair of eigenvalue functionals (m − n, n).
    pub fn build() -> Self {
        let pair = cartan_pair::<S>();
        let mut vectors = vec![(Weight::ZERO, Vec7::basis(1))];
        let planes = [(2usize, 3usize), (4, 5), (6, 7)];
        let labels = [Weight::A1, Weight::A1A2, Weight::A2A1A2];
        for ((j, k), w) in planes.into_iter().zip(labels) {
            let v = Vec7::basis(j).sub(&Vec7::basis(k).scale(&S::i()));
            let evals = [(w.m - w.n) as i64, w.n as i64];
            for (h, lambda) in pair.iter().zip(evals) {
                let hv = apply_real_matrix(h, &v);
                let expect = v.scale(&S::i().scale_int(lambda));
                debug_assert!(
                    hv.sub(&expect).is_zero_tol(1e-12),
                    "weight labelling out of sync with the Cartan pair"
                );
            }
            vectors.push((w, v.clone()));
            vectors.push((w.negated(), v.conj()));
        }
        WeightBasis { vectors }
    }

    pub fn vector(&self, w: Weight) -> &Vec7<S> {
        &self
            .vectors
            .iter()
            .find(|(label, _)| *label == w)
            .expect("weight in diagram")
            .1
    }

    pub fn norm_sq(&self, w: Weight) -> i64 {
        if w == Weight::ZERO {
            1
        } else {
            2
        }
    }

    /// Span of the listed weight lines.
    pub fn line_span(&self, weights: &[Weight], tol: f64) -> Subspace<S> {
        let vs: Vec<_> = weights.iter().map(|w| self.vector(*w).clone()).collect();
        Subspace::span(&vs, tol)
    }

    /// The real form of ℓ_{−α₁} ⊕ ℓ₀ ⊕ ℓ_{α₁}: span{e₁, e₂, e₃}.
    pub fn real_form_middle(&self, tol: f64) -> Subspace<S> {
        let u = self.vector(Weight::A1);
        let sum = u.add(&u.conj()); // 2 e₂
        let dif = u.sub(&u.conj()); // −2i e₃
        Subspace::span(
            &[self.vector(Weight::ZERO).clone(), sum, dif.scale(&S::i())],
            tol,
        )
    }
}

fn apply_real_matrix<S: Scalar>(m: &[[i64; 7]; 7], v: &Vec7<S>) -> Vec7<S> {
    Vec7::from_fn(|r| {
        let mut acc = S::zero();
        for c in 0..7 {
            if m[r][c] != 0 {
                acc = acc.add(&v.c[c].scale_int(m[r][c]));
            }
        }
        acc
    })
}

/// Solve for the two-parameter family of plane-rotation derivations of
/// the cross product and return the basis pair H₁ = (1,0,1), H₂ = (0,1,1)
/// of rotation speeds in the planes (e₂e₃), (e₄e₅), (e₆e₇).
fn cartan_pair<S: Scalar>() -> [[[i64; 7]; 7]; 2] {
    // Unknowns (a, b, c): A e₂ = a e₃, A e₃ = −a e₂, A e₄ = b e₅,
    // A e₅ = −b e₄, A e₆ = c e₇, A e₇ = −c e₆, A e₁ = 0.  Impose the
    // derivation rule on all 21 basis pairs and solve exactly.
    let rot = |a: i64, b: i64, c: i64| -> [[i64; 7]; 7] {
        let mut m = [[0i64; 7]; 7];
        m[2][1] = a;
        m[1][2] = -a;
        m[4][3] = b;
        m[3][4] = -b;
        m[6][5] = c;
        m[5][6] = -c;
        m
    };
    // rows of the constraint system over the three unknowns
    let mut rows: Vec<Vec<Jet<S>>> = Vec::new();
    let params = [rot(1, 0, 0), rot(0, 1, 0), rot(0, 0, 1)];
    for i in 1..=7usize {
        for j in (i + 1)..=7 {
            let ei = Vec7::<S>::basis(i);
            let ej = Vec7::<S>::basis(j);
            let prod = ei.cross(&ej);
            for comp in 0..7 {
                let mut r = Vec::with_capacity(3);
                for p in &params {
                    let lhs = apply_real_matrix(p, &prod);
                    let rhs = apply_real_matrix(p, &ei)
                        .cross(&ej)
                        .add(&ei.cross(&apply_real_matrix(p, &ej)));
                    r.push(Jet::constant(0, lhs.c[comp].sub(&rhs.c[comp])));
                }
                rows.push(r);
            }
        }
    }
    let m = JetMat::from_rows(rows);
    let kern = linalg::kernel(&m, 1e-12).expect("constant system");
    assert_eq!(kern.len(), 2, "Cartan family of rotations is 2-dimensional");
    // The kernel is {c = a + b}; return the (1,0,1) and (0,1,1) members.
    for probe in [[1i64, 0, 1], [0, 1, 1]] {
        let v: Vec<Jet<S>> = probe
            .iter()
            .map(|&x| Jet::constant(0, S::from_int(x)))
            .collect();
        assert!(
            linalg::in_span_at_base(&kern, &v, 1e-12),
            "expected rotation derivation missing from the solved family"
        );
    }
    [rot(1, 0, 1), rot(0, 1, 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type V = Vec7<Gq>;

    fn e(k: usize) -> V {
        V::basis(k)
    }

    #[test]
    fn standard_quaternionic_plane_is_associative() {
        let xi = Subspace::span(&[e(1), e(2), e(3)], 0.0);
        assert!(is_associative(&xi, 0.0).unwrap());
        let bad = Subspace::span(&[e(1), e(2), e(4)], 0.0);
        assert!(!is_associative(&bad, 0.0).unwrap());
    }

    #[test]
    fn random_cross_closed_planes_are_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let a = V::random_real(&mut rng);
            let b = V::random_real(&mut rng);
            let xi = Subspace::span(&[a.clone(), b.clone(), a.cross(&b)], 0.0);
            if xi.rank() == 3 {
                assert!(is_associative(&xi, 0.0).unwrap());
            }
        }
    }

    #[test]
    fn weight_products_land_in_weight_sums() {
        let wb = WeightBasis::<Gq>::build();
        for &wa in &Weight::ALL {
            for &wc in &Weight::ALL {
                let prod = wb.vector(wa).cross(wb.vector(wc));
                match wa.plus(wc) {
                    Some(sum) => {
                        let line = wb.line_span(&[sum], 0.0);
                        assert!(
                            prod.is_zero() || line.contains(&prod, 0.0),
                            "{wa:?} x {wc:?} escaped l_{sum:?}"
                        );
                    }
                    None => assert!(prod.is_zero(), "{wa:?} x {wc:?} should vanish"),
                }
            }
        }
    }

    #[test]
    fn annihilator_of_top_weight_line() {
        let wb = WeightBasis::<Gq>::build();
        let beta = wb.line_span(&[Weight::A2A1A2], 0.0);
        let ann = annihilator(&beta, 0.0);
        let expect = wb.line_span(&[Weight::A1, Weight::A1A2, Weight::A2A1A2], 0.0);
        assert_eq!(ann.rank(), 3);
        assert!(ann.equals(&expect, 0.0));
        assert!(ann.is_isotropic(0.0));
        assert!(ann.contains_subspace(&beta, 0.0));
    }

    #[test]
    fn annihilator_of_everything_is_zero() {
        let full = Subspace::<Gq>::full(0.0);
        assert_eq!(annihilator(&full, 0.0).rank(), 0);
    }

    #[test]
    fn isotropic_extensions_by_sign() {
        let wb = WeightBasis::<Gq>::build();
        let xi = wb.real_form_middle(0.0);
        assert!(is_associative(&xi, 0.0).unwrap());
        let beta = wb.line_span(&[Weight::A2A1A2], 0.0);
        let plus = extend_isotropic_line(&beta, &xi, true, 0.0).unwrap();
        let minus = extend_isotropic_line(&beta, &xi, false, 0.0).unwrap();
        let expect_plus = wb.line_span(&[Weight::A1A2, Weight::A2A1A2], 0.0);
        let expect_minus = wb.line_span(&[Weight::A1A2.negated(), Weight::A2A1A2], 0.0);
        assert!(plus.equals(&expect_plus, 0.0));
        assert!(minus.equals(&expect_minus, 0.0));
        assert!(is_complex_coassociative(&plus, 0.0).unwrap());
        assert!(!is_complex_coassociative(&minus, 0.0).unwrap());
    }

    #[test]
    fn unit_isotropic_product_identity() {
        // with U = e₂ − i e₃ of squared norm 2: U × Ū = 2 i e₁,
        // the unnormalized form of L₁ × L̄₁ = i L₀
        let wb = WeightBasis::<Gq>::build();
        let u = wb.vector(Weight::A1);
        let expect = e(1).scale(&Gq::i().scale_int(2));
        assert_eq!(u.cross(&u.conj()), expect);
        // L₀ × L₁ = i L₁
        assert_eq!(e(1).cross(u), u.scale(&Gq::i()));
    }
}
