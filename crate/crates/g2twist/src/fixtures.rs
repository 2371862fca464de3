//! Deterministic fixtures: nilpotent root vectors of 𝔤₂ acting on ℂ⁷,
//! polynomial superhorizontal curves into the quadric Q⁵, and rational
//! random generators used by the verification sweeps.
//!
//! The root vectors are not hard-coded: each is the one-dimensional
//! solution of the derivation constraint X(u×v) = Xu×v + u×Xv restricted
//! to the weight-shift support, solved by exact elimination.  The
//! superhorizontal curves are nilpotent-orbit exponentials H(z) = e^{zX}v
//! through the lowest weight vector, which makes H·H = 0 and H × H′ = 0
//! hold identically with ℚ(i) coefficients.

use crate::algebra::{Weight, WeightBasis};
use crate::error::{G2Error, Result};
use crate::jet::{Jet, JetVec7};
use crate::linalg::{self, JetMat};
use crate::scalar::Scalar;
use crate::vec7::Vec7;
use rand::Rng;

/// A plain 7×7 matrix over the scalar backend.
#[derive(Clone, Debug)]
pub struct Mat7<S: Scalar> {
    pub a: [[S; 7]; 7],
}

impl<S: Scalar> Mat7<S> {
    pub fn zero() -> Self {
        Mat7 {
            a: std::array::from_fn(|_| std::array::from_fn(|_| S::zero())),
        }
    }

    pub fn apply(&self, v: &Vec7<S>) -> Vec7<S> {
        Vec7::from_fn(|r| {
            let mut acc = S::zero();
            for c in 0..7 {
                acc = acc.add(&self.a[r][c].mul(&v.c[c]));
            }
            acc
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat7 {
            a: std::array::from_fn(|r| std::array::from_fn(|c| self.a[r][c].add(&o.a[r][c]))),
        }
    }

    pub fn derivation_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for i in 1..=7 {
            for j in (i + 1)..=7 {
                let u = Vec7::<S>::basis(i);
                let v = Vec7::<S>::basis(j);
                let lhs = self.apply(&u.cross(&v));
                let rhs = self.apply(&u).cross(&v).add(&u.cross(&self.apply(&v)));
                res = res.max(lhs.sub(&rhs).mag());
            }
        }
        res
    }
}

/// Simple roots of the weight shift lattice: α₁ = A1 and α₂, which is
/// not itself a weight of ℂ⁷ but shifts A1 → A1A2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SimpleRoot {
    Alpha1,
    Alpha2,
}

fn shift(w: Weight, root: SimpleRoot) -> Option<Weight> {
    let (dm, dn) = match root {
        SimpleRoot::Alpha1 => (1i8, 0i8),
        SimpleRoot::Alpha2 => (0, 1),
    };
    let cand = Weight {
        m: w.m + dm,
        n: w.n + dn,
    };
    Weight::ALL.contains(&cand).then_some(cand)
}

/// The root vector for a simple root: the unique (up to scale) linear
/// map shifting every weight line by the root while remaining a
/// derivation of the cross product.  Normalized so the first supported
/// weight line (in `Weight::ALL` order) maps with coefficient 1.
pub fn root_vector<S: Scalar>(root: SimpleRoot) -> Mat7<S> {
    let wb = WeightBasis::<S>::build();
    let supports: Vec<Weight> = Weight::ALL
        .into_iter()
        .filter(|w| shift(*w, root).is_some())
        .collect();

    // candidate matrices E_w : ℓ_w → ℓ_{w+root}, one unknown per support
    let candidates: Vec<Mat7<S>> = supports
        .iter()
        .map(|w| {
            let src = wb.vector(*w);
            let dst = wb.vector(shift(*w, root).unwrap());
            elementary_map(src, dst)
        })
        .collect();

    // derivation constraint rows over the unknowns
    let mut rows: Vec<Vec<Jet<S>>> = Vec::new();
    for i in 1..=7usize {
        for j in (i + 1)..=7 {
            let u = Vec7::<S>::basis(i);
            let v = Vec7::<S>::basis(j);
            for comp in 0..7 {
                let mut row = Vec::with_capacity(candidates.len());
                for e in &candidates {
                    let lhs = e.apply(&u.cross(&v));
                    let rhs = e.apply(&u).cross(&v).add(&u.cross(&e.apply(&v)));
                    row.push(Jet::constant(0, lhs.c[comp].sub(&rhs.c[comp])));
                }
                rows.push(row);
            }
        }
    }
    let kern = linalg::kernel(&JetMat::from_rows(rows), 1e-12).expect("constant system");
    assert_eq!(kern.len(), 1, "root space must be one-dimensional");
    let coeffs = &kern[0];
    let norm = coeffs
        .iter()
        .map(|j| j.eval0())
        .find(|c| !c.is_zero_tol(1e-12))
        .expect("nonzero root vector")
        .inv()
        .unwrap();
    let mut out: Mat7<S> = Mat7::zero();
    for (c, e) in coeffs.iter().zip(candidates.iter()) {
        let factor = c.eval0().mul(&norm);
        for r in 0..7 {
            for cc in 0..7 {
                out.a[r][cc] = out.a[r][cc].add(&e.a[r][cc].mul(&factor));
            }
        }
    }
    debug_assert!(out.derivation_residual() < 1e-9);
    out
}

/// Matrix sending `src` to `dst` and the rest of a dual frame to zero:
/// dst ⊗ src* with src* the Hermitian dual functional.
fn elementary_map<S: Scalar>(src: &Vec7<S>, dst: &Vec7<S>) -> Mat7<S> {
    let n = src.herm(src).inv().expect("unit weight vector");
    let mut m = Mat7::zero();
    for r in 0..7 {
        for c in 0..7 {
            m.a[r][c] = dst.c[r].mul(&src.c[c].conj()).mul(&n);
        }
    }
    m
}

/// The principal nilpotent X = X_{α₁} + X_{α₂}.
pub fn principal_nilpotent<S: Scalar>() -> Mat7<S> {
    root_vector(SimpleRoot::Alpha1).add(&root_vector(SimpleRoot::Alpha2))
}

/// Jet at base point z₀ of the degree-6 polynomial superhorizontal curve
/// H(z) = e^{μ z X} v, v the lowest weight vector.  The parameter μ
/// reparametrizes the curve; any nonzero value keeps it full.
pub fn superhorizontal_curve<S: Scalar>(z0: &S, mu: &S, order: usize) -> JetVec7<S> {
    let wb = WeightBasis::<S>::build();
    let x = principal_nilpotent::<S>();
    let v0 = wb.vector(Weight::A2A1A2.negated()).clone();
    // c_k = μ^k X^k v / k!
    let mut coeffs: Vec<Vec7<S>> = vec![v0];
    for k in 1..=6usize {
        let prev = coeffs[k - 1].clone();
        let next = x
            .apply(&prev)
            .scale(&mu.mul(&S::from_int(k as i64).inv().unwrap()));
        coeffs.push(next);
    }
    // H(z0 + w) = Σ c_k (z0 + w)^k as a jet in w
    let zjet = Jet::constant(order, z0.clone()).add(&Jet::var_z(order));
    let mut out = JetVec7::zero(order);
    let mut zpow = Jet::one(order);
    for c in coeffs {
        out = out.add(&JetVec7::constant(&c, order).scale(&zpow));
        zpow = zpow.mul(&zjet);
    }
    out
}

/// A holomorphic isotropic but *not* superhorizontal line: H = u₁ + z u₂.
pub fn non_superhorizontal_curve<S: Scalar>(order: usize) -> JetVec7<S> {
    let wb = WeightBasis::<S>::build();
    let u1 = JetVec7::constant(wb.vector(Weight::A1), order);
    let u2 = JetVec7::constant(wb.vector(Weight::A1A2), order);
    u1.add(&u2.scale(&Jet::var_z(order)))
}

/// Rational point on the unit circle from the tangent-half-angle map.
pub fn rational_rotation<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> (S, S) {
    let num = rng.gen_range(-6_i64..=6);
    let den = rng.gen_range(1_i64..=6);
    // c = (1−t²)/(1+t²), s = 2t/(1+t²): c² + s² = 1 exactly
    let t = S::from_ratio(num, den);
    let t2 = t.mul(&t);
    let den = S::one().add(&t2).inv().unwrap();
    let c = S::one().sub(&t2).mul(&den);
    let s = t.scale_int(2).mul(&den);
    (c, s)
}

/// Random rational special-orthogonal matrix on the listed coordinates
/// (0-based), as a product of Givens rotations.
pub fn random_rotation_on<S: Scalar, R: Rng + ?Sized>(
    coords: &[usize],
    steps: usize,
    rng: &mut R,
) -> Mat7<S> {
    let mut m = Mat7::zero();
    for k in 0..7 {
        m.a[k][k] = S::one();
    }
    for _ in 0..steps {
        let i = coords[rng.gen_range(0..coords.len())];
        let mut j = coords[rng.gen_range(0..coords.len())];
        while j == i {
            j = coords[rng.gen_range(0..coords.len())];
        }
        let (c, s) = rational_rotation::<S, R>(rng);
        let mut g = Mat7::zero();
        for k in 0..7 {
            g.a[k][k] = S::one();
        }
        g.a[i][i] = c.clone();
        g.a[j][j] = c.clone();
        g.a[i][j] = s.neg();
        g.a[j][i] = s;
        m = mat_mul(&g, &m);
    }
    m
}

fn mat_mul<S: Scalar>(a: &Mat7<S>, b: &Mat7<S>) -> Mat7<S> {
    let mut out = Mat7::zero();
    for r in 0..7 {
        for c in 0..7 {
            let mut acc = S::zero();
            for k in 0..7 {
                acc = acc.add(&a.a[r][k].mul(&b.a[k][c]));
            }
            out.a[r][c] = acc;
        }
    }
    out
}

/// Random rational isotropic vector: a rational rotation applied to
/// e_j − i e_k, optionally scaled.
pub fn random_isotropic<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Vec7<S> {
    let rot = random_rotation_on::<S, R>(&[0, 1, 2, 3, 4, 5, 6], 6, rng);
    let j = rng.gen_range(1..=7usize);
    let mut k = rng.gen_range(1..=7usize);
    while k == j {
        k = rng.gen_range(1..=7usize);
    }
    let v = Vec7::basis(j).sub(&Vec7::basis(k).scale(&S::i()));
    rot.apply(&v)
}

/// Random associative 3-space span{a, b, a×b} over real rationals.
pub fn random_associative<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    tol: f64,
) -> crate::algebra::Subspace<S> {
    loop {
        let a = Vec7::<S>::random_real(rng);
        let b = Vec7::<S>::random_real(rng);
        let xi = crate::algebra::Subspace::span(&[a.clone(), b.clone(), a.cross(&b)], tol);
        if xi.rank() == 3 {
            return xi;
        }
    }
}

/// Maximally isotropic W over the standard associative ξ = ⟨e₁,e₂,e₃⟩:
/// span{f₁ − i f₂, f₃ − i f₄} for a rational orthonormal frame (f_i) of
/// ξ⊥ = ⟨e₄..e₇⟩.  Returns the frame too, whose orientation decides
/// positivity.
pub fn random_max_isotropic_standard<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    flip: bool,
) -> ([Vec7<S>; 4], crate::algebra::Subspace<S>) {
    let rot = random_rotation_on::<S, R>(&[3, 4, 5, 6], 6, rng);
    let mut frame: Vec<Vec7<S>> = (4..=7).map(|k| rot.apply(&Vec7::basis(k))).collect();
    if flip {
        frame.swap(2, 3); // reverses orientation
    }
    let w1 = frame[0].sub(&frame[1].scale(&S::i()));
    let w2 = frame[2].sub(&frame[3].scale(&S::i()));
    let w = crate::algebra::Subspace::span(&[w1, w2], 1e-12);
    (
        [
            frame[0].clone(),
            frame[1].clone(),
            frame[2].clone(),
            frame[3].clone(),
        ],
        w,
    )
}

/// Exact square root in ℚ(i), used by the brute-force extension oracle.
pub fn gq_sqrt(x: &crate::scalar::Gq) -> Option<crate::scalar::Gq> {
    use crate::scalar::Gq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};

    fn rat_sqrt(r: &BigRational) -> Option<BigRational> {
        if r.is_negative() {
            return None;
        }
        let num = r.numer().sqrt();
        let den = r.denom().sqrt();
        let cand = BigRational::new(num, den);
        (&cand * &cand == *r).then_some(cand)
    }

    if x.im.is_zero() {
        if let Some(s) = rat_sqrt(&x.re) {
            return Some(Gq::new(s, BigRational::zero()));
        }
        // negative real: i·sqrt(−re)
        let neg = -x.re.clone();
        return rat_sqrt(&neg).map(|s| Gq::new(BigRational::zero(), s));
    }
    // (p + qi)² = x: p² − q² = re, 2pq = im; p² = (re + |x|)/2
    let norm2 = &x.re * &x.re + &x.im * &x.im;
    let norm = rat_sqrt(&norm2)?;
    let two = BigRational::from_integer(BigInt::from(2));
    let p2 = (&x.re + &norm) / &two;
    let p = rat_sqrt(&p2)?;
    if p.is_zero() {
        return None;
    }
    let q = &x.im / (&two * &p);
    Some(Gq::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn root_vectors_are_derivations() {
        let x1 = root_vector::<Gq>(SimpleRoot::Alpha1);
        let x2 = root_vector::<Gq>(SimpleRoot::Alpha2);
        assert_eq!(x1.derivation_residual(), 0.0);
        assert_eq!(x2.derivation_residual(), 0.0);
    }

    #[test]
    fn principal_nilpotent_is_regular() {
        let x = principal_nilpotent::<Gq>();
        let wb = WeightBasis::<Gq>::build();
        let mut v = wb.vector(Weight::A2A1A2.negated()).clone();
        let mut spanned = vec![v.clone()];
        for _ in 0..6 {
            v = x.apply(&v);
            spanned.push(v.clone());
        }
        assert!(v.is_zero() == false, "X^6 on the lowest vector survives");
        assert!(x.apply(&v).is_zero(), "X^7 = 0 on the representation");
        let span = crate::algebra::Subspace::span(&spanned, 0.0);
        assert_eq!(span.rank(), 7, "orbit string spans all of C^7");
    }

    #[test]
    fn curve_is_holomorphic_isotropic_superhorizontal() {
        let h = superhorizontal_curve::<Gq>(&Gq::from_ratio(1, 3), &Gq::one(), 8);
        assert!(h.dzbar().unwrap().is_zero_tol(0.0), "polynomial in z only");
        assert!(h.dot(&h).is_zero_tol(0.0), "isotropic as a jet");
        let hp = h.dz().unwrap();
        assert!(h.cross(&hp).is_zero_tol(0.0), "superhorizontal");
        // full: jet span of H and its derivatives has rank 7
        let mut sections = vec![h.clone()];
        let mut cur = h;
        for _ in 0..6 {
            cur = cur.dz().unwrap();
            sections.push(cur.clone());
        }
        let b = crate::bundles::JetSubbundle::from_sections(sections, 0.0).unwrap();
        assert_eq!(b.rank(), 7);
    }

    #[test]
    fn non_superhorizontal_curve_fails_the_predicate() {
        let h = non_superhorizontal_curve::<Gq>(4);
        assert!(h.dot(&h).is_zero_tol(0.0));
        let hp = h.dz().unwrap();
        assert!(!h.cross(&hp).is_zero_tol(0.0));
    }

    #[test]
    fn rational_rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_rotation_on::<Gq, _>(&[3, 4, 5, 6], 5, &mut rng);
        for i in 0..7 {
            for j in 0..7 {
                let mut acc = Gq::zero();
                for k in 0..7 {
                    acc = acc.add(&m.a[k][i].mul(&m.a[k][j]));
                }
                let expect = if i == j { Gq::one() } else { Gq::zero() };
                assert_eq!(acc, expect);
            }
        }
    }

    #[test]
    fn random_isotropics_are_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let v = random_isotropic::<Gq, _>(&mut rng);
            assert!(v.dot(&v).is_zero());
            assert!(!v.is_zero());
        }
    }

    #[test]
    fn gq_sqrt_finds_exact_roots() {
        let x = Gq::new(
            num_rational::BigRational::new(9.into(), 4.into()),
            num_rational::BigRational::from_integer(0.into()),
        );
        assert_eq!(gq_sqrt(&x).unwrap(), Gq::from_ratio(3, 2));
        let z = Gq::from_ratio(3, 5).add(&Gq::i().mul(&Gq::from_ratio(4, 5)));
        let r = gq_sqrt(&z.mul(&z)).unwrap();
        assert!(r == z || r == z.neg());
        assert!(gq_sqrt(&Gq::from_int(2)).is_none());
    }
}
