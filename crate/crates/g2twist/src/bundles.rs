//! Subbundles of the trivial ℂ⁷ bundle at jet level.
//!
//! A subbundle is a spanning frame of jet sections whose Gram matrix is
//! invertible at the base point.  On top of projections this module
//! builds the second fundamental forms A′/A″, the derivative
//! endomorphism A_z = −(A′_φ ⊕ A′_{φ⊥}), Koszul–Malgrange ∂̄-operators,
//! Gauss transforms, harmonicity and nilconformality tests, and the
//! A_z-filtrations by images and kernels.

use crate::error::{G2Error, Result};
use crate::jet::{Jet, JetVec7};
use crate::linalg::{self, JetMat};
use crate::scalar::Scalar;
use crate::algebra::Subspace;
use crate::vec7::Vec7;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GaussDir {
    /// ∂′ direction (z-derivative).
    Prime,
    /// ∂″ direction (z̄-derivative).
    DoublePrime,
}

#[derive(Clone, Debug)]
pub struct JetSubbundle<S: Scalar> {
    sections: Vec<JetVec7<S>>,
}

fn sections_to_rows<S: Scalar>(sections: &[JetVec7<S>]) -> Vec<Vec<Jet<S>>> {
    sections.iter().map(|s| s.c.to_vec()).collect()
}

fn row_to_section<S: Scalar>(r: &[Jet<S>]) -> JetVec7<S> {
    JetVec7::from_fn(|k| r[k].clone())
}

impl<S: Scalar> JetSubbundle<S> {
    /// Reduce a spanning set to a frame; rank decisions happen at the
    /// base point and a drop against the generic rank is an error.
    pub fn from_sections(sections: Vec<JetVec7<S>>, tol: f64) -> Result<Self> {
        let rows = sections_to_rows(&sections);
        let ech = linalg::span_reduce(&rows, tol)?;
        Ok(JetSubbundle {
            sections: ech.iter().map(|r| row_to_section(r)).collect(),
        })
    }

    pub fn zero() -> Self {
        JetSubbundle { sections: Vec::new() }
    }

    pub fn constant(space: &Subspace<S>, order: usize) -> Self {
        JetSubbundle {
            sections: space
                .basis()
                .iter()
                .map(|v| JetVec7::constant(v, order))
                .collect(),
        }
    }

    pub fn full(order: usize) -> Self {
        JetSubbundle {
            sections: (1..=7)
                .map(|k| JetVec7::constant(&Vec7::basis(k), order))
                .collect(),
        }
    }

    pub fn sections(&self) -> &[JetVec7<S>] {
        &self.sections
    }

    pub fn rank(&self) -> usize {
        self.sections.len()
    }

    pub fn order(&self) -> usize {
        self.sections
            .iter()
            .map(|s| s.order())
            .min()
            .unwrap_or(usize::MAX)
    }

    pub fn conj(&self) -> Self {
        JetSubbundle {
            sections: self.sections.iter().map(|s| s.conj()).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        JetSubbundle {
            sections: self.sections.iter().map(|s| s.truncate(order)).collect(),
        }
    }

    /// Value of the bundle at the base point.
    pub fn at_base(&self, tol: f64) -> Subspace<S> {
        Subspace::span(
            &self.sections.iter().map(|s| s.eval0()).collect::<Vec<_>>(),
            tol,
        )
    }

    fn gram(&self) -> JetMat<S> {
        let k = self.rank();
        let order = self.order();
        let mut g = JetMat::zero(k, k, order);
        for j in 0..k {
            for i in 0..k {
                // row j, column i: (s_i, conj s_j)
                *g.at_mut(j, i) = self.sections[i].herm(&self.sections[j]);
            }
        }
        g
    }

    /// Orthogonal projection π_V(v) at jet level via Gram inversion.
    pub fn project(&self, v: &JetVec7<S>, tol: f64) -> Result<JetVec7<S>> {
        if self.rank() == 0 {
            return Ok(JetVec7::zero(v.order()));
        }
        let g = self.gram();
        let b: Vec<Jet<S>> = self.sections.iter().map(|s| v.herm(s)).collect();
        let c = linalg::solve(&g, &b, tol)?.ok_or(G2Error::GramSingular)?;
        let order = v.order().min(self.order());
        let mut out = JetVec7::zero(order);
        for (ci, si) in c.iter().zip(self.sections.iter()) {
            out = out.add(&si.scale(ci));
        }
        Ok(out)
    }

    pub fn project_perp(&self, v: &JetVec7<S>, tol: f64) -> Result<JetVec7<S>> {
        let p = self.project(v, tol)?;
        Ok(v.truncate(p.order()).sub(&p))
    }

    /// Hermitian orthogonal complement as a bundle.
    pub fn herm_perp(&self, tol: f64) -> Result<Self> {
        if self.rank() == 0 {
            let order = 8;
            return Ok(JetSubbundle::full(order));
        }
        let rows: Vec<Vec<Jet<S>>> = self
            .sections
            .iter()
            .map(|s| s.conj().c.to_vec())
            .collect();
        let kern = linalg::kernel(&JetMat::from_rows(rows), tol)?;
        JetSubbundle::from_sections(kern.iter().map(|r| row_to_section(r)).collect(), tol)
    }

    /// Bilinear polar {v : (v, s) = 0 for all sections s}.
    pub fn polar(&self, tol: f64) -> Result<Self> {
        let rows = sections_to_rows(&self.sections);
        let kern = linalg::kernel(&JetMat::from_rows(rows), tol)?;
        JetSubbundle::from_sections(kern.iter().map(|r| row_to_section(r)).collect(), tol)
    }

    pub fn sum(&self, other: &Self, tol: f64) -> Result<Self> {
        let mut all = self.sections.clone();
        all.extend(other.sections.iter().cloned());
        JetSubbundle::from_sections(all, tol)
    }

    pub fn intersect(&self, other: &Self, tol: f64) -> Result<Self> {
        let mut rows = sections_to_rows(&self.polar(tol)?.sections);
        rows.extend(sections_to_rows(&other.polar(tol)?.sections));
        let kern = linalg::kernel(&JetMat::from_rows(rows), tol)?;
        JetSubbundle::from_sections(kern.iter().map(|r| row_to_section(r)).collect(), tol)
    }

    /// Orthogonal complement of `inner` within `self` (inner ⊆ self).
    pub fn ominus(&self, inner: &Self, tol: f64) -> Result<Self> {
        let mut candidates = Vec::new();
        for s in &self.sections {
            candidates.push(inner.project_perp(s, tol)?);
        }
        let out = JetSubbundle::from_sections(candidates, tol)?;
        if out.rank() + inner.rank() != self.rank() {
            return Err(G2Error::RankDrop);
        }
        Ok(out)
    }

    /// Annihilator bundle {v : v × b = 0 for all sections b}.
    pub fn annihilator(&self, tol: f64) -> Result<Self> {
        let order = self.order();
        let mut rows = Vec::new();
        for b in &self.sections {
            for k in 0..7 {
                let mut r = Vec::with_capacity(7);
                for j in 0..7 {
                    let ej = JetVec7::constant(&Vec7::basis(j + 1), order);
                    r.push(ej.cross(b).c[k].clone());
                }
                rows.push(r);
            }
        }
        let kern = linalg::kernel(&JetMat::from_rows(rows), tol)?;
        JetSubbundle::from_sections(kern.iter().map(|r| row_to_section(r)).collect(), tol)
    }

    /// Max base-point residual of the other bundle's frame against this
    /// bundle's span; zero when `other ⊆ self` at the base point.
    pub fn contains_residual(&self, other: &Self, tol: f64) -> f64 {
        let rows = sections_to_rows(&self.sections);
        other
            .sections
            .iter()
            .map(|s| linalg::residual_at_base(&rows, &s.c.to_vec(), tol))
            .fold(0.0, f64::max)
    }

    pub fn equals_at_base(&self, other: &Self, tol: f64) -> bool {
        self.rank() == other.rank() && self.contains_residual(other, tol) < tol.max(1e-12)
    }

    /// All sections pairwise bilinearly null as jets.
    pub fn isotropy_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (i, u) in self.sections.iter().enumerate() {
            for v in &self.sections[i..] {
                r = r.max(u.dot(v).max_mag());
            }
        }
        r
    }
}

/// ∂′/∂″ second fundamental form A_{φ,ψ}(v) = π_ψ(∂ v) for v ∈ Γ(φ).
pub fn sff<S: Scalar>(
    phi: &JetSubbundle<S>,
    psi: &JetSubbundle<S>,
    v: &JetVec7<S>,
    dir: GaussDir,
    tol: f64,
) -> Result<JetVec7<S>> {
    for a in phi.sections() {
        for b in psi.sections() {
            if !a.herm(b).eval0().is_zero_tol(tol.max(1e-9)) {
                return Err(G2Error::Precondition(
                    "second fundamental form needs orthogonal bundles".into(),
                ));
            }
        }
    }
    let dv = match dir {
        GaussDir::Prime => v.dz()?,
        GaussDir::DoublePrime => v.dzbar()?,
    };
    psi.project(&dv, tol)
}

/// A′_φ(v) = π_{φ⊥}(∂_z v) without the orthogonality bookkeeping.
pub fn a_prime<S: Scalar>(
    phi: &JetSubbundle<S>,
    v: &JetVec7<S>,
    tol: f64,
) -> Result<JetVec7<S>> {
    phi.project_perp(&v.dz()?, tol)
}

pub fn a_dprime<S: Scalar>(
    phi: &JetSubbundle<S>,
    v: &JetVec7<S>,
    tol: f64,
) -> Result<JetVec7<S>> {
    phi.project_perp(&v.dzbar()?, tol)
}

/// The endomorphism A_z = −(A′_φ ⊕ A′_{φ⊥}) applied to a section.
pub fn az<S: Scalar>(phi: &JetSubbundle<S>, v: &JetVec7<S>, tol: f64) -> Result<JetVec7<S>> {
    let vp = phi.project(v, tol)?;
    let vq = v.truncate(vp.order()).sub(&vp);
    let image_perp = phi.project_perp(&vp.dz()?, tol)?;
    let image_phi = phi.project(&vq.dz()?, tol)?;
    Ok(image_perp.add(&image_phi).neg())
}

/// Koszul–Malgrange ∂̄-operator D_z̄ = π_φ ∂̄ π_φ + π_{φ⊥} ∂̄ π_{φ⊥}.
pub fn d_zbar<S: Scalar>(phi: &JetSubbundle<S>, v: &JetVec7<S>, tol: f64) -> Result<JetVec7<S>> {
    let vp = phi.project(v, tol)?;
    let vq = v.truncate(vp.order()).sub(&vp);
    let a = phi.project(&vp.dzbar()?, tol)?;
    let b = phi.project_perp(&vq.dzbar()?, tol)?;
    Ok(a.add(&b))
}

/// A_z as a 7×7 jet matrix (columns = images of the standard frame).
pub fn az_matrix<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<JetMat<S>> {
    let order = phi.order();
    let mut cols = Vec::with_capacity(7);
    for j in 0..7 {
        let ej = JetVec7::constant(&Vec7::basis(j + 1), order);
        cols.push(az(phi, &ej, tol)?);
    }
    let out_order = cols.iter().map(|c| c.order()).min().unwrap();
    let mut m = JetMat::zero(7, 7, out_order);
    for (j, col) in cols.iter().enumerate() {
        for k in 0..7 {
            *m.at_mut(k, j) = col.c[k].truncate(out_order);
        }
    }
    Ok(m)
}

/// Residual of the harmonicity identity A′ ∘ ∇″_φ = ∇″_{φ⊥} ∘ A′ on the
/// frame of φ, measured on all available jet coefficients.
pub fn harmonic_residual<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<f64> {
    if phi.order() < 2 {
        return Err(G2Error::OrderExhausted);
    }
    let mut res: f64 = 0.0;
    for v in phi.sections() {
        let nabla = phi.project(&v.dzbar()?, tol)?;
        let lhs = phi.project_perp(&nabla.dz()?, tol)?;
        let ap = phi.project_perp(&v.dz()?, tol)?;
        let rhs = phi.project_perp(&ap.dzbar()?, tol)?;
        let scale = 1.0_f64.max(v.max_mag());
        res = res.max(lhs.sub(&rhs).max_mag() / scale);
    }
    Ok(res)
}

pub fn is_harmonic<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<bool> {
    Ok(harmonic_residual(phi, tol)? < tol.max(1e-30))
}

/// Image bundle of the chosen second fundamental form.
pub fn gauss_transform<S: Scalar>(
    phi: &JetSubbundle<S>,
    dir: GaussDir,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    let mut images = Vec::new();
    for v in phi.sections() {
        let dv = match dir {
            GaussDir::Prime => v.dz()?,
            GaussDir::DoublePrime => v.dzbar()?,
        };
        images.push(phi.project_perp(&dv, tol)?);
    }
    JetSubbundle::from_sections(images, tol)
}

/// G^{(i)}: iterated Gauss transform, conjugate direction for i < 0.
pub fn iterated_gauss<S: Scalar>(
    phi: &JetSubbundle<S>,
    i: i32,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    let mut cur = phi.clone();
    for _ in 0..i.unsigned_abs() {
        cur = gauss_transform(
            &cur,
            if i > 0 { GaussDir::Prime } else { GaussDir::DoublePrime },
            tol,
        )?;
    }
    Ok(cur)
}

fn eval0_mat<S: Scalar>(m: &JetMat<S>) -> JetMat<S> {
    m.map(|j| Jet::constant(0, j.eval0()))
}

/// Least r ≤ 7 with (A_z)^r = 0 at the base point; `None` if the
/// endomorphism is not nilpotent there.
pub fn nilorder<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<Option<u32>> {
    let a = az_matrix(phi, tol)?;
    let mut p = eval0_mat(&a);
    let a0 = p.clone();
    for r in 1..=7 {
        if p.is_zero_tol(tol) {
            return Ok(Some(r));
        }
        p = p.mul(&a0);
    }
    Ok(None)
}

/// Least s with (A_z)^{2s}((−1)^{s−1}φ) = 0 at the base point.
pub fn s_invariant<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<Option<u32>> {
    let a = az_matrix(phi, tol)?;
    let a0 = eval0_mat(&a);
    let a2 = a0.mul(&a0);
    let perp = phi.herm_perp(tol)?;
    let mut pow = a2.clone();
    for s in 1..=4u32 {
        let target = if s % 2 == 1 { phi } else { &perp };
        let vanished = target.sections().iter().all(|v| {
            let v0: Vec<Jet<S>> = v.c.iter().map(|j| Jet::constant(0, j.eval0())).collect();
            pow.mul_vec(&v0).iter().all(|j| j.is_zero_tol(tol))
        });
        if vanished {
            return Ok(Some(s));
        }
        pow = pow.mul(&a2);
    }
    Ok(None)
}

/// An A_z-filtration ℂ⁷ = Z₀ ⊇ Z₁ ⊇ … ⊇ Z_{t+1} = 0.
#[derive(Clone, Debug)]
pub struct Filtration<S: Scalar> {
    pub chain: Vec<JetSubbundle<S>>,
}

impl<S: Scalar> Filtration<S> {
    pub fn length(&self) -> usize {
        self.chain.len().saturating_sub(1)
    }

    /// Legs ψ_i = Z_i ⊖ Z_{i+1}.
    pub fn legs(&self, tol: f64) -> Result<Vec<JetSubbundle<S>>> {
        let mut out = Vec::new();
        for w in self.chain.windows(2) {
            out.push(w[0].ominus(&w[1], tol)?);
        }
        Ok(out)
    }

    /// Max residual of the two filtration conditions: each Z_i closed
    /// under D_z̄ and A_z(Z_i) ⊆ Z_{i+1}.
    pub fn residual(&self, phi: &JetSubbundle<S>, tol: f64) -> Result<f64> {
        let mut res: f64 = 0.0;
        for (i, z) in self.chain.iter().enumerate() {
            for v in z.sections() {
                let dz = d_zbar(phi, v, tol)?;
                res = res.max(step_residual(z, &dz, tol));
                if i + 1 < self.chain.len() {
                    let av = az(phi, v, tol)?;
                    res = res.max(step_residual(&self.chain[i + 1], &av, tol));
                }
            }
        }
        Ok(res)
    }
}

fn step_residual<S: Scalar>(target: &JetSubbundle<S>, v: &JetVec7<S>, tol: f64) -> f64 {
    let rows = sections_to_rows(target.sections());
    linalg::residual_at_base(&rows, &v.c.to_vec(), tol)
}

/// Filtration by A_z-images: Z_i = Im (A_z)^i.
pub fn filtration_by_images<S: Scalar>(
    phi: &JetSubbundle<S>,
    tol: f64,
) -> Result<Filtration<S>> {
    let a = az_matrix(phi, tol)?;
    let mut chain = vec![JetSubbundle::full(a.order())];
    let mut cur: Vec<JetVec7<S>> = (1..=7)
        .map(|k| JetVec7::constant(&Vec7::basis(k), a.order()))
        .collect();
    loop {
        let next: Vec<JetVec7<S>> = cur
            .iter()
            .map(|v| row_to_section(&a.mul_vec(&v.c.to_vec())))
            .collect();
        let b = JetSubbundle::from_sections(next.clone(), tol)?;
        let stop = b.rank() == 0;
        let repeat = b.rank() == chain.last().unwrap().rank();
        chain.push(b);
        if stop {
            break;
        }
        if repeat {
            return Err(G2Error::NotNilconformal);
        }
        cur = next;
    }
    Ok(Filtration { chain })
}

/// Filtration by A_z-kernels: Z_i = ker (A_z)^{r−i} for the nilorder r.
pub fn filtration_by_kernels<S: Scalar>(
    phi: &JetSubbundle<S>,
    tol: f64,
) -> Result<Filtration<S>> {
    let r = nilorder(phi, tol)?.ok_or(G2Error::NotNilconformal)? as usize;
    let a = az_matrix(phi, tol)?;
    let mut pow = JetMat::identity(7, a.order());
    let mut kernels = Vec::new();
    for _ in 0..r {
        pow = a.mul(&pow);
        let kern = linalg::kernel(&pow, tol)?;
        kernels.push(JetSubbundle::from_sections(
            kern.iter().map(|k| row_to_section(k)).collect(),
            tol,
        )?);
    }
    // Z_i = ker (A_z)^{r−i}: i = 0 gives the full bundle, i = r gives 0
    let mut chain = vec![JetSubbundle::full(a.order())];
    for i in 1..r {
        chain.push(kernels[r - i - 1].clone());
    }
    chain.push(JetSubbundle::zero());
    Ok(Filtration { chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const N: usize = 6;

    fn const_bundle(ks: &[usize]) -> JetSubbundle<Gq> {
        JetSubbundle {
            sections: ks
                .iter()
                .map(|&k| JetVec7::constant(&Vec7::basis(k), N))
                .collect(),
        }
    }

    fn rand_section(rng: &mut ChaCha8Rng, order: usize) -> JetVec7<Gq> {
        JetVec7::from_fn(|_| {
            let mut j = Jet::zero(order);
            for d in 0..=order.min(2) {
                for q in 0..=d {
                    j.set_coeff(d - q, q, Gq::random(rng));
                }
            }
            j
        })
    }

    #[test]
    fn projection_identity_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v1 = rand_section(&mut rng, N);
        let v2 = rand_section(&mut rng, N);
        let bundle = JetSubbundle::from_sections(vec![v1.clone(), v2], 0.0).unwrap();
        let w = rand_section(&mut rng, N);
        let p = bundle.project(&w, 0.0).unwrap();
        let q = bundle.project_perp(&w, 0.0).unwrap();
        assert!(p.add(&q).sub(&w).is_zero_tol(0.0));
        // idempotence and frame fixing
        assert!(bundle.project(&p, 0.0).unwrap().sub(&p).is_zero_tol(0.0));
        let s0 = bundle.sections()[0].clone();
        assert!(bundle.project(&s0, 0.0).unwrap().sub(&s0).is_zero_tol(0.0));
    }

    #[test]
    fn constant_bundle_has_zero_az_and_is_harmonic() {
        let b = const_bundle(&[1, 2, 3]);
        let m = az_matrix(&b, 0.0).unwrap();
        assert!(m.is_zero_tol(0.0));
        assert!(is_harmonic(&b, 1e-12).unwrap());
        assert_eq!(nilorder(&b, 1e-12).unwrap(), Some(1));
        let g = gauss_transform(&b, GaussDir::Prime, 0.0).unwrap();
        assert_eq!(g.rank(), 0);
    }

    #[test]
    fn sff_is_tensorial() {
        // a z-dependent line inside a fixed 2-plane, measured against the rest
        let z = Jet::<Gq>::var_z(N);
        let s = JetVec7::from_fn(|k| match k {
            0 => Jet::one(N),
            1 => z.clone(),
            _ => Jet::zero(N),
        });
        let phi = JetSubbundle::from_sections(vec![s.clone()], 0.0).unwrap();
        let psi = phi.herm_perp(0.0).unwrap();
        let f = Jet::one(N).add(&z.scale(&Gq::from_int(2)));
        let lhs = sff(&phi, &psi, &s.scale(&f), GaussDir::Prime, 1e-12).unwrap();
        let rhs = sff(&phi, &psi, &s, GaussDir::Prime, 1e-12)
            .unwrap()
            .scale(&f);
        assert!(lhs.sub(&rhs.truncate(lhs.order())).is_zero_tol(0.0));
    }

    #[test]
    fn az_skew_symmetric_on_real_bundles() {
        // a real polynomial plane bundle: rotate e1,e2 by z+zbar flavored mix
        let t = Jet::<Gq>::var_z(N).add(&Jet::var_zbar(N)); // real function
        let s1 = JetVec7::from_fn(|k| match k {
            0 => Jet::one(N),
            3 => t.clone(),
            _ => Jet::zero(N),
        });
        let s2 = JetVec7::from_fn(|k| match k {
            1 => Jet::one(N),
            4 => t.mul(&t),
            _ => Jet::zero(N),
        });
        let phi = JetSubbundle::from_sections(vec![s1, s2], 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let u = rand_section(&mut rng, N);
            let v = rand_section(&mut rng, N);
            let lhs = az(&phi, &u, 0.0).unwrap().dot(&v.truncate(N - 1));
            let rhs = u.truncate(N - 1).dot(&az(&phi, &v, 0.0).unwrap());
            assert!(lhs.add(&rhs).is_zero_tol(1e-10));
        }
    }

    #[test]
    fn gauss_transform_of_holomorphic_line() {
        // span{e1 + z e2}: G' is the e2-direction component
        let z = Jet::<Gq>::var_z(N);
        let s = JetVec7::from_fn(|k| match k {
            0 => Jet::one(N),
            1 => z.clone(),
            _ => Jet::zero(N),
        });
        let f = JetSubbundle::from_sections(vec![s], 0.0).unwrap();
        let g = gauss_transform(&f, GaussDir::Prime, 0.0).unwrap();
        assert_eq!(g.rank(), 1);
        // at the base point the image is e2
        let at0 = g.sections()[0].eval0();
        assert!(at0.c[1].mag() > 0.5);
    }
}
