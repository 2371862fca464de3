//! Almost complex maps into S⁶ and the constructions turning them into
//! harmonic maps into G₂/SO(4): the 7-leg flag of an almost complex map,
//! uniton-pair addition, the correspondence with strongly conformal maps,
//! holomorphic superhorizontal curves in the quadric, and the doubly
//! periodic vacuum solution on the torus.

use crate::bundles::{
    d_zbar, gauss_transform, iterated_gauss, GaussDir, JetSubbundle,
};
use crate::error::{G2Error, Result};
use crate::fixtures;
use crate::jet::{Jet, JetVec7};
use crate::scalar::Scalar;
use crate::twistor::Flag;
use crate::vec7::Vec7;
use num_complex::Complex64;

/// An almost complex map into S⁶, stored as the jet of the unit section F.
#[derive(Clone, Debug)]
pub struct AcMap<S: Scalar> {
    pub section: JetVec7<S>,
}

impl<S: Scalar> AcMap<S> {
    pub fn new(section: JetVec7<S>) -> Self {
        AcMap { section }
    }

    /// The line bundle f = span{F}.
    pub fn line(&self, tol: f64) -> Result<JetSubbundle<S>> {
        JetSubbundle::from_sections(vec![self.section.clone()], tol)
    }

    pub fn reality_residual(&self) -> f64 {
        self.section.sub(&self.section.conj()).max_mag()
    }

    /// (F, F) − 1 as a jet.
    pub fn unit_norm_residual(&self) -> f64 {
        let n = self.section.dot(&self.section);
        n.sub(&Jet::one(n.order())).max_mag()
    }

    /// F × F_z − i F_z, the almost-complex condition on dF.
    pub fn almost_complex_residual(&self) -> Result<f64> {
        let fz = self.section.dz()?;
        let lhs = self.section.cross(&fz);
        let rhs = fz.scale(&Jet::constant(fz.order(), S::i()));
        Ok(lhs.sub(&rhs).max_mag())
    }
}

/// Which Gauss bundle of φ⊥ supplies the section L in the inverse
/// correspondence; the construction's proof uses the ∂″ side.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LSource {
    GaussPrimePerp,
    GaussDoublePrimePerp,
}

/// The doubly periodic vacuum solution on ℂ, jetted at z₀.
///
/// Built from weight vectors v₁ ∈ ℓ_{α₁}, v₂ ∈ ℓ_{α₁+α₂} of norm 1/√2
/// and v₃ = conj(v₁ × v₂), with frequencies μ_j = 2·(cube roots of i),
/// which gives the period lattice πℤ + (iπ/√3)ℤ.  Float backend only.
pub fn vacuum_solution<S: Scalar>(z0: &S, order: usize) -> Result<AcMap<S>> {
    if S::exact() {
        return Err(G2Error::Unsupported(
            "the vacuum solution needs the float backend".into(),
        ));
    }
    let half = S::from_ratio(1, 2);
    let v1 = Vec7::<S>::basis(2)
        .sub(&Vec7::basis(3).scale(&S::i()))
        .scale(&half);
    let v2 = Vec7::<S>::basis(4)
        .sub(&Vec7::basis(5).scale(&S::i()))
        .scale(&half);
    let v3 = v1.cross(&v2).conj(); // norm 1/√2 again
    let sqrt3 = 3.0_f64.sqrt();
    let mus = [
        S::from_f64_parts(sqrt3, 1.0),
        S::from_f64_parts(-sqrt3, 1.0),
        S::from_f64_parts(0.0, -2.0),
    ];
    let z0c = z0.to_c64();
    let mut half_sum = JetVec7::zero(order);
    for (mu, v) in mus.iter().zip([v1, v2, v3]) {
        let w = mu.to_c64() * z0c - mu.to_c64().conj() * z0c.conj();
        let a0 = S::from_f64_parts(w.exp().re, w.exp().im);
        let jet = Jet::exp_linear(mu, &mu.conj().neg(), order).scale(&a0);
        half_sum = half_sum.add(&JetVec7::constant(&v, order).scale(&jet));
    }
    let scale = Jet::constant(order, S::from_f64_parts(1.0 / sqrt3, 0.0));
    let f = half_sum.add(&half_sum.conj()).scale(&scale);
    Ok(AcMap::new(f))
}

/// Value of the vacuum solution at a point (no jet), for periodicity
/// checks.
pub fn vacuum_value(z: Complex64) -> [Complex64; 7] {
    let sqrt3 = 3.0_f64.sqrt();
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);
    let pair = |j: usize, k: usize, sign: f64| -> [Complex64; 7] {
        let mut v = [Complex64::new(0.0, 0.0); 7];
        v[j - 1] = half;
        v[k - 1] = sign * -i * half;
        v
    };
    let v1 = pair(2, 3, 1.0);
    let v2 = pair(4, 5, 1.0);
    let v3 = pair(6, 7, -1.0);
    let mus = [
        Complex64::new(sqrt3, 1.0),
        Complex64::new(-sqrt3, 1.0),
        Complex64::new(0.0, -2.0),
    ];
    let mut out = [Complex64::new(0.0, 0.0); 7];
    for (mu, v) in mus.iter().zip([v1, v2, v3]) {
        let a = (mu * z - mu.conj() * z.conj()).exp();
        for m in 0..7 {
            out[m] += (a * v[m] + (a * v[m]).conj()) / sqrt3;
        }
    }
    out
}

/// The G₂-flag of a non-constant almost complex map: Gauss bundles up to
/// order two and ψ₃ = ψ₁ × ψ₂.
pub fn ac_flag<S: Scalar>(f_map: &AcMap<S>, tol: f64) -> Result<Flag<S>> {
    let f = f_map.line(tol)?;
    let g1 = gauss_transform(&f, GaussDir::Prime, tol)?;
    if g1.rank() == 0 {
        return Err(G2Error::Precondition("constant map has no flag".into()));
    }
    let g2 = gauss_transform(&g1, GaussDir::Prime, tol)?;
    if g2.rank() == 0 {
        return Err(G2Error::TotallyGeodesicS2);
    }
    let psi3_section = g1.sections()[0].cross(&g2.sections()[0]);
    let psi3 = JetSubbundle::from_sections(vec![psi3_section], tol)?;
    if psi3.rank() != 1 {
        return Err(G2Error::RankDrop);
    }
    Flag::new(
        3,
        vec![
            psi3.conj(),
            g2.conj(),
            g1.conj(),
            f,
            g1,
            g2,
            psi3,
        ],
    )
}

/// φ = ᾱ ⊕ span{F} ⊕ α for a holomorphic line α in F⁻¹T^{1,0}S⁶.
pub fn add_uniton_pair<S: Scalar>(
    f_map: &AcMap<S>,
    alpha: &JetSubbundle<S>,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    if alpha.rank() != 1 {
        return Err(G2Error::Precondition("alpha must be a line bundle".into()));
    }
    let a = &alpha.sections()[0];
    let croak = f_map.section.cross(a);
    let t10 = croak.sub(&a.scale(&Jet::constant(a.order(), S::i())));
    if t10.max_mag() >= tol.max(1e-30) {
        return Err(G2Error::Precondition(
            "alpha does not lie in the (1,0) tangent bundle".into(),
        ));
    }
    let f = f_map.line(tol)?;
    let da = d_zbar(&f, a, tol)?;
    let off = alpha.project_perp(&da, tol)?;
    if off.max_mag() >= tol.max(1e-30) {
        return Err(G2Error::Precondition(
            "alpha is not a holomorphic subbundle".into(),
        ));
    }
    JetSubbundle::from_sections(
        vec![a.conj(), f_map.section.clone(), a.clone()],
        tol,
    )
}

/// Recover the almost complex map from a strongly conformal φ via
/// F = i L̄ × L / |L|² for a section L of the chosen Gauss bundle of φ⊥.
pub fn acmap_from_phi<S: Scalar>(
    phi: &JetSubbundle<S>,
    source: LSource,
    tol: f64,
) -> Result<AcMap<S>> {
    let perp = phi.herm_perp(tol)?;
    let dir = match source {
        LSource::GaussPrimePerp => GaussDir::Prime,
        LSource::GaussDoublePrimePerp => GaussDir::DoublePrime,
    };
    let g = gauss_transform(&perp, dir, tol)?;
    if g.rank() != 1 {
        return Err(G2Error::Precondition(format!(
            "Gauss bundle of phi-perp has rank {}, expected 1",
            g.rank()
        )));
    }
    let l = &g.sections()[0];
    let n = l.herm(l);
    let f = l
        .conj()
        .cross(l)
        .scale(&Jet::constant(l.order(), S::i()))
        .scale(&n.inv(tol)?);
    Ok(AcMap::new(f))
}

/// The rank-two construction φ = ψ_{−3} ⊕ f ⊕ ψ₃.
pub fn rank2_construction<S: Scalar>(f_map: &AcMap<S>, tol: f64) -> Result<JetSubbundle<S>> {
    let flag = ac_flag(f_map, tol)?;
    flag.leg(-3)
        .sum(flag.leg(0), tol)?
        .sum(flag.leg(3), tol)
}

/// A holomorphic curve into the quadric Q⁵, stored as a local section.
#[derive(Clone, Debug)]
pub struct Q5Curve<S: Scalar> {
    pub section: JetVec7<S>,
}

impl<S: Scalar> Q5Curve<S> {
    /// Validate holomorphy, isotropy and nonvanishing at the base point.
    pub fn new(section: JetVec7<S>, tol: f64) -> Result<Self> {
        if section.dzbar()?.max_mag() >= tol.max(1e-30) {
            return Err(G2Error::Precondition("curve is not holomorphic".into()));
        }
        if section.dot(&section).max_mag() >= tol.max(1e-30) {
            return Err(G2Error::Precondition("curve is not isotropic".into()));
        }
        if section.eval0().mag() < tol.max(1e-300) {
            return Err(G2Error::Precondition("curve vanishes at the base point".into()));
        }
        Ok(Q5Curve { section })
    }

    pub fn line(&self, tol: f64) -> Result<JetSubbundle<S>> {
        JetSubbundle::from_sections(vec![self.section.clone()], tol)
    }

    /// H × H′ as a residual; superhorizontal curves have zero.
    pub fn superhorizontal_residual(&self) -> Result<f64> {
        let hp = self.section.dz()?;
        Ok(self.section.cross(&hp).max_mag())
    }

    pub fn is_superhorizontal(&self, tol: f64) -> Result<bool> {
        Ok(self.superhorizontal_residual()? < tol.max(1e-30))
    }

    /// The fixture curve e^{μ z X}·(lowest weight vector) at z₀.
    pub fn standard(z0: &S, mu: &S, order: usize, tol: f64) -> Result<Self> {
        Q5Curve::new(fixtures::superhorizontal_curve(z0, mu, order), tol)
    }
}

/// The almost complex map of a superhorizontal curve: F = i H̄ × H / |H|².
pub fn bryant_map<S: Scalar>(h: &Q5Curve<S>, tol: f64) -> Result<AcMap<S>> {
    let l = &h.section;
    let n = l.herm(l);
    let f = l
        .conj()
        .cross(l)
        .scale(&Jet::constant(l.order(), S::i()))
        .scale(&n.inv(tol)?);
    Ok(AcMap::new(f))
}

/// Sections H₀, …, H_k of the Gauss bundles of h, by the unnormalized
/// frame recursion H_i = ∂H_{i−1} − (⟨∂H_{i−1},H_{i−1}⟩/|H_{i−1}|²)H_{i−1}.
pub fn sff_chain<S: Scalar>(h: &Q5Curve<S>, k: usize, tol: f64) -> Result<Vec<JetVec7<S>>> {
    let mut out = vec![h.section.clone()];
    for _ in 0..k {
        let prev = out.last().unwrap();
        let dp = prev.dz()?;
        let coeff = dp.herm(prev).div(&prev.herm(prev), tol)?;
        let next = dp.sub(&prev.scale(&coeff).truncate(dp.order()));
        if next.eval0().mag() < tol.max(1e-300) {
            return Err(G2Error::RankDrop);
        }
        out.push(next);
    }
    Ok(out)
}

/// φ = G^{(−i)}(f) ⊕ f ⊕ G^{(i)}(f) for the Bryant map of a full
/// superhorizontal curve, i = 1, 2, 3.
pub fn prop_family<S: Scalar>(
    h: &Q5Curve<S>,
    i: u32,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    if !(1..=3).contains(&i) {
        return Err(G2Error::Input("family index must be 1, 2 or 3".into()));
    }
    if !h.is_superhorizontal(tol)? {
        return Err(G2Error::Precondition("curve is not superhorizontal".into()));
    }
    let f_map = bryant_map(h, tol)?;
    let f = f_map.line(tol)?;
    let gi = iterated_gauss(&f, i as i32, tol)?;
    gi.conj().sum(&f, tol)?.sum(&gi, tol)
}

/// The line α = span{H₀ + t(a H₄ + b H₅)} from the chain of h.
pub fn chain_line<S: Scalar>(
    h: &Q5Curve<S>,
    a: &Jet<S>,
    b: &Jet<S>,
    t: &S,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    let chain = sff_chain(h, 5, tol)?;
    let tj = Jet::constant(chain[0].order(), t.clone());
    let section = chain[0]
        .clone()
        .add(&chain[4].scale(&a.mul(&tj)))
        .add(&chain[5].scale(&b.mul(&tj)));
    JetSubbundle::from_sections(vec![section], tol)
}

/// φ = ᾱ ⊕ f ⊕ α for a holomorphic line α ⊂ h ⊕ G⁴(h) ⊕ G⁵(h) sitting in
/// neither summand; the resulting harmonic map has s(φ) = 2.
pub fn alpha_construction<S: Scalar>(
    h: &Q5Curve<S>,
    alpha: &JetSubbundle<S>,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    let hline = h.line(tol)?;
    let g4 = iterated_gauss(&hline, 4, tol)?;
    let g5 = iterated_gauss(&hline, 5, tol)?;
    let t10 = hline.sum(&g4, tol)?.sum(&g5, tol)?;
    let tail = g4.sum(&g5, tol)?;
    let a = &alpha.sections()[0];
    if t10.project_perp(a, tol)?.max_mag() >= tol.max(1e-30) {
        return Err(G2Error::Precondition(
            "alpha must lie in h + G4 + G5".into(),
        ));
    }
    if hline.project_perp(a, tol)?.max_mag() < tol.max(1e-30)
        || tail.project_perp(a, tol)?.max_mag() < tol.max(1e-30)
    {
        return Err(G2Error::Precondition(
            "alpha must sit in neither h nor G4 + G5 alone".into(),
        ));
    }
    let f_map = bryant_map(h, tol)?;
    add_uniton_pair(&f_map, alpha, tol)
}

/// Coarse classification of an almost complex map at the base point,
/// decided from jet data up to the available order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AcType {
    /// Full and superminimal.
    FullSuperminimal,
    /// Full, not superminimal.
    FullNonSuperminimal,
    /// Harmonic sequence spans only a 6-dimensional subspace.
    NotFull,
    /// Image in a totally geodesic 2-sphere.
    TotallyGeodesic,
}

pub fn classify<S: Scalar>(f_map: &AcMap<S>, tol: f64) -> Result<AcType> {
    let flag = match ac_flag(f_map, tol) {
        Ok(fl) => fl,
        Err(G2Error::TotallyGeodesicS2) => return Ok(AcType::TotallyGeodesic),
        Err(e) => return Err(e),
    };
    // third Gauss bundle of f, inside ψ₃ ⊕ ψ_{−3}
    let g3 = gauss_transform(flag.leg(2), GaussDir::Prime, tol)?;
    let mut seq = flag.leg(0).clone();
    for i in [-2, -1, 1, 2] {
        seq = seq.sum(flag.leg(i), tol)?;
    }
    let full = seq.sum(&g3, tol)?.sum(&g3.conj(), tol)?.rank() == 7;
    let superminimal = if g3.rank() == 0 {
        true
    } else {
        flag.leg(3)
            .project_perp(&g3.sections()[0], tol)?
            .eval0()
            .mag()
            < tol.max(1e-30)
    };
    Ok(match (full, superminimal) {
        (true, true) => AcType::FullSuperminimal,
        (true, false) => AcType::FullNonSuperminimal,
        (false, _) => AcType::NotFull,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::{harmonic_residual, nilorder, s_invariant};
    use crate::scalar::Gq;

    const TOL: f64 = 1e-9;

    fn torus(order: usize) -> AcMap<Complex64> {
        vacuum_solution(&Complex64::new(0.17, 0.31), order).unwrap()
    }

    #[test]
    fn vacuum_is_real_unit_and_almost_complex() {
        let f = torus(6);
        assert!(f.reality_residual() < 1e-12);
        assert!(f.unit_norm_residual() < 1e-12);
        assert!(f.almost_complex_residual().unwrap() < 1e-11);
    }

    #[test]
    fn vacuum_double_periodicity() {
        let z = Complex64::new(0.23, -0.4);
        let base = vacuum_value(z);
        let pi = std::f64::consts::PI;
        for period in [
            Complex64::new(pi, 0.0),
            Complex64::new(0.0, pi / 3.0_f64.sqrt()),
        ] {
            let shifted = vacuum_value(z + period);
            let err: f64 = base
                .iter()
                .zip(shifted.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "period {period} violated by {err}");
        }
    }

    #[test]
    fn torus_flag_is_g2_and_type_three() {
        let f = torus(7);
        let flag = ac_flag(&f, TOL).unwrap();
        assert!(flag.orthogonality_residual() < 1e-9);
        assert!(flag.g2_residual(TOL) < 1e-8);
        assert_eq!(classify(&f, TOL).unwrap(), AcType::NotFull);
    }

    #[test]
    fn torus_f_phi_map_is_harmonic_with_s1() {
        let f = torus(8);
        let flag = ac_flag(&f, TOL).unwrap();
        let alpha = flag.leg(1).clone();
        let phi = add_uniton_pair(&f, &alpha, 1e-8).unwrap();
        assert_eq!(phi.rank(), 3);
        assert!(harmonic_residual(&phi, TOL).unwrap() < 1e-9);
        assert_eq!(s_invariant(&phi, 1e-8).unwrap(), Some(1));
        let r = nilorder(&phi, 1e-8).unwrap().unwrap();
        assert!(r as i64 - 1 <= 2 && 2 <= r as i64 + 1);
    }

    #[test]
    fn bryant_round_trip_on_standard_curve() {
        let h = Q5Curve::<Gq>::standard(&Gq::from_ratio(1, 3), &Gq::one(), 7, 0.0).unwrap();
        let f_map = bryant_map(&h, 1e-12).unwrap();
        assert!(f_map.reality_residual() < 1e-12);
        assert!(f_map.almost_complex_residual().unwrap() < 1e-12);
        // f = G^{(3)}(h)
        let f = f_map.line(1e-12).unwrap();
        let g3h = iterated_gauss(&h.line(1e-12).unwrap(), 3, 1e-12).unwrap();
        assert!(f.equals_at_base(&g3h, 1e-9));
        // F × L = i L for L spanning G'(f) … via the chain
        assert_eq!(classify(&f_map, 1e-10).unwrap(), AcType::FullSuperminimal);
    }
}
