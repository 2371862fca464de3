//! Flags of subbundles, the G₂-flag and holomorphicity predicates, the
//! standard flags in the weight basis, and the three twistor-lift
//! constructions for nilconformal harmonic maps into G₂/SO(4).
//!
//! A flag is stored as legs ψ_{−s}, …, ψ_s; twistor membership is carried
//! entirely by this data.  The lift of a map φ with invariant s(φ) = s
//! is built from the subbundles (A_z)^i(W) exactly as the corresponding
//! construction lemma dictates, with ranks decided at the base point.

use crate::algebra::{Weight, WeightBasis};
use crate::bundles::{az, az_matrix, harmonic_residual, s_invariant, JetSubbundle};
use crate::error::{G2Error, Result};
use crate::jet::{Jet, JetVec7};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Flag<S: Scalar> {
    s: i32,
    legs: Vec<JetSubbundle<S>>,
}

impl<S: Scalar> Flag<S> {
    pub fn new(s: i32, legs: Vec<JetSubbundle<S>>) -> Result<Self> {
        if legs.len() != (2 * s + 1) as usize {
            return Err(G2Error::Input(format!(
                "flag with s = {s} needs {} legs, got {}",
                2 * s + 1,
                legs.len()
            )));
        }
        Ok(Flag { s, legs })
    }

    pub fn s(&self) -> i32 {
        self.s
    }

    pub fn leg(&self, i: i32) -> &JetSubbundle<S> {
        assert!(i.abs() <= self.s);
        &self.legs[(i + self.s) as usize]
    }

    pub fn legs(&self) -> &[JetSubbundle<S>] {
        &self.legs
    }

    /// The standard flag in the weight basis for s = 1, 2, 3.
    pub fn standard(s: u32, order: usize, tol: f64) -> Result<Flag<S>> {
        let wb = WeightBasis::<S>::build();
        let (a1, a12, a212) = (Weight::A1, Weight::A1A2, Weight::A2A1A2);
        let rows: Vec<Vec<Weight>> = match s {
            1 => vec![
                vec![a212.negated(), a12.negated()],
                vec![a1.negated(), Weight::ZERO, a1],
                vec![a12, a212],
            ],
            2 => vec![
                vec![a1.negated()],
                vec![a12, a212.negated()],
                vec![Weight::ZERO],
                vec![a12.negated(), a212],
                vec![a1],
            ],
            3 => vec![
                vec![a212.negated()],
                vec![a1.negated()],
                vec![a12.negated()],
                vec![Weight::ZERO],
                vec![a12],
                vec![a1],
                vec![a212],
            ],
            other => {
                return Err(G2Error::Input(format!(
                    "no standard flag for s = {other}"
                )))
            }
        };
        let legs = rows
            .into_iter()
            .map(|ws| JetSubbundle::constant(&wb.line_span(&ws, tol), order))
            .collect();
        Flag::new(s as i32, legs)
    }

    /// Max Hermitian pairing between distinct legs at the base point,
    /// plus the rank deficit of their sum.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        let total: usize = self.legs.iter().map(|l| l.rank()).sum();
        if total != 7 {
            return f64::INFINITY;
        }
        for (a, la) in self.legs.iter().enumerate() {
            for lb in &self.legs[a + 1..] {
                for u in la.sections() {
                    for v in lb.sections() {
                        res = res.max(u.herm(v).eval0().mag());
                    }
                }
            }
        }
        res
    }

    /// Max violation of ψ_{−i} = conj(ψ_i) at the base point.
    pub fn reality_residual(&self, tol: f64) -> f64 {
        let mut res: f64 = 0.0;
        for i in 1..=self.s {
            let c = self.leg(i).conj();
            res = res.max(self.leg(-i).contains_residual(&c, tol));
            res = res.max(c.contains_residual(self.leg(-i), tol));
        }
        res
    }

    /// Max residual of ψ_i × ψ_j ⊆ ψ_{i+j} over all leg pairs.
    pub fn g2_residual(&self, tol: f64) -> f64 {
        let mut res: f64 = 0.0;
        for i in -self.s..=self.s {
            for j in i..=self.s {
                for u in self.leg(i).sections() {
                    for v in self.leg(j).sections() {
                        let p = u.cross(v);
                        let k = i + j;
                        let r = if k.abs() <= self.s && self.leg(k).rank() > 0 {
                            match self.leg(k).project_perp(&p, tol) {
                                Ok(q) => q.eval0().mag(),
                                Err(_) => f64::INFINITY,
                            }
                        } else {
                            p.eval0().mag()
                        };
                        res = res.max(r);
                    }
                }
            }
        }
        res
    }

    pub fn is_g2_flag(&self, tol: f64) -> bool {
        self.orthogonality_residual() < tol.max(1e-30)
            && self.g2_residual(tol) < tol.max(1e-30)
    }

    /// Base-point magnitude of A′_{ψ_i,ψ_j} on the frame of ψ_i.
    pub fn sff_residual(&self, i: i32, j: i32, tol: f64) -> Result<f64> {
        let mut res: f64 = 0.0;
        for u in self.leg(i).sections() {
            let du = u.dz()?;
            let p = self.leg(j).project(&du, tol)?;
            res = res.max(p.eval0().mag());
        }
        Ok(res)
    }

    fn vanishing_residual(&self, must_vanish: impl Fn(i32, i32) -> bool, tol: f64) -> Result<f64> {
        let mut res: f64 = 0.0;
        for i in -self.s..=self.s {
            for j in -self.s..=self.s {
                if i != j && must_vanish(i, j) {
                    res = res.max(self.sff_residual(i, j, tol)?);
                }
            }
        }
        Ok(res)
    }

    /// A′_{ψi,ψj} must vanish for i−j positive odd or j−i positive even.
    pub fn j2_residual(&self, tol: f64) -> Result<f64> {
        self.vanishing_residual(
            |i, j| (i > j && (i - j) % 2 == 1) || (j > i && (j - i) % 2 == 0),
            tol,
        )
    }

    pub fn is_j2_holomorphic(&self, tol: f64) -> Result<bool> {
        Ok(self.j2_residual(tol)? < tol.max(1e-30))
    }

    /// A′_{ψi,ψj} must vanish whenever i − j is positive.
    pub fn j1_residual(&self, tol: f64) -> Result<f64> {
        self.vanishing_residual(|i, j| i > j, tol)
    }

    pub fn is_j1_holomorphic(&self, tol: f64) -> Result<bool> {
        Ok(self.j1_residual(tol)? < tol.max(1e-30))
    }

    /// Only A′_{ψ_i,ψ_{i+1}} may be nonzero.
    pub fn superhorizontal_residual(&self, tol: f64) -> Result<f64> {
        self.vanishing_residual(|i, j| j != i + 1, tol)
    }

    /// The cyclic 7-leg diagram of an almost complex map: arrows one
    /// step up plus the two wrap-arounds (2, −3) and (3, −2).
    pub fn tau_pattern_residual(&self, tol: f64) -> Result<f64> {
        self.vanishing_residual(
            |i, j| j != i + 1 && (i, j) != (2, -3) && (i, j) != (3, -2),
            tol,
        )
    }

    pub fn is_superhorizontal(&self, tol: f64) -> Result<bool> {
        Ok(self.superhorizontal_residual(tol)? < tol.max(1e-30))
    }

    /// Sum of the even-numbered legs (the twistor projection).
    pub fn project(&self, tol: f64) -> Result<JetSubbundle<S>> {
        let mut acc = JetSubbundle::zero();
        for i in -self.s..=self.s {
            if i.rem_euclid(2) == 0 {
                acc = acc.sum(self.leg(i), tol)?;
            }
        }
        Ok(acc)
    }

    pub fn equals_at_base(&self, other: &Flag<S>, tol: f64) -> bool {
        self.s == other.s
            && (-self.s..=self.s).all(|i| self.leg(i).equals_at_base(other.leg(i), tol))
    }
}

fn az_image<S: Scalar>(
    phi: &JetSubbundle<S>,
    of: &JetSubbundle<S>,
    power: u32,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    let mut sections: Vec<JetVec7<S>> = of.sections().to_vec();
    for _ in 0..power {
        sections = sections
            .iter()
            .map(|v| az(phi, v, tol))
            .collect::<Result<Vec<_>>>()?;
    }
    JetSubbundle::from_sections(sections, tol)
}

/// Positive (complex-coassociative) maximally isotropic extension of an
/// isotropic line bundle β inside φ⊥: β^a ∩ φ⊥.
fn positive_extension<S: Scalar>(
    beta: &JetSubbundle<S>,
    phi_perp: &JetSubbundle<S>,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    beta.annihilator(tol)?.intersect(phi_perp, tol)
}

/// Negative extension: β plus the partner line β̄⊥ ∩ β̄^a ∩ φ⊥.
fn negative_extension<S: Scalar>(
    beta: &JetSubbundle<S>,
    phi_perp: &JetSubbundle<S>,
    tol: f64,
) -> Result<JetSubbundle<S>> {
    let partner = beta
        .polar(tol)?
        .intersect(&beta.conj().annihilator(tol)?, tol)?
        .intersect(phi_perp, tol)?;
    partner.sum(beta, tol)
}

fn expect_s<S: Scalar>(phi: &JetSubbundle<S>, expected: u32, tol: f64) -> Result<()> {
    match s_invariant(phi, tol)? {
        Some(s) if s == expected => Ok(()),
        Some(s) => Err(G2Error::WrongS {
            expected,
            found: s,
        }),
        None => Err(G2Error::NotNilconformal),
    }
}

/// Twistor lift for s(φ) = 1: the coassociative W = β^a ∩ φ⊥ with
/// β = A_z(φ), or W = β itself when β already has rank 2.
pub fn lift_s1<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<Flag<S>> {
    expect_s(phi, 1, tol)?;
    let phi_perp = phi.herm_perp(tol)?;
    let beta = az_image(phi, phi, 1, tol)?;
    let w = match beta.rank() {
        2 => beta,
        1 => positive_extension(&beta, &phi_perp, tol)?,
        0 => return Err(G2Error::Precondition("constant map has no lift".into())),
        _ => return Err(G2Error::RankDrop),
    };
    if w.rank() != 2 {
        return Err(G2Error::RankDrop);
    }
    Flag::new(1, vec![w.conj(), phi.clone(), w])
}

fn flag_from_line<S: Scalar>(ell: &JetSubbundle<S>, tol: f64) -> Result<Flag<S>> {
    let ella = ell.annihilator(tol)?;
    let psi1 = ella.ominus(ell, tol)?;
    let psi0 = ella.polar(tol)?.ominus(&ella, tol)?;
    Flag::new(
        2,
        vec![
            ell.conj(),
            psi1.conj(),
            psi0,
            psi1,
            ell.clone(),
        ],
    )
}

/// Twistor lift for s(φ) = 2: the isotropic line ℓ = A_z(W) for the
/// negative maximally isotropic W ⊂ φ⊥ over β = (A_z)²(φ⊥).
pub fn lift_s2<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<Flag<S>> {
    expect_s(phi, 2, tol)?;
    let phi_perp = phi.herm_perp(tol)?;
    let beta = az_image(phi, &phi_perp, 2, tol)?;
    let ell = match beta.rank() {
        0 => az_image(phi, &phi_perp, 1, tol)?,
        1 => {
            let w = negative_extension(&beta, &phi_perp, tol)?;
            az_image(phi, &w, 1, tol)?
        }
        2 => az_image(phi, &beta, 1, tol)?,
        _ => return Err(G2Error::RankDrop),
    };
    if ell.rank() != 1 {
        return Err(G2Error::RankDrop);
    }
    flag_from_line(&ell, tol)
}

/// Twistor lift for s(φ) = 3: (ℓ, D) with ℓ = (A_z)²(W), D = A_z(W) ⊕ ℓ
/// and W = β^a ∩ φ⊥ over β = (A_z)³(φ).
pub fn lift_s3<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<Flag<S>> {
    expect_s(phi, 3, tol)?;
    let phi_perp = phi.herm_perp(tol)?;
    let beta = az_image(phi, phi, 3, tol)?;
    let w = match beta.rank() {
        2 => beta,
        1 => positive_extension(&beta, &phi_perp, tol)?,
        0 => {
            return Err(G2Error::Precondition(
                "rank-0 top derivative contradicts s = 3".into(),
            ))
        }
        _ => return Err(G2Error::RankDrop),
    };
    if w.rank() != 2 {
        return Err(G2Error::RankDrop);
    }
    let aw = az_image(phi, &w, 1, tol)?;
    let ell = az_image(phi, &aw, 1, tol)?;
    if ell.rank() != 1 || aw.rank() != 1 {
        return Err(G2Error::RankDrop);
    }
    let d = aw.sum(&ell, tol)?;
    let ella = ell.annihilator(tol)?;
    let psi2 = d.ominus(&ell, tol)?;
    let psi1 = ella.ominus(&d, tol)?;
    let psi0 = ella.polar(tol)?.ominus(&ella, tol)?;
    Flag::new(
        3,
        vec![
            ell.conj(),
            psi2.conj(),
            psi1.conj(),
            psi0,
            psi1,
            psi2,
            ell,
        ],
    )
}

/// Lift into T_{s(φ)}, dispatching on the computed invariant.
pub fn lift<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<Flag<S>> {
    let res = harmonic_residual(phi, tol)?;
    if res >= tol.max(1e-30) {
        return Err(G2Error::NotHarmonic { residual: res });
    }
    if crate::bundles::nilorder(phi, tol)?.is_none() {
        return Err(G2Error::NotNilconformal);
    }
    match s_invariant(phi, tol)? {
        Some(1) => lift_s1(phi, tol),
        Some(2) => lift_s2(phi, tol),
        Some(3) => lift_s3(phi, tol),
        _ => Err(G2Error::NotNilconformal),
    }
}

/// Strong conformality is s(φ) = 1.
pub fn is_strongly_conformal<S: Scalar>(phi: &JetSubbundle<S>, tol: f64) -> Result<bool> {
    Ok(s_invariant(phi, tol)? == Some(1))
}

/// Witness equality of two lifts of the same map at sampled data.
pub fn check_uniqueness<S: Scalar>(a: &Flag<S>, b: &Flag<S>, tol: f64) -> bool {
    a.equals_at_base(b, tol)
}

/// Residual of the nilconformality bound (A_z)^{2s}((−1)^{s−1}φ) = 0 read
/// off a J₂-holomorphic flag's projection.
pub fn projection_nilpotency_residual<S: Scalar>(flag: &Flag<S>, tol: f64) -> Result<f64> {
    let phi = flag.project(tol)?;
    let s = flag.s() as u32;
    let a = az_matrix(&phi, tol)?;
    let a0 = a.map(|j| Jet::constant(0, j.eval0()));
    let mut pow = a0.clone();
    for _ in 1..(2 * s) {
        pow = pow.mul(&a0);
    }
    let target = if s % 2 == 1 {
        phi.clone()
    } else {
        phi.herm_perp(tol)?
    };
    let mut res: f64 = 0.0;
    for v in target.sections() {
        let v0: Vec<Jet<S>> = v.c.iter().map(|j| Jet::constant(0, j.eval0())).collect();
        for out in pow.mul_vec(&v0) {
            res = res.max(out.max_mag());
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;

    #[test]
    fn standard_flags_are_g2_flags() {
        for s in 1..=3u32 {
            let f = Flag::<Gq>::standard(s, 2, 0.0).unwrap();
            assert_eq!(f.orthogonality_residual(), 0.0);
            assert_eq!(f.reality_residual(0.0), 0.0);
            assert!(f.is_g2_flag(0.0), "standard flag s={s} fails the product test");
        }
    }

    #[test]
    fn standard_flags_project_to_real_middle() {
        let wb = WeightBasis::<Gq>::build();
        let target = JetSubbundle::constant(&wb.real_form_middle(0.0), 2);
        for s in 1..=3u32 {
            let f = Flag::<Gq>::standard(s, 2, 0.0).unwrap();
            let p = f.project(0.0).unwrap();
            assert!(p.equals_at_base(&target, 1e-12));
        }
    }

    #[test]
    fn swapping_legs_breaks_the_g2_condition() {
        let f = Flag::<Gq>::standard(3, 2, 0.0).unwrap();
        let mut legs = f.legs().to_vec();
        legs.swap(0, 2); // destroys the grading
        let bad = Flag::new(3, legs).unwrap();
        assert!(!bad.is_g2_flag(0.0));
    }

    #[test]
    fn constant_flag_is_j2_and_superhorizontal() {
        let f = Flag::<Gq>::standard(2, 2, 0.0).unwrap();
        assert!(f.is_j2_holomorphic(0.0).unwrap());
        assert!(f.is_j1_holomorphic(0.0).unwrap());
        assert!(f.is_superhorizontal(0.0).unwrap());
    }
}
