//! Vectors in ℂ⁷ ≅ Im(𝕆) ⊗ ℂ with the vector product × and the
//! complex-bilinear dot product ( , ).  The Hermitian product is (v, w̄).

use crate::octonion::{associator, cross_table};
use crate::scalar::Scalar;
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Vec7<S: Scalar> {
    pub c: [S; 7],
}

impl<S: Scalar> Vec7<S> {
    pub fn zero() -> Self {
        Vec7 {
            c: std::array::from_fn(|_| S::zero()),
        }
    }

    /// Standard basis vector e_k, 1-based as in e₁..e₇.
    pub fn basis(k: usize) -> Self {
        assert!((1..=7).contains(&k));
        Vec7 {
            c: std::array::from_fn(|i| if i + 1 == k { S::one() } else { S::zero() }),
        }
    }

    pub fn from_fn(f: impl FnMut(usize) -> S) -> Self {
        Vec7 {
            c: std::array::from_fn(f),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Vec7::from_fn(|k| self.c[k].add(&rhs.c[k]))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Vec7::from_fn(|k| self.c[k].sub(&rhs.c[k]))
    }

    pub fn neg(&self) -> Self {
        Vec7::from_fn(|k| self.c[k].neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        Vec7::from_fn(|k| self.c[k].mul(s))
    }

    pub fn conj(&self) -> Self {
        Vec7::from_fn(|k| self.c[k].conj())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.c.iter().all(|x| x.is_zero_tol(tol))
    }

    pub fn mag(&self) -> f64 {
        self.c.iter().map(|x| x.mag() * x.mag()).sum::<f64>().sqrt()
    }

    /// Vector product u × v.
    pub fn cross(&self, rhs: &Self) -> Self {
        let mut out: Vec7<S> = Vec7::zero();
        for &(i, j, k, s) in cross_table() {
            if self.c[i].is_zero() || rhs.c[j].is_zero() {
                continue;
            }
            let t = self.c[i].mul(&rhs.c[j]);
            let t = if s < 0 { t.neg() } else { t };
            out.c[k] = out.c[k].add(&t);
        }
        out
    }

    /// Complex-bilinear inner product (u, v).
    pub fn dot(&self, rhs: &Self) -> S {
        let mut acc = S::zero();
        for k in 0..7 {
            acc = acc.add(&self.c[k].mul(&rhs.c[k]));
        }
        acc
    }

    /// Hermitian inner product (u, v̄), linear in the first slot.
    pub fn herm(&self, rhs: &Self) -> S {
        let mut acc = S::zero();
        for k in 0..7 {
            acc = acc.add(&self.c[k].mul(&rhs.c[k].conj()));
        }
        acc
    }

    /// Associator [u, v, w] via the full 8-dimensional octonion product.
    pub fn associator(&self, v: &Self, w: &Self) -> Self {
        Vec7 {
            c: associator(&self.c, &v.c, &w.c),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Vec7::from_fn(|_| S::random(rng))
    }

    /// Real random vector (no imaginary components).
    pub fn random_real<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Vec7::from_fn(|_| {
            let s = S::random(rng);
            s.add(&s.conj()) // 2 Re s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type V = Vec7<Gq>;

    #[test]
    fn e1_cross_e2_is_e3() {
        assert_eq!(V::basis(1).cross(&V::basis(2)), V::basis(3));
    }

    #[test]
    fn cross_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = V::random(&mut rng);
            let v = V::random(&mut rng);
            assert_eq!(u.cross(&v), v.cross(&u).neg());
            assert!(u.cross(&u).is_zero());
        }
    }

    #[test]
    fn scalar_and_double_product_identities() {
        // (u, v×w) = (u×v, w) and
        // u×(v×w) + (u×v)×w = 2(u,w)v − (u,v)w − (v,w)u, exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = V::random(&mut rng);
            let v = V::random(&mut rng);
            let w = V::random(&mut rng);
            assert_eq!(u.dot(&v.cross(&w)), u.cross(&v).dot(&w));
            let lhs = u.cross(&v.cross(&w)).add(&u.cross(&v).cross(&w));
            let rhs = v
                .scale(&u.dot(&w).scale_int(2))
                .sub(&w.scale(&u.dot(&v)))
                .sub(&u.scale(&v.dot(&w)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn associator_matches_cross_dot_expansion() {
        // [u,v,w] = (u×v)×w − u×(v×w) − (u,v)w + (v,w)u
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let u = V::random(&mut rng);
            let v = V::random(&mut rng);
            let w = V::random(&mut rng);
            let direct = u.associator(&v, &w);
            let expanded = u
                .cross(&v)
                .cross(&w)
                .sub(&u.cross(&v.cross(&w)))
                .sub(&w.scale(&u.dot(&v)))
                .add(&u.scale(&v.dot(&w)));
            assert_eq!(direct, expanded);
        }
    }
}
