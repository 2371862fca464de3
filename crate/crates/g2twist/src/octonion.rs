//! Octonion multiplication and the induced vector product on Im(𝕆) ≅ ℝ⁷.
//!
//! The basis e₀ = 1, e₁..e₇ is built by Cayley–Dickson doubling of the
//! quaternions (e₄ = e, e₅ = ie, e₆ = je, e₇ = ke), which yields the
//! structure constants e₁e₂ = e₃, e₁e₄ = e₅, e₂e₄ = e₆, e₃e₄ = e₇ and
//! their cyclic consequences.  Everything downstream reads products off
//! the tables computed here, so the convention lives in exactly one place.

use crate::scalar::Scalar;
use std::sync::OnceLock;

/// Quaternion basis product: q_i q_j = sign * q_k over 1,i,j,k.
fn quat_basis_mul(i: usize, j: usize) -> (i8, usize) {
    const TAB: [[(i8, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    TAB[i][j]
}

fn quat_conj(i: usize) -> i8 {
    if i == 0 {
        1
    } else {
        -1
    }
}

/// Octonion basis product e_i e_j = sign * e_k via Cayley–Dickson:
/// (a + be)(c + de) = (ac − d̄b) + (da + bc̄)e.
pub fn oct_basis_mul(i: usize, j: usize) -> (i8, usize) {
    match (i < 4, j < 4) {
        (true, true) => quat_basis_mul(i, j),
        (true, false) => {
            // a * (q_m e) = (q_m q_a) e
            let m = j - 4;
            let (s, k) = quat_basis_mul(m, i);
            (s, k + 4)
        }
        (false, true) => {
            // (q_m e) * c = (q_m conj(q_c)) e
            let m = i - 4;
            let (s, k) = quat_basis_mul(m, j);
            (s * quat_conj(j), k + 4)
        }
        (false, false) => {
            // (q_m e)(q_n e) = −conj(q_n) q_m
            let m = i - 4;
            let n = j - 4;
            let (s, k) = quat_basis_mul(n, m);
            (-s * quat_conj(n), k)
        }
    }
}

/// Dense 8×8 basis product table, (sign, index) per pair.
pub fn oct_table() -> &'static [[(i8, usize); 8]; 8] {
    static TABLE: OnceLock<[[(i8, usize); 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[(0i8, 0usize); 8]; 8];
        for i in 0..8 {
            for j in 0..8 {
                t[i][j] = oct_basis_mul(i, j);
            }
        }
        t
    })
}

/// Nonzero cross products e_i × e_j = sign * e_k on the imaginary part,
/// as (i, j, k, sign) with 0-based indices into ℝ⁷.
pub fn cross_table() -> &'static Vec<(usize, usize, usize, i8)> {
    static TABLE: OnceLock<Vec<(usize, usize, usize, i8)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut entries = Vec::new();
        for i in 1..8 {
            for j in 1..8 {
                if i == j {
                    continue; // e_i e_i = −1 has no imaginary part
                }
                let (s, k) = oct_basis_mul(i, j);
                assert!(k >= 1, "product of distinct imaginary units is imaginary");
                entries.push((i - 1, j - 1, k - 1, s));
            }
        }
        entries
    })
}

/// Full octonion with 8 components over a scalar backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Oct<S: Scalar> {
    pub c: [S; 8],
}

impl<S: Scalar> Oct<S> {
    pub fn zero() -> Self {
        Oct {
            c: std::array::from_fn(|_| S::zero()),
        }
    }

    pub fn from_imaginary(v: &[S; 7]) -> Self {
        let mut c: [S; 8] = std::array::from_fn(|_| S::zero());
        for k in 0..7 {
            c[k + 1] = v[k].clone();
        }
        Oct { c }
    }

    pub fn imaginary_part(&self) -> [S; 7] {
        std::array::from_fn(|k| self.c[k + 1].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let tab = oct_table();
        let mut out: Oct<S> = Oct::zero();
        for i in 0..8 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..8 {
                if rhs.c[j].is_zero() {
                    continue;
                }
                let (s, k) = tab[i][j];
                let term = self.c[i].mul(&rhs.c[j]);
                let term = if s < 0 { term.neg() } else { term };
                out.c[k] = out.c[k].add(&term);
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Oct {
            c: std::array::from_fn(|k| self.c[k].sub(&rhs.c[k])),
        }
    }
}

/// Associator [u,v,w] = (u·v)·w − u·(v·w) of imaginary octonions.
///
/// The result is again imaginary; the real component is dropped after a
/// zero check in debug builds.
pub fn associator<S: Scalar>(u: &[S; 7], v: &[S; 7], w: &[S; 7]) -> [S; 7] {
    let (a, b, c) = (
        Oct::from_imaginary(u),
        Oct::from_imaginary(v),
        Oct::from_imaginary(w),
    );
    let lhs = a.mul(&b).mul(&c);
    let rhs = a.mul(&b.mul(&c));
    let d = lhs.sub(&rhs);
    debug_assert!(d.c[0].is_zero_tol(1e-9), "associator has real part");
    d.imaginary_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;

    fn e(k: usize) -> [Gq; 7] {
        std::array::from_fn(|i| if i + 1 == k { Gq::one() } else { Gq::zero() })
    }

    #[test]
    fn cayley_convention() {
        // e1 e2 = e3, e1 e4 = e5, e2 e4 = e6, e3 e4 = e7
        assert_eq!(oct_basis_mul(1, 2), (1, 3));
        assert_eq!(oct_basis_mul(1, 4), (1, 5));
        assert_eq!(oct_basis_mul(2, 4), (1, 6));
        assert_eq!(oct_basis_mul(3, 4), (1, 7));
    }

    #[test]
    fn cyclic_consequences() {
        // each Fano triple is cyclic and anticommutative
        for i in 1..8 {
            for j in 1..8 {
                if i == j {
                    continue;
                }
                let (s, k) = oct_basis_mul(i, j);
                assert_eq!(oct_basis_mul(j, k), (s, i));
                assert_eq!(oct_basis_mul(k, i), (s, j));
                assert_eq!(oct_basis_mul(j, i), (-s, k));
            }
        }
    }

    #[test]
    fn units_square_to_minus_one() {
        for i in 1..8 {
            assert_eq!(oct_basis_mul(i, i), (-1, 0));
        }
    }

    #[test]
    fn alternative_law_on_basis() {
        // [u,u,w] = 0 for basis imaginaries
        for i in 1..8 {
            for j in 1..8 {
                let a = associator::<Gq>(&e(i), &e(i), &e(j));
                assert!(a.iter().all(|x| x.is_zero()));
            }
        }
    }

    #[test]
    fn associator_of_quaternionic_triple_vanishes() {
        let a = associator::<Gq>(&e(1), &e(2), &e(3));
        assert!(a.iter().all(|x| x.is_zero()));
        // while a generic triple does not associate
        let b = associator::<Gq>(&e(1), &e(2), &e(4));
        assert!(b.iter().any(|x| !x.is_zero()));
    }
}
