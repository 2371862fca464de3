//! Truncated Taylor polynomials Σ_{p+q≤N} c_{pq} z^p z̄^q at a base point,
//! together with 7-vectors of them.  These realize ∂_z, ∂_z̄ and all the
//! pointwise products the bundle machinery needs.
//!
//! The base point is always translated to 0; derivatives lower the order
//! by one so operations can fail fast when the order budget runs out.

use crate::error::{G2Error, Result};
use crate::scalar::Scalar;
use crate::vec7::Vec7;

fn tri(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Number of coefficients of a jet of the given order: (N+1)(N+2)/2.
pub fn jet_len(order: usize) -> usize {
    tri(order + 1)
}

fn idx(p: usize, q: usize) -> usize {
    let d = p + q;
    tri(d) + q
}

/// Jet of a ℂ-valued smooth function: coefficients c_{pq} of z^p z̄^q.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S: Scalar> {
    order: usize,
    c: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(order: usize) -> Self {
        Jet {
            order,
            c: vec![S::zero(); jet_len(order)],
        }
    }

    pub fn constant(order: usize, value: S) -> Self {
        let mut j = Jet::zero(order);
        j.c[0] = value;
        j
    }

    pub fn one(order: usize) -> Self {
        Jet::constant(order, S::one())
    }

    /// The coordinate z as a jet.
    pub fn var_z(order: usize) -> Self {
        let mut j = Jet::zero(order);
        if order >= 1 {
            j.c[idx(1, 0)] = S::one();
        }
        j
    }

    /// The coordinate z̄ as a jet.
    pub fn var_zbar(order: usize) -> Self {
        let mut j = Jet::zero(order);
        if order >= 1 {
            j.c[idx(0, 1)] = S::one();
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, p: usize, q: usize) -> S {
        if p + q <= self.order {
            self.c[idx(p, q)].clone()
        } else {
            S::zero()
        }
    }

    pub fn set_coeff(&mut self, p: usize, q: usize, v: S) {
        assert!(p + q <= self.order);
        self.c[idx(p, q)] = v;
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        let order = self.order;
        (0..=order).flat_map(move |d| (0..=d).map(move |q| (d - q, q, &self.c[idx(d - q, q)])))
    }

    /// Truncate to a lower order (identity when already at or below it).
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Jet::zero(order);
        for d in 0..=order {
            for q in 0..=d {
                out.c[idx(d - q, q)] = self.c[idx(d - q, q)].clone();
            }
        }
        out
    }

    fn binop(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = Jet::zero(order);
        for d in 0..=order {
            for q in 0..=d {
                let k = idx(d - q, q);
                out.c[k] = f(&self.c[k], &rhs.c[k]);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        Jet {
            order: self.order,
            c: self.c.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Jet {
            order: self.order,
            c: self.c.iter().map(|a| a.mul(s)).collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out: Jet<S> = Jet::zero(order);
        for d1 in 0..=order {
            for q1 in 0..=d1 {
                let a = &self.c[idx(d1 - q1, q1)];
                if a.is_zero() {
                    continue;
                }
                for d2 in 0..=(order - d1) {
                    for q2 in 0..=d2 {
                        let b = &rhs.c[idx(d2 - q2, q2)];
                        if b.is_zero() {
                            continue;
                        }
                        let k = idx(d1 - q1 + d2 - q2, q1 + q2);
                        out.c[k] = out.c[k].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    /// ∂/∂z; lowers the order by one.
    pub fn dz(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(G2Error::OrderExhausted);
        }
        let order = self.order - 1;
        let mut out = Jet::zero(order);
        for d in 0..=order {
            for q in 0..=d {
                let p = d - q;
                out.c[idx(p, q)] = self.c[idx(p + 1, q)].scale_int((p + 1) as i64);
            }
        }
        Ok(out)
    }

    /// ∂/∂z̄; lowers the order by one.
    pub fn dzbar(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(G2Error::OrderExhausted);
        }
        let order = self.order - 1;
        let mut out = Jet::zero(order);
        for d in 0..=order {
            for q in 0..=d {
                let p = d - q;
                out.c[idx(p, q)] = self.c[idx(p, q + 1)].scale_int((q + 1) as i64);
            }
        }
        Ok(out)
    }

    /// Complex conjugate of the function: swaps (p,q), conjugates c_{pq}.
    pub fn conj(&self) -> Self {
        let mut out = Jet::zero(self.order);
        for d in 0..=self.order {
            for q in 0..=d {
                out.c[idx(q, d - q)] = self.c[idx(d - q, q)].conj();
            }
        }
        out
    }

    /// Value at the base point.
    pub fn eval0(&self) -> S {
        self.c[0].clone()
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.c.iter().all(|a| a.is_zero_tol(tol))
    }

    /// Largest coefficient magnitude; the residual norm used in checks.
    pub fn max_mag(&self) -> f64 {
        self.c.iter().map(|a| a.mag()).fold(0.0, f64::max)
    }

    /// True when the constant term is invertible, i.e. the jet is a unit.
    pub fn is_unit(&self, tol: f64) -> bool {
        !self.c[0].is_zero_tol(tol)
    }

    /// Multiplicative inverse; requires a unit.  Newton iteration
    /// x ← x(2 − ax) doubles the valid order each step.
    pub fn inv(&self, tol: f64) -> Result<Self> {
        let c0 = self.eval0();
        if c0.is_zero_tol(tol) {
            return Err(G2Error::GramSingular);
        }
        let mut x = Jet::constant(self.order, c0.inv().expect("nonzero constant term"));
        let two = Jet::constant(self.order, S::from_int(2));
        let mut valid = 1usize;
        while valid <= self.order {
            x = x.mul(&two.sub(&self.mul(&x)));
            valid *= 2;
        }
        Ok(x)
    }

    pub fn div(&self, rhs: &Self, tol: f64) -> Result<Self> {
        Ok(self.mul(&rhs.inv(tol)?))
    }

    /// Square root with value √c₀₀ at the base point (float backend only).
    pub fn sqrt(&self, tol: f64) -> Result<Self> {
        if S::exact() {
            return Err(G2Error::Unsupported(
                "jet square root needs the float backend".into(),
            ));
        }
        let c0 = self.eval0().to_c64();
        if c0.norm() < tol {
            return Err(G2Error::GramSingular);
        }
        // Newton: x ← (x + a/x)/2
        let r = c0.sqrt();
        let mut x = Jet::constant(self.order, S::from_f64_parts(r.re, r.im));
        let half = S::from_ratio(1, 2);
        let steps = (self.order.max(1)).ilog2() as usize + 2;
        for _ in 0..steps {
            x = x.add(&self.div(&x, tol)?).scale(&half);
        }
        Ok(x)
    }

    /// Jet of exp(μ z + ν z̄): coefficients μ^p ν^q / (p! q!).
    pub fn exp_linear(mu: &S, nu: &S, order: usize) -> Self {
        let mut out = Jet::zero(order);
        let mut mu_pow = vec![S::one()];
        let mut nu_pow = vec![S::one()];
        for k in 1..=order {
            mu_pow.push(mu_pow[k - 1].mul(mu));
            nu_pow.push(nu_pow[k - 1].mul(nu));
        }
        let mut fact = vec![S::one()];
        for k in 1..=order {
            fact.push(fact[k - 1].scale_int(k as i64));
        }
        for d in 0..=order {
            for q in 0..=d {
                let p = d - q;
                let denom = fact[p].mul(&fact[q]).inv().expect("factorial nonzero");
                out.c[idx(p, q)] = mu_pow[p].mul(&nu_pow[q]).mul(&denom);
            }
        }
        out
    }
}

/// A section of the trivial ℂ⁷ bundle near the base point: seven jets of
/// one common order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetVec7<S: Scalar> {
    pub c: [Jet<S>; 7],
}

impl<S: Scalar> JetVec7<S> {
    pub fn zero(order: usize) -> Self {
        JetVec7 {
            c: std::array::from_fn(|_| Jet::zero(order)),
        }
    }

    pub fn order(&self) -> usize {
        self.c.iter().map(|j| j.order()).min().unwrap()
    }

    /// Constant section from a fixed vector.
    pub fn constant(v: &Vec7<S>, order: usize) -> Self {
        JetVec7 {
            c: std::array::from_fn(|k| Jet::constant(order, v.c[k].clone())),
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize) -> Jet<S>) -> Self {
        JetVec7 {
            c: std::array::from_fn(f),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        JetVec7::from_fn(|k| self.c[k].add(&rhs.c[k]))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        JetVec7::from_fn(|k| self.c[k].sub(&rhs.c[k]))
    }

    pub fn neg(&self) -> Self {
        JetVec7::from_fn(|k| self.c[k].neg())
    }

    pub fn scale(&self, s: &Jet<S>) -> Self {
        JetVec7::from_fn(|k| self.c[k].mul(s))
    }

    pub fn conj(&self) -> Self {
        JetVec7::from_fn(|k| self.c[k].conj())
    }

    pub fn dz(&self) -> Result<Self> {
        let parts: Result<Vec<_>> = self.c.iter().map(|j| j.dz()).collect();
        let parts = parts?;
        Ok(JetVec7::from_fn(|k| parts[k].clone()))
    }

    pub fn dzbar(&self) -> Result<Self> {
        let parts: Result<Vec<_>> = self.c.iter().map(|j| j.dzbar()).collect();
        let parts = parts?;
        Ok(JetVec7::from_fn(|k| parts[k].clone()))
    }

    pub fn truncate(&self, order: usize) -> Self {
        JetVec7::from_fn(|k| self.c[k].truncate(order))
    }

    /// Pointwise cross product, coefficient-wise in the jet ring.
    pub fn cross(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut out = JetVec7::zero(order);
        for &(i, j, k, s) in crate::octonion::cross_table() {
            let t = self.c[i].mul(&rhs.c[j]);
            let t = if s < 0 { t.neg() } else { t };
            out.c[k] = out.c[k].add(&t);
        }
        out
    }

    /// Bilinear (u, v) in the jet ring.
    pub fn dot(&self, rhs: &Self) -> Jet<S> {
        let order = self.order().min(rhs.order());
        let mut acc = Jet::zero(order);
        for k in 0..7 {
            acc = acc.add(&self.c[k].mul(&rhs.c[k]));
        }
        acc
    }

    /// Hermitian (u, v̄) in the jet ring.
    pub fn herm(&self, rhs: &Self) -> Jet<S> {
        let order = self.order().min(rhs.order());
        let mut acc = Jet::zero(order);
        for k in 0..7 {
            acc = acc.add(&self.c[k].mul(&rhs.c[k].conj()));
        }
        acc
    }

    pub fn eval0(&self) -> Vec7<S> {
        Vec7 {
            c: std::array::from_fn(|k| self.c[k].eval0()),
        }
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.c.iter().all(|j| j.is_zero_tol(tol))
    }

    pub fn max_mag(&self) -> f64 {
        self.c.iter().map(|j| j.max_mag()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn rand_jet(seed: u64, order: usize) -> Jet<Gq> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut j = Jet::zero(order);
        for d in 0..=order {
            for q in 0..=d {
                j.set_coeff(d - q, q, Gq::random(&mut rng));
            }
        }
        j
    }

    #[test]
    fn dz_of_z_zbar() {
        let z = Jet::<Gq>::var_z(3);
        let zb = Jet::<Gq>::var_zbar(3);
        let prod = z.mul(&zb);
        assert_eq!(prod.dz().unwrap(), zb.truncate(2));
        assert_eq!(z.mul(&z).dzbar().unwrap(), Jet::zero(2));
    }

    #[test]
    fn derivative_of_order_zero_fails() {
        assert!(Jet::<Gq>::one(0).dz().is_err());
    }

    #[test]
    fn mixed_partials_commute() {
        let j = rand_jet(3, 5);
        assert_eq!(
            j.dz().unwrap().dzbar().unwrap(),
            j.dzbar().unwrap().dz().unwrap()
        );
    }

    #[test]
    fn conj_intertwines_derivatives() {
        let j = rand_jet(4, 5);
        assert_eq!(j.conj().dz().unwrap(), j.dzbar().unwrap().conj());
    }

    #[test]
    fn inverse_is_exact() {
        let mut j = rand_jet(5, 6);
        j.set_coeff(0, 0, Gq::from_ratio(3, 2));
        let inv = j.inv(0.0).unwrap();
        assert_eq!(j.mul(&inv), Jet::one(6));
    }

    #[test]
    fn exp_linear_matches_taylor() {
        let mu = Gq::from_ratio(2, 3);
        let nu = Gq::i();
        let e = Jet::<Gq>::exp_linear(&mu, &nu, 4);
        assert_eq!(e.coeff(0, 0), Gq::one());
        assert_eq!(e.coeff(1, 0), mu);
        assert_eq!(e.coeff(0, 1), nu);
        // c_{21} = μ²ν/2
        assert_eq!(e.coeff(2, 1), mu.mul(&mu).mul(&nu).mul(&Gq::from_ratio(1, 2)));
        // ∂_z exp = μ exp
        assert_eq!(e.dz().unwrap(), e.scale(&mu).truncate(3));
    }

    #[test]
    fn jet_sqrt_squares_back() {
        let mut j = Jet::<Complex64>::one(6);
        j.set_coeff(1, 0, Complex64::new(0.3, 0.1));
        j.set_coeff(1, 1, Complex64::new(-0.2, 0.4));
        let r = j.sqrt(1e-12).unwrap();
        assert!(r.mul(&r).sub(&j).max_mag() < 1e-12);
    }

    proptest! {
        #[test]
        fn leibniz_rule(sa in 0u64..1000, sb in 0u64..1000) {
            let a = rand_jet(sa, 4);
            let b = rand_jet(sb.wrapping_add(7777), 4);
            let lhs = a.mul(&b).dz().unwrap();
            let rhs = a.dz().unwrap().mul(&b.truncate(3)).add(&a.truncate(3).mul(&b.dz().unwrap()));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conj_is_ring_antihomomorphism(sa in 0u64..1000, sb in 0u64..1000) {
            let a = rand_jet(sa.wrapping_add(31), 4);
            let b = rand_jet(sb.wrapping_add(97), 4);
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            prop_assert_eq!(a.conj().conj(), a);
        }
    }
}
