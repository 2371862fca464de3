//! Polynomial extended solutions and their Grassmannian models.
//!
//! A loop is a Laurent polynomial in λ with 7×7 jet-matrix coefficients,
//! unitary on the circle.  Its model W = ΦH₊ is handled through the
//! finite window λ^{−s}H₊ / λ^{s+1}H₊, where every question this module
//! asks — reality W̄⊥ = λW, closure under the vector product, the legs of
//! W/λW and the canonical lift — reduces to jet linear algebra.

use crate::bundles::JetSubbundle;
use crate::error::{G2Error, Result};
use crate::jet::{Jet, JetVec7};
use crate::linalg::{self, JetMat};
use crate::scalar::Scalar;
use crate::twistor::Flag;
use crate::vec7::Vec7;
use num_complex::Complex64;

/// λ-graded vector: components at consecutive λ-degrees.
#[derive(Clone, Debug)]
pub struct LambdaVec<S: Scalar> {
    pub min_deg: i32,
    pub comps: Vec<JetVec7<S>>,
}

impl<S: Scalar> LambdaVec<S> {
    pub fn single(deg: i32, v: JetVec7<S>) -> Self {
        LambdaVec {
            min_deg: deg,
            comps: vec![v],
        }
    }

    pub fn comp(&self, deg: i32) -> Option<&JetVec7<S>> {
        let k = deg - self.min_deg;
        (0..self.comps.len() as i32)
            .contains(&k)
            .then(|| &self.comps[k as usize])
    }

    pub fn shift(&self, by: i32) -> Self {
        LambdaVec {
            min_deg: self.min_deg + by,
            comps: self.comps.clone(),
        }
    }

    /// Restrict to degrees lo..=hi, dropping the rest.
    pub fn window(&self, lo: i32, hi: i32, order: usize) -> Self {
        let comps = (lo..=hi)
            .map(|d| {
                self.comp(d)
                    .map(|v| v.truncate(order))
                    .unwrap_or_else(|| JetVec7::zero(order))
            })
            .collect();
        LambdaVec {
            min_deg: lo,
            comps,
        }
    }

    pub fn flatten(&self, lo: i32, hi: i32, order: usize) -> Vec<Jet<S>> {
        let mut out = Vec::with_capacity(7 * (hi - lo + 1) as usize);
        for d in lo..=hi {
            match self.comp(d) {
                Some(v) => out.extend(v.c.iter().map(|j| j.truncate(order))),
                None => out.extend((0..7).map(|_| Jet::zero(order))),
            }
        }
        out
    }

    pub fn from_flat(row: &[Jet<S>], lo: i32) -> Self {
        let comps = row
            .chunks(7)
            .map(|c| JetVec7::from_fn(|k| c[k].clone()))
            .collect();
        LambdaVec {
            min_deg: lo,
            comps,
        }
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.comps.iter().all(|v| v.is_zero_tol(tol))
    }

    /// Conjugation in the loop space: λ^k v ↦ λ^{−k} v̄.
    pub fn sigma(&self) -> Self {
        let hi = self.min_deg + self.comps.len() as i32 - 1;
        LambdaVec {
            min_deg: -hi,
            comps: self.comps.iter().rev().map(|v| v.conj()).collect(),
        }
    }
}

/// Laurent-polynomial loop with jet-matrix coefficients.
#[derive(Clone, Debug)]
pub struct MatrixLoop<S: Scalar> {
    min_deg: i32,
    coeffs: Vec<JetMat<S>>,
}

fn projection_matrix<S: Scalar>(b: &JetSubbundle<S>, order: usize, tol: f64) -> Result<JetMat<S>> {
    let mut m = JetMat::zero(7, 7, order);
    for j in 0..7 {
        let ej = JetVec7::constant(&Vec7::basis(j + 1), order);
        let p = b.project(&ej, tol)?;
        for k in 0..7 {
            *m.at_mut(k, j) = p.c[k].truncate(order.min(p.order()));
        }
    }
    Ok(m)
}

impl<S: Scalar> MatrixLoop<S> {
    pub fn identity(order: usize) -> Self {
        MatrixLoop {
            min_deg: 0,
            coeffs: vec![JetMat::identity(7, order)],
        }
    }

    pub fn from_coeffs(min_deg: i32, coeffs: Vec<JetMat<S>>, tol: f64) -> Self {
        let mut lo = min_deg;
        let mut cs = coeffs;
        while cs.len() > 1 && cs.first().map(|c| c.is_zero_tol(tol)).unwrap_or(false) {
            cs.remove(0);
            lo += 1;
        }
        while cs.len() > 1 && cs.last().map(|c| c.is_zero_tol(tol)).unwrap_or(false) {
            cs.pop();
        }
        MatrixLoop {
            min_deg: lo,
            coeffs: cs,
        }
    }

    pub fn min_deg(&self) -> i32 {
        self.min_deg
    }

    pub fn max_deg(&self) -> i32 {
        self.min_deg + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, deg: i32) -> Option<&JetMat<S>> {
        let k = deg - self.min_deg;
        (0..self.coeffs.len() as i32)
            .contains(&k)
            .then(|| &self.coeffs[k as usize])
    }

    pub fn order(&self) -> usize {
        self.coeffs.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    /// The real-pair uniton factor λ⁻¹π_α + π_{(α⊕ᾱ)⊥} + λπ_ᾱ.
    pub fn uniton_factor_real_pair(alpha: &JetSubbundle<S>, tol: f64) -> Result<Self> {
        if alpha.rank() == 0 {
            return Ok(MatrixLoop::identity(4));
        }
        let order = alpha.order();
        let bar = alpha.conj();
        for u in alpha.sections() {
            for v in bar.sections() {
                if !u.herm(v).is_zero_tol(tol.max(1e-9)) {
                    return Err(G2Error::NonOrthogonalPair);
                }
            }
        }
        let pa = projection_matrix(alpha, order, tol)?;
        let pb = projection_matrix(&bar, order, tol)?;
        let mid = JetMat::identity(7, order).sub(&pa).sub(&pb);
        Ok(MatrixLoop {
            min_deg: -1,
            coeffs: vec![pa, mid, pb],
        })
    }

    /// The plain uniton factor π_{α⊥} + λπ_α.
    pub fn uniton_factor(alpha: &JetSubbundle<S>, tol: f64) -> Result<Self> {
        let order = alpha.order();
        let pa = projection_matrix(alpha, order, tol)?;
        let perp = JetMat::identity(7, order).sub(&pa);
        Ok(MatrixLoop {
            min_deg: 0,
            coeffs: vec![perp, pa],
        })
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let lo = self.min_deg + rhs.min_deg;
        let len = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut out = vec![JetMat::zero(7, 7, order); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        MatrixLoop {
            min_deg: lo,
            coeffs: out,
        }
    }

    /// Adjoint loop Φ* (= Φ⁻¹ for loops unitary on the circle).
    pub fn adjoint(&self) -> Self {
        MatrixLoop {
            min_deg: -self.max_deg(),
            coeffs: self.coeffs.iter().rev().map(|c| c.adjoint()).collect(),
        }
    }

    pub fn apply(&self, v: &LambdaVec<S>) -> LambdaVec<S> {
        let order = self.order();
        let lo = self.min_deg + v.min_deg;
        let len = self.coeffs.len() + v.comps.len() - 1;
        let mut out = vec![JetVec7::zero(order); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, x) in v.comps.iter().enumerate() {
                let ax = a.mul_vec(&x.c.to_vec());
                let cur = &out[i + j];
                out[i + j] = cur.add(&JetVec7::from_fn(|k| ax[k].clone()));
            }
        }
        LambdaVec {
            min_deg: lo,
            comps: out,
        }
    }

    /// Σ (±1)^k A_k, the evaluation at λ = −1.
    pub fn eval_minus_one(&self) -> JetMat<S> {
        let order = self.order();
        let mut acc = JetMat::zero(7, 7, order);
        for (k, c) in self.coeffs.iter().enumerate() {
            let deg = self.min_deg + k as i32;
            if deg.rem_euclid(2) == 0 {
                acc = acc.add(c);
            } else {
                acc = acc.sub(c);
            }
        }
        acc
    }

    pub fn eval_one(&self) -> JetMat<S> {
        let order = self.order();
        let mut acc = JetMat::zero(7, 7, order);
        for c in &self.coeffs {
            acc = acc.add(c);
        }
        acc
    }

    /// Right-multiply by a constant (λ-free) jet matrix.
    pub fn mul_const(&self, u: &JetMat<S>) -> Self {
        MatrixLoop {
            min_deg: self.min_deg,
            coeffs: self.coeffs.iter().map(|c| c.mul(u)).collect(),
        }
    }

    /// Max |Φ(λ)*Φ(λ) − I| at the base point over the given number of
    /// roots of unity.
    pub fn unitarity_residual(&self, samples: usize) -> f64 {
        let mut res: f64 = 0.0;
        for t in 0..samples {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / samples as f64;
            let lam = Complex64::new(theta.cos(), theta.sin());
            let mut m = [[Complex64::new(0.0, 0.0); 7]; 7];
            for (k, c) in self.coeffs.iter().enumerate() {
                let w = lam.powi(self.min_deg + k as i32);
                for r in 0..7 {
                    for cc in 0..7 {
                        m[r][cc] += w * c.at(r, cc).eval0().to_c64();
                    }
                }
            }
            for r in 0..7 {
                for cc in 0..7 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..7 {
                        acc += m[k][r].conj() * m[k][cc];
                    }
                    let expect = if r == cc { 1.0 } else { 0.0 };
                    res = res.max((acc - expect).norm());
                }
            }
        }
        res
    }

    /// |Φ(1) − I| at the base point.
    pub fn based_residual(&self) -> f64 {
        self.eval_one()
            .sub(&JetMat::identity(7, self.order()))
            .map(|j| Jet::constant(0, j.eval0()))
            .max_mag()
    }

    /// Loop columns as λ-graded vectors.
    pub fn columns(&self) -> Vec<LambdaVec<S>> {
        (0..7)
            .map(|j| {
                let comps = self
                    .coeffs
                    .iter()
                    .map(|c| JetVec7::from_fn(|k| c.at(k, j).clone()))
                    .collect();
                LambdaVec {
                    min_deg: self.min_deg,
                    comps,
                }
            })
            .collect()
    }
}

/// The Grassmannian model W = ΦH₊ in its finite window.
#[derive(Clone, Debug)]
pub struct GrassModel<S: Scalar> {
    pub s: i32,
    gens: Vec<LambdaVec<S>>,
    phi_inv: MatrixLoop<S>,
    order: usize,
}

/// Build the model of a loop; `s` is the least width with
/// λ^s H₊ ⊆ W ⊆ λ^{−s} H₊.
pub fn grassmannian_model<S: Scalar>(phi: &MatrixLoop<S>, tol: f64) -> Result<GrassModel<S>> {
    let s = (-phi.min_deg()).max(phi.max_deg()).max(1);
    let model = GrassModel {
        s,
        gens: phi.columns(),
        phi_inv: phi.adjoint(),
        order: phi.order(),
    };
    // tighten: the containments may hold for a smaller width
    for smaller in 1..s {
        if model.contains_lambda_power(smaller, tol).unwrap_or(false)
            && phi.min_deg() >= -smaller
        {
            return Ok(GrassModel {
                s: smaller,
                ..model
            });
        }
    }
    Ok(model)
}

impl<S: Scalar> GrassModel<S> {
    /// ℂ-basis of W / λ^{s+1}H₊ in the window of levels −s..=s, in
    /// leading-level echelon form.
    pub fn window_basis(&self, tol: f64) -> Result<Vec<LambdaVec<S>>> {
        let mut rows = Vec::new();
        for g in &self.gens {
            let top = self.s - g.min_deg;
            for k in 0..=top.max(0) {
                let sh = g.shift(k).window(-self.s, self.s, self.order);
                if !sh.is_zero_tol(tol) {
                    rows.push(sh.flatten(-self.s, self.s, self.order));
                }
            }
        }
        for j in 1..=7 {
            let v = JetVec7::constant(&Vec7::basis(j), self.order);
            rows.push(LambdaVec::single(self.s, v).flatten(-self.s, self.s, self.order));
        }
        let ech = linalg::rref_blocked(&JetMat::from_rows(rows), tol, 7)?;
        Ok(ech
            .rows
            .iter()
            .map(|r| LambdaVec::from_flat(r, -self.s))
            .collect())
    }

    /// ℂ-basis of λW in the same window.
    pub fn lambda_window_basis(&self, tol: f64) -> Result<Vec<LambdaVec<S>>> {
        let mut rows = Vec::new();
        for g in &self.gens {
            let top = self.s - g.min_deg;
            for k in 1..=top.max(1) {
                let sh = g.shift(k).window(-self.s, self.s, self.order);
                if !sh.is_zero_tol(tol) {
                    rows.push(sh.flatten(-self.s, self.s, self.order));
                }
            }
        }
        let ech = linalg::rref_blocked(&JetMat::from_rows(rows), tol, 7)?;
        Ok(ech
            .rows
            .iter()
            .map(|r| LambdaVec::from_flat(r, -self.s))
            .collect())
    }

    /// Does W contain λ^k H₊ (tested in the window)?
    pub fn contains_lambda_power(&self, k: i32, tol: f64) -> Result<bool> {
        let basis = self.window_basis(tol)?;
        let rows: Vec<Vec<Jet<S>>> = basis
            .iter()
            .map(|b| b.flatten(-self.s, self.s, self.order))
            .collect();
        for j in 1..=7 {
            let v = LambdaVec::single(k, JetVec7::constant(&Vec7::basis(j), self.order));
            let flat = v.flatten(-self.s, self.s, self.order);
            if !linalg::in_span_at_base(&rows, &flat, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Is W ⊆ λ^{−k}H₊ (no components below level −k)?
    pub fn within_lambda_power(&self, k: i32, tol: f64) -> bool {
        self.gens.iter().all(|g| {
            (g.min_deg..-k)
                .all(|d| g.comp(d).map(|v| v.is_zero_tol(tol)).unwrap_or(true))
        })
    }

    /// Residual of the reality condition W̄⊥ = λW: the symmetric pairing
    /// B(x,y) = Σ_{i+j=−1}(x_i, y_j) on W, plus the dimension count.
    pub fn reality_residual(&self, tol: f64) -> Result<f64> {
        let basis = self.window_basis(tol)?;
        if basis.len() != 7 * (self.s as usize + 1) {
            return Ok(f64::INFINITY);
        }
        let mut res: f64 = 0.0;
        for (a, x) in basis.iter().enumerate() {
            for y in &basis[a..] {
                let mut acc = Jet::zero(self.order);
                for i in -self.s..=self.s {
                    let j = -1 - i;
                    if let (Some(xi), Some(yj)) = (x.comp(i), y.comp(j)) {
                        acc = acc.add(&xi.dot(yj));
                    }
                }
                res = res.max(acc.max_mag());
            }
        }
        Ok(res)
    }

    pub fn check_real_form(&self, tol: f64) -> Result<bool> {
        Ok(self.reality_residual(tol)? < tol.max(1e-30))
    }

    /// Residual of closure under the λ-graded vector product.
    pub fn closure_residual(&self, tol: f64) -> Result<f64> {
        let basis = self.window_basis(tol)?;
        let rows: Vec<Vec<Jet<S>>> = basis
            .iter()
            .map(|b| b.flatten(-self.s, self.s, self.order))
            .collect();
        let mut res: f64 = 0.0;
        for (a, x) in basis.iter().enumerate() {
            for y in &basis[a..] {
                // product components per total degree
                let lo = x.min_deg + y.min_deg;
                let hi = 2 * self.s;
                let mut prod = vec![JetVec7::zero(self.order); (hi - lo + 1) as usize];
                for i in -self.s..=self.s {
                    for j in -self.s..=self.s {
                        if let (Some(xi), Some(yj)) = (x.comp(i), y.comp(j)) {
                            let k = (i + j - lo) as usize;
                            if i + j <= hi {
                                prod[k] = prod[k].add(&xi.cross(yj));
                            }
                        }
                    }
                }
                let pv = LambdaVec {
                    min_deg: lo,
                    comps: prod,
                };
                // levels below −s must vanish outright
                for d in lo..-self.s {
                    if let Some(v) = pv.comp(d) {
                        res = res.max(v.eval0().mag());
                    }
                }
                // the window part must lie in W (levels ≥ s are free)
                let flat = pv.window(-self.s, self.s, self.order).flatten(
                    -self.s,
                    self.s,
                    self.order,
                );
                res = res.max(linalg::residual_at_base(&rows, &flat, tol));
            }
        }
        Ok(res)
    }

    pub fn check_vector_closure(&self, tol: f64) -> Result<bool> {
        Ok(self.closure_residual(tol)? < tol.max(1e-30))
    }

    /// Is the model λ-homogeneous (each level of each basis vector lies
    /// in W separately)?  Equivalent to S¹-invariance of the loop.
    pub fn is_s1_invariant(&self, tol: f64) -> Result<bool> {
        let basis = self.window_basis(tol)?;
        let rows: Vec<Vec<Jet<S>>> = basis
            .iter()
            .map(|b| b.flatten(-self.s, self.s, self.order))
            .collect();
        for b in &basis {
            for d in -self.s..=self.s {
                if let Some(v) = b.comp(d) {
                    if v.is_zero_tol(tol) {
                        continue;
                    }
                    let single = LambdaVec::single(d, v.clone());
                    let flat = single.flatten(-self.s, self.s, self.order);
                    if !linalg::in_span_at_base(&rows, &flat, tol) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The legs A_i of W/λW and the canonical lift ψ_i = Φ⁻¹(A_i).
    pub fn legs(&self, tol: f64) -> Result<Flag<S>> {
        let full = self.window_basis(tol)?;
        let lam = self.lambda_window_basis(tol)?;
        if full.len() != 7 * (self.s as usize + 1) || lam.len() != 7 * self.s as usize {
            return Err(G2Error::RankDrop);
        }
        let lam_flat: Vec<Vec<Jet<S>>> = lam
            .iter()
            .map(|b| b.flatten(-self.s, self.s, self.order))
            .collect();
        let lam_ech = linalg::rref_blocked(&JetMat::from_rows(lam_flat), tol, 7)?;
        // clear the λW pivot positions out of the W basis, then the
        // leading level of each survivor is the filtration level of its
        // coset in W/λW
        let cleared: Vec<Vec<Jet<S>>> = full
            .iter()
            .map(|b| {
                let mut row = b.flatten(-self.s, self.s, self.order);
                for (lrow, &pc) in lam_ech.rows.iter().zip(lam_ech.pivots.iter()) {
                    let factor = row[pc].clone();
                    if factor.is_zero_tol(tol) {
                        continue;
                    }
                    for (x, p) in row.iter_mut().zip(lrow.iter()) {
                        *x = x.sub(&factor.mul(p));
                    }
                }
                row
            })
            .collect();
        let full_ech = linalg::rref_blocked(&JetMat::from_rows(cleared), tol, 7)?;
        if full_ech.rows.len() != 7 {
            return Err(G2Error::RankDrop);
        }
        let mut leg_sections: Vec<Vec<JetVec7<S>>> =
            vec![Vec::new(); (2 * self.s + 1) as usize];
        for (row, &pc) in full_ech.rows.iter().zip(full_ech.pivots.iter()) {
            let level = (pc / 7) as i32 - self.s;
            let rep = LambdaVec::from_flat(row, -self.s);
            // ψ_i = λ⁰-coefficient of Φ⁻¹(rep)
            let pulled = self.phi_inv.apply(&rep);
            let psi = pulled
                .comp(0)
                .cloned()
                .unwrap_or_else(|| JetVec7::zero(self.order));
            // the pullback must land in H₊
            for d in pulled.min_deg..0 {
                if let Some(v) = pulled.comp(d) {
                    if v.eval0().mag() > tol.max(1e-8) {
                        return Err(G2Error::Precondition(
                            "canonical-lift representative escapes H+".into(),
                        ));
                    }
                }
            }
            leg_sections[(level + self.s) as usize].push(psi);
        }
        // the pulled-back filtration V_i = Φ⁻¹(W ∩ λ^iH₊ …) decreases in
        // i; the flag legs are its orthogonal complements V_i ⊖ V_{i+1}
        let mut legs: Vec<JetSubbundle<S>> = Vec::new();
        let mut upper = JetSubbundle::zero();
        for secs in leg_sections.into_iter().rev() {
            let mut span = upper.sections().to_vec();
            span.extend(secs);
            let v_i = JetSubbundle::from_sections(span, tol)?;
            legs.push(v_i.ominus(&upper, tol)?);
            upper = v_i;
        }
        legs.reverse();
        Flag::new(self.s, legs)
    }
}

/// Degree span of λ^sΦ, together with exactness: exact when the lowest
/// coefficient is full (its jet image spans ℂ⁷), otherwise a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitonNumber {
    pub value: u32,
    pub exact: bool,
}

pub fn uniton_number<S: Scalar>(phi: &MatrixLoop<S>, tol: f64) -> Result<UnitonNumber> {
    let value = (phi.max_deg() - phi.min_deg()) as u32;
    let t0 = phi
        .coeff(phi.min_deg())
        .ok_or_else(|| G2Error::Input("empty loop".into()))?;
    // jet span of the image columns and their derivatives
    let mut sections: Vec<JetVec7<S>> = (0..7)
        .map(|j| JetVec7::from_fn(|k| t0.at(k, j).clone()))
        .collect();
    let mut layer = sections.clone();
    for _ in 0..6 {
        layer = layer
            .iter()
            .filter(|v| v.order() > 0)
            .map(|v| v.dz())
            .collect::<Result<Vec<_>>>()?;
        sections.extend(layer.iter().cloned());
        if layer.is_empty() {
            break;
        }
    }
    let rows: Vec<Vec<Jet<S>>> = sections.iter().map(|s| s.c.to_vec()).collect();
    let rank = linalg::span_reduce(&rows, tol).map(|e| e.len()).unwrap_or(0);
    Ok(UnitonNumber {
        value,
        exact: rank == 7,
    })
}

/// The harmonic map of an extended solution: the even-leg projection of
/// the canonical lift.
pub fn harmonic_map_of<S: Scalar>(phi: &MatrixLoop<S>, tol: f64) -> Result<JetSubbundle<S>> {
    let model = grassmannian_model(phi, tol)?;
    model.legs(tol)?.project(tol)
}

/// Cross-check of the Cartan-embedding convention on S¹-invariant
/// fixtures: |(I + Φ(−1))/2 − π_φ| at the base point.
pub fn cartan_cross_check<S: Scalar>(
    phi: &MatrixLoop<S>,
    bundle: &JetSubbundle<S>,
    tol: f64,
) -> Result<f64> {
    let order = phi.order();
    let e = phi.eval_minus_one();
    let p = projection_matrix(bundle, order, tol)?;
    let two_p = p.add(&p);
    let diff = JetMat::identity(7, order).add(&e).sub(&two_p);
    Ok(diff.map(|j| Jet::constant(0, j.eval0())).max_mag())
}

/// Gram–Schmidt in the loop's Hermitian geometry: an orthonormal basis
/// of W ⊖ λW gives the columns of a unitary polynomial loop with model
/// W.  Float backend (jet square roots).
pub fn loop_from_window<S: Scalar>(
    s: i32,
    window: &[LambdaVec<S>],
    lambda_window: &[LambdaVec<S>],
    order: usize,
    tol: f64,
) -> Result<MatrixLoop<S>> {
    let herm = |x: &LambdaVec<S>, y: &LambdaVec<S>| -> Jet<S> {
        let mut acc = Jet::zero(order);
        for d in -s..=s {
            if let (Some(xd), Some(yd)) = (x.comp(d), y.comp(d)) {
                acc = acc.add(&xd.herm(yd));
            }
        }
        acc
    };
    let mut ortho: Vec<LambdaVec<S>> = Vec::new();
    let mut push_gs = |v: &LambdaVec<S>, ortho: &mut Vec<LambdaVec<S>>| -> Result<Option<LambdaVec<S>>> {
        let mut w = v.window(-s, s, order);
        for u in ortho.iter() {
            let c = herm(&w, u);
            let mut shifted = u.clone();
            for comp in shifted.comps.iter_mut() {
                *comp = comp.scale(&c).neg();
            }
            // w ← w − c·u
            let lo = w.min_deg.min(shifted.min_deg);
            let hi = (w.min_deg + w.comps.len() as i32 - 1)
                .max(shifted.min_deg + shifted.comps.len() as i32 - 1);
            let mut comps = Vec::new();
            for d in lo..=hi {
                let a = w.comp(d).cloned().unwrap_or_else(|| JetVec7::zero(order));
                let b = shifted
                    .comp(d)
                    .cloned()
                    .unwrap_or_else(|| JetVec7::zero(order));
                comps.push(a.add(&b));
            }
            w = LambdaVec { min_deg: lo, comps };
        }
        let n = herm(&w, &w);
        if n.eval0().mag() < tol {
            return Ok(None);
        }
        let scale = n.sqrt(tol)?.inv(tol)?;
        for comp in w.comps.iter_mut() {
            *comp = comp.scale(&scale);
        }
        ortho.push(w.clone());
        Ok(Some(w))
    };
    for v in lambda_window {
        push_gs(v, &mut ortho)?;
    }
    let fixed = ortho.len();
    let mut columns = Vec::new();
    for v in window {
        if columns.len() == 7 {
            break;
        }
        if let Some(u) = push_gs(v, &mut ortho)? {
            columns.push(u);
        }
    }
    let _ = fixed;
    if columns.len() != 7 {
        return Err(G2Error::RankDrop);
    }
    let mut coeffs = vec![JetMat::zero(7, 7, order); (2 * s + 1) as usize];
    for (j, col) in columns.iter().enumerate() {
        for d in -s..=s {
            if let Some(v) = col.comp(d) {
                for k in 0..7 {
                    *coeffs[(d + s) as usize].at_mut(k, j) = v.c[k].clone();
                }
            }
        }
    }
    let raw = MatrixLoop::from_coeffs(-s, coeffs, tol);
    // normalize to a based loop
    let u0 = raw.eval_one().adjoint();
    Ok(raw.mul_const(&u0))
}

impl<S: Scalar> MatrixLoop<S> {
    /// Drop near-zero extreme coefficients.
    pub fn trimmed(&self, tol: f64) -> Self {
        MatrixLoop::from_coeffs(self.min_deg, self.coeffs.clone(), tol)
    }
}

/// Peel the alternating factorization Φ = F_{γ_k} ⋯ F_{γ_1} of real-pair
/// uniton factors, right factor first: each step takes the image of the
/// top coefficient of Φ⁻¹ and divides it off.  Returns the unitons in
/// peel order (the last Uhlenbeck uniton first).
pub fn alternating_factorization<S: Scalar>(
    phi: &MatrixLoop<S>,
    tol: f64,
) -> Result<Vec<JetSubbundle<S>>> {
    let mut cur = phi.trimmed(tol);
    let mut unitons = Vec::new();
    let mut guard = 0;
    while cur.max_deg() - cur.min_deg() > 0 {
        guard += 1;
        if guard > 8 {
            return Err(G2Error::Precondition(
                "factorization does not terminate".into(),
            ));
        }
        let inv = cur.adjoint();
        let s0 = inv
            .coeff(inv.max_deg())
            .ok_or_else(|| G2Error::Input("empty loop".into()))?;
        let cols: Vec<JetVec7<S>> = (0..7)
            .map(|j| JetVec7::from_fn(|k| s0.at(k, j).clone()))
            .collect();
        let gamma = JetSubbundle::from_sections(cols, tol)?;
        if gamma.rank() == 0 {
            return Err(G2Error::RankDrop);
        }
        let factor = MatrixLoop::uniton_factor_real_pair(&gamma, tol)?;
        let width = cur.max_deg() - cur.min_deg();
        cur = cur.mul(&factor.adjoint()).trimmed(tol.max(1e-9));
        if cur.max_deg() - cur.min_deg() >= width {
            return Err(G2Error::Precondition(
                "peeling failed to reduce the loop degree".into(),
            ));
        }
        unitons.push(gamma);
    }
    if cur.based_residual() > tol.max(1e-8) {
        return Err(G2Error::Precondition(
            "factorization remainder is not the identity".into(),
        ));
    }
    Ok(unitons)
}

/// Data of the degree-4 example: the extended solution
/// Φ = (λ⁻¹π_A + π_f + λπ_Ā)(λ⁻¹π_α + π⊥ + λπ_ᾱ) built from a full
/// superhorizontal curve and the chain line α = span{H₀ + t(aH₄ + bH₅)}.
pub struct ExampleS2<S: Scalar> {
    pub phi: MatrixLoop<S>,
    pub alpha: JetSubbundle<S>,
    pub big_a: JetSubbundle<S>,
    pub h_line: JetSubbundle<S>,
    pub chain: Vec<JetVec7<S>>,
}

pub fn example_s2_loop<S: Scalar>(
    h: &crate::s6::Q5Curve<S>,
    a: &Jet<S>,
    b: &Jet<S>,
    t: &S,
    tol: f64,
) -> Result<ExampleS2<S>> {
    let alpha = crate::s6::chain_line(h, a, b, t, tol)?;
    // A = h ⊕ G¹(h) ⊕ G²(h) = span{H, H′, H″}
    let h0 = &h.section;
    let big_a = JetSubbundle::from_sections(
        vec![h0.clone(), h0.dz()?, h0.dz()?.dz()?],
        tol,
    )?;
    let f_a = MatrixLoop::uniton_factor_real_pair(&big_a, tol)?;
    let f_alpha = MatrixLoop::uniton_factor_real_pair(&alpha, tol)?;
    let chain = crate::s6::sff_chain(h, 6, tol)?;
    Ok(ExampleS2 {
        phi: f_a.mul(&f_alpha).trimmed(tol),
        alpha,
        big_a,
        h_line: h.line(tol)?,
        chain,
    })
}

/// The quoted W/λW representatives of the degree-4 example, evaluated at
/// the same chain sections and parameters.
pub fn quoted_basis_s2<S: Scalar>(
    chain: &[JetVec7<S>],
    a: &Jet<S>,
    b: &Jet<S>,
    t: &S,
    order: usize,
) -> Vec<LambdaVec<S>> {
    let tj = Jet::constant(order, t.clone());
    let at = a.mul(&tj);
    let bt = b.mul(&tj);
    let lv = |pairs: Vec<(i32, JetVec7<S>)>| -> LambdaVec<S> {
        let lo = pairs.iter().map(|(d, _)| *d).min().unwrap();
        let hi = pairs.iter().map(|(d, _)| *d).max().unwrap();
        let mut comps = vec![JetVec7::zero(order); (hi - lo + 1) as usize];
        for (d, v) in pairs {
            comps[(d - lo) as usize] = comps[(d - lo) as usize].add(&v);
        }
        LambdaVec { min_deg: lo, comps }
    };
    vec![
        lv(vec![
            (-2, chain[0].clone()),
            (0, chain[4].scale(&at).add(&chain[5].scale(&bt))),
        ]),
        lv(vec![(-1, chain[1].clone()), (1, chain[6].scale(&bt))]),
        lv(vec![(-1, chain[2].clone()), (1, chain[6].scale(&at).neg())]),
        lv(vec![(0, chain[3].clone())]),
        lv(vec![(1, chain[4].clone())]),
        lv(vec![(1, chain[5].clone())]),
        lv(vec![(2, chain[6].clone())]),
    ]
}

impl<S: Scalar> GrassModel<S> {
    /// Do the given λ-graded vectors represent W/λW up to an invertible
    /// change of frame?  Checks membership in W and that together with
    /// λW they span the whole window.
    pub fn matches_quotient_basis(&self, reps: &[LambdaVec<S>], tol: f64) -> Result<bool> {
        let basis = self.window_basis(tol)?;
        let rows: Vec<Vec<Jet<S>>> = basis
            .iter()
            .map(|x| x.flatten(-self.s, self.s, self.order))
            .collect();
        for rep in reps {
            let flat = rep
                .window(-self.s, self.s, self.order)
                .flatten(-self.s, self.s, self.order);
            if !linalg::in_span_at_base(&rows, &flat, tol) {
                return Ok(false);
            }
        }
        let mut all: Vec<Vec<Jet<S>>> = self
            .lambda_window_basis(tol)?
            .iter()
            .map(|x| x.flatten(-self.s, self.s, self.order))
            .collect();
        for rep in reps {
            all.push(
                rep.window(-self.s, self.s, self.order)
                    .flatten(-self.s, self.s, self.order),
            );
        }
        let to0: Vec<Vec<Jet<S>>> = all
            .iter()
            .map(|r| r.iter().map(|j| Jet::constant(0, j.eval0())).collect())
            .collect();
        let rank = linalg::span_reduce(&to0, tol)?.len();
        Ok(rank == 7 * (self.s as usize + 1))
    }
}

/// The degree-6 example: W = X + λX₍₁₎ + ⋯ + λ⁵X₍₅₎ + λ⁶H₊ with
/// X = λ⁻³ span{H + t λ⁴ b H⁽⁵⁾}, turned into a unitary loop by
/// Gram–Schmidt on W ⊖ λW (float backend for the square roots).
pub struct ExampleS3<S: Scalar> {
    pub phi: MatrixLoop<S>,
    pub model: GrassModel<S>,
    pub chain: Vec<JetVec7<S>>,
    pub last_uniton_section: JetVec7<S>,
}

pub fn example_s3_loop<S: Scalar>(
    h: &crate::s6::Q5Curve<S>,
    b: &Jet<S>,
    t: &S,
    tol: f64,
) -> Result<ExampleS3<S>> {
    let s = 3i32;
    let order = h.section.order().saturating_sub(7);
    if order < 2 {
        return Err(G2Error::OrderExhausted);
    }
    // derivatives of the section of X = λ⁻³{H + t λ⁴ b H⁽⁵⁾}; the curve
    // is a degree-6 polynomial, so high derivatives vanish identically
    // and the order budget stops shrinking once they do
    let mut h_derivs = vec![h.section.clone()];
    for _ in 0..6 {
        let prev = h_derivs.last().unwrap();
        h_derivs.push(if prev.is_zero_tol(f64::MIN_POSITIVE) {
            prev.clone()
        } else {
            prev.dz()?
        });
    }
    let tj = Jet::constant(h.section.order(), t.clone());
    let bt = b.mul(&tj);
    let x_deriv = |m: usize| -> LambdaVec<S> {
        // m-th derivative of the X section: λ⁻³H⁽ᵐ⁾ + λ (t b H⁽⁵⁾)⁽ᵐ⁾
        let mut tail = h_derivs[5].scale(&bt);
        for _ in 0..m {
            if tail.is_zero_tol(f64::MIN_POSITIVE) {
                break;
            }
            tail = tail.dz().expect("order budget checked above");
        }
        let o = tail.order().min(order);
        LambdaVec {
            min_deg: -3,
            comps: vec![
                h_derivs[m].truncate(o),
                JetVec7::zero(o),
                JetVec7::zero(o),
                JetVec7::zero(o),
                tail.truncate(o),
            ],
        }
    };
    // module generators λ^m X₍ₘ₎ for m = 0..6; X₍₆₎ is full by fullness
    // of the curve, so the λ-closure of the last one already carries the
    // λ³H₊ tail that makes the width-3 containments hold
    let gens: Vec<LambdaVec<S>> = (0..=6i32).map(|m| x_deriv(m as usize).shift(m)).collect();
    // λ³H₊ ⊂ W must hold away from the degeneracy set: check in the
    // extended window −3..=6 with the λ⁶H₊ tail added
    {
        let (lo, hi) = (-3i32, 6i32);
        let mut rows: Vec<Vec<Jet<S>>> = Vec::new();
        for g in &gens {
            for k in 0..=(hi - g.min_deg) {
                let sh = g.shift(k).window(lo, hi, order);
                if !sh.is_zero_tol(tol) {
                    rows.push(sh.flatten(lo, hi, order));
                }
            }
        }
        for j in 1..=7 {
            for d in 6..=hi {
                let v = JetVec7::constant(&Vec7::basis(j), order);
                rows.push(LambdaVec::single(d, v).flatten(lo, hi, order));
            }
        }
        for j in 1..=7 {
            let v = LambdaVec::single(3, JetVec7::constant(&Vec7::basis(j), order));
            if !linalg::in_span_at_base(&rows, &v.flatten(lo, hi, order), tol) {
                return Err(G2Error::Precondition(
                    "graded basis degenerates at the base point".into(),
                ));
            }
        }
    }
    // window bases for W and λW
    let window_of = |min_shift: i32| -> Result<Vec<LambdaVec<S>>> {
        let mut rows: Vec<Vec<Jet<S>>> = Vec::new();
        for g in &gens {
            for k in min_shift..=(s - g.min_deg) {
                let sh = g.shift(k).window(-s, s, order);
                if !sh.is_zero_tol(tol) {
                    rows.push(sh.flatten(-s, s, order));
                }
            }
        }
        if min_shift == 0 {
            for j in 1..=7 {
                let v = JetVec7::constant(&Vec7::basis(j), order);
                rows.push(LambdaVec::single(s, v).flatten(-s, s, order));
            }
        }
        let ech = linalg::rref_blocked(&JetMat::from_rows(rows), tol, 7)?;
        Ok(ech
            .rows
            .iter()
            .map(|r| LambdaVec::from_flat(r, -s))
            .collect())
    };
    let w_window = window_of(0)?;
    let lw_window = window_of(1)?;
    let phi = loop_from_window(s, &w_window, &lw_window, order, tol)?;
    let model = grassmannian_model(&phi, tol)?;
    // the loop's model must reproduce the X-window
    let basis = model.window_basis(tol)?;
    let rows: Vec<Vec<Jet<S>>> = basis
        .iter()
        .map(|x| x.flatten(-s, s, order))
        .collect();
    for wv in &w_window {
        let flat = wv.flatten(-s, s, order);
        if linalg::residual_at_base(&rows, &flat, tol) > tol.max(1e-7) {
            return Err(G2Error::Precondition(
                "orthonormalized loop does not span the graded module".into(),
            ));
        }
    }
    let chain = crate::s6::sff_chain(h, 6, tol)?;
    let last = chain[0].add(&chain[5].scale(&bt.truncate(chain[5].order())));
    Ok(ExampleS3 {
        phi,
        model,
        chain,
        last_uniton_section: last,
    })
}

/// The quoted W/λW representatives of the degree-6 example.
pub fn quoted_basis_s3<S: Scalar>(
    chain: &[JetVec7<S>],
    b: &Jet<S>,
    t: &S,
    order: usize,
) -> Vec<LambdaVec<S>> {
    let tj = Jet::constant(order, t.clone());
    let bt = b.mul(&tj);
    let mut out = vec![
        LambdaVec {
            min_deg: -3,
            comps: vec![
                chain[0].truncate(order),
                JetVec7::zero(order),
                JetVec7::zero(order),
                JetVec7::zero(order),
                chain[5].scale(&bt).truncate(order),
            ],
        },
        LambdaVec {
            min_deg: -2,
            comps: vec![
                chain[1].truncate(order),
                JetVec7::zero(order),
                JetVec7::zero(order),
                JetVec7::zero(order),
                chain[6].scale(&bt).truncate(order),
            ],
        },
    ];
    for (i, c) in chain.iter().enumerate().skip(2) {
        out.push(LambdaVec::single(i as i32 - 3, c.truncate(order)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Subspace;
    use crate::scalar::Gq;

    fn const_line(k: usize, j: usize, order: usize) -> JetSubbundle<Gq> {
        // span{e_k − i e_j}: isotropic constant line
        let v = Vec7::<Gq>::basis(k).sub(&Vec7::basis(j).scale(&Gq::i()));
        JetSubbundle::constant(&Subspace::span(&[v], 0.0), order)
    }

    #[test]
    fn real_pair_factor_is_unitary_and_based() {
        let alpha = const_line(2, 3, 3);
        let f = MatrixLoop::uniton_factor_real_pair(&alpha, 0.0).unwrap();
        assert!(f.unitarity_residual(16) < 1e-12);
        assert!(f.based_residual() < 1e-12);
        assert_eq!((f.min_deg(), f.max_deg()), (-1, 1));
    }

    #[test]
    fn zero_alpha_gives_identity_factor() {
        let f = MatrixLoop::uniton_factor_real_pair(&JetSubbundle::<Gq>::zero(), 0.0).unwrap();
        assert_eq!((f.min_deg(), f.max_deg()), (0, 0));
        assert!(f.based_residual() == 0.0);
    }

    #[test]
    fn adjoint_inverts_products_of_factors() {
        let a = const_line(2, 3, 3);
        let b = const_line(4, 5, 3);
        let f = MatrixLoop::uniton_factor_real_pair(&a, 0.0)
            .unwrap()
            .mul(&MatrixLoop::uniton_factor_real_pair(&b, 0.0).unwrap());
        let prod = f.mul(&f.adjoint());
        // Φ Φ* = I: only the λ⁰ coefficient is the identity
        for d in prod.min_deg()..=prod.max_deg() {
            let c = prod.coeff(d).unwrap();
            if d == 0 {
                assert!(c.sub(&JetMat::identity(7, c.order())).is_zero_tol(1e-12));
            } else {
                assert!(c.is_zero_tol(1e-12));
            }
        }
    }

    #[test]
    fn s1_invariant_model_of_standard_s2_flag() {
        // Φ = F_{ψ₋₂⊕ψ₋₁}·F_{ψ₋₂} for the standard s = 2 flag legs; the
        // nested isotropic pair commutes, so the loop is S¹-invariant
        use crate::algebra::Weight;
        let wb = crate::algebra::WeightBasis::<Gq>::build();
        let inner = JetSubbundle::constant(&wb.line_span(&[Weight::A1.negated()], 0.0), 3);
        let outer = JetSubbundle::constant(
            &wb.line_span(
                &[Weight::A1.negated(), Weight::A1A2, Weight::A2A1A2.negated()],
                0.0,
            ),
            3,
        );
        let f = MatrixLoop::uniton_factor_real_pair(&outer, 1e-12)
            .unwrap()
            .mul(&MatrixLoop::uniton_factor_real_pair(&inner, 1e-12).unwrap());
        let model = grassmannian_model(&f, 1e-12).unwrap();
        assert_eq!(model.s, 2);
        assert!(model.check_real_form(1e-10).unwrap());
        assert!(model.check_vector_closure(1e-10).unwrap());
        assert!(model.is_s1_invariant(1e-10).unwrap());
        let flag = model.legs(1e-10).unwrap();
        assert!(flag.is_g2_flag(1e-10));
        assert!(flag.equals_at_base(&Flag::standard(2, 3, 0.0).unwrap(), 1e-10));
        // the Cartan-embedding cross-check holds on S¹-invariant loops
        let phi_bundle = flag.project(1e-10).unwrap();
        assert!(cartan_cross_check(&f, &phi_bundle, 1e-10).unwrap() < 1e-10);
    }
}
