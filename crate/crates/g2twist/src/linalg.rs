//! Linear algebra over the jet ring.
//!
//! Jets form a local ring: a jet is invertible exactly when its value at
//! the base point is nonzero.  Gaussian elimination therefore has a
//! three-way outcome per column: a unit pivot, an entirely zero column,
//! or a column that is zero at the base point but not as a jet.  The last
//! case means the generic rank near the point exceeds the rank at the
//! point and surfaces as [`G2Error::RankDrop`]; callers re-sample at a
//! nearby generic point instead of extending bundles across the drop.

use crate::error::{G2Error, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct JetMat<S: Scalar> {
    pub rows: usize,
    pub cols: usize,
    a: Vec<Jet<S>>,
}

impl<S: Scalar> JetMat<S> {
    pub fn zero(rows: usize, cols: usize, order: usize) -> Self {
        JetMat {
            rows,
            cols,
            a: vec![Jet::zero(order); rows * cols],
        }
    }

    pub fn identity(n: usize, order: usize) -> Self {
        let mut m = JetMat::zero(n, n, order);
        for k in 0..n {
            *m.at_mut(k, k) = Jet::one(order);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Jet<S>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c));
        JetMat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Jet<S> {
        &self.a[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Jet<S> {
        &mut self.a[r * self.cols + c]
    }

    pub fn order(&self) -> usize {
        self.a.iter().map(|j| j.order()).min().unwrap_or(0)
    }

    pub fn row(&self, r: usize) -> Vec<Jet<S>> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Jet<S>> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = JetMat::zero(self.cols, self.rows, self.order());
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        JetMat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        JetMat {
            rows: self.rows,
            cols: self.cols,
            a: self
                .a
                .iter()
                .zip(rhs.a.iter())
                .map(|(x, y)| x.add(y))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        JetMat {
            rows: self.rows,
            cols: self.cols,
            a: self
                .a
                .iter()
                .zip(rhs.a.iter())
                .map(|(x, y)| x.sub(y))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let order = self.order().min(rhs.order());
        let mut m = JetMat::zero(self.rows, rhs.cols, order);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Jet::zero(order);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(rhs.at(k, c)));
                }
                *m.at_mut(r, c) = acc;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Jet<S>]) -> Vec<Jet<S>> {
        assert_eq!(self.cols, v.len());
        let order = self.order().min(v.iter().map(|j| j.order()).min().unwrap_or(0));
        (0..self.rows)
            .map(|r| {
                let mut acc = Jet::zero(order);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    /// Entrywise conjugate-transpose (jet conjugation included).
    pub fn adjoint(&self) -> Self {
        self.transpose().map(|j| j.conj())
    }

    pub fn max_mag(&self) -> f64 {
        self.a.iter().map(|j| j.max_mag()).fold(0.0, f64::max)
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.a.iter().all(|j| j.is_zero_tol(tol))
    }
}

/// Result of a reduction: pivot rows (fully reduced), the pivot column
/// of each, and the eliminated leftover rows.
pub struct Echelon<S: Scalar> {
    pub rows: Vec<Vec<Jet<S>>>,
    pub pivots: Vec<usize>,
    pub leftover: Vec<Vec<Jet<S>>>,
}

/// Reduced row form over the jet ring with full pivoting.
///
/// Pivots are chosen by largest base-point magnitude over all remaining
/// rows and all columns `< pivot_limit`; columns past the limit ride
/// along (used for augmented systems).  After elimination every leftover
/// row must vanish on the pivot-eligible columns as a *jet*; an entry
/// that vanishes at the base point only raises `RankDrop`, since the
/// span's dimension then jumps off the point.
pub fn rref_limited<S: Scalar>(
    m: &JetMat<S>,
    tol: f64,
    pivot_limit: usize,
) -> Result<Echelon<S>> {
    let mut rows: Vec<Vec<Jet<S>>> = (0..m.rows).map(|r| m.row(r)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut done = 0usize; // rows occupied by pivots
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (r, row) in rows.iter().enumerate().skip(done) {
            for (c, entry) in row.iter().enumerate().take(pivot_limit) {
                if pivots.contains(&c) {
                    continue;
                }
                let v0 = entry.eval0();
                if v0.is_zero_tol(tol) {
                    continue;
                }
                let mag = v0.mag();
                if best.map(|(_, _, b)| mag > b).unwrap_or(true) {
                    best = Some((r, c, mag));
                }
            }
        }
        let (r, col) = match best {
            Some((r, c, _)) => (r, c),
            None => break,
        };
        rows.swap(done, r);
        let inv = rows[done][col].inv(tol)?;
        for x in rows[done].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = rows[done].clone();
        for (rr, row) in rows.iter_mut().enumerate() {
            if rr == done {
                continue;
            }
            let factor = row[col].clone();
            if factor.is_zero_tol(tol) {
                continue;
            }
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                *x = x.sub(&factor.mul(p));
            }
        }
        pivots.push(col);
        done += 1;
        if done == rows.len() {
            break;
        }
    }
    let leftover: Vec<Vec<Jet<S>>> = rows.split_off(done);
    for row in &leftover {
        for (c, entry) in row.iter().enumerate().take(pivot_limit) {
            let _ = c;
            if !entry.is_zero_tol(tol) {
                return Err(G2Error::RankDrop);
            }
        }
    }
    Ok(Echelon {
        rows,
        pivots,
        leftover,
    })
}

/// Reduced row form with every column pivot-eligible.
pub fn rref<S: Scalar>(m: &JetMat<S>, tol: f64) -> Result<Echelon<S>> {
    rref_limited(m, tol, m.cols)
}

/// Block-ordered reduced echelon form: blocks of `block` consecutive
/// columns are processed in order, with free pivot choice inside the
/// current block.  Each echelon row's pivot then sits in the *leading
/// block* of the corresponding jump of the row span — the right notion
/// for λ-graded windows, where a block is one λ-level and the coordinate
/// order inside a level is meaningless.  A block whose remaining entries
/// are nonzero jets without a unit raises `RankDrop`: the leading-level
/// structure of the span degenerates at the base point.
pub fn rref_blocked<S: Scalar>(m: &JetMat<S>, tol: f64, block: usize) -> Result<Echelon<S>> {
    let mut rows: Vec<Vec<Jet<S>>> = (0..m.rows).map(|r| m.row(r)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut done = 0usize;
    let nblocks = m.cols.div_ceil(block);
    for blk in 0..nblocks {
        let lo = blk * block;
        let hi = ((blk + 1) * block).min(m.cols);
        loop {
            if done == rows.len() {
                break;
            }
            let mut best: Option<(usize, usize, f64)> = None;
            for (r, row) in rows.iter().enumerate().skip(done) {
                for c in lo..hi {
                    if pivots.contains(&c) {
                        continue;
                    }
                    let v0 = row[c].eval0();
                    if v0.is_zero_tol(tol) {
                        continue;
                    }
                    let mag = v0.mag();
                    if best.map(|(_, _, b)| mag > b).unwrap_or(true) {
                        best = Some((r, c, mag));
                    }
                }
            }
            let (r, col) = match best {
                Some((r, c, _)) => (r, c),
                None => break,
            };
            rows.swap(done, r);
            let inv = rows[done][col].inv(tol)?;
            for x in rows[done].iter_mut() {
                *x = x.mul(&inv);
            }
            let pivot_row = rows[done].clone();
            for (rr, row) in rows.iter_mut().enumerate() {
                if rr == done {
                    continue;
                }
                let factor = row[col].clone();
                if factor.is_zero_tol(tol) {
                    continue;
                }
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x = x.sub(&factor.mul(p));
                }
            }
            pivots.push(col);
            done += 1;
        }
        // the block must now be clean on all remaining rows
        for row in rows.iter().skip(done) {
            for c in lo..hi {
                if !row[c].is_zero_tol(tol) {
                    return Err(G2Error::RankDrop);
                }
            }
        }
    }
    let leftover: Vec<Vec<Jet<S>>> = rows.split_off(done);
    Ok(Echelon {
        rows,
        pivots,
        leftover,
    })
}

pub fn rank<S: Scalar>(m: &JetMat<S>, tol: f64) -> Result<usize> {
    Ok(rref(m, tol)?.pivots.len())
}

/// Jet-valued kernel basis of the linear map v ↦ M v.
pub fn kernel<S: Scalar>(m: &JetMat<S>, tol: f64) -> Result<Vec<Vec<Jet<S>>>> {
    let order = m.order();
    let ech = rref(m, tol)?;
    let mut basis = Vec::new();
    for fc in 0..m.cols {
        if ech.pivots.contains(&fc) {
            continue;
        }
        let mut v = vec![Jet::zero(order); m.cols];
        v[fc] = Jet::one(order);
        for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()) {
            v[pc] = row[fc].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Solve M x = b for a single right-hand side; `None` when inconsistent.
pub fn solve<S: Scalar>(m: &JetMat<S>, b: &[Jet<S>], tol: f64) -> Result<Option<Vec<Jet<S>>>> {
    assert_eq!(m.rows, b.len());
    let order = m.order().min(b.iter().map(|j| j.order()).min().unwrap_or(0));
    let mut aug = JetMat::zero(m.rows, m.cols + 1, order);
    for r in 0..m.rows {
        for c in 0..m.cols {
            *aug.at_mut(r, c) = m.at(r, c).truncate(order);
        }
        *aug.at_mut(r, m.cols) = b[r].truncate(order);
    }
    let ech = rref_limited(&aug, tol, m.cols)?;
    for row in &ech.leftover {
        if !row[m.cols].is_zero_tol(tol) {
            // consistent at the base point but not as jets counts as a
            // rank degeneration, not an ordinary inconsistency
            if row[m.cols].eval0().is_zero_tol(tol) {
                return Err(G2Error::RankDrop);
            }
            return Ok(None);
        }
    }
    let mut x = vec![Jet::zero(order); m.cols];
    for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()) {
        x[pc] = row[m.cols].clone();
    }
    Ok(Some(x))
}

/// Inverse of a square jet matrix (unit determinant at base point).
pub fn inverse<S: Scalar>(m: &JetMat<S>, tol: f64) -> Result<JetMat<S>> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let order = m.order();
    let mut aug = JetMat::zero(n, 2 * n, order);
    for r in 0..n {
        for c in 0..n {
            *aug.at_mut(r, c) = m.at(r, c).clone();
        }
        *aug.at_mut(r, n + r) = Jet::one(order);
    }
    let ech = match rref_limited(&aug, tol, n) {
        Ok(e) => e,
        Err(G2Error::RankDrop) => return Err(G2Error::GramSingular),
        Err(e) => return Err(e),
    };
    if ech.pivots.len() < n {
        return Err(G2Error::GramSingular);
    }
    let mut out = JetMat::zero(n, n, order);
    for (row, &pc) in ech.rows.iter().zip(ech.pivots.iter()) {
        for c in 0..n {
            *out.at_mut(pc, c) = row[n + c].clone();
        }
    }
    Ok(out)
}

/// Echelon basis for the span of the given vectors (as rows).
pub fn span_reduce<S: Scalar>(vecs: &[Vec<Jet<S>>], tol: f64) -> Result<Vec<Vec<Jet<S>>>> {
    if vecs.is_empty() {
        return Ok(Vec::new());
    }
    let ech = rref(&JetMat::from_rows(vecs.to_vec()), tol)?;
    Ok(ech.rows)
}

/// Does `v` lie in the span of `basis` *at the base point*?
pub fn in_span_at_base<S: Scalar>(basis: &[Vec<Jet<S>>], v: &[Jet<S>], tol: f64) -> bool {
    let to0 = |w: &[Jet<S>]| -> Vec<Jet<S>> {
        w.iter().map(|j| Jet::constant(0, j.eval0())).collect()
    };
    let rows0: Vec<Vec<Jet<S>>> = basis.iter().map(|r| to0(r)).collect();
    let r0 = match span_reduce(&rows0, tol) {
        Ok(e) => e.len(),
        Err(_) => return false,
    };
    let mut with_v = rows0;
    with_v.push(to0(v));
    match span_reduce(&with_v, tol) {
        Ok(e) => e.len() == r0,
        Err(_) => false,
    }
}

/// Residual of `v` against the span of `basis` at the base point: the
/// norm of what is left after projecting out the span.
pub fn residual_at_base<S: Scalar>(basis: &[Vec<Jet<S>>], v: &[Jet<S>], tol: f64) -> f64 {
    use num_complex::Complex64;
    let b0: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|r| r.iter().map(|j| j.eval0().to_c64()).collect())
        .collect();
    let mut v0: Vec<Complex64> = v.iter().map(|j| j.eval0().to_c64()).collect();
    // Gram-Schmidt projection in floats, purely for reporting
    let mut ortho: Vec<Vec<Complex64>> = Vec::new();
    for b in b0 {
        let mut w = b;
        for u in &ortho {
            let num: Complex64 = w.iter().zip(u.iter()).map(|(a, c)| a * c.conj()).sum();
            let den: f64 = u.iter().map(|c| c.norm_sqr()).sum();
            if den > tol * tol {
                for (x, y) in w.iter_mut().zip(u.iter()) {
                    *x -= num / den * y;
                }
            }
        }
        let n: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        if n > tol * tol {
            ortho.push(w);
        }
    }
    for u in &ortho {
        let num: Complex64 = v0.iter().zip(u.iter()).map(|(a, c)| a * c.conj()).sum();
        let den: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        for (x, y) in v0.iter_mut().zip(u.iter()) {
            *x -= num / den * y;
        }
    }
    v0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;

    fn c(n: i64) -> Jet<Gq> {
        Jet::constant(2, Gq::from_int(n))
    }

    #[test]
    fn kernel_of_simple_map() {
        // rows: x + y + z = 0, y - z = 0 -> kernel spanned by (-2, 1, 1)
        let m = JetMat::from_rows(vec![
            vec![c(1), c(1), c(1)],
            vec![c(0), c(1), c(-1)],
        ]);
        let k = kernel(&m, 0.0).unwrap();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        for r in 0..2 {
            let mut acc = Jet::zero(2);
            for j in 0..3 {
                acc = acc.add(&m.at(r, j).mul(&v[j]));
            }
            assert!(acc.is_zero_tol(0.0));
        }
    }

    #[test]
    fn rank_drop_detected() {
        // the entry z is zero at 0 but not as a jet
        let z = Jet::<Gq>::var_z(2);
        let m = JetMat::from_rows(vec![vec![z]]);
        assert!(matches!(rank(&m, 0.0), Err(G2Error::RankDrop)));
    }

    #[test]
    fn no_false_rank_drop_with_unit_elsewhere() {
        let z = Jet::<Gq>::var_z(2);
        let m = JetMat::from_rows(vec![vec![z], vec![c(1).truncate(2)]]);
        assert_eq!(rank(&m, 0.0).unwrap(), 1);
    }

    #[test]
    fn inverse_round_trip_with_jets() {
        let z = Jet::<Gq>::var_z(3);
        let one = Jet::<Gq>::one(3);
        let m = JetMat::from_rows(vec![
            vec![one.add(&z), z.clone()],
            vec![z.mul(&z), one.clone()],
        ]);
        let inv = inverse(&m, 0.0).unwrap();
        let prod = m.mul(&inv);
        assert!(prod.sub(&JetMat::identity(2, 3)).is_zero_tol(0.0));
    }

    #[test]
    fn solve_consistent_system() {
        let m = JetMat::from_rows(vec![vec![c(2), c(0)], vec![c(0), c(3)]]);
        let b = vec![c(4), c(9)];
        let x = solve(&m, &b, 0.0).unwrap().unwrap();
        assert_eq!(x[0], c(2));
        assert_eq!(x[1], c(3));
    }
}
