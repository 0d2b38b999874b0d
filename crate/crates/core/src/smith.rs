//! Smith normal form over the supported Euclidean domains, with unimodular
//! transformation certificates.
//!
//! For an `m x n` matrix `A` we compute unimodular `U` (`m x m`) and `V` (`n x n`)
//! such that `U * A * V = S` with `S` diagonal, each diagonal entry a canonical
//! associate dividing the next, and zeros at the end.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{extended_gcd, gcd_int, normalize_unit, Element, Poly, Rationals, RingTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmithError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("entry ring {found} differs from matrix ring {expected}")]
    RingMismatch { expected: RingTag, found: RingTag },
}

/// Dense row-major matrix over one of the supported rings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixOverDomain {
    ring: RingTag,
    rows: usize,
    cols: usize,
    entries: Vec<Element>,
}

impl MatrixOverDomain {
    pub fn new(
        ring: RingTag,
        rows: usize,
        cols: usize,
        entries: Vec<Element>,
    ) -> Result<Self, SmithError> {
        if entries.len() != rows * cols {
            return Err(SmithError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.ring() != ring) {
            return Err(SmithError::RingMismatch { expected: ring, found: e.ring() });
        }
        Ok(MatrixOverDomain { ring, rows, cols, entries })
    }

    pub fn from_rows(ring: RingTag, cols: usize, rows: Vec<Vec<Element>>) -> Result<Self, SmithError> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(SmithError::ShapeMismatch(format!(
                "row of length {} in a matrix with {cols} columns",
                r.len()
            )));
        }
        Self::new(ring, n, cols, rows.into_iter().flatten().collect())
    }

    pub fn zero(ring: RingTag, rows: usize, cols: usize) -> Self {
        MatrixOverDomain { ring, rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: RingTag, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn diagonal(ring: RingTag, rows: usize, cols: usize, diag: &[Element]) -> Self {
        let mut m = Self::zero(ring, rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn block_sum(&self, other: &Self) -> Self {
        let mut m = Self::zero(self.ring, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Element] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Element) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SmithError> {
        if self.cols != other.rows || self.ring != other.ring {
            return Err(SmithError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = &out.entries[i * other.cols + j] + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[target] += factor * row[source]`
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Element) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(source, j);
            if !v.is_zero() {
                let new = self.get(target, j) + &(factor * v);
                self.set(target, j, new);
            }
        }
    }

    /// `col[target] += factor * col[source]`
    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &Element) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, source);
            if !v.is_zero() {
                let new = self.get(i, target) + &(factor * v);
                self.set(i, target, new);
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Replaces rows `a`, `b` by `x*a + y*b` and `z*a + w*b`.
    pub fn combine_rows(&mut self, a: usize, b: usize, [x, y, z, w]: [&Element; 4]) {
        for j in 0..self.cols {
            let (ra, rb) = (self.get(a, j).clone(), self.get(b, j).clone());
            if ra.is_zero() && rb.is_zero() {
                continue;
            }
            self.set(a, j, &(x * &ra) + &(y * &rb));
            self.set(b, j, &(z * &ra) + &(w * &rb));
        }
    }

    /// Replaces columns `a`, `b` by `x*a + y*b` and `z*a + w*b`.
    pub fn combine_cols(&mut self, a: usize, b: usize, [x, y, z, w]: [&Element; 4]) {
        for i in 0..self.rows {
            let (ca, cb) = (self.get(i, a).clone(), self.get(i, b).clone());
            if ca.is_zero() && cb.is_zero() {
                continue;
            }
            self.set(i, a, &(x * &ca) + &(y * &cb));
            self.set(i, b, &(z * &ca) + &(w * &cb));
        }
    }

    pub fn scale_row(&mut self, i: usize, factor: &Element) {
        for j in 0..self.cols {
            let v = self.get(i, j) * factor;
            self.set(i, j, v);
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination; every division is exact.
    /// Scales each row of a `Q[x]` matrix by the least common denominator of its
    /// coefficients; the identity scaling elsewhere.
    fn clear_row_denominators(&self) -> (Self, Vec<Element>) {
        let mut out = self.clone();
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut den = BigInt::one();
            for e in self.row(i) {
                if let Element::Rat(p) = e {
                    for c in p.coeffs() {
                        den = den.lcm(c.denom());
                    }
                }
            }
            let scale = match self.ring {
                RingTag::PolyOverRationals => Element::Rat(Poly::constant(Rationals, BigRational::from_integer(den))),
                _ => self.ring.one(),
            };
            if !scale.is_one() {
                out.scale_row(i, &scale);
            }
            scales.push(scale);
        }
        (out, scales)
    }

    pub fn determinant(&self) -> Result<Element, SmithError> {
        if self.rows != self.cols {
            return Err(SmithError::ShapeMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut sign = self.ring.one();
        let mut prev = self.ring.one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m.get(i, k).is_zero()) else {
                return Ok(self.ring.zero());
            };
            if p != k {
                m.swap_rows(p, k);
                sign = -&sign;
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                let a = m.get(i, k).clone();
                for j in k + 1..n {
                    let v = &(&pivot * m.get(i, j)) - &(&a * m.get(k, j));
                    m.set(i, j, v.exact_div(&prev));
                }
                m.set(i, k, self.ring.zero());
            }
            prev = pivot;
        }
        Ok(if n == 0 { sign } else { &sign * m.get(n - 1, n - 1) })
    }
}

impl fmt::Display for MatrixOverDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `U * A * V = S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub u: MatrixOverDomain,
    pub s: MatrixOverDomain,
    pub v: MatrixOverDomain,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<Element> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

/// Elimination state; `u` and `v` are `None` when only the diagonal is wanted.
///
/// Over `Q[x]` every row operation has the form `row_i <- c*row_i - q*row_p` with `c` an
/// integer constant chosen so that `q` has integer coefficients, and each touched row is
/// rescaled to be primitive. Entries of `S` therefore stay in `Z[x]` with coprime
/// coefficients throughout.
struct SnfState {
    s: MatrixOverDomain,
    u: Option<MatrixOverDomain>,
    v: Option<MatrixOverDomain>,
}

fn rat_const(c: BigRational) -> Element {
    Element::Rat(Poly::constant(Rationals, c))
}

/// Pivot preference: smaller Euclidean size first, then smaller coefficients.
fn pivot_key(e: &Element) -> (BigInt, u64) {
    (e.euclidean_size().unwrap_or_default(), e.coefficient_height())
}

impl SnfState {
    fn new(a: &MatrixOverDomain, track: bool) -> Self {
        SnfState {
            s: a.clone(),
            u: track.then(|| MatrixOverDomain::identity(a.ring, a.rows)),
            v: track.then(|| MatrixOverDomain::identity(a.ring, a.cols)),
        }
    }

    fn row_op(&mut self, op: impl Fn(&mut MatrixOverDomain)) {
        op(&mut self.s);
        if let Some(u) = &mut self.u {
            op(u);
        }
    }

    fn col_op(&mut self, op: impl Fn(&mut MatrixOverDomain)) {
        op(&mut self.s);
        if let Some(v) = &mut self.v {
            op(v);
        }
    }

    /// `U A V = S` becomes `V^T A^T U^T = S^T`.
    fn transpose(&mut self) {
        self.s = self.s.transpose();
        let (u, v) = (self.u.take(), self.v.take());
        self.u = v.map(|m| m.transpose());
        self.v = u.map(|m| m.transpose());
    }

    /// Over `Q[x]`, rescales row `i` by a rational unit so its coefficients are coprime
    /// integers.
    fn make_primitive(&mut self, i: usize) {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for e in self.s.row(i) {
            if let Element::Rat(p) = e {
                for c in p.coeffs() {
                    if !num.is_one() {
                        num = gcd_int(&num, c.numer());
                    }
                    if !c.denom().is_one() {
                        den = den.lcm(c.denom());
                    }
                }
            }
        }
        if num.is_zero() || (num.is_one() && den.is_one()) {
            return;
        }
        if let Some(u) = &mut self.u {
            u.scale_row(i, &rat_const(BigRational::new(den.clone(), num.clone())));
        }
        let cols = self.s.cols;
        for j in 0..cols {
            if let Element::Rat(p) = self.s.get(i, j) {
                let coeffs = p
                    .coeffs()
                    .iter()
                    .map(|c| {
                        let n = if den.is_one() { c.numer().clone() } else { c.numer() * (&den / c.denom()) };
                        BigRational::from_integer(n / &num)
                    })
                    .collect();
                self.s.set(i, j, Element::Rat(Poly::new(Rationals, coeffs)));
            }
        }
    }

    /// Scales row `i` so that entry `(i, j)` is its canonical associate.
    fn normalize_entry(&mut self, i: usize, j: usize) {
        let (unit, _) = normalize_unit(self.s.get(i, j)).expect("pivot is non-zero");
        if !unit.is_one() {
            let inv = unit.unit_inverse().expect("unit");
            self.row_op(|m| m.scale_row(i, &inv));
        }
    }

    /// Replaces `(i, c)` by its remainder modulo `(p, c)` up to a unit factor.
    fn reduce_row(&mut self, p: usize, i: usize, c: usize) {
        if let (Element::Rat(a), Element::Rat(b)) = (self.s.get(p, c), self.s.get(i, c)) {
            if let Some((k, q, _)) = b.pseudo_div_rem(a) {
                if !k.is_one() {
                    let scale = rat_const(BigRational::from_integer(k));
                    self.row_op(|m| m.scale_row(i, &scale));
                }
                let minus_q = Element::Rat(q.neg());
                self.row_op(|m| m.add_row_multiple(i, p, &minus_q));
                self.make_primitive(i);
                return;
            }
        }
        let (q, _) = self.s.get(i, c).div_rem(self.s.get(p, c));
        let minus_q = -&q;
        self.row_op(|m| m.add_row_multiple(i, p, &minus_q));
        self.make_primitive(i);
    }

    /// Clears column `t` below row `t` by repeated division with remainder, keeping the
    /// smallest entry as the pivot.
    fn clear_column(&mut self, t: usize) {
        let m = self.s.rows;
        for i in t..m {
            self.make_primitive(i);
        }
        loop {
            let best = (t..m)
                .filter(|&i| !self.s.get(i, t).is_zero())
                .min_by_key(|&i| pivot_key(self.s.get(i, t)));
            let Some(best) = best else { return };
            self.row_op(|x| x.swap_rows(t, best));
            let mut done = true;
            for i in t + 1..m {
                if !self.s.get(i, t).is_zero() {
                    self.reduce_row(t, i, t);
                    done &= self.s.get(i, t).is_zero();
                }
            }
            if done {
                return;
            }
        }
    }

    /// `diag(a, b)` at positions `i < j` becomes `diag(gcd, lcm)`.
    fn fix_pair(&mut self, i: usize, j: usize) {
        let a = self.s.get(i, i).clone();
        let b = self.s.get(j, j).clone();
        let (g, x, y) = extended_gcd(&a, &b).expect("non-zero diagonal");
        let (ag, bg) = (a.exact_div(&g), b.exact_div(&g));
        let (minus_bg, one) = (-&bg, self.s.ring.one());
        self.row_op(|m| m.combine_rows(i, j, [&x, &y, &minus_bg, &ag]));
        // columns: [[1, -y*b/g], [1, x*a/g]]
        let (c01, c11) = (-&(&y * &bg), &x * &ag);
        self.col_op(|m| m.combine_cols(i, j, [&one, &one, &c01, &c11]));
    }

    fn run(&mut self) {
        let (m, n) = (self.s.rows, self.s.cols);
        let mut rank = 0;
        for t in 0..m.min(n) {
            let best = (t..n)
                .flat_map(|j| (t..m).map(move |i| (i, j)))
                .filter(|&(i, j)| !self.s.get(i, j).is_zero())
                .min_by_key(|&(i, j)| pivot_key(self.s.get(i, j)));
            let Some((_, j)) = best else {
                break;
            };
            self.col_op(|x| x.swap_cols(t, j));
            loop {
                self.clear_column(t);
                if (t + 1..n).all(|j| self.s.get(t, j).is_zero()) {
                    break;
                }
                self.transpose();
                self.clear_column(t);
                self.transpose();
                if (t + 1..m).all(|i| self.s.get(i, t).is_zero()) {
                    break;
                }
            }
            rank = t + 1;
        }
        for i in 0..rank {
            for j in i + 1..rank {
                if !self.s.get(i, i).divides(self.s.get(j, j)) {
                    self.fix_pair(i, j);
                }
            }
            self.normalize_entry(i, i);
        }
    }
}

/// Smith normal form with certificates. Empty matrices are allowed.
pub fn smith_normal_form(a: &MatrixOverDomain) -> SnfResult {
    let mut st = SnfState::new(a, true);
    st.run();
    SnfResult { u: st.u.expect("tracked"), s: st.s, v: st.v.expect("tracked") }
}

/// Non-zero, non-unit diagonal entries of the Smith form, in divisibility order.
pub fn invariant_factors(a: &MatrixOverDomain) -> Vec<Element> {
    let mut st = SnfState::new(a, false);
    st.run();
    (0..a.rows.min(a.cols))
        .map(|i| st.s.get(i, i).clone())
        .filter(|d| !d.is_zero() && !d.is_unit())
        .collect()
}

/// Checks `U * A * V = S` exactly, unit determinants of `U` and `V`, and the shape of `S`:
/// diagonal, canonical associates, each entry dividing the next, zeros trailing.
pub fn verify_snf(a: &MatrixOverDomain, r: &SnfResult) -> Result<bool, SmithError> {
    let shape = |m: &MatrixOverDomain, rows, cols, name: &str| {
        if m.rows != rows || m.cols != cols || m.ring != a.ring {
            Err(SmithError::ShapeMismatch(format!(
                "{name} is {}x{} over {}, expected {rows}x{cols} over {}",
                m.rows, m.cols, m.ring, a.ring
            )))
        } else {
            Ok(())
        }
    };
    shape(&r.u, a.rows, a.rows, "U")?;
    shape(&r.v, a.cols, a.cols, "V")?;
    shape(&r.s, a.rows, a.cols, "S")?;

    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j && !r.s.get(i, j).is_zero() {
                return Ok(false);
            }
        }
    }
    let diag = r.diagonal();
    for d in &diag {
        if *d != d.canonical() {
            return Ok(false);
        }
    }
    for w in diag.windows(2) {
        // a zero may only be followed by zeros; divides() encodes exactly that
        if !w[0].divides(&w[1]) {
            return Ok(false);
        }
    }
    // over Q[x], compare D_u U A V D_v with D_u S D_v for integer diagonal D_u, D_v
    let (u, du) = r.u.clear_row_denominators();
    let (vt, dv) = r.v.transpose().clear_row_denominators();
    let v = vt.transpose();
    if !u.determinant()?.is_unit() || !v.determinant()?.is_unit() {
        return Ok(false);
    }
    let mut s = r.s.clone();
    for (i, d) in du.iter().enumerate() {
        s.scale_row(i, d);
    }
    for (j, d) in dv.iter().enumerate() {
        for i in 0..s.rows {
            let e = s.get(i, j) * d;
            s.set(i, j, e);
        }
    }
    Ok(u.mul(a)?.mul(&v)? == s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmat(rows: &[&[i64]]) -> MatrixOverDomain {
        let cols = rows.first().map_or(0, |r| r.len());
        let ring = RingTag::Integers;
        MatrixOverDomain::from_rows(
            ring,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| ring.from_i64(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Element> {
        v.iter().map(|&x| RingTag::Integers.from_i64(x)).collect()
    }

    #[test]
    fn two_by_two_example() {
        let a = zmat(&[&[2, 4], &[6, 8]]);
        let r = smith_normal_form(&a);
        assert_eq!(r.diagonal(), ints(&[2, 4]));
        assert!(verify_snf(&a, &r).unwrap());
        assert_eq!(invariant_factors(&a), ints(&[2, 4]));
    }

    #[test]
    fn identity_and_zero() {
        let id = zmat(&[&[1, 0], &[0, 1]]);
        let r = smith_normal_form(&id);
        assert_eq!(r.diagonal(), ints(&[1, 1]));
        assert_eq!(r.u, MatrixOverDomain::identity(RingTag::Integers, 2));
        assert!(verify_snf(&id, &r).unwrap());
        let z = zmat(&[&[0]]);
        assert_eq!(smith_normal_form(&z).diagonal(), ints(&[0]));
        assert_eq!(invariant_factors(&zmat(&[&[1]])), vec![]);
        assert_eq!(invariant_factors(&zmat(&[&[3, 0], &[0, 0]])), ints(&[3]));
    }

    #[test]
    fn empty_matrices() {
        for (m, n) in [(0, 0), (0, 3), (2, 0)] {
            let a = MatrixOverDomain::zero(RingTag::Integers, m, n);
            let r = smith_normal_form(&a);
            assert!(verify_snf(&a, &r).unwrap());
            assert!(r.diagonal().iter().all(Element::is_zero));
        }
    }

    #[test]
    fn divisibility_repair() {
        // diag(2, 3) must become diag(1, 6)
        let a = zmat(&[&[2, 0], &[0, 3]]);
        let r = smith_normal_form(&a);
        assert_eq!(r.diagonal(), ints(&[1, 6]));
        assert!(verify_snf(&a, &r).unwrap());
    }

    #[test]
    fn negative_entries_are_normalized() {
        let a = zmat(&[&[-4, 0, 0], &[0, -6, 0]]);
        let r = smith_normal_form(&a);
        assert_eq!(r.diagonal(), ints(&[2, 12]));
        assert!(verify_snf(&a, &r).unwrap());
    }

    #[test]
    fn verify_rejects_tampering() {
        let a = zmat(&[&[2, 4], &[6, 8]]);
        let r = smith_normal_form(&a);

        let mut bumped = r.clone();
        let v = bumped.s.get(1, 1) + &RingTag::Integers.one();
        bumped.s.set(1, 1, v);
        assert!(!verify_snf(&a, &bumped).unwrap());

        // doubling a row of U makes det(U) = +-2, not a unit
        let mut doubled = r.clone();
        doubled.u.scale_row(0, &RingTag::Integers.from_i64(2));
        assert_eq!(doubled.u.determinant().unwrap().euclidean_size(), Some(2.into()));
        assert!(!verify_snf(&a, &doubled).unwrap());
    }

    #[test]
    fn verify_shape_mismatch() {
        let a = zmat(&[&[2, 4], &[6, 8]]);
        let mut r = smith_normal_form(&a);
        r.u = MatrixOverDomain::identity(RingTag::Integers, 3);
        assert!(matches!(verify_snf(&a, &r), Err(SmithError::ShapeMismatch(_))));
    }

    #[test]
    fn determinant_expansion() {
        assert_eq!(zmat(&[&[2, 4], &[6, 8]]).determinant().unwrap(), RingTag::Integers.from_i64(-8));
        assert_eq!(
            zmat(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]]).determinant().unwrap(),
            RingTag::Integers.from_i64(-3)
        );
        assert!(zmat(&[&[1, 2], &[2, 4]]).determinant().unwrap().is_zero());
    }

    #[test]
    fn constructor_validation() {
        let r = MatrixOverDomain::new(RingTag::Integers, 2, 2, ints(&[1, 2, 3]));
        assert!(matches!(r, Err(SmithError::ShapeMismatch(_))));
        let q = RingTag::PolyOverRationals;
        let r = MatrixOverDomain::new(q, 1, 1, ints(&[1]));
        assert!(matches!(r, Err(SmithError::RingMismatch { .. })));
    }
}
