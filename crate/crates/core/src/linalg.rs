//! Dense linear algebra over an exact field.
//!
//! Everything is canonical: matrices reduce to a unique RREF with the first
//! nonzero entry in column order as pivot (no magnitudes exist over a
//! function field), and subspaces are stored by their RREF basis so equality
//! is structural. Dimensions here are small (ambient ≤ ~16), so the dense
//! representation is the right one.

use std::fmt;

use crate::scalar::{Rational, ScalarExpr};

/// An exact field: all operations are total except `inv` on zero.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Field for Rational {
    fn zero() -> Self {
        <Rational as num_traits::Zero>::zero()
    }
    fn one() -> Self {
        <Rational as num_traits::One>::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!num_traits::Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

impl Field for ScalarExpr {
    // Nullary constants live over the empty variable set; Poly arithmetic
    // lifts them into whatever ambient set they meet.
    fn zero() -> Self {
        ScalarExpr::zero(&crate::scalar::Vars::new(Vec::<String>::new()))
    }
    fn one() -> Self {
        ScalarExpr::one(&crate::scalar::Vars::new(Vec::<String>::new()))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip().expect("inverse of zero rational function")
    }
    fn is_zero(&self) -> bool {
        ScalarExpr::is_zero(self)
    }
}

/// Dense matrix over an exact field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Zero matrix; `rows * cols` may be zero.
    pub fn zeros_with(rows: usize, cols: usize, zero: F) -> Self {
        Matrix { rows, cols, data: vec![zero; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<F> {
        self.row(r).to_vec()
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[F]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn map_result<G: Field, E>(
        &self,
        f: impl Fn(&F) -> Result<G, E>,
    ) -> Result<Matrix<G>, E> {
        let data: Result<Vec<G>, E> = self.data.iter().map(f).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data: data? })
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn matmul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let zero = self.exemplar_zero(other);
        let mut out = Matrix::zeros_with(self.rows, other.cols, zero);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.at(r, c).add(&a.mul(other.at(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(self.zero_entry(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    pub fn add_mat(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg_mat(&self) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.neg()).collect() }
    }

    pub fn stack_vertical(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.cols, "column counts must agree");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.rows, other.rows, "row counts must agree");
        let mut rows = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut row = self.row_vec(r);
            row.extend(other.row(r).iter().cloned());
            rows.push(row);
        }
        Matrix::from_rows(rows)
    }

    pub fn block_diag(&self, other: &Matrix<F>) -> Matrix<F> {
        let zero = self.exemplar_zero(other);
        let mut out =
            Matrix::zeros_with(self.rows + other.rows, self.cols + other.cols, zero);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.at(r, c).clone());
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out.set(self.rows + r, self.cols + c, other.at(r, c).clone());
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix<F> {
        let mut rows = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            rows.push(cols.iter().map(|&c| self.at(r, c).clone()).collect());
        }
        Matrix::from_rows(rows)
    }

    pub fn is_skew(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..=r {
                if !self.at(r, c).add(self.at(c, r)).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// A zero element cloned from any entry of the two matrices. Over
    /// `ScalarExpr` a zero cannot be conjured without a variable set, so the
    /// helpers thread one through.
    fn exemplar_zero(&self, other: &Matrix<F>) -> F {
        self.data
            .first()
            .or_else(|| other.data.first())
            .map(|e| e.sub(e))
            .unwrap_or_else(F::zero)
    }

    fn zero_entry(&self) -> F {
        self.data.first().map(|e| e.sub(e)).unwrap_or_else(F::zero)
    }

    fn one_entry(&self) -> F {
        for entry in &self.data {
            if !entry.is_zero() {
                return entry.mul(&entry.inv());
            }
        }
        F::one()
    }

    /// Reduced row echelon form and rank. Pivot choice is the first nonzero
    /// entry in column order, so the result is unique and deterministic over
    /// any field, including rational functions.
    pub fn rref(&self) -> (Matrix<F>, usize) {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if pivot != rank {
                for c in 0..m.cols {
                    m.data.swap(pivot * m.cols + c, rank * m.cols + c);
                }
            }
            let inv = m.at(rank, col).inv();
            for c in 0..m.cols {
                let v = m.at(rank, c).mul(&inv);
                m.set(rank, c, v);
            }
            for r in 0..m.rows {
                if r == rank || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in 0..m.cols {
                    let v = m.at(r, c).sub(&factor.mul(m.at(rank, c)));
                    m.set(r, c, v);
                }
            }
            rank += 1;
        }
        (m, rank)
    }

    /// Pivot column indices of the RREF, in order.
    pub fn rref_pivot_columns(&self) -> Vec<usize> {
        let (r, rank) = self.rref();
        let mut cols = Vec::with_capacity(rank);
        let mut col = 0;
        for row in 0..rank {
            while col < r.cols && r.at(row, col).is_zero() {
                col += 1;
            }
            if col < r.cols {
                cols.push(col);
                col += 1;
            }
        }
        cols
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Basis of the right null space `{x | Mx = 0}`, one row per basis
    /// vector; `rows = cols - rank`.
    pub fn kernel(&self) -> Matrix<F> {
        let (r, rank) = self.rref();
        let zero = self.zero_entry();
        let one = self.one_entry();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; r.cols];
        let mut col = 0;
        for row in 0..rank {
            while col < r.cols && r.at(row, col).is_zero() {
                col += 1;
            }
            if col < r.cols {
                pivot_of_col[col] = Some(row);
                col += 1;
            }
        }
        let mut basis = Vec::new();
        for free in 0..r.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![zero.clone(); r.cols];
            v[free] = one.clone();
            for (c, p) in pivot_of_col.iter().enumerate() {
                if let Some(row) = p {
                    v[c] = r.at(*row, free).neg();
                }
            }
            basis.push(v);
        }
        if basis.is_empty() {
            Matrix::zeros_with(0, self.cols, zero)
        } else {
            Matrix::from_rows(basis)
        }
    }

    /// Determinant by fraction-producing Gaussian elimination.
    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a square matrix");
        if self.rows == 0 {
            return F::one();
        }
        let mut m = self.clone();
        let zero = self.zero_entry();
        let mut det = self.one_entry();
        let mut negate = false;
        for col in 0..m.cols {
            let Some(pivot) = (col..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                return zero;
            };
            if pivot != col {
                for c in 0..m.cols {
                    m.data.swap(pivot * m.cols + c, col * m.cols + c);
                }
                negate = !negate;
            }
            let p = m.at(col, col).clone();
            det = det.mul(&p);
            let inv = p.inv();
            for r in (col + 1)..m.rows {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&inv);
                for c in col..m.cols {
                    let v = m.at(r, c).sub(&factor.mul(m.at(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        if negate {
            det.neg()
        } else {
            det
        }
    }

    /// Particular solution of `Mx = b` with free variables set to zero, or
    /// `None` when the system is inconsistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let bm = Matrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect());
        let aug = self.hstack(&bm);
        let (r, _) = aug.rref();
        let zero = self.zero_entry();
        let mut x = vec![zero.clone(); self.cols];
        for row in 0..r.rows() {
            let Some(lead) = (0..r.cols()).find(|&c| !r.at(row, c).is_zero()) else {
                continue;
            };
            if lead == self.cols {
                return None; // row (0 .. 0 | 1): inconsistent
            }
            x[lead] = r.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix<F>> {
        assert_eq!(self.rows, self.cols);
        if self.rows == 0 {
            return Some(self.clone());
        }
        let zero = self.zero_entry();
        let one = self.one_entry();
        let mut eye = Matrix::zeros_with(self.rows, self.rows, zero);
        for i in 0..self.rows {
            eye.set(i, i, one.clone());
        }
        let aug = self.hstack(&eye);
        let (r, _) = aug.rref();
        // Invertible iff the left block reduced to the identity.
        for i in 0..self.rows {
            for j in 0..self.rows {
                let want_one = i == j;
                let e = r.at(i, j);
                if want_one != !e.is_zero() || (want_one && !e.sub(&one).is_zero()) {
                    return None;
                }
            }
        }
        let cols: Vec<usize> = (self.rows..2 * self.rows).collect();
        Some(r.select_columns(&cols))
    }
}

impl Matrix<Rational> {
    pub fn identity(n: usize) -> Matrix<Rational> {
        let mut m = Matrix::zeros_with(n, n, Rational::zero());
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::scalar::rat(x)).collect())
                .collect(),
        )
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// A linear subspace stored by its unique RREF basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Canonicalizes the row span of `rows` inside `F^ambient`.
    pub fn from_rows(ambient: usize, rows: Matrix<F>) -> Self {
        assert_eq!(rows.cols(), ambient, "basis width must equal ambient dimension");
        let (r, rank) = rows.rref();
        let kept: Vec<Vec<F>> = (0..rank).map(|i| r.row_vec(i)).collect();
        let basis = if kept.is_empty() {
            Matrix::zeros_with(0, ambient, rows.zero_entry())
        } else {
            Matrix::from_rows(kept)
        };
        Subspace { ambient, basis }
    }

    pub fn zero_space(ambient: usize) -> Self
    where
        F: Field,
    {
        Subspace { ambient, basis: Matrix::zeros_with(0, ambient, F::zero()) }
    }

    pub fn full(ambient: usize) -> Self {
        let mut eye = Matrix::zeros_with(ambient, ambient, F::zero());
        for i in 0..ambient {
            eye.set(i, i, F::one());
        }
        Subspace { ambient, basis: eye }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    /// Membership test via the canonical basis.
    pub fn contains(&self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ambient, "dimension mismatch");
        let mut rem = v.to_vec();
        for row in self.basis.rows_iter() {
            let lead = row.iter().position(|e| !e.is_zero()).expect("basis rows are nonzero");
            if rem[lead].is_zero() {
                continue;
            }
            let factor = rem[lead].clone();
            for (x, b) in rem.iter_mut().zip(row) {
                *x = x.sub(&factor.mul(b));
            }
        }
        rem.iter().all(|e| e.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace<F>) -> bool {
        assert_eq!(self.ambient, other.ambient, "dimension mismatch");
        self.basis.rows_iter().all(|row| other.contains(row))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        assert_eq!(self.ambient, other.ambient, "dimension mismatch");
        if self.dim() == 0 {
            return other.clone();
        }
        if other.dim() == 0 {
            return self.clone();
        }
        Subspace::from_rows(self.ambient, self.basis.stack_vertical(&other.basis))
    }

    /// Intersection via annihilators: a row space is the common kernel of
    /// its own kernel, so stacking the two kernels and taking the kernel of
    /// the stack lands exactly on the intersection.
    pub fn intersect(&self, other: &Subspace<F>) -> Subspace<F> {
        assert_eq!(self.ambient, other.ambient, "dimension mismatch");
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace { ambient: self.ambient, basis: empty_like(&self.basis, self.ambient) };
        }
        let ka = self.basis.kernel();
        let kb = other.basis.kernel();
        let stacked = if ka.rows() == 0 {
            kb
        } else if kb.rows() == 0 {
            ka
        } else {
            ka.stack_vertical(&kb)
        };
        if stacked.rows() == 0 {
            return Subspace::from_rows(self.ambient, self.basis.clone()); // both full
        }
        Subspace::from_rows(self.ambient, stacked.kernel())
    }

    /// Annihilator under the plain dot product: `{y | By = 0}`.
    pub fn dot_annihilator(&self) -> Subspace<F> {
        if self.dim() == 0 {
            return Subspace {
                ambient: self.ambient,
                basis: full_identity_like(&self.basis, self.ambient),
            };
        }
        Subspace::from_rows(self.ambient, self.basis.kernel())
    }
}

fn empty_like<F: Field>(m: &Matrix<F>, ambient: usize) -> Matrix<F> {
    let zero = m
        .rows_iter()
        .flat_map(|r| r.iter())
        .next()
        .map(|e| e.sub(e))
        .unwrap_or_else(F::zero);
    Matrix::zeros_with(0, ambient, zero)
}

fn full_identity_like<F: Field>(m: &Matrix<F>, ambient: usize) -> Matrix<F> {
    let entries: Vec<&F> = m.rows_iter().flat_map(|r| r.iter()).collect();
    let zero = entries.first().map(|e| e.sub(e)).unwrap_or_else(F::zero);
    let one = entries
        .iter()
        .find(|e| !e.is_zero())
        .map(|e| e.mul(&e.inv()))
        .unwrap_or_else(F::one);
    let mut eye = Matrix::zeros_with(ambient, ambient, zero);
    for i in 0..ambient {
        eye.set(i, i, one.clone());
    }
    eye
}

/// The split symmetric pairing on a product of blocks `V_i ⊕ V_i*`:
/// `⟨(v,α),(w,β)⟩ = β(v) + α(w)` summed over blocks, negated on blocks
/// flagged as conjugated (the `V̄` of relation calculus).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPairing {
    /// `(n_i, negated)` per block; the block occupies `2 n_i` coordinates.
    blocks: Vec<(usize, bool)>,
}

impl SplitPairing {
    pub fn standard(n: usize) -> Self {
        SplitPairing { blocks: vec![(n, false)] }
    }

    pub fn with_blocks(blocks: Vec<(usize, bool)>) -> Self {
        SplitPairing { blocks }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|(n, _)| 2 * n).sum()
    }

    /// Gram matrix of the pairing.
    pub fn gram<F: Field>(&self) -> Matrix<F> {
        let d = self.dim();
        let mut g = Matrix::zeros_with(d, d, F::zero());
        let mut off = 0;
        for &(n, negated) in &self.blocks {
            let sign = if negated { F::one().neg() } else { F::one() };
            for i in 0..n {
                g.set(off + i, off + n + i, sign.clone());
                g.set(off + n + i, off + i, sign.clone());
            }
            off += 2 * n;
        }
        g
    }

    pub fn value<F: Field>(&self, x: &[F], y: &[F]) -> F {
        assert_eq!(x.len(), self.dim());
        let gy = self.gram::<F>().mul_vec(y);
        x.iter()
            .zip(&gy)
            .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    /// Orthogonal complement with respect to the (possibly sign-twisted)
    /// split pairing; `dim s + dim s^⊥ = ambient` always.
    pub fn orthogonal<F: Field>(&self, s: &Subspace<F>) -> Subspace<F> {
        assert_eq!(s.ambient_dim(), self.dim(), "ambient dimension must match the pairing");
        if s.dim() == 0 {
            return Subspace::full(self.dim());
        }
        let bg = s.basis().matmul(&self.gram::<F>());
        Subspace::from_rows(self.dim(), bg.kernel())
    }

    /// Whether the pairing vanishes identically on `s`.
    pub fn is_isotropic<F: Field>(&self, s: &Subspace<F>) -> bool {
        let b = s.basis();
        let bg = b.matmul(&self.gram::<F>()).matmul(&b.transpose());
        bg.is_zero_matrix()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_expr, rat, Vars};

    #[test]
    fn rref_identity_and_rank_drop() {
        let m = Matrix::identity(3);
        let (r, rank) = m.rref();
        assert_eq!(r, Matrix::identity(3));
        assert_eq!(rank, 3);

        let m = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        let (r, rank) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(r, Matrix::from_i64(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn rref_uniqueness_on_row_equivalent_inputs() {
        let a = Matrix::from_i64(&[&[1, 2, 3], &[0, 1, 1]]);
        let b = Matrix::from_i64(&[&[2, 5, 7], &[1, 3, 4]]); // row ops of a
        assert_eq!(a.rref().0, b.rref().0);
    }

    #[test]
    fn kernel_examples() {
        let z = Matrix::zeros_with(2, 2, Rational::zero());
        let k = z.kernel();
        assert_eq!(k.rows(), 2);

        let m = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let k = m.kernel();
        assert_eq!(k.rows(), 1);
        assert_eq!(k.row(0), &[rat(1), rat(0)][..]);
    }

    #[test]
    fn symbolic_generic_rank() {
        // [[z, 1], [z^2, z]] has determinant 0, so generic rank is 1, while
        // [[0, x], [-x, 0]] has determinant x^2 and generic rank 2.
        let v = Vars::new(["x", "z"]);
        let e = |s: &str| parse_expr(s, &v).unwrap();
        let m = Matrix::from_rows(vec![vec![e("z"), e("1")], vec![e("z^2"), e("z")]]);
        assert_eq!(m.rank(), 1);
        assert!(m.det().is_zero());

        let omega = Matrix::from_rows(vec![vec![e("0"), e("x")], vec![e("-x"), e("0")]]);
        assert_eq!(omega.rank(), 2);
        assert_eq!(omega.kernel().rows(), 0);
        assert_eq!(omega.det(), e("x^2"));
    }

    #[test]
    fn subspace_lattice() {
        let e1 = Subspace::from_rows(2, Matrix::from_i64(&[&[1, 0]]));
        let e2 = Subspace::from_rows(2, Matrix::from_i64(&[&[0, 1]]));
        assert_eq!(e1.intersect(&e2).dim(), 0);
        assert_eq!(e1.intersect(&e1), e1);
        assert_eq!(e1.sum(&e2), Subspace::full(2));
    }

    #[test]
    fn solve_and_inverse() {
        let m = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let x = m.solve(&[rat(5), rat(11)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(5), rat(11)]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(2));

        let s = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(s.inverse().is_none());
        assert!(s.solve(&[rat(1), rat(0)]).is_none());
    }

    #[test]
    fn pairing_orthogonal_examples() {
        // V ⊕ 0 is its own orthogonal (isotropic of half dimension).
        let p = SplitPairing::standard(2);
        let v0 = Subspace::from_rows(4, Matrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]));
        assert_eq!(p.orthogonal(&v0), v0);

        // F ⊕ F° for F = span{e1} in n = 2.
        let ff0 = Subspace::from_rows(4, Matrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 0, 1]]));
        assert_eq!(p.orthogonal(&ff0), ff0);

        // span{(e1, e1*)}: orthogonal has dim 3 and misses the generator.
        let d = Subspace::from_rows(4, Matrix::from_i64(&[&[1, 0, 1, 0]]));
        let perp = p.orthogonal(&d);
        assert_eq!(perp.dim(), 3);
        assert!(!perp.contains(&[rat(1), rat(0), rat(1), rat(0)]));
    }

    #[test]
    fn double_orthogonal_is_identity() {
        let p = SplitPairing::standard(3);
        let s = Subspace::from_rows(
            6,
            Matrix::from_i64(&[&[1, 2, 0, -1, 0, 3], &[0, 1, 1, 0, 2, 0]]),
        );
        assert_eq!(p.orthogonal(&p.orthogonal(&s)), s);
        assert_eq!(s.dim() + p.orthogonal(&s).dim(), 6);
    }
}
