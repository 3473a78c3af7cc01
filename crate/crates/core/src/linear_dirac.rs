//! Dirac structures on finite-dimensional vector spaces and the calculus of
//! lagrangian relations.
//!
//! A Dirac structure on `V` is a subspace `L ⊂ V ⊕ V*` with `L = L^⊥` for
//! the split pairing. Coordinates are ordered `(v-block, α-block)`
//! throughout, and every subspace is kept in RREF so equality of structures
//! is structural equality. The bivector convention is `π♯(α) = i_α π` with
//! `i_{dx^i}(∂_j ∧ ∂_k) = δ^i_j ∂_k − δ^i_k ∂_j`, which makes the rows of a
//! skew matrix `π` the vector parts of the frame `(π♯ dx^i, dx^i)`; the dual
//! convention for a 2-form puts `ω♯(∂_i)` in row `i` of `ω`.

use thiserror::Error;

use crate::linalg::{Field, Matrix, SplitPairing, Subspace};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LinearDiracError {
    #[error("matrix is not skew-symmetric")]
    NonSkew,
    #[error("subspace is not lagrangian for the split pairing")]
    NotLagrangian,
    #[error("transversality failed: the structure is not of the requested graph type")]
    TransversalityFailed,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Lagrangian subspace of `V ⊕ V*`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearDirac<F: Field> {
    n: usize,
    space: Subspace<F>,
}

/// Linear map `V → W` as a `dim W × dim V` matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap<F: Field> {
    matrix: Matrix<F>,
}

impl<F: Field> LinearMap<F> {
    pub fn new(matrix: Matrix<F>) -> Self {
        LinearMap { matrix }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.matrix
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.matrix.mul_vec(v)
    }

    /// Pullback `φ*β = M^T β` on covectors.
    pub fn pullback_covector(&self, beta: &[F]) -> Vec<F> {
        self.matrix.transpose().mul_vec(beta)
    }

    pub fn image(&self) -> Subspace<F> {
        Subspace::from_rows(self.target_dim(), self.matrix.transpose())
    }

    pub fn kernel_space(&self) -> Subspace<F> {
        Subspace::from_rows(self.source_dim(), self.matrix.kernel())
    }
}

/// True iff `s ⊂ F^{2n}` has dimension `n` and the split pairing vanishes
/// on it. Odd ambient dimension can never be lagrangian.
pub fn is_lagrangian<F: Field>(s: &Subspace<F>) -> bool {
    let ambient = s.ambient_dim();
    if ambient % 2 != 0 {
        return false;
    }
    let n = ambient / 2;
    s.dim() == n && SplitPairing::standard(n).is_isotropic(s)
}

/// `span{(e_i, 0)} ⊂ F^{2n}` (the tangent block).
pub fn v_block<F: Field>(n: usize) -> Subspace<F> {
    let mut m = Matrix::zeros_with(n, 2 * n, F::zero());
    for i in 0..n {
        m.set(i, i, F::one());
    }
    Subspace::from_rows(2 * n, m)
}

/// `span{(0, e_i*)} ⊂ F^{2n}` (the covector block).
pub fn dual_block<F: Field>(n: usize) -> Subspace<F> {
    let mut m = Matrix::zeros_with(n, 2 * n, F::zero());
    for i in 0..n {
        m.set(i, n + i, F::one());
    }
    Subspace::from_rows(2 * n, m)
}

/// Null space, range, and leafwise 2-form of a linear Dirac structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition<F: Field> {
    /// `K = L ∩ V`, as a subspace of `V`.
    pub null: Subspace<F>,
    /// `R = pr_V(L)`, as a subspace of `V`.
    pub range: Subspace<F>,
    /// The 2-form on `R` in the coordinates of `range`'s basis rows:
    /// `leaf_form[i][j] = Ω(b_i, b_j)`.
    pub leaf_form: Matrix<F>,
}

impl<F: Field> LinearDirac<F> {
    /// Wraps a subspace after checking the lagrangian condition.
    pub fn from_subspace(space: Subspace<F>) -> Result<Self, LinearDiracError> {
        if space.ambient_dim() % 2 != 0 || !is_lagrangian(&space) {
            return Err(LinearDiracError::NotLagrangian);
        }
        Ok(LinearDirac { n: space.ambient_dim() / 2, space })
    }

    pub fn dim_v(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    /// `L_π = {(π♯α, α)}`, the graph of a skew bivector matrix. Row `i` of
    /// the basis is `(row_i(π), e_i*)`, so `L ∩ V = {0}` automatically.
    pub fn graph_of_bivector(pi: &Matrix<F>) -> Result<Self, LinearDiracError> {
        if !pi.is_skew() {
            return Err(LinearDiracError::NonSkew);
        }
        let n = pi.rows();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = pi.row_vec(i);
            for j in 0..n {
                row.push(if j == i { F::one() } else { F::zero() });
            }
            rows.push(row);
        }
        let space = Subspace::from_rows(2 * n, Matrix::from_rows(rows));
        debug_assert!(is_lagrangian(&space));
        Ok(LinearDirac { n, space })
    }

    /// `L_ω = {(X, ω♯X)}`, the graph of a skew 2-form matrix. Row `i` of the
    /// basis is `(e_i, row_i(ω))`, so `L ∩ V* = {0}` automatically.
    pub fn graph_of_twoform(omega: &Matrix<F>) -> Result<Self, LinearDiracError> {
        if !omega.is_skew() {
            return Err(LinearDiracError::NonSkew);
        }
        let n = omega.rows();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: Vec<F> = (0..n).map(|j| if j == i { F::one() } else { F::zero() }).collect();
            row.extend(omega.row(i).iter().cloned());
            rows.push(row);
        }
        let space = Subspace::from_rows(2 * n, Matrix::from_rows(rows));
        debug_assert!(is_lagrangian(&space));
        Ok(LinearDirac { n, space })
    }

    /// `L = F ⊕ F°` for a distribution `F ⊆ V`.
    pub fn from_distribution(f: &Subspace<F>) -> Self {
        let n = f.ambient_dim();
        let ann = f.dot_annihilator();
        let zero = F::zero();
        let mut rows = Vec::with_capacity(f.dim() + ann.dim());
        for r in f.basis().rows_iter() {
            let mut row = r.to_vec();
            row.extend(std::iter::repeat(zero.clone()).take(n));
            rows.push(row);
        }
        for r in ann.basis().rows_iter() {
            let mut row = vec![zero.clone(); n];
            row.extend(r.iter().cloned());
            rows.push(row);
        }
        let space = Subspace::from_rows(2 * n, Matrix::from_rows(rows));
        debug_assert!(is_lagrangian(&space));
        LinearDirac { n, space }
    }

    /// Gauge transform `τ_B: (X, α) ↦ (X, α + i_X B)` by a skew matrix `B`.
    /// An involution up to sign: `gauge(gauge(L, B), −B) = L`.
    pub fn gauge(&self, b: &Matrix<F>) -> Result<Self, LinearDiracError> {
        if !b.is_skew() {
            return Err(LinearDiracError::NonSkew);
        }
        if b.rows() != self.n {
            return Err(LinearDiracError::DimensionMismatch(format!(
                "gauge matrix is {}x{}, structure dimension is {}",
                b.rows(),
                b.cols(),
                self.n
            )));
        }
        let rows: Vec<Vec<F>> = self
            .space
            .basis()
            .rows_iter()
            .map(|row| {
                let (v, alpha) = row.split_at(self.n);
                // i_X B has components X^i B_{ij}: a row-vector times B.
                let mut out = v.to_vec();
                for j in 0..self.n {
                    let mut entry = alpha[j].clone();
                    for (i, vi) in v.iter().enumerate() {
                        entry = entry.add(&vi.mul(b.at(i, j)));
                    }
                    out.push(entry);
                }
                out
            })
            .collect();
        let space = Subspace::from_rows(2 * self.n, Matrix::from_rows(rows));
        debug_assert!(is_lagrangian(&space));
        Ok(LinearDirac { n: self.n, space })
    }

    /// Backward image `𝔅_φ(L_W) = {(v, φ*β) | (φ(v), β) ∈ L_W}` of a
    /// structure on `W` along `φ: V → W`; always lagrangian on `V`.
    pub fn backward(&self, phi: &LinearMap<F>) -> Result<Self, LinearDiracError> {
        if phi.target_dim() != self.n {
            return Err(LinearDiracError::DimensionMismatch(format!(
                "map target has dimension {}, structure lives on dimension {}",
                phi.target_dim(),
                self.n
            )));
        }
        let n_w = self.n;
        let n_v = phi.source_dim();
        // Membership in L_W is `K y = 0` for K the kernel of the basis.
        let k = self.space.basis().kernel();
        let k1 = k.select_columns(&(0..n_w).collect::<Vec<_>>());
        let k2 = k.select_columns(&(n_w..2 * n_w).collect::<Vec<_>>());
        // Solutions (v, β) of K1·(Mv) + K2·β = 0.
        let constraint = k1.matmul(phi.matrix()).hstack(&k2);
        let sols = constraint.kernel();
        let mt = phi.matrix().transpose();
        let rows: Vec<Vec<F>> = (0..sols.rows())
            .map(|r| {
                let row = sols.row(r);
                let (v, beta) = row.split_at(n_v);
                let mut out = v.to_vec();
                out.extend(mt.mul_vec(beta));
                out
            })
            .collect();
        let space = if rows.is_empty() {
            Subspace::from_rows(2 * n_v, Matrix::zeros_with(0, 2 * n_v, F::zero()))
        } else {
            Subspace::from_rows(2 * n_v, Matrix::from_rows(rows))
        };
        assert_eq!(space.dim(), n_v, "backward images are lagrangian");
        Ok(LinearDirac { n: n_v, space })
    }

    /// Forward image `𝔉_φ(L_V) = {(φ(v), β) | (v, φ*β) ∈ L_V}` of a
    /// structure on `V` along `φ: V → W`; always lagrangian on `W`.
    pub fn forward(&self, phi: &LinearMap<F>) -> Result<Self, LinearDiracError> {
        if phi.source_dim() != self.n {
            return Err(LinearDiracError::DimensionMismatch(format!(
                "map source has dimension {}, structure lives on dimension {}",
                phi.source_dim(),
                self.n
            )));
        }
        let n_v = self.n;
        let n_w = phi.target_dim();
        let k = self.space.basis().kernel();
        let k1 = k.select_columns(&(0..n_v).collect::<Vec<_>>());
        let k2 = k.select_columns(&(n_v..2 * n_v).collect::<Vec<_>>());
        // Solutions (v, β) of K1·v + K2·(M^T β) = 0.
        let constraint = k1.hstack(&k2.matmul(&phi.matrix().transpose()));
        let sols = constraint.kernel();
        let rows: Vec<Vec<F>> = (0..sols.rows())
            .map(|r| {
                let row = sols.row(r);
                let (v, beta) = row.split_at(n_v);
                let mut out = phi.matrix().mul_vec(v);
                out.extend(beta.iter().cloned());
                out
            })
            .collect();
        let space = if rows.is_empty() {
            Subspace::from_rows(2 * n_w, Matrix::zeros_with(0, 2 * n_w, F::zero()))
        } else {
            Subspace::from_rows(2 * n_w, Matrix::from_rows(rows))
        };
        assert_eq!(space.dim(), n_w, "forward images are lagrangian");
        Ok(LinearDirac { n: n_w, space })
    }

    /// Null space, range, and leafwise 2-form. The structure is recovered
    /// exactly from `(range, leaf_form)`, and that reconstruction plus the
    /// well-definedness of the form (`L ∩ V* = R°`) are asserted here.
    pub fn decompose(&self) -> Decomposition<F> {
        let n = self.n;
        let null_rows = self.space.intersect(&v_block(n));
        let null = project_block(&null_rows, 0, n);
        let range = project_block(&self.space, 0, n);

        // Solve (b_i, α_i) ∈ L for each basis vector of the range.
        let k = self.space.basis().kernel();
        let k1 = k.select_columns(&(0..n).collect::<Vec<_>>());
        let k2 = k.select_columns(&(n..2 * n).collect::<Vec<_>>());
        let alphas: Vec<Vec<F>> = range
            .basis()
            .rows_iter()
            .map(|x| {
                let rhs: Vec<F> = k1.mul_vec(x).iter().map(|e| e.neg()).collect();
                k2.solve(&rhs).expect("range vectors admit a covector partner")
            })
            .collect();
        let r = range.dim();
        let mut leaf_form = Matrix::zeros_with(r, r, F::zero());
        for (i, alpha) in alphas.iter().enumerate() {
            for j in 0..r {
                let val = dot(alpha, range.basis().row(j));
                leaf_form.set(i, j, val);
            }
        }
        assert!(leaf_form.is_skew(), "leafwise form is skew");

        // Well-definedness of the form: L ∩ V* must be the annihilator of R.
        let l_cap_dual = project_block(&self.space.intersect(&dual_block(n)), n, n);
        assert_eq!(l_cap_dual, range.dot_annihilator(), "L ∩ V* = R°");

        // The null space is the kernel of the leafwise form on R.
        let coeff_kernel = leaf_form.kernel();
        let null_again = Subspace::from_rows(
            n,
            if coeff_kernel.rows() == 0 {
                Matrix::zeros_with(0, n, F::zero())
            } else {
                coeff_kernel.matmul(range.basis())
            },
        );
        assert_eq!(null, null_again, "K is the kernel of the leafwise form");

        // Reconstruction: L = {(X, α) | X ∈ R, α|_R = i_X Ω}.
        let mut rows = Vec::new();
        for (x, alpha) in range.basis().rows_iter().zip(&alphas) {
            let mut row = x.to_vec();
            row.extend(alpha.iter().cloned());
            rows.push(row);
        }
        for kappa in range.dot_annihilator().basis().rows_iter() {
            let mut row = vec![F::zero(); n];
            row.extend(kappa.iter().cloned());
            rows.push(row);
        }
        let rebuilt = Subspace::from_rows(2 * n, Matrix::from_rows(rows));
        assert_eq!(rebuilt, self.space, "decomposition determines the structure");

        Decomposition { null, range, leaf_form }
    }

    /// The unique skew `π` with `self = graph_of_bivector(π)`, available
    /// exactly when `L ∩ V = {0}`.
    pub fn as_bivector(&self) -> Result<Matrix<F>, LinearDiracError> {
        let n = self.n;
        if self.space.intersect(&v_block(n)).dim() != 0 {
            return Err(LinearDiracError::TransversalityFailed);
        }
        let k = self.space.basis().kernel();
        let k1 = k.select_columns(&(0..n).collect::<Vec<_>>());
        let k2 = k.select_columns(&(n..2 * n).collect::<Vec<_>>());
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            // Solve (X, e_i*) ∈ L: K1 X = −(column i of K2).
            let rhs: Vec<F> = (0..k2.rows()).map(|r| k2.at(r, i).neg()).collect();
            let x = k1.solve(&rhs).ok_or(LinearDiracError::TransversalityFailed)?;
            rows.push(x);
        }
        let pi = Matrix::from_rows(rows);
        assert!(pi.is_skew(), "bivector matrices of lagrangian graphs are skew");
        Ok(pi)
    }

    /// The unique skew `ω` with `self = graph_of_twoform(ω)`, available
    /// exactly when `L ∩ V* = {0}`.
    pub fn as_twoform(&self) -> Result<Matrix<F>, LinearDiracError> {
        let n = self.n;
        if self.space.intersect(&dual_block(n)).dim() != 0 {
            return Err(LinearDiracError::TransversalityFailed);
        }
        let k = self.space.basis().kernel();
        let k1 = k.select_columns(&(0..n).collect::<Vec<_>>());
        let k2 = k.select_columns(&(n..2 * n).collect::<Vec<_>>());
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            // Solve (e_i, α) ∈ L: K2 α = −(column i of K1).
            let rhs: Vec<F> = (0..k1.rows()).map(|r| k1.at(r, i).neg()).collect();
            let alpha = k2.solve(&rhs).ok_or(LinearDiracError::TransversalityFailed)?;
            rows.push(alpha);
        }
        let omega = Matrix::from_rows(rows);
        assert!(omega.is_skew(), "2-form matrices of lagrangian graphs are skew");
        Ok(omega)
    }

    /// This structure as a relation `V ← {0}` (subspace of `𝕍 × {0}`).
    pub fn as_relation_source(&self) -> LagrangianRelation<F> {
        LagrangianRelation { n_first: self.n, n_second: 0, space: self.space.clone() }
    }

    /// This structure as a relation `{0} ← V` (subspace of `{0} × V̄`).
    pub fn as_relation_target(&self) -> LagrangianRelation<F> {
        LagrangianRelation { n_first: 0, n_second: self.n, space: self.space.clone() }
    }
}

fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Projects a subspace of a larger product onto `width` coordinates
/// starting at `offset`. Sound only when the caller knows the projection is
/// injective or intends the image.
fn project_block<F: Field>(s: &Subspace<F>, offset: usize, width: usize) -> Subspace<F> {
    let cols: Vec<usize> = (offset..offset + width).collect();
    if s.dim() == 0 {
        return Subspace::from_rows(width, Matrix::zeros_with(0, width, F::zero()));
    }
    Subspace::from_rows(width, s.basis().select_columns(&cols))
}

/// Verifies the roundtrip identities for backward/forward images along
/// `φ: V → W`, both by their rank criteria and by explicit recomposition:
///
/// - `𝔉(𝔅(L_W)) = L_W` iff `pr_W(L_W) ⊆ image(φ)`,
/// - `𝔅(𝔉(L_V)) = L_V` iff `ker(φ) ⊆ L_V ∩ V`.
///
/// The two routes must agree; disagreement would be an internal error.
pub fn roundtrip_conditions<F: Field>(
    l_v: &LinearDirac<F>,
    l_w: &LinearDirac<F>,
    phi: &LinearMap<F>,
) -> Result<(bool, bool), LinearDiracError> {
    if phi.source_dim() != l_v.dim_v() || phi.target_dim() != l_w.dim_v() {
        return Err(LinearDiracError::DimensionMismatch(format!(
            "map is {}→{}, structures live on {} and {}",
            phi.source_dim(),
            phi.target_dim(),
            l_v.dim_v(),
            l_w.dim_v()
        )));
    }
    let n_w = l_w.dim_v();

    let pr_w = project_block(&l_w.space, 0, n_w);
    let fb_criterion = pr_w.is_subspace_of(&phi.image());
    let fb_recomposed = l_w.backward(phi)?.forward(phi)? == *l_w;
    assert_eq!(fb_criterion, fb_recomposed, "roundtrip criterion must match recomposition");

    let null_v = project_block(&l_v.space.intersect(&v_block(l_v.dim_v())), 0, l_v.dim_v());
    let bf_criterion = phi.kernel_space().is_subspace_of(&null_v);
    let bf_recomposed = l_v.forward(phi)?.backward(phi)? == *l_v;
    assert_eq!(bf_criterion, bf_recomposed, "roundtrip criterion must match recomposition");

    Ok((fb_criterion, bf_criterion))
}

/// Lagrangian relation from `V` to `W` (first block): a lagrangian subspace
/// of `𝕎 × V̄`, coordinates ordered `(w, β, v, α)`, with the pairing negated
/// on the second block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LagrangianRelation<F: Field> {
    n_first: usize,
    n_second: usize,
    space: Subspace<F>,
}

impl<F: Field> LagrangianRelation<F> {
    pub fn pairing(n_first: usize, n_second: usize) -> SplitPairing {
        SplitPairing::with_blocks(vec![(n_first, false), (n_second, true)])
    }

    pub fn from_subspace(
        n_first: usize,
        n_second: usize,
        space: Subspace<F>,
    ) -> Result<Self, LinearDiracError> {
        let pairing = Self::pairing(n_first, n_second);
        if space.ambient_dim() != pairing.dim() {
            return Err(LinearDiracError::DimensionMismatch(format!(
                "relation subspace has ambient {}, blocks require {}",
                space.ambient_dim(),
                pairing.dim()
            )));
        }
        if space.dim() != n_first + n_second || !pairing.is_isotropic(&space) {
            return Err(LinearDiracError::NotLagrangian);
        }
        Ok(LagrangianRelation { n_first, n_second, space })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_first, self.n_second)
    }

    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    /// `Γ_φ = {((w,β),(v,α)) | w = φ(v), α = φ*(β)}` for `φ: V → W`.
    pub fn graph(phi: &LinearMap<F>) -> Self {
        let n_v = phi.source_dim();
        let n_w = phi.target_dim();
        let ambient = 2 * n_w + 2 * n_v;
        let mut rows = Vec::with_capacity(n_v + n_w);
        // (φ e_i, 0, e_i, 0)
        for i in 0..n_v {
            let mut row: Vec<F> = (0..n_w).map(|r| phi.matrix().at(r, i).clone()).collect();
            row.extend(std::iter::repeat(F::zero()).take(n_w));
            row.extend((0..n_v).map(|j| if j == i { F::one() } else { F::zero() }));
            row.extend(std::iter::repeat(F::zero()).take(n_v));
            rows.push(row);
        }
        // (0, e_j*, 0, φ* e_j*) with φ* e_j* = row j of the matrix
        for j in 0..n_w {
            let mut row: Vec<F> = vec![F::zero(); n_w];
            row.extend((0..n_w).map(|i| if i == j { F::one() } else { F::zero() }));
            row.extend(std::iter::repeat(F::zero()).take(n_v));
            row.extend(phi.matrix().row(j).iter().cloned());
            rows.push(row);
        }
        let space = Subspace::from_rows(ambient, Matrix::from_rows(rows));
        debug_assert!(Self::pairing(n_w, n_v).is_isotropic(&space));
        LagrangianRelation { n_first: n_w, n_second: n_v, space }
    }

    /// Composition of relations `U ← V` and `V ← W`, computed literally as
    /// `((L₁ × L₂) ∩ 𝒞 + 𝒞^⊥) / 𝒞^⊥` with `𝒞 = 𝕌 × Δ × 𝕎̄`, realizing the
    /// quotient as the projection `(u, x, x, w) ↦ (u, w)`.
    pub fn compose(&self, other: &LagrangianRelation<F>) -> Result<Self, LinearDiracError> {
        if self.n_second != other.n_first {
            return Err(LinearDiracError::DimensionMismatch(format!(
                "middle dimensions differ: {} vs {}",
                self.n_second, other.n_first
            )));
        }
        let (nu, nv, nw) = (self.n_first, self.n_second, other.n_second);
        let ambient = 2 * nu + 4 * nv + 2 * nw;

        let product = Subspace::from_rows(
            ambient,
            self.space.basis().block_diag(other.space.basis()),
        );

        let mut c_rows = Vec::with_capacity(2 * nu + 2 * nv + 2 * nw);
        for i in 0..2 * nu {
            let mut row = vec![F::zero(); ambient];
            row[i] = F::one();
            c_rows.push(row);
        }
        for j in 0..2 * nv {
            let mut row = vec![F::zero(); ambient];
            row[2 * nu + j] = F::one();
            row[2 * nu + 2 * nv + j] = F::one();
            c_rows.push(row);
        }
        for k in 0..2 * nw {
            let mut row = vec![F::zero(); ambient];
            row[2 * nu + 4 * nv + k] = F::one();
            c_rows.push(row);
        }
        let c = Subspace::from_rows(ambient, Matrix::from_rows(c_rows));
        let pairing = SplitPairing::with_blocks(vec![
            (nu, false),
            (nv, true),
            (nv, false),
            (nw, true),
        ]);
        let c_perp = pairing.orthogonal(&c);
        debug_assert!(c_perp.is_subspace_of(&c), "𝒞^⊥ = {{0}} × Δ × {{0}} ⊆ 𝒞");

        let numerator = product.intersect(&c).sum(&c_perp);
        let cols: Vec<usize> = (0..2 * nu)
            .chain(2 * nu + 4 * nv..ambient)
            .collect();
        let projected = if numerator.dim() == 0 {
            Matrix::zeros_with(0, 2 * nu + 2 * nw, F::zero())
        } else {
            numerator.basis().select_columns(&cols)
        };
        let space = Subspace::from_rows(2 * nu + 2 * nw, projected);
        assert_eq!(space.dim(), nu + nw, "compositions of lagrangian relations are lagrangian");
        debug_assert!(Self::pairing(nu, nw).is_isotropic(&space));
        Ok(LagrangianRelation { n_first: nu, n_second: nw, space })
    }

    /// Reads the relation back as a Dirac structure when one factor is the
    /// zero space.
    pub fn into_dirac(self) -> Result<LinearDirac<F>, LinearDiracError> {
        if self.n_first != 0 && self.n_second != 0 {
            return Err(LinearDiracError::DimensionMismatch(
                "relation has two nontrivial factors".into(),
            ));
        }
        LinearDirac::from_subspace(self.space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, Subspace};
    use crate::scalar::{rat, Rational};

    fn skew2(a: i64) -> Matrix<Rational> {
        Matrix::from_i64(&[&[0, a], &[-a, 0]])
    }

    #[test]
    fn bivector_graph_examples() {
        // π = 0 on V = F²: L = {0} ⊕ V*.
        let l = LinearDirac::graph_of_bivector(&skew2(0)).unwrap();
        assert_eq!(l, LinearDirac::from_distribution(&Subspace::<Rational>::zero_space(2)));

        // π^{12} = 1: L = span{(e2, e1*), (−e1, e2*)}.
        let l = LinearDirac::graph_of_bivector(&skew2(1)).unwrap();
        let expected = Subspace::from_rows(
            4,
            Matrix::from_i64(&[&[0, 1, 1, 0], &[-1, 0, 0, 1]]),
        );
        assert_eq!(l.space(), &expected);
        assert!(is_lagrangian(l.space()));

        let err = LinearDirac::graph_of_bivector(&Matrix::from_i64(&[&[0, 1], &[1, 0]]));
        assert_eq!(err.unwrap_err(), LinearDiracError::NonSkew);
    }

    #[test]
    fn twoform_graph_examples() {
        let l = LinearDirac::graph_of_twoform(&skew2(0)).unwrap();
        assert_eq!(l, LinearDirac::from_distribution(&Subspace::full(2)));

        let l = LinearDirac::graph_of_twoform(&skew2(1)).unwrap();
        let expected = Subspace::from_rows(
            4,
            Matrix::from_i64(&[&[1, 0, 0, 1], &[0, 1, -1, 0]]),
        );
        assert_eq!(l.space(), &expected);

        // Nondegenerate: graph_of_twoform(ω) = graph_of_bivector(ω⁻¹).
        let omega = Matrix::from_i64(&[&[0, 3], &[-3, 0]]);
        let pi = omega.inverse().unwrap();
        assert_eq!(
            LinearDirac::graph_of_twoform(&omega).unwrap(),
            LinearDirac::graph_of_bivector(&pi).unwrap()
        );
    }

    #[test]
    fn distribution_examples() {
        let f = Subspace::from_rows(2, Matrix::from_i64(&[&[1, 0]]));
        let l = LinearDirac::from_distribution(&f);
        let expected =
            Subspace::from_rows(4, Matrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 0, 1]]));
        assert_eq!(l.space(), &expected);
    }

    #[test]
    fn lagrangian_predicate() {
        // span{(e1, e1*)} fails: self-pairing is 2.
        let s = Subspace::from_rows(4, Matrix::from_i64(&[&[1, 0, 1, 0]]));
        assert!(!is_lagrangian(&s));
        // dimension 3 ≠ 2 fails.
        let s = Subspace::from_rows(
            4,
            Matrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]),
        );
        assert!(!is_lagrangian(&s));
    }

    #[test]
    fn gauge_examples() {
        let l = LinearDirac::graph_of_twoform(&skew2(1)).unwrap();
        assert_eq!(l.gauge(&skew2(0)).unwrap(), l);

        let b = skew2(5);
        let omega = skew2(2);
        let sum = Matrix::from_i64(&[&[0, 7], &[-7, 0]]);
        assert_eq!(
            LinearDirac::graph_of_twoform(&omega).unwrap().gauge(&b).unwrap(),
            LinearDirac::graph_of_twoform(&sum).unwrap()
        );

        // Involution.
        let f = Subspace::from_rows(2, Matrix::from_i64(&[&[1, 1]]));
        let l = LinearDirac::from_distribution(&f);
        let back = l.gauge(&b).unwrap().gauge(&b.neg_mat()).unwrap();
        assert_eq!(back, l);

        // Gauge of a distribution: {(X, α) | X ∈ F, (α − i_X B)|_F = 0}.
        let g = l.gauge(&b).unwrap();
        for row in g.space().basis().rows_iter() {
            let (v, alpha) = row.split_at(2);
            assert!(f.contains(v));
            // (α − i_v B) must annihilate F's generator (1,1).
            let ivb: Vec<Rational> =
                (0..2).map(|j| (0..2).map(|i| v[i].clone() * b.at(i, j)).sum()).collect();
            let diff0 = alpha[0].clone() - ivb[0].clone();
            let diff1 = alpha[1].clone() - ivb[1].clone();
            assert_eq!(diff0 + diff1, rat(0));
        }
    }

    fn canonical_pi(n_pairs: usize) -> Matrix<Rational> {
        // {q_i, p_i} = 1 in coordinates (q1, p1, q2, p2, ...).
        let n = 2 * n_pairs;
        let mut m = Matrix::zeros_with(n, n, rat(0));
        for i in 0..n_pairs {
            m.set(2 * i, 2 * i + 1, rat(1));
            m.set(2 * i + 1, 2 * i, rat(-1));
        }
        m
    }

    fn canonical_omega(n_pairs: usize) -> Matrix<Rational> {
        canonical_pi(n_pairs).inverse().unwrap()
    }

    #[test]
    fn backward_of_inclusion_pulls_back_forms() {
        // Inclusion F² ↪ F⁴ of the (q1, p1) plane.
        let incl = LinearMap::new(Matrix::from_i64(&[
            &[1, 0],
            &[0, 1],
            &[0, 0],
            &[0, 0],
        ]));
        let l4 = LinearDirac::graph_of_twoform(&canonical_omega(2)).unwrap();
        let pulled = l4.backward(&incl).unwrap();
        assert_eq!(
            pulled,
            LinearDirac::graph_of_twoform(&canonical_omega(1)).unwrap()
        );

        // identity map is neutral
        let id = LinearMap::new(Matrix::identity(4));
        assert_eq!(l4.backward(&id).unwrap(), l4);
    }

    #[test]
    fn forward_of_projection_pushes_bivectors() {
        let proj = LinearMap::new(Matrix::from_i64(&[
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
        ]));
        let l4 = LinearDirac::graph_of_bivector(&canonical_pi(2)).unwrap();
        let pushed = l4.forward(&proj).unwrap();
        assert_eq!(pushed, LinearDirac::graph_of_bivector(&canonical_pi(1)).unwrap());

        let id = LinearMap::new(Matrix::identity(4));
        assert_eq!(l4.forward(&id).unwrap(), l4);
    }

    #[test]
    fn roundtrip_criteria() {
        // Surjective φ: F ∘ B = Id for all L_W.
        let proj = LinearMap::new(Matrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]));
        let l4 = LinearDirac::graph_of_bivector(&canonical_pi(2)).unwrap();
        let l2 = LinearDirac::graph_of_twoform(&canonical_omega(1)).unwrap();
        let (fb, _) = roundtrip_conditions(&l4, &l2, &proj).unwrap();
        assert!(fb);

        // Injective φ: B ∘ F = Id for all L_V.
        let incl = LinearMap::new(Matrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0], &[0, 0]]));
        let (_, bf) = roundtrip_conditions(&l2, &l4, &incl).unwrap();
        assert!(bf);

        // Zero map on V = W = F², L_W a nonzero 2-form graph: F(B(L_W)) is
        // the zero distribution's structure, not L_W.
        let zero = LinearMap::new(Matrix::zeros_with(2, 2, rat(0)));
        let lw = LinearDirac::graph_of_twoform(&skew2(1)).unwrap();
        let (fb, bf) = roundtrip_conditions(&lw, &lw, &zero).unwrap();
        assert!(!fb);
        assert!(!bf);
        let fb_image = lw.backward(&zero).unwrap().forward(&zero).unwrap();
        assert_eq!(
            fb_image,
            LinearDirac::from_distribution(&Subspace::<Rational>::zero_space(2))
        );
    }

    #[test]
    fn relation_graph_and_identity_composition() {
        let phi = LinearMap::new(Matrix::from_i64(&[&[1, 2], &[0, 1], &[3, 0]]));
        let g = LagrangianRelation::graph(&phi);
        assert_eq!(g.space().dim(), 5); // dim V + dim W

        let id = LagrangianRelation::graph(&LinearMap::new(Matrix::identity(3)));
        let l = LinearDirac::graph_of_bivector(&Matrix::from_i64(&[
            &[0, 1, 0],
            &[-1, 0, 2],
            &[0, -2, 0],
        ]))
        .unwrap();
        let composed = l.as_relation_target().compose(&id).unwrap().into_dirac().unwrap();
        assert_eq!(composed, l);
    }

    #[test]
    fn backward_and_forward_agree_with_relation_composition() {
        let phi = LinearMap::new(Matrix::from_i64(&[&[1, 2], &[0, 1], &[1, 1]]));
        let l3 = LinearDirac::graph_of_twoform(&Matrix::from_i64(&[
            &[0, 1, -1],
            &[-1, 0, 2],
            &[1, -2, 0],
        ]))
        .unwrap();
        let gamma = LagrangianRelation::graph(&phi);
        let via_relation =
            l3.as_relation_target().compose(&gamma).unwrap().into_dirac().unwrap();
        assert_eq!(via_relation, l3.backward(&phi).unwrap());

        let l2 = LinearDirac::graph_of_bivector(&skew2(3)).unwrap();
        let via_relation = gamma.compose(&l2.as_relation_source()).unwrap().into_dirac().unwrap();
        assert_eq!(via_relation, l2.forward(&phi).unwrap());
    }

    #[test]
    fn decompose_examples() {
        // Symplectic graph: K = 0, R = V, Ω = ω.
        let omega = canonical_omega(1);
        let l = LinearDirac::graph_of_twoform(&omega).unwrap();
        let d = l.decompose();
        assert_eq!(d.null.dim(), 0);
        assert_eq!(d.range, Subspace::full(2));
        assert_eq!(d.leaf_form, omega);

        // F ⊕ F°: K = R = F, Ω = 0.
        let f = Subspace::from_rows(2, Matrix::from_i64(&[&[1, 0]]));
        let d = LinearDirac::from_distribution(&f).decompose();
        assert_eq!(d.null, f);
        assert_eq!(d.range, f);
        assert!(d.leaf_form.is_zero_matrix());

        // The z = 0 fiber of the singular structure on F³:
        // span{(∂y, 0), (∂x, 0), (0, dz)}.
        let space = Subspace::from_rows(
            6,
            Matrix::from_i64(&[
                &[0, 1, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 1],
            ]),
        );
        let l = LinearDirac::from_subspace(space).unwrap();
        let d = l.decompose();
        let exy = Subspace::from_rows(3, Matrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(d.null, exy);
        assert_eq!(d.range, exy);
        assert!(d.leaf_form.is_zero_matrix());
        assert_eq!(l.as_bivector().unwrap_err(), LinearDiracError::TransversalityFailed);
    }

    #[test]
    fn graph_conversions_roundtrip() {
        let pi = Matrix::from_i64(&[&[0, 2, -1], &[-2, 0, 4], &[1, -4, 0]]);
        let l = LinearDirac::graph_of_bivector(&pi).unwrap();
        assert_eq!(l.as_bivector().unwrap(), pi);

        assert!(LinearDirac::from_distribution(&Subspace::<Rational>::full(2))
            .as_twoform()
            .unwrap()
            .is_zero_matrix());
    }
}
