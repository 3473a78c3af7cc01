//! Dirac structures on `ℝⁿ` with rational-function coefficients.
//!
//! A structure is carried by a frame of `n` sections of `TM ⊕ T*M` that
//! generically spans a lagrangian subbundle. The construction kind
//! (bivector graph, 2-form graph, distribution plus gauge, raw frame) is
//! kept alongside the materialized frame so special-case computations can
//! cross-validate the generic ones. Claims made over the rational-function
//! field hold off a singular locus, and `singular_locus_hint` is a single
//! polynomial whose complement certifies them pointwise.

pub mod calculus;
pub mod maps;

pub use calculus::{
    courant_bracket, differential, dorfman_bracket, hamiltonian_section, jacobiator, pairing,
    poisson_bracket, sharp_bivector, twisted_courant_bracket, Section, ThreeForm,
};
pub use maps::{
    backward_image, check_dirac_map, forward_image, CleanReport, DiracMapCheck, ForwardReport,
    MapMode, PolyMap, ProbeConfig,
};

use thiserror::Error;

use crate::linalg::{Field, Matrix, SplitPairing, Subspace};
use crate::linear_dirac::LinearDirac;
use crate::probe::ProbeGen;
use crate::scalar::{Poly, Point, Rational, ScalarError, ScalarExpr, Vars};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldDiracError {
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("matrix is not skew-symmetric")]
    NonSkew,
    #[error("3-form is not closed")]
    NotClosed,
    #[error("degenerate frame: generic rank {rank} < {needed}; the minor on columns {columns:?} vanishes identically")]
    DegenerateFrame { rank: usize, needed: usize, columns: Vec<usize> },
    #[error("frame does not span a lagrangian subbundle: pairing of sections {0} and {1} is nonzero")]
    NotLagrangianFrame(usize, usize),
    #[error("function is not admissible: its differential leaves the covector projection of L")]
    NotAdmissible,
    #[error("pair is not a section of the structure")]
    NotASection,
    #[error("singular point {0}: the fiber is not certified there")]
    SingularPoint(Point),
    #[error("map is not a submersion at probe {0}")]
    NotASubmersionAtProbe(Point),
    #[error("forward images differ on the fiber pair {0}, {1}")]
    InvarianceViolated(Point, Point),
    #[error("probe pair {0}, {1} does not lie on one fiber")]
    FiberPairImagesDiffer(Point, Point),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Construction kind; the frame is materialized in every case.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DiracKind {
    BivectorGraph(Matrix<ScalarExpr>),
    TwoFormGraph(Matrix<ScalarExpr>),
    DistributionPlusGauge { generators: Matrix<ScalarExpr>, gauge: Matrix<ScalarExpr> },
    Frame,
}

/// A Dirac structure on `ℝⁿ` with rational-function coefficients.
#[derive(Clone, Debug)]
pub struct DiracField {
    vars: Vars,
    kind: DiracKind,
    frame: Vec<Section>,
    singular_hint: Poly,
}

fn lcm_denominators<'a>(entries: impl Iterator<Item = &'a ScalarExpr>, vars: &Vars) -> Poly {
    entries.fold(Poly::one(vars), |acc, e| Poly::lcm(&acc, e.den()))
}

fn check_square(vars: &Vars, m: &Matrix<ScalarExpr>) -> Result<(), FieldDiracError> {
    let n = vars.len();
    if m.rows() != n || m.cols() != n {
        return Err(FieldDiracError::ArityMismatch(format!(
            "matrix is {}x{}, ambient dimension is {}",
            m.rows(),
            m.cols(),
            n
        )));
    }
    if !m.is_skew() {
        return Err(FieldDiracError::NonSkew);
    }
    Ok(())
}

impl DiracField {
    /// Graph of a skew bivector matrix: frame sections `(π♯ dx^i, dx^i)`.
    pub fn from_bivector(vars: &Vars, pi: Matrix<ScalarExpr>) -> Result<Self, FieldDiracError> {
        check_square(vars, &pi)?;
        let n = vars.len();
        let frame: Vec<Section> = (0..n)
            .map(|i| {
                let mut form = calculus::zero_vec(vars);
                form[i] = ScalarExpr::one(vars);
                Section { vf: pi.row_vec(i), form }
            })
            .collect();
        let hint = lcm_denominators(pi.rows_iter().flatten(), vars);
        Ok(DiracField { vars: vars.clone(), kind: DiracKind::BivectorGraph(pi), frame, singular_hint: hint })
    }

    /// Graph of a skew 2-form matrix: frame sections `(∂_i, ω♯ ∂_i)`.
    pub fn from_twoform(vars: &Vars, omega: Matrix<ScalarExpr>) -> Result<Self, FieldDiracError> {
        check_square(vars, &omega)?;
        let n = vars.len();
        let frame: Vec<Section> = (0..n)
            .map(|i| {
                let mut vf = calculus::zero_vec(vars);
                vf[i] = ScalarExpr::one(vars);
                Section { vf, form: omega.row_vec(i) }
            })
            .collect();
        let hint = lcm_denominators(omega.rows_iter().flatten(), vars);
        Ok(DiracField { vars: vars.clone(), kind: DiracKind::TwoFormGraph(omega), frame, singular_hint: hint })
    }

    /// Gauge-shifted regular distribution `τ_B(F ⊕ F°)`: frame sections
    /// `(X_a, i_{X_a} B)` for a canonical basis of `F` plus `(0, κ_l)` for a
    /// basis of the annihilator, both over the function field.
    pub fn from_distribution_gauge(
        vars: &Vars,
        generators: Matrix<ScalarExpr>,
        gauge: Matrix<ScalarExpr>,
    ) -> Result<Self, FieldDiracError> {
        let n = vars.len();
        check_square(vars, &gauge)?;
        if generators.cols() != n {
            return Err(FieldDiracError::ArityMismatch(format!(
                "generators have {} components, ambient dimension is {}",
                generators.cols(),
                n
            )));
        }
        let dist = Subspace::from_rows(n, generators.clone());
        let ann = dist.dot_annihilator();
        let mut frame = Vec::with_capacity(n);
        for x in dist.basis().rows_iter() {
            let ixb = calculus::contract_vector_twoform(x, &gauge);
            frame.push(Section { vf: x.to_vec(), form: ixb });
        }
        for kappa in ann.basis().rows_iter() {
            frame.push(Section { vf: calculus::zero_vec(vars), form: kappa.to_vec() });
        }
        debug_assert_eq!(frame.len(), n);
        // RREF bases carry literal unit pivots, so wherever every entry is
        // defined the evaluated frame keeps rank n; denominators are the
        // only obstruction.
        let hint = lcm_denominators(frame.iter().flat_map(|s| s.vf.iter().chain(&s.form)), vars);
        let field = DiracField {
            vars: vars.clone(),
            kind: DiracKind::DistributionPlusGauge { generators, gauge },
            frame,
            singular_hint: hint,
        };
        debug_assert!(field.frame_is_lagrangian().is_ok());
        Ok(field)
    }

    /// Wraps an explicit frame after checking generic rank `n` (degenerate
    /// frames are rejected with the vanishing minor) and the lagrangian
    /// identity over the function field.
    pub fn from_frame(vars: &Vars, frame: Vec<Section>) -> Result<Self, FieldDiracError> {
        let n = vars.len();
        if frame.len() != n || frame.iter().any(|s| s.dim() != n) {
            return Err(FieldDiracError::ArityMismatch(format!(
                "need {n} sections of dimension {n}"
            )));
        }
        let matrix = frame_matrix_of(&frame);
        let pivots = matrix.rref_pivot_columns();
        let rank = pivots.len();
        if rank < n {
            let mut columns = pivots.clone();
            for c in 0..2 * n {
                if columns.len() == n {
                    break;
                }
                if !columns.contains(&c) {
                    columns.push(c);
                }
            }
            columns.sort_unstable();
            return Err(FieldDiracError::DegenerateFrame { rank, needed: n, columns });
        }
        let minor = matrix.select_columns(&pivots).det();
        let hint_den = lcm_denominators(matrix.rows_iter().flatten(), vars);
        let hint = (&hint_den * minor.num()).normalize_sign();
        let field = DiracField { vars: vars.clone(), kind: DiracKind::Frame, frame, singular_hint: hint };
        field.frame_is_lagrangian()?;
        Ok(field)
    }

    fn frame_is_lagrangian(&self) -> Result<(), FieldDiracError> {
        let n = self.dim();
        let a = self.frame_matrix();
        let g = SplitPairing::standard(n).gram::<ScalarExpr>();
        let gram = a.matmul(&g).matmul(&a.transpose());
        for i in 0..n {
            for j in 0..n {
                if !gram.at(i, j).is_zero() {
                    return Err(FieldDiracError::NotLagrangianFrame(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn kind(&self) -> &DiracKind {
        &self.kind
    }

    pub fn frame(&self) -> &[Section] {
        &self.frame
    }

    /// A polynomial whose complement certifies the frame: wherever it is
    /// nonzero, every coefficient is defined and the evaluated frame spans
    /// an `n`-dimensional lagrangian fiber.
    pub fn singular_locus_hint(&self) -> &Poly {
        &self.singular_hint
    }

    pub fn frame_matrix(&self) -> Matrix<ScalarExpr> {
        frame_matrix_of(&self.frame)
    }

    /// The generic fiber over the rational-function field, as a linear
    /// Dirac structure whose field is `ScalarExpr`.
    pub fn generic_fiber(&self) -> LinearDirac<ScalarExpr> {
        let space = Subspace::from_rows(2 * self.dim(), self.frame_matrix());
        LinearDirac::from_subspace(space).expect("frames span lagrangian subbundles")
    }

    /// Canonical row space of the frame; two fields are generically equal
    /// iff these agree.
    pub fn frame_space(&self) -> Subspace<ScalarExpr> {
        Subspace::from_rows(2 * self.dim(), self.frame_matrix())
    }

    pub fn equal_generically(&self, other: &DiracField) -> bool {
        self.vars == other.vars && self.frame_space() == other.frame_space()
    }

    /// Membership of a section in the generic span of the frame.
    pub fn contains_section(&self, s: &Section) -> bool {
        s.dim() == self.dim() && self.frame_space().contains(&s.flat())
    }

    /// Gauge transform by a skew matrix `B`: `(X, α) ↦ (X, α + i_X B)`.
    /// Graph and distribution kinds stay in kind; bivector graphs generally
    /// leave the bivector class and come back as raw frames.
    pub fn gauge(&self, b: &Matrix<ScalarExpr>) -> Result<DiracField, FieldDiracError> {
        check_square(&self.vars, b)?;
        match &self.kind {
            DiracKind::TwoFormGraph(omega) => {
                DiracField::from_twoform(&self.vars, omega.add_mat(b))
            }
            DiracKind::DistributionPlusGauge { generators, gauge } => {
                DiracField::from_distribution_gauge(
                    &self.vars,
                    generators.clone(),
                    gauge.add_mat(b),
                )
            }
            DiracKind::BivectorGraph(_) | DiracKind::Frame => {
                let shifted: Vec<Section> = self
                    .frame
                    .iter()
                    .map(|s| {
                        let ixb = calculus::contract_vector_twoform(&s.vf, b);
                        Section {
                            vf: s.vf.clone(),
                            form: s.form.iter().zip(&ixb).map(|(a, c)| a + c).collect(),
                        }
                    })
                    .collect();
                DiracField::from_frame(&self.vars, shifted)
            }
        }
    }

    /// The Courant tensor `Υ[i][j][k] = ⟨⟦a_i, a_j⟧, a_k⟩` of the frame;
    /// vanishes identically iff the structure is integrable.
    pub fn courant_tensor(&self) -> CourantTensor {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n * n);
        let mut brackets = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                brackets.push(courant_bracket(&self.frame[i], &self.frame[j]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    entries.push(pairing(&brackets[i * n + j], &self.frame[k]));
                }
            }
        }
        CourantTensor { n, entries }
    }

    /// Integrability certification. Either every Courant-tensor entry is
    /// the zero rational function, or a witness entry together with a
    /// rational point off the singular locus where it evaluates nonzero.
    pub fn is_integrable(&self) -> IntegrabilityVerdict {
        self.is_integrable_seeded(crate::probe::DEFAULT_SEED)
    }

    pub fn is_integrable_seeded(&self, seed: u64) -> IntegrabilityVerdict {
        let tensor = self.courant_tensor();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let entry = tensor.at(i, j, k);
                    if entry.is_zero() {
                        continue;
                    }
                    let mut gen = ProbeGen::new(seed);
                    let hint = &self.singular_hint;
                    let point = gen
                        .points_where(n, 1, |p| {
                            hint.eval(p).map(|v| Field::is_zero(&v)).unwrap_or(true)
                                || entry
                                    .evaluate(p)
                                    .map(|v| Field::is_zero(&v))
                                    .unwrap_or(true)
                        })
                        .remove(0);
                    let value = entry.evaluate(&point).expect("witness point is regular");
                    return IntegrabilityVerdict::NotIntegrable(Witness {
                        indices: (i, j, k),
                        point,
                        value,
                    });
                }
            }
        }
        IntegrabilityVerdict::IntegrableOnGenericLocus
    }

    /// Solves `(X, df) ∈ L` over the function field. The kernel basis spans
    /// `L ∩ TM` generically; any two solutions differ by kernel elements.
    pub fn hamiltonian_vf(&self, f: &ScalarExpr) -> Result<HamiltonianData, FieldDiracError> {
        self.check_vars(f)?;
        let n = self.dim();
        let k = self.frame_matrix().kernel();
        let k1 = k.select_columns(&(0..n).collect::<Vec<_>>());
        let k2 = k.select_columns(&(n..2 * n).collect::<Vec<_>>());
        let df = differential(f);
        let rhs: Vec<ScalarExpr> = k2.mul_vec(&df).iter().map(|e| -e).collect();
        let particular = k1.solve(&rhs).ok_or(FieldDiracError::NotAdmissible)?;
        let kernel = k1.kernel();
        let kernel_basis: Vec<Vec<ScalarExpr>> =
            (0..kernel.rows()).map(|r| kernel.row_vec(r)).collect();
        Ok(HamiltonianData { vector_field: particular, kernel_basis })
    }

    /// `{f, g} = dg(X_f)` on admissible functions. Well-definedness is
    /// asserted by shifting the representative along the kernel.
    pub fn admissible_bracket(
        &self,
        f: &ScalarExpr,
        g: &ScalarExpr,
    ) -> Result<ScalarExpr, FieldDiracError> {
        let hf = self.hamiltonian_vf(f)?;
        self.hamiltonian_vf(g)?; // g must be admissible too
        let dg = differential(g);
        let value = calculus::form_on_vector(&dg, &hf.vector_field);
        for kappa in &hf.kernel_basis {
            let shifted: Vec<ScalarExpr> = hf
                .vector_field
                .iter()
                .zip(kappa)
                .map(|(x, k)| x + k)
                .collect();
            assert_eq!(
                calculus::form_on_vector(&dg, &shifted),
                value,
                "admissible bracket is independent of the hamiltonian representative"
            );
        }
        Ok(value)
    }

    /// Anchor and bracket of the Lie algebroid structure on `Γ(L)`: the
    /// anchor is the tangent projection and the bracket is the Courant
    /// bracket, which stays in `Γ(L)` when the structure is integrable.
    pub fn anchor_and_algebroid_bracket(
        &self,
        a: &Section,
        b: &Section,
    ) -> Result<(Vec<ScalarExpr>, Section), FieldDiracError> {
        if !self.contains_section(a) || !self.contains_section(b) {
            return Err(FieldDiracError::NotASection);
        }
        let bracket = courant_bracket(a, b);
        if self.courant_tensor().is_zero() {
            assert!(
                self.contains_section(&bracket),
                "integrable structures close under the Courant bracket"
            );
        }
        Ok((a.vf.clone(), bracket))
    }

    /// Whether the flows of all given vector fields preserve the structure:
    /// `L_Z(X, α) = ([Z,X], L_Z α)` must stay in the generic span of the
    /// frame for every frame section.
    pub fn is_invariant_under(&self, z_fields: &[Vec<ScalarExpr>]) -> bool {
        let space = self.frame_space();
        z_fields.iter().all(|z| {
            self.frame.iter().all(|a| {
                let moved = Section {
                    vf: calculus::lie_bracket(z, &a.vf),
                    form: calculus::lie_derivative_oneform(z, &a.form),
                };
                space.contains(&moved.flat())
            })
        })
    }

    /// The evaluated fiber at a rational point off the singular locus.
    pub fn pointwise(&self, p: &Point) -> Result<LinearDirac<Rational>, FieldDiracError> {
        let n = self.dim();
        if p.dim() != n {
            return Err(FieldDiracError::ArityMismatch(format!(
                "point has dimension {}, ambient is {}",
                p.dim(),
                n
            )));
        }
        let hint = self
            .singular_hint
            .eval(p)
            .map_err(|_| FieldDiracError::SingularPoint(p.clone()))?;
        if Field::is_zero(&hint) {
            return Err(FieldDiracError::SingularPoint(p.clone()));
        }
        let rows: Result<Vec<Vec<Rational>>, ScalarError> = self
            .frame
            .iter()
            .map(|s| s.flat().iter().map(|e| e.evaluate(p)).collect())
            .collect();
        let rows = rows.map_err(|_| FieldDiracError::SingularPoint(p.clone()))?;
        let space = Subspace::from_rows(2 * n, Matrix::from_rows(rows));
        Ok(LinearDirac::from_subspace(space).expect("certified fibers are lagrangian"))
    }

    /// Recognizes the structure as a bivector graph over the function
    /// field, when `L ∩ TM = 0` generically.
    pub fn try_to_bivector_graph(&self) -> Option<DiracField> {
        let pi = self.generic_fiber().as_bivector().ok()?;
        Some(DiracField::from_bivector(&self.vars, pi).expect("skew by construction"))
    }

    /// Recognizes the structure as a 2-form graph over the function field,
    /// when `L ∩ T*M = 0` generically.
    pub fn try_to_twoform_graph(&self) -> Option<DiracField> {
        let omega = self.generic_fiber().as_twoform().ok()?;
        Some(DiracField::from_twoform(&self.vars, omega).expect("skew by construction"))
    }

    fn check_vars(&self, e: &ScalarExpr) -> Result<(), FieldDiracError> {
        if e.vars() != &self.vars {
            return Err(FieldDiracError::ArityMismatch(format!(
                "expression over {:?}, structure over {:?}",
                e.vars(),
                self.vars
            )));
        }
        Ok(())
    }
}

fn frame_matrix_of(frame: &[Section]) -> Matrix<ScalarExpr> {
    Matrix::from_rows(frame.iter().map(Section::flat).collect())
}

/// Solution data of `(X, df) ∈ L` over the function field.
#[derive(Clone, Debug)]
pub struct HamiltonianData {
    /// One hamiltonian vector field for `f`.
    pub vector_field: Vec<ScalarExpr>,
    /// Basis of `L ∩ TM` over the function field; the full solution set is
    /// the particular field plus this span.
    pub kernel_basis: Vec<Vec<ScalarExpr>>,
}

/// `Υ` on the frame, a cube of rational functions.
#[derive(Clone, Debug)]
pub struct CourantTensor {
    n: usize,
    entries: Vec<ScalarExpr>,
}

impl CourantTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> &ScalarExpr {
        &self.entries[(i * self.n + j) * self.n + k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ScalarExpr::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.at(i, j, k);
                    if !(&(v + self.at(j, i, k))).is_zero() {
                        return false;
                    }
                    if !(&(v + self.at(i, k, j))).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Outcome of integrability certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegrabilityVerdict {
    /// Every Courant-tensor entry is the zero rational function, so the
    /// structure is integrable wherever the frame is a frame.
    IntegrableOnGenericLocus,
    NotIntegrable(Witness),
}

impl IntegrabilityVerdict {
    pub fn is_integrable(&self) -> bool {
        matches!(self, IntegrabilityVerdict::IntegrableOnGenericLocus)
    }
}

/// A nonzero Courant-tensor entry and a regular point where it does not
/// vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub indices: (usize, usize, usize),
    pub point: Point,
    pub value: Rational,
}
