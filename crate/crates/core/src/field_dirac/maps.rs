//! Backward and forward images of Dirac structures along polynomial maps,
//! with clean-intersection and invariance diagnostics.
//!
//! Smoothness of an image is semi-decided: the generic (function-field)
//! rank of the relevant intersection is compared with its pointwise rank at
//! probe points. A jump at a probe is a definite failure of the
//! clean-intersection condition; absence of jumps is reported as clean at
//! the probes, nothing stronger.

use crate::linalg::{Field, Matrix, Subspace};
use crate::linear_dirac::{LinearDirac, LinearMap};
use crate::probe::{ProbeGen, DEFAULT_PROBE_COUNT, DEFAULT_SEED};
use crate::scalar::{Poly, Point, Rational, ScalarError, ScalarExpr, Vars};

use super::calculus::{self, Section};
use super::{DiracField, DiracKind, FieldDiracError};

/// Polynomial map between coordinate spaces: one component per target
/// variable, each a polynomial over the source variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMap {
    source: Vars,
    target: Vars,
    components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(source: Vars, target: Vars, components: Vec<Poly>) -> Result<Self, FieldDiracError> {
        if components.len() != target.len() {
            return Err(FieldDiracError::ArityMismatch(format!(
                "{} components for target dimension {}",
                components.len(),
                target.len()
            )));
        }
        for c in &components {
            if c.vars() != &source {
                return Err(FieldDiracError::ArityMismatch(
                    "component over the wrong source variables".into(),
                ));
            }
        }
        Ok(PolyMap { source, target, components })
    }

    pub fn identity(vars: &Vars) -> Self {
        let components = (0..vars.len()).map(|i| Poly::var(vars, i)).collect();
        PolyMap { source: vars.clone(), target: vars.clone(), components }
    }

    pub fn source(&self) -> &Vars {
        &self.source
    }

    pub fn target(&self) -> &Vars {
        &self.target
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn source_dim(&self) -> usize {
        self.source.len()
    }

    pub fn target_dim(&self) -> usize {
        self.target.len()
    }

    /// Jacobian `J[a][i] = ∂φ^a/∂x^i` over the source, `n × m`.
    pub fn jacobian(&self) -> Matrix<ScalarExpr> {
        calculus::jacobian_of_polys(&self.source, &self.components)
    }

    /// Jacobian evaluated exactly at a source point.
    pub fn jacobian_at(&self, p: &Point) -> Result<Matrix<Rational>, ScalarError> {
        let m = self.source.len();
        let rows: Result<Vec<Vec<Rational>>, ScalarError> = self
            .components
            .iter()
            .map(|c| (0..m).map(|i| c.partial(i).eval(p)).collect())
            .collect();
        Ok(Matrix::from_rows(rows?))
    }

    pub fn apply(&self, p: &Point) -> Result<Point, ScalarError> {
        let coords: Result<Vec<Rational>, ScalarError> =
            self.components.iter().map(|c| c.eval(p)).collect();
        Ok(Point::new(coords?))
    }

    /// `self ∘ inner`, a map out of `inner`'s source.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap, FieldDiracError> {
        if inner.target != self.source {
            return Err(FieldDiracError::ArityMismatch(
                "inner map's target differs from outer map's source".into(),
            ));
        }
        let components = self
            .components
            .iter()
            .map(|c| c.substitute(&inner.components))
            .collect();
        PolyMap::new(inner.source.clone(), self.target.clone(), components)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self
                .components
                .iter()
                .enumerate()
                .all(|(i, c)| c == &Poly::var(&self.source, i))
    }

    /// Pullback of a scalar: `e ∘ φ`. Fails when the image lies in the
    /// denominator's zero set.
    pub fn pullback_expr(&self, e: &ScalarExpr) -> Result<ScalarExpr, ScalarError> {
        e.substitute(&self.components)
    }
}

/// Probe policy for pointwise diagnostics: user points are always used,
/// and `count` extra points are drawn deterministically from `seed`.
#[derive(Clone, Copy, Debug)]
pub struct ProbeConfig {
    pub seed: u64,
    pub count: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { seed: DEFAULT_SEED, count: DEFAULT_PROBE_COUNT }
    }
}

/// Ranks of the obstruction space at the probes, versus its generic rank.
#[derive(Clone, Debug)]
pub struct CleanReport {
    /// Generic rank of the intersection controlling smoothness.
    pub generic_rank: usize,
    /// `(probe, pointwise rank)` for every probe checked.
    pub probe_ranks: Vec<(Point, usize)>,
    /// Probes where the pointwise rank differs from the generic rank: the
    /// clean-intersection condition fails there.
    pub flagged: Vec<Point>,
}

impl CleanReport {
    pub fn is_clean_at_probes(&self) -> bool {
        self.flagged.is_empty()
    }
}

fn membership_kernel(d: &DiracField) -> (Matrix<ScalarExpr>, Matrix<ScalarExpr>) {
    let n = d.dim();
    let k = d.frame_matrix().kernel();
    let k1 = k.select_columns(&(0..n).collect::<Vec<_>>());
    let k2 = k.select_columns(&(n..2 * n).collect::<Vec<_>>());
    (k1, k2)
}

fn pulled_frame_matrix(d: &DiracField, phi: &PolyMap) -> Result<Matrix<ScalarExpr>, FieldDiracError> {
    let rows: Result<Vec<Vec<ScalarExpr>>, ScalarError> = d
        .frame()
        .iter()
        .map(|s| s.flat().iter().map(|e| phi.pullback_expr(e)).collect())
        .collect();
    Ok(Matrix::from_rows(rows?))
}

/// Assembles the probe set for a source space: user points (validated for
/// dimension) plus deterministic extras avoiding `reject`.
fn assemble_probes(
    dim: usize,
    user: &[Point],
    cfg: &ProbeConfig,
    mut reject: impl FnMut(&Point) -> bool,
) -> Result<Vec<Point>, FieldDiracError> {
    for p in user {
        if p.dim() != dim {
            return Err(FieldDiracError::ArityMismatch(format!(
                "probe {p} has dimension {}, expected {dim}",
                p.dim()
            )));
        }
    }
    let mut probes = user.to_vec();
    let mut gen = ProbeGen::new(cfg.seed);
    probes.extend(gen.points_where(dim, cfg.count, |p| reject(p)));
    Ok(probes)
}

/// Backward image `𝔅_φ(L_N)` of a structure on the target of `φ`, as a
/// structure on the source, with a clean-intersection report for
/// `ker((dφ)*) ∩ φ*L_N`.
///
/// The frame is computed over the function field by solving the membership
/// system of the pointwise definition `{(v, (dφ)*β) | (dφ(v), β) ∈ L_N}`
/// symbolically. For a 2-form graph the result is rebuilt as the graph of
/// the pulled-back form, and the two routes are checked against each other.
pub fn backward_image(
    d: &DiracField,
    phi: &PolyMap,
    user_probes: &[Point],
    cfg: &ProbeConfig,
) -> Result<(DiracField, CleanReport), FieldDiracError> {
    if phi.target() != d.vars() {
        return Err(FieldDiracError::ArityMismatch(
            "map target differs from the structure's ambient space".into(),
        ));
    }
    let n = d.dim();
    let m = phi.source_dim();
    let source = phi.source().clone();

    let pulled = pulled_frame_matrix(d, phi)?;
    let jac = phi.jacobian();

    // Membership in the pulled-back structure: K y = 0.
    let k = pulled.kernel();
    let k1 = k.select_columns(&(0..n).collect::<Vec<_>>());
    let k2 = k.select_columns(&(n..2 * n).collect::<Vec<_>>());
    // Solutions (v, β) ∈ F^m × F^n of K1 (J v) + K2 β = 0.
    let constraint = k1.matmul(&jac).hstack(&k2);
    let sols = constraint.kernel();
    let jt = jac.transpose();
    let rows: Vec<Vec<ScalarExpr>> = (0..sols.rows())
        .map(|r| {
            let row = sols.row(r);
            let (v, beta) = row.split_at(m);
            let mut out = v.to_vec();
            out.extend(jt.mul_vec(beta));
            out
        })
        .collect();
    let space = Subspace::from_rows(2 * m, Matrix::from_rows(rows));
    assert_eq!(space.dim(), m, "backward images are lagrangian over the function field");
    let sections: Vec<Section> = space
        .basis()
        .rows_iter()
        .map(|row| {
            let (vf, form) = row.split_at(m);
            Section { vf: vf.to_vec(), form: form.to_vec() }
        })
        .collect();
    let mut result = DiracField::from_frame(&source, sections)?;

    // Fast path for 2-form graphs: the image is the graph of φ*ω. Keep the
    // richer kind, cross-checked against the generic frame.
    if let DiracKind::TwoFormGraph(omega) = d.kind() {
        let pulled_form = pullback_twoform(omega, phi)?;
        let graph = DiracField::from_twoform(&source, pulled_form)?;
        assert!(
            graph.equal_generically(&result),
            "graph route and membership route must agree for 2-form graphs"
        );
        result = graph;
    }

    // Clean-intersection data for ker((dφ)*) ∩ φ*L_N: elements (0, β) of
    // the pulled-back structure with J^T β = 0.
    let hint = d.singular_locus_hint().clone();
    let probes = assemble_probes(m, user_probes, cfg, |p| {
        phi.apply(p)
            .and_then(|q| hint.eval(&q))
            .map(|v| Field::is_zero(&v))
            .unwrap_or(true)
    })?;

    let generic_rank = {
        let force_v_zero = block_selector::<ScalarExpr>(2 * n, 0, n);
        let beta_kernel = zero_block::<ScalarExpr>(m, n).hstack(&jt);
        let stacked = k.stack_vertical(&force_v_zero).stack_vertical(&beta_kernel);
        stacked.kernel().rows()
    };

    let mut probe_ranks = Vec::with_capacity(probes.len());
    let mut flagged = Vec::new();
    for p in &probes {
        let q = phi.apply(p)?;
        let fiber = d.pointwise(&q)?;
        let jp = phi.jacobian_at(p)?;
        let kp = fiber.space().basis().kernel();
        let force_v_zero = block_selector::<Rational>(2 * n, 0, n);
        let beta_kernel = zero_block::<Rational>(m, n).hstack(&jp.transpose());
        let stacked = kp.stack_vertical(&force_v_zero).stack_vertical(&beta_kernel);
        let rank = stacked.kernel().rows();
        if rank != generic_rank {
            flagged.push(p.clone());
        }
        probe_ranks.push((p.clone(), rank));
    }

    Ok((result, CleanReport { generic_rank, probe_ranks, flagged }))
}

/// `φ*ω` of a skew coefficient matrix: `(φ*ω)_{ij} = (ω_{ab}∘φ) J^a_i J^b_j`.
fn pullback_twoform(
    omega: &Matrix<ScalarExpr>,
    phi: &PolyMap,
) -> Result<Matrix<ScalarExpr>, FieldDiracError> {
    let jac = phi.jacobian();
    let pulled = omega.map_result(|e| phi.pullback_expr(e))?;
    Ok(jac.transpose().matmul(&pulled).matmul(&jac))
}

fn block_selector<F: Field>(width: usize, offset: usize, count: usize) -> Matrix<F> {
    let mut m = Matrix::zeros_with(count, width, F::zero());
    for i in 0..count {
        m.set(i, offset + i, F::one());
    }
    m
}

fn zero_block<F: Field>(rows: usize, cols: usize) -> Matrix<F> {
    Matrix::zeros_with(rows, cols, F::zero())
}

/// Forward-image diagnostics. The symbolic field is only produced when the
/// caller supplies a polynomial right inverse of `φ`; otherwise the fibers
/// at the probes are the only output, to avoid inventing a section.
#[derive(Clone, Debug)]
pub struct ForwardReport {
    /// Generic rank of `ker(dφ) ∩ L_M`.
    pub generic_rank: usize,
    pub probe_ranks: Vec<(Point, usize)>,
    pub flagged: Vec<Point>,
    /// Pointwise forward fibers at the probes.
    pub probe_fibers: Vec<(Point, LinearDirac<Rational>)>,
}

impl ForwardReport {
    pub fn is_clean_at_probes(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// Forward image `𝔉_φ(L_M)` along `φ: ℝᵐ → ℝⁿ`.
///
/// `φ` must be a submersion at every probe. Fiber probe pairs `(x, x′)`
/// with `φ(x) = φ(x′)` drive the invariance check: the evaluated forward
/// fibers must agree, otherwise the image does not descend to the target.
pub fn forward_image(
    d: &DiracField,
    phi: &PolyMap,
    fiber_pairs: &[(Point, Point)],
    section: Option<&PolyMap>,
    user_probes: &[Point],
    cfg: &ProbeConfig,
) -> Result<(Option<DiracField>, ForwardReport), FieldDiracError> {
    if phi.source() != d.vars() {
        return Err(FieldDiracError::ArityMismatch(
            "map source differs from the structure's ambient space".into(),
        ));
    }
    let m = phi.source_dim();
    let n = phi.target_dim();
    let hint = d.singular_locus_hint().clone();
    let probes = assemble_probes(m, user_probes, cfg, |p| {
        hint.eval(p).map(|v| Field::is_zero(&v)).unwrap_or(true)
    })?;
    for p in &probes {
        if phi.jacobian_at(p)?.rank() != n {
            return Err(FieldDiracError::NotASubmersionAtProbe(p.clone()));
        }
    }

    // ker(dφ) ∩ L_M: elements (v, 0) of L_M with J v = 0.
    let k_frame = d.frame_matrix().kernel();
    let jac = phi.jacobian();
    let generic_rank = {
        let force_beta_zero = block_selector::<ScalarExpr>(2 * m, m, m);
        let v_kernel = jac.hstack(&zero_block::<ScalarExpr>(n, m));
        let stacked = k_frame.stack_vertical(&force_beta_zero).stack_vertical(&v_kernel);
        stacked.kernel().rows()
    };

    let mut probe_ranks = Vec::with_capacity(probes.len());
    let mut flagged = Vec::new();
    let mut probe_fibers = Vec::with_capacity(probes.len());
    for p in &probes {
        let fiber = d.pointwise(p)?;
        let jp = phi.jacobian_at(p)?;
        let kp = fiber.space().basis().kernel();
        let force_beta_zero = block_selector::<Rational>(2 * m, m, m);
        let v_kernel = jp.hstack(&zero_block::<Rational>(n, m));
        let stacked = kp.stack_vertical(&force_beta_zero).stack_vertical(&v_kernel);
        let rank = stacked.kernel().rows();
        if rank != generic_rank {
            flagged.push(p.clone());
        }
        probe_ranks.push((p.clone(), rank));
        let forward = fiber
            .forward(&LinearMap::new(jp))
            .expect("probe fibers push forward");
        probe_fibers.push((p.clone(), forward));
    }

    // Invariance along the supplied fiber pairs.
    for (a, b) in fiber_pairs {
        if phi.apply(a)? != phi.apply(b)? {
            return Err(FieldDiracError::FiberPairImagesDiffer(a.clone(), b.clone()));
        }
        let fa = d.pointwise(a)?.forward(&LinearMap::new(phi.jacobian_at(a)?)).expect("fiber");
        let fb = d.pointwise(b)?.forward(&LinearMap::new(phi.jacobian_at(b)?)).expect("fiber");
        if fa != fb {
            return Err(FieldDiracError::InvarianceViolated(a.clone(), b.clone()));
        }
    }

    let field = match section {
        None => None,
        Some(sigma) => {
            let composed = phi.compose(sigma)?;
            if !composed.is_identity() {
                return Err(FieldDiracError::ArityMismatch(
                    "supplied section is not a right inverse of the map".into(),
                ));
            }
            Some(forward_field_along_section(d, phi, sigma)?)
        }
    };

    Ok((field, ForwardReport { generic_rank, probe_ranks, flagged, probe_fibers }))
}

/// Symbolic forward frame along a section `σ` of `φ`: solves the membership
/// system of `{(dφ(v), β) | (v, (dφ)*β) ∈ L_M}` with all coefficients
/// transported to the target through `σ`.
fn forward_field_along_section(
    d: &DiracField,
    phi: &PolyMap,
    sigma: &PolyMap,
) -> Result<DiracField, FieldDiracError> {
    let m = phi.source_dim();
    let n = phi.target_dim();
    let target = phi.target().clone();

    let frame_on_target = pulled_frame_matrix_via(d, sigma)?;
    let jac_on_target = phi.jacobian().map_result(|e| sigma.pullback_expr(e))?;

    let k = frame_on_target.kernel();
    let k1 = k.select_columns(&(0..m).collect::<Vec<_>>());
    let k2 = k.select_columns(&(m..2 * m).collect::<Vec<_>>());
    let constraint = k1.hstack(&k2.matmul(&jac_on_target.transpose()));
    let sols = constraint.kernel();
    let rows: Vec<Vec<ScalarExpr>> = (0..sols.rows())
        .map(|r| {
            let row = sols.row(r);
            let (v, beta) = row.split_at(m);
            let mut out = jac_on_target.mul_vec(v);
            out.extend(beta.iter().cloned());
            out
        })
        .collect();
    let space = Subspace::from_rows(2 * n, Matrix::from_rows(rows));
    assert_eq!(space.dim(), n, "forward images are lagrangian over the function field");
    let sections: Vec<Section> = space
        .basis()
        .rows_iter()
        .map(|row| {
            let (vf, form) = row.split_at(n);
            Section { vf: vf.to_vec(), form: form.to_vec() }
        })
        .collect();
    let result = DiracField::from_frame(&target, sections)?;

    // Fast path: bivector graphs push forward to the graph of J π J^T ∘ σ.
    if let DiracKind::BivectorGraph(pi) = d.kind() {
        let pushed = jac_on_target
            .matmul(&pi.map_result(|e| sigma.pullback_expr(e))?)
            .matmul(&jac_on_target.transpose());
        let graph = DiracField::from_bivector(&target, pushed)?;
        assert!(
            graph.equal_generically(&result),
            "graph route and membership route must agree for bivector graphs"
        );
        return Ok(graph);
    }
    Ok(result)
}

fn pulled_frame_matrix_via(
    d: &DiracField,
    sigma: &PolyMap,
) -> Result<Matrix<ScalarExpr>, FieldDiracError> {
    let rows: Result<Vec<Vec<ScalarExpr>>, ScalarError> = d
        .frame()
        .iter()
        .map(|s| s.flat().iter().map(|e| sigma.pullback_expr(e)).collect())
        .collect();
    Ok(Matrix::from_rows(rows?))
}

/// Which image equation `check_dirac_map` verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapMode {
    /// `𝔅_φ(L_N) = L_M`, generically and at the probes.
    Backward,
    /// `𝔉_φ(L_M) = L_N ∘ φ` at the probes.
    Forward,
}

/// Verdict of a Dirac-map check, with a witness when it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiracMapCheck {
    Holds,
    FailsGenerically,
    FailsAt(Point),
}

impl DiracMapCheck {
    pub fn holds(&self) -> bool {
        matches!(self, DiracMapCheck::Holds)
    }
}

/// Checks whether `φ` is a backward (resp. forward) Dirac map between
/// `d_source` on `ℝᵐ` and `d_target` on `ℝⁿ`.
///
/// With a polynomial two-sided inverse supplied, `φ` is a diffeomorphism
/// and the two notions must coincide; both are computed and compared.
pub fn check_dirac_map(
    d_source: &DiracField,
    d_target: &DiracField,
    phi: &PolyMap,
    mode: MapMode,
    user_probes: &[Point],
    cfg: &ProbeConfig,
    inverse: Option<&PolyMap>,
) -> Result<DiracMapCheck, FieldDiracError> {
    if let Some(inv) = inverse {
        if !phi.compose(inv)?.is_identity() || !inv.compose(phi)?.is_identity() {
            return Err(FieldDiracError::ArityMismatch(
                "supplied inverse is not two-sided".into(),
            ));
        }
        let b = check_mode(d_source, d_target, phi, MapMode::Backward, user_probes, cfg)?;
        let f = check_mode(d_source, d_target, phi, MapMode::Forward, user_probes, cfg)?;
        assert_eq!(
            b.holds(),
            f.holds(),
            "a diffeomorphism is b-Dirac exactly when it is f-Dirac"
        );
        return Ok(match mode {
            MapMode::Backward => b,
            MapMode::Forward => f,
        });
    }
    check_mode(d_source, d_target, phi, mode, user_probes, cfg)
}

fn check_mode(
    d_source: &DiracField,
    d_target: &DiracField,
    phi: &PolyMap,
    mode: MapMode,
    user_probes: &[Point],
    cfg: &ProbeConfig,
) -> Result<DiracMapCheck, FieldDiracError> {
    if phi.source() != d_source.vars() || phi.target() != d_target.vars() {
        return Err(FieldDiracError::ArityMismatch(
            "map endpoints do not match the structures".into(),
        ));
    }
    let m = phi.source_dim();
    let source_hint = d_source.singular_locus_hint().clone();
    let target_hint = d_target.singular_locus_hint().clone();
    let probes = assemble_probes(m, user_probes, cfg, |p| {
        source_hint.eval(p).map(|v| Field::is_zero(&v)).unwrap_or(true)
            || phi
                .apply(p)
                .and_then(|q| target_hint.eval(&q))
                .map(|v| Field::is_zero(&v))
                .unwrap_or(true)
    })?;

    match mode {
        MapMode::Backward => {
            let (image, _) = backward_image(d_target, phi, &[], cfg)?;
            if !image.equal_generically(d_source) {
                return Ok(DiracMapCheck::FailsGenerically);
            }
            for p in &probes {
                let expected = d_source.pointwise(p)?;
                let got = d_target
                    .pointwise(&phi.apply(p)?)?
                    .backward(&LinearMap::new(phi.jacobian_at(p)?))
                    .expect("pointwise backward");
                if expected != got {
                    return Ok(DiracMapCheck::FailsAt(p.clone()));
                }
            }
            Ok(DiracMapCheck::Holds)
        }
        MapMode::Forward => {
            for p in &probes {
                let expected = d_target.pointwise(&phi.apply(p)?)?;
                let got = d_source
                    .pointwise(p)?
                    .forward(&LinearMap::new(phi.jacobian_at(p)?))
                    .expect("pointwise forward");
                if expected != got {
                    return Ok(DiracMapCheck::FailsAt(p.clone()));
                }
            }
            Ok(DiracMapCheck::Holds)
        }
    }
}
