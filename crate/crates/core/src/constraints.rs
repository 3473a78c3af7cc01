//! Submanifolds of Poisson spaces cut out by polynomial constraints.
//!
//! A `ConstraintSystem` is a Poisson structure `π` on `ℝᵐ` together with
//! constraints `ψ¹..ψᵏ` and exact rational probe points on their common
//! zero set `C`. Classification happens pointwise at probes; nothing is
//! ever restricted to `C` symbolically. Where second-class data is needed
//! (the Dirac bracket), the constraint matrix `c^{ij} = {ψ^i, ψ^j}` is
//! inverted exactly over the rational-function field, and cross-validation
//! against honest pullbacks runs through explicit parametrizations of `C`.

use thiserror::Error;

use crate::field_dirac::maps::{backward_image, CleanReport, PolyMap, ProbeConfig};
use crate::field_dirac::{calculus, DiracField, FieldDiracError};
use crate::linalg::{Field, Matrix, Subspace};
use crate::scalar::{Poly, Point, Rational, ScalarError, ScalarExpr, Vars};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("bivector is not Poisson: the Jacobiator does not vanish on coordinates ({0},{1},{2})")]
    NotPoisson(usize, usize, usize),
    #[error("matrix is not skew-symmetric")]
    NonSkew,
    #[error("point {0} does not satisfy the constraints exactly")]
    NotOnConstraint(Point),
    #[error("constraint differentials drop rank at {0}")]
    RankDropInPsi(Point),
    #[error("constraint matrix is singular as a rational function: the system is not second class")]
    SecondClassViolated,
    #[error("point {0} is not cosymplectic")]
    NotCosymplecticAtPoint(Point),
    #[error("invalid parametrization: {0}")]
    InvalidParametrization(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Field(#[from] FieldDiracError),
}

/// Pointwise type of the constraint locus inside the Poisson space.
/// `PoissonSubmanifold` and `Cosymplectic` are the strong cases; when they
/// apply they are returned instead of the weaker labels they refine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Coisotropic,
    PoissonDirac,
    Cosymplectic,
    PoissonSubmanifold,
    Mixed,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Coisotropic => "coisotropic",
            Classification::PoissonDirac => "poisson-dirac",
            Classification::Cosymplectic => "cosymplectic",
            Classification::PoissonSubmanifold => "poisson-submanifold",
            Classification::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Dimensions attached to a classification:
/// `null_dim = dim(TC ∩ π♯(TC°))` and `conormal_image_dim = dim π♯(TC°)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassDims {
    pub null_dim: usize,
    pub conormal_image_dim: usize,
}

/// A Poisson structure with polynomial constraints and exact probes.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    vars: Vars,
    pi: Matrix<ScalarExpr>,
    psis: Vec<Poly>,
    probes: Vec<Point>,
}

impl ConstraintSystem {
    /// Validates skewness, the Jacobi identity on coordinate triples (which
    /// is the full Jacobi identity for a bivector), exact vanishing of all
    /// constraints at every probe, and the regular-value condition there.
    pub fn new(
        vars: &Vars,
        pi: Matrix<ScalarExpr>,
        psis: Vec<Poly>,
        probes: Vec<Point>,
    ) -> Result<Self, ConstraintError> {
        let m = vars.len();
        if pi.rows() != m || pi.cols() != m {
            return Err(ConstraintError::ArityMismatch(format!(
                "Poisson matrix is {}x{}, ambient dimension is {}",
                pi.rows(),
                pi.cols(),
                m
            )));
        }
        if !pi.is_skew() {
            return Err(ConstraintError::NonSkew);
        }
        let coords: Vec<ScalarExpr> = (0..m).map(|i| ScalarExpr::var(vars, i)).collect();
        for i in 0..m {
            for j in (i + 1)..m {
                for k in (j + 1)..m {
                    if !calculus::jacobiator(&pi, &coords[i], &coords[j], &coords[k]).is_zero() {
                        return Err(ConstraintError::NotPoisson(i, j, k));
                    }
                }
            }
        }
        for psi in &psis {
            if psi.vars() != vars {
                return Err(ConstraintError::ArityMismatch(
                    "constraint over the wrong variables".into(),
                ));
            }
        }
        if psis.len() > m {
            return Err(ConstraintError::ArityMismatch(format!(
                "{} constraints in ambient dimension {}",
                psis.len(),
                m
            )));
        }
        let system = ConstraintSystem { vars: vars.clone(), pi, psis, probes: Vec::new() };
        let mut validated = Vec::with_capacity(probes.len());
        for p in probes {
            system.validate_probe(&p)?;
            validated.push(p);
        }
        Ok(ConstraintSystem { probes: validated, ..system })
    }

    fn validate_probe(&self, p: &Point) -> Result<(), ConstraintError> {
        if p.dim() != self.vars.len() {
            return Err(ConstraintError::ArityMismatch(format!(
                "probe {p} has dimension {}, ambient is {}",
                p.dim(),
                self.vars.len()
            )));
        }
        for psi in &self.psis {
            if !psi.eval(p)?.is_zero() {
                return Err(ConstraintError::NotOnConstraint(p.clone()));
            }
        }
        if self.constraint_jacobian_at(p)?.rank() != self.psis.len() {
            return Err(ConstraintError::RankDropInPsi(p.clone()));
        }
        // The Poisson coefficients must be defined at every probe.
        for e in self.pi.rows_iter().flatten() {
            e.evaluate(p)?;
        }
        Ok(())
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn ambient_dim(&self) -> usize {
        self.vars.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.psis.len()
    }

    pub fn poisson_matrix(&self) -> &Matrix<ScalarExpr> {
        &self.pi
    }

    pub fn constraints(&self) -> &[Poly] {
        &self.psis
    }

    pub fn probes(&self) -> &[Point] {
        &self.probes
    }

    /// The ambient Poisson structure as a Dirac structure.
    pub fn ambient_structure(&self) -> DiracField {
        DiracField::from_bivector(&self.vars, self.pi.clone())
            .expect("validated Poisson matrices are skew")
    }

    /// `dΨ(p)`: one row per constraint (`0 × m` when unconstrained).
    fn constraint_jacobian_at(&self, p: &Point) -> Result<Matrix<Rational>, ScalarError> {
        let m = self.vars.len();
        if self.psis.is_empty() {
            return Ok(Matrix::zeros_with(0, m, Rational::zero()));
        }
        let rows: Result<Vec<Vec<Rational>>, ScalarError> = self
            .psis
            .iter()
            .map(|psi| (0..m).map(|i| psi.partial(i).eval(p)).collect())
            .collect();
        Ok(Matrix::from_rows(rows?))
    }

    fn poisson_at(&self, p: &Point) -> Result<Matrix<Rational>, ScalarError> {
        self.pi.map_result(|e| e.evaluate(p))
    }

    /// The spaces controlling the classification at `p`:
    /// `(TC, π♯(TC°))` as subspaces of the ambient tangent space.
    fn tangent_and_conormal_image(
        &self,
        p: &Point,
    ) -> Result<(Subspace<Rational>, Subspace<Rational>), ConstraintError> {
        let m = self.vars.len();
        let jac = self.constraint_jacobian_at(p)?;
        let tc = Subspace::from_rows(m, jac.kernel());
        // π♯ of a row covector r is the row r·π.
        let image_rows = jac.matmul(&self.poisson_at(p)?);
        let image = Subspace::from_rows(m, image_rows);
        Ok((tc, image))
    }

    /// Classifies the constraint locus at a probe. Returns the strongest
    /// applicable label together with
    /// `(dim TC ∩ π♯(TC°), dim π♯(TC°))`.
    pub fn classify_point(
        &self,
        p: &Point,
    ) -> Result<(Classification, ClassDims), ConstraintError> {
        self.validate_probe(p)?;
        let (tc, image) = self.tangent_and_conormal_image(p)?;
        let meet = tc.intersect(&image);
        let dims = ClassDims { null_dim: meet.dim(), conormal_image_dim: image.dim() };
        let label = if image.dim() == 0 {
            Classification::PoissonSubmanifold
        } else if image.is_subspace_of(&tc) {
            Classification::Coisotropic
        } else if meet.dim() == 0 {
            if tc.sum(&image).dim() == self.vars.len() {
                Classification::Cosymplectic
            } else {
                Classification::PoissonDirac
            }
        } else {
            Classification::Mixed
        };
        Ok((label, dims))
    }

    /// The constraint matrix `c^{ij} = {ψ^i, ψ^j}` with its invertibility
    /// verdict, generically and at every probe. At each probe, cosymplectic
    /// classification and pointwise invertibility must agree, and that
    /// equivalence is asserted.
    pub fn constraint_matrix(&self) -> Result<ConstraintMatrixReport, ConstraintError> {
        let k = self.psis.len();
        let exprs: Vec<ScalarExpr> =
            self.psis.iter().map(|p| ScalarExpr::from_poly(p.clone())).collect();
        let mut c = Matrix::zeros_with(k, k, ScalarExpr::zero(&self.vars));
        for i in 0..k {
            for j in 0..k {
                c.set(i, j, calculus::poisson_bracket(&self.pi, &exprs[i], &exprs[j]));
            }
        }
        let det = c.det();
        let generically_invertible = !det.is_zero();
        let mut probe_checks = Vec::with_capacity(self.probes.len());
        for p in &self.probes {
            let value = match det.as_constant() {
                Some(c) => c,
                None => det.evaluate(p)?,
            };
            let invertible = !value.is_zero();
            // Pointwise invertibility is equivalent to the cosymplectic
            // splitting TC ⊕ π♯(TC°) = TM (trivial when k = 0).
            let (_, dims) = self.classify_point(p)?;
            let cosymplectic = dims.null_dim == 0 && dims.conormal_image_dim == k;
            assert_eq!(
                invertible, cosymplectic,
                "constraint-matrix invertibility must match the cosymplectic splitting at {p}"
            );
            probe_checks.push((p.clone(), invertible));
        }
        Ok(ConstraintMatrixReport { matrix: c, generically_invertible, probe_checks })
    }

    /// Dirac's bracket `{F,G}_C = {F,G} − {F,ψ^i} c_{ij} {ψ^j,G}` with
    /// `(c_{ij})` the exact inverse of the constraint matrix over the
    /// rational-function field. Its restriction to the constraint locus is
    /// the induced bracket; as an identity of rational functions it
    /// annihilates every constraint.
    pub fn dirac_bracket(
        &self,
        f: &ScalarExpr,
        g: &ScalarExpr,
    ) -> Result<ScalarExpr, ConstraintError> {
        let report = self.constraint_matrix()?;
        if !report.generically_invertible {
            return Err(ConstraintError::SecondClassViolated);
        }
        let c_inv = report.matrix.inverse().expect("nonzero determinant over a field");
        let k = self.psis.len();
        let exprs: Vec<ScalarExpr> =
            self.psis.iter().map(|p| ScalarExpr::from_poly(p.clone())).collect();
        let mut acc = calculus::poisson_bracket(&self.pi, f, g);
        for i in 0..k {
            let fpsi = calculus::poisson_bracket(&self.pi, f, &exprs[i]);
            if fpsi.is_zero() {
                continue;
            }
            for j in 0..k {
                let psig = calculus::poisson_bracket(&self.pi, &exprs[j], g);
                let term = &(&fpsi * c_inv.at(i, j)) * &psig;
                acc = &acc - &term;
            }
        }
        Ok(acc)
    }

    /// Exact splitting `Y = pr_TC(Y) + pr_{π♯(TC°)}(Y)` at a cosymplectic
    /// probe, with `pr_{π♯(TC°)}(Y) = dψ^i(Y) c_{ij} X_{ψ^j}`.
    pub fn project_to_tangent(
        &self,
        p: &Point,
        y: &[Rational],
    ) -> Result<ProjectionSplit, ConstraintError> {
        let m = self.vars.len();
        if y.len() != m {
            return Err(ConstraintError::ArityMismatch(format!(
                "vector has {} components, ambient is {m}",
                y.len()
            )));
        }
        let (label, _) = self.classify_point(p)?;
        if label != Classification::Cosymplectic {
            return Err(ConstraintError::NotCosymplecticAtPoint(p.clone()));
        }
        let jac = self.constraint_jacobian_at(p)?;
        let ham_fields = jac.matmul(&self.poisson_at(p)?); // rows X_{ψ^j}(p)
        let c = jac.matmul(&ham_fields.transpose()); // c^{ij} = dψ^i(X_{ψ^j})

        // dψ^i(X_{ψ^j}) = {ψ^j, ψ^i}: transpose to the {ψ^i, ψ^j} layout.
        let c = c.transpose();
        let c_inv = c.inverse().expect("cosymplectic probes have invertible constraint matrices");
        let dpsi_y = jac.mul_vec(y);
        let mut conormal = vec![Rational::zero(); m];
        for i in 0..self.psis.len() {
            for j in 0..self.psis.len() {
                let coeff = &dpsi_y[i] * c_inv.at(i, j);
                for (l, c_l) in conormal.iter_mut().enumerate() {
                    *c_l += &coeff * ham_fields.at(j, l);
                }
            }
        }
        let tangential: Vec<Rational> =
            y.iter().zip(&conormal).map(|(a, b)| a - b).collect();
        // The split lands where it claims to.
        assert!(
            jac.mul_vec(&tangential).iter().all(|v| v.is_zero()),
            "tangential part annihilates dψ"
        );
        let image = Subspace::from_rows(m, ham_fields);
        assert!(image.contains(&conormal), "conormal part lies in π♯(TC°)");
        Ok(ProjectionSplit { tangential, conormal })
    }

    /// Pullback of the ambient Poisson structure through an explicit
    /// parametrization of the constraint locus, with its clean report. The
    /// parametrization's preimages serve as probes on the parameter space.
    pub fn pullback_via_parametrization(
        &self,
        par: &Parametrization,
    ) -> Result<(DiracField, CleanReport), ConstraintError> {
        par.validate_against(self)?;
        let ambient = self.ambient_structure();
        let cfg = ProbeConfig::default();
        let (field, report) =
            backward_image(&ambient, &par.sigma, &par.preimages, &cfg)?;
        Ok((field, report))
    }
}

/// Constraint matrix with its invertibility verdicts.
#[derive(Clone, Debug)]
pub struct ConstraintMatrixReport {
    pub matrix: Matrix<ScalarExpr>,
    /// Determinant nonzero as a rational function.
    pub generically_invertible: bool,
    /// Pointwise invertibility at each probe.
    pub probe_checks: Vec<(Point, bool)>,
}

/// Result of splitting a tangent vector at a cosymplectic point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionSplit {
    pub tangential: Vec<Rational>,
    pub conormal: Vec<Rational>,
}

/// A polynomial right inverse of the constraint locus inclusion:
/// `σ: ℝᵈ → ℝᵐ` with `ψ ∘ σ ≡ 0`, plus preimages of the system's probes.
#[derive(Clone, Debug)]
pub struct Parametrization {
    sigma: PolyMap,
    preimages: Vec<Point>,
}

impl Parametrization {
    pub fn new(sigma: PolyMap, preimages: Vec<Point>) -> Self {
        Parametrization { sigma, preimages }
    }

    pub fn map(&self) -> &PolyMap {
        &self.sigma
    }

    pub fn preimages(&self) -> &[Point] {
        &self.preimages
    }

    /// Checks `ψ^i ∘ σ = 0` as polynomials, `σ(preimage) = probe` exactly,
    /// and full rank of `dσ` at every preimage.
    pub fn validate_against(&self, cs: &ConstraintSystem) -> Result<(), ConstraintError> {
        let d = cs.ambient_dim() - cs.constraint_count();
        if self.sigma.source_dim() != d {
            return Err(ConstraintError::InvalidParametrization(format!(
                "parameter space has dimension {}, expected {}",
                self.sigma.source_dim(),
                d
            )));
        }
        if self.sigma.target() != cs.vars() {
            return Err(ConstraintError::InvalidParametrization(
                "parametrization target differs from the ambient space".into(),
            ));
        }
        for psi in cs.constraints() {
            if !psi.substitute(self.sigma.components()).is_zero() {
                return Err(ConstraintError::InvalidParametrization(format!(
                    "constraint {psi} does not vanish on the image"
                )));
            }
        }
        if self.preimages.len() != cs.probes().len() {
            return Err(ConstraintError::InvalidParametrization(format!(
                "{} preimages for {} probes",
                self.preimages.len(),
                cs.probes().len()
            )));
        }
        for (q, p) in self.preimages.iter().zip(cs.probes()) {
            if &self.sigma.apply(q)? != p {
                return Err(ConstraintError::InvalidParametrization(format!(
                    "σ({q}) is not the probe {p}"
                )));
            }
            if self.sigma.jacobian_at(q)?.rank() != d {
                return Err(ConstraintError::InvalidParametrization(format!(
                    "dσ drops rank at {q}"
                )));
            }
        }
        Ok(())
    }
}

/// `dim(TC_p ∩ span of the given vector fields at p)`: the pointwise meet
/// of the constraint tangent space with a user-supplied distribution, as
/// used for momentum level sets where the distribution is tangent to the
/// symmetry orbits.
pub fn tangent_meet_dim(
    cs: &ConstraintSystem,
    p: &Point,
    generators: &[Vec<ScalarExpr>],
) -> Result<usize, ConstraintError> {
    let m = cs.ambient_dim();
    let jac = cs.constraint_jacobian_at(p)?;
    let tc = Subspace::from_rows(m, jac.kernel());
    let rows: Result<Vec<Vec<Rational>>, ScalarError> = generators
        .iter()
        .map(|g| g.iter().map(|e| e.evaluate(p)).collect())
        .collect();
    let dist = Subspace::from_rows(m, Matrix::from_rows(rows?));
    Ok(tc.intersect(&dist).dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_dirac::calculus::{matrix_from_strs, skew_from_rational};
    use crate::field_dirac::DiracKind;
    use crate::scalar::{parse_expr, rat};

    fn phase4() -> Vars {
        Vars::new(["q1", "p1", "q2", "p2"])
    }

    fn canonical_pi(vars: &Vars) -> Matrix<ScalarExpr> {
        let n = vars.len() / 2;
        let mut m = Matrix::zeros_with(2 * n, 2 * n, rat(0));
        for i in 0..n {
            m.set(2 * i, 2 * i + 1, rat(1));
            m.set(2 * i + 1, 2 * i, rat(-1));
        }
        skew_from_rational(vars, &m)
    }

    fn poly(s: &str, v: &Vars) -> Poly {
        parse_expr(s, v).unwrap().to_poly().unwrap()
    }

    #[test]
    fn second_class_plane_is_cosymplectic() {
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2", &v), poly("p2", &v)],
            vec![Point::from_i64(&[1, 0, 0, 0]), Point::from_i64(&[2, -3, 0, 0])],
        )
        .unwrap();
        for p in cs.probes() {
            let (label, dims) = cs.classify_point(p).unwrap();
            assert_eq!(label, Classification::Cosymplectic);
            assert_eq!(dims, ClassDims { null_dim: 0, conormal_image_dim: 2 });
        }
        let report = cs.constraint_matrix().unwrap();
        assert!(report.generically_invertible);
        assert_eq!(report.matrix.at(0, 1), &ScalarExpr::one(&v));
        assert_eq!(report.matrix.at(1, 0), &(-&ScalarExpr::one(&v)));
        assert!(report.probe_checks.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn single_constraint_is_coisotropic() {
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2", &v)],
            vec![Point::from_i64(&[1, 2, 0, 5])],
        )
        .unwrap();
        let (label, dims) = cs.classify_point(&cs.probes()[0].clone()).unwrap();
        assert_eq!(label, Classification::Coisotropic);
        assert_eq!(dims, ClassDims { null_dim: 1, conormal_image_dim: 1 });
        let report = cs.constraint_matrix().unwrap();
        assert!(!report.generically_invertible);
        assert!(report.matrix.at(0, 0).is_zero());
        assert!(matches!(
            cs.dirac_bracket(&ScalarExpr::var(&v, 0), &ScalarExpr::var(&v, 1)),
            Err(ConstraintError::SecondClassViolated)
        ));
    }

    #[test]
    fn casimir_level_is_poisson_submanifold() {
        let v = Vars::new(["x", "y", "z"]);
        let pi = matrix_from_strs(&v, &[&["0", "1", "0"], &["-1", "0", "0"], &["0", "0", "0"]])
            .unwrap();
        let cs = ConstraintSystem::new(
            &v,
            pi,
            vec![poly("z", &v)],
            vec![Point::from_i64(&[4, -1, 0])],
        )
        .unwrap();
        let (label, dims) = cs.classify_point(&cs.probes()[0].clone()).unwrap();
        assert_eq!(label, Classification::PoissonSubmanifold);
        assert_eq!(dims, ClassDims { null_dim: 0, conormal_image_dim: 0 });
    }

    #[test]
    fn curved_second_class_constraint_matrix() {
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2 - q1^2", &v), poly("p2 - p1", &v)],
            vec![Point::from_i64(&[0, 0, 0, 0]), Point::from_i64(&[1, 2, 1, 2])],
        )
        .unwrap();
        let report = cs.constraint_matrix().unwrap();
        assert_eq!(report.matrix.at(0, 1), &parse_expr("1 + 2*q1", &v).unwrap());

        // {q1, p1}_C = 1/(1 + 2 q1).
        let q1 = ScalarExpr::var(&v, 0);
        let p1 = ScalarExpr::var(&v, 1);
        let b = cs.dirac_bracket(&q1, &p1).unwrap();
        assert_eq!(b, parse_expr("1/(1 + 2*q1)", &v).unwrap());
    }

    #[test]
    fn dirac_bracket_annihilates_constraints_identically() {
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2 - q1^2", &v), poly("p2 - p1", &v)],
            vec![Point::from_i64(&[0, 0, 0, 0])],
        )
        .unwrap();
        let samples = ["q1", "p1^2 - q2", "q1*p2 + 3", "p2"];
        for f in samples {
            let f = parse_expr(f, &v).unwrap();
            for psi in cs.constraints() {
                let b = cs.dirac_bracket(&f, &ScalarExpr::from_poly(psi.clone())).unwrap();
                assert!(b.is_zero(), "bracket with {psi} must vanish");
                let b = cs.dirac_bracket(&ScalarExpr::from_poly(psi.clone()), &f).unwrap();
                assert!(b.is_zero());
            }
        }
    }

    #[test]
    fn unconstrained_dirac_bracket_is_poisson_bracket() {
        let v = Vars::new(["q", "p"]);
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![],
            vec![Point::from_i64(&[1, 1])],
        )
        .unwrap();
        let f = parse_expr("q^2*p", &v).unwrap();
        let g = parse_expr("p - q", &v).unwrap();
        let lhs = cs.dirac_bracket(&f, &g).unwrap();
        let rhs = calculus::poisson_bracket(cs.poisson_matrix(), &f, &g);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_splits_exactly() {
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2", &v), poly("p2", &v)],
            vec![Point::from_i64(&[1, 0, 0, 0])],
        )
        .unwrap();
        let p = cs.probes()[0].clone();

        // Tangent vectors have no conormal part.
        let split = cs.project_to_tangent(&p, &[rat(3), rat(-2), rat(0), rat(0)]).unwrap();
        assert!(split.conormal.iter().all(|c| c.is_zero()));

        // X_{ψ^1} = π♯(dq2) projects to itself: X_{q2} = (0,0,0,-1)·... row
        // q2·π: (0, 0, 0, 1)? take it from the system directly.
        let jac = Matrix::from_i64(&[&[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let ham = jac.matmul(&cs.poisson_at(&p).unwrap());
        let x_psi1 = ham.row_vec(0);
        let split = cs.project_to_tangent(&p, &x_psi1).unwrap();
        assert!(split.tangential.iter().all(|c| c.is_zero()));
        assert_eq!(split.conormal, x_psi1);

        // Idempotence on a mixed vector.
        let y = vec![rat(1), rat(1), rat(1), rat(1)];
        let split = cs.project_to_tangent(&p, &y).unwrap();
        let again = cs.project_to_tangent(&p, &split.tangential).unwrap();
        assert_eq!(again.tangential, split.tangential);
        assert!(again.conormal.iter().all(|c| c.is_zero()));

        // Not cosymplectic: single first-class constraint.
        let cs1 = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2", &v)],
            vec![Point::from_i64(&[1, 0, 0, 5])],
        )
        .unwrap();
        assert!(matches!(
            cs1.project_to_tangent(&Point::from_i64(&[1, 0, 0, 5]), &y),
            Err(ConstraintError::NotCosymplecticAtPoint(_))
        ));
    }

    #[test]
    fn flat_parametrization_recovers_canonical_plane() {
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2", &v), poly("p2", &v)],
            vec![Point::from_i64(&[1, 0, 0, 0]), Point::from_i64(&[-2, 5, 0, 0])],
        )
        .unwrap();
        let up = Vars::new(["u", "w"]);
        let sigma = PolyMap::new(
            up.clone(),
            v.clone(),
            vec![Poly::var(&up, 0), Poly::var(&up, 1), Poly::zero(&up), Poly::zero(&up)],
        )
        .unwrap();
        let par = Parametrization::new(
            sigma,
            vec![Point::from_i64(&[1, 0]), Point::from_i64(&[-2, 5])],
        );
        let (field, report) = cs.pullback_via_parametrization(&par).unwrap();
        assert!(report.is_clean_at_probes());
        let pulled = field.try_to_bivector_graph().unwrap();
        match pulled.kind() {
            DiracKind::BivectorGraph(m) => assert_eq!(m.at(0, 1), &ScalarExpr::one(&up)),
            other => panic!("expected bivector graph, got {other:?}"),
        }
    }

    #[test]
    fn curved_parametrization_matches_dirac_bracket_at_probes() {
        let v = phase4();
        let probes = vec![Point::from_i64(&[0, 0, 0, 0]), Point::from_i64(&[1, 2, 1, 2])];
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q2 - q1^2", &v), poly("p2 - p1", &v)],
            probes,
        )
        .unwrap();
        let up = Vars::new(["u", "w"]);
        // σ(u, w) = (u, w, u², w): graph coordinates on the constraint set.
        let sigma = PolyMap::new(
            up.clone(),
            v.clone(),
            vec![
                Poly::var(&up, 0),
                Poly::var(&up, 1),
                &Poly::var(&up, 0) * &Poly::var(&up, 0),
                Poly::var(&up, 1),
            ],
        )
        .unwrap();
        let par = Parametrization::new(
            sigma.clone(),
            vec![Point::from_i64(&[0, 0]), Point::from_i64(&[1, 2])],
        );
        let (field, report) = cs.pullback_via_parametrization(&par).unwrap();
        assert!(report.is_clean_at_probes());
        let pulled = field.try_to_bivector_graph().unwrap();

        // Dirac bracket on the ambient space vs the pullback's admissible
        // bracket on parameters: {q1, p1}_C ∘ σ = {σ*q1, σ*p1}_pulled.
        let q1 = ScalarExpr::var(&v, 0);
        let p1 = ScalarExpr::var(&v, 1);
        let dirac = cs.dirac_bracket(&q1, &p1).unwrap();
        let dirac_on_params = sigma.pullback_expr(&dirac).unwrap();
        let pulled_bracket = pulled
            .admissible_bracket(&ScalarExpr::var(&up, 0), &ScalarExpr::var(&up, 1))
            .unwrap();
        assert_eq!(dirac_on_params, pulled_bracket);
        for q in par.preimages() {
            assert_eq!(
                dirac_on_params.evaluate(q).unwrap(),
                pulled_bracket.evaluate(q).unwrap()
            );
        }
    }

    #[test]
    fn momentum_level_set_null_dimension() {
        // Angular momentum J = q1 p2 − q2 p1 on canonical ℝ⁴; on J = 0 the
        // orbit distribution of the rotation action meets TC in dimension 1
        // (the generator itself is tangent to the level set).
        let v = phase4();
        let cs = ConstraintSystem::new(
            &v,
            canonical_pi(&v),
            vec![poly("q1*p2 - q2*p1", &v)],
            vec![Point::from_i64(&[1, 2, 1, 2])],
        )
        .unwrap();
        let p = Point::from_i64(&[1, 2, 1, 2]);
        let (label, dims) = cs.classify_point(&p).unwrap();
        assert_eq!(label, Classification::Coisotropic);
        assert_eq!(dims.null_dim, 1);
        // Infinitesimal rotation generator u_M = X_J.
        let j = parse_expr("q1*p2 - q2*p1", &v).unwrap();
        let xj = calculus::sharp_bivector(cs.poisson_matrix(), &calculus::differential(&j));
        let meet = tangent_meet_dim(&cs, &p, &[xj]).unwrap();
        assert_eq!(meet, dims.null_dim);
    }

    #[test]
    fn validation_rejects_bad_systems() {
        let v = Vars::new(["x", "y", "z"]);
        // Non-Poisson bivector.
        let bad = matrix_from_strs(
            &v,
            &[&["0", "x^3", "x^2"], &["-x^3", "0", "0"], &["-x^2", "0", "0"]],
        )
        .unwrap();
        assert!(matches!(
            ConstraintSystem::new(&v, bad, vec![], vec![]),
            Err(ConstraintError::NotPoisson(0, 1, 2))
        ));

        let pi = matrix_from_strs(&v, &[&["0", "1", "0"], &["-1", "0", "0"], &["0", "0", "0"]])
            .unwrap();
        // Probe off the constraint set.
        assert!(matches!(
            ConstraintSystem::new(
                &v,
                pi.clone(),
                vec![poly("z", &v)],
                vec![Point::from_i64(&[0, 0, 1])]
            ),
            Err(ConstraintError::NotOnConstraint(_))
        ));
        // Rank drop of dψ at the probe: ψ = z² vanishes to second order.
        assert!(matches!(
            ConstraintSystem::new(
                &v,
                pi,
                vec![poly("z^2", &v)],
                vec![Point::from_i64(&[1, 1, 0])]
            ),
            Err(ConstraintError::RankDropInPsi(_))
        ));
    }
}
