//! Symbolic differential calculus on sections of `TM ⊕ T*M`.
//!
//! Conventions, fixed once and shared by every module:
//! - `π♯(α) = i_α π` with `i_{dx^i}(∂_j ∧ ∂_k) = δ^i_j ∂_k − δ^i_k ∂_j`, so
//!   `(π♯α)^k = π^{ik} α_i` and `{f,g} = π(df,dg) = π^{jk} ∂_j f ∂_k g`;
//! - `(ω♯X)_j = ω_{ij} X^i`, so `ω` and `π` graphs agree when `ω = π^{-1}`;
//! - the pairing is `⟨(X,α),(Y,β)⟩ = β(X) + α(Y)`.

use crate::linalg::Matrix;
use crate::scalar::{ratio, Poly, Rational, ScalarExpr, Vars};

use super::FieldDiracError;

/// A pair (vector field, 1-form) with rational-function components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Section {
    pub vf: Vec<ScalarExpr>,
    pub form: Vec<ScalarExpr>,
}

impl Section {
    pub fn new(vf: Vec<ScalarExpr>, form: Vec<ScalarExpr>) -> Result<Self, FieldDiracError> {
        if vf.len() != form.len() {
            return Err(FieldDiracError::ArityMismatch(format!(
                "vector field has {} components, form has {}",
                vf.len(),
                form.len()
            )));
        }
        Ok(Section { vf, form })
    }

    pub fn zero(vars: &Vars) -> Self {
        let n = vars.len();
        Section {
            vf: vec![ScalarExpr::zero(vars); n],
            form: vec![ScalarExpr::zero(vars); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.vf.len()
    }

    pub fn scale(&self, f: &ScalarExpr) -> Section {
        Section {
            vf: self.vf.iter().map(|c| c * f).collect(),
            form: self.form.iter().map(|c| c * f).collect(),
        }
    }

    pub fn add(&self, other: &Section) -> Section {
        Section {
            vf: self.vf.iter().zip(&other.vf).map(|(a, b)| a + b).collect(),
            form: self.form.iter().zip(&other.form).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Section {
        Section {
            vf: self.vf.iter().map(|c| -c).collect(),
            form: self.form.iter().map(|c| -c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vf.iter().all(ScalarExpr::is_zero) && self.form.iter().all(ScalarExpr::is_zero)
    }

    /// Flat 2n-vector `(vf, form)` for linear algebra over the function field.
    pub fn flat(&self) -> Vec<ScalarExpr> {
        let mut out = self.vf.clone();
        out.extend(self.form.iter().cloned());
        out
    }
}

pub(crate) fn zero_vec(vars: &Vars) -> Vec<ScalarExpr> {
    vec![ScalarExpr::zero(vars); vars.len()]
}

/// Gradient as a 1-form: `(df)_i = ∂_i f`.
pub fn differential(f: &ScalarExpr) -> Vec<ScalarExpr> {
    (0..f.vars().len()).map(|i| f.partial(i)).collect()
}

/// `α(Y) = α_i Y^i`.
pub fn form_on_vector(alpha: &[ScalarExpr], y: &[ScalarExpr]) -> ScalarExpr {
    assert_eq!(alpha.len(), y.len());
    let vars = alpha
        .first()
        .map(|e| e.vars().clone())
        .expect("nonempty components");
    alpha
        .iter()
        .zip(y)
        .fold(ScalarExpr::zero(&vars), |acc, (a, b)| &acc + &(a * b))
}

/// Lie bracket of vector fields: `[X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k`.
pub fn lie_bracket(x: &[ScalarExpr], y: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let n = x.len();
    assert_eq!(n, y.len());
    (0..n)
        .map(|k| {
            let mut acc = ScalarExpr::zero(x[k].vars());
            for i in 0..n {
                acc = &acc + &(&x[i] * &y[k].partial(i));
                acc = &acc - &(&y[i] * &x[k].partial(i));
            }
            acc
        })
        .collect()
}

/// Lie derivative of a 1-form: `(L_X β)_j = X^i ∂_i β_j + β_i ∂_j X^i`.
pub fn lie_derivative_oneform(x: &[ScalarExpr], beta: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let n = x.len();
    assert_eq!(n, beta.len());
    (0..n)
        .map(|j| {
            let mut acc = ScalarExpr::zero(x[j].vars());
            for i in 0..n {
                acc = &acc + &(&x[i] * &beta[j].partial(i));
                acc = &acc + &(&beta[i] * &x[i].partial(j));
            }
            acc
        })
        .collect()
}

/// Exterior derivative of a 1-form as the skew matrix `(dα)_{ij} = ∂_i α_j − ∂_j α_i`.
pub fn exterior_derivative_oneform(alpha: &[ScalarExpr]) -> Matrix<ScalarExpr> {
    let n = alpha.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(&alpha[j].partial(i) - &alpha[i].partial(j));
        }
        rows.push(row);
    }
    Matrix::from_rows(rows)
}

/// `(i_Y T)_j = Y^i T_{ij}` for a skew matrix `T`.
pub fn contract_vector_twoform(y: &[ScalarExpr], t: &Matrix<ScalarExpr>) -> Vec<ScalarExpr> {
    let n = y.len();
    assert_eq!(t.rows(), n);
    (0..n)
        .map(|j| {
            let mut acc = ScalarExpr::zero(y[j].vars());
            for i in 0..n {
                acc = &acc + &(&y[i] * t.at(i, j));
            }
            acc
        })
        .collect()
}

/// Split pairing `⟨(X,α),(Y,β)⟩ = β(X) + α(Y)`.
pub fn pairing(a: &Section, b: &Section) -> ScalarExpr {
    &form_on_vector(&b.form, &a.vf) + &form_on_vector(&a.form, &b.vf)
}

/// Courant bracket
/// `⟦(X,α),(Y,β)⟧ = ([X,Y], L_X β − L_Y α + ½ d(α(Y) − β(X)))`.
pub fn courant_bracket(a: &Section, b: &Section) -> Section {
    let vf = lie_bracket(&a.vf, &b.vf);
    let lxb = lie_derivative_oneform(&a.vf, &b.form);
    let lya = lie_derivative_oneform(&b.vf, &a.form);
    let half = ratio(1, 2);
    let scalar = &form_on_vector(&a.form, &b.vf) - &form_on_vector(&b.form, &a.vf);
    let correction = differential(&scalar);
    let form: Vec<ScalarExpr> = (0..vf.len())
        .map(|j| &(&lxb[j] - &lya[j]) + &correction[j].scale(&half))
        .collect();
    Section { vf, form }
}

/// Dorfman bracket `((X,α),(Y,β)) ↦ ([X,Y], L_X β − i_Y dα)`: the
/// non-skew-symmetric companion whose antisymmetrization is the Courant
/// bracket; the two agree on sections with identically vanishing pairing.
pub fn dorfman_bracket(a: &Section, b: &Section) -> Section {
    let vf = lie_bracket(&a.vf, &b.vf);
    let lxb = lie_derivative_oneform(&a.vf, &b.form);
    let da = exterior_derivative_oneform(&a.form);
    let iyda = contract_vector_twoform(&b.vf, &da);
    let form: Vec<ScalarExpr> = lxb.iter().zip(&iyda).map(|(l, c)| l - c).collect();
    Section { vf, form }
}

/// Courant bracket twisted by a closed 3-form:
/// `⟦a, b⟧_H = ⟦a, b⟧ + i_Y i_X H`.
pub fn twisted_courant_bracket(a: &Section, b: &Section, h: &ThreeForm) -> Section {
    let base = courant_bracket(a, b);
    let extra = h.contract_two(&a.vf, &b.vf);
    let form = base.form.iter().zip(&extra).map(|(f, e)| f + e).collect();
    Section { vf: base.vf, form }
}

/// Poisson-type bracket of a skew matrix: `{f,g} = π^{jk} ∂_j f ∂_k g`.
pub fn poisson_bracket(pi: &Matrix<ScalarExpr>, f: &ScalarExpr, g: &ScalarExpr) -> ScalarExpr {
    let n = pi.rows();
    let mut acc = ScalarExpr::zero(f.vars());
    for j in 0..n {
        let dj = f.partial(j);
        if dj.is_zero() {
            continue;
        }
        for k in 0..n {
            if pi.at(j, k).is_zero() {
                continue;
            }
            acc = &acc + &(&(pi.at(j, k) * &dj) * &g.partial(k));
        }
    }
    acc
}

/// `π♯(α)` as a vector field: `(π♯α)^k = π^{ik} α_i`.
pub fn sharp_bivector(pi: &Matrix<ScalarExpr>, alpha: &[ScalarExpr]) -> Vec<ScalarExpr> {
    let n = pi.rows();
    assert_eq!(alpha.len(), n);
    (0..n)
        .map(|k| {
            let mut acc = ScalarExpr::zero(alpha[k].vars());
            for i in 0..n {
                acc = &acc + &(pi.at(i, k) * &alpha[i]);
            }
            acc
        })
        .collect()
}

/// Jacobiator `{f,{g,h}} + {h,{f,g}} + {g,{h,f}}`; identically zero exactly
/// when the skew matrix defines a Poisson structure.
pub fn jacobiator(
    pi: &Matrix<ScalarExpr>,
    f: &ScalarExpr,
    g: &ScalarExpr,
    h: &ScalarExpr,
) -> ScalarExpr {
    let fgh = poisson_bracket(pi, f, &poisson_bracket(pi, g, h));
    let hfg = poisson_bracket(pi, h, &poisson_bracket(pi, f, g));
    let ghf = poisson_bracket(pi, g, &poisson_bracket(pi, h, f));
    &(&fgh + &hfg) + &ghf
}

/// A closed 3-form with fully antisymmetric rational-function components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThreeForm {
    vars: Vars,
    /// Row-major cube `components[(i*n + j)*n + k] = H_{ijk}`.
    components: Vec<ScalarExpr>,
}

impl ThreeForm {
    /// Builds from values on strictly increasing index triples `i < j < k`,
    /// filling the rest by antisymmetry, then checks `dH = 0`.
    pub fn from_upper(
        vars: &Vars,
        upper: &[((usize, usize, usize), ScalarExpr)],
    ) -> Result<Self, FieldDiracError> {
        let n = vars.len();
        let mut components = vec![ScalarExpr::zero(vars); n * n * n];
        for ((i, j, k), value) in upper {
            let (i, j, k) = (*i, *j, *k);
            if !(i < j && j < k && k < n) {
                return Err(FieldDiracError::ArityMismatch(format!(
                    "3-form indices must satisfy i < j < k < {n}, got ({i},{j},{k})"
                )));
            }
            let signed = [
                ((i, j, k), false),
                ((j, k, i), false),
                ((k, i, j), false),
                ((j, i, k), true),
                ((i, k, j), true),
                ((k, j, i), true),
            ];
            for ((a, b, c), negate) in signed {
                components[(a * n + b) * n + c] =
                    if negate { -value } else { value.clone() };
            }
        }
        let h = ThreeForm { vars: vars.clone(), components };
        if !h.is_closed() {
            return Err(FieldDiracError::NotClosed);
        }
        Ok(h)
    }

    pub fn zero(vars: &Vars) -> Self {
        let n = vars.len();
        ThreeForm { vars: vars.clone(), components: vec![ScalarExpr::zero(vars); n * n * n] }
    }

    /// `dω` of a skew matrix of coefficients:
    /// `(dω)_{ijk} = ∂_i ω_{jk} − ∂_j ω_{ik} + ∂_k ω_{ij}`. Always closed.
    pub fn exterior_derivative_twoform(vars: &Vars, omega: &Matrix<ScalarExpr>) -> Self {
        let n = vars.len();
        assert!(omega.is_skew() && omega.rows() == n);
        let mut components = vec![ScalarExpr::zero(vars); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = &(&omega.at(j, k).partial(i) - &omega.at(i, k).partial(j))
                        + &omega.at(i, j).partial(k);
                    components[(i * n + j) * n + k] = v;
                }
            }
        }
        ThreeForm { vars: vars.clone(), components }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> &ScalarExpr {
        let n = self.vars.len();
        &self.components[(i * n + j) * n + k]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarExpr::is_zero)
    }

    fn is_closed(&self) -> bool {
        let n = self.vars.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in (k + 1)..n {
                        let v = &(&(&self.at(j, k, l).partial(i) - &self.at(i, k, l).partial(j))
                            + &self.at(i, j, l).partial(k))
                            - &self.at(i, j, k).partial(l);
                        if !v.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `i_Y i_X H` as a 1-form: `(i_Y i_X H)_k = X^i Y^j H_{ijk}`.
    pub fn contract_two(&self, x: &[ScalarExpr], y: &[ScalarExpr]) -> Vec<ScalarExpr> {
        let n = self.vars.len();
        (0..n)
            .map(|k| {
                let mut acc = ScalarExpr::zero(&self.vars);
                for i in 0..n {
                    if x[i].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let h = self.at(i, j, k);
                        if h.is_zero() || y[j].is_zero() {
                            continue;
                        }
                        acc = &acc + &(&(&x[i] * &y[j]) * h);
                    }
                }
                acc
            })
            .collect()
    }

    /// Full contraction `H(X, Y, Z) = H_{ijk} X^i Y^j Z^k`.
    pub fn value(&self, x: &[ScalarExpr], y: &[ScalarExpr], z: &[ScalarExpr]) -> ScalarExpr {
        form_on_vector(&self.contract_two(x, y), z)
    }
}

/// Exact-differential section `(π♯ df, df)` of a bivector graph.
pub fn hamiltonian_section(pi: &Matrix<ScalarExpr>, f: &ScalarExpr) -> Section {
    let df = differential(f);
    Section { vf: sharp_bivector(pi, &df), form: df }
}

/// A constant-coefficient rational skew matrix lifted to `ScalarExpr`.
pub fn skew_from_rational(vars: &Vars, m: &Matrix<Rational>) -> Matrix<ScalarExpr> {
    m.map(|c| ScalarExpr::constant(vars, c.clone()))
}

/// Parses a matrix of expressions; rows of strings, entries in the grammar.
pub fn matrix_from_strs(
    vars: &Vars,
    rows: &[&[&str]],
) -> Result<Matrix<ScalarExpr>, crate::scalar::ParseError> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for s in *row {
            r.push(crate::scalar::parse_expr(s, vars)?);
        }
        out.push(r);
    }
    Ok(Matrix::from_rows(out))
}

/// Lifts a polynomial map's component list into gradient form: the Jacobian
/// `J[a][i] = ∂ φ^a / ∂ x^i` as rational functions over the source.
pub fn jacobian_of_polys(source: &Vars, components: &[Poly]) -> Matrix<ScalarExpr> {
    let m = source.len();
    let rows: Vec<Vec<ScalarExpr>> = components
        .iter()
        .map(|p| (0..m).map(|i| ScalarExpr::from_poly(p.partial(i))).collect())
        .collect();
    Matrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_expr;

    fn v3() -> Vars {
        Vars::new(["x", "y", "z"])
    }

    fn sec(vars: &Vars, vf: [&str; 3], form: [&str; 3]) -> Section {
        Section {
            vf: vf.iter().map(|s| parse_expr(s, vars).unwrap()).collect(),
            form: form.iter().map(|s| parse_expr(s, vars).unwrap()).collect(),
        }
    }

    #[test]
    fn courant_bracket_vector_only_sections() {
        let v = v3();
        let a = sec(&v, ["y", "0", "0"], ["0", "0", "0"]);
        let b = sec(&v, ["0", "x", "0"], ["0", "0", "0"]);
        let c = courant_bracket(&a, &b);
        // ⟦(X,0),(Y,0)⟧ = ([X,Y],0)
        assert_eq!(c.vf, lie_bracket(&a.vf, &b.vf));
        assert!(c.form.iter().all(ScalarExpr::is_zero));
    }

    #[test]
    fn courant_bracket_closed_forms_vanish() {
        let v = v3();
        // (0, df), (0, dg) for f = x^2 y, g = z; bracket must vanish.
        let f = parse_expr("x^2*y", &v).unwrap();
        let g = parse_expr("z", &v).unwrap();
        let a = Section { vf: zero_vec(&v), form: differential(&f) };
        let b = Section { vf: zero_vec(&v), form: differential(&g) };
        assert!(courant_bracket(&a, &b).is_zero());
    }

    #[test]
    fn courant_bracket_singular_example() {
        let v = v3();
        // ⟦(∂y, z dx), (∂x, −z dy)⟧ = (0, dz)
        let a = sec(&v, ["0", "1", "0"], ["z", "0", "0"]);
        let b = sec(&v, ["1", "0", "0"], ["0", "-z", "0"]);
        let c = courant_bracket(&a, &b);
        assert!(c.vf.iter().all(ScalarExpr::is_zero));
        assert_eq!(c.form[0], ScalarExpr::zero(&v));
        assert_eq!(c.form[1], ScalarExpr::zero(&v));
        assert_eq!(c.form[2], ScalarExpr::one(&v));
    }

    #[test]
    fn dorfman_symmetrization_is_exact_pairing_differential() {
        let v = v3();
        let a = sec(&v, ["x*y", "z", "1"], ["y", "0", "x^2"]);
        let b = sec(&v, ["z", "x", "0"], ["0", "z*y", "x"]);
        let sym = dorfman_bracket(&a, &b).add(&dorfman_bracket(&b, &a));
        assert!(sym.vf.iter().all(ScalarExpr::is_zero));
        let d_pairing = differential(&pairing(&a, &b));
        assert_eq!(sym.form, d_pairing);
    }

    #[test]
    fn dorfman_on_pure_form_and_vector() {
        let v = v3();
        // dorfman((0,α),(Y,0)) = (0, −i_Y dα)
        let alpha = sec(&v, ["0", "0", "0"], ["z*y", "x", "0"]);
        let yvec = sec(&v, ["1", "y", "0"], ["0", "0", "0"]);
        let d = dorfman_bracket(&alpha, &yvec);
        assert!(d.vf.iter().all(ScalarExpr::is_zero));
        let da = exterior_derivative_oneform(&alpha.form);
        let expect: Vec<ScalarExpr> =
            contract_vector_twoform(&yvec.vf, &da).iter().map(|e| -e).collect();
        assert_eq!(d.form, expect);
    }

    #[test]
    fn courant_is_antisymmetrization_of_dorfman() {
        let v = v3();
        let a = sec(&v, ["x", "y^2", "z"], ["1", "x*z", "y"]);
        let b = sec(&v, ["y", "0", "x"], ["z^2", "1", "0"]);
        let anti = dorfman_bracket(&a, &b).add(&dorfman_bracket(&b, &a).neg());
        let half = ratio(1, 2);
        let anti = Section {
            vf: anti.vf.iter().map(|e| e.scale(&half)).collect(),
            form: anti.form.iter().map(|e| e.scale(&half)).collect(),
        };
        assert_eq!(anti, courant_bracket(&a, &b));
    }

    #[test]
    fn twisted_bracket_contraction_term() {
        let v = v3();
        let h = ThreeForm::from_upper(&v, &[((0, 1, 2), ScalarExpr::one(&v))]).unwrap();
        let a = sec(&v, ["1", "0", "0"], ["0", "0", "0"]);
        let b = sec(&v, ["0", "1", "0"], ["0", "0", "0"]);
        let t = twisted_courant_bracket(&a, &b, &h);
        // i_{∂2} i_{∂1} (dx∧dy∧dz) = dz added to a vanishing base bracket.
        assert!(t.vf.iter().all(ScalarExpr::is_zero));
        assert_eq!(t.form[2], ScalarExpr::one(&v));
        assert!(t.form[0].is_zero() && t.form[1].is_zero());

        let untwisted = twisted_courant_bracket(&a, &b, &ThreeForm::zero(&v));
        assert_eq!(untwisted, courant_bracket(&a, &b));
    }

    #[test]
    fn nonclosed_threeform_rejected() {
        let v = Vars::new(["x", "y", "z", "w"]);
        let bad = ThreeForm::from_upper(&v, &[((0, 1, 2), parse_expr("w", &v).unwrap())]);
        assert!(matches!(bad, Err(FieldDiracError::NotClosed)));
    }

    #[test]
    fn jacobiator_examples() {
        let v = v3();
        let x = ScalarExpr::var(&v, 0);
        let y = ScalarExpr::var(&v, 1);
        let z = ScalarExpr::var(&v, 2);

        // Constant π is always Poisson.
        let pi = matrix_from_strs(&v, &[&["0", "1", "0"], &["-1", "0", "2"], &["0", "-2", "0"]])
            .unwrap();
        assert!(jacobiator(&pi, &x, &y, &z).is_zero());
        let f = parse_expr("x^2*y", &v).unwrap();
        assert!(jacobiator(&pi, &f, &y, &z).is_zero());

        // π = (1/z) ∂x∧∂y is Poisson away from z = 0.
        let pi = matrix_from_strs(
            &v,
            &[&["0", "1/z", "0"], &["-1/z", "0", "0"], &["0", "0", "0"]],
        )
        .unwrap();
        assert!(jacobiator(&pi, &x, &y, &z).is_zero());

        // π = z² ∂x∧∂y + ∂y∧∂z happens to be Poisson: every cyclic term
        // vanishes because ∂y never hits a coefficient.
        let pi = matrix_from_strs(
            &v,
            &[&["0", "z^2", "0"], &["-z^2", "0", "1"], &["0", "-1", "0"]],
        )
        .unwrap();
        assert_eq!(poisson_bracket(&pi, &x, &y), parse_expr("z^2", &v).unwrap());
        assert!(jacobiator(&pi, &x, &y, &z).is_zero());

        // π^{12} = x³, π^{13} = x² fails Jacobi: the cyclic sum on the
        // coordinate triple is {z,x³} + {y,−x²} = −3x⁴ + 2x⁴ = −x⁴.
        let pi = matrix_from_strs(
            &v,
            &[&["0", "x^3", "x^2"], &["-x^3", "0", "0"], &["-x^2", "0", "0"]],
        )
        .unwrap();
        let jac = jacobiator(&pi, &x, &y, &z);
        assert_eq!(jac, parse_expr("-x^4", &v).unwrap());
    }
}
