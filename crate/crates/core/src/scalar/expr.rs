//! Normalized rational functions: quotients of multivariate polynomials.
//!
//! The canonical form makes equality a structural comparison: numerator and
//! denominator are coprime, both have integer coefficients whose contents
//! are jointly coprime, and the denominator's graded-lex leading coefficient
//! is positive. Zero is stored as `0/1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{Point, Poly, Rational, ScalarError, Vars};

/// Exact rational function in a fixed variable set.
#[derive(Clone, PartialEq, Eq)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl ScalarExpr {
    /// Canonicalizing constructor. Fails only on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZeroPoly);
        }
        if num.is_zero() {
            return Ok(ScalarExpr { den: Poly::one(num.vars()), num });
        }
        let g = Poly::gcd(&num, &den);
        let mut num = num.divexact(&g).expect("gcd divides numerator");
        let mut den = den.divexact(&g).expect("gcd divides denominator");
        if den.leading_coeff().is_negative() {
            num = -&num;
            den = -&den;
        }
        Ok(ScalarExpr { num, den })
    }

    pub fn zero(vars: &Vars) -> Self {
        ScalarExpr { num: Poly::zero(vars), den: Poly::one(vars) }
    }

    pub fn one(vars: &Vars) -> Self {
        ScalarExpr { num: Poly::one(vars), den: Poly::one(vars) }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        ScalarExpr::new(Poly::constant(vars, c), Poly::one(vars)).expect("unit denominator")
    }

    pub fn var(vars: &Vars, idx: usize) -> Self {
        ScalarExpr { num: Poly::var(vars, idx), den: Poly::one(vars) }
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.vars());
        ScalarExpr::new(p, den).expect("unit denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == Poly::one(self.vars()) && self.den.is_constant() && self.den.leading_coeff().is_one()
    }

    /// The polynomial this expression reduces to, if its denominator is
    /// constant (so `x/2` counts, with coefficient `1/2`).
    pub fn to_poly(&self) -> Option<Poly> {
        let d = self.den.as_constant()?;
        Some(self.num.scale(&d.recip()))
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match (self.num.as_constant(), self.den.as_constant()) {
            (Some(n), Some(d)) => Some(n / d),
            _ => None,
        }
    }

    pub fn recip(&self) -> Result<ScalarExpr, ScalarError> {
        ScalarExpr::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &ScalarExpr) -> Result<ScalarExpr, ScalarError> {
        ScalarExpr::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn pow(&self, e: u32) -> ScalarExpr {
        ScalarExpr { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn scale(&self, c: &Rational) -> ScalarExpr {
        ScalarExpr::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    /// Quotient-rule derivative with respect to the named variable.
    pub fn differentiate(&self, var: &str) -> Result<ScalarExpr, ScalarError> {
        let idx = self
            .vars()
            .index_of(var)
            .ok_or_else(|| ScalarError::UnknownVariable(var.to_string()))?;
        Ok(self.partial(idx))
    }

    /// Quotient-rule derivative by variable index.
    pub fn partial(&self, idx: usize) -> ScalarExpr {
        let num = &(&self.num.partial(idx) * &self.den) - &(&self.num * &self.den.partial(idx));
        let den = &self.den * &self.den;
        ScalarExpr::new(num, den).expect("square of nonzero denominator")
    }

    /// Exact value at a rational point; the denominator must not vanish.
    pub fn evaluate(&self, p: &Point) -> Result<Rational, ScalarError> {
        let d = self.den.eval(p)?;
        if d.is_zero() {
            return Err(ScalarError::DenominatorVanishes(p.clone()));
        }
        Ok(self.num.eval(p)? / d)
    }

    /// Substitutes polynomials for the variables. Fails when the image lies
    /// inside the denominator's zero set.
    pub fn substitute(&self, images: &[Poly]) -> Result<ScalarExpr, ScalarError> {
        ScalarExpr::new(self.num.substitute(images), self.den.substitute(images))
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, other: &ScalarExpr) -> ScalarExpr {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        let den = &self.den * &other.den;
        ScalarExpr::new(num, den).expect("product of nonzero denominators")
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, other: &ScalarExpr) -> ScalarExpr {
        self + &(-other)
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, other: &ScalarExpr) -> ScalarExpr {
        let num = &self.num * &other.num;
        let den = &self.den * &other.den;
        ScalarExpr::new(num, den).expect("product of nonzero denominators")
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr { num: -&self.num, den: self.den.clone() }
    }
}

/// True when the polynomial can follow `/` without parentheses: a positive
/// integer constant or a single unit-coefficient power of one variable.
fn atomic_divisor(p: &Poly) -> bool {
    if p.terms().len() != 1 {
        return false;
    }
    let (m, c) = &p.terms()[0];
    let nvars_used = m.iter().filter(|&&e| e > 0).count();
    (nvars_used == 0 && c.is_integer() && c.is_positive())
        || (nvars_used == 1 && c.is_one())
}

impl fmt::Display for ScalarExpr {
    /// Canonical text form; parsing it back yields the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.leading_coeff().is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.terms().len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if atomic_divisor(&self.den) {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarExpr({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    fn xyz() -> Vars {
        Vars::new(["x", "y", "z"])
    }

    #[test]
    fn normalization_reduces_gcd_and_sign() {
        let v = xyz();
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        let e = ScalarExpr::new(&x * &y, y.clone()).unwrap();
        assert_eq!(e, ScalarExpr::var(&v, 0));

        let e = ScalarExpr::new(x.clone(), -&y).unwrap();
        assert_eq!(e.den(), &y);
        assert_eq!(e.num(), &-&x);
    }

    #[test]
    fn canonical_form_is_integral() {
        let v = xyz();
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        // (x/2)/y normalizes to x/(2y)
        let e = ScalarExpr::new(x.scale(&ratio(1, 2)), y.clone()).unwrap();
        assert_eq!(e.num(), &x);
        assert_eq!(e.den(), &y.scale(&rat(2)));
    }

    #[test]
    fn derivative_quotient_rule() {
        let v = xyz();
        let one = ScalarExpr::one(&v);
        let z = ScalarExpr::var(&v, 2);
        let inv_z = one.div(&z).unwrap();
        let d = inv_z.differentiate("z").unwrap();
        // -1/z^2
        let expected = ScalarExpr::new(
            Poly::constant(&v, rat(-1)),
            Poly::var(&v, 2).pow(2),
        )
        .unwrap();
        assert_eq!(d, expected);
        assert!(inv_z.differentiate("w").is_err());
    }

    #[test]
    fn evaluate_and_singular_locus() {
        let v = xyz();
        let inv_z = ScalarExpr::one(&v).div(&ScalarExpr::var(&v, 2)).unwrap();
        let val = inv_z.evaluate(&Point::from_i64(&[0, 0, 2])).unwrap();
        assert_eq!(val, ratio(1, 2));
        let err = inv_z.evaluate(&Point::from_i64(&[1, 1, 0]));
        assert!(matches!(err, Err(ScalarError::DenominatorVanishes(_))));
    }

    #[test]
    fn substitution_into_denominator_zero_set_fails() {
        let v = xyz();
        let w = Vars::new(["t"]);
        let inv_z = ScalarExpr::one(&v).div(&ScalarExpr::var(&v, 2)).unwrap();
        let images = vec![Poly::var(&w, 0), Poly::zero(&w), Poly::zero(&w)];
        assert!(matches!(inv_z.substitute(&images), Err(ScalarError::DivisionByZeroPoly)));
    }
}
