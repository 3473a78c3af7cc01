//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are stored as `(exponent vector, coefficient)` pairs, sorted by
//! graded-lexicographic order with the leading term first, no zero
//! coefficients and no duplicate monomials. The order is fixed globally so
//! canonical forms and pivot choices are deterministic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat_pow, Point, Rational, ScalarError, Vars};

type Monomial = Vec<u32>;

/// Graded-lex comparison: total degree first, then lexicographic on the
/// exponent vector (earlier variables weigh more).
fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Equality is structural, with one exception: constants compare by value
/// across variable sets, so the generic linear algebra can inject `0` and
/// `1` without knowing an ambient variable list.
#[derive(Clone, Eq)]
pub struct Poly {
    vars: Vars,
    /// Sorted graded-lex descending; no zero coefficients, no duplicates.
    terms: Vec<(Monomial, Rational)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

impl Poly {
    pub fn zero(vars: &Vars) -> Self {
        Poly { vars: vars.clone(), terms: Vec::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Poly::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Poly::zero(vars);
        if !c.is_zero() {
            p.terms.push((vec![0; vars.len()], c));
        }
        p
    }

    /// The coordinate function `x_idx`.
    pub fn var(vars: &Vars, idx: usize) -> Self {
        assert!(idx < vars.len(), "variable index {idx} out of range");
        let mut exps = vec![0u32; vars.len()];
        exps[idx] = 1;
        Poly { vars: vars.clone(), terms: vec![(exps, Rational::one())] }
    }

    /// Normalizing constructor: sorts, merges duplicates, drops zeros.
    pub fn from_terms(vars: &Vars, terms: Vec<(Monomial, Rational)>) -> Self {
        let mut terms = terms;
        for (m, _) in &terms {
            assert_eq!(m.len(), vars.len(), "exponent vector length mismatch");
        }
        terms.sort_by(|a, b| grlex(&b.0, &a.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { vars: vars.clone(), terms: out }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    /// The constant value, if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Leading coefficient under graded-lex; zero for the zero polynomial.
    pub fn leading_coeff(&self) -> Rational {
        self.terms.first().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Lifts a constant over the empty variable set into `vars`.
    fn lift_to(&self, vars: &Vars) -> Poly {
        debug_assert!(self.vars.is_empty() && self.is_constant());
        Poly::constant(vars, self.as_constant().expect("constant"))
    }

    /// Aligns operands for a binary operation. Identical variable sets pass
    /// through; a constant over the empty set lifts to the other side; any
    /// genuine mismatch is a contract violation.
    fn aligned(&self, other: &Poly) -> (Poly, Poly) {
        if self.vars == other.vars {
            (self.clone(), other.clone())
        } else if self.vars.is_empty() && self.is_constant() {
            (self.lift_to(&other.vars), other.clone())
        } else if other.vars.is_empty() && other.is_constant() {
            (self.clone(), other.lift_to(&self.vars))
        } else {
            panic!(
                "operation across mismatched variable sets: {:?} vs {:?}",
                self.vars, other.vars
            );
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `idx`.
    pub fn partial(&self, idx: usize) -> Poly {
        assert!(idx < self.vars.len(), "variable index {idx} out of range");
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[idx] > 0)
            .map(|(m, c)| {
                let mut m2 = m.clone();
                let e = m2[idx];
                m2[idx] -= 1;
                (m2, c * Rational::from_integer(BigInt::from(e)))
            })
            .collect();
        Poly::from_terms(&self.vars, terms)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, p: &Point) -> Result<Rational, ScalarError> {
        if p.dim() != self.vars.len() {
            return Err(ScalarError::DimensionMismatch { expected: self.vars.len(), got: p.dim() });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t *= rat_pow(&p.0[i], e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes `images[i]` for variable `i`. All images must share one
    /// variable set, which becomes the variable set of the result.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.vars.len(), "one image per variable required");
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_else(|| Vars::new(Vec::<String>::new()));
        for im in images {
            assert!(im.vars == target, "images over mismatched variable sets");
        }
        let mut acc = Poly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&target, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn deg_in_var(&self, k: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[k]).max().unwrap_or(0)
    }

    /// Coefficients of powers of variable `k`: entry `d` is the coefficient
    /// polynomial of `x_k^d` (with `x_k`-exponent zero in every entry).
    fn coeffs_in_var(&self, k: usize) -> Vec<Poly> {
        let deg = self.deg_in_var(k) as usize;
        let mut out = vec![Poly::zero(&self.vars); deg + 1];
        for (m, c) in &self.terms {
            let d = m[k] as usize;
            let mut m2 = m.clone();
            m2[k] = 0;
            out[d].terms.push((m2, c.clone()));
        }
        for p in &mut out {
            let terms = std::mem::take(&mut p.terms);
            *p = Poly::from_terms(&self.vars, terms);
        }
        out
    }

    fn from_coeffs_in_var(vars: &Vars, k: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (d, c) in coeffs.iter().enumerate() {
            for (m, q) in &c.terms {
                let mut m2 = m.clone();
                m2[k] += d as u32;
                terms.push((m2, q.clone()));
            }
        }
        Poly::from_terms(vars, terms)
    }

    /// Multiplies by `x_k^e`.
    fn shift_var(&self, k: usize, e: u32) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2[k] += e;
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Exact division: `Some(q)` with `self = q * d`, or `None` if `d` does
    /// not divide `self`. Division by zero panics.
    pub fn divexact(&self, d: &Poly) -> Option<Poly> {
        let (sel, d) = self.aligned(d);
        assert!(!d.is_zero(), "division by the zero polynomial");
        if sel.is_zero() {
            return Some(Poly::zero(&sel.vars));
        }
        let (lm_d, lc_d) = (&d.terms[0].0, &d.terms[0].1);
        let mut rem = sel.clone();
        let mut quo: Vec<(Monomial, Rational)> = Vec::new();
        while !rem.is_zero() {
            let (lm_r, lc_r) = (&rem.terms[0].0, &rem.terms[0].1);
            if lm_r.iter().zip(lm_d.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let m: Monomial = lm_r.iter().zip(lm_d.iter()).map(|(a, b)| a - b).collect();
            let c = lc_r / lc_d;
            let t = Poly { vars: sel.vars.clone(), terms: vec![(m.clone(), c.clone())] };
            rem = &rem - &(&t * &d);
            quo.push((m, c));
        }
        Some(Poly::from_terms(&sel.vars, quo))
    }

    /// Rational content: `gcd(numerators)/lcm(denominators)`, positive.
    /// Dividing by it leaves integer coefficients with unit gcd.
    pub fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            g = g.gcd(&c.numer().abs());
            l = l.lcm(c.denom());
        }
        Rational::new(g, l)
    }

    fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        self.scale(&c.recip())
    }

    /// Scales so the graded-lex leading coefficient is positive.
    pub fn normalize_sign(&self) -> Poly {
        if self.leading_coeff().is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multivariate gcd, normalized primitive with positive leading
    /// coefficient times the gcd of the rational contents. Dividing both
    /// inputs by it yields integer-content coprime results, which is what
    /// the canonical rational-function form requires.
    ///
    /// Strategy: strip common monomial factors, take the divisibility
    /// shortcut when one argument divides the other, run plain monic Euclid
    /// in the univariate case, and fall back to a subresultant
    /// pseudo-remainder sequence for genuinely multivariate inputs.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (a, b) = a.aligned(b);
        if a.is_zero() {
            return b.normalize_sign();
        }
        if b.is_zero() {
            return a.normalize_sign();
        }
        let content_gcd = rational_gcd(&a.content(), &b.content());
        let a = a.primitive_part();
        let b = b.primitive_part();

        let mono = monomial_gcd(&a, &b);
        let a = a.divexact(&mono).expect("monomial content divides");
        let b = b.divexact(&mono).expect("monomial content divides");

        let core = if a.is_constant() || b.is_constant() {
            Poly::one(&a.vars)
        } else if let Some(q) = quick_divisibility_gcd(&a, &b) {
            q
        } else {
            let active: Vec<usize> = (0..a.vars.len())
                .filter(|&k| a.deg_in_var(k) > 0 || b.deg_in_var(k) > 0)
                .collect();
            match active.len() {
                0 => Poly::one(&a.vars),
                1 => univariate_gcd(&a, &b, active[0]),
                _ => {
                    // Fewest pseudo-division steps: smallest combined degree.
                    let k = *active
                        .iter()
                        .min_by_key(|&&k| a.deg_in_var(k).min(b.deg_in_var(k)))
                        .expect("nonempty");
                    subresultant_gcd(&a, &b, k)
                }
            }
        };
        (&(&core * &mono)).scale(&content_gcd).normalize_sign()
    }

    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero(&a.vars);
        }
        let g = Poly::gcd(a, b);
        (&(a * b)).divexact(&g).expect("gcd divides product").normalize_sign()
    }
}

/// gcd of positive rationals `p/q`, `r/s` as `gcd(p,r)/lcm(q,s)`.
fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    Rational::new(a.numer().abs().gcd(&b.numer().abs()), a.denom().lcm(b.denom()))
}

/// Largest monomial dividing both polynomials (coefficient 1).
fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let nvars = a.vars.len();
    let min_exps = |p: &Poly| -> Vec<u32> {
        let mut m = vec![u32::MAX; nvars];
        for (e, _) in &p.terms {
            for (i, &x) in e.iter().enumerate() {
                m[i] = m[i].min(x);
            }
        }
        m
    };
    let ma = min_exps(a);
    let mb = min_exps(b);
    let exps: Vec<u32> = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    Poly { vars: a.vars.clone(), terms: vec![(exps, Rational::one())] }
}

/// When one primitive polynomial exactly divides the other, the divisor is
/// the gcd. This covers the chains produced by quotient-rule derivatives
/// (numerator against a power of the denominator) very cheaply.
fn quick_divisibility_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    if a.total_degree() <= b.total_degree() {
        if b.divexact(a).is_some() {
            return Some(a.clone());
        }
    } else if a.divexact(b).is_some() {
        return Some(b.clone());
    }
    None
}

/// Monic Euclid for polynomials in exactly one active variable; returns the
/// primitive gcd.
fn univariate_gcd(a: &Poly, b: &Poly, k: usize) -> Poly {
    let (mut u, mut v) = (a.clone(), b.clone());
    while !v.is_zero() {
        let r = monic_rem(&u, &v, k);
        u = v;
        v = r;
    }
    u.primitive_part().normalize_sign()
}

/// Remainder of univariate division with rational coefficients.
fn monic_rem(u: &Poly, v: &Poly, k: usize) -> Poly {
    let dv = v.deg_in_var(k);
    let lv = v.coeffs_in_var(k).pop().expect("nonzero divisor");
    let lv_inv = lv.as_constant().expect("univariate leading coefficient").recip();
    let mut r = u.clone();
    while !r.is_zero() && r.deg_in_var(k) >= dv {
        let dr = r.deg_in_var(k);
        let lr = r.coeffs_in_var(k).pop().expect("nonzero remainder");
        let factor = lr.scale(&lv_inv).shift_var(k, dr - dv);
        r = &r - &(&factor * v);
        debug_assert!(r.is_zero() || r.deg_in_var(k) < dr);
    }
    r
}

/// Subresultant pseudo-remainder sequence in variable `k` (Collins): each
/// remainder is divided by a predicted factor, so no per-step content gcds
/// are needed, only one primitive-part pass at the end.
fn subresultant_gcd(a: &Poly, b: &Poly, k: usize) -> Poly {
    let content_k = |p: &Poly| -> Poly {
        p.coeffs_in_var(k)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Poly::zero(p.vars()), |acc, c| Poly::gcd(&acc, &c))
    };
    let (mut u, mut v) = (a.clone(), b.clone());
    if u.deg_in_var(k) < v.deg_in_var(k) {
        std::mem::swap(&mut u, &mut v);
    }
    let cont_u = content_k(&u);
    let cont_v = content_k(&v);
    let gamma = Poly::gcd(&cont_u, &cont_v);
    u = u.divexact(&cont_u).expect("content divides");
    v = v.divexact(&cont_v).expect("content divides");

    let one = Poly::one(a.vars());
    let mut g = one.clone();
    let mut h = one.clone();
    loop {
        let delta = u.deg_in_var(k) - v.deg_in_var(k);
        let r = pseudo_rem(&u, &v, k);
        if r.is_zero() {
            let vv = v.divexact(&content_k(&v)).expect("content divides");
            return (&gamma * &vv).normalize_sign();
        }
        if r.deg_in_var(k) == 0 {
            return gamma.normalize_sign();
        }
        u = v;
        // Divide by g·h^δ, the factor the subresultant theory guarantees.
        let mut divisor = g.clone();
        for _ in 0..delta {
            divisor = &divisor * &h;
        }
        v = r.divexact(&divisor).expect("subresultant factor divides");
        g = u.coeffs_in_var(k).pop().expect("nonzero");
        // h = g^δ / h^{δ−1}, an exact division in the coefficient ring.
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => {
                let mut num = g.clone();
                for _ in 1..delta {
                    num = &num * &g;
                }
                let mut den = h.clone();
                for _ in 2..delta {
                    den = &den * &h;
                }
                num.divexact(&den).expect("subresultant h-update divides")
            }
        };
    }
}

/// Pseudo-remainder of `u` by `v` in variable `k`: the remainder of
/// `lc_k(v)^{deg u − deg v + 1} · u` by `v`.
fn pseudo_rem(u: &Poly, v: &Poly, k: usize) -> Poly {
    let dv = v.deg_in_var(k);
    let du = u.deg_in_var(k);
    let lv = v.coeffs_in_var(k).pop().expect("nonzero divisor");
    let mut r = u.clone();
    let mut scale_count = 0u32;
    while !r.is_zero() && r.deg_in_var(k) >= dv {
        let dr = r.deg_in_var(k);
        let lr = r.coeffs_in_var(k).pop().expect("nonzero remainder");
        r = &(&r * &lv) - &(&lr.shift_var(k, dr - dv) * v);
        scale_count += 1;
        debug_assert!(r.is_zero() || r.deg_in_var(k) < dr);
    }
    // Standardize to exactly lv^{du − dv + 1} · u mod v so the
    // subresultant factors divide as the theory predicts.
    let needed = du - dv + 1;
    for _ in scale_count..needed {
        r = &r * &lv;
    }
    r
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, other: &Poly) -> Poly {
        let (a, b) = self.aligned(other);
        let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
        terms.extend(a.terms.iter().cloned());
        terms.extend(b.terms.iter().cloned());
        Poly::from_terms(&a.vars, terms)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, other: &Poly) -> Poly {
        self + &(-other)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        let (a, b) = self.aligned(other);
        let mut terms = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                let m: Monomial = m1.iter().zip(m2.iter()).map(|(x, y)| x + y).collect();
                terms.push((m, c1 * c2));
            }
        }
        Poly::from_terms(&a.vars, terms)
    }
}

impl fmt::Display for Poly {
    /// Canonical text form, re-parseable by the expression grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let c = c.abs();
            let mono_parts: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        self.vars.name(v).to_string()
                    } else {
                        format!("{}^{}", self.vars.name(v), e)
                    }
                })
                .collect();
            if mono_parts.is_empty() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", mono_parts.join("*"))?;
            } else {
                write!(f, "{}*{}", c, mono_parts.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}
