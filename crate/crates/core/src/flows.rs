//! Numerical integration of constrained Hamiltonian dynamics.
//!
//! The generator is the Dirac-bracket Hamiltonian field `ẋ^i = {x^i, H}_C`,
//! built symbolically upstream and only evaluated in floating point here.
//! Because `{·, ψ^i}_C ≡ 0` as rational functions, the field is exactly
//! tangent to the constraint locus; a symbolic tangency pre-check runs
//! before any numerics, so the reported constraint drift is pure integrator
//! error, a diagnostic rather than something to correct.

use std::fmt::Write as _;

use thiserror::Error;

use crate::constraints::{ConstraintError, ConstraintSystem};
use crate::scalar::{rat_to_f64, Poly, ScalarExpr, Vars};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FlowError {
    #[error("constraint matrix nearly singular at state {state:?}: |det c| = {det:e}")]
    NearSingularConstraintMatrix { det: f64, state: Vec<f64> },
    #[error("denominator vanishes at state {0:?}")]
    DenominatorVanishes(Vec<f64>),
    #[error("step rejected at t = {t}: nonfinite state")]
    StepRejected { t: f64 },
    #[error("tangency pre-check failed for constraint {0}: dψ(ẋ) is not the zero function")]
    TangencyCheckFailed(usize),
    #[error("initial condition violates the constraints: max |ψ| = {0:e}")]
    InitialConditionOffConstraint(f64),
    #[error("dimension mismatch: state has {got} components, ambient is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// Fixed-step explicit integrators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Midpoint,
}

impl Method {
    pub fn order(&self) -> usize {
        match self {
            Method::Rk4 => 4,
            Method::Midpoint => 2,
        }
    }
}

/// Integration parameters. Drift is recorded, never corrected.
#[derive(Clone, Copy, Debug)]
pub struct FlowConfig {
    pub step_size: f64,
    pub duration: f64,
    pub method: Method,
    /// Record every this many steps (the final state is always recorded).
    pub report_every: usize,
    /// Reject states with `|det c|` below this.
    pub det_threshold: f64,
    /// Maximum allowed `max_i |ψ^i(x₀)|`.
    pub initial_tolerance: f64,
}

impl FlowConfig {
    pub fn new(step_size: f64, duration: f64, method: Method) -> Self {
        assert!(step_size > 0.0 && duration > 0.0);
        FlowConfig {
            step_size,
            duration,
            method,
            report_every: 1,
            det_threshold: 1e-9,
            initial_tolerance: 1e-9,
        }
    }
}

/// A polynomial compiled to float coefficients for fast evaluation.
#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<u32>)>,
}

impl CompiledPoly {
    fn compile(p: &Poly) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .iter()
                .map(|(m, c)| (rat_to_f64(c), m.clone()))
                .collect(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t *= x[i];
                }
            }
            acc += t;
        }
        acc
    }
}

/// A rational function compiled for float evaluation.
#[derive(Clone, Debug)]
struct CompiledExpr {
    num: CompiledPoly,
    den: CompiledPoly,
}

impl CompiledExpr {
    fn compile(e: &ScalarExpr) -> Self {
        CompiledExpr { num: CompiledPoly::compile(e.num()), den: CompiledPoly::compile(e.den()) }
    }

    fn eval(&self, x: &[f64]) -> Result<f64, FlowError> {
        let d = self.den.eval(x);
        if d == 0.0 {
            return Err(FlowError::DenominatorVanishes(x.to_vec()));
        }
        Ok(self.num.eval(x) / d)
    }
}

/// The compiled Dirac-bracket flow of a Hamiltonian on a constraint system.
#[derive(Clone, Debug)]
pub struct DiracFlow {
    vars: Vars,
    /// Symbolic field components `{x^i, H}_C`, kept for exact diagnostics.
    field_exprs: Vec<ScalarExpr>,
    field: Vec<CompiledExpr>,
    hamiltonian: CompiledExpr,
    det_c: CompiledExpr,
    psis: Vec<CompiledPoly>,
}

impl DiracFlow {
    /// Builds `ẋ^i = {x^i, H}_C` symbolically, runs the exact tangency
    /// pre-check `dψ^i(ẋ) ≡ 0`, and compiles everything for evaluation.
    pub fn new(cs: &ConstraintSystem, hamiltonian: &ScalarExpr) -> Result<Self, FlowError> {
        let vars = cs.vars().clone();
        let m = vars.len();
        let mut field_exprs = Vec::with_capacity(m);
        for i in 0..m {
            let xi = ScalarExpr::var(&vars, i);
            field_exprs.push(cs.dirac_bracket(&xi, hamiltonian)?);
        }
        for (idx, psi) in cs.constraints().iter().enumerate() {
            let mut deriv = ScalarExpr::zero(&vars);
            for (j, component) in field_exprs.iter().enumerate() {
                deriv = &deriv + &(&ScalarExpr::from_poly(psi.partial(j)) * component);
            }
            if !deriv.is_zero() {
                return Err(FlowError::TangencyCheckFailed(idx));
            }
        }
        let det_c = cs.constraint_matrix()?.matrix.det();
        Ok(DiracFlow {
            field: field_exprs.iter().map(CompiledExpr::compile).collect(),
            field_exprs,
            hamiltonian: CompiledExpr::compile(hamiltonian),
            det_c: CompiledExpr::compile(&det_c),
            psis: cs.constraints().iter().map(CompiledPoly::compile).collect(),
            vars,
        })
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Symbolic components `{x^i, H}_C` of the generator.
    pub fn field_exprs(&self) -> &[ScalarExpr] {
        &self.field_exprs
    }

    /// Exact derivative of `f` along the flow: `Σ_j ∂_j f · {x^j, H}_C`.
    pub fn symbolic_derivative_along_flow(&self, f: &ScalarExpr) -> ScalarExpr {
        let mut acc = ScalarExpr::zero(&self.vars);
        for (j, component) in self.field_exprs.iter().enumerate() {
            acc = &acc + &(&f.partial(j) * component);
        }
        acc
    }

    /// Evaluates the generator at a state, guarding the constraint-matrix
    /// determinant against the configured threshold.
    pub fn vector_field_numeric(
        &self,
        x: &[f64],
        det_threshold: f64,
    ) -> Result<Vec<f64>, FlowError> {
        if x.len() != self.dim() {
            return Err(FlowError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let det = self.det_c.eval(x)?;
        if det.abs() < det_threshold {
            return Err(FlowError::NearSingularConstraintMatrix { det, state: x.to_vec() });
        }
        self.field.iter().map(|c| c.eval(x)).collect()
    }

    fn constraint_norm(&self, x: &[f64]) -> f64 {
        self.psis.iter().map(|p| p.eval(x).abs()).fold(0.0, f64::max)
    }

    /// Fixed-step integration recording time, state, energy, and constraint
    /// drift. The step count is `ceil(duration / step_size)`.
    pub fn integrate(&self, x0: &[f64], cfg: &FlowConfig) -> Result<Trajectory, FlowError> {
        if x0.len() != self.dim() {
            return Err(FlowError::DimensionMismatch { expected: self.dim(), got: x0.len() });
        }
        let initial_violation = self.constraint_norm(x0);
        if !(initial_violation <= cfg.initial_tolerance) {
            return Err(FlowError::InitialConditionOffConstraint(initial_violation));
        }
        // Full steps of `step_size`, plus one shorter step landing exactly
        // on `duration` when it is not an integer multiple.
        let full_steps = (cfg.duration / cfg.step_size).floor() as usize;
        let tail = cfg.duration - full_steps as f64 * cfg.step_size;
        let has_tail = tail > cfg.step_size * 1e-12;
        let total = full_steps + usize::from(has_tail);
        let report_every = cfg.report_every.max(1);
        let mut traj = Trajectory {
            var_names: self.vars.names().to_vec(),
            times: Vec::new(),
            states: Vec::new(),
            h_values: Vec::new(),
            constraint_norms: Vec::new(),
        };
        let mut x = x0.to_vec();
        self.record(&mut traj, 0.0, &x)?;
        for step in 1..=total {
            let last = step == total;
            let dt = if last && has_tail { tail } else { cfg.step_size };
            let t = if last { cfg.duration } else { step as f64 * cfg.step_size };
            x = match cfg.method {
                Method::Rk4 => self.rk4_step(&x, dt, cfg.det_threshold)?,
                Method::Midpoint => self.midpoint_step(&x, dt, cfg.det_threshold)?,
            };
            if x.iter().any(|v| !v.is_finite()) {
                return Err(FlowError::StepRejected { t });
            }
            if step % report_every == 0 || last {
                self.record(&mut traj, t, &x)?;
            }
        }
        Ok(traj)
    }

    fn record(&self, traj: &mut Trajectory, t: f64, x: &[f64]) -> Result<(), FlowError> {
        traj.times.push(t);
        traj.states.push(x.to_vec());
        traj.h_values.push(self.hamiltonian.eval(x)?);
        traj.constraint_norms.push(self.constraint_norm(x));
        Ok(())
    }

    fn rk4_step(&self, x: &[f64], dt: f64, thr: f64) -> Result<Vec<f64>, FlowError> {
        let k1 = self.vector_field_numeric(x, thr)?;
        let k2 = self.vector_field_numeric(&shifted(x, &k1, dt / 2.0), thr)?;
        let k3 = self.vector_field_numeric(&shifted(x, &k2, dt / 2.0), thr)?;
        let k4 = self.vector_field_numeric(&shifted(x, &k3, dt), thr)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, xi)| xi + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }

    fn midpoint_step(&self, x: &[f64], dt: f64, thr: f64) -> Result<Vec<f64>, FlowError> {
        let k1 = self.vector_field_numeric(x, thr)?;
        let k2 = self.vector_field_numeric(&shifted(x, &k1, dt / 2.0), thr)?;
        Ok(shifted(x, &k2, dt))
    }
}

fn shifted(x: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    x.iter().zip(k).map(|(xi, ki)| xi + h * ki).collect()
}

/// Recorded trajectory. Row `i` holds the state at `times[i]`, the energy
/// there, and `max_j |ψ^j|`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub var_names: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub h_values: Vec<f64>,
    pub constraint_norms: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories record at least the start")
    }

    pub fn max_energy_drift(&self) -> f64 {
        let h0 = self.h_values[0];
        self.h_values.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max)
    }

    pub fn max_constraint_drift(&self) -> f64 {
        self.constraint_norms.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `t,x1..xm,H,constraint_norm`. Floats print in the
    /// shortest form that parses back to the same bits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push('t');
        for name in &self.var_names {
            out.push(',');
            out.push_str(name);
        }
        out.push_str(",H,constraint_norm\n");
        for i in 0..self.len() {
            write!(out, "{}", self.times[i]).unwrap();
            for v in &self.states[i] {
                write!(out, ",{}", v).unwrap();
            }
            writeln!(out, ",{},{}", self.h_values[i], self.constraint_norms[i]).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_dirac::calculus::skew_from_rational;
    use crate::linalg::Matrix;
    use crate::scalar::{parse_expr, rat, Point};

    fn canonical(vars: &Vars) -> Matrix<ScalarExpr> {
        let n = vars.len() / 2;
        let mut m = Matrix::zeros_with(2 * n, 2 * n, rat(0));
        for i in 0..n {
            m.set(2 * i, 2 * i + 1, rat(1));
            m.set(2 * i + 1, 2 * i, rat(-1));
        }
        skew_from_rational(vars, &m)
    }

    fn oscillator_2d() -> (ConstraintSystem, ScalarExpr) {
        let v = Vars::new(["q", "p"]);
        let cs = ConstraintSystem::new(&v, canonical(&v), vec![], vec![]).unwrap();
        let h = parse_expr("(q^2 + p^2)/2", &v).unwrap();
        (cs, h)
    }

    fn constrained_oscillator() -> (ConstraintSystem, ScalarExpr) {
        let v = Vars::new(["q1", "p1", "q2", "p2"]);
        let psis = vec![
            parse_expr("q2", &v).unwrap().to_poly().unwrap(),
            parse_expr("p2", &v).unwrap().to_poly().unwrap(),
        ];
        let cs = ConstraintSystem::new(
            &v,
            canonical(&v),
            psis,
            vec![Point::from_i64(&[1, 0, 0, 0])],
        )
        .unwrap();
        let h = parse_expr("(q1^2 + p1^2 + q2^2 + p2^2)/2", &v).unwrap();
        (cs, h)
    }

    #[test]
    fn unconstrained_canonical_equations() {
        let (cs, h) = oscillator_2d();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let f = flow.vector_field_numeric(&[3.0, 4.0], 1e-9).unwrap();
        assert_eq!(f, vec![4.0, -3.0]); // (p, −q)
    }

    #[test]
    fn constrained_field_reduces_to_first_oscillator() {
        let (cs, h) = constrained_oscillator();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let f = flow.vector_field_numeric(&[1.0, 0.0, 0.0, 0.0], 1e-9).unwrap();
        assert_eq!(f, vec![0.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn tangency_holds_symbolically() {
        let (cs, h) = constrained_oscillator();
        // Construction runs the pre-check; also check a constraint's exact
        // derivative along the flow.
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let psi = ScalarExpr::from_poly(cs.constraints()[0].clone());
        assert!(flow.symbolic_derivative_along_flow(&psi).is_zero());
    }

    #[test]
    fn casimir_is_conserved_symbolically() {
        let v = Vars::new(["x", "y", "z"]);
        let mut m = Matrix::zeros_with(3, 3, rat(0));
        m.set(0, 1, rat(1));
        m.set(1, 0, rat(-1));
        let cs = ConstraintSystem::new(&v, skew_from_rational(&v, &m), vec![], vec![]).unwrap();
        let h = parse_expr("x^2*y + z*x", &v).unwrap();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        // z is a Casimir: π♯(dz) = 0.
        let z = ScalarExpr::var(&v, 2);
        assert!(flow.symbolic_derivative_along_flow(&z).is_zero());
    }

    #[test]
    fn near_singular_constraint_matrix_rejected() {
        let v = Vars::new(["q1", "p1", "q2", "p2"]);
        let psis = vec![
            parse_expr("q2 - q1^2", &v).unwrap().to_poly().unwrap(),
            parse_expr("p2 - p1", &v).unwrap().to_poly().unwrap(),
        ];
        let cs = ConstraintSystem::new(&v, canonical(&v), psis, vec![]).unwrap();
        let h = parse_expr("(q1^2 + p1^2)/2", &v).unwrap();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        // det c = (1 + 2 q1)² vanishes at q1 = −1/2.
        let err = flow.vector_field_numeric(&[-0.5, 0.0, 0.25, 0.0], 1e-9);
        assert!(matches!(err, Err(FlowError::NearSingularConstraintMatrix { .. })));
        let ok = flow.vector_field_numeric(&[0.0, 0.0, 0.0, 0.0], 1e-9);
        assert!(ok.is_ok());
    }

    #[test]
    fn oscillator_closes_after_one_period() {
        let (cs, h) = constrained_oscillator();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let mut cfg = FlowConfig::new(1e-3, 2.0 * std::f64::consts::PI, Method::Rk4);
        cfg.report_every = 100;
        let x0 = [1.0, 0.0, 0.0, 0.0];
        let traj = flow.integrate(&x0, &cfg).unwrap();
        let end = traj.final_state();
        let err: f64 = end
            .iter()
            .zip(&x0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-6, "period-return error {err}");
        // Linear constraints: drift stays at rounding level.
        assert!(traj.max_constraint_drift() < 1e-12);
    }

    #[test]
    fn off_constraint_start_rejected() {
        let (cs, h) = constrained_oscillator();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let cfg = FlowConfig::new(1e-2, 1.0, Method::Rk4);
        let err = flow.integrate(&[1.0, 0.0, 0.5, 0.0], &cfg);
        assert!(matches!(err, Err(FlowError::InitialConditionOffConstraint(_))));
    }

    #[test]
    fn csv_roundtrips_floats() {
        let (cs, h) = oscillator_2d();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let cfg = FlowConfig::new(0.1, 0.5, Method::Midpoint);
        let traj = flow.integrate(&[1.0, 0.0], &cfg).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,q,p,H,constraint_norm");
        for (i, line) in lines.enumerate() {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields[0], traj.times[i]);
            assert_eq!(fields[1], traj.states[i][0]);
            assert_eq!(fields[2], traj.states[i][1]);
            assert_eq!(fields[3], traj.h_values[i]);
            assert_eq!(fields[4], traj.constraint_norms[i]);
        }
    }

    #[test]
    fn midpoint_is_second_order_on_energy() {
        // Anharmonic oscillator so the leading energy-error term is generic.
        let v = Vars::new(["q", "p"]);
        let cs = ConstraintSystem::new(&v, canonical(&v), vec![], vec![]).unwrap();
        let h = parse_expr("(q^2 + p^2)/2 + q^4/4", &v).unwrap();
        let flow = DiracFlow::new(&cs, &h).unwrap();
        let drift = |dt: f64| {
            let cfg = FlowConfig::new(dt, 5.0, Method::Midpoint);
            flow.integrate(&[1.0, 0.0], &cfg).unwrap().max_energy_drift()
        };
        let ratio = drift(0.01) / drift(0.005);
        assert!((3.0..5.5).contains(&ratio), "second-order drift ratio {ratio}");
    }
}
