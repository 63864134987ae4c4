//! Classical implicit-function route: ordinary differential system and its
//! power-series solution, used as an independent oracle and benchmark
//! baseline for the stream route.
//!
//! From `E(x, y) = 0` the ordinary chain rule gives
//! `J(x,y) * dy/dx = -∂E/∂x` with `J` the classical Jacobian, solved by
//! Cramer's rule into `dy_i/dx = f_i / g`. The rational form is
//! polynomialized with `w = 1/g`, `dw/dx = -w^2 * dg/dx` chain-ruled
//! through the system. Series coefficients then follow the cascade
//! `(j+1) c(j+1) = [x^j] rhs(x, series)`; the only difference from the
//! stream recurrence is the `1/(j+1)` factor.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::Zero;

use crate::deriv::{classical_partial, classical_total_x_derivative, stream_derivative};
use crate::engine::{build_term_graph, SolveMode, StreamSolution};
use crate::ift::{
    check_hypotheses, derive_pipeline, det_bareiss, det_rational, HypothesisReport, IftError,
    SdeSystem,
};
use crate::parse::PolySystem;
use crate::poly::Polynomial;
use crate::rat::{content_gcd, is_zero, Rat};
use crate::var::{VarId, VarOrder};

/// An ordinary-differential initial value problem `dv_i/dx = rhs_i`,
/// structurally identical to [`SdeSystem`] but with Taylor semantics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OdeSystem {
    pub names: Vec<String>,
    pub rhs: Vec<Polynomial>,
    pub init: Vec<Rat>,
}

impl OdeSystem {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// The engine solves both kinds of system; only the stepping rule
    /// differs.
    fn as_engine_system(&self) -> SdeSystem {
        SdeSystem {
            names: self.names.clone(),
            rhs: self.rhs.clone(),
            init: self.init.clone(),
        }
    }

    pub fn render(&self) -> String {
        let namer = |v: VarId| match v {
            VarId::X => "x".to_string(),
            VarId::Y(i) => self.names[i as usize - 1].clone(),
            other => other.to_string(),
        };
        let mut out = String::new();
        for (name, rhs) in self.names.iter().zip(&self.rhs) {
            out.push_str(&format!("d{name}/dx = {}\n", rhs.render(&namer)));
        }
        for (name, init) in self.names.iter().zip(&self.init) {
            out.push_str(&format!("{name}(0) = {init}\n"));
        }
        out
    }
}

/// Classical solvability report: `E(0, r0)` and `det (∇_y E)(0, r0)`.
pub fn check_classical_hypotheses(sys: &PolySystem) -> HypothesisReport {
    let n = sys.n();
    let mut point = BTreeMap::new();
    point.insert(VarId::X, Rat::zero());
    for (i, r) in sys.r0.iter().enumerate() {
        point.insert(VarId::Y(i as u32 + 1), r.clone());
    }
    let e_at_origin: Vec<Rat> = sys
        .equations
        .iter()
        .map(|p| p.eval(&point).expect("system variables bound"))
        .collect();
    let jacobian_at_origin: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    classical_partial(&sys.equations[i], VarId::Y(j as u32 + 1))
                        .eval(&point)
                        .expect("jacobian variables bound")
                })
                .collect()
        })
        .collect();
    let determinant = det_rational(jacobian_at_origin.clone());
    let ok = e_at_origin.iter().all(is_zero) && !is_zero(&determinant);
    HypothesisReport {
        e_at_origin,
        jacobian_at_origin,
        determinant,
        ok,
    }
}

/// Cramer solution of the classical system `J * dy/dx = -∂E/∂x`, with the
/// common scalar content of numerators and denominator divided out.
pub fn build_classical_rational(
    sys: &PolySystem,
) -> Result<(Vec<Polynomial>, Polynomial), IftError> {
    let report = check_classical_hypotheses(sys);
    if !report.ok {
        return Err(IftError::Hypothesis(Box::new(report)));
    }
    let n = sys.n();
    let jac: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| classical_partial(&sys.equations[i], VarId::Y(j as u32 + 1)))
                .collect()
        })
        .collect();
    let b: Vec<Polynomial> = sys
        .equations
        .iter()
        .map(|p| classical_partial(p, VarId::X).neg())
        .collect();
    let g = det_bareiss(jac.clone());
    let f: Vec<Polynomial> = (0..n)
        .map(|col| {
            let mut replaced = jac.clone();
            for (row, rhs) in replaced.iter_mut().zip(&b) {
                row[col] = rhs.clone();
            }
            det_bareiss(replaced)
        })
        .collect();
    let content = content_gcd(
        f.iter()
            .flat_map(|p| p.terms().map(|(_, c)| c))
            .chain(g.terms().map(|(_, c)| c)),
    );
    let inv = Rat::from_integer(1.into()) / content;
    Ok((f.iter().map(|p| p.scale(&inv)).collect(), g.scale(&inv)))
}

/// Builds the polynomial ordinary-differential system solved by the
/// implicitly defined function, adjoining `w = 1/det` when needed.
pub fn build_classical_ode(sys: &PolySystem) -> Result<OdeSystem, IftError> {
    let (f, g) = build_classical_rational(sys)?;
    let n = sys.n();

    if let Some(c) = g.as_constant() {
        let inv = Rat::from_integer(1.into()) / c;
        return Ok(OdeSystem {
            names: sys.names.clone(),
            rhs: f.iter().map(|p| p.scale(&inv)).collect(),
            init: sys.r0.clone(),
        });
    }

    let mut point = BTreeMap::new();
    point.insert(VarId::X, Rat::zero());
    for (i, r) in sys.r0.iter().enumerate() {
        point.insert(VarId::Y(i as u32 + 1), r.clone());
    }
    let g0 = g.eval(&point).expect("denominator variables bound");
    let w = Polynomial::var(VarId::W);
    let prime_bindings: BTreeMap<VarId, Polynomial> = f
        .iter()
        .enumerate()
        .map(|(i, fi)| (VarId::YPrime(i as u32 + 1), fi.mul(&w)))
        .collect();
    // dw/dx = -w^2 * dg/dx with dy_i/dx expanded to f_i * w
    let dg = classical_total_x_derivative(&g).substitute(&prime_bindings);
    let w_rhs = dg.mul(&w.pow(2)).neg();

    let aux = VarId::Y(n as u32 + 1);
    let rename = |v: VarId| if v == VarId::W { aux } else { v };
    let mut names = sys.names.clone();
    let mut aux_name = "w".to_string();
    let mut k = 0;
    while names.contains(&aux_name) {
        k += 1;
        aux_name = format!("w{k}");
    }
    names.push(aux_name);
    let mut rhs: Vec<Polynomial> = f.iter().map(|fi| fi.mul(&w).rename(rename)).collect();
    rhs.push(w_rhs.rename(rename));
    let mut init = sys.r0.clone();
    init.push(Rat::from_integer(1.into()) / g0);
    Ok(OdeSystem { names, rhs, init })
}

/// Power-series coefficients `c_0..c_k` of every system variable.
pub fn taylor_solve(ode: &OdeSystem, k: usize) -> Vec<Vec<Rat>> {
    let mut sol = StreamSolution::new(&ode.as_engine_system(), SolveMode::OdeSeries);
    sol.extend(k);
    sol.streams()
}

/// Outcome of running both coefficient routes on the same system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompareReport {
    pub k: usize,
    /// `(variable index 1-based, coefficient index, stream value, series value)`
    pub first_mismatch: Option<(usize, usize, Rat, Rat)>,
}

impl CompareReport {
    pub fn agree(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_mismatch {
            None => write!(f, "methods agree through index {}", self.k),
            Some((var, idx, sde, ode)) => write!(
                f,
                "methods disagree at variable {var}, index {idx}: stream route {sde}, series route {ode}"
            ),
        }
    }
}

/// Runs the stream route and the classical series route through index `k`
/// and compares the unknowns' coefficients exactly.
pub fn compare_methods(
    sys: &PolySystem,
    order: &VarOrder,
    k: usize,
) -> Result<CompareReport, IftError> {
    let sde = derive_pipeline(sys, order)?;
    let ode = build_classical_ode(sys)?;
    let mut sde_sol = StreamSolution::new(&sde, SolveMode::Sde);
    sde_sol.extend(k);
    let series = taylor_solve(&ode, k);
    let n = sys.n();
    for i in 1..=n {
        let a = sde_sol.stream(i);
        let b = &series[i - 1];
        for idx in 0..=k {
            if a[idx] != b[idx] {
                return Ok(CompareReport {
                    k,
                    first_mismatch: Some((i, idx, a[idx].clone(), b[idx].clone())),
                });
            }
        }
    }
    Ok(CompareReport {
        k,
        first_mismatch: None,
    })
}

/// Size comparison of the two derivative routes on one system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricRecord {
    /// Total monomials across the stream derivatives of the equations,
    /// initial-value indeterminates fixed to `r0`.
    pub monomials_stream: usize,
    /// Total monomials across the ordinary total derivatives `d/dx`.
    pub monomials_classical: usize,
    pub p_stream: usize,
    pub s_stream: usize,
    pub p_classical: usize,
    pub s_classical: usize,
}

impl MetricRecord {
    pub fn render(&self) -> String {
        format!(
            "monomials_stream={}\nmonomials_classical={}\nP_stream={}\nS_stream={}\nP_classical={}\nS_classical={}\n",
            self.monomials_stream,
            self.monomials_classical,
            self.p_stream,
            self.s_stream,
            self.p_classical,
            self.s_classical,
        )
    }
}

/// Counts derivative sizes and the operator counts of both derived systems.
pub fn derivative_size_metric(
    sys: &PolySystem,
    order: &VarOrder,
) -> Result<MetricRecord, IftError> {
    let y0_subs: BTreeMap<VarId, Polynomial> = sys
        .r0
        .iter()
        .enumerate()
        .map(|(i, r)| (VarId::Y0(i as u32 + 1), Polynomial::constant(r.clone())))
        .collect();
    let mut monomials_stream = 0;
    let mut monomials_classical = 0;
    for p in &sys.equations {
        monomials_stream += stream_derivative(p, order)?.substitute(&y0_subs).term_count();
        monomials_classical += classical_total_x_derivative(p).term_count();
    }
    let sde = derive_pipeline(sys, order)?;
    let ode = build_classical_ode(sys)?;
    let sde_graph = build_term_graph(&sde);
    let ode_graph = build_term_graph(&ode.as_engine_system());
    Ok(MetricRecord {
        monomials_stream,
        monomials_classical,
        p_stream: sde_graph.products(),
        s_stream: sde_graph.sums(),
        p_classical: ode_graph.products(),
        s_classical: ode_graph.sums(),
    })
}

/// Consistency of both hypothesis checks: by the partial-derivative lemma
/// they accept or reject identical inputs.
pub fn checks_agree(sys: &PolySystem, order: &VarOrder) -> bool {
    let stream = check_hypotheses(sys, order).map(|r| r.ok).unwrap_or(false);
    let classical = check_classical_hypotheses(sys).ok;
    stream == classical
}
