//! Solvability check and mechanical derivation of the polynomial SDE system.
//!
//! Given a system `E` of `n` polynomials in `x, y_1..y_n` and an initial
//! tuple `r0`, the derivation:
//!
//! 1. checks `E(0, r0) = 0` and that the Jacobian of partial stream
//!    derivatives is invertible at the origin;
//! 2. substitutes the initial-value indeterminates with `r0` and solves the
//!    linear system `A * y' = b` (rows are derivative decompositions,
//!    `b = -∂E/∂x`) by Cramer's rule with fraction-free elimination, giving
//!    the rational form `y'_i = f_i / g` with `g = det(A)` exactly;
//! 3. adjoins `w` for `1/g`, whose equation comes from the stream inverse
//!    law: `w' = -g(0,r0)^{-1} * h * w` with `h` obtained from `g'` by
//!    replacing each `y'_i` with `f_i * w`. When `g` is a nonzero constant
//!    the extra variable is elided and the right-hand sides divided by it.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::Zero;

use crate::deriv::{stream_derivative, stream_jacobian, stream_x_partial, DerivError};
use crate::parse::PolySystem;
use crate::poly::Polynomial;
use crate::rat::{is_zero, Rat};
use crate::var::{VarId, VarOrder};

/// Outcome of the solvability check at the origin.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HypothesisReport {
    pub e_at_origin: Vec<Rat>,
    pub jacobian_at_origin: Vec<Vec<Rat>>,
    pub determinant: Rat,
    pub ok: bool,
}

impl HypothesisReport {
    pub fn render(&self) -> String {
        let values: Vec<String> = self.e_at_origin.iter().map(|r| r.to_string()).collect();
        let mut out = format!("E(0, r0) = ({})\n", values.join(", "));
        out.push_str(&format!(
            "jacobian determinant at origin = {}\n",
            self.determinant
        ));
        out.push_str(&format!(
            "hypotheses satisfied: {}\n",
            if self.ok { "yes" } else { "no" }
        ));
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IftError {
    Hypothesis(Box<HypothesisReport>),
    Deriv(DerivError),
}

impl fmt::Display for IftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IftError::Hypothesis(report) => {
                write!(f, "hypotheses not satisfied\n{}", report.render())
            }
            IftError::Deriv(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for IftError {}

impl From<DerivError> for IftError {
    fn from(e: DerivError) -> Self {
        IftError::Deriv(e)
    }
}

/// Determinant of a rational matrix by Gaussian elimination.
pub fn det_rational(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::from_integer(1.into());
    for r in 0..n {
        let pivot_row = (r..n).find(|&i| !is_zero(&m[i][r]));
        let Some(p) = pivot_row else {
            return Rat::zero();
        };
        if p != r {
            m.swap(p, r);
            det = -det;
        }
        let pivot = m[r][r].clone();
        det *= pivot.clone();
        for i in r + 1..n {
            if is_zero(&m[i][r]) {
                continue;
            }
            let factor = &m[i][r] / &pivot;
            for j in r..n {
                let sub = &m[r][j] * &factor;
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Determinant of a polynomial matrix by fraction-free (Bareiss)
/// elimination with row pivoting; the result is the determinant exactly,
/// sign included.
pub fn det_bareiss(mut m: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    let mut negate = false;
    let mut prev = Polynomial::one();
    for r in 0..n - 1 {
        if m[r][r].is_zero() {
            let Some(p) = (r + 1..n).find(|&i| !m[i][r].is_zero()) else {
                return Polynomial::zero();
            };
            m.swap(p, r);
            negate = !negate;
        }
        let pivot_row = m[r].clone();
        for i in r + 1..n {
            let lead = m[i][r].clone();
            for j in r + 1..n {
                let num = pivot_row[r]
                    .mul(&m[i][j])
                    .sub(&lead.mul(&pivot_row[j]));
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("fraction-free elimination divides exactly");
            }
            m[i][r] = Polynomial::zero();
        }
        prev = pivot_row[r].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// Cofactor-expansion determinant; quadratic blowup, test oracle only.
pub fn det_cofactor(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| m[i][c].clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&det_cofactor(&minor));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

fn origin_point(sys: &PolySystem) -> BTreeMap<VarId, Rat> {
    let mut point = BTreeMap::new();
    point.insert(VarId::X, Rat::zero());
    for (i, r) in sys.r0.iter().enumerate() {
        point.insert(VarId::Y(i as u32 + 1), r.clone());
        point.insert(VarId::Y0(i as u32 + 1), r.clone());
    }
    point
}

/// Checks `E(0, r0) = 0` and invertibility of the Jacobian at the origin.
/// Failures are reported, not raised.
pub fn check_hypotheses(sys: &PolySystem, order: &VarOrder) -> Result<HypothesisReport, DerivError> {
    let n = sys.n();
    let point = origin_point(sys);
    let e_at_origin: Vec<Rat> = sys
        .equations
        .iter()
        .map(|p| p.eval(&point).expect("system variables are all bound"))
        .collect();
    let jac = stream_jacobian(&sys.equations, n, order)?;
    let jacobian_at_origin: Vec<Vec<Rat>> = jac
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| p.eval(&point).expect("jacobian variables are all bound"))
                .collect()
        })
        .collect();
    let determinant = det_rational(jacobian_at_origin.clone());
    let ok = e_at_origin.iter().all(is_zero) && !is_zero(&determinant);
    Ok(HypothesisReport {
        e_at_origin,
        jacobian_at_origin,
        determinant,
        ok,
    })
}

/// The rational stream differential system `y'_i = f_i / g`, with the
/// initial-value indeterminates already fixed to `r0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalSde {
    pub names: Vec<String>,
    pub f: Vec<Polynomial>,
    pub g: Polynomial,
    pub r0: Vec<Rat>,
}

fn y0_bindings(r0: &[Rat]) -> BTreeMap<VarId, Polynomial> {
    r0.iter()
        .enumerate()
        .map(|(i, r)| (VarId::Y0(i as u32 + 1), Polynomial::constant(r.clone())))
        .collect()
}

/// Derives the rational system by Cramer's rule on `A * y' = -∂E/∂x`.
pub fn build_rational_sde(sys: &PolySystem, order: &VarOrder) -> Result<RationalSde, IftError> {
    let report = check_hypotheses(sys, order)?;
    if !report.ok {
        return Err(IftError::Hypothesis(Box::new(report)));
    }
    let n = sys.n();
    let subs = y0_bindings(&sys.r0);

    let a: Vec<Vec<Polynomial>> = stream_jacobian(&sys.equations, n, order)?
        .into_iter()
        .map(|row| row.into_iter().map(|p| p.substitute(&subs)).collect())
        .collect();
    let b: Vec<Polynomial> = stream_x_partial(&sys.equations, n, order)?
        .into_iter()
        .map(|p| p.substitute(&subs).neg())
        .collect();

    let g = det_bareiss(a.clone());
    let f: Vec<Polynomial> = (0..n)
        .map(|col| {
            let mut replaced = a.clone();
            for (row, rhs) in replaced.iter_mut().zip(&b) {
                row[col] = rhs.clone();
            }
            det_bareiss(replaced)
        })
        .collect();

    Ok(RationalSde {
        names: sys.names.clone(),
        f,
        g,
        r0: sys.r0.clone(),
    })
}

/// A polynomial stream-differential initial value problem. Variables are
/// `Y(1..=vars)` in the right-hand sides; `names` supplies their rendering.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SdeSystem {
    pub names: Vec<String>,
    pub rhs: Vec<Polynomial>,
    pub init: Vec<Rat>,
}

impl SdeSystem {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name_of(&self, v: VarId) -> String {
        match v {
            VarId::X => "x".to_string(),
            VarId::Y(i) => self.names[i as usize - 1].clone(),
            other => other.to_string(),
        }
    }

    /// Human-readable equations followed by initial conditions.
    pub fn render(&self) -> String {
        let namer = |v: VarId| self.name_of(v);
        let mut out = String::new();
        for (name, rhs) in self.names.iter().zip(&self.rhs) {
            out.push_str(&format!("{name}' = {}\n", rhs.render(&namer)));
        }
        for (name, init) in self.names.iter().zip(&self.init) {
            out.push_str(&format!("{name}(0) = {init}\n"));
        }
        out
    }

    /// The equivalent guarded polynomial system `v_i - (init_i + x*rhs_i)`,
    /// whose unique stream solution is exactly this system's solution. This
    /// is the re-ingestable serialization.
    pub fn as_guarded_system(&self) -> PolySystem {
        let x = Polynomial::var(VarId::X);
        let equations = self
            .rhs
            .iter()
            .zip(&self.init)
            .enumerate()
            .map(|(i, (rhs, init))| {
                Polynomial::var(VarId::Y(i as u32 + 1))
                    .sub(&Polynomial::constant(init.clone()))
                    .sub(&x.mul(rhs))
            })
            .collect();
        PolySystem {
            names: self.names.clone(),
            equations,
            r0: self.init.clone(),
            order: VarOrder::identity(self.len()),
        }
    }
}

fn fresh_aux_name(names: &[String]) -> String {
    if !names.iter().any(|n| n == "w") {
        return "w".to_string();
    }
    (1..)
        .map(|k| format!("w{k}"))
        .find(|cand| !names.iter().any(|n| n == cand))
        .unwrap()
}

/// Converts `y'_i = f_i / g` into polynomial form. A nonzero constant `g`
/// is folded into the right-hand sides; otherwise `w = 1/g` is adjoined.
pub fn rational_to_polynomial(rsde: &RationalSde, order: &VarOrder) -> SdeSystem {
    rational_to_polynomial_with(rsde, order, false)
}

/// Like [`rational_to_polynomial`], with the constant-denominator
/// simplification optionally disabled.
pub fn rational_to_polynomial_with(
    rsde: &RationalSde,
    order: &VarOrder,
    force_aux: bool,
) -> SdeSystem {
    let n = rsde.f.len();
    if !force_aux {
        if let Some(c) = rsde.g.as_constant() {
            assert!(!is_zero(&c), "denominator vanishes identically");
            let inv = Rat::from_integer(1.into()) / c;
            return SdeSystem {
                names: rsde.names.clone(),
                rhs: rsde.f.iter().map(|f| f.scale(&inv)).collect(),
                init: rsde.r0.clone(),
            };
        }
    }

    let mut point = BTreeMap::new();
    point.insert(VarId::X, Rat::zero());
    for (i, r) in rsde.r0.iter().enumerate() {
        point.insert(VarId::Y(i as u32 + 1), r.clone());
    }
    let g0 = rsde.g.eval(&point).expect("denominator variables bound");
    assert!(!is_zero(&g0), "denominator vanishes at the origin");
    let g0_inv = Rat::from_integer(1.into()) / &g0;

    let w = Polynomial::var(VarId::W);
    let g_prime = stream_derivative(&rsde.g, order)
        .expect("denominator is over x and unknowns")
        .substitute(&y0_bindings(&rsde.r0));
    let prime_bindings: BTreeMap<VarId, Polynomial> = rsde
        .f
        .iter()
        .enumerate()
        .map(|(i, fi)| (VarId::YPrime(i as u32 + 1), fi.mul(&w)))
        .collect();
    let h = g_prime.substitute(&prime_bindings);
    let w_rhs = h.mul(&w).scale(&-g0_inv.clone());

    // The auxiliary variable becomes unknown n+1.
    let aux = VarId::Y(n as u32 + 1);
    let rename = |v: VarId| if v == VarId::W { aux } else { v };
    let mut names = rsde.names.clone();
    names.push(fresh_aux_name(&rsde.names));
    let mut rhs: Vec<Polynomial> = rsde
        .f
        .iter()
        .map(|fi| fi.mul(&w).rename(rename))
        .collect();
    rhs.push(w_rhs.rename(rename));
    let mut init = rsde.r0.clone();
    init.push(g0_inv);
    SdeSystem { names, rhs, init }
}

/// Full derivation: hypothesis check, rational system, polynomial system.
pub fn derive_pipeline(sys: &PolySystem, order: &VarOrder) -> Result<SdeSystem, IftError> {
    let rsde = build_rational_sde(sys, order)?;
    Ok(rational_to_polynomial(&rsde, order))
}
