//! Exact coefficient generation for polynomial stream differential systems.
//!
//! Right-hand sides are compiled once into a shared term DAG (Horner
//! factored, binary products, structurally identical subterms hash-consed
//! across equations). Every node carries a growable coefficient row; step
//! `k` fills index `k` of every row in topological order:
//!
//! - variable rows copy their equation's root row at `k-1` (divided by `k`
//!   in power-series mode, where the same DAG solves an ordinary
//!   differential system instead);
//! - constant rows are zero past index 0, the `x` row is `(0,1,0,..)`;
//! - sums are pointwise, products are truncated convolutions over the full
//!   history.
//!
//! Cost is `O(P*k^2 + S*k)` field operations for the first `k` coefficients
//! with `P` product and `S` sum nodes; rows never change once written.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::bigint::BigInt;
use num::traits::{One, Zero};
use num::Integer;

use crate::ift::SdeSystem;
use crate::parse::PolySystem;
use crate::poly::Polynomial;
use crate::rat::{is_zero, Rat};
use crate::var::VarId;

/// Convolution accumulator: sums products over a running common
/// denominator and reduces once at the end, instead of normalizing after
/// every addition. On integer streams this degenerates to plain integer
/// accumulation.
struct RatAccum {
    num: BigInt,
    den: BigInt,
}

impl RatAccum {
    fn new() -> Self {
        RatAccum {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    fn add_product(&mut self, a: &Rat, b: &Rat) {
        let pn = a.numer() * b.numer();
        let pd = a.denom() * b.denom();
        if self.den == pd {
            self.num += pn;
        } else if self.num.is_zero() {
            self.num = pn;
            self.den = pd;
        } else {
            let g = self.den.gcd(&pd);
            let scale_old = &pd / &g;
            let scale_new = &self.den / &g;
            self.num = &self.num * &scale_old + pn * scale_new;
            self.den = &self.den * scale_old;
        }
    }

    fn finish(self) -> Rat {
        if self.num.is_zero() {
            return Rat::zero();
        }
        Rat::new(self.num, self.den)
    }
}

pub type NodeId = usize;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NodeKind {
    Const(Rat),
    X,
    /// Unknown `i` (1-based), backed by equation `i`'s root.
    Var(u32),
    Add(NodeId, NodeId),
    Mul(NodeId, NodeId),
}

/// Shared subterm DAG of a differential system's right-hand sides.
#[derive(Clone, Debug)]
pub struct TermGraph {
    nodes: Vec<NodeKind>,
    /// Root node of each equation's right-hand side.
    roots: Vec<NodeId>,
    var_nodes: Vec<NodeId>,
    products: usize,
    sums: usize,
}

struct GraphBuilder {
    nodes: Vec<NodeKind>,
    interner: HashMap<NodeKind, NodeId>,
}

impl GraphBuilder {
    fn intern(&mut self, kind: NodeKind) -> NodeId {
        if let Some(&id) = self.interner.get(&kind) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(kind.clone());
        self.interner.insert(kind, id);
        id
    }

    fn constant_at(&self, id: NodeId) -> Option<&Rat> {
        match &self.nodes[id] {
            NodeKind::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Product node with multiplicative identities folded away.
    fn mul_node(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if let Some(c) = self.constant_at(a) {
            if c.is_zero() {
                return a;
            }
            if num::traits::One::is_one(c) {
                return b;
            }
        }
        if let Some(c) = self.constant_at(b) {
            if c.is_zero() {
                return b;
            }
            if num::traits::One::is_one(c) {
                return a;
            }
        }
        self.intern(NodeKind::Mul(a, b))
    }

    fn add_node(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if self.constant_at(a).map(Rat::is_zero).unwrap_or(false) {
            return b;
        }
        if self.constant_at(b).map(Rat::is_zero).unwrap_or(false) {
            return a;
        }
        self.intern(NodeKind::Add(a, b))
    }

    /// Horner-factored compilation. The split variable is the one occurring
    /// in the most terms (ties to the least variable), which pulls the most
    /// products out of the remaining coefficients.
    fn build_poly(&mut self, p: &Polynomial) -> NodeId {
        if let Some(c) = p.as_constant() {
            return self.intern(NodeKind::Const(c));
        }
        let mut counts: BTreeMap<VarId, usize> = BTreeMap::new();
        for (m, _) in p.terms() {
            for (v, _) in m.iter() {
                *counts.entry(v).or_insert(0) += 1;
            }
        }
        let v = counts
            .iter()
            .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then(vb.cmp(va)))
            .map(|(v, _)| *v)
            .expect("nonconstant polynomial");
        let v_node = match v {
            VarId::X => self.intern(NodeKind::X),
            VarId::Y(i) => self.intern(NodeKind::Var(i)),
            other => panic!("variable {other} cannot appear in a differential right-hand side"),
        };
        let coeffs = p.coefficients_of(v);
        let max_deg = *coeffs.keys().next_back().expect("nonempty");
        let mut acc = self.build_poly(&coeffs[&max_deg]);
        for d in (0..max_deg).rev() {
            acc = self.mul_node(acc, v_node);
            if let Some(c) = coeffs.get(&d) {
                if !c.is_zero() {
                    let c_node = self.build_poly(c);
                    acc = self.add_node(acc, c_node);
                }
            }
        }
        acc
    }
}

/// Compiles the right-hand sides of a system into a shared DAG. The graph
/// always contains the constant 1, `x`, and every unknown.
pub fn build_term_graph(sys: &SdeSystem) -> TermGraph {
    let mut b = GraphBuilder {
        nodes: Vec::new(),
        interner: HashMap::new(),
    };
    b.intern(NodeKind::Const(Rat::from_integer(1.into())));
    b.intern(NodeKind::X);
    let var_nodes: Vec<NodeId> = (1..=sys.len() as u32)
        .map(|i| b.intern(NodeKind::Var(i)))
        .collect();
    let roots: Vec<NodeId> = sys.rhs.iter().map(|p| b.build_poly(p)).collect();
    let products = b
        .nodes
        .iter()
        .filter(|k| matches!(k, NodeKind::Mul(_, _)))
        .count();
    let sums = b
        .nodes
        .iter()
        .filter(|k| matches!(k, NodeKind::Add(_, _)))
        .count();
    TermGraph {
        nodes: b.nodes,
        roots,
        var_nodes,
        products,
        sums,
    }
}

impl TermGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of distinct product nodes (`P`).
    pub fn products(&self) -> usize {
        self.products
    }

    /// Number of distinct sum nodes (`S`).
    pub fn sums(&self) -> usize {
        self.sums
    }
}

/// Whether the table advances streams (tail shift) or power series
/// (tail shift with the `1/k` Taylor factor).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveMode {
    Sde,
    OdeSeries,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EngineError {
    pub msg: &'static str,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.msg)
    }
}

impl std::error::Error for EngineError {}

const NOT_INVERTIBLE: EngineError = EngineError {
    msg: "stream has zero leading coefficient, no convolution inverse",
};

/// Lazily extended table of exact coefficients, one row per DAG node.
pub struct StreamSolution {
    graph: TermGraph,
    mode: SolveMode,
    rows: Vec<Vec<Rat>>,
    upto: usize,
}

impl StreamSolution {
    pub fn new(sys: &SdeSystem, mode: SolveMode) -> Self {
        let graph = build_term_graph(sys);
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(graph.nodes.len());
        for kind in &graph.nodes {
            let v0 = match kind {
                NodeKind::Const(c) => c.clone(),
                NodeKind::X => Rat::zero(),
                NodeKind::Var(i) => sys.init[*i as usize - 1].clone(),
                NodeKind::Add(a, b) => &rows[*a][0] + &rows[*b][0],
                NodeKind::Mul(a, b) => &rows[*a][0] * &rows[*b][0],
            };
            rows.push(vec![v0]);
        }
        StreamSolution {
            graph,
            mode,
            rows,
            upto: 0,
        }
    }

    pub fn graph(&self) -> &TermGraph {
        &self.graph
    }

    pub fn computed_upto(&self) -> usize {
        self.upto
    }

    /// Fills every row through index `k`. Indices already computed are
    /// never rewritten.
    pub fn extend(&mut self, k: usize) {
        for j in self.upto + 1..=k {
            for id in 0..self.graph.nodes.len() {
                let val = match self.graph.nodes[id] {
                    NodeKind::Const(_) => Rat::zero(),
                    NodeKind::X => {
                        if j == 1 {
                            Rat::from_integer(1.into())
                        } else {
                            Rat::zero()
                        }
                    }
                    NodeKind::Var(i) => {
                        let prev = &self.rows[self.graph.roots[i as usize - 1]][j - 1];
                        match self.mode {
                            SolveMode::Sde => prev.clone(),
                            SolveMode::OdeSeries => prev / Rat::from_integer(j.into()),
                        }
                    }
                    NodeKind::Add(a, b) => &self.rows[a][j] + &self.rows[b][j],
                    NodeKind::Mul(a, b) => {
                        // Constant factors only have an index-0 coefficient.
                        if let NodeKind::Const(c) = &self.graph.nodes[a] {
                            c * &self.rows[b][j]
                        } else if let NodeKind::Const(c) = &self.graph.nodes[b] {
                            c * &self.rows[a][j]
                        } else {
                            let ra = &self.rows[a];
                            let rb = &self.rows[b];
                            let mut acc = RatAccum::new();
                            for t in 0..=j {
                                let (x, y) = (&ra[t], &rb[j - t]);
                                if !is_zero(x) && !is_zero(y) {
                                    acc.add_product(x, y);
                                }
                            }
                            acc.finish()
                        }
                    }
                };
                self.rows[id].push(val);
            }
            self.upto = j;
        }
    }

    /// Coefficient row of unknown `i` (1-based), through `computed_upto`.
    pub fn stream(&self, i: usize) -> &[Rat] {
        &self.rows[self.graph.var_nodes[i - 1]]
    }

    pub fn streams(&self) -> Vec<Vec<Rat>> {
        (1..=self.graph.var_nodes.len())
            .map(|i| self.stream(i).to_vec())
            .collect()
    }
}

/// Truncated convolution through index `k`; inputs must cover `0..=k`.
pub fn convolve(a: &[Rat], b: &[Rat], k: usize) -> Vec<Rat> {
    assert!(a.len() > k && b.len() > k, "operands must cover index k");
    (0..=k)
        .map(|i| {
            let mut acc = RatAccum::new();
            for j in 0..=i {
                let (x, y) = (&a[j], &b[i - j]);
                if !is_zero(x) && !is_zero(y) {
                    acc.add_product(x, y);
                }
            }
            acc.finish()
        })
        .collect()
}

/// Truncated convolution inverse; the leading coefficient must be nonzero.
pub fn stream_inverse(a: &[Rat], k: usize) -> Result<Vec<Rat>, EngineError> {
    assert!(a.len() > k, "operand must cover index k");
    if is_zero(&a[0]) {
        return Err(NOT_INVERTIBLE);
    }
    let lead_inv = Rat::from_integer(1.into()) / &a[0];
    let mut inv = Vec::with_capacity(k + 1);
    inv.push(lead_inv.clone());
    for i in 1..=k {
        let mut acc = Rat::zero();
        for j in 1..=i {
            let term = &a[j] * &inv[i - j];
            acc += term;
        }
        inv.push(-&lead_inv * acc);
    }
    Ok(inv)
}

/// Evaluates a polynomial on streams through index `k` by direct truncated
/// convolution; `x` defaults to `(0,1,0,..)` unless bound explicitly.
/// This is the unmemoized reference path.
pub fn eval_on_streams(
    p: &Polynomial,
    assignment: &BTreeMap<VarId, Vec<Rat>>,
    k: usize,
) -> Vec<Rat> {
    let x_default: Vec<Rat> = (0..=k)
        .map(|i| Rat::from_integer(i64::from(i == 1).into()))
        .collect();
    let mut acc = vec![Rat::zero(); k + 1];
    for (m, c) in p.terms() {
        let mut term: Vec<Rat> = (0..=k)
            .map(|i| {
                if i == 0 {
                    c.clone()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        for (v, e) in m.iter() {
            let stream: &[Rat] = match assignment.get(&v) {
                Some(s) => s,
                None if v == VarId::X => &x_default,
                None => panic!("no stream assigned to {v}"),
            };
            for _ in 0..e {
                term = convolve(&term, &stream[..=k.min(stream.len() - 1)], k);
            }
        }
        for (slot, t) in acc.iter_mut().zip(term) {
            *slot += t;
        }
    }
    acc
}

/// Direct recurrence `σ_i(k+1) = p_i(X, σ_{:k})(k)`, re-evaluating the
/// right-hand sides without memoization. Oracle for [`StreamSolution`].
pub fn naive_coefficients(sys: &SdeSystem, k: usize) -> Vec<Vec<Rat>> {
    let m = sys.len();
    let mut rows: Vec<Vec<Rat>> = sys.init.iter().map(|r| vec![r.clone()]).collect();
    for step in 0..k {
        let assignment: BTreeMap<VarId, Vec<Rat>> = (0..m)
            .map(|i| {
                let mut padded = rows[i].clone();
                padded.resize(step + 1, Rat::zero());
                (VarId::Y(i as u32 + 1), padded)
            })
            .collect();
        for i in 0..m {
            let value = eval_on_streams(&sys.rhs[i], &assignment, step)
                .pop()
                .expect("nonempty evaluation");
            rows[i].push(value);
        }
    }
    rows
}

/// Evaluates each defining polynomial on the solution streams; a correct
/// solution gives all-zero rows.
pub fn residual(sys: &PolySystem, streams: &[Vec<Rat>], k: usize) -> Vec<Vec<Rat>> {
    let assignment: BTreeMap<VarId, Vec<Rat>> = streams
        .iter()
        .enumerate()
        .map(|(i, s)| (VarId::Y(i as u32 + 1), s.clone()))
        .collect();
    sys.equations
        .iter()
        .map(|p| eval_on_streams(p, &assignment, k))
        .collect()
}
