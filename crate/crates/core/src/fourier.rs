//! Exact arithmetic in the group ring of `Z^d` and matrices over it.
//!
//! A [`FourierPolynomial`] is a finitely supported map `Z^d → C`, standing
//! for the function `k ↦ Σ_m c_m e^{-i⟨m,k⟩}` on the torus. Products are
//! convolutions, so evaluation is a ring homomorphism. Fiber operators live
//! in [`FourierMatrix`]; the trace of the n-th matrix power is again a
//! polynomial, and its coefficients are exactly the per-index weighted cycle
//! counts of the underlying graph.
//!
//! Coefficients are arbitrary-precision integers for the adjacency operator
//! (counts must stay exact; they grow like `ν κ_+^n`) and `f64` for the
//! weighted kinds. The `e^{-i⟨m,k⟩}` sign convention is fixed once here; all
//! trace series are even in `k`, so no reported quantity depends on it.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{FundamentalGraph, ModifiedGraph};
use crate::index::IndexVector;
use crate::operator::OperatorKind;

/// Scalar types usable as Fourier coefficients.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, rhs: &Self);
    fn mul(&self, rhs: &Self) -> Self;
    fn to_f64(&self) -> f64;
    fn to_json(&self) -> serde_json::Value;
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

impl Coefficient for BigInt {
    fn zero() -> Self {
        BigInt::from(0)
    }
    fn is_zero(&self) -> bool {
        num_bigint::BigInt::from(0) == *self
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
    fn to_json(&self) -> serde_json::Value {
        match i64::try_from(self.clone()) {
            Ok(v) => serde_json::json!(v),
            Err(_) => serde_json::json!(self.to_string()),
        }
    }
}

/// Finitely supported map `Z^d → C`, the function `Σ_m c_m e^{-i⟨m,k⟩}`.
///
/// Stored terms never have zero coefficient; keys iterate lexicographically.
#[derive(Clone, PartialEq)]
pub struct FourierPolynomial<C> {
    dimension: usize,
    terms: BTreeMap<IndexVector, C>,
}

pub type IntPolynomial = FourierPolynomial<BigInt>;
pub type RealPolynomial = FourierPolynomial<f64>;

impl<C: Coefficient> FourierPolynomial<C> {
    pub fn zero(dimension: usize) -> Self {
        FourierPolynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dimension: usize, c: C) -> Self {
        let mut p = Self::zero(dimension);
        p.add_term(IndexVector::zero(dimension), c);
        p
    }

    pub fn from_terms<I>(dimension: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (IndexVector, C)>,
    {
        let mut p = Self::zero(dimension);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · e^{-i⟨m,k⟩}`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: IndexVector, c: C) {
        debug_assert_eq!(m.dim(), self.dimension);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &IndexVector) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn coefficient_f64(&self, m: &IndexVector) -> f64 {
        self.terms.get(m).map(|c| c.to_f64()).unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexVector, &C)> {
        self.terms.iter()
    }

    /// Convolution product; realizes the pointwise product of the evaluated
    /// functions. The support stays within the Minkowski sum of the factors'
    /// supports.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dimension != rhs.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: rhs.dimension,
            });
        }
        let mut out = Self::zero(self.dimension);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.add(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dimension != rhs.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: rhs.dimension,
            });
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// `Σ_m c_m e^{-i⟨m,k⟩}`.
    pub fn evaluate(&self, k: &[f64]) -> Complex64 {
        debug_assert_eq!(k.len(), self.dimension);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            acc += Complex64::from_polar(1.0, -m.dot(k)) * c.to_f64();
        }
        acc
    }

    /// Largest absolute component over the support (aliasing-free quadrature
    /// needs a grid strictly finer than this).
    pub fn max_abs_component(&self) -> i64 {
        self.terms.keys().map(|m| m.inf_norm()).max().unwrap_or(0)
    }

    /// Largest Euclidean key norm over the support.
    pub fn max_key_norm(&self) -> f64 {
        self.terms.keys().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// Exact symmetry `c_m = c_{-m}` of the stored coefficients.
    pub fn is_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| self.terms.get(&m.negated()) == Some(c))
    }

    pub fn sum_abs_f64(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }

    /// `{"terms": [{"m": [...], "c": ...}, ...]}` in lexicographic key order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| serde_json::json!({ "m": m.components(), "c": c.to_json() }))
            .collect();
        serde_json::json!({ "terms": terms })
    }
}

impl IntPolynomial {
    pub fn to_real(&self) -> RealPolynomial {
        RealPolynomial {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.to_f64()))
                .collect(),
        }
    }
}

impl<C: Coefficient> fmt::Debug for FourierPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:?}·e^(-i⟨{m}, k⟩)")?;
        }
        Ok(())
    }
}

/// Square matrix of Fourier polynomials: the algebraic form of a fiber
/// operator family `k ↦ M(k)`.
#[derive(Clone, PartialEq)]
pub struct FourierMatrix<C> {
    size: usize,
    dimension: usize,
    entries: Vec<FourierPolynomial<C>>,
}

impl<C: Coefficient> fmt::Debug for FourierMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FourierMatrix {}x{} (d = {})", self.size, self.size, self.dimension)?;
        for r in 0..self.size {
            for c in 0..self.size {
                writeln!(f, "  [{r},{c}] {:?}", self.entry(r, c))?;
            }
        }
        Ok(())
    }
}

pub type IntMatrix = FourierMatrix<BigInt>;
pub type RealMatrix = FourierMatrix<f64>;

impl<C: Coefficient> FourierMatrix<C> {
    pub fn new(size: usize, dimension: usize) -> Self {
        FourierMatrix {
            size,
            dimension,
            entries: vec![FourierPolynomial::zero(dimension); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, row: usize, col: usize) -> &FourierPolynomial<C> {
        &self.entries[row * self.size + col]
    }

    pub fn entry_mut(&mut self, row: usize, col: usize) -> &mut FourierPolynomial<C> {
        &mut self.entries[row * self.size + col]
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.size != rhs.size || self.dimension != rhs.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: rhs.size,
            });
        }
        let n = self.size;
        let mut out = Self::new(n, self.dimension);
        for r in 0..n {
            for c in 0..n {
                let mut acc = FourierPolynomial::zero(self.dimension);
                for s in 0..n {
                    let prod = self.entry(r, s).mul(rhs.entry(s, c))?;
                    acc = acc.add(&prod)?;
                }
                *out.entry_mut(r, c) = acc;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> FourierPolynomial<C> {
        let mut acc = FourierPolynomial::zero(self.dimension);
        for i in 0..self.size {
            acc = acc.add(self.entry(i, i)).expect("same dimension");
        }
        acc
    }

    /// `Tr(M^n)` for `n = 1..=n_max` in one multiplication sweep.
    pub fn power_traces(&self, n_max: usize, cap: usize) -> Result<Vec<FourierPolynomial<C>>> {
        if n_max == 0 || n_max > cap {
            return Err(Error::PowerCapExceeded { n: n_max, cap });
        }
        let mut traces = Vec::with_capacity(n_max);
        let mut power = self.clone();
        traces.push(power.trace());
        for _ in 1..n_max {
            power = power.mul(self)?;
            traces.push(power.trace());
        }
        Ok(traces)
    }

    /// `Tr(M^n)` as a Fourier polynomial.
    pub fn power_trace(&self, n: usize, cap: usize) -> Result<FourierPolynomial<C>> {
        Ok(self.power_traces(n, cap)?.pop().expect("n >= 1"))
    }

    /// Numeric evaluation at a quasimomentum.
    pub fn evaluate(&self, k: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |r, c| self.entry(r, c).evaluate(k))
    }

    /// Checks the Hermitian coefficient pairing: the `(y,x)` coefficient at
    /// `m` equals the `(x,y)` coefficient at `-m`. With real weights this
    /// makes every evaluated matrix Hermitian.
    pub fn is_hermitian_symmetric(&self) -> bool {
        for r in 0..self.size {
            for c in 0..self.size {
                let fwd = self.entry(r, c);
                let bwd = self.entry(c, r);
                if fwd.num_terms() != bwd.num_terms() {
                    return false;
                }
                for (m, coeff) in fwd.terms() {
                    if bwd.coefficient(&m.negated()) != Some(coeff) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl IntMatrix {
    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            size: self.size,
            dimension: self.dimension,
            entries: self.entries.iter().map(|p| p.to_real()).collect(),
        }
    }
}

/// Exact adjacency fiber matrix: entry `(x,y)` collects `e^{-i⟨τ(e),k⟩}` over
/// the oriented edges from `x` to `y`, with integer multiplicities.
pub fn adjacency_count_matrix(g: &FundamentalGraph) -> IntMatrix {
    let nu = g.num_vertices();
    let mut m = IntMatrix::new(nu, g.dimension());
    for e in g.edges() {
        m.entry_mut(e.from, e.to)
            .add_term(e.index.clone(), BigInt::from(1));
    }
    m
}

/// Fiber matrix of a kind that lives on the unmodified graph (`Adjacency` or
/// `Normalized`).
pub fn matrix_from_fundamental(g: &FundamentalGraph, kind: OperatorKind) -> Result<RealMatrix> {
    match kind {
        OperatorKind::Adjacency => Ok(adjacency_count_matrix(g).to_real()),
        OperatorKind::Normalized => {
            let nu = g.num_vertices();
            let mut m = RealMatrix::new(nu, g.dimension());
            for e in g.edges() {
                let w = 1.0 / ((g.degree(e.from) * g.degree(e.to)) as f64).sqrt();
                m.entry_mut(e.from, e.to).add_term(e.index.clone(), w);
            }
            Ok(m)
        }
        other => Err(Error::WrongGraphFlavor {
            kind: other,
            got: "fundamental",
        }),
    }
}

/// Fiber matrix of a kind that lives on the modified graph (`Schrodinger` or
/// `NegLaplacian`). Base edges carry weight 1; the added loop at `x` carries
/// the stored weight `v_x` (`NegLaplacian` replaces it by `-κ_x`).
pub fn matrix_from_modified(mg: &ModifiedGraph, kind: OperatorKind) -> Result<RealMatrix> {
    let weight_at = |x: usize| -> f64 {
        match kind {
            OperatorKind::Schrodinger => mg.loop_weights()[x],
            OperatorKind::NegLaplacian => -(mg.base().degree(x) as f64),
            _ => unreachable!(),
        }
    };
    if !kind.uses_modified_graph() {
        return Err(Error::WrongGraphFlavor {
            kind,
            got: "modified",
        });
    }
    let g = mg.base();
    let nu = g.num_vertices();
    let mut m = RealMatrix::new(nu, g.dimension());
    for e in g.edges() {
        m.entry_mut(e.from, e.to).add_term(e.index.clone(), 1.0);
    }
    for x in 0..nu {
        m.entry_mut(x, x)
            .add_term(IndexVector::zero(g.dimension()), weight_at(x));
    }
    Ok(m)
}

/// Fiber matrix for any kind, building the modified graph when the kind
/// requires it.
pub fn operator_matrix(g: &FundamentalGraph, kind: OperatorKind) -> Result<RealMatrix> {
    match kind {
        OperatorKind::Adjacency | OperatorKind::Normalized => matrix_from_fundamental(g, kind),
        OperatorKind::Schrodinger => matrix_from_modified(&crate::graph::modify_graph(g), kind),
        OperatorKind::NegLaplacian => {
            matrix_from_modified(&crate::graph::modify_graph_zero_potential(g), kind)
        }
    }
}
