//! Heat-kernel and resolvent trace expansions, prime cycle classes,
//! determinant products, the Γ-determinant, L-functions and Ihara zeta
//! truncations.
//!
//! Every infinite sum or product is truncated explicitly and reported
//! together with a certified remainder bound; no approximation leaves this
//! module without its bound. Series in the power `n` are majorized through
//! `|Tr M^n(k)| ≤ ν ‖M(k)‖^n`; cycle products are majorized in log space by
//! the unsigned cycle sums `Σ_c |ω(c)| r^{|c|} / |c|`, which the entrywise-
//! absolute fiber matrix at `k = 0` controls.

use num_complex::Complex64;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cycles::{self, Cycle, CycleOptions};
use crate::error::{Error, Result};
use crate::fourier::{operator_matrix, RealMatrix};
use crate::graph::{modify_graph, modify_graph_zero_potential, FundamentalGraph, ModifiedGraph};
use crate::index::IndexVector;
use crate::operator::{EngineConfig, OperatorKind};
use crate::spectral::{fiber_norm, operator_norm_estimate};
use crate::traces::{trace_series_up_to, TraceSeries};

/// A truncated series or product value with its certified remainder bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesApprox {
    pub value: Complex64,
    /// Truncation order: the power `N_max` for trace expansions, the length
    /// cap `L` for cycle products.
    pub truncation: usize,
    pub tail_bound: f64,
}

/// Precomputed trace series `𝒯_1 … 𝒯_{N}` for one graph and kind, amortizing
/// the symbolic matrix powers across many expansion evaluations.
pub struct ExpansionEngine<'g> {
    graph: &'g FundamentalGraph,
    kind: OperatorKind,
    series: Vec<TraceSeries>,
    global_norm: f64,
}

impl<'g> ExpansionEngine<'g> {
    pub fn new(
        graph: &'g FundamentalGraph,
        kind: OperatorKind,
        n_max: usize,
        config: &EngineConfig,
    ) -> Result<Self> {
        let series = trace_series_up_to(graph, kind, n_max, config)?;
        let global_norm = operator_norm_estimate(graph, kind, config.norm_grid)?;
        Ok(ExpansionEngine {
            graph,
            kind,
            series,
            global_norm,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.series.len()
    }

    /// Sampled-and-inflated estimate of the full operator norm `‖H‖`.
    pub fn global_norm(&self) -> f64 {
        self.global_norm
    }

    fn nu(&self) -> f64 {
        self.graph.num_vertices() as f64
    }

    /// `Tr e^{tM(k)} ≈ ν + Σ_{n≤N} t^n/n! · 𝒯_n(k)`; the remainder is bounded
    /// by `ν (|t|‖M(k)‖)^{N+1}/(N+1)! · e^{|t|‖M(k)‖}`.
    pub fn heat_trace(&self, t: Complex64, k: &[f64]) -> Result<SeriesApprox> {
        let norm = fiber_norm(self.graph, self.kind, k)?;
        Ok(self.heat_sum(t, |s| s.evaluate(k), norm))
    }

    /// Brillouin-zone average of the heat trace: same series with the
    /// regularized coefficients `𝒯_{n,0}`.
    pub fn heat_trace_integrated(&self, t: Complex64) -> Result<SeriesApprox> {
        Ok(self.heat_sum(t, |s| s.constant_term(), self.global_norm))
    }

    fn heat_sum(
        &self,
        t: Complex64,
        coeff: impl Fn(&TraceSeries) -> f64,
        norm: f64,
    ) -> SeriesApprox {
        let mut value = Complex64::new(self.nu(), 0.0);
        let mut t_pow_over_fact = Complex64::new(1.0, 0.0);
        for (i, s) in self.series.iter().enumerate() {
            t_pow_over_fact *= t / (i as f64 + 1.0);
            value += t_pow_over_fact * coeff(s);
        }
        let n = self.series.len();
        let s = t.norm() * norm;
        let mut lead = 1.0;
        for j in 1..=(n + 1) {
            lead *= s / j as f64;
        }
        SeriesApprox {
            value,
            truncation: n,
            tail_bound: self.nu() * lead * s.exp(),
        }
    }

    /// `Tr (M(k) - λ)^{-1} ≈ -ν/λ - Σ_{n≤N} 𝒯_n(k)/λ^{n+1}`, valid for
    /// `|λ| > ‖M(k)‖`; the geometric remainder bound is
    /// `ν r^{N+1} / ((1-r)|λ|)` with `r = ‖M(k)‖/|λ|`.
    pub fn resolvent_trace(&self, lambda: Complex64, k: &[f64]) -> Result<SeriesApprox> {
        let norm = fiber_norm(self.graph, self.kind, k)?;
        self.resolvent_sum(lambda, |s| s.evaluate(k), norm)
    }

    /// Integrated variant, valid for `|λ|` beyond the global norm estimate.
    pub fn resolvent_trace_integrated(&self, lambda: Complex64) -> Result<SeriesApprox> {
        self.resolvent_sum(lambda, |s| s.constant_term(), self.global_norm)
    }

    fn resolvent_sum(
        &self,
        lambda: Complex64,
        coeff: impl Fn(&TraceSeries) -> f64,
        norm: f64,
    ) -> Result<SeriesApprox> {
        let magnitude = lambda.norm();
        if magnitude <= norm {
            return Err(Error::DivergentSeries {
                given: magnitude,
                radius: norm,
            });
        }
        let mut value = -Complex64::new(self.nu(), 0.0) / lambda;
        let mut inv_pow = lambda.inv();
        for s in &self.series {
            inv_pow /= lambda;
            value -= inv_pow * coeff(s);
        }
        let n = self.series.len();
        let r = norm / magnitude;
        Ok(SeriesApprox {
            value,
            truncation: n,
            tail_bound: self.nu() * r.powi(n as i32 + 1) / ((1.0 - r) * magnitude),
        })
    }
}

/// One-shot [`ExpansionEngine::heat_trace`].
pub fn heat_trace(
    g: &FundamentalGraph,
    kind: OperatorKind,
    t: Complex64,
    k: &[f64],
    n_max: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    ExpansionEngine::new(g, kind, n_max, config)?.heat_trace(t, k)
}

/// One-shot [`ExpansionEngine::heat_trace_integrated`].
pub fn heat_trace_integrated(
    g: &FundamentalGraph,
    kind: OperatorKind,
    t: Complex64,
    n_max: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    ExpansionEngine::new(g, kind, n_max, config)?.heat_trace_integrated(t)
}

/// One-shot [`ExpansionEngine::resolvent_trace`].
pub fn resolvent_trace(
    g: &FundamentalGraph,
    kind: OperatorKind,
    lambda: Complex64,
    k: &[f64],
    n_max: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    ExpansionEngine::new(g, kind, n_max, config)?.resolvent_trace(lambda, k)
}

/// One-shot [`ExpansionEngine::resolvent_trace_integrated`].
pub fn resolvent_trace_integrated(
    g: &FundamentalGraph,
    kind: OperatorKind,
    lambda: Complex64,
    n_max: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    ExpansionEngine::new(g, kind, n_max, config)?.resolvent_trace_integrated(lambda)
}

/// Equivalence class of a prime cycle under rotation: the canonical
/// (lexicographically least) rotation represents the class; a prime cycle of
/// length `n` has exactly `n` distinct rotations.
#[derive(Clone, Debug)]
pub struct CycleClass {
    representative: Cycle,
    multiplicity: usize,
}

impl CycleClass {
    pub fn representative(&self) -> &Cycle {
        &self.representative
    }

    pub fn length(&self) -> usize {
        self.representative.len()
    }

    pub fn index(&self) -> &IndexVector {
        self.representative.index()
    }

    pub fn weight(&self) -> f64 {
        self.representative.weight()
    }

    /// Number of distinct rotations (= length, since the cycle is prime).
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }
}

/// Smallest `p` dividing `n` with `w` invariant under rotation by `p`.
fn minimal_period(w: &[usize]) -> usize {
    let n = w.len();
    'periods: for p in 1..=n {
        if !n.is_multiple_of(p) {
            continue;
        }
        for i in 0..n {
            if w[i] != w[(i + p) % n] {
                continue 'periods;
            }
        }
        return p;
    }
    n
}

fn canonical_rotation(w: &[usize]) -> Vec<usize> {
    let n = w.len();
    let mut best: Option<Vec<usize>> = None;
    for s in 0..n {
        let rotated: Vec<usize> = (0..n).map(|i| w[(i + s) % n]).collect();
        if best.as_ref().is_none_or(|b| &rotated < b) {
            best = Some(rotated);
        }
    }
    best.expect("non-empty cycle")
}

fn classes_from_cycles(all: Vec<Vec<Cycle>>) -> Vec<CycleClass> {
    let mut seen: std::collections::BTreeMap<(usize, Vec<usize>), CycleClass> =
        std::collections::BTreeMap::new();
    for cycles in all {
        for c in cycles {
            if minimal_period(c.edge_ids()) != c.len() {
                continue; // proper multiple of a shorter cycle
            }
            let canon = canonical_rotation(c.edge_ids());
            let key = (c.len(), canon.clone());
            seen.entry(key).or_insert_with(|| {
                let multiplicity = c.len();
                CycleClass {
                    representative: c,
                    multiplicity,
                }
            });
        }
    }
    seen.into_values().collect()
}

/// Equivalence classes of prime cycles in the fundamental graph with length
/// `≤ length_cap`, optionally restricted to zero index and to cyclically
/// non-backtracking cycles. Every cycle of length `≤ length_cap` is the
/// m-multiple of exactly one returned class.
pub fn prime_classes(
    g: &FundamentalGraph,
    length_cap: usize,
    zero_index_only: bool,
    non_backtracking: bool,
    config: &EngineConfig,
) -> Result<Vec<CycleClass>> {
    if length_cap > config.oracle_cap {
        return Err(Error::OracleCapExceeded {
            n: length_cap,
            cap: config.oracle_cap,
        });
    }
    let mut per_length = Vec::new();
    for n in 1..=length_cap {
        let options = CycleOptions {
            index_filter: zero_index_only.then(|| IndexVector::zero(g.dimension())),
            non_backtracking,
        };
        per_length.push(cycles::enumerate_cycles(g, n, &options, config)?);
    }
    Ok(classes_from_cycles(per_length))
}

/// Prime classes of the modified graph (used by the Schrödinger and
/// Laplacian determinant products).
pub fn prime_classes_modified(
    mg: &ModifiedGraph,
    length_cap: usize,
    zero_index_only: bool,
    config: &EngineConfig,
) -> Result<Vec<CycleClass>> {
    if length_cap > config.oracle_cap {
        return Err(Error::OracleCapExceeded {
            n: length_cap,
            cap: config.oracle_cap,
        });
    }
    let d = mg.base().dimension();
    let mut per_length = Vec::new();
    for n in 1..=length_cap {
        let options = CycleOptions {
            index_filter: zero_index_only.then(|| IndexVector::zero(d)),
            non_backtracking: false,
        };
        per_length.push(cycles::enumerate_cycles_modified(mg, n, &options, config)?);
    }
    Ok(classes_from_cycles(per_length))
}

/// A prime class reduced to the data a cycle product needs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedClass {
    pub length: usize,
    pub index: IndexVector,
    pub weight: f64,
}

/// Prime classes of the graph flavor a kind lives on, carrying that kind's
/// cycle weights: 1 (adjacency), `1/(κ_{x_1}⋯κ_{x_n})` (normalized), or the
/// loop-weight products of the modified graph (Schrödinger, Laplacian).
pub fn weighted_prime_classes(
    g: &FundamentalGraph,
    kind: OperatorKind,
    length_cap: usize,
    zero_index_only: bool,
    config: &EngineConfig,
) -> Result<Vec<WeightedClass>> {
    let classes = match kind {
        OperatorKind::Adjacency | OperatorKind::Normalized => {
            prime_classes(g, length_cap, zero_index_only, false, config)?
        }
        OperatorKind::Schrodinger => {
            prime_classes_modified(&modify_graph(g), length_cap, zero_index_only, config)?
        }
        OperatorKind::NegLaplacian => prime_classes_modified(
            &modify_graph_zero_potential(g),
            length_cap,
            zero_index_only,
            config,
        )?,
    };
    Ok(classes
        .into_iter()
        .map(|c| {
            let weight = match kind {
                OperatorKind::Normalized => c.representative().normalized_weight(g),
                _ => c.weight(),
            };
            WeightedClass {
                length: c.length(),
                index: c.index().clone(),
                weight,
            }
        })
        .collect())
}

/// `Π (1 - e^{-i⟨τ(c_*),k⟩} ω(c_*) t^{|c_*|})` over classes of length
/// `≤ max_len`.
pub fn truncated_det_product(
    classes: &[WeightedClass],
    t: Complex64,
    k: &[f64],
    max_len: usize,
) -> Complex64 {
    let mut product = Complex64::new(1.0, 0.0);
    for c in classes.iter().filter(|c| c.length <= max_len) {
        let phase = Complex64::from_polar(1.0, -c.index.dot(k));
        product *= Complex64::new(1.0, 0.0) - phase * c.weight * t.powu(c.length as u32);
    }
    product
}

/// Spectral radius of the entrywise-absolute fiber matrix at `k = 0`; it
/// majorizes `‖M(k)‖` for all `k` and controls the unsigned cycle sums
/// `Σ_{|c|=n} |ω(c)| ≤ ν ρ^n`.
fn unsigned_norm(matrix: &RealMatrix) -> Result<f64> {
    let n = matrix.size();
    let b = DMatrix::<f64>::from_fn(n, n, |r, c| matrix.entry(r, c).sum_abs_f64());
    let eig = SymmetricEigen::try_new(b, f64::EPSILON, 4096).ok_or(Error::EigensolverFailure)?;
    Ok(eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs())))
}

/// Remainder of `Σ_{n>L} ν s^n / n`, the log-space majorant of every cycle
/// product here; infinite outside `s < 1`.
fn log_tail(nu: f64, s: f64, cap: usize) -> f64 {
    if s >= 1.0 {
        return f64::INFINITY;
    }
    nu * s.powi(cap as i32 + 1) / ((cap as f64 + 1.0) * (1.0 - s))
}

/// Converts a bound on `|log P_trunc - log P|` into a bound on
/// `|P_trunc - P|`.
fn value_tail(value: Complex64, log_bound: f64) -> f64 {
    if !log_bound.is_finite() {
        return f64::INFINITY;
    }
    value.norm() * log_bound.exp() * (log_bound.exp() - 1.0)
}

/// Radius inside which every cycle product here carries a finite certified
/// tail: the reciprocal of the unsigned-majorant norm `ρ(|M|(0))`. It is
/// never larger than any fiber radius `1/‖M(k)‖`.
pub fn certified_product_radius(g: &FundamentalGraph, kind: OperatorKind) -> Result<f64> {
    Ok(1.0 / unsigned_norm(&operator_matrix(g, kind)?)?)
}

/// Truncated prime-cycle product for `det(I - tM(k))`, cross-checkable
/// against the dense determinant. Requires `|t| < 1/‖M(k)‖`.
pub fn determinant_product(
    g: &FundamentalGraph,
    kind: OperatorKind,
    t: Complex64,
    k: &[f64],
    length_cap: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    let norm = fiber_norm(g, kind, k)?;
    if t.norm() * norm >= 1.0 {
        return Err(Error::DivergentSeries {
            given: t.norm(),
            radius: 1.0 / norm,
        });
    }
    let classes = weighted_prime_classes(g, kind, length_cap, false, config)?;
    let value = truncated_det_product(&classes, t, k, length_cap);
    let s = t.norm() * unsigned_norm(&operator_matrix(g, kind)?)?;
    let log_bound = log_tail(g.num_vertices() as f64, s, length_cap);
    Ok(SeriesApprox {
        value,
        truncation: length_cap,
        tail_bound: value_tail(value, log_bound),
    })
}

/// Log of the zero-index prime product `Π_{c_* : τ(c_*)=0} (1 - ω(c_*)
/// t^{|c_*|})`: the renormalized determinant per fundamental domain, equal
/// to the Brillouin-zone average of `Tr log(I - tM(k))`. Requires `|t|`
/// inside the global convergence radius.
pub fn gamma_log_determinant(
    g: &FundamentalGraph,
    kind: OperatorKind,
    t: Complex64,
    length_cap: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    let global = operator_norm_estimate(g, kind, config.norm_grid)?;
    if t.norm() * global >= 1.0 {
        return Err(Error::DivergentSeries {
            given: t.norm(),
            radius: 1.0 / global,
        });
    }
    let classes = weighted_prime_classes(g, kind, length_cap, true, config)?;
    let mut value = Complex64::new(0.0, 0.0);
    for c in &classes {
        value += (Complex64::new(1.0, 0.0) - c.weight * t.powu(c.length as u32)).ln();
    }
    let s = t.norm() * unsigned_norm(&operator_matrix(g, kind)?)?;
    Ok(SeriesApprox {
        value,
        truncation: length_cap,
        tail_bound: log_tail(g.num_vertices() as f64, s, length_cap),
    })
}

/// Truncated L-function `Π_{c_*} (1 - e^{-i⟨τ(c_*),k⟩} u^{|c_*|})^{-1}` over
/// all adjacency prime classes; its reciprocal is `det(I - uA(k))`.
pub fn l_function(
    g: &FundamentalGraph,
    u: Complex64,
    k: &[f64],
    length_cap: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    let norm = fiber_norm(g, OperatorKind::Adjacency, k)?;
    if u.norm() * norm >= 1.0 {
        return Err(Error::DivergentSeries {
            given: u.norm(),
            radius: 1.0 / norm,
        });
    }
    let classes = weighted_prime_classes(g, OperatorKind::Adjacency, length_cap, false, config)?;
    let value = truncated_det_product(&classes, u, k, length_cap).inv();
    let s = u.norm() * unsigned_norm(&operator_matrix(g, OperatorKind::Adjacency)?)?;
    let log_bound = log_tail(g.num_vertices() as f64, s, length_cap);
    Ok(SeriesApprox {
        value,
        truncation: length_cap,
        tail_bound: value_tail(value, log_bound),
    })
}

/// Truncated Ihara zeta `Π (1 - u^{|c_*|})^{-1}` over prime non-backtracking
/// zero-index classes. No convergence radius is asserted; the reported tail
/// is the log-space majorant built from the non-backtracking growth bound
/// `#cycles ≤ ν κ_+ (κ_+ - 1)^{n-1}`.
pub fn ihara_zeta(
    g: &FundamentalGraph,
    u: Complex64,
    length_cap: usize,
    config: &EngineConfig,
) -> Result<SeriesApprox> {
    let classes = prime_classes(g, length_cap, true, true, config)?;
    let mut value = Complex64::new(1.0, 0.0);
    for c in &classes {
        value *= Complex64::new(1.0, 0.0) - u.powu(c.length() as u32);
    }
    let value = value.inv();
    let branching = g.kappa_plus().saturating_sub(1) as f64;
    let log_bound = if branching == 0.0 {
        0.0
    } else {
        let s = branching * u.norm();
        log_tail(
            g.num_vertices() as f64 * g.kappa_plus() as f64 / branching,
            s,
            length_cap,
        )
    };
    Ok(SeriesApprox {
        value,
        truncation: length_cap,
        tail_bound: value_tail(value, log_bound),
    })
}

/// Degree-n coefficients of `u (log Z)'(u)` for `n = 1..=n_max`: the divisor
/// sums `Σ_{|c_*| | n} |c_*|` over the given classes. With classes complete
/// up to length `n_max` this equals the number of cyclically
/// non-backtracking zero-index cycles of each length.
pub fn ihara_log_derivative_coefficients(classes: &[CycleClass], n_max: usize) -> Vec<u64> {
    (1..=n_max)
        .map(|n| {
            classes
                .iter()
                .filter(|c| n % c.length() == 0)
                .map(|c| c.length() as u64)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{kagome_lattice, square_lattice, z_line};
    use crate::spectral::eigenvalues_at;
    use approx::assert_relative_eq;
    use rand::prelude::*;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn heat_trace_at_zero_time_is_nu() {
        for g in [square_lattice(), kagome_lattice(), z_line()] {
            let approx = heat_trace(
                &g,
                OperatorKind::Adjacency,
                Complex64::new(0.0, 0.0),
                &vec![0.0; g.dimension()],
                6,
                &cfg(),
            )
            .unwrap();
            assert_eq!(approx.value, Complex64::new(g.num_vertices() as f64, 0.0));
            assert_eq!(approx.tail_bound, 0.0);
        }
    }

    #[test]
    fn z_line_heat_trace_matches_scalar_exponential() {
        // Tr e^{tA(k)} = e^{2t cos k}
        let g = z_line();
        let cfg = cfg().with_power_cap(20);
        let engine = ExpansionEngine::new(&g, OperatorKind::Adjacency, 18, &cfg).unwrap();
        for (t, k) in [(0.5, 0.0), (0.3, 1.2), (-0.4, 2.0)] {
            let approx = engine.heat_trace(Complex64::new(t, 0.0), &[k]).unwrap();
            let exact = (2.0 * t * k.cos()).exp();
            assert!((approx.value.re - exact).abs() <= approx.tail_bound + 1e-12);
            assert!((approx.value.re - exact).abs() < 1e-9);
            assert!(approx.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn square_heat_trace_matches_eigen_oracle() {
        let g = square_lattice();
        let cfg = cfg().with_power_cap(20);
        let engine = ExpansionEngine::new(&g, OperatorKind::Adjacency, 20, &cfg).unwrap();
        let k = [1.0, 2.0];
        let t = Complex64::new(0.3, 0.0);
        let approx = engine.heat_trace(t, &k).unwrap();
        let oracle: f64 = eigenvalues_at(&g, OperatorKind::Adjacency, &k)
            .unwrap()
            .iter()
            .map(|l| (0.3 * l).exp())
            .sum();
        assert!((approx.value.re - oracle).abs() < 1e-8);
        assert!((approx.value.re - oracle).abs() <= approx.tail_bound + 1e-12);
    }

    #[test]
    fn resolvent_matches_scalar_form_on_z_line() {
        let g = z_line();
        let approx = resolvent_trace(
            &g,
            OperatorKind::Adjacency,
            Complex64::new(10.0, 0.0),
            &[0.0],
            12,
            &cfg(),
        )
        .unwrap();
        // 1/(2cos 0 - 10) = -0.125
        assert!((approx.value.re - (-0.125)).abs() <= approx.tail_bound);
        assert!((approx.value.re + 0.125).abs() < 1e-9);
    }

    #[test]
    fn resolvent_leading_term() {
        let g = kagome_lattice();
        let lambda = Complex64::new(1e6, 0.0);
        let approx = resolvent_trace(
            &g,
            OperatorKind::Adjacency,
            lambda,
            &[0.4, -0.9],
            6,
            &cfg(),
        )
        .unwrap();
        let scaled = approx.value * lambda;
        assert_relative_eq!(scaled.re, -3.0, epsilon = 1e-4);
    }

    #[test]
    fn resolvent_refuses_inside_spectrum() {
        let g = square_lattice();
        let err = resolvent_trace(
            &g,
            OperatorKind::Adjacency,
            Complex64::new(1.0, 0.0),
            &[0.0, 0.0],
            6,
            &cfg(),
        );
        assert!(matches!(err, Err(Error::DivergentSeries { .. })));
    }

    #[test]
    fn integrated_heat_matches_grid_quadrature() {
        let g = square_lattice();
        let cfg = cfg().with_power_cap(20);
        let engine = ExpansionEngine::new(&g, OperatorKind::Adjacency, 18, &cfg).unwrap();
        let t = 0.2;
        let approx = engine.heat_trace_integrated(Complex64::new(t, 0.0)).unwrap();
        // quadrature oracle over a 16² grid
        let m = 16;
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                let k = [
                    2.0 * std::f64::consts::PI * i as f64 / m as f64,
                    2.0 * std::f64::consts::PI * j as f64 / m as f64,
                ];
                sum += eigenvalues_at(&g, OperatorKind::Adjacency, &k)
                    .unwrap()
                    .iter()
                    .map(|l| (t * l).exp())
                    .sum::<f64>();
            }
        }
        let oracle = sum / (m * m) as f64;
        assert!((approx.value.re - oracle).abs() < 1e-8);
    }

    #[test]
    fn z_line_prime_classes_up_to_two() {
        let g = z_line();
        let classes = prime_classes(&g, 2, false, false, &cfg()).unwrap();
        // (e), (ē), and the class of (e, ē) with two rotations
        assert_eq!(classes.len(), 3);
        let lengths: Vec<usize> = classes.iter().map(|c| c.length()).collect();
        assert_eq!(lengths, vec![1, 1, 2]);
        let two = classes.iter().find(|c| c.length() == 2).unwrap();
        assert_eq!(two.multiplicity(), 2);
        assert!(two.index().is_zero());
    }

    #[test]
    fn square_zero_index_pair_classes() {
        let g = square_lattice();
        let classes = prime_classes(&g, 2, true, false, &cfg()).unwrap();
        // one class per unordered edge pair {e, ē}; multiplicities add to N₂⁰
        assert_eq!(classes.len(), 8);
        let total: usize = classes.iter().map(|c| c.multiplicity()).sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn multiples_are_not_prime() {
        // zero-index walks on the line balance e against ē; at length 4 the
        // only prime class is (e, e, ē, ē). The walk (e, ē, e, ē) is the
        // square of (e, ē) and must not appear.
        let g = z_line();
        let classes = prime_classes(&g, 4, true, false, &cfg()).unwrap();
        let lengths: Vec<usize> = classes.iter().map(|c| c.length()).collect();
        assert_eq!(lengths, vec![2, 4]);
        assert_eq!(classes[1].representative().edge_ids(), &[0, 0, 1, 1]);
        assert_eq!(classes[1].multiplicity(), 4);
        assert!(classes
            .iter()
            .all(|c| c.representative().edge_ids() != [0, 1, 0, 1]));
    }

    #[test]
    fn multiplicity_accounting_reconstructs_counts() {
        let config = cfg();
        for g in [square_lattice(), kagome_lattice(), z_line()] {
            let cap = 5;
            let classes = prime_classes(&g, cap, false, false, &config).unwrap();
            for n in 1..=cap {
                let total = cycles::enumerate_cycles(&g, n, &CycleOptions::default(), &config)
                    .unwrap()
                    .len() as u64;
                let reconstructed: u64 = classes
                    .iter()
                    .filter(|c| n % c.length() == 0)
                    .map(|c| c.length() as u64)
                    .sum();
                assert_eq!(total, reconstructed, "n = {n}");
            }
        }
    }

    #[test]
    fn determinant_product_scalar_case() {
        // det(I - tA(k)) = 1 - 2t cos k on the line
        let g = z_line();
        let t = Complex64::new(0.1, 0.0);
        let k = [1.0];
        let approx = determinant_product(&g, OperatorKind::Adjacency, t, &k, 6, &cfg()).unwrap();
        let exact = 1.0 - 2.0 * 0.1 * 1.0_f64.cos();
        assert!((approx.value.re - exact).abs() <= approx.tail_bound);

        let at_zero =
            determinant_product(&g, OperatorKind::Adjacency, Complex64::new(0.0, 0.0), &k, 6, &cfg())
                .unwrap();
        assert_eq!(at_zero.value, Complex64::new(1.0, 0.0));
        assert_eq!(at_zero.tail_bound, 0.0);
    }

    #[test]
    fn determinant_product_matches_dense_determinant() {
        let g = square_lattice();
        let mut rng = StdRng::seed_from_u64(4);
        let k = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let t = Complex64::new(0.05, 0.0);
        let m = crate::spectral::fiber_matrix_numeric(&g, OperatorKind::Schrodinger, &k).unwrap();
        let n = m.nrows();
        let direct = (DMatrix::<Complex64>::identity(n, n) - m * t).determinant();
        let mut previous = f64::INFINITY;
        for cap in [2, 4, 6, 8] {
            let approx =
                determinant_product(&g, OperatorKind::Schrodinger, t, &k, cap, &cfg()).unwrap();
            let err = (approx.value - direct).norm();
            assert!(err <= approx.tail_bound + 1e-14, "cap {cap}: {err} > {}", approx.tail_bound);
            assert!(err <= previous + 1e-14, "error not shrinking at cap {cap}");
            previous = err;
        }
    }

    #[test]
    fn determinant_product_agrees_on_sampled_parameters() {
        // 20 (t, k) samples inside the certified domain per graph
        let config = cfg();
        let mut rng = StdRng::seed_from_u64(17);
        for (g, kind) in [
            (z_line(), OperatorKind::Schrodinger),
            (square_lattice(), OperatorKind::Adjacency),
        ] {
            let radius = certified_product_radius(&g, kind).unwrap();
            for _ in 0..20 {
                let t = Complex64::new(rng.random_range(-0.45..0.45) * radius, 0.0);
                let k: Vec<f64> = (0..g.dimension())
                    .map(|_| rng.random_range(-3.2..3.2))
                    .collect();
                let approx = determinant_product(&g, kind, t, &k, 6, &config).unwrap();
                let m = crate::spectral::fiber_matrix_numeric(&g, kind, &k).unwrap();
                let n = m.nrows();
                let direct = (DMatrix::<Complex64>::identity(n, n) - m * t).determinant();
                let err = (approx.value - direct).norm();
                assert!(err <= approx.tail_bound + 1e-13, "err {err} > {}", approx.tail_bound);
            }
        }
    }

    #[test]
    fn l_function_scalar_case() {
        // det(I - uA(k)) = 1 - 2u cos k on the line
        let g = z_line();
        let u = Complex64::new(0.12, 0.0);
        let k = [0.8];
        let approx = l_function(&g, u, &k, 8, &cfg()).unwrap();
        let direct = 1.0 - 2.0 * 0.12 * 0.8_f64.cos();
        let product = approx.value * direct;
        assert!((product - Complex64::new(1.0, 0.0)).norm() <= approx.tail_bound + 1e-12);
    }

    #[test]
    fn gamma_log_determinant_matches_quadrature() {
        // Brillouin average of log(1 - 2t cos k) on the line
        let g = z_line();
        let t = Complex64::new(0.15, 0.0);
        let approx = gamma_log_determinant(&g, OperatorKind::Adjacency, t, 8, &cfg()).unwrap();
        let m = 64;
        let mut sum = 0.0;
        for i in 0..m {
            let k = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            sum += (1.0 - 2.0 * 0.15 * k.cos()).ln();
        }
        let oracle = sum / m as f64;
        assert!((approx.value.re - oracle).abs() < 1e-6);
        assert!(approx.value.im.abs() < 1e-12);

        let zero = gamma_log_determinant(
            &g,
            OperatorKind::Adjacency,
            Complex64::new(0.0, 0.0),
            8,
            &cfg(),
        )
        .unwrap();
        assert_eq!(zero.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn l_function_reciprocity() {
        let g = kagome_lattice();
        let k = [0.8, -0.3];
        let u = Complex64::new(0.05, 0.0);
        let approx = l_function(&g, u, &k, 8, &cfg()).unwrap();
        let m = crate::spectral::fiber_matrix_numeric(&g, OperatorKind::Adjacency, &k).unwrap();
        let n = m.nrows();
        let direct = (DMatrix::<Complex64>::identity(n, n) - m * u).determinant();
        let product = approx.value * direct;
        assert!((product - Complex64::new(1.0, 0.0)).norm() < 1e-6);

        let at_zero = l_function(&g, Complex64::new(0.0, 0.0), &k, 8, &cfg()).unwrap();
        assert_eq!(at_zero.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn ihara_zeta_trivial_on_the_line() {
        // no non-backtracking zero-index cycles exist on the line
        let g = z_line();
        for cap in [2, 4, 6, 8] {
            let approx = ihara_zeta(&g, Complex64::new(0.2, 0.0), cap, &cfg()).unwrap();
            assert_eq!(approx.value, Complex64::new(1.0, 0.0));
        }
        let classes = prime_classes(&g, 8, true, true, &cfg()).unwrap();
        assert!(classes.is_empty());
    }

    #[test]
    fn ihara_zeta_log_derivative_identity() {
        let config = cfg();
        for g in [square_lattice(), kagome_lattice()] {
            let cap = 6;
            let classes = prime_classes(&g, cap, true, true, &config).unwrap();
            let coefficients = ihara_log_derivative_coefficients(&classes, cap);
            for n in 1..=cap {
                let options = CycleOptions {
                    index_filter: Some(IndexVector::zero(g.dimension())),
                    non_backtracking: true,
                };
                let count = cycles::enumerate_cycles(&g, n, &options, &config)
                    .unwrap()
                    .len() as u64;
                assert_eq!(coefficients[n - 1], count, "n = {n}");
            }
        }
    }

    #[test]
    fn ihara_zeta_at_zero_is_one() {
        let g = kagome_lattice();
        let approx = ihara_zeta(&g, Complex64::new(0.0, 0.0), 6, &cfg()).unwrap();
        assert_eq!(approx.value, Complex64::new(1.0, 0.0));
    }
}
