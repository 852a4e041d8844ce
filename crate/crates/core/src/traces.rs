//! Trace series: `Tr M^n(k)` as finite Fourier series, regularized traces,
//! exact cycle counts and low-order closed-form cross-checks.
//!
//! For every operator kind the trace of the n-th fiber power is
//! `Σ_m c_m e^{-i⟨m,k⟩}` with real, `m ↦ -m` symmetric coefficients
//! supported in `‖m‖ ≤ n τ_+`. The coefficient at `m` is the weighted count
//! of length-n cycles with index `m` in the appropriate graph flavor:
//! unit weights (adjacency), `1/(κ_{x_1}⋯κ_{x_n})` (normalized), or the
//! loop-weight products of the modified graph (Schrödinger, Laplacian).
//! The `m = 0` coefficient equals the Brillouin-zone average of the trace:
//! the regularized trace, i.e. the von Neumann trace per fundamental domain.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::cycles::{enumerate_cycles, enumerate_cycles_modified, Cycle, CycleOptions};
use crate::error::{Error, Result};
use crate::fourier::{self, Coefficient, RealPolynomial};
use crate::graph::{modify_graph, FundamentalGraph};
use crate::index::IndexVector;
use crate::operator::{EngineConfig, OperatorKind};

/// The finite Fourier series of `Tr M^n(k)` for one kind and power.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    kind: OperatorKind,
    n: usize,
    dimension: usize,
    coefficients: BTreeMap<IndexVector, f64>,
}

impl TraceSeries {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coefficients(&self) -> &BTreeMap<IndexVector, f64> {
        &self.coefficients
    }

    pub fn coefficient(&self, m: &IndexVector) -> f64 {
        self.coefficients.get(m).copied().unwrap_or(0.0)
    }

    /// The `m = 0` coefficient (the regularized trace).
    pub fn constant_term(&self) -> f64 {
        self.coefficient(&IndexVector::zero(self.dimension))
    }

    /// Trace value at a quasimomentum; the imaginary part (vanishing up to
    /// rounding by coefficient symmetry) is discarded.
    pub fn evaluate(&self, k: &[f64]) -> f64 {
        self.to_polynomial().evaluate(k).re
    }

    pub fn to_polynomial(&self) -> RealPolynomial {
        RealPolynomial::from_terms(
            self.dimension,
            self.coefficients.iter().map(|(m, &c)| (m.clone(), c)),
        )
    }

    /// Largest absolute key component over the support.
    pub fn max_abs_component(&self) -> i64 {
        self.coefficients
            .keys()
            .map(|m| m.inf_norm())
            .max()
            .unwrap_or(0)
    }

    /// Coefficientwise difference as a plain map (used by the closed-form
    /// difference identities).
    pub fn difference(&self, other: &TraceSeries) -> BTreeMap<IndexVector, f64> {
        let mut out = self.coefficients.clone();
        for (m, c) in &other.coefficients {
            *out.entry(m.clone()).or_insert(0.0) -= c;
        }
        out.retain(|_, c| *c != 0.0);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coefficients
            .iter()
            .map(|(m, c)| serde_json::json!({ "m": m.components(), "c": c }))
            .collect();
        serde_json::json!({
            "kind": self.kind.as_str(),
            "n": self.n,
            "dimension": self.dimension,
            "coefficients": coeffs,
        })
    }
}

fn series_from_poly<C: Coefficient>(
    kind: OperatorKind,
    n: usize,
    poly: &fourier::FourierPolynomial<C>,
) -> TraceSeries {
    TraceSeries {
        kind,
        n,

        dimension: poly.dimension(),
        coefficients: poly
            .terms()
            .map(|(m, c)| (m.clone(), c.to_f64()))
            .collect(),
    }
}

/// `Tr M^n(k)` for `n = 1..=n_max` through the group-ring route.
pub fn trace_series_up_to(
    g: &FundamentalGraph,
    kind: OperatorKind,
    n_max: usize,
    config: &EngineConfig,
) -> Result<Vec<TraceSeries>> {
    // the adjacency kind keeps exact integer coefficients until this point
    let polys: Vec<RealPolynomial> = match kind {
        OperatorKind::Adjacency => fourier::adjacency_count_matrix(g)
            .power_traces(n_max, config.power_cap)?
            .iter()
            .map(|p| p.to_real())
            .collect(),
        _ => fourier::operator_matrix(g, kind)?.power_traces(n_max, config.power_cap)?,
    };
    Ok(polys
        .iter()
        .enumerate()
        .map(|(i, p)| series_from_poly(kind, i + 1, p))
        .collect())
}

/// `Tr M^n(k)` as a Fourier series.
pub fn trace_series(
    g: &FundamentalGraph,
    kind: OperatorKind,
    n: usize,
    config: &EngineConfig,
) -> Result<TraceSeries> {
    Ok(trace_series_up_to(g, kind, n, config)?.pop().expect("n >= 1"))
}

/// The Brillouin-zone average of `Tr M^n(k)`: the `m = 0` Fourier
/// coefficient.
pub fn regularized_trace(
    g: &FundamentalGraph,
    kind: OperatorKind,
    n: usize,
    config: &EngineConfig,
) -> Result<f64> {
    Ok(trace_series(g, kind, n, config)?.constant_term())
}

/// Exact cycle counts `N_n^m` through the adjacency trace (integer
/// coefficients, arbitrary precision).
pub fn adjacency_trace_exact(
    g: &FundamentalGraph,
    n: usize,
    config: &EngineConfig,
) -> Result<BTreeMap<IndexVector, BigInt>> {
    let poly = fourier::adjacency_count_matrix(g).power_trace(n, config.power_cap)?;
    Ok(poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect())
}

/// Cycle counts of the fundamental graph: `N_n^m` by index and the total
/// `N_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleCounts {
    pub by_index: BTreeMap<IndexVector, BigInt>,
    pub total: BigInt,
}

impl CycleCounts {
    pub fn count(&self, m: &IndexVector) -> BigInt {
        self.by_index.get(m).cloned().unwrap_or_else(|| BigInt::from(0))
    }

    pub fn zero_index(&self, dimension: usize) -> BigInt {
        self.count(&IndexVector::zero(dimension))
    }
}

/// `N_n^m` and `N_n`, computed exactly through the adjacency trace. The
/// enumeration oracle recomputes the same numbers independently for small
/// `n`; the test suites assert their agreement.
pub fn cycle_counts(
    g: &FundamentalGraph,
    n: usize,
    config: &EngineConfig,
) -> Result<CycleCounts> {
    let by_index = adjacency_trace_exact(g, n, config)?;
    let total = by_index.values().sum();
    Ok(CycleCounts { by_index, total })
}

/// One comparison performed by [`closed_form_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormCheck {
    pub name: String,
    pub discrepancy: f64,
}

/// Result of cross-checking the low-order trace identities.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub n: usize,
    pub max_abs_discrepancy: f64,
    pub checks: Vec<ClosedFormCheck>,
}

type CoeffMap = BTreeMap<IndexVector, f64>;

fn map_from_cycles<'a, I, F>(cycles: I, weight: F) -> CoeffMap
where
    I: IntoIterator<Item = &'a Cycle>,
    F: Fn(&Cycle) -> f64,
{
    let mut out = CoeffMap::new();
    for c in cycles {
        *out.entry(c.index().clone()).or_insert(0.0) += weight(c);
    }
    out.retain(|_, v| *v != 0.0);
    out
}

fn add_constant(map: &mut CoeffMap, dimension: usize, value: f64) {
    if value != 0.0 {
        *map.entry(IndexVector::zero(dimension)).or_insert(0.0) += value;
    }
}

fn max_discrepancy(a: &CoeffMap, b: &CoeffMap) -> f64 {
    let mut keys: Vec<&IndexVector> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|m| (a.get(m).copied().unwrap_or(0.0) - b.get(m).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

fn series_map(s: &TraceSeries) -> CoeffMap {
    s.coefficients().clone()
}

/// Rebuilds `Tr H^n(k)` for `n ≤ 3` directly from the cycle sets `C_1, C_2,
/// C_3` of the unmodified graph and compares against the group-ring series,
/// coefficient by coefficient. Also covers the adjacency- and
/// Laplacian-difference identities via series subtraction, and the
/// regularized-trace closed forms. Discrepancies must vanish to rounding.
pub fn closed_form_check(
    g: &FundamentalGraph,
    n: usize,
    config: &EngineConfig,
) -> Result<ClosedFormReport> {
    if n == 0 || n > 3 {
        return Err(Error::OracleCapExceeded {
            n,
            cap: 3.min(config.oracle_cap),
        });
    }
    let d = g.dimension();
    let opts = CycleOptions::default();

    // cycle sets of the unmodified graph
    let c1 = enumerate_cycles(g, 1, &opts, config)?;
    let c2 = enumerate_cycles(g, 2, &opts, config)?;
    let c3 = if n >= 3 {
        enumerate_cycles(g, 3, &opts, config)?
    } else {
        Vec::new()
    };

    let v: Vec<f64> = g
        .vertices()
        .iter()
        .map(|x| x.potential - x.degree as f64)
        .collect();
    let potentials: Vec<f64> = g.potentials();
    let degrees: Vec<f64> = g.vertices().iter().map(|x| x.degree as f64).collect();
    let sum_v: f64 = v.iter().sum();
    let sum_v2: f64 = v.iter().map(|x| x * x).sum();
    let sum_v3: f64 = v.iter().map(|x| x * x * x).sum();
    let raw_sum = |p: u32| -> f64 { potentials.iter().map(|x| x.powi(p as i32)).sum() };

    let potential_of = |c: &Cycle| -> f64 { c.start_vertices().iter().map(|&x| potentials[x]).sum() };
    let degree_of = |c: &Cycle| -> f64 { c.start_vertices().iter().map(|&x| degrees[x]).sum() };

    let schrodinger = trace_series(g, OperatorKind::Schrodinger, n, config)?;
    let adjacency = trace_series(g, OperatorKind::Adjacency, n, config)?;
    let laplacian = trace_series(g, OperatorKind::NegLaplacian, n, config)?;

    let mut checks: Vec<ClosedFormCheck> = Vec::new();
    fn push_check(checks: &mut Vec<ClosedFormCheck>, name: &str, expected: &CoeffMap, actual: &CoeffMap) {
        checks.push(ClosedFormCheck {
            name: name.to_string(),
            discrepancy: max_discrepancy(expected, actual),
        });
    }

    match n {
        1 => {
            // Tr H = Σ v_x + Σ_{C_1} e^{-i⟨τ(c),k⟩}
            let mut expected = map_from_cycles(&c1, |_| 1.0);
            add_constant(&mut expected, d, sum_v);
            push_check(&mut checks, "schrodinger_trace_from_cycles", &expected, &series_map(&schrodinger));

            // Tr(H - A) = Σ v_x
            let mut diff_expected = CoeffMap::new();
            add_constant(&mut diff_expected, d, sum_v);
            push_check(&mut checks, "difference_with_adjacency", &diff_expected, &schrodinger.difference(&adjacency));

            // Tr(H - H₀) = Σ V_x
            let mut pot_expected = CoeffMap::new();
            add_constant(&mut pot_expected, d, raw_sum(1));
            push_check(&mut checks, "difference_with_laplacian", &pot_expected, &schrodinger.difference(&laplacian));
        }
        2 => {
            // Tr H² = Σ v_x² + 2 Σ_{C_1} v(c) e^{-i⟨τ⟩} + Σ_{C_2} e^{-i⟨τ⟩}
            let mut expected = map_from_cycles(&c2, |_| 1.0);
            for (m, w) in map_from_cycles(&c1, |c| 2.0 * c.potential_sum()) {
                *expected.entry(m).or_insert(0.0) += w;
            }
            add_constant(&mut expected, d, sum_v2);
            expected.retain(|_, w| *w != 0.0);
            push_check(&mut checks, "schrodinger_trace_from_cycles", &expected, &series_map(&schrodinger));

            // regularized trace: Σ v_x² + N₂⁰
            let n2_zero = cycle_counts(g, 2, config)?
                .zero_index(d)
                .to_f64();
            let expected_reg = sum_v2 + n2_zero;
            checks.push(ClosedFormCheck {
                name: "regularized_trace".into(),
                discrepancy: (schrodinger.constant_term() - expected_reg).abs(),
            });

            // with neither loops nor repeated ordered pairs the whole series
            // collapses to the constant #A_* + Σ v_x²
            if !g.has_loops() && !g.fundamental_has_multiple_edges() {
                let mut const_expected = CoeffMap::new();
                add_constant(
                    &mut const_expected,
                    d,
                    g.oriented_edge_count() as f64 + sum_v2,
                );
                push_check(&mut checks, "loop_free_constant_trace", &const_expected, &series_map(&schrodinger));
            }

            // Tr(H² - A²) = Σ v_x² + 2 Σ_{C_1} v(c) e^{-i⟨τ⟩}
            let mut diff_expected = map_from_cycles(&c1, |c| 2.0 * c.potential_sum());
            add_constant(&mut diff_expected, d, sum_v2);
            push_check(&mut checks, "difference_with_adjacency", &diff_expected, &schrodinger.difference(&adjacency));

            // Tr(H² - H₀²) = Σ (V_x² - 2 V_x κ_x) + 2 Σ_{C_1} V(c) e^{-i⟨τ⟩}
            let mut pot_expected = map_from_cycles(&c1, |c| 2.0 * potential_of(c));
            let const_part: f64 = potentials
                .iter()
                .zip(&degrees)
                .map(|(&p, &k)| p * p - 2.0 * p * k)
                .sum();
            add_constant(&mut pot_expected, d, const_part);
            push_check(&mut checks, "difference_with_laplacian", &pot_expected, &schrodinger.difference(&laplacian));
        }
        3 => {
            // Tr H³ = Σ_{C_3} e^{-i⟨τ⟩} + Σ v_x³ + 3 Σ_{C_1} v(c)² e^{-i⟨τ⟩}
            //         + 3/2 Σ_{C_2} v(c) e^{-i⟨τ⟩}
            let mut expected = map_from_cycles(&c3, |_| 1.0);
            for (m, w) in map_from_cycles(&c1, |c| 3.0 * c.potential_sum().powi(2)) {
                *expected.entry(m).or_insert(0.0) += w;
            }
            for (m, w) in map_from_cycles(&c2, |c| 1.5 * c.potential_sum()) {
                *expected.entry(m).or_insert(0.0) += w;
            }
            add_constant(&mut expected, d, sum_v3);
            expected.retain(|_, w| *w != 0.0);
            push_check(&mut checks, "schrodinger_trace_from_cycles", &expected, &series_map(&schrodinger));

            // regularized trace: N₃⁰ + Σ v_x³ + 3/2 Σ_{C_2⁰} v(c)
            let n3_zero = cycle_counts(g, 3, config)?.zero_index(d).to_f64();
            let c2_zero_v: f64 = c2
                .iter()
                .filter(|c| c.index().is_zero())
                .map(|c| c.potential_sum())
                .sum();
            let expected_reg = n3_zero + sum_v3 + 1.5 * c2_zero_v;
            checks.push(ClosedFormCheck {
                name: "regularized_trace".into(),
                discrepancy: (schrodinger.constant_term() - expected_reg).abs(),
            });

            // simple periodic graph: 3/2 Σ_{C_2⁰} v(c) = 3 Σ v_x κ_x
            if !g.periodic_has_multiple_edges() {
                let simple_reg = n3_zero
                    + v.iter()
                        .zip(&degrees)
                        .map(|(&vx, &kx)| vx * vx * vx + 3.0 * vx * kx)
                        .sum::<f64>();
                checks.push(ClosedFormCheck {
                    name: "regularized_trace_simple_graph".into(),
                    discrepancy: (schrodinger.constant_term() - simple_reg).abs(),
                });
            }

            // Tr(H³ - A³) from the modified-graph cycles that use at least
            // one added loop
            let mg = modify_graph(g);
            let base_edges = mg.base_edge_count();
            let extra = enumerate_cycles_modified(&mg, 3, &opts, config)?;
            let diff_expected = map_from_cycles(
                extra
                    .iter()
                    .filter(|c| c.edge_ids().iter().any(|&e| e >= base_edges)),
                |c| c.weight(),
            );
            push_check(&mut checks, "difference_with_adjacency", &diff_expected, &schrodinger.difference(&adjacency));

            // Tr(H³ - H₀³) = Σ (V³ - 3V²κ + 3Vκ²) + 3 Σ_{C_1} (V(c)² - 2V(c)κ(c)) e^{-i⟨τ⟩}
            //               + 3/2 Σ_{C_2} V(c) e^{-i⟨τ⟩}
            let mut pot_expected =
                map_from_cycles(&c1, |c| {
                    let pv = potential_of(c);
                    let kv = degree_of(c);
                    3.0 * (pv * pv - 2.0 * pv * kv)
                });
            for (m, w) in map_from_cycles(&c2, |c| 1.5 * potential_of(c)) {
                *pot_expected.entry(m).or_insert(0.0) += w;
            }
            let const_part: f64 = potentials
                .iter()
                .zip(&degrees)
                .map(|(&p, &k)| p.powi(3) - 3.0 * p * p * k + 3.0 * p * k * k)
                .sum();
            add_constant(&mut pot_expected, d, const_part);
            pot_expected.retain(|_, w| *w != 0.0);
            push_check(&mut checks, "difference_with_laplacian", &pot_expected, &schrodinger.difference(&laplacian));
        }
        _ => unreachable!(),
    }

    let max_abs_discrepancy = checks
        .iter()
        .map(|c| c.discrepancy)
        .fold(0.0, f64::max);
    Ok(ClosedFormReport {
        n,
        max_abs_discrepancy,
        checks,
    })
}
