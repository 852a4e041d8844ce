//! Spectral analysis of Schrödinger-type operators on periodic discrete graphs.
//!
//! A periodic graph is described by its finite quotient: a multigraph on the
//! torus whose oriented edges carry integer *index vectors* recording which
//! lattice translate they cross. Every operator studied here (adjacency,
//! combinatorial and normalized Laplacian, Schrödinger) decomposes into a
//! family of ν×ν Hermitian *fiber matrices* `M(k)` parameterized by the
//! quasimomentum `k ∈ T^d`, and the trace of `M^n(k)` is a finite Fourier
//! series whose coefficients are weighted counts of closed walks in the
//! quotient graph, grouped by their total index.
//!
//! The crate keeps two independent routes to every quantity:
//!
//! * an algebraic route through the group ring of `Z^d` ([`fourier`]), where
//!   matrix entries are finitely supported Fourier polynomials and traces of
//!   matrix powers come out coefficient-exact;
//! * a combinatorial/numeric route through explicit cycle enumeration
//!   ([`cycles`]) and dense Hermitian eigendecomposition ([`spectral`]).
//!
//! On top of these sit band structures with flat-band detection, heat-kernel
//! and resolvent trace expansions with certified truncation bounds, prime
//! cycle classes, determinant products, the Γ-determinant, L-functions and
//! Ihara zeta truncations ([`expansions`]).

pub mod bipartite;
pub mod builtins;
pub mod cycles;
pub mod error;
pub mod expansions;
pub mod fourier;
pub mod graph;
pub mod index;
pub mod operator;
pub mod spectral;
pub mod traces;

pub use bipartite::{bipartite_fundamental, bipartite_periodic, bipartite_report, BipartiteReport, ParityWitness};
pub use builtins::{builtin_graph, kagome_lattice, square_lattice, z_line, z_line_with_chords};
pub use cycles::{count_by_index, enumerate_cycles, enumerate_cycles_modified, Cycle, CycleOptions};
pub use error::{Error, Result};
pub use expansions::{
    certified_product_radius, determinant_product, gamma_log_determinant, heat_trace,
    heat_trace_integrated,
    ihara_log_derivative_coefficients, ihara_zeta, l_function, prime_classes,
    prime_classes_modified, resolvent_trace, resolvent_trace_integrated, truncated_det_product,
    weighted_prime_classes, CycleClass, ExpansionEngine, SeriesApprox, WeightedClass,
};
pub use fourier::{
    adjacency_count_matrix, matrix_from_fundamental, matrix_from_modified, operator_matrix,
    Coefficient, FourierMatrix, FourierPolynomial, IntMatrix, IntPolynomial, RealMatrix,
    RealPolynomial,
};
pub use graph::{
    build_graph, decompose_coordinates, index_from_embedding, modify_graph,
    modify_graph_zero_potential, FundamentalGraph, GraphDocument, LatticeBasis, ModifiedGraph,
    OrientedEdge, VertexSpec,
};
pub use index::IndexVector;
pub use operator::{EngineConfig, OperatorKind};
pub use spectral::{
    band_structure, bandwidth_bound_check, brillouin_quadrature, eigenvalues_at,
    fiber_matrix_numeric, fiber_norm, operator_norm_estimate, Band, BandSample, BandStructure,
    BandwidthReport,
};
pub use traces::{
    adjacency_trace_exact, closed_form_check, cycle_counts, regularized_trace, trace_series,
    trace_series_up_to, ClosedFormCheck, ClosedFormReport, CycleCounts, TraceSeries,
};

// scalar types appearing in public signatures
pub use num_bigint::BigInt;
pub use num_complex::Complex64;
