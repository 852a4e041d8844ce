//! Fundamental graphs: finite multigraph quotients of periodic graphs.
//!
//! A periodic graph invariant under a rank-`d` lattice is stored through its
//! quotient, a finite multigraph whose oriented edges carry index vectors
//! `τ(e) ∈ Z^d` recording the lattice translate each edge crosses. The edge
//! set is closed under inversion with `τ(ē) = -τ(e)`; a vertex degree counts
//! all oriented edges starting at it, so a loop contributes 2.
//!
//! Connectivity is enforced for the quotient only (undirected, indices
//! forgotten). Whether the periodic graph upstairs is connected additionally
//! depends on the subgroup generated by cycle indices; no finite criterion is
//! enforced here.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexVector;

/// Tolerance for the fractional-coordinate snap in [`decompose_coordinates`].
const COORDINATE_TOL: f64 = 1e-9;

/// Basis `a_1, …, a_d` of a rank-`d` lattice in `R^d`, stored column-wise.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    dimension: usize,
    columns: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl LatticeBasis {
    /// Builds a basis from the column vectors `a_1, …, a_d`.
    pub fn new(vectors: &[Vec<f64>]) -> Result<Self> {
        let d = vectors.len();
        if !(1..=4).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        for v in vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
        }
        let columns = DMatrix::from_fn(d, d, |r, c| vectors[c][r]);
        // scale for the singularity test: product of column norms (Hadamard bound)
        let scale: f64 = (0..d).map(|c| columns.column(c).norm()).product();
        let lu = columns.clone().lu();
        if lu.determinant().abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularBasis);
        }
        Ok(LatticeBasis {
            dimension: d,
            columns,
            lu,
        })
    }

    /// The identity basis of `R^d`.
    pub fn identity(dimension: usize) -> Result<Self> {
        let cols: Vec<Vec<f64>> = (0..dimension)
            .map(|j| (0..dimension).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        LatticeBasis::new(&cols)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Coordinates of `x` with respect to the basis.
    fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        let rhs = DMatrix::from_column_slice(self.dimension, 1, x);
        let sol = self.lu.solve(&rhs).ok_or(Error::SingularBasis)?;
        Ok(sol.column(0).iter().copied().collect())
    }

    /// Reconstructs a point from basis coordinates.
    pub fn point(&self, coordinates: &[f64]) -> Vec<f64> {
        let c = DMatrix::from_column_slice(self.dimension, 1, coordinates);
        (&self.columns * c).column(0).iter().copied().collect()
    }
}

/// Splits `x = x_0 + [x]` into a point of the fundamental cell and a lattice
/// vector; returns the fractional basis coordinates of `x_0` (each in
/// `[0, 1)`) and the integer coordinates of `[x]`.
///
/// Fractional parts within `1e-9` of `1.0` snap to `0.0` with the lattice
/// part incremented, so points on cell boundaries decompose deterministically.
pub fn decompose_coordinates(x: &[f64], basis: &LatticeBasis) -> Result<(Vec<f64>, IndexVector)> {
    let coords = basis.coordinates(x)?;
    let mut fractional = Vec::with_capacity(coords.len());
    let mut lattice = Vec::with_capacity(coords.len());
    for &c in &coords {
        let mut n = c.floor();
        let mut f = c - n;
        if 1.0 - f <= COORDINATE_TOL {
            n += 1.0;
            f = 0.0;
        }
        fractional.push(f);
        lattice.push(n as i64);
    }
    Ok((fractional, IndexVector(lattice)))
}

/// Edge index `τ(e) = [y] - [x]` of an embedded edge from `x` to `y`.
///
/// Antisymmetric under swapping the endpoints.
pub fn index_from_embedding(x: &[f64], y: &[f64], basis: &LatticeBasis) -> Result<IndexVector> {
    let (_, lx) = decompose_coordinates(x, basis)?;
    let (_, ly) = decompose_coordinates(y, basis)?;
    let mut idx = ly;
    idx.sub_assign(&lx);
    Ok(idx)
}

/// A vertex of the fundamental graph.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSpec {
    pub id: String,
    /// Electric potential value `V_x`.
    pub potential: f64,
    /// Number of oriented edges starting here (a loop contributes 2).
    pub degree: usize,
}

/// An oriented edge of the fundamental graph. `from`/`to` are positions in
/// the vertex list; the inverse edge always exists with swapped endpoints and
/// negated index.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedEdge {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub index: IndexVector,
    pub inverse_id: usize,
}

/// Finite quotient of a periodic graph: vertices with potentials and an
/// oriented edge set closed under inversion.
#[derive(Clone, Debug)]
pub struct FundamentalGraph {
    dimension: usize,
    vertices: Vec<VertexSpec>,
    edges: Vec<OrientedEdge>,
    tau_plus: f64,
    tau_inf: i64,
    kappa_minus: usize,
    kappa_plus: usize,
}

/// Builds a fundamental graph from one orientation per edge; inverses are
/// generated automatically. Loops with zero index are rejected (they have no
/// counterpart in a loop-free periodic graph and would make the Laplacian
/// ambiguous); loops with non-zero index are fine and contribute 2 to the
/// degree of their vertex.
pub fn build_graph(
    dimension: usize,
    vertices: &[(&str, f64)],
    half_edges: &[(&str, &str, Vec<i64>)],
) -> Result<FundamentalGraph> {
    if !(1..=4).contains(&dimension) {
        return Err(Error::UnsupportedDimension(dimension));
    }
    if vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut specs: Vec<VertexSpec> = Vec::with_capacity(vertices.len());
    for &(id, potential) in vertices {
        if specs.iter().any(|v| v.id == id) {
            return Err(Error::DuplicateVertexId(id.to_string()));
        }
        if !potential.is_finite() {
            return Err(Error::NonFinitePotential(id.to_string()));
        }
        specs.push(VertexSpec {
            id: id.to_string(),
            potential,
            degree: 0,
        });
    }
    let lookup = |id: &str| specs.iter().position(|v| v.id == id);

    let mut edges: Vec<OrientedEdge> = Vec::with_capacity(2 * half_edges.len());
    for (from, to, index) in half_edges {
        if index.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: index.len(),
            });
        }
        let fi = lookup(from).ok_or_else(|| Error::DanglingEndpoint {
            from: from.to_string(),
            to: to.to_string(),
            missing: from.to_string(),
        })?;
        let ti = lookup(to).ok_or_else(|| Error::DanglingEndpoint {
            from: from.to_string(),
            to: to.to_string(),
            missing: to.to_string(),
        })?;
        let tau = IndexVector(index.clone());
        if fi == ti && tau.is_zero() {
            return Err(Error::ZeroIndexLoop(from.to_string()));
        }
        let id = edges.len();
        edges.push(OrientedEdge {
            id,
            from: fi,
            to: ti,
            index: tau.clone(),
            inverse_id: id + 1,
        });
        edges.push(OrientedEdge {
            id: id + 1,
            from: ti,
            to: fi,
            index: tau.negated(),
            inverse_id: id,
        });
    }

    for e in &edges {
        specs[e.from].degree += 1;
    }
    if specs.iter().any(|v| v.degree == 0) {
        // an isolated vertex can never belong to a connected quotient
        return Err(Error::DisconnectedQuotient);
    }

    // undirected connectivity of the quotient, indices forgotten
    let mut seen = vec![false; specs.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for e in &edges {
            if e.from == v && !seen[e.to] {
                seen[e.to] = true;
                stack.push(e.to);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::DisconnectedQuotient);
    }

    let tau_plus = edges.iter().map(|e| e.index.norm()).fold(0.0, f64::max);
    let tau_inf = edges.iter().map(|e| e.index.inf_norm()).max().unwrap_or(0);
    let kappa_minus = specs.iter().map(|v| v.degree).min().unwrap_or(0);
    let kappa_plus = specs.iter().map(|v| v.degree).max().unwrap_or(0);

    Ok(FundamentalGraph {
        dimension,
        vertices: specs,
        edges,
        tau_plus,
        tau_inf,
        kappa_minus,
        kappa_plus,
    })
}

impl FundamentalGraph {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of vertices ν.
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Number of oriented edges `#A_*`.
    pub fn oriented_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexSpec] {
        &self.vertices
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.vertices[vertex].degree
    }

    /// Maximum Euclidean norm `τ_+` of an edge index.
    pub fn tau_plus(&self) -> f64 {
        self.tau_plus
    }

    /// Maximum absolute index component, used for quadrature-grid sizing.
    pub fn tau_inf(&self) -> i64 {
        self.tau_inf
    }

    pub fn kappa_plus(&self) -> usize {
        self.kappa_plus
    }

    pub fn kappa_minus(&self) -> usize {
        self.kappa_minus
    }

    pub fn potentials(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.potential).collect()
    }

    /// The same graph with replaced vertex potentials (by vertex order).
    pub fn with_potentials(&self, potentials: &[f64]) -> Result<Self> {
        if potentials.len() != self.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vertices.len(),
                found: potentials.len(),
            });
        }
        let mut g = self.clone();
        for (v, &p) in g.vertices.iter_mut().zip(potentials) {
            if !p.is_finite() {
                return Err(Error::NonFinitePotential(v.id.clone()));
            }
            v.potential = p;
        }
        Ok(g)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|e| e.from == e.to)
    }

    /// Whether two oriented edges share the same ordered endpoint pair
    /// (multiple edges in the quotient, regardless of indices).
    pub fn fundamental_has_multiple_edges(&self) -> bool {
        for e in &self.edges {
            for f in &self.edges {
                if e.id < f.id && e.from == f.from && e.to == f.to {
                    return true;
                }
            }
        }
        false
    }

    /// Whether the periodic graph upstairs has multiple edges: two distinct
    /// unoriented quotient edges lifting to the same unoriented edge, i.e.
    /// sharing endpoints and index up to inversion.
    pub fn periodic_has_multiple_edges(&self) -> bool {
        let canon = |e: &OrientedEdge| -> (usize, usize, IndexVector) {
            let fwd = (e.from, e.to, e.index.clone());
            let bwd = (e.to, e.from, e.index.negated());
            if (fwd.0, fwd.1, &fwd.2) <= (bwd.0, bwd.1, &bwd.2) {
                fwd
            } else {
                bwd
            }
        };
        let mut keys: Vec<(usize, usize, IndexVector)> = Vec::new();
        for e in self.edges.iter().filter(|e| e.id % 2 == 0) {
            keys.push(canon(e));
        }
        keys.sort();
        keys.windows(2).any(|w| w[0] == w[1])
    }

    /// Serializes one orientation per edge; inverses are implicit.
    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            dimension: self.dimension,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexDocument {
                    id: v.id.clone(),
                    potential: v.potential,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| e.id % 2 == 0)
                .map(|e| EdgeDocument {
                    from: self.vertices[e.from].id.clone(),
                    to: self.vertices[e.to].id.clone(),
                    index: e.index.components().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        let vertices: Vec<(&str, f64)> = doc
            .vertices
            .iter()
            .map(|v| (v.id.as_str(), v.potential))
            .collect();
        let half_edges: Vec<(&str, &str, Vec<i64>)> = doc
            .edges
            .iter()
            .map(|e| (e.from.as_str(), e.to.as_str(), e.index.clone()))
            .collect();
        build_graph(doc.dimension, &vertices, &half_edges)
    }
}

/// JSON document for graph exchange. Edges list one orientation each.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphDocument {
    pub dimension: usize,
    pub vertices: Vec<VertexDocument>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexDocument {
    pub id: String,
    pub potential: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EdgeDocument {
    pub from: String,
    pub to: String,
    pub index: Vec<i64>,
}

/// The fundamental graph with one zero-index loop added at every vertex.
///
/// The loop at `x` carries weight `v_x = V_x - κ_x`; every other edge has
/// weight 1. Weighted adjacency on this graph realizes the Schrödinger fiber
/// operator, so its weighted cycle sums are the Fourier coefficients of
/// `Tr H^n(k)`.
#[derive(Clone, Debug)]
pub struct ModifiedGraph {
    base: FundamentalGraph,
    loop_weights: Vec<f64>,
}

/// Augments `g` with one zero-index loop per vertex, weighted `V_x - κ_x`.
pub fn modify_graph(g: &FundamentalGraph) -> ModifiedGraph {
    let loop_weights = g
        .vertices
        .iter()
        .map(|v| v.potential - v.degree as f64)
        .collect();
    ModifiedGraph {
        base: g.clone(),
        loop_weights,
    }
}

/// Same augmentation with the potential dropped (`v_x = -κ_x`), realizing
/// `-Δ = A - κ`.
pub fn modify_graph_zero_potential(g: &FundamentalGraph) -> ModifiedGraph {
    let loop_weights = g.vertices.iter().map(|v| -(v.degree as f64)).collect();
    ModifiedGraph {
        base: g.clone(),
        loop_weights,
    }
}

impl ModifiedGraph {
    pub fn base(&self) -> &FundamentalGraph {
        &self.base
    }

    /// Loop weight `v_x` at each vertex, by vertex order.
    pub fn loop_weights(&self) -> &[f64] {
        &self.loop_weights
    }

    /// Edge ids below this belong to the base graph; ids `base_edge_count()
    /// + x` are the added loops.
    pub fn base_edge_count(&self) -> usize {
        self.base.edges.len()
    }

    /// Total oriented edges including the ν added loops.
    pub fn oriented_edge_count(&self) -> usize {
        self.base.edges.len() + self.base.vertices.len()
    }

    /// `ω_+ = max(1, ‖v‖_∞)`, the largest absolute edge weight.
    pub fn omega_plus(&self) -> f64 {
        self.loop_weights
            .iter()
            .fold(1.0_f64, |acc, &w| acc.max(w.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{kagome_lattice, square_lattice, z_line, z_line_with_chords};
    use rand::prelude::*;

    #[test]
    fn square_lattice_shape() {
        let g = square_lattice();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.oriented_edge_count(), 16);
        assert!(g.vertices().iter().all(|v| v.degree == 4));
        assert_eq!(g.tau_plus(), 1.0);
        assert_eq!((g.kappa_minus(), g.kappa_plus()), (4, 4));
    }

    #[test]
    fn z_line_shape() {
        let g = z_line();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.oriented_edge_count(), 2);
        assert_eq!(g.kappa_plus(), 2);
        assert_eq!(g.tau_plus(), 1.0);
    }

    #[test]
    fn chorded_line_is_four_regular() {
        let g = z_line_with_chords(3).unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.kappa_plus(), 4);
        assert_eq!(g.tau_plus(), 3.0);
    }

    #[test]
    fn edge_closure_under_inversion() {
        for g in [square_lattice(), kagome_lattice(), z_line_with_chords(2).unwrap()] {
            for e in g.edges() {
                let inv = &g.edges()[e.inverse_id];
                assert_eq!(inv.inverse_id, e.id);
                assert_eq!(inv.from, e.to);
                assert_eq!(inv.to, e.from);
                assert_eq!(inv.index, e.index.negated());
            }
        }
    }

    #[test]
    fn handshake_identity() {
        for g in [square_lattice(), kagome_lattice(), z_line()] {
            let total: usize = g.vertices().iter().map(|v| v.degree).sum();
            assert_eq!(total, g.oriented_edge_count());
        }
    }

    #[test]
    fn rejects_duplicate_vertex() {
        let err = build_graph(1, &[("a", 0.0), ("a", 0.0)], &[("a", "a", vec![1])]);
        assert!(matches!(err, Err(Error::DuplicateVertexId(_))));
    }

    #[test]
    fn rejects_non_finite_potential() {
        let err = build_graph(1, &[("a", f64::NAN)], &[("a", "a", vec![1])]);
        assert!(matches!(err, Err(Error::NonFinitePotential(_))));
        let err = z_line().with_potentials(&[f64::INFINITY]);
        assert!(matches!(err, Err(Error::NonFinitePotential(_))));
    }

    #[test]
    fn rejects_dangling_endpoint() {
        let err = build_graph(1, &[("a", 0.0)], &[("a", "b", vec![1])]);
        assert!(matches!(err, Err(Error::DanglingEndpoint { .. })));
    }

    #[test]
    fn rejects_zero_index_loop() {
        let err = build_graph(2, &[("a", 0.0)], &[("a", "a", vec![0, 0])]);
        assert!(matches!(err, Err(Error::ZeroIndexLoop(_))));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let err = build_graph(2, &[("a", 0.0)], &[("a", "a", vec![1])]);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_disconnected_quotient() {
        let err = build_graph(
            1,
            &[("a", 0.0), ("b", 0.0)],
            &[("a", "a", vec![1]), ("b", "b", vec![1])],
        );
        assert!(matches!(err, Err(Error::DisconnectedQuotient)));
    }

    #[test]
    fn decompose_identity_basis() {
        let basis = LatticeBasis::identity(2).unwrap();
        let (frac, lat) = decompose_coordinates(&[1.2, 0.3], &basis).unwrap();
        assert!((frac[0] - 0.2).abs() < 1e-12 && (frac[1] - 0.3).abs() < 1e-12);
        assert_eq!(lat, IndexVector(vec![1, 0]));

        let (frac, lat) = decompose_coordinates(&[0.0, 0.0], &basis).unwrap();
        assert_eq!(frac, vec![0.0, 0.0]);
        assert!(lat.is_zero());
    }

    #[test]
    fn decompose_scaled_basis() {
        let basis = LatticeBasis::new(&[vec![0.5]]).unwrap();
        let (frac, lat) = decompose_coordinates(&[-0.25], &basis).unwrap();
        assert!((frac[0] - 0.5).abs() < 1e-12);
        assert_eq!(lat, IndexVector(vec![-1]));
    }

    #[test]
    fn decompose_reconstructs_random_points() {
        let basis = LatticeBasis::new(&[vec![1.0, 0.2], vec![-0.3, 0.8]]).unwrap();
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let x = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
            let (frac, lat) = decompose_coordinates(&x, &basis).unwrap();
            assert!(frac.iter().all(|&f| (0.0..1.0).contains(&f)));
            let coords: Vec<f64> = frac
                .iter()
                .zip(lat.components())
                .map(|(&f, &n)| f + n as f64)
                .collect();
            let back = basis.point(&coords);
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).abs() < 1e-9, "reconstruction off: {a} vs {b}");
            }
        }
    }

    #[test]
    fn embedding_index_matches_formula() {
        let basis = LatticeBasis::identity(2).unwrap();
        let idx = index_from_embedding(&[0.2, 0.3], &[1.2, 0.3], &basis).unwrap();
        assert_eq!(idx, IndexVector(vec![1, 0]));
        let idx = index_from_embedding(&[0.7, -0.1], &[0.7, -0.1], &basis).unwrap();
        assert!(idx.is_zero());

        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let x = [rng.random_range(-9.0..9.0), rng.random_range(-9.0..9.0)];
            let y = [rng.random_range(-9.0..9.0), rng.random_range(-9.0..9.0)];
            let fwd = index_from_embedding(&x, &y, &basis).unwrap();
            let bwd = index_from_embedding(&y, &x, &basis).unwrap();
            assert_eq!(fwd.negated(), bwd);
        }
    }

    #[test]
    fn modification_weights() {
        let square = square_lattice();
        let m = modify_graph(&square);
        assert!(m.loop_weights().iter().all(|&w| w == -4.0));
        assert_eq!(m.oriented_edge_count(), 16 + 4);

        let kagome = kagome_lattice().with_potentials(&[1.0, 2.0, 3.0]).unwrap();
        let m = modify_graph(&kagome);
        assert_eq!(m.loop_weights(), &[1.0 - 4.0, 2.0 - 4.0, 3.0 - 4.0]);

        let m = modify_graph(&z_line());
        assert_eq!(m.loop_weights(), &[-2.0]);
        assert_eq!(m.omega_plus(), 2.0);
    }

    #[test]
    fn multiple_edge_detection() {
        // square fundamental graph has doubled ordered pairs but its periodic
        // graph is simple
        let g = square_lattice();
        assert!(g.fundamental_has_multiple_edges());
        assert!(!g.periodic_has_multiple_edges());

        // period-1 chord duplicates the nearest-neighbour edge upstairs
        let g1 = z_line_with_chords(1).unwrap();
        assert!(g1.periodic_has_multiple_edges());
        let g2 = z_line_with_chords(2).unwrap();
        assert!(!g2.periodic_has_multiple_edges());
    }

    #[test]
    fn document_round_trip() {
        let g = kagome_lattice().with_potentials(&[0.5, -1.0, 2.0]).unwrap();
        let doc = g.to_document();
        assert_eq!(doc.edges.len(), 6);
        let back = FundamentalGraph::from_document(&doc).unwrap();
        assert_eq!(back.to_document(), doc);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: GraphDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, doc);
    }
}
