//! Exhaustive cycle enumeration: the combinatorial oracle.
//!
//! A cycle is a sequence of consecutive oriented edges whose last terminal
//! vertex equals the first initial vertex. The starting edge is part of the
//! identity: rotations of the same closed walk count as distinct cycles,
//! which is the convention under which `Tr A^n(0)` equals the number of
//! length-n cycles. Back-tracking cycles are included unless filtered out.
//!
//! Enumeration visits `Θ(ν κ_+^n)` walks, so it is capped; it exists to
//! cross-check the group-ring route, not to replace it.

use crate::error::{Error, Result};
use crate::graph::{FundamentalGraph, ModifiedGraph};
use crate::index::IndexVector;
use crate::operator::EngineConfig;

/// A closed edge walk with its derived data.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    edge_ids: Vec<usize>,
    start_vertices: Vec<usize>,
    index: IndexVector,
    weight: f64,
    potential_sum: f64,
}

impl Cycle {
    /// Length `|c|` (number of edges).
    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    /// Initial vertex of each edge along the walk.
    pub fn start_vertices(&self) -> &[usize] {
        &self.start_vertices
    }

    /// Cycle index `τ(c)`, the sum of the edge indices.
    pub fn index(&self) -> &IndexVector {
        &self.index
    }

    /// Product of edge weights `ω(c)` (1 on an unmodified graph).
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `v(c) = Σ v_{x_j}` over the visited vertices, with `v_x = V_x - κ_x`.
    pub fn potential_sum(&self) -> f64 {
        self.potential_sum
    }

    /// `1 / (κ_{x_1} ⋯ κ_{x_n})`, the cycle weight of the normalized kind.
    pub fn normalized_weight(&self, g: &FundamentalGraph) -> f64 {
        self.start_vertices
            .iter()
            .map(|&x| 1.0 / g.degree(x) as f64)
            .product()
    }
}

/// Filters applied during enumeration.
#[derive(Clone, Debug, Default)]
pub struct CycleOptions {
    /// Keep only cycles with this exact index.
    pub index_filter: Option<IndexVector>,
    /// Keep only cycles without back-tracking, cyclically: `e_{s+1} ≠ ē_s`
    /// including the wrap-around pair.
    pub non_backtracking: bool,
}

impl CycleOptions {
    pub fn with_index(index: IndexVector) -> Self {
        CycleOptions {
            index_filter: Some(index),
            non_backtracking: false,
        }
    }
}

struct WalkEdge {
    from: usize,
    to: usize,
    index: IndexVector,
    weight: f64,
    inverse: usize,
}

/// Flattened adjacency view shared by both graph flavors.
pub(crate) struct WalkGraph {
    dimension: usize,
    edges: Vec<WalkEdge>,
    out: Vec<Vec<usize>>,
    vertex_v: Vec<f64>,
}

impl WalkGraph {
    pub(crate) fn from_fundamental(g: &FundamentalGraph) -> Self {
        let edges: Vec<WalkEdge> = g
            .edges()
            .iter()
            .map(|e| WalkEdge {
                from: e.from,
                to: e.to,
                index: e.index.clone(),
                weight: 1.0,
                inverse: e.inverse_id,
            })
            .collect();
        Self::assemble(g, edges)
    }

    pub(crate) fn from_modified(mg: &ModifiedGraph) -> Self {
        let g = mg.base();
        let mut edges: Vec<WalkEdge> = g
            .edges()
            .iter()
            .map(|e| WalkEdge {
                from: e.from,
                to: e.to,
                index: e.index.clone(),
                weight: 1.0,
                inverse: e.inverse_id,
            })
            .collect();
        // added loops are their own inverses (zero index)
        for (x, &w) in mg.loop_weights().iter().enumerate() {
            let id = edges.len();
            edges.push(WalkEdge {
                from: x,
                to: x,
                index: IndexVector::zero(g.dimension()),
                weight: w,
                inverse: id,
            });
        }
        Self::assemble(g, edges)
    }

    fn assemble(g: &FundamentalGraph, edges: Vec<WalkEdge>) -> Self {
        let mut out = vec![Vec::new(); g.num_vertices()];
        for (id, e) in edges.iter().enumerate() {
            out[e.from].push(id);
        }
        let vertex_v = g
            .vertices()
            .iter()
            .map(|v| v.potential - v.degree as f64)
            .collect();
        WalkGraph {
            dimension: g.dimension(),
            edges,
            out,
            vertex_v,
        }
    }
}

/// All cycles of length `n` in the fundamental graph, lexicographically
/// ordered by edge-id sequence.
pub fn enumerate_cycles(
    g: &FundamentalGraph,
    n: usize,
    options: &CycleOptions,
    config: &EngineConfig,
) -> Result<Vec<Cycle>> {
    enumerate_on(&WalkGraph::from_fundamental(g), n, options, config.oracle_cap)
}

/// All cycles of length `n` in the modified graph (added loops carry their
/// vertex weight).
pub fn enumerate_cycles_modified(
    mg: &ModifiedGraph,
    n: usize,
    options: &CycleOptions,
    config: &EngineConfig,
) -> Result<Vec<Cycle>> {
    enumerate_on(&WalkGraph::from_modified(mg), n, options, config.oracle_cap)
}

pub(crate) fn enumerate_on(
    walk: &WalkGraph,
    n: usize,
    options: &CycleOptions,
    cap: usize,
) -> Result<Vec<Cycle>> {
    if n == 0 || n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    if let Some(filter) = &options.index_filter {
        if filter.dim() != walk.dimension {
            return Err(Error::DimensionMismatch {
                expected: walk.dimension,
                found: filter.dim(),
            });
        }
    }

    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::with_capacity(n);
    for start in 0..walk.edges.len() {
        path.push(start);
        extend(walk, n, options, &mut path, &mut cycles);
        path.pop();
    }
    Ok(cycles)
}

fn extend(
    walk: &WalkGraph,
    n: usize,
    options: &CycleOptions,
    path: &mut Vec<usize>,
    cycles: &mut Vec<Cycle>,
) {
    if path.len() == n {
        let first = &walk.edges[path[0]];
        let last = &walk.edges[*path.last().unwrap()];
        if last.to != first.from {
            return;
        }
        if options.non_backtracking && path[0] == last.inverse {
            return;
        }
        let mut index = IndexVector::zero(walk.dimension);
        let mut weight = 1.0;
        let mut potential_sum = 0.0;
        let mut start_vertices = Vec::with_capacity(n);
        for &eid in path.iter() {
            let e = &walk.edges[eid];
            index.add_assign(&e.index);
            weight *= e.weight;
            potential_sum += walk.vertex_v[e.from];
            start_vertices.push(e.from);
        }
        if let Some(filter) = &options.index_filter {
            if &index != filter {
                return;
            }
        }
        cycles.push(Cycle {
            edge_ids: path.clone(),
            start_vertices,
            index,
            weight,
            potential_sum,
        });
        return;
    }

    let here = walk.edges[*path.last().unwrap()].to;
    let prev = *path.last().unwrap();
    for &next in &walk.out[here] {
        if options.non_backtracking && next == walk.edges[prev].inverse {
            continue;
        }
        path.push(next);
        extend(walk, n, options, path, cycles);
        path.pop();
    }
}

/// Oracle cycle counts `N_n^m` of the fundamental graph, by index.
pub fn count_by_index(
    g: &FundamentalGraph,
    n: usize,
    config: &EngineConfig,
) -> Result<std::collections::BTreeMap<IndexVector, u64>> {
    let cycles = enumerate_cycles(g, n, &CycleOptions::default(), config)?;
    let mut counts = std::collections::BTreeMap::new();
    for c in cycles {
        *counts.entry(c.index).or_insert(0u64) += 1;
    }
    Ok(counts)
}
