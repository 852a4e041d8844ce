//! Built-in example graphs.

use crate::error::Result;
use crate::graph::{build_graph, FundamentalGraph};

/// Square lattice quotient with a 2×2 fundamental cell: 4 vertices, 8 edges
/// (16 oriented), 4-regular and bipartite.
pub fn square_lattice() -> FundamentalGraph {
    build_graph(
        2,
        &[("x1", 0.0), ("x2", 0.0), ("x3", 0.0), ("x4", 0.0)],
        &[
            ("x1", "x4", vec![0, 0]),
            ("x4", "x2", vec![0, 0]),
            ("x2", "x3", vec![0, 0]),
            ("x3", "x1", vec![0, 0]),
            ("x4", "x1", vec![0, 1]),
            ("x2", "x4", vec![1, 0]),
            ("x3", "x2", vec![0, -1]),
            ("x1", "x3", vec![-1, 0]),
        ],
    )
    .expect("square lattice is a valid graph")
}

/// Kagome lattice quotient: 3 vertices, 6 edges (12 oriented), 4-regular,
/// non-bipartite (triangles), with a flat adjacency band at -2.
pub fn kagome_lattice() -> FundamentalGraph {
    build_graph(
        2,
        &[("x1", 0.0), ("x2", 0.0), ("x3", 0.0)],
        &[
            ("x1", "x2", vec![0, 0]),
            ("x2", "x3", vec![0, 0]),
            ("x3", "x1", vec![0, 0]),
            ("x2", "x1", vec![0, 1]),
            ("x3", "x2", vec![1, -1]),
            ("x1", "x3", vec![-1, 0]),
        ],
    )
    .expect("kagome lattice is a valid graph")
}

/// One-dimensional lattice: a single vertex with one index-1 loop.
pub fn z_line() -> FundamentalGraph {
    build_graph(1, &[("x", 0.0)], &[("x", "x", vec![1])])
        .expect("Z lattice is a valid graph")
}

/// One-dimensional lattice with an extra hop of range `p`: a single vertex
/// with loops of index 1 and `p`. 4-regular; the quotient is never bipartite,
/// while the periodic graph is bipartite exactly for odd `p`.
pub fn z_line_with_chords(p: usize) -> Result<FundamentalGraph> {
    build_graph(
        1,
        &[("x", 0.0)],
        &[("x", "x", vec![1]), ("x", "x", vec![p as i64])],
    )
}

/// Looks up a builtin by name: `square`, `kagome`, `zline` or `g<p>`
/// (e.g. `g2`, `g3`).
pub fn builtin_graph(name: &str) -> Option<FundamentalGraph> {
    match name {
        "square" => Some(square_lattice()),
        "kagome" => Some(kagome_lattice()),
        "zline" => Some(z_line()),
        _ => {
            let p: usize = name.strip_prefix('g')?.parse().ok()?;
            z_line_with_chords(p).ok()
        }
    }
}
