//! Bipartiteness of the quotient graph and of the periodic graph upstairs.
//!
//! The quotient is bipartite iff it has no odd cycle, equivalently iff the
//! number of length-n cycles vanishes for every odd `n ≤ ν`; both a direct
//! 2-coloring and the adjacency-trace criterion are computed and must agree.
//!
//! The periodic graph is bipartite iff zero-index odd cycles are absent for
//! *all* odd lengths, which no finite enumeration can decide. Instead we
//! search for a parity labeling `p : V_* → Z/2` together with a character
//! `ε : Z^d → Z/2` such that every edge satisfies
//! `p(x) + p(y) + ⟨ε, τ(e)⟩ ≡ 1 (mod 2)`: lifting the coloring
//! `x + a ↦ p(x) + ε(a)` two-colors the periodic graph, and conversely a
//! periodic two-coloring induces such a pair. Zero-index cycle counts at
//! bounded odd lengths serve as a consistency check, not as the decision
//! procedure.

use serde::Serialize;

use crate::graph::FundamentalGraph;
use crate::operator::EngineConfig;
use crate::traces::cycle_counts;

/// Certificate that the periodic graph is bipartite.
#[derive(Clone, Debug, Serialize)]
pub struct ParityWitness {
    /// Parity of each quotient vertex, by vertex order.
    pub vertex_parity: Vec<u8>,
    /// Character bits `ε ∈ {0,1}^d` acting by `⟨ε, m⟩ mod 2`.
    pub character: Vec<u8>,
}

/// Both verdicts plus the evidence behind them.
#[derive(Clone, Debug, Serialize)]
pub struct BipartiteReport {
    pub fundamental: bool,
    pub periodic: bool,
    pub fundamental_by_coloring: bool,
    /// Trace-based verdict; `None` when ν exceeds the power cap and only the
    /// coloring was consulted.
    pub fundamental_by_traces: Option<bool>,
    pub witness: Option<ParityWitness>,
}

/// 2-colors the quotient multigraph with indices forgotten; loops make it
/// immediately non-bipartite.
fn two_color_quotient(g: &FundamentalGraph) -> Option<Vec<u8>> {
    let nu = g.num_vertices();
    let mut parity: Vec<Option<u8>> = vec![None; nu];
    parity[0] = Some(0);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let px = parity[x].unwrap();
        for e in g.edges().iter().filter(|e| e.from == x) {
            let want = px ^ 1;
            match parity[e.to] {
                None => {
                    parity[e.to] = Some(want);
                    queue.push_back(e.to);
                }
                Some(p) if p != want => return None,
                _ => {}
            }
        }
    }
    Some(parity.into_iter().map(|p| p.expect("connected")).collect())
}

fn character_value(character: u64, m: &crate::index::IndexVector) -> u8 {
    let mut acc = 0i64;
    for (j, &c) in m.components().iter().enumerate() {
        if character >> j & 1 == 1 {
            acc += c;
        }
    }
    (acc.rem_euclid(2)) as u8
}

/// Searches the `2^d` parity characters for a labeling that two-colors the
/// periodic graph; deterministic (lowest character, lowest vertex first).
pub fn periodic_parity_witness(g: &FundamentalGraph) -> Option<ParityWitness> {
    let d = g.dimension();
    let nu = g.num_vertices();
    'characters: for character in 0u64..(1 << d) {
        let mut parity: Vec<Option<u8>> = vec![None; nu];
        parity[0] = Some(0);
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let px = parity[x].unwrap();
            for e in g.edges().iter().filter(|e| e.from == x) {
                let want = px ^ 1 ^ character_value(character, &e.index);
                match parity[e.to] {
                    None => {
                        parity[e.to] = Some(want);
                        queue.push_back(e.to);
                    }
                    Some(p) if p != want => continue 'characters,
                    _ => {}
                }
            }
        }
        return Some(ParityWitness {
            vertex_parity: parity.into_iter().map(|p| p.expect("connected")).collect(),
            character: (0..d).map(|j| (character >> j & 1) as u8).collect(),
        });
    }
    None
}

/// Whether the fundamental (quotient) graph is bipartite.
///
/// Decided by 2-coloring; when ν is within the power cap the equivalent
/// trace criterion (`N_n = 0` for all odd `n ≤ ν`) is computed as well and
/// the two must agree.
pub fn bipartite_fundamental(g: &FundamentalGraph, config: &EngineConfig) -> bool {
    bipartite_report(g, config).fundamental
}

/// Whether the periodic graph is bipartite (parity-labeling search).
pub fn bipartite_periodic(g: &FundamentalGraph) -> bool {
    periodic_parity_witness(g).is_some()
}

/// Full report: both verdicts, both fundamental-graph routes, and the parity
/// witness when the periodic graph is bipartite.
pub fn bipartite_report(g: &FundamentalGraph, config: &EngineConfig) -> BipartiteReport {
    let by_coloring = two_color_quotient(g).is_some();
    let nu = g.num_vertices();
    let by_traces = if nu <= config.power_cap {
        let all_odd_zero = (1..=nu).step_by(2).all(|n| {
            cycle_counts(g, n, config)
                .map(|c| c.total == num_bigint::BigInt::from(0))
                .unwrap_or(false)
        });
        Some(all_odd_zero)
    } else {
        None
    };
    if let Some(t) = by_traces {
        debug_assert_eq!(t, by_coloring, "coloring and trace criteria disagree");
    }
    let witness = periodic_parity_witness(g);
    BipartiteReport {
        fundamental: by_coloring,
        periodic: witness.is_some(),
        fundamental_by_coloring: by_coloring,
        fundamental_by_traces: by_traces,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{kagome_lattice, square_lattice, z_line, z_line_with_chords};
    use crate::index::IndexVector;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn square_lattice_is_bipartite_both_ways() {
        let g = square_lattice();
        let report = bipartite_report(&g, &cfg());
        assert!(report.fundamental);
        assert!(report.periodic);
        assert_eq!(report.fundamental_by_traces, Some(true));
        let w = report.witness.unwrap();
        assert_eq!(w.character, vec![0, 0]);
        // x1/x2 on one side, x3/x4 on the other
        assert_eq!(w.vertex_parity[0], w.vertex_parity[1]);
        assert_ne!(w.vertex_parity[0], w.vertex_parity[2]);
    }

    #[test]
    fn kagome_is_not_bipartite() {
        let g = kagome_lattice();
        let report = bipartite_report(&g, &cfg());
        assert!(!report.fundamental);
        assert!(!report.periodic);
        assert_eq!(report.fundamental_by_traces, Some(false));
        assert!(report.witness.is_none());
    }

    #[test]
    fn chorded_lines_depend_on_parity_of_p() {
        // quotient has loops, hence never bipartite; upstairs bipartite iff
        // the chord length is odd
        for (p, periodic) in [(1, true), (2, false), (3, true), (4, false), (5, true)] {
            let g = z_line_with_chords(p).unwrap();
            let report = bipartite_report(&g, &cfg());
            assert!(!report.fundamental, "p={p}");
            assert_eq!(report.periodic, periodic, "p={p}");
        }
        let g3 = z_line_with_chords(3).unwrap();
        let w = periodic_parity_witness(&g3).unwrap();
        assert_eq!(w.character, vec![1]);
    }

    #[test]
    fn z_line_is_bipartite_upstairs() {
        let g = z_line();
        let report = bipartite_report(&g, &cfg());
        assert!(!report.fundamental); // single vertex with a loop
        assert!(report.periodic);
    }

    #[test]
    fn zero_index_parity_consistency() {
        // wherever the periodic graph is bipartite, zero-index odd counts
        // vanish at every reachable length
        let cfg = cfg();
        for (g, expect) in [
            (square_lattice(), true),
            (kagome_lattice(), false),
            (z_line_with_chords(3).unwrap(), true),
            (z_line_with_chords(2).unwrap(), false),
        ] {
            let bipartite = bipartite_periodic(&g);
            assert_eq!(bipartite, expect);
            if bipartite {
                for n in (1..=7).step_by(2) {
                    let zero = cycle_counts(&g, n, &cfg)
                        .unwrap()
                        .count(&IndexVector::zero(g.dimension()));
                    assert_eq!(zero, num_bigint::BigInt::from(0), "n={n}");
                }
            }
        }
    }
}
