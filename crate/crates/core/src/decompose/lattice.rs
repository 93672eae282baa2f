//! Lattice generators: the 1D chain Laplacian and the honeycomb lattice.

use num_complex::Complex64;

use super::{color_edges, decompose, Edge, InteractionGraph, SparseHermitian};
use crate::error::{invalid, Error, Result};
use crate::trotter::HermitianTermSet;

/// Graph Laplacian `D − W`: weighted degree on the diagonal, `−w` on edges.
pub fn graph_laplacian(g: &InteractionGraph) -> SparseHermitian {
    let mut entries = Vec::with_capacity(g.vertex_count() + 2 * g.edges().len());
    let mut diag = vec![0.0; g.vertex_count()];
    for e in g.edges() {
        entries.push((e.u, e.v, Complex64::new(-e.weight, 0.0)));
        entries.push((e.v, e.u, Complex64::new(-e.weight, 0.0)));
        diag[e.u] += e.weight;
        diag[e.v] += e.weight;
    }
    entries.extend(diag.into_iter().enumerate().map(|(i, d)| (i, i, Complex64::new(d, 0.0))));
    SparseHermitian::new(g.vertex_count(), entries).expect("Laplacian of a valid graph is Hermitian")
}

/// Chain Laplacian on `L` sites: diagonal 2, `−1` between neighbors.
///
/// With periodic boundaries the spectrum is `4 sin²(πj/L)`, `j = 0..L`.
/// `L = 2` periodic would need a doubled edge and is rejected.
pub fn laplacian_chain(l: usize, periodic: bool) -> Result<(SparseHermitian, InteractionGraph)> {
    if l < 2 {
        return Err(invalid("L", format!("need at least 2 sites, got {l}")));
    }
    let mut edges: Vec<Edge> = (0..l - 1).map(|i| Edge::new(i, i + 1, 1.0)).collect();
    if periodic {
        if l == 2 {
            return Err(Error::Multigraph(0, 1));
        }
        edges.push(Edge::new(l - 1, 0, 1.0));
    }
    let g = InteractionGraph::new(l, edges)?;
    let mut entries: Vec<(usize, usize, Complex64)> =
        (0..l).map(|i| (i, i, Complex64::new(2.0, 0.0))).collect();
    for e in g.edges() {
        entries.push((e.u, e.v, Complex64::new(-1.0, 0.0)));
        entries.push((e.v, e.u, Complex64::new(-1.0, 0.0)));
    }
    Ok((SparseHermitian::new(l, entries)?, g))
}

/// The `H = H_even + H_odd` split of a chain Laplacian.
///
/// Odd periodic chains have no even/odd split (an odd cycle needs three
/// colors) and are rejected here; [`color_edges`] handles them generally.
pub fn chain_parity_split(l: usize, periodic: bool) -> Result<HermitianTermSet> {
    if periodic && l % 2 == 1 {
        return Err(invalid("L", format!("periodic even/odd split needs even L, got {l}")));
    }
    let (h, g) = laplacian_chain(l, periodic)?;
    decompose(&h, &g, &color_edges(&g)?)
}

/// Honeycomb lattice in brick-wall form with its graph Laplacian.
///
/// Sites sit on an `lx × ly` grid (index `y·lx + x`); every site bonds to its
/// horizontal neighbors and to the site above when `x + y` is even. Periodic
/// wrapping needs even `lx ≥ 4` and even `ly ≥ 2`, which keeps the lattice
/// bipartite and 3-regular.
pub fn honeycomb(lx: usize, ly: usize, periodic: bool) -> Result<(SparseHermitian, InteractionGraph)> {
    if lx < 2 || ly < 1 {
        return Err(invalid("size", format!("honeycomb needs lx ≥ 2 and ly ≥ 1, got {lx}×{ly}")));
    }
    if periodic && (lx < 4 || lx % 2 == 1 || ly < 2 || ly % 2 == 1) {
        return Err(invalid(
            "size",
            format!("periodic honeycomb needs even lx ≥ 4 and even ly ≥ 2, got {lx}×{ly}"),
        ));
    }
    let idx = |x: usize, y: usize| y * lx + x;
    let mut edges = Vec::new();
    for y in 0..ly {
        for x in 0..lx {
            if x + 1 < lx {
                edges.push(Edge::new(idx(x, y), idx(x + 1, y), 1.0));
            } else if periodic {
                edges.push(Edge::new(idx(x, y), idx(0, y), 1.0));
            }
            if (x + y) % 2 == 0 {
                if y + 1 < ly {
                    edges.push(Edge::new(idx(x, y), idx(x, y + 1), 1.0));
                } else if periodic {
                    edges.push(Edge::new(idx(x, y), idx(x, 0), 1.0));
                }
            }
        }
    }
    let g = InteractionGraph::new(lx * ly, edges)?;
    Ok((graph_laplacian(&g), g))
}
