//! Block-diagonal decomposition of sparse Hamiltonians by edge coloring.
//!
//! Vertices of the interaction graph are basis states and edges are nonzero
//! off-diagonal couplings. Each color class of a proper edge coloring is a
//! matching, so the couplings of one color form a term made of disjoint 2×2
//! blocks. An edge with coupling `h` contributes the block
//! `[[|h|, h], [h*, |h|]]`, which is `2|h|` times a rank-one projector; for the
//! unit Laplacian this is `[[1, −1], [−1, 1]]` and the term satisfies
//! `T² = 2T`. Whatever diagonal is left over goes to one extra diagonal term.

mod coloring;
mod lattice;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use coloring::{bipartite_coloring, bipartition, color_edges, misra_gries, EdgeColoring};
pub use lattice::{chain_parity_split, graph_laplacian, honeycomb, laplacian_chain};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HERMITIAN_TOLERANCE};
use crate::trotter::HermitianTermSet;

/// Tolerance on `Σ_i H_i = H`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-12;

/// Leftover diagonal entries below this magnitude are dropped.
const DIAGONAL_FLOOR: f64 = 1e-14;

/// Undirected weighted edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    /// Orders the endpoints so that `u < v`.
    pub fn new(a: usize, b: usize, weight: f64) -> Self {
        Self { u: a.min(b), v: a.max(b), weight }
    }
}

/// Simple undirected graph with sorted edges and its maximum degree.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    max_degree: usize,
}

impl InteractionGraph {
    /// Sorts edges and rejects self-loops, repeated edges and out-of-range vertices.
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().map(|e| Edge::new(e.u, e.v, e.weight)).collect();
        edges.sort_by_key(|e| (e.u, e.v));
        let mut degree = vec![0usize; vertex_count];
        for (i, e) in edges.iter().enumerate() {
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            if e.v >= vertex_count {
                return Err(Error::IndexOutOfRange { index: e.v, dim: vertex_count });
            }
            if i > 0 && (edges[i - 1].u, edges[i - 1].v) == (e.u, e.v) {
                return Err(Error::Multigraph(e.u, e.v));
            }
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let max_degree = degree.into_iter().max().unwrap_or(0);
        Ok(Self { vertex_count, edges, max_degree })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, x: usize) -> usize {
        self.edges.iter().filter(|e| e.u == x || e.v == x).count()
    }

    /// Neighbor lists in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|e| (e.u, e.v, e.weight)).collect(),
        }
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        Self::new(
            doc.vertices,
            doc.edges.into_iter().map(|(u, v, w)| Edge::new(u, v, w)).collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(s)?)
    }
}

/// Wire form: `{vertices, edges: [[u, v, w], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// Hermitian matrix in coordinate form; both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseHermitian {
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (r, c, v) in entries {
            for idx in [r, c] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if v != Complex64::new(0.0, 0.0) {
                *map.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v;
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let dev = map
            .iter()
            .map(|(&(r, c), &v)| (v - map.get(&(c, r)).copied().unwrap_or(zero).conj()).norm())
            .fold(0.0, f64::max);
        if dev > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { dim, entries: map })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries.get(&(r, c)).copied().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }
}

/// One color class as a block-diagonal Hermitian term.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTerm {
    pub label: String,
    /// 2×2 blocks as vertex pairs `(u, v)` with `u < v`.
    pub blocks: Vec<(usize, usize)>,
    /// Vertices not covered by any block.
    pub untouched: Vec<usize>,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl BlockTerm {
    pub fn to_dense(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

/// `max |T² − 2T|`; zero when `T` is twice a projector.
pub fn projector_squaring_residual(term: &CMatrix) -> f64 {
    linalg::max_abs(&(term * term - term * Complex64::new(2.0, 0.0)))
}

/// Blocks of each color in ascending order, plus the parity of every block's
/// position when the whole color class shares one.
///
/// A block's position is its lower vertex, except the periodic wrap bond
/// `(0, n − 1)` which sits at `n − 1`. On a chain this is the last-bit rule:
/// the parity of the position tells which term a bond belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockLabels {
    pub blocks: Vec<Vec<(usize, usize)>>,
    pub parity: Vec<Option<usize>>,
}

impl BlockLabels {
    /// Color whose blocks are addressed by this position parity.
    pub fn color_for_parity(&self, parity: usize) -> Option<usize> {
        self.parity.iter().position(|&p| p == Some(parity))
    }
}

fn block_position(e: &Edge, n: usize) -> usize {
    if e.u == 0 && e.v == n - 1 && n > 2 {
        e.v
    } else {
        e.u
    }
}

pub fn block_labels(g: &InteractionGraph, coloring: &EdgeColoring) -> BlockLabels {
    let n = g.vertex_count();
    let mut blocks = Vec::with_capacity(coloring.color_count);
    let mut parity = Vec::with_capacity(coloring.color_count);
    for class in coloring.classes() {
        let mut edges: Vec<&Edge> = class.iter().map(|&i| &g.edges()[i]).collect();
        edges.sort_by_key(|e| (block_position(e, n), e.v));
        let p = edges.first().map(|e| block_position(e, n) % 2);
        let uniform = edges.iter().all(|e| Some(block_position(e, n) % 2) == p);
        parity.push(if uniform { p } else { None });
        blocks.push(edges.iter().map(|e| (e.u, e.v)).collect());
    }
    BlockLabels { blocks, parity }
}

fn check_support(h: &SparseHermitian, g: &InteractionGraph) -> Result<()> {
    if h.dim() != g.vertex_count() {
        return Err(Error::DimensionMismatch { expected: g.vertex_count(), got: h.dim() });
    }
    let edges: std::collections::BTreeSet<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    for (r, c, _) in h.entries() {
        if r < c && !edges.contains(&(r, c)) {
            return Err(Error::SupportMismatch(format!("H[{r}][{c}] ≠ 0 but ({r}, {c}) is not an edge")));
        }
    }
    for &(u, v) in &edges {
        if h.get(u, v) == Complex64::new(0.0, 0.0) {
            return Err(Error::SupportMismatch(format!("edge ({u}, {v}) has no coupling in H")));
        }
    }
    Ok(())
}

/// Splits `H` into one block term per color plus a diagonal remainder.
pub fn block_terms(h: &SparseHermitian, g: &InteractionGraph, coloring: &EdgeColoring) -> Result<Vec<BlockTerm>> {
    check_support(h, g)?;
    if !coloring.is_proper(g) {
        return Err(Error::Coloring("coloring is not proper for this graph".into()));
    }
    let n = g.vertex_count();
    let labels = block_labels(g, coloring);
    let parity_names = coloring.color_count == 2
        && labels.color_for_parity(0).is_some()
        && labels.color_for_parity(1).is_some();

    let mut diag_left: Vec<Complex64> = (0..n).map(|i| h.get(i, i)).collect();
    let mut terms = Vec::with_capacity(coloring.color_count + 1);
    for (color, blocks) in labels.blocks.iter().enumerate() {
        let mut covered = vec![false; n];
        let mut entries = Vec::with_capacity(4 * blocks.len());
        for &(u, v) in blocks {
            let coupling = h.get(u, v);
            let share = coupling.norm();
            entries.extend([
                (u, u, share.into()),
                (u, v, coupling),
                (v, u, coupling.conj()),
                (v, v, share.into()),
            ]);
            diag_left[u] -= share;
            diag_left[v] -= share;
            covered[u] = true;
            covered[v] = true;
        }
        let label = if parity_names {
            match labels.parity[color] {
                Some(0) => "even".to_string(),
                _ => "odd".to_string(),
            }
        } else {
            format!("color-{color}")
        };
        terms.push(BlockTerm {
            label,
            blocks: blocks.clone(),
            untouched: (0..n).filter(|&i| !covered[i]).collect(),
            entries,
        });
    }

    let diagonal: Vec<(usize, usize, Complex64)> = diag_left
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > DIAGONAL_FLOOR)
        .map(|(i, &z)| (i, i, z))
        .collect();
    if !diagonal.is_empty() || terms.is_empty() {
        terms.push(BlockTerm {
            label: "diagonal".to_string(),
            blocks: Vec::new(),
            untouched: (0..n).collect(),
            entries: diagonal,
        });
    }
    Ok(terms)
}

/// `H = Σ_i H_i` with one block-diagonal term per color (plus a diagonal term
/// when the edge shares leave diagonal weight behind); the sum is verified.
pub fn decompose(h: &SparseHermitian, g: &InteractionGraph, coloring: &EdgeColoring) -> Result<HermitianTermSet> {
    let terms = block_terms(h, g, coloring)?;
    let set = HermitianTermSet::new(
        h.dim(),
        terms.into_iter().map(|t| (t.label, t.entries)).collect(),
    )?;
    let residual = reconstruction_residual(h, &set);
    if residual > RECONSTRUCTION_TOLERANCE {
        return Err(Error::SupportMismatch(format!("terms miss H by {residual:e}")));
    }
    Ok(set)
}

/// `max |Σ_i H_i − H|` entrywise, without densifying.
pub fn reconstruction_residual(h: &SparseHermitian, set: &HermitianTermSet) -> f64 {
    let mut sum: BTreeMap<(usize, usize), Complex64> = h.entries().map(|(r, c, v)| ((r, c), -v)).collect();
    for t in set.terms() {
        for &(r, c, v) in t.entries() {
            *sum.entry((r, c)).or_default() += v;
        }
    }
    sum.values().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trotter::exact_term_exponential;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn split(l: usize, periodic: bool) -> (SparseHermitian, InteractionGraph, HermitianTermSet) {
        let (h, g) = laplacian_chain(l, periodic).unwrap();
        let set = decompose(&h, &g, &color_edges(&g).unwrap()).unwrap();
        (h, g, set)
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(
            InteractionGraph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]),
            Err(Error::Multigraph(0, 1))
        ));
        assert!(matches!(InteractionGraph::new(3, vec![Edge::new(2, 2, 1.0)]), Err(Error::SelfLoop(2))));
        assert!(InteractionGraph::new(2, vec![Edge::new(0, 2, 1.0)]).is_err());
        let g = InteractionGraph::new(4, vec![Edge::new(3, 1, 1.0), Edge::new(0, 1, 1.0)]).unwrap();
        assert_eq!(g.edges()[0], Edge::new(0, 1, 1.0));
        assert_eq!(g.edges()[1].u, 1);
        assert_eq!(g.max_degree(), 2);
    }

    #[test]
    fn ring_splits_into_two_projector_terms() {
        let (h, _, set) = split(8, true);
        assert_eq!(set.len(), 2);
        assert_eq!(set.labels(), vec!["even", "odd"]);
        for t in set.dense_terms() {
            assert!(projector_squaring_residual(&t) < 1e-12);
        }
        assert!(reconstruction_residual(&h, &set) < 1e-12);
    }

    #[test]
    fn ring_terms_have_spectrum_zero_and_two() {
        let (_, _, set) = split(4, true);
        for t in set.dense_terms() {
            for ev in linalg::hermitian_eigenvalues(&t).unwrap() {
                assert!(ev.abs() < 1e-12 || (ev - 2.0).abs() < 1e-12, "eigenvalue {ev}");
            }
        }
    }

    #[test]
    fn ring_spectrum_follows_dispersion() {
        for l in [4usize, 8, 16, 64] {
            let (h, _) = laplacian_chain(l, true).unwrap();
            let ev = linalg::hermitian_eigenvalues(&h.to_dense()).unwrap();
            let mut expect: Vec<f64> = (0..l)
                .map(|j| 4.0 * (PI * j as f64 / l as f64).sin().powi(2))
                .collect();
            expect.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(&expect) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn open_chain_gets_boundary_diagonal() {
        let (h, g, set) = split(8, false);
        assert_eq!(color_edges(&g).unwrap().color_count, 2);
        assert_eq!(set.labels(), vec!["even", "odd", "diagonal"]);
        let diag = &set.terms()[2];
        assert_eq!(diag.entries().len(), 2);
        assert!(reconstruction_residual(&h, &set) < 1e-12);
    }

    #[test]
    fn diagonal_hamiltonian_is_one_term() {
        let h = SparseHermitian::new(3, [(0, 0, 1.0.into()), (2, 2, (-0.5).into())]).unwrap();
        let g = InteractionGraph::new(3, vec![]).unwrap();
        let set = decompose(&h, &g, &color_edges(&g).unwrap()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.total(), h.to_dense());
    }

    #[test]
    fn support_mismatch_is_rejected() {
        let (h, _) = laplacian_chain(6, false).unwrap();
        let (_, other) = laplacian_chain(6, true).unwrap();
        let c = color_edges(&other).unwrap();
        assert!(matches!(decompose(&h, &other, &c), Err(Error::SupportMismatch(_))));
        let small = InteractionGraph::new(5, vec![]).unwrap();
        assert!(decompose(&h, &small, &color_edges(&small).unwrap()).is_err());
    }

    #[test]
    fn complex_couplings_decompose_into_scaled_projectors() {
        let z = Complex64::new(0.3, -0.4);
        let h = SparseHermitian::new(
            3,
            [(0, 1, z), (1, 0, z.conj()), (1, 2, z), (2, 1, z.conj()), (1, 1, 1.0.into())],
        )
        .unwrap();
        let g = InteractionGraph::new(3, vec![Edge::new(0, 1, 0.5), Edge::new(1, 2, 0.5)]).unwrap();
        let set = decompose(&h, &g, &color_edges(&g).unwrap()).unwrap();
        assert!(reconstruction_residual(&h, &set) < 1e-15);
        for t in set.dense_terms().iter().take(2) {
            // |h| = 0.5, so each block is 2·0.5·P
            assert!(linalg::max_abs(&(t * t - t * Complex64::new(1.0, 0.0))) < 1e-15);
        }
    }

    #[test]
    fn honeycomb_decomposition() {
        let (h, g) = honeycomb(6, 4, false).unwrap();
        assert_eq!(g.vertex_count(), 24);
        let coloring = color_edges(&g).unwrap();
        let set = decompose(&h, &g, &coloring).unwrap();
        assert_eq!(set.len(), 3);
        for t in set.dense_terms() {
            assert!(projector_squaring_residual(&t) < 1e-12);
        }
        assert!(reconstruction_residual(&h, &set) < 1e-12);

        let labels = block_labels(&g, &coloring);
        let mut per_vertex = vec![0usize; 24];
        for blocks in &labels.blocks {
            let mut seen = vec![0usize; 24];
            for &(u, v) in blocks {
                seen[u] += 1;
                seen[v] += 1;
                per_vertex[u] += 1;
                per_vertex[v] += 1;
            }
            assert!(seen.iter().all(|&k| k <= 1));
        }
        assert!(per_vertex.iter().all(|&k| k <= 3));
    }

    #[test]
    fn chain_block_labels_follow_last_bit() {
        let (_, g) = laplacian_chain(8, false).unwrap();
        let labels = block_labels(&g, &color_edges(&g).unwrap());
        let odd = labels.color_for_parity(1).unwrap();
        assert!(labels.blocks[odd].iter().all(|&(u, _)| u % 2 == 1));
        let even = labels.color_for_parity(0).unwrap();
        assert!(labels.blocks[even].iter().all(|&(u, _)| u % 2 == 0));

        let single = InteractionGraph::new(2, vec![Edge::new(0, 1, 1.0)]).unwrap();
        let l = block_labels(&single, &color_edges(&single).unwrap());
        assert_eq!(l.blocks, vec![vec![(0, 1)]]);
    }

    #[test]
    fn term_exponentials_keep_block_pattern() {
        for (h, g) in [laplacian_chain(16, true).unwrap(), honeycomb(6, 4, false).unwrap()] {
            let set = decompose(&h, &g, &color_edges(&g).unwrap()).unwrap();
            for t in set.dense_terms() {
                let u = exact_term_exponential(&t, 0.7).unwrap();
                let n = t.nrows();
                let mut pattern = t.map(|z| z != Complex64::new(0.0, 0.0));
                for i in 0..n {
                    pattern[(i, i)] = true;
                }
                for r in 0..n {
                    for c in 0..n {
                        if !pattern[(r, c)] {
                            assert!(u[(r, c)].norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn graph_json_round_trip() {
        let (_, g) = honeycomb(4, 2, true).unwrap();
        assert_eq!(InteractionGraph::from_json(&g.to_json().unwrap()).unwrap(), g);
        assert!(InteractionGraph::from_json(r#"{"vertices":2,"edges":[[0,1,1.0],[1,0,1.0]]}"#).is_err());
    }
}
