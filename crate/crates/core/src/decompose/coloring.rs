//! Proper edge coloring.
//!
//! [`misra_gries`] colors any simple graph with at most `d + 1` colors.
//! [`bipartite_coloring`] uses alternating-path swaps to reach exactly `d`
//! colors when the graph is bipartite. Edges are processed in the graph's
//! sorted order, so both are deterministic.

use serde::Serialize;

use super::InteractionGraph;
use crate::error::{Error, Result};

/// Color of each edge, parallel to [`InteractionGraph::edges`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeColoring {
    pub colors: Vec<usize>,
    pub color_count: usize,
}

impl EdgeColoring {
    /// Edge indices grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.color_count];
        for (e, &c) in self.colors.iter().enumerate() {
            out[c].push(e);
        }
        out
    }

    /// First edge pair sharing a vertex and a color, if any.
    pub fn conflict(&self, g: &InteractionGraph) -> Option<(usize, usize)> {
        let mut seen = vec![vec![None; self.color_count]; g.vertex_count()];
        for (e, (edge, &c)) in g.edges().iter().zip(&self.colors).enumerate() {
            for x in [edge.u, edge.v] {
                if let Some(prev) = seen[x][c] {
                    return Some((prev, e));
                }
                seen[x][c] = Some(e);
            }
        }
        None
    }

    pub fn is_proper(&self, g: &InteractionGraph) -> bool {
        self.colors.len() == g.edges().len()
            && self.colors.iter().all(|&c| c < self.color_count)
            && self.conflict(g).is_none()
    }
}

/// Partial coloring state: `at[x][c]` is the neighbor joined to `x` by color `c`.
struct Palette {
    at: Vec<Vec<Option<usize>>>,
}

impl Palette {
    fn new(vertices: usize, colors: usize) -> Self {
        Self { at: vec![vec![None; colors]; vertices] }
    }

    fn is_free(&self, x: usize, c: usize) -> bool {
        self.at[x][c].is_none()
    }

    fn first_free(&self, x: usize) -> usize {
        self.at[x]
            .iter()
            .position(Option::is_none)
            .expect("palette has more colors than the vertex degree")
    }

    fn color_of(&self, x: usize, y: usize) -> Option<usize> {
        self.at[x].iter().position(|&n| n == Some(y))
    }

    fn set(&mut self, x: usize, y: usize, c: usize) {
        self.at[x][c] = Some(y);
        self.at[y][c] = Some(x);
    }

    fn clear(&mut self, x: usize, y: usize, c: usize) {
        self.at[x][c] = None;
        self.at[y][c] = None;
    }

    /// Swaps colors `a` and `b` along the maximal path that leaves `start`
    /// through its `a`-colored edge.
    fn invert_path(&mut self, start: usize, a: usize, b: usize) {
        let mut path = Vec::new();
        let (mut x, mut c) = (start, a);
        while let Some(y) = self.at[x][c] {
            path.push((x, y, c));
            x = y;
            c = if c == a { b } else { a };
        }
        for &(x, y, c) in &path {
            self.clear(x, y, c);
        }
        for &(x, y, c) in &path {
            self.set(x, y, if c == a { b } else { a });
        }
    }

    fn into_coloring(self, g: &InteractionGraph) -> EdgeColoring {
        let raw: Vec<usize> = g
            .edges()
            .iter()
            .map(|e| self.color_of(e.u, e.v).expect("every edge colored"))
            .collect();
        compact(raw)
    }
}

/// Relabels used colors as `0..k` in order of first use.
fn compact(raw: Vec<usize>) -> EdgeColoring {
    let mut map: Vec<Option<usize>> = Vec::new();
    let mut next = 0;
    let colors = raw
        .into_iter()
        .map(|c| {
            if c >= map.len() {
                map.resize(c + 1, None);
            }
            *map[c].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    EdgeColoring { colors, color_count: next }
}

/// Misra–Gries edge coloring with at most `d + 1` colors.
pub fn misra_gries(g: &InteractionGraph) -> EdgeColoring {
    let n = g.vertex_count();
    let mut pal = Palette::new(n, g.max_degree() + 1);
    let adj = g.adjacency();

    for edge in g.edges() {
        let (u, v) = (edge.u, edge.v);

        // maximal fan of u starting at v
        let mut fan = vec![v];
        let mut in_fan = vec![false; n];
        in_fan[v] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = adj[u].iter().copied().find(|&w| {
                !in_fan[w]
                    && pal
                        .color_of(u, w)
                        .is_some_and(|c| pal.is_free(last, c))
            });
            match next {
                Some(w) => {
                    in_fan[w] = true;
                    fan.push(w);
                }
                None => break,
            }
        }

        let c = pal.first_free(u);
        let d = pal.first_free(*fan.last().unwrap());
        if c != d {
            pal.invert_path(u, d, c);
        }

        let w = fan
            .iter()
            .position(|&x| pal.is_free(x, d))
            .expect("some fan vertex has d free after inversion");

        // rotate the fan prefix ending at w
        for i in 0..w {
            let next_color = pal.color_of(u, fan[i + 1]).expect("fan edges are colored");
            pal.clear(u, fan[i + 1], next_color);
            pal.set(u, fan[i], next_color);
        }
        pal.set(u, fan[w], d);
    }
    pal.into_coloring(g)
}

/// Two-coloring of the vertices, or `None` if the graph has an odd cycle.
pub fn bipartition(g: &InteractionGraph) -> Option<Vec<u8>> {
    let adj = g.adjacency();
    let mut side = vec![u8::MAX; g.vertex_count()];
    let mut stack = Vec::new();
    for root in 0..g.vertex_count() {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        stack.push(root);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if side[y] == u8::MAX {
                    side[y] = 1 - side[x];
                    stack.push(y);
                } else if side[y] == side[x] {
                    return None;
                }
            }
        }
    }
    Some(side)
}

/// Edge coloring with exactly `d` colors for bipartite graphs.
pub fn bipartite_coloring(g: &InteractionGraph) -> Option<EdgeColoring> {
    bipartition(g)?;
    let mut pal = Palette::new(g.vertex_count(), g.max_degree().max(1));
    for edge in g.edges() {
        let (u, v) = (edge.u, edge.v);
        let a = pal.first_free(u);
        if !pal.is_free(v, a) {
            let b = pal.first_free(v);
            // the a/b path from v cannot reach u in a bipartite graph
            pal.invert_path(v, a, b);
        }
        pal.set(u, v, a);
    }
    Some(pal.into_coloring(g))
}

/// Bipartite pass when it applies, Misra–Gries otherwise; the result is verified.
pub fn color_edges(g: &InteractionGraph) -> Result<EdgeColoring> {
    let coloring = bipartite_coloring(g).unwrap_or_else(|| misra_gries(g));
    if let Some((a, b)) = coloring.conflict(g) {
        return Err(Error::Coloring(format!("edges {a} and {b} share a vertex and a color")));
    }
    if coloring.color_count > g.max_degree() + 1 {
        return Err(Error::Coloring(format!(
            "{} colors exceed d + 1 = {}",
            coloring.color_count,
            g.max_degree() + 1
        )));
    }
    Ok(coloring)
}
