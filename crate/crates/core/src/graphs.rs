//! Incidence configurations of complete graphs, complete bipartite graphs and
//! the all-ones row, plus the Graver table of the triangle with loops.

use crate::lattice::{Configuration, IntMatrix, Move};

/// A configuration whose columns are the edges of a graph.
#[derive(Debug, Clone)]
pub struct EdgeLabeledConfiguration {
    pub cfg: Configuration,
    pub vertex_labels: Vec<String>,
    /// Endpoints (row indices) of each column, in column order.
    pub edges: Vec<(usize, usize)>,
}

impl EdgeLabeledConfiguration {
    pub fn edge_label(&self, col: usize) -> String {
        let (u, v) = self.edges[col];
        format!("{}{}", self.vertex_labels[u], self.vertex_labels[v])
    }

    pub fn edge_labels(&self) -> Vec<String> {
        (0..self.edges.len()).map(|c| self.edge_label(c)).collect()
    }

    pub fn column_of(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.iter().position(|&e| e == key)
    }
}

fn vertex_label(i: usize, count: usize) -> String {
    if count <= 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{}", i + 1)
    }
}

fn incidence(vertices: usize, edges: &[(usize, usize)]) -> IntMatrix {
    let mut m = IntMatrix::zeros(vertices, edges.len());
    for (c, &(u, v)) in edges.iter().enumerate() {
        m.set(u, c, m.get(u, c) + 1);
        m.set(v, c, m.get(v, c) + 1);
    }
    m
}

/// `K_n`, optionally with a self-loop at every vertex. Edges `{u,v}`, `u <= v`,
/// are ordered lexicographically, so loops sit in front of each vertex's
/// outgoing edges (`aa, ab, ac, bb, bc, cc` for `n = 3`).
pub fn complete_graph_config(n: usize, loops: bool) -> EdgeLabeledConfiguration {
    assert!(n >= 2, "complete graph needs at least two vertices");
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| {
            let start = if loops { u } else { u + 1 };
            (start..n).map(move |v| (u, v))
        })
        .collect();
    let cfg = Configuration::validate(incidence(n, &edges)).expect("incidence matrices are graded");
    EdgeLabeledConfiguration {
        cfg,
        vertex_labels: (0..n).map(|i| vertex_label(i, n)).collect(),
        edges,
    }
}

/// `K_{I,J}` with row vertices first; column `(i,j)` is cell `i*J + j`.
pub fn complete_bipartite_config(rows: usize, cols: usize) -> EdgeLabeledConfiguration {
    assert!(rows >= 1 && cols >= 1, "bipartite graph needs nonempty sides");
    let edges: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, rows + j)))
        .collect();
    let cfg = Configuration::validate(incidence(rows + cols, &edges))
        .expect("incidence matrices are graded");
    let vertex_labels = (0..rows)
        .map(|i| format!("r{}", i + 1))
        .chain((0..cols).map(|j| format!("c{}", j + 1)))
        .collect();
    EdgeLabeledConfiguration {
        cfg,
        vertex_labels,
        edges,
    }
}

pub fn all_ones_row(n: usize) -> Configuration {
    assert!(n >= 1, "all-ones row needs at least one column");
    Configuration::validate(IntMatrix::new(1, n, vec![1; n]).expect("shape")).expect("graded")
}

/// Names of the ten Graver classes of the triangle with loops.
pub const PATTERN_NAMES: [&str; 10] = [
    "A", "B(a)", "B(b)", "B(c)", "C(a)", "C(b)", "C(c)", "D(a)", "D(b)", "D(c)",
];

/// The ten Graver classes of the triangle with loops over edge order
/// `aa, ab, ac, bb, bc, cc`.
pub fn pattern_table() -> Vec<(&'static str, Move)> {
    let cols: [[i64; 6]; 10] = [
        [1, -1, -1, 1, -1, 1],
        [1, -1, -1, 0, 1, 0],
        [0, -1, 1, 1, -1, 0],
        [0, 1, -1, 0, -1, 1],
        [0, 0, 0, 1, -2, 1],
        [1, 0, -2, 0, 0, 1],
        [1, -2, 0, 1, 0, 0],
        [0, 2, -2, -1, 0, 1],
        [1, -2, 0, 0, 2, -1],
        [-1, 0, 2, 1, -2, 0],
    ];
    PATTERN_NAMES
        .iter()
        .zip(cols)
        .map(|(&name, c)| (name, Move::new(c.to_vec())))
        .collect()
}
