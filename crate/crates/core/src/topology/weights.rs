use std::fmt;

use nalgebra::DMatrix;

use super::graph::AdjacencyGraph;
use crate::error::{Error, Result};

/// Absolute tolerance on every row and column sum.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// A doubly stochastic mixing matrix whose off-diagonal support is exactly
/// the edge set of `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    entries: DMatrix<f64>,
    support: AdjacencyGraph,
    min_edge_weight: f64,
}

impl WeightMatrix {
    /// Wraps `entries` after checking it against `support` and the lower
    /// bound `min_edge_weight` on diagonal and edge weights.
    pub fn new(
        entries: DMatrix<f64>,
        support: AdjacencyGraph,
        min_edge_weight: f64,
    ) -> Result<Self> {
        let report = validate_weights(&entries, &support, min_edge_weight)?;
        if !report.is_valid() {
            return Err(Error::Weights(report.to_string()));
        }
        Ok(Self {
            entries,
            support,
            min_edge_weight,
        })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn support(&self) -> &AdjacencyGraph {
        &self.support
    }

    pub fn min_edge_weight(&self) -> f64 {
        self.min_edge_weight
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// 1x1 identity, the mixing matrix of a single isolated node.
    pub fn identity1() -> Self {
        Self {
            entries: DMatrix::from_element(1, 1, 1.0),
            support: AdjacencyGraph::isolated(1).expect("one node"),
            min_edge_weight: 1.0,
        }
    }
}

/// Max-degree (Metropolis-Hastings) weights: `1 / (1 + max(deg i, deg j))`
/// on every edge, with the diagonal absorbing the remainder of each row.
///
/// On regular graphs this is the `1 / (|N_i| + 1)` rule. The returned
/// matrix carries `min_edge_weight = 1 / (1 + max degree)`.
pub fn metropolis_weights(graph: &AdjacencyGraph) -> Result<WeightMatrix> {
    if !graph.is_connected() {
        return Err(Error::Topology(
            "metropolis weights require a connected graph".into(),
        ));
    }
    let n = graph.node_count();
    let mut w = DMatrix::zeros(n, n);
    for (i, j) in graph.edges() {
        let v = 1.0 / (1 + graph.degree(i).max(graph.degree(j))) as f64;
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    for i in 0..n {
        let off: f64 = graph.neighbors(i).iter().map(|&j| w[(i, j)]).sum();
        let diag = 1.0 - off;
        if diag <= 0.0 {
            return Err(Error::Internal(format!(
                "non-positive diagonal {diag} at node {i}"
            )));
        }
        w[(i, i)] = diag;
    }
    let alpha = 1.0 / (1 + graph.max_degree()) as f64;
    WeightMatrix::new(w, graph.clone(), alpha)
}

/// A single failed clause of the mixing-matrix requirements.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowSum {
        row: usize,
        sum: f64,
    },
    ColumnSum {
        col: usize,
        sum: f64,
    },
    /// Off-diagonal entry is nonzero on a non-edge, or not positive on an edge.
    Support {
        i: usize,
        j: usize,
        value: f64,
    },
    /// Diagonal entry is not positive or falls below `alpha`.
    Diagonal {
        i: usize,
        value: f64,
    },
    EdgeBelowAlpha {
        i: usize,
        j: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { row, sum } => write!(f, "row {row} sums to {sum}"),
            Violation::ColumnSum { col, sum } => write!(f, "column {col} sums to {sum}"),
            Violation::Support { i, j, value } => {
                write!(
                    f,
                    "entry ({i}, {j}) = {value} does not match the support graph"
                )
            }
            Violation::Diagonal { i, value } => {
                write!(f, "diagonal ({i}, {i}) = {value} too small")
            }
            Violation::EdgeBelowAlpha { i, j, value } => {
                write!(f, "edge weight ({i}, {j}) = {value} below alpha")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks `w` against the doubly stochastic, support and lower-bound
/// requirements for mixing over `graph`, listing every violated clause.
// negated comparisons also reject NaN
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate_weights(
    w: &DMatrix<f64>,
    graph: &AdjacencyGraph,
    alpha: f64,
) -> Result<ValidationReport> {
    let n = graph.node_count();
    if w.nrows() != w.ncols() || w.nrows() != n {
        return Err(Error::Shape(format!(
            "weight matrix is {}x{}, graph has {n} nodes",
            w.nrows(),
            w.ncols()
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let mut report = ValidationReport::default();
    for row in 0..n {
        let sum = w.row(row).sum();
        if !((sum - 1.0).abs() <= STOCHASTIC_TOL) {
            report.violations.push(Violation::RowSum { row, sum });
        }
    }
    for col in 0..n {
        let sum = w.column(col).sum();
        if !((sum - 1.0).abs() <= STOCHASTIC_TOL) {
            report.violations.push(Violation::ColumnSum { col, sum });
        }
    }
    let floor = alpha - STOCHASTIC_TOL;
    for i in 0..n {
        let d = w[(i, i)];
        if !(d > 0.0 && d >= floor) {
            report.violations.push(Violation::Diagonal { i, value: d });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let value = w[(i, j)];
            if graph.has_edge(i, j) {
                if !(value > 0.0) {
                    report.violations.push(Violation::Support { i, j, value });
                } else if value < floor {
                    report
                        .violations
                        .push(Violation::EdgeBelowAlpha { i, j, value });
                }
            } else if value != 0.0 {
                report.violations.push(Violation::Support { i, j, value });
            }
        }
    }
    Ok(report)
}
