use crate::grid::{BoundarySpec, EdgeSpec, Grid};

/// How a stencil reference to a node enters the linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRef {
    /// Unknown with the given vector index.
    Unknown(usize),
    /// Dirichlet node: value fixed, contributes nothing to the Jacobian.
    Fixed,
}

/// Enumeration of solver unknowns. Rows of constant column index are
/// contiguous with the y-index fastest, keeping the bandwidth at the strip
/// height rather than the strip length.
#[derive(Debug, Clone)]
pub struct UnknownMap {
    nodes: Vec<(usize, usize)>,
    index_of: Vec<Option<usize>>,
    rows: usize,
    periodic: bool,
    left_neumann: bool,
    right_neumann: bool,
    nx: usize,
    ny: usize,
}

impl UnknownMap {
    pub fn new(grid: &Grid, bc: &BoundarySpec) -> Self {
        let rows = grid.ny - 2;
        let periodic = grid.spec.periodic_x;
        let left_neumann = matches!(bc.left, EdgeSpec::NeumannZero);
        let right_neumann = matches!(bc.right, EdgeSpec::NeumannZero);
        let mut nodes = Vec::new();
        let mut index_of = vec![None; grid.node_count()];
        let cols: Vec<usize> = if periodic {
            (0..grid.distinct_cols()).collect()
        } else {
            (1..grid.nx - 1).collect()
        };
        for &i in &cols {
            for j in 1..grid.ny - 1 {
                index_of[grid.index(i, j)] = Some(nodes.len());
                nodes.push((i, j));
            }
        }
        UnknownMap {
            nodes,
            index_of,
            rows,
            periodic,
            left_neumann,
            right_neumann,
            nx: grid.nx,
            ny: grid.ny,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[(usize, usize)] {
        &self.nodes
    }

    /// Half bandwidth of the assembled system (wrap entries excepted).
    pub fn half_bandwidth(&self) -> usize {
        self.rows + 1
    }

    pub fn has_wrap(&self) -> bool {
        self.periodic
    }

    /// Resolve a stencil reference at (i, j). Neumann truncation edges mirror
    /// the first interior column, folding the dependence into that unknown.
    pub fn resolve(&self, grid: &Grid, i: usize, j: usize) -> NodeRef {
        if j == 0 || j == self.ny - 1 {
            return NodeRef::Fixed;
        }
        if self.periodic {
            let i = if i == self.nx - 1 { 0 } else { i };
            return NodeRef::Unknown(self.index_of[grid.index(i, j)].expect("periodic interior"));
        }
        if i == 0 {
            return if self.left_neumann {
                NodeRef::Unknown(self.index_of[grid.index(1, j)].expect("mirror"))
            } else {
                NodeRef::Fixed
            };
        }
        if i == self.nx - 1 {
            return if self.right_neumann {
                NodeRef::Unknown(self.index_of[grid.index(self.nx - 2, j)].expect("mirror"))
            } else {
                NodeRef::Fixed
            };
        }
        NodeRef::Unknown(self.index_of[grid.index(i, j)].expect("interior"))
    }
}
