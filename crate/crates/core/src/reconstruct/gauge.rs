use std::collections::VecDeque;

use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::ComplexMatrix;

const ZERO_TOL: f64 = 1e-12;

/// A unitary in canonical gauge: the phases of a spanning tree of non-zero
/// entries (the first row and column, when non-zero) are real and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GaugeFixedUnitary(ComplexMatrix);

impl GaugeFixedUnitary {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }
}

/// Applies `U → D1 U D2` so that a breadth-first spanning tree of the
/// bipartite row/column graph of non-zero entries becomes real positive.
///
/// The tree is rooted at column 0 and explored in index order, so for a
/// matrix without zeros the first column and first row end up real.
pub fn gauge_fix(u: &ComplexMatrix) -> GaugeFixedUnitary {
    let (rows, cols) = (u.rows(), u.cols());
    let mut row_phase: Vec<Option<f64>> = vec![None; rows];
    let mut col_phase: Vec<Option<f64>> = vec![None; cols];

    #[derive(Clone, Copy)]
    enum Node {
        Row(usize),
        Col(usize),
    }

    for root in 0..cols {
        if col_phase[root].is_some() {
            continue;
        }
        col_phase[root] = Some(0.0);
        let mut queue = VecDeque::from([Node::Col(root)]);
        while let Some(node) = queue.pop_front() {
            match node {
                Node::Col(c) => {
                    let b = col_phase[c].unwrap();
                    for j in 0..rows {
                        if row_phase[j].is_none() && u[(j, c)].norm() > ZERO_TOL {
                            row_phase[j] = Some(-u[(j, c)].arg() - b);
                            queue.push_back(Node::Row(j));
                        }
                    }
                }
                Node::Row(r) => {
                    let a = row_phase[r].unwrap();
                    for i in 0..cols {
                        if col_phase[i].is_none() && u[(r, i)].norm() > ZERO_TOL {
                            col_phase[i] = Some(-u[(r, i)].arg() - a);
                            queue.push_back(Node::Col(i));
                        }
                    }
                }
            }
        }
    }

    let fixed = ComplexMatrix::from_fn(rows, cols, |j, i| {
        let phase = row_phase[j].unwrap_or(0.0) + col_phase[i].unwrap_or(0.0);
        u[(j, i)] * Complex64::from_polar(1.0, phase)
    });
    GaugeFixedUnitary(fixed)
}
