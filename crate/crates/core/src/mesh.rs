//! Structured triangulations of axis-aligned rectangles.

/// Node grid of a rectangle, `(nx + 1) x (ny + 1)` nodes, two triangles per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub nx: usize,
    pub ny: usize,
    /// Global index of the first node.
    pub offset: usize,
}

impl Grid {
    /// Cells are split along alternating diagonals so the mesh is mirror
    /// symmetric whenever `nx` is even.
    pub fn new(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize, offset: usize) -> Self {
        Self::with_columns(&linspace(x[0], x[1], nx), y, ny, offset)
    }

    /// Grid over explicit column abscissae.
    pub fn with_columns(xs: &[f64], y: [f64; 2], ny: usize, offset: usize) -> Self {
        let nx = xs.len() - 1;
        let ys = linspace(y[0], y[1], ny);
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for &yj in &ys {
            for &xi in xs {
                nodes.push([xi, yj]);
            }
        }
        let id = |i: usize, j: usize| offset + j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                if (i + j) % 2 == 0 {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                } else {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
        Grid { nodes, triangles, nx, ny, offset }
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        self.offset + j * (self.nx + 1) + i
    }

    pub fn bottom(&self) -> Vec<usize> {
        (0..=self.nx).map(|i| self.node(i, 0)).collect()
    }

    pub fn top(&self) -> Vec<usize> {
        (0..=self.nx).map(|i| self.node(i, self.ny)).collect()
    }

    pub fn left(&self) -> Vec<usize> {
        (0..=self.ny).map(|j| self.node(0, j)).collect()
    }

    pub fn right(&self) -> Vec<usize> {
        (0..=self.ny).map(|j| self.node(self.nx, j)).collect()
    }

    /// Node closest to a point (lowest index on ties).
    pub fn nearest(&self, p: [f64; 2]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, q) in self.nodes.iter().enumerate() {
            let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
            if d < best.0 {
                best = (d, k);
            }
        }
        self.offset + best.1
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_and_orientation() {
        let g = Grid::new([0.0, 2.0], [0.0, 1.0], 4, 2, 10);
        assert_eq!(g.nodes.len(), 15);
        assert_eq!(g.triangles.len(), 16);
        assert_eq!(g.node(4, 2), 24);
        for t in &g.triangles {
            let p: Vec<[f64; 2]> = t.iter().map(|&k| g.nodes[k - 10]).collect();
            let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
            assert!((area - 0.125).abs() < 1e-15);
        }
        assert_eq!(g.nearest([2.0, 1.0]), 24);
        assert_eq!(linspace(0.0, 0.3, 3)[3], 0.3);
    }
}
