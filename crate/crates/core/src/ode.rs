//! Fixed-step integration grids and the classical RK4 step.
//!
//! Curves may have velocity kinks (truncation, squeezing, piecewise
//! reparametrization). Grids always place a node on every kink and every
//! smooth piece gets an even number of steps so Simpson sums line up.

use crate::error::Result;

/// Which one-sided limit to use when a quantity jumps at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Node layout on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    /// `(first node, last node)` index of each smooth piece.
    pieces: Vec<(usize, usize)>,
}

impl Grid {
    /// Uniform pieces between consecutive breakpoints, `≈ steps` intervals in
    /// total, distributed by piece length.
    pub fn new(breakpoints: &[f64], steps: usize) -> Self {
        let mut cuts = vec![0.0];
        let mut bps: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > 1e-14 && b < 1.0 - 1e-14)
            .collect();
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bps.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        cuts.extend(bps);
        cuts.push(1.0);

        let mut nodes = vec![0.0];
        let mut pieces = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut k = ((b - a) * steps as f64).round() as usize;
            k = k.max(2);
            if k % 2 == 1 {
                k += 1;
            }
            let start = nodes.len() - 1;
            for i in 1..=k {
                let t = if i == k { b } else { a + (b - a) * i as f64 / k as f64 };
                nodes.push(t);
            }
            pieces.push((start, nodes.len() - 1));
        }
        Self { nodes, pieces }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn pieces(&self) -> &[(usize, usize)] {
        &self.pieces
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Index of the node equal to `t`, if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.nodes.iter().position(|&s| (s - t).abs() < 1e-13)
    }

    /// Composite Simpson integral of node samples, piece by piece.
    pub fn integrate<T: crate::quadrature::Linear>(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.nodes.len());
        let mut total: Option<T> = None;
        for &(s, e) in &self.pieces {
            let h = (self.nodes[e] - self.nodes[s]) / (e - s) as f64;
            let part = crate::quadrature::simpson(&values[s..=e], h);
            total = Some(match total {
                Some(acc) => acc + part,
                None => part,
            });
        }
        total.expect("grid has at least one piece")
    }
}

/// State that supports `self += a·x`.
pub trait OdeState: Clone {
    fn axpy(&mut self, a: f64, x: &Self);
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

/// One classical RK4 step from `t0` to `t0 + h` inside a smooth piece.
///
/// The first stage sees right limits and the last stage left limits, so a step
/// that ends on a kink never reads the velocity of the next piece.
pub fn rk4_step<S, F>(t0: f64, h: f64, y: &S, mut f: F) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, Side, &S) -> Result<S>,
{
    let k1 = f(t0, Side::Right, y)?;
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, &k1);
    let k2 = f(t0 + 0.5 * h, Side::Right, &y2)?;
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = f(t0 + 0.5 * h, Side::Right, &y3)?;
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = f(t0 + h, Side::Left, &y4)?;
    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_places_nodes_on_breakpoints() {
        let g = Grid::new(&[0.3, 0.75], 100);
        assert!(g.index_of(0.3).is_some());
        assert!(g.index_of(0.75).is_some());
        for &(s, e) in g.pieces() {
            assert_eq!((e - s) % 2, 0);
        }
        assert_eq!(*g.nodes().last().unwrap(), 1.0);
    }

    #[test]
    fn grid_integrates_across_pieces() {
        let g = Grid::new(&[0.5], 40);
        let v: Vec<f64> = g.nodes().iter().map(|t| t * t).collect();
        assert!((g.integrate(&v) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let solve = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = 1.0;
            for i in 0..n {
                y = rk4_step(i as f64 * h, h, &y, |t, _, y| Ok(t * y)).unwrap();
            }
            y
        };
        let exact = 0.5f64.exp();
        let e1 = (solve(10) - exact).abs();
        let e2 = (solve(20) - exact).abs();
        let ratio = e1 / e2;
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
