//! Composite Gauss-Legendre rules on intervals and rectangles.

use std::f64::consts::PI;

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[a, b]` split into `panels` equal pieces.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = 0.0;
        for k in 0..panels {
            let mid = a + (k as f64 + 0.5) * width;
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + half * x);
            }
            total += acc * half;
        }
        total
    }

    /// Integral of `f` over `[ax, bx] x [ay, by]` with a tensor-product rule on
    /// a `panels x panels` grid of sub-rectangles.
    pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
        &self,
        mut f: F,
        (ax, bx): (f64, f64),
        (ay, by): (f64, f64),
        panels: usize,
    ) -> f64 {
        let wx = (bx - ax) / panels as f64;
        let wy = (by - ay) / panels as f64;
        let (hx, hy) = (0.5 * wx, 0.5 * wy);
        let mut total = 0.0;
        for i in 0..panels {
            let mx = ax + (i as f64 + 0.5) * wx;
            for j in 0..panels {
                let my = ay + (j as f64 + 0.5) * wy;
                let mut acc = 0.0;
                for (u, wu) in self.nodes.iter().zip(&self.weights) {
                    let x = mx + hx * u;
                    for (v, wv) in self.nodes.iter().zip(&self.weights) {
                        acc += wu * wv * f(x, my + hy * v);
                    }
                }
                total += acc * hx * hy;
            }
        }
        total
    }
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
